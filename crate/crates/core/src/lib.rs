//! Deterministic core of a two-clock tile platformer: level and dialogue
//! formats, player physics, the attempt loop, a fixed-timestep engine with a
//! canonical state hash, trace replay and a line-based session protocol.

pub mod assets;
pub mod engine;
pub mod geometry;
pub mod level;
pub mod narrative;
pub mod player;
pub mod protocol;
pub mod replay;
pub mod session;

pub use engine::{state_hash, Engine, GameEvent, LoggedEvent, Snapshot, WorldState};
pub use level::{parse_level, LevelDef};
pub use narrative::{load_script, DialogueScript};
pub use player::{InputFrame, Tunables};
pub use replay::{parse_trace, InputTrace};
pub use session::Scene;
