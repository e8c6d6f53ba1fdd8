//! Shipped level, dialogue, tunables, traces and golden files, embedded at
//! compile time.

use crate::engine::{Engine, EngineError};
use crate::level::parse_level;
use crate::narrative::load_script;
use crate::player::Tunables;

pub const TOWER_LEVEL: &str = include_str!("../assets/tower.level");
pub const MANUSCRIPT: &str = include_str!("../assets/manuscript.script");
pub const DEFAULT_TUNABLES: &str = include_str!("../assets/default.tunables");

pub const PLAYTHROUGH_TRACE: &str = include_str!("../assets/traces/playthrough.trace");
pub const IDLE_TIMER_TRACE: &str = include_str!("../assets/traces/idle_timer.trace");
pub const SPIKE_DEATH_TRACE: &str = include_str!("../assets/traces/spike_death.trace");

pub const GOLDEN_TICK0: &str = include_str!("../assets/golden/tick0.hash");
pub const GOLDEN_PLAYTHROUGH_HASHES: &str = include_str!("../assets/golden/playthrough.hashes");
pub const GOLDEN_PLAYTHROUGH_EVENTS: &str = include_str!("../assets/golden/playthrough.events");

/// Path of the asset directory in the source tree.
pub fn asset_dir() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/assets")
}

/// Engine built from the shipped level, manuscript and tunables.
///
/// # Panics
///
/// Never in a release build: the shipped assets are checked by tests.
pub fn shipped_engine() -> Engine {
    try_shipped_engine().expect("shipped assets are valid")
}

pub fn try_shipped_engine() -> Result<Engine, ShippedError> {
    let level = parse_level(TOWER_LEVEL)?;
    let script = load_script(MANUSCRIPT)?;
    let tunables = Tunables::parse(DEFAULT_TUNABLES)?;
    Ok(Engine::new(level, script, tunables)?)
}

#[derive(Debug, thiserror::Error)]
pub enum ShippedError {
    #[error("level: {0}")]
    Level(#[from] crate::level::LevelError),
    #[error("script: {0}")]
    Script(#[from] crate::narrative::ScriptError),
    #[error("tunables: {0}")]
    Tunables(#[from] crate::player::TunablesError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
