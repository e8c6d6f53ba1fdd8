//! Newline-delimited JSON session protocol for interactive clients.
//!
//! Client to core:
//!
//! ```text
//! {"type":"Start","scene":"menu"|"game"|"resume"}
//! {"type":"Input","tick":1,"move_x":1,"move_y":0,"jump":false,"adv":false,"pause":false}
//! ```
//!
//! Core to client: `Level` (static tile rows, sent once per `Start`), `Snap`
//! (a flattened [`Snapshot`]) and `Error`. Every `Input` gets exactly one
//! reply line, a `Snap` or an `Error`.
//!
//! The host owns the world, so a client that reconnects with `resume`
//! picks up where the last one left off.

use serde::{Deserialize, Serialize};

use crate::engine::{Engine, Snapshot, WorldState};
use crate::geometry::Cell;
use crate::player::InputFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartScene {
    /// New session parked on the main menu.
    Menu,
    /// New session straight into the first attempt.
    Game,
    /// Keep the current world, or open the menu if there is none.
    Resume,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ClientMessage {
    Start {
        scene: StartScene,
    },
    Input {
        tick: u64,
        #[serde(default)]
        move_x: f64,
        #[serde(default)]
        move_y: f64,
        #[serde(default)]
        jump: bool,
        #[serde(default)]
        adv: bool,
        #[serde(default)]
        pause: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelView {
    pub width: usize,
    pub height: usize,
    /// Tile characters, top row first.
    pub rows: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum ServerMessage {
    Level(LevelView),
    Snap(Snapshot),
    Error { message: String },
}

impl ServerMessage {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("server messages always serialize")
    }
}

pub fn level_view(engine: &Engine) -> LevelView {
    let level = engine.level();
    let rows = (0..level.height)
        .rev()
        .map(|y| {
            (0..level.width)
                .map(|x| level.tile(Cell::new(x as i64, y as i64)).map_or('.', |t| t.to_char()))
                .collect()
        })
        .collect();
    LevelView {
        width: level.width,
        height: level.height,
        rows,
    }
}

/// Server-side session: one engine, one world, and the last input tick.
#[derive(Debug)]
pub struct SessionHost {
    engine: Engine,
    world: Option<WorldState>,
    last_tick: Option<u64>,
}

impl SessionHost {
    pub fn new(engine: Engine) -> Self {
        Self {
            engine,
            world: None,
            last_tick: None,
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn world(&self) -> Option<&WorldState> {
        self.world.as_ref()
    }

    pub fn handle(&mut self, msg: ClientMessage) -> Vec<ServerMessage> {
        match msg {
            ClientMessage::Start { scene } => {
                self.last_tick = None;
                match scene {
                    StartScene::Menu => self.reset(self.engine.world_at_menu()),
                    StartScene::Game => self.reset(self.engine.world_init(1)),
                    StartScene::Resume => {
                        if self.world.is_none() {
                            self.reset(self.engine.world_at_menu());
                        }
                    }
                }
                let world = self.world.as_ref().expect("world set above");
                vec![
                    ServerMessage::Level(level_view(&self.engine)),
                    ServerMessage::Snap(self.engine.snapshot(world)),
                ]
            }
            ClientMessage::Input {
                tick,
                move_x,
                move_y,
                jump,
                adv,
                pause,
            } => {
                let Some(world) = self.world.as_mut() else {
                    return vec![error("no session: send Start first")];
                };
                if let Some(last) = self.last_tick {
                    if tick <= last {
                        return vec![error(format!("tick {tick} is not after {last}"))];
                    }
                }
                if !move_x.is_finite() || !move_y.is_finite() {
                    return vec![error("axis values must be finite")];
                }
                self.last_tick = Some(tick);
                let frame = InputFrame {
                    move_x,
                    move_y,
                    jump_pressed: jump,
                    advance_pressed: adv,
                    pause_pressed: pause,
                };
                self.engine.step(world, &frame);
                vec![ServerMessage::Snap(self.engine.snapshot(world))]
            }
        }
    }

    /// Parses and handles one wire line.
    pub fn handle_line(&mut self, line: &str) -> Vec<ServerMessage> {
        match serde_json::from_str::<ClientMessage>(line) {
            Ok(msg) => self.handle(msg),
            Err(e) => vec![error(format!("bad message: {e}"))],
        }
    }

    fn reset(&mut self, world: WorldState) {
        self.world = Some(world);
        self.last_tick = None;
    }
}

fn error(message: impl Into<String>) -> ServerMessage {
    ServerMessage::Error {
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::parse_level;
    use crate::narrative::load_script;
    use crate::player::Tunables;

    fn host() -> SessionHost {
        let level = parse_level(".....\n.S...\n#####\n---\n").unwrap();
        let script = load_script("conversation x\nspeaker A\n> b\n").unwrap();
        SessionHost::new(Engine::new(level, script, Tunables::default()).unwrap())
    }

    fn kinds(msgs: &[ServerMessage]) -> Vec<&'static str> {
        msgs.iter()
            .map(|m| match m {
                ServerMessage::Level(_) => "Level",
                ServerMessage::Snap(_) => "Snap",
                ServerMessage::Error { .. } => "Error",
            })
            .collect()
    }

    #[test]
    fn start_then_inputs() {
        let mut h = host();
        assert_eq!(kinds(&h.handle_line(r#"{"type":"Input","tick":1}"#)), ["Error"]);
        let start = h.handle_line(r#"{"type":"Start","scene":"game"}"#);
        assert_eq!(kinds(&start), ["Level", "Snap"]);
        let ServerMessage::Level(view) = &start[0] else { unreachable!() };
        assert_eq!(view.rows, [".....", ".....", "#####"]);
        for t in 1..=5 {
            let r = h.handle_line(&format!(r#"{{"type":"Input","tick":{t},"move_x":1}}"#));
            assert_eq!(kinds(&r), ["Snap"]);
        }
        assert_eq!(h.world().unwrap().ui_tick, 5);
    }

    #[test]
    fn ticks_must_increase() {
        let mut h = host();
        h.handle_line(r#"{"type":"Start","scene":"game"}"#);
        h.handle_line(r#"{"type":"Input","tick":3}"#);
        assert_eq!(kinds(&h.handle_line(r#"{"type":"Input","tick":3}"#)), ["Error"]);
        assert_eq!(kinds(&h.handle_line(r#"{"type":"Input","tick":2}"#)), ["Error"]);
        assert_eq!(h.world().unwrap().ui_tick, 1);
        assert_eq!(kinds(&h.handle_line("not json")), ["Error"]);
    }

    #[test]
    fn resume_keeps_the_world() {
        let mut h = host();
        h.handle_line(r#"{"type":"Start","scene":"game"}"#);
        for t in 1..=10 {
            h.handle_line(&format!(r#"{{"type":"Input","tick":{t},"move_x":1}}"#));
        }
        let before = h.world().unwrap().clone();
        let r = h.handle_line(r#"{"type":"Start","scene":"resume"}"#);
        assert_eq!(h.world(), Some(&before));
        let ServerMessage::Snap(snap) = &r[1] else { unreachable!() };
        assert_eq!(snap.ui_tick, 10);
        // tick numbering restarts with the new connection
        assert_eq!(kinds(&h.handle_line(r#"{"type":"Input","tick":1}"#)), ["Snap"]);
    }

    #[test]
    fn menu_waits_for_start_press() {
        let mut h = host();
        h.handle_line(r#"{"type":"Start","scene":"menu"}"#);
        let r = h.handle_line(r#"{"type":"Input","tick":1,"move_x":1}"#);
        let ServerMessage::Snap(snap) = &r[0] else { unreachable!() };
        assert_eq!(snap.scene, crate::session::Scene::MainMenu);
        let r = h.handle_line(r#"{"type":"Input","tick":2,"jump":true}"#);
        let ServerMessage::Snap(snap) = &r[0] else { unreachable!() };
        assert_eq!(snap.scene, crate::session::Scene::Game);
        let line = r[0].to_line();
        assert!(line.starts_with(r#"{"type":"Snap","scene":"Game""#), "{line}");
        assert!(!line.contains('\n'));
    }
}
