//! Read-only projection of a world for renderers.

use serde::Serialize;

use crate::player::{AudioEvent, Facing, MovementState};
use crate::session::Scene;

use super::{Engine, WorldState};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayerView {
    pub x: f64,
    pub y: f64,
    pub half_width: f64,
    pub half_height: f64,
    pub anim: MovementState,
    pub anim_code: u8,
    pub anim_speed: f64,
    pub facing: Facing,
    pub grounded: bool,
    pub take_hit: bool,
    pub kill_player: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlatformView {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub half_width: f64,
    pub half_height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DialogueView {
    pub speaker: String,
    pub text: String,
    pub fully_revealed: bool,
    pub continue_available: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CameraView {
    pub x: f64,
    pub y: f64,
    pub frozen: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub scene: Scene,
    pub attempt: u32,
    pub sim_tick: u64,
    pub ui_tick: u64,
    pub health: u32,
    pub max_health: u32,
    pub timer_fraction: f64,
    pub timer_running: bool,
    pub paused: bool,
    pub sim_frozen: bool,
    pub player: PlayerView,
    pub platforms: Vec<PlatformView>,
    pub dialogue: Option<DialogueView>,
    pub camera: CameraView,
    pub audio_events: Vec<AudioEvent>,
}

pub(super) fn project(engine: &Engine, w: &WorldState) -> Snapshot {
    let p = &w.player;
    Snapshot {
        scene: w.scene,
        attempt: w.session.current_attempt,
        sim_tick: w.sim_tick,
        ui_tick: w.ui_tick,
        health: p.health,
        max_health: engine.tunables().max_health,
        timer_fraction: w.timer.fraction(),
        timer_running: w.timer.running,
        paused: w.session.is_paused && !w.conversation.active,
        sim_frozen: w.sim_frozen(),
        player: PlayerView {
            x: p.body.center.x,
            y: p.body.center.y,
            half_width: p.body.half_extents.x,
            half_height: p.body.half_extents.y,
            anim: p.anim,
            anim_code: p.anim.code(),
            anim_speed: p.anim_speed,
            facing: p.facing,
            grounded: p.grounded,
            take_hit: p.take_hit,
            kill_player: p.killed || w.death_pulse,
        },
        platforms: w
            .platforms
            .iter()
            .map(|ps| {
                let def = &engine.level().platforms[ps.def];
                PlatformView {
                    id: def.id.clone(),
                    x: ps.position.x,
                    y: ps.position.y,
                    half_width: def.half_extents.x,
                    half_height: def.half_extents.y,
                }
            })
            .collect(),
        dialogue: w.conversation.active.then(|| DialogueView {
            speaker: w.conversation.speaker.clone(),
            text: w.conversation.revealed_text().to_string(),
            fully_revealed: w.conversation.fully_revealed(),
            continue_available: w.conversation.active,
        }),
        camera: CameraView {
            x: w.camera.position.x,
            y: w.camera.position.y,
            frozen: w.camera.frozen,
        },
        audio_events: w.audio_events.clone(),
    }
}
