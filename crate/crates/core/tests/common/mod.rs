#![allow(dead_code)]

use climbloop_core::assets::{self, shipped_engine};
use climbloop_core::engine::WorldState;
use climbloop_core::geometry::{Aabb, Vec2};
use climbloop_core::level::{LevelDef, TileKind};
use climbloop_core::replay::{parse_trace, InputTrace};
use climbloop_core::{Engine, GameEvent, InputFrame, LoggedEvent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn engine() -> Engine {
    shipped_engine()
}

pub fn playthrough() -> InputTrace {
    parse_trace(assets::PLAYTHROUGH_TRACE).unwrap()
}

pub fn idle_timer() -> InputTrace {
    parse_trace(assets::IDLE_TIMER_TRACE).unwrap()
}

pub fn spike_death() -> InputTrace {
    parse_trace(assets::SPIKE_DEATH_TRACE).unwrap()
}

/// Steps `frames` from `world`, returning every logged event.
pub fn drive(engine: &Engine, world: &mut WorldState, frames: impl IntoIterator<Item = InputFrame>) -> Vec<LoggedEvent> {
    let mut log = Vec::new();
    for f in frames {
        engine.step(world, &f);
        log.extend(world.events.iter().cloned());
    }
    log
}

pub fn first_tick(log: &[LoggedEvent], event: &GameEvent) -> Option<u64> {
    log.iter().find(|e| &e.event == event).map(|e| e.tick)
}

/// Random input with sticky axes and occasional button presses.
pub fn random_frames(seed: u64, ticks: usize) -> Vec<InputFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut move_x = 0.0;
    let mut move_y = 0.0;
    (0..ticks)
        .map(|_| {
            if rng.gen_bool(0.08) {
                move_x = [-1.0, 0.0, 1.0, -0.5, 0.5][rng.gen_range(0..5)];
            }
            if rng.gen_bool(0.02) {
                move_y = [-1.0, 0.0, 1.0][rng.gen_range(0..3)];
            }
            InputFrame {
                move_x,
                move_y,
                jump_pressed: rng.gen_bool(0.08),
                advance_pressed: rng.gen_bool(0.05),
                pause_pressed: rng.gen_bool(0.004),
            }
        })
        .collect()
}

fn terrain(level: &LevelDef, x: i64, y: i64) -> bool {
    if x < 0 || x >= level.width as i64 {
        return true;
    }
    if y < 0 || y >= level.height as i64 {
        return false;
    }
    level.grid[(level.height - 1 - y as usize) * level.width + x as usize] == TileKind::Terrain
}

/// Independent grounding check: some solid top lies within `depth` below
/// the feet (or touches them) under the body's open x span.
pub fn grounded_oracle(level: &LevelDef, body: &Aabb, boxes: &[Aabb], depth: f64) -> bool {
    let (min, max) = (body.min(), body.max());
    let near = |top: f64| top <= min.y + 1e-9 && top >= min.y - depth - 1e-9;
    let x0 = min.x.floor() as i64 - 1;
    let x1 = max.x.floor() as i64 + 1;
    let y0 = (min.y - depth).floor() as i64 - 1;
    let y1 = min.y.floor() as i64 + 1;
    for x in x0..=x1 {
        if !(x as f64 + 1.0 > min.x && (x as f64) < max.x) {
            continue;
        }
        for y in y0..=y1 {
            if terrain(level, x, y) && near(y as f64 + 1.0) {
                return true;
            }
        }
    }
    boxes.iter().any(|b| b.max().x > min.x && b.min().x < max.x && near(b.max().y))
}

/// Puts the player at `center` with no velocity.
pub fn teleport(world: &mut WorldState, center: Vec2) {
    world.player.body.center = center;
    world.player.velocity = Vec2::ZERO;
}
