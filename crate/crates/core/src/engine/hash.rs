//! Canonical byte encoding of a world and its FNV-1a digest.
//!
//! Integers are little-endian and fixed width, floats are written as their
//! IEEE-754 bit patterns, booleans as one byte, strings as a `u32` byte
//! length followed by UTF-8, and sequences as a `u32` count followed by the
//! elements. Field order of the full encoding:
//!
//! 1. scene (`u8`: menu 0, game 1, credits 2)
//! 2. session: attempt `u32`, paused flag
//! 3. sim tick `u64`, ui tick `u64`
//! 4. player: center, half extents, velocity, health `u32`, grounded,
//!    anim code `u8`, anim speed, facing `u8` (left 0, right 1), alive,
//!    take-hit pulse, killed
//! 5. platforms: definition index `u32`, position, waypoint index `u32`,
//!    carrying flag
//! 6. triggers: active, fired
//! 7. timer: running, remaining, duration
//! 8. camera: position, frozen
//! 9. hazard contacts: `(i64, i64)` cells in ascending order
//! 10. pending credits tick: tag `u8` then `u64` when present
//! 11. conversation: active, speaker, current, revealed `u64`, pending
//!     `(speaker, text)` lines, dialogue id (tag `u8` then string)
//! 12. this tick's outputs: death pulse, audio event codes `u8`, logged
//!     events as `(tick u64, text)`

use crate::geometry::{Aabb, Vec2};
use crate::player::{AudioEvent, Facing};
use crate::session::Scene;

use super::WorldState;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Byte sink for the canonical encoding.
#[derive(Debug, Default, Clone)]
pub struct Canonical {
    pub bytes: Vec<u8>,
}

impl Canonical {
    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.bytes.push(v);
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.bytes.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.bytes.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn i64(&mut self, v: i64) -> &mut Self {
        self.bytes.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.u64(v.to_bits())
    }

    pub fn bool(&mut self, v: bool) -> &mut Self {
        self.u8(u8::from(v))
    }

    pub fn str(&mut self, s: &str) -> &mut Self {
        self.u32(s.len() as u32);
        self.bytes.extend_from_slice(s.as_bytes());
        self
    }

    pub fn vec2(&mut self, v: Vec2) -> &mut Self {
        self.f64(v.x).f64(v.y)
    }

    pub fn aabb(&mut self, b: &Aabb) -> &mut Self {
        self.vec2(b.center).vec2(b.half_extents)
    }

    fn len(&mut self, n: usize) -> &mut Self {
        self.u32(n as u32)
    }
}

fn scene_code(s: Scene) -> u8 {
    match s {
        Scene::MainMenu => 0,
        Scene::Game => 1,
        Scene::Credits => 2,
    }
}

fn audio_code(a: AudioEvent) -> u8 {
    match a {
        AudioEvent::Jump => 0,
        AudioEvent::Land => 1,
        AudioEvent::Footsteps => 2,
        AudioEvent::Hit => 3,
        AudioEvent::Death => 4,
    }
}

fn write_header(c: &mut Canonical, w: &WorldState) {
    c.u8(scene_code(w.scene))
        .u32(w.session.current_attempt)
        .bool(w.session.is_paused)
        .u64(w.sim_tick)
        .u64(w.ui_tick);
}

/// Items 4 to 10: everything that moves with the sim clock.
fn write_sim(c: &mut Canonical, w: &WorldState) {
    let p = &w.player;
    c.aabb(&p.body)
        .vec2(p.velocity)
        .u32(p.health)
        .bool(p.grounded)
        .u8(p.anim.code())
        .f64(p.anim_speed)
        .u8(match p.facing {
            Facing::Left => 0,
            Facing::Right => 1,
        })
        .bool(p.alive)
        .bool(p.take_hit)
        .bool(p.killed);

    c.len(w.platforms.len());
    for ps in &w.platforms {
        c.u32(ps.def as u32)
            .vec2(ps.position)
            .u32(ps.waypoint_index as u32)
            .bool(ps.carrying_player);
    }
    c.len(w.triggers.len());
    for t in &w.triggers {
        c.bool(t.active).bool(t.fired);
    }
    c.bool(w.timer.running).f64(w.timer.remaining).f64(w.timer.duration);
    c.vec2(w.camera.position).bool(w.camera.frozen);
    c.len(w.hazard_contacts.len());
    for cell in &w.hazard_contacts {
        c.i64(cell.x).i64(cell.y);
    }
    match w.pending_credits_at {
        Some(t) => c.u8(1).u64(t),
        None => c.u8(0),
    };
}

fn write_conversation(c: &mut Canonical, w: &WorldState) {
    let conv = &w.conversation;
    c.bool(conv.active)
        .str(&conv.speaker)
        .str(&conv.current)
        .u64(conv.revealed as u64);
    c.len(conv.pending.len());
    for line in &conv.pending {
        c.str(&line.speaker).str(&line.text);
    }
    match &w.conversation_id {
        Some(id) => c.u8(1).str(id),
        None => c.u8(0),
    };
}

fn write_outputs(c: &mut Canonical, w: &WorldState) {
    c.bool(w.death_pulse);
    c.len(w.audio_events.len());
    for a in &w.audio_events {
        c.u8(audio_code(*a));
    }
    c.len(w.events.len());
    for e in &w.events {
        c.u64(e.tick).str(&e.event.to_string());
    }
}

/// The full canonical encoding.
pub fn canonical_bytes(w: &WorldState) -> Vec<u8> {
    let mut c = Canonical::default();
    write_header(&mut c, w);
    write_sim(&mut c, w);
    write_conversation(&mut c, w);
    write_outputs(&mut c, w);
    c.bytes
}

/// Digest of the full world.
pub fn state_hash(w: &WorldState) -> u64 {
    fnv1a64(&canonical_bytes(w))
}

/// Digest of the part of the world driven by the sim clock: items 1, 2, the
/// sim tick and 4 to 10. Stays fixed while the sim clock is frozen.
pub fn sim_state_hash(w: &WorldState) -> u64 {
    let mut c = Canonical::default();
    c.u8(scene_code(w.scene))
        .u32(w.session.current_attempt)
        .bool(w.session.is_paused)
        .u64(w.sim_tick);
    write_sim(&mut c, w);
    fnv1a64(&c.bytes)
}

/// Encoding of the rebuilt-on-restart state: scene plus items 4 to 11,
/// leaving out the session, both clocks and this tick's outputs.
pub fn level_state_bytes(w: &WorldState) -> Vec<u8> {
    let mut c = Canonical::default();
    c.u8(scene_code(w.scene));
    write_sim(&mut c, w);
    write_conversation(&mut c, w);
    c.bytes
}
