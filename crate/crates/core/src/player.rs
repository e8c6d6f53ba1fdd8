//! Player avatar: input, grounding, jump and fall integration, damage.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{probe_down, slide_move, Aabb, Cell, Solids, Vec2};
use crate::level::LevelDef;

/// Largest per-axis displacement handed to a single `slide_move` call.
pub const MAX_SUBSTEP: f64 = 0.5;

pub const PLAYER_HALF_EXTENTS: Vec2 = Vec2::new(0.4, 0.75);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InputFrame {
    pub move_x: f64,
    pub move_y: f64,
    pub jump_pressed: bool,
    pub advance_pressed: bool,
    pub pause_pressed: bool,
}

impl InputFrame {
    /// Same frame with both axes clamped to `[-1, 1]` (NaN reads as 0).
    pub fn clamped(self) -> InputFrame {
        let clamp = |v: f64| if v.is_nan() { 0.0 } else { v.clamp(-1.0, 1.0) };
        InputFrame {
            move_x: clamp(self.move_x),
            move_y: clamp(self.move_y),
            ..self
        }
    }

    /// The held part of the frame: axes kept, button edges cleared.
    pub fn held(self) -> InputFrame {
        InputFrame {
            jump_pressed: false,
            advance_pressed: false,
            pause_pressed: false,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MovementState {
    Idle = 0,
    Running = 1,
    Jumping = 2,
    Falling = 3,
}

impl MovementState {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Facing {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AudioEvent {
    Jump,
    Land,
    /// Emitted every tick the footstep loop should be playing.
    Footsteps,
    Hit,
    Death,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tunables {
    pub gravity: f64,
    pub move_speed: f64,
    pub jump_force: f64,
    pub fall_speed: f64,
    pub fall_threshold: f64,
    pub probe_depth: f64,
    pub damage_kick: Vec2,
    pub max_health: u32,
    pub tick_rate: u32,
}

impl Default for Tunables {
    fn default() -> Self {
        Self {
            gravity: -25.0,
            move_speed: 7.0,
            jump_force: 12.0,
            fall_speed: 2.5,
            fall_threshold: -0.1,
            probe_depth: 0.1,
            damage_kick: Vec2::new(0.0, 8.0),
            max_health: 3,
            tick_rate: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TunablesError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid tunables: {0}")]
    Invalid(String),
}

impl Tunables {
    pub fn dt(&self) -> f64 {
        1.0 / self.tick_rate as f64
    }

    pub fn validate(&self) -> Result<(), TunablesError> {
        let positive = [
            ("move_speed", self.move_speed),
            ("jump_force", self.jump_force),
            ("probe_depth", self.probe_depth),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TunablesError::Invalid(format!("{name} must be positive")));
            }
        }
        if !(self.gravity < 0.0 && self.gravity.is_finite()) {
            return Err(TunablesError::Invalid("gravity must be negative".into()));
        }
        if !(self.fall_threshold < 0.0 && self.fall_threshold.is_finite()) {
            return Err(TunablesError::Invalid("fall_threshold must be negative".into()));
        }
        if !(self.fall_speed > 1.0 && self.fall_speed.is_finite()) {
            return Err(TunablesError::Invalid("fall_speed must exceed 1".into()));
        }
        if !self.damage_kick.is_finite() || self.damage_kick.y <= 0.0 {
            return Err(TunablesError::Invalid("damage_kick must point upward".into()));
        }
        if self.max_health == 0 || self.tick_rate == 0 {
            return Err(TunablesError::Invalid("max_health and tick_rate must be positive".into()));
        }
        Ok(())
    }

    /// Parses a `key = value` file; keys not listed keep their defaults.
    pub fn parse(text: &str) -> Result<Tunables, TunablesError> {
        let mut t = Tunables::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| TunablesError::Syntax {
                line,
                message: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| {
                v.trim().parse::<f64>().map_err(|_| TunablesError::Syntax {
                    line,
                    message: format!("`{v}` is not a number"),
                })
            };
            let int = |v: &str| {
                v.parse::<u32>().map_err(|_| TunablesError::Syntax {
                    line,
                    message: format!("`{v}` is not a non-negative integer"),
                })
            };
            match key {
                "gravity" => t.gravity = num(value)?,
                "move_speed" => t.move_speed = num(value)?,
                "jump_force" => t.jump_force = num(value)?,
                "fall_speed" => t.fall_speed = num(value)?,
                "fall_threshold" => t.fall_threshold = num(value)?,
                "probe_depth" => t.probe_depth = num(value)?,
                "damage_kick" => {
                    let (x, y) = value.split_once(',').ok_or_else(|| TunablesError::Syntax {
                        line,
                        message: "damage_kick expects `x, y`".into(),
                    })?;
                    t.damage_kick = Vec2::new(num(x)?, num(y)?);
                }
                "max_health" => t.max_health = int(value)?,
                "tick_rate" => t.tick_rate = int(value)?,
                _ => {
                    return Err(TunablesError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
            }
        }
        t.validate()?;
        Ok(t)
    }
}

impl fmt::Display for Tunables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gravity = {}", self.gravity)?;
        writeln!(f, "move_speed = {}", self.move_speed)?;
        writeln!(f, "jump_force = {}", self.jump_force)?;
        writeln!(f, "fall_speed = {}", self.fall_speed)?;
        writeln!(f, "fall_threshold = {}", self.fall_threshold)?;
        writeln!(f, "probe_depth = {}", self.probe_depth)?;
        writeln!(f, "damage_kick = {}, {}", self.damage_kick.x, self.damage_kick.y)?;
        writeln!(f, "max_health = {}", self.max_health)?;
        writeln!(f, "tick_rate = {}", self.tick_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayerState {
    pub body: Aabb,
    pub velocity: Vec2,
    pub health: u32,
    pub grounded: bool,
    pub anim: MovementState,
    pub anim_speed: f64,
    pub facing: Facing,
    pub alive: bool,
    /// One-tick pulse set by [`take_damage`].
    pub take_hit: bool,
    /// Set on death; the body no longer moves.
    pub killed: bool,
}

impl PlayerState {
    /// A fresh player standing on the floor of the cell whose center is
    /// `spawn`.
    pub fn spawn_at<S: Solids + ?Sized>(spawn: Vec2, tunables: &Tunables, solids: &S) -> Self {
        let center = Vec2::new(spawn.x, spawn.y - 0.5 + PLAYER_HALF_EXTENTS.y);
        let body = Aabb::new(center, PLAYER_HALF_EXTENTS);
        PlayerState {
            body,
            velocity: Vec2::ZERO,
            health: tunables.max_health,
            grounded: probe_down(&body, tunables.probe_depth, solids),
            anim: MovementState::Idle,
            anim_speed: 0.0,
            facing: Facing::Right,
            alive: true,
            take_hit: false,
            killed: false,
        }
    }

    pub fn position(&self) -> Vec2 {
        self.body.center
    }
}

/// Animation state and running playback speed for the current motion.
pub fn derive_anim(p: &PlayerState, input: &InputFrame) -> (MovementState, f64) {
    let anim_speed = (input.move_x.abs() + input.move_y.abs()).clamp(0.0, 1.0);
    let state = if p.velocity.y > 0.1 {
        MovementState::Jumping
    } else if p.velocity.y < -0.1 {
        MovementState::Falling
    } else if p.grounded && input.move_x != 0.0 {
        MovementState::Running
    } else {
        MovementState::Idle
    };
    (state, anim_speed)
}

/// Advances the player one tick. While paused, or once dead, the state comes
/// back untouched and input is dropped.
pub fn player_step<S: Solids + ?Sized>(
    p: &PlayerState,
    input: &InputFrame,
    solids: &S,
    tunables: &Tunables,
    paused: bool,
    dt: f64,
) -> (PlayerState, Vec<AudioEvent>) {
    let mut events = Vec::new();
    if paused || !p.alive {
        return (*p, events);
    }
    let input = input.clamped();
    let mut next = *p;
    next.take_hit = false;

    next.velocity.x = input.move_x * tunables.move_speed;
    if input.move_x > 0.0 {
        next.facing = Facing::Right;
    } else if input.move_x < 0.0 {
        next.facing = Facing::Left;
    }

    let grounded_before = probe_down(&next.body, tunables.probe_depth, solids);

    let mut jumped = false;
    if input.jump_pressed && grounded_before {
        next.velocity.y = tunables.jump_force;
        events.push(AudioEvent::Jump);
        jumped = true;
    }

    // the boost decision looks at the velocity before this tick's gravity
    let falling = !jumped && next.velocity.y < tunables.fall_threshold;
    next.velocity.y += tunables.gravity * dt;
    if falling {
        next.velocity.y += tunables.gravity * (tunables.fall_speed - 1.0) * dt;
    }

    let total = next.velocity * dt;
    let steps = (total.x.abs().max(total.y.abs()) / MAX_SUBSTEP).ceil().max(1.0) as u32;
    let mut sub = if steps == 1 {
        total
    } else {
        Vec2::new(total.x / steps as f64, total.y / steps as f64)
    };
    for _ in 0..steps {
        let r = slide_move(&next.body, sub, solids);
        next.body.center = r.center;
        if r.hit_x {
            next.velocity.x = 0.0;
            sub.x = 0.0;
        }
        if r.hit_y {
            next.velocity.y = 0.0;
            sub.y = 0.0;
        }
    }

    next.grounded = probe_down(&next.body, tunables.probe_depth, solids);
    if next.grounded && !p.grounded {
        events.push(AudioEvent::Land);
    }
    if next.grounded && next.velocity.x != 0.0 && next.velocity.y == 0.0 {
        events.push(AudioEvent::Footsteps);
    }

    let (anim, speed) = derive_anim(&next, &input);
    next.anim = anim;
    next.anim_speed = speed;
    (next, events)
}

/// Applies `amount` damage. Returns the new state and whether it killed.
pub fn take_damage(p: &PlayerState, amount: u32, tunables: &Tunables) -> (PlayerState, bool) {
    let mut next = *p;
    next.health = p.health.saturating_sub(amount).min(tunables.max_health);
    next.velocity = tunables.damage_kick;
    next.take_hit = true;
    if next.health == 0 {
        next.alive = false;
        next.killed = true;
        next.velocity = Vec2::ZERO;
        return (next, true);
    }
    (next, false)
}

/// Hazard cells touched now that were not touched last tick each deal one
/// point of damage.
pub fn hazard_contact_check(
    p: &PlayerState,
    level: &LevelDef,
    prev_contacts: &BTreeSet<Cell>,
) -> (u32, BTreeSet<Cell>) {
    let now = level.hazard_cells_overlapping(&p.body);
    let entered = now.difference(prev_contacts).count() as u32;
    (entered, now)
}
