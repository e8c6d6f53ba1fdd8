//! State that outlives a single attempt, plus the level timer.

use serde::Serialize;

/// Remaining time at or below this counts as zero, so a whole number of
/// ticks drains a whole number of seconds despite `1/60` being inexact.
pub const TIMER_EPSILON: f64 = 1e-9;

/// Seconds between the end trigger and the credits scene.
pub const CREDITS_DELAY_SECONDS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scene {
    MainMenu,
    Game,
    Credits,
}

impl Scene {
    /// Forward-only scene graph: menu into game, game into itself on
    /// restart, game into credits.
    pub fn can_transition(self, to: Scene) -> bool {
        matches!(
            (self, to),
            (Scene::MainMenu, Scene::Game) | (Scene::Game, Scene::Game) | (Scene::Game, Scene::Credits)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameSession {
    pub current_attempt: u32,
    /// Set while a conversation or the user has paused the game.
    pub is_paused: bool,
}

impl Default for GameSession {
    fn default() -> Self {
        Self {
            current_attempt: 1,
            is_paused: false,
        }
    }
}

impl GameSession {
    pub fn next_attempt(self) -> GameSession {
        GameSession {
            current_attempt: self.current_attempt + 1,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimerState {
    pub running: bool,
    pub remaining: f64,
    pub duration: f64,
}

impl TimerState {
    pub fn new(duration: f64) -> Self {
        Self {
            running: false,
            remaining: duration,
            duration,
        }
    }

    pub fn fraction(&self) -> f64 {
        self.remaining / self.duration
    }

    /// Stops the timer and refills it.
    pub fn reset(&mut self) {
        self.running = false;
        self.remaining = self.duration;
    }
}

/// Counts a running timer down by `dt`. `expired` is true only on the tick
/// the timer hits zero.
pub fn timer_tick(t: &TimerState, dt: f64) -> (TimerState, bool) {
    if !t.running || t.remaining <= 0.0 {
        return (*t, false);
    }
    let next = t.remaining - dt;
    let remaining = if next <= TIMER_EPSILON { 0.0 } else { next };
    (TimerState { remaining, ..*t }, remaining == 0.0)
}
