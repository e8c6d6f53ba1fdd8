//! Fixed-timestep orchestration of one game world.
//!
//! Two clocks run side by side. The ui clock advances on every [`Engine::step`]
//! call; the sim clock only advances when no conversation is showing and the
//! user has not paused. Movement, the level timer and the credits delay all
//! run on the sim clock, the typewriter on the ui clock.
//!
//! Per-tick order inside [`Engine::step`]:
//!
//! 1. ui tick
//! 2. conversation: typewriter, advance; ends the tick while one is showing
//! 3. user pause toggle; ends the tick while paused
//! 4. sim tick and level timer
//! 5. moving platforms, carrying a player who stands on them
//! 6. player movement
//! 7. hazard damage
//! 8. trigger scan
//! 9. camera follow
//! 10. credits or restart
//!
//! Timer expiry restarts in the same tick. A death restarts on the next sim
//! tick, so the killed flag is visible in one snapshot first.

mod hash;
mod snapshot;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use hash::{canonical_bytes, fnv1a64, level_state_bytes, sim_state_hash, state_hash, Canonical};
pub use snapshot::{CameraView, DialogueView, PlatformView, PlayerView, Snapshot};

use crate::geometry::{
    aabb_overlap, distance, move_towards, probe_down_box, slide_move, Aabb, Cell, CellsOnly, Vec2,
    WithBoxes,
};
use crate::level::{LevelDef, LevelError, TriggerKind};
use crate::narrative::{group_enabled, ConversationState, DialogueScript};
use crate::player::{
    hazard_contact_check, player_step, take_damage, AudioEvent, InputFrame, PlayerState, Tunables,
};
use crate::session::{timer_tick, GameSession, Scene, TimerState, CREDITS_DELAY_SECONDS};

/// Distance at which a platform counts as having reached its waypoint.
pub const WAYPOINT_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameEvent {
    Jump,
    Land,
    Damage,
    Death,
    Trigger(String),
    TimerStart,
    TimerStop,
    TimerExpire,
    Restart(u32),
    DialogueStart(String),
    DialogueEnd(String),
    Credits,
}

impl fmt::Display for GameEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameEvent::Jump => f.write_str("JUMP"),
            GameEvent::Land => f.write_str("LAND"),
            GameEvent::Damage => f.write_str("DAMAGE"),
            GameEvent::Death => f.write_str("DEATH"),
            GameEvent::Trigger(id) => write!(f, "TRIGGER {id}"),
            GameEvent::TimerStart => f.write_str("TIMER_START"),
            GameEvent::TimerStop => f.write_str("TIMER_STOP"),
            GameEvent::TimerExpire => f.write_str("TIMER_EXPIRE"),
            GameEvent::Restart(a) => write!(f, "RESTART {a}"),
            GameEvent::DialogueStart(id) => write!(f, "DIALOGUE_START {id}"),
            GameEvent::DialogueEnd(id) => write!(f, "DIALOGUE_END {id}"),
            GameEvent::Credits => f.write_str("CREDITS"),
        }
    }
}

/// An event stamped with the sim tick it happened on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoggedEvent {
    pub tick: u64,
    pub event: GameEvent,
}

impl fmt::Display for LoggedEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.tick, self.event)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformState {
    /// Index into the level's platform list.
    pub def: usize,
    pub position: Vec2,
    pub waypoint_index: usize,
    pub carrying_player: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriggerState {
    pub active: bool,
    pub fired: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub position: Vec2,
    pub frozen: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub scene: Scene,
    pub session: GameSession,
    pub sim_tick: u64,
    pub ui_tick: u64,
    pub player: PlayerState,
    pub platforms: Vec<PlatformState>,
    pub triggers: Vec<TriggerState>,
    pub conversation: ConversationState,
    /// Dialogue id of the conversation on screen.
    pub conversation_id: Option<String>,
    pub timer: TimerState,
    pub camera: Camera,
    pub hazard_contacts: BTreeSet<Cell>,
    pub pending_credits_at: Option<u64>,
    /// Everything below is cleared at the start of each step.
    pub audio_events: Vec<AudioEvent>,
    pub events: Vec<LoggedEvent>,
    /// The player died this tick.
    pub death_pulse: bool,
}

impl WorldState {
    pub fn sim_frozen(&self) -> bool {
        self.conversation.active || self.session.is_paused
    }

    fn log(&mut self, event: GameEvent) {
        self.events.push(LoggedEvent {
            tick: self.sim_tick,
            event,
        });
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error(transparent)]
    Tunables(#[from] crate::player::TunablesError),
}

/// Immutable rules of play: level, dialogue content and tunables.
#[derive(Debug, Clone)]
pub struct Engine {
    level: LevelDef,
    script: DialogueScript,
    tunables: Tunables,
}

impl Engine {
    pub fn new(level: LevelDef, script: DialogueScript, tunables: Tunables) -> Result<Self, EngineError> {
        level.check_dialogues(&script)?;
        tunables.validate()?;
        Ok(Self {
            level,
            script,
            tunables,
        })
    }

    pub fn level(&self) -> &LevelDef {
        &self.level
    }

    pub fn script(&self) -> &DialogueScript {
        &self.script
    }

    pub fn tunables(&self) -> &Tunables {
        &self.tunables
    }

    pub fn dt(&self) -> f64 {
        self.tunables.dt()
    }

    pub fn credits_delay_ticks(&self) -> u64 {
        u64::from(CREDITS_DELAY_SECONDS) * u64::from(self.tunables.tick_rate)
    }

    /// A fresh world for `attempt`: player on the spawn, platforms on their
    /// first waypoint, only this attempt's triggers (plus `always`) armed.
    pub fn world_init(&self, attempt: u32) -> WorldState {
        let player = PlayerState::spawn_at(self.level.spawn, &self.tunables, &self.level);
        let platforms = self
            .level
            .platforms
            .iter()
            .enumerate()
            .map(|(def, p)| PlatformState {
                def,
                position: p.waypoints[0],
                waypoint_index: 0,
                carrying_player: false,
            })
            .collect();
        let triggers = self
            .level
            .triggers
            .iter()
            .map(|t| TriggerState {
                active: group_enabled(t.group, attempt),
                fired: false,
            })
            .collect();
        WorldState {
            scene: Scene::Game,
            session: GameSession {
                current_attempt: attempt,
                is_paused: false,
            },
            sim_tick: 0,
            ui_tick: 0,
            camera: Camera {
                position: self.level.spawn,
                frozen: false,
            },
            player,
            platforms,
            triggers,
            conversation: ConversationState::default(),
            conversation_id: None,
            timer: TimerState::new(self.level.timer_seconds),
            hazard_contacts: BTreeSet::new(),
            pending_credits_at: None,
            audio_events: Vec::new(),
            events: Vec::new(),
            death_pulse: false,
        }
    }

    /// World parked on the main menu; a jump or advance press starts play.
    pub fn world_at_menu(&self) -> WorldState {
        WorldState {
            scene: Scene::MainMenu,
            ..self.world_init(1)
        }
    }

    pub fn platform_box(&self, p: &PlatformState) -> Aabb {
        Aabb::new(p.position, self.level.platforms[p.def].half_extents)
    }

    fn platform_boxes(&self, world: &WorldState) -> Vec<Aabb> {
        world.platforms.iter().map(|p| self.platform_box(p)).collect()
    }

    /// Advances the world by one frame of `input`.
    pub fn step(&self, world: &mut WorldState, input: &InputFrame) {
        world.audio_events.clear();
        world.events.clear();
        world.death_pulse = false;
        world.player.take_hit = false;

        world.ui_tick += 1;
        let input = input.clamped();

        match world.scene {
            Scene::Game => {}
            Scene::MainMenu => {
                if input.jump_pressed || input.advance_pressed {
                    world.scene = Scene::Game;
                }
                return;
            }
            Scene::Credits => return,
        }

        if world.conversation.active {
            world.conversation.typewriter_tick();
            if input.advance_pressed && world.conversation.advance() == Ok(true) {
                let id = world.conversation_id.take().unwrap_or_default();
                world.session.is_paused = false;
                world.log(GameEvent::DialogueEnd(id));
            }
            self.follow_camera(world);
            return;
        }

        if input.pause_pressed {
            world.session.is_paused = !world.session.is_paused;
        }
        if world.session.is_paused {
            self.follow_camera(world);
            return;
        }

        let dt = self.dt();
        let mut restart = false;

        world.sim_tick += 1;
        let (timer, expired) = timer_tick(&world.timer, dt);
        world.timer = timer;
        if expired {
            world.log(GameEvent::TimerExpire);
            restart = true;
        }

        // a player killed last tick is restarted now
        if !world.player.alive {
            self.follow_camera(world);
            self.restart_level(world);
            return;
        }

        self.move_platforms(world, dt);

        let boxes = self.platform_boxes(world);
        let solids = WithBoxes {
            cells: &self.level,
            boxes: &boxes,
        };
        let (player, audio) = player_step(&world.player, &input, &solids, &self.tunables, false, dt);
        world.player = player;
        for a in &audio {
            match a {
                AudioEvent::Jump => world.log(GameEvent::Jump),
                AudioEvent::Land => world.log(GameEvent::Land),
                _ => {}
            }
        }
        world.audio_events.extend(audio);

        if world.player.alive {
            let (hits, contacts) =
                hazard_contact_check(&world.player, &self.level, &world.hazard_contacts);
            world.hazard_contacts = contacts;
            for _ in 0..hits {
                let (p, died) = take_damage(&world.player, 1, &self.tunables);
                world.player = p;
                world.log(GameEvent::Damage);
                world.audio_events.push(AudioEvent::Hit);
                if died {
                    self.kill(world);
                    break;
                }
            }
        }
        // fell out through the open bottom of the level
        if world.player.alive && world.player.body.max().y < 0.0 {
            world.player.alive = false;
            world.player.killed = true;
            world.player.velocity = Vec2::ZERO;
            self.kill(world);
        }

        if world.player.alive {
            self.scan_triggers(world);
        }

        self.follow_camera(world);

        if world.pending_credits_at.is_some_and(|at| world.sim_tick >= at) {
            world.pending_credits_at = None;
            world.scene = Scene::Credits;
            world.log(GameEvent::Credits);
        } else if restart {
            self.restart_level(world);
        }
    }

    fn kill(&self, world: &mut WorldState) {
        world.death_pulse = true;
        world.audio_events.push(AudioEvent::Death);
        world.log(GameEvent::Death);
    }

    fn move_platforms(&self, world: &mut WorldState, dt: f64) {
        let mut carry = None;
        for (i, ps) in world.platforms.iter_mut().enumerate() {
            let def = &self.level.platforms[ps.def];
            let before = Aabb::new(ps.position, def.half_extents);
            let standing = world.player.alive
                && probe_down_box(&world.player.body, self.tunables.probe_depth, &before);

            if distance(def.waypoints[ps.waypoint_index], ps.position) < WAYPOINT_RADIUS {
                ps.waypoint_index = (ps.waypoint_index + 1) % def.waypoints.len();
            }
            let start = ps.position;
            ps.position = move_towards(start, def.waypoints[ps.waypoint_index], def.speed * dt);
            ps.carrying_player = standing && carry.is_none();
            if ps.carrying_player {
                carry = Some((i, ps.position - start));
            }
        }
        if let Some((_, delta)) = carry {
            let r = slide_move(&world.player.body, delta, &CellsOnly(&self.level));
            world.player.body.center = r.center;
        }
    }

    fn scan_triggers(&self, world: &mut WorldState) {
        let hit = self.level.triggers.iter().enumerate().find(|(i, t)| {
            let s = world.triggers[*i];
            s.active && !s.fired && aabb_overlap(&t.region, &world.player.body)
        });
        let Some((i, def)) = hit else { return };

        world.triggers[i] = TriggerState {
            active: false,
            fired: true,
        };
        world.log(GameEvent::Trigger(def.id.clone()));
        if let Some(content) = self.script.get(&def.dialogue_id) {
            world.conversation = ConversationState::start(content);
            world.conversation_id = Some(def.dialogue_id.clone());
            world.session.is_paused = true;
            world.log(GameEvent::DialogueStart(def.dialogue_id.clone()));
        }
        match def.kind {
            TriggerKind::Dialogue => {}
            TriggerKind::DialogueTimerStart => {
                world.timer.running = true;
                world.log(GameEvent::TimerStart);
            }
            TriggerKind::DialogueTimerStop => {
                world.timer.running = false;
                world.log(GameEvent::TimerStop);
            }
            TriggerKind::EndGame => {
                world.timer.reset();
                world.log(GameEvent::TimerStop);
                self.schedule_credits(world);
            }
        }
    }

    /// Freezes the camera and queues the credits scene two seconds of sim
    /// time ahead. The sim clock is frozen while the closing conversation is
    /// on screen, so the wait starts once it is dismissed.
    pub fn schedule_credits(&self, world: &mut WorldState) {
        world.camera.frozen = true;
        world.pending_credits_at = Some(world.sim_tick + self.credits_delay_ticks());
    }

    fn follow_camera(&self, world: &mut WorldState) {
        if !world.camera.frozen {
            world.camera.position = world.player.position();
        }
    }

    /// Starts the next attempt: the level is rebuilt from its definition
    /// while the clocks and this tick's events carry over.
    pub fn restart_level(&self, world: &mut WorldState) {
        let attempt = world.session.next_attempt().current_attempt;
        let mut fresh = self.world_init(attempt);
        fresh.sim_tick = world.sim_tick;
        fresh.ui_tick = world.ui_tick;
        fresh.events = std::mem::take(&mut world.events);
        fresh.audio_events = std::mem::take(&mut world.audio_events);
        fresh.death_pulse = world.death_pulse;
        *world = fresh;
        world.log(GameEvent::Restart(attempt));
    }

    pub fn snapshot(&self, world: &WorldState) -> Snapshot {
        snapshot::project(self, world)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::parse_level;
    use crate::narrative::load_script;

    const SCRIPT: &str = "\
conversation hello
speaker Player Character
> Hi
> There

conversation fin
speaker Entity
> Bye
";

    fn engine(level: &str) -> Engine {
        Engine::new(parse_level(level).unwrap(), load_script(SCRIPT).unwrap(), Tunables::default()).unwrap()
    }

    fn idle() -> InputFrame {
        InputFrame::default()
    }

    fn advance() -> InputFrame {
        InputFrame { advance_pressed: true, ..Default::default() }
    }

    #[test]
    fn platform_waypoint_check_then_move() {
        let e = engine("..........\n..........\n.S........\n##########\n---\nplatform p 1 0.25 2 (8,0) (8,4)\n");
        let mut w = e.world_init(1);
        w.platforms[0].position = Vec2::new(8.0, 3.95);
        w.platforms[0].waypoint_index = 1;
        e.step(&mut w, &idle());
        assert_eq!(w.platforms[0].waypoint_index, 0);
        let expected = 3.95 - 2.0 / 60.0;
        assert!((w.platforms[0].position.y - expected).abs() < 1e-12);
        assert!((w.platforms[0].position.y - 3.9166666666666665).abs() < 1e-12);
        assert_eq!(w.platforms[0].position.x, 8.0);
    }

    #[test]
    fn lift_carries_standing_player() {
        let level = "\
.........
.........
.........
.........
.........
.........
....S....
.........
---
platform lift 1.5 0.25 2 (4.5,0.75) (4.5,6)
";
        let e = engine(level);
        let mut w = e.world_init(1);
        // park the player on top of the lift
        w.player.body.center = Vec2::new(4.5, 1.0 + 0.75);
        w.player.grounded = true;
        let mut free = w.clone();
        free.platforms.clear();
        let e_free = engine(&level.replace("platform lift 1.5 0.25 2 (4.5,0.75) (4.5,6)\n", ""));

        e.step(&mut w, &idle());
        e_free.step(&mut free, &idle());
        assert!(w.platforms[0].carrying_player);
        let lift_dy = w.platforms[0].position.y - 0.75;
        assert!((lift_dy - 2.0 / 60.0).abs() < 1e-12);
        // with the carry the player ends on the lift, without it gravity wins
        assert!((w.player.body.min().y - w.platforms[0].position.y - 0.25).abs() < 1e-9);
        assert!(free.player.body.center.y < 1.75);
        assert!(w.player.body.center.y > free.player.body.center.y + 2.0 / 60.0 - 1e-9);
        assert!(w.player.grounded);
    }

    #[test]
    fn trigger_fires_once_and_freezes_sim() {
        let e = engine(".....\n.S...\n#####\n---\ntrigger t dialogue 1 hello rect 1.5 1.5 0.5 0.5\n");
        let mut w = e.world_init(1);
        e.step(&mut w, &idle());
        assert!(w.conversation.active);
        assert!(!w.triggers[0].active && w.triggers[0].fired);
        assert_eq!(w.sim_tick, 1);
        assert_eq!(
            w.events.iter().map(|e| e.event.to_string()).collect::<Vec<_>>(),
            ["TRIGGER t", "DIALOGUE_START hello"]
        );
        e.step(&mut w, &idle());
        assert_eq!((w.sim_tick, w.ui_tick), (1, 2));
        assert_eq!(w.conversation.revealed, 1);
        e.step(&mut w, &advance());
        e.step(&mut w, &advance());
        assert!(!w.conversation.active);
        assert_eq!(w.events[0].event, GameEvent::DialogueEnd("hello".into()));
        assert_eq!(w.sim_tick, 1);
        e.step(&mut w, &idle());
        assert_eq!(w.sim_tick, 2);
        assert!(!w.conversation.active, "one-shot");
    }

    #[test]
    fn gating_by_attempt() {
        let mut directives = String::new();
        for g in 1..=6 {
            directives.push_str(&format!("trigger g{g} dialogue {g} hello rect 3 3 0.5 0.5\n"));
        }
        directives.push_str("trigger end end_game always fin rect 3 3 0.5 0.5\n");
        let e = engine(&format!("......\n......\n......\n.S....\n######\n---\n{directives}"));
        for attempt in 1..=8u32 {
            let w = e.world_init(attempt);
            let active: Vec<_> = e
                .level()
                .triggers
                .iter()
                .zip(&w.triggers)
                .filter(|(_, s)| s.active)
                .map(|(t, _)| t.id.as_str())
                .collect();
            let mut expected = Vec::new();
            let numbered = format!("g{attempt}");
            if attempt <= 6 {
                expected.push(numbered.as_str());
            }
            expected.push("end");
            assert_eq!(active, expected, "attempt {attempt}");
        }
    }

    #[test]
    fn user_pause_toggles() {
        let e = engine(".....\n.S...\n#####\n---\n");
        let mut w = e.world_init(1);
        let pause = InputFrame { pause_pressed: true, ..Default::default() };
        e.step(&mut w, &pause);
        assert!(w.session.is_paused);
        let frozen = w.clone();
        e.step(&mut w, &InputFrame { move_x: 1.0, ..Default::default() });
        assert_eq!(w.player, frozen.player);
        assert_eq!(w.sim_tick, frozen.sim_tick);
        e.step(&mut w, &pause);
        assert!(!w.session.is_paused);
        assert_eq!(w.sim_tick, frozen.sim_tick + 1);
    }

    #[test]
    fn end_trigger_schedules_credits() {
        let e = engine(".....\n.S...\n#####\n---\ntrigger e end_game always fin rect 1.5 1.5 0.5 0.5\n");
        let mut w = e.world_init(1);
        w.timer.running = true;
        w.timer.remaining = 12.0;
        e.step(&mut w, &idle());
        assert!(w.camera.frozen);
        assert!(!w.timer.running);
        assert_eq!(w.timer.remaining, w.timer.duration);
        let fired_at = w.sim_tick;
        assert_eq!(w.pending_credits_at, Some(fired_at + 120));
        for _ in 0..30 {
            e.step(&mut w, &idle());
        }
        e.step(&mut w, &advance());
        assert_eq!(w.sim_tick, fired_at);
        let mut credits_at = None;
        for _ in 0..200 {
            e.step(&mut w, &idle());
            if w.scene == Scene::Credits {
                credits_at = Some(w.sim_tick);
                break;
            }
        }
        assert_eq!(credits_at, Some(fired_at + 120));
        let done = w.clone();
        e.step(&mut w, &InputFrame { move_x: 1.0, ..Default::default() });
        assert_eq!(w.player, done.player);
        assert_eq!(w.scene, Scene::Credits);
    }

    #[test]
    fn restart_rebuilds_the_level() {
        let e = engine("..........\n..........\n.S........\n##########\n---\nplatform p 1 0.25 2 (8,0) (8,4)\n");
        let mut w = e.world_init(1);
        for _ in 0..50 {
            e.step(&mut w, &InputFrame { move_x: 1.0, ..Default::default() });
        }
        assert_ne!(w.platforms[0].position, Vec2::new(8.0, 0.0));
        e.restart_level(&mut w);
        assert_eq!(w.session.current_attempt, 2);
        assert_eq!(w.platforms[0].position, Vec2::new(8.0, 0.0));
        assert_eq!(w.sim_tick, 50);
        let fresh = e.world_init(2);
        assert_eq!(hash::level_state_bytes(&w), hash::level_state_bytes(&fresh));
    }

    #[test]
    fn falling_out_of_the_level_restarts() {
        let e = engine(".....\n.S...\n#....\n---\n");
        let mut w = e.world_init(1);
        let mut log = Vec::new();
        for _ in 0..300 {
            e.step(&mut w, &InputFrame { move_x: 1.0, ..Default::default() });
            log.extend(w.events.iter().map(|e| e.event.clone()));
            if w.session.current_attempt == 2 {
                break;
            }
        }
        assert!(log.contains(&GameEvent::Death));
        assert_eq!(log.last(), Some(&GameEvent::Restart(2)));
    }
}
