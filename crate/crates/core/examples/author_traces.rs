//! Regenerates the shipped input traces by driving the engine with a few
//! macro moves (walk, hop, ride) and recording every frame.
//!
//! ```text
//! cargo run -p climbloop-core --example author_traces [out_dir]
//! ```

use std::path::{Path, PathBuf};

use climbloop_core::assets::{asset_dir, shipped_engine};
use climbloop_core::geometry::Cell;
use climbloop_core::level::TileKind;
use climbloop_core::replay::InputTrace;
use climbloop_core::{Engine, GameEvent, InputFrame, Scene, WorldState};

const STEP: f64 = 7.0 / 60.0;

struct Author<'a> {
    engine: &'a Engine,
    world: WorldState,
    frames: Vec<InputFrame>,
    log: Vec<(u64, GameEvent)>,
}

impl<'a> Author<'a> {
    fn new(engine: &'a Engine) -> Self {
        Self {
            engine,
            world: engine.world_init(1),
            frames: Vec::new(),
            log: Vec::new(),
        }
    }

    fn x(&self) -> f64 {
        self.world.player.body.center.x
    }

    fn feet(&self) -> f64 {
        self.world.player.body.min().y
    }

    fn push(&mut self, f: InputFrame) {
        self.engine.step(&mut self.world, &f);
        self.frames.push(f);
        for e in &self.world.events {
            self.log.push((e.tick, e.event.clone()));
        }
    }

    fn axis(move_x: f64) -> InputFrame {
        InputFrame { move_x, ..Default::default() }
    }

    /// Reads every conversation on screen to the end, one advance per
    /// fully revealed sentence.
    fn settle(&mut self) {
        while self.world.conversation.active {
            let advance = self.world.conversation.fully_revealed();
            self.push(InputFrame { advance_pressed: advance, ..Default::default() });
        }
    }

    fn idle(&mut self, ticks: u32) {
        for _ in 0..ticks {
            self.settle();
            self.push(InputFrame::default());
        }
        self.settle();
    }

    fn walk_to(&mut self, target: f64) {
        loop {
            self.settle();
            let gap = target - self.x();
            if gap.abs() < STEP {
                break;
            }
            let before = self.x();
            self.push(Self::axis(gap.signum()));
            if self.x() == before && !self.world.conversation.active {
                panic!("walk to {target} blocked at {before}");
            }
        }
        self.settle();
    }

    fn wait_grounded(&mut self) {
        let mut n = 0;
        while !self.world.player.grounded {
            self.settle();
            self.push(InputFrame::default());
            n += 1;
            assert!(n < 300, "never landed");
        }
        self.settle();
    }

    /// Terrain run under the player's feet, as `[lo, hi)` in world x.
    fn ledge(&self) -> (f64, f64) {
        let level = self.engine.level();
        let y = (self.feet() - 0.5).floor() as i64;
        let solid = |x: i64| level.tile(Cell::new(x, y)) == Some(TileKind::Terrain);
        let mut lo = self.x().floor() as i64;
        let mut hi = lo;
        while solid(lo - 1) && lo > 1 {
            lo -= 1;
        }
        while solid(hi + 1) && (hi as usize) < level.width - 2 {
            hi += 1;
        }
        (lo as f64, hi as f64 + 1.0)
    }

    /// Walks to the ledge edge facing `dir`, jumps, holds `dir` until the
    /// center passes `release`, then waits for the landing. Returns the
    /// height gained.
    fn hop(&mut self, dir: f64, release: f64) -> f64 {
        self.wait_grounded();
        let (lo, hi) = self.ledge();
        self.walk_to(if dir > 0.0 { hi - 0.05 } else { lo + 0.05 });
        self.jump(dir, release)
    }

    fn jump(&mut self, dir: f64, release: f64) -> f64 {
        let start = self.feet();
        let before = self.log.len();
        self.push(InputFrame { move_x: dir, jump_pressed: true, ..Default::default() });
        assert!(
            self.log[before..].iter().any(|(_, e)| *e == GameEvent::Jump),
            "jump not taken at x={}",
            self.x()
        );
        let mut airborne = 0;
        loop {
            self.settle();
            let move_x = if (self.x() - release) * dir >= 0.0 { 0.0 } else { dir };
            self.push(Self::axis(move_x));
            airborne += 1;
            if self.world.player.grounded && airborne > 2 {
                break;
            }
            assert!(airborne < 300, "hop never landed");
        }
        self.settle();
        self.feet() - start
    }

    fn expect_rise(&self, gained: f64, rows: f64, what: &str) {
        assert!(
            (gained - rows).abs() < 0.2,
            "{what}: expected +{rows}, got {gained:+.3} at ({:.2}, {:.2})",
            self.x(),
            self.feet()
        );
    }

    fn lift(&self) -> (f64, usize) {
        let p = self
            .world
            .platforms
            .iter()
            .find(|p| self.engine.level().platforms[p.def].id == "lift")
            .expect("level has a lift");
        (p.position.y, p.waypoint_index)
    }
}

fn playthrough(engine: &Engine) -> Vec<InputFrame> {
    let mut a = Author::new(engine);
    a.idle(1);
    a.walk_to(4.5);
    let g = a.jump(1.0, 9.5);
    a.expect_rise(g, 2.0, "ground to first bridge");

    for section in 0..9 {
        let left = section % 2 == 0;
        let (out, inner, out_dir) = if left { (2.5, 9.5, -1.0) } else { (21.5, 14.5, 1.0) };
        let g = a.hop(out_dir, out);
        a.expect_rise(g, 2.0, "bridge to outer");
        let g = a.hop(-out_dir, inner);
        a.expect_rise(g, 2.0, "outer to inner");
        let g = a.hop(out_dir, out);
        a.expect_rise(g, 2.0, "inner to outer");
        let g = a.hop(-out_dir, inner);
        a.expect_rise(g, 2.0, "outer to bridge");
    }

    // top bridge: board the lift on its way down, ride it up
    a.walk_to(9.5);
    loop {
        let (y, heading) = a.lift();
        if heading == 0 && y < 75.75 {
            break;
        }
        a.idle(1);
    }
    a.jump(1.0, 12.5);
    assert!(a.world.platforms.iter().any(|p| p.carrying_player) || a.world.player.grounded);
    loop {
        let (y, heading) = a.lift();
        if heading == 0 || y > 80.7 {
            break;
        }
        a.idle(1);
    }
    a.jump(1.0, 19.0);
    let mut n = 0;
    while a.world.scene != Scene::Credits {
        a.idle(1);
        n += 1;
        assert!(n < 1000, "credits never came");
    }
    let timer_start = a.log.iter().find(|(_, e)| *e == GameEvent::TimerStart).map(|(t, _)| *t);
    let end = a.log.iter().find(|(_, e)| *e == GameEvent::Trigger("end_right".into())).map(|(t, _)| *t);
    eprintln!(
        "playthrough: {} frames, timer started at sim {:?}, end at sim {:?}",
        a.frames.len(),
        timer_start,
        end
    );
    assert!(!a.log.iter().any(|(_, e)| matches!(e, GameEvent::Restart(_) | GameEvent::Damage)));
    a.frames
}

fn idle_timer(engine: &Engine) -> Vec<InputFrame> {
    let mut a = Author::new(engine);
    a.idle(1);
    a.walk_to(4.5);
    a.walk_to(6.6);
    assert!(a.world.timer.running, "timer trigger missed");
    while !a.log.iter().any(|(_, e)| matches!(e, GameEvent::Restart(_))) {
        a.push(InputFrame::default());
    }
    a.idle(30);
    a.frames
}

fn spike_death(engine: &Engine) -> Vec<InputFrame> {
    let mut a = Author::new(engine);
    a.idle(1);
    a.walk_to(4.5);
    let g = a.jump(1.0, 9.5);
    a.expect_rise(g, 2.0, "ground to first bridge");
    // off the far end of the bridge and down to the spiked ground
    a.walk_to(15.9);
    let mut dir = 1.0;
    let mut n = 0;
    while !a.log.iter().any(|(_, e)| *e == GameEvent::Death) {
        let hits = a.log.iter().filter(|(_, e)| *e == GameEvent::Damage).count();
        while a.log.iter().filter(|(_, e)| *e == GameEvent::Damage).count() == hits {
            a.push(Author::axis(dir));
            n += 1;
            assert!(n < 2000, "spikes never reached");
        }
        if a.log.iter().any(|(_, e)| *e == GameEvent::Death) {
            break;
        }
        a.wait_grounded();
        dir = if a.x() > 19.0 { -1.0 } else { 1.0 };
    }
    a.idle(30);
    a.frames
}

fn write(dir: &Path, name: &str, header: &str, frames: &[InputFrame]) {
    let text = format!("{header}{}", InputTrace::from_frames(frames).to_text());
    std::fs::write(dir.join(name), text).expect("write trace");
    eprintln!("wrote {name}");
}

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(asset_dir()).join("traces"));
    let engine = shipped_engine();
    write(
        &dir,
        "playthrough.trace",
        "# First attempt, start to credits, reading every line.\n",
        &playthrough(&engine),
    );
    write(
        &dir,
        "spike_death.trace",
        "# Drop onto the spiked ground and run across the spikes until out of health.\n",
        &spike_death(&engine),
    );
    write(
        &dir,
        "idle_timer.trace",
        "# Walk into the timer trigger, then stand still until the clock runs out.\n",
        &idle_timer(&engine),
    );
}
