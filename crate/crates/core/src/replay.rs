//! Input traces and the headless runner.
//!
//! Trace grammar, one entry per line:
//!
//! ```text
//! # comment
//! <tick> <move_x> <move_y> <jump> <adv> <pause>
//! end <run_length>
//! ```
//!
//! Axes are held from their change-point until the next one. The three
//! button fields are edges: they fire on the change-point tick only.

use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::{state_hash, Engine, LoggedEvent, WorldState};
use crate::player::InputFrame;
use crate::session::Scene;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InputTrace {
    pub changes: Vec<(u64, InputFrame)>,
    pub run_length: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: tick {tick} does not follow tick {previous}")]
    NonMonotonic { line: usize, tick: u64, previous: u64 },
    #[error("missing `end <tick>` line")]
    MissingEnd,
    #[error("end tick {end} is before change-point {last}")]
    EndBeforeLast { end: u64, last: u64 },
}

fn malformed(line: usize, message: impl Into<String>) -> TraceError {
    TraceError::Malformed {
        line,
        message: message.into(),
    }
}

fn parse_flag(line: usize, tok: &str) -> Result<bool, TraceError> {
    match tok {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(malformed(line, format!("expected 0 or 1, found `{tok}`"))),
    }
}

fn parse_axis(line: usize, tok: &str) -> Result<f64, TraceError> {
    match tok.parse::<f64>() {
        Ok(v) if (-1.0..=1.0).contains(&v) => Ok(v),
        _ => Err(malformed(line, format!("axis value `{tok}` outside [-1, 1]"))),
    }
}

pub fn parse_trace(text: &str) -> Result<InputTrace, TraceError> {
    let mut changes: Vec<(u64, InputFrame)> = Vec::new();
    let mut end = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if end.is_some() {
            return Err(malformed(line, "content after `end`"));
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks[0] == "end" {
            if toks.len() != 2 {
                return Err(malformed(line, "expected `end <tick>`"));
            }
            let n = toks[1]
                .parse::<u64>()
                .map_err(|_| malformed(line, format!("bad tick `{}`", toks[1])))?;
            end = Some(n);
            continue;
        }
        if toks.len() != 6 {
            return Err(malformed(line, format!("expected 6 fields, found {}", toks.len())));
        }
        let tick = toks[0]
            .parse::<u64>()
            .map_err(|_| malformed(line, format!("bad tick `{}`", toks[0])))?;
        if let Some(&(previous, _)) = changes.last() {
            if tick <= previous {
                return Err(TraceError::NonMonotonic { line, tick, previous });
            }
        }
        let frame = InputFrame {
            move_x: parse_axis(line, toks[1])?,
            move_y: parse_axis(line, toks[2])?,
            jump_pressed: parse_flag(line, toks[3])?,
            advance_pressed: parse_flag(line, toks[4])?,
            pause_pressed: parse_flag(line, toks[5])?,
        };
        changes.push((tick, frame));
    }
    let run_length = end.ok_or(TraceError::MissingEnd)?;
    if let Some(&(last, _)) = changes.last() {
        if run_length < last {
            return Err(TraceError::EndBeforeLast { end: run_length, last });
        }
    }
    Ok(InputTrace { changes, run_length })
}

impl InputTrace {
    /// Expands the change-points into one frame per tick.
    pub fn frames(&self) -> impl Iterator<Item = InputFrame> + '_ {
        let mut next = 0;
        let mut held = InputFrame::default();
        (0..self.run_length).map(move |tick| {
            if let Some(&(t, frame)) = self.changes.get(next) {
                if t == tick {
                    next += 1;
                    held = frame.held();
                    return frame;
                }
            }
            held
        })
    }

    /// Compresses per-tick frames back into change-points.
    pub fn from_frames(frames: &[InputFrame]) -> InputTrace {
        let mut changes = Vec::new();
        let mut held = InputFrame::default();
        for (tick, f) in frames.iter().enumerate() {
            let pulses = f.jump_pressed || f.advance_pressed || f.pause_pressed;
            if pulses || f.held() != held || (tick == 0 && *f != InputFrame::default()) {
                changes.push((tick as u64, *f));
            }
            held = f.held();
        }
        InputTrace {
            changes,
            run_length: frames.len() as u64,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (tick, f) in &self.changes {
            let _ = writeln!(
                out,
                "{tick} {} {} {} {} {}",
                f.move_x,
                f.move_y,
                u8::from(f.jump_pressed),
                u8::from(f.advance_pressed),
                u8::from(f.pause_pressed)
            );
        }
        let _ = writeln!(out, "end {}", self.run_length);
        out
    }
}

/// Golden hash file: `<tick> <16 hex digits>` per line.
pub fn parse_golden(text: &str) -> Result<Vec<(u64, u64)>, TraceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let bad = || malformed(i + 1, "expected `<tick> <16 hex digits>`");
        let (tick, digest) = content.split_once(' ').ok_or_else(bad)?;
        let digest = digest.trim();
        if digest.len() != 16 {
            return Err(bad());
        }
        out.push((
            tick.parse().map_err(|_| bad())?,
            u64::from_str_radix(digest, 16).map_err(|_| bad())?,
        ));
    }
    Ok(out)
}

pub fn format_hash_line(tick: u64, digest: u64) -> String {
    format!("{tick} {digest:016x}")
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Record a hash every N ticks (tick 0 included) plus the final one.
    pub hash_every: Option<u64>,
    /// Golden `(tick, digest)` pairs to check along the way.
    pub expect: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub tick: u64,
    pub expected: u64,
    pub actual: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub events: Vec<LoggedEvent>,
    pub hashes: Vec<(u64, u64)>,
    /// Number of steps executed.
    pub ticks: u64,
    pub final_hash: u64,
    pub reached_credits: bool,
    pub mismatches: Vec<Mismatch>,
    pub world: WorldState,
}

impl RunReport {
    pub fn event_log(&self) -> String {
        self.events.iter().map(|e| format!("{e}\n")).collect()
    }
}

/// Replays `trace` from a fresh first attempt. Stops after the trace's run
/// length or on reaching the credits.
pub fn run(engine: &Engine, trace: &InputTrace, options: &RunOptions) -> RunReport {
    let mut world = engine.world_init(1);
    run_from(engine, &mut world, trace, options)
}

pub fn run_from(
    engine: &Engine,
    world: &mut WorldState,
    trace: &InputTrace,
    options: &RunOptions,
) -> RunReport {
    let mut events = Vec::new();
    let mut hashes = Vec::new();
    let mut mismatches = Vec::new();
    let mut expect = options.expect.iter().peekable();

    let mut observe = |tick: u64, world: &WorldState, hashes: &mut Vec<(u64, u64)>| {
        let wanted_every = options.hash_every.is_some_and(|n| n > 0 && tick.is_multiple_of(n));
        let wanted_golden = expect.peek().is_some_and(|(t, _)| *t == tick);
        if wanted_every || wanted_golden {
            let h = state_hash(world);
            if wanted_every {
                hashes.push((tick, h));
            }
            while let Some(&&(t, expected)) = expect.peek() {
                if t != tick {
                    break;
                }
                if expected != h {
                    mismatches.push(Mismatch { tick, expected, actual: Some(h) });
                }
                expect.next();
            }
        }
        // golden entries for ticks we skipped past never match
        while let Some(&&(t, expected)) = expect.peek() {
            if t >= tick {
                break;
            }
            mismatches.push(Mismatch { tick: t, expected, actual: None });
            expect.next();
        }
    };

    let mut tick = 0;
    observe(0, world, &mut hashes);
    for frame in trace.frames() {
        engine.step(world, &frame);
        tick += 1;
        events.extend(world.events.iter().cloned());
        observe(tick, world, &mut hashes);
        if world.scene == Scene::Credits {
            break;
        }
    }
    let final_hash = state_hash(world);
    if options.hash_every.is_some() && hashes.last().map(|&(t, _)| t) != Some(tick) {
        hashes.push((tick, final_hash));
    }
    for &(t, expected) in expect {
        mismatches.push(Mismatch { tick: t, expected, actual: None });
    }
    RunReport {
        events,
        hashes,
        ticks: tick,
        final_hash,
        reached_credits: world.scene == Scene::Credits,
        mismatches,
        world: world.clone(),
    }
}
