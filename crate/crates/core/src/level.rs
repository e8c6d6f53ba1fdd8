//! Level description and its text format.
//!
//! A level file has two sections split by a `---` line. The first is the
//! tile grid, top row first:
//!
//! ```text
//! .  empty      #  terrain (solid)
//! ^  hazard     ,  decoration
//! S  spawn (an empty cell, exactly one)
//! ```
//!
//! The second holds directives, one per line (`#` starts a comment):
//!
//! ```text
//! platform <id> <hx> <hy> <speed> (<x>,<y>) (<x>,<y>) ...
//! trigger <id> <kind> <group|always> <dialogue_id> rect <cx> <cy> <hx> <hy>
//! timer <seconds>
//! ```
//!
//! Grid cell `(col, row)` has its center at `(col + 0.5, rows - row - 0.5)`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::geometry::{aabb_overlap, Aabb, Cell, Solids, Vec2};
use crate::narrative::DialogueScript;

pub const DEFAULT_PLATFORM_SPEED: f64 = 2.0;
pub const DEFAULT_TIMER_SECONDS: f64 = 60.0;
/// Attempt groups run 1..=MAX_GROUP.
pub const MAX_GROUP: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TileKind {
    Empty,
    Terrain,
    Hazard,
    Decoration,
}

impl TileKind {
    fn from_char(c: char) -> Option<TileKind> {
        match c {
            '.' | 'S' => Some(TileKind::Empty),
            '#' => Some(TileKind::Terrain),
            '^' => Some(TileKind::Hazard),
            ',' => Some(TileKind::Decoration),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            TileKind::Empty => '.',
            TileKind::Terrain => '#',
            TileKind::Hazard => '^',
            TileKind::Decoration => ',',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatformDef {
    pub id: String,
    pub half_extents: Vec2,
    pub speed: f64,
    pub waypoints: Vec<Vec2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriggerKind {
    Dialogue,
    DialogueTimerStart,
    DialogueTimerStop,
    EndGame,
}

impl TriggerKind {
    pub fn keyword(self) -> &'static str {
        match self {
            TriggerKind::Dialogue => "dialogue",
            TriggerKind::DialogueTimerStart => "timer_start",
            TriggerKind::DialogueTimerStop => "timer_stop",
            TriggerKind::EndGame => "end_game",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        [
            TriggerKind::Dialogue,
            TriggerKind::DialogueTimerStart,
            TriggerKind::DialogueTimerStop,
            TriggerKind::EndGame,
        ]
        .into_iter()
        .find(|k| k.keyword() == s)
    }
}

/// Which attempt a trigger belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriggerGroup {
    Attempt(u32),
    Always,
}

impl fmt::Display for TriggerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriggerGroup::Attempt(n) => write!(f, "{n}"),
            TriggerGroup::Always => f.write_str("always"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriggerDef {
    pub id: String,
    pub region: Aabb,
    pub kind: TriggerKind,
    pub group: TriggerGroup,
    pub dialogue_id: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelDef {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first, as written in the file.
    pub grid: Vec<TileKind>,
    /// Center of the spawn cell.
    pub spawn: Vec2,
    pub platforms: Vec<PlatformDef>,
    pub triggers: Vec<TriggerDef>,
    pub timer_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LevelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation failed: {rule}: {detail}")]
    Validation { rule: &'static str, detail: String },
}

impl LevelError {
    /// Short rule name for validation failures (`spawn-in-solid`, ...).
    pub fn rule(&self) -> Option<&'static str> {
        match self {
            LevelError::Validation { rule, .. } => Some(rule),
            LevelError::Syntax { .. } => None,
        }
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> LevelError {
    LevelError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn invalid(rule: &'static str, detail: impl Into<String>) -> LevelError {
    LevelError::Validation {
        rule,
        detail: detail.into(),
    }
}

impl LevelDef {
    /// Tile at world cell `cell`, or `None` outside the grid.
    pub fn tile(&self, cell: Cell) -> Option<TileKind> {
        if cell.x < 0 || cell.y < 0 {
            return None;
        }
        let (x, y) = (cell.x as usize, cell.y as usize);
        if x >= self.width || y >= self.height {
            return None;
        }
        let row = self.height - 1 - y;
        Some(self.grid[row * self.width + x])
    }

    /// Terrain is solid; outside the grid, the side walls are solid and
    /// everything above or below is open.
    pub fn solid_at(&self, cell: Cell) -> bool {
        if cell.x < 0 || cell.x >= self.width as i64 {
            return true;
        }
        matches!(self.tile(cell), Some(TileKind::Terrain))
    }

    pub fn spawn_cell(&self) -> Cell {
        Cell::new(self.spawn.x.floor() as i64, self.spawn.y.floor() as i64)
    }

    pub fn bounds(&self) -> Aabb {
        let half = Vec2::new(self.width as f64 / 2.0, self.height as f64 / 2.0);
        Aabb::new(half, half)
    }

    /// Hazard cells whose unit box touches `body`.
    pub fn hazard_cells_overlapping(&self, body: &Aabb) -> BTreeSet<Cell> {
        let (x0, x1, y0, y1) = body.cell_span();
        let mut out = BTreeSet::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                let cell = Cell::new(x, y);
                if self.tile(cell) == Some(TileKind::Hazard)
                    && aabb_overlap(&Aabb::of_cell(cell), body)
                {
                    out.insert(cell);
                }
            }
        }
        out
    }

    /// Checks that every trigger's dialogue id exists in `script`.
    pub fn check_dialogues(&self, script: &DialogueScript) -> Result<(), LevelError> {
        for t in &self.triggers {
            if script.get(&t.dialogue_id).is_none() {
                return Err(invalid(
                    "unresolved-dialogue",
                    format!("trigger {} references unknown dialogue {}", t.id, t.dialogue_id),
                ));
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), LevelError> {
        let spawn = self.spawn_cell();
        if self.tile(spawn).is_none() {
            return Err(invalid("spawn-out-of-bounds", format!("{:?}", self.spawn)));
        }
        // the standing body is taller than one tile
        let head = Cell::new(spawn.x, spawn.y + 1);
        if self.tile(spawn) == Some(TileKind::Terrain) || self.tile(head) == Some(TileKind::Terrain) {
            return Err(invalid("spawn-in-solid", format!("{:?}", self.spawn)));
        }
        let mut ids = HashSet::new();
        for p in &self.platforms {
            if !ids.insert(p.id.as_str()) {
                return Err(invalid("duplicate-id", p.id.clone()));
            }
            if p.waypoints.len() < 2 {
                return Err(invalid("platform-waypoints", format!("{} needs at least two waypoints", p.id)));
            }
            for (i, a) in p.waypoints.iter().enumerate() {
                if p.waypoints[i + 1..].contains(a) {
                    return Err(invalid("platform-waypoints", format!("{} repeats waypoint {:?}", p.id, a)));
                }
            }
            if !p.speed.is_finite() || p.speed <= 0.0 {
                return Err(invalid("platform-speed", p.id.clone()));
            }
            if !(p.half_extents.x > 0.0 && p.half_extents.y > 0.0) {
                return Err(invalid("platform-extents", p.id.clone()));
            }
        }
        let bounds = self.bounds();
        for t in &self.triggers {
            if !ids.insert(t.id.as_str()) {
                return Err(invalid("duplicate-id", t.id.clone()));
            }
            if t.kind == TriggerKind::EndGame && t.group != TriggerGroup::Always {
                return Err(invalid("end-game-group", t.id.clone()));
            }
            if let TriggerGroup::Attempt(g) = t.group {
                if !(1..=MAX_GROUP).contains(&g) {
                    return Err(invalid("trigger-group", format!("{} has group {g}", t.id)));
                }
            }
            if !aabb_overlap(&t.region, &bounds) {
                return Err(invalid("trigger-out-of-bounds", t.id.clone()));
            }
        }
        if !self.timer_seconds.is_finite() || self.timer_seconds <= 0.0 {
            return Err(invalid("timer-seconds", self.timer_seconds.to_string()));
        }
        Ok(())
    }

    /// Writes the level back in the file format accepted by [`parse_level`].
    pub fn to_text(&self) -> String {
        let spawn = self.spawn_cell();
        let mut out = String::new();
        for row in 0..self.height {
            for col in 0..self.width {
                let y = (self.height - 1 - row) as i64;
                if spawn == Cell::new(col as i64, y) {
                    out.push('S');
                } else {
                    out.push(self.grid[row * self.width + col].to_char());
                }
            }
            out.push('\n');
        }
        out.push_str("---\n");
        for p in &self.platforms {
            let _ = write!(out, "platform {} {} {} {}", p.id, p.half_extents.x, p.half_extents.y, p.speed);
            for w in &p.waypoints {
                let _ = write!(out, " ({},{})", w.x, w.y);
            }
            out.push('\n');
        }
        for t in &self.triggers {
            let _ = writeln!(
                out,
                "trigger {} {} {} {} rect {} {} {} {}",
                t.id,
                t.kind.keyword(),
                t.group,
                t.dialogue_id,
                t.region.center.x,
                t.region.center.y,
                t.region.half_extents.x,
                t.region.half_extents.y
            );
        }
        let _ = writeln!(out, "timer {}", self.timer_seconds);
        out
    }
}

impl Solids for LevelDef {
    fn solid_cell(&self, cell: Cell) -> bool {
        self.solid_at(cell)
    }
}

/// Whitespace-split tokens with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, t)| (line[..s].chars().count() + 1, t))
        .collect()
}

fn number(line: usize, (col, tok): (usize, &str)) -> Result<f64, LevelError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(syntax(line, col, format!("expected a number, found `{tok}`"))),
    }
}

fn point(line: usize, (col, tok): (usize, &str)) -> Result<Vec2, LevelError> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| syntax(line, col, format!("expected `(x,y)`, found `{tok}`")))?;
    let (x, y) = inner
        .split_once(',')
        .ok_or_else(|| syntax(line, col, format!("expected `(x,y)`, found `{tok}`")))?;
    Ok(Vec2::new(number(line, (col, x))?, number(line, (col, y))?))
}

/// Parses and validates a level document.
pub fn parse_level(document: &str) -> Result<LevelDef, LevelError> {
    let mut lines = document.lines().enumerate().map(|(i, l)| (i + 1, l));

    let mut rows: Vec<(usize, &str)> = Vec::new();
    let mut saw_separator = false;
    for (n, line) in lines.by_ref() {
        let line = line.trim_end();
        if line == "---" {
            saw_separator = true;
            break;
        }
        if line.is_empty() && rows.is_empty() {
            continue;
        }
        rows.push((n, line));
    }
    if !saw_separator {
        let n = document.lines().count().max(1);
        return Err(syntax(n, 1, "missing `---` separator"));
    }
    if rows.is_empty() {
        return Err(syntax(1, 1, "empty tile grid"));
    }

    let width = rows[0].1.chars().count();
    let height = rows.len();
    let mut grid = Vec::with_capacity(width * height);
    let mut spawn: Option<(usize, usize)> = None;
    for (r, &(n, text)) in rows.iter().enumerate() {
        let count = text.chars().count();
        if count != width {
            return Err(syntax(n, count.min(width) + 1, format!("row has {count} cells, expected {width}")));
        }
        for (c, ch) in text.chars().enumerate() {
            let kind = TileKind::from_char(ch)
                .ok_or_else(|| syntax(n, c + 1, format!("unknown tile `{ch}`")))?;
            if ch == 'S' {
                if spawn.is_some() {
                    return Err(syntax(n, c + 1, "more than one spawn"));
                }
                spawn = Some((c, r));
            }
            grid.push(kind);
        }
    }
    let (sc, sr) = spawn.ok_or_else(|| syntax(rows[0].0, 1, "no spawn `S` in grid"))?;
    let spawn = Vec2::new(sc as f64 + 0.5, (height - sr) as f64 - 0.5);

    let mut platforms = Vec::new();
    let mut triggers = Vec::new();
    let mut timer_seconds = DEFAULT_TIMER_SECONDS;
    let mut timer_seen = false;

    for (n, line) in lines {
        let line = line.trim_end();
        if line.trim_start().is_empty() || line.starts_with('#') {
            continue;
        }
        let toks = tokens(line);
        match toks[0].1 {
            "platform" => {
                if toks.len() < 7 {
                    return Err(syntax(n, 1, "platform needs: id hx hy speed and two or more waypoints"));
                }
                let half_extents = Vec2::new(number(n, toks[2])?, number(n, toks[3])?);
                let speed = number(n, toks[4])?;
                let waypoints = toks[5..].iter().map(|&t| point(n, t)).collect::<Result<_, _>>()?;
                platforms.push(PlatformDef {
                    id: toks[1].1.to_string(),
                    half_extents,
                    speed,
                    waypoints,
                });
            }
            "trigger" => {
                if toks.len() != 10 {
                    return Err(syntax(n, 1, "trigger needs: id kind group dialogue_id rect cx cy hx hy"));
                }
                let kind = TriggerKind::from_keyword(toks[2].1)
                    .ok_or_else(|| syntax(n, toks[2].0, format!("unknown trigger kind `{}`", toks[2].1)))?;
                let group = match toks[3].1 {
                    "always" => TriggerGroup::Always,
                    g => TriggerGroup::Attempt(
                        g.parse()
                            .map_err(|_| syntax(n, toks[3].0, format!("bad group `{g}`")))?,
                    ),
                };
                if toks[5].1 != "rect" {
                    return Err(syntax(n, toks[5].0, "expected `rect`"));
                }
                let center = Vec2::new(number(n, toks[6])?, number(n, toks[7])?);
                let half = Vec2::new(number(n, toks[8])?, number(n, toks[9])?);
                if !(half.x > 0.0 && half.y > 0.0) {
                    return Err(syntax(n, toks[8].0, "trigger half extents must be positive"));
                }
                triggers.push(TriggerDef {
                    id: toks[1].1.to_string(),
                    region: Aabb::new(center, half),
                    kind,
                    group,
                    dialogue_id: toks[4].1.to_string(),
                });
            }
            "timer" => {
                if toks.len() != 2 {
                    return Err(syntax(n, 1, "timer needs exactly one value"));
                }
                if timer_seen {
                    return Err(syntax(n, 1, "timer given twice"));
                }
                timer_seen = true;
                timer_seconds = number(n, toks[1])?;
            }
            other => return Err(syntax(n, toks[0].0, format!("unknown directive `{other}`"))),
        }
    }

    let level = LevelDef {
        width,
        height,
        grid,
        spawn,
        platforms,
        triggers,
        timer_seconds,
    };
    level.validate()?;
    Ok(level)
}
