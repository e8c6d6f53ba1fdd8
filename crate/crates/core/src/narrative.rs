//! Dialogue content and the conversation state machine.
//!
//! A conversation is a queue of lines. Starting one replaces whatever was
//! showing; each ui tick reveals one more character of the current line, and
//! every advance drops the current line (finished or not) for the next one.
//!
//! Script files group lines into conversations:
//!
//! ```text
//! conversation a1_wake
//! speaker Player Character
//! > Where... Where am I?
//! > I... I don't.... I need to get out of here
//!
//! ```
//!
//! `speaker` opens a new [`Dialogue`] entry, `> ` lines are its sentences,
//! and a blank line closes the block. `#` lines between blocks are comments.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::level::TriggerGroup;

/// One speaker and the sentences they say in a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    pub speaker: String,
    pub sentences: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DialogueScript {
    conversations: BTreeMap<String, Vec<Dialogue>>,
}

impl DialogueScript {
    pub fn get(&self, id: &str) -> Option<&[Dialogue]> {
        self.conversations.get(id).map(Vec::as_slice)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.conversations.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.conversations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conversations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate-id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: empty-sentence")]
    EmptySentence { line: usize },
}

fn syntax(line: usize, message: impl Into<String>) -> ScriptError {
    ScriptError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses a dialogue script document.
pub fn load_script(document: &str) -> Result<DialogueScript, ScriptError> {
    struct Open {
        id: String,
        start: usize,
        dialogues: Vec<Dialogue>,
    }

    fn close(open: Open, script: &mut DialogueScript) -> Result<(), ScriptError> {
        if open.dialogues.is_empty() {
            return Err(syntax(open.start, format!("conversation `{}` has no speaker", open.id)));
        }
        if let Some(d) = open.dialogues.iter().find(|d| d.sentences.is_empty()) {
            return Err(syntax(open.start, format!("speaker `{}` in `{}` has no sentences", d.speaker, open.id)));
        }
        if script.conversations.contains_key(&open.id) {
            return Err(ScriptError::DuplicateId {
                line: open.start,
                id: open.id,
            });
        }
        script.conversations.insert(open.id, open.dialogues);
        Ok(())
    }

    let mut script = DialogueScript::default();
    let mut open: Option<Open> = None;

    for (i, raw) in document.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(block) = open.take() {
                close(block, &mut script)?;
            }
            continue;
        }
        match open.as_mut() {
            None => {
                if line.starts_with('#') {
                    continue;
                }
                let id = line
                    .strip_prefix("conversation ")
                    .map(str::trim)
                    .filter(|id| !id.is_empty() && !id.contains(char::is_whitespace))
                    .ok_or_else(|| syntax(n, "expected `conversation <id>`"))?;
                open = Some(Open {
                    id: id.to_string(),
                    start: n,
                    dialogues: Vec::new(),
                });
            }
            Some(block) => {
                if let Some(name) = line.strip_prefix("speaker ") {
                    let name = name.trim();
                    if name.is_empty() {
                        return Err(syntax(n, "empty speaker name"));
                    }
                    block.dialogues.push(Dialogue {
                        speaker: name.to_string(),
                        sentences: Vec::new(),
                    });
                } else if line == ">" || line.starts_with("> ") {
                    let text = line.get(2..).unwrap_or("");
                    if text.trim().is_empty() {
                        return Err(ScriptError::EmptySentence { line: n });
                    }
                    let dialogue = block
                        .dialogues
                        .last_mut()
                        .ok_or_else(|| syntax(n, "sentence before any `speaker`"))?;
                    dialogue.sentences.push(text.to_string());
                } else {
                    return Err(syntax(n, format!("unexpected line `{line}` inside conversation")));
                }
            }
        }
    }
    if let Some(block) = open.take() {
        close(block, &mut script)?;
    }
    Ok(script)
}

/// The numbered trigger group enabled for `attempt`, if any. `Always`
/// triggers are enabled independently of this.
pub fn active_group(attempt: u32) -> Option<u32> {
    (1..=crate::level::MAX_GROUP).contains(&attempt).then_some(attempt)
}

pub fn group_enabled(group: TriggerGroup, attempt: u32) -> bool {
    match group {
        TriggerGroup::Always => true,
        TriggerGroup::Attempt(g) => active_group(attempt) == Some(g),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Line {
    pub speaker: String,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConversationState {
    pub active: bool,
    pub speaker: String,
    /// Lines still to come after `current`.
    pub pending: VecDeque<Line>,
    pub current: String,
    /// Characters of `current` shown so far.
    pub revealed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("advance called with no active conversation")]
pub struct NotActive;

impl ConversationState {
    /// Replaces any running conversation with `content`.
    pub fn start(content: &[Dialogue]) -> ConversationState {
        let mut pending: VecDeque<Line> = content
            .iter()
            .flat_map(|d| {
                d.sentences.iter().map(move |s| Line {
                    speaker: d.speaker.clone(),
                    text: s.clone(),
                })
            })
            .collect();
        match pending.pop_front() {
            Some(first) => ConversationState {
                active: true,
                speaker: first.speaker,
                pending,
                current: first.text,
                revealed: 0,
            },
            None => ConversationState::default(),
        }
    }

    pub fn current_len(&self) -> usize {
        self.current.chars().count()
    }

    /// The shown prefix of the current sentence.
    pub fn revealed_text(&self) -> &str {
        match self.current.char_indices().nth(self.revealed) {
            Some((i, _)) => &self.current[..i],
            None => &self.current,
        }
    }

    pub fn fully_revealed(&self) -> bool {
        self.revealed >= self.current_len()
    }

    /// Reveals one more character. No-op when inactive or saturated.
    pub fn typewriter_tick(&mut self) {
        if self.active && self.revealed < self.current_len() {
            self.revealed += 1;
        }
    }

    /// Moves to the next sentence, discarding any unrevealed text. Returns
    /// `true` when that ends the conversation.
    pub fn advance(&mut self) -> Result<bool, NotActive> {
        if !self.active {
            return Err(NotActive);
        }
        match self.pending.pop_front() {
            Some(next) => {
                self.speaker = next.speaker;
                self.current = next.text;
                self.revealed = 0;
                Ok(false)
            }
            None => {
                *self = ConversationState::default();
                Ok(true)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(sentences: &[&str]) -> Dialogue {
        Dialogue {
            speaker: "Player Character".into(),
            sentences: sentences.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn entity(sentences: &[&str]) -> Dialogue {
        Dialogue {
            speaker: "Entity".into(),
            sentences: sentences.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn group_selection() {
        assert_eq!(active_group(1), Some(1));
        assert_eq!(active_group(3), Some(3));
        assert_eq!(active_group(6), Some(6));
        // the attempt switch only has cases 1..6, so attempt 9 (index 8)
        // lines up with no slot of a six-slot trigger array
        let slots = [1, 2, 3, 4, 5, 6];
        let matched: Vec<_> = slots.iter().enumerate().filter(|(i, _)| *i as u32 == 9 - 1).collect();
        assert!(matched.is_empty());
        assert_eq!(active_group(9), None);
        assert!(group_enabled(TriggerGroup::Always, 9));
        assert!(group_enabled(TriggerGroup::Always, 1));
        assert!(!group_enabled(TriggerGroup::Attempt(2), 3));
    }

    #[test]
    fn exactly_one_numbered_group_for_early_attempts() {
        for attempt in 1..=40 {
            let enabled = (1..=6)
                .filter(|&g| group_enabled(TriggerGroup::Attempt(g), attempt))
                .count();
            assert_eq!(enabled, usize::from(attempt <= 6), "attempt {attempt}");
        }
    }

    #[test]
    fn start_single_speaker() {
        let c = ConversationState::start(&[pc(&[
            "Where... Where am I?",
            "I... I don't.... I need to get out of here",
        ])]);
        assert!(c.active);
        assert_eq!(c.speaker, "Player Character");
        assert_eq!(c.current, "Where... Where am I?");
        assert_eq!(c.revealed, 0);
        assert_eq!(c.pending.len(), 1);
        assert_eq!(c.pending[0].text, "I... I don't.... I need to get out of here");
    }

    #[test]
    fn speakers_alternate_through_exchange() {
        let mut c = ConversationState::start(&[
            entity(&["Lost, are we?"]),
            pc(&["Who are you?"]),
            entity(&["Wrong question..."]),
        ]);
        let mut seen = vec![(c.speaker.clone(), c.current.clone())];
        while !c.advance().unwrap() {
            seen.push((c.speaker.clone(), c.current.clone()));
        }
        assert_eq!(
            seen,
            vec![
                ("Entity".to_string(), "Lost, are we?".to_string()),
                ("Player Character".to_string(), "Who are you?".to_string()),
                ("Entity".to_string(), "Wrong question...".to_string()),
            ]
        );
        assert!(!c.active && c.pending.is_empty());
    }

    #[test]
    fn restart_replaces_active_conversation() {
        let mut c = ConversationState::start(&[pc(&["a", "b", "c"])]);
        c.typewriter_tick();
        c = ConversationState::start(&[entity(&["x"])]);
        assert_eq!(c.speaker, "Entity");
        assert_eq!(c.current, "x");
        assert!(c.pending.is_empty());
        assert_eq!(c.revealed, 0);
    }

    #[test]
    fn typewriter_examples() {
        let mut c = ConversationState::start(&[pc(&["Hi"])]);
        c.typewriter_tick();
        assert_eq!((c.revealed, c.revealed_text()), (1, "H"));
        c.typewriter_tick();
        c.typewriter_tick();
        assert_eq!((c.revealed, c.revealed_text()), (2, "Hi"));
        let mut idle = ConversationState::default();
        idle.typewriter_tick();
        assert_eq!(idle, ConversationState::default());
    }

    #[test]
    fn advance_examples() {
        let mut c = ConversationState::start(&[pc(&["A", "B"])]);
        assert_eq!(c.advance(), Ok(false));
        assert_eq!((c.current.as_str(), c.revealed), ("B", 0));
        assert_eq!(c.advance(), Ok(true));
        assert!(!c.active);
        assert_eq!(c.advance(), Err(NotActive));
    }

    #[test]
    fn advance_mid_typing_drops_the_rest() {
        let mut c = ConversationState::start(&[pc(&["Hello there", "Next"])]);
        for _ in 0..4 {
            c.typewriter_tick();
        }
        assert_eq!(c.revealed_text(), "Hell");
        assert_eq!(c.advance(), Ok(false));
        assert_eq!((c.current.as_str(), c.revealed_text()), ("Next", ""));
    }

    #[test]
    fn revealed_text_counts_characters_not_bytes() {
        let mut c = ConversationState::start(&[pc(&["é…x"])]);
        c.typewriter_tick();
        c.typewriter_tick();
        assert_eq!(c.revealed_text(), "é…");
        assert_eq!(c.current_len(), 3);
    }

    #[test]
    fn script_parses_blocks() {
        let doc = "# header\nconversation a\nspeaker Entity\n> Lost, are we?\nspeaker Player Character\n> Who are you?\n\nconversation b\nspeaker Player Character\n> ...\n";
        let s = load_script(doc).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.get("a").unwrap().len(), 2);
        assert_eq!(s.get("b").unwrap()[0].sentences, vec!["...".to_string()]);
    }

    #[test]
    fn script_errors() {
        let dup = "conversation a\nspeaker X\n> hi\n\nconversation a\nspeaker Y\n> yo\n";
        assert!(matches!(load_script(dup), Err(ScriptError::DuplicateId { line: 5, .. })));
        assert_eq!(
            load_script("conversation a\nspeaker X\n> \n"),
            Err(ScriptError::EmptySentence { line: 3 })
        );
        assert!(matches!(load_script("conversation a\n> hi\n"), Err(ScriptError::Syntax { line: 2, .. })));
        assert!(matches!(load_script("hello\n"), Err(ScriptError::Syntax { line: 1, .. })));
        assert!(matches!(load_script("conversation a\nspeaker X\n\n"), Err(ScriptError::Syntax { .. })));
    }
}
