//! Four-page on-screen keyboard model and the receiver-side cursor state
//! machine.
//!
//! The layout mirrors a TV-box IME driven with a directional pad: four key
//! pages (lowercase, uppercase, digits, symbols), page-switch keys, and a
//! candidate row above the grid that becomes reachable once at least one
//! character has been typed. Pressing OK on the candidate row drops the
//! cursor back on the page's initial key without typing anything, which is
//! what makes the blind `[UP, UP, UP, UP, OK]` reset work from any cell.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of symbols in the payload alphabet.
pub const ALPHABET_LEN: usize = 64;

/// The URL-safe base64 alphabet in index order: `A`-`Z`, `a`-`z`, `0`-`9`,
/// `-`, `_`.
pub static ALPHABET: [char; ALPHABET_LEN] = [
    'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J', 'K', 'L', 'M', 'N', 'O', 'P', 'Q', 'R',
    'S', 'T', 'U', 'V', 'W', 'X', 'Y', 'Z', 'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j',
    'k', 'l', 'm', 'n', 'o', 'p', 'q', 'r', 's', 't', 'u', 'v', 'w', 'x', 'y', 'z', '0', '1',
    '2', '3', '4', '5', '6', '7', '8', '9', '-', '_',
];

/// Index of `c` in the payload alphabet, or `None` for any other character.
pub fn symbol_index(c: char) -> Option<usize> {
    match c {
        'A'..='Z' => Some(c as usize - 'A' as usize),
        'a'..='z' => Some(26 + c as usize - 'a' as usize),
        '0'..='9' => Some(52 + c as usize - '0' as usize),
        '-' => Some(62),
        '_' => Some(63),
        _ => None,
    }
}

/// Alphabet symbol at `index`. Panics if `index >= 64`.
pub fn symbol_at(index: usize) -> char {
    ALPHABET[index]
}

/// One of the four IME key pages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PageId {
    Lower,
    Upper,
    Digits,
    Symbols,
}

impl PageId {
    pub const ALL: [PageId; 4] = [PageId::Lower, PageId::Upper, PageId::Digits, PageId::Symbols];

    fn as_str(self) -> &'static str {
        match self {
            PageId::Lower => "LOWER",
            PageId::Upper => "UPPER",
            PageId::Digits => "DIGITS",
            PageId::Symbols => "SYMBOLS",
        }
    }

    fn from_str(s: &str) -> Option<PageId> {
        match s {
            "LOWER" => Some(PageId::Lower),
            "UPPER" => Some(PageId::Upper),
            "DIGITS" => Some(PageId::Digits),
            "SYMBOLS" => Some(PageId::Symbols),
            _ => None,
        }
    }
}

impl fmt::Display for PageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A remote-controller button press.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RemoteCommand {
    Up,
    Down,
    Left,
    Right,
    Ok,
    Source,
    Home,
    OpenBrowser,
    Back,
}

impl RemoteCommand {
    pub const ALL: [RemoteCommand; 9] = [
        RemoteCommand::Up,
        RemoteCommand::Down,
        RemoteCommand::Left,
        RemoteCommand::Right,
        RemoteCommand::Ok,
        RemoteCommand::Source,
        RemoteCommand::Home,
        RemoteCommand::OpenBrowser,
        RemoteCommand::Back,
    ];

    /// True for the directional keys and OK, the only buttons the IME
    /// reacts to.
    pub fn is_ime_command(self) -> bool {
        matches!(
            self,
            RemoteCommand::Up
                | RemoteCommand::Down
                | RemoteCommand::Left
                | RemoteCommand::Right
                | RemoteCommand::Ok
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RemoteCommand::Up => "UP",
            RemoteCommand::Down => "DOWN",
            RemoteCommand::Left => "LEFT",
            RemoteCommand::Right => "RIGHT",
            RemoteCommand::Ok => "OK",
            RemoteCommand::Source => "SOURCE",
            RemoteCommand::Home => "HOME",
            RemoteCommand::OpenBrowser => "OPEN_BROWSER",
            RemoteCommand::Back => "BACK",
        }
    }
}

impl fmt::Display for RemoteCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One cell of a key page: a character key or a page-switch key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Key {
    Char(char),
    Switch(PageId),
}

impl Key {
    /// Parse a grid cell label. The reserved labels `#123`, `#SYM`, `#ABC`
    /// and `#abc` name switch keys; any single character is a plain key.
    pub fn from_label(label: &str) -> Result<Key> {
        match label {
            "#123" => Ok(Key::Switch(PageId::Digits)),
            "#SYM" => Ok(Key::Switch(PageId::Symbols)),
            "#ABC" => Ok(Key::Switch(PageId::Upper)),
            "#abc" => Ok(Key::Switch(PageId::Lower)),
            _ => {
                let mut chars = label.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Key::Char(c)),
                    _ => Err(Error::InvalidLayout(format!("bad cell label {label:?}"))),
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Key::Char(c) => c.to_string(),
            Key::Switch(PageId::Digits) => "#123".to_string(),
            Key::Switch(PageId::Symbols) => "#SYM".to_string(),
            Key::Switch(PageId::Upper) => "#ABC".to_string(),
            Key::Switch(PageId::Lower) => "#abc".to_string(),
        }
    }
}

/// A single key page: a grid of keys plus the cell the cursor lands on
/// when the page is entered.
#[derive(Debug, Clone)]
pub struct KeyPage {
    pub page_id: PageId,
    pub grid: Vec<Vec<Key>>,
    pub initial: (usize, usize),
}

impl KeyPage {
    pub fn rows(&self) -> usize {
        self.grid.len()
    }

    pub fn row_len(&self, row: usize) -> usize {
        self.grid[row].len()
    }

    pub fn key_at(&self, row: usize, col: usize) -> Option<&Key> {
        self.grid.get(row).and_then(|r| r.get(col))
    }
}

/// Location of a key on the four-page layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyPosition {
    pub page: PageId,
    pub row: usize,
    pub col: usize,
}

/// The full four-page keyboard with its switch-key table and symbol index.
#[derive(Debug, Clone)]
pub struct ImeLayout {
    pages: Vec<KeyPage>,
    switch_keys: BTreeMap<(PageId, PageId), (usize, usize)>,
    char_index: HashMap<char, KeyPosition>,
    label_index: HashMap<char, KeyPosition>,
}

#[derive(Serialize, Deserialize)]
struct PageWire {
    page_id: PageId,
    initial: [usize; 2],
    grid: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct LayoutWire {
    schema_version: u32,
    pages: Vec<PageWire>,
    switch_keys: BTreeMap<String, [usize; 2]>,
}

static CANONICAL: OnceLock<ImeLayout> = OnceLock::new();

impl ImeLayout {
    /// The canonical layout bundled with the crate
    /// (`data/layout_v1.json`). All shipped statistics are computed
    /// against this file.
    pub fn canonical() -> &'static ImeLayout {
        CANONICAL.get_or_init(|| {
            ImeLayout::from_json(include_str!("../data/layout_v1.json"))
                .expect("bundled layout is valid")
        })
    }

    /// Parse and validate a layout from its JSON form.
    pub fn from_json(json: &str) -> Result<ImeLayout> {
        let wire: LayoutWire = serde_json::from_str(json)
            .map_err(|e| Error::InvalidLayout(format!("parse error: {e}")))?;
        ImeLayout::from_wire(wire)
    }

    fn from_wire(wire: LayoutWire) -> Result<ImeLayout> {
        if wire.pages.len() != 4 {
            return Err(Error::InvalidLayout(format!(
                "expected 4 pages, got {}",
                wire.pages.len()
            )));
        }

        let mut pages = Vec::with_capacity(4);
        for w in &wire.pages {
            let mut grid = Vec::with_capacity(w.grid.len());
            for row in &w.grid {
                let cells: Result<Vec<Key>> = row.iter().map(|s| Key::from_label(s)).collect();
                grid.push(cells?);
            }
            pages.push(KeyPage {
                page_id: w.page_id,
                grid,
                initial: (w.initial[0], w.initial[1]),
            });
        }
        pages.sort_by_key(|p| p.page_id);

        let mut switch_keys = BTreeMap::new();
        for (name, pos) in &wire.switch_keys {
            let (from, to) = name
                .split_once('\u{2192}')
                .and_then(|(a, b)| Some((PageId::from_str(a)?, PageId::from_str(b)?)))
                .ok_or_else(|| Error::InvalidLayout(format!("bad switch key name {name:?}")))?;
            switch_keys.insert((from, to), (pos[0], pos[1]));
        }

        let layout = ImeLayout::build(pages, switch_keys)?;
        Ok(layout)
    }

    fn build(
        pages: Vec<KeyPage>,
        switch_keys: BTreeMap<(PageId, PageId), (usize, usize)>,
    ) -> Result<ImeLayout> {
        for (expected, page) in PageId::ALL.iter().zip(&pages) {
            if page.page_id != *expected {
                return Err(Error::InvalidLayout(format!("missing page {expected}")));
            }
        }

        for page in &pages {
            if page.grid.is_empty() || page.grid.iter().any(|r| r.is_empty()) {
                return Err(Error::InvalidLayout(format!("page {} has empty rows", page.page_id)));
            }
            // The blind reset is four UPs; a fifth row could not reach the
            // candidate row in four presses.
            if page.rows() > 4 {
                return Err(Error::InvalidLayout(format!(
                    "page {} has {} rows, max 4",
                    page.page_id,
                    page.rows()
                )));
            }
            let (r, c) = page.initial;
            let initial_key = page
                .key_at(r, c)
                .ok_or_else(|| Error::InvalidLayout(format!("page {} initial outside grid", page.page_id)))?;
            let expected_initial = match page.page_id {
                PageId::Lower => Some('q'),
                PageId::Upper => Some('Q'),
                PageId::Digits => Some('1'),
                PageId::Symbols => None,
            };
            if let Some(want) = expected_initial {
                if *initial_key != Key::Char(want) {
                    return Err(Error::InvalidLayout(format!(
                        "page {} initial key must be {want:?}",
                        page.page_id
                    )));
                }
            }
        }

        let mut char_index = HashMap::new();
        let mut label_index = HashMap::new();
        for page in &pages {
            for (r, row) in page.grid.iter().enumerate() {
                for (c, key) in row.iter().enumerate() {
                    if let Key::Char(ch) = key {
                        let pos = KeyPosition { page: page.page_id, row: r, col: c };
                        label_index.entry(*ch).or_insert(pos);
                        if symbol_index(*ch).is_some() && char_index.insert(*ch, pos).is_some() {
                            return Err(Error::InvalidLayout(format!(
                                "alphabet symbol {ch:?} appears more than once"
                            )));
                        }
                    }
                }
            }
        }
        for &c in &ALPHABET {
            if !char_index.contains_key(&c) {
                return Err(Error::InvalidLayout(format!("alphabet symbol {c:?} missing")));
            }
        }

        for ((from, to), (r, c)) in &switch_keys {
            let page = &pages[*from as usize];
            match page.key_at(*r, *c) {
                Some(Key::Switch(target)) if target == to => {}
                _ => {
                    return Err(Error::InvalidLayout(format!(
                        "switch key {from}\u{2192}{to} at ({r},{c}) does not switch to {to}"
                    )))
                }
            }
        }

        // Every page must reach every other page in at most two presses.
        for from in PageId::ALL {
            for to in PageId::ALL {
                if from == to {
                    continue;
                }
                let direct = switch_keys.contains_key(&(from, to));
                let two_hop = PageId::ALL.iter().any(|mid| {
                    switch_keys.contains_key(&(from, *mid))
                        && switch_keys.contains_key(&(*mid, to))
                });
                if !direct && !two_hop {
                    return Err(Error::InvalidLayout(format!("{to} unreachable from {from}")));
                }
            }
        }

        Ok(ImeLayout { pages, switch_keys, char_index, label_index })
    }

    pub fn page(&self, id: PageId) -> &KeyPage {
        &self.pages[id as usize]
    }

    pub fn pages(&self) -> &[KeyPage] {
        &self.pages
    }

    /// Position of the switch key on `from` that jumps straight to `to`.
    pub fn switch_key(&self, from: PageId, to: PageId) -> Option<(usize, usize)> {
        self.switch_keys.get(&(from, to)).copied()
    }

    /// Position of a payload-alphabet symbol.
    ///
    /// Characters outside the 64-symbol alphabet are rejected even when the
    /// grid happens to carry them; use [`ImeLayout::lookup_key`] for those.
    pub fn locate(&self, symbol: char) -> Result<KeyPosition> {
        if symbol_index(symbol).is_none() {
            return Err(Error::UnknownSymbol { symbol, index: None });
        }
        Ok(self.char_index[&symbol])
    }

    /// Position of any character key on the layout, payload or not. For
    /// characters that appear on several pages this returns the first
    /// occurrence in page order, row-major.
    pub fn lookup_key(&self, c: char) -> Result<KeyPosition> {
        self.label_index
            .get(&c)
            .copied()
            .ok_or(Error::UnknownSymbol { symbol: c, index: None })
    }

    pub fn to_json(&self) -> String {
        let wire = LayoutWire {
            schema_version: 1,
            pages: self
                .pages
                .iter()
                .map(|p| PageWire {
                    page_id: p.page_id,
                    initial: [p.initial.0, p.initial.1],
                    grid: p
                        .grid
                        .iter()
                        .map(|row| row.iter().map(Key::label).collect())
                        .collect(),
                })
                .collect(),
            switch_keys: self
                .switch_keys
                .iter()
                .map(|((f, t), (r, c))| (format!("{f}\u{2192}{t}"), [*r, *c]))
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("layout serializes")
    }
}

/// Cursor location: a grid cell or the candidate row above the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Grid { row: usize, col: usize },
    CandidateRow,
}

/// Receiver-side IME state: current page, cursor, and the text typed so
/// far. Updated functionally; [`CursorState::apply`] returns the successor
/// state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CursorState {
    pub page: PageId,
    pub position: Position,
    pub typed: String,
    pub committed_count: usize,
}

impl CursorState {
    /// Fresh IME state: lowercase page, cursor on its initial key, nothing
    /// typed.
    pub fn initial(layout: &ImeLayout) -> CursorState {
        let page = layout.page(PageId::Lower);
        CursorState {
            page: PageId::Lower,
            position: Position::Grid { row: page.initial.0, col: page.initial.1 },
            typed: String::new(),
            committed_count: 0,
        }
    }

    /// Apply one remote command. Non-IME commands (SOURCE, HOME, ...) leave
    /// the state unchanged. Directional moves clamp at the grid edges; UP
    /// from the top row enters the candidate row only once at least one
    /// character has been committed. OK commits the key under the cursor,
    /// follows a switch key, or (on the candidate row) just returns the
    /// cursor to the page's initial key.
    pub fn apply(&self, cmd: RemoteCommand, layout: &ImeLayout) -> CursorState {
        let mut next = self.clone();
        let page = layout.page(self.page);
        match cmd {
            RemoteCommand::Up => match self.position {
                Position::Grid { row: 0, .. } => {
                    if self.committed_count >= 1 {
                        next.position = Position::CandidateRow;
                    }
                }
                Position::Grid { row, col } => {
                    let up = row - 1;
                    next.position = Position::Grid { row: up, col: col.min(page.row_len(up) - 1) };
                }
                // No ring shift on the candidate row: the highlight stays
                // on the first item no matter how many UPs arrive.
                Position::CandidateRow => {}
            },
            RemoteCommand::Down => match self.position {
                Position::Grid { row, col } => {
                    if row + 1 < page.rows() {
                        let down = row + 1;
                        next.position =
                            Position::Grid { row: down, col: col.min(page.row_len(down) - 1) };
                    }
                }
                Position::CandidateRow => {
                    next.position = Position::Grid { row: page.initial.0, col: page.initial.1 };
                }
            },
            RemoteCommand::Left => {
                if let Position::Grid { row, col } = self.position {
                    if col > 0 {
                        next.position = Position::Grid { row, col: col - 1 };
                    }
                }
            }
            RemoteCommand::Right => {
                if let Position::Grid { row, col } = self.position {
                    if col + 1 < page.row_len(row) {
                        next.position = Position::Grid { row, col: col + 1 };
                    }
                }
            }
            RemoteCommand::Ok => match self.position {
                Position::CandidateRow => {
                    next.position = Position::Grid { row: page.initial.0, col: page.initial.1 };
                }
                Position::Grid { row, col } => match page.grid[row][col] {
                    Key::Char(c) => {
                        next.typed.push(c);
                        next.committed_count += 1;
                    }
                    Key::Switch(target) => {
                        let tp = layout.page(target);
                        next.page = target;
                        next.position = Position::Grid { row: tp.initial.0, col: tp.initial.1 };
                    }
                },
            },
            RemoteCommand::Source
            | RemoteCommand::Home
            | RemoteCommand::OpenBrowser
            | RemoteCommand::Back => {}
        }
        next
    }
}

/// Fold a command stream over a fresh IME state and return the typed text.
pub fn decode_command_stream(commands: &[RemoteCommand], layout: &ImeLayout) -> String {
    let mut state = CursorState::initial(layout);
    for &cmd in commands {
        state = state.apply(cmd, layout);
    }
    state.typed
}

#[cfg(test)]
mod tests {
    use super::*;
    use RemoteCommand::*;

    fn layout() -> &'static ImeLayout {
        ImeLayout::canonical()
    }

    #[test]
    fn alphabet_order_and_bijection() {
        assert_eq!(ALPHABET[0], 'A');
        assert_eq!(ALPHABET[25], 'Z');
        assert_eq!(ALPHABET[26], 'a');
        assert_eq!(ALPHABET[51], 'z');
        assert_eq!(ALPHABET[52], '0');
        assert_eq!(ALPHABET[61], '9');
        assert_eq!(ALPHABET[62], '-');
        assert_eq!(ALPHABET[63], '_');
        for (i, &c) in ALPHABET.iter().enumerate() {
            assert_eq!(symbol_index(c), Some(i));
            assert_eq!(symbol_at(i), c);
        }
        assert_eq!(symbol_index('@'), None);
    }

    #[test]
    fn locate_canonical_positions() {
        let q = layout().locate('q').unwrap();
        assert_eq!((q.page, q.row, q.col), (PageId::Lower, 0, 0));
        let upper_q = layout().locate('Q').unwrap();
        assert_eq!((upper_q.page, upper_q.row, upper_q.col), (PageId::Upper, 0, 0));
        let one = layout().locate('1').unwrap();
        assert_eq!((one.page, one.row, one.col), (PageId::Digits, 0, 0));
    }

    #[test]
    fn locate_rejects_non_alphabet() {
        // '@' is on the grid as a filler key but is not a payload symbol.
        assert_eq!(
            layout().locate('@'),
            Err(Error::UnknownSymbol { symbol: '@', index: None })
        );
        assert!(layout().lookup_key('@').is_ok());
    }

    #[test]
    fn reset_sequence_returns_to_initial() {
        let mut state = CursorState::initial(layout());
        state.committed_count = 1;
        for cmd in [Up, Up, Up, Up, Ok] {
            state = state.apply(cmd, layout());
        }
        assert_eq!(state.position, Position::Grid { row: 0, col: 0 });
        assert_eq!(state.page, PageId::Lower);
        assert_eq!(state.typed, "");
    }

    #[test]
    fn up_from_top_row_clamps_before_first_commit() {
        let state = CursorState::initial(layout());
        assert_eq!(state.committed_count, 0);
        let after = state.apply(Up, layout());
        assert_eq!(after.position, Position::Grid { row: 0, col: 0 });
    }

    #[test]
    fn ok_commits_in_place() {
        let state = CursorState::initial(layout());
        let after = state.apply(Ok, layout());
        assert_eq!(after.typed, "q");
        assert_eq!(after.committed_count, 1);
        assert_eq!(after.position, Position::Grid { row: 0, col: 0 });
        assert_eq!(after.page, PageId::Lower);
    }

    #[test]
    fn ok_on_switch_key_lands_on_new_initial() {
        let (r, c) = layout().switch_key(PageId::Lower, PageId::Upper).unwrap();
        let state = CursorState {
            page: PageId::Lower,
            position: Position::Grid { row: r, col: c },
            typed: String::new(),
            committed_count: 0,
        };
        let after = state.apply(Ok, layout());
        assert_eq!(after.page, PageId::Upper);
        assert_eq!(after.position, Position::Grid { row: 0, col: 0 });
        assert_eq!(after.typed, "");
        // the new initial key is 'Q'
        let next = after.apply(Ok, layout());
        assert_eq!(next.typed, "Q");
    }

    #[test]
    fn decode_empty_stream_is_empty() {
        assert_eq!(decode_command_stream(&[], layout()), "");
    }

    #[test]
    fn session_commands_do_not_move_cursor() {
        let state = CursorState::initial(layout());
        for cmd in [Source, Home, OpenBrowser, Back] {
            assert_eq!(state.apply(cmd, layout()), state);
        }
    }

    #[test]
    fn layout_roundtrips_through_json() {
        let json = layout().to_json();
        let reparsed = ImeLayout::from_json(&json).unwrap();
        assert_eq!(reparsed.to_json(), json);
    }

    #[test]
    fn layout_rejects_duplicate_alphabet_symbol() {
        let mut json: serde_json::Value =
            serde_json::from_str(include_str!("../data/layout_v1.json")).unwrap();
        json["pages"][3]["grid"][0][0] = serde_json::Value::String("q".into());
        let err = ImeLayout::from_json(&json.to_string()).unwrap_err();
        assert_eq!(err.code(), "INVALID_LAYOUT");
    }

    #[test]
    fn layout_rejects_five_rows() {
        let mut json: serde_json::Value =
            serde_json::from_str(include_str!("../data/layout_v1.json")).unwrap();
        let extra = serde_json::json!(["^", "`", "{", "}", "|", "<", ">", "[", "]", "~"]);
        json["pages"][0]["grid"].as_array_mut().unwrap().push(extra);
        let err = ImeLayout::from_json(&json.to_string()).unwrap_err();
        assert_eq!(err.code(), "INVALID_LAYOUT");
    }
}
