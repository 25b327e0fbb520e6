//! Decorated path and halftwist expressions.
//!
//! ```text
//! expr   := base ( '^' conj+ )?
//! base   := side? ('z' | 'Z') exponent? detour* exponent? '[' label ',' label ']'
//! side   := '_' (below the real line) | '~' (above it)
//! detour := '(' label ')' ( '-(' label ')' )?
//! conj   := side? 'Z' exponent? detour* '[' label ',' label ']'
//! label  := digits '\''?
//! ```
//!
//! `z` is a path and `Z` its halftwist. A detour `(a)` sends the path to
//! the other side of puncture `a`; `(a)-(b)` does so for every puncture
//! from `a` to `b`. `b ^ C1 C2` is `b` carried by `C1`, then by `C2`.
//!
//! Labels name punctures through a [`LabelMap`]. A primed label `7'` is
//! the conjugate of `7`; the pair occupies two adjacent slots, `7` first.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::braid::{Band, BraidError, BraidWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NotationError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error("detour {0} is not strictly between the endpoints")]
    DetourOutside(Label),
    #[error("bad label map: {0}")]
    BadLabels(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Braid(#[from] BraidError),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Label {
    pub number: u32,
    pub prime: bool,
}

impl Label {
    pub fn real(number: u32) -> Self {
        Label { number, prime: false }
    }

    pub fn primed(number: u32) -> Self {
        Label { number, prime: true }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.number, if self.prime { "'" } else { "" })
    }
}

impl std::str::FromStr for Label {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, NotationError> {
        let s = s.trim();
        let (digits, prime) = match s.strip_suffix('\'') {
            Some(d) => (d, true),
            None => (s, false),
        };
        let number = digits
            .parse()
            .map_err(|_| NotationError::Syntax { pos: 0, msg: format!("bad label `{s}`") })?;
        Ok(Label { number, prime })
    }
}

/// Puncture names in slot order (slot = position in the list, from 1).
/// A primed label is only a name; which pairs are conjugate complex points
/// is recorded separately.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabelMap {
    labels: Vec<Label>,
    slots: HashMap<Label, usize>,
    complex: BTreeSet<u32>,
}

impl LabelMap {
    pub fn new(labels: Vec<Label>) -> Result<Self, NotationError> {
        let mut slots = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if slots.insert(*l, i + 1).is_some() {
                return Err(NotationError::BadLabels(format!("label {l} repeated")));
            }
        }
        for (i, l) in labels.iter().enumerate() {
            if l.prime {
                let plus = Label::real(l.number);
                if slots.get(&plus) != Some(&i) {
                    return Err(NotationError::BadLabels(format!("{l} must directly follow {plus}")));
                }
            }
        }
        Ok(LabelMap { labels, slots, complex: BTreeSet::new() })
    }

    /// Mark the pairs `k, k'` as conjugate complex points.
    pub fn with_complex(mut self, numbers: &[u32]) -> Result<Self, NotationError> {
        for &k in numbers {
            if !self.slots.contains_key(&Label::primed(k)) {
                return Err(NotationError::BadLabels(format!("no pair {k},{k}'")));
            }
            self.complex.insert(k);
        }
        Ok(self)
    }

    pub fn complex_pairs(&self) -> impl Iterator<Item = u32> + '_ {
        self.complex.iter().copied()
    }

    /// `1..=n`.
    pub fn standard(n: usize) -> Self {
        LabelMap::new((1..=n as u32).map(Label::real).collect()).unwrap()
    }

    /// Reals `1..=r`, then the model's pairs as `r+1, (r+1)', r+2, ...`.
    pub fn for_model(real: usize, pairs: usize) -> Self {
        let mut labels: Vec<Label> = (1..=real as u32).map(Label::real).collect();
        for p in 0..pairs as u32 {
            labels.push(Label::real(real as u32 + 1 + p));
            labels.push(Label::primed(real as u32 + 1 + p));
        }
        let pairs: Vec<u32> = (0..pairs as u32).map(|p| real as u32 + 1 + p).collect();
        LabelMap::new(labels).and_then(|m| m.with_complex(&pairs)).unwrap()
    }

    /// Comma separated list, e.g. `1,2,3,7,7',9`.
    pub fn parse(text: &str) -> Result<Self, NotationError> {
        let labels = text.split(',').map(|s| s.parse()).collect::<Result<Vec<Label>, _>>()?;
        LabelMap::new(labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn slot(&self, l: &Label) -> Result<usize, NotationError> {
        self.slots.get(l).copied().ok_or(NotationError::UnknownLabel(*l))
    }

    pub fn label(&self, slot: usize) -> Label {
        self.labels[slot - 1]
    }

    /// Whether the slot holds a member of a conjugate pair.
    pub fn is_complex(&self, slot: usize) -> bool {
        self.complex.contains(&self.label(slot).number)
    }
}

impl fmt::Display for LabelMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Kind {
    Path,
    Halftwist,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Side {
    Below,
    Above,
    Plain,
}

/// `(from)` or `(from)-(to)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Detour {
    pub from: Label,
    pub to: Option<Label>,
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct DecoratedExpr {
    pub kind: Kind,
    pub side: Side,
    pub detours: Vec<Detour>,
    pub left: Label,
    pub right: Label,
    pub exponent: i32,
    pub conjugators: Vec<DecoratedExpr>,
}

impl DecoratedExpr {
    pub fn simple(kind: Kind, side: Side, left: Label, right: Label, exponent: i32) -> Self {
        DecoratedExpr { kind, side, detours: Vec::new(), left, right, exponent, conjugators: Vec::new() }
    }

    fn render_base(&self, out: &mut String) {
        match self.side {
            Side::Below => out.push('_'),
            Side::Above => out.push('~'),
            Side::Plain => {}
        }
        out.push(if self.kind == Kind::Path { 'z' } else { 'Z' });
        if self.exponent != 1 {
            out.push_str(&self.exponent.to_string());
        }
        for d in &self.detours {
            out.push_str(&format!("({})", d.from));
            if let Some(t) = d.to {
                out.push_str(&format!("-({t})"));
            }
        }
        out.push_str(&format!("[{},{}]", self.left, self.right));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_base(&mut out);
        if !self.conjugators.is_empty() {
            out.push_str(" ^");
            for c in &self.conjugators {
                out.push(' ');
                c.render_base(&mut out);
            }
        }
        out
    }
}

impl fmt::Display for DecoratedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, NotationError> {
        Err(NotationError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), NotationError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn integer(&mut self) -> Option<i32> {
        let start = self.pos;
        if self.peek() == Some('-') && self.src[self.pos + 1..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        self.src[start..self.pos].parse().ok()
    }

    fn label(&mut self) -> Result<Label, NotationError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a label");
        }
        let number = match self.src[start..self.pos].parse() {
            Ok(v) => v,
            Err(_) => return self.err("label too large"),
        };
        let prime = self.eat('\'');
        self.skip_ws();
        Ok(Label { number, prime })
    }

    fn base(&mut self) -> Result<DecoratedExpr, NotationError> {
        let side = if self.eat('_') {
            Side::Below
        } else if self.eat('~') {
            Side::Above
        } else {
            Side::Plain
        };
        let kind = if self.eat('z') {
            Kind::Path
        } else if self.eat('Z') {
            Kind::Halftwist
        } else {
            return self.err("expected `z` or `Z`");
        };
        let mut exponent = self.integer();
        let mut detours = Vec::new();
        while self.eat('(') {
            let from = self.label()?;
            self.expect(')')?;
            let mut to = None;
            if self.src[self.pos..].starts_with("-(") {
                self.pos += 2;
                to = Some(self.label()?);
                self.expect(')')?;
            }
            detours.push(Detour { from, to });
        }
        if exponent.is_none() {
            exponent = self.integer();
        }
        self.expect('[')?;
        let left = self.label()?;
        self.expect(',')?;
        let right = self.label()?;
        self.expect(']')?;
        let exponent = exponent.unwrap_or(1);
        if kind == Kind::Path && exponent != 1 {
            return self.err("paths carry no exponent");
        }
        if exponent == 0 {
            return self.err("zero exponent");
        }
        if left == right {
            return self.err("endpoints coincide");
        }
        Ok(DecoratedExpr { kind, side, detours, left, right, exponent, conjugators: Vec::new() })
    }

    fn expr(&mut self) -> Result<DecoratedExpr, NotationError> {
        self.skip_ws();
        let mut e = self.base()?;
        self.skip_ws();
        if self.eat('^') {
            loop {
                self.skip_ws();
                if self.peek().is_none() {
                    break;
                }
                let c = self.base()?;
                if c.kind != Kind::Halftwist {
                    return self.err("conjugators must be halftwists");
                }
                e.conjugators.push(c);
            }
            if e.conjugators.is_empty() {
                return self.err("empty conjugator list");
            }
        }
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("trailing input");
        }
        Ok(e)
    }
}

/// Parse without resolving labels.
pub fn parse_expr(text: &str) -> Result<DecoratedExpr, NotationError> {
    Parser { src: text, pos: 0 }.expr()
}

/// Parse and check every label against `labels`.
pub fn parse(text: &str, labels: &LabelMap) -> Result<DecoratedExpr, NotationError> {
    let e = parse_expr(text)?;
    resolve(&e, labels)?;
    Ok(e)
}

/// Slot sides of a monotone path: `true` = passes below.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonotonePath {
    pub left: usize,
    pub right: usize,
    pub below: Vec<bool>,
}

impl MonotonePath {
    /// The chord `(left, left+1)` dragged over the intermediate slots.
    pub fn to_band(&self, strands: usize) -> Result<Band, NotationError> {
        let letters = self
            .below
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let s = (self.left + 1 + i) as i32;
                if b {
                    s
                } else {
                    -s
                }
            })
            .collect();
        Ok(Band::new(self.left, self.left + 1, BraidWord::new(strands, letters)?)?)
    }
}

/// Resolution of one expression; `defaulted` marks a plain letter whose
/// side at undecorated punctures had to be assumed.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub band: Band,
    pub exponent: i32,
    pub defaulted: bool,
}

fn monotone(e: &DecoratedExpr, labels: &LabelMap) -> Result<(MonotonePath, bool), NotationError> {
    let a = labels.slot(&e.left)?;
    let b = labels.slot(&e.right)?;
    let (lo, hi) = (a.min(b), a.max(b));
    // A plain letter with detours reads like an underlined one.
    let main_below = e.side != Side::Above;
    let mut below = vec![main_below; hi - lo - 1];
    for d in &e.detours {
        let s = labels.slot(&d.from)?;
        let t = match d.to {
            Some(t) => labels.slot(&t)?,
            None => s,
        };
        for x in s.min(t)..=s.max(t) {
            if x <= lo || x >= hi {
                return Err(NotationError::DetourOutside(labels.label(x)));
            }
            below[x - lo - 1] = !main_below;
        }
    }
    let defaulted = e.side == Side::Plain && hi - lo > 1;
    Ok((MonotonePath { left: lo, right: hi, below }, defaulted))
}

fn resolve(e: &DecoratedExpr, labels: &LabelMap) -> Result<Resolved, NotationError> {
    let n = labels.len();
    let (path, mut defaulted) = monotone(e, labels)?;
    let mut band = path.to_band(n)?;
    for c in &e.conjugators {
        if !c.conjugators.is_empty() {
            return Err(NotationError::Invalid("nested conjugators".into()));
        }
        let (cp, cd) = monotone(c, labels)?;
        defaulted |= cd;
        let h = cp.to_band(n)?.halftwist().power(c.exponent);
        band = band.transported(&h);
    }
    Ok(Resolved { band, exponent: e.exponent, defaulted })
}

/// Band and exponent of an expression.
pub fn to_band(e: &DecoratedExpr, labels: &LabelMap) -> Result<(Band, i32), NotationError> {
    let r = resolve(e, labels)?;
    Ok((r.band, r.exponent))
}

pub fn to_band_flagged(e: &DecoratedExpr, labels: &LabelMap) -> Result<Resolved, NotationError> {
    resolve(e, labels)
}

/// Express a monotone path in notation with the fewest detours; adjacent
/// chords are printed plain.
pub fn describe_monotone(p: &MonotonePath, kind: Kind, exponent: i32, labels: &LabelMap) -> DecoratedExpr {
    let left = labels.label(p.left);
    let right = labels.label(p.right);
    if p.below.is_empty() {
        return DecoratedExpr::simple(kind, Side::Plain, left, right, exponent);
    }
    let n_below = p.below.iter().filter(|&&b| b).count();
    let main_below = 2 * n_below >= p.below.len();
    let side = if main_below { Side::Below } else { Side::Above };
    let mut detours: Vec<Detour> = Vec::new();
    let mut i = 0;
    while i < p.below.len() {
        if p.below[i] != main_below {
            let mut j = i;
            while j + 1 < p.below.len() && p.below[j + 1] != main_below {
                j += 1;
            }
            let from = labels.label(p.left + 1 + i);
            if j - i >= 2 {
                detours.push(Detour { from, to: Some(labels.label(p.left + 1 + j)) });
            } else {
                for x in i..=j {
                    detours.push(Detour { from: labels.label(p.left + 1 + x), to: None });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    DecoratedExpr { kind, side, detours, left, right, exponent, conjugators: Vec::new() }
}
