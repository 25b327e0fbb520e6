//! From a table of singular fibers to the braid monodromy factorization.
//!
//! Rows are listed from the base point outwards. The model to the right of
//! row `j` is the model to the left of row `j-1`; the first row sits next
//! to the base fiber, whose model is given in the header. For a row of
//! type a₁, b or c the skeleton lives just right of the singular fiber and
//! is carried by `δ_{j-1} … δ_1` and then into the base fiber. For a₂ the
//! skeleton lives just left of it and `δ_j` is applied first.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::braid::{block_halftwist, Band, BraidError, BraidWord};
use crate::moves::{realize_move_oriented, straight_motion, Model, MoveError, MoveKind, Orientation, Q};
use crate::notation::{LabelMap, NotationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("row j={j}: {msg}")]
    Row { j: usize, msg: String },
    #[error("label map does not fit model {model}: {msg}")]
    Labels { model: String, msg: String },
    #[error("no row j={0}")]
    NoRow(usize),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Notation(#[from] NotationError),
}

impl EngineError {
    /// Parse failures as opposed to semantic ones.
    pub fn is_parse(&self) -> bool {
        matches!(self, EngineError::Parse { .. } | EngineError::Notation(NotationError::Syntax { .. }))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum SingType {
    /// Branch point whose real branches open to the right.
    A1,
    /// Branch point whose real branches open to the left.
    A2,
    /// Tangency of a line and a conic.
    B,
    /// Transversal crossing.
    C,
}

impl fmt::Display for SingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SingType::A1 => "a1",
            SingType::A2 => "a2",
            SingType::B => "b",
            SingType::C => "c",
        })
    }
}

impl FromStr for SingType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "a1" => Ok(SingType::A1),
            "a2" => Ok(SingType::A2),
            "b" => Ok(SingType::B),
            "c" => Ok(SingType::C),
            _ => Err(format!("unknown singularity type `{s}`")),
        }
    }
}

/// Branch point 1, node 2, cusp 3, tangency 4; both kinds of branch
/// point give 1.
pub fn epsilon_rule(t: SingType) -> i32 {
    match t {
        SingType::A1 | SingType::A2 => 1,
        SingType::B => 4,
        SingType::C => 2,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum SkeletonSpec {
    Chord(usize, usize),
    /// The two real points `k`, `k+1` that become complex.
    ComplexChord(usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct SingularityRow {
    pub j: usize,
    pub sing_type: SingType,
    pub lpair: (usize, usize),
    pub delta: MoveKind,
}

impl SingularityRow {
    pub fn skeleton(&self) -> SkeletonSpec {
        match self.sing_type {
            SingType::A2 => SkeletonSpec::ComplexChord(self.lpair.0),
            _ => SkeletonSpec::Chord(self.lpair.0, self.lpair.1),
        }
    }

    fn validate(&self) -> Result<(), EngineError> {
        let err = |msg: &str| Err(EngineError::Row { j: self.j, msg: msg.to_string() });
        let (k, l) = self.lpair;
        if k < 1 || l <= k {
            return err("L-pair must satisfy 1 <= k < l");
        }
        if self.sing_type != SingType::C && l != k + 1 {
            return err("a1, a2 and b rows need l = k+1");
        }
        match (self.sing_type, self.delta) {
            (SingType::B, MoveKind::BlockTwist { k: a, l: b, r: 2 }) | (SingType::C, MoveKind::BlockTwist { k: a, l: b, r: 1 }) => {
                if (a, b) != (k, l) {
                    return err("block twist must span the L-pair");
                }
            }
            (SingType::B, _) => return err("b rows take D<k,l>^2"),
            (SingType::C, _) => return err("c rows take D<k,l>^1"),
            (t, mv) => {
                let lowering = matches!(mv.levels(), Some((a, b)) if a > b);
                let raising = matches!(mv.levels(), Some((a, b)) if a < b);
                if (t == SingType::A1 && !lowering) || (t == SingType::A2 && !raising) {
                    return err("a1 rows take a level lowering move, a2 rows a raising one");
                }
                if mv.parameter() != k {
                    return err("move parameter must equal k");
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for SingularityRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "j={} type={} lpair=({},{}) delta={}",
            self.j, self.sing_type, self.lpair.0, self.lpair.1, self.delta
        )
    }
}

/// Rows in order of distance from the base point, plus the base model
/// and the names of the base fiber's punctures.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SingularityTable {
    pub n: usize,
    pub model: Model,
    pub labels: LabelMap,
    pub rows: Vec<SingularityRow>,
}

/// A table file may carry a second, reversed table and the directives that
/// glue the two halves of a symmetric curve together.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TableFile {
    pub table: SingularityTable,
    pub reversed: Option<SingularityTable>,
    pub s2_mode: bool,
    pub rho: Option<Vec<MoveKind>>,
}

impl SingularityTable {
    pub fn new(n: usize, model: Model, labels: LabelMap, rows: Vec<SingularityRow>) -> Result<Self, EngineError> {
        let t = SingularityTable { n, model, labels, rows };
        t.models()?;
        Ok(t)
    }

    /// Models to the left and right of each row.
    pub fn models(&self) -> Result<Vec<(Model, Model)>, EngineError> {
        if self.labels.len() != self.n || self.model.n != self.n {
            return Err(EngineError::Labels { model: self.model.name(), msg: "wrong number of punctures".into() });
        }
        let complex = (1..=self.n).filter(|&s| self.labels.is_complex(s)).count();
        if complex != self.model.level() {
            return Err(EngineError::Labels {
                model: self.model.name(),
                msg: format!("{complex} complex labels for level {}", self.model.level()),
            });
        }
        let mut right = self.model;
        let mut out = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            row.validate()?;
            let left = row.delta.source(&right).map_err(|e| EngineError::Row { j: row.j, msg: e.to_string() })?;
            if row.sing_type == SingType::A2 {
                if row.lpair.1 > left.real_count() {
                    return Err(EngineError::Row { j: row.j, msg: "L-pair beyond the real points".into() });
                }
            } else if row.lpair.1 > right.real_count() {
                return Err(EngineError::Row { j: row.j, msg: "L-pair beyond the real points".into() });
            }
            out.push((left, right));
            right = left;
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<TableFile, EngineError> {
        parse_table_file(text)
    }

    pub fn header(&self) -> String {
        let mut h = format!("n={} model={} labels={}", self.n, self.model.name(), self.labels);
        let complex: Vec<String> = self.labels.complex_pairs().map(|k| k.to_string()).collect();
        if !complex.is_empty() {
            h.push_str(&format!(" complex={}", complex.join(",")));
        }
        h
    }
}

impl fmt::Display for SingularityTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header())?;
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Display for TableFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.table.header())?;
        if self.s2_mode {
            writeln!(f, "s2-mode")?;
        }
        if let Some(rho) = &self.rho {
            let parts: Vec<String> = rho.iter().map(|m| m.to_string()).collect();
            writeln!(f, "rho={}", parts.join(" "))?;
        }
        for r in &self.table.rows {
            writeln!(f, "{r}")?;
        }
        if let Some(rev) = &self.reversed {
            writeln!(f, "reversed {}", rev.header())?;
            for r in &rev.rows {
                writeln!(f, "{r}")?;
            }
        }
        Ok(())
    }
}

fn parse_header(line: usize, text: &str) -> Result<(usize, String, Option<LabelMap>), EngineError> {
    let perr = |msg: String| EngineError::Parse { line, msg };
    let mut n = None;
    let mut model = None;
    let mut labels = None;
    let mut complex = Vec::new();
    for tok in text.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| perr(format!("expected key=value, found `{tok}`")))?;
        match k {
            "n" => n = Some(v.parse::<usize>().map_err(|_| perr(format!("bad n `{v}`")))?),
            "model" => model = Some(v.to_string()),
            "labels" => labels = Some(LabelMap::parse(v).map_err(|e| perr(e.to_string()))?),
            "complex" => {
                for c in v.split(',') {
                    complex.push(c.parse::<u32>().map_err(|_| perr(format!("bad complex pair `{c}`")))?);
                }
            }
            _ => return Err(perr(format!("unknown header key `{k}`"))),
        }
    }
    let n = n.ok_or_else(|| perr("header needs n=".into()))?;
    let labels = match labels {
        Some(l) => Some(l.with_complex(&complex).map_err(|e| perr(e.to_string()))?),
        None if complex.is_empty() => None,
        None => return Err(perr("complex= needs labels=".into())),
    };
    Ok((n, model.unwrap_or_else(|| "K1".into()), labels))
}

fn parse_row(line: usize, text: &str) -> Result<SingularityRow, EngineError> {
    let perr = |msg: String| EngineError::Parse { line, msg };
    let mut j = None;
    let mut t = None;
    let mut lpair = None;
    let mut delta = None;
    for tok in text.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| perr(format!("expected key=value, found `{tok}`")))?;
        match k {
            "j" => j = Some(v.parse::<usize>().map_err(|_| perr(format!("bad j `{v}`")))?),
            "type" => t = Some(v.parse::<SingType>().map_err(perr)?),
            "lpair" => {
                lpair = Some(if let Some(p) = v.strip_prefix('P') {
                    let k: usize = p.parse().map_err(|_| perr(format!("bad lpair `{v}`")))?;
                    (k, k + 1)
                } else {
                    let inner = v
                        .strip_prefix('(')
                        .and_then(|s| s.strip_suffix(')'))
                        .ok_or_else(|| perr(format!("bad lpair `{v}`")))?;
                    let (a, b) = inner.split_once(',').ok_or_else(|| perr(format!("bad lpair `{v}`")))?;
                    let a = a.trim().parse().map_err(|_| perr(format!("bad lpair `{v}`")))?;
                    let b = b.trim().parse().map_err(|_| perr(format!("bad lpair `{v}`")))?;
                    (a, b)
                })
            }
            "delta" => delta = Some(v.parse::<MoveKind>().map_err(|e| perr(e.to_string()))?),
            _ => return Err(perr(format!("unknown row key `{k}`"))),
        }
    }
    Ok(SingularityRow {
        j: j.ok_or_else(|| perr("row needs j=".into()))?,
        sing_type: t.ok_or_else(|| perr("row needs type=".into()))?,
        lpair: lpair.ok_or_else(|| perr("row needs lpair=".into()))?,
        delta: delta.ok_or_else(|| perr("row needs delta=".into()))?,
    })
}

/// Blank lines and `#` comments are ignored.
pub fn parse_table_file(text: &str) -> Result<TableFile, EngineError> {
    struct Part {
        line: usize,
        n: usize,
        model: String,
        labels: Option<LabelMap>,
        rows: Vec<SingularityRow>,
    }
    let mut parts: Vec<Part> = Vec::new();
    let mut s2_mode = false;
    let mut rho = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap().trim();
        if l.is_empty() {
            continue;
        }
        if l.starts_with("j=") {
            let row = parse_row(line, l)?;
            match parts.last_mut() {
                Some(p) => p.rows.push(row),
                None => return Err(EngineError::Parse { line, msg: "row before header".into() }),
            }
        } else if l == "s2-mode" {
            s2_mode = true;
        } else if let Some(r) = l.strip_prefix("rho=") {
            let moves = r
                .split_whitespace()
                .map(|m| m.parse::<MoveKind>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EngineError::Parse { line, msg: e.to_string() })?;
            rho = Some(moves);
        } else if let Some(h) = l.strip_prefix("reversed") {
            if parts.len() != 1 {
                return Err(EngineError::Parse { line, msg: "`reversed` must follow the main table".into() });
            }
            let (n, model, labels) = if h.trim().is_empty() {
                (parts[0].n, "K1".to_string(), None)
            } else {
                parse_header(line, h)?
            };
            parts.push(Part { line, n, model, labels, rows: Vec::new() });
        } else {
            if !parts.is_empty() {
                return Err(EngineError::Parse { line, msg: "second header".into() });
            }
            let (n, model, labels) = parse_header(line, l)?;
            parts.push(Part { line, n, model, labels, rows: Vec::new() });
        }
    }
    let mut tables = Vec::new();
    for p in parts {
        let model = Model::parse_name(p.n, &p.model).map_err(|e| EngineError::Parse { line: p.line, msg: e.to_string() })?;
        let labels = p.labels.unwrap_or_else(|| LabelMap::standard(p.n));
        tables.push(SingularityTable::new(p.n, model, labels, p.rows)?);
    }
    let mut it = tables.into_iter();
    let table = it.next().ok_or(EngineError::Parse { line: 0, msg: "empty table file".into() })?;
    let reversed = it.next();
    if s2_mode && reversed.is_none() {
        return Err(EngineError::Parse { line: 0, msg: "s2-mode needs a reversed table".into() });
    }
    Ok(TableFile { table, reversed, s2_mode, rho })
}

/// One factor `H(band)^epsilon` of the factorization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Factor {
    pub band: Band,
    pub epsilon: i32,
    pub origin_j: usize,
}

impl Factor {
    pub fn braid(&self) -> BraidWord {
        self.band.halftwist().power(self.epsilon)
    }
}

/// Motion taking the model's punctures to the base fiber's positions:
/// reals in label order, each pair centred between its two slots.
pub fn base_motion(model: &Model, labels: &LabelMap) -> Result<BraidWord, EngineError> {
    let n = model.n;
    let from = model.points();
    let mut real_targets = Vec::new();
    let mut pair_targets = Vec::new();
    let mut s = 1;
    while s <= n {
        if labels.is_complex(s) {
            let x = Q::from_integer(s as i64) + Q::new(1, 2);
            pair_targets.push((x, Q::from_integer(1)));
            pair_targets.push((x, Q::from_integer(-1)));
            s += 2;
        } else {
            real_targets.push((Q::from_integer(s as i64), Q::from_integer(0)));
            s += 1;
        }
    }
    if real_targets.len() != model.real_count() {
        return Err(EngineError::Labels { model: model.name(), msg: "real labels do not match the model".into() });
    }
    let to: Vec<(Q, Q)> = real_targets.into_iter().chain(pair_targets).collect();
    Ok(straight_motion(n, &from, &to)?)
}

/// Precomputed transports of a table.
pub struct Sweep<'a> {
    table: &'a SingularityTable,
    models: Vec<(Model, Model)>,
    deltas: Vec<BraidWord>,
    /// `prefix[i]` carries the model right of row `i` to the base fiber.
    prefix: Vec<BraidWord>,
}

impl<'a> Sweep<'a> {
    pub fn new(table: &'a SingularityTable, orientation: Orientation) -> Result<Self, EngineError> {
        let models = table.models()?;
        let base = base_motion(&table.model, &table.labels)?;
        let mut deltas = Vec::with_capacity(table.rows.len());
        for (row, (left, _)) in table.rows.iter().zip(&models) {
            let (w, _) = realize_move_oriented(&row.delta, left, orientation)
                .map_err(|e| EngineError::Row { j: row.j, msg: e.to_string() })?;
            deltas.push(w);
        }
        let mut prefix = Vec::with_capacity(table.rows.len());
        let mut acc = base;
        for d in &deltas {
            prefix.push(acc.clone());
            let mut next = d.clone();
            next.push_word(&acc);
            acc = next;
        }
        Ok(Sweep { table, models, deltas, prefix })
    }

    fn index(&self, j: usize) -> Result<usize, EngineError> {
        self.table.rows.iter().position(|r| r.j == j).ok_or(EngineError::NoRow(j))
    }

    /// Skeleton chords of row `j` carried to the base fiber.
    pub fn lvc(&self, j: usize) -> Result<Vec<Band>, EngineError> {
        let i = self.index(j)?;
        let row = &self.table.rows[i];
        let n = self.table.n;
        let mut out = Vec::new();
        match row.skeleton() {
            SkeletonSpec::Chord(k, l) => {
                for s in k..l {
                    out.push(Band::chord(s, s + 1, n)?.transported(&self.prefix[i]));
                }
            }
            SkeletonSpec::ComplexChord(k) => {
                debug_assert!(self.models[i].0.real_count() > k);
                let b = Band::chord(k, k + 1, n)?.transported(&self.deltas[i]);
                out.push(b.transported(&self.prefix[i]));
            }
        }
        Ok(out)
    }

    pub fn factors(&self, j: usize) -> Result<Vec<Factor>, EngineError> {
        let row = &self.table.rows[self.index(j)?];
        let epsilon = epsilon_rule(row.sing_type);
        Ok(self.lvc(j)?.into_iter().map(|band| Factor { band, epsilon, origin_j: j }).collect())
    }

    pub fn all(&self) -> Result<Vec<Factor>, EngineError> {
        let mut out = Vec::new();
        for r in &self.table.rows {
            out.extend(self.factors(r.j)?);
        }
        Ok(out)
    }
}

pub fn lvc(table: &SingularityTable, j: usize) -> Result<Vec<Band>, EngineError> {
    Sweep::new(table, Orientation::Counterclockwise)?.lvc(j)
}

pub fn monodromy_factor(table: &SingularityTable, j: usize) -> Result<Vec<Factor>, EngineError> {
    Sweep::new(table, Orientation::Counterclockwise)?.factors(j)
}

pub fn braid_monodromy(table: &SingularityTable) -> Result<Vec<Factor>, EngineError> {
    Sweep::new(table, Orientation::Counterclockwise)?.all()
}

/// Which side of the real axis the loops of the g-base run on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathSide {
    Below,
    Above,
}

/// Factorization from a base point far to the left. The table's rows are
/// listed from that base point outwards and its types are read from it
/// (so a₁ and a₂ trade places compared with the right hand base point).
/// Seen from the left the semicircles turn clockwise; running the loops
/// above the real axis turns them back, so `PathSide::Above` uses the
/// counterclockwise moves and `PathSide::Below` their mirrors.
pub fn reversed_monodromy(table: &SingularityTable, side: PathSide) -> Result<Vec<Factor>, EngineError> {
    let orientation = match side {
        PathSide::Above => Orientation::Counterclockwise,
        PathSide::Below => Orientation::Clockwise,
    };
    Sweep::new(table, orientation)?.all()
}

/// Carry every factor through the half turn of all `n` punctures.
pub fn rotate_half(factors: &[Factor], n: usize) -> Result<Vec<Factor>, EngineError> {
    let d = if n >= 2 { block_halftwist(1, n, n)? } else { BraidWord::identity(n) };
    Ok(factors.iter().map(|f| Factor { band: f.band.transported(&d), ..f.clone() }).collect())
}

/// Conjugate every factor by `rho⁻¹`.
pub fn conjugate_factorization(factors: &[Factor], rho: &BraidWord) -> Vec<Factor> {
    let r = rho.invert();
    factors.iter().map(|f| Factor { band: f.band.transported(&r), ..f.clone() }).collect()
}

/// Product of block twists, as written in a `rho=` directive.
pub fn moves_word(n: usize, moves: &[MoveKind]) -> Result<BraidWord, EngineError> {
    let mut w = BraidWord::identity(n);
    for m in moves {
        match *m {
            MoveKind::BlockTwist { k, l, r } => w.push_word(&block_halftwist(k, l, n)?.power(r)),
            _ => return Err(EngineError::Parse { line: 0, msg: format!("rho accepts block twists only, found {m}") }),
        }
    }
    Ok(w)
}

/// The whole factorization described by a table file. In s2 mode the
/// reversed half is rotated into the base fiber and conjugated by `ρ⁻¹`.
pub fn run_table_file(file: &TableFile) -> Result<Vec<Factor>, EngineError> {
    let mut out = braid_monodromy(&file.table)?;
    if file.s2_mode {
        let rev = file.reversed.as_ref().expect("checked when parsing");
        let n = file.table.n;
        let back = reversed_monodromy(rev, PathSide::Above)?;
        let rotated = rotate_half(&back, n)?;
        let rho = moves_word(n, file.rho.as_deref().unwrap_or(&[]))?;
        out.extend(conjugate_factorization(&rotated, &rho));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon_rule(SingType::A1), 1);
        assert_eq!(epsilon_rule(SingType::A2), 1);
        assert_eq!(epsilon_rule(SingType::B), 4);
        assert_eq!(epsilon_rule(SingType::C), 2);
    }

    #[test]
    fn row_round_trip() {
        let text = "n=4 model=K1 labels=1,2,3,4\nj=1 type=c lpair=(2,3) delta=D<2,3>^1\n";
        let f = parse_table_file(text).unwrap();
        assert_eq!(f.to_string(), text);
    }

    #[test]
    fn threading_violation() {
        let text = "n=4 model=K1\nj=1 type=a1 lpair=(1,2) delta=D1412<1>\n";
        assert!(matches!(parse_table_file(text), Err(EngineError::Row { j: 1, .. })));
    }

    #[test]
    fn empty_table() {
        let f = parse_table_file("n=3 model=K1").unwrap();
        assert!(braid_monodromy(&f.table).unwrap().is_empty());
    }
}
