//! Model disks and the moves between them.
//!
//! Every model is a configuration in ℂ: `n - 2m` real punctures at
//! `1..=n-2m` and `m` conjugate pairs to their right. K₂ has its pair at
//! `n-1±i`; K₄ has `n-3±i/2` and `n-2±i`; K₆ has `n-5±i/2`, `n-4±i` and
//! `n-3±2i`.
//!
//! Configurations are flattened by a slightly tilted vertical projection
//! (`x - θy`), so the `+i` member of a pair lands just left of its
//! conjugate. A move is realised as a piecewise linear motion of the
//! punctures; each time two projected points pass each other we emit σ
//! (the left point goes underneath) or σ⁻¹. Arithmetic is exact.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::braid::{block_halftwist, Band, BraidError, BraidWord};

/// Exact coordinates of punctures.
pub type Q = Ratio<i64>;

/// Tilt of the flattening projection.
const TILT: (i64, i64) = (1, 1000);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("{mv} needs model {expected} but the current model is {found}")]
    LevelMismatch { mv: String, expected: String, found: String },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("cannot parse move `{0}`")]
    Parse(String),
    #[error("degenerate motion: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Braid(#[from] BraidError),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Model {
    pub n: usize,
    /// Number of conjugate pairs (complex level is twice this).
    pub pairs: usize,
}

impl Model {
    pub fn new(n: usize, pairs: usize) -> Result<Self, MoveError> {
        if pairs > 3 || 2 * pairs > n {
            return Err(MoveError::OutOfRange(format!("K{} with {n} points", 2 * pairs)));
        }
        Ok(Model { n, pairs })
    }

    pub fn real_count(&self) -> usize {
        self.n - 2 * self.pairs
    }

    pub fn level(&self) -> usize {
        2 * self.pairs
    }

    /// `K1`, `K2`, `K4`, `K6`.
    pub fn name(&self) -> String {
        format!("K{}", if self.pairs == 0 { 1 } else { 2 * self.pairs })
    }

    pub fn parse_name(n: usize, s: &str) -> Result<Self, MoveError> {
        let pairs = match s {
            "K1" => 0,
            "K2" => 1,
            "K4" => 2,
            "K6" => 3,
            _ => return Err(MoveError::Parse(s.to_string())),
        };
        Model::new(n, pairs)
    }

    /// Real part and height of each pair, left to right.
    fn anchors(&self) -> Vec<(Q, Q)> {
        let n = self.n as i64;
        let half = Q::new(1, 2);
        match self.pairs {
            0 => vec![],
            1 => vec![(q(n - 1), q(1))],
            2 => vec![(q(n - 3), half), (q(n - 2), q(1))],
            _ => vec![(q(n - 5), half), (q(n - 4), q(1)), (q(n - 3), q(2))],
        }
    }

    /// Puncture coordinates in flattened order.
    pub fn points(&self) -> Vec<(Q, Q)> {
        let mut pts: Vec<(Q, Q)> = (1..=self.real_count()).map(|i| (q(i as i64), Q::zero())).collect();
        for (x, h) in self.anchors() {
            pts.push((x, h));
            pts.push((x, -h));
        }
        pts
    }

    /// Flattened slot of the `+i` member of pair `p` (0-based, left to right).
    pub fn pair_slot(&self, p: usize) -> usize {
        self.real_count() + 2 * p + 1
    }
}

fn q(v: i64) -> Q {
    Q::from_integer(v)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum MoveKind {
    BlockTwist { k: usize, l: usize, r: i32 },
    I2toR(usize),
    RtoI2(usize),
    /// The close (left) pair becomes real.
    I4toI2(usize),
    /// The tall (right) pair becomes real.
    I4toI2Prime(usize),
    I2toI4(usize),
    I6toI4(usize),
    I4toI6(usize),
}

/// Sense of rotation of the moves. Counterclockwise is the standard one;
/// clockwise realisations are the mirror motions.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

impl MoveKind {
    /// Required `(source pairs, target pairs)`, `None` for block twists.
    pub fn levels(&self) -> Option<(usize, usize)> {
        use MoveKind::*;
        match self {
            BlockTwist { .. } => None,
            I2toR(_) => Some((1, 0)),
            RtoI2(_) => Some((0, 1)),
            I4toI2(_) | I4toI2Prime(_) => Some((2, 1)),
            I2toI4(_) => Some((1, 2)),
            I6toI4(_) => Some((3, 2)),
            I4toI6(_) => Some((2, 3)),
        }
    }

    pub fn parameter(&self) -> usize {
        use MoveKind::*;
        match *self {
            BlockTwist { k, .. } => k,
            I2toR(k) | RtoI2(k) | I4toI2(k) | I4toI2Prime(k) | I2toI4(k) | I6toI4(k) | I4toI6(k) => k,
        }
    }

    pub fn with_parameter(&self, k: usize) -> MoveKind {
        use MoveKind::*;
        match *self {
            BlockTwist { l, r, k: k0 } => BlockTwist { k, l: l + k - k0, r },
            I2toR(_) => I2toR(k),
            RtoI2(_) => RtoI2(k),
            I4toI2(_) => I4toI2(k),
            I4toI2Prime(_) => I4toI2Prime(k),
            I2toI4(_) => I2toI4(k),
            I6toI4(_) => I6toI4(k),
            I4toI6(_) => I4toI6(k),
        }
    }

    /// Model reached after the move.
    pub fn target(&self, model: &Model) -> Result<Model, MoveError> {
        match self.levels() {
            None => Ok(*model),
            Some((from, to)) => {
                if model.pairs != from {
                    return Err(MoveError::LevelMismatch {
                        mv: self.to_string(),
                        expected: Model { n: model.n, pairs: from }.name(),
                        found: model.name(),
                    });
                }
                Model::new(model.n, to)
            }
        }
    }

    /// Model the move must start from, given where it ends.
    pub fn source(&self, target: &Model) -> Result<Model, MoveError> {
        match self.levels() {
            None => Ok(*target),
            Some((from, to)) => {
                if target.pairs != to {
                    return Err(MoveError::LevelMismatch {
                        mv: self.to_string(),
                        expected: Model { n: target.n, pairs: to }.name(),
                        found: target.name(),
                    });
                }
                Model::new(target.n, from)
            }
        }
    }

    fn check_range(&self, model: &Model) -> Result<(), MoveError> {
        use MoveKind::*;
        let n = model.n;
        let (k, max) = match *self {
            BlockTwist { k, l, .. } => {
                if k < 1 || l <= k || l > model.real_count() {
                    return Err(MoveError::OutOfRange(format!("{self} in {}", model.name())));
                }
                return Ok(());
            }
            I2toR(k) | RtoI2(k) => (k, n - 1),
            I4toI2(k) | I4toI2Prime(k) | I2toI4(k) => (k, n.saturating_sub(3)),
            I6toI4(k) | I4toI6(k) => (k, n.saturating_sub(5)),
        };
        if k < 1 || k > max {
            return Err(MoveError::OutOfRange(format!("{self} with {n} points")));
        }
        Ok(())
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MoveKind::*;
        match *self {
            BlockTwist { k, l, r } => write!(f, "D<{k},{l}>^{r}"),
            I2toR(k) => write!(f, "D12R<{k}>"),
            RtoI2(k) => write!(f, "DR12<{k}>"),
            I4toI2(k) => write!(f, "D1412<{k}>"),
            I4toI2Prime(k) => write!(f, "D1412'<{k}>"),
            I2toI4(k) => write!(f, "D1214<{k}>"),
            I6toI4(k) => write!(f, "D1614<{k}>"),
            I4toI6(k) => write!(f, "D1416<{k}>"),
        }
    }
}

impl FromStr for MoveKind {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, MoveError> {
        let bad = || MoveError::Parse(s.to_string());
        let s = s.trim();
        let open = s.find('<').ok_or_else(bad)?;
        let close = s.find('>').ok_or_else(bad)?;
        if close < open {
            return Err(bad());
        }
        let (head, inner, tail) = (&s[..open], &s[open + 1..close], &s[close + 1..]);
        if head == "D" {
            let (k, l) = inner.split_once(',').ok_or_else(bad)?;
            let k = k.trim().parse().map_err(|_| bad())?;
            let l = l.trim().parse().map_err(|_| bad())?;
            let r = match tail {
                "" => 1,
                t => t.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?,
            };
            return Ok(MoveKind::BlockTwist { k, l, r });
        }
        if !tail.is_empty() {
            return Err(bad());
        }
        let k: usize = inner.trim().parse().map_err(|_| bad())?;
        Ok(match head {
            "D12R" => MoveKind::I2toR(k),
            "DR12" => MoveKind::RtoI2(k),
            "D1412" => MoveKind::I4toI2(k),
            "D1412'" => MoveKind::I4toI2Prime(k),
            "D1214" => MoveKind::I2toI4(k),
            "D1614" => MoveKind::I6toI4(k),
            "D1416" => MoveKind::I4toI6(k),
            _ => return Err(bad()),
        })
    }
}

/// Flattened positions of a model: slot `s` holds `points()[s-1]`.
pub fn flatten(model: &Model) -> Vec<(usize, (Q, Q))> {
    model.points().into_iter().enumerate().map(|(i, p)| (i + 1, p)).collect()
}

/// The braid of a move and the model it lands in.
pub fn realize_move(mv: &MoveKind, model: &Model) -> Result<(BraidWord, Model), MoveError> {
    realize_move_oriented(mv, model, Orientation::Counterclockwise)
}

pub fn realize_move_oriented(
    mv: &MoveKind,
    model: &Model,
    orientation: Orientation,
) -> Result<(BraidWord, Model), MoveError> {
    let target = mv.target(model)?;
    mv.check_range(model)?;
    if let MoveKind::BlockTwist { k, l, r } = *mv {
        let h = block_halftwist(k, l, model.n)?;
        let h = if orientation == Orientation::Clockwise { h.mirror() } else { h };
        return Ok((h.power(r), target));
    }
    let mut m = Motion::new(model.points());
    let n = model.n as i64;
    let k = mv.parameter() as i64;
    let half = Q::new(1, 2);
    let mid = q(k) + half;
    let real = |x: &(Q, Q)| x.1.is_zero();
    match *mv {
        MoveKind::I2toR(_) => {
            m.stage(|p| (*p == (q(n - 1), q(1))).then_some((mid, half)).or_else(|| (*p == (q(n - 1), q(-1))).then_some((mid, -half))));
            m.stage(|p| (real(p) && p.0 >= q(k)).then(|| (p.0 + 2, p.1)));
            m.land_pair(mid, k);
        }
        MoveKind::RtoI2(_) => {
            m.split_pair(k);
            m.stage(|p| (real(p) && p.0 >= q(k + 2)).then(|| (p.0 - 2, p.1)));
            m.stage(|p| (p.0 == mid).then(|| (q(n - 1), p.1 * 2)));
        }
        MoveKind::I4toI2Prime(_) => {
            m.stage(|p| {
                if p.0 == q(n - 2) {
                    Some((p.0, p.1 / 2))
                } else if p.0 == q(n - 3) && !real(p) {
                    Some((p.0, p.1 * 2))
                } else {
                    None
                }
            });
            m.stage(|p| (p.0 == q(n - 2)).then_some((mid, p.1)));
            m.stage(|p| {
                if p.0 == q(n - 3) && !real(p) {
                    Some((q(n - 1), p.1))
                } else if real(p) && p.0 >= q(k) {
                    Some((p.0 + 2, p.1))
                } else {
                    None
                }
            });
            m.land_pair(mid, k);
        }
        MoveKind::I4toI2(_) => {
            m.stage(|p| (p.0 == q(n - 3) && !real(p)).then_some((mid, p.1)));
            m.stage(|p| {
                if p.0 == q(n - 2) && !real(p) {
                    Some((q(n - 1), p.1))
                } else if real(p) && p.0 >= q(k) {
                    Some((p.0 + 2, p.1))
                } else {
                    None
                }
            });
            m.land_pair(mid, k);
        }
        MoveKind::I2toI4(_) => {
            m.split_pair(k);
            m.stage(|p| {
                if p.0 == q(n - 1) {
                    Some((q(n - 2), p.1))
                } else if real(p) && p.0 >= q(k + 2) {
                    Some((p.0 - 2, p.1))
                } else {
                    None
                }
            });
            m.stage(|p| (p.0 == mid).then_some((q(n - 3), p.1)));
        }
        MoveKind::I6toI4(_) => {
            m.stage(|p| {
                if p.0 == q(n - 5) && !real(p) {
                    Some((p.0, p.1 * 2))
                } else if p.0 == q(n - 3) {
                    Some((p.0, p.1 / 4))
                } else {
                    None
                }
            });
            m.stage(|p| (p.0 == q(n - 3)).then_some((mid, p.1)));
            m.stage(|p| {
                if p.0 == q(n - 4) && !real(p) {
                    Some((q(n - 2), p.1))
                } else if p.0 == q(n - 5) && !real(p) {
                    Some((q(n - 3), p.1 / 2))
                } else if real(p) && p.0 >= q(k) {
                    Some((p.0 + 2, p.1))
                } else {
                    None
                }
            });
            m.land_pair(mid, k);
        }
        MoveKind::I4toI6(_) => {
            m.split_pair(k);
            m.stage(|p| {
                if real(p) && p.0 >= q(k + 2) {
                    Some((p.0 - 2, p.1))
                } else if p.0 == q(n - 3) {
                    Some((q(n - 5), p.1 * 2))
                } else if p.0 == q(n - 2) {
                    Some((q(n - 4), p.1))
                } else {
                    None
                }
            });
            m.stage(|p| (p.0 == mid).then_some((q(n - 3), p.1)));
            m.stage(|p| {
                if p.0 == q(n - 3) {
                    Some((p.0, p.1 * 4))
                } else if p.0 == q(n - 5) {
                    Some((p.0, p.1 / 2))
                } else {
                    None
                }
            });
        }
        MoveKind::BlockTwist { .. } => unreachable!(),
    }
    let word = m.finish(model.n, &target.points(), orientation)?;
    Ok((word, target))
}

/// Carry a band through a move.
pub fn apply_move(mv: &MoveKind, model: &Model, b: &Band) -> Result<Band, MoveError> {
    let (w, _) = realize_move(mv, model)?;
    Ok(b.transported(&w))
}

/// Braid of moving every point of `from` straight to the same index of `to`.
pub fn straight_motion(n: usize, from: &[(Q, Q)], to: &[(Q, Q)]) -> Result<BraidWord, MoveError> {
    let mut m = Motion::new(from.to_vec());
    m.stages.push(to.to_vec());
    m.current = to.to_vec();
    m.finish(n, to, Orientation::Counterclockwise)
}

/// Piecewise linear motion of labelled points; every stage moves all
/// points along straight segments simultaneously.
struct Motion {
    start: Vec<(Q, Q)>,
    current: Vec<(Q, Q)>,
    stages: Vec<Vec<(Q, Q)>>,
}

impl Motion {
    fn new(start: Vec<(Q, Q)>) -> Self {
        Motion { current: start.clone(), start, stages: Vec::new() }
    }

    fn stage(&mut self, f: impl Fn(&(Q, Q)) -> Option<(Q, Q)>) {
        let next: Vec<(Q, Q)> = self.current.iter().map(|p| f(p).unwrap_or(*p)).collect();
        self.stages.push(next.clone());
        self.current = next;
    }

    /// Real points `k`, `k+1` turn a quarter counterclockwise about `k+½`.
    fn split_pair(&mut self, k: i64) {
        let mid = q(k) + Q::new(1, 2);
        let h = Q::new(1, 2);
        self.stage(|p| {
            if *p == (q(k), Q::zero()) {
                Some((mid, -h))
            } else if *p == (q(k + 1), Q::zero()) {
                Some((mid, h))
            } else {
                None
            }
        });
    }

    /// The pair at `k+½±½i` turns a quarter counterclockwise onto `k`, `k+1`.
    fn land_pair(&mut self, mid: Q, k: i64) {
        self.stage(|p| {
            if p.0 == mid && p.1.is_positive() {
                Some((q(k), Q::zero()))
            } else if p.0 == mid && p.1.is_negative() {
                Some((q(k + 1), Q::zero()))
            } else {
                None
            }
        });
    }

    fn finish(self, n: usize, expected: &[(Q, Q)], orientation: Orientation) -> Result<BraidWord, MoveError> {
        let flip = |p: &(Q, Q)| match orientation {
            Orientation::Counterclockwise => *p,
            Orientation::Clockwise => (p.0, -p.1),
        };
        let mut end: Vec<(Q, Q)> = self.current.iter().map(flip).collect();
        let mut want = expected.to_vec();
        end.sort();
        want.sort();
        if end != want {
            return Err(MoveError::Degenerate("motion does not end on the target model".into()));
        }
        let mut pos: Vec<(Q, Q)> = self.start.iter().map(flip).collect();
        let mut order: Vec<usize> = (0..pos.len()).collect();
        order.sort_by(|&a, &b| key(&pos[a]).cmp(&key(&pos[b])));
        let mut word = BraidWord::identity(n);
        for stage in &self.stages {
            let next: Vec<(Q, Q)> = stage.iter().map(flip).collect();
            sweep(&pos, &next, &mut order, &mut word)?;
            pos = next;
        }
        Ok(word)
    }
}

fn key(p: &(Q, Q)) -> Q {
    p.0 - p.1 * Q::new(TILT.0, TILT.1)
}

fn perp(p: &(Q, Q)) -> Q {
    p.1 + p.0 * Q::new(TILT.0, TILT.1)
}

fn lerp(a: &(Q, Q), b: &(Q, Q), t: Q) -> (Q, Q) {
    (a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t)
}

/// Emit the crossings of one straight-line stage, keeping `order` (points
/// sorted by projection) up to date.
fn sweep(from: &[(Q, Q)], to: &[(Q, Q)], order: &mut [usize], word: &mut BraidWord) -> Result<(), MoveError> {
    let m = from.len();
    let mut events: Vec<(Q, usize, usize)> = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let d0 = key(&from[a]) - key(&from[b]);
            let d1 = key(&to[a]) - key(&to[b]);
            if d1.is_zero() {
                return Err(MoveError::Degenerate("points share a projection at a stage end".into()));
            }
            if d0.is_positive() != d1.is_positive() {
                let t = d0 / (d0 - d1);
                events.push((t, a, b));
            }
        }
    }
    events.sort();
    for w in events.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(MoveError::Degenerate("simultaneous crossings".into()));
        }
    }
    for (t, a, b) in events {
        let ia = order.iter().position(|&x| x == a).unwrap();
        let ib = order.iter().position(|&x| x == b).unwrap();
        let (lo, hi) = (ia.min(ib), ia.max(ib));
        if hi != lo + 1 {
            return Err(MoveError::Degenerate("crossing of non-adjacent points".into()));
        }
        let left = order[lo];
        let right = order[hi];
        let pl = perp(&lerp(&from[left], &to[left], t));
        let pr = perp(&lerp(&from[right], &to[right], t));
        if pl == pr {
            return Err(MoveError::Degenerate("collision".into()));
        }
        let gen = (lo + 1) as i32;
        word.push(if pl < pr { gen } else { -gen });
        order.swap(lo, hi);
    }
    Ok(())
}
