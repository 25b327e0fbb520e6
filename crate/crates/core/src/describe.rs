//! Best effort rendering of bands as decorated expressions.
//!
//! Every monotone path is indexed by its boundary loop. A band that is not
//! itself monotone is unwound by at most three conjugating full twists
//! around simple paths; the first combination that lands on an indexed path
//! is printed. Anything else is left to the caller to flag.

use std::collections::{HashMap, HashSet};

use crate::braid::{Band, BraidWord, FreeWord};
use crate::notation::{describe_monotone, to_band, DecoratedExpr, Kind, LabelMap, MonotonePath, Side};

const MAX_CONJUGATORS: usize = 3;
const BEAM: usize = 120;

fn key(b: &Band) -> (usize, usize, Vec<i32>) {
    let (a, c) = b.endpoints();
    (a, c, canonical_rotation(&b.boundary_loop()))
}

fn canonical_rotation(w: &FreeWord) -> Vec<i32> {
    let l = w.letters();
    (0..l.len().max(1))
        .map(|i| l[i..].iter().chain(&l[..i]).copied().collect::<Vec<i32>>())
        .min()
        .unwrap_or_default()
}

fn monotone_paths(n: usize) -> Vec<MonotonePath> {
    let mut out = Vec::new();
    for left in 1..n {
        for right in left + 1..=n {
            let inner = right - left - 1;
            for mask in 0u64..(1u64 << inner) {
                let below = (0..inner).map(|i| mask >> i & 1 == 0).collect();
                out.push(MonotonePath { left, right, below });
            }
        }
    }
    out
}

/// Prints bands over a fixed label map.
pub struct Describer {
    labels: LabelMap,
    index: HashMap<(usize, usize, Vec<i32>), MonotonePath>,
    /// Conjugating candidates with the twist that undoes each.
    twists: Vec<(MonotonePath, i32, BraidWord)>,
}

impl Describer {
    pub fn new(labels: &LabelMap) -> Self {
        let n = labels.len();
        let mut index = HashMap::new();
        let mut twists = Vec::new();
        if n <= 16 {
            for p in monotone_paths(n) {
                let band = p.to_band(n).expect("monotone paths fit");
                let simple = p.below.iter().all(|&b| b) || p.below.iter().all(|&b| !b);
                if simple {
                    let h = band.halftwist();
                    for e in [2, -2] {
                        twists.push((p.clone(), e, h.power(-e)));
                    }
                }
                index.entry(key(&band)).or_insert(p);
            }
        }
        Describer { labels: labels.clone(), index, twists }
    }

    /// A decorated expression whose band is `band`, or `None`.
    pub fn describe(&self, band: &Band, kind: Kind, exponent: i32) -> Option<DecoratedExpr> {
        if band.strands() != self.labels.len() {
            return None;
        }
        // Full twists fix every puncture, so only the loop changes.
        let (a, c) = band.endpoints();
        let mut frontier: Vec<(FreeWord, Vec<(MonotonePath, i32)>)> = vec![(band.boundary_loop(), Vec::new())];
        for depth in 0..=MAX_CONJUGATORS {
            let mut best: Option<DecoratedExpr> = None;
            for (u, undone) in &frontier {
                if let Some(p) = self.index.get(&(a, c, canonical_rotation(u))) {
                    let e = self.render(p, undone, kind, exponent);
                    if best.as_ref().is_none_or(|x| weight(&e) < weight(x)) {
                        best = Some(e);
                    }
                }
            }
            if let Some(e) = best {
                return self.verified(e, band);
            }
            if depth == MAX_CONJUGATORS {
                break;
            }
            let mut next = Vec::new();
            for (u, undone) in &frontier {
                for (p, e, inv) in &self.twists {
                    let v = u.carried(inv);
                    let mut w = undone.clone();
                    w.push((p.clone(), *e));
                    next.push((v.len(), v, w));
                }
            }
            next.sort_by_key(|x| x.0);
            let mut seen = HashSet::new();
            frontier = next
                .into_iter()
                .filter(|(_, v, _)| seen.insert(canonical_rotation(v)))
                .take(BEAM)
                .map(|(_, v, w)| (v, w))
                .collect();
        }
        None
    }

    fn render(&self, p: &MonotonePath, undone: &[(MonotonePath, i32)], kind: Kind, exponent: i32) -> DecoratedExpr {
        let mut e = describe_monotone(p, kind, exponent, &self.labels);
        e.conjugators = undone
            .iter()
            .rev()
            .map(|(c, x)| describe_monotone(c, Kind::Halftwist, *x, &self.labels))
            .collect();
        e
    }

    fn verified(&self, e: DecoratedExpr, band: &Band) -> Option<DecoratedExpr> {
        let (b, _) = to_band(&e, &self.labels).ok()?;
        b.same_path(band).ok()?.then_some(e)
    }
}

fn weight(e: &DecoratedExpr) -> usize {
    let plain = usize::from(e.side == Side::Plain);
    e.detours.len() * 2 + plain + e.conjugators.iter().map(|c| 1 + c.detours.len()).sum::<usize>()
}
