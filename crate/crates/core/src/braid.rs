//! Braid words in Artin generators, the Artin action on the free group,
//! and bands (halftwists along simple paths).
//!
//! Words act left to right: in `w1 w2` the motion `w1` happens first. A
//! band `(k, k+1, w)` is the adjacent chord carried along by `w`, so its
//! halftwist is `w⁻¹ σ_k w`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("strand count mismatch: {0} vs {1}")]
    StrandMismatch(usize, usize),
    #[error("generator s{index} out of range for {strands} strands")]
    GeneratorOutOfRange { index: usize, strands: usize },
    #[error("invalid endpoints ({0},{1}) for {2} strands")]
    InvalidEndpoints(usize, usize, usize),
    #[error("cannot parse braid word: {0}")]
    Parse(String),
}

/// A braid on `strands` strands. Letters are signed generator indices:
/// `3` is σ₃ and `-3` is σ₃⁻¹.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn identity(strands: usize) -> Self {
        BraidWord { strands, letters: Vec::new() }
    }

    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        for &l in &letters {
            let i = l.unsigned_abs() as usize;
            if l == 0 || i >= strands {
                return Err(BraidError::GeneratorOutOfRange { index: i, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// σ_i^e as a word.
    pub fn generator(strands: usize, index: usize, exponent: i32) -> Result<Self, BraidError> {
        let letter = index as i32 * exponent.signum();
        BraidWord::new(strands, vec![letter; exponent.unsigned_abs() as usize])
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn compose(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StrandMismatch(self.strands, other.strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { strands: self.strands, letters })
    }

    /// In-place concatenation; panics on a strand mismatch, which is a
    /// programming error inside this crate.
    pub(crate) fn push_word(&mut self, other: &BraidWord) {
        assert_eq!(self.strands, other.strands, "strand count mismatch");
        self.letters.extend_from_slice(&other.letters);
    }

    pub(crate) fn push(&mut self, letter: i32) {
        debug_assert!(letter != 0 && (letter.unsigned_abs() as usize) < self.strands);
        self.letters.push(letter);
    }

    pub fn invert(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn power(&self, e: i32) -> BraidWord {
        let base = if e < 0 { self.invert() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        BraidWord { strands: self.strands, letters }
    }

    /// `c⁻¹ w c`.
    pub fn conjugate_by(&self, c: &BraidWord) -> BraidWord {
        let mut out = c.invert();
        out.push_word(self);
        out.push_word(c);
        out
    }

    /// Every generator replaced by its inverse (the mirror braid).
    pub fn mirror(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().map(|l| -l).collect() }
    }

    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.signum() as i64).sum()
    }

    pub fn permutation(&self) -> Permutation {
        let mut p = Permutation::identity(self.strands);
        for &l in &self.letters {
            p.swap_positions(l.unsigned_abs() as usize);
        }
        p
    }

    pub fn artin_action(&self) -> ArtinAutomorphism {
        let mut images: Vec<FreeWord> =
            (1..=self.strands).map(|i| FreeWord::generator(i as i32)).collect();
        for &l in &self.letters {
            let k = l.unsigned_abs() as usize - 1;
            let a = images[k].clone();
            let b = images[k + 1].clone();
            if l > 0 {
                images[k] = a.mul(&b).mul(&a.inverse());
                images[k + 1] = a;
            } else {
                images[k] = b.clone();
                images[k + 1] = b.inverse().mul(&a).mul(&b);
            }
        }
        ArtinAutomorphism { images }
    }

    /// Exact equality in B_n through the faithful Artin representation.
    pub fn equal(&self, other: &BraidWord) -> Result<bool, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StrandMismatch(self.strands, other.strands));
        }
        if self.permutation() != other.permutation() {
            return Ok(false);
        }
        Ok(self.artin_action() == other.artin_action())
    }

    /// `other` rewritten on a larger strand count with all indices shifted.
    pub fn embed(&self, strands: usize, shift: usize) -> Result<BraidWord, BraidError> {
        let letters = self
            .letters
            .iter()
            .map(|&l| l.signum() * (l.abs() + shift as i32))
            .collect();
        BraidWord::new(strands, letters)
    }
}

impl fmt::Display for BraidWord {
    /// `s3 s4^-1 s3^2`; runs of one letter are collapsed; the identity is `e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let e = run as i32 * l.signum();
            if e == 1 {
                write!(f, "s{}", l.abs())?;
            } else {
                write!(f, "s{}^{}", l.abs(), e)?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Parses `s3 s4^-1 s3^2` (or `e` for the identity) on a given strand count.
pub fn parse_braid(strands: usize, text: &str) -> Result<BraidWord, BraidError> {
    let mut letters = Vec::new();
    for tok in text.split_whitespace() {
        if tok == "e" {
            continue;
        }
        let body = tok
            .strip_prefix('s')
            .ok_or_else(|| BraidError::Parse(format!("expected `s<i>`, found `{tok}`")))?;
        let (idx, exp) = match body.split_once('^') {
            Some((i, e)) => (i, e),
            None => (body, "1"),
        };
        let idx = usize::from_str(idx).map_err(|_| BraidError::Parse(format!("bad index in `{tok}`")))?;
        let exp = i32::from_str(exp).map_err(|_| BraidError::Parse(format!("bad exponent in `{tok}`")))?;
        let g = BraidWord::generator(strands, idx, exp)?;
        letters.extend_from_slice(g.letters());
    }
    BraidWord::new(strands, letters)
}

/// Positive halftwist of the block `k..=l`: the 180° counterclockwise
/// rotation of those punctures.
pub fn block_halftwist(k: usize, l: usize, strands: usize) -> Result<BraidWord, BraidError> {
    if k < 1 || k >= l || l > strands {
        return Err(BraidError::InvalidEndpoints(k, l, strands));
    }
    let mut letters = Vec::new();
    for top in (k..l).rev() {
        for i in k..=top {
            letters.push(i as i32);
        }
    }
    BraidWord::new(strands, letters)
}

/// Where each strand ends up: `image[p]` is the final position of the strand
/// that started at position `p` (both 0-based).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { image: (0..n).collect() }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Permutation::identity(n);
        p.image.swap(a - 1, b - 1);
        p
    }

    /// Swap whatever sits at 1-based positions `i` and `i+1`.
    fn swap_positions(&mut self, i: usize) {
        for v in self.image.iter_mut() {
            if *v == i - 1 {
                *v = i;
            } else if *v == i {
                *v = i - 1;
            }
        }
    }

    /// 1-based image of a 1-based position.
    pub fn apply(&self, p: usize) -> usize {
        self.image[p - 1] + 1
    }

    /// First `self`, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { image: self.image.iter().map(|&v| other.image[v]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.image.len()];
        for (p, &v) in self.image.iter().enumerate() {
            image[v] = p;
        }
        Permutation { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(p, &v)| p == v)
    }

    pub fn moved_points(&self) -> usize {
        self.image.iter().enumerate().filter(|(p, v)| *p != **v).count()
    }
}

/// A freely reduced word in the free group on x₁..x_n, letters signed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FreeWord(Vec<i32>);

impl FreeWord {
    pub fn new(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        FreeWord(out)
    }

    pub fn generator(i: i32) -> Self {
        FreeWord(vec![i])
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        FreeWord(out)
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Substitute a word for every generator (`images[i-1]` for x_i).
    pub fn substitute(&self, images: &[FreeWord]) -> FreeWord {
        let mut out = Vec::new();
        for &l in &self.0 {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                for &m in &img.0 {
                    push_reduced(&mut out, m);
                }
            } else {
                for &m in img.0.iter().rev() {
                    push_reduced(&mut out, -m);
                }
            }
        }
        FreeWord(out)
    }

    /// Strip a conjugating prefix/suffix.
    pub fn cyclically_reduced(&self) -> FreeWord {
        let w = &self.0;
        let (mut a, mut b) = (0, w.len());
        while b - a >= 2 && w[a] == -w[b - 1] {
            a += 1;
            b -= 1;
        }
        FreeWord(w[a..b].to_vec())
    }

    /// Equality of conjugacy classes.
    pub fn conjugate_to(&self, other: &FreeWord) -> bool {
        let a = self.cyclically_reduced();
        let b = other.cyclically_reduced();
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        let doubled: Vec<i32> = a.0.iter().chain(a.0.iter()).copied().collect();
        doubled.windows(b.len()).any(|win| win == b.0.as_slice())
    }

    /// Image under a single generator's Artin automorphism.
    /// A cyclic word for a loop, carried along `motion`; the result is
    /// cyclically reduced.
    pub fn carried(&self, motion: &BraidWord) -> FreeWord {
        let mut u = self.cyclically_reduced();
        for &l in motion.letters() {
            u = u.apply_letter(-l).cyclically_reduced();
        }
        u
    }

    fn apply_letter(&self, letter: i32) -> FreeWord {
        let k = letter.unsigned_abs() as i32;
        let mut out = Vec::with_capacity(self.0.len() + 4);
        for &l in &self.0 {
            let g = l.abs();
            let image: &[i32] = if letter > 0 {
                if g == k {
                    &[k, k + 1, -k]
                } else if g == k + 1 {
                    &[k]
                } else {
                    &[g]
                }
            } else if g == k {
                &[k + 1]
            } else if g == k + 1 {
                &[-(k + 1), k, k + 1]
            } else {
                &[g]
            };
            if l > 0 {
                for &m in image {
                    push_reduced(&mut out, m);
                }
            } else {
                for &m in image.iter().rev() {
                    push_reduced(&mut out, -m);
                }
            }
        }
        FreeWord(out)
    }
}

fn push_reduced(out: &mut Vec<i32>, l: i32) {
    if out.last() == Some(&-l) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| if *l > 0 { format!("x{l}") } else { format!("x{}^-1", -l) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Images of x₁..x_n; the action of `w1 w2` is that of `w1` composed
/// (as maps) with that of `w2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArtinAutomorphism {
    images: Vec<FreeWord>,
}

impl ArtinAutomorphism {
    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        w.substitute(&self.images)
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, w)| w.0 == [i as i32 + 1])
    }
}

/// A simple path between two punctures up to isotopy: the chord
/// `left..right` carried along by `conjugator`. A non-adjacent chord with
/// no conjugator runs below every puncture in between.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Band {
    pub left: usize,
    pub right: usize,
    pub conjugator: BraidWord,
}

impl Band {
    pub fn new(left: usize, right: usize, conjugator: BraidWord) -> Result<Self, BraidError> {
        let n = conjugator.strands();
        if left < 1 || left >= right || right > n {
            return Err(BraidError::InvalidEndpoints(left, right, n));
        }
        Ok(Band { left, right, conjugator })
    }

    pub fn chord(left: usize, right: usize, strands: usize) -> Result<Self, BraidError> {
        Band::new(left, right, BraidWord::identity(strands))
    }

    pub fn strands(&self) -> usize {
        self.conjugator.strands()
    }

    /// The same path as an adjacent chord `(k, k+1)` and a conjugator.
    pub fn normalized(&self) -> (usize, BraidWord) {
        let n = self.strands();
        let mut w = BraidWord::identity(n);
        for s in self.left + 1..self.right {
            w.push(s as i32);
        }
        w.push_word(&self.conjugator);
        (self.left, w)
    }

    /// Carry the path along a further motion.
    pub fn transported(&self, motion: &BraidWord) -> Band {
        let mut conjugator = self.conjugator.clone();
        conjugator.push_word(motion);
        Band { left: self.left, right: self.right, conjugator }
    }

    pub fn halftwist(&self) -> BraidWord {
        let (k, w) = self.normalized();
        let mut h = w.invert();
        h.push(k as i32);
        h.push_word(&w);
        h
    }

    /// Where the path ends, as 1-based final positions (unordered pair).
    pub fn endpoints(&self) -> (usize, usize) {
        let p = self.conjugator.permutation();
        let (a, b) = (p.apply(self.left), p.apply(self.right));
        (a.min(b), a.max(b))
    }

    /// The boundary loop of a thin neighbourhood of the path, as a cyclic
    /// word in the free group. Two bands are isotopic iff these agree up to
    /// conjugacy; this avoids expanding the full automorphism of long
    /// conjugators.
    pub fn boundary_loop(&self) -> FreeWord {
        let (k, w) = self.normalized();
        FreeWord::new([k as i32, k as i32 + 1]).carried(&w)
    }

    pub fn same_path(&self, other: &Band) -> Result<bool, BraidError> {
        if self.strands() != other.strands() {
            return Err(BraidError::StrandMismatch(self.strands(), other.strands()));
        }
        if self.endpoints() != other.endpoints() {
            return Ok(false);
        }
        Ok(self.boundary_loop().conjugate_to(&other.boundary_loop()))
    }
}
