//! From line and conic equations to a table of singular fibers.
//!
//! All arithmetic is exact. Event abscissae are real numbers of degree at
//! most two over the rationals; fibers are read at rational sample points
//! strictly between consecutive events, so no event lies between a sample
//! and the event it describes.
//!
//! Curve file, one component per line (`#` starts a comment):
//!
//! ```text
//! line a b             # y = a x + b
//! conic A B C D E F    # A x² + B xy + C y² + D x + E y + F = 0, C ≠ 0
//! window lo hi         # optional: the disk with diameter [lo, hi]
//! ```
//!
//! Without a window every event must be real and the base fibers sit just
//! outside the outermost events. With a window only events inside the
//! disk count, they must be real, and the base fibers are read at `hi`
//! (right) and `lo` (left).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::engine::{EngineError, SingType, SingularityRow, SingularityTable};
use crate::moves::{Model, MoveKind};
use crate::notation::{Label, LabelMap};

pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("two singular points over x = {x}: {a} and {b}")]
    Collision { x: String, a: String, b: String },
    #[error("non-real singular fiber inside the window: {0}")]
    NonReal(String),
    #[error("singular fiber on the window boundary: {0}")]
    Boundary(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("branches of {0} are not consecutive in the nearby fiber")]
    Cluster(String),
    #[error("{0}")]
    Level(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl ArrangementError {
    pub fn is_parse(&self) -> bool {
        matches!(self, ArrangementError::Parse { .. })
    }
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// `n = s² d` with `d` not a perfect square (or `d = 1`).
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    if let Some(s) = is_square(n) {
        return (s, BigInt::one());
    }
    let mut s = BigInt::one();
    let mut d = n.clone();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(2000);
    while p < limit {
        let pp = &p * &p;
        while (&d % &pp).is_zero() {
            d /= &pp;
            s *= &p;
        }
        p += 1;
    }
    if let Some(r) = is_square(&d) {
        return (s * r, BigInt::one());
    }
    (s, d)
}

fn sign_pq(p: &Rat, q: &Rat, d: &BigInt) -> Ordering {
    let zero = Rat::zero();
    if q.is_zero() || d.is_zero() {
        return p.cmp(&zero);
    }
    let sp = p.cmp(&zero);
    let sq = q.cmp(&zero);
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    let lhs = p * p;
    let rhs = q * q * Rat::from_integer(d.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

/// A real number `p + q√d` with `d` a positive integer that is not a
/// perfect square; rationals have `q = 0`.
#[derive(Clone, Debug)]
pub struct AlgebraicX {
    p: Rat,
    q: Rat,
    d: BigInt,
}

impl AlgebraicX {
    pub fn rational(p: Rat) -> Self {
        AlgebraicX { p, q: Rat::zero(), d: BigInt::one() }
    }

    /// `p + q√r` for a rational `r ≥ 0`.
    pub fn with_root(p: Rat, q: Rat, r: &Rat) -> Self {
        assert!(!r.is_negative(), "square root of a negative rational");
        let n = r.numer() * r.denom();
        let (s, d) = split_square(&n);
        let q = q * Rat::new(s, r.denom().clone());
        if d.is_one() {
            AlgebraicX::rational(p + q)
        } else if q.is_zero() {
            AlgebraicX::rational(p)
        } else {
            AlgebraicX { p, q, d }
        }
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.p)
    }

    pub fn to_f64(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return p;
        }
        p + self.q.to_f64().unwrap_or(f64::NAN) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// Both numbers written over one field, when they share it.
    fn align(&self, o: &AlgebraicX) -> Option<(Rat, Rat, Rat, Rat, BigInt)> {
        if o.is_rational() {
            return Some((self.p.clone(), self.q.clone(), o.p.clone(), Rat::zero(), self.d.clone()));
        }
        if self.is_rational() {
            return Some((self.p.clone(), Rat::zero(), o.p.clone(), o.q.clone(), o.d.clone()));
        }
        if self.d == o.d {
            return Some((self.p.clone(), self.q.clone(), o.p.clone(), o.q.clone(), self.d.clone()));
        }
        // √d₂ = √(d₁d₂)/d₁ · √d₁
        let s = is_square(&(&self.d * &o.d))?;
        let q2 = &o.q * Rat::new(s, self.d.clone());
        Some((self.p.clone(), self.q.clone(), o.p.clone(), q2, self.d.clone()))
    }

    fn from_parts(p: Rat, q: Rat, d: BigInt) -> Self {
        if q.is_zero() || d.is_one() {
            AlgebraicX::rational(p + q)
        } else {
            AlgebraicX { p, q, d }
        }
    }

    fn add(&self, o: &AlgebraicX) -> Option<AlgebraicX> {
        let (p1, q1, p2, q2, d) = self.align(o)?;
        Some(AlgebraicX::from_parts(p1 + p2, q1 + q2, d))
    }

    fn neg(&self) -> AlgebraicX {
        AlgebraicX { p: -self.p.clone(), q: -self.q.clone(), d: self.d.clone() }
    }

    fn sub(&self, o: &AlgebraicX) -> Option<AlgebraicX> {
        self.add(&o.neg())
    }

    fn mul(&self, o: &AlgebraicX) -> Option<AlgebraicX> {
        let (p1, q1, p2, q2, d) = self.align(o)?;
        let dd = Rat::from_integer(d.clone());
        Some(AlgebraicX::from_parts(&p1 * &p2 + &q1 * &q2 * dd, p1 * q2 + q1 * p2, d))
    }

    fn scale(&self, r: &Rat) -> AlgebraicX {
        AlgebraicX::from_parts(&self.p * r, &self.q * r, self.d.clone())
    }

    fn div(&self, o: &AlgebraicX) -> Option<AlgebraicX> {
        let (p1, q1, p2, q2, d) = self.align(o)?;
        let dd = Rat::from_integer(d.clone());
        let norm = &p2 * &p2 - &q2 * &q2 * &dd;
        if norm.is_zero() {
            return None;
        }
        // (p1 + q1√d)(p2 − q2√d) / norm
        let p = (&p1 * &p2 - &q1 * &q2 * &dd) / &norm;
        let q = (q1 * p2 - p1 * q2) / norm;
        Some(AlgebraicX::from_parts(p, q, d))
    }

    pub fn signum(&self) -> Ordering {
        sign_pq(&self.p, &self.q, &self.d)
    }

    /// Exact comparison, also across different fields.
    pub fn cmp_exact(&self, o: &AlgebraicX) -> Ordering {
        if let Some(diff) = self.sub(o) {
            return diff.signum();
        }
        // r + s√d₁ + t√d₂ with independent roots
        let r = &self.p - &o.p;
        let s = self.q.clone();
        let t = -o.q.clone();
        let sa = sign_pq(&r, &s, &self.d);
        let sb = t.cmp(&Rat::zero());
        if sa == Ordering::Equal {
            return sb;
        }
        if sb == Ordering::Equal || sa == sb {
            return sa;
        }
        let d1 = Rat::from_integer(self.d.clone());
        let d2 = Rat::from_integer(o.d.clone());
        let x = &r * &r + &s * &s * d1 - &t * &t * d2;
        let y = rat(2) * r * s;
        match sign_pq(&x, &y, &self.d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Rational `lo ≤ self ≤ hi` with `hi − lo ≤ |q|·2^-bits`.
    fn bounds(&self, bits: u32) -> (Rat, Rat) {
        if self.is_rational() {
            return (self.p.clone(), self.p.clone());
        }
        let scale = BigInt::one() << (2 * bits);
        let root = (&self.d * scale).sqrt();
        let den = BigInt::one() << bits;
        let lo = Rat::new(root.clone(), den.clone());
        let hi = Rat::new(root + 1, den);
        let (a, b) = (&self.p + &self.q * &lo, &self.p + &self.q * &hi);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// A rational strictly between `self` and a larger number.
    pub fn rational_between(&self, above: &AlgebraicX) -> Rat {
        debug_assert_eq!(self.cmp_exact(above), Ordering::Less);
        let mut bits = 8;
        loop {
            let (_, a_hi) = self.bounds(bits);
            let (b_lo, _) = above.bounds(bits);
            if a_hi < b_lo {
                let mid = (&a_hi + &b_lo) / rat(2);
                if self.cmp_exact(&AlgebraicX::rational(mid.clone())) == Ordering::Less
                    && AlgebraicX::rational(mid.clone()).cmp_exact(above) == Ordering::Less
                {
                    return mid;
                }
            }
            bits *= 2;
        }
    }

    fn floor_rat(&self) -> Rat {
        self.bounds(8).0.floor()
    }

    fn ceil_rat(&self) -> Rat {
        self.bounds(8).1.ceil()
    }
}

impl PartialEq for AlgebraicX {
    fn eq(&self, o: &Self) -> bool {
        self.cmp_exact(o) == Ordering::Equal
    }
}

impl fmt::Display for AlgebraicX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return f.write_str(&fmt_rat(&self.p));
        }
        let sign = if self.q.is_negative() { "-" } else { "+" };
        write!(f, "{}{}{}*sqrt({})", fmt_rat(&self.p), sign, fmt_rat(&self.q.abs()), self.d)
    }
}

/// Polynomial in `x`, lowest coefficient first.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Poly(Vec<Rat>);

impl Poly {
    fn new(mut c: Vec<Rat>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    fn constant(r: Rat) -> Poly {
        Poly::new(vec![r])
    }

    fn linear(c0: Rat, c1: Rat) -> Poly {
        Poly::new(vec![c0, c1])
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn coeff(&self, i: usize) -> Rat {
        self.0.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    fn sub(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly(Vec::new());
        }
        let mut c = vec![Rat::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    fn scale(&self, r: &Rat) -> Poly {
        Poly::new(self.0.iter().map(|c| c * r).collect())
    }

    fn eval(&self, x: &Rat) -> Rat {
        self.0.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    fn eval_alg(&self, x: &AlgebraicX) -> AlgebraicX {
        let mut acc = AlgebraicX::rational(Rat::zero());
        for c in self.0.iter().rev() {
            acc = acc.mul(x).expect("one field").add(&AlgebraicX::rational(c.clone())).expect("one field");
        }
        acc
    }

    fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect())
    }

    fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        let mut q = vec![Rat::zero(); self.0.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lead;
            for (i, dc) in d.0.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        match a.degree() {
            Some(d) => {
                let l = a.0[d].clone();
                a.scale(&(Rat::one() / l))
            }
            None => a,
        }
    }

    /// Primitive integer multiple.
    fn integer_coeffs(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for c in &self.0 {
            l = l.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &g).collect()
    }
}

/// A root of a polynomial with rational coefficients.
#[derive(Clone, Debug)]
enum Root {
    Real(AlgebraicX),
    /// `re ± i·√im2`.
    Complex { re: Rat, im2: Rat },
}

const DIVISOR_LIMIT: u64 = 1_000_000_000_000;

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, ArrangementError> {
    let n = n.abs();
    let v = n
        .to_u64()
        .filter(|&v| v <= DIVISOR_LIMIT)
        .ok_or_else(|| ArrangementError::Unsupported(format!("coefficient {n} too large to factor")))?;
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= v {
        if v % i == 0 {
            out.push(BigInt::from(i));
            if i * i != v {
                out.push(BigInt::from(v / i));
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Roots of a square-free polynomial whose irreducible factors have degree
/// at most two.
fn roots(p: &Poly) -> Result<Vec<Root>, ArrangementError> {
    let mut out = Vec::new();
    let mut rest = p.clone();
    // zero roots and rational roots
    loop {
        match rest.degree() {
            None | Some(0) => return Ok(out),
            Some(1) | Some(2) => {
                out.extend(low_degree_roots(&rest));
                return Ok(out);
            }
            _ => {}
        }
        if rest.0[0].is_zero() {
            out.push(Root::Real(AlgebraicX::rational(Rat::zero())));
            rest = rest.divrem(&Poly::linear(Rat::zero(), Rat::one())).0;
            continue;
        }
        match rational_root(&rest)? {
            Some(r) => {
                rest = rest.divrem(&Poly::linear(-r.clone(), Rat::one())).0;
                out.push(Root::Real(AlgebraicX::rational(r)));
            }
            None => break,
        }
    }
    if rest.degree() == Some(4) {
        if let Some((a, b)) = split_quartic(&rest)? {
            out.extend(low_degree_roots(&a));
            out.extend(low_degree_roots(&b));
            return Ok(out);
        }
    }
    Err(ArrangementError::Unsupported(format!(
        "an irreducible factor of degree {} over the rationals",
        rest.degree().unwrap_or(0)
    )))
}

fn low_degree_roots(p: &Poly) -> Vec<Root> {
    match p.degree() {
        Some(1) => vec![Root::Real(AlgebraicX::rational(-p.coeff(0) / p.coeff(1)))],
        Some(2) => {
            let (a, b, c) = (p.coeff(2), p.coeff(1), p.coeff(0));
            let disc = &b * &b - rat(4) * &a * &c;
            let re = -b / (rat(2) * &a);
            if disc.is_negative() {
                let im2 = -disc / (rat(4) * &a * &a);
                vec![Root::Complex { re, im2 }]
            } else {
                let h = Rat::one() / (rat(2) * a.abs());
                vec![
                    Root::Real(AlgebraicX::with_root(re.clone(), -h.clone(), &disc)),
                    Root::Real(AlgebraicX::with_root(re, h, &disc)),
                ]
            }
        }
        _ => Vec::new(),
    }
}

fn rational_root(p: &Poly) -> Result<Option<Rat>, ArrangementError> {
    let c = p.integer_coeffs();
    let lead = c.last().unwrap().clone();
    let tail = c[0].clone();
    let mut cands = Vec::new();
    for num in divisors(&tail)? {
        for den in divisors(&lead)? {
            let r = Rat::new(num.clone(), den);
            cands.push(r.clone());
            cands.push(-r);
        }
    }
    cands.sort();
    cands.dedup();
    Ok(cands.into_iter().find(|r| p.eval(r).is_zero()))
}

/// Factor a quartic with no rational root into two rational quadratics.
fn split_quartic(p: &Poly) -> Result<Option<(Poly, Poly)>, ArrangementError> {
    let f = p.integer_coeffs();
    let z = |v: &BigInt| Rat::from_integer(v.clone());
    let (f0, f1, f2, f3, f4) = (z(&f[0]), z(&f[1]), z(&f[2]), z(&f[3]), z(&f[4]));
    let sign4 = if f[4].is_negative() { -1 } else { 1 };
    for a2 in divisors(&f[4])? {
        let b2 = &f4 / z(&a2);
        let a2 = z(&a2);
        for d0 in divisors(&f[0])? {
            for s in [1i64, -1] {
                let a0 = z(&d0) * rat(s);
                let b0 = &f0 / &a0;
                // b2 a1 + a2 b1 = f3 ; b0 a1 + a0 b1 = f1
                let det = &b2 * &a0 - &a2 * &b0;
                let mut pairs = Vec::new();
                if !det.is_zero() {
                    let a1 = (&f3 * &a0 - &a2 * &f1) / &det;
                    let b1 = (&b2 * &f1 - &b0 * &f3) / &det;
                    pairs.push((a1, b1));
                } else {
                    // a1 b1 = f2 − a2 b0 − a0 b2 with b1 = (f3 − b2 a1)/a2
                    let m = &f2 - &a2 * &b0 - &a0 * &b2;
                    // a1 (f3 − b2 a1) = m a2  →  b2 a1² − f3 a1 + m a2 = 0
                    let quad = Poly::new(vec![&m * &a2, -f3.clone(), b2.clone()]);
                    for r in low_degree_roots(&quad) {
                        if let Root::Real(x) = r {
                            if let Some(a1) = x.as_rational() {
                                let b1 = (&f3 - &b2 * a1) / &a2;
                                pairs.push((a1.clone(), b1));
                            }
                        }
                    }
                }
                for (a1, b1) in pairs {
                    let a = Poly::new(vec![a0.clone(), a1, a2.clone()]);
                    let b = Poly::new(vec![b0.clone(), b1, b2.clone()]);
                    if a.mul(&b) == Poly::new(vec![f0.clone(), f1.clone(), f2.clone(), f3.clone(), f4.clone()]) {
                        return Ok(Some((a, b)));
                    }
                }
            }
        }
    }
    let _ = sign4;
    Ok(None)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Component {
    /// `y = a x + b`.
    Line { a: Rat, b: Rat },
    /// `A x² + B xy + C y² + D x + E y + F = 0`.
    Conic { coeffs: [Rat; 6] },
}

impl Component {
    pub fn is_conic(&self) -> bool {
        matches!(self, Component::Conic { .. })
    }

    /// Fiber polynomial `c₂ y² + c₁ y + c₀` with `cᵢ` polynomials in `x`.
    fn fiber_coeffs(&self) -> (Rat, Poly, Poly) {
        match self {
            Component::Line { a, b } => (Rat::zero(), Poly::constant(Rat::one()), Poly::linear(-b.clone(), -a.clone())),
            Component::Conic { coeffs: [a, b, c, d, e, f] } => (
                c.clone(),
                Poly::linear(e.clone(), b.clone()),
                Poly::new(vec![f.clone(), d.clone(), a.clone()]),
            ),
        }
    }

    fn discriminant(&self) -> Poly {
        let (c2, c1, c0) = self.fiber_coeffs();
        c1.mul(&c1).sub(&c0.scale(&(rat(4) * c2)))
    }

    fn mirrored(&self) -> Component {
        match self {
            Component::Line { a, b } => Component::Line { a: -a.clone(), b: b.clone() },
            Component::Conic { coeffs: [a, b, c, d, e, f] } => Component::Conic {
                coeffs: [a.clone(), -b.clone(), c.clone(), -d.clone(), e.clone(), f.clone()],
            },
        }
    }

    fn degenerate(&self) -> bool {
        match self {
            Component::Line { .. } => false,
            Component::Conic { coeffs: [a, b, c, d, e, f] } => {
                let h = Rat::new(BigInt::one(), BigInt::from(2));
                let (b, d, e) = (b * &h, d * &h, e * &h);
                let det = a * (c * f - &e * &e) - &b * (&b * f - &e * &d) + &d * (&b * &e - c * &d);
                det.is_zero()
            }
        }
    }

    fn same_as(&self, o: &Component) -> bool {
        match (self, o) {
            (Component::Line { .. }, Component::Line { .. }) => self == o,
            (Component::Conic { coeffs: x }, Component::Conic { coeffs: y }) => {
                // proportional
                let i = x.iter().position(|c| !c.is_zero()).unwrap();
                if y[i].is_zero() {
                    return false;
                }
                let k = &y[i] / &x[i];
                x.iter().zip(y).all(|(a, b)| a * &k == *b)
            }
            _ => false,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Line { a, b } => write!(f, "line {} {}", fmt_rat(a), fmt_rat(b)),
            Component::Conic { coeffs } => {
                let c: Vec<String> = coeffs.iter().map(fmt_rat).collect();
                write!(f, "conic {}", c.join(" "))
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurveSpec {
    pub components: Vec<Component>,
    pub window: Option<(Rat, Rat)>,
}

fn parse_rat(s: &str) -> Option<Rat> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    (!d.is_zero()).then(|| Rat::new(n, d))
}

impl CurveSpec {
    pub fn parse(text: &str) -> Result<CurveSpec, ArrangementError> {
        let mut components: Vec<Component> = Vec::new();
        let mut lines_of = Vec::new();
        let mut window = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap().trim();
            if l.is_empty() {
                continue;
            }
            let perr = |msg: String| ArrangementError::Parse { line, msg };
            let mut toks = l.split_whitespace();
            let head = toks.next().unwrap();
            let nums = toks
                .map(|t| parse_rat(t).ok_or_else(|| perr(format!("bad number `{t}`"))))
                .collect::<Result<Vec<Rat>, _>>()?;
            let comp = match (head, nums.len()) {
                ("line", 2) => Component::Line { a: nums[0].clone(), b: nums[1].clone() },
                ("conic", 6) => {
                    let coeffs: [Rat; 6] = nums.try_into().unwrap();
                    if coeffs[2].is_zero() {
                        return Err(perr("conic needs a nonzero y² coefficient".into()));
                    }
                    let c = Component::Conic { coeffs };
                    if c.degenerate() {
                        return Err(perr("degenerate conic".into()));
                    }
                    c
                }
                ("window", 2) => {
                    if nums[0] >= nums[1] || window.is_some() {
                        return Err(perr("window needs lo < hi, once".into()));
                    }
                    window = Some((nums[0].clone(), nums[1].clone()));
                    continue;
                }
                ("line" | "conic" | "window", k) => return Err(perr(format!("`{head}` with {k} numbers"))),
                _ => return Err(perr(format!("unknown directive `{head}`"))),
            };
            if let Some(k) = components.iter().position(|c| c.same_as(&comp)) {
                return Err(perr(format!("duplicate component (same as line {})", lines_of[k])));
            }
            components.push(comp);
            lines_of.push(line);
        }
        Ok(CurveSpec { components, window })
    }

    /// Degree in `y`: the number of points in a generic fiber.
    pub fn degree(&self) -> usize {
        self.components.iter().map(|c| if c.is_conic() { 2 } else { 1 }).sum()
    }

    /// The curve seen from the other side, `x ↦ −x`.
    pub fn mirrored(&self) -> CurveSpec {
        CurveSpec {
            components: self.components.iter().map(Component::mirrored).collect(),
            window: self.window.as_ref().map(|(lo, hi)| (-hi.clone(), -lo.clone())),
        }
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.components {
            writeln!(f, "{c}")?;
        }
        if let Some((lo, hi)) = &self.window {
            writeln!(f, "window {} {}", fmt_rat(lo), fmt_rat(hi))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum Sheet {
    Line,
    Lower,
    Upper,
}

/// One local branch of the curve: a component and, for conics, which of
/// its two fiber points.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Branch {
    pub component: usize,
    pub sheet: Sheet,
}

#[derive(Clone, Debug)]
pub struct SingularEvent {
    pub x: AlgebraicX,
    pub y: AlgebraicX,
    pub kind: SingType,
    pub branches: Vec<Branch>,
}

impl SingularEvent {
    pub fn components(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.branches.iter().map(|b| b.component).collect();
        c.dedup();
        c
    }

    fn describe(&self) -> String {
        let names: Vec<String> = self.components().iter().map(|c| format!("#{}", c + 1)).collect();
        format!("{} of {} at x≈{:.6}", self.kind, names.join(","), self.x.to_f64())
    }
}

impl fmt::Display for SingularEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.components().iter().map(|c| format!("#{}", c + 1)).collect();
        write!(f, "{} {} x={} y={}", self.kind, names.join(","), self.x, self.y)
    }
}

/// Which sheet of a conic passes through `(x, y)`.
fn conic_sheet(comp: &Component, x: &AlgebraicX, y: &AlgebraicX) -> Result<Sheet, ArrangementError> {
    let (c2, c1, _) = comp.fiber_coeffs();
    let sum = c1.eval_alg(x).scale(&(-Rat::one() / c2));
    let other = sum.sub(y).ok_or_else(|| ArrangementError::Unsupported("mixed quadratic fields".into()))?;
    match y.cmp_exact(&other) {
        Ordering::Greater => Ok(Sheet::Upper),
        Ordering::Less => Ok(Sheet::Lower),
        Ordering::Equal => Err(ArrangementError::Collision {
            x: x.to_string(),
            a: "a vertical tangent".into(),
            b: "a crossing".into(),
        }),
    }
}

fn branch_of(comps: &[Component], i: usize, x: &AlgebraicX, y: &AlgebraicX) -> Result<Branch, ArrangementError> {
    let sheet = if comps[i].is_conic() { conic_sheet(&comps[i], x, y)? } else { Sheet::Line };
    Ok(Branch { component: i, sheet })
}

enum Place {
    Inside,
    Outside,
}

fn place(window: &Option<(Rat, Rat)>, root: &Root, what: &str) -> Result<Place, ArrangementError> {
    match (window, root) {
        (None, Root::Real(_)) => Ok(Place::Inside),
        (None, Root::Complex { re, im2 }) => Err(ArrangementError::NonReal(format!(
            "{what} at x≈{:.6}±{:.6}i",
            re.to_f64().unwrap_or(f64::NAN),
            im2.to_f64().unwrap_or(f64::NAN).sqrt()
        ))),
        (Some((lo, hi)), Root::Real(x)) => {
            let (l, h) = (AlgebraicX::rational(lo.clone()), AlgebraicX::rational(hi.clone()));
            match (x.cmp_exact(&l), x.cmp_exact(&h)) {
                (Ordering::Greater, Ordering::Less) => Ok(Place::Inside),
                (Ordering::Equal, _) | (_, Ordering::Equal) => Err(ArrangementError::Boundary(what.into())),
                _ => Ok(Place::Outside),
            }
        }
        (Some((lo, hi)), Root::Complex { re, im2 }) => {
            let c = (lo + hi) / rat(2);
            let r = (hi - lo) / rat(2);
            let dist = (re - &c) * (re - &c) + im2;
            match dist.cmp(&(&r * &r)) {
                Ordering::Less => place(&None, root, what),
                Ordering::Equal => Err(ArrangementError::Boundary(what.into())),
                Ordering::Greater => Ok(Place::Outside),
            }
        }
    }
}

fn real_roots_inside(
    window: &Option<(Rat, Rat)>,
    rs: Vec<Root>,
    what: &str,
) -> Result<Vec<AlgebraicX>, ArrangementError> {
    let mut out = Vec::new();
    for r in rs {
        if let Place::Inside = place(window, &r, what)? {
            if let Root::Real(x) = r {
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// Square-free part and the repeated factor of a polynomial.
fn split_repeated(p: &Poly) -> (Poly, Poly) {
    let g = p.gcd(&p.derivative());
    if g.degree().unwrap_or(0) == 0 {
        return (p.clone(), Poly::constant(Rat::one()));
    }
    (p.divrem(&g).0, g)
}

/// All singular fibers inside the window, ascending in `x`.
pub fn singular_events(c: &CurveSpec) -> Result<Vec<SingularEvent>, ArrangementError> {
    let comps = &c.components;
    let w = &c.window;
    let mut events: Vec<SingularEvent> = Vec::new();
    let name = |i: usize| format!("#{}", i + 1);
    for (i, comp) in comps.iter().enumerate() {
        if !comp.is_conic() {
            continue;
        }
        let disc = comp.discriminant();
        let (free, rep) = split_repeated(&disc);
        if rep.degree().unwrap_or(0) > 0 || disc.is_zero() {
            return Err(ArrangementError::Unsupported(format!("component {} has a double vertical tangent", name(i))));
        }
        let slope = disc.derivative();
        for x in real_roots_inside(w, roots(&free)?, &format!("branch point of {}", name(i)))? {
            let up = slope.eval_alg(&x).signum() == Ordering::Greater;
            let (c2, c1, _) = comp.fiber_coeffs();
            let y = c1.eval_alg(&x).scale(&(-Rat::one() / (rat(2) * c2)));
            events.push(SingularEvent {
                x,
                y,
                kind: if up { SingType::A1 } else { SingType::A2 },
                branches: vec![Branch { component: i, sheet: Sheet::Lower }, Branch { component: i, sheet: Sheet::Upper }],
            });
        }
    }
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            events.extend(pair_events(comps, w, i, j)?);
        }
    }
    // merge crossings through one point
    let mut merged: Vec<SingularEvent> = Vec::new();
    for e in events {
        if let Some(m) = merged.iter_mut().find(|m| m.x == e.x && m.y == e.y) {
            if m.kind != SingType::C || e.kind != SingType::C {
                return Err(ArrangementError::Collision { x: e.x.to_string(), a: m.describe(), b: e.describe() });
            }
            for b in e.branches {
                if !m.branches.contains(&b) {
                    m.branches.push(b);
                }
            }
            m.branches.sort();
            continue;
        }
        merged.push(e);
    }
    merged.sort_by(|a, b| a.x.cmp_exact(&b.x));
    for w in merged.windows(2) {
        if w[0].x == w[1].x {
            return Err(ArrangementError::Collision { x: w[0].x.to_string(), a: w[0].describe(), b: w[1].describe() });
        }
    }
    Ok(merged)
}

fn pair_events(
    comps: &[Component],
    w: &Option<(Rat, Rat)>,
    i: usize,
    j: usize,
) -> Result<Vec<SingularEvent>, ArrangementError> {
    let what = format!("#{} and #{}", i + 1, j + 1);
    let mut out = Vec::new();
    let crossing = |x: AlgebraicX, y: AlgebraicX, kind: SingType| -> Result<SingularEvent, ArrangementError> {
        let mut branches = vec![branch_of(comps, i, &x, &y)?, branch_of(comps, j, &x, &y)?];
        branches.sort();
        Ok(SingularEvent { x, y, kind, branches })
    };
    match (&comps[i], &comps[j]) {
        (Component::Line { a: a1, b: b1 }, Component::Line { a: a2, b: b2 }) => {
            if a1 != a2 {
                let x = (b2 - b1) / (a1 - a2);
                let root = Root::Real(AlgebraicX::rational(x.clone()));
                if let Place::Inside = place(w, &root, &what)? {
                    let y = a1 * &x + b1;
                    out.push(crossing(AlgebraicX::rational(x), AlgebraicX::rational(y), SingType::C)?);
                }
            }
        }
        (Component::Line { a, b }, conic @ Component::Conic { .. })
        | (conic @ Component::Conic { .. }, Component::Line { a, b }) => {
            let (c2, c1, c0) = conic.fiber_coeffs();
            let l = Poly::linear(b.clone(), a.clone());
            let q = l.mul(&l).scale(&c2).add(&c1.mul(&l)).add(&c0);
            if q.is_zero() {
                return Err(ArrangementError::Unsupported(format!("{what}: line inside conic")));
            }
            let (free, rep) = split_repeated(&q);
            let y_of = |x: &AlgebraicX| l.eval_alg(x);
            if rep.degree().unwrap_or(0) > 0 {
                let x = AlgebraicX::rational(-rep.coeff(0) / rep.coeff(1));
                if let Place::Inside = place(w, &Root::Real(x.clone()), &format!("tangency of {what}"))? {
                    let y = y_of(&x);
                    out.push(crossing(x, y, SingType::B)?);
                }
            } else {
                for x in real_roots_inside(w, roots(&free)?, &format!("crossing of {what}"))? {
                    let y = y_of(&x);
                    out.push(crossing(x, y, SingType::C)?);
                }
            }
        }
        (p @ Component::Conic { .. }, q @ Component::Conic { .. }) => {
            let (a2, a1, a0) = p.fiber_coeffs();
            let (b2, b1, b0) = q.fiber_coeffs();
            // resultant in y of two quadratics
            let u = a0.scale(&b2).sub(&b0.scale(&a2));
            let v = a1.scale(&b2).sub(&b1.scale(&a2));
            let t = a1.mul(&b0).sub(&b1.mul(&a0));
            let res = u.mul(&u).sub(&v.mul(&t));
            if res.is_zero() {
                return Err(ArrangementError::Unsupported(format!("{what} share a component")));
            }
            let (free, rep) = split_repeated(&res);
            if rep.degree().unwrap_or(0) > 0 {
                let bad = real_roots_inside(w, roots(&rep)?, &format!("tangency of {what}"))?;
                if !bad.is_empty() {
                    return Err(ArrangementError::Unsupported(format!("tangency of conics {what}")));
                }
            }
            for x in real_roots_inside(w, roots(&free)?, &format!("crossing of {what}"))? {
                // b₂·p − a₂·q is linear in y
                let vx = v.eval_alg(&x);
                let ux = u.eval_alg(&x);
                let y = ux
                    .div(&vx)
                    .ok_or_else(|| ArrangementError::Unsupported(format!("{what}: two crossings in one fiber")))?;
                out.push(crossing(x, y, SingType::C)?);
            }
        }
    }
    Ok(out)
}

/// The points of one fiber.
#[derive(Clone, Debug)]
pub struct Fiber {
    /// Real points, ascending, with their branches.
    pub real: Vec<(AlgebraicX, Branch)>,
    /// Real parts of the non-real pairs, one entry per conic.
    pub complex: Vec<(Rat, usize)>,
}

impl Fiber {
    pub fn complex_count(&self) -> usize {
        2 * self.complex.len()
    }

    fn index_of(&self, b: &Branch) -> Option<usize> {
        self.real.iter().position(|(_, x)| x == b).map(|i| i + 1)
    }
}

/// Exact fiber over a rational `x` that is not a singular abscissa.
pub fn fiber(c: &CurveSpec, x: &Rat) -> Result<Fiber, ArrangementError> {
    let mut real = Vec::new();
    let mut complex = Vec::new();
    for (i, comp) in c.components.iter().enumerate() {
        let (c2, c1, c0) = comp.fiber_coeffs();
        if !comp.is_conic() {
            real.push((AlgebraicX::rational(-c0.eval(x)), Branch { component: i, sheet: Sheet::Line }));
            continue;
        }
        let disc = comp.discriminant().eval(x);
        let re = -c1.eval(x) / (rat(2) * &c2);
        match disc.cmp(&Rat::zero()) {
            Ordering::Less => complex.push((re, i)),
            Ordering::Equal => {
                return Err(ArrangementError::Collision {
                    x: fmt_rat(x),
                    a: format!("branch point of #{}", i + 1),
                    b: "the sample fiber".into(),
                })
            }
            Ordering::Greater => {
                let h = Rat::one() / (rat(2) * c2.abs());
                real.push((AlgebraicX::with_root(re.clone(), -h.clone(), &disc), Branch { component: i, sheet: Sheet::Lower }));
                real.push((AlgebraicX::with_root(re, h, &disc), Branch { component: i, sheet: Sheet::Upper }));
            }
        }
    }
    real.sort_by(|a, b| a.0.cmp_exact(&b.0));
    for w in real.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(ArrangementError::Collision {
                x: fmt_rat(x),
                a: format!("#{}", w[0].1.component + 1),
                b: format!("#{}", w[1].1.component + 1),
            });
        }
    }
    complex.sort();
    Ok(Fiber { real, complex })
}

/// Which side the base fiber is on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BaseSide {
    Right,
    Left,
}

/// Names for the base fiber: points in order of real part, a conic's two
/// adjacent points as `k, k'`; non-real pairs are marked complex.
fn base_labels(f: &Fiber, n: usize) -> Result<LabelMap, ArrangementError> {
    enum Slot {
        Real(Branch),
        Pair(usize),
    }
    let mut items: Vec<(AlgebraicX, Slot)> = f.real.iter().map(|(y, b)| (y.clone(), Slot::Real(*b))).collect();
    for (re, comp) in &f.complex {
        let x = AlgebraicX::rational(re.clone());
        if items.iter().any(|(y, _)| *y == x) {
            return Err(ArrangementError::Level("base fiber: a real point and a complex pair share a real part".into()));
        }
        items.push((x, Slot::Pair(*comp)));
    }
    items.sort_by(|a, b| a.0.cmp_exact(&b.0));
    let mut owners = Vec::with_capacity(n);
    let mut complex_slots = Vec::new();
    for (_, s) in &items {
        match s {
            Slot::Real(b) => owners.push(b.component),
            Slot::Pair(c) => {
                complex_slots.push(owners.len() + 1);
                owners.push(*c);
                owners.push(*c);
            }
        }
    }
    let mut labels = Vec::with_capacity(n);
    let mut complex = Vec::new();
    let mut s = 0;
    while s < owners.len() {
        let slot = s + 1;
        let pair = s + 1 < owners.len() && owners[s] == owners[s + 1];
        labels.push(Label::real(slot as u32));
        if pair {
            labels.push(Label::primed(slot as u32));
            if complex_slots.contains(&slot) {
                complex.push(slot as u32);
            }
            s += 2;
        } else {
            s += 1;
        }
    }
    LabelMap::new(labels)
        .and_then(|m| m.with_complex(&complex))
        .map_err(|e| ArrangementError::Level(e.to_string()))
}

/// Lefschetz pair, type and move of every singular fiber, read from the
/// chosen base point.
pub fn lefschetz_table(c: &CurveSpec, side: BaseSide) -> Result<SingularityTable, ArrangementError> {
    if side == BaseSide::Left {
        return lefschetz_table(&c.mirrored(), BaseSide::Right);
    }
    let n = c.degree();
    let events = singular_events(c)?;
    // samples[i] lies between events[i-1] and events[i]
    let mut samples = Vec::with_capacity(events.len() + 1);
    for i in 0..=events.len() {
        let s = match (i.checked_sub(1).map(|k| &events[k]), events.get(i)) {
            (None, None) => c.window.as_ref().map(|w| w.1.clone()).unwrap_or_else(Rat::zero),
            (Some(a), Some(b)) => a.x.rational_between(&b.x),
            (Some(a), None) => c.window.as_ref().map(|w| w.1.clone()).unwrap_or_else(|| a.x.ceil_rat() + rat(1)),
            (None, Some(b)) => c.window.as_ref().map(|w| w.0.clone()).unwrap_or_else(|| b.x.floor_rat() - rat(1)),
        };
        samples.push(s);
    }
    let fibers = samples.iter().map(|x| fiber(c, x)).collect::<Result<Vec<_>, _>>()?;
    let base = fibers.last().unwrap();
    let labels = base_labels(base, n)?;
    let model = Model::new(n, base.complex.len()).map_err(|e| ArrangementError::Level(e.to_string()))?;
    let mut rows = Vec::with_capacity(events.len());
    for (i, e) in events.iter().enumerate().rev() {
        let j = events.len() - i;
        let (left, right) = (&fibers[i], &fibers[i + 1]);
        let read = if e.kind == SingType::A2 { left } else { right };
        let mut idx = Vec::new();
        for b in &e.branches {
            idx.push(read.index_of(b).ok_or_else(|| ArrangementError::Cluster(e.describe()))?);
        }
        idx.sort();
        if idx.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(ArrangementError::Cluster(e.describe()));
        }
        let (k, l) = (idx[0], *idx.last().unwrap());
        let level = right.complex_count();
        let delta = match e.kind {
            SingType::C => MoveKind::BlockTwist { k, l, r: 1 },
            SingType::B => MoveKind::BlockTwist { k, l, r: 2 },
            SingType::A1 => match level {
                0 => MoveKind::I2toR(k),
                2 => {
                    let comp = e.branches[0].component;
                    let own = left.complex.iter().find(|(_, c)| *c == comp).map(|p| p.0.clone());
                    let other = left.complex.iter().find(|(_, c)| *c != comp).map(|p| p.0.clone());
                    match (own, other) {
                        (Some(a), Some(b)) if a > b => MoveKind::I4toI2Prime(k),
                        (Some(a), Some(b)) if a < b => MoveKind::I4toI2(k),
                        _ => return Err(ArrangementError::Level(format!("{}: complex pairs share a real part", e.describe()))),
                    }
                }
                4 => MoveKind::I6toI4(k),
                _ => return Err(ArrangementError::Level(format!("{}: complex level {} beyond the models", e.describe(), level + 2))),
            },
            SingType::A2 => match level {
                2 => MoveKind::RtoI2(k),
                4 => MoveKind::I2toI4(k),
                6 => MoveKind::I4toI6(k),
                _ => return Err(ArrangementError::Level(format!("{}: complex level {} beyond the models", e.describe(), level))),
            },
        };
        rows.push(SingularityRow { j, sing_type: e.kind, lpair: (k, l), delta });
    }
    Ok(SingularityTable::new(n, model, labels, rows)?)
}
