//! The chart `h(t) = t / (1 - t)` from `(0, 1)` onto `(0, ∞)`, the indexed
//! interval family in chart coordinates and the matching boxes ("balls") in
//! the unit cube, and point location.
//!
//! Level `n` holds `2^n` intervals inside the slab `(n, n + 1)`; interval
//! `k` is the open middle third of the `k`-th dyadic cell of that slab.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plcore::{Point, Rat, TentProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartDirection {
    Forward,
    Inverse,
}

pub fn chart_map(t: &Rat, direction: ChartDirection) -> Result<Rat> {
    match direction {
        ChartDirection::Forward => {
            if !t.is_positive() || *t >= Rat::one() {
                return Err(Error::Domain(format!("chart is defined on (0, 1), got {t}")));
            }
            Ok(chart_forward(t))
        }
        ChartDirection::Inverse => {
            if !t.is_positive() {
                return Err(Error::Domain(format!("inverse chart is defined on (0, ∞), got {t}")));
            }
            Ok(chart_inverse(t))
        }
    }
}

/// `t / (1 - t)`; caller guarantees `t < 1`.
pub(crate) fn chart_forward(t: &Rat) -> Rat {
    t / (Rat::one() - t)
}

/// `s / (1 + s)`; caller guarantees `s > -1`.
pub(crate) fn chart_inverse(s: &Rat) -> Rat {
    s / (Rat::one() + s)
}

/// Address of one member of the ball family: level `n`, index `k < 2^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BallIndex {
    pub level: u64,
    #[serde(with = "decimal")]
    pub index: BigUint,
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        BigUint::parse_bytes(text.as_bytes(), 10).ok_or_else(|| D::Error::custom(format!("bad index {text:?}")))
    }
}

impl BallIndex {
    pub fn new(level: u64, index: impl Into<BigUint>) -> Result<BallIndex> {
        let index = index.into();
        if index.bits() > level {
            return Err(Error::Index { level, index: index.to_string() });
        }
        Ok(BallIndex { level, index })
    }

    pub fn root() -> BallIndex {
        BallIndex { level: 0, index: BigUint::zero() }
    }

    /// Number of indices at this level, `2^level`.
    pub fn width(&self) -> BigUint {
        BigUint::from(1u32) << self.level as usize
    }

    /// True when the index lies in the lower half `k < 2^(level-1)`.
    pub fn is_lower_half(&self) -> bool {
        self.level > 0 && !self.index.bit(self.level - 1)
    }
}

impl fmt::Display for BallIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.index)
    }
}

/// First-coordinate interval `I^k_n` in chart coordinates; the cross-section
/// `(0, 1)^(m-1)` is implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalBox {
    pub index: BallIndex,
    pub lo: Rat,
    pub hi: Rat,
}

pub fn interval_of(n: u64, k: u64) -> Result<IntervalBox> {
    Ok(interval_at(&BallIndex::new(n, k)?))
}

pub fn interval_at(idx: &BallIndex) -> IntervalBox {
    let n = idx.level as usize;
    let denom = BigInt::from(3u32) << n;
    let base = BigInt::from(idx.level) * &denom;
    let k3 = BigInt::from(idx.index.clone()) * 3u32;
    IntervalBox {
        index: idx.clone(),
        lo: Rat::new(&base + &k3 + 1u32, denom.clone()),
        hi: Rat::new(base + k3 + 2u32, denom),
    }
}

/// Open box `(h × id)^(-1)(I^k_n)` inside the unit cube.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub index: BallIndex,
    pub xlo: Rat,
    pub xhi: Rat,
}

pub fn ball_of(n: u64, k: u64) -> Result<Ball> {
    Ok(ball_at(&BallIndex::new(n, k)?))
}

pub fn ball_at(idx: &BallIndex) -> Ball {
    let iv = interval_at(idx);
    Ball { index: iv.index, xlo: chart_inverse(&iv.lo), xhi: chart_inverse(&iv.hi) }
}

impl Ball {
    pub fn contains(&self, p: &[Rat]) -> bool {
        match p.split_first() {
            Some((x1, cross)) => {
                *x1 > self.xlo
                    && *x1 < self.xhi
                    && cross.iter().all(|y| y.is_positive() && *y < Rat::one())
            }
            None => false,
        }
    }

    /// Center of the ball with every cross coordinate at 1/2.
    pub fn center(&self, m: usize) -> Point {
        let mut p = vec![Rat::new(1, 2); m];
        p[0] = (&self.xlo + &self.xhi) / Rat::int(2);
        p
    }
}

/// A ball with its cross-section shrunk to `[delta, 1 - delta]^(m-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreBall {
    pub base: Ball,
    pub delta: Rat,
}

impl CoreBall {
    pub fn new(base: Ball, tent: &TentProfile) -> CoreBall {
        CoreBall { base, delta: tent.delta().clone() }
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        let upper = Rat::one() - &self.delta;
        self.base.contains(p) && p[1..].iter().all(|y| *y >= self.delta && *y <= upper)
    }
}

/// Unique ball containing `p`, or `None` (boundaries and gaps included).
pub fn locate(p: &[Rat]) -> Option<BallIndex> {
    let (x1, cross) = p.split_first()?;
    if !x1.is_positive() || *x1 >= Rat::one() {
        return None;
    }
    if cross.iter().any(|y| !y.is_positive() || *y >= Rat::one()) {
        return None;
    }
    locate_slab(&chart_forward(x1))
}

/// Ball index of a chart coordinate `s > 0`, ignoring cross coordinates.
pub fn locate_slab(s: &Rat) -> Option<BallIndex> {
    let level = s.floor().to_u64()?;
    let frac = s - Rat::int(level);
    if frac.is_zero() {
        return None;
    }
    let (numer, denom) = (frac.numer(), frac.denom());
    // Deep slabs: decide membership modulo 3q before building 2^n-sized numbers.
    if level > 4096 && !deep_middle_third(numer, denom, level) {
        return None;
    }
    let scaled = (numer * 3u32) << level as usize;
    let (j, rem) = num_integer::Integer::div_rem(&scaled, denom);
    if !rem.is_zero() {
        let (k, r) = num_integer::Integer::div_rem(&j, &BigInt::from(3u32));
        if r == BigInt::from(1u32) {
            return Some(BallIndex { level, index: k.to_biguint().expect("nonnegative") });
        }
    }
    None
}

/// Whether `3 * 2^level * numer / denom` has a non-integral value whose
/// integer part is `1 mod 3`, computed with modular powers.
fn deep_middle_third(numer: &BigInt, denom: &BigInt, level: u64) -> bool {
    let twos = denom.trailing_zeros().unwrap_or(0);
    if twos > level {
        return true;
    }
    let odd = denom >> twos as usize;
    let modulus = &odd * 3u32;
    let pow = BigInt::from(2u32).modpow(&BigInt::from(level - twos), &modulus);
    let rem = ((numer * 3u32) % &modulus * pow) % &modulus;
    !(&rem % &odd).is_zero() && (&rem / &odd) == BigInt::from(1u32)
}


/// Closed axis-aligned box `[lo_1, hi_1] × ... × [lo_m, hi_m]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub lo: Point,
    pub hi: Point,
}

impl Region {
    pub fn new(lo: Point, hi: Point) -> Result<Region> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", lo.len(), hi.len())));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::Domain("region with lo > hi".into()));
        }
        Ok(Region { lo, hi })
    }

    pub fn unit_cube(m: usize) -> Region {
        Region { lo: vec![Rat::zero(); m], hi: vec![Rat::one(); m] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        p.len() == self.dim() && p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| x >= a && x <= b)
    }

    /// Open interiors intersect.
    pub fn overlaps_open(&self, other: &Region) -> bool {
        self.lo.iter().zip(&self.hi).zip(other.lo.iter().zip(&other.hi)).all(|((a, b), (c, d))| a < d && c < b)
    }

    pub fn hull(&self, other: &Region) -> Region {
        Region {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.clone().min(b.clone())).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.clone().max(b.clone())).collect(),
        }
    }

    pub fn intersect(&self, other: &Region) -> Option<Region> {
        let lo: Point = self.lo.iter().zip(&other.lo).map(|(a, b)| a.clone().max(b.clone())).collect();
        let hi: Point = self.hi.iter().zip(&other.hi).map(|(a, b)| a.clone().min(b.clone())).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            None
        } else {
            Some(Region { lo, hi })
        }
    }

    /// True when `self` lies inside the open set `other`'s interior.
    pub fn inside_open(&self, other: &Region) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a > b) && self.hi.iter().zip(&other.hi).all(|(a, b)| a < b)
    }

    pub fn center(&self) -> Point {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (a + b) / Rat::int(2)).collect()
    }
}

impl CoreBall {
    /// Closure of the core as a region.
    pub fn region(&self, m: usize) -> Region {
        let mut lo = vec![self.delta.clone(); m];
        let mut hi = vec![Rat::one() - &self.delta; m];
        lo[0] = self.base.xlo.clone();
        hi[0] = self.base.xhi.clone();
        Region { lo, hi }
    }
}
