//! Exactly evaluable compactly supported functions.
//!
//! A seed bump `u` supported in the core of `Ball(0,0)` is copied onto every
//! ball by the swindle maps: the copy on `Ball(n,k)` is
//! `u^k_n = (-1/2)^n · u ∘ (chain)^(-1)`, where the chain is the word of maps
//! carrying `Ball(0,0)` onto `Ball(n,k)`. The copies have pairwise disjoint
//! supports, so every infinite sum over them is evaluated exactly by locating
//! the point first.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ball_at, chart_forward, chart_inverse, locate, BallIndex, CoreBall, Region};
use crate::plcore::{Point, Rat, TentProfile};
use crate::swindle::{slab_eval, slab_inverse, Homeo, SwindleKind};

/// Tensor product of one-dimensional tents: `peak · Π tent_i(x_i)`, where
/// `tent_i` rises linearly from 0 at `lo_i` to 1 at `apex_i` and falls back
/// to 0 at `hi_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlBump {
    pub lo: Point,
    pub apex: Point,
    pub hi: Point,
    pub peak: Rat,
}

impl PlBump {
    pub fn new(lo: Point, apex: Point, hi: Point, peak: Rat) -> Result<PlBump> {
        let m = lo.len();
        if apex.len() != m || hi.len() != m || m == 0 {
            return Err(Error::DimensionMismatch("bump corners disagree in dimension".into()));
        }
        for i in 0..m {
            if !(lo[i] < apex[i] && apex[i] < hi[i]) {
                return Err(Error::Domain(format!("bump axis {i} needs lo < apex < hi")));
            }
        }
        Ok(PlBump { lo, apex, hi, peak })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn region(&self) -> Region {
        Region { lo: self.lo.clone(), hi: self.hi.clone() }
    }

    pub fn eval(&self, p: &[Rat]) -> Rat {
        let mut value = self.peak.clone();
        for (i, x) in p.iter().enumerate() {
            let factor = if *x <= self.lo[i] || *x >= self.hi[i] {
                return Rat::zero();
            } else if *x <= self.apex[i] {
                (x - &self.lo[i]) / (&self.apex[i] - &self.lo[i])
            } else {
                (&self.hi[i] - x) / (&self.hi[i] - &self.apex[i])
            };
            value = value * factor;
        }
        value
    }
}

/// Description of a seed bump placed inside the core of `Ball(0,0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub dim: usize,
    pub delta: Rat,
    pub bump: PlBump,
}

impl SeedSpec {
    /// Default seed for component `component`: a bump with apex on the
    /// 1/32 grid, peak `1 / (component + 1)`.
    pub fn default_for(dim: usize, delta: &Rat, component: usize) -> Result<SeedSpec> {
        let core = core_target(dim, delta)?;
        let mut apex = core.center();
        apex[0] = Rat::new(5, 16);
        let shift = (component % 3) as i64;
        for y in apex.iter_mut().skip(1) {
            *y = Rat::new(16 - 2 * shift, 32);
        }
        let mut lo = core.lo;
        let mut hi = core.hi;
        lo[0] = Rat::new(9, 32);
        hi[0] = Rat::new(11, 32);
        let bump = PlBump::new(lo, apex, hi, Rat::new(1, component as i64 + 1))?;
        SeedSpec::new(dim, delta.clone(), bump)
    }

    pub fn new(dim: usize, delta: Rat, bump: PlBump) -> Result<SeedSpec> {
        if bump.dim() != dim {
            return Err(Error::DimensionMismatch(format!("seed in dimension {} for m = {dim}", bump.dim())));
        }
        let tent = TentProfile::new(delta.clone())?;
        check_in_root_core(&bump.region(), &tent)?;
        Ok(SeedSpec { dim, delta, bump })
    }

    pub fn func(&self) -> Func {
        Func::bump(self.bump.clone())
    }
}

/// The box that normalized seeds are fitted into: a strict sub-box of the
/// core of `Ball(0,0)`.
pub fn core_target(dim: usize, delta: &Rat) -> Result<Region> {
    let tent = TentProfile::new(delta.clone())?;
    let d = tent.delta();
    let lo_cross = (Rat::int(2) * d + Rat::one()) / Rat::int(4);
    let hi_cross = Rat::one() - &lo_cross;
    let mut lo = vec![lo_cross; dim];
    let mut hi = vec![hi_cross; dim];
    lo[0] = Rat::new(9, 32);
    hi[0] = Rat::new(11, 32);
    Ok(Region { lo, hi })
}

/// Closure of the core of `Ball(0,0)`.
pub fn root_core_region(dim: usize, tent: &TentProfile) -> Region {
    CoreBall::new(ball_at(&BallIndex::root()), tent).region(dim)
}

fn check_in_root_core(support: &Region, tent: &TentProfile) -> Result<()> {
    let core = root_core_region(support.dim(), tent);
    let x_ok = support.lo[0] > core.lo[0] && support.hi[0] < core.hi[0];
    let cross_ok = (1..support.dim()).all(|i| support.lo[i] > core.lo[i] && support.hi[i] < core.hi[i]);
    if x_ok && cross_ok {
        Ok(())
    } else {
        Err(Error::Support(format!(
            "support [{:?}, {:?}] is not strictly inside the core of Ball(0,0)",
            support.lo, support.hi
        )))
    }
}

/// One factor of a grid partition of unity: the product over axes of the
/// trapezoid that is 1 on the cell shrunk by `cell_size / 8` and ramps
/// linearly to 0 on the cell grown by `cell_size / 8`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCell {
    pub cell: Vec<i64>,
    pub cell_size: Rat,
}

impl PartitionCell {
    pub fn ramp(cell_size: &Rat) -> Rat {
        cell_size / Rat::int(8)
    }

    /// Closed support: the cell grown by the ramp width on every side.
    pub fn support(&self) -> Region {
        let r = Self::ramp(&self.cell_size);
        let lo = self.cell.iter().map(|&j| Rat::int(j) * &self.cell_size - &r).collect();
        let hi = self.cell.iter().map(|&j| Rat::int(j + 1) * &self.cell_size + &r).collect();
        Region { lo, hi }
    }

    pub fn weight(&self, p: &[Rat]) -> Rat {
        let r = Self::ramp(&self.cell_size);
        let width = Rat::int(2) * &r;
        let mut w = Rat::one();
        for (x, &j) in p.iter().zip(&self.cell) {
            let start = Rat::int(j) * &self.cell_size;
            let end = Rat::int(j + 1) * &self.cell_size;
            let rise = (x - (&start - &r)) / &width;
            let fall = ((&end + &r) - x) / &width;
            let f = rise.min(fall).min(Rat::one());
            if !f.is_positive() {
                return Rat::zero();
            }
            w = w * f;
        }
        w
    }
}

/// Which of the four infinite sums: odd levels for `v1`, even levels from 2
/// for `v2`; lower or upper half of the indices for minus / plus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Selector {
    #[serde(rename = "v1-")]
    V1Minus,
    #[serde(rename = "v1+")]
    V1Plus,
    #[serde(rename = "v2-")]
    V2Minus,
    #[serde(rename = "v2+")]
    V2Plus,
}

impl Selector {
    pub const ALL: [Selector; 4] = [Selector::V1Minus, Selector::V1Plus, Selector::V2Minus, Selector::V2Plus];

    pub fn contains(self, idx: &BallIndex) -> bool {
        let odd = idx.level % 2 == 1;
        let level_ok = match self {
            Selector::V1Minus | Selector::V1Plus => odd,
            Selector::V2Minus | Selector::V2Plus => !odd && idx.level >= 2,
        };
        level_ok && (idx.is_lower_half() == matches!(self, Selector::V1Minus | Selector::V2Minus))
    }

    /// The swindle map that feeds this sum's balls.
    pub fn kind(self) -> SwindleKind {
        match self {
            Selector::V1Minus => SwindleKind::PhiMinus,
            Selector::V1Plus => SwindleKind::PhiPlus,
            Selector::V2Minus => SwindleKind::PsiMinus,
            Selector::V2Plus => SwindleKind::PsiPlus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Selector::V1Minus => "v1-",
            Selector::V1Plus => "v1+",
            Selector::V2Minus => "v2-",
            Selector::V2Plus => "v2+",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Selector> {
        Selector::ALL
            .into_iter()
            .find(|sel| sel.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown sum selector {s:?}")))
    }
}

/// Sequence of maps carrying `Ball(0,0)` onto `Ball(n,k)`: step `j` is a φ
/// map for even `j`, a ψ map for odd `j`, and "plus" exactly when bit `j`
/// of `k` is set (the bit added at step `j` is the top bit of the new index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainWord(pub Vec<SwindleKind>);

pub fn chain_decode(n: u64, k: impl Into<BigUint>) -> Result<ChainWord> {
    Ok(chain_of(&BallIndex::new(n, k)?))
}

pub fn chain_of(idx: &BallIndex) -> ChainWord {
    ChainWord((0..idx.level).map(|j| SwindleKind::from_parts(j % 2 == 0, idx.index.bit(j))).collect())
}

/// Image of `p` under the undamped chain for `idx`; exact for points on core
/// cross-sections.
pub fn chain_image_core(idx: &BallIndex, p: &[Rat]) -> Point {
    let one = Rat::one();
    let mut s = chart_forward(&p[0]);
    for kind in chain_of(idx).0 {
        s = slab_eval(kind, &one, &s);
    }
    let mut q = p.to_vec();
    q[0] = chart_inverse(&s);
    q
}

/// The swindle construction for one seed: the four damped maps and the
/// family of level terms.
#[derive(Debug)]
pub struct Telescope {
    seed: Func,
    dim: usize,
    tent: TentProfile,
    maps: [Homeo; 4],
}

impl Telescope {
    pub fn new(seed: Func, dim: usize, delta: &Rat) -> Result<Arc<Telescope>> {
        let tent = TentProfile::new(delta.clone())?;
        let support = seed
            .support()
            .ok_or_else(|| Error::Support("seed has empty support".into()))?;
        if support.dim() != dim {
            return Err(Error::DimensionMismatch(format!("seed dimension {} vs {dim}", support.dim())));
        }
        check_in_root_core(&support, &tent)?;
        let maps = SwindleKind::ALL.map(|kind| Homeo::swindle(kind, tent.clone(), dim));
        Ok(Arc::new(Telescope { seed, dim, tent, maps }))
    }

    pub fn seed(&self) -> &Func {
        &self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tent(&self) -> &TentProfile {
        &self.tent
    }

    pub fn map(&self, kind: SwindleKind) -> &Homeo {
        &self.maps[kind as usize]
    }

    /// Applies the chain of `idx` to `p`.
    pub fn chain_forward(&self, idx: &BallIndex, p: &[Rat]) -> Point {
        chain_of(idx).0.iter().fold(p.to_vec(), |q, kind| self.map(*kind).eval(&q))
    }

    /// Value of `u^k_n` at `p`.
    pub fn level_term_eval(&self, idx: &BallIndex, p: &[Rat]) -> Rat {
        match locate(p) {
            Some(found) if found == *idx => self.term_at_located(idx, p),
            _ => Rat::zero(),
        }
    }

    /// `(-1/2)^n · seed(chain^(-1)(p))` for `p` already located in `idx`.
    fn term_at_located(&self, idx: &BallIndex, p: &[Rat]) -> Rat {
        // Swindles never move cross coordinates and the seed lives on core
        // cross-sections, where the damping is inactive and the maps are the
        // bare slab maps; elsewhere the value is zero.
        if p[1..].iter().any(|y| !self.tent.in_core(y)) {
            return Rat::zero();
        }
        let one = Rat::one();
        let mut s = chart_forward(&p[0]);
        for kind in chain_of(idx).0.iter().rev() {
            s = slab_inverse(*kind, &one, &s);
        }
        let mut q = p.to_vec();
        q[0] = chart_inverse(&s);
        let value = self.seed.eval(&q);
        if value.is_zero() {
            return value;
        }
        let scale = Rat::pow2_recip(idx.level as usize);
        if idx.level % 2 == 1 {
            -(value * scale)
        } else {
            value * scale
        }
    }

    /// Value of the selected infinite sum at `p`.
    pub fn vsum_eval(&self, selector: Selector, p: &[Rat]) -> Rat {
        match locate(p) {
            Some(idx) if selector.contains(&idx) => self.term_at_located(&idx, p),
            _ => Rat::zero(),
        }
    }

    /// Sum of all level terms with `min_level <= n <= max_level`.
    pub fn shells_eval(&self, min_level: u64, max_level: Option<u64>, p: &[Rat]) -> Rat {
        match locate(p) {
            Some(idx) if idx.level >= min_level && max_level.is_none_or(|m| idx.level <= m) => {
                self.term_at_located(&idx, p)
            }
            _ => Rat::zero(),
        }
    }

    /// Forward image of `p` under the chain, in chart coordinates only;
    /// valid on core cross-sections.
    pub fn chain_forward_core(&self, idx: &BallIndex, p: &[Rat]) -> Point {
        chain_image_core(idx, p)
    }

    /// Region containing the supports of all level terms.
    pub fn family_region(&self) -> Region {
        let mut region = root_core_region(self.dim, &self.tent);
        region.hi[0] = Rat::one();
        region
    }
}

/// A function of the construction addressed by name: `seed`, `u:n:k`, one
/// of the four sums, or `residual:N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedFunc {
    Seed,
    Level(BallIndex),
    Sum(Selector),
    /// `Σ± (v1± − v1± ∘ φ±)` minus the level terms up to `N`.
    Residual(u64),
}

impl NamedFunc {
    pub fn build(&self, telescope: &Arc<Telescope>) -> Func {
        match self {
            NamedFunc::Seed => telescope.seed().clone(),
            NamedFunc::Level(idx) => Func::level_term(telescope, idx.clone()),
            NamedFunc::Sum(sel) => Func::vsum(telescope, *sel),
            NamedFunc::Residual(n) => {
                let mut terms = Vec::new();
                for sel in [Selector::V1Minus, Selector::V1Plus] {
                    let v = Func::vsum(telescope, sel);
                    terms.push(v.clone());
                    terms.push(v.precompose(telescope.map(sel.kind())).neg());
                }
                terms.push(Func::shells(telescope, 0, Some(*n)).neg());
                Func::sum(terms)
            }
        }
    }
}

impl fmt::Display for NamedFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedFunc::Seed => f.write_str("seed"),
            NamedFunc::Level(idx) => write!(f, "u:{}:{}", idx.level, idx.index),
            NamedFunc::Sum(sel) => write!(f, "{sel}"),
            NamedFunc::Residual(n) => write!(f, "residual:{n}"),
        }
    }
}

impl FromStr for NamedFunc {
    type Err = Error;

    fn from_str(s: &str) -> Result<NamedFunc> {
        let bad = || Error::Parse(format!("unknown function {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["seed"] => Ok(NamedFunc::Seed),
            ["u", n, k] => {
                let n: u64 = n.parse().map_err(|_| bad())?;
                let k = BigUint::parse_bytes(k.as_bytes(), 10).ok_or_else(bad)?;
                Ok(NamedFunc::Level(BallIndex::new(n, k)?))
            }
            ["residual", n] => Ok(NamedFunc::Residual(n.parse().map_err(|_| bad())?)),
            [sel] => sel.parse().map(NamedFunc::Sum).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug)]
pub enum FuncNode {
    Zero,
    Bump(PlBump),
    /// `scale · f ∘ homeo^(-1)`.
    Pushforward { f: Func, homeo: Homeo, scale: Rat },
    Sum(Vec<Func>),
    /// `f` times one partition-of-unity factor.
    Windowed { f: Func, cell: PartitionCell },
    LevelTerm { telescope: Arc<Telescope>, index: BallIndex },
    VSum { telescope: Arc<Telescope>, selector: Selector },
    /// Level terms with `min_level <= n <= max_level`.
    Shells { telescope: Arc<Telescope>, min_level: u64, max_level: Option<u64> },
    /// Representative of `f mod 1` in `[-1/2, 1/2)`.
    ModLift { f: Func },
}

/// Shared expression tree for a real-valued compactly supported function.
#[derive(Clone, Debug)]
pub struct Func(Arc<FuncNode>);

impl Func {
    fn wrap(node: FuncNode) -> Func {
        Func(Arc::new(node))
    }

    pub fn zero() -> Func {
        Func::wrap(FuncNode::Zero)
    }

    pub fn bump(bump: PlBump) -> Func {
        Func::wrap(FuncNode::Bump(bump))
    }

    pub fn level_term(telescope: &Arc<Telescope>, index: BallIndex) -> Func {
        Func::wrap(FuncNode::LevelTerm { telescope: telescope.clone(), index })
    }

    pub fn vsum(telescope: &Arc<Telescope>, selector: Selector) -> Func {
        Func::wrap(FuncNode::VSum { telescope: telescope.clone(), selector })
    }

    pub fn shells(telescope: &Arc<Telescope>, min_level: u64, max_level: Option<u64>) -> Func {
        Func::wrap(FuncNode::Shells { telescope: telescope.clone(), min_level, max_level })
    }

    pub fn windowed(&self, cell: PartitionCell) -> Func {
        if self.is_zero() {
            return self.clone();
        }
        Func::wrap(FuncNode::Windowed { f: self.clone(), cell })
    }

    pub fn mod_lift(&self) -> Func {
        Func::wrap(FuncNode::ModLift { f: self.clone() })
    }

    pub fn node(&self) -> &FuncNode {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        matches!(*self.0, FuncNode::Zero)
    }

    /// `scale · self ∘ homeo^(-1)`.
    pub fn pushforward(&self, homeo: &Homeo, scale: Rat) -> Func {
        if self.is_zero() || scale.is_zero() {
            return Func::zero();
        }
        if homeo.is_identity() && scale == Rat::one() {
            return self.clone();
        }
        if let FuncNode::Pushforward { f, homeo: inner, scale: s } = &*self.0 {
            return Func::wrap(FuncNode::Pushforward { f: f.clone(), homeo: homeo.compose(inner), scale: scale * s });
        }
        Func::wrap(FuncNode::Pushforward { f: self.clone(), homeo: homeo.clone(), scale })
    }

    /// `self ∘ homeo`, i.e. `p ↦ self(homeo(p))`.
    pub fn precompose(&self, homeo: &Homeo) -> Func {
        self.pushforward(&homeo.inverse(), Rat::one())
    }

    pub fn scaled(&self, scale: Rat) -> Func {
        self.pushforward(&Homeo::identity(), scale)
    }

    pub fn neg(&self) -> Func {
        self.scaled(-Rat::one())
    }

    pub fn sum(terms: impl IntoIterator<Item = Func>) -> Func {
        let mut flat = Vec::new();
        for t in terms {
            match &*t.0 {
                FuncNode::Zero => {}
                FuncNode::Sum(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(t),
            }
        }
        match flat.len() {
            0 => Func::zero(),
            1 => flat.pop().expect("one term"),
            _ => Func::wrap(FuncNode::Sum(flat)),
        }
    }

    pub fn add(&self, other: &Func) -> Func {
        Func::sum([self.clone(), other.clone()])
    }

    pub fn eval(&self, p: &[Rat]) -> Rat {
        match &*self.0 {
            FuncNode::Zero => Rat::zero(),
            FuncNode::Bump(b) => b.eval(p),
            FuncNode::Pushforward { f, homeo, scale } => {
                let v = f.eval(&homeo.eval_inverse(p));
                if v.is_zero() {
                    v
                } else {
                    v * scale
                }
            }
            FuncNode::Sum(terms) => terms.iter().map(|t| t.eval(p)).sum(),
            FuncNode::Windowed { f, cell } => {
                let w = cell.weight(p);
                if w.is_zero() {
                    w
                } else {
                    f.eval(p) * w
                }
            }
            FuncNode::LevelTerm { telescope, index } => telescope.level_term_eval(index, p),
            FuncNode::VSum { telescope, selector } => telescope.vsum_eval(*selector, p),
            FuncNode::Shells { telescope, min_level, max_level } => telescope.shells_eval(*min_level, *max_level, p),
            FuncNode::ModLift { f } => {
                let v = f.eval(p).fract_floor();
                if v >= Rat::new(1, 2) {
                    v - Rat::one()
                } else {
                    v
                }
            }
        }
    }

    /// A closed box containing the support; `None` for the zero function.
    pub fn support(&self) -> Option<Region> {
        match &*self.0 {
            FuncNode::Zero => None,
            FuncNode::Bump(b) => Some(b.region()),
            FuncNode::Pushforward { f, homeo, .. } => f.support().map(|r| homeo.image_bound(&r)),
            FuncNode::Sum(terms) => terms
                .iter()
                .filter_map(Func::support)
                .reduce(|a, b| a.hull(&b)),
            FuncNode::Windowed { f, cell } => f.support().and_then(|r| r.intersect(&cell.support())),
            FuncNode::LevelTerm { telescope, index } => {
                Some(CoreBall::new(ball_at(index), telescope.tent()).region(telescope.dim()))
            }
            FuncNode::VSum { telescope, .. } | FuncNode::Shells { telescope, .. } => Some(telescope.family_region()),
            FuncNode::ModLift { f } => f.support(),
        }
    }
}

/// A vector of scalar functions (codomain `ℝ^q`).
#[derive(Clone, Debug)]
pub struct FuncVec(pub Vec<Func>);

impl FuncVec {
    pub fn zero(q: usize) -> FuncVec {
        FuncVec(vec![Func::zero(); q])
    }

    /// `f` in component `i`, zero elsewhere.
    pub fn unit(q: usize, i: usize, f: Func) -> FuncVec {
        let mut comps = vec![Func::zero(); q];
        comps[i] = f;
        FuncVec(comps)
    }

    pub fn q(&self) -> usize {
        self.0.len()
    }

    pub fn eval(&self, p: &[Rat]) -> Vec<Rat> {
        self.0.iter().map(|f| f.eval(p)).collect()
    }

    pub fn pushforward(&self, homeo: &Homeo, scale: &Rat) -> FuncVec {
        FuncVec(self.0.iter().map(|f| f.pushforward(homeo, scale.clone())).collect())
    }

    pub fn precompose(&self, homeo: &Homeo) -> FuncVec {
        self.pushforward(&homeo.inverse(), &Rat::one())
    }

    pub fn add(&self, other: &FuncVec) -> FuncVec {
        FuncVec(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Func::is_zero)
    }

    pub fn support(&self) -> Option<Region> {
        self.0.iter().filter_map(Func::support).reduce(|a, b| a.hull(&b))
    }
}
