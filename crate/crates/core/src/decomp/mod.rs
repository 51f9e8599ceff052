//! Four-commutator certificates for fiber elements `(id, u)`.
//!
//! The target is fragmented by a PL partition of unity, each piece is moved
//! into the seed box by a diagonal affine conjugator, and each (piece,
//! component) pair contributes the four swindle commutators. Only the fiber
//! part is certified: for a general element `(h, w)` the base factor
//! `(h, 0)` split off by [`split_general_element`] is left alone.

mod certificate;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{core_target, root_core_region, Func, FuncVec, PartitionCell, PlBump, Selector, Telescope};
use crate::geometry::Region;
use crate::group::{self, equal_on_samples, Frame, GroupElement, PlanConfig, SamplingPlan};
use crate::plcore::{Point, Rat, TentProfile};
use crate::swindle::{DiagAffine, Homeo, SwindleKind};

pub use certificate::{
    CheckRecord, Certificate, Convention, FactorDiagnostic, FactorRecord, FragmentRecord, SeedRecord,
    VerificationReport, WitnessRecord, CERTIFICATE_VERSION,
};

/// Factor order inside one (fragment, component) block, with exponents.
pub const FACTOR_PATTERN: [(Selector, i8); 4] =
    [(Selector::V1Minus, -1), (Selector::V1Plus, -1), (Selector::V2Minus, 1), (Selector::V2Plus, 1)];

/// Number of plan points used for per-factor diagnostics.
pub const DIAGNOSTIC_POINTS: usize = 500;

/// Built-in target functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedChoice {
    /// Bumps already inside the seed box.
    Default,
    /// Bumps on `[2,3]^m`, which need a conjugator.
    Offset,
    /// Bumps on `[0,3/2] × [0,1]^(m-1)`, which need fragmentation.
    Wide,
}

impl SeedChoice {
    pub fn name(self) -> &'static str {
        match self {
            SeedChoice::Default => "default",
            SeedChoice::Offset => "offset",
            SeedChoice::Wide => "wide",
        }
    }

    /// One bump per fiber component.
    pub fn components(self, m: usize, q: usize, delta: &Rat) -> Result<Vec<PlBump>> {
        (0..q).map(|i| self.component(m, delta, i)).collect()
    }

    fn component(self, m: usize, delta: &Rat, i: usize) -> Result<PlBump> {
        let peak = Rat::new(1, i as i64 + 1);
        let nudge = Rat::new((i % 3) as i64, 16);
        match self {
            SeedChoice::Default => Ok(crate::funcspace::SeedSpec::default_for(m, delta, i)?.bump),
            SeedChoice::Offset => {
                let mut apex = vec![Rat::new(5, 2); m];
                for y in apex.iter_mut().skip(1) {
                    *y = &*y - &nudge;
                }
                PlBump::new(vec![Rat::int(2); m], apex, vec![Rat::int(3); m], peak)
            }
            SeedChoice::Wide => {
                let mut apex = vec![Rat::new(1, 2); m];
                apex[0] = Rat::new(3, 4);
                for y in apex.iter_mut().skip(1) {
                    *y = &*y - &nudge;
                }
                let mut hi = vec![Rat::one(); m];
                hi[0] = Rat::new(3, 2);
                PlBump::new(vec![Rat::zero(); m], apex, hi, peak)
            }
        }
    }
}

impl fmt::Display for SeedChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeedChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<SeedChoice> {
        [SeedChoice::Default, SeedChoice::Offset, SeedChoice::Wide]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown seed {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildConfig {
    pub m: usize,
    pub q: usize,
    pub delta: Rat,
    pub seed: SeedChoice,
    /// Grid cell size for fragmentation; `None` disables fragmentation and
    /// the target must then fit one enlarged unit cell.
    pub fragment_cell: Option<Rat>,
    pub plan: PlanConfig,
}

impl BuildConfig {
    pub fn new(m: usize, q: usize, delta: Rat) -> BuildConfig {
        BuildConfig {
            m,
            q,
            delta,
            seed: SeedChoice::Default,
            fragment_cell: None,
            plan: PlanConfig::stratified(10_000, 0),
        }
    }
}

fn bump_vec(bumps: &[PlBump]) -> FuncVec {
    FuncVec(bumps.iter().cloned().map(Func::bump).collect())
}

fn cell_containing(support: &Region, cell_size: &Rat) -> Option<PartitionCell> {
    let r = PartitionCell::ramp(cell_size);
    let cell: Vec<i64> = support
        .lo
        .iter()
        .map(|lo| i64::try_from(((lo + &r) / cell_size).floor()).ok())
        .collect::<Option<_>>()?;
    let candidate = PartitionCell { cell, cell_size: cell_size.clone() };
    let ok = candidate.support().lo.iter().zip(&support.lo).all(|(a, b)| a <= b)
        && candidate.support().hi.iter().zip(&support.hi).all(|(a, b)| a >= b);
    ok.then_some(candidate)
}

/// Diagonal affine `a` with `u ∘ a⁻¹` supported in the seed box; the
/// identity when `u` already sits in the core of `Ball(0,0)`. With
/// `cell_size` set, `u` must fit one enlarged grid cell.
pub fn normalize_support(u: &FuncVec, delta: &Rat, cell_size: Option<&Rat>) -> Result<(DiagAffine, FuncVec)> {
    let support = u.support().ok_or_else(|| Error::Support("function has empty support".into()))?;
    if let Some(size) = cell_size {
        if !size.is_positive() {
            return Err(Error::Config("cell size must be positive".into()));
        }
        if cell_containing(&support, size).is_none() {
            return Err(Error::Support(format!(
                "support [{:?}, {:?}] spans several cells of size {size}",
                support.lo, support.hi
            )));
        }
    }
    let tent = TentProfile::new(delta.clone())?;
    let a = if support.inside_open(&root_core_region(support.dim(), &tent)) {
        DiagAffine::identity(support.dim())
    } else {
        DiagAffine::fit(&support, &core_target(support.dim(), delta)?)?
    };
    let normalized = u.pushforward(&Homeo::affine(a.clone()), &Rat::one());
    Ok((a, normalized))
}

/// A piece of a fragmented function: `u` times the weight of one cell.
#[derive(Clone, Debug)]
pub struct Piece {
    pub cell: PartitionCell,
    pub support: Region,
    pub func: FuncVec,
}

/// Split `u` over the cells of a grid of side `cell_size`; the pieces sum to
/// `u` and each is supported in one enlarged cell.
pub fn fragment(u: &FuncVec, cell_size: &Rat) -> Result<Vec<Piece>> {
    if !cell_size.is_positive() {
        return Err(Error::Config("cell size must be positive".into()));
    }
    let Some(support) = u.support() else {
        return Ok(Vec::new());
    };
    let r = PartitionCell::ramp(cell_size);
    let to_i64 = |v: Rat| i64::try_from(v.floor()).map_err(|_| Error::Config("support too far out for the grid".into()));
    let ranges: Vec<(i64, i64)> = support
        .lo
        .iter()
        .zip(&support.hi)
        .map(|(lo, hi)| Ok((to_i64((lo - &r) / cell_size)?, to_i64((hi + &r) / cell_size)?)))
        .collect::<Result<_>>()?;
    let mut pieces = Vec::new();
    let mut cell: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let pc = PartitionCell { cell: cell.clone(), cell_size: cell_size.clone() };
        let cell_support = pc.support();
        if cell_support.overlaps_open(&support) {
            if let Some(meet) = cell_support.intersect(&support) {
                let func = FuncVec(u.0.iter().map(|f| f.windowed(pc.clone())).collect());
                pieces.push(Piece { cell: pc, support: meet, func });
            }
        }
        let mut axis = 0;
        loop {
            if axis == cell.len() {
                return Ok(pieces);
            }
            if cell[axis] < ranges[axis].1 {
                cell[axis] += 1;
                break;
            }
            cell[axis] = ranges[axis].0;
            axis += 1;
        }
    }
}

/// Build the certificate for the configured target.
pub fn build_certificate(config: &BuildConfig) -> Result<Certificate> {
    if config.m == 0 || config.q == 0 {
        return Err(Error::Config("m and q must be positive".into()));
    }
    TentProfile::new(config.delta.clone())?;
    let components = config.seed.components(config.m, config.q, &config.delta)?;
    let u = bump_vec(&components);
    let support = u.support().ok_or_else(|| Error::Support("target has empty support".into()))?;
    let seed_box = core_target(config.m, &config.delta)?;
    let tent = TentProfile::new(config.delta.clone())?;

    let mut fragments = Vec::new();
    match &config.fragment_cell {
        None => {
            let (conjugator, _) = normalize_support(&u, &config.delta, Some(&Rat::one()))?;
            fragments.push(FragmentRecord {
                index: 0,
                cell: None,
                support,
                conjugator,
                components: components.clone(),
            });
        }
        Some(size) => {
            for piece in fragment(&u, size)? {
                let conjugator = if piece.support.inside_open(&root_core_region(config.m, &tent)) {
                    DiagAffine::identity(config.m)
                } else {
                    DiagAffine::fit(&piece.support, &seed_box)?
                };
                fragments.push(FragmentRecord {
                    index: fragments.len(),
                    cell: Some(piece.cell),
                    support: piece.support,
                    conjugator,
                    components: components.clone(),
                });
            }
        }
    }

    let mut factors = Vec::with_capacity(4 * fragments.len() * config.q);
    for frag in &fragments {
        for component in 0..config.q {
            for (selector, exponent) in FACTOR_PATTERN {
                factors.push(FactorRecord { fragment: frag.index, component, kind: selector.kind(), selector, exponent });
            }
        }
    }

    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        m: config.m,
        q: config.q,
        delta: config.delta.clone(),
        convention: Convention::default(),
        seed: SeedRecord { choice: config.seed, components },
        fragments,
        factors,
        sampling_echo: config.plan.clone(),
    })
}

/// The group elements a factor record stands for.
#[derive(Clone, Debug)]
pub struct FactorElements {
    /// `(c⁻¹ ∘ map⁻¹ ∘ c, 0)`.
    pub left: GroupElement,
    /// `(id, e_component · sum ∘ c)`.
    pub right: GroupElement,
    /// `[left, right]^exponent`.
    pub factor: GroupElement,
    /// `exponent · (sum ∘ c ∘ map' − sum ∘ c)`, the function part the factor
    /// should have, where `map' = c⁻¹ ∘ map ∘ c`.
    pub expected_func: FuncVec,
}

impl FragmentRecord {
    /// Component `i` of this piece in original coordinates.
    pub fn piece(&self, i: usize) -> Func {
        let f = Func::bump(self.components[i].clone());
        match &self.cell {
            Some(cell) => f.windowed(cell.clone()),
            None => f,
        }
    }

    pub fn frame(&self, seed_box: &Region) -> Frame {
        let mut anchor = self.conjugator.eval(&self.components[0].apex);
        if !seed_box.contains(&anchor) {
            anchor = seed_box.center();
        }
        Frame { conjugator: self.conjugator.clone(), seed_region: seed_box.clone(), anchor }
    }
}

impl Certificate {
    /// `(id, u)` for the recorded target.
    pub fn target(&self) -> GroupElement {
        GroupElement::fiber(bump_vec(&self.seed.components))
    }

    /// Telescope for one (fragment, component); `None` when the piece is zero.
    fn telescope(&self, fragment: usize, component: usize) -> Result<Option<Arc<Telescope>>> {
        let frag = &self.fragments[fragment];
        let piece = frag.piece(component);
        let Some(support) = piece.support() else {
            return Ok(None);
        };
        if !support.overlaps_open(&frag.support) {
            return Ok(None);
        }
        let normalized = piece.pushforward(&Homeo::affine(frag.conjugator.clone()), Rat::one());
        Telescope::new(normalized, self.m, &self.delta).map(Some)
    }

    /// Group elements of every factor, in order.
    pub fn factor_elements(&self) -> Result<Vec<FactorElements>> {
        let tent = TentProfile::new(self.delta.clone())?;
        let mut telescopes: HashMap<(usize, usize), Option<Arc<Telescope>>> = HashMap::new();
        let mut out = Vec::with_capacity(self.factors.len());
        for rec in &self.factors {
            let key = (rec.fragment, rec.component);
            if let std::collections::hash_map::Entry::Vacant(slot) = telescopes.entry(key) {
                slot.insert(self.telescope(rec.fragment, rec.component)?);
            }
            let c = Homeo::affine(self.fragments[rec.fragment].conjugator.clone());
            let map = Homeo::swindle(rec.kind, tent.clone(), self.m);
            let conj_map = c.inverse().compose(&map).compose(&c);
            let sum = match &telescopes[&key] {
                Some(t) => Func::vsum(t, rec.selector).precompose(&c),
                None => Func::zero(),
            };
            let left = GroupElement::base(conj_map.inverse(), self.q);
            let right = GroupElement::fiber(FuncVec::unit(self.q, rec.component, sum.clone()));
            let comm = group::commutator(&left, &right)?;
            let factor = if rec.exponent < 0 { group::inv(&comm) } else { comm };
            let diff = sum.precompose(&conj_map).add(&sum.neg());
            let signed = if rec.exponent < 0 { diff.neg() } else { diff };
            let expected_func = FuncVec::unit(self.q, rec.component, signed);
            out.push(FactorElements { left, right, factor, expected_func });
        }
        Ok(out)
    }

    /// Deterministic plan from `config`, stratified around every fragment.
    pub fn plan(&self, config: &PlanConfig) -> Result<SamplingPlan> {
        let seed_box = core_target(self.m, &self.delta)?;
        let frames: Vec<Frame> = self.fragments.iter().map(|f| f.frame(&seed_box)).collect();
        SamplingPlan::build(config, self.m, &frames)
    }
}

fn check_record(report: group::EqualityReport) -> CheckRecord {
    CheckRecord { pass: report.pass(), points_checked: report.points_checked, witness: report.witness.map(Into::into) }
}

/// Multiply out the factors literally and compare with `(id, u)` exactly at
/// every plan point. Also runs the abelian-collapse check and per-factor
/// support diagnostics on a prefix of the plan.
pub fn verify_certificate(cert: &Certificate, plan: &SamplingPlan) -> Result<VerificationReport> {
    cert.validate()?;
    if plan.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let elements = cert.factor_elements()?;
    let target = cert.target();
    let product = group::product(cert.q, elements.iter().map(|e| &e.factor))?;
    let product_check = check_record(equal_on_samples(&product, &target, plan)?);

    let collapsed = elements.iter().fold(FuncVec::zero(cert.q), |acc, e| acc.add(&e.expected_func));
    let collapse_check = check_record(equal_on_samples(&GroupElement::fiber(collapsed), &target, plan)?);

    let prefix = &plan.points[..plan.points.len().min(DIAGNOSTIC_POINTS)];
    let factors = cert
        .factors
        .iter()
        .zip(&elements)
        .enumerate()
        .map(|(index, (rec, el))| diagnose(index, rec, el, prefix))
        .collect();

    Ok(VerificationReport {
        version: CERTIFICATE_VERSION,
        pass: product_check.pass && collapse_check.pass,
        plan: plan.config.clone().unwrap_or_else(|| cert.sampling_echo.clone()),
        layout: plan.layout.clone(),
        product: product_check,
        abelian_collapse: collapse_check,
        factors,
    })
}

fn diagnose(index: usize, rec: &FactorRecord, el: &FactorElements, points: &[Point]) -> FactorDiagnostic {
    let support = el.factor.func.support().map(|r| r.hull(&el.left.homeo.image_bound(&r)));
    let mut nonzero = 0;
    let mut escapes = 0;
    for p in points {
        let moved = el.factor.eval_homeo(p) != *p;
        let active = moved || el.factor.eval_func(p).iter().any(|v| !v.is_zero());
        if active {
            nonzero += 1;
            if !support.as_ref().is_some_and(|s| s.contains(p)) {
                escapes += 1;
            }
        }
    }
    FactorDiagnostic {
        index,
        fragment: rec.fragment,
        component: rec.component,
        kind: rec.kind,
        selector: rec.selector,
        exponent: rec.exponent,
        support,
        sampled: points.len(),
        nonzero,
        escapes,
    }
}

/// `(h, w) = (id, w ∘ h⁻¹) · (h, 0)`.
pub fn split_general_element(e: &GroupElement) -> (GroupElement, GroupElement) {
    let pure = GroupElement::fiber(e.func.pushforward(&e.homeo, &Rat::one()));
    let base = GroupElement::base(e.homeo.clone(), e.q());
    (pure, base)
}

/// A single edit to a certificate that should make verification fail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tampering {
    FlipExponent { factor: usize },
    /// Replace the map by its sibling of the other sign.
    SwapKind { factor: usize },
    /// Add `1/97` to the peak of one fragment's copy of a bump.
    PerturbPeak { fragment: usize, component: usize },
    /// Move one apex coordinate of a fragment's bump a third of the way
    /// toward the lower edge.
    PerturbApex { fragment: usize, component: usize, axis: usize },
}

impl Tampering {
    pub fn random(cert: &Certificate, rng: &mut impl Rng) -> Tampering {
        let fragment = rng.gen_range(0..cert.fragments.len());
        let component = rng.gen_range(0..cert.q);
        match rng.gen_range(0..4) {
            0 => Tampering::FlipExponent { factor: rng.gen_range(0..cert.factors.len()) },
            1 => Tampering::SwapKind { factor: rng.gen_range(0..cert.factors.len()) },
            2 => Tampering::PerturbPeak { fragment, component },
            _ => Tampering::PerturbApex { fragment, component, axis: rng.gen_range(0..cert.m) },
        }
    }

    pub fn apply(&self, cert: &mut Certificate) {
        match *self {
            Tampering::FlipExponent { factor } => {
                let f = &mut cert.factors[factor];
                f.exponent = -f.exponent;
            }
            Tampering::SwapKind { factor } => {
                let f = &mut cert.factors[factor];
                f.kind = SwindleKind::from_parts(f.kind.is_phi(), !f.kind.is_plus());
            }
            Tampering::PerturbPeak { fragment, component } => {
                let bump = &mut cert.fragments[fragment].components[component];
                bump.peak = &bump.peak + Rat::new(1, 97);
            }
            Tampering::PerturbApex { fragment, component, axis } => {
                let bump = &mut cert.fragments[fragment].components[component];
                let shift = (&bump.apex[axis] - &bump.lo[axis]) / Rat::int(3);
                bump.apex[axis] = &bump.apex[axis] - shift;
            }
        }
    }
}
