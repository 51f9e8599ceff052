//! The four global swindle homeomorphisms and the homeomorphism handle algebra.
//!
//! Each kind is one monotone piecewise-linear map `F` of the chart coordinate
//! (see [`slab`]) acting on the first coordinate, conjugated through the chart
//! and damped by a cross-section tent so that it is the identity outside the
//! unit cube. On core cross-sections the damping is inactive and the map
//! carries every source ball onto its target ball.

mod handle;
pub mod slab;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ball_at, chart_forward, chart_inverse, interval_at, locate, BallIndex, CoreBall};
use crate::plcore::{format_point, PlMap1D, Point, Rat, TentProfile};

pub use handle::{DiagAffine, Homeo, HomeoNode};
pub use slab::{slab_eval, slab_inverse};

/// Largest window index accepted by [`verify_box_mapping`].
pub const BOX_CHECK_BOUND: u64 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwindleKind {
    PhiMinus,
    PhiPlus,
    PsiMinus,
    PsiPlus,
}

impl SwindleKind {
    pub const ALL: [SwindleKind; 4] =
        [SwindleKind::PhiMinus, SwindleKind::PhiPlus, SwindleKind::PsiMinus, SwindleKind::PsiPlus];

    /// φ kinds move even levels to odd ones, ψ kinds odd to even.
    pub fn is_phi(self) -> bool {
        matches!(self, SwindleKind::PhiMinus | SwindleKind::PhiPlus)
    }

    pub fn is_plus(self) -> bool {
        matches!(self, SwindleKind::PhiPlus | SwindleKind::PsiPlus)
    }

    pub fn from_parts(phi: bool, plus: bool) -> SwindleKind {
        match (phi, plus) {
            (true, false) => SwindleKind::PhiMinus,
            (true, true) => SwindleKind::PhiPlus,
            (false, false) => SwindleKind::PsiMinus,
            (false, true) => SwindleKind::PsiPlus,
        }
    }

    /// Target offset in units of one slab: 0 for minus, 1/2 for plus.
    pub(crate) fn offset(self) -> Rat {
        if self.is_plus() {
            Rat::new(1, 2)
        } else {
            Rat::zero()
        }
    }

    /// Chart coordinate where the `n`-th window starts; also its source level.
    pub fn window_base(self, n: u64) -> u64 {
        2 * n + u64::from(!self.is_phi())
    }

    /// Target of source ball `(level, k)`; `None` when `level` is not a
    /// source level of this kind.
    pub fn target_of(self, source: &BallIndex) -> Option<BallIndex> {
        if source.level.is_multiple_of(2) != self.is_phi() {
            return None;
        }
        let mut index = source.index.clone();
        if self.is_plus() {
            index += BigUint::one() << source.level as usize;
        }
        Some(BallIndex { level: source.level + 1, index })
    }

    pub fn name(self) -> &'static str {
        match self {
            SwindleKind::PhiMinus => "phi-minus",
            SwindleKind::PhiPlus => "phi-plus",
            SwindleKind::PsiMinus => "psi-minus",
            SwindleKind::PsiPlus => "psi-plus",
        }
    }
}

impl fmt::Display for SwindleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SwindleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<SwindleKind> {
        SwindleKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().replace('-', "_") == s)
            .ok_or_else(|| Error::Parse(format!("unknown map kind {s:?}")))
    }
}

/// Materialized slab map of the `n`-th window: fixed window endpoints and
/// every source interval endpoint paired with its target endpoint.
pub fn window_map(kind: SwindleKind, n: u64) -> PlMap1D {
    let base = kind.window_base(n);
    let count = BigUint::one() << base as usize;
    let mut bps = Vec::with_capacity(2 * (1usize << base.min(24)) + 2);
    bps.push((Rat::int(base), Rat::int(base)));
    let mut k = BigUint::from(0u32);
    while k < count {
        let src = BallIndex { level: base, index: k.clone() };
        let tgt = kind.target_of(&src).expect("window base is a source level");
        let (si, ti) = (interval_at(&src), interval_at(&tgt));
        bps.push((si.lo, ti.lo));
        bps.push((si.hi, ti.hi));
        k += 1u32;
    }
    bps.push((Rat::int(base + 2), Rat::int(base + 2)));
    PlMap1D::new(bps).expect("window breakpoints are increasing")
}

/// One of the four global maps, damped by a cross-section tent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwindleHomeo {
    pub kind: SwindleKind,
    pub damping: TentProfile,
    pub dim: usize,
}

impl SwindleHomeo {
    pub fn new(kind: SwindleKind, damping: TentProfile, dim: usize) -> SwindleHomeo {
        SwindleHomeo { kind, damping, dim }
    }

    /// Damping factor at `p`, or `None` where the map is the identity.
    fn active_lambda(&self, p: &[Rat]) -> Option<Rat> {
        let x1 = p.first()?;
        if !x1.is_positive() || *x1 >= Rat::one() {
            return None;
        }
        let lambda = self.damping.damping(&p[1..]);
        if lambda.is_zero() {
            None
        } else {
            Some(lambda)
        }
    }

    pub fn eval(&self, p: &[Rat]) -> Point {
        let mut out = p.to_vec();
        if let Some(lambda) = self.active_lambda(p) {
            let s = chart_forward(&p[0]);
            out[0] = chart_inverse(&slab_eval(self.kind, &lambda, &s));
        }
        out
    }

    pub fn eval_inverse(&self, p: &[Rat]) -> Point {
        let mut out = p.to_vec();
        if let Some(lambda) = self.active_lambda(p) {
            let t = chart_forward(&p[0]);
            out[0] = chart_inverse(&slab_inverse(self.kind, &lambda, &t));
        }
        out
    }
}

/// One verified source-to-target pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxCheck {
    pub source: BallIndex,
    pub target: BallIndex,
    pub core_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxMappingReport {
    pub kind: SwindleKind,
    pub max_window: u64,
    pub checks: Vec<BoxCheck>,
}

impl BoxMappingReport {
    pub fn boxes(&self) -> usize {
        self.checks.len()
    }
}

/// Checks that the slab map of `kind` sends every source interval of windows
/// `0..=n_max` exactly onto its target interval, and that sampled core points
/// of each source ball land in the target core and invert back.
pub fn verify_box_mapping(kind: SwindleKind, n_max: u64, delta: &Rat, dim: usize) -> Result<BoxMappingReport> {
    if n_max > BOX_CHECK_BOUND {
        return Err(Error::Config(format!("n_max {n_max} exceeds bound {BOX_CHECK_BOUND}")));
    }
    if dim == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    let tent = TentProfile::new(delta.clone())?;
    let homeo = SwindleHomeo::new(kind, tent.clone(), dim);
    let one = Rat::one();
    let cross_samples = [delta.clone(), Rat::new(1, 2), &one - delta];
    let mut checks = Vec::new();
    for n in 0..=n_max {
        let base = kind.window_base(n);
        let count = 1u64 << base;
        for k in 0..count {
            let src = BallIndex { level: base, index: k.into() };
            let tgt = kind.target_of(&src).expect("source level");
            let (si, ti) = (interval_at(&src), interval_at(&tgt));
            for (from, to) in [(&si.lo, &ti.lo), (&si.hi, &ti.hi)] {
                let got = slab_eval(kind, &one, from);
                if got != *to {
                    return Err(Error::Verification(format!(
                        "{kind}: endpoint {from} of {src} maps to {got}, expected {to} of {tgt}"
                    )));
                }
            }
            let target_core = CoreBall::new(ball_at(&tgt), &tent);
            let mut samples = 0;
            for (i, frac) in [Rat::new(1, 3), Rat::new(1, 2)].iter().enumerate() {
                let s = &si.lo + (&si.hi - &si.lo) * frac;
                let mut p = vec![cross_samples[(i + k as usize) % 3].clone(); dim];
                p[0] = chart_inverse(&s);
                let image = homeo.eval(&p);
                if !target_core.contains(&image) || locate(&image).as_ref() != Some(&tgt) {
                    return Err(Error::Verification(format!(
                        "{kind}: core point {} of {src} maps to {} outside core of {tgt}",
                        format_point(&p),
                        format_point(&image)
                    )));
                }
                if homeo.eval_inverse(&image) != p {
                    return Err(Error::Verification(format!(
                        "{kind}: inverse does not return {}",
                        format_point(&p)
                    )));
                }
                samples += 1;
            }
            checks.push(BoxCheck { source: src, target: tgt, core_samples: samples });
        }
    }
    Ok(BoxMappingReport { kind, max_window: n_max, checks })
}

/// Min and max difference quotient of the window map in x-coordinates on a
/// core cross-section, per window. A diagnostic only: the quotients spread
/// apart as windows approach the face `x₁ = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeRow {
    pub window: u64,
    pub min: Rat,
    pub max: Rat,
}

pub fn slope_report(kind: SwindleKind, windows: u64) -> Vec<SlopeRow> {
    (0..windows)
        .map(|n| {
            let map = window_map(kind, n);
            let xs: Vec<(Rat, Rat)> = map
                .breakpoints()
                .iter()
                .map(|(s, t)| {
                    let x = if s.is_positive() { chart_inverse(s) } else { Rat::zero() };
                    let y = if t.is_positive() { chart_inverse(t) } else { Rat::zero() };
                    (x, y)
                })
                .collect();
            let mut quotients = xs.windows(2).map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0));
            let first = quotients.next().expect("at least four breakpoints");
            let (min, max) = quotients.fold((first.clone(), first), |(lo, hi), q| (lo.min(q.clone()), hi.max(q)));
            SlopeRow { window: n, min, max }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plcore::rat;
    use num_bigint::BigInt;

    fn bps(map: &PlMap1D) -> Vec<(Rat, Rat)> {
        map.breakpoints().to_vec()
    }

    /// Checks `|x₁' - x₁| <= 2^(1-2j)` and returns the displacements.
    fn face_displacements(h: &SwindleHomeo, slabs: impl Iterator<Item = (usize, Rat)>) -> Vec<Rat> {
        slabs
            .map(|(j, s)| {
                let p = vec![chart_inverse(&s), rat(1, 2)];
                let d = (&h.eval(&p)[0] - &p[0]).abs();
                assert!(d <= Rat::pow2_recip(2 * j - 1), "{} j={j}: displacement {d}", h.kind);
                d
            })
            .collect()
    }

    fn assert_summable(kind: SwindleKind, ds: &[Rat]) {
        assert!(ds.windows(2).all(|w| w[1] <= w[0]), "{kind}: not monotone");
        let total: Rat = ds.iter().cloned().sum();
        assert!(total <= Rat::one(), "{kind}: partial sum {total}");
    }

    #[test]
    fn displacement_vanishes_toward_the_face() {
        let pow2 = |j: usize| Rat::int(BigInt::from(1u8) << j);
        for kind in SwindleKind::ALL {
            let h = SwindleHomeo::new(kind, TentProfile::new(rat(1, 8)).unwrap(), 2);
            // x₁ = 1 - 2^-j lands in an outer piece whose image carries
            // 2^j-bit denominators, so exact evaluation stops at j = 16.
            let face = face_displacements(&h, (2..=16).map(|j| (j, pow2(j) - Rat::one())));
            assert_summable(kind, &face);
            // Mid-window points never materialize the outer breakpoints.
            let offset = if kind.is_phi() { rat(1, 2) } else { rat(3, 2) };
            let mid = face_displacements(&h, (2..=30).map(|j| (j, pow2(j) + &offset)));
            assert!(mid.iter().all(|d| d.is_positive()), "{kind}: mid-window point fixed");
            assert_summable(kind, &mid);
        }
    }

    #[test]
    fn first_windows() {
        assert_eq!(
            bps(&window_map(SwindleKind::PhiMinus, 0)),
            vec![(rat(0, 1), rat(0, 1)), (rat(1, 3), rat(7, 6)), (rat(2, 3), rat(8, 6)), (rat(2, 1), rat(2, 1))]
        );
        assert_eq!(
            bps(&window_map(SwindleKind::PhiPlus, 0)),
            vec![(rat(0, 1), rat(0, 1)), (rat(1, 3), rat(10, 6)), (rat(2, 3), rat(11, 6)), (rat(2, 1), rat(2, 1))]
        );
        let psi = window_map(SwindleKind::PsiMinus, 0);
        assert_eq!(psi.eval(&rat(7, 6)), rat(25, 12));
        assert_eq!(psi.eval(&rat(8, 6)), rat(26, 12));
        assert_eq!(psi.eval(&rat(10, 6)), rat(28, 12));
        assert_eq!(psi.eval(&rat(11, 6)), rat(29, 12));
        assert_eq!(psi.len(), 2 * 2 + 2);
    }

    #[test]
    fn window_maps_agree_with_lazy_evaluator() {
        for kind in SwindleKind::ALL {
            for n in 0..4 {
                let map = window_map(kind, n);
                let lo = Rat::int(kind.window_base(n));
                for i in 0..=97 {
                    let s = &lo + rat(2 * i, 97);
                    assert_eq!(map.eval(&s), slab_eval(kind, &Rat::one(), &s), "{kind} window {n} at {s}");
                }
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let tent = TentProfile::new(rat(1, 8)).unwrap();
        let phi = SwindleHomeo::new(SwindleKind::PhiMinus, tent, 2);
        assert_eq!(phi.eval(&[rat(1, 3), rat(1, 2)]), vec![rat(5, 9), rat(1, 2)]);
        assert_eq!(phi.eval_inverse(&[rat(5, 9), rat(1, 2)]), vec![rat(1, 3), rat(1, 2)]);
        assert_eq!(phi.eval(&[rat(1, 3), rat(0, 1)]), vec![rat(1, 3), rat(0, 1)]);
        assert_eq!(phi.eval(&[rat(1, 1), rat(1, 2)]), vec![rat(1, 1), rat(1, 2)]);
        assert_eq!(phi.eval(&[rat(3, 2), rat(1, 2)]), vec![rat(3, 2), rat(1, 2)]);
    }

    #[test]
    fn smallest_box_check() {
        let report = verify_box_mapping(SwindleKind::PhiMinus, 0, &rat(1, 8), 2).unwrap();
        assert_eq!(report.boxes(), 1);
        assert_eq!(report.checks[0].target, BallIndex::new(1, 0u32).unwrap());
        assert!(verify_box_mapping(SwindleKind::PhiMinus, 7, &rat(1, 8), 2).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in SwindleKind::ALL {
            assert_eq!(kind.name().parse::<SwindleKind>().unwrap(), kind);
        }
        assert!("phi".parse::<SwindleKind>().is_err());
    }

    #[test]
    fn slopes_are_positive() {
        for row in slope_report(SwindleKind::PsiPlus, 3) {
            assert!(row.min.is_positive() && row.min <= row.max);
        }
    }
}
