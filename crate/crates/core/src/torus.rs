//! Elements of the semidirect product acting on `ℝᵐ × T^q` by
//! `(x, a) ↦ (h(x), a + u(x) mod 1)`, and lifting small circle-valued maps
//! back to real-valued ones.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::funcspace::{Func, FuncVec};
use crate::group::{GroupElement, SamplingPlan};
use crate::plcore::{Point, Rat};

/// Canonical representative of `r mod 1` in `[0, 1)`.
pub fn mod1(r: &Rat) -> Rat {
    r.fract_floor()
}

/// Representative of `r mod 1` in `[-1/2, 1/2)`.
pub fn centered_mod1(r: &Rat) -> Rat {
    let v = mod1(r);
    if v >= Rat::new(1, 2) {
        v - Rat::one()
    } else {
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct TorusPoint {
    pub base: Point,
    /// Each entry in `[0, 1)`.
    pub fiber: Vec<Rat>,
}

impl TorusPoint {
    pub fn new(base: Point, fiber: Vec<Rat>) -> TorusPoint {
        TorusPoint { base, fiber: fiber.iter().map(mod1).collect() }
    }

    /// Translate the fiber by `c`.
    pub fn shift(&self, c: &[Rat]) -> TorusPoint {
        TorusPoint::new(self.base.clone(), self.fiber.iter().zip(c).map(|(a, b)| a + b).collect())
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            base: &'a [Rat],
            fiber: Vec<String>,
        }
        Repr { base: &self.base, fiber: self.fiber.iter().map(|a| format!("{a} mod 1")).collect() }.serialize(s)
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; ", crate::plcore::format_point(&self.base))?;
        let fiber: Vec<String> = self.fiber.iter().map(|a| format!("{a} mod 1")).collect();
        write!(f, "{})", fiber.join(", "))
    }
}

/// A map of `ℝᵐ × T^q`.
pub trait TorusMap: Sync {
    fn apply(&self, p: &TorusPoint) -> TorusPoint;
}

/// The action of a semidirect-product element.
#[derive(Clone, Debug)]
pub struct EquivariantHomeo {
    pub source: GroupElement,
}

pub fn realize(e: &GroupElement) -> EquivariantHomeo {
    EquivariantHomeo { source: e.clone() }
}

impl EquivariantHomeo {
    pub fn apply_inverse(&self, p: &TorusPoint) -> TorusPoint {
        let x = self.source.homeo.eval_inverse(&p.base);
        let u = self.source.eval_func(&x);
        TorusPoint::new(x, p.fiber.iter().zip(&u).map(|(a, v)| a - v).collect())
    }
}

impl TorusMap for EquivariantHomeo {
    fn apply(&self, p: &TorusPoint) -> TorusPoint {
        let u = self.source.eval_func(&p.base);
        TorusPoint::new(self.source.eval_homeo(&p.base), p.fiber.iter().zip(&u).map(|(a, v)| a + v).collect())
    }
}

/// `[f, g]^exponent` applied as maps: `f ∘ g ∘ f⁻¹ ∘ g⁻¹`, or its inverse
/// `g ∘ f ∘ g⁻¹ ∘ f⁻¹`.
#[derive(Clone, Debug)]
pub struct MapCommutator {
    pub left: EquivariantHomeo,
    pub right: EquivariantHomeo,
    pub exponent: i8,
}

impl TorusMap for MapCommutator {
    fn apply(&self, p: &TorusPoint) -> TorusPoint {
        let (f, g) = if self.exponent < 0 { (&self.right, &self.left) } else { (&self.left, &self.right) };
        f.apply(&g.apply(&f.apply_inverse(&g.apply_inverse(p))))
    }
}

/// `maps[0] ∘ maps[1] ∘ ...`: the last map is applied first.
pub struct ComposedMaps<'a>(pub Vec<&'a dyn TorusMap>);

impl TorusMap for ComposedMaps<'_> {
    fn apply(&self, p: &TorusPoint) -> TorusPoint {
        self.0.iter().rev().fold(p.clone(), |acc, m| m.apply(&acc))
    }
}

/// `(x, a) ↦ (x, a + a₁ · f(x))`: moves fibers by an amount depending on
/// the fiber coordinate, so it does not commute with fiber translations.
pub struct ShearMap {
    pub profile: Func,
}

impl TorusMap for ShearMap {
    fn apply(&self, p: &TorusPoint) -> TorusPoint {
        let push = &p.fiber[0] * self.profile.eval(&p.base);
        let mut fiber = p.fiber.clone();
        for a in &mut fiber {
            *a = &*a + &push;
        }
        TorusPoint::new(p.base.clone(), fiber)
    }
}

/// Symmetric window `(-w, w)^q` around 0 in the fiber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftWindow {
    half_width: Rat,
}

impl LiftWindow {
    pub fn new(half_width: Rat) -> Result<LiftWindow> {
        if !half_width.is_positive() || half_width >= Rat::new(1, 2) {
            return Err(Error::Window(format!("half-width {half_width} outside (0, 1/2)")));
        }
        Ok(LiftWindow { half_width })
    }

    pub fn half_width(&self) -> &Rat {
        &self.half_width
    }

    pub fn contains(&self, v: &Rat) -> bool {
        v.abs() < self.half_width
    }
}

impl Default for LiftWindow {
    fn default() -> LiftWindow {
        LiftWindow { half_width: Rat::new(1, 4) }
    }
}

/// Real-valued lift of a circle-valued map whose sampled values all lie in
/// the window.
pub fn log_lift(barh: &FuncVec, window: &LiftWindow, plan: &SamplingPlan) -> Result<FuncVec> {
    for p in &plan.points {
        for (i, v) in barh.eval(p).iter().enumerate() {
            let rep = centered_mod1(v);
            if !window.contains(&rep) {
                return Err(Error::Window(format!(
                    "component {i} takes {rep} (mod 1) at {}, outside the window of half-width {}",
                    crate::plcore::format_point(p),
                    window.half_width
                )));
            }
        }
    }
    Ok(FuncVec(barh.0.iter().map(|f| if f.is_zero() { f.clone() } else { f.mod_lift() }).collect()))
}

/// Sampled torus points with fiber shifts.
#[derive(Clone, Debug)]
pub struct TorusPlan {
    pub points: Vec<TorusPoint>,
    pub shifts: Vec<Vec<Rat>>,
}

impl TorusPlan {
    /// Attach random fiber coordinates and shifts (denominators up to
    /// `denom_bound`) to each base point.
    pub fn from_plan(plan: &SamplingPlan, q: usize, rng_seed: u64, denom_bound: u64) -> TorusPlan {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<Rat> {
            (0..q)
                .map(|_| {
                    let d = rng.gen_range(1..=denom_bound.max(1)) as i64;
                    Rat::new(rng.gen_range(0..d), d)
                })
                .collect()
        };
        let mut points = Vec::with_capacity(plan.points.len());
        let mut shifts = Vec::with_capacity(plan.points.len());
        for p in &plan.points {
            points.push(TorusPoint::new(p.clone(), draw(&mut rng)));
            shifts.push(draw(&mut rng));
        }
        TorusPlan { points, shifts }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusWitness {
    pub index: usize,
    pub point: TorusPoint,
    pub left: TorusPoint,
    pub right: TorusPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusReport {
    pub points_checked: usize,
    pub witness: Option<TorusWitness>,
}

impl TorusReport {
    pub fn pass(&self) -> bool {
        self.witness.is_none()
    }
}

/// `f(x, a + c) = f(x, a) + (0, c)` at every plan point.
pub fn check_equivariance(f: &dyn TorusMap, plan: &TorusPlan) -> Result<TorusReport> {
    if plan.points.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let witness = crate::group::first_some(&plan.points, |i, p| {
        let c = &plan.shifts[i];
        let left = f.apply(&p.shift(c));
        let right = f.apply(p).shift(c);
        (left != right).then(|| TorusWitness { index: i, point: p.clone(), left, right })
    });
    Ok(TorusReport { points_checked: plan.points.len(), witness })
}

/// `f = g` at every plan point.
pub fn maps_agree(f: &dyn TorusMap, g: &dyn TorusMap, plan: &TorusPlan) -> Result<TorusReport> {
    if plan.points.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let witness = crate::group::first_some(&plan.points, |i, p| {
        let (left, right) = (f.apply(p), g.apply(p));
        (left != right).then(|| TorusWitness { index: i, point: p.clone(), left, right })
    });
    Ok(TorusReport { points_checked: plan.points.len(), witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{PlBump, SeedSpec};
    use crate::group::{mul, sampling_grid};
    use crate::geometry::Region;
    use crate::plcore::{rat, TentProfile};
    use crate::swindle::{Homeo, SwindleKind};

    fn plan(m: usize) -> SamplingPlan {
        SamplingPlan::from_points(sampling_grid(&Region::unit_cube(m), 9))
    }

    fn seed() -> FuncVec {
        FuncVec(vec![SeedSpec::default_for(2, &rat(1, 8), 0).unwrap().func()])
    }

    fn element() -> GroupElement {
        let h = Homeo::swindle(SwindleKind::PsiPlus, TentProfile::new(rat(1, 8)).unwrap(), 2);
        GroupElement::new(h, seed())
    }

    #[test]
    fn mod_one_reduction() {
        assert_eq!(mod1(&rat(7, 3)), rat(1, 3));
        assert_eq!(mod1(&rat(-1, 3)), rat(2, 3));
        assert_eq!(centered_mod1(&rat(3, 4)), rat(-1, 4));
        assert_eq!(centered_mod1(&rat(1, 2)), rat(-1, 2));
    }

    #[test]
    fn realize_is_a_homomorphism_here() {
        let tp = TorusPlan::from_plan(&plan(2), 1, 4, 16);
        let a = element();
        let b = GroupElement::new(a.homeo.inverse(), seed());
        let ab = realize(&mul(&a, &b).unwrap());
        let (ra, rb) = (realize(&a), realize(&b));
        let composed = ComposedMaps(vec![&ra, &rb]);
        assert!(maps_agree(&ab, &composed, &tp).unwrap().pass());
        assert!(maps_agree(&realize(&GroupElement::identity(1)), &ComposedMaps(vec![]), &tp).unwrap().pass());
    }

    #[test]
    fn inverse_undoes_apply() {
        let f = realize(&element());
        for p in TorusPlan::from_plan(&plan(2), 1, 2, 16).points {
            assert_eq!(f.apply_inverse(&f.apply(&p)), p);
        }
    }

    #[test]
    fn equivariance_checks() {
        let fine = SamplingPlan::from_points(sampling_grid(&Region::unit_cube(2), 32));
        let tp = TorusPlan::from_plan(&fine, 1, 5, 16);
        assert!(check_equivariance(&realize(&element()), &tp).unwrap().pass());
        let shear = ShearMap { profile: seed().0[0].clone() };
        let report = check_equivariance(&shear, &tp).unwrap();
        assert!(!report.pass());
        let w = report.witness.unwrap();
        assert!(!seed().0[0].eval(&w.point.base).is_zero());
    }

    #[test]
    fn lifts() {
        let p = plan(2);
        let window = LiftWindow::default();
        assert!(log_lift(&FuncVec::zero(2), &window, &p).unwrap().is_zero());
        let small = PlBump::new(vec![rat(1, 4); 2], vec![rat(1, 2); 2], vec![rat(3, 4); 2], rat(1, 8)).unwrap();
        let f = FuncVec(vec![Func::bump(small)]);
        let lifted = log_lift(&f, &window, &p).unwrap();
        for x in &p.points {
            assert_eq!(lifted.eval(x), f.eval(x));
        }
        let negative = FuncVec(vec![f.0[0].neg()]);
        let lifted = log_lift(&negative, &window, &p).unwrap();
        for x in &p.points {
            assert_eq!(lifted.eval(x), negative.eval(x));
        }
        let half = PlBump::new(vec![Rat::zero(); 2], vec![rat(1, 2); 2], vec![Rat::one(); 2], rat(1, 2)).unwrap();
        let err = log_lift(&FuncVec(vec![Func::bump(half)]), &window, &p).unwrap_err();
        assert!(matches!(err, Error::Window(_)));
        assert!(LiftWindow::new(rat(1, 2)).is_err());
    }

    #[test]
    fn torus_point_serializes_fiber_mod_one() {
        let p = TorusPoint::new(vec![rat(1, 2)], vec![rat(5, 4)]);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"base":["1/2"],"fiber":["1/4 mod 1"]}"#);
    }
}
