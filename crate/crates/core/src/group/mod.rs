//! The semidirect product of compactly supported homeomorphisms with
//! compactly supported `ℝ^q`-valued functions.
//!
//! Composition is right to left and the law is
//! `(h₁, u₁)·(h₂, u₂) = (h₁ ∘ h₂, u₁ ∘ h₂ + u₂)`, which makes
//! `(x, a) ↦ (h(x), a + u(x))` a homomorphism into maps of `ℝᵐ × ℝ^q`.
//! With this law `[(g⁻¹, 0), (id, v)] = (id, v ∘ g − v)`.

mod sampling;

use crate::error::{Error, Result};
use crate::funcspace::FuncVec;
use crate::plcore::{Point, Rat};
use crate::swindle::Homeo;

pub use sampling::{grid_points as sampling_grid, Frame, PlanConfig, PlanLayout, SamplingPlan, Strategy};

#[derive(Clone, Debug)]
pub struct GroupElement {
    pub homeo: Homeo,
    pub func: FuncVec,
}

impl GroupElement {
    pub fn new(homeo: Homeo, func: FuncVec) -> GroupElement {
        GroupElement { homeo, func }
    }

    pub fn identity(q: usize) -> GroupElement {
        GroupElement { homeo: Homeo::identity(), func: FuncVec::zero(q) }
    }

    /// `(h, 0)`.
    pub fn base(homeo: Homeo, q: usize) -> GroupElement {
        GroupElement { homeo, func: FuncVec::zero(q) }
    }

    /// `(id, u)`.
    pub fn fiber(func: FuncVec) -> GroupElement {
        GroupElement { homeo: Homeo::identity(), func }
    }

    pub fn q(&self) -> usize {
        self.func.q()
    }

    pub fn eval_homeo(&self, p: &[Rat]) -> Point {
        self.homeo.eval(p)
    }

    pub fn eval_func(&self, p: &[Rat]) -> Vec<Rat> {
        self.func.eval(p)
    }
}

pub fn mul(a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    if a.q() != b.q() {
        return Err(Error::DimensionMismatch(format!("fiber dimensions {} and {}", a.q(), b.q())));
    }
    Ok(GroupElement { homeo: a.homeo.compose(&b.homeo), func: a.func.precompose(&b.homeo).add(&b.func) })
}

pub fn inv(a: &GroupElement) -> GroupElement {
    GroupElement { homeo: a.homeo.inverse(), func: a.func.pushforward(&a.homeo, &-Rat::one()) }
}

/// `a · b · a⁻¹ · b⁻¹`.
pub fn commutator(a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    let ab = mul(a, b)?;
    let aba = mul(&ab, &inv(a))?;
    mul(&aba, &inv(b))
}

/// Product of a sequence, left to right.
pub fn product<'a>(q: usize, elements: impl IntoIterator<Item = &'a GroupElement>) -> Result<GroupElement> {
    elements.into_iter().try_fold(GroupElement::identity(q), |acc, e| mul(&acc, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Homeo,
    Func,
}

/// First sampled point where two elements differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub index: usize,
    pub point: Point,
    pub part: Part,
    pub left: Vec<Rat>,
    pub right: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqualityReport {
    pub points_checked: usize,
    pub witness: Option<Witness>,
}

impl EqualityReport {
    pub fn pass(&self) -> bool {
        self.witness.is_none()
    }
}

fn compare_at(a: &GroupElement, b: &GroupElement, index: usize, p: &Point) -> Option<Witness> {
    let (ha, hb) = (a.eval_homeo(p), b.eval_homeo(p));
    if ha != hb {
        return Some(Witness { index, point: p.clone(), part: Part::Homeo, left: ha, right: hb });
    }
    let (fa, fb) = (a.eval_func(p), b.eval_func(p));
    if fa != fb {
        return Some(Witness { index, point: p.clone(), part: Part::Func, left: fa, right: fb });
    }
    None
}

/// Exact comparison of both parts at every plan point; the witness is the
/// first failing point in plan order.
pub fn equal_on_samples(a: &GroupElement, b: &GroupElement, plan: &SamplingPlan) -> Result<EqualityReport> {
    if plan.points.is_empty() {
        return Err(Error::EmptyPlan);
    }
    if a.q() != b.q() {
        return Err(Error::DimensionMismatch(format!("fiber dimensions {} and {}", a.q(), b.q())));
    }
    let witness = first_some(&plan.points, |i, p| compare_at(a, b, i, p));
    Ok(EqualityReport { points_checked: plan.points.len(), witness })
}

/// First `Some` of `f` over the items in order; parallel when enabled.
pub fn first_some<P, T, F>(points: &[P], f: F) -> Option<T>
where
    P: Sync,
    T: Send,
    F: Fn(usize, &P) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points.par_iter().enumerate().find_map_first(|(i, p)| f(i, p))
    }
    #[cfg(not(feature = "parallel"))]
    {
        points.iter().enumerate().find_map(|(i, p)| f(i, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{Func, PlBump};
    use crate::plcore::{rat, TentProfile};
    use crate::swindle::{DiagAffine, SwindleKind};

    fn bump(center: i64, peak: Rat) -> Func {
        Func::bump(
            PlBump::new(
                vec![rat(center - 1, 8), rat(1, 4)],
                vec![rat(center, 8), rat(1, 2)],
                vec![rat(center + 1, 8), rat(3, 4)],
                peak,
            )
            .unwrap(),
        )
    }

    fn grid_plan() -> SamplingPlan {
        let mut points = Vec::new();
        for i in -2..20 {
            for j in [rat(1, 3), rat(1, 2), rat(5, 8), rat(1, 16)] {
                points.push(vec![rat(i, 16), j]);
            }
        }
        SamplingPlan::from_points(points)
    }

    fn swindle(kind: SwindleKind) -> Homeo {
        Homeo::swindle(kind, TentProfile::new(rat(1, 8)).unwrap(), 2)
    }

    #[test]
    fn fiber_elements_add() {
        let u = FuncVec(vec![bump(3, rat(1, 1))]);
        let v = FuncVec(vec![bump(4, rat(-2, 3))]);
        let prod = mul(&GroupElement::fiber(u.clone()), &GroupElement::fiber(v.clone())).unwrap();
        let sum = GroupElement::fiber(u.add(&v));
        assert!(equal_on_samples(&prod, &sum, &grid_plan()).unwrap().pass());
    }

    #[test]
    fn base_inverse_cancels() {
        let h = swindle(SwindleKind::PhiPlus);
        let prod = mul(&GroupElement::base(h.clone(), 1), &GroupElement::base(h.inverse(), 1)).unwrap();
        assert!(equal_on_samples(&prod, &GroupElement::identity(1), &grid_plan()).unwrap().pass());
    }

    #[test]
    fn commutator_with_base_element() {
        let g = swindle(SwindleKind::PhiMinus).compose(&Homeo::affine(
            DiagAffine::new(vec![rat(1, 1), rat(1, 1)], vec![rat(1, 32), rat(0, 1)]).unwrap(),
        ));
        let v = FuncVec(vec![bump(4, rat(1, 1))]);
        let c = commutator(&GroupElement::base(g.inverse(), 1), &GroupElement::fiber(v.clone())).unwrap();
        let expected = GroupElement::fiber(v.precompose(&g).add(&v.pushforward(&Homeo::identity(), &rat(-1, 1))));
        assert!(equal_on_samples(&c, &expected, &grid_plan()).unwrap().pass());
    }

    #[test]
    fn detects_a_perturbation() {
        let u = GroupElement::fiber(FuncVec(vec![bump(3, rat(1, 1))]));
        let perturbed = GroupElement::fiber(FuncVec(vec![bump(3, rat(1, 1)).add(&bump(9, rat(1, 1000)))]));
        let report = equal_on_samples(&u, &perturbed, &grid_plan()).unwrap();
        let w = report.witness.expect("perturbation must be seen");
        assert_eq!(w.part, Part::Func);
        assert!(w.point[0] > rat(8, 8) && w.point[0] < rat(10, 8));
    }

    #[test]
    fn empty_plan_is_an_error() {
        let e = GroupElement::identity(1);
        assert_eq!(equal_on_samples(&e, &e, &SamplingPlan::from_points(vec![])), Err(Error::EmptyPlan));
        assert!(mul(&GroupElement::identity(1), &GroupElement::identity(2)).is_err());
    }
}
