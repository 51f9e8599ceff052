use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{SwindleHomeo, SwindleKind};
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::plcore::{Point, Rat, TentProfile};

/// Diagonal affine map `x ↦ scale ⊙ x + shift` with positive scales.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagAffine {
    pub scale: Vec<Rat>,
    pub shift: Vec<Rat>,
}

impl DiagAffine {
    pub fn new(scale: Vec<Rat>, shift: Vec<Rat>) -> Result<DiagAffine> {
        if scale.len() != shift.len() {
            return Err(Error::DimensionMismatch(format!("scale {} vs shift {}", scale.len(), shift.len())));
        }
        if scale.iter().any(|s| !s.is_positive()) {
            return Err(Error::Domain("affine scales must be positive".into()));
        }
        Ok(DiagAffine { scale, shift })
    }

    pub fn identity(m: usize) -> DiagAffine {
        DiagAffine { scale: vec![Rat::one(); m], shift: vec![Rat::zero(); m] }
    }

    pub fn is_identity(&self) -> bool {
        self.scale.iter().all(|s| *s == Rat::one()) && self.shift.iter().all(Rat::is_zero)
    }

    /// Affine map carrying `from` onto `to` axis by axis.
    pub fn fit(from: &Region, to: &Region) -> Result<DiagAffine> {
        let mut scale = Vec::with_capacity(from.dim());
        let mut shift = Vec::with_capacity(from.dim());
        for i in 0..from.dim() {
            let width = &from.hi[i] - &from.lo[i];
            if !width.is_positive() {
                return Err(Error::Support(format!("degenerate support along axis {i}")));
            }
            let s = (&to.hi[i] - &to.lo[i]) / width;
            shift.push(&to.lo[i] - &s * &from.lo[i]);
            scale.push(s);
        }
        Ok(DiagAffine { scale, shift })
    }

    pub fn eval(&self, p: &[Rat]) -> Point {
        p.iter().zip(self.scale.iter().zip(&self.shift)).map(|(x, (a, b))| a * x + b).collect()
    }

    pub fn eval_inverse(&self, p: &[Rat]) -> Point {
        p.iter().zip(self.scale.iter().zip(&self.shift)).map(|(x, (a, b))| (x - b) / a).collect()
    }

    pub fn inverse(&self) -> DiagAffine {
        DiagAffine {
            scale: self.scale.iter().map(Rat::recip).collect(),
            shift: self.scale.iter().zip(&self.shift).map(|(a, b)| -(b / a)).collect(),
        }
    }

    pub fn image(&self, region: &Region) -> Region {
        Region { lo: self.eval(&region.lo), hi: self.eval(&region.hi) }
    }
}

#[derive(Debug)]
pub enum HomeoNode {
    Identity,
    Swindle(SwindleHomeo),
    Affine(DiagAffine),
    Inverse(Homeo),
    /// `outer ∘ inner`.
    Compose(Homeo, Homeo),
}

/// Shared expression tree for an element of the homeomorphism group.
#[derive(Clone, Debug)]
pub struct Homeo(Arc<HomeoNode>);

impl Homeo {
    pub fn identity() -> Homeo {
        Homeo(Arc::new(HomeoNode::Identity))
    }

    pub fn swindle(kind: SwindleKind, damping: TentProfile, dim: usize) -> Homeo {
        Homeo(Arc::new(HomeoNode::Swindle(SwindleHomeo::new(kind, damping, dim))))
    }

    pub fn affine(map: DiagAffine) -> Homeo {
        if map.is_identity() {
            Homeo::identity()
        } else {
            Homeo(Arc::new(HomeoNode::Affine(map)))
        }
    }

    pub fn node(&self) -> &HomeoNode {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        matches!(*self.0, HomeoNode::Identity)
    }

    /// Inverse handle; inverses are pushed through compositions and affines
    /// so that `Inverse` nodes only ever wrap swindle maps.
    pub fn inverse(&self) -> Homeo {
        match &*self.0 {
            HomeoNode::Identity => self.clone(),
            HomeoNode::Swindle(_) => Homeo(Arc::new(HomeoNode::Inverse(self.clone()))),
            HomeoNode::Affine(a) => Homeo::affine(a.inverse()),
            HomeoNode::Inverse(h) => h.clone(),
            HomeoNode::Compose(outer, inner) => inner.inverse().compose(&outer.inverse()),
        }
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Homeo) -> Homeo {
        if self.is_identity() {
            inner.clone()
        } else if inner.is_identity() {
            self.clone()
        } else {
            Homeo(Arc::new(HomeoNode::Compose(self.clone(), inner.clone())))
        }
    }

    pub fn eval(&self, p: &[Rat]) -> Point {
        match &*self.0 {
            HomeoNode::Identity => p.to_vec(),
            HomeoNode::Swindle(s) => s.eval(p),
            HomeoNode::Affine(a) => a.eval(p),
            HomeoNode::Inverse(h) => h.eval_inverse(p),
            HomeoNode::Compose(outer, inner) => outer.eval(&inner.eval(p)),
        }
    }

    pub fn eval_inverse(&self, p: &[Rat]) -> Point {
        match &*self.0 {
            HomeoNode::Identity => p.to_vec(),
            HomeoNode::Swindle(s) => s.eval_inverse(p),
            HomeoNode::Affine(a) => a.eval_inverse(p),
            HomeoNode::Inverse(h) => h.eval(p),
            HomeoNode::Compose(outer, inner) => inner.eval_inverse(&outer.eval_inverse(p)),
        }
    }

    /// A region containing the image of `region`.
    pub fn image_bound(&self, region: &Region) -> Region {
        match &*self.0 {
            HomeoNode::Identity => region.clone(),
            HomeoNode::Swindle(_) => swindle_bound(region),
            HomeoNode::Affine(a) => a.image(region),
            HomeoNode::Inverse(h) => match h.node() {
                HomeoNode::Swindle(_) => swindle_bound(region),
                _ => h.inverse().image_bound(region),
            },
            HomeoNode::Compose(outer, inner) => outer.image_bound(&inner.image_bound(region)),
        }
    }
}

fn swindle_bound(region: &Region) -> Region {
    let cube = Region::unit_cube(region.dim());
    if region.overlaps_open(&cube) {
        region.hull(&cube)
    } else {
        region.clone()
    }
}

impl fmt::Display for Homeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            HomeoNode::Identity => f.write_str("id"),
            HomeoNode::Swindle(s) => f.write_str(s.kind.name()),
            HomeoNode::Affine(a) => {
                let parts: Vec<String> = a.scale.iter().zip(&a.shift).map(|(s, b)| format!("{s}x+{b}")).collect();
                write!(f, "affine[{}]", parts.join(", "))
            }
            HomeoNode::Inverse(h) => write!(f, "({h})^-1"),
            HomeoNode::Compose(outer, inner) => write!(f, "{outer} . {inner}"),
        }
    }
}
