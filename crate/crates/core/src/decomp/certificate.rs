//! Serialized certificate and report records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{PartitionCell, PlBump, Selector};
use crate::geometry::Region;
use crate::group::{Part, PlanConfig, PlanLayout, Witness};
use crate::plcore::{Point, Rat};
use crate::swindle::{DiagAffine, SwindleKind};

use super::SeedChoice;

pub const CERTIFICATE_VERSION: u32 = 1;

/// How the factors are to be read. Verification evaluates the literal
/// product, so these strings are documentation that must still match.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convention {
    pub composition: String,
    pub law: String,
    pub commutator: String,
    pub factor: String,
    pub general_split: String,
    pub chain_order: String,
}

impl Default for Convention {
    fn default() -> Convention {
        Convention {
            composition: "right-to-left: (g∘h)(x) = g(h(x))".into(),
            law: "(h1,u1)·(h2,u2) = (h1∘h2, u1∘h2 + u2)".into(),
            commutator: "[a,b] = a·b·a^-1·b^-1; [(g^-1,0),(id,v)] = (id, v∘g - v)".into(),
            factor: "[(c^-1∘map^-1∘c, 0), (id, e_component · sum∘c)]^exponent, c = fragment conjugator".into(),
            general_split: "(h,w) = (id, w∘h^-1)·(h,0); the (h,0) factor is not decomposed".into(),
            chain_order: "step j uses phi for even j, psi for odd j, plus iff bit j of the index is set".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub choice: SeedChoice,
    /// The target function, one bump per fiber component.
    pub components: Vec<PlBump>,
}

/// One piece of the fragmented target. The piece of component `i` is
/// `components[i]` times the partition weight of `cell` (when present).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentRecord {
    pub index: usize,
    pub cell: Option<PartitionCell>,
    pub support: Region,
    /// Diagonal affine map carrying `support` into the seed box.
    pub conjugator: DiagAffine,
    pub components: Vec<PlBump>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRecord {
    pub fragment: usize,
    pub component: usize,
    pub kind: SwindleKind,
    pub selector: Selector,
    pub exponent: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub m: usize,
    pub q: usize,
    pub delta: Rat,
    pub convention: Convention,
    pub seed: SeedRecord,
    pub fragments: Vec<FragmentRecord>,
    pub factors: Vec<FactorRecord>,
    pub sampling_echo: PlanConfig,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("certificate serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        let cert: Certificate = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cert.validate()?;
        Ok(cert)
    }

    /// Structural checks; anything failing here is malformed, not disproved.
    pub fn validate(&self) -> Result<()> {
        if self.version != CERTIFICATE_VERSION {
            return Err(Error::Parse(format!("unsupported certificate version {}", self.version)));
        }
        if self.convention != Convention::default() {
            return Err(Error::Parse("unrecognized convention block".into()));
        }
        if self.m == 0 || self.q == 0 {
            return Err(Error::Parse("m and q must be positive".into()));
        }
        let bumps_ok = |bumps: &[PlBump]| bumps.len() == self.q && bumps.iter().all(|b| b.dim() == self.m);
        if !bumps_ok(&self.seed.components) {
            return Err(Error::Parse("seed components do not match m and q".into()));
        }
        for (i, frag) in self.fragments.iter().enumerate() {
            if frag.index != i || !bumps_ok(&frag.components) {
                return Err(Error::Parse(format!("fragment {i} is malformed")));
            }
            if frag.conjugator.scale.len() != self.m || frag.support.dim() != self.m {
                return Err(Error::Parse(format!("fragment {i} has the wrong dimension")));
            }
            if frag.conjugator.scale.iter().any(|s| !s.is_positive()) {
                return Err(Error::Parse(format!("fragment {i} conjugator is not orientation preserving")));
            }
            if frag.cell.as_ref().is_some_and(|c| c.cell.len() != self.m || !c.cell_size.is_positive()) {
                return Err(Error::Parse(format!("fragment {i} has a malformed cell")));
            }
        }
        for (i, f) in self.factors.iter().enumerate() {
            if f.fragment >= self.fragments.len() || f.component >= self.q || f.exponent.abs() != 1 {
                return Err(Error::Parse(format!("factor {i} is malformed")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub index: usize,
    pub point: Point,
    pub part: Part,
    pub left: Vec<Rat>,
    pub right: Vec<Rat>,
}

impl From<Witness> for WitnessRecord {
    fn from(w: Witness) -> WitnessRecord {
        WitnessRecord { index: w.index, point: w.point, part: w.part, left: w.left, right: w.right }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub pass: bool,
    pub points_checked: usize,
    pub witness: Option<WitnessRecord>,
}

/// Support diagnostics for one factor over a prefix of the plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDiagnostic {
    pub index: usize,
    pub fragment: usize,
    pub component: usize,
    pub kind: SwindleKind,
    pub selector: Selector,
    pub exponent: i8,
    pub support: Option<Region>,
    pub sampled: usize,
    pub nonzero: usize,
    /// Sampled points outside `support` where the factor is not the identity.
    pub escapes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: u32,
    pub pass: bool,
    pub plan: PlanConfig,
    pub layout: PlanLayout,
    /// Literal factor product against the target.
    pub product: CheckRecord,
    /// Signed sum of the factors' function parts against the target.
    pub abelian_collapse: CheckRecord,
    pub factors: Vec<FactorDiagnostic>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
