use serde::{Deserialize, Serialize};

use super::rat::Rat;
use crate::error::{Error, Result};

/// Strictly increasing piecewise-linear self-map of the line.
///
/// The first and last breakpoints are fixed points, so the map extends by
/// the identity outside its span. An empty breakpoint list is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlMap1D {
    breakpoints: Vec<(Rat, Rat)>,
}

impl PlMap1D {
    pub fn identity() -> PlMap1D {
        PlMap1D { breakpoints: Vec::new() }
    }

    pub fn new(breakpoints: Vec<(Rat, Rat)>) -> Result<PlMap1D> {
        if breakpoints.len() == 1 {
            return Err(Error::Domain("a single breakpoint does not define a map".into()));
        }
        for pair in breakpoints.windows(2) {
            if pair[0].0 >= pair[1].0 || pair[0].1 >= pair[1].1 {
                return Err(Error::Domain(format!(
                    "breakpoints not strictly increasing at ({}, {}) -> ({}, {})",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        if let (Some(first), Some(last)) = (breakpoints.first(), breakpoints.last()) {
            if first.0 != first.1 || last.0 != last.1 {
                return Err(Error::Domain("end breakpoints must be fixed points".into()));
            }
        }
        Ok(PlMap1D { breakpoints })
    }

    pub fn breakpoints(&self) -> &[(Rat, Rat)] {
        &self.breakpoints
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn eval(&self, s: &Rat) -> Rat {
        interpolate(&self.breakpoints, s, |bp| (&bp.0, &bp.1))
    }

    pub fn inverse_eval(&self, t: &Rat) -> Rat {
        interpolate(&self.breakpoints, t, |bp| (&bp.1, &bp.0))
    }

    pub fn inverse(&self) -> PlMap1D {
        PlMap1D {
            breakpoints: self.breakpoints.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &PlMap1D, inner: &PlMap1D) -> PlMap1D {
        let mut inputs: Vec<Rat> = inner.breakpoints.iter().map(|bp| bp.0.clone()).collect();
        inputs.extend(outer.breakpoints.iter().map(|bp| inner.inverse_eval(&bp.0)));
        inputs.sort();
        inputs.dedup();
        let breakpoints = inputs
            .into_iter()
            .map(|s| {
                let t = outer.eval(&inner.eval(&s));
                (s, t)
            })
            .collect();
        PlMap1D { breakpoints }
    }
}

fn interpolate<F>(breakpoints: &[(Rat, Rat)], x: &Rat, key: F) -> Rat
where
    F: Fn(&(Rat, Rat)) -> (&Rat, &Rat),
{
    let (first, last) = match (breakpoints.first(), breakpoints.last()) {
        (Some(first), Some(last)) => (first, last),
        _ => return x.clone(),
    };
    if x <= key(first).0 || x >= key(last).0 {
        return x.clone();
    }
    // First breakpoint whose key is > x; it exists and is not index 0.
    let hi = breakpoints.partition_point(|bp| key(bp).0 <= x);
    let (x0, y0) = key(&breakpoints[hi - 1]);
    let (x1, y1) = key(&breakpoints[hi]);
    if x == x0 {
        return y0.clone();
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Cross-section damping profile: 0 on the faces of the unit interval,
/// 1 on `[delta, 1 - delta]`, linear in between.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TentProfile {
    delta: Rat,
}

impl TentProfile {
    pub fn new(delta: Rat) -> Result<TentProfile> {
        if !delta.is_positive() || delta >= Rat::new(1, 2) {
            return Err(Error::Config(format!("delta must lie in (0, 1/2), got {delta}")));
        }
        Ok(TentProfile { delta })
    }

    pub fn delta(&self) -> &Rat {
        &self.delta
    }

    pub fn value(&self, y: &Rat) -> Rat {
        if !y.is_positive() || *y >= Rat::one() {
            return Rat::zero();
        }
        let upper = Rat::one() - &self.delta;
        if *y < self.delta {
            y / &self.delta
        } else if *y > upper {
            (Rat::one() - y) / &self.delta
        } else {
            Rat::one()
        }
    }

    /// Minimum of the profile over all cross coordinates; 1 when there are none.
    pub fn damping(&self, cross: &[Rat]) -> Rat {
        let mut lambda = Rat::one();
        for y in cross {
            let v = self.value(y);
            if v.is_zero() {
                return v;
            }
            if v < lambda {
                lambda = v;
            }
        }
        lambda
    }

    pub fn in_core(&self, y: &Rat) -> bool {
        *y >= self.delta && *y <= Rat::one() - &self.delta
    }
}
