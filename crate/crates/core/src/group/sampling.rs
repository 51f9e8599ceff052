use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::chain_image_core;
use crate::geometry::{chart_inverse, interval_at, BallIndex, Region};
use crate::plcore::{Point, Rat};
use crate::swindle::DiagAffine;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Grid, random points, ball-stratified points and adversarial points.
    Stratified,
    /// Grid and random points only.
    Uniform,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "stratified" => Ok(Strategy::Stratified),
            "uniform" => Ok(Strategy::Uniform),
            _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
        }
    }
}

/// Parameters that determine a plan; echoed into every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub strategy: Strategy,
    pub samples: usize,
    pub rng_seed: u64,
    pub max_level: u64,
    pub denom_bound: u64,
}

impl PlanConfig {
    pub fn stratified(samples: usize, rng_seed: u64) -> PlanConfig {
        PlanConfig { strategy: Strategy::Stratified, samples, rng_seed, max_level: 10, denom_bound: 64 }
    }

    pub fn uniform(samples: usize, rng_seed: u64) -> PlanConfig {
        PlanConfig { strategy: Strategy::Uniform, samples, rng_seed, max_level: 10, denom_bound: 64 }
    }
}

/// Where a construction lives: the conjugator `a` carrying the original
/// piece into normalized position, the normalized seed box, and a reference
/// point of the seed (normalized coordinates).
#[derive(Clone, Debug)]
pub struct Frame {
    pub conjugator: DiagAffine,
    pub seed_region: Region,
    pub anchor: Point,
}

impl Frame {
    fn to_original(&self, p: &[Rat]) -> Point {
        self.conjugator.eval_inverse(p)
    }
}

/// Counts actually used by a generated plan.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanLayout {
    pub grid_resolution: u64,
    pub grid: usize,
    pub stratified_per_level: usize,
    pub stratified: usize,
    pub adversarial: usize,
    pub random: usize,
}

#[derive(Clone, Debug)]
pub struct SamplingPlan {
    pub config: Option<PlanConfig>,
    pub layout: PlanLayout,
    pub points: Vec<Point>,
}

impl SamplingPlan {
    pub fn from_points(points: Vec<Point>) -> SamplingPlan {
        SamplingPlan { config: None, layout: PlanLayout::default(), points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Deterministic plan for `config` around the given frames.
    pub fn build(config: &PlanConfig, dim: usize, frames: &[Frame]) -> Result<SamplingPlan> {
        if dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if config.denom_bound < 2 {
            return Err(Error::Config("denominator bound must be at least 2".into()));
        }
        let n = config.samples;
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let domain = domain_of(dim, frames);
        let mut layout = PlanLayout::default();
        let mut points = Vec::with_capacity(n);

        let grid_share = match config.strategy {
            Strategy::Stratified => n / 10,
            Strategy::Uniform => n / 2,
        };
        let res = integer_root(grid_share as u64, dim as u32).max(1);
        layout.grid_resolution = res;
        for p in grid_points(&domain, res) {
            points.push(p);
        }
        layout.grid = points.len();

        if config.strategy == Strategy::Stratified && !frames.is_empty() {
            let adversarial = adversarial_points(frames, config.max_level, &mut rng);
            let budget = n / 10;
            layout.adversarial = adversarial.len().min(budget);
            points.extend(adversarial.into_iter().take(budget));

            let levels = config.max_level as usize + 1;
            let per_level = (n * 6 / 10) / (levels * frames.len());
            layout.stratified_per_level = per_level;
            for frame in frames {
                for level in 0..=config.max_level {
                    for i in 0..per_level {
                        let idx = random_index(level, &mut rng);
                        let base = if i == 0 {
                            frame.anchor.clone()
                        } else {
                            random_interior(&frame.seed_region, config.denom_bound, &mut rng)
                        };
                        points.push(frame.to_original(&chain_image_core(&idx, &base)));
                        layout.stratified += 1;
                    }
                }
            }
        }

        let mut random = 0;
        while points.len() < n {
            let region = match frames.get(random % (frames.len() + 1)) {
                Some(frame) => {
                    let a = frame.conjugator.inverse();
                    a.image(&frame.seed_region)
                }
                None => domain.clone(),
            };
            points.push(random_point(&region, config.denom_bound, &mut rng));
            random += 1;
        }
        points.truncate(n);
        layout.random = random;
        Ok(SamplingPlan { config: Some(config.clone()), layout, points })
    }
}

fn integer_root(value: u64, k: u32) -> u64 {
    let mut r = (value as f64).powf(1.0 / f64::from(k)).floor() as u64;
    while (r + 1).checked_pow(k).is_some_and(|v| v <= value) {
        r += 1;
    }
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > value) {
        r -= 1;
    }
    r
}

/// Hull of the unit cube and of every frame's original-coordinate boxes,
/// grown by an eighth of its width.
fn domain_of(dim: usize, frames: &[Frame]) -> Region {
    let cube = Region::unit_cube(dim);
    let mut domain = cube.clone();
    for frame in frames {
        let back = frame.conjugator.inverse();
        domain = domain.hull(&back.image(&cube)).hull(&back.image(&frame.seed_region));
    }
    let eighth = Rat::new(1, 8);
    let lo = domain.lo.iter().zip(&domain.hi).map(|(a, b)| a - (b - a) * &eighth).collect();
    let hi = domain.lo.iter().zip(&domain.hi).map(|(a, b)| b + (b - a) * &eighth).collect();
    Region { lo, hi }
}

/// Cell centers of a `res^m` grid over `region`.
pub fn grid_points(region: &Region, res: u64) -> Vec<Point> {
    let dim = region.dim();
    let total = (res as usize).pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rest = flat;
        let mut p = Vec::with_capacity(dim);
        for axis in 0..dim {
            let i = (rest % res as usize) as i64;
            rest /= res as usize;
            let t = Rat::new(2 * i + 1, 2 * res as i64);
            p.push(&region.lo[axis] + (&region.hi[axis] - &region.lo[axis]) * t);
        }
        out.push(p);
    }
    out
}

fn random_fraction(denom_bound: u64, interior: bool, rng: &mut ChaCha8Rng) -> Rat {
    let q = rng.gen_range(2..=denom_bound) as i64;
    let a = if interior { rng.gen_range(1..q) } else { rng.gen_range(0..=q) };
    Rat::new(a, q)
}

fn random_point(region: &Region, denom_bound: u64, rng: &mut ChaCha8Rng) -> Point {
    region
        .lo
        .iter()
        .zip(&region.hi)
        .map(|(a, b)| a + (b - a) * random_fraction(denom_bound, false, rng))
        .collect()
}

fn random_interior(region: &Region, denom_bound: u64, rng: &mut ChaCha8Rng) -> Point {
    region
        .lo
        .iter()
        .zip(&region.hi)
        .map(|(a, b)| a + (b - a) * random_fraction(denom_bound, true, rng))
        .collect()
}

pub(crate) fn random_index(level: u64, rng: &mut ChaCha8Rng) -> BallIndex {
    let words = level.div_ceil(32) as usize;
    let mut digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
    if !level.is_multiple_of(32) {
        if let Some(top) = digits.last_mut() {
            *top &= (1u32 << (level % 32)) - 1;
        }
    }
    BallIndex { level, index: BigUint::new(digits) }
}

/// Deepest probe `x₁ = 1 − 2^-j`. Slab `2^j` carries windows with `2^(j/2)`-bit
/// denominators, so each further step costs about four times more.
const FACE_DEPTH: usize = 12;

/// Points near the face `x₁ = 1` and on or just beside ball boundaries.
fn adversarial_points(frames: &[Frame], max_level: u64, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let mut out = Vec::new();
    for frame in frames {
        let cross_variants: Vec<Point> = {
            let mut v = vec![frame.anchor.clone()];
            if frame.anchor.len() > 1 {
                let mut edge = frame.anchor.clone();
                edge[1] = frame.seed_region.lo[1].clone();
                v.push(edge);
            }
            v
        };
        for j in 1..=FACE_DEPTH {
            let mut p = frame.anchor.clone();
            p[0] = Rat::one() - Rat::pow2_recip(j);
            out.push(frame.to_original(&p));
        }
        for level in 0..=max_level.min(8) {
            let idx = random_index(level, rng);
            let iv = interval_at(&idx);
            let eps = (&iv.hi - &iv.lo) / Rat::int(1024);
            let candidates = [
                iv.lo.clone(),
                iv.hi.clone(),
                &iv.lo - &eps,
                &iv.lo + &eps,
                &iv.hi - &eps,
                &iv.hi + &eps,
            ];
            for (i, s) in candidates.iter().enumerate() {
                let mut p = cross_variants[i % cross_variants.len()].clone();
                p[0] = chart_inverse(s);
                out.push(frame.to_original(&p));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::core_target;
    use crate::geometry::locate;
    use crate::plcore::rat;

    fn frame(dim: usize) -> Frame {
        let seed_region = core_target(dim, &rat(1, 8)).unwrap();
        let anchor = seed_region.center();
        Frame { conjugator: DiagAffine::identity(dim), seed_region, anchor }
    }

    #[test]
    fn plan_is_deterministic_and_sized() {
        let cfg = PlanConfig::stratified(2000, 7);
        let a = SamplingPlan::build(&cfg, 2, &[frame(2)]).unwrap();
        let b = SamplingPlan::build(&cfg, 2, &[frame(2)]).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.len(), 2000);
        assert!(a.layout.stratified > 0 && a.layout.adversarial > 0 && a.layout.random > 0);
        let c = SamplingPlan::build(&PlanConfig::stratified(2000, 8), 2, &[frame(2)]).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn stratified_points_cover_every_level() {
        let cfg = PlanConfig::stratified(3000, 1);
        let plan = SamplingPlan::build(&cfg, 2, &[frame(2)]).unwrap();
        let mut seen = vec![0usize; 11];
        for p in &plan.points {
            if let Some(idx) = locate(p) {
                if idx.level <= 10 {
                    seen[idx.level as usize] += 1;
                }
            }
        }
        assert!(seen.iter().all(|&c| c >= plan.layout.stratified_per_level), "{seen:?}");
    }

    #[test]
    fn integer_roots() {
        assert_eq!(integer_root(1000, 3), 10);
        assert_eq!(integer_root(999, 3), 9);
        assert_eq!(integer_root(1000, 2), 31);
        assert_eq!(integer_root(0, 2), 0);
    }

    #[test]
    fn zero_samples_gives_empty_plan() {
        let plan = SamplingPlan::build(&PlanConfig::stratified(0, 1), 2, &[frame(2)]).unwrap();
        assert!(plan.is_empty());
    }
}
