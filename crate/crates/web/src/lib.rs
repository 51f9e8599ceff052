//! Browser bindings for the static demo in `www/`.
//!
//! Every export returns JSON text or a flat `Float64Array`, so the page needs
//! no generated TypeScript glue beyond what `wasm-bindgen` emits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use swindle_core::decomp::{build_certificate, verify_certificate, BuildConfig, Tampering, WitnessRecord};
use swindle_core::funcspace::{chain_decode, NamedFunc, SeedSpec, Telescope};
use swindle_core::geometry::{ball_at, interval_at, BallIndex};
use swindle_core::group::PlanConfig;
use swindle_core::plcore::Rat;
use wasm_bindgen::prelude::*;

/// Deepest level the layout view will enumerate.
const MAX_LAYOUT_LEVEL: u64 = 10;
const MAX_GRID: u32 = 256;
const MAX_SAMPLES: u32 = 5000;

#[derive(Serialize)]
struct BallRow {
    n: u64,
    k: u64,
    lo: String,
    hi: String,
    x_lo: f64,
    x_hi: f64,
    chain: Vec<&'static str>,
}

#[derive(Serialize)]
struct VerifySummary {
    pass: bool,
    points: usize,
    factors: usize,
    tampering: Option<String>,
    witness: Option<WitnessRecord>,
}

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn delta() -> Rat {
    Rat::new(1, 8)
}

/// Balls of levels `0..=max_level` with their x₁-ranges and map chains.
#[wasm_bindgen]
pub fn ball_layout(max_level: u32) -> Result<String, JsError> {
    let max_level = u64::from(max_level);
    if max_level > MAX_LAYOUT_LEVEL {
        return Err(js_err(format!("levels above {MAX_LAYOUT_LEVEL} are not drawn")));
    }
    let mut rows = Vec::new();
    for n in 0..=max_level {
        for k in 0..(1u64 << n) {
            let idx = BallIndex::new(n, k).map_err(js_err)?;
            let (iv, ball) = (interval_at(&idx), ball_at(&idx));
            let chain = chain_decode(n, k).map_err(js_err)?.0.iter().map(|kind| kind.name()).collect();
            rows.push(BallRow {
                n,
                k,
                lo: iv.lo.to_string(),
                hi: iv.hi.to_string(),
                x_lo: ball.xlo.to_f64(),
                x_hi: ball.xhi.to_f64(),
                chain,
            });
        }
    }
    serde_json::to_string(&rows).map_err(js_err)
}

/// Values of a named function (`seed`, `u:n:k`, `v1-`, `residual:N`, ...) for
/// the default planar seed at the points `(i/grid, j/grid)`, row by row in x₂.
#[wasm_bindgen]
pub fn heatmap(func: &str, grid: u32) -> Result<Vec<f64>, JsError> {
    if grid == 0 || grid > MAX_GRID {
        return Err(js_err(format!("grid must lie in 1..={MAX_GRID}")));
    }
    let named: NamedFunc = func.parse().map_err(js_err)?;
    let seed = SeedSpec::default_for(2, &delta(), 0).map_err(js_err)?;
    let f = named.build(&Telescope::new(seed.func(), 2, &delta()).map_err(js_err)?);
    let side = i64::from(grid);
    let at = |i: i64| Rat::new(i, side);
    let mut out = Vec::with_capacity((grid * grid) as usize);
    for row in 0..side {
        for col in 0..side {
            out.push(f.eval(&[at(col), at(row)]).to_f64());
        }
    }
    Ok(out)
}

/// Builds the planar certificate, optionally applies one seeded random
/// tampering, and verifies it on a stratified plan.
#[wasm_bindgen]
pub fn verify_demo(samples: u32, tamper_seed: Option<u32>) -> Result<String, JsError> {
    if samples == 0 || samples > MAX_SAMPLES {
        return Err(js_err(format!("samples must lie in 1..={MAX_SAMPLES}")));
    }
    let mut cert = build_certificate(&BuildConfig::new(2, 1, delta())).map_err(js_err)?;
    let tampering = tamper_seed.map(|s| {
        let t = Tampering::random(&cert, &mut ChaCha8Rng::seed_from_u64(u64::from(s)));
        t.apply(&mut cert);
        format!("{t:?}")
    });
    let plan = cert.plan(&PlanConfig::stratified(samples as usize, 0)).map_err(js_err)?;
    let report = verify_certificate(&cert, &plan).map_err(js_err)?;
    let summary = VerifySummary {
        pass: report.pass,
        points: plan.len(),
        factors: cert.factors.len(),
        tampering,
        witness: report.product.witness,
    };
    serde_json::to_string(&summary).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_lists_every_ball() {
        let rows: Vec<serde_json::Value> = serde_json::from_str(&ball_layout(3).unwrap()).unwrap();
        assert_eq!(rows.len(), 15);
        assert_eq!(rows[2]["chain"], serde_json::json!(["phi-plus"]));
    }

    #[test]
    fn seed_heatmap_peaks_inside_the_square() {
        let values = heatmap("seed", 16).unwrap();
        assert_eq!(values.len(), 256);
        assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(values.iter().any(|v| *v > 0.5));
    }

    #[test]
    fn tampered_certificate_fails() {
        let clean: serde_json::Value = serde_json::from_str(&verify_demo(200, None).unwrap()).unwrap();
        assert_eq!(clean["pass"], true);
        let bad: serde_json::Value = serde_json::from_str(&verify_demo(200, Some(3)).unwrap()).unwrap();
        assert_eq!(bad["pass"], false);
        assert!(bad["witness"].is_object());
    }
}
