use std::io;

use clap::Args;
use swindle_core::funcspace::chain_decode;
use swindle_core::geometry::{ball_at, interval_at, BallIndex};
use swindle_core::swindle::{slope_report, window_map, SwindleKind};

use crate::{CliError, CliResult, Outcome};

/// Deepest level `--intervals` will enumerate.
const MAX_LISTED_LEVEL: u64 = 20;

#[derive(Args)]
pub struct InspectArgs {
    /// List the intervals (and ball x-ranges) of one level.
    #[arg(long)]
    intervals: bool,
    #[arg(long)]
    level: Option<u64>,
    /// Swindle kind: phi-minus, phi-plus, psi-minus or psi-plus.
    #[arg(long = "map")]
    map: Option<String>,
    /// Window index for `--map`: print the window's breakpoints.
    #[arg(long)]
    slab: Option<u64>,
    /// Difference-quotient table of `--map` over `--levels` windows.
    #[arg(long)]
    slopes: bool,
    #[arg(long)]
    levels: Option<u64>,
    /// Chain of maps for a ball, as `n:k`.
    #[arg(long)]
    chain: Option<String>,
}

fn usage(msg: &str) -> CliError {
    CliError::Usage(msg.to_string())
}

fn kind(args: &InspectArgs) -> CliResult<SwindleKind> {
    let name = args.map.as_deref().ok_or_else(|| usage("--map is required here"))?;
    Ok(name.parse()?)
}

pub fn run(args: &InspectArgs) -> CliResult<Outcome> {
    let mut out = csv::Writer::from_writer(io::stdout());
    let selectors = [args.intervals, args.slab.is_some(), args.slopes, args.chain.is_some()];
    if selectors.iter().filter(|&&s| s).count() != 1 {
        return Err(usage("choose exactly one of --intervals, --map/--slab, --slopes, --chain"));
    }
    if args.intervals {
        let level = args.level.ok_or_else(|| usage("--intervals needs --level"))?;
        if level > MAX_LISTED_LEVEL {
            return Err(usage(&format!("--level above {MAX_LISTED_LEVEL} lists too many rows")));
        }
        out.write_record(["n", "k", "lo", "hi", "x_lo", "x_hi"])?;
        for k in 0..(1u64 << level) {
            let idx = BallIndex::new(level, k)?;
            let iv = interval_at(&idx);
            let ball = ball_at(&idx);
            out.write_record([
                level.to_string(),
                k.to_string(),
                iv.lo.to_string(),
                iv.hi.to_string(),
                ball.xlo.to_string(),
                ball.xhi.to_string(),
            ])?;
        }
    } else if let Some(slab) = args.slab {
        let kind = kind(args)?;
        if slab > 8 {
            return Err(usage("--slab above 8 has too many breakpoints to list"));
        }
        out.write_record(["s", "image"])?;
        for (s, t) in window_map(kind, slab).breakpoints() {
            out.write_record([s.to_string(), t.to_string()])?;
        }
    } else if args.slopes {
        let kind = kind(args)?;
        let levels = args.levels.ok_or_else(|| usage("--slopes needs --levels"))?;
        if levels > 9 {
            return Err(usage("--levels above 9 is too large"));
        }
        out.write_record(["window", "min_slope", "max_slope", "min_slope_approx", "max_slope_approx"])?;
        for row in slope_report(kind, levels) {
            out.write_record([
                row.window.to_string(),
                row.min.to_string(),
                row.max.to_string(),
                format!("{:.6e}", row.min.to_f64()),
                format!("{:.6e}", row.max.to_f64()),
            ])?;
        }
    } else if let Some(chain) = &args.chain {
        let (n, k) = chain.split_once(':').ok_or_else(|| usage("--chain expects n:k"))?;
        let n: u64 = n.parse().map_err(|_| usage("bad level in --chain"))?;
        let k: u64 = k.parse().map_err(|_| usage("bad index in --chain"))?;
        out.write_record(["step", "map"])?;
        for (j, kind) in chain_decode(n, k)?.0.iter().enumerate() {
            out.write_record([j.to_string(), kind.name().to_string()])?;
        }
    }
    out.flush().map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    Ok(Outcome::Pass)
}
