use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use swindle_core::funcspace::{chain_image_core, NamedFunc, SeedSpec, Telescope};
use swindle_core::geometry::BallIndex;
use swindle_core::plcore::{Point, Rat};

use crate::{parse_rat, CliError, CliResult, Outcome};

/// Balls per level visited by the stratified extra rows.
const BALLS_PER_LEVEL: u64 = 64;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SampleStrategy {
    /// Only the grid `{0, 1/N, ..., (N-1)/N}^m`.
    Grid,
    /// The grid plus the images of the seed apex in balls of every level.
    Stratified,
}

#[derive(Args)]
pub struct SampleArgs {
    /// seed, u:n:k, v1-, v1+, v2-, v2+ or residual:N.
    #[arg(long = "func")]
    func: String,
    /// Grid points per axis.
    #[arg(long, default_value_t = 32)]
    grid: u64,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// One value column per component's default seed.
    #[arg(long, default_value_t = 1)]
    q: usize,
    #[arg(long, default_value = "1/8", value_parser = parse_rat)]
    delta: Rat,
    #[arg(long, value_enum, default_value_t = SampleStrategy::Grid)]
    strategy: SampleStrategy,
    /// Deepest level for stratified rows.
    #[arg(long, default_value_t = 10)]
    max_level: u64,
    /// Output is always CSV; accepted for compatibility.
    #[arg(long)]
    csv: bool,
    /// Write rows here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn grid_points(m: usize, n: u64) -> Vec<Point> {
    let total = (n as usize).pow(m as u32);
    (0..total)
        .map(|flat| {
            let mut rest = flat;
            let mut p = vec![Rat::zero(); m];
            // Last axis varies fastest.
            for axis in (0..m).rev() {
                p[axis] = Rat::new((rest % n as usize) as i64, n as i64);
                rest /= n as usize;
            }
            p
        })
        .collect()
}

fn apex_images(apex: &[Rat], max_level: u64) -> Vec<Point> {
    let mut out = Vec::new();
    for level in 0..=max_level {
        let count = (1u64 << level.min(63)).min(BALLS_PER_LEVEL);
        for j in 0..count {
            let k = (num_bigint::BigUint::from(j) << level as usize) / count;
            let idx = BallIndex { level, index: k };
            out.push(chain_image_core(&idx, apex));
        }
    }
    out
}

pub fn run(args: &SampleArgs) -> CliResult<Outcome> {
    let named: NamedFunc = args.func.parse()?;
    if args.m == 0 || args.q == 0 {
        return Err(CliError::Usage("--m and --q must be positive".into()));
    }
    if args.grid == 0 || (args.grid as f64).powi(args.m as i32) > 1e7 {
        return Err(CliError::Usage("--grid must be positive and give at most 10^7 rows".into()));
    }
    let seeds: Vec<SeedSpec> =
        (0..args.q).map(|i| SeedSpec::default_for(args.m, &args.delta, i)).collect::<Result<_, _>>()?;
    let funcs = seeds
        .iter()
        .map(|s| Ok(named.build(&Telescope::new(s.func(), args.m, &args.delta)?)))
        .collect::<Result<Vec<_>, swindle_core::Error>>()?;

    let mut points = grid_points(args.m, args.grid);
    if let SampleStrategy::Stratified = args.strategy {
        points.extend(apex_images(&seeds[0].bump.apex, args.max_level));
    }

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path).map_err(|source| CliError::Io { path: path.clone(), source })?),
        None => Box::new(io::stdout()),
    };
    let mut out = csv::Writer::from_writer(sink);
    let mut header: Vec<String> = (1..=args.m).map(|i| format!("x{i}")).collect();
    if args.q == 1 {
        header.push("value".into());
    } else {
        header.extend((1..=args.q).map(|i| format!("value{i}")));
    }
    out.write_record(&header)?;
    for p in &points {
        let mut row: Vec<String> = p.iter().map(Rat::to_string).collect();
        row.extend(funcs.iter().map(|f| f.eval(p).to_string()));
        out.write_record(&row)?;
    }
    out.flush().map_err(|source| CliError::Io { path: "<output>".into(), source })?;
    Ok(Outcome::Pass)
}
