//! Command-line front end for the cascade measure toolkit.

use anyhow::{anyhow, bail, Context, Result};
use cascade_core::analysis::{
    build_nondoubling_point, doubling_scan, nondoubling_scan, porosity_search, MassParams,
    ScheduleEntry,
};
use cascade_core::blowup::density_profile;
use cascade_core::cascade::{export_tree, MuSampler};
use cascade_core::checks::{mu_suite, phi_suite, tangent_suite, Check};
use cascade_core::dyadic::DyadicRational;
use cascade_core::weight::PhiConfig;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

mod emit;

use emit::{fmt17, OutputSink};

#[derive(Parser, Debug)]
#[command(
    name = "cascade",
    version,
    about = "Builds a singular weighted dyadic cascade measure exactly and runs \
             doubling, porosity and blow-up analyses with certified enclosures"
)]
struct Cli {
    /// Relative tolerance for weight-function integrals
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Target relative gap of mass enclosures
    #[arg(long, global = true, default_value_t = 1e-8)]
    gap: f64,
    /// Deepest generation mass queries may explore (hard cap 24)
    #[arg(long = "max-gen", global = true, default_value_t = 18)]
    max_gen: i32,
    /// Seed for every sampling operation
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Integral cache file; the CASCADE_CACHE env var overrides this
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Output format for tabular results
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker thread bound; results do not depend on it
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a property suite; nonzero exit on any violated invariant
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Doubling-ratio scan of mu(B(x,r)), mu(B(x,2r)), mu(B(x,17r))
    Scan {
        /// `nd:i,k;i,k;...` for a constructed band-schedule point, or a
        /// dyadic literal (m*2^e, 2^e, integer)
        #[arg(long)]
        point: String,
        /// `auto` (schedule radii; nd points only) or a comma-separated
        /// list of dyadic radii
        #[arg(long)]
        scales: String,
    },
    /// Density profile of the blow-up at (x, r) on a grid
    Blowup {
        /// center, dyadic literal
        #[arg(long)]
        x: String,
        /// window radius, dyadic literal
        #[arg(long)]
        r: String,
        /// grid half-width in blow-up coordinates, dyadic literal
        #[arg(long, default_value = "1")]
        radius: String,
        /// number of grid points (2^s + 1)
        #[arg(long, default_value_t = 257)]
        grid: usize,
        /// profile window radius, dyadic literal
        #[arg(long, default_value = "2^-6")]
        delta: String,
    },
    /// Largest certified relative hole inside B(x, r)
    Porosity {
        #[arg(long)]
        x: String,
        #[arg(long)]
        r: String,
        /// mass fraction bound for the hole
        #[arg(long)]
        eps: f64,
        /// candidate centers use construction endpoints up to this generation
        #[arg(long = "grid-gen", default_value_t = 8)]
        grid_gen: i32,
    },
    /// Draw measure-distributed points
    Sample {
        #[arg(long)]
        n: usize,
        /// descent depth (final generation)
        #[arg(long)]
        depth: u32,
    },
    /// Emit every construction interval up to a generation as JSON lines
    Export {
        #[arg(long)]
        gen: i32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Phi,
    Mu,
    Tangent,
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    tol: f64,
    gap: f64,
    max_gen: i32,
    seed: u64,
    threads: Option<usize>,
    format: Format,
    cache: Option<&'a str>,
    phi_cache_fingerprint: String,
    command: String,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    if !(cli.tol > 0.0 && cli.tol <= 1e-6) {
        bail!("--tol {} outside (0, 1e-6]", cli.tol);
    }
    if !(cli.gap > 0.0) {
        bail!("--gap {} must be positive", cli.gap);
    }
    if !(0..=24).contains(&cli.max_gen) {
        bail!("--max-gen {} outside 0..=24", cli.max_gen);
    }
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .context("--threads pool setup")?;
    }

    let cache_path = std::env::var_os("CASCADE_CACHE")
        .map(PathBuf::from)
        .or_else(|| cli.cache.clone());
    let cfg = PhiConfig::new(cli.tol).map_err(|e| anyhow!("{e}"))?;
    if let Some(p) = &cache_path {
        let n = cfg.load_cache(p);
        if n > 0 {
            eprintln!("loaded {n} cached integrals from {}", p.display());
        }
    }
    let params = MassParams {
        rel_gap: cli.gap,
        max_gen: cli.max_gen,
    };

    let echo = ConfigEcho {
        tol: cli.tol,
        gap: cli.gap,
        max_gen: cli.max_gen,
        seed: cli.seed,
        threads: cli.threads,
        format: cli.format,
        cache: cache_path.as_deref().and_then(|p| p.to_str()),
        phi_cache_fingerprint: cfg.cache_fingerprint(),
        command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
    };
    let header = serde_json::to_string(&echo)?;
    let mut sink = OutputSink::open(cli.out.as_deref(), matches!(cli.format, Format::Jsonl))?;
    sink.header(&header)?;

    let status = match &cli.command {
        Command::Verify { suite } => cmd_verify(*suite, &cfg, params, cli.seed, &mut sink)?,
        Command::Scan { point, scales } => {
            cmd_scan(point, scales, &cfg, params, &mut sink)?
        }
        Command::Blowup {
            x,
            r,
            radius,
            grid,
            delta,
        } => cmd_blowup(x, r, radius, *grid, delta, &cfg, params, &mut sink, cli.out.as_deref())?,
        Command::Porosity {
            x,
            r,
            eps,
            grid_gen,
        } => cmd_porosity(x, r, *eps, *grid_gen, &cfg, params, &mut sink)?,
        Command::Sample { n, depth } => cmd_sample(*n, *depth, cli.seed, &cfg, &mut sink)?,
        Command::Export { gen } => {
            let mut w = sink.raw();
            let count = export_tree(&mut w, *gen, &cfg).map_err(|e| anyhow!("{e}"))?;
            w.flush()?;
            eprintln!("exported {count} nodes");
            ExitCode::SUCCESS
        }
    };

    if let Some(p) = &cache_path {
        match cfg.save_cache(p) {
            Ok(n) => eprintln!("saved {n} cached integrals to {}", p.display()),
            Err(e) => eprintln!("warning: could not save cache: {e}"),
        }
    }
    sink.finish()?;
    Ok(status)
}

fn cmd_verify(
    suite: Suite,
    cfg: &PhiConfig,
    params: MassParams,
    seed: u64,
    sink: &mut OutputSink,
) -> Result<ExitCode> {
    let checks: Vec<Check> = match suite {
        Suite::Phi => phi_suite(cfg, seed),
        Suite::Mu => mu_suite(cfg, params, seed),
        Suite::Tangent => tangent_suite(cfg, params, seed),
    }
    .map_err(|e| anyhow!("{e}"))?;
    sink.columns(&["check", "pass", "detail"])?;
    let mut failed = 0usize;
    for c in &checks {
        sink.row(
            &[
                c.name.clone(),
                c.pass.to_string(),
                c.detail.replace(',', ";"),
            ],
            c,
        )?;
        if !c.pass {
            failed += 1;
        }
    }
    eprintln!(
        "{} checks, {} failed",
        checks.len(),
        failed
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn parse_dyadic(s: &str, flag: &str) -> Result<DyadicRational> {
    s.parse()
        .map_err(|e| anyhow!("{flag}: {e}"))
}

fn parse_schedule(spec: &str) -> Result<Vec<ScheduleEntry>> {
    let mut out = Vec::new();
    for part in spec.split(';') {
        let (i, k) = part
            .split_once(',')
            .ok_or_else(|| anyhow!("--point: schedule entry '{part}' is not 'i,k'"))?;
        out.push(ScheduleEntry {
            i: i.trim().parse().context("--point: band exponent i")?,
            k: k.trim().parse().context("--point: generation k")?,
        });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    point: &str,
    scales: &str,
    cfg: &PhiConfig,
    params: MassParams,
    sink: &mut OutputSink,
) -> Result<ExitCode> {
    use rayon::prelude::*;
    let base_cols = [
        "ln2_r",
        "ln_mu_r",
        "ln_mu_2r",
        "ln_mu_17r",
        "ratio2",
        "ratio17",
        "enclosure_gap",
    ];
    if let Some(spec) = point.strip_prefix("nd:") {
        let schedule = parse_schedule(spec)?;
        let nd = build_nondoubling_point(&schedule, cfg).map_err(|e| anyhow!("{e}"))?;
        if scales != "auto" {
            bail!("--scales: schedule points use --scales auto");
        }
        let rows = nondoubling_scan(&nd, params, cfg).map_err(|e| anyhow!("{e}"))?;
        let mut cols = base_cols.to_vec();
        cols.extend_from_slice(&["lambda", "ln_g_bound", "g_clipped", "bound_ok"]);
        sink.columns(&cols)?;
        let mut all_ok = true;
        for r in &rows {
            all_ok &= r.bound_ok;
            sink.row(
                &[
                    fmt17(r.row.ln2_r),
                    fmt17(r.row.ln_mu_r),
                    fmt17(r.row.ln_mu_2r),
                    fmt17(r.row.ln_mu_17r),
                    fmt17(r.row.ratio2),
                    fmt17(r.row.ratio17),
                    fmt17(r.row.enclosure_gap),
                    fmt17(r.lambda),
                    fmt17(r.ln_g_bound),
                    r.g_clipped.to_string(),
                    r.bound_ok.to_string(),
                ],
                r,
            )?;
        }
        return Ok(if all_ok {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        });
    }

    let x = parse_dyadic(point, "--point")?;
    if scales == "auto" {
        bail!("--scales auto needs an nd: point; pass explicit dyadic radii");
    }
    let radii: Vec<DyadicRational> = scales
        .split(',')
        .map(|s| parse_dyadic(s, "--scales"))
        .collect::<Result<_>>()?;
    // rows are independent; order restored on collect
    let rows: Vec<_> = radii
        .par_iter()
        .map(|r| doubling_scan(&x, std::slice::from_ref(r), params, cfg))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| anyhow!("{e}"))?;
    sink.columns(&base_cols)?;
    for row in rows.iter().flatten() {
        sink.row(
            &[
                fmt17(row.ln2_r),
                fmt17(row.ln_mu_r),
                fmt17(row.ln_mu_2r),
                fmt17(row.ln_mu_17r),
                fmt17(row.ratio2),
                fmt17(row.ratio17),
                fmt17(row.enclosure_gap),
            ],
            row,
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_blowup(
    x: &str,
    r: &str,
    radius: &str,
    grid: usize,
    delta: &str,
    cfg: &PhiConfig,
    params: MassParams,
    sink: &mut OutputSink,
    out: Option<&std::path::Path>,
) -> Result<ExitCode> {
    let x = parse_dyadic(x, "--x")?;
    let r = parse_dyadic(r, "--r")?;
    let big_r = parse_dyadic(radius, "--radius")?.to_f64();
    let delta = parse_dyadic(delta, "--delta")?.to_f64();
    let prof = density_profile(&x, &r, big_r, grid, delta, params, cfg)
        .map_err(|e| anyhow!("{e}"))?;
    sink.columns(&[
        "z",
        "delta",
        "ln_nu",
        "nu_density",
        "near_E_flag",
        "enclosure_gap",
    ])?;
    for p in &prof.points {
        sink.row(
            &[
                fmt17(p.z),
                fmt17(prof.delta),
                fmt17(p.ln_nu),
                fmt17(p.nu_density),
                p.near_e.to_string(),
                fmt17(p.enclosure_gap),
            ],
            p,
        )?;
    }
    // endpoint sidecar
    let e_json = serde_json::to_string(&prof.e_normalized)?;
    match out {
        Some(path) => {
            let sidecar = path.with_extension("epoints.json");
            std::fs::write(&sidecar, &e_json)?;
            eprintln!("endpoint set written to {}", sidecar.display());
        }
        None => sink.comment(&format!("epoints {e_json}"))?,
    }
    if let Some(w) = &prof.scale.window {
        eprintln!("window K = {}, rho = {:.3}, N = {}", w.k, w.rho, w.n_cover);
    } else if let Some(reason) = &prof.scale.absent_reason {
        eprintln!("no blow-up window: {reason}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_porosity(
    x: &str,
    r: &str,
    eps: f64,
    grid_gen: i32,
    cfg: &PhiConfig,
    params: MassParams,
    sink: &mut OutputSink,
) -> Result<ExitCode> {
    if !(eps > 0.0) {
        bail!("--eps {eps} must be positive");
    }
    let x = parse_dyadic(x, "--x")?;
    let r = parse_dyadic(r, "--r")?;
    let res = porosity_search(&x, &r, eps, grid_gen, params, cfg).map_err(|e| anyhow!("{e}"))?;
    sink.columns(&["x", "r", "eps", "delta", "y"])?;
    sink.row(
        &[
            res.x.to_string(),
            res.r.to_string(),
            fmt17(res.epsilon),
            fmt17(res.delta),
            res.hole_center.to_string(),
        ],
        &res,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(
    n: usize,
    depth: u32,
    seed: u64,
    cfg: &PhiConfig,
    sink: &mut OutputSink,
) -> Result<ExitCode> {
    let mut sampler = MuSampler::new(seed, depth).map_err(|e| anyhow!("{e}"))?;
    let pts = sampler.sample(n, cfg).map_err(|e| anyhow!("{e}"))?;
    sink.columns(&["x", "path"])?;
    #[derive(Serialize)]
    struct SampleRow<'a> {
        x: &'a DyadicRational,
        path: &'a [i64],
    }
    for (x, idx) in &pts {
        let row = SampleRow {
            x,
            path: idx.path(),
        };
        sink.row(
            &[
                x.to_string(),
                idx.path()
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            ],
            &row,
        )?;
    }
    Ok(ExitCode::SUCCESS)
}
