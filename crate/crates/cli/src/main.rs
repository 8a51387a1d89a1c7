mod input;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Result};
use apuf_core::{
    bin_size_1, cond_pmf_1, cond_pmf_2, entropy_curve, expected_report_1_with, expected_report_2_breakdown,
    expected_report_2_weighted, mc_batch, neighborhood_cells, pair_correlation, phi_to_challenge, predict_1, predict_2,
    profile_for_rho, region_grid, semimetric_to_factors, similarity_factor, similarity_probability, BinSpec,
    CellMembers, Crp, McConfig, McQuery, OneAnchorWeights, PhiVector, Semimetric,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use input::{check_lengths, parse_challenge, parse_crp, parse_response};
use output::{Format, Table};

/// Response correlation, prediction and entropy of arbiter PUFs.
///
/// Challenges are bitstrings `c1...cn` or JSON arrays of the n+1 entries of
/// their ±1 feature vector; known responses are written `CHALLENGE:+1`.
#[derive(Parser)]
#[command(name = "apuf", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, env = "APUF_FORMAT", value_enum, default_value = "csv")]
    format: Format,
    /// Shorthand for `--format json` (JSON lines).
    #[arg(long, global = true)]
    json: bool,
    /// Print floats with every digit instead of six significant ones.
    #[arg(long, global = true)]
    full_precision: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Similarity factor, correlation and response similarity of two challenges.
    Similarity {
        a: String,
        b: String,
        /// Expected number of stages.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Optimal prediction of a response from one or two known CRPs.
    Predict {
        #[arg(long = "known", required = true)]
        known: Vec<String>,
        #[arg(long)]
        target: String,
    },
    /// Response similarity, accuracy and entropies for every similarity factor.
    EntropyCurve {
        #[arg(long)]
        n: usize,
    },
    /// Count or list the challenges in a bin around one or two anchors.
    Bins(BinsArgs),
    /// Expected entropies and accuracy over the whole challenge space.
    Expected {
        #[arg(long)]
        n: usize,
        /// Correlation of two known challenges; omit for one known CRP.
        #[arg(long, allow_hyphen_values = true)]
        rho12: Option<f64>,
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        r1: String,
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        r2: String,
        /// One row per response pattern (two known CRPs only).
        #[arg(long)]
        breakdown: bool,
        /// Bin weighting for one known CRP.
        #[arg(long, value_enum, default_value = "census")]
        weights: Weights,
    },
    /// Count, accuracy and entropies of every feasible (rho13, rho23) cell.
    Region {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        rho12: f64,
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        r1: String,
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        r2: String,
    },
    /// Monte Carlo estimate against the closed form.
    Mc(McArgs),
}

#[derive(Args)]
struct BinsArgs {
    /// First anchor, optionally with its response (`CHALLENGE:R`).
    #[arg(long)]
    anchor: String,
    /// Second anchor with its response.
    #[arg(long)]
    anchor2: Option<String>,
    /// Response of the first anchor.
    #[arg(long, allow_hyphen_values = true)]
    r1: Option<String>,
    /// similarity_factor, response_similarity, accuracy, shannon_entropy or min_entropy.
    #[arg(long)]
    semimetric: Semimetric,
    #[arg(long, allow_hyphen_values = true)]
    value: f64,
    /// Absolute tolerance when matching the semimetric value.
    #[arg(long, default_value_t = apuf_core::bins::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Print sizes only.
    #[arg(long, conflicts_with = "limit")]
    count_only: bool,
    /// List at most this many challenges (per cell for two anchors).
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1_000_000)]
    instances: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exit with status 2 if |z| exceeds this.
    #[arg(long, default_value_t = 3.0)]
    z_threshold: f64,
    #[command(subcommand)]
    query: McKind,
}

#[derive(Subcommand)]
enum McKind {
    /// P[R_a = R_b].
    Similarity { a: String, b: String },
    /// P[R_target = +1 | known responses].
    Conditional {
        #[arg(long = "known", required = true)]
        known: Vec<String>,
        #[arg(long)]
        target: String,
    },
    /// Hit rate of the optimal predictor given the known responses.
    Accuracy {
        #[arg(long = "known", required = true)]
        known: Vec<String>,
        #[arg(long)]
        target: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Census,
    Shifted,
}

struct Ctx {
    format: Format,
    full_precision: bool,
}

impl Ctx {
    fn table<'a>(&self, out: &'a mut dyn Write, header: &[&'static str]) -> Result<Table<&'a mut dyn Write>> {
        Table::new(out, self.format, self.full_precision, header)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { format: if cli.json { Format::Json } else { cli.format }, full_precision: cli.full_precision };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&ctx, cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(ctx: &Ctx, command: Command, out: &mut dyn Write) -> Result<ExitCode> {
    match command {
        Command::Similarity { a, b, n } => similarity(ctx, &a, &b, n, out)?,
        Command::Predict { known, target } => predict(ctx, &known, &target, out)?,
        Command::EntropyCurve { n } => curve(ctx, n, out)?,
        Command::Bins(args) => bins(ctx, args, out)?,
        Command::Expected { n, rho12, r1, r2, breakdown, weights } => {
            expected(ctx, n, rho12, &r1, &r2, breakdown, weights, out)?
        }
        Command::Region { n, rho12, r1, r2 } => region(ctx, n, rho12, &r1, &r2, out)?,
        Command::Mc(args) => return mc(ctx, args, out),
    }
    Ok(ExitCode::SUCCESS)
}

fn similarity(ctx: &Ctx, a: &str, b: &str, n: Option<usize>, out: &mut dyn Write) -> Result<()> {
    let (a, b) = (parse_challenge(a)?, parse_challenge(b)?);
    check_lengths(n, [&a, &b])?;
    let s = similarity_factor(&a, &b)?;
    let mut t = ctx.table(out, &["n", "s", "rho", "p_same"])?;
    t.row(vec![
        a.n().into(),
        s.value().into(),
        pair_correlation(&a, &b)?.into(),
        similarity_probability(s, a.n())?.into(),
    ])?;
    t.finish()
}

fn known_crps(known: &[String]) -> Result<Vec<Crp>> {
    if known.len() > 2 {
        bail!("at most two known CRPs are supported, got {}", known.len());
    }
    known.iter().map(|k| parse_crp(k)).collect()
}

fn predict(ctx: &Ctx, known: &[String], target: &str, out: &mut dyn Write) -> Result<()> {
    let known = known_crps(known)?;
    let target = parse_challenge(target)?;
    check_lengths(None, known.iter().map(|k| &k.phi).chain([&target]))?;
    let pred = match known.as_slice() {
        [k] => predict_1(k, &target)?,
        [k1, k2] => predict_2(k1, k2, &target)?,
        _ => unreachable!(),
    };
    let mut t = ctx.table(out, &["predicted", "accuracy", "pmf_plus"])?;
    t.row(vec![pred.predicted.into(), pred.accuracy.into(), pred.pmf.into()])?;
    t.finish()
}

fn curve(ctx: &Ctx, n: usize, out: &mut dyn Write) -> Result<()> {
    let points = entropy_curve(n)?;
    let mut t = ctx.table(out, &["s", "rho", "p_same", "accuracy", "shannon", "min_entropy", "bin_size"])?;
    for p in points {
        t.row(vec![
            p.s.value().into(),
            p.s.rho(n).into(),
            p.p.into(),
            p.report.accuracy.into(),
            p.report.shannon.into(),
            p.report.min_entropy.into(),
            (&p.bin_size).into(),
        ])?;
    }
    t.finish()
}

fn bitstring(phi: &PhiVector) -> String {
    phi_to_challenge(phi).to_string()
}

fn bins(ctx: &Ctx, args: BinsArgs, out: &mut dyn Write) -> Result<()> {
    let spec = BinSpec::new(args.semimetric, args.value).with_tolerance(args.tolerance);
    let (anchor, anchor_r) = match args.anchor.rsplit_once(':') {
        Some(_) => {
            let k = parse_crp(&args.anchor)?;
            (k.phi, Some(k.response))
        }
        None => (parse_challenge(&args.anchor)?, None),
    };
    let Some(second) = args.anchor2 else {
        return bins_one(ctx, &anchor, &spec, args.count_only, args.limit, out);
    };
    let k2 = parse_crp(&second)?;
    check_lengths(None, [&anchor, &k2.phi])?;
    let r1 = match (args.r1, anchor_r) {
        (Some(r), _) => parse_response(&r)?,
        (None, Some(r)) => r,
        (None, None) => bail!("two anchors need the first response (--r1 or --anchor CHALLENGE:R)"),
    };
    let cells = neighborhood_cells(&anchor, &k2.phi, r1, k2.response, &spec)?;
    if args.count_only {
        let mut t = ctx.table(out, &["s13", "s23", "case", "rho13", "rho23", "pmf_plus", "count"])?;
        for c in &cells {
            let tri = c.key.triple();
            t.row(vec![
                c.key.s13.into(),
                c.key.s23.into(),
                c.key.case.label().into(),
                tri.rho13.into(),
                tri.rho23.into(),
                c.key.pmf(r1, k2.response)?.into(),
                (&c.count).into(),
            ])?;
        }
        return t.finish();
    }
    let mut t = ctx.table(out, &["challenge", "s13", "s23", "case"])?;
    for c in &cells {
        let members = CellMembers::new(&anchor, &k2.phi, &c.key)?;
        for phi in members.take(args.limit.unwrap_or(usize::MAX)) {
            t.row(vec![bitstring(&phi).into(), c.key.s13.into(), c.key.s23.into(), c.key.case.label().into()])?;
        }
    }
    t.finish()
}

fn bins_one(
    ctx: &Ctx,
    anchor: &PhiVector,
    spec: &BinSpec,
    count_only: bool,
    limit: Option<usize>,
    out: &mut dyn Write,
) -> Result<()> {
    let n = anchor.n();
    let factors = semimetric_to_factors(spec, n)?;
    if count_only {
        let mut t = ctx.table(out, &["s", "rho", "p_same", "count"])?;
        for s in factors {
            t.row(vec![
                s.value().into(),
                s.rho(n).into(),
                similarity_probability(s, n)?.into(),
                (&bin_size_1(s, n)?).into(),
            ])?;
        }
        return t.finish();
    }
    let mut t = ctx.table(out, &["challenge", "s"])?;
    let mut left = limit.unwrap_or(usize::MAX);
    for s in factors {
        for phi in apuf_core::enumerate_bin_1(anchor, s)? {
            if left == 0 {
                return t.finish();
            }
            left -= 1;
            t.row(vec![bitstring(&phi).into(), s.value().into()])?;
        }
    }
    t.finish()
}

#[allow(clippy::too_many_arguments)]
fn expected(
    ctx: &Ctx,
    n: usize,
    rho12: Option<f64>,
    r1: &str,
    r2: &str,
    breakdown: bool,
    weights: Weights,
    out: &mut dyn Write,
) -> Result<()> {
    let Some(rho12) = rho12 else {
        if breakdown {
            bail!("--breakdown needs --rho12");
        }
        let w = match weights {
            Weights::Census => OneAnchorWeights::Census,
            Weights::Shifted => OneAnchorWeights::Shifted,
        };
        let r = expected_report_1_with(n, w)?;
        let mut t = ctx.table(out, &["n", "min_entropy", "shannon", "accuracy", "challenges"])?;
        t.row(vec![
            n.into(),
            r.report.min_entropy.into(),
            r.report.shannon.into(),
            r.report.accuracy.into(),
            (&r.total).into(),
        ])?;
        return t.finish();
    };
    let mut t = ctx.table(out, &["n", "rho12", "r1", "r2", "min_entropy", "shannon", "accuracy"])?;
    let rows = if breakdown {
        expected_report_2_breakdown(n, rho12)?.into_iter().filter_map(|b| Some((b.r1, b.r2, b.report?))).collect()
    } else {
        let (r1, r2) = (parse_response(r1)?, parse_response(r2)?);
        vec![(r1, r2, expected_report_2_weighted(n, rho12, r1, r2)?.report)]
    };
    for (r1, r2, r) in rows {
        t.row(vec![
            n.into(),
            rho12.into(),
            r1.into(),
            r2.into(),
            r.min_entropy.into(),
            r.shannon.into(),
            r.accuracy.into(),
        ])?;
    }
    t.finish()
}

fn region(ctx: &Ctx, n: usize, rho12: f64, r1: &str, r2: &str, out: &mut dyn Write) -> Result<()> {
    let (r1, r2) = (parse_response(r1)?, parse_response(r2)?);
    let p12 = profile_for_rho(n, rho12)?;
    let mut t = ctx.table(
        out,
        &["rho13", "rho23", "s13", "s23", "case", "count", "pmf_plus", "accuracy", "shannon", "min_entropy"],
    )?;
    for p in region_grid(n, p12, r1, r2)? {
        t.row(vec![
            p.rho13.into(),
            p.rho23.into(),
            p.key.s13.into(),
            p.key.s23.into(),
            p.key.case.label().into(),
            (&p.count).into(),
            p.pmf.into(),
            p.report.accuracy.into(),
            p.report.shannon.into(),
            p.report.min_entropy.into(),
        ])?;
    }
    t.finish()
}

fn mc(ctx: &Ctx, args: McArgs, out: &mut dyn Write) -> Result<ExitCode> {
    let accuracy = matches!(args.query, McKind::Accuracy { .. });
    let (query, phis): (McQuery, Vec<PhiVector>) = match args.query {
        McKind::Similarity { a, b } => {
            let (a, b) = (parse_challenge(&a)?, parse_challenge(&b)?);
            (McQuery::Similarity { a: a.clone(), b: b.clone() }, vec![a, b])
        }
        McKind::Conditional { known, target } | McKind::Accuracy { known, target } => {
            let known = known_crps(&known)?;
            let target = parse_challenge(&target)?;
            // surfaces impossible evidence before sampling
            match known.as_slice() {
                [k] => cond_pmf_1(k, &target).map(drop)?,
                [k1, k2] => cond_pmf_2(k1, k2, &target).map(drop)?,
                _ => unreachable!(),
            }
            let phis = known.iter().map(|k| k.phi.clone()).chain([target.clone()]).collect();
            let q = if accuracy {
                McQuery::PredictorAccuracy { known, target }
            } else {
                McQuery::Conditional { known, target }
            };
            (q, phis)
        }
    };
    let n = check_lengths(None, &phis)?;
    let cfg = McConfig::new(n, args.sigma, args.instances, args.seed);
    let r = mc_batch(&cfg, std::slice::from_ref(&query))?[0];
    let mut t =
        ctx.table(out, &["n", "sigma", "instances", "seed", "samples", "estimate", "std_err", "analytic", "z_score"])?;
    t.row(vec![
        n.into(),
        args.sigma.into(),
        args.instances.into(),
        args.seed.to_string().into(),
        r.samples.into(),
        r.estimate.into(),
        r.std_err.into(),
        r.analytic.into(),
        r.z_score.into(),
    ])?;
    t.finish()?;
    if r.z_score.abs() > args.z_threshold {
        eprintln!("|z| = {:.3} exceeds {}", r.z_score.abs(), args.z_threshold);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
