mod report;
mod scan;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use apcap::{
    caro_wei_bound, caro_wei_greedy, classify_eps_delta, clp_decomposition,
    degree_profile, find_distinct_solution, heavy_set, is_cap_set, max_cap_exact, parse_set,
    planted_light_set, prefix_rearrange, random_subset, serialize_set, support_hypergraph,
    ap_tensor, slice_rank_exact_small, BoundsReport, ChainOutcome, CoeffTriple, CoeffVector,
    FieldCtx, NotFoundReason, PointSet, SearchMode,
};

use report::RunReport;

/// Almost-cap-set toolkit: degree profiles, slice rank, Caro-Wei greedy,
/// CLP/EG bounds, and distinct-solution chains over prime fields.
///
/// Randomized subcommands are bit-reproducible given --seed. Outputs do not
/// depend on --threads, except that `search` only guarantees a stable size
/// (not witness identity) across thread counts.
#[derive(Parser)]
#[command(name = "apcap", version, max_term_width = 100)]
struct Cli {
    /// Worker threads for parallelizable operations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format; CSV applies only to sweep outputs.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SetArgs {
    /// Path to a set file ("<q> <n>" header, one point per line).
    #[arg(long)]
    set: PathBuf,
    /// Coefficient triple a,b,c (nonzero, summing to 0 mod q).
    #[arg(long, value_delimiter = ',')]
    coeffs: Vec<u16>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-point solution-pair counts d_x.
    Profile(SetArgs),
    /// (ε,δ)-cap classification with the light-set witness.
    Classify {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Strict cap-set check (only constant solutions).
    Capcheck(SetArgs),
    /// The sparse solution tensor; optionally its exact slice rank, or the
    /// CLP decomposition over the full space.
    Tensor {
        #[command(flatten)]
        set: SetArgs,
        /// Also compute the exact slice rank (tiny instances only).
        #[arg(long)]
        rank: bool,
        /// Emit the CLP slice decomposition; requires the set to be the
        /// full space F_q^n.
        #[arg(long)]
        clp: bool,
    },
    /// Support hypergraph plus Caro-Wei greedy independent set.
    Indep {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exponent in the Caro-Wei degree sum.
        #[arg(long, default_value_t = 1.0 / 3.0)]
        exponent: f64,
    },
    /// Monomial counts, finite-n rates, b_q and the ε-budget.
    Bounds {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: Option<u32>,
        /// Emit CSV rows (n, M_n, finite_rate) over lo:hi:step.
        #[arg(long, value_name = "LO:HI:STEP")]
        n_sweep: Option<String>,
    },
    /// Distinct-solution chain solver for d >= 4 coefficients.
    Chain {
        #[arg(long, value_delimiter = ',')]
        coeffs: Vec<u16>,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Exact maximum-cap search.
    Search {
        #[arg(long, default_value = "bnb")]
        mode: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1u16, 1, 1])]
        coeffs: Vec<u16>,
    },
    /// Generate a set file: random subset or planted almost-cap instance.
    Gen {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Thin a density-0.5 subset until this light fraction is reached.
        #[arg(long, value_name = "FRACTION")]
        planted_light: Option<f64>,
        /// Coefficients for the planted mode.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1u16, 1, 1])]
        coeffs: Vec<u16>,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heavy-fraction sweep over a (q, n, density, ε, seed) grid.
    Scan {
        /// Config file with key=value lines; see the README for keys.
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // ignore failure: the global pool may already be initialized in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = json!({"error": {"code": error_code(&e), "message": e.to_string()}});
            println!("{}", serde_json::to_string_pretty(&payload).expect("error serializes"));
            ExitCode::FAILURE
        }
    }
}

fn error_code(e: &apcap::Error) -> &'static str {
    use apcap::Error::*;
    match e {
        NotPrime(_) => "not_prime",
        OutOfRange(_) => "out_of_range",
        DigitOutOfRange { .. } => "digit_out_of_range",
        CodeOutOfRange { .. } => "code_out_of_range",
        DimensionMismatch(_) => "dimension_mismatch",
        FieldMismatch { .. } => "field_mismatch",
        BadHeader { .. } => "bad_header",
        BadDigit { .. } => "bad_digit",
        DuplicatePoint { .. } => "duplicate_point",
        InvalidTriple(_) => "invalid_triple",
        TooLarge(_) => "too_large",
        NotIndependent => "not_independent",
        NoValidRearrangement => "no_valid_rearrangement",
        TooSmall { .. } => "too_small",
        Infeasible { .. } => "infeasible",
        BadConfig(_) => "bad_config",
    }
}

fn load_set(path: &PathBuf) -> apcap::Result<(PointSet, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| apcap::Error::BadConfig(format!("cannot read {}: {}", path.display(), e)))?;
    let set = parse_set(&text)?;
    let canonical = serialize_set(&set);
    Ok((set, canonical))
}

fn triple_for(set: &PointSet, coeffs: &[u16]) -> apcap::Result<CoeffTriple> {
    let ctx = FieldCtx::new(set.q() as u64)?;
    if coeffs.len() != 3 {
        return Err(apcap::Error::InvalidTriple(format!("expected 3 coefficients, got {}", coeffs.len())));
    }
    CoeffTriple::new(&ctx, coeffs[0], coeffs[1], coeffs[2])
}

fn run(command: Command) -> apcap::Result<()> {
    match command {
        Command::Profile(args) => {
            let (set, canonical) = load_set(&args.set)?;
            let t = triple_for(&set, &args.coeffs)?;
            let mut rep = RunReport::start("profile", &canonical);
            rep.param("coeffs", json!(args.coeffs));
            let profile = degree_profile(&set, &t)?;
            rep.finish(profile.to_json());
            Ok(())
        }
        Command::Classify { set, eps, delta } => {
            let (points, canonical) = load_set(&set.set)?;
            let t = triple_for(&points, &set.coeffs)?;
            let mut rep = RunReport::start("classify", &canonical);
            rep.param("coeffs", json!(set.coeffs));
            rep.param("eps", json!(eps));
            rep.param("delta", json!(delta));
            let profile = degree_profile(&points, &t)?;
            let c = classify_eps_delta(&profile, eps, delta);
            let heavy = heavy_set(&profile, eps);
            rep.finish(json!({
                "is_cap": c.is_cap,
                "witness": c.witness.codes(),
                "heavy_fraction": if points.is_empty() { 0.0 } else { heavy.len() as f64 / points.len() as f64 },
            }));
            Ok(())
        }
        Command::Capcheck(args) => {
            let (set, canonical) = load_set(&args.set)?;
            let t = triple_for(&set, &args.coeffs)?;
            let mut rep = RunReport::start("capcheck", &canonical);
            rep.param("coeffs", json!(args.coeffs));
            rep.finish(json!({"is_cap_set": is_cap_set(&set, &t)?}));
            Ok(())
        }
        Command::Tensor { set, rank, clp } => {
            let (points, canonical) = load_set(&set.set)?;
            let t = triple_for(&points, &set.coeffs)?;
            let mut rep = RunReport::start("tensor", &canonical);
            rep.param("coeffs", json!(set.coeffs));
            let tensor = ap_tensor(&points, &t)?;
            let mut result = tensor.to_json();
            if rank {
                result["slice_rank"] = json!(slice_rank_exact_small(&tensor)?);
            }
            if clp {
                let full = PointSet::full_space(points.q(), points.n())?;
                if full != points {
                    return Err(apcap::Error::BadConfig("--clp requires the full space F_q^n as the set".into()));
                }
                let d = clp_decomposition(&t, points.n())?;
                result["clp"] = d.to_json();
            }
            rep.finish(result);
            Ok(())
        }
        Command::Indep { set, trials, seed, exponent } => {
            let (points, canonical) = load_set(&set.set)?;
            let t = triple_for(&points, &set.coeffs)?;
            let mut rep = RunReport::start("indep", &canonical);
            rep.param("coeffs", json!(set.coeffs));
            rep.param("trials", json!(trials));
            rep.param("exponent", json!(exponent));
            rep.seed(seed);
            let tensor = ap_tensor(&points, &t)?;
            let all: Vec<u32> = (1..=points.len() as u32).collect();
            let h = support_hypergraph(&tensor, &all);
            let chosen = caro_wei_greedy(&h, trials, seed);
            let mut result = h.to_json();
            result["independent_set"] = json!(chosen);
            result["independent_size"] = json!(chosen.len());
            result["caro_wei_sum"] = json!(caro_wei_bound(&h, exponent));
            rep.finish(result);
            Ok(())
        }
        Command::Bounds { q, n, n_sweep } => {
            if let Some(spec) = n_sweep {
                let (lo, hi, step) = scan::parse_range_spec(&spec)?;
                let ctx = FieldCtx::new(q)?;
                println!("n,monomial_count,finite_rate");
                let mut n = lo;
                while n <= hi {
                    let m = apcap::monomial_count(ctx.q(), n);
                    println!("{},{},{:.6}", n, m, apcap::finite_rate(ctx.q(), n.max(1)));
                    n += step;
                }
                return Ok(());
            }
            let report = BoundsReport::compute(q, n)?;
            let mut rep = RunReport::start("bounds", &format!("q={}", q));
            rep.param("q", json!(q));
            if let Some(n) = n {
                rep.param("n", json!(n));
            }
            rep.finish(serde_json::to_value(&report).expect("report serializes"));
            Ok(())
        }
        Command::Chain { coeffs, set, budget } => {
            let (points, canonical) = load_set(&set)?;
            let ctx = FieldCtx::new(points.q() as u64)?;
            let cv = CoeffVector::new(&ctx, coeffs.clone())?;
            let mut rep = RunReport::start("chain", &canonical);
            rep.param("coeffs", json!(coeffs));
            rep.param("budget", json!(budget));
            let perm = prefix_rearrange(&cv)?;
            let result = match find_distinct_solution(&points, &cv, budget)? {
                ChainOutcome::Found { solution, nodes, permutation } => json!({
                    "found": true,
                    "solution": solution,
                    "nodes": nodes,
                    "permutation": permutation,
                }),
                ChainOutcome::NotFound { reason, nodes } => json!({
                    "found": false,
                    "reason": match reason {
                        NotFoundReason::BudgetExhausted => "budget_exhausted",
                        NotFoundReason::SearchExhausted => "search_exhausted",
                    },
                    "nodes": nodes,
                    "permutation": perm,
                }),
            };
            rep.finish(result);
            Ok(())
        }
        Command::Search { mode, q, n, coeffs } => {
            let ctx = FieldCtx::new(q)?;
            if coeffs.len() != 3 {
                return Err(apcap::Error::InvalidTriple(format!("expected 3 coefficients, got {}", coeffs.len())));
            }
            let t = CoeffTriple::new(&ctx, coeffs[0], coeffs[1], coeffs[2])?;
            let mode = match mode.as_str() {
                "exhaustive" => SearchMode::Exhaustive,
                "bnb" => SearchMode::BranchAndBound,
                other => return Err(apcap::Error::BadConfig(format!("unknown search mode {:?}", other))),
            };
            let mut rep = RunReport::start("search", &format!("q={} n={}", q, n));
            rep.param("q", json!(q));
            rep.param("n", json!(n));
            rep.param("coeffs", json!(coeffs));
            let r = max_cap_exact(&t, n, mode)?;
            rep.finish(json!({"size": r.size, "witness": r.witness.codes(), "nodes": r.nodes}));
            Ok(())
        }
        Command::Gen { q, n, density, seed, planted_light, coeffs, out } => {
            let ctx = FieldCtx::new(q)?;
            let set = match planted_light {
                Some(target) => {
                    if coeffs.len() != 3 {
                        return Err(apcap::Error::InvalidTriple(format!("expected 3 coefficients, got {}", coeffs.len())));
                    }
                    let t = CoeffTriple::new(&ctx, coeffs[0], coeffs[1], coeffs[2])?;
                    planted_light_set(&t, n, target, seed)?.set
                }
                None => random_subset(ctx.q(), n, density, seed)?,
            };
            let text = serialize_set(&set);
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| apcap::Error::BadConfig(format!("cannot write {}: {}", path.display(), e)))?,
                None => print!("{}", text),
            }
            Ok(())
        }
        Command::Scan { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| apcap::Error::BadConfig(format!("cannot read {}: {}", config.display(), e)))?;
            let grid = scan::ScanConfig::parse(&text)?;
            print!("{}", scan::run_scan(&grid)?);
            Ok(())
        }
    }
}
