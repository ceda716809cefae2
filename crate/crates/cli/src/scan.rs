//! The heavy-fraction experiment sweep: a grid over (q, n, density, ε,
//! seed), one CSV row per cell.
//!
//! Config files use key=value lines, `#` comments allowed:
//!
//! ```text
//! q = 3
//! coeffs = 1,1,1
//! n = 1:2
//! density = 0.5:1.0:0.25
//! eps = 0.3,0.5
//! seeds = 1,2
//! ```

use std::fmt::Write as _;

use apcap::{degree_profile, heavy_set, random_subset, CoeffTriple, Error, FieldCtx, Result};

pub struct ScanConfig {
    pub q: u64,
    pub coeffs: (u16, u16, u16),
    pub n_range: (usize, usize),
    pub densities: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub seeds: Vec<u64>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadConfig(msg.into())
}

/// `lo:hi:step` over u32, step defaulting to 1 when omitted.
pub fn parse_range_spec(spec: &str) -> Result<(u32, u32, u32)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| s.trim().parse::<u32>().map_err(|_| bad(format!("bad range component {:?}", s)));
    match parts.as_slice() {
        [lo, hi] => Ok((parse(lo)?, parse(hi)?, 1)),
        [lo, hi, step] => {
            let step = parse(step)?;
            if step == 0 {
                return Err(bad("range step must be positive"));
            }
            Ok((parse(lo)?, parse(hi)?, step))
        }
        _ => Err(bad(format!("expected lo:hi[:step], got {:?}", spec))),
    }
}

fn parse_f64_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("bad number {:?}", s)));
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [lo, hi, step] => {
            let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
            if step <= 0.0 {
                return Err(bad("range step must be positive"));
            }
            let mut out = Vec::new();
            let mut x = lo;
            while x <= hi + 1e-12 {
                out.push(x);
                x += step;
            }
            Ok(out)
        }
        _ => Err(bad(format!("expected value or lo:hi:step, got {:?}", spec))),
    }
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>> {
    spec.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| bad(format!("bad {} entry {:?}", what, s))))
        .collect()
}

impl ScanConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut q = None;
        let mut coeffs = (1u16, 1u16, 1u16);
        let mut n_range = None;
        let mut densities = None;
        let mut eps_grid = None;
        let mut seeds = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected key=value, got {:?}", i + 1, line)))?;
            let value = value.trim();
            match key.trim() {
                "q" => q = Some(value.parse::<u64>().map_err(|_| bad(format!("bad q {:?}", value)))?),
                "coeffs" => {
                    let c: Vec<u16> = parse_list(value, "coeffs")?;
                    if c.len() != 3 {
                        return Err(bad("coeffs needs exactly 3 entries"));
                    }
                    coeffs = (c[0], c[1], c[2]);
                }
                "n" => {
                    let (lo, hi, step) = parse_range_spec(value)?;
                    if step != 1 {
                        return Err(bad("n range uses step 1"));
                    }
                    n_range = Some((lo as usize, hi as usize));
                }
                "density" => densities = Some(parse_f64_range(value)?),
                "eps" => eps_grid = Some(parse_list(value, "eps")?),
                "seeds" => seeds = Some(parse_list(value, "seeds")?),
                other => return Err(bad(format!("unknown key {:?}", other))),
            }
        }
        Ok(ScanConfig {
            q: q.ok_or_else(|| bad("missing key q"))?,
            coeffs,
            n_range: n_range.unwrap_or((1, 0)), // empty grid unless given
            densities: densities.unwrap_or_default(),
            eps_grid: eps_grid.unwrap_or_default(),
            seeds: seeds.unwrap_or_default(),
        })
    }
}

/// One row per (n, density, ε, seed) cell: the measured heavy fraction of a
/// seeded random subset.
pub fn run_scan(config: &ScanConfig) -> Result<String> {
    let ctx = FieldCtx::new(config.q)?;
    let t = CoeffTriple::new(&ctx, config.coeffs.0, config.coeffs.1, config.coeffs.2)?;
    let mut out = String::from("q,n,density,eps,seed,set_size,heavy_fraction\n");
    for n in config.n_range.0..=config.n_range.1 {
        for &density in &config.densities {
            for &seed in &config.seeds {
                let set = random_subset(ctx.q(), n, density, seed)?;
                if set.is_empty() {
                    for &eps in &config.eps_grid {
                        let _ = writeln!(out, "{},{},{},{},{},0,", config.q, n, density, eps, seed);
                    }
                    continue;
                }
                let profile = degree_profile(&set, &t)?;
                for &eps in &config.eps_grid {
                    let heavy = heavy_set(&profile, eps);
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{:.6}",
                        config.q,
                        n,
                        density,
                        eps,
                        seed,
                        set.len(),
                        heavy.len() as f64 / set.len() as f64
                    );
                }
            }
        }
    }
    Ok(out)
}
