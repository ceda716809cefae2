//! Exact maximum-cap search and seeded instance generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::field::{decode, encode, space_size, FieldCtx, PointSet};
use crate::profile::{degree_profile, heavy_threshold, CoeffTriple};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    BranchAndBound,
    Random,
}

/// Parameters for the generator / search surface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub q: u16,
    pub n: usize,
    pub coeffs: (u16, u16, u16),
    pub mode: SearchMode,
    pub seed: u64,
    pub density: f64,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapSearchResult {
    pub size: usize,
    pub witness: PointSet,
    pub nodes: u64,
}

const EXHAUSTIVE_CAP: u64 = 100;
const BNB_CAP: u64 = 10_000;

/// Maximum cardinality of a cap set in `F_q^n` for the triple, with one
/// witness. DFS over codes in ascending order; branch-and-bound mode prunes
/// with `current + remaining <= incumbent`.
pub fn max_cap_exact(t: &CoeffTriple, n: usize, mode: SearchMode) -> Result<CapSearchResult> {
    let ctx = FieldCtx::new(t.q() as u64)?;
    let q = ctx.q();
    let size = space_size(q, n)?;
    let cap = match mode {
        SearchMode::Exhaustive => EXHAUSTIVE_CAP,
        _ => BNB_CAP,
    };
    if size > cap {
        return Err(Error::TooLarge(format!("q^n = {} exceeds the {} search cap", size, cap)));
    }
    let use_bound = !matches!(mode, SearchMode::Exhaustive);

    let (a, b, c) = t.abc();
    let digits: Vec<Vec<u16>> = (0..size).map(|code| decode(code, q, n).expect("in range")).collect();
    let combine3 = |x: u64, y: u64| -> u64 {
        // z determined by (x, y): z = -c^{-1}(ax + by)
        let cinv_neg = ctx.neg(ctx.inv(c));
        let zd: Vec<u16> = digits[x as usize]
            .iter()
            .zip(&digits[y as usize])
            .map(|(&xd, &yd)| ctx.mul(cinv_neg, ctx.add(ctx.mul(a, xd), ctx.mul(b, yd))))
            .collect();
        encode(&zd, q).expect("digits in range")
    };

    struct Dfs<'a> {
        size: u64,
        use_bound: bool,
        combine3: &'a dyn Fn(u64, u64) -> u64,
        best: Vec<u64>,
        nodes: u64,
    }
    impl Dfs<'_> {
        /// True iff adding `p` to the cap `s` creates a nonconstant solution.
        /// New solutions must involve `p` in at least one coordinate; `s` is
        /// kept in ascending code order so membership is a binary search.
        fn conflicts(&self, s: &[u64], p: u64) -> bool {
            let mut with_p = s.to_vec();
            with_p.push(p);
            for &u in &with_p {
                for &v in &with_p {
                    let z = (self.combine3)(u, v);
                    if with_p.binary_search(&z).is_ok() {
                        let constant = u == v && v == z;
                        let involves_p = u == p || v == p || z == p;
                        if involves_p && !constant {
                            return true;
                        }
                    }
                }
            }
            false
        }

        fn dfs(&mut self, s: &mut Vec<u64>, next: u64) {
            self.nodes += 1;
            if s.len() > self.best.len() {
                self.best = s.clone();
            }
            if next >= self.size {
                return;
            }
            if self.use_bound && s.len() + (self.size - next) as usize <= self.best.len() {
                return;
            }
            for p in next..self.size {
                if self.use_bound && s.len() + (self.size - p) as usize <= self.best.len() {
                    break;
                }
                if !self.conflicts(s, p) {
                    s.push(p);
                    self.dfs(s, p + 1);
                    s.pop();
                }
            }
        }
    }

    let mut dfs = Dfs { size, use_bound, combine3: &combine3, best: Vec::new(), nodes: 0 };
    let mut stack = Vec::new();
    dfs.dfs(&mut stack, 0);
    let witness = PointSet::from_codes(q, n, dfs.best.clone())?;
    Ok(CapSearchResult { size: dfs.best.len(), witness, nodes: dfs.nodes })
}

/// Each point of `F_q^n` included independently with probability `density`;
/// deterministic per seed.
pub fn random_subset(q: u16, n: usize, density: f64, seed: u64) -> Result<PointSet> {
    let size = space_size(q, n)?;
    if size > 1 << 24 {
        return Err(Error::TooLarge(format!("space of size {} too large to sample", size)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codes: Vec<u64> = (0..size).filter(|_| rng.gen::<f64>() < density).collect();
    PointSet::from_codes(q, n, codes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSet {
    pub set: PointSet,
    pub achieved_fraction: f64,
}

/// Starts from a density-0.5 random subset and greedily removes the
/// highest-degree point (ties to the smallest code) until the light
/// fraction at ε = 0.5 reaches `target_light_fraction` or no removal can
/// help. The achieved fraction is reported either way.
pub fn planted_light_set(
    t: &CoeffTriple,
    n: usize,
    target_light_fraction: f64,
    seed: u64,
) -> Result<PlantedSet> {
    let start = random_subset(t.q(), n, 0.5, seed)?;
    thin_to_light(start, t, target_light_fraction)
}

/// The removal loop behind [`planted_light_set`], usable with any start set.
pub fn thin_to_light(start: PointSet, t: &CoeffTriple, target: f64) -> Result<PlantedSet> {
    let mut set = start;
    let mut best = light_fraction(&set, t)?;
    loop {
        if best >= target {
            return Ok(PlantedSet { set, achieved_fraction: best });
        }
        if set.len() <= 1 {
            return Err(Error::Infeasible { target, achieved: best });
        }
        let profile = degree_profile(&set, t)?;
        let (pos, _) = profile
            .degrees()
            .iter()
            .enumerate()
            .max_by_key(|&(i, &d)| (d, std::cmp::Reverse(profile.set().codes()[i])))
            .expect("set is nonempty");
        let victim = profile.set().codes()[pos];
        let mut next = set.clone();
        next.remove(victim);
        let f = light_fraction(&next, t)?;
        set = next;
        best = f;
    }
}

fn light_fraction(set: &PointSet, t: &CoeffTriple) -> Result<f64> {
    if set.is_empty() {
        return Ok(0.0);
    }
    let profile = degree_profile(set, t)?;
    let m = heavy_threshold(set.len() as u64, 0.5);
    let light = profile.degrees().iter().filter(|&&d| d < m).count();
    Ok(light as f64 / set.len() as f64)
}
