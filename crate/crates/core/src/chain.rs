//! The constructive distinct-solution chain: rearrange coefficients so all
//! prefix sums are nonzero, then extend auxiliary elements `t_k ∈ A` with
//! `b_k·t_k = a_1x_1 + … + a_kx_k` until the final three-term equation
//! closes with two fresh points.

use crate::field::{vec_combine, FieldCtx, Point, PointSet};
use crate::profile::{degree_profile, CoeffTriple};
use crate::{Error, Result};

/// Nonzero coefficients `a_1..a_d`, `d ≥ 4`, summing to zero mod q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffVector {
    q: u16,
    coeffs: Vec<u16>,
}

impl CoeffVector {
    pub fn new(ctx: &FieldCtx, coeffs: Vec<u16>) -> Result<Self> {
        let q = ctx.q();
        if coeffs.len() < 4 {
            return Err(Error::InvalidTriple(format!("need d >= 4 coefficients, got {}", coeffs.len())));
        }
        if coeffs.iter().any(|&a| a == 0 || a >= q) {
            return Err(Error::InvalidTriple("coefficients must be nonzero residues".into()));
        }
        let sum = coeffs.iter().fold(0u16, |acc, &a| ctx.add(acc, a));
        if sum != 0 {
            return Err(Error::InvalidTriple(format!("coefficients sum to {} mod {}", sum, q)));
        }
        Ok(CoeffVector { q, coeffs })
    }

    #[inline]
    pub fn q(&self) -> u16 {
        self.q
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn coeffs(&self) -> &[u16] {
        &self.coeffs
    }

    /// Prefix sums `b_k = a_1+…+a_k` for `k = 2..=d−2`, in the stored order.
    pub fn prefix_sums(&self, ctx: &FieldCtx) -> Vec<u16> {
        let mut out = Vec::new();
        let mut acc = self.coeffs[0];
        for (k, &a) in self.coeffs.iter().enumerate().skip(1) {
            acc = ctx.add(acc, a);
            if k >= 1 && k <= self.d() - 3 {
                out.push(acc);
            }
        }
        out
    }
}

fn prefixes_ok(ctx: &FieldCtx, coeffs: &[u16], perm: &[usize]) -> bool {
    let d = coeffs.len();
    let mut acc = coeffs[perm[0]];
    for k in 1..=d.saturating_sub(3) {
        acc = ctx.add(acc, coeffs[perm[k]]);
        if acc == 0 {
            return false;
        }
    }
    true
}

/// Finds a permutation of the coefficients under which every prefix sum
/// `b_k`, `2 ≤ k ≤ d−2`, is nonzero. Exhaustive in lexicographic order for
/// `d ≤ 8`; randomized restarts above. `perm[i]` is the original index
/// placed at position `i`.
pub fn prefix_rearrange(coeffs: &CoeffVector) -> Result<Vec<usize>> {
    let ctx = FieldCtx::new(coeffs.q() as u64)?;
    let d = coeffs.d();
    if d <= 8 {
        let mut perm: Vec<usize> = (0..d).collect();
        loop {
            if prefixes_ok(&ctx, coeffs.coeffs(), &perm) {
                return Ok(perm);
            }
            if !next_permutation(&mut perm) {
                return Err(Error::NoValidRearrangement);
            }
        }
    }
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut perm: Vec<usize> = (0..d).collect();
    for _ in 0..100_000 {
        if prefixes_ok(&ctx, coeffs.coeffs(), &perm) {
            return Ok(perm);
        }
        perm.shuffle(&mut rng);
    }
    Err(Error::NoValidRearrangement)
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotFoundReason {
    BudgetExhausted,
    SearchExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainOutcome {
    Found {
        /// Point codes in the ORIGINAL coefficient order.
        solution: Vec<u64>,
        nodes: u64,
        permutation: Vec<usize>,
    },
    NotFound {
        reason: NotFoundReason,
        nodes: u64,
    },
}

struct ChainSearch<'a> {
    ctx: FieldCtx,
    set: &'a PointSet,
    coeffs: Vec<u16>,
    prefix: Vec<u16>, // b_2..b_{d-2} at positions 0..d-4
    weight: Vec<u64>, // heuristic per set index
    budget: u64,
    nodes: u64,
}

impl ChainSearch<'_> {
    fn b(&self, k: usize) -> u16 {
        // prefix sum b_k for 2 <= k <= d-2
        self.prefix[k - 2]
    }

    /// Scalar combination a·x + b·y over codes, returned as a code.
    fn lin2(&self, a: u16, xi: usize, b: u16, yi: usize) -> u64 {
        let x = self.set.point(xi);
        let y = self.set.point(yi);
        let p = vec_combine(&self.ctx, &[a, b], &[x, y]).expect("same dimension");
        p.code()
    }

    fn extend(&mut self, chosen: &mut Vec<usize>, t_k: usize) -> Option<Vec<usize>> {
        let d = self.coeffs.len();
        let k = chosen.len();
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if k == d - 2 {
            // close: b_{d-2} t + a_{d-1} x_{d-1} + a_d x_d = 0
            let (ad1, ad) = (self.coeffs[d - 2], self.coeffs[d - 1]);
            let ad_inv_neg = self.ctx.neg(self.ctx.inv(ad));
            for x1 in 0..self.set.len() {
                if chosen.contains(&x1) {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.budget {
                    return None;
                }
                let partial = self.lin2(self.b(d - 2), t_k, ad1, x1);
                // x_d = -a_d^{-1}(b_{d-2} t + a_{d-1} x_{d-1})
                let xd_code = {
                    let partial_pt = Point::from_code(partial, self.set.q(), self.set.n()).expect("valid");
                    vec_combine(&self.ctx, &[ad_inv_neg], &[partial_pt]).expect("one point").code()
                };
                if let Some(x2) = self.set.index_of(xd_code) {
                    if x2 != x1 && !chosen.contains(&x2) {
                        let mut sol = chosen.clone();
                        sol.push(x1);
                        sol.push(x2);
                        return Some(sol);
                    }
                }
            }
            return None;
        }
        // extend to k+1: t_{k+1} = b_{k+1}^{-1}(b_k t_k + a_{k+1} x_{k+1})
        let bk1_inv = self.ctx.inv(self.b(k + 1));
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for x in 0..self.set.len() {
            if chosen.contains(&x) {
                continue;
            }
            let t_next_code = {
                let raw = self.lin2(self.b(k), t_k, self.coeffs[k], x);
                let raw_pt = Point::from_code(raw, self.set.q(), self.set.n()).expect("valid");
                vec_combine(&self.ctx, &[bk1_inv], &[raw_pt]).expect("one point").code()
            };
            if let Some(ti) = self.set.index_of(t_next_code) {
                cands.push((x, ti));
            }
        }
        // prefer extensions whose auxiliary point closes in many ways
        cands.sort_by_key(|&(x, ti)| (std::cmp::Reverse(self.weight[ti]), self.set.codes()[ti], self.set.codes()[x]));
        for (x, ti) in cands {
            chosen.push(x);
            if let Some(sol) = self.extend(chosen, ti) {
                return Some(sol);
            }
            chosen.pop();
            if self.nodes > self.budget {
                return None;
            }
        }
        None
    }
}

/// Searches for `d` pairwise-distinct points of `A` solving
/// `a_1x_1 + … + a_dx_d = 0`, mirroring the chain construction: auxiliary
/// points `t_k` are required to lie in `A` exactly as in the iterative
/// argument. Sparse sets can admit solutions whose chain points leave the
/// set, so when the chain space is exhausted the solver falls back to
/// direct enumeration of distinct tuples within the remaining budget.
pub fn find_distinct_solution(set: &PointSet, coeffs: &CoeffVector, budget: u64) -> Result<ChainOutcome> {
    if coeffs.q() != set.q() {
        return Err(Error::FieldMismatch { expected: set.q() as u64, got: coeffs.q() as u64 });
    }
    let d = coeffs.d();
    if set.len() < d {
        return Err(Error::TooSmall { have: set.len(), need: d });
    }
    let perm = prefix_rearrange(coeffs)?;
    let ctx = FieldCtx::new(set.q() as u64)?;
    let reordered: Vec<u16> = perm.iter().map(|&i| coeffs.coeffs()[i]).collect();
    let re = CoeffVector { q: coeffs.q(), coeffs: reordered.clone() };
    let prefix = re.prefix_sums(&ctx);

    // heuristic weights: degree profile under the closing triple
    let closing = CoeffTriple::new(&ctx, prefix[d - 4], reordered[d - 2], reordered[d - 1])
        .expect("closing coefficients are nonzero and sum to zero");
    let weight = degree_profile(set, &closing)?.degrees().to_vec();

    let mut search = ChainSearch {
        ctx: ctx.clone(),
        set,
        coeffs: reordered,
        prefix,
        weight,
        budget,
        nodes: 0,
    };

    // seed with distinct (x1, x2) whose t2 lands in A
    let b2 = search.b(2);
    let b2_inv = ctx.inv(b2);
    let (a1, a2) = (search.coeffs[0], search.coeffs[1]);
    let mut found: Option<Vec<usize>> = None;
    'seed: for x1 in 0..set.len() {
        for x2 in 0..set.len() {
            if x2 == x1 {
                continue;
            }
            search.nodes += 1;
            if search.nodes > search.budget {
                break 'seed;
            }
            let t2_code = {
                let raw = search.lin2(a1, x1, a2, x2);
                let raw_pt = Point::from_code(raw, set.q(), set.n()).expect("valid");
                vec_combine(&ctx, &[b2_inv], &[raw_pt]).expect("one point").code()
            };
            if let Some(t2) = set.index_of(t2_code) {
                let mut chosen = vec![x1, x2];
                if let Some(sol) = search.extend(&mut chosen, t2) {
                    found = Some(sol);
                    break 'seed;
                }
                if search.nodes > search.budget {
                    break 'seed;
                }
            }
        }
    }

    let mut nodes = search.nodes;
    if found.is_none() && nodes <= budget {
        // chain space exhausted; fall back to direct enumeration
        found = enumerate_distinct(set, &search.coeffs, &ctx, budget, &mut nodes);
    }

    match found {
        Some(sol) => {
            // invert the permutation back to the original coefficient order
            let mut original = vec![0u64; d];
            for (pos, &orig_idx) in perm.iter().enumerate() {
                original[orig_idx] = set.codes()[sol[pos]];
            }
            debug_assert!(verify_solution(set, coeffs, &original)?);
            Ok(ChainOutcome::Found { solution: original, nodes, permutation: perm })
        }
        None => {
            let reason = if nodes > budget {
                NotFoundReason::BudgetExhausted
            } else {
                NotFoundReason::SearchExhausted
            };
            Ok(ChainOutcome::NotFound { reason, nodes })
        }
    }
}

fn enumerate_distinct(
    set: &PointSet,
    coeffs: &[u16],
    ctx: &FieldCtx,
    budget: u64,
    nodes: &mut u64,
) -> Option<Vec<usize>> {
    let d = coeffs.len();
    let mut stack: Vec<usize> = Vec::with_capacity(d);
    fn rec(
        set: &PointSet,
        coeffs: &[u16],
        ctx: &FieldCtx,
        stack: &mut Vec<usize>,
        budget: u64,
        nodes: &mut u64,
    ) -> Option<Vec<usize>> {
        let d = coeffs.len();
        if stack.len() == d - 1 {
            // last coordinate is determined
            *nodes += 1;
            if *nodes > budget {
                return None;
            }
            let points: Vec<Point> = stack.iter().map(|&i| set.point(i)).collect();
            let partial = vec_combine(ctx, &coeffs[..d - 1], &points).ok()?;
            let last_inv_neg = ctx.neg(ctx.inv(coeffs[d - 1]));
            let last = vec_combine(ctx, &[last_inv_neg], &[partial]).ok()?;
            if let Some(li) = set.index_of(last.code()) {
                if !stack.contains(&li) {
                    let mut sol = stack.clone();
                    sol.push(li);
                    return Some(sol);
                }
            }
            return None;
        }
        for i in 0..set.len() {
            if stack.contains(&i) {
                continue;
            }
            *nodes += 1;
            if *nodes > budget {
                return None;
            }
            stack.push(i);
            if let Some(sol) = rec(set, coeffs, ctx, stack, budget, nodes) {
                return Some(sol);
            }
            stack.pop();
            if *nodes > budget {
                return None;
            }
        }
        None
    }
    rec(set, coeffs, ctx, &mut stack, budget, nodes)
}

/// Checks `Σ a_i x_i = 0` with pairwise-distinct coordinates, via
/// `vec_combine` on the original coefficient order.
pub fn verify_solution(set: &PointSet, coeffs: &CoeffVector, solution: &[u64]) -> Result<bool> {
    if solution.len() != coeffs.d() {
        return Ok(false);
    }
    for (i, a) in solution.iter().enumerate() {
        for b in &solution[i + 1..] {
            if a == b {
                return Ok(false);
            }
        }
    }
    let ctx = FieldCtx::new(set.q() as u64)?;
    let points: Vec<Point> = solution
        .iter()
        .map(|&c| Point::from_code(c, set.q(), set.n()))
        .collect::<Result<_>>()?;
    if solution.iter().any(|&c| !set.contains(c)) {
        return Ok(false);
    }
    let s = vec_combine(&ctx, coeffs.coeffs(), &points)?;
    Ok(s.digits().iter().all(|&d| d == 0))
}

/// Test oracle: enumerates all pairwise-distinct tuples in `A^d` solving the
/// equation, up to `limit` results. Work is capped at 1e8 visited tuples.
pub fn brute_force_solutions(
    set: &PointSet,
    coeffs: &CoeffVector,
    limit: Option<usize>,
) -> Result<Vec<Vec<u64>>> {
    if coeffs.q() != set.q() {
        return Err(Error::FieldMismatch { expected: set.q() as u64, got: coeffs.q() as u64 });
    }
    let d = coeffs.d();
    let work: f64 = (set.len() as f64).powi(d as i32 - 1);
    if work > 1e8 {
        return Err(Error::TooLarge(format!("|A|^(d-1) = {} tuples", work)));
    }
    let ctx = FieldCtx::new(set.q() as u64)?;
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(d);
    fn rec(
        set: &PointSet,
        coeffs: &CoeffVector,
        ctx: &FieldCtx,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<u64>>,
        limit: Option<usize>,
    ) {
        if limit.is_some_and(|l| out.len() >= l) {
            return;
        }
        let d = coeffs.d();
        if stack.len() == d - 1 {
            let points: Vec<Point> = stack.iter().map(|&i| set.point(i)).collect();
            let partial = vec_combine(ctx, &coeffs.coeffs()[..d - 1], &points).expect("same dims");
            let last_inv_neg = ctx.neg(ctx.inv(coeffs.coeffs()[d - 1]));
            let last = vec_combine(ctx, &[last_inv_neg], &[partial]).expect("one point");
            if let Some(li) = set.index_of(last.code()) {
                if !stack.contains(&li) {
                    let mut sol: Vec<u64> = stack.iter().map(|&i| set.codes()[i]).collect();
                    sol.push(set.codes()[li]);
                    out.push(sol);
                }
            }
            return;
        }
        for i in 0..set.len() {
            if stack.contains(&i) {
                continue;
            }
            stack.push(i);
            rec(set, coeffs, ctx, stack, out, limit);
            stack.pop();
        }
    }
    rec(set, coeffs, &ctx, &mut stack, &mut out, limit);
    Ok(out)
}
