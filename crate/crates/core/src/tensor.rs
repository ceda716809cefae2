//! The solution tensor, exact slice rank on tiny instances, diagonal
//! lower-bound certificates, and the explicit Croot-Lev-Pach slice
//! decomposition over the full space.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::field::{decode, space_size, FieldCtx, PointSet};
use crate::profile::CoeffTriple;
use crate::{Error, Result};

/// An order-`d` tensor on `[N]^d` stored as a sparse map from index tuples
/// to nonzero coefficients. Indices are 1-based, matching the usual
/// `α ∈ [N]^d` convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseTensor {
    order: usize,
    dim: usize,
    q: u16,
    coeffs: BTreeMap<Vec<u32>, u16>,
}

impl SparseTensor {
    pub fn new(order: usize, dim: usize, q: u16) -> Self {
        assert!(order >= 2, "tensor order must be at least 2");
        SparseTensor { order, dim, q, coeffs: BTreeMap::new() }
    }

    /// Sets a coefficient; zero removes the entry.
    pub fn set(&mut self, idx: Vec<u32>, value: u16) {
        assert_eq!(idx.len(), self.order);
        assert!(idx.iter().all(|&i| i >= 1 && i as usize <= self.dim), "index out of range");
        assert!(value < self.q);
        if value == 0 {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, value);
        }
    }

    #[inline]
    pub fn get(&self, idx: &[u32]) -> u16 {
        self.coeffs.get(idx).copied().unwrap_or(0)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn q(&self) -> u16 {
        self.q
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u32>, u16)> + '_ {
        self.coeffs.iter().map(|(k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Restriction to a sub-index-set, reindexed to `1..=|I|` by sorted
    /// position.
    pub fn restrict(&self, index_set: &[u32]) -> SparseTensor {
        let mut sorted: Vec<u32> = index_set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let pos: HashMap<u32, u32> =
            sorted.iter().enumerate().map(|(i, &v)| (v, i as u32 + 1)).collect();
        let mut out = SparseTensor::new(self.order, sorted.len(), self.q);
        for (idx, v) in self.entries() {
            if let Some(mapped) = idx.iter().map(|i| pos.get(i).copied()).collect::<Option<Vec<u32>>>() {
                out.set(mapped, v);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct TensorJson {
            d: usize,
            #[serde(rename = "N")]
            n: usize,
            entries: Vec<Vec<u64>>,
        }
        serde_json::to_value(TensorJson {
            d: self.order,
            n: self.dim,
            entries: self
                .entries()
                .map(|(idx, v)| idx.iter().map(|&i| i as u64).chain([v as u64]).collect())
                .collect(),
        })
        .expect("tensor serializes")
    }
}

/// The order-3 solution tensor of a set: coefficient 1 exactly on the index
/// triples `(i,j,k)` whose points solve `ax+by+cz = 0`.
pub fn ap_tensor(set: &PointSet, t: &CoeffTriple) -> Result<SparseTensor> {
    if t.q() != set.q() {
        return Err(Error::FieldMismatch { expected: set.q() as u64, got: t.q() as u64 });
    }
    let ctx = FieldCtx::new(set.q() as u64)?;
    let q = ctx.q();
    let (a, b, c) = t.abc();
    let cinv_neg = ctx.neg(ctx.inv(c));
    let n = set.n();
    let digits: Vec<Vec<u16>> = set.points().map(|p| p.digits().to_vec()).collect();

    let mut out = SparseTensor::new(3, set.len(), q);
    let mut zd = vec![0u16; n];
    for (i, xd) in digits.iter().enumerate() {
        for (j, yd) in digits.iter().enumerate() {
            for d in 0..n {
                zd[d] = ctx.mul(cinv_neg, ctx.add(ctx.mul(a, xd[d]), ctx.mul(b, yd[d])));
            }
            let zcode = crate::field::encode(&zd, q)?;
            if let Some(k) = set.index_of(zcode) {
                out.set(vec![i as u32 + 1, j as u32 + 1, k as u32 + 1], 1);
            }
        }
    }
    Ok(out)
}

/// Independence of an index set, strengthened: every nonzero coefficient
/// with all indices inside `I` must be diagonal, and every `i ∈ I` must
/// carry a nonzero diagonal coefficient. The second condition makes the
/// diagonal-restriction lower bound sound with constant 1.
pub fn independent_set_check(t: &SparseTensor, index_set: &[u32]) -> bool {
    let members: HashSet<u32> = index_set.iter().copied().collect();
    for (idx, _) in t.entries() {
        if idx.iter().all(|i| members.contains(i)) && !idx.iter().all(|&i| i == idx[0]) {
            return false;
        }
    }
    members.iter().all(|&i| t.get(&vec![i; t.order()]) != 0)
}

/// `|I|` as a certified lower bound on the slice rank, valid whenever `I`
/// passes the strengthened independence check: the restriction to `I` is a
/// diagonal tensor with all diagonal entries nonzero.
pub fn diagonal_rank_certificate(t: &SparseTensor, index_set: &[u32]) -> Result<u32> {
    if !independent_set_check(t, index_set) {
        return Err(Error::NotIndependent);
    }
    let mut sorted: Vec<u32> = index_set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted.len() as u32)
}

const RANK_ENUM_CAP: u128 = 1 << 20;

fn dense3(t: &SparseTensor) -> Vec<u8> {
    let n = t.dim();
    let mut out = vec![0u8; n * n * n];
    for (idx, v) in t.entries() {
        let (i, j, k) = (idx[0] as usize - 1, idx[1] as usize - 1, idx[2] as usize - 1);
        out[(i * n + j) * n + k] = v as u8;
    }
    out
}

fn decode_base(mut code: u64, q: u64, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for d in out.iter_mut() {
        *d = (code % q) as u8;
        code /= q;
    }
    out
}

/// Gaussian elimination mod a prime: returns whether `M x = rhs` is
/// consistent, for `rows` of length `cols + 1` (augmented).
fn solvable_mod_q(rows: &mut [Vec<u16>], cols: usize, ctx: &FieldCtx) -> bool {
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let inv = ctx.inv(rows[pivot_row][col]);
        for r in 0..rows.len() {
            if r != pivot_row && rows[r][col] != 0 {
                let factor = ctx.mul(rows[r][col], inv);
                for c in col..=cols {
                    let delta = ctx.mul(factor, rows[pivot_row][c]);
                    rows[r][c] = ctx.sub(rows[r][c], delta);
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    // inconsistent iff some zero row has a nonzero right-hand side
    rows.iter().all(|row| row[..cols].iter().any(|&x| x != 0) || row[cols] == 0)
}

/// Exact slice rank of a small order-3 tensor by iterative deepening over
/// choices of (axis, single-variable factor). For a fixed choice the
/// complementary factors are free, so membership reduces to a linear system
/// over `F_q`; the single-variable factors are normalized projectively
/// (first nonzero entry 1), absorbing scaling into the free factor.
pub fn slice_rank_exact_small(t: &SparseTensor) -> Result<u32> {
    if t.order() != 3 {
        return Err(Error::DimensionMismatch(format!("exact slice rank handles order 3, got {}", t.order())));
    }
    let n = t.dim();
    let q = t.q();
    match (q as u128).checked_pow((n * n) as u32) {
        Some(v) if v <= RANK_ENUM_CAP => {}
        _ => return Err(Error::TooLarge(format!("q^(N^2) = {}^{} exceeds the enumeration cap", q, n * n))),
    }
    let target = dense3(t);
    if target.iter().all(|&x| x == 0) {
        return Ok(0);
    }
    let ctx = FieldCtx::new(q as u64)?;

    // candidate (axis, f) pairs; two slices sharing both merge into one
    let mut pairs: Vec<(usize, Vec<u8>)> = Vec::new();
    for axis in 0..3usize {
        for code in 1..(q as u64).pow(n as u32) {
            let f = decode_base(code, q as u64, n);
            if f.iter().find(|&&d| d != 0) == Some(&1) {
                pairs.push((axis, f));
            }
        }
    }

    let consistent = |chosen: &[usize]| -> bool {
        let k = chosen.len();
        let cols = k * n * n;
        let mut rows: Vec<Vec<u16>> = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let mut row = vec![0u16; cols + 1];
                    for (m, &p) in chosen.iter().enumerate() {
                        let (axis, f) = &pairs[p];
                        let (own, g1, g2) = match axis {
                            0 => (i, j, l),
                            1 => (j, i, l),
                            _ => (l, i, j),
                        };
                        let cell = m * n * n + g1 * n + g2;
                        row[cell] = ctx.add(row[cell], f[own] as u16);
                    }
                    row[cols] = target[(i * n + j) * n + l] as u16;
                    rows.push(row);
                }
            }
        }
        solvable_mod_q(&mut rows, cols, &ctx)
    };

    fn combos(pairs_len: usize, k: usize, start: usize, chosen: &mut Vec<usize>, check: &dyn Fn(&[usize]) -> bool) -> bool {
        if chosen.len() == k {
            return check(chosen);
        }
        for p in start..pairs_len {
            chosen.push(p);
            if combos(pairs_len, k, p + 1, chosen, check) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    // slice rank never exceeds N: axis-1 index slices always decompose T
    for k in 1..=n as u32 {
        let mut chosen = Vec::new();
        if combos(pairs.len(), k as usize, 0, &mut chosen, &consistent) {
            return Ok(k);
        }
    }
    unreachable!("a rank-N decomposition always exists");
}

/// One term of a slice decomposition: a single-variable factor on one axis
/// times a complementary two-variable factor, both stored sparsely over
/// point codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    /// 1 = x-block, 2 = y-block, 3 = z-block.
    pub axis: usize,
    pub f: BTreeMap<u64, u16>,
    pub g: BTreeMap<(u64, u64), u16>,
}

/// A sum of slices over the full space `F_q^n` reproducing the AP indicator
/// `δ_0(ax+by+cz)` pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceDecomposition {
    q: u16,
    n: usize,
    coeffs: (u16, u16, u16),
    slices: Vec<Slice>,
}

impl SliceDecomposition {
    #[inline]
    pub fn q(&self) -> u16 {
        self.q
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn slice_count(&self) -> usize {
        self.slices.len()
    }

    #[inline]
    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    /// Value of the slice sum at a point-code triple.
    pub fn eval(&self, x: u64, y: u64, z: u64) -> u16 {
        let q = self.q as u64;
        let mut acc = 0u64;
        for s in &self.slices {
            let (own, pair) = match s.axis {
                1 => (x, (y, z)),
                2 => (y, (x, z)),
                _ => (z, (x, y)),
            };
            let fv = s.f.get(&own).copied().unwrap_or(0) as u64;
            if fv == 0 {
                continue;
            }
            let gv = s.g.get(&pair).copied().unwrap_or(0) as u64;
            acc = (acc + fv * gv) % q;
        }
        acc as u16
    }

    /// Exhaustively checks the decomposition against the AP indicator on
    /// all `q^{3n}` inputs.
    pub fn verify_exhaustive(&self) -> Result<bool> {
        let ctx = FieldCtx::new(self.q as u64)?;
        let (a, b, c) = self.coeffs;
        let size = space_size(self.q, self.n)?;
        let digits: Vec<Vec<u16>> =
            (0..size).map(|code| decode(code, self.q, self.n).expect("code in range")).collect();
        for x in 0..size {
            for y in 0..size {
                'z: for z in 0..size {
                    for i in 0..self.n {
                        let s = ctx.add(
                            ctx.add(ctx.mul(a, digits[x as usize][i]), ctx.mul(b, digits[y as usize][i])),
                            ctx.mul(c, digits[z as usize][i]),
                        );
                        if s != 0 {
                            if self.eval(x, y, z) != 0 {
                                return Ok(false);
                            }
                            continue 'z;
                        }
                    }
                    if self.eval(x, y, z) != 1 {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct SliceJson {
            axis: usize,
            f: Vec<(u64, u16)>,
            g: Vec<(u64, u64, u16)>,
        }
        #[derive(Serialize)]
        struct DecompJson {
            q: u16,
            n: usize,
            coeffs: [u16; 3],
            slice_count: usize,
            slices: Vec<SliceJson>,
        }
        serde_json::to_value(DecompJson {
            q: self.q,
            n: self.n,
            coeffs: [self.coeffs.0, self.coeffs.1, self.coeffs.2],
            slice_count: self.slices.len(),
            slices: self
                .slices
                .iter()
                .map(|s| SliceJson {
                    axis: s.axis,
                    f: s.f.iter().map(|(&k, &v)| (k, v)).collect(),
                    g: s.g.iter().map(|(&(k1, k2), &v)| (k1, k2, v)).collect(),
                })
                .collect(),
        })
        .expect("decomposition serializes")
    }
}

type Monomial = (Vec<u8>, Vec<u8>, Vec<u8>);

const CLP_CAP: u128 = 1 << 21;

/// The Croot-Lev-Pach slice decomposition of the AP indicator over the full
/// space: expand `Π_i (1 − (ax_i+by_i+cz_i)^{q−1})` into monomials and group
/// them by the block (x, y or z) of total degree at most `(q−1)n/3`, lowest
/// block first on ties.
pub fn clp_decomposition(t: &CoeffTriple, n: usize) -> Result<SliceDecomposition> {
    let ctx = FieldCtx::new(t.q() as u64)?;
    let q = ctx.q();
    match (q as u128).checked_pow(3 * n as u32) {
        Some(v) if v <= CLP_CAP => {}
        _ => return Err(Error::TooLarge(format!("q^(3n) = {}^{} exceeds the expansion cap", q, 3 * n))),
    }
    let (a, b, c) = t.abc();

    // per-coordinate factor 1 - (a x + b y + c z)^{q-1}, as (ex,ey,ez,coeff)
    let mut factor: Vec<(u8, u8, u8, u16)> = vec![(0, 0, 0, 1)];
    let e = q as u32 - 1;
    let mut fact = vec![1u16; q as usize];
    for i in 2..q as usize {
        fact[i] = ctx.mul(fact[i - 1], i as u16);
    }
    for e1 in 0..=e {
        for e2 in 0..=(e - e1) {
            let e3 = e - e1 - e2;
            let mult = ctx.mul(
                fact[e as usize],
                ctx.inv(ctx.mul(ctx.mul(fact[e1 as usize], fact[e2 as usize]), fact[e3 as usize])),
            );
            let coeff = ctx.mul(
                mult,
                ctx.mul(ctx.mul(ctx.pow(a, e1), ctx.pow(b, e2)), ctx.pow(c, e3)),
            );
            if coeff != 0 {
                factor.push((e1 as u8, e2 as u8, e3 as u8, ctx.neg(coeff)));
            }
        }
    }

    // multiply the n per-coordinate factors into a monomial map
    let mut monomials: BTreeMap<Monomial, u16> = BTreeMap::new();
    monomials.insert((vec![], vec![], vec![]), 1);
    for _ in 0..n {
        let mut next: BTreeMap<Monomial, u16> = BTreeMap::new();
        for ((xs, ys, zs), coeff) in &monomials {
            for &(ex, ey, ez, fc) in &factor {
                let mut key = (xs.clone(), ys.clone(), zs.clone());
                key.0.push(ex);
                key.1.push(ey);
                key.2.push(ez);
                let v = next.entry(key).or_insert(0);
                *v = ctx.add(*v, ctx.mul(*coeff, fc));
            }
        }
        next.retain(|_, v| *v != 0);
        monomials = next;
    }

    // group by (block with total degree <= (q-1)n/3, block exponents)
    let mut groups: BTreeMap<(usize, Vec<u8>), Vec<(Monomial, u16)>> = BTreeMap::new();
    for (mono, coeff) in monomials {
        let totals = [
            mono.0.iter().map(|&d| d as u32).sum::<u32>(),
            mono.1.iter().map(|&d| d as u32).sum::<u32>(),
            mono.2.iter().map(|&d| d as u32).sum::<u32>(),
        ];
        let block = (0..3)
            .find(|&i| 3 * totals[i] <= (q as u32 - 1) * n as u32)
            .expect("pigeonhole: some block is below the degree threshold");
        let exps = match block {
            0 => mono.0.clone(),
            1 => mono.1.clone(),
            _ => mono.2.clone(),
        };
        groups.entry((block, exps)).or_default().push((mono, coeff));
    }

    let size = space_size(q, n)?;
    let digit_cache: Vec<Vec<u16>> =
        (0..size).map(|code| decode(code, q, n).expect("code in range")).collect();
    let eval_mono = |exps: &[u8], code: u64| -> u16 {
        let mut acc = 1u16;
        for (i, &ex) in exps.iter().enumerate() {
            acc = ctx.mul(acc, ctx.pow(digit_cache[code as usize][i], ex as u32));
        }
        acc
    };

    let mut slices = Vec::new();
    for ((block, exps), members) in groups {
        let mut f = BTreeMap::new();
        for code in 0..size {
            let v = eval_mono(&exps, code);
            if v != 0 {
                f.insert(code, v);
            }
        }
        let mut g = BTreeMap::new();
        for c1 in 0..size {
            for c2 in 0..size {
                let mut acc = 0u16;
                for ((xs, ys, zs), coeff) in &members {
                    let (m1, m2) = match block {
                        0 => (ys, zs),
                        1 => (xs, zs),
                        _ => (xs, ys),
                    };
                    acc = ctx.add(acc, ctx.mul(*coeff, ctx.mul(eval_mono(m1, c1), eval_mono(m2, c2))));
                }
                if acc != 0 {
                    g.insert((c1, c2), acc);
                }
            }
        }
        slices.push(Slice { axis: block + 1, f, g });
    }

    Ok(SliceDecomposition { q, n, coeffs: (a, b, c), slices })
}

/// Seeded random sparse order-3 tensor: each cell of `[dim]^3` gets a
/// uniform nonzero coefficient with probability `density`.
pub fn random_sparse_tensor(q: u16, dim: usize, density: f64, seed: u64) -> SparseTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SparseTensor::new(3, dim, q);
    for i in 1..=dim as u32 {
        for j in 1..=dim as u32 {
            for k in 1..=dim as u32 {
                if rng.gen::<f64>() < density {
                    out.set(vec![i, j, k], rng.gen_range(1..q));
                }
            }
        }
    }
    out
}
