//! Solution-pair degree profiles and (ε,δ)-cap classification.
//!
//! For a set `A ⊂ F_q^n` and a coefficient triple `(a,b,c)` with
//! `a+b+c ≡ 0`, the degree `d_x` of a point `x ∈ A` counts ordered pairs
//! `(y,z) ∈ A²` with `ax+by+cz = 0`. Degenerate pairs (y=z, or equal to x)
//! count. The heavy set keeps the points with `d_x ≥ |A|^ε`.

use rayon::prelude::*;
use serde::Serialize;

use crate::field::{decode, encode, FieldCtx, PointSet};
use crate::{Error, Result};

/// Nonzero residues `(a,b,c)` with `a+b+c ≡ 0 (mod q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffTriple {
    q: u16,
    a: u16,
    b: u16,
    c: u16,
}

impl CoeffTriple {
    pub fn new(ctx: &FieldCtx, a: u16, b: u16, c: u16) -> Result<Self> {
        let q = ctx.q();
        if a == 0 || b == 0 || c == 0 || a >= q || b >= q || c >= q {
            return Err(Error::InvalidTriple(format!("({},{},{}) must be nonzero residues mod {}", a, b, c, q)));
        }
        if ctx.add(ctx.add(a, b), c) != 0 {
            return Err(Error::InvalidTriple(format!("({},{},{}) does not sum to 0 mod {}", a, b, c, q)));
        }
        Ok(CoeffTriple { q, a, b, c })
    }

    #[inline]
    pub fn q(&self) -> u16 {
        self.q
    }

    #[inline]
    pub fn abc(&self) -> (u16, u16, u16) {
        (self.a, self.b, self.c)
    }
}

/// The map `x ↦ d_x` over a set, with the total solution-triple count.
#[derive(Debug, Clone)]
pub struct DegreeProfile {
    set: PointSet,
    coeffs: CoeffTriple,
    degrees: Vec<u64>,
    total: u64,
}

impl DegreeProfile {
    #[inline]
    pub fn set(&self) -> &PointSet {
        &self.set
    }

    #[inline]
    pub fn coeffs(&self) -> CoeffTriple {
        self.coeffs
    }

    /// Degrees parallel to `set().codes()`.
    #[inline]
    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Total number of solution triples in `A³`.
    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct ProfileJson {
            q: u16,
            n: usize,
            coeffs: [u16; 3],
            degrees: Vec<(u64, u64)>,
        }
        let (a, b, c) = self.coeffs.abc();
        serde_json::to_value(ProfileJson {
            q: self.set.q(),
            n: self.set.n(),
            coeffs: [a, b, c],
            degrees: self.set.codes().iter().copied().zip(self.degrees.iter().copied()).collect(),
        })
        .expect("profile serializes")
    }
}

/// Computes `d_x` for every `x ∈ A` by iterating over `y` and
/// membership-testing the determined `z = −c⁻¹(ax+by)`.
pub fn degree_profile(set: &PointSet, t: &CoeffTriple) -> Result<DegreeProfile> {
    if t.q() != set.q() {
        return Err(Error::FieldMismatch { expected: set.q() as u64, got: t.q() as u64 });
    }
    let ctx = FieldCtx::new(set.q() as u64)?;
    let q = ctx.q();
    let (a, b, c) = t.abc();
    // z_i = -c^{-1}(a x_i + b y_i), tabulated per digit pair
    let cinv_neg = ctx.neg(ctx.inv(c));
    let mut ztab = vec![0u16; q as usize * q as usize];
    for xd in 0..q {
        for yd in 0..q {
            ztab[xd as usize * q as usize + yd as usize] =
                ctx.mul(cinv_neg, ctx.add(ctx.mul(a, xd), ctx.mul(b, yd)));
        }
    }
    let n = set.n();
    let digit_cache: Vec<Vec<u16>> = set
        .codes()
        .iter()
        .map(|&code| decode(code, q, n).expect("stored code is valid"))
        .collect();

    let degrees: Vec<u64> = (0..set.len())
        .into_par_iter()
        .map(|xi| {
            let xd = &digit_cache[xi];
            let mut zd = vec![0u16; n];
            let mut count = 0u64;
            for yd in &digit_cache {
                for i in 0..n {
                    zd[i] = ztab[xd[i] as usize * q as usize + yd[i] as usize];
                }
                let zcode = encode(&zd, q).expect("digits in range");
                if set.contains(zcode) {
                    count += 1;
                }
            }
            count
        })
        .collect();

    let total = degrees.iter().sum();
    Ok(DegreeProfile { set: set.clone(), coeffs: *t, degrees, total })
}

/// Integer threshold for "at least `|A|^ε` pairs": the ceiling of `|A|^ε`,
/// with values within 1e-9 of an integer snapped to that integer so exact
/// boundaries (e.g. `4^0.5 = 2`) are not misclassified by rounding.
pub fn heavy_threshold(card: u64, eps: f64) -> u64 {
    if card == 0 {
        return 0;
    }
    let t = (card as f64).powf(eps);
    let r = t.round();
    if (t - r).abs() < 1e-9 {
        r as u64
    } else {
        t.ceil() as u64
    }
}

/// `{x ∈ A : d_x ≥ |A|^ε}`.
pub fn heavy_set(profile: &DegreeProfile, eps: f64) -> PointSet {
    partition(profile, eps).0
}

/// `{x ∈ A : d_x < |A|^ε}` — the complement of the heavy set.
pub fn light_set(profile: &DegreeProfile, eps: f64) -> PointSet {
    partition(profile, eps).1
}

fn partition(profile: &DegreeProfile, eps: f64) -> (PointSet, PointSet) {
    let m = heavy_threshold(profile.set.len() as u64, eps);
    let mut heavy = Vec::new();
    let mut light = Vec::new();
    for (&code, &d) in profile.set.codes().iter().zip(profile.degrees()) {
        if d >= m {
            heavy.push(code);
        } else {
            light.push(code);
        }
    }
    let q = profile.set.q();
    let n = profile.set.n();
    (
        PointSet::from_codes(q, n, heavy).expect("codes already validated"),
        PointSet::from_codes(q, n, light).expect("codes already validated"),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub is_cap: bool,
    /// The light set — the maximal witness `A'` when `is_cap` holds.
    pub witness: PointSet,
}

/// `(ε,δ)`-cap test: true iff the light set `L` satisfies `|L| > δ|A|`
/// (strict, matching the definition's strict inequality).
pub fn classify_eps_delta(profile: &DegreeProfile, eps: f64, delta: f64) -> Classification {
    let light = light_set(profile, eps);
    let is_cap = (light.len() as f64) > delta * profile.set.len() as f64;
    Classification { is_cap, witness: light }
}

/// True iff every solution triple in `A³` is constant. Since `x=y=z` always
/// solves when `a+b+c ≡ 0`, this is equivalent to `d_x = 1` for all `x`.
pub fn is_cap_set(set: &PointSet, t: &CoeffTriple) -> Result<bool> {
    let profile = degree_profile(set, t)?;
    Ok(profile.degrees().iter().all(|&d| d == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_set;

    fn f3() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    fn cap4() -> PointSet {
        parse_set("3 2\n0,0\n0,1\n1,0\n1,1").unwrap()
    }

    /// Brute-force triple enumeration, the independent oracle for the profile.
    fn brute_profile(set: &PointSet, t: &CoeffTriple) -> Vec<u64> {
        let ctx = FieldCtx::new(set.q() as u64).unwrap();
        let (a, b, c) = t.abc();
        set.points()
            .map(|x| {
                let mut count = 0;
                for y in set.points() {
                    for z in set.points() {
                        let s = crate::field::vec_combine(&ctx, &[a, b, c], &[x.clone(), y.clone(), z]).unwrap();
                        if s.digits().iter().all(|&d| d == 0) {
                            count += 1;
                        }
                    }
                }
                count
            })
            .collect()
    }

    #[test]
    fn triple_validation() {
        let ctx = f3();
        assert!(CoeffTriple::new(&ctx, 1, 1, 1).is_ok());
        assert!(CoeffTriple::new(&ctx, 1, 2, 0).is_err());
        assert!(CoeffTriple::new(&ctx, 1, 1, 2).is_err());
        // q=2 admits no valid triple at all
        let f2 = FieldCtx::new(2).unwrap();
        assert!(CoeffTriple::new(&f2, 1, 1, 1).is_err());
    }

    #[test]
    fn profile_full_line() {
        let ctx = f3();
        let t = CoeffTriple::new(&ctx, 1, 1, 1).unwrap();
        let full = PointSet::full_space(3, 1).unwrap();
        let p = degree_profile(&full, &t).unwrap();
        assert_eq!(p.degrees(), &[3, 3, 3]);
        assert_eq!(p.total(), 9);
    }

    #[test]
    fn profile_two_points() {
        let ctx = f3();
        let t = CoeffTriple::new(&ctx, 1, 1, 1).unwrap();
        let s = parse_set("3 1\n0\n1").unwrap();
        let p = degree_profile(&s, &t).unwrap();
        assert_eq!(p.degrees(), &[1, 1]);
    }

    #[test]
    fn profile_cap4() {
        let ctx = f3();
        let t = CoeffTriple::new(&ctx, 1, 1, 1).unwrap();
        let p = degree_profile(&cap4(), &t).unwrap();
        assert_eq!(p.degrees(), &[1, 1, 1, 1]);
    }

    #[test]
    fn profile_matches_brute_force() {
        let ctx = FieldCtx::new(5).unwrap();
        let t = CoeffTriple::new(&ctx, 1, 1, 3).unwrap();
        let s = parse_set("5 2\n0,0\n1,2\n3,3\n4,0\n2,1\n0,4").unwrap();
        let p = degree_profile(&s, &t).unwrap();
        assert_eq!(p.degrees(), brute_profile(&s, &t).as_slice());
        assert_eq!(p.total(), p.degrees().iter().sum::<u64>());
    }

    #[test]
    fn field_mismatch() {
        let ctx = FieldCtx::new(5).unwrap();
        let t = CoeffTriple::new(&ctx, 1, 1, 3).unwrap();
        let s = parse_set("3 1\n0").unwrap();
        assert!(matches!(degree_profile(&s, &t), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn threshold_boundaries() {
        assert_eq!(heavy_threshold(3, 0.5), 2); // ceil(sqrt 3)
        assert_eq!(heavy_threshold(4, 0.5), 2); // exactly 2, snapped
        assert_eq!(heavy_threshold(4, 0.1), 2); // ceil(4^0.1) = 2
        assert_eq!(heavy_threshold(9, 0.5), 3);
        assert_eq!(heavy_threshold(1, 0.5), 1);
        assert_eq!(heavy_threshold(0, 0.5), 0);
    }

    #[test]
    fn heavy_light_examples() {
        let ctx = f3();
        let t = CoeffTriple::new(&ctx, 1, 1, 1).unwrap();
        let full = PointSet::full_space(3, 1).unwrap();
        let p = degree_profile(&full, &t).unwrap();
        assert_eq!(heavy_set(&p, 0.5).len(), 3);
        assert!(light_set(&p, 0.5).is_empty());

        let p4 = degree_profile(&cap4(), &t).unwrap();
        assert!(heavy_set(&p4, 0.1).is_empty());
        assert_eq!(light_set(&p4, 0.1).len(), 4);
    }

    #[test]
    fn heavy_light_partition_property() {
        let ctx = FieldCtx::new(7).unwrap();
        let t = CoeffTriple::new(&ctx, 2, 2, 3).unwrap();
        let s = parse_set("7 1\n0\n1\n2\n4\n6").unwrap();
        let p = degree_profile(&s, &t).unwrap();
        for eps in [0.01, 0.25, 0.5, 0.75, 0.99] {
            let h = heavy_set(&p, eps);
            let l = light_set(&p, eps);
            assert_eq!(h.len() + l.len(), s.len());
            for &c in h.codes() {
                assert!(!l.contains(c));
                assert!(s.contains(c));
            }
        }
    }

    #[test]
    fn classify_examples() {
        let ctx = f3();
        let t = CoeffTriple::new(&ctx, 1, 1, 1).unwrap();
        let full = PointSet::full_space(3, 1).unwrap();
        let p = degree_profile(&full, &t).unwrap();
        let c = classify_eps_delta(&p, 0.5, 0.5);
        assert!(!c.is_cap);
        assert!(c.witness.is_empty());

        let p4 = degree_profile(&cap4(), &t).unwrap();
        let c = classify_eps_delta(&p4, 0.5, 0.9);
        assert!(c.is_cap);
        assert_eq!(c.witness, cap4());
    }

    #[test]
    fn cap_set_examples() {
        let ctx = f3();
        let t = CoeffTriple::new(&ctx, 1, 1, 1).unwrap();
        assert!(is_cap_set(&cap4(), &t).unwrap());
        assert!(!is_cap_set(&PointSet::full_space(3, 1).unwrap(), &t).unwrap());
        assert!(is_cap_set(&parse_set("3 2\n1,2").unwrap(), &t).unwrap());
    }

    #[test]
    fn cap_implies_eps_delta_cap() {
        let ctx = f3();
        let t = CoeffTriple::new(&ctx, 1, 1, 1).unwrap();
        let p = degree_profile(&cap4(), &t).unwrap();
        for eps in [0.2, 0.5, 0.9] {
            for delta in [0.1, 0.5, 0.99] {
                if heavy_threshold(4, eps) >= 2 {
                    assert!(classify_eps_delta(&p, eps, delta).is_cap);
                }
            }
        }
    }
}
