//! Ellenberg-Gijswijt-style quantities: exact monomial counts, finite-n
//! slice-rank rates, the asymptotic constant `b_q`, and the ε-budget with
//! a concrete admissible `c_q`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::field::FieldCtx;
use crate::Result;

/// Exact count of monomials in `n` variables with every individual degree
/// at most `q−1` and total degree at most `(q−1)n/3` (real threshold).
///
/// Dynamic programming over variables and total degree, in exact integers:
/// the counts at `n` in the hundreds overflow any fixed width.
pub fn monomial_count(q: u16, n: u32) -> BigUint {
    // integer-exact threshold: total t admitted iff 3t <= (q-1)n
    let max_total = ((q as u64 - 1) * n as u64 / 3) as usize;
    let mut dp: Vec<BigUint> = vec![BigUint::zero(); max_total + 1];
    dp[0] = BigUint::one();
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); max_total + 1];
        for t in 0..=max_total {
            if dp[t].is_zero() {
                continue;
            }
            for e in 0..q as usize {
                if t + e > max_total {
                    break;
                }
                next[t + e] += &dp[t];
            }
        }
        dp = next;
    }
    dp.into_iter().sum()
}

/// Natural log of a big integer via its top bits.
fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().expect("fits f64").ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().expect("53 bits fit f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// The finite-n witness rate `(3·M_n)^{1/n}`.
pub fn finite_rate(q: u16, n: u32) -> f64 {
    assert!(n >= 1);
    let m = monomial_count(q, n);
    ((3.0_f64.ln() + ln_biguint(&m)) / n as f64).exp()
}

/// `g(x) = (1 + x + … + x^{q−1}) / x^{(q−1)/3}` — the function whose
/// minimum over `(0,1]` is the asymptotic rate `b_q`.
fn eg_objective(q: u16, x: f64) -> f64 {
    let mut num = 0.0;
    let mut pow = 1.0;
    for _ in 0..q {
        num += pow;
        pow *= x;
    }
    num / x.powf((q as f64 - 1.0) / 3.0)
}

/// Minimizes the EG objective over `(0,1]` by golden-section search and
/// returns the minimum value `b_q`.
///
/// Unimodality on the interval is assumed; the test suite spot-checks it by
/// grid scan.
pub fn asymptotic_bq(q: u16, tol: f64) -> f64 {
    assert!(tol > 0.0);
    let phi_inv = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (1e-9, 1.0);
    let mut c = hi - phi_inv * (hi - lo);
    let mut d = lo + phi_inv * (hi - lo);
    let mut fc = eg_objective(q, c);
    let mut fd = eg_objective(q, d);
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi_inv * (hi - lo);
            fc = eg_objective(q, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi_inv * (hi - lo);
            fd = eg_objective(q, d);
        }
    }
    eg_objective(q, (lo + hi) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonBudget {
    pub eps_max: f64,
    pub suggested_eps: f64,
    pub suggested_cq: f64,
}

/// The admissible ε-range from `b_q^{1/(1−ε/3)} < q`, with deterministic
/// representative choices: `eps_max = 3(1 − ln b_q / ln q)`, ε at the
/// midpoint of the range, and `c_q` midway between the induced lower bound
/// and `q`.
pub fn epsilon_budget(q: u16) -> EpsilonBudget {
    let bq = asymptotic_bq(q, 1e-12);
    let eps_max = 3.0 * (1.0 - bq.ln() / (q as f64).ln());
    let suggested_eps = eps_max / 2.0;
    let lower = bq.powf(1.0 / (1.0 - suggested_eps / 3.0));
    EpsilonBudget { eps_max, suggested_eps, suggested_cq: (lower + q as f64) / 2.0 }
}

/// The full report emitted by the `bounds` CLI subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub q: u16,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Exact `M_n` as a decimal string (absent without `n`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monomial_count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_rate: Option<f64>,
    pub b_q: f64,
    pub eps_max: f64,
    pub suggested_eps: f64,
    pub suggested_cq: f64,
}

impl BoundsReport {
    pub fn compute(q: u64, n: Option<u32>) -> Result<Self> {
        let ctx = FieldCtx::new(q)?;
        let q = ctx.q();
        let budget = epsilon_budget(q);
        let (mn, rate) = match n {
            Some(n) => (
                Some(monomial_count(q, n).to_string()),
                if n >= 1 { Some(finite_rate(q, n)) } else { None },
            ),
            None => (None, None),
        };
        Ok(BoundsReport {
            q,
            n,
            monomial_count: mn,
            finite_rate: rate,
            b_q: asymptotic_bq(q, 1e-12),
            eps_max: budget.eps_max,
            suggested_eps: budget.suggested_eps,
            suggested_cq: budget.suggested_cq,
        })
    }
}
