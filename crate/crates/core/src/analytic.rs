//! Closed-form success probability of pattern-division random access.
//!
//! Everything of the form `x^(N-1-K)` is evaluated in the log domain:
//! `(N_PS - 1)^(N - 1)` overflows `f64` already for a few hundred users.
//!
//! Notation: `N` active UEs including the tagged one, `R` roots, `N_SS`
//! shifts per root, `N_PS = C(N_SS, 2)` patterns per root and `N_P = R*N_PS`.
//! `K` is the number of other UEs that picked a different root than the
//! tagged UE.
//!
//! The two-component collision events are derived over a per-root pool of
//! `Q` components with `Q = N_SS`, `a = Q - 2` patterns sharing exactly one
//! given component, and `d = a(a-1)/2` patterns sharing none. Conditioned on
//! no identical pattern, each same-root UE picks uniformly among the
//! `N_PS - 1 = 2a + d` remaining patterns. The "number of UEs" of that
//! derivation is the number of same-root UEs (`N - 1 - K` others plus the
//! tagged one), not the antenna count.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::units::db_to_linear;

/// Pilot scheme covered by the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Two superposed shifts per pattern (`L = 2`).
    Pdra,
    /// One shift per pilot (`L = 1`). The closed form for this case is a
    /// derivation by analogy; it is reported as `derived`.
    Conventional,
}

impl Scheme {
    pub fn from_l(l: usize) -> Result<Self> {
        match l {
            1 => Ok(Scheme::Conventional),
            2 => Ok(Scheme::Pdra),
            _ => Err(Error::InvalidParams(
                "analytic model defined only for L ∈ {1,2}".into(),
            )),
        }
    }

    pub fn l(self) -> usize {
        match self {
            Scheme::Pdra => 2,
            Scheme::Conventional => 1,
        }
    }

    /// Provenance tag written next to analytic values.
    pub fn source(self) -> &'static str {
        match self {
            Scheme::Pdra => "closed-form",
            Scheme::Conventional => "derived",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    pub n_active: usize,
    pub r_roots: usize,
    pub n_ss: usize,
    pub n_zc: usize,
    /// Linear SINR threshold.
    pub alpha_th: f64,
}

impl AnalyticParams {
    pub fn new(n_active: usize, r_roots: usize, n_ss: usize, n_zc: usize, alpha_th: f64) -> Self {
        Self {
            n_active,
            r_roots,
            n_ss,
            n_zc,
            alpha_th,
        }
    }

    pub fn with_threshold_db(
        n_active: usize,
        r_roots: usize,
        n_ss: usize,
        n_zc: usize,
        alpha_th_db: f64,
    ) -> Self {
        Self::new(n_active, r_roots, n_ss, n_zc, db_to_linear(alpha_th_db))
    }

    /// Patterns per root: `C(N_SS, L)`.
    pub fn patterns_per_root(&self, scheme: Scheme) -> f64 {
        binomial(self.n_ss, scheme.l()).map_or(f64::INFINITY, |b| b as f64)
    }

    /// `C(N_SS, 2)`.
    pub fn n_ps(&self) -> f64 {
        self.patterns_per_root(Scheme::Pdra)
    }

    pub fn n_p(&self) -> f64 {
        self.r_roots as f64 * self.n_ps()
    }

    pub fn validate(&self, scheme: Scheme) -> Result<()> {
        let min_ss = match scheme {
            Scheme::Pdra => 4,
            Scheme::Conventional => 1,
        };
        if self.n_ss < min_ss {
            return Err(Error::InvalidParams(format!(
                "n_ss must be >= {min_ss}, got {}",
                self.n_ss
            )));
        }
        if self.n_active == 0 {
            return Err(Error::InvalidParams("n_active must be >= 1".into()));
        }
        if self.r_roots == 0 {
            return Err(Error::InvalidParams("r_roots must be >= 1".into()));
        }
        if !(self.alpha_th > 0.0 && self.alpha_th.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "alpha_th must be positive and finite, got {}",
                self.alpha_th
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEventProbs {
    /// No component of the tagged pattern is used by a same-root UE.
    pub p_e0: f64,
    /// Exactly one component is used by same-root UEs.
    pub p_e1: f64,
}

impl CollisionEventProbs {
    /// Both components collide (with different UEs).
    pub fn p_e2(&self) -> f64 {
        (1.0 - self.p_e0 - self.p_e1).max(0.0)
    }
}

pub(crate) fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    match binomial(n, k) {
        Some(b) if b < (1u64 << 53) => (b as f64).ln(),
        _ => ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0),
    }
}

/// `exponent * ln(base)` with `0 * ln(0) = 0`.
fn ln_pow(base: f64, exponent: usize) -> f64 {
    if exponent == 0 {
        0.0
    } else {
        exponent as f64 * base.ln()
    }
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `(1 - 1/N_P)^(N-1)`: no other UE picked the tagged UE's pattern.
pub fn p_no_pattern_collision(n_active: usize, n_p: f64) -> f64 {
    if n_active <= 1 {
        return 1.0;
    }
    if n_p <= 1.0 {
        return 0.0;
    }
    ((n_active - 1) as f64 * (-1.0 / n_p).ln_1p()).exp()
}

/// [`p_no_pattern_collision`] averaged over random activity: each of the
/// `population - 1` other UEs is active with probability `p_a`, which gives
/// `(1 - p_a / N_P)^(population - 1)`.
pub fn p_no_pattern_collision_random_activity(p_a: f64, population: usize, n_p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_a) {
        return Err(Error::InvalidParams(format!("p_a must lie in [0, 1], got {p_a}")));
    }
    if population == 0 || n_p < 1.0 {
        return Err(Error::InvalidParams(format!(
            "need population >= 1 and N_P >= 1, got {population} and {n_p}"
        )));
    }
    if population == 1 || p_a == 0.0 {
        return Ok(1.0);
    }
    Ok(((population - 1) as f64 * (-p_a / n_p).ln_1p()).exp())
}

/// Probability that exactly `k` of the `N-1` other UEs use a different root,
/// given none of them picked the tagged pattern, with `per_root` pilots per
/// root.
pub fn p_k_other_roots_with(k: usize, n_active: usize, r_roots: usize, per_root: f64) -> f64 {
    let others = n_active.saturating_sub(1);
    if k > others {
        return 0.0;
    }
    let total = r_roots as f64 * per_root - 1.0;
    if others == 0 || total <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let other_root = (r_roots as f64 - 1.0) * per_root;
    let same_root = per_root - 1.0;
    let ln_p = ln_choose(others, k) + ln_pow(other_root, k) + ln_pow(same_root, others - k)
        - others as f64 * total.ln();
    ln_p.exp()
}

/// [`p_k_other_roots_with`] for the two-component pool.
pub fn p_k_other_roots(k: usize, params: &AnalyticParams) -> f64 {
    p_k_other_roots_with(k, params.n_active, params.r_roots, params.n_ps())
}

/// Event probabilities for the tagged two-component pattern given
/// `n_same_root_others` same-root UEs with non-identical patterns.
pub fn collision_event_probs(n_same_root_others: usize, n_ss: usize) -> Result<CollisionEventProbs> {
    if n_ss < 4 {
        return Err(Error::InvalidParams(format!("n_ss must be >= 4, got {n_ss}")));
    }
    let n = n_same_root_others;
    if n == 0 {
        return Ok(CollisionEventProbs { p_e0: 1.0, p_e1: 0.0 });
    }
    let a = (n_ss - 2) as f64;
    let d = a * (a - 1.0) / 2.0;
    let ln_denom = n as f64 * (2.0 * a + d).ln();
    let p_e0 = (n as f64 * d.ln() - ln_denom).exp();
    // T UEs share the same single component, the other n - T avoid both.
    let terms: Vec<f64> = (1..=n)
        .map(|t| ln_choose(n, t) + ln_pow(a, t) + ln_pow(d, n - t))
        .collect();
    let p_e1 = 2.0 * (log_sum_exp(&terms) - ln_denom).exp();
    // rounding in the log domain can push the sum a few ulps past 1
    let p_e1 = p_e1.min(1.0 - p_e0);
    Ok(CollisionEventProbs { p_e0, p_e1 })
}

/// Large-array SINR limit `N_ZC / (4K)`; infinite without interferers.
pub fn asymptotic_sinr(n_zc: usize, k_different_root: usize) -> f64 {
    if k_different_root == 0 {
        f64::INFINITY
    } else {
        n_zc as f64 / (4.0 * k_different_root as f64)
    }
}

/// Largest `K` with `divisor * K * alpha_th <= n_zc`, capped at `limit`.
fn k_cap(n_zc: usize, alpha_th: f64, divisor: f64, limit: usize) -> usize {
    let bound = (n_zc as f64 / (divisor * alpha_th)).floor();
    if bound >= limit as f64 {
        limit
    } else {
        bound.max(0.0) as usize
    }
}

pub fn success_probability_pdra(params: &AnalyticParams) -> Result<f64> {
    params.validate(Scheme::Pdra)?;
    let n = params.n_active;
    let p_s = p_no_pattern_collision(n, params.n_p());
    if p_s == 0.0 {
        return Ok(0.0);
    }
    let cap = k_cap(params.n_zc, params.alpha_th, 4.0, n - 1);
    let mut acc = 0.0;
    for k in 0..=cap {
        let pk = p_k_other_roots(k, params);
        if pk == 0.0 {
            continue;
        }
        let ev = collision_event_probs(n - 1 - k, params.n_ss)?;
        acc += pk * (ev.p_e0 + ev.p_e1);
    }
    Ok((p_s * acc).clamp(0.0, 1.0))
}

/// Single-sequence analogue: same-root non-colliding UEs are orthogonal and
/// each different-root UE leaks one unit cross-correlation, so the SINR
/// limit is `N_ZC / K`.
pub fn success_probability_conventional(params: &AnalyticParams) -> Result<f64> {
    params.validate(Scheme::Conventional)?;
    let n = params.n_active;
    let per_root = params.n_ss as f64;
    let p_s = p_no_pattern_collision(n, params.r_roots as f64 * per_root);
    if p_s == 0.0 {
        return Ok(0.0);
    }
    let cap = k_cap(params.n_zc, params.alpha_th, 1.0, n - 1);
    let acc: f64 = (0..=cap)
        .map(|k| p_k_other_roots_with(k, n, params.r_roots, per_root))
        .sum();
    Ok((p_s * acc).clamp(0.0, 1.0))
}

pub fn success_probability(params: &AnalyticParams, scheme: Scheme) -> Result<f64> {
    match scheme {
        Scheme::Pdra => success_probability_pdra(params),
        Scheme::Conventional => success_probability_conventional(params),
    }
}

/// Mixture of the fixed-`N` success probability over random activity: each
/// of the `population - 1` other UEs is active with probability `p_a`
/// independently and the tagged UE is active. Terms are added from the mode
/// outwards until the unvisited binomial mass drops below `1e-12`.
pub fn success_probability_random_activity(
    p_a: f64,
    population: usize,
    base: &AnalyticParams,
    scheme: Scheme,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_a) {
        return Err(Error::InvalidParams(format!("p_a must lie in [0, 1], got {p_a}")));
    }
    if population == 0 {
        return Err(Error::InvalidParams("population must be >= 1".into()));
    }
    let trials = population - 1;
    let ln_pmf = |j: usize| -> f64 {
        if p_a == 0.0 {
            return if j == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        if p_a == 1.0 {
            return if j == trials { 0.0 } else { f64::NEG_INFINITY };
        }
        ln_choose(trials, j) + j as f64 * p_a.ln() + (trials - j) as f64 * (-p_a).ln_1p()
    };
    let eval = |j: usize| -> Result<f64> {
        let params = AnalyticParams {
            n_active: j + 1,
            ..*base
        };
        success_probability(&params, scheme)
    };

    let mode = (((trials + 1) as f64 * p_a).floor() as usize).min(trials);
    let mut mass = ln_pmf(mode).exp();
    let mut acc = mass * eval(mode)?;
    let (mut lo, mut hi) = (mode, mode);
    while 1.0 - mass >= 1e-12 && (lo > 0 || hi < trials) {
        let left = if lo > 0 { ln_pmf(lo - 1) } else { f64::NEG_INFINITY };
        let right = if hi < trials { ln_pmf(hi + 1) } else { f64::NEG_INFINITY };
        let j = if left >= right {
            lo -= 1;
            lo
        } else {
            hi += 1;
            hi
        };
        let w = left.max(right).exp();
        mass += w;
        if w > 0.0 {
            acc += w * eval(j)?;
        }
    }
    Ok(acc.clamp(0.0, 1.0))
}
