//! Pattern-domain pilot pool.
//!
//! A pattern is the normalized superposition of `L` distinct cyclic shifts of
//! one ZC root. Pattern index `i` maps to root `i / n_ps` and to the
//! lexicographically `(i % n_ps)`-th `L`-subset of shift indices. Waveforms are
//! materialized on demand.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, rank_combination, unrank_combination};
use crate::error::{Error, Result};
use crate::zc::{
    cyclic_shift, generate_root_sequence, periodic_crosscorrelation, ShiftPlan, ZcConfig,
    ZcSequence,
};

/// `sum_l a[l] * conj(b[l])`.
pub fn inner_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj())
}

/// Root index (into the pool's root list) and sorted shift set of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternId {
    pub root_idx: usize,
    pub shifts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub root_u: usize,
    pub shifts: Vec<usize>,
    pub waveform: Vec<Complex64>,
}

/// `(1/sqrt(L)) * sum of c_{u,v}` over the given shifts.
pub fn build_pattern(root_seq: &ZcSequence, shifts: &[usize], plan: &ShiftPlan) -> Result<Pattern> {
    if shifts.is_empty() {
        return Err(Error::InvalidPattern("a pattern needs at least one shift".into()));
    }
    let mut sorted = shifts.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidPattern(format!("duplicate shifts in {shifts:?}")));
    }
    let mut waveform = vec![Complex64::new(0.0, 0.0); root_seq.len()];
    for &v in &sorted {
        let component = cyclic_shift(root_seq, v, plan)?;
        for (w, c) in waveform.iter_mut().zip(component.samples()) {
            *w += c;
        }
    }
    let scale = 1.0 / (sorted.len() as f64).sqrt();
    waveform.iter_mut().for_each(|w| *w *= scale);
    Ok(Pattern {
        root_u: root_seq.config().root_u(),
        shifts: sorted,
        waveform,
    })
}

/// Exact non-negative rational in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        let g = crate::zc::gcd(num as usize, den as usize).max(1) as u64;
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Growth of the contention space over the single-sequence scheme,
/// `C(n_ss, l) / n_ss`.
pub fn expansion_factor(n_ss: usize, l: usize) -> Result<Ratio> {
    if l == 0 || l > n_ss {
        return Err(Error::InvalidPool(format!("need 1 <= l <= n_ss, got l = {l}, n_ss = {n_ss}")));
    }
    let n_ps = binomial(n_ss, l)
        .ok_or_else(|| Error::InvalidPool(format!("C({n_ss}, {l}) overflows u64")))?;
    Ok(Ratio::new(n_ps, n_ss as u64))
}

/// Provenance record of a pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolDescriptor {
    pub n_zc: usize,
    pub roots: Vec<usize>,
    pub n_cs: usize,
    pub n_ss: usize,
    pub l: usize,
    pub n_ps: u64,
    pub n_p: u64,
}

#[derive(Debug, Clone)]
pub struct PilotPool {
    plan: ShiftPlan,
    l: usize,
    n_ps: u64,
    n_p: u64,
    roots: Vec<ZcSequence>,
}

impl PilotPool {
    pub fn new(roots: &[usize], plan: ShiftPlan, l: usize) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidPool("at least one root is required".into()));
        }
        if l == 0 || l > plan.n_ss() {
            return Err(Error::InvalidPool(format!(
                "superposition order must lie in [1, {}], got {l}",
                plan.n_ss()
            )));
        }
        let mut sorted = roots.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != roots.len() {
            return Err(Error::InvalidPool(format!("duplicate roots in {roots:?}")));
        }
        let n_ps = binomial(plan.n_ss(), l)
            .ok_or_else(|| Error::InvalidPool("pattern count overflows u64".into()))?;
        let n_p = n_ps
            .checked_mul(roots.len() as u64)
            .ok_or_else(|| Error::InvalidPool("pool size overflows u64".into()))?;
        let roots = roots
            .iter()
            .map(|&u| ZcConfig::new(plan.n_zc(), u).map(generate_root_sequence))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            plan,
            l,
            n_ps,
            n_p,
            roots,
        })
    }

    /// Pool over the default roots `1..` coprime to `n_zc`.
    pub fn with_default_roots(n_zc: usize, r: usize, n_ss: usize, l: usize) -> Result<Self> {
        let plan = ShiftPlan::from_subset_size(n_zc, n_ss)?;
        Self::new(&crate::zc::default_roots(n_zc, r)?, plan, l)
    }

    pub fn plan(&self) -> &ShiftPlan {
        &self.plan
    }

    pub fn n_zc(&self) -> usize {
        self.plan.n_zc()
    }

    pub fn n_ss(&self) -> usize {
        self.plan.n_ss()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n_ps(&self) -> u64 {
        self.n_ps
    }

    pub fn n_p(&self) -> u64 {
        self.n_p
    }

    pub fn n_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn root_values(&self) -> Vec<usize> {
        self.roots.iter().map(|r| r.config().root_u()).collect()
    }

    pub fn root_sequence(&self, root_idx: usize) -> &ZcSequence {
        &self.roots[root_idx]
    }

    pub fn pattern_id(&self, index: u64) -> Result<PatternId> {
        if index >= self.n_p {
            return Err(Error::RankOutOfRange {
                index,
                n: self.n_ss(),
                k: self.l,
                count: self.n_p,
            });
        }
        let root_idx = (index / self.n_ps) as usize;
        let shifts = unrank_combination(index % self.n_ps, self.n_ss(), self.l)?;
        Ok(PatternId { root_idx, shifts })
    }

    pub fn index_of(&self, id: &PatternId) -> Result<u64> {
        if id.root_idx >= self.roots.len() || id.shifts.len() != self.l {
            return Err(Error::InvalidPattern(format!("{id:?} is not a pattern of this pool")));
        }
        Ok(id.root_idx as u64 * self.n_ps + rank_combination(&id.shifts, self.n_ss())?)
    }

    pub fn pattern(&self, index: u64) -> Result<Pattern> {
        let id = self.pattern_id(index)?;
        self.materialize(&id)
    }

    pub fn materialize(&self, id: &PatternId) -> Result<Pattern> {
        let root = self
            .roots
            .get(id.root_idx)
            .ok_or_else(|| Error::InvalidPattern(format!("root index {} out of range", id.root_idx)))?;
        build_pattern(root, &id.shifts, &self.plan)
    }

    /// Single cyclically shifted component `c_{u,v}`.
    pub fn component(&self, root_idx: usize, shift: usize) -> Result<ZcSequence> {
        cyclic_shift(&self.roots[root_idx], shift, &self.plan)
    }

    /// Uniform draw over `0..n_p`.
    pub fn sample_pattern<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.n_p)
    }

    pub fn descriptor(&self) -> PoolDescriptor {
        PoolDescriptor {
            n_zc: self.n_zc(),
            roots: self.root_values(),
            n_cs: self.plan.n_cs(),
            n_ss: self.n_ss(),
            l: self.l,
            n_ps: self.n_ps,
            n_p: self.n_p,
        }
    }
}

/// Precomputed inner products between shifted components of all roots in a
/// pool, so pattern inner products cost `L^2` lookups instead of `N_ZC`
/// multiplications.
///
/// `<c_{u,a}, c_{w,b}>` only depends on `(u, w, b - a)`.
#[derive(Debug, Clone)]
pub struct CorrelationTable {
    n_roots: usize,
    n_ss: usize,
    values: Vec<Complex64>,
}

impl CorrelationTable {
    pub fn new(pool: &PilotPool) -> Self {
        let n_roots = pool.n_roots();
        let n_ss = pool.n_ss();
        let n_zc = pool.n_zc();
        let n_cs = pool.plan().n_cs();
        let span = 2 * n_ss - 1;
        let mut values = Vec::with_capacity(n_roots * n_roots * span);
        for a in 0..n_roots {
            for b in 0..n_roots {
                for d in 0..span {
                    let diff = d as isize - (n_ss as isize - 1);
                    let lag = (diff * n_cs as isize).rem_euclid(n_zc as isize) as usize;
                    let value = periodic_crosscorrelation(
                        pool.root_sequence(a).samples(),
                        pool.root_sequence(b).samples(),
                        lag,
                    )
                    .expect("roots share one length");
                    values.push(value);
                }
            }
        }
        Self {
            n_roots,
            n_ss,
            values,
        }
    }

    /// `<c_{root_a, shift_a}, c_{root_b, shift_b}>`.
    pub fn component(&self, root_a: usize, shift_a: usize, root_b: usize, shift_b: usize) -> Complex64 {
        let span = 2 * self.n_ss - 1;
        let d = shift_b + self.n_ss - 1 - shift_a;
        self.values[(root_a * self.n_roots + root_b) * span + d]
    }

    /// `<w_a * sum_i c_{root_a, i}, w_b * sum_j c_{root_b, j}>` for shift
    /// sets `shifts_a`, `shifts_b` and real weights.
    pub fn superposition(
        &self,
        root_a: usize,
        shifts_a: &[usize],
        weight_a: f64,
        root_b: usize,
        shifts_b: &[usize],
        weight_b: f64,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &sa in shifts_a {
            for &sb in shifts_b {
                acc += self.component(root_a, sa, root_b, sb);
            }
        }
        acc * (weight_a * weight_b)
    }

    /// `<s_a, s_b>` for two patterns of the pool.
    pub fn pattern_inner(&self, a: &PatternId, b: &PatternId) -> Complex64 {
        self.superposition(
            a.root_idx,
            &a.shifts,
            1.0 / (a.shifts.len() as f64).sqrt(),
            b.root_idx,
            &b.shifts,
            1.0 / (b.shifts.len() as f64).sqrt(),
        )
    }
}
