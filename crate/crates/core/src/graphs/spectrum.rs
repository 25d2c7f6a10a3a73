//! Adjacency spectra: exact multiplicities of integral eigenvalues, floating
//! spectra, interlacing and the spectral chromatic bounds.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::build::{build_h2, vertex_matrix};
use super::GraphHandle;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::graphs::BuildBudget;
use crate::homsearch::dsatur_coloring;

/// Tolerance for comparing floating eigenvalues.
pub const EIGEN_TOL: f64 = 1e-9;
const CLUSTER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenValue {
    Exact(i64),
    Approx(f64),
}

impl EigenValue {
    pub fn as_f64(self) -> f64 {
        match self {
            EigenValue::Exact(v) => v as f64,
            EigenValue::Approx(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralEntry {
    pub value: EigenValue,
    pub multiplicity: usize,
    /// Multiplicity is an exact nullity rather than a cluster count.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub order: usize,
    /// Distinct eigenvalues, decreasing.
    pub eigenvalues: Vec<SpectralEntry>,
    /// The exact multiplicities account for every vertex.
    pub certified: bool,
    /// Sum of all eigenvalues is zero (checked exactly when certified).
    pub trace_zero: bool,
    pub chromatic_bounds: (u64, u64),
}

impl SpectrumReport {
    pub fn multiplicity(&self, value: i64) -> usize {
        self.eigenvalues.iter().find(|e| e.value == EigenValue::Exact(value)).map_or(0, |e| e.multiplicity)
    }

    /// All eigenvalues with repetition, decreasing.
    pub fn sorted_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().flat_map(|e| std::iter::repeat_n(e.value.as_f64(), e.multiplicity)).collect()
    }

    /// The spectrum as `(value, multiplicity)` when fully certified.
    pub fn exact(&self) -> Option<Vec<(i64, usize)>> {
        if !self.certified {
            return None;
        }
        self.eigenvalues
            .iter()
            .map(|e| match e.value {
                EigenValue::Exact(v) => Some((v, e.multiplicity)),
                EigenValue::Approx(_) => None,
            })
            .collect()
    }
}

/// All adjacency eigenvalues with repetition, decreasing.
pub fn float_spectrum(g: &GraphHandle) -> Vec<f64> {
    let t = g.order();
    if t == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_fn(t, t, |i, j| if g.is_adjacent(i, j) { 1.0 } else { 0.0 });
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Integers lying within a small tolerance of some floating eigenvalue.
pub fn integral_candidates(values: &[f64]) -> Vec<i64> {
    let mut out: Vec<i64> =
        values.iter().filter(|v| (*v - v.round()).abs() < CLUSTER_TOL).map(|v| v.round() as i64).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Dimension of the kernel of `A - lambda I` over the rationals.
///
/// The rank over Q is the largest rank modulo a set of primes whose product
/// exceeds the Hadamard bound on every minor, so no probabilistic step is
/// involved.
pub fn exact_nullity(g: &GraphHandle, lambda: i64) -> usize {
    let t = g.order();
    let lam2 = (lambda as f64) * (lambda as f64);
    let bits: f64 =
        (0..t).map(|v| g.degree(v) as f64 + lam2).filter(|&s| s > 0.0).map(|s| 0.5 * s.log2()).sum::<f64>()
            + 2.0;
    let mut covered = 0.0;
    let mut best = 0;
    let mut candidate = 1u64 << 62;
    while covered < bits && best < t {
        candidate = previous_prime(candidate);
        best = best.max(rank_mod(g, lambda, candidate));
        covered += (candidate as f64).log2();
    }
    t - best
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn previous_prime(n: u64) -> u64 {
    let mut c = n - 1;
    while !is_prime_u64(c) {
        c -= 1;
    }
    c
}

fn rank_mod(g: &GraphHandle, lambda: i64, p: u64) -> usize {
    let t = g.order();
    let diag = (-lambda).rem_euclid(p as i64) as u64;
    let mut m: Vec<Vec<u64>> = (0..t)
        .map(|i| {
            (0..t)
                .map(|j| {
                    if i == j {
                        diag
                    } else if g.is_adjacent(i, j) {
                        1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..t {
        let Some(piv) = (rank..t).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], p - 2, p);
        let pivot_row: Vec<u64> = m[rank].iter().map(|&x| mul_mod(x, inv, p)).collect();
        for (r, row) in m.iter_mut().enumerate().skip(rank + 1) {
            let f = row[col];
            if f == 0 {
                continue;
            }
            debug_assert!(r > rank);
            for c in col..t {
                let sub = mul_mod(f, pivot_row[c], p);
                row[c] = if row[c] >= sub { row[c] - sub } else { row[c] + p - sub };
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Spectrum with exact multiplicities for the given integer candidates;
/// eigenvalues not covered by a candidate are reported approximately.
pub fn certified_spectrum(g: &GraphHandle, candidates: &[i64]) -> SpectrumReport {
    let t = g.order();
    let floats = float_spectrum(g);
    let mut cands = candidates.to_vec();
    cands.sort_unstable();
    cands.dedup();
    let exact: Vec<(i64, usize)> =
        cands.iter().map(|&c| (c, exact_nullity(g, c))).filter(|&(_, m)| m > 0).collect();
    let covered: usize = exact.iter().map(|e| e.1).sum();
    let mut entries: Vec<SpectralEntry> = exact
        .iter()
        .map(|&(v, m)| SpectralEntry { value: EigenValue::Exact(v), multiplicity: m, certified: true })
        .collect();
    let certified = covered == t;
    let trace_zero;
    if certified {
        trace_zero = exact.iter().map(|&(v, m)| v * m as i64).sum::<i64>() == 0;
    } else {
        // drop the floats explained by exact entries, cluster the rest
        let mut rest = floats.clone();
        for &(v, m) in &exact {
            for _ in 0..m {
                if let Some(i) = nearest(&rest, v as f64) {
                    rest.remove(i);
                }
            }
        }
        let mut i = 0;
        while i < rest.len() {
            let mut j = i + 1;
            while j < rest.len() && (rest[i] - rest[j]).abs() < CLUSTER_TOL {
                j += 1;
            }
            let mean = rest[i..j].iter().sum::<f64>() / (j - i) as f64;
            entries.push(SpectralEntry {
                value: EigenValue::Approx(mean),
                multiplicity: j - i,
                certified: false,
            });
            i = j;
        }
        trace_zero = floats.iter().sum::<f64>().abs() < CLUSTER_TOL * t.max(1) as f64;
    }
    entries.sort_by(|a, b| b.value.as_f64().total_cmp(&a.value.as_f64()));

    let lower = if t == 0 {
        0
    } else if g.size() == 0 {
        1
    } else {
        let hoffman = match (entries.first(), entries.last()) {
            (Some(top), Some(bottom)) if certified => match (top.value, bottom.value) {
                (EigenValue::Exact(hi), EigenValue::Exact(lo)) if lo < 0 => {
                    1 + (hi as u64).div_ceil(lo.unsigned_abs())
                }
                _ => 2,
            },
            _ => hoffman_bound(&floats).map_or(2, |h| (h - EIGEN_TOL).ceil() as u64),
        };
        hoffman.max(2)
    };
    let upper = dsatur_coloring(g).into_iter().max().map_or(0, |c| c + 1);
    SpectrumReport {
        order: t,
        eigenvalues: entries,
        certified,
        trace_zero,
        chromatic_bounds: (lower, upper as u64),
    }
}

/// [`certified_spectrum`] with candidates read off the floating spectrum.
pub fn spectrum(g: &GraphHandle) -> SpectrumReport {
    certified_spectrum(g, &integral_candidates(&float_spectrum(g)))
}

fn nearest(values: &[f64], target: f64) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .map(|(i, _)| i)
}

/// Hoffman's lower bound `1 - lambda_max / lambda_min` on the chromatic number
/// from a decreasing list of eigenvalues.
pub fn hoffman_bound(values: &[f64]) -> Option<f64> {
    let (hi, lo) = (*values.first()?, *values.last()?);
    (lo < -EIGEN_TOL).then(|| 1.0 - hi / lo)
}

/// Cauchy interlacing between decreasing spectra of a graph (`big`) and an
/// induced subgraph (`small`).
pub fn interlaces(big: &[f64], small: &[f64], tol: f64) -> bool {
    let (t, m) = (big.len(), small.len());
    m <= t && small.iter().enumerate().all(|(i, &mu)| big[i] + tol >= mu && mu + tol >= big[i + t - m])
}

/// Whether the subgraph induced on `vertices` interlaces `g`.
pub fn interlacing_check(g: &GraphHandle, vertices: &[usize]) -> Result<bool> {
    let h = g.induced(vertices)?;
    Ok(interlaces(&float_spectrum(g), &float_spectrum(&h), EIGEN_TOL))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaemersReport {
    pub chi: usize,
    pub order: usize,
    /// `lambda_2 + .. + lambda_chi + lambda_{t-chi+1}`.
    pub sum: f64,
    /// The same sum when the spectrum is certified integral.
    pub exact_sum: Option<i64>,
    pub holds: bool,
}

/// Evaluates the eigenvalue inequality that every graph with chromatic number
/// `chi` satisfies. A failure shows the chromatic number differs from `chi`.
pub fn haemers_check(g: &GraphHandle, chi: usize) -> Result<HaemersReport> {
    let t = g.order();
    if chi < 2 || t <= chi {
        return Err(Error::Precondition(format!("need 2 <= chi < t, got chi={chi}, t={t}")));
    }
    let report = spectrum(g);
    let values = report.sorted_values();
    let pick = |i: usize| values[i - 1];
    let sum = (2..=chi).map(pick).sum::<f64>() + pick(t - chi + 1);
    let exact_sum = report.exact().map(|ex| {
        let vals: Vec<i64> = ex.iter().flat_map(|&(v, m)| std::iter::repeat_n(v, m)).collect();
        (2..=chi).map(|i| vals[i - 1]).sum::<i64>() + vals[t - chi]
    });
    let holds = match exact_sum {
        Some(s) => s >= 0,
        None => sum >= -EIGEN_TOL,
    };
    Ok(HaemersReport { chi, order: t, sum, exact_sum, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub q: u32,
    /// Rank-one vertices deleted from the full graph.
    pub deleted: usize,
    pub interlacing_each_step: bool,
    pub multiplicity_bound: i64,
    /// Exact multiplicity of `q - 1` in the final graph.
    pub multiplicity_observed: usize,
    pub min_bound: i64,
    pub min_observed: f64,
    /// Final spectrum equals the invertible graph's spectrum plus a zero.
    pub isolated_zero_split: bool,
    pub ok: bool,
}

/// Deletes the rank-one matrices from the graph on all `2 x 2` hermitian
/// matrices one at a time, checking interlacing after every deletion, and
/// compares the end result with the eigenvalue bounds that follow.
pub fn deletion_chain_check(field: &Field, budget: &BuildBudget) -> Result<ChainReport> {
    let q = field.q();
    let h2 = build_h2(field, budget)?;
    let mut rank_one = Vec::new();
    for v in 0..h2.order() {
        if vertex_matrix(&h2, field, v)?.rank() == 1 {
            rank_one.push(v);
        }
    }
    let mut keep: Vec<bool> = vec![true; h2.order()];
    let mut prev = float_spectrum(&h2);
    let mut interlacing = true;
    let mut current = h2.clone();
    for &v in &rank_one {
        keep[v] = false;
        let kept: Vec<usize> = (0..h2.order()).filter(|&u| keep[u]).collect();
        current = h2.induced(&kept)?;
        let next = float_spectrum(&current);
        interlacing &= next.len() + 1 == prev.len() && interlaces(&prev, &next, EIGEN_TOL);
        prev = next;
    }
    let q64 = q as i64;
    let k = q64.pow(3) - q64 * q64 + q64 - 1;
    let multiplicity_bound = q64.pow(4) - 2 * k - 1;
    let multiplicity_observed = exact_nullity(&current, q64 - 1);
    let min_bound = -q64 * q64 + q64 - 1;
    let min_observed = *prev.last().unwrap_or(&0.0);

    let zero = (0..current.order())
        .find(|&v| current.degree(v) == 0)
        .ok_or_else(|| Error::Invalid("zero matrix is not isolated".into()))?;
    let rest: Vec<usize> = (0..current.order()).filter(|&v| v != zero).collect();
    let mut with_zero = float_spectrum(&current.induced(&rest)?);
    with_zero.push(0.0);
    with_zero.sort_by(|a, b| b.total_cmp(a));
    let isolated_zero_split = with_zero.iter().zip(&prev).all(|(a, b)| (a - b).abs() < CLUSTER_TOL);

    let ok = interlacing
        && rank_one.len() as i64 == k
        && multiplicity_observed as i64 >= multiplicity_bound
        && min_observed + EIGEN_TOL >= min_bound as f64
        && isolated_zero_split;
    Ok(ChainReport {
        q,
        deleted: rank_one.len(),
        interlacing_each_step: interlacing,
        multiplicity_bound,
        multiplicity_observed,
        min_bound,
        min_observed,
        isolated_zero_split,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_hgl, complete, cycle, petersen};

    #[test]
    fn petersen_spectrum_is_exact() {
        let r = certified_spectrum(&petersen(), &[3, 1, -2]);
        assert!(r.certified && r.trace_zero);
        assert_eq!(r.exact().unwrap(), vec![(3, 1), (1, 5), (-2, 4)]);
        assert_eq!(r.chromatic_bounds, (3, 3));
    }

    #[test]
    fn missing_candidate_is_uncertified() {
        let r = certified_spectrum(&petersen(), &[3, 1]);
        assert!(!r.certified);
        assert_eq!(r.eigenvalues.iter().map(|e| e.multiplicity).sum::<usize>(), 10);
        assert!(
            matches!(r.eigenvalues.last().unwrap().value, EigenValue::Approx(v) if (v + 2.0).abs() < 1e-6)
        );
    }

    #[test]
    fn irrational_spectrum_stays_approximate() {
        // C5 has eigenvalues 2 and (-1 +- sqrt 5)/2
        let r = spectrum(&cycle(5));
        assert!(!r.certified);
        assert_eq!(r.multiplicity(2), 1);
        assert_eq!(r.chromatic_bounds.1, 3);
    }

    #[test]
    fn exact_nullity_matches_float_clusters() {
        let k = complete(6);
        assert_eq!(exact_nullity(&k, -1), 5);
        assert_eq!(exact_nullity(&k, 5), 1);
        assert_eq!(exact_nullity(&k, 0), 0);
    }

    #[test]
    fn primes() {
        assert!(is_prime_u64(2_305_843_009_213_693_951));
        assert!(!is_prime_u64(2_305_843_009_213_693_953));
        assert!(is_prime_u64(previous_prime(1 << 62)));
    }

    #[test]
    fn h2_spectra() {
        for q in [2i64, 3] {
            let f = Field::new(q as u32).unwrap();
            let g = build_h2(&f, &BuildBudget::default()).unwrap();
            let k = q.pow(3) - q * q + q - 1;
            let s = -q * q + q - 1;
            let r = certified_spectrum(&g, &[k, q - 1, s]);
            assert_eq!(
                r.exact().unwrap(),
                vec![(k, 1), (q - 1, (q.pow(4) - k - 1) as usize), (s, k as usize)]
            );
        }
    }

    #[test]
    fn interlacing_on_deletion() {
        let f = Field::new(2).unwrap();
        let g = build_h2(&f, &BuildBudget::default()).unwrap();
        let all: Vec<usize> = (0..g.order()).collect();
        assert!(interlacing_check(&g, &all).unwrap());
        let one = (0..g.order()).find(|&v| vertex_matrix(&g, &f, v).unwrap().rank() == 1).unwrap();
        let kept: Vec<usize> = all.iter().copied().filter(|&v| v != one).collect();
        assert!(interlacing_check(&g, &kept).unwrap());
        assert!(!interlaces(&[2.0, 0.0], &[3.0], EIGEN_TOL));
    }

    #[test]
    fn haemers_on_petersen() {
        let r = haemers_check(&petersen(), 3).unwrap();
        assert_eq!(r.exact_sum, Some(0));
        assert!(r.holds);
        assert!(haemers_check(&complete(4), 4).is_err());
        assert!(haemers_check(&complete(4), 1).is_err());
    }

    #[test]
    fn deletion_chain() {
        for q in [2, 3] {
            let f = Field::new(q).unwrap();
            let r = deletion_chain_check(&f, &BuildBudget::default()).unwrap();
            assert!(r.ok, "{r:?}");
        }
    }

    #[test]
    fn hgl_spectrum_top_is_degree() {
        let f = Field::new(3).unwrap();
        let g = build_hgl(&f, 2, &BuildBudget::default()).unwrap();
        let r = spectrum(&g);
        assert_eq!(r.eigenvalues[0].value, EigenValue::Exact(14));
        assert_eq!(r.eigenvalues[0].multiplicity, 1);
        assert!(r.trace_zero);
    }
}
