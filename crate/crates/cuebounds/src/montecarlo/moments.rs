use num_complex::Complex64;
use serde::Serialize;

use super::haar::{mc_moments, power_traces};
use crate::error::{domain, Result};

/// Exponent tuples (a, b) for E[∏ T_k^{a_k} conj(T_k)^{b_k}].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentSpec {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

fn weight(t: &[u32]) -> u64 {
    t.iter().enumerate().map(|(i, &v)| (i as u64 + 1) * v as u64).sum()
}

impl MomentSpec {
    pub fn new(a: Vec<u32>, b: Vec<u32>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return domain(format!("a and b need the same positive length, got {} and {}", a.len(), b.len()));
        }
        Ok(MomentSpec { a, b })
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn weight_a(&self) -> u64 {
        weight(&self.a)
    }

    pub fn weight_b(&self) -> u64 {
        weight(&self.b)
    }

    /// ∏_k (k/2)^{(a_k+b_k)/2}: converts a moment of the T_k into the same
    /// moment of the raw traces Tr U^k.
    pub fn raw_scale(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (&a, &b))| ((i + 1) as f64 / 2.0).powf((a + b) as f64 / 2.0))
            .product()
    }
}

/// ∏_k [a_k = b_k]·a_k!·2^{a_k}: moments of independent complex Gaussians
/// with E|Z_k|² = 2.
pub fn gaussian_moment(spec: &MomentSpec) -> f64 {
    let mut v = 1.0;
    for (&a, &b) in spec.a.iter().zip(&spec.b) {
        if a != b {
            return 0.0;
        }
        for j in 1..=a {
            v *= 2.0 * j as f64;
        }
    }
    v
}

/// Every tuple a ∈ N^m with Σ k·a_k ≤ w, in lexicographic order.
pub fn tuples_up_to_weight(m: usize, w: u64) -> Vec<Vec<u32>> {
    fn rec(k: usize, m: usize, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k > m {
            out.push(cur.clone());
            return;
        }
        let mut a = 0u32;
        while (a as u64) * (k as u64) <= left {
            cur.push(a);
            rec(k + 1, m, left - a as u64 * k as u64, cur, out);
            cur.pop();
            a += 1;
        }
    }
    let mut out = Vec::new();
    rec(1, m, w, &mut Vec::with_capacity(m), &mut out);
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DsEntry {
    pub spec: MomentSpec,
    pub empirical: Complex64,
    pub exact: f64,
    pub standard_error: f64,
    /// The empirical moment of the raw traces Tr U^k.
    pub empirical_raw: Complex64,
    /// |empirical − exact|/SE; infinite when SE = 0 and the values differ.
    pub z: f64,
    /// n ≥ weight(a) ∨ weight(b).
    pub in_theorem: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DsReport {
    pub n: usize,
    pub m: usize,
    pub max_weight: u64,
    pub reps: usize,
    pub seed: u64,
    /// One entry per unordered pair {a, b}; the (b, a) moment is the conjugate.
    pub entries: Vec<DsEntry>,
    pub out_of_theorem: bool,
    /// All in-theorem entries pass.
    pub all_pass: bool,
}

const Z_GATE: f64 = 5.0;

fn entry(spec: MomentSpec, mean: Complex64, se: f64, n: usize) -> DsEntry {
    let exact = gaussian_moment(&spec);
    let diff = (mean - exact).norm();
    // exactly computable moments (e.g. a = b = 0) have zero spread
    let z = if diff <= 1e-12 * exact.abs().max(1.0) { 0.0 } else { diff / se };
    let in_theorem = spec.weight_a().max(spec.weight_b()) <= n as u64;
    let raw = mean * spec.raw_scale();
    DsEntry { spec, empirical: mean, exact, standard_error: se, empirical_raw: raw, z, in_theorem, pass: z <= Z_GATE }
}

fn products(tuples: &[Vec<u32>], t: &[Complex64]) -> Vec<Complex64> {
    let maxpow = tuples.iter().flatten().copied().max().unwrap_or(0) as usize;
    let pows: Vec<Vec<Complex64>> = t
        .iter()
        .map(|tk| {
            let mut p = vec![Complex64::new(1.0, 0.0); maxpow + 1];
            for e in 1..=maxpow {
                p[e] = p[e - 1] * tk;
            }
            p
        })
        .collect();
    tuples
        .iter()
        .map(|a| a.iter().enumerate().map(|(k, &e)| pows[k][e as usize]).product())
        .collect()
}

fn normalised(raw: &[Complex64]) -> Vec<Complex64> {
    raw.iter().enumerate().map(|(i, z)| z * (2.0 / (i + 1) as f64).sqrt()).collect()
}

/// Monte Carlo check of E[∏ T_k^{a_k} conj(T_k)^{b_k}] = ∏[a_k=b_k] a_k! 2^{a_k}
/// over all pairs with weight(a), weight(b) ≤ max_weight.
pub fn ds_verify(n: usize, m: usize, max_weight: u64, reps: usize, seed: u64) -> Result<DsReport> {
    if n == 0 || m == 0 {
        return domain("n and m must be at least 1");
    }
    if reps < 1000 {
        return domain(format!("need at least 1000 replicas, got {reps}"));
    }
    let tuples = tuples_up_to_weight(m, max_weight);
    let pairs: Vec<(usize, usize)> =
        (0..tuples.len()).flat_map(|i| (i..tuples.len()).map(move |j| (i, j))).collect();
    let width = 2 * pairs.len();
    let acc = mc_moments(n, reps, seed, width, |u, o| {
        let p = products(&tuples, &normalised(&power_traces(u, m)));
        for (slot, &(i, j)) in pairs.iter().enumerate() {
            let v = p[i] * p[j].conj();
            o[2 * slot] = v.re;
            o[2 * slot + 1] = v.im;
        }
    })?;
    let se = acc.se();
    let entries: Vec<DsEntry> = pairs
        .iter()
        .enumerate()
        .map(|(slot, &(i, j))| {
            let spec = MomentSpec { a: tuples[i].clone(), b: tuples[j].clone() };
            let mean = Complex64::new(acc.mean[2 * slot], acc.mean[2 * slot + 1]);
            let s = se[2 * slot].hypot(se[2 * slot + 1]);
            entry(spec, mean, s, n)
        })
        .collect();
    let all_pass = entries.iter().filter(|e| e.in_theorem).all(|e| e.pass);
    Ok(DsReport {
        n,
        m,
        max_weight,
        reps,
        seed,
        out_of_theorem: max_weight > n as u64,
        entries,
        all_pass,
    })
}

/// A single moment; used for below-threshold controls.
pub fn ds_moment(n: usize, spec: &MomentSpec, reps: usize, seed: u64) -> Result<DsEntry> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    if reps < 1000 {
        return domain(format!("need at least 1000 replicas, got {reps}"));
    }
    let tuples = vec![spec.a.clone(), spec.b.clone()];
    let acc = mc_moments(n, reps, seed, 2, |u, o| {
        let p = products(&tuples, &normalised(&power_traces(u, spec.m())));
        let v = p[0] * p[1].conj();
        o[0] = v.re;
        o[1] = v.im;
    })?;
    let se = acc.se();
    Ok(entry(spec.clone(), Complex64::new(acc.mean[0], acc.mean[1]), se[0].hypot(se[1]), n))
}
