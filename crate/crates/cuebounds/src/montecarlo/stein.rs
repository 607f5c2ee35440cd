use num_complex::Complex64;
use serde::Serialize;

use super::generator::{gamma_from_power_sums, zeta_gen};
use super::haar::{mc_moments, power_traces};
use crate::error::{domain, Result};

/// (2m+5)m(m−1)/(9n²).
pub fn closed_a(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (2.0 * m + 5.0) * m * (m - 1.0) / (9.0 * n * n)
}

/// (8m+7)(m+1)m/(6n²).
pub fn closed_b(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (8.0 * m + 7.0) * (m + 1.0) * m / (6.0 * n * n)
}

/// E‖I − K⁻¹Γ‖²_HS computed entrywise with E(Re Tr U^j)² = E(Im Tr U^j)² = j/2
/// for j ≤ n: [2m(m+1) + 4Σ_{k<ℓ≤m}(ℓ²/k + k)]/n².
pub fn exact_b(n: usize, m: usize) -> f64 {
    let mut s = 2.0 * (m * (m + 1)) as f64;
    for k in 1..=m {
        for l in k + 1..=m {
            let (kf, lf) = (k as f64, l as f64);
            s += 4.0 * (lf * lf / kf + kf);
        }
    }
    s / (n * n) as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct SteinTerms {
    pub n: usize,
    pub m: usize,
    pub reps: usize,
    pub closed_a: f64,
    pub closed_b: f64,
    pub exact_b: f64,
    pub mc_a: f64,
    pub mc_b: f64,
    pub se_a: f64,
    pub se_b: f64,
    pub pass_a: bool,
    pub pass_b: bool,
    pub pass_exact_b: bool,
}

/// |K⁻¹ζ|² and ‖I − K⁻¹Γ‖²_HS for one matrix, from Tr U^j, j ≤ 2m.
pub fn stein_sample(n: usize, m: usize, raw: &[Complex64]) -> (f64, f64) {
    let nf = n as f64;
    let t: Vec<Complex64> = raw[..m].iter().enumerate().map(|(i, z)| z * (2.0 / (i + 1) as f64).sqrt()).collect();
    let a: f64 = (1..=m).map(|k| zeta_gen(&t, k).norm_sqr() / (nf * nf * (k * k) as f64)).sum();
    let g = gamma_from_power_sums(n, raw, m);
    let mut b = 0.0;
    for (i, row) in g.iter().enumerate() {
        let ki = nf * (i / 2 + 1) as f64;
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            b += (target - v / ki).powi(2);
        }
    }
    (a, b)
}

pub fn stein_terms(n: usize, m: usize, reps: usize, seed: u64) -> Result<SteinTerms> {
    if m == 0 || 2 * m > n {
        return domain(format!("need 1 <= m <= n/2, got n = {n}, m = {m}"));
    }
    if reps < 2 {
        return domain("need at least 2 replicas");
    }
    let acc = mc_moments(n, reps, seed, 2, |u, o| {
        let (a, b) = stein_sample(n, m, &power_traces(u, 2 * m));
        o[0] = a;
        o[1] = b;
    })?;
    let se = acc.se();
    let (ca, cb, eb) = (closed_a(n, m), closed_b(n, m), exact_b(n, m));
    let (ma, mb) = (acc.mean[0], acc.mean[1]);
    Ok(SteinTerms {
        n,
        m,
        reps,
        closed_a: ca,
        closed_b: cb,
        exact_b: eb,
        mc_a: ma,
        mc_b: mb,
        se_a: se[0],
        se_b: se[1],
        pass_a: (ca - ma).abs() <= 5.0 * se[0],
        pass_b: (cb - mb).abs() <= 5.0 * se[1],
        pass_exact_b: (eb - mb).abs() <= 5.0 * se[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((closed_a(20, 3) - 66.0 / 3600.0).abs() < 1e-15);
        assert!((closed_b(20, 3) - 372.0 / 2400.0).abs() < 1e-15);
        assert_eq!(closed_a(10, 1), 0.0);
    }

    #[test]
    fn lemma_a_sum_identity() {
        // Σ_{ℓ<k} ℓ(k−ℓ)/k = (k²−1)/6
        for k in 1..40usize {
            let s: f64 = (1..k).map(|l| (l * (k - l)) as f64 / k as f64).sum();
            assert!((s - ((k * k - 1) as f64) / 6.0).abs() < 1e-10);
        }
        for m in 1..20 {
            let s: f64 = (1..=m).map(|k| 4.0 * ((k * k - 1) as f64) / 6.0).sum::<f64>() / 400.0;
            assert!((s - closed_a(20, m)).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_b_small() {
        // m = 1: only the diagonal and the (1,2) pair, 2·2/n²
        assert!((exact_b(10, 1) - 4.0 / 100.0).abs() < 1e-15);
        assert!((exact_b(20, 3) - 110.0 / 400.0).abs() < 1e-15);
    }

    #[test]
    fn m1_entrywise() {
        // at m = 1: Γ₁₁, Γ₂₂ contribute 2/n² and the pair Γ₁₂ = Γ₂₁ another 2/n²
        assert!((exact_b(12, 1) - 4.0 / 144.0).abs() < 1e-15);
        assert!((closed_b(12, 1) - 5.0 / 144.0).abs() < 1e-15);
        let s = stein_terms(12, 1, 40_000, 5).unwrap();
        assert!(s.pass_a && s.pass_exact_b, "{s:?}");
    }

    #[test]
    fn lemma_a_mc() {
        let s = stein_terms(20, 3, 40_000, 6).unwrap();
        assert!(s.pass_a, "{s:?}");
        assert!(s.pass_exact_b, "{s:?}");
    }

    #[test]
    fn domain() {
        assert!(stein_terms(5, 3, 100, 0).is_err());
    }
}
