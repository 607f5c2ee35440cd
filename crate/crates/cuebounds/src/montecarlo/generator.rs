use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Result};

pub const MIN_GAP: f64 = 1e-9;

/// Eigenangles θ ∈ T^n, pairwise distinct.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Configuration {
    theta: Vec<f64>,
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

impl Configuration {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return domain("a configuration needs at least one angle");
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return domain("non-finite angle");
        }
        let theta: Vec<f64> = theta.iter().map(|t| t.rem_euclid(TAU)).collect();
        let mut sorted = theta.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        for i in 0..n {
            let g = circular_gap(sorted[i], sorted[(i + 1) % n]);
            if n > 1 && g < MIN_GAP {
                return domain(format!("angles {} and {} are closer than {MIN_GAP:e}", sorted[i], sorted[(i + 1) % n]));
            }
        }
        Ok(Configuration { theta })
    }

    /// n i.i.d. uniform angles (redrawn in the unlikely event of a near
    /// coincidence).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return domain("n must be at least 1");
        }
        loop {
            let theta = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
            if let Ok(c) = Self::new(theta) {
                return Ok(c);
            }
        }
    }

    /// θ_j = φ + 2πj/n.
    pub fn regular_ngon(n: usize, phase: f64) -> Result<Self> {
        if n == 0 {
            return domain("n must be at least 1");
        }
        Self::new((0..n).map(|j| phase + TAU * j as f64 / n as f64).collect())
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// Σ_j e^{ikθ_j} for any integer k.
    pub fn power_sum(&self, k: i64) -> Complex64 {
        self.theta.iter().map(|t| Complex64::from_polar(1.0, k as f64 * t)).sum()
    }

    /// T_k = √(2/k) Σ_j e^{ikθ_j}, k ≥ 1.
    pub fn t(&self, k: usize) -> Complex64 {
        self.power_sum(k as i64) * (2.0 / k as f64).sqrt()
    }
}

/// Σ_{i≠j} cot((θ_j − θ_i)/2) for each j, i.e. −∂_jΦ.
pub fn drift_sums(config: &Configuration) -> Vec<f64> {
    let th = config.angles();
    th.iter()
        .enumerate()
        .map(|(j, tj)| {
            th.iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, ti)| 1.0 / ((tj - ti) / 2.0).tan())
                .sum()
        })
        .collect()
}

/// ζ_k = √(k/2)·Σ_{ℓ=1}^{k−1} √(ℓ(k−ℓ)) T_ℓ T_{k−ℓ}, the correction term in
/// L T_k = nk T_k + ζ_k. Named `zeta_gen` to keep it apart from the Fourier
/// data ζ_k of g.
pub fn zeta_gen(t: &[Complex64], k: usize) -> Complex64 {
    let s: Complex64 = (1..k).map(|l| t[l - 1] * t[k - l - 1] * ((l * (k - l)) as f64).sqrt()).sum();
    s * (k as f64 / 2.0).sqrt()
}

/// L T_k with L = −Σ_j (∂_jj + Σ_{i≠j} cot((θ_j−θ_i)/2) ∂_j), evaluated
/// directly from the angles.
pub fn generator_apply(config: &Configuration, k: usize) -> Complex64 {
    let kf = k as f64;
    let norm = (2.0 / kf).sqrt();
    let th = config.angles();
    let e: Vec<Complex64> = th.iter().map(|t| Complex64::from_polar(1.0, kf * t)).collect();
    // −∂_jj e^{ikθ_j} = k² e^{ikθ_j}
    let lap: Complex64 = e.iter().sum::<Complex64>() * kf * kf;
    // Σ_j Σ_{i≠j} cot((θ_j−θ_i)/2)·ik e^{ikθ_j}, paired by antisymmetry
    let mut drift = Complex64::new(0.0, 0.0);
    for j in 0..th.len() {
        for i in 0..j {
            let c = 1.0 / ((th[j] - th[i]) / 2.0).tan();
            drift += (e[j] - e[i]) * c;
        }
    }
    let drift = drift * Complex64::new(0.0, kf);
    (lap - drift) * norm
}

/// |L T_k − (nk T_k + ζ_k)|.
pub fn generator_residual(config: &Configuration, k: usize) -> Result<f64> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    let n = config.n() as f64;
    let t: Vec<Complex64> = (1..=k).map(|l| config.t(l)).collect();
    let rhs = t[k - 1] * (n * k as f64) + zeta_gen(&t, k);
    Ok((generator_apply(config, k) - rhs).norm())
}

/// Γ_{ij} = ∇X_i·∇X_j (2m×2m, 0-based: row 2k−2 ↔ X_{2k−1}) from the
/// gradients ∇X_{2k−1} = −√(2k) sin(kθ), ∇X_{2k} = √(2k) cos(kθ).
pub fn gamma_from_gradients(config: &Configuration, m: usize) -> Vec<Vec<f64>> {
    let th = config.angles();
    let grads: Vec<Vec<f64>> = (1..=m)
        .flat_map(|k| {
            let s = (2.0 * k as f64).sqrt();
            let kf = k as f64;
            [th.iter().map(|t| -s * (kf * t).sin()).collect::<Vec<_>>(), th.iter().map(|t| s * (kf * t).cos()).collect()]
        })
        .collect();
    grads.iter().map(|gi| grads.iter().map(|gj| gi.iter().zip(gj).map(|(a, b)| a * b).sum()).collect()).collect()
}

/// Γ from power sums p_j = Σ e^{ijθ} (p_0 = n, p_{−j} = conj p_j):
/// the product-to-sum identities behind every closed form.
pub fn gamma_from_power_sums(n: usize, p: &[Complex64], m: usize) -> Vec<Vec<f64>> {
    assert!(p.len() >= 2 * m, "need power sums up to 2m");
    let ps = |j: i64| -> Complex64 {
        match j.cmp(&0) {
            std::cmp::Ordering::Equal => Complex64::new(n as f64, 0.0),
            std::cmp::Ordering::Greater => p[j as usize - 1],
            std::cmp::Ordering::Less => p[(-j) as usize - 1].conj(),
        }
    };
    let mut g = vec![vec![0.0; 2 * m]; 2 * m];
    for l in 1..=m {
        for k in 1..=m {
            let (li, ki) = (l as i64, k as i64);
            let w = 2.0 * ((k * l) as f64).sqrt();
            let (sum_pos, diff) = (ps(li + ki), ps(li - ki));
            // Σ cos cos, Σ sin sin, Σ sin(ℓθ)cos(kθ), Σ cos(ℓθ)sin(kθ)
            let cc = 0.5 * (diff.re + sum_pos.re);
            let ss = 0.5 * (diff.re - sum_pos.re);
            let sc = 0.5 * (sum_pos.im + diff.im);
            let cs = 0.5 * (sum_pos.im - diff.im);
            g[2 * l - 2][2 * k - 2] = w * ss;
            g[2 * l - 1][2 * k - 1] = w * cc;
            g[2 * l - 2][2 * k - 1] = -w * sc;
            g[2 * l - 1][2 * k - 2] = -w * cs;
        }
    }
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaIdentityReport {
    pub n: usize,
    pub m: usize,
    /// Γ_{2k−1,2k−1} = 2kΣsin²(kθ) and Γ_{2k,2k} = 2kΣcos²(kθ).
    pub trig_form_residual: f64,
    /// Diagonal written as nk ∓ (k^{3/2}/√2) Re T_{2k}.
    pub displayed_diagonal_residual: f64,
    /// Diagonal written as nk ∓ k Re Tr U^{2k} = nk ∓ k^{3/2} Re T_{2k}.
    pub corrected_diagonal_residual: f64,
    /// The four off-diagonal families in terms of Re/Im T_{ℓ±k}.
    pub off_diagonal_residual: f64,
    /// Gradient Γ against the power-sum Γ used by `stein_terms`.
    pub power_sum_residual: f64,
    /// Largest residual over every form that is an identity (all but the
    /// displayed diagonal).
    pub max_residual: f64,
}

pub fn gamma_identities(config: &Configuration, m: usize) -> Result<GammaIdentityReport> {
    if m == 0 {
        return domain("m must be at least 1");
    }
    let n = config.n();
    let nf = n as f64;
    let th = config.angles();
    let g = gamma_from_gradients(config, m);
    let t = |j: usize| config.t(j);
    let mut trig = 0.0f64;
    let mut shown = 0.0f64;
    let mut fixed = 0.0f64;
    for k in 1..=m {
        let kf = k as f64;
        let s2: f64 = th.iter().map(|x| (kf * x).sin().powi(2)).sum();
        let c2: f64 = th.iter().map(|x| (kf * x).cos().powi(2)).sum();
        let (a, b) = (g[2 * k - 2][2 * k - 2], g[2 * k - 1][2 * k - 1]);
        trig = trig.max((a - 2.0 * kf * s2).abs()).max((b - 2.0 * kf * c2).abs());
        let re = t(2 * k).re;
        let disp = kf.powf(1.5) / 2f64.sqrt() * re;
        shown = shown.max((a - (nf * kf - disp)).abs()).max((b - (nf * kf + disp)).abs());
        let corr = kf.powf(1.5) * re;
        fixed = fixed.max((a - (nf * kf - corr)).abs()).max((b - (nf * kf + corr)).abs());
    }
    let mut off = 0.0f64;
    for l in 1..=m {
        for k in 1..=l {
            let (kf, lf) = (k as f64, l as f64);
            let sum_part = (kf * lf * (lf + kf) / 2.0).sqrt();
            let tp = t(l + k);
            // the ℓ = k term carries T_0, which only enters through Im T_0 = 0
            let (diff_part, tm) =
                if l > k { ((kf * lf * (lf - kf) / 2.0).sqrt(), t(l - k)) } else { (0.0, Complex64::new(0.0, 0.0)) };
            let mut check = |got: f64, want: f64| off = off.max((got - want).abs());
            if l > k {
                check(g[2 * l - 1][2 * k - 1], diff_part * tm.re + sum_part * tp.re);
                check(g[2 * l - 2][2 * k - 2], diff_part * tm.re - sum_part * tp.re);
            }
            check(g[2 * l - 2][2 * k - 1], -diff_part * tm.im - sum_part * tp.im);
            check(g[2 * l - 1][2 * k - 2], diff_part * tm.im - sum_part * tp.im);
        }
    }
    let p: Vec<Complex64> = (1..=2 * m as i64).map(|j| config.power_sum(j)).collect();
    let gp = gamma_from_power_sums(n, &p, m);
    let ps = g.iter().flatten().zip(gp.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(GammaIdentityReport {
        n,
        m,
        trig_form_residual: trig,
        displayed_diagonal_residual: shown,
        corrected_diagonal_residual: fixed,
        off_diagonal_residual: off,
        power_sum_residual: ps,
        max_residual: trig.max(fixed).max(off).max(ps),
    })
}

/// cot(π(i−j)/n) summed over i ≠ j for the regular n-gon, vanishing by the
/// pairing i−j ↔ j−i.
pub fn ngon_drift_max(n: usize) -> f64 {
    let c = Configuration::regular_ngon(n, 0.3 * PI / n as f64).expect("n >= 1");
    drift_sums(&c).into_iter().map(f64::abs).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::super::haar::replica_rng;
    use super::*;

    #[test]
    fn configuration_validation() {
        assert!(Configuration::new(vec![]).is_err());
        assert!(Configuration::new(vec![0.1, 0.1 + 1e-12]).is_err());
        assert!(Configuration::new(vec![0.0, TAU - 1e-12]).is_err());
        assert!(Configuration::new(vec![0.0, 1.0, f64::NAN]).is_err());
        let c = Configuration::new(vec![-0.5, 7.0]).unwrap();
        assert!(c.angles().iter().all(|t| (0.0..TAU).contains(t)));
    }

    #[test]
    fn k1_random() {
        let mut rng = replica_rng(42, 0);
        for n in 1..=50 {
            let c = Configuration::random(n, &mut rng).unwrap();
            assert!(generator_residual(&c, 1).unwrap() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn k_up_to_8_random() {
        let mut rng = replica_rng(43, 0);
        let mut worst = 0.0f64;
        for r in 0..100 {
            let n = 2 + r % 49;
            let c = Configuration::random(n, &mut rng).unwrap();
            for k in 1..=8 {
                worst = worst.max(generator_residual(&c, k).unwrap());
            }
        }
        assert!(worst < 1e-9, "{worst:e}");
    }

    #[test]
    fn n2_by_hand() {
        // n = 2, θ = (0, φ): cot terms give −ik cot(φ/2)(e^{ikφ} − 1)·√(2/k)
        let phi = 1.3f64;
        let c = Configuration::new(vec![0.0, phi]).unwrap();
        for k in 1..=4 {
            let kf = k as f64;
            let e = Complex64::from_polar(1.0, kf * phi);
            let lhs = ((e + 1.0) * kf * kf - Complex64::new(0.0, kf) * (e - 1.0) / (phi / 2.0).tan()) * (2.0 / kf).sqrt();
            assert!((generator_apply(&c, k) - lhs).norm() < 1e-12);
        }
    }

    #[test]
    fn wrong_sign_is_detected() {
        // the residual is not trivially small: drop ζ_k and it shows up
        let c = Configuration::new(vec![0.2, 1.0, 2.5, 4.0]).unwrap();
        let t: Vec<Complex64> = (1..=3).map(|l| c.t(l)).collect();
        assert!(zeta_gen(&t, 3).norm() > 1e-3);
        assert!(zeta_gen(&t, 1).norm() == 0.0);
    }

    #[test]
    fn ngon_drift_vanishes() {
        for n in 2..=30 {
            assert!(ngon_drift_max(n) < 1e-11 * n as f64, "n = {n}");
        }
    }

    #[test]
    fn gamma_random() {
        let mut rng = replica_rng(44, 0);
        for r in 0..60 {
            let n = 1 + r % 40;
            let m = 1 + r % 6;
            let c = Configuration::random(n, &mut rng).unwrap();
            let rep = gamma_identities(&c, m).unwrap();
            assert!(rep.max_residual < 1e-9, "{rep:?}");
        }
    }

    #[test]
    fn displayed_diagonal_is_off() {
        let c = Configuration::new(vec![0.2, 1.0, 2.5]).unwrap();
        let rep = gamma_identities(&c, 2).unwrap();
        assert!(rep.displayed_diagonal_residual > 1e-3);
        assert!(rep.corrected_diagonal_residual < 1e-12);
    }

    #[test]
    fn ngon_diagonal() {
        let n = 11;
        let c = Configuration::regular_ngon(n, 0.4).unwrap();
        let g = gamma_from_gradients(&c, 5);
        for k in 1..=5 {
            assert!((g[2 * k - 2][2 * k - 2] - (n * k) as f64).abs() < 1e-10);
            assert!((g[2 * k - 1][2 * k - 1] - (n * k) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn single_point() {
        let th = 0.77f64;
        let c = Configuration::new(vec![th]).unwrap();
        let g = gamma_from_gradients(&c, 1);
        assert!((g[0][0] - 2.0 * th.sin().powi(2)).abs() < 1e-15);
        // 2 sin²θ = 1 − cos 2θ
        assert!((g[0][0] - (1.0 - (2.0 * th).cos())).abs() < 1e-14);
    }
}
