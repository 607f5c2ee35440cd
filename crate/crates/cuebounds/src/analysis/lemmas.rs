use std::f64::consts::{E, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::MarginCheck;
use crate::error::{domain, Result};
use crate::montecarlo::haar::mc_moments;
use crate::montecarlo::{power_traces, replica_rng, Configuration, TraceSample};
use crate::spectral::laplace_transform;
use crate::trigpoly::{TrigPoly, XiVector};

const LEVELSET_GRID: usize = 1 << 18;

/// μ{|f| ≤ λ} by counting on the grids of 2¹⁷ and 2¹⁸ points, combined by
/// one Richardson step.
///
/// Each crossing of |f| = λ contributes a counting error of at most one
/// point per grid, so the result is within 4c/2¹⁸ of the true measure for
/// c crossings.
pub fn levelset_measure(f: &TrigPoly, lambda: f64) -> f64 {
    grid_measure(&f.eval_grid(LEVELSET_GRID), lambda)
}

fn grid_measure(v: &[f64], lambda: f64) -> f64 {
    let count = |step: usize| v.iter().step_by(step).filter(|x| x.abs() <= lambda).count() as f64;
    let fine = count(1) / v.len() as f64;
    let coarse = count(2) / v.len().div_ceil(2) as f64;
    (2.0 * fine - coarse).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelsetRow {
    pub lambda: f64,
    pub measure: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelsetReport {
    /// Largest k with a nonzero coefficient.
    pub degree: usize,
    pub l2_norm: f64,
    pub rows: Vec<LevelsetRow>,
    pub min_margin: f64,
}

/// Margins of μ{|f| ≤ λ} ≤ 2e(λ/(√2‖f‖_{L²}))^{1/(2m)} over `lambdas`.
pub fn levelset_check(f: &TrigPoly, lambdas: &[f64]) -> Result<LevelsetReport> {
    let degree = match f.zeta().iter().rposition(|z| z.norm() > 0.0) {
        Some(i) => i + 1,
        None => return domain("level sets of the zero polynomial"),
    };
    let l2_norm = f.zeta().iter().enumerate().map(|(i, z)| z.norm_sqr() / (i + 1) as f64).sum::<f64>().sqrt();
    let v = f.eval_grid(LEVELSET_GRID);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !(lambda > 0.0) {
            return domain(format!("λ must be positive, got {lambda}"));
        }
        let measure = grid_measure(&v, lambda);
        let bound = 2.0 * E * (lambda / (2f64.sqrt() * l2_norm)).powf(1.0 / (2.0 * degree as f64));
        rows.push(LevelsetRow { lambda, measure, bound, margin: bound - measure });
    }
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(LevelsetReport { degree, l2_norm, rows, min_margin })
}

/// ln sinh x for x > 0.
fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp()).ln_1p() - 2f64.ln()
}

/// ln(1 + (sinh x/y)²) ≤ (x/y)² over y ∈ (0, 1] (200 points) and x ∈ [0, 20]
/// (401 points), with margins in the log domain.
pub fn unibound_grid() -> MarginCheck {
    let mut c = MarginCheck::new("unibound");
    for j in 1..=200 {
        let y = j as f64 / 200.0;
        for i in 0..=400 {
            let x = 20.0 * i as f64 / 400.0;
            let rhs = (x / y).powi(2);
            let lhs = if x == 0.0 {
                0.0
            } else {
                let ln_s = ln_sinh(x) - y.ln();
                if ln_s < 300.0 {
                    (2.0 * ln_s).exp().ln_1p()
                } else {
                    2.0 * ln_s
                }
            };
            c.record(rhs - lhs, rhs.max(1.0), false, || format!("x={x} y={y}"));
        }
    }
    c
}

/// Σ_{i<j} ln|e^{iθ_i} − e^{iθ_j}|².
pub fn ln_vandermonde(config: &Configuration) -> f64 {
    let t = config.angles();
    let mut s = 0.0;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            s += 2.0 * (2.0 * (0.5 * (t[i] - t[j])).sin().abs()).ln();
        }
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct VandermondeReport {
    pub n_max: usize,
    /// max_n |∏/nⁿ − 1| at the regular n-gon.
    pub max_rel_err: f64,
    pub perturbed: usize,
    pub perturbed_below: usize,
    /// Largest ∏/nⁿ among the perturbed configurations.
    pub max_perturbed_ratio: f64,
    pub passed: bool,
}

/// The regular n-gon gives nⁿ for n ≤ `n_max`; random perturbations of it
/// land strictly below.
pub fn vandermonde_check(n_max: usize, perturbations: usize, seed: u64) -> Result<VandermondeReport> {
    if n_max < 2 {
        return domain("n_max must be at least 2");
    }
    let mut max_rel_err: f64 = 0.0;
    for n in 1..=n_max {
        let c = Configuration::regular_ngon(n, 0.3)?;
        let r = (ln_vandermonde(&c) - n as f64 * (n as f64).ln()).exp_m1().abs();
        max_rel_err = max_rel_err.max(r);
    }
    let mut below = 0;
    let mut max_ratio: f64 = 0.0;
    for p in 0..perturbations {
        let mut rng = replica_rng(seed, p as u64);
        let n = rng.random_range(2..=n_max);
        let amp = rng.random_range(0.01..0.3) * TAU / n as f64;
        let phase = rng.random_range(0.0..TAU);
        let theta: Vec<f64> =
            (0..n).map(|j| phase + TAU * j as f64 / n as f64 + amp * rng.random_range(-1.0..1.0)).collect();
        let c = Configuration::new(theta)?;
        let ratio = (ln_vandermonde(&c) - n as f64 * (n as f64).ln()).exp();
        max_ratio = max_ratio.max(ratio);
        if ratio < 1.0 {
            below += 1;
        }
    }
    let passed = max_rel_err < 1e-9 && below == perturbations;
    Ok(VandermondeReport {
        n_max,
        max_rel_err,
        perturbed: perturbations,
        perturbed_below: below,
        max_perturbed_ratio: max_ratio,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Term5Report {
    pub n: usize,
    pub reps: usize,
    /// Monte Carlo mean of e^{−Tr f(U)}.
    pub mc: f64,
    pub se: f64,
    /// Toeplitz value of E_n[e^{−Tr f}].
    pub exact: f64,
    /// eⁿ/√(2πn) (∫ e^{−f} dθ/2π)ⁿ.
    pub rhs: f64,
    pub pass: bool,
}

/// E_n[e^{−Σ f(θ_j)}] ≤ eⁿ/√(2πn)(∫e^{−f}dμ)ⁿ by Monte Carlo and by the
/// Toeplitz determinant.
pub fn term5_check(f: &TrigPoly, n: usize, reps: usize, seed: u64) -> Result<Term5Report> {
    if n == 0 || reps < 2 {
        return domain("need n >= 1 and reps >= 2");
    }
    let grid = 4096;
    let mean = f.eval_grid(grid).iter().map(|v| (-v).exp()).sum::<f64>() / grid as f64;
    let nf = n as f64;
    let rhs = (nf - 0.5 * (TAU * nf).ln() + nf * mean.ln()).exp();
    let zeta: Vec<Complex64> = f.zeta().to_vec();
    let m = zeta.len();
    let acc = mc_moments(n, reps, seed, 1, |u, o| {
        let t = TraceSample::from_power_traces(n, &power_traces(u, m));
        let tr: f64 = zeta.iter().zip(&t.traces).map(|(z, tk)| (z * tk).re).sum();
        o[0] = (-tr).exp();
    })?;
    let (mc, se) = (acc.mean[0], acc.se()[0]);
    let exact = laplace_transform(&f.scaled(-1.0), n)?.value.to_real();
    Ok(Term5Report { n, reps, mc, se, exact, rhs, pass: mc - 5.0 * se <= rhs && exact <= rhs })
}

#[derive(Clone, Debug, Serialize)]
pub struct MiscReport {
    pub unibound: MarginCheck,
    pub vandermonde: VandermondeReport,
    pub term5: Term5Report,
    pub passed: bool,
}

pub fn misc_lemma_suite(seed: u64) -> Result<MiscReport> {
    let unibound = unibound_grid();
    let vandermonde = vandermonde_check(30, 200, seed)?;
    let f = crate::trigpoly::poly_from_xi(&XiVector::new(vec![0.6, -0.3, 0.4, 0.2])?);
    let term5 = term5_check(&f, 8, 10_000, seed.wrapping_add(1))?;
    let passed = unibound.passed && vandermonde.passed && term5.pass;
    Ok(MiscReport { unibound, vandermonde, term5, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::poly_from_xi;
    use std::f64::consts::PI;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};

    #[test]
    fn cosine_arcsin_oracle() {
        let f = poly_from_xi(&XiVector::new(vec![0.5f64.sqrt(), 0.0]).unwrap());
        assert!((f.eval(0.4) - 0.4f64.cos()).abs() < 1e-15);
        let exact = 2.0 / PI * 0.1f64.asin();
        // four crossings
        let err = (levelset_measure(&f, 0.1) - exact).abs();
        assert!(err <= 16.0 / LEVELSET_GRID as f64, "{err}");
        let r = levelset_check(&f, &[0.1]).unwrap();
        assert!((r.l2_norm - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(r.min_margin >= 0.0);
    }

    #[test]
    fn lambda_above_sup() {
        let f = poly_from_xi(&XiVector::new(vec![0.3, 0.2, -0.5, 0.1]).unwrap());
        let s = f.sup_norm(0, 4096);
        let r = levelset_check(&f, &[1.01 * s]).unwrap();
        assert_eq!(r.rows[0].measure, 1.0);
        assert!(r.rows[0].bound >= 1.0);
    }

    #[test]
    fn zero_polynomial_rejected() {
        let f = TrigPoly::zero(3).unwrap();
        assert!(levelset_check(&f, &[0.1]).is_err());
    }

    #[test]
    fn random_polynomials() {
        let lambdas: Vec<f64> = (0..10).map(|j| 10f64.powf(-4.0 + 0.5 * j as f64)).collect();
        for s in 0..100u64 {
            let mut rng = replica_rng(21, s);
            let m = rng.random_range(1..=6);
            let xi = XiVector::new((0..2 * m).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
            let r = levelset_check(&poly_from_xi(&xi), &lambdas).unwrap();
            assert!(r.min_margin >= 0.0, "seed {s}: {r:?}");
        }
    }

    #[test]
    fn unibound_holds() {
        let c = unibound_grid();
        assert!(c.passed, "{c:?}");
        assert_eq!(c.checked, 200 * 401);
        // y = 1: 1 + sinh²x = cosh²x ≤ min(e^{2x}, e^{x²}) for x ≥ 2
        for x in [0.5f64, 2.0, 7.0] {
            assert!(x.cosh().powi(2) <= (2.0 * x).exp());
            assert!(x.cosh().powi(2) <= (x * x).exp());
        }
    }

    #[test]
    fn square_is_256() {
        let c = Configuration::regular_ngon(4, 0.0).unwrap();
        let direct: f64 = {
            let t = c.angles();
            let mut p = 1.0;
            for i in 0..4 {
                for j in i + 1..4 {
                    p *= (Complex64::from_polar(1.0, t[i]) - Complex64::from_polar(1.0, t[j])).norm_sqr();
                }
            }
            p
        };
        assert!((direct - 256.0).abs() < 1e-11);
        assert!((ln_vandermonde(&c).exp() - 256.0).abs() < 1e-10);
    }

    #[test]
    fn vandermonde_report() {
        let r = vandermonde_check(30, 200, 5).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.max_perturbed_ratio < 1.0);
    }

    #[test]
    fn term5_both_routes() {
        let f = poly_from_xi(&XiVector::new(vec![0.6, -0.3, 0.4, 0.2]).unwrap());
        let r = term5_check(&f, 6, 4000, 2).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.mc - r.exact).abs() < 5.0 * r.se, "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn ngon_is_rotation_invariant(n in 2usize..30, phase in 0.0f64..TAU) {
            let c = Configuration::regular_ngon(n, phase).unwrap();
            let r = (ln_vandermonde(&c) - n as f64 * (n as f64).ln()).abs();
            prop_assert!(r < 1e-10);
        }
    }
}
