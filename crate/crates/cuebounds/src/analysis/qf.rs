use num_complex::Complex64;
use serde::Serialize;

use super::kernel::h_kernel;
use crate::montecarlo::Configuration;
use crate::numerics::ComplexMatrix;
use crate::trigpoly::{hilbert_transform, poly_from_xi, XiVector};

/// The matrices of Σ_{i,j} H(θ_i, θ_j) = ½ Re{Σ A_{pq}T_pT_q + Σ B_{pq}T_pT_q}
/// with raw power sums T_p = Σ_j e^{ipθ_j}, T_0 = n, T_{−p} = conj T_p.
///
/// A is indexed by p, q ∈ 1..=2m−1 and B by p, q ∈ −(m−1)..=m−1, the latter
/// including the border row and column p = 0 or q = 0.
#[derive(Clone, Debug)]
pub struct QuadraticFormData {
    pub m: usize,
    a: ComplexMatrix,
    b: ComplexMatrix,
}

fn zeta_at(zeta: &[Complex64], j: i64) -> Complex64 {
    match j {
        j if j > 0 => zeta[j as usize - 1],
        j if j < 0 => zeta[(-j) as usize - 1].conj(),
        _ => Complex64::new(0.0, 0.0),
    }
}

fn within(lo: i64, a: i64, b: i64, hi: i64) -> bool {
    lo <= a && a <= b && b <= hi
}

impl QuadraticFormData {
    pub fn new(xi: &XiVector) -> Self {
        let m = xi.m();
        let mi = m as i64;
        let zeta = &xi.zeta();
        let d = 2 * m - 1;
        let mut a = ComplexMatrix::zeros(d, d);
        let mut b = ComplexMatrix::zeros(d, d);
        for l in 1..=mi {
            for k in 1..=l {
                for p in 1..=2 * mi - 1 {
                    for q in 1..=2 * mi - 1 {
                        let s = p + q - l;
                        let hits = within(1, p - k + 1, s, mi) as u8 + within(1, q - k + 1, s, mi) as u8;
                        if hits > 0 {
                            let w = zeta_at(zeta, l) * zeta_at(zeta, s) / ((l * s) as f64).sqrt();
                            a[((p - 1) as usize, (q - 1) as usize)] += w * hits as f64;
                        }
                    }
                }
                for p in -(mi - 1)..=mi - 1 {
                    for q in -(mi - 1)..=mi - 1 {
                        let s = l - p - q;
                        let hits = within(1, k - p, s, mi) as u8 + within(1, k - q, s, mi) as u8;
                        if hits > 0 {
                            let w = zeta_at(zeta, l) * zeta_at(zeta, -s) / ((l * s) as f64).sqrt();
                            b[((p + mi - 1) as usize, (q + mi - 1) as usize)] += w * hits as f64;
                        }
                    }
                }
            }
        }
        QuadraticFormData { m, a, b }
    }

    /// A_{pq}, zero outside 1 ≤ p, q ≤ 2m−1.
    pub fn a(&self, p: i64, q: i64) -> Complex64 {
        let d = 2 * self.m as i64 - 1;
        if (1..=d).contains(&p) && (1..=d).contains(&q) {
            self.a[((p - 1) as usize, (q - 1) as usize)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// B_{pq}, zero outside |p|, |q| ≤ m−1.
    pub fn b(&self, p: i64, q: i64) -> Complex64 {
        let r = self.m as i64 - 1;
        if p.abs() <= r && q.abs() <= r {
            self.b[((p + r) as usize, (q + r) as usize)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// ½ Re{Σ A_{pq}T_pT_q + Σ B_{pq}T_pT_q} for the power sums `t(p)`.
    pub fn evaluate(&self, t: impl Fn(i64) -> Complex64) -> f64 {
        let mi = self.m as i64;
        let mut s = Complex64::new(0.0, 0.0);
        for p in 1..=2 * mi - 1 {
            for q in 1..=2 * mi - 1 {
                s += self.a(p, q) * t(p) * t(q);
            }
        }
        for p in -(mi - 1)..=mi - 1 {
            for q in -(mi - 1)..=mi - 1 {
                s += self.b(p, q) * t(p) * t(q);
            }
        }
        0.5 * s.re
    }

    /// The form evaluated from raw traces Tr U^k, k = 1..=2m−1, of an n×n matrix.
    pub fn evaluate_traces(&self, n: usize, raw: &[Complex64]) -> f64 {
        self.evaluate(|p| match p {
            0 => Complex64::new(n as f64, 0.0),
            p if p > 0 => raw[p as usize - 1],
            p => raw[(-p) as usize - 1].conj(),
        })
    }
}

/// (Σ_{i,j} H(θ_i, θ_j), quadratic form in the power sums).
pub fn qf_identity_sides(config: &Configuration, xi: &XiVector) -> (f64, f64) {
    let pair = hilbert_transform(&poly_from_xi(xi));
    let th = config.angles();
    let mut lhs = 0.0;
    for &a in th {
        for &b in th {
            lhs += h_kernel(&pair, a, b);
        }
    }
    let qf = QuadraticFormData::new(xi);
    let rhs = qf.evaluate(|p| config.power_sum(p));
    (lhs, rhs)
}

pub fn qf_identity_residual(config: &Configuration, xi: &XiVector) -> f64 {
    let (l, r) = qf_identity_sides(config, xi);
    (l - r).abs()
}

#[derive(Clone, Debug, Serialize)]
pub struct BorderReport {
    pub m: usize,
    pub b00: f64,
    /// |B₀₀ − 2‖ξ‖²|, including the imaginary part.
    pub b00_residual: f64,
    /// Σ_{0<p<m} p|B_{p0} + conj B_{−p0}|².
    pub border_sum: f64,
    /// (4m³/3)‖ξ‖⁴.
    pub border_bound: f64,
    pub border_margin: f64,
    /// max_p Σ_q |A_{pq}| over 1 ≤ p, q ≤ 2m−1.
    pub a_norm: f64,
    /// max_{1≤|p|<m} Σ_{1≤|q|<m} |B_{pq}|.
    pub b_norm: f64,
    /// √(2m(m+1)(1+log m))‖ξ‖².
    pub matnorm_bound: f64,
    pub a_margin: f64,
    pub b_margin: f64,
}

pub fn b_border_checks(xi: &XiVector) -> BorderReport {
    let qf = QuadraticFormData::new(xi);
    let m = xi.m();
    let mi = m as i64;
    let mf = m as f64;
    let n2 = xi.norm_sq();
    let b00 = qf.b(0, 0);
    let border_sum: f64 =
        (1..mi).map(|p| p as f64 * (qf.b(p, 0) + qf.b(-p, 0).conj()).norm_sqr()).sum();
    let border_bound = 4.0 * mf.powi(3) / 3.0 * n2 * n2;
    let a_norm = (1..2 * mi)
        .map(|p| (1..2 * mi).map(|q| qf.a(p, q).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let nonzero = || (-(mi - 1)..mi).filter(|&p| p != 0);
    let b_norm = nonzero().map(|p| nonzero().map(|q| qf.b(p, q).norm()).sum::<f64>()).fold(0.0, f64::max);
    let matnorm_bound = (2.0 * mf * (mf + 1.0) * (1.0 + mf.ln())).sqrt() * n2;
    BorderReport {
        m,
        b00: b00.re,
        b00_residual: (b00 - 2.0 * n2).norm(),
        border_sum,
        border_bound,
        border_margin: border_bound - border_sum,
        a_norm,
        b_norm,
        matnorm_bound,
        a_margin: matnorm_bound - a_norm,
        b_margin: matnorm_bound - b_norm,
    }
}
