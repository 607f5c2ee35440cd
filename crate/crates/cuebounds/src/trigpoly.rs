//! The trigonometric polynomial g built from ξ ∈ R^{2m}, its conjugate h,
//! Fourier data, norms and the A-functional.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// ξ ∈ R^{2m}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiVector {
    m: usize,
    xi: Vec<f64>,
}

impl XiVector {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if xi.is_empty() || xi.len() % 2 != 0 {
            return domain(format!("xi needs 2m > 0 coordinates, got {}", xi.len()));
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return domain("xi has a non-finite coordinate");
        }
        Ok(XiVector { m: xi.len() / 2, xi })
    }

    pub fn zeros(m: usize) -> Result<Self> {
        Self::new(vec![0.0; 2 * m])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coords(&self) -> &[f64] {
        &self.xi
    }

    pub fn norm_sq(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> XiVector {
        XiVector { m: self.m, xi: self.xi.iter().map(|v| v * s).collect() }
    }

    /// ζ_k = ξ_{2k−1} − iξ_{2k}.
    pub fn zeta(&self) -> Vec<Complex64> {
        self.xi.chunks(2).map(|p| c(p[0], -p[1])).collect()
    }

    pub fn from_zeta(zeta: &[Complex64]) -> Result<Self> {
        Self::new(zeta.iter().flat_map(|z| [z.re, -z.im]).collect())
    }
}

/// g(θ) = Σ_{0<|k|≤m} ζ_k e^{ikθ}/√(2|k|) with ζ_{−k} = conj ζ_k.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    zeta: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HilbertPair {
    pub g: TrigPoly,
    pub h: TrigPoly,
}

/// Coefficient-sum data of a polynomial. Index κ is the derivative order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Norms {
    pub h_half_sq: f64,
    /// ‖p^{(κ)}‖²_{L²}, κ = 0..3.
    pub l2_sq_of_derivative: [f64; 4],
    /// Σ_{k≠0} |k|^κ |p̂_k|, the sharp coefficient bound on ‖p^{(κ)}‖_∞.
    pub coefficient_sums: [f64; 4],
    /// Closed-form bounds on ‖p^{(κ)}‖_∞ in terms of ‖ξ‖ and m.
    pub sup_bounds: [f64; 4],
}

pub fn poly_from_xi(xi: &XiVector) -> TrigPoly {
    TrigPoly { zeta: xi.zeta() }
}

impl TrigPoly {
    pub fn new(zeta: Vec<Complex64>) -> Result<Self> {
        if zeta.is_empty() {
            return domain("degree m must be at least 1");
        }
        Ok(TrigPoly { zeta })
    }

    pub fn zero(m: usize) -> Result<Self> {
        Self::new(vec![c(0.0, 0.0); m])
    }

    pub fn m(&self) -> usize {
        self.zeta.len()
    }

    pub fn zeta(&self) -> &[Complex64] {
        &self.zeta
    }

    pub fn to_xi(&self) -> XiVector {
        XiVector::from_zeta(&self.zeta).expect("finite coefficients")
    }

    /// ĝ_k for any integer k.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let a = k.unsigned_abs() as usize;
        if a == 0 || a > self.m() {
            return c(0.0, 0.0);
        }
        let v = self.zeta[a - 1] / (2.0 * a as f64).sqrt();
        if k > 0 {
            v
        } else {
            v.conj()
        }
    }

    pub fn scaled(&self, s: f64) -> TrigPoly {
        TrigPoly { zeta: self.zeta.iter().map(|z| z * s).collect() }
    }

    /// The polynomial θ ↦ p(θ + φ), i.e. ζ_k → ζ_k e^{ikφ}.
    pub fn rotated(&self, phi: f64) -> TrigPoly {
        let zeta = self
            .zeta
            .iter()
            .enumerate()
            .map(|(i, z)| z * Complex64::from_polar(1.0, (i + 1) as f64 * phi))
            .collect();
        TrigPoly { zeta }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let step = Complex64::from_polar(1.0, theta);
        let mut e = step;
        let mut s = 0.0;
        for k in 1..=self.m() {
            s += 2.0 * (self.coeff(k as i64) * e).re;
            e *= step;
        }
        s
    }

    /// p^{(order)}(z) for complex z, from the analytic continuation of the
    /// Fourier sum.
    pub fn eval_analytic(&self, z: Complex64, order: u32) -> Result<Complex64> {
        if order > 3 {
            return domain(format!("derivative order {order} > 3"));
        }
        let i = c(0.0, 1.0);
        let mut s = c(0.0, 0.0);
        for k in 1..=self.m() {
            let kf = k as f64;
            let a = self.coeff(k as i64);
            let up = (i * kf).powu(order) * a * (i * kf * z).exp();
            let down = (-i * kf).powu(order) * a.conj() * (-i * kf * z).exp();
            s += up + down;
        }
        Ok(s)
    }

    /// Real derivative p^{(order)}(θ).
    pub fn eval_derivative(&self, theta: f64, order: u32) -> f64 {
        let step = Complex64::from_polar(1.0, theta);
        let mut e = step;
        let mut s = 0.0;
        let i = c(0.0, 1.0);
        for k in 1..=self.m() {
            let kf = k as f64;
            s += 2.0 * ((i * kf).powu(order) * self.coeff(k as i64) * e).re;
            e *= step;
        }
        s
    }

    /// Values at θ_j = 2πj/points.
    pub fn eval_grid(&self, points: usize) -> Vec<f64> {
        (0..points).map(|j| self.eval(2.0 * std::f64::consts::PI * j as f64 / points as f64)).collect()
    }

    /// max |p^{(order)}| on a uniform grid, refined by Newton steps on
    /// p^{(order+1)} from the grid argmax.
    pub fn sup_norm(&self, order: u32, points: usize) -> f64 {
        let tp = 2.0 * std::f64::consts::PI;
        let (mut best_t, mut best) = (0.0, -1.0);
        for j in 0..points {
            let t = tp * j as f64 / points as f64;
            let v = self.eval_derivative(t, order).abs();
            if v > best {
                best = v;
                best_t = t;
            }
        }
        if order < 2 {
            let mut t = best_t;
            for _ in 0..3 {
                let d1 = self.eval_derivative(t, order + 1);
                let d2 = self.eval_derivative(t, order + 2);
                if d2 == 0.0 {
                    break;
                }
                t -= d1 / d2;
            }
            best = best.max(self.eval_derivative(t, order).abs());
        }
        best
    }
}

/// The conjugate polynomial h with ĥ_k = i·sgn(k)·ĝ_k, so that h = −𝒰g and
/// ∫ g′h dθ/2π = ‖h‖²_{H^{1/2}} = ‖ξ‖².
pub fn hilbert_transform(p: &TrigPoly) -> HilbertPair {
    let h = TrigPoly { zeta: p.zeta.iter().map(|z| z * c(0.0, 1.0)).collect() };
    HilbertPair { g: p.clone(), h }
}

/// A(s·p) = s² Σ_{k≥1} k p̂_k p̂_{−k}.
pub fn a_functional(p: &TrigPoly, scalar: Complex64) -> Complex64 {
    let s: f64 = (1..=p.m()).map(|k| k as f64 * p.coeff(k as i64).norm_sqr()).sum();
    scalar * scalar * s
}

pub fn norms(p: &TrigPoly) -> Norms {
    let m = p.m();
    let mf = m as f64;
    let z2: Vec<f64> = p.zeta.iter().map(|z| z.norm_sqr()).collect();
    let xi_norm = z2.iter().sum::<f64>().sqrt();
    let mut l2 = [0.0; 4];
    let mut sums = [0.0; 4];
    for kappa in 0..4 {
        for (i, (a, z)) in z2.iter().zip(&p.zeta).enumerate() {
            let k = (i + 1) as f64;
            l2[kappa] += k.powi(2 * kappa as i32 - 1) * a;
            sums[kappa] += (2.0 * k).sqrt() * k.powi(kappa as i32 - 1) * z.norm();
        }
    }
    let mm1 = mf * (mf + 1.0);
    let sup_bounds = [
        (2.0 * (1.0 + mf.ln())).sqrt() * xi_norm,
        mm1.sqrt() * xi_norm,
        mm1 / 2f64.sqrt() * xi_norm,
        mm1.powf(1.5) / 3f64.sqrt() * xi_norm,
    ];
    Norms { h_half_sq: z2.iter().sum(), l2_sq_of_derivative: l2, coefficient_sums: sums, sup_bounds }
}
