use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn is_finite_value(&self) -> bool;
    fn dist(&self, other: &Self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub error_estimate: f64,
}

/// Nodes and weights of the `order`-point rule on [−1, 1].
pub fn gauss_legendre_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn composite<T: Integrand>(
    f: &mut impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    panels: usize,
    rule: &(Vec<f64>, Vec<f64>),
) -> Result<T> {
    let h = (b - a) / panels as f64;
    let mut total = T::zero();
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = T::zero();
        for (x, w) in rule.0.iter().zip(&rule.1) {
            let t = mid + 0.5 * h * x;
            let v = f(t);
            if !v.is_finite_value() {
                return Err(Error::Numerical(format!("non-finite integrand at {t}")));
            }
            s = s + v * *w;
        }
        total = total + s * (0.5 * h);
    }
    Ok(total)
}

/// Composite Gauss–Legendre on [a, b]. The estimate uses `2·panels`; the
/// error is its distance from the `panels` result.
pub fn quad_gl<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> Result<QuadEstimate<T>> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return domain(format!("bad interval [{a}, {b}]"));
    }
    if panels == 0 || order == 0 {
        return domain("panels and order must be positive");
    }
    let rule = gauss_legendre_rule(order);
    let coarse = composite(&mut f, a, b, panels, &rule)?;
    let fine = composite(&mut f, a, b, 2 * panels, &rule)?;
    Ok(QuadEstimate { value: fine, error_estimate: fine.dist(&coarse) })
}
