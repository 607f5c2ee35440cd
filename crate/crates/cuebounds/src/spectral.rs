//! Exact finite-n quantities: Fourier coefficients of e^f, Toeplitz
//! determinants, the characteristic function F_{n,m}(ξ), Laplace transforms,
//! Hankel truncations and the Borodin–Okounkov Fredholm determinant.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, inapplicable, Error, Result};
use crate::numerics::{fft_in_place, ln_factorial, ln_gamma, lu_det, ComplexLogDet, ComplexMatrix, Direction, LogReal};
use crate::trigpoly::{a_functional, hilbert_transform, poly_from_xi, TrigPoly, XiVector};

const GRID_START: usize = 1 << 10;
const GRID_MAX: usize = 1 << 18;
const COEFF_TOL: f64 = 1e-13;
const BO_TOL: f64 = 1e-12;
const BO_MAX_DOUBLINGS: usize = 6;

/// Fourier coefficients ŵ_k, |k| ≤ J, of a symbol on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolCoeffs {
    half_width: usize,
    coeffs: Vec<Complex64>,
    /// Upper bound on Σ_{|k|>J} |ŵ_k|.
    pub tail_bound: f64,
    /// Grid size that met the convergence test.
    pub grid: usize,
}

impl SymbolCoeffs {
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let j = self.half_width as i64;
        if k.abs() > j {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + j) as usize]
        }
    }

    /// Coefficients of w ≡ 1.
    pub fn constant_one(half_width: usize) -> SymbolCoeffs {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * half_width + 1];
        coeffs[half_width] = Complex64::new(1.0, 0.0);
        SymbolCoeffs { half_width, coeffs, tail_bound: 0.0, grid: 0 }
    }

    /// Samples `w` on grids of 2^10 or more points, doubling until every
    /// reported coefficient moves by less than 10⁻¹³ relative to the largest.
    pub fn from_samples(w: impl Fn(f64) -> Complex64, half_width: usize, tail_bound: f64) -> Result<SymbolCoeffs> {
        if half_width < 1 {
            return domain("half width J must be at least 1");
        }
        let mut grid = GRID_START.max((4 * half_width + 4).next_power_of_two());
        if grid > GRID_MAX {
            return domain(format!("J = {half_width} exceeds the largest grid {GRID_MAX}"));
        }
        let mut prev = sample_coeffs(&w, half_width, grid)?;
        while grid < GRID_MAX {
            grid *= 2;
            let next = sample_coeffs(&w, half_width, grid)?;
            let scale = next.iter().map(|z| z.norm()).fold(1.0, f64::max);
            let moved = next.iter().zip(&prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prev = next;
            if moved < COEFF_TOL * scale {
                return Ok(SymbolCoeffs { half_width, coeffs: prev, tail_bound, grid });
            }
        }
        Err(Error::Convergence(format!("symbol coefficients not stable at grid {GRID_MAX}")))
    }

    /// Coefficients of e^{s·p} with the Wiener-norm tail bound
    /// Σ_{|k|>J}|ŵ_k| ≤ Σ_{j>⌊J/m⌋} a^j/j!, a = |s|·Σ_k|p̂_k|.
    pub fn of_exp(p: &TrigPoly, scale: Complex64, half_width: usize) -> Result<SymbolCoeffs> {
        let a = scale.norm() * (1..=p.m()).map(|k| 2.0 * p.coeff(k as i64).norm()).sum::<f64>();
        let tail = exp_series_tail(a, half_width / p.m());
        Self::from_samples(|t| (scale * p.eval(t)).exp(), half_width, tail)
    }
}

fn sample_coeffs(w: &impl Fn(f64) -> Complex64, half_width: usize, grid: usize) -> Result<Vec<Complex64>> {
    let tp = 2.0 * std::f64::consts::PI;
    let mut buf: Vec<Complex64> = (0..grid).map(|j| w(tp * j as f64 / grid as f64)).collect();
    if buf.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite symbol sample".into()));
    }
    fft_in_place(&mut buf, Direction::Forward)?;
    let inv = 1.0 / grid as f64;
    let j = half_width as i64;
    Ok((-j..=j).map(|k| buf[k.rem_euclid(grid as i64) as usize] * inv).collect())
}

/// Σ_{j>M} a^j/j!.
fn exp_series_tail(a: f64, big_m: usize) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut j = big_m as u64 + 1;
    loop {
        let ln_t = j as f64 * a.ln() - ln_factorial(j);
        let t = ln_t.exp();
        total += t;
        if (j as f64 > a && t < 1e-18 * total.max(1e-300)) || j > big_m as u64 + 100_000 {
            break;
        }
        j += 1;
    }
    total
}

/// det_{n×n}[ŵ_{i−j}] in log form.
pub fn toeplitz_det(w: &SymbolCoeffs, n: usize) -> Result<ComplexLogDet> {
    if n == 0 {
        return domain("Toeplitz size must be positive");
    }
    if w.half_width + 1 < n {
        return domain(format!("J = {} is too small for n = {n}", w.half_width));
    }
    let m = ComplexMatrix::from_fn(n, n, |i, j| w.get(i as i64 - j as i64));
    lu_det(&m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CharFnMethod {
    Toeplitz,
    BorodinOkounkov,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharFnResult {
    pub value: Complex64,
    pub method: CharFnMethod,
    /// Coefficient half width (Toeplitz) or Hankel truncation size (BO).
    pub truncation: usize,
    /// |Toeplitz − BO| when both routes were run.
    pub residual: Option<f64>,
}

/// F_{n,m}(ξ) = E_n[e^{i Tr g(U)}] as a Toeplitz determinant of e^{ig}.
pub fn char_fn(xi: &XiVector, n: usize) -> Result<CharFnResult> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let p = poly_from_xi(xi);
    let j = (n - 1).max(1);
    let w = SymbolCoeffs::of_exp(&p, Complex64::new(0.0, 1.0), j)?;
    let d = toeplitz_det(&w, n)?;
    Ok(CharFnResult { value: d.value(), method: CharFnMethod::Toeplitz, truncation: j, residual: None })
}

/// Both routes; the returned value is the Toeplitz one.
pub fn char_fn_both(xi: &XiVector, n: usize) -> Result<(CharFnResult, CharFnResult)> {
    let mut t = char_fn(xi, n)?;
    let mut b = bo_det(xi, n, n + 32)?;
    let r = (t.value - b.value).norm();
    t.residual = Some(r);
    b.residual = Some(r);
    Ok((t, b))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplaceResult {
    /// E_n[e^{Tr f}].
    pub value: LogReal,
    /// exp(n f̂₀ + A(f)); f̂₀ = 0 for the polynomials used here.
    pub bound: LogReal,
    /// |Im| of the determinant relative to its modulus.
    pub imag_rel: f64,
}

/// E_n[e^{Tr f}] for real f, with the Szegő-type upper bound.
pub fn laplace_transform(f: &TrigPoly, n: usize) -> Result<LaplaceResult> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let w = SymbolCoeffs::of_exp(f, Complex64::new(1.0, 0.0), (n - 1).max(1))?;
    let d = toeplitz_det(&w, n)?;
    if d.is_zero() || d.phase.re <= 0.0 {
        return Err(Error::Numerical("Toeplitz determinant of a positive symbol is not positive".into()));
    }
    let a = a_functional(f, Complex64::new(1.0, 0.0)).re;
    Ok(LaplaceResult { value: d.magnitude(), bound: LogReal::from_ln(a), imag_rel: d.phase.im.abs() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HankelSide {
    Plus,
    Minus,
}

/// T×T truncation with 1-based entry (j,k) equal to ŵ_{j+k−1} (plus side)
/// or ŵ_{−(j+k−1)} (minus side).
pub fn hankel_truncation(w: &SymbolCoeffs, side: HankelSide, t: usize) -> Result<ComplexMatrix> {
    if t == 0 || w.half_width + 1 < 2 * t {
        return domain(format!("J = {} is too small for T = {t}", w.half_width));
    }
    let s = match side {
        HankelSide::Plus => 1,
        HankelSide::Minus => -1,
    };
    Ok(ComplexMatrix::from_fn(t, t, |j, k| w.get(s * (j + k + 1) as i64)))
}

/// 𝒰g = 2 Im g⁺, the conjugate function of g.
fn conjugate_of(p: &TrigPoly) -> TrigPoly {
    hilbert_transform(p).h.scaled(-1.0)
}

/// det[I − K Q_n] at truncation T, with K = H₊(e^{2Im g⁺}) H₋(e^{−2Im g⁺})
/// and Q_n zeroing the first n coordinates.
pub fn fredholm_det(xi: &XiVector, n: usize, t: usize) -> Result<Complex64> {
    let u = conjugate_of(&poly_from_xi(xi));
    let j = 2 * t - 1;
    let plus = SymbolCoeffs::of_exp(&u, Complex64::new(1.0, 0.0), j)?;
    let minus = SymbolCoeffs::of_exp(&u, Complex64::new(-1.0, 0.0), j)?;
    let k = hankel_truncation(&plus, HankelSide::Plus, t)?.matmul(&hankel_truncation(&minus, HankelSide::Minus, t)?);
    let mut a = ComplexMatrix::identity(t);
    for r in 0..t {
        for c in n.min(t)..t {
            a[(r, c)] -= k[(r, c)];
        }
    }
    Ok(lu_det(&a)?.value())
}

/// F_{n,m}(ξ) = e^{−‖ξ‖²/2} det[I − K Q_n], doubling T from `t` until the
/// determinant moves by less than 10⁻¹².
pub fn bo_det(xi: &XiVector, n: usize, t: usize) -> Result<CharFnResult> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    if t < n {
        return domain(format!("truncation T = {t} is below n = {n}"));
    }
    let pref = (-xi.norm_sq() / 2.0).exp();
    let mut t = t;
    let mut prev = fredholm_det(xi, n, t)?;
    for _ in 0..BO_MAX_DOUBLINGS {
        let t2 = 2 * t;
        let next = fredholm_det(xi, n, t2)?;
        if (next - prev).norm() < BO_TOL {
            return Ok(CharFnResult {
                value: next * pref,
                method: CharFnMethod::BorodinOkounkov,
                truncation: t2,
                residual: None,
            });
        }
        prev = next;
        t = t2;
    }
    Err(Error::Convergence(format!("Fredholm determinant unsettled at T = {t}")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct J1Diagnostics {
    pub rho: f64,
    pub big_n: f64,
    /// 4m² e^{2ρ}/(1−c*²)² · ρ^{2N}/Γ(N+1)², c* = 1/4.
    pub j1_norm_bound: LogReal,
    /// j1·e^{1+j1}, a bound on |1 − det[I − KQ_n]|.
    pub fredholm_gap_bound: LogReal,
    /// c₈ m² e^{2ρ} ρ^{2N}/Γ(N+1)², present when N ≥ 4(ρ ∨ m) and
    /// j1 ≤ log 2.766 − 1 so that it bounds the gap as well.
    pub ga_envelope: Option<LogReal>,
}

pub const C_STAR: f64 = 0.25;

pub fn j1_diagnostics(xi: &XiVector, n: usize) -> Result<J1Diagnostics> {
    let m = xi.m();
    let mf = m as f64;
    let big_n = n as f64 / mf;
    let rho = ((1.0 + mf.ln()) / 2.0).sqrt() * xi.norm();
    if big_n < rho / C_STAR {
        return inapplicable(format!("N = {big_n} < 4ρ = {}", rho / C_STAR));
    }
    let lead = (4.0 * mf * mf / (1.0 - C_STAR * C_STAR).powi(2)).ln() + 2.0 * rho;
    let ln_tail = 2.0 * big_n * rho.ln() - 2.0 * ln_gamma(big_n + 1.0)?;
    let j1 = LogReal::from_ln(lead + ln_tail);
    let jv = j1.to_real();
    let gap = j1 * LogReal::from_ln(1.0 + jv);
    let c8 = 4.0 * 2.766 / (1.0 - C_STAR * C_STAR).powi(2);
    let envelope_ok = big_n >= 4.0 * rho.max(mf) && jv <= 2.766f64.ln() - 1.0;
    let ga_envelope =
        envelope_ok.then(|| LogReal::from_ln((c8 * mf * mf).ln() + 2.0 * rho + ln_tail));
    Ok(J1Diagnostics { rho, big_n, j1_norm_bound: j1, fredholm_gap_bound: gap, ga_envelope })
}

/// min over k of 2e^ρ ρ^{⌈k/m⌉}/⌈k/m⌉! − |(e^{±2Im g⁺})^_k|.
pub fn fcoeff_bound_check(xi: &XiVector, ks: &[usize]) -> Result<f64> {
    let m = xi.m();
    let rho = ((1.0 + (m as f64).ln()) / 2.0).sqrt() * xi.norm();
    if let Some(&bad) = ks.iter().find(|&&k| k as f64 <= 2.0 * m as f64 * rho) {
        return domain(format!("k = {bad} is not above 2mρ = {}", 2.0 * m as f64 * rho));
    }
    let kmax = ks.iter().copied().max().unwrap_or(1).max(1);
    let u = conjugate_of(&poly_from_xi(xi));
    let plus = SymbolCoeffs::of_exp(&u, Complex64::new(1.0, 0.0), kmax)?;
    let minus = SymbolCoeffs::of_exp(&u, Complex64::new(-1.0, 0.0), kmax)?;
    let mut worst = f64::INFINITY;
    for &k in ks {
        let q = k.div_ceil(m) as u64;
        let bound = if rho == 0.0 {
            0.0
        } else {
            (2f64.ln() + rho + q as f64 * rho.ln() - ln_factorial(q)).exp()
        };
        let c = plus.get(k as i64).norm().max(minus.get(k as i64).norm());
        worst = worst.min(bound - c);
    }
    Ok(worst)
}
