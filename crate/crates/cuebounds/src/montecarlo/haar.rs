use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::ComplexMatrix;

/// Drift allowed on the highest matrix power formed by `trace_vector`.
pub const DRIFT_TOL: f64 = 1e-8;

/// Independent generator for replica `rep`: one ChaCha20 key per seed, one
/// stream per replica.
pub fn replica_rng(seed: u64, rep: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar unitary from the QR factorisation of a complex Ginibre matrix.
///
/// Classical Gram–Schmidt with one re-orthogonalisation pass. The diagonal of
/// R comes out real and positive, which is the phase fix that makes Q Haar.
pub fn sample_haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    // columns of the Ginibre matrix, orthonormalised in place
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|_| (0..n).map(|_| complex_normal(rng)).collect()).collect();
    for j in 0..n {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        for _pass in 0..2 {
            for q in done.iter() {
                let r: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= r * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Numerical("rank-deficient Gaussian sample".into()));
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]))
}

fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    let (a, b) = (a.as_slice(), b.as_slice());
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += a[i * n + j] * b[j * n + i];
        }
    }
    s
}

/// Tr U^k for k = 1..=kmax, plus ‖(U^p)*(U^p) − I‖_max of the highest power
/// U^p actually formed (p = ⌈kmax/2⌉).
///
/// Powers up to ⌈kmax/2⌉ are formed explicitly; the rest use
/// Tr U^{a+b} = Σ_{ij} (U^a)_{ij}(U^b)_{ji}.
pub fn power_traces_with_drift(u: &ComplexMatrix, kmax: usize) -> (Vec<Complex64>, f64) {
    if kmax == 0 {
        return (Vec::new(), 0.0);
    }
    let half = kmax.div_ceil(2);
    let mut powers = vec![u.clone()];
    for _ in 1..half {
        let next = powers.last().expect("nonempty").matmul(u);
        powers.push(next);
    }
    let drift = powers.last().expect("nonempty").unitarity_residual();
    let mut out = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        if k <= half {
            out.push(powers[k - 1].trace());
        } else {
            let a = half;
            out.push(trace_of_product(&powers[a - 1], &powers[k - a - 1]));
        }
    }
    (out, drift)
}

/// Tr U^k for k = 1..=kmax without the drift check.
pub fn power_traces(u: &ComplexMatrix, kmax: usize) -> Vec<Complex64> {
    power_traces_with_drift(u, kmax).0
}

/// T_k = √(2/k)·Tr U^k for k = 1..=m, so that X_{2k−1} = Re T_k and
/// X_{2k} = Im T_k.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSample {
    pub n: usize,
    pub m: usize,
    pub traces: Vec<Complex64>,
}

impl TraceSample {
    pub fn from_power_traces(n: usize, raw: &[Complex64]) -> TraceSample {
        let traces = raw.iter().enumerate().map(|(i, t)| t * (2.0 / (i + 1) as f64).sqrt()).collect();
        TraceSample { n, m: raw.len(), traces }
    }

    /// The real vector X ∈ R^{2m}.
    pub fn x(&self) -> Vec<f64> {
        self.traces.iter().flat_map(|t| [t.re, t.im]).collect()
    }

    /// T_k, 1-based.
    pub fn t(&self, k: usize) -> Complex64 {
        self.traces[k - 1]
    }
}

pub fn trace_vector(u: &ComplexMatrix, m: usize) -> Result<TraceSample> {
    if u.rows() != u.cols() || u.rows() == 0 {
        return domain(format!("need a nonempty square matrix, got {}x{}", u.rows(), u.cols()));
    }
    if m == 0 {
        return domain("m must be at least 1");
    }
    let (raw, drift) = power_traces_with_drift(u, m);
    if !(drift < DRIFT_TOL) {
        return Err(Error::Numerical(format!("unitarity drift {drift:.3e} exceeds {DRIFT_TOL:e}")));
    }
    Ok(TraceSample::from_power_traces(u.rows(), &raw))
}

/// Trace vectors of `reps` independent Haar samples, in replica order.
pub fn sample_traces(n: usize, m: usize, reps: usize, seed: u64) -> Result<Vec<TraceSample>> {
    if n == 0 || m == 0 {
        return domain("n and m must be at least 1");
    }
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r as u64);
            let u = sample_haar(n, &mut rng)?;
            trace_vector(&u, m)
        })
        .collect()
}

/// Running mean and second central moment of a block of observations.
#[derive(Clone, Debug)]
pub(crate) struct Welford {
    pub count: f64,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl Welford {
    pub fn new(width: usize) -> Self {
        Welford { count: 0.0, mean: vec![0.0; width], m2: vec![0.0; width] }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1.0;
        let c = self.count;
        for ((mu, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *mu;
            *mu += d / c;
            *s += d * (v - *mu);
        }
    }

    pub fn merge(mut self, other: Welford) -> Welford {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let n = self.count + other.count;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * other.count / n;
            self.m2[i] += other.m2[i] + d * d * self.count * other.count / n;
        }
        self.count = n;
        self
    }

    /// Standard error of each mean.
    pub fn se(&self) -> Vec<f64> {
        let n = self.count;
        self.m2.iter().map(|s| if n > 1.0 { (s / (n - 1.0) / n).sqrt() } else { f64::INFINITY }).collect()
    }
}

const BLOCK: usize = 512;

/// Replica-parallel Monte Carlo. `obs` fills a `width`-long observation for
/// one Haar sample; blocks are reduced in index order so the result does not
/// depend on the thread count.
pub(crate) fn mc_moments<F>(n: usize, reps: usize, seed: u64, width: usize, obs: F) -> Result<Welford>
where
    F: Fn(&ComplexMatrix, &mut [f64]) + Sync,
{
    let blocks = reps.div_ceil(BLOCK);
    let parts: Vec<Welford> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = Welford::new(width);
            let mut buf = vec![0.0; width];
            for r in b * BLOCK..((b + 1) * BLOCK).min(reps) {
                let mut rng = replica_rng(seed, r as u64);
                let u = sample_haar(n, &mut rng)?;
                obs(&u, &mut buf);
                acc.push(&buf);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(Welford::new(width), Welford::merge))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unitary_at_64() {
        let mut rng = replica_rng(1, 0);
        let u = sample_haar(64, &mut rng).unwrap();
        assert!(u.unitarity_residual() < 1e-10);
    }

    #[test]
    fn unitary_many_small() {
        for r in 0..200 {
            let u = sample_haar(1 + r % 17, &mut replica_rng(9, r as u64)).unwrap();
            assert!(u.unitarity_residual() < 1e-10);
        }
    }

    #[test]
    fn uniform_phase_n1() {
        let w = mc_moments(1, 100_000, 3, 2, |u, o| {
            o[0] = u[(0, 0)].re;
            o[1] = u[(0, 0)].im;
        })
        .unwrap();
        let se = w.se();
        assert!(w.mean[0].abs() < 5.0 * se[0] && w.mean[1].abs() < 5.0 * se[1]);
        // |u| = 1 exactly
        let u = sample_haar(1, &mut replica_rng(3, 7)).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn second_moment_n8() {
        // E|Tr U|² = min(1, n) = 1
        let w = mc_moments(8, 100_000, 5, 1, |u, o| o[0] = u.trace().norm_sqr()).unwrap();
        assert!((w.mean[0] - 1.0).abs() < 5.0 * w.se()[0], "{} ± {}", w.mean[0], w.se()[0]);
    }

    #[test]
    fn identity_traces() {
        let t = trace_vector(&ComplexMatrix::identity(5), 7).unwrap();
        for k in 1..=7 {
            assert!((t.t(k) - c(5.0 * (2.0 / k as f64).sqrt(), 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn roots_of_unity() {
        let n = 9;
        let u = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, 2.0 * PI * i as f64 / n as f64)
            } else {
                c(0.0, 0.0)
            }
        });
        let raw = power_traces(&u, 2 * n);
        for (i, t) in raw.iter().enumerate() {
            let k = i + 1;
            let want = if k % n == 0 { n as f64 } else { 0.0 };
            assert!((t - c(want, 0.0)).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn conjugated_diagonal_4x4() {
        // U = V D V* with V the normalised 4×4 Fourier matrix
        let phases = [0.3, -1.1, 2.0, 2.9];
        let v = ComplexMatrix::from_fn(4, 4, |i, j| Complex64::from_polar(0.5, 2.0 * PI * (i * j) as f64 / 4.0));
        let d = ComplexMatrix::from_fn(4, 4, |i, j| if i == j { Complex64::from_polar(1.0, phases[i]) } else { c(0.0, 0.0) });
        let u = v.matmul(&d).matmul(&v.adjoint());
        let t = trace_vector(&u, 9).unwrap();
        for k in 1..=9 {
            let direct: Complex64 = phases.iter().map(|p| Complex64::from_polar(1.0, k as f64 * p)).sum();
            assert!((t.t(k) - direct * (2.0 / k as f64).sqrt()).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn drift_is_detected() {
        let mut u = ComplexMatrix::identity(3);
        u[(0, 0)] = c(1.001, 0.0);
        assert!(trace_vector(&u, 4).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_ordered() {
        let a = sample_traces(6, 3, 40, 11).unwrap();
        let b = sample_traces(6, 3, 40, 11).unwrap();
        assert_eq!(a, b);
        let single = trace_vector(&sample_haar(6, &mut replica_rng(11, 17)).unwrap(), 3).unwrap();
        assert_eq!(a[17], single);
        assert!(sample_traces(6, 3, 0, 11).unwrap().is_empty());
    }

    #[test]
    fn mean_of_x_is_zero() {
        let w = mc_moments(10, 100_000, 21, 6, |u, o| {
            let t = TraceSample::from_power_traces(10, &power_traces(u, 3));
            o.copy_from_slice(&t.x());
        })
        .unwrap();
        let se = w.se();
        for i in 0..6 {
            assert!(w.mean[i].abs() < 5.0 * se[i], "X_{} = {} ± {}", i + 1, w.mean[i], se[i]);
        }
    }

    #[test]
    fn trace_bound_invariant() {
        for s in sample_traces(7, 5, 50, 2).unwrap() {
            for k in 1..=5 {
                assert!(s.t(k).norm() <= 7.0 * (2.0 / k as f64).sqrt() + 1e-12);
            }
        }
    }

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = Welford::new(1);
        let mut a = Welford::new(1);
        let mut b = Welford::new(1);
        for (i, x) in xs.iter().enumerate() {
            all.push(&[*x]);
            if i < 300 { a.push(&[*x]) } else { b.push(&[*x]) }
        }
        let m = a.merge(b);
        assert!((m.mean[0] - all.mean[0]).abs() < 1e-12);
        assert!((m.m2[0] - all.m2[0]).abs() < 1e-9 * all.m2[0]);
    }
}
