use crate::error::{domain, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// Bernoulli terms B_{2j}/(2j(2j-1)) of the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma needs a positive finite argument, got {x}"));
    }
    if x >= 10.0 {
        return Ok(stirling(x));
    }
    // shift up to 10 and divide the product back out
    let mut y = x;
    let mut prod = 1.0;
    while y < 10.0 {
        prod *= y;
        y += 1.0;
    }
    Ok(stirling(y) - prod.ln())
}

/// ln k!
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0).expect("positive argument")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factorials() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-14);
        assert!((ln_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-14);
        let mut f = 1.0f64;
        for k in 1..=170u64 {
            f *= k as f64;
            let g = ln_gamma(k as f64 + 1.0).unwrap();
            assert!((g.exp() / f - 1.0).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn half_integers() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((ln_gamma(0.5).unwrap() - sqrt_pi.ln()).abs() < 1e-14);
        // Γ(n+1/2) = (2n)! √π / (4^n n!)
        for n in 1..40u64 {
            let expect = ln_factorial(2 * n) + sqrt_pi.ln() - (n as f64) * 4f64.ln() - ln_factorial(n);
            let got = ln_gamma(n as f64 + 0.5).unwrap();
            assert!((got - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn stirling_envelope_at_637() {
        let x = 636.0f64;
        let lo = 0.5 * (2.0 * std::f64::consts::PI * x).ln() + x * x.ln() - x;
        let v = ln_gamma(637.0).unwrap();
        assert!(v > lo && v < lo + 1.0 / (12.0 * x));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn recurrence(x in 1.0f64..1e4) {
            let l = ln_gamma(x + 1.0).unwrap();
            let r = ln_gamma(x).unwrap() + x.ln();
            prop_assert!((l - r).abs() <= 1e-12 * l.abs().max(1.0));
        }

        #[test]
        fn envelope(x in 1.0f64..1e6) {
            let lo = 0.5 * (2.0 * std::f64::consts::PI * x).ln() + x * x.ln() - x;
            let v = ln_gamma(x + 1.0).unwrap();
            let slack = 1e-15 * v.abs().max(1.0);
            prop_assert!(v >= lo - slack && v <= lo + 1.0 / (12.0 * x) + slack);
        }
    }
}
