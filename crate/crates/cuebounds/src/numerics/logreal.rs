use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{domain, Result};

/// Relative size below which opposite-signed magnitudes are treated as
/// cancelling exactly.
const CANCEL_EPS: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        }
    }
}

/// A real number stored as a sign and the natural log of its magnitude.
/// The log is kept as an unevaluated sum `ln_mag + ln_lo` so that values near
/// the ends of the float range survive a round trip to a few ulp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal {
    sign: Sign,
    ln_mag: f64,
    ln_lo: f64,
}

// Cody–Waite split of ln 2; k·LN2_HI is exact for |k| < 2^21.
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn dd_add(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (s, e) = two_sum(a.0, b.0);
    let (hi, lo) = two_sum(s, e + a.1 + b.1);
    (hi, lo)
}

/// x = m·2^e with m ∈ [√½, √2), for finite nonzero x.
fn split_binary(x: f64) -> (f64, i32) {
    let mut y = x.abs();
    let mut bias = 0;
    if y < f64::MIN_POSITIVE {
        y *= 2f64.powi(54);
        bias = -54;
    }
    let bits = y.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i32 - 1022;
    let mut m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    let mut e = e + bias;
    if m < std::f64::consts::FRAC_1_SQRT_2 {
        m *= 2.0;
        e -= 1;
    }
    (m, e)
}

fn pow2(k: i32) -> f64 {
    if (-1022..=1023).contains(&k) {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else if k > 1023 {
        f64::INFINITY
    } else {
        2f64.powi(k)
    }
}

fn exp_dd(hi: f64, lo: f64) -> f64 {
    let k = (hi / std::f64::consts::LN_2).round();
    if k.abs() > 1_000_000.0 {
        return if hi > 0.0 { f64::INFINITY } else { 0.0 };
    }
    let r = ((hi - k * LN2_HI) - k * LN2_LO) + lo;
    let k = k as i32;
    // two-step scaling keeps subnormal results accurate
    let k1 = k / 2;
    r.exp() * pow2(k1) * pow2(k - k1)
}

impl LogReal {
    pub const ZERO: LogReal = LogReal { sign: Sign::Zero, ln_mag: f64::NEG_INFINITY, ln_lo: 0.0 };
    pub const ONE: LogReal = LogReal { sign: Sign::Positive, ln_mag: 0.0, ln_lo: 0.0 };

    /// Panics on NaN or infinite input.
    pub fn from_real(x: f64) -> LogReal {
        assert!(x.is_finite(), "LogReal::from_real needs a finite value, got {x}");
        if x == 0.0 {
            return LogReal::ZERO;
        }
        let (m, e) = split_binary(x);
        let ek = e as f64;
        let (hi, lo) = dd_add(dd_add((ek * LN2_HI, ek * LN2_LO), (0.0, 0.0)), (m.ln(), 0.0));
        let sign = if x > 0.0 { Sign::Positive } else { Sign::Negative };
        LogReal { sign, ln_mag: hi, ln_lo: lo }
    }

    /// `e^ln_mag`; an input of −∞ gives zero.
    pub fn from_ln(ln_mag: f64) -> LogReal {
        assert!(!ln_mag.is_nan() && ln_mag != f64::INFINITY, "bad log magnitude {ln_mag}");
        if ln_mag == f64::NEG_INFINITY {
            LogReal::ZERO
        } else {
            LogReal { sign: Sign::Positive, ln_mag, ln_lo: 0.0 }
        }
    }

    fn with_ln(sign: Sign, (hi, lo): (f64, f64)) -> LogReal {
        if hi == f64::NEG_INFINITY {
            return LogReal::ZERO;
        }
        LogReal { sign, ln_mag: hi, ln_lo: lo }
    }

    pub fn from_parts(sign: Sign, ln_mag: f64) -> LogReal {
        match sign {
            Sign::Zero => LogReal::ZERO,
            _ => {
                let mut v = LogReal::from_ln(ln_mag);
                if sign == Sign::Negative {
                    v = -v;
                }
                v
            }
        }
    }

    pub fn from_log10(log10_mag: f64) -> LogReal {
        LogReal::from_ln(log10_mag * std::f64::consts::LN_10)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// Natural log of |x|; −∞ for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.ln_mag + self.ln_lo
        }
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_abs() / std::f64::consts::LN_10
    }

    /// Converts back to `f64`, saturating to 0 or ±∞ outside the float range.
    pub fn to_real(&self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            Sign::Positive => exp_dd(self.ln_mag, self.ln_lo),
            Sign::Negative => -exp_dd(self.ln_mag, self.ln_lo),
        }
    }

    pub fn abs(&self) -> LogReal {
        if self.is_zero() {
            *self
        } else {
            LogReal { sign: Sign::Positive, ..*self }
        }
    }

    pub fn div(self, rhs: LogReal) -> Result<LogReal> {
        if rhs.is_zero() {
            return domain("LogReal division by zero");
        }
        if self.is_zero() {
            return Ok(LogReal::ZERO);
        }
        Ok(LogReal::with_ln(self.sign.times(rhs.sign), dd_add((self.ln_mag, self.ln_lo), (-rhs.ln_mag, -rhs.ln_lo))))
    }

    /// `self^p`. Negative bases need an integral exponent; `0^p` needs p > 0.
    pub fn pow_real(self, p: f64) -> Result<LogReal> {
        match self.sign {
            Sign::Zero => {
                if p > 0.0 {
                    Ok(LogReal::ZERO)
                } else if p == 0.0 {
                    Ok(LogReal::ONE)
                } else {
                    domain("zero raised to a negative power")
                }
            }
            Sign::Positive => Ok(self.scaled_ln(p)),
            Sign::Negative => {
                if p.fract() != 0.0 {
                    return domain(format!("negative base with non-integer exponent {p}"));
                }
                let odd = (p % 2.0).abs() == 1.0;
                let mag = self.abs().scaled_ln(p);
                Ok(if odd { -mag } else { mag })
            }
        }
    }

    fn scaled_ln(self, p: f64) -> LogReal {
        let prod = self.ln_mag * p;
        if !prod.is_finite() {
            return LogReal::from_ln(prod);
        }
        let err = self.ln_mag.mul_add(p, -prod);
        LogReal::with_ln(Sign::Positive, two_sum(prod, err + self.ln_lo * p))
    }

    pub fn powi(self, k: i32) -> LogReal {
        self.pow_real(k as f64).unwrap_or(LogReal::ZERO)
    }

    pub fn sqrt(self) -> Result<LogReal> {
        if self.sign == Sign::Negative {
            return domain("square root of a negative LogReal");
        }
        self.pow_real(0.5)
    }

    pub fn max(self, other: LogReal) -> LogReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: LogReal) -> LogReal {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Default for LogReal {
    fn default() -> Self {
        LogReal::ZERO
    }
}

impl From<f64> for LogReal {
    fn from(x: f64) -> Self {
        LogReal::from_real(x)
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal { sign: self.sign.flip(), ..self }
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        let sign = self.sign.times(rhs.sign);
        if sign == Sign::Zero {
            LogReal::ZERO
        } else {
            LogReal::with_ln(sign, dd_add((self.ln_mag, self.ln_lo), (rhs.ln_mag, rhs.ln_lo)))
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: LogReal) -> LogReal {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if (self.ln_mag, self.ln_lo) >= (rhs.ln_mag, rhs.ln_lo) { (self, rhs) } else { (rhs, self) };
        let d = (small.ln_mag - big.ln_mag) + (small.ln_lo - big.ln_lo);
        let base = (big.ln_mag, big.ln_lo);
        if big.sign == small.sign {
            LogReal::with_ln(big.sign, dd_add(base, (d.exp().ln_1p(), 0.0)))
        } else if -d < CANCEL_EPS {
            LogReal::ZERO
        } else {
            LogReal::with_ln(big.sign, dd_add(base, ((-d.exp_m1()).ln(), 0.0)))
        }
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

impl std::iter::Sum for LogReal {
    fn sum<I: Iterator<Item = LogReal>>(iter: I) -> LogReal {
        iter.fold(LogReal::ZERO, |a, b| a + b)
    }
}

impl std::iter::Product for LogReal {
    fn product<I: Iterator<Item = LogReal>>(iter: I) -> LogReal {
        iter.fold(LogReal::ONE, |a, b| a * b)
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &LogReal) -> Option<Ordering> {
        use Sign::*;
        let rank = |s: Sign| match s {
            Negative => 0,
            Zero => 1,
            Positive => 2,
        };
        match rank(self.sign).cmp(&rank(other.sign)) {
            Ordering::Equal => match self.sign {
                Zero => Some(Ordering::Equal),
                Positive => (self.ln_mag, self.ln_lo).partial_cmp(&(other.ln_mag, other.ln_lo)),
                Negative => (other.ln_mag, other.ln_lo).partial_cmp(&(self.ln_mag, self.ln_lo)),
            },
            ord => Some(ord),
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            s => {
                let l10 = self.log10_abs();
                let e = l10.floor();
                let mant = 10f64.powf(l10 - e);
                let sgn = if s == Sign::Negative { "-" } else { "" };
                write!(f, "{sgn}{mant:.6}e{e}")
            }
        }
    }
}

impl Serialize for LogReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("LogReal", 2)?;
        st.serialize_field("sign", self.sign.as_str())?;
        let l = if self.is_zero() { None } else { Some(self.log10_abs()) };
        st.serialize_field("log10_mag", &l)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn small_products() {
        let p = LogReal::from_real(2.0) * LogReal::from_real(3.0);
        assert!(close(p.to_real(), 6.0, 1e-15));
        let q = LogReal::from_real(-2.0) * LogReal::from_real(3.0);
        assert!(close(q.to_real(), -6.0, 1e-15));
    }

    #[test]
    fn zero_is_additive_identity() {
        for x in [-3.5, 0.0, 1e-200, 7e150] {
            let v = LogReal::from_real(x);
            assert_eq!(v + LogReal::ZERO, v);
            assert_eq!(LogReal::ZERO + v, v);
        }
    }

    #[test]
    fn deep_underflow_product() {
        let a = LogReal::from_ln(-500.0);
        let b = LogReal::from_ln(-400.0);
        assert_eq!((a * b).ln_abs(), -900.0);
        assert_eq!((a * b).sign(), Sign::Positive);
    }

    #[test]
    fn huge_magnitudes_add() {
        let a = LogReal::from_ln(1e6);
        let b = LogReal::from_ln(1e6);
        let s = a + b;
        assert!((s.ln_abs() - (1e6 + 2f64.ln())).abs() < 1e-9);
        let d = LogReal::from_ln(-1e6) - LogReal::from_ln(-1e6 - 1.0);
        assert!((d.ln_abs() - (-1e6 + (1.0 - (-1f64).exp()).ln())).abs() < 1e-9);
    }

    #[test]
    fn cancellation_yields_zero() {
        let a = LogReal::from_real(1.0 + 1e-15);
        let b = LogReal::from_real(1.0);
        assert!((a - b).is_zero());
        assert!(!(LogReal::from_real(1.001) - b).is_zero());
    }

    #[test]
    fn division_and_powers() {
        assert!(LogReal::ONE.div(LogReal::ZERO).is_err());
        let q = LogReal::from_real(-8.0).div(LogReal::from_real(2.0)).unwrap();
        assert!(close(q.to_real(), -4.0, 1e-15));
        assert!(LogReal::from_real(-2.0).pow_real(0.5).is_err());
        let c = LogReal::from_real(-2.0).pow_real(3.0).unwrap();
        assert!(close(c.to_real(), -8.0, 1e-14));
        let s = LogReal::from_real(-2.0).powi(2);
        assert!(close(s.to_real(), 4.0, 1e-14));
        assert!(close(LogReal::from_real(9.0).sqrt().unwrap().to_real(), 3.0, 1e-15));
    }

    #[test]
    fn ordering_across_signs() {
        let v = [
            LogReal::from_real(-1e10),
            LogReal::from_real(-1.0),
            LogReal::ZERO,
            LogReal::from_ln(-800.0),
            LogReal::from_real(1.0),
            LogReal::from_ln(900.0),
        ];
        for w in v.windows(2) {
            assert!(w[0] < w[1], "{:?} !< {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn serializes_log10() {
        let v = serde_json::to_value(LogReal::from_real(1000.0)).unwrap();
        assert_eq!(v["sign"], "positive");
        assert!((v["log10_mag"].as_f64().unwrap() - 3.0).abs() < 1e-14);
        let z = serde_json::to_string(&LogReal::ZERO).unwrap();
        assert_eq!(z, "{\"sign\":\"zero\",\"log10_mag\":null}");
    }

    proptest! {
        #[test]
        fn round_trip(e in -300.0f64..300.0, m in 1.0f64..10.0, neg in any::<bool>()) {
            let x = if neg { -m * 10f64.powf(e) } else { m * 10f64.powf(e) };
            prop_assume!(x.is_finite() && x.abs() >= 1e-300 && x.abs() <= 1e300);
            let y = LogReal::from_real(x).to_real();
            prop_assert!(close(x, y, 1e-14));
        }

        #[test]
        fn add_commutes_and_associates(
            la in -350.0f64..350.0, lb in -350.0f64..350.0, lc in -350.0f64..350.0,
            sa in any::<bool>(), sb in any::<bool>(), sc in any::<bool>(),
        ) {
            let mk = |l: f64, s: bool| {
                let v = LogReal::from_ln(l);
                if s { -v } else { v }
            };
            let (a, b, c) = (mk(la, sa), mk(lb, sb), mk(lc, sc));
            let ab = a + b;
            let ba = b + a;
            prop_assert_eq!(ab.sign(), ba.sign());
            if !ab.is_zero() {
                prop_assert!((ab.ln_abs() - ba.ln_abs()).abs() <= 1e-12 * (1.0 + ab.ln_abs().abs()));
            }
            // associativity is only meaningful without heavy cancellation
            if sa == sb && sb == sc {
                let l = (a + b) + c;
                let r = a + (b + c);
                prop_assert!((l.ln_abs() - r.ln_abs()).abs() <= 1e-12 * (1.0 + l.ln_abs().abs()));
            }
        }

        #[test]
        fn mul_matches_float(x in -1e50f64..1e50, y in -1e50f64..1e50) {
            let p = (LogReal::from_real(x) * LogReal::from_real(y)).to_real();
            prop_assert!(close(p, x * y, 1e-13));
        }
    }
}
