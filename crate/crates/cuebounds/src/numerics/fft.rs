use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// X_k = Σ_j x_j e^{−2πijk/G}, unscaled.
    Forward,
    /// x_j = G⁻¹ Σ_k X_k e^{2πijk/G}.
    Inverse,
}

/// Iterative radix-2 Cooley–Tukey transform.
pub fn fft_in_place(buf: &mut [Complex64], dir: Direction) -> Result<()> {
    let g = buf.len();
    if g == 0 || !g.is_power_of_two() {
        return domain(format!("fft length {g} is not a power of two"));
    }
    let bits = g.trailing_zeros();
    if bits > 0 {
        for i in 0..g {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
    }
    let sgn = match dir {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let mut len = 2;
    while len <= g {
        let half = len / 2;
        // twiddles computed directly, not by repeated multiplication
        let tw: Vec<Complex64> =
            (0..half).map(|k| Complex64::from_polar(1.0, sgn * 2.0 * PI * k as f64 / len as f64)).collect();
        for start in (0..g).step_by(len) {
            for k in 0..half {
                let a = buf[start + k];
                let b = buf[start + k + half] * tw[k];
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
    if dir == Direction::Inverse {
        let s = 1.0 / g as f64;
        for v in buf.iter_mut() {
            *v *= s;
        }
    }
    Ok(())
}

pub fn fft(values: &[Complex64], dir: Direction) -> Result<Vec<Complex64>> {
    let mut out = values.to_vec();
    fft_in_place(&mut out, dir)?;
    Ok(out)
}
