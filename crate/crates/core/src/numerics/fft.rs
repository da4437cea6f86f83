//! Iterative radix-2 FFT on power-of-two lengths.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// In-place transform; the inverse is scaled by 1/n.
pub fn fft(a: &mut [Complex64], inverse: bool) -> Result<()> {
    let n = a.len();
    if !n.is_power_of_two() {
        return Err(Error::Invalid(format!("fft length {n} is not a power of two")));
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) };
        if i < j {
            a.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let w = Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI / len as f64);
        for start in (0..n).step_by(len) {
            let mut wk = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = a[start + k];
                let v = a[start + k + len / 2] * wk;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
                wk *= w;
            }
        }
        len <<= 1;
    }
    if inverse {
        let s = 1.0 / n as f64;
        for z in a.iter_mut() {
            *z *= s;
        }
    }
    Ok(())
}

/// In-place 2-D transform of a row-major n×n array.
pub fn fft2(a: &mut [Complex64], n: usize, inverse: bool) -> Result<()> {
    if a.len() != n * n {
        return Err(Error::Invalid("fft2: array is not n x n".into()));
    }
    for row in a.chunks_mut(n) {
        fft(row, inverse)?;
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = a[i * n + j];
        }
        fft(&mut col, inverse)?;
        for i in 0..n {
            a[i * n + j] = col[i];
        }
    }
    Ok(())
}

/// Integer wavenumber of index j on an n-point grid.
pub fn wavenumber(j: usize, n: usize) -> f64 {
    if j < n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &[Complex64]) -> Vec<Complex64> {
        let n = a.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| a[j] * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        let a: Vec<Complex64> = (0..16).map(|j| Complex64::new((j as f64).sin(), (j * j) as f64 * 0.01)).collect();
        let mut b = a.clone();
        fft(&mut b, false).unwrap();
        for (x, y) in b.iter().zip(naive(&a)) {
            assert!((x - y).norm() < 1e-12);
        }
        fft(&mut b, true).unwrap();
        for (x, y) in b.iter().zip(&a) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_odd_length() {
        assert!(fft(&mut [Complex64::new(0.0, 0.0); 6], false).is_err());
    }
}
