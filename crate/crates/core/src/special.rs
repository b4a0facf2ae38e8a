//! Special functions and small numerical utilities.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent once std is linked into the build
use num_traits::Float;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `B_{2k}` for `k = 1..=12`.
pub(crate) const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// `(e^z - 1)/z`, accurate near `z = 0`.
pub fn expm1_over(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..30 {
            term = term * z / k as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `b^s` for a positive real base.
pub fn real_pow(b: f64, s: Complex64) -> Complex64 {
    let l = b.ln();
    Complex64::from_polar((s.re * l).exp(), s.im * l)
}

/// `log Gamma(s)` up to a multiple of `2 pi i`.
pub fn ln_gamma(s: Complex64) -> Result<Complex64> {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Err(Error::domain("Gamma pole at a non-positive integer"));
    }
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 12.0 {
        shift += z.ln();
        z += 1.0;
    }
    let mut series = Complex64::new(0.0, 0.0);
    let z2 = z * z;
    let mut zp = z;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(10) {
        let k = (k + 1) as f64;
        series += *b / (2.0 * k * (2.0 * k - 1.0)) / zp;
        zp *= z2;
    }
    Ok((z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift)
}

pub fn gamma(s: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(s)?.exp())
}

/// Sine and cosine integrals `(Si(x), Ci(x))` for `x > 0`.
pub fn sici(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::domain("sici needs x > 0"));
    }
    if x > 2.0 {
        // continued fraction for E1(ix), modified Lentz
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 2..200 {
            let a = -((i - 1) * (i - 1)) as f64;
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        let h = Complex64::new(x.cos(), -x.sin()) * h;
        Ok((PI / 2.0 + h.im, -h.re))
    } else {
        let mut si = 0.0;
        let mut ci = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= x / k as f64;
            let t = term / k as f64;
            match k % 4 {
                1 => si += t,
                2 => ci -= t,
                3 => si -= t,
                _ => ci += t,
            }
            if t < 1e-18 {
                break;
            }
        }
        Ok((si, EULER_GAMMA + x.ln() + ci))
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Output of [`least_squares`].
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coeffs: Vec<f64>,
    /// RMS residual.
    pub rms: f64,
    /// Standard error of each coefficient, `sigma sqrt(diag (A^T A)^-1)`
    /// with `sigma^2 = RSS/(rows - cols)`; zero when `rows == cols`.
    pub std_errors: Vec<f64>,
}

/// Least-squares solution of `A x = b` (`A` given row-major, `rows x cols`)
/// by Householder QR.
pub fn least_squares(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Result<LeastSquares> {
    if rows < cols || cols == 0 {
        return Err(Error::TooFewPoints {
            needed: cols.max(1),
            got: rows,
        });
    }
    let mut q = a.to_vec();
    let mut y = b.to_vec();
    let at = |r: usize, c: usize| r * cols + c;
    for k in 0..cols {
        let norm = (k..rows).map(|r| q[at(r, k)] * q[at(r, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::domain("rank-deficient least-squares system"));
        }
        let alpha = if q[at(k, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|r| q[at(r, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in k..cols {
            let dot: f64 = (k..rows).map(|r| v[r - k] * q[at(r, c)]).sum();
            let f = 2.0 * dot / vnorm2;
            for r in k..rows {
                q[at(r, c)] -= f * v[r - k];
            }
        }
        let dot: f64 = (k..rows).map(|r| v[r - k] * y[r]).sum();
        let f = 2.0 * dot / vnorm2;
        for r in k..rows {
            y[r] -= f * v[r - k];
        }
    }
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = (k + 1..cols).map(|c| q[at(k, c)] * x[c]).sum();
        x[k] = (y[k] - s) / q[at(k, k)];
    }
    let rss: f64 = (0..rows)
        .map(|r| {
            let fit: f64 = (0..cols).map(|c| a[at(r, c)] * x[c]).sum();
            (fit - b[r]) * (fit - b[r])
        })
        .sum();
    // (A^T A)^-1 = R^-1 R^-T, so its diagonal is the row norms of R^-1
    let mut rinv = vec![0.0; cols * cols];
    for j in 0..cols {
        for i in (0..=j).rev() {
            let e = if i == j { 1.0 } else { 0.0 };
            let s: f64 = (i + 1..=j).map(|k| q[at(i, k)] * rinv[k * cols + j]).sum();
            rinv[i * cols + j] = (e - s) / q[at(i, i)];
        }
    }
    let sigma2 = if rows > cols { rss / (rows - cols) as f64 } else { 0.0 };
    let std_errors = (0..cols)
        .map(|i| (sigma2 * (i..cols).map(|j| rinv[i * cols + j].powi(2)).sum::<f64>()).sqrt())
        .collect();
    Ok(LeastSquares {
        coeffs: x,
        rms: (rss / rows as f64).sqrt(),
        std_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        let g = gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-14 && g.im.abs() < 1e-14);
        let g = gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g.re - 24.0).abs() < 1e-12);
        let g = gamma(Complex64::new(-1.5, 0.0)).unwrap();
        assert!((g.re - 4.0 * PI.sqrt() / 3.0).abs() < 1e-13);
        // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
        let t = 3.0;
        let g = gamma(Complex64::new(0.5, t)).unwrap();
        assert!((g.norm_sqr() - PI / (PI * t).cosh()).abs() < 1e-15);
        assert!(gamma(Complex64::new(-2.0, 0.0)).is_err());
    }

    #[test]
    fn sici_values() {
        let (si, ci) = sici(1.0).unwrap();
        assert!((si - 0.946_083_070_367_183).abs() < 1e-14);
        assert!((ci - 0.337_403_922_900_968_1).abs() < 1e-14);
        let (si, ci) = sici(10.0).unwrap();
        assert!((si - 1.658_347_594_218_874).abs() < 1e-13);
        assert!((ci + 0.045_456_433_004_455_37).abs() < 1e-13);
        // both branches meet at x = 2
        let (a, b) = sici(2.0).unwrap();
        let (c, d) = sici(2.0 + 1e-12).unwrap();
        assert!((a - c).abs() < 1e-11 && (b - d).abs() < 1e-11);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn least_squares_recovers_line() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let a: Vec<f64> = xs.iter().flat_map(|&x| [x, 1.0]).collect();
        let b: Vec<f64> = xs.iter().map(|&x| 2.0 * x + 1.0).collect();
        let ls = least_squares(&a, 10, 2, &b).unwrap();
        let c = &ls.coeffs;
        assert!((c[0] - 2.0).abs() < 1e-13 && (c[1] - 1.0).abs() < 1e-12 && ls.rms < 1e-12);
        // simple regression: se(slope) = sigma / sqrt(sum (x - mean)^2)
        let b: Vec<f64> = xs.iter().map(|&x| 2.0 * x + 1.0 + if x as i64 % 3 == 0 { 0.3 } else { -0.1 }).collect();
        let ls = least_squares(&a, 10, 2, &b).unwrap();
        let mean = xs.iter().sum::<f64>() / 10.0;
        let sxx: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        let rss: f64 = xs
            .iter()
            .zip(&b)
            .map(|(x, y)| (y - ls.coeffs[0] * x - ls.coeffs[1]).powi(2))
            .sum();
        let se = (rss / 8.0 / sxx).sqrt();
        assert!((ls.std_errors[0] - se).abs() < 1e-12 * se.max(1.0), "{} vs {se}", ls.std_errors[0]);
    }
}
