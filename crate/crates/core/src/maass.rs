//! The Maass Eisenstein series `u`, its periodic function `f`, the period
//! function `psi` and its relation to `C`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
#[allow(unused_imports)] // inherent once std is linked into the build
use num_traits::{Euclid, Float};

use crate::error::{Error, Result};
use crate::lfun::l_chi;
use crate::numkernel::{divisor_counts, Discriminant, PrecisionContext};
use crate::qmf::eval_c_rational;
use crate::special::{gamma, EULER_GAMMA};
use crate::stepfn::StepTable;

/// A point `x + i y` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint {
    x: f64,
    y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::domain("point must lie in the upper half-plane"));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }
}

/// A value together with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// `K_0(t)` for `t > 0`.
pub fn bessel_k0(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("K_0 needs t > 0"));
    }
    if t <= 2.0 {
        let q = t * t / 4.0;
        let mut term = 1.0;
        let mut i0 = 1.0;
        let mut harm = 0.0;
        let mut rest = 0.0;
        for k in 1..60 {
            term *= q / (k * k) as f64;
            harm += 1.0 / k as f64;
            i0 += term;
            rest += term * harm;
            if term < 1e-18 {
                break;
            }
        }
        Ok(-((t / 2.0).ln() + EULER_GAMMA) * i0 + rest)
    } else {
        // Steed's second continued fraction, order zero
        let mut b = 2.0 * (1.0 + t);
        let mut d = 1.0 / b;
        let mut delh = d;
        let (mut q1, mut q2) = (0.0, 1.0);
        let a1 = 0.25;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..500 {
            a -= (2 * (i - 1)) as f64;
            c = -a * c / i as f64;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < 1e-17 {
                break;
            }
        }
        Ok((PI / (2.0 * t)).sqrt() * (-t).exp() / s)
    }
}

/// Number of terms after which `n^2 e^{-a n}` summed stays below `tol`.
fn exp_cutoff(a: f64, tol: f64, ctx: &PrecisionContext) -> Result<usize> {
    let mut n = ((tol.ln().abs() + 10.0) / a).ceil().max(8.0);
    // absorb the polynomial factor
    while n * n * (-a * n).exp() / (1.0 - (-a).exp()) > tol {
        n *= 1.25;
    }
    ctx.charge(n as u64, f64::NAN)?;
    Ok(n as usize)
}

/// `u(z) = sqrt(y) sum chi(n) d(n) K_0(w n y) sin(w n x)` with `w = 2 pi/|D|`.
pub fn eval_u(d: Discriminant, z: UpperHalfPoint, ctx: &PrecisionContext) -> Result<Estimate<f64>> {
    let step = StepTable::new(d);
    let w = 2.0 * PI / d.modulus() as f64;
    let a = w * z.y;
    let tol = ctx.rel_tol();
    let n_max = exp_cutoff(a, tol, ctx)?;
    let dn = divisor_counts(n_max);
    let xr = Euclid::rem_euclid(&z.x, &(d.modulus() as f64));
    let mut acc = 0.0;
    for n in 1..=n_max {
        let c = step.chi(n as i64);
        if c != 0 {
            acc += (c as i64 * dn[n] as i64) as f64 * bessel_k0(a * n as f64)? * (w * n as f64 * xr).sin();
        }
    }
    // K_0(t) <= sqrt(pi/2t) e^{-t} and d(n) <= n beyond the cutoff
    let tail = (PI / (2.0 * a)).sqrt() * tol;
    Ok(Estimate {
        value: z.y.sqrt() * acc,
        error: z.y.sqrt() * tail + 1e-15 * acc.abs(),
    })
}

/// `f(z) = sum chi(n) d(n) e^{+-2 pi i n z/|D|}` for `+-Im z > 0`.
pub fn eval_f(d: Discriminant, z: Complex64, ctx: &PrecisionContext) -> Result<Estimate<Complex64>> {
    if z.im == 0.0 || !z.im.is_finite() {
        return Err(Error::domain("f is defined off the real axis"));
    }
    let step = StepTable::new(d);
    let p = d.modulus() as f64;
    let sign = z.im.signum();
    let a = 2.0 * PI * z.im.abs() / p;
    let n_max = exp_cutoff(a, ctx.rel_tol(), ctx)?;
    let dn = divisor_counts(n_max);
    let theta = sign * 2.0 * PI * Euclid::rem_euclid(&z.re, &p) / p;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        let c = step.chi(n as i64);
        if c != 0 {
            let nf = n as f64;
            acc += Complex64::from_polar((c as i64 * dn[n] as i64) as f64 * (-a * nf).exp(), theta * nf);
        }
    }
    Ok(Estimate {
        value: acc,
        error: ctx.rel_tol() + 1e-15 * acc.norm(),
    })
}

/// `psi(z) = f(z) + f(-1/z)/z` for `z` off the real axis.
pub fn psi_series(d: Discriminant, z: Complex64, ctx: &PrecisionContext) -> Result<Estimate<Complex64>> {
    let a = eval_f(d, z, ctx)?;
    let b = eval_f(d, -1.0 / z, ctx)?;
    let zi = 1.0 / z;
    Ok(Estimate {
        value: a.value + zi * b.value,
        error: a.error + zi.norm() * b.error,
    })
}

fn require_minus4(d: Discriminant) -> Result<()> {
    if d != Discriminant::MINUS_4 {
        return Err(Error::domain("implemented for D = -4 only"));
    }
    Ok(())
}

/// `psi(z) = 1/(2 pi i) int_{Re s = c} Gamma(s) L(s)^2/((pi/2)^s cos(pi s/2)) z^{-s} ds`
/// for `|arg z| < pi`, by the trapezoid rule on the vertical line.
pub fn psi_mellin(d: Discriminant, z: Complex64, c: f64, ctx: &PrecisionContext) -> Result<Estimate<Complex64>> {
    require_minus4(d)?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain("contour abscissa must lie in (0, 1)"));
    }
    if z.norm() == 0.0 || (z.im == 0.0 && z.re < 0.0) {
        return Err(Error::domain("z must avoid the cut (-inf, 0]"));
    }
    let arg = z.arg();
    let decay = PI - arg.abs();
    let tol = ctx.rel_tol();
    let lt = tol.ln().abs();
    if decay < 1e-3 {
        return Err(Error::BudgetExhausted {
            budget: ctx.term_budget(),
            estimate: f64::INFINITY,
        });
    }
    // the integrand decays like |t|^k e^{-decay |t|}
    let t_max = (lt + 8.0 + 3.0 * (lt / decay + 10.0).ln()) / decay;
    // the nearest poles sit at distance min(c, 1 - c) from the line
    let dist = c.min(1.0 - c);
    let h = 2.0 * PI * dist / (lt + 6.0);
    let steps = (t_max / h).ceil() as u64;
    ctx.charge(steps, f64::NAN)?;
    let lz = z.ln();
    let inner = ctx.with_rel_tol((tol / 10.0).max(1e-15))?;
    let integrand = |t: f64| -> Result<Complex64> {
        let s = Complex64::new(c, t);
        let l = l_chi(d, s, &inner)?;
        let g = gamma(s)?;
        let den = (s * (PI / 2.0).ln()).exp() * (s * PI / 2.0).cos();
        Ok(g * l * l / den * (-s * lz).exp())
    };
    let mut acc = integrand(0.0)?;
    for k in 1..=steps {
        let t = k as f64 * h;
        acc += integrand(t)? + integrand(-t)?;
    }
    Ok(Estimate {
        value: acc * h / (2.0 * PI),
        error: tol * acc.norm().max(1.0) * h,
    })
}

/// Both sides of `psi(z) ~ z int_{-inf}^0 C(t)/(t - z)^3 dt` and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiFromC {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub ratio: Complex64,
}

/// Evaluates `psi(z)` and `-z int_0^1 C(u) [(u+z)^{-3} + (1+zu)^{-3}] du`,
/// the latter by composite Simpson on the grid `i/grid` with exact `C` values.
pub fn psi_from_c_check(d: Discriminant, z: Complex64, grid: u32, ctx: &PrecisionContext) -> Result<PsiFromC> {
    require_minus4(d)?;
    if z.im == 0.0 {
        return Err(Error::domain("z must lie off the real axis"));
    }
    if grid < 2 || grid % 2 != 0 {
        return Err(Error::domain("grid must be even and at least 2"));
    }
    let m = grid as i64;
    let work = (grid as u64).saturating_mul(grid as u64).saturating_mul(d.modulus());
    ctx.charge(work, f64::NAN)?;
    let step = StepTable::new(d);
    let cs: Vec<f64> = (0..=m).map(|i| eval_c_rational(&step, Ratio::new(i, m))).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, c) in cs.iter().enumerate() {
        let u = i as f64 / m as f64;
        let w = if i == 0 || i as i64 == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let k = (u + z).powi(-3) + (1.0 + z * u).powi(-3);
        acc += w * c * k;
    }
    let rhs = -z * acc / (3.0 * m as f64);
    let lhs = psi_series(d, z, ctx)?.value;
    Ok(PsiFromC {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// `|d psi/dy - i d psi/dx|` by central differences of `psi_mellin`, scaled
/// by `max(1, |psi(z)|)`.
pub fn cauchy_riemann_residual(d: Discriminant, z: Complex64, h: f64, ctx: &PrecisionContext) -> Result<f64> {
    let f = |w: Complex64| psi_mellin(d, w, 0.5, ctx).map(|e| e.value);
    let dx = (f(z + h)? - f(z - h)?) / (2.0 * h);
    let dy = (f(z + Complex64::new(0.0, h))? - f(z - Complex64::new(0.0, h))?) / (2.0 * h);
    let scale = f(z)?.norm().max(1.0);
    Ok((dy - Complex64::i() * dx).norm() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn k0_oracle(t: f64) -> f64 {
        // trapezoid in theta converges geometrically for this integrand
        let h = 0.005;
        let mut acc = 0.5 * (-t).exp();
        let mut k = 1;
        loop {
            let v = (-t * (k as f64 * h).cosh()).exp();
            acc += v;
            if v < 1e-300 || k > 1_000_000 {
                break;
            }
            k += 1;
        }
        acc * h
    }

    #[test]
    fn k0_values() {
        assert!((bessel_k0(1.0).unwrap() - 0.421_024_438_240_708_3).abs() < 1e-14);
        for t in [0.1, 0.7, 1.9, 2.0, 2.1, 5.0, 10.0, 30.0] {
            let k = bessel_k0(t).unwrap();
            let o = k0_oracle(t);
            assert!(((k - o) / o).abs() < 1e-12, "t = {t}: {k} vs {o}");
        }
        let t = 400.0;
        assert!((bessel_k0(t).unwrap() * (2.0 * t / PI).sqrt() * t.exp() - 1.0).abs() < 1e-3);
        assert!(bessel_k0(0.0).is_err());
    }

    #[test]
    fn u_transformations() {
        let d = Discriminant::MINUS_4;
        let z = UpperHalfPoint::new(0.3, 0.7).unwrap();
        let u = eval_u(d, z, &ctx()).unwrap().value;
        let u2 = eval_u(d, UpperHalfPoint::new(2.3, 0.7).unwrap(), &ctx()).unwrap().value;
        let w = -1.0 / z.to_complex();
        let us = eval_u(d, UpperHalfPoint::from_complex(w).unwrap(), &ctx()).unwrap().value;
        assert!(u.abs() > 1e-3);
        assert!((u2 + u).abs() < 1e-10);
        assert!((us + u).abs() < 1e-10, "{us} vs {u}");
        let axis = eval_u(d, UpperHalfPoint::new(0.0, 1.3).unwrap(), &ctx()).unwrap().value;
        assert_eq!(axis, 0.0);
    }

    #[test]
    fn u_general_discriminants() {
        for dd in [-3, -7, -8] {
            let d = Discriminant::new(dd).unwrap();
            let p = d.modulus() as f64;
            for (x, y) in [(0.3, 0.7), (-0.8, 1.4)] {
                let z = UpperHalfPoint::new(x, y).unwrap();
                let u = eval_u(d, z, &ctx()).unwrap().value;
                let ut = eval_u(d, UpperHalfPoint::new(x + p, y).unwrap(), &ctx()).unwrap().value;
                let w = UpperHalfPoint::from_complex(-1.0 / z.to_complex()).unwrap();
                let us = eval_u(d, w, &ctx()).unwrap().value;
                assert!((ut - u).abs() < 1e-10);
                assert!((us + u).abs() < 1e-10, "D = {dd}: {us} vs {u}");
            }
        }
    }

    #[test]
    fn f_values() {
        let d = Discriminant::MINUS_4;
        let y = 0.8;
        let f = eval_f(d, Complex64::new(0.0, y), &ctx()).unwrap().value;
        let direct: f64 = (1..400)
            .map(|n: i64| {
                let c = crate::numkernel::chi(d, n) as f64;
                let dn = (1..=n).filter(|k| n % k == 0).count() as f64;
                c * dn * (-PI * n as f64 * y / 2.0).exp()
            })
            .sum();
        assert!((f.re - direct).abs() < 1e-13 && f.im.abs() < 1e-15);
        let g = eval_f(d, Complex64::new(2.0, y), &ctx()).unwrap().value;
        assert!((g + f).norm() < 1e-13);
        let z = Complex64::new(0.4, 0.6);
        let a = eval_f(d, z, &ctx()).unwrap().value;
        let b = eval_f(d, z.conj(), &ctx()).unwrap().value;
        assert!((a.conj() - b).norm() < 1e-14);
    }

    #[test]
    fn psi_routes_agree() {
        let d = Discriminant::MINUS_4;
        for y in [0.5, 1.0, 2.0] {
            for sgn in [1.0, -1.0] {
                let z = Complex64::new(0.0, sgn * y);
                let a = psi_series(d, z, &ctx()).unwrap().value;
                let b = psi_mellin(d, z, 0.5, &ctx()).unwrap().value;
                assert!((a - b).norm() < 1e-8, "z = {z}: {a} vs {b}");
            }
        }
        let one = Complex64::new(1.0, 0.0);
        let v: Vec<Complex64> = [0.3, 0.5, 0.7]
            .iter()
            .map(|&c| psi_mellin(d, one, c, &ctx()).unwrap().value)
            .collect();
        assert!((v[0] - v[1]).norm() < 1e-8 && (v[2] - v[1]).norm() < 1e-8, "{v:?}");
        assert!(v[1].im.abs() < 1e-10);
        let z = Complex64::new(0.7, 0.4);
        let p = psi_mellin(d, z, 0.5, &ctx()).unwrap().value;
        let q = psi_mellin(d, z.conj(), 0.5, &ctx()).unwrap().value;
        assert!((p.conj() - q).norm() < 1e-10);
    }

    #[test]
    fn psi_is_holomorphic_across_the_axis() {
        let d = Discriminant::MINUS_4;
        let r = cauchy_riemann_residual(d, Complex64::new(1.0, 0.0), 1e-3, &ctx()).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn psi_from_c_ratio_is_constant() {
        let d = Discriminant::MINUS_4;
        let a = psi_from_c_check(d, Complex64::new(0.0, 1.0), 2048, &ctx()).unwrap();
        let b = psi_from_c_check(d, Complex64::new(1.0, 1.0), 2048, &ctx()).unwrap();
        assert!((a.ratio - b.ratio).norm() < 1e-4 * a.ratio.norm(), "{a:?} {b:?}");
    }
}
