//! Hurwitz zeta values, `L(s, chi_D)`, `h'(D)` and the Mellin identities for
//! `S_D` and `C_D`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
#[allow(unused_imports)] // inherent once std is linked into the build
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numkernel::{Discriminant, PrecisionContext};
use crate::special::{expm1_over, real_pow, BERNOULLI_EVEN};
use crate::stepfn::StepTable;

/// `sum_i c_i zeta(s, a_i)` by Euler-Maclaurin summation. The pole at `s = 1`
/// cancels when `sum_i c_i = 0`, and the combination is then finite there.
pub fn hurwitz_combination(s: Complex64, terms: &[(f64, f64)], ctx: &PrecisionContext) -> Result<Complex64> {
    if terms.iter().any(|&(_, a)| !(a > 0.0)) {
        return Err(Error::domain("Hurwitz parameter must be positive"));
    }
    let csum: f64 = terms.iter().map(|t| t.0).sum();
    let cabs: f64 = terms.iter().map(|t| t.0.abs()).sum();
    let balanced = csum.abs() <= 1e-13 * cabs.max(1.0);
    let w = s - 1.0;
    if !balanced && w.norm() == 0.0 {
        return Err(Error::domain("pole of the Hurwitz zeta function at s = 1"));
    }
    let mut n = (10.0 + s.norm()).ceil() as u64;
    loop {
        ctx.charge(n * terms.len() as u64, f64::NAN)?;
        let (value, err) = hurwitz_em(s, terms, n, balanced);
        if err <= ctx.rel_tol() * value.norm().max(1e-300) || err < 1e-300 {
            return Ok(value);
        }
        if n > ctx.term_budget() / terms.len().max(1) as u64 {
            return Err(Error::BudgetExhausted {
                budget: ctx.term_budget(),
                estimate: err / value.norm(),
            });
        }
        n *= 2;
    }
}

fn hurwitz_em(s: Complex64, terms: &[(f64, f64)], n: u64, balanced: bool) -> (Complex64, f64) {
    let w = s - 1.0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for &(c, a) in terms {
        if c == 0.0 {
            continue;
        }
        let mut direct = Complex64::new(0.0, 0.0);
        for k in 0..n {
            direct += real_pow(k as f64 + a, -s);
        }
        let x = n as f64 + a;
        let l = x.ln();
        // (x^{1-s} - 1)/(s - 1), plus 1/(s - 1) only when unbalanced
        let mut sing = -l * expm1_over(-w * l);
        if !balanced {
            sing += 1.0 / w;
        }
        let xs = real_pow(x, -s);
        let mut tail = 0.5 * xs;
        // rising factorial (s)_{2j-1} / (2j)!, times x^{-s-2j+1}
        let mut poch = s;
        let mut fact = 2.0;
        let mut xp = xs / x;
        let mut last = 0.0;
        for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
            let t = *b / fact * poch * xp;
            tail += t;
            last = t.norm();
            let j2 = 2.0 * (j + 1) as f64;
            poch = poch * (s + j2 - 1.0) * (s + j2);
            fact *= (j2 + 1.0) * (j2 + 2.0);
            xp = xp / (x * x);
        }
        total += c * (direct + sing + tail);
        err += c.abs() * last;
    }
    (total, err)
}

pub fn hurwitz_zeta(s: Complex64, a: f64, ctx: &PrecisionContext) -> Result<Complex64> {
    hurwitz_combination(s, &[(1.0, a)], ctx)
}

/// Hurwitz terms for `sum_{n >= start} f(n) n^{-s} = P^{-s} sum_i c_i zeta(s, a_i)`
/// where `f` is periodic with one period given by `weights`.
pub fn periodic_terms(weights: &[f64], start: u64, sign: f64, out: &mut Vec<(f64, f64)>) {
    let p = weights.len() as u64;
    for i in 0..p {
        let n = start + i;
        let c = weights[(n % p) as usize];
        if c != 0.0 {
            out.push((sign * c, n as f64 / p as f64));
        }
    }
}

/// `sum_{n >= start} f(n) n^{-s}` for periodic `f`.
pub fn periodic_dirichlet(s: Complex64, weights: &[f64], start: u64, ctx: &PrecisionContext) -> Result<Complex64> {
    let mut t = Vec::new();
    periodic_terms(weights, start, 1.0, &mut t);
    Ok(real_pow(weights.len() as f64, -s) * hurwitz_combination(s, &t, ctx)?)
}

/// `L(s, chi_D)` for any complex `s`.
pub fn l_chi(d: Discriminant, s: Complex64, ctx: &PrecisionContext) -> Result<Complex64> {
    let step = StepTable::new(d);
    let w: Vec<f64> = step.chi_values().iter().map(|&c| c as f64).collect();
    periodic_dirichlet(s, &w, 1, ctx)
}

/// `h'(D) = sqrt|D| L(1, chi_D)/pi`, snapped to a fraction with denominator at most 6.
pub fn h_prime(d: Discriminant, ctx: &PrecisionContext) -> Result<Ratio<i64>> {
    let l1 = l_chi(d, Complex64::new(1.0, 0.0), ctx)?.re;
    let value = (d.modulus() as f64).sqrt() * l1 / PI;
    for q in 1..=6i64 {
        let p = (value * q as f64).round();
        if (value - p / q as f64).abs() < 1e-8 {
            return Ok(Ratio::new(p as i64, q));
        }
    }
    Err(Error::SnapFailed { value })
}

/// Numeric and closed-form sides of a Mellin identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinCheck {
    pub numeric: Complex64,
    pub closed: Complex64,
    pub tail_bound: f64,
}

impl MellinCheck {
    pub fn rel_diff(&self) -> f64 {
        (self.numeric - self.closed).norm() / self.closed.norm()
    }
}

/// `int_1^infty S(u) u^{beta - 1} du` for `Re beta < 0`, integrated exactly
/// piece by piece up to `j_max` with the periodic tail summed through Hurwitz values.
fn step_mellin(step: &StepTable, beta: Complex64, j_max: u64, ctx: &PrecisionContext) -> Result<Complex64> {
    let p = step.period() as usize;
    let plateau = step.plateaus();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = Complex64::new(1.0, 0.0);
    for j in 1..j_max {
        let hi = real_pow((j + 1) as f64, beta);
        let s = plateau[j as usize % p];
        if s != 0 {
            acc += s as f64 * (hi - lo);
        }
        lo = hi;
    }
    // sum_{j >= J} S_j ((j+1)^beta - j^beta), a balanced Hurwitz combination
    let w: Vec<f64> = plateau.iter().map(|&v| v as f64).collect();
    let shifted: Vec<f64> = (0..p).map(|r| w[(r + p - 1) % p]).collect();
    let mut t = Vec::new();
    periodic_terms(&shifted, j_max + 1, 1.0, &mut t);
    let mut t2 = Vec::new();
    periodic_terms(&w, j_max, -1.0, &mut t2);
    t.extend(t2);
    let tail = real_pow(p as f64, beta) * hurwitz_combination(-beta, &t, ctx)?;
    Ok((acc + tail) / beta)
}

/// `int_0^infty S(a/x) x^{s-1} dx` against `a^s L(s)/s`, for `Re s > 0`.
pub fn mellin_s_check(d: Discriminant, a: f64, s: Complex64, ctx: &PrecisionContext) -> Result<MellinCheck> {
    if !(s.re > 0.0) {
        return Err(Error::domain("Mellin transform of S needs Re s > 0"));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::domain("scale a must lie in (0, 1]"));
    }
    let step = StepTable::new(d);
    let j_max = 64 * step.period();
    let numeric = real_pow(a, s) * step_mellin(&step, -s, j_max, ctx)?;
    let closed = real_pow(a, s) * l_chi(d, s, ctx)? / s;
    let smax = step.max_abs() as f64;
    Ok(MellinCheck {
        numeric,
        closed,
        tail_bound: smax * a.powf(s.re) * (j_max as f64).powf(-s.re) / s.re,
    })
}

/// `int_0^1 C(x) x^{alpha-1} dx` with `C(x) = int_0^infty S(t) S(xt) dt/t^2`
/// integrated exactly in `x` and piecewise in `t`, for `-1 < Re alpha < 0`.
fn c_mellin_half(step: &StepTable, alpha: Complex64, j_max: u64, ctx: &PrecisionContext) -> Result<(Complex64, f64)> {
    let p = step.period() as usize;
    let plateau = step.plateaus();
    let one_a = alpha + 1.0;
    let mut phi = Complex64::new(0.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut pow_a = Complex64::new(1.0, 0.0);
    let mut pow_b = Complex64::new(1.0, 0.0);
    for j in 1..j_max {
        let s = plateau[j as usize % p] as f64;
        let next_a = real_pow((j + 1) as f64, alpha);
        let next_b = real_pow((j + 1) as f64, -one_a);
        if s != 0.0 {
            let jf = j as f64;
            acc += s * (phi - s * pow_a / alpha) * (pow_b - next_b) / one_a;
            acc += s * s / alpha * (1.0 / jf - 1.0 / (jf + 1.0));
            phi += s * (next_a - pow_a) / alpha;
        }
        pow_a = next_a;
        pow_b = next_b;
    }
    let w: Vec<f64> = plateau.iter().map(|&v| v as f64).collect();
    let shifted: Vec<f64> = (0..p).map(|r| w[(r + p - 1) % p]).collect();
    let pf = p as f64;
    let balanced = |sign_hi: f64, sign_lo: f64| {
        let mut t = Vec::new();
        periodic_terms(&shifted, j_max + 1, sign_hi, &mut t);
        periodic_terms(&w, j_max, sign_lo, &mut t);
        t
    };
    // full transform Phi(infinity) = Phi(J) + int_J^infty S u^{alpha-1}
    let r_tail = real_pow(pf, alpha) * hurwitz_combination(-alpha, &balanced(1.0, -1.0), ctx)? / alpha;
    let phi_inf = phi + r_tail;
    // int_J^infty S t^{-2-alpha} dt
    let first = real_pow(pf, -one_a) * hurwitz_combination(one_a, &balanced(-1.0, 1.0), ctx)? / one_a;
    // int_J^infty S t^{-2} dt, paired with the mean part of the remainder
    let second = hurwitz_combination(Complex64::new(1.0, 0.0), &balanced(-1.0, 1.0), ctx)? / pf;
    let mean = step.mean();
    let h = *mean.numer() as f64 / *mean.denom() as f64;
    let value = acc + phi_inf * first + h / alpha * second;
    let smax = step.max_abs() as f64;
    let err = 2.0 * pf * smax * smax / (alpha.norm().min(one_a.norm()) * (j_max as f64).powi(2));
    Ok((value, err))
}

/// The Mellin transform of `C_D` on the strip `-1 < Re s < 0`, computed from
/// the folded integral over `(0, 1]`, against `-L(-s) L(s+1)/(s (s+1))`.
pub fn mellin_c_check(d: Discriminant, s: Complex64, ctx: &PrecisionContext) -> Result<MellinCheck> {
    if !(s.re > -1.0 && s.re < 0.0) {
        return Err(Error::domain("Mellin transform of C needs -1 < Re s < 0"));
    }
    let step = StepTable::new(d);
    let j_max = 4096 * step.period();
    let (a, ea) = c_mellin_half(&step, s, j_max, ctx)?;
    let (b, eb) = c_mellin_half(&step, -1.0 - s, j_max, ctx)?;
    let one = Complex64::new(1.0, 0.0);
    let closed = -l_chi(d, -s, ctx)? * l_chi(d, s + one, ctx)? / (s * (s + one));
    Ok(MellinCheck {
        numeric: a + b,
        closed,
        tail_bound: ea + eb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::bernoulli_table;
    use num_traits::ToPrimitive;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bernoulli_constants_match_exact_table() {
        let b = bernoulli_table(24);
        for (j, v) in BERNOULLI_EVEN.iter().enumerate() {
            assert_eq!(*v, b[2 * j + 2].to_f64().unwrap());
        }
    }

    #[test]
    fn riemann_and_hurwitz_values() {
        let z2 = hurwitz_zeta(c(2.0), 1.0, &ctx()).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14);
        let z = hurwitz_zeta(c(0.5), 1.0, &ctx()).unwrap();
        assert!((z.re + 1.460_354_508_809_586_8).abs() < 1e-13);
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let h = hurwitz_zeta(c(3.0), 0.5, &ctx()).unwrap();
        let z3 = hurwitz_zeta(c(3.0), 1.0, &ctx()).unwrap();
        assert!((h - 7.0 * z3).norm() < 1e-13);
        // zeta(1/2 + 14.134725i) vanishes
        let z = hurwitz_zeta(Complex64::new(0.5, 14.134_725_141_734_693), 1.0, &ctx()).unwrap();
        assert!(z.norm() < 1e-12);
        assert!(hurwitz_zeta(c(1.0), 1.0, &ctx()).is_err());
    }

    #[test]
    fn l_values() {
        let l1 = l_chi(Discriminant::MINUS_4, c(1.0), &ctx()).unwrap();
        assert!((l1.re - PI / 4.0).abs() < 1e-14);
        // Catalan's constant
        let l2 = l_chi(Discriminant::MINUS_4, c(2.0), &ctx()).unwrap();
        assert!((l2.re - 0.915_965_594_177_219).abs() < 1e-14);
        let l3 = l_chi(Discriminant::MINUS_3, c(1.0), &ctx()).unwrap();
        assert!((l3.re - PI / (3.0 * 3f64.sqrt())).abs() < 1e-14);
        // L(0, chi) = h'(D)
        let l0 = l_chi(Discriminant::new(-7).unwrap(), c(0.0), &ctx()).unwrap();
        assert!((l0.re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn l_matches_direct_sum_for_large_real_part() {
        let d = Discriminant::new(-7).unwrap();
        let s = Complex64::new(3.0, 2.0);
        let direct: Complex64 = (1..200_000i64)
            .map(|n| crate::numkernel::chi(d, n) as f64 * real_pow(n as f64, -s))
            .sum();
        assert!((l_chi(d, s, &ctx()).unwrap() - direct).norm() < 1e-10);
    }

    #[test]
    fn h_prime_values() {
        let h = |d| h_prime(Discriminant::new(d).unwrap(), &ctx()).unwrap();
        assert_eq!(h(-4), Ratio::new(1, 2));
        assert_eq!(h(-3), Ratio::new(1, 3));
        assert_eq!(h(-7), Ratio::from_integer(1));
        assert_eq!(h(-23), Ratio::from_integer(3));
        for d in [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24] {
            let disc = Discriminant::new(d).unwrap();
            assert_eq!(h(d), StepTable::new(disc).mean(), "D = {d}");
        }
    }

    #[test]
    fn mellin_s_examples() {
        let m = mellin_s_check(Discriminant::MINUS_4, 1.0, c(2.0), &ctx()).unwrap();
        assert!((m.closed.re - 0.915_965_594_177_219 / 2.0).abs() < 1e-13);
        assert!(m.rel_diff() < 1e-10);
        let m = mellin_s_check(Discriminant::MINUS_4, 1.0, c(1.0), &ctx()).unwrap();
        assert!((m.closed.re - PI / 4.0).abs() < 1e-13);
        assert!(m.rel_diff() < 1e-10, "{m:?}");
        let m = mellin_s_check(Discriminant::MINUS_3, 0.5, Complex64::new(0.5, 3.0), &ctx()).unwrap();
        assert!(m.rel_diff() < 1e-9, "{m:?}");
    }

    #[test]
    fn mellin_c_symmetric_strip() {
        let d = Discriminant::MINUS_4;
        let m = mellin_c_check(d, c(-0.5), &ctx()).unwrap();
        assert!(m.rel_diff() < 1e-6, "{m:?}");
        let a = mellin_c_check(d, c(-0.3), &ctx()).unwrap();
        let b = mellin_c_check(d, c(-0.7), &ctx()).unwrap();
        assert!((a.closed - b.closed).norm() < 1e-12);
        assert!((a.numeric - b.numeric).norm() < 1e-6 * a.closed.norm());
    }
}
