//! The quantum modular functions `H_D` and `C_D`, their `s`-deformations,
//! regularizations, cocycles and asymptotic probes.

mod asymp;
mod group;
mod probe;

pub use asymp::{asymp_fit, c_inverse_coefficient, h_coefficient, AsymptoticFit, FitTarget, Lattice};
pub use group::{cocycle_c_gamma, Generator, GroupElement, Provenance};
pub use probe::{continuity_probe, default_offsets, ProbeFunction, ProbeReport};

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
#[allow(unused_imports)] // inherent once std is linked into the build
use num_traits::{Float, Signed, Zero};

use crate::cotsum::{c_ratio_with_tables, cot_table, h_with_table};
use crate::error::{Error, Result};
use crate::lfun::{hurwitz_combination, periodic_dirichlet};
use crate::numkernel::{divisor_counts, Discriminant, PrecisionContext};
use crate::special::{real_pow, sici};
use crate::stepfn::StepTable;

/// An argument that is either an exact rational or a floating real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Rational(Ratio<i64>),
    Real(f64),
}

impl Point {
    pub fn to_f64(&self) -> f64 {
        match self {
            Point::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Point::Real(x) => *x,
        }
    }
}

/// `|x|` reduced modulo the period, as `(m, n)` with `m/n` in lowest terms.
fn reduce_mod_period(x: Ratio<i64>, period: u64) -> (u64, u64) {
    let n = x.denom().unsigned_abs();
    let m = x.numer().unsigned_abs() % (period * n);
    let g = m.gcd(&n);
    (m / g, n / g)
}

/// `H(x) = pi/(|D| n) h_{m,n}` at `x = m/n`, extended to all rationals by
/// evenness and periodicity.
pub fn eval_h_rational(step: &StepTable, x: Ratio<i64>) -> f64 {
    let (m, n) = reduce_mod_period(x, step.period());
    if m == 0 {
        return 0.0;
    }
    let table = cot_table(step.period(), n);
    PI / (step.period() * n) as f64 * h_with_table(step, m, n, &table)
}

/// `C(x)` at a rational point, `C(p/q) = pi/(|D| q) (h_{p,q} + h_{q,p})`.
pub fn eval_c_rational(step: &StepTable, x: Ratio<i64>) -> f64 {
    let p = x.numer().unsigned_abs();
    let q = x.denom().unsigned_abs();
    if p == 0 {
        return 0.0;
    }
    let ta = cot_table(step.period(), p);
    let tb = cot_table(step.period(), q);
    c_ratio_with_tables(step, p, q, &ta, &tb)
}

/// A value with a rigorous bound on the discarded tail and a sharper
/// estimate of the actual error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub tail_bound: f64,
    pub error_estimate: f64,
}

/// `int_0^T S(t) S(x t) t^{-s-1} dt` and the mean of `S(t) S(xt)` over `[T/2, T]`,
/// for `0 < x <= 1`, integrated exactly between breakpoints.
fn product_integral(step: &StepTable, x: f64, s: f64, cutoff: f64) -> (f64, f64) {
    let p = step.period();
    let plateau = step.plateaus();
    let (mut i, mut k) = (0u64, 0u64);
    let mut t0 = 0.0f64;
    let mut next_k = 1.0 / x;
    let mut acc = 0.0;
    let mut mean_acc = 0.0;
    let half = cutoff / 2.0;
    let pow = |t: f64| if s == 1.0 { 1.0 / t } else { t.powf(-s) };
    while t0 < cutoff {
        let next_i = (i + 1) as f64;
        let t1 = next_i.min(next_k).min(cutoff);
        let v = plateau[(i % p) as usize] * plateau[(k % p) as usize];
        if v != 0 {
            acc += v as f64 * (pow(t0) - pow(t1));
            if t1 > half {
                mean_acc += v as f64 * (t1 - t0.max(half));
            }
        }
        if t1 == next_i {
            i += 1;
        }
        if t1 == next_k {
            k += 1;
            next_k = (k + 1) as f64 / x;
        }
        t0 = t1;
    }
    (acc / s, mean_acc / (cutoff - half))
}

/// `C(x)` for real `x` by quadrature of its integral representation. The tail
/// beyond the cutoff is replaced by `mean/T`, the mean taken over `[T/2, T]`.
pub fn eval_c_real(step: &StepTable, x: f64, ctx: &PrecisionContext) -> Result<QuadEstimate> {
    if !x.is_finite() {
        return Err(Error::domain("non-finite argument"));
    }
    let x = x.abs();
    if x == 0.0 {
        return Ok(QuadEstimate {
            value: 0.0,
            tail_bound: 0.0,
            error_estimate: 0.0,
        });
    }
    // C(x) = x C(1/x), so integrate with the smaller scale
    let (y, factor) = if x > 1.0 { (1.0 / x, x) } else { (x, 1.0) };
    let smax = step.max_abs() as f64;
    // the error of the mean-corrected tail decays like (discrepancy)/T^2
    let cutoff = (4.0 * smax / (y * ctx.rel_tol().sqrt())).ceil().max(64.0);
    let cost = (cutoff * (1.0 + y)) as u64;
    let bound = smax * smax / cutoff;
    ctx.charge(cost, bound)?;
    let (head, mean) = product_integral(step, y, 1.0, cutoff);
    let value = factor * (head + mean / cutoff);
    Ok(QuadEstimate {
        value,
        tail_bound: factor * bound,
        error_estimate: factor * smax * smax * (cutoff.ln() + 1.0) / (y * cutoff * cutoff),
    })
}

/// `C(x)` through either route.
pub fn eval_c(step: &StepTable, x: Point, ctx: &PrecisionContext) -> Result<f64> {
    match x {
        Point::Rational(r) => Ok(eval_c_rational(step, r)),
        Point::Real(v) => Ok(eval_c_real(step, v, ctx)?.value),
    }
}

/// `J(y) = -cos(y)/y + pi/2 - Si(y)`.
pub fn j_function(y: f64) -> Result<f64> {
    let (si, _) = sici(y)?;
    Ok(-y.cos() / y + PI / 2.0 - si)
}

/// `C(x) = pi h'^2/sqrt|D| + (2x/sqrt|D|) sum_{n<=terms} chi(n) d(n) J(2 pi n x/|D|)`.
pub fn c_j_series(step: &StepTable, x: f64, terms: usize, ctx: &PrecisionContext) -> Result<f64> {
    let x = x.abs();
    if x == 0.0 {
        return Ok(0.0);
    }
    ctx.charge(terms as u64, f64::NAN)?;
    let p = step.period() as f64;
    let mean = step.mean();
    let h = *mean.numer() as f64 / *mean.denom() as f64;
    let d = divisor_counts(terms);
    let w = 2.0 * PI * x / p;
    let mut acc = 0.0;
    for (n, &dn) in d.iter().enumerate().skip(1) {
        let c = step.chi(n as i64);
        if c != 0 {
            acc += (c as i64 * dn as i64) as f64 * j_function(w * n as f64)?;
        }
    }
    Ok(PI * h * h / p.sqrt() + 2.0 * x / p.sqrt() * acc)
}

/// Averaged partial sums of `sum_k chi(k) S(k x)/k`; the partial sums stay
/// bounded and oscillate, so the last `k_max/2` of them are averaged.
pub fn h_series_averaged(step: &StepTable, x: Ratio<i64>, k_max: u64) -> f64 {
    let n = *x.denom() as u64;
    let m = *x.numer();
    let mut partial = 0.0;
    let mut avg = 0.0;
    let start = k_max / 2;
    for k in 1..=k_max {
        let c = step.chi(k as i64);
        if c != 0 {
            let s2 = step.twice_at(m * k as i64, n);
            partial += (c as i64 * s2) as f64 / (2.0 * k as f64);
        }
        if k > start {
            avg += partial;
        }
    }
    avg / (k_max - start) as f64
}

/// Weights `chi(k) S(k p/q)` over one period `k mod |D| q`.
fn hs_weights(step: &StepTable, x: Ratio<i64>) -> Vec<f64> {
    let (m, n) = reduce_mod_period(x, step.period());
    let period = step.period() * n;
    (0..period)
        .map(|k| {
            let c = step.chi(k as i64) as i64;
            (c * step.twice_at((k * m) as i64, n)) as f64 / 2.0
        })
        .collect()
}

/// `H_s(x) = sum_k chi(k) S(k x)/k^s` for `s > 1`. Exact at rationals through
/// periodic Hurwitz sums; direct summation with a rigorous tail bound otherwise.
pub fn eval_hs(step: &StepTable, x: Point, s: f64, ctx: &PrecisionContext) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::domain("H_s needs s > 1"));
    }
    match x {
        Point::Rational(r) => {
            let w = hs_weights(step, r);
            Ok(periodic_dirichlet(Complex64::new(s, 0.0), &w, 1, ctx)?.re)
        }
        Point::Real(v) => {
            let smax = step.max_abs() as f64;
            // sum_{k>K} k^{-s} <= K^{1-s}/(s-1)
            let k_max = ((smax / ((s - 1.0) * ctx.rel_tol())).powf(1.0 / (s - 1.0))).ceil();
            if !(k_max < ctx.term_budget() as f64) {
                return Err(Error::BudgetExhausted {
                    budget: ctx.term_budget(),
                    estimate: smax * (ctx.term_budget() as f64).powf(1.0 - s) / (s - 1.0),
                });
            }
            let mut acc = 0.0;
            for k in 1..=k_max as u64 {
                let c = step.chi(k as i64);
                if c != 0 {
                    acc += (c as i64 * step.at_real(k as f64 * v)?) as f64 * (k as f64).powf(-s);
                }
            }
            Ok(acc)
        }
    }
}

/// `C_s(x) = s int_0^infty S(t) S(x t) t^{-s-1} dt` for `s > 0`. Exact at
/// rationals (the integrand is periodic in `t`), quadrature with a rigorous
/// tail bound at reals.
pub fn eval_cs(step: &StepTable, x: Point, s: f64, ctx: &PrecisionContext) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain("C_s needs s > 0"));
    }
    match x {
        Point::Rational(r) => cs_rational(step, r, s, ctx),
        Point::Real(v) => {
            let v = v.abs();
            if v == 0.0 {
                return Ok(0.0);
            }
            let (y, factor) = if v > 1.0 { (1.0 / v, v.powf(s)) } else { (v, 1.0) };
            let smax = step.max_abs() as f64;
            let cutoff = (smax * smax / ctx.rel_tol()).powf(1.0 / s).ceil();
            if !((cutoff * (1.0 + y)) < ctx.term_budget() as f64) {
                return Err(Error::BudgetExhausted {
                    budget: ctx.term_budget(),
                    estimate: smax * smax * (ctx.term_budget() as f64).powf(-s),
                });
            }
            let (head, _) = product_integral(step, y, s, cutoff);
            Ok(factor * s * head)
        }
    }
}

fn cs_rational(step: &StepTable, x: Ratio<i64>, s: f64, ctx: &PrecisionContext) -> Result<f64> {
    let p = x.numer().unsigned_abs();
    let q = x.denom().unsigned_abs();
    if p == 0 {
        return Ok(0.0);
    }
    let per = step.period();
    let plateau = step.plateaus();
    // t = u/p: S(t) jumps at multiples of p, S(x t) = S(u/q) at multiples of q
    let l = per * p * q;
    ctx.charge(per * (p + q), f64::NAN)?;
    let value_at = |u: u64| plateau[((u / p) % per) as usize] * plateau[((u / q) % per) as usize];
    let mut terms = Vec::new();
    let mut before = 0i64;
    let (mut a, mut b) = (p, q);
    loop {
        let u = a.min(b);
        if u > l {
            break;
        }
        let after = if u == l { 0 } else { value_at(u) };
        if after != before {
            terms.push(((after - before) as f64, u as f64 / l as f64));
        }
        before = after;
        if a == u {
            a += p;
        }
        if b == u {
            b += q;
        }
    }
    let sc = Complex64::new(s, 0.0);
    let z = hurwitz_combination(sc, &terms, ctx)?;
    Ok((real_pow(p as f64 / l as f64, sc) * z).re)
}

/// `C_s(x)` from `H_s(x) + x^s H_s(1/x)`, for `s > 1`.
pub fn cs_via_hs(step: &StepTable, x: Ratio<i64>, s: f64, ctx: &PrecisionContext) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    let x = x.abs();
    let xf = *x.numer() as f64 / *x.denom() as f64;
    Ok(eval_hs(step, Point::Rational(x), s, ctx)?
        + xf.powf(s) * eval_hs(step, Point::Rational(x.recip()), s, ctx)?)
}

fn require_minus4(step: &StepTable) -> Result<()> {
    if step.discriminant() != Discriminant::MINUS_4 {
        return Err(Error::domain("this regularization is defined for D = -4 only"));
    }
    Ok(())
}

/// `cos(pi theta/2)`, exact at integer `theta`.
fn cos_quarter(theta: f64) -> f64 {
    let q = theta.round();
    let f = PI / 2.0 * (theta - q);
    match (q as i64).rem_euclid(4) {
        0 => f.cos(),
        1 => -f.sin(),
        2 => -f.cos(),
        _ => f.sin(),
    }
}

fn t_terms(eps: f64, ctx: &PrecisionContext) -> u64 {
    // e^{-k eps} below rel_tol, with headroom for the divisor function
    ((ctx.rel_tol().ln().abs() + 20.0) / eps).ceil() as u64
}

/// `T(x, eps) = 1/2 sum_k chi(k)/k arctan(cos(k pi x/2)/sinh(k eps))` for `D = -4`.
pub fn t_reg(step: &StepTable, x: f64, eps: f64, ctx: &PrecisionContext) -> Result<f64> {
    require_minus4(step)?;
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    let k_max = t_terms(eps, ctx);
    ctx.charge(k_max, f64::NAN)?;
    let xr = x.abs() % 4.0;
    let mut acc = 0.0;
    let mut k = 1u64;
    while k <= k_max {
        let c = if k % 4 == 1 { 1.0 } else { -1.0 };
        let phase = (k as f64 * xr) % 4.0;
        let ke = k as f64 * eps;
        let arg = cos_quarter(phase) / ke.sinh();
        acc += c / k as f64 * arg.atan();
        k += 2;
    }
    Ok(0.5 * acc)
}

/// `T(x, eps) = sum_n chi(n) d(n) e^{-n eps} cos(n pi x/2)/n` for `D = -4`.
pub fn t_reg_exponential(step: &StepTable, x: f64, eps: f64, ctx: &PrecisionContext) -> Result<f64> {
    require_minus4(step)?;
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    let n_max = t_terms(eps, ctx) as usize;
    ctx.charge(n_max as u64, f64::NAN)?;
    let d = divisor_counts(n_max);
    let xr = x.abs() % 4.0;
    let mut acc = 0.0;
    for n in (1..=n_max).step_by(2) {
        let c = if n % 4 == 1 { 1.0 } else { -1.0 };
        let phase = (n as f64 * xr) % 4.0;
        acc += c * d[n] as f64 * (-(n as f64) * eps).exp() * cos_quarter(phase) / n as f64;
    }
    Ok(acc)
}

/// `pi/8 - (2/pi) T(x, eps)`, whose limit as `eps -> 0` regularizes `H(x)`.
pub fn h_regularized(step: &StepTable, x: f64, eps: f64, ctx: &PrecisionContext) -> Result<f64> {
    Ok(PI / 8.0 - 2.0 / PI * t_reg(step, x, eps, ctx)?)
}

/// Richardson extrapolation of `h_regularized` over `eps = 2^{-k}`, assuming
/// an error expansion in integer powers of `eps`.
pub fn h_regularized_limit(step: &StepTable, x: f64, k_lo: i32, k_hi: i32, ctx: &PrecisionContext) -> Result<f64> {
    if k_hi <= k_lo {
        return Err(Error::domain("need k_hi > k_lo"));
    }
    let mut row: Vec<f64> = (k_lo..=k_hi)
        .map(|k| h_regularized(step, x, 2f64.powi(-k), ctx))
        .collect::<Result<_>>()?;
    let mut factor = 2.0;
    while row.len() > 1 {
        row = row.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 2.0;
    }
    Ok(row[0])
}
