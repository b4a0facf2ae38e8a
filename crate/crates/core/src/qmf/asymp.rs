use alloc::vec::Vec;
use core::f64::consts::PI;

use num_integer::Integer;
use num_rational::Ratio;
#[allow(unused_imports)] // inherent once std is linked into the build
use num_traits::Float;
use num_traits::ToPrimitive;

use super::{eval_c_rational, eval_h_rational};
use crate::error::{Error, Result};
use crate::numkernel::{bernoulli, updown};
use crate::special::{least_squares, LeastSquares};
use crate::stepfn::StepTable;

/// Where the expansion variable `nu` lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lattice {
    Integer,
    /// `nu = n + 1/2`.
    HalfInteger,
}

/// The sequence being fitted. `side` is `+1` or `-1` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitTarget {
    /// `side * H(1 + side/nu) ~ 1/4 log nu + h_0 + h_2/nu^2 + h_4/nu^4 + ...`
    HNearOne(Lattice),
    /// `C(1 + side/n) ~ c_0 + (-1/4 log n + c_1)/n + sum_i c_i'/n^i`
    CNearOne,
    /// `C(1/n)` for `n = residue mod |D|`, as a power series in `z = pi/(2n)`.
    CInverse { residue: u64 },
    /// `H((a n + b)/(c n + d))` against `m = |c n + d|`, with `n` of sign `side`.
    HNear { a: i64, c: i64 },
    /// `C((a n + b)/(c n + d))` against `m = |c n + d|`.
    CNear { a: i64, c: i64 },
}

/// Result of a least-squares asymptotic fit.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticFit {
    pub target: FitTarget,
    pub side: i8,
    /// Coefficient of the logarithmic basis function, when there is one.
    pub log_coefficient: Option<f64>,
    pub log_uncertainty: Option<f64>,
    /// Exponents `k` of the basis functions `m^{-k}` (or `z^k` for `CInverse`).
    pub powers: Vec<i32>,
    pub constants: Vec<f64>,
    pub uncertainties: Vec<f64>,
    pub residual: f64,
    pub points: usize,
}

impl AsymptoticFit {
    /// The fitted coefficient of `m^{-k}` (or `z^k`).
    pub fn coefficient(&self, k: i32) -> Option<f64> {
        self.powers.iter().position(|&p| p == k).map(|i| self.constants[i])
    }

    pub fn uncertainty(&self, k: i32) -> Option<f64> {
        self.powers.iter().position(|&p| p == k).map(|i| self.uncertainties[i])
    }
}

/// `(b, d)` with `a d - b c = 1`.
fn complete(a: i64, c: i64) -> Result<(i64, i64)> {
    let e = a.extended_gcd(&c);
    if e.gcd.abs() != 1 || c == 0 {
        return Err(Error::domain("a/c must be a reduced fraction with c != 0"));
    }
    // a x + c y = +-1, so d = x, b = -y up to the sign
    let (d, b) = if e.gcd == 1 { (e.x, -e.y) } else { (-e.x, e.y) };
    Ok((b, d))
}

struct Layout {
    has_log: bool,
    /// The log basis is `log m / m` instead of `log m`.
    log_over_m: bool,
    powers: Vec<i32>,
}

fn layout(target: &FitTarget, terms: usize) -> Layout {
    match target {
        FitTarget::HNearOne(_) => Layout {
            has_log: true,
            log_over_m: false,
            powers: (0..terms as i32).map(|k| 2 * k).collect(),
        },
        FitTarget::CNearOne | FitTarget::CNear { .. } => Layout {
            has_log: true,
            log_over_m: true,
            powers: (0..terms as i32).collect(),
        },
        FitTarget::CInverse { .. } => Layout {
            has_log: false,
            log_over_m: false,
            powers: (1..=terms as i32).collect(),
        },
        FitTarget::HNear { .. } => Layout {
            has_log: true,
            log_over_m: false,
            powers: (0..terms as i32).collect(),
        },
    }
}

/// `(m, y)` samples for the indices `n`.
fn samples(step: &StepTable, target: &FitTarget, side: i8, ns: &[u64]) -> Result<Vec<(f64, f64)>> {
    let sf = side as i64;
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        let n = n as i64;
        let pt = match *target {
            FitTarget::HNearOne(Lattice::Integer) => (n as f64, sf as f64 * eval_h_rational(step, Ratio::new(n + sf, n))),
            FitTarget::HNearOne(Lattice::HalfInteger) => {
                let den = 2 * n + 1;
                (den as f64 / 2.0, sf as f64 * eval_h_rational(step, Ratio::new(den + 2 * sf, den)))
            }
            FitTarget::CNearOne => (n as f64, eval_c_rational(step, Ratio::new(n + sf, n))),
            FitTarget::CInverse { .. } => (PI / (2.0 * n as f64), eval_c_rational(step, Ratio::new(1, n))),
            FitTarget::HNear { a, c } | FitTarget::CNear { a, c } => {
                let (b, d) = complete(a, c)?;
                let k = sf * n;
                let den = c * k + d;
                let x = Ratio::new(a * k + b, den);
                let y = if matches!(target, FitTarget::HNear { .. }) {
                    eval_h_rational(step, x)
                } else {
                    eval_c_rational(step, x)
                };
                ((den as f64).abs(), y)
            }
        };
        out.push(pt);
    }
    Ok(out)
}

fn solve(lay: &Layout, target: &FitTarget, pts: &[(f64, f64)]) -> Result<LeastSquares> {
    let cols = lay.powers.len() + lay.has_log as usize;
    let mut a = Vec::with_capacity(pts.len() * cols);
    let mut b = Vec::with_capacity(pts.len());
    let inverse = matches!(target, FitTarget::CInverse { .. });
    for &(m, y) in pts {
        if lay.has_log {
            a.push(if lay.log_over_m { m.ln() / m } else { m.ln() });
        }
        for &k in &lay.powers {
            a.push(if inverse { m.powi(k) } else { m.powi(-k) });
        }
        b.push(y);
    }
    least_squares(&a, pts.len(), cols, &b)
}

fn sample_indices(target: &FitTarget, step: &StepTable, lo: u64, hi: u64, count: usize) -> Vec<u64> {
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (count.max(2) - 1) as f64);
    let mut out: Vec<u64> = Vec::new();
    for i in 0..count.max(2) {
        let mut n = (lo as f64 * ratio.powi(i as i32)).round() as u64;
        if let FitTarget::CInverse { residue } = target {
            let p = step.period();
            n += (residue % p + p - n % p) % p;
        }
        if n <= hi && out.last().map_or(true, |&l| n > l) {
            out.push(n);
        }
    }
    out
}

/// Closed form of `h_{2i}` in `H(1 +- 1/n)` for `i >= 1`:
/// `(-1)^(i-1) (2^(2i-1) - 1)^2 B_{2i}^2 pi^(2i) / (2i (2i)! 4^i)`.
pub fn h_coefficient(i: u32) -> Result<f64> {
    if i == 0 || i > 20 {
        return Err(Error::domain("closed form implemented for 1 <= i <= 20"));
    }
    let k = 2 * i as usize;
    let b = bernoulli(k).to_f64().ok_or_else(|| Error::domain("Bernoulli number out of range"))?;
    let odd = ((1u64 << (k - 1)) - 1) as f64;
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * odd * odd * b * b * PI.powi(k as i32) / (k as f64 * fact * 4f64.powi(i as i32)))
}

/// Predicted coefficient of `(pi/(2n))^(k+1)` in `C(1/n)` for `n = residue`
/// mod 4 (`D = -4`): `chi(n - k + 1) A_k^2 / (4 k!)` for `k >= 1`, and `1/4` at `k = 0`.
pub fn c_inverse_coefficient(step: &StepTable, residue: u64, k: u32) -> Result<f64> {
    if k > 20 {
        return Err(Error::domain("closed form implemented for k <= 20"));
    }
    let twist = if k == 0 {
        1.0
    } else {
        step.chi(residue as i64 - k as i64 + 1) as f64
    };
    let a = updown(k as usize).to_f64().ok_or_else(|| Error::domain("up/down number out of range"))?;
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    Ok(twist * a * a / (4.0 * fact))
}

/// Least-squares fit of an asymptotic expansion over `n` in `[n_lo, n_hi]`,
/// which must span at least a decade. Each uncertainty is the larger of two
/// changes: adding one and then two more terms (summed, plus the widest fit's
/// standard error), or dropping the lower quarter of the range on a log scale.
pub fn asymp_fit(
    step: &StepTable,
    target: FitTarget,
    side: i8,
    n_lo: u64,
    n_hi: u64,
    terms: usize,
) -> Result<AsymptoticFit> {
    if side != 1 && side != -1 {
        return Err(Error::domain("side must be +1 or -1"));
    }
    if n_lo < 2 || n_hi < 10 * n_lo {
        return Err(Error::domain("the fit range must span at least a decade"));
    }
    if terms == 0 {
        return Err(Error::domain("need at least one term"));
    }
    let count = 160;
    let ns = sample_indices(&target, step, n_lo, n_hi, count);
    let pts = samples(step, &target, side, &ns)?;
    let lay = layout(&target, terms);
    let fit = solve(&lay, &target, &pts)?;
    let (base, residual) = (&fit.coeffs, fit.rms);

    let wide = solve(&layout(&target, terms + 1), &target, &pts)?.coeffs;
    let wider_fit = solve(&layout(&target, terms + 2), &target, &pts)?;
    let wider = &wider_fit.coeffs;
    let cut = ns.len() / 4;
    let upper = solve(&lay, &target, &pts[cut..])?.coeffs;
    // the one-term change misses the wider fits' own error, so add the next change
    // and the widest fit's standard error
    let unc: Vec<f64> = (0..base.len())
        .map(|i| {
            let truncation =
                (wide[i] - base[i]).abs() + (wider[i] - wide[i]).abs() + wider_fit.std_errors[i];
            truncation.max((upper[i] - base[i]).abs()) + fit.std_errors[i]
        })
        .collect();

    let off = lay.has_log as usize;
    Ok(AsymptoticFit {
        target,
        side,
        log_coefficient: lay.has_log.then(|| base[0]),
        log_uncertainty: lay.has_log.then(|| unc[0]),
        powers: lay.powers,
        constants: base[off..].to_vec(),
        uncertainties: unc[off..].to_vec(),
        residual,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::Discriminant;
    use crate::special::EULER_GAMMA;

    fn step4() -> StepTable {
        StepTable::new(Discriminant::MINUS_4)
    }

    #[test]
    fn completion() {
        for (a, c) in [(1, 1), (3, 5), (-7, 3), (5, -9)] {
            let (b, d) = complete(a, c).unwrap();
            assert_eq!(a * d - b * c, 1);
        }
        assert!(complete(2, 4).is_err());
    }

    #[test]
    fn h_near_one() {
        let s = step4();
        let h0p = PI / 8.0 + EULER_GAMMA / 4.0 + (8.0 / PI).ln() / 4.0;
        let plus = asymp_fit(&s, FitTarget::HNearOne(Lattice::Integer), 1, 40, 4000, 6).unwrap();
        assert!((plus.log_coefficient.unwrap() - 0.25).abs() < 1e-8);
        assert!((plus.coefficient(0).unwrap() - h0p).abs() < 1e-7, "{plus:?}");
        assert!((plus.coefficient(2).unwrap() - PI * PI / 576.0).abs() < 1e-6, "{plus:?}");
        let minus = asymp_fit(&s, FitTarget::HNearOne(Lattice::Integer), -1, 40, 4000, 6).unwrap();
        assert!((minus.coefficient(0).unwrap() - (h0p - PI / 4.0)).abs() < 1e-7);
    }

    #[test]
    fn h_near_one_half_integers() {
        let s = step4();
        let fit = asymp_fit(&s, FitTarget::HNearOne(Lattice::HalfInteger), 1, 40, 4000, 6).unwrap();
        assert!((fit.log_coefficient.unwrap() - 0.25).abs() < 1e-8);
        assert!((fit.coefficient(2).unwrap() + 7.0 * PI * PI / 1152.0).abs() < 1e-6, "{fit:?}");
    }

    #[test]
    fn c_near_one() {
        let s = step4();
        let fit = asymp_fit(&s, FitTarget::CNearOne, 1, 40, 4000, 7).unwrap();
        assert!((fit.log_coefficient.unwrap() + 0.25).abs() < 1e-6, "{fit:?}");
        assert!((fit.coefficient(0).unwrap() - PI / 4.0).abs() < 1e-9);
        assert!((fit.coefficient(1).unwrap() + 0.235_282_748_484_268).abs() < 1e-6, "{fit:?}");
        assert!((fit.coefficient(2).unwrap() + 0.125).abs() < 1e-5, "{fit:?}");
    }

    #[test]
    fn c_at_inverse_integers() {
        let s = step4();
        for r in 0..4u64 {
            let fit = asymp_fit(&s, FitTarget::CInverse { residue: r }, 1, 40, 4000, 5).unwrap();
            let chi = |k: i64| s.chi(r as i64 - k + 1) as f64;
            assert!((fit.coefficient(1).unwrap() - 0.25).abs() < 1e-8, "{fit:?}");
            assert!((fit.coefficient(2).unwrap() - chi(1) / 4.0).abs() < 1e-6, "{fit:?}");
            assert!((fit.coefficient(3).unwrap() - chi(2) / 8.0).abs() < 1e-4, "{fit:?}");
        }
    }

    #[test]
    fn c_at_inverse_integers_matches_updown_numbers() {
        let s = step4();
        for r in 0..4u64 {
            let fit = asymp_fit(&s, FitTarget::CInverse { residue: r }, 1, 40, 4000, 7).unwrap();
            for k in 0..=3u32 {
                let want = c_inverse_coefficient(&s, r, k).unwrap();
                let got = fit.coefficient(k as i32 + 1).unwrap();
                let unc = fit.uncertainty(k as i32 + 1).unwrap();
                assert!((got - want).abs() <= unc, "r = {r}, k = {k}: {got} vs {want} (+- {unc:e})");
            }
        }
        assert_eq!(c_inverse_coefficient(&s, 3, 3).unwrap(), 1.0 / 6.0);
        assert_eq!(c_inverse_coefficient(&s, 0, 2).unwrap(), -1.0 / 8.0);
    }

    #[test]
    fn h_coefficients_closed_form() {
        assert!((h_coefficient(1).unwrap() - PI * PI / 576.0).abs() < 1e-16);
        assert!((h_coefficient(2).unwrap() + 49.0 * PI.powi(4) / 1_382_400.0).abs() < 1e-16);
        let fit = asymp_fit(&step4(), FitTarget::HNearOne(Lattice::Integer), 1, 40, 4000, 6).unwrap();
        for i in 1..=2u32 {
            let k = 2 * i as i32;
            let (got, unc) = (fit.coefficient(k).unwrap(), fit.uncertainty(k).unwrap());
            assert!((got - h_coefficient(i).unwrap()).abs() <= unc, "h_{k}: {got} +- {unc:e}");
        }
        assert!((h_coefficient(2).unwrap() + 0.003_452_723_85).abs() < 1e-11);
    }

    #[test]
    fn general_base_point() {
        let s = step4();
        let fit = asymp_fit(&s, FitTarget::HNear { a: 1, c: 3 }, 1, 40, 4000, 6).unwrap();
        assert!((fit.log_coefficient.unwrap() - 1.0 / 12.0).abs() < 1e-6, "{fit:?}");
        let fit = asymp_fit(&s, FitTarget::CNear { a: 1, c: 3 }, 1, 40, 4000, 6).unwrap();
        let c13 = eval_c_rational(&s, Ratio::new(1, 3));
        assert!((fit.coefficient(0).unwrap() - c13).abs() < 1e-8, "{fit:?}");
        assert!(asymp_fit(&s, FitTarget::CNearOne, 1, 40, 200, 4).is_err());
    }
}
