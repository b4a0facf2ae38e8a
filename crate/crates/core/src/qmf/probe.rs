use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::Ratio;
#[allow(unused_imports)] // inherent once std is linked into the build
use num_traits::Float;

use super::group::{cocycle_c_gamma, GroupElement};
use super::{eval_c_rational, eval_h_rational};
use crate::error::{Error, Result};
use crate::special::least_squares;
use crate::stepfn::StepTable;

/// The function sampled by a continuity probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeFunction {
    H,
    C,
    CGamma(GroupElement),
}

/// One-sided samples `f(x0 +- 1/n)` and derived statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub x0: Ratio<i64>,
    pub center: f64,
    /// Offset denominators `n`, radius `1/n`, in increasing order.
    pub offsets: Vec<u64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// Spread of `{f(x0)} u {f(x0 +- 1/m) : m >= n}` for each `n`.
    pub oscillation_left: Vec<f64>,
    pub oscillation_right: Vec<f64>,
    /// `(f(x0 + r) - f(x0))/r` and `(f(x0) - f(x0 - r))/r`.
    pub slope_left: Vec<f64>,
    pub slope_right: Vec<f64>,
    /// Least-squares `(a, b)` with slope `~ a log r + b`.
    pub log_fit_left: (f64, f64),
    pub log_fit_right: (f64, f64),
}

impl ProbeReport {
    /// True when the oscillation at the smallest radius is below `ratio`
    /// times the oscillation at the largest, on both sides.
    pub fn oscillation_decays(&self, ratio: f64) -> bool {
        let ok = |o: &[f64]| match (o.first(), o.last()) {
            (Some(&a), Some(&b)) => b <= ratio * a,
            _ => false,
        };
        ok(&self.oscillation_left) && ok(&self.oscillation_right)
    }
}

/// Roughly geometric offsets between `lo` and `hi`, odd and coprime to `den`.
pub fn default_offsets(den: u64, lo: u64, hi: u64, count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    let count = count.max(2);
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (count - 1) as f64);
    for i in 0..count {
        let mut n = (lo as f64 * ratio.powi(i as i32)).round() as u64 | 1;
        while n.gcd(&den) != 1 {
            n += 2;
        }
        if out.last().map_or(true, |&l| n > l) {
            out.push(n);
        }
    }
    out
}

fn sample(step: &StepTable, f: &ProbeFunction, x: Ratio<i64>) -> Result<f64> {
    match f {
        ProbeFunction::H => Ok(eval_h_rational(step, x)),
        ProbeFunction::C => Ok(eval_c_rational(step, x)),
        ProbeFunction::CGamma(g) => cocycle_c_gamma(step, g, x),
    }
}

fn oscillation(center: f64, values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let (mut lo, mut hi) = (center, center);
    for v in values.iter().rev() {
        lo = lo.min(*v);
        hi = hi.max(*v);
        out.push(hi - lo);
    }
    out.reverse();
    out
}

fn log_fit(offsets: &[u64], slopes: &[f64]) -> Result<(f64, f64)> {
    let a: Vec<f64> = offsets.iter().flat_map(|&n| [-(n as f64).ln(), 1.0]).collect();
    let c = least_squares(&a, offsets.len(), 2, slopes)?.coeffs;
    Ok((c[0], c[1]))
}

/// Samples `f` at `x0 +- 1/n` for each offset `n`.
pub fn continuity_probe(step: &StepTable, f: ProbeFunction, x0: Ratio<i64>, offsets: &[u64]) -> Result<ProbeReport> {
    if offsets.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: offsets.len(),
        });
    }
    let mut offsets = offsets.to_vec();
    offsets.sort_unstable();
    offsets.dedup();
    let center = sample(step, &f, x0)?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut slope_left = Vec::new();
    let mut slope_right = Vec::new();
    for &n in &offsets {
        let r = Ratio::new(1, n as i64);
        let l = sample(step, &f, x0 - r)?;
        let rt = sample(step, &f, x0 + r)?;
        slope_left.push((center - l) * n as f64);
        slope_right.push((rt - center) * n as f64);
        left.push(l);
        right.push(rt);
    }
    Ok(ProbeReport {
        x0,
        center,
        oscillation_left: oscillation(center, &left),
        oscillation_right: oscillation(center, &right),
        log_fit_left: log_fit(&offsets, &slope_left)?,
        log_fit_right: log_fit(&offsets, &slope_right)?,
        offsets,
        left,
        right,
        slope_left,
        slope_right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::Discriminant;

    #[test]
    fn c_is_continuous_h_is_not() {
        let step = StepTable::new(Discriminant::MINUS_4);
        let x0 = Ratio::from_integer(1);
        let offs = default_offsets(1, 9, 4001, 12);
        let c = continuity_probe(&step, ProbeFunction::C, x0, &offs).unwrap();
        assert!(c.oscillation_decays(0.05), "{:?}", c.oscillation_right);
        // slopes diverge logarithmically with coefficient 1/4 in size
        assert!((c.log_fit_right.0.abs() - 0.25).abs() < 0.02, "{:?}", c.log_fit_right);
        assert!((c.log_fit_left.0.abs() - 0.25).abs() < 0.02, "{:?}", c.log_fit_left);
        let h = continuity_probe(&step, ProbeFunction::H, x0, &offs).unwrap();
        assert!(!h.oscillation_decays(0.5));
    }

    #[test]
    fn offsets_are_coprime() {
        let o = default_offsets(15, 10, 1000, 8);
        assert!(o.iter().all(|n| n.gcd(&15) == 1 && n % 2 == 1));
        assert!(o.windows(2).all(|w| w[0] < w[1]));
    }
}
