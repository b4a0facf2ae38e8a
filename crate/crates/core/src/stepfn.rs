//! The step function `S_D`: even, `|D|`-periodic, constant between jumps and
//! equal to the midpoint value at each jump.

use alloc::vec::Vec;

use num_rational::Ratio;
#[allow(unused_imports)] // inherent once std is linked into the build
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numkernel::{chi_table, Discriminant, ReducedFraction};

/// Precomputed plateau values of `S_D` over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTable {
    disc: Discriminant,
    chi: Vec<i8>,
    /// `plateau[j]` is the value of `S_D` on `(j, j+1)`.
    plateau: Vec<i64>,
}

impl StepTable {
    pub fn new(disc: Discriminant) -> Self {
        let chi = chi_table(disc);
        let mut plateau = Vec::with_capacity(chi.len());
        let mut acc = 0i64;
        for &c in &chi {
            acc += c as i64;
            plateau.push(acc);
        }
        // the full-period sum vanishes, so plateau[P-1] = 0
        debug_assert_eq!(acc, 0);
        Self { disc, chi, plateau }
    }

    pub fn discriminant(&self) -> Discriminant {
        self.disc
    }

    pub fn period(&self) -> u64 {
        self.chi.len() as u64
    }

    pub fn chi_values(&self) -> &[i8] {
        &self.chi
    }

    pub fn plateaus(&self) -> &[i64] {
        &self.plateau
    }

    /// `chi_D(n)` by table lookup.
    pub fn chi(&self, n: i64) -> i8 {
        self.chi[n.rem_euclid(self.period() as i64) as usize]
    }

    /// Largest value of `|S_D|`.
    pub fn max_abs(&self) -> i64 {
        self.plateau.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Average of `S_D` over a period, equal to `h'(D)`.
    pub fn mean(&self) -> Ratio<i64> {
        let sum: i64 = self.plateau.iter().sum();
        Ratio::new(sum, self.period() as i64)
    }

    /// `2 S_D(num/den)`, always an integer.
    pub fn twice_at(&self, num: i64, den: u64) -> i64 {
        let p = self.period();
        let a = num.unsigned_abs();
        let j = ((a / den) % p) as usize;
        if a % den == 0 {
            let prev = (j + p as usize - 1) % p as usize;
            self.plateau[prev] + self.plateau[j]
        } else {
            2 * self.plateau[j]
        }
    }

    pub fn at_rational(&self, x: Ratio<i64>) -> Result<Ratio<i64>> {
        if *x.denom() <= 0 {
            return Err(Error::domain("non-positive denominator"));
        }
        Ok(Ratio::new(self.twice_at(*x.numer(), *x.denom() as u64), 2))
    }

    pub fn at_fraction(&self, x: ReducedFraction) -> Ratio<i64> {
        Ratio::new(self.twice_at(x.num() as i64, x.den()), 2)
    }

    /// `S_D(x)` for a real argument. Fails when `x` is within rounding of a jump.
    pub fn at_real(&self, x: f64) -> Result<i64> {
        if !x.is_finite() {
            return Err(Error::domain("non-finite argument"));
        }
        let a = x.abs();
        let j = a.round();
        if (a - j).abs() <= 4.0 * f64::EPSILON * a.max(1.0) && self.chi(j as i64) != 0 {
            return Err(Error::AmbiguousBreakpoint(x));
        }
        let p = self.period() as f64;
        let idx = (a.floor() % p) as usize;
        Ok(self.plateau[idx])
    }

    /// Partial sum `h' - (sqrt|D|/pi) sum_{m<=terms} chi(m) cos(2 pi m x/|D|)/m`
    /// of the Fourier series of `S_D`.
    pub fn fourier_partial(&self, x: f64, terms: u64) -> f64 {
        let p = self.period() as f64;
        let pi = core::f64::consts::PI;
        let mean = self.mean();
        let h = *mean.numer() as f64 / *mean.denom() as f64;
        let xr = x.abs() % p;
        let mut acc = 0.0;
        for m in 1..=terms {
            let c = self.chi(m as i64);
            if c == 0 {
                continue;
            }
            let phase = (m as f64 * xr) % p;
            acc += c as f64 * (2.0 * pi * phase / p).cos() / m as f64;
        }
        h - p.sqrt() / pi * acc
    }

    /// Jump points `t` of `t -> S_D(scale t)` in `(lo, hi]`, where `scale > 0`.
    pub fn breakpoints_in(&self, scale: f64, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if !(scale > 0.0) || !(hi > lo) {
            return out;
        }
        let first = (lo * scale).floor() as i64;
        let last = (hi * scale).floor() as i64;
        for j in first..=last {
            if self.chi(j) == 0 {
                continue;
            }
            let t = j as f64 / scale;
            if t > lo && t <= hi {
                out.push(t);
            }
        }
        out
    }

    /// Exact jump points of `t -> S_D(scale t)` in `(lo, hi]` for `t >= 0`.
    pub fn breakpoints_exact(
        &self,
        scale: ReducedFraction,
        lo: ReducedFraction,
        hi: ReducedFraction,
    ) -> Result<Vec<ReducedFraction>> {
        if scale.num() == 0 {
            return Err(Error::domain("scale must be positive"));
        }
        let mut out = Vec::new();
        if hi <= lo {
            return Ok(out);
        }
        // jumps at t = j * den / num for integers j with chi(j) != 0
        let first = (lo.num() as u128 * scale.num() as u128) / (lo.den() as u128 * scale.den() as u128);
        let last = (hi.num() as u128 * scale.num() as u128) / (hi.den() as u128 * scale.den() as u128);
        for j in first..=last {
            if self.chi(j as i64) == 0 {
                continue;
            }
            let t = ReducedFraction::new(j as u64 * scale.den(), scale.num())?;
            if t > lo && t <= hi {
                out.push(t);
            }
        }
        Ok(out)
    }
}
