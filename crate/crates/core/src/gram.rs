//! Gram matrices of dilated `H`, the bordered-determinant ratio `R(N)` and the
//! distance `d(xi, V_N)^2`, grown one column at a time.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent once std is linked into the build
use num_traits::Float;

use crate::cotsum::{CValueCache, CotTables};
use crate::error::{Error, Result};
use crate::lfun::l_chi;
use crate::numkernel::{Discriminant, PrecisionContext};
use crate::special::least_squares;
use crate::stepfn::StepTable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub n: usize,
    pub r: f64,
    pub dist2: f64,
    pub log_det_c: f64,
}

/// Incremental Cholesky factor of `C_N = (c_{m,n})` together with the
/// solution `y` of `L y = (1, ..., N)`.
#[derive(Debug, Clone)]
pub struct GramSweepState {
    step: StepTable,
    /// `pi h'(D)^2`; the corner of the bordered matrix is `N` divided by this.
    scale: f64,
    chol: Vec<Vec<f64>>,
    border: Vec<f64>,
    border_norm2: f64,
    log_det: f64,
    records: Vec<SweepRecord>,
    tables: CotTables,
}

impl GramSweepState {
    pub fn new(d: Discriminant) -> Self {
        let step = StepTable::new(d);
        let mean = step.mean();
        let h = *mean.numer() as f64 / *mean.denom() as f64;
        let tables = CotTables::new(step.period());
        Self {
            step,
            scale: PI * h * h,
            chol: Vec::new(),
            border: Vec::new(),
            border_norm2: 0.0,
            log_det: 0.0,
            records: Vec::new(),
            tables,
        }
    }

    pub fn discriminant(&self) -> Discriminant {
        self.step.discriminant()
    }

    pub fn step(&self) -> &StepTable {
        &self.step
    }

    /// Current matrix size `N`.
    pub fn size(&self) -> usize {
        self.chol.len()
    }

    pub fn records(&self) -> &[SweepRecord] {
        &self.records
    }

    /// Rows of the lower-triangular factor; row `i` has `i + 1` entries.
    pub fn factor(&self) -> &[Vec<f64>] {
        &self.chol
    }

    /// Appends column `N + 1`, given as `c_{m, N+1}` for `m = 1..=N+1`.
    pub fn push_column(&mut self, column: &[f64]) -> Result<SweepRecord> {
        let n = self.chol.len();
        if column.len() != n + 1 {
            return Err(Error::domain("column length must be N + 1"));
        }
        let mut row = Vec::with_capacity(n + 1);
        for i in 0..n {
            let li = &self.chol[i];
            let dot: f64 = li[..i].iter().zip(&row).map(|(a, b)| a * b).sum();
            row.push((column[i] - dot) / li[i]);
        }
        let pivot = column[n] - row.iter().map(|x| x * x).sum::<f64>();
        let size = n + 1;
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { n: size, pivot });
        }
        let diag = pivot.sqrt();
        let dot: f64 = row.iter().zip(&self.border).map(|(a, b)| a * b).sum();
        let y = (size as f64 - dot) / diag;
        row.push(diag);
        self.chol.push(row);
        self.border.push(y);
        self.border_norm2 += y * y;
        self.log_det += 2.0 * diag.ln();
        let nf = size as f64;
        let q = self.border_norm2;
        let record = SweepRecord {
            n: size,
            r: nf / (nf / self.scale - q),
            dist2: 1.0 - self.scale * q / nf,
            log_det_c: self.log_det,
        };
        self.records.push(record);
        Ok(record)
    }

    /// Entries `c_{m, N}` for `m = 1..=N`, read through the cache.
    pub fn column(&mut self, size: usize, cache: &mut CValueCache, ctx: &PrecisionContext) -> Result<Vec<f64>> {
        (1..=size as u64)
            .map(|m| cache.c_value(&self.step, &mut self.tables, m, size as u64, ctx))
            .collect()
    }

    /// Grows the sweep to `upto`, recording every intermediate `N`.
    pub fn extend(&mut self, upto: usize, cache: &mut CValueCache, ctx: &PrecisionContext) -> Result<()> {
        if upto <= self.size() {
            return Err(Error::domain("sweep target must exceed the current size"));
        }
        for size in self.size() + 1..=upto {
            let col = self.column(size, cache, ctx)?;
            self.push_column(&col)?;
        }
        Ok(())
    }
}

/// The full matrix `C_N`.
pub fn gram_matrix(d: Discriminant, n: usize, ctx: &PrecisionContext) -> Result<Vec<Vec<f64>>> {
    let step = StepTable::new(d);
    let mut tables = CotTables::new(step.period());
    let mut cache = CValueCache::new();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = cache.c_value(&step, &mut tables, i as u64 + 1, j as u64 + 1, ctx)?;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

/// Dense Cholesky factorization of a symmetric positive-definite matrix.
pub fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = vec![0.0; i + 1];
        for j in 0..=i {
            if i == j {
                let pivot = a[i][i] - row[..i].iter().map(|x| x * x).sum::<f64>();
                if !(pivot > 0.0) {
                    return Err(Error::NotPositiveDefinite { n: i + 1, pivot });
                }
                row[j] = pivot.sqrt();
            } else {
                let dot: f64 = (0..j).map(|k| row[k] * l[j][k]).sum();
                row[j] = (a[i][j] - dot) / l[j][j];
            }
        }
        l.push(row);
    }
    Ok(l)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap_or(k);
        if m[p][k] == 0.0 {
            return Err(Error::domain("singular matrix"));
        }
        m.swap(k, p);
        x.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f != 0.0 {
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (x[k] - s) / m[k][k];
    }
    Ok(x)
}

/// `d(xi, V_N)^2` from the normal equations with Gram entries
/// `pi/(|D| N) c_{m,n}` and right-hand side `(n/N) L(1, chi_D)`.
pub fn distance_direct(d: Discriminant, n: usize, ctx: &PrecisionContext) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("N must be positive"));
    }
    let nf = n as f64;
    let scale = PI / (d.modulus() as f64 * nf);
    let g: Vec<Vec<f64>> = gram_matrix(d, n, ctx)?
        .into_iter()
        .map(|row| row.into_iter().map(|v| v * scale).collect())
        .collect();
    let l1 = l_chi(d, Complex64::new(1.0, 0.0), ctx)?.re;
    let b: Vec<f64> = (1..=n).map(|k| k as f64 / nf * l1).collect();
    let x = solve_dense(&g, &b)?;
    Ok(1.0 - b.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_error: f64,
    pub residual: f64,
    pub points: usize,
}

/// Least-squares fit `R(N) = slope log N + intercept` over `from <= N <= to`.
pub fn fit_log(records: &[SweepRecord], from: usize, to: usize) -> Result<LogFit> {
    if from < 2 || to <= from {
        return Err(Error::domain("fit window needs 2 <= from < to"));
    }
    let pts: Vec<&SweepRecord> = records.iter().filter(|r| r.n >= from && r.n <= to).collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: pts.len(),
        });
    }
    let a: Vec<f64> = pts.iter().flat_map(|r| [(r.n as f64).ln(), 1.0]).collect();
    let b: Vec<f64> = pts.iter().map(|r| r.r).collect();
    let ls = least_squares(&a, pts.len(), 2, &b)?;
    Ok(LogFit {
        slope: ls.coeffs[0],
        intercept: ls.coeffs[1],
        slope_std_error: ls.std_errors[0],
        residual: ls.rms,
        points: pts.len(),
    })
}

/// Upper bound `(pi/8) |rho|^2 / (Re rho - 1/2)` on `R(N)` implied by a zero `rho`
/// of `L(s, chi_{-4})` off the critical line.
pub fn zero_bound(rho: Complex64) -> Result<f64> {
    if !(rho.re > 0.5) {
        return Err(Error::domain("zero must satisfy Re rho > 1/2"));
    }
    Ok(PI / 8.0 * rho.norm_sqr() / (rho.re - 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn sweep(d: i64, n: usize) -> GramSweepState {
        let mut s = GramSweepState::new(Discriminant::new(d).unwrap());
        let mut cache = CValueCache::new();
        s.extend(n, &mut cache, &ctx()).unwrap();
        s
    }

    #[test]
    fn first_record() {
        let s = sweep(-4, 1);
        let r = s.records()[0];
        assert!((r.r - PI / (4.0 - PI)).abs() < 1e-14);
        assert!((r.dist2 - (1.0 - PI / 4.0)).abs() < 1e-15);
        assert!((distance_direct(Discriminant::MINUS_4, 1, &ctx()).unwrap() - (1.0 - PI / 4.0)).abs() < 1e-14);
    }

    #[test]
    fn distance_identity_and_bounds() {
        let s = sweep(-4, 96);
        for r in s.records() {
            assert!((r.dist2 * r.r - PI / 4.0).abs() < 1e-10, "N = {}", r.n);
            assert!(r.dist2 > 0.0 && r.dist2 < 1.0);
        }
        let recs = s.records();
        for k in [1usize, 3] {
            let mut n = k;
            while 2 * n <= 96 {
                assert!(recs[2 * n - 1].dist2 < recs[n - 1].dist2, "{n} -> {}", 2 * n);
                n *= 2;
            }
        }
    }

    #[test]
    fn sweep_matches_direct_solve() {
        let s = sweep(-4, 64);
        let direct = distance_direct(Discriminant::MINUS_4, 64, &ctx()).unwrap();
        assert!((s.records()[63].dist2 - direct).abs() < 1e-10);
        let s = sweep(-3, 32);
        let direct = distance_direct(Discriminant::MINUS_3, 32, &ctx()).unwrap();
        assert!((s.records()[31].dist2 - direct).abs() < 1e-10);
        let s = sweep(-7, 24);
        let direct = distance_direct(Discriminant::new(-7).unwrap(), 24, &ctx()).unwrap();
        assert!((s.records()[23].dist2 - direct).abs() < 1e-10);
    }

    #[test]
    fn incremental_matches_scratch_factor() {
        let s = sweep(-4, 64);
        let full = cholesky(&gram_matrix(Discriminant::MINUS_4, 64, &ctx()).unwrap()).unwrap();
        for (a, b) in s.factor().iter().zip(&full) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= 1e-12 * y.abs().max(1e-300) || (x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_indefinite_column() {
        let mut s = GramSweepState::new(Discriminant::MINUS_4);
        s.push_column(&[1.0]).unwrap();
        assert!(matches!(
            s.push_column(&[2.0, 1.0]),
            Err(Error::NotPositiveDefinite { n: 2, .. })
        ));
    }

    #[test]
    fn log_fit_on_synthetic_data() {
        let recs: Vec<SweepRecord> = (1..=50)
            .map(|n| SweepRecord {
                n,
                r: 2.0 * (n as f64).ln() + 1.0,
                dist2: 0.0,
                log_det_c: 0.0,
            })
            .collect();
        let f = fit_log(&recs, 2, 50).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert!(matches!(fit_log(&recs, 2, 3), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn zero_bound_values() {
        let b = zero_bound(Complex64::new(0.75, 0.0)).unwrap();
        assert!((b - 9.0 * PI / 32.0).abs() < 1e-15);
        assert!((zero_bound(Complex64::new(1.0, 0.0)).unwrap() - PI / 4.0).abs() < 1e-15);
        let eps = (2.0f64).powi(-30);
        let b = zero_bound(Complex64::new(0.5 + eps, 0.0)).unwrap();
        assert!((b * eps - PI / 32.0).abs() < 1e-9);
        assert!(zero_bound(Complex64::new(0.5, 14.0)).is_err());
    }
}
