//! Integer and rational primitives: discriminants, the Kronecker character,
//! reduced fractions, divisor sums, Bernoulli and up/down numbers.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Tolerance and work limits threaded through every numerical routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    rel_tol: f64,
    term_budget: u64,
}

impl PrecisionContext {
    pub const DEFAULT_REL_TOL: f64 = 1e-12;
    pub const DEFAULT_TERM_BUDGET: u64 = 4_000_000_000;

    pub fn new(rel_tol: f64, term_budget: u64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::domain("rel_tol must lie in (0, 1)"));
        }
        if term_budget == 0 {
            return Err(Error::domain("term budget must be positive"));
        }
        Ok(Self {
            rel_tol,
            term_budget,
        })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn term_budget(&self) -> u64 {
        self.term_budget
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        Self::new(rel_tol, self.term_budget)
    }

    pub fn with_term_budget(self, term_budget: u64) -> Result<Self> {
        Self::new(self.rel_tol, term_budget)
    }

    /// Fails with `BudgetExhausted` when `needed` exceeds the budget.
    pub fn charge(&self, needed: u64, estimate: f64) -> Result<()> {
        if needed > self.term_budget {
            Err(Error::BudgetExhausted {
                budget: self.term_budget,
                estimate,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            rel_tol: Self::DEFAULT_REL_TOL,
            term_budget: Self::DEFAULT_TERM_BUDGET,
        }
    }
}

/// A non-negative fraction `num/den` in lowest terms with `den >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReducedFraction {
    num: u64,
    den: u64,
}

impl ReducedFraction {
    pub const ZERO: Self = Self { num: 0, den: 1 };
    pub const ONE: Self = Self { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("zero denominator"));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn from_integer(n: u64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn recip(&self) -> Result<Self> {
        if self.num == 0 {
            return Err(Error::domain("reciprocal of zero"));
        }
        Ok(Self {
            num: self.den,
            den: self.num,
        })
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }
}

impl Ord for ReducedFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.num as u128 * other.den as u128;
        let r = other.num as u128 * self.den as u128;
        l.cmp(&r)
    }
}

impl PartialOrd for ReducedFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Reduces `m/n` and returns the fraction together with the common factor.
pub fn reduce(m: u64, n: u64) -> Result<(ReducedFraction, u64)> {
    if n == 0 {
        return Err(Error::domain("zero denominator"));
    }
    let g = m.gcd(&n);
    Ok((
        ReducedFraction {
            num: m / g,
            den: n / g,
        },
        g,
    ))
}

/// A negative fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant(i64);

impl Discriminant {
    pub const MINUS_3: Self = Self(-3);
    pub const MINUS_4: Self = Self(-4);

    pub fn new(d: i64) -> Result<Self> {
        if d >= -2 || d < -(1i64 << 40) {
            return Err(Error::NotFundamental(d));
        }
        let fundamental = if d.rem_euclid(4) == 1 {
            squarefree(d.unsigned_abs())
        } else if d.rem_euclid(16) == 12 || d.rem_euclid(16) == 8 {
            // d = 4m with m = 3 or 2 (mod 4)
            squarefree(d.unsigned_abs() / 4)
        } else {
            false
        };
        if fundamental {
            Ok(Self(d))
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    pub fn value(&self) -> i64 {
        self.0
    }

    /// The period `|D|` of the character.
    pub fn modulus(&self) -> u64 {
        self.0.unsigned_abs()
    }

    pub fn is_even(&self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// The Kronecker symbol `(a/n)`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n as i128;
    let a = a as i128;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        n >>= v;
        if v % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    result * jacobi(a.rem_euclid(n), n)
}

fn jacobi(mut a: i128, mut n: i128) -> i8 {
    let mut t: i8 = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// The real primitive character `chi_D(n)`.
pub fn chi(d: Discriminant, n: i64) -> i8 {
    kronecker(d.0, n)
}

/// `chi_D(0..|D|)`, one full period.
pub fn chi_table(d: Discriminant) -> Vec<i8> {
    (0..d.modulus() as i64).map(|n| chi(d, n)).collect()
}

/// `sum_{e | n} e^nu`.
pub fn divisor_sigma(nu: u32, n: u64) -> Result<u128> {
    if n == 0 {
        return Err(Error::domain("divisor_sigma of 0"));
    }
    let pow = |e: u64| -> Result<u128> {
        (e as u128)
            .checked_pow(nu)
            .ok_or_else(|| Error::domain("divisor_sigma overflow"))
    };
    let mut total: u128 = 0;
    let mut e = 1u64;
    while e * e <= n {
        if n % e == 0 {
            total += pow(e)?;
            let f = n / e;
            if f != e {
                total += pow(f)?;
            }
        }
        e += 1;
    }
    Ok(total)
}

/// Number of divisors `d(k)` for `k = 0..=n_max` (entry 0 is unused).
pub fn divisor_counts(n_max: usize) -> Vec<u32> {
    let mut d = vec![0u32; n_max + 1];
    for e in 1..=n_max {
        let mut k = e;
        while k <= n_max {
            d[k] += 1;
            k += e;
        }
    }
    d
}

/// Exact Bernoulli numbers `B_0..=B_k` with `B_1 = -1/2`.
pub fn bernoulli_table(k: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(k + 1);
    b.push(BigRational::one());
    // binomial row C(m+1, j), updated in place
    let mut row: Vec<BigInt> = vec![BigInt::one(), BigInt::one()];
    for m in 1..=k {
        let mut next = vec![BigInt::one(); m + 2];
        for j in 1..=m {
            next[j] = &row[j - 1] + &row[j];
        }
        row = next;
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * BigRational::from_integer(row[j].clone());
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m as u64 + 1)));
    }
    b
}

/// The exact Bernoulli number `B_k`.
pub fn bernoulli(k: usize) -> BigRational {
    bernoulli_table(k).pop().unwrap_or_else(BigRational::one)
}

/// Up/down (Euler zigzag) numbers `A_0..=A_k`.
pub fn updown_table(k: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    let mut row = vec![BigUint::one()];
    for n in 1..=k {
        let mut next = Vec::with_capacity(n + 1);
        next.push(BigUint::zero());
        for j in 1..=n {
            let v = &next[j - 1] + &row[n - j];
            next.push(v);
        }
        out.push(next[n].clone());
        row = next;
    }
    out
}

/// The up/down number `A_k` counting alternating permutations.
pub fn updown(k: usize) -> BigUint {
    updown_table(k).pop().unwrap_or_else(BigUint::one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn chi_minus4_matches_definition() {
        let d = Discriminant::MINUS_4;
        for n in -20i64..=20 {
            let expect = match n.rem_euclid(4) {
                1 => 1,
                3 => -1,
                _ => 0,
            };
            assert_eq!(chi(d, n), expect, "n = {n}");
        }
        assert_eq!(chi(d, 1), 1);
        assert_eq!(chi(d, 3), -1);
        assert_eq!(chi(d, 2), 0);
    }

    #[test]
    fn chi_minus3_minus7() {
        let d3 = Discriminant::new(-3).unwrap();
        assert_eq!(chi_table(d3), vec![0, 1, -1]);
        // (-7/n) = 1 for quadratic residues 1, 2, 4 mod 7
        let d7 = Discriminant::new(-7).unwrap();
        assert_eq!(chi_table(d7), vec![0, 1, 1, -1, 1, -1, -1]);
        let d8 = Discriminant::new(-8).unwrap();
        assert_eq!(chi_table(d8), vec![0, 1, 0, 1, 0, -1, 0, -1]);
    }

    #[test]
    fn discriminant_validation() {
        for d in [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24] {
            assert!(Discriminant::new(d).is_ok(), "{d}");
        }
        for d in [0, 1, -1, -2, -5, -6, -9, -12, -16, 5, 12] {
            assert_eq!(Discriminant::new(d), Err(Error::NotFundamental(d)), "{d}");
        }
    }

    #[test]
    fn sigma_values() {
        assert_eq!(divisor_sigma(0, 12).unwrap(), 6);
        assert_eq!(divisor_sigma(1, 12).unwrap(), 28);
        assert_eq!(divisor_sigma(2, 1).unwrap(), 1);
        let d = divisor_counts(12);
        assert_eq!(&d[1..], &[1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]);
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_table(12);
        assert_eq!(b[1], br(-1, 2));
        assert_eq!(b[2], br(1, 6));
        assert_eq!(b[4], br(-1, 30));
        assert_eq!(b[6], br(1, 42));
        assert_eq!(b[12], br(-691, 2730));
        assert!(b[11].is_zero());
        assert_eq!(bernoulli(2), br(1, 6));
    }

    #[test]
    fn updown_values() {
        let a: Vec<u64> = updown_table(10)
            .iter()
            .map(|v| v.try_into().unwrap())
            .collect();
        assert_eq!(a, vec![1, 1, 1, 2, 5, 16, 61, 272, 1385, 7936, 50521]);
        assert_eq!(updown(4), BigUint::from(5u32));
    }

    #[test]
    fn reduction_and_order() {
        let (f, g) = reduce(6, 4).unwrap();
        assert_eq!((f.num(), f.den(), g), (3, 2, 2));
        let a = ReducedFraction::new(1, 3).unwrap();
        let b = ReducedFraction::new(2, 5).unwrap();
        assert!(a < b);
        assert_eq!(a.recip().unwrap(), ReducedFraction::new(3, 1).unwrap());
        assert!(ReducedFraction::ZERO.recip().is_err());
        assert!(ReducedFraction::new(1, 0).is_err());
    }

    #[test]
    fn budget_charge() {
        let ctx = PrecisionContext::new(1e-10, 100).unwrap();
        assert!(ctx.charge(100, 0.0).is_ok());
        assert!(matches!(
            ctx.charge(101, 1e-3),
            Err(Error::BudgetExhausted { budget: 100, .. })
        ));
        assert!(PrecisionContext::new(0.0, 1).is_err());
    }
}
