//! Finite cotangent formulas for `h_{m,n}` and `c_{m,n}`, exact expressions,
//! the integral oracle and the reduced-fraction value cache.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
#[allow(unused_imports)] // inherent once std is linked into the build
use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::numkernel::{reduce, Discriminant, PrecisionContext, ReducedFraction};
use crate::stepfn::StepTable;

/// A number in `Z/2`, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: Self = Self(0);

    pub fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub fn from_integer(n: i64) -> Self {
        Self(2 * n)
    }

    pub fn twice(&self) -> i64 {
        self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CotTerm {
    pub coeff: HalfInt,
    /// The angle is `pi * angle`, with `angle` in `(0, 1/2)`.
    pub angle: ReducedFraction,
}

/// A finite sum `sum coeff * cot(pi * angle)` in canonical form: angles are
/// folded into `(0, 1/2)`, merged and sorted, and zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CotangentExpression {
    terms: Vec<CotTerm>,
}

impl CotangentExpression {
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (HalfInt, ReducedFraction)>,
    {
        let mut merged: BTreeMap<ReducedFraction, i64> = BTreeMap::new();
        for (coeff, angle) in terms {
            let num = angle.num() % angle.den();
            if num == 0 {
                return Err(Error::domain("cotangent pole at an integer angle"));
            }
            let den = angle.den();
            let (num, sign) = if 2 * num > den { (den - num, -1) } else { (num, 1) };
            if 2 * num == den {
                continue;
            }
            let a = ReducedFraction::new(num, den)?;
            *merged.entry(a).or_insert(0) += sign * coeff.twice();
        }
        let terms = merged
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(angle, c)| CotTerm {
                coeff: HalfInt(c),
                angle,
            })
            .collect();
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[CotTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sum(&self, other: &Self) -> Self {
        let it = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|t| (t.coeff, t.angle));
        // angles are already valid, so this cannot fail
        Self::from_terms(it).unwrap_or_default()
    }

    pub fn scaled(&self, factor: i64) -> Self {
        let it = self
            .terms
            .iter()
            .map(|t| (HalfInt(t.coeff.twice() * factor), t.angle));
        Self::from_terms(it).unwrap_or_default()
    }

    /// Exact test for `sum = 0` in the cyclotomic field `Q(zeta_N)`, `N` the
    /// common angle denominator. With `w = zeta_N^k`, `cot(pi k/N) = i (w + 1)/(w - 1)`
    /// and `1/(w - 1) = (1/N) sum_j j w^j`, so the sum is `i P(zeta_N)` for an
    /// integer polynomial `P`, which vanishes iff `Phi_N` divides it.
    pub fn is_exactly_zero(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        let n = self.terms.iter().fold(1u64, |acc, t| acc.lcm(&t.angle.den())) as usize;
        let mut poly = vec![BigInt::zero(); n];
        for t in &self.terms {
            let k = (t.angle.num() * (n as u64 / t.angle.den())) as usize;
            let c = BigInt::from(t.coeff.twice());
            poly[0] += &c * n;
            for j in 1..n {
                poly[(j * k) % n] += &c * (2 * j);
            }
        }
        let phi = cyclotomic(n, &mut BTreeMap::new());
        rem_monic(&mut poly, &phi);
        poly.iter().all(|c| c.is_zero())
    }

    /// Number of terms whose coefficient is not an integer.
    pub fn half_integral_terms(&self) -> usize {
        self.terms.iter().filter(|t| !t.coeff.is_integer()).count()
    }
}

/// `Phi_n`, coefficients from low to high degree.
fn cyclotomic(n: usize, memo: &mut BTreeMap<usize, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::from(-1);
    p[n] = BigInt::one();
    for d in (1..n).filter(|d| n % d == 0) {
        let f = cyclotomic(d, memo);
        p = div_monic(&p, &f);
    }
    memo.insert(n, p.clone());
    p
}

/// Exact quotient by a monic divisor.
fn div_monic(a: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - dm];
    for i in (0..q.len()).rev() {
        let c = r[i + dm].clone();
        if !c.is_zero() {
            for (j, mj) in m.iter().enumerate() {
                r[i + j] -= &c * mj;
            }
        }
        q[i] = c;
    }
    q
}

/// Replaces `a` by its remainder modulo the monic `m`.
fn rem_monic(a: &mut Vec<BigInt>, m: &[BigInt]) {
    let dm = m.len() - 1;
    while a.len() > dm {
        let c = a.pop().unwrap_or_default();
        if !c.is_zero() {
            let base = a.len() - dm;
            for (j, mj) in m.iter().take(dm).enumerate() {
                a[base + j] -= &c * mj;
            }
        }
    }
}

impl fmt::Display for CotangentExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*cot(pi*{})", t.coeff, t.angle)?;
        }
        Ok(())
    }
}

/// `cot(pi k / den)` for `0 < k < den`, evaluated on a reduced argument.
pub fn cot_pi(k: u64, den: u64) -> f64 {
    debug_assert!(k % den != 0);
    let k = k % den;
    if 2 * k > den {
        return -cot_pi(den - k, den);
    }
    if 4 * k > den {
        // cot(pi a) = tan(pi (1/2 - a))
        (PI * (den - 2 * k) as f64 / (2 * den) as f64).tan()
    } else {
        1.0 / (PI * k as f64 / den as f64).tan()
    }
}

pub fn eval_cot(expr: &CotangentExpression, ctx: &PrecisionContext) -> Result<f64> {
    ctx.charge(expr.terms.len() as u64, f64::NAN)?;
    Ok(expr
        .terms
        .iter()
        .map(|t| t.coeff.to_f64() * cot_pi(t.angle.num(), t.angle.den()))
        .sum())
}

/// Evaluates an expression whose angle denominators divide 48 using only
/// square roots and field operations.
pub fn eval_cot_algebraic(expr: &CotangentExpression) -> Result<f64> {
    // cos and sin of pi/48 by half-angle steps from pi/3
    let mut c = 0.5f64;
    for _ in 0..4 {
        c = ((1.0 + c) / 2.0).sqrt();
    }
    let s = (1.0 - c * c).sqrt();
    let mut total = 0.0;
    for t in &expr.terms {
        if 48 % t.angle.den() != 0 {
            return Err(Error::domain("angle denominator does not divide 48"));
        }
        let k = t.angle.num() * (48 / t.angle.den());
        let (mut re, mut im) = (1.0f64, 0.0f64);
        for _ in 0..k {
            let r = re * c - im * s;
            im = re * s + im * c;
            re = r;
        }
        total += t.coeff.to_f64() * re / im;
    }
    Ok(total)
}

/// Exact `h_{m,n} = sum_{0<k<|D|n/2} chi(k) S(km/n) cot(pi k/(|D| n))`.
pub fn h_exact(step: &StepTable, m: u64, n: u64) -> Result<CotangentExpression> {
    if m == 0 || n == 0 {
        return Err(Error::domain("h_{m,n} needs m, n >= 1"));
    }
    let big = step.period() * n;
    let terms = (1..=(big - 1) / 2).filter_map(|k| {
        let c = step.chi(k as i64) as i64;
        let s2 = step.twice_at((k * m) as i64, n);
        (c * s2 != 0).then(|| (HalfInt(c * s2), ReducedFraction::new(k, big).unwrap()))
    });
    CotangentExpression::from_terms(terms)
}

/// Exact `c_{m,n} = h_{m,n} + h_{n,m}`.
pub fn c_exact(step: &StepTable, m: u64, n: u64) -> Result<CotangentExpression> {
    Ok(h_exact(step, m, n)?.sum(&h_exact(step, n, m)?))
}

/// The `D = -4` selection-rule expression for `c_{m,n}`.
pub fn c_selection_rule(m: u64, n: u64) -> Result<CotangentExpression> {
    if m == 0 || n == 0 {
        return Err(Error::domain("c_{m,n} needs m, n >= 1"));
    }
    let frac = |a: u64, b: u64| ReducedFraction::new(a, b).unwrap();
    let half = frac(1, 2);
    let mut terms = Vec::new();
    for j in 0..=m / 2 {
        for k in 0..=n / 2 {
            let a = frac(4 * j + 1, 4 * m).max(frac(4 * k + 1, 4 * n));
            let b = frac(4 * j + 3, 4 * m).min(frac(4 * k + 3, 4 * n)).min(half);
            if a < b {
                terms.push((HalfInt::from_integer(1), a));
                terms.push((HalfInt::from_integer(-1), b));
            }
        }
    }
    CotangentExpression::from_terms(terms)
}

/// Table of `cot(pi k/(|D| n))` for `0 <= k <= (|D| n - 1)/2` (entry 0 unused).
pub fn cot_table(period: u64, n: u64) -> Vec<f64> {
    let big = period * n;
    let mut v = Vec::with_capacity(((big + 1) / 2) as usize);
    v.push(0.0);
    for k in 1..=(big - 1) / 2 {
        v.push(cot_pi(k, big));
    }
    v
}

/// Floating `h_{m,n}` from a cotangent table built by [`cot_table`] for `n`.
pub fn h_with_table(step: &StepTable, m: u64, n: u64, cot: &[f64]) -> f64 {
    let p = step.period();
    let kmax = (p * n - 1) / 2;
    debug_assert_eq!(cot.len() as u64, kmax + 1);
    let plateau = step.plateaus();
    let pu = p as usize;
    let last = pu - 1;
    // along k = c, c + p, c + 2p, ... track j = floor(k m/n) mod p and r = k m mod n
    let (qs, rs) = ((((p * m) / n) % p) as usize, (p * m) % n);
    let mut acc = 0.0;
    for c in 1..p.min(kmax + 1) {
        let chi = step.chi_values()[c as usize];
        if chi == 0 {
            continue;
        }
        let cm = c as u128 * m as u128;
        let mut j = ((cm / n as u128) % p as u128) as usize;
        let mut r = (cm % n as u128) as u64;
        let mut sum = 0.0;
        let mut k = c as usize;
        while k as u64 <= kmax {
            let twice = if r == 0 {
                plateau[if j == 0 { last } else { j - 1 }] + plateau[j]
            } else {
                2 * plateau[j]
            };
            if twice != 0 {
                sum += twice as f64 * cot[k];
            }
            j += qs;
            r += rs;
            if r >= n {
                r -= n;
                j += 1;
            }
            if j >= pu {
                j -= pu;
            }
            k += pu;
        }
        acc += chi as f64 * sum;
    }
    0.5 * acc
}

/// Lazily built cotangent tables keyed by denominator `n`.
#[derive(Debug, Clone, Default)]
pub struct CotTables {
    period: u64,
    tables: BTreeMap<u64, Vec<f64>>,
}

impl CotTables {
    pub fn new(period: u64) -> Self {
        Self {
            period,
            tables: BTreeMap::new(),
        }
    }

    pub fn get(&self, n: u64) -> Option<&[f64]> {
        self.tables.get(&n).map(|v| v.as_slice())
    }

    pub fn ensure(&mut self, n: u64) -> &[f64] {
        let p = self.period;
        self.tables.entry(n).or_insert_with(|| cot_table(p, n))
    }

    pub fn insert(&mut self, n: u64, table: Vec<f64>) {
        self.tables.insert(n, table);
    }

    pub fn contains(&self, n: u64) -> bool {
        self.tables.contains_key(&n)
    }
}

/// `C(a/b) = pi/(|D| b) (h_{a,b} + h_{b,a})` from prebuilt tables.
pub fn c_ratio_with_tables(step: &StepTable, a: u64, b: u64, cot_a: &[f64], cot_b: &[f64]) -> f64 {
    let s = h_with_table(step, a, b, cot_b) + h_with_table(step, b, a, cot_a);
    PI / (step.period() * b) as f64 * s
}

/// Key of the value cache: `C(p/q)` for `D`, with `p <= q` coprime. Field
/// order makes the derived ordering `(D, q, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CacheKey {
    pub d: i64,
    pub q: u64,
    pub p: u64,
}

/// Maps `(m, n)` to its cache key and homogeneity factor.
pub fn cache_key(d: Discriminant, m: u64, n: u64) -> Result<(CacheKey, u64)> {
    if m == 0 || n == 0 {
        return Err(Error::domain("c_{m,n} needs m, n >= 1"));
    }
    let (f, ell) = reduce(m.min(n), m.max(n))?;
    Ok((
        CacheKey {
            d: d.value(),
            q: f.den(),
            p: f.num(),
        },
        ell,
    ))
}

/// `c_{m,n} = ell |D| q/pi C(p/q)`; every code path goes through this.
pub fn c_from_ratio(key: CacheKey, ell: u64, ratio: f64) -> f64 {
    ell as f64 * ((key.d.unsigned_abs() * key.q) as f64 / PI * ratio)
}

fn charge_pair(ctx: &PrecisionContext, period: u64, a: u64, b: u64) -> Result<()> {
    ctx.charge(period * (a + b), f64::NAN)
}

/// Floating `c_{m,n}`, recomputed from the cotangent formulas.
pub fn c_value(d: Discriminant, m: u64, n: u64, ctx: &PrecisionContext) -> Result<f64> {
    let step = StepTable::new(d);
    let (key, ell) = cache_key(d, m, n)?;
    charge_pair(ctx, step.period(), key.p, key.q)?;
    let ta = cot_table(step.period(), key.p);
    let tb = cot_table(step.period(), key.q);
    let ratio = c_ratio_with_tables(&step, key.p, key.q, &ta, &tb);
    Ok(c_from_ratio(key, ell, ratio))
}

/// Cache of `C(p/q)` values keyed by reduced fraction.
#[derive(Debug, Clone, Default)]
pub struct CValueCache {
    entries: BTreeMap<CacheKey, f64>,
    hits: u64,
    misses: u64,
}

impl CValueCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &CacheKey) -> Option<f64> {
        self.entries.get(key).copied()
    }

    pub fn insert(&mut self, key: CacheKey, ratio: f64) {
        self.entries.insert(key, ratio);
    }

    /// Entries in `(D, q, p)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&CacheKey, &f64)> {
        self.entries.iter()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }

    pub fn record_hit(&mut self) {
        self.hits += 1;
    }

    pub fn record_miss(&mut self) {
        self.misses += 1;
    }

    /// `c_{m,n}` through the cache, computing and storing `C(p/q)` on a miss.
    pub fn c_value(
        &mut self,
        step: &StepTable,
        tables: &mut CotTables,
        m: u64,
        n: u64,
        ctx: &PrecisionContext,
    ) -> Result<f64> {
        let (key, ell) = cache_key(step.discriminant(), m, n)?;
        if let Some(v) = self.entries.get(&key) {
            self.hits += 1;
            return Ok(c_from_ratio(key, ell, *v));
        }
        self.misses += 1;
        charge_pair(ctx, step.period(), key.p, key.q)?;
        tables.ensure(key.p);
        tables.ensure(key.q);
        let ratio = c_ratio_with_tables(
            step,
            key.p,
            key.q,
            tables.get(key.p).unwrap_or(&[]),
            tables.get(key.q).unwrap_or(&[]),
        );
        self.entries.insert(key, ratio);
        Ok(c_from_ratio(key, ell, ratio))
    }
}

/// Truncated integral `(|D|/pi) int_0^T S(mt) S(nt) dt/t^2` with a rigorous
/// bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate {
    pub value: f64,
    pub tail_bound: f64,
}

pub fn c_integral_oracle(step: &StepTable, m: u64, n: u64, cutoff: f64) -> Result<IntegralEstimate> {
    if m == 0 || n == 0 || !(cutoff >= 1.0) {
        return Err(Error::domain("need m, n >= 1 and T >= 1"));
    }
    let p = step.period();
    let plateau = step.plateaus();
    let g = m.gcd(&n);
    let (m, n) = (m / g, n / g);
    // work in units u = t m n: S(mt) jumps at multiples of n, S(nt) at multiples of m
    let mn = (m * n) as f64;
    let u_end = (cutoff * mn).floor() as u64;
    let (mut i, mut k) = (0u64, 0u64);
    let mut u0 = 0u64;
    let mut acc = 0.0;
    while u0 < u_end {
        let u1 = ((i + 1) * n).min((k + 1) * m).min(u_end);
        let v = plateau[(i % p) as usize] * plateau[(k % p) as usize];
        if v != 0 {
            acc += v as f64 * (1.0 / u0 as f64 - 1.0 / u1 as f64);
        }
        if u1 == (i + 1) * n {
            i += 1;
        }
        if u1 == (k + 1) * m {
            k += 1;
        }
        u0 = u1;
    }
    let scale = step.period() as f64 / PI;
    let smax = step.max_abs() as f64;
    let t_used = u_end as f64 / mn;
    Ok(IntegralEstimate {
        value: scale * mn * acc * g as f64,
        tail_bound: scale * smax * smax * g as f64 / t_used,
    })
}
