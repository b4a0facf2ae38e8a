use alloc::format;

use num_rational::Ratio;
use num_traits::Signed;

use super::eval_h_rational;
use crate::error::{Error, Result};
use crate::numkernel::Discriminant;
use crate::stepfn::StepTable;

/// How the multiplier of a group element was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Congruent to `+-I` or `+-S` modulo `|D|`.
    Residue,
    /// Built from a word in the generators.
    Word,
}

/// Generators: `S = (0 -1; 1 0)` and `T^{k u}` with `u = |D|` for odd `D`,
/// `u = |D|/2` for even `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    S,
    T(i64),
}

/// A matrix `(a b; c d)` of determinant one with its multiplier `epsilon = +-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub epsilon: i8,
    pub provenance: Provenance,
    disc: Discriminant,
}

fn overflow() -> Error {
    Error::domain("matrix entries overflow i64")
}

fn mul2(x: [i64; 4], y: [i64; 4]) -> Result<[i64; 4]> {
    let e = |p: i64, q: i64, r: i64, s: i64| -> Result<i64> {
        p.checked_mul(q)
            .and_then(|u| r.checked_mul(s).and_then(|v| u.checked_add(v)))
            .ok_or_else(overflow)
    };
    Ok([
        e(x[0], y[0], x[1], y[2])?,
        e(x[0], y[1], x[1], y[3])?,
        e(x[2], y[0], x[3], y[2])?,
        e(x[2], y[1], x[3], y[3])?,
    ])
}

impl GroupElement {
    /// Certifies `(a b; c d)` by its residue: `+-I` gives `epsilon = 1`,
    /// `+-S` gives `epsilon = -1`. Anything else is rejected.
    pub fn from_matrix(disc: Discriminant, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let reject = Error::NotInGroup {
            a,
            b,
            c,
            d,
            disc: disc.value(),
        };
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det != 1 {
            return Err(reject);
        }
        let m = disc.modulus() as i64;
        let r = |v: i64| v.rem_euclid(m);
        let is = |w: [i64; 4]| [r(a), r(b), r(c), r(d)] == w.map(r);
        let epsilon = if is([1, 0, 0, 1]) || is([-1, 0, 0, -1]) {
            1
        } else if is([0, -1, 1, 0]) || is([0, 1, -1, 0]) {
            -1
        } else {
            return Err(reject);
        };
        Ok(Self {
            a,
            b,
            c,
            d,
            epsilon,
            provenance: Provenance::Residue,
            disc,
        })
    }

    /// The product of a word in the generators, read left to right.
    pub fn from_word(disc: Discriminant, word: &[Generator]) -> Result<Self> {
        let u = if disc.is_even() { disc.modulus() / 2 } else { disc.modulus() } as i64;
        let mut m = [1i64, 0, 0, 1];
        let mut sign = 1i8;
        for g in word {
            let (g, flips) = match *g {
                Generator::S => ([0, -1, 1, 0], true),
                Generator::T(k) => {
                    let shift = k.checked_mul(u).ok_or_else(overflow)?;
                    // T^u carries epsilon = -1 for even D only
                    ([1, shift, 0, 1], disc.is_even() && k % 2 != 0)
                }
            };
            m = mul2(m, g)?;
            if flips {
                sign = -sign;
            }
        }
        Ok(Self {
            a: m[0],
            b: m[1],
            c: m[2],
            d: m[3],
            epsilon: sign,
            provenance: Provenance::Word,
            disc,
        })
    }

    pub fn discriminant(&self) -> Discriminant {
        self.disc
    }

    pub fn matrix(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `self * other`, with multiplied multipliers.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.disc != other.disc {
            return Err(Error::domain("group elements for different discriminants"));
        }
        let m = mul2(self.matrix(), other.matrix())?;
        Ok(Self {
            a: m[0],
            b: m[1],
            c: m[2],
            d: m[3],
            epsilon: self.epsilon * other.epsilon,
            provenance: if self.provenance == other.provenance {
                self.provenance
            } else {
                Provenance::Word
            },
            disc: self.disc,
        })
    }

    /// `c x + d`.
    pub fn automorphy(&self, x: Ratio<i64>) -> Ratio<i64> {
        x * self.c + self.d
    }

    /// `(a x + b)/(c x + d)`, or `None` at the pole.
    pub fn act(&self, x: Ratio<i64>) -> Option<Ratio<i64>> {
        let den = self.automorphy(x);
        if den == Ratio::from_integer(0) {
            None
        } else {
            Some((x * self.a + self.b) / den)
        }
    }
}

/// `C_gamma(x) = H(x) - epsilon |c x + d| H(gamma x)`.
pub fn cocycle_c_gamma(step: &StepTable, gamma: &GroupElement, x: Ratio<i64>) -> Result<f64> {
    if gamma.discriminant() != step.discriminant() {
        return Err(Error::domain("group element and step function disagree on D"));
    }
    let gx = gamma
        .act(x)
        .ok_or_else(|| Error::domain(format!("x = {x} is the pole of the group element")))?;
    let j = gamma.automorphy(x).abs();
    let jf = *j.numer() as f64 / *j.denom() as f64;
    Ok(eval_h_rational(step, x) - gamma.epsilon as f64 * jf * eval_h_rational(step, gx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn q(a: i64, b: i64) -> Ratio<i64> {
        Ratio::new(a, b)
    }

    #[test]
    fn residue_certification() {
        let d3 = Discriminant::MINUS_3;
        let g = GroupElement::from_matrix(d3, 4, -3, 3, -2).unwrap();
        assert_eq!(g.epsilon, 1);
        let s = GroupElement::from_matrix(d3, 0, -1, 1, 0).unwrap();
        assert_eq!(s.epsilon, -1);
        assert!(matches!(
            GroupElement::from_matrix(d3, 1, 1, 0, 1),
            Err(Error::NotInGroup { .. })
        ));
        assert!(GroupElement::from_matrix(d3, 2, 0, 0, 1).is_err());
    }

    #[test]
    fn words_and_residues_agree() {
        let d4 = Discriminant::MINUS_4;
        let w = GroupElement::from_word(d4, &[Generator::T(1), Generator::S, Generator::T(1)]).unwrap();
        assert_eq!(w.matrix(), [2, 3, 1, 2]);
        assert_eq!(w.epsilon, -1);
        let t4 = GroupElement::from_word(d4, &[Generator::T(2)]).unwrap();
        let r = GroupElement::from_matrix(d4, 1, 4, 0, 1).unwrap();
        assert_eq!(t4.epsilon, r.epsilon);
        let d3 = Discriminant::MINUS_3;
        let w = GroupElement::from_word(d3, &[Generator::S, Generator::T(1), Generator::S]).unwrap();
        let r = GroupElement::from_matrix(d3, w.a, w.b, w.c, w.d).unwrap();
        assert_eq!(w.epsilon, r.epsilon);
    }

    #[test]
    fn generator_cocycles() {
        let step = StepTable::new(Discriminant::MINUS_4);
        let d4 = Discriminant::MINUS_4;
        let t = GroupElement::from_word(d4, &[Generator::T(1)]).unwrap();
        let s = GroupElement::from_word(d4, &[Generator::S]).unwrap();
        for x in [q(1, 3), q(5, 7), q(2, 9), q(11, 4)] {
            assert!((cocycle_c_gamma(&step, &t, x).unwrap() - PI / 4.0).abs() < 1e-13);
            // C_S is C itself
            let expect = super::super::eval_c_rational(&step, x);
            assert!((cocycle_c_gamma(&step, &s, x).unwrap() - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn cocycle_relation() {
        for disc in [Discriminant::MINUS_4, Discriminant::MINUS_3] {
            let step = StepTable::new(disc);
            let g1 = GroupElement::from_word(disc, &[Generator::T(1), Generator::S]).unwrap();
            let g2 = GroupElement::from_word(disc, &[Generator::S, Generator::T(-1), Generator::S]).unwrap();
            let g = g1.compose(&g2).unwrap();
            for x in [q(1, 5), q(7, 3), q(-2, 11)] {
                let lhs = cocycle_c_gamma(&step, &g, x).unwrap();
                let j2 = g2.automorphy(x).abs();
                let j2 = *j2.numer() as f64 / *j2.denom() as f64;
                let rhs = cocycle_c_gamma(&step, &g2, x).unwrap()
                    + g2.epsilon as f64 * j2 * cocycle_c_gamma(&step, &g1, g2.act(x).unwrap()).unwrap();
                assert!((lhs - rhs).abs() < 1e-11, "{lhs} vs {rhs}");
            }
        }
    }
}
