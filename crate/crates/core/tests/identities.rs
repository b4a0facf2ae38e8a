use std::f64::consts::PI;

use grhcot_core::cotsum::{h_exact, CotangentExpression, HalfInt};
use grhcot_core::qmf::*;
use grhcot_core::{Discriminant, PrecisionContext, ReducedFraction, StepTable};
use num_rational::Ratio;
use proptest::prelude::*;

fn step(d: i64) -> StepTable {
    StepTable::new(Discriminant::new(d).unwrap())
}

fn rational() -> impl Strategy<Value = Ratio<i64>> {
    (1i64..200, 1i64..200).prop_map(|(a, b)| Ratio::new(a, b))
}

fn to_f64(x: Ratio<i64>) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn c_equals_h_plus_scaled_h_of_inverse(x in rational(), d in prop::sample::select(vec![-3i64, -4, -7, -8])) {
        let s = step(d);
        let ctx = PrecisionContext::default();
        let lhs = eval_h_rational(&s, x) + to_f64(x) * eval_h_rational(&s, x.recip());
        // independent route: the periodic Hurwitz evaluation at s = 1
        let rhs = eval_cs(&s, Point::Rational(x), 1.0, &ctx).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn shift_by_two_sums_to_quarter_pi(x in rational()) {
        let s = step(-4);
        let v = eval_h_rational(&s, x) + eval_h_rational(&s, x + 2);
        prop_assert!((v - PI / 4.0).abs() < 1e-12);
        // exactly: h_{m,n} + h_{m+2n,n} - n cot(pi/4) vanishes in Q(zeta)
        let (m, n) = (*x.numer() as u64, *x.denom() as u64);
        let quarter = CotangentExpression::from_terms([(HalfInt::from_integer(-(n as i64)), ReducedFraction::new(1, 4).unwrap())]).unwrap();
        let sum = h_exact(&s, m, n).unwrap().sum(&h_exact(&s, m + 2 * n, n).unwrap()).sum(&quarter);
        prop_assert!(sum.is_exactly_zero(), "{}", sum);
    }

    #[test]
    fn h_is_even_and_periodic(x in rational(), d in prop::sample::select(vec![-3i64, -4, -7])) {
        let s = step(d);
        let h = eval_h_rational(&s, x);
        prop_assert!((h - eval_h_rational(&s, -x)).abs() < 1e-12);
        prop_assert!((h - eval_h_rational(&s, x + d.abs())).abs() < 1e-12);
    }

    #[test]
    fn cs_homogeneity(x in rational(), sv in 0.3f64..3.0) {
        let s = step(-4);
        let ctx = PrecisionContext::default();
        let a = eval_cs(&s, Point::Rational(x), sv, &ctx).unwrap();
        let b = eval_cs(&s, Point::Rational(x.recip()), sv, &ctx).unwrap();
        prop_assert!((a - to_f64(x).powf(sv) * b).abs() < 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn cocycle_words_telescope(word in prop::collection::vec(prop_oneof![Just(0i64), -2i64..=2], 1..6), x in rational()) {
        let disc = Discriminant::MINUS_4;
        let s = StepTable::new(disc);
        let gens: Vec<Generator> = word.iter().map(|&k| if k == 0 { Generator::S } else { Generator::T(k) }).collect();
        let full = GroupElement::from_word(disc, &gens).unwrap();
        prop_assume!(full.act(x).is_some());
        // fold the word from the right: C_{g h}(x) = C_h(x) + eps(h)|j(h,x)| C_g(h x)
        let mut total = 0.0;
        let mut weight = 1.0;
        let mut y = x;
        for g in gens.iter().rev() {
            let e = GroupElement::from_word(disc, &[*g]).unwrap();
            let Some(next) = e.act(y) else { return Ok(()); };
            total += weight * cocycle_c_gamma(&s, &e, y).unwrap();
            let j = e.automorphy(y);
            weight *= e.epsilon as f64 * to_f64(j).abs();
            y = next;
        }
        let direct = cocycle_c_gamma(&s, &full, x).unwrap();
        prop_assert!((total - direct).abs() < 1e-9 * (1.0 + direct.abs()), "{} vs {}", total, direct);
    }
}

#[test]
fn distributional_derivative() {
    // -int C phi' = int H(1/x) phi for phi = (x-a)^4 (b-x)^4 on [a, b] = [1/2, 5/2]
    let s = step(-4);
    let m: i64 = 2048;
    let (a, b) = (0.5, 2.5);
    let phi = |x: f64| ((x - a) * (b - x)).powi(4);
    let dphi = |x: f64| 4.0 * ((x - a) * (b - x)).powi(3) * (a + b - 2.0 * x);
    let (lo, hi) = (m / 2, 5 * m / 2);
    let h = 1.0 / m as f64;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in lo..=hi {
        let x = Ratio::new(i, m);
        let xf = to_f64(x);
        let w = if i == lo || i == hi { 0.5 } else { 1.0 };
        lhs -= w * eval_c_rational(&s, x) * dphi(xf);
        rhs += w * eval_h_rational(&s, x.recip()) * phi(xf);
    }
    let (lhs, rhs) = (lhs * h, rhs * h);
    assert!((lhs - rhs).abs() < 1e-4, "{lhs} vs {rhs}");
}

#[test]
fn c_is_differentiable_at_one_half() {
    let s = step(-4);
    let offs = default_offsets(2, 11, 20001, 10);
    let r = continuity_probe(&s, ProbeFunction::C, Ratio::new(1, 2), &offs).unwrap();
    let (l, rt) = (r.slope_left.last().unwrap(), r.slope_right.last().unwrap());
    assert!((l - rt).abs() < 1e-2, "{l} vs {rt}");
    assert!(r.log_fit_left.0.abs() < 0.02 && r.log_fit_right.0.abs() < 0.02);
}

#[test]
fn h_s_tends_to_h() {
    let s = step(-4);
    let ctx = PrecisionContext::default();
    for x in [Ratio::new(1, 3), Ratio::new(3, 4), Ratio::new(7, 5)] {
        let hs = eval_hs(&s, Point::Rational(x), 1.0 + 1e-3, &ctx).unwrap();
        assert!((hs - eval_h_rational(&s, x)).abs() < 1e-3);
    }
}
