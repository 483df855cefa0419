use fiwalk::exactnum::{fit_polynomial, fit_rational, rat_int, solve_linear, Poly, RatMatrix, RationalFunc, Rational, SqrtRational};
use proptest::prelude::*;

fn poly_strategy(max_deg: usize, bound: i64) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-bound..=bound, 0..=max_deg + 1).prop_map(|c| Poly::from_ints(&c))
}

fn nonzero_poly(max_deg: usize, bound: i64) -> impl Strategy<Value = Poly> {
    poly_strategy(max_deg, bound).prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc_strategy(max_deg: usize) -> impl Strategy<Value = RationalFunc> {
    (poly_strategy(max_deg, 20), nonzero_poly(max_deg, 20)).prop_map(|(a, b)| RationalFunc::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_preserves_values(a in poly_strategy(4, 30), b in nonzero_poly(4, 30), c in nonzero_poly(2, 10), ns in prop::collection::vec(-1000i64..1000, 100)) {
        // f = (a*c)/(b*c) reduces to a/b
        let f = RationalFunc::new(&a * &c, &b * &c);
        for n in ns {
            let (dc, db) = (c.eval_int(n), b.eval_int(n));
            if dc == rat_int(0) || db == rat_int(0) {
                continue;
            }
            let unreduced = (a.eval_int(n) * &dc) / (db * &dc);
            prop_assert_eq!(f.eval(n).unwrap(), unreduced);
        }
    }

    #[test]
    fn polynomial_fit_roundtrip(p in poly_strategy(6, 100)) {
        let pts: Vec<(i64, Rational)> = (2..12).map(|n| (n, p.eval_int(n))).collect();
        prop_assert_eq!(fit_polynomial(&pts, 6).unwrap(), p);
    }

    #[test]
    fn rational_fit_roundtrip(f in ratfunc_strategy(4)) {
        let pts: Vec<(i64, Rational)> = (30..50).filter_map(|n| f.eval(n).ok().map(|v| (n, v))).collect();
        prop_assume!(pts.len() >= 13);
        prop_assert_eq!(fit_rational(&pts, 4, 4).unwrap(), f);
    }

    #[test]
    fn sqrt_squared(rad in nonzero_poly(4, 20), f in ratfunc_strategy(2)) {
        let rad = if rad.lead() < rat_int(0) { -&rad } else { rad };
        let s = SqrtRational::new(rad.clone(), f.clone()).unwrap();
        prop_assert_eq!(s.squared(), &RationalFunc::from(rad) * &f.pow(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_multiplies_back(size in 1usize..=8, seed in prop::collection::vec((poly_strategy(3, 9), 1i64..=4), 64)) {
        let mut it = seed.into_iter();
        let mut rows = Vec::new();
        for i in 0..size {
            let mut row = Vec::new();
            for j in 0..size {
                let (a, b) = it.next().unwrap();
                // Diagonal shift keeps the system nonsingular.
                let extra = if i == j { RationalFunc::from(Poly::from_ints(&[0, 0, 0, 1])) } else { RationalFunc::zero() };
                row.push(&RationalFunc::new(a, Poly::from_ints(&[b])) + &extra);
            }
            rows.push(row);
        }
        let b: Vec<RationalFunc> = (0..size).map(|i| RationalFunc::from(Poly::from_ints(&[i as i64, 1]))).collect();
        let a = RatMatrix::from_rows(rows);
        let x = solve_linear(&a, &b).unwrap();
        prop_assert_eq!(a.mul_vec(&x), b);
    }
}

#[test]
fn random_four_by_four_resubstitution() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut rows = Vec::new();
    for _ in 0..4 {
        let row: Vec<RationalFunc> = (0..4)
            .map(|_| {
                let c: Vec<i64> = (0..3).map(|_| rng.gen_range(-5..=5)).collect();
                RationalFunc::from(Poly::from_ints(&c))
            })
            .collect();
        rows.push(row);
    }
    let a = RatMatrix::from_rows(rows);
    let b: Vec<RationalFunc> = (0..4).map(|i| RationalFunc::int(i + 1)).collect();
    let x = solve_linear(&a, &b).unwrap();
    assert_eq!(a.mul_vec(&x), b);
}
