//! Expression evaluation against num-complex, an independent complex implementation.

use num_complex::Complex64 as C;
use paraplex::expr::{eval, parse, BindingSet};
use paraplex::Cx;
use proptest::prelude::*;

type Oracle = fn(C, C) -> C;

const CASES: [(&str, Oracle); 6] = [
    ("exp(re(Z1*conj(Z2))/2) + abs2(Z1)/5", |a, b| C::new(((a * b.conj()).re / 2.0).exp() + a.norm_sqr() / 5.0, 0.0)),
    ("sin(Z1)*cos(Z2) - Z1*Z2", |a, b| a.sin() * b.cos() - a * b),
    ("log(Z1 + 3) + sqrt(Z2 + 2)", |a, b| (a + 3.0).ln() + (b + 2.0).sqrt()),
    ("(Z1 - Z2)/(1 + abs2(Z1 - Z2)/4)", |a, b| (a - b) / (1.0 + (a - b).norm_sqr() / 4.0)),
    ("i()*conj(Z1) + im(Z2)", |a, b| C::i() * a.conj() + b.im),
    ("exp(i()*Z1)^2", |a, _| (C::i() * a).exp().powi(2)),
];

fn cx() -> impl Strategy<Value = C> {
    (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(r, i)| C::new(r, i))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn matches_num_complex(a in cx(), b in cx()) {
        let mut bind = BindingSet::<f64>::new();
        bind.set("Z1", Cx::new(a.re, a.im)).set("Z2", Cx::new(b.re, b.im));
        for (src, oracle) in CASES {
            let got = eval(&parse(src).unwrap(), &bind).unwrap();
            let want = oracle(a, b);
            let err = (got.re - want.re).hypot(got.im - want.im);
            prop_assert!(err <= 1e-12 * (1.0 + want.norm()), "{src}: {got:?} vs {want}");
        }
    }
}
