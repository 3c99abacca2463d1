use mordell::forms::BinaryCubicForm;
use mordell::pipeline::{converse_form, SolutionSet};
use mordell::reduction::{enumerate_neg, enumerate_pos, SearchWindow};
use mordell::report::{csv_string, json_line, parse, Format};
use num_bigint::BigInt;
use proptest::prelude::*;

fn form() -> impl Strategy<Value = BinaryCubicForm> {
    (any::<i32>(), any::<i32>(), any::<i32>(), any::<i32>()).prop_map(|(a, b, c, d)| BinaryCubicForm::new(a, b, c, d))
}

fn solution_set() -> impl Strategy<Value = SolutionSet> {
    (any::<i64>().prop_filter("nonzero", |k| *k != 0), prop::collection::vec((any::<i64>(), any::<i128>()), 0..6), any::<bool>())
        .prop_map(|(k, pts, c)| SolutionSet::new(BigInt::from(k), pts.into_iter().map(|(x, y)| (BigInt::from(x), BigInt::from(y))), c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn syzygy_on_wide_coefficients(f in form(), x in any::<i64>(), y in any::<i64>()) {
        prop_assert!(f.syzygy_holds(&BigInt::from(x), &BigInt::from(y)));
    }

    #[test]
    fn converse_form_recovers_point(x in -10_000i64..10_000, y in -10_000i64..10_000) {
        let (x, y) = (BigInt::from(x), BigInt::from(y));
        let f = converse_form(&x, &y);
        let k = &y * &y - &x * &x * &x;
        prop_assert_eq!(f.discriminant(), BigInt::from(-108) * &k);
        let one = BigInt::from(1);
        let zero = BigInt::from(0);
        prop_assert_eq!(f.hessian().evaluate(&one, &zero), x);
        // The covariant's sign convention sends the converse form to (X, -Y).
        prop_assert_eq!(f.covariant_g().evaluate(&one, &zero), BigInt::from(-2) * y);
    }

    #[test]
    fn json_round_trip(sets in prop::collection::vec(solution_set(), 0..5)) {
        let text: String = sets.iter().map(|s| json_line(s) + "\n").collect();
        prop_assert_eq!(parse(text.as_bytes(), Format::JsonLines).unwrap(), sets);
    }

    #[test]
    fn csv_round_trip(sets in prop::collection::vec(solution_set(), 1..5)) {
        // csv rows carry no record boundary for a repeated k, so keep k distinct.
        let mut sets = sets;
        sets.sort_by(|a, b| a.k.cmp(&b.k));
        sets.dedup_by(|a, b| a.k == b.k);
        let text = csv_string(&sets);
        prop_assert_eq!(parse(text.as_bytes(), Format::Csv).unwrap(), sets);
    }

    #[test]
    fn windows_are_additive(split in 1u64..3000, top in 3001u64..6000) {
        let whole = SearchWindow::up_to(top).unwrap();
        let parts = [SearchWindow::up_to(split).unwrap(), SearchWindow::new(split, top).unwrap()];
        let joined = |f: &dyn Fn(SearchWindow) -> Vec<String>| parts.iter().flat_map(|w| f(*w)).collect::<std::collections::BTreeSet<_>>();
        let pos = |w| enumerate_pos(w).map(|c| c.dump_line()).collect::<Vec<_>>();
        let neg = |w| enumerate_neg(w).map(|c| c.dump_line()).collect::<Vec<_>>();
        prop_assert_eq!(joined(&pos), pos(whole).into_iter().collect());
        prop_assert_eq!(joined(&neg), neg(whole).into_iter().collect());
    }
}
