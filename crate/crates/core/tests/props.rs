use agt_core::exec::Exec;
use agt_core::gen;
use agt_core::lens::{compose_lens, identity_lens, is_short_lens, tensor_lens};
use agt_core::metric::{sup_metric, tensor_metric, validate_metric, within_ball, ExtReal, FnTable, Subset};
use agt_core::metricgames::sel_distance;
use agt_core::opengame::{check_game_graded, seq_compose, t_eps_game};
use agt_core::selection::{nash_product, sel_leq, t_eps};
use agt_core::specio::{parse, serialize};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn radius() -> impl Strategy<Value = ExtReal> {
    prop_oneof![4 => (0u64..4).prop_map(ExtReal::units), 1 => Just(ExtReal::INFINITY)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_spaces_and_products_are_metrics(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (gen::space(&mut r, 4), gen::space(&mut r, 4));
        prop_assert_eq!(validate_metric(&a).unwrap(), Ok(()));
        prop_assert_eq!(validate_metric(&tensor_metric(&a, &b)).unwrap(), Ok(()));
    }

    #[test]
    fn sup_metric_obeys_the_triangle_inequality(seed in any::<u64>(), eps in radius()) {
        let mut r = rng(seed);
        let obj = gen::lens_object(&mut r, 3, 3);
        let space = obj.utility_space().unwrap();
        let pick = |r: &mut ChaCha8Rng| space.table(r.gen_range(0..space.count()));
        let (f, g, h) = (pick(&mut r), pick(&mut r), pick(&mut r));
        let d = |x: &FnTable, y: &FnTable| sup_metric(x, y, obj.bwd()).unwrap();
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h));
        prop_assert_eq!(d(&f, &g), d(&g, &f));
        for k in within_ball(&f, eps, obj.bwd()) {
            prop_assert!(d(&f, &k) <= eps);
        }
    }

    #[test]
    fn lens_category_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c, d) = (
            gen::lens_object(&mut r, 3, 3),
            gen::lens_object(&mut r, 3, 3),
            gen::lens_object(&mut r, 3, 3),
            gen::lens_object(&mut r, 3, 3),
        );
        let (f, g, h) = (gen::short_lens(&mut r, &a, &b), gen::short_lens(&mut r, &b, &c), gen::short_lens(&mut r, &c, &d));
        prop_assert_eq!(&compose_lens(&identity_lens(&b), &f).unwrap(), &f);
        prop_assert_eq!(&compose_lens(&f, &identity_lens(&a)).unwrap(), &f);
        let left = compose_lens(&h, &compose_lens(&g, &f).unwrap()).unwrap();
        let right = compose_lens(&compose_lens(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert!(is_short_lens(&left).is_ok());
        prop_assert!(is_short_lens(&tensor_lens(&f, &g)).is_ok());
        prop_assert!(compose_lens(&f, &f).is_err() || a == b);
    }

    #[test]
    fn approximation_is_an_inflationary_graded_closure(seed in any::<u64>(), e in radius(), d in radius()) {
        let mut r = rng(seed);
        let obj = gen::lens_object(&mut r, 2, 3);
        let s = gen::selection(&mut r, &obj);
        let te = t_eps(e, &s);
        prop_assert_eq!(sel_leq(&s, &te).unwrap(), Ok(()));
        prop_assert_eq!(sel_leq(&t_eps(e, &t_eps(d, &s)), &t_eps(e + d, &s)).unwrap(), Ok(()));
        prop_assert!(sel_distance(&s, &te).unwrap().value <= e);
        // oracle: x is in T_e s at k iff some k' within e of k selects x
        let space = s.space();
        for (i, k) in space.tables().enumerate() {
            let reach = within_ball(&k, e, obj.bwd()).iter().fold(Subset::EMPTY, |acc, k2| acc | s.select(k2));
            prop_assert_eq!(te.at(i), reach);
        }
    }

    #[test]
    fn nash_product_of_approximations(seed in any::<u64>(), e in 0u64..3) {
        let mut r = rng(seed);
        let obj = gen::object(2, 1);
        let (s, t) = (gen::selection(&mut r, &obj), gen::selection(&mut r, &obj));
        let eps = ExtReal::units(e);
        let lhs = t_eps(eps, &nash_product(&s, &t).unwrap());
        let rhs = nash_product(&t_eps(eps, &s), &t_eps(eps, &t)).unwrap();
        prop_assert_eq!(lhs.table(), rhs.table());
    }

    #[test]
    fn game_approximation_is_graded(seed in any::<u64>(), e in radius(), d in radius()) {
        let mut r = rng(seed);
        let (x, y) = (gen::lens_object(&mut r, 2, 3), gen::lens_object(&mut r, 2, 2));
        let g = gen::game(&mut r, &x, &y, 2);
        prop_assert!(check_game_graded(&g, e, d).is_ok());
        prop_assert_eq!(&t_eps_game(ExtReal::ZERO, &g), &g);
    }

    #[test]
    fn sequential_composition_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let o = gen::object(2, 1);
        let (f, g, h) = (gen::game(&mut r, &o, &o, 2), gen::game(&mut r, &o, &o, 1), gen::game(&mut r, &o, &o, 2));
        let left = seq_compose(&h, &seq_compose(&g, &f).unwrap()).unwrap();
        let right = seq_compose(&seq_compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(left.equilibria(), right.equilibria());
        prop_assert_eq!(left.lenses(), right.lenses());
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let doc = gen::document(&mut rng(seed));
        let text = serialize(&doc);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize(&back), text);
    }

    #[test]
    fn execution_modes_agree(n in 0usize..2000, m in 1usize..50) {
        let f = |i: usize| (i % m == m - 1).then_some(i * 3);
        prop_assert_eq!(Exec::Sequential.find_first(n, f), Exec::Parallel.find_first(n, f));
        prop_assert_eq!(Exec::Sequential.sum(n, |i| (i % m) as u64), Exec::Parallel.sum(n, |i| (i % m) as u64));
        prop_assert_eq!(Exec::Sequential.map(n, |i| i ^ m), Exec::Parallel.map(n, |i| i ^ m));
    }
}
