use proptest::prelude::*;
use tournament_eh::bounds::iterate_substitution;
use tournament_eh::transitive::max_transitive_within;
use tournament_eh::*;

fn tournament(max_n: usize) -> impl Strategy<Value = Tournament> {
    (1..=max_n, any::<u64>()).prop_map(|(n, seed)| gen_random(n, seed))
}

proptest! {
    #[test]
    fn density_is_antisymmetric(n in 2usize..40, seed in any::<u64>(), split in 1usize..39) {
        let t = gen_random(n, seed);
        let k = split.min(n - 1);
        let x = VertexSet::new(0..k);
        let y = VertexSet::new(k..n);
        let a = density(&t, &x, &y).unwrap();
        let b = density(&t, &y, &x).unwrap();
        prop_assert_eq!(a.pairs(), b.pairs());
        prop_assert_eq!(a.edges() + b.edges(), a.pairs());
    }

    #[test]
    fn substitution_adds_part_sizes(h in tournament(6), seeds in prop::collection::vec((1usize..5, any::<u64>()), 6)) {
        let parts: Vec<Tournament> = seeds[..h.n()].iter().map(|&(n, s)| gen_random(n, s)).collect();
        let (t, block) = substitute(&h, &parts).unwrap();
        prop_assert_eq!(t.n(), parts.iter().map(Tournament::n).sum::<usize>());
        // every block is homogeneous and copies its part
        let mut start = 0;
        for (b, p) in parts.iter().enumerate() {
            let s = VertexSet::new(start..start + p.n());
            prop_assert!(block[start..start + p.n()].iter().all(|&x| x == b));
            if p.n() < t.n() {
                prop_assert!(is_homogeneous(&t, &s));
            }
            prop_assert_eq!(&t.induced(&s).unwrap().0, p);
            start += p.n();
        }
    }

    #[test]
    fn trn_round_trip(t in tournament(70)) {
        let text = t.to_trn();
        let back = Tournament::from_trn(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_trn(), text);
    }

    #[test]
    fn composition_is_monotone(f in 0.01f64..0.99, d in 0.01f64..0.99, k in 1usize..50, step in 0.001f64..0.01) {
        let base = compose_lower_bound(f, d, k).unwrap();
        prop_assert!(compose_lower_bound(f + step, d, k).unwrap() > base);
        prop_assert!(compose_lower_bound(f, d + step, k).unwrap() > base);
        prop_assert!(compose_lower_bound(f, d, k + 1).unwrap() < base);
        prop_assert!(base < f.min(d));
    }

    #[test]
    fn iterated_substitution_multiplies_tr(seed in any::<u64>(), n in 1usize..5, k in 0usize..3) {
        let b = gen_random(n, seed);
        let t = iterate_substitution(&b, k).unwrap();
        let tr = |t: &Tournament| max_transitive_within(t, &tournament_eh::Bits::full(t.n())).len();
        prop_assert_eq!(tr(&t), tr(&b).pow(k as u32));
    }

    #[test]
    fn greedy_witness_is_transitive(t in tournament(100)) {
        let w = greedy_transitive(&t);
        prop_assert!(w.verify(&t));
        prop_assert!(w.size() >= tournament_eh::transitive::ramsey_floor(t.n()));
    }
}
