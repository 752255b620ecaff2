use proptest::prelude::*;

use pwdyn::harness::{random_map, random_point, GeneratorConfig};
use pwdyn::map::parse_map;
use pwdyn::{PiecewiseMap, Side};

fn map_from(seed: u64, pieces: usize) -> PiecewiseMap {
    random_map(&GeneratorConfig { seed, max_pieces: pieces, ..GeneratorConfig::default() }).expect("generator")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(seed in any::<u64>(), pieces in 1usize..6) {
        let f = map_from(seed, pieces);
        prop_assert_eq!(parse_map(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn preimages_map_back_exactly(seed in any::<u64>(), pseed in any::<u64>()) {
        let f = map_from(seed, 4);
        let y = f.a() + (f.b() - f.a()) * random_point(pseed, 16);
        for x in f.preimage(&y) {
            prop_assert!(f.in_domain(&x));
            match f.eval(&x).unwrap() {
                Some(v) => prop_assert_eq!(v, y.clone()),
                None => prop_assert!(
                    f.lateral_limit(&x, Side::Minus).ok() == Some(y.clone())
                        || f.lateral_limit(&x, Side::Plus).ok() == Some(y.clone())
                ),
            }
        }
    }

    #[test]
    fn composition_is_associative(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (f, g, h) = (map_from(a, 3), map_from(b, 3), map_from(c, 3));
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn powers_add(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let f = map_from(seed, 3);
        let split = f.iterate(n).unwrap().compose(&f.iterate(m).unwrap()).unwrap();
        prop_assert_eq!(split, f.iterate(n + m).unwrap());
    }

    #[test]
    fn composition_agrees_pointwise(a in any::<u64>(), b in any::<u64>(), pseed in any::<u64>()) {
        let (f, g) = (map_from(a, 4), map_from(b, 4));
        let fg = f.compose(&g).unwrap();
        let x = f.a() + (f.b() - f.a()) * random_point(pseed, 32);
        if let (Some(gx), Some(v)) = (g.eval(&x).unwrap(), fg.eval(&x).unwrap()) {
            if let Some(fgx) = f.eval(&gx).unwrap() {
                prop_assert_eq!(v, fgx);
            }
        }
    }

    #[test]
    fn special_points_partition(seed in any::<u64>()) {
        let f = map_from(seed, 5);
        let sp = f.special_points();
        prop_assert!(sp.t.is_disjoint(&sp.d));
        prop_assert_eq!(sp.s.clone(), sp.t.union(&sp.d).cloned().collect());
        for w in &sp.d {
            prop_assert!(f.eval(w).unwrap().is_none());
            prop_assert_ne!(f.lateral_limit(w, Side::Minus).unwrap(), f.lateral_limit(w, Side::Plus).unwrap());
        }
    }
}
