mod common;

use common::*;
use proptest::prelude::*;
use ptmswarm::{parse_tsplib, Problem};

proptest! {
    #[test]
    fn serialize_then_reparse_gives_the_same_matrix(p in problem(2..=60)) {
        let again = parse_tsplib(p.to_tsplib().as_bytes()).unwrap();
        prop_assert_eq!(again.n(), p.n());
        prop_assert_eq!(again.d_max(), p.d_max());
        for i in 0..p.n() {
            prop_assert_eq!(again.row(i), p.row(i));
        }
    }

    #[test]
    fn fractional_coordinates_round_trip(xy in prop::collection::vec((-1e4f64..1e4, -1e4f64..1e4), 2..40)) {
        let cities = xy
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| ptmswarm::City::new(i + 1, x, y))
            .collect();
        let p = Problem::from_cities("frac", cities);
        let again = parse_tsplib(p.to_tsplib().as_bytes()).unwrap();
        prop_assert_eq!(again.cities(), p.cities());
        for i in 0..p.n() {
            prop_assert_eq!(again.row(i), p.row(i));
        }
    }

    #[test]
    fn matrix_is_symmetric_with_zero_diagonal(p in problem(2..=40)) {
        for i in 0..p.n() {
            prop_assert_eq!(p.dist(i, i), 0);
            for j in 0..p.n() {
                prop_assert_eq!(p.dist(i, j), p.dist(j, i));
            }
        }
        prop_assert!(p.d_max() > 0);
    }
}
