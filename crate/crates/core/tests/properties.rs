mod common;

use common::{brute_force_edt, same_partition, union_find_labels};
use poincare_lab::edt::exact_distance_transform;
use poincare_lab::morphology::{connected_components, erode};
use poincare_lab::{GridDomain, GridSpec};
use proptest::prelude::*;

fn indicator(dim: usize) -> impl Strategy<Value = GridDomain> {
    let sizes = if dim == 2 {
        (2usize..20, 2usize..20, Just(1usize)).boxed()
    } else {
        (2usize..7, 2usize..7, 2usize..7).boxed()
    };
    sizes.prop_flat_map(move |(a, b, c)| {
        let n = a * b * c;
        prop::collection::vec(any::<bool>(), n).prop_map(move |mask| {
            let ext: Vec<usize> = if dim == 2 { vec![a, b] } else { vec![a, b, c] };
            let spec = GridSpec::new(dim, &vec![0.0; dim], 0.125, &ext).unwrap();
            GridDomain::new(spec, mask).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn edt_matches_brute_force_2d(d in indicator(2)) {
        let n_in = d.count_inside();
        prop_assume!(n_in > 0 && n_in < d.spec().num_cells());
        let fast = exact_distance_transform(&d, false).unwrap();
        for (a, b) in fast.values().iter().zip(brute_force_edt(&d)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn edt_matches_brute_force_3d(d in indicator(3)) {
        let n_in = d.count_inside();
        prop_assume!(n_in > 0 && n_in < d.spec().num_cells());
        let fast = exact_distance_transform(&d, true).unwrap();
        for (i, (a, b)) in fast.values().iter().zip(brute_force_edt(&d)).enumerate() {
            let b = if d.is_inside(i) { b } else { -b };
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn flood_fill_matches_union_find(d in prop_oneof![indicator(2), indicator(3)]) {
        let ours = connected_components(&d);
        prop_assert!(same_partition(&ours.labels, &union_find_labels(&d)));
    }

    #[test]
    fn erosion_is_monotone(d in indicator(2), a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let (small, large) = if a <= b { (a, b) } else { (b, a) };
        let e_small = erode(&d, small).unwrap();
        let e_large = erode(&d, large).unwrap();
        prop_assert!(e_large.is_subset_of(&e_small));
        prop_assert!(e_small.is_subset_of(&d));
    }
}
