use proptest::prelude::*;
use trafficflow::clusters::{is_free, steps_to_free};
use trafficflow::dynamics::{evolve, fundamental_diagram_point, fundamental_flux, step_fast, Direction, FlowParams};
use trafficflow::measures::{fixed_count_config, pushforward_distribution, pushforward_iterated, translation_invariance_check};
use trafficflow::sawtooth::{commutation_check, merge, redirect, step_lanes};
use trafficflow::substitution::{decode, encode, step_tilde};
use trafficflow::{BigRational, Configuration, Density, Word};

fn ring(cells: Vec<u32>, lanes: u32) -> Configuration {
    Configuration::ring(cells, lanes).unwrap()
}

#[test]
fn sampled_ring_settles_on_the_fundamental_diagram() {
    let x = fixed_count_config(200, 2, 130, 7).unwrap();
    let point = fundamental_diagram_point(&x, 2, 400).unwrap();
    assert_eq!(point.flux_predicted, fundamental_flux(Density::new(130, 200), 2, 2).unwrap());
    assert_eq!(point.flux_measured, point.flux_predicted);
}

#[test]
fn sparse_ring_reaches_free_flow_and_stays() {
    let x = fixed_count_config(64, 1, 20, 3).unwrap();
    let t = steps_to_free(&x, 1, 33).unwrap().expect("free within half the length");
    let params = FlowParams::forward(1, 1);
    let settled = evolve(&x, &params, t).unwrap();
    assert!(is_free(&settled, 1).unwrap());
    assert!(is_free(&evolve(&settled, &params, 10).unwrap(), 1).unwrap());
}

#[test]
fn iterated_pushforward_keeps_total_mass() {
    let one = BigRational::from_integer(1.into());
    let weights = pushforward_distribution(1, 3, Density::new(2, 5), 2).unwrap();
    assert_eq!(weights.total(), one);
    assert!(translation_invariance_check(&weights, 1).unwrap());
    let single = Word::parse("1", 1).unwrap();
    assert_eq!(pushforward_iterated(2, &single, Density::new(1, 3), 3).unwrap(), BigRational::new(1.into(), 3.into()));
}

proptest! {
    #[test]
    fn lanes_step_like_the_multilane_ring(cells in proptest::collection::vec(0u32..=3, 1..30), anchor in -40isize..40, v in 1u32..4) {
        let x = ring(cells, 3);
        prop_assert_eq!(merge(&redirect(&x, anchor)).unwrap(), x.clone());
        let stepped = step_lanes(&x, anchor, v).unwrap();
        prop_assert_eq!(stepped.particles(), x.particles());
        prop_assert_eq!(stepped, step_lanes(&x, 0, v).unwrap());
        prop_assert!(commutation_check(&x, v).unwrap());
    }

    #[test]
    fn coding_round_trip_and_conjugacy(bits in proptest::collection::vec(0u32..=1, 1..40), v in 2u32..4, steps in 0usize..12) {
        prop_assume!(bits.contains(&1));
        let x = ring(bits, 1);
        let mut coded = encode(&x, v).unwrap();
        prop_assert_eq!(decode(&coded).unwrap(), x.clone());
        let mut direct = x;
        for _ in 0..steps {
            coded = step_tilde(&coded).unwrap();
            direct = step_fast(&direct, v, Direction::Forward).unwrap();
        }
        prop_assert_eq!(decode(&coded).unwrap(), direct);
    }
}
