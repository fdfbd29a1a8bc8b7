use emubench_core::scenarios::{registry_list, sample_initial_condition, InterfaceMode, ScenarioCoefficients, ScenarioSpec};
use emubench_core::{Grid, SpatialField};

fn with_order(id: &str, dims: usize, order: u8, substeps: usize) -> ScenarioSpec {
    let mut spec = ScenarioSpec::resolve(id, dims).unwrap();
    spec.order = order;
    spec.substeps = substeps;
    spec
}

#[test]
fn linear_problems_are_order_independent() {
    for id in ["diff_adv_diff", "diff_disp", "diff_hyp"] {
        let reference = with_order(id, 1, 0, 1);
        let ic = sample_initial_condition(&reference, 3).unwrap();
        let exact = reference.build_stepper().unwrap().rollout(&ic, 20, 0).unwrap().last();
        for order in 1..=4 {
            for substeps in [1, 3] {
                let got = with_order(id, 1, order, substeps).build_stepper().unwrap().rollout(&ic, 20, 0).unwrap().last();
                assert!(got.max_abs_diff(&exact) < 1e-12, "{id} order {order} substeps {substeps}");
            }
        }
    }
}

#[test]
fn integer_advection_is_a_shift() {
    let mut spec = ScenarioSpec::resolve("diff_adv", 2).unwrap();
    spec.set_num_points(32);
    if let ScenarioCoefficients::Difficulty(d) = &mut spec.coefficients {
        // gamma_1 = alpha_1 N D, so 6 moves three cells along each axis
        d.gammas = vec![0.0, 6.0];
    }
    let ic = sample_initial_condition(&spec, 1).unwrap();
    let out = spec.build_stepper().unwrap().step(&ic).unwrap();
    let n = 32;
    let expected = SpatialField::from_vec(
        *ic.grid(),
        1,
        (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                ic.data()[((i + 3) % n) * n + (j + 3) % n]
            })
            .collect(),
    )
    .unwrap();
    assert!(out.max_abs_diff(&expected) < 1e-12);
}

#[test]
fn substeps_refine_towards_the_same_limit() {
    let ic = sample_initial_condition(&ScenarioSpec::resolve("diff_burgers", 1).unwrap(), 5).unwrap();
    let oracle = with_order("diff_burgers", 1, 4, 64).build_stepper().unwrap().step(&ic).unwrap();
    let errors: Vec<f64> = [1, 2, 4, 8]
        .iter()
        .map(|&s| with_order("diff_burgers", 1, 2, s).build_stepper().unwrap().step(&ic).unwrap().max_abs_diff(&oracle))
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0] / 3.0), "{errors:?}");
}

#[test]
fn difficulty_and_normalized_steppers_agree() {
    for id in ["burgers", "kdv", "ks", "fisher", "adv_diff"] {
        let diff = ScenarioSpec::resolve(&format!("diff_{id}"), 1).unwrap();
        let norm = ScenarioSpec::resolve(&format!("norm_{id}"), 1).unwrap();
        assert_eq!(norm.mode, InterfaceMode::Normalized);
        let ic = sample_initial_condition(&diff, 0).unwrap();
        let a = diff.build_stepper().unwrap().rollout(&ic, 5, 0).unwrap();
        let b = norm.build_stepper().unwrap().rollout(&ic, 5, 0).unwrap();
        assert_eq!(a.data(), b.data(), "{id}");
    }
}

#[test]
fn every_default_scenario_stays_finite() {
    for row in registry_list() {
        for mode in &row.modes {
            let id = format!("{}_{}", mode, row.name);
            let mut spec = ScenarioSpec::resolve(&id, row.num_dims).unwrap();
            spec.warmup = spec.warmup.min(20);
            let ic = sample_initial_condition(&spec, 0).unwrap();
            let traj = spec.build_stepper().unwrap().rollout(&ic, 3, spec.warmup).unwrap();
            assert!(traj.last().is_finite(), "{id} in {}d", row.num_dims);
        }
    }
}

#[test]
fn documented_examples() {
    let gs = ScenarioSpec::resolve("phy_gs_type", 2).unwrap();
    let named = gs.named_constants();
    assert!(named.contains(&("f".into(), 0.04)) && named.contains(&("k".into(), 0.06)));
    assert_eq!(ScenarioSpec::resolve("diff_burgers", 3).unwrap().canonical_name(), "3d_diff_burgers");
    let ks = ScenarioSpec::resolve("diff_ks", 1).unwrap();
    assert_eq!(ks.warmup, 500);
    let ScenarioCoefficients::Difficulty(d) = &ks.coefficients else { panic!() };
    assert_eq!(d.gammas, vec![0.0, 0.0, -1.2, 0.0, -15.0]);
    assert_eq!(d.deltas.gn, -6.0);
    assert_eq!(ks.grid().unwrap(), Grid::new(1, 160, 1.0).unwrap());
}
