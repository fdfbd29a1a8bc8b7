use emubench_core::metrics::{compute_metric, MetricDescriptor};
use emubench_core::scenarios::{difficulty_to_normalized, normalized_to_difficulty, DifficultyCoefficients, NonlinearCoefficients};
use emubench_core::{forward_transform, inverse_transform, Grid, SpatialField, WavenumberGrid};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = SpatialField> {
    (1usize..=3, 2usize..=6, 1usize..=2)
        .prop_flat_map(|(dims, half, channels)| {
            let n = 2 * half;
            let len = channels * n.pow(dims as u32);
            (Just((dims, n, channels)), prop::collection::vec(-5.0f64..5.0, len))
        })
        .prop_map(|((dims, n, channels), data)| SpatialField::from_vec(Grid::new(dims, n, 1.0).unwrap(), channels, data).unwrap())
}

proptest! {
    #[test]
    fn fft_roundtrip(u in field()) {
        let back = inverse_transform(&forward_transform(&u).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn parseval(u in field()) {
        let grid = *u.grid();
        let weights = WavenumberGrid::new(grid).conjugate_weights();
        let uh = forward_transform(&u).unwrap();
        let n = grid.spatial_len() as f64;
        let spectral: f64 = uh.data().iter().enumerate().map(|(i, c)| weights[i % weights.len()] * c.norm_sqr()).sum::<f64>() / n;
        let spatial: f64 = u.data().iter().map(|v| v * v).sum();
        prop_assert!((spectral - spatial).abs() <= 1e-10 * spatial.max(1.0));
    }

    #[test]
    fn mse_is_basis_independent(u in field(), shift in -1.0f64..1.0) {
        let v = u.scaled(0.5 + shift);
        let a = compute_metric(&MetricDescriptor::from_name("mean_MSE").unwrap(), &u, &v).unwrap();
        let b = compute_metric(&MetricDescriptor::from_name("mean_fourier_MSE").unwrap(), &u, &v).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn difficulty_roundtrip(
        gammas in prop::collection::vec(-100.0f64..100.0, 1..=5),
        delta in -20.0f64..20.0,
        half in 2usize..=256,
        dims in 1usize..=3,
        max_abs in 0.01f64..50.0,
    ) {
        let diff = DifficultyCoefficients {
            gammas,
            deltas: NonlinearCoefficients { conv: delta, gn: -delta, ..Default::default() },
            num_points: 2 * half,
            num_dims: dims,
            max_abs,
        };
        let back = normalized_to_difficulty(&difficulty_to_normalized(&diff).unwrap(), diff.num_points, dims, max_abs).unwrap();
        for (a, b) in back.gammas.iter().zip(&diff.gammas) {
            prop_assert!((a - b).abs() <= 1e-14 * b.abs());
        }
        prop_assert!((back.deltas.conv - delta).abs() <= 1e-14 * delta.abs());
        prop_assert!((back.deltas.gn + delta).abs() <= 1e-14 * delta.abs());
    }
}
