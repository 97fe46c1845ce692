use proptest::prelude::*;
use slereg_core::{Complex64, DrivingPath, Kappa};

fn path(kappa: f64, n: usize, seed: u64) -> DrivingPath {
    DrivingPath::sample(Kappa::new(kappa).unwrap(), 1.0, n, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn batched_evaluation_is_bitwise_single(
        kappa in 0.5f64..10.0,
        seed in any::<u64>(),
        queries in prop::collection::vec((0usize..=400, -1.0f64..1.0, 1e-4f64..2.0), 1..40),
    ) {
        let d = path(kappa, 400, seed);
        let qs: Vec<(usize, Complex64)> = queries.iter().map(|&(k, x, y)| (k, Complex64::new(x, y))).collect();
        let (points, clamps) = d.fhat_many(&qs).unwrap();
        let derivs = d.fhat_derivatives(&qs).unwrap();
        let mut single_clamps = 0;
        for (i, &(k, z)) in qs.iter().enumerate() {
            let e = d.fhat(k, z).unwrap();
            single_clamps += e.clamps;
            prop_assert_eq!(e.point.re.to_bits(), points[i].re.to_bits());
            prop_assert_eq!(e.point.im.to_bits(), points[i].im.to_bits());
            let s = d.fhat_derivative_at(k, z).unwrap();
            prop_assert_eq!(s.flagged, derivs[i].flagged);
            prop_assert_eq!(s.value.to_bits(), derivs[i].value.to_bits());
        }
        prop_assert_eq!(clamps, single_clamps);
    }

    #[test]
    fn trace_stays_in_closed_half_plane(kappa in 0.5f64..12.0, seed in any::<u64>()) {
        let t = path(kappa, 256, seed).trace(1.0 / 16.0).unwrap();
        prop_assert!(t.points.iter().all(|z| z.im >= 0.0 && z.re.is_finite()));
    }
}

#[test]
fn zero_driving_error_at_default_height() {
    // f̂_t(iy) = i√(y² + 4t) exactly for the zero driving function
    let n = 1000;
    let dt = 1.0 / n as f64;
    let y = dt.sqrt();
    let t = DrivingPath::zero(1.0, n).unwrap().trace(y).unwrap();
    for (k, z) in t.points.iter().enumerate() {
        let tk = k as f64 * dt;
        let exact = (y * y + 4.0 * tk).sqrt();
        assert!(z.re.abs() < 1e-12 && (z.im - exact).abs() < 1e-12 * exact.max(1.0), "k = {k}");
        let err_vs_curve = (z.im - 2.0 * tk.sqrt()).abs();
        assert!(err_vs_curve <= y + 1e-12);
    }
    // the largest deviation from 2i√t sits at t = 0 and equals y
    assert!((t.points[0].im - y).abs() < 1e-15);
}

#[test]
fn sampling_is_stream_addressed() {
    let k = Kappa::new(3.0).unwrap();
    let a = DrivingPath::sample_stream(k, 1.0, 64, 9, 5).unwrap();
    let b = DrivingPath::sample_stream(k, 1.0, 64, 9, 5).unwrap();
    let c = DrivingPath::sample_stream(k, 1.0, 64, 9, 6).unwrap();
    assert_eq!(a.values(), b.values());
    assert_ne!(a.values(), c.values());
}
