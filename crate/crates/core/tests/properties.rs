use std::f64::consts::PI;

use geoxray::field::{Grid2, PlaneFunction, ScalarField};
use geoxray::geodesic::{trace_geodesic_with, wrap_angle, PhaseState, TraceOptions};
use geoxray::io;
use geoxray::metric::ConformalMetric;
use geoxray::phantoms::{random_smooth, PhantomSpec, Shape};
use geoxray::radon::{radon_forward_fn, Sinogram};
use geoxray::xray::FanGeometry;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wrap_angle_lands_in_half_open_interval(t in -100.0f64..100.0) {
        let w = wrap_angle(t);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(((t - w) / (2.0 * PI) - ((t - w) / (2.0 * PI)).round()).abs() < 1e-9);
    }

    #[test]
    fn bilinear_weights_partition_unity(x in -0.9f64..0.9, y in -0.9f64..0.9) {
        let g = Grid2::square(20, 1.0).unwrap();
        let (st, n) = g.bilinear([x, y]);
        let s: f64 = st[..n].iter().map(|(_, w)| w).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fan_stencil_is_convex_combination(b in -10.0f64..10.0, a in -1.6f64..1.6) {
        let g = FanGeometry::new(12, 9).unwrap();
        let st = g.stencil(b, a);
        prop_assert!(st.iter().all(|(k, w)| *k < g.len() && *w >= 0.0));
        prop_assert!((st.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn geodesics_are_reversible(beta in 0.0f64..6.2, alpha in -1.4f64..1.4, k in 0.2f64..0.9) {
        let m = ConformalMetric::sphere_cap(k).unwrap();
        let opts = TraceOptions::with_step(0.01, 20.0);
        let start = PhaseState::inward(beta, alpha);
        let there = trace_geodesic_with(&m, start, opts).unwrap();
        prop_assert!(!there.trapped);
        let back = trace_geodesic_with(&m, there.end().state.reversed(), opts).unwrap();
        let x = back.end().state.x;
        prop_assert!((x[0] - start.x[0]).hypot(x[1] - start.x[1]) < 1e-7);
        prop_assert!((back.exit_time - there.exit_time).abs() < 1e-7);
    }

    #[test]
    fn sinogram_text_roundtrip_is_bit_exact(ns in 2usize..6, nw in 2usize..6, seed in any::<u64>()) {
        let mut s = Sinogram::zeros(ns, nw, 1.5).unwrap();
        let mut state = seed | 1;
        for v in s.values.iter_mut() {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            *v = (state as f64 / u64::MAX as f64 - 0.5) * 1e3;
        }
        let mut buf = Vec::new();
        io::write_sinogram(&mut buf, &s).unwrap();
        prop_assert_eq!(io::read_sinogram(&buf[..]).unwrap(), s);
    }

    #[test]
    fn phantom_json_roundtrip(cx in -0.3f64..0.3, cy in -0.3f64..0.3, w in 0.05f64..0.2, amp in -2.0f64..2.0) {
        let spec = PhantomSpec::new(Shape::GaussianBump { center: [cx, cy], width: w, amplitude: amp });
        let back = PhantomSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn radon_is_linear_and_even(seed in 0u64..1000, a in -3.0f64..3.0) {
        let f = random_smooth(seed, 3, 0.8);
        let g = random_smooth(seed + 1, 3, 0.8);
        let sum = |x: [f64; 2]| a * f.value(x) + g.value(x);
        let (ns, nw) = (17, 8);
        let rf = radon_forward_fn(&f, 1.0, ns, nw, 1.0, 0.01).unwrap();
        let rg = radon_forward_fn(&g, 1.0, ns, nw, 1.0, 0.01).unwrap();
        let rs = radon_forward_fn(&sum, 1.0, ns, nw, 1.0, 0.01).unwrap();
        for i in 0..rs.values.len() {
            prop_assert!((rs.values[i] - a * rf.values[i] - rg.values[i]).abs() < 1e-12);
        }
        // Rf(−s, ω + π) = Rf(s, ω)
        for k in 0..nw / 2 {
            for j in 0..ns {
                prop_assert!((rf.at(j, k) - rf.at(ns - 1 - j, k + nw / 2)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn field_text_roundtrip() {
    let g = Grid2::new(5, 4, (-1.0, 1.0), (-0.5, 2.0)).unwrap();
    let f = ScalarField::from_fn(g, &|x: [f64; 2]| x[0].sin() * x[1].exp());
    let mut buf = Vec::new();
    io::write_field(&mut buf, &f).unwrap();
    assert_eq!(io::read_field(&buf[..]).unwrap(), f);
}
