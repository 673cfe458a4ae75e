//! Property-based invariants over randomized protocol parameters.

use fdqpt::criticality::{critical_times, echo_minimum};
use fdqpt::dynamics::{loschmidt_amplitude, TimeGrid};
use fdqpt::floquet::{effective_mode, floquet_operator, overlaps};
use fdqpt::model::{mode_geometry, ChainParams, Segment};
use fdqpt::{bloch, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

fn params_strategy() -> impl Strategy<Value = ChainParams> {
    (
        0.5..2.0f64,
        0.2..1.5f64,
        0.0..3.0f64,
        0.0..2.0 * PI,
        0.0..2.0 * PI,
        0.1..2.0 * PI,
        0.1..2.0 * PI,
    )
        .prop_map(|(j, gamma, lambda, phi1, phi2, t1, t2)| ChainParams {
            j,
            gamma,
            lambda,
            phi1,
            phi2,
            t1,
            t2,
            sites: 1000,
        })
}

fn k_strategy() -> impl Strategy<Value = f64> {
    (0.01..0.99f64).prop_map(|x| x * PI)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn geometry_invariants(p in params_strategy(), k in k_strategy()) {
        let g = mode_geometry(&p, k).unwrap();
        prop_assert!(g.xi > 0.0);
        prop_assert!((g.d1_hat.norm() - 1.0).abs() < 1e-12);
        prop_assert!((g.d2_hat.norm() - 1.0).abs() < 1e-12);
        // both segment fields share the flux-independent z component
        prop_assert!((g.d1_hat.z - g.d2_hat.z).abs() < 1e-12);
        prop_assert!((0.0..=PI).contains(&g.theta));
    }

    #[test]
    fn floquet_invariants(p in params_strategy(), k in k_strategy()) {
        let g = mode_geometry(&p, k).unwrap();
        let u = floquet_operator(&p, &g);
        prop_assert!(u.unitarity_defect() < 1e-12);
        prop_assert!((u.det() - C64::new(1.0, 0.0)).norm() < 1e-12);
        let eff = effective_mode(&p, &g);
        prop_assert!(eff.xi_eff >= 0.0 && eff.xi_eff <= PI / p.period() + 1e-12);
        prop_assert!((eff.n_eff.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fidelity_overlap_closure(p in params_strategy(), k in k_strategy()) {
        let g = mode_geometry(&p, k).unwrap();
        let eff = effective_mode(&p, &g);
        let ov = overlaps(&p, &g, &eff);
        for seg in [Segment::First, Segment::Second] {
            let f = ov.fidelity(seg);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
            prop_assert!((f * f + ov.u(seg).norm_sqr() - 1.0).abs() < 1e-10);
            let lstar = echo_minimum(&ov, seg);
            prop_assert!((lstar - (1.0 - 2.0 * ov.u(seg).norm_sqr()).powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn amplitude_invariants(p in params_strategy(), k in k_strategy(), x in 0.0..1.0f64) {
        let g = mode_geometry(&p, k).unwrap();
        let eff = effective_mode(&p, &g);
        let ov = overlaps(&p, &g, &eff);
        let t = x * p.period() * (1.0 - 1e-12);
        let amp = loschmidt_amplitude(&p, &g, &eff, &ov, t).unwrap();
        prop_assert!(amp.norm() <= 1.0 + 1e-12);
        let at0 = loschmidt_amplitude(&p, &g, &eff, &ov, 0.0).unwrap();
        prop_assert!((at0 - C64::new(1.0, 0.0)).norm() < 1e-13);
        // continuity across the segment boundary
        let left = loschmidt_amplitude(&p, &g, &eff, &ov, p.t1 * (1.0 - 1e-12)).unwrap();
        let right = loschmidt_amplitude(&p, &g, &eff, &ov, p.t1).unwrap();
        prop_assert!((left - right).norm() < 1e-9);
    }

    #[test]
    fn critical_times_stay_in_window(p in params_strategy(), k in k_strategy()) {
        let g = mode_geometry(&p, k).unwrap();
        for seg in [Segment::First, Segment::Second] {
            let (lo, hi) = match seg {
                Segment::First => (0.0, p.t1),
                Segment::Second => (p.t1, p.period()),
            };
            let times = critical_times(&g, seg, &p);
            for pair in times.windows(2) {
                prop_assert!(pair[0] < pair[1]);
            }
            for t in times {
                prop_assert!(t >= lo && t < hi);
            }
        }
    }

    #[test]
    fn bloch_invariants(p in params_strategy(), k in k_strategy(), x in 0.0..1.0f64) {
        let g = mode_geometry(&p, k).unwrap();
        let eff = effective_mode(&p, &g);
        let t = x * p.period() * (1.0 - 1e-12);
        let v = bloch::bloch_vector(&p, &g, &eff, t).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-10);
        let v0 = bloch::bloch_vector(&p, &g, &eff, 0.0).unwrap();
        prop_assert!((v0 - eff.n_eff).norm() < 1e-12);
        let left = bloch::bloch_vector(&p, &g, &eff, p.t1 * (1.0 - 1e-12)).unwrap();
        let right = bloch::bloch_vector(&p, &g, &eff, p.t1).unwrap();
        prop_assert!((left - right).norm() < 1e-9);
    }

    #[test]
    fn flux_shift_invariance(p in params_strategy(), k in k_strategy(), c in -6.3..6.3f64) {
        let q = p.with_flux_shift(c);
        let g = mode_geometry(&p, k).unwrap();
        let gq = mode_geometry(&q, k).unwrap();
        let e = effective_mode(&p, &g);
        let eq = effective_mode(&q, &gq);
        prop_assert!((e.xi_eff - eq.xi_eff).abs() < 1e-10);
        if !e.degenerate && !eq.degenerate {
            let o = overlaps(&p, &g, &e);
            let oq = overlaps(&q, &gq, &eq);
            prop_assert!((o.f1 - oq.f1).abs() < 1e-10);
            prop_assert!((o.f2 - oq.f2).abs() < 1e-10);
            prop_assert!((o.u1.norm() - oq.u1.norm()).abs() < 1e-10);
            prop_assert!((o.u2.norm() - oq.u2.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_decomposition(p in params_strategy(), k in k_strategy()) {
        let tgrid = TimeGrid::uniform(&p, 64, &[]).unwrap();
        let s = fdqpt::topology::phase_series(&p, k, &tgrid).unwrap();
        prop_assert!(s.total[0].abs() < 1e-12);
        prop_assert!(s.geometric[0].abs() < 1e-12);
        for i in 0..s.times.len() {
            prop_assert!((s.geometric[i] - (s.total[i] - s.dynamical[i])).abs() < 1e-10);
        }
    }
}
