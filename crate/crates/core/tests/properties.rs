//! Property tests for the model invariants.

use std::sync::OnceLock;

use fullersim_core::calibrate::{equivalent_time, FidelityCurve};
use fullersim_core::manifold::{classical_energy, enumerate_ground_states, GroundStateManifold};
use fullersim_core::measures::{
    bhattacharyya, binned_fidelity, sample, sparse_dimer_expectation,
};
use fullersim_core::perturbation::{floppy_dimers, DimerStencil};
use fullersim_core::schedule::{AnnealingSchedule, Knot};
use fullersim_core::topology::{
    automorphisms, orbit_partition, AutomorphismGroup, BuiltinGraph, FullereneGraph, OrbitPartition,
};
use fullersim_core::SpinConfig;
use proptest::prelude::*;

struct Fixture {
    g: FullereneGraph,
    group: AutomorphismGroup,
    m: GroundStateManifold,
    orbits: OrbitPartition,
}

fn dodecahedron() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let group = automorphisms(&g);
        let m = enumerate_ground_states(&g).unwrap();
        let orbits = orbit_partition(&group, m.states(), true).unwrap();
        Fixture { g, group, m, orbits }
    })
}

fn mixed() -> &'static FullereneGraph {
    static G: OnceLock<FullereneGraph> = OnceLock::new();
    G.get_or_init(|| BuiltinGraph::C60Mixed.build())
}

fn normalise(w: Vec<f64>) -> Vec<f64> {
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..1.0, len).prop_map(normalise)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_is_flip_invariant_with_edge_parity(bits in any::<u64>()) {
        let g = mixed();
        let c = SpinConfig(bits & ((1u64 << 60) - 1));
        let e = classical_energy(g, c).unwrap();
        prop_assert_eq!(e, classical_energy(g, c.inverted(60)).unwrap());
        prop_assert_eq!((e - 90).rem_euclid(2), 0);
        prop_assert!(e.abs() <= 90);
    }

    #[test]
    fn orbit_members_share_energy_and_dimers(bits in 0u64..(1 << 20), pick in 0usize..120) {
        let f = dodecahedron();
        let c = SpinConfig(bits);
        let p = &f.group.elements()[pick];
        let image = SpinConfig((0..20).fold(0, |acc, i| acc | (((bits >> i) & 1) << p.apply(i))));
        let part = orbit_partition(&f.group, &[c, image, c.inverted(20)], true).unwrap();
        prop_assert_eq!(part.n_orbits(), 1);
        let stencil = DimerStencil::new(&f.g);
        prop_assert_eq!(classical_energy(&f.g, c).unwrap(), classical_energy(&f.g, image).unwrap());
        prop_assert_eq!(stencil.count(c.bits()), stencil.count(image.bits()));
        prop_assert_eq!(floppy_dimers(&f.g, c).unwrap().len(), stencil.count(c.bits()) as usize);
    }

    #[test]
    fn binned_fidelity_dominates_plain(p in distribution(250), q in distribution(250)) {
        let f = dodecahedron();
        let plain = bhattacharyya(&p, &q).unwrap();
        let binned = binned_fidelity(&p, &q, &f.orbits).unwrap();
        prop_assert!(binned + 1e-12 >= plain);
        prop_assert!((0.0..=1.0).contains(&binned));
    }

    #[test]
    fn dimer_expectation_is_group_invariant(q in distribution(250), pick in 0usize..120) {
        let f = dodecahedron();
        let p = &f.group.elements()[pick];
        let moved: Vec<SpinConfig> = f.m.states().iter()
            .map(|c| SpinConfig((0..20).fold(0, |acc, i| acc | (((c.bits() >> i) & 1) << p.apply(i)))))
            .collect();
        let a = sparse_dimer_expectation(&f.g, f.m.states(), &q).unwrap();
        let b = sparse_dimer_expectation(&f.g, &moved, &q).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_reproducible(w in distribution(40), count in 0usize..500, seed in any::<u64>()) {
        let a = sample(&w, count, seed).unwrap();
        prop_assert_eq!(a.len(), count);
        prop_assert_eq!(&a, &sample(&w, count, seed).unwrap());
        prop_assert!(a.iter().all(|&i| i < 40));
    }

    #[test]
    fn schedule_is_linear_between_knots(
        steps in prop::collection::vec((0.01f64..1.0, 0.0f64..10.0, 0.0f64..10.0), 1..12),
        g0 in 0.0f64..10.0, j0 in 0.0f64..10.0,
    ) {
        let total: f64 = steps.iter().map(|s| s.0).sum();
        let mut s = 0.0;
        let mut knots = vec![Knot { s: 0.0, gamma: g0, j: j0 }];
        for (k, &(ds, gamma, j)) in steps.iter().enumerate() {
            s += ds / total;
            let s = if k + 1 == steps.len() { 1.0 } else { s };
            knots.push(Knot { s, gamma, j });
        }
        prop_assume!(knots.windows(2).all(|w| w[1].s > w[0].s));
        let sched = AnnealingSchedule::new("p", knots.clone()).unwrap();
        for w in knots.windows(2) {
            prop_assert_eq!(sched.eval(w[0].s).unwrap(), (w[0].gamma, w[0].j));
            let (gm, jm) = sched.eval(0.5 * (w[0].s + w[1].s)).unwrap();
            prop_assert!((gm - 0.5 * (w[0].gamma + w[1].gamma)).abs() < 1e-9);
            prop_assert!((jm - 0.5 * (w[0].j + w[1].j)).abs() < 1e-9);
        }
    }

    #[test]
    fn equivalent_time_round_trips(
        incs in prop::collection::vec(0.01f64..0.2, 3..10),
        scale in 0.3f64..3.0,
        at in 0.0f64..1.0,
    ) {
        let mut f = 0.0;
        let points_a: Vec<(f64, f64)> = incs.iter().enumerate().map(|(k, d)| {
            f += d;
            ((k + 1) as f64, f)
        }).collect();
        let points_b: Vec<(f64, f64)> = points_a.iter().map(|&(t, f)| (t * scale, f)).collect();
        let a = FidelityCurve::new("a", points_a.clone()).unwrap();
        let b = FidelityCurve::new("b", points_b).unwrap();
        let (lo, hi) = a.range();
        let t = lo + at * (hi - lo);
        let t_b = equivalent_time(&a, &b, t).unwrap();
        prop_assert!((t_b - scale * t).abs() < 1e-9 * scale * t);
        let back = equivalent_time(&b, &a, t_b).unwrap();
        prop_assert!((back - t).abs() < 1e-9 * t);
    }
}
