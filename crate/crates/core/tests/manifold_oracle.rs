//! Ground-state enumeration: exhaustive scan versus branch-and-bound, and
//! manifold invariants on the built-in graphs.

use fullersim_core::manifold::{branch_bound, classical_energy, enumerate_ground_states, exhaustive};
use fullersim_core::topology::BuiltinGraph;
use fullersim_core::SpinConfig;

#[test]
fn branch_and_bound_matches_scan_up_to_26_vertices() {
    for b in [BuiltinGraph::DodecahedronAfm, BuiltinGraph::C24Afm] {
        let g = b.build();
        assert_eq!(branch_bound::search(&g).unwrap(), exhaustive::scan(&g).unwrap(), "{b}");
    }
}

#[test]
fn small_manifolds() {
    let g = BuiltinGraph::DodecahedronAfm.build();
    let m = enumerate_ground_states(&g).unwrap();
    assert_eq!((m.e0(), m.len()), (-18, 250));
    assert_eq!(classical_energy(&g, SpinConfig::all_up(20)).unwrap(), 30);

    let g = BuiltinGraph::C24Afm.build();
    let m = enumerate_ground_states(&g).unwrap();
    assert!(m.is_inversion_closed(24));
    assert!(m.states().windows(2).all(|w| w[0] < w[1]));
    assert_eq!(m.first_energy_violation(&g), None);
}

#[test]
fn c60_afm_has_16000_ground_states() {
    let g = BuiltinGraph::C60Afm.build();
    let m = enumerate_ground_states(&g).unwrap();
    assert_eq!(m.len(), 16_000);
    assert_eq!(m.e0(), -66);
    assert!(m.is_inversion_closed(60));
    assert_eq!(m.first_energy_violation(&g), None);
}
