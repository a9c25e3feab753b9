use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use super::{Coupling, Edge, FullereneGraph};
use crate::error::{Error, Result};

/// The four shipped coupling graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinGraph {
    /// 20-vertex dodecahedron, all couplings `+1`.
    DodecahedronAfm,
    /// The 24-vertex fullerene (two hexagons capping a barrel of twelve
    /// pentagons, D6d symmetry), all couplings `+1`.
    C24Afm,
    /// Truncated icosahedron, all couplings `+1`.
    C60Afm,
    /// Truncated icosahedron with `+1` on pentagon edges and `-1` on the
    /// edges joining pentagons.
    C60Mixed,
}

impl BuiltinGraph {
    pub const ALL: [BuiltinGraph; 4] = [
        BuiltinGraph::DodecahedronAfm,
        BuiltinGraph::C24Afm,
        BuiltinGraph::C60Afm,
        BuiltinGraph::C60Mixed,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            BuiltinGraph::DodecahedronAfm => "dodecahedron_afm",
            BuiltinGraph::C24Afm => "c24_afm",
            BuiltinGraph::C60Afm => "c60_afm",
            BuiltinGraph::C60Mixed => "c60_mixed",
        }
    }

    pub fn build(self) -> FullereneGraph {
        let edges: Vec<Edge> = match self {
            BuiltinGraph::DodecahedronAfm => uniform(&DODECAHEDRON_EDGES),
            BuiltinGraph::C24Afm => uniform(&C24_EDGES),
            BuiltinGraph::C60Afm => truncated_icosahedron(false),
            BuiltinGraph::C60Mixed => truncated_icosahedron(true),
        };
        let n = match self {
            BuiltinGraph::DodecahedronAfm => 20,
            BuiltinGraph::C24Afm => 24,
            BuiltinGraph::C60Afm | BuiltinGraph::C60Mixed => 60,
        };
        FullereneGraph::new(n, edges).expect("built-in edge tables are valid")
    }
}

impl FromStr for BuiltinGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinGraph::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::UnknownGraph(s.to_string()))
    }
}

impl core::fmt::Display for BuiltinGraph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn build_graph(name: &str) -> Result<FullereneGraph> {
    Ok(name.parse::<BuiltinGraph>()?.build())
}

fn uniform(table: &[(u8, u8)]) -> Vec<Edge> {
    table
        .iter()
        .map(|&(a, b)| Edge::new(a as usize, b as usize, Coupling::ANTIFERRO, "edge"))
        .collect()
}

fn truncated_icosahedron(mixed: bool) -> Vec<Edge> {
    C60_EDGES
        .iter()
        .map(|&(a, b, pentagon)| {
            let (coupling, class) = match (pentagon, mixed) {
                (true, _) => (Coupling::ANTIFERRO, "pentagon"),
                (false, true) => (Coupling::FERRO, "inter-pentagon"),
                (false, false) => (Coupling::ANTIFERRO, "inter-pentagon"),
            };
            Edge::new(a as usize, b as usize, coupling, String::from(class))
        })
        .collect()
}

// Top pentagon 0..5, its spokes 5..10, the matching zigzag vertices 10..15,
// bottom pentagon 15..20.
#[rustfmt::skip]
const DODECAHEDRON_EDGES: [(u8, u8); 30] = [
    (0, 1), (0, 4), (0, 5), (1, 2), (1, 6), (2, 3),
    (2, 7), (3, 4), (3, 8), (4, 9), (5, 10), (5, 14),
    (6, 10), (6, 11), (7, 11), (7, 12), (8, 12), (8, 13),
    (9, 13), (9, 14), (10, 15), (11, 16), (12, 17), (13, 18),
    (14, 19), (15, 16), (15, 19), (16, 17), (17, 18), (18, 19),
];

// Same barrel layout with hexagonal caps: hexagon 0..6, spokes 6..12,
// zigzag 12..18, hexagon 18..24.
#[rustfmt::skip]
const C24_EDGES: [(u8, u8); 36] = [
    (0, 1), (0, 5), (0, 6), (1, 2), (1, 7), (2, 3),
    (2, 8), (3, 4), (3, 9), (4, 5), (4, 10), (5, 11),
    (6, 12), (6, 17), (7, 12), (7, 13), (8, 13), (8, 14),
    (9, 14), (9, 15), (10, 15), (10, 16), (11, 16), (11, 17),
    (12, 18), (13, 19), (14, 20), (15, 21), (16, 22), (17, 23),
    (18, 19), (18, 23), (19, 20), (20, 21), (21, 22), (22, 23),
];

// Pentagon k occupies vertices 5k..5k+5 in cyclic order; `true` marks a
// pentagon edge, `false` an edge joining two pentagons.
#[rustfmt::skip]
const C60_EDGES: [(u8, u8, bool); 90] = [
    (0, 1, true), (0, 4, true), (0, 5, false), (1, 2, true), (1, 10, false),
    (2, 3, true), (2, 15, false), (3, 4, true), (3, 20, false), (4, 25, false),
    (5, 6, true), (5, 9, true), (6, 7, true), (6, 11, false), (7, 8, true),
    (7, 35, false), (8, 9, true), (8, 30, false), (9, 26, false), (10, 11, true),
    (10, 14, true), (11, 12, true), (12, 13, true), (12, 36, false), (13, 14, true),
    (13, 40, false), (14, 16, false), (15, 16, true), (15, 19, true), (16, 17, true),
    (17, 18, true), (17, 41, false), (18, 19, true), (18, 45, false), (19, 21, false),
    (20, 21, true), (20, 24, true), (21, 22, true), (22, 23, true), (22, 46, false),
    (23, 24, true), (23, 50, false), (24, 29, false), (25, 26, true), (25, 29, true),
    (26, 27, true), (27, 28, true), (27, 31, false), (28, 29, true), (28, 51, false),
    (30, 31, true), (30, 34, true), (31, 32, true), (32, 33, true), (32, 52, false),
    (33, 34, true), (33, 55, false), (34, 39, false), (35, 36, true), (35, 39, true),
    (36, 37, true), (37, 38, true), (37, 44, false), (38, 39, true), (38, 56, false),
    (40, 41, true), (40, 44, true), (41, 42, true), (42, 43, true), (42, 49, false),
    (43, 44, true), (43, 57, false), (45, 46, true), (45, 49, true), (46, 47, true),
    (47, 48, true), (47, 54, false), (48, 49, true), (48, 58, false), (50, 51, true),
    (50, 54, true), (51, 52, true), (52, 53, true), (53, 54, true), (53, 59, false),
    (55, 56, true), (55, 59, true), (56, 57, true), (57, 58, true), (58, 59, true),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_signs() {
        let d = build_graph("dodecahedron_afm").unwrap();
        assert_eq!((d.n_vertices(), d.n_edges()), (20, 30));
        assert!(d.edges().iter().all(|e| e.coupling == Coupling::ANTIFERRO));

        let c24 = build_graph("c24_afm").unwrap();
        assert_eq!((c24.n_vertices(), c24.n_edges()), (24, 36));

        let m = build_graph("c60_mixed").unwrap();
        assert_eq!((m.n_vertices(), m.n_edges()), (60, 90));
        let red = m.edges().iter().filter(|e| e.coupling == Coupling::ANTIFERRO).count();
        assert_eq!((red, 90 - red), (60, 30));
        assert!(build_graph("c60_afm")
            .unwrap()
            .edges()
            .iter()
            .all(|e| e.coupling == Coupling::ANTIFERRO));
    }

    #[test]
    fn mixed_buckyball_has_two_red_one_blue_per_vertex() {
        let m = BuiltinGraph::C60Mixed.build();
        for v in 0..60 {
            let red = m.incident(v).iter().filter(|i| i.coupling == Coupling::ANTIFERRO).count();
            assert_eq!(red, 2, "vertex {v}");
        }
    }

    #[test]
    fn red_edges_form_twelve_pentagons() {
        let m = BuiltinGraph::C60Mixed.build();
        for k in 0..12 {
            for t in 0..5 {
                let (a, b) = (5 * k + t, 5 * k + (t + 1) % 5);
                let e = m.edge_between(a, b).expect("pentagon edge");
                assert_eq!(m.edges()[e].coupling, Coupling::ANTIFERRO);
                assert_eq!(m.edges()[e].class, "pentagon");
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert_eq!(build_graph("c70").unwrap_err(), Error::UnknownGraph("c70".into()));
    }
}
