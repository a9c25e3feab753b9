use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::FullereneGraph;

/// Edge label compared by the search: `(coupling, class id)`.
pub(crate) type Label = (i32, usize);

/// Adjacency lists with labelled edges; the search runs on this so it is not
/// tied to cubic graphs.
pub(crate) struct LabelledGraph {
    pub adjacency: Vec<Vec<(usize, Label)>>,
}

impl LabelledGraph {
    fn label(&self, a: usize, b: usize) -> Option<Label> {
        self.adjacency[a].iter().find(|(w, _)| *w == b).map(|(_, l)| *l)
    }

    fn signature(&self, v: usize) -> Vec<Label> {
        let mut s: Vec<Label> = self.adjacency[v].iter().map(|(_, l)| *l).collect();
        s.sort_unstable();
        s
    }
}

/// Vertex permutation `v -> image[v]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || core::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Permutation(images))
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }

    #[inline]
    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }
}

/// All vertex permutations preserving adjacency, coupling sign and edge
/// class, sorted lexicographically by image vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismGroup {
    n: usize,
    elements: Vec<Permutation>,
}

impl AutomorphismGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Explicit group-axiom check: identity, closure and inverses.
    pub fn is_group(&self) -> bool {
        self.contains(&Permutation::identity(self.n))
            && self.elements.iter().all(|a| {
                self.contains(&a.inverse())
                    && self.elements.iter().all(|b| self.contains(&a.compose(b)))
            })
    }

    /// Orbit label of every vertex; labels are numbered by smallest member.
    pub fn vertex_orbits(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if label[v] == usize::MAX {
                for p in &self.elements {
                    label[p.apply(v)] = next;
                }
                next += 1;
            }
        }
        label
    }

    /// Orbit label of every edge of `g` under the induced edge action.
    pub fn edge_orbits(&self, g: &FullereneGraph) -> Vec<usize> {
        let mut label = vec![usize::MAX; g.n_edges()];
        let mut next = 0;
        for (k, e) in g.edges().iter().enumerate() {
            if label[k] == usize::MAX {
                for p in &self.elements {
                    let image = g
                        .edge_between(p.apply(e.u), p.apply(e.v))
                        .expect("automorphism maps edges to edges");
                    label[image] = next;
                }
                next += 1;
            }
        }
        label
    }
}

/// Full automorphism group of `g` (coupling- and class-preserving).
pub fn automorphisms(g: &FullereneGraph) -> AutomorphismGroup {
    search(&g.labelled_adjacency())
}

/// Backtracking over candidate images in breadth-first vertex order. Once a
/// vertex has a mapped neighbour its image must be a neighbour of that
/// neighbour's image carrying the same label, which keeps the candidate set
/// at most the vertex degree.
pub(crate) fn search(graph: &LabelledGraph) -> AutomorphismGroup {
    let n = graph.adjacency.len();
    let order = breadth_first_cover(graph);
    let signatures: Vec<Vec<Label>> = (0..n).map(|v| graph.signature(v)).collect();
    let anchor: Vec<Option<usize>> = order
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            graph.adjacency[v]
                .iter()
                .map(|(w, _)| *w)
                .filter(|w| order[..k].contains(w))
                .min_by_key(|w| order.iter().position(|x| x == w))
        })
        .collect();

    let mut state = Search {
        graph,
        order: &order,
        anchor: &anchor,
        signatures: &signatures,
        image: vec![usize::MAX; n],
        used: vec![false; n],
        found: Vec::new(),
    };
    state.extend(0);
    let mut elements = state.found;
    elements.sort();
    AutomorphismGroup { n, elements }
}

fn breadth_first_cover(graph: &LabelledGraph) -> Vec<usize> {
    let n = graph.adjacency.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = graph.adjacency[v].iter().map(|(w, _)| *w).collect();
            next.sort_unstable();
            for w in next {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

struct Search<'a> {
    graph: &'a LabelledGraph,
    order: &'a [usize],
    anchor: &'a [Option<usize>],
    signatures: &'a [Vec<Label>],
    image: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Permutation>,
}

impl Search<'_> {
    fn extend(&mut self, k: usize) {
        if k == self.order.len() {
            self.found.push(Permutation(self.image.clone()));
            return;
        }
        let v = self.order[k];
        let candidates: Vec<usize> = match self.anchor[k] {
            Some(a) => self.graph.adjacency[self.image[a]]
                .iter()
                .map(|(w, _)| *w)
                .collect(),
            None => (0..self.order.len()).collect(),
        };
        for w in candidates {
            if self.used[w] || self.signatures[w] != self.signatures[v] || !self.consistent(v, w) {
                continue;
            }
            self.image[v] = w;
            self.used[w] = true;
            self.extend(k + 1);
            self.used[w] = false;
            self.image[v] = usize::MAX;
        }
    }

    /// Mapped neighbours of `v` must land on neighbours of `w` with equal
    /// labels, and `w` may have no other mapped neighbours.
    fn consistent(&self, v: usize, w: usize) -> bool {
        let mut mapped = 0;
        for &(u, label) in &self.graph.adjacency[v] {
            let iu = self.image[u];
            if iu == usize::MAX {
                continue;
            }
            mapped += 1;
            if self.graph.label(w, iu) != Some(label) {
                return false;
            }
        }
        let image_neighbors = self.graph.adjacency[w]
            .iter()
            .filter(|(x, _)| self.used[*x])
            .count();
        image_neighbors == mapped
    }
}
