//! Interior edge orbits of the glued complex and their statistics.
//!
//! Every tetrahedron contributes six edge wedges. The face gluings chain
//! wedges into dihedral cycles around interior edges; the length of an
//! edge counts its wedges (incidence with multiplicity), so lengths sum to
//! 6n. An edge is simple when it meets each tetrahedron at most once.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{FaceId, GluingInstance};
use crate::tet::{faces_of_slot, slot_of, EDGE_SLOTS};
use crate::unionfind::UnionFind;

/// One corner of an interior edge: edge slot `edge_slot` of tetrahedron `tet`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Wedge {
    pub tet: usize,
    pub edge_slot: usize,
}

impl Wedge {
    pub fn index(&self) -> usize {
        self.tet * 6 + self.edge_slot
    }
}

/// An interior edge: the cyclic sequence of wedges around it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeOrbit {
    pub id: usize,
    /// Dihedral cyclic order around the edge.
    pub wedges: Vec<Wedge>,
    /// Per wedge, the directed global vertex pair giving the orbit's
    /// reference orientation at that wedge.
    pub directions: Vec<(usize, usize)>,
    pub simple: bool,
}

impl EdgeOrbit {
    pub fn length(&self) -> usize {
        self.wedges.len()
    }

    /// Distinct tetrahedra incident to this edge.
    pub fn tets(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.wedges.iter().map(|w| w.tet).collect();
        t.sort_unstable();
        t.dedup();
        t
    }
}

/// Orbits plus the wedge -> orbit lookup used downstream.
#[derive(Debug, Clone)]
pub struct EdgeOrbits {
    pub orbits: Vec<EdgeOrbit>,
    /// For each wedge index (6 per tetrahedron): orbit id.
    pub orbit_of_wedge: Vec<usize>,
}

impl EdgeOrbits {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }
}

/// Traverse all dihedral cycles. Starts from the least unvisited wedge,
/// alternating the within-tetrahedron flip with the face-gluing step.
/// The traversal also transports a direction along the edge; the gluings
/// are orientation reversing on faces, so the monodromy around a closed
/// edge never reverses it (asserted).
pub fn build_edge_orbits(instance: &GluingInstance) -> EdgeOrbits {
    let n = instance.n();
    let pair_of_face = instance.pair_of_face();
    let pairs = instance.pairs();
    let mut orbit_of_wedge = vec![usize::MAX; 6 * n];
    let mut orbits = Vec::new();

    for start in 0..6 * n {
        if orbit_of_wedge[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let start_tet = start / 6;
        let start_slot = start % 6;
        let (u0, v0) = EDGE_SLOTS[start_slot];
        // Reference direction: low-to-high at the starting wedge. Entry
        // face: the smaller of the two faces containing the slot.
        let start_entry = faces_of_slot(start_slot)[0];
        let mut tet = start_tet;
        let mut slot = start_slot;
        let mut entry = start_entry;
        let mut dir = (4 * start_tet + u0, 4 * start_tet + v0);
        let mut wedges = Vec::new();
        let mut directions = Vec::new();
        loop {
            let w = Wedge {
                tet,
                edge_slot: slot,
            };
            debug_assert_eq!(orbit_of_wedge[w.index()], usize::MAX);
            orbit_of_wedge[w.index()] = id;
            wedges.push(w);
            directions.push(dir);

            let [f1, f2] = faces_of_slot(slot);
            let exit = if entry == f1 { f2 } else { f1 };
            let face = FaceId::new(tet, exit);
            let p = &pairs[pair_of_face[face.index()]];
            let partner = if p.first == face { p.second } else { p.first };
            let corr = crate::model::pair_correspondence(p, face);
            let map = |x: usize| {
                corr.iter()
                    .find(|&&(a, _)| a == x)
                    .map(|&(_, b)| b)
                    .expect("edge endpoint lies on the glued face")
            };
            dir = (map(dir.0), map(dir.1));
            tet = partner.tet;
            slot = slot_of(dir.0 % 4, dir.1 % 4);
            entry = partner.face;
            if tet == start_tet && slot == start_slot && entry == start_entry {
                // Orientability: the transported direction must close up.
                assert_eq!(
                    dir,
                    (4 * start_tet + u0, 4 * start_tet + v0),
                    "edge monodromy reversed an orientation"
                );
                break;
            }
        }
        let mut tets: Vec<usize> = wedges.iter().map(|w| w.tet).collect();
        tets.sort_unstable();
        let distinct = {
            let mut t = tets.clone();
            t.dedup();
            t.len()
        };
        let simple = distinct == wedges.len();
        orbits.push(EdgeOrbit {
            id,
            wedges,
            directions,
            simple,
        });
    }
    debug_assert_eq!(
        orbits.iter().map(|o| o.length()).sum::<usize>(),
        6 * n,
        "wedge conservation"
    );
    EdgeOrbits {
        orbits,
        orbit_of_wedge,
    }
}

/// Edge histogram: total count E, counts E_k by length, and the simple-only
/// counts E_k°.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EdgeHistogram {
    pub total: usize,
    pub by_length: BTreeMap<usize, usize>,
    pub simple_by_length: BTreeMap<usize, usize>,
}

pub fn edge_histogram(orbits: &[EdgeOrbit]) -> EdgeHistogram {
    let mut h = EdgeHistogram {
        total: orbits.len(),
        ..Default::default()
    };
    for o in orbits {
        *h.by_length.entry(o.length()).or_insert(0) += 1;
        if o.simple {
            *h.simple_by_length.entry(o.length()).or_insert(0) += 1;
        }
    }
    h
}

/// Number of unordered pairs of distinct edges with lengths <= K and <= L
/// respectively that are incident to a common tetrahedron.
pub fn pair_statistic(orbits: &[EdgeOrbit], max_k: usize, max_l: usize) -> usize {
    assert!(max_k >= 1 && max_l >= 1);
    let hi = max_k.max(max_l);
    let short: Vec<&EdgeOrbit> = orbits.iter().filter(|o| o.length() <= hi).collect();
    let tet_sets: Vec<Vec<usize>> = short.iter().map(|o| o.tets()).collect();
    let mut count = 0;
    for i in 0..short.len() {
        for j in (i + 1)..short.len() {
            let (a, b) = (short[i].length(), short[j].length());
            let fits = (a <= max_k && b <= max_l) || (a <= max_l && b <= max_k);
            if fits && shares(&tet_sets[i], &tet_sets[j]) {
                count += 1;
            }
        }
    }
    count
}

fn shares(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Partition of the 4n vertex labels under the closure of all face-map
/// identifications. The class count V is also the number of boundary
/// components of the truncated manifold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexOrbits {
    pub class_of: Vec<usize>,
    pub count: usize,
}

pub fn vertex_orbits(instance: &GluingInstance) -> VertexOrbits {
    let mut uf = UnionFind::new(4 * instance.n());
    for p in instance.pairs() {
        for (a, b) in crate::model::pair_correspondence(p, p.first) {
            uf.union(a, b);
        }
    }
    let count = uf.class_count();
    VertexOrbits {
        class_of: uf.dense_ids(),
        count,
    }
}

/// The genericity predicates conditioned on by the hyperbolization
/// argument, evaluated at a length cutoff (default ceil(n^(1/4))).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub dual_simple: bool,
    pub all_short_edges_simple: bool,
    pub no_adjacent_short_edges: bool,
}

impl GenericityReport {
    pub fn all_hold(&self) -> bool {
        self.dual_simple && self.all_short_edges_simple && self.no_adjacent_short_edges
    }
}

/// Default cutoff ceil(n^(1/4)).
pub fn default_cutoff(n: usize) -> usize {
    ((n as f64).powf(0.25).ceil() as usize).max(1)
}

pub fn genericity_check(
    instance: &GluingInstance,
    orbits: &[EdgeOrbit],
    cutoff: usize,
) -> GenericityReport {
    assert!(cutoff >= 1);
    let dual_simple = crate::dual_graph::build_dual(instance).is_simple();
    let all_short_edges_simple = orbits
        .iter()
        .filter(|o| o.length() <= cutoff)
        .all(|o| o.simple);
    let no_adjacent_short_edges = pair_statistic(orbits, cutoff, cutoff) == 0;
    GenericityReport {
        dual_simple,
        all_short_edges_simple,
        no_adjacent_short_edges,
    }
}

/// The sorted, normalized edge-length partition of [0, 1], kept in integer
/// form (parts over the exact total 6n) with float accessors for
/// exploratory comparison against Poisson-Dirichlet samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CuspSpectrum {
    /// Edge lengths, non-increasing. Sums to exactly 6n.
    pub parts: Vec<usize>,
    pub total: usize,
}

impl CuspSpectrum {
    pub fn normalized(&self) -> Vec<f64> {
        self.parts
            .iter()
            .map(|&p| p as f64 / self.total as f64)
            .collect()
    }

    pub fn largest(&self) -> f64 {
        self.parts.first().map_or(0.0, |&p| p as f64 / self.total as f64)
    }

    pub fn second_largest(&self) -> f64 {
        self.parts.get(1).map_or(0.0, |&p| p as f64 / self.total as f64)
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }
}

pub fn cusp_spectrum(orbits: &[EdgeOrbit]) -> CuspSpectrum {
    assert!(!orbits.is_empty());
    let mut parts: Vec<usize> = orbits.iter().map(|o| o.length()).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    let total = parts.iter().sum();
    CuspSpectrum { parts, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_all, sample_uniform};
    use crate::rng::Seed;

    #[test]
    fn lengths_sum_to_6n() {
        for seed in 0..10 {
            let inst = sample_uniform(40, Seed(seed)).unwrap();
            let orbits = build_edge_orbits(&inst);
            let total: usize = orbits.orbits.iter().map(|o| o.length()).sum();
            assert_eq!(total, 240);
        }
    }

    #[test]
    fn simple_iff_distinct_tets() {
        let inst = sample_uniform(30, Seed(2)).unwrap();
        for o in build_edge_orbits(&inst).orbits {
            let distinct = o.tets().len();
            assert_eq!(o.simple, distinct == o.length());
        }
    }

    #[test]
    fn n1_all_instances_consistent() {
        for inst in enumerate_all(1).unwrap() {
            let orbits = build_edge_orbits(&inst);
            let total: usize = orbits.orbits.iter().map(|o| o.length()).sum();
            assert_eq!(total, 6);
            // Nothing is simple of length > 1 with a single tetrahedron.
            for o in &orbits.orbits {
                if o.length() > 1 {
                    assert!(!o.simple);
                }
            }
            let h = edge_histogram(&orbits.orbits);
            assert_eq!(h.total, orbits.count());
            assert!(h.simple_by_length.keys().all(|&k| k <= 1));
        }
    }

    #[test]
    fn simple_edges_never_longer_than_n() {
        let inst = sample_uniform(12, Seed(9)).unwrap();
        let h = edge_histogram(&build_edge_orbits(&inst).orbits);
        assert!(h.simple_by_length.keys().all(|&k| k <= 12));
    }

    #[test]
    fn vertex_orbit_count_bounds() {
        for seed in 0..5 {
            let inst = sample_uniform(25, Seed(seed)).unwrap();
            let vo = vertex_orbits(&inst);
            assert!(vo.count >= 1 && vo.count <= 100);
            assert_eq!(vo.class_of.len(), 100);
        }
    }

    #[test]
    fn spectrum_is_sorted_partition() {
        let inst = sample_uniform(50, Seed(4)).unwrap();
        let orbits = build_edge_orbits(&inst).orbits;
        let spec = cusp_spectrum(&orbits);
        assert_eq!(spec.total, 300);
        assert_eq!(spec.parts.iter().sum::<usize>(), 300);
        assert!(spec.parts.windows(2).all(|w| w[0] >= w[1]));
        let norm = spec.normalized();
        assert!((norm.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n1_dual_never_simple_and_genericity() {
        for inst in enumerate_all(1).unwrap() {
            let orbits = build_edge_orbits(&inst).orbits;
            let rep = genericity_check(&inst, &orbits, 1);
            assert!(!rep.dual_simple);
        }
    }
}
