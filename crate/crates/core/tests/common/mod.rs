//! Brute-force reference implementations, deliberately independent of the
//! library's traversal-based code paths: everything here is union-find
//! closures over flat index sets.

use std::collections::{BTreeMap, HashMap};

use tetraglue::model::GluingInstance;
use tetraglue::tet::{slot_of, EDGE_SLOTS, FACE_CYCLES};

/// Plain union-find, separate from the library's.
pub struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
        for x in 0..n {
            let r = self.find(x);
            map.entry(r).or_default().push(x);
        }
        let mut out: Vec<Vec<usize>> = map.into_values().collect();
        out.sort();
        out
    }
}

/// Identify the 6n tetrahedron edges under all face gluings. Each glued
/// face pair identifies its three edge slots with their images; the
/// resulting classes are the edge orbits (class size = orbit length, since
/// every wedge sits in exactly one class member).
pub fn oracle_edge_classes(inst: &GluingInstance) -> Vec<Vec<usize>> {
    let n = inst.n();
    let mut dsu = Dsu::new(6 * n);
    for p in inst.pairs() {
        let (_, corr) = inst.face_map(p.first).unwrap();
        let image = |x: usize| corr.iter().find(|&&(a, _)| a == x).unwrap().1;
        let c = p.first.cycle();
        for i in 0..3 {
            let (u, v) = (c[i], c[(i + 1) % 3]);
            let (u2, v2) = (image(u), image(v));
            let cell_a = p.first.tet * 6 + slot_of(u % 4, v % 4);
            let cell_b = p.second.tet * 6 + slot_of(u2 % 4, v2 % 4);
            dsu.union(cell_a, cell_b);
        }
    }
    dsu.classes()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleSummary {
    pub e: usize,
    pub v: usize,
    /// (k, count, simple count), ascending k.
    pub histogram: Vec<(usize, usize, usize)>,
    pub boundary_components: usize,
    /// Sorted per-component genus.
    pub genus_sorted: Vec<usize>,
}

pub fn oracle_summary(inst: &GluingInstance) -> OracleSummary {
    let n = inst.n();
    let classes = oracle_edge_classes(inst);
    let e = classes.len();

    let mut histogram: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for class in &classes {
        let k = class.len();
        let mut tets: Vec<usize> = class.iter().map(|c| c / 6).collect();
        tets.sort_unstable();
        tets.dedup();
        let simple = tets.len() == k;
        let entry = histogram.entry(k).or_insert((0, 0));
        entry.0 += 1;
        if simple {
            entry.1 += 1;
        }
    }

    // Vertex orbits from the raw correspondences.
    let mut vdsu = Dsu::new(4 * n);
    for p in inst.pairs() {
        let (_, corr) = inst.face_map(p.first).unwrap();
        for (a, b) in corr {
            vdsu.union(a, b);
        }
    }
    let v = vdsu.classes().len();

    // Boundary surface, rebuilt from scratch: triangles indexed by
    // (tet, vertex); sides by (triangle, other vertex); corners by
    // (triangle, edge slot through the vertex).
    let tri = |t: usize, w: usize| t * 4 + w;
    let side = |t: usize, w: usize, u: usize| (t * 4 + w) * 4 + u; // u != w
    let corner = |t: usize, w: usize, u: usize| (t * 4 + w) * 4 + u;
    let mut tri_dsu = Dsu::new(4 * n);
    let mut corner_dsu = Dsu::new(16 * n);
    for p in inst.pairs() {
        let (_, corr) = inst.face_map(p.first).unwrap();
        let image = |x: usize| corr.iter().find(|&&(a, _)| a == x).unwrap().1;
        let (ta, tb) = (p.first.tet, p.second.tet);
        for w in FACE_CYCLES[p.first.face] {
            let wg = ta * 4 + w;
            let w2 = image(wg) % 4;
            tri_dsu.union(tri(ta, w), tri(tb, w2));
            // Corners flanking the matched triangle sides.
            for u in FACE_CYCLES[p.first.face] {
                if u == w {
                    continue;
                }
                let u2 = image(ta * 4 + u) % 4;
                corner_dsu.union(corner(ta, w, u), corner(tb, w2, u2));
            }
        }
    }
    // Sides: within triangle (t, w), each side lies in one of the three
    // hexagonal faces f != w; glued faces identify their sides.
    let mut side_dsu = Dsu::new(16 * n);
    for p in inst.pairs() {
        let (_, corr) = inst.face_map(p.first).unwrap();
        let image = |x: usize| corr.iter().find(|&&(a, _)| a == x).unwrap().1;
        let (ta, tb) = (p.first.tet, p.second.tet);
        let (fa, fb) = (p.first.face, p.second.face);
        for w in FACE_CYCLES[fa] {
            let w2 = image(ta * 4 + w) % 4;
            side_dsu.union(side(ta, w, fa), side(tb, w2, fb));
        }
    }

    // Per boundary component: faces, edges, vertices -> chi -> genus.
    let tri_classes = tri_dsu.classes();
    let boundary_components = tri_classes.len();
    let mut comp_of_tri = vec![usize::MAX; 4 * n];
    for (i, class) in tri_classes.iter().enumerate() {
        for &t in class {
            comp_of_tri[t] = i;
        }
    }
    let mut faces = vec![0usize; boundary_components];
    for t in 0..4 * n {
        faces[comp_of_tri[t]] += 1;
    }
    // Count side classes per component (each class = one surface edge).
    let mut edges = vec![0usize; boundary_components];
    let mut seen_side = std::collections::HashSet::new();
    for t in 0..n {
        for w in 0..4 {
            for f in 0..4 {
                if f == w {
                    continue;
                }
                let r = side_dsu.find(side(t, w, f));
                if seen_side.insert(r) {
                    edges[comp_of_tri[tri(t, w)]] += 1;
                }
            }
        }
    }
    let mut verts = vec![0usize; boundary_components];
    let mut seen_corner = std::collections::HashSet::new();
    for t in 0..n {
        for w in 0..4 {
            for u in 0..4 {
                if u == w {
                    continue;
                }
                let r = corner_dsu.find(corner(t, w, u));
                if seen_corner.insert(r) {
                    verts[comp_of_tri[tri(t, w)]] += 1;
                }
            }
        }
    }
    let mut genus_sorted: Vec<usize> = (0..boundary_components)
        .map(|c| {
            let chi = verts[c] as i64 - edges[c] as i64 + faces[c] as i64;
            assert_eq!(chi % 2, 0, "oracle chi must be even");
            ((2 - chi) / 2) as usize
        })
        .collect();
    genus_sorted.sort_unstable();

    OracleSummary {
        e,
        v,
        histogram: histogram
            .into_iter()
            .map(|(k, (c, s))| (k, c, s))
            .collect(),
        boundary_components,
        genus_sorted,
    }
}

/// Wedge conservation for the oracle itself.
#[allow(dead_code)]
pub fn oracle_total_wedges(inst: &GluingInstance) -> usize {
    oracle_edge_classes(inst).iter().map(|c| c.len()).sum()
}

#[allow(dead_code)]
pub fn slots() -> [(usize, usize); 6] {
    EDGE_SLOTS
}
