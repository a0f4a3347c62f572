//! The triangulated boundary surface of the truncated manifold.
//!
//! Truncating every tetrahedron corner leaves one boundary triangle per
//! (tetrahedron, vertex). The hexagonal face gluings induce a perfect
//! matching on the 12n triangle edge-sides; the resulting closed surface
//! has f = 4n, e = 6n and v = 2E cells, so chi = 2E - 2n.

use serde::{Deserialize, Serialize};

use crate::complex::EdgeOrbit;
use crate::error::{Error, Result};
use crate::model::{local_image, GluingInstance};
use crate::tet::{slot_of, slots_at_vertex, FACE_CYCLES};
use crate::unionfind::UnionFind;

/// Corner of a boundary triangle: vertex `w` of tetrahedron `t`, at the
/// tetrahedron edge `slot` (which must contain `w`).
pub fn corner_index(t: usize, w: usize, slot: usize) -> usize {
    let pos = slots_at_vertex(w)
        .iter()
        .position(|&s| s == slot)
        .expect("slot incident to vertex");
    t * 12 + w * 3 + pos
}

/// Edge-side of a boundary triangle: vertex `w` of tetrahedron `t`, lying
/// in hexagonal face `f` (which must contain `w`).
pub fn side_index(t: usize, w: usize, f: usize) -> usize {
    debug_assert!(f != w && f < 4 && w < 4);
    let pos = if f < w { f } else { f - 1 };
    t * 12 + w * 3 + pos
}

/// The triangulated boundary surface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundarySurface {
    pub n: usize,
    /// For each of the 12n sides, the side it is glued to.
    pub side_partner: Vec<usize>,
    /// Dense vertex class of each of the 12n triangle corners.
    pub corner_class: Vec<usize>,
    pub vertex_count: usize,
    /// Component id of each of the 4n triangles.
    pub component_of_triangle: Vec<usize>,
    pub component_count: usize,
}

/// Invariants of one boundary component.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComponentInvariants {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub chi: i64,
    pub genus: usize,
}

pub fn build_boundary_surface(
    instance: &GluingInstance,
    orbits: &[EdgeOrbit],
) -> BoundarySurface {
    let n = instance.n();
    let mut side_partner = vec![usize::MAX; 12 * n];
    let mut corners = UnionFind::new(12 * n);
    let mut triangles = UnionFind::new(4 * n);

    for p in instance.pairs() {
        let (t, f) = (p.first.tet, p.first.face);
        let (t2, g) = (p.second.tet, p.second.face);
        for &w in &FACE_CYCLES[f] {
            let w2 = local_image(p, p.first, w);
            let (a, b) = (side_index(t, w, f), side_index(t2, w2, g));
            side_partner[a] = b;
            side_partner[b] = a;
            triangles.union(t * 4 + w, t2 * 4 + w2);
            // The two triangle corners on this side sit at the two
            // tetrahedron edges through w inside face f.
            for u in FACE_CYCLES[f] {
                if u == w {
                    continue;
                }
                let u2 = local_image(p, p.first, u);
                corners.union(
                    corner_index(t, w, slot_of(w, u)),
                    corner_index(t2, w2, slot_of(w2, u2)),
                );
            }
        }
    }

    let vertex_count = corners.class_count();
    let component_count = triangles.class_count();
    let surface = BoundarySurface {
        n,
        side_partner,
        corner_class: corners.dense_ids(),
        vertex_count,
        component_of_triangle: triangles.dense_ids(),
        component_count,
    };
    debug_assert_eq!(surface.vertex_count, 2 * orbits.len());
    surface
}

/// Per-component cell counts, Euler characteristic and genus.
/// `genus = (2 - chi) / 2`; an odd chi signals a construction bug.
pub fn boundary_invariants(surface: &BoundarySurface) -> Result<Vec<ComponentInvariants>> {
    let n = surface.n;
    let ncomp = surface.component_count;
    let mut faces = vec![0usize; ncomp];
    let mut sides = vec![0usize; ncomp];
    let mut verts = vec![0usize; ncomp];

    for (tri, &c) in surface.component_of_triangle.iter().enumerate() {
        faces[c] += 1;
        let _ = tri;
    }
    for s in 0..12 * n {
        let c = surface.component_of_triangle[s / 3];
        sides[c] += 1;
    }
    // Assign each vertex class to the component of any triangle containing
    // one of its corners.
    let mut vclass_comp = vec![usize::MAX; surface.vertex_count];
    for corner in 0..12 * n {
        let v = surface.corner_class[corner];
        let c = surface.component_of_triangle[corner / 3];
        if vclass_comp[v] == usize::MAX {
            vclass_comp[v] = c;
        } else {
            debug_assert_eq!(vclass_comp[v], c);
        }
    }
    for &c in &vclass_comp {
        verts[c] += 1;
    }

    let mut out = Vec::with_capacity(ncomp);
    for c in 0..ncomp {
        debug_assert_eq!(sides[c] % 2, 0);
        let edges = sides[c] / 2;
        let chi = verts[c] as i64 - edges as i64 + faces[c] as i64;
        if chi % 2 != 0 {
            return Err(Error::OddEulerCharacteristic(chi));
        }
        let genus = ((2 - chi) / 2).max(0) as usize;
        out.push(ComponentInvariants {
            vertices: verts[c],
            edges,
            faces: faces[c],
            chi,
            genus,
        });
    }
    Ok(out)
}

/// The combined invariant panel of one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub n: usize,
    pub vertex_orbit_count: usize,
    pub edge_orbit_count: usize,
    pub edge_histogram: crate::complex::EdgeHistogram,
    pub boundary_components: usize,
    pub genus_list: Vec<usize>,
    pub boundary_chi: i64,
}

pub fn summarize(instance: &GluingInstance) -> Result<ComplexSummary> {
    let orbits = crate::complex::build_edge_orbits(instance);
    let vo = crate::complex::vertex_orbits(instance);
    let surface = build_boundary_surface(instance, &orbits.orbits);
    let comps = boundary_invariants(&surface)?;
    let chi: i64 = comps.iter().map(|c| c.chi).sum();
    Ok(ComplexSummary {
        n: instance.n(),
        vertex_orbit_count: vo.count,
        edge_orbit_count: orbits.count(),
        edge_histogram: crate::complex::edge_histogram(&orbits.orbits),
        boundary_components: surface.component_count,
        genus_list: comps.iter().map(|c| c.genus).collect(),
        boundary_chi: chi,
    })
}
