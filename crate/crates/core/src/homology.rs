//! Integer CW chain complexes for the glued manifold, the pair with its
//! boundary, and the double, plus Betti numbers, torsion and the Heegaard
//! genus bracket.
//!
//! Sign conventions: 3-cells carry the standard tetrahedron orientation;
//! a glued hexagonal 2-cell inherits its orientation from the outward
//! cycle of the lexicographically smaller face of its pair; interior edge
//! 1-cells are oriented by the reference direction of their dihedral
//! traversal; boundary edges by the canonical direction of their smaller
//! side. Any consistent choice works; `dd = 0` is the executable check.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::boundary::{corner_index, side_index, BoundarySurface};
use crate::complex::EdgeOrbits;
use crate::error::{Error, Result};
use crate::model::{local_image, GluingInstance};
use crate::snf::{rank_capped, smith_normal_form_capped, DEFAULT_NONZERO_CAP};
use crate::tet::{slot_of, FACE_CYCLES};

/// Sparse integer matrix by nonzero triples; duplicate positions
/// accumulate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, BigInt)>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: i64) {
        debug_assert!(i < self.rows && j < self.cols);
        if v != 0 {
            self.entries.push((i, j, BigInt::from(v)));
        }
    }

    /// Accumulated entries as a map, zeros dropped.
    pub fn accumulated(&self) -> HashMap<(usize, usize), BigInt> {
        let mut m: HashMap<(usize, usize), BigInt> = HashMap::new();
        for &(i, j, ref v) in &self.entries {
            *m.entry((i, j)).or_insert_with(BigInt::zero) += v;
        }
        m.retain(|_, v| !v.is_zero());
        m
    }

    /// self * other, exact.
    pub fn multiply(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows);
        let a = self.accumulated();
        // Row-index other for the sparse product.
        let mut by_row: HashMap<usize, Vec<(usize, BigInt)>> = HashMap::new();
        for ((i, j), v) in other.accumulated() {
            by_row.entry(i).or_default().push((j, v));
        }
        let mut acc: HashMap<(usize, usize), BigInt> = HashMap::new();
        for ((i, k), v) in a {
            if let Some(row) = by_row.get(&k) {
                for (j, w) in row {
                    *acc.entry((i, *j)).or_insert_with(BigInt::zero) += &v * w;
                }
            }
        }
        IntegerMatrix {
            rows: self.rows,
            cols: other.cols,
            entries: acc
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|((i, j), v)| (i, j, v))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.accumulated().is_empty()
    }
}

/// Which manifold the complex models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexKind {
    Relative,
    Absolute,
    Double,
}

/// A length-3 chain complex of free Z-modules with verified `dd = 0`.
#[derive(Debug, Clone)]
pub struct ChainComplexOverZ {
    pub kind: ComplexKind,
    /// Cell counts c0..c3.
    pub cells: [usize; 4],
    pub d1: IntegerMatrix,
    pub d2: IntegerMatrix,
    pub d3: IntegerMatrix,
}

impl ChainComplexOverZ {
    fn verify(self) -> Result<Self> {
        if !self.d1.multiply(&self.d2).is_zero() || !self.d2.multiply(&self.d3).is_zero() {
            return Err(Error::OrientationInconsistency);
        }
        Ok(self)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells[0] as i64 - self.cells[1] as i64 + self.cells[2] as i64
            - self.cells[3] as i64
    }
}

/// Shared cell bookkeeping for the truncated CW structures.
struct CellBasis {
    /// Reference direction (global vertex pair) of each wedge's orbit.
    dir_of_wedge: Vec<(usize, usize)>,
    orbit_of_wedge: Vec<usize>,
    orbit_count: usize,
    /// Dense class id in [0, 6n) of each of the 12n sides.
    side_class: Vec<usize>,
    /// Class orientation at each side, as (corner_from, corner_to).
    side_dir: Vec<(usize, usize)>,
    /// Oriented endpoints (tail corner class, head corner class) per orbit.
    orbit_ends: Vec<(usize, usize)>,
}

impl CellBasis {
    fn build(
        instance: &GluingInstance,
        orbits: &EdgeOrbits,
        surface: &BoundarySurface,
    ) -> CellBasis {
        let n = instance.n();
        let mut dir_of_wedge = vec![(usize::MAX, usize::MAX); 6 * n];
        for o in &orbits.orbits {
            for (w, &d) in o.wedges.iter().zip(&o.directions) {
                dir_of_wedge[w.index()] = d;
            }
        }

        let mut side_class = vec![usize::MAX; 12 * n];
        let mut side_dir = vec![(usize::MAX, usize::MAX); 12 * n];
        let mut next_class = 0usize;
        // Classes numbered in order of their smaller side index.
        for s in 0..12 * n {
            if side_class[s] != usize::MAX {
                continue;
            }
            let partner = surface.side_partner[s];
            side_class[s] = next_class;
            side_class[partner] = next_class;
            next_class += 1;
        }
        for p in instance.pairs() {
            let (t, f) = (p.first.tet, p.first.face);
            let (t2, g) = (p.second.tet, p.second.face);
            for &w in &FACE_CYCLES[f] {
                let w2 = local_image(p, p.first, w);
                let sa = side_index(t, w, f);
                let sb = side_index(t2, w2, g);
                // The two in-face edges through w and their images.
                let others: Vec<usize> =
                    FACE_CYCLES[f].iter().copied().filter(|&u| u != w).collect();
                let (u, v) = (others[0], others[1]);
                let (u2, v2) = (local_image(p, p.first, u), local_image(p, p.first, v));
                let (ca_u, ca_v) = (
                    corner_index(t, w, slot_of(w, u)),
                    corner_index(t, w, slot_of(w, v)),
                );
                let (cb_u, cb_v) = (
                    corner_index(t2, w2, slot_of(w2, u2)),
                    corner_index(t2, w2, slot_of(w2, v2)),
                );
                // Orientation anchored at the representative (smaller) side:
                // from the corner at the smaller edge slot to the larger.
                let (rep_from, rep_to, img_from, img_to) = if sa <= sb {
                    if slot_of(w, u) < slot_of(w, v) {
                        (ca_u, ca_v, cb_u, cb_v)
                    } else {
                        (ca_v, ca_u, cb_v, cb_u)
                    }
                } else if slot_of(w2, u2) < slot_of(w2, v2) {
                    (cb_u, cb_v, ca_u, ca_v)
                } else {
                    (cb_v, cb_u, ca_v, ca_u)
                };
                let (rep, img) = if sa <= sb { (sa, sb) } else { (sb, sa) };
                side_dir[rep] = (rep_from, rep_to);
                side_dir[img] = (img_from, img_to);
            }
        }

        let orbit_ends = orbits
            .orbits
            .iter()
            .map(|o| {
                let w0 = o.wedges[0];
                let (x, y) = o.directions[0];
                let tail = surface.corner_class[corner_index(w0.tet, x % 4, w0.edge_slot)];
                let head = surface.corner_class[corner_index(w0.tet, y % 4, w0.edge_slot)];
                (tail, head)
            })
            .collect();

        CellBasis {
            dir_of_wedge,
            orbit_of_wedge: orbits.orbit_of_wedge.clone(),
            orbit_count: orbits.count(),
            side_class,
            side_dir,
            orbit_ends,
        }
    }

    /// Signed orbit coefficient of the directed tetrahedron edge `x -> y`
    /// (global labels) in tetrahedron `t`.
    fn orbit_term(&self, t: usize, x: usize, y: usize) -> (usize, i64) {
        let slot = slot_of(x % 4, y % 4);
        let widx = t * 6 + slot;
        let orbit = self.orbit_of_wedge[widx];
        let d = self.dir_of_wedge[widx];
        let sign = if d == (x, y) {
            1
        } else {
            debug_assert_eq!(d, (y, x));
            -1
        };
        (orbit, sign)
    }

    /// Signed side-class coefficient for traversing the side `s` from
    /// corner `from` to corner `to`.
    fn side_term(&self, s: usize, from: usize, to: usize) -> (usize, i64) {
        let d = self.side_dir[s];
        let sign = if d == (from, to) {
            1
        } else {
            debug_assert_eq!(d, (to, from));
            -1
        };
        (self.side_class[s], sign)
    }
}

/// Relative complex (M, dM): c3 = n tetrahedra, c2 = 2n glued hexagons,
/// c1 = E interior edges, c0 = 0.
pub fn build_relative_complex(
    instance: &GluingInstance,
    orbits: &EdgeOrbits,
) -> Result<ChainComplexOverZ> {
    let n = instance.n();
    let surface = crate::boundary::build_boundary_surface(instance, &orbits.orbits);
    let basis = CellBasis::build(instance, orbits, &surface);
    let e = basis.orbit_count;

    let d1 = IntegerMatrix::new(0, e);
    let mut d2 = IntegerMatrix::new(e, 2 * n);
    let mut d3 = IntegerMatrix::new(2 * n, n);
    for (p_idx, p) in instance.pairs().iter().enumerate() {
        hexagon_interior_boundary(&basis, p.first.tet, p.first.cycle(), p_idx, &mut d2);
        d3.push(p_idx, p.first.tet, 1);
        d3.push(p_idx, p.second.tet, -1);
    }
    ChainComplexOverZ {
        kind: ComplexKind::Relative,
        cells: [0, e, 2 * n, n],
        d1,
        d2,
        d3,
    }
    .verify()
}

fn hexagon_interior_boundary(
    basis: &CellBasis,
    t: usize,
    cycle: [usize; 3],
    col: usize,
    d2: &mut IntegerMatrix,
) {
    for i in 0..3 {
        let (x, y) = (cycle[i], cycle[(i + 1) % 3]);
        let (orbit, sign) = basis.orbit_term(t, x, y);
        d2.push(orbit, col, sign);
    }
}

/// Full hexagon boundary in the truncated CW structure: interior edge
/// segments alternating with boundary-triangle edges.
fn hexagon_full_boundary(
    basis: &CellBasis,
    t: usize,
    face: usize,
    cycle: [usize; 3],
    col: usize,
    orbit_offset: usize,
    side_offset: usize,
    d2: &mut IntegerMatrix,
) {
    for i in 0..3 {
        let (x, y, z) = (cycle[i], cycle[(i + 1) % 3], cycle[(i + 2) % 3]);
        let (orbit, sign) = basis.orbit_term(t, x, y);
        d2.push(orbit_offset + orbit, col, sign);
        // Corner cut at vertex y: from the corner at edge {y, x} to the
        // corner at edge {y, z}.
        let w = y % 4;
        let s = side_index(t, w, face);
        let from = corner_index(t, w, slot_of(w, x % 4));
        let to = corner_index(t, w, slot_of(w, z % 4));
        let (class, sign) = basis.side_term(s, from, to);
        d2.push(side_offset + class, col, sign);
    }
}

/// Boundary of the triangle at vertex `w` of tetrahedron `t`, in its
/// outward orientation (the reverse of the opposite face's cycle).
fn triangle_boundary(
    basis: &CellBasis,
    t: usize,
    w: usize,
    col: usize,
    side_offset: usize,
    d2: &mut IntegerMatrix,
) {
    let c = FACE_CYCLES[w];
    let order = [c[0], c[2], c[1]];
    for i in 0..3 {
        let (a, b) = (order[i], order[(i + 1) % 3]);
        // The side between the corners at edges {w,a} and {w,b} lies in
        // the face through w, a, b: the face opposite the remaining vertex.
        let rem = order[(i + 2) % 3];
        let s = side_index(t, w, rem);
        let from = corner_index(t, w, slot_of(w, a));
        let to = corner_index(t, w, slot_of(w, b));
        let (class, sign) = basis.side_term(s, from, to);
        d2.push(side_offset + class, col, sign);
    }
}

/// Absolute complex on the truncated manifold M: c0 = 2E, c1 = E + 6n,
/// c2 = 2n + 4n, c3 = n; chi = E - n.
pub fn build_absolute_complex(
    instance: &GluingInstance,
    orbits: &EdgeOrbits,
    surface: &BoundarySurface,
) -> Result<ChainComplexOverZ> {
    let n = instance.n();
    let basis = CellBasis::build(instance, orbits, surface);
    let e = basis.orbit_count;
    let c0 = surface.vertex_count;
    let c1 = e + 6 * n;
    let c2 = 2 * n + 4 * n;

    let mut d1 = IntegerMatrix::new(c0, c1);
    for (o, &(tail, head)) in basis.orbit_ends.iter().enumerate() {
        d1.push(head, o, 1);
        d1.push(tail, o, -1);
    }
    for s in 0..12 * n {
        if surface.side_partner[s] < s {
            continue; // one pass per class, from its representative side
        }
        let class = basis.side_class[s];
        let (from, to) = basis.side_dir[s];
        let sp = surface.side_partner[s];
        let rep = s.min(sp);
        let (from, to) = if rep == s {
            (from, to)
        } else {
            basis.side_dir[rep]
        };
        d1.push(surface.corner_class[to], e + class, 1);
        d1.push(surface.corner_class[from], e + class, -1);
    }

    let mut d2 = IntegerMatrix::new(c1, c2);
    for (p_idx, p) in instance.pairs().iter().enumerate() {
        hexagon_full_boundary(
            &basis,
            p.first.tet,
            p.first.face,
            p.first.cycle(),
            p_idx,
            0,
            e,
            &mut d2,
        );
    }
    for t in 0..n {
        for w in 0..4 {
            triangle_boundary(&basis, t, w, 2 * n + 4 * t + w, e, &mut d2);
        }
    }

    let mut d3 = IntegerMatrix::new(c2, n);
    for (p_idx, p) in instance.pairs().iter().enumerate() {
        d3.push(p_idx, p.first.tet, 1);
        d3.push(p_idx, p.second.tet, -1);
    }
    for t in 0..n {
        for w in 0..4 {
            d3.push(2 * n + 4 * t + w, t, 1);
        }
    }

    ChainComplexOverZ {
        kind: ComplexKind::Absolute,
        cells: [c0, c1, c2, n],
        d1,
        d2,
        d3,
    }
    .verify()
}

/// The double DM: two copies of the absolute complex glued along all
/// boundary cells (which are shared). chi = 0.
pub fn build_double_complex(
    instance: &GluingInstance,
    orbits: &EdgeOrbits,
    surface: &BoundarySurface,
) -> Result<ChainComplexOverZ> {
    let n = instance.n();
    let basis = CellBasis::build(instance, orbits, surface);
    let e = basis.orbit_count;
    let c0 = surface.vertex_count;
    let c1 = 2 * e + 6 * n;
    let c2 = 4 * n + 4 * n;
    let c3 = 2 * n;
    // 1-cells: interior copy 1 [0, e), copy 2 [e, 2e), sides [2e, 2e + 6n).
    // 2-cells: hexes copy 1 [0, 2n), copy 2 [2n, 4n), triangles [4n, 8n).

    let mut d1 = IntegerMatrix::new(c0, c1);
    for copy in 0..2 {
        for (o, &(tail, head)) in basis.orbit_ends.iter().enumerate() {
            d1.push(head, copy * e + o, 1);
            d1.push(tail, copy * e + o, -1);
        }
    }
    for s in 0..12 * n {
        if surface.side_partner[s] < s {
            continue;
        }
        let class = basis.side_class[s];
        let rep = s.min(surface.side_partner[s]);
        let (from, to) = basis.side_dir[rep];
        d1.push(surface.corner_class[to], 2 * e + class, 1);
        d1.push(surface.corner_class[from], 2 * e + class, -1);
    }

    let mut d2 = IntegerMatrix::new(c1, c2);
    for copy in 0..2 {
        for (p_idx, p) in instance.pairs().iter().enumerate() {
            hexagon_full_boundary(
                &basis,
                p.first.tet,
                p.first.face,
                p.first.cycle(),
                copy * 2 * n + p_idx,
                copy * e,
                2 * e,
                &mut d2,
            );
        }
    }
    for t in 0..n {
        for w in 0..4 {
            triangle_boundary(&basis, t, w, 4 * n + 4 * t + w, 2 * e, &mut d2);
        }
    }

    // Copy-2 3-cells carry the reversed orientation, so the shared
    // triangles cancel between the two sides.
    let mut d3 = IntegerMatrix::new(c2, c3);
    for (p_idx, p) in instance.pairs().iter().enumerate() {
        d3.push(p_idx, p.first.tet, 1);
        d3.push(p_idx, p.second.tet, -1);
        d3.push(2 * n + p_idx, n + p.first.tet, -1);
        d3.push(2 * n + p_idx, n + p.second.tet, 1);
    }
    for t in 0..n {
        for w in 0..4 {
            d3.push(4 * n + 4 * t + w, t, 1);
            d3.push(4 * n + 4 * t + w, n + t, -1);
        }
    }

    ChainComplexOverZ {
        kind: ComplexKind::Double,
        cells: [c0, c1, c2, c3],
        d1,
        d2,
        d3,
    }
    .verify()
}

/// Betti numbers and H1 torsion of a verified complex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomologySummary {
    pub kind: ComplexKind,
    pub betti: [usize; 4],
    /// Invariant factors of the torsion of H1, in divisibility order.
    pub torsion_factors: Vec<String>,
}

pub fn homology_summary(complex: &ChainComplexOverZ) -> Result<HomologySummary> {
    homology_summary_capped(complex, DEFAULT_NONZERO_CAP)
}

pub fn homology_summary_capped(
    complex: &ChainComplexOverZ,
    cap: usize,
) -> Result<HomologySummary> {
    let r1 = rank_capped(&complex.d1, cap)?;
    let snf2 = smith_normal_form_capped(&complex.d2, cap)?;
    let r2 = snf2.rank;
    let r3 = rank_capped(&complex.d3, cap)?;
    let c = complex.cells;
    let betti = [
        c[0] - r1,
        c[1] - r1 - r2,
        c[2] - r2 - r3,
        c[3] - r3,
    ];
    // H1 = ker d1 / im d2; its torsion equals the torsion of C1 / im d2,
    // read off the SNF of d2.
    Ok(HomologySummary {
        kind: complex.kind,
        betti,
        torsion_factors: snf2
            .invariant_factors
            .iter()
            .map(|f| f.to_string())
            .collect(),
    })
}

/// Heegaard-genus bracket for the double: lower = b1(DM),
/// upper = n + 1 + E.
pub fn heegaard_bounds(e: usize, n: usize, b1_double: usize) -> (usize, usize) {
    (b1_double, n + 1 + e)
}
