//! Fixed combinatorics of the labeled tetrahedron.
//!
//! Tetrahedron `t` owns global vertex labels `4t .. 4t+3`. Face `i` is the
//! face opposite local vertex `i`, written as an outward-oriented vertex
//! cycle. The six edges of a tetrahedron are indexed by their unordered
//! local vertex pairs in lexicographic order.

/// Outward-oriented vertex cycles of the four faces, in local vertex labels.
pub const FACE_CYCLES: [[usize; 3]; 4] = [
    [1, 2, 3], // face 0, opposite vertex 0
    [0, 3, 2], // face 1
    [0, 1, 3], // face 2
    [0, 2, 1], // face 3
];

/// The six edge slots as unordered local vertex pairs (01, 02, 03, 12, 13, 23).
pub const EDGE_SLOTS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Edge slot of the unordered pair `{u, v}` of local vertices.
pub fn slot_of(u: usize, v: usize) -> usize {
    debug_assert!(u != v && u < 4 && v < 4);
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => unreachable!(),
    }
}

/// The two faces containing an edge slot, smaller face index first.
///
/// Face `f` contains edge `{u, v}` iff `f` is neither `u` nor `v`.
pub fn faces_of_slot(slot: usize) -> [usize; 2] {
    let (u, v) = EDGE_SLOTS[slot];
    let mut out = [0usize; 2];
    let mut k = 0;
    for f in 0..4 {
        if f != u && f != v {
            out[k] = f;
            k += 1;
        }
    }
    out
}

/// The three edge slots lying in face `f`.
pub fn slots_of_face(f: usize) -> [usize; 3] {
    let c = FACE_CYCLES[f];
    [
        slot_of(c[0], c[1]),
        slot_of(c[1], c[2]),
        slot_of(c[2], c[0]),
    ]
}

/// The three edge slots incident to local vertex `w`.
pub fn slots_at_vertex(w: usize) -> [usize; 3] {
    let mut out = [0usize; 3];
    let mut k = 0;
    for u in 0..4 {
        if u != w {
            out[k] = slot_of(w, u);
            k += 1;
        }
    }
    out
}

/// Does the outward cycle of face `f` traverse the directed edge `u -> v`?
///
/// For each directed edge exactly one of the two faces containing it
/// traverses it forward; that face is "to the right" of the oriented edge.
pub fn face_traverses(f: usize, u: usize, v: usize) -> bool {
    let c = FACE_CYCLES[f];
    (0..3).any(|j| c[j] == u && c[(j + 1) % 3] == v)
}

/// The face to the right of the oriented edge `u -> v`: the unique face
/// whose outward cycle traverses `u -> v`.
pub fn right_face(u: usize, v: usize) -> usize {
    let [f1, f2] = faces_of_slot(slot_of(u, v));
    if face_traverses(f1, u, v) {
        f1
    } else {
        debug_assert!(face_traverses(f2, u, v));
        f2
    }
}
