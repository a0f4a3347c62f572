//! The probability space of random gluings: `n` labeled tetrahedra, a
//! uniform perfect matching on their `4n` faces, and an independent uniform
//! rotation per matched pair. There are `(4n)!! * 3^(2n)` gluings in total.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Seed};
use crate::tet::FACE_CYCLES;

/// One of the `4n` hexagonal faces: face `face` of tetrahedron `tet`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceId {
    pub tet: usize,
    pub face: usize,
}

impl FaceId {
    pub fn new(tet: usize, face: usize) -> Self {
        debug_assert!(face < 4);
        FaceId { tet, face }
    }

    /// Flat index in [0, 4n).
    pub fn index(&self) -> usize {
        self.tet * 4 + self.face
    }

    pub fn from_index(i: usize) -> Self {
        FaceId {
            tet: i / 4,
            face: i % 4,
        }
    }

    /// Global vertex labels of this face's outward cycle.
    pub fn cycle(&self) -> [usize; 3] {
        let c = FACE_CYCLES[self.face];
        [4 * self.tet + c[0], 4 * self.tet + c[1], 4 * self.tet + c[2]]
    }
}

/// One of the three orientation-reversing gluings of a face pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rotation(pub u8);

impl Rotation {
    pub fn all() -> [Rotation; 3] {
        [Rotation(0), Rotation(1), Rotation(2)]
    }
}

/// A matched pair of faces with its rotation. Stored with the
/// lexicographically smaller face first; the rotation is symmetric under
/// swapping the two faces, so this canonical form is unambiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FacePair {
    pub first: FaceId,
    pub second: FaceId,
    pub rotation: Rotation,
}

impl FacePair {
    pub fn new(a: FaceId, b: FaceId, rotation: Rotation) -> Self {
        let (first, second) = if a <= b { (a, b) } else { (b, a) };
        FacePair {
            first,
            second,
            rotation,
        }
    }
}

/// A complete gluing datum: the element of the probability space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GluingInstance {
    n: usize,
    pairs: Vec<FacePair>,
}

impl GluingInstance {
    /// Build from pairs, canonicalizing order. Validates the perfect
    /// matching invariant.
    pub fn new(n: usize, mut pairs: Vec<FacePair>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidN);
        }
        if pairs.len() != 2 * n {
            return Err(Error::Parse(format!(
                "expected {} pairs, got {}",
                2 * n,
                pairs.len()
            )));
        }
        let mut seen = vec![false; 4 * n];
        for p in &pairs {
            for f in [p.first, p.second] {
                if f.tet >= n || f.face >= 4 {
                    return Err(Error::UnknownFace {
                        tet: f.tet,
                        face: f.face,
                    });
                }
                if seen[f.index()] {
                    return Err(Error::Parse(format!(
                        "face ({}, {}) appears twice",
                        f.tet, f.face
                    )));
                }
                seen[f.index()] = true;
            }
            if p.rotation.0 > 2 {
                return Err(Error::Parse("rotation out of range".into()));
            }
        }
        pairs.sort();
        Ok(GluingInstance { n, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[FacePair] {
        &self.pairs
    }

    /// For each face index, the index of its pair in `pairs`.
    pub fn pair_of_face(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; 4 * self.n];
        for (i, p) in self.pairs.iter().enumerate() {
            out[p.first.index()] = i;
            out[p.second.index()] = i;
        }
        out
    }

    /// The partner face of `f` and the vertex correspondence of the gluing,
    /// as three ordered (from, to) pairs of global vertex labels.
    ///
    /// Rotation `r` glues cycle `(a0 a1 a2)` of the first face to the
    /// reversed cycle of the second shifted by `r`: `a_j -> b_{(r - j) mod 3}`.
    /// The same index relation holds in both directions, so applying
    /// `face_map` to the partner yields the inverse correspondence.
    pub fn face_map(&self, f: FaceId) -> Result<(FaceId, [(usize, usize); 3])> {
        if f.tet >= self.n || f.face >= 4 {
            return Err(Error::UnknownFace {
                tet: f.tet,
                face: f.face,
            });
        }
        let idx = self.pair_of_face()[f.index()];
        let p = &self.pairs[idx];
        let partner = if p.first == f { p.second } else { p.first };
        Ok((partner, pair_correspondence(p, f)))
    }

    /// Text serialization: a line `n`, then 2n lines `tetA faceA tetB faceB r`.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::new();
        writeln!(s, "{}", self.n).unwrap();
        for p in &self.pairs {
            writeln!(
                s,
                "{} {} {} {} {}",
                p.first.tet, p.first.face, p.second.tet, p.second.face, p.rotation.0
            )
            .unwrap();
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))??
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad n: {e}")))?;
        let mut pairs = Vec::with_capacity(2 * n);
        for _ in 0..2 * n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("truncated pair list".into()))??;
            let v: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|e| Error::Parse(format!("bad field: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != 5 {
                return Err(Error::Parse(format!("expected 5 fields: {line:?}")));
            }
            pairs.push(FacePair::new(
                FaceId::new(v[0], v[1]),
                FaceId::new(v[2], v[3]),
                Rotation(v[4] as u8),
            ));
        }
        GluingInstance::new(n, pairs)
    }

    pub fn from_text(s: &str) -> Result<Self> {
        Self::read_text(s.as_bytes())
    }
}

/// Vertex correspondence of a pair as seen from face `from` (which must be
/// one of the pair's two faces).
pub fn pair_correspondence(p: &FacePair, from: FaceId) -> [(usize, usize); 3] {
    let a = p.first.cycle();
    let b = p.second.cycle();
    let r = p.rotation.0 as usize;
    let mut out = [(0usize, 0usize); 3];
    if from == p.first {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (a[j], b[(r + 3 - j) % 3]);
        }
    } else {
        debug_assert_eq!(from, p.second);
        for (i, o) in out.iter_mut().enumerate() {
            *o = (b[i], a[(r + 3 - i) % 3]);
        }
    }
    out
}

/// Local vertex image under a pair's gluing: maps local vertex `w` of the
/// `from` face's tetrahedron (with `w` on that face) to the local vertex of
/// the partner tetrahedron.
pub fn local_image(p: &FacePair, from: FaceId, w_local: usize) -> usize {
    let corr = pair_correspondence(p, from);
    let w_global = from.tet * 4 + w_local;
    for (x, y) in corr {
        if x == w_global {
            return y % 4;
        }
    }
    panic!("vertex {w_local} not on face {from:?}");
}

/// Uniform sample from the gluing space; a pure function of `(n, seed)`.
pub fn sample_uniform(n: usize, seed: Seed) -> Result<GluingInstance> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let mut rng = rng_from_seed(seed);
    sample_uniform_with(n, &mut rng)
}

/// Uniform sample drawing from a caller-provided RNG.
pub fn sample_uniform_with<R: Rng>(n: usize, rng: &mut R) -> Result<GluingInstance> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    // Take the least unmatched face, match it with a uniform choice among
    // the remaining ones. This yields a uniform perfect matching and the
    // canonical smaller-face-first storage for free.
    let mut free: Vec<usize> = (0..4 * n).collect();
    let mut pairs = Vec::with_capacity(2 * n);
    while !free.is_empty() {
        let a = free[0];
        free.swap_remove(0);
        let j = rng.gen_range(0..free.len());
        let b = free[j];
        free.swap_remove(j);
        let r = Rotation(rng.gen_range(0..3u8));
        pairs.push(FacePair::new(
            FaceId::from_index(a),
            FaceId::from_index(b),
            r,
        ));
    }
    GluingInstance::new(n, pairs)
}

/// Rejection sampler: redraw until `accept` holds, failing after
/// `max_retries` rejections. Deterministic in `(n, seed)`.
pub fn sample_conditioned<F>(
    n: usize,
    seed: Seed,
    max_retries: usize,
    accept: F,
) -> Result<GluingInstance>
where
    F: Fn(&GluingInstance) -> bool,
{
    if n == 0 {
        return Err(Error::InvalidN);
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..=max_retries {
        let inst = sample_uniform_with(n, &mut rng)?;
        if accept(&inst) {
            return Ok(inst);
        }
    }
    Err(Error::RetryLimitExceeded(max_retries))
}

/// Default retry budget for the simple-dual rejection sampler. The
/// asymptotic acceptance probability is a positive constant, so this is
/// generous.
pub const DEFAULT_MAX_RETRIES: usize = 1000;

/// Uniform sample conditioned on the dual graph being simple.
///
/// No simple 4-regular graph exists on fewer than 5 vertices, so `n < 5`
/// is rejected outright.
pub fn sample_simple(n: usize, seed: Seed, max_retries: usize) -> Result<GluingInstance> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    if n < 5 {
        return Err(Error::NoSimpleGraph(n));
    }
    sample_conditioned(n, seed, max_retries, |inst| {
        crate::dual_graph::build_dual(inst).is_simple()
    })
}

/// Exhaustive enumeration of the gluing space, for the n <= 2 oracles.
/// Emits each element exactly once; the count is `(4n)!! * 3^(2n)`.
pub fn enumerate_all(n: usize) -> Result<Vec<GluingInstance>> {
    if n == 0 {
        return Err(Error::InvalidN);
    }
    if n > 2 {
        return Err(Error::TooLarge(n));
    }
    let mut out = Vec::new();
    let mut pairs = Vec::with_capacity(2 * n);
    let free: Vec<usize> = (0..4 * n).collect();
    enumerate_rec(n, free, &mut pairs, &mut out);
    Ok(out)
}

fn enumerate_rec(
    n: usize,
    free: Vec<usize>,
    pairs: &mut Vec<FacePair>,
    out: &mut Vec<GluingInstance>,
) {
    if free.is_empty() {
        out.push(GluingInstance::new(n, pairs.clone()).expect("valid by construction"));
        return;
    }
    let a = free[0];
    for j in 1..free.len() {
        let b = free[j];
        let rest: Vec<usize> = free[1..]
            .iter()
            .copied()
            .filter(|&x| x != b)
            .collect();
        for r in Rotation::all() {
            pairs.push(FacePair::new(
                FaceId::from_index(a),
                FaceId::from_index(b),
                r,
            ));
            enumerate_rec(n, rest.clone(), pairs, out);
            pairs.pop();
        }
    }
}
