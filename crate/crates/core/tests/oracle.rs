//! Exhaustive equivalence of the library's invariants against the
//! brute-force oracle on the fully enumerable gluing spaces (n = 1, 2),
//! plus sampled spot checks at larger n.

mod common;

use tetraglue::boundary::{boundary_invariants, build_boundary_surface, summarize};
use tetraglue::complex::{build_edge_orbits, edge_histogram, vertex_orbits};
use tetraglue::model::{enumerate_all, sample_uniform, GluingInstance};
use tetraglue::rng::Seed;

fn check_against_oracle(inst: &GluingInstance) {
    let n = inst.n();
    let oracle = common::oracle_summary(inst);

    let orbits = build_edge_orbits(inst);
    assert_eq!(orbits.count(), oracle.e);
    assert_eq!(common::oracle_total_wedges(inst), 6 * n);

    let h = edge_histogram(&orbits.orbits);
    let lib_hist: Vec<(usize, usize, usize)> = h
        .by_length
        .iter()
        .map(|(&k, &c)| (k, c, h.simple_by_length.get(&k).copied().unwrap_or(0)))
        .collect();
    assert_eq!(lib_hist, oracle.histogram);

    // Orbit lengths as multisets: the oracle classes are unordered.
    let mut lib_lengths: Vec<usize> = orbits.orbits.iter().map(|o| o.length()).collect();
    lib_lengths.sort_unstable();
    let mut oracle_lengths: Vec<usize> = common::oracle_edge_classes(inst)
        .iter()
        .map(|c| c.len())
        .collect();
    oracle_lengths.sort_unstable();
    assert_eq!(lib_lengths, oracle_lengths);

    assert_eq!(vertex_orbits(inst).count, oracle.v);

    let surface = build_boundary_surface(inst, &orbits.orbits);
    assert_eq!(surface.component_count, oracle.boundary_components);
    let comps = boundary_invariants(&surface).unwrap();
    let mut genus: Vec<usize> = comps.iter().map(|c| c.genus).collect();
    genus.sort_unstable();
    assert_eq!(genus, oracle.genus_sorted);
}

#[test]
fn exhaustive_n1() {
    let atoms = enumerate_all(1).unwrap();
    assert_eq!(atoms.len(), 27);
    for inst in &atoms {
        check_against_oracle(inst);
    }
}

#[test]
fn exhaustive_n2() {
    let atoms = enumerate_all(2).unwrap();
    assert_eq!(atoms.len(), 8505);
    for inst in &atoms {
        check_against_oracle(inst);
    }
}

#[test]
fn sampled_larger_n() {
    for seed in 0..20 {
        check_against_oracle(&sample_uniform(17, Seed(seed)).unwrap());
    }
    for seed in 0..3 {
        check_against_oracle(&sample_uniform(120, Seed(seed)).unwrap());
    }
}

#[test]
fn summary_matches_oracle_fields() {
    for seed in 0..10 {
        let inst = sample_uniform(25, Seed(seed)).unwrap();
        let s = summarize(&inst).unwrap();
        let oracle = common::oracle_summary(&inst);
        assert_eq!(s.edge_orbit_count, oracle.e);
        assert_eq!(s.vertex_orbit_count, oracle.v);
        assert_eq!(s.boundary_components, oracle.boundary_components);
        let mut genus = s.genus_list.clone();
        genus.sort_unstable();
        assert_eq!(genus, oracle.genus_sorted);
    }
}

#[test]
fn text_round_trip_over_enumeration() {
    for inst in enumerate_all(1).unwrap() {
        let text = inst.to_text();
        assert_eq!(GluingInstance::from_text(&text).unwrap(), inst);
    }
}
