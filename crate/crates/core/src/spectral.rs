//! Spectral gap of the normalized Laplacian `L = I - A/d` of a d-regular
//! multigraph, by power iteration with deflation against the constant
//! vector. A loop contributes 2 to the diagonal of A.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual_graph::MultiGraph;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Seed};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralReport {
    /// lambda_1 = 1 - mu_2 / d, the smallest nonzero Laplacian eigenvalue.
    pub lambda1: f64,
    pub tolerance: f64,
    pub iterations: usize,
}

/// Compute the spectral gap. Requires a connected graph on >= 2 vertices.
pub fn spectral_gap(g: &MultiGraph, tol: f64) -> Result<SpectralReport> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::GraphTooSmall);
    }
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let d = g.degree() as f64;
    let (offsets, neighbors) = g.adjacency();

    // Power iteration on the PSD matrix M = A + dI, deflated against the
    // constant top eigenvector (eigenvalue 2d). Its top eigenvalue on the
    // orthogonal complement is mu_2 + d.
    let mut rng = rng_from_seed(Seed(0x5BEC7EA1));
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut w = vec![0.0f64; n];
    let mut prev = f64::NAN;
    let mut iterations = 0;
    loop {
        deflate(&mut v);
        normalize(&mut v);
        // w = (A + dI) v
        for i in 0..n {
            let mut acc = d * v[i];
            for &j in &neighbors[offsets[i]..offsets[i + 1]] {
                acc += v[j as usize];
            }
            w[i] = acc;
        }
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        std::mem::swap(&mut v, &mut w);
        iterations += 1;
        if (rayleigh - prev).abs() <= tol * d {
            let mu2 = rayleigh - d;
            return Ok(SpectralReport {
                lambda1: 1.0 - mu2 / d,
                tolerance: tol,
                iterations,
            });
        }
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NoConvergence(iterations));
        }
        prev = rayleigh;
    }
}

fn deflate(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= mean;
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}
