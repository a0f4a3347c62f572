//! Experiment orchestration: seeded parallel sweeps over n, per-record
//! conservation checks, aggregation, and comparison against the asymptotic
//! laws. Also the exact n <= 2 distribution tables used as test oracles.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_invariants, build_boundary_surface};
use crate::complex::{
    build_edge_orbits, default_cutoff, edge_histogram, genericity_check, pair_statistic,
    vertex_orbits, GenericityReport,
};
use crate::dual_graph::build_dual;
use crate::error::{Error, Result};
use crate::homology::{
    build_absolute_complex, build_double_complex, build_relative_complex, heegaard_bounds,
    homology_summary_capped,
};
use crate::model::{
    enumerate_all, sample_simple, sample_uniform, GluingInstance, DEFAULT_MAX_RETRIES,
};
use crate::peeling::peel_algorithm1;
use crate::rng::{trial_seed, Seed};
use crate::snf::DEFAULT_NONZERO_CAP;
use crate::spectral::{spectral_gap, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conditioning {
    Uniform,
    Simple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Panel {
    Edges,
    Boundary,
    Dual,
    Homology,
    Peeling,
}

/// Acceptance windows for `compare_theory`, exposed in the config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub slope_range: (f64, f64),
    pub ek_simple_range: (f64, f64),
    pub v1_min_fraction: f64,
    pub genus_ratio_range: (f64, f64),
    pub ekl_max: f64,
    pub diam_log3_factor: f64,
    pub diam_min_fraction: f64,
    pub lambda1_min: f64,
    pub lambda1_min_fraction: f64,
    pub heegaard_min_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slope_range: (0.4, 0.6),
            ek_simple_range: (0.8, 1.2),
            v1_min_fraction: 0.9,
            genus_ratio_range: (0.95, 1.0),
            ekl_max: 0.5,
            diam_log3_factor: 2.0,
            diam_min_fraction: 0.95,
            lambda1_min: 0.05,
            lambda1_min_fraction: 0.95,
            heegaard_min_fraction: 0.9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default = "default_conditioning")]
    pub conditioning: Conditioning,
    pub panels: Vec<Panel>,
    #[serde(default)]
    pub out_records: Option<PathBuf>,
    #[serde(default)]
    pub out_aggregates: Option<PathBuf>,
    #[serde(default = "default_homology_cap")]
    pub homology_cap: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_conditioning() -> Conditioning {
    Conditioning::Uniform
}

fn default_homology_cap() -> usize {
    DEFAULT_NONZERO_CAP
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.n_list.iter().any(|&n| n == 0) {
            return Err(Error::InvalidN);
        }
        if self.trials == 0 || self.panels.is_empty() {
            return Err(Error::Parse(
                "trials must be >= 1 and panels nonempty".into(),
            ));
        }
        Ok(())
    }
}

/// One trial's full invariant panel. Field names are the stable JSON keys.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SampleRecord {
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    /// Excluded from the reproducibility contract.
    pub wall_time_ms: f64,

    #[serde(rename = "V", skip_serializing_if = "Option::is_none")]
    pub v: Option<usize>,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    pub e: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_components: Option<usize>,
    /// Rows [k, E_k, E_k_simple].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_histogram: Option<Vec<[usize; 3]>>,
    #[serde(rename = "E_KL", skip_serializing_if = "Option::is_none")]
    pub e_kl: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genericity: Option<GenericityReport>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_simple: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_connected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_diameter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1_double: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1_rel: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1_abs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1_double: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_factors: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heegaard_lower: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heegaard_upper: Option<usize>,
    pub homology_skipped: bool,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub peel_edges_closed: Option<usize>,

    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<String>,
}

impl SampleRecord {
    fn empty(n: usize, trial: u64, seed: Seed) -> Self {
        SampleRecord {
            n,
            trial,
            seed: seed.0,
            wall_time_ms: 0.0,
            v: None,
            e: None,
            genus_list: None,
            boundary_components: None,
            edge_histogram: None,
            e_kl: None,
            genericity: None,
            dual_simple: None,
            dual_connected: None,
            dual_diameter: None,
            lambda1: None,
            lambda1_double: None,
            b1_rel: None,
            b1_abs: None,
            b1_double: None,
            torsion_factors: None,
            heegaard_lower: None,
            heegaard_upper: None,
            homology_skipped: false,
            peel_edges_closed: None,
            errors: Vec::new(),
        }
    }

    /// Exact conservation identities; a violation aborts the sweep.
    pub fn check_conservation(&self) -> Result<()> {
        let n = self.n;
        if let Some(h) = &self.edge_histogram {
            let wedges: usize = h.iter().map(|row| row[0] * row[1]).sum();
            if wedges != 6 * n {
                return Err(Error::ConservationViolation(format!(
                    "sum k*E_k = {wedges}, expected {}",
                    6 * n
                )));
            }
            if let Some(e) = self.e {
                let total: usize = h.iter().map(|row| row[1]).sum();
                if total != e {
                    return Err(Error::ConservationViolation(format!(
                        "histogram total {total} != E {e}"
                    )));
                }
            }
        }
        if let (Some(v), Some(components)) = (self.v, self.boundary_components) {
            if v != components {
                return Err(Error::ConservationViolation(format!(
                    "boundary components {components} != vertex orbits {v}"
                )));
            }
        }
        if let (Some(e), Some(genus_list)) = (self.e, &self.genus_list) {
            let chi: i64 = genus_list.iter().map(|&g| 2 - 2 * g as i64).sum();
            if chi != 2 * e as i64 - 2 * n as i64 {
                return Err(Error::ConservationViolation(format!(
                    "chi(dN) = {chi}, expected {}",
                    2 * e as i64 - 2 * n as i64
                )));
            }
        }
        if let (Some(lower), Some(upper)) = (self.heegaard_lower, self.heegaard_upper) {
            if lower > upper {
                return Err(Error::ConservationViolation(format!(
                    "Heegaard bracket inverted: {lower} > {upper}"
                )));
            }
        }
        Ok(())
    }
}

/// Salt so the peeling panel's stream is independent of the sampling stream.
const PEEL_SALT: u64 = 0x9e3779b97f4a7c15;

/// Run one trial of the sweep. Panel errors are recorded, not fatal;
/// sampling failures and conservation violations are.
pub fn run_trial(config: &ExperimentConfig, n: usize, trial: u64) -> Result<SampleRecord> {
    let start = Instant::now();
    let seed = trial_seed(Seed(config.master_seed), n, trial);
    let inst = match config.conditioning {
        Conditioning::Uniform => sample_uniform(n, seed)?,
        Conditioning::Simple => sample_simple(n, seed, DEFAULT_MAX_RETRIES)?,
    };
    let mut rec = SampleRecord::empty(n, trial, seed);
    let has = |p: Panel| config.panels.contains(&p);

    let orbits = if has(Panel::Edges) || has(Panel::Boundary) || has(Panel::Homology) {
        Some(build_edge_orbits(&inst))
    } else {
        None
    };

    if let Some(orbits) = &orbits {
        if has(Panel::Edges) {
            let h = edge_histogram(&orbits.orbits);
            rec.e = Some(h.total);
            rec.edge_histogram = Some(
                h.by_length
                    .iter()
                    .map(|(&k, &c)| {
                        [k, c, h.simple_by_length.get(&k).copied().unwrap_or(0)]
                    })
                    .collect(),
            );
            let cutoff = default_cutoff(n);
            rec.e_kl = Some(pair_statistic(&orbits.orbits, cutoff, cutoff));
            rec.genericity = Some(genericity_check(&inst, &orbits.orbits, cutoff));
        }
        if has(Panel::Boundary) {
            let vo = vertex_orbits(&inst);
            rec.v = Some(vo.count);
            let surface = build_boundary_surface(&inst, &orbits.orbits);
            rec.boundary_components = Some(surface.component_count);
            let comps = boundary_invariants(&surface)?;
            rec.genus_list = Some(comps.iter().map(|c| c.genus).collect());
            if rec.e.is_none() {
                rec.e = Some(orbits.count());
            }
        }
        if has(Panel::Homology) {
            let surface = build_boundary_surface(&inst, &orbits.orbits);
            let run = || -> Result<(usize, usize, usize, Vec<String>)> {
                let rel = build_relative_complex(&inst, orbits)?;
                let abs = build_absolute_complex(&inst, orbits, &surface)?;
                let dbl = build_double_complex(&inst, orbits, &surface)?;
                let cap = config.homology_cap;
                let s_rel = homology_summary_capped(&rel, cap)?;
                let s_abs = homology_summary_capped(&abs, cap)?;
                let s_dbl = homology_summary_capped(&dbl, cap)?;
                Ok((
                    s_rel.betti[1],
                    s_abs.betti[1],
                    s_dbl.betti[1],
                    s_abs.torsion_factors,
                ))
            };
            match run() {
                Ok((b1_rel, b1_abs, b1_double, torsion)) => {
                    rec.b1_rel = Some(b1_rel);
                    rec.b1_abs = Some(b1_abs);
                    rec.b1_double = Some(b1_double);
                    rec.torsion_factors = Some(torsion);
                    let (lo, hi) = heegaard_bounds(orbits.count(), n, b1_double);
                    rec.heegaard_lower = Some(lo);
                    rec.heegaard_upper = Some(hi);
                }
                Err(Error::SizeLimitExceeded(_, _)) => rec.homology_skipped = true,
                Err(e) => rec.errors.push(format!("homology: {e}")),
            }
        }
    }

    if has(Panel::Dual) {
        let g = build_dual(&inst);
        rec.dual_simple = Some(g.is_simple());
        rec.dual_connected = Some(g.is_connected());
        rec.dual_diameter = g.diameter();
        if g.is_connected() && n >= 2 {
            match spectral_gap(&g, DEFAULT_TOLERANCE) {
                Ok(r) => rec.lambda1 = Some(r.lambda1),
                Err(e) => rec.errors.push(format!("lambda1: {e}")),
            }
            match spectral_gap(&g.double_graph(), DEFAULT_TOLERANCE) {
                Ok(r) => rec.lambda1_double = Some(r.lambda1),
                Err(e) => rec.errors.push(format!("lambda1_double: {e}")),
            }
        }
    }

    if has(Panel::Peeling) {
        let peel_seed = trial_seed(Seed(config.master_seed ^ PEEL_SALT), n, trial);
        let (_, trace) = peel_algorithm1(n, peel_seed);
        rec.peel_edges_closed = Some(trace.total_edges_closed());
    }

    rec.check_conservation()?;
    rec.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(rec)
}

/// Least-squares fit y = slope * x + intercept.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Option<RegressionFit> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let (sx, sy): (f64, f64) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(RegressionFit {
        slope,
        intercept,
        r2,
    })
}

/// Aggregates for a single n. Real-valued reductions sum in trial order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NAggregate {
    pub n: usize,
    pub trials: usize,
    pub mean_e: f64,
    pub var_e: f64,
    /// 25%, 50%, 75% quantiles of E.
    pub e_quantiles: [f64; 3],
    pub mean_v: Option<f64>,
    pub frac_v1: Option<f64>,
    /// genus/n averaged over single-boundary-component trials.
    pub mean_genus_ratio: Option<f64>,
    pub mean_ekl: Option<f64>,
    pub genericity_rate: Option<f64>,
    /// Mean E_k_simple for k = 1..=10.
    pub mean_ek_simple: Vec<f64>,
    pub mean_lambda1: Option<f64>,
    pub frac_lambda1_ok: Option<f64>,
    pub mean_diameter: Option<f64>,
    pub frac_diam_ok: Option<f64>,
    pub median_b1_rel: Option<f64>,
    pub frac_heegaard_lower_ok: Option<f64>,
    pub homology_trials: usize,
    pub mean_wall_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateStats {
    pub per_n: Vec<NAggregate>,
    /// Fit of mean E against ln n across per_n.
    pub e_slope: Option<RegressionFit>,
    pub tolerances: Tolerances,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

fn mean_of(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

fn fraction(hits: usize, total: usize) -> Option<f64> {
    if total == 0 {
        None
    } else {
        Some(hits as f64 / total as f64)
    }
}

pub fn aggregate(records: &[SampleRecord], tolerances: &Tolerances) -> AggregateStats {
    let mut by_n: BTreeMap<usize, Vec<&SampleRecord>> = BTreeMap::new();
    for r in records {
        by_n.entry(r.n).or_default().push(r);
    }
    let mut per_n = Vec::new();
    for (n, mut rs) in by_n {
        rs.sort_by_key(|r| r.trial);
        let trials = rs.len();
        let es: Vec<f64> = rs.iter().filter_map(|r| r.e).map(|e| e as f64).collect();
        let mean_e = mean_of(&es).unwrap_or(f64::NAN);
        let var_e = if es.len() > 1 {
            es.iter().map(|e| (e - mean_e) * (e - mean_e)).sum::<f64>() / (es.len() - 1) as f64
        } else {
            0.0
        };
        let mut sorted_e = es.clone();
        sorted_e.sort_by(f64::total_cmp);
        let e_quantiles = if sorted_e.is_empty() {
            [f64::NAN; 3]
        } else {
            [
                quantile(&sorted_e, 0.25),
                quantile(&sorted_e, 0.5),
                quantile(&sorted_e, 0.75),
            ]
        };

        let vs: Vec<f64> = rs.iter().filter_map(|r| r.v).map(|v| v as f64).collect();
        let frac_v1 = fraction(
            rs.iter().filter(|r| r.v == Some(1)).count(),
            rs.iter().filter(|r| r.v.is_some()).count(),
        );

        let genus_ratios: Vec<f64> = rs
            .iter()
            .filter_map(|r| match (&r.genus_list, r.v) {
                (Some(gl), Some(1)) if gl.len() == 1 => Some(gl[0] as f64 / n as f64),
                _ => None,
            })
            .collect();

        let ekls: Vec<f64> = rs.iter().filter_map(|r| r.e_kl).map(|x| x as f64).collect();
        let generic: Vec<&GenericityReport> =
            rs.iter().filter_map(|r| r.genericity.as_ref()).collect();
        let genericity_rate = fraction(
            generic.iter().filter(|g| g.all_hold()).count(),
            generic.len(),
        );

        let mut mean_ek_simple = vec![0.0; 10];
        let hist_trials = rs.iter().filter(|r| r.edge_histogram.is_some()).count();
        if hist_trials > 0 {
            for r in &rs {
                if let Some(h) = &r.edge_histogram {
                    for row in h {
                        if (1..=10).contains(&row[0]) {
                            mean_ek_simple[row[0] - 1] += row[2] as f64;
                        }
                    }
                }
            }
            for x in &mut mean_ek_simple {
                *x /= hist_trials as f64;
            }
        }

        let lambdas: Vec<f64> = rs.iter().filter_map(|r| r.lambda1).collect();
        let frac_lambda1_ok = fraction(
            lambdas.iter().filter(|&&l| l >= tolerances.lambda1_min).count(),
            lambdas.len(),
        );
        let diams: Vec<f64> = rs
            .iter()
            .filter_map(|r| r.dual_diameter)
            .map(|d| d as f64)
            .collect();
        let diam_bound = tolerances.diam_log3_factor * (n as f64).ln() / 3f64.ln();
        let frac_diam_ok = fraction(
            diams.iter().filter(|&&d| d <= diam_bound).count(),
            diams.len(),
        );

        let mut b1s: Vec<f64> = rs
            .iter()
            .filter_map(|r| r.b1_rel)
            .map(|b| b as f64)
            .collect();
        b1s.sort_by(f64::total_cmp);
        let median_b1_rel = if b1s.is_empty() {
            None
        } else {
            Some(quantile(&b1s, 0.5))
        };
        let heegaard_bound = n as f64 - (n as f64).ln().powi(2);
        let heegaard_present = rs.iter().filter(|r| r.heegaard_lower.is_some()).count();
        let frac_heegaard_lower_ok = fraction(
            rs.iter()
                .filter(|r| {
                    r.heegaard_lower
                        .map(|lo| lo as f64 >= heegaard_bound)
                        .unwrap_or(false)
                })
                .count(),
            heegaard_present,
        );

        per_n.push(NAggregate {
            n,
            trials,
            mean_e,
            var_e,
            e_quantiles,
            mean_v: mean_of(&vs),
            frac_v1,
            mean_genus_ratio: mean_of(&genus_ratios),
            mean_ekl: mean_of(&ekls),
            genericity_rate,
            mean_ek_simple,
            mean_lambda1: mean_of(&lambdas),
            frac_lambda1_ok,
            mean_diameter: mean_of(&diams),
            frac_diam_ok,
            median_b1_rel,
            frac_heegaard_lower_ok,
            homology_trials: heegaard_present,
            mean_wall_ms: mean_of(
                &rs.iter().map(|r| r.wall_time_ms).collect::<Vec<_>>(),
            )
            .unwrap_or(0.0),
        });
    }

    let points: Vec<(f64, f64)> = per_n
        .iter()
        .filter(|a| a.mean_e.is_finite())
        .map(|a| ((a.n as f64).ln(), a.mean_e))
        .collect();
    AggregateStats {
        per_n,
        e_slope: linear_fit(&points),
        tolerances: tolerances.clone(),
    }
}

/// JSONL sink for records.
pub fn write_records<W: Write>(records: &[SampleRecord], mut w: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_records<R: std::io::BufRead>(r: R) -> Result<Vec<SampleRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Aggregate CSV. Column order is fixed and documented in the README.
pub fn write_aggregate_csv<W: Write>(stats: &AggregateStats, mut w: W) -> Result<()> {
    write!(
        w,
        "n,trials,mean_E,var_E,q25_E,median_E,q75_E,mean_V,frac_V1,mean_genus_ratio,\
         mean_E_KL,genericity_rate,mean_lambda1,frac_lambda1_ok,mean_diameter,frac_diam_ok,\
         median_b1_rel,frac_heegaard_lower_ok,homology_trials,mean_wall_ms"
    )?;
    for k in 1..=10 {
        write!(w, ",mean_Ek_simple_{k}")?;
    }
    writeln!(w)?;
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v}"));
    for a in &stats.per_n {
        write!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            a.n,
            a.trials,
            a.mean_e,
            a.var_e,
            a.e_quantiles[0],
            a.e_quantiles[1],
            a.e_quantiles[2],
            opt(a.mean_v),
            opt(a.frac_v1),
            opt(a.mean_genus_ratio),
            opt(a.mean_ekl),
            opt(a.genericity_rate),
            opt(a.mean_lambda1),
            opt(a.frac_lambda1_ok),
            opt(a.mean_diameter),
            opt(a.frac_diam_ok),
            opt(a.median_b1_rel),
            opt(a.frac_heegaard_lower_ok),
            a.homology_trials,
            a.mean_wall_ms,
        )?;
        for k in 0..10 {
            write!(w, ",{}", a.mean_ek_simple[k])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Execute a sweep: trials x n_list independent seeded samples, in
/// parallel, with deterministic record order (n, then trial).
pub fn run_sweep(config: &ExperimentConfig) -> Result<(Vec<SampleRecord>, AggregateStats)> {
    config.validate()?;
    let jobs: Vec<(usize, u64)> = config
        .n_list
        .iter()
        .flat_map(|&n| (0..config.trials as u64).map(move |t| (n, t)))
        .collect();
    let records: Vec<SampleRecord> = jobs
        .par_iter()
        .map(|&(n, t)| run_trial(config, n, t))
        .collect::<Result<_>>()?;
    let stats = aggregate(&records, &config.tolerances);
    if let Some(path) = &config.out_records {
        write_records(&records, std::io::BufWriter::new(std::fs::File::create(path)?))?;
    }
    if let Some(path) = &config.out_aggregates {
        write_aggregate_csv(&stats, std::io::BufWriter::new(std::fs::File::create(path)?))?;
    }
    Ok((records, stats))
}

/// One asymptotic-law check of the theory report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawCheck {
    pub law: String,
    pub observed: String,
    pub comparator: String,
    /// None when the sweep carried no data for this law.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoryReport {
    pub laws: Vec<LawCheck>,
}

impl TheoryReport {
    pub fn all_pass(&self) -> bool {
        self.laws.iter().all(|l| l.pass != Some(false))
    }

    pub fn render(&self) -> String {
        let mut s = String::from("theory comparison\n=================\n");
        for l in &self.laws {
            let verdict = match l.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "SKIP",
            };
            s.push_str(&format!(
                "[{verdict}] {}\n    observed:   {}\n    comparator: {}\n",
                l.law, l.observed, l.comparator
            ));
        }
        s
    }
}

/// Compare aggregates against the asymptotic laws. Requires >= 3 distinct
/// n spanning at least one decade.
pub fn compare_theory(stats: &AggregateStats) -> Result<TheoryReport> {
    let ns: Vec<usize> = stats.per_n.iter().map(|a| a.n).collect();
    if ns.len() < 3 || (*ns.iter().max().unwrap() as f64) < 10.0 * *ns.iter().min().unwrap() as f64
    {
        return Err(Error::InsufficientData);
    }
    let tol = &stats.tolerances;
    let mut laws = Vec::new();
    let largest = stats.per_n.last().unwrap();

    // 1. E[E] = 1/2 ln n + O(1): slope of mean E against ln n.
    laws.push(match stats.e_slope {
        Some(fit) => LawCheck {
            law: "mean E grows like (1/2) ln n".into(),
            observed: format!("slope {:.4} (r2 {:.4})", fit.slope, fit.r2),
            comparator: format!(
                "slope in [{}, {}], target 0.5",
                tol.slope_range.0, tol.slope_range.1
            ),
            pass: Some(fit.slope >= tol.slope_range.0 && fit.slope <= tol.slope_range.1),
        },
        None => LawCheck {
            law: "mean E grows like (1/2) ln n".into(),
            observed: "no fit".into(),
            comparator: "slope target 0.5".into(),
            pass: None,
        },
    });

    // 2. E[E_k deg] = 1/(2k) (1 + o(1)) for k <= 10, at the largest n.
    let ek_obs: Vec<f64> = largest
        .mean_ek_simple
        .iter()
        .enumerate()
        .map(|(i, &m)| m * 2.0 * (i + 1) as f64)
        .collect();
    let have_ek = largest.trials > 0 && ek_obs.iter().any(|&x| x > 0.0);
    laws.push(LawCheck {
        law: format!("simple-edge counts: 2k * mean E_k_simple near 1 (n = {})", largest.n),
        observed: format!(
            "[{}]",
            ek_obs
                .iter()
                .map(|x| format!("{x:.3}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        comparator: format!(
            "each in [{}, {}]",
            tol.ek_simple_range.0, tol.ek_simple_range.1
        ),
        pass: if have_ek {
            Some(
                ek_obs
                    .iter()
                    .all(|&x| x >= tol.ek_simple_range.0 && x <= tol.ek_simple_range.1),
            )
        } else {
            None
        },
    });

    // 3. P[V = 1] -> 1: high at the largest n and non-decreasing in trend.
    let v1: Vec<(usize, f64)> = stats
        .per_n
        .iter()
        .filter_map(|a| a.frac_v1.map(|f| (a.n, f)))
        .collect();
    laws.push(if v1.is_empty() {
        LawCheck {
            law: "P[V = 1] -> 1".into(),
            observed: "no data".into(),
            comparator: format!(">= {} at the largest n", tol.v1_min_fraction),
            pass: None,
        }
    } else {
        // Two-sigma slack per step for the monotone-trend proxy.
        let trend_ok = v1.windows(2).all(|w| {
            let sigma = (w[0].1 * (1.0 - w[0].1) / largest.trials as f64).sqrt();
            w[1].1 >= w[0].1 - 2.0 * sigma.max(1e-3)
        });
        let last = v1.last().unwrap().1;
        LawCheck {
            law: "P[V = 1] -> 1".into(),
            observed: format!(
                "{}",
                v1.iter()
                    .map(|(n, f)| format!("n={n}: {f:.3}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            comparator: format!(
                ">= {} at the largest n, non-decreasing within 2 sigma",
                tol.v1_min_fraction
            ),
            pass: Some(last >= tol.v1_min_fraction && trend_ok),
        }
    });

    // 4. genus ~ n.
    laws.push(LawCheck {
        law: format!("boundary genus: mean g/n (n = {})", largest.n),
        observed: largest
            .mean_genus_ratio
            .map_or("no data".into(), |g| format!("{g:.4}")),
        comparator: format!(
            "in [{}, {}]",
            tol.genus_ratio_range.0, tol.genus_ratio_range.1
        ),
        pass: largest
            .mean_genus_ratio
            .map(|g| g >= tol.genus_ratio_range.0 && g <= tol.genus_ratio_range.1),
    });

    // 5. E_KL = o(1) at K = L = ceil(n^(1/4)).
    laws.push(LawCheck {
        law: format!("adjacent short edges: mean E_KL (n = {})", largest.n),
        observed: largest
            .mean_ekl
            .map_or("no data".into(), |x| format!("{x:.4}")),
        comparator: format!("<= {}", tol.ekl_max),
        pass: largest.mean_ekl.map(|x| x <= tol.ekl_max),
    });

    // 6. diameter <= (factor) log_3 n.
    laws.push(LawCheck {
        law: format!(
            "dual diameter <= {} log3 n (n = {})",
            tol.diam_log3_factor, largest.n
        ),
        observed: largest
            .frac_diam_ok
            .map_or("no data".into(), |f| format!("fraction {f:.3}")),
        comparator: format!("fraction >= {}", tol.diam_min_fraction),
        pass: largest.frac_diam_ok.map(|f| f >= tol.diam_min_fraction),
    });

    // 7. lambda_1 bounded away from 0.
    laws.push(LawCheck {
        law: format!(
            "dual spectral gap lambda1 >= {} (n = {})",
            tol.lambda1_min, largest.n
        ),
        observed: largest
            .frac_lambda1_ok
            .map_or("no data".into(), |f| format!("fraction {f:.3}")),
        comparator: format!("fraction >= {}", tol.lambda1_min_fraction),
        pass: largest
            .frac_lambda1_ok
            .map(|f| f >= tol.lambda1_min_fraction),
    });

    // 8. Heegaard bracket: lower bound b1(DM) usually >= n - (ln n)^2.
    let hom = stats
        .per_n
        .iter()
        .filter(|a| a.homology_trials > 0)
        .next_back();
    laws.push(match hom {
        Some(a) => LawCheck {
            law: format!("Heegaard lower bound b1(DM) >= n - (ln n)^2 (n = {})", a.n),
            observed: format!(
                "fraction {:.3} over {} trials",
                a.frac_heegaard_lower_ok.unwrap_or(0.0),
                a.homology_trials
            ),
            comparator: format!("fraction >= {}", tol.heegaard_min_fraction),
            pass: a
                .frac_heegaard_lower_ok
                .map(|f| f >= tol.heegaard_min_fraction),
        },
        None => LawCheck {
            law: "Heegaard lower bound b1(DM) >= n - (ln n)^2".into(),
            observed: "no data".into(),
            comparator: format!("fraction >= {}", tol.heegaard_min_fraction),
            pass: None,
        },
    });

    Ok(TheoryReport { laws })
}

/// The collapsed statistic of one atom: what the exact tables are keyed by.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomStatistic {
    pub v: usize,
    pub e: usize,
    /// Rows (k, E_k, E_k_simple), ascending k.
    pub histogram: Vec<(usize, usize, usize)>,
    /// Dual edge multiset, canonical order.
    pub dual_edges: Vec<(usize, usize)>,
}

pub fn statistic_of(inst: &GluingInstance) -> AtomStatistic {
    let orbits = build_edge_orbits(inst);
    let h = edge_histogram(&orbits.orbits);
    let histogram = h
        .by_length
        .iter()
        .map(|(&k, &c)| (k, c, h.simple_by_length.get(&k).copied().unwrap_or(0)))
        .collect();
    let mut dual_edges: Vec<(usize, usize)> = build_dual(inst).edges().to_vec();
    dual_edges.sort_unstable();
    AtomStatistic {
        v: vertex_orbits(inst).count,
        e: orbits.count(),
        histogram,
        dual_edges,
    }
}

/// The exact distribution over the gluing space for n <= 2: the atoms
/// (each uniformly likely) and the pushforward onto collapsed statistics,
/// in exact rational arithmetic.
pub struct ExactDistribution {
    pub n: usize,
    pub atoms: Vec<GluingInstance>,
    /// 1 / |Omega_n|.
    pub atom_probability: BigRational,
    pub by_statistic: BTreeMap<AtomStatistic, BigRational>,
}

pub fn exact_distribution(n: usize) -> Result<ExactDistribution> {
    let atoms = enumerate_all(n)?;
    let p = BigRational::new(BigInt::one(), BigInt::from(atoms.len()));
    let mut by_statistic: BTreeMap<AtomStatistic, BigRational> = BTreeMap::new();
    for a in &atoms {
        *by_statistic
            .entry(statistic_of(a))
            .or_insert_with(BigRational::zero) += &p;
    }
    Ok(ExactDistribution {
        n,
        atoms,
        atom_probability: p,
        by_statistic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            n_list: vec![10],
            trials: 2,
            master_seed: 1,
            conditioning: Conditioning::Uniform,
            panels: vec![
                Panel::Edges,
                Panel::Boundary,
                Panel::Dual,
                Panel::Homology,
                Panel::Peeling,
            ],
            out_records: None,
            out_aggregates: None,
            homology_cap: DEFAULT_NONZERO_CAP,
            tolerances: Tolerances::default(),
        }
    }

    #[test]
    fn sweep_emits_one_record_per_trial() {
        let (records, stats) = run_sweep(&small_config()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(stats.per_n.len(), 1);
        assert_eq!(stats.per_n[0].trials, 2);
    }

    #[test]
    fn sweep_is_reproducible_modulo_wall_time() {
        let (mut a, _) = run_sweep(&small_config()).unwrap();
        let (mut b, _) = run_sweep(&small_config()).unwrap();
        for r in a.iter_mut().chain(b.iter_mut()) {
            r.wall_time_ms = 0.0;
        }
        assert_eq!(a, b);
    }

    #[test]
    fn records_round_trip_jsonl() {
        let (records, _) = run_sweep(&small_config()).unwrap();
        let mut buf = Vec::new();
        write_records(&records, &mut buf).unwrap();
        let back = read_records(&buf[..]).unwrap();
        assert_eq!(records, back);
        let text = String::from_utf8(buf).unwrap();
        for key in ["\"V\":", "\"E\":", "\"E_KL\":", "\"b1_rel\":"] {
            assert!(text.contains(key), "missing key {key}");
        }
    }

    #[test]
    fn exact_distribution_sums_to_one() {
        for n in [1, 2] {
            let d = exact_distribution(n).unwrap();
            let total: BigRational = d
                .by_statistic
                .values()
                .fold(BigRational::zero(), |a, b| a + b);
            assert!(total.is_one());
            assert_eq!(d.atoms.len(), if n == 1 { 27 } else { 8505 });
        }
    }

    #[test]
    fn compare_theory_needs_a_decade() {
        let cfg = small_config();
        let (_, stats) = run_sweep(&cfg).unwrap();
        assert!(matches!(
            compare_theory(&stats),
            Err(Error::InsufficientData)
        ));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 2.0 + 0.5 * i as f64)).collect();
        let fit = linear_fit(&pts).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 2.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }
}
