//! Independent oracles: empirical characteristic functions, the compound
//! Poisson pmf by direct convolution, and goodness-of-fit tests binding the
//! samplers to those oracles.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dist::{quantize, CompoundPoissonLaw};
use crate::error::{Error, Result};
use crate::linalg;

/// Default constant `c` in the CF acceptance threshold `c / sqrt(N)`.
pub const DEFAULT_CF_CONSTANT: f64 = 4.0;

/// Poisson orders are summed until the remaining tail is below this.
const POISSON_TAIL_EPS: f64 = 1e-12;

/// Largest unresolved oracle deficit `sampler_vs_oracle` accepts.
pub const MAX_ORACLE_DEFICIT: f64 = 1e-6;

/// Bins with fewer expected counts are pooled.
const MIN_EXPECTED: f64 = 5.0;

/// `(1/N) sum_k exp(i <t, x_k>)`.
pub fn empirical_cf(samples: &[Vec<f64>], t: &[f64]) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let sum: Complex64 = samples.iter().map(|x| Complex64::from_polar(1.0, linalg::dot(t, x))).sum();
    Ok(sum / samples.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CfComparison {
    pub grid: Vec<Vec<f64>>,
    pub analytic: Vec<Complex64>,
    pub empirical: Vec<Complex64>,
    pub max_abs_dev: f64,
    pub n_samples: usize,
    /// `c / sqrt(n_samples)`.
    pub threshold: f64,
    pub passed: bool,
}

/// Compares an analytic CF with the empirical CF of `samples` on `grid`.
pub fn compare_cf(
    analytic: impl Fn(&[f64]) -> Result<Complex64>,
    samples: &[Vec<f64>],
    grid: &[Vec<f64>],
    c: f64,
) -> Result<CfComparison> {
    if grid.is_empty() {
        return Err(Error::InvalidSpec("empty t-grid".into()));
    }
    let mut a = Vec::with_capacity(grid.len());
    let mut e = Vec::with_capacity(grid.len());
    for t in grid {
        a.push(analytic(t)?);
        e.push(empirical_cf(samples, t)?);
    }
    let max_abs_dev = a.iter().zip(&e).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let threshold = c / (samples.len() as f64).sqrt();
    Ok(CfComparison {
        grid: grid.to_vec(),
        analytic: a,
        empirical: e,
        max_abs_dev,
        n_samples: samples.len(),
        threshold,
        passed: max_abs_dev <= threshold,
    })
}

/// `n^d` grid points on `[-radius, radius]^d`.
pub fn t_grid(dim: usize, per_axis: usize, radius: f64) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = if per_axis == 1 {
        vec![0.0]
    } else {
        (0..per_axis).map(|i| -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64).collect()
    };
    let mut grid = vec![Vec::new()];
    for _ in 0..dim {
        grid = grid
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    grid
}

/// Compound Poisson pmf on the box `|x|_inf <= radius`, by convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct OraclePmf {
    resolution: f64,
    masses: HashMap<Vec<i64>, f64>,
    /// Mass outside the box or beyond the summed Poisson orders.
    pub deficit: f64,
    /// Part of `deficit` not known to lie outside the box. When all atoms
    /// share a closed orthant, partial sums move monotonically, so dropping
    /// intermediate sums that leave the box loses only mass that ends
    /// outside it; then this is just the Poisson tail. Otherwise it is the
    /// whole deficit.
    pub unresolved: f64,
}

impl OraclePmf {
    pub fn mass_at(&self, point: &[f64]) -> f64 {
        self.masses.get(&quantize(point, self.resolution)).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Support points and masses, sorted by point.
    pub fn entries(&self) -> Vec<(Vec<f64>, f64)> {
        let mut keys: Vec<&Vec<i64>> = self.masses.keys().collect();
        keys.sort();
        keys.into_iter().map(|k| (self.point(k), self.masses[k])).collect()
    }

    fn point(&self, key: &[i64]) -> Vec<f64> {
        key.iter().map(|&k| k as f64 * self.resolution).collect()
    }

    pub fn key(&self, point: &[f64]) -> Vec<i64> {
        quantize(point, self.resolution)
    }

    /// `sum mass * exp(i <t, x>)` over the box.
    pub fn cf(&self, t: &[f64]) -> Complex64 {
        self.masses
            .iter()
            .map(|(k, &m)| Complex64::from_polar(m, linalg::dot(t, &self.point(k))))
            .sum()
    }
}

/// `sum_k e^{-lambda} lambda^k / k! * J^{*k}` with the jump law `J` and all
/// convolution powers restricted to `|x|_inf <= radius`. Integer vectors
/// `a_l` give exact integer keys; otherwise points are binned at `1e-9`.
pub fn brute_force_cp_pmf(law: &CompoundPoissonLaw, radius: f64) -> OraclePmf {
    let dim = law.dim();
    let integral = law.spec().a().iter().flatten().all(|x| x.fract() == 0.0);
    let resolution = if integral { 1.0 } else { crate::dist::MERGE_RESOLUTION };
    let lambda = law.total_mass();
    let inside = |p: &[f64]| linalg::max_abs(p) <= radius + 1e-9;

    let mut jumps: Vec<(Vec<i64>, f64)> = Vec::new();
    if lambda > 0.0 {
        for atom in &law.levy().atoms {
            if inside(&atom.location) {
                jumps.push((quantize(&atom.location, resolution), atom.weight / lambda));
            }
        }
    }
    let zero = vec![0i64; dim];
    let mut power: HashMap<Vec<i64>, f64> = HashMap::from([(zero, 1.0)]);
    let mut masses: HashMap<Vec<i64>, f64> = HashMap::new();
    let mut weight = (-lambda).exp();
    let mut covered = 0.0;
    let key_inside = |k: &[i64]| k.iter().all(|&x| (x as f64 * resolution).abs() <= radius + 1e-9);
    let mut k = 0u64;
    loop {
        for (key, m) in &power {
            *masses.entry(key.clone()).or_insert(0.0) += weight * m;
        }
        covered += weight;
        if 1.0 - covered < POISSON_TAIL_EPS || lambda == 0.0 || power.is_empty() {
            break;
        }
        k += 1;
        weight *= lambda / k as f64;
        let mut next: HashMap<Vec<i64>, f64> = HashMap::new();
        for (key, m) in &power {
            for (jk, jm) in &jumps {
                let sum: Vec<i64> = key.iter().zip(jk).map(|(a, b)| a + b).collect();
                if key_inside(&sum) {
                    *next.entry(sum).or_insert(0.0) += m * jm;
                }
            }
        }
        power = next;
    }
    let total: f64 = masses.values().sum();
    let deficit = (1.0 - total).max(0.0);
    let monotone = (0..dim).all(|i| {
        let signs = || jumps.iter().map(|(k, _)| k[i].signum());
        signs().all(|s| s >= 0) || signs().all(|s| s <= 0)
    });
    let unresolved = if monotone { (1.0 - covered).max(0.0).min(deficit) } else { deficit };
    OraclePmf { resolution, masses, deficit, unresolved }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub bins: usize,
}

/// Pearson chi-square of `observed` counts against probabilities
/// `expected`. Bins expecting fewer than 5 counts are pooled.
pub fn pearson_chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquareOutcome> {
    if observed.len() != expected.len() {
        return Err(Error::InvalidSpec("observed and expected bins differ in number".into()));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let nf = n as f64;
    let mut order: Vec<usize> = (0..observed.len()).collect();
    order.sort_by(|&a, &b| expected[b].total_cmp(&expected[a]));
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for i in order {
        let e = expected[i] * nf;
        let o = observed[i] as f64;
        if e >= MIN_EXPECTED {
            bins.push((o, e));
        } else {
            pooled.0 += o;
            pooled.1 += e;
        }
    }
    if pooled.1 >= MIN_EXPECTED {
        bins.push(pooled);
    } else if let Some(last) = bins.last_mut() {
        last.0 += pooled.0;
        last.1 += pooled.1;
    } else {
        bins.push(pooled);
    }
    if bins.len() < 2 {
        return Err(Error::DegenerateChiSquare(format!("only {} bin after pooling", bins.len())));
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map_err(|e| Error::DegenerateChiSquare(e.to_string()))?
        .sf(statistic);
    Ok(ChiSquareOutcome { statistic, dof, p_value, bins: bins.len() })
}

/// Chi-square test of samples against the oracle pmf, with an extra bin for
/// everything outside the oracle support.
pub fn chi_square_against_oracle(samples: &[Vec<f64>], oracle: &OraclePmf) -> Result<ChiSquareOutcome> {
    let entries = oracle.entries();
    let index: HashMap<Vec<i64>, usize> = entries.iter().enumerate().map(|(i, (p, _))| (oracle.key(p), i)).collect();
    let mut observed = vec![0u64; entries.len() + 1];
    for x in samples {
        match index.get(&oracle.key(x)) {
            Some(&i) => observed[i] += 1,
            None => observed[entries.len()] += 1,
        }
    }
    let mut expected: Vec<f64> = entries.iter().map(|(_, m)| *m).collect();
    expected.push(oracle.deficit);
    pearson_chi_square(&observed, &expected)
}

/// Draws `n_draws` compound Poisson samples from `seed` and tests them
/// against `brute_force_cp_pmf(law, radius)`, with the mass outside the box
/// as one extra bin. Returns the p-value.
pub fn sampler_vs_oracle(law: &CompoundPoissonLaw, n_draws: usize, radius: f64, seed: u64) -> Result<f64> {
    let oracle = brute_force_cp_pmf(law, radius);
    if oracle.unresolved > MAX_ORACLE_DEFICIT {
        return Err(Error::OracleDeficit { deficit: oracle.unresolved, limit: MAX_ORACLE_DEFICIT });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vec<f64>> = (0..n_draws).map(|_| law.sample(&mut rng)).collect();
    if law.total_mass() == 0.0 {
        // All mass sits at the origin; the test passes iff every draw does.
        let all_zero = samples.iter().all(|x| x.iter().all(|&c| c == 0.0));
        return if all_zero {
            Ok(1.0)
        } else {
            Err(Error::DegenerateChiSquare("point-mass law produced a nonzero draw".into()))
        };
    }
    Ok(chi_square_against_oracle(&samples, &oracle)?.p_value)
}
