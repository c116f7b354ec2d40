//! Finite-range walks driven by per-vertex Shintani step laws and
//! infinite-range walks driven by compound Poisson increments.
//!
//! Path `i` of a simulation with master seed `S` draws from
//! `ChaCha8Rng::seed_from_u64(S)` switched to stream `i`, so every path is
//! reproducible on its own and results do not depend on thread scheduling.

mod finite;
mod infinite;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{LatticePoint, PeriodicRealization};

pub use finite::{step_finite_range, FiniteRangeWalkSpec, Kernel};
pub use infinite::{step_infinite_range, InfiniteRangeWalkSpec};

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum WalkSpec {
    Finite(FiniteRangeWalkSpec),
    Infinite(InfiniteRangeWalkSpec),
}

impl From<FiniteRangeWalkSpec> for WalkSpec {
    fn from(s: FiniteRangeWalkSpec) -> Self {
        WalkSpec::Finite(s)
    }
}

impl From<InfiniteRangeWalkSpec> for WalkSpec {
    fn from(s: InfiniteRangeWalkSpec) -> Self {
        WalkSpec::Infinite(s)
    }
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum View<'a> {
    Finite(finite::FiniteView<'a>),
    Infinite(infinite::InfiniteView<'a>),
}

impl WalkSpec {
    pub fn start(&self) -> &LatticePoint {
        match self {
            WalkSpec::Finite(s) => s.start(),
            WalkSpec::Infinite(s) => s.start(),
        }
    }

    pub fn realization(&self) -> &PeriodicRealization {
        match self {
            WalkSpec::Finite(s) => s.realization(),
            WalkSpec::Infinite(s) => s.realization(),
        }
    }

    pub fn step<R: Rng + ?Sized>(&self, state: &LatticePoint, rng: &mut R) -> Result<LatticePoint> {
        match self {
            WalkSpec::Finite(s) => s.step(state, rng),
            WalkSpec::Infinite(s) => Ok(s.step(state, rng)),
        }
    }

    /// Hex SHA-256 of the canonical JSON form of the spec.
    pub fn digest(&self) -> String {
        let view = match self {
            WalkSpec::Finite(s) => View::Finite(s.view()),
            WalkSpec::Infinite(s) => View::Infinite(s.view()),
        };
        let json = serde_json::to_vec(&view).expect("walk specs serialize");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A recorded path in lattice and realized coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub points: Vec<LatticePoint>,
    pub realized: Vec<Vec<f64>>,
    pub seed: u64,
    pub path: u64,
    pub meta: String,
}

/// The RNG of path `path` under `master_seed`.
pub fn path_rng(master_seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(path);
    rng
}

/// `n_paths` independent trajectories of `n_steps` steps, in path order.
pub fn simulate(spec: &WalkSpec, n_steps: usize, n_paths: usize, master_seed: u64) -> Result<Vec<Trajectory>> {
    let meta = spec.digest();
    let real = spec.realization();
    (0..n_paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut rng = path_rng(master_seed, path);
            let mut points = Vec::with_capacity(n_steps + 1);
            points.push(spec.start().clone());
            for k in 0..n_steps {
                let next = spec.step(&points[k], &mut rng)?;
                points.push(next);
            }
            let realized = points.iter().map(|p| real.realize(p)).collect();
            Ok(Trajectory { points, realized, seed: master_seed, path, meta: meta.clone() })
        })
        .collect()
}

/// Endpoints only; same streams as `simulate`, so `simulate_endpoints(..)[i]`
/// is the last point of `simulate(..)[i]`.
pub fn simulate_endpoints(spec: &WalkSpec, n_steps: usize, n_paths: usize, master_seed: u64) -> Result<Vec<LatticePoint>> {
    (0..n_paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut rng = path_rng(master_seed, path);
            let mut state = spec.start().clone();
            for _ in 0..n_steps {
                state = spec.step(&state, &mut rng)?;
            }
            Ok(state)
        })
        .collect()
}

/// Characteristic function of `Phi(W_n) - Phi(W_0)`.
///
/// For infinite-range walks this is `f(t)^n`. For finite-range walks it is
/// the product of the one-step CFs along the base-vertex sequence, which is
/// only well defined when that sequence is deterministic.
pub fn walk_cf(spec: &WalkSpec, n: usize, t: &[f64]) -> Result<Complex64> {
    if t.len() != spec.realization().dim() {
        return Err(Error::InvalidSpec(format!("t has length {}, expected {}", t.len(), spec.realization().dim())));
    }
    match spec {
        WalkSpec::Infinite(s) => Ok(s.law().cf(t)?.powu(n as u32)),
        WalkSpec::Finite(s) => {
            let mut value = Complex64::new(1.0, 0.0);
            let mut vertex = s.start().base_vertex;
            for _ in 0..n {
                let kernel = s.kernel(vertex)?;
                let next = kernel.successors();
                if next.len() != 1 {
                    let name = s.realization().lattice().base().vertex_name(vertex);
                    return Err(Error::AnalyticCfUnavailable(format!(
                        "the step from base vertex {name} can land on {} different base vertices",
                        next.len()
                    )));
                }
                value *= kernel.law().cf(t);
                vertex = next[0];
            }
            Ok(value)
        }
    }
}
