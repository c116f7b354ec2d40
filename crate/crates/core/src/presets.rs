//! Built-in models: the line, square, triangular and hexagonal lattices.

use crate::config::{EdgeConfig, EulerConfig, KernelConfig, Model, ModelConfig};
use crate::error::{Error, Result};
use crate::zeta::{ShintaniZetaSpec, Theta};

pub const PRESET_NAMES: [&str; 4] = ["line", "square", "triangular", "hexagonal"];

/// Default `N` of the triangular kernel.
pub const TRIANGULAR_DEFAULT_N: u32 = 3;

fn edge(from: &str, to: &str, voltage: &[i64]) -> EdgeConfig {
    EdgeConfig { from: from.into(), to: to.into(), voltage: voltage.to_vec() }
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Looks a preset up by name. `triangular` uses `TRIANGULAR_DEFAULT_N`.
pub fn preset(name: &str) -> Result<Model> {
    match name {
        "line" => line(),
        "square" => square(),
        "triangular" => triangular(TRIANGULAR_DEFAULT_N, None),
        "hexagonal" => hexagonal(),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// `Z` as the cover of a one-loop bouquet, with the simple symmetric walk
/// (`sigma = 2`) and the Euler factor `(1 - e^{-s})^{-1}` at `sigma = log 2`.
pub fn line() -> Result<Model> {
    Model::new(ModelConfig {
        name: "line".into(),
        description: "integer lattice Z; simple symmetric walk; Euler ratio 1/2".into(),
        vertices: vec!["x".into()],
        edges: vec![edge("x", "x", &[1])],
        offsets: vec![vec![0.0]],
        basis: None,
        kernels: vec![KernelConfig {
            vertex: "x".into(),
            points: vec![vec![1.0], vec![-1.0]],
            weights: uniform(2),
            sigma: vec![2.0],
        }],
        euler: Some(EulerConfig { alpha: vec![1.0], a: vec![vec![1.0]], sigma: vec![2f64.ln()] }),
        start: None,
    })
}

/// `Z^2` as the maximal abelian cover of the two-loop bouquet. The kernel is
/// the nearest-neighbour walk with weights 1/4. The Euler product uses
/// `a = e_1, e_2`, `alpha = 1` and `sigma = (log 3/2, log 3/2)`, giving ratios
/// `(2/3, 2/3)`, total Levy mass `2 log 3`, mass 1/9 at the origin and
/// one-step CF `1/((3 - 2e^{-it_1})(3 - 2e^{-it_2}))`. The preset is fixed by
/// these ratios: `sigma = (log 2, log 2)` would give ratio 1/2 and mass
/// `2 log 2`. Jumps sit on the negative axes; mirroring them conjugates the CF.
pub fn square() -> Result<Model> {
    let s = 1.5f64.ln();
    Model::new(ModelConfig {
        name: "square".into(),
        description: "square lattice Z^2; nearest-neighbour walk; Euler ratios (2/3, 2/3)".into(),
        vertices: vec!["x".into()],
        edges: vec![edge("x", "x", &[1, 0]), edge("x", "x", &[0, 1])],
        offsets: vec![vec![0.0, 0.0]],
        basis: None,
        kernels: vec![KernelConfig {
            vertex: "x".into(),
            points: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            weights: uniform(4),
            sigma: vec![1.0, 1.0],
        }],
        euler: Some(EulerConfig {
            alpha: vec![1.0, 1.0],
            a: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            sigma: vec![s, s],
        }),
        start: None,
    })
}

/// `{k in Z^2 : |k_1|, |k_2|, |k_1 + k_2| <= n}`, of size `3n^2 + 3n + 1`.
pub fn triangular_support(n: u32) -> Vec<Vec<f64>> {
    let n = n as i64;
    let mut pts = Vec::new();
    for k1 in -n..=n {
        for k2 in -n..=n {
            if (k1 + k2).abs() <= n {
                pts.push(vec![k1 as f64, k2 as f64]);
            }
        }
    }
    pts
}

/// The triangular lattice as a rank-2 cover of the three-loop bouquet
/// (not maximal abelian). The kernel jumps uniformly, or with `weights` in
/// the order of `triangular_support(n)`, to the points of that set.
pub fn triangular(n: u32, weights: Option<Vec<f64>>) -> Result<Model> {
    let points = triangular_support(n);
    let weights = match weights {
        Some(w) if w.len() != points.len() => {
            return Err(Error::Config(format!(
                "triangular kernel with N = {n} has {} points, got {} weights",
                points.len(),
                w.len()
            )))
        }
        Some(w) => w,
        None => uniform(points.len()),
    };
    let s = 2f64.ln();
    Model::new(ModelConfig {
        name: "triangular".into(),
        description: format!("triangular lattice; uniform kernel on {} points (N = {n})", points.len()),
        vertices: vec!["x".into()],
        edges: vec![edge("x", "x", &[1, 0]), edge("x", "x", &[0, 1]), edge("x", "x", &[1, -1])],
        offsets: vec![vec![0.0, 0.0]],
        basis: None,
        kernels: vec![KernelConfig { vertex: "x".into(), points, weights, sigma: vec![1.0, 1.0] }],
        euler: Some(EulerConfig {
            alpha: vec![1.0, 1.0, 1.0],
            a: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            sigma: vec![s, s],
        }),
        start: None,
    })
}

/// Steps from the `x` sublattice; steps from `y` are their negatives.
pub fn hexagonal_steps() -> Vec<Vec<f64>> {
    vec![vec![1.0 / 3.0, 2.0 / 3.0], vec![1.0 / 3.0, -1.0 / 3.0], vec![-2.0 / 3.0, -1.0 / 3.0]]
}

/// The hexagonal lattice as the maximal abelian cover of the two-vertex
/// graph with three parallel edges, `x` at the origin and `y` at
/// `(1/3, 2/3)`. Both kernels are uniform.
pub fn hexagonal() -> Result<Model> {
    let steps = hexagonal_steps();
    let back: Vec<Vec<f64>> = steps.iter().map(|v| v.iter().map(|c| -c).collect()).collect();
    Model::new(ModelConfig {
        name: "hexagonal".into(),
        description: "hexagonal lattice; two-vertex base; uniform kernels".into(),
        vertices: vec!["x".into(), "y".into()],
        edges: vec![edge("x", "y", &[0, 0]), edge("x", "y", &[0, -1]), edge("x", "y", &[-1, -1])],
        offsets: vec![vec![0.0, 0.0], vec![1.0 / 3.0, 2.0 / 3.0]],
        basis: None,
        kernels: vec![
            KernelConfig { vertex: "x".into(), points: steps, weights: uniform(3), sigma: vec![1.0, 1.0] },
            KernelConfig { vertex: "y".into(), points: back, weights: uniform(3), sigma: vec![1.0, 1.0] },
        ],
        euler: None,
        start: None,
    })
}

/// Two-point law on the line: `Z(s) = alpha e^{s - sigma} + beta e^{sigma - s}`,
/// with `c_1 = -1/log j1`, `c_2 = 1/log j2`.
pub fn line_two_point(alpha: f64, beta: f64, sigma: f64, j1: u64, j2: u64) -> Result<ShintaniZetaSpec> {
    if j1 < 2 || j2 < 2 {
        return Err(Error::InvalidSpec("j1 and j2 must be at least 2".into()));
    }
    ShintaniZetaSpec::new(
        1,
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![1.0, 1.0],
        vec![vec![-1.0 / (j1 as f64).ln()], vec![1.0 / (j2 as f64).ln()]],
        Theta::finite(vec![(vec![j1 - 1, 0], alpha * (-sigma).exp()), (vec![0, j2 - 1], beta * sigma.exp())]),
    )
}

/// Poisson law on the line: `Z(s) = exp(rate e^{s - sigma})`.
pub fn line_poisson(rate: f64, sigma: f64) -> Result<ShintaniZetaSpec> {
    ShintaniZetaSpec::new(
        1,
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![1.0, 1.0],
        vec![vec![-1.0 / 2f64.ln()], vec![0.0]],
        Theta::PoissonFamily { rate, base: 2, shift: sigma },
    )
}
