//! Text configuration for a lattice together with the laws that drive walks
//! on it. The format is JSON; see the README for an annotated example.

use serde::{Deserialize, Serialize};

use crate::dist::{compound_poisson_law, CompoundPoissonLaw};
use crate::error::{Error, Result};
use crate::lattice::{BaseGraph, CrystalLattice, Edge, LatticePoint, PeriodicRealization};
use crate::walk::{FiniteRangeWalkSpec, InfiniteRangeWalkSpec, WalkSpec};
use crate::zeta::FiniteEulerSpec;

/// One base edge; its reversal is added automatically with the negated
/// voltage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeConfig {
    pub from: String,
    pub to: String,
    pub voltage: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub vertex: String,
    /// Increments in `R^d`.
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Point at which the generating Shintani zeta function is normalized.
    pub sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerConfig {
    pub alpha: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartConfig {
    pub vertex: String,
    pub cell: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeConfig>,
    /// Position of the lift of each vertex in cell 0, in vertex order.
    pub offsets: Vec<Vec<f64>>,
    /// Images of the unit translations; identity when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub kernels: Vec<KernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<EulerConfig>,
    /// First vertex in cell 0 when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartConfig>,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Model {
    config: ModelConfig,
    realization: PeriodicRealization,
    euler: Option<(FiniteEulerSpec, Vec<f64>)>,
    start: LatticePoint,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

impl Model {
    pub fn from_json(text: &str) -> Result<Self> {
        Model::new(ModelConfig::from_json(text)?)
    }

    pub fn new(config: ModelConfig) -> Result<Self> {
        let vertex = |name: &str| {
            config
                .vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Config(format!("unknown vertex {name:?}")))
        };
        let dim = config.offsets.first().map_or(0, |o| o.len());
        let mut edges = Vec::with_capacity(2 * config.edges.len());
        let mut voltage = Vec::with_capacity(2 * config.edges.len());
        for (k, e) in config.edges.iter().enumerate() {
            let (o, t) = (vertex(&e.from)?, vertex(&e.to)?);
            let id = 2 * k;
            edges.push(Edge { id, origin: o, terminus: t, inverse: id + 1 });
            edges.push(Edge { id: id + 1, origin: t, terminus: o, inverse: id });
            voltage.push(e.voltage.clone());
            voltage.push(e.voltage.iter().map(|x| -x).collect());
        }
        let base = BaseGraph::new(config.vertices.clone(), edges)?;
        let lattice = CrystalLattice::new(base, dim, voltage)?;
        let realization = match &config.basis {
            Some(b) => PeriodicRealization::new(lattice, config.offsets.clone(), b.clone())?,
            None => PeriodicRealization::with_identity_basis(lattice, config.offsets.clone())?,
        };
        let start = match &config.start {
            Some(s) => LatticePoint::new(vertex(&s.vertex)?, s.cell.clone()),
            None => LatticePoint::origin(0, dim),
        };
        if start.cell.len() != dim {
            return Err(Error::Config(format!("start cell must have length {dim}")));
        }
        for k in &config.kernels {
            vertex(&k.vertex)?;
        }
        let euler = match &config.euler {
            Some(e) => {
                let spec = FiniteEulerSpec::new(dim, e.alpha.clone(), e.a.clone())?;
                if e.sigma.len() != dim {
                    return Err(Error::Config(format!("euler sigma must have length {dim}")));
                }
                Some((spec, e.sigma.clone()))
            }
            None => None,
        };
        Ok(Model { config, realization, euler, start })
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn description(&self) -> &str {
        &self.config.description
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn realization(&self) -> &PeriodicRealization {
        &self.realization
    }

    pub fn lattice(&self) -> &CrystalLattice {
        self.realization.lattice()
    }

    pub fn dim(&self) -> usize {
        self.realization.dim()
    }

    pub fn start(&self) -> &LatticePoint {
        &self.start
    }

    pub fn kernels(&self) -> &[KernelConfig] {
        &self.config.kernels
    }

    /// The finite Euler product and its normalization point.
    pub fn euler(&self) -> Result<(&FiniteEulerSpec, &[f64])> {
        self.euler
            .as_ref()
            .map(|(s, sigma)| (s, sigma.as_slice()))
            .ok_or_else(|| Error::InvalidSpec(format!("model {:?} has no finite Euler product", self.name())))
    }

    pub fn compound_law(&self) -> Result<CompoundPoissonLaw> {
        let (spec, sigma) = self.euler()?;
        compound_poisson_law(spec, sigma)
    }

    /// Finite-range walk with every configured kernel installed.
    pub fn finite_walk(&self) -> Result<FiniteRangeWalkSpec> {
        if self.config.kernels.is_empty() {
            return Err(Error::InvalidSpec(format!("model {:?} has no step kernels", self.name())));
        }
        let mut walk = FiniteRangeWalkSpec::new(self.realization.clone(), self.start.clone())?;
        for k in &self.config.kernels {
            let x = self.lattice().base().vertex_id(&k.vertex).expect("checked at construction");
            walk = walk.with_shintani_kernel(x, &k.points, &k.weights, &k.sigma)?;
        }
        Ok(walk)
    }

    /// Infinite-range walk driven by the finite Euler product.
    pub fn infinite_walk(&self) -> Result<InfiniteRangeWalkSpec> {
        InfiniteRangeWalkSpec::new(self.realization.clone(), self.compound_law()?, self.start.clone())
    }

    /// The walk a command should use: finite-range when `infinite` is false.
    pub fn walk(&self, infinite: bool) -> Result<WalkSpec> {
        Ok(if infinite { self.infinite_walk()?.into() } else { self.finite_walk()?.into() })
    }
}
