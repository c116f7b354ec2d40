use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use serde::Serialize;

use crate::dist::{finite_support_to_shintani, shintani_distribution, LatticeDistribution};
use crate::error::{Error, Result};
use crate::lattice::{LatticePoint, PeriodicRealization, VertexId, DEFAULT_TOL};
use crate::zeta::{ShintaniZetaSpec, TruncationPolicy};

/// One-step law at a base vertex, with every step resolved to its landing
/// vertex and cell shift.
#[derive(Debug, Clone)]
pub struct Kernel {
    law: LatticeDistribution,
    witness: Option<(ShintaniZetaSpec, Vec<f64>)>,
    targets: Vec<(VertexId, Vec<i64>)>,
    index: WeightedIndex<f64>,
}

impl Kernel {
    pub fn law(&self) -> &LatticeDistribution {
        &self.law
    }

    /// The Shintani spec and sigma this kernel was generated from, if any.
    pub fn witness(&self) -> Option<(&ShintaniZetaSpec, &[f64])> {
        self.witness.as_ref().map(|(s, sigma)| (s, sigma.as_slice()))
    }

    /// Landing base vertex and cell shift of each support point.
    pub fn targets(&self) -> &[(VertexId, Vec<i64>)] {
        &self.targets
    }

    /// Base vertices the walk can move to from here.
    pub fn successors(&self) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = self.targets.iter().map(|t| t.0).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Finite-range walk: a Markov chain whose step law depends on the base
/// vertex of the current position.
#[derive(Debug, Clone)]
pub struct FiniteRangeWalkSpec {
    realization: PeriodicRealization,
    kernels: Vec<Option<Kernel>>,
    start: LatticePoint,
}

#[derive(Serialize)]
pub(crate) struct FiniteView<'a> {
    realization: &'a PeriodicRealization,
    kernels: Vec<Option<&'a LatticeDistribution>>,
    start: &'a LatticePoint,
}

pub(crate) fn check_point(real: &PeriodicRealization, p: &LatticePoint) -> Result<()> {
    if p.base_vertex >= real.lattice().base().vertex_count() || p.cell.len() != real.dim() {
        return Err(Error::InvalidSpec(format!("{p:?} is not a vertex of this lattice")));
    }
    Ok(())
}

impl FiniteRangeWalkSpec {
    pub fn new(realization: PeriodicRealization, start: LatticePoint) -> Result<Self> {
        check_point(&realization, &start)?;
        let n = realization.lattice().base().vertex_count();
        Ok(FiniteRangeWalkSpec { realization, kernels: vec![None; n], start })
    }

    /// Installs `law` (increments in `R^d`) as the kernel at base vertex `x`.
    /// Every increment must land on a realized vertex and the masses must
    /// sum to 1.
    pub fn with_kernel(mut self, x: VertexId, law: LatticeDistribution) -> Result<Self> {
        self.set_kernel(x, law, None)?;
        Ok(self)
    }

    /// Kernel `P(a_l) = weights[l]` at `x`, built through its Shintani zeta
    /// representation at `sigma`.
    pub fn with_shintani_kernel(
        mut self,
        x: VertexId,
        points: &[Vec<f64>],
        weights: &[f64],
        sigma: &[f64],
    ) -> Result<Self> {
        let spec = finite_support_to_shintani(points, weights, sigma)?;
        let law = shintani_distribution(&spec, sigma, &TruncationPolicy::default())?;
        self.set_kernel(x, law, Some((spec, sigma.to_vec())))?;
        Ok(self)
    }

    fn set_kernel(&mut self, x: VertexId, law: LatticeDistribution, witness: Option<(ShintaniZetaSpec, Vec<f64>)>) -> Result<()> {
        let base = self.realization.lattice().base();
        if x >= base.vertex_count() {
            return Err(Error::InvalidSpec(format!("no base vertex {x}")));
        }
        if (law.total() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "kernel at {} has total mass {}, expected 1",
                base.vertex_name(x),
                law.total()
            )));
        }
        if law.support().iter().any(|p| p.point.len() != self.realization.dim()) {
            return Err(Error::InvalidSpec(format!("kernel at {} has wrong dimension", base.vertex_name(x))));
        }
        let law = law.attach_lattice(&self.realization, x, DEFAULT_TOL)?;
        let targets = law
            .lattice_points()
            .unwrap_or_default()
            .iter()
            .map(|p| (p.base_vertex, p.cell.clone()))
            .collect();
        let masses: Vec<f64> = law.support().iter().map(|p| p.mass).collect();
        let index = WeightedIndex::new(&masses).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
        self.kernels[x] = Some(Kernel { law, witness, targets, index });
        Ok(())
    }

    pub fn realization(&self) -> &PeriodicRealization {
        &self.realization
    }

    pub fn start(&self) -> &LatticePoint {
        &self.start
    }

    pub fn kernel(&self, x: VertexId) -> Result<&Kernel> {
        self.kernels
            .get(x)
            .and_then(|k| k.as_ref())
            .ok_or_else(|| Error::MissingKernel(self.vertex_label(x)))
    }

    fn vertex_label(&self, x: VertexId) -> String {
        let base = self.realization.lattice().base();
        if x < base.vertex_count() {
            base.vertex_name(x).to_string()
        } else {
            x.to_string()
        }
    }

    pub(crate) fn view(&self) -> FiniteView<'_> {
        FiniteView {
            realization: &self.realization,
            kernels: self.kernels.iter().map(|k| k.as_ref().map(|k| &k.law)).collect(),
            start: &self.start,
        }
    }

    /// One step from `state`: draw an increment from the kernel at its base
    /// vertex and move to the vertex it lands on.
    pub fn step<R: Rng + ?Sized>(&self, state: &LatticePoint, rng: &mut R) -> Result<LatticePoint> {
        let kernel = self.kernel(state.base_vertex)?;
        let (vertex, shift) = &kernel.targets[kernel.index.sample(rng)];
        Ok(LatticePoint::new(*vertex, state.translated(shift).cell))
    }
}

pub fn step_finite_range<R: Rng + ?Sized>(
    spec: &FiniteRangeWalkSpec,
    state: &LatticePoint,
    rng: &mut R,
) -> Result<LatticePoint> {
    spec.step(state, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BaseGraph, CrystalLattice};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn square() -> PeriodicRealization {
        let base = BaseGraph::from_pairs(&["x"], &[(0, 0), (0, 0)]).unwrap();
        let lattice = crate::lattice::maximal_abelian_cover(&base).unwrap();
        PeriodicRealization::with_identity_basis(lattice, vec![vec![0.0, 0.0]]).unwrap()
    }

    fn hexagonal() -> PeriodicRealization {
        let base = BaseGraph::from_pairs(&["x", "y"], &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let lattice = CrystalLattice::new(
            base,
            2,
            vec![vec![0, 0], vec![0, 0], vec![0, -1], vec![0, 1], vec![-1, -1], vec![1, 1]],
        )
        .unwrap();
        PeriodicRealization::with_identity_basis(lattice, vec![vec![0.0, 0.0], vec![1.0 / 3.0, 2.0 / 3.0]]).unwrap()
    }

    fn nn() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]
    }

    #[test]
    fn square_moves_to_a_neighbour() {
        let spec = FiniteRangeWalkSpec::new(square(), LatticePoint::origin(0, 2))
            .unwrap()
            .with_shintani_kernel(0, &nn(), &[0.25; 4], &[1.0, 1.0])
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let state = LatticePoint::new(0, vec![3, -2]);
        for _ in 0..100 {
            let next = spec.step(&state, &mut rng).unwrap();
            let dx: i64 = next.cell.iter().zip(&state.cell).map(|(a, b)| (a - b).abs()).sum();
            assert_eq!(dx, 1);
        }
    }

    #[test]
    fn hexagonal_alternates() {
        let x_steps = vec![vec![1.0 / 3.0, 2.0 / 3.0], vec![1.0 / 3.0, -1.0 / 3.0], vec![-2.0 / 3.0, -1.0 / 3.0]];
        let y_steps: Vec<Vec<f64>> = x_steps.iter().map(|v| v.iter().map(|c| -c).collect()).collect();
        let spec = FiniteRangeWalkSpec::new(hexagonal(), LatticePoint::origin(0, 2))
            .unwrap()
            .with_shintani_kernel(0, &x_steps, &[0.2, 0.3, 0.5], &[1.0, 0.5])
            .unwrap()
            .with_shintani_kernel(1, &y_steps, &[0.6, 0.3, 0.1], &[-0.5, 1.0])
            .unwrap();
        assert_eq!(spec.kernel(0).unwrap().successors(), vec![1]);
        assert_eq!(spec.kernel(1).unwrap().successors(), vec![0]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut state = spec.start().clone();
        for _ in 0..50 {
            let next = spec.step(&state, &mut rng).unwrap();
            assert_ne!(next.base_vertex, state.base_vertex);
            state = next;
        }
    }

    #[test]
    fn delta_kernel_stays_put() {
        let spec = FiniteRangeWalkSpec::new(square(), LatticePoint::origin(0, 2))
            .unwrap()
            .with_shintani_kernel(0, &[vec![0.0, 0.0]], &[1.0], &[1.0, 0.0])
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = LatticePoint::new(0, vec![4, 4]);
        assert_eq!(spec.step(&s, &mut rng).unwrap(), s);
    }

    #[test]
    fn increments_off_the_lattice_fail_at_build_time() {
        let err = FiniteRangeWalkSpec::new(square(), LatticePoint::origin(0, 2))
            .unwrap()
            .with_shintani_kernel(0, &[vec![0.5, 0.0]], &[1.0], &[1.0, 1.0])
            .unwrap_err();
        assert!(matches!(err, Error::LatticeClosure(_)));
    }

    #[test]
    fn missing_kernel_errors() {
        let spec = FiniteRangeWalkSpec::new(hexagonal(), LatticePoint::origin(0, 2))
            .unwrap()
            .with_shintani_kernel(0, &[vec![1.0 / 3.0, 2.0 / 3.0]], &[1.0], &[1.0, 1.0])
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let at_y = spec.step(spec.start(), &mut rng).unwrap();
        assert_eq!(at_y.base_vertex, 1);
        assert!(matches!(spec.step(&at_y, &mut rng), Err(Error::MissingKernel(ref v)) if v == "y"));
    }
}
