use rand::Rng;
use serde::Serialize;

use super::finite::check_point;
use crate::dist::CompoundPoissonLaw;
use crate::error::{Error, Result};
use crate::lattice::{LatticePoint, PeriodicRealization, DEFAULT_TOL};
use crate::linalg;
use crate::zeta::FiniteEulerSpec;

/// Infinite-range walk on a Cayley graph of `Z^d` with iid compound Poisson
/// increments.
#[derive(Debug, Clone)]
pub struct InfiniteRangeWalkSpec {
    realization: PeriodicRealization,
    law: CompoundPoissonLaw,
    start: LatticePoint,
    /// Cell coordinates of each `a_l`.
    cells: Vec<Vec<i64>>,
}

#[derive(Serialize)]
pub(crate) struct InfiniteView<'a> {
    realization: &'a PeriodicRealization,
    spec: &'a FiniteEulerSpec,
    sigma: &'a [f64],
    start: &'a LatticePoint,
}

impl InfiniteRangeWalkSpec {
    /// Requires a one-vertex base and every `a_l` in the period lattice.
    pub fn new(realization: PeriodicRealization, law: CompoundPoissonLaw, start: LatticePoint) -> Result<Self> {
        let n = realization.lattice().base().vertex_count();
        if n != 1 {
            return Err(Error::InvalidSpec(format!(
                "infinite-range walks need a one-vertex base (Cayley graph of Z^d); this base has {n} vertices"
            )));
        }
        if law.dim() != realization.dim() {
            return Err(Error::InvalidSpec(format!(
                "law has dimension {}, lattice has {}",
                law.dim(),
                realization.dim()
            )));
        }
        check_point(&realization, &start)?;
        let mut cells = Vec::with_capacity(law.spec().m());
        for (l, a) in law.spec().a().iter().enumerate() {
            let coords = realization.to_cell_coordinates(a);
            let cell: Vec<i64> = coords.iter().map(|c| c.round() as i64).collect();
            let back = realization.translation(&cell);
            if linalg::norm(&linalg::sub(&back, a)) > DEFAULT_TOL {
                return Err(Error::LatticeClosure(format!("a[{l}] = {a:?} is not a period of the realization")));
            }
            cells.push(cell);
        }
        Ok(InfiniteRangeWalkSpec { realization, law, start, cells })
    }

    pub fn realization(&self) -> &PeriodicRealization {
        &self.realization
    }

    pub fn law(&self) -> &CompoundPoissonLaw {
        &self.law
    }

    pub fn start(&self) -> &LatticePoint {
        &self.start
    }

    pub(crate) fn view(&self) -> InfiniteView<'_> {
        InfiniteView {
            realization: &self.realization,
            spec: self.law.spec(),
            sigma: self.law.sigma(),
            start: &self.start,
        }
    }

    /// Adds one compound Poisson increment `-sum_l k_l a_l`, in cell
    /// coordinates.
    pub fn step<R: Rng + ?Sized>(&self, state: &LatticePoint, rng: &mut R) -> LatticePoint {
        let orders = self.law.sample_orders(rng);
        let mut cell = state.cell.clone();
        for (c, &k) in self.cells.iter().zip(&orders) {
            if k > 0 {
                for (x, ci) in cell.iter_mut().zip(c) {
                    *x -= k as i64 * ci;
                }
            }
        }
        LatticePoint::new(state.base_vertex, cell)
    }
}

pub fn step_infinite_range<R: Rng + ?Sized>(
    spec: &InfiniteRangeWalkSpec,
    state: &LatticePoint,
    rng: &mut R,
) -> LatticePoint {
    spec.step(state, rng)
}
