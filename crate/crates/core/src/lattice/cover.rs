use serde::{Deserialize, Serialize};

use super::graph::{betti, BaseGraph, EdgeId};
use crate::error::{Error, Result};
use crate::linalg;

/// A crystal lattice stored as a voltage graph: every oriented base edge
/// carries the translation (an element of `Z^d`) picked up when a lift of
/// the edge is traversed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLattice", into = "RawLattice")]
pub struct CrystalLattice {
    base: BaseGraph,
    dim: usize,
    voltage: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct RawLattice {
    base: BaseGraph,
    dim: usize,
    voltage: Vec<Vec<i64>>,
}

impl TryFrom<RawLattice> for CrystalLattice {
    type Error = Error;
    fn try_from(raw: RawLattice) -> Result<Self> {
        CrystalLattice::new(raw.base, raw.dim, raw.voltage)
    }
}

impl From<CrystalLattice> for RawLattice {
    fn from(l: CrystalLattice) -> Self {
        RawLattice { base: l.base, dim: l.dim, voltage: l.voltage }
    }
}

impl CrystalLattice {
    /// Checks voltage antisymmetry and that the cycle voltages span a rank-`dim`
    /// subgroup, i.e. the cover is connected with translation group `Z^dim`.
    pub fn new(base: BaseGraph, dim: usize, voltage: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidLattice("dimension must be positive".into()));
        }
        if voltage.len() != base.edge_count() {
            return Err(Error::InvalidLattice(format!(
                "{} voltages for {} oriented edges",
                voltage.len(),
                base.edge_count()
            )));
        }
        for (e, v) in voltage.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidLattice(format!(
                    "voltage of edge {e} has length {}, expected {dim}",
                    v.len()
                )));
            }
            let inv = &voltage[base.edge(e).inverse];
            if v.iter().zip(inv).any(|(a, b)| a + b != 0) {
                return Err(Error::InvalidLattice(format!(
                    "voltage of edge {e} is not the negative of its inverse's voltage"
                )));
            }
        }
        let lattice = CrystalLattice { base, dim, voltage };
        let cycle_voltages: Vec<Vec<f64>> = lattice
            .base
            .fundamental_cycles()
            .iter()
            .map(|c| lattice.path_voltage(c).iter().map(|&x| x as f64).collect())
            .collect();
        let rank = linalg::rank(&cycle_voltages, dim, 1e-10);
        if rank != dim {
            return Err(Error::InvalidLattice(format!(
                "cycle voltages span rank {rank} < dim {dim}; the cover would be disconnected"
            )));
        }
        Ok(lattice)
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn voltage(&self, e: EdgeId) -> &[i64] {
        &self.voltage[e]
    }

    /// Total translation picked up along an edge path.
    pub fn path_voltage(&self, path: &[EdgeId]) -> Vec<i64> {
        let mut total = vec![0; self.dim];
        for &e in path {
            for (t, v) in total.iter_mut().zip(&self.voltage[e]) {
                *t += v;
            }
        }
        total
    }
}

/// True iff the translation group is the full first homology of the base,
/// i.e. `dim = b_1`.
pub fn is_maximal_abelian(lattice: &CrystalLattice) -> bool {
    lattice.dim() == betti(lattice.base())
}

/// The maximal abelian cover: tree edges carry zero voltage and the j-th
/// non-tree edge pair carries `+/- e_j` in `Z^{b_1}`.
pub fn maximal_abelian_cover(base: &BaseGraph) -> Result<CrystalLattice> {
    let tree = base.spanning_tree();
    let reached = tree.parent_edge.iter().filter(|p| p.is_some()).count() + 1;
    if reached != base.vertex_count() {
        return Err(Error::InvalidGraph("maximal abelian cover needs a connected base".into()));
    }
    let b1 = betti(base);
    if b1 == 0 {
        return Err(Error::InvalidLattice(
            "base graph is a tree (b_1 = 0); its maximal abelian cover is finite, not a crystal lattice".into(),
        ));
    }
    let mut voltage = vec![vec![0i64; b1]; base.edge_count()];
    for (j, e) in base.non_tree_edges(&tree).into_iter().enumerate() {
        voltage[e][j] = 1;
        voltage[base.edge(e).inverse][j] = -1;
    }
    CrystalLattice::new(base.clone(), b1, voltage)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antisymmetry_is_enforced() {
        let base = BaseGraph::from_pairs(&["x"], &[(0, 0)]).unwrap();
        let err = CrystalLattice::new(base.clone(), 1, vec![vec![1], vec![1]]).unwrap_err();
        assert!(err.to_string().contains("negative"));
        CrystalLattice::new(base, 1, vec![vec![1], vec![-1]]).unwrap();
    }

    #[test]
    fn disconnected_cover_is_rejected() {
        let base = BaseGraph::from_pairs(&["x"], &[(0, 0)]).unwrap();
        let err = CrystalLattice::new(base, 2, vec![vec![1, 0], vec![-1, 0]]).unwrap_err();
        assert!(err.to_string().contains("rank 1"));
    }

    #[test]
    fn maximal_cover_of_bouquets() {
        let line = maximal_abelian_cover(&BaseGraph::from_pairs(&["x"], &[(0, 0)]).unwrap()).unwrap();
        assert_eq!(line.dim(), 1);
        assert_eq!(line.voltage(0), &[1]);
        assert_eq!(line.voltage(1), &[-1]);
        assert!(is_maximal_abelian(&line));

        let square =
            maximal_abelian_cover(&BaseGraph::from_pairs(&["x"], &[(0, 0), (0, 0)]).unwrap()).unwrap();
        assert_eq!(square.dim(), 2);
        assert_eq!(square.voltage(0), &[1, 0]);
        assert_eq!(square.voltage(2), &[0, 1]);
    }

    #[test]
    fn maximal_cover_of_hexagonal_quotient() {
        let base = BaseGraph::from_pairs(&["x", "y"], &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let hex = maximal_abelian_cover(&base).unwrap();
        assert_eq!(hex.dim(), 2);
        assert!(is_maximal_abelian(&hex));
        // Each fundamental cycle maps to a distinct unit vector.
        let cycles = base.fundamental_cycles();
        let vols: Vec<_> = cycles.iter().map(|c| hex.path_voltage(c)).collect();
        assert_eq!(vols, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn tree_base_has_no_crystal_cover() {
        let base = BaseGraph::from_pairs(&["x", "y"], &[(0, 1)]).unwrap();
        assert!(maximal_abelian_cover(&base).is_err());
    }
}
