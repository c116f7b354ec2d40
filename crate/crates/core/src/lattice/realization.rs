use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::cover::CrystalLattice;
use super::graph::{EdgeId, VertexId};
use crate::error::{Error, Result};
use crate::linalg;

/// Default tolerance for non-degeneracy checks and point location.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default path-length bound for jump-set witness enumeration.
pub const DEFAULT_MAX_PATH_LEN: usize = 6;

/// A vertex of the infinite lattice: a base vertex lifted into the cell
/// indexed by a translation in `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub base_vertex: VertexId,
    pub cell: Vec<i64>,
}

impl LatticePoint {
    pub fn new(base_vertex: VertexId, cell: Vec<i64>) -> Self {
        LatticePoint { base_vertex, cell }
    }

    pub fn origin(base_vertex: VertexId, dim: usize) -> Self {
        LatticePoint { base_vertex, cell: vec![0; dim] }
    }

    /// The point translated by `gamma`.
    pub fn translated(&self, gamma: &[i64]) -> Self {
        LatticePoint {
            base_vertex: self.base_vertex,
            cell: self.cell.iter().zip(gamma).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Periodic realization: positions of one lift of every base vertex plus the
/// linear identification of the translation group with a lattice in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRealization", into = "RawRealization")]
pub struct PeriodicRealization {
    lattice: CrystalLattice,
    offsets: Vec<Vec<f64>>,
    /// Columns are the images of the generators of `Z^d`.
    basis: DMatrix<f64>,
    basis_inv: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawRealization {
    lattice: CrystalLattice,
    offsets: Vec<Vec<f64>>,
    generators: Vec<Vec<f64>>,
}

impl TryFrom<RawRealization> for PeriodicRealization {
    type Error = Error;
    fn try_from(raw: RawRealization) -> Result<Self> {
        PeriodicRealization::new(raw.lattice, raw.offsets, raw.generators)
    }
}

impl From<PeriodicRealization> for RawRealization {
    fn from(r: PeriodicRealization) -> Self {
        let generators = (0..r.dim()).map(|j| r.generator(j)).collect();
        RawRealization { lattice: r.lattice, offsets: r.offsets, generators }
    }
}

/// One way a realization can fail to be non-degenerate.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Two base vertices realize to the same point modulo the period lattice.
    CoincidentVertices { first: VertexId, second: VertexId },
    /// An edge with zero displacement.
    ZeroEdge { edge: EdgeId },
    /// Two edges of one star leave in the same direction.
    ParallelEdges { vertex: VertexId, first: EdgeId, second: EdgeId },
}

/// A vector of the jump set together with a shortest base path realizing it.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpWitness {
    pub vector: Vec<f64>,
    pub endpoint: LatticePoint,
    pub path: Vec<EdgeId>,
}

impl PeriodicRealization {
    /// `offsets[v]` is the position of the lift of `v` in cell 0;
    /// `generators[j]` is the image of the j-th unit translation.
    pub fn new(lattice: CrystalLattice, offsets: Vec<Vec<f64>>, generators: Vec<Vec<f64>>) -> Result<Self> {
        let d = lattice.dim();
        if offsets.len() != lattice.base().vertex_count() {
            return Err(Error::InvalidRealization(format!(
                "{} offsets for {} base vertices",
                offsets.len(),
                lattice.base().vertex_count()
            )));
        }
        if offsets.iter().any(|o| o.len() != d) {
            return Err(Error::InvalidRealization(format!("every offset must have length {d}")));
        }
        if generators.len() != d || generators.iter().any(|g| g.len() != d) {
            return Err(Error::InvalidRealization(format!("basis must be {d} generators of length {d}")));
        }
        if offsets.iter().flatten().chain(generators.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidRealization("non-finite coordinate".into()));
        }
        let basis = DMatrix::from_fn(d, d, |i, j| generators[j][i]);
        let basis_inv = basis
            .clone()
            .try_inverse()
            .filter(|inv| inv.iter().all(|x| x.is_finite()))
            .ok_or_else(|| Error::InvalidRealization("basis matrix is singular".into()))?;
        Ok(PeriodicRealization { lattice, offsets, basis, basis_inv })
    }

    /// Realization with the identity basis.
    pub fn with_identity_basis(lattice: CrystalLattice, offsets: Vec<Vec<f64>>) -> Result<Self> {
        let d = lattice.dim();
        let generators = (0..d)
            .map(|j| (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(lattice, offsets, generators)
    }

    pub fn lattice(&self) -> &CrystalLattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn offset(&self, v: VertexId) -> &[f64] {
        &self.offsets[v]
    }

    pub fn generator(&self, j: usize) -> Vec<f64> {
        self.basis.column(j).iter().copied().collect()
    }

    /// `basis * gamma`.
    pub fn translation(&self, gamma: &[i64]) -> Vec<f64> {
        let g = DVector::from_iterator(gamma.len(), gamma.iter().map(|&x| x as f64));
        (&self.basis * g).iter().copied().collect()
    }

    /// Coordinates of a vector in the generator basis.
    pub fn to_cell_coordinates(&self, v: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(v);
        (&self.basis_inv * x).iter().copied().collect()
    }

    /// `dPhi(e) = Phi(t(e)) - Phi(o(e))` for the lift of `e` starting in cell 0.
    pub fn edge_displacement(&self, e: EdgeId) -> Vec<f64> {
        let edge = self.lattice.base().edge(e);
        let shift = self.translation(self.lattice.voltage(e));
        let head = linalg::add(&self.offsets[edge.terminus], &shift);
        linalg::sub(&head, &self.offsets[edge.origin])
    }

    pub fn realize(&self, p: &LatticePoint) -> Vec<f64> {
        linalg::add(&self.offsets[p.base_vertex], &self.translation(&p.cell))
    }

    /// The lattice vertex realized at `v` (within `tol`), if any.
    pub fn locate(&self, v: &[f64], tol: f64) -> Result<Option<LatticePoint>> {
        if v.len() != self.dim() {
            return Err(Error::InvalidRealization(format!(
                "point has dimension {}, lattice has {}",
                v.len(),
                self.dim()
            )));
        }
        let mut found: Vec<LatticePoint> = Vec::new();
        for x in 0..self.offsets.len() {
            let coords = self.to_cell_coordinates(&linalg::sub(v, &self.offsets[x]));
            let cell: Vec<i64> = coords.iter().map(|c| c.round() as i64).collect();
            let p = LatticePoint::new(x, cell);
            if linalg::norm(&linalg::sub(&self.realize(&p), v)) <= tol {
                found.push(p);
            }
        }
        match found.len() {
            0 => Ok(None),
            1 => Ok(found.pop()),
            count => Err(Error::AmbiguousLocation { count, tol }),
        }
    }

    /// Lattice vertex reached from `from` by adding the displacement `v`.
    pub fn locate_from(&self, from: &LatticePoint, v: &[f64], tol: f64) -> Result<Option<LatticePoint>> {
        self.locate(&linalg::add(&self.realize(from), v), tol)
    }

    /// Lists every non-degeneracy violation. Periodicity reduces the check
    /// to the base vertices and their stars.
    pub fn check_nondegenerate(&self, tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.offsets.len();
        for a in 0..n {
            for b in a + 1..n {
                let coords = self.to_cell_coordinates(&linalg::sub(&self.offsets[b], &self.offsets[a]));
                let frac: Vec<f64> = coords.iter().map(|c| c - c.round()).collect();
                let residual = self.basis.clone() * DVector::from_vec(frac);
                if residual.norm() <= tol {
                    out.push(Violation::CoincidentVertices { first: a, second: b });
                }
            }
        }
        let base = self.lattice.base();
        let displacements: Vec<Vec<f64>> = (0..base.edge_count()).map(|e| self.edge_displacement(e)).collect();
        for (e, d) in displacements.iter().enumerate() {
            if linalg::norm(d) <= tol {
                out.push(Violation::ZeroEdge { edge: e });
            }
        }
        for v in 0..n {
            let star: Vec<EdgeId> = base
                .out_edges(v)
                .map(|e| e.id)
                .filter(|&e| linalg::norm(&displacements[e]) > tol)
                .collect();
            for (i, &e) in star.iter().enumerate() {
                for &f in &star[i + 1..] {
                    let ue = linalg::scale(&displacements[e], 1.0 / linalg::norm(&displacements[e]));
                    let uf = linalg::scale(&displacements[f], 1.0 / linalg::norm(&displacements[f]));
                    if linalg::norm(&linalg::sub(&ue, &uf)) <= tol {
                        out.push(Violation::ParallelEdges { vertex: v, first: e, second: f });
                    }
                }
            }
        }
        out
    }

    /// Sum of edge displacements along a composable base path.
    pub fn path_displacement(&self, path: &[EdgeId]) -> Result<Vec<f64>> {
        self.lattice.base().check_composable(path)?;
        let mut total = vec![0.0; self.dim()];
        for &e in path {
            for (t, x) in total.iter_mut().zip(self.edge_displacement(e)) {
                *t += x;
            }
        }
        Ok(total)
    }

    /// Displacements of every lattice vertex reachable from a lift of `x`
    /// by a path of length `1..=max_len`, each with a shortest witness path.
    /// This is a finite window onto the jump set at `x`.
    pub fn jump_witnesses(&self, x: VertexId, max_len: usize) -> Vec<JumpWitness> {
        let start = LatticePoint::origin(x, self.dim());
        let base = self.lattice.base();
        let mut paths: HashMap<LatticePoint, Vec<EdgeId>> = HashMap::new();
        let mut order = Vec::new();
        let mut frontier = VecDeque::from([(start.clone(), Vec::<EdgeId>::new())]);
        while let Some((p, path)) = frontier.pop_front() {
            if path.len() == max_len {
                continue;
            }
            for e in base.out_edges(p.base_vertex) {
                let q = LatticePoint {
                    base_vertex: e.terminus,
                    cell: p.translated(self.lattice.voltage(e.id)).cell,
                };
                if paths.contains_key(&q) {
                    continue;
                }
                let mut next = path.clone();
                next.push(e.id);
                paths.insert(q.clone(), next.clone());
                order.push(q.clone());
                frontier.push_back((q, next));
            }
        }
        let origin = self.realize(&start);
        order
            .into_iter()
            .map(|q| JumpWitness {
                vector: linalg::sub(&self.realize(&q), &origin),
                path: paths.remove(&q).unwrap_or_default(),
                endpoint: q,
            })
            .collect()
    }

    /// A witness showing that `c` lies in the jump set at `x`, i.e. `c` is a
    /// real multiple of some path displacement of length at most `max_len`.
    /// The zero vector is witnessed by a backtracking path.
    pub fn jump_witness_for(&self, x: VertexId, c: &[f64], max_len: usize, tol: f64) -> Option<JumpWitness> {
        let cn = linalg::norm(c);
        self.jump_witnesses(x, max_len.max(2)).into_iter().find(|w| {
            let wn = linalg::norm(&w.vector);
            if cn <= tol {
                return wn <= tol;
            }
            if wn <= tol {
                return false;
            }
            let k = linalg::dot(c, &w.vector) / (wn * wn);
            linalg::norm(&linalg::sub(c, &linalg::scale(&w.vector, k))) <= tol * cn.max(1.0)
        })
    }
}
