use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// One oriented edge of the base graph together with its reversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub origin: VertexId,
    pub terminus: VertexId,
    pub inverse: EdgeId,
}

/// Finite connected graph with an orientation-reversing involution on its
/// edges. This is the quotient of a crystal lattice by its translation group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBaseGraph", into = "RawBaseGraph")]
pub struct BaseGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct RawBaseGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl TryFrom<RawBaseGraph> for BaseGraph {
    type Error = Error;
    fn try_from(raw: RawBaseGraph) -> Result<Self> {
        BaseGraph::new(raw.vertices, raw.edges)
    }
}

impl From<BaseGraph> for RawBaseGraph {
    fn from(g: BaseGraph) -> Self {
        RawBaseGraph {
            vertices: g.vertices,
            edges: g.edges,
        }
    }
}

impl BaseGraph {
    /// Validates the edge records: ids are positions, the inverse map is a
    /// fixed-point-free involution swapping origin and terminus, every vertex
    /// has an edge and the graph is connected.
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let nv = vertices.len();
        if nv == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        for (i, name) in vertices.iter().enumerate() {
            if vertices[..i].contains(name) {
                return Err(Error::InvalidGraph(format!("duplicate vertex name {name:?}")));
            }
        }
        for (pos, e) in edges.iter().enumerate() {
            if e.id != pos {
                return Err(Error::InvalidGraph(format!(
                    "edge at position {pos} has id {}; ids must equal positions",
                    e.id
                )));
            }
            if e.origin >= nv || e.terminus >= nv {
                return Err(Error::InvalidGraph(format!("edge {pos} references an unknown vertex")));
            }
            if e.inverse >= edges.len() {
                return Err(Error::InvalidGraph(format!("edge {pos} has unknown inverse {}", e.inverse)));
            }
            if e.inverse == pos {
                return Err(Error::InvalidGraph(format!("edge {pos} is its own inverse")));
            }
            let inv = &edges[e.inverse];
            if inv.inverse != pos {
                return Err(Error::InvalidGraph(format!(
                    "inverse is not an involution: inverse(inverse({pos})) = {}",
                    inv.inverse
                )));
            }
            if inv.origin != e.terminus || inv.terminus != e.origin {
                return Err(Error::InvalidGraph(format!(
                    "edge {pos} and its inverse {} do not have swapped endpoints",
                    e.inverse
                )));
            }
        }
        let graph = BaseGraph { vertices, edges };
        for v in 0..nv {
            if graph.out_edges(v).next().is_none() {
                return Err(Error::InvalidGraph(format!(
                    "vertex {:?} has degree 0",
                    graph.vertices[v]
                )));
            }
        }
        let reached = graph.spanning_tree().parent_edge.iter().filter(|p| p.is_some()).count() + 1;
        if reached != nv {
            return Err(Error::InvalidGraph(format!(
                "graph is disconnected: {reached} of {nv} vertices reachable from {:?}",
                graph.vertices[0]
            )));
        }
        Ok(graph)
    }

    /// Builds a graph from unoriented edge pairs: pair `k` becomes edge `2k`
    /// (origin to terminus) and its inverse `2k + 1`.
    pub fn from_pairs(vertices: &[&str], pairs: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(2 * pairs.len());
        for (k, &(o, t)) in pairs.iter().enumerate() {
            edges.push(Edge { id: 2 * k, origin: o, terminus: t, inverse: 2 * k + 1 });
            edges.push(Edge { id: 2 * k + 1, origin: t, terminus: o, inverse: 2 * k });
        }
        BaseGraph::new(vertices.iter().map(|s| s.to_string()).collect(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|n| n == name)
    }

    /// Edges whose origin is `v` (the star of `v`).
    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.origin == v)
    }

    /// Breadth-first spanning tree rooted at vertex 0.
    pub fn spanning_tree(&self) -> SpanningTree {
        let n = self.vertices.len();
        let mut parent_edge: Vec<Option<EdgeId>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for e in self.out_edges(v) {
                if !seen[e.terminus] {
                    seen[e.terminus] = true;
                    parent_edge[e.terminus] = Some(e.id);
                    queue.push_back(e.terminus);
                }
            }
        }
        let mut in_tree = vec![false; self.edges.len()];
        for e in parent_edge.iter().flatten() {
            in_tree[*e] = true;
            in_tree[self.edges[*e].inverse] = true;
        }
        SpanningTree { parent_edge, in_tree }
    }

    /// Representatives (the smaller id of each pair) of edge pairs not in
    /// the spanning tree. There are exactly `betti(self)` of them.
    pub fn non_tree_edges(&self, tree: &SpanningTree) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.id < e.inverse && !tree.in_tree[e.id])
            .map(|e| e.id)
            .collect()
    }

    /// Fundamental cycle basis of the first homology: for each non-tree
    /// edge `e`, the closed path root -> o(e), e, t(e) -> root.
    pub fn fundamental_cycles(&self) -> Vec<Vec<EdgeId>> {
        let tree = self.spanning_tree();
        self.non_tree_edges(&tree)
            .into_iter()
            .map(|e| {
                let edge = &self.edges[e];
                let mut cycle = tree.path_from_root(self, edge.origin);
                cycle.push(e);
                let back = tree.path_from_root(self, edge.terminus);
                cycle.extend(back.iter().rev().map(|&f| self.edges[f].inverse));
                cycle
            })
            .collect()
    }

    /// Checks that consecutive edges compose: t(e_k) = o(e_{k+1}).
    pub fn check_composable(&self, path: &[EdgeId]) -> Result<()> {
        for (k, &e) in path.iter().enumerate() {
            if e >= self.edges.len() {
                return Err(Error::InvalidGraph(format!("unknown edge id {e}")));
            }
            if k > 0 {
                let prev = &self.edges[path[k - 1]];
                let next = &self.edges[e];
                if prev.terminus != next.origin {
                    return Err(Error::NonComposablePath {
                        position: k,
                        previous: prev.id,
                        next: next.id,
                        end: prev.terminus,
                        start: next.origin,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SpanningTree {
    /// Tree edge pointing into each vertex from its parent (`None` at the root).
    pub parent_edge: Vec<Option<EdgeId>>,
    /// Whether each oriented edge (or its inverse) belongs to the tree.
    pub in_tree: Vec<bool>,
}

impl SpanningTree {
    /// Tree path from the root to `v`.
    pub fn path_from_root(&self, graph: &BaseGraph, v: VertexId) -> Vec<EdgeId> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some(e) = self.parent_edge[cur] {
            path.push(e);
            cur = graph.edge(e).origin;
        }
        path.reverse();
        path
    }
}

/// First Betti number `|E|/2 - |V| + 1` of the base graph.
pub fn betti(base: &BaseGraph) -> usize {
    base.edge_count() / 2 + 1 - base.vertex_count()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn bouquet(k: usize) -> BaseGraph {
        let pairs: Vec<_> = (0..k).map(|_| (0, 0)).collect();
        BaseGraph::from_pairs(&["x"], &pairs).unwrap()
    }

    #[test]
    fn betti_of_bouquets_and_hexagonal_quotient() {
        assert_eq!(betti(&bouquet(1)), 1);
        assert_eq!(betti(&bouquet(2)), 2);
        assert_eq!(betti(&bouquet(3)), 3);
        let hex = BaseGraph::from_pairs(&["x", "y"], &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(betti(&hex), 2);
    }

    #[test]
    fn rejects_broken_involution() {
        let edges = vec![
            Edge { id: 0, origin: 0, terminus: 0, inverse: 0 },
        ];
        assert!(matches!(BaseGraph::new(vec!["x".into()], edges), Err(Error::InvalidGraph(_))));

        let edges = vec![
            Edge { id: 0, origin: 0, terminus: 1, inverse: 1 },
            Edge { id: 1, origin: 0, terminus: 1, inverse: 0 },
        ];
        let err = BaseGraph::new(vec!["x".into(), "y".into()], edges).unwrap_err();
        assert!(err.to_string().contains("swapped endpoints"));
    }

    #[test]
    fn rejects_disconnected_and_isolated() {
        let err = BaseGraph::from_pairs(&["x", "y"], &[(0, 0), (1, 1)]).unwrap_err();
        assert!(err.to_string().contains("disconnected"));
        let err = BaseGraph::from_pairs(&["x", "y"], &[(0, 0)]).unwrap_err();
        assert!(err.to_string().contains("degree 0"));
    }

    #[test]
    fn fundamental_cycles_are_closed() {
        let g = BaseGraph::from_pairs(&["a", "b", "c"], &[(0, 1), (1, 2), (2, 0), (0, 0)]).unwrap();
        let cycles = g.fundamental_cycles();
        assert_eq!(cycles.len(), betti(&g));
        for c in cycles {
            g.check_composable(&c).unwrap();
            assert_eq!(g.edge(c[0]).origin, g.edge(*c.last().unwrap()).terminus);
        }
    }

    #[test]
    fn non_composable_path_is_reported() {
        let g = BaseGraph::from_pairs(&["x", "y"], &[(0, 1), (0, 1)]).unwrap();
        // 0: x->y, 2: x->y; cannot follow one with the other.
        let err = g.check_composable(&[0, 2]).unwrap_err();
        assert!(matches!(err, Error::NonComposablePath { position: 1, .. }));
        g.check_composable(&[0, 3]).unwrap();
    }
}
