//! Tripartite attributed multiplex heterogeneous graph: Group, User, and Item
//! nodes with Group-User and Item-User relations, each relation stored as its
//! own CSR adjacency over the full node index space.
//!
//! The graph is immutable after [`build_graph`]; normalized adjacencies add
//! self loops per relation and are symmetric to the bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{Dense, DenseError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeType {
    Group,
    User,
    Item,
}

impl NodeType {
    pub const ALL: [NodeType; 3] = [NodeType::Group, NodeType::User, NodeType::Item];

    pub fn index(self) -> usize {
        match self {
            NodeType::Group => 0,
            NodeType::User => 1,
            NodeType::Item => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeType::Group => "group",
            NodeType::User => "user",
            NodeType::Item => "item",
        }
    }

    pub fn parse(s: &str) -> Option<NodeType> {
        match s {
            "group" => Some(NodeType::Group),
            "user" => Some(NodeType::User),
            "item" => Some(NodeType::Item),
            _ => None,
        }
    }
}

/// Relations of the multiplex graph. The order of `ALL` is the global
/// edge-type order used for stacking and fusion everywhere in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeType {
    GroupUser,
    ItemUser,
}

impl EdgeType {
    pub const ALL: [EdgeType; 2] = [EdgeType::GroupUser, EdgeType::ItemUser];
    pub const COUNT: usize = 2;

    pub fn index(self) -> usize {
        match self {
            EdgeType::GroupUser => 0,
            EdgeType::ItemUser => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EdgeType::GroupUser => "group_user",
            EdgeType::ItemUser => "item_user",
        }
    }

    pub fn parse(s: &str) -> Option<EdgeType> {
        match s {
            "group_user" => Some(EdgeType::GroupUser),
            "item_user" => Some(EdgeType::ItemUser),
            _ => None,
        }
    }

    /// The unordered endpoint-type pair this relation connects.
    pub fn endpoint_types(self) -> (NodeType, NodeType) {
        match self {
            EdgeType::GroupUser => (NodeType::Group, NodeType::User),
            EdgeType::ItemUser => (NodeType::Item, NodeType::User),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypedEdge {
    pub src: u32,
    pub dst: u32,
    pub edge_type: EdgeType,
    pub timestamp: Option<i64>,
}

impl TypedEdge {
    pub fn new(src: u32, dst: u32, edge_type: EdgeType) -> Self {
        TypedEdge { src, dst, edge_type, timestamp: None }
    }

    pub fn with_timestamp(src: u32, dst: u32, edge_type: EdgeType, ts: i64) -> Self {
        TypedEdge { src, dst, edge_type, timestamp: Some(ts) }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateNodeId(u32),
    #[error("node ids not dense: expected id {expected}, found {found}")]
    NonDenseNodeIds { expected: u32, found: u32 },
    #[error("edge ({src},{dst}) endpoint {node} out of range for {n} nodes")]
    EndpointOutOfRange { src: u32, dst: u32, node: u32, n: usize },
    #[error("{edge_type:?} endpoint of type {offending:?} (edge {src}-{dst})")]
    EndpointTypeViolation { edge_type: EdgeType, src: u32, dst: u32, offending: NodeType },
}

/// Compressed sparse rows over the full node index space, column indices
/// sorted ascending within each row.
#[derive(Debug, Clone, PartialEq)]
struct Csr {
    indptr: Vec<usize>,
    indices: Vec<u32>,
}

impl Csr {
    /// Builds from directed entries; `pairs` must be sorted and deduplicated.
    fn from_sorted_pairs(n: usize, pairs: &[(u32, u32)]) -> Csr {
        let mut indptr = vec![0usize; n + 1];
        for &(u, _) in pairs {
            indptr[u as usize + 1] += 1;
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        let indices = pairs.iter().map(|&(_, v)| v).collect();
        Csr { indptr, indices }
    }

    fn row(&self, i: usize) -> &[u32] {
        &self.indices[self.indptr[i]..self.indptr[i + 1]]
    }

    fn degree(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }
}

/// Immutable tripartite multiplex graph.
#[derive(Debug, Clone)]
pub struct HetGraph {
    node_types: Vec<NodeType>,
    type_counts: [usize; 3],
    /// Canonical undirected edge lists per relation: (min, max, timestamp),
    /// sorted, deduplicated (earliest timestamp kept on duplicates).
    edges: [Vec<(u32, u32, Option<i64>)>; 2],
    adj: [Csr; 2],
}

/// Validates node/edge lists and assembles the per-relation CSR adjacencies.
///
/// Node ids must be dense in [0, n). Edges are undirected; duplicates collapse
/// to one stored edge. An edge whose endpoints do not match its relation's
/// type pair is rejected naming the offending endpoint type.
pub fn build_graph(nodes: &[(u32, NodeType)], edges: &[TypedEdge]) -> Result<HetGraph, GraphError> {
    let n = nodes.len();
    let mut node_types = vec![NodeType::User; n];
    let mut seen = vec![false; n];
    for &(id, ty) in nodes {
        let idx = id as usize;
        if idx >= n {
            return Err(GraphError::NonDenseNodeIds { expected: n as u32 - 1, found: id });
        }
        if seen[idx] {
            return Err(GraphError::DuplicateNodeId(id));
        }
        seen[idx] = true;
        node_types[idx] = ty;
    }
    let mut type_counts = [0usize; 3];
    for t in &node_types {
        type_counts[t.index()] += 1;
    }

    let mut per_type: [Vec<(u32, u32, Option<i64>)>; 2] = [Vec::new(), Vec::new()];
    for e in edges {
        for &node in &[e.src, e.dst] {
            if node as usize >= n {
                return Err(GraphError::EndpointOutOfRange { src: e.src, dst: e.dst, node, n });
            }
        }
        let (ta, tb) = e.edge_type.endpoint_types();
        let (sa, sb) = (node_types[e.src as usize], node_types[e.dst as usize]);
        let ok = (sa == ta && sb == tb) || (sa == tb && sb == ta);
        if !ok {
            let offending = if sa != ta && sa != tb { sa } else { sb };
            return Err(GraphError::EndpointTypeViolation {
                edge_type: e.edge_type,
                src: e.src,
                dst: e.dst,
                offending,
            });
        }
        let (lo, hi) = if e.src <= e.dst { (e.src, e.dst) } else { (e.dst, e.src) };
        per_type[e.edge_type.index()].push((lo, hi, e.timestamp));
    }

    let mut adjs = Vec::with_capacity(2);
    for list in per_type.iter_mut() {
        // earliest timestamp wins on duplicates; None sorts after Some
        list.sort_by(|a, b| (a.0, a.1, a.2.is_none(), a.2).cmp(&(b.0, b.1, b.2.is_none(), b.2)));
        list.dedup_by_key(|e| (e.0, e.1));
        let mut directed: Vec<(u32, u32)> = Vec::with_capacity(list.len() * 2);
        for &(u, v, _) in list.iter() {
            directed.push((u, v));
            directed.push((v, u));
        }
        directed.sort_unstable();
        adjs.push(Csr::from_sorted_pairs(n, &directed));
    }
    let adj_item_user = adjs.pop().unwrap();
    let adj_group_user = adjs.pop().unwrap();

    Ok(HetGraph {
        node_types,
        type_counts,
        edges: per_type,
        adj: [adj_group_user, adj_item_user],
    })
}

impl HetGraph {
    pub fn node_count(&self) -> usize {
        self.node_types.len()
    }

    pub fn node_type(&self, v: usize) -> NodeType {
        self.node_types[v]
    }

    pub fn node_types(&self) -> &[NodeType] {
        &self.node_types
    }

    pub fn type_count(&self, t: NodeType) -> usize {
        self.type_counts[t.index()]
    }

    pub fn nodes_of_type(&self, t: NodeType) -> Vec<usize> {
        (0..self.node_count()).filter(|&v| self.node_types[v] == t).collect()
    }

    /// Degree of `v` in relation `r`, self loop not counted.
    pub fn degree(&self, r: EdgeType, v: usize) -> usize {
        self.adj[r.index()].degree(v)
    }

    pub fn neighbors(&self, r: EdgeType, v: usize) -> &[u32] {
        self.adj[r.index()].row(v)
    }

    pub fn has_edge(&self, r: EdgeType, u: usize, v: usize) -> bool {
        self.adj[r.index()].row(u).binary_search(&(v as u32)).is_ok()
    }

    /// Canonical undirected edges of relation `r`: (min, max, timestamp).
    pub fn edges(&self, r: EdgeType) -> &[(u32, u32, Option<i64>)] {
        &self.edges[r.index()]
    }

    pub fn edge_count(&self, r: EdgeType) -> usize {
        self.edges[r.index()].len()
    }
}

/// Symmetrically normalized adjacency of one relation, with self loops:
/// entries are a_uv / sqrt(d_u * d_v) where a is the relation adjacency plus
/// the identity and d its degrees. Isolated nodes keep a unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct NormAdj<T> {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<T>,
}

/// Builds the normalized adjacency of relation `r`. Total on valid graphs.
pub fn normalized_adjacency<T: Scalar>(graph: &HetGraph, r: EdgeType) -> NormAdj<T> {
    let n = graph.node_count();
    // d with self loop; sqrt(d_u * d_v) is bitwise commutative, so both
    // directions of an edge get the exact same value.
    let deg: Vec<T> = (0..n).map(|v| T::from_f64_c((graph.degree(r, v) + 1) as f64)).collect();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    indptr.push(0usize);
    for u in 0..n {
        let neigh = graph.neighbors(r, u);
        // merge the self loop into the sorted neighbor run
        let mut self_emitted = false;
        for &v in neigh {
            if !self_emitted && (v as usize) > u {
                indices.push(u as u32);
                values.push((deg[u] * deg[u]).sqrt().recip());
                self_emitted = true;
            }
            indices.push(v);
            values.push((deg[u] * deg[v as usize]).sqrt().recip());
        }
        if !self_emitted {
            indices.push(u as u32);
            values.push((deg[u] * deg[u]).sqrt().recip());
        }
        indptr.push(indices.len());
    }
    NormAdj { n, indptr, indices, values }
}

impl<T: Scalar> NormAdj<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        match self.indices[lo..hi].binary_search(&(j as u32)) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => T::zero(),
        }
    }

    pub fn row(&self, i: usize) -> (&[u32], &[T]) {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    /// CSR x dense product; per output entry the sum runs over column
    /// indices in ascending order, so results are reproducible bit-for-bit.
    pub fn spmm(&self, m: &Dense<T>) -> Result<Dense<T>, DenseError> {
        if m.rows() != self.n {
            return Err(DenseError::ShapeMismatch {
                context: "spmm",
                left_rows: self.n,
                left_cols: self.n,
                right_rows: m.rows(),
                right_cols: m.cols(),
            });
        }
        let mut out = Dense::zeros(self.n, m.cols());
        for i in 0..self.n {
            let lo = self.indptr[i];
            let hi = self.indptr[i + 1];
            let out_row = out.row_mut(i);
            for p in lo..hi {
                let a = self.values[p];
                let src = m.row(self.indices[p] as usize);
                for (o, &x) in out_row.iter_mut().zip(src.iter()) {
                    *o += a * x;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Dense<T> {
        let mut out = Dense::zeros(self.n, self.n);
        for i in 0..self.n {
            for p in self.indptr[i]..self.indptr[i + 1] {
                out.set(i, self.indices[p] as usize, self.values[p]);
            }
        }
        out
    }

    /// Power-iteration estimate of the spectral radius.
    pub fn spectral_radius_estimate(&self, iters: usize) -> T {
        if self.n == 0 {
            return T::zero();
        }
        let inv = T::from_f64_c(1.0 / (self.n as f64).sqrt());
        let mut x = Dense::from_vec(self.n, 1, vec![inv; self.n]).expect("finite start vector");
        let mut lambda = T::zero();
        for _ in 0..iters {
            let y = self.spmm(&x).expect("square by construction");
            let norm = y.data().iter().map(|&v| v * v).sum::<T>().sqrt();
            if norm == T::zero() {
                return T::zero();
            }
            // Rayleigh quotient with the normalized previous iterate
            lambda = x.data().iter().zip(y.data().iter()).map(|(&a, &b)| a * b).sum::<T>();
            x = y.scale(norm.recip());
        }
        lambda.abs()
    }
}
