//! Graphs with unit-length edges and intrinsic point coordinates.
//!
//! The Y-graph is the built-in continuous workspace: a hub vertex `v0`
//! joined to three leaves, every edge parametrized from 0 at the hub.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl EdgeId {
    /// Next Y-graph edge, cyclically 1 -> 2 -> 3 -> 1.
    pub fn y_next(self) -> EdgeId {
        EdgeId(self.0 % 3 + 1)
    }

    /// Previous Y-graph edge, cyclically 1 -> 3 -> 2 -> 1.
    pub fn y_prev(self) -> EdgeId {
        EdgeId((self.0 + 1) % 3 + 1)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("value {0} outside [0, 1]")]
    ValueOutOfRange(f64),
    #[error("edge {0} is not a Y-graph edge")]
    NotYEdge(EdgeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("edge {0} is homoclinic (both endpoints at {1})")]
    Homoclinic(EdgeId, VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    /// Endpoint at parameter 0.
    pub tail: VertexId,
    /// Endpoint at parameter 1.
    pub head: VertexId,
}

impl Edge {
    pub fn touches(&self, v: VertexId) -> bool {
        self.tail == v || self.head == v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    index: BTreeMap<EdgeId, usize>,
    incident: BTreeMap<VertexId, Vec<EdgeId>>,
}

impl Graph {
    pub fn new(vertices: Vec<VertexId>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut incident: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
        for &v in &vertices {
            if incident.insert(v, Vec::new()).is_some() {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        let mut index = BTreeMap::new();
        for (k, e) in edges.iter().enumerate() {
            if index.insert(e.id, k).is_some() {
                return Err(GraphError::DuplicateEdge(e.id));
            }
            if e.tail == e.head {
                return Err(GraphError::Homoclinic(e.id, e.tail));
            }
            for v in [e.tail, e.head] {
                incident
                    .get_mut(&v)
                    .ok_or(GraphError::UnknownVertex(v))?
                    .push(e.id);
            }
        }
        Ok(Graph {
            vertices,
            edges,
            index,
            incident,
        })
    }

    /// Build from `(id, tail, head)` triples, creating vertices as needed.
    pub fn from_triples(triples: &[(usize, usize, usize)]) -> Result<Self, GraphError> {
        let vertices: BTreeSet<VertexId> = triples
            .iter()
            .flat_map(|&(_, a, b)| [VertexId(a), VertexId(b)])
            .collect();
        let edges = triples
            .iter()
            .map(|&(id, a, b)| Edge {
                id: EdgeId(id),
                tail: VertexId(a),
                head: VertexId(b),
            })
            .collect();
        Graph::new(vertices.into_iter().collect(), edges)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|e| e.id)
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge, GraphError> {
        self.index
            .get(&id)
            .map(|&k| &self.edges[k])
            .ok_or(GraphError::UnknownEdge(id))
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn incident(&self, v: VertexId) -> Result<&[EdgeId], GraphError> {
        self.incident
            .get(&v)
            .map(|v| v.as_slice())
            .ok_or(GraphError::UnknownVertex(v))
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.incident(v).map(|e| e.len())
    }

    pub fn shares_vertex(&self, a: EdgeId, b: EdgeId) -> Result<bool, GraphError> {
        Ok(self.shared_vertex(a, b)?.is_some())
    }

    /// A common endpoint of two edges. An edge shares its tail with itself.
    pub fn shared_vertex(&self, a: EdgeId, b: EdgeId) -> Result<Option<VertexId>, GraphError> {
        let ea = self.edge(a)?;
        let eb = self.edge(b)?;
        Ok([ea.tail, ea.head].into_iter().find(|&v| eb.touches(v)))
    }

    /// Hop counts from `src` to every vertex reachable from it.
    fn hops_from(&self, src: VertexId) -> BTreeMap<VertexId, usize> {
        let mut dist = BTreeMap::from([(src, 0)]);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            for &eid in &self.incident[&v] {
                let e = &self.edges[self.index[&eid]];
                let w = if e.tail == v { e.head } else { e.tail };
                if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(w) {
                    slot.insert(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Path-metric distance between points given as `(edge, t)` with `t`
    /// measured from the edge tail. `None` when disconnected.
    pub fn point_distance(
        &self,
        a: (EdgeId, f64),
        b: (EdgeId, f64),
    ) -> Result<Option<f64>, GraphError> {
        let ea = *self.edge(a.0)?;
        let eb = *self.edge(b.0)?;
        let mut best = if ea.id == eb.id {
            Some((a.1 - b.1).abs())
        } else {
            None
        };
        let ends_a = [(ea.tail, a.1), (ea.head, 1.0 - a.1)];
        let ends_b = [(eb.tail, b.1), (eb.head, 1.0 - b.1)];
        for (va, da) in ends_a {
            let hops = self.hops_from(va);
            for (vb, db) in ends_b {
                if let Some(&h) = hops.get(&vb) {
                    let d = da + h as f64 + db;
                    best = Some(best.map_or(d, |x: f64| x.min(d)));
                }
            }
        }
        Ok(best)
    }

    /// The Y-graph: hub `v0`, leaves `v1..v3`, edge `e_i` from `v0` to `v_i`.
    pub fn y_graph() -> Graph {
        Graph::from_triples(&[(1, 0, 1), (2, 0, 2), (3, 0, 3)]).expect("Y-graph is well formed")
    }
}

/// A point on the Y-graph: `edge` is `None` exactly at the hub.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub edge: Option<EdgeId>,
    pub value: f64,
}

impl GraphPoint {
    pub const CENTER: GraphPoint = GraphPoint {
        edge: None,
        value: 0.0,
    };

    /// A canonical point on Y-graph edge `edge` (1..=3).
    pub fn on(edge: usize, value: f64) -> Result<Self, GraphError> {
        if !(1..=3).contains(&edge) {
            return Err(GraphError::NotYEdge(EdgeId(edge)));
        }
        GraphPoint {
            edge: Some(EdgeId(edge)),
            value,
        }
        .canonicalize()
    }

    pub fn center() -> Self {
        Self::CENTER
    }

    pub fn is_center(&self) -> bool {
        self.edge.is_none()
    }

    /// Clear the edge at the hub; reject values outside `[0, 1]`.
    pub fn canonicalize(self) -> Result<Self, GraphError> {
        if !(0.0..=1.0).contains(&self.value) {
            return Err(GraphError::ValueOutOfRange(self.value));
        }
        if self.value == 0.0 {
            Ok(Self::CENTER)
        } else {
            Ok(self)
        }
    }
}

impl fmt::Display for GraphPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.edge {
            Some(e) => write!(f, "({}, {})", e.0, self.value),
            None => write!(f, "(center)"),
        }
    }
}

/// Y-graph path distance.
pub fn graph_distance(a: GraphPoint, b: GraphPoint) -> f64 {
    match (a.edge, b.edge) {
        (Some(i), Some(j)) if i == j => (a.value - b.value).abs(),
        _ => a.value + b.value,
    }
}

/// Signed rate along the outward unit tangent of `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity {
    pub edge: EdgeId,
    pub rate: f64,
}

impl Velocity {
    pub fn new(edge: EdgeId, rate: f64) -> Self {
        Velocity { edge, rate }
    }
}
