//! Finite graphs, induced subgraphs and the non-clique vertex set, plus the
//! symbolic graphs used by the classifier (a finite explicit part together
//! with clique classes of symbolically many universally adjacent vertices).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cardinal::SymbolicCardinal;

/// Vertex names are opaque strings; the order in which they were listed at
/// construction time is the total order used for all downstream tie-breaking.
pub type VertexId = String;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("reflexive edge on `{0}`")]
    ReflexiveEdge(String),
    #[error("clique class id `{0}` collides with another vertex or class id")]
    DuplicateClassId(String),
    #[error("clique class `{0}` must have multiplicity at least 1")]
    EmptyClass(String),
}

/// A finite graph with an ordered vertex list and an irreflexive, symmetric
/// edge relation stored as unordered index pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<VertexId>,
    index: BTreeMap<VertexId, usize>,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new<I, E>(vertices: I, edges: E) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String)>,
    {
        let vertices: Vec<VertexId> = vertices.into_iter().collect();
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            let ia = *index.get(&a).ok_or(GraphError::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or(GraphError::UnknownVertex(b.clone()))?;
            if ia == ib {
                return Err(GraphError::ReflexiveEdge(a));
            }
            set.insert((ia.min(ib), ia.max(ib)));
        }
        Ok(Graph { vertices, index, edges: set })
    }

    pub fn empty() -> Self {
        Graph { vertices: Vec::new(), index: BTreeMap::new(), edges: BTreeSet::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn vertex_id(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacent_ids(&self, a: &str, b: &str) -> Result<bool, GraphError> {
        let ia = self.vertex_index(a).ok_or_else(|| GraphError::UnknownVertex(a.into()))?;
        let ib = self.vertex_index(b).ok_or_else(|| GraphError::UnknownVertex(b.into()))?;
        Ok(self.adjacent(ia, ib))
    }

    /// Induced subgraph on `keep`, preserving the original vertex order.
    pub fn induced_subgraph<'a, I>(&self, keep: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut mask = vec![false; self.vertices.len()];
        for id in keep {
            let i = self.vertex_index(id).ok_or_else(|| GraphError::UnknownVertex(id.into()))?;
            mask[i] = true;
        }
        let vertices: Vec<VertexId> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| mask[*i])
            .map(|(_, v)| v.clone())
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| mask[*a] && mask[*b])
            .map(|&(a, b)| (self.vertices[a].clone(), self.vertices[b].clone()));
        Graph::new(vertices.clone(), edges)
    }

    /// Vertices that fail to be adjacent to at least one other vertex.
    pub fn non_clique_set(&self) -> Vec<VertexId> {
        let n = self.vertices.len();
        (0..n)
            .filter(|&a| (0..n).any(|b| b != a && !self.adjacent(a, b)))
            .map(|a| self.vertices[a].clone())
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.vertices.len();
        self.edges.len() == n * n.saturating_sub(1) / 2
    }

    /// Whether the graph splits into two nonempty parts with no edges across.
    pub fn is_disconnected(&self) -> bool {
        let n = self.vertices.len();
        if n < 2 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if !seen[b] && self.adjacent(a, b) {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.iter().any(|s| !s)
    }
}

/// One clique class of a [`SymbolicGraph`]: `multiplicity` many vertices,
/// pairwise adjacent and adjacent to every other vertex of the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueClass {
    pub id: String,
    pub multiplicity: SymbolicCardinal,
}

/// A graph with a finite explicit part and symbolically sized clique classes.
///
/// Class vertices are universally adjacent by construction, so all
/// non-adjacency in the graph lives inside the explicit part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicGraph {
    pub explicit: Graph,
    pub classes: Vec<CliqueClass>,
}

impl SymbolicGraph {
    pub fn new(explicit: Graph, classes: Vec<CliqueClass>) -> Result<Self, GraphError> {
        let mut ids: BTreeSet<&str> = explicit.vertices().iter().map(|s| s.as_str()).collect();
        for c in &classes {
            if c.multiplicity < SymbolicCardinal::Fin(1) {
                return Err(GraphError::EmptyClass(c.id.clone()));
            }
            if !ids.insert(&c.id) {
                return Err(GraphError::DuplicateClassId(c.id.clone()));
            }
        }
        Ok(SymbolicGraph { explicit, classes })
    }

    pub fn class(&self, id: &str) -> Option<&CliqueClass> {
        self.classes.iter().find(|c| c.id == id)
    }

    /// All node ids in order: explicit vertices first, then classes.
    pub fn node_ids(&self) -> Vec<String> {
        let mut out: Vec<String> = self.explicit.vertices().to_vec();
        out.extend(self.classes.iter().map(|c| c.id.clone()));
        out
    }

    /// Non-adjacency is confined to the explicit part.
    pub fn non_clique_set(&self) -> Vec<VertexId> {
        self.explicit.non_clique_set()
    }
}
