//! Structural graph constraints: spanning trees and connected subgraphs via
//! single-commodity flow.
//!
//! The flow trick makes connectivity linear: a designated root sends one
//! unit of a virtual commodity to every other vertex. Flow may only travel
//! across selected edges, so any feasible flow certifies connectivity, and a
//! cardinality row pins the selected edge count to exactly `n − 1` for trees.

use serde::{Deserialize, Serialize};

use crate::boolexpr::{Literal, VarId};
use crate::error::{Error, Result};
use crate::model::{Model, Sense, VarKind};
use crate::oracles::DisjointSets;
use crate::recipes::push_lit;

/// A weighted graph on vertices `0..n`, serializable as
/// `{"n": 5, "directed": false, "edges": [[0, 1, 10.0], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize, f64)>,
}

impl LabeledGraph {
    pub fn new(n: usize, directed: bool) -> Self {
        LabeledGraph {
            n,
            directed,
            edges: Vec::new(),
        }
    }

    /// Adds an edge after validating endpoints and weight.
    pub fn add_edge(&mut self, i: usize, j: usize, weight: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::Graph(format!(
                "edge ({i}, {j}) out of range for {} vertices",
                self.n
            )));
        }
        if i == j {
            return Err(Error::Graph(format!("self-loop at vertex {i}")));
        }
        if !weight.is_finite() {
            return Err(Error::NonFinite {
                what: format!("weight of edge ({i}, {j})"),
                value: weight,
            });
        }
        self.edges.push((i, j, weight));
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: LabeledGraph = serde_json::from_str(text).map_err(|e| Error::Schema {
            path: "$".into(),
            msg: e.to_string(),
        })?;
        for (k, &(i, j, w)) in g.edges.iter().enumerate() {
            if i >= g.n || j >= g.n {
                return Err(Error::Schema {
                    path: format!("edges[{k}]"),
                    msg: format!("endpoint out of range for {} vertices", g.n),
                });
            }
            if i == j {
                return Err(Error::Schema {
                    path: format!("edges[{k}]"),
                    msg: format!("self-loop at vertex {i}"),
                });
            }
            if !w.is_finite() {
                return Err(Error::Schema {
                    path: format!("edges[{k}]"),
                    msg: "weight must be finite".into(),
                });
            }
        }
        Ok(g)
    }
}

/// Adds one binary selection variable per edge, named `{prefix}_{i}_{j}` and
/// weighted by the edge weight in the objective. Returns ids parallel to
/// `graph.edges`.
pub fn add_edge_vars(model: &mut Model, graph: &LabeledGraph, prefix: &str) -> Result<Vec<VarId>> {
    graph
        .edges
        .iter()
        .map(|&(i, j, w)| model.add_binary(&format!("{prefix}_{i}_{j}"), w))
        .collect()
}

/// Constrains the selected edges to form a spanning tree of the undirected
/// graph on vertices `0..n` with edge list `edges` (selection variable
/// `select[k]` governs `edges[k]`).
///
/// Emits, with `n − 1` written `m`:
/// - one cardinality row `Σ select = m`;
/// - two continuous flow variables per edge (one per direction), each in
///   `[0, m]`, named `{prefix}_{i}_{j}`, with zero objective;
/// - a capacity row `f ≤ m · select` per direction;
/// - a net-outflow row for the root (`= m`) and a net-inflow row (`= 1`)
///   for every other vertex.
///
/// Graphs with `n ≤ 1` need no constraints and none are added.
pub fn spanning_tree(
    model: &mut Model,
    n: usize,
    edges: &[(usize, usize)],
    select: &[VarId],
    root: usize,
    prefix: &str,
) -> Result<()> {
    if edges.len() != select.len() {
        return Err(Error::Graph(format!(
            "{} edges but {} selection variables",
            edges.len(),
            select.len()
        )));
    }
    if n <= 1 {
        return Ok(());
    }
    if root >= n {
        return Err(Error::Graph(format!(
            "root {root} out of range for {n} vertices"
        )));
    }
    for &(i, j) in edges {
        if i >= n || j >= n {
            return Err(Error::Graph(format!("edge ({i}, {j}) out of range")));
        }
        if i == j {
            return Err(Error::Graph(format!("self-loop at vertex {i}")));
        }
    }
    let m = (n - 1) as f64;

    model.add_constraint(
        select.iter().map(|&v| (v, 1.0)).collect(),
        Sense::Eq,
        m,
        "tree-cardinality",
    )?;

    // Directed flow pair per undirected edge.
    let mut arcs: Vec<(usize, usize, VarId, VarId)> = Vec::with_capacity(edges.len() * 2);
    for (k, &(i, j)) in edges.iter().enumerate() {
        let fij = model.add_var(
            &format!("{prefix}_{i}_{j}"),
            VarKind::Continuous,
            0.0,
            m,
            0.0,
        )?;
        let fji = model.add_var(
            &format!("{prefix}_{j}_{i}"),
            VarKind::Continuous,
            0.0,
            m,
            0.0,
        )?;
        arcs.push((i, j, fij, select[k]));
        arcs.push((j, i, fji, select[k]));
    }

    for &(_, _, f, y) in &arcs {
        model.add_constraint(vec![(f, 1.0), (y, -m)], Sense::Le, 0.0, "tree-capacity")?;
    }

    // Net flow out of the root is n − 1; every other vertex absorbs 1.
    let mut terms: Vec<(VarId, f64)> = Vec::new();
    for &(from, to, f, _) in &arcs {
        if from == root {
            terms.push((f, 1.0));
        } else if to == root {
            terms.push((f, -1.0));
        }
    }
    model.add_constraint(terms, Sense::Eq, m, "tree-root-flow")?;

    for v in 0..n {
        if v == root {
            continue;
        }
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for &(from, to, f, _) in &arcs {
            if to == v {
                terms.push((f, 1.0));
            } else if from == v {
                terms.push((f, -1.0));
            }
        }
        model.add_constraint(terms, Sense::Eq, 1.0, "tree-balance")?;
    }
    Ok(())
}

/// Constrains the "active" pair relation to be connected over all `n`
/// vertices. `links[k] = (i, j, lits)` declares that the unordered pair
/// `{i, j}` counts as linked when at least one of `lits` holds.
///
/// Introduces one binary `{prefix}z_{i}_{j}` per pair (zero objective), a
/// one-row implication `z → Σ lits ≥ 1` per pair (tag `z-link`), and the
/// spanning-tree rows over the `z` variables: the `z` edges form a witness
/// tree, so a feasible point exists exactly when the active pairs connect
/// every vertex.
pub fn connected_subgraph(
    model: &mut Model,
    n: usize,
    links: &[(usize, usize, Vec<Literal>)],
    root: usize,
    prefix: &str,
) -> Result<()> {
    if n <= 1 {
        return Ok(());
    }
    let mut pairs = Vec::with_capacity(links.len());
    let mut zvars = Vec::with_capacity(links.len());
    for (i, j, lits) in links {
        if lits.is_empty() {
            return Err(Error::EmptyLiterals("connected_subgraph link"));
        }
        let z = model.add_binary(&format!("{prefix}z_{i}_{j}"), 0.0)?;
        let mut terms = vec![(z, -1.0)];
        let mut rhs = 0.0;
        for &l in lits {
            push_lit(&mut terms, &mut rhs, l, 1.0);
        }
        model.add_constraint(terms, Sense::Ge, rhs, "z-link")?;
        pairs.push((*i, *j));
        zvars.push(z);
    }
    spanning_tree(model, n, &pairs, &zvars, root, &format!("{prefix}zf"))
}

/// True when `chosen` selects exactly the edge set of a spanning tree of the
/// vertices `0..n` (edge `k` is in the set when `chosen[k]` holds).
pub fn is_spanning_tree(n: usize, edges: &[(usize, usize)], chosen: &[bool]) -> bool {
    if n == 0 {
        return false;
    }
    let picked: Vec<(usize, usize)> = edges
        .iter()
        .zip(chosen)
        .filter(|(_, &c)| c)
        .map(|(&e, _)| e)
        .collect();
    if picked.len() != n - 1 {
        return false;
    }
    let mut dsu = DisjointSets::new(n);
    for (i, j) in picked {
        if !dsu.union(i, j) {
            return false; // cycle
        }
    }
    dsu.components() == 1
}

/// True when the given undirected edges connect all of `0..n`.
pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n <= 1 {
        return true;
    }
    let mut dsu = DisjointSets::new(n);
    for &(i, j) in edges {
        if i < n && j < n {
            dsu.union(i, j);
        }
    }
    dsu.components() == 1
}
