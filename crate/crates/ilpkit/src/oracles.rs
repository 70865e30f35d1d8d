//! Independent reference implementations used to cross-check encodings and
//! the solver: exhaustive model enumeration, sequence decoding by dynamic
//! programming, and maximum spanning trees by Kruskal's method.
//!
//! Nothing here touches the ILP machinery — these are deliberately separate
//! code paths, so agreement between them and the solver is meaningful.

use crate::boolexpr::{BoolExpr, DenseAssignment, VarId};
use crate::error::{Error, Result};
use crate::model::{Model, VarKind};

/// Most variables any exhaustive enumeration below will accept.
pub const ENUM_CAP: usize = 20;

/// All satisfying assignments of `expr` over `vars`, as bitmasks with bit
/// `i` holding the value of `vars[i]`. Masks are returned in ascending
/// order. More than [`ENUM_CAP`] variables is an error.
pub fn enumerate_models(expr: &BoolExpr, vars: &[VarId]) -> Result<Vec<u64>> {
    if vars.len() > ENUM_CAP {
        return Err(Error::SizeCap { limit: ENUM_CAP });
    }
    let mut out = Vec::new();
    let mut a = DenseAssignment::new();
    for mask in 0u64..(1u64 << vars.len()) {
        for (i, &v) in vars.iter().enumerate() {
            a.set(v, (mask >> i) & 1 == 1);
        }
        if expr.eval(&a)? {
            out.push(mask);
        }
    }
    Ok(out)
}

/// All feasible 0-1 points of a pure-binary model, as bitmasks with bit `i`
/// holding variable `i`'s value (model variable order). The model must have
/// only binary variables, at most [`ENUM_CAP`] of them.
pub fn enumerate_feasible(model: &Model) -> Result<Vec<u64>> {
    let n = model.num_vars();
    if n > ENUM_CAP {
        return Err(Error::SizeCap { limit: ENUM_CAP });
    }
    if model.vars().iter().any(|v| v.kind != VarKind::Binary) {
        return Err(Error::Invalid(
            "feasible-set enumeration requires an all-binary model".into(),
        ));
    }
    let mut out = Vec::new();
    let mut x = vec![0.0; n];
    for mask in 0u64..(1u64 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = ((mask >> i) & 1) as f64;
        }
        if model.check_feasible(&x, 1e-9).is_empty() {
            out.push(mask);
        }
    }
    Ok(out)
}

/// Highest-scoring label sequence by dynamic programming.
///
/// `emission[i][l]` scores label `l` at slot `i`; `transition[i][a][b]`
/// scores the pair (label `a` at slot `i`, label `b` at slot `i+1`), so
/// `transition.len() == emission.len() - 1`. Returns the labels and the
/// total score. Ties break toward the lower label index at every step.
pub fn viterbi(emission: &[Vec<f64>], transition: &[Vec<Vec<f64>>]) -> Result<(Vec<usize>, f64)> {
    let n = emission.len();
    if n == 0 {
        return Err(Error::Invalid("viterbi needs at least one slot".into()));
    }
    let labels = emission[0].len();
    if labels == 0 {
        return Err(Error::Invalid("viterbi needs at least one label".into()));
    }
    if emission.iter().any(|row| row.len() != labels) {
        return Err(Error::Invalid("emission rows have unequal widths".into()));
    }
    if transition.len() + 1 != n {
        return Err(Error::Invalid(format!(
            "expected {} transition tables for {} slots, got {}",
            n - 1,
            n,
            transition.len()
        )));
    }
    for t in transition {
        if t.len() != labels || t.iter().any(|row| row.len() != labels) {
            return Err(Error::Invalid("transition table shape mismatch".into()));
        }
    }

    let mut score = emission[0].clone();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(n - 1);
    for i in 1..n {
        let mut next = vec![f64::NEG_INFINITY; labels];
        let mut from = vec![0usize; labels];
        for b in 0..labels {
            for a in 0..labels {
                let cand = score[a] + transition[i - 1][a][b] + emission[i][b];
                // Strict improvement keeps the lowest predecessor on ties.
                if cand > next[b] {
                    next[b] = cand;
                    from[b] = a;
                }
            }
        }
        score = next;
        back.push(from);
    }

    let mut best = 0usize;
    for l in 1..labels {
        if score[l] > score[best] {
            best = l;
        }
    }
    let total = score[best];
    let mut path = vec![best; n];
    for i in (1..n).rev() {
        path[i - 1] = back[i - 1][path[i]];
    }
    Ok((path, total))
}

/// Maximum-weight spanning tree of an undirected weighted graph on vertices
/// `0..n`, by Kruskal's method. Edges are `(i, j, weight)`.
///
/// Candidate edges are taken in order of decreasing weight, ties broken by
/// ascending `(i, j)`, so the result is deterministic even with repeated
/// weights. Returns the chosen edges (as given) and the total weight, or
/// [`Error::DisconnectedGraph`] when no spanning tree exists.
pub fn kruskal_max(n: usize, edges: &[(usize, usize, f64)]) -> Result<(Vec<(usize, usize)>, f64)> {
    if n == 0 {
        return Err(Error::Graph("empty vertex set".into()));
    }
    for &(i, j, w) in edges {
        if i >= n || j >= n {
            return Err(Error::Graph(format!("edge ({i}, {j}) out of range")));
        }
        if i == j {
            return Err(Error::Graph(format!("self-loop at vertex {i}")));
        }
        if !w.is_finite() {
            return Err(Error::NonFinite {
                what: format!("weight of edge ({i}, {j})"),
                value: w,
            });
        }
    }
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&x, &y| {
        let (xi, xj, xw) = edges[x];
        let (yi, yj, yw) = edges[y];
        yw.partial_cmp(&xw)
            .expect("weights are finite")
            .then(xi.cmp(&yi))
            .then(xj.cmp(&yj))
    });

    let mut dsu = DisjointSets::new(n);
    let mut chosen = Vec::with_capacity(n - 1);
    let mut total = 0.0;
    for idx in order {
        let (i, j, w) = edges[idx];
        if dsu.union(i, j) {
            chosen.push((i, j));
            total += w;
            if chosen.len() == n - 1 {
                return Ok((chosen, total));
            }
        }
    }
    if n == 1 {
        return Ok((chosen, 0.0));
    }
    Err(Error::DisconnectedGraph)
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the two sets; false if they were already one.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::{Literal, VarRegistry};
    use crate::model::Sense;

    /// The running example graph: five vertices, eight weighted edges.
    pub(crate) fn example_graph() -> (usize, Vec<(usize, usize, f64)>) {
        // 1-based labels in comments; vertices are 0-based here.
        (
            5,
            vec![
                (0, 1, 10.0),  // 1-2
                (0, 2, 50.0),  // 1-3
                (0, 4, 5.0),   // 1-5
                (1, 2, 11.0),  // 2-3
                (1, 4, 15.0),  // 2-5
                (2, 3, -9.0),  // 3-4
                (2, 4, -7.0),  // 3-5
                (3, 4, -50.0), // 4-5
            ],
        )
    }

    #[test]
    fn enumerate_models_xor_structure() {
        let mut reg = VarRegistry::new();
        let v: Vec<VarId> = (1..=3)
            .map(|i| reg.intern(&format!("y{i}")).unwrap())
            .collect();
        // All three agree: y1 = y2 = y3.
        let e = BoolExpr::or(vec![
            BoolExpr::and(vec![
                BoolExpr::var(v[0]),
                BoolExpr::var(v[1]),
                BoolExpr::var(v[2]),
            ]),
            BoolExpr::and(vec![
                BoolExpr::not_var(v[0]),
                BoolExpr::not_var(v[1]),
                BoolExpr::not_var(v[2]),
            ]),
        ]);
        assert_eq!(enumerate_models(&e, &v).unwrap(), vec![0b000, 0b111]);
    }

    #[test]
    fn enumerate_models_cap() {
        let mut reg = VarRegistry::new();
        let v: Vec<VarId> = (0..21)
            .map(|i| reg.intern(&format!("y{i}")).unwrap())
            .collect();
        let e = BoolExpr::var(v[0]);
        assert!(matches!(
            enumerate_models(&e, &v),
            Err(Error::SizeCap { limit: 20 })
        ));
    }

    #[test]
    fn enumerate_feasible_matches_row_semantics() {
        let mut m = Model::new();
        let a = m.add_binary("a", 0.0).unwrap();
        let b = m.add_binary("b", 0.0).unwrap();
        m.add_constraint(vec![(a, 1.0), (b, 1.0)], Sense::Le, 1.0, "amo")
            .unwrap();
        assert_eq!(enumerate_feasible(&m).unwrap(), vec![0b00, 0b01, 0b10]);
        let _ = Literal::pos(a);
    }

    #[test]
    fn viterbi_prefers_lower_labels_on_ties() {
        // Two slots, two labels, all scores zero: path (0, 0).
        let emission = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        let transition = vec![vec![vec![0.0, 0.0], vec![0.0, 0.0]]];
        let (path, total) = viterbi(&emission, &transition).unwrap();
        assert_eq!(path, vec![0, 0]);
        assert_eq!(total, 0.0);
    }

    #[test]
    fn viterbi_uses_transitions() {
        // Greedy emissions would pick (1, 1) for a score of 3, but the −5
        // transition between two 1-labels makes (0, 1) the best path.
        let emission = vec![vec![0.0, 1.0], vec![0.0, 2.0]];
        let transition = vec![vec![vec![0.0, 0.0], vec![0.0, -5.0]]];
        let (path, total) = viterbi(&emission, &transition).unwrap();
        assert_eq!(path, vec![0, 1]);
        assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn viterbi_matches_exhaustive_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let n = rng.gen_range(1..6);
            let labels = rng.gen_range(1..4);
            let emission: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..labels).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let transition: Vec<Vec<Vec<f64>>> = (0..n - 1)
                .map(|_| {
                    (0..labels)
                        .map(|_| (0..labels).map(|_| rng.gen_range(-1.0..1.0)).collect())
                        .collect()
                })
                .collect();
            let (path, total) = viterbi(&emission, &transition).unwrap();
            // Exhaustive scan over all label sequences.
            let mut best = f64::NEG_INFINITY;
            let mut seq = vec![0usize; n];
            let count = (labels as u64).pow(n as u32);
            for code in 0..count {
                let mut c = code;
                for s in seq.iter_mut() {
                    *s = (c % labels as u64) as usize;
                    c /= labels as u64;
                }
                let mut sc: f64 = (0..n).map(|i| emission[i][seq[i]]).sum();
                sc += (0..n - 1)
                    .map(|i| transition[i][seq[i]][seq[i + 1]])
                    .sum::<f64>();
                best = best.max(sc);
            }
            assert!((total - best).abs() < 1e-9, "dp {total} vs scan {best}");
            let mut check: f64 = (0..n).map(|i| emission[i][path[i]]).sum();
            check += (0..n - 1)
                .map(|i| transition[i][path[i]][path[i + 1]])
                .sum::<f64>();
            assert!((check - total).abs() < 1e-9);
        }
    }

    #[test]
    fn kruskal_example_graph_value() {
        let (n, edges) = example_graph();
        let (tree, total) = kruskal_max(n, &edges).unwrap();
        assert_eq!(tree.len(), 4);
        assert!((total - 67.0).abs() < 1e-12);
        let mut tree = tree;
        tree.sort();
        // Edges 1-3, 2-3, 2-5, 3-4 in 1-based labels.
        assert_eq!(tree, vec![(0, 2), (1, 2), (1, 4), (2, 3)]);
    }

    #[test]
    fn kruskal_disconnected_errors() {
        assert!(matches!(
            kruskal_max(4, &[(0, 1, 1.0), (2, 3, 1.0)]),
            Err(Error::DisconnectedGraph)
        ));
    }

    #[test]
    fn kruskal_single_vertex() {
        let (tree, total) = kruskal_max(1, &[]).unwrap();
        assert!(tree.is_empty());
        assert_eq!(total, 0.0);
    }

    #[test]
    fn kruskal_tie_break_is_lexicographic() {
        // A triangle of equal weights: picks (0,1) and (0,2).
        let (tree, _) = kruskal_max(3, &[(1, 2, 1.0), (0, 2, 1.0), (0, 1, 1.0)]).unwrap();
        let mut tree = tree;
        tree.sort();
        assert_eq!(tree, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn kruskal_matches_exhaustive_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..60 {
            let n = rng.gen_range(2..7);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.7) {
                        edges.push((i, j, (rng.gen_range(-20..=20) as f64) / 2.0));
                    }
                }
            }
            let by_scan = best_tree_exhaustive(n, &edges);
            match kruskal_max(n, &edges) {
                Ok((_, total)) => {
                    let best = by_scan.expect("kruskal found a tree, scan must too");
                    assert!(
                        (total - best).abs() < 1e-9,
                        "kruskal {total} vs scan {best}"
                    );
                }
                Err(Error::DisconnectedGraph) => assert!(by_scan.is_none()),
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
    }

    /// Best spanning-tree weight by scanning all edge subsets of size n−1.
    fn best_tree_exhaustive(n: usize, edges: &[(usize, usize, f64)]) -> Option<f64> {
        let m = edges.len();
        let mut best: Option<f64> = None;
        for mask in 0u64..(1 << m) {
            if mask.count_ones() as usize != n - 1 {
                continue;
            }
            let mut dsu = DisjointSets::new(n);
            let mut total = 0.0;
            let mut acyclic = true;
            for (k, &(i, j, w)) in edges.iter().enumerate() {
                if (mask >> k) & 1 == 1 {
                    if !dsu.union(i, j) {
                        acyclic = false;
                        break;
                    }
                    total += w;
                }
            }
            if acyclic && dsu.components() == 1 && best.map_or(true, |b| total > b) {
                best = Some(total);
            }
        }
        best
    }
}
