//! Ready-made demonstration models: first-order sequence labeling and
//! pairwise event-relation extraction with a connectivity requirement.
//!
//! Both builders draw their scores from a seeded [`ChaCha8Rng`] so a model is
//! fully determined by its dimensions and seed, and both come with decoding
//! helpers, semantic validators that are independent of the row encoding, and
//! exhaustive reference searches for cross-checking small instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolexpr::{Literal, VarId};
use crate::error::{Error, Result};
use crate::graphs::connected_subgraph;
use crate::model::{Model, Solution};
use crate::oracles::DisjointSets;
use crate::recipes::{disjunction, disjunctive_implication, iff_conjunction, multiclass_block};

/// Label index treated as "verb" by [`SeqExtra::AtLeastOneVerb`].
pub const VERB_LABEL: usize = 0;

/// Optional extra requirement for the sequence-labeling model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeqExtra {
    #[default]
    None,
    /// At least one slot must take label [`VERB_LABEL`].
    AtLeastOneVerb,
}

/// A first-order sequence-labeling model: `n_slots` positions, each taking
/// exactly one of `n_labels` labels, scored per slot (emission) and per
/// adjacent label pair (transition).
///
/// Variables: binary `y{i}_{l}` ("slot `i` takes label `l`") and binary
/// `t{i}_{a}_{b}` ("slot `i` takes `a` and slot `i+1` takes `b`"). Rows: one
/// exactly-one row per slot, and per pair variable a two-row biconditional
/// tying it to the conjunction of its two label variables — `2(n−1)·|L|²`
/// agreement rows in total.
#[derive(Debug, Clone)]
pub struct SeqModel {
    pub model: Model,
    pub n_slots: usize,
    pub n_labels: usize,
    /// `emission[i][l]`: score for slot `i` taking label `l`.
    pub emission: Vec<Vec<f64>>,
    /// `transition[i][a][b]`: score for slots `(i, i+1)` taking `(a, b)`.
    pub transition: Vec<Vec<Vec<f64>>>,
    /// `label_vars[i][l]` is `y{i}_{l}`.
    pub label_vars: Vec<Vec<VarId>>,
    /// `pair_vars[i][a][b]` is `t{i}_{a}_{b}`.
    pub pair_vars: Vec<Vec<Vec<VarId>>>,
    pub extra: SeqExtra,
}

/// Builds a sequence-labeling model with scores drawn uniformly from
/// `[−1, 1)`.
///
/// The draw order is fixed — emissions slot-major then label-minor, followed
/// by transitions in `(i, a, b)` order — so the instance is reproducible
/// from `(n_slots, n_labels, seed)` alone.
pub fn build_sequence_model(
    n_slots: usize,
    n_labels: usize,
    seed: u64,
    extra: SeqExtra,
) -> Result<SeqModel> {
    if n_slots == 0 || n_labels == 0 {
        return Err(Error::Invalid(
            "sequence model needs at least one slot and one label".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let emission: Vec<Vec<f64>> = (0..n_slots)
        .map(|_| (0..n_labels).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let transition: Vec<Vec<Vec<f64>>> = (0..n_slots - 1)
        .map(|_| {
            (0..n_labels)
                .map(|_| (0..n_labels).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect()
        })
        .collect();
    sequence_model_from_scores(emission, transition, extra)
}

/// Builds the sequence-labeling model over caller-provided score tables.
/// Shapes must agree: `transition.len() == emission.len() − 1` and every
/// table row must have `n_labels` entries.
pub fn sequence_model_from_scores(
    emission: Vec<Vec<f64>>,
    transition: Vec<Vec<Vec<f64>>>,
    extra: SeqExtra,
) -> Result<SeqModel> {
    let n_slots = emission.len();
    if n_slots == 0 {
        return Err(Error::Invalid(
            "sequence model needs at least one slot".into(),
        ));
    }
    let n_labels = emission[0].len();
    if n_labels == 0 {
        return Err(Error::Invalid(
            "sequence model needs at least one label".into(),
        ));
    }
    if emission.iter().any(|row| row.len() != n_labels) {
        return Err(Error::Invalid("emission rows have unequal widths".into()));
    }
    if transition.len() + 1 != n_slots {
        return Err(Error::Invalid(format!(
            "expected {} transition tables for {} slots, got {}",
            n_slots - 1,
            n_slots,
            transition.len()
        )));
    }
    if transition
        .iter()
        .any(|t| t.len() != n_labels || t.iter().any(|row| row.len() != n_labels))
    {
        return Err(Error::Invalid("transition table shape mismatch".into()));
    }

    let mut model = Model::new();
    let mut label_vars = Vec::with_capacity(n_slots);
    for (i, row) in emission.iter().enumerate() {
        label_vars.push(multiclass_block(&mut model, &format!("y{i}"), row)?);
    }

    let mut pair_vars = Vec::with_capacity(n_slots.saturating_sub(1));
    for (i, table) in transition.iter().enumerate() {
        let mut per_a = Vec::with_capacity(n_labels);
        for (a, row) in table.iter().enumerate() {
            let mut per_b = Vec::with_capacity(n_labels);
            for (b, &score) in row.iter().enumerate() {
                if !score.is_finite() {
                    return Err(Error::NonFinite {
                        what: format!("transition score ({i}, {a}, {b})"),
                        value: score,
                    });
                }
                let t = model.add_binary(&format!("t{i}_{a}_{b}"), score)?;
                iff_conjunction(
                    &mut model,
                    &[
                        Literal::pos(label_vars[i][a]),
                        Literal::pos(label_vars[i + 1][b]),
                    ],
                    Literal::pos(t),
                )?;
                per_b.push(t);
            }
            per_a.push(per_b);
        }
        pair_vars.push(per_a);
    }

    if extra == SeqExtra::AtLeastOneVerb {
        let verbs: Vec<Literal> = label_vars
            .iter()
            .map(|labels| Literal::pos(labels[VERB_LABEL]))
            .collect();
        disjunction(&mut model, &verbs)?;
    }

    Ok(SeqModel {
        model,
        n_slots,
        n_labels,
        emission,
        transition,
        label_vars,
        pair_vars,
        extra,
    })
}

/// Reads the label sequence off a solution: the single true label variable
/// per slot. Errors when a slot has no (or more than one) label set.
pub fn decode_sequence(seq: &SeqModel, solution: &Solution) -> Result<Vec<usize>> {
    let mut labels = Vec::with_capacity(seq.n_slots);
    for (i, slot) in seq.label_vars.iter().enumerate() {
        let on: Vec<usize> = (0..seq.n_labels)
            .filter(|&l| solution.is_true(slot[l]))
            .collect();
        match on.as_slice() {
            [l] => labels.push(*l),
            _ => {
                return Err(Error::Invalid(format!(
                    "slot {i} has {} labels set, expected exactly 1",
                    on.len()
                )))
            }
        }
    }
    Ok(labels)
}

/// Semantic check of a solved sequence model, independent of how the rows
/// were encoded: each slot carries exactly one label, every pair variable
/// equals the conjunction of its two label variables, and the extra
/// requirement (when active) is met. Returns the decoded sequence.
pub fn validate_sequence(seq: &SeqModel, solution: &Solution) -> Result<Vec<usize>> {
    let labels = decode_sequence(seq, solution)?;
    for (i, per_a) in seq.pair_vars.iter().enumerate() {
        for (a, per_b) in per_a.iter().enumerate() {
            for (b, &t) in per_b.iter().enumerate() {
                let want = labels[i] == a && labels[i + 1] == b;
                if solution.is_true(t) != want {
                    return Err(Error::Invalid(format!(
                        "pair variable t{i}_{a}_{b} disagrees with labels \
                         ({}, {})",
                        labels[i],
                        labels[i + 1]
                    )));
                }
            }
        }
    }
    if seq.extra == SeqExtra::AtLeastOneVerb && !labels.contains(&VERB_LABEL) {
        return Err(Error::Invalid(format!(
            "no slot takes label {VERB_LABEL} despite the at-least-one-verb row"
        )));
    }
    Ok(labels)
}

/// Total score of a label sequence: emissions plus transitions, accumulated
/// left to right (the same order the Viterbi recursion uses, so equal
/// sequences produce bit-identical totals).
pub fn sequence_score(emission: &[Vec<f64>], transition: &[Vec<Vec<f64>>], seq: &[usize]) -> f64 {
    let mut total = emission[0][seq[0]];
    for i in 1..seq.len() {
        total = total + transition[i - 1][seq[i - 1]][seq[i]] + emission[i][seq[i]];
    }
    total
}

/// Exhaustive search over all `|L|^n` label sequences; the reference for
/// small constrained instances. When `require_label` is given, only
/// sequences containing that label compete. Ties keep the first sequence in
/// ascending odometer order (slot 0 cycles fastest). Returns `None` when no
/// sequence qualifies.
pub fn sequence_bruteforce(
    emission: &[Vec<f64>],
    transition: &[Vec<Vec<f64>>],
    require_label: Option<usize>,
) -> Option<(Vec<usize>, f64)> {
    let n = emission.len();
    let labels = emission.first()?.len();
    let mut seq = vec![0usize; n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let admissible = match require_label {
            Some(l) => seq.contains(&l),
            None => true,
        };
        if admissible {
            let s = sequence_score(emission, transition, &seq);
            if best.as_ref().map_or(true, |(_, b)| s > *b) {
                best = Some((seq.clone(), s));
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            seq[i] += 1;
            if seq[i] == labels {
                seq[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// Relation label: `i` causes `j`.
pub const REL_CAUSE: usize = 0;
/// Relation label: `i` prevents `j`.
pub const REL_PREVENT: usize = 1;
/// Relation label: no relation from `i` to `j`.
pub const REL_NONE: usize = 2;
/// Printable names for the three relation labels.
pub const REL_NAMES: [&str; 3] = ["cause", "prevent", "none"];

/// A pairwise event-relation model over `n_events` events.
///
/// Every ordered pair `(i, j)`, `i ≠ j`, takes exactly one relation label
/// from {cause, prevent, none} via binaries `r{i}_{j}_{label}`. A pair
/// related in one direction forces `none` on the reverse direction
/// (`−r_ij_c − r_ij_p + 2·r_ji_n ≥ 0` for every ordered pair), and the
/// non-`none` pairs must connect all events: an auxiliary connection binary
/// per unordered pair is linked to the four directed non-`none` literals and
/// constrained to support a spanning tree.
#[derive(Debug, Clone)]
pub struct EventsModel {
    pub model: Model,
    pub n_events: usize,
    /// `scores[i][j][r]`: score for ordered pair `(i, j)` taking relation
    /// `r`. Diagonal entries are unused and stay zero.
    pub scores: Vec<Vec<[f64; 3]>>,
    /// `rel_vars[i][j][r]` for `i ≠ j`; diagonal entries are `None`.
    pub rel_vars: Vec<Vec<Option<[VarId; 3]>>>,
}

/// Builds an event-relation model with scores drawn uniformly from `[−1, 1)`
/// in `(i, j, r)` order (diagonal skipped), reproducible from
/// `(n_events, seed)`.
pub fn build_events_model(n_events: usize, seed: u64) -> Result<EventsModel> {
    if n_events == 0 {
        return Err(Error::Invalid(
            "event model needs at least one event".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scores = vec![vec![[0.0f64; 3]; n_events]; n_events];
    for i in 0..n_events {
        for j in 0..n_events {
            if i == j {
                continue;
            }
            for r in 0..3 {
                scores[i][j][r] = rng.gen_range(-1.0..1.0);
            }
        }
    }
    events_model_from_scores(scores)
}

/// Builds the event-relation model over caller-provided scores
/// (`scores[i][j][r]`, square, diagonal ignored).
pub fn events_model_from_scores(scores: Vec<Vec<[f64; 3]>>) -> Result<EventsModel> {
    let n = scores.len();
    if n == 0 {
        return Err(Error::Invalid(
            "event model needs at least one event".into(),
        ));
    }
    if scores.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid("event score table is not square".into()));
    }
    let mut model = Model::new();
    let mut rel_vars: Vec<Vec<Option<[VarId; 3]>>> = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let ids = multiclass_block(&mut model, &format!("r{i}_{j}"), &scores[i][j])?;
            rel_vars[i][j] = Some([ids[0], ids[1], ids[2]]);
        }
    }
    // A relation in one direction silences the reverse direction.
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let fwd = rel_vars[i][j].unwrap();
            let rev = rel_vars[j][i].unwrap();
            disjunctive_implication(
                &mut model,
                &[Literal::pos(fwd[REL_CAUSE]), Literal::pos(fwd[REL_PREVENT])],
                &[Literal::pos(rev[REL_NONE])],
            )?;
        }
    }
    // The related pairs (in either direction) must connect every event.
    let mut links = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let fwd = rel_vars[i][j].unwrap();
            let rev = rel_vars[j][i].unwrap();
            links.push((
                i,
                j,
                vec![
                    Literal::pos(fwd[REL_CAUSE]),
                    Literal::pos(fwd[REL_PREVENT]),
                    Literal::pos(rev[REL_CAUSE]),
                    Literal::pos(rev[REL_PREVENT]),
                ],
            ));
        }
    }
    connected_subgraph(&mut model, n, &links, 0, "g")?;

    Ok(EventsModel {
        model,
        n_events: n,
        scores,
        rel_vars,
    })
}

/// Reads the relation labels off a solution as an `n × n` matrix (diagonal
/// fixed to [`REL_NONE`]). Errors when an ordered pair does not have exactly
/// one relation variable set.
pub fn decode_relation_matrix(ev: &EventsModel, solution: &Solution) -> Result<Vec<Vec<usize>>> {
    let n = ev.n_events;
    let mut matrix = vec![vec![REL_NONE; n]; n];
    for i in 0..n {
        for j in 0..n {
            let Some(vars) = ev.rel_vars[i][j] else {
                continue;
            };
            let on: Vec<usize> = (0..3).filter(|&r| solution.is_true(vars[r])).collect();
            match on.as_slice() {
                [r] => matrix[i][j] = *r,
                _ => {
                    return Err(Error::Invalid(format!(
                        "pair ({i}, {j}) has {} relation labels set, expected exactly 1",
                        on.len()
                    )))
                }
            }
        }
    }
    Ok(matrix)
}

/// The non-`none` entries of a relation matrix as `(i, j, label)` triples in
/// row-major order.
pub fn nonnone_relations(matrix: &[Vec<usize>]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (i, row) in matrix.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            if i != j && r != REL_NONE {
                out.push((i, j, r));
            }
        }
    }
    out
}

/// Semantic check of a solved event model, independent of how the rows were
/// encoded: exactly one label per ordered pair, no pair related in both
/// directions, and the related pairs connect all events. Returns the decoded
/// relation matrix.
pub fn validate_events(ev: &EventsModel, solution: &Solution) -> Result<Vec<Vec<usize>>> {
    let matrix = decode_relation_matrix(ev, solution)?;
    let n = ev.n_events;
    let mut linked = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let fwd = matrix[i][j] != REL_NONE;
            let rev = matrix[j][i] != REL_NONE;
            if fwd && rev {
                return Err(Error::Invalid(format!(
                    "events {i} and {j} are related in both directions"
                )));
            }
            if fwd || rev {
                linked.push((i, j));
            }
        }
    }
    if !crate::graphs::is_connected(n, &linked) {
        return Err(Error::Invalid(
            "the related pairs do not connect all events".into(),
        ));
    }
    Ok(matrix)
}

/// Total score of a relation matrix: one score per ordered pair, summed in
/// row-major order.
pub fn events_score(scores: &[Vec<[f64; 3]>], matrix: &[Vec<usize>]) -> f64 {
    let mut total = 0.0;
    for (i, row) in matrix.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            if i != j {
                total += scores[i][j][r];
            }
        }
    }
    total
}

/// Exhaustive search over all `3^(n(n−1))` relation assignments, keeping the
/// best one that respects antisymmetry and connects all events; the
/// reference for small instances (n ≤ 4 is comfortable). Ties keep the first
/// assignment in enumeration order. Returns the matrix and its score.
pub fn events_bruteforce(scores: &[Vec<[f64; 3]>]) -> Result<(Vec<Vec<usize>>, f64)> {
    let n = scores.len();
    if n == 0 {
        return Err(Error::Invalid(
            "event model needs at least one event".into(),
        ));
    }
    if scores.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid("event score table is not square".into()));
    }
    let mut pairs = Vec::with_capacity(n * (n - 1));
    let mut index = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                index[i][j] = pairs.len();
                pairs.push((i, j));
            }
        }
    }
    let m = pairs.len();
    if m == 0 {
        return Ok((vec![vec![REL_NONE; n]; n], 0.0));
    }

    let mut labels = vec![0usize; m];
    let mut best: Option<(Vec<usize>, f64)> = None;
    'outer: loop {
        let mut valid = true;
        'check: for i in 0..n {
            for j in (i + 1)..n {
                if labels[index[i][j]] != REL_NONE && labels[index[j][i]] != REL_NONE {
                    valid = false;
                    break 'check;
                }
            }
        }
        if valid {
            let mut ds = DisjointSets::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if labels[index[i][j]] != REL_NONE || labels[index[j][i]] != REL_NONE {
                        ds.union(i, j);
                    }
                }
            }
            if ds.components() == 1 {
                let mut s = 0.0;
                for (k, &(i, j)) in pairs.iter().enumerate() {
                    s += scores[i][j][labels[k]];
                }
                if best.as_ref().map_or(true, |(_, b)| s > *b) {
                    best = Some((labels.clone(), s));
                }
            }
        }
        let mut k = 0;
        loop {
            if k == m {
                break 'outer;
            }
            labels[k] += 1;
            if labels[k] == 3 {
                labels[k] = 0;
                k += 1;
            } else {
                break;
            }
        }
    }

    let (labels, _) = best.expect("a star of causes is always a valid assignment");
    let mut matrix = vec![vec![REL_NONE; n]; n];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        matrix[i][j] = labels[k];
    }
    let total = events_score(scores, &matrix);
    Ok((matrix, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::viterbi;
    use crate::solver::solve;

    #[test]
    fn sequence_model_shape() {
        let seq = build_sequence_model(4, 3, 7, SeqExtra::None).unwrap();
        // 4 slots × 3 labels emissions plus 3 × 9 pair variables.
        assert_eq!(seq.model.num_vars(), 12 + 27);
        assert_eq!(seq.model.rows_tagged("exactly-one"), 4);
        // Two agreement rows per pair variable: 2 · (n−1) · |L|².
        assert_eq!(seq.model.rows_tagged("iff-conjunction"), 2 * 3 * 9);
        assert_eq!(seq.model.rows_tagged("disjunction"), 0);

        let with_verb = build_sequence_model(4, 3, 7, SeqExtra::AtLeastOneVerb).unwrap();
        assert_eq!(with_verb.model.rows_tagged("disjunction"), 1);
    }

    #[test]
    fn sequence_ilp_matches_viterbi() {
        for seed in [1u64, 7, 42, 2024] {
            let seq = build_sequence_model(5, 3, seed, SeqExtra::None).unwrap();
            let solution = solve(&seq.model).unwrap();
            let labels = validate_sequence(&seq, &solution).unwrap();
            let (_, best) = viterbi(&seq.emission, &seq.transition).unwrap();
            let achieved = sequence_score(&seq.emission, &seq.transition, &labels);
            assert_eq!(achieved, best, "seed {seed}");
            assert!((solution.objective - best).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn sequence_matches_viterbi_sequence_when_unique() {
        let seq = build_sequence_model(5, 3, 7, SeqExtra::None).unwrap();
        let (path, best) = viterbi(&seq.emission, &seq.transition).unwrap();
        // Confirm uniqueness by exhaustive scan before comparing paths.
        let mut optima = 0;
        let (_, brute) = sequence_bruteforce(&seq.emission, &seq.transition, None).unwrap();
        assert_eq!(brute, best);
        let mut s = vec![0usize; 5];
        'scan: loop {
            if sequence_score(&seq.emission, &seq.transition, &s) == best {
                optima += 1;
            }
            let mut i = 0;
            loop {
                if i == 5 {
                    break 'scan;
                }
                s[i] += 1;
                if s[i] == 3 {
                    s[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
        }
        if optima == 1 {
            let solution = solve(&seq.model).unwrap();
            let labels = decode_sequence(&seq, &solution).unwrap();
            assert_eq!(labels, path);
        }
    }

    #[test]
    fn verb_requirement_changes_the_argmax() {
        // Label 1 dominates everywhere, so the free argmax has no verb.
        let emission = vec![vec![0.0, 1.0, 0.2]; 4];
        let transition = vec![vec![vec![0.0; 3]; 3]; 3];
        let free = sequence_model_from_scores(emission.clone(), transition.clone(), SeqExtra::None)
            .unwrap();
        let free_solution = solve(&free.model).unwrap();
        let free_labels = validate_sequence(&free, &free_solution).unwrap();
        assert!(!free_labels.contains(&VERB_LABEL));

        let constrained = sequence_model_from_scores(
            emission.clone(),
            transition.clone(),
            SeqExtra::AtLeastOneVerb,
        )
        .unwrap();
        let solution = solve(&constrained.model).unwrap();
        let labels = validate_sequence(&constrained, &solution).unwrap();
        assert!(labels.contains(&VERB_LABEL));
        let (_, brute) = sequence_bruteforce(&emission, &transition, Some(VERB_LABEL)).unwrap();
        assert_eq!(sequence_score(&emission, &transition, &labels), brute);
        assert!(solution.objective < free_solution.objective);
    }

    #[test]
    fn single_slot_reduces_to_multiclass() {
        let seq = build_sequence_model(1, 4, 3, SeqExtra::None).unwrap();
        assert_eq!(seq.model.num_vars(), 4);
        assert_eq!(seq.model.num_constraints(), 1);
        let solution = solve(&seq.model).unwrap();
        let labels = validate_sequence(&seq, &solution).unwrap();
        let best = (0..4)
            .max_by(|&a, &b| seq.emission[0][a].total_cmp(&seq.emission[0][b]))
            .unwrap();
        assert_eq!(labels, vec![best]);
    }

    #[test]
    fn validate_sequence_rejects_disagreeing_pair_variable() {
        let seq = build_sequence_model(2, 2, 5, SeqExtra::None).unwrap();
        let solution = solve(&seq.model).unwrap();
        let labels = decode_sequence(&seq, &solution).unwrap();
        let mut broken = solution.clone();
        // Flip one pair variable away from the decoded labels.
        let (a, b) = (labels[0], labels[1]);
        let t = seq.pair_vars[0][a][b];
        broken.values[t.index()] = 1.0 - broken.values[t.index()];
        assert!(validate_sequence(&seq, &broken).is_err());
        assert!(validate_sequence(&seq, &solution).is_ok());
    }

    #[test]
    fn two_events_force_one_relation() {
        let ev = build_events_model(2, 11).unwrap();
        let solution = solve(&ev.model).unwrap();
        let matrix = validate_events(&ev, &solution).unwrap();
        assert_eq!(nonnone_relations(&matrix).len(), 1);
    }

    #[test]
    fn connectivity_overrides_none_preference() {
        // Scores favor "none" on every pair; connectivity still forces n−1
        // relations, each picking the cheapest non-none option.
        let n = 4;
        let mut scores = vec![vec![[0.0f64; 3]; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    scores[i][j] = [-1.0, -2.0, 1.0];
                }
            }
        }
        let ev = events_model_from_scores(scores.clone()).unwrap();
        let solution = solve(&ev.model).unwrap();
        let matrix = validate_events(&ev, &solution).unwrap();
        let relations = nonnone_relations(&matrix);
        assert_eq!(relations.len(), n - 1);
        assert!(relations.iter().all(|&(_, _, r)| r == REL_CAUSE));
        let (_, brute) = events_bruteforce(&scores).unwrap();
        assert_eq!(events_score(&scores, &matrix), brute);
    }

    #[test]
    fn events_ilp_matches_bruteforce_small() {
        for seed in [3u64, 9] {
            let ev = build_events_model(3, seed).unwrap();
            let solution = solve(&ev.model).unwrap();
            let matrix = validate_events(&ev, &solution).unwrap();
            let (_, brute) = events_bruteforce(&ev.scores).unwrap();
            assert_eq!(events_score(&ev.scores, &matrix), brute, "seed {seed}");
            assert!((solution.objective - brute).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn events_ilp_matches_bruteforce_n4_once() {
        let ev = build_events_model(4, 3).unwrap();
        let solution = solve(&ev.model).unwrap();
        let matrix = validate_events(&ev, &solution).unwrap();
        let (_, brute) = events_bruteforce(&ev.scores).unwrap();
        assert_eq!(events_score(&ev.scores, &matrix), brute);
    }

    #[test]
    fn antisymmetry_rows_block_double_relations() {
        let ev = build_events_model(3, 1).unwrap();
        let mut model = ev.model.clone();
        // Pin (0, 1) and (1, 0) both to "cause"; the model must go infeasible.
        let fwd = ev.rel_vars[0][1].unwrap()[REL_CAUSE];
        let rev = ev.rel_vars[1][0].unwrap()[REL_CAUSE];
        crate::recipes::force_all(&mut model, &[Literal::pos(fwd), Literal::pos(rev)]).unwrap();
        let solution = solve(&model).unwrap();
        assert_eq!(solution.status, crate::model::SolveStatus::Infeasible);
    }

    #[test]
    fn event_model_shape() {
        let ev = build_events_model(3, 5).unwrap();
        let m = 3 * 2; // ordered pairs
        assert_eq!(ev.model.rows_tagged("exactly-one"), m);
        assert_eq!(ev.model.rows_tagged("disjunctive-implication"), m);
        assert_eq!(ev.model.rows_tagged("z-link"), 3); // unordered pairs
        assert_eq!(ev.model.rows_tagged("tree-cardinality"), 1);
    }
}
