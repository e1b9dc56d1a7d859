//! Stage-wise labeling along a degeneracy ordering, for graphs with
//! coloring number at least 3 and groups of order at least `2(Δ+col)-5`.
//!
//! At stage `i` the backward edges of `v_i` are labeled one at a time. After
//! every stage three conditions hold: the partial labeling is proper, every
//! pending vertex (one still waiting for a later leaf neighbor) has nonzero
//! weight, and settled adjacent pairs have distinct weights.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{degeneracy_ordering, DegeneracyOrdering, Graph};
use crate::group::AbelianGroup;
use crate::labeling::EdgeLabeling;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GreedyError {
    #[error("group of order {actual} is below 2(Δ+col)-5 = {required}")]
    GroupTooSmall { required: u64, actual: u64 },
    #[error("coloring number {col} is below 3; use the tree colorer")]
    ColTooSmall { col: usize },
    #[error("graph has a component that is a single edge")]
    IsolatedEdge,
    #[error("graph has fewer than 3 vertices")]
    TooSmall,
    #[error("no label available at stage {stage} for edge {edge:?}: {forbidden} of {order} labels forbidden")]
    NoLabelAvailable {
        stage: usize,
        edge: (usize, usize),
        forbidden: usize,
        order: u64,
    },
    #[error("stage {stage}, edge {edge:?}: {forbidden} forbidden labels exceed the counting bound {bound}")]
    BoundExceeded {
        stage: usize,
        edge: (usize, usize),
        forbidden: usize,
        bound: usize,
    },
    #[error("stage {stage} left violations: {violations:?}")]
    StageViolation {
        stage: usize,
        violations: Vec<StageViolation>,
    },
    #[error("incremental pending set disagrees with a recomputation at stage {stage}")]
    PendingMismatch { stage: usize },
}

/// A failed stage condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageViolation {
    EqualLabels { vertex: usize, edges: (usize, usize) },
    ZeroWeight { vertex: usize },
    EqualWeights { edge: usize },
}

#[derive(Debug, Clone)]
pub struct GreedyOptions {
    /// Pick uniformly among admissible labels instead of the first one.
    pub seed: Option<u64>,
    /// Run [`check_stage_conditions`] after every stage.
    pub check_stages: bool,
    pub trace: bool,
    /// Recompute the pending set from scratch each stage and compare.
    pub recompute_pending: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            seed: None,
            check_stages: false,
            trace: false,
            recompute_pending: cfg!(debug_assertions),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub stage: usize,
    pub edge: (usize, usize),
    pub forbidden: usize,
    pub label: usize,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stage {} edge {}-{} forbidden {} label {}",
            self.stage, self.edge.0, self.edge.1, self.forbidden, self.label
        )
    }
}

#[derive(Debug, Clone)]
pub struct GreedyRun {
    pub labeling: EdgeLabeling,
    pub trace: Vec<TraceEntry>,
    /// Largest forbidden-set size met at any choice point.
    pub max_forbidden: usize,
    pub stages_checked: usize,
}

/// Partial labeling after some stage. Positions index the ordering.
#[derive(Debug, Clone)]
pub struct GreedyState<'a> {
    pub graph: &'a Graph,
    pub group: &'a AbelianGroup,
    pub ordering: DegeneracyOrdering,
    /// Position of the last completed stage.
    pub stage: usize,
    pub labels: Vec<Option<usize>>,
    /// Current sums; unlabeled edges count as zero.
    pub weights: Vec<usize>,
    /// Positions `j <= stage` whose vertex has a degree-1 neighbor at a
    /// position after `stage`.
    pub pending: BTreeSet<usize>,
}

impl<'a> GreedyState<'a> {
    pub fn new(graph: &'a Graph, group: &'a AbelianGroup) -> Self {
        let ordering = degeneracy_ordering(graph);
        let mut s = GreedyState {
            graph,
            group,
            ordering,
            stage: 0,
            labels: vec![None; graph.edge_count()],
            weights: vec![0; graph.n()],
            pending: BTreeSet::new(),
        };
        s.pending = s.pending_from_scratch();
        s
    }

    pub fn pending_from_scratch(&self) -> BTreeSet<usize> {
        let pos = &self.ordering.position;
        (0..=self.stage.min(self.graph.n().saturating_sub(1)))
            .filter(|&j| {
                let v = self.ordering.order[j];
                self.graph
                    .neighbors(v)
                    .iter()
                    .any(|&(y, _)| self.graph.degree(y) == 1 && pos[y] > self.stage)
            })
            .collect()
    }

    pub fn set_label(&mut self, edge: usize, label: usize) {
        let (u, v) = self.graph.edge(edge);
        if let Some(old) = self.labels[edge].replace(label) {
            for x in [u, v] {
                self.weights[x] = self.group.sub_idx(self.weights[x], old);
            }
        }
        for x in [u, v] {
            self.weights[x] = self.group.add_idx(self.weights[x], label);
        }
    }

    fn is_pending(&self, v: usize) -> bool {
        self.pending.contains(&self.ordering.position[v])
    }

    fn into_labeling(self) -> EdgeLabeling {
        let labels = self.labels.iter().map(|l| l.expect("all edges labeled")).collect();
        EdgeLabeling::from_indices(self.graph, self.group, labels)
    }
}

/// Checks the three stage conditions on `state` as stated, including the
/// exemption for an edge whose later end has one earlier neighbor and whose
/// earlier end has no neighbor in between.
pub fn check_stage_conditions(state: &GreedyState) -> Vec<StageViolation> {
    let g = state.graph;
    let pos = &state.ordering.position;
    let i = state.stage;
    let mut out = Vec::new();
    for v in 0..g.n() {
        let mut seen: Vec<(usize, usize)> = g
            .neighbors(v)
            .iter()
            .filter_map(|&(_, e)| state.labels[e].map(|l| (l, e)))
            .collect();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0].0 == w[1].0 {
                out.push(StageViolation::EqualLabels {
                    vertex: v,
                    edges: (w[0].1, w[1].1),
                });
            }
        }
    }
    for &j in &state.pending {
        let v = state.ordering.order[j];
        let has_earlier = g.neighbors(v).iter().any(|&(y, _)| pos[y] <= i);
        if has_earlier && state.weights[v] == 0 {
            out.push(StageViolation::ZeroWeight { vertex: v });
        }
    }
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let (x, y) = if pos[a] < pos[b] { (a, b) } else { (b, a) };
        let (j, k) = (pos[x], pos[y]);
        if k > i || state.pending.contains(&j) || state.pending.contains(&k) {
            continue;
        }
        let later_has_two = g.neighbors(y).iter().filter(|&&(z, _)| pos[z] <= i).count() >= 2;
        let earlier_reaches = g.neighbors(x).iter().any(|&(z, _)| pos[z] > k && pos[z] <= i);
        if (later_has_two || earlier_reaches) && state.weights[x] == state.weights[y] {
            out.push(StageViolation::EqualWeights { edge: e });
        }
    }
    out
}

/// `2(Δ+col)-5` for `graph`.
pub fn greedy_bound(graph: &Graph) -> u64 {
    let col = degeneracy_ordering(graph).col;
    (2 * (graph.max_degree() + col)).saturating_sub(5) as u64
}

pub fn color_graph_greedy(graph: &Graph, group: &AbelianGroup) -> Result<EdgeLabeling, GreedyError> {
    color_graph_greedy_with(graph, group, &GreedyOptions::default()).map(|r| r.labeling)
}

/// Runs the staged construction. Components are independent: a stage only
/// looks at neighbors, so one pass over a global ordering colors each
/// component on its own.
pub fn color_graph_greedy_with(
    graph: &Graph,
    group: &AbelianGroup,
    opts: &GreedyOptions,
) -> Result<GreedyRun, GreedyError> {
    if graph.n() < 3 {
        return Err(GreedyError::TooSmall);
    }
    if graph.has_isolated_edge() {
        return Err(GreedyError::IsolatedEdge);
    }
    let mut state = GreedyState::new(graph, group);
    let col = state.ordering.col;
    if col < 3 {
        return Err(GreedyError::ColTooSmall { col });
    }
    let delta = graph.max_degree();
    let required = (2 * (delta + col) - 5) as u64;
    if group.order() < required {
        return Err(GreedyError::GroupTooSmall {
            required,
            actual: group.order(),
        });
    }
    let k = group.len();
    let mut rng = opts.seed.map(ChaCha8Rng::seed_from_u64);
    let mut trace = Vec::new();
    let mut max_forbidden = 0;
    let mut stages_checked = 0;
    // Largest position among each vertex's degree-1 neighbors.
    let last_leaf: Vec<Option<usize>> = (0..graph.n())
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .filter(|&&(y, _)| graph.degree(y) == 1)
                .map(|&(y, _)| state.ordering.position[y])
                .max()
        })
        .collect();
    let mut banned = vec![false; k];

    for i in 1..graph.n() {
        let v = state.ordering.order[i];
        state.stage = i;
        if last_leaf[v].is_some_and(|p| p > i) {
            state.pending.insert(i);
        }
        if graph.degree(v) == 1 {
            let u = graph.neighbors(v)[0].0;
            if last_leaf[u] == Some(i) {
                state.pending.remove(&state.ordering.position[u]);
            }
        }
        if opts.recompute_pending && state.pending != state.pending_from_scratch() {
            return Err(GreedyError::PendingMismatch { stage: i });
        }
        // No backward neighbors (a new component, or a vertex whose earlier
        // neighbors all come later) leaves nothing to label.
        let back = state.ordering.backward[v].clone();
        let b = back.len();
        for (j, &u) in back.iter().enumerate() {
            let e = graph.edge_id(u, v).expect("backward neighbor is adjacent");
            banned.iter_mut().for_each(|x| *x = false);
            for x in [u, v] {
                for &(_, f) in graph.neighbors(x) {
                    if let Some(l) = state.labels[f] {
                        banned[l] = true;
                    }
                }
            }
            let wu = state.weights[u];
            let wv = state.weights[v];
            if state.is_pending(u) {
                banned[group.neg_idx(wu)] = true;
            } else {
                for &(y, _) in graph.neighbors(u) {
                    if y != v && state.ordering.position[y] <= i {
                        banned[group.sub_idx(state.weights[y], wu)] = true;
                    }
                }
            }
            let last = j + 1 == b;
            let bound = if !last {
                if j + 2 == b {
                    // Settle v against the last backward neighbor now; the
                    // final label adds to both sums alike.
                    banned[group.sub_idx(state.weights[back[b - 1]], wv)] = true;
                }
                (delta + col - 4) + (delta - 1) + usize::from(j + 2 == b)
            } else {
                if state.is_pending(v) {
                    banned[group.neg_idx(wv)] = true;
                } else {
                    for &y in &back[..b - 1] {
                        banned[group.sub_idx(state.weights[y], wv)] = true;
                    }
                }
                (delta + col - 3) + (delta - 1) + (col - 2)
            };
            let forbidden = banned.iter().filter(|&&x| x).count();
            max_forbidden = max_forbidden.max(forbidden);
            if forbidden > bound {
                return Err(GreedyError::BoundExceeded {
                    stage: i,
                    edge: (u, v),
                    forbidden,
                    bound,
                });
            }
            let free: Vec<usize> = (0..k).filter(|&l| !banned[l]).collect();
            let label = match (&mut rng, free.first()) {
                (_, None) => {
                    return Err(GreedyError::NoLabelAvailable {
                        stage: i,
                        edge: (u, v),
                        forbidden,
                        order: group.order(),
                    })
                }
                (Some(r), _) => free[r.gen_range(0..free.len())],
                (None, Some(&l)) => l,
            };
            state.set_label(e, label);
            if opts.trace {
                trace.push(TraceEntry {
                    stage: i,
                    edge: (u, v),
                    forbidden,
                    label,
                });
            }
        }
        if opts.check_stages {
            let violations = check_stage_conditions(&state);
            if !violations.is_empty() {
                return Err(GreedyError::StageViolation { stage: i, violations });
            }
            stages_checked += 1;
        }
    }
    Ok(GreedyRun {
        labeling: state.into_labeling(),
        trace,
        max_forbidden,
        stages_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::groups_of_order;
    use crate::labeling::verify_twin;

    fn checked() -> GreedyOptions {
        GreedyOptions {
            check_stages: true,
            recompute_pending: true,
            ..GreedyOptions::default()
        }
    }

    fn run_all_groups(g: &Graph) {
        let k = greedy_bound(g);
        for grp in groups_of_order(k).unwrap() {
            let run = color_graph_greedy_with(g, &grp, &checked()).unwrap();
            assert!(verify_twin(g, &run.labeling).unwrap().passed(), "{grp}");
        }
    }

    #[test]
    fn small_examples() {
        assert_eq!(greedy_bound(&Graph::complete(3)), 5);
        assert_eq!(greedy_bound(&Graph::complete(4)), 9);
        assert_eq!(greedy_bound(&Graph::cycle(5)), 5);
        run_all_groups(&Graph::complete(3));
        run_all_groups(&Graph::complete(4));
        run_all_groups(&Graph::cycle(5));
        run_all_groups(&Graph::complete(6));
    }

    #[test]
    fn triangle_stages_label_first_edge_then_two() {
        let g = Graph::complete(3);
        let grp = AbelianGroup::cyclic(5).unwrap();
        let opts = GreedyOptions {
            trace: true,
            ..checked()
        };
        let run = color_graph_greedy_with(&g, &grp, &opts).unwrap();
        let stages: Vec<usize> = run.trace.iter().map(|t| t.stage).collect();
        assert_eq!(stages, vec![1, 2, 2]);
    }

    #[test]
    fn preconditions() {
        let z = |k| AbelianGroup::cyclic(k).unwrap();
        assert!(matches!(
            color_graph_greedy(&Graph::path(5), &z(9)),
            Err(GreedyError::ColTooSmall { col: 2 })
        ));
        assert_eq!(
            color_graph_greedy(&Graph::complete(4), &z(8)).unwrap_err(),
            GreedyError::GroupTooSmall { required: 9, actual: 8 }
        );
        let k3_plus_edge = Graph::new(5, &[(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        assert_eq!(
            color_graph_greedy(&k3_plus_edge, &z(5)).unwrap_err(),
            GreedyError::IsolatedEdge
        );
    }

    #[test]
    fn stages_without_backward_edges_are_skipped() {
        // Two K4s joined by a path: the ordering can reach a path vertex
        // whose neighbors all come later.
        let mut edges = Vec::new();
        for base in [0, 6] {
            for a in 0..4 {
                for b in a + 1..4 {
                    edges.push((base + a, base + b));
                }
            }
        }
        edges.extend([(3, 4), (4, 5), (5, 6)]);
        let g = Graph::new(10, &edges).unwrap();
        run_all_groups(&g);
        let ord = degeneracy_ordering(&g);
        let empty = (1..g.n()).filter(|&i| ord.backward[ord.order[i]].is_empty()).count();
        assert!(empty <= 1);
    }

    #[test]
    fn leaves_hanging_off_dense_part() {
        let mut edges = vec![(0, 1), (1, 2), (0, 2), (2, 3), (3, 0)];
        edges.extend((4..9).map(|v| (v % 4, v)));
        let g = Graph::new(9, &edges).unwrap();
        run_all_groups(&g);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let g = Graph::complete(5);
        let grp = AbelianGroup::cyclic(greedy_bound(&g)).unwrap();
        let opts = |s| GreedyOptions {
            seed: Some(s),
            ..checked()
        };
        let a = color_graph_greedy_with(&g, &grp, &opts(7)).unwrap().labeling;
        let b = color_graph_greedy_with(&g, &grp, &opts(7)).unwrap().labeling;
        assert_eq!(a, b);
        assert!(verify_twin(&g, &a).unwrap().passed());
    }

    #[test]
    fn hand_built_violations() {
        let g = Graph::path(3);
        let grp = AbelianGroup::cyclic(5).unwrap();
        let mut s = GreedyState::new(&g, &grp);
        s.stage = 2;
        s.pending.clear();
        s.set_label(0, 1);
        s.set_label(1, 1);
        let v = check_stage_conditions(&s);
        assert_eq!(
            v.iter().filter(|x| matches!(x, StageViolation::EqualLabels { .. })).count(),
            1
        );

        let star = Graph::star(3);
        let mut s = GreedyState::new(&star, &grp);
        s.stage = 3;
        s.pending = [s.ordering.position[0]].into_iter().collect();
        assert_eq!(check_stage_conditions(&s), vec![StageViolation::ZeroWeight { vertex: 0 }]);
    }
}
