//! Ground truth: exhaustive search for twin colorings and exact computation
//! of the twin and group twin indices of small graphs.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::group::{groups_of_order, AbelianGroup};
use crate::labeling::EdgeLabeling;

pub use crate::labeling::{verify_twin, VerificationReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no coloring found for any order up to {k_max}")]
    NotFoundWithin { k_max: u64 },
    #[error("graph has a component that is a single edge")]
    IsolatedEdge,
    #[error("search budget exhausted for {group}")]
    Inconclusive { group: String },
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Maximum number of label trials before giving up.
    pub budget: u64,
    /// Force labels on leaves hanging from the same vertex to increase.
    pub leaf_symmetry: bool,
    /// For cyclic groups, restrict the first edge to one label per orbit of
    /// the unit group (`0` and the proper divisors of `k`).
    pub fix_first_label: bool,
    /// Worker threads splitting over the first edge's labels.
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 100_000_000,
            leaf_symmetry: true,
            fix_first_label: false,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(EdgeLabeling),
    /// The search completed without a witness.
    NotFound,
    /// The budget ran out first.
    Unknown,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

/// Backtracking search for a twin coloring of `graph` over `group`.
///
/// Edges are taken in DFS order from a maximum-degree vertex of each
/// component, so every visited vertex is saturated at once. A saturated
/// vertex is compared with its saturated neighbors immediately.
pub fn exists_coloring(graph: &Graph, group: &AbelianGroup, opts: &SearchOptions) -> SearchOutcome {
    if graph.has_isolated_edge() {
        return SearchOutcome::NotFound;
    }
    let problem = Problem::new(graph, group, opts);
    let firsts = problem.first_labels(opts.fix_first_label);
    if graph.edge_count() == 0 {
        return SearchOutcome::Found(EdgeLabeling::from_indices(graph, group, Vec::new()));
    }
    let budget = AtomicU64::new(opts.budget);
    let result = if opts.threads <= 1 || firsts.len() < 2 {
        problem.run(&firsts, &budget, None)
    } else {
        problem.run_parallel(&firsts, &budget, opts.threads)
    };
    match result {
        Run::Found(labels) => SearchOutcome::Found(EdgeLabeling::from_indices(graph, group, labels)),
        Run::NotFound => SearchOutcome::NotFound,
        Run::Unknown => SearchOutcome::Unknown,
    }
}

enum Run {
    Found(Vec<usize>),
    NotFound,
    Unknown,
}

struct Problem<'a> {
    graph: &'a Graph,
    group: &'a AbelianGroup,
    k: usize,
    add: Option<Vec<u32>>,
    order: Vec<usize>,
    /// Previous edge (by position) among leaf edges at the same vertex.
    twin_prev: Vec<Option<usize>>,
}

impl<'a> Problem<'a> {
    fn new(graph: &'a Graph, group: &'a AbelianGroup, opts: &SearchOptions) -> Self {
        let k = group.len();
        let add = (k <= 1024).then(|| {
            let mut t = vec![0u32; k * k];
            for a in 0..k {
                for b in 0..k {
                    t[a * k + b] = group.add_idx(a, b) as u32;
                }
            }
            t
        });
        let order = dfs_edge_order(graph);
        let mut twin_prev = vec![None; order.len()];
        if opts.leaf_symmetry {
            let mut last_at: Vec<Option<usize>> = vec![None; graph.n()];
            for (pos, &e) in order.iter().enumerate() {
                if pos == 0 && opts.fix_first_label {
                    continue;
                }
                let (u, v) = graph.edge(e);
                let hub = match (graph.degree(u), graph.degree(v)) {
                    (1, d) if d > 1 => v,
                    (d, 1) if d > 1 => u,
                    _ => continue,
                };
                twin_prev[pos] = last_at[hub];
                last_at[hub] = Some(pos);
            }
        }
        Problem {
            graph,
            group,
            k,
            add,
            order,
            twin_prev,
        }
    }

    fn first_labels(&self, fix: bool) -> Vec<usize> {
        if fix && self.group.factor_orders().len() == 1 {
            let k = self.k;
            let mut reps = vec![0];
            reps.extend((1..k).filter(|d| k % d == 0));
            reps
        } else {
            (0..self.k).collect()
        }
    }

    #[inline]
    fn plus(&self, a: usize, b: usize) -> usize {
        match &self.add {
            Some(t) => t[a * self.k + b] as usize,
            None => self.group.add_idx(a, b),
        }
    }

    #[inline]
    fn minus(&self, a: usize, b: usize) -> usize {
        self.plus(a, self.group.neg_idx(b))
    }

    fn run_parallel(&self, firsts: &[usize], budget: &AtomicU64, threads: usize) -> Run {
        let next = AtomicUsize::new(0);
        let best = AtomicUsize::new(usize::MAX);
        let results: Mutex<Vec<Option<Run>>> = Mutex::new((0..firsts.len()).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..threads.min(firsts.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= firsts.len() {
                        break;
                    }
                    if best.load(Ordering::SeqCst) < i {
                        continue;
                    }
                    let stop = StopWhen { best: &best, index: i };
                    let r = self.run(&firsts[i..=i], budget, Some(&stop));
                    if matches!(r, Run::Found(_)) {
                        best.fetch_min(i, Ordering::SeqCst);
                    }
                    results.lock().expect("results lock")[i] = Some(r);
                });
            }
        });
        let results = results.into_inner().expect("results lock");
        let mut unknown = false;
        for r in results {
            match r {
                Some(Run::Found(l)) => return Run::Found(l),
                Some(Run::Unknown) | None => unknown = true,
                Some(Run::NotFound) => {}
            }
        }
        if unknown {
            Run::Unknown
        } else {
            Run::NotFound
        }
    }

    /// Iterative backtracking with the first edge restricted to `firsts`.
    fn run(&self, firsts: &[usize], budget: &AtomicU64, stop: Option<&StopWhen>) -> Run {
        let g = self.graph;
        let m = self.order.len();
        let k = self.k;
        let words = k.div_ceil(64);
        let mut used = vec![0u64; g.n() * words];
        let mut remaining: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
        let mut weight = vec![0usize; g.n()];
        let mut label = vec![usize::MAX; g.edge_count()];
        // Next candidate index per depth; at depth 0 it indexes `firsts`.
        let mut cursor = vec![0usize; m + 1];
        let mut depth = 0usize;
        let mut local = 0u64;
        let batch = budget.load(Ordering::Relaxed).clamp(1, 4096);
        let is_used = |used: &[u64], v: usize, l: usize| used[v * words + l / 64] >> (l % 64) & 1 == 1;
        loop {
            if depth == m {
                return Run::Found(label);
            }
            let e = self.order[depth];
            let (u, v) = g.edge(e);
            let floor = self.twin_prev[depth].map_or(0, |p| label[self.order[p]] + 1);
            let mut placed = false;
            loop {
                let l = if depth == 0 {
                    match firsts.get(cursor[0]) {
                        Some(&l) => l,
                        None => break,
                    }
                } else {
                    let c = cursor[depth].max(floor);
                    if c >= k {
                        break;
                    }
                    cursor[depth] = c;
                    c
                };
                cursor[depth] += 1;
                local += 1;
                if local >= batch {
                    if !charge(budget, local) || stop.is_some_and(|s| s.triggered()) {
                        return Run::Unknown;
                    }
                    local = 0;
                }
                if is_used(&used, u, l) || is_used(&used, v, l) {
                    continue;
                }
                // Apply.
                label[e] = l;
                used[u * words + l / 64] |= 1 << (l % 64);
                used[v * words + l / 64] |= 1 << (l % 64);
                weight[u] = self.plus(weight[u], l);
                weight[v] = self.plus(weight[v], l);
                remaining[u] -= 1;
                remaining[v] -= 1;
                let ok = (remaining[u] > 0 || self.saturated_ok(u, &remaining, &weight))
                    && (remaining[v] > 0 || self.saturated_ok(v, &remaining, &weight));
                if ok {
                    placed = true;
                    break;
                }
                self.undo(e, l, &mut used, &mut weight, &mut remaining, words);
                label[e] = usize::MAX;
            }
            if placed {
                depth += 1;
                cursor[depth] = 0;
                continue;
            }
            if depth == 0 {
                charge(budget, local);
                return Run::NotFound;
            }
            depth -= 1;
            let e = self.order[depth];
            let l = label[e];
            self.undo(e, l, &mut used, &mut weight, &mut remaining, words);
            label[e] = usize::MAX;
        }
    }

    fn undo(&self, e: usize, l: usize, used: &mut [u64], weight: &mut [usize], remaining: &mut [usize], words: usize) {
        let (u, v) = self.graph.edge(e);
        used[u * words + l / 64] &= !(1 << (l % 64));
        used[v * words + l / 64] &= !(1 << (l % 64));
        weight[u] = self.minus(weight[u], l);
        weight[v] = self.minus(weight[v], l);
        remaining[u] += 1;
        remaining[v] += 1;
    }

    fn saturated_ok(&self, x: usize, remaining: &[usize], weight: &[usize]) -> bool {
        self.graph
            .neighbors(x)
            .iter()
            .all(|&(y, _)| remaining[y] > 0 || weight[y] != weight[x])
    }
}

/// Takes `n` trials from the shared budget; false once it is used up.
fn charge(budget: &AtomicU64, n: u64) -> bool {
    budget
        .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |b| b.checked_sub(n).filter(|&r| r > 0))
        .is_ok()
}

struct StopWhen<'a> {
    best: &'a AtomicUsize,
    index: usize,
}

impl StopWhen<'_> {
    fn triggered(&self) -> bool {
        self.best.load(Ordering::SeqCst) < self.index
    }
}

/// Edges in DFS order; a visited vertex contributes all its unordered
/// edges at once, neighbors in increasing id order.
fn dfs_edge_order(graph: &Graph) -> Vec<usize> {
    let n = graph.n();
    let mut seen = vec![false; n];
    let mut taken = vec![false; graph.edge_count()];
    let mut order = Vec::with_capacity(graph.edge_count());
    for comp in graph.components() {
        let start = *comp
            .iter()
            .max_by_key(|&&v| (graph.degree(v), std::cmp::Reverse(v)))
            .expect("component is nonempty");
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            let mut nbrs: Vec<(usize, usize)> = graph.neighbors(v).to_vec();
            nbrs.sort_unstable();
            for &(_, e) in &nbrs {
                if !taken[e] {
                    taken[e] = true;
                    order.push(e);
                }
            }
            for &(w, _) in nbrs.iter().rev() {
                if !seen[w] {
                    stack.push(w);
                }
            }
        }
    }
    order
}

/// Per-group outcome in an index table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    Colorable,
    NotColorable,
    /// The order is below the maximum degree, so no proper labeling exists.
    BelowMaxDegree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderRow {
    pub order: u64,
    pub groups: Vec<(String, Feasibility)>,
}

impl OrderRow {
    pub fn all_colorable(&self) -> bool {
        self.groups.iter().all(|(_, f)| *f == Feasibility::Colorable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub index: u64,
    pub table: Vec<OrderRow>,
}

/// Least `k >= 2` such that `Z_k` admits a twin coloring.
pub fn twin_index_exact(graph: &Graph, k_max: u64) -> Result<IndexReport, OracleError> {
    twin_index_exact_with(graph, k_max, &SearchOptions::default())
}

pub fn twin_index_exact_with(graph: &Graph, k_max: u64, opts: &SearchOptions) -> Result<IndexReport, OracleError> {
    index_scan(graph, k_max, opts, |k| vec![AbelianGroup::cyclic(k).expect("k >= 2")])
}

/// Least `k >= 2` such that every Abelian group of order `k` admits a twin
/// coloring. The table lists each group tried at each order.
pub fn group_twin_index_exact(graph: &Graph, k_max: u64) -> Result<IndexReport, OracleError> {
    group_twin_index_exact_with(graph, k_max, &SearchOptions::default())
}

pub fn group_twin_index_exact_with(
    graph: &Graph,
    k_max: u64,
    opts: &SearchOptions,
) -> Result<IndexReport, OracleError> {
    index_scan(graph, k_max, opts, |k| groups_of_order(k).expect("valid order"))
}

fn index_scan(
    graph: &Graph,
    k_max: u64,
    opts: &SearchOptions,
    groups: impl Fn(u64) -> Vec<AbelianGroup>,
) -> Result<IndexReport, OracleError> {
    if graph.has_isolated_edge() {
        return Err(OracleError::IsolatedEdge);
    }
    let delta = graph.max_degree() as u64;
    let mut table = Vec::new();
    for k in 2..=k_max {
        let mut row = OrderRow {
            order: k,
            groups: Vec::new(),
        };
        for g in groups(k) {
            let f = if k < delta {
                Feasibility::BelowMaxDegree
            } else {
                match exists_coloring(graph, &g, opts) {
                    SearchOutcome::Found(_) => Feasibility::Colorable,
                    SearchOutcome::NotFound => Feasibility::NotColorable,
                    SearchOutcome::Unknown => {
                        return Err(OracleError::Inconclusive { group: g.to_string() })
                    }
                }
            };
            row.groups.push((g.to_string(), f));
        }
        let done = row.all_colorable();
        table.push(row);
        if done {
            return Ok(IndexReport { index: k, table });
        }
    }
    Err(OracleError::NotFoundWithin { k_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(k: u64) -> AbelianGroup {
        AbelianGroup::cyclic(k).unwrap()
    }

    fn found(g: &Graph, grp: &AbelianGroup) -> bool {
        match exists_coloring(g, grp, &SearchOptions::default()) {
            SearchOutcome::Found(l) => {
                assert!(verify_twin(g, &l).unwrap().passed());
                true
            }
            SearchOutcome::NotFound => false,
            SearchOutcome::Unknown => panic!("budget"),
        }
    }

    #[test]
    fn search_examples() {
        assert!(!found(&Graph::star(5), &AbelianGroup::elementary(2, 3).unwrap()));
        for n in 3..=12 {
            assert!(found(&Graph::path(n), &z(3)), "P_{n}");
        }
        assert!(!found(&Graph::star(5), &z(6)));
        assert!(found(&Graph::star(5), &z(7)));
    }

    #[test]
    fn index_examples() {
        assert_eq!(twin_index_exact(&Graph::path(5), 10).unwrap().index, 3);
        assert_eq!(twin_index_exact(&Graph::star(5), 10).unwrap().index, 7);
        let k3 = twin_index_exact(&Graph::complete(3), 10).unwrap();
        assert_eq!(k3.index, 3);
        assert!(matches!(
            twin_index_exact(&Graph::path(2), 5),
            Err(OracleError::IsolatedEdge)
        ));
        assert_eq!(
            twin_index_exact(&Graph::star(5), 6).unwrap_err(),
            OracleError::NotFoundWithin { k_max: 6 }
        );
        let s5 = group_twin_index_exact(&Graph::star(5), 10).unwrap();
        let t5 = twin_index_exact(&Graph::star(5), 10).unwrap();
        assert!(s5.index >= t5.index && s5.index <= 8);
        assert!(group_twin_index_exact(&Graph::path(4), 10).unwrap().index <= 5);
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let opts = SearchOptions {
            budget: 10,
            ..SearchOptions::default()
        };
        let g = Graph::complete(5);
        assert!(matches!(exists_coloring(&g, &z(5), &opts), SearchOutcome::Unknown));
    }

    #[test]
    fn reductions_do_not_change_answers() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(3..=7);
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            let g = Graph::new(n, &edges).unwrap();
            if g.has_isolated_edge() || g.edge_count() == 0 {
                continue;
            }
            let k = rng.gen_range(g.max_degree().max(3)..=g.max_degree() + 3) as u64;
            let grp = z(k);
            let plain = SearchOptions {
                leaf_symmetry: false,
                ..SearchOptions::default()
            };
            let fixed = SearchOptions {
                fix_first_label: true,
                ..SearchOptions::default()
            };
            let threaded = SearchOptions {
                threads: 3,
                ..SearchOptions::default()
            };
            let base = exists_coloring(&g, &grp, &plain).is_found();
            assert_eq!(base, exists_coloring(&g, &grp, &SearchOptions::default()).is_found());
            assert_eq!(base, exists_coloring(&g, &grp, &fixed).is_found());
            assert_eq!(base, exists_coloring(&g, &grp, &threaded).is_found());
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            assert_eq!(base, exists_coloring(&g.relabeled(&perm), &grp, &plain).is_found());
        }
    }

    #[test]
    fn threaded_witness_matches_sequential() {
        let g = Graph::cycle(6);
        let grp = z(5);
        let seq = exists_coloring(&g, &grp, &SearchOptions::default());
        let par = exists_coloring(
            &g,
            &grp,
            &SearchOptions {
                threads: 4,
                ..SearchOptions::default()
            },
        );
        match (seq, par) {
            (SearchOutcome::Found(a), SearchOutcome::Found(b)) => assert_eq!(a, b),
            (SearchOutcome::NotFound, SearchOutcome::NotFound) => {}
            _ => panic!("threaded and sequential runs disagree"),
        }
    }
}
