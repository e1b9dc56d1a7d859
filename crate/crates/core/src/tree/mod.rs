//! Twin edge colorings of trees: the three constructive labelings, an exact
//! dynamic program, and a dispatcher that picks between them.

mod exact;
mod involution;
mod local;
mod odd;
mod star;

use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{inverse_pairs_idx, CombinatoricsError};
use crate::graph::{classify_tree, Graph, GraphError, RootedTree, TreeClass};
use crate::group::AbelianGroup;
use crate::labeling::{verify_twin, EdgeLabeling};
use crate::oracle::{exists_coloring, SearchOptions, SearchOutcome};

pub use exact::{color_tree_exact, ExactOutcome};
pub use involution::{color_tree_multi_involution, color_tree_one_involution};
pub use local::color_tree_local;
pub use odd::color_tree_odd;
pub use star::{star_obstruction_check, star_triple_check, StarVerdict};

/// Default node budget for the exact fallbacks.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

const LOCAL_RESTARTS: usize = 8;

/// Largest group order handled by the bitmask dynamic program.
pub const EXACT_DP_MAX_ORDER: u64 = 128;

// The dispatcher prefers the dynamic program for small groups and the
// backtracking search above this order.
const DP_PREFERRED_MAX_ORDER: u64 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("input is not a tree")]
    NotATree,
    #[error("tree must have at least 3 vertices")]
    TooSmall,
    #[error("a component is a single edge")]
    IsolatedEdge,
    #[error("group of order {actual} is below the bound {required}")]
    GroupTooSmall { required: u64, actual: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("excluded instance: {0}")]
    ExcludedInstance(String),
    #[error("no coloring found ({})", if *proven { "search complete" } else { "budget exhausted" })]
    NoColoringFound { proven: bool },
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
}

impl From<GraphError> for TreeError {
    fn from(_: GraphError) -> Self {
        TreeError::NotATree
    }
}

type Result<T> = std::result::Result<T, TreeError>;

/// Which construction produced a labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeMethod {
    Exact,
    OddOrder,
    OneInvolution,
    MultiInvolution,
    Extension,
    /// Seeded randomized top-down search.
    Local,
    Fallback,
}

#[derive(Debug, Clone)]
pub struct TreeColoring {
    pub labeling: EdgeLabeling,
    pub method: TreeMethod,
}

/// The order that always suffices for `tree`: `Δ+2` when `Δ` is odd and the
/// tree is not `(3^p-2)`-regular, `Δ+3` otherwise.
pub fn tree_bound(class: &TreeClass) -> u64 {
    let d = class.max_degree as u64;
    if d % 2 == 1 && class.three_power_regular.is_none() {
        d + 2
    } else {
        d + 3
    }
}

/// Colors a tree of order at least 3 with any group of order at least
/// [`tree_bound`].
pub fn color_tree(tree: &Graph, group: &AbelianGroup) -> Result<TreeColoring> {
    color_tree_with_budget(tree, group, DEFAULT_BUDGET)
}

pub fn color_tree_with_budget(tree: &Graph, group: &AbelianGroup, budget: u64) -> Result<TreeColoring> {
    let class = check_tree(tree)?;
    let required = tree_bound(&class);
    if group.order() < required {
        return Err(TreeError::GroupTooSmall {
            required,
            actual: group.order(),
        });
    }
    let k = group.order();
    let delta = class.max_degree;
    if delta <= 5 && k <= DP_PREFERRED_MAX_ORDER {
        return match exact_or_fail(tree, group, budget, TreeMethod::Exact) {
            Err(TreeError::NoColoringFound { proven: false }) => local_or_give_up(tree, group),
            other => other,
        };
    }
    let attempt = if k % 2 == 1 {
        Some((color_tree_odd(tree, group), TreeMethod::OddOrder))
    } else if group.involution_count() == 1 {
        (delta >= 5 && class.degree2_rule_holds)
            .then(|| (color_tree_one_involution(tree, group), TreeMethod::OneInvolution))
    } else if class.degree2_rule_holds && delta >= 5 {
        match color_tree_multi_involution(tree, group) {
            Err(TreeError::ExcludedInstance(_)) => {
                involution::color_tree_extension(tree, group).map(|l| (Ok(l), TreeMethod::Extension))
            }
            other => Some((other, TreeMethod::MultiInvolution)),
        }
    } else {
        None
    };
    match attempt {
        Some((Ok(labeling), method)) => Ok(TreeColoring { labeling, method }),
        Some((Err(e @ TreeError::ConstructionFailed(_)), _)) => Err(e),
        _ => local_or_give_up(tree, group).or_else(|_| exact_or_fail(tree, group, budget, TreeMethod::Fallback)),
    }
}

fn local_or_give_up(tree: &Graph, group: &AbelianGroup) -> Result<TreeColoring> {
    color_tree_local(tree, group, 0, LOCAL_RESTARTS)
        .map(|labeling| TreeColoring {
            labeling,
            method: TreeMethod::Local,
        })
        .ok_or(TreeError::NoColoringFound { proven: false })
}

/// Picks the constructive lemma or exact method named by `method`.
pub fn color_tree_with_method(
    tree: &Graph,
    group: &AbelianGroup,
    method: TreeMethod,
    budget: u64,
) -> Result<TreeColoring> {
    let labeling = match method {
        TreeMethod::OddOrder => color_tree_odd(tree, group)?,
        TreeMethod::OneInvolution => color_tree_one_involution(tree, group)?,
        TreeMethod::MultiInvolution => color_tree_multi_involution(tree, group)?,
        TreeMethod::Extension => involution::color_tree_extension(tree, group)
            .ok_or_else(|| TreeError::PreconditionViolated("extension does not apply".into()))?,
        TreeMethod::Local => {
            check_tree(tree)?;
            return local_or_give_up(tree, group);
        }
        TreeMethod::Exact | TreeMethod::Fallback => {
            check_tree(tree)?;
            return exact_or_fail(tree, group, budget, method);
        }
    };
    Ok(TreeColoring { labeling, method })
}

fn exact_or_fail(tree: &Graph, group: &AbelianGroup, budget: u64, method: TreeMethod) -> Result<TreeColoring> {
    let found = |labeling| Ok(TreeColoring { labeling, method });
    let k = group.order();
    let search = || {
        let opts = SearchOptions {
            budget,
            ..SearchOptions::default()
        };
        exists_coloring(tree, group, &opts)
    };
    let dp = || {
        if k <= EXACT_DP_MAX_ORDER {
            color_tree_exact(tree, group, budget)
        } else {
            ExactOutcome::Unknown
        }
    };
    let first = if k <= DP_PREFERRED_MAX_ORDER { dp() } else { from_search(search()) };
    match first {
        ExactOutcome::Found(l) => found(l),
        ExactOutcome::NotFound => Err(TreeError::NoColoringFound { proven: true }),
        ExactOutcome::Unknown => match if k <= DP_PREFERRED_MAX_ORDER { from_search(search()) } else { dp() } {
            ExactOutcome::Found(l) => found(l),
            ExactOutcome::NotFound => Err(TreeError::NoColoringFound { proven: true }),
            ExactOutcome::Unknown => Err(TreeError::NoColoringFound { proven: false }),
        },
    }
}

fn from_search(outcome: SearchOutcome) -> ExactOutcome {
    match outcome {
        SearchOutcome::Found(l) => ExactOutcome::Found(l),
        SearchOutcome::NotFound => ExactOutcome::NotFound,
        SearchOutcome::Unknown => ExactOutcome::Unknown,
    }
}

/// Colors every component of a forest. Components of order at least 3 are
/// colored independently; isolated vertices are skipped.
pub fn color_forest(forest: &Graph, group: &AbelianGroup) -> Result<EdgeLabeling> {
    if !forest.is_forest() {
        return Err(TreeError::NotATree);
    }
    if forest.has_isolated_edge() {
        return Err(TreeError::IsolatedEdge);
    }
    let mut labels = vec![0; forest.edge_count()];
    for comp in forest.components() {
        if comp.len() < 3 {
            continue;
        }
        let sub = forest.induced(&comp);
        let colored = color_tree(&sub, group)?;
        for (e, &(u, v)) in sub.edges().iter().enumerate() {
            let id = forest
                .edge_id(comp[u], comp[v])
                .expect("induced edge exists in the forest");
            labels[id] = colored.labeling.label_index(e);
        }
    }
    Ok(EdgeLabeling::from_indices(forest, group, labels))
}

pub(crate) fn check_tree(tree: &Graph) -> Result<TreeClass> {
    if !tree.is_tree() {
        return Err(TreeError::NotATree);
    }
    if tree.n() < 3 {
        return Err(TreeError::TooSmall);
    }
    Ok(classify_tree(tree)?)
}

// ---------------------------------------------------------------------------
// Shared top-down builder
// ---------------------------------------------------------------------------

/// Chooses child-edge labels vertex by vertex, root first.
pub(crate) trait LabelRule {
    fn root_labels(&self, degree: usize) -> Result<Vec<usize>>;
    /// Labels for the `r` child edges of a non-root vertex whose parent edge
    /// carries `f` and whose parent has weight `w_parent`.
    fn child_labels(&self, r: usize, f: usize, w_parent: usize) -> Result<Vec<usize>>;
}

/// Runs `rule` in BFS order from `root` and verifies the result.
pub(crate) fn build_labeling(
    tree: &Graph,
    root: usize,
    group: &AbelianGroup,
    rule: &dyn LabelRule,
) -> Result<EdgeLabeling> {
    let rooted = RootedTree::new(tree, root)?;
    let mut labels = vec![usize::MAX; tree.edge_count()];
    let mut weight = vec![0usize; tree.n()];
    for &v in &rooted.bfs_order {
        let kids = &rooted.children[v];
        if kids.is_empty() {
            continue;
        }
        let chosen = match rooted.parent_edge[v] {
            None => rule.root_labels(kids.len())?,
            Some(pe) => {
                let parent = rooted.parent[v].expect("non-root has a parent");
                rule.child_labels(kids.len(), labels[pe], weight[parent])?
            }
        };
        if chosen.len() != kids.len() {
            return Err(TreeError::ConstructionFailed(format!(
                "vertex {v}: {} labels for {} children",
                chosen.len(),
                kids.len()
            )));
        }
        for (&(c, e), &l) in kids.iter().zip(&chosen) {
            labels[e] = l;
            weight[v] = group.add_idx(weight[v], l);
            weight[c] = group.add_idx(weight[c], l);
        }
    }
    let labeling = EdgeLabeling::from_indices(tree, group, labels);
    let report = verify_twin(tree, &labeling).expect("labeling matches the tree");
    if !report.passed() {
        return Err(TreeError::ConstructionFailed(format!(
            "output failed verification: {:?}",
            report.violations.first()
        )));
    }
    Ok(labeling)
}

/// `count` inverse pairs avoiding `forbidden`, flattened.
pub(crate) fn pairs(group: &AbelianGroup, count: usize, forbidden: &[usize]) -> Result<Vec<usize>> {
    Ok(inverse_pairs_idx(group, count, forbidden)?
        .into_iter()
        .flat_map(|(d, e)| [d, e])
        .collect())
}

/// First nonzero `g` outside `{f, w_parent - f}`.
pub(crate) fn single_child_label(group: &AbelianGroup, f: usize, w_parent: usize) -> Result<usize> {
    let avoid = group.sub_idx(w_parent, f);
    (1..group.len())
        .find(|&g| g != f && g != avoid)
        .ok_or_else(|| TreeError::ConstructionFailed("no label for a single child".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::groups_of_order;

    fn z(k: u64) -> AbelianGroup {
        AbelianGroup::cyclic(k).unwrap()
    }

    #[test]
    fn bound_values() {
        let b = |g: &Graph| tree_bound(&classify_tree(g).unwrap());
        assert_eq!(b(&Graph::path(5)), 5);
        assert_eq!(b(&Graph::star(3)), 5);
        assert_eq!(b(&Graph::star(5)), 7);
        assert_eq!(b(&Graph::star(7)), 10);
        assert_eq!(b(&Graph::star(6)), 9);
        assert_eq!(b(&Graph::star(25)), 28);
    }

    #[test]
    fn dispatcher_examples() {
        // Odd maximum degree 7, not regular, with Z_9.
        let mut edges: Vec<(usize, usize)> = (1..=7).map(|i| (0, i)).collect();
        edges.push((1, 8));
        edges.push((1, 9));
        let t = Graph::new(10, &edges).unwrap();
        let c = color_tree(&t, &z(9)).unwrap();
        assert_eq!(c.method, TreeMethod::OddOrder);
        assert!(verify_twin(&t, &c.labeling).unwrap().passed());

        let s25 = Graph::star(25);
        let g: AbelianGroup = "Z4xZ7".parse().unwrap();
        let c = color_tree(&s25, &g).unwrap();
        assert_eq!(c.method, TreeMethod::OneInvolution);
        assert!(verify_twin(&s25, &c.labeling).unwrap().passed());

        let p5 = Graph::path(5);
        let c = color_tree(&p5, &z(5)).unwrap();
        assert_eq!(c.method, TreeMethod::Exact);
        assert!(verify_twin(&p5, &c.labeling).unwrap().passed());

        assert_eq!(
            color_tree(&Graph::star(5), &z(6)).unwrap_err(),
            TreeError::GroupTooSmall { required: 7, actual: 6 }
        );
        assert_eq!(color_tree(&Graph::cycle(4), &z(7)).unwrap_err(), TreeError::NotATree);
        assert_eq!(color_tree(&Graph::path(2), &z(7)).unwrap_err(), TreeError::TooSmall);
    }

    #[test]
    fn regular_three_power_tree_with_all_groups_of_order_ten_and_twenty_eight() {
        for (star, k) in [(7, 10), (25, 28)] {
            let t = Graph::star(star);
            for g in groups_of_order(k).unwrap() {
                let c = color_tree(&t, &g).unwrap();
                assert!(verify_twin(&t, &c.labeling).unwrap().passed(), "{g}");
            }
        }
    }

    #[test]
    fn forests_are_colored_per_component() {
        let f = Graph::new(8, &[(0, 1), (1, 2), (3, 4), (4, 5), (4, 6)]).unwrap();
        let lab = color_forest(&f, &z(7)).unwrap();
        assert!(verify_twin(&f, &lab).unwrap().passed());
        let bad = Graph::new(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(color_forest(&bad, &z(7)).unwrap_err(), TreeError::IsolatedEdge);
    }
}
