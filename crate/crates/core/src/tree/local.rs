//! Seeded top-down search for trees that no constructive labeling covers.
//!
//! Each vertex picks a set of child labels whose sum keeps its weight away
//! from its parent's, then spreads the labels so that leaf children avoid
//! that weight and edges into a degree-2 vertex with a leaf child avoid zero.
//! A vertex that runs out of tries restarts the whole tree with fresh
//! randomness. Results are verified before they are returned.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, RootedTree};
use crate::group::AbelianGroup;
use crate::labeling::{verify_twin, EdgeLabeling};

const TRIES_PER_VERTEX: usize = 256;

/// Returns a verified labeling or `None` once `restarts` passes have failed.
pub fn color_tree_local(tree: &Graph, group: &AbelianGroup, seed: u64, restarts: usize) -> Option<EdgeLabeling> {
    if !tree.is_tree() || tree.n() < 3 {
        return None;
    }
    let root = (0..tree.n()).max_by_key(|&v| (tree.degree(v), std::cmp::Reverse(v)))?;
    let rooted = RootedTree::new(tree, root).ok()?;
    let n = tree.n();
    let leaf: Vec<bool> = (0..n).map(|v| rooted.children[v].is_empty()).collect();
    let fragile: Vec<bool> = (0..n)
        .map(|v| rooted.children[v].len() == 1 && leaf[rooted.children[v][0].0])
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        if let Some(labels) = one_pass(&rooted, group, &leaf, &fragile, &mut rng) {
            let labeling = EdgeLabeling::from_indices(tree, group, labels);
            if verify_twin(tree, &labeling).is_ok_and(|r| r.passed()) {
                return Some(labeling);
            }
        }
    }
    None
}

fn one_pass(
    rooted: &RootedTree,
    group: &AbelianGroup,
    leaf: &[bool],
    fragile: &[bool],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let k = group.len();
    let mut labels = vec![usize::MAX; rooted.graph.edge_count()];
    let mut weight = vec![0usize; rooted.graph.n()];
    for &v in &rooted.bfs_order {
        let kids = &rooted.children[v];
        if kids.is_empty() {
            continue;
        }
        let (f, w_parent) = match rooted.parent_edge[v] {
            Some(pe) => (Some(labels[pe]), rooted.parent[v].map(|p| weight[p])),
            None => (None, None),
        };
        let pool: Vec<usize> = (0..k).filter(|&x| Some(x) != f).collect();
        let kinds: Vec<(bool, bool)> = kids.iter().map(|&(c, _)| (leaf[c], fragile[c])).collect();
        let (chosen, w) = choose(group, &pool, f.unwrap_or(0), w_parent, &kinds, rng)?;
        for (&(_, e), &l) in kids.iter().zip(&chosen) {
            labels[e] = l;
        }
        weight[v] = w;
        for (&(c, _), &l) in kids.iter().zip(&chosen) {
            weight[c] = l;
        }
    }
    Some(labels)
}

/// Picks labels for children described by `(is_leaf, is_fragile)` and
/// returns them with the resulting vertex weight `base + sum`.
fn choose(
    group: &AbelianGroup,
    pool: &[usize],
    base: usize,
    w_parent: Option<usize>,
    kinds: &[(bool, bool)],
    rng: &mut ChaCha8Rng,
) -> Option<(Vec<usize>, usize)> {
    let r = kinds.len();
    if r > pool.len() {
        return None;
    }
    let mut scratch = pool.to_vec();
    for _ in 0..TRIES_PER_VERTEX {
        let mut set = sample(&mut scratch, r, rng);
        let w = set.iter().fold(base, |acc, &x| group.add_idx(acc, x));
        if Some(w) == w_parent {
            continue;
        }
        let ok = |label: usize, (is_leaf, is_fragile): (bool, bool)| !(is_leaf && label == w || is_fragile && label == 0);
        set.shuffle(rng);
        for i in 0..r {
            if ok(set[i], kinds[i]) {
                continue;
            }
            if let Some(j) = (0..r).find(|&j| ok(set[j], kinds[i]) && ok(set[i], kinds[j])) {
                set.swap(i, j);
            }
        }
        if (0..r).all(|i| ok(set[i], kinds[i])) {
            return Some((set, w));
        }
    }
    None
}

/// Uniform `r`-subset of `items`, drawn from whichever side is smaller.
fn sample(items: &mut [usize], r: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let m = items.len();
    if 2 * r <= m {
        partial_shuffle(items, r, rng);
        items[..r].to_vec()
    } else {
        partial_shuffle(items, m - r, rng);
        items[m - r..].to_vec()
    }
}

fn partial_shuffle(items: &mut [usize], count: usize, rng: &mut ChaCha8Rng) {
    for i in 0..count {
        let j = rng.gen_range(i..items.len());
        items.swap(i, j);
    }
}
