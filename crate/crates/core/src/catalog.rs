//! Test-instance generators: every free tree of a given order, small forests
//! and random trees and graphs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::Graph;

/// Canonical string of a free tree: the smaller AHU code rooted at a center.
pub fn canonical_form(tree: &Graph) -> String {
    let n = tree.n();
    if n == 0 {
        return String::new();
    }
    centers(tree)
        .into_iter()
        .map(|c| ahu(tree, c, usize::MAX))
        .min()
        .expect("a tree has a center")
}

fn ahu(tree: &Graph, v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = tree
        .neighbors(v)
        .iter()
        .filter(|&&(w, _)| w != parent)
        .map(|&(w, _)| ahu(tree, w, v))
        .collect();
    kids.sort_unstable();
    format!("({})", kids.concat())
}

fn centers(tree: &Graph) -> Vec<usize> {
    let n = tree.n();
    let mut deg: Vec<usize> = (0..n).map(|v| tree.degree(v)).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &(w, _) in tree.neighbors(v) {
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer
}

/// All non-isomorphic trees on `n >= 1` vertices, in a fixed order.
pub fn free_trees(n: usize) -> Vec<Graph> {
    assert!(n >= 1, "trees need at least one vertex");
    let mut level = vec![Graph::new(1, &[]).expect("single vertex")];
    for m in 2..=n {
        let mut seen = BTreeMap::new();
        for t in &level {
            for v in 0..t.n() {
                let mut edges = t.edges().to_vec();
                edges.push((v, m - 1));
                let g = Graph::new(m, &edges).expect("adding a leaf keeps a tree");
                seen.entry(canonical_form(&g)).or_insert(g);
            }
        }
        level = seen.into_values().collect();
    }
    level
}

/// Disjoint union of `parts`, vertices numbered consecutively.
pub fn disjoint_union(parts: &[&Graph]) -> Graph {
    let mut edges = Vec::new();
    let mut offset = 0;
    for p in parts {
        edges.extend(p.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
        offset += p.n();
    }
    Graph::new(offset, &edges).expect("union of simple graphs")
}

/// All forests on at most `max_n` vertices whose components are trees of
/// order at least 3, up to isomorphism.
pub fn small_forests(max_n: usize) -> Vec<Graph> {
    let trees: Vec<Vec<Graph>> = (0..=max_n).map(|m| if m >= 3 { free_trees(m) } else { Vec::new() }).collect();
    // Components as (order, index) pairs in non-decreasing order.
    let mut all: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut cur = Vec::new();
    fn extend(
        trees: &[Vec<Graph>],
        left: usize,
        min: (usize, usize),
        cur: &mut Vec<(usize, usize)>,
        all: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if !cur.is_empty() {
            all.push(cur.clone());
        }
        for m in min.0..=left {
            let start = if m == min.0 { min.1 } else { 0 };
            for i in start..trees[m].len() {
                cur.push((m, i));
                extend(trees, left - m, (m, i), cur, all);
                cur.pop();
            }
        }
    }
    extend(&trees, max_n, (3, 0), &mut cur, &mut all);
    all.into_iter()
        .map(|parts| {
            let gs: Vec<&Graph> = parts.iter().map(|&(m, i)| &trees[m][i]).collect();
            disjoint_union(&gs)
        })
        .collect()
}

/// Random tree on `n >= 2` vertices with maximum degree exactly
/// `min(max_degree, n-1)`: a hub gets that many neighbors, and the rest
/// attach to random vertices below the cap, sometimes extending the most
/// recent vertex to grow long paths.
pub fn random_tree<R: Rng>(n: usize, max_degree: usize, rng: &mut R) -> Graph {
    assert!(n >= 2 && max_degree >= 1);
    let cap = max_degree.min(n - 1);
    let mut edges = Vec::with_capacity(n - 1);
    let mut deg = vec![0usize; n];
    let hub_kids = cap;
    for v in 1..=hub_kids {
        edges.push((0, v));
    }
    deg[0] = hub_kids;
    for d in deg.iter_mut().take(hub_kids + 1).skip(1) {
        *d = 1;
    }
    let mut open: Vec<usize> = (0..=hub_kids).filter(|&v| deg[v] < cap).collect();
    let path_bias: f64 = rng.gen_range(0.0..0.9);
    for v in hub_kids + 1..n {
        let u = if rng.gen_bool(path_bias) && deg[v - 1] < cap {
            v - 1
        } else {
            loop {
                let i = rng.gen_range(0..open.len());
                let u = open[i];
                if deg[u] < cap {
                    break u;
                }
                open.swap_remove(i);
            }
        };
        edges.push((u, v));
        deg[u] += 1;
        deg[v] = 1;
        if deg[v] < cap {
            open.push(v);
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Graph::new(n, &edges).expect("random tree").relabeled(&perm)
}

/// A tree in which every non-leaf has degree `d`, grown breadth-first until
/// it has at least `min_n` vertices.
pub fn regular_tree(d: usize, min_n: usize) -> Graph {
    assert!(d >= 2);
    let mut edges = Vec::new();
    let mut n = d + 1;
    edges.extend((1..=d).map(|v| (0, v)));
    let mut frontier: std::collections::VecDeque<usize> = (1..=d).collect();
    while n < min_n {
        let v = frontier.pop_front().expect("frontier never empties");
        for _ in 0..d - 1 {
            edges.push((v, n));
            frontier.push_back(n);
            n += 1;
        }
    }
    Graph::new(n, &edges).expect("regular tree")
}

/// Random connected graph: a random tree plus each other pair with
/// probability `p`.
pub fn random_connected_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    assert!(n >= 2);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    let tree: std::collections::HashSet<(usize, usize)> = edges.iter().copied().collect();
    for u in 0..n {
        for v in u + 1..n {
            if !tree.contains(&(u, v)) && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Graph::new(n, &edges).expect("random graph").relabeled(&perm)
}
