//! Groups of odd order.

use super::{build_labeling, check_tree, pairs, single_child_label, LabelRule, Result, TreeError};
use crate::combinatorics::pair_sum_idx;
use crate::graph::{Graph, TreeClass};
use crate::group::AbelianGroup;
use crate::labeling::EdgeLabeling;

/// Labels a tree with a group of odd order `k >= max(7, Δ+2)`, except a
/// `(k-2)`-regular tree with `(Z_3)^p`.
///
/// The root is a non-leaf of minimum degree. Every set of child edges of a
/// non-root vertex with more than one child sums to zero and avoids `0` and
/// the parent edge's label.
pub fn color_tree_odd(tree: &Graph, group: &AbelianGroup) -> Result<EdgeLabeling> {
    let class = check_tree(tree)?;
    let k = group.order();
    if k % 2 == 0 {
        return Err(TreeError::PreconditionViolated("group order must be odd".into()));
    }
    let need = 7.max(class.max_degree as u64 + 2);
    if k < need {
        return Err(TreeError::PreconditionViolated(format!(
            "odd order {k} is below max(7, Δ+2) = {need}"
        )));
    }
    if class.is_regular_tree && class.max_degree as u64 + 2 == k && group.is_elementary(3) {
        return Err(TreeError::ExcludedInstance(format!(
            "{}-regular tree with {group}",
            class.max_degree
        )));
    }
    let root = (0..tree.n())
        .filter(|&v| tree.degree(v) >= 2)
        .min_by_key(|&v| (tree.degree(v), v))
        .expect("a tree of order >= 3 has a non-leaf");
    let rule = OddRule { group, class };
    build_labeling(tree, root, group, &rule)
}

struct OddRule<'a> {
    group: &'a AbelianGroup,
    class: TreeClass,
}

impl LabelRule for OddRule<'_> {
    fn root_labels(&self, deg: usize) -> Result<Vec<usize>> {
        let g = self.group;
        let k = g.len();
        if deg % 2 == 0 {
            return pairs(g, deg / 2, &[]);
        }
        if deg + 2 < k {
            // x + y + a = 0 with x, y, a nonzero and distinct.
            let a = 1;
            let (x, y) = pair_sum_idx(g, a, 0)?;
            let mut labels = vec![x, y, a];
            labels.extend(pairs(g, (deg - 3) / 2, &[0, x, y, a])?);
            return Ok(labels);
        }
        if deg + 2 == k {
            if !self.class.is_regular_tree || deg != self.class.max_degree {
                return Err(TreeError::ConstructionFailed(format!(
                    "root degree {deg} = k-2 but the tree is not {deg}-regular"
                )));
            }
            let a = (1..k)
                .find(|&a| g.add_idx(a, g.double_idx(a)) != 0)
                .ok_or_else(|| TreeError::ExcludedInstance(format!("every element of {g} has order 3")))?;
            let b = g.neg_idx(g.double_idx(a));
            let mut labels = vec![0, a, b];
            labels.extend(pairs(g, (deg - 3) / 2, &[0, a, b, g.neg_idx(a), g.neg_idx(b)])?);
            return Ok(labels);
        }
        Err(TreeError::PreconditionViolated(format!("root degree {deg} exceeds k-2")))
    }

    fn child_labels(&self, r: usize, f: usize, w_parent: usize) -> Result<Vec<usize>> {
        let g = self.group;
        let nf = g.neg_idx(f);
        if r % 2 == 0 {
            return pairs(g, r / 2, &[0, f, nf]);
        }
        if r == 1 {
            return Ok(vec![single_child_label(g, f, w_parent)?]);
        }
        if f == 0 {
            return Err(TreeError::ConstructionFailed(
                "odd child count below an edge labeled 0".into(),
            ));
        }
        // {-f, x, y} with x + y = f, so the set sums to zero.
        let (x, y) = pair_sum_idx(g, nf, 0)?;
        let mut labels = vec![nf, x, y];
        labels.extend(pairs(g, (r - 3) / 2, &[0, f, nf, x, y])?);
        Ok(labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RootedTree;
    use crate::labeling::verify_twin;

    fn z(k: u64) -> AbelianGroup {
        AbelianGroup::cyclic(k).unwrap()
    }

    #[test]
    fn path_three_with_z7() {
        let p3 = Graph::path(3);
        let lab = color_tree_odd(&p3, &z(7)).unwrap();
        let mut labels = vec![lab.label_index(0), lab.label_index(1)];
        labels.sort_unstable();
        assert_eq!(labels, vec![1, 6]);
        assert_eq!(lab.weight_index(1), 0);
        assert!(verify_twin(&p3, &lab).unwrap().passed());
    }

    #[test]
    fn star_six_with_z9() {
        let s = Graph::star(6);
        let lab = color_tree_odd(&s, &z(9)).unwrap();
        assert_eq!(lab.weight_index(0), 0);
        let mut leaves: Vec<usize> = (1..=6).map(|v| lab.weight_index(v)).collect();
        leaves.sort_unstable();
        leaves.dedup();
        assert_eq!(leaves.len(), 6);
        assert!(!leaves.contains(&0));
        assert!(lab.is_nowhere_zero());
    }

    #[test]
    fn excluded_and_preconditions() {
        let g = AbelianGroup::elementary(3, 3).unwrap();
        assert!(matches!(
            color_tree_odd(&Graph::star(25), &g),
            Err(TreeError::ExcludedInstance(_))
        ));
        assert!(matches!(
            color_tree_odd(&Graph::star(5), &z(5)),
            Err(TreeError::PreconditionViolated(_))
        ));
        assert!(matches!(
            color_tree_odd(&Graph::star(5), &z(8)),
            Err(TreeError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn regular_tree_at_k_minus_two_uses_zero_a_b() {
        // K_{1,7} with Z_9: root weight is -a.
        let s = Graph::star(7);
        let lab = color_tree_odd(&s, &z(9)).unwrap();
        assert!(verify_twin(&s, &lab).unwrap().passed());
        assert!(!lab.is_nowhere_zero());
        let g = AbelianGroup::new(&[3, 9]).unwrap();
        let two_level = {
            let mut edges: Vec<(usize, usize)> = (1..=25).map(|i| (0, i)).collect();
            edges.extend((26..50).map(|i| (1, i)));
            Graph::new(50, &edges).unwrap()
        };
        let lab = color_tree_odd(&two_level, &g).unwrap();
        assert!(verify_twin(&two_level, &lab).unwrap().passed());
    }

    #[test]
    fn child_sets_sum_to_zero_and_avoid_parent_label() {
        let mut edges = Vec::new();
        let mut next = 1;
        // Root with 3 children; each child gets 1..=6 further children.
        for c in 1..=3 {
            edges.push((0, c));
        }
        next += 3;
        for (i, c) in (1..=3).enumerate() {
            for _ in 0..(2 * i + 2) {
                edges.push((c, next));
                next += 1;
            }
        }
        let t = Graph::new(next, &edges).unwrap();
        let g = z(11);
        let lab = color_tree_odd(&t, &g).unwrap();
        assert!(verify_twin(&t, &lab).unwrap().passed());
        let rooted = RootedTree::new(&t, 0).unwrap();
        for v in 1..t.n() {
            let kids = &rooted.children[v];
            if kids.len() > 1 {
                let f = lab.label_index(rooted.parent_edge[v].unwrap());
                let sum = kids.iter().fold(0, |acc, &(_, e)| g.add_idx(acc, lab.label_index(e)));
                assert_eq!(sum, 0);
                assert!(kids.iter().all(|&(_, e)| ![0, f].contains(&lab.label_index(e))));
                assert_eq!(lab.weight_index(v), f);
            }
        }
    }
}
