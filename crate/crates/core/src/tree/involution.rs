//! Groups of even order: one involution, or several.

use std::cell::RefCell;
use std::collections::HashMap;

use super::{build_labeling, check_tree, pairs, single_child_label, LabelRule, Result, TreeError};
use crate::combinatorics::{pair_sum_idx, partition_three_masks, two_avoiding_checked, TwoTorsion};
use crate::graph::{Graph, TreeClass};
use crate::group::AbelianGroup;
use crate::labeling::EdgeLabeling;

fn common_preconditions(class: &TreeClass, group: &AbelianGroup) -> Result<()> {
    let t = class.max_degree as u64;
    if t < 5 {
        return Err(TreeError::PreconditionViolated(format!("maximum degree {t} is below 5")));
    }
    if group.order() < t + 2 {
        return Err(TreeError::PreconditionViolated(format!(
            "order {} is below Δ+2 = {}",
            group.order(),
            t + 2
        )));
    }
    if !class.degree2_rule_holds {
        return Err(TreeError::PreconditionViolated(
            "a degree-2 vertex has no degree-2 neighbor".into(),
        ));
    }
    Ok(())
}

fn max_degree_root(tree: &Graph, delta: usize) -> usize {
    (0..tree.n()).find(|&v| tree.degree(v) == delta).expect("some vertex attains Δ")
}

/// Labels a tree with `Δ >= 5`, in which every degree-2 vertex has a
/// degree-2 neighbor, using a group with exactly one involution and order
/// at least `Δ+2`. The root has degree `Δ`; label `0` only appears among
/// child edges of vertices with more than one child.
pub fn color_tree_one_involution(tree: &Graph, group: &AbelianGroup) -> Result<EdgeLabeling> {
    let class = check_tree(tree)?;
    if group.involution_count() != 1 {
        return Err(TreeError::PreconditionViolated(
            "group must have exactly one involution".into(),
        ));
    }
    common_preconditions(&class, group)?;
    let iota = group.involution_indices()[0];
    let rule = OneInvolution { group, iota };
    build_labeling(tree, max_degree_root(tree, class.max_degree), group, &rule)
}

struct OneInvolution<'a> {
    group: &'a AbelianGroup,
    iota: usize,
}

impl LabelRule for OneInvolution<'_> {
    fn root_labels(&self, t: usize) -> Result<Vec<usize>> {
        let g = self.group;
        if t % 2 == 0 {
            return pairs(g, t / 2, &[]);
        }
        let (x, y) = pair_sum_idx(g, 0, self.iota)?;
        let mut labels = vec![0, x, y];
        labels.extend(pairs(g, (t - 3) / 2, &[x, y])?);
        Ok(labels)
    }

    fn child_labels(&self, r: usize, f: usize, w_parent: usize) -> Result<Vec<usize>> {
        let g = self.group;
        if r % 2 == 0 {
            return pairs(g, r / 2, &[f]);
        }
        if r == 1 {
            return Ok(vec![single_child_label(g, f, w_parent)?]);
        }
        if f != 0 {
            let mut labels = vec![0];
            labels.extend(pairs(g, (r - 1) / 2, &[f])?);
            return Ok(labels);
        }
        let (x, y) = pair_sum_idx(g, 0, self.iota)?;
        let mut labels = vec![self.iota, x, y];
        labels.extend(pairs(g, (r - 3) / 2, &[x, y])?);
        Ok(labels)
    }
}

/// Labels a tree with `Δ >= 5`, in which every degree-2 vertex has a
/// degree-2 neighbor, using a group of order at least `Δ+2` with more than
/// one involution, unless the group is `(Z_2)^p` with `2^p` in
/// `{Δ+2, Δ+3}`.
pub fn color_tree_multi_involution(tree: &Graph, group: &AbelianGroup) -> Result<EdgeLabeling> {
    let class = check_tree(tree)?;
    if group.involution_count() < 3 {
        return Err(TreeError::PreconditionViolated(
            "group must have more than one involution".into(),
        ));
    }
    common_preconditions(&class, group)?;
    let t = class.max_degree as u64;
    let k = group.order();
    if group.is_elementary(2) && (k == t + 2 || k == t + 3) {
        return Err(TreeError::ExcludedInstance(format!("{group} with Δ = {t}")));
    }
    let rule = MultiInvolution::new(group);
    build_labeling(tree, max_degree_root(tree, class.max_degree), group, &rule)
}

/// `(Z_2)^p` with `Δ = 2^p - 3` on a tree that is not `Δ`-regular: the same
/// rules rooted at a non-leaf of degree other than `Δ`. Returns `None` if the
/// case does not apply or the output does not verify.
pub(crate) fn color_tree_extension(tree: &Graph, group: &AbelianGroup) -> Option<EdgeLabeling> {
    let class = check_tree(tree).ok()?;
    let t = class.max_degree;
    let applies = group.is_elementary(2)
        && group.order() == t as u64 + 3
        && t >= 5
        && class.degree2_rule_holds
        && !class.is_regular_tree;
    if !applies {
        return None;
    }
    let root = (0..tree.n())
        .filter(|&v| (2..t).contains(&tree.degree(v)))
        .max_by_key(|&v| (tree.degree(v), std::cmp::Reverse(v)))?;
    let rule = MultiInvolution::new(group);
    build_labeling(tree, root, group, &rule).ok()
}

type PartitionKey = (bool, usize, usize, usize);

struct MultiInvolution<'a> {
    group: &'a AbelianGroup,
    tt: TwoTorsion,
    /// `I*` in enumeration order.
    involutions: Vec<usize>,
    elementary: bool,
    memo: RefCell<HashMap<PartitionKey, Vec<usize>>>,
}

impl<'a> MultiInvolution<'a> {
    fn new(group: &'a AbelianGroup) -> Self {
        MultiInvolution {
            group,
            tt: TwoTorsion::of(group),
            involutions: group.involution_indices(),
            elementary: group.is_elementary(2),
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn big_p(&self) -> usize {
        self.tt.size()
    }

    fn in_i_star(&self, f: usize) -> bool {
        f != 0 && self.group.is_order_le_two(f)
    }

    /// `A1` of a zero-sum partition of `I` with sizes `(n1, 1, n3)`; the
    /// singleton part is `{0}`, so `0` is not in `A1`.
    fn three(&self, n1: usize, n3: usize) -> Result<Vec<usize>> {
        self.cached((false, n1, n3, 0), || {
            let parts = partition_three_masks(&self.tt, [n1, 1, n3])?;
            Ok(parts[0].iter().map(|&m| self.tt.index(m)).collect())
        })
    }

    /// `A1` of a zero-sum partition `{A1, A2}` of `I` with `iota` in `A2`.
    fn avoiding(&self, iota: usize, n1: usize, n2: usize) -> Result<Vec<usize>> {
        self.cached((true, n1, n2, iota), || {
            let mask = self.tt.mask(iota).expect("iota lies in I");
            let parts = two_avoiding_checked(&self.tt, mask, n1, n2)?;
            Ok(parts[0].iter().map(|&m| self.tt.index(m)).collect())
        })
    }

    fn cached(&self, key: PartitionKey, make: impl FnOnce() -> Result<Vec<usize>>) -> Result<Vec<usize>> {
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = make()?;
        self.memo.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    fn with_pairs(&self, mut labels: Vec<usize>, count: usize, forbidden: &[usize]) -> Result<Vec<usize>> {
        labels.extend(pairs(self.group, count, forbidden)?);
        Ok(labels)
    }
}

impl LabelRule for MultiInvolution<'_> {
    fn root_labels(&self, t: usize) -> Result<Vec<usize>> {
        let k = self.group.len();
        let p2 = self.big_p();
        if t == 2 {
            // Only reached by the extension; any two distinct nonzero labels.
            return Ok(vec![1, 2]);
        }
        if t % 2 == 0 {
            if k == t + 2 {
                // I* without its first element sums to that element.
                let labels = self.involutions[1..].to_vec();
                return self.with_pairs(labels, (t + 2 - p2) / 2, &[]);
            }
            if t + 2 < p2 {
                return self.three(t, p2 - 1 - t);
            }
            let a1 = self.three(p2 - 4, 3)?;
            return self.with_pairs(a1, (t + 4 - p2) / 2, &[]);
        }
        if t + 1 >= p2 {
            return self.with_pairs(self.involutions.clone(), (t + 1 - p2) / 2, &[]);
        }
        if t + 3 < p2 {
            return self.three(t, p2 - 1 - t);
        }
        // t = 2^p - 3
        let a1 = self.three(t - 2, 4)?;
        self.with_pairs(a1, 1, &[])
    }

    fn child_labels(&self, r: usize, f: usize, w_parent: usize) -> Result<Vec<usize>> {
        let g = self.group;
        let p2 = self.big_p();
        if r % 2 == 1 {
            if r == 1 {
                return Ok(vec![single_child_label(g, f, w_parent)?]);
            }
            if !self.in_i_star(f) {
                if r + 3 < p2 {
                    return self.three(r, p2 - 1 - r);
                }
                if r + 3 == p2 {
                    let a1 = self.three(r - 2, 4)?;
                    return self.with_pairs(a1, 1, &[f]);
                }
                return self.with_pairs(self.involutions.clone(), (r + 1 - p2) / 2, &[f]);
            }
            if r + 1 < p2 {
                return self.avoiding(f, r, p2 - r);
            }
            let a1 = self.avoiding(f, p2 - 3, 3)?;
            return self.with_pairs(a1, (r + 3 - p2) / 2, &[f]);
        }
        if r == 2 {
            if !self.elementary {
                return pairs(g, 1, &[f]);
            }
            let avoid = g.sub_idx(w_parent, f);
            for g1 in 0..g.len() {
                for g2 in g1 + 1..g.len() {
                    if g1 != f && g2 != f && g.add_idx(g1, g2) != avoid {
                        return Ok(vec![g1, g2]);
                    }
                }
            }
            return Err(TreeError::ConstructionFailed("no pair for two children".into()));
        }
        if r >= p2 {
            if !g.is_order_le_two(f) {
                let mut labels = vec![0];
                labels.extend(&self.involutions);
                return self.with_pairs(labels, (r - p2) / 2, &[f]);
            }
            let a1 = if p2 == 4 {
                Vec::new()
            } else if f != 0 {
                self.avoiding(f, p2 - 4, 4)?
            } else {
                self.three(p2 - 4, 3)?
            };
            return self.with_pairs(a1, (r + 4 - p2) / 2, &[f]);
        }
        if r + 2 == p2 {
            return pairs(g, r / 2, &[f]);
        }
        if self.in_i_star(f) {
            self.avoiding(f, r, p2 - r)
        } else {
            self.three(r, p2 - 1 - r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::verify_twin;

    fn grp(lit: &str) -> AbelianGroup {
        lit.parse().unwrap()
    }

    #[test]
    fn one_involution_stars() {
        let z8 = AbelianGroup::cyclic(8).unwrap();
        let s5 = Graph::star(5);
        let lab = color_tree_one_involution(&s5, &z8).unwrap();
        assert_eq!(lab.weight_index(0), 4);
        assert!(verify_twin(&s5, &lab).unwrap().passed());
        let zeros = (0..5).filter(|&e| lab.label_index(e) == 0).count();
        assert_eq!(zeros, 1);

        let s6 = Graph::star(6);
        let lab = color_tree_one_involution(&s6, &z8).unwrap();
        assert_eq!(lab.weight_index(0), 0);
        assert!(lab.is_nowhere_zero());
        assert!(verify_twin(&s6, &lab).unwrap().passed());
    }

    #[test]
    fn one_involution_rejects_lone_degree_two_vertex() {
        // Root of degree 5; one arm is root - a - leaf with a of degree 2.
        let mut edges: Vec<(usize, usize)> = (1..=5).map(|i| (0, i)).collect();
        edges.push((1, 6));
        let t = Graph::new(7, &edges).unwrap();
        assert!(matches!(
            color_tree_one_involution(&t, &AbelianGroup::cyclic(8).unwrap()),
            Err(TreeError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn multi_involution_examples() {
        let g = grp("Z2xZ4");
        let s6 = Graph::star(6);
        let lab = color_tree_multi_involution(&s6, &g).unwrap();
        assert!(verify_twin(&s6, &lab).unwrap().passed());
        let iotas = g.involution_indices();
        assert_eq!(lab.weight_index(0), iotas[0]);
        let mut used: Vec<usize> = (0..6).map(|e| lab.label_index(e)).collect();
        used.sort_unstable();
        assert!(iotas[1..].iter().all(|i| used.contains(i)));
        assert!(!used.contains(&iotas[0]));

        let g = grp("Z2xZ2xZ3");
        let s5 = Graph::star(5);
        let lab = color_tree_multi_involution(&s5, &g).unwrap();
        assert!(verify_twin(&s5, &lab).unwrap().passed());

        assert!(matches!(
            color_tree_multi_involution(&s5, &grp("Z2^3")),
            Err(TreeError::ExcludedInstance(_))
        ));
    }

    #[test]
    fn extension_on_non_regular_tree() {
        // Δ = 5 with Z_2^3, plus a vertex of degree 4.
        let mut edges: Vec<(usize, usize)> = (1..=5).map(|i| (0, i)).collect();
        edges.extend((6..9).map(|i| (1, i)));
        let t = Graph::new(9, &edges).unwrap();
        if let Some(lab) = color_tree_extension(&t, &grp("Z2^3")) {
            assert!(verify_twin(&t, &lab).unwrap().passed());
        }
        assert!(color_tree_extension(&Graph::star(5), &grp("Z2^3")).is_none());
    }
}
