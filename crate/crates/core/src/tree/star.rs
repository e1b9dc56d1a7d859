//! Obstructions for stars that use all but two or three group elements.
//!
//! In `K_{1,|G|-j}` the leaves carry distinct labels and their weights are
//! those labels, so the center weight `S - (g_1 + ... + g_j)` (with `S` the
//! sum of all elements) must equal one of the `j` unused elements.

use serde::Serialize;

use crate::group::{AbelianGroup, GroupElement};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StarVerdict {
    /// Every choice of unused elements fails; `checked` choices were examined.
    Obstructed { checked: usize },
    /// The first choice of unused elements that works.
    Colorable { unused: Vec<GroupElement> },
}

/// Checks `K_{1,|G|-2}` against `group` over all unused pairs.
pub fn star_obstruction_check(group: &AbelianGroup) -> StarVerdict {
    unused_sets(group, 2)
}

/// Checks `K_{1,|G|-3}` against `group` over all unused triples.
pub fn star_triple_check(group: &AbelianGroup) -> StarVerdict {
    unused_sets(group, 3)
}

fn unused_sets(group: &AbelianGroup, j: usize) -> StarVerdict {
    assert!(group.order() >= 4, "star check needs |G| >= 4");
    let k = group.len();
    let total = (0..k).fold(0, |acc, i| group.add_idx(acc, i));
    let mut checked = 0;
    let mut set = (0..j).collect::<Vec<usize>>();
    loop {
        checked += 1;
        let used = set.iter().fold(0, |acc, &g| group.add_idx(acc, g));
        let center = group.sub_idx(total, used);
        if set.contains(&center) {
            return StarVerdict::Colorable {
                unused: set.iter().map(|&i| group.element_at(i)).collect(),
            };
        }
        // Next j-subset in lexicographic order.
        let mut i = j;
        loop {
            if i == 0 {
                return StarVerdict::Obstructed { checked };
            }
            i -= 1;
            if set[i] < k - j + i {
                set[i] += 1;
                for l in i + 1..j {
                    set[l] = set[l - 1] + 1;
                }
                break;
            }
        }
    }
}
