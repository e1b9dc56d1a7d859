//! Constructive lemmas over a group: pair sums, zero-sum partitions
//! of the subgroup of elements of order at most two, and selection of
//! inverse pairs.
//!
//! The subgroup `I = I* + {0}` is isomorphic to `(Z_2)^t`. Internally its
//! elements are bitmasks: bit `t-1-q` is the coordinate of the `q`-th even
//! cyclic factor, so numeric mask order coincides with the group's
//! element enumeration order.

use thiserror::Error;

use crate::group::{AbelianGroup, GroupElement, GroupError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no zero-sum partition of sizes {sizes:?} exists")]
    Infeasible { sizes: Vec<usize> },
    #[error("no solution found: {0}")]
    NoSolution(String),
    #[error("only {available} inverse pairs available, {requested} requested")]
    NotEnoughPairs { requested: usize, available: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

type Result<T> = std::result::Result<T, CombinatoricsError>;

fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(CombinatoricsError::PreconditionViolated(msg.into()))
}

/// Disjoint zero-sum parts covering `I = I* + {0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionPartition {
    pub parts: Vec<Vec<GroupElement>>,
    pub sizes: Vec<usize>,
}

impl InvolutionPartition {
    /// Checks disjointness, coverage of `I`, zero sums and sizes.
    pub fn validate(&self, group: &AbelianGroup) -> std::result::Result<(), String> {
        let mut seen = Vec::new();
        for (i, part) in self.parts.iter().enumerate() {
            if part.len() != self.sizes[i] {
                return Err(format!("part {i} has size {} not {}", part.len(), self.sizes[i]));
            }
            let mut sum = 0;
            for e in part {
                let idx = group.index_of(e).map_err(|e| e.to_string())?;
                if !group.is_order_le_two(idx) {
                    return Err(format!("{e} is not in I"));
                }
                if seen.contains(&idx) {
                    return Err(format!("{e} appears twice"));
                }
                seen.push(idx);
                sum = group.add_idx(sum, idx);
            }
            if sum != 0 {
                return Err(format!("part {i} does not sum to zero"));
            }
        }
        if seen.len() != group.involution_count() + 1 {
            return Err("parts do not cover I".into());
        }
        Ok(())
    }
}

/// Inverse pairs `(d, -d)` with `d != -d`, all elements distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InversePairSelection {
    pub pairs: Vec<(GroupElement, GroupElement)>,
    pub forbidden: Vec<GroupElement>,
}

/// Coordinates of the two-torsion subgroup.
#[derive(Debug, Clone)]
pub(crate) struct TwoTorsion {
    pub t: u32,
    basis: Vec<usize>,
}

impl TwoTorsion {
    pub fn of(group: &AbelianGroup) -> Self {
        let basis = group.two_torsion_basis();
        TwoTorsion {
            t: basis.len() as u32,
            basis,
        }
    }

    pub fn size(&self) -> usize {
        1 << self.t
    }

    pub fn index(&self, mask: u32) -> usize {
        let t = self.t as usize;
        self.basis
            .iter()
            .enumerate()
            .filter(|(q, _)| mask >> (t - 1 - q) & 1 == 1)
            .map(|(_, &g)| g)
            .sum()
    }

    pub fn mask(&self, index: usize) -> Option<u32> {
        let t = self.t as usize;
        // Basis elements occupy distinct coordinates with decreasing strides,
        // so a greedy decomposition is exact.
        let mut rest = index;
        let mut mask = 0;
        for (q, &g) in self.basis.iter().enumerate() {
            if rest >= g {
                rest -= g;
                mask |= 1 << (t - 1 - q);
            }
        }
        (rest == 0).then_some(mask)
    }
}

// ---------------------------------------------------------------------------
// Pair-sum lemma
// ---------------------------------------------------------------------------

/// Finds `x != y` outside `{a, b}` with `x + y = b - a`.
///
/// Requires `|G| >= 6`, at most one involution, `2b = 0` and `a != b`.
/// Follows the case split on whether `0` lies in `{a, b}`; candidates `c`
/// are scanned in enumeration order.
pub fn solve_pair_sum(
    group: &AbelianGroup,
    a: &GroupElement,
    b: &GroupElement,
) -> Result<(GroupElement, GroupElement)> {
    let (ai, bi) = (group.index_of(a)?, group.index_of(b)?);
    let (x, y) = pair_sum_idx(group, ai, bi)?;
    Ok((group.element_at(x), group.element_at(y)))
}

fn pair_sum_pre(group: &AbelianGroup, a: usize, b: usize) -> Result<()> {
    if group.order() < 6 {
        return precondition("group order below 6");
    }
    if group.involution_count() > 1 {
        return precondition("group has more than one involution");
    }
    if group.double_idx(b) != 0 {
        return precondition("2b != 0");
    }
    if a == b {
        return precondition("a == b");
    }
    Ok(())
}

fn pair_ok(a: usize, b: usize, x: usize, y: usize) -> bool {
    x != y && x != a && x != b && y != a && y != b
}

pub(crate) fn pair_sum_idx(group: &AbelianGroup, a: usize, b: usize) -> Result<(usize, usize)> {
    pair_sum_pre(group, a, b)?;
    let g = group;
    let target = g.sub_idx(b, a);
    let half_of = |z: usize, c: usize| g.double_idx(c) == z;
    let candidate = |skip: &dyn Fn(usize) -> bool, build: &dyn Fn(usize) -> (usize, usize)| {
        (0..g.len())
            .filter(|&c| !skip(c))
            .map(build)
            .find(|&(x, y)| pair_ok(a, b, x, y) && g.add_idx(x, y) == target)
    };
    let found = if a != 0 && b != 0 {
        if b != g.double_idx(a) {
            Some((target, 0))
        } else {
            let na = g.neg_idx(a);
            let skip = |c: usize| half_of(na, c) || c == 0 || c == b || c == a || c == na;
            candidate(&skip, &|c| (g.add_idx(a, c), g.neg_idx(c)))
        }
    } else if a == 0 {
        let skip = |c: usize| half_of(b, c) || c == 0 || c == b;
        candidate(&skip, &|c| (g.add_idx(b, c), g.neg_idx(c)))
    } else {
        // b == 0
        let na = g.neg_idx(a);
        let a2 = g.double_idx(a);
        let skip = |c: usize| half_of(a, c) || c == 0 || c == a || c == na || c == a2;
        candidate(&skip, &|c| (g.sub_idx(c, a), g.neg_idx(c)))
    };
    let found = found.or_else(|| brute_pair(g, a, b, target, false));
    match found {
        Some((x, y)) if pair_ok(a, b, x, y) && g.add_idx(x, y) == target => Ok((x, y)),
        _ => Err(CombinatoricsError::NoSolution(format!(
            "pair sum for a={}, b={} in {g}",
            g.element_at(a),
            g.element_at(b)
        ))),
    }
}

fn brute_pair(
    g: &AbelianGroup,
    a: usize,
    b: usize,
    target: usize,
    nonzero: bool,
) -> Option<(usize, usize)> {
    (0..g.len())
        .map(|x| (x, g.sub_idx(target, x)))
        .find(|&(x, y)| pair_ok(a, b, x, y) && (!nonzero || (x != 0 && y != 0)))
}

/// As [`solve_pair_sum`], with `x` and `y` additionally nonzero; needs `|G| >= 10`.
pub fn strict_solve_pair_sum(
    group: &AbelianGroup,
    a: &GroupElement,
    b: &GroupElement,
) -> Result<(GroupElement, GroupElement)> {
    let (ai, bi) = (group.index_of(a)?, group.index_of(b)?);
    let (x, y) = strict_pair_sum_idx(group, ai, bi)?;
    Ok((group.element_at(x), group.element_at(y)))
}

pub(crate) fn strict_pair_sum_idx(
    group: &AbelianGroup,
    a: usize,
    b: usize,
) -> Result<(usize, usize)> {
    pair_sum_pre(group, a, b)?;
    if group.order() < 10 {
        return precondition("group order below 10");
    }
    let target = group.sub_idx(b, a);
    brute_pair(group, a, b, target, true).ok_or_else(|| {
        CombinatoricsError::NoSolution(format!("nonzero pair sum in {group}"))
    })
}

// ---------------------------------------------------------------------------
// Inverse pairs
// ---------------------------------------------------------------------------

/// Picks `count` disjoint pairs `{d, -d}` with `2d != 0`, avoiding `forbidden`.
/// Pairs are taken in enumeration order of their smaller member.
pub fn pick_inverse_pairs(
    group: &AbelianGroup,
    count: usize,
    forbidden: &[GroupElement],
) -> Result<InversePairSelection> {
    let forb: Vec<usize> = forbidden
        .iter()
        .map(|e| group.index_of(e))
        .collect::<std::result::Result<_, _>>()?;
    let pairs = inverse_pairs_idx(group, count, &forb)?;
    Ok(InversePairSelection {
        pairs: pairs
            .into_iter()
            .map(|(d, e)| (group.element_at(d), group.element_at(e)))
            .collect(),
        forbidden: forbidden.to_vec(),
    })
}

pub(crate) fn inverse_pairs_idx(
    group: &AbelianGroup,
    count: usize,
    forbidden: &[usize],
) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    for d in 1..group.len() {
        let nd = group.neg_idx(d);
        if nd <= d || forbidden.contains(&d) || forbidden.contains(&nd) {
            continue;
        }
        out.push((d, nd));
        if out.len() == count {
            return Ok(out);
        }
    }
    Err(CombinatoricsError::NotEnoughPairs {
        requested: count,
        available: out.len(),
    })
}

// ---------------------------------------------------------------------------
// Zero-sum partitions of I
// ---------------------------------------------------------------------------

/// The feasibility predicate for three zero-sum parts of `(Z_2)^t`.
pub fn partition_three_feasible(t: u32, sizes: [usize; 3]) -> bool {
    let full = 1usize << t;
    sizes.iter().all(|&n| n != 2 && n != full - 2)
}

/// Zero-sum partition of `I` into parts of sizes `(n1, n2, n3)`.
pub fn partition_three(
    group: &AbelianGroup,
    n1: usize,
    n2: usize,
    n3: usize,
) -> Result<InvolutionPartition> {
    let tt = TwoTorsion::of(group);
    let parts = partition_three_masks(&tt, [n1, n2, n3])?;
    Ok(to_partition(group, &tt, parts))
}

pub(crate) fn partition_three_masks(tt: &TwoTorsion, sizes: [usize; 3]) -> Result<Vec<Vec<u32>>> {
    let t = tt.t;
    if t < 2 {
        return precondition(format!("|I| = {} is not 2^k with k >= 2", tt.size()));
    }
    if sizes.iter().sum::<usize>() != tt.size() {
        return precondition(format!("sizes {sizes:?} do not sum to |I| = {}", tt.size()));
    }
    if sizes.iter().all(|&n| n > 0) && t == 2 {
        return precondition("k > 2 is required when all sizes are nonzero");
    }
    if !partition_three_feasible(t, sizes) {
        return Err(CombinatoricsError::Infeasible {
            sizes: sizes.to_vec(),
        });
    }
    search_parts(t, &sizes, &|_, _| false).ok_or_else(|| {
        CombinatoricsError::NoSolution(format!("zero-sum partition of sizes {sizes:?}"))
    })
}

/// Zero-sum partition `{A1, A2}` of `I` with `|A1| = n1`, `|A2| = n2` and
/// `iota` in `A2`. Requires `n1 >= 1`, `n1 != 2`, `n2 >= 3`.
pub fn partition_two_avoiding(
    group: &AbelianGroup,
    iota: &GroupElement,
    n1: usize,
    n2: usize,
) -> Result<InvolutionPartition> {
    let tt = TwoTorsion::of(group);
    let iota = involution_mask(group, &tt, iota)?;
    let parts = two_avoiding_checked(&tt, iota, n1, n2)?;
    Ok(to_partition(group, &tt, parts))
}

/// As [`partition_two_avoiding`], additionally with `0` outside `A1`.
/// Requires `k >= 3` and `n1 >= 3`.
pub fn strict_partition_two_avoiding(
    group: &AbelianGroup,
    iota: &GroupElement,
    n1: usize,
    n2: usize,
) -> Result<InvolutionPartition> {
    let tt = TwoTorsion::of(group);
    let iota = involution_mask(group, &tt, iota)?;
    if tt.t < 3 {
        return precondition("k >= 3 is required");
    }
    if n1 < 3 {
        return precondition("n1 >= 3 is required");
    }
    let parts = two_avoiding_checked(&tt, iota, n1, n2)?;
    if !parts[0].contains(&0) {
        return Ok(to_partition(group, &tt, parts));
    }
    let forbid = |part: usize, m: u32| part == 0 && (m == 0 || m == iota);
    let parts = search_parts(tt.t, &[n1, n2], &forbid).ok_or_else(|| {
        CombinatoricsError::NoSolution(format!("strict partition ({n1}, {n2})"))
    })?;
    Ok(to_partition(group, &tt, parts))
}

fn involution_mask(group: &AbelianGroup, tt: &TwoTorsion, iota: &GroupElement) -> Result<u32> {
    let idx = group.index_of(iota)?;
    match tt.mask(idx) {
        Some(m) if m != 0 => Ok(m),
        _ => precondition(format!("{iota} is not an involution")),
    }
}

pub(crate) fn two_avoiding_checked(
    tt: &TwoTorsion,
    iota: u32,
    n1: usize,
    n2: usize,
) -> Result<Vec<Vec<u32>>> {
    let t = tt.t;
    if t < 2 {
        return precondition("I must have at least 4 elements");
    }
    if iota == 0 || iota as usize >= tt.size() {
        return precondition("iota must be an involution");
    }
    if n1 + n2 != tt.size() {
        return precondition(format!("n1 + n2 = {} != |I| = {}", n1 + n2, tt.size()));
    }
    if n1 < 1 || n1 == 2 || n2 < 3 {
        return precondition(format!("need n1 >= 1, n1 != 2, n2 >= 3 (got {n1}, {n2})"));
    }
    let (a1, a2) = two_avoiding(t, iota, n1, n2)?;
    let parts = vec![a1, a2];
    check_mask_partition(t, &parts, &[n1, n2])
        .map_err(|e| CombinatoricsError::NoSolution(format!("construction invalid: {e}")))?;
    if parts[0].contains(&iota) {
        return Err(CombinatoricsError::NoSolution("iota landed in A1".into()));
    }
    Ok(parts)
}

/// Recursive construction on `(Z_2)^t`; the last coordinate is bit `t-1`.
fn two_avoiding(t: u32, iota: u32, n1: usize, n2: usize) -> Result<(Vec<u32>, Vec<u32>)> {
    if n1 % 2 == 0 {
        let parts = search_parts(t, &[n1, n2], &|_, _| false).ok_or_else(|| {
            CombinatoricsError::NoSolution(format!("even split ({n1}, {n2})"))
        })?;
        let (a1, a2) = (parts[0].clone(), parts[1].clone());
        if a2.contains(&iota) {
            return Ok((a1, a2));
        }
        // Translate both parts so that some element of A2 lands on iota;
        // even sizes keep both sums at zero.
        let x = iota ^ a2[0];
        let shift = |v: &[u32]| {
            let mut v: Vec<u32> = v.iter().map(|&m| m ^ x).collect();
            v.sort_unstable();
            v
        };
        return Ok((shift(&a1), shift(&a2)));
    }
    if t == 2 {
        // n1 = 1, n2 = 3 is the only odd split.
        return Ok((vec![0], vec![1, 2, 3]));
    }
    let half = 1u32 << (t - 1);
    let low = iota & (half - 1);
    let high = iota & half != 0;
    let all_low = || 0..half;
    let mut a1: Vec<u32>;
    let mut a2: Vec<u32>;
    if n2 > half as usize {
        let parts = search_parts(t - 1, &[n1, n2 - half as usize], &|_, _| false)
            .ok_or_else(|| CombinatoricsError::NoSolution("odd split, lower level".into()))?;
        if high {
            a1 = parts[0].clone();
            a2 = parts[1].clone();
            a2.extend(all_low().map(|y| y | half));
        } else {
            // iota = (low, 0) with low != 0: move low and a partner x' of its
            // part up to the top layer, and keep their low copies in A2.
            let s = if parts[0].contains(&low) { 0 } else { 1 };
            let x = *parts[s].iter().find(|&&m| m != low).expect("part has >= 2 elements");
            let lift = |part: &[u32]| -> Vec<u32> {
                part.iter()
                    .map(|&m| if m == low || m == x { m | half } else { m })
                    .collect()
            };
            a1 = lift(&parts[0]);
            a2 = lift(&parts[1]);
            a2.extend(all_low().filter(|&y| y != low && y != x).map(|y| y | half));
            a2.push(low);
            a2.push(x);
        }
    } else {
        if low == 0 {
            // iota = e_t: swap the first and last coordinates and recurse.
            let swap = |m: u32| {
                let lo = m & 1;
                let hi = (m >> (t - 1)) & 1;
                (m & !1 & !half) | (lo << (t - 1)) | hi
            };
            let (b1, b2) = two_avoiding(t, swap(iota), n1, n2)?;
            let mut b1: Vec<u32> = b1.into_iter().map(swap).collect();
            let mut b2: Vec<u32> = b2.into_iter().map(swap).collect();
            b1.sort_unstable();
            b2.sort_unstable();
            return Ok((b1, b2));
        }
        let (b1, b2) = two_avoiding(t - 1, low, n1 - half as usize, n2)?;
        if !high {
            a2 = b2;
            a1 = b1;
            a1.extend(all_low().map(|y| y | half));
        } else {
            let x = *b2.iter().find(|&&m| m != low).expect("A2 has >= 3 elements");
            a2 = b2
                .iter()
                .map(|&m| if m == low || m == x { m | half } else { m })
                .collect();
            let in_a2 = |m: &u32| a2.contains(m);
            a1 = (0..2 * half).filter(|m| !in_a2(m)).collect();
        }
    }
    a1.sort_unstable();
    a2.sort_unstable();
    Ok((a1, a2))
}

/// Assignment of `(Z_2)^t` into zero-sum parts of the given sizes, with
/// `forbid(part, mask)` excluding placements. Parts are filled smallest
/// first, each with its lexicographically least admissible subset; the
/// largest part takes whatever remains.
pub(crate) fn search_parts(
    t: u32,
    sizes: &[usize],
    forbid: &dyn Fn(usize, u32) -> bool,
) -> Option<Vec<Vec<u32>>> {
    let n = 1usize << t;
    if sizes.iter().sum::<usize>() != n {
        return None;
    }
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by_key(|&i| sizes[i]);
    let sorted: Vec<usize> = order.iter().map(|&i| sizes[i]).collect();
    let remap = |part: usize, m: u32| forbid(order[part], m);
    let mut used = vec![false; n];
    let mut parts = Vec::with_capacity(sizes.len());
    if !fill_part(0, &sorted, &remap, &mut used, &mut parts) {
        return None;
    }
    let mut out = vec![Vec::new(); sizes.len()];
    for (slot, part) in order.into_iter().zip(parts) {
        out[slot] = part;
    }
    Some(out)
}

fn fill_part(
    p: usize,
    sizes: &[usize],
    forbid: &dyn Fn(usize, u32) -> bool,
    used: &mut [bool],
    parts: &mut Vec<Vec<u32>>,
) -> bool {
    if p + 1 == sizes.len() {
        let rest: Vec<u32> = (0..used.len() as u32).filter(|&m| !used[m as usize]).collect();
        let ok = rest.iter().fold(0, |acc, &m| acc ^ m) == 0
            && rest.iter().all(|&m| !forbid(p, m));
        if ok {
            parts.push(rest);
        }
        return ok;
    }
    let mut chosen = Vec::with_capacity(sizes[p]);
    let mut found = false;
    choose_subset(p, sizes[p], 0, 0, forbid, used, &mut chosen, &mut |used, chosen| {
        parts.push(chosen.to_vec());
        if fill_part(p + 1, sizes, forbid, used, parts) {
            found = true;
            return true;
        }
        parts.pop();
        false
    });
    found
}

/// Enumerates zero-sum subsets of unused masks of the given size in
/// lexicographic order; `visit` returns true to stop.
#[allow(clippy::too_many_arguments)]
fn choose_subset(
    p: usize,
    size: usize,
    start: u32,
    acc: u32,
    forbid: &dyn Fn(usize, u32) -> bool,
    used: &mut [bool],
    chosen: &mut Vec<u32>,
    visit: &mut dyn FnMut(&mut [bool], &[u32]) -> bool,
) -> bool {
    let n = used.len() as u32;
    if size == 0 {
        return acc == 0 && visit(used, chosen);
    }
    if size == 1 {
        // The last element is forced.
        let m = acc;
        if m >= start && !used[m as usize] && !forbid(p, m) {
            used[m as usize] = true;
            chosen.push(m);
            let stop = visit(used, chosen);
            chosen.pop();
            used[m as usize] = false;
            return stop;
        }
        return false;
    }
    let mut m = start;
    while m + size as u32 <= n {
        if !used[m as usize] && !forbid(p, m) {
            used[m as usize] = true;
            chosen.push(m);
            let stop = choose_subset(p, size - 1, m + 1, acc ^ m, forbid, used, chosen, visit);
            chosen.pop();
            used[m as usize] = false;
            if stop {
                return true;
            }
        }
        m += 1;
    }
    false
}

fn check_mask_partition(t: u32, parts: &[Vec<u32>], sizes: &[usize]) -> std::result::Result<(), String> {
    let mut seen = vec![false; 1 << t];
    for (i, part) in parts.iter().enumerate() {
        if part.len() != sizes[i] {
            return Err(format!("part {i} has wrong size"));
        }
        let mut acc = 0;
        for &m in part {
            if m as usize >= seen.len() || seen[m as usize] {
                return Err(format!("mask {m} repeated or out of range"));
            }
            seen[m as usize] = true;
            acc ^= m;
        }
        if acc != 0 {
            return Err(format!("part {i} is not zero-sum"));
        }
    }
    if seen.iter().all(|&s| s) {
        Ok(())
    } else {
        Err("parts do not cover I".into())
    }
}

fn to_partition(group: &AbelianGroup, tt: &TwoTorsion, parts: Vec<Vec<u32>>) -> InvolutionPartition {
    let sizes = parts.iter().map(Vec::len).collect();
    let parts = parts
        .into_iter()
        .map(|p| {
            let mut idx: Vec<usize> = p.into_iter().map(|m| tt.index(m)).collect();
            idx.sort_unstable();
            idx.into_iter().map(|i| group.element_at(i)).collect()
        })
        .collect();
    InvolutionPartition { parts, sizes }
}
