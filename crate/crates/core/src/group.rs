//! Finite Abelian groups given as direct products of cyclic factors.
//!
//! Elements are residue vectors. Every group also carries a dense
//! index for its elements: the position of the residue vector in
//! lexicographic order (first factor most significant). The labeling
//! algorithms work on these indices; [`GroupElement`] is the public
//! value type.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use smallvec::SmallVec;
use thiserror::Error;

/// Largest group order accepted by [`AbelianGroup::new`].
pub const MAX_ORDER: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("a group needs at least one cyclic factor")]
    EmptyFactorList,
    #[error("cyclic factor order {0} is below 2")]
    FactorBelowTwo(u64),
    #[error("group order exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooLarge,
    #[error("element does not belong to group {0}")]
    ElementGroupMismatch(String),
    #[error("groups are only defined for orders >= 2 (got {0})")]
    OrderBelowTwo(u64),
    #[error("cannot parse group literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
}

type Residues = SmallVec<[u32; 4]>;

/// A finite Abelian group `Z_{n_1} x ... x Z_{n_m}`.
///
/// Equality is isomorphism: two groups compare equal iff their
/// invariant-factor forms agree. Elements, however, are bound to the
/// exact factor list they were created from.
#[derive(Debug, Clone)]
pub struct AbelianGroup {
    factors: Vec<u64>,
    strides: Vec<u64>,
    invariant: Vec<u64>,
    order: u64,
    token: u64,
}

/// A residue vector bound to one particular factor list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    group: u64,
    residues: Residues,
}

impl GroupElement {
    pub fn residues(&self) -> &[u32] {
        &self.residues
    }
}

impl serde::Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.residues.iter())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residues.len() == 1 {
            return write!(f, "{}", self.residues[0]);
        }
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl AbelianGroup {
    pub fn new(factor_orders: &[u64]) -> Result<Self, GroupError> {
        if factor_orders.is_empty() {
            return Err(GroupError::EmptyFactorList);
        }
        if let Some(&bad) = factor_orders.iter().find(|&&n| n < 2) {
            return Err(GroupError::FactorBelowTwo(bad));
        }
        let mut order: u64 = 1;
        for &n in factor_orders {
            order = order
                .checked_mul(n)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or(GroupError::OrderTooLarge)?;
        }
        let mut strides = vec![1u64; factor_orders.len()];
        for j in (0..factor_orders.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * factor_orders[j + 1];
        }
        let mut hasher = DefaultHasher::new();
        factor_orders.hash(&mut hasher);
        Ok(AbelianGroup {
            factors: factor_orders.to_vec(),
            strides,
            invariant: invariant_factors(factor_orders),
            order,
            token: hasher.finish(),
        })
    }

    /// `Z_n`.
    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        Self::new(&[n])
    }

    /// `(Z_base)^power`.
    pub fn elementary(base: u64, power: usize) -> Result<Self, GroupError> {
        Self::new(&vec![base; power.max(1)])
    }

    pub fn factor_orders(&self) -> &[u64] {
        &self.factors
    }

    /// Invariant factors `n_1 | n_2 | ... | n_m`.
    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.order as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same factor list, hence element-compatible.
    pub fn same_representation(&self, other: &AbelianGroup) -> bool {
        self.factors == other.factors
    }

    pub fn is_isomorphic(&self, other: &AbelianGroup) -> bool {
        self.invariant == other.invariant
    }

    /// The same group rewritten in invariant-factor form.
    pub fn canonical(&self) -> AbelianGroup {
        AbelianGroup::new(&self.invariant).expect("invariant factors are valid")
    }

    /// True iff the group is `(Z_base)^p` for some `p`.
    pub fn is_elementary(&self, base: u64) -> bool {
        self.invariant.iter().all(|&n| n == base)
    }

    /// Number of even invariant factors; the involution count is `2^t - 1`.
    pub fn two_rank(&self) -> u32 {
        self.invariant.iter().filter(|&&n| n % 2 == 0).count() as u32
    }

    pub fn involution_count(&self) -> usize {
        (1usize << self.two_rank()) - 1
    }

    pub fn zero(&self) -> GroupElement {
        self.element_at(0)
    }

    pub fn element(&self, residues: &[i64]) -> Result<GroupElement, GroupError> {
        if residues.len() != self.factors.len() {
            return Err(GroupError::ElementGroupMismatch(self.to_string()));
        }
        let residues = residues
            .iter()
            .zip(&self.factors)
            .map(|(&r, &n)| r.rem_euclid(n as i64) as u32)
            .collect();
        Ok(GroupElement {
            group: self.token,
            residues,
        })
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.group == self.token
            && a.residues.len() == self.factors.len()
            && a.residues.iter().zip(&self.factors).all(|(&r, &n)| (r as u64) < n)
    }

    fn check(&self, a: &GroupElement) -> Result<(), GroupError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(GroupError::ElementGroupMismatch(self.to_string()))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.element_at(self.add_idx(self.index_unchecked(a), self.index_unchecked(b))))
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        Ok(self.element_at(self.neg_idx(self.index_unchecked(a))))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    /// `k * a`, with negative `k` meaning `|k| * (-a)`.
    pub fn scalar_mul(&self, k: i64, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        let residues = a
            .residues
            .iter()
            .zip(&self.factors)
            .map(|(&r, &n)| {
                let n = n as i128;
                ((k as i128 * r as i128).rem_euclid(n)) as u32
            })
            .collect();
        Ok(GroupElement {
            group: self.token,
            residues,
        })
    }

    /// Least `r >= 1` with `r * a = 0`.
    pub fn element_order(&self, a: &GroupElement) -> Result<u64, GroupError> {
        self.check(a)?;
        Ok(a.residues
            .iter()
            .zip(&self.factors)
            .map(|(&r, &n)| n / gcd(r as u64, n))
            .fold(1, lcm))
    }

    /// All elements in lexicographic order of their residue vectors.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.len()).map(move |i| self.element_at(i))
    }

    /// `I* = { g != 0 : 2g = 0 }`, in enumeration order.
    pub fn involutions(&self) -> Vec<GroupElement> {
        self.involution_indices()
            .into_iter()
            .map(|i| self.element_at(i))
            .collect()
    }

    /// Fold of `+` over every element of the group.
    pub fn sum_all_elements(&self) -> GroupElement {
        let total = (0..self.len()).fold(0, |acc, i| self.add_idx(acc, i));
        self.element_at(total)
    }

    // ---- index-level arithmetic -------------------------------------------------

    pub fn element_at(&self, index: usize) -> GroupElement {
        debug_assert!(index < self.len());
        let mut index = index as u64;
        let residues = self
            .strides
            .iter()
            .zip(&self.factors)
            .map(|(&s, &n)| {
                let r = (index / s) % n;
                index %= s;
                r as u32
            })
            .collect();
        GroupElement {
            group: self.token,
            residues,
        }
    }

    pub fn index_of(&self, a: &GroupElement) -> Result<usize, GroupError> {
        self.check(a)?;
        Ok(self.index_unchecked(a))
    }

    fn index_unchecked(&self, a: &GroupElement) -> usize {
        a.residues
            .iter()
            .zip(&self.strides)
            .map(|(&r, &s)| r as u64 * s)
            .sum::<u64>() as usize
    }

    #[inline]
    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        if self.factors.len() == 1 {
            let n = self.order as usize;
            let s = a + b;
            return if s >= n { s - n } else { s };
        }
        let (a, b) = (a as u64, b as u64);
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.factors) {
            let ra = (a / s) % n;
            let rb = (b / s) % n;
            let r = ra + rb;
            out += if r >= n { r - n } else { r } * s;
        }
        out as usize
    }

    #[inline]
    pub fn neg_idx(&self, a: usize) -> usize {
        if self.factors.len() == 1 {
            return if a == 0 { 0 } else { self.order as usize - a };
        }
        let a = a as u64;
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.factors) {
            let r = (a / s) % n;
            out += if r == 0 { 0 } else { n - r } * s;
        }
        out as usize
    }

    #[inline]
    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.add_idx(a, self.neg_idx(b))
    }

    #[inline]
    pub fn double_idx(&self, a: usize) -> usize {
        self.add_idx(a, a)
    }

    /// `2a = 0`, including `a = 0`.
    #[inline]
    pub fn is_order_le_two(&self, a: usize) -> bool {
        self.neg_idx(a) == a
    }

    pub fn involution_indices(&self) -> Vec<usize> {
        // An element has order <= 2 iff every residue is 0 or n_j/2.
        let mut out = vec![0usize];
        for (&s, &n) in self.strides.iter().zip(&self.factors) {
            if n % 2 == 0 {
                let g = (n / 2 * s) as usize;
                let extra: Vec<usize> = out.iter().map(|&x| x + g).collect();
                out.extend(extra);
            }
        }
        out.sort_unstable();
        out.remove(0);
        out
    }

    /// Basis of the subgroup `I = I* + {0}` as element indices, one
    /// generator per even factor, in factor order.
    pub(crate) fn two_torsion_basis(&self) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.factors)
            .filter(|(_, &n)| n % 2 == 0)
            .map(|(&s, &n)| (n / 2 * s) as usize)
            .collect()
    }
}

impl PartialEq for AbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.invariant == other.invariant
    }
}

impl Eq for AbelianGroup {}

impl Hash for AbelianGroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.invariant.hash(state);
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        let mut first = true;
        while i < self.factors.len() {
            let n = self.factors[i];
            let run = self.factors[i..].iter().take_while(|&&m| m == n).count();
            if !first {
                write!(f, "x")?;
            }
            first = false;
            if run > 1 {
                write!(f, "Z{n}^{run}")?;
            } else {
                write!(f, "Z{n}")?;
            }
            i += run;
        }
        Ok(())
    }
}

impl FromStr for AbelianGroup {
    type Err = GroupError;

    /// Parses literals such as `Z4`, `Z2xZ4`, `z2^3 x Z3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| GroupError::Parse {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty literal"));
        }
        let mut factors = Vec::new();
        for term in compact.split(['x', 'X', '*', '×']) {
            let body = term
                .strip_prefix(['Z', 'z'])
                .ok_or_else(|| err("each factor must look like Z<n> or Z<n>^<p>"))?;
            let (base, power) = match body.split_once('^') {
                Some((b, p)) => (b, p),
                None => (body, "1"),
            };
            let base: u64 = base.parse().map_err(|_| err("bad factor order"))?;
            let power: usize = power.parse().map_err(|_| err("bad exponent"))?;
            if power == 0 {
                return Err(err("exponent must be positive"));
            }
            factors.extend(std::iter::repeat(base).take(power));
        }
        AbelianGroup::new(&factors)
    }
}

/// All Abelian groups of order `k` up to isomorphism, each in
/// invariant-factor form. Sorted by number of factors, then factors.
pub fn groups_of_order(k: u64) -> Result<Vec<AbelianGroup>, GroupError> {
    if k < 2 {
        return Err(GroupError::OrderBelowTwo(k));
    }
    if k > MAX_ORDER {
        return Err(GroupError::OrderTooLarge);
    }
    // For each prime, every partition of its exponent gives the
    // elementary divisors p^{lambda_i}.
    let mut per_prime: Vec<Vec<Vec<u64>>> = Vec::new();
    for (p, e) in factorize(k) {
        per_prime.push(
            integer_partitions(e)
                .into_iter()
                .map(|part| part.into_iter().map(|x| p.pow(x)).collect())
                .collect(),
        );
    }
    let mut combos: Vec<Vec<u64>> = vec![Vec::new()];
    for options in &per_prime {
        let mut next = Vec::new();
        for base in &combos {
            for opt in options {
                let mut v = base.clone();
                v.extend_from_slice(opt);
                next.push(v);
            }
        }
        combos = next;
    }
    let mut groups: Vec<AbelianGroup> = combos
        .iter()
        .map(|divisors| AbelianGroup::new(&invariant_factors(divisors)))
        .collect::<Result<_, _>>()?;
    groups.sort_by(|a, b| {
        (a.factors.len(), &a.factors).cmp(&(b.factors.len(), &b.factors))
    });
    groups.dedup_by(|a, b| a.factors == b.factors);
    Ok(groups)
}

/// Invariant factors (divisibility chain, ascending) of `prod Z_{n_j}`.
fn invariant_factors(factors: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &n in factors {
        for (p, e) in factorize(n) {
            by_prime.entry(p).or_default().push(p.pow(e));
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        // Largest prime power goes into the last invariant factor.
        for (i, &q) in powers.iter().enumerate() {
            out[len - 1 - i] *= q;
        }
    }
    out
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Partitions of `n` as non-increasing part lists, largest parts first.
fn integer_partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            prefix.push(part);
            rec(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
