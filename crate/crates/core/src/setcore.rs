//! Ground-set combinatorics: k-subsets as bitmasks, colexicographic ranking,
//! and enumeration of k-subsets and k-uniform partitions.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// Largest supported ground set; a k-subset is one `u64`.
pub const MAX_N: usize = 64;

fn pascal() -> &'static [[u64; MAX_N + 1]; MAX_N + 1] {
    static TABLE: OnceLock<Box<[[u64; MAX_N + 1]; MAX_N + 1]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; MAX_N + 1]; MAX_N + 1]);
        for n in 0..=MAX_N {
            t[n][0] = 1;
            for k in 1..=n {
                // C(64, 32) < 2^61, so every entry fits.
                t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            }
        }
        t
    })
}

/// C(n, k) for n ≤ 64, zero when k > n.
pub fn binomial(n: usize, k: usize) -> u64 {
    assert!(n <= MAX_N, "binomial table covers n <= {MAX_N}");
    if k > n {
        0
    } else {
        pascal()[n][k]
    }
}

/// C(a, b) with the convention C(a, b) = 0 whenever a < b or either argument
/// is negative.
pub fn binomial_or_zero(a: i64, b: i64) -> u64 {
    if a < 0 || b < 0 || b > a {
        0
    } else {
        binomial(a as usize, b as usize)
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// The ground set {0, …, n−1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: u8,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::GroundSetSize(n));
        }
        Ok(Self { n: n as u8 })
    }

    pub fn size(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u64 {
        full_mask(self.size())
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    GroundSet::new(n)?;
    if k == 0 || k > n {
        return Err(Error::InvalidSubset(format!("subset size {k} outside 1..={n}")));
    }
    Ok(())
}

/// A k-element subset of {0, …, n−1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSubset {
    mask: u64,
    n: u8,
    k: u8,
}

impl KSubset {
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        let ground = GroundSet::new(n)?;
        if mask & !ground.mask() != 0 {
            return Err(Error::InvalidSubset(format!(
                "mask {mask:#x} has elements outside 0..{n}"
            )));
        }
        let k = mask.count_ones() as usize;
        if k == 0 {
            return Err(Error::InvalidSubset("empty subset".into()));
        }
        Ok(Self { mask, n: n as u8, k: k as u8 })
    }

    /// Builds a subset from its elements; duplicates are rejected.
    pub fn from_elements(n: usize, elements: &[usize]) -> Result<Self> {
        GroundSet::new(n)?;
        let mut mask = 0u64;
        for &e in elements {
            if e >= n {
                return Err(Error::InvalidSubset(format!("element {e} outside 0..{n}")));
            }
            if mask & (1 << e) != 0 {
                return Err(Error::InvalidSubset(format!("duplicate element {e}")));
            }
            mask |= 1 << e;
        }
        Self::from_mask(n, mask)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn contains(&self, e: usize) -> bool {
        e < 64 && self.mask & (1 << e) != 0
    }

    /// Elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        let mut m = self.mask;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let e = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(e)
            }
        })
    }

    /// Position in colexicographic order: Σ C(e_i, i+1) over the sorted
    /// elements e_0 < … < e_{k−1}.
    pub fn colex_rank(&self) -> u64 {
        colex_rank_mask(self.mask)
    }
}

impl fmt::Display for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// Colex rank of a raw mask; the subset size is the popcount.
pub fn colex_rank_mask(mut mask: u64) -> u64 {
    let mut rank = 0;
    let mut i = 1;
    while mask != 0 {
        let e = mask.trailing_zeros() as usize;
        rank += binomial(e, i);
        mask &= mask - 1;
        i += 1;
    }
    rank
}

pub fn colex_rank(s: &KSubset) -> u64 {
    s.colex_rank()
}

/// Inverse of [`colex_rank`].
pub fn colex_unrank(rank: u64, n: usize, k: usize) -> Result<KSubset> {
    check_nk(n, k)?;
    let limit = binomial(n, k);
    if rank >= limit {
        return Err(Error::RankOutOfRange { rank, n, k, limit });
    }
    Ok(KSubset { mask: colex_unrank_mask(rank, n, k), n: n as u8, k: k as u8 })
}

fn colex_unrank_mask(mut rank: u64, n: usize, k: usize) -> u64 {
    let mut mask = 0u64;
    let mut top = n;
    for i in (1..=k).rev() {
        // largest e < top with C(e, i) <= rank
        let mut e = top - 1;
        while binomial(e, i) > rank {
            e -= 1;
        }
        rank -= binomial(e, i);
        mask |= 1 << e;
        top = e;
    }
    mask
}

/// All k-subsets of an n-set in colex order.
#[derive(Debug, Clone)]
pub struct KSubsets {
    n: u8,
    k: u8,
    next: Option<u64>,
    last: u64,
    remaining: u64,
}

impl Iterator for KSubsets {
    type Item = KSubset;

    fn next(&mut self) -> Option<KSubset> {
        let cur = self.next?;
        self.remaining -= 1;
        self.next = if cur == self.last {
            None
        } else {
            // Gosper's hack: next larger integer with the same popcount is
            // the colex successor.
            let x = cur as u128;
            let c = x & x.wrapping_neg();
            let r = x + c;
            Some(((((r ^ x) >> 2) / c) | r) as u64)
        };
        Some(KSubset { mask: cur, n: self.n, k: self.k })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, usize::try_from(self.remaining).ok())
    }
}

pub fn enumerate_k_subsets(n: usize, k: usize) -> Result<KSubsets> {
    check_nk(n, k)?;
    Ok(KSubsets {
        n: n as u8,
        k: k as u8,
        next: Some(full_mask(k)),
        last: full_mask(k) << (n - k),
        remaining: binomial(n, k),
    })
}

/// n!/((n/k)!·(k!)^{n/k}); n = 0 is allowed and gives 1.
pub fn count_partitions(n: usize, k: usize) -> Result<BigUint> {
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::NotDivisible { n, k });
    }
    let blocks = n / k;
    let denom = factorial(blocks) * factorial(k).pow(blocks as u32);
    Ok(factorial(n) / denom)
}

/// A partition of the ground set into n/k blocks of size k, stored in
/// canonical order: block i holds the smallest element not covered by the
/// earlier blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniformPartition {
    blocks: Vec<KSubset>,
}

impl UniformPartition {
    pub fn new(blocks: Vec<KSubset>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::Domain("partition needs at least one block".into()))?;
        let (n, k) = (first.n(), first.k());
        let mut covered = 0u64;
        for b in &blocks {
            if b.n() != n || b.k() != k {
                return Err(Error::Domain("blocks disagree on n or k".into()));
            }
            if b.mask & covered != 0 {
                return Err(Error::Domain(format!("block {b} overlaps an earlier block")));
            }
            let leader = (!covered).trailing_zeros();
            if b.mask & (1 << leader) == 0 {
                return Err(Error::Domain(format!(
                    "block {b} does not contain the smallest uncovered element {leader}"
                )));
            }
            covered |= b.mask;
        }
        if covered != full_mask(n) {
            return Err(Error::Domain("blocks do not cover the ground set".into()));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[KSubset] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks[0].n()
    }

    pub fn k(&self) -> usize {
        self.blocks[0].k()
    }
}

impl fmt::Display for UniformPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Level {
    used_before: u64,
    leader: u8,
    avail: Vec<u8>,
    comb: Vec<usize>,
}

impl Level {
    fn block(&self) -> u64 {
        self.comb
            .iter()
            .fold(1u64 << self.leader, |m, &i| m | 1 << self.avail[i])
    }

    /// Next (k−1)-combination of `avail` in lexicographic order.
    fn advance(&mut self) -> bool {
        let r = self.comb.len();
        let m = self.avail.len();
        let Some(i) = (0..r).rev().find(|&i| self.comb[i] < m - r + i) else {
            return false;
        };
        self.comb[i] += 1;
        for j in i + 1..r {
            self.comb[j] = self.comb[j - 1] + 1;
        }
        true
    }
}

/// Backtracking stream of k-uniform partitions in canonical order.
#[derive(Debug, Clone)]
pub struct Partitions {
    n: u8,
    k: u8,
    levels: Vec<Level>,
    started: bool,
}

impl Partitions {
    fn descend(&mut self, mut used: u64) {
        let full = full_mask(self.n as usize);
        while used != full {
            let leader = (!used).trailing_zeros() as u8;
            let avail: Vec<u8> = (leader + 1..self.n).filter(|&e| used & (1 << e) == 0).collect();
            let level = Level {
                used_before: used,
                leader,
                avail,
                comb: (0..self.k as usize - 1).collect(),
            };
            used |= level.block();
            self.levels.push(level);
        }
    }

    fn current(&self) -> UniformPartition {
        let (n, k) = (self.n, self.k);
        UniformPartition {
            blocks: self
                .levels
                .iter()
                .map(|l| KSubset { mask: l.block(), n, k })
                .collect(),
        }
    }
}

impl Iterator for Partitions {
    type Item = UniformPartition;

    fn next(&mut self) -> Option<UniformPartition> {
        if !self.started {
            self.started = true;
            self.descend(0);
            return Some(self.current());
        }
        loop {
            let level = self.levels.last_mut()?;
            if level.advance() {
                let used = level.used_before | level.block();
                self.descend(used);
                return Some(self.current());
            }
            self.levels.pop();
        }
    }
}

pub fn enumerate_partitions(n: usize, k: usize) -> Result<Partitions> {
    check_nk(n, k)?;
    if !n.is_multiple_of(k) {
        return Err(Error::NotDivisible { n, k });
    }
    Ok(Partitions { n: n as u8, k: k as u8, levels: Vec::new(), started: false })
}

pub fn disjoint(s: &KSubset, t: &KSubset) -> Result<bool> {
    if s.n != t.n {
        return Err(Error::Domain(format!(
            "subsets live on ground sets of size {} and {}",
            s.n, t.n
        )));
    }
    Ok(s.mask & t.mask == 0)
}
