//! Families of k-subsets, the Cameron-Liebler parameter, the standard
//! constructions, and the five independent characterization predicates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{self, ExactMatrix, ExactVector};
use crate::setcore::{
    binomial, binomial_or_zero, colex_rank_mask, colex_unrank, enumerate_k_subsets,
    enumerate_partitions, GroundSet, KSubset, UniformPartition,
};
use crate::spectral::kneser_matrix;

/// Largest C(n,k) a family may index.
pub const MAX_FAMILY_LEN: u64 = 1 << 26;

/// Largest C(n,k) for which the matrix-based checks build C and K.
pub const MAX_CHECK_SIZE: u64 = 4096;

fn family_len(n: usize, k: usize) -> Result<usize> {
    GroundSet::new(n)?;
    if k == 0 || k > n {
        return Err(Error::InvalidSubset(format!("subset size {k} outside 1..={n}")));
    }
    let len = binomial(n, k);
    if len > MAX_FAMILY_LEN {
        return Err(Error::Resource(format!("C({n},{k}) = {len} exceeds {MAX_FAMILY_LEN}")));
    }
    Ok(len as usize)
}

/// A set of k-subsets of {0, …, n−1}, stored as its characteristic bit
/// vector indexed by colex rank.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: u8,
    k: u8,
    len: usize,
    bits: Vec<u64>,
}

impl Family {
    pub fn empty(n: usize, k: usize) -> Result<Self> {
        let len = family_len(n, k)?;
        Ok(Self { n: n as u8, k: k as u8, len, bits: vec![0; len.div_ceil(64)] })
    }

    pub fn full(n: usize, k: usize) -> Result<Self> {
        Ok(Self::empty(n, k)?.complement())
    }

    /// Builds a family from the low `C(n,k)` bits of `word`.
    pub fn from_word(n: usize, k: usize, word: u64) -> Result<Self> {
        let mut f = Self::empty(n, k)?;
        if f.len > 64 {
            return Err(Error::Domain(format!("C({n},{k}) = {} exceeds one word", f.len)));
        }
        if f.len < 64 && word >> f.len != 0 {
            return Err(Error::Domain(format!("word has bits beyond C({n},{k})")));
        }
        f.bits[0] = word;
        Ok(f)
    }

    pub fn from_bits(n: usize, k: usize, bits: Vec<u64>) -> Result<Self> {
        let mut f = Self::empty(n, k)?;
        if bits.len() != f.bits.len() {
            return Err(Error::Domain("bit vector has the wrong number of words".into()));
        }
        f.bits = bits;
        if f.bits != f.clone().masked().bits {
            return Err(Error::Domain(format!("bits set beyond C({n},{k})")));
        }
        Ok(f)
    }

    pub fn from_subsets<'a>(n: usize, k: usize, sets: impl IntoIterator<Item = &'a KSubset>) -> Result<Self> {
        let mut f = Self::empty(n, k)?;
        for s in sets {
            if s.n() != n || s.k() != k {
                return Err(Error::Domain(format!("{s} is not a {k}-subset of a {n}-set")));
            }
            f.insert(s.colex_rank() as usize);
        }
        Ok(f)
    }

    fn masked(mut self) -> Self {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    /// Length of the characteristic vector, C(n,k).
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    pub fn size(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, rank: usize) -> bool {
        rank < self.len && self.bits[rank / 64] >> (rank % 64) & 1 == 1
    }

    pub fn insert(&mut self, rank: usize) {
        assert!(rank < self.len, "rank {rank} outside family universe {}", self.len);
        self.bits[rank / 64] |= 1 << (rank % 64);
    }

    /// Ranks of the members, increasing.
    pub fn ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut m = word;
            std::iter::from_fn(move || {
                if m == 0 {
                    None
                } else {
                    let b = m.trailing_zeros() as usize;
                    m &= m - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }

    /// Members in colex order.
    pub fn members(&self) -> Vec<KSubset> {
        self.ranks()
            .map(|r| colex_unrank(r as u64, self.n(), self.k()).expect("rank in range"))
            .collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|w| !w).collect(),
            ..self.clone()
        }
        .masked()
    }

    /// Image under the ground-set relabeling `e ↦ perm[e]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let image_mask = perm.iter().fold(0u64, |m, &p| if p < n { m | 1 << p } else { m });
        if perm.len() != n || image_mask.count_ones() as usize != n {
            return Err(Error::Domain(format!("not a permutation of 0..{n}: {perm:?}")));
        }
        let mut out = Self { bits: vec![0; self.bits.len()], ..self.clone() };
        for s in self.members() {
            let image = s.elements().fold(0u64, |m, e| m | 1 << perm[e]);
            out.insert(colex_rank_mask(image) as usize);
        }
        Ok(out)
    }

    /// Characteristic vector χ as a 0/1 exact vector.
    pub fn to_vector(&self) -> ExactVector {
        ExactVector::from_i64(&(0..self.len).map(|r| i64::from(self.contains(r))).collect::<Vec<_>>())
    }

    /// Lexicographic comparison of characteristic vectors read from rank 0.
    pub fn cmp_bits(&self, other: &Self) -> Ordering {
        lex_cmp_bits(&self.bits, &other.bits)
    }

    /// True iff no two members are disjoint.
    pub fn is_intersecting(&self) -> bool {
        let masks: Vec<u64> = self.members().iter().map(KSubset::mask).collect();
        masks
            .iter()
            .enumerate()
            .all(|(i, a)| masks[i + 1..].iter().all(|b| a & b != 0))
    }
}

/// Compares bit vectors as sequences χ_0, χ_1, …; a 0 sorts before a 1.
pub fn lex_cmp_bits(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let diff = x ^ y;
        if diff != 0 {
            let bit = diff.trailing_zeros();
            return if x >> bit & 1 == 0 { Ordering::Less } else { Ordering::Greater };
        }
    }
    a.len().cmp(&b.len())
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family(n={}, k={}, {self})", self.n, self.k)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.members().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

/// The exact ratio |𝓛| / C(n−1, k−1), kept reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CLParameter {
    numerator: u64,
    denominator: u64,
}

impl CLParameter {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        assert!(denominator > 0);
        let g = numerator.gcd(&denominator);
        Self { numerator: numerator / g, denominator: denominator / g }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn as_integer(&self) -> Option<u64> {
        (self.denominator == 1).then_some(self.numerator)
    }
}

impl fmt::Display for CLParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

pub fn parameter(f: &Family) -> CLParameter {
    CLParameter::new(f.size() as u64, binomial(f.n() - 1, f.k() - 1))
}

pub fn point_pencil(n: usize, k: usize, p: usize) -> Result<Family> {
    if p >= n {
        return Err(Error::Domain(format!("element {p} outside 0..{n}")));
    }
    let mut f = Family::empty(n, k)?;
    for (r, s) in enumerate_k_subsets(n, k)?.enumerate() {
        if s.contains(p) {
            f.insert(r);
        }
    }
    Ok(f)
}

pub fn anti_pencil(n: usize, k: usize, p: usize) -> Result<Family> {
    Ok(point_pencil(n, k, p)?.complement())
}

pub fn complement(f: &Family) -> Family {
    f.complement()
}

/// The n × C(n,k) element/k-subset incidence matrix.
pub fn incidence_matrix(n: usize, k: usize) -> Result<ExactMatrix> {
    let masks: Vec<u64> = enumerate_k_subsets(n, k)?.map(|s| s.mask()).collect();
    Ok(ExactMatrix::from_fn(n, masks.len(), |p, r| i64::from(masks[r] >> p & 1 == 1)))
}

/// Kernel basis of C, plus machine-integer copies when every entry fits.
type KernelCache = (Vec<ExactVector>, Option<Vec<Vec<i64>>>);

/// Per-(n,k) data shared by all checks. Each piece is built on first use.
pub struct Context {
    n: usize,
    k: usize,
    masks: Vec<u64>,
    incidence: OnceLock<(ExactMatrix, usize)>,
    kneser: OnceLock<ExactMatrix>,
    kernel: OnceLock<KernelCache>,
    partitions: OnceLock<Vec<Vec<u32>>>,
}

impl Context {
    fn new(n: usize, k: usize) -> Result<Self> {
        let len = family_len(n, k)? as u64;
        if len > MAX_CHECK_SIZE {
            return Err(Error::Resource(format!(
                "C({n},{k}) = {len} exceeds the check bound {MAX_CHECK_SIZE}"
            )));
        }
        Ok(Self {
            n,
            k,
            masks: enumerate_k_subsets(n, k)?.map(|s| s.mask()).collect(),
            incidence: OnceLock::new(),
            kneser: OnceLock::new(),
            kernel: OnceLock::new(),
            partitions: OnceLock::new(),
        })
    }

    /// Shared context for (n, k), created once per process.
    pub fn get(n: usize, k: usize) -> Result<Arc<Context>> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<Context>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(ctx) = map.get(&(n, k)) {
            return Ok(Arc::clone(ctx));
        }
        let ctx = Arc::new(Context::new(n, k)?);
        map.insert((n, k), Arc::clone(&ctx));
        Ok(ctx)
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn incidence(&self) -> &ExactMatrix {
        &self.incidence_with_rank().0
    }

    pub fn incidence_rank(&self) -> usize {
        self.incidence_with_rank().1
    }

    fn incidence_with_rank(&self) -> &(ExactMatrix, usize) {
        self.incidence.get_or_init(|| {
            let c = incidence_matrix(self.n, self.k).expect("validated (n,k)");
            let r = exactla::rank_exact(&c);
            (c, r)
        })
    }

    pub fn kneser(&self) -> &ExactMatrix {
        self.kneser
            .get_or_init(|| kneser_matrix(self.n, self.k).expect("validated (n,k)"))
    }

    pub fn kernel(&self) -> &[ExactVector] {
        &self.kernel_parts().0
    }

    fn kernel_parts(&self) -> &(Vec<ExactVector>, Option<Vec<Vec<i64>>>) {
        self.kernel.get_or_init(|| {
            let basis = exactla::kernel_basis(self.incidence());
            let small = basis.iter().map(ExactVector::to_i64_vec).collect();
            (basis, small)
        })
    }

    /// Partitions as lists of block ranks, in enumeration order.
    pub fn partitions(&self) -> Result<&[Vec<u32>]> {
        if !self.n.is_multiple_of(self.k) {
            return Err(Error::NotDivisible { n: self.n, k: self.k });
        }
        Ok(self.partitions.get_or_init(|| {
            enumerate_partitions(self.n, self.k)
                .expect("validated (n,k)")
                .map(|p| p.blocks().iter().map(|b| b.colex_rank() as u32).collect())
                .collect()
        }))
    }
}

fn context_for(f: &Family) -> Result<Arc<Context>> {
    Context::get(f.n(), f.k())
}

fn partition_from_ranks(ranks: &[u32], n: usize, k: usize) -> UniformPartition {
    let blocks = ranks
        .iter()
        .map(|&r| colex_unrank(r as u64, n, k).expect("rank in range"))
        .collect();
    UniformPartition::new(blocks).expect("enumerated partitions are canonical")
}

/// Definition check: every k-uniform partition meets `f` in exactly x
/// blocks. A non-integer x fails with the first partition as witness.
pub fn check_by_partitions(f: &Family) -> Result<(bool, Option<UniformPartition>)> {
    if !f.n().is_multiple_of(f.k()) {
        return Err(Error::NotDivisible { n: f.n(), k: f.k() });
    }
    let ctx = context_for(f)?;
    let parts = ctx.partitions()?;
    let x = parameter(f).as_integer();
    let violation = parts.iter().find(|p| {
        let hits = p.iter().filter(|&&r| f.contains(r as usize)).count() as u64;
        x != Some(hits)
    });
    Ok(match violation {
        None => (true, None),
        Some(p) => (false, Some(partition_from_ranks(p, f.n(), f.k()))),
    })
}

/// For every k-subset π, the number of members disjoint from π equals
/// (x − χ_π)·C(n−k−1, k−1). A non-integer x fails at the first π.
pub fn check_by_disjointness(f: &Family) -> Result<(bool, Option<KSubset>)> {
    let ctx = context_for(f)?;
    let (n, k) = (f.n(), f.k());
    let first = || colex_unrank(0, n, k).expect("rank 0 exists");
    let Some(x) = parameter(f).as_integer() else {
        return Ok((false, Some(first())));
    };
    let coeff = binomial_or_zero(n as i64 - k as i64 - 1, k as i64 - 1);
    let members: Vec<u64> = f.ranks().map(|r| ctx.masks[r]).collect();
    for (r, &pi) in ctx.masks.iter().enumerate() {
        let count = members.iter().filter(|&&s| s & pi == 0).count() as i128;
        let expected = (x as i128 - i128::from(f.contains(r))) * coeff as i128;
        if count != expected {
            return Ok((false, Some(colex_unrank(r as u64, n, k)?)));
        }
    }
    Ok((true, None))
}

/// The integer-cleared vector u = n·C(n−1,k−1)·χ − k·|f|·j, a positive
/// multiple of χ − (kx/n)·j.
pub fn cleared_vector(f: &Family) -> ExactVector {
    let (n, k) = (f.n() as i64, f.k() as i64);
    let scale = BigInt::from(n) * BigInt::from(binomial(f.n() - 1, f.k() - 1));
    let shift = BigInt::from(k) * BigInt::from(f.size());
    ExactVector::new(
        (0..f.universe())
            .map(|r| if f.contains(r) { &scale - &shift } else { -shift.clone() })
            .collect(),
    )
}

/// K·u = −C(n−k−1,k−1)·u for the cleared vector u; u = 0 passes.
pub fn check_by_eigenvector(f: &Family) -> Result<bool> {
    Ok(eigenvector_violation(f)?.is_none())
}

fn eigenvector_violation(f: &Family) -> Result<Option<usize>> {
    let ctx = context_for(f)?;
    let u = cleared_vector(f);
    if u.is_zero() {
        return Ok(None);
    }
    let ku = exactla::mat_vec(ctx.kneser(), &u)?;
    let lambda = -BigInt::from(binomial_or_zero(
        f.n() as i64 - f.k() as i64 - 1,
        f.k() as i64 - 1,
    ));
    Ok((0..u.len()).find(|&i| *ku.get(i) != &lambda * u.get(i)))
}

/// χ lies in the row space of the incidence matrix.
pub fn check_by_rowspace(f: &Family) -> Result<bool> {
    let ctx = context_for(f)?;
    let extended = ctx.incidence().with_row(&f.to_vector())?;
    Ok(exactla::rank_exact(&extended) == ctx.incidence_rank())
}

/// χ is orthogonal to every kernel basis vector of the incidence matrix.
pub fn check_by_kernel(f: &Family) -> Result<(bool, Option<ExactVector>)> {
    let ctx = context_for(f)?;
    let (basis, small) = ctx.kernel_parts();
    let ranks: Vec<usize> = f.ranks().collect();
    let bad = match small {
        Some(small) => small
            .iter()
            .position(|b| ranks.iter().map(|&r| b[r] as i128).sum::<i128>() != 0),
        None => {
            let chi = f.to_vector();
            let mut found = None;
            for (i, b) in basis.iter().enumerate() {
                if !exactla::dot(&chi, b)?.is_zero() {
                    found = Some(i);
                    break;
                }
            }
            found
        }
    };
    Ok(match bad {
        None => (true, None),
        Some(i) => (false, Some(basis[i].clone())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Characterization {
    Partitions,
    Disjointness,
    Eigenvector,
    Rowspace,
    Kernel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Partition(UniformPartition),
    Subset(KSubset),
    KernelVector(ExactVector),
}

/// Verdicts of every characterization on one family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CLReport {
    pub n: usize,
    pub k: usize,
    pub size: usize,
    pub parameter: CLParameter,
    /// The partition verdict is absent when k does not divide n.
    pub verdicts: BTreeMap<Characterization, bool>,
    pub witness: Option<Witness>,
    /// All present verdicts agree.
    pub consistent: bool,
    /// The five characterizations are provably equivalent for this (n, k)
    /// (see [`equivalence_holds`]), so disagreement would be a bug.
    pub equivalence_asserted: bool,
    pub notes: Vec<String>,
}

impl CLReport {
    pub fn all_true(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn all_false(&self) -> bool {
        self.verdicts.values().all(|&v| !v)
    }

    /// True iff k | n and `f` meets every uniform partition equally often,
    /// i.e. `f` is a Cameron-Liebler class by definition.
    pub fn is_cl(&self) -> bool {
        self.verdicts.get(&Characterization::Partitions) == Some(&true)
    }

    pub fn verdict_vector(&self) -> Vec<bool> {
        self.verdicts.values().copied().collect()
    }
}

/// Multiplicity of -C(n-k-1,k-1) in the Kneser spectrum, counting every j
/// whose eigenvalue (-1)^j C(n-k-j,k-j) coincides with it. Assumes n >= 2k.
fn first_eigenvalue_multiplicity(n: usize, k: usize) -> u64 {
    let (n, k) = (n as i64, k as i64);
    let eigenvalue = |j: i64| (if j % 2 == 0 { 1 } else { -1 }) * binomial_or_zero(n - k - j, k - j) as i128;
    let target = eigenvalue(1);
    (1..=k)
        .filter(|&j| eigenvalue(j) == target)
        .map(|j| binomial_or_zero(n, j) - binomial_or_zero(n, j - 1))
        .sum()
}

/// Whether all five characterizations are equivalent on (n, k): k must
/// divide n, and either n = k or the eigenvalue -C(n-k-1,k-1) must have
/// multiplicity exactly n-1. The latter fails for n = 2k with k >= 3, where
/// every odd-indexed eigenvalue equals -1; there the partition,
/// disjointness and eigenvector tests still agree, but row(C) is smaller.
pub fn equivalence_holds(n: usize, k: usize) -> bool {
    k >= 1 && n.is_multiple_of(k) && (n == k || first_eigenvalue_multiplicity(n, k) == n as u64 - 1)
}

pub fn full_check(f: &Family) -> Result<CLReport> {
    let (n, k) = (f.n(), f.k());
    let param = parameter(f);
    let divides = n % k == 0;
    let mut verdicts = BTreeMap::new();
    let mut witness = None;
    let mut notes = Vec::new();

    if param.as_integer().is_none() {
        notes.push(format!(
            "|L| = {} is not a multiple of C(n-1,k-1) = {}; parameter {param} is not an integer",
            f.size(),
            binomial(n - 1, k - 1)
        ));
    }
    if divides {
        let (ok, w) = check_by_partitions(f)?;
        verdicts.insert(Characterization::Partitions, ok);
        witness = witness.or(w.map(Witness::Partition));
    } else {
        notes.push(format!(
            "k = {k} does not divide n = {n}: no uniform partitions exist and the remaining verdicts are not claimed equivalent"
        ));
    }
    let (ok, w) = check_by_disjointness(f)?;
    verdicts.insert(Characterization::Disjointness, ok);
    witness = witness.or(w.map(Witness::Subset));

    let violation = eigenvector_violation(f)?;
    verdicts.insert(Characterization::Eigenvector, violation.is_none());
    if let Some(r) = violation {
        witness = witness.or(Some(Witness::Subset(colex_unrank(r as u64, n, k)?)));
    }

    verdicts.insert(Characterization::Rowspace, check_by_rowspace(f)?);

    let (ok, w) = check_by_kernel(f)?;
    verdicts.insert(Characterization::Kernel, ok);
    witness = witness.or(w.map(Witness::KernelVector));

    let first = *verdicts.values().next().expect("at least four verdicts");
    let consistent = verdicts.values().all(|&v| v == first);
    if consistent && first {
        witness = None;
    }
    let equivalence_asserted = equivalence_holds(n, k);
    if divides && !equivalence_asserted {
        notes.push(format!(
            "eigenvalue -{} of the Kneser matrix has multiplicity {} != n-1 = {}: row(C) is a proper subspace of \
             that eigenspace plus <j>, so the rowspace and kernel tests are stricter than the definition here",
            binomial_or_zero(n as i64 - k as i64 - 1, k as i64 - 1),
            first_eigenvalue_multiplicity(n, k),
            n - 1
        ));
    }
    Ok(CLReport {
        n,
        k,
        size: f.size(),
        parameter: param,
        verdicts,
        witness,
        consistent,
        equivalence_asserted,
        notes,
    })
}
