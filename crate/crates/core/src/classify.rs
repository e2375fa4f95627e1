//! Exhaustive enumeration of Cameron-Liebler classes at small sizes,
//! isomorph rejection under relabelings of the ground set, and the
//! Erdős-Ko-Rado census for n = 2k.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::clkernel::{
    anti_pencil, check_by_kernel, check_by_partitions, equivalence_holds, full_check, lex_cmp_bits,
    parameter, point_pencil, Characterization, Family,
};
use crate::error::{Error, Result};
use crate::setcore::{binomial, colex_rank_mask, enumerate_k_subsets};

/// Largest C(n,k) for the 2^C(n,k) brute-force sweep.
pub const MAX_BRUTE_BITS: usize = 24;

/// Largest ground set for the full n! canonicalization sweep.
pub const MAX_CANONICAL_N: usize = 10;

/// Default largest k for [`enumerate_ekr_2k`]; k = 4 would mean 2^35 choices.
pub const DEFAULT_MAX_EKR_K: usize = 3;

/// Permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = Some((0..n).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut p = cur.clone();
        if let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) {
            let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
            p.swap(i - 1, j);
            p[i..].reverse();
            next = Some(p);
        }
        Some(cur)
    })
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Rank images of every k-subset under every permutation, flattened as
/// `table[perm_index * C(n,k) + rank]`.
fn relabel_table(n: usize, k: usize) -> Result<Arc<Vec<u32>>> {
    type Tables = Mutex<HashMap<(usize, usize), Arc<Vec<u32>>>>;
    static TABLES: OnceLock<Tables> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    let mut map = tables.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = map.get(&(n, k)) {
        return Ok(Arc::clone(t));
    }
    let masks: Vec<u64> = enumerate_k_subsets(n, k)?.map(|s| s.mask()).collect();
    let mut table = Vec::with_capacity(factorial(n) as usize * masks.len());
    for perm in permutations(n) {
        for &m in &masks {
            let mut image = 0u64;
            let mut rest = m;
            while rest != 0 {
                image |= 1 << perm[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            table.push(colex_rank_mask(image) as u32);
        }
    }
    let table = Arc::new(table);
    map.insert((n, k), Arc::clone(&table));
    Ok(table)
}

/// A family with its orbit invariant under Sym(n): the lexicographically
/// least characteristic vector over all relabelings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalFamily {
    pub family: Family,
    pub canonical: Family,
    /// Number of relabelings fixing `family`.
    pub automorphisms: u64,
}

impl CanonicalFamily {
    pub fn canonical_bits(&self) -> &[u64] {
        self.canonical.bits()
    }

    pub fn orbit_size(&self) -> u64 {
        factorial(self.family.n()) / self.automorphisms
    }
}

pub fn canonical_form(f: &Family) -> Result<CanonicalFamily> {
    let (n, k) = (f.n(), f.k());
    if n > MAX_CANONICAL_N {
        return Err(Error::Resource(format!(
            "canonical form sweeps n! relabelings; n = {n} exceeds {MAX_CANONICAL_N}"
        )));
    }
    let len = f.universe();
    let ranks: Vec<usize> = f.ranks().collect();
    let mut best = f.bits().to_vec();
    let mut automorphisms = 0u64;
    let mut image = vec![0u64; best.len()];
    let mut consider = |image: &[u64]| {
        if image == f.bits() {
            automorphisms += 1;
        }
        if lex_cmp_bits(image, &best).is_lt() {
            best.copy_from_slice(image);
        }
    };
    if n <= 8 {
        let table = relabel_table(n, k)?;
        for row in table.chunks(len) {
            image.iter_mut().for_each(|w| *w = 0);
            for &r in &ranks {
                let t = row[r] as usize;
                image[t / 64] |= 1 << (t % 64);
            }
            consider(&image);
        }
    } else {
        let masks: Vec<u64> = f.members().iter().map(|s| s.mask()).collect();
        for perm in permutations(n) {
            image.iter_mut().for_each(|w| *w = 0);
            for &m in &masks {
                let mut img = 0u64;
                let mut rest = m;
                while rest != 0 {
                    img |= 1 << perm[rest.trailing_zeros() as usize];
                    rest &= rest - 1;
                }
                let t = colex_rank_mask(img) as usize;
                image[t / 64] |= 1 << (t % 64);
            }
            consider(&image);
        }
    }
    Ok(CanonicalFamily {
        family: f.clone(),
        canonical: Family::from_bits(n, k, best)?,
        automorphisms,
    })
}

fn check_brute_bounds(n: usize, k: usize) -> Result<usize> {
    if k == 0 || k > n || !n.is_multiple_of(k) {
        return Err(Error::NotDivisible { n, k });
    }
    let len = binomial(n, k) as usize;
    if len > MAX_BRUTE_BITS {
        return Err(Error::Resource(format!(
            "2^C({n},{k}) = 2^{len} families exceeds 2^{MAX_BRUTE_BITS}"
        )));
    }
    Ok(len)
}

/// Every Cameron-Liebler class of k-sets on an n-set, in increasing order of
/// characteristic word. Where the characterizations are equivalent,
/// candidates are filtered by kernel orthogonality first; every survivor is
/// confirmed by the partition check, which is the definition.
pub fn enumerate_cl_brute(n: usize, k: usize) -> Result<Vec<Family>> {
    let len = check_brute_bounds(n, k)?;
    let kernel_first = equivalence_holds(n, k);
    (0u64..1 << len)
        .into_par_iter()
        .map(|word| -> Result<Option<Family>> {
            let f = Family::from_word(n, k, word)?;
            if (kernel_first && !check_by_kernel(&f)?.0) || !check_by_partitions(&f)?.0 {
                return Ok(None);
            }
            Ok(Some(f))
        })
        .filter_map(|r| r.transpose())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationResult {
    pub n: usize,
    pub k: usize,
    pub all_cl: BTreeMap<u64, Vec<CanonicalFamily>>,
    pub counts_by_parameter: BTreeMap<u64, usize>,
    pub matches_theorem: bool,
}

impl ClassificationResult {
    pub fn total(&self) -> usize {
        self.counts_by_parameter.values().sum()
    }
}

/// The families the classification theorem allows for n ≥ 3k: empty, full,
/// the n point pencils and the n anti-pencils.
pub fn theorem_families(n: usize, k: usize) -> Result<Vec<Family>> {
    let mut out = vec![Family::empty(n, k)?, Family::full(n, k)?];
    for p in 0..n {
        out.push(point_pencil(n, k, p)?);
        out.push(anti_pencil(n, k, p)?);
    }
    out.sort_by(|a, b| a.bits().cmp(b.bits()));
    out.dedup();
    Ok(out)
}

fn integer_parameter(f: &Family) -> Result<u64> {
    parameter(f).as_integer().ok_or_else(|| {
        Error::Domain(format!("family {f} has non-integer parameter {}", parameter(f)))
    })
}

pub fn verify_classification(n: usize, k: usize) -> Result<ClassificationResult> {
    if k < 2 {
        return Err(Error::Precondition(format!(
            "k = {k}: for k = 1 every family of 1-subsets is a Cameron-Liebler class"
        )));
    }
    if n < 3 * k {
        return Err(Error::Precondition(format!(
            "n = {n} < 3k = {}: the classification only covers n >= 3k",
            3 * k
        )));
    }
    let found = enumerate_cl_brute(n, k)?;
    let mut sorted = found.clone();
    sorted.sort_by(|a, b| a.bits().cmp(b.bits()));
    let matches_theorem = sorted == theorem_families(n, k)?;

    let canon: Vec<CanonicalFamily> = found.par_iter().map(canonical_form).collect::<Result<_>>()?;
    let mut all_cl: BTreeMap<u64, Vec<CanonicalFamily>> = BTreeMap::new();
    for c in canon {
        all_cl.entry(integer_parameter(&c.family)?).or_default().push(c);
    }
    let counts_by_parameter = all_cl.iter().map(|(&x, v)| (x, v.len())).collect();
    Ok(ClassificationResult { n, k, all_cl, counts_by_parameter, matches_theorem })
}

/// Summary of an exhaustive enumeration, with optional orbit counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub n: usize,
    pub k: usize,
    pub families: Vec<Family>,
    pub counts_by_parameter: BTreeMap<u64, usize>,
    /// Present when n ≥ 3k and k ≥ 2.
    pub matches_theorem: Option<bool>,
    /// Orbit counts per parameter, when requested.
    pub orbits: Option<BTreeMap<u64, usize>>,
}

pub fn census(n: usize, k: usize, up_to_iso: bool) -> Result<Census> {
    check_brute_bounds(n, k)?;
    if up_to_iso && n > MAX_CANONICAL_N {
        return Err(Error::Resource(format!("orbit counting needs n <= {MAX_CANONICAL_N}")));
    }
    let families = enumerate_cl_brute(n, k)?;
    let mut counts_by_parameter = BTreeMap::new();
    for f in &families {
        *counts_by_parameter.entry(integer_parameter(f)?).or_insert(0) += 1;
    }
    let matches_theorem = if k >= 2 && n >= 3 * k {
        let mut sorted = families.clone();
        sorted.sort_by(|a, b| a.bits().cmp(b.bits()));
        Some(sorted == theorem_families(n, k)?)
    } else {
        None
    };
    let orbits = if up_to_iso {
        let canon: Vec<CanonicalFamily> = families.par_iter().map(canonical_form).collect::<Result<_>>()?;
        let mut reps: BTreeMap<u64, Vec<Vec<u64>>> = BTreeMap::new();
        for c in canon {
            reps.entry(integer_parameter(&c.family)?)
                .or_default()
                .push(c.canonical_bits().to_vec());
        }
        Some(
            reps.into_iter()
                .map(|(x, mut v)| {
                    v.sort();
                    v.dedup();
                    (x, v.len())
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(Census { n, k, families, counts_by_parameter, matches_theorem, orbits })
}

/// Outcome of enumerating every "one k-set from each complementary pair"
/// family on a 2k-set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EkrCensus {
    pub k: usize,
    pub total: BigUint,
    pub nonisomorphic: usize,
    /// One representative per orbit, ordered by canonical bits.
    pub orbits: Vec<CanonicalFamily>,
    /// Every choice met each partition exactly once (parameter 1) and was
    /// pairwise intersecting.
    pub all_confirmed: bool,
    /// How many choices also lie in the row space of the incidence matrix.
    /// This is all of them for k <= 2 but not for k >= 3, where the
    /// characterizations stop being equivalent.
    pub in_row_space: usize,
}

/// Pair-choice families for n = 2k, in order of choice word: bit i of the
/// word picks the complement of the i-th k-set containing element 0.
pub fn ekr_2k_choices(k: usize) -> Result<impl Iterator<Item = Family>> {
    let n = 2 * k;
    let masks: Vec<u64> = enumerate_k_subsets(n, k)?.map(|s| s.mask()).collect();
    let full = (1u64 << n) - 1;
    let pairs: Vec<(usize, usize)> = masks
        .iter()
        .enumerate()
        .filter(|(_, m)| *m & 1 == 1)
        .map(|(r, m)| (r, colex_rank_mask(full & !m) as usize))
        .collect();
    let count = pairs.len();
    if count >= 64 {
        return Err(Error::Resource(format!("2^{count} pair choices")));
    }
    let empty = Family::empty(n, k)?;
    Ok((0u64..1 << count).map(move |word| {
        let mut f = empty.clone();
        for (i, &(with_zero, without)) in pairs.iter().enumerate() {
            f.insert(if word >> i & 1 == 1 { without } else { with_zero });
        }
        f
    }))
}

pub fn enumerate_ekr_2k(k: usize) -> Result<EkrCensus> {
    enumerate_ekr_2k_bounded(k, DEFAULT_MAX_EKR_K)
}

pub fn enumerate_ekr_2k_bounded(k: usize, max_k: usize) -> Result<EkrCensus> {
    if k == 0 || k > max_k.min(4) {
        return Err(Error::Resource(format!(
            "k = {k} outside 1..={}",
            max_k.min(4)
        )));
    }
    let total = BigUint::from(2u32).pow(binomial(2 * k - 1, k - 1) as u32);
    let choices: Vec<Family> = ekr_2k_choices(k)?.collect();
    let checked: Vec<(bool, bool, CanonicalFamily)> = choices
        .par_iter()
        .map(|f| -> Result<(bool, bool, CanonicalFamily)> {
            let report = full_check(f)?;
            let ok = report.is_cl()
                && report.parameter.as_integer() == Some(1)
                && f.is_intersecting();
            let row = report.verdicts.get(&Characterization::Rowspace) == Some(&true);
            Ok((ok, row, canonical_form(f)?))
        })
        .collect::<Result<_>>()?;
    let all_confirmed = BigUint::from(checked.len()) == total && checked.iter().all(|(ok, _, _)| *ok);
    let in_row_space = checked.iter().filter(|(_, row, _)| *row).count();
    let mut orbits: Vec<CanonicalFamily> = Vec::new();
    let mut by_canon: BTreeMap<Vec<u64>, CanonicalFamily> = BTreeMap::new();
    for (_, _, c) in checked {
        by_canon.entry(c.canonical_bits().to_vec()).or_insert(c);
    }
    orbits.extend(by_canon.into_values());
    orbits.sort_by(|a, b| lex_cmp_bits(a.canonical_bits(), b.canonical_bits()));
    Ok(EkrCensus { k, total, nonisomorphic: orbits.len(), orbits, all_confirmed, in_row_space })
}

/// If every member contains a common element and the family has the size
/// of a point pencil, returns that element.
pub fn pencil_center(f: &Family) -> Option<usize> {
    if f.size() as u64 != binomial(f.n() - 1, f.k() - 1) {
        return None;
    }
    let common = f.members().iter().fold(u64::MAX, |acc, s| acc & s.mask());
    (common != 0 && common != u64::MAX).then(|| common.trailing_zeros() as usize)
}

/// Checks the Erdős-Ko-Rado bound on pairwise-intersecting families: size at
/// most C(n−1,k−1), and for n ≥ 2k+1 equality only for point pencils.
pub fn ekr_bound_check(n: usize, k: usize, families: &[Family]) -> Result<bool> {
    if k == 0 || n < 2 * k {
        return Err(Error::Precondition(format!("n = {n} < 2k = {}", 2 * k)));
    }
    let bound = binomial(n - 1, k - 1) as usize;
    let mut ok = true;
    for f in families {
        if f.n() != n || f.k() != k {
            return Err(Error::Domain(format!("family over ({}, {}) in an ({n}, {k}) check", f.n(), f.k())));
        }
        if !f.is_intersecting() {
            return Err(Error::Domain(format!("family {f} has two disjoint members")));
        }
        let over = f.size() > bound;
        let extremal_non_pencil = n > 2 * k && f.size() == bound && pencil_center(f).is_none();
        if over || extremal_non_pencil {
            ok = false;
        }
    }
    Ok(ok)
}
