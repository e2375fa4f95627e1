//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line to stderr (unaffected by output capture) before asserting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::io::Write;
use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clsets::classify::{census, ekr_2k_choices, ekr_bound_check, enumerate_cl_brute, enumerate_ekr_2k, pencil_center};
use clsets::clkernel::{
    anti_pencil, check_by_disjointness, check_by_eigenvector, check_by_kernel, check_by_partitions, check_by_rowspace,
    complement, full_check, incidence_matrix, parameter, point_pencil, Family,
};
use clsets::exactla::rank_exact;
use clsets::setcore::{binomial, enumerate_k_subsets, enumerate_partitions};
use clsets::spectral::verify_spectrum;

type Outcome = Result<String, String>;

fn err(e: impl Display) -> String {
    e.to_string()
}

fn run(id: u32, title: &str, body: fn() -> Outcome) {
    let start = Instant::now();
    let outcome = body();
    let secs = start.elapsed().as_secs_f64();
    let line = match &outcome {
        Ok(detail) => format!("criterion {id} [{title}]: PASS ({detail}; {secs:.1}s)"),
        Err(why) => format!("criterion {id} [{title}]: FAIL ({why})"),
    };
    let _ = writeln!(std::io::stderr(), "{line}");
    if let Err(why) = outcome {
        panic!("criterion {id} failed: {why}");
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

/// n! / ((k!)^(n/k) · (n/k)!)
fn partition_formula(n: usize, k: usize) -> BigUint {
    let m = n / k;
    factorial(n) / (factorial(k).pow(m as u32) * factorial(m))
}

/// The defining property, computed directly: every partition meets the
/// family in the same number of members. Returns that number.
fn definition_parameter(f: &Family) -> Option<u64> {
    let members: BTreeSet<u64> = f.members().iter().map(|s| s.mask()).collect();
    let mut seen = None;
    for p in enumerate_partitions(f.n(), f.k()).ok()? {
        let hits = p.blocks().iter().filter(|b| members.contains(&b.mask())).count() as u64;
        match seen {
            None => seen = Some(hits),
            Some(x) if x != hits => return None,
            _ => {}
        }
    }
    seen
}

fn pairwise_intersecting(masks: &[u64]) -> bool {
    masks.iter().enumerate().all(|(i, a)| masks[i + 1..].iter().all(|b| a & b != 0))
}

#[test]
fn criterion_1_partition_counts() {
    run(1, "partition counts, n <= 12, k | n", || {
        let mut pairs = 0;
        for n in 1..=12 {
            for k in (1..=n).filter(|k| n % k == 0) {
                let mut seen = BTreeSet::new();
                for p in enumerate_partitions(n, k).map_err(err)? {
                    let masks: Vec<u64> = p.blocks().iter().map(|b| b.mask()).collect();
                    let union = masks.iter().fold(0u64, |acc, m| {
                        assert_eq!(acc & m, 0);
                        acc | m
                    });
                    ensure!(union == (1u64 << n) - 1, "({n},{k}): partition does not cover");
                    ensure!(seen.insert(masks), "({n},{k}): repeated partition");
                }
                let expected = partition_formula(n, k);
                ensure!(
                    BigUint::from(seen.len()) == expected,
                    "({n},{k}): enumerated {} but formula gives {expected}",
                    seen.len()
                );
                pairs += 1;
            }
        }
        Ok(format!("{pairs} (n,k) pairs match the closed formula"))
    });
}

#[test]
fn criterion_2_exhaustive_equivalence() {
    run(2, "five-way equivalence over every family", || {
        let mut summary = Vec::new();
        let mut exceptions = 0u64;
        for (n, k) in [(3, 3), (4, 4), (4, 2), (6, 2), (6, 3)] {
            let len = binomial(n, k);
            let (mut cl, mut disagree) = (0u64, 0u64);
            let mut patterns: BTreeMap<[bool; 5], u64> = BTreeMap::new();
            for word in 0..1u64 << len {
                let f = Family::from_word(n, k, word).map_err(err)?;
                let v = [
                    check_by_partitions(&f).map_err(err)?.0,
                    check_by_disjointness(&f).map_err(err)?.0,
                    check_by_eigenvector(&f).map_err(err)?,
                    check_by_rowspace(&f).map_err(err)?,
                    check_by_kernel(&f).map_err(err)?.0,
                ];
                if !v.iter().all(|&b| b == v[0]) {
                    disagree += 1;
                    *patterns.entry(v).or_default() += 1;
                }
                // The definition itself, recomputed for every family the
                // partition check accepts and a sample of the rest.
                if v[0] || word % 97 == 0 {
                    ensure!(
                        definition_parameter(&f).is_some() == v[0],
                        "({n},{k}) word {word:#x}: definition disagrees with the partition check"
                    );
                }
                if v[0] {
                    cl += 1;
                }
            }
            exceptions += disagree;
            let mut line = format!("({n},{k}): 2^{len} families, {cl} CL, {disagree} disagreements");
            if !patterns.is_empty() {
                line += &format!(" [partitions,disjointness,eigenvector,rowspace,kernel] {patterns:?}");
            }
            summary.push(line);
        }
        ensure!(exceptions == 0, "{}", summary.join("; "));
        Ok(summary.join(", "))
    });
}

#[test]
fn criterion_3_classification_6_2() {
    run(3, "classification at (6,2)", || {
        let (n, k) = (6, 2);
        let found: BTreeSet<Vec<u64>> = enumerate_cl_brute(n, k)
            .map_err(err)?
            .into_iter()
            .map(|f| f.members().iter().map(|s| s.mask()).collect())
            .collect();
        // Independent construction from raw masks.
        let all: Vec<u64> = enumerate_k_subsets(n, k).map_err(err)?.map(|s| s.mask()).collect();
        let mut expected: BTreeSet<Vec<u64>> = BTreeSet::new();
        expected.insert(Vec::new());
        expected.insert(all.clone());
        for p in 0..n {
            expected.insert(all.iter().copied().filter(|m| m >> p & 1 == 1).collect());
            expected.insert(all.iter().copied().filter(|m| m >> p & 1 == 0).collect());
        }
        ensure!(expected.len() == 14, "oracle built {} families", expected.len());
        ensure!(found == expected, "brute force found {} families, not the 14 expected", found.len());
        let c = census(n, k, false).map_err(err)?;
        let counts: Vec<(u64, usize)> = c.counts_by_parameter.into_iter().collect();
        ensure!(counts == [(0, 1), (1, 6), (2, 6), (3, 1)], "counts by parameter {counts:?}");
        ensure!(c.matches_theorem == Some(true), "matches_theorem = {:?}", c.matches_theorem);
        Ok("exactly empty, full, 6 pencils, 6 anti-pencils".into())
    });
}

/// Burnside: number of orbits of Sym(2k) on the pair-choice families.
fn burnside_orbits(k: usize) -> usize {
    let n = 2 * k;
    let families: Vec<Family> = ekr_2k_choices(k).unwrap().collect();
    let mut fixed_total = 0usize;
    let mut group_order = 0usize;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        group_order += 1;
        fixed_total += families.iter().filter(|f| f.relabel(&perm).unwrap() == **f).count();
        // next permutation, lexicographic
        let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    assert_eq!(fixed_total % group_order, 0);
    fixed_total / group_order
}

#[test]
fn criterion_4_ekr_choice_counts() {
    run(4, "pair-choice families on 2k points", || {
        let mut summary = Vec::new();
        let mut mismatches = Vec::new();
        for (k, expected_orbits) in [(1, 1), (2, 2), (3, 11)] {
            let c = enumerate_ekr_2k(k).map_err(err)?;
            let expected_total = BigUint::from(2u32).pow(binomial(2 * k - 1, k - 1) as u32);
            ensure!(c.total == expected_total, "k={k}: total {} != {expected_total}", c.total);
            ensure!(c.all_confirmed, "k={k}: some choice family is not an intersecting class with x = 1");
            let orbit_sum: u64 = c.orbits.iter().map(|o| o.orbit_size()).sum();
            ensure!(BigUint::from(orbit_sum) == c.total, "k={k}: orbit sizes sum to {orbit_sum}");
            let burnside = burnside_orbits(k);
            ensure!(
                c.nonisomorphic == burnside,
                "k={k}: canonical forms give {} orbits, Burnside gives {burnside}",
                c.nonisomorphic
            );
            let sizes: Vec<u64> = c.orbits.iter().map(|o| o.orbit_size()).collect();
            summary.push(format!(
                "k={k}: {} choices, {} orbits (Burnside {burnside}) of sizes {sizes:?}, {} in row(C)",
                c.total, c.nonisomorphic, c.in_row_space
            ));
            if c.nonisomorphic != expected_orbits {
                mismatches.push(format!("k={k}: {} nonisomorphic, expected {expected_orbits}", c.nonisomorphic));
            }
        }
        ensure!(mismatches.is_empty(), "{}; {}", mismatches.join(", "), summary.join("; "));
        Ok(summary.join("; "))
    });
}

#[test]
fn criterion_5_spectrum() {
    run(5, "Kneser spectrum for every C(n,k) <= 1000", || {
        let mut pairs = 0;
        for n in 1..=64usize {
            for k in (1..=n).filter(|&k| binomial(n, k) <= 1000) {
                let r = verify_spectrum(n, k).map_err(err)?;
                ensure!(r.passed, "({n},{k}) failed: {r:?}");
                // Independent moment identities: Σm·λ = tr K = 0 and
                // Σm·λ² = tr K² = C(n,k)·C(n−k,k).
                let size = binomial(n, k) as i128;
                let degree = binomial(n - k, k) as i128;
                let pairs_ = &r.predicted.pairs;
                let m1: i128 = pairs_.iter().map(|&(l, m)| l as i128 * m as i128).sum();
                let m2: i128 = pairs_.iter().map(|&(l, m)| (l as i128).pow(2) * m as i128).sum();
                let m0: i128 = pairs_.iter().map(|&(_, m)| m as i128).sum();
                ensure!(m0 == size && m1 == 0 && m2 == size * degree, "({n},{k}) moments {m0},{m1},{m2}");
                pairs += 1;
            }
        }
        Ok(format!("{pairs} (n,k) pairs verified, including (12,6)"))
    });
}

#[test]
fn criterion_6_size_law_and_incidence_rank() {
    run(6, "size law and rank of the incidence matrix", || {
        let mut families: Vec<Family> = Vec::new();
        for (n, k) in [(3, 3), (4, 4), (4, 2), (6, 2), (6, 3), (4, 1), (6, 1)] {
            families.extend(enumerate_cl_brute(n, k).map_err(err)?);
        }
        families.extend(ekr_2k_choices(3).map_err(err)?);
        for n in 1..=12 {
            for k in (1..=n).filter(|k| n % k == 0) {
                families.push(Family::empty(n, k).map_err(err)?);
                families.push(Family::full(n, k).map_err(err)?);
                for p in 0..n {
                    families.push(point_pencil(n, k, p).map_err(err)?);
                    families.push(anti_pencil(n, k, p).map_err(err)?);
                }
            }
        }
        let mut checked = 0;
        for f in &families {
            let (n, k) = (f.n(), f.k());
            let Some(x) = definition_parameter(f) else {
                return Err(format!("({n},{k}) family {f} is not a class"));
            };
            ensure!(
                f.size() as u64 == x * binomial(n - 1, k - 1),
                "({n},{k}): |L| = {} but x·C(n−1,k−1) = {}",
                f.size(),
                x * binomial(n - 1, k - 1)
            );
            ensure!(parameter(f).as_integer() == Some(x), "({n},{k}): parameter {} != {x}", parameter(f));
            checked += 1;
        }
        let mut ranks = 0;
        for n in 2..=12 {
            for k in 1..n {
                let r = rank_exact(&incidence_matrix(n, k).map_err(err)?);
                ensure!(r == n, "rank C({n},{k}) = {r}");
                ranks += 1;
            }
        }
        Ok(format!("{checked} classes obey the size law; rank C = n for {ranks} (n,k) pairs"))
    });
}

#[test]
fn criterion_7_complement_duality() {
    run(7, "complement duality on the (6,2) census", || {
        let (n, k) = (6u64, 2u64);
        let c = census(6, 2, false).map_err(err)?;
        for f in &c.families {
            let x = parameter(f).as_integer().ok_or("non-integer parameter")?;
            let g = complement(f);
            let report = full_check(&g).map_err(err)?;
            ensure!(report.is_cl(), "complement of {f} is not a class");
            ensure!(
                report.parameter.as_integer() == Some(n / k - x),
                "complement of a parameter-{x} class has parameter {}",
                report.parameter
            );
        }
        let counts = &c.counts_by_parameter;
        for (&x, &count) in counts {
            ensure!(counts.get(&(n / k - x)) == Some(&count), "census not symmetric at x = {x}: {counts:?}");
        }
        Ok(format!("{} classes, counts {counts:?}", c.families.len()))
    });
}

/// A random maximal intersecting family: sets are offered in random order,
/// optionally after a random batch of sets through one point, and each is
/// kept when it meets everything kept so far.
fn random_maximal_intersecting(all: &[u64], n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut order = all.to_vec();
    order.shuffle(rng);
    if rng.random_bool(0.5) {
        let p = rng.random_range(0..n);
        let lead = rng.random_range(1..=all.len());
        let mut through: Vec<u64> = order.iter().copied().filter(|m| m >> p & 1 == 1).take(lead).collect();
        order.retain(|m| !through.contains(m));
        through.extend(order);
        order = through;
    }
    let mut kept: Vec<u64> = Vec::new();
    for m in order {
        if kept.iter().all(|&k| k & m != 0) {
            kept.push(m);
        }
    }
    kept
}

#[test]
fn criterion_8_ekr_oracle() {
    run(8, "EKR bound", || {
        for f in ekr_2k_choices(3).map_err(err)? {
            let masks: Vec<u64> = f.members().iter().map(|s| s.mask()).collect();
            ensure!(pairwise_intersecting(&masks), "choice family {f} is not intersecting");
            ensure!(f.size() as u64 == binomial(5, 2), "choice family of size {}", f.size());
        }

        let (n, k) = (7, 3);
        let bound = binomial(n - 1, k - 1) as usize;
        let pencil = point_pencil(n, k, 0).map_err(err)?;
        ensure!(pencil.size() == 15 && bound == 15, "pencil size {}", pencil.size());
        ensure!(ekr_bound_check(n, k, &[pencil]).map_err(err)?, "pencil rejected");

        let all: Vec<u64> = enumerate_k_subsets(n, k).map_err(err)?.map(|s| s.mask()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007_0003);
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        let mut batch = Vec::new();
        for _ in 0..100_000 {
            let masks = random_maximal_intersecting(&all, n, &mut rng);
            ensure!(pairwise_intersecting(&masks), "search produced a non-intersecting family");
            ensure!(masks.len() <= bound, "intersecting family of size {} > {bound}", masks.len());
            if masks.len() == bound {
                let common = masks.iter().fold(u64::MAX, |a, m| a & m);
                ensure!(common.count_ones() == 1, "size-{bound} family without a common point");
            }
            *sizes.entry(masks.len()).or_default() += 1;
            let sets: Vec<_> = masks.iter().map(|&m| clsets::setcore::KSubset::from_mask(n, m).unwrap()).collect();
            let f = Family::from_subsets(n, k, &sets).map_err(err)?;
            if f.size() == bound {
                ensure!(pencil_center(&f).is_some(), "library does not recognize a pencil");
            }
            batch.push(f);
            if batch.len() == 10_000 {
                ensure!(ekr_bound_check(n, k, &batch).map_err(err)?, "library bound check rejected a batch");
                batch.clear();
            }
        }
        ensure!(sizes.get(&bound).copied().unwrap_or(0) > 0, "search never reached the bound: {sizes:?}");
        Ok(format!("10^5 random maximal families, sizes {sizes:?}; every size-15 family is a pencil"))
    });
}
