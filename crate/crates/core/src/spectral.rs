//! The Kneser (disjointness) matrix and exact verification of its spectrum.
//!
//! Eigenvalues are integers, so verification never leaves exact arithmetic:
//! the product of `K − λI` over the distinct predicted eigenvalues must vanish,
//! each `K − λI` must have rank `C(n,k) − mult(λ)`, and the first two power
//! traces must match.
//!
//! Ranks of small matrices come from fraction-free elimination. Above
//! [`BAREISS_LIMIT`] they are certified instead: elimination mod a prime gives
//! a lower bound on every rational rank, and once the product vanishes `K` is
//! diagonalizable with eigenvalues among the predicted ones, so the nullities
//! sum to `C(n,k)`. If every modular rank equals its expected value the upper
//! bounds on the nullities add up to exactly `C(n,k)`, forcing equality.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{self, ExactMatrix, ExactVector};
use crate::setcore::{binomial, binomial_or_zero, enumerate_k_subsets};

/// Default cap on C(n,k) for [`verify_spectrum`].
pub const DEFAULT_MAX_SIZE: u64 = 1000;

/// Largest matrix ranked by fraction-free elimination during verification.
pub const BAREISS_LIMIT: usize = 128;

/// Largest order for which a Kneser matrix is materialized.
pub const MAX_KNESER_ORDER: u64 = 4096;

const RANK_PRIME: u64 = 2_147_483_647;

/// C(n,k) × C(n,k) 0/1 matrix with a 1 exactly at pairs of disjoint k-subsets.
pub fn kneser_matrix(n: usize, k: usize) -> Result<ExactMatrix> {
    let masks: Vec<u64> = enumerate_k_subsets(n, k)?.map(|s| s.mask()).collect();
    let size = masks.len() as u64;
    if size > MAX_KNESER_ORDER {
        return Err(Error::Resource(format!("Kneser matrix of order C({n},{k}) = {size}")));
    }
    Ok(ExactMatrix::from_fn(masks.len(), masks.len(), |r, c| {
        i64::from(masks[r] & masks[c] == 0)
    }))
}

/// Predicted eigenvalues λ_j = (−1)^j·C(n−k−j, k−j) with multiplicities
/// C(n,j) − C(n,j−1), j = 0..k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumPrediction {
    pub n: usize,
    pub k: usize,
    /// One entry per j, before merging; multiplicities may be nonpositive
    /// when n < 2k.
    pub raw: Vec<(i64, i64)>,
    /// Distinct eigenvalues in order of first appearance, multiplicities
    /// summed, zero-multiplicity entries dropped.
    pub pairs: Vec<(i64, i64)>,
}

impl SpectrumPrediction {
    pub fn total_multiplicity(&self) -> i64 {
        self.pairs.iter().map(|&(_, m)| m).sum()
    }

    /// True when some raw multiplicity is not positive (only for n < 2k).
    pub fn degenerate(&self) -> bool {
        self.raw.iter().any(|&(_, m)| m <= 0)
    }
}

pub fn predicted_spectrum(n: usize, k: usize) -> Result<SpectrumPrediction> {
    enumerate_k_subsets(n, k)?;
    let raw: Vec<(i64, i64)> = (0..=k)
        .map(|j| {
            let magnitude = binomial_or_zero((n - k) as i64 - j as i64, (k - j) as i64) as i64;
            let eigenvalue = if j % 2 == 0 { magnitude } else { -magnitude };
            let below = if j == 0 { 0 } else { binomial(n, j - 1) as i64 };
            (eigenvalue, binomial(n, j) as i64 - below)
        })
        .collect();
    let mut pairs: Vec<(i64, i64)> = Vec::new();
    for &(lambda, m) in &raw {
        match pairs.iter_mut().find(|(l, _)| *l == lambda) {
            Some(entry) => entry.1 += m,
            None => pairs.push((lambda, m)),
        }
    }
    pairs.retain(|&(_, m)| m != 0);
    Ok(SpectrumPrediction { n, k, raw, pairs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMethod {
    /// Fraction-free elimination over the integers.
    Bareiss,
    /// Modular rank certified by annihilation and the dimension count.
    ModularCertified,
    /// Modular rank only; a lower bound on the rational rank.
    ModularLowerBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCheck {
    pub eigenvalue: i64,
    pub multiplicity: i64,
    pub expected_rank: usize,
    pub rank: usize,
    pub method: RankMethod,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceChecks {
    /// Σ mult·λ equals tr(K) = 0.
    pub sum: bool,
    /// Σ mult·λ² equals tr(K²) = C(n,k)·C(n−k,k).
    pub sum_of_squares: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub k: usize,
    pub size: usize,
    pub predicted: SpectrumPrediction,
    pub symmetric: bool,
    pub regular: bool,
    pub multiplicities_sum: bool,
    pub annihilation: bool,
    pub ranks: Vec<RankCheck>,
    pub traces: TraceChecks,
    pub passed: bool,
}

pub fn verify_spectrum(n: usize, k: usize) -> Result<SpectrumReport> {
    verify_spectrum_bounded(n, k, DEFAULT_MAX_SIZE)
}

pub fn verify_spectrum_bounded(n: usize, k: usize, max_size: u64) -> Result<SpectrumReport> {
    let predicted = predicted_spectrum(n, k)?;
    let size = binomial(n, k);
    if size > max_size {
        return Err(Error::Resource(format!("C({n},{k}) = {size} exceeds the bound {max_size}")));
    }
    let size = size as usize;
    let kn = kneser_matrix(n, k)?;

    let symmetric = kn.is_symmetric();
    let degree = BigInt::from(binomial_or_zero(n as i64 - k as i64, k as i64));
    let regular = exactla::mat_vec(&kn, &ExactVector::ones(size))?
        .entries()
        .iter()
        .all(|x| *x == degree);
    let multiplicities_sum = predicted.total_multiplicity() == size as i64;

    let factors: Vec<ExactMatrix> = predicted
        .pairs
        .iter()
        .map(|&(lambda, _)| kn.shifted(&BigInt::from(lambda)))
        .collect::<Result<_>>()?;
    let annihilation = match factors.split_first() {
        None => false,
        Some((first, rest)) => {
            let mut product = first.clone();
            for f in rest {
                product = exactla::mat_mul(&product, f)?;
            }
            product.is_zero()
        }
    };

    let expected: Vec<usize> = predicted
        .pairs
        .iter()
        .map(|&(_, m)| size.saturating_sub(m.max(0) as usize))
        .collect();
    let ranks = if size <= BAREISS_LIMIT {
        factors
            .iter()
            .map(|f| (exactla::rank_exact(f), RankMethod::Bareiss))
            .collect::<Vec<_>>()
    } else {
        let modular: Vec<usize> = factors.iter().map(|f| exactla::rank_mod_prime(f, RANK_PRIME)).collect();
        let certified = annihilation && multiplicities_sum && modular == expected;
        modular
            .into_iter()
            .zip(&factors)
            .zip(&expected)
            .map(|((r, f), &e)| {
                if certified {
                    (r, RankMethod::ModularCertified)
                } else if r < e {
                    // the prime divides a relevant minor; settle it exactly
                    (exactla::rank_exact(f), RankMethod::Bareiss)
                } else {
                    (r, RankMethod::ModularLowerBound)
                }
            })
            .collect()
    };
    let ranks: Vec<RankCheck> = predicted
        .pairs
        .iter()
        .zip(ranks)
        .zip(&expected)
        .map(|((&(eigenvalue, multiplicity), (rank, method)), &expected_rank)| RankCheck {
            eigenvalue,
            multiplicity,
            expected_rank,
            rank,
            method,
            ok: rank == expected_rank && method != RankMethod::ModularLowerBound,
        })
        .collect();

    let sum: BigInt = predicted
        .pairs
        .iter()
        .map(|&(l, m)| BigInt::from(l) * BigInt::from(m))
        .sum();
    let sum_sq: BigInt = predicted
        .pairs
        .iter()
        .map(|&(l, m)| BigInt::from(l) * BigInt::from(l) * BigInt::from(m))
        .sum();
    // K is symmetric 0/1, so tr(K²) is its number of nonzero entries.
    let nonzero = (0..size)
        .flat_map(|r| (0..size).map(move |c| (r, c)))
        .filter(|&(r, c)| *kn.get(r, c) != BigInt::from(0))
        .count();
    let traces = TraceChecks {
        sum: sum == kn.trace() && kn.trace() == BigInt::from(0),
        sum_of_squares: sum_sq == BigInt::from(nonzero)
            && sum_sq == BigInt::from(size) * &degree,
    };

    let passed = symmetric
        && regular
        && multiplicities_sum
        && annihilation
        && ranks.iter().all(|r| r.ok)
        && traces.sum
        && traces.sum_of_squares;
    Ok(SpectrumReport {
        n,
        k,
        size,
        predicted,
        symmetric,
        regular,
        multiplicities_sum,
        annihilation,
        ranks,
        traces,
        passed,
    })
}
