//! The channel view of a code and the necessary conditions for a Markov
//! measure that pushes forward to the measure of maximal entropy.
//!
//! For a spoke graph, write `R_j = {i ∈ T₁ : j ∈ K_i}`. A candidate support
//! `P ⊆ T₁` passes when
//!
//! * every residue covered by `T₁` is covered by `P`,
//! * no `R_{j'} ∩ P` is a proper subset of another `R_j ∩ P`,
//! * some weights `c_i > 0` on `P` give the same sum over every `R_j ∩ P`.
//!
//! The weights stand for `Π_i Q^{m_i+1}(1 − Q^{−d_i})`, so the last test does
//! not depend on `Q`.

mod lp;
pub mod markov;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use markov::{
    gap_law_deviation, validate_capacity_witness, weight_per_symbol_check, MarkovMeasure,
};

use crate::factor::{image_gap_set_default, MarkedGraph};
use crate::gapshift::{GapShift, DEFAULT_TOL};
use crate::spoke::{find_w, spoke_invariants, SpokeGraph, SpokeInvariants};
use crate::{Error, Result};

/// Largest `|T₁|` for which supports are enumerated.
pub const MAX_SUPPORT_SPOKES: usize = 16;

/// `h_top(Y) = log λ` for the image of a code.
pub fn channel_capacity(code: &MarkedGraph) -> Result<f64> {
    GapShift::new(image_gap_set_default(code)?)?.topological_entropy(DEFAULT_TOL)
}

/// `h_top(Y)` for the image of the standard code on a spoke graph.
pub fn spoke_channel_capacity(sg: &SpokeGraph) -> Result<f64> {
    GapShift::new(spoke_invariants(sg).s)?.topological_entropy(DEFAULT_TOL)
}

/// Least `x >= 0` with `x ≡ a_i (mod d_i)` for every pair, or `None` when two
/// congruences clash (`gcd(d_i, d_j) ∤ a_i − a_j`).
pub fn crt_common_solution(congruences: &[(u64, u64)]) -> Option<u64> {
    let (mut x, mut m) = (0i128, 1i128);
    for &(a, d) in congruences {
        assert!(d >= 1, "modulus must be positive");
        let (a, d) = (i128::from(a) % i128::from(d), i128::from(d));
        let e = m.extended_gcd(&d);
        let g = e.gcd;
        if (a - x) % g != 0 {
            return None;
        }
        let l = m / g * d;
        // x + m·t ≡ a (mod d)  ⇔  t ≡ (a − x)/g · (m/g)^{-1} (mod d/g)
        let t = ((a - x) / g % (d / g)) * (e.x % (d / g)) % (d / g);
        x = (x + m * t).rem_euclid(l);
        m = l;
    }
    Some(x as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SufficientCondition {
    /// All residue sets of `P` share a residue.
    A,
    /// Every two residue sets of `P` meet.
    B,
    /// `P` holds two pairwise-disjoint families that together cover.
    C,
    /// `|P| <= 5`.
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficientFlags {
    pub conditions: BTreeSet<SufficientCondition>,
    /// A disjoint cover `W` exists.
    pub w_exists: bool,
    /// No condition holds, or `W` exists as the conditions predict.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibleSupport {
    pub support: BTreeSet<usize>,
    /// One positive solution `c_i`, scaled to coprime integers.
    pub weights: Vec<(usize, String)>,
    pub sufficient: SufficientFlags,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P3Report {
    pub q: f64,
    pub candidates: usize,
    pub feasible: Vec<FeasibleSupport>,
}

impl P3Report {
    /// At least one support passes every necessary condition.
    pub fn necessary_conditions_pass(&self) -> bool {
        !self.feasible.is_empty()
    }
}

fn covered(inv: &SpokeInvariants, p: &BTreeSet<usize>) -> BTreeSet<u64> {
    p.iter().flat_map(|i| inv.k[i].iter().copied()).collect()
}

fn r_cap_p(inv: &SpokeInvariants, p: &BTreeSet<usize>, j: u64) -> BTreeSet<usize> {
    p.iter()
        .copied()
        .filter(|i| inv.k[i].contains(&j))
        .collect()
}

/// Every residue covered by `T₁` is covered by `P`.
pub fn support_covers(inv: &SpokeInvariants, p: &BTreeSet<usize>) -> bool {
    let all: BTreeSet<usize> = inv.k.keys().copied().collect();
    covered(inv, &all).is_subset(&covered(inv, p))
}

/// No `R_{j'} ∩ P` is a proper subset of some `R_j ∩ P`.
pub fn support_nested_free(inv: &SpokeInvariants, p: &BTreeSet<usize>) -> bool {
    let all: BTreeSet<usize> = inv.k.keys().copied().collect();
    let rs: BTreeSet<BTreeSet<usize>> = covered(inv, &all)
        .into_iter()
        .map(|j| r_cap_p(inv, p, j))
        .collect();
    rs.iter()
        .all(|a| rs.iter().all(|b| a == b || !a.is_subset(b)))
}

/// Positive weights on `P` with equal sums over every `R_j ∩ P`, as coprime
/// integers, or `None` when no such weights exist.
pub fn equal_sum_weights(
    inv: &SpokeInvariants,
    p: &BTreeSet<usize>,
) -> Option<Vec<(usize, BigInt)>> {
    let all: BTreeSet<usize> = inv.k.keys().copied().collect();
    let vars: Vec<usize> = p.iter().copied().collect();
    let rows: Vec<BTreeSet<usize>> = covered(inv, &all)
        .into_iter()
        .map(|j| r_cap_p(inv, p, j))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let first = rows.first()?;
    // c_i = 1 + y_i, y_i >= 0; every row sum equals the first one
    let mut a = Vec::new();
    let mut b = Vec::new();
    for r in &rows[1..] {
        let coeff = |i: &usize| -> i64 { i64::from(r.contains(i)) - i64::from(first.contains(i)) };
        a.push(
            vars.iter()
                .map(|i| BigRational::from_integer(coeff(i).into()))
                .collect::<Vec<_>>(),
        );
        let rhs = first.len() as i64 - r.len() as i64;
        b.push(BigRational::from_integer(rhs.into()));
    }
    let y = lp::feasible_point(vars.len(), &a, &b)?;
    let c: Vec<BigRational> = y.into_iter().map(|v| v + BigRational::one()).collect();
    let denom = c.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = c
        .iter()
        .map(|v| (v * BigRational::from_integer(denom.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    Some(
        vars.into_iter()
            .zip(ints.into_iter().map(|v| v / &g))
            .collect(),
    )
}

/// Which of the four sufficient conditions hold for `P`.
pub fn sufficient_conditions(
    inv: &SpokeInvariants,
    p: &BTreeSet<usize>,
) -> BTreeSet<SufficientCondition> {
    let mut out = BTreeSet::new();
    if p.is_empty() {
        return out;
    }
    let sets: Vec<&BTreeSet<u64>> = p.iter().map(|i| &inv.k[i]).collect();
    let common = sets.iter().skip(1).fold(sets[0].clone(), |acc, s| {
        acc.intersection(s).copied().collect()
    });
    if !common.is_empty() {
        out.insert(SufficientCondition::A);
    }
    if sets.iter().all(|a| sets.iter().all(|b| !a.is_disjoint(b))) {
        out.insert(SufficientCondition::B);
    }
    if two_disjoint_families_cover(inv, &sets) {
        out.insert(SufficientCondition::C);
    }
    if p.len() <= 5 {
        out.insert(SufficientCondition::D);
    }
    out
}

/// Exhaustive search for `E₁, E₂` each pairwise disjoint whose union covers
/// every residue of `T₁`.
fn two_disjoint_families_cover(inv: &SpokeInvariants, sets: &[&BTreeSet<u64>]) -> bool {
    let all: BTreeSet<usize> = inv.k.keys().copied().collect();
    let target = covered(inv, &all);
    let mut unions: BTreeSet<BTreeSet<u64>> = BTreeSet::new();
    fn rec(
        sets: &[&BTreeSet<u64>],
        i: usize,
        acc: &mut BTreeSet<u64>,
        out: &mut BTreeSet<BTreeSet<u64>>,
    ) {
        if i == sets.len() {
            out.insert(acc.clone());
            return;
        }
        rec(sets, i + 1, acc, out);
        if acc.is_disjoint(sets[i]) {
            acc.extend(sets[i].iter().copied());
            rec(sets, i + 1, acc, out);
            for x in sets[i].iter() {
                acc.remove(x);
            }
        }
    }
    rec(sets, 0, &mut BTreeSet::new(), &mut unions);
    let unions: Vec<BTreeSet<u64>> = unions.into_iter().collect();
    unions.iter().any(|u1| {
        let missing: BTreeSet<u64> = target.difference(u1).copied().collect();
        unions.iter().any(|u2| missing.is_subset(u2))
    })
}

/// Enumerates every nonempty `P ⊆ T₁` and keeps those passing the coverage,
/// nesting and equal-sum tests. `q` only enters the report.
pub fn p3_necessary(inv: &SpokeInvariants, q: f64) -> Result<P3Report> {
    if !q.is_finite() || q < 1.0 {
        return Err(Error::Invalid(format!(
            "Q must be a finite number >= 1, got {q}"
        )));
    }
    let t1: Vec<usize> = inv.k.keys().copied().collect();
    if t1.is_empty() {
        return Err(Error::Invalid("no regular spokes".into()));
    }
    if t1.len() > MAX_SUPPORT_SPOKES {
        return Err(Error::TooLarge(format!(
            "{} regular spokes (limit {MAX_SUPPORT_SPOKES})",
            t1.len()
        )));
    }
    let w_exists = find_w(inv)?.is_some();
    let mut feasible = Vec::new();
    let candidates = (1usize << t1.len()) - 1;
    // with Q = 1 every weight Q^{m+1}(1 − Q^{-d}) vanishes, so nothing is positive
    if q > 1.0 {
        for mask in 1..=candidates {
            let p: BTreeSet<usize> = t1
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &i)| i)
                .collect();
            if !support_covers(inv, &p) || !support_nested_free(inv, &p) {
                continue;
            }
            let Some(weights) = equal_sum_weights(inv, &p) else {
                continue;
            };
            let conditions = sufficient_conditions(inv, &p);
            let consistent = conditions.is_empty() || w_exists;
            feasible.push(FeasibleSupport {
                weights: weights
                    .into_iter()
                    .map(|(i, c)| (i, c.to_string()))
                    .collect(),
                sufficient: SufficientFlags {
                    conditions,
                    w_exists,
                    consistent,
                },
                support: p,
            });
        }
    }
    Ok(P3Report {
        q,
        candidates,
        feasible,
    })
}
