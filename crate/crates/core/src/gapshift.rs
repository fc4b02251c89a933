//! S-gap shifts: bi-infinite concatenations of `1 0^s` with `s ∈ S`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::gapset::EventuallyPeriodicSet;
use crate::graph::Symbol;
use crate::sft::{ForbiddenSft, Word};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapShift {
    gaps: EventuallyPeriodicSet,
}

impl GapShift {
    pub fn new(gaps: EventuallyPeriodicSet) -> Result<Self> {
        if gaps.is_empty() {
            return Err(Error::EmptyGapSet);
        }
        Ok(Self { gaps })
    }

    pub fn gaps(&self) -> &EventuallyPeriodicSet {
        &self.gaps
    }

    /// Some gap is at least `n`, so `0^n` is allowed.
    pub fn allows_zero_run(&self, n: u64) -> bool {
        self.gaps.next_at_or_after(n).is_some()
    }

    /// Membership of a binary word in the language of the shift.
    pub fn allows(&self, w: &[Symbol]) -> bool {
        if w.iter().any(|&s| s > 1) {
            return false;
        }
        let ones: Vec<usize> = (0..w.len()).filter(|&i| w[i] == 1).collect();
        let Some((&first, &last)) = ones.first().zip(ones.last()) else {
            return self.allows_zero_run(w.len() as u64);
        };
        self.allows_zero_run(first as u64)
            && self.allows_zero_run((w.len() - 1 - last) as u64)
            && ones
                .windows(2)
                .all(|p| self.gaps.contains((p[1] - p[0] - 1) as u64))
    }

    /// `{1 0^m 1 : m <= max S, m ∉ S} ∪ {0^(1 + max S)}` for finite `S`,
    /// `{1 0^m 1 : m ∉ S}` for cofinite `S`, and `None` otherwise (the shift
    /// is then not of finite type).
    pub fn standard_forbidden_set(&self) -> Option<ForbiddenSft> {
        let s = &self.gaps;
        let mut words = BTreeSet::new();
        if let Some(max) = s.max() {
            for m in (0..=max).filter(|&m| !s.contains(m)) {
                words.insert(Word::gap_block(m as usize));
            }
            words.insert(Word(vec![0; max as usize + 1]));
        } else if s.is_cofinite() {
            for m in (0..s.threshold()).filter(|&m| !s.contains(m)) {
                words.insert(Word::gap_block(m as usize));
            }
        } else {
            return None;
        }
        Some(ForbiddenSft::new([0, 1].into_iter().collect(), words).expect("binary words"))
    }

    /// `Σ_{m∈S} x^{-m-1} - 1`, with the periodic tail summed in closed form.
    pub fn root_function(&self, x: f64) -> f64 {
        let s = &self.gaps;
        let mut total: f64 = s
            .exceptions()
            .iter()
            .map(|&e| x.powi(-(e as i32) - 1))
            .sum();
        if !s.is_finite() {
            let (t, d) = (s.threshold(), s.period());
            let denom = 1.0 - x.powi(-(d as i32));
            if denom <= 0.0 {
                return f64::INFINITY;
            }
            for &r in s.residues() {
                let first = t + (r + d - t % d) % d;
                total += x.powi(-(first as i32) - 1) / denom;
            }
        }
        total - 1.0
    }

    /// The root `λ ∈ [1, 2]` of `Σ_{m∈S} x^{-m-1} = 1`; `h_top = log λ`.
    pub fn entropy(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::Invalid(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        if self.gaps.max().is_some() && self.gaps.exceptions().len() == 1 {
            // a single periodic orbit
            return Ok(1.0);
        }
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.root_function(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (flo, fhi) = (self.root_function(lo), self.root_function(hi));
        let (x, fx) = if flo.abs() <= fhi.abs() {
            (lo, flo)
        } else {
            (hi, fhi)
        };
        if fx.abs() <= tol {
            Ok(x)
        } else {
            Err(Error::Numeric(format!(
                "bisection stalled at λ = {x} with residual {fx:e}"
            )))
        }
    }

    pub fn topological_entropy(&self, tol: f64) -> Result<f64> {
        Ok(self.entropy(tol)?.ln())
    }

    /// Conditional gap law of the measure of maximal entropy:
    /// `P(gap = i | 1) = λ^{-i-1}` for `i ∈ S`, `i <= imax`.
    pub fn mme_gap_distribution(&self, lambda: f64, imax: u64) -> BTreeMap<u64, f64> {
        self.gaps
            .elements_upto(imax)
            .into_iter()
            .map(|i| (i, lambda.powi(-(i as i32) - 1)))
            .collect()
    }

    /// Mass of the gap law beyond `imax`.
    pub fn mme_tail(&self, lambda: f64, imax: u64) -> f64 {
        let head: f64 = self.mme_gap_distribution(lambda, imax).values().sum();
        (1.0 - head).max(0.0)
    }
}
