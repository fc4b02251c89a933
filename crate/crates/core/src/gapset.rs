//! Eventually periodic subsets of the nonnegative integers.
//!
//! `n` is a member iff `n < T && n ∈ exceptions` or `n >= T && n mod D ∈ residues`.
//! Values are kept in canonical form (least period, then least threshold), so
//! derived equality is set equality.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicSet {
    threshold: u64,
    exceptions: BTreeSet<u64>,
    period: u64,
    residues: BTreeSet<u64>,
}

impl EventuallyPeriodicSet {
    pub fn new(
        threshold: u64,
        exceptions: impl IntoIterator<Item = u64>,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        let exceptions: BTreeSet<u64> = exceptions.into_iter().collect();
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if period == 0 {
            return Err(Error::Invalid("period must be positive".into()));
        }
        if let Some(e) = exceptions.iter().find(|&&e| e >= threshold) {
            return Err(Error::Invalid(format!(
                "exception {e} is not below the threshold {threshold}"
            )));
        }
        if let Some(r) = residues.iter().find(|&&r| r >= period) {
            return Err(Error::Invalid(format!(
                "residue {r} is not below the period {period}"
            )));
        }
        Ok(Self::canonical(threshold, exceptions, period, residues))
    }

    pub fn empty() -> Self {
        Self::canonical(0, BTreeSet::new(), 1, BTreeSet::new())
    }

    pub fn finite(elems: impl IntoIterator<Item = u64>) -> Self {
        let ex: BTreeSet<u64> = elems.into_iter().collect();
        let t = ex.iter().next_back().map_or(0, |m| m + 1);
        Self::canonical(t, ex, 1, BTreeSet::new())
    }

    /// `{n : n >= start}`
    pub fn at_least(start: u64) -> Self {
        Self::canonical(start, BTreeSet::new(), 1, [0].into_iter().collect())
    }

    /// `{start + j·step : j >= 0}`
    pub fn arithmetic(start: u64, step: u64) -> Self {
        assert!(step >= 1);
        Self::canonical(
            start,
            BTreeSet::new(),
            step,
            [start % step].into_iter().collect(),
        )
    }

    /// Members below `onset + period` listed explicitly; beyond that the
    /// pattern repeats with the given period.
    pub fn from_pattern(onset: u64, period: u64, member: impl Fn(u64) -> bool) -> Self {
        assert!(period >= 1);
        let ex = (0..onset).filter(|&n| member(n)).collect();
        let res = (onset..onset + period)
            .filter(|&n| member(n))
            .map(|n| n % period)
            .collect();
        Self::canonical(onset, ex, period, res)
    }

    fn canonical(mut t: u64, mut ex: BTreeSet<u64>, d: u64, res: BTreeSet<u64>) -> Self {
        let mut period = d;
        let mut residues = res;
        if residues.is_empty() {
            period = 1;
        } else {
            for p in (1..=d).filter(|p| d.is_multiple_of(*p)) {
                if residues.iter().all(|&r| residues.contains(&((r + p) % d))) {
                    period = p;
                    residues = residues.iter().map(|r| r % p).collect();
                    break;
                }
            }
        }
        while t > 0 {
            let n = t - 1;
            if ex.contains(&n) != residues.contains(&(n % period)) {
                break;
            }
            ex.remove(&n);
            t = n;
        }
        Self {
            threshold: t,
            exceptions: ex,
            period,
            residues,
        }
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn exceptions(&self) -> &BTreeSet<u64> {
        &self.exceptions
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.threshold {
            self.exceptions.contains(&n)
        } else {
            self.residues.contains(&(n % self.period))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.exceptions.is_empty() && self.residues.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn is_cofinite(&self) -> bool {
        self.residues.len() as u64 == self.period
    }

    pub fn min(&self) -> Option<u64> {
        self.iter().next()
    }

    /// Largest element of a finite set.
    pub fn max(&self) -> Option<u64> {
        if self.is_finite() {
            self.exceptions.iter().next_back().copied()
        } else {
            None
        }
    }

    /// Least member that is at least `n`.
    pub fn next_at_or_after(&self, n: u64) -> Option<u64> {
        if n < self.threshold {
            if let Some(&e) = self.exceptions.range(n..).next() {
                return Some(e);
            }
        }
        let start = n.max(self.threshold);
        (start..start + self.period).find(|&m| self.residues.contains(&(m % self.period)))
    }

    /// Members in increasing order; infinite unless the set is finite.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let mut cur = Some(0u64);
        std::iter::from_fn(move || {
            let n = self.next_at_or_after(cur?)?;
            cur = n.checked_add(1);
            Some(n)
        })
    }

    pub fn elements_upto(&self, bound: u64) -> Vec<u64> {
        self.iter().take_while(|&n| n <= bound).collect()
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let t = self.threshold.max(other.threshold);
        let d = self.period.lcm(&other.period);
        Self::from_pattern(t, d, |n| op(self.contains(n), other.contains(n)))
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        Self::from_pattern(self.threshold, self.period, |n| !self.contains(n))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// `{n + shift : n ∈ self}`
    pub fn shifted(&self, shift: u64) -> Self {
        Self::from_pattern(self.threshold + shift, self.period, |n| {
            n >= shift && self.contains(n - shift)
        })
    }

    /// Residues mod `modulus` hit by members at or beyond the threshold.
    /// `modulus` must be a multiple of the period.
    pub fn residues_mod(&self, modulus: u64) -> BTreeSet<u64> {
        assert_eq!(modulus % self.period, 0);
        (self.threshold..self.threshold + modulus)
            .filter(|&n| self.contains(n))
            .map(|n| n % modulus)
            .collect()
    }
}

fn fmt_set(f: &mut fmt::Formatter<'_>, s: &BTreeSet<u64>) -> fmt::Result {
    let parts: Vec<String> = s.iter().map(u64::to_string).collect();
    write!(f, "{{{}}}", parts.join(","))
}

impl fmt::Display for EventuallyPeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "finite:")?;
            fmt_set(f, &self.exceptions)
        } else {
            write!(f, "eventual:T={};exc=", self.threshold)?;
            fmt_set(f, &self.exceptions)?;
            write!(f, ";D={};res=", self.period)?;
            fmt_set(f, &self.residues)
        }
    }
}

fn parse_set(s: &str) -> std::result::Result<BTreeSet<u64>, String> {
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| format!("expected {{...}}, found {s:?}"))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| format!("bad integer {t:?}")))
        .collect()
}

impl FromStr for EventuallyPeriodicSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: String| Error::Parse { line: 1, msg };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("finite:") {
            return Ok(Self::finite(parse_set(rest).map_err(err)?));
        }
        let rest = s.strip_prefix("eventual:").ok_or_else(|| {
            err(format!(
                "gap set must start with finite: or eventual:, found {s:?}"
            ))
        })?;
        let (mut t, mut exc, mut d, mut res) = (None, None, None, None);
        for field in rest.split(';') {
            let (key, val) = field
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found {field:?}")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| err(format!("bad integer {v:?}")))
            };
            match key.trim() {
                "T" => t = Some(num(val)?),
                "D" => d = Some(num(val)?),
                "exc" => exc = Some(parse_set(val).map_err(err)?),
                "res" => res = Some(parse_set(val).map_err(err)?),
                other => return Err(err(format!("unknown field {other:?}"))),
            }
        }
        let missing = |k: &str| err(format!("missing field {k}"));
        Self::new(
            t.ok_or_else(|| missing("T"))?,
            exc.unwrap_or_default(),
            d.ok_or_else(|| missing("D"))?,
            res.ok_or_else(|| missing("res"))?,
        )
        .map_err(|e| err(e.to_string()))
    }
}

impl Serialize for EventuallyPeriodicSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EventuallyPeriodicSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
