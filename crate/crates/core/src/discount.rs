//! Discounting functions.
//!
//! A discounting function is a non-increasing map from step indices to
//! `[0,1]` that tends to zero. The checker needs exact values and an
//! effective bound on how long a discounted eventuality can still matter, so
//! the functions form a closed symbolic family rather than arbitrary
//! closures. Every constructor validates its arguments; a [`DiscountFn`] that
//! exists is well formed.

use std::fmt;
use std::sync::Arc;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, format_exact, in_unit_interval, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscountError {
    #[error("exponential base must lie strictly between 0 and 1, got {0}")]
    BadBase(String),
    #[error("scale factor must lie in (0,1], got {0}")]
    BadFactor(String),
    #[error("table must not be empty")]
    EmptyTable,
    #[error("table entry {index} = {value} is outside [0,1]")]
    TableEntryRange { index: usize, value: String },
    #[error("table is increasing at index {index}")]
    TableIncreasing { index: usize },
    #[error("last table entry {last} is below the tail value {tail} at index {index}")]
    TailAboveTable {
        last: String,
        tail: String,
        index: usize,
    },
    #[error("crossing bound must be strictly positive, got {0}")]
    NonPositiveBound(String),
}

/// Shape of a discounting function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiscountKind {
    /// `d(i) = base^i`
    Exponential(Rational),
    /// `d(i) = 1/(i+1)`
    Hyperbolic,
    /// `d(i) = factor * inner(i)`
    Scaled { factor: Rational, inner: DiscountFn },
    /// `d(i) = inner(i + by)`
    Shifted { inner: DiscountFn, by: u64 },
    /// `d(i) = table[i]` below the table length, `tail(i)` from there on.
    /// The tail is indexed absolutely, not relative to the table end.
    TableThenTail {
        table: Vec<Rational>,
        tail: DiscountFn,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscountFn(Arc<DiscountKind>);

impl DiscountFn {
    pub fn exponential(base: Rational) -> Result<Self, DiscountError> {
        if !base.is_positive() || base >= Rational::one() {
            return Err(DiscountError::BadBase(format_exact(&base)));
        }
        Ok(Self::from_kind(DiscountKind::Exponential(base)))
    }

    pub fn hyperbolic() -> Self {
        Self::from_kind(DiscountKind::Hyperbolic)
    }

    /// `factor * inner`. A unit factor returns `inner` unchanged and nested
    /// scalings are multiplied out.
    pub fn scaled(factor: Rational, inner: DiscountFn) -> Result<Self, DiscountError> {
        if !factor.is_positive() || factor > Rational::one() {
            return Err(DiscountError::BadFactor(format_exact(&factor)));
        }
        if factor.is_one() {
            return Ok(inner);
        }
        Ok(match inner.kind() {
            DiscountKind::Scaled {
                factor: f2,
                inner: base,
            } => Self::from_kind(DiscountKind::Scaled {
                factor: factor * f2,
                inner: base.clone(),
            }),
            _ => Self::from_kind(DiscountKind::Scaled { factor, inner }),
        })
    }

    pub fn table_then_tail(table: Vec<Rational>, tail: DiscountFn) -> Result<Self, DiscountError> {
        if table.is_empty() {
            return Err(DiscountError::EmptyTable);
        }
        for (index, value) in table.iter().enumerate() {
            if !in_unit_interval(value) {
                return Err(DiscountError::TableEntryRange {
                    index,
                    value: format_exact(value),
                });
            }
            if index > 0 && *value > table[index - 1] {
                return Err(DiscountError::TableIncreasing { index });
            }
        }
        let last = table.last().expect("non-empty");
        let tail_value = tail.value(table.len() as u64);
        if *last < tail_value {
            return Err(DiscountError::TailAboveTable {
                last: format_exact(last),
                tail: format_exact(&tail_value),
                index: table.len(),
            });
        }
        Ok(Self::from_kind(DiscountKind::TableThenTail { table, tail }))
    }

    fn from_kind(kind: DiscountKind) -> Self {
        DiscountFn(Arc::new(kind))
    }

    pub fn kind(&self) -> &DiscountKind {
        &self.0
    }

    /// Exact value at step `i`.
    pub fn value(&self, i: u64) -> Rational {
        match self.kind() {
            DiscountKind::Exponential(base) => rational::pow(base, i),
            DiscountKind::Hyperbolic => Rational::new(1.into(), (i + 1).into()),
            DiscountKind::Scaled { factor, inner } => factor * inner.value(i),
            DiscountKind::Shifted { inner, by } => inner.value(i + by),
            DiscountKind::TableThenTail { table, tail } => match table.get(i as usize) {
                Some(v) => v.clone(),
                None => tail.value(i),
            },
        }
    }

    /// The function `i -> self(i + k)`, in normal form: shifts accumulate,
    /// and a shifted exponential becomes a scaled one.
    pub fn shift(&self, k: u64) -> DiscountFn {
        if k == 0 {
            return self.clone();
        }
        match self.kind() {
            DiscountKind::Exponential(base) => {
                let factor = rational::pow(base, k);
                Self::scaled(factor, self.clone()).expect("base^k lies in (0,1)")
            }
            DiscountKind::Hyperbolic => Self::from_kind(DiscountKind::Shifted {
                inner: self.clone(),
                by: k,
            }),
            DiscountKind::Scaled { factor, inner } => {
                Self::scaled(factor.clone(), inner.shift(k)).expect("factor already validated")
            }
            DiscountKind::Shifted { inner, by } => inner.shift(by + k),
            DiscountKind::TableThenTail { table, tail } => {
                let k_usize = k as usize;
                if k_usize < table.len() {
                    Self::from_kind(DiscountKind::TableThenTail {
                        table: table[k_usize..].to_vec(),
                        tail: tail.shift(k),
                    })
                } else {
                    tail.shift(k)
                }
            }
        }
    }

    /// Least `i` with `self(i) <= bound`.
    pub fn crossing_index(&self, bound: &Rational) -> Result<u64, DiscountError> {
        if !bound.is_positive() {
            return Err(DiscountError::NonPositiveBound(format_exact(bound)));
        }
        Ok(self.crossing(bound))
    }

    fn crossing(&self, bound: &Rational) -> u64 {
        if *bound >= Rational::one() {
            return 0;
        }
        match self.kind() {
            DiscountKind::Exponential(base) => {
                // gallop to an index past the crossing, then bisect
                let mut hi: u64 = 1;
                while rational::pow(base, hi) > *bound {
                    hi *= 2;
                }
                let mut lo = hi / 2;
                // invariant: base^lo > bound (or lo == 0), base^hi <= bound
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if rational::pow(base, mid) <= *bound {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                if rational::pow(base, lo) <= *bound {
                    lo
                } else {
                    hi
                }
            }
            DiscountKind::Hyperbolic => {
                let inverse = bound.recip().ceil().to_integer();
                let i: u64 = (inverse - 1u32).try_into().unwrap_or(u64::MAX);
                i
            }
            DiscountKind::Scaled { factor, inner } => inner.crossing(&(bound / factor)),
            DiscountKind::Shifted { inner, by } => inner.crossing(bound).saturating_sub(*by),
            DiscountKind::TableThenTail { table, tail } => {
                match table.iter().position(|v| v <= bound) {
                    Some(i) => i as u64,
                    None => (table.len() as u64).max(tail.crossing(bound)),
                }
            }
        }
    }

    /// True when no value is ever zero.
    pub fn is_strictly_positive(&self) -> bool {
        match self.kind() {
            DiscountKind::Exponential(_) | DiscountKind::Hyperbolic => true,
            DiscountKind::Scaled { inner, .. } | DiscountKind::Shifted { inner, .. } => {
                inner.is_strictly_positive()
            }
            DiscountKind::TableThenTail { table, tail } => {
                table.iter().all(|v| !v.is_zero()) && tail.is_strictly_positive()
            }
        }
    }

    /// Number of leading steps whose value is exactly one.
    pub fn leading_ones(&self) -> u64 {
        let mut i = 0;
        while self.value(i).is_one() {
            i += 1;
        }
        i
    }

    /// Exponential, possibly scaled: the family whose shifts stay finite up
    /// to scaling.
    pub fn is_exponential_family(&self) -> bool {
        match self.kind() {
            DiscountKind::Exponential(_) => true,
            DiscountKind::Scaled { inner, .. } => {
                matches!(inner.kind(), DiscountKind::Exponential(_))
            }
            _ => false,
        }
    }
}

impl fmt::Display for DiscountFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn nested(d: &DiscountFn, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match d.kind() {
                DiscountKind::Hyperbolic | DiscountKind::Exponential(_) => write!(f, "{d}"),
                _ => write!(f, "({d})"),
            }
        }
        match self.kind() {
            DiscountKind::Exponential(base) => write!(f, "exp {}", format_exact(base)),
            DiscountKind::Hyperbolic => write!(f, "hyp"),
            DiscountKind::Scaled { factor, inner } => {
                write!(f, "scale {} ", format_exact(factor))?;
                nested(inner, f)
            }
            DiscountKind::Shifted { inner, by } => {
                write!(f, "shift {by} ")?;
                nested(inner, f)
            }
            DiscountKind::TableThenTail { table, tail } => {
                write!(f, "table")?;
                for v in table {
                    write!(f, " {}", format_exact(v))?;
                }
                write!(f, " then ")?;
                nested(tail, f)
            }
        }
    }
}
