use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::modring::PrimeField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Existence,
    Minimise,
    Maximise,
    Count,
    CountMinimise,
    CountMaximise,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Existence,
        Variant::Minimise,
        Variant::Maximise,
        Variant::Count,
        Variant::CountMinimise,
        Variant::CountMaximise,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Existence => "existence",
            Variant::Minimise => "min",
            Variant::Maximise => "max",
            Variant::Count => "count",
            Variant::CountMinimise => "count-min",
            Variant::CountMaximise => "count-max",
        }
    }

    pub fn counts(&self) -> bool {
        matches!(self, Variant::Count | Variant::CountMinimise | Variant::CountMaximise)
    }

    pub fn minimises(&self) -> bool {
        matches!(self, Variant::Minimise | Variant::CountMinimise)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "existence" | "exists" | "decision" => Variant::Existence,
            "min" | "minimise" | "minimize" => Variant::Minimise,
            "max" | "maximise" | "maximize" => Variant::Maximise,
            "count" => Variant::Count,
            "count-min" | "count_min" | "count-minimise" => Variant::CountMinimise,
            "count-max" | "count_max" | "count-maximise" => Variant::CountMaximise,
            _ => return Err(Error::Problem(format!("unknown variant '{s}'"))),
        })
    }
}

/// Final result of a solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Exists(bool),
    /// Optimal size, `None` when no solution exists.
    Size(Option<u32>),
    Count(BigUint),
    /// Optimal size and the number of solutions attaining it.
    SizeCount(Option<u32>, BigUint),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Exists(b) => write!(f, "{b}"),
            Answer::Size(Some(s)) => write!(f, "{s}"),
            Answer::Size(None) => write!(f, "infeasible"),
            Answer::Count(c) => write!(f, "{c}"),
            Answer::SizeCount(Some(s), c) => write!(f, "{s} {c}"),
            Answer::SizeCount(None, _) => write!(f, "infeasible 0"),
        }
    }
}

/// Commutative semiring used to aggregate partial solutions, plus the effect of adding one
/// selected vertex to a partial solution.
pub trait Algebra: Clone {
    type Value: Copy + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn add(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn select(&self, a: Self::Value) -> Self::Value;
    fn variant(&self) -> Variant;

    fn is_zero(&self, a: Self::Value) -> bool {
        a == self.zero()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Exists;

impl Algebra for Exists {
    type Value = bool;

    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn add(&self, a: bool, b: bool) -> bool {
        a || b
    }
    fn mul(&self, a: bool, b: bool) -> bool {
        a && b
    }
    fn select(&self, a: bool) -> bool {
        a
    }
    fn variant(&self) -> Variant {
        Variant::Existence
    }
}

/// Best size of a partial solution; `None` means no partial solution.
#[derive(Clone, Copy, Debug)]
pub struct Optimum {
    pub maximise: bool,
}

impl Algebra for Optimum {
    type Value = Option<u32>;

    fn zero(&self) -> Option<u32> {
        None
    }
    fn one(&self) -> Option<u32> {
        Some(0)
    }
    fn add(&self, a: Option<u32>, b: Option<u32>) -> Option<u32> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(if self.maximise { x.max(y) } else { x.min(y) }),
        }
    }
    fn mul(&self, a: Option<u32>, b: Option<u32>) -> Option<u32> {
        Some(a? + b?)
    }
    fn select(&self, a: Option<u32>) -> Option<u32> {
        a.map(|x| x + 1)
    }
    fn variant(&self) -> Variant {
        if self.maximise {
            Variant::Maximise
        } else {
            Variant::Minimise
        }
    }
}

/// Number of partial solutions modulo a prime.
#[derive(Clone, Debug)]
pub struct CountMod {
    pub field: Arc<PrimeField>,
}

impl Algebra for CountMod {
    type Value = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        self.field.add(a, b)
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.field.mul(a, b)
    }
    fn select(&self, a: u64) -> u64 {
        a
    }
    fn variant(&self) -> Variant {
        Variant::Count
    }
}

/// Best size together with the number (modulo a prime) of partial solutions attaining it.
#[derive(Clone, Debug)]
pub struct CountOptimum {
    pub field: Arc<PrimeField>,
    pub maximise: bool,
}

pub type SizeCount = (Option<u32>, u64);

impl Algebra for CountOptimum {
    type Value = SizeCount;

    fn zero(&self) -> SizeCount {
        (None, 0)
    }
    fn one(&self) -> SizeCount {
        (Some(0), 1)
    }
    fn add(&self, a: SizeCount, b: SizeCount) -> SizeCount {
        match (a.0, b.0) {
            (None, _) => b,
            (_, None) => a,
            (Some(x), Some(y)) if x == y => (a.0, self.field.add(a.1, b.1)),
            (Some(x), Some(y)) => {
                if (x < y) != self.maximise {
                    a
                } else {
                    b
                }
            }
        }
    }
    fn mul(&self, a: SizeCount, b: SizeCount) -> SizeCount {
        match (a.0, b.0) {
            (Some(x), Some(y)) => (Some(x + y), self.field.mul(a.1, b.1)),
            _ => (None, 0),
        }
    }
    fn select(&self, a: SizeCount) -> SizeCount {
        (a.0.map(|x| x + 1), a.1)
    }
    fn variant(&self) -> Variant {
        if self.maximise {
            Variant::CountMaximise
        } else {
            Variant::CountMinimise
        }
    }
    fn is_zero(&self, a: SizeCount) -> bool {
        a.0.is_none()
    }
}
