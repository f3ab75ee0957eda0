//! Bell numbers and the round-count bounds every run is checked against.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which learner (and therefore which game class and budget) a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    NormalForm,
    Congestion,
    Graphical,
    AuctionIterative,
    AuctionBitwise,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::NormalForm,
        Family::Congestion,
        Family::Graphical,
        Family::AuctionIterative,
        Family::AuctionBitwise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::NormalForm => "normal-form",
            Family::Congestion => "congestion",
            Family::Graphical => "graphical",
            Family::AuctionIterative => "auction-iterative",
            Family::AuctionBitwise => "auction-bitwise",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// `B_0..=B_n` via the Bell triangle.
pub fn bell_numbers_upto(n: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigUint::one());
    let mut row = vec![BigUint::one()];
    for _ in 1..=n {
        // The last entry of each row is the first entry of the next.
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        out.push(next[0].clone());
        row = next;
    }
    out
}

/// Exact number of set partitions of an `n`-element set.
pub fn bell_number(n: usize) -> BigUint {
    bell_numbers_upto(n).pop().unwrap()
}

/// `ceil(log2 x)` for `x >= 1`.
pub fn ceil_log2_big(x: &BigUint) -> u64 {
    if x.is_zero() || x.is_one() {
        return 0;
    }
    let bits = x.bits();
    if x.trailing_zeros() == Some(bits - 1) {
        bits - 1
    } else {
        bits
    }
}

pub fn ceil_log2(x: usize) -> u64 {
    ceil_log2_big(&BigUint::from(x))
}

pub fn floor_log2(x: usize) -> u64 {
    assert!(x >= 1, "floor_log2 of zero");
    (usize::BITS - 1 - x.leading_zeros()) as u64
}

/// Minimum rounds any learner needs: each round yields at most `n` bits and
/// `ceil(log2 B_n)` bits are required.
pub fn info_lower_bound(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    ceil_log2_big(&bell_number(n)).div_ceil(n as u64)
}

/// `ceil((n - 1) / d)`: rounds needed before every edge at one vertex has
/// appeared in some degree-`d` query.
pub fn graphical_lower_bound(n: usize, d: usize) -> u64 {
    if d == 0 {
        return 0;
    }
    (n.saturating_sub(1) as u64).div_ceil(d as u64)
}

pub fn check_degree(n: usize, d: usize) -> Result<()> {
    if d >= 2 && d.is_multiple_of(2) && d <= n {
        Ok(())
    } else {
        Err(Error::InvalidDegree { d, n })
    }
}

/// Integer query budget for a family, taken from the exact counts in each
/// correctness proof.
pub fn upper_bound(family: Family, n: usize, d: Option<usize>, c: Option<usize>) -> Result<u64> {
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    Ok(match family {
        Family::NormalForm | Family::Congestion => ceil_log2(n) + 1,
        Family::Graphical => {
            let d = d.ok_or(Error::MissingParameter("d"))?;
            check_degree(n, d)?;
            (2 * n as u64).div_ceil(d as u64) + 2 * ceil_log2(d) - 2
        }
        Family::AuctionIterative => n as u64 - 1,
        Family::AuctionBitwise => {
            let c = c.ok_or(Error::MissingParameter("c"))?;
            if c == 0 || c > n {
                return Err(Error::InvalidCoalitionCap { c, n });
            }
            (1 + floor_log2(n)) * (1 + c as u64) + 1
        }
    })
}

/// One row of the bound table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub family: Family,
    pub n: usize,
    pub d: Option<usize>,
    pub c: Option<usize>,
    pub upper_bound: u64,
    pub info_lower_bound: u64,
}

impl BoundsReport {
    pub fn compute(family: Family, n: usize, d: Option<usize>, c: Option<usize>) -> Result<Self> {
        Ok(BoundsReport {
            family,
            n,
            d,
            c,
            upper_bound: upper_bound(family, n, d, c)?,
            info_lower_bound: info_lower_bound(n),
        })
    }
}
