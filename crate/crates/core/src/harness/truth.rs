//! Random hidden partitions.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::CoalitionStructure;

/// How truths are drawn.
///
/// String forms: `uniform`, `crp:<theta>`, `max-coalition:<c>`, and
/// `fixed:<json list of partitions>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TruthModel {
    /// Uniform over all `B_n` partitions.
    Uniform,
    /// Cycles through the listed partitions that have the requested size.
    Fixed(Vec<CoalitionStructure>),
    /// Chinese restaurant process with concentration `theta`.
    ChineseRestaurant(f64),
    /// Uniform over partitions whose blocks have at most `c` members.
    MaxCoalition(usize),
}

impl TruthModel {
    /// Draws the `rep`-th truth on `n` agents.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rep: usize, rng: &mut R) -> Result<CoalitionStructure> {
        if n == 0 {
            return Err(Error::EmptyPopulation);
        }
        match self {
            TruthModel::Uniform => Ok(random_partition(n, rng)),
            TruthModel::MaxCoalition(c) => capped_partition(n, *c, rng),
            TruthModel::ChineseRestaurant(theta) => chinese_restaurant(n, *theta, rng),
            TruthModel::Fixed(list) => {
                let matching: Vec<&CoalitionStructure> = list.iter().filter(|s| s.n() == n).collect();
                if matching.is_empty() {
                    return Err(Error::InvalidTruthModel(format!("no fixed truth on {n} agents")));
                }
                Ok(matching[rep % matching.len()].clone())
            }
        }
    }
}

impl fmt::Display for TruthModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruthModel::Uniform => f.write_str("uniform"),
            TruthModel::ChineseRestaurant(theta) => write!(f, "crp:{theta}"),
            TruthModel::MaxCoalition(c) => write!(f, "max-coalition:{c}"),
            TruthModel::Fixed(list) => {
                let json = serde_json::to_string(list).map_err(|_| fmt::Error)?;
                write!(f, "fixed:{json}")
            }
        }
    }
}

impl FromStr for TruthModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidTruthModel(s.to_owned());
        let s = s.trim();
        if s == "uniform" {
            return Ok(TruthModel::Uniform);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "crp" => {
                let theta: f64 = arg.parse().map_err(|_| bad())?;
                if !(theta.is_finite() && theta > 0.0) {
                    return Err(bad());
                }
                Ok(TruthModel::ChineseRestaurant(theta))
            }
            "max-coalition" => {
                let c: usize = arg.parse().map_err(|_| bad())?;
                if c == 0 {
                    return Err(bad());
                }
                Ok(TruthModel::MaxCoalition(c))
            }
            "fixed" => {
                let list: Vec<CoalitionStructure> = serde_json::from_str(arg).map_err(|_| bad())?;
                if list.is_empty() {
                    return Err(bad());
                }
                Ok(TruthModel::Fixed(list))
            }
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for TruthModel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TruthModel> for String {
    fn from(m: TruthModel) -> Self {
        m.to_string()
    }
}

/// Uniform over all partitions of `1..=n`.
pub fn random_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CoalitionStructure {
    capped_partition(n, n.max(1), rng).expect("cap n admits every partition")
}

/// `counts[m]` is the number of partitions of `m` agents into blocks of at
/// most `c`: `A(m) = sum_k C(m-1, k-1) A(m-k)`, conditioning on the size `k`
/// of the block holding the first agent. With `c >= m` this is `B_m`.
fn capped_counts(n: usize, c: usize) -> (Vec<BigUint>, Vec<Vec<BigUint>>) {
    let mut binom: Vec<Vec<BigUint>> = Vec::with_capacity(n);
    for m in 0..n {
        let mut row = vec![BigUint::one(); m + 1];
        for k in 1..m {
            row[k] = &binom[m - 1][k - 1] + &binom[m - 1][k];
        }
        binom.push(row);
    }
    let mut counts = vec![BigUint::one()];
    for m in 1..=n {
        let mut total = BigUint::zero();
        for k in 1..=c.min(m) {
            total += &binom[m - 1][k - 1] * &counts[m - k];
        }
        counts.push(total);
    }
    (counts, binom)
}

/// Uniform over partitions of `1..=n` with every block of size at most `c`,
/// built agent by agent: the block of the lowest remaining agent gets size
/// `k` with probability `C(m-1, k-1) A(m-k) / A(m)`, and its other members
/// are a uniform `(k-1)`-subset of the rest.
pub fn capped_partition<R: Rng + ?Sized>(n: usize, c: usize, rng: &mut R) -> Result<CoalitionStructure> {
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    if c == 0 {
        return Err(Error::InvalidCoalitionCap { c, n });
    }
    let (counts, binom) = capped_counts(n, c);
    let mut rest: Vec<usize> = (1..=n).collect();
    let mut blocks = Vec::new();
    while let Some((&head, others)) = rest.split_first() {
        let m = rest.len();
        let mut ticket = rng.gen_biguint_below(&counts[m]);
        let mut k = 1;
        loop {
            let weight = &binom[m - 1][k - 1] * &counts[m - k];
            if ticket < weight {
                break;
            }
            ticket -= weight;
            k += 1;
        }
        let mut block = vec![head];
        block.extend(others.choose_multiple(rng, k - 1).copied());
        rest.retain(|a| !block.contains(a));
        blocks.push(block);
    }
    CoalitionStructure::with_population(n, blocks)
}

/// Number of partitions of `n` agents into blocks of at most `c`.
pub fn count_capped_partitions(n: usize, c: usize) -> BigUint {
    capped_counts(n, c.max(1)).0.swap_remove(n)
}

fn chinese_restaurant<R: Rng + ?Sized>(n: usize, theta: f64, rng: &mut R) -> Result<CoalitionStructure> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidTruthModel(format!("crp:{theta}")));
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 1..=n {
        let seated = (i - 1) as f64;
        let mut u = rng.gen::<f64>() * (seated + theta);
        let table = blocks.iter().position(|b| {
            u -= b.len() as f64;
            u < 0.0
        });
        match table {
            Some(t) => blocks[t].push(i),
            None => blocks.push(vec![i]),
        }
    }
    CoalitionStructure::with_population(n, blocks)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::bounds::bell_number;
    use crate::partition::all_partitions;

    #[test]
    fn tiny_populations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(random_partition(1, &mut rng), CoalitionStructure::singletons(1));
        for _ in 0..50 {
            let s = TruthModel::MaxCoalition(1).sample(7, 0, &mut rng).unwrap();
            assert_eq!(s, CoalitionStructure::singletons(7));
        }
    }

    #[test]
    fn uniform_over_five_partitions_of_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 100_000;
        let mut freq: HashMap<CoalitionStructure, usize> = HashMap::new();
        for _ in 0..draws {
            *freq.entry(random_partition(3, &mut rng)).or_default() += 1;
        }
        assert_eq!(freq.len(), 5);
        let p = 0.2;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (s, &count) in &freq {
            let dev = (count as f64 - draws as f64 * p).abs();
            assert!(dev <= 3.0 * sigma, "{s}: {count} draws");
        }
    }

    #[test]
    fn capped_counts_agree_with_bell_and_enumeration() {
        for n in 1..=30 {
            assert_eq!(count_capped_partitions(n, n), bell_number(n));
        }
        for n in 1..=8 {
            for c in 1..=n {
                let expected = all_partitions(n).iter().filter(|s| s.max_block_size() <= c).count();
                assert_eq!(count_capped_partitions(n, c), BigUint::from(expected));
            }
        }
    }

    #[test]
    fn capped_samples_respect_the_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=40 {
            for c in [1, 2, 4, 8] {
                let s = capped_partition(n, c, &mut rng).unwrap();
                assert!(s.max_block_size() <= c);
                assert_eq!(s.n(), n);
            }
        }
    }

    #[test]
    fn model_strings_round_trip() {
        for text in ["uniform", "crp:0.5", "max-coalition:4", "fixed:[[[1,2],[3]],[[1],[2]]]"] {
            let m: TruthModel = text.parse().unwrap();
            assert_eq!(m.to_string(), text);
        }
        for bad in ["", "crp:-1", "crp:x", "max-coalition:0", "fixed:[]", "fixed:[[[1,1]]]", "zipf:2"] {
            assert!(bad.parse::<TruthModel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn fixed_model_cycles_through_matching_sizes() {
        let m: TruthModel = "fixed:[[[1,2],[3]],[[1],[2]],[[1,3],[2]]]".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(m.sample(3, 0, &mut rng).unwrap().to_string(), "[[1,2],[3]]");
        assert_eq!(m.sample(3, 1, &mut rng).unwrap().to_string(), "[[1,3],[2]]");
        assert_eq!(m.sample(3, 2, &mut rng).unwrap().to_string(), "[[1,2],[3]]");
        assert!(m.sample(4, 0, &mut rng).is_err());
    }

    #[test]
    fn crp_produces_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=30 {
            let s = TruthModel::ChineseRestaurant(1.0).sample(n, 0, &mut rng).unwrap();
            assert_eq!(s.n(), n);
        }
    }
}
