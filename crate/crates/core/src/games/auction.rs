//! Single-item second-price auctions with personalized reserves.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(v, r)` together with the specified bid vector.
///
/// The highest bidder wins, ties broken uniformly at random. The winner gets
/// the item only when its bid is strictly above its own reserve, and then pays
/// the larger of the second-highest bid and that reserve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAuction")]
pub struct AuctionGame {
    pub v: Vec<f64>,
    pub r: Vec<f64>,
    pub bids: Vec<f64>,
}

#[derive(Deserialize)]
struct RawAuction {
    v: Vec<f64>,
    r: Vec<f64>,
    bids: Vec<f64>,
}

impl TryFrom<RawAuction> for AuctionGame {
    type Error = Error;

    fn try_from(raw: RawAuction) -> Result<Self> {
        AuctionGame::new(raw.v, raw.r, raw.bids)
    }
}

/// How an auction instance relates to the two gadget constructors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuctionShape {
    Gadget {
        x: BTreeSet<usize>,
        y: BTreeSet<usize>,
        z: BTreeSet<usize>,
    },
    FirstMove,
    Other,
}

impl AuctionGame {
    pub fn new(v: Vec<f64>, r: Vec<f64>, bids: Vec<f64>) -> Result<Self> {
        let n = v.len();
        if n == 0 {
            return Err(Error::EmptyPopulation);
        }
        if r.len() != n || bids.len() != n {
            return Err(Error::InvalidAuction(format!(
                "vector lengths differ: v={}, r={}, bids={}",
                n,
                r.len(),
                bids.len()
            )));
        }
        let in_unit = |x: &f64| (0.0..=1.0).contains(x);
        if !v.iter().all(in_unit) || !r.iter().all(in_unit) {
            return Err(Error::InvalidAuction("valuations and reserves must lie in [0, 1]".into()));
        }
        if !bids.iter().all(|b| b.is_finite() && *b >= 0.0) {
            return Err(Error::InvalidAuction("bids must be finite and nonnegative".into()));
        }
        Ok(AuctionGame { v, r, bids })
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn shape(&self) -> AuctionShape {
        if self.bids.iter().any(|&b| b != 0.0) {
            return AuctionShape::Other;
        }
        if self.v.iter().all(|&v| v == 1.0) && self.r.iter().all(|&r| r == 0.0) {
            return AuctionShape::FirstMove;
        }
        let (mut x, mut y, mut z) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
        for i in 1..=self.n() {
            match (self.v[i - 1], self.r[i - 1]) {
                (v, r) if v == 1.0 && r == 1.0 => x.insert(i),
                (v, r) if v == 0.0 && r == 0.0 => y.insert(i),
                (v, r) if v == 0.0 && r == 1.0 => z.insert(i),
                _ => return AuctionShape::Other,
            };
        }
        AuctionShape::Gadget { x, y, z }
    }

    /// Agents tied for the highest bid under `bids`.
    pub fn top_bidders(bids: &[f64]) -> Vec<usize> {
        let top = bids.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (1..=bids.len()).filter(|&i| bids[i - 1] == top).collect()
    }

    /// Price paid if `winner` wins under `bids`, or `None` when the item is
    /// not allocated.
    pub fn price_if_winner(&self, bids: &[f64], winner: usize) -> Option<f64> {
        let own = bids[winner - 1];
        let reserve = self.r[winner - 1];
        if own <= reserve {
            return None;
        }
        let second = bids
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != winner - 1)
            .map(|(_, &b)| b)
            .fold(0.0, f64::max);
        Some(second.max(reserve))
    }
}

/// `A(X, Y, Z)`: `v = 1` on X, `r = 0` on Y, everything else 0 or 1 as the
/// gadget table prescribes, and all specified bids 0.
pub fn auction_gadget(
    n: usize,
    x: &BTreeSet<usize>,
    y: &BTreeSet<usize>,
    z: &BTreeSet<usize>,
) -> Result<AuctionGame> {
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    let mut seen = vec![false; n];
    for &a in x.iter().chain(y).chain(z) {
        if a == 0 || a > n {
            return Err(Error::AgentOutOfRange { agent: a, n });
        }
        if std::mem::replace(&mut seen[a - 1], true) {
            return Err(Error::InvalidPartition {
                n,
                reason: format!("agent {a} is in more than one of X, Y, Z"),
            });
        }
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPartition {
            n,
            reason: format!("agent {} is in none of X, Y, Z", k + 1),
        });
    }
    let v = (1..=n).map(|i| if x.contains(&i) { 1.0 } else { 0.0 }).collect();
    let r = (1..=n).map(|i| if y.contains(&i) { 0.0 } else { 1.0 }).collect();
    AuctionGame::new(v, r, vec![0.0; n])
}

/// `v = 1`, `r = 0`, all bids 0: every coalition wants exactly one member to bid.
pub fn first_move_game(n: usize) -> Result<AuctionGame> {
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    AuctionGame::new(vec![1.0; n], vec![0.0; n], vec![0.0; n])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn gadget_examples() {
        let g = auction_gadget(4, &set(&[1]), &set(&[2, 3, 4]), &set(&[])).unwrap();
        assert_eq!(g.v, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(g.r, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(g.bids, vec![0.0; 4]);

        let zero = auction_gadget(3, &set(&[]), &set(&[1, 2, 3]), &set(&[])).unwrap();
        assert!(zero.v.iter().all(|&v| v == 0.0));

        assert!(auction_gadget(3, &set(&[1, 3]), &set(&[2]), &set(&[3])).is_err());
        assert!(auction_gadget(3, &set(&[1]), &set(&[2]), &set(&[])).is_err());
        assert!(auction_gadget(3, &set(&[1]), &set(&[2]), &set(&[4])).is_err());
    }

    #[test]
    fn shapes_are_recognised() {
        let g = auction_gadget(3, &set(&[1]), &set(&[2]), &set(&[3])).unwrap();
        assert_eq!(
            g.shape(),
            AuctionShape::Gadget {
                x: set(&[1]),
                y: set(&[2]),
                z: set(&[3])
            }
        );
        assert_eq!(first_move_game(6).unwrap().shape(), AuctionShape::FirstMove);
        let odd = AuctionGame::new(vec![0.5], vec![0.0], vec![0.0]).unwrap();
        assert_eq!(odd.shape(), AuctionShape::Other);
    }

    #[test]
    fn first_move_examples() {
        let g = first_move_game(6).unwrap();
        assert_eq!(g.v, vec![1.0; 6]);
        assert_eq!(g.r, vec![0.0; 6]);
        assert_eq!(g.bids, vec![0.0; 6]);
        assert_eq!(first_move_game(1).unwrap().n(), 1);
        assert!(matches!(first_move_game(0), Err(Error::EmptyPopulation)));
    }

    #[test]
    fn allocation_rule() {
        let g = first_move_game(3).unwrap();
        // All-zero bids never allocate: the bid must exceed the reserve.
        assert_eq!(g.price_if_winner(&[0.0, 0.0, 0.0], 1), None);
        assert_eq!(g.price_if_winner(&[0.5, 0.0, 0.0], 1), Some(0.0));
        assert_eq!(g.price_if_winner(&[1.0, 0.5, 0.0], 1), Some(0.5));
        assert_eq!(AuctionGame::top_bidders(&[0.5, 0.5, 0.0]), vec![1, 2]);
        let gadget = auction_gadget(2, &set(&[1]), &set(&[2]), &set(&[])).unwrap();
        // Reserve 1 on X cannot be beaten with a bid of 1.
        assert_eq!(gadget.price_if_winner(&[1.0, 0.0], 1), None);
    }

    #[test]
    fn json_shape() {
        let g = auction_gadget(2, &set(&[1]), &set(&[2]), &set(&[])).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"v":[1.0,0.0],"r":[1.0,0.0],"bids":[0.0,0.0]}"#);
        assert_eq!(serde_json::from_str::<AuctionGame>(&s).unwrap(), g);
        assert!(serde_json::from_str::<AuctionGame>(r#"{"v":[2.0],"r":[0.0],"bids":[0.0]}"#).is_err());
    }
}
