//! Closed-form observations for the gadget games.

use super::{assemble, brute_force_observe, check_population, AdversaryPolicy, BlockResponse, Observation, BRUTE_FORCE_CAP};
use crate::error::{Error, Result};
use crate::games::{AuctionGame, AuctionShape, CongestionGame, FactoredNormalFormGame, GameStrategyPair};
use crate::partition::CoalitionStructure;

/// A decider deviates iff some factor it decides has a teammate as
/// beneficiary. The best response is unique, so there is one pattern per block.
fn directed_pair_responses(
    truth: &CoalitionStructure,
    pairs: impl Iterator<Item = (usize, usize)>,
) -> Vec<BlockResponse> {
    let mut deviates = vec![false; truth.n() + 1];
    for (i, j) in pairs {
        if truth.same_block(i, j) {
            deviates[j] = true;
        }
    }
    truth
        .blocks()
        .iter()
        .map(|block| {
            let pattern: Vec<usize> = block.iter().copied().filter(|&j| deviates[j]).collect();
            if pattern.is_empty() {
                BlockResponse::Stay
            } else {
                BlockResponse::Deviate(vec![pattern])
            }
        })
        .collect()
}

fn auction_responses(truth: &CoalitionStructure, shape: &AuctionShape) -> Result<Vec<BlockResponse>> {
    let singles = |members: Vec<usize>| {
        if members.is_empty() {
            BlockResponse::Stay
        } else {
            BlockResponse::Deviate(members.into_iter().map(|k| vec![k]).collect())
        }
    };
    match shape {
        AuctionShape::FirstMove => Ok(truth.blocks().iter().map(|b| singles(b.clone())).collect()),
        AuctionShape::Gadget { x, y, .. } => Ok(truth
            .blocks()
            .iter()
            .map(|b| {
                let meets_x = b.iter().any(|k| x.contains(k));
                let in_y: Vec<usize> = b.iter().copied().filter(|k| y.contains(k)).collect();
                if meets_x {
                    singles(in_y)
                } else {
                    BlockResponse::Stay
                }
            })
            .collect()),
        AuctionShape::Other => Err(Error::InvalidAuction(
            "auction is neither a gadget nor the first-move instance".into(),
        )),
    }
}

fn gadget_pairs(g: &CongestionGame) -> Result<Vec<(usize, usize)>> {
    g.gadgets()
        .map(|fs| fs.iter().map(|f| (f.beneficiary(), f.decider())).collect())
        .ok_or_else(|| Error::InvalidCongestionGame("not assembled from Braess gadgets".into()))
}

/// Per-block admissible responses in closed form for each gadget.
pub fn fast_admissible(truth: &CoalitionStructure, game: &GameStrategyPair) -> Result<Vec<BlockResponse>> {
    check_population(truth, game)?;
    match game {
        GameStrategyPair::NormalForm(g) | GameStrategyPair::Graphical(g) => {
            Ok(directed_pair_responses(truth, g.pairs()))
        }
        GameStrategyPair::Congestion(g) => Ok(directed_pair_responses(truth, gadget_pairs(g)?.into_iter())),
        GameStrategyPair::Auction(a) => auction_responses(truth, &a.shape()),
    }
}

/// Bit `j` is set iff some factor `(i, j)` has `i` in `j`'s coalition.
pub fn observe_factored(
    truth: &CoalitionStructure,
    game: &FactoredNormalFormGame,
    policy: AdversaryPolicy,
) -> Result<Observation> {
    let game = GameStrategyPair::NormalForm(game.clone());
    Ok(assemble(truth, &fast_admissible(truth, &game)?, policy))
}

/// Same bit semantics as [`observe_factored`] for products of Braess gadgets.
pub fn observe_braess(
    truth: &CoalitionStructure,
    game: &CongestionGame,
    policy: AdversaryPolicy,
) -> Result<Observation> {
    if truth.n() != game.n() {
        return Err(Error::PopulationMismatch {
            expected: truth.n(),
            found: game.n(),
        });
    }
    let responses = directed_pair_responses(truth, gadget_pairs(game)?.into_iter());
    Ok(assemble(truth, &responses, policy))
}

/// Gadget auctions: a block meeting both X and Y sends exactly one Y member
/// in; the first-move instance sends exactly one member of every block.
/// Anything else goes to the brute-force reference.
pub fn observe_auction(
    truth: &CoalitionStructure,
    game: &AuctionGame,
    policy: AdversaryPolicy,
) -> Result<Observation> {
    if truth.n() != game.n() {
        return Err(Error::PopulationMismatch {
            expected: truth.n(),
            found: game.n(),
        });
    }
    match game.shape() {
        AuctionShape::Other => {
            brute_force_observe(truth, &GameStrategyPair::Auction(game.clone()), policy, BRUTE_FORCE_CAP)
        }
        shape => Ok(assemble(truth, &auction_responses(truth, &shape)?, policy)),
    }
}
