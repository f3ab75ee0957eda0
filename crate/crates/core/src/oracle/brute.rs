//! Reference oracle: enumerate every joint strategy of each block.
//!
//! Independent of the closed-form gadget analysis; validates the closed
//! forms and answers queries on games that have no closed form.

use std::collections::BTreeSet;

use super::{assemble, check_population, AdversaryPolicy, BlockResponse, Observation};
use crate::error::{Error, Result};
use crate::games::{AuctionGame, CongestionGame, FactoredNormalFormGame, GameStrategyPair};
use crate::partition::CoalitionStructure;

/// Default limit on joint profiles enumerated per block.
pub const BRUTE_FORCE_CAP: u128 = 1_000_000;

/// Bids tried for every block member in auctions, besides its specified bid.
const BID_GRID: [f64; 3] = [0.0, 0.5, 1.0];

const TIE_EPS: f64 = 1e-9;

/// One independent decision of one block member.
struct Slot {
    agent: usize,
    options: usize,
    specified: usize,
}

/// Enumerates all assignments to `slots`, returning the admissible response.
fn enumerate_block(
    block: &[usize],
    slots: &[Slot],
    cap: u128,
    mut utility: impl FnMut(&[usize]) -> f64,
) -> Result<BlockResponse> {
    let profiles = slots
        .iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s.options as u128));
    if profiles > cap {
        return Err(Error::BruteForceCapExceeded {
            block: block.to_vec(),
            profiles,
            cap,
        });
    }
    let specified: Vec<usize> = slots.iter().map(|s| s.specified).collect();
    let specified_value = utility(&specified);

    let mut best = f64::NEG_INFINITY;
    let mut patterns: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut assignment = vec![0usize; slots.len()];
    loop {
        let u = utility(&assignment);
        if u > best + TIE_EPS {
            best = u;
            patterns.clear();
        }
        if u >= best - TIE_EPS {
            let mut movers: Vec<usize> = slots
                .iter()
                .zip(&assignment)
                .filter(|(s, &a)| a != s.specified)
                .map(|(s, _)| s.agent)
                .collect();
            movers.dedup();
            patterns.insert(movers);
        }
        // Mixed-radix increment.
        let mut k = 0;
        while k < slots.len() {
            assignment[k] += 1;
            if assignment[k] < slots[k].options {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
        if k == slots.len() {
            break;
        }
    }
    if specified_value >= best - TIE_EPS {
        Ok(BlockResponse::Stay)
    } else {
        Ok(BlockResponse::Deviate(patterns.into_iter().collect()))
    }
}

fn factored_block(g: &FactoredNormalFormGame, block: &[usize], cap: u128) -> Result<BlockResponse> {
    let inside = |a: usize| block.binary_search(&a).is_ok();
    // Slot k decides factor decided_by_block[k]: option 0 is D, option 1 is C.
    let decided: Vec<(usize, usize)> = g.pairs().filter(|&(_, j)| inside(j)).collect();
    let mut slots: Vec<Slot> = decided
        .iter()
        .map(|&(_, j)| Slot {
            agent: j,
            options: 2,
            specified: 0,
        })
        .collect();
    let mut order: Vec<usize> = (0..slots.len()).collect();
    order.sort_by_key(|&k| slots[k].agent);
    let decided: Vec<(usize, usize)> = order.iter().map(|&k| decided[k]).collect();
    slots.sort_by_key(|s| s.agent);
    enumerate_block(block, &slots, cap, |assignment| {
        let benefit = crate::games::PrisonerDilemmaFactor::BENEFIT;
        let cost = crate::games::PrisonerDilemmaFactor::COST;
        decided
            .iter()
            .zip(assignment)
            .filter(|(_, &a)| a == 1)
            .map(|(&(i, j), _)| {
                let mut u = 0.0;
                if inside(i) {
                    u += benefit;
                }
                if inside(j) {
                    u -= cost;
                }
                u
            })
            .sum()
    })
}

fn congestion_block(g: &CongestionGame, block: &[usize], cap: u128) -> Result<BlockResponse> {
    g.validate()?;
    let mut slots = Vec::new();
    // (agent, component index) for each slot
    let mut owners = Vec::new();
    for &i in block {
        for (k, c) in g.components(i).iter().enumerate() {
            slots.push(Slot {
                agent: i,
                options: c.len(),
                specified: g.specified()[i - 1][k],
            });
            owners.push((i, k));
        }
    }
    let mut profile: Vec<Vec<usize>> = g.specified().to_vec();
    enumerate_block(block, &slots, cap, |assignment| {
        for (&(i, k), &a) in owners.iter().zip(assignment) {
            profile[i - 1][k] = a;
        }
        -g.joint_cost(block, &profile)
    })
}

fn auction_block(
    a: &AuctionGame,
    truth: &CoalitionStructure,
    block: &[usize],
    cap: u128,
) -> Result<BlockResponse> {
    let mut options: Vec<Vec<f64>> = Vec::with_capacity(block.len());
    let mut slots = Vec::with_capacity(block.len());
    for &i in block {
        let own = a.bids[i - 1];
        let mut grid: Vec<f64> = BID_GRID.to_vec();
        if !grid.contains(&own) {
            grid.push(own);
        }
        slots.push(Slot {
            agent: i,
            options: grid.len(),
            specified: grid.iter().position(|&b| b == own).unwrap(),
        });
        options.push(grid);
    }
    let value = block.iter().map(|&k| a.v[k - 1]).fold(0.0, f64::max);
    let mut bids = a.bids.clone();
    enumerate_block(block, &slots, cap, |assignment| {
        for ((&i, grid), &pick) in block.iter().zip(&options).zip(assignment) {
            bids[i - 1] = grid[pick];
        }
        let top = AuctionGame::top_bidders(&bids);
        let share = 1.0 / top.len() as f64;
        top.iter()
            .filter(|&&w| truth.block_of(w) == block)
            .filter_map(|&w| a.price_if_winner(&bids, w))
            .map(|price| share * (value - price))
            .sum()
    })
}

/// Per-block admissible responses by exhaustive search.
///
/// Auctions are searched over the bid grid {0, 1/2, 1} plus each member's
/// specified bid, with the winner drawn uniformly among tied top bidders
/// and the item going to the most valuable member of the winner's block.
pub fn brute_force_admissible(
    truth: &CoalitionStructure,
    game: &GameStrategyPair,
    cap: u128,
) -> Result<Vec<BlockResponse>> {
    check_population(truth, game)?;
    truth
        .blocks()
        .iter()
        .map(|block| match game {
            GameStrategyPair::NormalForm(g) | GameStrategyPair::Graphical(g) => factored_block(g, block, cap),
            GameStrategyPair::Congestion(g) => congestion_block(g, block, cap),
            GameStrategyPair::Auction(a) => auction_block(a, truth, block, cap),
        })
        .collect()
}

pub fn brute_force_observe(
    truth: &CoalitionStructure,
    game: &GameStrategyPair,
    policy: AdversaryPolicy,
    cap: u128,
) -> Result<Observation> {
    Ok(assemble(truth, &brute_force_admissible(truth, game, cap)?, policy))
}
