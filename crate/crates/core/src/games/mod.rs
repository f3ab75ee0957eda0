//! Game-strategy pairs for the four game classes a learner may query.

mod auction;
mod congestion;
mod normal_form;

use serde::{Deserialize, Serialize};

pub use auction::{auction_gadget, first_move_game, AuctionGame, AuctionShape};
pub use congestion::{
    braess, braess_product, BraessFactor, Component, CongestionGame, CostFunction, ResourceId,
    BRAESS_DETOUR, BRAESS_SHARED,
};
pub use normal_form::{
    all_pairs_game, prisoner_dilemma, product, FactoredNormalFormGame, GraphicalGameView,
    PrisonerDilemmaFactor,
};

/// A game together with its specified strategy profile, tagged by game class.
///
/// Serialized as a JSON object with a `"family"` tag, e.g.
/// `{"family":"normal-form","n":4,"factors":[[1,3],[1,4]]}` or
/// `{"family":"auction","v":[..],"r":[..],"bids":[..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GameStrategyPair {
    NormalForm(FactoredNormalFormGame),
    /// A factored product presented as a bounded-degree graphical game.
    Graphical(FactoredNormalFormGame),
    Congestion(CongestionGame),
    Auction(AuctionGame),
}

impl GameStrategyPair {
    pub fn n(&self) -> usize {
        match self {
            GameStrategyPair::NormalForm(g) | GameStrategyPair::Graphical(g) => g.n(),
            GameStrategyPair::Congestion(g) => g.n(),
            GameStrategyPair::Auction(g) => g.n(),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            GameStrategyPair::NormalForm(_) => "normal-form",
            GameStrategyPair::Graphical(_) => "graphical",
            GameStrategyPair::Congestion(_) => "congestion",
            GameStrategyPair::Auction(_) => "auction",
        }
    }
}
