//! The multiple-bit observation oracle.
//!
//! Each coalition of the hidden structure acts as one joint player. If the
//! specified sub-profile is already a joint best response the whole block
//! reports "no deviation"; otherwise the block picks one of its joint best
//! responses and each member reports whether its own strategy changed.
//! Which best response is picked is decided by an [`AdversaryPolicy`].

mod brute;
mod fast;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::str::FromStr;

use fnv::FnvHasher;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{AuctionShape, GameStrategyPair};
use crate::partition::CoalitionStructure;

pub use brute::{brute_force_admissible, brute_force_observe, BRUTE_FORCE_CAP};
pub use fast::{fast_admissible, observe_auction, observe_braess, observe_factored};

/// One deviation bit per agent; `bits[i - 1]` is agent i.
///
/// Serializes as a string of `0`/`1` characters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Observation {
    bits: Vec<bool>,
}

impl Observation {
    pub fn new(bits: Vec<bool>) -> Self {
        Observation { bits }
    }

    pub fn all_false(n: usize) -> Self {
        Observation { bits: vec![false; n] }
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Bit of agent `i` (1-based).
    pub fn deviates(&self, i: usize) -> bool {
        self.bits[i - 1]
    }

    /// Agents whose bit is set.
    pub fn deviators(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| self.deviates(i)).collect()
    }

    pub fn to_bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl TryFrom<String> for Observation {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid observation character {other:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Observation::new)
    }
}

impl From<Observation> for String {
    fn from(o: Observation) -> Self {
        o.to_bitstring()
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// Rule for choosing among several joint best responses of one block.
///
/// Candidates are the distinct deviation patterns (sorted lists of members
/// that change strategy) reachable by some joint best response, in
/// lexicographic order. `First`/`Last` take the ends; `Seeded` derives a
/// choice from the seed, the block and the candidate list, so the same
/// inputs always give the same answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AdversaryPolicy {
    First,
    Last,
    Seeded(u64),
}

impl AdversaryPolicy {
    /// `first`, `last`, and `seeded:0` through `seeded:{count-1}`.
    pub fn sweep(seeds: u64) -> Vec<AdversaryPolicy> {
        let mut out = vec![AdversaryPolicy::First, AdversaryPolicy::Last];
        out.extend((0..seeds).map(AdversaryPolicy::Seeded));
        out
    }

    pub fn select(&self, block: &[usize], candidates: &[Vec<usize>]) -> usize {
        assert!(!candidates.is_empty(), "no candidate best responses");
        if candidates.len() == 1 {
            return 0;
        }
        match *self {
            AdversaryPolicy::First => 0,
            AdversaryPolicy::Last => candidates.len() - 1,
            AdversaryPolicy::Seeded(seed) => {
                let mut h = FnvHasher::default();
                (seed, block, candidates).hash(&mut h);
                ChaCha8Rng::seed_from_u64(h.finish()).gen_range(0..candidates.len())
            }
        }
    }
}

impl fmt::Display for AdversaryPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryPolicy::First => f.write_str("first"),
            AdversaryPolicy::Last => f.write_str("last"),
            AdversaryPolicy::Seeded(s) => write!(f, "seeded:{s}"),
        }
    }
}

impl FromStr for AdversaryPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(AdversaryPolicy::First),
            "last" => Ok(AdversaryPolicy::Last),
            _ => s
                .strip_prefix("seeded:")
                .and_then(|n| n.parse().ok())
                .map(AdversaryPolicy::Seeded)
                .ok_or_else(|| Error::UnknownPolicy(s.to_string())),
        }
    }
}

impl TryFrom<String> for AdversaryPolicy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AdversaryPolicy> for String {
    fn from(p: AdversaryPolicy) -> Self {
        p.to_string()
    }
}

/// What one block may do in response to the specified profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockResponse {
    /// The specified sub-profile is a joint best response.
    Stay,
    /// It is not; these are the deviation patterns of the joint best
    /// responses, sorted and nonempty.
    Deviate(Vec<Vec<usize>>),
}

/// Turns per-block admissible sets into one observation.
pub fn assemble(
    truth: &CoalitionStructure,
    responses: &[BlockResponse],
    policy: AdversaryPolicy,
) -> Observation {
    let mut bits = vec![false; truth.n()];
    for (block, response) in truth.blocks().iter().zip(responses) {
        if let BlockResponse::Deviate(candidates) = response {
            for &i in &candidates[policy.select(block, candidates)] {
                bits[i - 1] = true;
            }
        }
    }
    Observation::new(bits)
}

pub(crate) fn check_population(truth: &CoalitionStructure, game: &GameStrategyPair) -> Result<()> {
    if truth.n() != game.n() {
        return Err(Error::PopulationMismatch {
            expected: truth.n(),
            found: game.n(),
        });
    }
    Ok(())
}

/// Whether the closed-form oracle covers this game.
pub fn has_fast_path(game: &GameStrategyPair) -> bool {
    match game {
        GameStrategyPair::NormalForm(_) | GameStrategyPair::Graphical(_) => true,
        GameStrategyPair::Congestion(g) => g.gadgets().is_some(),
        GameStrategyPair::Auction(a) => a.shape() != AuctionShape::Other,
    }
}

/// Observation of `game` under `truth`, using the closed-form oracle when it
/// applies and the brute-force reference otherwise.
pub fn observe_with(
    truth: &CoalitionStructure,
    game: &GameStrategyPair,
    policy: AdversaryPolicy,
) -> Result<Observation> {
    if has_fast_path(game) {
        let responses = fast_admissible(truth, game)?;
        Ok(assemble(truth, &responses, policy))
    } else {
        brute_force_observe(truth, game, policy, BRUTE_FORCE_CAP)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    /// 1-based round number.
    pub round: usize,
    pub game: GameStrategyPair,
    pub observation: Observation,
}

/// Every query a learner issued, in order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One JSON object per round: `{"round":..,"game":{..},"observation":"0110"}`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.entries {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl(text: &str) -> Result<Self> {
        let entries = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Transcript { entries })
    }
}

/// The learner's only window onto the hidden coalition structure.
pub struct HiddenOracle {
    truth: CoalitionStructure,
    policy: AdversaryPolicy,
    transcript: Transcript,
}

impl HiddenOracle {
    pub fn new(truth: CoalitionStructure, policy: AdversaryPolicy) -> Self {
        HiddenOracle {
            truth,
            policy,
            transcript: Transcript::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.truth.n()
    }

    pub fn policy(&self) -> AdversaryPolicy {
        self.policy
    }

    pub fn rounds_used(&self) -> usize {
        self.transcript.len()
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    /// Hidden ground truth. Learners must not call this; it exists for
    /// instrumented tests and the harness.
    pub fn truth(&self) -> &CoalitionStructure {
        &self.truth
    }

    /// Plays one round.
    pub fn observe(&mut self, game: GameStrategyPair) -> Result<Observation> {
        check_population(&self.truth, &game)?;
        let observation = observe_with(&self.truth, &game, self.policy)?;
        self.transcript.entries.push(TranscriptEntry {
            round: self.transcript.len() + 1,
            game,
            observation: observation.clone(),
        });
        Ok(observation)
    }
}
