use thiserror::Error;

use crate::auctions::AuctionTrace;
use crate::model::Bundle;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance has no items")]
    NoItems,

    #[error("instance has no players")]
    NoPlayers,

    #[error("{0} items exceed the supported maximum of {max}", max = crate::model::MAX_ITEMS)]
    TooManyItems(usize),

    #[error("valuation is defined over {found} items, expected {expected}")]
    UniverseMismatch { expected: usize, found: usize },

    #[error("value table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },

    #[error("value {value} exceeds the configured cap {cap}")]
    ValueAboveCap { value: u32, cap: u32 },

    #[error("invalid valuation: {0}")]
    InvalidValuation(crate::model::Violation),

    #[error("truncation bound violated: base value {value} on {bundle:?} exceeds M = {m_value}")]
    TruncationBoundsViolated {
        bundle: Bundle,
        value: u32,
        m_value: u32,
    },

    #[error("truncation size k must be positive")]
    ZeroTruncationSize,

    #[error("price vector has {found} entries, expected {expected}")]
    PriceLength { expected: usize, found: usize },

    #[error("unknown item label `{0}`")]
    UnknownItem(String),

    #[error("duplicate item label `{0}`")]
    DuplicateItem(String),

    #[error("item index {index} out of range for {items} items")]
    ItemOutOfRange { index: usize, items: usize },

    #[error("allocation is not disjoint: players {0} and {1} share items")]
    OverlappingAllocation(usize, usize),

    #[error("malformed instance: {0}")]
    Parse(String),

    #[error("grid of {points} price pairs exceeds budget {budget}")]
    GridTooLarge { points: u128, budget: u64 },

    #[error("enumeration of {units} units exceeds budget {budget}")]
    BudgetExceeded { units: u128, budget: u64 },

    #[error("completion search exceeded budget {budget}; membership undecided")]
    SearchBudgetExceeded { budget: u64 },

    #[error("transition at item {item} fits none of the gross-substitute cases")]
    UnclassifiableTransition { item: usize },

    #[error("items must be distinct")]
    SameItem,

    #[error("auction did not terminate within {cap} steps")]
    IterationCapExceeded { cap: usize, trace: Box<AuctionTrace> },

    #[error("policy chose {chosen:?}, which is empty or not inside the obstacle {obstacle:?}")]
    PolicyViolation { chosen: Bundle, obstacle: Bundle },

    #[error("player {player} is not a (2,M)-truncation: {reason}")]
    NotGgs2Instance { player: usize, reason: String },

    #[error("Hall's condition fails for players {0:?}")]
    HallViolation(Vec<usize>),

    #[error("the induced unit-demand auction has no over-demanded set")]
    NoObstacle,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
