//! Items, bundles, valuations, prices and allocations.
//!
//! Every valuation is stored as an explicit table over all `2^m` bundles,
//! whatever constructor produced it, so the demand oracle treats all classes
//! uniformly. Bundles are bitmasks over at most [`MAX_ITEMS`] items.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported item universe.
pub const MAX_ITEMS: usize = 20;

/// Default cap on any bundle value.
pub const DEFAULT_VMAX: u32 = 64;

/// A set of items, encoded as a bitmask over item indices.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle(u32);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub fn from_bits(bits: u32) -> Self {
        Bundle(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Index into a `2^m` value table.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn singleton(item: usize) -> Self {
        Bundle(1 << item)
    }

    pub fn full(items: usize) -> Self {
        Bundle(((1u64 << items) - 1) as u32)
    }

    pub fn from_items<I: IntoIterator<Item = usize>>(items: I) -> Self {
        Bundle(items.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, item: usize) -> bool {
        self.0 >> item & 1 == 1
    }

    pub fn is_subset(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset(self, other: Bundle) -> bool {
        self != other && self.is_subset(other)
    }

    pub fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Bundle {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Bundle {
        Bundle(self.0 & !other.0)
    }

    pub fn with(self, item: usize) -> Bundle {
        Bundle(self.0 | 1 << item)
    }

    pub fn without(self, item: usize) -> Bundle {
        Bundle(self.0 & !(1 << item))
    }

    /// Smallest item index, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Item indices in increasing order.
    pub fn items(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            Some(i as usize)
        })
    }

    /// Every bundle over `items` items, in increasing bitmask order.
    pub fn all(items: usize) -> impl Iterator<Item = Bundle> {
        (0..1u32 << items).map(Bundle)
    }

    /// Every subset of `self`, including `self` and the empty bundle.
    pub fn subsets(self) -> impl Iterator<Item = Bundle> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Bundle(cur))
        })
    }

    /// Lexicographic comparison of the sorted item lists.
    pub fn lex_cmp(self, other: Bundle) -> Ordering {
        self.items().cmp(other.items())
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.items()).finish()
    }
}

/// Constructor that produced a valuation. Kept so instances serialize back
/// to the form they were written in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValuationClass {
    Table,
    Additive(Vec<u32>),
    UnitDemand(Vec<u32>),
    Truncation(Box<TruncationSpec>),
}

/// Parameters of a `(k, M)`-truncation: `base` below size `k`, `M` from size `k` on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationSpec {
    pub base: Valuation,
    pub k: usize,
    pub m_value: u32,
}

/// First reason a value table fails to be a valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyNonzero(u32),
    NotMonotone {
        subset: Bundle,
        superset: Bundle,
        subset_value: u32,
        superset_value: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyNonzero(v) => write!(f, "empty set nonzero (value {v})"),
            Violation::NotMonotone {
                subset,
                superset,
                subset_value,
                superset_value,
            } => write!(
                f,
                "not monotone: v({subset:?}) = {subset_value} > v({superset:?}) = {superset_value}"
            ),
        }
    }
}

/// A monotone integer set function with `v(∅) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    items: usize,
    values: Vec<u32>,
    class: ValuationClass,
}

impl Valuation {
    /// Explicit table indexed by bundle bitmask; must be total.
    pub fn table(items: usize, values: Vec<u32>) -> Result<Self> {
        check_items(items)?;
        if values.len() != 1 << items {
            return Err(Error::TableSize {
                expected: 1 << items,
                found: values.len(),
            });
        }
        let v = Valuation {
            items,
            values,
            class: ValuationClass::Table,
        };
        validate(&v).map_err(Error::InvalidValuation)?;
        Ok(v)
    }

    pub fn from_fn(items: usize, f: impl Fn(Bundle) -> u32) -> Result<Self> {
        check_items(items)?;
        Self::table(items, Bundle::all(items).map(f).collect())
    }

    pub fn zero(items: usize) -> Result<Self> {
        Self::from_fn(items, |_| 0)
    }

    pub fn additive(item_values: Vec<u32>) -> Result<Self> {
        let items = item_values.len();
        check_items(items)?;
        let values = Bundle::all(items)
            .map(|b| b.items().map(|i| item_values[i]).sum())
            .collect();
        Ok(Valuation {
            items,
            values,
            class: ValuationClass::Additive(item_values),
        })
    }

    /// `v(S) = max_{j ∈ S} value(j)`.
    pub fn unit_demand(item_values: Vec<u32>) -> Result<Self> {
        let items = item_values.len();
        check_items(items)?;
        let values = Bundle::all(items)
            .map(|b| b.items().map(|i| item_values[i]).max().unwrap_or(0))
            .collect();
        Ok(Valuation {
            items,
            values,
            class: ValuationClass::UnitDemand(item_values),
        })
    }

    /// Assignment valuation: `weights[slot][item]`, and `v(S)` is the best
    /// weight of a matching between the items of `S` and the slots.
    /// Stored as a table.
    pub fn assignment(items: usize, weights: &[Vec<u32>]) -> Result<Self> {
        check_items(items)?;
        for row in weights {
            if row.len() != items {
                return Err(Error::UniverseMismatch {
                    expected: items,
                    found: row.len(),
                });
            }
        }
        let slots = weights.len();
        // best[S][free slots]
        let width = 1usize << slots;
        let mut best = vec![0u32; (1 << items) * width];
        for s in 1..1usize << items {
            let j = s.trailing_zeros() as usize;
            let rest = s & (s - 1);
            for free in 0..width {
                let mut v = best[rest * width + free];
                for (slot, row) in weights.iter().enumerate() {
                    if free >> slot & 1 == 1 {
                        let cand = row[j] + best[rest * width + (free & !(1 << slot))];
                        v = v.max(cand);
                    }
                }
                best[s * width + free] = v;
            }
        }
        let values = (0..1usize << items)
            .map(|s| best[s * width + width - 1])
            .collect();
        Self::table(items, values)
    }

    /// `(k, M)`-truncation of `spec.base`.
    ///
    /// The base must stay at or below `M` on bundles smaller than `k`, which is
    /// what keeps the result monotone. Its values on larger bundles are
    /// overwritten and not constrained here; whether some gross-substitute
    /// completion exists is the question `structure::is_ggs_member` answers.
    pub fn truncation(spec: TruncationSpec) -> Result<Self> {
        if spec.k == 0 {
            return Err(Error::ZeroTruncationSize);
        }
        let items = spec.base.items;
        let mut values = Vec::with_capacity(1 << items);
        for b in Bundle::all(items) {
            if b.len() < spec.k {
                let value = spec.base.value(b);
                if value > spec.m_value {
                    return Err(Error::TruncationBoundsViolated {
                        bundle: b,
                        value,
                        m_value: spec.m_value,
                    });
                }
                values.push(value);
            } else {
                values.push(spec.m_value);
            }
        }
        let v = Valuation {
            items,
            values,
            class: ValuationClass::Truncation(Box::new(spec)),
        };
        validate(&v).map_err(Error::InvalidValuation)?;
        Ok(v)
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn value(&self, b: Bundle) -> u32 {
        self.values[b.index()]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn class(&self) -> &ValuationClass {
        &self.class
    }

    pub fn max_value(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// Values multiplied by `factor`, as a table.
    pub fn scaled(&self, factor: u32) -> Valuation {
        Valuation {
            items: self.items,
            values: self.values.iter().map(|v| v * factor).collect(),
            class: ValuationClass::Table,
        }
    }

    /// Same values, forgetting the constructor.
    pub fn to_table(&self) -> Valuation {
        Valuation {
            items: self.items,
            values: self.values.clone(),
            class: ValuationClass::Table,
        }
    }

    /// Largest marginal value of `item` over all bundles.
    pub fn max_marginal(&self, item: usize) -> u32 {
        Bundle::all(self.items)
            .filter(|b| !b.contains(item))
            .map(|b| self.value(b.with(item)) - self.value(b))
            .max()
            .unwrap_or(0)
    }
}

fn check_items(items: usize) -> Result<()> {
    if items == 0 {
        Err(Error::NoItems)
    } else if items > MAX_ITEMS {
        Err(Error::TooManyItems(items))
    } else {
        Ok(())
    }
}

/// Checks `v(∅) = 0` and monotonicity; reports the first violating pair.
///
/// Monotonicity is checked on single-item extensions, which covers every
/// `S ⊂ T` by transitivity. The reported pair is the first `(S, S ∪ {j})` in
/// bitmask order of `S`, then item order.
pub fn validate(v: &Valuation) -> std::result::Result<(), Violation> {
    let empty = v.value(Bundle::EMPTY);
    if empty != 0 {
        return Err(Violation::EmptyNonzero(empty));
    }
    for s in Bundle::all(v.items) {
        for j in 0..v.items {
            if s.contains(j) {
                continue;
            }
            let t = s.with(j);
            if v.value(s) > v.value(t) {
                return Err(Violation::NotMonotone {
                    subset: s,
                    superset: t,
                    subset_value: v.value(s),
                    superset_value: v.value(t),
                });
            }
        }
    }
    Ok(())
}

/// Nonnegative integer price per item.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PriceVector(Vec<u32>);

impl PriceVector {
    pub fn new(prices: Vec<u32>) -> Self {
        PriceVector(prices)
    }

    pub fn zeros(items: usize) -> Self {
        PriceVector(vec![0; items])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, item: usize) -> u32 {
        self.0[item]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn set(&mut self, item: usize, price: u32) {
        self.0[item] = price;
    }

    /// `p(S)`.
    pub fn cost(&self, b: Bundle) -> i64 {
        b.items().map(|i| self.0[i] as i64).sum()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().map(|&p| p as i64).sum()
    }

    /// Adds one to every item of `b`.
    pub fn raise(&mut self, b: Bundle) {
        for i in b.items() {
            self.0[i] += 1;
        }
    }

    /// `p + 1_b`.
    pub fn raised(&self, b: Bundle) -> PriceVector {
        let mut p = self.clone();
        p.raise(b);
        p
    }

    pub fn join(&self, other: &PriceVector) -> PriceVector {
        PriceVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn meet(&self, other: &PriceVector) -> PriceVector {
        PriceVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// Coordinatewise `self ≤ other`.
    pub fn dominated_by(&self, other: &PriceVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scaled(&self, factor: u32) -> PriceVector {
        PriceVector(self.0.iter().map(|p| p * factor).collect())
    }

    /// Items whose price differs between `self` and `other`.
    pub fn differing(&self, other: &PriceVector) -> Bundle {
        Bundle::from_items((0..self.0.len()).filter(|&i| self.0[i] != other.0[i]))
    }
}

/// Domination order.
impl PartialOrd for PriceVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.dominated_by(other), other.dominated_by(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

impl From<Vec<u32>> for PriceVector {
    fn from(v: Vec<u32>) -> Self {
        PriceVector(v)
    }
}

/// Pairwise disjoint bundles, one per player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation(Vec<Bundle>);

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Result<Self> {
        let mut seen = Bundle::EMPTY;
        for (i, b) in bundles.iter().enumerate() {
            if !seen.intersection(*b).is_empty() {
                let j = bundles[..i]
                    .iter()
                    .position(|o| !o.intersection(*b).is_empty())
                    .unwrap_or(0);
                return Err(Error::OverlappingAllocation(j, i));
            }
            seen = seen.union(*b);
        }
        Ok(Allocation(bundles))
    }

    pub fn empty(players: usize) -> Self {
        Allocation(vec![Bundle::EMPTY; players])
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.0
    }

    pub fn bundle(&self, player: usize) -> Bundle {
        self.0[player]
    }

    pub fn allocated(&self) -> Bundle {
        self.0.iter().fold(Bundle::EMPTY, |acc, b| acc.union(*b))
    }

    pub fn welfare(&self, instance: &Instance) -> i64 {
        self.0
            .iter()
            .zip(instance.players())
            .map(|(b, v)| v.value(*b) as i64)
            .sum()
    }
}

/// Labelled items and one valuation per player over the same items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    items: Vec<String>,
    players: Vec<Valuation>,
}

impl Instance {
    pub fn new(items: Vec<String>, players: Vec<Valuation>) -> Result<Self> {
        Self::with_value_cap(items, players, DEFAULT_VMAX)
    }

    pub fn with_value_cap(items: Vec<String>, players: Vec<Valuation>, cap: u32) -> Result<Self> {
        check_items(items.len())?;
        if players.is_empty() {
            return Err(Error::NoPlayers);
        }
        for (i, label) in items.iter().enumerate() {
            if items[..i].contains(label) {
                return Err(Error::DuplicateItem(label.clone()));
            }
        }
        for v in &players {
            if v.items() != items.len() {
                return Err(Error::UniverseMismatch {
                    expected: items.len(),
                    found: v.items(),
                });
            }
            validate(v).map_err(Error::InvalidValuation)?;
            let value = v.max_value();
            if value > cap {
                return Err(Error::ValueAboveCap { value, cap });
            }
        }
        Ok(Instance { items, players })
    }

    /// Items labelled `a`, `b`, ... (then `i26`, `i27`, ...).
    pub fn with_default_labels(players: Vec<Valuation>) -> Result<Self> {
        let m = players.first().map(|v| v.items()).unwrap_or(0);
        Self::new(default_labels(m), players)
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn players(&self) -> &[Valuation] {
        &self.players
    }

    pub fn player(&self, i: usize) -> &Valuation {
        &self.players[i]
    }

    pub fn all_items(&self) -> Bundle {
        Bundle::full(self.items.len())
    }

    pub fn max_value(&self) -> u32 {
        self.players.iter().map(Valuation::max_value).max().unwrap_or(0)
    }

    pub fn zero_price(&self) -> PriceVector {
        PriceVector::zeros(self.items.len())
    }

    pub fn label(&self, item: usize) -> &str {
        &self.items[item]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.items
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownItem(label.to_string()))
    }

    pub fn labels(&self, b: Bundle) -> Vec<String> {
        b.items().map(|i| self.items[i].clone()).collect()
    }

    pub fn bundle_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Bundle> {
        labels
            .iter()
            .try_fold(Bundle::EMPTY, |b, l| Ok(b.with(self.index_of(l.as_ref())?)))
    }

    /// Comma-joined labels in item order; `""` for the empty bundle.
    pub fn bundle_key(&self, b: Bundle) -> String {
        self.labels(b).join(",")
    }

    pub fn parse_bundle_key(&self, key: &str) -> Result<Bundle> {
        if key.is_empty() {
            return Ok(Bundle::EMPTY);
        }
        let labels: Vec<&str> = key.split(',').map(str::trim).collect();
        self.bundle_of(&labels)
    }

    pub fn check_price(&self, p: &PriceVector) -> Result<()> {
        if p.len() != self.items.len() {
            return Err(Error::PriceLength {
                expected: self.items.len(),
                found: p.len(),
            });
        }
        Ok(())
    }

    /// Same items, a subset of the players.
    pub fn restrict_players(&self, keep: &[usize]) -> Result<Instance> {
        Instance::with_value_cap(
            self.items.clone(),
            keep.iter().map(|&i| self.players[i].clone()).collect(),
            u32::MAX,
        )
    }
}

pub fn default_labels(m: usize) -> Vec<String> {
    (0..m)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("i{i}")
            }
        })
        .collect()
}
