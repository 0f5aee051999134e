//! Random instances for property suites.
//!
//! All generators take a caller-supplied RNG so suites are reproducible
//! from a seed.

use rand::Rng;

use crate::model::{Bundle, Instance, PriceVector, TruncationSpec, Valuation};

/// Size and value limits for generated instances.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_items: usize,
    pub max_players: usize,
    pub max_value: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_items: 6,
            max_players: 4,
            max_value: 8,
        }
    }
}

/// Unit-demand, additive or assignment valuation; always gross substitutes.
pub fn gs_valuation<R: Rng + ?Sized>(rng: &mut R, items: usize, max_value: u32) -> Valuation {
    fn values<R: Rng + ?Sized>(rng: &mut R, items: usize, max_value: u32) -> Vec<u32> {
        (0..items).map(|_| rng.gen_range(0..=max_value)).collect()
    }
    match rng.gen_range(0..3) {
        0 => Valuation::unit_demand(values(rng, items, max_value)).expect("in range"),
        1 => Valuation::additive(values(rng, items, max_value)).expect("in range"),
        _ => {
            let slots = rng.gen_range(1..=items.clamp(1, 3));
            let weights: Vec<Vec<u32>> =
                (0..slots).map(|_| values(rng, items, max_value)).collect();
            Valuation::assignment(items, &weights).expect("in range")
        }
    }
}

pub fn gs_instance<R: Rng + ?Sized>(rng: &mut R, limits: Limits) -> Instance {
    let m = rng.gen_range(1..=limits.max_items);
    let n = rng.gen_range(1..=limits.max_players);
    let players = (0..n).map(|_| gs_valuation(rng, m, limits.max_value)).collect();
    Instance::with_value_cap(crate::model::default_labels(m), players, u32::MAX)
        .expect("generated instance is valid")
}

/// Singleton values for a `(2, M)`-truncation whose pairs all sum to at
/// least `M`: every value in `[ceil(M/2), M]`, except possibly one lower
/// item that still reaches `M` with each of the others.
pub fn ggs2_singletons<R: Rng + ?Sized>(rng: &mut R, items: usize, m_value: u32) -> Vec<u32> {
    let half = m_value.div_ceil(2);
    let mut values: Vec<u32> = (0..items).map(|_| rng.gen_range(half..=m_value)).collect();
    if items >= 2 && rng.gen_bool(0.4) {
        let low = rng.gen_range(0..items);
        let floor = values
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != low)
            .map(|(_, &v)| m_value - v)
            .max()
            .unwrap_or(0);
        if floor < half {
            values[low] = rng.gen_range(floor..half);
        }
    }
    values
}

pub fn ggs2_valuation<R: Rng + ?Sized>(rng: &mut R, items: usize, m_value: u32) -> Valuation {
    let singletons = ggs2_singletons(rng, items, m_value);
    Valuation::truncation(TruncationSpec {
        base: Valuation::unit_demand(singletons).expect("in range"),
        k: 2,
        m_value,
    })
    .expect("singletons do not exceed M")
}

/// Players share a common `M` drawn from `1..=max_value`.
pub fn ggs2_instance<R: Rng + ?Sized>(rng: &mut R, limits: Limits) -> Instance {
    let m = rng.gen_range(1..=limits.max_items);
    let n = rng.gen_range(1..=limits.max_players);
    let m_value = rng.gen_range(1..=limits.max_value);
    let players = (0..n).map(|_| ggs2_valuation(rng, m, m_value)).collect();
    Instance::with_value_cap(crate::model::default_labels(m), players, u32::MAX)
        .expect("generated instance is valid")
}

/// Arbitrary monotone table: each bundle is worth the best of its
/// one-smaller subsets plus a random increment. Usually not GS.
pub fn monotone_table<R: Rng + ?Sized>(rng: &mut R, items: usize, max_step: u32) -> Valuation {
    let mut values = vec![0u32; 1 << items];
    for b in Bundle::all(items).skip(1) {
        let floor = b.items().map(|j| values[b.without(j).index()]).max().unwrap_or(0);
        values[b.index()] = floor + rng.gen_range(0..=max_step);
    }
    Valuation::table(items, values).expect("monotone by construction")
}

/// Any of the classes above, including non-GS tables and truncations.
pub fn mixed_instance<R: Rng + ?Sized>(rng: &mut R, limits: Limits) -> Instance {
    let m = rng.gen_range(1..=limits.max_items);
    let n = rng.gen_range(1..=limits.max_players);
    let m_value = rng.gen_range(1..=limits.max_value);
    let players = (0..n)
        .map(|_| match rng.gen_range(0..3) {
            0 => gs_valuation(rng, m, limits.max_value),
            1 => ggs2_valuation(rng, m, m_value),
            _ => monotone_table(rng, m, limits.max_value.div_ceil(2)),
        })
        .collect();
    Instance::with_value_cap(crate::model::default_labels(m), players, u32::MAX)
        .expect("generated instance is valid")
}

pub fn price<R: Rng + ?Sized>(rng: &mut R, items: usize, max: u32) -> PriceVector {
    PriceVector::new((0..items).map(|_| rng.gen_range(0..=max)).collect())
}
