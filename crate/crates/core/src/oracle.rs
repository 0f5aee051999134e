//! Brute-force ground truth: winner determination, envy-free allocation
//! search, Walrasian certificates and minimal Walrasian prices.
//!
//! Nothing here relies on gross substitutes; every answer comes from
//! exhaustive enumeration under an explicit budget.

use crate::demand::{self, DemandReport};
use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance, PriceVector};

/// Default enumeration budget shared by the oracle and the grid checks.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WelfareResult {
    pub value: i64,
    pub allocation: Allocation,
}

/// Enumerates every map from items to players or "unassigned":
/// `(n + 1)^m` allocations.
pub fn max_welfare(instance: &Instance, budget: u64) -> Result<WelfareResult> {
    let n = instance.player_count();
    let m = instance.item_count();
    let units = (n as u128 + 1).pow(m as u32);
    if units > budget as u128 {
        return Err(Error::BudgetExceeded { units, budget });
    }
    let mut search = WelfareSearch {
        instance,
        bundles: vec![Bundle::EMPTY; n],
        best: -1,
        best_bundles: vec![Bundle::EMPTY; n],
    };
    search.assign(0);
    Ok(WelfareResult {
        value: search.best,
        allocation: Allocation::new(search.best_bundles)?,
    })
}

struct WelfareSearch<'a> {
    instance: &'a Instance,
    bundles: Vec<Bundle>,
    best: i64,
    best_bundles: Vec<Bundle>,
}

impl WelfareSearch<'_> {
    fn assign(&mut self, item: usize) {
        if item == self.instance.item_count() {
            let value: i64 = self
                .bundles
                .iter()
                .zip(self.instance.players())
                .map(|(&b, v)| i64::from(v.value(b)))
                .sum();
            if value > self.best {
                self.best = value;
                self.best_bundles.clone_from(&self.bundles);
            }
            return;
        }
        self.assign(item + 1);
        for i in 0..self.bundles.len() {
            self.bundles[i] = self.bundles[i].with(item);
            self.assign(item + 1);
            self.bundles[i] = self.bundles[i].without(item);
        }
    }
}

/// First envy-free allocation in a fixed order (players by index, each
/// trying its demand sets in decreasing bitmask order), or `None`.
pub fn envy_free_exists(instance: &Instance, p: &PriceVector) -> Option<Allocation> {
    let reports = demand::instance_demand(instance, p);
    search_allocation(&reports, Bundle::EMPTY)
}

/// Envy-free allocation whose union contains `required`.
pub fn search_allocation(reports: &[DemandReport], required: Bundle) -> Option<Allocation> {
    // reach[i]: items some player from i on could still take
    let mut reach = vec![Bundle::EMPTY; reports.len() + 1];
    for i in (0..reports.len()).rev() {
        let own = reports[i]
            .demand
            .iter()
            .fold(Bundle::EMPTY, |acc, &b| acc.union(b));
        reach[i] = reach[i + 1].union(own);
    }
    let mut chosen = Vec::with_capacity(reports.len());
    if backtrack(reports, &reach, required, Bundle::EMPTY, &mut chosen) {
        Some(Allocation::new(chosen).expect("disjoint by construction"))
    } else {
        None
    }
}

fn backtrack(
    reports: &[DemandReport],
    reach: &[Bundle],
    required: Bundle,
    used: Bundle,
    chosen: &mut Vec<Bundle>,
) -> bool {
    let i = chosen.len();
    let missing = required.difference(used);
    if i == reports.len() {
        return missing.is_empty();
    }
    if !missing.is_subset(reach[i]) {
        return false;
    }
    for &b in reports[i].demand.iter().rev() {
        if b.intersection(used).is_empty() {
            chosen.push(b);
            if backtrack(reports, reach, required, used.union(b), chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Everything needed to check that `price` is Walrasian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalrasianCertificate {
    pub price: PriceVector,
    pub allocation: Allocation,
    /// Every player receives one of its demand sets.
    pub envy_free: bool,
    /// Every item of positive price is allocated.
    pub coverage: bool,
    /// `L(price) = W*`.
    pub bm_equality: bool,
    pub lyapunov: i64,
    pub max_welfare: i64,
}

impl WalrasianCertificate {
    pub fn is_valid(&self) -> bool {
        self.envy_free && self.coverage && self.bm_equality
    }
}

/// Certificate for a given allocation, valid or not.
pub fn certify(
    instance: &Instance,
    p: &PriceVector,
    allocation: &Allocation,
    max_welfare: i64,
) -> WalrasianCertificate {
    let reports = demand::instance_demand(instance, p);
    let envy_free = reports
        .iter()
        .zip(allocation.bundles())
        .all(|(r, &b)| r.contains(b));
    let unallocated = instance.all_items().difference(allocation.allocated());
    let coverage = unallocated.items().all(|j| p.get(j) == 0);
    let lyapunov = demand::lyapunov(instance, p);
    WalrasianCertificate {
        price: p.clone(),
        allocation: allocation.clone(),
        envy_free,
        coverage,
        bm_equality: lyapunov == max_welfare,
        lyapunov,
        max_welfare,
    }
}

/// Searches an envy-free allocation covering all positive-price items.
///
/// # Panics
/// If such an allocation exists while `L(p) != W*`; that would contradict
/// the Bikhchandani-Mamer characterization and indicates a bug.
pub fn is_walrasian(
    instance: &Instance,
    p: &PriceVector,
    budget: u64,
) -> Result<Option<WalrasianCertificate>> {
    instance.check_price(p)?;
    let w = max_welfare(instance, budget)?.value;
    Ok(is_walrasian_with(instance, p, w))
}

/// [`is_walrasian`] with a precomputed `W*`.
pub fn is_walrasian_with(
    instance: &Instance,
    p: &PriceVector,
    max_welfare: i64,
) -> Option<WalrasianCertificate> {
    let reports = demand::instance_demand(instance, p);
    let positive = Bundle::from_items((0..p.len()).filter(|&j| p.get(j) > 0));
    let allocation = search_allocation(&reports, positive)?;
    let cert = certify(instance, p, &allocation, max_welfare);
    assert!(
        cert.bm_equality,
        "Walrasian allocation with L(p) = {} != W* = {}",
        cert.lyapunov, cert.max_welfare
    );
    Some(cert)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalWalrasian {
    /// Lexicographically smallest of the minimal Walrasian prices.
    pub price: PriceVector,
    /// All coordinatewise-minimal Walrasian prices, in lexicographic order.
    pub minimal: Vec<PriceVector>,
    pub certificate: WalrasianCertificate,
}

impl MinimalWalrasian {
    pub fn unique(&self) -> bool {
        self.minimal.len() == 1
    }
}

/// Outcome of the price enumeration, kept even when no Walrasian price exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceSearch {
    pub result: Option<MinimalWalrasian>,
    pub max_welfare: i64,
    /// Smallest `L(p)` over the enumerated grid.
    pub min_lyapunov: i64,
    pub grid_points: u128,
}

/// Per-item price ceilings: `min(bound, largest marginal value of the item)`.
/// No Walrasian price exceeds the marginal value of its item to its holder,
/// and unallocated items are priced 0.
pub fn price_ceilings(instance: &Instance, bound: u32) -> Vec<u32> {
    (0..instance.item_count())
        .map(|j| {
            let top = instance
                .players()
                .iter()
                .map(|v| v.max_marginal(j))
                .max()
                .unwrap_or(0);
            top.min(bound)
        })
        .collect()
}

/// Coordinatewise-minimal Walrasian price with every coordinate at most `bound`.
pub fn minimal_walrasian_price(
    instance: &Instance,
    bound: u32,
    budget: u64,
) -> Result<Option<MinimalWalrasian>> {
    Ok(walrasian_price_search(instance, bound, budget)?.result)
}

/// Enumerates the price grid below the ceilings, filters by `L(p) = W*` and
/// confirms each survivor with an explicit allocation.
pub fn walrasian_price_search(instance: &Instance, bound: u32, budget: u64) -> Result<PriceSearch> {
    let ceilings = price_ceilings(instance, bound);
    let grid_points: u128 = ceilings.iter().map(|&c| c as u128 + 1).product();
    if grid_points > budget as u128 {
        return Err(Error::BudgetExceeded {
            units: grid_points,
            budget,
        });
    }
    let w = max_welfare(instance, budget)?.value;
    let m = instance.item_count();
    let mut p = vec![0u32; m];
    let mut min_lyapunov = i64::MAX;
    let mut minimal: Vec<(PriceVector, WalrasianCertificate)> = Vec::new();
    loop {
        let price = PriceVector::new(p.clone());
        let l = demand::lyapunov(instance, &price);
        min_lyapunov = min_lyapunov.min(l);
        // anything dominating an earlier hit is not minimal; earlier hits
        // precede it lexicographically
        if l == w && !minimal.iter().any(|(q, _)| q.dominated_by(&price)) {
            let cert = is_walrasian_with(instance, &price, w)
                .expect("L(p) = W* implies a Walrasian allocation");
            minimal.push((price, cert));
        }
        if !advance(&mut p, &ceilings) {
            break;
        }
    }
    let result = if minimal.is_empty() {
        None
    } else {
        let certificate = minimal[0].1.clone();
        Some(MinimalWalrasian {
            price: minimal[0].0.clone(),
            minimal: minimal.into_iter().map(|(p, _)| p).collect(),
            certificate,
        })
    };
    Ok(PriceSearch {
        result,
        max_welfare: w,
        min_lyapunov,
        grid_points,
    })
}

/// Lexicographic successor with the last coordinate varying fastest.
fn advance(p: &mut [u32], ceilings: &[u32]) -> bool {
    for j in (0..p.len()).rev() {
        if p[j] < ceilings[j] {
            p[j] += 1;
            return true;
        }
        p[j] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demos::{ggs2_not_gs_valuation, five_player_instance, two_bidders_one_item};
    use crate::model::Valuation;

    fn price(v: &[u32]) -> PriceVector {
        PriceVector::new(v.to_vec())
    }

    #[test]
    fn welfare_examples() {
        assert_eq!(max_welfare(&two_bidders_one_item(), 100).unwrap().value, 5);
        let zero = Instance::with_default_labels(vec![Valuation::zero(3).unwrap(); 2]).unwrap();
        assert_eq!(max_welfare(&zero, 100).unwrap().value, 0);
        let inst = Instance::with_default_labels(vec![
            Valuation::unit_demand(vec![4, 3]).unwrap(),
            Valuation::unit_demand(vec![5, 1]).unwrap(),
        ])
        .unwrap();
        let w = max_welfare(&inst, 100).unwrap();
        assert_eq!(w.value, 8);
        assert_eq!(w.allocation.welfare(&inst), 8);
    }

    #[test]
    fn welfare_budget() {
        assert!(matches!(
            max_welfare(&two_bidders_one_item(), 2),
            Err(Error::BudgetExceeded { units: 3, budget: 2 })
        ));
    }

    #[test]
    fn five_player_has_no_envy_free_allocation() {
        let inst = five_player_instance();
        assert!(envy_free_exists(&inst, &inst.zero_price()).is_none());
    }

    #[test]
    fn envy_free_examples() {
        let inst = two_bidders_one_item();
        let alloc = envy_free_exists(&inst, &price(&[5])).unwrap();
        assert_eq!(alloc.bundles(), &[Bundle::singleton(0), Bundle::EMPTY]);
        let positive = search_allocation(
            &demand::instance_demand(&inst, &price(&[5])),
            Bundle::singleton(0),
        )
        .unwrap();
        assert_eq!(positive.allocated(), Bundle::singleton(0));
        assert!(envy_free_exists(&inst, &price(&[0])).is_none());
        let all_empty = envy_free_exists(&inst, &price(&[9])).unwrap();
        assert_eq!(all_empty.allocated(), Bundle::EMPTY);
    }

    #[test]
    fn walrasian_examples() {
        let inst = two_bidders_one_item();
        let cert = is_walrasian(&inst, &price(&[5]), 100).unwrap().unwrap();
        assert!(cert.is_valid());
        assert_eq!((cert.lyapunov, cert.max_welfare), (5, 5));
        assert!(is_walrasian(&inst, &price(&[4]), 100).unwrap().is_none());
        let zero = Instance::with_default_labels(vec![Valuation::zero(2).unwrap()]).unwrap();
        let cert = is_walrasian(&zero, &zero.zero_price(), 100).unwrap().unwrap();
        assert!(cert.is_valid());
        assert_eq!(cert.lyapunov, 0);
    }

    #[test]
    fn certify_flags_each_failure() {
        let inst = two_bidders_one_item();
        let empty = Allocation::empty(2);
        let cert = certify(&inst, &price(&[5]), &empty, 5);
        assert!(cert.envy_free && !cert.coverage && cert.bm_equality);
        let cert = certify(&inst, &price(&[3]), &empty, 5);
        assert!(!cert.envy_free && !cert.bm_equality);
    }

    #[test]
    fn minimal_price_examples() {
        let found = minimal_walrasian_price(&two_bidders_one_item(), 6, 1000)
            .unwrap()
            .unwrap();
        assert_eq!(found.price, price(&[5]));
        assert!(found.unique());

        let zero = Instance::with_default_labels(vec![Valuation::zero(3).unwrap()]).unwrap();
        let found = minimal_walrasian_price(&zero, 4, 1000).unwrap().unwrap();
        assert_eq!(found.price, price(&[0, 0, 0]));

        let lone = Instance::with_default_labels(vec![ggs2_not_gs_valuation()]).unwrap();
        let found = minimal_walrasian_price(&lone, 5, 1000).unwrap().unwrap();
        assert_eq!(found.price, price(&[0, 0, 0]));
    }

    #[test]
    fn minimal_price_budget() {
        let inst = five_player_instance();
        assert!(matches!(
            minimal_walrasian_price(&inst, 2, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn no_walrasian_price_outside_gs() {
        // complements: one bidder wants the pair only, the other either item
        let pair = Valuation::from_fn(2, |b| if b.len() == 2 { 3 } else { 0 }).unwrap();
        let single = Valuation::unit_demand(vec![2, 2]).unwrap();
        let inst = Instance::with_default_labels(vec![pair, single]).unwrap();
        let search = walrasian_price_search(&inst, 10, 10_000).unwrap();
        assert!(search.result.is_none());
        assert!(search.min_lyapunov > search.max_welfare);
    }

    #[test]
    fn lyapunov_never_below_welfare() {
        let inst = Instance::with_default_labels(vec![
            Valuation::additive(vec![2, 3]).unwrap(),
            Valuation::unit_demand(vec![4, 4]).unwrap(),
        ])
        .unwrap();
        let search = walrasian_price_search(&inst, 8, 10_000).unwrap();
        assert_eq!(search.min_lyapunov, search.max_welfare);
        assert!(search.result.is_some());
    }
}
