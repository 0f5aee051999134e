//! Ascending auction for `(2, M)`-truncated valuations.
//!
//! Each round either takes one step of the unit-demand auction induced on
//! the small players (those demanding singletons only), or matches players
//! to single items and hands disjoint pairs of minimum-price items to the
//! rest. When too few such items remain, every minimum-price item gets
//! dearer.

pub mod matching;

use crate::auctions::{iteration_cap, AuctionTrace, StepKind};
use crate::demand::{self, DemandReport};
use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance, PriceVector, Valuation};
use crate::oracle::{self, WalrasianCertificate};

pub use matching::{max_matching, max_matching_avoiding, DemandGraph, MatchingResult};

/// Players split by their demand restricted to bundles of size at most two.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlayerClass {
    /// Only singletons demanded.
    pub small: Vec<usize>,
    /// Some pair demanded.
    pub pair_players: Vec<usize>,
    /// The empty bundle is demanded; these players are left out.
    pub empty_demand: Vec<usize>,
}

/// Common `M` of the instance, or `None` with a single item.
///
/// Every bundle of two or more items is worth the same `M` for every
/// player, and any two singleton values sum to at least `M`. The second
/// condition is what a gross-substitute completion needs: it is submodular
/// on pairs, and the additive one works whenever the condition holds.
pub fn common_m(instance: &Instance) -> Result<Option<u32>> {
    let m = instance.item_count();
    if m < 2 {
        return Ok(None);
    }
    let target = instance.player(0).value(Bundle::full(2));
    for (i, v) in instance.players().iter().enumerate() {
        let fail = |reason: String| Error::NotGgs2Instance { player: i, reason };
        if let Some(b) = Bundle::all(m).find(|b| b.len() >= 2 && v.value(*b) != target) {
            return Err(fail(format!(
                "value {} on {:?} differs from M = {target}",
                v.value(b),
                b
            )));
        }
        let single = |j: usize| v.value(Bundle::singleton(j));
        for x in 0..m {
            for y in x + 1..m {
                if single(x) + single(y) < target {
                    return Err(fail(format!(
                        "singletons {x} and {y} sum to {} < M = {target}",
                        single(x) + single(y)
                    )));
                }
            }
        }
    }
    Ok(Some(target))
}

pub fn classify_players(instance: &Instance, p: &PriceVector) -> Result<PlayerClass> {
    common_m(instance)?;
    Ok(classify_reports(&demand::instance_demand(instance, p)))
}

fn classify_reports(reports: &[DemandReport]) -> PlayerClass {
    let mut class = PlayerClass::default();
    for (i, r) in reports.iter().enumerate() {
        if r.contains(Bundle::EMPTY) {
            class.empty_demand.push(i);
        } else if r.demand.iter().any(|b| b.len() == 2) {
            class.pair_players.push(i);
        } else {
            class.small.push(i);
        }
    }
    class
}

/// Minimum-price items, and when there is exactly one of them, the
/// minimum-price items among the others.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinItems {
    pub min: Bundle,
    pub min2: Bundle,
}

pub fn min_items(p: &PriceVector) -> MinItems {
    let lowest = |skip: Bundle| {
        let rest: Vec<usize> = (0..p.len()).filter(|&j| !skip.contains(j)).collect();
        match rest.iter().map(|&j| p.get(j)).min() {
            Some(low) => Bundle::from_items(rest.into_iter().filter(|&j| p.get(j) == low)),
            None => Bundle::EMPTY,
        }
    };
    let min = lowest(Bundle::EMPTY);
    let min2 = if min.len() == 1 { lowest(min) } else { Bundle::EMPTY };
    MinItems { min, min2 }
}

/// Unit-demand instance on the small players, with their singleton values.
fn induced_instance(instance: &Instance, small: &[usize]) -> Result<Instance> {
    let m = instance.item_count();
    let players = small
        .iter()
        .map(|&i| {
            let v = instance.player(i);
            Valuation::unit_demand((0..m).map(|j| v.value(Bundle::singleton(j))).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::with_value_cap(instance.items().to_vec(), players, u32::MAX)
}

/// `O*` of the unit-demand auction induced on the small players.
pub fn induced_gs_step(instance: &Instance, p: &PriceVector) -> Result<Bundle> {
    let class = classify_players(instance, p)?;
    Ok(induced_obstacle(instance, p, &class.small)?.0)
}

fn induced_obstacle(instance: &Instance, p: &PriceVector, small: &[usize]) -> Result<(Bundle, i64)> {
    if small.is_empty() {
        return Err(Error::NoObstacle);
    }
    let induced = induced_instance(instance, small)?;
    let obstacle = demand::over_demanded_set(&induced, p);
    if obstacle.o_star.is_empty() {
        return Err(Error::NoObstacle);
    }
    Ok((obstacle.o_star, obstacle.f_value))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ggs2Outcome {
    pub trace: AuctionTrace,
    /// Allocation assembled at the stopping price: matched singletons,
    /// disjoint pairs of unmatched minimum-price items, and leftover priced
    /// items for players who also demand the empty bundle.
    pub auction_allocation: Allocation,
    /// Certificate for the auction's own allocation if it is valid;
    /// otherwise for an allocation found by search at the same price.
    pub certificate: WalrasianCertificate,
    /// Whether the auction's own allocation was already Walrasian.
    pub auction_allocation_walrasian: bool,
}

/// Which set is raised when too few minimum-price items remain.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum MinRaiseRule {
    /// All minimum-price items, as the auction is stated.
    #[default]
    AllMin,
    /// The over-demanded set `O*` of the whole instance when it is
    /// nonempty, otherwise all minimum-price items.
    ObstacleFirst,
}

/// Runs the auction from zero prices and certifies its stopping point.
/// `budget` bounds the welfare enumeration used for the certificate.
pub fn ggs2_auction(instance: &Instance, budget: u64) -> Result<Ggs2Outcome> {
    ggs2_auction_with(instance, budget, MinRaiseRule::AllMin)
}

pub fn ggs2_auction_with(instance: &Instance, budget: u64, rule: MinRaiseRule) -> Result<Ggs2Outcome> {
    common_m(instance)?;
    let cap = iteration_cap(instance);
    let mut trace = AuctionTrace::new("ggs2", instance);
    let allocation = loop {
        if trace.steps.len() >= cap {
            return Err(trace.cap_exceeded(cap));
        }
        let p = trace.final_price.clone();
        let reports = demand::instance_demand(instance, &p);
        let class = classify_reports(&reports);
        let m = instance.item_count();
        let graph = DemandGraph::from_demand(&reports, &class.small, m);
        if max_matching(&graph, &class.small).is_err() {
            let (o_star, f_value) = induced_obstacle(instance, &p, &class.small)?;
            trace.push(instance, o_star, f_value, StepKind::Induced);
            continue;
        }
        let mins = min_items(&p);
        let mut active = class.small.clone();
        active.extend(&class.pair_players);
        let graph = DemandGraph::from_demand(&reports, &active, m);
        let matching = max_matching_avoiding(&graph, &class.small, mins.min)?;
        let free_min: Vec<usize> = matching.unmatched_items.intersection(mins.min).items().collect();
        let n_prime = matching.unmatched_players.len();
        let m_prime = free_min.len();
        if 2 * n_prime <= m_prime {
            let mut bundles = vec![Bundle::EMPTY; instance.player_count()];
            for &(i, x) in &matching.pairs {
                bundles[i] = Bundle::singleton(x);
            }
            for (k, &i) in matching.unmatched_players.iter().enumerate() {
                bundles[i] = Bundle::from_items([free_min[2 * k], free_min[2 * k + 1]]);
            }
            hand_out_leftovers(&reports, &p, &class.empty_demand, &mut bundles);
            break Allocation::new(bundles)?;
        }
        let excess = 2 * n_prime as i64 - m_prime as i64;
        if rule == MinRaiseRule::ObstacleFirst {
            let obstacle = demand::obstacle_from_reports(&reports, m);
            if !obstacle.o_star.is_empty() {
                trace.push(instance, obstacle.o_star, obstacle.f_value, StepKind::Obstacle);
                continue;
            }
        }
        trace.push(instance, mins.min, excess, StepKind::MinRaise);
    };
    trace.terminated = true;
    let p = trace.final_price.clone();
    let w = oracle::max_welfare(instance, budget)?.value;
    let own = oracle::certify(instance, &p, &allocation, w);
    let auction_allocation_walrasian = own.is_valid();
    let certificate = if auction_allocation_walrasian {
        own
    } else {
        oracle::is_walrasian_with(instance, &p, w).unwrap_or(own)
    };
    Ok(Ggs2Outcome {
        trace,
        auction_allocation: allocation,
        certificate,
        auction_allocation_walrasian,
    })
}

/// Gives unallocated positive-price items to players who demand the empty
/// bundle and, at zero utility, that single item as well.
fn hand_out_leftovers(
    reports: &[DemandReport],
    p: &PriceVector,
    empty_demand: &[usize],
    bundles: &mut [Bundle],
) {
    let taken = bundles.iter().fold(Bundle::EMPTY, |acc, &b| acc.union(b));
    let leftover = Bundle::from_items((0..p.len()).filter(|&j| p.get(j) > 0 && !taken.contains(j)));
    if leftover.is_empty() || empty_demand.is_empty() {
        return;
    }
    let mut graph = DemandGraph::from_demand(reports, empty_demand, p.len());
    for adj in &mut graph.adjacency {
        *adj = adj.intersection(leftover);
    }
    let matching = max_matching(&graph, &[]).expect("nothing must be matched");
    for (i, x) in matching.pairs {
        bundles[i] = Bundle::singleton(x);
    }
}

/// Ways the domination argument can fail on concrete data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenDomViolation {
    NotDominated { item: usize },
    NotEnvyFree { player: usize },
    /// `L(p) > L(p*)`, impossible when `p ≤ p*` and the allocation is envy-free.
    LyapunovAbove { at_p: i64, at_p_star: i64 },
    /// `L(p) < L(p*)`, impossible when `p*` is Walrasian.
    LyapunovBelow { at_p: i64, at_p_star: i64 },
}

/// Checks `L(p) ≤ L(p*)` with equality for an envy-free allocation at
/// `p ≤ p*`, which makes `p` a Walrasian price.
pub fn gen_dom_check(
    instance: &Instance,
    p: &PriceVector,
    p_star: &PriceVector,
    alloc: &Allocation,
) -> std::result::Result<(), GenDomViolation> {
    if let Some(item) = (0..p.len()).find(|&j| p.get(j) > p_star.get(j)) {
        return Err(GenDomViolation::NotDominated { item });
    }
    let reports = demand::instance_demand(instance, p);
    if let Some(player) = (0..reports.len()).find(|&i| !reports[i].contains(alloc.bundle(i))) {
        return Err(GenDomViolation::NotEnvyFree { player });
    }
    let at_p = demand::lyapunov(instance, p);
    let at_p_star = demand::lyapunov(instance, p_star);
    match at_p.cmp(&at_p_star) {
        std::cmp::Ordering::Greater => Err(GenDomViolation::LyapunovAbove { at_p, at_p_star }),
        std::cmp::Ordering::Less => Err(GenDomViolation::LyapunovBelow { at_p, at_p_star }),
        std::cmp::Ordering::Equal => Ok(()),
    }
}
