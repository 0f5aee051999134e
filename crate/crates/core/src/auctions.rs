//! Ascending auctions for gross-substitutes valuations.
//!
//! All engines start at zero prices and raise prices by one on a chosen set
//! of items per step. The obstacle-driven engines raise (part of) the minimal
//! most over-demanded set `O*`; Ausubel's ascending form raises the minimal
//! minimizer of `L(p + 1_S)`. Inputs outside GS are allowed to run; the
//! trace records anomalies instead of rejecting them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::demand::{self, ObstacleReport};
use crate::error::{Error, Result};
use crate::model::{Bundle, Instance, PriceVector};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Raise inside the over-demanded set.
    Obstacle,
    /// Raise the minimal minimizer of `L(p + 1_S)`.
    Minimizer,
    /// One step of the unit-demand auction induced on small players.
    Induced,
    /// Raise every item of minimum price.
    MinRaise,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Obstacle => "obstacle",
            StepKind::Minimizer => "minimizer",
            StepKind::Induced => "induced",
            StepKind::MinRaise => "min-raise",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuctionStep {
    pub t: usize,
    pub price_before: PriceVector,
    pub raised: Bundle,
    pub lyapunov_before: i64,
    /// Over-demand measure that justified the raise; its meaning depends on `kind`.
    pub f_value: i64,
    pub kind: StepKind,
}

/// Something a GS run would never do.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Anomaly {
    /// Several inclusion-minimal maximizers of `f`; the lexicographic one was used.
    NonUniqueObstacle { t: usize },
    /// Several minimal minimizers of equal size; the lexicographic one was used.
    MinimizerTie { t: usize },
    /// The Lyapunov did not strictly drop across a step.
    LyapunovNotDecreasing { t: usize, before: i64, after: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuctionTrace {
    pub algorithm: String,
    pub steps: Vec<AuctionStep>,
    pub final_price: PriceVector,
    pub final_lyapunov: i64,
    pub terminated: bool,
    pub iteration_cap_hit: bool,
    pub anomalies: Vec<Anomaly>,
}

impl AuctionTrace {
    pub(crate) fn new(algorithm: &str, instance: &Instance) -> Self {
        let p = instance.zero_price();
        AuctionTrace {
            algorithm: algorithm.to_string(),
            steps: Vec::new(),
            final_lyapunov: demand::lyapunov(instance, &p),
            final_price: p,
            terminated: false,
            iteration_cap_hit: false,
            anomalies: Vec::new(),
        }
    }

    /// Every price visited, including the final one.
    pub fn prices(&self) -> impl Iterator<Item = &PriceVector> {
        self.steps
            .iter()
            .map(|s| &s.price_before)
            .chain(std::iter::once(&self.final_price))
    }

    /// Sequence of raised sets.
    pub fn raised_sets(&self) -> Vec<Bundle> {
        self.steps.iter().map(|s| s.raised).collect()
    }

    /// Same prices and raise sets at every step.
    pub fn same_path(&self, other: &AuctionTrace) -> bool {
        self.final_price == other.final_price
            && self.steps.len() == other.steps.len()
            && self
                .steps
                .iter()
                .zip(&other.steps)
                .all(|(a, b)| a.price_before == b.price_before && a.raised == b.raised)
    }

    /// Applies a raise and records it.
    pub(crate) fn push(
        &mut self,
        instance: &Instance,
        raised: Bundle,
        f_value: i64,
        kind: StepKind,
    ) {
        let t = self.steps.len();
        let before = self.final_lyapunov;
        let price_before = self.final_price.clone();
        self.final_price.raise(raised);
        self.final_lyapunov = demand::lyapunov(instance, &self.final_price);
        if self.final_lyapunov >= before {
            self.anomalies.push(Anomaly::LyapunovNotDecreasing {
                t,
                before,
                after: self.final_lyapunov,
            });
        }
        self.steps.push(AuctionStep {
            t,
            price_before,
            raised,
            lyapunov_before: before,
            f_value,
            kind,
        });
    }

    pub(crate) fn cap_exceeded(mut self, cap: usize) -> Error {
        self.iteration_cap_hit = true;
        Error::IterationCapExceeded {
            cap,
            trace: Box::new(self),
        }
    }
}

/// `n · m · Vmax` steps, with `Vmax` the largest bundle value (at least 1).
pub fn iteration_cap(instance: &Instance) -> usize {
    instance.player_count() * instance.item_count() * instance.max_value().max(1) as usize
}

/// Chooses which items of a nonempty `O*` to raise.
pub trait StepPolicy {
    fn name(&self) -> String;
    fn choose(&mut self, price: &PriceVector, obstacle: &ObstacleReport) -> Bundle;
}

/// All of `O*` (Gul-Stacchetti).
#[derive(Copy, Clone, Debug, Default)]
pub struct WholeObstacle;

impl StepPolicy for WholeObstacle {
    fn name(&self) -> String {
        "full".into()
    }

    fn choose(&mut self, _: &PriceVector, obstacle: &ObstacleReport) -> Bundle {
        obstacle.o_star
    }
}

/// The smallest-index item of `O*`.
#[derive(Copy, Clone, Debug, Default)]
pub struct LowestItem;

impl StepPolicy for LowestItem {
    fn name(&self) -> String {
        "min-index".into()
    }

    fn choose(&mut self, _: &PriceVector, obstacle: &ObstacleReport) -> Bundle {
        obstacle.o_star.first().map(Bundle::singleton).unwrap_or_default()
    }
}

/// The largest-index item of `O*`.
#[derive(Copy, Clone, Debug, Default)]
pub struct HighestItem;

impl StepPolicy for HighestItem {
    fn name(&self) -> String {
        "max-index".into()
    }

    fn choose(&mut self, _: &PriceVector, obstacle: &ObstacleReport) -> Bundle {
        obstacle.o_star.items().last().map(Bundle::singleton).unwrap_or_default()
    }
}

/// A uniformly random nonempty subset of `O*`, from a seeded generator.
#[derive(Clone, Debug)]
pub struct RandomSubset {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSubset {
    pub fn new(seed: u64) -> Self {
        RandomSubset {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl StepPolicy for RandomSubset {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn choose(&mut self, _: &PriceVector, obstacle: &ObstacleReport) -> Bundle {
        let items: Vec<usize> = obstacle.o_star.items().collect();
        if items.is_empty() {
            return Bundle::EMPTY;
        }
        loop {
            let pick = Bundle::from_items(items.iter().copied().filter(|_| self.rng.gen_bool(0.5)));
            if !pick.is_empty() {
                return pick;
            }
        }
    }
}

/// A random single item of `O*`.
#[derive(Clone, Debug)]
pub struct RandomItem {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomItem {
    pub fn new(seed: u64) -> Self {
        RandomItem {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl StepPolicy for RandomItem {
    fn name(&self) -> String {
        format!("random-item:{}", self.seed)
    }

    fn choose(&mut self, _: &PriceVector, obstacle: &ObstacleReport) -> Bundle {
        let items: Vec<usize> = obstacle.o_star.items().collect();
        items
            .choose(&mut self.rng)
            .map(|&j| Bundle::singleton(j))
            .unwrap_or_default()
    }
}

/// Generic obstacle loop: while `O*` is nonempty, raise the policy's choice.
pub fn run_with_policy(instance: &Instance, policy: &mut dyn StepPolicy) -> Result<AuctionTrace> {
    let name = format!("policy:{}", policy.name());
    run_obstacle_loop(instance, policy, &name)
}

fn run_obstacle_loop(
    instance: &Instance,
    policy: &mut dyn StepPolicy,
    algorithm: &str,
) -> Result<AuctionTrace> {
    let cap = iteration_cap(instance);
    let mut trace = AuctionTrace::new(algorithm, instance);
    loop {
        let obstacle = demand::over_demanded_set(instance, &trace.final_price);
        if obstacle.o_star.is_empty() {
            trace.terminated = true;
            return Ok(trace);
        }
        if trace.steps.len() >= cap {
            return Err(trace.cap_exceeded(cap));
        }
        let chosen = policy.choose(&trace.final_price, &obstacle);
        if chosen.is_empty() || !chosen.is_subset(obstacle.o_star) {
            return Err(Error::PolicyViolation {
                chosen,
                obstacle: obstacle.o_star,
            });
        }
        if !obstacle.unique {
            trace.anomalies.push(Anomaly::NonUniqueObstacle {
                t: trace.steps.len(),
            });
        }
        trace.push(instance, chosen, obstacle.f_value, StepKind::Obstacle);
    }
}

/// Gul-Stacchetti: raise all of `O*` while it is nonempty.
pub fn gul_stacchetti(instance: &Instance) -> Result<AuctionTrace> {
    run_obstacle_loop(instance, &mut WholeObstacle, "gs")
}

/// The finer auction: raise the smallest-index item of `O*`.
pub fn fine_auction(instance: &Instance) -> Result<AuctionTrace> {
    run_obstacle_loop(instance, &mut LowestItem, "fine")
}

/// Ausubel's ascending form: raise the minimal minimizer `S*` while nonempty.
pub fn ausubel_ascending(instance: &Instance) -> Result<AuctionTrace> {
    let cap = iteration_cap(instance);
    let mut trace = AuctionTrace::new("ausubel", instance);
    loop {
        let minimizer = demand::minimal_minimizer(instance, &trace.final_price);
        if minimizer.set.is_empty() {
            trace.terminated = true;
            return Ok(trace);
        }
        if trace.steps.len() >= cap {
            return Err(trace.cap_exceeded(cap));
        }
        if minimizer.tie_broken {
            trace.anomalies.push(Anomaly::MinimizerTie {
                t: trace.steps.len(),
            });
        }
        let f_value = demand::f(instance, &trace.final_price, minimizer.set);
        trace.push(instance, minimizer.set, f_value, StepKind::Minimizer);
    }
}

/// First visited price not dominated by `p_star`, as a step index
/// (`steps.len()` for the final price).
pub fn monitor_domination(trace: &AuctionTrace, p_star: &PriceVector) -> std::result::Result<(), usize> {
    match trace.prices().position(|p| !p.dominated_by(p_star)) {
        None => Ok(()),
        Some(t) => Err(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demos::two_bidders_one_item;
    use crate::model::Valuation;

    #[test]
    fn gs_two_bidders() {
        let inst = two_bidders_one_item();
        let trace = gul_stacchetti(&inst).unwrap();
        assert_eq!(trace.steps.len(), 5);
        assert_eq!(trace.final_price, PriceVector::new(vec![5]));
        assert!(trace.terminated);
        assert!(trace.anomalies.is_empty());
        assert_eq!(trace.final_lyapunov, 5);
    }

    #[test]
    fn gs_single_bidder_does_nothing() {
        let v = Valuation::unit_demand(vec![5]).unwrap();
        let inst = Instance::with_default_labels(vec![v]).unwrap();
        let trace = gul_stacchetti(&inst).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.final_price, PriceVector::new(vec![0]));
    }

    #[test]
    fn ausubel_matches_gs_on_two_bidders() {
        let inst = two_bidders_one_item();
        let a = ausubel_ascending(&inst).unwrap();
        let g = gul_stacchetti(&inst).unwrap();
        assert!(a.same_path(&g));
        assert_eq!(a.final_price, PriceVector::new(vec![5]));
    }

    #[test]
    fn equilibrium_start_gives_empty_traces() {
        let inst = Instance::with_default_labels(vec![
            Valuation::unit_demand(vec![3, 0]).unwrap(),
            Valuation::unit_demand(vec![0, 3]).unwrap(),
        ])
        .unwrap();
        assert!(ausubel_ascending(&inst).unwrap().steps.is_empty());
        assert!(fine_auction(&inst).unwrap().steps.is_empty());
    }

    #[test]
    fn fine_auction_single_item_steps() {
        let inst = two_bidders_one_item();
        let trace = fine_auction(&inst).unwrap();
        assert_eq!(trace.steps.len(), 5);
        assert!(trace.steps.iter().all(|s| s.raised.len() == 1));
        assert_eq!(trace.final_price, PriceVector::new(vec![5]));
    }

    #[test]
    fn policies_reproduce_named_engines() {
        let inst = Instance::with_default_labels(vec![
            Valuation::additive(vec![3, 2]).unwrap(),
            Valuation::unit_demand(vec![4, 4]).unwrap(),
            Valuation::unit_demand(vec![1, 5]).unwrap(),
        ])
        .unwrap();
        let gs = gul_stacchetti(&inst).unwrap();
        assert!(run_with_policy(&inst, &mut WholeObstacle).unwrap().same_path(&gs));
        let fine = fine_auction(&inst).unwrap();
        assert!(run_with_policy(&inst, &mut LowestItem).unwrap().same_path(&fine));
        for seed in 0..5 {
            let r = run_with_policy(&inst, &mut RandomSubset::new(seed)).unwrap();
            assert_eq!(r.final_price, gs.final_price);
        }
    }

    struct Outside;
    impl StepPolicy for Outside {
        fn name(&self) -> String {
            "outside".into()
        }
        fn choose(&mut self, _: &PriceVector, o: &ObstacleReport) -> Bundle {
            Bundle::full(2).difference(o.o_star)
        }
    }

    struct Nothing;
    impl StepPolicy for Nothing {
        fn name(&self) -> String {
            "nothing".into()
        }
        fn choose(&mut self, _: &PriceVector, _: &ObstacleReport) -> Bundle {
            Bundle::EMPTY
        }
    }

    #[test]
    fn policy_violations_are_reported() {
        let v = Valuation::unit_demand(vec![5, 0]).unwrap();
        let inst = Instance::with_default_labels(vec![v.clone(), v]).unwrap();
        assert!(matches!(
            run_with_policy(&inst, &mut Outside),
            Err(Error::PolicyViolation { .. })
        ));
        assert!(matches!(
            run_with_policy(&inst, &mut Nothing),
            Err(Error::PolicyViolation { .. })
        ));
    }

    #[test]
    fn domination_monitor() {
        let inst = two_bidders_one_item();
        let mut trace = gul_stacchetti(&inst).unwrap();
        let p_star = PriceVector::new(vec![5]);
        assert_eq!(monitor_domination(&trace, &p_star), Ok(()));
        assert_eq!(
            monitor_domination(&fine_auction(&inst).unwrap(), &p_star),
            Ok(())
        );
        trace.steps[3].price_before = PriceVector::new(vec![6]);
        assert_eq!(monitor_domination(&trace, &p_star), Err(3));
    }

    #[test]
    fn cap_fires_and_keeps_trace() {
        // a zero-valued instance has cap 0 but never needs a step
        let zero = Instance::with_default_labels(vec![Valuation::zero(2).unwrap()]).unwrap();
        assert_eq!(iteration_cap(&zero), 2);
        assert!(gul_stacchetti(&zero).unwrap().steps.is_empty());

        let trace = AuctionTrace::new("gs", &zero);
        match trace.cap_exceeded(7) {
            Error::IterationCapExceeded { cap, trace } => {
                assert_eq!(cap, 7);
                assert!(trace.iteration_cap_hit);
            }
            other => panic!("{other:?}"),
        }
    }
}
