//! Exact demand oracle and the dual quantities built on it: minimal demand
//! families, the intersection counts `f_i`, over-demanded sets, the Lyapunov
//! function and the minimal minimizer of `L(p + 1_S)`.
//!
//! Everything here enumerates all `2^m` bundles.

use crate::model::{Bundle, Instance, PriceVector, Valuation};

/// `p(S)` for every bundle `S`, indexed by bitmask.
pub fn bundle_costs(p: &PriceVector) -> Vec<i64> {
    let m = p.len();
    let mut costs = vec![0i64; 1 << m];
    for s in 1..1usize << m {
        let j = s.trailing_zeros() as usize;
        costs[s] = costs[s & (s - 1)] + p.get(j) as i64;
    }
    costs
}

/// `v(S) - p(S)`.
pub fn utility(v: &Valuation, p: &PriceVector, s: Bundle) -> i64 {
    v.value(s) as i64 - p.cost(s)
}

/// Best utility given precomputed bundle costs.
pub fn max_utility_with(v: &Valuation, costs: &[i64]) -> i64 {
    v.values()
        .iter()
        .zip(costs)
        .map(|(&val, &c)| val as i64 - c)
        .max()
        .unwrap_or(0)
}

pub fn max_utility(v: &Valuation, p: &PriceVector) -> i64 {
    max_utility_with(v, &bundle_costs(p))
}

/// Demand of one player at one price.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandReport {
    pub player: usize,
    /// `D(p)`, in bitmask order.
    pub demand: Vec<Bundle>,
    /// `D*(p)`: members of `D(p)` with no demanded strict subset.
    pub minimal_demand: Vec<Bundle>,
    pub utility: i64,
}

impl DemandReport {
    /// Minimum of `|D ∩ s|` over the minimal demand sets.
    pub fn f(&self, s: Bundle) -> usize {
        self.minimal_demand
            .iter()
            .map(|d| d.intersection(s).len())
            .min()
            .unwrap_or(0)
    }

    pub fn contains(&self, s: Bundle) -> bool {
        self.demand.binary_search(&s).is_ok()
    }
}

/// Marks every bundle having some flagged subset (itself included).
fn downward_or(flags: &[bool], m: usize) -> Vec<bool> {
    let mut down = flags.to_vec();
    for j in 0..m {
        let bit = 1usize << j;
        for s in 0..down.len() {
            if s & bit != 0 && down[s ^ bit] {
                down[s] = true;
            }
        }
    }
    down
}

/// Flagged bundles with no flagged strict subset, in bitmask order.
pub(crate) fn inclusion_minimal(flags: &[bool], m: usize) -> Vec<Bundle> {
    let down = downward_or(flags, m);
    (0..flags.len())
        .filter(|&s| flags[s])
        .filter(|&s| {
            let b = Bundle::from_bits(s as u32);
            b.items().all(|j| !down[s & !(1 << j)])
        })
        .map(|s| Bundle::from_bits(s as u32))
        .collect()
}

pub fn demand_with(v: &Valuation, costs: &[i64]) -> DemandReport {
    let best = max_utility_with(v, costs);
    let flags: Vec<bool> = v
        .values()
        .iter()
        .zip(costs)
        .map(|(&val, &c)| val as i64 - c == best)
        .collect();
    let demand = flags
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(s, _)| Bundle::from_bits(s as u32))
        .collect();
    DemandReport {
        player: 0,
        demand,
        minimal_demand: inclusion_minimal(&flags, v.items()),
        utility: best,
    }
}

/// `D(p)`, `D*(p)` and the best utility for a single valuation.
pub fn demand_sets(v: &Valuation, p: &PriceVector) -> DemandReport {
    demand_with(v, &bundle_costs(p))
}

/// One report per player.
pub fn instance_demand(instance: &Instance, p: &PriceVector) -> Vec<DemandReport> {
    let costs = bundle_costs(p);
    instance
        .players()
        .iter()
        .enumerate()
        .map(|(i, v)| DemandReport {
            player: i,
            ..demand_with(v, &costs)
        })
        .collect()
}

/// `f_{i,p}(S) = min_{D ∈ D*_i(p)} |D ∩ S|`.
pub fn f_i(v: &Valuation, p: &PriceVector, s: Bundle) -> usize {
    demand_sets(v, p).f(s)
}

/// `f_p(S) = Σ_i f_{i,p}(S) - |S|`.
pub fn f(instance: &Instance, p: &PriceVector, s: Bundle) -> i64 {
    f_from_reports(&instance_demand(instance, p), s)
}

pub fn f_from_reports(reports: &[DemandReport], s: Bundle) -> i64 {
    reports.iter().map(|r| r.f(s) as i64).sum::<i64>() - s.len() as i64
}

/// The minimal most over-demanded set `O*_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstacleReport {
    pub o_star: Bundle,
    /// `f_p(O*)`; zero when `O*` is empty.
    pub f_value: i64,
    pub per_player_f: Vec<usize>,
    /// Whether the inclusion-minimal maximizer was unique.
    pub unique: bool,
}

pub fn over_demanded_set(instance: &Instance, p: &PriceVector) -> ObstacleReport {
    obstacle_from_reports(&instance_demand(instance, p), instance.item_count())
}

pub fn obstacle_from_reports(reports: &[DemandReport], m: usize) -> ObstacleReport {
    let values: Vec<i64> = Bundle::all(m).map(|s| f_from_reports(reports, s)).collect();
    let best = values.iter().copied().max().unwrap_or(0);
    if best <= 0 {
        return ObstacleReport {
            o_star: Bundle::EMPTY,
            f_value: 0,
            per_player_f: vec![0; reports.len()],
            unique: true,
        };
    }
    let flags: Vec<bool> = values.iter().map(|&v| v == best).collect();
    let minimal = inclusion_minimal(&flags, m);
    let o_star = minimal
        .iter()
        .copied()
        .min_by(|a, b| a.lex_cmp(*b))
        .expect("a maximizer exists");
    ObstacleReport {
        o_star,
        f_value: best,
        per_player_f: reports.iter().map(|r| r.f(o_star)).collect(),
        unique: minimal.len() == 1,
    }
}

/// `L(p) = Σ_i u_{i,p} + Σ_j p_j`.
pub fn lyapunov(instance: &Instance, p: &PriceVector) -> i64 {
    lyapunov_with(instance, &bundle_costs(p), p.total())
}

pub(crate) fn lyapunov_with(instance: &Instance, costs: &[i64], total: i64) -> i64 {
    instance
        .players()
        .iter()
        .map(|v| max_utility_with(v, costs))
        .sum::<i64>()
        + total
}

/// Result of minimizing `L(p + 1_S)` over all `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minimizer {
    pub set: Bundle,
    pub lyapunov: i64,
    /// More than one minimizer of minimum size existed and the
    /// lexicographic tie-break decided.
    pub tie_broken: bool,
}

/// Ausubel's minimal minimizer `S*`: minimizes `L(p + 1_S)`, then `|S|`,
/// then lexicographic order.
pub fn minimal_minimizer(instance: &Instance, p: &PriceVector) -> Minimizer {
    let m = instance.item_count();
    let costs = bundle_costs(p);
    let total = p.total();
    let mut shifted = vec![0i64; costs.len()];
    let mut best: Option<(i64, Bundle)> = None;
    let mut ties = 0usize;
    for s in Bundle::all(m) {
        for (t, c) in shifted.iter_mut().enumerate() {
            *c = costs[t] + (t as u32 & s.bits()).count_ones() as i64;
        }
        let value = lyapunov_with(instance, &shifted, total + s.len() as i64);
        match best {
            None => {
                best = Some((value, s));
                ties = 1;
            }
            Some((bv, bs)) => {
                let key = (value, s.len());
                let best_key = (bv, bs.len());
                if key < best_key {
                    best = Some((value, s));
                    ties = 1;
                } else if key == best_key {
                    ties += 1;
                    if s.lex_cmp(bs).is_lt() {
                        best = Some((value, s));
                    }
                }
            }
        }
    }
    let (lyapunov, set) = best.expect("at least the empty bundle");
    Minimizer {
        set,
        lyapunov,
        tie_broken: ties > 1,
    }
}

/// A price move `p + 1_up - 1_down` (disjoint, `down` only on positive
/// prices) that strictly lowers the Lyapunov, if one exists: the steepest
/// one, then fewest items, then lexicographic.
///
/// This is the test Ausubel's two-sided auction performs; no engine here
/// ever lowers prices.
pub fn lyapunov_descent(instance: &Instance, p: &PriceVector) -> Option<(Bundle, Bundle, i64)> {
    let m = instance.item_count();
    let base = lyapunov(instance, p);
    let positive = Bundle::from_items((0..m).filter(|&j| p.get(j) > 0));
    let mut best: Option<(i64, usize, Bundle, Bundle)> = None;
    for up in Bundle::all(m) {
        for down in positive.difference(up).subsets() {
            if up.is_empty() && down.is_empty() {
                continue;
            }
            let mut q = p.raised(up);
            for j in down.items() {
                q.set(j, q.get(j) - 1);
            }
            let value = lyapunov(instance, &q);
            if value >= base {
                continue;
            }
            let key = (value, up.len() + down.len());
            let better = match &best {
                None => true,
                Some((bv, bn, bu, bd)) => {
                    key < (*bv, *bn)
                        || (key == (*bv, *bn) && (up, down).cmp(&(*bu, *bd)).is_lt())
                }
            };
            if better {
                best = Some((value, key.1, up, down));
            }
        }
    }
    best.map(|(v, _, up, down)| (up, down, v))
}
