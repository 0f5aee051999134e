//! Bipartite matching between players and single items.
//!
//! Augmenting paths (Kuhn) in fixed vertex order, Hall violators from failed
//! searches and König covers from alternating reachability.

use crate::demand::DemandReport;
use crate::error::{Error, Result};
use crate::model::Bundle;

/// Players on the left, items on the right, an edge `(i, x)` when `{x}` is
/// demanded by `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandGraph {
    pub items: usize,
    /// Player indices, ascending.
    pub left: Vec<usize>,
    /// Neighbourhood of each left vertex, parallel to `left`.
    pub adjacency: Vec<Bundle>,
}

impl DemandGraph {
    /// Graph over the given players from their demand at the current price.
    pub fn from_demand(reports: &[DemandReport], players: &[usize], items: usize) -> Self {
        let mut left = players.to_vec();
        left.sort_unstable();
        left.dedup();
        let adjacency = left
            .iter()
            .map(|&i| {
                Bundle::from_items(
                    reports[i]
                        .demand
                        .iter()
                        .filter(|b| b.len() == 1)
                        .filter_map(|b| b.first()),
                )
            })
            .collect();
        DemandGraph {
            items,
            left,
            adjacency,
        }
    }

    pub fn neighbours(&self, player: usize) -> Bundle {
        self.position(player)
            .map(|k| self.adjacency[k])
            .unwrap_or_default()
    }

    /// Items adjacent to some player of `players`.
    pub fn neighbourhood(&self, players: &[usize]) -> Bundle {
        players
            .iter()
            .fold(Bundle::EMPTY, |acc, &i| acc.union(self.neighbours(i)))
    }

    fn position(&self, player: usize) -> Option<usize> {
        self.left.binary_search(&player).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingResult {
    /// `(player, item)` pairs, ascending by player.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_players: Vec<usize>,
    pub unmatched_items: Bundle,
    /// Left half of the König cover.
    pub cover_players: Vec<usize>,
    /// Right half of the König cover.
    pub cover_items: Bundle,
}

impl MatchingResult {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    pub fn cover_size(&self) -> usize {
        self.cover_players.len() + self.cover_items.len()
    }

    pub fn item_of(&self, player: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(i, _)| i == player).map(|&(_, x)| x)
    }
}

/// Maximum matching saturating `must_match`.
pub fn max_matching(g: &DemandGraph, must_match: &[usize]) -> Result<MatchingResult> {
    max_matching_avoiding(g, must_match, Bundle::EMPTY)
}

/// Maximum matching saturating `must_match` that uses as few items of
/// `avoid` as any maximum matching saturating `must_match` can.
pub fn max_matching_avoiding(
    g: &DemandGraph,
    must_match: &[usize],
    avoid: Bundle,
) -> Result<MatchingResult> {
    let mut state = Kuhn::new(g, avoid);
    let mut order: Vec<usize> = Vec::with_capacity(g.left.len());
    for &i in must_match {
        match g.position(i) {
            Some(k) => order.push(k),
            None => return Err(Error::HallViolation(vec![i])),
        }
    }
    order.sort_unstable();
    order.dedup();
    for &k in &order {
        let mut visited = Bundle::EMPTY;
        if !state.augment(k, &mut visited, Bundle::full(g.items)) {
            let mut violators: Vec<usize> = visited
                .items()
                .filter_map(|x| state.item_owner[x])
                .chain(std::iter::once(k))
                .map(|k| g.left[k])
                .collect();
            violators.sort_unstable();
            return Err(Error::HallViolation(violators));
        }
    }
    for k in 0..g.left.len() {
        if state.left_item[k].is_none() {
            let mut visited = Bundle::EMPTY;
            state.augment(k, &mut visited, Bundle::full(g.items));
        }
    }
    state.release_avoided();
    Ok(state.finish())
}

struct Kuhn<'a> {
    g: &'a DemandGraph,
    avoid: Bundle,
    left_item: Vec<Option<usize>>,
    item_owner: Vec<Option<usize>>,
}

impl<'a> Kuhn<'a> {
    fn new(g: &'a DemandGraph, avoid: Bundle) -> Self {
        Kuhn {
            g,
            avoid,
            left_item: vec![None; g.left.len()],
            item_owner: vec![None; g.items],
        }
    }

    /// Non-avoided neighbours first, each group ascending.
    fn ordered(&self, k: usize) -> impl Iterator<Item = usize> {
        let adj = self.g.adjacency[k];
        adj.difference(self.avoid)
            .items()
            .chain(adj.intersection(self.avoid).items())
    }

    /// Augmenting path from left vertex `k` ending at a free item of `targets`.
    fn augment(&mut self, k: usize, visited: &mut Bundle, targets: Bundle) -> bool {
        let choices: Vec<usize> = self.ordered(k).collect();
        // prefer a free item directly
        for &x in &choices {
            if !visited.contains(x) && self.item_owner[x].is_none() && targets.contains(x) {
                *visited = visited.with(x);
                self.assign(k, x);
                return true;
            }
        }
        for &x in &choices {
            if visited.contains(x) {
                continue;
            }
            *visited = visited.with(x);
            if let Some(owner) = self.item_owner[x] {
                if self.augment(owner, visited, targets) {
                    self.assign(k, x);
                    return true;
                }
            }
        }
        false
    }

    fn assign(&mut self, k: usize, x: usize) {
        if let Some(old) = self.left_item[k] {
            if self.item_owner[old] == Some(k) {
                self.item_owner[old] = None;
            }
        }
        self.left_item[k] = Some(x);
        self.item_owner[x] = Some(k);
    }

    /// Reroutes alternating paths from avoided matched items to free
    /// non-avoided ones until none exists.
    fn release_avoided(&mut self) {
        loop {
            let mut improved = false;
            for y in self.avoid.items() {
                let Some(owner) = self.item_owner[y] else {
                    continue;
                };
                let free_targets = Bundle::full(self.g.items).difference(self.avoid);
                let mut visited = Bundle::singleton(y);
                let snapshot = (self.left_item.clone(), self.item_owner.clone());
                if self.augment(owner, &mut visited, free_targets) {
                    self.item_owner[y] = None;
                    improved = true;
                } else {
                    (self.left_item, self.item_owner) = snapshot;
                }
            }
            if !improved {
                return;
            }
        }
    }

    fn finish(self) -> MatchingResult {
        let g = self.g;
        let mut pairs = Vec::new();
        let mut unmatched_players = Vec::new();
        for (k, item) in self.left_item.iter().enumerate() {
            match item {
                Some(x) => pairs.push((g.left[k], *x)),
                None => unmatched_players.push(g.left[k]),
            }
        }
        let matched_items = Bundle::from_items(pairs.iter().map(|&(_, x)| x));
        // alternating reachability from unmatched players
        let mut reach_left = vec![false; g.left.len()];
        let mut reach_items = Bundle::EMPTY;
        let mut stack: Vec<usize> = (0..g.left.len())
            .filter(|&k| self.left_item[k].is_none())
            .collect();
        for &k in &stack {
            reach_left[k] = true;
        }
        while let Some(k) = stack.pop() {
            for x in g.adjacency[k].items() {
                if self.left_item[k] == Some(x) || reach_items.contains(x) {
                    continue;
                }
                reach_items = reach_items.with(x);
                if let Some(owner) = self.item_owner[x] {
                    if !reach_left[owner] {
                        reach_left[owner] = true;
                        stack.push(owner);
                    }
                }
            }
        }
        let cover_players = (0..g.left.len())
            .filter(|&k| !reach_left[k])
            .map(|k| g.left[k])
            .collect();
        MatchingResult {
            pairs,
            unmatched_players,
            unmatched_items: Bundle::full(g.items).difference(matched_items),
            cover_players,
            cover_items: reach_items,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(items: usize, adjacency: &[&[usize]]) -> DemandGraph {
        DemandGraph {
            items,
            left: (0..adjacency.len()).collect(),
            adjacency: adjacency
                .iter()
                .map(|a| Bundle::from_items(a.iter().copied()))
                .collect(),
        }
    }

    fn covers_every_edge(g: &DemandGraph, r: &MatchingResult) -> bool {
        g.left.iter().zip(&g.adjacency).all(|(i, adj)| {
            r.cover_players.contains(i) || adj.is_subset(r.cover_items)
        })
    }

    /// Largest matching by trying every injective choice.
    fn brute_force(g: &DemandGraph, k: usize, used: Bundle) -> usize {
        if k == g.left.len() {
            return 0;
        }
        let mut best = brute_force(g, k + 1, used);
        for x in g.adjacency[k].difference(used).items() {
            best = best.max(1 + brute_force(g, k + 1, used.with(x)));
        }
        best
    }

    #[test]
    fn hall_violation_for_shared_single_item() {
        let g = graph(1, &[&[0], &[0]]);
        match max_matching(&g, &[0, 1]) {
            Err(Error::HallViolation(s)) => assert_eq!(s, vec![0, 1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn perfect_matching() {
        let g = graph(3, &[&[0, 1], &[0], &[1, 2]]);
        let r = max_matching(&g, &[0, 1, 2]).unwrap();
        assert_eq!(r.size(), 3);
        assert!(r.unmatched_players.is_empty());
        assert_eq!(r.cover_size(), 3);
        assert!(covers_every_edge(&g, &r));
    }

    #[test]
    fn empty_graph() {
        let g = graph(0, &[]);
        let r = max_matching(&g, &[]).unwrap();
        assert_eq!(r.size(), 0);
        assert_eq!(r.cover_size(), 0);
    }

    #[test]
    fn avoids_marked_items_when_possible() {
        // player 0 may take 0 or 2; player 1 only 1
        let g = graph(3, &[&[0, 2], &[1]]);
        let r = max_matching_avoiding(&g, &[], Bundle::singleton(0)).unwrap();
        assert_eq!(r.item_of(0), Some(2));
        // reroute through an alternating path: 0 takes 0 first, then 1 pushes
        let g = graph(3, &[&[0, 1], &[1, 2]]);
        let avoid = Bundle::from_items([0, 1]);
        let r = max_matching_avoiding(&g, &[], avoid).unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(r.unmatched_items.intersection(avoid).len(), 1);
    }

    #[test]
    fn must_match_is_kept_saturated() {
        let g = graph(2, &[&[0], &[0, 1], &[1]]);
        let r = max_matching(&g, &[2]).unwrap();
        assert!(r.item_of(2).is_some());
        assert_eq!(r.size(), 2);
    }

    #[test]
    fn violator_has_small_neighbourhood() {
        let g = graph(3, &[&[0, 1], &[0], &[1], &[2]]);
        match max_matching(&g, &[0, 1, 2, 3]) {
            Err(Error::HallViolation(s)) => {
                assert!(g.neighbourhood(&s).len() < s.len());
            }
            other => panic!("{other:?}"),
        }
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn maximum_with_konig_cover(rows in proptest::collection::vec(0u32..32, 0..6)) {
            let g = DemandGraph {
                items: 5,
                left: (0..rows.len()).collect(),
                adjacency: rows.iter().map(|&r| Bundle::from_bits(r)).collect(),
            };
            let r = max_matching(&g, &[]).unwrap();
            prop_assert_eq!(r.size(), brute_force(&g, 0, Bundle::EMPTY));
            prop_assert_eq!(r.cover_size(), r.size());
            prop_assert!(covers_every_edge(&g, &r));
            for &(i, x) in &r.pairs {
                prop_assert!(g.adjacency[i].contains(x));
            }
            let items: Vec<usize> = r.pairs.iter().map(|&(_, x)| x).collect();
            prop_assert_eq!(Bundle::from_items(items.iter().copied()).len(), items.len());
        }

        #[test]
        fn avoiding_keeps_size_and_minimises_use(
            rows in proptest::collection::vec(0u32..32, 0..6),
            avoid in 0u32..32,
        ) {
            let g = DemandGraph {
                items: 5,
                left: (0..rows.len()).collect(),
                adjacency: rows.iter().map(|&r| Bundle::from_bits(r)).collect(),
            };
            let avoid = Bundle::from_bits(avoid);
            let plain = max_matching(&g, &[]).unwrap();
            let r = max_matching_avoiding(&g, &[], avoid).unwrap();
            prop_assert_eq!(r.size(), plain.size());
            // optimum: a maximum matching in the graph without avoided items
            // uses that many free items; the rest must be avoided ones
            let pruned = DemandGraph {
                adjacency: g.adjacency.iter().map(|a| a.difference(avoid)).collect(),
                ..g.clone()
            };
            let outside = max_matching(&pruned, &[]).unwrap().size();
            let used = r.pairs.iter().filter(|&&(_, x)| avoid.contains(x)).count();
            prop_assert_eq!(used, r.size() - outside);
        }
    }
}
