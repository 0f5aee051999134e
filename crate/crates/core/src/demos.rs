//! Compiled-in instances used by the reproduction demos and the tests.

use crate::model::{Instance, TruncationSpec, Valuation};

/// Three items `a, b, c` with `v(a) = v(b) = 2`, `v(c) = 4` and every larger
/// bundle worth 4: a `(2, 4)`-truncation that is not gross substitutes.
pub fn ggs2_not_gs_valuation() -> Valuation {
    Valuation::truncation(TruncationSpec {
        base: Valuation::unit_demand(vec![2, 2, 4]).expect("static values"),
        k: 2,
        m_value: 4,
    })
    .expect("static values")
}

/// Price pair on which [`ggs2_not_gs_valuation`] drops item `b`.
pub fn ggs2_not_gs_prices() -> (Vec<u32>, Vec<u32>) {
    (vec![0, 1, 2], vec![2, 1, 2])
}

/// `n` players over `m = 2n - 2` items with `M = 2`: the first `n - 2`
/// value every singleton at 1, the last two value the last item at 2 and
/// every other singleton at 1. At zero prices no envy-free allocation
/// exists, yet no bundle is over-demanded.
pub fn no_obstacle_instance(n: usize) -> Instance {
    assert!(n >= 3, "needs at least three players");
    let m = 2 * n - 2;
    let truncate = |singletons: Vec<u32>| {
        Valuation::truncation(TruncationSpec {
            base: Valuation::unit_demand(singletons).expect("static values"),
            k: 2,
            m_value: 2,
        })
        .expect("static values")
    };
    let uniform = truncate(vec![1; m]);
    let mut tilted_values = vec![1; m];
    tilted_values[m - 1] = 2;
    let tilted = truncate(tilted_values);
    let mut players = vec![uniform; n - 2];
    players.push(tilted.clone());
    players.push(tilted);
    Instance::with_default_labels(players).expect("static instance")
}

/// The five-player, eight-item case of [`no_obstacle_instance`].
pub fn five_player_instance() -> Instance {
    no_obstacle_instance(5)
}

/// Two bidders who each value a single item at 5.
pub fn two_bidders_one_item() -> Instance {
    let v = Valuation::unit_demand(vec![5]).expect("static values");
    Instance::new(vec!["x".into()], vec![v.clone(), v]).expect("static instance")
}
