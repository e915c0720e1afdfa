//! Greedy online assignment and competitive-ratio measurement.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{log_nsw, AtomicGame, GameMode, Profile};
use crate::num::strictly_less;
use crate::optima::brute_force_opt;

/// A load balancing game whose clients arrive one by one.
#[derive(Debug, Clone)]
pub struct OnlineInstance {
    game: AtomicGame,
    arrival_order: Vec<usize>,
}

impl OnlineInstance {
    pub fn new(game: AtomicGame, arrival_order: Vec<usize>) -> Result<Self> {
        if game.mode() != GameMode::LoadBalancing {
            return Err(Error::Invalid("online instances use load balancing mode".into()));
        }
        let n = game.n();
        let mut seen = vec![false; n];
        if arrival_order.len() != n {
            return Err(Error::Invalid("arrival order length must equal player count".into()));
        }
        for &i in &arrival_order {
            if i >= n || seen[i] {
                return Err(Error::Invalid("arrival order must be a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(OnlineInstance { game, arrival_order })
    }

    pub fn game(&self) -> &AtomicGame {
        &self.game
    }

    pub fn arrival_order(&self) -> &[usize] {
        &self.arrival_order
    }
}

/// Log-NSW-numerator increase of placing client `i` on resource `j` given
/// the loads of the already-assigned clients:
/// `(k + w_i) ln l_j(k + w_i) - k ln l_j(k)` (0-load convention applies).
pub fn greedy_step_cost(
    game: &AtomicGame,
    partial_loads: &[f64],
    i: usize,
    j: usize,
) -> Result<f64> {
    let admissible = game.players()[i].strategies.iter().any(|s| s[0] == j);
    if !admissible {
        return Err(Error::InvalidProfile(format!(
            "resource {j} is not admissible for client {i}"
        )));
    }
    let w = game.players()[i].weight;
    let k = partial_loads[j];
    let f = &game.resources()[j].latency;
    let after = (k + w) * f.eval(k + w).ln();
    let before = if k > 0.0 { k * f.eval(k).ln() } else { 0.0 };
    Ok(after - before)
}

/// Process clients in arrival order; each takes the admissible resource with
/// the smallest step cost, ties broken by the client's strategy-list order
/// (an alternative must beat the incumbent by more than relative 1e-9).
pub fn greedy_assign(instance: &OnlineInstance) -> Result<Profile> {
    let game = instance.game();
    let mut loads = vec![0.0; game.resources().len()];
    let mut choices = vec![0usize; game.n()];
    for &i in instance.arrival_order() {
        let mut best = 0;
        let mut best_inc = greedy_step_cost(game, &loads, i, game.strategy(i, 0)[0])?;
        for s in 1..game.players()[i].strategies.len() {
            let inc = greedy_step_cost(game, &loads, i, game.strategy(i, s)[0])?;
            if strictly_less(inc, best_inc, 1e-9) {
                best = s;
                best_inc = inc;
            }
        }
        choices[i] = best;
        loads[game.strategy(i, best)[0]] += game.players()[i].weight;
    }
    Ok(Profile(choices))
}

/// Greedy NSW over the exhaustively computed optimal NSW.
pub fn competitive_ratio(instance: &OnlineInstance) -> Result<f64> {
    let greedy = greedy_assign(instance)?;
    let greedy_value = log_nsw(instance.game(), &greedy)?;
    let (_, opt) = brute_force_opt(instance.game())?;
    Ok((greedy_value.value - opt.value).exp())
}

/// Greedy NSW over the NSW of a supplied benchmark profile (e.g. a
/// generator's designated optimal candidate when brute force is infeasible).
pub fn ratio_vs(instance: &OnlineInstance, benchmark: &Profile) -> Result<f64> {
    let greedy = greedy_assign(instance)?;
    let greedy_value = log_nsw(instance.game(), &greedy)?;
    let bench_value = log_nsw(instance.game(), benchmark)?;
    Ok((greedy_value.value - bench_value.value).exp())
}

/// Seeded random arrival order for experiments.
pub fn shuffled_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}
