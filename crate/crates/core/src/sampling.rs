//! Seeded random instance builders for stress and invariant testing.
//!
//! Every builder is deterministic in its seed (ChaCha8), so failures can be
//! replayed exactly.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::latency::LatencyFunction;
use crate::model::{AtomicGame, GameMode, NonAtomicGame, Player, PlayerType, Resource};
use crate::online::OnlineInstance;

/// Max polynomial degree drawn by the random builders.
pub const MAX_DEGREE: u32 = 3;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_latency(rng: &mut ChaCha8Rng) -> LatencyFunction {
    let degree = rng.gen_range(0..=MAX_DEGREE) as usize;
    let mut coeffs = vec![0.0; degree + 1];
    for c in coeffs.iter_mut() {
        if rng.gen_bool(0.5) {
            *c = rng.gen_range(0.1..2.0);
        }
    }
    // Keep the drawn degree honest and the function positive somewhere.
    coeffs[degree] = rng.gen_range(0.1..2.0);
    LatencyFunction::poly(coeffs).expect("random polynomial is a valid latency")
}

fn random_resources(rng: &mut ChaCha8Rng, m: usize) -> Vec<Resource> {
    (0..m)
        .map(|j| Resource { id: format!("r{}", j + 1), latency: random_latency(rng) })
        .collect()
}

/// Random non-empty admissible set as singleton strategies over `m` resources.
fn random_singleton_strategies(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<usize>> {
    let mut allowed: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
    if allowed.is_empty() {
        allowed.push(rng.gen_range(0..m));
    }
    allowed.into_iter().map(|j| vec![j]).collect()
}

fn random_game(seed: u64, unit_weights: bool) -> AtomicGame {
    let mut rng = rng_for(seed);
    let m = rng.gen_range(2..=4);
    let n = rng.gen_range(1..=6);
    let resources = random_resources(&mut rng, m);
    let players = (0..n)
        .map(|_| Player {
            weight: if unit_weights { 1.0 } else { rng.gen_range(0.5..3.0) },
            strategies: random_singleton_strategies(&mut rng, m),
        })
        .collect();
    AtomicGame::new(GameMode::LoadBalancing, resources, players)
        .expect("random game is valid")
}

/// Random unit-weight load-balancing game: up to 6 players, up to 4
/// resources, polynomial latencies of degree at most [`MAX_DEGREE`].
pub fn random_unweighted_game(seed: u64) -> AtomicGame {
    random_game(seed, true)
}

/// Like [`random_unweighted_game`] but with weights drawn from [0.5, 3).
pub fn random_weighted_game(seed: u64) -> AtomicGame {
    random_game(seed, false)
}

/// Random online instance: a random weighted game plus a shuffled arrival
/// order drawn from the same seed stream.
pub fn random_online_instance(seed: u64) -> OnlineInstance {
    let game = random_game(seed, false);
    let mut rng = rng_for(seed.wrapping_mul(0x9e37_79b9).wrapping_add(17));
    let mut order: Vec<usize> = (0..game.n()).collect();
    order.shuffle(&mut rng);
    OnlineInstance::new(game, order).expect("shuffled order is a permutation")
}

/// Random single-type non-atomic game over 2..=3 resources with strictly
/// increasing polynomial latencies; every resource is admissible.
pub fn random_symmetric_nonatomic(seed: u64) -> NonAtomicGame {
    let mut rng = rng_for(seed);
    let m = rng.gen_range(2..=3);
    let resources = (0..m)
        .map(|j| {
            let degree = rng.gen_range(1..=MAX_DEGREE) as usize;
            let mut coeffs = vec![0.0; degree + 1];
            for c in coeffs.iter_mut().skip(1) {
                if rng.gen_bool(0.5) {
                    *c = rng.gen_range(0.1..2.0);
                }
            }
            coeffs[0] = rng.gen_range(0.1..1.0);
            coeffs[degree] = rng.gen_range(0.1..2.0);
            Resource {
                id: format!("r{}", j + 1),
                latency: LatencyFunction::poly(coeffs).expect("valid latency"),
            }
        })
        .collect();
    let types = vec![PlayerType {
        rate: rng.gen_range(0.5..5.0),
        strategies: (0..m).collect(),
    }];
    NonAtomicGame::new(resources, types).expect("random non-atomic game is valid")
}

/// Highest polynomial degree across a game's resources.
pub fn game_max_degree(game: &AtomicGame) -> u32 {
    game.resources()
        .iter()
        .map(|r| r.latency.max_degree())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let a = random_unweighted_game(7);
        let b = random_unweighted_game(7);
        assert_eq!(a.n(), b.n());
        assert_eq!(a.resources().len(), b.resources().len());
        for (ra, rb) in a.resources().iter().zip(b.resources()) {
            assert_eq!(ra.latency, rb.latency);
        }
        for (pa, pb) in a.players().iter().zip(b.players()) {
            assert_eq!(pa.strategies, pb.strategies);
        }
    }

    #[test]
    fn respects_size_and_weight_limits() {
        for seed in 0..50 {
            let g = random_unweighted_game(seed);
            assert!(g.n() >= 1 && g.n() <= 6);
            assert!(g.resources().len() >= 2 && g.resources().len() <= 4);
            assert!(g.players().iter().all(|p| p.weight == 1.0));
            assert!(game_max_degree(&g) <= MAX_DEGREE);

            let w = random_weighted_game(seed);
            assert!(w.players().iter().all(|p| (0.5..3.0).contains(&p.weight)));
        }
    }

    #[test]
    fn online_orders_are_permutations() {
        for seed in 0..50 {
            let inst = random_online_instance(seed);
            let mut order = inst.arrival_order().to_vec();
            order.sort_unstable();
            assert_eq!(order, (0..inst.game().n()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn nonatomic_games_are_symmetric_and_increasing() {
        for seed in 0..50 {
            let g = random_symmetric_nonatomic(seed);
            assert_eq!(g.types().len(), 1);
            assert_eq!(g.types()[0].strategies.len(), g.resources().len());
            for r in g.resources() {
                assert!(r.latency.eval(2.0) > r.latency.eval(1.0));
            }
        }
    }
}
