//! Best responses, best-response dynamics, exhaustive PNE enumeration, and
//! the empirical Nash price of anarchy.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{congestion, deviation_cost, log_nsw, player_cost_from_loads};
use crate::model::{AtomicGame, GameMode, Profile};
use crate::num::{strictly_less, REL_TOL};
use crate::optima::{brute_force_opt, profile_space};

/// Schedules for [`best_response_dynamics`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    RoundRobin,
    /// Heaviest players move first (ties by player index).
    MaxWeightFirst,
    /// Player order reshuffled every sweep from the given seed.
    SeededRandom(u64),
}

/// Result of best-response dynamics.
#[derive(Debug, Clone)]
pub enum DynamicsOutcome {
    Pne(Profile),
    DidNotConverge(Profile),
}

/// Strategy index minimizing player `i`'s cost with all other players fixed;
/// ties broken by smallest index. A competing strategy wins only if it beats
/// the incumbent by more than relative 1e-9, so floating-point ties stay
/// deterministic.
pub fn best_response(game: &AtomicGame, profile: &Profile, i: usize) -> Result<usize> {
    game.check_profile(profile)?;
    let loads = congestion(game, profile)?;
    let mut best = 0;
    let mut best_cost = deviation_cost(game, profile, &loads, i, 0);
    for s in 1..game.players()[i].strategies.len() {
        let cost = deviation_cost(game, profile, &loads, i, s);
        if strictly_less(cost, best_cost, REL_TOL) {
            best = s;
            best_cost = cost;
        }
    }
    Ok(best)
}

/// True iff no unilateral deviation improves a player's cost by more than
/// the relative tolerance.
pub fn is_pne(game: &AtomicGame, profile: &Profile, tol: f64) -> Result<bool> {
    game.check_profile(profile)?;
    let loads = congestion(game, profile)?;
    for i in 0..game.n() {
        let current = player_cost_from_loads(game, profile, &loads, i);
        for s in 0..game.players()[i].strategies.len() {
            if s == profile.0[i] {
                continue;
            }
            if strictly_less(deviation_cost(game, profile, &loads, i, s), current, tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One sweep of dynamics as seen by a trace consumer.
#[derive(Debug, Clone, Copy)]
pub struct SweepRecord {
    pub sweep: usize,
    /// Players that strictly improved during this sweep.
    pub moves: usize,
    /// Log-NSW of the profile after the sweep.
    pub log_nsw: f64,
}

/// Repeated best responses in schedule order until a full sweep makes no
/// strict improvement, or `max_sweeps` is exhausted.
pub fn best_response_dynamics(
    game: &AtomicGame,
    start: &Profile,
    schedule: Schedule,
    max_sweeps: usize,
) -> Result<DynamicsOutcome> {
    Ok(best_response_dynamics_traced(game, start, schedule, max_sweeps)?.0)
}

/// Like [`best_response_dynamics`], additionally returning one record per
/// executed sweep.
pub fn best_response_dynamics_traced(
    game: &AtomicGame,
    start: &Profile,
    schedule: Schedule,
    max_sweeps: usize,
) -> Result<(DynamicsOutcome, Vec<SweepRecord>)> {
    if game.mode() != GameMode::LoadBalancing {
        return Err(Error::Invalid(
            "dynamics supports load balancing mode only".into(),
        ));
    }
    game.check_profile(start)?;
    let mut profile = start.clone();
    let mut order: Vec<usize> = (0..game.n()).collect();
    if let Schedule::MaxWeightFirst = schedule {
        order.sort_by(|&a, &b| {
            game.players()[b]
                .weight
                .partial_cmp(&game.players()[a].weight)
                .unwrap()
                .then(a.cmp(&b))
        });
    }
    let mut rng = match schedule {
        Schedule::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut trace = Vec::new();
    for sweep in 0..max_sweeps {
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut moves = 0;
        for &i in &order {
            let loads = congestion(game, &profile)?;
            let current = player_cost_from_loads(game, &profile, &loads, i);
            let br = best_response(game, &profile, i)?;
            if br != profile.0[i] {
                let new_cost = deviation_cost(game, &profile, &loads, i, br);
                if strictly_less(new_cost, current, REL_TOL) {
                    profile.0[i] = br;
                    moves += 1;
                }
            }
        }
        trace.push(SweepRecord {
            sweep,
            moves,
            log_nsw: log_nsw(game, &profile)?.value,
        });
        if moves == 0 {
            debug_assert!(is_pne(game, &profile, REL_TOL)?);
            return Ok((DynamicsOutcome::Pne(profile), trace));
        }
    }
    Ok((DynamicsOutcome::DidNotConverge(profile), trace))
}

/// All pure Nash equilibria, in lexicographic profile order.
pub fn enumerate_pne(game: &AtomicGame, cap_profiles: u128) -> Result<Vec<Profile>> {
    let mut out = Vec::new();
    for profile in profile_space(game, cap_profiles)? {
        if is_pne(game, &profile, REL_TOL)? {
            out.push(profile);
        }
    }
    Ok(out)
}

/// Worst PNE NSW over optimal NSW, both found exhaustively.
pub fn empirical_npoa(game: &AtomicGame) -> Result<f64> {
    let pnes = enumerate_pne(game, 2_000_000)?;
    if pnes.is_empty() {
        return Err(Error::Internal("no pure Nash equilibrium found".into()));
    }
    let worst = pnes
        .iter()
        .map(|p| log_nsw(game, p).map(|v| v.value))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let (_, opt) = brute_force_opt(game)?;
    Ok((worst - opt.value).exp())
}
