//! NSW-optimal profiles: exhaustive search for weighted games and a
//! polynomial-time slot-matching solver for unweighted load balancing with
//! quasi-log-convex latencies.

use crate::error::{Error, Result};
use crate::matching::MinCostFlow;
use crate::model::{log_nsw, AtomicGame, GameMode, LogNsw, Profile};
use crate::num::xlny;

/// Marginal log-NSW-numerator slot prices per resource:
/// `delta_j(t) = t ln l_j(t) - (t-1) ln l_j(t-1)` for unit loads t = 1..n.
pub struct SlotCostTable {
    deltas: Vec<Vec<f64>>,
}

impl SlotCostTable {
    /// Build the table for `slots` unit-sized slots per resource. Discrete
    /// convexity of the prices is enforced for quasi-log-convex latencies.
    pub fn new(game: &AtomicGame, slots: usize) -> Result<Self> {
        let mut deltas = Vec::with_capacity(game.resources().len());
        for r in game.resources() {
            let mut g_prev = 0.0;
            let mut col = Vec::with_capacity(slots);
            for t in 1..=slots {
                let cost = r.latency.eval(t as f64);
                if !(cost > 0.0) {
                    return Err(Error::Domain(format!(
                        "non-positive latency at load {t} on resource '{}'",
                        r.id
                    )));
                }
                let g = xlny(t as f64, cost);
                col.push(g - g_prev);
                g_prev = g;
            }
            if r.latency.is_quasi_log_convex() {
                for t in 1..col.len() {
                    if col[t] < col[t - 1] - 1e-12 {
                        return Err(Error::ConvexityViolated {
                            resource: r.id.clone(),
                            slot: t + 1,
                        });
                    }
                }
            }
            deltas.push(col);
        }
        Ok(SlotCostTable { deltas })
    }

    pub fn delta(&self, resource: usize, slot: usize) -> f64 {
        self.deltas[resource][slot - 1]
    }
}

/// Iterator over all profiles of a game in lexicographic order
/// (player 0 most significant).
pub(crate) struct ProfileIter {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for ProfileIter {
    type Item = Profile;

    fn next(&mut self) -> Option<Profile> {
        let current = self.next.clone()?;
        // Odometer increment from the least significant (last) digit.
        let mut bumped = false;
        let mut digits = current.clone();
        for pos in (0..digits.len()).rev() {
            if digits[pos] + 1 < self.radices[pos] {
                digits[pos] += 1;
                for d in digits.iter_mut().skip(pos + 1) {
                    *d = 0;
                }
                bumped = true;
                break;
            }
        }
        self.next = if bumped && !digits.is_empty() { Some(digits) } else { None };
        Some(Profile(current))
    }
}

/// All profiles in lexicographic order, guarded by a hard cap on the
/// profile-space size.
pub(crate) fn profile_space(game: &AtomicGame, cap: u128) -> Result<ProfileIter> {
    let mut total: u128 = 1;
    let mut radices = Vec::with_capacity(game.n());
    for p in game.players() {
        total = total.saturating_mul(p.strategies.len() as u128);
        radices.push(p.strategies.len());
    }
    if total > cap {
        return Err(Error::TooLarge { need: total, cap });
    }
    Ok(ProfileIter { next: Some(vec![0; radices.len()]), radices })
}

/// Exhaustive NSW minimization; ties broken lexicographically.
pub fn brute_force_opt(game: &AtomicGame) -> Result<(Profile, LogNsw)> {
    let mut best: Option<(Profile, LogNsw)> = None;
    for profile in profile_space(game, 2_000_000)? {
        let value = log_nsw(game, &profile)?;
        match &best {
            Some((_, incumbent)) if value.value >= incumbent.value => {}
            _ => best = Some((profile, value)),
        }
    }
    best.ok_or_else(|| Error::Internal("empty profile space".into()))
}

/// How the unweighted optimum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMethod {
    Matching,
    /// Preconditions for the matching solver failed (non-unit weights or a
    /// latency without the quasi-log-convex flag); result is from brute force.
    BruteForceFallback,
}

#[derive(Debug, Clone)]
pub struct OptOutcome {
    pub profile: Profile,
    pub log_nsw: LogNsw,
    pub method: OptMethod,
}

/// Polynomial-time optimum for unweighted load balancing games via
/// minimum-cost matching of players to (resource, slot) pairs priced by the
/// slot table. Slot prices are non-decreasing per resource, so any
/// matching's cost dominates the induced load-profile cost and lowest-slots
/// matchings achieve it; the minimum matching therefore minimizes
/// `sum_j k_j ln l_j(k_j)`, i.e. the NSW.
pub fn unweighted_opt_matching(game: &AtomicGame) -> Result<OptOutcome> {
    if game.mode() != GameMode::LoadBalancing {
        return Err(Error::Invalid("matching optimum needs load balancing mode".into()));
    }
    if game.n() == 0 {
        return Err(Error::Invalid("matching optimum needs at least one player".into()));
    }
    let unit = game.players().iter().all(|p| p.weight == 1.0);
    let convex = game
        .resources()
        .iter()
        .all(|r| r.latency.is_quasi_log_convex());
    if !unit || !convex {
        let (profile, value) = brute_force_opt(game)?;
        return Ok(OptOutcome { profile, log_nsw: value, method: OptMethod::BruteForceFallback });
    }

    let n = game.n();
    let m = game.resources().len();
    let table = SlotCostTable::new(game, n)?;

    // Nodes: source, players, (resource, slot) pairs, sink.
    let source = 0;
    let player_node = |i: usize| 1 + i;
    let slot_node = |j: usize, t: usize| 1 + n + j * n + (t - 1);
    let sink = 1 + n + m * n;
    let mut mcf = MinCostFlow::new(sink + 1);
    for i in 0..n {
        mcf.add_edge(source, player_node(i), 1, 0.0);
    }
    let mut pick_edges = Vec::new(); // (edge id, player, resource, strategy idx)
    for (i, p) in game.players().iter().enumerate() {
        for (s, strat) in p.strategies.iter().enumerate() {
            let j = strat[0];
            for t in 1..=n {
                let id = mcf.add_edge(player_node(i), slot_node(j, t), 1, table.delta(j, t));
                pick_edges.push((id, i, s));
            }
        }
    }
    for j in 0..m {
        for t in 1..=n {
            mcf.add_edge(slot_node(j, t), sink, 1, 0.0);
        }
    }
    let (flow, total_cost) = mcf.run(source, sink, n as i64);
    if flow != n as i64 {
        return Err(Error::Internal("slot matching is infeasible".into()));
    }

    let mut choices = vec![usize::MAX; n];
    for &(id, i, s) in &pick_edges {
        if mcf.edge_flow(id) > 0 {
            choices[i] = s;
        }
    }
    let profile = Profile(choices);
    let value = log_nsw(game, &profile)?;
    // Internal consistency: the matching objective is the log-NSW numerator.
    debug_assert!(
        (total_cost - value.value * value.total_weight).abs()
            <= 1e-9 * 1.0_f64.max(total_cost.abs()),
        "matching cost {total_cost} vs numerator {}",
        value.value * value.total_weight
    );
    let _ = total_cost;
    Ok(OptOutcome { profile, log_nsw: value, method: OptMethod::Matching })
}
