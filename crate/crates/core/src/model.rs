//! Game types and the log-domain Nash social welfare evaluation.

use crate::error::{Error, Result};
use crate::latency::LatencyFunction;

/// Whether strategies are single resources or resource sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameMode {
    LoadBalancing,
    Congestion,
}

/// A named resource with its latency curve.
#[derive(Debug, Clone)]
pub struct Resource {
    pub id: String,
    pub latency: LatencyFunction,
}

/// A player: positive weight plus a non-empty list of strategies, each a
/// set of resource indices (singletons in load balancing mode).
#[derive(Debug, Clone)]
pub struct Player {
    pub weight: f64,
    pub strategies: Vec<Vec<usize>>,
}

/// A weighted atomic game.
#[derive(Debug, Clone)]
pub struct AtomicGame {
    mode: GameMode,
    resources: Vec<Resource>,
    players: Vec<Player>,
}

/// A strategy choice per player, as indices into each player's strategy list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile(pub Vec<usize>);

/// Natural log of the NSW together with the normalizing total weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNsw {
    /// ln NSW.
    pub value: f64,
    /// Sum of player weights (or type rates).
    pub total_weight: f64,
}

impl LogNsw {
    /// The NSW itself; only for reporting, may overflow for huge values.
    pub fn nsw(&self) -> f64 {
        self.value.exp()
    }
}

impl AtomicGame {
    pub fn new(mode: GameMode, resources: Vec<Resource>, players: Vec<Player>) -> Result<Self> {
        if resources.is_empty() {
            return Err(Error::Invalid("game needs at least one resource".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for r in &resources {
            if r.id.is_empty() || !seen.insert(r.id.clone()) {
                return Err(Error::Invalid(format!("bad or duplicate resource id '{}'", r.id)));
            }
        }
        for (i, p) in players.iter().enumerate() {
            if !p.weight.is_finite() || p.weight <= 0.0 {
                return Err(Error::Invalid(format!("player {i} weight must be > 0")));
            }
            if p.strategies.is_empty() {
                return Err(Error::Invalid(format!("player {i} has no strategies")));
            }
            for s in &p.strategies {
                if s.is_empty() {
                    return Err(Error::Invalid(format!("player {i} has an empty strategy")));
                }
                let mut in_s = std::collections::HashSet::new();
                for &j in s {
                    if j >= resources.len() {
                        return Err(Error::Invalid(format!(
                            "player {i} references resource index {j} out of range"
                        )));
                    }
                    if !in_s.insert(j) {
                        return Err(Error::Invalid(format!(
                            "player {i} repeats a resource within one strategy"
                        )));
                    }
                }
                if mode == GameMode::LoadBalancing && s.len() != 1 {
                    return Err(Error::Invalid(format!(
                        "load balancing strategies must be singletons (player {i})"
                    )));
                }
            }
        }
        Ok(AtomicGame { mode, resources, players })
    }

    pub fn mode(&self) -> GameMode {
        self.mode
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    /// Number of players.
    pub fn n(&self) -> usize {
        self.players.len()
    }

    /// Strategy `s` of player `i` as a resource-index slice.
    pub fn strategy(&self, i: usize, s: usize) -> &[usize] {
        &self.players[i].strategies[s]
    }

    pub fn total_weight(&self) -> f64 {
        self.players.iter().map(|p| p.weight).sum()
    }

    pub(crate) fn check_profile(&self, profile: &Profile) -> Result<()> {
        if profile.0.len() != self.players.len() {
            return Err(Error::InvalidProfile(format!(
                "profile length {} != player count {}",
                profile.0.len(),
                self.players.len()
            )));
        }
        for (i, &s) in profile.0.iter().enumerate() {
            if s >= self.players[i].strategies.len() {
                return Err(Error::InvalidProfile(format!(
                    "player {i} strategy index {s} out of range"
                )));
            }
        }
        Ok(())
    }
}

/// Load of every resource under `profile` (dense, by resource index).
pub fn congestion(game: &AtomicGame, profile: &Profile) -> Result<Vec<f64>> {
    game.check_profile(profile)?;
    let mut loads = vec![0.0; game.resources.len()];
    for (i, &s) in profile.0.iter().enumerate() {
        for &j in game.strategy(i, s) {
            loads[j] += game.players[i].weight;
        }
    }
    Ok(loads)
}

/// Cost of player `i` in `profile` given precomputed loads.
pub(crate) fn player_cost_from_loads(
    game: &AtomicGame,
    profile: &Profile,
    loads: &[f64],
    i: usize,
) -> f64 {
    game.strategy(i, profile.0[i])
        .iter()
        .map(|&j| game.resources[j].latency.eval(loads[j]))
        .sum()
}

/// Cost player `i` would incur by deviating to strategy `alt` while everyone
/// else stays put; `loads` are the loads of the undeviated profile.
pub(crate) fn deviation_cost(
    game: &AtomicGame,
    profile: &Profile,
    loads: &[f64],
    i: usize,
    alt: usize,
) -> f64 {
    let current = game.strategy(i, profile.0[i]);
    let w = game.players[i].weight;
    game.strategy(i, alt)
        .iter()
        .map(|&j| {
            let load = if current.contains(&j) { loads[j] } else { loads[j] + w };
            game.resources[j].latency.eval(load)
        })
        .sum()
}

/// Cost of player `i` in `profile`.
pub fn player_cost(game: &AtomicGame, profile: &Profile, i: usize) -> Result<f64> {
    let loads = congestion(game, profile)?;
    if i >= game.n() {
        return Err(Error::InvalidProfile(format!("player index {i} out of range")));
    }
    Ok(player_cost_from_loads(game, profile, &loads, i))
}

/// ln NSW of `profile`: the weighted geometric mean of player costs, in the
/// natural-log domain.
///
/// For load balancing games this is computed in the equivalent resource form
/// `sum_j k_j ln l_j(k_j) / sum_i w_i` (zero-load resources excluded); for
/// the congestion extension it is summed over player costs directly.
pub fn log_nsw(game: &AtomicGame, profile: &Profile) -> Result<LogNsw> {
    let loads = congestion(game, profile)?;
    let total_weight = game.total_weight();
    if game.n() == 0 {
        return Ok(LogNsw { value: 0.0, total_weight });
    }
    let num = match game.mode {
        GameMode::LoadBalancing => {
            let mut num = 0.0;
            for (j, &k) in loads.iter().enumerate() {
                if k > 0.0 {
                    let cost = game.resources[j].latency.eval(k);
                    if !(cost > 0.0) {
                        return Err(Error::Domain(format!(
                            "non-positive latency {cost} on loaded resource '{}'",
                            game.resources[j].id
                        )));
                    }
                    num += k * cost.ln();
                }
            }
            num
        }
        GameMode::Congestion => {
            let mut num = 0.0;
            for i in 0..game.n() {
                let cost = player_cost_from_loads(game, profile, &loads, i);
                if !(cost > 0.0) {
                    return Err(Error::Domain(format!("non-positive cost for player {i}")));
                }
                num += game.players[i].weight * cost.ln();
            }
            num
        }
    };
    Ok(LogNsw { value: num / total_weight, total_weight })
}

/// A non-atomic type: an amount (rate) of infinitesimal players sharing one
/// admissible resource set.
#[derive(Debug, Clone)]
pub struct PlayerType {
    pub rate: f64,
    pub strategies: Vec<usize>,
}

/// A non-atomic game.
#[derive(Debug, Clone)]
pub struct NonAtomicGame {
    resources: Vec<Resource>,
    types: Vec<PlayerType>,
}

/// Fractional split of each type's rate over the resources (dense,
/// type-major).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowProfile(pub Vec<Vec<f64>>);

impl NonAtomicGame {
    pub fn new(resources: Vec<Resource>, types: Vec<PlayerType>) -> Result<Self> {
        if resources.is_empty() {
            return Err(Error::Invalid("game needs at least one resource".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for r in &resources {
            if r.id.is_empty() || !seen.insert(r.id.clone()) {
                return Err(Error::Invalid(format!("bad or duplicate resource id '{}'", r.id)));
            }
        }
        for (i, t) in types.iter().enumerate() {
            if !t.rate.is_finite() || t.rate < 0.0 {
                return Err(Error::Invalid(format!("type {i} rate must be finite and >= 0")));
            }
            if t.strategies.is_empty() {
                return Err(Error::Invalid(format!("type {i} has no admissible resources")));
            }
            let mut in_s = std::collections::HashSet::new();
            for &j in &t.strategies {
                if j >= resources.len() || !in_s.insert(j) {
                    return Err(Error::Invalid(format!("type {i} has a bad admissible set")));
                }
            }
        }
        Ok(NonAtomicGame { resources, types })
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn types(&self) -> &[PlayerType] {
        &self.types
    }

    pub fn total_rate(&self) -> f64 {
        self.types.iter().map(|t| t.rate).sum()
    }

    pub(crate) fn check_flow(&self, flow: &FlowProfile) -> Result<()> {
        if flow.0.len() != self.types.len() {
            return Err(Error::InvalidProfile("flow/type count mismatch".into()));
        }
        for (i, per_type) in flow.0.iter().enumerate() {
            if per_type.len() != self.resources.len() {
                return Err(Error::InvalidProfile(format!("flow row {i} has wrong width")));
            }
            let mut sum = 0.0;
            for (j, &x) in per_type.iter().enumerate() {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidProfile(format!("negative flow for type {i}")));
                }
                if x > 0.0 && !self.types[i].strategies.contains(&j) {
                    return Err(Error::InvalidProfile(format!(
                        "type {i} sends flow to inadmissible resource {j}"
                    )));
                }
                sum += x;
            }
            let r = self.types[i].rate;
            if (sum - r).abs() > 1e-9 * 1.0_f64.max(r) {
                return Err(Error::InvalidProfile(format!(
                    "type {i} flow sums to {sum}, rate is {r}"
                )));
            }
        }
        Ok(())
    }

    /// Total mass on each resource.
    pub fn flow_congestion(&self, flow: &FlowProfile) -> Result<Vec<f64>> {
        self.check_flow(flow)?;
        let mut loads = vec![0.0; self.resources.len()];
        for per_type in &flow.0 {
            for (j, &x) in per_type.iter().enumerate() {
                loads[j] += x;
            }
        }
        Ok(loads)
    }
}

/// ln NSW of a flow: `sum_j k_j ln l_j(k_j) / sum_i r_i`, zero-mass
/// resources excluded.
pub fn log_nsw_flow(game: &NonAtomicGame, flow: &FlowProfile) -> Result<LogNsw> {
    let loads = game.flow_congestion(flow)?;
    let total_weight = game.total_rate();
    if total_weight == 0.0 {
        return Ok(LogNsw { value: 0.0, total_weight });
    }
    let mut num = 0.0;
    for (j, &k) in loads.iter().enumerate() {
        if k > 0.0 {
            let cost = game.resources[j].latency.eval(k);
            if !(cost > 0.0) {
                return Err(Error::Domain(format!(
                    "non-positive latency on loaded resource '{}'",
                    game.resources[j].id
                )));
            }
            num += k * cost.ln();
        }
    }
    Ok(LogNsw { value: num / total_weight, total_weight })
}
