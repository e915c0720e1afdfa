//! Wardrop equilibria for non-atomic games: verification, symmetric
//! water-filling, conditional-gradient potential minimization, and NSW
//! ratios of flows.

use crate::error::{Error, Result};
use crate::model::{log_nsw_flow, FlowProfile, NonAtomicGame};

const BISECTION_STEPS: usize = 200;

fn resource_costs(game: &NonAtomicGame, flow: &FlowProfile) -> Result<Vec<f64>> {
    let loads = game.flow_congestion(flow)?;
    Ok(game
        .resources()
        .iter()
        .zip(&loads)
        .map(|(r, &k)| r.latency.eval(k))
        .collect())
}

/// Largest violation of the Wardrop condition: over every type and every
/// resource carrying more than `eps * rate`, the excess of its cost over the
/// cheapest admissible alternative. Zero (or negative) means equilibrium.
pub fn wardrop_gap(game: &NonAtomicGame, flow: &FlowProfile, eps: f64) -> Result<f64> {
    let costs = resource_costs(game, flow)?;
    let mut gap: f64 = 0.0;
    for (i, t) in game.types().iter().enumerate() {
        if t.rate == 0.0 {
            continue;
        }
        let cheapest = t
            .strategies
            .iter()
            .map(|&j| costs[j])
            .fold(f64::INFINITY, f64::min);
        for &j in &t.strategies {
            if flow.0[i][j] > eps * t.rate {
                gap = gap.max(costs[j] - cheapest);
            }
        }
    }
    Ok(gap)
}

/// True iff every used resource (mass > eps * rate) costs at most `eps` more
/// than any admissible alternative.
pub fn wardrop_check(game: &NonAtomicGame, flow: &FlowProfile, eps: f64) -> Result<bool> {
    Ok(wardrop_gap(game, flow, eps)? <= eps)
}

/// Largest `x` in `[0, cap]` with `l(x) <= lambda` (monotone pseudo-inverse
/// by bisection).
fn pseudo_inverse(latency: &crate::latency::LatencyFunction, lambda: f64, cap: f64) -> f64 {
    if latency.eval(cap) <= lambda {
        return cap;
    }
    if latency.eval(0.0) > lambda {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if latency.eval(mid) <= lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Wardrop equilibrium of a symmetric (single-type, all resources
/// admissible) instance: bisection on a common cost level, each resource
/// carrying the largest mass not exceeding that cost.
pub fn symmetric_waterfill(game: &NonAtomicGame) -> Result<FlowProfile> {
    if game.types().len() != 1 || game.types()[0].strategies.len() != game.resources().len() {
        return Err(Error::Invalid(
            "waterfill needs a single type with all resources admissible".into(),
        ));
    }
    let rate = game.types()[0].rate;
    let m = game.resources().len();
    if rate == 0.0 {
        return Ok(FlowProfile(vec![vec![0.0; m]]));
    }
    let fill = |lambda: f64| -> Vec<f64> {
        game.resources()
            .iter()
            .map(|r| pseudo_inverse(&r.latency, lambda, rate))
            .collect()
    };
    let mass = |x: &[f64]| x.iter().sum::<f64>();

    let mut lo = 0.0;
    let mut hi = game
        .resources()
        .iter()
        .map(|r| r.latency.eval(rate))
        .fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mass(&fill(mid)) >= rate {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Trim any excess at the upper level back toward the lower level; only
    // resources whose latency is flat at the final level have slack, and
    // their cost is unchanged by trimming.
    let x_lo = fill(lo);
    let mut x = fill(hi);
    let mut excess = mass(&x) - rate;
    for j in 0..m {
        if excess <= 0.0 {
            break;
        }
        let trim = excess.min(x[j] - x_lo[j]);
        x[j] -= trim;
        excess -= trim;
    }
    if (mass(&x) - rate).abs() > 1e-9 * rate {
        return Err(Error::DidNotConverge(format!(
            "waterfill mass {} != rate {rate}",
            mass(&x)
        )));
    }
    // Exact mass conservation for downstream flow validation.
    let drift = rate - mass(&x);
    if let Some(max_j) = (0..m).max_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap()) {
        x[max_j] += drift;
    }
    let flow = FlowProfile(vec![x]);
    game.check_flow(&flow)?;
    Ok(flow)
}

/// Conditional-gradient (Frank-Wolfe) descent of the Beckmann potential:
/// repeatedly average toward each type's all-or-nothing assignment to its
/// cheapest admissible resource with step 2/(t+2), stopping as soon as the
/// flow passes `wardrop_check(eps)`.
pub fn potential_minimize(
    game: &NonAtomicGame,
    max_iters: usize,
    eps: f64,
) -> Result<FlowProfile> {
    let m = game.resources().len();
    let mut flow = FlowProfile(
        game.types()
            .iter()
            .map(|t| {
                let mut row = vec![0.0; m];
                row[t.strategies[0]] = t.rate;
                row
            })
            .collect(),
    );
    for t in 0..max_iters {
        if wardrop_check(game, &flow, eps)? {
            return Ok(flow);
        }
        let costs = resource_costs(game, &flow)?;
        let gamma = 2.0 / (t as f64 + 2.0);
        for (i, ty) in game.types().iter().enumerate() {
            let mut best = ty.strategies[0];
            for &j in &ty.strategies[1..] {
                if costs[j] < costs[best] {
                    best = j;
                }
            }
            for j in 0..m {
                let target = if j == best { ty.rate } else { 0.0 };
                flow.0[i][j] = (1.0 - gamma) * flow.0[i][j] + gamma * target;
            }
        }
    }
    if wardrop_check(game, &flow, eps)? {
        return Ok(flow);
    }
    let gap = wardrop_gap(game, &flow, eps)?;
    Err(Error::DidNotConverge(format!(
        "potential minimization gap {gap:.3e} after {max_iters} iterations"
    )))
}

/// exp(ln NSW(eq) - ln NSW(opt)).
pub fn nonatomic_ratio(
    game: &NonAtomicGame,
    equilibrium: &FlowProfile,
    opt: &FlowProfile,
) -> Result<f64> {
    let eq = log_nsw_flow(game, equilibrium)?;
    let best = log_nsw_flow(game, opt)?;
    Ok((eq.value - best.value).exp())
}

/// Desk-scale NSW-optimal flow for a single-type instance with at most three
/// resources: dense simplex grid search with local refinement. The
/// objective `sum_j k_j ln l_j(k_j)` is non-convex in general, so this is a
/// stand-in adequate for small instances, not a general solver.
pub fn grid_search_opt(game: &NonAtomicGame) -> Result<FlowProfile> {
    if game.types().len() != 1 {
        return Err(Error::Invalid("grid search supports a single type".into()));
    }
    let ty = &game.types()[0];
    let k = ty.strategies.len();
    if k > 3 {
        return Err(Error::Invalid("grid search supports at most 3 resources".into()));
    }
    let rate = ty.rate;
    let m = game.resources().len();
    let objective = |alloc: &[f64]| -> f64 {
        let mut num = 0.0;
        for (pos, &j) in ty.strategies.iter().enumerate() {
            let mass = alloc[pos];
            if mass > 0.0 {
                num += mass * game.resources()[j].latency.eval(mass).ln();
            }
        }
        num
    };
    let mut best_alloc = vec![0.0; k];
    best_alloc[0] = rate;
    if k > 1 && rate > 0.0 {
        let mut best_val = objective(&best_alloc);
        // (center, halfwidth) box refined around the incumbent.
        let mut center = best_alloc.clone();
        let mut half = rate;
        const STEPS: usize = 120;
        for _round in 0..6 {
            let lo: Vec<f64> = center.iter().map(|c| (c - half).max(0.0)).collect();
            let hi: Vec<f64> = center.iter().map(|c| (c + half).min(rate)).collect();
            let coord = |pos: usize, s: usize| {
                lo[pos] + (hi[pos] - lo[pos]) * s as f64 / STEPS as f64
            };
            if k == 2 {
                for s in 0..=STEPS {
                    let a = coord(0, s);
                    let alloc = vec![a, rate - a];
                    let v = objective(&alloc);
                    if v < best_val {
                        best_val = v;
                        best_alloc = alloc;
                    }
                }
            } else {
                for s0 in 0..=STEPS {
                    let a = coord(0, s0);
                    for s1 in 0..=STEPS {
                        let b = coord(1, s1);
                        if a + b > rate {
                            break;
                        }
                        let alloc = vec![a, b, rate - a - b];
                        let v = objective(&alloc);
                        if v < best_val {
                            best_val = v;
                            best_alloc = alloc;
                        }
                    }
                }
            }
            center = best_alloc.clone();
            half *= 0.2;
        }
    }
    let mut row = vec![0.0; m];
    for (pos, &j) in ty.strategies.iter().enumerate() {
        row[j] = best_alloc[pos];
    }
    let flow = FlowProfile(vec![row]);
    game.check_flow(&flow)?;
    Ok(flow)
}
