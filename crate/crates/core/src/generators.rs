//! Adversarial lower-bound instance families, each bundled with its
//! designated equilibrium/greedy profile, a designated optimal candidate,
//! and the exact (pre-limit) closed-form predicted NSW ratio.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::latency::LatencyFunction;
use crate::model::{
    log_nsw, log_nsw_flow, AtomicGame, FlowProfile, GameMode, NonAtomicGame, Player, PlayerType,
    Profile, Resource,
};
use crate::num::pow0;
use crate::online::OnlineInstance;

const MAX_PLAYERS: u128 = 1_000_000;

/// The game produced by a generator.
#[derive(Debug, Clone)]
pub enum GeneratedGame {
    Atomic(AtomicGame),
    Online(OnlineInstance),
    NonAtomic(NonAtomicGame),
}

/// A designated assignment (strategy profile or flow).
#[derive(Debug, Clone)]
pub enum Designated {
    Atomic(Profile),
    Flow(FlowProfile),
}

/// A generated instance with its designated profiles and predicted ratio.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub game: GeneratedGame,
    /// Designated equilibrium (atomic/non-atomic) or greedy outcome (online).
    pub equilibrium: Designated,
    /// Designated optimal candidate; upper-bounds the true optimum.
    pub opt_candidate: Designated,
    pub predicted_ratio: f64,
    pub family: String,
    pub params: BTreeMap<String, String>,
}

impl GeneratedInstance {
    /// The atomic game, when there is one (online instances included).
    pub fn atomic_game(&self) -> Option<&AtomicGame> {
        match &self.game {
            GeneratedGame::Atomic(g) => Some(g),
            GeneratedGame::Online(inst) => Some(inst.game()),
            GeneratedGame::NonAtomic(_) => None,
        }
    }

    /// exp(ln NSW(designated equilibrium) - ln NSW(designated opt)).
    pub fn measured_ratio(&self) -> Result<f64> {
        match (&self.game, &self.equilibrium, &self.opt_candidate) {
            (GeneratedGame::NonAtomic(g), Designated::Flow(eq), Designated::Flow(opt)) => {
                Ok((log_nsw_flow(g, eq)?.value - log_nsw_flow(g, opt)?.value).exp())
            }
            (game, Designated::Atomic(eq), Designated::Atomic(opt)) => {
                let g = match game {
                    GeneratedGame::Atomic(g) => g,
                    GeneratedGame::Online(inst) => inst.game(),
                    GeneratedGame::NonAtomic(_) => unreachable!(),
                };
                Ok((log_nsw(g, eq)?.value - log_nsw(g, opt)?.value).exp())
            }
            _ => Err(Error::Internal("mismatched designated profile kinds".into())),
        }
    }
}

/// Strategy-set shape of the weighted lower-bound family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightedVariant {
    /// Each group-j player may use only resources of groups j and j+1;
    /// the designated profile is an exact PNE for every s >= 1.
    RestrictedStrategies,
    /// Every player may use every resource; the designated profile is a PNE
    /// only for sufficiently large s (check with `is_pne`).
    Symmetric,
}

fn check_params_weighted(m: usize, s: u64, k: f64, h: f64) -> Result<()> {
    if m < 3 {
        return Err(Error::Invalid("weighted family needs m >= 3".into()));
    }
    if s < 1 {
        return Err(Error::Invalid("weighted family needs s >= 1".into()));
    }
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::Invalid("weighted family needs k >= 1".into()));
    }
    if !(0.0..1.0).contains(&h) {
        return Err(Error::Invalid("weighted family needs 0 <= h < 1".into()));
    }
    Ok(())
}

/// Shared closed-form pieces: A, B, and the total weight A + B + h^m k^{m-1}.
fn weighted_sums(m: usize, k: f64, h: f64) -> (f64, f64, f64) {
    let km1 = k.powi(m as i32 - 1);
    let mut a = 0.0;
    for j in 1..=m.saturating_sub(2) {
        a += k.powi(j as i32);
    }
    let mut b = 0.0;
    for j in (m - 1)..=(2 * m - 2) {
        b += pow0(h, (j + 1 - m) as f64) * km1;
    }
    let total = a + b + pow0(h, m as f64) * km1;
    (a, b, total)
}

/// The weighted load balancing lower-bound family LB(m, s).
///
/// Resources come in groups R_1..R_2m with |R_j| = s^{j-1} and latency
/// `alpha_j * fhat_j(beta_j * x)` (fhat is `f` below group m, `g` from group
/// m on); players come in groups N_1..N_{2m-1} with |N_j| = s^j and weight
/// 1/beta_{j+1}. The designated sigma packs s players of N_j on each R_j
/// resource; sigma* spreads N_j one per R_{j+1} resource. h = 0 truncates to
/// groups R_1..R_m / N_1..N_{m-1}.
pub fn weighted_lb(
    m: usize,
    s: u64,
    k: f64,
    h: f64,
    f: &LatencyFunction,
    g: &LatencyFunction,
    variant: WeightedVariant,
) -> Result<GeneratedInstance> {
    check_params_weighted(m, s, k, h)?;
    let res_groups = if h == 0.0 { m } else { 2 * m };
    let play_groups = res_groups - 1;

    let mut total_players: u128 = 0;
    for j in 1..=play_groups {
        total_players += (s as u128).pow(j as u32);
    }
    if total_players > MAX_PLAYERS {
        return Err(Error::TooLarge { need: total_players, cap: MAX_PLAYERS });
    }

    let sf = s as f64;
    let beta = |j: usize| -> f64 {
        if j <= m - 1 {
            (sf / k).powi(j as i32 - 1)
        } else {
            pow0(sf / h, (j - m) as f64) * (sf / k).powi(m as i32 - 1)
        }
    };
    let rf = f.eval(k) / f.eval(k + 1.0);
    let alpha = |j: usize| -> f64 {
        if j <= m - 1 {
            rf.powi(j as i32 - 1)
        } else if j <= 2 * m - 1 {
            pow0(g.eval(h) / g.eval(h + 1.0), (j - m) as f64)
                * (f.eval(k) / g.eval(h + 1.0))
                * rf.powi(m as i32 - 2)
        } else {
            (g.eval(h) / g.eval(1.0))
                * pow0(g.eval(h) / g.eval(h + 1.0), (m - 1) as f64)
                * (f.eval(k) / g.eval(h + 1.0))
                * rf.powi(m as i32 - 2)
        }
    };

    // Global resource layout: groups in order, s^{j-1} resources each.
    let mut resources = Vec::new();
    let mut group_offset = vec![0usize; res_groups + 1];
    for j in 1..=res_groups {
        group_offset[j] = resources.len();
        let fhat = if j <= m - 1 { f } else { g };
        let latency = LatencyFunction::scaled(alpha(j), beta(j), fhat.clone())?;
        for t in 0..(s as usize).pow(j as u32 - 1) {
            resources.push(Resource { id: format!("r{j}_{t}"), latency: latency.clone() });
        }
    }

    let mut players = Vec::new();
    let mut eq = Vec::new();
    let mut opt = Vec::new();
    for j in 1..=play_groups {
        let w = 1.0 / beta(j + 1);
        let group_size = (s as usize).pow(j as u32);
        let strategies: Vec<Vec<usize>> = match variant {
            WeightedVariant::RestrictedStrategies => {
                let own = (s as usize).pow(j as u32 - 1);
                let next = (s as usize).pow(j as u32);
                (0..own)
                    .map(|t| vec![group_offset[j] + t])
                    .chain((0..next).map(|t| vec![group_offset[j + 1] + t]))
                    .collect()
            }
            WeightedVariant::Symmetric => (0..resources.len()).map(|r| vec![r]).collect(),
        };
        for p in 0..group_size {
            players.push(Player { weight: w, strategies: strategies.clone() });
            let (sigma_res, sigma_star_res) =
                (group_offset[j] + p / s as usize, group_offset[j + 1] + p);
            match variant {
                WeightedVariant::RestrictedStrategies => {
                    let own = (s as usize).pow(j as u32 - 1);
                    eq.push(p / s as usize);
                    opt.push(own + p);
                }
                WeightedVariant::Symmetric => {
                    eq.push(sigma_res);
                    opt.push(sigma_star_res);
                }
            }
        }
    }
    let game = AtomicGame::new(GameMode::LoadBalancing, resources, players)?;

    let (a, b, total) = weighted_sums(m, k, h);
    let ln_ratio = (a * (f.eval(k + 1.0) / f.eval(1.0)).ln()
        + b * (g.eval(h + 1.0) / g.eval(1.0)).ln())
        / total;

    let mut params = BTreeMap::new();
    params.insert("m".into(), m.to_string());
    params.insert("s".into(), s.to_string());
    params.insert("k".into(), k.to_string());
    params.insert("h".into(), h.to_string());
    if let Some(spec) = f.spec() {
        params.insert("f".into(), spec);
    }
    if let Some(spec) = g.spec() {
        params.insert("g".into(), spec);
    }
    params.insert(
        "variant".into(),
        match variant {
            WeightedVariant::RestrictedStrategies => "restrictedStrategies".into(),
            WeightedVariant::Symmetric => "symmetric".into(),
        },
    );
    Ok(GeneratedInstance {
        game: GeneratedGame::Atomic(game),
        equilibrium: Designated::Atomic(Profile(eq)),
        opt_candidate: Designated::Atomic(Profile(opt)),
        predicted_ratio: ln_ratio.exp(),
        family: "weightedLB".into(),
        params,
    })
}

/// The weighted family at s=2, k=1, h=0 with monomial latencies: all groups
/// below the last share the plain `x^p` latency, and the NPoA still tends
/// to 2^p.
pub fn identical_resources_lb(m: usize, p: u32) -> Result<GeneratedInstance> {
    let f = LatencyFunction::monomial(p);
    let mut inst = weighted_lb(m, 2, 1.0, 0.0, &f, &f, WeightedVariant::RestrictedStrategies)?;
    inst.family = "identicalLB".into();
    inst.params = BTreeMap::from([("m".into(), m.to_string()), ("p".into(), p.to_string())]);
    Ok(inst)
}

/// The unweighted lower-bound family: m groups of resources, mk unit
/// players; group-j players may use their own group's resources plus the
/// head resource of group j+1.
pub fn unweighted_lb(m: usize, k: u64, o: u64, f: &LatencyFunction) -> Result<GeneratedInstance> {
    if m < 1 || k < 1 || o < 1 || o > k {
        return Err(Error::Invalid("unweighted family needs m >= 1, k >= 1, 1 <= o <= k".into()));
    }
    let total_players = (m as u128) * (k as u128);
    if total_players > MAX_PLAYERS {
        return Err(Error::TooLarge { need: total_players, cap: MAX_PLAYERS });
    }
    let (kf, of) = (k as f64, o as f64);
    let rf = f.eval(kf) / f.eval(kf + 1.0);
    let tail = f.eval(kf) / f.eval(1.0);

    let mut resources = Vec::new();
    let mut group_offset = vec![0usize; m + 2];
    for j in 1..=m {
        group_offset[j] = resources.len();
        let size = if j < m { (k - o + 1) as usize } else { (k + 1) as usize };
        for t in 0..size {
            let scale = if t == 0 { rf.powi(j as i32 - 1) } else { tail * rf.powi(j as i32 - 1) };
            resources.push(Resource {
                id: format!("r{j}_{t}"),
                latency: LatencyFunction::scaled(scale, 1.0, f.clone())?,
            });
        }
    }
    group_offset[m + 1] = resources.len();

    let mut players = Vec::new();
    let mut eq = Vec::new();
    let mut opt = Vec::new();
    for j in 1..=m {
        let own = if j < m { (k - o + 1) as usize } else { (k + 1) as usize };
        let strategies: Vec<Vec<usize>> = if j < m {
            (0..own)
                .map(|t| vec![group_offset[j] + t])
                .chain(std::iter::once(vec![group_offset[j + 1]]))
                .collect()
        } else {
            (0..own).map(|t| vec![group_offset[j] + t]).collect()
        };
        for p in 0..k as usize {
            players.push(Player { weight: 1.0, strategies: strategies.clone() });
            eq.push(0);
            if j < m {
                // First o players overflow to the next group's head resource;
                // the rest spread over this group's tail resources.
                opt.push(if p < o as usize { own } else { p - o as usize + 1 });
            } else {
                opt.push(p + 1);
            }
        }
    }
    let game = AtomicGame::new(GameMode::LoadBalancing, resources, players)?;

    let exponent = of * (m as f64 - 1.0) / (kf * m as f64);
    let predicted = (f.eval(kf + 1.0) / f.eval(of)).powf(exponent);

    let mut params = BTreeMap::from([
        ("m".into(), m.to_string()),
        ("k".into(), k.to_string()),
        ("o".into(), o.to_string()),
    ]);
    if let Some(spec) = f.spec() {
        params.insert("f".into(), spec);
    }
    Ok(GeneratedInstance {
        game: GeneratedGame::Atomic(game),
        equilibrium: Designated::Atomic(Profile(eq)),
        opt_candidate: Designated::Atomic(Profile(opt)),
        predicted_ratio: predicted,
        family: "unweightedLB".into(),
        params,
    })
}

/// The non-atomic lower-bound family: a single type of rate k over resource
/// 1 with latency f and resource 2 with the constant latency f(k).
pub fn non_atomic(k: f64, o: f64, f: &LatencyFunction) -> Result<GeneratedInstance> {
    if !(k.is_finite() && o.is_finite() && o > 0.0 && k >= o) {
        return Err(Error::Invalid("non-atomic family needs k >= o > 0".into()));
    }
    let resources = vec![
        Resource { id: "r1".into(), latency: f.clone() },
        Resource { id: "r2".into(), latency: LatencyFunction::constant(f.eval(k))? },
    ];
    let game = NonAtomicGame::new(
        resources,
        vec![PlayerType { rate: k, strategies: vec![0, 1] }],
    )?;
    let predicted = (f.eval(k) / f.eval(o)).powf(o / k);
    let mut params = BTreeMap::from([("k".into(), k.to_string()), ("o".into(), o.to_string())]);
    if let Some(spec) = f.spec() {
        params.insert("f".into(), spec);
    }
    Ok(GeneratedInstance {
        game: GeneratedGame::NonAtomic(game),
        equilibrium: Designated::Flow(FlowProfile(vec![vec![k, 0.0]])),
        opt_candidate: Designated::Flow(FlowProfile(vec![vec![o, k - o]])),
        predicted_ratio: predicted,
        family: "nonAtomic".into(),
        params,
    })
}

/// The greedy adversary: a chain of 2m resources where client j may use
/// r_j or r_{j+1}; processed in reverse client order, every step is a tie
/// that the first-listed rule resolves onto r_j.
pub fn online_greedy_lb(
    m: usize,
    k: f64,
    h: f64,
    f: &LatencyFunction,
    g: &LatencyFunction,
) -> Result<GeneratedInstance> {
    check_params_weighted(m, 1, k, h)?;
    let res_count = if h == 0.0 { m } else { 2 * m };
    let client_count = res_count - 1;

    let beta = |j: usize| -> f64 {
        if j <= m - 1 {
            (1.0 / k).powi(j as i32 - 1)
        } else {
            pow0(1.0 / h, (j - m) as f64) * (1.0 / k).powi(m as i32 - 1)
        }
    };
    // Chain ratios that keep every greedy step an exact tie.
    let rf = f.eval(k).powf(k + 1.0) / f.eval(k + 1.0).powf(k + 1.0);
    let rg = pow0(g.eval(h), h + 1.0) / g.eval(h + 1.0).powf(h + 1.0);
    let bridge = f.eval(k) * pow0(g.eval(h), h) / g.eval(h + 1.0).powf(h + 1.0);
    let alpha = |j: usize| -> f64 {
        if j <= m - 1 {
            rf.powi(j as i32 - 1)
        } else if j <= 2 * m - 1 {
            pow0(rg, (j - m) as f64) * bridge * rf.powi(m as i32 - 2)
        } else {
            (g.eval(h) / g.eval(1.0)) * pow0(rg, (m - 1) as f64) * bridge * rf.powi(m as i32 - 2)
        }
    };

    let mut resources = Vec::new();
    for j in 1..=res_count {
        let fhat = if j <= m - 1 { f } else { g };
        resources.push(Resource {
            id: format!("r{j}"),
            latency: LatencyFunction::scaled(alpha(j), beta(j), fhat.clone())?,
        });
    }
    let players: Vec<Player> = (1..=client_count)
        .map(|j| Player {
            weight: 1.0 / beta(j + 1),
            strategies: vec![vec![j - 1], vec![j]],
        })
        .collect();
    let game = AtomicGame::new(GameMode::LoadBalancing, resources, players)?;
    let arrival_order: Vec<usize> = (0..client_count).rev().collect();
    let instance = OnlineInstance::new(game, arrival_order)?;

    let (a, b, total) = weighted_sums(m, k, h);
    let phi = (k + 1.0) * f.eval(k + 1.0).ln() - k * f.eval(k).ln() - f.eval(1.0).ln();
    let psi = (h + 1.0) * g.eval(h + 1.0).ln() - crate::num::xlny(h, g.eval(h))
        - g.eval(1.0).ln();
    let predicted = ((a * phi + b * psi) / total).exp();

    let mut params = BTreeMap::from([
        ("m".into(), m.to_string()),
        ("k".into(), k.to_string()),
        ("h".into(), h.to_string()),
    ]);
    if let Some(spec) = f.spec() {
        params.insert("f".into(), spec);
    }
    if let Some(spec) = g.spec() {
        params.insert("g".into(), spec);
    }
    Ok(GeneratedInstance {
        game: GeneratedGame::Online(instance),
        equilibrium: Designated::Atomic(Profile(vec![0; client_count])),
        opt_candidate: Designated::Atomic(Profile(vec![1; client_count])),
        predicted_ratio: predicted,
        family: "onlineGreedyLB".into(),
        params,
    })
}

/// The universal online adversary: the disjoint union of the recursive
/// instances I(0), I(1), ..., I(m) over identical `x^p` resources. Each
/// I(i) is a fundamental resource plus sub-instances I(0..i-1); client t of
/// an I(i) copy has weight 2^{t-1} and may use the copy's fundamental
/// resource (listed first) or the fundamental of its I(t-1) sub-copy.
/// Clients are processed by ascending containing-instance type, then
/// ascending weight.
pub fn online_universal(m: usize, p: u32) -> Result<GeneratedInstance> {
    if m > 16 {
        return Err(Error::TooLarge { need: 1u128 << (m.min(127)), cap: 1 << 16 });
    }
    let latency = LatencyFunction::monomial(p);
    let mut resources: Vec<Resource> = Vec::new();
    // (weight, first resource, second resource, sort key)
    let mut clients: Vec<(f64, usize, usize, (usize, usize))> = Vec::new();

    fn build(
        i: usize,
        latency: &LatencyFunction,
        resources: &mut Vec<Resource>,
        clients: &mut Vec<(f64, usize, usize, (usize, usize))>,
    ) -> usize {
        let subs: Vec<usize> = (0..i).map(|t| build(t, latency, resources, clients)).collect();
        let fund = resources.len();
        resources.push(Resource { id: format!("r{fund}"), latency: latency.clone() });
        for t in 1..=i {
            clients.push((2f64.powi(t as i32 - 1), fund, subs[t - 1], (i, t)));
        }
        fund
    }
    for i in 0..=m {
        build(i, &latency, &mut resources, &mut clients);
    }

    let mut arrival_order: Vec<usize> = (0..clients.len()).collect();
    arrival_order.sort_by_key(|&c| clients[c].3);

    let players: Vec<Player> = clients
        .iter()
        .map(|&(w, first, second, _)| Player { weight: w, strategies: vec![vec![first], vec![second]] })
        .collect();
    let n = players.len();
    let game = AtomicGame::new(GameMode::LoadBalancing, resources, players)?;
    let instance = OnlineInstance::new(game, arrival_order)?;

    // Closed form from exact per-copy counts: 2^{m-i} copies of type I(i).
    let pf = p as f64;
    let mut num_eq = 0.0;
    let mut num_opt = 0.0;
    let mut total_weight = 0.0;
    for i in 1..=m {
        let copies = 2f64.powi((m - i) as i32);
        let load = 2f64.powi(i as i32) - 1.0;
        num_eq += copies * load * pf * load.ln();
        for t in 1..=i {
            let w = 2f64.powi(t as i32 - 1);
            num_opt += copies * w * pf * w.ln();
        }
        total_weight += copies * load;
    }
    let predicted = if m == 0 { 1.0 } else { ((num_eq - num_opt) / total_weight).exp() };

    Ok(GeneratedInstance {
        game: GeneratedGame::Online(instance),
        equilibrium: Designated::Atomic(Profile(vec![0; n])),
        opt_candidate: Designated::Atomic(Profile(vec![1; n])),
        predicted_ratio: predicted,
        family: "onlineUniversal".into(),
        params: BTreeMap::from([("m".into(), m.to_string()), ("p".into(), p.to_string())]),
    })
}

/// The linear congestion-game family: groups R_1, R_2 of n - m resources
/// and R_3 of m resources (m = ceil(n * eps)); n - m players choose between
/// a private R_1 resource and a private R_2 resource, and m players choose
/// between all of R_2 and a private R_3 resource.
pub fn linear_cg(n: usize, eps: f64) -> Result<GeneratedInstance> {
    if n < 2 || !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Invalid("linear CG needs n >= 2 and 0 < eps < 1/2".into()));
    }
    let m = (n as f64 * eps).ceil() as usize;
    let q = n - m;
    let mf = m as f64;
    let qf = q as f64;

    let slope = |c: f64| LatencyFunction::poly(vec![0.0, c]);
    let mut resources = Vec::new();
    for t in 0..q {
        resources.push(Resource { id: format!("a{t}"), latency: slope(mf + 1.0)? });
    }
    for t in 0..q {
        resources.push(Resource { id: format!("b{t}"), latency: slope(1.0)? });
    }
    for t in 0..m {
        resources.push(Resource { id: format!("c{t}"), latency: slope(mf * qf)? });
    }
    let r2: Vec<usize> = (q..2 * q).collect();

    let mut players = Vec::new();
    for t in 0..q {
        players.push(Player { weight: 1.0, strategies: vec![vec![t], vec![q + t]] });
    }
    for t in 0..m {
        players.push(Player { weight: 1.0, strategies: vec![r2.clone(), vec![2 * q + t]] });
    }
    let game = AtomicGame::new(GameMode::Congestion, resources, players)?;
    let predicted = (mf + 1.0).powf(qf / n as f64);

    Ok(GeneratedInstance {
        game: GeneratedGame::Atomic(game),
        equilibrium: Designated::Atomic(Profile(vec![0; n])),
        opt_candidate: Designated::Atomic(Profile(vec![1; n])),
        predicted_ratio: predicted,
        family: "linearCG".into(),
        params: BTreeMap::from([("n".into(), n.to_string()), ("eps".into(), eps.to_string())]),
    })
}
