//! Single-instance subcommand implementations and the shared family
//! dispatcher used by both `generate` and `experiment`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::json;

use nswlb::bounds::{poly_bounds, sup_greedy_general, sup_nonatomic, sup_unweighted, sup_weighted_general};
use nswlb::equilibria::{
    best_response_dynamics_traced, is_pne, DynamicsOutcome, Schedule,
};
use nswlb::generators::{self, GeneratedGame, GeneratedInstance, WeightedVariant};
use nswlb::json::{
    generated_to_json, parse_file, parse_profile, DesignatedJson, InputGame, LoadedFile,
    MetadataJson,
};
use nswlb::model::{log_nsw, log_nsw_flow, player_cost};
use nswlb::nonatomic::{potential_minimize, wardrop_gap};
use nswlb::online::{competitive_ratio, greedy_assign, greedy_step_cost};
use nswlb::optima::{brute_force_opt, unweighted_opt_matching, OptMethod};
use nswlb::{AtomicGame, Error, FlowProfile, LatencyFunction, Profile, Result};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<LoadedFile> {
    parse_file(&read(path)?)
}

fn choices_from(designated: &DesignatedJson) -> Result<Profile> {
    match designated {
        DesignatedJson::Choices { choices } => Ok(Profile(choices.clone())),
        DesignatedJson::Flows { .. } => {
            Err(Error::Invalid("expected a strategy profile, got flows".into()))
        }
    }
}

fn flows_from(designated: &DesignatedJson) -> Result<FlowProfile> {
    match designated {
        DesignatedJson::Flows { flows } => Ok(FlowProfile(flows.clone())),
        DesignatedJson::Choices { .. } => {
            Err(Error::Invalid("expected flows, got a strategy profile".into()))
        }
    }
}

/// The profile to analyze: an explicit --profile file wins, otherwise the
/// file's designated equilibrium metadata.
fn pick_profile(
    explicit: Option<&Path>,
    metadata: Option<&MetadataJson>,
) -> Result<DesignatedJson> {
    if let Some(path) = explicit {
        return parse_profile(&read(path)?);
    }
    metadata
        .map(|m| m.designated_equilibrium.clone())
        .ok_or_else(|| {
            Error::Invalid("no --profile given and no designated equilibrium in file".into())
        })
}

pub fn analyze(game_path: &Path, profile_path: Option<&Path>) -> Result<()> {
    let loaded = load(game_path)?;
    let designated = pick_profile(profile_path, loaded.metadata.as_ref())?;
    let out = match &loaded.game {
        InputGame::Atomic(_) | InputGame::Online(_) => {
            let g: &AtomicGame = match &loaded.game {
                InputGame::Atomic(g) => g,
                InputGame::Online(oi) => oi.game(),
                InputGame::NonAtomic(_) => unreachable!(),
            };
            let profile = choices_from(&designated)?;
            let value = log_nsw(g, &profile)?;
            let costs = (0..g.n())
                .map(|i| player_cost(g, &profile, i))
                .collect::<Result<Vec<f64>>>()?;
            let mut out = json!({
                "logNsw": value.value,
                "nsw": value.nsw(),
                "playerCosts": costs,
                "isPne": is_pne(g, &profile, 1e-9)?,
            });
            if let Some(meta) = &loaded.metadata {
                let opt = choices_from(&meta.designated_opt)?;
                let ratio = (value.value - log_nsw(g, &opt)?.value).exp();
                out["measuredRatio"] = json!(ratio);
                out["predictedRatio"] = json!(meta.predicted_ratio);
            }
            out
        }
        InputGame::NonAtomic(g) => {
            let flow = flows_from(&designated)?;
            let value = log_nsw_flow(g, &flow)?;
            let gap = wardrop_gap(g, &flow, 1e-9)?;
            let mut out = json!({
                "logNsw": value.value,
                "nsw": value.nsw(),
                "wardropGap": gap,
                "isWardrop": gap <= 1e-6,
            });
            if let Some(meta) = &loaded.metadata {
                let opt = flows_from(&meta.designated_opt)?;
                let ratio = (value.value - log_nsw_flow(g, &opt)?.value).exp();
                out["measuredRatio"] = json!(ratio);
                out["predictedRatio"] = json!(meta.predicted_ratio);
            }
            out
        }
    };
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

pub fn dynamics(
    game_path: &Path,
    schedule: &str,
    seed: u64,
    max_sweeps: usize,
    start_path: Option<&Path>,
    trace_path: Option<&Path>,
) -> Result<()> {
    let loaded = load(game_path)?;
    let game = match &loaded.game {
        InputGame::Atomic(g) => g,
        InputGame::Online(oi) => oi.game(),
        InputGame::NonAtomic(_) => {
            return Err(Error::Invalid("dynamics needs an atomic game".into()))
        }
    };
    let schedule = match schedule {
        "round-robin" => Schedule::RoundRobin,
        "max-weight" => Schedule::MaxWeightFirst,
        "random" => Schedule::SeededRandom(seed),
        other => return Err(Error::Invalid(format!("unknown schedule '{other}'"))),
    };
    let start = match start_path {
        Some(path) => choices_from(&parse_profile(&read(path)?)?)?,
        None => Profile(vec![0; game.n()]),
    };
    let (outcome, trace) = best_response_dynamics_traced(game, &start, schedule, max_sweeps)?;
    if let Some(path) = trace_path {
        let mut csv = String::from("sweep,moves,log_nsw\n");
        for rec in &trace {
            csv.push_str(&format!("{},{},{:.12e}\n", rec.sweep, rec.moves, rec.log_nsw));
        }
        write_out(path, &csv)?;
    }
    match outcome {
        DynamicsOutcome::Pne(profile) => {
            let value = log_nsw(game, &profile)?;
            let out = json!({
                "converged": true,
                "choices": profile.0,
                "logNsw": value.value,
                "nsw": value.nsw(),
                "sweeps": trace.len(),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(())
        }
        DynamicsOutcome::DidNotConverge(_) => Err(Error::DidNotConverge(format!(
            "no equilibrium after {max_sweeps} sweeps"
        ))),
    }
}

pub fn opt(game_path: &Path, method: &str) -> Result<()> {
    let loaded = load(game_path)?;
    let game = match &loaded.game {
        InputGame::Atomic(g) => g,
        InputGame::Online(oi) => oi.game(),
        InputGame::NonAtomic(_) => {
            return Err(Error::Invalid("opt needs an atomic game".into()))
        }
    };
    let (profile, value, used) = match method {
        "brute" => {
            let (p, v) = brute_force_opt(game)?;
            (p, v, "brute")
        }
        "matching" => {
            let outcome = unweighted_opt_matching(game)?;
            let used = match outcome.method {
                OptMethod::Matching => "matching",
                OptMethod::BruteForceFallback => "bruteForceFallback",
            };
            (outcome.profile, outcome.log_nsw, used)
        }
        other => return Err(Error::Invalid(format!("unknown method '{other}'"))),
    };
    let out = json!({
        "choices": profile.0,
        "logNsw": value.value,
        "nsw": value.nsw(),
        "method": used,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

pub fn greedy(instance_path: &Path) -> Result<()> {
    let loaded = load(instance_path)?;
    let oi = match &loaded.game {
        InputGame::Online(oi) => oi,
        _ => return Err(Error::Invalid("greedy needs an instance with arrivalOrder".into())),
    };
    let game = oi.game();
    let profile = greedy_assign(oi)?;
    // Replay to report each client's increment.
    let mut loads = vec![0.0; game.resources().len()];
    let mut steps = Vec::with_capacity(game.n());
    for &i in oi.arrival_order() {
        let j = game.strategy(i, profile.0[i])[0];
        let inc = greedy_step_cost(game, &loads, i, j)?;
        steps.push(json!({
            "player": i,
            "resource": game.resources()[j].id,
            "increment": inc,
        }));
        loads[j] += game.players()[i].weight;
    }
    // The offline benchmark is exhaustive, so it may be refused on large
    // instances; report the ratio only when it is feasible.
    let ratio = match competitive_ratio(oi) {
        Ok(r) => Some(r),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let value = log_nsw(game, &profile)?;
    let out = json!({
        "choices": profile.0,
        "steps": steps,
        "logNsw": value.value,
        "nsw": value.nsw(),
        "competitiveRatio": ratio,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

pub fn nonatomic(game_path: &Path, max_iters: usize, eps: f64) -> Result<()> {
    let loaded = load(game_path)?;
    let game = match &loaded.game {
        InputGame::NonAtomic(g) => g,
        _ => return Err(Error::Invalid("nonatomic needs a game with types".into())),
    };
    let flow = potential_minimize(game, max_iters, eps)?;
    let value = log_nsw_flow(game, &flow)?;
    let out = json!({
        "flows": flow.0,
        "wardropGap": wardrop_gap(game, &flow, eps)?,
        "logNsw": value.value,
        "nsw": value.nsw(),
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn param<'a>(params: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    params
        .get(key)
        .map(|s| s.as_str())
        .ok_or_else(|| Error::Invalid(format!("missing parameter --{key}")))
}

fn parse_num<T: std::str::FromStr>(key: &str, text: &str) -> Result<T> {
    text.parse()
        .map_err(|_| Error::Invalid(format!("bad value '{text}' for --{key}")))
}

fn req<T: std::str::FromStr>(params: &BTreeMap<String, String>, key: &str) -> Result<T> {
    parse_num(key, param(params, key)?)
}

fn opt_or<T: std::str::FromStr>(
    params: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T> {
    match params.get(key) {
        Some(text) => parse_num(key, text),
        None => Ok(default),
    }
}

fn latency_or(params: &BTreeMap<String, String>, key: &str) -> Result<LatencyFunction> {
    match params.get(key) {
        Some(spec) => LatencyFunction::parse(spec),
        None => Ok(LatencyFunction::monomial(1)),
    }
}

/// Build a generated instance from a family name and string parameters
/// (shared by `generate` flags and `experiment` plans).
pub fn build_family(
    family: &str,
    params: &BTreeMap<String, String>,
) -> Result<GeneratedInstance> {
    match family {
        "weightedLB" => {
            let variant = match params.get("variant").map(|s| s.as_str()) {
                Some("symmetric") => WeightedVariant::Symmetric,
                Some("restricted") | None => WeightedVariant::RestrictedStrategies,
                Some(other) => {
                    return Err(Error::Invalid(format!("unknown variant '{other}'")))
                }
            };
            generators::weighted_lb(
                req(params, "m")?,
                opt_or(params, "s", 1u64)?,
                opt_or(params, "k", 1.0f64)?,
                opt_or(params, "h", 0.0f64)?,
                &latency_or(params, "f")?,
                &latency_or(params, "g")?,
                variant,
            )
        }
        "identicalLB" => {
            generators::identical_resources_lb(req(params, "m")?, opt_or(params, "p", 1u32)?)
        }
        "unweightedLB" => generators::unweighted_lb(
            req(params, "m")?,
            opt_or(params, "k", 1u64)?,
            opt_or(params, "o", 1u64)?,
            &latency_or(params, "f")?,
        ),
        "nonAtomic" => generators::non_atomic(
            req(params, "k")?,
            req(params, "o")?,
            &latency_or(params, "f")?,
        ),
        "onlineGreedyLB" => generators::online_greedy_lb(
            req(params, "m")?,
            opt_or(params, "k", 1.0f64)?,
            opt_or(params, "h", 0.0f64)?,
            &latency_or(params, "f")?,
            &latency_or(params, "g")?,
        ),
        "onlineUniversal" => {
            generators::online_universal(req(params, "m")?, opt_or(params, "p", 1u32)?)
        }
        "linearCG" => generators::linear_cg(req(params, "n")?, req(params, "eps")?),
        other => Err(Error::Invalid(format!("unknown family '{other}'"))),
    }
}

/// The tight upper bound the family's measured ratio must respect, from the
/// instance's maximum polynomial degree.
pub fn family_bound(inst: &GeneratedInstance) -> f64 {
    let degree = match &inst.game {
        GeneratedGame::NonAtomic(g) => {
            g.resources().iter().map(|r| r.latency.max_degree()).max().unwrap_or(0)
        }
        _ => inst
            .atomic_game()
            .map(|g| g.resources().iter().map(|r| r.latency.max_degree()).max().unwrap_or(0))
            .unwrap_or(0),
    };
    let bounds = poly_bounds(degree);
    match inst.family.as_str() {
        "weightedLB" | "identicalLB" => bounds.weighted_npoa,
        "unweightedLB" => bounds.unweighted_npoa,
        "nonAtomic" => bounds.nonatomic_npoa,
        "onlineGreedyLB" | "onlineUniversal" => bounds.greedy_cr,
        // Congestion games escape the load-balancing ceilings; the closed
        // form itself is the reference.
        _ => inst.predicted_ratio,
    }
}

pub fn generate(
    family: &str,
    params: &BTreeMap<String, String>,
    out: Option<&Path>,
) -> Result<()> {
    let inst = build_family(family, params)?;
    let text = serde_json::to_string_pretty(&generated_to_json(&inst)).unwrap();
    match out {
        Some(path) => write_out(path, &text)?,
        None => println!("{text}"),
    }
    Ok(())
}

pub fn verify_bounds(p: u32, family: &str) -> Result<()> {
    if family != "poly" {
        return Err(Error::Invalid(format!(
            "unknown family '{family}' (only 'poly' is supported)"
        )));
    }
    let b = poly_bounds(p);
    println!("p = {p}, family = {family}");
    println!(
        "weighted {}, unweighted {}, nonatomic {:.5}, online {}",
        b.weighted_npoa, b.unweighted_npoa, b.nonatomic_npoa, b.greedy_cr
    );
    let fam = [LatencyFunction::monomial(p)];
    println!(
        "grid sups: weighted {:.12e}, unweighted {:.12e}, nonatomic {:.12e}, online {:.12e}",
        sup_weighted_general(&fam, &fam).value,
        sup_unweighted(&fam, 50).value,
        sup_nonatomic(&fam).value,
        sup_greedy_general(&fam, &fam).value,
    );
    Ok(())
}
