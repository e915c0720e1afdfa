//! JSON wire schema for games, online instances, non-atomic games, and
//! generated-instance files with their metadata sidecar.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{Designated, GeneratedGame, GeneratedInstance};
use crate::latency::LatencyFunction;
use crate::model::{
    AtomicGame, FlowProfile, GameMode, NonAtomicGame, Player, PlayerType, Profile, Resource,
};
use crate::online::OnlineInstance;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "camelCase")]
pub enum LatencyJson {
    Poly { coeffs: Vec<f64> },
    Const { value: f64 },
    Scaled { a: f64, b: f64, inner: Box<LatencyJson> },
}

impl LatencyJson {
    pub fn build(&self) -> Result<LatencyFunction> {
        match self {
            LatencyJson::Poly { coeffs } => LatencyFunction::poly(coeffs.clone()),
            LatencyJson::Const { value } => LatencyFunction::constant(*value),
            LatencyJson::Scaled { a, b, inner } => {
                LatencyFunction::scaled(*a, *b, inner.build()?)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResourceJson {
    pub id: String,
    pub latency: LatencyJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayerJson {
    pub weight: f64,
    pub strategies: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeJson {
    pub rate: f64,
    pub strategies: Vec<String>,
}

/// A game file. `mode`/`players` describe atomic games (plus `arrivalOrder`
/// for online instances); `types` describes non-atomic games.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct GameJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub resources: Vec<ResourceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub players: Option<Vec<PlayerJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub types: Option<Vec<TypeJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arrival_order: Option<Vec<usize>>,
}

/// A designated profile in metadata: strategy choices or a flow matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DesignatedJson {
    Choices { choices: Vec<usize> },
    Flows { flows: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetadataJson {
    pub family: String,
    pub params: BTreeMap<String, String>,
    pub predicted_ratio: f64,
    pub designated_equilibrium: DesignatedJson,
    pub designated_opt: DesignatedJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileJson {
    #[serde(flatten)]
    pub game: GameJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<MetadataJson>,
}

/// A parsed game of any kind.
#[derive(Debug, Clone)]
pub enum InputGame {
    Atomic(AtomicGame),
    Online(OnlineInstance),
    NonAtomic(NonAtomicGame),
}

/// A parsed file: the game plus, for generator output, its metadata.
#[derive(Debug, Clone)]
pub struct LoadedFile {
    pub game: InputGame,
    pub metadata: Option<MetadataJson>,
}

fn resource_index(ids: &BTreeMap<String, usize>, id: &str) -> Result<usize> {
    ids.get(id)
        .copied()
        .ok_or_else(|| Error::Invalid(format!("unknown resource id '{id}'")))
}

fn build_resources(json: &[ResourceJson]) -> Result<(Vec<Resource>, BTreeMap<String, usize>)> {
    let mut resources = Vec::with_capacity(json.len());
    let mut ids = BTreeMap::new();
    for (j, r) in json.iter().enumerate() {
        resources.push(Resource { id: r.id.clone(), latency: r.latency.build()? });
        ids.insert(r.id.clone(), j);
    }
    Ok((resources, ids))
}

/// Parse a game or generated-instance file.
pub fn parse_file(text: &str) -> Result<LoadedFile> {
    let file: FileJson =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad JSON: {e}")))?;
    let g = &file.game;
    let (resources, ids) = build_resources(&g.resources)?;
    let game = if let Some(types) = &g.types {
        let types = types
            .iter()
            .map(|t| {
                Ok(PlayerType {
                    rate: t.rate,
                    strategies: t
                        .strategies
                        .iter()
                        .map(|id| resource_index(&ids, id))
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        InputGame::NonAtomic(NonAtomicGame::new(resources, types)?)
    } else {
        let mode = match g.mode.as_deref() {
            Some("loadBalancing") | None => GameMode::LoadBalancing,
            Some("congestion") => GameMode::Congestion,
            Some(other) => return Err(Error::Invalid(format!("unknown mode '{other}'"))),
        };
        let players = g
            .players
            .as_ref()
            .ok_or_else(|| Error::Invalid("game needs 'players' or 'types'".into()))?
            .iter()
            .map(|p| {
                Ok(Player {
                    weight: p.weight,
                    strategies: p
                        .strategies
                        .iter()
                        .map(|s| {
                            s.iter()
                                .map(|id| resource_index(&ids, id))
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<Player>>>()?;
        let atomic = AtomicGame::new(mode, resources, players)?;
        match &g.arrival_order {
            Some(order) => InputGame::Online(OnlineInstance::new(atomic, order.clone())?),
            None => InputGame::Atomic(atomic),
        }
    };
    Ok(LoadedFile { game, metadata: file.metadata })
}

fn atomic_to_json(game: &AtomicGame) -> GameJson {
    GameJson {
        mode: Some(
            match game.mode() {
                GameMode::LoadBalancing => "loadBalancing",
                GameMode::Congestion => "congestion",
            }
            .to_string(),
        ),
        resources: game
            .resources()
            .iter()
            .map(|r| ResourceJson { id: r.id.clone(), latency: r.latency.to_json() })
            .collect(),
        players: Some(
            game.players()
                .iter()
                .map(|p| PlayerJson {
                    weight: p.weight,
                    strategies: p
                        .strategies
                        .iter()
                        .map(|s| s.iter().map(|&j| game.resources()[j].id.clone()).collect())
                        .collect(),
                })
                .collect(),
        ),
        types: None,
        arrival_order: None,
    }
}

fn nonatomic_to_json(game: &NonAtomicGame) -> GameJson {
    GameJson {
        mode: None,
        resources: game
            .resources()
            .iter()
            .map(|r| ResourceJson { id: r.id.clone(), latency: r.latency.to_json() })
            .collect(),
        players: None,
        types: Some(
            game.types()
                .iter()
                .map(|t| TypeJson {
                    rate: t.rate,
                    strategies: t
                        .strategies
                        .iter()
                        .map(|&j| game.resources()[j].id.clone())
                        .collect(),
                })
                .collect(),
        ),
        arrival_order: None,
    }
}

pub fn game_to_json(game: &InputGame) -> GameJson {
    match game {
        InputGame::Atomic(g) => atomic_to_json(g),
        InputGame::Online(inst) => {
            let mut j = atomic_to_json(inst.game());
            j.arrival_order = Some(inst.arrival_order().to_vec());
            j
        }
        InputGame::NonAtomic(g) => nonatomic_to_json(g),
    }
}

fn designated_to_json(d: &Designated) -> DesignatedJson {
    match d {
        Designated::Atomic(Profile(choices)) => DesignatedJson::Choices { choices: choices.clone() },
        Designated::Flow(FlowProfile(flows)) => DesignatedJson::Flows { flows: flows.clone() },
    }
}

/// Serialize a generated instance (game plus metadata sidecar).
pub fn generated_to_json(inst: &GeneratedInstance) -> FileJson {
    let game = match &inst.game {
        GeneratedGame::Atomic(g) => game_to_json(&InputGame::Atomic(g.clone())),
        GeneratedGame::Online(oi) => game_to_json(&InputGame::Online(oi.clone())),
        GeneratedGame::NonAtomic(g) => game_to_json(&InputGame::NonAtomic(g.clone())),
    };
    FileJson {
        game,
        metadata: Some(MetadataJson {
            family: inst.family.clone(),
            params: inst.params.clone(),
            predicted_ratio: inst.predicted_ratio,
            designated_equilibrium: designated_to_json(&inst.equilibrium),
            designated_opt: designated_to_json(&inst.opt_candidate),
        }),
    }
}

/// Parse a standalone profile file: `{"choices":[...]}` or `{"flows":[[...]]}`.
pub fn parse_profile(text: &str) -> Result<DesignatedJson> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad profile JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_schema() {
        let text = r#"{"mode":"loadBalancing","resources":[{"id":"r1","latency":{"family":"poly","coeffs":[0,1]}}],"players":[{"weight":1.0,"strategies":[["r1"]]}]}"#;
        let loaded = parse_file(text).unwrap();
        match loaded.game {
            InputGame::Atomic(g) => {
                assert_eq!(g.n(), 1);
                assert_eq!(g.resources()[0].latency.eval(2.0), 2.0);
            }
            _ => panic!("atomic expected"),
        }
    }

    #[test]
    fn round_trips_generated_instances() {
        let inst = crate::generators::unweighted_lb(2, 1, 1, &LatencyFunction::monomial(1))
            .unwrap();
        let file = generated_to_json(&inst);
        let text = serde_json::to_string_pretty(&file).unwrap();
        let loaded = parse_file(&text).unwrap();
        let meta = loaded.metadata.unwrap();
        assert_eq!(meta.family, "unweightedLB");
        assert!((meta.predicted_ratio - 2f64.sqrt()).abs() < 1e-12);
        match (loaded.game, meta.designated_equilibrium) {
            (InputGame::Atomic(g), DesignatedJson::Choices { choices }) => {
                assert!(crate::equilibria::is_pne(&g, &Profile(choices), 1e-9).unwrap());
            }
            _ => panic!("atomic expected"),
        }
    }

    #[test]
    fn round_trips_online_and_nonatomic() {
        let inst = crate::generators::online_greedy_lb(
            3,
            1.0,
            0.0,
            &LatencyFunction::monomial(1),
            &LatencyFunction::monomial(1),
        )
        .unwrap();
        let text = serde_json::to_string(&generated_to_json(&inst)).unwrap();
        match parse_file(&text).unwrap().game {
            InputGame::Online(oi) => assert_eq!(oi.arrival_order(), &[1, 0]),
            _ => panic!("online expected"),
        }

        let inst = crate::generators::non_atomic(2.0, 1.0, &LatencyFunction::monomial(1)).unwrap();
        let text = serde_json::to_string(&generated_to_json(&inst)).unwrap();
        match parse_file(&text).unwrap().game {
            InputGame::NonAtomic(g) => assert_eq!(g.types()[0].rate, 2.0),
            _ => panic!("non-atomic expected"),
        }
    }

    #[test]
    fn rejects_unknown_resource_ids() {
        let text = r#"{"resources":[{"id":"r1","latency":{"family":"const","value":1}}],"players":[{"weight":1.0,"strategies":[["nope"]]}]}"#;
        assert!(parse_file(text).is_err());
    }
}
