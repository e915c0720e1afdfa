//! Batch experiment runner: a JSON plan in, a sorted deterministic CSV out.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use nswlb::generators::GeneratedGame;
use nswlb::{Error, Result};

use crate::ops::{build_family, family_bound};

const HEADER: &str = "family,params,n,m_resources,predicted_ratio,measured_ratio,bound,abs_err,pass";

#[derive(Debug, Deserialize)]
struct Plan {
    /// Reserved for randomized families; accepted so plans are stable even
    /// when every listed family is deterministic.
    #[serde(default)]
    #[allow(dead_code)]
    seed: u64,
    instances: Vec<PlanInstance>,
}

#[derive(Debug, Deserialize)]
struct PlanInstance {
    family: String,
    #[serde(default)]
    params: BTreeMap<String, String>,
}

fn canonical_params(params: &BTreeMap<String, String>) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn row(spec: &PlanInstance) -> Result<(String, bool)> {
    let inst = build_family(&spec.family, &spec.params)?;
    let (n, m) = match &inst.game {
        GeneratedGame::NonAtomic(g) => (g.types().len(), g.resources().len()),
        _ => {
            let g = inst.atomic_game().expect("atomic game");
            (g.n(), g.resources().len())
        }
    };
    let predicted = inst.predicted_ratio;
    let measured = inst.measured_ratio()?;
    let bound = family_bound(&inst);
    let abs_err = (measured - predicted).abs();
    let pass = abs_err <= 1e-9 * predicted.abs().max(1.0) && measured <= bound + 1e-9;
    // The params field may contain commas (polynomial specs), so it is
    // always quoted.
    let line = format!(
        "{},\"{}\",{},{},{:.12e},{:.12e},{:.12e},{:.12e},{}",
        inst.family,
        canonical_params(&inst.params),
        n,
        m,
        predicted,
        measured,
        bound,
        abs_err,
        pass
    );
    Ok((line, pass))
}

pub fn run(plan_path: &Path, out_dir: &Path, jobs: usize) -> Result<()> {
    let text = fs::read_to_string(plan_path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", plan_path.display())))?;
    let plan: Plan = serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("bad plan JSON: {e}")))?;
    if jobs == 0 {
        return Err(Error::Invalid("--jobs must be at least 1".into()));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let mut rows = pool.install(|| {
        plan.instances
            .par_iter()
            .map(row)
            .collect::<Result<Vec<_>>>()
    })?;
    // Sorted rows make the output independent of scheduling.
    rows.sort();

    let all_pass = rows.iter().all(|(_, pass)| *pass);
    let mut csv = String::from(HEADER);
    csv.push('\n');
    for (line, _) in &rows {
        csv.push_str(line);
        csv.push('\n');
    }

    fs::create_dir_all(out_dir)
        .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", out_dir.display())))?;
    let out_path = out_dir.join("results.csv");
    fs::write(&out_path, &csv)
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", out_path.display())))?;

    println!(
        "{} instances -> {} ({})",
        rows.len(),
        out_path.display(),
        if all_pass { "PASS" } else { "FAIL" }
    );
    Ok(())
}
