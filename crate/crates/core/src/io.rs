//! Scenario files and run directories.
//!
//! A run directory holds the normalized scenario, the trajectory and ledger
//! CSVs, a summary and a manifest. Everything except the manifest's wall
//! clock fields is a pure function of the scenario, so reruns are
//! byte-identical.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::diagnostics::{ensemble_ledger_stats, equipartition_ensemble, fit_growth_rate, EnsembleLedgerStats, GrowthFit};
use crate::error::{Error, Result};
use crate::integrators::RunOutput;
use crate::model::{RunStatus, Trajectory};
use crate::scenario::{EquationFamily, Scenario};

pub const SCENARIO_FILE: &str = "scenario.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const LEDGER_FILE: &str = "ledger.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const ENSEMBLE_FILE: &str = "ensemble.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// 17 significant digits, independent of locale.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> Error + '_ {
    move |source| Error::Json { path: path.to_path_buf(), source }
}

/// Canonical JSON text of a scenario, every default spelled out.
pub fn scenario_to_json(s: &Scenario) -> String {
    let mut text = serde_json::to_string_pretty(s).expect("scenario serializes");
    text.push('\n');
    text
}

fn collect_unknown(input: &Value, known: &Value, path: &str, out: &mut Vec<String>) {
    match (input, known) {
        (Value::Object(a), Value::Object(b)) => {
            for (k, v) in a {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match b.get(k) {
                    Some(w) => collect_unknown(v, w, &p, out),
                    None => out.push(p),
                }
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            for (i, (v, w)) in a.iter().zip(b).enumerate() {
                collect_unknown(v, w, &format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

fn parse_value(text: &str, origin: &Path) -> Result<(Value, Scenario)> {
    let value: Value = serde_json::from_str(text).map_err(json_err(origin))?;
    let scenario: Scenario = serde_json::from_value(value.clone()).map_err(json_err(origin))?;
    Ok((value, scenario))
}

/// Keys of the input that the scenario schema does not recognize.
pub fn unknown_keys(text: &str) -> Result<Vec<String>> {
    let (value, scenario) = parse_value(text, Path::new("<input>"))?;
    let known = serde_json::to_value(&scenario).expect("scenario serializes");
    let mut out = Vec::new();
    collect_unknown(&value, &known, "", &mut out);
    Ok(out)
}

/// Parses and validates scenario text. In strict mode unrecognized keys are
/// reported together with every validation failure.
pub fn parse_scenario_str(text: &str, strict: bool, origin: &Path) -> Result<Scenario> {
    let (value, scenario) = parse_value(text, origin)?;
    let mut errors = Vec::new();
    if strict {
        let known = serde_json::to_value(&scenario).expect("scenario serializes");
        let mut unknown = Vec::new();
        collect_unknown(&value, &known, "", &mut unknown);
        errors.extend(unknown.into_iter().map(|k| format!("unknown field `{k}`")));
    }
    errors.extend(scenario.validation_errors());
    if errors.is_empty() {
        Ok(scenario)
    } else {
        Err(Error::Validation(errors))
    }
}

pub fn parse_scenario(path: &Path, strict: bool) -> Result<Scenario> {
    parse_scenario_str(&read_text(path)?, strict, path)
}

/// Canonical form of scenario text, without validation.
pub fn normalize(text: &str) -> Result<String> {
    let (_, s) = parse_value(text, Path::new("<input>"))?;
    Ok(scenario_to_json(&s))
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of the stored scenario file.
    pub scenario_digest: String,
    pub seed: u64,
    pub version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        serde_json::from_str(&read_text(&path)?).map_err(json_err(&path))
    }

    /// Whether the stored scenario still hashes to the recorded digest.
    pub fn verify(&self, dir: &Path) -> Result<bool> {
        let path = dir.join(SCENARIO_FILE);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        Ok(digest(&bytes) == self.scenario_digest)
    }
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerSummary {
    pub final_h_sys: f64,
    pub final_h_gamma: f64,
    pub final_h_xi: f64,
    pub max_abs_residual: f64,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub equation_family: EquationFamily,
    pub status: RunStatus,
    /// Noise seed of the first replica, derived from the scenario seed.
    pub noise_seed: u64,
    pub samples: usize,
    pub final_time: f64,
    pub ledger: Option<LedgerSummary>,
    /// Exponential fit of `H_sys`; negative for damping.
    pub energy_rate: Option<GrowthFit>,
    /// Exponential fit of `|a|`, Abraham-Lorentz only.
    pub acceleration_rate: Option<GrowthFit>,
    pub equipartition_ratio: Option<f64>,
    pub ensemble: Option<EnsembleLedgerStats>,
}

fn acceleration_norms(traj: &Trajectory) -> Option<Vec<f64>> {
    traj.samples.iter().map(|s| s.state.aux.as_ref().map(|a| a[0].norm())).collect()
}

/// Summary of the first replica plus ensemble statistics when there are
/// several.
pub fn summarize(outputs: &[RunOutput], s: &Scenario) -> Result<RunSummary> {
    let first = outputs.first().ok_or_else(|| Error::Missing("no run output".into()))?;
    let traj = &first.trajectory;
    let l = &first.ledger;
    let spacing = s.dt * s.record_stride as f64;
    let ledger = (!l.is_empty()).then(|| LedgerSummary {
        final_h_sys: *l.h_sys.last().unwrap(),
        final_h_gamma: *l.h_gamma.last().unwrap(),
        final_h_xi: *l.h_xi.last().unwrap(),
        max_abs_residual: l.max_abs_residual(),
        relative_residual: l.relative_residual(),
    });
    let energy_rate = if s.noise_active() { None } else { fit_growth_rate(&l.h_sys, spacing).ok() };
    let acceleration_rate = match s.equation_family {
        EquationFamily::AbrahamLorentz => acceleration_norms(traj).and_then(|a| fit_growth_rate(&a, spacing).ok()),
        _ => None,
    };
    let equipartition_ratio = if s.noise_active() && s.equation_family == EquationFamily::Qbm {
        let trajs: Vec<Trajectory> = outputs.iter().map(|o| o.trajectory.clone()).collect();
        equipartition_ensemble(&trajs, s).ok()
    } else {
        None
    };
    Ok(RunSummary {
        equation_family: s.equation_family,
        status: traj.status,
        noise_seed: first.seed,
        samples: traj.samples.len(),
        final_time: traj.samples.last().map(|x| x.state.time).unwrap_or(0.0),
        ledger,
        energy_rate,
        acceleration_rate,
        equipartition_ratio,
        ensemble: (outputs.len() > 1).then(|| ensemble_ledger_stats(outputs)),
    })
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.samples.first().map_or(0, |s| s.state.n());
    let has_aux = traj.samples.first().is_some_and(|s| s.state.aux.is_some());
    let axes = ["x", "y", "z"];
    let mut cols = vec!["t".to_string()];
    let mut groups = vec!["x", "p", "v"];
    if has_aux {
        groups.push("a");
    }
    for g in &groups {
        for i in 0..n {
            for a in axes {
                cols.push(format!("{g}{i}_{a}"));
            }
        }
    }
    let mut out = cols.join(",");
    out.push('\n');
    for s in &traj.samples {
        let mut row = vec![num(s.state.time)];
        let mut push = |vs: &[crate::Vec3]| row.extend(vs.iter().flat_map(|v| v.iter().map(|c| num(*c))));
        push(&s.state.positions);
        push(&s.state.momenta);
        push(&s.velocities);
        if let Some(a) = &s.state.aux {
            push(a);
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn ledger_csv(out: &RunOutput) -> String {
    let l = &out.ledger;
    let mut text = String::from("t,h_sys,h_gamma,h_xi,residual\n");
    for k in 0..l.len() {
        let row = [l.times[k], l.h_sys[k], l.h_gamma[k], l.h_xi[k], l.residual[k]].map(num);
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

fn ensemble_csv(outputs: &[RunOutput]) -> String {
    let mut text = String::from("replica,seed,status,t_final,h_sys,h_gamma,h_xi,residual\n");
    for (r, o) in outputs.iter().enumerate() {
        let l = &o.ledger;
        let last = |v: &Vec<f64>| num(v.last().copied().unwrap_or(0.0));
        let t = last(&l.times);
        text.push_str(&format!(
            "{r},{},{},{t},{},{},{},{}\n",
            o.seed,
            o.trajectory.status.label(),
            last(&l.h_sys),
            last(&l.h_gamma),
            last(&l.h_xi),
            last(&l.residual)
        ));
    }
    text
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(&path, e))
}

/// Writes the run directory and returns the manifest, which is written last.
/// `outputs` are the replicas in order; CSVs describe the first one.
pub fn write_outputs(outputs: &[RunOutput], s: &Scenario, dir: &Path, started_unix: f64) -> Result<RunManifest> {
    let first = outputs.first().ok_or_else(|| Error::Missing("no run output".into()))?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let scenario_text = scenario_to_json(s);
    let summary = summarize(outputs, s)?;
    let mut summary_text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    summary_text.push('\n');

    let mut files = vec![
        (SCENARIO_FILE, scenario_text.clone()),
        (TRAJECTORY_FILE, trajectory_csv(&first.trajectory)),
        (LEDGER_FILE, ledger_csv(first)),
        (SUMMARY_FILE, summary_text),
    ];
    if outputs.len() > 1 {
        files.push((ENSEMBLE_FILE, ensemble_csv(outputs)));
    }
    for (name, text) in &files {
        write_file(dir, name, text)?;
    }
    let manifest = RunManifest {
        scenario_digest: digest(scenario_text.as_bytes()),
        seed: s.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix,
        finished_unix: unix_now(),
        files: files.iter().map(|(n, _)| n.to_string()).collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(dir, MANIFEST_FILE, &text)?;
    Ok(manifest)
}

/// Scenario stored in a run directory, validated strictly.
pub fn read_run_scenario(dir: &Path) -> Result<Scenario> {
    parse_scenario(&dir.join(SCENARIO_FILE), true)
}

/// Files of `dir` listed in its manifest, as paths.
pub fn manifest_paths(dir: &Path, m: &RunManifest) -> Vec<PathBuf> {
    m.files.iter().map(|f| dir.join(f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "particles": [{"label": "e", "mass": 1.0, "charge": 0.1}],
        "initial": {"positions": [[1, 0, 0]], "momenta": [[0, 0, 0]]},
        "equation_family": "consistent_1_over_c3",
        "external_potential": {"kind": "harmonic", "omega0": 1.0},
        "dt": 0.01,
        "t_end": 1.0
    }"#;

    #[test]
    fn minimal_file_gets_defaults() {
        let s = parse_scenario_str(MINIMAL, true, Path::new("m.json")).unwrap();
        assert_eq!(s.record_stride, 1);
        assert_eq!(s.replicas, 1);
        assert_eq!(s.kernel.cutoff_lambda, 100.0);
        assert!(s.noise.enabled);
    }

    #[test]
    fn strict_mode_names_unknown_keys() {
        let text = MINIMAL.replace("\"dt\"", "\"omgea0\": 2, \"dt\"").replace("\"mass\"", "\"mas\": 1, \"mass\"");
        assert!(parse_scenario_str(&text, false, Path::new("m.json")).is_ok());
        let Err(Error::Validation(errs)) = parse_scenario_str(&text, true, Path::new("m.json")) else {
            panic!("strict mode accepted unknown keys");
        };
        assert!(errs.iter().any(|e| e.contains("`omgea0`")), "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("`particles[0].mas`")), "{errs:?}");
    }

    #[test]
    fn reports_every_failure() {
        let text = MINIMAL.replace("\"dt\": 0.01", "\"dt\": 0.5").replace("\"t_end\": 1.0", "\"t_end\": -1.0");
        let Err(Error::Validation(errs)) = parse_scenario_str(&text, true, Path::new("m.json")) else {
            panic!("expected validation failure");
        };
        assert!(errs.len() >= 2, "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("timescale bound 0.1/omega0")), "{errs:?}");
    }

    #[test]
    fn normalization_is_idempotent() {
        let n1 = normalize(MINIMAL).unwrap();
        let s = parse_scenario_str(MINIMAL, true, Path::new("m.json")).unwrap();
        assert_eq!(scenario_to_json(&s), n1);
        assert_eq!(normalize(&n1).unwrap(), n1);
        assert!(unknown_keys(&n1).unwrap().is_empty());
    }

    #[test]
    fn number_format() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
