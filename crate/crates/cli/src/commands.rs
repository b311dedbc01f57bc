use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use catlab::experiment::{run_experiment, ExperimentConfig, SweepConfig};
use catlab::io::{
    orbit_json, read_state, read_symbol, write_husimi, write_json, write_state,
};
use catlab::quantization::{weyl_quantize, Symbol};
use catlab::quasimode::{frequency_box, quasimode_husimi};
use catlab::selftest::{render, run_selftest, summary_line, CRITERIA};
use catlab::{
    antiwick_expectation, enumerate_prime_orbits, egorov_defect, propagator, run_sweep,
    unitarity_defect, validate_cat_map, CatError, PlanckGrid,
};

use crate::{Command, Failure, Mode};

const UNITARITY_TOL: f64 = 1e-10;
const EGOROV_TOL: f64 = 1e-8;

pub fn parse_matrix(s: &str) -> Result<[i64; 4], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected A,B,C,D, got {s:?}"));
    }
    let mut m = [0i64; 4];
    for (slot, p) in m.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("{p:?} is not an integer"))?;
    }
    Ok(m)
}

fn require_input(path: &Path) -> Result<(), CatError> {
    if !path.is_file() {
        return Err(CatError::Config(format!("{} does not exist", path.display())));
    }
    Ok(())
}

fn prepare_output(path: &Path) -> Result<(), CatError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

/// Writes `text` to `out`, or to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CatError> {
    match out {
        Some(p) => {
            prepare_output(p)?;
            fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn json_text(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// `<artifact>.manifest.json` next to the primary artifact, or
/// `catlab-<command>.manifest.json` in the working directory for stdout runs.
pub fn manifest_path(out: Option<&Path>, command: &str) -> PathBuf {
    match out {
        Some(p) => {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| command.to_string());
            p.with_file_name(format!("{name}.manifest.json"))
        }
        None => PathBuf::from(format!("catlab-{command}.manifest.json")),
    }
}

fn write_manifest(out: Option<&Path>, command: &str, config: Value, extra: Value) -> Result<(), CatError> {
    let path = manifest_path(out, command);
    prepare_output(&path)?;
    let mut m = json!({
        "tool": "catlab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut m, extra) {
        dst.extend(src);
    }
    write_json(&path, &m)
}

pub fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Orbits { matrix, t, guard, out } => orbits(matrix, t, guard, out.as_deref()),
        Command::PropagatorCheck { matrix, n, max_freq, out } => {
            propagator_check(matrix, n, max_freq, out.as_deref())
        }
        Command::Husimi { state, matrix, g, out } => husimi_cmd(&state, matrix, g, &out),
        Command::Expect { state, symbol, mode, matrix, g, out } => {
            expect(&state, &symbol, mode, matrix, g, out.as_deref())
        }
        Command::Quasimode { config, out } => quasimode(&config, out),
        Command::Sweep { config, out } => sweep(&config, out),
        Command::Selftest { seed, only, out } => selftest(seed, only, out.as_deref()),
    }
}

fn orbits(matrix: [i64; 4], t: u32, guard: u64, out: Option<&Path>) -> Result<(), Failure> {
    let [a, b, c, d] = matrix;
    let map = validate_cat_map(a, b, c, d)?;
    if t == 0 {
        return Err(CatError::Config("T must be at least 1".into()).into());
    }
    let list: Vec<_> = enumerate_prime_orbits(&map, t, guard)?
        .iter()
        .map(|o| orbit_json(&map, o))
        .collect();
    emit(out, &json_text(&list))?;
    write_manifest(
        out,
        "orbits",
        json!({ "matrix": matrix, "T": t, "guard": guard }),
        json!({}),
    )?;
    Ok(())
}

fn propagator_check(matrix: [i64; 4], n: usize, max_freq: i64, out: Option<&Path>) -> Result<(), Failure> {
    let [a, b, c, d] = matrix;
    let map = validate_cat_map(a, b, c, d)?;
    if n == 0 {
        return Err(CatError::Config("N must be positive".into()).into());
    }
    if max_freq < 0 {
        return Err(CatError::Config("max-freq must be nonnegative".into()).into());
    }
    let grid = PlanckGrid::for_map(&map, n)?;
    let prop = propagator(&map, grid)?;
    let unitarity = unitarity_defect(&prop);
    let mut egorov = Vec::new();
    let mut worst: f64 = 0.0;
    for v in frequency_box(max_freq) {
        let d = egorov_defect(&prop, v);
        worst = worst.max(d);
        egorov.push(json!([v[0], v[1], d]));
    }
    let pass = unitarity < UNITARITY_TOL && worst < EGOROV_TOL;
    let report = json!({
        "matrix": map.entries(),
        "N": n,
        "theta": grid.theta,
        "unitarity_defect": unitarity,
        "egorov_max": worst,
        "egorov": egorov,
        "pass": pass,
    });
    emit(out, &json_text(&report))?;
    write_manifest(
        out,
        "propagator-check",
        json!({ "matrix": matrix, "N": n, "max_freq": max_freq }),
        json!({}),
    )?;
    if !pass {
        return Err(Failure::Checks(format!(
            "unitarity {unitarity:e} or Egorov {worst:e} above tolerance"
        )));
    }
    Ok(())
}

fn husimi_cmd(state: &Path, matrix: [i64; 4], g: usize, out: &Path) -> Result<(), Failure> {
    require_input(state)?;
    let [a, b, c, d] = matrix;
    let map = validate_cat_map(a, b, c, d)?;
    let psi = read_state(state)?;
    let h = quasimode_husimi(&psi, &map, g)?;
    prepare_output(out)?;
    write_husimi(out, &h, psi.norm_sq())?;
    write_manifest(
        Some(out),
        "husimi",
        json!({ "state": state, "matrix": matrix, "G": g }),
        json!({}),
    )?;
    Ok(())
}

fn expect(
    state: &Path,
    symbol: &Path,
    mode: Mode,
    matrix: [i64; 4],
    g: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    require_input(state)?;
    require_input(symbol)?;
    let [a, b, c, d] = matrix;
    let map = validate_cat_map(a, b, c, d)?;
    let psi = read_state(state)?;
    let sym = read_symbol(symbol)?;
    let g = g.unwrap_or_else(|| catlab::experiment::default_resolution(&map, psi.grid.n));
    let (value, mode_name) = match mode {
        Mode::Aw => (antiwick_expectation(&psi, &sym, &map, g)?, "aw"),
        Mode::W => {
            let Symbol::Fourier(f) = &sym else {
                return Err(CatError::Config("Weyl mode needs a Fourier symbol".into()).into());
            };
            let op = weyl_quantize(f, psi.grid);
            (psi.inner(&psi.apply(&op)), "w")
        }
    };
    let report = json!({
        "mode": mode_name,
        "N": psi.grid.n,
        "norm_sq": psi.norm_sq(),
        "value": [value.re, value.im],
    });
    emit(out, &json_text(&report))?;
    let mut cfg = json!({ "state": state, "symbol": symbol, "mode": mode_name, "matrix": matrix });
    if mode == Mode::Aw {
        cfg["G"] = json!(g);
    }
    write_manifest(out, "expect", cfg, json!({}))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String, CatError> {
    require_input(path)?;
    Ok(fs::read_to_string(path)?)
}

fn quasimode(config: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::from_toml(&read_text(config)?)?;
    if out.is_some() {
        cfg.outputs.report = out;
    }
    let run = run_experiment(&cfg)?;
    let outputs = &run.resolved.config.outputs;
    let report_path = outputs.report.as_deref();
    emit(report_path, &json_text(&run.report))?;
    if let Some(p) = &outputs.husimi {
        prepare_output(p)?;
        write_husimi(p, &run.husimi, 1.0)?;
    }
    if let Some(p) = &outputs.state {
        prepare_output(p)?;
        write_state(p, &run.psi_n)?;
    }
    let resolved = serde_json::to_value(&run.resolved.config).expect("config serializes");
    write_manifest(
        report_path,
        "quasimode",
        resolved,
        json!({ "config_file": config, "timings": run.timings.seconds }),
    )?;
    Ok(())
}

fn sweep(config: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let mut cfg = SweepConfig::from_toml(&read_text(config)?)?;
    if out.is_some() {
        cfg.out = out;
    }
    let table = run_sweep(&cfg)?;
    emit(cfg.out.as_deref(), &table.to_csv())?;
    let resolved = serde_json::to_value(&cfg).expect("config serializes");
    write_manifest(
        cfg.out.as_deref(),
        "sweep",
        resolved,
        json!({ "config_file": config, "slope": table.slope }),
    )?;
    Ok(())
}

fn selftest(seed: u64, only: Vec<u8>, out: Option<&Path>) -> Result<(), Failure> {
    let ids = if only.is_empty() { CRITERIA.to_vec() } else { only };
    if let Some(bad) = ids.iter().find(|i| !CRITERIA.contains(i)) {
        return Err(CatError::Config(format!("no criterion {bad}; choose from 1-9")).into());
    }
    let first = run_selftest(&ids, seed);
    let second = run_selftest(&ids, seed);
    let (a, b) = (render(&first), render(&second));
    for c in &first.criteria {
        eprintln!("{}", summary_line(c));
    }
    let identical = a == b;
    eprintln!(
        "criterion 10 {}: byte-identical reports across two runs",
        if identical { "PASS" } else { "FAIL" }
    );
    emit(out, &a)?;
    write_manifest(
        out,
        "selftest",
        json!({ "seed": seed, "criteria": ids }),
        json!({ "identical": identical }),
    )?;
    if !identical {
        return Err(Failure::Internal("selftest reports differ between runs".into()));
    }
    if !first.pass {
        let failed: Vec<String> = first
            .criteria
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.id.to_string())
            .collect();
        return Err(Failure::Checks(format!("criteria {} failed", failed.join(","))));
    }
    Ok(())
}
