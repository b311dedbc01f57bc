//! File formats: binary and JSON states, Husimi CSV grids, symbols, orbits.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classical::{CatMap, Orbit};
use crate::coherent::HusimiGrid;
use crate::error::{CatError, Result};
use crate::quantization::{bump, BumpKind, FourierSymbol, Symbol};
use crate::quantum::{PlanckGrid, QuantumState};

pub const STATE_MAGIC: &[u8; 8] = b"CATSTATE";
const HEADER_LEN: usize = 32;
/// Largest dimension written as JSON.
pub const JSON_STATE_LIMIT: usize = 256;

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CatError::Format(e.to_string()))?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn read_json_value(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CatError::Format(format!("{}: {e}", path.display())))
}

/// Header `CATSTATE | N u64 | θ₁ f64 | θ₂ f64`, then interleaved `(re, im)`, all little-endian.
pub fn encode_state(psi: &QuantumState) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * psi.amps.len());
    buf.extend_from_slice(STATE_MAGIC);
    buf.extend_from_slice(&(psi.grid.n as u64).to_le_bytes());
    buf.extend_from_slice(&psi.grid.theta[0].to_le_bytes());
    buf.extend_from_slice(&psi.grid.theta[1].to_le_bytes());
    for z in &psi.amps {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    buf
}

pub fn decode_state(bytes: &[u8]) -> Result<QuantumState> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != STATE_MAGIC {
        return Err(CatError::Format("missing CATSTATE header".into()));
    }
    let word = |i: usize| -> [u8; 8] { bytes[i..i + 8].try_into().expect("8 bytes") };
    let n = u64::from_le_bytes(word(8)) as usize;
    let theta = [f64::from_le_bytes(word(16)), f64::from_le_bytes(word(24))];
    let expected = n
        .checked_mul(16)
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| CatError::Format(format!("implausible dimension {n}")))?;
    if n == 0 || bytes.len() != expected {
        return Err(CatError::Format(format!(
            "state body has {} bytes, expected {} for N = {n}",
            bytes.len() - HEADER_LEN,
            expected.saturating_sub(HEADER_LEN)
        )));
    }
    let amps = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    Ok(QuantumState::new(PlanckGrid::new(n, theta), amps))
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    #[serde(rename = "N")]
    n: usize,
    theta: [f64; 2],
    amps: Vec<[f64; 2]>,
}

pub fn state_to_json(psi: &QuantumState) -> Result<String> {
    if psi.grid.n > JSON_STATE_LIMIT {
        return Err(CatError::Format(format!(
            "JSON states are limited to N <= {JSON_STATE_LIMIT}"
        )));
    }
    let s = StateJson {
        n: psi.grid.n,
        theta: psi.grid.theta,
        amps: psi.amps.iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string_pretty(&s).map_err(|e| CatError::Format(e.to_string()))
}

pub fn state_from_json(text: &str) -> Result<QuantumState> {
    let s: StateJson = serde_json::from_str(text).map_err(|e| CatError::Format(e.to_string()))?;
    if s.amps.len() != s.n || s.n == 0 {
        return Err(CatError::Format(format!(
            "{} amplitudes for N = {}",
            s.amps.len(),
            s.n
        )));
    }
    let amps = s.amps.iter().map(|a| C64::new(a[0], a[1])).collect();
    Ok(QuantumState::new(PlanckGrid::new(s.n, s.theta), amps))
}

/// Writes JSON when the path ends in `.json`, binary otherwise.
pub fn write_state(path: &Path, psi: &QuantumState) -> Result<()> {
    if path.extension().is_some_and(|e| e == "json") {
        let mut s = state_to_json(psi)?;
        s.push('\n');
        fs::write(path, s)?;
    } else {
        fs::write(path, encode_state(psi))?;
    }
    Ok(())
}

/// Reads either format, recognised by the binary magic.
pub fn read_state(path: &Path) -> Result<QuantumState> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(STATE_MAGIC) {
        decode_state(&bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| CatError::Format(format!("{}: neither CATSTATE nor JSON", path.display())))?;
        state_from_json(&text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HusimiSidecar {
    #[serde(rename = "G")]
    pub g: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub theta: [f64; 2],
    pub matrix: [i64; 4],
    pub norm_sq: f64,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// `G` rows of `G` comma-separated values with 17 significant digits.
pub fn husimi_to_csv(h: &HusimiGrid) -> String {
    let mut s = String::with_capacity(h.values.len() * 25);
    for row in h.values.chunks(h.g) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("{v:.16e}"));
        }
        s.push('\n');
    }
    s
}

/// Writes the CSV grid and its JSON sidecar next to it.
pub fn write_husimi(csv: &Path, h: &HusimiGrid, norm_sq: f64) -> Result<()> {
    let mut f = fs::File::create(csv)?;
    f.write_all(husimi_to_csv(h).as_bytes())?;
    write_json(
        &sidecar_path(csv),
        &HusimiSidecar {
            g: h.g,
            n: h.n,
            theta: h.theta,
            matrix: h.matrix,
            norm_sq,
        },
    )
}

/// Parses a `G × G` CSV grid of reals.
pub fn read_grid_csv(path: &Path) -> Result<(usize, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rows += 1;
        for cell in line.split(',') {
            let v: f64 = cell.trim().parse().map_err(|_| {
                CatError::Format(format!("{}:{}: bad number {cell:?}", path.display(), i + 1))
            })?;
            values.push(v);
        }
    }
    if rows == 0 || values.len() != rows * rows {
        return Err(CatError::Format(format!(
            "{}: expected a square grid, got {} values in {rows} rows",
            path.display(),
            values.len()
        )));
    }
    Ok((rows, values))
}

/// Fourier symbols are `[[n1, n2, re, im], ...]`. Other symbols are objects:
/// `{"kind": "sampled", "csv": "grid.csv"}` (path relative to the JSON file) or
/// `{"kind": "bump", "center": [q, p], "r": r, "side": "minus" | "plus"}`.
pub fn read_symbol(path: &Path) -> Result<Symbol> {
    let v = read_json_value(path)?;
    let bad = |msg: &str| CatError::Format(format!("{}: {msg}", path.display()));
    match &v {
        Value::Array(rows) => {
            let mut terms = Vec::with_capacity(rows.len());
            for r in rows {
                let cells: Option<Vec<f64>> = r
                    .as_array()
                    .filter(|a| a.len() == 4)
                    .map(|a| a.iter().filter_map(Value::as_f64).collect());
                let c = cells
                    .filter(|c| c.len() == 4 && c[0].fract() == 0.0 && c[1].fract() == 0.0)
                    .ok_or_else(|| bad("Fourier rows must be [n1, n2, re, im] with integer n"))?;
                terms.push(([c[0] as i64, c[1] as i64], C64::new(c[2], c[3])));
            }
            Ok(Symbol::Fourier(FourierSymbol { terms }))
        }
        Value::Object(m) => match m.get("kind").and_then(Value::as_str) {
            Some("sampled") => {
                let rel = m
                    .get("csv")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("sampled symbol needs \"csv\""))?;
                let csv = path.parent().unwrap_or(Path::new(".")).join(rel);
                let (g, values) = read_grid_csv(&csv)?;
                Ok(Symbol::Sampled {
                    g,
                    values: values.into_iter().map(|x| C64::new(x, 0.0)).collect(),
                })
            }
            Some("bump") => {
                let center: [f64; 2] = m
                    .get("center")
                    .and_then(|c| serde_json::from_value(c.clone()).ok())
                    .ok_or_else(|| bad("bump needs \"center\": [q, p]"))?;
                let r = m
                    .get("r")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| bad("bump needs \"r\""))?;
                let kind = match m.get("side").and_then(Value::as_str).unwrap_or("minus") {
                    "minus" => BumpKind::Minus,
                    "plus" => BumpKind::Plus,
                    other => return Err(bad(&format!("unknown bump side {other:?}"))),
                };
                Ok(Symbol::Bump(bump(center, r, kind)?))
            }
            _ => Err(bad("unknown symbol kind")),
        },
        _ => Err(bad("expected an array or an object")),
    }
}

pub fn fourier_to_json(sym: &FourierSymbol) -> Value {
    Value::Array(
        sym.terms
            .iter()
            .map(|(n, c)| serde_json::json!([n[0], n[1], c.re, c.im]))
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitJson {
    pub matrix: [i64; 4],
    #[serde(rename = "T")]
    pub t: usize,
    pub l: u64,
    pub points: Vec<[u64; 2]>,
}

pub fn orbit_json(map: &CatMap, orbit: &Orbit) -> OrbitJson {
    OrbitJson {
        matrix: map.entries(),
        t: orbit.period(),
        l: orbit.l,
        points: orbit.points.iter().map(|p| [p.j, p.k]).collect(),
    }
}
