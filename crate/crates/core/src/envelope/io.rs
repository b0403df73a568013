use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::analysis::FibreProfile;
use super::grid::Axes;
use super::solver::{EnvelopeSolution, SolverDiagnostics};
use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

/// Writes `t,v` rows; an infinite top value is written as `inf`.
pub fn write_fibre_csv(profile: &FibreProfile, path: &Path) -> Result<()> {
    let mut out = String::from("t,v\n");
    for (t, v) in &profile.points {
        out.push_str(&format!("{t:.17e},{v:.17e}\n"));
    }
    fs::write(path, out).map_err(io_err(path))
}

/// JSON sidecar of a binary field dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub format: String,
    pub order: String,
    /// `[n_t, n_y, n_x]`, slowest first
    pub shape: [usize; 3],
    pub axes: Axes,
    pub boundary: String,
    pub diagnostics: SolverDiagnostics,
}

/// Writes the full field as little-endian f64 (x fastest, then y, then t)
/// to `path` and its description to `path` with `.json` appended.
pub fn write_field(sol: &EnvelopeSolution, path: &Path) -> Result<FieldSidecar> {
    let axes = sol.grid().axes();
    let mut bytes = Vec::with_capacity(8 * sol.values().len());
    for v in sol.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    file.write_all(&bytes).map_err(io_err(path))?;
    let sidecar = FieldSidecar {
        format: "f64le".into(),
        order: "x-fastest".into(),
        shape: [axes.n_t, axes.n_xy, axes.n_xy],
        axes,
        boundary: sol.boundary().label(),
        diagnostics: sol.diagnostics(),
    };
    let side = sidecar_path(path);
    fs::write(&side, serde_json::to_string_pretty(&sidecar)?).map_err(io_err(&side))?;
    Ok(sidecar)
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

/// Reads a field written by [`write_field`].
pub fn read_field(path: &Path) -> Result<(FieldSidecar, Vec<f64>)> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(io_err(&side))?;
    let sidecar: FieldSidecar = serde_json::from_str(&text)?;
    let bytes = fs::read(path).map_err(io_err(path))?;
    let [a, b, c] = sidecar.shape;
    if bytes.len() != 8 * a * b * c {
        return Err(Error::GridMismatch(format!(
            "{} holds {} bytes, sidecar expects {}",
            path.display(),
            bytes.len(),
            8 * a * b * c
        )));
    }
    let values = bytes.chunks_exact(8).map(|ch| f64::from_le_bytes(ch.try_into().expect("8-byte chunk"))).collect();
    Ok((sidecar, values))
}
