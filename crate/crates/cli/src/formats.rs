//! JSON files for instances, Hamiltonians and exact solutions.
//!
//! Bit strings are written qubit 0 first, so `"10"` means `x_0 = 1, x_1 = 0`
//! (amplitude index 1).

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use vqebench_core::exact::ExactSolution;

/// Writes `bytes` to a sibling temp file and renames it over `path`, so a
/// reader never sees a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f =
            fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn bitstring(z: u64, qubits: usize) -> String {
    (0..qubits)
        .map(|i| if z >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(s: &str) -> Result<u64> {
    if s.len() > 64 {
        bail!("bit string longer than 64 characters");
    }
    s.chars().enumerate().try_fold(0u64, |z, (i, c)| match c {
        '0' => Ok(z),
        '1' => Ok(z | 1 << i),
        _ => bail!("invalid character {c:?} in bit string"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSolutionFile {
    pub qubits: usize,
    pub optimum: f64,
    pub optimal_set: Vec<String>,
    /// `[value, count]` pairs, ascending by value.
    pub histogram: Vec<(f64, u64)>,
}

impl From<&ExactSolution> for ExactSolutionFile {
    fn from(s: &ExactSolution) -> Self {
        Self {
            qubits: s.qubits,
            optimum: s.optimum,
            optimal_set: s
                .optimal_set
                .iter()
                .map(|&z| bitstring(z, s.qubits))
                .collect(),
            histogram: s.histogram.clone(),
        }
    }
}

impl TryFrom<ExactSolutionFile> for ExactSolution {
    type Error = anyhow::Error;

    fn try_from(f: ExactSolutionFile) -> Result<Self> {
        let mut optimal_set = Vec::with_capacity(f.optimal_set.len());
        for s in &f.optimal_set {
            if s.len() != f.qubits {
                bail!("bit string {s:?} does not have {} characters", f.qubits);
            }
            optimal_set.push(parse_bitstring(s)?);
        }
        optimal_set.sort_unstable();
        Ok(ExactSolution {
            qubits: f.qubits,
            optimum: f.optimum,
            optimal_set,
            histogram: f.histogram,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstrings_are_little_endian() {
        assert_eq!(bitstring(1, 3), "100");
        assert_eq!(bitstring(0b110, 3), "011");
        for z in 0..64 {
            assert_eq!(parse_bitstring(&bitstring(z, 6)).unwrap(), z);
        }
        assert!(parse_bitstring("012").is_err());
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.json");
        write_json(&p, &[1, 2, 3]).unwrap();
        let back: Vec<i32> = read_json(&p).unwrap();
        assert_eq!(back, [1, 2, 3]);
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
