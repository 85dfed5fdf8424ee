//! File formats (f64 only).
//!
//! * system: `{"atoms": [..labels..], "measure": [..], "map": [..0-based..]}`
//! * potential: `[..]`
//! * functional: `[..]` or `{"weights": [..], "mode": "essential" | "full"}`
//! * partition of unity: `[[..], ..]`, one inner array per member

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{FiniteSystem, Functional, Mode, PartitionOfUnity, Potential};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub atoms: Vec<String>,
    pub measure: Vec<f64>,
    pub map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum FunctionalFile {
    Bare(Vec<f64>),
    Tagged {
        weights: Vec<f64>,
        #[serde(default)]
        mode: Mode,
    },
}

fn parse_err(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e))
}

pub fn parse_system(text: &str) -> Result<FiniteSystem<f64>> {
    let file: SystemFile = serde_json::from_str(text).map_err(|e| parse_err("system", e))?;
    FiniteSystem::new(file.atoms, file.measure, file.map).map_err(|e| parse_err("system", e))
}

pub fn system_to_string(sys: &FiniteSystem<f64>) -> String {
    let file = SystemFile {
        atoms: sys.labels().to_vec(),
        measure: sys.measure().to_vec(),
        map: sys.map().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

pub fn parse_potential(text: &str, atoms: usize) -> Result<Potential<f64>> {
    let v: Vec<f64> = serde_json::from_str(text).map_err(|e| parse_err("potential", e))?;
    check_len("potential", v.len(), atoms)?;
    Potential::new(v).map_err(|e| parse_err("potential", e))
}

pub fn parse_functional(text: &str, atoms: usize) -> Result<Functional<f64>> {
    let (weights, mode) = match serde_json::from_str(text).map_err(|e| parse_err("functional", e))? {
        FunctionalFile::Bare(w) => (w, Mode::Essential),
        FunctionalFile::Tagged { weights, mode } => (weights, mode),
    };
    check_len("functional", weights.len(), atoms)?;
    Functional::new(weights, mode).map_err(|e| parse_err("functional", e))
}

pub fn functional_to_string(mu: &Functional<f64>) -> String {
    let file = FunctionalFile::Tagged {
        weights: mu.weights().to_vec(),
        mode: mu.mode(),
    };
    serde_json::to_string(&file).expect("plain data serializes")
}

pub fn parse_partition(text: &str, atoms: usize) -> Result<PartitionOfUnity<f64>> {
    let members: Vec<Vec<f64>> = serde_json::from_str(text).map_err(|e| parse_err("partition", e))?;
    PartitionOfUnity::new(members, atoms).map_err(|e| parse_err("partition", e))
}

fn check_len(what: &str, got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::Parse(format!("{what}: expected {expected} values, got {got}")))
    }
}

pub fn load_system(path: impl AsRef<Path>) -> Result<FiniteSystem<f64>> {
    parse_system(&read(path.as_ref())?)
}

pub fn load_potential(path: impl AsRef<Path>, atoms: usize) -> Result<Potential<f64>> {
    parse_potential(&read(path.as_ref())?, atoms)
}

pub fn load_functional(path: impl AsRef<Path>, atoms: usize) -> Result<Functional<f64>> {
    parse_functional(&read(path.as_ref())?, atoms)
}

pub fn load_partition(path: impl AsRef<Path>, atoms: usize) -> Result<PartitionOfUnity<f64>> {
    parse_partition(&read(path.as_ref())?, atoms)
}
