//! Finite atom spaces and measures on them.
//!
//! Atoms stand in for the Borel sets on which measures are evaluated: every
//! measure in this crate is a finite vector of atom weights, and "almost
//! everywhere" statements become "on every atom above the zero threshold".

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{FormError, Result};

/// Which form backend an atom space belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendKind {
    #[serde(rename = "graph")]
    Graph,
    #[serde(rename = "sg-cells")]
    SgCells,
    #[serde(rename = "superposition")]
    Superposition,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Graph => "graph",
            BackendKind::SgCells => "sg-cells",
            BackendKind::Superposition => "superposition",
        }
    }
}

/// Ordered list of measure atoms with base-measure weights.
#[derive(Debug, Clone)]
pub struct AtomSpace {
    kind: BackendKind,
    ids: Vec<String>,
    m: Vec<f64>,
    positions: HashMap<String, usize>,
}

impl AtomSpace {
    /// Base measure weights must be strictly positive and ids unique.
    pub fn new(kind: BackendKind, ids: Vec<String>, m: Vec<f64>) -> Result<Self> {
        if ids.len() != m.len() {
            return Err(FormError::InvalidAtomSpace(format!(
                "{} ids but {} weights",
                ids.len(),
                m.len()
            )));
        }
        if ids.is_empty() {
            return Err(FormError::InvalidAtomSpace("no atoms".into()));
        }
        for (id, &w) in ids.iter().zip(&m) {
            if !(w > 0.0) || !w.is_finite() {
                return Err(FormError::InvalidAtomSpace(format!(
                    "atom `{id}` has non-positive base weight {w}"
                )));
            }
        }
        let mut positions = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if positions.insert(id.clone(), i).is_some() {
                return Err(FormError::InvalidAtomSpace(format!("duplicate atom id `{id}`")));
            }
        }
        Ok(AtomSpace { kind, ids, m, positions })
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, atom: usize) -> &str {
        &self.ids[atom]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.positions.get(id).copied()
    }

    pub fn m_weight(&self, atom: usize) -> f64 {
        self.m[atom]
    }

    pub fn m_weights(&self) -> &[f64] {
        &self.m
    }

    pub fn total_mass(&self) -> f64 {
        self.m.iter().sum()
    }
}

/// Nonnegative measure as a per-atom weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureVec(Vec<f64>);

impl MeasureVec {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        for (i, &w) in weights.iter().enumerate() {
            if w < 0.0 || !w.is_finite() {
                return Err(FormError::InvalidInput(format!(
                    "measure weight {w} at position {i} is not a finite nonnegative value"
                )));
            }
        }
        Ok(MeasureVec(weights))
    }

    pub fn zeros(len: usize) -> Self {
        MeasureVec(vec![0.0; len])
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, atom: usize) -> f64 {
        self.0[atom]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Signed measure (mutual energy measures take both signs).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasureVec(Vec<f64>);

impl SignedMeasureVec {
    pub fn new(weights: Vec<f64>) -> Self {
        SignedMeasureVec(weights)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, atom: usize) -> f64 {
        self.0[atom]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl From<MeasureVec> for SignedMeasureVec {
    fn from(m: MeasureVec) -> Self {
        SignedMeasureVec(m.0)
    }
}
