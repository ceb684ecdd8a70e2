//! JSON documents exchanged with the command line: coefficient tables and
//! atom models.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{AtomSite, GaussianAtomModel};
use crate::shells::{Dim, ShellModel, ShellTerm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub mu: f64,
    pub nu: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TableMeta {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_abs_error: Option<f64>,
}

/// Serialized shell model. Numbers are written in shortest round-trip form,
/// so reading a written table gives back the same doubles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDocument {
    pub dimension: u8,
    pub x_max: f64,
    pub label: String,
    pub terms: Vec<TermRecord>,
    pub meta: TableMeta,
}

impl TableDocument {
    pub fn from_model(model: &ShellModel, meta: TableMeta) -> Self {
        TableDocument {
            dimension: model.dim().n(),
            x_max: model.x_max(),
            label: model.label().to_string(),
            terms: model
                .terms()
                .iter()
                .map(|t| TermRecord {
                    mu: t.mu,
                    nu: t.nu,
                    kappa: t.kappa,
                })
                .collect(),
            meta,
        }
    }

    pub fn to_model(&self) -> Result<ShellModel> {
        let dim = Dim::try_from(self.dimension)?;
        let terms = self
            .terms
            .iter()
            .map(|t| ShellTerm {
                kappa: t.kappa,
                mu: t.mu,
                nu: t.nu,
            })
            .collect();
        ShellModel::new(dim, terms, self.x_max, self.label.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TableDocument = serde_json::from_str(text)?;
        doc.to_model()?;
        Ok(doc)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub b_factor: f64,
    #[serde(default = "full_occupancy")]
    pub occupancy: f64,
    pub type_label: String,
}

fn full_occupancy() -> f64 {
    1.0
}

/// Atoms plus one Gaussian-mixture model per atom type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomModelDocument {
    pub atoms: Vec<AtomRecord>,
    pub types: BTreeMap<String, GaussianAtomModel>,
}

impl AtomModelDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut doc: AtomModelDocument = serde_json::from_str(text)?;
        for (label, model) in &mut doc.types {
            if model.label.is_empty() {
                model.label = label.clone();
            }
            model.validate()?;
        }
        for site in doc.sites() {
            site.validate()?;
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn sites(&self) -> Vec<AtomSite> {
        self.atoms
            .iter()
            .map(|a| AtomSite {
                position: [a.x, a.y, a.z],
                b_factor: a.b_factor,
                occupancy: a.occupancy,
                type_label: a.type_label.clone(),
            })
            .collect()
    }

    /// Atom type labels used by some atom but absent from `types`, sorted.
    pub fn missing_types(&self) -> Vec<String> {
        let mut missing: Vec<String> = self
            .atoms
            .iter()
            .filter(|a| !self.types.contains_key(&a.type_label))
            .map(|a| a.type_label.clone())
            .collect();
        missing.sort();
        missing.dedup();
        missing
    }

    pub fn check_types(&self) -> Result<()> {
        let missing = self.missing_types();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Lookup(missing.join(", ")))
        }
    }
}
