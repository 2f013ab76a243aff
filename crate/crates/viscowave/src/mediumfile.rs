//! JSON medium files.
//!
//! ```json
//! {
//!   "density": 1.0,
//!   "equilibrium_modulus_voigt": [[...6...], ...6 rows...],
//!   "prony_terms": [{"rate": 1.0, "modulus_voigt": [[...]]}]
//! }
//! ```
//!
//! Moduli are 6x6 symmetric matrices in Voigt order 11, 22, 33, 23, 13, 12.

use std::path::Path;

use serde::{Deserialize, Serialize};
use viscowave_core::medium::{PronyTerm, RelaxationModel, SymTensor4};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumFile {
    pub density: f64,
    pub equilibrium_modulus_voigt: [[f64; 6]; 6],
    #[serde(default)]
    pub prony_terms: Vec<PronyTermFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PronyTermFile {
    pub rate: f64,
    pub modulus_voigt: [[f64; 6]; 6],
}

impl MediumFile {
    pub fn from_model(model: &RelaxationModel) -> Self {
        MediumFile {
            density: model.rho(),
            equilibrium_modulus_voigt: *model.g_inf().voigt(),
            prony_terms: model
                .terms()
                .iter()
                .map(|t| PronyTermFile {
                    rate: t.rate,
                    modulus_voigt: *t.modulus.voigt(),
                })
                .collect(),
        }
    }

    pub fn to_model(&self) -> viscowave_core::Result<RelaxationModel> {
        let terms = self
            .prony_terms
            .iter()
            .map(|t| {
                Ok(PronyTerm {
                    rate: t.rate,
                    modulus: SymTensor4::new(t.modulus_voigt)?,
                })
            })
            .collect::<viscowave_core::Result<Vec<_>>>()?;
        RelaxationModel::new(
            self.density,
            SymTensor4::new(self.equilibrium_modulus_voigt)?,
            terms,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }
}

/// Parses a medium from JSON text; `origin` names the source in messages.
pub fn parse_medium(text: &str, origin: &str) -> Result<RelaxationModel, CliError> {
    let file: MediumFile = serde_json::from_str(text).map_err(|e| {
        let line = e.line();
        let context = text
            .lines()
            .nth(line.saturating_sub(1))
            .map(|l| format!("\n  {line} | {}", l.trim_end()))
            .unwrap_or_default();
        CliError::Parse {
            origin: origin.to_string(),
            message: format!("{e}{context}"),
        }
    })?;
    file.to_model().map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        message: e.to_string(),
    })
}

pub fn load_medium(path: &Path) -> Result<RelaxationModel, CliError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse {
        origin: origin.clone(),
        message: e.to_string(),
    })?;
    parse_medium(&text, &origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use viscowave_core::reference::{medium_a, medium_b};

    #[test]
    fn round_trip() {
        for m in [medium_a(), medium_b()] {
            let text = MediumFile::from_model(&m).to_json();
            assert_eq!(parse_medium(&text, "mem").unwrap(), m);
        }
    }

    #[test]
    fn missing_density_names_field_and_line() {
        let text = MediumFile::from_model(&medium_a()).to_json();
        let text = text.replace("  \"density\": 1.0,\n", "");
        let err = parse_medium(&text, "a.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("density") && msg.contains("line"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn asymmetric_modulus_is_a_parse_error() {
        let mut f = MediumFile::from_model(&medium_a());
        f.equilibrium_modulus_voigt[0][1] += 0.5;
        let err = parse_medium(&f.to_json(), "x").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
