//! JSON environment documents.
//!
//! Accepted shapes (exactly one environment key per document):
//!
//! ```json
//! {"n": 2, "matrix": [[1, 0.6667], [0.3333, 1]]}
//! {"utilities": [6, 5, 4, 3, 2]}
//! {"uniform_gap": {"n": 5, "p": 0.25, "winner": 0}}
//! {"gamma": {"n": 3, "gamma": 0.5, "winner": 0}}
//! ```
//!
//! `n` is optional next to `matrix` but must match when present. The
//! `gamma` form builds the uniform-gap matrix whose winner has stationary
//! mass `1 - gamma` under the single-duel (1+1) EA.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::gamma_to_p;
use crate::preference::{PlackettLuceModel, PreferenceMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_gap: Option<UniformGapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformGapDoc {
    pub n: usize,
    pub p: f64,
    #[serde(default)]
    pub winner: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaDoc {
    pub n: usize,
    pub gamma: f64,
    #[serde(default)]
    pub winner: usize,
}

/// A resolved environment: the pairwise matrix plus the utility model when
/// the document was given as utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub matrix: PreferenceMatrix,
    pub utilities: Option<PlackettLuceModel>,
}

/// Guard against documents that would allocate absurd matrices.
pub const MAX_ARMS: usize = 4096;

impl EnvironmentDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn from_utilities(u: Vec<f64>) -> Self {
        Self {
            n: None,
            matrix: None,
            utilities: Some(u),
            uniform_gap: None,
            gamma: None,
        }
    }

    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Self {
        Self {
            n: Some(rows.len()),
            matrix: Some(rows),
            utilities: None,
            uniform_gap: None,
            gamma: None,
        }
    }

    pub fn resolve(&self) -> Result<Environment> {
        let given = [
            self.matrix.is_some(),
            self.utilities.is_some(),
            self.uniform_gap.is_some(),
            self.gamma.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if given != 1 {
            return Err(Error::Document(format!(
                "expected exactly one of matrix, utilities, uniform_gap, gamma (found {given})"
            )));
        }
        if let Some(rows) = &self.matrix {
            guard_size(rows.len())?;
            if let Some(n) = self.n {
                if n != rows.len() {
                    return Err(Error::Document(format!("n = {n} but matrix has {} rows", rows.len())));
                }
            }
            return Ok(Environment {
                matrix: PreferenceMatrix::new(rows)?,
                utilities: None,
            });
        }
        if self.n.is_some() {
            return Err(Error::Document("n is only allowed next to matrix".into()));
        }
        if let Some(u) = &self.utilities {
            guard_size(u.len())?;
            if u.len() < 2 {
                return Err(Error::Dimension(format!("{} utilities", u.len())));
            }
            let model = PlackettLuceModel::new(u.clone())?;
            return Ok(Environment {
                matrix: model.to_matrix(),
                utilities: Some(model),
            });
        }
        if let Some(g) = &self.uniform_gap {
            guard_size(g.n)?;
            return Ok(Environment {
                matrix: PreferenceMatrix::uniform_gap(g.n, g.winner, g.p)?,
                utilities: None,
            });
        }
        let g = self.gamma.as_ref().expect("one variant present");
        guard_size(g.n)?;
        let gap = gamma_to_p(g.gamma, g.n)?;
        Ok(Environment {
            matrix: PreferenceMatrix::uniform_gap(g.n, g.winner, gap.p)?,
            utilities: None,
        })
    }
}

fn guard_size(n: usize) -> Result<()> {
    if n > MAX_ARMS {
        Err(Error::ResourceLimit(format!("{n} arms exceeds the limit of {MAX_ARMS}")))
    } else {
        Ok(())
    }
}

/// Parses and resolves a document in one step.
pub fn parse_environment(text: &str) -> Result<Environment> {
    EnvironmentDoc::from_json(text)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_document() {
        let env = parse_environment(r#"{"n": 2, "matrix": [[1, 0.75], [0.25, 1]]}"#).unwrap();
        assert_eq!(env.matrix.get(0, 1), 0.75);
        assert!(env.utilities.is_none());
        let env = parse_environment(r#"{"matrix": [[1, 0.75], [0.25, 1]]}"#).unwrap();
        assert_eq!(env.matrix.n(), 2);
    }

    #[test]
    fn utilities_document() {
        let env = parse_environment(r#"{"utilities": [2, 1, 1]}"#).unwrap();
        assert_eq!(env.matrix.condorcet_winner(), Some(0));
        assert_eq!(env.utilities.unwrap().utilities(), &[2.0, 1.0, 1.0]);
    }

    #[test]
    fn derived_documents() {
        let env = parse_environment(r#"{"uniform_gap": {"n": 4, "p": 0.2, "winner": 3}}"#).unwrap();
        assert_eq!(env.matrix.condorcet_gap(), Some((3, 0.2)));
        let env = parse_environment(r#"{"gamma": {"n": 3, "gamma": 0.5}}"#).unwrap();
        assert!((env.matrix.get(1, 0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_documents() {
        for text in [
            "",
            "{}",
            r#"{"n": 3, "matrix": [[1, 0.75], [0.25, 1]]}"#,
            r#"{"utilities": [1, 2], "matrix": [[1, 0.5], [0.5, 1]]}"#,
            r#"{"utilities": [1]}"#,
            r#"{"utilities": [1, -2]}"#,
            r#"{"n": 2, "utilities": [1, 2]}"#,
            r#"{"utilities": [1, 2], "extra": true}"#,
            r#"{"matrix": [[1, 0.6], [0.5, 1]]}"#,
            r#"{"uniform_gap": {"n": 100000, "p": 0.1}}"#,
        ] {
            assert!(parse_environment(text).is_err(), "{text}");
        }
    }
}
