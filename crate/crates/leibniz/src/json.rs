//! JSON wire formats. Rationals travel as strings in lowest terms, field
//! elements as expression strings in the canonical rendering, tables as
//! interior entry lists with boundary entries implied. A sequence document
//! lists the terms d_1,...,d_n only; d_0 is always the identity on the wire.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derivation::DerivationSpec;
use crate::field::FieldElement;
use crate::gamma::{GammaTable, GammaVector, GammaViolation};
use crate::parser::{parse_element, ParseError};
use crate::poly::Generators;
use crate::rational::{parse_rational, render_rational, Rational};
use crate::sequence::{DerivationSequence, ExtensionTerm, SequenceTerm};
use crate::system::{CorldReport, DecomposeReport, SystemReport};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational `{0}`")]
    BadRational(String),
    #[error("bad expression `{text}`: {source}")]
    BadExpression { text: String, source: ParseError },
    #[error("bad generator list: {0}")]
    BadGenerators(crate::poly::FieldError),
    #[error("derivation spec rejected: {0}")]
    BadSpec(crate::derivation::DerivationError),
    #[error("table invalid at ({i}, {j}): {kind}", i = .0[0].indices().0, j = .0[0].indices().1, kind = .0[0].kind())]
    BadTable(Vec<GammaViolation>),
    #[error("gamma vector rejected: {0}")]
    BadGammaVector(crate::gamma::GammaError),
    #[error("document says n = {stated} but lists {listed} terms")]
    TermCountMismatch { stated: usize, listed: usize },
    #[error("sequence rejected: {0}")]
    BadSequence(crate::sequence::SequenceError),
}

fn parse_expr(text: &str, gens: &Generators) -> Result<FieldElement, SchemaError> {
    parse_element(text, gens).map_err(|source| SchemaError::BadExpression {
        text: text.to_string(),
        source,
    })
}

fn parse_rat(text: &str) -> Result<Rational, SchemaError> {
    parse_rational(text).map_err(|_| SchemaError::BadRational(text.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecDoc {
    pub generators: Vec<String>,
    pub values: BTreeMap<String, String>,
}

impl SpecDoc {
    pub fn from_spec(spec: &DerivationSpec) -> Self {
        let gens = spec.generators();
        let values = gens
            .names()
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), spec.value(i).to_string()))
            .collect();
        SpecDoc {
            generators: gens.names().to_vec(),
            values,
        }
    }

    pub fn to_spec(&self) -> Result<DerivationSpec, SchemaError> {
        let gens =
            Generators::new(self.generators.clone()).map_err(SchemaError::BadGenerators)?;
        let mut values = BTreeMap::new();
        for (name, text) in &self.values {
            values.insert(name.clone(), parse_expr(text, &gens)?);
        }
        DerivationSpec::new(&gens, &values).map_err(SchemaError::BadSpec)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableDoc {
    pub n: usize,
    pub entries: Vec<(usize, usize, String)>,
}

impl TableDoc {
    pub fn from_table(table: &GammaTable) -> Self {
        TableDoc {
            n: table.n(),
            entries: table
                .interior_entries()
                .map(|(i, j, v)| (i, j, render_rational(v)))
                .collect(),
        }
    }

    /// Raw (index, index, value) triples for `GammaTable::validate`.
    pub fn raw_entries(&self) -> Result<Vec<(usize, usize, Rational)>, SchemaError> {
        self.entries
            .iter()
            .map(|(i, j, text)| Ok((*i, *j, parse_rat(text)?)))
            .collect()
    }

    pub fn to_table(&self) -> Result<GammaTable, SchemaError> {
        GammaTable::validate(self.n, &self.raw_entries()?).map_err(SchemaError::BadTable)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaVectorDoc {
    pub gamma: Vec<String>,
}

impl GammaVectorDoc {
    pub fn from_vector(v: &GammaVector) -> Self {
        GammaVectorDoc {
            gamma: v.values().iter().map(render_rational).collect(),
        }
    }

    pub fn to_vector(&self) -> Result<GammaVector, SchemaError> {
        let values: Vec<Rational> = self
            .gamma
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<_, _>>()?;
        GammaVector::new(values).map_err(SchemaError::BadGammaVector)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TermDoc {
    Iterate { order: usize, scale: String },
    Extension { choices: BTreeMap<String, String> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceDoc {
    pub n: usize,
    pub gamma: TableDoc,
    pub base: SpecDoc,
    pub terms: Vec<TermDoc>,
}

impl SequenceDoc {
    pub fn from_sequence(seq: &DerivationSequence) -> Self {
        let gens = seq.base().generators();
        let terms = seq.terms()[1..]
            .iter()
            .map(|term| match term {
                SequenceTerm::Identity => TermDoc::Iterate {
                    order: 0,
                    scale: "1".to_string(),
                },
                SequenceTerm::Iterate { order, scale } => TermDoc::Iterate {
                    order: *order,
                    scale: render_rational(scale),
                },
                SequenceTerm::Extension(ext) => TermDoc::Extension {
                    choices: gens
                        .names()
                        .iter()
                        .enumerate()
                        .map(|(i, name)| (name.clone(), ext.choice(i).to_string()))
                        .collect(),
                },
            })
            .collect();
        SequenceDoc {
            n: seq.n(),
            gamma: TableDoc::from_table(seq.gamma()),
            base: SpecDoc::from_spec(seq.base()),
            terms,
        }
    }

    pub fn to_sequence(&self) -> Result<DerivationSequence, SchemaError> {
        if self.n != self.terms.len() {
            return Err(SchemaError::TermCountMismatch {
                stated: self.n,
                listed: self.terms.len(),
            });
        }
        let base = self.base.to_spec()?;
        let gens = base.generators().clone();
        let gamma = self.gamma.to_table()?;
        let mut terms = vec![SequenceTerm::Identity];
        for doc in &self.terms {
            terms.push(match doc {
                TermDoc::Iterate { order, scale } => SequenceTerm::Iterate {
                    order: *order,
                    scale: parse_rat(scale)?,
                },
                TermDoc::Extension { choices } => {
                    let mut values = Vec::with_capacity(gens.len());
                    for name in gens.names() {
                        match choices.get(name) {
                            Some(text) => values.push(parse_expr(text, &gens)?),
                            None => values.push(FieldElement::zero(&gens)),
                        }
                    }
                    SequenceTerm::Extension(ExtensionTerm::new(values))
                }
            });
        }
        DerivationSequence::from_parts(base, gamma, terms).map_err(SchemaError::BadSequence)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationDoc {
    pub k: usize,
    pub x: String,
    pub y: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemReportDoc {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub violations: Vec<ViolationDoc>,
}

impl SystemReportDoc {
    pub fn from_report(report: &SystemReport) -> Self {
        SystemReportDoc {
            n: report.n,
            seed: report.seed,
            samples: report.samples,
            violations: report
                .violations
                .iter()
                .map(|v| ViolationDoc {
                    k: v.k,
                    x: v.x.to_string(),
                    y: v.y.to_string(),
                    lhs: v.lhs.to_string(),
                    rhs: v.rhs.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorldViolationDoc {
    pub condition: String,
    pub inputs: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorldReportDoc {
    pub order: usize,
    pub seed: u64,
    pub samples: usize,
    pub violations: Vec<CorldViolationDoc>,
}

impl CorldReportDoc {
    pub fn from_report(report: &CorldReport) -> Self {
        CorldReportDoc {
            order: report.order,
            seed: report.seed,
            samples: report.samples,
            violations: report
                .violations
                .iter()
                .map(|v| CorldViolationDoc {
                    condition: v.condition.to_string(),
                    inputs: v.inputs.iter().map(|x| x.to_string()).collect(),
                    lhs: v.lhs.to_string(),
                    rhs: v.rhs.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualViolationDoc {
    pub x: String,
    pub y: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecomposeReportDoc {
    pub order: usize,
    pub seed: u64,
    pub samples: usize,
    pub residual_on_generators: BTreeMap<String, String>,
    pub violations: Vec<ResidualViolationDoc>,
}

impl DecomposeReportDoc {
    pub fn from_report(report: &DecomposeReport, gens: &Generators) -> Self {
        DecomposeReportDoc {
            order: report.order,
            seed: report.seed,
            samples: report.samples,
            residual_on_generators: gens
                .names()
                .iter()
                .zip(&report.residual_on_generators)
                .map(|(name, v)| (name.clone(), v.to_string()))
                .collect(),
            violations: report
                .violations
                .iter()
                .map(|v| ResidualViolationDoc {
                    x: v.x.to_string(),
                    y: v.y.to_string(),
                    lhs: v.lhs.to_string(),
                    rhs: v.rhs.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleViolationDoc {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub lhs: String,
    pub rhs: String,
}

pub fn cocycle_violations_doc(report: &crate::gamma::CocycleReport) -> Vec<CocycleViolationDoc> {
    report
        .violations
        .iter()
        .map(|v| CocycleViolationDoc {
            i: v.i,
            j: v.j,
            k: v.k,
            lhs: render_rational(&v.lhs),
            rhs: render_rational(&v.rhs),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableViolationDoc {
    pub i: usize,
    pub j: usize,
    pub kind: String,
}

pub fn table_violations_doc(violations: &[GammaViolation]) -> Vec<TableViolationDoc> {
    violations
        .iter()
        .map(|v| {
            let (i, j) = v.indices();
            TableViolationDoc {
                i,
                j,
                kind: v.kind().to_string(),
            }
        })
        .collect()
}
