//! JSON family and report files.
//!
//! Doubles are written in their shortest round-trip decimal form and parsed
//! with correct rounding, so `parse(serialize(x)) == x` bit for bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomp::{
    BlockSchedule, DecompositionResult, LedgerEntry, PerturbationCertificate, Strategy,
};
use crate::error::{Error, Result};
use crate::frames::SpectralReport;
use crate::linops::{Label, Scalar, ScalarKind, VectorFamily};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub dim: usize,
    pub scalars: ScalarKind,
    pub vectors: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
}

/// A family of either scalar field, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFamily {
    Real(VectorFamily<f64>),
    Complex(VectorFamily<Complex64>),
}

impl AnyFamily {
    pub fn labels(&self) -> &[Label] {
        match self {
            AnyFamily::Real(f) => f.labels(),
            AnyFamily::Complex(f) => f.labels(),
        }
    }
}

impl FamilyFile {
    pub fn from_family<T: Scalar>(family: &VectorFamily<T>) -> Self {
        let vectors = (0..family.len())
            .map(|i| {
                family
                    .vector(i)
                    .iter()
                    .map(|&x| {
                        let (re, im) = x.parts();
                        match T::KIND {
                            ScalarKind::Real => Entry::Real(re),
                            ScalarKind::Complex => Entry::Complex([re, im]),
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            dim: family.dim(),
            scalars: T::KIND,
            vectors,
            labels: Some(family.labels().to_vec()),
        }
    }

    /// Converts to a family over `T`, which must match `scalars`.
    pub fn to_family<T: Scalar>(&self) -> Result<VectorFamily<T>> {
        if self.scalars != T::KIND {
            return Err(Error::ScalarMismatch {
                expected: T::KIND,
                found: self.scalars,
            });
        }
        let mut vectors = Vec::with_capacity(self.vectors.len());
        for (position, v) in self.vectors.iter().enumerate() {
            let coords = v
                .iter()
                .map(|e| match (self.scalars, *e) {
                    (ScalarKind::Real, Entry::Real(x)) => T::from_parts(x, 0.0),
                    (ScalarKind::Complex, Entry::Complex([re, im])) => T::from_parts(re, im),
                    _ => None,
                })
                .collect::<Option<Vec<T>>>()
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "vector {position} has entries that do not match scalars {:?}",
                        self.scalars
                    ))
                })?;
            vectors.push(coords);
        }
        let family = VectorFamily::new(self.dim, vectors)?;
        match &self.labels {
            Some(labels) => family.with_labels(labels.clone()),
            None => Ok(family),
        }
    }

    pub fn to_any(&self) -> Result<AnyFamily> {
        Ok(match self.scalars {
            ScalarKind::Real => AnyFamily::Real(self.to_family()?),
            ScalarKind::Complex => AnyFamily::Complex(self.to_family()?),
        })
    }
}

pub fn parse_family(text: &str) -> Result<FamilyFile> {
    let file: FamilyFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    // shape and finiteness checks
    file.to_any()?;
    Ok(file)
}

/// A decomposition with every index rendered as a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionReport {
    pub strategy: Strategy,
    pub epsilon: f64,
    pub start_index: Label,
    pub parts: [Vec<Label>; 2],
    pub blocks: [Vec<Vec<Label>>; 2],
    pub cuts: Vec<usize>,
    pub ledger: Vec<LedgerEntry>,
    pub energies: [f64; 2],
    pub perturbed: [FamilyFile; 2],
}

impl DecompositionReport {
    pub fn from_result<T: Scalar>(
        family: &VectorFamily<T>,
        result: &DecompositionResult<T>,
    ) -> Self {
        let labels = family.labels();
        let to_labels = |ps: &[usize]| ps.iter().map(|&p| labels[p]).collect::<Vec<_>>();
        let blocks_of = |bs: &[Vec<usize>]| bs.iter().map(|b| to_labels(b)).collect::<Vec<_>>();
        Self {
            strategy: result.strategy,
            epsilon: result.epsilon,
            start_index: labels[result.start],
            parts: [to_labels(&result.parts[0]), to_labels(&result.parts[1])],
            blocks: [
                blocks_of(&result.schedule.blocks_s),
                blocks_of(&result.schedule.blocks_t),
            ],
            cuts: result.schedule.cuts.clone(),
            ledger: result.schedule.ledger.clone(),
            energies: result.energies,
            perturbed: [
                FamilyFile::from_family(&result.perturbed[0]),
                FamilyFile::from_family(&result.perturbed[1]),
            ],
        }
    }

    /// Rebuilds the result against `family`. Fails with `UnknownLabel` when
    /// the report refers to a label the family does not carry, or with
    /// `LengthMismatch` when the report does not cover the family.
    pub fn to_result<T: Scalar>(&self, family: &VectorFamily<T>) -> Result<DecompositionResult<T>> {
        let covered = self.parts[0].len() + self.parts[1].len();
        if covered != family.len() {
            return Err(Error::LengthMismatch {
                expected: family.len(),
                found: covered,
            });
        }
        let positions = |ls: &[Label]| family.positions_of(ls);
        let blocks_of =
            |bs: &[Vec<Label>]| bs.iter().map(|b| positions(b)).collect::<Result<Vec<_>>>();
        let mut parts = [positions(&self.parts[0])?, positions(&self.parts[1])?];
        for p in &mut parts {
            p.sort_unstable();
        }
        let start = family
            .position_of(self.start_index)
            .ok_or(Error::UnknownLabel(self.start_index))?;
        let perturbed = [
            self.perturbed_family(0, family.dim())?,
            self.perturbed_family(1, family.dim())?,
        ];
        Ok(DecompositionResult {
            strategy: self.strategy,
            epsilon: self.epsilon,
            start,
            parts,
            perturbed,
            energies: self.energies,
            schedule: BlockSchedule {
                cuts: self.cuts.clone(),
                blocks_s: blocks_of(&self.blocks[0])?,
                blocks_t: blocks_of(&self.blocks[1])?,
                ledger: self.ledger.clone(),
            },
        })
    }

    fn perturbed_family<T: Scalar>(&self, which: usize, dim: usize) -> Result<VectorFamily<T>> {
        let file = &self.perturbed[which];
        if file.vectors.is_empty() {
            return VectorFamily::new(dim, Vec::new());
        }
        file.to_family()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "kebab-case")]
#[allow(clippy::large_enum_variant)]
pub enum ReportFile {
    Spectral(SpectralReport),
    Decomposition(DecompositionReport),
    Certificate(PerturbationCertificate),
}

pub fn parse_report(text: &str) -> Result<ReportFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}
