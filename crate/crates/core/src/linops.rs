//! Dense linear algebra over a finite family of vectors.
//!
//! Everything here is deterministic: the same input bits produce the same
//! output bits on a fixed platform. Range bases come from a singular value
//! decomposition with a relative cutoff, so the numerical rank of a span is
//! scale-free.

use nalgebra::{ComplexField, DMatrix, DVector, DVectorView, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// External index attached to a vector of a family.
pub type Label = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Real,
    Complex,
}

/// Field of coordinates: `f64` or `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {
    const KIND: ScalarKind;

    /// Builds a scalar from its real and imaginary part. Returns `None` for a
    /// real field and a nonzero imaginary part.
    fn from_parts(re: f64, im: f64) -> Option<Self>;

    fn parts(self) -> (f64, f64);

    fn from_real(re: f64) -> Self {
        Self::from_parts(re, 0.0).expect("a real value is always representable")
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Real;

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        (im == 0.0).then_some(re)
    }

    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }
}

impl Scalar for Complex64 {
    const KIND: ScalarKind = ScalarKind::Complex;

    fn from_parts(re: f64, im: f64) -> Option<Self> {
        Some(Complex64::new(re, im))
    }

    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }
}

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Singular values below `rank_rel_tol * sigma_max` count as zero.
    pub rank_rel_tol: f64,
    /// Largest inner product magnitude still treated as orthogonal.
    pub ortho_tol: f64,
    /// Slack used when comparing computed quantities.
    pub report_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel_tol: 1e-10,
            ortho_tol: 1e-9,
            report_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rank_rel_tol) || !positive(self.ortho_tol) || !positive(self.report_tol) {
            return Err(Error::InvalidTolerances(format!(
                "all tolerances must be strictly positive, got {self:?}"
            )));
        }
        if self.rank_rel_tol >= 1.0 {
            return Err(Error::InvalidTolerances(format!(
                "rank_rel_tol must be < 1, got {}",
                self.rank_rel_tol
            )));
        }
        Ok(())
    }
}

/// An ordered finite family `{f_i}` of vectors in `dim`-dimensional space.
///
/// Vectors are stored as the columns of the `dim x N` synthesis matrix.
/// Positions are 0-based; labels are the external indices (1..=N unless
/// supplied).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily<T: Scalar = f64> {
    synthesis: DMatrix<T>,
    labels: Vec<Label>,
}

impl<T: Scalar> VectorFamily<T> {
    /// Builds a family from coordinate vectors, checking that every vector has
    /// `dim` finite coordinates.
    pub fn new(dim: usize, vectors: Vec<Vec<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (position, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if !v.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite { position });
            }
        }
        let n = vectors.len();
        let synthesis = DMatrix::from_fn(dim, n, |r, c| vectors[c][r]);
        Ok(Self {
            synthesis,
            labels: default_labels(n),
        })
    }

    /// Wraps a synthesis matrix whose columns are the family vectors.
    pub fn from_synthesis(synthesis: DMatrix<T>) -> Result<Self> {
        if synthesis.nrows() == 0 {
            return Err(Error::ZeroDimension);
        }
        for (position, col) in synthesis.column_iter().enumerate() {
            if !col.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite { position });
            }
        }
        let labels = default_labels(synthesis.ncols());
        Ok(Self { synthesis, labels })
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: labels.len(),
            });
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLabel(w[0]));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.synthesis.nrows()
    }

    pub fn len(&self) -> usize {
        self.synthesis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn synthesis(&self) -> &DMatrix<T> {
        &self.synthesis
    }

    pub fn vector(&self, position: usize) -> DVectorView<'_, T> {
        self.synthesis.column(position)
    }

    pub fn position_of(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Maps labels to positions, failing on the first unknown label.
    pub fn positions_of(&self, labels: &[Label]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|&l| self.position_of(l).ok_or(Error::UnknownLabel(l)))
            .collect()
    }

    /// The sub-family at the given positions, keeping labels.
    pub fn subfamily(&self, positions: &[usize]) -> Result<Self> {
        self.check_positions(positions)?;
        let synthesis = self.synthesis.select_columns(positions);
        let labels = positions.iter().map(|&p| self.labels[p]).collect();
        Ok(Self { synthesis, labels })
    }

    pub fn norm_squared(&self, position: usize) -> f64 {
        self.synthesis.column(position).norm_squared()
    }

    pub(crate) fn check_positions(&self, positions: &[usize]) -> Result<()> {
        match positions.iter().find(|&&p| p >= self.len()) {
            Some(&position) => Err(Error::PositionOutOfRange {
                position,
                len: self.len(),
            }),
            None => Ok(()),
        }
    }
}

fn default_labels(n: usize) -> Vec<Label> {
    (1..=n as Label).collect()
}

/// Orthogonal projector stored through an orthonormal basis of its range.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector<T: Scalar = f64> {
    basis: DMatrix<T>,
    source: Vec<usize>,
}

impl<T: Scalar> Projector<T> {
    /// Projector with the given orthonormal columns as range basis.
    pub fn from_orthonormal_basis(basis: DMatrix<T>, source: Vec<usize>) -> Self {
        Self { basis, source }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            basis: DMatrix::zeros(dim, 0),
            source: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    /// Positions of the family members whose span this projects onto.
    pub fn source(&self) -> &[usize] {
        &self.source
    }

    pub fn apply(&self, v: &DVector<T>) -> DVector<T> {
        &self.basis * (self.basis.ad_mul(v))
    }

    /// `‖P v‖²`, computed as the squared norm of the basis coefficients.
    pub fn energy(&self, v: DVectorView<'_, T>) -> f64 {
        self.basis.ad_mul(&v).norm_squared()
    }

    /// Dense `dim x dim` matrix of the projector.
    pub fn matrix(&self) -> DMatrix<T> {
        &self.basis * self.basis.adjoint()
    }
}

/// Gram matrix of the family: entry `(i, j)` is `f_iᴴ f_j`.
pub fn gram<T: Scalar>(family: &VectorFamily<T>) -> DMatrix<T> {
    family.synthesis.ad_mul(&family.synthesis)
}

/// Projector onto the span of the vectors at `positions`.
///
/// The range basis is the set of left singular vectors of the selected
/// synthesis block whose singular values exceed `rank_rel_tol * sigma_max`.
pub fn span_projector<T: Scalar>(
    family: &VectorFamily<T>,
    positions: &[usize],
    tol: &Tolerances,
) -> Result<Projector<T>> {
    family.check_positions(positions)?;
    let block = family.synthesis.select_columns(positions);
    let basis = range_basis(block, tol.rank_rel_tol);
    Ok(Projector {
        basis,
        source: positions.to_vec(),
    })
}

/// Projector onto the span of the vectors carrying `labels`.
pub fn orthonormal_range<T: Scalar>(
    family: &VectorFamily<T>,
    labels: &[Label],
    tol: &Tolerances,
) -> Result<Projector<T>> {
    let positions = family.positions_of(labels)?;
    span_projector(family, &positions, tol)
}

pub(crate) fn range_basis<T: Scalar>(block: DMatrix<T>, rank_rel_tol: f64) -> DMatrix<T> {
    let dim = block.nrows();
    if block.ncols() == 0 {
        return DMatrix::zeros(dim, 0);
    }
    let svd = SVD::new(block, true, false);
    let sigma = &svd.singular_values;
    let top = sigma[0];
    let rank = if top > 0.0 {
        sigma
            .iter()
            .take_while(|&&s| s > rank_rel_tol * top)
            .count()
    } else {
        0
    };
    let u = svd.u.expect("left singular vectors were requested");
    u.columns(0, rank).into_owned()
}

/// Per-vector projection energies `‖P f_i‖²` for positions `from..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    pub from: usize,
    pub values: Vec<f64>,
    pub total: f64,
}

pub fn project_energy<T: Scalar>(
    projector: &Projector<T>,
    family: &VectorFamily<T>,
    from: usize,
) -> Result<EnergyProfile> {
    if projector.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            found: projector.dim(),
        });
    }
    let values: Vec<f64> = (from.min(family.len())..family.len())
        .map(|i| projector.energy(family.vector(i)))
        .collect();
    let total = values.iter().fold(0.0, |acc, x| acc + x);
    Ok(EnergyProfile {
        from,
        values,
        total,
    })
}

/// Eigenvalues of a Hermitian matrix, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub min: f64,
    pub max: f64,
    pub values: Vec<f64>,
}

/// Largest `|M_ij - conj(M_ji)|`.
pub fn hermitian_deviation<T: Scalar>(m: &DMatrix<T>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conjugate()).modulus());
        }
    }
    worst
}

pub fn symmetric_spectrum<T: Scalar>(m: &DMatrix<T>, tol: &Tolerances) -> Result<Spectrum> {
    let (eigen, _) = hermitian_eigen(m, tol)?;
    let values = eigen;
    Ok(Spectrum {
        min: values[0],
        max: values[values.len() - 1],
        values,
    })
}

/// Ascending eigenvalues and matching eigenvector columns.
pub fn hermitian_eigen<T: Scalar>(
    m: &DMatrix<T>,
    tol: &Tolerances,
) -> Result<(Vec<f64>, DMatrix<T>)> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::EmptyFamily);
    }
    let deviation = hermitian_deviation(m);
    let scale = m.iter().map(|x| x.modulus()).fold(1.0f64, f64::max);
    if deviation > tol.report_tol * scale {
        return Err(Error::NotHermitian { deviation });
    }
    let eigen = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let values = order.iter().map(|&i| eigen.eigenvalues[i]).collect();
    let vectors = eigen.eigenvectors.select_columns(&order);
    Ok((values, vectors))
}

/// Smallest eigenvalue of the Gram matrix of the given sub-family, without a
/// rank cutoff. This is the lower Riesz bound of a finite family.
pub(crate) fn gram_min_eigenvalue<T: Scalar>(
    family: &VectorFamily<T>,
    positions: &[usize],
    tol: &Tolerances,
) -> Result<f64> {
    let sub = family.subfamily(positions)?;
    Ok(symmetric_spectrum(&gram(&sub), tol)?.min)
}
