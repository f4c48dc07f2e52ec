//! Frame, Bessel and Riesz bounds of a finite family, and the predicates built
//! on them.
//!
//! A finite family is always a frame for its own span, so instead of a boolean
//! "frame sequence" predicate the report carries the bounds themselves.
//! Likewise, for a finite family the only square-summable null combination is
//! the zero one exactly when the family is linearly independent; the smallest
//! singular value of the synthesis map is exposed as a quantitative margin for
//! that property.

use nalgebra::{DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{self, Scalar, Tolerances, VectorFamily};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Upper frame bound, `λ_max` of the Gram matrix.
    #[serde(rename = "bessel_B")]
    pub bessel_b: f64,
    /// Lower frame bound on the span: smallest Gram eigenvalue above the rank
    /// cutoff.
    #[serde(rename = "frame_A")]
    pub frame_a: f64,
    /// `λ_min` of the Gram matrix; 0 for a dependent family.
    pub riesz_lower: f64,
    pub riesz_upper: f64,
    /// Smallest singular value of the synthesis map `C^N -> C^d`; 0 when
    /// `N > d`.
    pub sigma_min_synthesis: f64,
    pub unit_norm: bool,
    pub rank: usize,
}

impl SpectralReport {
    /// `bessel_B / frame_A`, infinite for a zero family.
    pub fn condition(&self) -> f64 {
        self.bessel_b / self.frame_a
    }
}

/// Coefficients `{c_i}` aligned with the positions of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector<T: Scalar = f64> {
    pub entries: Vec<T>,
}

impl<T: Scalar> CoefficientVector<T> {
    pub fn new(entries: Vec<T>) -> Self {
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_squared(&self) -> f64 {
        self.entries
            .iter()
            .map(|c| c.modulus_squared())
            .fold(0.0, |acc, x| acc + x)
    }

    /// `Σ c_i f_i`.
    pub fn synthesize(&self, family: &VectorFamily<T>) -> Result<DVector<T>> {
        if self.len() != family.len() {
            return Err(Error::LengthMismatch {
                expected: family.len(),
                found: self.len(),
            });
        }
        Ok(family.synthesis() * DVector::from_column_slice(&self.entries))
    }
}

/// Singular values of the synthesis matrix, descending, and the numerical rank.
fn synthesis_singular_values<T: Scalar>(
    family: &VectorFamily<T>,
    tol: &Tolerances,
) -> (Vec<f64>, usize) {
    if family.is_empty() {
        return (Vec::new(), 0);
    }
    let svd = SVD::new(family.synthesis().clone(), false, false);
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let rank = if sigma[0] > 0.0 {
        sigma
            .iter()
            .take_while(|&&s| s > tol.rank_rel_tol * sigma[0])
            .count()
    } else {
        0
    };
    (sigma, rank)
}

fn sigma_min_of(family_len: usize, sigma: &[f64]) -> f64 {
    if family_len > sigma.len() {
        0.0
    } else {
        sigma.last().copied().unwrap_or(0.0)
    }
}

pub fn is_unit_norm<T: Scalar>(family: &VectorFamily<T>, tol: &Tolerances) -> bool {
    (0..family.len()).all(|i| (family.norm_squared(i) - 1.0).abs() <= tol.report_tol)
}

pub fn spectral_report<T: Scalar>(
    family: &VectorFamily<T>,
    tol: &Tolerances,
) -> Result<SpectralReport> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let spectrum = linops::symmetric_spectrum(&linops::gram(family), tol)?;
    let (sigma, rank) = synthesis_singular_values(family, tol);
    let frame_a = if rank == 0 {
        0.0
    } else {
        sigma[rank - 1].powi(2)
    };
    let riesz_lower = if rank == family.len() {
        spectrum.min.max(0.0)
    } else {
        0.0
    };
    Ok(SpectralReport {
        bessel_b: spectrum.max,
        frame_a,
        riesz_lower,
        riesz_upper: spectrum.max,
        sigma_min_synthesis: sigma_min_of(family.len(), &sigma),
        unit_norm: is_unit_norm(family, tol),
        rank,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Independence {
    pub independent: bool,
    /// Smallest singular value of the synthesis map.
    pub margin: f64,
}

pub fn is_linearly_independent<T: Scalar>(
    family: &VectorFamily<T>,
    tol: &Tolerances,
) -> Independence {
    let (sigma, rank) = synthesis_singular_values(family, tol);
    Independence {
        independent: rank == family.len(),
        margin: sigma_min_of(family.len(), &sigma),
    }
}

/// Quantitative ω-independence margin of a finite family: the smallest
/// singular value of its synthesis map. A margin above the rank cutoff
/// certifies that `Σ c_i f_i = 0` forces `c = 0`.
pub fn omega_independence_margin<T: Scalar>(family: &VectorFamily<T>, tol: &Tolerances) -> f64 {
    is_linearly_independent(family, tol).margin
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationDistance {
    /// `Σ ‖f_i - g_i‖²`.
    pub energy: f64,
    /// Every `g_i` lies in `span{f_i}` up to `ortho_tol`.
    pub span_ok: bool,
    pub max_span_residual: f64,
}

pub fn perturbation_distance<T: Scalar>(
    f: &VectorFamily<T>,
    g: &VectorFamily<T>,
    tol: &Tolerances,
) -> Result<PerturbationDistance> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    let energy = (0..f.len())
        .map(|i| (f.vector(i) - g.vector(i)).norm_squared())
        .fold(0.0, |acc, x| acc + x);
    let all: Vec<usize> = (0..f.len()).collect();
    let max_span_residual = span_residual(f, &all, g, &all, tol)?;
    Ok(PerturbationDistance {
        energy,
        span_ok: max_span_residual <= tol.ortho_tol,
        max_span_residual,
    })
}

/// Largest `‖h - P h‖` over `h ∈ {members at probe_positions of probe}`, where
/// `P` projects onto the span of `base` at `base_positions`.
pub(crate) fn span_residual<T: Scalar>(
    base: &VectorFamily<T>,
    base_positions: &[usize],
    probe: &VectorFamily<T>,
    probe_positions: &[usize],
    tol: &Tolerances,
) -> Result<f64> {
    let p = linops::span_projector(base, base_positions, tol)?;
    Ok(probe_positions
        .iter()
        .map(|&i| {
            let h = probe.vector(i).into_owned();
            (&h - p.apply(&h)).norm()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityCheck {
    pub ok: bool,
    pub max_cross_coherence: f64,
    /// Block indices attaining `max_cross_coherence`, if any pair exists.
    pub worst_pair: Option<(usize, usize)>,
}

/// Checks that `blocks` partitions `0..n` into nonempty sets; returns the
/// block index of every position.
pub(crate) fn block_assignment(blocks: &[Vec<usize>], n: usize) -> Result<Vec<usize>> {
    let mut owner = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::NotAPartition(format!("block {b} is empty")));
        }
        for &p in block {
            if p >= n {
                return Err(Error::NotAPartition(format!(
                    "position {p} out of range for {n} vectors"
                )));
            }
            if owner[p] != usize::MAX {
                return Err(Error::NotAPartition(format!("position {p} appears twice")));
            }
            owner[p] = b;
        }
    }
    if let Some(p) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::NotAPartition(format!("position {p} is not covered")));
    }
    Ok(owner)
}

/// Verifies that the spans of the blocks are mutually orthogonal: every cross
/// inner product between members of distinct blocks is at most `ortho_tol`.
pub fn verify_orthogonal_decomposition<T: Scalar>(
    g: &VectorFamily<T>,
    blocks: &[Vec<usize>],
    tol: &Tolerances,
) -> Result<OrthogonalityCheck> {
    let owner = block_assignment(blocks, g.len())?;
    let gram = linops::gram(g);
    let mut max = 0.0f64;
    let mut worst_pair = None;
    for i in 0..g.len() {
        for j in (i + 1)..g.len() {
            if owner[i] == owner[j] {
                continue;
            }
            let c = gram[(i, j)].modulus();
            if worst_pair.is_none() || c > max {
                max = c;
                let (a, b) = (owner[i].min(owner[j]), owner[i].max(owner[j]));
                worst_pair = Some((a, b));
            }
        }
    }
    Ok(OrthogonalityCheck {
        ok: max <= tol.ortho_tol,
        max_cross_coherence: max,
        worst_pair,
    })
}
