use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::block_assignment;
use crate::linops::{Label, Scalar, Tolerances, VectorFamily};

/// Witness that no `ε`-perturbation of a consecutive-overlap family has an
/// orthogonal decomposition along the given blocks.
///
/// If `g` were such a perturbation, the crossing pair `i₀, i₀+1` would satisfy
/// `√2(1-√ε) ≤ ‖g_{i₀} - g_{i₀+1}‖ ≤ ‖f_{i₀} - f_{i₀+1}‖ + 2√ε = 1 + 2√ε`;
/// `verdict` is true when the outer inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationCertificate {
    /// Label of `i₀`.
    pub crossing_index: Label,
    pub next_index: Label,
    /// 0-based indices of the blocks holding `i₀` and `i₀ + 1`.
    pub blocks: (usize, usize),
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: bool,
    #[serde(skip)]
    pub position: usize,
}

/// Finds the first position whose successor lies in a different block and
/// evaluates both closed forms at `epsilon`.
pub fn impossibility_certificate<T: Scalar>(
    family: &VectorFamily<T>,
    blocks: &[Vec<usize>],
    epsilon: f64,
    tol: &Tolerances,
) -> Result<PerturbationCertificate> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let owner = block_assignment(blocks, family.len())?;
    let position = owner
        .windows(2)
        .position(|w| w[0] != w[1])
        .ok_or(Error::NoCrossing)?;
    let next = position + 1;

    let not_overlap = |reason: String| Error::NotConsecutiveOverlap {
        position,
        next,
        reason,
    };
    for p in [position, next] {
        let n = family.norm_squared(p);
        if (n - 1.0).abs() > tol.report_tol {
            return Err(not_overlap(format!("squared norm of position {p} is {n}")));
        }
    }
    let gap = (family.vector(position) - family.vector(next)).norm_squared();
    if (gap - 1.0).abs() > tol.report_tol {
        return Err(not_overlap(format!(
            "squared distance is {gap}, expected 1"
        )));
    }

    let root = epsilon.sqrt();
    let lhs = std::f64::consts::SQRT_2 * (1.0 - root);
    let rhs = 1.0 + 2.0 * root;
    Ok(PerturbationCertificate {
        crossing_index: family.labels()[position],
        next_index: family.labels()[next],
        blocks: (owner[position], owner[next]),
        epsilon,
        lhs,
        rhs,
        verdict: lhs > rhs,
        position,
    })
}
