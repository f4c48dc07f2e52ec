use serde::{Deserialize, Serialize};

use super::DecompositionResult;
use crate::error::{Error, Result};
use crate::frames::CoefficientVector;
use crate::linops::{self, Scalar, Tolerances, VectorFamily};

/// Both sides of the null-combination residual inequality at step `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GkCheck {
    /// `‖g_k‖` with `g_k = Σ_{m≤k} Σ_{i∈T_m} a_i f_i`.
    pub lhs: f64,
    /// `(Σ_{m>k} |a_i|²)^{1/2} (Σ_{m>k} ‖Q_k f_i‖²)^{1/2} + ‖r‖`.
    pub rhs: f64,
    /// `‖r‖` with `r = Σ_{all T} a_i f_i`; zero for a null combination.
    pub residual: f64,
    pub slack_ok: bool,
}

/// Evaluates `‖g_k‖ ≤ ‖a_tail‖·(Σ_{m>k} Σ_{i∈T_m} ‖Q_k f_i‖²)^{1/2} + ‖r‖`
/// for coefficients `a` on the T-part of `result` (aligned with
/// `result.parts[1]`).
///
/// For a null combination (`r = 0`) this is the bound that forces the
/// coefficients on early T-blocks to vanish. It holds for every `a`: writing
/// `g_k = r - h` with `h` the tail combination, `‖g_k‖² = ⟨g_k, r⟩ - ⟨g_k, h⟩`
/// and `⟨g_k, f_i⟩ = ⟨g_k, Q_k f_i⟩`. The comparison allows a slack of
/// `report_tol · (1 + ‖a‖²)`.
pub fn gk_inequality_check<T: Scalar>(
    family: &VectorFamily<T>,
    result: &DecompositionResult<T>,
    a: &CoefficientVector<T>,
    k: usize,
    tol: &Tolerances,
) -> Result<GkCheck> {
    let t_blocks = &result.schedule.blocks_t;
    if k == 0 || k > t_blocks.len() {
        return Err(Error::StepOutOfRange {
            k,
            max: t_blocks.len(),
        });
    }
    let part = &result.parts[1];
    if a.len() != part.len() {
        return Err(Error::LengthMismatch {
            expected: part.len(),
            found: a.len(),
        });
    }
    let coefficient =
        |p: usize| a.entries[part.binary_search(&p).expect("T-block member in part 2")];

    let mut head: Vec<usize> = t_blocks[..k].iter().flatten().copied().collect();
    head.sort_unstable();
    let tail: Vec<usize> = t_blocks[k..].iter().flatten().copied().collect();

    let combine = |positions: &[usize]| {
        let mut v = nalgebra::DVector::<T>::zeros(family.dim());
        for &p in positions {
            v.axpy(coefficient(p), &family.vector(p), T::one());
        }
        v
    };
    let g_k = combine(&head);
    let r = combine(part);

    let q_k = linops::span_projector(family, &head, tol)?;
    let tail_a: f64 = tail
        .iter()
        .map(|&p| coefficient(p).modulus_squared())
        .fold(0.0, |acc, x| acc + x);
    let tail_q: f64 = tail
        .iter()
        .map(|&p| q_k.energy(family.vector(p)))
        .fold(0.0, |acc, x| acc + x);

    let lhs = g_k.norm();
    let residual = r.norm();
    let rhs = tail_a.sqrt() * tail_q.sqrt() + residual;
    Ok(GkCheck {
        lhs,
        rhs,
        residual,
        slack_ok: lhs <= rhs + tol.report_tol * (1.0 + a.norm_squared()),
    })
}
