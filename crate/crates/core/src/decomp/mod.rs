//! Two-part blocking decompositions of a unit-norm family.
//!
//! All three constructions grow blocks `S_1, T_1, S_2, T_2, …` alternately.
//! After each block is fixed, the projector onto the span of all blocks of the
//! same kind so far (`P` for S-blocks, `Q` for T-blocks) is formed, and the
//! next block is chosen so that the projection energy left on the still
//! unassigned vectors drops strictly below the step threshold
//! `ε / 2^j` (`j = 1, 2, 3, …`). The S-blocks form part 1 and the T-blocks
//! part 2. Within a part, each vector of a non-initial block is replaced by its
//! component orthogonal to the earlier blocks of that part, which makes the
//! block spans mutually orthogonal at a total squared cost below `ε`.
//!
//! * [`ordered_decompose`]: blocks are consecutive runs; each cut is the
//!   smallest admissible one.
//! * [`greedy_decompose`]: blocks are minimal-cardinality sets of the
//!   remaining vectors, taken by descending projection energy.
//! * [`riesz_scaled_decompose`]: as ordered, with every threshold scaled by the
//!   lower Riesz bound `δ_k` of the prefix built so far. Requires a linearly
//!   independent family.

mod certificate;
mod construct;
mod residual;
mod verify;

use serde::{Deserialize, Serialize};

use crate::linops::{Scalar, Tolerances, VectorFamily};

pub use certificate::{impossibility_certificate, PerturbationCertificate};
pub use construct::{greedy_decompose, ordered_decompose, riesz_scaled_decompose};
pub use residual::{gk_inequality_check, GkCheck};
pub use verify::{verify_ledger, LedgerVerification, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Ordered,
    Greedy,
    RieszScaled,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Ordered => "ordered",
            Strategy::Greedy => "greedy",
            Strategy::RieszScaled => "riesz-scaled",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ordered" => Ok(Strategy::Ordered),
            "greedy" => Ok(Strategy::Greedy),
            "riesz-scaled" => Ok(Strategy::RieszScaled),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// Which projector a ledger entry measured: `P` (span of the S-blocks) or `Q`
/// (span of the T-blocks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailKind {
    #[serde(rename = "P-tail")]
    P,
    #[serde(rename = "Q-tail")]
    Q,
}

impl std::fmt::Display for TailKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // pad so callers can align columns
        f.pad(match self {
            TailKind::P => "P",
            TailKind::Q => "Q",
        })
    }
}

/// One certified tail inequality `achieved < threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    /// Induction step `k`: the first P-tail is step 0, then each step `k ≥ 1`
    /// records a Q-tail followed by a P-tail.
    pub step: usize,
    pub kind: TailKind,
    pub threshold: f64,
    pub achieved: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_k: Option<f64>,
}

impl LedgerEntry {
    /// Position `j ≥ 1` of this entry in the ledger; the unscaled threshold is
    /// `ε / 2^j`.
    pub fn exponent(&self) -> i32 {
        match self.kind {
            TailKind::P => 2 * self.step as i32 + 1,
            TailKind::Q => 2 * self.step as i32,
        }
    }
}

/// Unscaled threshold of ledger entry `j` (1-based).
pub fn schedule_threshold(epsilon: f64, j: i32) -> f64 {
    epsilon / 2f64.powi(j)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSchedule {
    /// `cuts[b]` is the number of vectors assigned once block `b` (in creation
    /// order `S_1, T_1, S_2, …`) is fixed. For the ordered strategies these
    /// are the cut points `n_1 < n_2 < …`.
    pub cuts: Vec<usize>,
    pub blocks_s: Vec<Vec<usize>>,
    pub blocks_t: Vec<Vec<usize>>,
    pub ledger: Vec<LedgerEntry>,
}

impl BlockSchedule {
    /// Blocks in creation order `S_1, T_1, S_2, T_2, …`.
    pub fn blocks_in_order(&self) -> Vec<&Vec<usize>> {
        let mut out = Vec::with_capacity(self.blocks_s.len() + self.blocks_t.len());
        let mut s = self.blocks_s.iter();
        let mut t = self.blocks_t.iter();
        loop {
            match (s.next(), t.next()) {
                (None, None) => break,
                (a, b) => out.extend(a.into_iter().chain(b)),
            }
        }
        out
    }
}

/// Output of a decomposition. Positions refer to the input family.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult<T: Scalar = f64> {
    pub strategy: Strategy,
    pub epsilon: f64,
    /// Position of the first S-block's single member.
    pub start: usize,
    /// `I₁` (union of S-blocks) and `I₂` (union of T-blocks), ascending.
    pub parts: [Vec<usize>; 2],
    /// Perturbed families `{g_i}` over `parts[0]` and `parts[1]`, in the same
    /// ascending order and carrying the input labels.
    pub perturbed: [VectorFamily<T>; 2],
    /// `Σ ‖f_i - g_i‖²` per part.
    pub energies: [f64; 2],
    pub schedule: BlockSchedule,
}

impl<T: Scalar> DecompositionResult<T> {
    /// Blocks of part `which` (0 or 1) as positions inside that part's
    /// perturbed family.
    pub fn local_blocks(&self, which: usize) -> Vec<Vec<usize>> {
        let part = &self.parts[which];
        let blocks = if which == 0 {
            &self.schedule.blocks_s
        } else {
            &self.schedule.blocks_t
        };
        blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|p| part.binary_search(p).unwrap_or(usize::MAX))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecompConfig {
    pub tol: Tolerances,
    /// Skip the unit-norm precondition.
    pub allow_non_unit: bool,
    /// Position forming `S_1` for the greedy strategy.
    pub start: usize,
}

/// Runs the given strategy.
pub fn decompose<T: Scalar>(
    family: &VectorFamily<T>,
    epsilon: f64,
    strategy: Strategy,
    config: &DecompConfig,
) -> crate::Result<DecompositionResult<T>> {
    match strategy {
        Strategy::Ordered => ordered_decompose(family, epsilon, config),
        Strategy::Greedy => greedy_decompose(family, epsilon, config),
        Strategy::RieszScaled => riesz_scaled_decompose(family, epsilon, config),
    }
}
