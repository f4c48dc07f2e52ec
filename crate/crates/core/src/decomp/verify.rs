use serde::{Deserialize, Serialize};

use super::construct::{perturb_part, riesz_delta, same_kind_union, tail_sum};
use super::{schedule_threshold, DecompositionResult, Strategy, TailKind};
use crate::frames::{self, block_assignment};
use crate::linops::{self, Label, Scalar, Tolerances, VectorFamily};

/// First failed check found by [`verify_ledger`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Violation {
    Structure {
        detail: String,
    },
    /// Recorded threshold differs from `ε / 2^j` (times `δ_k`).
    ThresholdSchedule {
        entry: usize,
        step: usize,
        kind: TailKind,
        recorded: f64,
        expected: f64,
    },
    /// Recomputed tail is not strictly below the recorded threshold.
    TailInequality {
        entry: usize,
        step: usize,
        kind: TailKind,
        threshold: f64,
        achieved: f64,
    },
    AchievedMismatch {
        entry: usize,
        recorded: f64,
        recomputed: f64,
    },
    BlockOrthogonality {
        part: usize,
        blocks: (usize, usize),
        coherence: f64,
    },
    Span {
        part: usize,
        residual: f64,
    },
    Energy {
        part: usize,
        recorded: f64,
        recomputed: f64,
        epsilon: f64,
    },
    PerturbedVector {
        part: usize,
        label: Label,
        deviation: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerVerification {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

impl LedgerVerification {
    fn fail(v: Violation) -> Self {
        Self {
            ok: false,
            violation: Some(v),
        }
    }
}

fn structure(detail: impl Into<String>) -> Violation {
    Violation::Structure {
        detail: detail.into(),
    }
}

/// Re-derives every claim of a decomposition from `family` alone: the block
/// partition, each ledger inequality with freshly built projectors, the
/// threshold schedule, block orthogonality and span preservation of both
/// perturbed parts, the energies, and the perturbed vectors themselves.
pub fn verify_ledger<T: Scalar>(
    family: &VectorFamily<T>,
    result: &DecompositionResult<T>,
    tol: &Tolerances,
) -> LedgerVerification {
    match run_checks(family, result, tol) {
        Ok(()) => LedgerVerification {
            ok: true,
            violation: None,
        },
        Err(v) => LedgerVerification::fail(v),
    }
}

fn run_checks<T: Scalar>(
    family: &VectorFamily<T>,
    result: &DecompositionResult<T>,
    tol: &Tolerances,
) -> Result<(), Violation> {
    let n = family.len();
    let schedule = &result.schedule;
    let blocks = schedule.blocks_in_order();
    if schedule.blocks_s.len() < schedule.blocks_t.len()
        || schedule.blocks_s.len() > schedule.blocks_t.len() + 1
    {
        return Err(structure("S- and T-blocks do not alternate"));
    }
    let owned: Vec<Vec<usize>> = blocks.iter().map(|b| (*b).clone()).collect();
    block_assignment(&owned, n).map_err(|e| structure(e.to_string()))?;
    if blocks[0].len() != 1 {
        return Err(structure("the first S-block must be a single index"));
    }
    if schedule.ledger.len() + 1 != blocks.len() {
        return Err(structure("ledger length does not match the block count"));
    }
    let mut count = 0;
    for (b, block) in blocks.iter().enumerate() {
        count += block.len();
        if schedule.cuts.get(b) != Some(&count) {
            return Err(structure(format!("cut {b} does not match block sizes")));
        }
    }
    if schedule.cuts.len() != blocks.len() {
        return Err(structure("cut count does not match the block count"));
    }
    if result.strategy != Strategy::Greedy {
        let mut next = 0;
        for block in &blocks {
            if block.iter().enumerate().any(|(k, &p)| p != next + k) {
                return Err(structure("ordered blocks must be consecutive runs"));
            }
            next += block.len();
        }
    }
    for which in 0..2 {
        let list = if which == 0 {
            &schedule.blocks_s
        } else {
            &schedule.blocks_t
        };
        let mut union: Vec<usize> = list.iter().flatten().copied().collect();
        union.sort_unstable();
        if union != result.parts[which] {
            return Err(structure(format!(
                "part {} does not match its blocks",
                which + 1
            )));
        }
        let g = &result.perturbed[which];
        if g.len() != union.len() || (!g.is_empty() && g.dim() != family.dim()) {
            return Err(structure(format!(
                "perturbed part {} has the wrong shape",
                which + 1
            )));
        }
    }
    if !(result.epsilon.is_finite() && result.epsilon > 0.0) {
        return Err(structure("epsilon must be positive"));
    }

    // ledger
    let mut energy = vec![0.0; n];
    let mut assigned = vec![false; n];
    for &p in blocks[0] {
        assigned[p] = true;
    }
    let mut projectors = Vec::with_capacity(schedule.ledger.len());
    for (idx, entry) in schedule.ledger.iter().enumerate() {
        let j = idx + 1;
        let kind = if j % 2 == 1 { TailKind::P } else { TailKind::Q };
        if entry.step != j / 2 || entry.kind != kind {
            return Err(structure(format!(
                "ledger entry {idx} has the wrong step label"
            )));
        }
        let union = same_kind_union(&blocks, j - 1);
        let projector =
            linops::span_projector(family, &union, tol).map_err(|e| structure(e.to_string()))?;
        for p in (0..n).filter(|&p| !assigned[p]) {
            energy[p] = projector.energy(family.vector(p));
        }
        for &p in blocks[j] {
            assigned[p] = true;
        }
        let tail = tail_sum(&energy, (0..n).filter(|&p| !assigned[p]));

        let delta = match result.strategy {
            Strategy::RieszScaled => {
                let d = riesz_delta(family, &schedule.cuts, entry.step, tol)
                    .map_err(|e| structure(e.to_string()))?;
                Some(d)
            }
            _ => None,
        };
        let expected = schedule_threshold(result.epsilon, j as i32) * delta.unwrap_or(1.0);
        let delta_ok = match (delta, entry.delta_k) {
            (None, None) => true,
            (Some(d), Some(r)) => (d - r).abs() <= 1e-12 * d.abs().max(f64::MIN_POSITIVE),
            _ => false,
        };
        if !delta_ok || (entry.threshold - expected).abs() > 1e-12 * expected {
            return Err(Violation::ThresholdSchedule {
                entry: idx,
                step: entry.step,
                kind: entry.kind,
                recorded: entry.threshold,
                expected,
            });
        }
        if tail >= entry.threshold || tail.is_nan() {
            return Err(Violation::TailInequality {
                entry: idx,
                step: entry.step,
                kind: entry.kind,
                threshold: entry.threshold,
                achieved: tail,
            });
        }
        if (tail - entry.achieved).abs() > tol.report_tol {
            return Err(Violation::AchievedMismatch {
                entry: idx,
                recorded: entry.achieved,
                recomputed: tail,
            });
        }
        projectors.push(projector);
    }

    // perturbed parts
    for which in 0..2 {
        let part = &result.parts[which];
        if part.is_empty() {
            continue;
        }
        let g = &result.perturbed[which];
        let f = family
            .subfamily(part)
            .map_err(|e| structure(e.to_string()))?;
        if g.labels() != f.labels() {
            return Err(structure(format!(
                "perturbed part {} carries the wrong labels",
                which + 1
            )));
        }
        let check = frames::verify_orthogonal_decomposition(g, &result.local_blocks(which), tol)
            .map_err(|e| structure(e.to_string()))?;
        if !check.ok {
            return Err(Violation::BlockOrthogonality {
                part: which + 1,
                blocks: check.worst_pair.unwrap_or_default(),
                coherence: check.max_cross_coherence,
            });
        }
        let all: Vec<usize> = (0..part.len()).collect();
        let forward =
            frames::span_residual(&f, &all, g, &all, tol).map_err(|e| structure(e.to_string()))?;
        let backward =
            frames::span_residual(g, &all, &f, &all, tol).map_err(|e| structure(e.to_string()))?;
        let residual = forward.max(backward);
        if residual > tol.ortho_tol {
            return Err(Violation::Span {
                part: which + 1,
                residual,
            });
        }
        let recomputed: f64 = (0..part.len())
            .map(|i| (f.vector(i) - g.vector(i)).norm_squared())
            .fold(0.0, |acc, x| acc + x);
        let recorded = result.energies[which];
        if recomputed >= result.epsilon
            || recomputed.is_nan()
            || (recomputed - recorded).abs() > tol.report_tol * (1.0 + recorded)
        {
            return Err(Violation::Energy {
                part: which + 1,
                recorded,
                recomputed,
                epsilon: result.epsilon,
            });
        }
        let (expected, _, _) = perturb_part(family, &blocks, &projectors, which)
            .map_err(|e| structure(e.to_string()))?;
        for i in 0..part.len() {
            let deviation = (expected.vector(i) - g.vector(i)).norm();
            if deviation > tol.ortho_tol {
                return Err(Violation::PerturbedVector {
                    part: which + 1,
                    label: g.labels()[i],
                    deviation,
                });
            }
        }
    }
    Ok(())
}
