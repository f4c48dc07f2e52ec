use nalgebra::DMatrix;

use super::{
    schedule_threshold, BlockSchedule, DecompConfig, DecompositionResult, LedgerEntry, Strategy,
    TailKind,
};
use crate::error::{Error, Result};
use crate::frames;
use crate::linops::{self, Projector, Scalar, VectorFamily};

/// Ordered construction: `S_1 = {1}`, then alternately the smallest cut
/// `n > current` such that the energy of `P` (resp. `Q`) on the vectors past
/// `n` is below `ε/2`, `ε/4`, `ε/8`, ….
pub fn ordered_decompose<T: Scalar>(
    family: &VectorFamily<T>,
    epsilon: f64,
    config: &DecompConfig,
) -> Result<DecompositionResult<T>> {
    build(family, epsilon, config, Strategy::Ordered)
}

/// Order-free construction: `S_1 = {start}`, then each block is the shortest
/// run of remaining vectors, sorted by descending projection energy (ties by
/// position), whose removal leaves a tail below the step threshold.
///
/// A block is never empty: when the remaining tail is already below the
/// threshold, the single highest-energy vector is taken.
pub fn greedy_decompose<T: Scalar>(
    family: &VectorFamily<T>,
    epsilon: f64,
    config: &DecompConfig,
) -> Result<DecompositionResult<T>> {
    build(family, epsilon, config, Strategy::Greedy)
}

/// Ordered construction with every threshold of step `k` multiplied by `δ_k`,
/// the smallest Gram eigenvalue of the prefix `f_1..f_{n_{2k}}` (`f_1..f_{n_1}`
/// for step 0). Requires a linearly independent family.
pub fn riesz_scaled_decompose<T: Scalar>(
    family: &VectorFamily<T>,
    epsilon: f64,
    config: &DecompConfig,
) -> Result<DecompositionResult<T>> {
    build(family, epsilon, config, Strategy::RieszScaled)
}

fn check_preconditions<T: Scalar>(
    family: &VectorFamily<T>,
    epsilon: f64,
    config: &DecompConfig,
    strategy: Strategy,
) -> Result<()> {
    config.tol.validate()?;
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if !config.allow_non_unit {
        if let Some(position) = (0..family.len())
            .find(|&i| (family.norm_squared(i) - 1.0).abs() > config.tol.report_tol)
        {
            return Err(Error::NotUnitNorm {
                position,
                norm_sq: family.norm_squared(position),
            });
        }
    }
    match strategy {
        Strategy::Greedy if config.start >= family.len() => Err(Error::PositionOutOfRange {
            position: config.start,
            len: family.len(),
        }),
        Strategy::RieszScaled => {
            let independence = frames::is_linearly_independent(family, &config.tol);
            if independence.independent {
                Ok(())
            } else {
                Err(Error::LinearlyDependent {
                    margin: independence.margin,
                })
            }
        }
        _ => Ok(()),
    }
}

/// Sum of `energy[p]` over `positions`, accumulated in ascending position
/// order. The verifier uses the same routine so both sides agree bit for bit.
pub(super) fn tail_sum(energy: &[f64], positions: impl Iterator<Item = usize>) -> f64 {
    let mut sorted: Vec<usize> = positions.collect();
    sorted.sort_unstable();
    sorted
        .iter()
        .map(|&p| energy[p])
        .fold(0.0, |acc, x| acc + x)
}

/// Union of the blocks of the same kind as block `last` (S-blocks have even
/// creation index), up to and including it, sorted.
pub(super) fn same_kind_union(blocks: &[&Vec<usize>], last: usize) -> Vec<usize> {
    let mut union: Vec<usize> = blocks[..=last]
        .iter()
        .enumerate()
        .filter(|(b, _)| b % 2 == last % 2)
        .flat_map(|(_, block)| block.iter().copied())
        .collect();
    union.sort_unstable();
    union
}

/// Lower Riesz bound `δ_k` used at induction step `k`.
pub(super) fn riesz_delta<T: Scalar>(
    family: &VectorFamily<T>,
    cuts: &[usize],
    step: usize,
    tol: &linops::Tolerances,
) -> Result<f64> {
    let prefix = if step == 0 {
        cuts[0]
    } else {
        cuts[2 * step - 1]
    };
    let positions: Vec<usize> = (0..prefix).collect();
    linops::gram_min_eigenvalue(family, &positions, tol)
}

fn build<T: Scalar>(
    family: &VectorFamily<T>,
    epsilon: f64,
    config: &DecompConfig,
    strategy: Strategy,
) -> Result<DecompositionResult<T>> {
    check_preconditions(family, epsilon, config, strategy)?;
    let tol = &config.tol;
    let n = family.len();
    let start = match strategy {
        Strategy::Greedy => config.start,
        _ => 0,
    };

    let mut assigned = vec![false; n];
    assigned[start] = true;
    let mut blocks: Vec<Vec<usize>> = vec![vec![start]];
    let mut cuts = vec![1usize];
    let mut projectors: Vec<Projector<T>> = Vec::new();
    let mut ledger = Vec::new();
    let mut energy = vec![0.0; n];

    let mut j = 1usize;
    while *cuts.last().unwrap() < n {
        let refs: Vec<&Vec<usize>> = blocks.iter().collect();
        let union = same_kind_union(&refs, j - 1);
        let projector = linops::span_projector(family, &union, tol)?;
        let remaining: Vec<usize> = (0..n).filter(|&p| !assigned[p]).collect();
        for &p in &remaining {
            energy[p] = projector.energy(family.vector(p));
        }

        let step = j / 2;
        let kind = if j % 2 == 1 { TailKind::P } else { TailKind::Q };
        let delta_k = match strategy {
            Strategy::RieszScaled => Some(riesz_delta(family, &cuts, step, tol)?),
            _ => None,
        };
        let threshold = schedule_threshold(epsilon, j as i32) * delta_k.unwrap_or(1.0);

        let (block, achieved) = match strategy {
            Strategy::Greedy => greedy_block(&remaining, &energy, threshold),
            _ => ordered_block(&remaining, &energy, threshold),
        };
        for &p in &block {
            assigned[p] = true;
        }
        cuts.push(cuts.last().unwrap() + block.len());
        blocks.push(block);
        projectors.push(projector);
        ledger.push(LedgerEntry {
            step,
            kind,
            threshold,
            achieved,
            delta_k,
        });
        j += 1;
    }

    let blocks_s: Vec<Vec<usize>> = blocks.iter().step_by(2).cloned().collect();
    let blocks_t: Vec<Vec<usize>> = blocks.iter().skip(1).step_by(2).cloned().collect();
    let refs: Vec<&Vec<usize>> = blocks.iter().collect();
    let (perturbed_1, energy_1, part_1) = perturb_part(family, &refs, &projectors, 0)?;
    let (perturbed_2, energy_2, part_2) = perturb_part(family, &refs, &projectors, 1)?;

    Ok(DecompositionResult {
        strategy,
        epsilon,
        start,
        parts: [part_1, part_2],
        perturbed: [perturbed_1, perturbed_2],
        energies: [energy_1, energy_2],
        schedule: BlockSchedule {
            cuts,
            blocks_s,
            blocks_t,
            ledger,
        },
    })
}

/// Smallest nonempty leading run of `remaining` whose removal leaves a tail
/// strictly below `threshold`. The full run always qualifies (empty tail).
fn ordered_block(remaining: &[usize], energy: &[f64], threshold: f64) -> (Vec<usize>, f64) {
    for t in 1..=remaining.len() {
        let tail = tail_sum(energy, remaining[t..].iter().copied());
        if tail < threshold {
            return (remaining[..t].to_vec(), tail);
        }
    }
    unreachable!("the empty tail is below any positive threshold")
}

/// Shortest nonempty prefix of `remaining` sorted by descending energy whose
/// complement tail is strictly below `threshold`.
fn greedy_block(remaining: &[usize], energy: &[f64], threshold: f64) -> (Vec<usize>, f64) {
    let mut order = remaining.to_vec();
    order.sort_by(|&a, &b| energy[b].total_cmp(&energy[a]).then(a.cmp(&b)));
    for t in 1..=order.len() {
        let mut taken = order[..t].to_vec();
        taken.sort_unstable();
        let tail = tail_sum(
            energy,
            remaining
                .iter()
                .copied()
                .filter(|p| taken.binary_search(p).is_err()),
        );
        if tail < threshold {
            return (order[..t].to_vec(), tail);
        }
    }
    unreachable!("the empty tail is below any positive threshold")
}

/// Builds `{g_i}` for the S-part (`parity` 0) or T-part (`parity` 1):
/// members of the first block are kept, members of a later block lose their
/// component in the span of the earlier blocks of the same part.
pub(super) fn perturb_part<T: Scalar>(
    family: &VectorFamily<T>,
    blocks: &[&Vec<usize>],
    projectors: &[Projector<T>],
    parity: usize,
) -> Result<(VectorFamily<T>, f64, Vec<usize>)> {
    let mut part: Vec<usize> = blocks
        .iter()
        .enumerate()
        .filter(|(b, _)| b % 2 == parity)
        .flat_map(|(_, block)| block.iter().copied())
        .collect();
    part.sort_unstable();

    let mut synthesis: DMatrix<T> = family.synthesis().select_columns(&part);
    let mut energy = 0.0;
    for (b, block) in blocks.iter().enumerate() {
        if b % 2 != parity || b < 2 {
            continue;
        }
        let previous = &projectors[b - 2];
        for &p in block.iter() {
            let f = family.vector(p).into_owned();
            let removed = previous.apply(&f);
            energy += removed.norm_squared();
            let col = part
                .binary_search(&p)
                .expect("block member belongs to its part");
            synthesis.set_column(col, &(f - removed));
        }
    }
    let labels = part.iter().map(|&p| family.labels()[p]).collect();
    let g = VectorFamily::from_synthesis(synthesis)?.with_labels(labels)?;
    Ok((g, energy, part))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{verify_ledger, DecompConfig};
    use crate::frames::verify_orthogonal_decomposition;
    use crate::linops::Tolerances;
    use crate::zoo;
    use nalgebra::DMatrix;

    fn onb(d: usize) -> VectorFamily {
        VectorFamily::from_synthesis(DMatrix::identity(d, d)).unwrap()
    }

    #[test]
    fn orthonormal_basis_is_unperturbed() {
        let f = onb(6);
        for strategy in [Strategy::Ordered, Strategy::Greedy, Strategy::RieszScaled] {
            let r = super::super::decompose(&f, 0.1, strategy, &DecompConfig::default()).unwrap();
            assert_eq!(r.energies, [0.0, 0.0]);
            assert!(r.schedule.ledger.iter().all(|e| e.achieved == 0.0));
            assert_eq!(
                r.perturbed[0].synthesis(),
                &f.subfamily(&r.parts[0]).unwrap().synthesis().clone()
            );
            // zero tails force singleton blocks
            assert!(r.schedule.blocks_in_order().iter().all(|b| b.len() == 1));
            assert_eq!(r.parts[0], vec![0, 2, 4]);
        }
    }

    #[test]
    fn riesz_scaled_on_basis_matches_ordered() {
        let f = onb(5);
        let cfg = DecompConfig::default();
        let a = ordered_decompose(&f, 0.3, &cfg).unwrap();
        let b = riesz_scaled_decompose(&f, 0.3, &cfg).unwrap();
        assert_eq!(a.schedule.cuts, b.schedule.cuts);
        for (x, y) in a.schedule.ledger.iter().zip(&b.schedule.ledger) {
            assert_eq!(y.delta_k, Some(1.0));
            assert_eq!(x.threshold, y.threshold);
        }
    }

    #[test]
    fn shift_pair_ordered_alternates_singletons() {
        let f = zoo::gen_shift_pair(64).unwrap();
        let r = ordered_decompose(&f, 0.01, &DecompConfig::default()).unwrap();
        assert_eq!(r.schedule.cuts, (1..=64).collect::<Vec<_>>());
        assert!(r.energies[0] < 0.01 && r.energies[1] < 0.01);
        let tol = Tolerances::default();
        for which in 0..2 {
            let c =
                verify_orthogonal_decomposition(&r.perturbed[which], &r.local_blocks(which), &tol)
                    .unwrap();
            assert!(c.ok);
        }
        assert!(verify_ledger(&f, &r, &tol).ok);
    }

    #[test]
    fn thresholds_halve_each_entry() {
        let f = zoo::gen_union_onb(6, 3, 11).unwrap();
        let eps = 0.37;
        let r = ordered_decompose(&f, eps, &DecompConfig::default()).unwrap();
        for (j, e) in r.schedule.ledger.iter().enumerate() {
            assert_eq!(e.threshold, eps / 2f64.powi(j as i32 + 1));
            assert_eq!(e.exponent(), j as i32 + 1);
            assert!(e.achieved < e.threshold);
        }
    }

    #[test]
    fn dyadic_reordering_reproduces_dyadic_part_one() {
        // positions 1, 4..7, 16..31 (1-based) form the S-part
        let f = zoo::gen_dyadic_reorder(63).unwrap();
        let r = ordered_decompose(&f, 0.01, &DecompConfig::default()).unwrap();
        let expected: Vec<usize> = std::iter::once(0).chain(3..7).chain(15..31).collect();
        assert_eq!(r.parts[0], expected);
        assert_eq!(r.schedule.cuts, vec![1, 3, 7, 15, 31, 63]);
    }

    #[test]
    fn greedy_start_and_tie_breaking() {
        let f = onb(4);
        let cfg = DecompConfig {
            start: 2,
            ..Default::default()
        };
        let r = greedy_decompose(&f, 0.5, &cfg).unwrap();
        assert_eq!(r.schedule.blocks_s[0], vec![2]);
        // all energies tie at zero: smallest position wins
        assert_eq!(r.schedule.blocks_t[0], vec![0]);
        assert_eq!(r.start, 2);
        let bad = DecompConfig {
            start: 9,
            ..Default::default()
        };
        assert!(matches!(
            greedy_decompose(&f, 0.5, &bad),
            Err(Error::PositionOutOfRange { .. })
        ));
    }

    #[test]
    fn precondition_errors() {
        let cfg = DecompConfig::default();
        let f = onb(3);
        assert_eq!(
            ordered_decompose(&f, 0.0, &cfg),
            Err(Error::InvalidEpsilon(0.0))
        );
        assert!(ordered_decompose(&f, f64::NAN, &cfg).is_err());
        let empty = VectorFamily::<f64>::new(3, vec![]).unwrap();
        assert_eq!(
            ordered_decompose(&empty, 0.1, &cfg),
            Err(Error::EmptyFamily)
        );

        let long = VectorFamily::new(2, vec![vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            ordered_decompose(&long, 0.1, &cfg),
            Err(Error::NotUnitNorm { position: 0, .. })
        ));
        let lenient = DecompConfig {
            allow_non_unit: true,
            ..Default::default()
        };
        let r = ordered_decompose(&long, 0.1, &lenient).unwrap();
        assert!(verify_ledger(&long, &r, &lenient.tol).ok);

        let dependent = zoo::gen_union_onb(3, 2, 1).unwrap();
        assert!(matches!(
            riesz_scaled_decompose(&dependent, 0.1, &cfg),
            Err(Error::LinearlyDependent { .. })
        ));
    }

    #[test]
    fn single_vector_family() {
        let f = onb(1);
        let r = ordered_decompose(&f, 0.1, &DecompConfig::default()).unwrap();
        assert_eq!(r.parts, [vec![0], vec![]]);
        assert!(r.schedule.ledger.is_empty());
        assert!(verify_ledger(&f, &r, &Tolerances::default()).ok);
    }

    #[test]
    fn riesz_scaled_cuts_dominate_ordered_on_shift_pair() {
        let f = zoo::gen_shift_pair(32).unwrap();
        let cfg = DecompConfig::default();
        let a = ordered_decompose(&f, 0.1, &cfg).unwrap();
        let b = riesz_scaled_decompose(&f, 0.1, &cfg).unwrap();
        for (x, y) in a.schedule.cuts.iter().zip(&b.schedule.cuts) {
            assert!(y >= x);
        }
        for e in &b.schedule.ledger {
            assert!(e.achieved < e.threshold);
            let d = e.delta_k.unwrap();
            assert!(e.threshold <= 0.1 / 2f64.powi(e.exponent()) * d * (1.0 + 1e-15));
        }
    }

    #[test]
    fn riesz_scaled_on_near_dependent_family_terminates() {
        // f_3 is a unit vector within 1e-6 of span{f_1, f_2}
        let h: f64 = 1e-6;
        let s = (1.0 - h * h).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
        let f = VectorFamily::new(
            4,
            vec![
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![s, s, h, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
            ],
        )
        .unwrap();
        let tol = Tolerances::default();
        let margin = frames::omega_independence_margin(&f, &tol);
        assert!(margin > 1e-7 && margin < 1e-5);
        let r = riesz_scaled_decompose(&f, 0.1, &DecompConfig::default()).unwrap();
        assert!(r.schedule.ledger.iter().any(|e| e.delta_k.unwrap() < 1e-11));
        assert!(verify_ledger(&f, &r, &tol).ok);
    }

    #[test]
    fn complex_family_decomposes() {
        use num_complex::Complex64;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let f = VectorFamily::new(
            3,
            vec![
                vec![c(h, 0.0), c(0.0, h), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(h, 0.0), c(0.0, -h)],
                vec![c(0.0, h), c(0.0, 0.0), c(h, 0.0)],
            ],
        )
        .unwrap();
        let tol = Tolerances::default();
        for strategy in [Strategy::Ordered, Strategy::Greedy, Strategy::RieszScaled] {
            let r = super::super::decompose(&f, 0.05, strategy, &DecompConfig::default()).unwrap();
            assert!(r.energies.iter().all(|&e| e < 0.05));
            assert!(verify_ledger(&f, &r, &tol).ok, "{strategy}");
        }
    }
}
