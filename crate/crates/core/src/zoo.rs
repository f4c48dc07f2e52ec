//! Generators for test families.
//!
//! All generators are deterministic functions of their parameters and seed.
//! Random draws use `ChaCha8Rng` seeded from a `u64`.

use nalgebra::{DMatrix, QR};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::CoefficientVector;
use crate::linops::{self, Label, Tolerances, VectorFamily};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    ShiftPair {
        n: usize,
    },
    DyadicReorder {
        n: usize,
    },
    UnionOnb {
        dim: usize,
        copies: usize,
        seed: u64,
    },
    RandomBessel {
        dim: usize,
        n: usize,
        bessel: f64,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<VectorFamily> {
        match *self {
            GeneratorSpec::ShiftPair { n } => gen_shift_pair(n),
            GeneratorSpec::DyadicReorder { n } => gen_dyadic_reorder(n),
            GeneratorSpec::UnionOnb { dim, copies, seed } => gen_union_onb(dim, copies, seed),
            GeneratorSpec::RandomBessel {
                dim,
                n,
                bessel,
                seed,
            } => gen_random_bessel(dim, n, bessel, seed),
        }
    }
}

fn positive(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        Err(Error::InvalidParameter(format!(
            "{name} must be at least 1"
        )))
    } else {
        Ok(())
    }
}

/// `f_i = (e_i + e_{i+1}) / √2` for `i = 1..=n`, in dimension `n + 1`.
pub fn gen_shift_pair(n: usize) -> Result<VectorFamily> {
    positive("n", n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::zeros(n + 1, n);
    for i in 0..n {
        m[(i, i)] = h;
        m[(i + 1, i)] = h;
    }
    VectorFamily::from_synthesis(m)
}

/// New order of the indices `1..=n`: each dyadic block `2^k..2^{k+1}-1`
/// (truncated at `n`) is rotated left by one, so its first index moves to its
/// end.
pub fn dyadic_reorder_permutation(n: usize) -> Result<Vec<usize>> {
    positive("n", n)?;
    let mut order = Vec::with_capacity(n);
    let mut lo = 1usize;
    while lo <= n {
        let hi = (2 * lo - 1).min(n);
        order.extend(lo + 1..=hi);
        order.push(lo);
        lo *= 2;
    }
    Ok(order)
}

/// The shift-pair family listed in dyadic-reordered order; labels are the
/// original indices.
pub fn gen_dyadic_reorder(n: usize) -> Result<VectorFamily> {
    let order = dyadic_reorder_permutation(n)?;
    let base = gen_shift_pair(n)?;
    let positions: Vec<usize> = order.iter().map(|&i| i - 1).collect();
    let synthesis = base.synthesis().select_columns(&positions);
    let labels = order.iter().map(|&i| i as Label).collect();
    VectorFamily::from_synthesis(synthesis)?.with_labels(labels)
}

/// 1-based positions `∪_k {2^{2k}, …, 2^{2k+1} - 1}` up to `n`.
pub fn dyadic_even_levels(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut lo = 1usize;
    while lo <= n {
        out.extend(lo..=(2 * lo - 1).min(n));
        lo *= 4;
    }
    out
}

/// Alternating coefficients `a_{2^{2k}+i} = (-1)^i / 2^k`, `i = 0..2^{2k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingWitness {
    /// 1-based position of the first coefficient, `2^{2k}`.
    pub first: usize,
    pub coefficients: CoefficientVector<f64>,
}

impl AlternatingWitness {
    /// 1-based positions `2^{2k}..=2^{2k+1}-1`.
    pub fn positions(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.first + self.coefficients.len() - 1
    }
}

pub fn alternating_coefficients(k: u32) -> AlternatingWitness {
    let len = 1usize << (2 * k);
    let scale = 1.0 / (1u64 << k) as f64;
    let entries = (0..len)
        .map(|i| if i % 2 == 0 { scale } else { -scale })
        .collect();
    AlternatingWitness {
        first: len,
        coefficients: CoefficientVector::new(entries),
    }
}

fn random_onb(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let qr = QR::new(g);
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `copies` independent uniformly random orthonormal bases of `R^dim`,
/// concatenated. The frame operator is `copies · I`.
pub fn gen_union_onb(dim: usize, copies: usize, seed: u64) -> Result<VectorFamily> {
    positive("dim", dim)?;
    positive("copies", copies)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::zeros(dim, dim * copies);
    for c in 0..copies {
        m.columns_mut(c * dim, dim)
            .copy_from(&random_onb(dim, &mut rng));
    }
    VectorFamily::from_synthesis(m)
}

const BESSEL_SLACK: f64 = 1e-12;
const MAX_TIGHTENING: usize = 500;

/// Unit-norm family of `n` vectors in `R^dim` with upper frame bound at most
/// `bessel` (up to `1e-12`).
///
/// Starts from normalized Gaussian vectors and, while the bound is too large,
/// replaces `F` by `S^{-1/2} F` with columns renormalized. For `n = dim` one
/// such step yields an orthonormal basis. Requires `bessel ≥ max(1, n/dim)`:
/// the frame operator has trace `n` spread over `dim` eigenvalues.
pub fn gen_random_bessel(dim: usize, n: usize, bessel: f64, seed: u64) -> Result<VectorFamily> {
    positive("dim", dim)?;
    positive("n", n)?;
    if !(bessel.is_finite() && bessel >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target Bessel bound must be at least 1, got {bessel}"
        )));
    }
    let floor = n as f64 / dim as f64;
    if bessel + BESSEL_SLACK < floor {
        return Err(Error::Infeasible(format!(
            "target Bessel bound {bessel} is below n/dim = {floor}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = DMatrix::<f64>::from_fn(dim, n, |_, _| StandardNormal.sample(&mut rng));
    normalize_columns(&mut f);
    let tol = Tolerances::default();
    for _ in 0..MAX_TIGHTENING {
        let frame_op = &f * f.transpose();
        let (values, vectors) = linops::hermitian_eigen(&frame_op, &tol)?;
        let top = values[values.len() - 1];
        if top <= bessel + BESSEL_SLACK {
            return VectorFamily::from_synthesis(f);
        }
        let inv_sqrt = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            values.iter().map(|&l| {
                if l > tol.rank_rel_tol * top {
                    1.0 / l.sqrt()
                } else {
                    0.0
                }
            }),
        ));
        f = &vectors * inv_sqrt * vectors.transpose() * f;
        normalize_columns(&mut f);
    }
    Err(Error::NoConvergence(format!(
        "could not reach Bessel bound {bessel} for {n} vectors in dimension {dim}"
    )))
}

fn normalize_columns(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{self, spectral_report};
    use approx::assert_abs_diff_eq;

    #[test]
    fn shift_pair_shapes() {
        let f = gen_shift_pair(1).unwrap();
        assert_eq!((f.dim(), f.len()), (2, 1));
        assert_abs_diff_eq!(f.norm_squared(0), 1.0, epsilon = 1e-15);

        let g = linops::gram(&gen_shift_pair(3).unwrap());
        assert_abs_diff_eq!(g[(0, 1)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g[(1, 2)], 0.5, epsilon = 1e-15);
        assert_eq!(g[(0, 2)], 0.0);

        let r = spectral_report(&gen_shift_pair(64).unwrap(), &Tolerances::default()).unwrap();
        let expected = 1.0 + (std::f64::consts::PI / 65.0).cos();
        assert_abs_diff_eq!(r.bessel_b, expected, epsilon = 1e-12);
        assert!(r.bessel_b < 2.0);
        assert!(gen_shift_pair(0).is_err());
    }

    #[test]
    fn dyadic_permutations() {
        assert_eq!(dyadic_reorder_permutation(1).unwrap(), vec![1]);
        assert_eq!(dyadic_reorder_permutation(3).unwrap(), vec![1, 3, 2]);
        assert_eq!(
            dyadic_reorder_permutation(7).unwrap(),
            vec![1, 3, 2, 5, 6, 7, 4]
        );
        // incomplete last block rotates the same way
        assert_eq!(dyadic_reorder_permutation(5).unwrap(), vec![1, 3, 2, 5, 4]);
        assert!(dyadic_reorder_permutation(0).is_err());
    }

    #[test]
    fn dyadic_levels() {
        assert_eq!(
            dyadic_even_levels(20),
            vec![1, 4, 5, 6, 7, 16, 17, 18, 19, 20]
        );
    }

    #[test]
    fn alternating_levels() {
        let w = alternating_coefficients(0);
        assert_eq!(w.coefficients.entries, vec![1.0]);
        assert_eq!(w.positions(), 1..=1);
        let w = alternating_coefficients(1);
        assert_eq!(w.coefficients.entries, vec![0.5, -0.5, 0.5, -0.5]);
        assert_eq!(w.positions(), 4..=7);
        let w = alternating_coefficients(2);
        assert_eq!(w.coefficients.len(), 16);
        assert_eq!(w.coefficients.norm_squared(), 1.0);
    }

    #[test]
    fn union_of_bases() {
        let tol = Tolerances::default();
        let one = gen_union_onb(5, 1, 3).unwrap();
        let r = spectral_report(&one, &tol).unwrap();
        assert_abs_diff_eq!(r.frame_a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.bessel_b, 1.0, epsilon = 1e-12);

        let two = gen_union_onb(4, 2, 7).unwrap();
        assert_eq!(two.len(), 8);
        let r = spectral_report(&two, &tol).unwrap();
        assert_abs_diff_eq!(r.bessel_b, 2.0, epsilon = 1e-10);
        assert!(r.unit_norm);

        assert_eq!(two, gen_union_onb(4, 2, 7).unwrap());
        assert_ne!(two, gen_union_onb(4, 2, 8).unwrap());
    }

    #[test]
    fn random_bessel_tight_case_is_a_basis() {
        let f = gen_random_bessel(6, 6, 1.0, 42).unwrap();
        let g = linops::gram(&f);
        assert!((g - DMatrix::<f64>::identity(6, 6)).amax() < 1e-12);
    }

    #[test]
    fn random_bessel_infeasible() {
        assert!(matches!(
            gen_random_bessel(4, 32, 2.0, 1),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            gen_random_bessel(4, 2, 0.5, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn random_bessel_meets_target() {
        let tol = Tolerances::default();
        let f = gen_random_bessel(16, 64, 8.0, 2024).unwrap();
        assert!(frames::is_unit_norm(&f, &tol));
        let r = spectral_report(&f, &tol).unwrap();
        assert!(r.bessel_b <= 8.0 + 1e-12);
        assert_eq!(f, gen_random_bessel(16, 64, 8.0, 2024).unwrap());

        // a target close to n/dim needs several tightening steps
        let f = gen_random_bessel(10, 25, 2.6, 9).unwrap();
        assert!(spectral_report(&f, &tol).unwrap().bessel_b <= 2.6 + 1e-12);
        assert!(frames::is_unit_norm(&f, &tol));
    }
}
