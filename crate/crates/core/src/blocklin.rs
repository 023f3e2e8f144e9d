//! Hermitian block linear algebra.
//!
//! Every spectral routine works on the Hermitian part `(M + M*)/2` of its input after
//! checking that the asymmetry is within tolerance. Eigenvalues are always returned in
//! ascending order.

use std::ops::Range;

use nalgebra::DMatrix;

use crate::{CMatrix, Error, Result, C64};

/// Relative asymmetry tolerance accepted by [`PartitionedMatrix::new`] and [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default relative tolerance for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-10;
/// Largest condition number accepted when inverting a block.
pub const CONDITION_CAP: f64 = 1e12;

/// Largest absolute entry.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Operator (spectral) norm.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// `max |m_ij - conj(m_ji)|`.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(M + M*)/2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Checks squareness and Hermitian symmetry relative to the max-norm, returning the
/// symmetrized matrix.
pub fn hermitian_part(m: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let tolerance = rel_tol * max_norm(m).max(f64::MIN_POSITIVE);
    let asymmetry = hermitian_asymmetry(m);
    if asymmetry > tolerance {
        return Err(Error::NotHermitian {
            asymmetry,
            tolerance,
        });
    }
    Ok(symmetrize(m))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Block-diagonal matrix with the given square blocks.
pub fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(*b);
        at += b.nrows();
    }
    out
}

/// Lifts a real matrix to complex entries.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// A Hermitian matrix together with a block partition of its index set.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedMatrix {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    entries: CMatrix,
}

impl PartitionedMatrix {
    /// Validates a partition and Hermitian symmetry (relative tolerance [`HERMITIAN_TOL`]).
    pub fn new(dims: Vec<usize>, entries: CMatrix) -> Result<Self> {
        Self::with_tolerance(dims, entries, HERMITIAN_TOL)
    }

    pub fn with_tolerance(dims: Vec<usize>, entries: CMatrix, rel_tol: f64) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::PartitionMismatch(format!(
                "block sizes must be positive, got {dims:?}"
            )));
        }
        let side: usize = dims.iter().sum();
        if entries.nrows() != side || entries.ncols() != side {
            return Err(Error::DimensionMismatch {
                expected: side,
                found: entries.nrows(),
            });
        }
        let entries = hermitian_part(&entries, rel_tol)?;
        let offsets = dims
            .iter()
            .scan(0, |acc, d| {
                let at = *acc;
                *acc += d;
                Some(at)
            })
            .collect();
        Ok(Self {
            dims,
            offsets,
            entries,
        })
    }

    /// A single-block partition.
    pub fn single(entries: CMatrix) -> Result<Self> {
        let n = entries.nrows();
        Self::new(vec![n.max(1)], entries)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn side(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    /// Index range of block `i`.
    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.dims[i]
    }

    /// The `d_i × d_j` block at the partition offsets.
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        self.entries
            .view((self.offsets[i], self.offsets[j]), (self.dims[i], self.dims[j]))
            .into_owned()
    }

    /// Principal submatrix on the selected blocks, which must be strictly increasing.
    pub fn principal(&self, blocks: &[usize]) -> Result<PartitionedMatrix> {
        if blocks.is_empty() {
            return Err(Error::EmptySelection);
        }
        if blocks.windows(2).any(|w| w[0] >= w[1]) || *blocks.last().unwrap() >= self.dims.len()
        {
            return Err(Error::PartitionMismatch(format!(
                "invalid block selection {blocks:?} for {} blocks",
                self.dims.len()
            )));
        }
        let idx: Vec<usize> = blocks.iter().flat_map(|&b| self.range(b)).collect();
        let sub = CMatrix::from_fn(idx.len(), idx.len(), |r, c| self.entries[(idx[r], idx[c])]);
        let dims = blocks.iter().map(|&b| self.dims[b]).collect();
        Self::new(dims, sub)
    }

    /// Same entries under a different partition of the same side.
    pub fn repartition(&self, dims: Vec<usize>) -> Result<PartitionedMatrix> {
        Self::new(dims, self.entries.clone())
    }

    pub fn eig(&self) -> EigenDecomposition {
        decompose(&self.entries)
    }
}

/// Spectral decomposition `M = V diag(λ) V*` with ascending eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(λ)) V*` without a domain check.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fx = f(lambda);
            scaled.column_mut(j).apply(|z| *z *= fx);
        }
        scaled * v.adjoint()
    }

    /// `V diag(f(λ)) V*` after checking every eigenvalue against `domain`.
    pub fn function(&self, domain: Domain, f: impl Fn(f64) -> C64) -> Result<CMatrix> {
        if let Some(&bad) = self.eigenvalues.iter().find(|&&x| !domain.contains(x)) {
            return Err(Error::DomainError { eigenvalue: bad });
        }
        Ok(self.map(f))
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| C64::new(x, 0.0))
    }
}

fn decompose(m: &CMatrix) -> EigenDecomposition {
    let n = m.nrows();
    if n == 0 {
        return EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(m: &CMatrix) -> Result<EigenDecomposition> {
    let h = hermitian_part(m, HERMITIAN_TOL)?;
    Ok(decompose(&h))
}

/// Where a scalar function is defined on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Real,
    NonNegative,
    Positive,
}

impl Domain {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Domain::Real => x.is_finite(),
            Domain::NonNegative => x >= 0.0,
            Domain::Positive => x > 0.0,
        }
    }
}

/// `f(M)` for a real function `f`; the result is Hermitian.
pub fn matrix_function(m: &CMatrix, domain: Domain, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let eig = eig_hermitian(m)?;
    let out = eig.function(domain, |x| C64::new(f(x), 0.0))?;
    Ok(symmetrize(&out))
}

/// `f(M)` for a complex-valued function such as `x ↦ x^{it}`; the result is normal.
pub fn matrix_function_complex(
    m: &CMatrix,
    domain: Domain,
    f: impl Fn(f64) -> C64,
) -> Result<CMatrix> {
    eig_hermitian(m)?.function(domain, f)
}

/// Inverse of a square matrix, refusing condition numbers above [`CONDITION_CAP`].
pub fn inverse_checked(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.is_empty() {
        return Ok(m.clone());
    }
    let sv = m.clone().singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition.is_nan() || condition > CONDITION_CAP {
        return Err(Error::SingularBlock {
            smallest_singular_value: smin,
            condition,
        });
    }
    m.clone().try_inverse().ok_or(Error::SingularBlock {
        smallest_singular_value: smin,
        condition,
    })
}

fn two_way(m: &PartitionedMatrix) -> Result<()> {
    if m.num_blocks() != 2 {
        return Err(Error::PartitionMismatch(format!(
            "expected a 2-way partition, got {:?}",
            m.dims()
        )));
    }
    Ok(())
}

/// Schur complement in a 2-way partition `M = [[P, Q], [R, S]]`.
///
/// `against = 1` eliminates `S` and returns `M/S = P − Q S⁻¹ R`; `against = 0` eliminates
/// `P` and returns `M/P = S − R P⁻¹ Q`.
pub fn schur_complement(m: &PartitionedMatrix, against: usize) -> Result<CMatrix> {
    two_way(m)?;
    let (keep, drop) = match against {
        1 => (0, 1),
        0 => (1, 0),
        other => {
            return Err(Error::PartitionMismatch(format!(
                "block index {other} out of range for a 2-way partition"
            )))
        }
    };
    let inv = inverse_checked(&m.block(drop, drop))?;
    Ok(m.block(keep, keep) - m.block(keep, drop) * inv * m.block(drop, keep))
}

/// Block inverse of a 2-way partitioned matrix through the Schur complement of `S`.
pub fn partitioned_inverse(m: &PartitionedMatrix) -> Result<PartitionedMatrix> {
    two_way(m)?;
    let q = m.block(0, 1);
    let r = m.block(1, 0);
    let s_inv = inverse_checked(&m.block(1, 1))?;
    let schur = m.block(0, 0) - &q * &s_inv * &r;
    let schur_inv = inverse_checked(&schur).map_err(|_| Error::SingularMatrix)?;
    let top_right = -(&schur_inv * &q * &s_inv);
    let bottom_left = -(&s_inv * &r * &schur_inv);
    let bottom_right = &s_inv + &s_inv * &r * &schur_inv * &q * &s_inv;

    let (d0, d1) = (m.dims()[0], m.dims()[1]);
    let mut out = CMatrix::zeros(d0 + d1, d0 + d1);
    out.view_mut((0, 0), (d0, d0)).copy_from(&schur_inv);
    out.view_mut((0, d0), (d0, d1)).copy_from(&top_right);
    out.view_mut((d0, 0), (d1, d0)).copy_from(&bottom_left);
    out.view_mut((d0, d0), (d1, d1)).copy_from(&bottom_right);
    // Rounding asymmetry of the assembled inverse is far above HERMITIAN_TOL for
    // moderately conditioned inputs.
    PartitionedMatrix::with_tolerance(m.dims().to_vec(), out, 1e-6)
}

/// Outcome of a positivity test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PsdVerdict {
    pub positive: bool,
    pub min_eigenvalue: f64,
}

/// `λ_min ≥ −tol·(1 + ‖M‖)` on the Hermitian part of `m`.
pub fn is_positive_semidefinite(m: &CMatrix, tol: f64) -> PsdVerdict {
    let eig = decompose(&symmetrize(m));
    let norm = eig
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let min_eigenvalue = eig.min_eigenvalue();
    PsdVerdict {
        positive: min_eigenvalue >= -tol * (1.0 + norm),
        min_eigenvalue,
    }
}

/// `log det M` for a Hermitian positive definite matrix.
pub fn log_det_positive(m: &CMatrix) -> Result<f64> {
    let eig = eig_hermitian(m)?;
    if eig.min_eigenvalue() <= 1e-14 * eig.max_eigenvalue() {
        return Err(Error::SingularMatrix);
    }
    Ok(eig.eigenvalues.iter().map(|x| x.ln()).sum())
}

/// Random matrices for instance generation and property tests.
pub mod random {
    use rand::Rng;
    use rand_distr::StandardNormal;

    use crate::{CMatrix, C64};

    pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
    }

    /// Haar-distributed unitary from the QR factorization of a complex Gaussian matrix.
    pub fn unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
        let qr = gaussian(n, n, rng).qr();
        let (mut q, r) = qr.unpack();
        for j in 0..n {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
            q.column_mut(j).apply(|z| *z *= phase);
        }
        q
    }

    /// `G*G / rows` for an `rows × n` complex Gaussian `G`.
    pub fn wishart(n: usize, rows: usize, rng: &mut impl Rng) -> CMatrix {
        let g = gaussian(rows, n, rng);
        let w = g.adjoint() * g;
        super::symmetrize(&w.unscale(rows as f64))
    }

    pub fn hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        super::symmetrize(&gaussian(n, n, rng))
    }

    pub fn vector(n: usize, rng: &mut impl Rng) -> crate::CVector {
        gaussian(n, 1, rng).column(0).into_owned()
    }
}
