//! Truncated Fock-space oracle.
//!
//! Operators are dense matrices over an [`OccupationBasis`]. Two truncations exist:
//! [`CutoffPolicy::TotalNumber`] keeps every occupation vector with at most `N` particles
//! in total and is exact for particle-number preserving operators (`Γ`, `F`, `D_A`);
//! [`CutoffPolicy::PerMode`] bounds each mode separately and is used for Weyl and field
//! operators, which change the particle number.
//!
//! Both policies enumerate states in graded order (total particle number first, then
//! descending lexicographic order of the occupation vector), so every particle-number
//! sector is a contiguous index range.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::blocklin::{self, hermitian_part, max_norm};
use crate::specfun::ln_factorial;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Largest basis the oracle will enumerate.
pub const BASIS_CAP: usize = 200_000;
/// Truncation defect above which a Weyl operator is flagged.
pub const TRUNCATION_WARNING: f64 = 1e-6;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffPolicy {
    /// Each mode holds at most `N` particles.
    PerMode(usize),
    /// At most `N` particles in total.
    TotalNumber(usize),
}

/// Occupation-number basis `|r_1, …, r_m⟩` under a cutoff policy.
#[derive(Debug, Clone)]
pub struct OccupationBasis {
    modes: usize,
    policy: CutoffPolicy,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    sectors: Vec<Range<usize>>,
    lower: Vec<usize>,
    raise: Vec<usize>,
}

fn basis_size(modes: usize, policy: CutoffPolicy) -> u128 {
    match policy {
        CutoffPolicy::PerMode(n) => {
            let mut size: u128 = 1;
            for _ in 0..modes {
                size = size.saturating_mul(n as u128 + 1);
            }
            size
        }
        CutoffPolicy::TotalNumber(n) => {
            // C(n + m, m), exact at each step
            let mut size: u128 = 1;
            for k in 1..=modes as u128 {
                size = size.saturating_mul(n as u128 + k) / k;
                if size > u64::MAX as u128 {
                    return size;
                }
            }
            size
        }
    }
}

fn compositions(total: u32, modes: usize, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if modes == 1 {
        if total <= cap {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
        }
        return;
    }
    for first in (0..=total.min(cap)).rev() {
        prefix.push(first);
        compositions(total - first, modes - 1, cap, prefix, out);
        prefix.pop();
    }
}

impl OccupationBasis {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn policy(&self) -> CutoffPolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn total(&self, i: usize) -> u32 {
        self.states[i].iter().sum()
    }

    /// Index range of the states with exactly `n` particles (empty beyond the cutoff).
    pub fn sector(&self, n: usize) -> Range<usize> {
        self.sectors.get(n).cloned().unwrap_or(0..0)
    }

    pub fn sectors(&self) -> &[Range<usize>] {
        &self.sectors
    }

    /// Index of the state with one particle fewer in `mode`, if any.
    pub fn lowered(&self, i: usize, mode: usize) -> Option<usize> {
        let j = self.lower[i * self.modes + mode];
        (j != NONE).then_some(j)
    }

    /// Index of the state with one particle more in `mode`, if it is retained.
    pub fn raised(&self, i: usize, mode: usize) -> Option<usize> {
        let j = self.raise[i * self.modes + mode];
        (j != NONE).then_some(j)
    }

    /// `ln(r_1! ⋯ r_m!)`.
    fn ln_norm(&self, i: usize) -> f64 {
        self.states[i].iter().map(|&r| ln_factorial(r as usize)).sum()
    }

    fn is_edge(&self, i: usize) -> bool {
        match self.policy {
            CutoffPolicy::PerMode(n) => self.states[i].iter().any(|&r| r as usize == n),
            CutoffPolicy::TotalNumber(n) => self.total(i) as usize == n,
        }
    }
}

/// Enumerates the occupation basis for `modes` modes.
pub fn enumerate_basis(modes: usize, policy: CutoffPolicy) -> Result<Arc<OccupationBasis>> {
    if modes == 0 {
        return Err(Error::DimsTooSmall("at least one mode is required".into()));
    }
    let size = basis_size(modes, policy);
    if size > BASIS_CAP as u128 {
        return Err(Error::BasisTooLarge {
            size,
            cap: BASIS_CAP,
        });
    }
    let (max_total, cap) = match policy {
        CutoffPolicy::PerMode(n) => (n * modes, n as u32),
        CutoffPolicy::TotalNumber(n) => (n, n as u32),
    };
    let mut states = Vec::with_capacity(size as usize);
    let mut sectors = Vec::with_capacity(max_total + 1);
    let mut prefix = Vec::with_capacity(modes);
    for total in 0..=max_total {
        let start = states.len();
        compositions(total as u32, modes, cap, &mut prefix, &mut states);
        sectors.push(start..states.len());
    }
    let index: HashMap<Vec<u32>, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let mut lower = vec![NONE; states.len() * modes];
    let mut raise = vec![NONE; states.len() * modes];
    let mut probe = vec![0u32; modes];
    for (i, s) in states.iter().enumerate() {
        for k in 0..modes {
            probe.copy_from_slice(s);
            if s[k] > 0 {
                probe[k] -= 1;
                lower[i * modes + k] = index[&probe];
                probe[k] += 1;
            }
            probe[k] += 1;
            if let Some(&j) = index.get(&probe) {
                raise[i * modes + k] = j;
            }
        }
    }
    Ok(Arc::new(OccupationBasis {
        modes,
        policy,
        states,
        index,
        sectors,
        lower,
        raise,
    }))
}

/// Dense matrix acting on an occupation basis.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    basis: Arc<OccupationBasis>,
    matrix: CMatrix,
}

impl TruncatedOperator {
    pub fn new(basis: Arc<OccupationBasis>, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: matrix.nrows(),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn identity(basis: Arc<OccupationBasis>) -> Self {
        let n = basis.len();
        Self {
            basis,
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn basis(&self) -> &Arc<OccupationBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other`; both must act on the same basis.
    pub fn compose(&self, other: &TruncatedOperator) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &TruncatedOperator) -> Result<C64> {
        self.same_basis(other)?;
        let n = self.matrix.nrows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix[(i, k)] * other.matrix[(k, i)];
            }
        }
        Ok(acc)
    }

    /// `max |(T*T − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        max_norm(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n)))
    }

    /// `exp(i t H)` for a Hermitian operator `H`.
    pub fn exp_i(&self, t: f64) -> Result<Self> {
        let eig = blocklin::eig_hermitian(&self.matrix)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: eig.map(|x| C64::from_polar(1.0, t * x)),
        })
    }

    fn same_basis(&self, other: &TruncatedOperator) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis.states == other.basis.states {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                found: other.basis.len(),
            })
        }
    }
}

fn check_mode(basis: &OccupationBasis, mode: usize) -> Result<()> {
    if mode >= basis.modes {
        Err(Error::InvalidMode {
            index: mode,
            modes: basis.modes,
        })
    } else {
        Ok(())
    }
}

fn check_vector(basis: &OccupationBasis, f: &CVector) -> Result<()> {
    if f.len() != basis.modes {
        Err(Error::DimensionMismatch {
            expected: basis.modes,
            found: f.len(),
        })
    } else {
        Ok(())
    }
}

fn require_total_number(basis: &OccupationBasis) -> Result<()> {
    match basis.policy {
        CutoffPolicy::TotalNumber(_) => Ok(()),
        CutoffPolicy::PerMode(_) => Err(Error::PolicyMismatch(
            "particle-number preserving operators require a total-number cutoff",
        )),
    }
}

/// Annihilation `a(f) = Σ_k f̄_k a_k`, antilinear in `f`.
pub fn annihilation(basis: &Arc<OccupationBasis>, f: &CVector) -> Result<TruncatedOperator> {
    check_vector(basis, f)?;
    let n = basis.len();
    let mut m = CMatrix::zeros(n, n);
    for col in 0..n {
        for (k, &r) in basis.state(col).iter().enumerate() {
            if r > 0 {
                let row = basis.lowered(col, k).expect("lowered state is always retained");
                m[(row, col)] += f[k].conj() * (r as f64).sqrt();
            }
        }
    }
    TruncatedOperator::new(basis.clone(), m)
}

/// Creation `a⁺(f) = Σ_k f_k a_k⁺`, the adjoint of [`annihilation`].
pub fn creation(basis: &Arc<OccupationBasis>, f: &CVector) -> Result<TruncatedOperator> {
    Ok(annihilation(basis, f)?.adjoint())
}

/// `(a, a⁺)` for a single mode: `a|…r…⟩ = √r |…r−1…⟩`, and `a⁺` is the exact adjoint
/// matrix (raising out of the truncation gives zero).
pub fn ladder_operators(
    basis: &Arc<OccupationBasis>,
    mode: usize,
) -> Result<(TruncatedOperator, TruncatedOperator)> {
    check_mode(basis, mode)?;
    let mut e = CVector::zeros(basis.modes);
    e[mode] = C64::new(1.0, 0.0);
    let a = annihilation(basis, &e)?;
    let adag = a.adjoint();
    Ok((a, adag))
}

/// Second quantization `Γ(U)`, acting as `U` on every factor of every n-particle block.
///
/// Column `s` is obtained by expanding `Π_j (Σ_i U_ij a_i⁺)^{s_j} Φ` into monomials;
/// `⟨r|Γ(U)|s⟩ = c_r √(r!/s!)`. `U` need not be unitary.
pub fn gamma(u: &CMatrix, basis: &Arc<OccupationBasis>) -> Result<TruncatedOperator> {
    require_total_number(basis)?;
    let modes = basis.modes;
    if u.nrows() != modes || u.ncols() != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            found: u.nrows(),
        });
    }
    let n = basis.len();
    let mut out = CMatrix::zeros(n, n);
    let mut cur = vec![C64::new(0.0, 0.0); n];
    let mut next = vec![C64::new(0.0, 0.0); n];
    let mut factors = Vec::new();
    for col in 0..n {
        factors.clear();
        for (j, &r) in basis.state(col).iter().enumerate() {
            factors.extend(std::iter::repeat_n(j, r as usize));
        }
        cur[0] = C64::new(1.0, 0.0);
        for (k, &j) in factors.iter().enumerate() {
            for idx in basis.sector(k) {
                let c = cur[idx];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..modes {
                    let t = basis.raised(idx, i).expect("degree stays within the cutoff");
                    next[t] += c * u[(i, j)];
                }
                cur[idx] = C64::new(0.0, 0.0);
            }
            std::mem::swap(&mut cur, &mut next);
        }
        let degree = factors.len();
        let ln_s = basis.ln_norm(col);
        for row in basis.sector(degree) {
            let c = cur[row];
            if c != C64::new(0.0, 0.0) {
                out[(row, col)] = c * (0.5 * (basis.ln_norm(row) - ln_s)).exp();
            }
            cur[row] = C64::new(0.0, 0.0);
        }
    }
    TruncatedOperator::new(basis.clone(), out)
}

/// `F(A) = Σ_ij A_ij a_i⁺ a_j`, the differential second quantization.
pub fn dgamma(a: &CMatrix, basis: &Arc<OccupationBasis>) -> Result<TruncatedOperator> {
    require_total_number(basis)?;
    let modes = basis.modes;
    if a.nrows() != modes || a.ncols() != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            found: a.nrows(),
        });
    }
    let n = basis.len();
    let mut out = CMatrix::zeros(n, n);
    for col in 0..n {
        let s = basis.state(col);
        for j in 0..modes {
            if s[j] == 0 {
                continue;
            }
            let low = basis.lowered(col, j).expect("lowered state is always retained");
            let down = (s[j] as f64).sqrt();
            let l = basis.state(low);
            for i in 0..modes {
                let up = ((l[i] + 1) as f64).sqrt();
                let row = basis.raised(low, i).expect("same particle number as col");
                out[(row, col)] += a[(i, j)] * (down * up);
            }
        }
    }
    TruncatedOperator::new(basis.clone(), out)
}

/// Which one-particle coefficient multiplies the annihilators in the Weyl generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeylConvention {
    /// `W(f) = exp(Σ_k f_k a_k − f̄_k a_k⁺)`; single mode `W(z) = exp(z a − z̄ a⁺)`.
    Direct,
    /// `W(f) = exp(Σ_k f̄_k a_k − f_k a_k⁺)`.
    Conjugate,
}

/// Field operator for an explicit convention: `B(f) = −i G(f)` with `G` the Weyl generator.
fn field_with(
    convention: WeylConvention,
    f: &CVector,
    basis: &Arc<OccupationBasis>,
) -> Result<TruncatedOperator> {
    // a(g) carries conj(g); pick g so that the annihilator coefficient matches.
    let g = match convention {
        WeylConvention::Direct => f.map(|z| z.conj()),
        WeylConvention::Conjugate => f.clone(),
    };
    let half = annihilation(basis, &g)?.into_matrix() * C64::new(0.0, -1.0);
    let b = &half + half.adjoint();
    TruncatedOperator::new(basis.clone(), b)
}

/// The Weyl convention in force, chosen once by checking the composition law
/// `W(z)W(z′) = W(z+z′) exp(i Im(z̄ z′))` on a single-mode truncation.
pub fn weyl_convention() -> WeylConvention {
    static CHOSEN: OnceLock<WeylConvention> = OnceLock::new();
    *CHOSEN.get_or_init(|| {
        let defect = |convention| composition_defect(convention).unwrap_or(f64::INFINITY);
        let (direct, conjugate) = (
            defect(WeylConvention::Direct),
            defect(WeylConvention::Conjugate),
        );
        assert!(
            direct.min(conjugate) < 1e-8,
            "neither Weyl convention satisfies the composition law ({direct:e}, {conjugate:e})"
        );
        if direct <= conjugate {
            WeylConvention::Direct
        } else {
            WeylConvention::Conjugate
        }
    })
}

fn composition_defect(convention: WeylConvention) -> Result<f64> {
    let basis = enumerate_basis(1, CutoffPolicy::PerMode(40))?;
    let (z, w) = (C64::new(0.3, 0.0), C64::new(0.0, 0.2));
    let op = |x: C64| -> Result<CMatrix> {
        Ok(field_with(convention, &CVector::from_element(1, x), &basis)?
            .exp_i(1.0)?
            .into_matrix())
    };
    let lhs = op(z)? * op(w)?;
    let rhs = op(z + w)? * C64::from_polar(1.0, (z.conj() * w).im);
    let interior = 10;
    let diff = (lhs - rhs).view((0, 0), (interior, interior)).into_owned();
    Ok(max_norm(&diff))
}

/// Self-adjoint generator `B(f)` of `t ↦ W(t f)`: `exp(i t B(f)) = W(t f)`.
///
/// Single-mode specializations: `B(i/√2) = Q = (a + a⁺)/√2` and
/// `B(1/√2) = P = i(a⁺ − a)/√2` under the direct convention.
pub fn field_operator(f: &CVector, basis: &Arc<OccupationBasis>) -> Result<TruncatedOperator> {
    field_with(weyl_convention(), f, basis)
}

/// A truncated Weyl unitary with its truncation diagnostic.
#[derive(Debug, Clone)]
pub struct WeylOperator {
    pub operator: TruncatedOperator,
    /// Largest amplitude that a column with every occupation at most half the cutoff
    /// places on the outermost retained shell.
    pub truncation_defect: f64,
    pub convention: WeylConvention,
}

impl WeylOperator {
    pub fn truncation_warning(&self) -> bool {
        self.truncation_defect > TRUNCATION_WARNING
    }
}

/// `W(f)` as the exponential of the truncated multimode generator.
pub fn weyl_operator(f: &CVector, basis: &Arc<OccupationBasis>) -> Result<WeylOperator> {
    let cutoff = match basis.policy {
        CutoffPolicy::PerMode(n) => n,
        CutoffPolicy::TotalNumber(_) => {
            return Err(Error::PolicyMismatch(
                "Weyl operators require a per-mode cutoff",
            ))
        }
    };
    let convention = weyl_convention();
    let operator = field_with(convention, f, basis)?.exp_i(1.0)?;
    let m = operator.matrix();
    let mut defect: f64 = 0.0;
    for col in 0..basis.len() {
        if basis.state(col).iter().any(|&r| 2 * r as usize > cutoff) {
            continue;
        }
        let edge: f64 = (0..basis.len())
            .filter(|&row| basis.is_edge(row))
            .map(|row| m[(row, col)].norm_sqr())
            .sum();
        defect = defect.max(edge.sqrt());
    }
    Ok(WeylOperator {
        operator,
        truncation_defect: defect,
        convention,
    })
}

/// A truncated quasi-free density operator.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    pub operator: TruncatedOperator,
    /// `1 − Tr` of the truncated operator: the weight beyond the cutoff.
    pub tail_weight: f64,
}

/// `D_A = Γ(A(I+A)⁻¹) / det(I+A)` on a total-number truncation.
pub fn density_operator(a: &CMatrix, basis: &Arc<OccupationBasis>) -> Result<DensityOperator> {
    require_total_number(basis)?;
    let eig = blocklin::eig_hermitian(a)?;
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if eig.min_eigenvalue() < -blocklin::PSD_TOL * (1.0 + scale) {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.min_eigenvalue(),
        });
    }
    let clamped: Vec<f64> = eig.eigenvalues.iter().map(|x| x.max(0.0)).collect();
    let k = blocklin::EigenDecomposition {
        eigenvalues: clamped.clone(),
        eigenvectors: eig.eigenvectors,
    }
    .map(|x| C64::new(x / (1.0 + x), 0.0));
    let ln_c: f64 = clamped.iter().map(|x| x.ln_1p()).sum();
    let unnormalized = gamma(&k, basis)?;
    let matrix = unnormalized.into_matrix().unscale(ln_c.exp());
    let operator = TruncatedOperator::new(basis.clone(), matrix)?;
    let tail_weight = 1.0 - operator.trace().re;
    Ok(DensityOperator {
        operator,
        tail_weight,
    })
}

/// Von Neumann entropy `−Σ p log p` (nats) from the eigenvalues of a truncated state,
/// clamped to `[0, 1]`.
///
/// Operators that commute with the total particle number are diagonalized sector by
/// sector.
pub fn vn_entropy_numeric(rho: &TruncatedOperator) -> Result<f64> {
    let m = hermitian_part(rho.matrix(), 1e-10)?;
    let trace_defect = (1.0 - m.trace().re).abs();
    if trace_defect > 1e-3 {
        return Err(Error::NotAState { trace_defect });
    }
    let basis = rho.basis();
    let scale = max_norm(&m);
    let sectors = basis.sectors();
    let block_diagonal = sectors.iter().all(|r| {
        r.clone().all(|col| {
            (0..m.nrows())
                .filter(|row| !r.contains(row))
                .all(|row| m[(row, col)].norm() <= 1e-14 * scale)
        })
    });
    let blocks: Vec<Range<usize>> = if block_diagonal {
        sectors.iter().filter(|r| !r.is_empty()).cloned().collect()
    } else {
        std::iter::once(0..m.nrows()).collect()
    };
    let mut entropy = 0.0;
    for r in blocks {
        let sub = m.view((r.start, r.start), (r.len(), r.len())).into_owned();
        for p in blocklin::eig_hermitian(&sub)?.eigenvalues {
            let p = p.clamp(0.0, 1.0);
            if p > 0.0 {
                entropy -= p * p.ln();
            }
        }
    }
    Ok(entropy)
}
