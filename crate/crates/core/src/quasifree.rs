//! Closed-form quantities of a quasi-free state `ω_A`, determined by a positive matrix `A`
//! through `ω_A(W(f)) = exp(−‖f‖²/2 − ⟨f, A f⟩)`.

use crate::blocklin::{self, EigenDecomposition, PartitionedMatrix, PSD_TOL};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Smallest eigenvalue for which imaginary powers `X^{it}` are taken.
pub const STRICT_POSITIVITY: f64 = 1e-12;

/// `η(x) = −x log x` with `η(0) = 0`.
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Entropy contribution `η(λ) − η(λ+1)` of a single mode with occupation `λ`.
pub fn mode_entropy(lambda: f64) -> f64 {
    eta(lambda) - eta(lambda + 1.0)
}

/// A quasi-free state: a positive partitioned matrix plus its cached spectrum.
#[derive(Debug, Clone)]
pub struct QuasiFreeState {
    a: PartitionedMatrix,
    eig: EigenDecomposition,
}

impl QuasiFreeState {
    /// Accepts `A` if `λ_min ≥ −1e-10·(1+‖A‖)`; eigenvalues in that band are clamped to 0.
    pub fn new(a: PartitionedMatrix) -> Result<Self> {
        let mut eig = a.eig();
        let scale = eig
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()));
        let min_eigenvalue = eig.min_eigenvalue();
        if min_eigenvalue < -PSD_TOL * (1.0 + scale) {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        eig.eigenvalues.iter_mut().for_each(|x| *x = x.max(0.0));
        Ok(Self { a, eig })
    }

    pub fn from_matrix(a: CMatrix) -> Result<Self> {
        Self::new(PartitionedMatrix::single(a)?)
    }

    pub fn matrix(&self) -> &PartitionedMatrix {
        &self.a
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.a.side()
    }

    /// `S(ω_A) = Tr η(A) − Tr η(A+I)` in nats.
    pub fn entropy(&self) -> f64 {
        self.eig.eigenvalues.iter().map(|&x| mode_entropy(x)).sum()
    }

    /// `ω_A(W(f)) = exp(−‖f‖²/2 − ⟨f, A f⟩)`.
    pub fn char_value(&self, f: &CVector) -> Result<f64> {
        self.check_dim(f)?;
        let quad = f.dotc(&(self.a.entries() * f)).re;
        Ok((-0.5 * f.norm_squared() - quad).exp())
    }

    /// `ω_A(a⁺(f) a(g)) = ⟨g, A f⟩`.
    pub fn two_point(&self, f: &CVector, g: &CVector) -> Result<C64> {
        self.check_dim(f)?;
        self.check_dim(g)?;
        Ok(g.dotc(&(self.a.entries() * f)))
    }

    /// Restriction to the CCR algebra of the selected blocks: the principal submatrix.
    pub fn restrict(&self, blocks: &[usize]) -> Result<QuasiFreeState> {
        Self::new(self.a.principal(blocks)?)
    }

    /// `log det(I + A) = log Tr Γ(A(I+A)⁻¹)`.
    pub fn log_normalization(&self) -> f64 {
        self.eig.eigenvalues.iter().map(|x| x.ln_1p()).sum()
    }

    /// `(A(I+A)⁻¹)^{it}` for a strictly positive `A`.
    pub fn modular_power(&self, t: f64) -> Result<CMatrix> {
        self.require_strictly_positive()?;
        Ok(self
            .eig
            .map(|x| C64::from_polar(1.0, t * (x / (1.0 + x)).ln())))
    }

    pub fn require_strictly_positive(&self) -> Result<()> {
        let min_eigenvalue = self.eig.min_eigenvalue();
        if min_eigenvalue <= STRICT_POSITIVITY {
            Err(Error::NotStrictlyPositive { min_eigenvalue })
        } else {
            Ok(())
        }
    }

    fn check_dim(&self, f: &CVector) -> Result<()> {
        if f.len() != self.dim() {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: f.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// Closed-form entropy of `ω_A`.
pub fn entropy_closed_form(state: &QuasiFreeState) -> f64 {
    state.entropy()
}

/// One-particle part of the Connes cocycle `[Dω_A, Dω_B]_t = u_t Γ(flow)`.
#[derive(Debug, Clone)]
pub struct CocycleFlow {
    /// `(A(I+A)⁻¹)^{it} (B(I+B)⁻¹)^{−it}`.
    pub one_particle: CMatrix,
    /// `u_t = c_A^{−it} c_B^{it}` with `c_X = det(I+X)`.
    pub phase: C64,
}

pub fn cocycle_flow(a: &QuasiFreeState, b: &QuasiFreeState, t: f64) -> Result<CocycleFlow> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let one_particle = a.modular_power(t)? * b.modular_power(-t)?;
    let phase = C64::from_polar(1.0, -t * (a.log_normalization() - b.log_normalization()));
    Ok(CocycleFlow {
        one_particle,
        phase,
    })
}

/// Hermitian matrix `K = A(I+A)⁻¹` whose second quantization is the unnormalized density.
pub fn gibbs_generator(state: &QuasiFreeState) -> CMatrix {
    blocklin::symmetrize(&state.eig.map(|x| C64::new(x / (1.0 + x), 0.0)))
}
