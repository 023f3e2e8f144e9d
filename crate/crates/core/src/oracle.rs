//! Cross-validation of closed forms against the truncated Fock-space representation.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocklin::{self, random};
use crate::fock::{self, CutoffPolicy, OccupationBasis, TruncatedOperator};
use crate::quasifree::QuasiFreeState;
use crate::specfun;
use crate::sweep::{self, Execution};
use crate::{CMatrix, CVector, Result, C64};

/// Agreement required between closed form and truncated numerics.
pub const ORACLE_TOL: f64 = 1e-8;
/// Largest matrix index compared in the Weyl element check.
pub const WEYL_INDEX: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub closed_form: f64,
    pub numeric: f64,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleCheck {
    fn new(name: impl Into<String>, closed_form: f64, numeric: f64, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            closed_form,
            numeric,
            error,
            tolerance,
            passed: error <= tolerance,
        }
    }

    fn failed(name: impl Into<String>, err: crate::Error) -> Self {
        let mut c = Self::new(name, f64::NAN, f64::NAN, f64::INFINITY, ORACLE_TOL);
        c.name = format!("{} ({err})", c.name);
        c
    }
}

#[derive(Debug, Clone, Copy)]
enum Job {
    EntropySingle(f64),
    EntropyPair,
    CharValue,
    TwoPoint,
    WeylElements,
    CoherentColumn,
    GammaTrace,
}

const JOBS: [Job; 9] = [
    Job::EntropySingle(0.1),
    Job::EntropySingle(0.3),
    Job::EntropySingle(1.0),
    Job::EntropyPair,
    Job::CharValue,
    Job::TwoPoint,
    Job::WeylElements,
    Job::CoherentColumn,
    Job::GammaTrace,
];

/// A fixed 2×2 positive matrix with spectrum `{0.15, 0.5}`.
fn pair_matrix() -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = random::unitary(2, &mut rng);
    let d = CMatrix::from_diagonal(&nalgebra::dvector![C64::new(0.15, 0.0), C64::new(0.5, 0.0)]);
    blocklin::symmetrize(&(&u * d * u.adjoint()))
}

fn basis(modes: usize, policy: CutoffPolicy) -> Result<Arc<OccupationBasis>> {
    fock::enumerate_basis(modes, policy)
}

fn entropy_check(name: String, a: CMatrix, cutoff: usize) -> Result<OracleCheck> {
    let b = basis(a.nrows(), CutoffPolicy::TotalNumber(cutoff))?;
    let closed = QuasiFreeState::from_matrix(a.clone())?.entropy();
    let rho = fock::density_operator(&a, &b)?;
    let numeric = fock::vn_entropy_numeric(&rho.operator)?;
    Ok(OracleCheck::new(name, closed, numeric, (closed - numeric).abs(), ORACLE_TOL))
}

fn run(job: Job, cutoff: usize) -> Result<OracleCheck> {
    match job {
        Job::EntropySingle(lambda) => entropy_check(
            format!("entropy, one mode, lambda = {lambda}"),
            CMatrix::from_element(1, 1, C64::new(lambda, 0.0)),
            cutoff,
        ),
        Job::EntropyPair => entropy_check("entropy, two modes".into(), pair_matrix(), cutoff),
        Job::CharValue => {
            let lambda = 0.4;
            let f = CVector::from_element(1, C64::from_polar(0.5, 0.6));
            let closed = QuasiFreeState::from_matrix(CMatrix::from_element(1, 1, C64::new(lambda, 0.0)))?
                .char_value(&f)?;
            let tb = basis(1, CutoffPolicy::TotalNumber(cutoff))?;
            let pb = basis(1, CutoffPolicy::PerMode(cutoff))?;
            let rho = fock::density_operator(&CMatrix::from_element(1, 1, C64::new(lambda, 0.0)), &tb)?;
            let rho = TruncatedOperator::new(pb.clone(), rho.operator.into_matrix())?;
            let w = fock::weyl_operator(&f, &pb)?;
            let numeric = rho.trace_product(&w.operator)?;
            Ok(OracleCheck::new(
                "characteristic function",
                closed,
                numeric.re,
                (numeric - closed).norm(),
                ORACLE_TOL,
            ))
        }
        Job::TwoPoint => {
            let a = pair_matrix();
            let f = CVector::from_vec(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.4)]);
            let g = CVector::from_vec(vec![C64::new(0.5, -0.3), C64::new(0.1, 0.2)]);
            let closed = QuasiFreeState::from_matrix(a.clone())?.two_point(&f, &g)?;
            let b = basis(2, CutoffPolicy::TotalNumber(cutoff))?;
            let rho = fock::density_operator(&a, &b)?;
            let op = fock::creation(&b, &f)?.compose(&fock::annihilation(&b, &g)?)?;
            let numeric = rho.operator.trace_product(&op)?;
            Ok(OracleCheck::new(
                "two-point function",
                closed.norm(),
                numeric.norm(),
                (numeric - closed).norm(),
                ORACLE_TOL,
            ))
        }
        Job::WeylElements => {
            let z = C64::new(0.4, -0.3);
            let b = basis(1, CutoffPolicy::PerMode(cutoff))?;
            let w = fock::weyl_operator(&CVector::from_element(1, z), &b)?;
            let top = WEYL_INDEX.min(cutoff);
            let mut err: f64 = 0.0;
            for m in 0..=top {
                for n in 0..=top {
                    let closed = specfun::weyl_matrix_element(m, n, z)?;
                    err = err.max((w.operator.matrix()[(m, n)] - closed).norm());
                }
            }
            Ok(OracleCheck::new("Weyl matrix elements", 0.0, err, err, ORACLE_TOL))
        }
        Job::CoherentColumn => {
            let z = C64::new(-0.25, 0.5);
            let b = basis(1, CutoffPolicy::PerMode(cutoff))?;
            let w = fock::weyl_operator(&CVector::from_element(1, z), &b)?;
            let coeffs = specfun::exponential_vector_coeffs(-z.conj(), cutoff);
            let scale = (-0.5 * z.norm_sqr()).exp();
            let top = WEYL_INDEX.min(cutoff);
            let err = (0..=top)
                .map(|n| (w.operator.matrix()[(n, 0)] - coeffs[n] * scale).norm())
                .fold(0.0_f64, f64::max);
            Ok(OracleCheck::new("Weyl action on the vacuum", 0.0, err, err, ORACLE_TOL))
        }
        Job::GammaTrace => {
            let a = pair_matrix();
            let state = QuasiFreeState::from_matrix(a)?;
            let k = crate::quasifree::gibbs_generator(&state);
            let b = basis(2, CutoffPolicy::TotalNumber(cutoff))?;
            let numeric = fock::gamma(&k, &b)?.trace().re;
            let closed = state.log_normalization().exp();
            Ok(OracleCheck::new(
                "trace of second quantization",
                closed,
                numeric,
                ((numeric - closed) / closed).abs(),
                ORACLE_TOL,
            ))
        }
    }
}

/// Runs every cross-validation at the given cutoff.
pub fn cross_validate(cutoff: usize, exec: Execution) -> Vec<OracleCheck> {
    sweep::map(&JOBS, exec, |&job| {
        run(job, cutoff).unwrap_or_else(|e| OracleCheck::failed(format!("{job:?}"), e))
    })
}
