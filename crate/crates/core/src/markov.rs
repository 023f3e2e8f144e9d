//! Markov-triplet criteria for a quasi-free state `ω_A` on `CCR(H₁ ⊕ H₂ ⊕ H₃)`.
//!
//! The state is Markovian iff `S(12) + S(23) − S(123) − S(2) = 0`. Three independent
//! deciders are provided:
//!
//! - [`entropy_gap`]: the strong-subadditivity deficiency from closed-form entropies;
//! - [`flow_check`]: equality of the one-particle cocycle flows of `(A, D)` and `(B, C)`
//!   at finitely many times;
//! - [`structural_detect`]: search for a projection `P` with `P|H₁ = I`, `P|H₃ = 0`,
//!   `PA = AP`, i.e. a splitting `H₂ = K_a ⊕ K_b` under which `A` is block diagonal.
//!
//! Weaker necessary conditions ([`bmc2_check`], [`felk_check`], [`det_identity`]) and the
//! classical Gaussian bridge ([`classical_check`]) are reported alongside.

use std::f64::consts::{PI, SQRT_2};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocklin::{
    self, block_diag, identity, inverse_checked, log_det_positive, op_norm, random,
    PartitionedMatrix, PsdVerdict, PSD_TOL,
};
use crate::fock::{self, WeylConvention};
use crate::quasifree::QuasiFreeState;
use crate::{CMatrix, Error, Result, C64};

/// Entropy gap (nats) at or below which a triplet is declared Markov.
pub const GAP_TOL: f64 = 1e-8;
/// Default tolerance for the flow and residual checks (operator norm).
pub const FLOW_TOL: f64 = 1e-8;
/// Default sample times for [`flow_check`]; mutually incommensurate.
pub const DEFAULT_T_SAMPLES: [f64; 4] = [0.5, 1.0, SQRT_2, PI];
/// Singular values below this fraction of the largest are dropped in the Krylov closure.
pub const KRYLOV_RANK_TOL: f64 = 1e-10;
/// Strict-positivity margin used by the instance generator.
pub const PADDING_MARGIN: f64 = 0.1;

/// Block sizes `(d₁, d₂, d₃)` of `H₁ ⊕ H₂ ⊕ H₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripletPartition {
    pub d1: usize,
    pub d2: usize,
    pub d3: usize,
}

impl TripletPartition {
    pub fn new(d1: usize, d2: usize, d3: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 || d3 == 0 {
            return Err(Error::DimsTooSmall(format!(
                "block sizes must be positive, got ({d1}, {d2}, {d3})"
            )));
        }
        Ok(Self { d1, d2, d3 })
    }

    pub fn of(a: &PartitionedMatrix) -> Result<Self> {
        match *a.dims() {
            [d1, d2, d3] => Self::new(d1, d2, d3),
            _ => Err(Error::PartitionMismatch(format!(
                "expected a 3-way partition, got {:?}",
                a.dims()
            ))),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.d1, self.d2, self.d3]
    }

    pub fn side(&self) -> usize {
        self.d1 + self.d2 + self.d3
    }
}

/// Copy of `a` keeping only the blocks selected by `keep`; blocks listed in `unit` become
/// identities.
fn masked(a: &PartitionedMatrix, keep: impl Fn(usize, usize) -> bool, unit: &[usize]) -> Result<PartitionedMatrix> {
    let mut m = CMatrix::zeros(a.side(), a.side());
    for i in 0..3 {
        for j in 0..3 {
            let (ri, rj) = (a.range(i), a.range(j));
            let mut view = m.view_mut((ri.start, rj.start), (ri.len(), rj.len()));
            if i == j && unit.contains(&i) {
                view.fill_with_identity();
            } else if keep(i, j) {
                view.copy_from(&a.block(i, j));
            }
        }
    }
    PartitionedMatrix::new(a.dims().to_vec(), m)
}

/// The comparison matrices `B`, `C`, `D` built from `A`.
#[derive(Debug, Clone)]
pub struct ExtensionTriple {
    /// `[[A11, A12, 0], [A21, A22, 0], [0, 0, I]]`
    pub b: PartitionedMatrix,
    /// `Diag(I, A22, I)`
    pub c: PartitionedMatrix,
    /// `[[I, 0, 0], [0, A22, A23], [0, A32, A33]]`
    pub d: PartitionedMatrix,
}

pub fn build_extensions(a: &PartitionedMatrix) -> Result<ExtensionTriple> {
    TripletPartition::of(a)?;
    Ok(ExtensionTriple {
        b: masked(a, |i, j| i < 2 && j < 2, &[2])?,
        c: masked(a, |i, j| i == 1 && j == 1, &[0, 2])?,
        d: masked(a, |i, j| i > 0 && j > 0, &[0])?,
    })
}

fn positive_state(a: &PartitionedMatrix) -> Result<QuasiFreeState> {
    TripletPartition::of(a)?;
    QuasiFreeState::new(a.clone())
}

/// Strong-subadditivity deficiency `S(12) + S(23) − S(123) − S(2) ≥ 0` in nats.
pub fn entropy_gap(a: &PartitionedMatrix) -> Result<f64> {
    let s = positive_state(a)?;
    let s12 = s.restrict(&[0, 1])?.entropy();
    let s23 = s.restrict(&[1, 2])?.entropy();
    let s2 = s.restrict(&[1])?.entropy();
    Ok(s12 + s23 - s.entropy() - s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowVerdict {
    pub pass: bool,
    pub max_deviation: f64,
    pub samples: Vec<FlowSample>,
}

impl FlowVerdict {
    pub fn deviation_at(&self, t: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| s.t == t)
            .map(|s| s.deviation)
    }
}

struct FlowStates {
    a: QuasiFreeState,
    b: QuasiFreeState,
    c: QuasiFreeState,
    d: QuasiFreeState,
}

fn flow_states(a: &PartitionedMatrix) -> Result<FlowStates> {
    let sa = positive_state(a)?;
    sa.require_strictly_positive()?;
    let ext = build_extensions(a)?;
    let states = FlowStates {
        a: sa,
        b: QuasiFreeState::new(ext.b)?,
        c: QuasiFreeState::new(ext.c)?,
        d: QuasiFreeState::new(ext.d)?,
    };
    for s in [&states.b, &states.c, &states.d] {
        s.require_strictly_positive()?;
    }
    Ok(states)
}

/// `‖A^{it}(I+A)^{−it}D^{−it}(I+D)^{it} − B^{it}(I+B)^{−it}C^{−it}(I+C)^{it}‖` at each `t`.
pub fn flow_check(a: &PartitionedMatrix, t_samples: &[f64], tol: f64) -> Result<FlowVerdict> {
    let st = flow_states(a)?;
    let mut samples = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let lhs = st.a.modular_power(t)? * st.d.modular_power(-t)?;
        let rhs = st.b.modular_power(t)? * st.c.modular_power(-t)?;
        samples.push(FlowSample {
            t,
            deviation: op_norm(&(lhs - rhs)),
        });
    }
    let max_deviation = samples.iter().fold(0.0_f64, |m, s| m.max(s.deviation));
    Ok(FlowVerdict {
        pass: max_deviation <= tol,
        max_deviation,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualVerdict {
    pub pass: bool,
    pub residual: f64,
}

/// `‖A⁻¹(I+A)D(I+D)⁻¹ − B⁻¹(I+B)C(I+C)⁻¹‖`.
pub fn bmc2_check(a: &PartitionedMatrix, tol: f64) -> Result<ResidualVerdict> {
    let st = flow_states(a)?;
    let k = |s: &QuasiFreeState| s.eigen().map(|x| C64::new((1.0 + x) / x, 0.0));
    let k_inv = |s: &QuasiFreeState| s.eigen().map(|x| C64::new(x / (1.0 + x), 0.0));
    let lhs = k(&st.a) * k_inv(&st.d);
    let rhs = k(&st.b) * k_inv(&st.c);
    let residual = op_norm(&(lhs - rhs));
    Ok(ResidualVerdict {
        pass: residual <= tol,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FelkVerdict {
    pub pass: bool,
    /// `‖A13 − A12 A22⁻¹ A23‖`
    pub r1: f64,
    /// `‖A13 − A12 (A22+I)⁻¹ A23‖`
    pub r2: f64,
    /// `‖(A⁻¹)₁₃‖`, absent when `A` is singular.
    pub inverse_13: Option<f64>,
    /// `‖((A+I)⁻¹)₁₃‖`
    pub inverse_plus_identity_13: f64,
}

fn block_13_of_inverse(m: &CMatrix, p: TripletPartition) -> Result<f64> {
    let inv = inverse_checked(m)?;
    Ok(op_norm(
        &inv.view((0, p.d1 + p.d2), (p.d1, p.d3)).into_owned(),
    ))
}

/// The two Schur-type conditions `A13 = A12 A22⁻¹ A23` and `A13 = A12 (A22+I)⁻¹ A23`.
pub fn felk_check(a: &PartitionedMatrix, tol: f64) -> Result<FelkVerdict> {
    let p = TripletPartition::of(a)?;
    let a22 = a.block(1, 1);
    let (a12, a13, a23) = (a.block(0, 1), a.block(0, 2), a.block(1, 2));
    let r1 = op_norm(&(&a13 - &a12 * inverse_checked(&a22)? * &a23));
    let shifted = &a22 + identity(p.d2);
    let r2 = op_norm(&(&a13 - &a12 * inverse_checked(&shifted)? * &a23));
    let inverse_13 = block_13_of_inverse(a.entries(), p).ok();
    let inverse_plus_identity_13 = block_13_of_inverse(&(a.entries() + identity(p.side())), p)?;
    Ok(FelkVerdict {
        pass: r1 <= tol && r2 <= tol,
        r1,
        r2,
        inverse_13,
        inverse_plus_identity_13,
    })
}

/// A splitting `H₂ = K_a ⊕ K_b` under which `A = Diag(A|H₁⊕K_a, A|K_b⊕H₃)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    /// `Diag(I_{d₁}, P_{K_a}, 0_{d₃})`
    pub projection: CMatrix,
    pub dim_ka: usize,
    pub dim_kb: usize,
    /// `‖PA − AP‖`
    pub commutator_norm: f64,
}

/// Orthonormal basis of the numerical range of `m`.
fn range_basis(m: &CMatrix) -> CMatrix {
    if m.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > KRYLOV_RANK_TOL * smax)
        .collect();
    CMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Smallest `h`-invariant subspace containing the columns of `seed`, as orthonormal columns.
fn invariant_closure(h: &CMatrix, seed: &CMatrix) -> CMatrix {
    let scale = op_norm(h);
    let h = if scale > 0.0 { h.unscale(scale) } else { h.clone() };
    let n = h.nrows();
    let mut basis = range_basis(seed);
    while basis.ncols() > 0 && basis.ncols() < n {
        let image = &h * &basis;
        let mut cand = CMatrix::zeros(n, 2 * basis.ncols());
        cand.view_mut((0, 0), (n, basis.ncols())).copy_from(&basis);
        cand.view_mut((0, basis.ncols()), (n, basis.ncols())).copy_from(&image);
        let next = range_basis(&cand);
        if next.ncols() == basis.ncols() {
            break;
        }
        basis = next;
    }
    basis
}

/// Searches for the projection characterizing Markov triplets.
///
/// `K_b` is the smallest `A22`-invariant subspace containing `range(A23)`. A splitting
/// exists iff `A13 = 0` and `A12 P_{K_b} = 0`; the complement `K_a` is then invariant too
/// and `A` commutes with `Diag(I, P_{K_a}, 0)`.
pub fn structural_detect(a: &PartitionedMatrix, tol: f64) -> Option<Splitting> {
    let p = TripletPartition::of(a).ok()?;
    if op_norm(&a.block(0, 2)) > tol {
        return None;
    }
    let a23 = a.block(1, 2);
    let kb = if op_norm(&a23) <= tol {
        CMatrix::zeros(p.d2, 0)
    } else {
        invariant_closure(&a.block(1, 1), &a23)
    };
    let proj_kb = &kb * kb.adjoint();
    if op_norm(&(a.block(0, 1) * &proj_kb)) > tol {
        return None;
    }
    let proj_ka = identity(p.d2) - proj_kb;
    let projection = block_diag(&[&identity(p.d1), &proj_ka, &CMatrix::zeros(p.d3, p.d3)]);
    let commutator_norm = op_norm(&(&projection * a.entries() - a.entries() * &projection));
    if commutator_norm > tol {
        return None;
    }
    Some(Splitting {
        projection,
        dim_ka: p.d2 - kb.ncols(),
        dim_kb: kb.ncols(),
        commutator_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetIdentity {
    /// `det A det C / (det D det B)`
    pub lhs: f64,
    /// `det(I+A) det(I+C) / (det(I+D) det(I+B))`
    pub rhs: f64,
}

pub fn det_identity(a: &PartitionedMatrix) -> Result<DetIdentity> {
    let ext = build_extensions(a)?;
    let n = a.side();
    let shifted = |m: &PartitionedMatrix| m.entries() + identity(n);
    let ld = |m: &CMatrix| log_det_positive(m);
    let lhs = ld(a.entries())? + ld(ext.c.entries())? - ld(ext.d.entries())? - ld(ext.b.entries())?;
    let rhs = ld(&shifted(a))? + ld(&shifted(&ext.c))? - ld(&shifted(&ext.d))? - ld(&shifted(&ext.b))?;
    Ok(DetIdentity {
        lhs: lhs.exp(),
        rhs: rhs.exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalVerdict {
    pub pass: bool,
    /// `‖A′13 − A′12 A′22⁻¹ A′23‖` with `A′ = I + 2A`.
    pub residual: f64,
    /// `‖(I+2A)₁₃‖`, the covariance between the outer field triplets; reported when a
    /// structural splitting exists.
    pub independence: Option<f64>,
}

/// Markov condition for the classical Gaussian triplet of commuting field operators, whose
/// covariance is congruent to `I + 2A` by a block-diagonal scaling.
pub fn classical_check(a: &PartitionedMatrix, tol: f64) -> Result<ClassicalVerdict> {
    let p = TripletPartition::of(a)?;
    positive_state(a)?;
    let cov = PartitionedMatrix::new(
        p.dims(),
        identity(p.side()) + a.entries().scale(2.0),
    )?;
    let c22_inv = inverse_checked(&cov.block(1, 1))?;
    let residual = op_norm(&(cov.block(0, 2) - cov.block(0, 1) * c22_inv * cov.block(1, 2)));
    let independence = structural_detect(a, tol).map(|_| op_norm(&cov.block(0, 2)));
    Ok(ClassicalVerdict {
        pass: residual <= tol,
        residual,
        independence,
    })
}

/// Blocks `X_ij` of `A⁻¹` from the closed-form expressions valid for Markov triplets:
/// `X11 = (A11 − A12 A22⁻¹ A21)⁻¹`, `X12 = −X11 A12 A22⁻¹`, `X13 = 0`,
/// `X22 = (A22 − A21 A11⁻¹ A12)⁻¹ + A22⁻¹ A23 X33 A32 A22⁻¹`, `X23 = −A22⁻¹ A23 X33`,
/// `X33 = (A33 − A32 A22⁻¹ A23)⁻¹`.
pub fn markov_inverse_blocks(a: &PartitionedMatrix) -> Result<CMatrix> {
    let p = TripletPartition::of(a)?;
    let blk = |i, j| a.block(i, j);
    let a22_inv = inverse_checked(&blk(1, 1))?;
    let a11_inv = inverse_checked(&blk(0, 0))?;
    let x11 = inverse_checked(&(blk(0, 0) - blk(0, 1) * &a22_inv * blk(1, 0)))?;
    let x12 = -(&x11 * blk(0, 1) * &a22_inv);
    let x33 = inverse_checked(&(blk(2, 2) - blk(2, 1) * &a22_inv * blk(1, 2)))?;
    let x22 = inverse_checked(&(blk(1, 1) - blk(1, 0) * a11_inv * blk(0, 1)))?
        + &a22_inv * blk(1, 2) * &x33 * blk(2, 1) * &a22_inv;
    let x23 = -(&a22_inv * blk(1, 2) * &x33);
    let n = p.side();
    let mut x = CMatrix::zeros(n, n);
    let (o2, o3) = (p.d1, p.d1 + p.d2);
    x.view_mut((0, 0), (p.d1, p.d1)).copy_from(&x11);
    x.view_mut((0, o2), (p.d1, p.d2)).copy_from(&x12);
    x.view_mut((o2, 0), (p.d2, p.d1)).copy_from(&x12.adjoint());
    x.view_mut((o2, o2), (p.d2, p.d2)).copy_from(&x22);
    x.view_mut((o2, o3), (p.d2, p.d3)).copy_from(&x23);
    x.view_mut((o3, o2), (p.d3, p.d2)).copy_from(&x23.adjoint());
    x.view_mut((o3, o3), (p.d3, p.d3)).copy_from(&x33);
    Ok(x)
}

/// Instance families for [`gen_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Block diagonal over `(H₁ ⊕ K_a) ⊕ (K_b ⊕ H₃)`, conjugated by a random
    /// `Diag(U₁, U₂, U₃)`.
    Markov,
    /// Wishart `G*G/n` with square complex Gaussian `G`.
    Random,
    /// The fixed 6×6 matrix satisfying both Schur conditions without being Markov.
    Counterexample,
}

impl std::str::FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "markov" => Ok(Self::Markov),
            "random" => Ok(Self::Random),
            "counterexample" => Ok(Self::Counterexample),
            other => Err(format!("unknown instance kind `{other}`")),
        }
    }
}

fn ratio(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Exact rational entries of the 6×6 counterexample, partitioned (2, 2, 2).
pub fn counterexample_rational() -> [[Rational64; 6]; 6] {
    let z = ratio(0, 1);
    let int = |n| ratio(n, 1);
    let a11 = [[int(4), z], [z, int(5)]];
    let a22 = [[int(6), z], [z, int(3)]];
    let a33 = [[int(3), z], [z, int(1)]];
    let a12 = [[int(1), int(1)], [ratio(-2, 7), ratio(-2, 7)]];
    let a13 = [[ratio(1, 14), ratio(1, 14)], [ratio(-1, 49), ratio(-1, 49)]];
    let a23 = a12;
    let mut m = [[z; 6]; 6];
    let mut put = |bi: usize, bj: usize, b: [[Rational64; 2]; 2]| {
        for r in 0..2 {
            for c in 0..2 {
                m[2 * bi + r][2 * bj + c] = b[r][c];
                m[2 * bj + c][2 * bi + r] = b[r][c];
            }
        }
    };
    put(0, 0, a11);
    put(1, 1, a22);
    put(2, 2, a33);
    put(0, 1, a12);
    put(0, 2, a13);
    put(1, 2, a23);
    m
}

/// The counterexample rounded once to floating point.
pub fn counterexample() -> PartitionedMatrix {
    let q = counterexample_rational();
    let m = CMatrix::from_fn(6, 6, |r, c| {
        let x = q[r][c];
        C64::new(*x.numer() as f64 / *x.denom() as f64, 0.0)
    });
    PartitionedMatrix::new(vec![2, 2, 2], m).expect("counterexample is symmetric")
}

/// Adds `(|λ_min| + margin)·I` when `λ_min < margin`.
pub fn pad_to_strict_positivity(a: &PartitionedMatrix, margin: f64) -> Result<PartitionedMatrix> {
    let lambda_min = a.eig().min_eigenvalue();
    if lambda_min >= margin {
        return Ok(a.clone());
    }
    let shift = lambda_min.abs() + margin;
    PartitionedMatrix::new(
        a.dims().to_vec(),
        a.entries() + identity(a.side()).scale(shift),
    )
}

/// Generates an instance of the requested family; `dims` is ignored for the
/// counterexample.
pub fn gen_instance(kind: InstanceKind, dims: TripletPartition, seed: u64) -> Result<PartitionedMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let TripletPartition { d1, d2, d3 } = dims;
    match kind {
        InstanceKind::Counterexample => Ok(counterexample()),
        InstanceKind::Random => {
            let n = dims.side();
            PartitionedMatrix::new(dims.dims(), random::wishart(n, n, &mut rng))
        }
        InstanceKind::Markov => {
            if d2 < 2 {
                return Err(Error::DimsTooSmall(format!(
                    "a nontrivial K_a ⊕ K_b split needs d2 ≥ 2, got {d2}"
                )));
            }
            let ka = rng.random_range(1..d2);
            let kb = d2 - ka;
            let left = random::wishart(d1 + ka, 2 * (d1 + ka), &mut rng);
            let right = random::wishart(kb + d3, 2 * (kb + d3), &mut rng);
            let split = PartitionedMatrix::new(dims.dims(), block_diag(&[&left, &right]))?;
            let padded = pad_to_strict_positivity(&split, PADDING_MARGIN)?;
            let u = block_diag(&[
                &random::unitary(d1, &mut rng),
                &random::unitary(d2, &mut rng),
                &random::unitary(d3, &mut rng),
            ]);
            let rotated = u.adjoint() * padded.entries() * &u;
            PartitionedMatrix::new(dims.dims(), blocklin::symmetrize(&rotated))
        }
    }
}

/// Tolerances and sample times for [`check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub tol: f64,
    pub gap_tol: f64,
    pub t_samples: Vec<f64>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: FLOW_TOL,
            gap_tol: GAP_TOL,
            t_samples: DEFAULT_T_SAMPLES.to_vec(),
        }
    }
}

/// A criterion that either produced a verdict or could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Verdict(T),
    NotApplicable { reason: String },
}

impl<T> Outcome<T> {
    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::NotApplicable {
                reason: e.to_string(),
            },
        }
    }

    pub fn verdict(&self) -> Option<&T> {
        match self {
            Outcome::Verdict(v) => Some(v),
            Outcome::NotApplicable { .. } => None,
        }
    }
}

/// Structural splitting as it appears in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralSummary {
    pub dim_ka: usize,
    pub dim_kb: usize,
    pub commutator_norm: f64,
    /// Row-major `[re, im]` entries of `P`.
    pub projection: Vec<Vec<[f64; 2]>>,
}

impl From<&Splitting> for StructuralSummary {
    fn from(s: &Splitting) -> Self {
        Self {
            dim_ka: s.dim_ka,
            dim_kb: s.dim_kb,
            commutator_norm: s.commutator_norm,
            projection: (0..s.projection.nrows())
                .map(|r| {
                    (0..s.projection.ncols())
                        .map(|c| [s.projection[(r, c)].re, s.projection[(r, c)].im])
                        .collect()
                })
                .collect(),
        }
    }
}

/// Verdicts and numeric evidence of every criterion on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub dims: TripletPartition,
    pub psd: PsdVerdict,
    pub gap: f64,
    pub gap_markov: bool,
    pub flow: Outcome<FlowVerdict>,
    pub bmc2: Outcome<ResidualVerdict>,
    pub felk: Outcome<FelkVerdict>,
    pub structural: Option<StructuralSummary>,
    pub det: Outcome<DetIdentity>,
    pub classical: ClassicalVerdict,
    pub weyl_sign_convention: WeylConvention,
    /// Whether every evaluated decider (gap, flow, structural) returned the same verdict.
    pub criteria_agree: bool,
}

impl MarkovReport {
    pub fn flow_pass(&self) -> Option<bool> {
        self.flow.verdict().map(|v| v.pass)
    }

    pub fn bmc2_pass(&self) -> Option<bool> {
        self.bmc2.verdict().map(|v| v.pass)
    }

    pub fn felk_pass(&self) -> Option<bool> {
        self.felk.verdict().map(|v| v.pass)
    }

    pub fn structural_pass(&self) -> bool {
        self.structural.is_some()
    }
}

/// Runs every criterion on a PSD instance. Criteria needing strict positivity or
/// invertible blocks are marked not applicable instead of failing.
pub fn check(a: &PartitionedMatrix, opts: &CheckOptions) -> Result<MarkovReport> {
    let dims = TripletPartition::of(a)?;
    let psd = blocklin::is_positive_semidefinite(a.entries(), PSD_TOL);
    if !psd.positive {
        return Err(Error::NotPositive {
            min_eigenvalue: psd.min_eigenvalue,
        });
    }
    let gap = entropy_gap(a)?;
    let gap_markov = gap <= opts.gap_tol;
    let flow = Outcome::from_result(flow_check(a, &opts.t_samples, opts.tol));
    let bmc2 = Outcome::from_result(bmc2_check(a, opts.tol));
    let felk = Outcome::from_result(felk_check(a, opts.tol));
    let splitting = structural_detect(a, opts.tol);
    let det = Outcome::from_result(det_identity(a));
    let classical = classical_check(a, opts.tol)?;
    let structural_pass = splitting.is_some();
    let criteria_agree = gap_markov == structural_pass
        && flow
            .verdict()
            .is_none_or(|v| v.pass == structural_pass);
    Ok(MarkovReport {
        dims,
        psd,
        gap,
        gap_markov,
        flow,
        bmc2,
        felk,
        structural: splitting.as_ref().map(StructuralSummary::from),
        det,
        classical,
        weyl_sign_convention: fock::weyl_convention(),
        criteria_agree,
    })
}

/// One named verification with its measured value and pinned threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl NamedCheck {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value > threshold,
        }
    }

    fn flag(name: &str, passed: bool) -> Self {
        Self {
            name: name.into(),
            value: if passed { 1.0 } else { 0.0 },
            threshold: 1.0,
            passed,
        }
    }
}

/// End-to-end evaluation of the counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReproduction {
    pub report: MarkovReport,
    pub checks: Vec<NamedCheck>,
    pub all_passed: bool,
}

pub fn reproduce_counterexample() -> Result<CounterexampleReproduction> {
    let a = counterexample();
    let report = check(&a, &CheckOptions::default())?;
    let felk = felk_check(&a, FLOW_TOL)?;
    let det = det_identity(&a)?;
    let flow = flow_check(&a, &DEFAULT_T_SAMPLES, FLOW_TOL)?;
    let classical = classical_check(&a, FLOW_TOL)?;
    let checks = vec![
        NamedCheck::above("psd: min eigenvalue >= -1e-12", report.psd.min_eigenvalue, -1e-12),
        NamedCheck::at_most("felk residual r1", felk.r1, 1e-10),
        NamedCheck::at_most("felk residual r2", felk.r2, 1e-10),
        NamedCheck::at_most("det identity |lhs - 1|", (det.lhs - 1.0).abs(), 1e-9),
        NamedCheck::at_most("det identity |rhs - 1|", (det.rhs - 1.0).abs(), 1e-9),
        NamedCheck::flag("flow check fails", !flow.pass),
        NamedCheck::above(
            "flow deviation at t = 1",
            flow.deviation_at(1.0).unwrap_or(f64::NAN),
            1e-3,
        ),
        NamedCheck::above("entropy gap (nats)", report.gap, 1e-4),
        NamedCheck::flag("structural detector finds no splitting", report.structural.is_none()),
        NamedCheck::flag("classical check fails", !classical.pass),
    ];
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(CounterexampleReproduction {
        report,
        checks,
        all_passed,
    })
}
