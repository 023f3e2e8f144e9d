//! Hermite and Laguerre special functions and the closed-form Weyl matrix elements
//! `⟨φ_m, W(z) φ_n⟩` in the Hermite-function basis.

use std::sync::OnceLock;

use crate::{Error, Result, C64};

/// Largest polynomial degree accepted by the evaluators.
pub const MAX_DEGREE: usize = 200;
/// Largest index accepted by [`weyl_matrix_element`].
pub const MAX_WEYL_INDEX: usize = 100;
/// Upper end of the log-factorial table.
pub const LOG_FACTORIAL_TABLE: usize = 300;
/// Degrees up to this value use the explicit finite sum for Laguerre polynomials.
const LAGUERRE_SUM_LIMIT: usize = 20;

fn log_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LOG_FACTORIAL_TABLE + 1);
        t.push(0.0);
        for k in 1..=LOG_FACTORIAL_TABLE {
            t.push(t[k - 1] + (k as f64).ln());
        }
        t
    })
}

/// `ln n!` for `n ≤ 300`.
pub fn ln_factorial(n: usize) -> f64 {
    log_factorials()[n]
}

fn check_degree(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::DegreeTooLarge { degree: n, max })
    } else {
        Ok(())
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recursion
/// `H_{n+1} = 2x H_n − 2n H_{n−1}`.
pub fn hermite_poly(n: usize, x: f64) -> Result<f64> {
    check_degree(n, MAX_DEGREE)?;
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Hermite function `φ_n(x) = e^{−x²/2} H_n(x) / √(2ⁿ n! √π)`.
///
/// Evaluated with the normalized recursion
/// `φ_{n+1} = √(2/(n+1)) x φ_n − √(n/(n+1)) φ_{n−1}`, which never forms `H_n` or `n!`.
pub fn hermite_function(n: usize, x: f64) -> Result<f64> {
    check_degree(n, MAX_DEGREE)?;
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Associated Laguerre polynomial `L_n^α(x)` for integer `α ≥ 0`.
pub fn laguerre_assoc(n: usize, alpha: u32, x: f64) -> Result<f64> {
    check_degree(n, MAX_DEGREE)?;
    if n <= LAGUERRE_SUM_LIMIT && x.abs() <= 1.0 {
        Ok(laguerre_sum(n, alpha, x))
    } else {
        Ok(laguerre_recursion(n, alpha, x))
    }
}

/// `Σ_k (−1)^k (n+α)! / (k! (n−k)! (α+k)!) x^k`, coefficients built by ratio so that no
/// factorial is formed.
pub(crate) fn laguerre_sum(n: usize, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    // k = 0 coefficient: C(n+α, n)
    let mut coeff = 1.0;
    for j in 1..=n {
        coeff *= (a + j as f64) / j as f64;
    }
    let mut sum = coeff;
    for k in 0..n {
        let kf = k as f64;
        coeff *= -x * (n as f64 - kf) / ((kf + 1.0) * (a + kf + 1.0));
        sum += coeff;
    }
    sum
}

/// `(k+1) L_{k+1} = (2k+1+α−x) L_k − (k+α) L_{k−1}`.
pub(crate) fn laguerre_recursion(n: usize, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `⟨φ_m, W(z) φ_n⟩` with `W(z) = exp(z a − z̄ a⁺)`.
///
/// For `n ≥ m` this is `e^{−|z|²/2} √(m!/n!) z^{n−m} L_m^{n−m}(|z|²)`; the case `m > n`
/// follows from `⟨φ_m, W(z) φ_n⟩ = conj ⟨φ_n, W(−z) φ_m⟩`.
pub fn weyl_matrix_element(m: usize, n: usize, z: C64) -> Result<C64> {
    check_degree(m.max(n), MAX_WEYL_INDEX)?;
    if m > n {
        return Ok(lower_triangle_element(n, m, -z).conj());
    }
    Ok(lower_triangle_element(m, n, z))
}

fn lower_triangle_element(m: usize, n: usize, z: C64) -> C64 {
    let r2 = z.norm_sqr();
    let k = n - m;
    let laguerre = laguerre_assoc(m, k as u32, r2).expect("degree checked by caller");
    let ratio = (0.5 * (ln_factorial(m) - ln_factorial(n))).exp();
    z.powu(k as u32) * (ratio * (-0.5 * r2).exp() * laguerre)
}

/// Coefficients `zⁿ/√(n!)` of the exponential vector `e(z)` for `n = 0..=cutoff`.
pub fn exponential_vector_coeffs(z: C64, cutoff: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new(1.0, 0.0);
    out.push(c);
    for n in 1..=cutoff {
        c = c * z / (n as f64).sqrt();
        out.push(c);
    }
    out
}
