//! Optimum forward linear-prediction filters and the triangular precoding
//! matrix built from them.
//!
//! For a channel with along-row autocorrelation `R[m]`, the order-(i-1)
//! forward prediction filter whitens transmit antenna `i`: the precoding
//! matrix `B = A^T` (with `A` unit-diagonal lower triangular carrying the
//! prediction coefficients in reversed order) turns `H B` into a matrix
//! with uncorrelated columns whose per-dimension variances are the
//! prediction-error variances `sigma2_z[i]`.
//!
//! Coefficient sign convention: the order-`i` residual is
//! `x[n] + sum_j a[i][j] x[n-j]`, so an AR(1) process with pole `rho`
//! yields `a[i][0] = -rho` exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Relative tolerance below which the recursion declares the Toeplitz
/// system degenerate.
const DEGENERACY_TOL: f64 = 1e-12;

/// Forward prediction filters for orders `1..=order`, plus the
/// prediction-error variances for orders `0..=order`.
#[derive(Debug, Clone)]
pub struct Predictor {
    /// Highest filter order computed (`N_t - 1` for an `N_t`-antenna link).
    pub order: usize,
    /// `coeffs[i-1]` holds the order-`i` filter `[a_{i,1}, ..., a_{i,i}]`.
    pub coeffs: Vec<Vec<f64>>,
    /// `error_vars[i]` is the minimum prediction-error variance of the
    /// order-`i` filter; `error_vars[0]` is the process variance `R[0]`.
    pub error_vars: Vec<f64>,
}

impl Predictor {
    /// Prediction-error variance `sigma2_z[i]` of the `(i-1)`-order filter,
    /// 1-based as the antennas are.
    #[inline]
    pub fn sigma2_z(&self, i: usize) -> f64 {
        self.error_vars[i - 1]
    }

    /// All `N_t = order + 1` per-antenna error variances, in antenna order.
    pub fn sigma2_z_all(&self) -> &[f64] {
        &self.error_vars
    }
}

/// The AR(1) autocorrelation sequence `R[m] = rho^m sigma2_h`, `m < n`.
pub fn autocorrelation_sequence(rho: f64, sigma2_h: f64, n: usize) -> Vec<f64> {
    (0..n).map(|m| rho.powi(m as i32) * sigma2_h).collect()
}

/// Solves the forward-prediction normal equations order-recursively.
///
/// `r` must start with the zero-lag value; the filter order reached is
/// `r.len() - 1`. Fails with [`Error::NumericalDegeneracy`] when an error
/// variance falls below `1e-12 * r[0]`, which catches non-positive-definite
/// input (including `rho -> 1` pathologies).
pub fn levinson_durbin(r: &[f64]) -> Result<Predictor> {
    if r.is_empty() || r[0] <= 0.0 {
        return Err(Error::InvalidArgument(
            "autocorrelation must start with a positive zero-lag value".into(),
        ));
    }
    let order = r.len() - 1;
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(order);
    let mut error_vars = Vec::with_capacity(order + 1);
    error_vars.push(r[0]);

    let mut a: Vec<f64> = Vec::new();
    let mut e = r[0];
    for m in 1..=order {
        let mut acc = r[m];
        for (j, &aj) in a.iter().enumerate() {
            acc += aj * r[m - 1 - j];
        }
        let k = -acc / e;
        let mut next = Vec::with_capacity(m);
        for j in 0..m - 1 {
            next.push(a[j] + k * a[m - 2 - j]);
        }
        next.push(k);
        e *= 1.0 - k * k;
        if !(e > DEGENERACY_TOL * r[0]) {
            return Err(Error::NumericalDegeneracy { order: m, value: e });
        }
        a = next;
        coeffs.push(a.clone());
        error_vars.push(e);
    }

    debug_assert!(error_vars.windows(2).all(|w| w[1] <= w[0] + 1e-12 * r[0]));
    Ok(Predictor {
        order,
        coeffs,
        error_vars,
    })
}

/// Assembles the precoding matrix `B = A^T` for `N_t = predictor.order + 1`
/// antennas: row `i` of `A` (1-based, `i >= 2`) is
/// `[a_{i-1,i-1}, ..., a_{i-1,1}, 1, 0, ...]`, so `B` is unit-diagonal
/// upper triangular with determinant 1.
pub fn build_precoding_matrix(p: &Predictor) -> DMatrix<Complex64> {
    let n_t = p.order + 1;
    let mut b = DMatrix::from_element(n_t, n_t, Complex64::new(0.0, 0.0));
    for i in 0..n_t {
        b[(i, i)] = Complex64::new(1.0, 0.0);
        // A[i][j] = a_{i, i-j} for j < i; transposed into B[j][i].
        for j in 0..i {
            b[(j, i)] = Complex64::new(p.coeffs[i - 1][i - j - 1], 0.0);
        }
    }
    b
}
