//! Evaluators for the dimension bound, its asymptotic constant, the
//! curve-constant estimate of the comb family, and the sharpness calculus
//! around the auxiliary function `f_p`.
//!
//! All logarithms are natural. The combination `log 2 / log lambda` is
//! base-invariant; the sharpness coefficient `M2 / (4c) = 2 / log 2` is fixed
//! by cancellation, so the `f_p` checks do not depend on `c`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::curve::{admissibility_threshold, Exponent};
use crate::error::{Error, Result};

/// Evaluation of the dimension bound `2 - p + log2(1 - (2^(p-1)-1) / (2^(5-2p) C))`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: f64,
    pub big_c: f64,
    /// Right-hand side of the bound.
    pub rhs: f64,
    /// `C * (2 - p - rhs)`, the scaled gap that converges to [`m1_floor`].
    pub scaled_gap: f64,
    /// The log argument stayed positive (guaranteed for `C >= 1`).
    pub admissible: bool,
}

/// Dimension bound right-hand side for curve constant `big_c >= 1`.
pub fn main_bound(p: Exponent, big_c: f64) -> Result<BoundReport> {
    if !(big_c >= 1.0) || !big_c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "curve constant C must be >= 1, got {big_c}"
        )));
    }
    let pv = p.value();
    let arg = 1.0 - (2.0f64.powf(pv - 1.0) - 1.0) / (2.0f64.powf(5.0 - 2.0 * pv) * big_c);
    debug_assert!(arg > 0.0, "log argument must stay positive for C >= 1");
    let rhs = 2.0 - pv + arg.log2();
    Ok(BoundReport {
        p: pv,
        big_c,
        rhs,
        scaled_gap: big_c * (2.0 - pv - rhs),
        admissible: arg > 0.0,
    })
}

/// Asymptotic floor of `C * (2 - p - main_bound(p, C))` as `C` grows:
/// `(2^(p-1) - 1) * 2^(2p-5) / ln 2`.
pub fn m1_floor(p: Exponent) -> f64 {
    let pv = p.value();
    (2.0f64.powf(pv - 1.0) - 1.0) * 2.0f64.powf(2.0 * pv - 5.0) / LN_2
}

/// Curve-constant estimate of the comb family:
/// `c / ((2-p) lambda^(2-p) (1 - 2 lambda^(2-p)))`, valid while
/// `2 lambda^(2-p) < 1`.
pub fn lemma41_bound(p: Exponent, lambda: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "absolute constant c must be positive, got {c}"
        )));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in (0, 1), got {lambda}"
        )));
    }
    let q = 2.0 - p.value();
    let u = lambda.powf(q);
    if 2.0 * u >= 1.0 {
        return Err(Error::Inadmissible {
            lambda,
            p: p.value(),
            value: 2.0 * u,
            threshold: admissibility_threshold(lambda),
        });
    }
    Ok(c / (q * u * (1.0 - 2.0 * u)))
}

/// Coefficient `M2 / (4c)` of the middle term of `f_p`.
pub const F_COEFF: f64 = 2.0 / LN_2;

/// `f_p(lambda)` with an explicit middle-term coefficient (the default is
/// [`F_COEFF`]; other values exist for perturbation controls).
pub fn f_p_eval_with_coeff(lambda: f64, p: Exponent, coeff: f64) -> f64 {
    let q = 2.0 - p.value();
    q - coeff * q * (1.0 - 2.0 * lambda.powf(q)) + LN_2 / lambda.ln()
}

/// The sharpness auxiliary function
/// `f_p(lambda) = 2-p - (2/ln 2)(2-p)(1 - 2 lambda^(2-p)) + ln 2 / ln lambda`.
pub fn f_p_eval(lambda: f64, p: Exponent) -> f64 {
    f_p_eval_with_coeff(lambda, p, F_COEFF)
}

/// Threshold constant `C(p) = c / ((2-p) 2^(p-3) (1 - 2^(p-2)))`; equals
/// [`lemma41_bound`] at the left end of the sharpness interval.
pub fn c_threshold(p: Exponent, c: f64) -> f64 {
    let pv = p.value();
    c / ((2.0 - pv) * 2.0f64.powf(pv - 3.0) * (1.0 - 2.0f64.powf(pv - 2.0)))
}

/// Endpoints of the ratio interval used by the sharpness construction:
/// `[2^(1/(p-2)) / 2, 2^(1/(p-2)))`.
pub fn sharpness_interval(p: Exponent) -> (f64, f64) {
    let star = 2.0f64.powf(1.0 / (p.value() - 2.0));
    (0.5 * star, star)
}

/// Solves `lemma41_bound(p, lambda, c) = big_c` for `lambda` in the sharpness
/// interval by bisection. On that interval `u = lambda^(2-p)` exceeds `1/4`,
/// so `u (1 - 2u)` is strictly decreasing and the constant is strictly
/// increasing in `lambda`; the root is unique.
pub fn lambda_for_c(p: Exponent, big_c: f64, c: f64) -> Result<f64> {
    let threshold = c_threshold(p, c);
    if !(big_c >= threshold) {
        return Err(Error::BelowThreshold {
            requested: big_c,
            c_min: threshold,
        });
    }
    let (left, star) = sharpness_interval(p);
    let q = 2.0 - p.value();
    // increasing in lambda: bound(lambda) - big_c changes sign on [left, star)
    let g = |lambda: f64| c / (q * lambda.powf(q) * (1.0 - 2.0 * lambda.powf(q))) - big_c;
    let mut lo = left;
    let mut hi = star * (1.0 - 1e-16);
    if g(lo) > 0.0 {
        // big_c == threshold up to rounding
        return Ok(left);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let residual = (lemma41_bound(p, root, c)? - big_c).abs() / big_c;
    if residual > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "bisection residual {residual:.3e} exceeds 1e-10 for C = {big_c}"
        )));
    }
    Ok(root)
}

/// One row of the dimension-inequality sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DimCheckRow {
    pub big_c: f64,
    pub lambda_c: f64,
    pub exact_dim: f64,
    pub target: f64,
    pub margin: f64,
}

/// Outcome of the sharpness verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub p: f64,
    pub c: f64,
    pub coeff: f64,
    pub threshold: f64,
    pub interval: (f64, f64),
    pub grid_size: usize,
    /// max of `f_p` over the grid (check (a): must be <= 1e-12).
    pub max_f: f64,
    /// `f_p` at the right endpoint (check (b): zero to 1e-12).
    pub endpoint_f: f64,
    /// min finite-difference derivative over the grid (check (c): >= -1e-9).
    pub min_fd: f64,
    /// dimension inequality rows over a C-grid (check (d): margins >= 0).
    pub dim_rows: Vec<DimCheckRow>,
    pub pass_nonpositive: bool,
    pub pass_endpoint: bool,
    pub pass_monotone: bool,
    pub pass_dimension: bool,
}

impl SharpnessReport {
    pub fn all_passed(&self) -> bool {
        self.pass_nonpositive && self.pass_endpoint && self.pass_monotone && self.pass_dimension
    }
}

/// Verifies the sharpness calculus on finite grids with an explicit
/// middle-term coefficient (used by perturbation controls).
pub fn verify_sharpness_with_coeff(
    p: Exponent,
    c: f64,
    grid_size: usize,
    coeff: f64,
) -> Result<SharpnessReport> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter("grid_size must be >= 2".into()));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter("c must be positive".into()));
    }
    let (left, star) = sharpness_interval(p);
    let step = (star - left) / grid_size as f64;
    let mut max_f = f64::NEG_INFINITY;
    let mut min_fd = f64::INFINITY;
    for k in 0..grid_size {
        let lam = left + k as f64 * step;
        max_f = max_f.max(f_p_eval_with_coeff(lam, p, coeff));
        let h = lam * 1e-6;
        let fd = (f_p_eval_with_coeff(lam + h, p, coeff)
            - f_p_eval_with_coeff(lam - h, p, coeff))
            / (2.0 * h);
        min_fd = min_fd.min(fd);
    }
    let endpoint_f = f_p_eval_with_coeff(star, p, coeff);

    // Dimension inequality over a doubling C-grid from the threshold,
    // with M2 = 4 c coeff (equal to 8c/ln2 at the default coefficient).
    let m2 = 4.0 * c * coeff;
    let threshold = c_threshold(p, c);
    let mut dim_rows = Vec::new();
    for k in 0..=10u32 {
        let big_c = threshold * 2.0f64.powi(k as i32);
        let lambda_c = lambda_for_c(p, big_c, c)?;
        let exact_dim = LN_2 / -lambda_c.ln();
        let target = 2.0 - p.value() - m2 / big_c;
        dim_rows.push(DimCheckRow {
            big_c,
            lambda_c,
            exact_dim,
            target,
            margin: exact_dim - target,
        });
    }
    Ok(SharpnessReport {
        p: p.value(),
        c,
        coeff,
        threshold,
        interval: (left, star),
        grid_size,
        max_f,
        endpoint_f,
        min_fd,
        pass_nonpositive: max_f <= 1e-12,
        pass_endpoint: endpoint_f.abs() <= 1e-12,
        pass_monotone: min_fd >= -1e-9,
        pass_dimension: dim_rows.iter().all(|r| r.margin >= 0.0),
        dim_rows,
    })
}

/// Verifies the sharpness calculus at the canonical coefficient.
pub fn verify_sharpness(p: Exponent, c: f64, grid_size: usize) -> Result<SharpnessReport> {
    verify_sharpness_with_coeff(p, c, grid_size, F_COEFF)
}
