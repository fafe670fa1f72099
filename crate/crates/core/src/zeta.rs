//! Walk-type zeta functions on finite tori, the logarithmic zeta function of
//! the infinite torus, and the trace moments `C_r`.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quadrature::{grid_fold, grid_map, refine, QuadratureSpec};
use crate::walk::{
    char_det_unchecked, momentum_matrix_unchecked, CoinFamily, CoinMatrix, ShiftType, TorusSpec,
    WalkClass,
};
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest `r` accepted by the series and table routines.
pub const R_MAX_CAP: usize = 200;

/// Margin kept from the endpoint of the M-type quantum walk `u`-range.
pub const RANGE_MARGIN: f64 = 1e-14;

/// Below this modulus a grid determinant is treated as a pole.
const POLE_TOL: f64 = 1e-13;

/// A determinant counts as real when its imaginary part is below this,
/// relative to its modulus.
const REAL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaResult {
    pub value: Complex64,
    pub u: f64,
    /// `None` for the infinite torus.
    pub torus: Option<TorusSpec>,
    pub nodes: usize,
    /// |difference| between the last two refinement levels (0 for exact sums).
    pub err: f64,
}

fn check_dims(coin: &CoinMatrix, torus: &TorusSpec) -> Result<()> {
    if coin.d() != torus.d {
        return Err(Error::Dimension(format!(
            "coin has d = {}, torus has d = {}",
            coin.d(),
            torus.d
        )));
    }
    Ok(())
}

fn check_quadrature_dim(coin: &CoinMatrix) -> Result<()> {
    if coin.d() > 3 {
        return Err(Error::Unsupported(format!(
            "torus quadrature is limited to d <= 3 (d = {})",
            coin.d()
        )));
    }
    Ok(())
}

/// Lower endpoint `cos ξ - sqrt(cos² ξ + 1)` of the M-type quantum walk range.
pub fn qw_m_lower_endpoint(xi: f64) -> f64 {
    let c = xi.cos();
    c - (c * c + 1.0).sqrt()
}

/// The open `u`-interval on which the logarithmic zeta function of `coin`
/// is stated, if the coin belongs to a family with a known range.
pub fn admissible_u_range(coin: &CoinMatrix) -> Option<(f64, f64)> {
    match (coin.family(), coin.class()) {
        (Some(CoinFamily::Qw { xi }), _) => match coin.shift() {
            ShiftType::M => Some((qw_m_lower_endpoint(xi), 0.0)),
            ShiftType::F => Some((f64::NEG_INFINITY, 0.0)),
        },
        (_, WalkClass::RW) => Some((-1.0, 1.0)),
        _ => None,
    }
}

/// Rejects `u` outside the admissible range of the coin's family.
pub fn check_u_range(coin: &CoinMatrix, u: f64) -> Result<()> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("u = {u} is not finite")));
    }
    let Some((lo, hi)) = admissible_u_range(coin) else {
        return Ok(());
    };
    let lo_m = if lo.is_finite() { lo + RANGE_MARGIN } else { lo };
    if u > lo_m && u < hi {
        return Ok(());
    }
    let model = match (coin.family(), coin.shift()) {
        (Some(CoinFamily::Qw { xi }), ShiftType::M) => {
            format!("M-type QW (xi = {xi}) requires u in (cos xi - sqrt(cos^2 xi + 1), 0) = ({lo}, 0)")
        }
        (Some(CoinFamily::Qw { .. }), ShiftType::F) => "F-type QW requires u < 0".to_string(),
        _ => "RW requires -1 < u < 1".to_string(),
    };
    Err(Error::Domain(format!("u = {u} outside range: {model}")))
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= REAL_TOL * z.norm().max(1.0)
}

/// `det(I - u M_A)^{-1/N^d}` computed through the momentum decomposition.
///
/// When every grid determinant is real and positive the real logarithm is
/// used; otherwise the principal complex logarithm, so that raising the result
/// to the power `-N^d` reproduces the full determinant exactly.
pub fn finite_zeta(coin: &CoinMatrix, torus: &TorusSpec, u: f64) -> Result<ZetaResult> {
    check_dims(coin, torus)?;
    let sites = torus.num_sites();
    if u == 0.0 {
        return Ok(ZetaResult {
            value: Complex64::new(1.0, 0.0),
            u,
            torus: Some(*torus),
            nodes: sites,
            err: 0.0,
        });
    }
    let dets = grid_map(torus.d, torus.n, |_, k| char_det_unchecked(coin, k, u));
    if let Some(flat) = dets.iter().position(|z| z.norm() < POLE_TOL) {
        return Err(Error::Pole {
            k: torus.index(flat),
        });
    }
    let sum: Complex64 = if dets.iter().all(|z| is_real(*z) && z.re > 0.0) {
        Complex64::new(dets.iter().map(|z| z.re.ln()).sum(), 0.0)
    } else {
        dets.iter().map(|z| z.ln()).sum()
    };
    Ok(ZetaResult {
        value: (-sum / sites as f64).exp(),
        u,
        torus: Some(*torus),
        nodes: sites,
        err: 0.0,
    })
}

/// Mean of log det over one trapezoidal grid, with the branch rules applied.
fn log_det_mean(coin: &CoinMatrix, u: f64, n: usize) -> Result<Complex64> {
    let d = coin.d();
    let dets = grid_map(d, n, |_, k| char_det_unchecked(coin, k, u));
    let total = dets.len() as f64;
    if dets.iter().all(|z| is_real(*z)) {
        if let Some(flat) = dets.iter().position(|z| z.re <= 0.0) {
            let mut th = vec![0.0; d];
            crate::quadrature::node_angles(flat, n, &mut th);
            return Err(Error::Domain(format!(
                "det(I - uM) = {:.3e} <= 0 at theta = {th:?}; u = {u} is outside the range where the integrand is positive",
                dets[flat].re
            )));
        }
        let s: f64 = dets.iter().map(|z| z.re.ln()).sum();
        return Ok(Complex64::new(s / total, 0.0));
    }
    if let Some(flat) = dets.iter().position(|z| z.norm() < POLE_TOL) {
        return Err(Error::Domain(format!(
            "det(I - uM) vanishes at node {flat}; u = {u} is outside the convergence range"
        )));
    }
    // adjacent nodes must not straddle the branch cut of the principal log
    let stride: Vec<usize> = (0..d).map(|a| n.pow((d - 1 - a) as u32)).collect();
    for (flat, z) in dets.iter().enumerate() {
        for (a, &s) in stride.iter().enumerate() {
            let pos = (flat / s) % n;
            let nb = if pos + 1 == n { flat + s - n * s } else { flat + s };
            let jump = (z.arg() - dets[nb].arg()).abs();
            if jump > PI {
                return Err(Error::Domain(format!(
                    "phase of det(I - uM) jumps by {jump:.3} across axis {a}; u = {u} is outside the range where the logarithm is continuous"
                )));
            }
        }
    }
    let s: Complex64 = dets.iter().map(|z| z.ln()).sum();
    Ok(s / total)
}

/// The logarithmic zeta function `L(A, T^d_∞, u)`: the torus average of
/// `log det(I - u M(θ))`, refined by doubling until stable.
pub fn log_zeta(coin: &CoinMatrix, u: f64, quad: &QuadratureSpec) -> Result<ZetaResult> {
    check_quadrature_dim(coin)?;
    if u == 0.0 {
        return Ok(ZetaResult {
            value: Complex64::zero(),
            u,
            torus: None,
            nodes: 0,
            err: 0.0,
        });
    }
    check_u_range(coin, u)?;
    let r = refine(
        coin.d(),
        quad,
        2,
        |n| log_det_mean(coin, u, n),
        |a, b| (a - b).norm(),
    )?;
    Ok(ZetaResult {
        value: r.value,
        u,
        torus: None,
        nodes: r.nodes,
        err: r.delta,
    })
}

fn check_r(r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::Domain("r must be >= 1".into()));
    }
    if r > R_MAX_CAP {
        return Err(Error::CapExceeded {
            requested: r,
            cap: R_MAX_CAP,
        });
    }
    Ok(())
}

/// Accumulates `Tr(M(k)^r)` for `r = 1..=r_max` into `acc`.
fn add_traces(coin: &CoinMatrix, k: &[f64], acc: &mut [Complex64]) {
    let m = momentum_matrix_unchecked(coin, k);
    let mut p: CMatrix = m.clone();
    acc[0] += p.trace();
    for slot in acc.iter_mut().skip(1) {
        p = p.mul(&m);
        *slot += p.trace();
    }
}

fn trace_moments(coin: &CoinMatrix, r_max: usize, n: usize) -> Vec<Complex64> {
    let d = coin.d();
    let total = n.pow(d as u32) as f64;
    let sums = grid_fold(
        d,
        n,
        || vec![Complex64::zero(); r_max],
        |mut acc, k| {
            add_traces(coin, k, &mut acc);
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    sums.into_iter().map(|s| s / total).collect()
}

/// `C_r(A, T^d_N) = N^{-d} Σ_k Tr(M(k)^r)`.
pub fn c_r_finite(coin: &CoinMatrix, torus: &TorusSpec, r: usize) -> Result<Complex64> {
    check_dims(coin, torus)?;
    check_r(r)?;
    Ok(trace_moments(coin, r, torus.n)[r - 1])
}

/// `C_r(A, T^d_∞)`: quadrature of `Tr(M(θ)^r)`; exact once the grid has more
/// than `r` nodes per axis.
pub fn c_r_limit(coin: &CoinMatrix, r: usize, quad: &QuadratureSpec) -> Result<Complex64> {
    Ok(c_r_limit_all(coin, r, quad)?[r - 1])
}

/// `C_1, ..., C_{r_max}` on the infinite torus from a single grid sweep.
pub fn c_r_limit_all(
    coin: &CoinMatrix,
    r_max: usize,
    quad: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    check_quadrature_dim(coin)?;
    check_r(r_max)?;
    let out = refine(
        coin.d(),
        quad,
        r_max + 1,
        |n| Ok(trace_moments(coin, r_max, n)),
        |a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
        },
    )?;
    Ok(out.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: Complex64,
    /// |C_{r_max} u^{r_max} / r_max|, the size of the last term kept.
    pub last_term: f64,
    pub r_max: usize,
}

/// Partial sum `-Σ_{r <= r_max} C_r u^r / r` of the logarithmic zeta series.
pub fn series_log_zeta(
    coin: &CoinMatrix,
    u: f64,
    r_max: usize,
    quad: &QuadratureSpec,
) -> Result<SeriesResult> {
    check_r(r_max)?;
    if u == 0.0 {
        return Ok(SeriesResult {
            value: Complex64::zero(),
            last_term: 0.0,
            r_max,
        });
    }
    let cs = c_r_limit_all(coin, r_max, quad)?;
    let mut value = Complex64::zero();
    let mut upow = 1.0;
    let mut last_term = 0.0;
    for (i, c) in cs.iter().enumerate() {
        let r = (i + 1) as f64;
        upow *= u;
        let term = c * upow / r;
        value -= term;
        last_term = term.norm();
    }
    Ok(SeriesResult {
        value,
        last_term,
        r_max,
    })
}
