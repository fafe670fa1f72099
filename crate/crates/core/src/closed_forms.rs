//! Closed-form values of the logarithmic zeta functions and trace moments for
//! the one-dimensional quantum walks and the simple random walks in d = 1, 2.
//!
//! These are evaluated independently of the quadrature code in [`crate::zeta`]
//! and serve as oracles for it.

use crate::error::{Error, Result};
use crate::walk::ShiftType;
use crate::zeta::{qw_m_lower_endpoint, RANGE_MARGIN};
use num_rational::Ratio;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Agreement required between the two algebraic forms of a closed formula.
pub const FORM_AGREEMENT_TOL: f64 = 1e-12;

/// `₂F₁(1-l, 1-l; 2; x)`, a polynomial of degree `l - 1` in `x`.
pub fn hyp2f1_terminating(l: u32, x: f64) -> f64 {
    assert!(l >= 1, "hyp2f1_terminating needs l >= 1");
    let a = 1.0 - l as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 0..(l - 1) {
        let m = m as f64;
        term *= (a + m) * (a + m) / ((2.0 + m) * (m + 1.0)) * x;
        sum += term;
    }
    sum
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_open_quarter(xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi < FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "xi = {xi} must lie in (0, pi/2) for the quantum walk closed forms"
        )));
    }
    Ok(())
}

/// `Σ_{m=1}^{l} binom(l-1, m-1)² y^m / m` together with the sum of the
/// absolute values of its terms.
fn binomial_square_sum(l: u32, y: f64) -> (f64, f64) {
    let mut s = 0.0;
    let mut abs = 0.0;
    let mut ypow = 1.0;
    for m in 1..=l {
        ypow *= y;
        let b = binomial(l - 1, m - 1);
        let t = b * b * ypow / m as f64;
        s += t;
        abs += t.abs();
    }
    (s, abs)
}

/// `C_{2l}` of the two-state quantum walk with angle `xi`.
///
/// Both the finite binomial sum and the `₂F₁` form are evaluated; they must
/// agree to [`FORM_AGREEMENT_TOL`] relative to the size of the summands.
pub fn qw_c2l(xi: f64, l: u32, shift: ShiftType) -> Result<f64> {
    check_open_quarter(xi)?;
    if l == 0 {
        return Err(Error::Domain("l must be >= 1".into()));
    }
    let (s, c) = xi.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let two_l = 2.0 * l as f64;
    let li = l as i32;
    let (finite, scale, hyp) = match shift {
        ShiftType::M => {
            let t2 = s2 / c2;
            let pre = two_l * (-c2).powi(li);
            let (sum, abs) = binomial_square_sum(l, -t2);
            let hyp = two_l * (-c2).powi(li - 1) * s2 * hyp2f1_terminating(l, -t2);
            (pre * sum, pre.abs() * abs, hyp)
        }
        ShiftType::F => {
            let ct2 = c2 / s2;
            let pre = two_l * s.powi(2 * li);
            let (sum, abs) = binomial_square_sum(l, -ct2);
            let hyp = two_l * s.powi(2 * (li - 1)) * (-c2) * hyp2f1_terminating(l, -ct2);
            (pre * sum, pre.abs() * abs, hyp)
        }
    };
    let gap = (finite - hyp).abs();
    if gap > FORM_AGREEMENT_TOL * scale.max(1.0) {
        return Err(Error::accuracy(
            format!("C_2l sum and 2F1 forms disagree by {gap:e} (xi = {xi}, l = {l})"),
            0,
            gap,
        ));
    }
    Ok(finite)
}

/// Logarithmic zeta function of the two-state quantum walk in closed form.
pub fn qw_log_zeta_closed(xi: f64, u: f64, shift: ShiftType) -> Result<f64> {
    check_open_quarter(xi)?;
    let ok = match shift {
        ShiftType::M => u > qw_m_lower_endpoint(xi) + RANGE_MARGIN && u < 0.0,
        ShiftType::F => u < 0.0,
    };
    if !ok {
        let range = match shift {
            ShiftType::M => format!(
                "u in (cos xi - sqrt(cos^2 xi + 1), 0) = ({}, 0)",
                qw_m_lower_endpoint(xi)
            ),
            ShiftType::F => "u in (-inf, 0)".to_string(),
        };
        return Err(Error::Domain(format!(
            "u = {u} outside the closed-form range for {shift:?}-type: xi in (0, pi/2), {range}"
        )));
    }
    let u2 = u * u;
    let root = (1.0 + 2.0 * (2.0 * xi).cos() * u2 + u2 * u2).sqrt();
    let lead = match shift {
        ShiftType::M => 1.0 - u2,
        ShiftType::F => 1.0 + u2,
    };
    Ok(((lead + root) / 2.0).ln())
}

/// `B_{2n} = binom(2n, n) / 4^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentralBinomial {
    /// Exact value for `n <= 32`.
    #[serde(skip)]
    pub exact: Option<Ratio<i128>>,
    pub value: f64,
}

/// Largest `n` for which [`b2n`] returns an exact rational.
pub const B2N_EXACT_MAX: u32 = 32;

pub fn b2n(n: u32) -> CentralBinomial {
    if n <= B2N_EXACT_MAX {
        let mut num: i128 = 1;
        for i in 0..n as i128 {
            // binom(2n, n) built incrementally stays integral at every step
            num = num * (2 * n as i128 - i) / (i + 1);
        }
        let r = Ratio::new(num, 1i128 << (2 * n));
        let value = *r.numer() as f64 / *r.denom() as f64;
        CentralBinomial {
            exact: Some(r),
            value,
        }
    } else {
        let mut v = b2n(B2N_EXACT_MAX).value;
        for k in (B2N_EXACT_MAX + 1)..=n {
            v *= (2 * k - 1) as f64 / (2 * k) as f64;
        }
        CentralBinomial {
            exact: None,
            value: v,
        }
    }
}

/// Random walk logarithmic zeta function from its closed forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RwClosedForm {
    pub d: usize,
    pub u: f64,
    /// Returned value: the log form for d = 1, the `B_{2n}²` series for d = 2.
    pub value: f64,
    /// `-Σ_{n<=n_max} B_{2n}^k u^{2n} / 2n` (k = d).
    pub series: f64,
    /// Second form: the log form (d = 1) or the `₄F₃` series (d = 2).
    pub alternative: f64,
    /// Upper bound on the dropped tail of the series.
    pub truncation_bound: f64,
    /// Magnitude of the last series term kept.
    pub last_term: f64,
    /// True for `u in [0, 1)`, where the formulas are used beyond the
    /// negative half-interval on which they were originally stated.
    pub outside_stated_domain: bool,
}

pub fn rw_log_zeta_closed(d: usize, u: f64, n_max: u32) -> Result<RwClosedForm> {
    if !(u.abs() < 1.0) {
        return Err(Error::Domain(format!("|u| = {} must be < 1", u.abs())));
    }
    if d != 1 && d != 2 {
        return Err(Error::Unsupported(format!(
            "random walk closed forms exist for d = 1, 2 (got {d})"
        )));
    }
    if n_max == 0 {
        return Err(Error::Domain("n_max must be >= 1".into()));
    }
    let u2 = u * u;
    let power = d as i32;
    let mut series = 0.0;
    let mut u2n = 1.0;
    let mut last_term = 0.0;
    for n in 1..=n_max {
        u2n *= u2;
        let t = b2n(n).value.powi(power) * u2n / (2 * n) as f64;
        series -= t;
        last_term = t;
    }
    // terms decrease at least geometrically with ratio u²
    let next = b2n(n_max + 1).value.powi(power) * u2n * u2 / (2 * (n_max + 1)) as f64;
    let truncation_bound = next / (1.0 - u2);

    let (value, alternative) = if d == 1 {
        let closed = ((1.0 + (1.0 - u2).sqrt()) / 2.0).ln();
        let gap = (closed - series).abs();
        if gap > truncation_bound + 1e-13 {
            return Err(Error::accuracy(
                format!("B_2n series misses the closed form by {gap:e} (bound {truncation_bound:e})"),
                n_max as usize,
                gap,
            ));
        }
        (closed, closed)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 0..(n_max - 1) {
            let m = m as f64;
            let a = 1.5 + m;
            let b = 1.0 + m;
            let c = 2.0 + m;
            term *= a * a * b * b / (c * c * c * (m + 1.0)) * u2;
            sum += term;
        }
        let hyp = -(u2 / 8.0) * sum;
        let gap = (hyp - series).abs();
        if gap > FORM_AGREEMENT_TOL * series.abs().max(1e-300) + 1e-15 {
            return Err(Error::accuracy(
                format!("(B_2n)^2 series and 4F3 form disagree by {gap:e}"),
                n_max as usize,
                gap,
            ));
        }
        (series, hyp)
    };
    Ok(RwClosedForm {
        d,
        u,
        value,
        series,
        alternative,
        truncation_bound,
        last_term,
        outside_stated_domain: u >= 0.0,
    })
}

/// `½ log((a + sqrt(a² - b²)) / 2)` with `a = 1 - 2 sin²ξ u² + u⁴` and
/// `b = 2 cos²ξ u²`: the Ronkin function of the M-type quantum walk
/// polynomial at the origin.
pub fn qw_ronkin_closed(xi: f64, u: f64) -> Result<f64> {
    if !(u.abs() < 1.0) {
        return Err(Error::Domain(format!("|u| = {} must be < 1", u.abs())));
    }
    let (s, c) = xi.sin_cos();
    let u2 = u * u;
    let a = 1.0 - 2.0 * s * s * u2 + u2 * u2;
    let b = 2.0 * c * c * u2;
    Ok(0.5 * ((a + (a * a - b * b).sqrt()) / 2.0).ln())
}
