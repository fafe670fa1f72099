//! Ronkin functions `R(x) = (2π)^{-k} ∫ log|P(e^{x+iθ})| dθ` of Laurent
//! polynomials, the polynomial families attached to the walks, and the check
//! that the logarithmic zeta function equals `R(0, ..., 0)`.
//!
//! The primary evaluator integrates one variable exactly by Jensen's formula
//! (the polynomial is at most quadratic in that variable for every family
//! used here) and the remaining ones numerically. Inside the amoeba the
//! remaining integrand has kinks where a root crosses the circle; in one
//! outer variable these are located and integrated piecewise with
//! Gauss-Legendre panels. A plain tensor trapezoid evaluator is kept as an
//! independent path.

use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::quadrature::{grid_fold, refine, QuadratureSpec, TOTAL_NODE_CAP};
use crate::walk::{qw_coin, rw_coin, CoinMatrix, ShiftType};
use crate::zeta::log_zeta;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A zero of `P` closer than this (relative) to the integration torus sets
/// `singular_flag`.
pub const SINGULAR_GAP: f64 = 1e-10;

/// Below this fraction of `Σ|a_I| e^{<I,x>}`, a node value counts as a zero.
const NEAR_ZERO_REL: f64 = 1e-12;

const GL_ORDER: usize = 16;
const KINK_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RonkinMethod {
    /// One variable by Jensen's formula, the others by quadrature.
    Jensen,
    /// Tensor trapezoid over all variables.
    Trapezoid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RonkinEvaluation {
    pub point: Vec<f64>,
    pub value: f64,
    pub nodes: usize,
    pub delta: f64,
    pub singular_flag: bool,
    /// Smallest `|P|` seen (estimated from the root gaps on the Jensen path).
    pub nearest_zero: f64,
    pub method: RonkinMethod,
}

fn validate(p: &LaurentPolynomial, x: &[f64]) -> Result<()> {
    if p.is_zero() {
        return Err(Error::Domain("Ronkin function of the zero polynomial is -inf".into()));
    }
    if x.len() != p.k() {
        return Err(Error::Dimension(format!(
            "point has length {}, polynomial has k = {}",
            x.len(),
            p.k()
        )));
    }
    if p.k() > 3 {
        return Err(Error::Unsupported(format!(
            "Ronkin quadrature is limited to k <= 3 (k = {})",
            p.k()
        )));
    }
    Ok(())
}

/// Value of one inner integral and the data needed to locate kinks.
#[derive(Debug, Clone, Copy)]
struct Inner {
    value: f64,
    /// Product over roots of `log|ρ| - log r`; changes sign at a kink.
    crossing: f64,
    /// Smallest `|log|ρ| - log r|`.
    gap: f64,
    /// Estimate of `min |P|` on the inner circle.
    min_abs: f64,
}

/// `(2π)^{-1} ∫ log|Σ_j c_j w^j| dθ` over `|w| = e^{ln_r}` by Jensen's formula.
fn jensen(c: &[Complex64], ln_r: f64) -> Inner {
    let deg = match c.iter().rposition(|z| !z.is_zero()) {
        Some(d) => d,
        None => {
            return Inner {
                value: f64::NEG_INFINITY,
                crossing: 0.0,
                gap: 0.0,
                min_abs: 0.0,
            }
        }
    };
    let ln_lead = c[deg].norm().ln();
    let ln_roots: Vec<f64> = match deg {
        0 => vec![],
        1 => vec![c[0].norm().ln() - ln_lead],
        2 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = (b * b - 4.0 * a * cc).sqrt();
            let s = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
            let q = -(b + s * disc) / 2.0;
            if q.is_zero() {
                vec![f64::NEG_INFINITY; 2]
            } else {
                let lq = q.norm().ln();
                vec![lq - ln_lead, cc.norm().ln() - lq]
            }
        }
        _ => unreachable!("degree at most 2"),
    };
    let mut value = ln_lead;
    let mut crossing = 1.0;
    let mut gap = f64::INFINITY;
    let mut ln_min = ln_lead;
    let r = ln_r.exp();
    for &lr in &ln_roots {
        value += lr.max(ln_r);
        crossing *= lr - ln_r;
        gap = gap.min((lr - ln_r).abs());
        ln_min += (lr.exp() - r).abs().ln();
    }
    Inner {
        value,
        crossing,
        gap,
        min_abs: ln_min.exp(),
    }
}

/// `P` split by powers of one variable, with the remaining exponents kept.
struct Reduced {
    inner: usize,
    m_min: i32,
    /// `slices[m - m_min]`: terms `(other exponents, a_I e^{<I', x'>})`.
    slices: Vec<Vec<(Vec<i32>, Complex64)>>,
}

impl Reduced {
    /// Picks the variable of smallest exponent span; `None` if that span
    /// exceeds 2.
    fn new(p: &LaurentPolynomial, x: &[f64]) -> Option<Self> {
        let k = p.k();
        let (inner, (lo, hi)) = (0..k)
            .map(|j| (j, p.degree_span(j).expect("nonzero polynomial")))
            .rev()
            .min_by_key(|(_, (lo, hi))| hi - lo)?;
        if hi - lo > 2 {
            return None;
        }
        let mut slices = vec![Vec::new(); (hi - lo + 1) as usize];
        for (e, c) in p.terms() {
            let mut rest = e.clone();
            let m = rest.remove(inner);
            let s: f64 = (0..k)
                .filter(|&j| j != inner)
                .map(|j| e[j] as f64 * x[j])
                .sum();
            slices[(m - lo) as usize].push((rest, c.value * s.exp()));
        }
        Some(Reduced {
            inner,
            m_min: lo,
            slices,
        })
    }

    fn coefficients(&self, theta: &[f64]) -> Vec<Complex64> {
        self.slices
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|(e, a)| {
                        let t: f64 = e.iter().zip(theta).map(|(&i, &th)| i as f64 * th).sum();
                        a * Complex64::from_polar(1.0, t)
                    })
                    .sum()
            })
            .collect()
    }

    fn eval(&self, theta: &[f64], x_inner: f64) -> Inner {
        let mut r = jensen(&self.coefficients(theta), x_inner);
        r.value += self.m_min as f64 * x_inner;
        r.min_abs *= (self.m_min as f64 * x_inner).exp();
        r
    }

    /// As `eval`, but a node on a zero of every coefficient is replaced by
    /// the mean over nearby points.
    fn eval_safe(&self, theta: &[f64], x_inner: f64, h: f64) -> Inner {
        let r = self.eval(theta, x_inner);
        if r.value.is_finite() {
            return r;
        }
        let offsets = [-0.25 * h, 0.25 * h];
        let m = theta.len();
        let count = 1usize << m;
        let mut sum = 0.0;
        for mask in 0..count {
            let th: Vec<f64> = (0..m)
                .map(|a| theta[a] + offsets[(mask >> a) & 1])
                .collect();
            sum += self.eval(&th, x_inner).value;
        }
        Inner {
            value: sum / count as f64,
            crossing: r.crossing,
            gap: 0.0,
            min_abs: 0.0,
        }
    }
}

#[derive(Clone, Copy)]
struct Diag {
    gap: f64,
    min_abs: f64,
}

impl Diag {
    fn new() -> Self {
        Diag {
            gap: f64::INFINITY,
            min_abs: f64::INFINITY,
        }
    }
    fn add(&mut self, r: &Inner) {
        self.gap = self.gap.min(r.gap);
        self.min_abs = self.min_abs.min(r.min_abs);
    }
    fn merge(mut self, o: Diag) -> Diag {
        self.gap = self.gap.min(o.gap);
        self.min_abs = self.min_abs.min(o.min_abs);
        self
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Angles in `[0, 2π)` where a root crosses the circle.
fn find_kinks(red: &Reduced, x_inner: f64) -> Vec<f64> {
    let h = 2.0 * PI / KINK_SAMPLES as f64;
    let s = |t: f64| red.eval(&[t], x_inner).crossing;
    let samples: Vec<f64> = (0..KINK_SAMPLES).map(|i| s(i as f64 * h)).collect();
    let mut kinks = Vec::new();
    for i in 0..KINK_SAMPLES {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let (sa, sb) = (samples[i], samples[(i + 1) % KINK_SAMPLES]);
        if sa == 0.0 {
            kinks.push(a);
        } else if sa * sb < 0.0 {
            let (mut lo, mut hi, mut slo) = (a, b, sa);
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                let sm = s(mid);
                if sm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if sm * slo < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    slo = sm;
                }
            }
            kinks.push(0.5 * (lo + hi));
        }
    }
    kinks
}

/// One outer variable: piecewise composite Gauss-Legendre between kinks.
fn outer_1d(red: &Reduced, x_inner: f64, quad: &QuadratureSpec) -> Result<(f64, usize, f64, Diag)> {
    let kinks = find_kinks(red, x_inner);
    let pieces: Vec<(f64, f64)> = if kinks.is_empty() {
        vec![(0.0, 2.0 * PI)]
    } else {
        (0..kinks.len())
            .map(|i| {
                let a = kinks[i];
                let b = if i + 1 < kinks.len() { kinks[i + 1] } else { kinks[0] + 2.0 * PI };
                (a, b)
            })
            .collect()
    };
    let gl = gauss_legendre(GL_ORDER);
    let mut diag = Diag::new();
    let integrate = |panels: usize, diag: &mut Diag| -> f64 {
        let mut total = 0.0;
        for &(a, b) in &pieces {
            let w = (b - a) / panels as f64;
            for p in 0..panels {
                let c = a + (p as f64 + 0.5) * w;
                for &(t, wt) in &gl {
                    let r = red.eval_safe(&[c + 0.5 * w * t], x_inner, w / GL_ORDER as f64);
                    diag.add(&r);
                    total += 0.5 * w * wt * r.value;
                }
            }
        }
        total / (2.0 * PI)
    };
    let mut panels = (quad.nodes_per_dim / GL_ORDER).max(1);
    let mut prev = integrate(panels, &mut diag);
    loop {
        let next = 2 * panels;
        let nodes = next * pieces.len() * GL_ORDER;
        if nodes > TOTAL_NODE_CAP {
            return Err(Error::Accuracy {
                message: format!("Ronkin quadrature did not reach {:e}", quad.tolerance),
                nodes: panels * pieces.len() * GL_ORDER,
                delta: f64::NAN,
                singular: diag.gap < SINGULAR_GAP,
            });
        }
        let cur = integrate(next, &mut diag);
        let delta = (cur - prev).abs();
        if delta < quad.tolerance {
            return Ok((cur, nodes, delta, diag));
        }
        prev = cur;
        panels = next;
    }
}

/// Two outer variables: periodic trapezoid refinement.
fn outer_2d(red: &Reduced, x_inner: f64, quad: &QuadratureSpec) -> Result<(f64, usize, f64, Diag)> {
    let mut diag = Diag::new();
    let res = refine(
        2,
        quad,
        2,
        |n| {
            let h = 2.0 * PI / n as f64;
            let (s, dg) = grid_fold(
                2,
                n,
                || (0.0, Diag::new()),
                |(s, mut dg), th| {
                    let r = red.eval_safe(th, x_inner, h);
                    dg.add(&r);
                    (s + r.value, dg)
                },
                |(a, da), (b, db)| (a + b, da.merge(db)),
            );
            diag = diag.merge(dg);
            Ok(s / (n * n) as f64)
        },
        |a, b| (a - b).abs(),
    );
    match res {
        Ok(r) => Ok((r.value, r.nodes * r.nodes, r.delta, diag)),
        Err(Error::Accuracy {
            message,
            nodes,
            delta,
            ..
        }) => Err(Error::Accuracy {
            message,
            nodes,
            delta,
            singular: diag.gap < SINGULAR_GAP,
        }),
        Err(e) => Err(e),
    }
}

/// Ronkin function of `P` at `x`.
///
/// Uses the Jensen reduction when some variable appears with exponent span at
/// most 2, and the tensor trapezoid otherwise.
pub fn ronkin_eval(p: &LaurentPolynomial, x: &[f64], quad: &QuadratureSpec) -> Result<RonkinEvaluation> {
    validate(p, x)?;
    let red = match Reduced::new(p, x) {
        Some(r) => r,
        None => return ronkin_eval_trapezoid(p, x, quad),
    };
    let x_inner = x[red.inner];
    let (value, nodes, delta, diag) = match p.k() {
        1 => {
            let r = red.eval(&[], x_inner);
            let mut dg = Diag::new();
            dg.add(&r);
            (r.value, 1, 0.0, dg)
        }
        2 => outer_1d(&red, x_inner, quad)?,
        _ => outer_2d(&red, x_inner, quad)?,
    };
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "log|P| is not integrable at x = {x:?} (P vanishes on the whole torus)"
        )));
    }
    Ok(RonkinEvaluation {
        point: x.to_vec(),
        value,
        nodes,
        delta,
        singular_flag: diag.gap < SINGULAR_GAP,
        nearest_zero: diag.min_abs,
        method: RonkinMethod::Jensen,
    })
}

/// Ronkin function by tensor trapezoid over all `k` variables with doubling
/// refinement. A node where `|P|` is numerically zero is replaced by the mean
/// over `2^k` nearby points and flags the result as singular.
pub fn ronkin_eval_trapezoid(
    p: &LaurentPolynomial,
    x: &[f64],
    quad: &QuadratureSpec,
) -> Result<RonkinEvaluation> {
    validate(p, x)?;
    let k = p.k();
    let terms: Vec<(Vec<i32>, Complex64)> = p
        .terms()
        .map(|(e, c)| {
            let s: f64 = e.iter().zip(x).map(|(&i, &xi)| i as f64 * xi).sum();
            (e.clone(), c.value * s.exp())
        })
        .collect();
    let scale: f64 = terms.iter().map(|(_, a)| a.norm()).sum();
    let eval = |th: &[f64]| -> Complex64 {
        terms
            .iter()
            .map(|(e, a)| {
                let t: f64 = e.iter().zip(th).map(|(&i, &t)| i as f64 * t).sum();
                a * Complex64::from_polar(1.0, t)
            })
            .sum()
    };
    let node_value = |th: &[f64], h: f64| -> (f64, f64, bool) {
        let v = eval(th).norm();
        if v > NEAR_ZERO_REL * scale {
            return (v.ln(), v, false);
        }
        let count = 1usize << k;
        let mut sum = 0.0;
        let mut buf = th.to_vec();
        for mask in 0..count {
            for a in 0..k {
                buf[a] = th[a] + if (mask >> a) & 1 == 0 { -0.25 * h } else { 0.25 * h };
            }
            sum += eval(&buf).norm().ln();
        }
        (sum / count as f64, v, true)
    };
    let mut singular = false;
    let mut nearest = f64::INFINITY;
    let res = refine(
        k,
        quad,
        2,
        |n| {
            let h = 2.0 * PI / n as f64;
            let (s, near, sing) = grid_fold(
                k,
                n,
                || (0.0, f64::INFINITY, false),
                |(s, m, f), th| {
                    let (l, v, flag) = node_value(th, h);
                    (s + l, m.min(v), f || flag)
                },
                |(a, ma, fa), (b, mb, fb)| (a + b, ma.min(mb), fa || fb),
            );
            singular |= sing;
            nearest = nearest.min(near);
            Ok(s / n.pow(k as u32) as f64)
        },
        |a, b| (a - b).abs(),
    );
    match res {
        Ok(r) => Ok(RonkinEvaluation {
            point: x.to_vec(),
            value: r.value,
            nodes: r.nodes.pow(k as u32),
            delta: r.delta,
            singular_flag: singular,
            nearest_zero: nearest,
            method: RonkinMethod::Trapezoid,
        }),
        Err(Error::Accuracy {
            message,
            nodes,
            delta,
            ..
        }) => Err(Error::Accuracy {
            message,
            nodes,
            delta,
            singular,
        }),
        Err(e) => Err(e),
    }
}

/// Central-difference gradient of the Ronkin function.
pub fn ronkin_gradient(
    p: &LaurentPolynomial,
    x: &[f64],
    h: f64,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    validate(p, x)?;
    (0..x.len())
        .map(|j| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[j] += h;
            b[j] -= h;
            Ok((ronkin_eval(p, &a, quad)?.value - ronkin_eval(p, &b, quad)?.value) / (2.0 * h))
        })
        .collect()
}

/// Evaluates `R` at every point of `points`.
pub fn ronkin_surface(
    p: &LaurentPolynomial,
    points: &[Vec<f64>],
    quad: &QuadratureSpec,
) -> Result<Vec<RonkinEvaluation>> {
    points.iter().map(|x| ronkin_eval(p, x, quad)).collect()
}

/// CSV with columns `x_1..x_k,value,singular_flag`.
pub fn surface_csv(evals: &[RonkinEvaluation]) -> String {
    let k = evals.first().map_or(0, |e| e.point.len());
    let mut out = String::new();
    for j in 1..=k {
        out.push_str(&format!("x_{j},"));
    }
    out.push_str("value,singular_flag\n");
    for e in evals {
        for v in &e.point {
            out.push_str(&crate::io::fmt_f64(*v));
            out.push(',');
        }
        out.push_str(&crate::io::fmt_f64(e.value));
        out.push(',');
        out.push_str(if e.singular_flag { "true" } else { "false" });
        out.push('\n');
    }
    out
}

/// The walk families with a matching Laurent polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WalkFamily {
    Rw { d: usize },
    QwM { xi: f64 },
    QwF { xi: f64 },
}

impl WalkFamily {
    pub fn coin(&self) -> Result<CoinMatrix> {
        match *self {
            WalkFamily::Rw { d } => rw_coin(d),
            WalkFamily::QwM { xi } => Ok(qw_coin(xi, ShiftType::M)),
            WalkFamily::QwF { xi } => Ok(qw_coin(xi, ShiftType::F)),
        }
    }

    /// The polynomial whose torus values are `det(I - u M(θ))`.
    pub fn polynomial(&self, u: f64) -> Result<LaurentPolynomial> {
        match *self {
            WalkFamily::Rw { d } => p_rw(d, u),
            WalkFamily::QwM { xi } => Ok(p_qw(xi, u, ShiftType::M)),
            WalkFamily::QwF { xi } => Ok(p_qw(xi, u, ShiftType::F)),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            WalkFamily::Rw { d } => d,
            _ => 1,
        }
    }
}

fn unit(d: usize, j: usize, s: i32) -> Vec<i32> {
    let mut e = vec![0; d];
    e[j] = s;
    e
}

/// `1 - (u/2d) Σ_j (z_j + 1/z_j)`.
pub fn p_rw(d: usize, u: f64) -> Result<LaurentPolynomial> {
    if d == 0 {
        return Err(Error::Dimension("p_rw needs d >= 1".into()));
    }
    let c = -u / (2 * d) as f64;
    let mut terms = vec![(vec![0; d], 1.0)];
    for j in 0..d {
        terms.push((unit(d, j, 1), c));
        terms.push((unit(d, j, -1), c));
    }
    LaurentPolynomial::from_real_terms(d, terms)
}

/// The one-variable quantum walk polynomials
/// `1 - u² - cos ξ·u (z - 1/z)` (M) and `1 + u² - sin ξ·u (z + 1/z)` (F).
pub fn p_qw(xi: f64, u: f64, shift: ShiftType) -> LaurentPolynomial {
    let (s, c) = xi.sin_cos();
    let terms = match shift {
        ShiftType::M => vec![(vec![1], -c * u), (vec![-1], c * u), (vec![0], 1.0 - u * u)],
        ShiftType::F => vec![(vec![1], -s * u), (vec![-1], -s * u), (vec![0], 1.0 + u * u)],
    };
    LaurentPolynomial::from_real_terms(1, terms).expect("k = 1")
}

/// The `u = 1` polynomials rescaled to integer-friendly form:
/// `Σ(z_j + 1/z_j) - 2d`, `z - 1/z - 1/cos ξ`, `z + 1/z - 1/sin ξ`.
pub fn p_simplified(family: WalkFamily) -> Result<LaurentPolynomial> {
    let check_xi = |xi: f64| {
        let t = xi / (PI / 2.0);
        if (t - t.round()).abs() < 1e-12 {
            Err(Error::Degenerate(format!("xi = {xi} is a multiple of pi/2")))
        } else {
            Ok(())
        }
    };
    match family {
        WalkFamily::Rw { d } => {
            if d == 0 {
                return Err(Error::Dimension("p_simplified needs d >= 1".into()));
            }
            let mut terms = vec![(vec![0; d], -2.0 * d as f64)];
            for j in 0..d {
                terms.push((unit(d, j, 1), 1.0));
                terms.push((unit(d, j, -1), 1.0));
            }
            LaurentPolynomial::from_real_terms(d, terms)
        }
        WalkFamily::QwM { xi } => {
            check_xi(xi)?;
            LaurentPolynomial::from_real_terms(
                1,
                vec![(vec![1], 1.0), (vec![-1], -1.0), (vec![0], -1.0 / xi.cos())],
            )
        }
        WalkFamily::QwF { xi } => {
            check_xi(xi)?;
            LaurentPolynomial::from_real_terms(
                1,
                vec![(vec![1], 1.0), (vec![-1], 1.0), (vec![0], -1.0 / xi.sin())],
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correspondence {
    pub family: WalkFamily,
    pub u: f64,
    /// Real part of the logarithmic zeta function.
    pub l: f64,
    pub l_imag: f64,
    pub r0: f64,
    pub diff: f64,
    pub l_nodes: usize,
    pub r_nodes: usize,
    pub singular_flag: bool,
}

/// Computes `L(A, T^d_∞, u)` and `R(0, ..., 0)` of the matching polynomial.
pub fn correspondence_check(family: WalkFamily, u: f64, quad: &QuadratureSpec) -> Result<Correspondence> {
    let coin = family.coin()?;
    let l = log_zeta(&coin, u, quad)?;
    let p = family.polynomial(u)?;
    let r = ronkin_eval(&p, &vec![0.0; family.dim()], quad)?;
    Ok(Correspondence {
        family,
        u,
        l: l.value.re,
        l_imag: l.value.im,
        r0: r.value,
        diff: (l.value.re - r.value).abs(),
        l_nodes: l.nodes,
        r_nodes: r.nodes,
        singular_flag: r.singular_flag,
    })
}
