//! Named invariant checks across all modules, sized to finish in seconds.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use crate::closed_forms::{qw_c2l, qw_log_zeta_closed, rw_log_zeta_closed};
use crate::error::Result;
use crate::geometry::amoeba::{amoeba_complement_components, BoxSpec, RasterOptions};
use crate::geometry::polytope::{direction_polytope, newton_polytope};
use crate::geometry::tropical::{duality_check, perpendicularity_max, signed_sets};
use crate::linalg::CMatrix;
use crate::quadrature::QuadratureSpec;
use crate::ronkin::{correspondence_check, p_rw, p_simplified, ronkin_eval, ronkin_eval_trapezoid, WalkFamily};
use crate::simulator::{
    default_norm_power, evolve, matrix_weight, matrix_weight_torus, measure, return_trace, Domain, WalkState,
};
use crate::walk::{qw_coin, rw_coin, to_flip_flop, CoinMatrix, ShiftType, TorusSpec};
use crate::zeta::{c_r_finite, c_r_limit, finite_zeta, log_zeta};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("walk.flip_flop_rows", flip_flop_rows),
    ("zeta.site_space_oracle", site_space_oracle),
    ("zeta.trapezoid_exactness", trapezoid_exactness),
    ("zeta.finite_to_infinite", finite_to_infinite),
    ("zeta.odd_moments_vanish", odd_moments_vanish),
    ("closed.qw_log_zeta", qw_log_zeta_agreement),
    ("closed.rw_log_zeta", rw_log_zeta_agreement),
    ("closed.qw_moments", qw_moment_chain),
    ("ronkin.correspondence", ronkin_correspondence),
    ("ronkin.convexity", ronkin_convexity),
    ("ronkin.jensen_vs_trapezoid", ronkin_paths_agree),
    ("polytope.newton_equals_direction", newton_equals_direction),
    ("tropical.duality", tropical_duality),
    ("tropical.perpendicularity", tropical_perpendicularity),
    ("amoeba.components", amoeba_components),
    ("simulator.conservation", conservation),
    ("simulator.path_sum", path_sum),
    ("simulator.torus_fold", torus_fold),
];

/// Identifiers of every check, in run order.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|(id, _)| *id).collect()
}

/// Runs every check; an error inside a check counts as a failure.
pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(id, f)| match f() {
            Ok((passed, detail)) => CheckOutcome { id, passed, detail },
            Err(e) => CheckOutcome {
                id,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

fn quad(tol: f64) -> QuadratureSpec {
    QuadratureSpec::new(16, tol).expect("valid quadrature")
}

fn qw_coins() -> Vec<CoinMatrix> {
    [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3]
        .into_iter()
        .flat_map(|xi| [qw_coin(xi, ShiftType::M), qw_coin(xi, ShiftType::F)])
        .collect()
}

fn flip_flop_rows() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for xi in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let f = to_flip_flop(&qw_coin(xi, ShiftType::M))?;
        worst = worst.max(f.entries().max_abs_diff(qw_coin(xi, ShiftType::F).entries()));
    }
    Ok((worst < 1e-15, format!("max entry difference {worst:e}")))
}

/// Site-space walk matrix on `T^d_N`: row `(x, 2j)` reads `A` row `2j` at
/// `x + e_j`, row `(x, 2j+1)` reads row `2j+1` at `x - e_j`.
pub(crate) fn site_space_matrix(coin: &CoinMatrix, torus: &TorusSpec) -> CMatrix {
    let d = coin.d();
    let m = 2 * d;
    let sites = torus.num_sites();
    let mut out = CMatrix::zeros(m * sites);
    let a = coin.entries();
    let n = torus.n as i64;
    let flat = |idx: &[i64]| idx.iter().fold(0usize, |f, &v| f * torus.n + v.rem_euclid(n) as usize);
    for s in 0..sites {
        let x: Vec<i64> = torus.index(s).into_iter().map(|v| v as i64).collect();
        for i in 0..m {
            let mut y = x.clone();
            y[i / 2] += if i % 2 == 0 { 1 } else { -1 };
            let t = flat(&y);
            for k in 0..m {
                out[(s * m + i, t * m + k)] += a[(i, k)];
            }
        }
    }
    out
}

fn site_space_oracle() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut coins = qw_coins();
    coins.push(rw_coin(1)?);
    coins.push(rw_coin(2)?);
    for c in &coins {
        for n in [1usize, 2, 3] {
            let torus = TorusSpec::new(c.d(), n)?;
            let m = site_space_matrix(c, &torus);
            for u in [-0.5, -0.3, 0.3, 0.5] {
                let eye = CMatrix::identity(m.dim());
                let det = eye.add(&m.scale(Complex64::new(-u, 0.0))).det();
                let oracle = (-det.ln() / torus.num_sites() as f64).exp();
                let z = finite_zeta(c, &torus, u)?;
                worst = worst.max((z.value - oracle).norm());
            }
        }
    }
    Ok((worst < 1e-9, format!("max |difference| {worst:e}")))
}

fn trapezoid_exactness() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for c in qw_coins().into_iter().chain([rw_coin(1)?]) {
        for r in 1..=6 {
            let n = 2 * r + 2;
            let lim = c_r_limit(&c, r, &QuadratureSpec::new(n, 1.0)?)?;
            let fin = c_r_finite(&c, &TorusSpec::new(1, n)?, r)?;
            worst = worst.max((lim - fin).norm());
        }
    }
    Ok((worst < 1e-13, format!("max |difference| {worst:e}")))
}

fn finite_to_infinite() -> Result<(bool, String)> {
    let c = rw_coin(1)?;
    let u = 0.5;
    let l = log_zeta(&c, u, &quad(1e-14))?.value;
    let errs: Vec<f64> = [4usize, 8, 16, 32]
        .iter()
        .map(|&n| Ok((-finite_zeta(&c, &TorusSpec::new(1, n)?, u)?.value.ln() - l).norm()))
        .collect::<Result<_>>()?;
    let ok = errs.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-15);
    Ok((ok, format!("errors {errs:?}")))
}

fn odd_moments_vanish() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for c in qw_coins().into_iter().chain([rw_coin(1)?]) {
        for r in (1..=9).step_by(2) {
            worst = worst.max(c_r_limit(&c, r, &quad(1e-14))?.norm());
        }
    }
    Ok((worst < 1e-12, format!("max |C_odd| {worst:e}")))
}

fn qw_pairs(shift: ShiftType) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for xi in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let lo = match shift {
            ShiftType::M => crate::zeta::qw_m_lower_endpoint(xi),
            ShiftType::F => -2.0,
        };
        for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
            out.push((xi, lo * t));
        }
    }
    out
}

fn qw_log_zeta_agreement() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for shift in [ShiftType::M, ShiftType::F] {
        for (xi, u) in qw_pairs(shift) {
            let q = log_zeta(&qw_coin(xi, shift), u, &quad(1e-13))?.value;
            let closed = qw_log_zeta_closed(xi, u, shift)?;
            worst = worst.max((q - closed).norm());
        }
    }
    Ok((worst < 1e-8, format!("max |difference| {worst:e}")))
}

fn rw_log_zeta_agreement() -> Result<(bool, String)> {
    let mut ok = true;
    let mut spreads = Vec::new();
    for (d, tol) in [(1usize, 1e-8), (2, 1e-7)] {
        let coin = rw_coin(d)?;
        let mut worst: f64 = 0.0;
        for u in [0.1, 0.3, 0.5, 0.7, 0.9, -0.5] {
            let q = log_zeta(&coin, u, &quad(1e-13))?.value.re;
            let c = rw_log_zeta_closed(d, u, 60)?;
            let vals = [q, c.series, c.alternative];
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(hi - lo);
        }
        ok &= worst < tol;
        spreads.push(format!("d={d}: {worst:e}"));
    }
    Ok((ok, format!("max spread {}", spreads.join(", "))))
}

fn qw_moment_chain() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for c in qw_coins() {
        let Some(crate::walk::CoinFamily::Qw { xi }) = c.family() else {
            continue;
        };
        for l in 1..=8u32 {
            let r = 2 * l as usize;
            let closed = qw_c2l(xi, l, c.shift())?;
            let lim = c_r_limit(&c, r, &quad(1e-14))?;
            let tr = return_trace(&c, r)?;
            worst = worst
                .max((lim - closed).norm())
                .max((tr - closed).norm());
        }
    }
    Ok((worst < 1e-9, format!("max |difference| {worst:e}")))
}

fn ronkin_correspondence() -> Result<(bool, String)> {
    let mut cases: Vec<(WalkFamily, f64)> = Vec::new();
    for d in [1, 2] {
        for u in [-0.9, -0.5, 0.5, 0.9] {
            cases.push((WalkFamily::Rw { d }, u));
        }
    }
    for (xi, u) in qw_pairs(ShiftType::M).into_iter().step_by(3) {
        cases.push((WalkFamily::QwM { xi }, u));
    }
    for (xi, u) in qw_pairs(ShiftType::F).into_iter().step_by(3) {
        cases.push((WalkFamily::QwF { xi }, u));
    }
    let mut worst: f64 = 0.0;
    for (fam, u) in cases {
        worst = worst.max(correspondence_check(fam, u, &quad(1e-12))?.diff);
    }
    Ok((worst < 1e-7, format!("max |L - R(0)| {worst:e}")))
}

fn ronkin_convexity() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    let q = quad(1e-12);
    for (p, k) in [(p_rw(1, 0.5)?, 1usize), (p_rw(2, 0.9)?, 2)] {
        for _ in 0..50 {
            let a: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let b: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x + y) / 2.0).collect();
            let lhs = ronkin_eval(&p, &m, &q)?.value;
            let rhs = (ronkin_eval(&p, &a, &q)?.value + ronkin_eval(&p, &b, &q)?.value) / 2.0;
            worst = worst.max(lhs - rhs);
        }
    }
    Ok((worst < 1e-8, format!("max midpoint violation {worst:e}")))
}

fn ronkin_paths_agree() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let p1 = p_simplified(WalkFamily::QwM { xi: 0.7 })?;
    for x in [[0.0], [0.4], [2.0]] {
        let a = ronkin_eval(&p1, &x, &quad(1e-12))?.value;
        let b = ronkin_eval_trapezoid(&p1, &x, &quad(1e-12))?.value;
        worst = worst.max((a - b).abs());
    }
    let p2 = p_rw(2, 0.9)?;
    for x in [[0.0, 0.0], [2.5, 0.0], [0.0, -2.5]] {
        let a = ronkin_eval(&p2, &x, &quad(1e-12))?.value;
        let b = ronkin_eval_trapezoid(&p2, &x, &quad(1e-10))?.value;
        worst = worst.max((a - b).abs());
    }
    Ok((worst < 1e-8, format!("max |Jensen - trapezoid| {worst:e}")))
}

fn newton_equals_direction() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for d in 1..=3 {
        let np = newton_polytope(&p_rw(d, 0.5)?)?;
        if np.vertices != direction_polytope(d)?.vertices {
            bad.push(format!("rw d={d}"));
        }
    }
    for fam in [WalkFamily::QwM { xi: 0.7 }, WalkFamily::QwF { xi: 0.7 }] {
        let np = newton_polytope(&p_simplified(fam)?)?;
        if np.vertices != direction_polytope(1)?.vertices {
            bad.push(format!("{fam:?}"));
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "all equal".into() } else { bad.join(", ") }))
}

fn tropical_duality() -> Result<(bool, String)> {
    let r = duality_check(&p_rw(2, 0.9)?, 40, 3.0, 11)?;
    Ok((
        r.passed,
        format!(
            "{} samples, {} mismatches, {} cell failures",
            r.samples, r.mismatches, r.cell_failures
        ),
    ))
}

fn tropical_perpendicularity() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for d in 1..=3 {
        for r in 1..=d {
            for s in signed_sets(d, r) {
                worst = worst.max(perpendicularity_max(&s, d)?);
                count += 1;
            }
        }
    }
    Ok((worst < 1e-12, format!("{count} sets, max |<g, s_1 - s_i>| {worst:e}")))
}

fn amoeba_components() -> Result<(bool, String)> {
    let r = amoeba_complement_components(&p_rw(2, 0.9)?, BoxSpec::square(3.0), 200, 200, &RasterOptions::default())?;
    let origin = r.label_at(0.0, 0.0).and_then(|l| r.components.iter().find(|c| c.label == l));
    let origin_ok = origin.is_some_and(|c| {
        c.bounded && c.gradient.as_ref().is_some_and(|g| g.iter().all(|v| v.abs() < 1e-3))
    });
    let ok = r.component_count() == 5 && origin_ok;
    Ok((ok, format!("{} components, origin bounded with zero gradient: {origin_ok}", r.component_count())))
}

fn conservation() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let coins = [
        rw_coin(1)?,
        rw_coin(2)?,
        qw_coin(FRAC_PI_4, ShiftType::M),
        qw_coin(FRAC_PI_3, ShiftType::F),
    ];
    for c in &coins {
        let m = 2 * c.d();
        let p = default_norm_power(c.class());
        let amp = if p == 2 { 1.0 / (m as f64).sqrt() } else { 1.0 / m as f64 };
        let psi0 = vec![Complex64::new(amp, 0.0); m];
        let mut s = WalkState::delta(Domain::Lattice { d: c.d(), radius: 0 }, &psi0)?;
        let total0: f64 = measure(&s, p)?.iter().sum();
        for _ in 0..20 {
            s = evolve(&s, c)?;
            let total: f64 = measure(&s, p)?.iter().sum();
            worst = worst.max((total - total0).abs());
        }
    }
    Ok((worst < 1e-12, format!("max drift {worst:e}")))
}

/// `Σ` over all step sequences of `P_{c_n} A ⋯ P_{c_1} A`, by endpoint.
pub(crate) fn path_sum_1d(coin: &CoinMatrix, n: usize) -> Vec<(i64, CMatrix)> {
    let a = coin.entries();
    let proj = |c: usize| {
        let mut m = CMatrix::zeros(2);
        m[(c, 0)] = a[(c, 0)];
        m[(c, 1)] = a[(c, 1)];
        m
    };
    let steps = [proj(0), proj(1)];
    let mut by_x: Vec<CMatrix> = vec![CMatrix::zeros(2); 2 * n + 1];
    for mask in 0..(1usize << n) {
        let mut prod = CMatrix::identity(2);
        let mut x = 0i64;
        for t in 0..n {
            let c = (mask >> t) & 1;
            prod = steps[c].mul(&prod);
            x += if c == 0 { -1 } else { 1 };
        }
        let slot = (x + n as i64) as usize;
        by_x[slot].add_assign(&prod);
    }
    by_x
        .into_iter()
        .enumerate()
        .map(|(i, m)| (i as i64 - n as i64, m))
        .collect()
}

fn path_sum() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for c in qw_coins().into_iter().chain([rw_coin(1)?]) {
        for n in 0..=6 {
            let field = matrix_weight(&c, n)?;
            for (x, m) in path_sum_1d(&c, n) {
                let w = field.at(&[x]).expect("window covers path endpoints");
                worst = worst.max(w.max_abs_diff(&m));
            }
        }
    }
    Ok((worst < 1e-12, format!("max entry difference {worst:e}")))
}

fn torus_fold() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for c in [qw_coin(0.5, ShiftType::F), rw_coin(2)?] {
        let d = c.d();
        let n = 3;
        let big = 2 * n + 1;
        let torus = TorusSpec::new(d, big)?;
        let lat = matrix_weight(&c, n)?;
        let tor = matrix_weight_torus(&c, torus, n)?;
        let dom = lat.domain();
        for f in 0..dom.num_sites() {
            let x = dom.coords(f);
            let wrapped: Vec<i64> = x.iter().map(|v| v.rem_euclid(big as i64)).collect();
            let a = lat.at(&x).expect("in window");
            let b = tor.at(&wrapped).expect("on torus");
            worst = worst.max(a.max_abs_diff(&b));
        }
    }
    Ok((worst < 1e-14, format!("max entry difference {worst:e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let out = run_all();
        let failed: Vec<_> = out.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert_eq!(out.len(), check_ids().len());
    }

    #[test]
    fn path_sum_first_step() {
        let c = qw_coin(0.4, ShiftType::M);
        let ps = path_sum_1d(&c, 1);
        assert_eq!(ps.len(), 3);
        assert!(ps[1].1.max_abs_diff(&CMatrix::zeros(2)) == 0.0);
    }
}
