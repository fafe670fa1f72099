//! Acceptance criteria 1-10. Each test prints one PASS/FAIL line (visible
//! with `--nocapture`) and then asserts.

mod common;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use walkzeta::closed_forms::{b2n, qw_c2l, qw_log_zeta_closed, rw_log_zeta_closed};
use walkzeta::geometry::amoeba::{amoeba_complement_components, BoxSpec, RasterOptions};
use walkzeta::geometry::polytope::{direction_polytope, newton_polytope};
use walkzeta::geometry::tropical::{duality_check, perpendicularity_max, signed_sets};
use walkzeta::linalg::CMatrix;
use walkzeta::quadrature::QuadratureSpec;
use walkzeta::ronkin::{correspondence_check, p_qw, p_rw, p_simplified, ronkin_eval, ronkin_gradient, WalkFamily};
use walkzeta::simulator::{evolve, matrix_weight, measure, return_trace, Domain, WalkState};
use walkzeta::walk::{qw_coin, rw_coin, CoinMatrix, ShiftType, TorusSpec, WalkClass};
use walkzeta::zeta::{c_r_limit, finite_zeta, log_zeta, qw_m_lower_endpoint};

// Tolerances and runtime budgets, pinned.
const TOL_DET_ORACLE: f64 = 1e-9;
const TOL_QW_CLOSED: f64 = 1e-8;
const TOL_RW_D1: f64 = 1e-8;
const TOL_RW_D2: f64 = 1e-7;
const TOL_MOMENTS: f64 = 1e-9;
const TOL_ODD: f64 = 1e-12;
const TOL_CORRESPOND: f64 = 1e-7;
const TOL_CONVEXITY: f64 = 1e-8;
const TOL_SECOND_DIFF: f64 = 1e-5;
const TOL_GRADIENT: f64 = 1e-3;
const TOL_PERP: f64 = 1e-12;
const TOL_CONSERVATION: f64 = 1e-12;
const TOL_PATH_SUM: f64 = 1e-12;

const BUDGET_1: Duration = Duration::from_secs(10);
const BUDGET_2: Duration = Duration::from_secs(30);
const BUDGET_5: Duration = Duration::from_secs(120);
const BUDGET_8: Duration = Duration::from_secs(60);

const XIS: [f64; 3] = [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3];

fn quad(tol: f64) -> QuadratureSpec {
    QuadratureSpec::new(16, tol).unwrap()
}

fn within(budget: Duration, t: Duration) -> bool {
    t <= budget
}

fn report(n: u32, ok: bool, what: &str, detail: String, t: Duration) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("{status} criterion {n:>2}: {what}: {detail} ({:.2} s)", t.as_secs_f64());
    assert!(ok, "criterion {n} failed: {detail}");
}

/// Five admissible `u` per shift type: fractions of the stated interval.
fn admissible_u(xi: f64, shift: ShiftType) -> Vec<f64> {
    let lo = match shift {
        ShiftType::M => qw_m_lower_endpoint(xi),
        ShiftType::F => -3.0,
    };
    [0.05, 0.25, 0.5, 0.75, 0.95].iter().map(|t| lo * t).collect()
}

#[test]
fn criterion_01_determinant_oracle() {
    let t0 = Instant::now();
    let mut rng = common::rng(2024);
    let mut worst_det: f64 = 0.0;
    let mut worst_log: f64 = 0.0;
    let mut cases = 0;
    for d in [1usize, 2] {
        let mut coins: Vec<CoinMatrix> = Vec::new();
        for _ in 0..5 {
            coins.push(common::random_qw_coin(d, &mut rng));
            coins.push(common::random_crw_coin(d, &mut rng));
        }
        coins.push(rw_coin(d).unwrap());
        for coin in &coins {
            for n in 1..=4 {
                let torus = TorusSpec::new(d, n).unwrap();
                for u in [-0.5, -0.3, 0.3, 0.5] {
                    let z = finite_zeta(coin, &torus, u).unwrap().value;
                    let sites = torus.num_sites() as f64;
                    // ζ^{-N^d} is the site-space determinant itself
                    let det = common::site_det(coin, &torus, u);
                    let rel = ((z.powf(-sites) - det) / det).norm();
                    // and ζ = exp(-Σ log(1 - uλ) / N^d) over site-space eigenvalues
                    let via_eig = (-common::site_log_det(coin, &torus, u) / sites).exp();
                    worst_det = worst_det.max(rel);
                    worst_log = worst_log.max((z - via_eig).norm());
                    cases += 1;
                }
            }
        }
    }
    let t = t0.elapsed();
    let ok = worst_det < TOL_DET_ORACLE && worst_log < TOL_DET_ORACLE && within(BUDGET_1, t);
    report(
        1,
        ok,
        "finite_zeta vs explicit site-space determinant",
        format!("{cases} cases, max rel det err {worst_det:.2e}, max eigen-path err {worst_log:.2e}"),
        t,
    );
}

/// `det(I - u D(k) A)` for a 2×2 coin, `D(k) = diag(e^{ik}, e^{-ik})`.
fn two_state_det(a: &CMatrix, k: f64, u: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, k);
    let tr = e * a[(0, 0)] + a[(1, 1)] / e;
    let det = a.det();
    Complex64::new(1.0, 0.0) - tr * u + det * u * u
}

#[test]
fn criterion_02_qw_closed_form() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_simpson: f64 = 0.0;
    for xi in XIS {
        for shift in [ShiftType::M, ShiftType::F] {
            let coin = qw_coin(xi, shift);
            for u in admissible_u(xi, shift) {
                let l = log_zeta(&coin, u, &quad(1e-13)).unwrap().value;
                let closed = qw_log_zeta_closed(xi, u, shift).unwrap();
                let simpson = common::simpson_mean(|k| two_state_det(coin.entries(), k, u).norm().ln(), 4000);
                worst = worst.max((l - closed).norm());
                worst_simpson = worst_simpson.max((simpson - closed).abs());
            }
        }
    }
    let t = t0.elapsed();
    let ok = worst < TOL_QW_CLOSED && worst_simpson < TOL_QW_CLOSED && within(BUDGET_2, t);
    report(
        2,
        ok,
        "QW log-zeta quadrature vs closed form",
        format!("30 (xi, u, shift) cases, max |diff| {worst:.2e}, Simpson oracle {worst_simpson:.2e}"),
        t,
    );
}

#[test]
fn criterion_03_rw_closed_forms() {
    let t0 = Instant::now();
    let us: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut spread = [0.0f64; 2];
    for (idx, d) in [1usize, 2].into_iter().enumerate() {
        let coin = rw_coin(d).unwrap();
        for &u in &us {
            let q = log_zeta(&coin, u, &quad(1e-13)).unwrap().value.re;
            let c = rw_log_zeta_closed(d, u, 60).unwrap();
            let vals = [q, c.series, c.alternative];
            for a in vals {
                for b in vals {
                    spread[idx] = spread[idx].max((a - b).abs());
                }
            }
        }
    }
    // the central binomials against exact integer arithmetic
    let b_err = (1..=60)
        .map(|n| (b2n(n).value - common::central_binomial(n)).abs() / common::central_binomial(n))
        .fold(0.0, f64::max);
    let t = t0.elapsed();
    let ok = spread[0] < TOL_RW_D1 && spread[1] < TOL_RW_D2 && b_err < 1e-14;
    report(
        3,
        ok,
        "RW quadrature vs log form vs B_2n series (n_max = 60)",
        format!(
            "d=1 max pairwise {:.2e}, d=2 max pairwise {:.2e}, B_2n rel err {b_err:.2e}",
            spread[0], spread[1]
        ),
        t,
    );
}

/// `₂F₁(1-l, 1-l; 2; x)` summed directly.
fn hyp2f1_oracle(l: u32, x: f64) -> f64 {
    let a = 1.0 - l as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..l.saturating_sub(1) {
        let n = n as f64;
        term *= (a + n) * (a + n) / ((2.0 + n) * (n + 1.0)) * x;
        sum += term;
    }
    sum
}

#[test]
fn criterion_04_moment_chain() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_odd: f64 = 0.0;
    let mut worst_hyp: f64 = 0.0;
    for xi in XIS {
        for shift in [ShiftType::M, ShiftType::F] {
            let coin = qw_coin(xi, shift);
            for l in 1..=8u32 {
                let r = 2 * l as usize;
                let closed = qw_c2l(xi, l, shift).unwrap();
                let lim = c_r_limit(&coin, r, &quad(1e-14)).unwrap();
                let tr = return_trace(&coin, r).unwrap();
                worst = worst.max((lim - closed).norm()).max((tr - closed).norm()).max((lim - tr).norm());
                worst_odd = worst_odd
                    .max(c_r_limit(&coin, r - 1, &quad(1e-14)).unwrap().norm())
                    .max(return_trace(&coin, r - 1).unwrap().norm());
            }
            // C_2l = 2l (-cos^2 ξ)^{l-1} sin^2 ξ ₂F₁(1-l, 1-l; 2; -tan^2 ξ) (M),
            //       2l (sin^2 ξ)^{l-1} (-cos^2 ξ) ₂F₁(1-l, 1-l; 2; -cot^2 ξ) (F)
            for l in 1..=8u32 {
                let (s2, c2) = (xi.sin().powi(2), xi.cos().powi(2));
                let e = l as i32 - 1;
                let oracle = match shift {
                    ShiftType::M => 2.0 * l as f64 * (-c2).powi(e) * s2 * hyp2f1_oracle(l, -s2 / c2),
                    ShiftType::F => 2.0 * l as f64 * s2.powi(e) * (-c2) * hyp2f1_oracle(l, -c2 / s2),
                };
                let lim = c_r_limit(&coin, 2 * l as usize, &quad(1e-14)).unwrap();
                worst_hyp = worst_hyp.max((lim.re - oracle).abs());
            }
        }
    }
    let t = t0.elapsed();
    let ok = worst < TOL_MOMENTS && worst_odd < TOL_ODD && worst_hyp < TOL_MOMENTS;
    report(
        4,
        ok,
        "qw_c2l = c_r_limit(2l) = return_trace(2l), l <= 8",
        format!("max |diff| {worst:.2e}, max |C_odd| {worst_odd:.2e}, hypergeometric sum {worst_hyp:.2e}"),
        t,
    );
}

#[test]
fn criterion_05_correspondence() {
    let t0 = Instant::now();
    let mut cases: Vec<(WalkFamily, f64)> = Vec::new();
    for d in 1..=3 {
        for u in [-0.9, -0.5, 0.5, 0.9] {
            cases.push((WalkFamily::Rw { d }, u));
        }
    }
    let pairs = [(FRAC_PI_6, 0.2), (FRAC_PI_4, 0.5), (FRAC_PI_3, 0.8), (0.3, 0.6), (1.2, 0.35)];
    for (xi, t) in pairs {
        cases.push((WalkFamily::QwM { xi }, t * qw_m_lower_endpoint(xi)));
        cases.push((WalkFamily::QwF { xi }, -2.0 * t));
    }
    let mut worst: f64 = 0.0;
    let mut worst_case = String::new();
    for (fam, u) in &cases {
        let c = correspondence_check(*fam, *u, &quad(1e-12)).unwrap();
        if c.diff >= worst {
            worst = c.diff;
            worst_case = format!("{fam:?} u={u}");
        }
    }
    let t = t0.elapsed();
    let ok = worst < TOL_CORRESPOND && within(BUDGET_5, t);
    report(
        5,
        ok,
        "|L - R(0)| for RW d<=3 and QW M/F",
        format!("{} cases, max {worst:.2e} at {worst_case}", cases.len()),
        t,
    );
}

#[test]
fn criterion_06_ronkin_structure() {
    let t0 = Instant::now();
    let q = quad(1e-12);
    let mut rng = common::rng(6);
    let mut violation = f64::NEG_INFINITY;
    for (p, k) in [(p_rw(1, 0.5).unwrap(), 1usize), (p_rw(2, 0.9).unwrap(), 2)] {
        for _ in 0..1000 {
            let a: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let b: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x + y) / 2.0).collect();
            let r = |x: &[f64]| ronkin_eval(&p, x, &q).unwrap().value;
            violation = violation.max(r(&m) - (r(&a) + r(&b)) / 2.0);
        }
    }
    // flatness inside complement components of p_rw(2, 0.9)
    let p = p_rw(2, 0.9).unwrap();
    let h = 0.05;
    let mut second: f64 = 0.0;
    for x in [[0.0, 0.0], [0.1, -0.1], [2.5, 0.0], [-2.5, 0.3], [0.0, 2.5], [0.2, -2.5]] {
        for v in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]] {
            let at = |s: f64| ronkin_eval(&p, &[x[0] + s * h * v[0], x[1] + s * h * v[1]], &q).unwrap().value;
            second = second.max((at(1.0) - 2.0 * at(0.0) + at(-1.0)).abs());
        }
    }
    // outer-component gradients equal the matching Newton polytope vertices
    let mut grad_err: f64 = 0.0;
    for (x, vertex) in [
        ([2.5, 0.0], [1.0, 0.0]),
        ([-2.5, 0.0], [-1.0, 0.0]),
        ([0.0, 2.5], [0.0, 1.0]),
        ([0.0, -2.5], [0.0, -1.0]),
    ] {
        let g = ronkin_gradient(&p, &x, 1e-4, &q).unwrap();
        grad_err = grad_err.max((g[0] - vertex[0]).abs()).max((g[1] - vertex[1]).abs());
    }
    let p1 = p_rw(1, 0.5).unwrap();
    for (x, vertex) in [(3.0, 1.0), (-3.0, -1.0)] {
        let g = ronkin_gradient(&p1, &[x], 1e-4, &q).unwrap();
        grad_err = grad_err.max((g[0] - vertex).abs());
    }
    let t = t0.elapsed();
    let ok = violation < TOL_CONVEXITY && second < TOL_SECOND_DIFF && grad_err < TOL_GRADIENT;
    report(
        6,
        ok,
        "Ronkin convexity, flatness and outer gradients",
        format!("2000 pairs, max violation {violation:.2e}, max second diff {second:.2e}, gradient err {grad_err:.2e}"),
        t,
    );
}

#[test]
fn criterion_07_tropical_duality() {
    let t0 = Instant::now();
    let mut vertex_failures = Vec::new();
    for d in 1..=3 {
        for u in [0.5, 0.9, -0.7] {
            let np = newton_polytope(&p_rw(d, u).unwrap()).unwrap();
            if np.vertices != direction_polytope(d).unwrap().vertices {
                vertex_failures.push(format!("rw d={d} u={u}"));
            }
        }
        let np = newton_polytope(&p_simplified(WalkFamily::Rw { d }).unwrap()).unwrap();
        if np.vertices != direction_polytope(d).unwrap().vertices {
            vertex_failures.push(format!("rw d={d} simplified"));
        }
    }
    for xi in XIS {
        for shift in [ShiftType::M, ShiftType::F] {
            let np = newton_polytope(&p_qw(xi, -0.3, shift)).unwrap();
            if np.vertices != direction_polytope(1).unwrap().vertices {
                vertex_failures.push(format!("qw {shift:?} xi={xi}"));
            }
        }
        for fam in [WalkFamily::QwM { xi }, WalkFamily::QwF { xi }] {
            let np = newton_polytope(&p_simplified(fam).unwrap()).unwrap();
            if np.vertices != direction_polytope(1).unwrap().vertices {
                vertex_failures.push(format!("{fam:?} simplified"));
            }
        }
    }
    let report2 = duality_check(&p_rw(2, 0.9).unwrap(), 100, 3.0, 7).unwrap();
    let mut perp: f64 = 0.0;
    let mut sets = 0;
    for d in 1..=3 {
        for r in 1..=d {
            for s in signed_sets(d, r) {
                perp = perp.max(perpendicularity_max(&s, d).unwrap());
                sets += 1;
            }
        }
    }
    let t = t0.elapsed();
    let ok = vertex_failures.is_empty()
        && report2.samples >= 10_000
        && report2.mismatches == 0
        && report2.cell_failures == 0
        && report2.family_match == Some(true)
        && perp < TOL_PERP;
    report(
        7,
        ok,
        "Newton = direction polytope, tropical duality, perpendicularity",
        format!(
            "vertex failures {:?}, {} samples with {} mismatches, {} cell failures, {sets} sets with max |<g, s1-si>| {perp:.1e}",
            vertex_failures, report2.samples, report2.mismatches, report2.cell_failures
        ),
        t,
    );
}

#[test]
fn criterion_08_amoeba_topology() {
    let t0 = Instant::now();
    let p = p_rw(2, 0.9).unwrap();
    let r = amoeba_complement_components(&p, BoxSpec::square(3.0), 600, 600, &RasterOptions::default()).unwrap();
    let fpt = r.fpt.clone().unwrap();
    let origin = r.label_at(0.0, 0.0).and_then(|l| r.components.iter().find(|c| c.label == l)).unwrap();
    let g = origin.gradient.clone().unwrap();
    let t = t0.elapsed();
    let count = r.component_count();
    let ok = count == 5
        && fpt.vertices == 4
        && fpt.lattice_points == 5
        && (fpt.vertices..=fpt.lattice_points).contains(&count)
        && origin.bounded
        && g.iter().all(|v| v.abs() < TOL_GRADIENT)
        && within(BUDGET_8, t);
    report(
        8,
        ok,
        "amoeba complement of p_rw(2, 0.9) on 600^2 over [-3,3]^2",
        format!(
            "{count} components within [{}, {}], origin bounded {}, gradient ({:.1e}, {:.1e})",
            fpt.vertices, fpt.lattice_points, origin.bounded, g[0], g[1]
        ),
        t,
    );
}

fn grover(d: usize) -> CoinMatrix {
    let n = 2 * d;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 2.0 / n as f64 - if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    CoinMatrix::from_real_rows(d, &rows, ShiftType::M, WalkClass::QW).unwrap()
}

#[test]
fn criterion_09_conservation() {
    let t0 = Instant::now();
    let mut rng = common::rng(9);
    let mut coins: Vec<(CoinMatrix, u32)> = vec![
        (rw_coin(1).unwrap(), 1),
        (rw_coin(2).unwrap(), 1),
        (common::random_crw_coin(2, &mut rng), 1),
        (qw_coin(FRAC_PI_4, ShiftType::M), 2),
        (qw_coin(FRAC_PI_3, ShiftType::F), 2),
        (grover(2), 2),
        (common::random_qw_coin(2, &mut rng), 2),
    ];
    coins.push((common::random_qw_coin(1, &mut rng), 2));
    let mut worst: f64 = 0.0;
    for (coin, p) in &coins {
        let m = 2 * coin.d();
        let psi0: Vec<Complex64> = (0..m)
            .map(|_| if *p == 1 { Complex64::new(rng.gen_range(0.0..1.0), 0.0) } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .collect();
        for domain in [Domain::Lattice { d: coin.d(), radius: 0 }, Domain::Torus(TorusSpec::new(coin.d(), 5).unwrap())] {
            let mut s = WalkState::delta(domain, &psi0).unwrap();
            let total0: f64 = measure(&s, *p).unwrap().iter().sum();
            for _ in 0..20 {
                s = evolve(&s, coin).unwrap();
                let total: f64 = measure(&s, *p).unwrap().iter().sum();
                worst = worst.max((total - total0).abs() / total0);
            }
        }
    }
    let t = t0.elapsed();
    report(
        9,
        worst < TOL_CONSERVATION,
        "total measure over 20 steps, RW (p=1) and QW (p=2), d <= 2",
        format!("{} coins on lattice and torus, max relative drift {worst:.2e}", coins.len()),
        t,
    );
}

#[test]
fn criterion_10_path_sum() {
    let t0 = Instant::now();
    let mut rng = common::rng(10);
    let mut coins = Vec::new();
    for xi in XIS {
        coins.push(qw_coin(xi, ShiftType::M));
        coins.push(qw_coin(xi, ShiftType::F));
    }
    coins.push(rw_coin(1).unwrap());
    coins.push(common::random_qw_coin(1, &mut rng));
    let mut worst: f64 = 0.0;
    for coin in &coins {
        for n in 0..=6 {
            let field = matrix_weight(coin, n).unwrap();
            for (x, m) in common::path_sum(coin, n) {
                let w = common::to_na(&field.at(&[x]).unwrap());
                worst = worst.max((w - m).camax());
            }
        }
    }
    let t = t0.elapsed();
    report(
        10,
        worst < TOL_PATH_SUM,
        "matrix_weight vs brute-force path sums, n <= 6, d = 1",
        format!("{} coins, max entry diff {worst:.2e}", coins.len()),
        t,
    );
}
