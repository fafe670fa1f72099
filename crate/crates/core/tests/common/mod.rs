//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's own determinant, quadrature or recursion code.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walkzeta::linalg::CMatrix;
use walkzeta::walk::{CoinMatrix, ShiftType, TorusSpec, WalkClass};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_na(m: &CMatrix) -> DMatrix<Complex64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

pub fn from_na(m: &DMatrix<Complex64>) -> CMatrix {
    let rows: Vec<Vec<Complex64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
    CMatrix::from_rows(&rows).unwrap()
}

/// Haar-ish unitary from the QR factor of a random complex matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    g.qr().q()
}

pub fn random_qw_coin(d: usize, rng: &mut ChaCha8Rng) -> CoinMatrix {
    let shift = if rng.gen_bool(0.5) { ShiftType::M } else { ShiftType::F };
    CoinMatrix::new(d, from_na(&random_unitary(2 * d, rng)), shift, WalkClass::QW).unwrap()
}

/// Random column-stochastic coin.
pub fn random_crw_coin(d: usize, rng: &mut ChaCha8Rng) -> CoinMatrix {
    let n = 2 * d;
    let mut rows = vec![vec![0.0; n]; n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = col.iter().sum();
        for i in 0..n {
            rows[i][j] = col[i] / s;
        }
    }
    CoinMatrix::from_real_rows(d, &rows, ShiftType::M, WalkClass::CRW).unwrap()
}

/// The walk operator on `C^{2d} ⊗ ℓ²(T^d_N)`: component `2j` (0-based) of
/// the new state at `x` is row `2j` of `A` applied at `x + e_j`, component
/// `2j+1` is row `2j+1` applied at `x - e_j`.
pub fn site_matrix(coin: &CoinMatrix, n: usize) -> DMatrix<Complex64> {
    let d = coin.d();
    let m = 2 * d;
    let sites = n.pow(d as u32);
    let a = coin.entries();
    let mut out = DMatrix::zeros(m * sites, m * sites);
    let coords = |mut f: usize| {
        let mut x = vec![0i64; d];
        for j in (0..d).rev() {
            x[j] = (f % n) as i64;
            f /= n;
        }
        x
    };
    let flat = |x: &[i64]| x.iter().fold(0usize, |f, &v| f * n + v.rem_euclid(n as i64) as usize);
    for s in 0..sites {
        let x = coords(s);
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

/// `det(I - uM)` of the site-space operator by nalgebra's LU.
pub fn site_det(coin: &CoinMatrix, torus: &TorusSpec, u: f64) -> Complex64 {
    let m = site_matrix(coin, torus.n);
    let eye = DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    (eye - m * Complex64::new(u, 0.0)).determinant()
}

/// `Σ log(1 - uλ)` over the eigenvalues of the site-space operator. For
/// `|u| < 1` with a unitary or stochastic coin every factor has positive
/// real part, so the principal logs add up without branch ambiguity.
pub fn site_log_det(coin: &CoinMatrix, torus: &TorusSpec, u: f64) -> Complex64 {
    let m = site_matrix(coin, torus.n);
    let eig = m.schur().eigenvalues().expect("complex Schur form is triangular");
    eig.iter().map(|l| (Complex64::new(1.0, 0.0) - l * u).ln()).sum()
}

/// `Ξ_n(x)`: the sum of `P_{c_n} A ⋯ P_{c_1} A` over all step sequences,
/// where choosing component 0 moves left and component 1 moves right.
pub fn path_sum(coin: &CoinMatrix, n: usize) -> Vec<(i64, DMatrix<Complex64>)> {
    let a = to_na(coin.entries());
    let proj = |c: usize| {
        let mut p = DMatrix::<Complex64>::zeros(2, 2);
        p[(c, c)] = Complex64::new(1.0, 0.0);
        p * &a
    };
    let steps = [proj(0), proj(1)];
    let mut out = vec![DMatrix::<Complex64>::zeros(2, 2); 2 * n + 1];
    for mask in 0..(1usize << n) {
        let mut prod = DMatrix::<Complex64>::identity(2, 2);
        let mut x = 0i64;
        for t in 0..n {
            let c = (mask >> t) & 1;
            prod = &steps[c] * prod;
            x += if c == 0 { -1 } else { 1 };
        }
        out[(x + n as i64) as usize] += prod;
    }
    out.into_iter().enumerate().map(|(i, m)| (i as i64 - n as i64, m)).collect()
}

/// `binom(2n, n) / 4^n` by exact integer arithmetic (n <= 60).
pub fn central_binomial(n: u32) -> f64 {
    let mut c: u128 = 1;
    for k in 0..n as u128 {
        c = c * (2 * n as u128 - k) / (k + 1);
    }
    (c as f64) / 4f64.powi(n as i32)
}

/// Composite Simpson rule for a smooth periodic function on `[0, 2π]`,
/// divided by `2π`.
pub fn simpson_mean<F: Fn(f64) -> f64>(f: F, panels: usize) -> f64 {
    let h = 2.0 * std::f64::consts::PI / panels as f64;
    let mut s = f(0.0) + f(2.0 * std::f64::consts::PI);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    s * h / 3.0 / (2.0 * std::f64::consts::PI)
}
