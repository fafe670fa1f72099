//! Site-space evolution of walks on the torus `T^d_N` and on `Z^d`:
//! states, matrix weights `Φ_n(x)`, return traces and measures.

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::linalg::CMatrix;
use crate::walk::{CoinMatrix, TorusSpec, WalkClass};
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

/// Largest step count accepted by `matrix_weight` and `return_trace`.
pub const STEP_CAP: usize = 20;

/// Where a state lives: a torus, or the lattice window `[-radius, radius]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Domain {
    Torus(TorusSpec),
    Lattice { d: usize, radius: usize },
}

impl Domain {
    pub fn d(&self) -> usize {
        match *self {
            Domain::Torus(t) => t.d,
            Domain::Lattice { d, .. } => d,
        }
    }

    fn side(&self) -> usize {
        match *self {
            Domain::Torus(t) => t.n,
            Domain::Lattice { radius, .. } => 2 * radius + 1,
        }
    }

    pub fn num_sites(&self) -> usize {
        self.side().pow(self.d() as u32)
    }

    /// Site coordinates of flat index `flat` (last axis fastest). Torus
    /// coordinates are in `0..N`, lattice coordinates in `-radius..=radius`.
    pub fn coords(&self, mut flat: usize) -> Vec<i64> {
        let side = self.side();
        let shift = match *self {
            Domain::Torus(_) => 0,
            Domain::Lattice { radius, .. } => radius as i64,
        };
        let mut c = vec![0; self.d()];
        for slot in c.iter_mut().rev() {
            *slot = (flat % side) as i64 - shift;
            flat /= side;
        }
        c
    }

    /// Flat index of `x`; torus coordinates wrap, lattice ones outside the
    /// window give `None`.
    pub fn index(&self, x: &[i64]) -> Option<usize> {
        let side = self.side() as i64;
        let mut flat = 0usize;
        for &xi in x {
            let v = match *self {
                Domain::Torus(_) => xi.rem_euclid(side),
                Domain::Lattice { radius, .. } => {
                    let v = xi + radius as i64;
                    if v < 0 || v >= side {
                        return None;
                    }
                    v
                }
            };
            flat = flat * side as usize + v as usize;
        }
        Some(flat)
    }

    fn origin(&self) -> usize {
        self.index(&vec![0; self.d()]).expect("origin is in every domain")
    }

    fn grown(&self) -> Domain {
        match *self {
            Domain::Torus(t) => Domain::Torus(t),
            Domain::Lattice { d, radius } => Domain::Lattice { d, radius: radius + 1 },
        }
    }
}

/// `Ψ_n`: a `2d`-component complex vector at every site.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    domain: Domain,
    /// `values[site * 2d + component]`.
    values: Vec<Complex64>,
}

impl WalkState {
    /// `δ_0 ⊗ psi0`.
    pub fn delta(domain: Domain, psi0: &[Complex64]) -> Result<Self> {
        let n = 2 * domain.d();
        if psi0.len() != n {
            return Err(Error::Dimension(format!(
                "initial vector has length {}, expected 2d = {n}",
                psi0.len()
            )));
        }
        let mut values = vec![Complex64::zero(); domain.num_sites() * n];
        let o = domain.origin();
        values[o * n..(o + 1) * n].copy_from_slice(psi0);
        Ok(WalkState { domain, values })
    }

    pub fn zero(domain: Domain) -> Self {
        WalkState {
            domain,
            values: vec![Complex64::zero(); domain.num_sites() * 2 * domain.d()],
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn at(&self, x: &[i64]) -> Option<&[Complex64]> {
        let n = 2 * self.domain.d();
        self.domain.index(x).map(|f| &self.values[f * n..(f + 1) * n])
    }

    pub fn sites(&self) -> impl Iterator<Item = (Vec<i64>, &[Complex64])> {
        let n = 2 * self.domain.d();
        self.values
            .chunks(n)
            .enumerate()
            .map(move |(f, v)| (self.domain.coords(f), v))
    }

    /// CSV `site,component_index,re,im`; site coordinates joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("site,component_index,re,im\n");
        for (x, v) in self.sites() {
            let site = join_coords(&x);
            for (c, z) in v.iter().enumerate() {
                out.push_str(&format!("{site},{},{},{}\n", c + 1, fmt_f64(z.re), fmt_f64(z.im)));
            }
        }
        out
    }
}

fn join_coords(x: &[i64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn check_coin(coin: &CoinMatrix, domain: &Domain) -> Result<()> {
    if coin.d() != domain.d() {
        return Err(Error::Dimension(format!(
            "coin has d = {}, state has d = {}",
            coin.d(),
            domain.d()
        )));
    }
    Ok(())
}

/// Generic one-step update on `w`-column blocks per site: after applying
/// `A`, component `2j` moves to `x - e_j` and component `2j+1` to `x + e_j`.
fn step_blocks(coin: &CoinMatrix, domain: Domain, values: &[Complex64], w: usize) -> (Domain, Vec<Complex64>) {
    let d = domain.d();
    let n = 2 * d;
    let a = coin.entries();
    let next = domain.grown();
    let mut out = vec![Complex64::zero(); next.num_sites() * n * w];
    let block = n * w;
    for f in 0..domain.num_sites() {
        let src = &values[f * block..(f + 1) * block];
        if src.iter().all(|z| z.is_zero()) {
            continue;
        }
        let x = domain.coords(f);
        for i in 0..n {
            let j = i / 2;
            let mut y = x.clone();
            y[j] += if i % 2 == 0 { -1 } else { 1 };
            let g = next.index(&y).expect("grown window contains every neighbour");
            for col in 0..w {
                let mut acc = Complex64::zero();
                for k in 0..n {
                    acc += a[(i, k)] * src[k * w + col];
                }
                out[g * block + i * w + col] += acc;
            }
        }
    }
    (next, out)
}

/// One step `Ψ_{n+1}(x) = Σ_j P_{2j-1} A Ψ_n(x + e_j) + P_{2j} A Ψ_n(x - e_j)`.
/// Lattice windows grow by one in every direction.
pub fn evolve(state: &WalkState, coin: &CoinMatrix) -> Result<WalkState> {
    check_coin(coin, &state.domain)?;
    let (domain, values) = step_blocks(coin, state.domain, &state.values, 1);
    Ok(WalkState { domain, values })
}

/// Per-site `Φ_n(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixWeightField {
    domain: Domain,
    steps: usize,
    /// `data[site * (2d)^2 + row * 2d + col]`.
    data: Vec<Complex64>,
}

impl MatrixWeightField {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn at(&self, x: &[i64]) -> Option<CMatrix> {
        let n = 2 * self.domain.d();
        let f = self.domain.index(x)?;
        let rows: Vec<Vec<Complex64>> = self.data[f * n * n..(f + 1) * n * n]
            .chunks(n)
            .map(|r| r.to_vec())
            .collect();
        CMatrix::from_rows(&rows)
    }
}

fn check_steps(n: usize) -> Result<()> {
    if n > STEP_CAP {
        return Err(Error::CapExceeded {
            requested: n,
            cap: STEP_CAP,
        });
    }
    Ok(())
}

fn weights_on(coin: &CoinMatrix, start: Domain, n: usize) -> MatrixWeightField {
    let m = 2 * coin.d();
    let mut data = vec![Complex64::zero(); start.num_sites() * m * m];
    let o = start.origin();
    for i in 0..m {
        data[o * m * m + i * m + i] = Complex64::new(1.0, 0.0);
    }
    let mut domain = start;
    for _ in 0..n {
        let (d2, v2) = step_blocks(coin, domain, &data, m);
        domain = d2;
        data = v2;
    }
    MatrixWeightField { domain, steps: n, data }
}

/// `Φ_n(x)` on `Z^d` by the recursion from `Φ_0 = I δ_0`, on the window
/// `[-n, n]^d`.
pub fn matrix_weight(coin: &CoinMatrix, n: usize) -> Result<MatrixWeightField> {
    check_steps(n)?;
    Ok(weights_on(coin, Domain::Lattice { d: coin.d(), radius: 0 }, n))
}

/// `Φ_n(x)` on the torus.
pub fn matrix_weight_torus(coin: &CoinMatrix, torus: TorusSpec, n: usize) -> Result<MatrixWeightField> {
    check_steps(n)?;
    if coin.d() != torus.d {
        return Err(Error::Dimension("coin and torus dimensions differ".into()));
    }
    Ok(weights_on(coin, Domain::Torus(torus), n))
}

/// `Tr Φ_r(0)` on `Z^d`.
pub fn return_trace(coin: &CoinMatrix, r: usize) -> Result<Complex64> {
    if r == 0 {
        return Err(Error::Domain("r must be >= 1".into()));
    }
    let w = matrix_weight(coin, r)?;
    Ok(w.at(&vec![0; coin.d()]).expect("origin").trace())
}

/// The exponent `p` of `μ_n = ||Ψ_n||^p` for a walk class: 1 for random
/// walks, 2 otherwise.
pub fn default_norm_power(class: WalkClass) -> u32 {
    match class {
        WalkClass::RW | WalkClass::CRW => 1,
        WalkClass::QW | WalkClass::General => 2,
    }
}

/// `μ(x) = ||Ψ(x)||_p^p` at every site (flat order).
pub fn measure(state: &WalkState, p: u32) -> Result<Vec<f64>> {
    let n = 2 * state.domain.d();
    match p {
        1 => Ok(state.values.chunks(n).map(|v| v.iter().map(|z| z.norm()).sum()).collect()),
        2 => Ok(state.values.chunks(n).map(|v| v.iter().map(|z| z.norm_sqr()).sum()).collect()),
        _ => Err(Error::Domain(format!("measure power must be 1 or 2, got {p}"))),
    }
}

/// CSV `site,value`.
pub fn measure_csv(state: &WalkState, mu: &[f64]) -> String {
    let mut out = String::from("site,value\n");
    for (f, m) in mu.iter().enumerate() {
        out.push_str(&format!("{},{}\n", join_coords(&state.domain.coords(f)), fmt_f64(*m)));
    }
    out
}

/// `μ_r(0)` after `r` steps on `Z^d` from `δ_0 ⊗ psi0`, with the class
/// default power. For random walks this equals `Tr Φ_r(0)` when summed over
/// a basis of starting states; for quantum walks the two differ.
pub fn return_probability(coin: &CoinMatrix, r: usize, psi0: &[Complex64]) -> Result<f64> {
    check_steps(r)?;
    let mut s = WalkState::delta(Domain::Lattice { d: coin.d(), radius: 0 }, psi0)?;
    for _ in 0..r {
        s = evolve(&s, coin)?;
    }
    let mu = measure(&s, default_norm_power(coin.class()))?;
    Ok(mu[s.domain.origin()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{qw_coin, rw_coin, ShiftType};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hadamard_single_step() {
        let h = qw_coin(std::f64::consts::FRAC_PI_4, ShiftType::M);
        let s0 = WalkState::delta(Domain::Lattice { d: 1, radius: 0 }, &[c(1.0), c(0.0)]).unwrap();
        let s1 = evolve(&s0, &h).unwrap();
        // AΨ = (1/√2, 1/√2): the first component moves left, the second right
        let left = s1.at(&[-1]).unwrap();
        let right = s1.at(&[1]).unwrap();
        assert!((left[0].re - FRAC_1_SQRT_2).abs() < 1e-15 && left[1].is_zero());
        assert!((right[1].re - FRAC_1_SQRT_2).abs() < 1e-15 && right[0].is_zero());
        assert!(s1.at(&[0]).unwrap().iter().all(|z| z.is_zero()));
    }

    #[test]
    fn rw_single_step_measure() {
        let a = rw_coin(1).unwrap();
        let s0 = WalkState::delta(Domain::Lattice { d: 1, radius: 0 }, &[c(0.5), c(0.5)]).unwrap();
        let s1 = evolve(&s0, &a).unwrap();
        let mu = measure(&s1, 1).unwrap();
        assert_eq!(mu, vec![0.5, 0.0, 0.5]);
    }

    #[test]
    fn zero_state_stays_zero() {
        let h = qw_coin(0.4, ShiftType::F);
        let s = WalkState::zero(Domain::Torus(TorusSpec::new(1, 5).unwrap()));
        assert_eq!(evolve(&s, &h).unwrap(), s);
    }

    #[test]
    fn weights_first_steps() {
        let h = qw_coin(0.9, ShiftType::M);
        let w0 = matrix_weight(&h, 0).unwrap();
        assert_eq!(w0.at(&[0]).unwrap(), CMatrix::identity(2));
        let w1 = matrix_weight(&h, 1).unwrap();
        let a = h.entries();
        let p1a = CMatrix::from_rows(&[a.row(0).to_vec(), vec![Complex64::zero(); 2]]).unwrap();
        let p2a = CMatrix::from_rows(&[vec![Complex64::zero(); 2], a.row(1).to_vec()]).unwrap();
        assert_eq!(w1.at(&[-1]).unwrap(), p1a);
        assert_eq!(w1.at(&[1]).unwrap(), p2a);
        let w3 = matrix_weight(&h, 3).unwrap();
        assert!(w3.at(&[0]).unwrap().max_abs_diff(&CMatrix::zeros(2)) == 0.0);
        assert!(matches!(matrix_weight(&h, 21), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn return_traces() {
        let rw = rw_coin(1).unwrap();
        assert!((return_trace(&rw, 2).unwrap() - c(0.5)).norm() < 1e-15);
        let h = qw_coin(std::f64::consts::FRAC_PI_4, ShiftType::M);
        assert!((return_trace(&h, 2).unwrap() - c(1.0)).norm() < 1e-15);
        assert!(return_trace(&h, 5).unwrap().norm() < 1e-15);
    }

    #[test]
    fn return_probability_is_column_sum() {
        let rw = rw_coin(2).unwrap();
        let w = matrix_weight(&rw, 4).unwrap().at(&[0, 0]).unwrap();
        for i in 0..4 {
            let mut e = vec![Complex64::zero(); 4];
            e[i] = c(1.0);
            let p = return_probability(&rw, 4, &e).unwrap();
            let col: f64 = (0..4).map(|k| w[(k, i)].re).sum();
            assert!((p - col).abs() < 1e-14);
        }
    }

    #[test]
    fn torus_fold_matches_lattice() {
        let h = qw_coin(0.5, ShiftType::F);
        let n = 4;
        let torus = TorusSpec::new(1, 2 * n + 1).unwrap();
        let lat = matrix_weight(&h, n).unwrap();
        let tor = matrix_weight_torus(&h, torus, n).unwrap();
        for x in -(n as i64)..=n as i64 {
            let a = lat.at(&[x]).unwrap();
            let b = tor.at(&[x]).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-15);
        }
    }

    #[test]
    fn measure_conservation_short() {
        let h = qw_coin(std::f64::consts::FRAC_PI_4, ShiftType::M);
        let mut s = WalkState::delta(Domain::Lattice { d: 1, radius: 0 }, &[c(FRAC_1_SQRT_2), Complex64::new(0.0, FRAC_1_SQRT_2)]).unwrap();
        for _ in 0..2 {
            s = evolve(&s, &h).unwrap();
        }
        let total: f64 = measure(&s, 2).unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let rw = rw_coin(2).unwrap();
        let mut s = WalkState::delta(Domain::Torus(TorusSpec::new(2, 4).unwrap()), &[c(0.25); 4]).unwrap();
        for _ in 0..3 {
            s = evolve(&s, &rw).unwrap();
        }
        let total: f64 = measure(&s, 1).unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_dumps() {
        let s = WalkState::delta(Domain::Lattice { d: 2, radius: 1 }, &[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("site,component_index,re,im\n-1;-1,1,"));
        assert_eq!(csv.lines().count(), 1 + 9 * 4);
        let mu = measure(&s, 2).unwrap();
        assert!(measure_csv(&s, &mu).contains("\n0;0,1.0000000000000000e0\n"));
        assert!(measure(&s, 3).is_err());
    }
}
