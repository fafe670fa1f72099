//! Coins, shift conventions and the momentum-space walk matrix.
//!
//! A walk on `T^d_N` is driven by a `2d x 2d` coin `A`. Row `2j-1` of `A`
//! feeds the step towards `-e_j`, row `2j` the step towards `+e_j`. In
//! momentum space the one-step operator is
//!
//! ```text
//! M(k) = sum_j ( e^{i k_j} P_{2j-1} A + e^{-i k_j} P_{2j} A )
//! ```
//!
//! where `P_i` projects onto the `i`-th basis vector, i.e. `M(k)` is `A` with
//! its rows multiplied by the phases `e^{+ik_1}, e^{-ik_1}, e^{+ik_2}, ...`.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance for the unitarity and stochasticity checks at construction.
pub const CLASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftType {
    /// Moving shift.
    M,
    /// Flip-flop shift, `A^(f) = (I_d ⊗ σ) A`.
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WalkClass {
    RW,
    CRW,
    QW,
    General,
}

/// Parametric family a coin was built from, when known.
///
/// Used to enforce the `u`-ranges on which the closed forms are stated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CoinFamily {
    /// The two-state quantum coin with angle `xi`.
    Qw { xi: f64 },
    /// The simple symmetric random walk coin.
    SymmetricRw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoinMatrix {
    d: usize,
    entries: CMatrix,
    shift: ShiftType,
    class: WalkClass,
    family: Option<CoinFamily>,
}

impl CoinMatrix {
    /// Validates the declared class against the entries.
    pub fn new(d: usize, entries: CMatrix, shift: ShiftType, class: WalkClass) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("coin dimension d must be >= 1".into()));
        }
        if entries.dim() != 2 * d {
            return Err(Error::Dimension(format!(
                "coin for d = {d} must be {n}x{n}, got {m}x{m}",
                n = 2 * d,
                m = entries.dim()
            )));
        }
        validate_class(&entries, class)?;
        Ok(CoinMatrix {
            d,
            entries,
            shift,
            class,
            family: None,
        })
    }

    pub fn from_real_rows(
        d: usize,
        rows: &[Vec<f64>],
        shift: ShiftType,
        class: WalkClass,
    ) -> Result<Self> {
        let m = CMatrix::from_real_rows(rows)
            .ok_or_else(|| Error::Dimension("coin rows must form a square matrix".into()))?;
        Self::new(d, m, shift, class)
    }

    pub fn with_family(mut self, family: CoinFamily) -> Self {
        self.family = Some(family);
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn shift(&self) -> ShiftType {
        self.shift
    }

    pub fn class(&self) -> WalkClass {
        self.class
    }

    pub fn family(&self) -> Option<CoinFamily> {
        self.family
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CoinJson::from(self)).expect("coin serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: CoinJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

fn validate_class(a: &CMatrix, class: WalkClass) -> Result<()> {
    let n = a.dim();
    match class {
        WalkClass::General => Ok(()),
        WalkClass::QW => {
            let prod = a.conj_transpose().mul(a);
            let dev = prod.max_abs_diff(&CMatrix::identity(n));
            if dev > CLASS_TOL {
                return Err(Error::InvalidCoin(format!(
                    "QW coin is not unitary (|A*A - I| = {dev:.3e})"
                )));
            }
            Ok(())
        }
        WalkClass::RW | WalkClass::CRW => {
            for i in 0..n {
                for j in 0..n {
                    let x = a[(i, j)];
                    if x.im.abs() > CLASS_TOL || x.re < -CLASS_TOL || x.re > 1.0 + CLASS_TOL {
                        return Err(Error::InvalidCoin(format!(
                            "entry ({i},{j}) = {x} is not a probability"
                        )));
                    }
                }
            }
            for j in 0..n {
                let s: f64 = (0..n).map(|i| a[(i, j)].re).sum();
                if (s - 1.0).abs() > CLASS_TOL {
                    return Err(Error::InvalidCoin(format!("column {j} sums to {s}, not 1")));
                }
            }
            if class == WalkClass::RW {
                for i in 0..n {
                    let first = a[(i, 0)];
                    if a.row(i).iter().any(|x| (x - first).norm() > CLASS_TOL) {
                        return Err(Error::InvalidCoin(format!("RW coin row {i} is not constant")));
                    }
                }
            }
            Ok(())
        }
    }
}

/// The two-state quantum coin `[[cos ξ, sin ξ], [sin ξ, -cos ξ]]`, or its
/// row-swapped flip-flop form.
pub fn qw_coin(xi: f64, shift: ShiftType) -> CoinMatrix {
    let (s, c) = xi.sin_cos();
    let rows = match shift {
        ShiftType::M => vec![vec![c, s], vec![s, -c]],
        ShiftType::F => vec![vec![s, -c], vec![c, s]],
    };
    CoinMatrix::from_real_rows(1, &rows, shift, WalkClass::QW)
        .expect("real rotation-reflection is unitary")
        .with_family(CoinFamily::Qw { xi })
}

/// The simple symmetric random walk coin: every entry `1/(2d)`.
pub fn rw_coin(d: usize) -> Result<CoinMatrix> {
    if d == 0 {
        return Err(Error::Dimension("rw_coin needs d >= 1".into()));
    }
    let n = 2 * d;
    let p = 1.0 / n as f64;
    let rows = vec![vec![p; n]; n];
    Ok(CoinMatrix::from_real_rows(d, &rows, ShiftType::M, WalkClass::RW)?
        .with_family(CoinFamily::SymmetricRw))
}

/// `(I_d ⊗ σ) A`: swaps rows `2j-1` and `2j` of an M-type coin.
pub fn to_flip_flop(coin: &CoinMatrix) -> Result<CoinMatrix> {
    if coin.shift == ShiftType::F {
        return Err(Error::State("coin is already F-type".into()));
    }
    let mut rows = coin.entries.rows();
    for j in 0..coin.d {
        rows.swap(2 * j, 2 * j + 1);
    }
    Ok(CoinMatrix {
        d: coin.d,
        entries: CMatrix::from_rows(&rows).expect("square"),
        shift: ShiftType::F,
        class: coin.class,
        family: coin.family,
    })
}

/// Phase applied to coin row `i` at momentum `k`.
#[inline]
pub(crate) fn row_phase(i: usize, k: &[f64]) -> Complex64 {
    let theta = k[i / 2];
    if i % 2 == 0 {
        Complex64::from_polar(1.0, theta)
    } else {
        Complex64::from_polar(1.0, -theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMatrix {
    pub k: Vec<f64>,
    pub matrix: CMatrix,
}

fn check_k(coin: &CoinMatrix, k: &[f64]) -> Result<()> {
    if k.len() != coin.d {
        return Err(Error::Dimension(format!(
            "momentum vector has length {}, coin has d = {}",
            k.len(),
            coin.d
        )));
    }
    Ok(())
}

pub(crate) fn momentum_matrix_unchecked(coin: &CoinMatrix, k: &[f64]) -> CMatrix {
    let n = 2 * coin.d;
    let mut m = coin.entries.clone();
    for i in 0..n {
        let ph = row_phase(i, k);
        for j in 0..n {
            m[(i, j)] *= ph;
        }
    }
    m
}

pub fn build_momentum_matrix(coin: &CoinMatrix, k: &[f64]) -> Result<MomentumMatrix> {
    check_k(coin, k)?;
    Ok(MomentumMatrix {
        k: k.to_vec(),
        matrix: momentum_matrix_unchecked(coin, k),
    })
}

pub(crate) fn char_det_unchecked(coin: &CoinMatrix, k: &[f64], u: f64) -> Complex64 {
    let n = 2 * coin.d;
    let mut m = CMatrix::identity(n);
    for i in 0..n {
        let ph = row_phase(i, k) * u;
        for j in 0..n {
            m[(i, j)] -= ph * coin.entries[(i, j)];
        }
    }
    m.det()
}

/// `det(I_{2d} - u M(k))` by direct elimination.
pub fn char_det(coin: &CoinMatrix, k: &[f64], u: f64) -> Result<Complex64> {
    check_k(coin, k)?;
    Ok(char_det_unchecked(coin, k, u))
}

/// The torus `T^d_N` and its momentum grid `k_j = 2π m_j / N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusSpec {
    pub d: usize,
    pub n: usize,
}

impl TorusSpec {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::Dimension(format!("torus needs d >= 1 and N >= 1 (d = {d}, N = {n})")));
        }
        Ok(TorusSpec { d, n })
    }

    pub fn num_sites(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Integer index of grid point `flat` (last coordinate fastest).
    pub fn index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn momentum(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .map(|&m| 2.0 * PI * m as f64 / self.n as f64)
            .collect()
    }

    pub fn momentum_points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.num_sites()).map(move |f| self.momentum(&self.index(f)))
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct CoinJson {
    d: usize,
    shift: ShiftType,
    class: WalkClass,
    entries: Vec<Vec<ComplexJson>>,
}

impl From<&CoinMatrix> for CoinJson {
    fn from(c: &CoinMatrix) -> Self {
        CoinJson {
            d: c.d,
            shift: c.shift,
            class: c.class,
            entries: c
                .entries
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(|z| ComplexJson { re: z.re, im: z.im }).collect())
                .collect(),
        }
    }
}

impl TryFrom<CoinJson> for CoinMatrix {
    type Error = Error;
    fn try_from(raw: CoinJson) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = raw
            .entries
            .into_iter()
            .map(|r| r.into_iter().map(|z| Complex64::new(z.re, z.im)).collect())
            .collect();
        let m = CMatrix::from_rows(&rows)
            .ok_or_else(|| Error::Parse("coin entries must be a square matrix".into()))?;
        CoinMatrix::new(raw.d, m, raw.shift, raw.class)
    }
}
