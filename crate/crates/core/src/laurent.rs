//! Laurent polynomials with complex coefficients carrying an optional
//! rational valuation (the exponent of the leading term of a Puiseux series).

use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Rational = Ratio<i64>;
pub type Exponent = Vec<i32>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    pub value: Complex64,
    pub valuation: Rational,
}

impl Coefficient {
    pub fn constant(value: Complex64) -> Self {
        Coefficient {
            value,
            valuation: Rational::zero(),
        }
    }

    /// Non-archimedean norm `e^{-val}`.
    pub fn norm(&self) -> f64 {
        let v = *self.valuation.numer() as f64 / *self.valuation.denom() as f64;
        (-v).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPolynomial {
    k: usize,
    terms: BTreeMap<Exponent, Coefficient>,
}

impl LaurentPolynomial {
    pub fn zero(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Dimension("Laurent polynomial needs k >= 1 variables".into()));
        }
        Ok(LaurentPolynomial {
            k,
            terms: BTreeMap::new(),
        })
    }

    /// Builds from `(exponent, coefficient)` pairs. Repeated exponents are
    /// added; zero coefficients are dropped.
    pub fn from_terms<I>(k: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Complex64)>,
    {
        let mut p = Self::zero(k)?;
        for (e, c) in terms {
            p.add_term(e, Coefficient::constant(c))?;
        }
        Ok(p)
    }

    pub fn from_real_terms<I>(k: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, f64)>,
    {
        Self::from_terms(k, terms.into_iter().map(|(e, c)| (e, Complex64::new(c, 0.0))))
    }

    pub fn add_term(&mut self, exp: Exponent, coeff: Coefficient) -> Result<()> {
        if exp.len() != self.k {
            return Err(Error::Dimension(format!(
                "exponent {exp:?} has length {}, polynomial has k = {}",
                exp.len(),
                self.k
            )));
        }
        let slot = self.terms.entry(exp.clone()).or_insert(Coefficient {
            value: Complex64::zero(),
            valuation: coeff.valuation,
        });
        slot.value += coeff.value;
        slot.valuation = slot.valuation.min(coeff.valuation);
        if slot.value.is_zero() {
            self.terms.remove(&exp);
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[i32]) -> Option<Complex64> {
        self.terms.get(exp).map(|c| c.value)
    }

    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.k);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(z)
                    .fold(c.value, |acc, (&p, zi)| acc * zi.powi(p))
            })
            .sum()
    }

    /// `P(e^{x_1 + iθ_1}, ..., e^{x_k + iθ_k})`.
    pub fn eval_polar(&self, x: &[f64], theta: &[f64]) -> Complex64 {
        let z: Vec<Complex64> = x
            .iter()
            .zip(theta)
            .map(|(&r, &t)| Complex64::from_polar(r.exp(), t))
            .collect();
        self.eval(&z)
    }

    /// Multiplies each coefficient `a_I` by `e^{<I, t>}`, so that
    /// `Q(z) = P(e^{t} z)`.
    pub fn rescale(&self, t: &[f64]) -> LaurentPolynomial {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let s: f64 = e.iter().zip(t).map(|(&i, &tj)| i as f64 * tj).sum();
                (
                    e.clone(),
                    Coefficient {
                        value: c.value * s.exp(),
                        valuation: c.valuation,
                    },
                )
            })
            .collect();
        LaurentPolynomial { k: self.k, terms }
    }

    /// Splits `P` by the exponent of its last variable:
    /// `P = Σ_m c_m(z_1..z_{k-1}) z_k^m`. Returned in increasing `m`.
    pub fn last_variable_slices(&self) -> Vec<(i32, LaurentPolynomial)> {
        let mut by_m: BTreeMap<i32, LaurentPolynomial> = BTreeMap::new();
        let kp = self.k.saturating_sub(1);
        for (e, c) in &self.terms {
            let m = *e.last().expect("k >= 1");
            let entry = by_m.entry(m).or_insert_with(|| LaurentPolynomial {
                k: kp,
                terms: BTreeMap::new(),
            });
            entry.terms.insert(e[..kp].to_vec(), *c);
        }
        by_m.into_iter().collect()
    }

    /// Exponent range `(min, max)` in variable `j`.
    pub fn degree_span(&self, j: usize) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|e| e[j]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), m| (lo.min(m), hi.max(m))))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&LaurentJson::from(self)).expect("polynomial serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: LaurentJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<i32>,
    re: f64,
    im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    val: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct LaurentJson {
    k: usize,
    terms: Vec<TermJson>,
}

impl From<&LaurentPolynomial> for LaurentJson {
    fn from(p: &LaurentPolynomial) -> Self {
        LaurentJson {
            k: p.k,
            terms: p
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    re: c.value.re,
                    im: c.value.im,
                    val: (!c.valuation.is_zero()).then(|| c.valuation.to_string()),
                })
                .collect(),
        }
    }
}

impl TryFrom<LaurentJson> for LaurentPolynomial {
    type Error = Error;
    fn try_from(raw: LaurentJson) -> Result<Self> {
        let mut p = LaurentPolynomial::zero(raw.k)?;
        for t in raw.terms {
            let valuation = match &t.val {
                Some(s) => parse_rational(s)?,
                None => Rational::zero(),
            };
            p.add_term(
                t.exp,
                Coefficient {
                    value: Complex64::new(t.re, t.im),
                    valuation,
                },
            )?;
        }
        Ok(p)
    }
}
