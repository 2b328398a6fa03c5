//! Fractional power series and their evaluation on the slit unit disk.
//!
//! Powers `z^e` use the principal logarithm, so the domain is the open unit
//! disk with the negative real axis removed and values on the positive real
//! axis are real.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Mu, Result};

pub const DEFAULT_TRUNCATION: u32 = 64;

/// A point `r·e^{iθ}` with `0 ≤ r < 1` and `θ ∈ (−π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct DiskPoint {
    r: f64,
    theta: f64,
}

#[derive(Deserialize)]
struct RawPoint {
    r: f64,
    theta: f64,
}

impl TryFrom<RawPoint> for DiskPoint {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        DiskPoint::new(raw.r, raw.theta)
    }
}

impl DiskPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::OutsideDisk { r });
        }
        if !theta.is_finite() || theta.abs() >= PI {
            return Err(Error::OnSlit { theta });
        }
        Ok(DiskPoint { r, theta })
    }

    /// The point `z = r` on the positive real axis.
    pub fn real(r: f64) -> Result<Self> {
        Self::new(r, 0.0)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// Which way the non-leading terms enter: `z + Σ` (class A_μ) or `z − Σ` (X_μ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn product(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// `z ± Σ_{n=2}^{N} aₙ z^{μn}` with every `aₙ ≥ 0`.
///
/// F(0) = 0 and F′(0) = 1 hold structurally: the leading term is always `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct FractionalSeries {
    mu: Mu,
    sign: Sign,
    /// `coeffs[i]` holds `a_{i+2}`.
    coeffs: Vec<f64>,
}

impl FractionalSeries {
    /// The series `F(z) = z` truncated at `truncation`.
    pub fn identity(mu: Mu, truncation: u32) -> Result<Self> {
        Self::from_dense(mu, Sign::Plus, vec![0.0; dense_len(truncation)?])
    }

    /// The Hadamard identity `z + Σ z^{μn}`.
    pub fn all_ones(mu: Mu, truncation: u32) -> Result<Self> {
        Self::from_dense(mu, Sign::Plus, vec![1.0; dense_len(truncation)?])
    }

    pub fn new(
        mu: Mu,
        sign: Sign,
        truncation: u32,
        coeffs: impl IntoIterator<Item = (u32, f64)>,
    ) -> Result<Self> {
        let mut dense = vec![0.0; dense_len(truncation)?];
        for (n, a) in coeffs {
            if n < 2 || n > truncation {
                return Err(Error::InvalidSeries(format!(
                    "coefficient index {n} outside 2..={truncation}"
                )));
            }
            dense[(n - 2) as usize] = a;
        }
        Self::from_dense(mu, sign, dense)
    }

    /// Builds from `a_2, a_3, …, a_N`.
    pub fn from_dense(mu: Mu, sign: Sign, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSeries("truncation must be at least 2".into()));
        }
        if let Some((i, a)) = coeffs
            .iter()
            .enumerate()
            .find(|(_, a)| !a.is_finite() || **a < 0.0)
        {
            return Err(Error::InvalidSeries(format!(
                "coefficient a_{} = {a} must be finite and nonnegative",
                i + 2
            )));
        }
        Ok(FractionalSeries { mu, sign, coeffs })
    }

    /// `z ± a z^{μn}`.
    pub fn single_term(mu: Mu, sign: Sign, n: u32, a: f64, truncation: u32) -> Result<Self> {
        Self::new(mu, sign, truncation, [(n, a)])
    }

    pub fn mu(&self) -> Mu {
        self.mu
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn truncation(&self) -> u32 {
        self.coeffs.len() as u32 + 1
    }

    /// `aₙ`, zero outside `2..=N`.
    pub fn coeff(&self, n: u32) -> f64 {
        if n < 2 {
            return 0.0;
        }
        self.coeffs.get((n - 2) as usize).copied().unwrap_or(0.0)
    }

    /// The coefficient of `z^{μn}` with the sign applied.
    pub fn signed_coeff(&self, n: u32) -> f64 {
        self.sign.factor() * self.coeff(n)
    }

    /// `(n, aₙ)` for every nonzero coefficient, in increasing `n`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, a)| (i as u32 + 2, *a))
    }

    /// Same μ, sign and truncation, coefficients replaced by `f(n, aₙ)`.
    pub(crate) fn map_coeffs(&self, f: impl Fn(u32, f64) -> f64) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| f(i as u32 + 2, *a))
            .collect();
        Self::from_dense(self.mu, self.sign, coeffs)
    }

    pub fn to_general(&self) -> GeneralSeries {
        let mut terms = Vec::with_capacity(self.coeffs.len() + 1);
        terms.push(Term { exponent: 1.0, coefficient: 1.0 });
        terms.extend(self.terms().map(|(n, a)| Term {
            exponent: self.mu.times(n),
            coefficient: self.sign.factor() * a,
        }));
        // exponents μn > 1 are strictly increasing and coefficients nonzero
        GeneralSeries { terms }
    }

    pub fn eval(&self, z: &DiskPoint) -> Complex64 {
        if z.r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = z.to_complex();
        let s = self.sign.factor();
        for (n, a) in self.terms() {
            acc += s * a * monomial(z.r, z.theta, self.mu.times(n));
        }
        acc
    }

    /// Coefficient-wise product; truncation is the smaller of the two.
    pub fn hadamard(&self, other: &FractionalSeries) -> Result<Self> {
        if self.mu != other.mu {
            return Err(Error::MuMismatch { left: self.mu, right: other.mu });
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .collect();
        Self::from_dense(self.mu, self.sign.product(other.sign), coeffs)
    }
}

fn dense_len(truncation: u32) -> Result<usize> {
    if truncation < 2 {
        return Err(Error::InvalidSeries(format!(
            "truncation {truncation} must be at least 2"
        )));
    }
    Ok((truncation - 1) as usize)
}

/// `z^e` for `z = r e^{iθ}` on the principal branch, `r > 0`.
#[inline]
fn monomial(r: f64, theta: f64, e: f64) -> Complex64 {
    let (s, c) = (e * theta).sin_cos();
    let m = r.powf(e);
    Complex64::new(m * c, m * s)
}

/// Wire form of [`FractionalSeries`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesJson {
    #[serde(default)]
    pub mu: Mu,
    #[serde(default)]
    pub sign: Sign,
    #[serde(default)]
    pub coeffs: BTreeMap<u32, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
}

impl TryFrom<SeriesJson> for FractionalSeries {
    type Error = Error;

    fn try_from(json: SeriesJson) -> Result<Self> {
        let max_key = json.coeffs.keys().next_back().copied().unwrap_or(2);
        let truncation = json
            .truncation
            .unwrap_or_else(|| DEFAULT_TRUNCATION.max(max_key));
        FractionalSeries::new(json.mu, json.sign, truncation, json.coeffs)
    }
}

impl From<FractionalSeries> for SeriesJson {
    fn from(f: FractionalSeries) -> Self {
        SeriesJson {
            mu: f.mu,
            sign: f.sign,
            coeffs: f.terms().collect(),
            truncation: Some(f.truncation()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponent: f64,
    pub coefficient: f64,
}

/// `Σ cₖ z^{eₖ}` with real exponents, strictly increasing.
///
/// Zero coefficients are dropped on construction and repeated exponents are
/// merged, so two series with the same function have the same terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "GeneralJson")]
pub struct GeneralSeries {
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct GeneralJson {
    terms: Vec<Term>,
}

impl TryFrom<GeneralJson> for GeneralSeries {
    type Error = Error;

    fn try_from(json: GeneralJson) -> Result<Self> {
        GeneralSeries::new(json.terms)
    }
}

impl GeneralSeries {
    pub fn new(mut terms: Vec<Term>) -> Result<Self> {
        if let Some(t) = terms
            .iter()
            .find(|t| !t.exponent.is_finite() || !t.coefficient.is_finite())
        {
            return Err(Error::InvalidSeries(format!("non-finite term {t:?}")));
        }
        terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        Ok(Self::from_sorted(terms))
    }

    pub fn monomial(exponent: f64, coefficient: f64) -> Result<Self> {
        Self::new(vec![Term { exponent, coefficient }])
    }

    fn from_sorted(terms: Vec<Term>) -> Self {
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.exponent == t.exponent => last.coefficient += t.coefficient,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient != 0.0);
        GeneralSeries { terms: merged }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient_of(&self, exponent: f64) -> f64 {
        self.terms
            .iter()
            .find(|t| t.exponent == exponent)
            .map_or(0.0, |t| t.coefficient)
    }

    pub fn add(&self, other: &GeneralSeries) -> GeneralSeries {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.exponent <= b.exponent,
                (Some(_), None) => true,
                _ => false,
            };
            if take_left {
                terms.push(self.terms[i]);
                i += 1;
            } else {
                terms.push(other.terms[j]);
                j += 1;
            }
        }
        Self::from_sorted(terms)
    }

    pub fn scale(&self, factor: f64) -> GeneralSeries {
        Self::from_sorted(
            self.terms
                .iter()
                .map(|t| Term { exponent: t.exponent, coefficient: t.coefficient * factor })
                .collect(),
        )
    }

    /// Termwise power rule; constants vanish.
    pub fn differentiate(&self) -> GeneralSeries {
        Self::from_sorted(
            self.terms
                .iter()
                .filter(|t| t.exponent != 0.0)
                .map(|t| Term {
                    exponent: t.exponent - 1.0,
                    coefficient: t.coefficient * t.exponent,
                })
                .collect(),
        )
    }

    pub(crate) fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Result<GeneralSeries> {
        Self::new(self.terms.iter().map(f).collect())
    }

    pub fn eval(&self, z: &DiskPoint) -> Result<Complex64> {
        if z.r == 0.0 {
            let mut acc = 0.0;
            for t in &self.terms {
                if t.exponent < 0.0 {
                    return Err(Error::Domain(format!(
                        "z^{} is singular at the origin",
                        t.exponent
                    )));
                }
                if t.exponent == 0.0 {
                    acc += t.coefficient;
                }
            }
            return Ok(Complex64::new(acc, 0.0));
        }
        Ok(self.eval_nonzero(z.r, z.theta))
    }

    /// Evaluation for `r > 0`; callers guarantee the point is in the slit disk.
    #[inline]
    pub(crate) fn eval_nonzero(&self, r: f64, theta: f64) -> Complex64 {
        self.terms
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, t| {
                acc + t.coefficient * monomial(r, theta, t.exponent)
            })
    }
}

impl From<&FractionalSeries> for GeneralSeries {
    fn from(f: &FractionalSeries) -> Self {
        f.to_general()
    }
}
