//! Parameters of the subordination class `E_{k,m}(Φ, Ψ, A, B, μ, γ)` and the
//! coefficient machinery built on the weight
//!
//! ```text
//! Ξ(n) = (1−B)((μn)^k ϑₙ − (μn)^m λₙ) + (A−B)(1−γ)(μn)^m wₙ
//! ```
//!
//! where `wₙ` is `λₙ` or `ϑₙ` depending on [`WeightVariant`]. A series with
//! `Σ Ξ(n)|aₙ| ≤ (A−B)(1−γ)` is a member; for `z − Σ` series the condition is
//! also necessary under the `λ` variant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fps::{FractionalSeries, Sign, DEFAULT_TRUNCATION};
use crate::{Error, Mu, Result};

/// Kernel coefficients ϑₙ (for Φ) or λₙ (for Ψ); the leading coefficient is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Kernel {
    /// 1
    AllOnes,
    /// μn
    Koebe,
    /// (μn)²
    Koebe2,
    /// User values; indices not listed are 0.
    Custom {
        #[serde(deserialize_with = "index_keys")]
        values: BTreeMap<u32, f64>,
    },
}

// Internally tagged enums buffer their content, which leaves map keys as
// strings; parse them by hand.
fn index_keys<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<u32, f64>, D::Error> {
    let raw = BTreeMap::<String, f64>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| k.parse::<u32>().map(|k| (k, v)).map_err(serde::de::Error::custom))
        .collect()
}

impl Kernel {
    pub fn value(&self, mu: Mu, n: u32) -> f64 {
        match self {
            Kernel::AllOnes => 1.0,
            Kernel::Koebe => mu.times(n),
            Kernel::Koebe2 => mu.times(n).powi(2),
            Kernel::Custom { values } => values.get(&n).copied().unwrap_or(0.0),
        }
    }

    pub fn to_series(&self, mu: Mu, truncation: u32) -> Result<FractionalSeries> {
        let coeffs = (2..=truncation).map(|n| self.value(mu, n)).collect();
        FractionalSeries::from_dense(mu, Sign::Plus, coeffs)
    }

    fn max_custom_index(&self) -> u32 {
        match self {
            Kernel::Custom { values } => values.keys().next_back().copied().unwrap_or(0),
            _ => 0,
        }
    }
}

/// Which kernel the last term of Ξ(n) carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WeightVariant {
    /// `(A−B)(1−γ)(μn)^m λₙ`; exact for `z − Σ` series.
    #[default]
    #[serde(rename = "lambda")]
    LastTermLambda,
    /// `(A−B)(1−γ)(μn)^m ϑₙ`; a stronger, sufficient-only weight.
    #[serde(rename = "theta")]
    LastTermTheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// ϑₙ = μn, λₙ = 1: starlike of order γ.
    StarlikeMu,
    /// ϑₙ = (μn)², λₙ = μn: convex of order γ.
    ConvexMu,
}

/// Range over which ϑₙ ≥ λₙ is validated.
const VALIDATION_RANGE: u32 = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsJson", into = "ParamsJson")]
pub struct ClassParams {
    phi: Kernel,
    psi: Kernel,
    a: f64,
    b: f64,
    gamma: f64,
    k: u32,
    m: u32,
    mu: Mu,
    variant: WeightVariant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsJson {
    pub phi: Kernel,
    pub psi: Kernel,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub k: u32,
    #[serde(default)]
    pub m: u32,
    #[serde(default)]
    pub mu: Mu,
    #[serde(default)]
    pub variant: WeightVariant,
}

impl TryFrom<ParamsJson> for ClassParams {
    type Error = Error;

    fn try_from(j: ParamsJson) -> Result<Self> {
        ClassParams::new(j.phi, j.psi, j.a, j.b, j.gamma, j.k, j.m, j.mu, j.variant)
    }
}

impl From<ClassParams> for ParamsJson {
    fn from(p: ClassParams) -> Self {
        ParamsJson {
            phi: p.phi,
            psi: p.psi,
            a: p.a,
            b: p.b,
            gamma: p.gamma,
            k: p.k,
            m: p.m,
            mu: p.mu,
            variant: p.variant,
        }
    }
}

/// Outcome of the coefficient test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    MemberCertified,
    NotMember,
    /// Negative margin on a `z + Σ` series: the test is only sufficient there.
    Inconclusive,
}

impl ClassParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        phi: Kernel,
        psi: Kernel,
        a: f64,
        b: f64,
        gamma: f64,
        k: u32,
        m: u32,
        mu: Mu,
        variant: WeightVariant,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if ![a, b, gamma].iter().all(|x| x.is_finite()) {
            return bad("A, B and gamma must be finite".into());
        }
        if !(-1.0 <= b && b < a && a <= 1.0) {
            return bad(format!("need -1 <= B < A <= 1, got A = {a}, B = {b}"));
        }
        if b >= 0.0 {
            return bad(format!("need B < 0, got {b}"));
        }
        if !(0.0..1.0).contains(&gamma) {
            return bad(format!("need 0 <= gamma < 1, got {gamma}"));
        }
        if k < m {
            return bad(format!("need k >= m, got k = {k}, m = {m}"));
        }
        for kernel in [&phi, &psi] {
            if let Kernel::Custom { values } = kernel {
                if let Some((n, v)) = values.iter().find(|(n, v)| **n < 2 || !v.is_finite() || **v < 0.0) {
                    return bad(format!("custom kernel value {v} at n = {n} is invalid"));
                }
            }
        }
        let p = ClassParams { phi, psi, a, b, gamma, k, m, mu, variant };
        let upper = VALIDATION_RANGE
            .max(p.phi.max_custom_index())
            .max(p.psi.max_custom_index());
        for n in 2..=upper {
            let (theta, lambda) = (p.phi.value(mu, n), p.psi.value(mu, n));
            if theta < lambda {
                return bad(format!("need theta_n >= lambda_n, fails at n = {n}"));
            }
        }
        Ok(p)
    }

    /// Named subclasses with A = 1, B = −1, k = m = 0.
    pub fn preset(preset: Preset, mu: Mu, gamma: f64) -> Result<Self> {
        let (phi, psi) = match preset {
            Preset::StarlikeMu => (Kernel::Koebe, Kernel::AllOnes),
            Preset::ConvexMu => (Kernel::Koebe2, Kernel::Koebe),
        };
        Self::new(phi, psi, 1.0, -1.0, gamma, 0, 0, mu, WeightVariant::default())
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let mut j = ParamsJson::from(self.clone());
        j.gamma = gamma;
        Self::try_from(j)
    }

    pub fn with_variant(&self, variant: WeightVariant) -> Self {
        ClassParams { variant, ..self.clone() }
    }

    pub fn phi(&self) -> &Kernel {
        &self.phi
    }

    pub fn psi(&self) -> &Kernel {
        &self.psi
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn mu(&self) -> Mu {
        self.mu
    }

    pub fn variant(&self) -> WeightVariant {
        self.variant
    }

    /// (A−B)(1−γ), the right-hand side of the coefficient condition.
    pub fn rhs(&self) -> f64 {
        (self.a - self.b) * (1.0 - self.gamma)
    }

    pub fn xi_weight(&self, n: u32) -> f64 {
        let x = self.mu.times(n);
        let theta = self.phi.value(self.mu, n);
        let lambda = self.psi.value(self.mu, n);
        let xk = x.powi(self.k as i32);
        let xm = x.powi(self.m as i32);
        let last = match self.variant {
            WeightVariant::LastTermLambda => lambda,
            WeightVariant::LastTermTheta => theta,
        };
        (1.0 - self.b) * (xk * theta - xm * lambda) + self.rhs() * xm * last
    }

    fn check_mu(&self, f: &FractionalSeries) -> Result<()> {
        if f.mu() != self.mu {
            return Err(Error::MuMismatch { left: self.mu, right: f.mu() });
        }
        Ok(())
    }

    /// (A−B)(1−γ) − Σ Ξ(n)|aₙ|; nonnegative certifies membership.
    pub fn coefficient_margin(&self, f: &FractionalSeries) -> Result<f64> {
        self.check_mu(f)?;
        let weighted: f64 = f.terms().map(|(n, a)| self.xi_weight(n) * a).sum();
        Ok(self.rhs() - weighted)
    }

    pub fn is_member(&self, f: &FractionalSeries) -> Result<Verdict> {
        let margin = self.coefficient_margin(f)?;
        Ok(if margin >= 0.0 {
            Verdict::MemberCertified
        } else if f.sign() == Sign::Minus {
            Verdict::NotMember
        } else {
            Verdict::Inconclusive
        })
    }

    /// Largest admissible aₙ for a member: (A−B)(1−γ)/Ξ(n).
    ///
    /// Infinite where Ξ(n) = 0, which only custom kernels with
    /// ϑₙ = λₙ = 0 can produce.
    pub fn coefficient_bound(&self, n: u32) -> f64 {
        self.rhs() / self.xi_weight(n)
    }

    fn positive_weight(&self, n: u32) -> Result<f64> {
        let xi = self.xi_weight(n);
        if xi > 0.0 {
            Ok(xi)
        } else {
            Err(Error::InvalidParams(format!("coefficient weight vanishes at n = {n}")))
        }
    }

    /// `z − [(A−B)(1−γ)/Ξ(n)] z^{μn}`, which saturates the coefficient condition.
    pub fn extremal_function(&self, n: u32) -> Result<FractionalSeries> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("extremal index {n} must be >= 2")));
        }
        let xi = self.positive_weight(n)?;
        FractionalSeries::single_term(
            self.mu,
            Sign::Minus,
            n,
            self.rhs() / xi,
            DEFAULT_TRUNCATION.max(n),
        )
    }

    /// Σ ηₙ F_{μn} with F₁ = z and F_{μn} the extremal functions.
    pub fn extreme_point_combination(&self, w: &ExtremePointWeights) -> Result<FractionalSeries> {
        let top = w.eta.keys().next_back().copied().unwrap_or(1);
        let truncation = DEFAULT_TRUNCATION.max(top);
        let mut coeffs = Vec::new();
        for (&n, &eta) in w.eta.range(2..) {
            coeffs.push((n, eta * self.rhs() / self.positive_weight(n)?));
        }
        FractionalSeries::new(self.mu, Sign::Minus, truncation, coeffs)
    }

    /// Inverse of [`Self::extreme_point_combination`] for certified members.
    pub fn decompose_extreme_points(&self, f: &FractionalSeries) -> Result<ExtremePointWeights> {
        self.check_mu(f)?;
        if f.sign() == Sign::Plus && f.terms().next().is_some() {
            return Err(Error::InvalidSeries(
                "extreme-point decomposition needs a z - sum series".into(),
            ));
        }
        let rhs = self.rhs();
        let mut eta = BTreeMap::new();
        for (n, a) in f.terms() {
            eta.insert(n, self.positive_weight(n)? * a / rhs);
        }
        let eta1 = 1.0 - eta.values().sum::<f64>();
        if eta1 < -EXTREME_SUM_TOL {
            return Err(Error::NotMember { eta1 });
        }
        eta.insert(1, eta1.max(0.0));
        ExtremePointWeights::new(eta)
    }
}

const EXTREME_SUM_TOL: f64 = 1e-12;

/// Convex weights ηₙ ≥ 0 over the extreme points, Σηₙ = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<u32, f64>", into = "BTreeMap<u32, f64>")]
pub struct ExtremePointWeights {
    eta: BTreeMap<u32, f64>,
}

impl ExtremePointWeights {
    pub fn new(eta: BTreeMap<u32, f64>) -> Result<Self> {
        if let Some((n, v)) = eta.iter().find(|(n, v)| **n == 0 || !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!("weight eta_{n} = {v} is invalid")));
        }
        let total: f64 = eta.values().sum();
        if (total - 1.0).abs() > EXTREME_SUM_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Ok(ExtremePointWeights { eta })
    }

    pub fn get(&self, n: u32) -> f64 {
        self.eta.get(&n).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.eta.iter().map(|(n, v)| (*n, *v))
    }
}

impl TryFrom<BTreeMap<u32, f64>> for ExtremePointWeights {
    type Error = Error;

    fn try_from(eta: BTreeMap<u32, f64>) -> Result<Self> {
        Self::new(eta)
    }
}

impl From<ExtremePointWeights> for BTreeMap<u32, f64> {
    fn from(w: ExtremePointWeights) -> Self {
        w.eta
    }
}
