use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Exponent base μ ≥ 1, kept as a reduced rational `num/den`.
///
/// Any such rational can be written as `(p + q - 1)/q` with positive integers
/// `p`, `q` (take `q = den`, `p = num - den + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mu {
    num: u32,
    den: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Mu {
    pub const ONE: Mu = Mu { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::InvalidMu(format!("{num}/{den} has zero denominator")));
        }
        if num < den {
            return Err(Error::InvalidMu(format!("{num}/{den} is below 1")));
        }
        let g = gcd(num, den);
        Ok(Mu { num: num / g, den: den / g })
    }

    pub fn integer(n: u32) -> Result<Self, Error> {
        Self::new(n, 1)
    }

    /// The pair `(p, q)` with μ = (p + q − 1)/q.
    pub fn index_pair(self) -> (u32, u32) {
        (self.num - self.den + 1, self.den)
    }

    pub fn numer(self) -> u32 {
        self.num
    }

    pub fn denom(self) -> u32 {
        self.den
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn value(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    /// μn as a float; exact for the sizes used here.
    pub fn times(self, n: u32) -> f64 {
        f64::from(self.num) * f64::from(n) / f64::from(self.den)
    }
}

impl Default for Mu {
    fn default() -> Self {
        Mu::ONE
    }
}

impl fmt::Display for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Mu {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidMu(format!("cannot parse {s:?} as p/q")))
        };
        match s.split_once('/') {
            Some((n, d)) => Mu::new(parse(n)?, parse(d)?),
            None => Mu::new(parse(s)?, 1),
        }
    }
}

impl Serialize for Mu {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Mu {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(u32),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Mu::integer(n).map_err(serde::de::Error::custom),
        }
    }
}
