//! Decay weights `θ(ξ)` and the δ rule tied to porosity.

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::{rat_int, Rational};

/// Even weight functions `θ(ξ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Theta {
    /// `(log(10+|ξ|))^{-δ}`
    Log { delta: f64 },
    /// `θ ≡ 1`
    One,
    /// `(1+|ξ|)^{-exponent}`, which decays too fast for the harmonic lemma.
    Power { exponent: f64 },
}

impl Theta {
    pub fn eval(&self, xi: f64) -> f64 {
        let a = xi.abs();
        match *self {
            Theta::Log { delta } => (10.0 + a).ln().powf(-delta),
            Theta::One => 1.0,
            Theta::Power { exponent } => (1.0 + a).powf(-exponent),
        }
    }

    /// `|ξ|θ(ξ)`
    pub fn growth(&self, xi: f64) -> f64 {
        xi.abs() * self.eval(xi)
    }
}

/// `θ(ξ) = (log(10+|ξ|))^{-δ}` with `m = ⌈2/ν⌉`, `ε = 1 − log(m−1)/log m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaWeight {
    pub delta: f64,
    pub m: u64,
    pub epsilon: f64,
}

impl ThetaWeight {
    pub fn theta(&self) -> Theta {
        Theta::Log { delta: self.delta }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        self.theta().eval(xi)
    }
}

/// δ is the midpoint of `(1/(1+ε), 1)`, so that `δ < 1` and `δ(1+ε) > 1`.
pub fn choose_delta(nu: &Rational) -> Result<ThetaWeight> {
    if nu <= &Rational::zero() || nu >= &rat_int(1) {
        return Err(Error::InvalidParameter("choose_delta needs 0 < nu < 1".into()));
    }
    let m = (rat_int(2) / nu)
        .ceil()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("nu too small".into()))?;
    let epsilon = 1.0 - ((m - 1) as f64).ln() / (m as f64).ln();
    let delta = (1.0 / (1.0 + epsilon) + 1.0) / 2.0;
    if !(delta < 1.0 && delta * (1.0 + epsilon) > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "nu = {nu} leaves no room for delta in floating point"
        )));
    }
    Ok(ThetaWeight { delta, m, epsilon })
}
