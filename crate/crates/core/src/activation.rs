//! Activation functions available to CPPN nodes and the two dictionaries
//! (full and reduced) evolution may draw from.
//!
//! Every function is total over finite inputs: domains with poles or
//! overflow are guarded so the output is always finite.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Guard used by `Inverse` and `Logarithmic`.
pub const EPS: f64 = 1e-7;

/// Polynomial outputs overflow for huge inputs; pin them to the largest finite value.
#[inline]
fn saturate(v: f64) -> f64 {
    v.clamp(-f64::MAX, f64::MAX)
}

const SIGMOID_GAIN: f64 = 4.9;
const SELU_LAMBDA: f64 = 1.0507;
const SELU_ALPHA: f64 = 1.6733;
const LELU_LEAK: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Sine,
    NegativeSine,
    Absolute,
    NegativeAbsolute,
    Squared,
    NegativeSquared,
    SquaredAbsolute,
    NegativeSquaredAbsolute,
    Sigmoid,
    Clamped,
    Cubical,
    Exponential,
    Gaussian,
    Hat,
    Identity,
    Inverse,
    Logarithmic,
    Relu,
    Selu,
    Lelu,
    Elu,
    Softplus,
    Tanh,
}

impl Activation {
    pub const FULL: [Activation; 23] = [
        Activation::Sine,
        Activation::NegativeSine,
        Activation::Absolute,
        Activation::NegativeAbsolute,
        Activation::Squared,
        Activation::NegativeSquared,
        Activation::SquaredAbsolute,
        Activation::NegativeSquaredAbsolute,
        Activation::Sigmoid,
        Activation::Clamped,
        Activation::Cubical,
        Activation::Exponential,
        Activation::Gaussian,
        Activation::Hat,
        Activation::Identity,
        Activation::Inverse,
        Activation::Logarithmic,
        Activation::Relu,
        Activation::Selu,
        Activation::Lelu,
        Activation::Elu,
        Activation::Softplus,
        Activation::Tanh,
    ];

    pub const REDUCED: [Activation; 9] = [
        Activation::Sine,
        Activation::NegativeSine,
        Activation::Squared,
        Activation::NegativeSquared,
        Activation::Sigmoid,
        Activation::Cubical,
        Activation::Gaussian,
        Activation::Logarithmic,
        Activation::Tanh,
    ];

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sine => x.sin(),
            Activation::NegativeSine => -x.sin(),
            Activation::Absolute => x.abs(),
            Activation::NegativeAbsolute => -x.abs(),
            Activation::Squared => saturate(x * x),
            Activation::NegativeSquared => -saturate(x * x),
            Activation::SquaredAbsolute => saturate(x.abs() * x.abs()),
            Activation::NegativeSquaredAbsolute => -saturate(x.abs() * x.abs()),
            Activation::Sigmoid => {
                let z = (SIGMOID_GAIN * x).clamp(-60.0, 60.0);
                1.0 / (1.0 + (-z).exp())
            }
            Activation::Clamped => x.clamp(-1.0, 1.0),
            Activation::Cubical => saturate(x * x * x),
            Activation::Exponential => x.clamp(-60.0, 60.0).exp(),
            Activation::Gaussian => (-5.0 * x * x).exp(),
            Activation::Hat => (1.0 - x.abs()).max(0.0),
            Activation::Identity => x,
            Activation::Inverse => {
                if x.abs() < EPS {
                    0.0
                } else {
                    1.0 / x
                }
            }
            Activation::Logarithmic => x.max(EPS).ln(),
            Activation::Relu => x.max(0.0),
            Activation::Selu => {
                if x > 0.0 {
                    SELU_LAMBDA * x
                } else {
                    SELU_LAMBDA * SELU_ALPHA * (x.exp() - 1.0)
                }
            }
            Activation::Lelu => {
                if x > 0.0 {
                    x
                } else {
                    LELU_LEAK * x
                }
            }
            Activation::Elu => {
                if x > 0.0 {
                    x
                } else {
                    x.exp() - 1.0
                }
            }
            // ln(1 + e^x) = max(x, 0) + ln(1 + e^-|x|), stable for large |x|
            Activation::Softplus => x.max(0.0) + (-x.abs()).exp().ln_1p(),
            Activation::Tanh => x.tanh(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sine => "sine",
            Activation::NegativeSine => "negative_sine",
            Activation::Absolute => "absolute",
            Activation::NegativeAbsolute => "negative_absolute",
            Activation::Squared => "squared",
            Activation::NegativeSquared => "negative_squared",
            Activation::SquaredAbsolute => "squared_absolute",
            Activation::NegativeSquaredAbsolute => "negative_squared_absolute",
            Activation::Sigmoid => "sigmoid",
            Activation::Clamped => "clamped",
            Activation::Cubical => "cubical",
            Activation::Exponential => "exponential",
            Activation::Gaussian => "gaussian",
            Activation::Hat => "hat",
            Activation::Identity => "identity",
            Activation::Inverse => "inverse",
            Activation::Logarithmic => "logarithmic",
            Activation::Relu => "relu",
            Activation::Selu => "selu",
            Activation::Lelu => "lelu",
            Activation::Elu => "elu",
            Activation::Softplus => "softplus",
            Activation::Tanh => "tanh",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        Activation::FULL
            .into_iter()
            .find(|a| a.name() == norm)
            .ok_or_else(|| Error::Config(format!("unknown activation `{s}`")))
    }
}

/// Set of activations evolution may sample from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dictionary {
    /// All 23 functions.
    #[default]
    Full,
    /// The 9-function subset of smooth/periodic functions.
    Reduced,
}

impl Dictionary {
    pub fn members(self) -> &'static [Activation] {
        match self {
            Dictionary::Full => &Activation::FULL,
            Dictionary::Reduced => &Activation::REDUCED,
        }
    }

    pub fn contains(self, a: Activation) -> bool {
        self.members().contains(&a)
    }

    /// Applies `f` to `x` after checking membership in this dictionary.
    pub fn eval(self, f: Activation, x: f64) -> Result<f64, Error> {
        if !self.contains(f) {
            return Err(Error::Config(format!(
                "activation `{f}` is not in the {self} dictionary"
            )));
        }
        Ok(f.apply(x))
    }
}

impl fmt::Display for Dictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dictionary::Full => "fd",
            Dictionary::Reduced => "rd",
        })
    }
}

impl FromStr for Dictionary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fd" | "full" => Ok(Dictionary::Full),
            "rd" | "reduced" => Ok(Dictionary::Reduced),
            other => Err(Error::Config(format!("unknown dictionary `{other}`"))),
        }
    }
}
