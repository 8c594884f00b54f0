//! Synthetic one-bit training environments.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::Sample;
use crate::error::{check_probability, Result};

/// `a = P(y=1 | x=1)`, `b = P(y=1 | x=0)`, `c = P(x=1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneBitEnv {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl OneBitEnv {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        check_probability("a", a)?;
        check_probability("b", b)?;
        check_probability("c", c)?;
        Ok(Self { a, b, c })
    }

    /// Labels follow the input exactly: `y = x`.
    pub fn noise_free(c: f64) -> Result<Self> {
        Self::new(1.0, 0.0, c)
    }

    pub fn is_noise_free(&self) -> bool {
        self.a == 1.0 && self.b == 0.0
    }

    /// Probabilities of `(1,1)`, `(1,0)`, `(0,1)`, `(0,0)`.
    pub fn joint(&self) -> [f64; 4] {
        let Self { a, b, c } = *self;
        [a * c, (1.0 - a) * c, b * (1.0 - c), (1.0 - b) * (1.0 - c)]
    }

    /// Draws `x` first, then the label conditioned on it. Consumes exactly two
    /// uniforms per call.
    #[inline]
    pub fn draw_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        let x = rng.random::<f64>() < self.c;
        let p_one = if x { self.a } else { self.b };
        let y = rng.random::<f64>() < p_one;
        Sample::one_bit(x, y)
    }
}

pub fn noise_free(c: f64) -> Result<OneBitEnv> {
    OneBitEnv::noise_free(c)
}

pub fn draw_sample<R: Rng + ?Sized>(env: &OneBitEnv, rng: &mut R) -> Sample {
    env.draw_sample(rng)
}
