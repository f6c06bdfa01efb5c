//! Model coefficients and the algebraic conditions on them.

use crate::{Error, Result};

/// The nine coefficients of the model.
///
/// `h1` and `h2` may be zero (the human-free case); every other value must
/// be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Fish diffusion coefficient.
    pub d1: f64,
    /// Boyciana diffusion coefficient.
    pub d2: f64,
    /// Capturing rate.
    pub c: f64,
    /// Ratio-dependence shape parameter.
    pub alpha: f64,
    /// Conversion rate.
    pub m: f64,
    /// Boyciana death rate.
    pub d: f64,
    /// Human interference on fish.
    pub h1: f64,
    /// Human interference on boyciana.
    pub h2: f64,
    /// Logistic growth rate of the human distribution.
    pub r: f64,
}

impl ModelParams {
    pub const NAMES: [&'static str; 9] = ["d1", "d2", "c", "alpha", "m", "d", "h1", "h2", "r"];

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.entries() {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
            let nonneg_ok = matches!(name, "h1" | "h2");
            if nonneg_ok && value < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be nonnegative",
                });
            }
            if !nonneg_ok && value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be positive",
                });
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> [(&'static str, f64); 9] {
        let v = self.to_array();
        let mut out = [("", 0.0); 9];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = (Self::NAMES[k], v[k]);
        }
        out
    }

    pub fn to_array(&self) -> [f64; 9] {
        [
            self.d1, self.d2, self.c, self.alpha, self.m, self.d, self.h1, self.h2, self.r,
        ]
    }

    pub fn from_array(v: [f64; 9]) -> Self {
        ModelParams {
            d1: v[0],
            d2: v[1],
            c: v[2],
            alpha: v[3],
            m: v[4],
            d: v[5],
            h1: v[6],
            h2: v[7],
            r: v[8],
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries().iter().find(|(n, _)| *n == name).map(|e| e.1)
    }

    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let mut v = self.to_array();
        match Self::NAMES.iter().position(|n| *n == name) {
            Some(k) => {
                v[k] = value;
                *self = Self::from_array(v);
                true
            }
            None => false,
        }
    }

    pub fn with_diffusion(self, d1: f64, d2: f64) -> Self {
        ModelParams { d1, d2, ..self }
    }

    pub fn with_interference(self, h1: f64, h2: f64) -> Self {
        ModelParams { h1, h2, ..self }
    }

    /// `1 - α/c < d/m < 1`: a unique positive equilibrium exists without humans.
    pub fn check_e1_condition(&self) -> bool {
        let ratio = self.d / self.m;
        1.0 - self.alpha / self.c < ratio && ratio < 1.0
    }

    /// `1 - (α/c)(1 - h1) < (d + h2)/m < 1`: positive equilibrium under full
    /// human occupation `x3 ≡ 1`.
    pub fn check_e2_condition(&self) -> bool {
        let ratio = (self.d + self.h2) / self.m;
        1.0 - self.alpha / self.c * (1.0 - self.h1) < ratio && ratio < 1.0
    }

    /// `h1 < 1 - c/α` and `h2 < m - d`: positive lower absorbing bounds.
    pub fn check_persistence_condition(&self) -> bool {
        self.h1 < 1.0 - self.c / self.alpha && self.h2 < self.m - self.d
    }

    /// Stability margin `λ1 (d1 + d2) - (c/α) ((m - d)/m) (d/m)`.
    pub fn diffusion_margin(&self, lambda1: f64) -> f64 {
        lambda1 * (self.d1 + self.d2)
            - self.c / self.alpha * ((self.m - self.d) / self.m) * (self.d / self.m)
    }
}
