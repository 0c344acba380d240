//! System parameters and the arrival process.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for `l_minus + l_plus = 1`.
pub const SPLIT_TOL: f64 = 1e-12;

/// Parameters of the two-user network.
///
/// `lambda_k` is the Bernoulli arrival probability, `alpha_k` the
/// transmission probability, `s_k` the signal probability and
/// `l_k_minus` / `l_k_plus` the probabilities that a signal deletes or
/// transfers the head packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub s1: f64,
    pub s2: f64,
    pub l1_minus: f64,
    pub l1_plus: f64,
    pub l2_minus: f64,
    pub l2_plus: f64,
}

/// Per-user view of [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct User {
    pub lambda: f64,
    pub alpha: f64,
    pub s: f64,
    pub l_minus: f64,
    pub l_plus: f64,
}

impl User {
    pub fn s_bar(&self) -> f64 {
        1.0 - self.s
    }
    pub fn alpha_bar(&self) -> f64 {
        1.0 - self.alpha
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{name} out of [0,1]")));
    }
    Ok(())
}

fn check_split(minus: &str, plus: &str, a: f64, b: f64) -> Result<()> {
    if (a + b - 1.0).abs() > SPLIT_TOL {
        return Err(Error::Domain(format!("{minus}+{plus} ≠ 1")));
    }
    Ok(())
}

impl ModelParams {
    /// Returns the parameters unchanged if every invariant holds.
    pub fn validate(self) -> Result<Self> {
        for (name, v) in self.fields() {
            check_unit(name, v)?;
        }
        check_split("l1_minus", "l1_plus", self.l1_minus, self.l1_plus)?;
        check_split("l2_minus", "l2_plus", self.l2_minus, self.l2_plus)?;
        Ok(self)
    }

    /// Field names and values in declaration order.
    pub fn fields(&self) -> [(&'static str, f64); 10] {
        [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("s1", self.s1),
            ("s2", self.s2),
            ("l1_minus", self.l1_minus),
            ("l1_plus", self.l1_plus),
            ("l2_minus", self.l2_minus),
            ("l2_plus", self.l2_plus),
        ]
    }

    /// Sets a field by name; setting one side of a split also sets its
    /// complement. Returns false for an unknown name.
    pub fn set(&mut self, name: &str, v: f64) -> bool {
        let slot = match name {
            "lambda1" => &mut self.lambda1,
            "lambda2" => &mut self.lambda2,
            "alpha1" => &mut self.alpha1,
            "alpha2" => &mut self.alpha2,
            "s1" => &mut self.s1,
            "s2" => &mut self.s2,
            "l1_minus" | "l1_plus" | "l2_minus" | "l2_plus" => {
                let (own, other) = match name {
                    "l1_minus" => (&mut self.l1_minus, &mut self.l1_plus),
                    "l1_plus" => (&mut self.l1_plus, &mut self.l1_minus),
                    "l2_minus" => (&mut self.l2_minus, &mut self.l2_plus),
                    _ => (&mut self.l2_plus, &mut self.l2_minus),
                };
                *own = v;
                *other = 1.0 - v;
                return true;
            }
            _ => return false,
        };
        *slot = v;
        true
    }

    pub fn user(&self, k: usize) -> User {
        match k {
            1 => User {
                lambda: self.lambda1,
                alpha: self.alpha1,
                s: self.s1,
                l_minus: self.l1_minus,
                l_plus: self.l1_plus,
            },
            2 => User {
                lambda: self.lambda2,
                alpha: self.alpha2,
                s: self.s2,
                l_minus: self.l2_minus,
                l_plus: self.l2_plus,
            },
            _ => panic!("user index must be 1 or 2"),
        }
    }

    /// Relabels the users.
    pub fn swapped(&self) -> Self {
        ModelParams {
            lambda1: self.lambda2,
            lambda2: self.lambda1,
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            s1: self.s2,
            s2: self.s1,
            l1_minus: self.l2_minus,
            l1_plus: self.l2_plus,
            l2_minus: self.l1_minus,
            l2_plus: self.l1_plus,
        }
    }

    pub fn with_lambdas(&self, lambda1: f64, lambda2: f64) -> Self {
        ModelParams {
            lambda1,
            lambda2,
            ..*self
        }
    }

    pub fn with_alphas(&self, alpha1: f64, alpha2: f64) -> Self {
        ModelParams {
            alpha1,
            alpha2,
            ..*self
        }
    }

    /// True when both users share every parameter.
    pub fn is_symmetric(&self) -> bool {
        self.lambda1 == self.lambda2
            && self.alpha1 == self.alpha2
            && self.s1 == self.s2
            && self.l1_minus == self.l2_minus
            && self.l1_plus == self.l2_plus
    }

    pub fn symmetric(&self) -> Option<SymmetricParams> {
        self.is_symmetric().then(|| SymmetricParams {
            lambda: self.lambda1,
            alpha: self.alpha1,
            s: self.s1,
            l_minus: self.l1_minus,
            l_plus: self.l1_plus,
        })
    }
}

/// Parameters shared by both users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetricParams {
    pub lambda: f64,
    pub alpha: f64,
    pub s: f64,
    pub l_minus: f64,
    pub l_plus: f64,
}

impl SymmetricParams {
    /// Builds params with `l_minus = 1 - l_plus`.
    pub fn new(lambda: f64, alpha: f64, s: f64, l_plus: f64) -> Self {
        SymmetricParams {
            lambda,
            alpha,
            s,
            l_minus: 1.0 - l_plus,
            l_plus,
        }
    }

    pub fn validate(self) -> Result<Self> {
        check_unit("lambda", self.lambda)?;
        check_unit("alpha", self.alpha)?;
        check_unit("s", self.s)?;
        check_unit("l_minus", self.l_minus)?;
        check_unit("l_plus", self.l_plus)?;
        check_split("l_minus", "l_plus", self.l_minus, self.l_plus)?;
        Ok(self)
    }

    pub fn embed(&self) -> ModelParams {
        ModelParams {
            lambda1: self.lambda,
            lambda2: self.lambda,
            alpha1: self.alpha,
            alpha2: self.alpha,
            s1: self.s,
            s2: self.s,
            l1_minus: self.l_minus,
            l1_plus: self.l_plus,
            l2_minus: self.l_minus,
            l2_plus: self.l_plus,
        }
    }

    pub fn set(&mut self, name: &str, v: f64) -> bool {
        match name {
            "lambda" => self.lambda = v,
            "alpha" => self.alpha = v,
            "s" => self.s = v,
            "l_plus" => {
                self.l_plus = v;
                self.l_minus = 1.0 - v;
            }
            "l_minus" => {
                self.l_minus = v;
                self.l_plus = 1.0 - v;
            }
            _ => return false,
        }
        true
    }

    pub fn s_bar(&self) -> f64 {
        1.0 - self.s
    }
    pub fn alpha_bar(&self) -> f64 {
        1.0 - self.alpha
    }
    pub fn lambda_bar(&self) -> f64 {
        1.0 - self.lambda
    }
    /// `s̄²αᾱ`, the probability of a lone clean transmission in the interior.
    pub fn clean(&self) -> f64 {
        let sb = self.s_bar();
        sb * sb * self.alpha * self.alpha_bar()
    }
}

/// Joint pgf of the per-slot arrivals, `H(x,y) = (λ̄1+λ1x)(λ̄2+λ2y)`.
pub fn arrival_pgf(x: Complex64, y: Complex64, p: &ModelParams) -> Complex64 {
    (1.0 - p.lambda1 + p.lambda1 * x) * (1.0 - p.lambda2 + p.lambda2 * y)
}
