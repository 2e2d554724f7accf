//! Dual numbers `a + εa*` with `ε² = 0`.
//!
//! Addition and multiplication are total and exposed as operators.
//! Division, square root and the inverse cosine are partial; they return
//! [`Result`] and report non-finite results as
//! [`Error::NumericBreakdown`].
//!
//! Elementary functions are lifted through the first-order Taylor rule
//! `f(x + εx*) = f(x) + εx* f'(x)`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dual number. `re` is the real part, `du` the coefficient of `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DualScalar {
    pub re: f64,
    pub du: f64,
}

impl DualScalar {
    pub const ZERO: DualScalar = DualScalar { re: 0.0, du: 0.0 };
    pub const ONE: DualScalar = DualScalar { re: 1.0, du: 0.0 };
    /// The dual unit `ε`.
    pub const EPS: DualScalar = DualScalar { re: 0.0, du: 1.0 };

    pub const fn new(re: f64, du: f64) -> Self {
        DualScalar { re, du }
    }

    pub const fn real(re: f64) -> Self {
        DualScalar { re, du: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.du.is_finite()
    }

    /// Pass `self` through, or fail with `NumericBreakdown` naming `op`.
    pub fn ensure_finite(self, op: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NumericBreakdown { op })
        }
    }

    /// `true` when the real part is exactly zero, i.e. `self` is a zero divisor.
    pub fn is_pure_dual(&self) -> bool {
        self.re == 0.0
    }

    pub fn square(self) -> Self {
        self * self
    }

    /// Part-wise comparison; duals carry no order, so this is the only
    /// notion of closeness the library offers.
    pub fn approx_eq(&self, other: &DualScalar, tol_re: f64, tol_du: f64) -> bool {
        (self.re - other.re).abs() <= tol_re && (self.du - other.du).abs() <= tol_du
    }

    /// Largest absolute difference of the parts, `(|Δre|, |Δdu|)`.
    pub fn abs_diff(&self, other: &DualScalar) -> (f64, f64) {
        ((self.re - other.re).abs(), (self.du - other.du).abs())
    }

    /// Ring inverse of multiplication: the unique `r` with `r * y = self`.
    pub fn div(self, y: DualScalar) -> Result<Self> {
        if y.re == 0.0 {
            return Err(Error::PureDualDivisor { divisor: y });
        }
        DualScalar {
            re: self.re / y.re,
            du: (self.du * y.re - self.re * y.du) / (y.re * y.re),
        }
        .ensure_finite("div")
    }

    pub fn recip(self) -> Result<Self> {
        DualScalar::ONE.div(self)
    }

    pub fn sqrt(self) -> Result<Self> {
        if self.re <= 0.0 || self.re.is_nan() {
            return Err(Error::NonPositiveRealPart { value: self });
        }
        let r = self.re.sqrt();
        DualScalar {
            re: r,
            du: self.du / (2.0 * r),
        }
        .ensure_finite("sqrt")
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    /// `tan x̃ = tan x + εx* sec²x`; non-finite at odd multiples of π/2.
    pub fn tan(self) -> Self {
        let t = self.re.tan();
        DualScalar {
            re: t,
            du: self.du * (1.0 + t * t),
        }
    }

    /// `(sin x̃, cos x̃)` in one evaluation.
    pub fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.re.sin_cos();
        (
            DualScalar {
                re: s,
                du: self.du * c,
            },
            DualScalar {
                re: c,
                du: -self.du * s,
            },
        )
    }

    /// Inverse of `cos` on `(0, π)`. The dual part cannot be recovered when
    /// the real angle is 0 or π, so inputs with `|re| >= 1 - tol_parallel`
    /// fail with `AngleSingularity`.
    pub fn acos(self, tol_parallel: f64) -> Result<Self> {
        if !self.is_finite() {
            return Err(Error::NumericBreakdown { op: "acos" });
        }
        if self.re.abs() >= 1.0 - tol_parallel {
            return Err(Error::AngleSingularity { cosine: self.re });
        }
        let sin = (1.0 - self.re * self.re).sqrt();
        DualScalar {
            re: self.re.acos(),
            du: -self.du / sin,
        }
        .ensure_finite("acos")
    }

    /// Dual angle `θ̃` with `cos θ̃ = cos` and `sin θ̃ = sin`, real part in
    /// `(-π, π]`. Unlike [`acos`](Self::acos) this keeps the sign of the
    /// angle; `cos` and `sin` must describe a point of the dual unit circle.
    pub fn angle_from_cos_sin(cos: DualScalar, sin: DualScalar) -> Result<Self> {
        let theta = sin.re.atan2(cos.re);
        if cos.re == 0.0 && sin.re == 0.0 {
            return Err(Error::AngleSingularity { cosine: 0.0 });
        }
        let (s, c) = theta.sin_cos();
        // cos θ̃ = c - εθ* s, sin θ̃ = s + εθ* c  ⇒  θ* = sin.du·c - cos.du·s
        DualScalar {
            re: theta,
            du: sin.du * c - cos.du * s,
        }
        .ensure_finite("angle_from_cos_sin")
    }
}

impl fmt::Display for DualScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.du < 0.0 {
            write!(f, "{} - ε{}", self.re, -self.du)
        } else {
            write!(f, "{} + ε{}", self.re, self.du)
        }
    }
}

impl From<f64> for DualScalar {
    fn from(re: f64) -> Self {
        DualScalar::real(re)
    }
}

impl Add for DualScalar {
    type Output = DualScalar;
    fn add(self, y: DualScalar) -> DualScalar {
        DualScalar {
            re: self.re + y.re,
            du: self.du + y.du,
        }
    }
}

impl Sub for DualScalar {
    type Output = DualScalar;
    fn sub(self, y: DualScalar) -> DualScalar {
        DualScalar {
            re: self.re - y.re,
            du: self.du - y.du,
        }
    }
}

impl Neg for DualScalar {
    type Output = DualScalar;
    fn neg(self) -> DualScalar {
        DualScalar {
            re: -self.re,
            du: -self.du,
        }
    }
}

impl Mul for DualScalar {
    type Output = DualScalar;
    fn mul(self, y: DualScalar) -> DualScalar {
        DualScalar {
            re: self.re * y.re,
            du: self.re * y.du + self.du * y.re,
        }
    }
}

impl Mul<f64> for DualScalar {
    type Output = DualScalar;
    fn mul(self, k: f64) -> DualScalar {
        DualScalar {
            re: self.re * k,
            du: self.du * k,
        }
    }
}

impl Mul<DualScalar> for f64 {
    type Output = DualScalar;
    fn mul(self, x: DualScalar) -> DualScalar {
        x * self
    }
}

impl AddAssign for DualScalar {
    fn add_assign(&mut self, y: DualScalar) {
        *self = *self + y;
    }
}

impl SubAssign for DualScalar {
    fn sub_assign(&mut self, y: DualScalar) {
        *self = *self - y;
    }
}

impl MulAssign for DualScalar {
    fn mul_assign(&mut self, y: DualScalar) {
        *self = *self * y;
    }
}

impl std::iter::Sum for DualScalar {
    fn sum<I: Iterator<Item = DualScalar>>(iter: I) -> Self {
        iter.fold(DualScalar::ZERO, |a, b| a + b)
    }
}
