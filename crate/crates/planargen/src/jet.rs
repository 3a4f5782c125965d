//! Second-order truncated Taylor values in two variables.
//!
//! Carries a value together with first and second partials with respect to
//! the pair (z, w). Arithmetic propagates derivatives by the chain rule, so
//! a rational expression evaluated on jets yields its exact partials given
//! exact partials of the inputs.

use crate::real::Real;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Copy, Clone, Debug)]
pub struct Jet2<R> {
    pub v: R,
    pub dz: R,
    pub dw: R,
    pub dzz: R,
    pub dzw: R,
    pub dww: R,
}

impl<R: Real> Jet2<R> {
    pub fn constant(v: R) -> Self {
        Jet2 {
            v,
            dz: R::zero(),
            dw: R::zero(),
            dzz: R::zero(),
            dzw: R::zero(),
            dww: R::zero(),
        }
    }

    pub fn var_z(v: R) -> Self {
        Jet2 {
            v,
            dz: R::one(),
            dw: R::zero(),
            dzz: R::zero(),
            dzw: R::zero(),
            dww: R::zero(),
        }
    }

    pub fn var_w(v: R) -> Self {
        Jet2 {
            v,
            dz: R::zero(),
            dw: R::one(),
            dzz: R::zero(),
            dzw: R::zero(),
            dww: R::zero(),
        }
    }

    /// Lift a dependent quantity with externally computed partials.
    pub fn lifted(v: R, dz: R, dw: R, dzz: R, dzw: R, dww: R) -> Self {
        Jet2 {
            v,
            dz,
            dw,
            dzz,
            dzw,
            dww,
        }
    }

    pub fn recip(self) -> Self {
        let iv = self.v.recip();
        let iv2 = iv * iv;
        let iv3 = iv2 * iv;
        let two = R::from_i32(2);
        Jet2 {
            v: iv,
            dz: -self.dz * iv2,
            dw: -self.dw * iv2,
            dzz: (two * self.dz * self.dz * iv - self.dzz) * iv2,
            dzw: (two * self.dz * self.dw * iv3) - self.dzw * iv2,
            dww: (two * self.dw * self.dw * iv - self.dww) * iv2,
        }
    }

    pub fn powi(self, n: i32) -> Self {
        assert!(n >= 0);
        let mut acc = Jet2::constant(R::one());
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl<R: Real> Add for Jet2<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet2 {
            v: self.v + o.v,
            dz: self.dz + o.dz,
            dw: self.dw + o.dw,
            dzz: self.dzz + o.dzz,
            dzw: self.dzw + o.dzw,
            dww: self.dww + o.dww,
        }
    }
}

impl<R: Real> Sub for Jet2<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet2 {
            v: self.v - o.v,
            dz: self.dz - o.dz,
            dw: self.dw - o.dw,
            dzz: self.dzz - o.dzz,
            dzw: self.dzw - o.dzw,
            dww: self.dww - o.dww,
        }
    }
}

impl<R: Real> Neg for Jet2<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet2 {
            v: -self.v,
            dz: -self.dz,
            dw: -self.dw,
            dzz: -self.dzz,
            dzw: -self.dzw,
            dww: -self.dww,
        }
    }
}

impl<R: Real> Mul for Jet2<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = R::from_i32(2);
        Jet2 {
            v: self.v * o.v,
            dz: self.dz * o.v + self.v * o.dz,
            dw: self.dw * o.v + self.v * o.dw,
            dzz: self.dzz * o.v + two * self.dz * o.dz + self.v * o.dzz,
            dzw: self.dzw * o.v + self.dz * o.dw + self.dw * o.dz + self.v * o.dzw,
            dww: self.dww * o.v + two * self.dw * o.dw + self.v * o.dww,
        }
    }
}

impl<R: Real> Div for Jet2<R> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(z: f64, w: f64) -> f64 {
        // (1 + z*w)^2 / (1 + z + w) - w
        (1.0 + z * w).powi(2) / (1.0 + z + w) - w
    }

    fn f_jet(z: f64, w: f64) -> Jet2<f64> {
        let zj = Jet2::var_z(z);
        let wj = Jet2::var_w(w);
        let one = Jet2::constant(1.0);
        (one + zj * wj).powi(2) * (one + zj + wj).recip() - wj
    }

    #[test]
    fn jet_matches_finite_differences() {
        let (z, w) = (0.3, 0.7);
        let j = f_jet(z, w);
        let h = 1e-5;
        let dz = (f(z + h, w) - f(z - h, w)) / (2.0 * h);
        let dw = (f(z, w + h) - f(z, w - h)) / (2.0 * h);
        let dzz = (f(z + h, w) - 2.0 * f(z, w) + f(z - h, w)) / (h * h);
        let dww = (f(z, w + h) - 2.0 * f(z, w) + f(z, w - h)) / (h * h);
        let dzw = (f(z + h, w + h) - f(z + h, w - h) - f(z - h, w + h) + f(z - h, w - h))
            / (4.0 * h * h);
        assert!((j.v - f(z, w)).abs() < 1e-14);
        assert!((j.dz - dz).abs() < 1e-8, "{} vs {}", j.dz, dz);
        assert!((j.dw - dw).abs() < 1e-8);
        assert!((j.dzz - dzz).abs() < 1e-5);
        assert!((j.dzw - dzw).abs() < 1e-5);
        assert!((j.dww - dww).abs() < 1e-5);
    }
}
