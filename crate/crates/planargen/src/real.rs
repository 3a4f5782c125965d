//! Scalar abstraction for the numeric oracle.
//!
//! All series evaluation is generic over [`Real`], instantiated at `f64`
//! (fast lane, ~16 decimal digits) and at [`Dd`], a double-double built on
//! `twofloat` (~31 decimal digits). Samplers always consume `f64` values.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Real:
    Copy
    + PartialOrd
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    /// Decimal digits the type honestly carries.
    const DIGITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn from_i32(x: i32) -> Self {
        Self::from_f64(x as f64)
    }
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn maxv(self, o: Self) -> Self {
        if self > o {
            self
        } else {
            o
        }
    }
    fn minv(self, o: Self) -> Self {
        if self < o {
            self
        } else {
            o
        }
    }
    /// Unit roundoff of the representation.
    fn eps() -> Self;
    fn is_finite_val(self) -> bool;
    /// Exact dyadic decomposition `self = mantissa * 2^exp` (mantissa signed).
    fn to_mantissa_exp(self) -> (BigInt, i64);
    /// Parse a decimal string produced by [`format_decimal`].
    fn from_decimal(s: &str) -> Result<Self, DecimalError>;
}

impl Real for f64 {
    const DIGITS: u32 = 15;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn eps() -> Self {
        f64::EPSILON
    }
    fn is_finite_val(self) -> bool {
        self.is_finite()
    }
    fn to_mantissa_exp(self) -> (BigInt, i64) {
        f64_mantissa_exp(self)
    }
    fn from_decimal(s: &str) -> Result<Self, DecimalError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| DecimalError(s.to_string()))
    }
}

/// Double-double scalar: `twofloat` arithmetic plus full-precision exp/ln
/// (the crate's own transcendentals only reach ~1e-17 relative error).
#[derive(Copy, Clone, PartialEq, PartialOrd)]
pub struct Dd(twofloat::TwoFloat);

impl Dd {
    pub fn new(hi: f64, lo: f64) -> Self {
        Dd(twofloat::TwoFloat::try_from((hi, lo))
            .unwrap_or_else(|_| twofloat::TwoFloat::from(hi + lo)))
    }
    pub fn hi(self) -> f64 {
        self.0.hi()
    }
    pub fn lo(self) -> f64 {
        self.0.lo()
    }
    /// ln(2) to double-double precision.
    fn ln2() -> Self {
        Dd::new(0.693_147_180_559_945_3, 2.319_046_813_846_299_6e-17)
    }
    fn scale_pow2(self, k: i32) -> Self {
        // multiplication by an exact power of two is exact
        let f = 2f64.powi(k);
        Dd(twofloat::TwoFloat::try_from((self.0.hi() * f, self.0.lo() * f))
            .unwrap_or_else(|_| self.0 * twofloat::TwoFloat::from(f)))
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e},{:e})", self.0.hi(), self.0.lo())
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_decimal(*self, Dd::DIGITS as usize + 4))
    }
}

macro_rules! dd_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr for Dd {
            type Output = Dd;
            fn $m(self, rhs: Dd) -> Dd {
                Dd(self.0.$m(rhs.0))
            }
        }
        impl $atr for Dd {
            fn $am(&mut self, rhs: Dd) {
                *self = $tr::$m(*self, rhs);
            }
        }
    };
}
dd_binop!(Add, add, AddAssign, add_assign);
dd_binop!(Sub, sub, SubAssign, sub_assign);
dd_binop!(Mul, mul, MulAssign, mul_assign);

// twofloat 0.8's TwoFloat/TwoFloat division loses the low word, so do the
// classical three-step long division on top of its (sound) mul/sub.
impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let bh = rhs.0.hi();
        if bh == 0.0 {
            return Dd::from_f64(self.0.hi() / bh);
        }
        let q0 = self.0.hi() / bh;
        let r1 = self - rhs * Dd::from_f64(q0);
        let q1 = r1.0.hi() / bh;
        let r2 = r1 - rhs * Dd::from_f64(q1);
        let q2 = r2.0.hi() / bh;
        Dd::from_f64(q0) + Dd::from_f64(q1) + Dd::from_f64(q2)
    }
}
impl DivAssign for Dd {
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd(twofloat::TwoFloat::from(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0 && self.0.lo() == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd(twofloat::TwoFloat::from(1.0))
    }
}

impl Real for Dd {
    const DIGITS: u32 = 31;

    fn from_f64(x: f64) -> Self {
        Dd(twofloat::TwoFloat::from(x))
    }
    fn to_f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }
    fn abs(self) -> Self {
        if self.0.hi() < 0.0 || (self.0.hi() == 0.0 && self.0.lo() < 0.0) {
            -self
        } else {
            self
        }
    }
    fn sqrt(self) -> Self {
        Dd(self.0.sqrt())
    }

    fn exp(self) -> Self {
        let x = self.to_f64();
        if x == 0.0 {
            return Dd::one();
        }
        if x > 700.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if x < -745.0 {
            return Dd::zero();
        }
        let k = (x / std::f64::consts::LN_2).round();
        let r = self - Dd::ln2() * Dd::from_f64(k);
        // |r| <= ln2/2; reduce by 2^5 then Taylor, then square back up
        let r32 = r.scale_pow2(-5);
        let mut term = Dd::one();
        let mut sum = Dd::one();
        for j in 1..=20 {
            term = term * r32 / Dd::from_f64(j as f64);
            sum += term;
            if term.hi().abs() < 1e-35 * sum.hi().abs() {
                break;
            }
        }
        let mut e = sum;
        for _ in 0..5 {
            e = e * e;
        }
        e.scale_pow2(k as i32)
    }

    fn ln(self) -> Self {
        let h = self.to_f64();
        if h <= 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        let mut y = Dd::from_f64(h.ln());
        // Newton: y <- y + x*exp(-y) - 1, quadratic from an f64 seed
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::one();
        }
        y
    }

    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dd::one();
        }
        let neg = n < 0;
        let mut e = n.unsigned_abs();
        let mut base = self;
        let mut acc = Dd::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if neg {
            acc.recip()
        } else {
            acc
        }
    }

    fn eps() -> Self {
        Dd::from_f64(4.93e-32) // ~2^-104
    }
    fn is_finite_val(self) -> bool {
        self.0.hi().is_finite() && self.0.lo().is_finite()
    }
    fn to_mantissa_exp(self) -> (BigInt, i64) {
        let (m1, e1) = f64_mantissa_exp(self.0.hi());
        let (m2, e2) = f64_mantissa_exp(self.0.lo());
        if m1.is_zero() {
            return (m2, e2);
        }
        if m2.is_zero() {
            return (m1, e1);
        }
        let e = e1.min(e2);
        ((m1 << (e1 - e) as u32) + (m2 << (e2 - e) as u32), e)
    }
    fn from_decimal(s: &str) -> Result<Self, DecimalError> {
        parse_dd(s)
    }
}

#[derive(Debug, Clone)]
pub struct DecimalError(pub String);

impl fmt::Display for DecimalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal `{}`", self.0)
    }
}
impl std::error::Error for DecimalError {}

fn f64_mantissa_exp(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    assert!(x.is_finite(), "non-finite value in exact decomposition");
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    (BigInt::from(sign) * BigInt::from(m), e)
}

/// Format `x` with `sig` significant decimal digits, exactly rounded,
/// as `[-]d.ddd...e<exp>`. Deterministic canonical form.
pub fn format_decimal<R: Real>(x: R, sig: usize) -> String {
    let (m, e2) = x.to_mantissa_exp();
    if m.is_zero() {
        return "0".to_string();
    }
    let neg = m.is_negative();
    let m = m.abs();
    // decimal exponent estimate: log10(m * 2^e2)
    let bits = m.bits() as i64 + e2;
    let mut dec_exp = ((bits as f64) * std::f64::consts::LOG10_2).floor() as i64;
    loop {
        // n = round(m * 2^e2 * 10^(sig-1-dec_exp))
        let p10 = sig as i64 - 1 - dec_exp;
        let (mut num, mut den) = (m.clone(), BigInt::one());
        if e2 >= 0 {
            num <<= e2 as u32;
        } else {
            den <<= (-e2) as u32;
        }
        if p10 >= 0 {
            num *= BigInt::from(10u32).pow(p10 as u32);
        } else {
            den *= BigInt::from(10u32).pow((-p10) as u32);
        }
        let q: BigInt = (&num + (&den >> 1u32)) / &den; // round half up, deterministic
        let digits = q.to_string();
        if digits.len() > sig {
            dec_exp += 1;
            continue;
        }
        if digits.len() < sig {
            dec_exp -= 1;
            continue;
        }
        let trimmed = digits.trim_end_matches('0');
        let shown = if trimmed.is_empty() { "0" } else { trimmed };
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&shown[..1]);
        if shown.len() > 1 {
            out.push('.');
            out.push_str(&shown[1..]);
        }
        out.push('e');
        out.push_str(&dec_exp.to_string());
        return out;
    }
}

/// Parse a decimal literal into double-double, correct to well below one
/// ulp of the low word (exact integer arithmetic for the residual).
fn parse_dd(s: &str) -> Result<Dd, DecimalError> {
    let t = s.trim();
    if t == "0" || t == "-0" || t == "0.0" {
        return Ok(Dd::zero());
    }
    let err = || DecimalError(s.to_string());
    // split mantissa / exponent
    let (mant_str, exp10) = match t.find(['e', 'E']) {
        Some(i) => {
            let ex: i64 = t[i + 1..].parse().map_err(|_| err())?;
            (&t[..i], ex)
        }
        None => (t, 0),
    };
    let neg = mant_str.starts_with('-');
    let mant_str = mant_str.trim_start_matches(['+', '-']);
    let (ipart, fpart) = match mant_str.find('.') {
        Some(i) => (&mant_str[..i], &mant_str[i + 1..]),
        None => (mant_str, ""),
    };
    if ipart.is_empty() && fpart.is_empty() {
        return Err(err());
    }
    let digits: String = ipart.chars().chain(fpart.chars()).collect();
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let m: BigInt = digits.parse().map_err(|_| err())?;
    let m = if neg { -m } else { m };
    let p10 = exp10 - fpart.len() as i64;
    // value = m * 10^p10; hi = correctly rounded f64 via std parser
    let hi: f64 = t.parse().map_err(|_| err())?;
    if !hi.is_finite() {
        return Err(err());
    }
    // residual = value - hi, computed exactly, then rounded to f64
    let (mh, eh) = f64_mantissa_exp(hi);
    // common denominator: 10^max(0,-p10) * 2^max(0,-eh)
    let mut num_v = m.clone();
    let mut num_h = mh.clone();
    if p10 >= 0 {
        num_v *= BigInt::from(10u32).pow(p10 as u32);
    } else {
        num_h *= BigInt::from(10u32).pow((-p10) as u32);
    }
    if eh >= 0 {
        num_h <<= eh as u32;
    } else {
        num_v <<= (-eh) as u32;
    }
    let resid_num = num_v - num_h; // residual numerator over den
    let lo = if resid_num.is_zero() {
        0.0
    } else {
        // den = 10^max(0,-p10) * 2^max(0,-eh); residual = resid_num/den
        // scale numerator by 2^192 before integer division for precision
        let mut den = BigInt::one();
        if p10 < 0 {
            den *= BigInt::from(10u32).pow((-p10) as u32);
        }
        if eh < 0 {
            den <<= (-eh) as u32;
        }
        let q = (resid_num << 192u32) / den;
        q.to_f64().unwrap_or(0.0) * 2f64.powi(-192)
    };
    Ok(Dd::new(hi, lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_exp_ln_roundtrip_tight() {
        for &x in &[0.3333333333333333, 1.0, 0.001, 7.25, -2.5, 42.0] {
            let d = Dd::from_f64(x);
            let r = d.exp().ln();
            let err = (r - d).abs().to_f64();
            assert!(err < 1e-29 * (1.0 + x.abs()), "x={x} err={err}");
        }
    }

    #[test]
    fn dd_exp_matches_f64_leading() {
        for &x in &[0.5, -0.7, 3.0, 10.0, -20.0] {
            let got = Dd::from_f64(x).exp().to_f64();
            let want = x.exp();
            assert!(
                ((got - want) / want).abs() < 1e-14,
                "exp({x}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn dd_division_precision() {
        // 1/3 in double-double: hi + lo should carry ~31 digits
        let third = Dd::one() / Dd::from_f64(3.0);
        assert!(third.lo() != 0.0, "low word lost in division");
        let err = (third * Dd::from_f64(3.0) - Dd::one()).abs().to_f64();
        assert!(err < 1e-30, "err {err}");
    }

    #[test]
    fn dd_arithmetic_exactness_vs_bigint() {
        // check +,-,* against exact dyadic arithmetic on pseudo-random values
        use num_bigint::BigInt;
        let exact = |x: Dd| -> (BigInt, i64) { x.to_mantissa_exp() };
        let err_rel = |got: Dd, want_m: &BigInt, want_e: i64| -> f64 {
            let (gm, ge) = exact(got);
            let e = ge.min(want_e);
            let diff = (&gm << (ge - e) as u32) - (want_m << (want_e - e) as u32);
            let denom = (want_m.abs().to_f64().unwrap_or(1.0)).max(1.0)
                * 2f64.powi(want_e as i32 - e as i32);
            diff.to_f64().unwrap_or(f64::MAX).abs() / denom
        };
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let f = (state >> 11) as f64 / (1u64 << 53) as f64;
            Dd::from_f64(f + 0.25) * Dd::from_f64(1.0 + ((state & 0xff) as f64) / 256.0)
        };
        for _ in 0..200 {
            let a = rnd();
            let b = rnd();
            let (ma, ea) = exact(a);
            let (mb, eb) = exact(b);
            // sum
            let e = ea.min(eb);
            let ms = (&ma << (ea - e) as u32) + (&mb << (eb - e) as u32);
            assert!(err_rel(a + b, &ms, e) < 1e-30);
            // difference
            let md = (&ma << (ea - e) as u32) - (&mb << (eb - e) as u32);
            assert!(err_rel(a - b, &md, e) < 1e-28);
            // product
            let mp = &ma * &mb;
            assert!(err_rel(a * b, &mp, ea + eb) < 1e-30);
        }
    }

    #[test]
    fn decimal_roundtrip_f64() {
        for &x in &[
            0.036728410169889675,
            1.0,
            -2.2132650520179e-5,
            1e-300,
            123456.789,
        ] {
            let s = format_decimal(x, 21);
            let back = f64::from_decimal(&s).unwrap();
            assert_eq!(x, back, "{s}");
        }
    }

    #[test]
    fn decimal_roundtrip_dd() {
        let vals = [
            Dd::one() / Dd::from_f64(3.0),
            Dd::from_f64(0.03672841).exp(),
            Dd::new(1.0625, -3.25e-19),
            Dd::from_f64(2.0).sqrt(),
            -Dd::from_f64(7.0).recip(),
        ];
        for &v in &vals {
            let s = format_decimal(v, 37);
            let back = Dd::from_decimal(&s).unwrap();
            assert_eq!(v.hi().to_bits(), back.hi().to_bits(), "{s}");
            assert_eq!(v.lo().to_bits(), back.lo().to_bits(), "{s}");
            // canonical: format(parse(s)) == s
            assert_eq!(format_decimal(back, 37), s);
        }
    }

    #[test]
    fn decimal_zero() {
        assert_eq!(format_decimal(0.0f64, 20), "0");
        assert_eq!(Dd::from_decimal("0").unwrap().hi(), 0.0);
    }
}
