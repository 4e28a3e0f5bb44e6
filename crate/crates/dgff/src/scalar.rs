//! Exact numbers in the ring of Gaussian-rational Laurent polynomials in `π^{1/2}`.
//!
//! Every kernel value, monomial value and correlator in this crate is a
//! [`PiScalar`]. π is treated as transcendental, so two scalars are equal
//! exactly when their canonical term lists are equal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `re + i·im` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    pub fn imag(im: Rational) -> Self {
        GaussianRational { re: Rational::zero(), im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        Self::imag(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussianRational { re: &self.re * r, im: &self.im * r }
    }

    /// `i^k · self`.
    pub fn mul_i_pow(&self, k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => self.clone(),
            1 => GaussianRational { re: -&self.im, im: self.re.clone() },
            2 => GaussianRational { re: -&self.re, im: -&self.im },
            _ => GaussianRational { re: self.im.clone(), im: -&self.re },
        }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        // Most values are purely real or purely imaginary; skip the zero products.
        let (ar, ai, br, bi) = (!self.re.is_zero(), !self.im.is_zero(), !o.re.is_zero(), !o.im.is_zero());
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        if ar && br {
            re += &self.re * &o.re;
        }
        if ai && bi {
            re -= &self.im * &o.im;
        }
        if ar && bi {
            im += &self.re * &o.im;
        }
        if ai && br {
            im += &self.im * &o.re;
        }
        GaussianRational { re, im }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.re)),
            (true, false) => write!(f, "{}i", imag_coeff(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "({} {} {}i)", format_rational(&self.re), sign, imag_coeff(&self.im.abs()))
            }
        }
    }
}

fn imag_coeff(r: &Rational) -> String {
    if r.is_one() {
        String::new()
    } else if *r == -Rational::one() {
        "-".into()
    } else {
        format!("{}*", format_rational(r))
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        self.mul_ref(o)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        if !o.re.is_zero() {
            self.re += &o.re;
        }
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &GaussianRational) {
        if !o.re.is_zero() {
            self.re -= &o.re;
        }
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

/// An element `Σ_k c_k π^{k/2}` with Gaussian-rational `c_k`.
///
/// Terms are kept sorted by ascending `k` with no zero coefficients, so derived
/// equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PiScalar {
    terms: Vec<(i32, GaussianRational)>,
}

impl PiScalar {
    pub fn zero() -> Self {
        PiScalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_gaussian(GaussianRational::one())
    }

    pub fn i() -> Self {
        Self::from_gaussian(GaussianRational::i())
    }

    /// `c · π^{half_exp/2}`.
    pub fn term(half_exp: i32, c: GaussianRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            PiScalar { terms: vec![(half_exp, c)] }
        }
    }

    pub fn from_gaussian(c: GaussianRational) -> Self {
        Self::term(0, c)
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::term(0, GaussianRational::real(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    /// `π^{half_exp/2}`.
    pub fn pi_pow(half_exp: i32) -> Self {
        Self::term(half_exp, GaussianRational::one())
    }

    /// Builds a scalar from arbitrary `(half_exp, coeff)` pairs, merging and
    /// dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (i32, GaussianRational)>>(it: I) -> Self {
        let mut v: Vec<(i32, GaussianRational)> = it.into_iter().collect();
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(i32, GaussianRational)> = Vec::with_capacity(v.len());
        for (k, c) in v {
            match out.last_mut() {
                Some((lk, lc)) if *lk == k => *lc += &c,
                _ => out.push((k, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        PiScalar { terms: out }
    }

    pub fn terms(&self) -> &[(i32, GaussianRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `π^{half_exp/2}`.
    pub fn coeff(&self, half_exp: i32) -> GaussianRational {
        self.terms
            .iter()
            .find(|t| t.0 == half_exp)
            .map(|t| t.1.clone())
            .unwrap_or_default()
    }

    /// The set of half-exponents carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<i32> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn conj(&self) -> Self {
        PiScalar { terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect() }
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.1.im.is_zero())
    }

    pub fn is_imaginary(&self) -> bool {
        self.terms.iter().all(|t| t.1.re.is_zero())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        PiScalar { terms: self.terms.iter().map(|(k, c)| (*k, c.scale(r))).collect() }
    }

    pub fn mul_gaussian(&self, g: &GaussianRational) -> Self {
        if g.is_zero() {
            return Self::zero();
        }
        PiScalar { terms: self.terms.iter().map(|(k, c)| (*k, c * g)).collect() }
    }

    /// Multiplies by `π^{half_exp/2}`.
    pub fn shift(&self, half_exp: i32) -> Self {
        PiScalar { terms: self.terms.iter().map(|(k, c)| (k + half_exp, c.clone())).collect() }
    }

    pub fn mul_i_pow(&self, k: i64) -> Self {
        PiScalar { terms: self.terms.iter().map(|(e, c)| (*e, c.mul_i_pow(k))).collect() }
    }

    /// Division by a single-term scalar; anything else is rejected.
    pub fn checked_div(&self, d: &PiScalar) -> Result<PiScalar, Error> {
        match d.terms.as_slice() {
            [(k, c)] => {
                let inv = c.inv().expect("canonical terms are nonzero");
                Ok(self.mul_gaussian(&inv).shift(-k))
            }
            [] => Err(Error::DivisionByZero),
            _ => Err(Error::NonMonomialDivisor(d.to_string())),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `self += a * b` without materialising the product.
    pub fn add_mul(&mut self, a: &PiScalar, b: &PiScalar) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                self.add_term(ka + kb, &(ca * cb));
            }
        }
    }

    fn add_term(&mut self, k: i32, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by_key(&k, |t| t.0) {
            Ok(pos) => {
                self.terms[pos].1 += c;
                if self.terms[pos].1.is_zero() {
                    self.terms.remove(pos);
                }
            }
            Err(pos) => self.terms.insert(pos, (k, c.clone())),
        }
    }

    /// Largest bit length among all numerators and denominators.
    pub fn max_bits(&self) -> u64 {
        self.terms
            .iter()
            .flat_map(|(_, c)| [&c.re, &c.im])
            .map(|r| r.numer().bits().max(r.denom().bits()))
            .max()
            .unwrap_or(0)
    }

    /// Numeric value with π replaced by a rational approximation accurate to
    /// `pi_digits` decimal digits. Coefficients in this crate routinely cancel
    /// to many digits, so the sum is formed exactly before rounding.
    pub fn to_float(&self, pi_digits: u32) -> (f64, f64) {
        let digits = pi_digits.max(15);
        let (pi, sqrt_pi) = pi_approximations(digits);
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for (k, c) in &self.terms {
            let whole = k.div_euclid(2);
            let mut f = pow_rat(&pi, whole);
            if k.rem_euclid(2) == 1 {
                f *= &sqrt_pi;
            }
            re += &c.re * &f;
            im += &c.im * &f;
        }
        (re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN))
    }

    /// [`PiScalar::to_float`] with enough digits to absorb the cancellation
    /// implied by the coefficient sizes.
    pub fn to_complex(&self) -> (f64, f64) {
        let d = 40 + (self.max_bits() as f64 * std::f64::consts::LOG10_2).ceil() as u32;
        self.to_float(d)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_complex().0
    }
}

fn pow_rat(x: &Rational, e: i32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= x;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

fn arctan_inv(x: u64, scale: &BigInt) -> BigInt {
    // Fixed-point Taylor series of atan(1/x), scaled by `scale`.
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = scale / &x;
    let mut sum = power.clone();
    let mut n: u64 = 1;
    loop {
        power = &power / &x2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * n + 1);
        if n % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        n += 1;
    }
    sum
}

/// Rational approximations of π and √π to `digits` decimal digits (Machin).
pub fn pi_approximations(digits: u32) -> (Rational, Rational) {
    let guard = 10;
    let scale = BigInt::from(10).pow(digits + guard);
    let pi_fixed = (arctan_inv(5, &scale) * 16) - (arctan_inv(239, &scale) * 4);
    let sqrt_fixed: BigInt = Roots::sqrt(&(&pi_fixed * &scale));
    (
        Rational::new(pi_fixed, scale.clone()),
        Rational::new(sqrt_fixed, scale),
    )
}

impl Ord for GaussianRational {
    fn cmp(&self, o: &Self) -> Ordering {
        self.re.cmp(&o.re).then_with(|| self.im.cmp(&o.im))
    }
}

impl PartialOrd for GaussianRational {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Add for &PiScalar {
    type Output = PiScalar;
    fn add(self, o: &PiScalar) -> PiScalar {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl Add for PiScalar {
    type Output = PiScalar;
    fn add(mut self, o: PiScalar) -> PiScalar {
        self += &o;
        self
    }
}

impl Sub for &PiScalar {
    type Output = PiScalar;
    fn sub(self, o: &PiScalar) -> PiScalar {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl Sub for PiScalar {
    type Output = PiScalar;
    fn sub(mut self, o: PiScalar) -> PiScalar {
        self -= &o;
        self
    }
}

impl Mul for &PiScalar {
    type Output = PiScalar;
    fn mul(self, o: &PiScalar) -> PiScalar {
        let mut out = PiScalar::zero();
        out.add_mul(self, o);
        out
    }
}

impl Mul for PiScalar {
    type Output = PiScalar;
    fn mul(self, o: PiScalar) -> PiScalar {
        &self * &o
    }
}

impl Neg for &PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        PiScalar { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Neg for PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        -&self
    }
}

impl AddAssign<&PiScalar> for PiScalar {
    fn add_assign(&mut self, o: &PiScalar) {
        for (k, c) in &o.terms {
            self.add_term(*k, c);
        }
    }
}

impl AddAssign for PiScalar {
    fn add_assign(&mut self, o: PiScalar) {
        *self += &o;
    }
}

impl SubAssign<&PiScalar> for PiScalar {
    fn sub_assign(&mut self, o: &PiScalar) {
        for (k, c) in &o.terms {
            self.add_term(*k, &-c);
        }
    }
}

impl SubAssign for PiScalar {
    fn sub_assign(&mut self, o: PiScalar) {
        *self -= &o;
    }
}

impl std::iter::Sum for PiScalar {
    fn sum<I: Iterator<Item = PiScalar>>(iter: I) -> PiScalar {
        let mut acc = PiScalar::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

impl From<i64> for PiScalar {
    fn from(n: i64) -> Self {
        PiScalar::from_int(n)
    }
}

impl From<Rational> for PiScalar {
    fn from(r: Rational) -> Self {
        PiScalar::from_rational(r)
    }
}

impl From<GaussianRational> for PiScalar {
    fn from(g: GaussianRational) -> Self {
        PiScalar::from_gaussian(g)
    }
}

fn pi_factor(k: i32) -> String {
    let a = k.unsigned_abs();
    if a % 2 == 0 {
        match a / 2 {
            1 => "pi".into(),
            e => format!("pi^{e}"),
        }
    } else {
        format!("pi^({a}/2)")
    }
}

/// Human-readable rendering, highest power of π first, e.g. `4 - 8/pi`.
impl fmt::Display for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            let negative_real = c.im.is_zero() && c.re.is_negative();
            let negative_imag = c.re.is_zero() && c.im.is_negative();
            let (sign, c) = if !first && (negative_real || negative_imag) {
                (" - ", -c)
            } else if first {
                ("", c.clone())
            } else {
                (" + ", c.clone())
            };
            first = false;
            write!(f, "{sign}")?;
            if *k == 0 {
                write!(f, "{c}")?;
            } else if *k > 0 {
                if c.is_zero() || c == GaussianRational::one() {
                    write!(f, "{}", pi_factor(*k))?;
                } else {
                    write!(f, "{c}*{}", pi_factor(*k))?;
                }
            } else if c.im.is_zero() {
                let r = &c.re;
                if r.denom().is_one() {
                    write!(f, "{}/{}", r.numer(), pi_factor(*k))?;
                } else {
                    write!(f, "{}/({}*{})", r.numer(), r.denom(), pi_factor(*k))?;
                }
            } else {
                write!(f, "{c}/{}", pi_factor(*k))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp_num: i32,
    re: String,
    im: String,
}

impl Serialize for PiScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(k, c)| TermJson { exp_num: *k, re: format_rational(&c.re), im: format_rational(&c.im) })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<TermJson> = Vec::deserialize(d)?;
        let mut terms = Vec::with_capacity(v.len());
        for t in v {
            let re = parse_rational(&t.re).map_err(serde::de::Error::custom)?;
            let im = parse_rational(&t.im).map_err(serde::de::Error::custom)?;
            terms.push((t.exp_num, GaussianRational::new(re, im)));
        }
        Ok(PiScalar::from_terms(terms))
    }
}
