//! Exact and approximate function values.
//!
//! Nonzero exact values are `mag * e^{2*pi*i*num/den}` with a nonnegative
//! rational magnitude and a root-of-unity phase, so equality between exact
//! values is decidable. Float-valued rules (Archimedean characters and
//! friends) use [`Value::Approx`] and compare within a tolerance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A root of unity `e^{2*pi*i*num/den}` in lowest terms with `num < den`,
/// plus a distinguished absorbing `Zero`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum RootOfUnity {
    Zero,
    Turn { num: u64, den: u64 },
}

impl RootOfUnity {
    /// `e^{2*pi*i*num/den}`; the fraction may be any integer pair with `den > 0`.
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "denominator must be positive");
        let d = den as i64;
        let num = num.rem_euclid(d) as u64;
        let g = gcd(num, den);
        RootOfUnity::Turn { num: num / g, den: den / g }
    }

    pub fn zero() -> Self {
        RootOfUnity::Zero
    }

    pub fn one() -> Self {
        RootOfUnity::Turn { num: 0, den: 1 }
    }

    pub fn minus_one() -> Self {
        RootOfUnity::Turn { num: 1, den: 2 }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RootOfUnity::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, RootOfUnity::Turn { num: 0, .. })
    }

    /// Multiplication adds the turn fractions; `Zero` absorbs.
    pub fn mul(self, other: Self) -> Self {
        match (self, other) {
            (RootOfUnity::Zero, _) | (_, RootOfUnity::Zero) => RootOfUnity::Zero,
            (RootOfUnity::Turn { num: n1, den: d1 }, RootOfUnity::Turn { num: n2, den: d2 }) => {
                let g = gcd(d1, d2);
                let den = d1 / g * d2;
                let num = (n1 * (d2 / g) + n2 * (d1 / g)) % den;
                let g2 = gcd(num, den);
                RootOfUnity::Turn { num: num / g2, den: den / g2 }
            }
        }
    }

    pub fn conj(self) -> Self {
        match self {
            RootOfUnity::Zero => RootOfUnity::Zero,
            RootOfUnity::Turn { num: 0, den: _ } => self,
            RootOfUnity::Turn { num, den } => RootOfUnity::Turn { num: den - num, den },
        }
    }

    /// `self^k`; `Zero^0` is treated as `1` for convenience of empty products.
    pub fn pow(self, k: u64) -> Self {
        match self {
            RootOfUnity::Zero => {
                if k == 0 {
                    RootOfUnity::one()
                } else {
                    RootOfUnity::Zero
                }
            }
            RootOfUnity::Turn { num, den } => {
                let e = ((num as u128 * (k % den) as u128) % den as u128) as u64;
                let g = gcd(e, den);
                RootOfUnity::Turn { num: e / g, den: den / g }
            }
        }
    }

    /// Multiplicative order (`None` for `Zero`).
    pub fn order(&self) -> Option<u64> {
        match self {
            RootOfUnity::Zero => None,
            RootOfUnity::Turn { num: 0, .. } => Some(1),
            RootOfUnity::Turn { den, .. } => Some(*den),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            RootOfUnity::Zero => Complex64::new(0.0, 0.0),
            RootOfUnity::Turn { num, den } => {
                Complex64::from_polar(1.0, TAU * num as f64 / den as f64)
            }
        }
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootOfUnity::Zero => write!(f, "0"),
            RootOfUnity::Turn { num: 0, .. } => write!(f, "1"),
            RootOfUnity::Turn { num: 1, den: 2 } => write!(f, "-1"),
            RootOfUnity::Turn { num, den } => write!(f, "e(2pi {num}/{den})"),
        }
    }
}

/// A nonnegative rational in lowest terms, used for exact magnitudes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "denominator must be positive");
        let g = gcd(num, den).max(1);
        Frac { num: num / g, den: den / g }
    }

    pub fn zero() -> Self {
        Frac { num: 0, den: 1 }
    }

    pub fn one() -> Self {
        Frac { num: 1, den: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_one(&self) -> bool {
        self.num == 1 && self.den == 1
    }

    /// Checked product; `None` on u64 overflow of the reduced result.
    pub fn checked_mul(self, other: Frac) -> Option<Frac> {
        // Cross-reduce first to keep intermediates small.
        let g1 = gcd(self.num, other.den).max(1);
        let g2 = gcd(other.num, self.den).max(1);
        let num = (self.num / g1).checked_mul(other.num / g2)?;
        let den = (self.den / g2).checked_mul(other.den / g1)?;
        Some(Frac::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// A function value: either exact (rational magnitude times a root of unity)
/// or an approximate complex float.
#[derive(Clone, Copy, Debug)]
pub enum Value {
    Exact { mag: Frac, root: RootOfUnity },
    Approx(Complex64),
}

impl Value {
    pub fn one() -> Self {
        Value::Exact { mag: Frac::one(), root: RootOfUnity::one() }
    }

    pub fn zero() -> Self {
        Value::Exact { mag: Frac::zero(), root: RootOfUnity::Zero }
    }

    pub fn minus_one() -> Self {
        Value::Exact { mag: Frac::one(), root: RootOfUnity::minus_one() }
    }

    pub fn root(r: RootOfUnity) -> Self {
        if r.is_zero() {
            Value::zero()
        } else {
            Value::Exact { mag: Frac::one(), root: r }
        }
    }

    /// Exact value `mag * root`, normalised so that zero has a single form.
    pub fn exact(mag: Frac, root: RootOfUnity) -> Self {
        if mag.is_zero() || root.is_zero() {
            Value::zero()
        } else {
            Value::Exact { mag, root }
        }
    }

    pub fn approx(z: Complex64) -> Self {
        Value::Approx(z)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact { .. })
    }

    pub fn is_zero_exact(&self) -> bool {
        matches!(self, Value::Exact { mag, .. } if mag.is_zero())
    }

    pub fn is_one_exact(&self) -> bool {
        matches!(self, Value::Exact { mag, root } if mag.is_one() && root.is_one())
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Value::Exact { mag, root } => root.to_complex() * mag.to_f64(),
            Value::Approx(z) => *z,
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Value::Exact { mag, .. } => mag.to_f64(),
            Value::Approx(z) => z.norm(),
        }
    }

    pub fn mul(self, other: Value) -> Value {
        match (self, other) {
            (Value::Exact { mag: m1, root: r1 }, Value::Exact { mag: m2, root: r2 }) => {
                match m1.checked_mul(m2) {
                    Some(mag) => Value::exact(mag, r1.mul(r2)),
                    // Magnitude overflowed the rational representation.
                    None => Value::Approx(self.to_complex() * other.to_complex()),
                }
            }
            _ => Value::Approx(self.to_complex() * other.to_complex()),
        }
    }

    pub fn conj(self) -> Value {
        match self {
            Value::Exact { mag, root } => Value::Exact { mag, root: root.conj() },
            Value::Approx(z) => Value::Approx(z.conj()),
        }
    }

    pub fn powi(self, k: u64) -> Value {
        match self {
            Value::Exact { mag, root } => {
                if mag.is_zero() {
                    if k == 0 {
                        Value::one()
                    } else {
                        Value::zero()
                    }
                } else {
                    let mut m = Frac::one();
                    let mut ok = true;
                    for _ in 0..k {
                        match m.checked_mul(mag) {
                            Some(v) => m = v,
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        Value::exact(m, root.pow(k))
                    } else {
                        Value::Approx(self.to_complex().powi(k as i32))
                    }
                }
            }
            Value::Approx(z) => Value::Approx(z.powf(k as f64)),
        }
    }

    /// Exact equality for two exact values; mixed or approximate pairs
    /// compare within `tol`.
    pub fn eq_within(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Exact { mag: m1, root: r1 }, Value::Exact { mag: m2, root: r2 }) => {
                m1 == m2 && r1 == r2
            }
            _ => (self.to_complex() - other.to_complex()).norm() <= tol,
        }
    }
}

impl PartialEq for Value {
    /// Exact/exact compares exactly; any other combination within 1e-9.
    fn eq(&self, other: &Self) -> bool {
        self.eq_within(other, crate::DEFAULT_TOLERANCE)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact { mag, root } => {
                if mag.is_zero() {
                    write!(f, "0")
                } else if mag.is_one() {
                    write!(f, "{root}")
                } else {
                    write!(f, "{}/{} * {root}", mag.num, mag.den)
                }
            }
            Value::Approx(z) => write!(f, "{:.6}{:+.6}i", z.re, z.im),
        }
    }
}

/// JSON form of a value (for function-spec files and reports).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueJson {
    /// `[num, den]` for a plain root of unity `e^{2 pi i num/den}`.
    Root([u64; 2]),
    /// `{ "mag": [n, d], "root": [n, d] | null }`.
    Scaled { mag: [u64; 2], root: Option<[u64; 2]> },
    /// `{ "re": x, "im": y }` approximate value.
    Complex { re: f64, im: f64 },
}

impl ValueJson {
    pub fn to_value(&self) -> crate::Result<Value> {
        let check = |d: u64| -> crate::Result<()> {
            if d == 0 {
                Err(crate::Error::Argument("zero denominator in value".into()))
            } else {
                Ok(())
            }
        };
        Ok(match self {
            ValueJson::Root([n, d]) => {
                check(*d)?;
                Value::root(RootOfUnity::new(*n as i64, *d))
            }
            ValueJson::Scaled { mag: [mn, md], root } => {
                check(*md)?;
                let r = match root {
                    Some([n, d]) => {
                        check(*d)?;
                        RootOfUnity::new(*n as i64, *d)
                    }
                    None => RootOfUnity::Zero,
                };
                Value::exact(Frac::new(*mn, *md), r)
            }
            ValueJson::Complex { re, im } => Value::approx(Complex64::new(*re, *im)),
        })
    }

    pub fn from_value(v: &Value) -> Self {
        match v {
            Value::Exact { mag, root } => {
                if mag.is_one() {
                    match root {
                        RootOfUnity::Zero => ValueJson::Scaled { mag: [0, 1], root: None },
                        RootOfUnity::Turn { num, den } => ValueJson::Root([*num, *den]),
                    }
                } else {
                    let root = match root {
                        RootOfUnity::Zero => None,
                        RootOfUnity::Turn { num, den } => Some([*num, *den]),
                    };
                    ValueJson::Scaled { mag: [mag.num, mag.den], root }
                }
            }
            Value::Approx(z) => ValueJson::Complex { re: z.re, im: z.im },
        }
    }
}
