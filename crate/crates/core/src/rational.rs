//! Exact rationals and certified enclosures for irrational quantities.
//!
//! Every bound in this crate is either an exact rational or an interval
//! `[lo, hi]` with rational endpoints that is guaranteed to contain the true
//! value. Logarithms are evaluated in `f64`, widened by a relative margin far
//! larger than the libm error, and then rounded outward onto the grid
//! `2^-GRID_BITS`.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub type Rational = Ratio<i128>;

const GRID_BITS: u32 = 40;
const REL_MARGIN: f64 = 1e-12;

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn ratio(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

fn grid_floor(v: f64) -> Rational {
    let scale = (1u64 << GRID_BITS) as f64;
    Rational::new((v * scale).floor() as i128, 1i128 << GRID_BITS)
}

fn grid_ceil(v: f64) -> Rational {
    let scale = (1u64 << GRID_BITS) as f64;
    Rational::new((v * scale).ceil() as i128, 1i128 << GRID_BITS)
}

/// Closed interval with rational endpoints containing a real quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn exact(v: Rational) -> Self {
        Enclosure { lo: v, hi: v }
    }

    /// Encloses a value computed in floating point with a few ulps of error.
    pub fn around(v: f64) -> Self {
        let margin = v.abs() * REL_MARGIN + 1e-12;
        Enclosure {
            lo: grid_floor(v - margin),
            hi: grid_ceil(v + margin),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        (to_f64(&self.lo) + to_f64(&self.hi)) / 2.0
    }

    pub fn add(self, o: Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo + o.lo,
            hi: self.hi + o.hi,
        }
    }

    pub fn scale(self, k: Rational) -> Enclosure {
        if k >= Rational::zero() {
            Enclosure {
                lo: self.lo * k,
                hi: self.hi * k,
            }
        } else {
            Enclosure {
                lo: self.hi * k,
                hi: self.lo * k,
            }
        }
    }

    /// Quotient of two enclosures; `o` must be strictly positive.
    pub fn div_pos(self, o: Enclosure) -> Enclosure {
        assert!(o.lo > Rational::zero(), "divisor enclosure must be positive");
        let cands = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = *cands.iter().min().unwrap();
        let hi = *cands.iter().max().unwrap();
        Enclosure { lo, hi }
    }

    /// Certainly `self < x`.
    pub fn certainly_lt(&self, x: Rational) -> bool {
        self.hi < x
    }

    /// Certainly `self > x`.
    pub fn certainly_gt(&self, x: Rational) -> bool {
        self.lo > x
    }

    pub fn certainly_le(&self, x: Rational) -> bool {
        self.hi <= x
    }

    pub fn certainly_ge(&self, x: Rational) -> bool {
        self.lo >= x
    }
}

impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_exact() {
            s.serialize_str(&fmt_rational(&self.lo))
        } else {
            s.serialize_str(&format!(
                "[{}, {}]",
                fmt_rational(&self.lo),
                fmt_rational(&self.hi)
            ))
        }
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if r.denom().is_power_of_two() && *r.denom() > 1 << 20 {
        // grid points from outward rounding print better as decimals
        format!("{:.9}", to_f64(r))
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

trait PowerOfTwo {
    fn is_power_of_two(&self) -> bool;
}

impl PowerOfTwo for i128 {
    fn is_power_of_two(&self) -> bool {
        *self > 0 && (*self & (*self - 1)) == 0
    }
}

/// Parses `p/q`, an integer, or a decimal literal.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().ok()?;
        let q: i128 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
            return None;
        }
        let neg = whole.starts_with('-');
        let w: i128 = if whole.is_empty() || whole == "-" {
            0
        } else {
            whole.parse().ok()?
        };
        let f: i128 = frac.parse().ok()?;
        let d = 10i128.pow(frac.len() as u32);
        let mag = w.abs() * d + f;
        return Some(Rational::new(if neg { -mag } else { mag }, d));
    }
    s.parse::<i128>().ok().map(Rational::from_integer)
}

pub fn rational_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Enclosure of `log2(x)` for a positive rational.
pub fn log2(x: Rational) -> Enclosure {
    assert!(x > Rational::zero(), "log2 of a non-positive number");
    if x.is_integer() && x.numer().is_power_of_two() {
        return Enclosure::exact(int(x.numer().trailing_zeros() as i128));
    }
    Enclosure::around(to_f64(&x).log2())
}

/// Enclosure of the natural logarithm of a positive rational.
pub fn ln(x: Rational) -> Enclosure {
    assert!(x > Rational::zero(), "ln of a non-positive number");
    if x == int(1) {
        return Enclosure::exact(int(0));
    }
    Enclosure::around(to_f64(&x).ln())
}

/// `floor(log2(x)) + 1` for `x >= 1`, i.e. the bit length.
pub fn bit_length(x: u128) -> u32 {
    128 - x.leading_zeros()
}

/// `ceil(sqrt(n))` exactly.
pub fn ceil_sqrt(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while r * r < n {
        r += 1;
    }
    r
}

pub fn floor_rational(r: &Rational) -> i128 {
    r.numer().div_floor(r.denom())
}

pub fn ceil_rational(r: &Rational) -> i128 {
    r.numer().div_ceil(r.denom())
}
