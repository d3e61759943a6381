//! Integer functions used as growth bounds: `f`, `g` and `rho`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, ceil_rational, floor_rational, int, Enclosure, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    /// `ceil(sqrt(n))`.
    CeilSqrt,
    /// `c * n / log2(n)^2`; at `n = 1` the value is taken to be `c`.
    NOverLog2Sq(Rational),
    /// `ln(inner(x) / ln(x)) * ln(x)`; defined for `x >= 2`.
    LogComposite(Box<FunctionSpec>),
    Affine { slope: Rational, intercept: Rational },
    Constant(Rational),
    /// Explicit values on a finite domain.
    Table(BTreeMap<u64, Rational>),
}

impl FunctionSpec {
    /// `ln(f(x)/ln(x)) ln(x)` with `f = ceil(sqrt(x))`.
    pub fn default_g() -> FunctionSpec {
        FunctionSpec::LogComposite(Box::new(FunctionSpec::CeilSqrt))
    }

    pub fn eval(&self, n: u64) -> Result<Enclosure> {
        Ok(match self {
            FunctionSpec::CeilSqrt => Enclosure::exact(int(rational::ceil_sqrt(n as u128) as i128)),
            FunctionSpec::NOverLog2Sq(c) => {
                if n <= 1 {
                    Enclosure::exact(*c)
                } else {
                    let l = rational::log2(int(n as i128));
                    let sq = Enclosure { lo: l.lo * l.lo, hi: l.hi * l.hi };
                    Enclosure::exact(*c * int(n as i128)).div_pos(sq)
                }
            }
            FunctionSpec::LogComposite(inner) => {
                if n < 2 {
                    return Err(Error::Input(format!("log-composite function undefined at {n}")));
                }
                let h = inner.eval(n)?;
                let lnx = rational::ln(int(n as i128));
                let q = h.div_pos(lnx);
                if q.lo <= Rational::zero() {
                    return Err(Error::Input(format!("log-composite function undefined at {n}")));
                }
                let lq = Enclosure {
                    lo: rational::ln(q.lo).lo,
                    hi: rational::ln(q.hi).hi,
                };
                let c = [lq.lo * lnx.lo, lq.lo * lnx.hi, lq.hi * lnx.lo, lq.hi * lnx.hi];
                Enclosure {
                    lo: *c.iter().min().unwrap(),
                    hi: *c.iter().max().unwrap(),
                }
            }
            FunctionSpec::Affine { slope, intercept } => {
                Enclosure::exact(*slope * int(n as i128) + *intercept)
            }
            FunctionSpec::Constant(c) => Enclosure::exact(*c),
            FunctionSpec::Table(t) => Enclosure::exact(*t.get(&n).ok_or_else(|| {
                Error::Input(format!("table function has no value at {n}"))
            })?),
        })
    }

    /// Integer exponent used for powers such as `a^{f(n)}`: the value rounded up.
    pub fn eval_ceil(&self, n: u64) -> Result<u64> {
        let e = self.eval(n)?;
        let c = ceil_rational(&e.lo).max(0);
        Ok(c as u64)
    }

    pub fn is_declared_sublinear(&self) -> bool {
        match self {
            FunctionSpec::Affine { slope, .. } => slope.is_zero(),
            FunctionSpec::LogComposite(inner) => inner.is_declared_sublinear(),
            _ => true,
        }
    }

    pub fn is_declared_superlogarithmic(&self) -> bool {
        match self {
            FunctionSpec::CeilSqrt | FunctionSpec::NOverLog2Sq(_) => true,
            FunctionSpec::LogComposite(inner) => inner.is_declared_superlogarithmic(),
            FunctionSpec::Affine { slope, .. } => *slope > Rational::zero(),
            _ => false,
        }
    }

    /// Viability on `[lo, hi]`: `f(n) >= 6` and no certified decrease.
    pub fn check_viable(&self, lo: u64, hi: u64) -> Result<()> {
        let six = int(6);
        let mut prev: Option<Enclosure> = None;
        for n in lo.max(1)..=hi {
            let v = self.eval(n)?;
            if !v.certainly_ge(six) {
                return Err(Error::Input(format!(
                    "function {self} is not viable: value at {n} is below 6"
                )));
            }
            if let Some(p) = prev {
                if v.hi < p.lo {
                    return Err(Error::Input(format!(
                        "function {self} is not viable: decreases at {n}"
                    )));
                }
            }
            prev = Some(v);
        }
        Ok(())
    }

    /// Smallest `T >= 1` such that `self(t) < t / k` for every `t >= T`.
    ///
    /// Catalog formulas use a closed-form (or majorant-certified) solver;
    /// tables are exhausted over their domain.
    pub fn sublinear_threshold(&self, k: u64) -> Result<u64> {
        assert!(k >= 1);
        let kk = int(k as i128);
        match self {
            FunctionSpec::Constant(c) => {
                let bound = *c * kk;
                Ok((floor_rational(&bound) + 1).max(1) as u64)
            }
            FunctionSpec::Affine { slope, intercept } => {
                let gap = Rational::one() / kk - *slope;
                if gap <= Rational::zero() {
                    return Err(Error::Input(format!(
                        "{self} is never below t/{k}; not sublinear"
                    )));
                }
                Ok((floor_rational(&(*intercept / gap)) + 1).max(1) as u64)
            }
            FunctionSpec::CeilSqrt => Ok(ceil_sqrt_threshold(k)),
            FunctionSpec::NOverLog2Sq(c) => {
                // c t / log2(t)^2 < t / k  <=>  log2(t)^2 > c k  (t >= 2)
                let ck = rational::to_f64(&(*c * kk));
                let guess = if ck <= 0.0 { 2.0 } else { 2f64.powf(ck.sqrt()).floor() + 1.0 };
                if guess > 1e15 {
                    return Err(Error::Input(format!("threshold for {self} at k={k} is astronomically large")));
                }
                let mut t = (guess as u64).max(2);
                let holds = |t: u64| -> Result<bool> {
                    Ok(self.eval(t)?.certainly_lt(Rational::new(t as i128, k as i128)))
                };
                // the float guess can be off by one either way near the boundary
                while t > 2 && holds(t - 1)? {
                    t -= 1;
                }
                while !holds(t)? {
                    t += 1;
                }
                let at_one = self.eval(1)?.certainly_lt(Rational::new(1, k as i128));
                if t == 2 && at_one {
                    t = 1;
                }
                Ok(t)
            }
            FunctionSpec::LogComposite(inner) => {
                if **inner != FunctionSpec::CeilSqrt {
                    return Err(Error::Input(format!(
                        "no threshold solver for {self}; supply a table instead"
                    )));
                }
                // g(t) <= ln(t)^2 for t >= 3, and ln(t)^2 / t decreases for t > e^2.
                let mut horizon = 8u64;
                loop {
                    let l = rational::ln(int(horizon as i128));
                    if (l.hi * l.hi) < Rational::new(horizon as i128, k as i128) {
                        break;
                    }
                    horizon *= 2;
                }
                let mut last_fail = 1u64;
                for t in 2..horizon {
                    let v = self.eval(t)?;
                    if !v.certainly_lt(Rational::new(t as i128, k as i128)) {
                        last_fail = t;
                    }
                }
                Ok(last_fail + 1)
            }
            FunctionSpec::Table(tab) => {
                let mut last_fail: Option<u64> = None;
                let mut max_t = 0;
                for (&t, v) in tab {
                    max_t = t;
                    if !(*v < Rational::new(t as i128, k as i128)) {
                        last_fail = Some(t);
                    }
                }
                match last_fail {
                    Some(t) if t == max_t => Err(Error::Input(format!(
                        "table too short to certify rho(t) < t/{k}: it fails at its last entry t={t}; values beyond t={t} are required"
                    ))),
                    Some(t) => Ok(t + 1),
                    None => Ok(tab.keys().next().copied().unwrap_or(1).max(1)),
                }
            }
        }
    }

    /// Parses `sqrt`, `const:R`, `affine:A,B`, `nlog2sq:C`, `logcomp`,
    /// `table:n=v,n=v,...`.
    pub fn parse(s: &str) -> Result<FunctionSpec> {
        let s = s.trim();
        let bad = || Error::Input(format!("cannot parse function spec `{s}`"));
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        Ok(match (head, arg) {
            ("sqrt", None) => FunctionSpec::CeilSqrt,
            ("logcomp", None) => FunctionSpec::default_g(),
            ("const", Some(a)) => FunctionSpec::Constant(rational::parse_rational(a).ok_or_else(bad)?),
            ("nlog2sq", Some(a)) => {
                FunctionSpec::NOverLog2Sq(rational::parse_rational(a).ok_or_else(bad)?)
            }
            ("affine", Some(a)) => {
                let (p, q) = a.split_once(',').ok_or_else(bad)?;
                FunctionSpec::Affine {
                    slope: rational::parse_rational(p).ok_or_else(bad)?,
                    intercept: rational::parse_rational(q).ok_or_else(bad)?,
                }
            }
            ("table", Some(a)) => {
                let mut t = BTreeMap::new();
                for entry in a.split(',').filter(|e| !e.trim().is_empty()) {
                    let (n, v) = entry.split_once('=').ok_or_else(bad)?;
                    let n: u64 = n.trim().parse().map_err(|_| bad())?;
                    t.insert(n, rational::parse_rational(v).ok_or_else(bad)?);
                }
                if t.is_empty() {
                    return Err(bad());
                }
                FunctionSpec::Table(t)
            }
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::rational::rational_to_string as rs;
        match self {
            FunctionSpec::CeilSqrt => write!(f, "sqrt"),
            FunctionSpec::NOverLog2Sq(c) => write!(f, "nlog2sq:{}", rs(c)),
            FunctionSpec::LogComposite(inner) if **inner == FunctionSpec::CeilSqrt => {
                write!(f, "logcomp")
            }
            FunctionSpec::LogComposite(inner) => write!(f, "logcomp({inner})"),
            FunctionSpec::Affine { slope, intercept } => {
                write!(f, "affine:{},{}", rs(slope), rs(intercept))
            }
            FunctionSpec::Constant(c) => write!(f, "const:{}", rs(c)),
            FunctionSpec::Table(t) => {
                let parts: Vec<String> = t.iter().map(|(n, v)| format!("{n}={}", rs(v))).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

/// Smallest `T` with `k * ceil(sqrt(t)) < t` for all `t >= T`.
///
/// On the bucket `t in ((s-1)^2, s^2]` the condition fails exactly for
/// `t <= k s`, so failures occur for `s` up to the largest root of
/// `(s-1)^2 + 1 <= k s`.
pub fn ceil_sqrt_threshold(k: u64) -> u64 {
    let k = k as u128;
    let b = (2 + k) as f64;
    let mut s = ((b + (b * b - 8.0).max(0.0).sqrt()) / 2.0).floor() as u128;
    let fails = |s: u128| s >= 1 && (s - 1) * (s - 1) < k * s;
    while fails(s + 1) {
        s += 1;
    }
    while s > 1 && !fails(s) {
        s -= 1;
    }
    (s * s).min(k * s) as u64 + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_sqrt_threshold_matches_integer_scan() {
        for k in 1..=80u64 {
            let t0 = ceil_sqrt_threshold(k);
            // brute force: last failing t below a generous horizon
            let horizon = 4 * (k + 2) * (k + 2);
            let last_fail = (1..horizon)
                .filter(|&t| k as u128 * rational::ceil_sqrt(t as u128) >= t as u128)
                .max()
                .unwrap_or(0);
            assert_eq!(t0, last_fail + 1, "k={k}");
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["sqrt", "logcomp", "const:6", "affine:1/2,3", "nlog2sq:32", "table:1=2,5=7/2"] {
            let f = FunctionSpec::parse(s).unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!(FunctionSpec::parse("cube").is_err());
    }

    #[test]
    fn viability() {
        assert!(FunctionSpec::Constant(int(6)).check_viable(1, 100).is_ok());
        assert!(FunctionSpec::Constant(int(5)).check_viable(1, 100).is_err());
        assert!(FunctionSpec::CeilSqrt.check_viable(26, 500).is_ok());
        assert!(FunctionSpec::CeilSqrt.check_viable(20, 500).is_err());
    }

    #[test]
    fn default_g_is_finite_from_three() {
        let g = FunctionSpec::default_g();
        for x in 3..5000 {
            let v = g.eval(x).unwrap();
            assert!(v.lo <= v.hi);
            let expect = ((rational::ceil_sqrt(x as u128) as f64) / (x as f64).ln()).ln() * (x as f64).ln();
            assert!((v.midpoint_f64() - expect).abs() < 1e-6);
        }
    }

    #[test]
    fn thresholds_for_catalog_formulas_are_minimal() {
        let cases = [
            FunctionSpec::Constant(int(3)),
            FunctionSpec::Affine { slope: Rational::new(1, 100), intercept: int(4) },
            FunctionSpec::NOverLog2Sq(int(1)),
            FunctionSpec::default_g(),
        ];
        for f in &cases {
            for k in [1u64, 3, 7, 15] {
                let t0 = f.sublinear_threshold(k).unwrap();
                let ok = |t: u64| f.eval(t).map(|v| v.certainly_lt(Rational::new(t as i128, k as i128))).unwrap_or(false);
                for t in t0..t0 + 2000 {
                    assert!(ok(t), "{f} k={k} t={t}");
                }
                if t0 > 2 {
                    assert!(!ok(t0 - 1), "{f} k={k} not minimal");
                }
            }
        }
    }

    #[test]
    fn short_table_is_rejected_with_range() {
        let f = FunctionSpec::parse("table:1=0,2=0,3=5").unwrap();
        let err = f.sublinear_threshold(1).unwrap_err().to_string();
        assert!(err.contains("t=3"), "{err}");
        let f = FunctionSpec::parse("table:1=1,2=0,3=0").unwrap();
        assert_eq!(f.sublinear_threshold(1).unwrap(), 2);
    }
}
