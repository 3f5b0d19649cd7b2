//! Exact arithmetic on quadratic surds (p + q*sqrt(d))/r over i128.
//!
//! Values are kept canonical: r > 0, gcd(|p|,|q|,r) = 1, d squarefree, and
//! rational values always stored with q = 0, d = 0. All operations are
//! checked; overflowing the i128 range is reported, never wrapped. Sign
//! determination squares at most once and falls back to big integers when
//! the squares would overflow, so comparisons never fail.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use std::cmp::Ordering;
use std::fmt;

/// Largest accepted radicand. Trial division up to 2^16 fully extracts
/// square factors for d below this bound.
const MAX_RADICAND: i128 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    p: i128,
    q: i128,
    r: i128,
    d: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn ck_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow("add"))
}

fn ck_sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow("sub"))
}

fn ck_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow("mul"))
}

/// Splits d into (s, d') with d = s^2 * d' and d' squarefree.
/// Requires 0 <= d <= MAX_RADICAND.
fn squarefree_split(mut d: i128) -> (i128, i128) {
    let mut s = 1i128;
    let mut f = 2i128;
    while f * f <= d {
        while d % (f * f) == 0 {
            d /= f * f;
            s *= f;
        }
        f += if f == 2 { 1 } else { 2 };
    }
    (s, d)
}

impl Surd {
    /// Builds a canonical surd from raw integers, extracting square factors
    /// of the radicand and reducing the common gcd.
    pub fn new(p: i128, q: i128, r: i128, d: i128) -> Result<Surd> {
        if r == 0 {
            return Err(Error::DivisionByZero);
        }
        if d < 0 {
            return Err(Error::InvalidScalar("negative radicand".into()));
        }
        if d > MAX_RADICAND {
            return Err(Error::InvalidScalar(format!(
                "radicand {d} too large (max {MAX_RADICAND})"
            )));
        }
        if q == 0 || d == 0 {
            return Self::canonical(p, 0, r, 0);
        }
        let (s, d) = squarefree_split(d);
        let q = ck_mul(q, s)?;
        if d == 1 {
            return Self::canonical(ck_add(p, q)?, 0, r, 0);
        }
        Self::canonical(p, q, r, d)
    }

    /// Fast path: d is already 0 or squarefree >= 2.
    fn canonical(mut p: i128, mut q: i128, mut r: i128, d: i128) -> Result<Surd> {
        if r < 0 {
            p = p.checked_neg().ok_or(Error::Overflow("neg"))?;
            q = q.checked_neg().ok_or(Error::Overflow("neg"))?;
            r = r.checked_neg().ok_or(Error::Overflow("neg"))?;
        }
        let g = gcd(gcd(p, q), r);
        if g > 1 {
            p /= g;
            q /= g;
            r /= g;
        }
        let d = if q == 0 { 0 } else { d };
        Ok(Surd { p, q, r, d })
    }

    pub fn from_int(n: i128) -> Surd {
        Surd {
            p: n,
            q: 0,
            r: 1,
            d: 0,
        }
    }

    pub fn from_ratio(num: i128, den: i128) -> Result<Surd> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Self::canonical(num, 0, den, 0)
    }

    pub fn zero() -> Surd {
        Surd::from_int(0)
    }

    pub fn one() -> Surd {
        Surd::from_int(1)
    }

    pub fn numer(&self) -> i128 {
        self.p
    }

    pub fn surd_coeff(&self) -> i128 {
        self.q
    }

    pub fn denom(&self) -> i128 {
        self.r
    }

    pub fn radicand(&self) -> i128 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.q == 0
    }

    pub fn is_integer(&self) -> bool {
        self.q == 0 && self.r == 1
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0 && self.q == 0
    }

    /// The radical both operands can live under, or an error when two
    /// distinct irrational radicals meet.
    fn common_radical(&self, other: &Surd) -> Result<i128> {
        if self.q == 0 {
            Ok(other.d)
        } else if other.q == 0 || self.d == other.d {
            Ok(self.d)
        } else {
            Err(Error::MixedRadicals(self.d, other.d))
        }
    }

    pub fn add(&self, other: &Surd) -> Result<Surd> {
        let d = self.common_radical(other)?;
        // lcm denominators: equal r is the common case on hot paths
        let g = gcd(self.r, other.r);
        let f1 = other.r / g;
        let f2 = self.r / g;
        let p = ck_add(ck_mul(self.p, f1)?, ck_mul(other.p, f2)?)?;
        let q = ck_add(ck_mul(self.q, f1)?, ck_mul(other.q, f2)?)?;
        let r = ck_mul(self.r, f1)?;
        Self::canonical(p, q, r, d)
    }

    pub fn sub(&self, other: &Surd) -> Result<Surd> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Surd {
        Surd {
            p: -self.p,
            q: -self.q,
            r: self.r,
            d: self.d,
        }
    }

    pub fn mul(&self, other: &Surd) -> Result<Surd> {
        let d = self.common_radical(other)?;
        let p = ck_add(
            ck_mul(self.p, other.p)?,
            ck_mul(ck_mul(self.q, other.q)?, d)?,
        )?;
        let q = ck_add(ck_mul(self.p, other.q)?, ck_mul(self.q, other.p)?)?;
        let r = ck_mul(self.r, other.r)?;
        Self::canonical(p, q, r, d)
    }

    pub fn div(&self, other: &Surd) -> Result<Surd> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.common_radical(other)?;
        // 1/((p+q sqrt d)/r) = r(p - q sqrt d)/(p^2 - q^2 d)
        let den = ck_sub(
            ck_mul(other.p, other.p)?,
            ck_mul(ck_mul(other.q, other.q)?, d)?,
        )?;
        let rp = ck_mul(other.r, other.p)?;
        let rq = -ck_mul(other.r, other.q)?;
        let inv = Self::canonical(rp, rq, den, d)?;
        self.mul(&inv)
    }

    pub fn mul_int(&self, n: i128) -> Result<Surd> {
        Self::canonical(ck_mul(self.p, n)?, ck_mul(self.q, n)?, self.r, self.d)
    }

    pub fn div_int(&self, n: i128) -> Result<Surd> {
        if n == 0 {
            return Err(Error::DivisionByZero);
        }
        Self::canonical(self.p, self.q, ck_mul(self.r, n)?, self.d)
    }

    /// Sign of p + q*sqrt(d) with exact integer reasoning; squaring falls
    /// back to big integers when i128 would overflow.
    pub(crate) fn sign_of_pair(p: i128, q: i128, d: i128) -> Ordering {
        if q == 0 {
            return p.cmp(&0);
        }
        if p == 0 {
            return q.cmp(&0);
        }
        match (p > 0, q > 0) {
            (true, true) => Ordering::Greater,
            (false, false) => Ordering::Less,
            (true, false) | (false, true) => {
                // sign decided by p^2 vs q^2 d
                let cmp2 = match (
                    p.checked_mul(p),
                    q.checked_mul(q).and_then(|s| s.checked_mul(d)),
                ) {
                    (Some(p2), Some(q2d)) => p2.cmp(&q2d),
                    _ => {
                        let p2 = BigInt::from(p) * BigInt::from(p);
                        let q2d = BigInt::from(q) * BigInt::from(q) * BigInt::from(d);
                        p2.cmp(&q2d)
                    }
                };
                // |p| dominates -> sign(p); |q|sqrt(d) dominates -> sign(q)
                match cmp2 {
                    Ordering::Greater => p.cmp(&0),
                    Ordering::Less => q.cmp(&0),
                    // equal squares would force sqrt(d) rational; d is
                    // squarefree >= 2 so this cannot happen
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn sign(&self) -> Ordering {
        Self::sign_of_pair(self.p, self.q, self.d)
    }

    /// Exact comparison. Cross products use big integers when i128 would
    /// overflow. Distinct irrational radicals are not comparable here; the
    /// caller (Scalar) resolves those through certified enclosures.
    pub fn cmp_same_radical(&self, other: &Surd) -> Result<Ordering> {
        let d = self.common_radical(other)?;
        match (
            self.p.checked_mul(other.r).zip(other.p.checked_mul(self.r)),
            self.q.checked_mul(other.r).zip(other.q.checked_mul(self.r)),
        ) {
            (Some((pa, pb)), Some((qa, qb))) => match (pa.checked_sub(pb), qa.checked_sub(qb)) {
                (Some(dp), Some(dq)) => Ok(Self::sign_of_pair(dp, dq, d)),
                _ => Ok(Self::big_cmp(self, other, d)),
            },
            _ => Ok(Self::big_cmp(self, other, d)),
        }
    }

    fn big_cmp(a: &Surd, b: &Surd, d: i128) -> Ordering {
        let dp = BigInt::from(a.p) * BigInt::from(b.r) - BigInt::from(b.p) * BigInt::from(a.r);
        let dq = BigInt::from(a.q) * BigInt::from(b.r) - BigInt::from(b.q) * BigInt::from(a.r);
        let zero = BigInt::from(0);
        if dq == zero {
            return dp.cmp(&zero);
        }
        if dp == zero {
            return dq.cmp(&zero);
        }
        match (dp > zero, dq > zero) {
            (true, true) => Ordering::Greater,
            (false, false) => Ordering::Less,
            _ => {
                let p2 = &dp * &dp;
                let q2d = &dq * &dq * BigInt::from(d);
                match p2.cmp(&q2d) {
                    Ordering::Greater => dp.cmp(&zero),
                    Ordering::Less => dq.cmp(&zero),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Exact floor of (p + q*sqrt(d))/r.
    pub fn floor(&self) -> Result<i128> {
        let fq = if self.q == 0 {
            0
        } else {
            // floor(q sqrt d)
            let t = match self
                .q
                .checked_mul(self.q)
                .and_then(|s| s.checked_mul(self.d))
            {
                Some(t) => u128_isqrt(t as u128) as i128,
                None => {
                    let big = BigInt::from(self.q) * BigInt::from(self.q) * BigInt::from(self.d);
                    let s = big.sqrt();
                    i128::try_from(&s).map_err(|_| Error::Overflow("isqrt"))?
                }
            };
            if self.q > 0 {
                t
            } else {
                // q sqrt d is irrational (d squarefree >= 2, q != 0), so
                // floor of the negative is -(t+1)
                -t - 1
            }
        };
        Ok(ck_add(self.p, fq)?.div_euclid(self.r))
    }

    /// Fractional part, exact: self - floor(self), in [0, 1).
    pub fn frac(&self) -> Result<Surd> {
        let f = self.floor()?;
        Self::canonical(ck_sub(self.p, ck_mul(f, self.r)?)?, self.q, self.r, self.d)
    }

    /// Approximate f64 value, for display and heuristics only.
    pub fn to_f64(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.d as f64).sqrt()) / self.r as f64
    }
}

fn u128_isqrt(v: u128) -> u128 {
    v.isqrt()
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 0 {
            if self.r == 1 {
                write!(f, "{}", self.p)
            } else {
                write!(f, "{}/{}", self.p, self.r)
            }
        } else {
            write!(
                f,
                "({}{}{}*sqrt({}))/{}",
                self.p,
                if self.q < 0 { "-" } else { "+" },
                self.q.abs(),
                self.d,
                self.r
            )
        }
    }
}
