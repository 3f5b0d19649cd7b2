//! Scalar values: exact quadratic surds or certified arbitrary-precision
//! reals. Every angle, endpoint, and length in the crate is a `Scalar`.
//!
//! Text syntax accepted everywhere (files and CLI flags):
//! `p/q` | decimal literal | `(p+q*sqrt(d))/r` with integer p, q, r, d.
//! Decimal literals are exact rationals, not floats.

pub mod ball;
pub mod surd;

pub use ball::{Ball, CertifiedReal, Rad, Refine};
pub use surd::Surd;

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::OnceLock;

/// Baseline working precision for certified values, in bits.
pub const DEFAULT_PRECISION: u32 = 256;

static PRECISION_START: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION);

/// Working precision certified computations start from (default 256 bits).
pub fn default_precision() -> u32 {
    PRECISION_START.load(AtomicOrdering::Relaxed)
}

pub fn set_default_precision(bits: u32) {
    PRECISION_START.store(bits.clamp(64, precision_cap()), AtomicOrdering::Relaxed);
}

static PRECISION_CAP: OnceLock<AtomicU32> = OnceLock::new();

fn cap_cell() -> &'static AtomicU32 {
    PRECISION_CAP.get_or_init(|| {
        let v = std::env::var("ROTITER_PRECISION_CAP")
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .unwrap_or(4096);
        AtomicU32::new(v.max(64))
    })
}

/// Hard ceiling for precision refinement, default 4096 bits. The
/// `ROTITER_PRECISION_CAP` environment variable overrides the default.
pub fn precision_cap() -> u32 {
    cap_cell().load(AtomicOrdering::Relaxed)
}

pub fn set_precision_cap(bits: u32) {
    cap_cell().store(bits.max(64), AtomicOrdering::Relaxed);
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Surd),
    Certified(CertifiedReal),
}

impl Scalar {
    pub fn from_int(n: i128) -> Scalar {
        Scalar::Exact(Surd::from_int(n))
    }

    pub fn from_ratio(num: i128, den: i128) -> Result<Scalar> {
        Ok(Scalar::Exact(Surd::from_ratio(num, den)?))
    }

    pub fn zero() -> Scalar {
        Scalar::from_int(0)
    }

    pub fn one() -> Scalar {
        Scalar::from_int(1)
    }

    pub fn surd(p: i128, q: i128, r: i128, d: i128) -> Result<Scalar> {
        Ok(Scalar::Exact(Surd::new(p, q, r, d)?))
    }

    pub fn sqrt_of(d: i128) -> Result<Scalar> {
        Self::surd(0, 1, 1, d)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Surd> {
        match self {
            Scalar::Exact(s) => Some(s),
            Scalar::Certified(_) => None,
        }
    }

    /// Exactly rational? Only answerable on the exact backend.
    pub fn is_rational(&self) -> Option<bool> {
        self.as_exact().map(|s| s.is_rational())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(s) => s.is_zero(),
            Scalar::Certified(c) => c.ball.rad.is_zero() && c.ball.mid.is_zero(),
        }
    }

    fn promote(&self, prec: u32) -> CertifiedReal {
        match self {
            Scalar::Exact(s) => CertifiedReal::from_surd(s, prec),
            Scalar::Certified(c) => c.clone(),
        }
    }

    fn binop(
        &self,
        other: &Scalar,
        exact: impl Fn(&Surd, &Surd) -> Result<Surd>,
        cert: impl Fn(&CertifiedReal, &CertifiedReal) -> Result<CertifiedReal>,
    ) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(exact(a, b)?)),
            _ => {
                let p = self.prec().max(other.prec()).max(default_precision());
                Ok(Scalar::Certified(cert(
                    &self.promote(p),
                    &other.promote(p),
                )?))
            }
        }
    }

    fn prec(&self) -> u32 {
        match self {
            Scalar::Exact(_) => 0,
            Scalar::Certified(c) => c.prec,
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.binop(other, Surd::add, CertifiedReal::add)
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.binop(other, Surd::sub, CertifiedReal::sub)
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.binop(other, Surd::mul, CertifiedReal::mul)
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        self.binop(other, Surd::div, CertifiedReal::div)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(s) => Scalar::Exact(s.neg()),
            Scalar::Certified(c) => Scalar::Certified(c.neg()),
        }
    }

    pub fn mul_int(&self, k: i128) -> Result<Scalar> {
        match self {
            Scalar::Exact(s) => Ok(Scalar::Exact(s.mul_int(k)?)),
            Scalar::Certified(c) => Ok(Scalar::Certified(c.mul_int(k))),
        }
    }

    pub fn div_int(&self, k: i128) -> Result<Scalar> {
        match self {
            Scalar::Exact(s) => Ok(Scalar::Exact(s.div_int(k)?)),
            Scalar::Certified(c) => {
                let kk = CertifiedReal::from_ratio(k, 1, c.prec);
                Ok(Scalar::Certified(c.div(&kk)?))
            }
        }
    }

    /// Certified comparison: exact values compare exactly (including across
    /// distinct radicals, resolved through enclosures); certified values
    /// refine until separated or the precision cap is reached.
    pub fn compare(&self, other: &Scalar) -> Result<Ordering> {
        if let (Scalar::Exact(a), Scalar::Exact(b)) = (self, other) {
            match a.cmp_same_radical(b) {
                Ok(ord) => return Ok(ord),
                Err(Error::MixedRadicals(..)) => {
                    // distinct irrational radicals are never equal; an
                    // enclosure ladder always separates them
                }
                Err(e) => return Err(e),
            }
        }
        let mut p = self.prec().max(other.prec()).max(default_precision());
        let cap = precision_cap();
        let mut a = self.promote(p);
        let mut b = other.promote(p);
        loop {
            if let Some(ord) = a.ball.cmp_certified(&b.ball, p) {
                return Ok(ord);
            }
            if p >= cap {
                return Err(Error::PrecisionExhausted {
                    bits: cap,
                    context: "comparison stayed ambiguous".into(),
                });
            }
            p = (p * 2).min(cap);
            a = a.refine(p)?;
            b = b.refine(p)?;
        }
    }

    /// compare against exact zero
    pub fn sign(&self) -> Result<Ordering> {
        self.compare(&Scalar::zero())
    }

    pub fn floor(&self) -> Result<i128> {
        match self {
            Scalar::Exact(s) => s.floor(),
            Scalar::Certified(c) => {
                let cap = precision_cap();
                let mut cur = c.clone();
                loop {
                    if let Some(f) = cur.ball.floor_strict(cur.prec) {
                        return Ok(f);
                    }
                    if cur.prec >= cap {
                        return Err(Error::PrecisionExhausted {
                            bits: cap,
                            context: "value straddles an integer".into(),
                        });
                    }
                    cur = cur.refine((cur.prec * 2).min(cap))?;
                }
            }
        }
    }

    /// Fractional part {y} = y - floor(y), in [0, 1). Exact for surds;
    /// errors with PrecisionExhausted when a certified value straddles an
    /// integer beyond the refinement budget.
    pub fn frac(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(s) => Ok(Scalar::Exact(s.frac()?)),
            Scalar::Certified(_) => {
                let f = self.floor()?;
                self.sub(&Scalar::from_int(f))
            }
        }
    }

    /// [y] = min({y}, {-y}), in [0, 1/2].
    pub fn sym_frac(&self) -> Result<Scalar> {
        let a = self.frac()?;
        let b = self.neg().frac()?;
        Ok(match a.compare(&b)? {
            Ordering::Greater => b,
            _ => a,
        })
    }

    /// Midpoint approximation for diagnostics only; never drives decisions.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(s) => s.to_f64(),
            Scalar::Certified(c) => c.to_f64(),
        }
    }

    /// Enclosure at the given precision.
    pub fn to_ball(&self, prec: u32) -> Ball {
        self.promote(prec).ball.clone()
    }

    /// Half-width of knowledge about this value: zero for exact scalars,
    /// the radius for certified ones.
    pub fn radius(&self) -> Rad {
        match self {
            Scalar::Exact(_) => Rad::ZERO,
            Scalar::Certified(c) => c.ball.rad,
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        matches!(self.compare(other), Ok(Ordering::Equal))
    }
}

/// Continued-fraction convergents p/q of an exact scalar, in order of
/// increasing q, stopping once q exceeds `max_q`. The expansion uses exact
/// floor steps, so every returned pair is a true convergent.
pub fn convergents(alpha: &Surd, max_q: i128) -> Result<Vec<(i128, i128)>> {
    let mut out = Vec::new();
    let mut x = *alpha;
    let (mut p0, mut q0) = (1i128, 0i128);
    let (mut p1, mut q1) = (alpha.floor()?, 1i128);
    out.push((p1, q1));
    for _ in 0..200 {
        let f = x.sub(&Surd::from_int(x.floor()?))?;
        if f.is_zero() {
            break;
        }
        x = Surd::from_int(1).div(&f)?;
        let a = x.floor()?;
        let p2 = match a.checked_mul(p1).and_then(|t| t.checked_add(p0)) {
            Some(v) => v,
            None => break,
        };
        let q2 = match a.checked_mul(q1).and_then(|t| t.checked_add(q0)) {
            Some(v) => v,
            None => break,
        };
        if q2 > max_q {
            break;
        }
        out.push((p2, q2));
        (p0, q0) = (p1, q1);
        (p1, q1) = (p2, q2);
    }
    Ok(out)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(s) => write!(f, "{s}"),
            Scalar::Certified(c) => write!(
                f,
                "{}",
                self.format_decimal((c.prec as usize / 4).clamp(20, 60))
            ),
        }
    }
}

impl Scalar {
    pub fn format_decimal(&self, digits: usize) -> String {
        match self {
            Scalar::Exact(s) if s.is_rational() => {
                // exact decimal expansion, truncated
                format_ratio_decimal(s.numer(), s.denom(), digits)
            }
            _ => {
                let b = self.to_ball(default_precision());
                format!("{:.*}", digits, ball::bigfloat_to_f64(&b.mid))
            }
        }
    }
}

fn format_ratio_decimal(num: i128, den: i128, digits: usize) -> String {
    let neg = (num < 0) != (den < 0);
    let (n, d) = (num.unsigned_abs(), den.unsigned_abs());
    let int = n / d;
    let mut rem = n % d;
    let mut s = String::new();
    if neg && (int != 0 || rem != 0) {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if rem != 0 {
        s.push('.');
        for _ in 0..digits {
            rem *= 10;
            s.push(char::from(b'0' + (rem / d) as u8));
            rem %= d;
            if rem == 0 {
                break;
            }
        }
    }
    s
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scalar> {
        parse_scalar(s)
    }
}

/// Parses "p/q" | decimal | "(p+q*sqrt(d))/r". Whitespace is tolerated.
pub fn parse_scalar(input: &str) -> Result<Scalar> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    if let Some(rest) = s.strip_prefix('(') {
        return parse_surd_form(rest);
    }
    if let Some((n, d)) = s.split_once('/') {
        let num = parse_i128(n)?;
        let den = parse_i128(d)?;
        return Scalar::from_ratio(num, den);
    }
    parse_decimal(&s)
}

fn parse_i128(s: &str) -> Result<i128> {
    s.parse::<i128>()
        .map_err(|_| Error::Parse(format!("bad integer `{s}`")))
}

fn parse_decimal(s: &str) -> Result<Scalar> {
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || frac_part.contains(['+', '-']) {
            return Err(Error::Parse(format!("bad decimal `{s}`")));
        }
        let neg = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let int_val: i128 = if int_digits.is_empty() {
            0
        } else {
            parse_i128(int_digits)?
        };
        let scale = 10i128
            .checked_pow(frac_part.len() as u32)
            .ok_or(Error::Parse(format!("decimal `{s}` has too many digits")))?;
        let frac_val = parse_i128(frac_part)?;
        let num = int_val
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or(Error::Overflow("decimal"))?;
        let num = if neg { -num } else { num };
        Scalar::from_ratio(num, scale)
    } else {
        Ok(Scalar::from_int(parse_i128(s)?))
    }
}

/// Body after '(' of "(p+q*sqrt(d))/r"; also accepts "(p-q*sqrt(d))/r" and
/// an omitted "/r" meaning r = 1.
fn parse_surd_form(rest: &str) -> Result<Scalar> {
    let close = rest
        .find(')')
        .ok_or(Error::Parse("unclosed parenthesis".into()))?;
    // the radicand has its own parentheses: find the *matching* close
    let mut depth = 1usize;
    let mut close_idx = None;
    for (i, c) in rest.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    close_idx = Some(i);
                    break;
                }
            }
            _ => {}
        }
    }
    let close = close_idx.unwrap_or(close);
    let body = &rest[..close];
    let tail = &rest[close + 1..];
    let r = if tail.is_empty() {
        1
    } else if let Some(t) = tail.strip_prefix('/') {
        parse_i128(t)?
    } else {
        return Err(Error::Parse(format!("unexpected trailing `{tail}`")));
    };

    // body: p + q*sqrt(d)  or  p - q*sqrt(d)
    let star = body
        .find("*sqrt(")
        .ok_or(Error::Parse("expected `q*sqrt(d)`".into()))?;
    let dpart = &body[star + 6..];
    let dclose = dpart
        .find(')')
        .ok_or(Error::Parse("unclosed sqrt".into()))?;
    let d = parse_i128(&dpart[..dclose])?;
    if !dpart[dclose + 1..].is_empty() {
        return Err(Error::Parse("unexpected text after sqrt(d)".into()));
    }
    let head = &body[..star];
    // split head into p and signed q: scan for the last '+' or '-' that is
    // not the leading sign of p
    let bytes = head.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if bytes[i] == b'+' || bytes[i] == b'-' {
            split = Some(i);
            break;
        }
    }
    let split = split.ok_or(Error::Parse("expected `p+q*sqrt(d)`".into()))?;
    let p = parse_i128(&head[..split])?;
    let sign = if bytes[split] == b'-' { -1 } else { 1 };
    let q = sign * parse_i128(&head[split + 1..])?;
    Scalar::surd(p, q, r, d)
}
