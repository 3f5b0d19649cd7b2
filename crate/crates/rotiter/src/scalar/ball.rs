//! Certified arbitrary-precision values: a midpoint float plus a rigorous
//! error radius, with a regeneration recipe so ambiguous comparisons can be
//! retried at higher precision.
//!
//! The radius is tracked in a tiny dedicated format (m * 2^e with m: u64)
//! whose arithmetic always rounds up, so it stays an upper bound across the
//! full exponent range regardless of the midpoint precision.

use crate::error::{Error, Result};
use crate::scalar::surd::Surd;
use astro_float::{BigFloat, Consts, RoundingMode};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::sync::Arc;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

pub fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Upper bound on a nonnegative magnitude, m * 2^e. All operations round up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rad {
    m: u64,
    e: i64,
}

// add/mul keep method form: Rad is magnitude bookkeeping, not a number
// type, and the operator traits would suggest ring semantics it lacks
#[allow(clippy::should_implement_trait)]
impl Rad {
    pub const ZERO: Rad = Rad { m: 0, e: 0 };

    pub fn pow2(e: i64) -> Rad {
        Rad { m: 1, e }
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0
    }

    fn normalize(mut m: u128, mut e: i64) -> Rad {
        while m > u64::MAX as u128 {
            m = (m >> 1) + (m & 1); // ceil
            e += 1;
        }
        Rad { m: m as u64, e }
    }

    pub fn add(self, other: Rad) -> Rad {
        if self.m == 0 {
            return other;
        }
        if other.m == 0 {
            return self;
        }
        let (hi, lo) = if self.e >= other.e {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (hi.e - lo.e).min(127) as u32;
        let lo_m = if shift >= 64 {
            1u128 // anything shifted out entirely still rounds up to one ulp of hi
        } else {
            ((lo.m as u128) + ((1u128 << shift) - 1)) >> shift
        };
        Rad::normalize(hi.m as u128 + lo_m.max(1), hi.e)
    }

    /// Exponent range kept finite; clamping low exponents upward only ever
    /// enlarges the bound, which stays sound.
    const E_LIMIT: i64 = 1 << 40;

    fn clamp_e(e: i64) -> i64 {
        e.clamp(-Rad::E_LIMIT, Rad::E_LIMIT)
    }

    pub fn mul(self, other: Rad) -> Rad {
        if self.m == 0 || other.m == 0 {
            return Rad::ZERO;
        }
        Rad::normalize(
            self.m as u128 * other.m as u128,
            Rad::clamp_e(self.e.saturating_add(other.e)),
        )
    }

    pub fn mul_pow2(self, k: i64) -> Rad {
        if self.m == 0 {
            self
        } else {
            Rad {
                m: self.m,
                e: Rad::clamp_e(self.e.saturating_add(k)),
            }
        }
    }

    pub fn mul_u64(self, k: u64) -> Rad {
        if self.m == 0 || k == 0 {
            return Rad::ZERO;
        }
        Rad::normalize(self.m as u128 * k as u128, self.e)
    }

    pub fn max(self, other: Rad) -> Rad {
        match self.cmp_rad(&other) {
            Ordering::Less => other,
            _ => self,
        }
    }

    fn log2_upper(&self) -> i64 {
        debug_assert!(self.m != 0);
        self.e + 64 - self.m.leading_zeros() as i64
    }

    pub fn cmp_rad(&self, other: &Rad) -> Ordering {
        if self.m == 0 || other.m == 0 {
            return (self.m != 0).cmp(&(other.m != 0));
        }
        let la = self.log2_upper();
        let lb = other.log2_upper();
        if la != lb {
            return la.cmp(&lb);
        }
        // same magnitude class, so |e_a - e_b| < 64 and shifts fit in u128
        let d = self.e - other.e;
        if d >= 0 {
            ((self.m as u128) << d).cmp(&(other.m as u128))
        } else {
            (self.m as u128).cmp(&((other.m as u128) << (-d)))
        }
    }

    /// True when self < 2^k. m * 2^e lies in [2^(l-1), 2^l) for
    /// l = log2_upper, so l <= k suffices and l > k refutes (up to the
    /// boundary case m a power of two, which is still < 2^l).
    pub fn less_than_pow2(&self, k: i64) -> bool {
        if self.m == 0 {
            return true;
        }
        let l = self.log2_upper();
        if l <= k {
            return true;
        }
        // exact power of two equal to 2^(l-1): < 2^k only if l-1 < k
        self.m.is_power_of_two() && l - 1 < k
    }

    pub fn to_f64(&self) -> f64 {
        if self.m == 0 {
            0.0
        } else {
            let v = self.m as f64 * (self.e as f64).exp2();
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        }
    }

    /// Upper bound on a nonnegative f64 (one mantissa ulp is added).
    pub fn from_f64_upper(x: f64) -> Rad {
        if x <= 0.0 {
            return Rad::ZERO;
        }
        assert!(x.is_finite());
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        if exp == 0 {
            Rad {
                m: frac + 1,
                e: -1074,
            }
        } else {
            Rad {
                m: (1u64 << 52) + frac + 1,
                e: exp - 1075,
            }
        }
    }
}

/// True radius bound as a BigFloat, rounded up (used for boundary tests).
fn rad_to_bigfloat(r: &Rad) -> BigFloat {
    if r.m == 0 {
        return BigFloat::from_i64(0, 64);
    }
    let mut f = BigFloat::from_u64(r.m, 64);
    if let Some(e) = f.exponent() {
        let ne = e as i64 + r.e;
        if ne > i32::MAX as i64 {
            return BigFloat::max_value(64);
        }
        if ne < i32::MIN as i64 {
            // rounding a positive value up: keep one ulp at the bottom
            f.set_exponent(i32::MIN + 64);
            return f;
        }
        f.set_exponent(ne as astro_float::Exponent);
    }
    f
}

fn ulp(f: &BigFloat, p: u32) -> Rad {
    match f.exponent() {
        Some(e) => {
            if f.inexact() {
                Rad::pow2(e as i64 - p as i64)
            } else {
                Rad::ZERO
            }
        }
        None => {
            if f.is_zero() && !f.inexact() {
                Rad::ZERO
            } else {
                Rad::pow2(-(2 * p as i64))
            }
        }
    }
}

/// Upper bound on |f| as a Rad.
fn mag_upper(f: &BigFloat) -> Rad {
    match f.exponent() {
        Some(e) => Rad::pow2(e as i64),
        None => Rad::ZERO,
    }
}

/// A certified enclosure: the true value lies within `rad` of `mid`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub mid: BigFloat,
    pub rad: Rad,
}

impl Ball {
    pub fn exact_int(i: i128, p: u32) -> Ball {
        Ball {
            mid: BigFloat::from_i128(i, p.max(128) as usize),
            rad: Rad::ZERO,
        }
    }

    pub fn from_ratio(num: i128, den: i128, p: u32) -> Ball {
        let n = BigFloat::from_i128(num, p.max(128) as usize);
        let d = BigFloat::from_i128(den, p.max(128) as usize);
        let mid = n.div(&d, p as usize, RM);
        let rad = ulp(&mid, p);
        Ball { mid, rad }
    }

    pub fn from_surd(s: &Surd, p: u32) -> Ball {
        if s.is_rational() {
            return Ball::from_ratio(s.numer(), s.denom(), p);
        }
        let pp = p as usize;
        let d = BigFloat::from_i128(s.radicand(), pp.max(128));
        let root = d.sqrt(pp, RM);
        let q = BigFloat::from_i128(s.surd_coeff(), pp.max(128));
        let num = q
            .mul(&root, pp, RM)
            .add(&BigFloat::from_i128(s.numer(), pp.max(128)), pp, RM);
        let den = BigFloat::from_i128(s.denom(), pp.max(128));
        let mid = num.div(&den, pp, RM);
        // sqrt, mul, add, div: four correctly rounded steps; 8 ulp is a
        // comfortable over-estimate of the propagated error
        let rad = ulp(&mid, p)
            .mul_u64(8)
            .max(Rad::pow2(mid.exponent().unwrap_or(0) as i64 - p as i64 + 3));
        Ball { mid, rad }
    }

    pub fn add(&self, other: &Ball, p: u32) -> Ball {
        let mid = self.mid.add(&other.mid, p as usize, RM);
        let rad = self.rad.add(other.rad).add(ulp(&mid, p));
        Ball { mid, rad }
    }

    pub fn sub(&self, other: &Ball, p: u32) -> Ball {
        let mid = self.mid.sub(&other.mid, p as usize, RM);
        let rad = self.rad.add(other.rad).add(ulp(&mid, p));
        Ball { mid, rad }
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad,
        }
    }

    pub fn mul(&self, other: &Ball, p: u32) -> Ball {
        let mid = self.mid.mul(&other.mid, p as usize, RM);
        let cross = mag_upper(&self.mid)
            .mul(other.rad)
            .add(mag_upper(&other.mid).mul(self.rad))
            .add(self.rad.mul(other.rad));
        Ball {
            rad: cross.add(ulp(&mid, p)),
            mid,
        }
    }

    pub fn mul_int(&self, k: i128, p: u32) -> Ball {
        if k == 0 {
            // exactly zero regardless of the operand's inexactness
            return Ball::exact_int(0, p);
        }
        let kf = BigFloat::from_i128(k, p.max(128) as usize);
        let mid = self.mid.mul(&kf, p as usize, RM);
        let rad = self.rad.mul(mag_upper(&kf)).add(ulp(&mid, p));
        Ball { mid, rad }
    }

    pub fn div(&self, other: &Ball, p: u32) -> Result<Ball> {
        // requires the divisor certified away from zero
        let oe = other
            .mid
            .exponent()
            .ok_or_else(|| Error::PrecisionExhausted {
                bits: p,
                context: "division by a value enclosing zero".into(),
            })? as i64;
        if !other.rad.less_than_pow2(oe - 2) {
            return Err(Error::PrecisionExhausted {
                bits: p,
                context: "division by a value enclosing zero".into(),
            });
        }
        let mid = self.mid.div(&other.mid, p as usize, RM);
        // |b| >= 2^(oe-1) - rad >= 2^(oe-2); 1/|b| <= 2^(2-oe)
        let inv_lb = 2 - oe;
        let quot_mag = mag_upper(&mid).add(Rad::pow2(mag_upper(&mid).e));
        let rad = self
            .rad
            .add(quot_mag.mul(other.rad))
            .mul_pow2(inv_lb)
            .add(ulp(&mid, p));
        Ok(Ball { mid, rad })
    }

    /// sin(2*pi*self), with the input radius transported through the unit
    /// Lipschitz bound of sin composed with the 2*pi scaling.
    pub fn sin2pi(&self, p: u32) -> Ball {
        let pp = p as usize;
        let two_pi = with_consts(|cc| cc.pi(pp, RM)).mul(&BigFloat::from_i64(2, 64), pp, RM);
        let t = self.mid.mul(&two_pi, pp, RM);
        let s = with_consts(|cc| t.sin(pp, RM, cc));
        // |sin(2pi(x+r)) - sin(2pi x)| <= 2pi r; pi < 2^2 so 2pi < 2^3
        let rad = self
            .rad
            .mul_pow2(3)
            .add(ulp(&t, p))
            .add(ulp(&s, p).mul_u64(2));
        Ball { mid: s, rad }
    }

    pub fn cos2pi(&self, p: u32) -> Ball {
        let pp = p as usize;
        let two_pi = with_consts(|cc| cc.pi(pp, RM)).mul(&BigFloat::from_i64(2, 64), pp, RM);
        let t = self.mid.mul(&two_pi, pp, RM);
        let s = with_consts(|cc| t.cos(pp, RM, cc));
        let rad = self
            .rad
            .mul_pow2(3)
            .add(ulp(&t, p))
            .add(ulp(&s, p).mul_u64(2));
        Ball { mid: s, rad }
    }

    /// Floor of the enclosed value, provided the whole ball lies strictly
    /// inside one integer cell (or is exactly known). None when the ball
    /// straddles an integer.
    pub fn floor_strict(&self, p: u32) -> Option<i128> {
        if self.rad.is_zero() {
            return bigfloat_to_i128(&self.mid.floor());
        }
        let f = self.mid.floor();
        let frac = self.mid.sub(&f, p as usize, RM);
        // need rad + ulp slop < frac and frac + rad < 1
        let r = rad_to_bigfloat(&self.rad.add(ulp(&frac, p)));
        let one = BigFloat::from_i64(1, 64);
        let upper = frac.add(&r, p as usize, RoundingMode::Up);
        let lower = frac.sub(&r, p as usize, RoundingMode::Down);
        if lower.is_positive() && !lower.is_zero() && upper.cmp(&one) == Some(-1) {
            bigfloat_to_i128(&f)
        } else {
            None
        }
    }

    /// Midpoint ordering with certified separation; None when the balls
    /// cannot be ordered at this precision.
    pub fn cmp_certified(&self, other: &Ball, p: u32) -> Option<Ordering> {
        let diff = self.mid.sub(&other.mid, p as usize, RM);
        let total = self.rad.add(other.rad).add(ulp(&diff, p));
        if diff.is_zero() {
            return if total.is_zero() {
                Some(Ordering::Equal)
            } else {
                None
            };
        }
        let e = diff.exponent()? as i64;
        // |diff| >= 2^(e-1)
        if total.less_than_pow2(e - 1) {
            if diff.is_negative() {
                Some(Ordering::Less)
            } else {
                Some(Ordering::Greater)
            }
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        bigfloat_to_f64(&self.mid)
    }
}

pub fn bigfloat_to_i128(f: &BigFloat) -> Option<i128> {
    // integer-valued BigFloat to i128 via raw parts
    let (words, _n, sign, e, _inexact) = f.as_raw_parts()?;
    if f.is_zero() {
        return Some(0);
    }
    let e = e as i64;
    if e > 126 {
        return None;
    }
    // value = 0.mantissa * 2^e; mantissa top bits are in the last word
    let total_bits = words.len() as i64 * 64;
    let mut acc: i128 = 0;
    for (i, w) in words.iter().enumerate().rev() {
        let bit_top = total_bits - (i as i64) * 64; // exponent of this word's top
        let shift = e - bit_top;
        let contrib: i128 = if shift >= 0 {
            (*w as i128) << shift.min(127)
        } else if shift > -64 {
            ((*w) >> (-shift) as u32) as i128
        } else {
            0
        };
        acc = acc.checked_add(contrib)?;
    }
    Some(if sign == astro_float::Sign::Neg {
        -acc
    } else {
        acc
    })
}

/// Nearest-below dyadic rational num / 2^bits with |f - num/2^bits| <=
/// 2^-bits. None when |f| is too large for the numerator to fit.
pub fn dyadic_approx(f: &BigFloat, bits: u32) -> Option<(i128, i128)> {
    let den = 1i128 << bits;
    if f.is_zero() {
        return Some((0, den));
    }
    let e = f.exponent()? as i64;
    let ne = e + bits as i64;
    if ne > 120 {
        return None;
    }
    if ne < -2 {
        // magnitude far below one ulp of the grid
        return Some((0, den));
    }
    let mut g = f.clone();
    g.set_exponent(ne as astro_float::Exponent);
    let num = bigfloat_to_i128(&g.floor())?;
    Some((num, den))
}

pub fn bigfloat_to_f64(f: &BigFloat) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    match f.as_raw_parts() {
        Some((words, _n, sign, e, _)) => {
            let top = *words.last().unwrap_or(&0);
            let frac = top as f64 / (u64::MAX as f64 + 1.0);
            let v = frac * (e as f64).exp2();
            if sign == astro_float::Sign::Neg {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

/// Regeneration recipe: how to recompute an enclosure at higher precision.
pub trait Refine: Send + Sync {
    fn eval(&self, prec: u32) -> Result<Ball>;
}

struct FixedRecipe(Ball);

impl Refine for FixedRecipe {
    fn eval(&self, _prec: u32) -> Result<Ball> {
        Ok(self.0.clone())
    }
}

struct SurdRecipe(Surd);

impl Refine for SurdRecipe {
    fn eval(&self, prec: u32) -> Result<Ball> {
        Ok(Ball::from_surd(&self.0, prec))
    }
}

struct RatioRecipe(i128, i128);

impl Refine for RatioRecipe {
    fn eval(&self, prec: u32) -> Result<Ball> {
        Ok(Ball::from_ratio(self.0, self.1, prec))
    }
}

enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

struct BinRecipe {
    op: BinOp,
    a: Arc<dyn Refine>,
    b: Arc<dyn Refine>,
}

impl Refine for BinRecipe {
    fn eval(&self, prec: u32) -> Result<Ball> {
        let a = self.a.eval(prec)?;
        let b = self.b.eval(prec)?;
        Ok(match self.op {
            BinOp::Add => a.add(&b, prec),
            BinOp::Sub => a.sub(&b, prec),
            BinOp::Mul => a.mul(&b, prec),
            BinOp::Div => a.div(&b, prec)?,
        })
    }
}

struct NegRecipe(Arc<dyn Refine>);

impl Refine for NegRecipe {
    fn eval(&self, prec: u32) -> Result<Ball> {
        Ok(self.0.eval(prec)?.neg())
    }
}

struct MulIntRecipe(i128, Arc<dyn Refine>);

impl Refine for MulIntRecipe {
    fn eval(&self, prec: u32) -> Result<Ball> {
        Ok(self.1.eval(prec)?.mul_int(self.0, prec))
    }
}

/// Certified real number: the current enclosure plus the recipe used to
/// regenerate it at higher precision.
#[derive(Clone)]
pub struct CertifiedReal {
    pub ball: Ball,
    pub prec: u32,
    recipe: Arc<dyn Refine>,
}

impl std::fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CertifiedReal({} +- 2^{}, {} bits)",
            self.ball.to_f64(),
            if self.ball.rad.is_zero() {
                i64::MIN
            } else {
                self.ball.rad.log2_upper()
            },
            self.prec
        )
    }
}

impl CertifiedReal {
    pub fn from_surd(s: &Surd, prec: u32) -> CertifiedReal {
        CertifiedReal {
            ball: Ball::from_surd(s, prec),
            prec,
            recipe: Arc::new(SurdRecipe(*s)),
        }
    }

    pub fn from_ratio(num: i128, den: i128, prec: u32) -> CertifiedReal {
        CertifiedReal {
            ball: Ball::from_ratio(num, den, prec),
            prec,
            recipe: Arc::new(RatioRecipe(num, den)),
        }
    }

    /// An enclosure with no refinement recipe; its radius is irreducible.
    pub fn opaque(ball: Ball, prec: u32) -> CertifiedReal {
        CertifiedReal {
            recipe: Arc::new(FixedRecipe(ball.clone())),
            ball,
            prec,
        }
    }

    pub fn from_recipe(recipe: Arc<dyn Refine>, prec: u32) -> Result<CertifiedReal> {
        let ball = recipe.eval(prec)?;
        Ok(CertifiedReal { ball, prec, recipe })
    }

    pub fn refine(&self, prec: u32) -> Result<CertifiedReal> {
        if prec <= self.prec {
            return Ok(self.clone());
        }
        let ball = self.recipe.eval(prec)?;
        Ok(CertifiedReal {
            ball,
            prec,
            recipe: self.recipe.clone(),
        })
    }

    fn bin(op: BinOp, a: &CertifiedReal, b: &CertifiedReal) -> Result<CertifiedReal> {
        let prec = a.prec.max(b.prec);
        let recipe = Arc::new(BinRecipe {
            op,
            a: a.recipe.clone(),
            b: b.recipe.clone(),
        });
        let ball = recipe.eval(prec)?;
        Ok(CertifiedReal { ball, prec, recipe })
    }

    pub fn add(&self, other: &CertifiedReal) -> Result<CertifiedReal> {
        Self::bin(BinOp::Add, self, other)
    }

    pub fn sub(&self, other: &CertifiedReal) -> Result<CertifiedReal> {
        Self::bin(BinOp::Sub, self, other)
    }

    pub fn mul(&self, other: &CertifiedReal) -> Result<CertifiedReal> {
        Self::bin(BinOp::Mul, self, other)
    }

    pub fn div(&self, other: &CertifiedReal) -> Result<CertifiedReal> {
        Self::bin(BinOp::Div, self, other)
    }

    pub fn neg(&self) -> CertifiedReal {
        CertifiedReal {
            ball: self.ball.neg(),
            prec: self.prec,
            recipe: Arc::new(NegRecipe(self.recipe.clone())),
        }
    }

    pub fn mul_int(&self, k: i128) -> CertifiedReal {
        CertifiedReal {
            ball: self.ball.mul_int(k, self.prec),
            prec: self.prec,
            recipe: Arc::new(MulIntRecipe(k, self.recipe.clone())),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.ball.to_f64()
    }
}
