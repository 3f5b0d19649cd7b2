//! Product rotations on the torus: rational-relation detection, orbit
//! closure classification, itinerary agreement fractions, and the
//! equivalence classification of itinerary pairs.

use crate::circle::{CirclePoint, IntervalSet};
use crate::error::{Error, Result};
use crate::itinerary::{generate, Itinerary};
use crate::scalar::{precision_cap, Scalar};
use std::cmp::Ordering;

fn gcd_i(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Integers (a, b, c), not all zero, gcd 1, with a*alpha1 + b = c*alpha2.
/// Sign convention: c >= 0, and a > 0 when c = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalRelation {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl RationalRelation {
    fn normalized(mut a: i128, mut b: i128, mut c: i128) -> RationalRelation {
        let g = gcd_i(gcd_i(a, b), c);
        if g > 1 {
            a /= g;
            b /= g;
            c /= g;
        }
        let flip = c < 0 || (c == 0 && a < 0) || (c == 0 && a == 0 && b < 0);
        if flip {
            a = -a;
            b = -b;
            c = -c;
        }
        RationalRelation { a, b, c }
    }

    /// Exact verification on the exact backend.
    pub fn holds_for(&self, a1: &Scalar, a2: &Scalar) -> Result<bool> {
        let lhs = a1.mul_int(self.a)?.add(&Scalar::from_int(self.b))?;
        let rhs = a2.mul_int(self.c)?;
        Ok(lhs.compare(&rhs)? == Ordering::Equal)
    }
}

/// Searches for a rational relation a*alpha1 + b = c*alpha2.
///
/// On the exact backend this is a decision procedure: the surd coefficients
/// force the ratio a : c, and integrality of the remaining rational part
/// decides existence. On the certified backend only a bounded search is
/// possible and a negative outcome is reported as Unknown, never as
/// independence.
pub fn find_relation(
    a1: &Scalar,
    a2: &Scalar,
    coeff_bound: i128,
) -> Result<Option<RationalRelation>> {
    if let (Some(s1), Some(s2)) = (a1.as_exact(), a2.as_exact()) {
        return Ok(find_relation_exact(s1, s2));
    }
    find_relation_certified(a1, a2, coeff_bound)
}

fn find_relation_exact(
    s1: &crate::scalar::Surd,
    s2: &crate::scalar::Surd,
) -> Option<RationalRelation> {
    let (p1, q1, r1, d1) = (s1.numer(), s1.surd_coeff(), s1.denom(), s1.radicand());
    let (p2, q2, r2, d2) = (s2.numer(), s2.surd_coeff(), s2.denom(), s2.radicand());
    match (q1 == 0, q2 == 0) {
        (true, true) => {
            // v1*(u1/v1) + (u2 - u1) = u2 = v2*(u2/v2)
            Some(RationalRelation::normalized(r1, p2 - p1, r2))
        }
        (true, false) => {
            // alpha1 = u/v rational: v*alpha1 - u = 0 = 0*alpha2
            Some(RationalRelation::normalized(r1, -p1, 0))
        }
        (false, true) => {
            // 0*alpha1 + u2 = v2*alpha2
            Some(RationalRelation::normalized(0, p2, r2))
        }
        (false, false) => {
            if d1 != d2 {
                // 1, sqrt(d1), sqrt(d2) are linearly independent over Q
                return None;
            }
            // irrational parts force a*q1/r1 = c*q2/r2
            let g = gcd_i(q2 * r1, q1 * r2);
            let a0 = q2 * r1 / g;
            let c0 = q1 * r2 / g;
            let (a0, c0) = if c0 < 0 { (-a0, -c0) } else { (a0, c0) };
            // rational parts: b = s*(c0*p2*r1 - a0*p1*r2)/(r1*r2) must be
            // an integer for the smallest positive scaling s
            let t = c0.checked_mul(p2)?.checked_mul(r1)? - a0.checked_mul(p1)?.checked_mul(r2)?;
            let m = r1.checked_mul(r2)?;
            let g2 = gcd_i(t, m).max(1);
            let s = m / g2;
            let b = t / g2;
            Some(RationalRelation::normalized(
                s.checked_mul(a0)?,
                b,
                s.checked_mul(c0)?,
            ))
        }
    }
}

fn find_relation_certified(
    a1: &Scalar,
    a2: &Scalar,
    coeff_bound: i128,
) -> Result<Option<RationalRelation>> {
    let cap = precision_cap();
    for a in -coeff_bound..=coeff_bound {
        for c in 0..=coeff_bound {
            if a == 0 && c == 0 {
                continue;
            }
            // b is forced to the nearest integer of c*alpha2 - a*alpha1
            let v = a2.mul_int(c)?.sub(&a1.mul_int(a)?)?;
            let mut p = crate::scalar::default_precision();
            loop {
                let ball = v.to_ball(p);
                let half = Scalar::from_ratio(1, 2)?;
                let shifted = v.add(&half)?;
                let b = match shifted.to_ball(p).floor_strict(p) {
                    Some(b) => b,
                    None => {
                        if p >= cap {
                            return Err(Error::Unknown(format!(
                                "residual for (a,c)=({a},{c}) straddles a half-integer at the cap"
                            )));
                        }
                        p = (p * 2).min(cap);
                        continue;
                    }
                };
                let residual = ball.sub(&crate::scalar::Ball::exact_int(b, p), p);
                match residual.cmp_certified(&crate::scalar::Ball::exact_int(0, p), p) {
                    Some(Ordering::Equal) => {
                        // only exactly-known values certify equality
                        return Ok(Some(RationalRelation::normalized(a, -b, c)));
                    }
                    Some(_) => break, // certified nonzero: this pair is out
                    None => {
                        if p >= cap {
                            return Err(Error::Unknown(format!(
                                "residual for (a,b,c)=({a},{},{c}) cannot be separated from zero",
                                -b
                            )));
                        }
                        p = (p * 2).min(cap);
                    }
                }
            }
        }
    }
    Err(Error::Unknown(format!(
        "no certified relation with |a|,|c| <= {coeff_bound}; independence is unprovable from finite precision"
    )))
}

/// Closure of the orbit of (0,0) under the product rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusClass {
    Periodic {
        period: u128,
    },
    Circles {
        count: u64,
        slope_num: i128,
        slope_den: i128,
    },
    Dense,
}

/// Classifies the orbit closure of (0,0) under r_alpha1 x r_alpha2.
pub fn classify(a1: &Scalar, a2: &Scalar) -> Result<TorusClass> {
    let (s1, s2) = match (a1.as_exact(), a2.as_exact()) {
        (Some(s1), Some(s2)) => (s1, s2),
        _ => {
            return Err(Error::Unknown(
                "torus classification needs exact rotation amounts".into(),
            ))
        }
    };
    let f1 = s1.frac()?;
    let f2 = s2.frac()?;
    if f1.is_rational() && f2.is_rational() {
        let period = lcm_u(f1.denom().unsigned_abs(), f2.denom().unsigned_abs());
        return Ok(TorusClass::Periodic { period });
    }
    match find_relation_exact(&f1, &f2) {
        None => Ok(TorusClass::Dense),
        Some(rel) => {
            let g = gcd_i(rel.a, rel.c).max(1);
            let count = if rel.b == 0 { 1 } else { g as u64 };
            Ok(TorusClass::Circles {
                count,
                slope_num: rel.a / g,
                slope_den: rel.c / g,
            })
        }
    }
}

fn lcm_u(a: u128, b: u128) -> u128 {
    let g = {
        let (mut x, mut y) = (a, b);
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        x
    };
    a / g * b
}

/// Predicted asymptotic fraction of agreeing itinerary terms.
///
/// Unrelated pair: l(I1)l(I2) + l(I1^c)l(I2^c). Related pair: the orbit
/// closure is k circles; each circle is walked exactly, cutting its
/// parameterization at every arc-boundary crossing and summing the measure
/// of the parameter set that lands in B = (I1 x I2) u (I1^c x I2^c).
pub fn predicted_agreement(
    a1: &Scalar,
    i1: &IntervalSet,
    a2: &Scalar,
    i2: &IntervalSet,
) -> Result<Scalar> {
    let (s1, s2) = match (a1.as_exact(), a2.as_exact()) {
        (Some(s1), Some(s2)) => (s1.frac()?, s2.frac()?),
        _ => {
            return Err(Error::Unknown(
                "predicted agreement needs exact rotation amounts".into(),
            ))
        }
    };
    if s1.is_rational() || s2.is_rational() {
        return Err(Error::InvalidScalar(
            "predicted agreement requires irrational rotation amounts".into(),
        ));
    }
    match find_relation_exact(&s1, &s2) {
        None => {
            let l1 = i1.total_length()?;
            let l2 = i2.total_length()?;
            let one = Scalar::one();
            let c1 = one.sub(&l1)?;
            let c2 = one.sub(&l2)?;
            l1.mul(&l2)?.add(&c1.mul(&c2)?)
        }
        Some(rel) => {
            let g = gcd_i(rel.a, rel.c).max(1);
            let k = if rel.b == 0 { 1 } else { g };
            let a_red = rel.a / g;
            let c_red = rel.c / g;
            debug_assert!(a_red != 0 && c_red > 0);
            let mut total = Scalar::zero();
            for rho in 0..k {
                let phi = Scalar::from_ratio(rho, rel.c)?;
                total = total.add(&circle_fraction_in_b(a_red, c_red, &phi, i1, i2)?)?;
            }
            total.div_int(k)
        }
    }
}

/// Measure of { t in [0,1) : ({c t}, {a t + phi}) in B } for one circle of
/// the orbit closure, computed exactly by cutting at boundary crossings.
fn circle_fraction_in_b(
    a: i128,
    c: i128,
    phi: &Scalar,
    i1: &IntervalSet,
    i2: &IntervalSet,
) -> Result<Scalar> {
    let mut cuts: Vec<Scalar> = vec![Scalar::zero(), Scalar::one()];
    let push_if_unit = |cuts: &mut Vec<Scalar>, t: Scalar| -> Result<()> {
        if t.sign()? != Ordering::Less && t.compare(&Scalar::one())? == Ordering::Less {
            cuts.push(t);
        }
        Ok(())
    };
    // x-boundary crossings: {c t} = e  =>  t = (e + i)/c
    for arc in i1.arcs() {
        for e in [
            arc.lo.scalar().clone(),
            arc.lo.scalar().add(&arc.len)?.frac()?,
        ] {
            for i in 0..c {
                let t = e.add(&Scalar::from_int(i))?.div_int(c)?;
                push_if_unit(&mut cuts, t)?;
            }
        }
    }
    // y-boundary crossings: {a t + phi} = e  =>  t = (e - phi + j)/a
    for arc in i2.arcs() {
        for e in [
            arc.lo.scalar().clone(),
            arc.lo.scalar().add(&arc.len)?.frac()?,
        ] {
            let base = e.sub(phi)?;
            // j must bring (base + j)/a into [0,1)
            let lo_j = if a > 0 {
                base.neg()
            } else {
                base.neg().add(&Scalar::from_int(a))?
            };
            let start = lo_j.floor()? - 1;
            for dj in 0..(a.abs() + 3) {
                let j = start + dj;
                let t = base.add(&Scalar::from_int(j))?.div_int(a)?;
                push_if_unit(&mut cuts, t)?;
            }
        }
    }
    sort_scalars(&mut cuts)?;
    cuts.dedup_by(|x, y| matches!(x.compare(y), Ok(Ordering::Equal)));

    let mut acc = Scalar::zero();
    for w in cuts.windows(2) {
        let seg = w[1].sub(&w[0])?;
        if seg.sign()? != Ordering::Greater {
            continue;
        }
        let mid = w[0].add(&w[1])?.div_int(2)?;
        let x = CirclePoint::reduce(&mid.mul_int(c)?)?;
        let y = CirclePoint::reduce(&mid.mul_int(a)?.add(phi)?)?;
        let in1 = i1.membership(&x)?.as_bit().unwrap();
        let in2 = i2.membership(&y)?.as_bit().unwrap();
        if in1 == in2 {
            acc = acc.add(&seg)?;
        }
    }
    Ok(acc)
}

fn sort_scalars(v: &mut [Scalar]) -> Result<()> {
    let mut err = None;
    v.sort_by(|a, b| match a.compare(b) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Mean of the agreement indicator between two equal-length itineraries.
pub fn empirical_agreement(it1: &Itinerary, it2: &Itinerary) -> Result<Scalar> {
    if it1.len() != it2.len() {
        return Err(Error::LengthMismatch(it1.len(), it2.len()));
    }
    let agree = it1
        .bits()
        .iter()
        .zip(it2.bits())
        .filter(|(a, b)| a == b)
        .count();
    Scalar::from_ratio(agree as i128, it1.len() as i128)
}

/// Why two parameter pairs generate the same itinerary, or a witness index
/// where they provably differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceVerdict {
    Same,
    Mirror,
    SymmetryEquivalent {
        a: i128,
        c: i128,
    },
    /// None means the horizon was exhausted without finding the index that
    /// uniqueness guarantees to exist
    Distinct {
        witness: Option<usize>,
    },
}

/// Classifies the relationship between two (alpha, I) parameter pairs:
/// identical, mirrored (opposite orientation with negated set), related by
/// a rational relation with matching rotational symmetries, or distinct
/// with a witnessing itinerary index.
pub fn classify_equivalence(
    a1: &Scalar,
    i1: &IntervalSet,
    a2: &Scalar,
    i2: &IntervalSet,
    check_horizon: usize,
) -> Result<EquivalenceVerdict> {
    let (s1, s2) = match (a1.as_exact(), a2.as_exact()) {
        (Some(s1), Some(s2)) => (s1.frac()?, s2.frac()?),
        _ => {
            return Err(Error::Unknown(
                "equivalence needs exact rotation amounts".into(),
            ))
        }
    };
    if s1.is_rational() || s2.is_rational() {
        return Err(Error::InvalidScalar(
            "equivalence classification requires irrational rotation amounts".into(),
        ));
    }
    let f1 = Scalar::Exact(s1);
    let f2 = Scalar::Exact(s2);
    if f1.compare(&f2)? == Ordering::Equal && i1.set_eq(i2)? {
        return Ok(EquivalenceVerdict::Same);
    }
    let mirrored = Scalar::one().sub(&f2)?;
    if f1.compare(&mirrored)? == Ordering::Equal && i1.set_eq(&i2.negate()?)? {
        return Ok(EquivalenceVerdict::Mirror);
    }
    if let Some(rel) = find_relation_exact(&s1, &s2) {
        let a_fold = rel.a.unsigned_abs() as u32;
        let c_fold = rel.c.unsigned_abs() as u32;
        if a_fold >= 1
            && c_fold >= 1
            && i1.has_symmetry(a_fold)?
            && i2.has_symmetry(c_fold)?
            && i1.image_under(rel.a, rel.c)?.set_eq(i2)?
        {
            return Ok(EquivalenceVerdict::SymmetryEquivalent { a: rel.a, c: rel.c });
        }
    }
    // genuinely different parameters: uniqueness guarantees a differing
    // index; search for it up to the horizon
    let g1 = generate(&f1, i1, check_horizon)?;
    let g2 = generate(&f2, i2, check_horizon)?;
    let witness = g1.bits().iter().zip(g2.bits()).position(|(x, y)| x != y);
    Ok(EquivalenceVerdict::Distinct { witness })
}
