//! Points and closed arc unions on the circle R/Z.
//!
//! An `IntervalSet` is the normalized form of a finite union of closed arcs:
//! sorted, pairwise disjoint, nonempty interiors, neither empty nor the full
//! circle. Arcs are stored as (lo, len) so a single arc may wrap through 0.

use crate::error::{Error, Result};
use crate::scalar::{precision_cap, Scalar};
use std::cmp::Ordering;
use std::fmt;

/// A point on R/Z. Exact values are reduced into [0,1); certified values
/// keep their radius and are interpreted modulo 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CirclePoint(Scalar);

impl CirclePoint {
    pub fn reduce(s: &Scalar) -> Result<CirclePoint> {
        match s {
            Scalar::Exact(_) => Ok(CirclePoint(s.frac()?)),
            Scalar::Certified(_) => {
                // circle semantics: shift the midpoint into [0,1) without
                // demanding the strict floor that a straddling ball lacks
                let b = s.to_ball(crate::scalar::default_precision());
                let f = crate::scalar::ball::bigfloat_to_i128(&b.mid.floor()).unwrap_or(0);
                let mut v = s.sub(&Scalar::from_int(f))?;
                // rounding can leave the midpoint marginally outside [0,1)
                for _ in 0..2 {
                    let m = v.to_f64();
                    if m >= 1.0 {
                        v = v.sub(&Scalar::one())?;
                    } else if m < 0.0 {
                        v = v.add(&Scalar::one())?;
                    }
                }
                Ok(CirclePoint(v))
            }
        }
    }

    pub fn zero() -> CirclePoint {
        CirclePoint(Scalar::zero())
    }

    pub fn scalar(&self) -> &Scalar {
        &self.0
    }

    pub fn into_scalar(self) -> Scalar {
        self.0
    }

    /// Exact total order on exact points (position in [0,1)).
    pub fn cmp_exact(&self, other: &CirclePoint) -> Result<Ordering> {
        self.0.compare(&other.0)
    }

    /// Forward (counterclockwise) distance from self to other, in [0,1).
    pub fn forward_to(&self, other: &CirclePoint) -> Result<Scalar> {
        let d = other.0.sub(&self.0)?;
        match &d {
            Scalar::Exact(_) => d.frac(),
            Scalar::Certified(_) => Ok(CirclePoint::reduce(&d)?.into_scalar()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    OnBoundary,
    Ambiguous,
}

impl Membership {
    /// Itinerary convention: the set is closed, boundary counts as inside.
    pub fn as_bit(self) -> Option<bool> {
        match self {
            Membership::In | Membership::OnBoundary => Some(true),
            Membership::Out => Some(false),
            Membership::Ambiguous => None,
        }
    }
}

/// A closed arc [lo, lo+len] on the circle, 0 < len < 1 inside an
/// `IntervalSet`; brackets reuse the type with len = 0 permitted.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleArc {
    pub lo: CirclePoint,
    pub len: Scalar,
}

impl CircleArc {
    pub fn new(lo: CirclePoint, len: Scalar) -> CircleArc {
        CircleArc { lo, len }
    }

    pub fn from_endpoints(lo: &Scalar, hi: &Scalar) -> Result<CircleArc> {
        let lo_pt = CirclePoint::reduce(lo)?;
        let hi_pt = CirclePoint::reduce(hi)?;
        let len = lo_pt.forward_to(&hi_pt)?;
        if len.is_zero() {
            return Err(Error::DegenerateArc);
        }
        Ok(CircleArc { lo: lo_pt, len })
    }

    /// Upper endpoint as a circle point.
    pub fn hi(&self) -> Result<CirclePoint> {
        CirclePoint::reduce(&self.lo.scalar().add(&self.len)?)
    }

    /// Membership of a point in the closed arc.
    pub fn membership(&self, z: &CirclePoint) -> Result<Membership> {
        if z.scalar().is_exact() && self.lo.scalar().is_exact() && self.len.is_exact() {
            let w = self.lo.forward_to(z)?;
            if w.is_zero() {
                return Ok(Membership::OnBoundary);
            }
            return Ok(match w.compare(&self.len)? {
                Ordering::Less => Membership::In,
                Ordering::Equal => Membership::OnBoundary,
                Ordering::Greater => Membership::Out,
            });
        }
        // certified ladder: position t of z relative to lo, tested against
        // the open arc (0, len) and the open gap (len, 1); the position
        // refines through its recipe as precision doubles
        let mut p = crate::scalar::default_precision();
        let cap = precision_cap();
        let t0 = self.lo.forward_to(z)?;
        loop {
            let t = match &t0 {
                Scalar::Certified(c) => Scalar::Certified(c.refine(p)?),
                exact => exact.clone(),
            };
            let zero = Scalar::zero().to_ball(p);
            let one = Scalar::one().to_ball(p);
            let tb = t.to_ball(p);
            let lb = self.len.to_ball(p);
            let gt0 = tb.cmp_certified(&zero, p);
            let lt_len = tb.cmp_certified(&lb, p);
            let lt1 = tb.cmp_certified(&one, p);
            match (gt0, lt_len) {
                (Some(Ordering::Greater), Some(Ordering::Less)) => return Ok(Membership::In),
                (Some(Ordering::Equal), _) | (_, Some(Ordering::Equal)) => {
                    return Ok(Membership::OnBoundary)
                }
                _ => {}
            }
            if lt_len == Some(Ordering::Greater) && lt1 == Some(Ordering::Less) {
                return Ok(Membership::Out);
            }
            if p >= cap {
                return Ok(Membership::Ambiguous);
            }
            p = (p * 2).min(cap);
        }
    }

    fn shift(&self, t: &Scalar) -> Result<CircleArc> {
        Ok(CircleArc {
            lo: CirclePoint::reduce(&self.lo.scalar().add(t)?)?,
            len: self.len.clone(),
        })
    }

    fn negated(&self) -> Result<CircleArc> {
        // -[lo, lo+len] = [-(lo+len), -lo]
        let new_lo = CirclePoint::reduce(&self.lo.scalar().add(&self.len)?.neg())?;
        Ok(CircleArc {
            lo: new_lo,
            len: self.len.clone(),
        })
    }
}

impl fmt::Display for CircleArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hi = self.lo.scalar().add(&self.len).map_err(|_| fmt::Error)?;
        let hi = hi.frac().map_err(|_| fmt::Error)?;
        if hi.is_zero() {
            write!(f, "{} 1", self.lo)
        } else {
            write!(f, "{} {}", self.lo, hi)
        }
    }
}

/// Normalized finite union of closed arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet {
    arcs: Vec<CircleArc>,
}

impl IntervalSet {
    /// Normalizes raw arcs: sorts, merges overlapping or touching arcs,
    /// handles the wrap through 0, and rejects empty or full-circle input.
    pub fn normalize(raw: Vec<CircleArc>) -> Result<IntervalSet> {
        if raw.is_empty() {
            return Err(Error::EmptySet);
        }
        for a in &raw {
            if a.len.sign()? != Ordering::Greater {
                return Err(Error::DegenerateArc);
            }
            if a.len.compare(&Scalar::one())? != Ordering::Less {
                return Err(Error::FullCircle);
            }
        }
        let mut arcs = raw;
        sort_arcs(&mut arcs)?;

        // single merged pass in lifted coordinates starting at the first lo
        let base = arcs[0].lo.clone();
        let mut merged: Vec<(Scalar, Scalar)> = Vec::new(); // (start offset, end offset)
        for a in &arcs {
            let start = base.forward_to(&a.lo)?;
            let end = start.add(&a.len)?;
            match merged.last_mut() {
                Some((_, last_end)) if start.compare(last_end)? != Ordering::Greater => {
                    if end.compare(last_end)? == Ordering::Greater {
                        *last_end = end;
                    }
                }
                _ => merged.push((start, end)),
            }
        }
        // wrap: the final arc may reach past offset 1 and swallow leading arcs
        let one = Scalar::one();
        let last_end = merged.last().unwrap().1.clone();
        if last_end.compare(&one)? != Ordering::Less {
            if merged.len() == 1 {
                // a single arc reaching its own start covers everything
                return Err(Error::FullCircle);
            }
            let mut tail = last_end.sub(&one)?; // coverage [0, tail] up front
            while merged.len() > 1 {
                let (s, e) = merged[0].clone();
                if s.compare(&tail)? != Ordering::Greater {
                    if e.compare(&tail)? == Ordering::Greater {
                        tail = e;
                    }
                    merged.remove(0);
                } else {
                    break;
                }
            }
            let wrap_start = &merged.last().unwrap().0;
            if tail.compare(wrap_start)? != Ordering::Less {
                return Err(Error::FullCircle);
            }
            let n = merged.len();
            merged[n - 1].1 = tail.add(&one)?;
        }

        let mut out = Vec::with_capacity(merged.len());
        for (s, e) in merged {
            let lo = CirclePoint::reduce(&base.scalar().add(&s)?)?;
            let len = e.sub(&s)?;
            out.push(CircleArc { lo, len });
        }
        sort_arcs(&mut out)?;
        let set = IntervalSet { arcs: out };
        let total = set.total_length()?;
        if total.sign()? != Ordering::Greater {
            return Err(Error::EmptySet);
        }
        if total.compare(&one)? != Ordering::Less {
            return Err(Error::FullCircle);
        }
        Ok(set)
    }

    pub fn from_endpoint_pairs(pairs: &[(Scalar, Scalar)]) -> Result<IntervalSet> {
        let arcs = pairs
            .iter()
            .map(|(lo, hi)| CircleArc::from_endpoints(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::normalize(arcs)
    }

    pub fn arcs(&self) -> &[CircleArc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn total_length(&self) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for a in &self.arcs {
            acc = acc.add(&a.len)?;
        }
        Ok(acc)
    }

    /// Membership of a point in the union, with the closed-set boundary
    /// convention decided by the caller via `Membership::as_bit`.
    pub fn membership(&self, z: &CirclePoint) -> Result<Membership> {
        let mut ambiguous = false;
        for a in &self.arcs {
            match a.membership(z)? {
                Membership::In => return Ok(Membership::In),
                Membership::OnBoundary => return Ok(Membership::OnBoundary),
                Membership::Ambiguous => ambiguous = true,
                Membership::Out => {}
            }
        }
        Ok(if ambiguous {
            Membership::Ambiguous
        } else {
            Membership::Out
        })
    }

    /// {-x : x in I}, normalized.
    pub fn negate(&self) -> Result<IntervalSet> {
        let arcs = self
            .arcs
            .iter()
            .map(|a| a.negated())
            .collect::<Result<Vec<_>>>()?;
        Self::normalize(arcs)
    }

    /// I + t, normalized.
    pub fn shift(&self, t: &Scalar) -> Result<IntervalSet> {
        let arcs = self
            .arcs
            .iter()
            .map(|a| a.shift(t))
            .collect::<Result<Vec<_>>>()?;
        Self::normalize(arcs)
    }

    /// Complement of the union (the closed gaps), normalized.
    pub fn complement(&self) -> Result<IntervalSet> {
        let n = self.arcs.len();
        let mut gaps = Vec::with_capacity(n);
        for i in 0..n {
            let cur_hi = self.arcs[i].hi()?;
            let next_lo = &self.arcs[(i + 1) % n].lo;
            let len = cur_hi.forward_to(next_lo)?;
            gaps.push(CircleArc { lo: cur_hi, len });
        }
        Self::normalize(gaps)
    }

    /// Largest n with I + 1/n = I. Rotational symmetry permutes the arcs
    /// freely, so n must divide the arc count.
    pub fn symmetry_order(&self) -> Result<u32> {
        let m = self.arcs.len() as u32;
        let mut divisors: Vec<u32> = (1..=m).filter(|k| m.is_multiple_of(*k)).collect();
        divisors.sort_unstable_by(|a, b| b.cmp(a));
        for n in divisors {
            if n == 1 {
                return Ok(1);
            }
            let shifted = self.shift(&Scalar::from_ratio(1, n as i128)?)?;
            if self.set_eq(&shifted)? {
                return Ok(n);
            }
        }
        Ok(1)
    }

    /// True when I + 1/n = I.
    pub fn has_symmetry(&self, n: u32) -> Result<bool> {
        if n <= 1 {
            return Ok(true);
        }
        if !(self.arcs.len() as u32).is_multiple_of(n) {
            return Ok(false);
        }
        let shifted = self.shift(&Scalar::from_ratio(1, n as i128)?)?;
        self.set_eq(&shifted)
    }

    pub fn set_eq(&self, other: &IntervalSet) -> Result<bool> {
        if self.arcs.len() != other.arcs.len() {
            return Ok(false);
        }
        for (a, b) in self.arcs.iter().zip(&other.arcs) {
            if a.lo.cmp_exact(&b.lo)? != Ordering::Equal {
                return Ok(false);
            }
            if a.len.compare(&b.len)? != Ordering::Equal {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The image {(a*x + j)/c : x in I, j = 0..c-1} on the circle; this is
    /// the target set of the rational-relation symmetry correspondence.
    pub fn image_under(&self, a: i128, c: i128) -> Result<IntervalSet> {
        assert!(c > 0, "normalized relations have c > 0 here");
        let mut arcs = Vec::new();
        for arc in &self.arcs {
            let u = arc.lo.scalar();
            let v = u.add(&arc.len)?;
            let new_len = arc.len.mul_int(a.abs())?.div_int(c)?;
            for j in 0..c {
                let anchor = if a >= 0 { u.clone() } else { v.clone() };
                let lo = anchor.mul_int(a)?.add(&Scalar::from_int(j))?.div_int(c)?;
                arcs.push(CircleArc {
                    lo: CirclePoint::reduce(&lo)?,
                    len: new_len.clone(),
                });
            }
        }
        Self::normalize(arcs)
    }

    /// Parses the interval file format: one arc per line as "lo hi", with
    /// '#' comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<IntervalSet> {
        let mut pairs = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let lo = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing lo", ln + 1)))?;
            let hi = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing hi", ln + 1)))?;
            if parts.next().is_some() {
                return Err(Error::Parse(format!("line {}: extra tokens", ln + 1)));
            }
            pairs.push((
                crate::scalar::parse_scalar(lo)?,
                crate::scalar::parse_scalar(hi)?,
            ));
        }
        Self::from_endpoint_pairs(&pairs)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.arcs.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

fn sort_arcs(arcs: &mut [CircleArc]) -> Result<()> {
    let mut err = None;
    arcs.sort_by(|a, b| match a.lo.cmp_exact(&b.lo) {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    fn iset(pairs: &[(&str, &str)]) -> IntervalSet {
        let v: Vec<(Scalar, Scalar)> = pairs
            .iter()
            .map(|(a, b)| (parse_scalar(a).unwrap(), parse_scalar(b).unwrap()))
            .collect();
        IntervalSet::from_endpoint_pairs(&v).unwrap()
    }

    #[test]
    fn normalize_merges_overlap() {
        let i = iset(&[("0.1", "0.3"), ("0.25", "0.4")]);
        assert_eq!(i.arc_count(), 1);
        assert_eq!(i.arcs()[0].lo.scalar(), &parse_scalar("0.1").unwrap());
        assert_eq!(i.arcs()[0].len, parse_scalar("0.3").unwrap());
    }

    #[test]
    fn normalize_wrap() {
        let i = iset(&[("0.9", "0.2")]);
        assert_eq!(i.arc_count(), 1);
        assert_eq!(i.total_length().unwrap(), parse_scalar("0.3").unwrap());
    }

    #[test]
    fn normalize_quarter_interval() {
        let i = iset(&[("0", "1/4")]);
        assert_eq!(i.arc_count(), 1);
        assert_eq!(i.total_length().unwrap(), parse_scalar("1/4").unwrap());
    }

    #[test]
    fn normalize_rejects_degenerate_and_full() {
        let d = IntervalSet::from_endpoint_pairs(&[(
            parse_scalar("0.5").unwrap(),
            parse_scalar("0.5").unwrap(),
        )]);
        assert!(matches!(d, Err(Error::DegenerateArc)));
        let f = IntervalSet::from_endpoint_pairs(&[
            (parse_scalar("0").unwrap(), parse_scalar("0.6").unwrap()),
            (parse_scalar("0.5").unwrap(), parse_scalar("0.1").unwrap()),
        ]);
        assert!(matches!(f, Err(Error::FullCircle)));
        let e = IntervalSet::from_endpoint_pairs(&[]);
        assert!(matches!(e, Err(Error::EmptySet)));
    }

    #[test]
    fn touching_closed_arcs_merge() {
        let i = iset(&[("0.1", "0.2"), ("0.2", "0.3")]);
        assert_eq!(i.arc_count(), 1);
        assert_eq!(i.total_length().unwrap(), parse_scalar("0.2").unwrap());
    }

    #[test]
    fn membership_cases() {
        let i = iset(&[("0", "1/4")]);
        let z0 = CirclePoint::reduce(&parse_scalar("0").unwrap()).unwrap();
        assert_eq!(i.membership(&z0).unwrap(), Membership::OnBoundary);
        assert!(z0.scalar().is_zero());
        let half = CirclePoint::reduce(&parse_scalar("1/2").unwrap()).unwrap();
        assert_eq!(i.membership(&half).unwrap(), Membership::Out);
        // 2*sqrt(3)/15 = 0.2309... < 0.25
        let z = CirclePoint::reduce(&parse_scalar("(0+2*sqrt(3))/15").unwrap()).unwrap();
        assert_eq!(i.membership(&z).unwrap(), Membership::In);
    }

    #[test]
    fn membership_wrap_arc() {
        let i = iset(&[("0.9", "0.2")]);
        for (z, want) in [
            ("0.95", Membership::In),
            ("0.1", Membership::In),
            ("0", Membership::In),
            ("0.9", Membership::OnBoundary),
            ("0.2", Membership::OnBoundary),
            ("0.5", Membership::Out),
        ] {
            let zp = CirclePoint::reduce(&parse_scalar(z).unwrap()).unwrap();
            assert_eq!(i.membership(&zp).unwrap(), want, "z = {z}");
        }
    }

    #[test]
    fn negate_examples() {
        // -[1/4,1/2] = [1/2,3/4]
        let i = iset(&[("1/4", "1/2")]).negate().unwrap();
        assert!(i.set_eq(&iset(&[("1/2", "3/4")])).unwrap());
        // -[0,1/4] = [3/4,1]
        let i = iset(&[("0", "1/4")]).negate().unwrap();
        assert!(i.set_eq(&iset(&[("3/4", "1")])).unwrap());
        // an arc symmetric about 0 maps to itself
        let i = iset(&[("0.9", "0.1")]);
        assert!(i.negate().unwrap().set_eq(&i).unwrap());
    }

    #[test]
    fn symmetry_orders() {
        // I3 = [1/8,1/4] u [5/8,3/4] has 2-fold symmetry
        let i3 = iset(&[("1/8", "1/4"), ("5/8", "3/4")]);
        assert_eq!(i3.symmetry_order().unwrap(), 2);
        assert_eq!(i3.total_length().unwrap(), parse_scalar("1/4").unwrap());
        // I4 has 3-fold symmetry
        let i4 = iset(&[("1/12", "1/6"), ("5/12", "1/2"), ("3/4", "5/6")]);
        assert_eq!(i4.symmetry_order().unwrap(), 3);
        // single short arc: trivial symmetry
        assert_eq!(iset(&[("0", "1/4")]).symmetry_order().unwrap(), 1);
    }

    #[test]
    fn complement_lengths_sum_to_one() {
        let i = iset(&[("0.1", "0.2"), ("0.5", "0.7")]);
        let c = i.complement().unwrap();
        let total = i
            .total_length()
            .unwrap()
            .add(&c.total_length().unwrap())
            .unwrap();
        assert_eq!(total, Scalar::one());
    }

    #[test]
    fn image_under_matches_symmetric_set() {
        // {(x+j)/2 : x in [1/4,1/2], j} = I3
        let i1 = iset(&[("1/4", "1/2")]);
        let img = i1.image_under(1, 2).unwrap();
        let i3 = iset(&[("1/8", "1/4"), ("5/8", "3/4")]);
        assert!(img.set_eq(&i3).unwrap());
        // {(x+j)/3 : x in [1/4,1/2], j} = I4
        let img = i1.image_under(1, 3).unwrap();
        let i4 = iset(&[("1/12", "1/6"), ("5/12", "1/2"), ("3/4", "5/6")]);
        assert!(img.set_eq(&i4).unwrap());
        // negative a: {(-x+j)/2 : x in [1/2,3/4]} = I3 as well
        let i2 = iset(&[("1/2", "3/4")]);
        let img = i2.image_under(-1, 2).unwrap();
        assert!(img.set_eq(&i3).unwrap());
    }

    #[test]
    fn parse_and_display() {
        let text = "# interval file\n0 1/4\n\n0.5 0.7 # trailing comment\n";
        let i = IntervalSet::parse(text).unwrap();
        assert_eq!(i.arc_count(), 2);
        let shown = i.to_string();
        let reparsed = IntervalSet::parse(&shown).unwrap();
        assert!(i.set_eq(&reparsed).unwrap());
    }

    #[test]
    fn idempotent_normalization() {
        let i = iset(&[("0.9", "0.2"), ("0.15", "0.3"), ("0.5", "0.6")]);
        let again = IntervalSet::normalize(i.arcs().to_vec()).unwrap();
        assert!(i.set_eq(&again).unwrap());
    }
}
