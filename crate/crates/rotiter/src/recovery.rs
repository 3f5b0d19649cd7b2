//! Inverse algorithms: reconstruct the interval set given the rotation
//! amount, bracket the symmetric rotation amount by block counting, search
//! powers when the rotation is too large, enumerate and eliminate the 2k
//! candidate angles, and run the (k,p) search for multi-interval sets.
//!
//! All finite-data conclusions here are interval statements. Candidate
//! elimination is slack-aware: a candidate known only as a bracket [lo,hi]
//! drifts by i*(hi-lo)/2 at orbit index i, and a bit is a provable conflict
//! only when the observed label is impossible for every angle in the
//! bracket. A candidate bracket containing the true angle (or its mirror)
//! is therefore never eliminated.

use crate::circle::{CircleArc, CirclePoint, IntervalSet};
use crate::error::{Error, Result};
use crate::itinerary::{eventually_periodic, Itinerary};
use crate::scalar::{Rad, Scalar};
use std::cmp::Ordering;

/// Bracket for the symmetric rotation amount [alpha], in [0, 1/2].
#[derive(Clone, Debug)]
pub struct AlphaBracket {
    pub lo: Scalar,
    pub hi: Scalar,
    pub n_used: usize,
}

impl AlphaBracket {
    pub fn width(&self) -> Result<Scalar> {
        self.hi.sub(&self.lo)
    }

    pub fn contains(&self, v: &Scalar) -> Result<bool> {
        Ok(self.lo.compare(v)? != Ordering::Greater && self.hi.compare(v)? != Ordering::Less)
    }
}

/// Candidate bracket for the fractional rotation amount {alpha}, in [0, 1).
#[derive(Clone, Debug)]
pub struct CandidateAlpha {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl CandidateAlpha {
    pub fn midpoint(&self) -> Result<Scalar> {
        self.lo.add(&self.hi)?.div_int(2)
    }

    pub fn halfwidth(&self) -> Result<Scalar> {
        self.hi.sub(&self.lo)?.div_int(2)
    }

    pub fn contains(&self, v: &Scalar) -> Result<bool> {
        Ok(self.lo.compare(v)? != Ordering::Greater && self.hi.compare(v)? != Ordering::Less)
    }
}

/// Inner and outer reconstructions of the interval set: inner is contained
/// in the true set, outer contains it (on the data seen so far). The two
/// lists are aligned component by component; inner arcs may be degenerate
/// single points.
#[derive(Clone, Debug)]
pub struct IntervalBracket {
    pub inner: Vec<CircleArc>,
    pub outer: Vec<CircleArc>,
    pub spacing_bound: Option<Scalar>,
}

impl IntervalBracket {
    pub fn components(&self) -> usize {
        self.inner.len()
    }

    /// Outer reconstruction as a normalized interval set (touching arcs
    /// merge).
    pub fn outer_set(&self) -> Result<IntervalSet> {
        IntervalSet::normalize(self.outer.clone())
    }

    /// Inner reconstruction as an interval set; fails while some component
    /// has a single witness point.
    pub fn inner_set(&self) -> Result<IntervalSet> {
        IntervalSet::normalize(self.inner.clone())
    }

    /// Circular distance from a point to the outer union (zero inside).
    pub fn distance_outside_outer(&self, pos: &Scalar) -> Result<Scalar> {
        let mut best: Option<Scalar> = None;
        for arc in &self.outer {
            let d = arc_distance(pos, arc)?;
            if d.is_zero() {
                return Ok(Scalar::zero());
            }
            best = Some(match best {
                None => d,
                Some(b) => {
                    if d.compare(&b)? == Ordering::Less {
                        d
                    } else {
                        b
                    }
                }
            });
        }
        Ok(best.unwrap_or_else(Scalar::zero))
    }

    /// Depth of a point inside the inner union (zero outside).
    pub fn depth_inside_inner(&self, pos: &Scalar) -> Result<Scalar> {
        for arc in &self.inner {
            let d = arc_depth(pos, arc)?;
            if !d.is_zero() {
                return Ok(d);
            }
        }
        Ok(Scalar::zero())
    }
}

/// Circular distance from pos to the closed arc (zero if inside).
fn arc_distance(pos: &Scalar, arc: &CircleArc) -> Result<Scalar> {
    let w = pos.sub(arc.lo.scalar())?.frac()?;
    if w.compare(&arc.len)? != Ordering::Greater {
        return Ok(Scalar::zero());
    }
    let past = w.sub(&arc.len)?;
    let around = Scalar::one().sub(&w)?;
    Ok(if past.compare(&around)? == Ordering::Less {
        past
    } else {
        around
    })
}

/// Depth of pos inside the closed arc (zero if outside).
fn arc_depth(pos: &Scalar, arc: &CircleArc) -> Result<Scalar> {
    let w = pos.sub(arc.lo.scalar())?.frac()?;
    if w.compare(&arc.len)? == Ordering::Greater {
        return Ok(Scalar::zero());
    }
    let to_hi = arc.len.sub(&w)?;
    Ok(if w.compare(&to_hi)? == Ordering::Less {
        w
    } else {
        to_hi
    })
}

/// A known rational approximation alpha = p/q +- eps, used for the
/// orbit-spacing bound 1/q + 2*q*eps.
#[derive(Clone, Debug)]
pub struct Convergent {
    pub p: i128,
    pub q: i128,
    pub eps: Scalar,
}

impl Convergent {
    /// Best continued-fraction convergent of an exact alpha with q bounded.
    pub fn best_for(alpha: &Scalar, max_q: i128) -> Result<Convergent> {
        let surd = alpha
            .as_exact()
            .ok_or_else(|| Error::InvalidScalar("convergents need an exact alpha".into()))?;
        let list = crate::scalar::convergents(surd, max_q)?;
        let (p, q) = *list
            .iter()
            .rfind(|(_, q)| *q > 0)
            .ok_or_else(|| Error::InsufficientData("no convergent with positive q".into()))?;
        let diff = alpha.sub(&Scalar::from_ratio(p, q)?)?;
        let eps = if diff.sign()? == Ordering::Less {
            diff.neg()
        } else {
            diff
        };
        Ok(Convergent { p, q, eps })
    }

    /// 1/q + 2*q*eps: the maximum orbit spacing over the first q iterates.
    pub fn spacing_bound(&self) -> Result<Scalar> {
        Scalar::from_ratio(1, self.q)?.add(&self.eps.mul_int(2 * self.q)?)
    }
}

// ---------------------------------------------------------------------------
// slack-aware clustering engine
// ---------------------------------------------------------------------------

struct EnginePoint {
    pos: Scalar,
    slack: Scalar,
    label: bool,
    index: usize,
}

struct ClusterComponent {
    inner_lo: Scalar,
    inner_len: Scalar,
    outer_lo: Scalar,
    outer_len: Scalar,
}

enum Reconstruction {
    /// components plus the largest point slack used (folds into conflict
    /// margins downstream)
    Components(Vec<ClusterComponent>, Scalar),
    /// provably equal positions with conflicting labels
    Conflict { index: usize },
    /// no certified separation structure; nothing can be concluded
    Undecidable,
}

/// Clusters labeled orbit points into certified components. Two adjacent
/// points chain into one blob unless their circular gap exceeds the sum of
/// their slacks; components are maximal runs of blobs containing a 1,
/// bounded by pure-0 blobs whose nearest points give the outer endpoints.
fn cluster(points: Vec<EnginePoint>) -> Result<Reconstruction> {
    let mut pts = points;
    let n = pts.len();
    if n < 2 {
        return Ok(Reconstruction::Undecidable);
    }
    // sort by position; exact scalars here, so comparison is total
    {
        let mut err = None;
        pts.sort_by(|a, b| match a.pos.compare(&b.pos) {
            Ok(o) => o,
            Err(e) => {
                err.get_or_insert(e);
                Ordering::Equal
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    // exact duplicates: conflicting labels are fatal, agreeing ones merge
    let mut dedup: Vec<EnginePoint> = Vec::with_capacity(n);
    for p in pts {
        match dedup.last() {
            Some(last) if last.pos.compare(&p.pos)? == Ordering::Equal => {
                if last.label != p.label && last.slack.is_zero() && p.slack.is_zero() {
                    return Ok(Reconstruction::Conflict {
                        index: p.index.max(last.index),
                    });
                }
                // keep the earlier occurrence
            }
            _ => dedup.push(p),
        }
    }
    let pts = dedup;
    let n = pts.len();
    if n < 2 {
        return Ok(Reconstruction::Undecidable);
    }

    // separated[i]: certified gap between pts[i] and pts[(i+1) % n]
    let one = Scalar::one();
    let mut separated = vec![false; n];
    for i in 0..n {
        let j = (i + 1) % n;
        let mut gap = pts[j].pos.sub(&pts[i].pos)?;
        if i + 1 == n {
            gap = gap.add(&one)?;
        }
        let need = pts[i].slack.add(&pts[j].slack)?;
        separated[i] = gap.compare(&need)? == Ordering::Greater;
    }
    if !separated.iter().any(|s| *s) {
        return Ok(Reconstruction::Undecidable);
    }

    // blobs: maximal chains of unseparated points, walked circularly from a
    // separated boundary
    let start = (0..n).find(|&i| separated[i]).unwrap() + 1;
    let mut blobs: Vec<(usize, usize)> = Vec::new(); // index ranges into walk order
    let order: Vec<usize> = (0..n).map(|t| (start + t) % n).collect();
    let mut blob_start = 0usize;
    for (t, &i) in order.iter().enumerate() {
        if separated[i] || t == n - 1 {
            blobs.push((blob_start, t));
            blob_start = t + 1;
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum BlobKind {
        Zero,
        One,
        Mixed,
    }
    let mut kinds = Vec::with_capacity(blobs.len());
    for &(a, b) in &blobs {
        let mut has1 = false;
        let mut has0 = false;
        for t in a..=b {
            if pts[order[t]].label {
                has1 = true;
            } else {
                has0 = true;
            }
        }
        kinds.push(match (has1, has0) {
            (true, false) => BlobKind::One,
            (false, true) => BlobKind::Zero,
            (true, true) => BlobKind::Mixed,
            (false, false) => unreachable!(),
        });
    }
    if !kinds.contains(&BlobKind::Zero) || !kinds.iter().any(|k| *k != BlobKind::Zero) {
        return Ok(Reconstruction::Undecidable);
    }

    // runs of non-zero blobs, circularly, bounded by pure-zero blobs
    let m = blobs.len();
    let first_zero = kinds.iter().position(|k| *k == BlobKind::Zero).unwrap();
    let mut components = Vec::new();
    let mut t = first_zero;
    let mut seen = 0usize;
    while seen < m {
        // t sits on a zero blob; scan forward to the next zero blob
        let mut u = (t + 1) % m;
        let mut hops = 1usize;
        while kinds[u] != BlobKind::Zero {
            u = (u + 1) % m;
            hops += 1;
        }
        if hops > 1 {
            // blobs t+1 .. u-1 form a run containing ones
            let run: Vec<usize> = (1..hops).map(|h| (t + h) % m).collect();
            // inner: first to last 1-labeled point across the run
            let mut first_one: Option<usize> = None;
            let mut last_one: Option<usize> = None;
            for &bi in &run {
                let (a, b) = blobs[bi];
                for w in a..=b {
                    if pts[order[w]].label {
                        if first_one.is_none() {
                            first_one = Some(w);
                        }
                        last_one = Some(w);
                    }
                }
            }
            let (fo, lo_) = (first_one.unwrap(), last_one.unwrap());
            let inner_lo = pts[order[fo]].pos.clone();
            let inner_len = forward_gap(&pts[order[fo]].pos, &pts[order[lo_]].pos)?;
            // outer: nearest point of the bounding zero blobs; when one
            // single zero point bounds the run on both sides the arc wraps
            // the whole circle
            let left_anchor = blobs[t].1; // last point of preceding zero blob
            let right_anchor = blobs[u].0; // first point of following zero blob
            let outer_lo = pts[order[left_anchor]].pos.clone();
            let mut outer_len =
                forward_gap(&pts[order[left_anchor]].pos, &pts[order[right_anchor]].pos)?;
            if outer_len.is_zero() {
                outer_len = Scalar::one();
            }
            components.push(ClusterComponent {
                inner_lo,
                inner_len,
                outer_lo,
                outer_len,
            });
        }
        seen += hops;
        t = u;
    }

    let mut sigma = Scalar::zero();
    for p in &pts {
        if p.slack.compare(&sigma)? == Ordering::Greater {
            sigma = p.slack.clone();
        }
    }
    Ok(Reconstruction::Components(components, sigma))
}

/// Forward circular distance from a to b, in [0, 1).
fn forward_gap(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    b.sub(a)?.frac()
}

fn components_to_bracket(
    comps: Vec<ClusterComponent>,
    spacing_bound: Option<Scalar>,
) -> Result<IntervalBracket> {
    let mut inner = Vec::with_capacity(comps.len());
    let mut outer = Vec::with_capacity(comps.len());
    for c in comps {
        inner.push(CircleArc::new(
            CirclePoint::reduce(&c.inner_lo)?,
            c.inner_len,
        ));
        outer.push(CircleArc::new(
            CirclePoint::reduce(&c.outer_lo)?,
            c.outer_len,
        ));
    }
    Ok(IntervalBracket {
        inner,
        outer,
        spacing_bound,
    })
}

// ---------------------------------------------------------------------------
// interval recovery: I is the closure of {i*alpha : a_i = 1}
// ---------------------------------------------------------------------------

/// Exact rational upper bound on a radius, clamped away from denominators
/// that would not fit in i128.
fn rad_to_scalar_upper(r: Rad) -> Result<Scalar> {
    if r.is_zero() {
        return Ok(Scalar::zero());
    }
    let f = r.to_f64();
    if f > 1e-12 {
        // representable comfortably: ceil to 1e-18 granularity
        let num = (f * 1e18).ceil() as i128 + 1;
        Scalar::from_ratio(num, 1_000_000_000_000_000_000)
    } else {
        Scalar::from_ratio(1, 1i128 << 90)
    }
}

/// Reconstructs the inner/outer bracket for I from an itinerary and the
/// rotation amount. Exact alpha gives exact clustering; a certified alpha
/// contributes per-point slack i*radius.
pub fn recover_interval(
    it: &Itinerary,
    alpha: &Scalar,
    convergent: Option<&Convergent>,
) -> Result<IntervalBracket> {
    let ones = it.count_ones();
    if ones == it.len() {
        return Err(Error::AllOnes);
    }
    if ones == 0 {
        return Err(Error::AllZeros);
    }
    let n = it.len();
    let mut points = Vec::with_capacity(n);
    match alpha.as_exact() {
        Some(surd) => {
            let step = surd.frac()?;
            let mut x = crate::scalar::Surd::zero();
            for i in 0..n {
                points.push(EnginePoint {
                    pos: Scalar::Exact(x),
                    slack: Scalar::zero(),
                    label: it.bit(i),
                    index: i,
                });
                x = x.add(&step)?.frac()?;
            }
        }
        None => {
            let h = rad_to_scalar_upper(alpha.radius())?;
            let dyadic_err = Scalar::from_ratio(1, 1i128 << 62)?;
            for i in 0..n {
                let ball = alpha
                    .mul_int(i as i128)?
                    .to_ball(crate::scalar::default_precision());
                let (num, den) = crate::scalar::ball::dyadic_approx(&ball.mid, 63)
                    .ok_or(Error::Overflow("dyadic approximation"))?;
                let pos = Scalar::from_ratio(num, den)?.frac()?;
                let slack = h.mul_int(i as i128)?.add(&dyadic_err)?;
                points.push(EnginePoint {
                    pos,
                    slack,
                    label: it.bit(i),
                    index: i,
                });
            }
        }
    }
    match cluster(points)? {
        Reconstruction::Components(comps, _) => {
            let sb = match convergent {
                Some(c) => Some(c.spacing_bound()?),
                None => None,
            };
            components_to_bracket(comps, sb)
        }
        Reconstruction::Conflict { index } => Err(Error::AmbiguousClustering { index }),
        Reconstruction::Undecidable => Err(Error::InsufficientData(
            "orbit points cannot be certifiably separated".into(),
        )),
    }
}

/// Drift-aware reconstruction used by the conjugacy verifier: labels at
/// absolute indices offset..offset+len, positions {i*alpha_hat}, per-point
/// slack i*h. Returns None when the points cannot be certifiably clustered
/// or carry an exact conflict.
pub(crate) fn recover_interval_with_slack(
    bits: &Itinerary,
    index_offset: usize,
    alpha_hat: &Scalar,
    h: &Scalar,
) -> Result<Option<IntervalBracket>> {
    let n = bits.len();
    if bits.count_ones() == 0 || bits.count_ones() == n {
        return Ok(None);
    }
    let mut points = Vec::with_capacity(n);
    for t in 0..n {
        let i = index_offset + t;
        let pos = alpha_hat.mul_int(i as i128)?.frac()?;
        let slack = h.mul_int(i as i128)?;
        points.push(EnginePoint {
            pos,
            slack,
            label: bits.bit(t),
            index: i,
        });
    }
    match cluster(points)? {
        Reconstruction::Components(comps, _) => Ok(Some(components_to_bracket(comps, None)?)),
        _ => Ok(None),
    }
}

/// Birkhoff estimate of the total length l(I): the mean of the bits, plus
/// the (S_q -+ 1)(1/q -+ 2q eps) bracket when a convergent is supplied (the
/// bracket assumes a single interval).
pub fn estimate_length(
    it: &Itinerary,
    convergent: Option<&Convergent>,
) -> Result<(Scalar, Option<(Scalar, Scalar)>)> {
    let n = it.len();
    let point = Scalar::from_ratio(it.count_ones() as i128, n as i128)?;
    let bracket = match convergent {
        None => None,
        Some(c) => {
            let q = c.q;
            if q <= 0 || q as usize > n {
                return Err(Error::InsufficientData(format!(
                    "convergent q = {q} exceeds itinerary length {n}"
                )));
            }
            let s_q = it.bits()[..q as usize].iter().filter(|b| **b).count() as i128;
            let inv_q = Scalar::from_ratio(1, q)?;
            let corr = c.eps.mul_int(2 * q)?;
            let lo = Scalar::from_int(s_q - 1).mul(&inv_q.sub(&corr)?)?;
            let hi = Scalar::from_int(s_q + 1).mul(&inv_q.add(&corr)?)?;
            Some((lo, hi))
        }
    };
    Ok((point, bracket))
}

// ---------------------------------------------------------------------------
// bracketing [alpha] by block counting
// ---------------------------------------------------------------------------

/// Block-counting bracket: with b maximal 1-blocks among the first n bits,
/// (b-2)/n <= [alpha] <= (b+1)/n, intersected with [0, 1/2]. Requires both
/// "11" and "00" to occur.
pub fn bracket_sym_alpha(it: &Itinerary) -> Result<AlphaBracket> {
    if !it.has_double(true) {
        return Err(Error::NoDoubleOne);
    }
    if !it.has_double(false) {
        return Err(Error::NoDoubleZero);
    }
    let n = it.len();
    let b = it.block_count(true, n) as i128;
    bracket_from_blocks(b, n, 1)
}

fn bracket_from_blocks(b: i128, n: usize, p: usize) -> Result<AlphaBracket> {
    let n_i = n as i128;
    let p_i = p as i128;
    let (lo_num, hi_num) = if p == 1 {
        (b - 2, b + 1)
    } else {
        (b - 2 * p_i, b + 2 * p_i)
    };
    let mut lo = Scalar::from_ratio(lo_num.max(0), p_i * n_i)?;
    let mut hi = Scalar::from_ratio(hi_num, p_i * n_i)?;
    let half = Scalar::from_ratio(1, 2)?;
    if hi.compare(&half)? == Ordering::Greater {
        hi = half.clone();
    }
    if lo.compare(&half)? == Ordering::Greater {
        lo = half;
    }
    Ok(AlphaBracket { lo, hi, n_used: n })
}

/// Smallest k <= k_max whose k-subsample contains both "11" and "00".
pub fn find_power_k(it: &Itinerary, k_max: usize) -> Result<usize> {
    if it.len() < 2 * k_max.max(1) {
        return Err(Error::InsufficientData(format!(
            "need at least {} bits to scan powers up to {k_max}",
            2 * k_max
        )));
    }
    for k in 1..=k_max {
        let sub = it.subsample(k)?;
        if sub.has_double(true) && sub.has_double(false) {
            return Ok(k);
        }
    }
    Err(Error::NotFound { k_max })
}

/// The 2k candidate brackets for {alpha} given a bracket s for [k*alpha]:
/// {alpha} = (n + t)/k for n = 0..k-1 and t in {[k*alpha], 1 - [k*alpha]}.
pub fn candidate_alphas(k: usize, s: &AlphaBracket) -> Result<Vec<CandidateAlpha>> {
    let mut out = Vec::with_capacity(2 * k);
    let one = Scalar::one();
    for n0 in 0..k as i128 {
        let base = Scalar::from_int(n0);
        out.push(CandidateAlpha {
            lo: base.add(&s.lo)?.div_int(k as i128)?,
            hi: base.add(&s.hi)?.div_int(k as i128)?,
        });
    }
    for n0 in 0..k as i128 {
        let base = Scalar::from_int(n0);
        out.push(CandidateAlpha {
            lo: base.add(&one.sub(&s.hi)?)?.div_int(k as i128)?,
            hi: base.add(&one.sub(&s.lo)?)?.div_int(k as i128)?,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// candidate elimination
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Candidate {
    pub alpha: CandidateAlpha,
    pub bracket: Option<IntervalBracket>,
    pub eliminated_at: Option<usize>,
}

impl Candidate {
    pub fn survived(&self) -> bool {
        self.eliminated_at.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct RecoveryResult {
    pub k_used: usize,
    pub p_assumed: usize,
    pub candidates: Vec<Candidate>,
    /// prefix length the surviving candidates are known to match (within
    /// bracket slack); certainty never extends past it
    pub horizon: usize,
}

impl RecoveryResult {
    pub fn survivors(&self) -> Vec<&Candidate> {
        self.candidates.iter().filter(|c| c.survived()).collect()
    }
}

fn isqrt_i128(v: i128) -> i128 {
    if v <= 0 {
        0
    } else {
        (v as u128).isqrt() as i128
    }
}

/// Reconstruction horizon for a candidate of halfwidth h: the largest H
/// with H^2 * h <= 1/divisor, keeping positional drift a fixed fraction of
/// the expected point spacing. Exact candidates use the full horizon.
fn safe_horizon(h: &Scalar, horizon: usize, divisor: i128) -> Result<usize> {
    if h.is_zero() {
        return Ok(horizon);
    }
    let s = h
        .as_exact()
        .ok_or_else(|| Error::InvalidScalar("exact halfwidth expected".into()))?;
    // h = hn/hd with hn > 0: H = floor(sqrt(hd / (divisor * hn)))
    let t = s.denom() / (divisor * s.numer().max(1));
    Ok((isqrt_i128(t).max(8) as usize).min(horizon))
}

fn evaluate_candidate(
    it: &Itinerary,
    cand: &CandidateAlpha,
    p_assumed: usize,
    horizon: usize,
) -> Result<Candidate> {
    let mid = cand.midpoint()?;
    let h = cand.halfwidth()?;
    let horizon = horizon.min(it.len());
    let mut h_rec = safe_horizon(&h, horizon, 32)?;
    let h_rec_max = safe_horizon(&h, horizon, 8)?.max(h_rec);

    // positions of the candidate orbit, computed once up to the horizon
    let mut positions: Vec<Scalar> = Vec::with_capacity(horizon);
    {
        let surd = mid
            .as_exact()
            .copied()
            .ok_or_else(|| Error::InvalidScalar("candidate midpoints are exact".into()))?;
        let step = surd.frac()?;
        let mut x = crate::scalar::Surd::zero();
        for _ in 0..horizon {
            positions.push(Scalar::Exact(x));
            x = x.add(&step)?.frac()?;
        }
    }

    // adaptive reconstruction: grow the window toward the drift-safe
    // maximum, keeping the largest certified reconstruction (the
    // certificates do not depend on the window size, and more points both
    // reveal components and tighten the bracket)
    let mut best: Option<(Vec<ClusterComponent>, Scalar, usize)> = None;
    loop {
        let pts = (0..h_rec)
            .map(|i| {
                Ok(EnginePoint {
                    pos: positions[i].clone(),
                    slack: h.mul_int(i as i128)?,
                    label: it.bit(i),
                    index: i,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        match cluster(pts)? {
            Reconstruction::Conflict { index } => {
                return Ok(Candidate {
                    alpha: cand.clone(),
                    bracket: None,
                    eliminated_at: Some(index),
                });
            }
            Reconstruction::Components(comps, sigma) => {
                if comps.len() > p_assumed {
                    // certified lower bound on components exceeds p
                    return Ok(Candidate {
                        alpha: cand.clone(),
                        bracket: None,
                        eliminated_at: Some(h_rec),
                    });
                }
                let improved = match &best {
                    None => true,
                    Some((prev, _, _)) => comps.len() == p_assumed || comps.len() >= prev.len(),
                };
                if improved {
                    best = Some((comps, sigma, h_rec));
                }
            }
            Reconstruction::Undecidable => {}
        }
        if h_rec >= h_rec_max {
            break;
        }
        h_rec = (h_rec * 2).min(h_rec_max);
    }

    let Some((comps, sigma, h_used)) = best else {
        // nothing certifiable; the candidate survives without a bracket
        return Ok(Candidate {
            alpha: cand.clone(),
            bracket: None,
            eliminated_at: None,
        });
    };
    let count = comps.len();
    let bracket = components_to_bracket(comps, None)?;

    // conflict scan past the reconstruction window; the inner-side test is
    // sound only when every assumed component is pinned (count == p)
    let run_inner = count == p_assumed;
    for (i, pos) in positions.iter().enumerate().skip(h_used) {
        let margin = h.mul_int(i as i128)?.add(&sigma)?;
        if it.bit(i) {
            let d = bracket.distance_outside_outer(pos)?;
            if d.compare(&margin)? == Ordering::Greater {
                return Ok(Candidate {
                    alpha: cand.clone(),
                    bracket: Some(bracket),
                    eliminated_at: Some(i),
                });
            }
        } else if run_inner {
            let d = bracket.depth_inside_inner(pos)?;
            if d.compare(&margin)? == Ordering::Greater {
                return Ok(Candidate {
                    alpha: cand.clone(),
                    bracket: Some(bracket),
                    eliminated_at: Some(i),
                });
            }
        }
    }
    Ok(Candidate {
        alpha: cand.clone(),
        bracket: Some(bracket),
        eliminated_at: None,
    })
}

fn eliminate_with(
    it: &Itinerary,
    candidates: &[CandidateAlpha],
    p_assumed: usize,
    horizon: usize,
    k_used: usize,
) -> Result<RecoveryResult> {
    if candidates.is_empty() {
        return Err(Error::InsufficientData("no candidates to eliminate".into()));
    }
    let horizon = horizon.min(it.len());
    let mut out = Vec::with_capacity(candidates.len());
    for cand in candidates {
        out.push(evaluate_candidate(it, cand, p_assumed, horizon)?);
    }
    if out.iter().all(|c| !c.survived()) {
        return Err(Error::AllEliminated);
    }
    Ok(RecoveryResult {
        k_used,
        p_assumed,
        candidates: out,
        horizon,
    })
}

/// Tests each candidate against the observed prefix, discarding it at the
/// first provable conflict, and returns the survivors (a single-interval
/// set is assumed).
pub fn eliminate_candidates(
    it: &Itinerary,
    candidates: &[CandidateAlpha],
) -> Result<RecoveryResult> {
    eliminate_with(it, candidates, 1, it.len(), 1)
}

// ---------------------------------------------------------------------------
// pipelines
// ---------------------------------------------------------------------------

fn reject_if_periodic(it: &Itinerary) -> Result<()> {
    if let Some(period) = eventually_periodic(it) {
        return Err(Error::RationalSuspected { period });
    }
    Ok(())
}

/// Single-interval recovery: bracket [alpha] directly when "11" and "00"
/// occur, otherwise find a power k whose subsample has them, then build and
/// eliminate the 2k candidates against the full prefix.
pub fn recover_alpha_single(it: &Itinerary, k_max: usize) -> Result<RecoveryResult> {
    reject_if_periodic(it)?;
    let k = match bracket_sym_alpha(it) {
        Ok(_) => 1,
        Err(Error::NoDoubleOne) | Err(Error::NoDoubleZero) => find_power_k(it, k_max)?,
        Err(e) => return Err(e),
    };
    let sub = it.subsample(k)?;
    let s = bracket_sym_alpha(&sub)?;
    let candidates = candidate_alphas(k, &s)?;
    eliminate_with(it, &candidates, 1, it.len(), k)
}

/// The (k,p) search: cells ordered by k+p ascending then k ascending. Each
/// cell brackets [k*alpha] by block counting on the k-subsample with the
/// p-interval slack, builds the 2k candidates, and accepts the first cell
/// with a surviving candidate. Certainty holds only up to the horizon.
pub fn multi_interval_search(
    it: &Itinerary,
    k_max: usize,
    p_max: usize,
    horizon: usize,
) -> Result<RecoveryResult> {
    reject_if_periodic(it)?;
    let horizon = horizon.min(it.len());
    for s in 2..=(k_max + p_max) {
        for k in 1..s {
            let p = s - k;
            if k > k_max || p > p_max {
                continue;
            }
            let sub = match it.subsample(k) {
                Ok(s) => s,
                Err(_) => continue,
            };
            if sub.len() < 4 || !sub.has_double(true) || !sub.has_double(false) {
                continue;
            }
            let b = sub.block_count(true, sub.len()) as i128;
            let bracket = bracket_from_blocks(b, sub.len(), p)?;
            if bracket.lo.compare(&bracket.hi)? == Ordering::Greater {
                continue;
            }
            let candidates = candidate_alphas(k, &bracket)?;
            match eliminate_with(it, &candidates, p, horizon, k) {
                Ok(result) => return Ok(result),
                Err(Error::AllEliminated) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Err(Error::Exhausted { k_max, p_max })
}

// ---------------------------------------------------------------------------
// component-count lower bound
// ---------------------------------------------------------------------------

/// Lower bounds on the number p of intervals from the count B of distinct
/// 1-block lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentBound {
    /// always valid: B > 3 violates the three-gap structure of p = 1
    pub unconditional: u32,
    /// valid under the dichotomy branch where some gap of the complement
    /// exceeds the rotation amount: p >= ceil(log4(B+1))
    pub conditional: u32,
}

pub fn min_components_bound(b_distinct: usize, witnessed_long_zero_gap: bool) -> ComponentBound {
    let unconditional = if b_distinct > 3 { 2 } else { 1 };
    let mut log_bound = 0u32;
    let mut power = 1u64;
    while power < b_distinct as u64 + 1 {
        power = power.saturating_mul(4);
        log_bound += 1;
    }
    let conditional = log_bound.max(1);
    ComponentBound {
        unconditional: if witnessed_long_zero_gap {
            unconditional.max(conditional)
        } else {
            unconditional
        },
        conditional,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::itinerary::generate;
    use crate::scalar::parse_scalar;

    fn interval(pairs: &[(&str, &str)]) -> IntervalSet {
        let v: Vec<(Scalar, Scalar)> = pairs
            .iter()
            .map(|(a, b)| (parse_scalar(a).unwrap(), parse_scalar(b).unwrap()))
            .collect();
        IntervalSet::from_endpoint_pairs(&v).unwrap()
    }

    fn sc(s: &str) -> Scalar {
        parse_scalar(s).unwrap()
    }

    const REFERENCE_PREFIX: &str = "1110000001100000001100000011100000011000000011000000111";

    #[test]
    fn reference_bracket_contains_alpha() {
        let it = Itinerary::parse(REFERENCE_PREFIX).unwrap();
        let b = bracket_sym_alpha(&it).unwrap();
        // b(55) = 7 blocks of ones: [5/55, 8/55]
        assert_eq!(b.lo, sc("5/55"));
        assert_eq!(b.hi, sc("8/55"));
        let alpha = sc("(0+1*sqrt(3))/15");
        assert!(b.contains(&alpha.sym_frac().unwrap()).unwrap());
    }

    #[test]
    fn block_bracket_direct_count() {
        let it = Itinerary::parse("110011001100").unwrap();
        let b = bracket_sym_alpha(&it).unwrap();
        assert_eq!(b.lo, sc("1/12"));
        assert_eq!(b.hi, sc("4/12"));
    }

    #[test]
    fn bracket_requires_doubles() {
        let it = Itinerary::parse("10101010").unwrap();
        assert!(matches!(bracket_sym_alpha(&it), Err(Error::NoDoubleOne)));
        let it = Itinerary::parse("11111111").unwrap();
        assert!(matches!(bracket_sym_alpha(&it), Err(Error::NoDoubleZero)));
    }

    #[test]
    fn recover_interval_reference_prefix() {
        let alpha = sc("(0+1*sqrt(3))/15");
        let it = Itinerary::parse(REFERENCE_PREFIX).unwrap();
        let br = recover_interval(&it, &alpha, None).unwrap();
        assert_eq!(br.components(), 1);
        // inner starts at 0 (the first orbit point is 1-labeled)
        assert!(br.inner[0].lo.scalar().is_zero());
        // the true interval [0, 1/4] sits between inner and outer
        let i = interval(&[("0", "1/4")]);
        assert_bracketed(&br, &i);
        // inner upper end is {54 alpha} ~ 0.23538
        let hi = br.inner[0].lo.scalar().add(&br.inner[0].len).unwrap();
        let expect = alpha.mul_int(54).unwrap().frac().unwrap();
        assert_eq!(hi, expect);
    }

    fn assert_bracketed(br: &IntervalBracket, truth: &IntervalSet) {
        // inner inside truth: every inner arc's endpoints are in truth, and
        // truth's arcs each contain at most one inner arc
        for arc in &br.inner {
            let lo = arc.lo.clone();
            let hi_s = arc.lo.scalar().add(&arc.len).unwrap();
            let hi = CirclePoint::reduce(&hi_s).unwrap();
            assert_ne!(
                truth.membership(&lo).unwrap(),
                crate::circle::Membership::Out
            );
            assert_ne!(
                truth.membership(&hi).unwrap(),
                crate::circle::Membership::Out
            );
        }
        // truth inside outer: each truth arc endpoint is in some outer arc
        for arc in truth.arcs() {
            let lo_pos = arc.lo.scalar();
            let hi_pos = arc.lo.scalar().add(&arc.len).unwrap().frac().unwrap();
            for pos in [lo_pos.clone(), hi_pos] {
                let d = br.distance_outside_outer(&pos).unwrap();
                assert!(d.is_zero(), "truth endpoint {pos} outside outer");
            }
        }
    }

    #[test]
    fn recover_interval_dense_limit() {
        let alpha = sc("(0+1*sqrt(2))/2");
        let i = interval(&[("0", "1/2")]);
        let it = generate(&alpha, &i, 10_000).unwrap();
        let br = recover_interval(&it, &alpha, None).unwrap();
        assert_eq!(br.components(), 1);
        let inner_len = &br.inner[0].len;
        // at n = 10^4 the inner arc is within ~1e-3 of the full length
        assert!(inner_len.compare(&sc("0.499")).unwrap() == Ordering::Greater);
        let outer_len = &br.outer[0].len;
        assert!(outer_len.compare(&sc("0.501")).unwrap() == Ordering::Less);
    }

    #[test]
    fn recover_interval_rejects_conflicting_duplicates() {
        // rational alpha repeats points: 1/3 has period 3, so bits 0 and 3
        // see the same point; conflicting labels are impossible
        let alpha = sc("1/3");
        let bits = Itinerary::parse("100010").unwrap();
        let r = recover_interval(&bits, &alpha, None);
        assert!(
            matches!(r, Err(Error::AmbiguousClustering { .. })),
            "got {r:?}"
        );
    }

    #[test]
    fn recover_interval_rejects_all_ones() {
        let alpha = sc("(0+1*sqrt(2))/2");
        let ones = Itinerary::parse("1111").unwrap();
        assert!(matches!(
            recover_interval(&ones, &alpha, None),
            Err(Error::AllOnes)
        ));
        let zeros = Itinerary::parse("0000").unwrap();
        assert!(matches!(
            recover_interval(&zeros, &alpha, None),
            Err(Error::AllZeros)
        ));
    }

    #[test]
    fn find_power_k_cases() {
        // alpha = sqrt2/2, I = [0,1/4]: [alpha] ~ 0.293 > 1/4, [2a] ~ 0.414,
        // [3a] ~ 0.121 < 1/4, so k = 3
        let alpha = sc("(0+1*sqrt(2))/2");
        let i = interval(&[("0", "1/4")]);
        let it = generate(&alpha, &i, 600).unwrap();
        assert_eq!(find_power_k(&it, 8).unwrap(), 3);
        // an itinerary already containing both doubles gives k = 1
        let easy = generate(&sc("(0+1*sqrt(3))/15"), &interval(&[("0", "1/4")]), 600).unwrap();
        assert_eq!(find_power_k(&easy, 8).unwrap(), 1);
        // k_max = 1 on alternating bits: not found
        let alt = Itinerary::parse("1010101010").unwrap();
        assert!(matches!(
            find_power_k(&alt, 1),
            Err(Error::NotFound { k_max: 1 })
        ));
    }

    #[test]
    fn candidate_set_contains_truth() {
        // [3 * sqrt2/2] = 3 sqrt2/2 - 2 ~ 0.12132
        let t = sc("(-4+3*sqrt(2))/2");
        let s = AlphaBracket {
            lo: t.clone(),
            hi: t.clone(),
            n_used: 0,
        };
        let cands = candidate_alphas(3, &s).unwrap();
        assert_eq!(cands.len(), 6);
        let truth = sc("(0+1*sqrt(2))/2");
        let mirror = Scalar::one().sub(&truth).unwrap();
        assert!(cands.iter().any(|c| c.contains(&truth).unwrap()));
        assert!(cands.iter().any(|c| c.contains(&mirror).unwrap()));
        // k = 1: the two candidates are [alpha] and 1-[alpha]
        let one_k = candidate_alphas(1, &s).unwrap();
        assert_eq!(one_k.len(), 2);
        assert!(one_k[0].contains(&t).unwrap());
        assert!(one_k[1].contains(&Scalar::one().sub(&t).unwrap()).unwrap());
    }

    #[test]
    fn exact_generator_survives_elimination() {
        let alpha = sc("(0+1*sqrt(3))/15");
        let i = interval(&[("0", "1/4")]);
        let it = generate(&alpha, &i, 400).unwrap();
        let cand = CandidateAlpha {
            lo: alpha.clone(),
            hi: alpha.clone(),
        };
        let res = eliminate_candidates(&it, &[cand]).unwrap();
        assert_eq!(res.survivors().len(), 1);
        assert_eq!(res.horizon, 400);
    }

    #[test]
    fn mirror_pair_survives_reference_prefix() {
        let alpha = sc("(0+1*sqrt(3))/15");
        let mirror = Scalar::one().sub(&alpha).unwrap();
        let it = Itinerary::parse(REFERENCE_PREFIX).unwrap();
        let cands = vec![
            CandidateAlpha {
                lo: alpha.clone(),
                hi: alpha.clone(),
            },
            CandidateAlpha {
                lo: mirror.clone(),
                hi: mirror.clone(),
            },
        ];
        let res = eliminate_candidates(&it, &cands).unwrap();
        assert_eq!(res.survivors().len(), 2, "mirror equivalence keeps both");
    }

    #[test]
    fn wrong_exact_candidate_is_eliminated() {
        let alpha = sc("(0+1*sqrt(3))/15");
        let i = interval(&[("0", "1/4")]);
        let it = generate(&alpha, &i, 400).unwrap();
        let wrong = sc("(0+1*sqrt(2))/5"); // ~0.2828, not the generator
        let cands = vec![
            CandidateAlpha {
                lo: alpha.clone(),
                hi: alpha.clone(),
            },
            CandidateAlpha {
                lo: wrong.clone(),
                hi: wrong.clone(),
            },
        ];
        let res = eliminate_candidates(&it, &cands).unwrap();
        assert!(res.candidates[0].survived());
        assert!(!res.candidates[1].survived());
    }

    #[test]
    fn power_pipeline_sqrt2_over_2() {
        let alpha = sc("(0+1*sqrt(2))/2");
        let i = interval(&[("0", "1/4")]);
        let it = generate(&alpha, &i, 10_000).unwrap();
        let res = recover_alpha_single(&it, 16).unwrap();
        assert_eq!(res.k_used, 3);
        assert_eq!(res.candidates.len(), 6);
        let survivors = res.survivors();
        assert_eq!(survivors.len(), 2, "exactly the mirror pair survives");
        let mirror = Scalar::one().sub(&alpha).unwrap();
        assert!(survivors.iter().any(|c| c.alpha.contains(&alpha).unwrap()));
        assert!(survivors.iter().any(|c| c.alpha.contains(&mirror).unwrap()));
    }

    #[test]
    fn length_estimate_reference_prefix() {
        let it = Itinerary::parse(REFERENCE_PREFIX).unwrap();
        let (point, _) = estimate_length(&it, None).unwrap();
        assert_eq!(point, sc("17/55"));
        // with the convergent 1/9 of sqrt3/15: S_9 = 3 and 1/4 lies inside
        let alpha = sc("(0+1*sqrt(3))/15");
        let c = Convergent::best_for(&alpha, 9).unwrap();
        assert_eq!((c.p, c.q), (1, 9));
        let (_, bracket) = estimate_length(&it, Some(&c)).unwrap();
        let (lo, hi) = bracket.unwrap();
        let quarter = sc("1/4");
        assert!(lo.compare(&quarter).unwrap() == Ordering::Less);
        assert!(hi.compare(&quarter).unwrap() == Ordering::Greater);
    }

    #[test]
    fn component_bounds() {
        assert_eq!(
            min_components_bound(2, false),
            ComponentBound {
                unconditional: 1,
                conditional: 1
            }
        );
        let b4 = min_components_bound(4, false);
        assert_eq!(b4.unconditional, 2);
        assert_eq!(min_components_bound(63, false).conditional, 3);
        assert_eq!(min_components_bound(63, true).unconditional, 3);
        assert_eq!(min_components_bound(0, false).conditional, 1);
    }

    #[test]
    fn periodic_input_refused() {
        let it = Itinerary::parse(&"10".repeat(100)).unwrap();
        assert!(matches!(
            recover_alpha_single(&it, 4),
            Err(Error::RationalSuspected { .. })
        ));
    }

    #[test]
    fn multi_interval_round_trip() {
        let alpha = sc("(-1+1*sqrt(2))"); // sqrt2 - 1
        let i = interval(&[("0.1", "0.2"), ("0.5", "0.7")]);
        let it = generate(&alpha, &i, 10_000).unwrap();
        let res = multi_interval_search(&it, 16, 4, 10_000).unwrap();
        assert_eq!(res.p_assumed, 2, "two components recovered");
        let survivors = res.survivors();
        assert!(!survivors.is_empty());
        let mirror = Scalar::one().sub(&alpha).unwrap();
        let found = survivors
            .iter()
            .any(|c| c.alpha.contains(&alpha).unwrap() || c.alpha.contains(&mirror).unwrap());
        assert!(
            found,
            "some survivor bracket contains the truth or its mirror"
        );
        // the surviving bracket sandwiches the true arcs
        for c in survivors {
            if c.alpha.contains(&alpha).unwrap() {
                let br = c.bracket.as_ref().expect("survivor carries a bracket");
                assert_eq!(br.components(), 2);
            }
        }
    }

    #[test]
    fn symmetric_interval_recovers_smallest_cell() {
        // bits from ((sqrt2-1)/2, I3) equal those of (sqrt2-1, [1/4,1/2]);
        // the diagonal search settles on the smallest consistent cell,
        // which is (k,p) = (2,1): no "11" exists at k = 1 since
        // [alpha'] = 0.414 exceeds the component length 1/4
        let a3 = sc("(-1+1*sqrt(2))/2");
        let i3 = interval(&[("1/8", "1/4"), ("5/8", "3/4")]);
        let it = generate(&a3, &i3, 6000).unwrap();
        let res = multi_interval_search(&it, 8, 3, 6000).unwrap();
        assert_eq!((res.k_used, res.p_assumed), (2, 1));
        let rep = sc("(-1+1*sqrt(2))"); // the symmetry-free representative
        let mirror = Scalar::one().sub(&rep).unwrap();
        assert!(res
            .survivors()
            .iter()
            .any(|c| c.alpha.contains(&rep).unwrap() || c.alpha.contains(&mirror).unwrap()));
    }

    #[test]
    fn bracket_width_monotone_in_prefix_length() {
        let alpha = sc("(0+1*sqrt(3))/15");
        let i = interval(&[("0", "1/4")]);
        let it = generate(&alpha, &i, 4000).unwrap();
        let mut last: Option<Scalar> = None;
        for n in [100usize, 500, 1000, 2000, 4000] {
            let w = bracket_sym_alpha(&it.prefix(n).unwrap())
                .unwrap()
                .width()
                .unwrap();
            if let Some(prev) = last {
                assert!(w.compare(&prev).unwrap() != Ordering::Greater);
            }
            last = Some(w);
        }
    }

    #[test]
    fn estimate_length_two_bits() {
        let it = Itinerary::parse("10").unwrap();
        let (point, bracket) = estimate_length(&it, None).unwrap();
        assert_eq!(point, sc("1/2"));
        assert!(bracket.is_none());
    }

    #[test]
    fn single_interval_input_through_multi_search() {
        let alpha = sc("(0+1*sqrt(3))/15");
        let i = interval(&[("0", "1/4")]);
        let it = generate(&alpha, &i, 4_000).unwrap();
        let res = multi_interval_search(&it, 8, 3, 4_000).unwrap();
        assert_eq!(res.p_assumed, 1);
        assert_eq!(res.k_used, 1);
        let survivors = res.survivors();
        assert!(survivors.iter().any(|c| c.alpha.contains(&alpha).unwrap()));
    }
}
