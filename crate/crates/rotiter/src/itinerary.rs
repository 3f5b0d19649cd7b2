//! Itinerary generation for rigid rotations, subsampling, and run/gap
//! statistics with the three-gap consistency check.
//!
//! Every emitted bit is certified: on the exact backend each point {i*alpha}
//! is an exact surd, on the certified backend generation refines precision
//! until the membership of every iterate is unambiguous, and aborts rather
//! than guess.

use crate::circle::{CirclePoint, IntervalSet, Membership};
use crate::error::{Error, Result};
use crate::scalar::surd::Surd;
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, Default)]
pub struct Provenance {
    pub alpha: Option<String>,
    pub interval: Option<String>,
    pub backend: Option<&'static str>,
    pub precision: Option<u32>,
}

/// A finite 0/1 itinerary. Equality compares the bits only; provenance is
/// bookkeeping.
#[derive(Clone, Debug)]
pub struct Itinerary {
    bits: Vec<bool>,
    pub meta: Option<Box<Provenance>>,
}

impl PartialEq for Itinerary {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

impl Eq for Itinerary {}

impl Itinerary {
    pub fn from_bits(bits: Vec<bool>) -> Result<Itinerary> {
        if bits.is_empty() {
            return Err(Error::InsufficientData("empty itinerary".into()));
        }
        Ok(Itinerary { bits, meta: None })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn prefix(&self, n: usize) -> Result<Itinerary> {
        Itinerary::from_bits(self.bits[..n.min(self.bits.len())].to_vec())
    }

    /// (a0, a_k, a_2k, ...): the itinerary of 0 under rotation by k*alpha.
    pub fn subsample(&self, k: usize) -> Result<Itinerary> {
        if k == 0 {
            return Err(Error::InsufficientData(
                "subsample step must be positive".into(),
            ));
        }
        Itinerary::from_bits(self.bits.iter().copied().step_by(k).collect())
    }

    /// Number of maximal blocks of `symbol` in the first n bits.
    pub fn block_count(&self, symbol: bool, n: usize) -> usize {
        let n = n.min(self.bits.len());
        let mut count = 0;
        let mut prev = !symbol;
        for &b in &self.bits[..n] {
            if b == symbol && prev != symbol {
                count += 1;
            }
            prev = b;
        }
        count
    }

    /// True when the pattern (symbol, symbol) occurs somewhere.
    pub fn has_double(&self, symbol: bool) -> bool {
        self.bits
            .windows(2)
            .any(|w| w[0] == symbol && w[1] == symbol)
    }

    /// ASCII form, '0'/'1' characters with no separators.
    pub fn as_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    /// Parses ASCII '0'/'1'; whitespace and newlines are ignored and lines
    /// beginning with '#' are comments.
    pub fn parse(text: &str) -> Result<Itinerary> {
        let mut bits = Vec::new();
        for line in text.lines() {
            let line = line.trim_start();
            if line.starts_with('#') {
                continue;
            }
            for c in line.chars() {
                match c {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    c if c.is_whitespace() => {}
                    c => {
                        return Err(Error::Parse(format!(
                            "unexpected character `{c}` in itinerary"
                        )))
                    }
                }
            }
        }
        Itinerary::from_bits(bits)
    }
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_string())
    }
}

/// Streaming bit source for the orbit of 0 under rotation by alpha,
/// relative to the closed set I. Chunks can be pulled lazily.
pub enum BitStream {
    Exact(ExactKernel),
    Generic(GenericOrbit),
}

impl BitStream {
    pub fn new(alpha: &Scalar, interval: &IntervalSet) -> Result<BitStream> {
        if let Some(k) = ExactKernel::try_new(alpha, interval)? {
            return Ok(BitStream::Exact(k));
        }
        Ok(BitStream::Generic(GenericOrbit::new(
            alpha.clone(),
            interval.clone(),
        )))
    }

    pub fn next_bit(&mut self) -> Result<bool> {
        match self {
            BitStream::Exact(k) => k.next_bit(),
            BitStream::Generic(g) => g.next_bit(),
        }
    }
}

impl Iterator for BitStream {
    type Item = Result<bool>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_bit())
    }
}

/// bits[i] = 1 iff {i*alpha} lies in I, for i = 0..n-1. Boundary hits count
/// as 1 (I is closed).
pub fn generate(alpha: &Scalar, interval: &IntervalSet, n: usize) -> Result<Itinerary> {
    if n == 0 {
        return Err(Error::InsufficientData("n must be positive".into()));
    }
    let mut stream = BitStream::new(alpha, interval)?;
    let mut bits = Vec::with_capacity(n);
    for _ in 0..n {
        bits.push(stream.next_bit()?);
    }
    let mut it = Itinerary::from_bits(bits)?;
    it.meta = Some(Box::new(Provenance {
        alpha: Some(alpha.to_string()),
        interval: Some(interval.to_string().replace('\n', "; ")),
        backend: Some(if matches!(stream, BitStream::Exact(_)) {
            "exact"
        } else {
            "certified"
        }),
        precision: None,
    }));
    Ok(it)
}

/// Integer pair (P, Q) meaning (P + Q*sqrt(d))/R for the kernel's fixed R, d.
type Pair = (i128, i128);

/// Specialized exact path: the orbit point, the step, and all arc endpoints
/// share one denominator and one radical, so each iterate costs a few
/// integer additions and sign tests with no re-normalization.
pub struct ExactKernel {
    r: i128,
    d: i128,
    x: Pair,
    step: Pair,
    arcs: Vec<(Pair, Pair)>, // (lo, len)
}

fn lcm(a: i128, b: i128) -> Option<i128> {
    let g = {
        let (mut x, mut y) = (a.abs(), b.abs());
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        x
    };
    (a / g).checked_mul(b)
}

impl ExactKernel {
    fn try_new(alpha: &Scalar, interval: &IntervalSet) -> Result<Option<ExactKernel>> {
        let mut surds: Vec<Surd> = Vec::new();
        let a = match alpha.as_exact() {
            Some(s) => s.frac()?,
            None => return Ok(None),
        };
        surds.push(a);
        for arc in interval.arcs() {
            match (arc.lo.scalar().as_exact(), arc.len.as_exact()) {
                (Some(lo), Some(len)) => {
                    surds.push(*lo);
                    surds.push(*len);
                }
                _ => return Ok(None),
            }
        }
        let mut d = 0i128;
        for s in &surds {
            if s.radicand() != 0 {
                if d == 0 {
                    d = s.radicand();
                } else if d != s.radicand() {
                    return Ok(None); // mixed radicals: generic path
                }
            }
        }
        let mut r = 1i128;
        for s in &surds {
            r = lcm(r, s.denom()).ok_or(Error::Overflow("kernel lcm"))?;
        }
        let pair = |s: &Surd| -> Result<Pair> {
            let f = r / s.denom();
            Ok((
                s.numer()
                    .checked_mul(f)
                    .ok_or(Error::Overflow("kernel scale"))?,
                s.surd_coeff()
                    .checked_mul(f)
                    .ok_or(Error::Overflow("kernel scale"))?,
            ))
        };
        let step = pair(&surds[0])?;
        let mut arcs = Vec::with_capacity(interval.arc_count());
        for chunk in surds[1..].chunks_exact(2) {
            arcs.push((pair(&chunk[0])?, pair(&chunk[1])?));
        }
        Ok(Some(ExactKernel {
            r,
            d,
            x: (0, 0),
            step,
            arcs,
        }))
    }

    #[inline]
    fn sign(&self, v: Pair) -> std::cmp::Ordering {
        Surd::sign_of_pair(v.0, v.1, self.d)
    }

    fn next_bit(&mut self) -> Result<bool> {
        use std::cmp::Ordering::*;
        let mut inside = false;
        for (lo, len) in &self.arcs {
            let mut w = (
                self.x
                    .0
                    .checked_sub(lo.0)
                    .ok_or(Error::Overflow("kernel sub"))?,
                self.x
                    .1
                    .checked_sub(lo.1)
                    .ok_or(Error::Overflow("kernel sub"))?,
            );
            if Surd::sign_of_pair(w.0, w.1, self.d) == Less {
                w.0 =
                    w.0.checked_add(self.r)
                        .ok_or(Error::Overflow("kernel wrap"))?;
            }
            // closed arc: 0 <= w <= len
            let rel = (
                len.0
                    .checked_sub(w.0)
                    .ok_or(Error::Overflow("kernel cmp"))?,
                len.1
                    .checked_sub(w.1)
                    .ok_or(Error::Overflow("kernel cmp"))?,
            );
            if self.sign(rel) != Less {
                inside = true;
                break;
            }
        }
        // advance x by the step, reducing mod 1
        self.x.0 = self
            .x
            .0
            .checked_add(self.step.0)
            .ok_or(Error::Overflow("kernel step"))?;
        self.x.1 = self
            .x
            .1
            .checked_add(self.step.1)
            .ok_or(Error::Overflow("kernel step"))?;
        let over = (self.x.0 - self.r, self.x.1);
        if self.sign(over) != Less {
            self.x = over;
        }
        Ok(inside)
    }
}

/// Generic orbit: fresh {i*alpha} per iterate, membership via the interval
/// set with certified refinement.
pub struct GenericOrbit {
    alpha: Scalar,
    interval: IntervalSet,
    i: u64,
}

impl GenericOrbit {
    fn new(alpha: Scalar, interval: IntervalSet) -> GenericOrbit {
        GenericOrbit {
            alpha,
            interval,
            i: 0,
        }
    }

    fn next_bit(&mut self) -> Result<bool> {
        // the orbit starts at 0 exactly, whatever the backend of alpha
        let point = if self.i == 0 {
            CirclePoint::zero()
        } else {
            CirclePoint::reduce(&self.alpha.mul_int(self.i as i128)?)?
        };
        self.i += 1;
        match self.interval.membership(&point)? {
            Membership::Ambiguous => Err(Error::PrecisionExhausted {
                bits: crate::scalar::precision_cap(),
                context: format!("membership of iterate {} is ambiguous", self.i - 1),
            }),
            m => Ok(m.as_bit().unwrap()),
        }
    }
}

/// Run/gap statistics for one symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapSpectrum {
    pub symbol: bool,
    /// gap value -> multiplicity, where the gap between consecutive
    /// occurrences at i < j (none between) is j - i - 1
    pub gaps: BTreeMap<usize, usize>,
    /// maximal-run length -> multiplicity for the same symbol
    pub runs: BTreeMap<usize, usize>,
    /// distinct maximal 1-run lengths, not counting the initial run when
    /// bit 0 is a 1
    pub b_distinct: usize,
}

impl GapSpectrum {
    pub fn distinct_gaps(&self) -> Vec<usize> {
        self.gaps.keys().copied().collect()
    }

    pub fn distinct_runs(&self) -> Vec<usize> {
        self.runs.keys().copied().collect()
    }
}

fn run_lengths(bits: &[bool], symbol: bool) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut cur = 0usize;
    for &b in bits {
        if b == symbol {
            cur += 1;
        } else if cur > 0 {
            runs.push(cur);
            cur = 0;
        }
    }
    if cur > 0 {
        runs.push(cur);
    }
    runs
}

pub fn gap_spectrum(it: &Itinerary, symbol: bool) -> Result<GapSpectrum> {
    let bits = it.bits();
    let occurrences: Vec<usize> = bits
        .iter()
        .enumerate()
        .filter(|(_, b)| **b == symbol)
        .map(|(i, _)| i)
        .collect();
    if occurrences.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "symbol {} occurs {} time(s); need at least 2",
            symbol as u8,
            occurrences.len()
        )));
    }
    let mut gaps = BTreeMap::new();
    for w in occurrences.windows(2) {
        *gaps.entry(w[1] - w[0] - 1).or_insert(0) += 1;
    }
    let mut runs = BTreeMap::new();
    for r in run_lengths(bits, symbol) {
        *runs.entry(r).or_insert(0) += 1;
    }
    // B counts distinct 1-run lengths, skipping the initial block when the
    // itinerary opens with a 1
    let mut one_runs = run_lengths(bits, true);
    if bits[0] && !one_runs.is_empty() {
        one_runs.remove(0);
    }
    one_runs.sort_unstable();
    one_runs.dedup();
    Ok(GapSpectrum {
        symbol,
        gaps,
        runs,
        b_distinct: one_runs.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThreeGapVerdict {
    /// At most three distinct gap values, and when exactly three occur the
    /// largest is the sum of the other two plus one.
    Pass {
        distinct: Vec<usize>,
    },
    Fail {
        distinct: Vec<usize>,
    },
}

impl ThreeGapVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ThreeGapVerdict::Pass { .. })
    }

    pub fn distinct(&self) -> &[usize] {
        match self {
            ThreeGapVerdict::Pass { distinct } | ThreeGapVerdict::Fail { distinct } => distinct,
        }
    }
}

/// Necessary condition from the three-distance structure: a failure proves
/// the sequence is not a single-interval rotation itinerary; a pass is
/// necessary-only on a finite prefix.
pub fn three_gap_check(g: &GapSpectrum) -> ThreeGapVerdict {
    let distinct = g.distinct_gaps();
    match distinct.len() {
        0 => ThreeGapVerdict::Fail { distinct },
        1 | 2 => ThreeGapVerdict::Pass { distinct },
        3 => {
            let (a, b, c) = (distinct[0], distinct[1], distinct[2]);
            if c == a + b + 1 {
                ThreeGapVerdict::Pass { distinct }
            } else {
                ThreeGapVerdict::Fail { distinct }
            }
        }
        _ => ThreeGapVerdict::Fail { distinct },
    }
}

/// Smallest period of the window covering at least two full repetitions,
/// via the KMP failure function. None when no period repeats twice.
fn window_period(s: &[bool], limit: usize) -> Option<usize> {
    let m = s.len();
    if m < 2 {
        return None;
    }
    let mut fail = vec![0usize; m + 1];
    let mut k = 0usize;
    for i in 1..m {
        while k > 0 && s[i] != s[k] {
            k = fail[k];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    let period = m - fail[m];
    if period <= limit && m >= 2 * period {
        Some(period)
    } else {
        None
    }
}

/// Detects eventual periodicity with period at most n/3: the period of the
/// trailing two thirds must be confirmed twice, at length n/2 and again at
/// the full length. A single quasi-periodic stretch of an irrational
/// itinerary will not repeat the same period at both scales; a rational
/// generator confirms at every scale.
pub fn eventually_periodic(it: &Itinerary) -> Option<usize> {
    let n = it.len();
    if n < 12 {
        return None;
    }
    let limit = n / 3;
    let full = window_period(&it.bits()[n / 3..], limit)?;
    let half = window_period(&it.bits()[n / 6..n / 2], limit)?;
    if full == half {
        Some(full)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    pub(crate) fn interval(pairs: &[(&str, &str)]) -> IntervalSet {
        let v: Vec<(Scalar, Scalar)> = pairs
            .iter()
            .map(|(a, b)| (parse_scalar(a).unwrap(), parse_scalar(b).unwrap()))
            .collect();
        IntervalSet::from_endpoint_pairs(&v).unwrap()
    }

    const REFERENCE_PREFIX: &str = "1110000001100000001100000011100000011000000011000000111";

    #[test]
    fn reference_itinerary_reproduced() {
        let alpha = parse_scalar("(0+1*sqrt(3))/15").unwrap();
        let i = interval(&[("0", "1/4")]);
        let it = generate(&alpha, &i, 55).unwrap();
        assert_eq!(it.as_string(), REFERENCE_PREFIX);
    }

    #[test]
    fn first_bit_is_one_when_zero_in_interval() {
        let alpha = parse_scalar("(0+1*sqrt(2))/2").unwrap();
        let i = interval(&[("0", "1/2")]);
        let it = generate(&alpha, &i, 1).unwrap();
        assert_eq!(it.as_string(), "1");
    }

    #[test]
    fn sqrt2_over_2_oracle_bits() {
        // independent oracle: evaluate each {i*sqrt(2)/2} as an exact surd
        // and test membership in [0,1/4] directly
        let alpha = parse_scalar("(0+1*sqrt(2))/2").unwrap();
        let i = interval(&[("0", "1/4")]);
        let mut expected = String::new();
        for k in 0..8i128 {
            let point = CirclePoint::reduce(&alpha.mul_int(k).unwrap()).unwrap();
            let m = i.membership(&point).unwrap();
            expected.push(if m.as_bit().unwrap() { '1' } else { '0' });
        }
        assert_eq!(expected, "10010010");
        let it = generate(&alpha, &i, 8).unwrap();
        assert_eq!(it.as_string(), expected);
    }

    #[test]
    fn boundary_hit_counts_as_one() {
        // alpha = 1/8, I = [1/4, 1/2]: iterate 2 lands exactly on 1/4
        let alpha = parse_scalar("1/8").unwrap();
        let i = interval(&[("1/4", "1/2")]);
        let it = generate(&alpha, &i, 5).unwrap();
        assert_eq!(it.as_string(), "00111");
    }

    #[test]
    fn subsample_identity_and_consistency() {
        let alpha = parse_scalar("(0+1*sqrt(3))/15").unwrap();
        let i = interval(&[("0", "1/4")]);
        let it = generate(&alpha, &i, 60).unwrap();
        assert_eq!(it.subsample(1).unwrap(), it);
        // subsample(generate(alpha, I, k*n), k) = generate({k*alpha}, I, n)
        for k in [2usize, 3, 5] {
            let sub = it.subsample(k).unwrap();
            let ka = alpha.mul_int(k as i128).unwrap().frac().unwrap();
            let direct = generate(&ka, &i, sub.len()).unwrap();
            assert_eq!(sub.bits(), direct.bits(), "k = {k}");
        }
    }

    #[test]
    fn reference_gap_spectra() {
        let it = Itinerary::parse(REFERENCE_PREFIX).unwrap();
        let ones = gap_spectrum(&it, true).unwrap();
        assert_eq!(ones.distinct_gaps(), vec![0, 6, 7]);
        let zeros = gap_spectrum(&it, false).unwrap();
        assert_eq!(zeros.distinct_gaps(), vec![0, 2, 3]);
        assert_eq!(ones.b_distinct, 2);
        assert!(three_gap_check(&ones).passed());
        assert!(three_gap_check(&zeros).passed());
    }

    #[test]
    fn all_ones_run_statistics() {
        let it = Itinerary::parse("1111").unwrap();
        let g = gap_spectrum(&it, true).unwrap();
        assert_eq!(g.distinct_gaps(), vec![0]);
        assert_eq!(g.distinct_runs(), vec![4]);
        assert_eq!(g.b_distinct, 0);
    }

    #[test]
    fn three_gap_failures() {
        let mut gaps = BTreeMap::new();
        for v in [1usize, 2, 5] {
            gaps.insert(v, 1usize);
        }
        let g = GapSpectrum {
            symbol: true,
            gaps,
            runs: BTreeMap::new(),
            b_distinct: 0,
        };
        assert!(!three_gap_check(&g).passed());
        let mut gaps = BTreeMap::new();
        for v in [0usize, 6, 7] {
            gaps.insert(v, 1usize);
        }
        let g = GapSpectrum {
            symbol: true,
            gaps,
            runs: BTreeMap::new(),
            b_distinct: 0,
        };
        assert!(three_gap_check(&g).passed());
    }

    #[test]
    fn parse_ignores_comments_and_whitespace() {
        let it = Itinerary::parse("# header\n 101\n01\n").unwrap();
        assert_eq!(it.as_string(), "10101");
        assert!(Itinerary::parse("10a1").is_err());
    }

    #[test]
    fn periodicity_detector() {
        let it = Itinerary::parse("101010101010101010101010").unwrap();
        assert_eq!(eventually_periodic(&it), Some(2));
        let alpha = parse_scalar("(0+1*sqrt(3))/15").unwrap();
        let i = interval(&[("0", "1/4")]);
        let gen = generate(&alpha, &i, 400).unwrap();
        assert_eq!(eventually_periodic(&gen), None);
    }

    #[test]
    fn certified_backend_matches_exact() {
        use crate::scalar::CertifiedReal;
        let exact = parse_scalar("(0+1*sqrt(3))/15").unwrap();
        let i = interval(&[("0", "1/4")]);
        let want = generate(&exact, &i, 120).unwrap();
        let cert = Scalar::Certified(CertifiedReal::from_surd(
            exact.as_exact().unwrap(),
            crate::scalar::DEFAULT_PRECISION,
        ));
        let got = generate(&cert, &i, 120).unwrap();
        assert_eq!(got.bits(), want.bits());
        assert_eq!(got.meta.as_ref().unwrap().backend, Some("certified"));
    }
}
