//! Circle diffeomorphisms given by lifts: rotation-number estimation,
//! certified itinerary generation, and the reduction to a rigid rotation
//! through the conjugacy guaranteed by an irrational rotation number.
//!
//! Diffeos are restricted to named parametric families with known-smooth
//! lifts, so monotonicity and the degree-1 identity are checkable:
//!   affine    F(x) = x + omega
//!   standard  F(x) = x + omega + (beta/2pi) sin(2pi x),  |beta| < 1
//!
//! Orbits of the standard family are computed in high-precision arithmetic
//! with per-step error transport through the local derivative bound
//! |F'(y)| <= |1 + beta cos(2pi x)| + 2pi |beta| r on the enclosing ball,
//! raising precision until every membership over the horizon is
//! unambiguous.

use crate::circle::{CirclePoint, IntervalSet, Membership};
use crate::error::{Error, Result};
use crate::itinerary::{generate, Itinerary, Provenance};
use crate::recovery::{self, AlphaBracket, IntervalBracket, RecoveryResult};
use crate::scalar::ball::{bigfloat_to_f64, dyadic_approx, Ball};
use crate::scalar::{precision_cap, Rad, Scalar};
use astro_float::BigFloat;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug)]
pub enum DiffeoSpec {
    Affine { omega: Scalar },
    Standard { omega: Scalar, beta: Scalar },
}

impl DiffeoSpec {
    /// Checks the family constraints: the standard lift is a strictly
    /// increasing degree-1 lift exactly when |beta| < 1.
    pub fn validate(&self) -> Result<()> {
        match self {
            DiffeoSpec::Affine { .. } => Ok(()),
            DiffeoSpec::Standard { beta, .. } => {
                let one = Scalar::one();
                let abs_ok = beta.compare(&one)? == Ordering::Less
                    && beta.compare(&one.neg())? == Ordering::Greater;
                if abs_ok {
                    Ok(())
                } else {
                    Err(Error::InvalidLift(
                        "standard family needs |beta| < 1 for a monotone lift".into(),
                    ))
                }
            }
        }
    }

    pub fn omega(&self) -> &Scalar {
        match self {
            DiffeoSpec::Affine { omega } | DiffeoSpec::Standard { omega, .. } => omega,
        }
    }
}

impl fmt::Display for DiffeoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffeoSpec::Affine { omega } => write!(f, "affine omega={omega}"),
            DiffeoSpec::Standard { omega, beta } => {
                write!(f, "standard omega={omega} beta={beta}")
            }
        }
    }
}

impl FromStr for DiffeoSpec {
    type Err = Error;

    /// "affine omega=<scalar>" | "standard omega=<scalar> beta=<scalar>"
    fn from_str(s: &str) -> Result<DiffeoSpec> {
        let mut words = s.split_whitespace();
        let family = words
            .next()
            .ok_or_else(|| Error::Parse("empty diffeo spec".into()))?;
        let mut omega = None;
        let mut beta = None;
        for w in words {
            let (key, val) = w
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{w}`")))?;
            let v = crate::scalar::parse_scalar(val)?;
            match key {
                "omega" => omega = Some(v),
                "beta" => beta = Some(v),
                _ => return Err(Error::Parse(format!("unknown diffeo parameter `{key}`"))),
            }
        }
        let omega = omega.ok_or_else(|| Error::Parse("missing omega".into()))?;
        let spec = match family {
            "affine" => {
                if beta.is_some() {
                    return Err(Error::Parse("affine family has no beta".into()));
                }
                DiffeoSpec::Affine { omega }
            }
            "standard" => DiffeoSpec::Standard {
                omega,
                beta: beta.ok_or_else(|| Error::Parse("missing beta".into()))?,
            },
            other => return Err(Error::Parse(format!("unknown family `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One orbit of the standard-family lift at working precision p: midpoints
/// are unreduced lift values, the radius is transported through the local
/// derivative bound.
struct LiftOrbit {
    x: BigFloat,
    rad: Rad,
    omega: Ball,
    beta_over_2pi: Ball,
    beta_f64: f64,
    p: u32,
}

impl LiftOrbit {
    fn new(omega: &Scalar, beta: &Scalar, x0: &Scalar, p: u32) -> LiftOrbit {
        let two_pi = crate::scalar::ball::with_consts(|cc| {
            cc.pi(p as usize, astro_float::RoundingMode::ToEven)
        })
        .mul(
            &BigFloat::from_i64(2, 64),
            p as usize,
            astro_float::RoundingMode::ToEven,
        );
        let beta_ball = beta.to_ball(p);
        let beta_over_2pi = beta_ball
            .div(
                &Ball {
                    mid: two_pi,
                    rad: Rad::pow2(-(p as i64) + 3),
                },
                p,
            )
            .expect("2 pi is certified nonzero");
        let x0_ball = x0.to_ball(p);
        LiftOrbit {
            x: x0_ball.mid,
            rad: x0_ball.rad,
            omega: omega.to_ball(p),
            beta_over_2pi,
            beta_f64: beta.to_f64(),
            p,
        }
    }

    /// Circle position (reduced midpoint) with the current radius.
    fn point(&self) -> Ball {
        let pp = self.p as usize;
        let g = self
            .x
            .sub(&self.x.floor(), pp, astro_float::RoundingMode::ToEven);
        Ball {
            mid: g,
            rad: self.rad.add(Rad::pow2(-(self.p as i64) + 2)),
        }
    }

    fn step(&mut self) {
        let pp = self.p as usize;
        let rm = astro_float::RoundingMode::ToEven;
        let g = self.x.sub(&self.x.floor(), pp, rm);
        let s = Ball {
            mid: g.clone(),
            rad: Rad::ZERO,
        }
        .sin2pi(self.p);
        let c = Ball {
            mid: g,
            rad: Rad::ZERO,
        }
        .cos2pi(self.p);
        // local Lipschitz bound |F'| <= |1 + beta cos(2pi x)| + 2pi|beta| r,
        // evaluated with generous f64 head-room
        let lip_f = (1.0 + self.beta_f64 * bigfloat_to_f64(&c.mid)).abs() * (1.0 + 1e-9) + 1e-9;
        let lip = Rad::from_f64_upper(lip_f).add(self.rad.mul_pow2(3));
        let term = self.beta_over_2pi.mul(&s, self.p);
        let next = self.x.add(&self.omega.mid, pp, rm).add(&term.mid, pp, rm);
        // per-step evaluation error: input radii of omega and the sine
        // term, plus rounding of the two additions at the lift's magnitude
        let ulp_slack = Rad::pow2(next.exponent().unwrap_or(4) as i64 - self.p as i64 + 2);
        let eval = self.omega.rad.add(term.rad).add(ulp_slack);
        self.rad = self.rad.mul(lip).add(eval);
        self.x = next;
    }
}

/// Runs n steps of the lift from x0 and returns (displacement ball,
/// per-iterate circle points if requested).
fn run_standard_orbit(
    omega: &Scalar,
    beta: &Scalar,
    x0: &Scalar,
    n: usize,
    p: u32,
    collect: bool,
) -> (Ball, Vec<Ball>) {
    let mut orbit = LiftOrbit::new(omega, beta, x0, p);
    let start = orbit.x.clone();
    let mut points = Vec::with_capacity(if collect { n } else { 0 });
    for _ in 0..n {
        if collect {
            points.push(orbit.point());
        }
        orbit.step();
    }
    let pp = p as usize;
    let disp = orbit.x.sub(&start, pp, astro_float::RoundingMode::ToEven);
    let rad = orbit.rad.add(Rad::pow2(
        disp.exponent().unwrap_or(4) as i64 - p as i64 + 1,
    ));
    (Ball { mid: disp, rad }, points)
}

/// Rotation-number enclosure from n iterates of the lift.
#[derive(Clone, Debug)]
pub struct RotationNumberEstimate {
    pub lo: Scalar,
    pub hi: Scalar,
    pub n: usize,
}

impl RotationNumberEstimate {
    /// hi - lo; equals 2/n up to the orbit evaluation granularity
    /// (below 2^-100), and exactly 2/n for the affine family.
    pub fn width(&self) -> Result<Scalar> {
        self.hi.sub(&self.lo)
    }

    pub fn midpoint(&self) -> Result<Scalar> {
        self.lo.add(&self.hi)?.div_int(2)
    }

    pub fn contains(&self, v: &Scalar) -> Result<bool> {
        Ok(self.lo.compare(v)? != Ordering::Greater && self.hi.compare(v)? != Ordering::Less)
    }
}

/// (F^n(x0) - x0)/n with the rigorous +-1/n displacement enclosure for
/// degree-1 monotone lifts: n*rho always lies within 1 of the displacement.
pub fn rotation_number(
    f: &DiffeoSpec,
    x0: &CirclePoint,
    n: usize,
) -> Result<RotationNumberEstimate> {
    f.validate()?;
    if n == 0 {
        return Err(Error::InsufficientData("n must be positive".into()));
    }
    let n_i = n as i128;
    match f {
        DiffeoSpec::Affine { omega } => {
            // the displacement is exactly n*omega
            let inv = Scalar::from_ratio(1, n_i)?;
            Ok(RotationNumberEstimate {
                lo: omega.sub(&inv)?,
                hi: omega.add(&inv)?,
                n,
            })
        }
        DiffeoSpec::Standard { omega, beta } => {
            let cap = precision_cap();
            let mut p = crate::scalar::default_precision().max(128);
            loop {
                let (disp, _) = run_standard_orbit(omega, beta, x0.scalar(), n, p, false);
                // demand displacement certainty far below the 1/n slack
                if disp.rad.less_than_pow2(-100) {
                    let (num, den) = dyadic_approx(&disp.mid, 90)
                        .ok_or(Error::Overflow("displacement out of range"))?;
                    // widen by two grid cells per side: dyadic rounding and
                    // the orbit radius both sit below 2^-89
                    let d_lo = Scalar::from_ratio(num - 2, den)?;
                    let d_hi = Scalar::from_ratio(num + 2, den)?;
                    let inv = Scalar::from_ratio(1, n_i)?;
                    return Ok(RotationNumberEstimate {
                        lo: d_lo.div_int(n_i)?.sub(&inv)?,
                        hi: d_hi.div_int(n_i)?.add(&inv)?,
                        n,
                    });
                }
                if p >= cap {
                    return Err(Error::PrecisionExhausted {
                        bits: cap,
                        context: "orbit displacement radius would not shrink".into(),
                    });
                }
                p = (p * 2).min(cap);
            }
        }
    }
}

/// bits[i] = 1 iff f^i(0) lies in I, with certified membership for every
/// iterate; precision rises until the whole horizon is unambiguous.
pub fn generate_diffeo_itinerary(
    f: &DiffeoSpec,
    interval: &IntervalSet,
    n: usize,
) -> Result<Itinerary> {
    f.validate()?;
    if n == 0 {
        return Err(Error::InsufficientData("n must be positive".into()));
    }
    match f {
        DiffeoSpec::Affine { omega } => generate(omega, interval, n),
        DiffeoSpec::Standard { omega, beta } => {
            let cap = precision_cap();
            let mut p = crate::scalar::default_precision().max(128);
            'ladder: loop {
                let (_, points) = run_standard_orbit(omega, beta, &Scalar::zero(), n, p, true);
                let mut bits = Vec::with_capacity(n);
                for (i, ball) in points.into_iter().enumerate() {
                    let sc = if i == 0 {
                        Scalar::zero()
                    } else {
                        Scalar::Certified(crate::scalar::CertifiedReal::opaque(ball, p))
                    };
                    let z = CirclePoint::reduce(&sc)?;
                    match interval.membership(&z)? {
                        Membership::Ambiguous => {
                            if p >= cap {
                                return Err(Error::PrecisionExhausted {
                                    bits: cap,
                                    context: format!("iterate {i} stays ambiguous"),
                                });
                            }
                            p = (p * 2).min(cap);
                            continue 'ladder;
                        }
                        m => bits.push(m.as_bit().unwrap()),
                    }
                }
                let mut it = Itinerary::from_bits(bits)?;
                it.meta = Some(Box::new(Provenance {
                    alpha: Some(f.to_string()),
                    interval: Some(interval.to_string().replace('\n', "; ")),
                    backend: Some("certified"),
                    precision: Some(p),
                }));
                return Ok(it);
            }
        }
    }
}

/// The interval set seen by the conjugated rigid rotation: delegates to the
/// rotation-side reconstruction with the diffeo's itinerary.
pub fn induced_rotation_interval(it: &Itinerary, alpha: &Scalar) -> Result<IntervalBracket> {
    recovery::recover_interval(it, alpha, None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DenjoyVerdict {
    /// no provable conflict anywhere in the horizon
    Consistent { horizon: usize },
    /// first itinerary index whose bit provably contradicts every rotation
    /// itinerary compatible with the estimated rotation number
    Inconsistent { index: usize },
}

/// Checks that the observed itinerary is bracket-consistent with a rigid
/// rotation by the estimated rotation number: each half of the data
/// reconstructs an interval bracket that the other half must respect,
/// within the drift slack of the rotation-number enclosure. Exactness is
/// impossible from finite data; "consistent" means no provable conflict.
pub fn verify_denjoy_reduction(
    f: &DiffeoSpec,
    interval: &IntervalSet,
    n: usize,
) -> Result<DenjoyVerdict> {
    let it = generate_diffeo_itinerary(f, interval, n)?;
    verify_denjoy_reduction_bits(f, &it, interval.arc_count())
}

/// The same check against externally supplied bits (mutation testing and
/// corrupted-data audits).
pub fn verify_denjoy_reduction_bits(
    f: &DiffeoSpec,
    it: &Itinerary,
    assumed_components: usize,
) -> Result<DenjoyVerdict> {
    f.validate()?;
    let n = it.len();
    if n < 8 {
        return Err(Error::InsufficientData("need at least 8 bits".into()));
    }
    if it.count_ones() == 0 || it.count_ones() == n {
        return Err(Error::InsufficientData(
            "constant itineraries carry no reduction evidence".into(),
        ));
    }
    // rotation number to a slack that keeps positional drift well under
    // the reconstruction windows' point spacing
    let n_rho = (200 * n).clamp(20_000, 2_000_000);
    let rho = rotation_number(f, &CirclePoint::zero(), n_rho)?;
    let alpha_hat = to_exact_rational(&rho.midpoint()?)?.frac()?;
    // slack per index: the full enclosure width is a safe upper bound on
    // the distance from the midpoint to the true rotation number
    let h = to_exact_rational_upper(&rho.width()?)?;
    let h_f = h.to_f64().max(1e-300);

    // three reconstruction windows so a corruption anywhere lands in some
    // test range with a clean training window: a head window (small drift,
    // spacing-limited), a second window right after it (covers head
    // corruptions with a precise witness), and a tail window (drift up to
    // n*h, kept under the window's spacing)
    let head = (((1.0 / (32.0 * h_f)).sqrt() as usize).max(8)).min(n / 2);
    let second_end = (3 * head).min(n / 2).max(head + 1);
    let tail = ((1.0 / (32.0 * (n as f64) * h_f)) as usize).clamp(8, n / 2);
    let ranges = [
        (0..head, head..n),
        (head..second_end, 0..head),
        (n - tail..n, 0..n - tail),
    ];
    let mut structural_break: Option<usize> = None;
    for (train, test) in ranges {
        let train_start = train.start;
        match check_half(it, &alpha_hat, &h, train, test, assumed_components)? {
            HalfOutcome::Conflict(i) => return Ok(DenjoyVerdict::Inconsistent { index: i }),
            HalfOutcome::CountExceeded => {
                // the window alone certifies more components than assumed; a
                // witness from the other pass is preferred when one exists
                structural_break.get_or_insert(train_start);
            }
            HalfOutcome::Clean | HalfOutcome::Undecidable => {}
        }
    }
    match structural_break {
        Some(index) => Ok(DenjoyVerdict::Inconsistent { index }),
        None => Ok(DenjoyVerdict::Consistent { horizon: n }),
    }
}

/// 60-bit dyadic rounding of a scalar; i128 arithmetic stays exact through
/// the clustering that follows.
fn to_exact_rational(v: &Scalar) -> Result<Scalar> {
    match v {
        Scalar::Exact(_) => Ok(v.clone()),
        Scalar::Certified(c) => {
            let (num, den) = dyadic_approx(&c.ball.mid, 60).ok_or(Error::Overflow("dyadic"))?;
            Scalar::from_ratio(num, den)
        }
    }
}

fn to_exact_rational_upper(v: &Scalar) -> Result<Scalar> {
    match v {
        Scalar::Exact(_) => Ok(v.clone()),
        Scalar::Certified(c) => {
            let (num, den) = dyadic_approx(&c.ball.mid, 60).ok_or(Error::Overflow("dyadic"))?;
            Scalar::from_ratio(num + 2, den)
        }
    }
}

enum HalfOutcome {
    Clean,
    Conflict(usize),
    CountExceeded,
    Undecidable,
}

fn check_half(
    it: &Itinerary,
    alpha_hat: &Scalar,
    h: &Scalar,
    train: std::ops::Range<usize>,
    test: std::ops::Range<usize>,
    p_assumed: usize,
) -> Result<HalfOutcome> {
    // reconstruct from the training half at drifted positions {i*alpha}
    let train_bits: Vec<bool> = train.clone().map(|i| it.bit(i)).collect();
    let train_it = Itinerary::from_bits(train_bits)?;
    let bracket = match reconstruct_with_drift(&train_it, train.start, alpha_hat, h)? {
        Some(b) => b,
        None => return Ok(HalfOutcome::Undecidable),
    };
    if bracket.components() > p_assumed {
        return Ok(HalfOutcome::CountExceeded);
    }
    let run_inner = bracket.components() == p_assumed;
    let sigma = h.mul_int(train.end as i128)?;
    for i in test {
        let pos = alpha_hat.mul_int(i as i128)?.frac()?;
        let margin = h.mul_int(i as i128)?.add(&sigma)?;
        if it.bit(i) {
            let d = bracket.distance_outside_outer(&pos)?;
            if d.compare(&margin)? == Ordering::Greater {
                return Ok(HalfOutcome::Conflict(i));
            }
        } else if run_inner {
            let d = bracket.depth_inside_inner(&pos)?;
            if d.compare(&margin)? == Ordering::Greater {
                return Ok(HalfOutcome::Conflict(i));
            }
        }
    }
    Ok(HalfOutcome::Clean)
}

fn reconstruct_with_drift(
    bits: &Itinerary,
    index_offset: usize,
    alpha_hat: &Scalar,
    h: &Scalar,
) -> Result<Option<IntervalBracket>> {
    recovery::recover_interval_with_slack(bits, index_offset, alpha_hat, h)
}

/// The rotation-number family recoverable from an itinerary alone: run the
/// rotation recovery pretending the generator was rigid with a
/// symmetry-free interval set; the true rotation number then lies in
/// (m + [alpha'])/n for some integers m, n >= 1 (the data does not pin m
/// and n).
#[derive(Clone, Debug)]
pub struct RotationClassFamily {
    pub sym_alpha: AlphaBracket,
    pub recovery: RecoveryResult,
}

impl fmt::Display for RotationClassFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha = (m + [a'])/n for some integers m, n >= 1, with [a'] in [{}, {}]",
            self.sym_alpha.lo, self.sym_alpha.hi
        )
    }
}

pub fn recover_rotation_class(it: &Itinerary) -> Result<RotationClassFamily> {
    let result = recovery::recover_alpha_single(it, 64)
        .or_else(|_| recovery::multi_interval_search(it, 64, 4, it.len()))?;
    // symmetric reduction of the union of surviving candidate brackets
    let half = Scalar::from_ratio(1, 2)?;
    let one = Scalar::one();
    let mut lo: Option<Scalar> = None;
    let mut hi: Option<Scalar> = None;
    for cand in result.survivors() {
        let (mut a, mut b) = (cand.alpha.lo.clone(), cand.alpha.hi.clone());
        // fold [a,b] about 1/2 when it lies in the upper half
        if a.compare(&half)? != Ordering::Less {
            let na = one.sub(&b)?;
            let nb = one.sub(&a)?;
            a = na;
            b = nb;
        }
        if b.compare(&half)? == Ordering::Greater {
            b = half.clone();
        }
        lo = Some(match lo {
            None => a.clone(),
            Some(v) => {
                if a.compare(&v)? == Ordering::Less {
                    a.clone()
                } else {
                    v
                }
            }
        });
        hi = Some(match hi {
            None => b.clone(),
            Some(v) => {
                if b.compare(&v)? == Ordering::Greater {
                    b.clone()
                } else {
                    v
                }
            }
        });
    }
    let n_used = result.horizon;
    Ok(RotationClassFamily {
        sym_alpha: AlphaBracket {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            n_used,
        },
        recovery: result,
    })
}
