//! Command-line front end. Machine-readable output is line-oriented
//! key=value; diagnostics go to stderr. Exit codes: 0 success, 1
//! algorithmic refusal (e.g. every candidate eliminated), 2 usage or parse
//! error.

use crate::circle::{CirclePoint, IntervalSet};
use crate::diffeo::{self, DenjoyVerdict, DiffeoSpec};
use crate::error::Error;
use crate::itinerary::{self, Itinerary};
use crate::recovery::{self, Convergent, IntervalBracket, RecoveryResult};
use crate::scalar::{self, Scalar};
use crate::torus::{self, EquivalenceVerdict, TorusClass};
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "rotiter",
    about = "Certified itineraries of circle rotations and their inverse problems",
    version
)]
pub struct Cli {
    /// Working precision in bits for certified computations
    #[arg(long, global = true, default_value_t = 256)]
    pub precision_bits: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args)]
pub struct OutArg {
    /// Write the output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate the itinerary of 0 under rotation by alpha relative to I
    Gen {
        /// Rotation amount: "p/q" | decimal | "(p+q*sqrt(d))/r"
        #[arg(long)]
        alpha: String,
        /// Interval file: one arc per line as "lo hi", '#' comments
        #[arg(long)]
        intervals: PathBuf,
        /// Number of bits to generate
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Keep every k-th bit: the itinerary of the k-th power rotation
    Subsample {
        /// Itinerary file (ASCII 0/1, '#' comments)
        itinerary: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Gap/run spectra, the three-gap verdict, B, and component bounds
    Gaps { itinerary: PathBuf },
    /// Reconstruct inner/outer brackets for I given the rotation amount
    RecoverInterval {
        itinerary: PathBuf,
        #[arg(long)]
        alpha: String,
    },
    /// Recover the rotation amount (and interval brackets) from bits alone
    RecoverAlpha {
        itinerary: PathBuf,
        /// Search k-subsamples up to this power
        #[arg(long, default_value_t = 64)]
        k_max: usize,
        /// Multi-interval (k,p) search instead of the single-interval path
        #[arg(long)]
        multi: bool,
        /// Maximum number of interval components to hypothesize
        #[arg(long, default_value_t = 4)]
        p_max: usize,
        /// Prefix length that elimination must match (default: all bits)
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Empirical agreement fraction of two itineraries
    Compare {
        itinerary1: PathBuf,
        itinerary2: PathBuf,
    },
    /// Torus classification and predicted agreement for two parameter sets
    Predict {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        intervals: PathBuf,
        #[arg(long)]
        alpha2: String,
        #[arg(long)]
        intervals2: PathBuf,
        /// Coefficient bound for certified relation search
        #[arg(long, default_value_t = 100)]
        coeff_bound: i128,
    },
    /// Equivalence verdict for two parameter sets
    Equiv {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        intervals: PathBuf,
        #[arg(long)]
        alpha2: String,
        #[arg(long)]
        intervals2: PathBuf,
        /// Horizon for the distinctness witness search
        #[arg(long, default_value_t = 10_000)]
        horizon: usize,
    },
    /// Rotation-number enclosure of a circle diffeomorphism
    DiffeoRho {
        /// "affine omega=<scalar>" | "standard omega=<scalar> beta=<scalar>"
        #[arg(long)]
        diffeo: String,
        #[arg(long)]
        n: usize,
    },
    /// Itinerary of 0 under a circle diffeomorphism
    DiffeoGen {
        #[arg(long)]
        diffeo: String,
        #[arg(long)]
        intervals: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check the reduction of a diffeo itinerary to a rigid rotation
    DiffeoCheck {
        #[arg(long)]
        diffeo: String,
        #[arg(long)]
        intervals: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version on stdout with success
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    scalar::set_default_precision(cli.precision_bits);
    match dispatch(cli.command) {
        Ok(output) => {
            print!("{output}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::InvalidScalar(_) => 2,
                _ => 1,
            }
        }
    }
}

fn read_to_string(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_intervals(path: &PathBuf) -> Result<IntervalSet, Error> {
    IntervalSet::parse(&read_to_string(path)?)
}

fn load_itinerary(path: &PathBuf) -> Result<Itinerary, Error> {
    Itinerary::parse(&read_to_string(path)?)
}

fn emit(out: &OutArg, text: &str) -> Result<String, Error> {
    match &out.out {
        None => Ok(text.to_string()),
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
    }
}

fn arcs_field(arcs: &[crate::circle::CircleArc]) -> String {
    let mut s = String::new();
    for (i, a) in arcs.iter().enumerate() {
        if i > 0 {
            s.push(';');
        }
        let hi = a.lo.scalar().add(&a.len).and_then(|v| v.frac()).map(|v| {
            if v.is_zero() {
                Scalar::one()
            } else {
                v
            }
        });
        match hi {
            Ok(hi) => {
                let _ = write!(s, "{},{}", a.lo.scalar(), hi);
            }
            Err(_) => s.push('?'),
        }
    }
    s
}

fn bracket_report(br: &IntervalBracket) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "components={}", br.components());
    let _ = writeln!(s, "inner_arcs={}", arcs_field(&br.inner));
    let _ = writeln!(s, "outer_arcs={}", arcs_field(&br.outer));
    if let Some(sb) = &br.spacing_bound {
        let _ = writeln!(s, "spacing_bound={sb}");
    }
    s
}

fn recovery_report(res: &RecoveryResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "k={}", res.k_used);
    let _ = writeln!(s, "p={}", res.p_assumed);
    let _ = writeln!(s, "horizon={}", res.horizon);
    let _ = writeln!(s, "candidates={}", res.candidates.len());
    let survivors = res.survivors();
    let _ = writeln!(s, "survivors={}", survivors.len());
    // symmetric bracket for [alpha] from the union of the survivors
    let mut lo: Option<Scalar> = None;
    let mut hi: Option<Scalar> = None;
    for c in &survivors {
        let (a, b) = sym_fold(&c.alpha.lo, &c.alpha.hi);
        lo = Some(match lo {
            None => a.clone(),
            Some(v) => min_scalar(v, a),
        });
        hi = Some(match hi {
            None => b.clone(),
            Some(v) => max_scalar(v, b),
        });
    }
    if let (Some(lo), Some(hi)) = (lo, hi) {
        let _ = writeln!(s, "alpha_lo={lo}");
        let _ = writeln!(s, "alpha_hi={hi}");
    }
    for (i, c) in res.candidates.iter().enumerate() {
        let status = match c.eliminated_at {
            None => "survived".to_string(),
            Some(ix) => format!("eliminated:{ix}"),
        };
        let _ = writeln!(s, "candidate{}={},{},{}", i, c.alpha.lo, c.alpha.hi, status);
    }
    if let Some(c) = survivors.iter().find(|c| c.bracket.is_some()) {
        s.push_str(&bracket_report(c.bracket.as_ref().unwrap()));
    }
    s
}

fn sym_fold(lo: &Scalar, hi: &Scalar) -> (Scalar, Scalar) {
    let half = Scalar::from_ratio(1, 2).unwrap();
    let one = Scalar::one();
    let in_upper = matches!(lo.compare(&half), Ok(std::cmp::Ordering::Greater))
        || matches!(lo.compare(&half), Ok(std::cmp::Ordering::Equal));
    if in_upper {
        (
            one.sub(hi).unwrap_or_else(|_| lo.clone()),
            one.sub(lo).unwrap_or_else(|_| hi.clone()),
        )
    } else {
        let capped = if matches!(hi.compare(&half), Ok(std::cmp::Ordering::Greater)) {
            half
        } else {
            hi.clone()
        };
        (lo.clone(), capped)
    }
}

fn min_scalar(a: Scalar, b: Scalar) -> Scalar {
    if matches!(b.compare(&a), Ok(std::cmp::Ordering::Less)) {
        b
    } else {
        a
    }
}

fn max_scalar(a: Scalar, b: Scalar) -> Scalar {
    if matches!(b.compare(&a), Ok(std::cmp::Ordering::Greater)) {
        b
    } else {
        a
    }
}

fn spectrum_values(m: &std::collections::BTreeMap<usize, usize>) -> String {
    m.keys()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn dispatch(cmd: Command) -> Result<String, Error> {
    match cmd {
        Command::Gen {
            alpha,
            intervals,
            n,
            out,
        } => {
            let alpha = scalar::parse_scalar(&alpha)?;
            let iset = load_intervals(&intervals)?;
            let it = itinerary::generate(&alpha, &iset, n)?;
            emit(&out, &format!("{it}\n"))
        }
        Command::Subsample { itinerary, k, out } => {
            let it = load_itinerary(&itinerary)?;
            let sub = it.subsample(k)?;
            emit(&out, &format!("{sub}\n"))
        }
        Command::Gaps { itinerary } => {
            let it = load_itinerary(&itinerary)?;
            let ones = itinerary::gap_spectrum(&it, true)?;
            let zeros = itinerary::gap_spectrum(&it, false)?;
            let v1 = itinerary::three_gap_check(&ones);
            let v0 = itinerary::three_gap_check(&zeros);
            let both_pass = v1.passed() && v0.passed();
            let witnessed = it.has_double(false);
            let bound = recovery::min_components_bound(ones.b_distinct, witnessed);
            let mut s = String::new();
            let _ = writeln!(s, "gaps1={}", spectrum_values(&ones.gaps));
            let _ = writeln!(s, "gaps0={}", spectrum_values(&zeros.gaps));
            let _ = writeln!(s, "runs1={}", spectrum_values(&ones.runs));
            let _ = writeln!(s, "runs0={}", spectrum_values(&zeros.runs));
            let _ = writeln!(s, "threegap={}", if both_pass { "pass" } else { "fail" });
            let _ = writeln!(s, "B={}", ones.b_distinct);
            let _ = writeln!(s, "component_bound={}", bound.unconditional);
            let _ = writeln!(s, "component_bound_conditional={}", bound.conditional);
            Ok(s)
        }
        Command::RecoverInterval { itinerary, alpha } => {
            let it = load_itinerary(&itinerary)?;
            let alpha = scalar::parse_scalar(&alpha)?;
            let conv = alpha
                .as_exact()
                .and_then(|_| Convergent::best_for(&alpha, it.len() as i128).ok());
            let br = recovery::recover_interval(&it, &alpha, conv.as_ref())?;
            Ok(bracket_report(&br))
        }
        Command::RecoverAlpha {
            itinerary,
            k_max,
            multi,
            p_max,
            horizon,
        } => {
            let it = load_itinerary(&itinerary)?;
            let horizon = horizon.unwrap_or(it.len());
            let res = if multi {
                recovery::multi_interval_search(&it, k_max, p_max, horizon)?
            } else {
                recovery::recover_alpha_single(&it, k_max)?
            };
            let mut s = recovery_report(&res);
            if multi {
                let _ = writeln!(
                    s,
                    "note=consistent up to horizon only; finite data cannot certify"
                );
            }
            Ok(s)
        }
        Command::Compare {
            itinerary1,
            itinerary2,
        } => {
            let a = load_itinerary(&itinerary1)?;
            let b = load_itinerary(&itinerary2)?;
            let f = torus::empirical_agreement(&a, &b)?;
            let mut s = String::new();
            let _ = writeln!(s, "n={}", a.len());
            let _ = writeln!(s, "empirical={f}");
            Ok(s)
        }
        Command::Predict {
            alpha,
            intervals,
            alpha2,
            intervals2,
            coeff_bound,
        } => {
            let a1 = scalar::parse_scalar(&alpha)?;
            let a2 = scalar::parse_scalar(&alpha2)?;
            let i1 = load_intervals(&intervals)?;
            let i2 = load_intervals(&intervals2)?;
            let mut s = String::new();
            let class = torus::classify(&a1, &a2)?;
            match class {
                TorusClass::Periodic { period } => {
                    let _ = writeln!(s, "kind=periodic");
                    let _ = writeln!(s, "period={period}");
                }
                TorusClass::Circles {
                    count,
                    slope_num,
                    slope_den,
                } => {
                    let _ = writeln!(s, "kind=circles");
                    let _ = writeln!(s, "circles={count}");
                    let _ = writeln!(s, "slope={slope_num}/{slope_den}");
                }
                TorusClass::Dense => {
                    let _ = writeln!(s, "kind=dense");
                }
            }
            if let Ok(Some(rel)) = torus::find_relation(&a1, &a2, coeff_bound) {
                let _ = writeln!(s, "relation={},{},{}", rel.a, rel.b, rel.c);
            }
            match torus::predicted_agreement(&a1, &i1, &a2, &i2) {
                Ok(p) => {
                    let _ = writeln!(s, "predicted={p}");
                }
                Err(Error::InvalidScalar(_)) => {
                    let _ = writeln!(s, "predicted=undefined");
                }
                Err(e) => return Err(e),
            }
            Ok(s)
        }
        Command::Equiv {
            alpha,
            intervals,
            alpha2,
            intervals2,
            horizon,
        } => {
            let a1 = scalar::parse_scalar(&alpha)?;
            let a2 = scalar::parse_scalar(&alpha2)?;
            let i1 = load_intervals(&intervals)?;
            let i2 = load_intervals(&intervals2)?;
            let v = torus::classify_equivalence(&a1, &i1, &a2, &i2, horizon)?;
            let line = match v {
                EquivalenceVerdict::Same => "verdict=same".to_string(),
                EquivalenceVerdict::Mirror => "verdict=mirror".to_string(),
                EquivalenceVerdict::SymmetryEquivalent { a, c } => {
                    format!("verdict=symmetry\na={a}\nc={c}")
                }
                EquivalenceVerdict::Distinct { witness: Some(n) } => {
                    format!("verdict=distinct:{n}")
                }
                EquivalenceVerdict::Distinct { witness: None } => {
                    "verdict=distinct:unwitnessed".to_string()
                }
            };
            Ok(format!("{line}\n"))
        }
        Command::DiffeoRho { diffeo, n } => {
            let f: DiffeoSpec = diffeo.parse()?;
            let est = diffeo::rotation_number(&f, &CirclePoint::zero(), n)?;
            let mut s = String::new();
            let _ = writeln!(s, "n={n}");
            let _ = writeln!(s, "rho_lo={}", est.lo);
            let _ = writeln!(s, "rho_hi={}", est.hi);
            let _ = writeln!(s, "width={}", est.width()?);
            Ok(s)
        }
        Command::DiffeoGen {
            diffeo,
            intervals,
            n,
            out,
        } => {
            let f: DiffeoSpec = diffeo.parse()?;
            let iset = load_intervals(&intervals)?;
            let it = diffeo::generate_diffeo_itinerary(&f, &iset, n)?;
            emit(&out, &format!("{it}\n"))
        }
        Command::DiffeoCheck {
            diffeo,
            intervals,
            n,
        } => {
            let f: DiffeoSpec = diffeo.parse()?;
            let iset = load_intervals(&intervals)?;
            let v = diffeo::verify_denjoy_reduction(&f, &iset, n)?;
            let line = match v {
                DenjoyVerdict::Consistent { horizon } => {
                    format!("verdict=consistent\nhorizon={horizon}")
                }
                DenjoyVerdict::Inconsistent { index } => {
                    format!("verdict=inconsistent\nindex={index}")
                }
            };
            Ok(format!("{line}\n"))
        }
    }
}
