//! Reconstruct the interval set from an itinerary when the rotation amount
//! is known: the 1-labeled orbit points cluster into inner/outer brackets,
//! and a continued-fraction convergent bounds the endpoint error.
//!
//! Run with: cargo run --example recover_interval

use rotiter::recovery::{estimate_length, recover_interval, Convergent};
use rotiter::*;

fn main() -> Result<()> {
    let alpha = parse_scalar("(0+1*sqrt(3))/15")?;
    let interval = IntervalSet::from_endpoint_pairs(&[(parse_scalar("0")?, parse_scalar("1/4")?)])?;

    for n in [55usize, 1000, 10_000] {
        let it = generate(&alpha, &interval, n)?;
        let conv = Convergent::best_for(&alpha, n as i128)?;
        let bracket = recover_interval(&it, &alpha, Some(&conv))?;
        println!("n = {n}:");
        for (inner, outer) in bracket.inner.iter().zip(&bracket.outer) {
            println!(
                "  inner [{:.6}, {:.6}]  outer [{:.6}, {:.6}]",
                inner.lo.to_f64(),
                inner.lo.to_f64() + inner.len.to_f64(),
                outer.lo.to_f64(),
                outer.lo.to_f64() + outer.len.to_f64(),
            );
        }
        println!(
            "  spacing bound 1/q + 2q*eps = {:.6} from convergent {}/{}",
            bracket.spacing_bound.as_ref().unwrap().to_f64(),
            conv.p,
            conv.q
        );
        let (point, birkhoff) = estimate_length(&it, Some(&conv))?;
        println!(
            "  length estimate S_n/n = {} ~ {:.5}",
            point,
            point.to_f64()
        );
        if let Some((lo, hi)) = birkhoff {
            println!(
                "  Birkhoff bracket [{:.5}, {:.5}] (true length 0.25)",
                lo.to_f64(),
                hi.to_f64()
            );
        }
    }
    Ok(())
}
