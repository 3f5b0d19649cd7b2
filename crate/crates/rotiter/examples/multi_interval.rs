//! Recover a two-component interval set with no prior knowledge of k or p:
//! cells (k, p) are tried in diagonal order until some candidate survives.
//! Finite data can never make the answer certain, only consistent up to
//! the checked horizon.
//!
//! Run with: cargo run --example multi_interval

use rotiter::recovery::multi_interval_search;
use rotiter::*;

fn main() -> Result<()> {
    let alpha = parse_scalar("(-1+1*sqrt(2))")?; // sqrt(2) - 1
    let interval = IntervalSet::from_endpoint_pairs(&[
        (parse_scalar("0.1")?, parse_scalar("0.2")?),
        (parse_scalar("0.5")?, parse_scalar("0.7")?),
    ])?;
    let n = 10_000;
    let it = generate(&alpha, &interval, n)?;
    println!(
        "true alpha = {:.6}, I = [0.1,0.2] u [0.5,0.7]",
        alpha.to_f64()
    );

    let result = multi_interval_search(&it, 16, 4, n)?;
    println!(
        "first surviving cell: k = {}, p = {} (horizon {})",
        result.k_used, result.p_assumed, result.horizon
    );
    for c in result.survivors() {
        println!(
            "survivor {{alpha}} in [{:.6}, {:.6}]",
            c.alpha.lo.to_f64(),
            c.alpha.hi.to_f64()
        );
        if let Some(br) = &c.bracket {
            for (inner, outer) in br.inner.iter().zip(&br.outer) {
                println!(
                    "  component: inner [{:.4}, {:.4}]  outer [{:.4}, {:.4}]",
                    inner.lo.to_f64(),
                    inner.lo.to_f64() + inner.len.to_f64(),
                    outer.lo.to_f64(),
                    outer.lo.to_f64() + outer.len.to_f64(),
                );
            }
        }
    }
    println!("certainty extends to the horizon only; longer data could still refute a cell");
    Ok(())
}
