//! Generate the itinerary of 0 under rotation by sqrt(3)/15 relative to
//! I = [0, 1/4], then inspect its block structure and the three-gap law.
//!
//! Run with: cargo run --example reference_itinerary

use rotiter::*;

fn main() -> Result<()> {
    let alpha = parse_scalar("(0+1*sqrt(3))/15")?;
    let interval = IntervalSet::from_endpoint_pairs(&[(parse_scalar("0")?, parse_scalar("1/4")?)])?;

    let it = generate(&alpha, &interval, 55)?;
    println!("alpha = {alpha} ~ {:.6}", alpha.to_f64());
    println!("I     = [0, 1/4]");
    println!("bits  = {it}");

    for symbol in [true, false] {
        let g = gap_spectrum(&it, symbol)?;
        let verdict = three_gap_check(&g);
        println!(
            "symbol {}: gaps {:?}, runs {:?}, three-gap {}",
            symbol as u8,
            g.distinct_gaps(),
            g.distinct_runs(),
            if verdict.passed() { "pass" } else { "FAIL" },
        );
    }

    let ones = gap_spectrum(&it, true)?;
    println!(
        "B = {} distinct 1-block lengths (initial block excluded)",
        ones.b_distinct
    );
    let bound = min_components_bound(ones.b_distinct, it.has_double(false));
    println!(
        "component lower bound: {} (conditional: {})",
        bound.unconditional, bound.conditional
    );

    // the exact block lengths keep following the three-gap law deep in
    let long = generate(&alpha, &interval, 100_000)?;
    let g = gap_spectrum(&long, true)?;
    println!("at n = 10^5 the 1-gaps are {:?}", g.distinct_gaps());
    Ok(())
}
