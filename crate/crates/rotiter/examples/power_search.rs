//! When the rotation is larger than the interval, blocks of 1's no longer
//! count revolutions. Subsampling by k turns the data into the itinerary of
//! the k-th power rotation; a good k restores the block-counting bracket
//! and leaves 2k candidate angles to test against the full prefix.
//!
//! Run with: cargo run --example power_search

use rotiter::recovery::{bracket_sym_alpha, candidate_alphas, eliminate_candidates, find_power_k};
use rotiter::*;

fn main() -> Result<()> {
    // [alpha] = sqrt(2)/2 - 0 ~ 0.7071 -> folded 0.2929 exceeds l(I) = 1/4
    let alpha = parse_scalar("(0+1*sqrt(2))/2")?;
    let interval = IntervalSet::from_endpoint_pairs(&[(parse_scalar("0")?, parse_scalar("1/4")?)])?;
    let it = generate(&alpha, &interval, 10_000)?;
    println!(
        "[alpha] = {:.5} > l(I) = 0.25: no \"11\" ever appears",
        alpha.sym_frac()?.to_f64()
    );
    println!(
        "contains 11: {}, contains 00: {}",
        it.has_double(true),
        it.has_double(false)
    );

    let k = find_power_k(&it, 16)?;
    println!("smallest power with both doubles: k = {k}");
    let sub = it.subsample(k)?;
    let s = bracket_sym_alpha(&sub)?;
    println!(
        "[{k} alpha] in [{:.6}, {:.6}] from {} subsampled bits",
        s.lo.to_f64(),
        s.hi.to_f64(),
        sub.len()
    );

    let candidates = candidate_alphas(k, &s)?;
    println!("{} candidates for {{alpha}}:", candidates.len());
    for c in &candidates {
        println!("  [{:.6}, {:.6}]", c.lo.to_f64(), c.hi.to_f64());
    }

    let result = eliminate_candidates(&it, &candidates)?;
    println!("survivors (the mirror pair):");
    for c in result.survivors() {
        println!("  [{:.6}, {:.6}]", c.alpha.lo.to_f64(), c.alpha.hi.to_f64());
    }
    println!(
        "true {{alpha}} = {:.6}, mirror = {:.6}",
        alpha.to_f64(),
        1.0 - alpha.to_f64()
    );
    Ok(())
}
