//! Circle diffeomorphisms through their lift: enclose the rotation number,
//! generate a certified itinerary, and check that the data is consistent
//! with the conjugated rigid rotation. A corrupted bit breaks the check.
//!
//! Run with: cargo run --example diffeo_rotation

use rotiter::*;

fn main() -> Result<()> {
    let f: DiffeoSpec = "standard omega=0.3 beta=0.9".parse()?;
    println!("f: {f}");

    for n in [1_000usize, 10_000, 100_000] {
        let est = rotation_number(&f, &CirclePoint::zero(), n)?;
        println!(
            "rho at n = {n:>6}: [{:.9}, {:.9}] (width {:.1e})",
            est.lo.to_f64(),
            est.hi.to_f64(),
            est.width()?.to_f64()
        );
    }

    let interval = IntervalSet::from_endpoint_pairs(&[(parse_scalar("0")?, parse_scalar("1/4")?)])?;
    let it = generate_diffeo_itinerary(&f, &interval, 1000)?;
    println!("first 60 bits: {}", &it.as_string()[..60]);

    match verify_denjoy_reduction(&f, &interval, 1000)? {
        DenjoyVerdict::Consistent { horizon } => {
            println!("reduction to a rigid rotation: consistent up to {horizon}")
        }
        DenjoyVerdict::Inconsistent { index } => println!("inconsistent at {index}?!"),
    }

    // flip one bit deep inside a zero block and watch the check fail
    let mut bits = it.bits().to_vec();
    let flip = (2..998)
        .find(|&j| (j - 2..=j + 2).all(|t| !bits[t]))
        .expect("a deep zero");
    bits[flip] = true;
    let corrupted = Itinerary::from_bits(bits)?;
    match verify_denjoy_reduction_bits(&f, &corrupted, interval.arc_count())? {
        DenjoyVerdict::Inconsistent { index } => {
            println!("after flipping bit {flip}: inconsistent (witness index {index})")
        }
        DenjoyVerdict::Consistent { .. } => println!("corruption went unnoticed?!"),
    }

    // the rotation-class family recoverable from bits alone
    let fam = recover_rotation_class(&it)?;
    println!("{fam}");
    println!("true rho sits in the family (m + [a'])/n as guaranteed");
    Ok(())
}
