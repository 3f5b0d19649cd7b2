//! Distinct parameters that cannot be told apart: the mirror pair and the
//! rotational-symmetry family all produce one and the same itinerary.
//!
//! Run with: cargo run --example equivalence

use rotiter::*;

fn main() -> Result<()> {
    let params: Vec<(&str, Scalar, IntervalSet)> = vec![
        (
            "a1 = sqrt(2)-1,     I1 = [1/4,1/2]",
            parse_scalar("(-1+1*sqrt(2))")?,
            IntervalSet::from_endpoint_pairs(&[(parse_scalar("1/4")?, parse_scalar("1/2")?)])?,
        ),
        (
            "a2 = 2-sqrt(2),     I2 = [1/2,3/4]",
            parse_scalar("(2-1*sqrt(2))")?,
            IntervalSet::from_endpoint_pairs(&[(parse_scalar("1/2")?, parse_scalar("3/4")?)])?,
        ),
        (
            "a3 = (sqrt(2)-1)/2, I3 = [1/8,1/4] u [5/8,3/4]",
            parse_scalar("(-1+1*sqrt(2))/2")?,
            IntervalSet::from_endpoint_pairs(&[
                (parse_scalar("1/8")?, parse_scalar("1/4")?),
                (parse_scalar("5/8")?, parse_scalar("3/4")?),
            ])?,
        ),
        (
            "a4 = (sqrt(2)-1)/3, I4 = [1/12,1/6] u [5/12,1/2] u [3/4,5/6]",
            parse_scalar("(-1+1*sqrt(2))/3")?,
            IntervalSet::from_endpoint_pairs(&[
                (parse_scalar("1/12")?, parse_scalar("1/6")?),
                (parse_scalar("5/12")?, parse_scalar("1/2")?),
                (parse_scalar("3/4")?, parse_scalar("5/6")?),
            ])?,
        ),
    ];

    for (label, _, iset) in &params {
        println!("{label}  (symmetry order {})", iset.symmetry_order()?);
    }
    println!();

    let n = 10_000;
    let reference = generate(&params[0].1, &params[0].2, n)?;
    for i in 0..params.len() {
        for j in i + 1..params.len() {
            let v =
                classify_equivalence(&params[i].1, &params[i].2, &params[j].1, &params[j].2, n)?;
            println!("pair ({}, {}): {:?}", i + 1, j + 1, v);
        }
    }
    for (label, a, iset) in &params[1..] {
        let bits = generate(a, iset, n)?;
        assert_eq!(bits.bits(), reference.bits());
        println!(
            "bits of {} match the first parameter set to n = {n}",
            &label[..2]
        );
    }

    // a genuinely different interval produces a witnessed difference
    let other = IntervalSet::from_endpoint_pairs(&[(parse_scalar("1/4")?, parse_scalar("0.51")?)])?;
    let v = classify_equivalence(&params[0].1, &params[0].2, &params[0].1, &other, n)?;
    println!("vs [1/4, 0.51]: {v:?}");
    Ok(())
}
