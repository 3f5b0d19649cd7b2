//! Two itineraries compared through the product rotation on the torus: the
//! orbit closure of (0,0) decides the asymptotic fraction of agreeing
//! terms, computed exactly and checked empirically.
//!
//! Run with: cargo run --example torus_orbits

use rotiter::*;

fn pair(
    label: &str,
    a1: &Scalar,
    i1: &IntervalSet,
    a2: &Scalar,
    i2: &IntervalSet,
    n: usize,
) -> Result<()> {
    println!("{label}");
    match classify(a1, a2)? {
        TorusClass::Periodic { period } => println!("  orbit closure: periodic, period {period}"),
        TorusClass::Circles {
            count,
            slope_num,
            slope_den,
        } => {
            println!("  orbit closure: {count} circle(s) of slope {slope_num}/{slope_den}")
        }
        TorusClass::Dense => println!("  orbit closure: dense in the torus"),
    }
    let predicted = predicted_agreement(a1, i1, a2, i2)?;
    let g1 = generate(a1, i1, n)?;
    let g2 = generate(a2, i2, n)?;
    let empirical = empirical_agreement(&g1, &g2)?;
    println!(
        "  agreement: predicted {} ~ {:.6}, empirical at n={n}: {:.6}",
        predicted,
        predicted.to_f64(),
        empirical.to_f64()
    );
    Ok(())
}

fn main() -> Result<()> {
    let quarter = IntervalSet::from_endpoint_pairs(&[(parse_scalar("0")?, parse_scalar("1/4")?)])?;
    let shifted =
        IntervalSet::from_endpoint_pairs(&[(parse_scalar("3/10")?, parse_scalar("11/20")?)])?;

    // unrelated: sqrt2 and sqrt3 are rationally independent
    pair(
        "unrelated pair (sqrt(2)-1, [0,1/4]) vs (sqrt(3)-1, [0.3,0.55]):",
        &parse_scalar("(-1+1*sqrt(2))")?,
        &quarter,
        &parse_scalar("(-1+1*sqrt(3))")?,
        &shifted,
        1_000_000,
    )?;

    // related: 2 a1 + 5 = 4 a2, two circles of slope 1/2
    let a1 = parse_scalar("(-2+1*sqrt(2))/2")?;
    let a2 = parse_scalar("(3+1*sqrt(2))/4")?;
    pair(
        "related pair ((sqrt(2)-2)/2, [0,1/4]) vs ((sqrt(2)+3)/4, [0.3,0.55]):",
        &a1,
        &quarter,
        &a2,
        &shifted,
        1_000_000,
    )?;

    // a rational relation found exactly
    if let Some(rel) = find_relation(&a1, &a2, 100)? {
        println!("relation: {}*a1 + {} = {}*a2", rel.a, rel.b, rel.c);
    }
    Ok(())
}
