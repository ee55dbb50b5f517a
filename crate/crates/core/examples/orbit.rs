//! Iterates one orbit and prints its itinerary and where it ends up.
//!
//! cargo run --example orbit -- 0.9,0.7,-2,1.16 2.5,-1

use wqa::classify::{classify_orbit, ClassifyOptions};
use wqa::map::{iterate_orbit, DEFAULT_ESCAPE_RADIUS};
use wqa::{MapParams, Point2};

fn main() -> wqa::Result<()> {
    let mut args = std::env::args().skip(1);
    let params: MapParams = args.next().as_deref().unwrap_or("0.9,0.7,-2,1.16").parse()?;
    let p0: Point2 = args.next().as_deref().unwrap_or("2.5,-1").parse()?;

    let orbit = iterate_orbit(&params, p0, 60, DEFAULT_ESCAPE_RADIUS)?;
    println!("itinerary {}", orbit.word());
    for (n, p) in orbit.points.iter().enumerate().take(8) {
        println!("{n:>3}  {:>10.5} {:>10.5}", p.x, p.y);
    }

    let c = classify_orbit(&params, p0, &ClassifyOptions::with_budget(100_000, 10_000))?;
    println!("{} after {} steps, last state {:?}", c.kind, c.steps, c.last);
    Ok(())
}
