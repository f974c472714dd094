// The shortest vector of a_s·u_x·Z³ along the flow, for the cubic pair and
// for a rational pair whose orbit diverges.

use latcrit::dirichlet::{ba_pair_cubic, orbit_min_gauge, Target};
use latcrit::{ConvexDomain2, CylinderGauge};

fn main() -> latcrit::Result<()> {
    let gauge = CylinderGauge::new(ConvexDomain2::euclidean());
    let grid: Vec<f64> = (0..=10).map(|i| 4.0 * i as f64).collect();
    let rational: Target = "2/9,4/9".parse()?;
    let cubic = orbit_min_gauge(&ba_pair_cubic(), &gauge, &grid)?;
    let div = orbit_min_gauge(&rational, &gauge, &grid)?;
    println!("{:>5} {:>14} {:>14}", "s", "cubic", "2/9,4/9");
    for (a, b) in cubic.iter().zip(&div) {
        println!("{:>5} {:>14.6e} {:>14.6e}", a.s, a.lambda1, b.lambda1);
    }
    Ok(())
}
