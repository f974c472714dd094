// The same constant computed twice: from best approximation records and
// from peaks of the shortest vector along the flow.

use latcrit::dirichlet::{dirichlet_constant, dynamical_constant, matched_q_max, random_point, Target};
use latcrit::{ConvexDomain2, CylinderGauge};

fn main() -> latcrit::Result<()> {
    let norm = ConvexDomain2::p_norm(3.0)?;
    let gauge = CylinderGauge::new(norm.clone());
    let s_max = 12.0;
    for i in 0..4 {
        let x = Target::from_f64(random_point(42, i));
        let flow = dynamical_constant(&x, &gauge, s_max, 0.05)?;
        let records = dirichlet_constant(&x, &norm, matched_q_max(s_max))?;
        println!(
            "x = ({:.6}, {:.6})  flow {:.9}  records {:.9}",
            x.value()[0],
            x.value()[1],
            flow.c,
            records.c_estimate
        );
    }
    Ok(())
}
