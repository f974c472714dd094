// Shearing a critical lattice of the disk cylinder until three independent
// lattice points lie on the top face.

use latcrit::cylinder::{CriticalLatticeDesc, Cylinder, Piece};
use latcrit::ConvexDomain2;

fn main() -> latcrit::Result<()> {
    let cyl = Cylinder::new(ConvexDomain2::euclidean())?;
    let m = cyl.critical_m().expect("hexagonal basis");
    let start = cyl.realize(&CriticalLatticeDesc { piece: Piece::LowerShear, m, shear: [0.3, -0.7], normalize: false })?;
    let out = cyl.shear_to_top(&start)?;
    println!("total shear parameter {:.9} in {} stage(s)", out.tau, out.path.stages.len());
    for s in &out.path.stages {
        println!("  row {:?} for t in [0, {:.9}]{}", s.row, s.length, if s.unbounded { " (unbounded ray)" } else { "" });
    }
    for p in out.top_points {
        println!("top point [{:+.9}, {:+.9}, {:+.9}]", p[0], p[1], p[2]);
    }
    println!("covolume {:.12} -> {:.12}", start.covolume(), out.final_lattice.covolume());
    Ok(())
}
