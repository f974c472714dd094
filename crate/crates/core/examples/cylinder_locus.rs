// The two families of critical lattices of a cylinder and where they sit
// with respect to the x3-axis and the horizontal plane.

use latcrit::cylinder::{classify_z, CriticalLatticeDesc, Cylinder, Piece};
use latcrit::{ConvexDomain2, EnumOptions};

fn main() -> latcrit::Result<()> {
    let cyl = Cylinder::new(ConvexDomain2::euclidean())?;
    let m = cyl.critical_m().expect("the disk has a hexagonal critical lattice");
    for piece in [Piece::LowerShear, Piece::UpperShear] {
        for shear in [[0.0, 0.0], [0.3, -0.7], [1.5, 0.25]] {
            let l = cyl.realize(&CriticalLatticeDesc { piece, m, shear, normalize: true })?;
            let r = cyl.critical_radius(true);
            println!(
                "{piece:?} shear {shear:?}: covolume {:.12}, admissible at r = {r:.6}: {}, class {:?}",
                l.covolume(),
                l.is_admissible(cyl.gauge(), r, &EnumOptions::default())?,
                classify_z(&l, 1e-9)?
            );
        }
    }
    Ok(())
}
