// Random-restart attempts to find a cylinder-admissible lattice with
// covolume below the critical determinant of the base.

use latcrit::cylinder::Cylinder;
use latcrit::ConvexDomain2;

fn main() -> latcrit::Result<()> {
    for domain in [ConvexDomain2::euclidean(), ConvexDomain2::sup(), ConvexDomain2::p_norm(3.0)?] {
        let cyl = Cylinder::new(domain.clone())?;
        let best = cyl.corroborate_delta_equality(64, 2024)?;
        println!("{domain:>12}: delta {:.9}, best found {best:.9}", cyl.delta());
    }
    Ok(())
}
