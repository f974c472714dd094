// Critical lattices of the unit cube: permutations of unipotent upper
// triangular lattices.

use latcrit::cylinder::{hajos_sample, Permutation};
use latcrit::{ConvexDomain2, CylinderGauge, EnumOptions};
use rand::{Rng, SeedableRng};

fn main() -> latcrit::Result<()> {
    let cube = CylinderGauge::new(ConvexDomain2::sup());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for perm in Permutation::all() {
        let u = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let l = hajos_sample(perm, u);
        let (v, len) = l.shortest_gauge_vector(&cube)?;
        println!(
            "{perm:?} u = [{:+.3}, {:+.3}, {:+.3}]  covolume {:.15}  admissible {}  shortest {:?} (gauge {len})",
            u[0],
            u[1],
            u[2],
            l.covolume(),
            l.is_admissible(&cube, 1.0, &EnumOptions::default())?,
            v.coeffs
        );
    }
    Ok(())
}
