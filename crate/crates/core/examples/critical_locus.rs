// Samples of the critical locus of a domain. Every lattice is admissible
// and has covolume equal to the critical determinant.

use latcrit::critical2d::{critical_determinant_2d, critical_locus_2d};
use latcrit::{ConvexDomain2, EnumOptions};

fn main() -> latcrit::Result<()> {
    let domain = ConvexDomain2::p_norm(4.0)?;
    let delta = critical_determinant_2d(&domain, 512)?.delta;
    for l in critical_locus_2d(&domain, 6)? {
        let b = l.basis();
        let ok = l.is_admissible(&domain, 1.0, &EnumOptions::default())?;
        println!(
            "basis [{:+.6} {:+.6}; {:+.6} {:+.6}]  covolume - delta = {:+.1e}  admissible = {ok}",
            b[0][0],
            b[0][1],
            b[1][0],
            b[1][1],
            l.covolume() - delta
        );
    }
    Ok(())
}
