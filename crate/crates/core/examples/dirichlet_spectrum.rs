// Dirichlet constant estimates for random pairs, a rational pair and the
// cubic pair, under the Euclidean and sup norms.

use latcrit::cylinder::Cylinder;
use latcrit::dirichlet::{ba_pair_cubic, dirichlet_constant, sample_spectrum, Target};
use latcrit::ConvexDomain2;

fn main() -> latcrit::Result<()> {
    for domain in [ConvexDomain2::euclidean(), ConvexDomain2::sup()] {
        let bound = 1.0 / Cylinder::new(domain.clone())?.delta();
        let found = sample_spectrum(&domain, 16, 100_000, 0)?;
        let max = found.iter().map(|s| s.c_estimate).fold(0.0, f64::max);
        println!("{domain}: bound {bound:.6}, max of 16 random estimates {max:.6}");
        let rational: Target = "3/7,5/11".parse()?;
        let est = dirichlet_constant(&rational, &domain, 100_000)?;
        println!("  {rational}: c = {}, exact = {}", est.c_estimate, est.exact_rational);
        let est = dirichlet_constant(&ba_pair_cubic(), &domain, 1_000_000)?;
        println!("  {}: c = {:.6} from {} records", ba_pair_cubic(), est.c_estimate, est.records.len());
    }
    Ok(())
}
