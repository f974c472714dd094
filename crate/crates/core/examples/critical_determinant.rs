// Critical determinants of a few planar domains, with the hexagon that
// realizes each one.

use latcrit::critical2d::critical_determinant_2d;
use latcrit::ConvexDomain2;

fn main() -> latcrit::Result<()> {
    for spec in ["euclidean", "p:1.5", "p:4", "poly:[1,0;0.5,0.8;-0.5,0.8;-1,0;-0.5,-0.8;0.5,-0.8]", "lin:[2,1;0,1]:euclidean"] {
        let domain: ConvexDomain2 = spec.parse()?;
        let crit = critical_determinant_2d(&domain, 512)?;
        let h = crit.argmin;
        println!("{spec:>40}  delta = {:.12}  area/delta = {:.6}", crit.delta, domain.area(4096) / crit.delta);
        println!("{:>40}  q = [{:.6}, {:.6}]  r = [{:.6}, {:.6}]", "", h.q[0], h.q[1], h.r[0], h.r[1]);
    }
    Ok(())
}
