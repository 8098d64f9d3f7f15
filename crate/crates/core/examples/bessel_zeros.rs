//! Tabulates spherical Bessel zeros and checks them against the
//! three-term recurrence.

use moving_well::specfun::{sph_bessel_j, BesselZeroTable};

fn main() -> moving_well::Result<()> {
    let table = BesselZeroTable::new(4, 5)?;
    println!("{:>2} {:>2} {:>22} {:>12}", "l", "n", "beta", "j_l+1 + j_l-1");
    for (l, n, beta) in table.entries() {
        let l = l as i32;
        let identity = sph_bessel_j(l + 1, beta)? + sph_bessel_j(l - 1, beta)?;
        println!("{l:>2} {n:>2} {beta:>22.16} {identity:>12.1e}");
    }
    Ok(())
}
