//! Every closed-form moment and bound at one parameter point.

use accperc::moments::MomentReport;
use accperc::ModelParams;

fn main() -> accperc::Result<()> {
    for (alpha, h, eps) in [(0.25, 24, 0.0), (1.0, 50, 0.2), (2.0, 200, 0.3)] {
        let params = ModelParams::from_alpha(alpha, h)?.with_eps(eps)?;
        println!("{params}");
        for (name, value) in MomentReport::compute(&params)?.entries() {
            println!("  {name:<24} {value}");
        }
    }
    Ok(())
}
