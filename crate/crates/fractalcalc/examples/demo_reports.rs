//! Run all packaged demos and write their tables next to the target dir,
//! the same artifacts the `fractalcalc demo` subcommand produces.
//!
//!     cargo run --release --example demo_reports

use fractalcalc::{run_demo, CantorSpec, DemoName};
use std::fs;

fn main() -> fractalcalc::Result<()> {
    let out = std::env::temp_dir().join("fractalcalc-demos");
    fs::create_dir_all(&out)?;
    for name in DemoName::ALL {
        let rep = run_demo(name, CantorSpec::triadic(), 64)?;
        let csv = out.join(format!("{name}.csv"));
        fs::write(&csv, rep.to_csv())?;
        fs::write(out.join(format!("{name}.json")), rep.summary_json()?)?;
        println!(
            "{name:<12} grid {:>3}  max residual {:.2e}  max deviation {:.2e}  -> {}",
            rep.grid_size,
            rep.max_residual,
            rep.max_deviation,
            csv.display()
        );
    }
    Ok(())
}
