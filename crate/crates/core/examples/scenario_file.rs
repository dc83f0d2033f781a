//! Loading a TOML scenario and writing a JSON-lines event trace.

use abtmac::scenario::Scenario;
use abtmac::sim::run_traced;

const SCENARIO: &str = r#"
[sim]
station_count = 6
mode = "basic"
payload = 34
duration = 2e4
seed = 3

[policy]
kind = "abtmac"
target_lambda = 0.55
"#;

fn main() -> abtmac::Result<()> {
    let cfg = Scenario::from_toml(SCENARIO)?.sim_config()?;
    let mut trace = Vec::new();
    let m = run_traced(&cfg, &mut trace)?;
    let text = String::from_utf8_lossy(&trace);
    for line in text.lines().take(5) {
        println!("{line}");
    }
    println!("... {} events", text.lines().count());
    println!(
        "throughput {:.4}, drops {}",
        m.normalized_throughput, m.drops
    );
    Ok(())
}
