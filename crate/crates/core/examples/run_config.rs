//! Drives the config runner from code: parse a TOML run description, run it
//! into a directory and list what was written.

use lmg_qudit::runner;

const CONFIG: &str = r#"
[[run]]
protocol = "spectrum"
j = 3
h_over_gx = [0.0, 0.5, 1.0, 1.5]

[[run]]
protocol = "order"
prefix = "order_small"
j = 3
h_over_gx = [0.2, 2.0]
"#;

fn main() -> Result<(), runner::RunError> {
    let out = std::env::temp_dir().join("lmg_run_config_example");
    for cfg in runner::parse_config(CONFIG, false)? {
        for path in runner::run_to_dir(&cfg, &out, true)? {
            println!("{}", path.display());
        }
    }
    for f in &runner::FIGURES {
        println!("bundled figure {:<4} {}", f.id, f.description);
    }
    Ok(())
}
