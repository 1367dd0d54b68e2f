//! Drives the command layer from a JSON config, the same path the binary
//! takes for `--config`.

use coulomb_linstat::cli::{execute, RunConfig};

fn main() -> coulomb_linstat::Result<()> {
    let text = r#"{
        "command": "det",
        "model": { "N": 40, "U": "harmonic:mu=1", "f": "monomial:q=2" },
        "options": { "s-list": [-0.2, 0.2, 0.5] }
    }"#;
    let config = RunConfig::from_text(text)?.resolve()?;
    let output = execute(&config)?;
    output.write(&config, std::io::stdout().lock())
}
