//! Writes the synthetic sequences in the OTB layout.
//!
//! ```text
//! cargo run -p octkcf --example write_fixtures -- fixtures
//! ```

use std::path::PathBuf;

use octkcf::synth::{generate, SceneSpec};

fn main() -> octkcf::Result<()> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    for (name, spec) in [
        ("synth_cv", SceneSpec::constant_velocity()),
        ("synth_clean", SceneSpec::clean()),
        ("synth_occlusion", SceneSpec::occluded()),
        ("synth_static", SceneSpec::static_scene()),
    ] {
        let dir = root.join(name);
        generate(&spec)?.write_otb(&dir)?;
        println!("{}", dir.display());
    }
    Ok(())
}
