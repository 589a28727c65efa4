//! Helpers for the acceptance checks in `tests/acceptance.rs`.

use std::path::PathBuf;

/// Result of one criterion.
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

pub fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// The `shapelab` executable built next to the running test binary
/// (`target/<profile>/deps/acceptance-*` → `target/<profile>/shapelab`).
pub fn shapelab_binary() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let bin = dir.join(format!("shapelab{}", std::env::consts::EXE_SUFFIX));
    bin.is_file().then_some(bin)
}
