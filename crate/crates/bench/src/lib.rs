//! Benchmark fixtures: planted-profile panels of a chosen size.

use physio_core::seedgen::{generate_seed, SeedSpec};
use physio_core::NormalizedPanel;

/// A z-space panel with `per_profile` subjects in each default profile.
pub fn planted_panel(per_profile: usize, seed: u64) -> NormalizedPanel {
    let mut spec = SeedSpec {
        seed,
        ..SeedSpec::default()
    };
    for p in &mut spec.profiles {
        p.count = per_profile;
    }
    let generated = generate_seed(&spec).expect("default spec is valid");
    let panel = generated.panel;
    NormalizedPanel::from_z_scores(panel.subjects().to_vec(), panel.schema().to_vec(), panel.values().clone())
        .expect("generated panels are valid")
}
