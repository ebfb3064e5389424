//! Configuration, seeds and output files.

mod config;
mod output;
mod seed;

pub use config::{parse_config, suggest, Config, ConfigError, Flags, Format, KeySpec, SeedSource, ValueKind, DEFAULT_OUT, GLOBAL_KEYS};
pub use output::{
    emit_outputs, from_jsonl, render_svg, replay_mismatches, sha256_hex, svg_structure, to_jsonl, write_atomic, CsvTable, IoError, Manifest, Outputs,
    Plot, MANIFEST_FILE, RECORDS_STEM, SUMMARY_FILE, TOOL,
};
pub use seed::{derive_seed, rng_from_seed, Label, LabRng, SeedRegistry, SEED_SCHEME};
