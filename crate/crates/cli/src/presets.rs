//! Configs that regenerate the reference tables, compiled into the binary.

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const PRESETS: &[(&str, &str)] = &[
    ("quartic-table1", include_str!("../presets/quartic-table1.toml")),
    ("quartic-extended", include_str!("../presets/quartic-extended.toml")),
    ("quartic-figure1", include_str!("../presets/quartic-figure1.toml")),
    ("sextic-table3", include_str!("../presets/sextic-table3.toml")),
    ("cubic-table4", include_str!("../presets/cubic-table4.toml")),
    ("gauss-quartic-table5", include_str!("../presets/gauss-quartic-table5.toml")),
    ("gauss-quartic-table5a", include_str!("../presets/gauss-quartic-table5a.toml")),
    ("mexican-hat-table6", include_str!("../presets/mexican-hat-table6.toml")),
    ("bardsley-table7", include_str!("../presets/bardsley-table7.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.0)
}

pub fn source(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|p| p.0 == name)
        .map(|p| p.1)
        .ok_or_else(|| CliError::UnknownPreset(name.to_string()))
}

pub fn load(name: &str) -> Result<RunConfig> {
    RunConfig::from_toml_str(source(name)?)
}
