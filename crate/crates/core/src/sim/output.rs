use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::config::ScenarioConfig;
use super::sweep::{SweepRow, SweepTable};
use crate::error::Result;

pub const CSV_HEADER: [&str; 7] = [
    "axis_value",
    "algorithm",
    "mean_sum_rate",
    "std_error",
    "trials",
    "seed",
    "non_converged_count",
];

/// `v<crate version>`, suffixed with `-g<hash>` when built with `IRS_MATCH_GIT_HASH` set.
pub fn version_string() -> String {
    match option_env!("IRS_MATCH_GIT_HASH") {
        Some(hash) if !hash.is_empty() => format!("v{}-g{hash}", env!("CARGO_PKG_VERSION")),
        _ => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| Ok(row?)).collect()
}

pub fn emit_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    read_csv(std::fs::File::open(path)?)
}

/// `<path>.meta.txt`
pub fn metadata_path(path: impl AsRef<Path>) -> PathBuf {
    let mut s = path.as_ref().as_os_str().to_owned();
    s.push(".meta.txt");
    PathBuf::from(s)
}

/// Version, seed, any extra `key: value` lines, then the full config as TOML.
pub fn render_metadata(config: &ScenarioConfig, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "version: {}", version_string());
    let _ = writeln!(s, "seed: {}", config.seed);
    for (k, v) in extra {
        let _ = writeln!(s, "{k}: {v}");
    }
    s.push_str("\n[config]\n");
    s.push_str(&config.to_toml_string());
    s
}

pub fn write_metadata(path: impl AsRef<Path>, config: &ScenarioConfig, extra: &[(&str, String)]) -> Result<()> {
    std::fs::write(path, render_metadata(config, extra))?;
    Ok(())
}

impl SweepTable {
    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        write_csv(&self.rows, &mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}
