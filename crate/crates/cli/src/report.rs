//! CSV emission. Every file starts with `#`-prefixed metadata (tool
//! version, schema tag, seed, config hash) and is byte-reproducible from
//! (config, seed): rows are sorted before writing and contain no timing.

use std::io::Write;
use std::path::PathBuf;

pub struct CsvReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config_hash: Option<String>,
    pub header: &'static str,
    pub rows: Vec<String>,
}

impl CsvReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "# tool: secroute {}\n",
            env!("CARGO_PKG_VERSION")
        ));
        s.push_str(&format!("# schema: {}\n", self.schema));
        s.push_str(&format!("# command: {}\n", self.command));
        s.push_str(&format!("# seed: {}\n", self.seed));
        if let Some(h) = &self.config_hash {
            s.push_str(&format!("# config-sha256: {h}\n"));
        }
        s.push_str(self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    /// Write to `<prefix>-<suffix>.csv`, or stdout when no prefix is given.
    pub fn write(&self, out_prefix: &Option<String>, suffix: &str) -> std::io::Result<()> {
        let text = self.render();
        match out_prefix {
            Some(prefix) => {
                let path = PathBuf::from(format!("{prefix}-{suffix}.csv"));
                std::fs::write(&path, text)?;
                eprintln!("wrote {} rows to {}", self.rows.len(), path.display());
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}
