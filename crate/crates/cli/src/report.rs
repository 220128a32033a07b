//! Key-value reports: sorted keys, deterministic formatting.

use std::collections::BTreeMap;

#[derive(Debug, Default)]
pub struct Report {
    entries: BTreeMap<String, String>,
    notes: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn set_f64(&mut self, key: &str, value: f64, decimals: usize) {
        self.entries.insert(key.to_string(), format!("{value:.decimals$}"));
    }

    /// Prose shown only with `--explain`, after the key-value block.
    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn print(&self, explain: bool) {
        for (k, v) in &self.entries {
            println!("{k}={v}");
        }
        if explain {
            for n in &self.notes {
                println!("# {n}");
            }
        }
    }
}
