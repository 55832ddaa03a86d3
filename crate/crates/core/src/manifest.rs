//! Comment header written at the top of every output file.

use std::io::Write;

use sha2::{Digest, Sha256};

use crate::error::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    /// Canonical one-line echo of every resolved parameter.
    pub config: String,
    pub seeds: Vec<u64>,
    pub start: String,
}

/// sha256 over `blob <len>\0<content>`, the way git names objects.
pub fn content_hash(content: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content.as_bytes());
    hex::encode(h.finalize())
}

impl RunManifest {
    pub fn new(command: &str, config: String, seeds: Vec<u64>) -> Self {
        Self {
            version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            config,
            seeds,
            start: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn config_hash(&self) -> String {
        content_hash(&self.config)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        writeln!(w, "# qwalk {}", self.version)?;
        writeln!(w, "# command: {}", self.command)?;
        writeln!(w, "# config: {}", self.config)?;
        writeln!(w, "# seeds: {}", seeds.join(","))?;
        writeln!(w, "# start: {}", self.start)?;
        writeln!(w, "# config-hash: {}", self.config_hash())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_matches_git_object_naming() {
        // `printf 'hello\n' | git hash-object --object-format=sha256 --stdin`
        assert_eq!(
            content_hash("hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }

    #[test]
    fn layout_and_stability() {
        let a = RunManifest::new("sweep", "{\"mass\":1}".into(), vec![0, 5]);
        let mut b = a.clone();
        b.start = "2000-01-01T00:00:00Z".into();
        assert_eq!(a.config_hash(), b.config_hash());
        let mut buf = Vec::new();
        a.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines.iter().all(|l| l.starts_with("# ")));
        assert_eq!(lines[3], "# seeds: 0,5");
        assert!(lines[4].starts_with("# start: "));
    }
}
