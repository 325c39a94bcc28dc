use std::fmt::Display;

/// Tool version, command and every configuration value of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub command: String,
    pub params: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.params.push((key.to_string(), value.to_string()));
    }

    /// `# `-prefixed lines, newline-terminated.
    pub fn header(&self) -> String {
        let mut out = format!("# cornerforge {} {}\n", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.params {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }
}

/// Drops leading `#` lines and blank lines.
pub fn strip_header(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .skip_while(|(_, l)| l.starts_with('#') || l.trim().is_empty())
}
