//! Label vocabulary and the canonical class order.
//!
//! Every class axis in the crate (probability columns, confusion rows, tie
//! breaking) is indexed by position in a [`LabelSchema`]. The default schema
//! is `[Negative, Neutral, Positive]`; a schema file overrides it.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a class within a [`LabelSchema`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelId(pub usize);

impl LabelId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordered set of distinct class names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelSchema {
    labels: Vec<String>,
    #[serde(skip)]
    folded: Vec<String>,
}

pub const DEFAULT_LABELS: [&str; 3] = ["Negative", "Neutral", "Positive"];

fn fold(name: &str) -> String {
    name.trim().to_lowercase()
}

impl Default for LabelSchema {
    fn default() -> Self {
        Self::new(DEFAULT_LABELS).expect("built-in schema is valid")
    }
}

impl LabelSchema {
    /// Builds a schema; names are trimmed, must be non-empty and unique
    /// after case folding, and there must be at least two of them.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let labels: Vec<String> = labels
            .into_iter()
            .map(|s| s.as_ref().trim().to_string())
            .collect();
        if labels.len() < 2 {
            return Err(Error::InvalidSchema(format!(
                "need at least 2 labels, got {}",
                labels.len()
            )));
        }
        let mut folded = Vec::with_capacity(labels.len());
        for name in &labels {
            if name.is_empty() {
                return Err(Error::InvalidSchema("empty label name".into()));
            }
            if name.contains('\t') || name.contains('\n') {
                return Err(Error::InvalidSchema(format!(
                    "label {name:?} contains a tab or newline"
                )));
            }
            let f = fold(name);
            if folded.contains(&f) {
                return Err(Error::InvalidSchema(format!("duplicate label {name:?}")));
            }
            folded.push(f);
        }
        Ok(Self { labels, folded })
    }

    /// Reads a schema file: one label per line, order significant. Blank
    /// lines are ignored.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.lines().filter(|l| !l.trim().is_empty()))
    }

    pub fn count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn ids(&self) -> impl Iterator<Item = LabelId> {
        (0..self.labels.len()).map(LabelId)
    }

    /// Exact lookup after trimming and case folding. No aliases, no prefixes.
    pub fn parse_label(&self, name: &str) -> Result<LabelId> {
        let f = fold(name);
        self.folded
            .iter()
            .position(|l| *l == f)
            .map(LabelId)
            .ok_or_else(|| Error::UnknownLabel {
                label: name.to_string(),
                line: None,
            })
    }

    pub fn name(&self, id: LabelId) -> &str {
        &self.labels[id.0]
    }

    pub fn check(&self, id: LabelId) -> Result<()> {
        if id.0 < self.count() {
            Ok(())
        } else {
            Err(Error::LabelOutOfRange {
                index: id.0,
                count: self.count(),
            })
        }
    }

    /// Serializes in schema-file format.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

pub fn parse_label(name: &str, schema: &LabelSchema) -> Result<LabelId> {
    schema.parse_label(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_order() {
        let s = LabelSchema::default();
        assert_eq!(s.count(), 3);
        assert_eq!(s.parse_label("Positive").unwrap(), LabelId(2));
        assert_eq!(s.parse_label("negative ").unwrap(), LabelId(0));
        assert_eq!(s.parse_label("  NEUTRAL").unwrap(), LabelId(1));
    }

    #[test]
    fn no_fuzzy_matching() {
        let s = LabelSchema::default();
        match s.parse_label("Pos") {
            Err(Error::UnknownLabel { label, line: None }) => assert_eq!(label, "Pos"),
            other => panic!("expected UnknownLabel, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_schemas() {
        assert!(matches!(
            LabelSchema::new(["only"]),
            Err(Error::InvalidSchema(_))
        ));
        assert!(matches!(
            LabelSchema::new(["a", "A"]),
            Err(Error::InvalidSchema(_))
        ));
        assert!(matches!(
            LabelSchema::new(["a", " "]),
            Err(Error::InvalidSchema(_))
        ));
    }

    #[test]
    fn file_format() {
        let s = LabelSchema::parse("pos\nneg\n\nneu\n").unwrap();
        assert_eq!(s.labels(), &["pos", "neg", "neu"]);
        assert_eq!(LabelSchema::parse(&s.to_file_string()).unwrap(), s);
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(names in proptest::collection::hash_set("[a-z][a-z0-9_]{0,8}", 2..8)) {
            let s = LabelSchema::new(&names).unwrap();
            for id in s.ids() {
                prop_assert_eq!(s.parse_label(s.name(id)).unwrap(), id);
            }
        }
    }
}
