use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_clauses, MappingKind, TreeMapping, Word};
use crate::error::{Error, Result};
use crate::measure::MeasureParams;

/// Label of words that the table does not list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefaultLabel {
    /// The last symbol, the smallest label in its residue class.
    Symbol,
    /// Left undetermined.
    Unknown,
}

/// An explicit table of labels.
///
/// With [`DefaultLabel::Unknown`] the trie also records the branches it was
/// built from: beyond the deepest listed level, the zero-extension of a
/// recorded branch carries label 0 and everything else is undetermined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTrie {
    p: MeasureParams,
    labels: BTreeMap<Word, i64>,
    /// Stems of recorded branches.
    branches: BTreeMap<Word, usize>,
    default: DefaultLabel,
    max_len: usize,
}

/// On-disk form `{q, b, labels: [[word, label], …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrieFile {
    pub q: u32,
    pub b: u32,
    #[serde(default)]
    pub labels: Vec<(String, i64)>,
}

/// A trie from explicit entries; unlisted words get the last-symbol label.
pub fn make_trie(
    p: MeasureParams,
    entries: impl IntoIterator<Item = (Word, i64)>,
) -> Result<FiniteTrie> {
    let mut labels = BTreeMap::new();
    for (w, label) in entries {
        if w.q() != p.q() {
            return Err(Error::InvalidWord {
                word: w.to_string(),
                reason: format!("word over q={} used with q={}", w.q(), p.q()),
            });
        }
        if w.is_empty() {
            return Err(Error::InvalidWord {
                word: String::new(),
                reason: "the root carries no label".into(),
            });
        }
        if let Some(v) = check_clauses(&p, &w, label) {
            return Err(Error::TreeClause {
                word: v.word,
                clause: v.clause,
                label,
            });
        }
        labels.insert(w, label);
    }
    let max_len = labels.keys().map(Word::len).max().unwrap_or(0);
    Ok(FiniteTrie {
        p,
        labels,
        branches: BTreeMap::new(),
        default: DefaultLabel::Symbol,
        max_len,
    })
}

impl FiniteTrie {
    /// A partial trie over the given labels; `branches` maps each branch stem
    /// to the level where its labels end.
    pub(crate) fn partial(
        p: MeasureParams,
        labels: BTreeMap<Word, i64>,
        branches: BTreeMap<Word, usize>,
    ) -> Self {
        let max_len = labels.keys().map(Word::len).max().unwrap_or(0);
        Self {
            p,
            labels,
            branches,
            default: DefaultLabel::Unknown,
            max_len,
        }
    }

    pub fn from_file(file: &TrieFile) -> Result<Self> {
        let p = MeasureParams::new(file.q, file.b)?;
        let entries = file
            .labels
            .iter()
            .map(|(w, l)| Ok((Word::parse(p.q(), w)?, *l)))
            .collect::<Result<Vec<_>>>()?;
        make_trie(p, entries)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TrieFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("trie file: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> TrieFile {
        TrieFile {
            q: self.p.q(),
            b: self.p.b(),
            labels: self.labels.iter().map(|(w, l)| (w.to_string(), *l)).collect(),
        }
    }

    pub fn default_label(&self) -> DefaultLabel {
        self.default
    }

    pub fn listed(&self) -> impl Iterator<Item = (&Word, &i64)> {
        self.labels.iter()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }
}

impl TreeMapping for FiniteTrie {
    fn params(&self) -> MeasureParams {
        self.p
    }

    fn kind(&self) -> MappingKind {
        MappingKind::FiniteTrie
    }

    fn name(&self) -> String {
        "trie".into()
    }

    fn label(&self, w: &Word) -> Option<i64> {
        if w.is_zero() {
            return Some(0);
        }
        if let Some(&l) = self.labels.get(w) {
            return Some(l);
        }
        match self.default {
            DefaultLabel::Symbol => Some(w.last().unwrap_or(0) as i64),
            DefaultLabel::Unknown => {
                (w.len() > self.max_len && self.branches.contains_key(&w.stem())).then_some(0)
            }
        }
    }

    fn support_depth(&self, w: &Word) -> Option<usize> {
        if w.is_zero() {
            return Some(0);
        }
        match self.default {
            DefaultLabel::Symbol => Some(w.stem_len().max(self.max_len)),
            DefaultLabel::Unknown => self.branches.get(&w.stem()).copied(),
        }
    }
}
