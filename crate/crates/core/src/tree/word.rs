use std::fmt;

use crate::error::{Error, Result};

/// A finite word over `Σ_q = {0, …, q−1}`; index `k − 1` holds the symbol at level `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    q: u32,
    symbols: Vec<u32>,
}

impl Word {
    pub fn new(q: u32, symbols: Vec<u32>) -> Result<Self> {
        if let Some(&s) = symbols.iter().find(|&&s| s >= q) {
            return Err(Error::InvalidWord {
                word: format!("{symbols:?}"),
                reason: format!("symbol {s} is not below q={q}"),
            });
        }
        Ok(Self { q, symbols })
    }

    /// The root.
    pub fn empty(q: u32) -> Self {
        Self {
            q,
            symbols: Vec::new(),
        }
    }

    pub fn zeros(q: u32, n: usize) -> Self {
        Self {
            q,
            symbols: vec![0; n],
        }
    }

    /// Parses digits (`"011"`) for `q ≤ 10`, or dot separated symbols (`"0.11.3"`);
    /// for `q > 10` the dotted form is the only one.
    pub fn parse(q: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |reason: String| Error::InvalidWord {
            word: s.to_string(),
            reason,
        };
        if s.is_empty() {
            return Ok(Self::empty(q));
        }
        let symbols: Vec<u32> = if s.contains('.') || q > 10 {
            s.split('.')
                .map(|t| t.parse::<u32>().map_err(|e| bad(format!("{t:?}: {e}"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| bad(format!("{c:?} is not a digit"))))
                .collect::<Result<_>>()?
        };
        Self::new(q, symbols).map_err(|_| bad(format!("symbols must be below q={q}")))
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    #[inline]
    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// Symbol at level `k ≥ 1` of `w0^∞`.
    #[inline]
    pub fn at(&self, k: usize) -> u32 {
        self.symbols.get(k - 1).copied().unwrap_or(0)
    }

    pub fn last(&self) -> Option<u32> {
        self.symbols.last().copied()
    }

    /// `(w0^∞)|_k`.
    pub fn prefix(&self, k: usize) -> Word {
        let mut symbols: Vec<u32> = self.symbols.iter().copied().take(k).collect();
        symbols.resize(k, 0);
        Word { q: self.q, symbols }
    }

    pub fn child(&self, s: u32) -> Word {
        debug_assert!(s < self.q);
        let mut symbols = self.symbols.clone();
        symbols.push(s);
        Word { q: self.q, symbols }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word { q: self.q, symbols }
    }

    pub fn push(&mut self, s: u32) {
        debug_assert!(s < self.q);
        self.symbols.push(s);
    }

    pub fn pop(&mut self) -> Option<u32> {
        self.symbols.pop()
    }

    /// Length without trailing zeros.
    pub fn stem_len(&self) -> usize {
        self.symbols.iter().rposition(|&s| s != 0).map_or(0, |i| i + 1)
    }

    pub fn stem(&self) -> Word {
        self.prefix(self.stem_len())
    }

    pub fn is_zero(&self) -> bool {
        self.stem_len() == 0
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.symbols.starts_with(&self.symbols)
    }

    /// All words of length `n` in lexicographic order.
    pub fn all(q: u32, n: usize) -> impl Iterator<Item = Word> {
        let total = (q as u64).checked_pow(n as u32).expect("word count overflows u64");
        (0..total).map(move |mut idx| {
            let mut symbols = vec![0; n];
            for slot in symbols.iter_mut().rev() {
                *slot = (idx % q as u64) as u32;
                idx /= q as u64;
            }
            Word { q, symbols }
        })
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q <= 10 {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            f.write_str(&parts.join("."))
        }
    }
}
