//! Verdicts with the facts they rest on.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Spectrum,
    NotSpectrum,
    NotMaximal,
    Inconclusive,
}

impl Verdict {
    pub fn is_definitive(&self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }
}

/// The result a certificate appeals to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// `sup_δ D_{τ,δ} < ∞` for a maximal tree mapping gives a spectrum.
    BoundedGap,
    /// `D_{τ,δ} ≥ ε₀ n` along nonzero-ending words rules a spectrum out.
    LinearGap,
    /// `Σ r₂^{2N_τ(n)} < ∞` rules a spectrum out, with a certified defect of `Q`.
    SeriesDefect,
    /// `KΛ` is maximal exactly when no repetend of `i/K` lives on the tree.
    Repetend,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parameters {
    pub q: u32,
    pub b: u32,
    pub level: Option<usize>,
    pub budget: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub theorem: Theorem,
    pub premises: BTreeMap<String, Value>,
    pub witnesses: Vec<Value>,
    pub caveats: Vec<String>,
    pub parameters: Parameters,
}

impl Certificate {
    pub(crate) fn new(verdict: Verdict, theorem: Theorem, q: u32, b: u32) -> Self {
        Self {
            verdict,
            theorem,
            premises: BTreeMap::new(),
            witnesses: Vec::new(),
            caveats: Vec::new(),
            parameters: Parameters {
                q,
                b,
                level: None,
                budget: None,
                tolerances: BTreeMap::new(),
            },
        }
    }

    pub(crate) fn premise(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.premises.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
        self
    }

    pub(crate) fn witness(&mut self, value: impl Serialize) -> &mut Self {
        self.witnesses
            .push(serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub(crate) fn caveat(&mut self, text: impl Into<String>) -> &mut Self {
        self.caveats.push(text.into());
        self
    }

    pub(crate) fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.parameters.tolerances.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}
