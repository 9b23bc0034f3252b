use super::{LabelLanguage, MappingKind, TreeMapping, Word};
use crate::error::Result;
use crate::measure::MeasureParams;

/// `τ(w) = last symbol of w`, whose set `Λ(τ)` is `{Σ d_n b^n : d_n ∈ Σ_q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandardMapping {
    p: MeasureParams,
}

pub fn make_standard(p: MeasureParams) -> StandardMapping {
    StandardMapping { p }
}

/// The mapping `τ_{2,4}(δ) = δ_n` behind `Λ_4 = {Σ d_n 4^n : d_n ∈ {0,1}}`.
pub fn make_tau24() -> StandardMapping {
    make_standard(MeasureParams::new(2, 4).expect("(2,4) is admissible"))
}

impl StandardMapping {
    pub fn try_new(q: u32, b: u32) -> Result<Self> {
        Ok(make_standard(MeasureParams::new(q, b)?))
    }
}

impl TreeMapping for StandardMapping {
    fn params(&self) -> MeasureParams {
        self.p
    }

    fn kind(&self) -> MappingKind {
        MappingKind::RuleBased
    }

    fn name(&self) -> String {
        if (self.p.q(), self.p.b()) == (2, 4) {
            "tau24".into()
        } else {
            format!("standard({},{})", self.p.q(), self.p.b())
        }
    }

    fn label(&self, w: &Word) -> Option<i64> {
        Some(w.last().unwrap_or(0) as i64)
    }

    fn labels_along(&self, w: &Word, depth: usize) -> Vec<Option<i64>> {
        (1..=depth).map(|k| Some(w.at(k) as i64)).collect()
    }

    fn support_depth(&self, w: &Word) -> Option<usize> {
        Some(w.stem_len())
    }

    fn analytic_gap_sup(&self) -> Option<u64> {
        Some(0)
    }

    fn label_language(&self) -> Option<LabelLanguage> {
        Some(LabelLanguage {
            per_residue: (0..self.p.q() as i64).map(|r| vec![r]).collect(),
        })
    }
}
