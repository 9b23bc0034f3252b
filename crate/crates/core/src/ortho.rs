//! The zero set `Z_{q,b}`, balanced digit expansions, orthogonality of integer
//! sets and the passage from a set to its tree mapping.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::MeasureParams;
use crate::tree::{FiniteTrie, TreeMapping, Word};

pub use crate::tree::{is_maximal_at_depth, MaximalityReport};

/// Digits in `{−1, …, b−2}`, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Expansion {
    pub base: u32,
    pub digits: Vec<i64>,
}

impl Expansion {
    pub fn value(&self) -> BigInt {
        self.digits
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * self.base + d)
    }

    /// Symbols `c_k mod q` of the branch carrying this expansion.
    pub fn branch(&self, q: u32) -> Word {
        let symbols = self.digits.iter().map(|d| d.rem_euclid(q as i64) as u32).collect();
        Word::new(q, symbols).expect("residues are below q")
    }
}

/// The expansion `λ = Σ c_k b^{k−1}` with `c_k ∈ {−1, …, b−2}`.
pub fn digit_expansion(b: u32, lambda: &BigInt) -> Expansion {
    let mut digits = Vec::new();
    if let Some(mut v) = lambda.to_i128() {
        let b = b as i128;
        while v != 0 {
            let mut c = v.rem_euclid(b);
            if c == b - 1 {
                c = -1;
            }
            digits.push(c as i64);
            v = (v - c) / b;
        }
    } else {
        let big_b = BigInt::from(b);
        let mut v = lambda.clone();
        while !v.is_zero() {
            let mut c = v.mod_floor(&big_b).to_i64().expect("residue below b");
            if c == b as i64 - 1 {
                c = -1;
            }
            digits.push(c);
            v = (v - c) / &big_b;
        }
    }
    Expansion { base: b, digits }
}

/// `x ∈ Z_{q,b} = {b^j a : j ≥ 0, a ∉ qZ}`.
pub fn in_zero_set(p: &MeasureParams, x: &BigInt) -> bool {
    if let Some(mut v) = x.to_i128() {
        let (q, b) = (p.q() as i128, p.b() as i128);
        if v == 0 {
            return false;
        }
        loop {
            if v % q != 0 {
                return true;
            }
            if v % b != 0 {
                return false;
            }
            v /= b;
        }
    }
    let (q, b) = (BigInt::from(p.q()), BigInt::from(p.b()));
    let mut v = x.abs();
    loop {
        if !v.is_multiple_of(&q) {
            return true;
        }
        if !v.is_multiple_of(&b) {
            return false;
        }
        v /= &b;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthoReport {
    pub orthogonal: bool,
    #[serde(serialize_with = "crate::json::big_pair_opt")]
    pub violating_pair: Option<(BigInt, BigInt)>,
    pub maximal_at_depth: Option<bool>,
    /// An integer whose addition keeps the set orthogonal.
    #[serde(serialize_with = "crate::json::big_opt")]
    pub extension_witness: Option<BigInt>,
}

fn require_zero(set: &BTreeSet<BigInt>) -> Result<()> {
    if set.contains(&BigInt::zero()) {
        Ok(())
    } else {
        Err(Error::MissingZero)
    }
}

/// Pairwise test `Λ − Λ ⊂ Z_{q,b} ∪ {0}`; reports the lexicographically first
/// failing pair of the ascending order.
pub fn is_orthogonal_set(p: &MeasureParams, set: &BTreeSet<BigInt>) -> Result<OrthoReport> {
    require_zero(set)?;
    let elems: Vec<&BigInt> = set.iter().collect();
    let violating_pair = first_violation(p, &elems);
    Ok(OrthoReport {
        orthogonal: violating_pair.is_none(),
        violating_pair,
        maximal_at_depth: None,
        extension_witness: None,
    })
}

fn first_violation(p: &MeasureParams, elems: &[&BigInt]) -> Option<(BigInt, BigInt)> {
    let small: Option<Vec<i128>> = elems.iter().map(|x| x.to_i128()).collect();
    if let Some(small) = small.filter(|v| v.iter().all(|x| x.abs() < i128::MAX / 2)) {
        let (q, b) = (p.q() as i128, p.b() as i128);
        let zero_set = |mut v: i128| loop {
            if v % q != 0 {
                return true;
            }
            if v % b != 0 {
                return false;
            }
            v /= b;
        };
        for i in 0..small.len() {
            for j in i + 1..small.len() {
                if !zero_set(small[j] - small[i]) {
                    return Some((elems[i].clone(), elems[j].clone()));
                }
            }
        }
        return None;
    }
    for i in 0..elems.len() {
        for j in i + 1..elems.len() {
            if !in_zero_set(p, &(elems[j] - elems[i])) {
                return Some((elems[i].clone(), elems[j].clone()));
            }
        }
    }
    None
}

/// Two elements of a set disagreeing on the label of a shared node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inconsistency {
    pub node: String,
    pub labels: (i64, i64),
    #[serde(serialize_with = "crate::json::big_pair")]
    pub elements: (BigInt, BigInt),
}

#[derive(Debug, Clone)]
pub enum TreeFromSet {
    Consistent(FiniteTrie),
    Inconsistent(Inconsistency),
}

impl TreeFromSet {
    pub fn trie(self) -> Option<FiniteTrie> {
        match self {
            TreeFromSet::Consistent(t) => Some(t),
            TreeFromSet::Inconsistent(_) => None,
        }
    }
}

/// Merges the digit branches of the elements into a partial trie.
///
/// Every branch is recorded to the length of the longest expansion, so a
/// short element conflicts with a longer one whenever the longer one puts a
/// nonzero label on the short one's zero-extension. Nodes on no branch stay
/// undetermined.
pub fn tree_from_set(p: &MeasureParams, set: &BTreeSet<BigInt>) -> Result<TreeFromSet> {
    require_zero(set)?;
    let expansions: Vec<(&BigInt, Expansion)> =
        set.iter().map(|x| (x, digit_expansion(p.b(), x))).collect();
    let depth = expansions.iter().map(|(_, e)| e.digits.len()).max().unwrap_or(0);
    let mut labels: BTreeMap<Word, (i64, &BigInt)> = BTreeMap::new();
    let mut branches = BTreeMap::new();
    for (x, e) in &expansions {
        let mut node = Word::empty(p.q());
        for k in 0..depth {
            let c = e.digits.get(k).copied().unwrap_or(0);
            node.push(c.rem_euclid(p.q() as i64) as u32);
            match labels.get(&node) {
                Some(&(prev, owner)) if prev != c => {
                    return Ok(TreeFromSet::Inconsistent(Inconsistency {
                        node: node.to_string(),
                        labels: (prev, c),
                        elements: (owner.clone(), (*x).clone()),
                    }));
                }
                Some(_) => {}
                None => {
                    labels.insert(node.clone(), (c, *x));
                }
            }
        }
        branches.insert(e.branch(p.q()).stem(), e.digits.len());
    }
    let labels = labels.into_iter().map(|(w, (c, _))| (w, c)).collect();
    Ok(TreeFromSet::Consistent(FiniteTrie::partial(*p, labels, branches)))
}

/// A new element next to the first node (in lexicographic order) with an
/// undetermined child: the child's symbol followed by zeros.
pub fn extension_witness(trie: &FiniteTrie) -> Option<BigInt> {
    let p = trie.params();
    let q = p.q();
    let mut stack = vec![(Word::empty(q), BigInt::zero())];
    while let Some((v, value)) = stack.pop() {
        let weight = crate::measure::big_pow(p.b(), v.len());
        let mut known = Vec::new();
        for s in 0..q {
            let c = v.child(s);
            match trie.label(&c) {
                None => return Some(value + &weight * s),
                Some(l) => known.push((c, &value + &weight * l)),
            }
        }
        if v.len() < trie.max_len() {
            stack.extend(known.into_iter().rev());
        }
    }
    None
}

/// Orthogonality together with the tree-level maximality scan at `depth`.
pub fn set_report(p: &MeasureParams, set: &BTreeSet<BigInt>, depth: usize) -> Result<OrthoReport> {
    let mut report = is_orthogonal_set(p, set)?;
    if report.orthogonal {
        if let TreeFromSet::Consistent(trie) = tree_from_set(p, set)? {
            report.maximal_at_depth = Some(is_maximal_at_depth(&trie, depth).maximal);
            report.extension_witness = extension_witness(&trie);
        }
    }
    Ok(report)
}
