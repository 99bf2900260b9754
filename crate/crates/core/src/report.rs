use serde::{Serialize, Serializer};

use crate::poset::DownSet;

/// Value of a covering invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Value {
    Finite(usize),
    Infinite,
    Unknown,
}

impl Value {
    pub fn finite(self) -> Option<usize> {
        match self {
            Value::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Finite(v) => write!(f, "{}", v),
            Value::Infinite => f.write_str("inf"),
            Value::Unknown => f.write_str("unknown"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Finite(v) => s.serialize_u64(*v as u64),
            Value::Infinite => s.serialize_str("inf"),
            Value::Unknown => s.serialize_str("unknown"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    Exact,
    UpperBoundAtBudget,
}

/// How the candidate opens of a cover search were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// The whole space passes the criterion.
    WholeSpace,
    /// Some minimal open fails the criterion, so no cover exists.
    Unbounded,
    /// All maximal passing opens were enumerated.
    Exhaustive,
    /// Candidates inherited from a coarser level were already optimal.
    Inherited,
    /// Candidates were grown heuristically from seeds.
    Growth,
}

/// Result of one level of a per-`k` computation.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub k: usize,
    pub elements: usize,
    pub value: Value,
    pub certified: Certification,
    pub strategy: Strategy,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexityReport {
    pub invariant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub value: Value,
    pub certified: Certification,
    pub lower_bound: usize,
    pub strategy: Strategy,
    pub ambient_size: usize,
    /// Each member of the cover, listed by all of its element labels.
    pub cover: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<serde_json::Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<LevelSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub elapsed_ms: u64,
    #[serde(skip)]
    pub cover_sets: Vec<DownSet>,
}

impl ComplexityReport {
    pub fn is_exact(&self) -> bool {
        self.certified == Certification::Exact && self.value != Value::Unknown
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut head = self.invariant.clone();
        let params: Vec<String> = [("n", self.n), ("m", self.m), ("k", self.k)]
            .iter()
            .filter_map(|(name, v)| v.map(|v| format!("{}={}", name, v)))
            .collect();
        if !params.is_empty() {
            head.push_str(&format!(" ({})", params.join(", ")));
        }
        if let Some(v) = &self.variant {
            head.push_str(&format!(" [{}]", v));
        }
        let cert = match self.certified {
            Certification::Exact => "exact",
            Certification::UpperBoundAtBudget => "upper bound at budget",
        };
        out.push_str(&format!("{} = {} ({})\n", head, self.value, cert));
        out.push_str(&format!("ambient size: {}\n", self.ambient_size));
        out.push_str(&format!("lower bound: {}\n", self.lower_bound));
        out.push_str(&format!("strategy: {:?}\n", self.strategy));
        if let Some(levels) = &self.levels {
            for l in levels {
                out.push_str(&format!("  k={}: {} elements, value {} ({:?})\n", l.k, l.elements, l.value, l.certified));
            }
        }
        for (i, member) in self.cover.iter().enumerate() {
            let shown: Vec<&str> = member.iter().take(12).map(String::as_str).collect();
            let more = if member.len() > 12 {
                format!(" ... ({} elements)", member.len())
            } else {
                String::new()
            };
            out.push_str(&format!("cover[{}]: {{{}}}{}\n", i, shown.join(", "), more));
        }
        if let Some(note) = &self.note {
            out.push_str(&format!("note: {}\n", note));
        }
        out.push_str(&format!("elapsed: {} ms\n", self.elapsed_ms));
        out
    }
}
