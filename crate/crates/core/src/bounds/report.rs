use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::Error;

/// One named inequality check.
///
/// `worst_margin` is the largest `left/right` ratio (or a check-specific
/// relative mismatch) and `pass` holds exactly when `worst_margin <= slack`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub check: String,
    pub inequality: String,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub worst_margin: f64,
    pub slack: f64,
    pub pass: bool,
    pub details: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

fn ratio(left: f64, right: f64) -> f64 {
    if left <= 0.0 {
        0.0
    } else {
        left / right
    }
}

impl CheckEntry {
    /// Margin is `max left_i / right_i`.
    pub fn from_ratios(
        check: impl Into<String>,
        inequality: impl Into<String>,
        left: Vec<f64>,
        right: Vec<f64>,
        slack: f64,
    ) -> Self {
        let margin = left
            .iter()
            .zip(&right)
            .map(|(l, r)| ratio(*l, *r))
            .fold(f64::NEG_INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        Self::from_margin(check, inequality, left, right, margin, slack)
    }

    pub fn from_margin(
        check: impl Into<String>,
        inequality: impl Into<String>,
        left: Vec<f64>,
        right: Vec<f64>,
        worst_margin: f64,
        slack: f64,
    ) -> Self {
        CheckEntry {
            check: check.into(),
            inequality: inequality.into(),
            left,
            right,
            worst_margin,
            slack,
            pass: worst_margin <= slack,
            details: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// A check whose computation aborted; recorded as failing.
    pub fn failed(check: impl Into<String>, inequality: impl Into<String>, error: &Error) -> Self {
        let mut entry = Self::from_margin(
            check,
            inequality,
            Vec::new(),
            Vec::new(),
            f64::INFINITY,
            1.0,
        );
        entry.notes.push(error.to_string());
        entry
    }

    pub fn with_detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.push((key.into(), value));
        self
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.notes.push(note);
        self
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, check: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.check == check)
    }
}
