//! One checked inequality instance.

use serde::{Deserialize, Serialize};

/// Relative slack granted to floating-point comparisons `lhs <= constant * rhs`.
pub const REL_SLACK: f64 = 1e-12;

/// `lhs <= constant * rhs`, with `ratio = lhs / rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// `lhs / rhs` with 0/0 = 0 and x/0 = ∞.
pub fn safe_ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

impl VerificationReport {
    /// Checks `lhs <= constant * rhs` up to [`REL_SLACK`].
    pub fn bound(name: impl Into<String>, lhs: f64, rhs: f64, constant: f64) -> Self {
        let ratio = safe_ratio(lhs, rhs);
        let pass = !lhs.is_nan()
            && !rhs.is_nan()
            && (rhs.is_infinite() || lhs <= constant * rhs * (1.0 + REL_SLACK) + f64::MIN_POSITIVE);
        VerificationReport { name: name.into(), lhs, rhs, constant, ratio, pass }
    }

    /// A report whose verdict was decided elsewhere.
    pub fn with_verdict(name: impl Into<String>, lhs: f64, rhs: f64, constant: f64, pass: bool) -> Self {
        VerificationReport { name: name.into(), lhs, rhs, constant, ratio: safe_ratio(lhs, rhs), pass }
    }

    /// How much room is left: `constant - ratio` (negative on failure).
    pub fn margin(&self) -> f64 {
        self.constant - self.ratio
    }

    pub const CSV_HEADER: [&'static str; 6] = ["name", "lhs", "rhs", "constant", "ratio", "pass"];

    pub fn csv_record(&self) -> [String; 6] {
        [
            self.name.clone(),
            fmt_num(self.lhs),
            fmt_num(self.rhs),
            fmt_num(self.constant),
            fmt_num(self.ratio),
            self.pass.to_string(),
        ]
    }
}

/// Shortest round-trip float text; `inf`/`nan` spelled out.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_semantics() {
        assert!(VerificationReport::bound("a", 1.0, 1.0, 1.0).pass);
        assert!(!VerificationReport::bound("b", 2.0, 1.0, 1.5).pass);
        let r = VerificationReport::bound("c", 1.0, f64::INFINITY, 1.0);
        assert!(r.pass);
        assert_eq!(r.ratio, 0.0);
        assert_eq!(VerificationReport::bound("d", 0.0, 0.0, 1.0).ratio, 0.0);
    }

    #[test]
    fn csv_numbers() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }
}
