use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a check was evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum Location {
    /// A chart point `u ∈ U`.
    Chart(Vec<f64>),
    /// Index of a random sample (the worst one when the record aggregates many).
    Sample(u64),
    /// A whole scan or suite.
    Global,
}

/// One residual or inequality check.
///
/// For identities `residual = lhs - rhs`; for inequalities `residual` is the
/// amount of violation (zero when satisfied). The verdict is `Pass` exactly when
/// `|residual| ≤ tolerance`, unless the record was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRecord {
    pub check_id: String,
    pub location: Location,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub note: String,
}

impl VerificationRecord {
    /// Builds a record and derives the verdict from `residual` and `tolerance`.
    /// Non-finite residuals fail.
    pub fn judged(
        check_id: impl Into<String>,
        location: Location,
        lhs: f64,
        rhs: f64,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        let verdict = if residual.is_finite() && residual.abs() <= tolerance { Verdict::Pass } else { Verdict::Fail };
        VerificationRecord {
            check_id: check_id.into(),
            location,
            lhs,
            rhs,
            residual,
            tolerance,
            verdict,
            note: String::new(),
        }
    }

    /// Identity check `lhs = rhs`.
    pub fn identity(check_id: impl Into<String>, location: Location, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::judged(check_id, location, lhs, rhs, lhs - rhs, tolerance)
    }

    /// Inequality check `lhs ≤ rhs`; the residual is the violation `max(0, lhs - rhs)`.
    pub fn at_most(check_id: impl Into<String>, location: Location, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let violation = if lhs.is_nan() || rhs.is_nan() { f64::NAN } else { (lhs - rhs).max(0.0) };
        Self::judged(check_id, location, lhs, rhs, violation, tolerance)
    }

    pub fn skipped(check_id: impl Into<String>, location: Location, note: impl Into<String>) -> Self {
        VerificationRecord {
            check_id: check_id.into(),
            location,
            lhs: 0.0,
            rhs: 0.0,
            residual: 0.0,
            tolerance: 0.0,
            verdict: Verdict::Skipped,
            note: note.into(),
        }
    }

    /// A failure that carries no meaningful numbers (numerical breakdown).
    pub fn failure(check_id: impl Into<String>, location: Location, note: impl ToString) -> Self {
        VerificationRecord {
            check_id: check_id.into(),
            location,
            lhs: f64::NAN,
            rhs: f64::NAN,
            residual: f64::NAN,
            tolerance: 0.0,
            verdict: Verdict::Fail,
            note: note.to_string(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Keeps the record with the largest `|residual|/tolerance` ratio among many
/// instances of one check; used to fold random-sample sweeps into one record.
#[derive(Debug, Clone)]
pub struct WorstCase {
    check_id: String,
    worst: Option<VerificationRecord>,
    ratio: f64,
    count: u64,
    failures: u64,
    skipped: u64,
}

impl WorstCase {
    pub fn new(check_id: impl Into<String>) -> Self {
        WorstCase { check_id: check_id.into(), worst: None, ratio: -1.0, count: 0, failures: 0, skipped: 0 }
    }

    pub fn push(&mut self, rec: VerificationRecord) {
        if rec.verdict == Verdict::Skipped {
            self.skipped += 1;
            return;
        }
        self.count += 1;
        if rec.failed() {
            self.failures += 1;
        }
        let ratio = if rec.residual.is_finite() {
            if rec.tolerance > 0.0 {
                rec.residual.abs() / rec.tolerance
            } else if rec.residual == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            f64::INFINITY
        };
        if ratio > self.ratio {
            self.ratio = ratio;
            self.worst = Some(rec);
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn failures(&self) -> u64 {
        self.failures
    }

    pub fn finish(self) -> VerificationRecord {
        match self.worst {
            Some(mut rec) => {
                rec.check_id = self.check_id;
                let mut note = alloc::format!("worst of {} instances, {} failing", self.count, self.failures);
                if self.skipped > 0 {
                    note = alloc::format!("{note}, {} skipped", self.skipped);
                }
                rec.note = if rec.note.is_empty() { note } else { alloc::format!("{note}; {}", rec.note) };
                if self.failures > 0 {
                    rec.verdict = Verdict::Fail;
                }
                rec
            }
            None => VerificationRecord::skipped(self.check_id, Location::Global, "no admissible instances"),
        }
    }
}
