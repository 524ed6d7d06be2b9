//! Pass/fail bookkeeping for the acceptance suite.

use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let budget = self.budget.map(|b| format!(" of {:.0?}", b)).unwrap_or_default();
        write!(
            f,
            "{} {:>2} {}: {} [{:.2?}{}]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed,
            budget
        )
    }
}

/// Accumulates sub-checks of one criterion.
#[derive(Debug, Default)]
pub struct Checks {
    notes: Vec<String>,
    failed: bool,
}

impl Checks {
    pub fn check(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        self.notes.push(if ok { note } else { format!("FAILED {note}") });
        self.failed |= !ok;
    }

    pub fn ok(&self) -> bool {
        !self.failed
    }

    pub fn summary(&self) -> String {
        self.notes.join("; ")
    }
}

/// Runs one criterion; it passes when every check passes within the budget.
pub fn criterion(id: u32, name: &str, budget: Option<Duration>, body: impl FnOnce(&mut Checks)) -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    body(&mut checks);
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let mut detail = checks.summary();
    if !in_time {
        detail.push_str("; FAILED runtime budget");
    }
    Outcome { id, name: name.into(), pass: checks.ok() && in_time, detail, elapsed, budget }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn any_failed_check_fails_the_criterion() {
        let o = criterion(1, "x", None, |c| {
            c.check(true, "a");
            c.check(false, "b");
        });
        assert!(!o.pass);
        assert_eq!(o.detail, "a; FAILED b");
        assert!(o.to_string().starts_with("FAIL  1 x: "));
    }

    #[test]
    fn budget_is_enforced() {
        let o = criterion(2, "slow", Some(Duration::ZERO), |c| {
            std::thread::sleep(Duration::from_millis(2));
            c.check(true, "fine");
        });
        assert!(!o.pass);
        assert!(o.detail.ends_with("FAILED runtime budget"));
        assert!(criterion(3, "fast", None, |c| c.check(true, "ok")).pass);
    }
}
