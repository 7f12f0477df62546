use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub check: String,
    pub location: String,
    pub detail: String,
}

/// Outcome of a batch of checks. Empty failure list means pass.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Report {
    pub title: String,
    pub checked: usize,
    pub failures: Vec<Finding>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report {
            title: title.into(),
            checked: 0,
            failures: Vec::new(),
        }
    }

    pub fn pass(&mut self) {
        self.checked += 1;
    }

    pub fn fail(&mut self, check: impl Into<String>, location: impl Into<String>, detail: impl Into<String>) {
        self.checked += 1;
        self.failures.push(Finding {
            check: check.into(),
            location: location.into(),
            detail: detail.into(),
        });
    }

    pub fn record(&mut self, ok: bool, check: &str, location: impl Into<String>, detail: impl FnOnce() -> String) {
        if ok {
            self.pass();
        } else {
            self.fail(check, location, detail());
        }
    }

    pub fn is_pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }

    pub fn failing_locations(&self) -> Vec<&str> {
        self.failures.iter().map(|f| f.location.as_str()).collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.is_pass() { "pass" } else { "FAIL" };
        writeln!(f, "{}: {} ({} checks, {} failures)", self.title, status, self.checked, self.failures.len())?;
        for x in &self.failures {
            writeln!(f, "  {} at {}: {}", x.check, x.location, x.detail)?;
        }
        Ok(())
    }
}
