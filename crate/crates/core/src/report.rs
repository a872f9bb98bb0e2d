use std::fmt;

/// Outcome of a verification sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub pass: bool,
    /// Number of individual identities or comparisons evaluated.
    pub checked: u64,
    /// Counterexamples on failure; matched data on success.
    pub witnesses: Vec<String>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass: true,
            checked: 0,
            witnesses: Vec::new(),
        }
    }

    /// Records one check; failures keep at most 20 witnesses.
    pub fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            if self.pass {
                self.witnesses.clear();
            }
            self.pass = false;
            if self.witnesses.len() < 20 {
                self.witnesses.push(witness());
            }
        }
    }

    /// Adds a note shown only while the report is passing.
    pub fn note(&mut self, s: impl Into<String>) {
        if self.pass {
            self.witnesses.push(s.into());
        }
    }

    /// Folds in a report on the same subject, keeping witnesses unprefixed.
    pub fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        if !other.pass {
            if self.pass {
                self.witnesses.clear();
            }
            self.pass = false;
            let room = 20usize.saturating_sub(self.witnesses.len());
            self.witnesses.extend(other.witnesses.into_iter().take(room));
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        if !other.pass {
            if self.pass {
                self.witnesses.clear();
            }
            self.pass = false;
            self.witnesses
                .extend(other.witnesses.into_iter().map(|w| format!("{}: {w}", other.name)));
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "pass" } else { "FAIL" };
        write!(f, "{}: {status} ({} checks)", self.name, self.checked)?;
        for w in &self.witnesses {
            write!(f, "\n  {w}")?;
        }
        Ok(())
    }
}
