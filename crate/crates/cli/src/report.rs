use serde::{Deserialize, Serialize};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub trials: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: &str, trials: usize, max_violation: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.to_string(),
            trials,
            max_violation,
            tolerance,
            // NaN violations fail
            pass: max_violation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub outer_size: usize,
    pub inner_size: usize,
    pub trials: Option<usize>,
    pub spec_pairs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(environment: Environment, checks: Vec<CheckRecord>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        VerificationReport {
            environment,
            checks,
            pass,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,trials,max_violation,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{:e},{:e},{}\n",
                c.name, c.trials, c.max_violation, c.tolerance, c.pass
            ));
        }
        out
    }
}
