use serde::{Deserialize, Serialize};

/// Outcome of one of the eight form-perturbation conditions.
///
/// Serialised with exactly the keys `condition`, `pass`, `margin`,
/// `tolerance`. Non-finite margins serialise as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: u8,
    pub pass: bool,
    pub margin: f64,
    pub tolerance: f64,
    #[serde(skip)]
    pub note: Option<String>,
}

impl ConditionCheck {
    pub fn new(condition: u8, pass: bool, margin: f64, tolerance: f64) -> Self {
        Self {
            condition,
            pass,
            margin,
            tolerance,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A set of condition outcomes. Serialises as a JSON array of
/// [`ConditionCheck`] objects.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn new(checks: Vec<ConditionCheck>) -> Self {
        Self { checks }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, condition: u8) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.condition == condition)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn merge(mut self, other: ConditionReport) -> Self {
        self.checks.extend(other.checks);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_are_fixed() {
        let report = ConditionReport::new(vec![ConditionCheck::new(2, true, 1.0, 1e-10).with_note("hidden")]);
        let json = serde_json::to_value(&report).unwrap();
        let obj = json.as_array().unwrap()[0].as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["condition", "margin", "pass", "tolerance"]);
    }
}
