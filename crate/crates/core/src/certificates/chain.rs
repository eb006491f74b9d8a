use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

/// Comparison asserted by one step of a certificate chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    fn holds(self, ord: Ordering) -> bool {
        match self {
            Relation::Eq => ord == Ordering::Equal,
            Relation::Lt => ord == Ordering::Less,
            Relation::Le => ord != Ordering::Greater,
            Relation::Gt => ord == Ordering::Greater,
            Relation::Ge => ord != Ordering::Less,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One exact comparison, with both sides rendered as `p/q` strings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub label: String,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    pub holds: bool,
}

/// A named exact value reported alongside a certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub label: String,
    pub value: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Failed,
    /// The bound could not be established at the truncation orders tried.
    Inconclusive,
}

/// Result of checking one certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    pub name: String,
    pub claim: String,
    pub verified: bool,
    pub status: Status,
    pub witness: Vec<Witness>,
    pub steps: Vec<StepRecord>,
    pub failed_step: Option<String>,
}

impl CertificateReport {
    pub fn summary_line(&self) -> String {
        let tag = match self.status {
            Status::Verified => "PASS",
            Status::Failed => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        match &self.failed_step {
            Some(step) => format!("{tag} {}: {} (failed at: {step})", self.name, self.claim),
            None => format!("{tag} {}: {}", self.name, self.claim),
        }
    }
}

/// Builder for a sequence of exact rational comparisons. Every step is
/// evaluated even after a failure so the report shows the whole chain.
#[derive(Debug, Default)]
pub struct Chain {
    steps: Vec<StepRecord>,
    witness: Vec<Witness>,
}

impl Chain {
    pub fn new() -> Self {
        Chain::default()
    }

    pub fn check(
        &mut self,
        label: impl Into<String>,
        lhs: &BigRational,
        relation: Relation,
        rhs: &BigRational,
    ) -> bool {
        let holds = relation.holds(lhs.cmp(rhs));
        self.steps.push(StepRecord {
            label: label.into(),
            lhs: lhs.to_string(),
            relation,
            rhs: rhs.to_string(),
            holds,
        });
        holds
    }

    pub fn eq(&mut self, label: impl Into<String>, lhs: &BigRational, rhs: &BigRational) -> bool {
        self.check(label, lhs, Relation::Eq, rhs)
    }

    pub fn lt(&mut self, label: impl Into<String>, lhs: &BigRational, rhs: &BigRational) -> bool {
        self.check(label, lhs, Relation::Lt, rhs)
    }

    pub fn le(&mut self, label: impl Into<String>, lhs: &BigRational, rhs: &BigRational) -> bool {
        self.check(label, lhs, Relation::Le, rhs)
    }

    pub fn gt(&mut self, label: impl Into<String>, lhs: &BigRational, rhs: &BigRational) -> bool {
        self.check(label, lhs, Relation::Gt, rhs)
    }

    /// Records a previously verified certificate as a prerequisite step.
    pub fn require(&mut self, sub: &CertificateReport) -> bool {
        self.steps.push(StepRecord {
            label: format!("prerequisite {}", sub.name),
            lhs: sub.claim.clone(),
            relation: Relation::Eq,
            rhs: if sub.verified {
                "verified"
            } else {
                "not verified"
            }
            .to_string(),
            holds: sub.verified,
        });
        sub.verified
    }

    pub fn witness(&mut self, label: impl Into<String>, value: &BigRational) {
        self.witness.push(Witness {
            label: label.into(),
            value: value.to_string(),
        });
    }

    pub fn all_hold(&self) -> bool {
        self.steps.iter().all(|s| s.holds)
    }

    pub fn finish(self, name: &str, claim: impl Into<String>) -> CertificateReport {
        let failed_step = self
            .steps
            .iter()
            .find(|s| !s.holds)
            .map(|s| s.label.clone());
        let verified = failed_step.is_none() && !self.steps.is_empty();
        CertificateReport {
            name: name.to_string(),
            claim: claim.into(),
            verified,
            status: if verified {
                Status::Verified
            } else {
                Status::Failed
            },
            witness: self.witness,
            steps: self.steps,
            failed_step,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn records_first_failure() {
        let mut c = Chain::new();
        assert!(c.lt("a", &ratio(1, 3), &ratio(1, 2)));
        assert!(!c.gt("b", &ratio(1, 3), &ratio(1, 2)));
        assert!(c.le("c", &ratio(1, 2), &ratio(2, 4)));
        let r = c.finish("demo", "claim");
        assert!(!r.verified);
        assert_eq!(r.status, Status::Failed);
        assert_eq!(r.failed_step.as_deref(), Some("b"));
        assert_eq!(r.steps.len(), 3);
        assert_eq!(r.steps[0].lhs, "1/3");
    }

    #[test]
    fn empty_chain_is_not_verified() {
        assert!(!Chain::new().finish("empty", "nothing").verified);
    }
}
