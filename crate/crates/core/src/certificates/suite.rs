use rayon::prelude::*;
use serde::Serialize;

use super::chain::CertificateReport;
use super::exact::{
    verify_a_envelope, verify_bsup, verify_f300_alpha751, verify_f300_with_target,
    verify_k_requirement, verify_lower_bound_chain, verify_one_point_alpha34,
    verify_one_point_alpha751, Variant,
};
use crate::rational::ratio;
use crate::{Error, Result};

type Check = fn(bool) -> CertificateReport;

const CHECKS: [(&str, Check); 10] = [
    ("a-envelope", |_| verify_a_envelope()),
    ("f300-alpha34", |tamper| {
        let target = if tamper {
            ratio(50, 1000)
        } else {
            ratio(51, 1000)
        };
        verify_f300_with_target(&target)
    }),
    ("one-point-alpha34", |_| verify_one_point_alpha34()),
    ("bsup-alpha34", |_| verify_bsup(Variant::Alpha34)),
    ("k-alpha34", |_| verify_k_requirement(Variant::Alpha34)),
    ("f300-alpha751", |_| verify_f300_alpha751()),
    ("one-point-alpha751", |_| verify_one_point_alpha751()),
    ("bsup-alpha751", |_| verify_bsup(Variant::Alpha751)),
    ("k-alpha751", |_| verify_k_requirement(Variant::Alpha751)),
    ("lower-bound-alpha753", |_| verify_lower_bound_chain()),
];

pub fn certificate_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// Run only the certificate with this name.
    pub only: Option<String>,
    /// Replace the `f(300)` target by `50/1000`, which must fail.
    pub tamper: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub certificates: Vec<CertificateReport>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn all_verified(&self) -> bool {
        self.certificates.iter().all(|c| c.verified)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.certificates {
            out.push_str(&c.summary_line());
            out.push('\n');
        }
        let passed = self.certificates.iter().filter(|c| c.verified).count();
        out.push_str(&format!(
            "{passed}/{} certificates verified\n",
            self.certificates.len()
        ));
        for n in &self.notes {
            out.push_str("note: ");
            out.push_str(n);
            out.push('\n');
        }
        out
    }
}

/// Runs the certificate suite concurrently; reports keep the fixed order of
/// [`certificate_names`].
pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let selected: Vec<&(&str, Check)> = match &opts.only {
        None => CHECKS.iter().collect(),
        Some(name) => {
            // A bare family name such as `f300` selects its alpha34 variant.
            let default_variant = format!("{name}-alpha34");
            let hit: Vec<_> = CHECKS
                .iter()
                .filter(|(n, _)| n == name)
                .chain(CHECKS.iter().filter(|(n, _)| *n == default_variant))
                .take(1)
                .collect();
            if hit.is_empty() {
                return Err(Error::invalid(format!(
                    "unknown certificate '{name}'; known: {}",
                    certificate_names().join(", ")
                )));
            }
            hit
        }
    };
    let certificates = selected
        .par_iter()
        .map(|(_, check)| check(opts.tamper))
        .collect();
    Ok(SuiteReport {
        certificates,
        notes: vec![
            "the rate constant C = 2^alpha * 1000 with alpha = 3/4 + 0.001 is the value \
             fixed inside the proof; no tighter constant is claimed"
                .to_string(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_suite_verifies_in_order() {
        let r = run_suite(&SuiteOptions::default()).unwrap();
        assert!(r.all_verified(), "{}", r.summary());
        let names: Vec<_> = r.certificates.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, certificate_names());
    }

    #[test]
    fn tamper_fails_f300() {
        let r = run_suite(&SuiteOptions {
            only: None,
            tamper: true,
        })
        .unwrap();
        assert!(!r.all_verified());
        let failed: Vec<_> = r
            .certificates
            .iter()
            .filter(|c| !c.verified)
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(failed, ["f300-alpha34"]);
    }

    #[test]
    fn only_selects_one() {
        let r = run_suite(&SuiteOptions {
            only: Some("k-alpha751".into()),
            tamper: false,
        })
        .unwrap();
        assert_eq!(r.certificates.len(), 1);
        let r = run_suite(&SuiteOptions {
            only: Some("f300".into()),
            tamper: false,
        })
        .unwrap();
        assert_eq!(r.certificates[0].name, "f300-alpha34");
        assert!(run_suite(&SuiteOptions {
            only: Some("nope".into()),
            tamper: false
        })
        .is_err());
    }
}
