use serde::Serialize;

use super::{AnalyzeError, CheckReport};
use crate::bounds::{Condition, TheoremId};

/// Whether a theorem's preconditions all hold, and which do not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Applicability {
    pub theorem: TheoremId,
    pub title: &'static str,
    pub applicable: bool,
    pub missing: Vec<Condition>,
}

/// Routes check reports to theorem preconditions.
///
/// A condition holds when at least one report covers it and every report
/// covering it holds. A theorem whose condition has no report at all is an
/// error rather than a silent "not applicable".
pub fn applicable_theorems(
    reports: &[CheckReport],
    theorems: &[TheoremId],
) -> Result<Vec<Applicability>, AnalyzeError> {
    theorems
        .iter()
        .map(|&theorem| {
            let mut missing = Vec::new();
            for &condition in theorem.conditions() {
                let mut covering = reports.iter().filter(|r| r.condition == condition).peekable();
                if covering.peek().is_none() {
                    return Err(AnalyzeError::MissingCheck { theorem, condition });
                }
                if !covering.all(|r| r.holds) {
                    missing.push(condition);
                }
            }
            Ok(Applicability {
                theorem,
                title: theorem.title(),
                applicable: missing.is_empty(),
                missing,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::{unchecked, CheckKind};

    fn report(condition: Condition, holds: bool) -> CheckReport {
        let mut r = CheckReport::new(condition, CheckKind::Deterministic);
        r.holds = holds;
        r
    }

    #[test]
    fn example1_shape() {
        let reports = vec![
            report(Condition::Nonnegativity, false),
            report(Condition::AdditiveDrift, true),
            report(Condition::StateBoundC, true),
            report(Condition::StepBoundCDeterministic, true),
        ];
        let out = applicable_theorems(
            &reports,
            &[
                TheoremId::AdditiveUpperBounded,
                TheoremId::AdditiveUpperBoundedStepSize,
                TheoremId::AdditiveUpperUnbounded,
            ],
        )
        .unwrap();
        for a in out {
            assert!(!a.applicable);
            assert_eq!(a.missing, vec![Condition::Nonnegativity]);
        }
    }

    #[test]
    fn unchecked_blocks_and_missing_errors() {
        let reports = vec![
            report(Condition::Nonnegativity, true),
            report(Condition::AdditiveDrift, true),
            unchecked(Condition::StateBoundC, "no bound supplied"),
        ];
        let out = applicable_theorems(
            &reports,
            &[TheoremId::AdditiveUpperBounded, TheoremId::AdditiveUpperUnbounded],
        )
        .unwrap();
        assert_eq!(out[0].missing, vec![Condition::StateBoundC]);
        assert!(out[1].applicable);
        assert_eq!(
            applicable_theorems(&reports, &[TheoremId::MultiplicativeUpperBelowTarget]),
            Err(AnalyzeError::MissingCheck {
                theorem: TheoremId::MultiplicativeUpperBelowTarget,
                condition: Condition::MultiplicativeDrift
            })
        );
    }

    #[test]
    fn every_report_must_hold() {
        let reports = vec![
            report(Condition::Nonnegativity, true),
            report(Condition::AdditiveDrift, true),
            report(Condition::AdditiveDrift, false),
        ];
        let out = applicable_theorems(&reports, &[TheoremId::AdditiveUpperUnbounded]).unwrap();
        assert_eq!(out[0].missing, vec![Condition::AdditiveDrift]);
    }
}
