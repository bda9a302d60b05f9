//! Text and JSON renderings of property suite reports.

use revccs_core::suites::SuiteReport;
use serde::Serialize;

/// `{ok, violated_condition, witness}` for the first failing property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub ok: bool,
    pub violated_condition: Option<String>,
    pub witness: Option<String>,
}

impl Verdict {
    pub fn of(report: &SuiteReport) -> Verdict {
        match report.first_failure() {
            None => Verdict { ok: true, violated_condition: None, witness: None },
            Some(p) => {
                Verdict { ok: false, violated_condition: Some(p.condition.clone()), witness: Some(p.detail.clone()) }
            }
        }
    }
}

/// One line per property, preceded by the explored sizes.
pub fn render_report(report: &SuiteReport) -> String {
    let mut out = format!(
        "{} to depth {}: {} places, {} transitions explored\n",
        report.term, report.depth, report.explored_places, report.explored_transitions
    );
    for p in &report.properties {
        let status = if p.ok { "ok  " } else { "FAIL" };
        let what = if p.ok { p.detail.clone() } else { format!("{}: {}", p.condition, p.detail) };
        out.push_str(&format!("{status} {:<20} {what}\n", p.name));
    }
    out
}
