//! Plain-text report rendering.

use std::fmt::Write;

use wvlab_core::report::{format_complex, format_significant};
use wvlab_core::{RunReport, Scenario};

fn header(out: &mut String, report: &RunReport) {
    let _ = writeln!(out, "scenario: {} (sha256 {})", report.scenario.name, report.scenario.checksum);
    let _ = writeln!(out, "tolerance: {}", format_significant(report.tolerance, 12));
    let _ = writeln!(
        out,
        "postselection probability: {}{}",
        format_significant(report.postselection_probability, 12),
        if report.degenerate { " (degenerate)" } else { "" }
    );
}

fn weak_value_table(out: &mut String, report: &RunReport) {
    let _ = writeln!(out, "\nweak values");
    let _ = writeln!(out, "{:<8} {:<8} {:<32} transition amplitude", "site", "stage", "weak value");
    for w in &report.weak_values {
        let value = w.value.map(format_complex).unwrap_or_else(|| "degenerate".into());
        let _ = writeln!(out, "{:<8} {:<8} {:<32} {}", w.site, w.stage, value, format_complex(w.numerator));
    }
    if !report.sum_rules.is_empty() {
        let _ = writeln!(out, "\nsum rules");
        for rule in &report.sum_rules {
            let total = rule.total.map(format_complex).unwrap_or_else(|| "degenerate".into());
            let _ = writeln!(out, "{:<8} {{{}}} = {}", rule.stage, rule.sites.join(", "), total);
        }
    }
}

pub fn weak_values(report: &RunReport) -> String {
    let mut out = String::new();
    header(&mut out, report);
    weak_value_table(&mut out, report);
    out
}

fn pattern_name(clicked: &[String]) -> String {
    if clicked.is_empty() {
        "none".into()
    } else {
        clicked.join("+")
    }
}

fn disturbance_table(out: &mut String, report: &RunReport) {
    let _ = writeln!(out, "\ndisturbance of vanishing transition amplitudes");
    if report.disturbance.is_empty() {
        let _ = writeln!(out, "(no vanishing transition amplitudes)");
    }
    for d in &report.disturbance {
        let _ = writeln!(
            out,
            "{:<8} {:<8} undisturbed {}  branch norm {}  {}",
            d.site,
            d.stage,
            format_complex(d.undisturbed_amplitude),
            format_significant(d.branch_norm, 12),
            if d.disturbed { "DISTURBED" } else { "undisturbed" }
        );
        for b in d.branches.iter().filter(|b| b.amplitude.norm() > report.tolerance) {
            let _ = writeln!(out, "    {:<24} {}", pattern_name(&b.shifted), format_complex(b.amplitude));
        }
    }
}

pub fn run(report: &RunReport) -> String {
    let mut out = String::new();
    header(&mut out, report);
    if !report.scenario.coupling_order.is_empty() {
        let _ = writeln!(out, "coupling order: {}", report.scenario.coupling_order.join(", "));
    }
    weak_value_table(&mut out, report);
    if report.degenerate {
        let _ = writeln!(out, "\nno conditional statistics: postselection is degenerate");
    } else {
        if !report.clicks.is_empty() {
            let _ = writeln!(out, "\nclick probabilities");
            for c in &report.clicks {
                let _ = writeln!(out, "{:<8} {}", c.register, format_significant(c.probability, 12));
            }
            let _ = writeln!(out, "\nclick patterns (model-derived)");
            for p in &report.patterns {
                let _ = writeln!(out, "{:<24} {}", pattern_name(&p.clicked), format_significant(p.probability, 12));
            }
        }
        if !report.weak_stats.is_empty() {
            let _ = writeln!(out, "\nweak pointers");
            let _ = writeln!(out, "{:<8} {:<24} variance", "register", "mean");
            for w in &report.weak_stats {
                let _ = writeln!(
                    out,
                    "{:<8} {:<24} {}",
                    w.register,
                    format_significant(w.mean, 12),
                    format_significant(w.variance, 12)
                );
            }
        }
    }
    disturbance_table(&mut out, report);
    out
}

pub fn disturbance(report: &RunReport) -> String {
    let mut out = String::new();
    header(&mut out, report);
    disturbance_table(&mut out, report);
    out
}

pub fn validation(sc: &Scenario) -> String {
    format!(
        "valid: {} (dim {}, {} stages, {} sites, {} pointers, sha256 {})\n",
        sc.name(),
        sc.dim(),
        sc.timeline().stages().len(),
        sc.sites().len(),
        sc.pointers().len(),
        sc.checksum()
    )
}
