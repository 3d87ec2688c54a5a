//! Experiment execution: weak-value tables, pointer simulations and the
//! disturbance analysis.

use crate::algebra::{Operator, C64};
use crate::error::Result;
use crate::pointer::{ClickStats, CompositeState, PointerRegister, PointerState, Postselection};
use crate::report::{BranchAmplitude, DisturbanceEntry, RunReport, ScenarioInfo, SumRuleResult};
use crate::scenario::Scenario;
use crate::two_state::WeakValueResult;

const PATTERN_NOTE: &str =
    "click-pattern probabilities are model-derived from exact branch amplitudes";

/// Weak value of every declared site at its stage.
pub fn weak_values(sc: &Scenario) -> Result<Vec<WeakValueResult>> {
    let tsv = sc.two_state();
    sc.sites()
        .iter()
        .map(|s| tsv.weak_value(&s.label, &s.projector, &s.stage))
        .collect()
}

/// Sum rule of every declared complete set.
pub fn sum_rules(sc: &Scenario) -> Result<Vec<SumRuleResult>> {
    let tsv = sc.two_state();
    let mut out = Vec::with_capacity(sc.complete_sets().len());
    for set in sc.complete_sets() {
        let projectors = set
            .sites
            .iter()
            .map(|label| sc.site(label).map(|s| &s.projector))
            .collect::<Result<Vec<_>>>()?;
        let total = match tsv.sum_rule(&projectors, &set.stage) {
            Ok(total) => Some(total),
            Err(crate::Error::DegeneratePostselection { .. }) => None,
            Err(e) => return Err(e),
        };
        out.push(SumRuleResult {
            stage: set.stage.clone(),
            sites: set.sites.clone(),
            total,
        });
    }
    Ok(out)
}

/// Weak values and sum rules of the undisturbed scenario. Pointer
/// placements are ignored.
pub fn run_weak_values(sc: &Scenario) -> Result<RunReport> {
    let amplitude = sc.two_state().postselection_amplitude()?;
    let probability = amplitude.norm_sqr();
    Ok(RunReport {
        scenario: info(sc, Vec::new()),
        weak_values: weak_values(sc)?,
        sum_rules: sum_rules(sc)?,
        postselection_probability: probability,
        degenerate: amplitude.norm() <= sc.tolerance(),
        clicks: Vec::new(),
        patterns: Vec::new(),
        weak_stats: Vec::new(),
        disturbance: Vec::new(),
        tolerance: sc.tolerance(),
        notes: Vec::new(),
    })
}

/// Full pointer simulation: couples every pointer at its site's stage,
/// postselects at the last stage and reads out all registers.
pub fn run_pointers(sc: &Scenario) -> Result<RunReport> {
    let mut report = run_weak_values(sc)?;
    let (order, state) = simulate(sc, None)?;
    let selection = state.postselect(sc.prepost().post(), sc.tolerance())?;
    report.scenario = info(sc, order);
    report.postselection_probability = selection.probability;
    report.degenerate = selection.is_degenerate();
    if let Some(cond) = &selection.conditional {
        let stats = readout(cond, sc.tolerance());
        report.clicks = stats.clicks;
        report.patterns = stats.patterns;
        report.weak_stats = stats.weak;
        report.notes.push(PATTERN_NOTE.to_string());
    }
    report.disturbance = disturbance_table(sc)?;
    Ok(report)
}

/// Composite state at the last stage, with registers in declaration order.
///
/// At each stage the couplings are applied in declaration order, then the
/// optional branch filter, then the segment unitary.
fn simulate(sc: &Scenario, filter: Option<(&str, &Operator)>) -> Result<(Vec<String>, CompositeState)> {
    let registers = sc
        .pointers()
        .iter()
        .cloned()
        .map(PointerRegister::new)
        .collect::<Result<Vec<_>>>()?;
    let mut state = CompositeState::new(sc.prepost().pre().clone(), registers)?;
    let timeline = sc.timeline();
    let mut order = Vec::with_capacity(sc.pointers().len());
    for (k, stage) in timeline.stages().iter().enumerate() {
        for pointer in sc.pointers() {
            let site = sc.site(&pointer.site)?;
            if &site.stage == stage {
                state = state.couple_any(&site.projector, &pointer.site)?;
                order.push(pointer.site.clone());
            }
        }
        if let Some((filter_stage, projector)) = filter {
            if filter_stage == stage {
                state = state.apply_system(projector)?;
            }
        }
        if let Some(u) = timeline.segments().get(k) {
            state = state.apply_system(u)?;
        }
    }
    Ok((order, state))
}

/// Postselected state of the pointer simulation.
pub fn postselected(sc: &Scenario) -> Result<Postselection> {
    let (_, state) = simulate(sc, None)?;
    state.postselect(sc.prepost().post(), sc.tolerance())
}

fn readout(state: &PointerState, tolerance: f64) -> ClickStats {
    let mut stats = state.click_readout();
    stats.patterns.retain(|p| p.probability > tolerance);
    stats
}

/// For every site with a vanishing transition amplitude, the same branch
/// recomputed with the scenario's pointers in place.
pub fn disturbance_table(sc: &Scenario) -> Result<Vec<DisturbanceEntry>> {
    let tsv = sc.two_state();
    let eps = sc.tolerance();
    let mut out = Vec::new();
    for site in sc.sites() {
        let undisturbed = tsv.transition_amplitude(&site.projector, &site.stage)?;
        if undisturbed.norm() > eps {
            continue;
        }
        let (_, state) = simulate(sc, Some((&site.stage, &site.projector)))?;
        let branch = state.postselect(sc.prepost().post(), eps)?.joint;
        let branches = branch
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(pattern, amplitude)| BranchAmplitude {
                shifted: branch.shifted_labels(pattern),
                amplitude: *amplitude,
            })
            .collect();
        let branch_norm = branch.norm_sqr().max(0.0).sqrt();
        out.push(DisturbanceEntry {
            site: site.label.clone(),
            stage: site.stage.clone(),
            undisturbed_amplitude: undisturbed,
            branches,
            branch_norm,
            disturbed: branch_norm > eps,
        });
    }
    Ok(out)
}

fn info(sc: &Scenario, coupling_order: Vec<String>) -> ScenarioInfo {
    ScenarioInfo {
        name: sc.name().to_string(),
        checksum: sc.checksum(),
        coupling_order,
    }
}

/// `g · Re(w)`, the first-order pointer shift for weak value `w`.
pub fn first_order_shift(g: f64, weak_value: C64) -> f64 {
    g * weak_value.re
}
