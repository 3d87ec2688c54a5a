//! Two-state-vector engine.
//!
//! A [`Timeline`] is a list of ordered stage names with one unitary per
//! consecutive pair. Given a preselected state at the first stage and a
//! postselected state at the last, [`TwoStateVector`] evaluates transition
//! amplitudes `⟨χ|U(t_f,t) Π U(t,t_i)|ψ⟩` and weak values of projectors
//! inserted at any stage.

use serde::{Deserialize, Serialize};

use crate::algebra::{inner, Basis, Ket, Operator, C64, ZERO};
use crate::error::{Error, Result};

/// Default tolerance for "vanishes" / "equals" decisions.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Timeline {
    stages: Vec<String>,
    segments: Vec<Operator>,
}

impl Timeline {
    /// `segments[k]` evolves from `stages[k]` to `stages[k + 1]`.
    pub fn new(stages: Vec<String>, segments: Vec<Operator>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Schema("timeline needs at least one stage".into()));
        }
        if segments.len() + 1 != stages.len() {
            return Err(Error::Schema(format!(
                "{} stages need {} segments, found {}",
                stages.len(),
                stages.len() - 1,
                segments.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &stages {
            if !seen.insert(s.as_str()) {
                return Err(Error::Schema(format!("duplicate stage `{s}`")));
            }
        }
        for (k, u) in segments.iter().enumerate() {
            if u.dim() != segments[0].dim() {
                return Err(Error::DimensionMismatch {
                    expected: segments[0].dim(),
                    found: u.dim(),
                });
            }
            let deviation = u.unitarity_deviation();
            if deviation > crate::algebra::OPERATOR_TOLERANCE {
                return Err(Error::NonUnitarySegment {
                    from: stages[k].clone(),
                    to: stages[k + 1].clone(),
                    deviation,
                });
            }
        }
        Ok(Timeline { stages, segments })
    }

    /// Timeline with identity dynamics on every segment.
    pub fn identity(basis: &Basis, stages: Vec<String>) -> Result<Self> {
        let n = stages.len().saturating_sub(1);
        Timeline::new(stages, vec![Operator::identity(basis.clone()); n])
    }

    pub fn stages(&self) -> &[String] {
        &self.stages
    }

    pub fn segments(&self) -> &[Operator] {
        &self.segments
    }

    pub fn initial(&self) -> &str {
        &self.stages[0]
    }

    pub fn last(&self) -> &str {
        self.stages.last().expect("non-empty")
    }

    pub fn stage_index(&self, stage: &str) -> Result<usize> {
        self.stages
            .iter()
            .position(|s| s == stage)
            .ok_or_else(|| Error::UnknownStage(stage.to_string()))
    }

    /// Applies the segment unitaries between two stages in order.
    pub fn evolve(&self, ket: &Ket, from: &str, to: &str) -> Result<Ket> {
        let (a, b) = self.interval(from, to)?;
        self.evolve_indices(ket, a, b)
    }

    /// Inverse of [`Timeline::evolve`]: takes a state at `to` back to `from`.
    pub fn evolve_back(&self, ket: &Ket, from: &str, to: &str) -> Result<Ket> {
        let (a, b) = self.interval(from, to)?;
        let mut out = ket.clone();
        for u in self.segments[a..b].iter().rev() {
            out = u.adjoint().apply(&out)?;
        }
        Ok(out)
    }

    pub(crate) fn evolve_indices(&self, ket: &Ket, from: usize, to: usize) -> Result<Ket> {
        let mut out = ket.clone();
        for u in &self.segments[from..to] {
            out = u.apply(&out)?;
        }
        Ok(out)
    }

    /// Composite unitary `U(to, from)`.
    pub fn propagator(&self, from: &str, to: &str) -> Result<Operator> {
        let (a, b) = self.interval(from, to)?;
        let basis = self
            .segments
            .first()
            .map(|u| u.basis().clone())
            .ok_or_else(|| Error::Schema("timeline has no segments".into()))?;
        let mut out = Operator::identity(basis);
        for u in &self.segments[a..b] {
            out = u.matmul(&out)?;
        }
        Ok(out)
    }

    /// Copy of the timeline with an identity segment spliced in after `after`.
    pub fn with_inserted_stage(&self, after: &str, name: &str) -> Result<Timeline> {
        let k = self.stage_index(after)?;
        let mut stages = self.stages.clone();
        let mut segments = self.segments.clone();
        let basis = self
            .segments
            .first()
            .map(|u| u.basis().clone())
            .ok_or_else(|| Error::Schema("timeline has no segments".into()))?;
        stages.insert(k + 1, name.to_string());
        segments.insert(k, Operator::identity(basis));
        Timeline::new(stages, segments)
    }

    fn interval(&self, from: &str, to: &str) -> Result<(usize, usize)> {
        let a = self.stage_index(from)?;
        let b = self.stage_index(to)?;
        if a > b {
            return Err(Error::StageOrder {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        Ok((a, b))
    }
}

/// Preselected state at the first stage and postselected state at the last.
#[derive(Clone, Debug, PartialEq)]
pub struct PrePost {
    pre: Ket,
    post: Ket,
}

impl PrePost {
    pub fn new(pre: Ket, post: Ket) -> Result<Self> {
        for (what, k) in [("preselected state", &pre), ("postselected state", &post)] {
            if !k.is_normalized() {
                return Err(Error::NotNormalized {
                    what: what.into(),
                    norm_sqr: k.norm_sqr(),
                });
            }
        }
        if pre.dim() != post.dim() {
            return Err(Error::DimensionMismatch {
                expected: pre.dim(),
                found: post.dim(),
            });
        }
        Ok(PrePost { pre, post })
    }

    pub fn pre(&self) -> &Ket {
        &self.pre
    }

    pub fn post(&self) -> &Ket {
        &self.post
    }
}

/// Outcome of a weak-value evaluation. `value` is `None` when the
/// postselection amplitude vanishes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakValueResult {
    pub site: String,
    pub stage: String,
    #[serde(with = "crate::report::complex_opt")]
    pub value: Option<C64>,
    #[serde(with = "crate::report::complex")]
    pub numerator: C64,
    #[serde(with = "crate::report::complex")]
    pub denominator: C64,
}

impl WeakValueResult {
    pub fn is_degenerate(&self) -> bool {
        self.value.is_none()
    }
}

/// Pre/post-selected system evaluated along a timeline.
#[derive(Clone, Copy, Debug)]
pub struct TwoStateVector<'a> {
    timeline: &'a Timeline,
    prepost: &'a PrePost,
    tolerance: f64,
}

impl<'a> TwoStateVector<'a> {
    pub fn new(timeline: &'a Timeline, prepost: &'a PrePost, tolerance: f64) -> Result<Self> {
        let dim = timeline
            .segments()
            .first()
            .map(Operator::dim)
            .unwrap_or(prepost.pre().dim());
        if dim != prepost.pre().dim() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: prepost.pre().dim(),
            });
        }
        Ok(TwoStateVector {
            timeline,
            prepost,
            tolerance,
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Preselected state evolved forward to `stage`.
    pub fn forward_state(&self, stage: &str) -> Result<Ket> {
        self.timeline
            .evolve(self.prepost.pre(), self.timeline.initial(), stage)
    }

    /// Postselected state evolved backward to `stage`, i.e. `U(t_f,t)†|χ⟩`.
    pub fn backward_state(&self, stage: &str) -> Result<Ket> {
        self.timeline
            .evolve_back(self.prepost.post(), stage, self.timeline.last())
    }

    /// `⟨χ|U(t_f,t_i)|ψ⟩`.
    pub fn postselection_amplitude(&self) -> Result<C64> {
        let end = self.forward_state(self.timeline.last())?;
        inner(self.prepost.post(), &end)
    }

    /// `⟨χ|U(t_f,t) A U(t,t_i)|ψ⟩` for an arbitrary operator `A`.
    pub fn matrix_element(&self, op: &Operator, stage: &str) -> Result<C64> {
        let forward = self.forward_state(stage)?;
        let acted = op.apply(&forward)?;
        let end = self.timeline.evolve(&acted, stage, self.timeline.last())?;
        inner(self.prepost.post(), &end)
    }

    /// Transition amplitude of a projector inserted at `stage`.
    pub fn transition_amplitude(&self, projector: &Operator, stage: &str) -> Result<C64> {
        check_projector(projector, "operator")?;
        self.matrix_element(projector, stage)
    }

    pub fn weak_value(&self, site: &str, projector: &Operator, stage: &str) -> Result<WeakValueResult> {
        check_projector(projector, site)?;
        let numerator = self.matrix_element(projector, stage)?;
        let denominator = self.postselection_amplitude()?;
        let value = (denominator.norm() > self.tolerance).then(|| numerator / denominator);
        Ok(WeakValueResult {
            site: site.to_string(),
            stage: stage.to_string(),
            value,
            numerator,
            denominator,
        })
    }

    /// Sum of the weak values of a complete projector set at `stage`.
    pub fn sum_rule(&self, projectors: &[&Operator], stage: &str) -> Result<C64> {
        let first = projectors
            .first()
            .ok_or(Error::IncompleteProjectorSet { deviation: 1.0 })?;
        let mut total = Operator::zero(first.basis().clone());
        for p in projectors {
            check_projector(p, "sum-rule member")?;
            total = total.add(p)?;
        }
        let deviation = total.max_abs_diff(&Operator::identity(first.basis().clone()))?;
        if deviation > crate::algebra::OPERATOR_TOLERANCE {
            return Err(Error::IncompleteProjectorSet { deviation });
        }
        let denominator = self.postselection_amplitude()?;
        if denominator.norm() <= self.tolerance {
            return Err(Error::DegeneratePostselection {
                probability: denominator.norm_sqr(),
            });
        }
        let mut sum = ZERO;
        for p in projectors {
            sum += self.matrix_element(p, stage)? / denominator;
        }
        Ok(sum)
    }
}

fn check_projector(op: &Operator, label: &str) -> Result<()> {
    let deviation = op.projector_deviation();
    if deviation > crate::algebra::OPERATOR_TOLERANCE {
        return Err(Error::NonProjector {
            label: label.to_string(),
            deviation,
        });
    }
    Ok(())
}
