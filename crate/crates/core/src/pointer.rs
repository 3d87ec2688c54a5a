//! Measurement pointers and system–pointer coupling.
//!
//! Every coupling here is impulsive and controlled by a projector `Π`: the
//! `Π` branch of the system moves the pointer from its ready state to its
//! shifted state, the `I - Π` branch leaves it alone. A pointer that starts
//! ready therefore only ever occupies the span of {ready, shifted}, and a
//! register is stored as two coefficients over that pair:
//!
//! * strong pointers have orthogonal ready/shifted states, so the pair is an
//!   orthonormal two-level register;
//! * weak pointers are Gaussians on a position grid, the shifted state being
//!   the same Gaussian translated by `g`. The pair is not orthogonal and all
//!   physical inner products go through the 2×2 Gram matrix.
//!
//! This keeps a composite state at `dim × 2^n` amplitudes for `n` registers
//! regardless of grid size. [`PointerState::to_dense`] expands back into the
//! full position representation for small cases.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Basis, Ket, Operator, C64, ZERO};
use crate::error::{Error, Result};

/// Largest admissible norm loss of the translated weak pointer on its grid.
pub const MAX_GRID_LOSS: f64 = 1e-6;

/// Smallest admissible overlap between weak ready and shifted states.
pub const MIN_WEAK_OVERLAP: f64 = 0.9;

const READY: usize = 0;
const SHIFTED: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakParams {
    /// Coupling strength, in pointer position units.
    pub g: f64,
    /// Width of the pointer position distribution.
    pub sigma: f64,
    /// Number of grid points; must be odd.
    pub grid_size: usize,
    /// Half-width of the grid in units of `sigma`.
    pub grid_extent: f64,
}

impl Default for WeakParams {
    fn default() -> Self {
        WeakParams {
            g: 0.01,
            sigma: 1.0,
            grid_size: 201,
            grid_extent: 6.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointerKind {
    Strong,
    Weak(WeakParams),
}

impl PointerKind {
    pub fn name(&self) -> &'static str {
        match self {
            PointerKind::Strong => "strong",
            PointerKind::Weak(_) => "weak",
        }
    }
}

/// A pointer attached to a named projector site.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerSpec {
    pub site: String,
    pub kind: PointerKind,
}

impl PointerSpec {
    pub fn strong(site: impl Into<String>) -> Self {
        PointerSpec {
            site: site.into(),
            kind: PointerKind::Strong,
        }
    }

    pub fn weak(site: impl Into<String>, params: WeakParams) -> Self {
        PointerSpec {
            site: site.into(),
            kind: PointerKind::Weak(params),
        }
    }
}

/// Position-space realization of a weak pointer.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakGrid {
    pub params: WeakParams,
    pub positions: Vec<f64>,
    pub ready: Vec<f64>,
    pub shifted: Vec<f64>,
    /// `⟨shifted|ready⟩`.
    pub overlap: f64,
}

impl WeakGrid {
    fn build(label: &str, params: WeakParams) -> Result<Self> {
        let WeakParams {
            g,
            sigma,
            grid_size,
            grid_extent,
        } = params;
        if grid_size < 3 || grid_size % 2 == 0 {
            return Err(Error::Schema(format!(
                "weak pointer `{label}`: grid_size must be an odd integer >= 3, got {grid_size}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0 && grid_extent.is_finite() && grid_extent > 0.0 && g.is_finite()) {
            return Err(Error::Schema(format!(
                "weak pointer `{label}`: sigma and grid_extent must be positive and g finite"
            )));
        }
        let half = grid_extent * sigma;
        let step = 2.0 * half / (grid_size - 1) as f64;
        let positions: Vec<f64> = (0..grid_size).map(|k| -half + k as f64 * step).collect();

        // Amplitude exp(-q²/4σ²) gives a position density of width σ.
        let gaussian = |center: f64| -> Vec<f64> {
            positions
                .iter()
                .map(|q| (-(q - center).powi(2) / (4.0 * sigma * sigma)).exp())
                .collect()
        };
        let mut ready = gaussian(0.0);
        let scale = 1.0 / ready.iter().map(|x| x * x).sum::<f64>().sqrt();
        ready.iter_mut().for_each(|x| *x *= scale);

        let mut shifted = gaussian(g);
        shifted.iter_mut().for_each(|x| *x *= scale);
        let kept: f64 = shifted.iter().map(|x| x * x).sum();
        let loss = 1.0 - kept;
        if loss > MAX_GRID_LOSS {
            return Err(Error::GridTooSmall {
                label: label.to_string(),
                loss,
            });
        }
        let rescale = 1.0 / kept.sqrt();
        shifted.iter_mut().for_each(|x| *x *= rescale);

        let overlap: f64 = ready.iter().zip(&shifted).map(|(a, b)| a * b).sum();
        if overlap.abs() <= MIN_WEAK_OVERLAP {
            return Err(Error::CouplingTooStrong {
                label: label.to_string(),
                overlap,
            });
        }
        Ok(WeakGrid {
            params,
            positions,
            ready,
            shifted,
            overlap,
        })
    }

    fn branch(&self, which: usize) -> &[f64] {
        if which == READY {
            &self.ready
        } else {
            &self.shifted
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Model {
    Strong,
    Weak(WeakGrid),
}

/// A pointer register ready to be coupled to the system.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerRegister {
    label: String,
    spec: PointerSpec,
    model: Model,
}

impl PointerRegister {
    pub fn new(spec: PointerSpec) -> Result<Self> {
        Self::with_label(spec.site.clone(), spec)
    }

    /// Register with an explicit label, for several pointers on one site.
    pub fn with_label(label: impl Into<String>, spec: PointerSpec) -> Result<Self> {
        let label = label.into();
        let model = match spec.kind {
            PointerKind::Strong => Model::Strong,
            PointerKind::Weak(params) => Model::Weak(WeakGrid::build(&label, params)?),
        };
        Ok(PointerRegister { label, spec, model })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spec(&self) -> &PointerSpec {
        &self.spec
    }

    pub fn is_strong(&self) -> bool {
        matches!(self.model, Model::Strong)
    }

    pub fn weak_grid(&self) -> Option<&WeakGrid> {
        match &self.model {
            Model::Weak(grid) => Some(grid),
            Model::Strong => None,
        }
    }

    /// Dimension of the physical pointer space: 2 for strong, grid size for weak.
    pub fn dimension(&self) -> usize {
        match &self.model {
            Model::Strong => 2,
            Model::Weak(grid) => grid.positions.len(),
        }
    }

    /// Ready state in the physical pointer basis.
    pub fn ready_state(&self) -> Ket {
        self.branch_state(READY)
    }

    /// Shifted state in the physical pointer basis.
    pub fn shifted_state(&self) -> Ket {
        self.branch_state(SHIFTED)
    }

    fn branch_state(&self, which: usize) -> Ket {
        let basis = self.physical_basis();
        match &self.model {
            Model::Strong => Ket::basis_state(basis, which).expect("two-level"),
            Model::Weak(grid) => Ket::from_reals(basis, grid.branch(which)).expect("grid-sized"),
        }
    }

    fn physical_basis(&self) -> Basis {
        match &self.model {
            Model::Strong => self.branch_basis(),
            Model::Weak(grid) => Basis::new(
                grid.positions
                    .iter()
                    .enumerate()
                    .map(|(k, q)| format!("{}=q{k}:{q}", self.label)),
            )
            .expect("unique"),
        }
    }

    fn branch_basis(&self) -> Basis {
        Basis::new([format!("{}=ready", self.label), format!("{}=shifted", self.label)])
            .expect("distinct")
    }

    /// `⟨branch a|branch b⟩`.
    fn gram(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 1.0;
        }
        match &self.model {
            Model::Strong => 0.0,
            Model::Weak(grid) => grid.overlap,
        }
    }
}

fn bit(pattern: usize, register: usize, count: usize) -> usize {
    (pattern >> (count - 1 - register)) & 1
}

/// Physical overlap `⟨pattern a|pattern b⟩` over all registers except `skip`.
fn pattern_overlap(registers: &[PointerRegister], a: usize, b: usize, skip: Option<usize>) -> f64 {
    let n = registers.len();
    let mut factor = 1.0;
    for (r, reg) in registers.iter().enumerate() {
        if Some(r) == skip {
            continue;
        }
        factor *= reg.gram(bit(a, r, n), bit(b, r, n));
        if factor == 0.0 {
            break;
        }
    }
    factor
}

/// System state tensored with pointer registers.
///
/// Amplitudes are indexed `system_index * 2^n + pattern`, where bit
/// `n - 1 - r` of `pattern` is set when register `r` is in its shifted state.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeState {
    registers: Arc<[PointerRegister]>,
    consumed: Vec<bool>,
    amps: Ket,
}

impl CompositeState {
    /// `|system⟩ ⊗ |ready⟩ ⊗ … ⊗ |ready⟩`.
    pub fn new(system: Ket, registers: Vec<PointerRegister>) -> Result<Self> {
        let mut labels = std::collections::HashSet::new();
        for r in &registers {
            if !labels.insert(r.label.clone()) {
                return Err(Error::DuplicateLabel(r.label.clone()));
            }
        }
        let mut amps = system;
        for r in &registers {
            let ready = Ket::basis_state(r.branch_basis(), READY)?;
            amps = amps.tensor(&ready);
        }
        Ok(CompositeState {
            consumed: vec![false; registers.len()],
            registers: registers.into(),
            amps,
        })
    }

    pub fn registers(&self) -> &[PointerRegister] {
        &self.registers
    }

    pub fn register_index(&self, label: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.label == label)
            .ok_or_else(|| Error::UnknownRegister(label.to_string()))
    }

    pub fn system_dim(&self) -> usize {
        self.amps.dim() >> self.registers.len()
    }

    /// Amplitudes in the {ready, shifted} branch basis of every register.
    pub fn branch_amplitudes(&self) -> &Ket {
        &self.amps
    }

    pub fn is_consumed(&self, register: usize) -> bool {
        self.consumed[register]
    }

    fn patterns(&self) -> usize {
        1 << self.registers.len()
    }

    /// System component attached to a register pattern.
    pub fn system_component(&self, pattern: usize) -> Vec<C64> {
        let p = self.patterns();
        (0..self.system_dim()).map(|s| self.amps.amp(s * p + pattern)).collect()
    }

    fn with_amps(&self, amps: Vec<C64>) -> Result<Self> {
        Ok(CompositeState {
            registers: self.registers.clone(),
            consumed: self.consumed.clone(),
            amps: Ket::new(self.amps.basis().clone(), amps)?,
        })
    }

    /// Applies `op ⊗ I` with `op` acting on the system factor.
    pub fn apply_system(&self, op: &Operator) -> Result<Self> {
        let d = self.system_dim();
        if op.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: op.dim(),
            });
        }
        let p = self.patterns();
        let mut out = vec![ZERO; self.amps.dim()];
        for pattern in 0..p {
            for r in 0..d {
                let mut acc = ZERO;
                for c in 0..d {
                    acc += op.get(r, c) * self.amps.amp(c * p + pattern);
                }
                out[r * p + pattern] = acc;
            }
        }
        self.with_amps(out)
    }

    /// Strong coupling: `Π|s⟩|φ(s)⟩ + (I-Π)|s⟩|φ(0)⟩` on the named register.
    pub fn couple_strong(&self, projector: &Operator, register: &str) -> Result<Self> {
        self.couple(projector, register, "strong")
    }

    /// Weak von Neumann coupling `exp(-i g Π ⊗ P)` on the named register; the
    /// `Π` branch gets the Gaussian translated by `g`.
    pub fn couple_weak(&self, projector: &Operator, register: &str) -> Result<Self> {
        self.couple(projector, register, "weak")
    }

    /// Couples with whichever model the register carries.
    pub fn couple_any(&self, projector: &Operator, register: &str) -> Result<Self> {
        let r = self.register_index(register)?;
        let kind = self.registers[r].spec.kind.name();
        self.couple(projector, register, kind)
    }

    fn couple(&self, projector: &Operator, register: &str, expected: &'static str) -> Result<Self> {
        let r = self.register_index(register)?;
        let reg = &self.registers[r];
        let actual = reg.spec.kind.name();
        if actual != expected {
            return Err(Error::RegisterKind {
                label: register.to_string(),
                expected,
                actual,
            });
        }
        if self.consumed[r] {
            return Err(Error::RegisterConsumed(register.to_string()));
        }
        let d = self.system_dim();
        if projector.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: projector.dim(),
            });
        }
        let deviation = projector.projector_deviation();
        if deviation > crate::algebra::OPERATOR_TOLERANCE {
            return Err(Error::NonProjector {
                label: register.to_string(),
                deviation,
            });
        }

        let n = self.registers.len();
        let p = self.patterns();
        let mask = 1usize << (n - 1 - r);
        let mut out = vec![ZERO; self.amps.dim()];
        for pattern in (0..p).filter(|pat| pat & mask == 0) {
            let component = self.system_component(pattern);
            for row in 0..d {
                let projected: C64 = (0..d).map(|c| projector.get(row, c) * component[c]).sum();
                out[row * p + (pattern | mask)] = projected;
                out[row * p + pattern] = component[row] - projected;
            }
        }
        let mut next = self.with_amps(out)?;
        next.consumed[r] = true;
        Ok(next)
    }

    /// Physical squared norm, taking pointer overlaps into account.
    pub fn norm_sqr(&self) -> f64 {
        let p = self.patterns();
        let mut total = 0.0;
        for s in 0..self.system_dim() {
            let block = &self.amps.amps()[s * p..(s + 1) * p];
            total += gram_form(&self.registers, block, block);
        }
        total
    }

    /// Contracts the system factor with `⟨post|`.
    pub fn postselect(&self, post: &Ket, tolerance: f64) -> Result<Postselection> {
        let d = self.system_dim();
        if post.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: post.dim(),
            });
        }
        let p = self.patterns();
        let amps: Vec<C64> = (0..p)
            .map(|pattern| {
                (0..d)
                    .map(|s| post.amp(s).conj() * self.amps.amp(s * p + pattern))
                    .sum()
            })
            .collect();
        let joint = PointerState {
            registers: self.registers.clone(),
            amps,
        };
        let probability = joint.norm_sqr();
        let conditional = (probability > tolerance).then(|| joint.scaled(1.0 / probability.sqrt()));
        Ok(Postselection {
            joint,
            probability,
            conditional,
        })
    }
}

/// `Σ_{a,b} conj(x_a) y_b ⟨a|b⟩` over register patterns.
fn gram_form(registers: &[PointerRegister], x: &[C64], y: &[C64]) -> f64 {
    let mut total = C64::new(0.0, 0.0);
    for (a, xa) in x.iter().enumerate() {
        if *xa == ZERO {
            continue;
        }
        for (b, yb) in y.iter().enumerate() {
            if *yb == ZERO {
                continue;
            }
            let g = pattern_overlap(registers, a, b, None);
            if g != 0.0 {
                total += xa.conj() * yb * g;
            }
        }
    }
    total.re
}

/// Joint pointer state left after postselecting the system.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerState {
    registers: Arc<[PointerRegister]>,
    amps: Vec<C64>,
}

impl PointerState {
    pub fn registers(&self) -> &[PointerRegister] {
        &self.registers
    }

    /// Coefficients over {ready, shifted} patterns (same indexing as
    /// [`CompositeState`]).
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        gram_form(&self.registers, &self.amps, &self.amps)
    }

    fn scaled(&self, factor: f64) -> PointerState {
        PointerState {
            registers: self.registers.clone(),
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    /// Labels of the registers shifted in `pattern`.
    pub fn shifted_labels(&self, pattern: usize) -> Vec<String> {
        let n = self.registers.len();
        (0..n)
            .filter(|&r| bit(pattern, r, n) == SHIFTED)
            .map(|r| self.registers[r].label.clone())
            .collect()
    }

    /// Physical inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &PointerState) -> Result<C64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: other.amps.len(),
            });
        }
        let mut total = ZERO;
        for (a, xa) in self.amps.iter().enumerate() {
            for (b, yb) in other.amps.iter().enumerate() {
                total += xa.conj() * yb * pattern_overlap(&self.registers, a, b, None);
            }
        }
        Ok(total)
    }

    /// Reduced 2×2 matrix of register `r` in its {ready, shifted} pair:
    /// `M[α][β] = Σ c_a conj(c_b) ⟨rest_b|rest_a⟩` over patterns with
    /// `a_r = α`, `b_r = β`.
    fn reduced(&self, r: usize) -> [[C64; 2]; 2] {
        let n = self.registers.len();
        let mut m = [[ZERO; 2]; 2];
        for (a, ca) in self.amps.iter().enumerate() {
            if *ca == ZERO {
                continue;
            }
            for (b, cb) in self.amps.iter().enumerate() {
                if *cb == ZERO {
                    continue;
                }
                let g = pattern_overlap(&self.registers, b, a, Some(r));
                if g != 0.0 {
                    m[bit(a, r, n)][bit(b, r, n)] += ca * cb.conj() * g;
                }
            }
        }
        m
    }

    /// Reads out every register: click probabilities and joint click patterns
    /// for strong registers, position statistics for weak ones.
    pub fn click_readout(&self) -> ClickStats {
        let n = self.registers.len();
        let norm = self.norm_sqr();
        let strong: Vec<usize> = (0..n).filter(|&r| self.registers[r].is_strong()).collect();
        let strong_mask: usize = strong.iter().map(|&r| 1usize << (n - 1 - r)).sum();

        let mut pattern_prob = std::collections::BTreeMap::<usize, f64>::new();
        if norm > 0.0 {
            for (a, ca) in self.amps.iter().enumerate() {
                for (b, cb) in self.amps.iter().enumerate() {
                    if a & strong_mask != b & strong_mask {
                        continue;
                    }
                    let g = pattern_overlap(&self.registers, a, b, None);
                    *pattern_prob.entry(a & strong_mask).or_default() += (ca.conj() * cb * g).re / norm;
                }
            }
        }
        let mut patterns: Vec<ClickPattern> = pattern_prob
            .into_iter()
            .map(|(pattern, probability)| ClickPattern {
                clicked: self.shifted_labels(pattern),
                probability,
            })
            .collect();
        // Fewest clicks first, then declaration order.
        patterns.sort_by_key(|p| p.clicked.len());

        let clicks = strong
            .iter()
            .map(|&r| {
                let m = self.reduced(r);
                RegisterClick {
                    register: self.registers[r].label.clone(),
                    probability: if norm > 0.0 { m[SHIFTED][SHIFTED].re / norm } else { 0.0 },
                }
            })
            .collect();

        let weak = (0..n)
            .filter_map(|r| {
                let grid = self.registers[r].weak_grid()?;
                let m = self.reduced(r);
                let density: Vec<f64> = (0..grid.positions.len())
                    .map(|k| {
                        let mut rho = ZERO;
                        for (alpha, row) in m.iter().enumerate() {
                            for (beta, entry) in row.iter().enumerate() {
                                rho += entry * grid.branch(alpha)[k] * grid.branch(beta)[k];
                            }
                        }
                        rho.re
                    })
                    .collect();
                let total: f64 = density.iter().sum();
                let distribution: Vec<f64> = density.iter().map(|x| x / total).collect();
                let mean: f64 = grid.positions.iter().zip(&distribution).map(|(q, w)| q * w).sum();
                let variance: f64 = grid
                    .positions
                    .iter()
                    .zip(&distribution)
                    .map(|(q, w)| (q - mean).powi(2) * w)
                    .sum();
                Some(WeakStats {
                    register: self.registers[r].label.clone(),
                    mean,
                    variance,
                    positions: grid.positions.clone(),
                    distribution,
                })
            })
            .collect();

        ClickStats {
            clicks,
            patterns,
            weak,
        }
    }

    /// Expands into the full physical tensor basis of all registers.
    pub fn to_dense(&self) -> Result<Ket> {
        const LIMIT: usize = 1 << 22;
        let mut dim = 1usize;
        for r in self.registers.iter() {
            dim = dim.saturating_mul(r.dimension());
            if dim > LIMIT {
                return Err(Error::TooLarge(dim));
            }
        }
        let n = self.registers.len();
        let mut acc: Option<Ket> = None;
        for (pattern, c) in self.amps.iter().enumerate() {
            let mut term = Ket::new(Basis::new(["_"])?, vec![*c])?;
            for (r, reg) in self.registers.iter().enumerate() {
                term = term.tensor(&reg.branch_state(bit(pattern, r, n)));
            }
            acc = Some(match acc {
                None => term,
                Some(sum) => sum.add(&term)?,
            });
        }
        acc.ok_or(Error::EmptyBasis)
    }
}

/// Result of postselecting the system.
#[derive(Clone, Debug, PartialEq)]
pub struct Postselection {
    /// Unnormalized pointer state `⟨χ|Ψ⟩`.
    pub joint: PointerState,
    pub probability: f64,
    /// Normalized conditional pointer state, absent when degenerate.
    pub conditional: Option<PointerState>,
}

impl Postselection {
    pub fn is_degenerate(&self) -> bool {
        self.conditional.is_none()
    }

    pub fn conditional(&self) -> Result<&PointerState> {
        self.conditional.as_ref().ok_or(Error::DegeneratePostselection {
            probability: self.probability,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegisterClick {
    pub register: String,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClickPattern {
    /// Strong registers found shifted; empty when none clicked.
    pub clicked: Vec<String>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakStats {
    pub register: String,
    pub mean: f64,
    pub variance: f64,
    pub positions: Vec<f64>,
    pub distribution: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ClickStats {
    pub clicks: Vec<RegisterClick>,
    pub patterns: Vec<ClickPattern>,
    pub weak: Vec<WeakStats>,
}

impl ClickStats {
    pub fn click_probability(&self, register: &str) -> Option<f64> {
        self.clicks
            .iter()
            .find(|c| c.register == register)
            .map(|c| c.probability)
    }

    pub fn weak_stats(&self, register: &str) -> Option<&WeakStats> {
        self.weak.iter().find(|w| w.register == register)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{inner, projector_from_ket};
    use approx::assert_abs_diff_eq;

    fn qubit_state() -> Ket {
        Ket::new(Basis::numbered(2).unwrap(), vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap()
    }

    fn proj(index: usize) -> Operator {
        projector_from_ket(&Ket::basis_state(Basis::numbered(2).unwrap(), index).unwrap()).unwrap()
    }

    #[test]
    fn weak_ready_state_is_normalized_gaussian() {
        let reg = PointerRegister::new(PointerSpec::weak("X", WeakParams::default())).unwrap();
        let ready = reg.ready_state();
        assert_eq!(ready.dim(), 201);
        assert_abs_diff_eq!(ready.norm_sqr(), 1.0, epsilon = 1e-8);
        let grid = reg.weak_grid().unwrap();
        assert_abs_diff_eq!(grid.overlap, (-0.01f64.powi(2) / 8.0).exp(), epsilon = 1e-12);
    }

    #[test]
    fn strong_ready_and_shifted_are_orthogonal() {
        let reg = PointerRegister::new(PointerSpec::strong("X")).unwrap();
        assert_eq!(inner(&reg.shifted_state(), &reg.ready_state()).unwrap(), ZERO);
    }

    #[test]
    fn grid_validation() {
        let even = WeakParams { grid_size: 200, ..WeakParams::default() };
        assert_eq!(PointerRegister::new(PointerSpec::weak("X", even)).unwrap_err().code(), "schema");
        let off_grid = WeakParams { g: 0.5, grid_extent: 2.0, ..WeakParams::default() };
        assert_eq!(
            PointerRegister::new(PointerSpec::weak("X", off_grid)).unwrap_err().code(),
            "grid-too-small"
        );
        let strong = WeakParams { g: 1.5, grid_extent: 12.0, grid_size: 401, ..WeakParams::default() };
        assert_eq!(
            PointerRegister::new(PointerSpec::weak("X", strong)).unwrap_err().code(),
            "coupling-too-strong"
        );
    }

    #[test]
    fn zero_projector_leaves_state_unchanged() {
        let reg = PointerRegister::new(PointerSpec::strong("X")).unwrap();
        let st = CompositeState::new(qubit_state(), vec![reg]).unwrap();
        let zero = Operator::zero(Basis::numbered(2).unwrap());
        let out = st.couple_strong(&zero, "X").unwrap();
        assert_eq!(out.branch_amplitudes().amps(), st.branch_amplitudes().amps());
    }

    #[test]
    fn identity_projector_shifts_pointer() {
        let reg = PointerRegister::new(PointerSpec::strong("X")).unwrap();
        let st = CompositeState::new(qubit_state(), vec![reg]).unwrap();
        let out = st.couple_strong(&Operator::identity(Basis::numbered(2).unwrap()), "X").unwrap();
        assert_eq!(out.system_component(1), qubit_state().amps());
        assert_eq!(out.system_component(0), vec![ZERO, ZERO]);
    }

    #[test]
    fn coupling_twice_is_rejected() {
        let reg = PointerRegister::new(PointerSpec::strong("X")).unwrap();
        let st = CompositeState::new(qubit_state(), vec![reg]).unwrap();
        let once = st.couple_strong(&proj(0), "X").unwrap();
        assert_eq!(once.couple_strong(&proj(0), "X").unwrap_err().code(), "register-consumed");
        assert_eq!(st.couple_weak(&proj(0), "X").unwrap_err().code(), "register-kind");
        assert_eq!(st.couple_strong(&proj(0), "Y").unwrap_err().code(), "unknown-register");
    }

    #[test]
    fn weak_global_translation_shifts_mean_by_g() {
        // Only the grid truncation at ±extent·σ separates the mean from g.
        for (g, extent, eps) in [(0.01, 6.0, 1e-9), (0.37, 6.0, 1e-7), (0.37, 9.0, 1e-12)] {
            let params = WeakParams { g, grid_extent: extent, grid_size: 301, ..WeakParams::default() };
            let reg = PointerRegister::new(PointerSpec::weak("X", params)).unwrap();
            let st = CompositeState::new(qubit_state(), vec![reg]).unwrap();
            let out = st.couple_weak(&Operator::identity(Basis::numbered(2).unwrap()), "X").unwrap();
            let post = out.postselect(&qubit_state(), 1e-10).unwrap();
            let stats = post.conditional().unwrap().click_readout();
            assert_abs_diff_eq!(stats.weak[0].mean, g, epsilon = eps);
            assert_abs_diff_eq!(stats.weak[0].variance, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn weak_with_zero_coupling_is_unchanged() {
        let params = WeakParams { g: 0.0, ..WeakParams::default() };
        let reg = PointerRegister::new(PointerSpec::weak("X", params)).unwrap();
        let st = CompositeState::new(qubit_state(), vec![reg]).unwrap();
        let out = st.couple_weak(&proj(1), "X").unwrap();
        let before = st.postselect(&qubit_state(), 1e-10).unwrap();
        let after = out.postselect(&qubit_state(), 1e-10).unwrap();
        let a = before.joint.to_dense().unwrap();
        let b = after.joint.to_dense().unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
    }

    #[test]
    fn couplings_preserve_norm() {
        let regs = vec![
            PointerRegister::new(PointerSpec::strong("A")).unwrap(),
            PointerRegister::new(PointerSpec::weak("B", WeakParams { g: 0.2, ..WeakParams::default() })).unwrap(),
        ];
        let st = CompositeState::new(qubit_state(), regs).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let diag = projector_from_ket(&Ket::from_reals(Basis::numbered(2).unwrap(), &[h, h]).unwrap()).unwrap();
        let a = st.couple_strong(&proj(0), "A").unwrap();
        let b = a.couple_weak(&diag, "B").unwrap();
        assert_abs_diff_eq!(a.norm_sqr(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gram_route_matches_dense_expansion() {
        let regs = vec![
            PointerRegister::new(PointerSpec::weak("A", WeakParams { g: 0.3, grid_size: 61, ..WeakParams::default() })).unwrap(),
            PointerRegister::new(PointerSpec::strong("B")).unwrap(),
            PointerRegister::new(PointerSpec::weak("C", WeakParams { g: -0.2, grid_size: 41, ..WeakParams::default() })).unwrap(),
        ];
        let h = 1.0 / 2f64.sqrt();
        let diag = projector_from_ket(&Ket::from_reals(Basis::numbered(2).unwrap(), &[h, h]).unwrap()).unwrap();
        let st = CompositeState::new(qubit_state(), regs)
            .unwrap()
            .couple_weak(&proj(1), "A")
            .unwrap()
            .couple_strong(&diag, "B")
            .unwrap()
            .couple_weak(&proj(0), "C")
            .unwrap();
        let post = Ket::new(Basis::numbered(2).unwrap(), vec![C64::new(0.8, 0.0), C64::new(0.0, -0.6)]).unwrap();
        let sel = st.postselect(&post, 1e-10).unwrap();
        let dense = sel.joint.to_dense().unwrap();
        assert_abs_diff_eq!(dense.norm_sqr(), sel.probability, epsilon = 1e-13);

        // Marginal mean of A straight from the dense position amplitudes.
        let cond = sel.conditional().unwrap();
        let stats = cond.click_readout();
        let grid_a = cond.registers()[0].weak_grid().unwrap();
        let (dim_b, dim_c) = (2, 41);
        let mut mean = 0.0;
        let mut p_b_shift = 0.0;
        for (i, q) in grid_a.positions.iter().enumerate() {
            for j in 0..dim_b {
                for k in 0..dim_c {
                    let w = dense.amp((i * dim_b + j) * dim_c + k).norm_sqr() / sel.probability;
                    mean += q * w;
                    if j == 1 {
                        p_b_shift += w;
                    }
                }
            }
        }
        assert_abs_diff_eq!(stats.weak_stats("A").unwrap().mean, mean, epsilon = 1e-12);
        assert_abs_diff_eq!(stats.click_probability("B").unwrap(), p_b_shift, epsilon = 1e-12);
        let total: f64 = stats.patterns.iter().map(|p| p.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn postselection_without_pointers() {
        let st = CompositeState::new(qubit_state(), vec![]).unwrap();
        let post = Ket::basis_state(Basis::numbered(2).unwrap(), 0).unwrap();
        let sel = st.postselect(&post, 1e-10).unwrap();
        assert_abs_diff_eq!(sel.probability, 0.36, epsilon = 1e-15);
        let orth = Ket::new(Basis::numbered(2).unwrap(), vec![C64::new(0.8, 0.0), C64::new(0.0, -0.6)]).unwrap();
        let sel = st.postselect(&orth, 1e-10).unwrap();
        assert!(sel.is_degenerate());
        assert_eq!(sel.conditional().unwrap_err().code(), "degenerate-postselection");
    }
}
