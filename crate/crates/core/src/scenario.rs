//! Experiment descriptions and the built-in three-path interferometer.
//!
//! A [`Scenario`] bundles the system basis, the timeline, named projector
//! sites pinned to stages, pre/post-selected states and pointer placements.
//! Scenarios are validated on construction and are immutable afterwards.
//!
//! The JSON file format is handled by [`ScenarioFile`]; [`Scenario::load`]
//! and [`Scenario::to_json`] round-trip exactly.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{projector_from_ket, Basis, Ket, Operator, C64, OPERATOR_TOLERANCE};
use crate::error::{Error, Result};
use crate::pointer::{PointerKind, PointerRegister, PointerSpec, WeakParams};
use crate::two_state::{PrePost, Timeline, TwoStateVector, DEFAULT_TOLERANCE};

/// Names accepted by [`Scenario::builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "three-path",
    "three-path-fig1",
    "three-path-fig1-oprime",
    "three-path-fig2",
    "three-path-allweak",
    "three-path-rank2-crossing",
];

/// How a site's projector was specified.
#[derive(Clone, Debug, PartialEq)]
pub enum SiteSource {
    /// Rank-1 projector onto the (normalized) ket.
    Ket(Ket),
    Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Site {
    pub label: String,
    pub stage: String,
    pub projector: Operator,
    pub source: SiteSource,
}

impl Site {
    pub fn from_ket(label: impl Into<String>, stage: impl Into<String>, ket: Ket) -> Result<Self> {
        Ok(Site {
            label: label.into(),
            stage: stage.into(),
            projector: projector_from_ket(&ket)?,
            source: SiteSource::Ket(ket),
        })
    }

    pub fn from_matrix(label: impl Into<String>, stage: impl Into<String>, projector: Operator) -> Self {
        Site {
            label: label.into(),
            stage: stage.into(),
            projector,
            source: SiteSource::Matrix,
        }
    }
}

/// A set of sites whose projectors resolve the identity, evaluated together
/// at one stage for the sum rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompleteSet {
    pub stage: String,
    pub sites: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    name: String,
    basis: Basis,
    timeline: Timeline,
    sites: Vec<Site>,
    prepost: PrePost,
    pointers: Vec<PointerSpec>,
    complete_sets: Vec<CompleteSet>,
    tolerance: f64,
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        basis: Basis,
        timeline: Timeline,
        sites: Vec<Site>,
        prepost: PrePost,
        pointers: Vec<PointerSpec>,
        complete_sets: Vec<CompleteSet>,
        tolerance: f64,
    ) -> Result<Self> {
        let sc = Scenario {
            name: name.into(),
            basis,
            timeline,
            sites,
            prepost,
            pointers,
            complete_sets,
            tolerance,
        };
        sc.validate()?;
        Ok(sc)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Schema(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        let dim = self.basis.dim();
        if self.prepost.pre().dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.prepost.pre().dim(),
            });
        }
        if let Some(u) = self.timeline.segments().first() {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: u.dim(),
                });
            }
        }
        let mut labels = std::collections::HashSet::new();
        for site in &self.sites {
            if !labels.insert(site.label.as_str()) {
                return Err(Error::Schema(format!("duplicate site `{}`", site.label)));
            }
            self.timeline.stage_index(&site.stage)?;
            if site.projector.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: site.projector.dim(),
                });
            }
            let deviation = site.projector.projector_deviation();
            if deviation > OPERATOR_TOLERANCE {
                return Err(Error::NonProjector {
                    label: site.label.clone(),
                    deviation,
                });
            }
        }
        let mut placed = std::collections::HashSet::new();
        for p in &self.pointers {
            if !labels.contains(p.site.as_str()) {
                return Err(Error::UnknownPointerSite(p.site.clone()));
            }
            if !placed.insert(p.site.as_str()) {
                return Err(Error::Schema(format!("more than one pointer at site `{}`", p.site)));
            }
            PointerRegister::new(p.clone())?;
        }
        for set in &self.complete_sets {
            self.timeline.stage_index(&set.stage)?;
            let mut total = Operator::zero(self.basis.clone());
            for label in &set.sites {
                total = total.add(&self.site(label)?.projector)?;
            }
            let deviation = total.max_abs_diff(&Operator::identity(self.basis.clone()))?;
            if deviation > OPERATOR_TOLERANCE {
                return Err(Error::IncompleteProjectorSet { deviation });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn timeline(&self) -> &Timeline {
        &self.timeline
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site(&self, label: &str) -> Result<&Site> {
        self.sites
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| Error::Schema(format!("unknown site `{label}`")))
    }

    pub fn prepost(&self) -> &PrePost {
        &self.prepost
    }

    pub fn pointers(&self) -> &[PointerSpec] {
        &self.pointers
    }

    pub fn complete_sets(&self) -> &[CompleteSet] {
        &self.complete_sets
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn two_state(&self) -> TwoStateVector<'_> {
        TwoStateVector::new(&self.timeline, &self.prepost, self.tolerance).expect("validated dimensions")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn with_pointers(mut self, pointers: Vec<PointerSpec>) -> Result<Self> {
        self.pointers = pointers;
        self.validate()?;
        Ok(self)
    }

    /// Overrides the coupling strength of every weak pointer.
    pub fn with_coupling(mut self, g: f64) -> Result<Self> {
        for p in &mut self.pointers {
            if let PointerKind::Weak(params) = &mut p.kind {
                params.g = g;
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn with_prepost(mut self, prepost: PrePost) -> Result<Self> {
        self.prepost = prepost;
        self.validate()?;
        Ok(self)
    }

    // ---------------------------------------------------------------------
    // Built-in scenarios
    // ---------------------------------------------------------------------

    pub fn builtin(name: &str) -> Result<Self> {
        let base = three_path(CrossingModel::RankOne)?;
        let strong = |sites: &[&str]| sites.iter().map(|s| PointerSpec::strong(*s)).collect::<Vec<_>>();
        let sc = match name {
            "three-path" => base,
            "three-path-fig1" => base.with_pointers(strong(&["D", "O"]))?,
            "three-path-fig1-oprime" => base.with_pointers(strong(&["D", "O", "O'"]))?,
            "three-path-fig2" => base.with_pointers(strong(&["D", "O", "E'", "F'"]))?,
            "three-path-allweak" => base.with_pointers(
                ["E", "F", "D", "O", "E'", "F'", "O'"]
                    .iter()
                    .map(|s| PointerSpec::weak(*s, WeakParams::default()))
                    .collect(),
            )?,
            "three-path-rank2-crossing" => three_path(CrossingModel::RankTwo)?,
            other => return Err(Error::UnknownBuiltin(other.to_string())),
        };
        Ok(sc.with_name(name))
    }

    // ---------------------------------------------------------------------
    // Serialization
    // ---------------------------------------------------------------------

    pub fn to_file(&self) -> ScenarioFile {
        let pair = |z: &C64| [z.re, z.im];
        let stages = self.timeline.stages();
        ScenarioFile {
            name: Some(self.name.clone()),
            dim: self.dim(),
            stages: stages.to_vec(),
            segments: self
                .timeline
                .segments()
                .iter()
                .enumerate()
                .map(|(k, u)| SegmentFile {
                    from: stages[k].clone(),
                    to: stages[k + 1].clone(),
                    matrix: u.entries().iter().map(pair).collect(),
                })
                .collect(),
            pre: self.prepost.pre().amps().iter().map(pair).collect(),
            post: self.prepost.post().amps().iter().map(pair).collect(),
            sites: self
                .sites
                .iter()
                .map(|s| match &s.source {
                    SiteSource::Ket(k) => SiteFile {
                        label: s.label.clone(),
                        stage: s.stage.clone(),
                        kind: SiteKind::Ket,
                        data: k.amps().iter().map(pair).collect(),
                    },
                    SiteSource::Matrix => SiteFile {
                        label: s.label.clone(),
                        stage: s.stage.clone(),
                        kind: SiteKind::Matrix,
                        data: s.projector.entries().iter().map(pair).collect(),
                    },
                })
                .collect(),
            pointers: self
                .pointers
                .iter()
                .map(|p| match p.kind {
                    PointerKind::Strong => PointerFile {
                        site: p.site.clone(),
                        kind: PointerFileKind::Strong,
                        g: None,
                        sigma: None,
                        grid_size: None,
                        grid_extent: None,
                    },
                    PointerKind::Weak(w) => PointerFile {
                        site: p.site.clone(),
                        kind: PointerFileKind::Weak,
                        g: Some(w.g),
                        sigma: Some(w.sigma),
                        grid_size: Some(w.grid_size),
                        grid_extent: Some(w.grid_extent),
                    },
                })
                .collect(),
            complete_sets: self.complete_sets.clone(),
            tolerance: self.tolerance,
        }
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        if file.dim == 0 {
            return Err(Error::Schema("`dim` must be at least 1".into()));
        }
        let basis = Basis::numbered(file.dim)?;
        let complex_vec = |what: &str, data: &[[f64; 2]], len: usize| -> Result<Vec<C64>> {
            if data.len() != len {
                return Err(Error::Schema(format!(
                    "{what}: expected {len} [re, im] pairs, found {}",
                    data.len()
                )));
            }
            Ok(data.iter().map(|[re, im]| C64::new(*re, *im)).collect())
        };

        // Segments must chain the stages in order, one per consecutive pair.
        for seg in &file.segments {
            for stage in [&seg.from, &seg.to] {
                if !file.stages.contains(stage) {
                    return Err(Error::UnknownStage(stage.clone()));
                }
            }
        }
        let mut segments = Vec::with_capacity(file.stages.len().saturating_sub(1));
        for pair in file.stages.windows(2) {
            let mut matching = file.segments.iter().filter(|s| s.from == pair[0] && s.to == pair[1]);
            let seg = matching.next().ok_or_else(|| {
                Error::Schema(format!("missing segment `{}` -> `{}`", pair[0], pair[1]))
            })?;
            if matching.next().is_some() {
                return Err(Error::Schema(format!("duplicate segment `{}` -> `{}`", pair[0], pair[1])));
            }
            let what = format!("segment `{}` -> `{}`", seg.from, seg.to);
            let entries = complex_vec(&what, &seg.matrix, file.dim * file.dim)?;
            segments.push(Operator::new(basis.clone(), entries)?);
        }
        if segments.len() != file.segments.len() {
            return Err(Error::Schema(
                "segments must connect consecutive stages only".into(),
            ));
        }
        let timeline = Timeline::new(file.stages.clone(), segments)?;

        let pre = Ket::new(basis.clone(), complex_vec("pre", &file.pre, file.dim)?)?;
        let post = Ket::new(basis.clone(), complex_vec("post", &file.post, file.dim)?)?;
        let prepost = PrePost::new(pre, post)?;

        let mut sites = Vec::with_capacity(file.sites.len());
        for s in &file.sites {
            let what = format!("site `{}`", s.label);
            let site = match s.kind {
                SiteKind::Ket => {
                    let ket = Ket::new(basis.clone(), complex_vec(&what, &s.data, file.dim)?)?;
                    Site::from_ket(&s.label, &s.stage, ket).map_err(|e| match e {
                        Error::ZeroVector => Error::NonProjector {
                            label: s.label.clone(),
                            deviation: f64::INFINITY,
                        },
                        other => other,
                    })?
                }
                SiteKind::Matrix => {
                    let entries = complex_vec(&what, &s.data, file.dim * file.dim)?;
                    Site::from_matrix(&s.label, &s.stage, Operator::new(basis.clone(), entries)?)
                }
            };
            sites.push(site);
        }

        let pointers = file
            .pointers
            .iter()
            .map(|p| match p.kind {
                PointerFileKind::Strong => PointerSpec::strong(&p.site),
                PointerFileKind::Weak => {
                    let d = WeakParams::default();
                    PointerSpec::weak(
                        &p.site,
                        WeakParams {
                            g: p.g.unwrap_or(d.g),
                            sigma: p.sigma.unwrap_or(d.sigma),
                            grid_size: p.grid_size.unwrap_or(d.grid_size),
                            grid_extent: p.grid_extent.unwrap_or(d.grid_extent),
                        },
                    )
                }
            })
            .collect();

        Scenario::new(
            file.name.unwrap_or_else(|| "scenario".to_string()),
            basis,
            timeline,
            sites,
            prepost,
            pointers,
            file.complete_sets,
            file.tolerance,
        )
    }

    /// Parses and validates a scenario from JSON text.
    pub fn load(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Scenario::from_file(file)
    }

    pub fn load_path(path: impl AsRef<std::path::Path>) -> std::io::Result<Result<Self>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Scenario::load(&text))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("plain data serializes")
    }

    /// SHA-256 of the compact serialized form.
    pub fn checksum(&self) -> String {
        let compact = serde_json::to_string(&self.to_file()).expect("plain data serializes");
        Sha256::digest(compact.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Model of the detector sitting at a path crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingModel {
    /// Rank-1 projector onto the in-phase combination of the two crossing paths.
    RankOne,
    /// Rank-2 projector onto both crossing paths.
    RankTwo,
}

/// Three-path interferometer with identity segments.
///
/// Paths `1`, `2`, `3`; path 1 runs through `D`, paths 2 and 3 through
/// `E`/`F`, cross at `O`, run through `E'`/`F'` and cross again at `O'`.
pub fn three_path(crossing: CrossingModel) -> Result<Scenario> {
    let basis = Basis::numbered(3)?;
    let stages: Vec<String> = ["t_i", "t_1", "t_2", "t_3", "t_4", "t_f"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let timeline = Timeline::identity(&basis, stages)?;

    let s = 1.0 / 3f64.sqrt();
    let pre = Ket::from_reals(basis.clone(), &[s, s, s])?;
    let post = Ket::from_reals(basis.clone(), &[s, s, -s])?;
    let prepost = PrePost::new(pre, post)?;

    let h = 1.0 / 2f64.sqrt();
    let path = |i: usize| Ket::basis_state(basis.clone(), i);
    let crossing_site = |label: &str, stage: &str| -> Result<Site> {
        match crossing {
            CrossingModel::RankOne => {
                Site::from_ket(label, stage, Ket::from_reals(basis.clone(), &[0.0, h, h])?)
            }
            CrossingModel::RankTwo => {
                let one = C64::new(1.0, 0.0);
                let zero = C64::new(0.0, 0.0);
                let p = Operator::diagonal(basis.clone(), &[zero, one, one])?;
                Ok(Site::from_matrix(label, stage, p))
            }
        }
    };
    let sites = vec![
        Site::from_ket("E", "t_1", path(1)?)?,
        Site::from_ket("F", "t_1", path(2)?)?,
        Site::from_ket("D", "t_2", path(0)?)?,
        crossing_site("O", "t_2")?,
        Site::from_ket("E'", "t_3", path(1)?)?,
        Site::from_ket("F'", "t_3", path(2)?)?,
        crossing_site("O'", "t_4")?,
    ];
    let complete_sets = vec![
        CompleteSet {
            stage: "t_1".into(),
            sites: vec!["D".into(), "E".into(), "F".into()],
        },
        CompleteSet {
            stage: "t_3".into(),
            sites: vec!["D".into(), "E'".into(), "F'".into()],
        },
    ];
    let name = match crossing {
        CrossingModel::RankOne => "three-path",
        CrossingModel::RankTwo => "three-path-rank2-crossing",
    };
    Scenario::new(
        name,
        basis,
        timeline,
        sites,
        prepost,
        Vec::new(),
        complete_sets,
        DEFAULT_TOLERANCE,
    )
}

// -------------------------------------------------------------------------
// File schema
// -------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub stages: Vec<String>,
    pub segments: Vec<SegmentFile>,
    pub pre: Vec<[f64; 2]>,
    pub post: Vec<[f64; 2]>,
    pub sites: Vec<SiteFile>,
    #[serde(default)]
    pub pointers: Vec<PointerFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub complete_sets: Vec<CompleteSet>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentFile {
    pub from: String,
    pub to: String,
    /// Row-major `[re, im]` pairs.
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteKind {
    Ket,
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteFile {
    pub label: String,
    pub stage: String,
    pub kind: SiteKind,
    pub data: Vec<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointerFileKind {
    Strong,
    Weak,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointerFile {
    pub site: String,
    pub kind: PointerFileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_extent: Option<f64>,
}
