//! Simulation of pre- and post-selected quantum systems.
//!
//! * [`algebra`]: dense complex kets and operators over labeled bases.
//! * [`two_state`]: timelines, transition amplitudes and weak values.
//! * [`pointer`]: strong and weak measurement pointers and their coupling.
//! * [`scenario`]: experiment descriptions, built-ins and the JSON format.
//! * [`runner`]: weak-value tables, pointer runs and disturbance analysis.
//! * [`report`]: run reports and their serialized form.

pub mod algebra;
pub mod error;
pub mod pointer;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod two_state;

pub use algebra::{inner, projector_from_ket, tensor, Basis, Element, Ket, Operator, C64};
pub use error::{Error, Result};
pub use pointer::{
    ClickPattern, ClickStats, CompositeState, PointerKind, PointerRegister, PointerSpec, PointerState,
    Postselection, RegisterClick, WeakParams, WeakStats,
};
pub use report::{DisturbanceEntry, RunReport};
pub use runner::{disturbance_table, run_pointers, run_weak_values};
pub use scenario::{CompleteSet, CrossingModel, Scenario, Site, BUILTIN_NAMES};
pub use two_state::{PrePost, Timeline, TwoStateVector, WeakValueResult, DEFAULT_TOLERANCE};
