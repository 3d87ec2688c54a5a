//! Random scenario generation for property tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::Rng;
use rand_distr::StandardNormal;
use wvlab_core::{Basis, CompleteSet, Ket, Operator, PrePost, Scenario, Site, Timeline};

pub fn complex_normal<R: Rng>(rng: &mut R) -> C {
    C::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_ket<R: Rng>(rng: &mut R, basis: &Basis) -> Ket {
    let amps = (0..basis.dim()).map(|_| complex_normal(rng)).collect();
    Ket::new(basis.clone(), amps).unwrap().normalized().unwrap()
}

/// Haar-ish random unitary from the QR decomposition of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, basis: &Basis) -> Operator {
    let n = basis.dim();
    let m = DMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let q = m.qr().q();
    let entries = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| q[(r, c)]).collect();
    Operator::new(basis.clone(), entries).unwrap()
}

/// Random orthonormal basis as the columns of a random unitary.
pub fn random_orthonormal<R: Rng>(rng: &mut R, basis: &Basis) -> Vec<Ket> {
    let u = random_unitary(rng, basis);
    let n = basis.dim();
    (0..n)
        .map(|c| Ket::new(basis.clone(), (0..n).map(|r| u.get(r, c)).collect()).unwrap())
        .collect()
}

pub fn to_nalgebra(op: &Operator) -> DMatrix<C> {
    DMatrix::from_row_slice(op.dim(), op.dim(), op.entries())
}

pub fn ket_to_nalgebra(k: &Ket) -> nalgebra::DVector<C> {
    nalgebra::DVector::from_column_slice(k.amps())
}

/// Random scenario: `dim` in 2..=5, 2–4 intermediate stages, random unitary
/// segments, random rank-1 sites, a declared complete orthonormal set, and a
/// site constructed to have a vanishing transition amplitude.
pub fn random_scenario<R: Rng>(rng: &mut R, max_dim: usize) -> Scenario {
    let dim = rng.gen_range(2..=max_dim);
    let basis = Basis::numbered(dim).unwrap();
    let inner_stages = rng.gen_range(2..=4);
    let mut stages = vec!["t_i".to_string()];
    stages.extend((1..=inner_stages).map(|k| format!("t_{k}")));
    stages.push("t_f".to_string());
    let segments = (0..stages.len() - 1).map(|_| random_unitary(rng, &basis)).collect();
    let timeline = Timeline::new(stages.clone(), segments).unwrap();

    // Non-degenerate pre/post.
    let prepost = loop {
        let pp = PrePost::new(random_ket(rng, &basis), random_ket(rng, &basis)).unwrap();
        let tsv = wvlab_core::TwoStateVector::new(&timeline, &pp, 1e-10).unwrap();
        if tsv.postselection_amplitude().unwrap().norm() > 0.1 {
            break pp;
        }
    };

    let pick_stage = |rng: &mut R| stages[rng.gen_range(1..=inner_stages)].clone();
    let mut sites = Vec::new();
    for k in 0..rng.gen_range(1..=3) {
        let stage = pick_stage(rng);
        sites.push(Site::from_ket(format!("R{k}"), stage, random_ket(rng, &basis)).unwrap());
    }

    let set_stage = pick_stage(rng);
    let mut members = Vec::new();
    for (k, u) in random_orthonormal(rng, &basis).into_iter().enumerate() {
        let label = format!("B{k}");
        sites.push(Site::from_ket(&label, &set_stage, u).unwrap());
        members.push(label);
    }

    // u ⊥ U(t_f,t)†|χ⟩ makes ⟨χ|U Π_u U|ψ⟩ vanish.
    let null_stage = pick_stage(rng);
    let tsv = wvlab_core::TwoStateVector::new(&timeline, &prepost, 1e-10).unwrap();
    let back = tsv.backward_state(&null_stage).unwrap();
    let raw = random_ket(rng, &basis);
    let overlap = back.inner(&raw).unwrap();
    let u = raw.sub(&back.scale(overlap)).unwrap().normalized().unwrap();
    sites.push(Site::from_ket("N", null_stage, u).unwrap());

    Scenario::new(
        "random",
        basis,
        timeline,
        sites,
        prepost,
        Vec::new(),
        vec![CompleteSet { stage: set_stage, sites: members }],
        1e-10,
    )
    .unwrap()
}
