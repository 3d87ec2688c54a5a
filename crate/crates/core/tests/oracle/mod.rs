//! Brute-force reference computations built directly on nalgebra matrices.
//!
//! Nothing here goes through the library's kets, operators or branch
//! representation: strong pointers are explicit qubits flipped by a
//! controlled-NOT `Π ⊗ X + (I - Π) ⊗ I`, and every state lives in the full
//! Kronecker-product space.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

pub type Mat = DMatrix<C>;
pub type Vector = DVector<C>;

pub fn real_vector(xs: &[f64]) -> Vector {
    Vector::from_iterator(xs.len(), xs.iter().map(|&x| C::new(x, 0.0)))
}

pub fn complex_vector(xs: &[C]) -> Vector {
    Vector::from_column_slice(xs)
}

pub fn matrix(dim: usize, row_major: &[C]) -> Mat {
    Mat::from_row_slice(dim, dim, row_major)
}

pub fn outer(u: &Vector) -> Mat {
    let n = u.norm();
    let u = u / C::new(n, 0.0);
    &u * u.adjoint()
}

fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

fn bra_ket(bra: &Vector, m: &Mat, ket: &Vector) -> C {
    (bra.adjoint() * m * ket)[(0, 0)]
}

/// `U(to, from)` as a product of segment matrices.
pub fn propagate(segments: &[Mat], from: usize, to: usize, dim: usize) -> Mat {
    let mut u = identity(dim);
    for s in &segments[from..to] {
        u = s * u;
    }
    u
}

/// `⟨χ|U(t_f,t) Π U(t,t_i)|ψ⟩ / ⟨χ|U(t_f,t_i)|ψ⟩` in one expression.
pub fn weak_value(segments: &[Mat], pre: &Vector, post: &Vector, proj: &Mat, stage: usize) -> (C, C) {
    let dim = pre.len();
    let last = segments.len();
    let numerator = bra_ket(
        post,
        &(propagate(segments, stage, last, dim) * proj * propagate(segments, 0, stage, dim)),
        pre,
    );
    let denominator = bra_ket(post, &propagate(segments, 0, last, dim), pre);
    (numerator, denominator)
}

/// Strong-pointer experiment in the full product space. Registers are qubits
/// that start in `|0⟩`; `couplings[r] = (stage, projector)` for register `r`.
/// Couplings at one stage are applied in register order, before the segment.
///
/// Returns the postselected amplitude of every register pattern, with
/// register 0 as the most significant bit.
pub fn strong_run(
    segments: &[Mat],
    pre: &Vector,
    post: &Vector,
    couplings: &[(usize, Mat)],
    filter: Option<(usize, Mat)>,
) -> Vec<C> {
    let dim = pre.len();
    let n = couplings.len();
    let regs = 1usize << n;
    let flip = Mat::from_row_slice(2, 2, &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)]);

    let kron_all = |system: &Mat, register: Option<(usize, &Mat)>| -> Mat {
        let mut m = system.clone();
        for r in 0..n {
            let factor = match register {
                Some((target, op)) if target == r => op.clone(),
                _ => identity(2),
            };
            m = m.kronecker(&factor);
        }
        m
    };

    let mut state = pre.kronecker(&{
        let mut ready = Vector::zeros(regs);
        ready[0] = C::new(1.0, 0.0);
        ready
    });
    for stage in 0..=segments.len() {
        for (r, (at, proj)) in couplings.iter().enumerate() {
            if *at == stage {
                let controlled = kron_all(proj, Some((r, &flip))) + kron_all(&(identity(dim) - proj), None);
                state = controlled * state;
            }
        }
        if let Some((at, proj)) = &filter {
            if *at == stage {
                state = kron_all(proj, None) * state;
            }
        }
        if stage < segments.len() {
            state = kron_all(&segments[stage], None) * state;
        }
    }
    (0..regs)
        .map(|pattern| (0..dim).map(|s| post[s].conj() * state[s * regs + pattern]).sum())
        .collect()
}

/// The three-path interferometer, rebuilt from scratch.
pub struct ThreePath {
    pub segments: Vec<Mat>,
    pub pre: Vector,
    pub post: Vector,
    /// (label, stage index, projector)
    pub sites: Vec<(&'static str, usize, Mat)>,
}

pub fn three_path() -> ThreePath {
    let s = 1.0 / 3f64.sqrt();
    let path = |i: usize| {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        outer(&real_vector(&v))
    };
    let crossing = outer(&real_vector(&[0.0, 1.0, 1.0]));
    ThreePath {
        segments: vec![identity(3); 5],
        pre: real_vector(&[s, s, s]),
        post: real_vector(&[s, s, -s]),
        sites: vec![
            ("E", 1, path(1)),
            ("F", 1, path(2)),
            ("D", 2, path(0)),
            ("O", 2, crossing.clone()),
            ("E'", 3, path(1)),
            ("F'", 3, path(2)),
            ("O'", 4, crossing),
        ],
    }
}

impl ThreePath {
    pub fn site(&self, label: &str) -> (usize, Mat) {
        let (_, stage, p) = self.sites.iter().find(|(l, _, _)| *l == label).expect("known site");
        (*stage, p.clone())
    }

    pub fn strong(&self, labels: &[&str]) -> Vec<C> {
        let couplings: Vec<_> = labels.iter().map(|l| self.site(l)).collect();
        strong_run(&self.segments, &self.pre, &self.post, &couplings, None)
    }
}
