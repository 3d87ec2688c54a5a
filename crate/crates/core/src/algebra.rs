//! Dense complex linear algebra over small labeled bases.
//!
//! Everything here is immutable: operations return new values. Dimensions in
//! this crate stay in the hundreds at most, so plain row-major `Vec` storage
//! is used throughout.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Separator placed between labels of tensor factors.
pub const LABEL_SEPARATOR: &str = "|";

/// Tolerance used by the `is_unitary` / `is_projector` contracts.
pub const OPERATOR_TOLERANCE: f64 = 1e-10;

/// Tolerance used by the normalization contract on kets.
pub const NORM_TOLERANCE: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Ordered list of unique basis labels.
#[derive(Clone, PartialEq, Eq)]
pub struct Basis {
    labels: Arc<[String]>,
}

impl Basis {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyBasis);
        }
        let mut seen = std::collections::HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Basis {
            labels: labels.into(),
        })
    }

    /// Basis labelled `1..=dim`.
    pub fn numbered(dim: usize) -> Result<Self> {
        Basis::new((1..=dim).map(|i| i.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Product basis; labels are joined with [`LABEL_SEPARATOR`].
    pub fn tensor(&self, other: &Basis) -> Basis {
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for a in self.labels.iter() {
            for b in other.labels.iter() {
                labels.push(format!("{a}{LABEL_SEPARATOR}{b}"));
            }
        }
        // Concatenating unique labels with a separator can only collide if the
        // factor labels themselves contain the separator; fall back to positions.
        match Basis::new(labels) {
            Ok(b) => b,
            Err(_) => Basis::numbered(self.dim() * other.dim()).expect("non-empty"),
        }
    }
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

fn check_finite(values: &[C64], what: &str) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// State vector over a labeled basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    basis: Basis,
    amps: Vec<C64>,
}

impl Ket {
    pub fn new(basis: Basis, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amps.len(),
            });
        }
        check_finite(&amps, "ket")?;
        Ok(Ket { basis, amps })
    }

    /// Ket whose amplitudes are given as real numbers.
    pub fn from_reals(basis: Basis, amps: &[f64]) -> Result<Self> {
        Ket::new(basis, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis_state(basis: Basis, index: usize) -> Result<Self> {
        if index >= basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: index + 1,
            });
        }
        let mut amps = vec![ZERO; basis.dim()];
        amps[index] = ONE;
        Ok(Ket { basis, amps })
    }

    pub fn zero(basis: Basis) -> Self {
        let amps = vec![ZERO; basis.dim()];
        Ket { basis, amps }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalized(&self) -> Result<Ket> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, factor: C64) -> Ket {
        Ket {
            basis: self.basis.clone(),
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Ket) -> Result<Ket> {
        self.check_dim(other.dim())?;
        Ok(Ket {
            basis: self.basis.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Ket) -> Result<Ket> {
        self.add(&other.scale(-ONE))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        inner(self, other)
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket {
            basis: self.basis.tensor(&other.basis),
            amps,
        }
    }

    /// Largest entrywise modulus difference.
    pub fn max_abs_diff(&self, other: &Ket) -> Result<f64> {
        self.check_dim(other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            })
        }
    }
}

/// Square complex matrix over a labeled basis (row basis = column basis).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    basis: Basis,
    entries: Vec<C64>,
}

impl Operator {
    /// Builds an operator from row-major entries.
    pub fn new(basis: Basis, entries: Vec<C64>) -> Result<Self> {
        let n = basis.dim();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        check_finite(&entries, "operator")?;
        Ok(Operator { basis, entries })
    }

    pub fn from_rows(basis: Basis, rows: &[Vec<C64>]) -> Result<Self> {
        let n = basis.dim();
        if rows.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows.len(),
            });
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Operator::new(basis, entries)
    }

    pub fn identity(basis: Basis) -> Self {
        let n = basis.dim();
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = ONE;
        }
        Operator { basis, entries }
    }

    pub fn zero(basis: Basis) -> Self {
        let n = basis.dim();
        Operator {
            basis,
            entries: vec![ZERO; n * n],
        }
    }

    pub fn diagonal(basis: Basis, diag: &[C64]) -> Result<Self> {
        let n = basis.dim();
        if diag.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: diag.len(),
            });
        }
        let mut op = Operator::zero(basis);
        for (i, d) in diag.iter().enumerate() {
            op.entries[i * n + i] = *d;
        }
        Ok(op)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim() + col]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.entries.chunks(self.dim()).map(<[C64]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Operator {
        let n = self.dim();
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        Operator {
            basis: self.basis.clone(),
            entries,
        }
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Operator) -> Result<Operator> {
        self.check_dim(rhs.dim())?;
        let n = self.dim();
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    entries[r * n + c] += a * rhs.entries[k * n + c];
                }
            }
        }
        Ok(Operator {
            basis: self.basis.clone(),
            entries,
        })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        self.check_dim(rhs.dim())?;
        Ok(Operator {
            basis: self.basis.clone(),
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Operator) -> Result<Operator> {
        self.add(&rhs.scale(-ONE))
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator {
            basis: self.basis.clone(),
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        apply(self, ket)
    }

    /// Kronecker product; row/column labels are concatenated.
    pub fn tensor(&self, other: &Operator) -> Operator {
        let (n, m) = (self.dim(), other.dim());
        let dim = n * m;
        let mut entries = vec![ZERO; dim * dim];
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.entries[r1 * n + c1];
                if a == ZERO {
                    continue;
                }
                for r2 in 0..m {
                    for c2 in 0..m {
                        entries[(r1 * m + r2) * dim + c1 * m + c2] = a * other.entries[r2 * m + c2];
                    }
                }
            }
        }
        Operator {
            basis: self.basis.tensor(&other.basis),
            entries,
        }
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_dim(other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max |U†U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = self.adjoint().matmul(self).expect("same dimension");
        product
            .max_abs_diff(&Operator::identity(self.basis.clone()))
            .expect("same dimension")
    }

    /// `max(max |P² - P|, max |P - P†|)`.
    pub fn projector_deviation(&self) -> f64 {
        let square = self.matmul(self).expect("same dimension");
        let idempotence = square.max_abs_diff(self).expect("same dimension");
        let hermiticity = self.max_abs_diff(&self.adjoint()).expect("same dimension");
        idempotence.max(hermiticity)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= OPERATOR_TOLERANCE
    }

    pub fn is_projector(&self) -> bool {
        self.projector_deviation() <= OPERATOR_TOLERANCE
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            })
        }
    }
}

/// Either a ket or an operator, for the kind-checked [`tensor`].
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Ket(Ket),
    Operator(Operator),
}

impl Element {
    fn kind(&self) -> &'static str {
        match self {
            Element::Ket(_) => "ket",
            Element::Operator(_) => "operator",
        }
    }
}

/// Kronecker product of two elements of the same kind.
pub fn tensor(a: &Element, b: &Element) -> Result<Element> {
    match (a, b) {
        (Element::Ket(x), Element::Ket(y)) => Ok(Element::Ket(x.tensor(y))),
        (Element::Operator(x), Element::Operator(y)) => Ok(Element::Operator(x.tensor(y))),
        _ => Err(Error::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        }),
    }
}

/// `Σ conj(bra_i) ket_i`.
pub fn inner(bra: &Ket, ket: &Ket) -> Result<C64> {
    if bra.dim() != ket.dim() {
        return Err(Error::DimensionMismatch {
            expected: bra.dim(),
            found: ket.dim(),
        });
    }
    Ok(bra
        .amps
        .iter()
        .zip(&ket.amps)
        .map(|(b, k)| b.conj() * k)
        .sum())
}

pub fn apply(op: &Operator, ket: &Ket) -> Result<Ket> {
    let n = op.dim();
    if ket.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: ket.dim(),
        });
    }
    let amps = op
        .entries
        .chunks(n)
        .map(|row| row.iter().zip(&ket.amps).map(|(a, b)| a * b).sum())
        .collect();
    Ok(Ket {
        basis: ket.basis.clone(),
        amps,
    })
}

/// Rank-1 projector `|u⟩⟨u|` onto the direction of `u`.
///
/// `u` is normalized first, so any nonzero vector is accepted.
pub fn projector_from_ket(u: &Ket) -> Result<Operator> {
    let u = u.normalized()?;
    let n = u.dim();
    let mut entries = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            entries.push(u.amps[r] * u.amps[c].conj());
        }
    }
    Ok(Operator {
        basis: u.basis.clone(),
        entries,
    })
}

/// Outer product `|a⟩⟨b|`.
pub fn outer(a: &Ket, b: &Ket) -> Result<Operator> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.dim();
    let mut entries = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            entries.push(a.amps[r] * b.amps[c].conj());
        }
    }
    Ok(Operator {
        basis: a.basis.clone(),
        entries,
    })
}
