//! Dense linear algebra on the truncated qubit ⊗ Fock space.
//!
//! Basis conventions used throughout the crate:
//!
//! * qubit: `|g⟩` is index 0, `|e⟩` is index 1, so `σ_z = diag(-1, +1)`;
//! * field: Fock states `|0⟩ … |n_max⟩`, with `a†|n_max⟩ = 0` (hard cutoff);
//! * composite: `|s⟩ ⊗ |n⟩` lives at index `s·(n_max + 1) + n`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{cis, modulus, Real};

/// Highest retained Fock occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidCutoff(n_max));
        }
        Ok(Self(n_max))
    }

    pub fn n_max(self) -> usize {
        self.0
    }

    pub fn field_dim(self) -> usize {
        self.0 + 1
    }

    pub fn composite_dim(self) -> usize {
        2 * (self.0 + 1)
    }

    /// Minimum `n_max` the sizing rule asks for a coherent amplitude of
    /// magnitude `r`: `r² + 10·r`.
    pub fn required_for(r: f64) -> f64 {
        r * r + 10.0 * r
    }

    /// Smallest cutoff satisfying the sizing rule for amplitude magnitude `r`.
    pub fn sized_for(r: f64) -> Self {
        Self(Self::required_for(r).ceil().max(1.0) as usize)
    }

    pub fn check_amplitude(self, r: f64, allow_small: bool) -> Result<()> {
        let required = Self::required_for(r);
        if !allow_small && (self.0 as f64) < required {
            return Err(Error::CutoffTooSmall {
                n_max: self.0,
                amplitude: r,
                required,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceTag {
    FieldOnly,
    QubitOnly,
    Composite,
}

/// The space an operator or state acts on, carrying the cutoff where one applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Field(FockCutoff),
    Qubit,
    Composite(FockCutoff),
}

impl Space {
    pub fn tag(self) -> SpaceTag {
        match self {
            Space::Field(_) => SpaceTag::FieldOnly,
            Space::Qubit => SpaceTag::QubitOnly,
            Space::Composite(_) => SpaceTag::Composite,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Space::Field(c) => c.field_dim(),
            Space::Qubit => 2,
            Space::Composite(c) => c.composite_dim(),
        }
    }

    pub fn cutoff(self) -> Option<FockCutoff> {
        match self {
            Space::Field(c) | Space::Composite(c) => Some(c),
            Space::Qubit => None,
        }
    }

    /// Basis indices whose Fock label is at most `n_keep`. Truncation
    /// artifacts live above this block.
    pub fn interior_indices(self, n_keep: usize) -> Vec<usize> {
        match self {
            Space::Qubit => vec![0, 1],
            Space::Field(c) => (0..=n_keep.min(c.n_max())).collect(),
            Space::Composite(c) => {
                let d = c.field_dim();
                let keep = n_keep.min(c.n_max());
                (0..=keep).chain((0..=keep).map(|n| d + n)).collect()
            }
        }
    }
}

/// Dense complex square matrix tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    space: Space,
    entries: DMatrix<Complex<T>>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn new(space: Space, entries: DMatrix<Complex<T>>) -> Result<Self> {
        let dim = space.dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(Self { space, entries })
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            entries: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            entries: DMatrix::identity(d, d),
        }
    }

    pub fn from_real_diagonal(space: Space, diag: impl IntoIterator<Item = T>) -> Result<Self> {
        let values: Vec<Complex<T>> = diag.into_iter().map(|x| Complex::new(x, T::zero())).collect();
        if values.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: space.dim(),
                right: values.len(),
            });
        }
        Ok(Self {
            space,
            entries: DMatrix::from_diagonal(&DVector::from_vec(values)),
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn tag(&self) -> SpaceTag {
        self.space.tag()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex<T>> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            entries: self.entries.adjoint(),
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            space: self.space,
            entries: &self.entries * c,
        }
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(Complex::new(c, T::zero()))
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            if self.tag() != other.tag() {
                return Err(Error::SpaceMismatch {
                    expected: self.tag(),
                    found: other.tag(),
                });
            }
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space,
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space,
            entries: &self.entries - &other.entries,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space,
            entries: &self.entries * &other.entries,
        })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn apply(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if psi.space() != self.space {
            return Err(Error::SpaceMismatch {
                expected: self.tag(),
                found: psi.space().tag(),
            });
        }
        Ok(StateVector {
            space: self.space,
            amplitudes: &self.entries * psi.amplitudes(),
            truncation_tail: psi.truncation_tail,
        })
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = modulus(self.entries[(i, j)] - self.entries[(j, i)].conj());
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_deviation() < tol
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.same_space(other)?;
        Ok(max_abs(&(&self.entries - &other.entries)))
    }

    /// Largest entrywise deviation from `other`, restricted to Fock labels `<= n_keep`.
    pub fn interior_max_abs_diff(&self, other: &Self, n_keep: usize) -> Result<T> {
        self.same_space(other)?;
        let idx = self.space.interior_indices(n_keep);
        let mut worst = T::zero();
        for &i in &idx {
            for &j in &idx {
                worst = worst.max(modulus(self.entries[(i, j)] - other.entries[(i, j)]));
            }
        }
        Ok(worst)
    }

    /// `max |M†M - I|`.
    pub fn unitarity_deviation(&self) -> T {
        let prod = self.entries.adjoint() * &self.entries;
        max_abs(&(prod - DMatrix::identity(self.dim(), self.dim())))
    }

    /// `max |M†M - I|` on the Fock block `<= n_keep`.
    pub fn interior_unitarity_deviation(&self, n_keep: usize) -> T {
        let prod = OperatorMatrix {
            space: self.space,
            entries: self.entries.adjoint() * &self.entries,
        };
        prod.interior_max_abs_diff(&Self::identity(self.space), n_keep)
            .expect("same space")
    }
}

fn max_abs<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

/// Two-level basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitState {
    Ground,
    Excited,
}

impl QubitState {
    pub fn index(self) -> usize {
        match self {
            QubitState::Ground => 0,
            QubitState::Excited => 1,
        }
    }
}

/// Amplitude vector over one of the spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    space: Space,
    amplitudes: DVector<Complex<T>>,
    /// Probability mass discarded by truncation before renormalization
    /// (zero unless built as a truncated coherent state).
    truncation_tail: T,
}

impl<T: Real> StateVector<T> {
    pub fn new(space: Space, amplitudes: DVector<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: space.dim(),
                right: amplitudes.len(),
            });
        }
        Ok(Self {
            space,
            amplitudes,
            truncation_tail: T::zero(),
        })
    }

    pub fn fock(n: usize, cutoff: FockCutoff) -> Result<Self> {
        if n > cutoff.n_max() {
            return Err(Error::DimensionMismatch {
                left: cutoff.field_dim(),
                right: n + 1,
            });
        }
        let mut v = DVector::zeros(cutoff.field_dim());
        v[n] = Complex::new(T::one(), T::zero());
        Self::new(Space::Field(cutoff), v)
    }

    pub fn qubit(s: QubitState) -> Self {
        let mut v = DVector::zeros(2);
        v[s.index()] = Complex::new(T::one(), T::zero());
        Self {
            space: Space::Qubit,
            amplitudes: v,
            truncation_tail: T::zero(),
        }
    }

    /// `|s⟩ ⊗ |field⟩`.
    pub fn product(s: QubitState, field: &StateVector<T>) -> Result<Self> {
        Self::qubit(s).tensor(field)
    }

    pub fn tensor(&self, field: &StateVector<T>) -> Result<Self> {
        if self.space.tag() != SpaceTag::QubitOnly {
            return Err(Error::SpaceMismatch {
                expected: SpaceTag::QubitOnly,
                found: self.space.tag(),
            });
        }
        let cutoff = match field.space {
            Space::Field(c) => c,
            other => {
                return Err(Error::SpaceMismatch {
                    expected: SpaceTag::FieldOnly,
                    found: other.tag(),
                })
            }
        };
        Ok(Self {
            space: Space::Composite(cutoff),
            amplitudes: self.amplitudes.kronecker(&field.amplitudes),
            truncation_tail: field.truncation_tail,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize) -> Complex<T> {
        self.amplitudes[i]
    }

    pub fn truncation_tail(&self) -> T {
        self.truncation_tail
    }

    pub fn norm_squared(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `⟨ψ|M|ψ⟩`.
    pub fn expectation(&self, op: &OperatorMatrix<T>) -> Result<Complex<T>> {
        self.inner(&op.apply(self)?)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max(modulus(*a - *b))))
    }

    pub(crate) fn from_parts(space: Space, amplitudes: DVector<Complex<T>>, truncation_tail: T) -> Self {
        debug_assert_eq!(amplitudes.len(), space.dim());
        Self {
            space,
            amplitudes,
            truncation_tail,
        }
    }
}

/// Annihilation operator: `A[n-1, n] = √n`.
pub fn annihilation<T: Real>(cutoff: FockCutoff) -> OperatorMatrix<T> {
    let d = cutoff.field_dim();
    let mut m = DMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = Complex::new(T::lit(n as f64).sqrt(), T::zero());
    }
    OperatorMatrix {
        space: Space::Field(cutoff),
        entries: m,
    }
}

pub fn creation<T: Real>(cutoff: FockCutoff) -> OperatorMatrix<T> {
    annihilation(cutoff).adjoint()
}

/// `a†a = diag(0, 1, …, n_max)`.
pub fn number<T: Real>(cutoff: FockCutoff) -> OperatorMatrix<T> {
    OperatorMatrix::from_real_diagonal(
        Space::Field(cutoff),
        (0..cutoff.field_dim()).map(|n| T::lit(n as f64)),
    )
    .expect("diagonal has field dimension")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    Z,
    Plus,
    Minus,
    X,
}

pub fn pauli<T: Real>(which: Pauli) -> OperatorMatrix<T> {
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    // rows/cols ordered (g, e)
    let m = match which {
        Pauli::Z => [-one, zero, zero, one],
        Pauli::Plus => [zero, zero, one, zero],
        Pauli::Minus => [zero, one, zero, zero],
        Pauli::X => [zero, one, one, zero],
    };
    OperatorMatrix {
        space: Space::Qubit,
        entries: DMatrix::from_row_slice(2, 2, &m),
    }
}

/// `qubit_op ⊗ field_op` in the composite ordering.
pub fn tensor<T: Real>(qubit_op: &OperatorMatrix<T>, field_op: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    if qubit_op.tag() != SpaceTag::QubitOnly {
        return Err(Error::SpaceMismatch {
            expected: SpaceTag::QubitOnly,
            found: qubit_op.tag(),
        });
    }
    let cutoff = match field_op.space {
        Space::Field(c) => c,
        other => {
            return Err(Error::SpaceMismatch {
                expected: SpaceTag::FieldOnly,
                found: other.tag(),
            })
        }
    };
    Ok(OperatorMatrix {
        space: Space::Composite(cutoff),
        entries: qubit_op.entries.kronecker(&field_op.entries),
    })
}

/// Eigendecomposition `M = V Λ V†` of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct Spectrum<T: Real> {
    space: Space,
    values: DVector<T>,
    vectors: DMatrix<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(m: &OperatorMatrix<T>) -> Result<Self> {
        let deviation = m.hermiticity_deviation();
        if deviation >= T::tol(1e-12) {
            return Err(Error::NotHermitian {
                deviation: deviation.as_f64(),
            });
        }
        let dim = m.dim();
        let eig = SymmetricEigen::try_new(m.entries.clone(), T::epsilon(), 1000 * dim.max(1))
            .ok_or(Error::Eigendecomposition { dim })?;
        Ok(Self {
            space: m.space,
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &DVector<T> {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<Complex<T>> {
        &self.vectors
    }

    /// `V f(Λ) V†`.
    pub fn apply(&self, f: impl Fn(T) -> Complex<T>) -> OperatorMatrix<T> {
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[j]);
        }
        OperatorMatrix {
            space: self.space,
            entries: scaled * self.vectors.adjoint(),
        }
    }

    /// Coordinates of `psi` in the eigenbasis, `V†ψ`.
    pub fn to_eigenbasis(&self, psi: &StateVector<T>) -> Result<DVector<Complex<T>>> {
        if psi.space() != self.space {
            return Err(Error::DimensionMismatch {
                left: self.values.len(),
                right: psi.dim(),
            });
        }
        Ok(self.vectors.ad_mul(psi.amplitudes()))
    }

    /// `V · coords`.
    pub fn from_eigenbasis(&self, coords: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        &self.vectors * coords
    }
}

/// `f(M)` for Hermitian `M` by spectral decomposition.
pub fn hermitian_function<T: Real>(
    m: &OperatorMatrix<T>,
    f: impl Fn(T) -> Complex<T>,
) -> Result<OperatorMatrix<T>> {
    Ok(Spectrum::new(m)?.apply(f))
}

/// Bare displacement `exp(ξ a† − ξ* a)` on the truncated field space.
pub fn displacement<T: Real>(xi: Complex<T>, cutoff: FockCutoff) -> Result<OperatorMatrix<T>> {
    let a = annihilation::<T>(cutoff);
    let generator = creation::<T>(cutoff).scale(xi).sub(&a.scale(xi.conj()))?;
    // exp(G) = exp(-i·(iG)) with iG Hermitian
    let hermitian = generator.scale(Complex::new(T::zero(), T::one()));
    hermitian_function(&hermitian, |lambda| cis(-lambda))
}

/// Truncated coherent state `|α⟩`, renormalized; the discarded tail is kept
/// in [`StateVector::truncation_tail`].
pub fn coherent_state<T: Real>(alpha: Complex<T>, cutoff: FockCutoff, allow_small: bool) -> Result<StateVector<T>> {
    let r = modulus(alpha);
    cutoff.check_amplitude(r.as_f64(), allow_small)?;
    let d = cutoff.field_dim();
    let mut amps = DVector::zeros(d);
    let mut c = Complex::new((-(r * r) / T::lit(2.0)).exp(), T::zero());
    amps[0] = c;
    for n in 1..d {
        c = c * alpha / T::lit(n as f64).sqrt();
        amps[n] = c;
    }
    let norm_sq = amps.iter().fold(T::zero(), |acc, z: &Complex<T>| acc + z.norm_sqr());
    let tail = (T::one() - norm_sq).max(T::zero());
    amps /= Complex::new(norm_sq.sqrt(), T::zero());
    Ok(StateVector {
        space: Space::Field(cutoff),
        amplitudes: amps,
        truncation_tail: tail,
    })
}

/// Norm of the coherent amplitudes `e^{-|α|²/2} αⁿ/√n!` kept by the cutoff,
/// before renormalization.
pub fn coherent_kept_norm<T: Real>(alpha: Complex<T>, cutoff: FockCutoff) -> T {
    let r2 = alpha.norm_sqr();
    let mut p = (-r2).exp();
    let mut acc = p;
    for n in 1..cutoff.field_dim() {
        p = p * r2 / T::lit(n as f64);
        acc += p;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn c(n: usize) -> FockCutoff {
        FockCutoff::new(n).unwrap()
    }

    #[test]
    fn cutoff_rejects_zero() {
        assert_eq!(FockCutoff::new(0), Err(Error::InvalidCutoff(0)));
        assert!(c(5).check_amplitude(0.45, false).is_ok());
        assert!(matches!(
            c(30).check_amplitude(5.0, false),
            Err(Error::CutoffTooSmall { .. })
        ));
        assert!(c(30).check_amplitude(5.0, true).is_ok());
    }

    #[test]
    fn annihilation_entries() {
        let a = annihilation::<f64>(c(3));
        assert!((a.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        let vac = StateVector::fock(0, c(3)).unwrap();
        assert_eq!(a.apply(&vac).unwrap().norm(), 0.0);
    }

    #[test]
    fn number_operator_from_ladder() {
        let a = annihilation::<f64>(c(10));
        let n = a.adjoint().mul(&a).unwrap();
        assert!(n.max_abs_diff(&number(c(10))).unwrap() < 1e-14);
    }

    #[test]
    fn creation_is_exact_adjoint() {
        let ad = creation::<f64>(c(3));
        assert!((ad.get(2, 1).re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(ad.max_abs_diff(&annihilation::<f64>(c(3)).adjoint()).unwrap(), 0.0);
        // hard cutoff: a†|n_max⟩ = 0
        let top = StateVector::fock(3, c(3)).unwrap();
        assert_eq!(ad.apply(&top).unwrap().norm(), 0.0);
    }

    #[test]
    fn ladder_commutator_truncation_corner() {
        let n_max = 6;
        let a = annihilation::<f64>(c(n_max));
        let comm = a.commutator(&a.adjoint()).unwrap();
        for i in 0..=n_max {
            for j in 0..=n_max {
                let expected = if i != j {
                    0.0
                } else if i < n_max {
                    1.0
                } else {
                    -(n_max as f64)
                };
                assert!((comm.get(i, j).re - expected).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn pauli_conventions() {
        let z = pauli::<f64>(Pauli::Z);
        assert_eq!(z.get(0, 0).re, -1.0);
        assert_eq!(z.get(1, 1).re, 1.0);
        let g = StateVector::<f64>::qubit(QubitState::Ground);
        let e = StateVector::<f64>::qubit(QubitState::Excited);
        assert_eq!(pauli(Pauli::Plus).apply(&g).unwrap(), e);
        assert_eq!(pauli(Pauli::Minus).apply(&e).unwrap(), g);
        let x = pauli::<f64>(Pauli::X);
        assert_eq!(x.mul(&x).unwrap(), OperatorMatrix::identity(Space::Qubit));
    }

    #[test]
    fn tensor_ordering() {
        let cut = c(4);
        let id = tensor(&OperatorMatrix::<f64>::identity(Space::Qubit), &OperatorMatrix::identity(Space::Field(cut))).unwrap();
        assert_eq!(id, OperatorMatrix::identity(Space::Composite(cut)));

        let sz = tensor(&pauli::<f64>(Pauli::Z), &OperatorMatrix::identity(Space::Field(cut))).unwrap();
        for i in 0..10 {
            let expected = if i < 5 { -1.0 } else { 1.0 };
            assert_eq!(sz.get(i, i).re, expected);
        }

        let op = tensor(&pauli::<f64>(Pauli::Plus), &annihilation(cut)).unwrap();
        let g1 = StateVector::product(QubitState::Ground, &StateVector::fock(1, cut).unwrap()).unwrap();
        let e0 = StateVector::product(QubitState::Excited, &StateVector::fock(0, cut).unwrap()).unwrap();
        assert!(op.apply(&g1).unwrap().max_abs_diff(&e0).unwrap() < 1e-15);
    }

    #[test]
    fn tensor_rejects_wrong_spaces() {
        let f = annihilation::<f64>(c(2));
        assert!(matches!(tensor(&f, &f), Err(Error::SpaceMismatch { .. })));
        let q = pauli::<f64>(Pauli::X);
        assert!(matches!(tensor(&q, &q), Err(Error::SpaceMismatch { .. })));
    }

    #[test]
    fn hermitian_function_examples() {
        let cut = c(3);
        let zero = OperatorMatrix::<f64>::zeros(Space::Field(cut));
        let cos0 = hermitian_function(&zero, |x| Complex::new(x.cos(), 0.0)).unwrap();
        assert!(cos0.max_abs_diff(&OperatorMatrix::identity(Space::Field(cut))).unwrap() < 1e-15);

        let m = OperatorMatrix::from_real_diagonal(Space::Qubit, [0.0, std::f64::consts::PI]).unwrap();
        let cm = hermitian_function(&m, |x| Complex::new(x.cos(), 0.0)).unwrap();
        let expected = OperatorMatrix::from_real_diagonal(Space::Qubit, [1.0, -1.0]).unwrap();
        assert!(cm.max_abs_diff(&expected).unwrap() < 1e-15);

        // β = 0: cos(γI) = cos(γ)I
        let gamma = 0.3;
        let arg = OperatorMatrix::<f64>::identity(Space::Field(cut)).scale_real(gamma);
        let c = hermitian_function(&arg, |x| Complex::new(x.cos(), 0.0)).unwrap();
        let expected = OperatorMatrix::identity(Space::Field(cut)).scale_real(gamma.cos());
        assert!(c.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn hermitian_function_rejects_non_hermitian() {
        let a = annihilation::<f64>(c(3));
        assert!(matches!(
            hermitian_function(&a, |x| Complex::new(x, 0.0)),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let cut = c(30);
        let xi = cplx::<f64>(0.6, 0.8);
        let d = displacement(xi, cut).unwrap();
        let from_d = d.apply(&StateVector::fock(0, cut).unwrap()).unwrap();
        let coh = coherent_state(xi, cut, false).unwrap();
        assert!(from_d.max_abs_diff(&coh).unwrap() < 1e-8);

        let d0 = displacement(cplx::<f64>(0.0, 0.0), cut).unwrap();
        assert!(d0.max_abs_diff(&OperatorMatrix::identity(Space::Field(cut))).unwrap() < 1e-14);
    }

    #[test]
    fn displacement_shifts_annihilation_on_interior() {
        let cut = c(40);
        let xi = cplx::<f64>(0.4, 0.0);
        let d = displacement(xi, cut).unwrap();
        let a = annihilation::<f64>(cut);
        let lhs = d.adjoint().mul(&a).unwrap().mul(&d).unwrap();
        let rhs = a.add(&OperatorMatrix::identity(Space::Field(cut)).scale(xi)).unwrap();
        // truncation error leaks about ten levels below the cutoff
        assert!(lhs.interior_max_abs_diff(&rhs, 30).unwrap() < 1e-6);
        assert!(lhs.interior_max_abs_diff(&rhs, 38).unwrap() > 1e-2);
    }

    #[test]
    fn coherent_state_examples() {
        let cut = c(30);
        let vac = coherent_state(cplx::<f64>(0.0, 0.0), cut, false).unwrap();
        assert_eq!(vac, StateVector::fock(0, cut).unwrap());

        let alpha = cplx::<f64>(2.0, 0.0);
        // Poisson tail beyond 30 at mean 4
        assert!((coherent_kept_norm(alpha, cut) - 1.0).abs() < 1e-10);
        let coh = coherent_state(alpha, cut, false).unwrap();
        assert!((coh.norm() - 1.0).abs() < 1e-14);
        assert!(coh.truncation_tail() < 1e-10);
        let mean_n = coh.expectation(&number(cut)).unwrap();
        assert!((mean_n.re - 4.0).abs() < 1e-6);
        assert!(mean_n.im.abs() < 1e-14);
    }

    #[test]
    fn coherent_state_enforces_sizing_rule() {
        let cut = c(20);
        let alpha = cplx::<f64>(3.0, 0.0);
        assert!(matches!(coherent_state(alpha, cut, false), Err(Error::CutoffTooSmall { .. })));
        let small = coherent_state(alpha, cut, true).unwrap();
        assert!(small.truncation_tail() > 0.0);
        assert!((small.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn generic_over_f32() {
        let cut = c(8);
        let a = annihilation::<f32>(cut);
        let x = a.add(&a.adjoint()).unwrap();
        let sp = Spectrum::new(&x).unwrap();
        let back = sp.apply(|l| Complex::new(l, 0.0));
        assert!(back.max_abs_diff(&x).unwrap() < 1e-5);
    }
}
