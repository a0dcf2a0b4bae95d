//! Finite-dimensional Hilbert spaces built from level, truncated-boson and
//! fermion-mode factors, and dense operators bound to them.
//!
//! Basis states are enumerated row-major over the factors in declaration
//! order: the first factor is the slowest-varying index. Inside a
//! `FermionModes(m)` factor, mode 0 is the most significant occupation bit,
//! and Jordan–Wigner strings run over modes with a smaller index.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", deny_unknown_fields))]
pub enum FactorKind {
    /// `n` generic levels.
    Levels(usize),
    /// Bosonic Fock space truncated at occupation `n_max` (dimension `n_max + 1`).
    BosonFock(usize),
    /// `m` fermionic modes (dimension `2^m`).
    FermionModes(usize),
}

impl FactorKind {
    /// Dimension of the factor, `None` on overflow.
    pub fn dim(&self) -> Option<usize> {
        match *self {
            FactorKind::Levels(n) => Some(n),
            FactorKind::BosonFock(n_max) => n_max.checked_add(1),
            FactorKind::FermionModes(m) => {
                u32::try_from(m).ok().and_then(|m| 1usize.checked_shl(m)).filter(|&d| d != 0)
            }
        }
    }

    fn validate(&self) -> Result<usize> {
        match *self {
            FactorKind::Levels(0) => Err(Error::InvalidFactor("Levels(0) has no states".into())),
            FactorKind::FermionModes(0) => {
                Err(Error::InvalidFactor("FermionModes(0) has no modes".into()))
            }
            _ => self.dim().ok_or(Error::DimensionOverflow),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    factors: Vec<FactorKind>,
    dims: Vec<usize>,
    dim: usize,
}

impl HilbertSpace {
    pub fn factors(&self) -> &[FactorKind] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factor_dim(&self, f: usize) -> Option<usize> {
        self.dims.get(f).copied()
    }

    /// Joint space `self ⊗ other`, with `self`'s factors first.
    pub fn tensor(&self, other: &HilbertSpace) -> Result<HilbertSpace> {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        make_space(&factors)
    }

    /// Per-factor indices of basis state `index`.
    pub fn decompose(&self, mut index: usize) -> Vec<usize> {
        let mut digits = alloc::vec![0; self.dims.len()];
        for (slot, &d) in digits.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        digits
    }

    /// Inverse of [`HilbertSpace::decompose`].
    pub fn compose(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Product of the dimensions of factors strictly before / after `f`.
    fn strides(&self, f: usize) -> (usize, usize) {
        let before = self.dims[..f].iter().product();
        let after = self.dims[f + 1..].iter().product();
        (before, after)
    }
}

/// Validates the factor list and enumerates the joint basis.
pub fn make_space(factors: &[FactorKind]) -> Result<HilbertSpace> {
    if factors.is_empty() {
        return Err(Error::InvalidFactor("a space needs at least one factor".into()));
    }
    let dims = factors.iter().map(FactorKind::validate).collect::<Result<Vec<_>>>()?;
    let dim = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or(Error::DimensionOverflow)?;
    if dim == 0 {
        return Err(Error::InvalidFactor("total dimension is zero".into()));
    }
    Ok(HilbertSpace { factors: factors.to_vec(), dims, dim })
}

/// A dense operator bound to a space.
///
/// `scale` records the magnitude of the quantities the operator was formed
/// from; for a commutator it is the larger of `max|AB|` and `max|BA|`, so a
/// cancellation can be judged relative to what was cancelled.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: Matrix,
    scale: f64,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: Matrix) -> Result<Self> {
        if matrix.dim() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: matrix.dim() });
        }
        let scale = matrix.max_abs();
        Ok(Operator { space, matrix, scale })
    }

    pub fn zero(space: &HilbertSpace) -> Self {
        Operator { space: space.clone(), matrix: Matrix::zeros(space.dim()), scale: 0.0 }
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        Operator { space: space.clone(), matrix: Matrix::identity(space.dim()), scale: 1.0 }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.matrix.hermitian_deviation() <= tol * self.max_abs().max(1.0)
    }

    pub fn adjoint(&self) -> Operator {
        self.with_matrix(self.matrix.adjoint())
    }

    fn with_matrix(&self, matrix: Matrix) -> Operator {
        let scale = matrix.max_abs();
        Operator { space: self.space.clone(), matrix, scale }
    }

    fn same_space(&self, other: &Operator) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.same_space(other)?;
        Ok(self.with_matrix(self.matrix.add(&other.matrix)))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.same_space(other)?;
        Ok(self.with_matrix(self.matrix.sub(&other.matrix)))
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.same_space(other)?;
        Ok(self.with_matrix(self.matrix.matmul(&other.matrix)))
    }

    pub fn scale_by(&self, s: C64) -> Operator {
        self.with_matrix(self.matrix.scale(s))
    }

    pub fn scale_real(&self, s: f64) -> Operator {
        self.with_matrix(self.matrix.scale_real(s))
    }

    /// `self ⊗ other` on the joint space.
    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        let space = self.space.tensor(&other.space)?;
        let matrix = self.matrix.kron(&other.matrix);
        let scale = matrix.max_abs();
        Ok(Operator { space, matrix, scale })
    }
}

/// Embeds an operator on factor `f` as `I ⊗ … ⊗ op ⊗ … ⊗ I`.
pub fn lift(op: &Matrix, f: usize, space: &HilbertSpace) -> Result<Operator> {
    let side = space.factor_dim(f).ok_or(Error::UnknownFactor(f))?;
    if op.dim() != side {
        return Err(Error::DimensionMismatch { expected: side, found: op.dim() });
    }
    let (_, after) = space.strides(f);
    let block = side * after;
    let matrix = Matrix::from_fn(space.dim(), |i, j| {
        let (hi_i, rest_i) = (i / block, i % block);
        let (hi_j, rest_j) = (j / block, j % block);
        let (mid_i, lo_i) = (rest_i / after, rest_i % after);
        let (mid_j, lo_j) = (rest_j / after, rest_j % after);
        if hi_i == hi_j && lo_i == lo_j {
            op[(mid_i, mid_j)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Operator::new(space.clone(), matrix)
}

/// Truncated bosonic annihilation and creation operators on `BosonFock(n_max)`.
pub fn boson_ladder(n_max: usize) -> Result<(Operator, Operator)> {
    let space = make_space(&[FactorKind::BosonFock(n_max)])?;
    let d = space.dim();
    let mut a = Matrix::zeros(d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let annihilate = Operator::new(space, a)?;
    let create = annihilate.adjoint();
    Ok((annihilate, create))
}

/// Jordan–Wigner annihilation and creation operators for `mode` among `modes`.
pub fn fermion_ladder(mode: usize, modes: usize) -> Result<(Operator, Operator)> {
    if mode >= modes {
        return Err(Error::ModeOutOfRange { mode, modes });
    }
    let space = make_space(&[FactorKind::FermionModes(modes)])?;
    let d = space.dim();
    let bit = |k: usize| 1usize << (modes - 1 - k);
    let mut c = Matrix::zeros(d);
    for s in 0..d {
        if s & bit(mode) == 0 {
            continue;
        }
        let string = (0..mode).filter(|&k| s & bit(k) != 0).count();
        let sign = if string % 2 == 0 { 1.0 } else { -1.0 };
        c[(s & !bit(mode), s)] = C64::new(sign, 0.0);
    }
    let annihilate = Operator::new(space, c)?;
    let create = annihilate.adjoint();
    Ok((annihilate, create))
}

/// `AB − BA`, exact, with the product magnitudes recorded as its scale.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.same_space(b)?;
    let ab = a.matrix.matmul(&b.matrix);
    let ba = b.matrix.matmul(&a.matrix);
    let scale = ab.max_abs().max(ba.max_abs());
    Ok(Operator { space: a.space.clone(), matrix: ab.sub(&ba), scale })
}

/// `max|A| ≤ tol · max(1, scale recorded on A)`.
pub fn is_zero(a: &Operator, tol: f64) -> bool {
    a.max_abs() <= tol * a.scale.max(1.0)
}

/// `Tr_E` of an operator on `S ⊗ E` given the two subsystem dimensions.
pub fn partial_trace_env(m: &Matrix, dim_s: usize, dim_e: usize) -> Result<Matrix> {
    check_bipartite(m, dim_s, dim_e)?;
    Ok(Matrix::from_fn(dim_s, |i, j| (0..dim_e).map(|g| m[(i * dim_e + g, j * dim_e + g)]).sum()))
}

/// `Tr_S` of an operator on `S ⊗ E` given the two subsystem dimensions.
pub fn partial_trace_system(m: &Matrix, dim_s: usize, dim_e: usize) -> Result<Matrix> {
    check_bipartite(m, dim_s, dim_e)?;
    Ok(Matrix::from_fn(dim_e, |a, b| (0..dim_s).map(|k| m[(k * dim_e + a, k * dim_e + b)]).sum()))
}

fn check_bipartite(m: &Matrix, dim_s: usize, dim_e: usize) -> Result<()> {
    let expected = dim_s.checked_mul(dim_e).ok_or(Error::DimensionOverflow)?;
    if m.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: m.dim() });
    }
    Ok(())
}

/// Pauli matrices `(σ_x, σ_y, σ_z)` in the ordering `(|0⟩, |1⟩)`.
pub fn pauli() -> (Matrix, Matrix, Matrix) {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    (
        Matrix::from_rows(&[&[z, one], &[one, z]]).unwrap(),
        Matrix::from_rows(&[&[z, -i], &[i, z]]).unwrap(),
        Matrix::from_rows(&[&[one, z], &[z, -one]]).unwrap(),
    )
}

pub(crate) fn check_hermitian(op: &Operator, what: &str, tol: f64) -> Result<()> {
    let deviation = op.matrix.hermitian_deviation();
    if deviation > tol * op.max_abs().max(1.0) {
        return Err(Error::NotHermitian { what: what.into(), deviation });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn lv(n: usize) -> FactorKind {
        FactorKind::Levels(n)
    }

    #[test]
    fn make_space_dimensions() {
        assert_eq!(make_space(&[lv(2), lv(2)]).unwrap().dim(), 4);
        assert_eq!(make_space(&[FactorKind::BosonFock(3)]).unwrap().dim(), 4);
        assert_eq!(
            make_space(&[FactorKind::FermionModes(2), FactorKind::BosonFock(2)]).unwrap().dim(),
            12
        );
    }

    #[test]
    fn make_space_rejects_empty_and_overflow() {
        assert!(matches!(make_space(&[lv(0)]), Err(Error::InvalidFactor(_))));
        assert!(matches!(make_space(&[]), Err(Error::InvalidFactor(_))));
        assert!(matches!(make_space(&[FactorKind::FermionModes(0)]), Err(Error::InvalidFactor(_))));
        assert_eq!(make_space(&[FactorKind::FermionModes(200)]), Err(Error::DimensionOverflow));
        assert_eq!(make_space(&[lv(usize::MAX), lv(2)]), Err(Error::DimensionOverflow));
    }

    #[test]
    fn decompose_compose_round_trip() {
        let s = make_space(&[lv(2), FactorKind::BosonFock(2), lv(3)]).unwrap();
        for i in 0..s.dim() {
            assert_eq!(s.compose(&s.decompose(i)), i);
        }
        assert_eq!(s.decompose(1), vec![0, 0, 1]);
        assert_eq!(s.decompose(9), vec![1, 0, 0]);
    }

    #[test]
    fn lift_sigma_z_on_first_factor() {
        let s = make_space(&[lv(2), lv(2)]).unwrap();
        let (_, _, z) = pauli();
        let l = lift(&z, 0, &s).unwrap();
        assert_eq!(l.matrix(), &Matrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]));
        let id = lift(&Matrix::identity(2), 1, &s).unwrap();
        assert_eq!(id.matrix(), &Matrix::identity(4));
    }

    #[test]
    fn lift_errors() {
        let s = make_space(&[lv(2), lv(3)]).unwrap();
        assert_eq!(lift(&Matrix::identity(2), 2, &s), Err(Error::UnknownFactor(2)));
        assert!(matches!(
            lift(&Matrix::identity(2), 1, &s),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn lifted_operators_on_distinct_factors_commute() {
        let s = make_space(&[lv(2), lv(2)]).unwrap();
        let (x, y, _) = pauli();
        let a = lift(&x, 0, &s).unwrap();
        let b = lift(&y, 1, &s).unwrap();
        // direct 4x4 products
        let ab = a.matrix().matmul(b.matrix());
        let ba = b.matrix().matmul(a.matrix());
        assert_eq!(ab, ba);
        assert_eq!(commutator(&a, &b).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn boson_commutator_is_truncated_identity() {
        let (a, ad) = boson_ladder(2).unwrap();
        let c = commutator(&a, &ad).unwrap();
        let expected = Matrix::from_real_diagonal(&[1.0, 1.0, -2.0]);
        assert!(c.matrix().max_abs_diff(&expected) < 1e-14);
        let number = ad.mul(&a).unwrap();
        assert!(number.matrix().max_abs_diff(&Matrix::from_real_diagonal(&[0.0, 1.0, 2.0])) < 1e-14);
        // a|0> = 0
        assert!((0..3).all(|i| a.matrix()[(i, 0)] == C64::new(0.0, 0.0)));
    }

    #[test]
    fn boson_zero_truncation_is_trivial() {
        let (a, ad) = boson_ladder(0).unwrap();
        assert_eq!(a.dim(), 1);
        assert_eq!(a.max_abs(), 0.0);
        assert_eq!(ad.max_abs(), 0.0);
    }

    #[test]
    fn single_fermion_mode() {
        let (c, _) = fermion_ladder(0, 1).unwrap();
        let one = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        assert_eq!(c.matrix(), &Matrix::from_rows(&[&[z, one], &[z, z]]).unwrap());
    }

    #[test]
    fn fermion_cross_anticommutator_vanishes() {
        let (c0, _) = fermion_ladder(0, 2).unwrap();
        let (_, c1d) = fermion_ladder(1, 2).unwrap();
        let anti = c0.mul(&c1d).unwrap().add(&c1d.mul(&c0).unwrap()).unwrap();
        assert_eq!(anti.max_abs(), 0.0);
        let (c, _) = fermion_ladder(0, 3).unwrap();
        assert_eq!(c.mul(&c).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn fermion_mode_out_of_range() {
        assert_eq!(fermion_ladder(2, 2), Err(Error::ModeOutOfRange { mode: 2, modes: 2 }));
    }

    #[test]
    fn pauli_commutator() {
        let s = make_space(&[lv(2)]).unwrap();
        let (x, y, z) = pauli();
        let x = Operator::new(s.clone(), x).unwrap();
        let y = Operator::new(s.clone(), y).unwrap();
        let c = commutator(&x, &y).unwrap();
        assert!(c.matrix().max_abs_diff(&z.scale(C64::new(0.0, 2.0))) < 1e-15);
        assert_eq!(commutator(&x, &x).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn commutator_rejects_mismatched_spaces() {
        let a = Operator::identity(&make_space(&[lv(2)]).unwrap());
        let b = Operator::identity(&make_space(&[FactorKind::FermionModes(1)]).unwrap());
        assert_eq!(commutator(&a, &b), Err(Error::SpaceMismatch));
    }

    #[test]
    fn is_zero_cases() {
        let s = make_space(&[lv(3)]).unwrap();
        assert!(is_zero(&Operator::zero(&s), 0.0));
        assert!(!is_zero(&Operator::identity(&s), 1e-9));
    }

    #[test]
    fn partial_traces_of_product() {
        let a = Matrix::from_real_diagonal(&[0.25, 0.75]);
        let b = Matrix::from_real_diagonal(&[0.1, 0.2, 0.7]);
        let ab = a.kron(&b);
        assert!(partial_trace_env(&ab, 2, 3).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace_system(&ab, 2, 3).unwrap().max_abs_diff(&b) < 1e-15);
        assert!(partial_trace_env(&ab, 2, 2).is_err());
    }
}
