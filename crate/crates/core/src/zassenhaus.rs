//! Zassenhaus splitting `e^{X+Y} = e^X e^Y e^{-c₂/2!} e^{-c₃/3!} e^{-c₄/4!} ⋯`.
//!
//! [`zassenhaus_terms`] returns the nested-commutator exponents in the
//! published form. Its fourth-order term does not reproduce `e^{X+Y}` to
//! fifth order, so [`zassenhaus_apply`] uses [`standard_terms`], which agree
//! with it through `c₃`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{classify_commutation, ModelSpec};
use crate::numerics::Numerics;
use crate::propagator::{evolution, expm};
use crate::C64;

/// Bracket expression over the letters `X` and `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    X,
    Y,
    Bracket(Box<Word>, Box<Word>),
}

impl Word {
    pub fn bracket(a: Word, b: Word) -> Word {
        Word::Bracket(Box::new(a), Box::new(b))
    }

    /// `[X, Y]`.
    pub fn xy() -> Word {
        Word::bracket(Word::X, Word::Y)
    }

    /// Number of letters.
    pub fn order(&self) -> usize {
        match self {
            Word::X | Word::Y => 1,
            Word::Bracket(a, b) => a.order() + b.order(),
        }
    }

    pub fn evaluate(&self, x: &Matrix, y: &Matrix) -> Matrix {
        match self {
            Word::X => x.clone(),
            Word::Y => y.clone(),
            Word::Bracket(a, b) => {
                let (a, b) = (a.evaluate(x, y), b.evaluate(x, y));
                a.matmul(&b).sub(&b.matmul(&a))
            }
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::X => f.write_str("X"),
            Word::Y => f.write_str("Y"),
            Word::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutatorWord {
    pub coefficient: i64,
    pub word: Word,
}

impl CommutatorWord {
    fn new(coefficient: i64, word: Word) -> Self {
        CommutatorWord { coefficient, word }
    }

    pub fn order(&self) -> usize {
        self.word.order()
    }
}

impl fmt::Display for CommutatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient == 1 {
            write!(f, "{}", self.word)
        } else {
            write!(f, "{}{}", self.coefficient, self.word)
        }
    }
}

/// `c_n` as a sum of words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZassenhausTerm {
    pub order: usize,
    pub words: Vec<CommutatorWord>,
}

impl ZassenhausTerm {
    pub fn evaluate(&self, x: &Matrix, y: &Matrix) -> Result<Matrix> {
        let mut acc = Matrix::zeros(x.dim());
        for w in &self.words {
            acc = acc.add(&evaluate_word(w, x, y)?);
        }
        Ok(acc)
    }
}

impl fmt::Display for ZassenhausTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{} =", self.order)?;
        for (k, w) in self.words.iter().enumerate() {
            write!(f, "{}{w}", if k == 0 { " " } else { " + " })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZassenhausExpansion {
    pub max_order: usize,
    pub terms: Vec<ZassenhausTerm>,
}

fn check_order(max_order: usize) -> Result<()> {
    if (2..=4).contains(&max_order) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(max_order))
    }
}

fn nest(inner: Word, letters: &[Word]) -> Word {
    letters.iter().cloned().fold(inner, Word::bracket)
}

fn expansion(max_order: usize, c4: Vec<CommutatorWord>) -> Result<ZassenhausExpansion> {
    check_order(max_order)?;
    let (x, y) = (Word::X, Word::Y);
    let all = [
        ZassenhausTerm { order: 2, words: vec![CommutatorWord::new(1, Word::xy())] },
        ZassenhausTerm {
            order: 3,
            words: vec![
                CommutatorWord::new(2, nest(Word::xy(), core::slice::from_ref(&y))),
                CommutatorWord::new(1, nest(Word::xy(), core::slice::from_ref(&x))),
            ],
        },
        ZassenhausTerm { order: 4, words: c4 },
    ];
    Ok(ZassenhausExpansion { max_order, terms: all.into_iter().take(max_order - 1).collect() })
}

/// `c₂ = [X,Y]`, `c₃ = 2[[X,Y],Y] + [[X,Y],X]` and
/// `c₄ = c₃ + 3[[[X,Y],Y],Y] + [[[X,Y],X],Y] + [[X,Y],[X,Y]]`, as published.
pub fn zassenhaus_terms(max_order: usize) -> Result<ZassenhausExpansion> {
    let (x, y) = (Word::X, Word::Y);
    let c4 = vec![
        CommutatorWord::new(2, nest(Word::xy(), core::slice::from_ref(&y))),
        CommutatorWord::new(1, nest(Word::xy(), core::slice::from_ref(&x))),
        CommutatorWord::new(3, nest(Word::xy(), &[y.clone(), y.clone()])),
        CommutatorWord::new(1, nest(Word::xy(), &[x.clone(), y.clone()])),
        CommutatorWord::new(1, Word::bracket(Word::xy(), Word::xy())),
    ];
    expansion(max_order, c4)
}

/// Same `c₂`, `c₃`; `c₄ = [[[X,Y],X],X] + 3[[[X,Y],X],Y] + 3[[[X,Y],Y],Y]`.
pub fn standard_terms(max_order: usize) -> Result<ZassenhausExpansion> {
    let (x, y) = (Word::X, Word::Y);
    let c4 = vec![
        CommutatorWord::new(1, nest(Word::xy(), &[x.clone(), x.clone()])),
        CommutatorWord::new(3, nest(Word::xy(), &[x.clone(), y.clone()])),
        CommutatorWord::new(3, nest(Word::xy(), &[y.clone(), y.clone()])),
    ];
    expansion(max_order, c4)
}

fn same_shape(x: &Matrix, y: &Matrix) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    Ok(())
}

/// Coefficient times the nested commutator.
pub fn evaluate_word(word: &CommutatorWord, x: &Matrix, y: &Matrix) -> Result<Matrix> {
    same_shape(x, y)?;
    Ok(word.word.evaluate(x, y).scale_real(word.coefficient as f64))
}

/// `e^X e^Y Π_n e^{-c_n/n!}` over the terms of `expansion`.
pub fn zassenhaus_product(x: &Matrix, y: &Matrix, expansion: &ZassenhausExpansion) -> Result<Matrix> {
    same_shape(x, y)?;
    let mut acc = expm(x)?.matmul(&expm(y)?);
    for term in &expansion.terms {
        let c = term.evaluate(x, y)?;
        let fact: f64 = (1..=term.order).map(|k| k as f64).product();
        acc = acc.matmul(&expm(&c.scale_real(-1.0 / fact))?);
    }
    Ok(acc)
}

/// Order-`k` truncation, `e^X e^Y Π_{n=2..k} e^{-c_n/n!}`, whose error
/// against `e^{X+Y}` is `O(‖X, Y‖^{k+1})`.
pub fn zassenhaus_apply(x: &Matrix, y: &Matrix, max_order: usize) -> Result<Matrix> {
    zassenhaus_product(x, y, &standard_terms(max_order)?)
}

/// `e^{X+Y}` for a commutator that commutes with both `X` and `Y`.
///
/// When `[X,Y] = κ·I` the last factor is the scalar `e^{-κ/2}`, otherwise
/// `e^{-[X,Y]/2}`.
pub fn bch_closed_form(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    same_shape(x, y)?;
    let tol = Numerics::DEFAULT.commutator;
    let c = x.matmul(y).sub(&y.matmul(x));
    let scale = x.max_abs().max(y.max_abs()).max(1.0);
    let central = [x, y].iter().map(|m| m.matmul(&c).sub(&c.matmul(m)).max_abs()).fold(0.0, f64::max);
    if central > tol * scale * scale * scale {
        return Err(Error::NotCentral(central));
    }
    let n = c.dim();
    let kappa = c.trace() / n as f64;
    let off_identity = c.sub(&Matrix::identity(n).scale(kappa)).max_abs();
    let head = expm(x)?.matmul(&expm(y)?);
    if off_identity <= tol * scale * scale {
        Ok(head.scale((-kappa / 2.0).exp()))
    } else {
        Ok(head.matmul(&expm(&c.scale_real(-0.5))?))
    }
}

/// `e^{-iH_S t} e^{-i(H_E + H_SE)t}`, exact when `[H_S, H_SE] = 0`.
pub fn electron_phonon_factorization(model: &ModelSpec, t: f64) -> Result<Matrix> {
    let class = classify_commutation(model, Numerics::DEFAULT.commutator);
    if !class.case_b {
        return Err(Error::NotCaseB(class.system_commutator));
    }
    let rest = model.h_e().matrix().add(model.h_se().matrix());
    Ok(evolution(model.h_s().matrix(), t)?.matmul(&evolution(&rest, t)?))
}

/// Test inputs for the splitting error tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// `X = −itσx`, `Y = −itσz`.
    Pauli,
    /// `X = −itσz`, `Y = −2itσz`.
    Commuting,
    /// Strictly upper-triangular 3×3 generators with a central commutator.
    Heisenberg,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Pauli, Scenario::Commuting, Scenario::Heisenberg];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Pauli => "pauli",
            Scenario::Commuting => "commuting",
            Scenario::Heisenberg => "heisenberg",
        }
    }

    pub fn from_name(name: &str) -> Option<Scenario> {
        Scenario::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn generators(self, t: f64) -> (Matrix, Matrix) {
        let (sx, _, sz) = crate::hilbert::pauli();
        let minus_it = C64::new(0.0, -t);
        match self {
            Scenario::Pauli => (sx.scale(minus_it), sz.scale(minus_it)),
            Scenario::Commuting => (sz.scale(minus_it), sz.scale(minus_it * 2.0)),
            Scenario::Heisenberg => {
                let unit = |r: usize, c: usize, v: f64| Matrix::from_fn(3, |i, j| C64::new(if (i, j) == (r, c) { v } else { 0.0 }, 0.0));
                (unit(0, 1, 1.3 * t), unit(1, 2, -0.7 * t))
            }
        }
    }
}

/// `max|zassenhaus_apply(X, Y, k) − expm(X + Y)|`.
pub fn truncation_error(x: &Matrix, y: &Matrix, max_order: usize) -> Result<f64> {
    Ok(zassenhaus_apply(x, y, max_order)?.max_abs_diff(&expm(&x.add(y))?))
}

/// Errors below this are treated as roundoff and left out of slope fits.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

/// Least-squares slope of `log e` against `log t` over points with
/// `e > ROUNDOFF_FLOOR`; `None` with fewer than two such points.
pub fn fitted_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|(t, e)| *t > 0.0 && *e > ROUNDOFF_FLOOR).map(|(t, e)| (t.ln(), e.ln())).collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Truncation errors at orders 2, 3, 4 on a grid, plus fitted slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub scenario: Scenario,
    pub t: Vec<f64>,
    pub errors: Vec<[f64; 3]>,
    pub slopes: [Option<f64>; 3],
}

pub fn error_table(scenario: Scenario, ts: &[f64]) -> Result<ErrorTable> {
    let mut errors = Vec::with_capacity(ts.len());
    for &t in ts {
        let (x, y) = scenario.generators(t);
        errors.push([truncation_error(&x, &y, 2)?, truncation_error(&x, &y, 3)?, truncation_error(&x, &y, 4)?]);
    }
    let slope = |k: usize| fitted_slope(&ts.iter().zip(&errors).map(|(&t, e)| (t, e[k])).collect::<Vec<_>>());
    Ok(ErrorTable { scenario, t: ts.to_vec(), slopes: [slope(0), slope(1), slope(2)], errors })
}

impl fmt::Display for ZassenhausExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Term table lines: `order,coefficient,word`.
pub fn term_rows(expansion: &ZassenhausExpansion) -> Vec<(usize, i64, String)> {
    use alloc::string::ToString;
    expansion
        .terms
        .iter()
        .flat_map(|t| t.words.iter().map(move |w| (t.order, w.coefficient, w.word.to_string())))
        .collect()
}
