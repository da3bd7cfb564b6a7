//! Dressed transition operators of a coupling operator in an energy eigenbasis.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{adjoint, check_square, EigenSystem, Operator, C64};

/// Matrix elements below this magnitude are dropped from transition tables.
pub const ELEMENT_CUTOFF: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionClass {
    Positive,
    Zero,
}

/// One matrix element `<j|(s + s^dag)|k>` with `E_k >= E_j`.
#[derive(Clone, Copy, Debug)]
pub struct Transition {
    pub j: usize,
    pub k: usize,
    pub delta: f64,
    pub element: C64,
    pub class: TransitionClass,
}

impl Transition {
    pub fn is_positive(&self) -> bool {
        self.class == TransitionClass::Positive
    }
}

#[derive(Clone, Debug)]
pub struct TransitionTable {
    pub transitions: Vec<Transition>,
    pub dim: usize,
    pub zero_tol: f64,
}

/// Default frequency tolerance for treating a transition as zero-frequency.
pub fn default_zero_tol(eig: &EigenSystem) -> f64 {
    1e-9 * eig.energies.iter().fold(0.0f64, |m, e| m.max(e.abs()))
}

pub fn build_transition_table(s: &Operator, eig: &EigenSystem, zero_tol: f64) -> Result<TransitionTable> {
    let n = check_square(&s.view())?;
    if n != eig.dim() {
        return Err(Error::DimensionMismatch { expected: eig.dim(), found: n });
    }
    if !(zero_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("zero_tol must be non-negative, got {zero_tol}")));
    }
    let x = s + &adjoint(s);
    let xd = eig.to_eigenbasis(&x)?;
    let mut transitions = Vec::new();
    for j in 0..n {
        for k in j..n {
            let element = xd[[j, k]];
            if element.norm() <= ELEMENT_CUTOFF {
                continue;
            }
            let delta = eig.energies[k] - eig.energies[j];
            let class = if delta.abs() <= zero_tol { TransitionClass::Zero } else { TransitionClass::Positive };
            transitions.push(Transition { j, k, delta: delta.max(0.0), element, class });
        }
    }
    Ok(TransitionTable { transitions, dim: n, zero_tol })
}

impl TransitionTable {
    pub fn positive(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(|t| t.is_positive())
    }

    pub fn zero(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(|t| !t.is_positive())
    }

    /// `S+` in the dressed basis: `sum C_jk |j><k|` over positive transitions.
    pub fn s_plus_dressed(&self) -> Operator {
        let mut m = Array2::zeros((self.dim, self.dim));
        for t in self.positive() {
            m[[t.j, t.k]] += t.element;
        }
        m
    }

    pub fn s_minus_dressed(&self) -> Operator {
        adjoint(&self.s_plus_dressed())
    }

    /// `S0` in the dressed basis (Hermitian).
    pub fn s_zero_dressed(&self) -> Operator {
        let mut m = Array2::<C64>::zeros((self.dim, self.dim));
        for t in self.zero() {
            m[[t.j, t.k]] += t.element;
            if t.j != t.k {
                m[[t.k, t.j]] += t.element.conj();
            }
        }
        m
    }

    /// Largest transition frequency, or zero for an empty table.
    pub fn max_delta(&self) -> f64 {
        self.transitions.iter().fold(0.0, |m, t| m.max(t.delta))
    }
}

fn check_table(table: &TransitionTable, eig: &EigenSystem) -> Result<()> {
    if table.dim != eig.dim() {
        return Err(Error::DimensionMismatch { expected: eig.dim(), found: table.dim });
    }
    Ok(())
}

/// `S+` (energy-lowering part) as a bare-basis operator.
pub fn assemble_s_plus(table: &TransitionTable, eig: &EigenSystem) -> Result<Operator> {
    check_table(table, eig)?;
    eig.from_eigenbasis(&table.s_plus_dressed())
}

pub fn assemble_s_minus(table: &TransitionTable, eig: &EigenSystem) -> Result<Operator> {
    Ok(adjoint(&assemble_s_plus(table, eig)?))
}

pub fn assemble_s_zero(table: &TransitionTable, eig: &EigenSystem) -> Result<Operator> {
    check_table(table, eig)?;
    eig.from_eigenbasis(&table.s_zero_dressed())
}

/// Dressed excitation number `S- S+` as a bare-basis operator.
pub fn dressed_number(table: &TransitionTable, eig: &EigenSystem) -> Result<Operator> {
    let p = assemble_s_plus(table, eig)?;
    Ok(crate::linalg::matmul_op(&p, crate::linalg::Op::H, &p, crate::linalg::Op::N))
}

/// `S-` and `S+` of one coupling operator, bare basis.
#[derive(Clone, Debug)]
pub struct DressedLadder {
    pub minus: Operator,
    pub plus: Operator,
}

impl DressedLadder {
    pub fn new(table: &TransitionTable, eig: &EigenSystem) -> Result<Self> {
        let plus = assemble_s_plus(table, eig)?;
        Ok(DressedLadder { minus: adjoint(&plus), plus })
    }

    pub fn number(&self) -> Operator {
        crate::linalg::matmul(&self.minus, &self.plus)
    }

    /// `S- S- S+ S+`.
    pub fn pair_number(&self) -> Operator {
        let mm = crate::linalg::matmul(&self.minus, &self.minus);
        let pp = crate::linalg::matmul(&self.plus, &self.plus);
        crate::linalg::matmul(&mm, &pp)
    }
}

