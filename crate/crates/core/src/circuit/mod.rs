//! Gate-list circuits over numbered qubit lines, their cost metrics, and a
//! dense-unitary verifier for circuits of up to four lines.
//!
//! Lines are 0-based in memory (the text format is 1-based). Line 0 is the
//! most significant qubit of the circuit unitary.

mod passes;
pub mod text;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

pub use passes::{optimize, pass_absorb, pass_cancel_inverses, pass_decompose, Optimized};

use crate::error::{Error, Result};
use crate::matrix::{cis, GateMatrix2, GateMatrix4, Tolerance};

/// Largest circuit the unitary verifier will expand.
pub const MAX_VERIFIED_LINES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    Single {
        line: usize,
        matrix: GateMatrix2,
    },
    /// `matrix` acts on `lines[0] ⊗ lines[1]`, `lines[0]` being the first
    /// Kronecker factor.
    Pair {
        lines: [usize; 2],
        matrix: GateMatrix4,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateInstance {
    pub label: String,
    pub op: GateOp,
}

impl GateInstance {
    pub fn single(label: impl Into<String>, line: usize, matrix: GateMatrix2) -> Self {
        Self {
            label: label.into(),
            op: GateOp::Single { line, matrix },
        }
    }

    pub fn pair(label: impl Into<String>, lines: [usize; 2], matrix: GateMatrix4) -> Self {
        Self {
            label: label.into(),
            op: GateOp::Pair { lines, matrix },
        }
    }

    pub fn arity(&self) -> usize {
        match self.op {
            GateOp::Single { .. } => 1,
            GateOp::Pair { .. } => 2,
        }
    }

    pub fn lines(&self) -> &[usize] {
        match &self.op {
            GateOp::Single { line, .. } => std::slice::from_ref(line),
            GateOp::Pair { lines, .. } => lines,
        }
    }

    pub fn touches(&self, line: usize) -> bool {
        self.lines().contains(&line)
    }

    pub fn shares_line_with(&self, other: &GateInstance) -> bool {
        self.lines().iter().any(|&l| other.touches(l))
    }

    /// True when both gates act on exactly the same set of lines.
    pub fn same_line_set(&self, other: &GateInstance) -> bool {
        self.arity() == other.arity() && self.lines().iter().all(|&l| other.touches(l))
    }

    fn unitarity_residual(&self) -> f64 {
        match &self.op {
            GateOp::Single { matrix, .. } => matrix.unitarity_residual(),
            GateOp::Pair { matrix, .. } => matrix.unitarity_residual(),
        }
    }
}

/// An ordered gate list with a circuit-level global phase accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_lines: usize,
    gates: Vec<GateInstance>,
    /// Phase shed by rewrites (e.g. a cancelled pair whose product was
    /// `e^{iφ}·I`). The circuit denotes `e^{i·global_phase}·U_gates`.
    pub global_phase: f64,
}

impl Circuit {
    pub fn new(num_lines: usize) -> Result<Self> {
        if num_lines == 0 {
            return Err(Error::EmptyCircuit);
        }
        Ok(Self {
            num_lines,
            gates: Vec::new(),
            global_phase: 0.0,
        })
    }

    /// Builds a circuit, validating every gate.
    pub fn with_gates(
        num_lines: usize,
        gates: impl IntoIterator<Item = GateInstance>,
        tol: &Tolerance,
    ) -> Result<Self> {
        let mut c = Self::new(num_lines)?;
        for g in gates {
            c.push(g, tol)?;
        }
        Ok(c)
    }

    /// Appends a gate after checking its lines are distinct and in range and
    /// its matrix is unitary within `tol.eps_unitary`.
    pub fn push(&mut self, gate: GateInstance, tol: &Tolerance) -> Result<()> {
        self.validate_lines(gate.lines())?;
        let residual = gate.unitarity_residual();
        if residual.is_nan() || residual > tol.eps_unitary {
            return Err(Error::NotUnitary {
                residual,
                tolerance: tol.eps_unitary,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub(crate) fn validate_lines(&self, lines: &[usize]) -> Result<()> {
        for (k, &l) in lines.iter().enumerate() {
            if l >= self.num_lines {
                return Err(Error::LineOutOfRange {
                    index: l,
                    num_lines: self.num_lines,
                });
            }
            if lines[..k].contains(&l) {
                return Err(Error::DuplicateLine(l));
            }
        }
        Ok(())
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub(crate) fn gates_mut(&mut self) -> &mut Vec<GateInstance> {
        &mut self.gates
    }

    pub fn metrics(&self) -> CostMetrics {
        metrics(self)
    }
}

/// Gate count, quantum cost, width and depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CostMetrics {
    pub gate_count: usize,
    /// Two-qubit gates plus the single-qubit gates that cannot be absorbed
    /// because their line carries no two-qubit gate.
    pub quantum_cost: usize,
    /// Lines touched by at least one gate.
    pub width: usize,
    /// Longest chain of gates linked through shared lines.
    pub depth: usize,
}

impl CostMetrics {
    /// Componentwise `self ≤ other`.
    pub fn dominated_by(&self, other: &CostMetrics) -> bool {
        self.gate_count <= other.gate_count
            && self.quantum_cost <= other.quantum_cost
            && self.width <= other.width
            && self.depth <= other.depth
    }
}

pub fn metrics(c: &Circuit) -> CostMetrics {
    let n = c.num_lines();
    let mut touched = vec![false; n];
    let mut has_pair = vec![false; n];
    let mut level = vec![0usize; n];
    for g in c.gates() {
        let start = g.lines().iter().map(|&l| level[l]).max().unwrap_or(0) + 1;
        for &l in g.lines() {
            touched[l] = true;
            level[l] = start;
            if g.arity() == 2 {
                has_pair[l] = true;
            }
        }
    }
    let pairs = c.gates().iter().filter(|g| g.arity() == 2).count();
    let stranded = c
        .gates()
        .iter()
        .filter(|g| matches!(g.op, GateOp::Single { line, .. } if !has_pair[line]))
        .count();
    CostMetrics {
        gate_count: c.gates().len(),
        quantum_cost: pairs + stranded,
        width: touched.iter().filter(|&&t| t).count(),
        depth: level.into_iter().max().unwrap_or(0),
    }
}

/// Expands a gate on the given lines into the full `2^n` space.
fn embed(n: usize, lines: &[usize], local: &[Complex64], local_dim: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let bit = |line: usize| n - 1 - line;
    let local_index = |state: usize| {
        lines
            .iter()
            .fold(0usize, |acc, &l| (acc << 1) | ((state >> bit(l)) & 1))
    };
    let mask: usize = lines.iter().map(|&l| 1usize << bit(l)).sum();
    DMatrix::from_fn(dim, dim, |row, col| {
        if row & !mask != col & !mask {
            return Complex64::new(0.0, 0.0);
        }
        local[local_index(row) * local_dim + local_index(col)]
    })
}

/// The unitary a circuit denotes, row-major semantics with line 0 as the most
/// significant qubit; later gates multiply on the left.
pub fn circuit_unitary(c: &Circuit) -> Result<DMatrix<Complex64>> {
    let n = c.num_lines();
    if n > MAX_VERIFIED_LINES {
        return Err(Error::TooManyLines(n));
    }
    let dim = 1usize << n;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for g in c.gates() {
        let full = match &g.op {
            GateOp::Single { line, matrix } => embed(n, &[*line], &matrix.to_row_major(), 2),
            GateOp::Pair { lines, matrix } => embed(n, lines, &matrix.to_row_major(), 4),
        };
        u = full * u;
    }
    Ok(u * cis(c.global_phase))
}

/// Entrywise distance between two circuit unitaries after removing the best
/// global phase.
pub fn unitary_distance_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    crate::matrix::phase_insensitive_distance(a.as_slice(), b.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, tensor2x2};
    use crate::single_qubit::NamedGate;
    use crate::two_qubit::cnot;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn dense(m: &GateMatrix4) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(4, 4, &m.to_row_major())
    }

    #[test]
    fn empty_circuit() {
        let c = Circuit::new(2).unwrap();
        assert_eq!(circuit_unitary(&c).unwrap(), DMatrix::identity(4, 4));
        assert_eq!(
            metrics(&c),
            CostMetrics {
                gate_count: 0,
                quantum_cost: 0,
                width: 0,
                depth: 0
            }
        );
    }

    #[test]
    fn single_gate_on_most_significant_line() {
        let x = NamedGate::X.matrix();
        let c = Circuit::with_gates(2, [GateInstance::single("X", 0, x)], &tol()).unwrap();
        let expected = dense(&tensor2x2(&x, &GateMatrix2::identity()));
        assert!(unitary_distance_up_to_phase(&circuit_unitary(&c).unwrap(), &expected) < 1e-15);
    }

    #[test]
    fn reversed_pair_lines_swap_the_factors() {
        let (h, x) = (NamedGate::H.matrix(), NamedGate::X.matrix());
        let c = Circuit::with_gates(
            2,
            [GateInstance::pair("hx", [1, 0], tensor2x2(&h, &x))],
            &tol(),
        )
        .unwrap();
        let expected = dense(&tensor2x2(&x, &h));
        assert!((circuit_unitary(&c).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn pair_on_outer_lines_of_three() {
        // CNOT with control on line 0 and target on line 2: |100⟩ ↦ |101⟩.
        let c = Circuit::with_gates(3, [GateInstance::pair("cx", [0, 2], cnot())], &tol()).unwrap();
        let u = circuit_unitary(&c).unwrap();
        assert_eq!(u[(5, 4)], c64(1.0, 0.0));
        assert_eq!(u[(2, 2)], c64(1.0, 0.0));
        assert_eq!(u[(4, 4)], c64(0.0, 0.0));
    }

    #[test]
    fn validation_errors() {
        let mut c = Circuit::new(2).unwrap();
        let h = NamedGate::H.matrix();
        assert_eq!(
            c.push(GateInstance::single("h", 2, h), &tol()),
            Err(Error::LineOutOfRange {
                index: 2,
                num_lines: 2
            })
        );
        assert_eq!(
            c.push(GateInstance::pair("cx", [1, 1], cnot()), &tol()),
            Err(Error::DuplicateLine(1))
        );
        let bad = GateMatrix2::diagonal([c64(1.0, 0.0), c64(0.5, 0.0)]);
        assert!(matches!(
            c.push(GateInstance::single("bad", 0, bad), &tol()),
            Err(Error::NotUnitary { .. })
        ));
        assert_eq!(Circuit::new(0), Err(Error::EmptyCircuit));
        assert_eq!(
            circuit_unitary(&Circuit::new(5).unwrap()),
            Err(Error::TooManyLines(5))
        );
    }

    #[test]
    fn metrics_count_stranded_singles() {
        let h = NamedGate::H.matrix();
        let c = Circuit::with_gates(
            3,
            [
                GateInstance::single("h0", 0, h),
                GateInstance::pair("cx", [0, 1], cnot()),
                GateInstance::single("h2", 2, h),
            ],
            &tol(),
        )
        .unwrap();
        assert_eq!(
            metrics(&c),
            CostMetrics {
                gate_count: 3,
                quantum_cost: 2,
                width: 3,
                depth: 2
            }
        );
    }
}
