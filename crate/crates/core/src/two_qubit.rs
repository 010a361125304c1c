//! Constructors for the two-qubit gates used as worked examples.

use num_complex::Complex64;

use crate::matrix::{c64, cis, GateMatrix2, GateMatrix4, Mat};

pub fn cnot() -> GateMatrix4 {
    controlled(&crate::single_qubit::NamedGate::X.matrix())
}

/// `diag-block(I, u)`: `u` acts on the second qubit when the first is |1⟩.
pub fn controlled(u: &GateMatrix2) -> GateMatrix4 {
    Mat::from_fn(|r, c| match (r / 2, c / 2) {
        (0, 0) => {
            if r == c {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        }
        (1, 1) => u[(r % 2, c % 2)],
        _ => c64(0.0, 0.0),
    })
}

/// Controlled-U with `U = e^{iφ}[[a, b], [−b*, a*]]`; requires `|a|² + |b|² = 1`.
pub fn controlled_su2(a: Complex64, b: Complex64, phi: f64) -> GateMatrix4 {
    let u = Mat::from_rows([[a, b], [-b.conj(), a.conj()]]).scale(cis(phi));
    controlled(&u)
}

/// `diag(1, 1, e^{iφ}, e^{−iφ})`.
pub fn split_phase(phi: f64) -> GateMatrix4 {
    GateMatrix4::diagonal([c64(1.0, 0.0), c64(1.0, 0.0), cis(phi), cis(-phi)])
}

/// A lossless beam splitter on two spatial modes: `[[t, ir], [ir, t]]` with
/// `r = √(1 − t²)`, the reflected mode picking up a π/2 phase.
pub fn beam_splitter(t: f64) -> GateMatrix2 {
    let ir = c64(0.0, (1.0 - t * t).max(0.0).sqrt());
    Mat::from_rows([[c64(t, 0.0), ir], [ir, c64(t, 0.0)]])
}

/// Polarization-dependent beam splitter over (polarization ⊗ spatial mode),
/// input ordering `(a_H, b_H, a_V, b_V)`. Each polarization sees its own
/// symmetric splitter with real transmission `t_h` or `t_v`.
pub fn pdbs(t_h: f64, t_v: f64) -> GateMatrix4 {
    let (bh, bv) = (beam_splitter(t_h), beam_splitter(t_v));
    Mat::from_fn(|r, c| match (r / 2, c / 2) {
        (0, 0) => bh[(r % 2, c % 2)],
        (1, 1) => bv[(r % 2, c % 2)],
        _ => c64(0.0, 0.0),
    })
}

/// Polarization-independent splitter: `I ⊗ [[t, ir], [ir, t]]`.
pub fn pidbs(t: f64) -> GateMatrix4 {
    pdbs(t, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::tensor2x2;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn cnot_permutes_last_two_basis_states() {
        let m = cnot();
        assert_eq!(m[(2, 3)], c64(1.0, 0.0));
        assert_eq!(m[(3, 2)], c64(1.0, 0.0));
        assert_eq!(m[(2, 2)], c64(0.0, 0.0));
        assert_eq!(m.unitarity_residual(), 0.0);
    }

    #[test]
    fn pdbs_layout_and_unitarity() {
        let m = pdbs(FRAC_1_SQRT_2, 1.0 / 3f64.sqrt());
        assert!(m.unitarity_residual() < 1e-15);
        assert!((m[(2, 2)].re - 1.0 / 3f64.sqrt()).abs() < 1e-16);
        assert!((m[(3, 2)].im - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(m[(0, 2)], c64(0.0, 0.0));
    }

    #[test]
    fn pidbs_is_identity_tensor_splitter() {
        let t = 0.3;
        let expected = tensor2x2(&GateMatrix2::identity(), &beam_splitter(t));
        assert!(pidbs(t).max_abs_diff(&expected) < 1e-16);
    }
}
