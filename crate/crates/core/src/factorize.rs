//! Reconstruction of the two single-qubit factors of a separable gate from
//! the 2×2 block determinants of its phase-normalized matrix.
//!
//! For `N = U1 ⊗ U2` with `U1 = [[u1, u2], [−u2*, u1*]]` and
//! `U2 = [[v1, v2], [−v2*, v1*]]`, each 2×2 block of `N` is a multiple of
//! `U2`, so its determinant is the square of the multiplier. Reading the
//! blocks the other way round (entries at stride 2) gives the squares of the
//! entries of `U2`. Square roots leave one sign per entry undetermined; a
//! bounded search over sign patterns picks the one consistent with `N`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{c64, cis, tensor2x2, wrap_angle, GateMatrix2, GateMatrix4, Mat, Tolerance};
use crate::separability::{Letters, PhaseNormalized4};

/// A reconstructed factorization `A = e^{i·global_phase}·(u1 ⊗ u2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorPair {
    pub u1: GateMatrix2,
    pub u2: GateMatrix2,
    pub global_phase: f64,
    /// Phase `α` moved from `u2` onto `u1` relative to the determinant-root
    /// matrices: `u1 = e^{iα}·U1_root`, `u2 = e^{−iα}·U2_root`.
    pub phase_split: f64,
    /// Max-entry `|A − e^{iφ}·u1⊗u2|`.
    pub residual: f64,
}

impl FactorPair {
    /// `e^{i·global_phase}·(u1 ⊗ u2)`.
    pub fn product(&self) -> GateMatrix4 {
        tensor2x2(&self.u1, &self.u2).scale(cis(self.global_phase))
    }
}

/// Squares of the factor entries, read off as 2×2 determinants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDeterminants {
    /// `af − be`
    pub u1_sq: Complex64,
    /// `ch − gd`
    pub u2_sq: Complex64,
    /// `kp − lo`
    pub u1_sq_conj: Complex64,
    /// `in − jm`
    pub u2_sq_conj: Complex64,
    /// `ak − ci`
    pub v1_sq: Complex64,
    /// `bl − jd`
    pub v2_sq: Complex64,
    /// `fp − hn`
    pub v1_sq_conj: Complex64,
    /// `eo − gm`
    pub v2_sq_conj: Complex64,
}

pub fn block_determinants(n: &PhaseNormalized4) -> BlockDeterminants {
    let Letters {
        a,
        b,
        c,
        d,
        e,
        f,
        g,
        h,
        i,
        j,
        k,
        l,
        m,
        n: nn,
        o,
        p,
    } = n.letters();
    BlockDeterminants {
        u1_sq: a * f - b * e,
        u2_sq: c * h - g * d,
        u1_sq_conj: k * p - l * o,
        u2_sq_conj: i * nn - j * m,
        v1_sq: a * k - c * i,
        v2_sq: b * l - j * d,
        v1_sq_conj: f * p - h * nn,
        v2_sq_conj: e * o - g * m,
    }
}

/// Principal square root, or exactly 0 when the root is below `floor`.
fn root(z: Complex64, floor: f64) -> Complex64 {
    if z.norm() < floor * floor {
        c64(0.0, 0.0)
    } else {
        z.sqrt()
    }
}

/// Root of a starred determinant, signed to agree with the conjugate of its
/// partner's root.
fn aligned_conj_root(z: Complex64, partner: Complex64, floor: f64) -> Complex64 {
    let r = root(z, floor);
    if (r + partner.conj()).norm() < (r - partner.conj()).norm() {
        -r
    } else {
        r
    }
}

fn su2_like(
    top_left: Complex64,
    top_right: Complex64,
    bottom_left: Complex64,
    bottom_right: Complex64,
) -> GateMatrix2 {
    Mat::from_rows([[top_left, top_right], [-bottom_left, bottom_right]])
}

/// Rebuilds `(u1, u2)` from a phase-normalized matrix that passed the pairing
/// tests.
///
/// All eight determinant roots are principal; roots below `eps_roundtrip` in
/// modulus are set to 0. With the sign of `u1` and `v1` fixed, the signs of
/// `u2`, `v1`, `v2` span eight patterns; the first whose product matches `±N`
/// within `eps_match` is kept. The factors are then column-orthonormalized and
/// the phase gauge is fixed so the first nonzero entry of `u1` is real and
/// nonnegative.
pub fn reconstruct(n: &PhaseNormalized4, tol: &Tolerance) -> Result<FactorPair> {
    let dets = block_determinants(n);
    let floor = tol.eps_roundtrip;
    let r_u1 = root(dets.u1_sq, floor);
    let r_u2 = root(dets.u2_sq, floor);
    let r_v1 = root(dets.v1_sq, floor);
    let r_v2 = root(dets.v2_sq, floor);
    let r_u1c = aligned_conj_root(dets.u1_sq_conj, r_u1, floor);
    let r_u2c = aligned_conj_root(dets.u2_sq_conj, r_u2, floor);
    let r_v1c = aligned_conj_root(dets.v1_sq_conj, r_v1, floor);
    let r_v2c = aligned_conj_root(dets.v2_sq_conj, r_v2, floor);

    let mut best: Option<(f64, GateMatrix2, GateMatrix2, f64)> = None;
    for pattern in 0..8u8 {
        let flip = |bit: u8| if pattern & (1 << bit) != 0 { -1.0 } else { 1.0 };
        let (s_u2, s_v1, s_v2) = (flip(0), flip(1), flip(2));
        let u1 = su2_like(r_u1, s_u2 * r_u2, s_u2 * r_u2c, r_u1c);
        let u2 = su2_like(s_v1 * r_v1, s_v2 * r_v2, s_v2 * r_v2c, s_v1 * r_v1c);
        let product = tensor2x2(&u1, &u2);
        for overall in [1.0, -1.0] {
            let residual = product.max_abs_diff(&n.entries.scale(c64(overall, 0.0)));
            if best.as_ref().is_none_or(|(r, ..)| residual < *r) {
                best = Some((residual, u1, u2, overall));
            }
        }
        if best.as_ref().is_some_and(|(r, ..)| *r <= tol.eps_match) {
            break;
        }
    }
    let (best_residual, u1, u2, overall) = best.expect("eight patterns tried");
    if best_residual > tol.eps_match {
        return Err(Error::ReconstructionFailed { best_residual });
    }

    let mut u1 = u1.orthonormalize_columns();
    let mut u2 = u2.orthonormalize_columns();
    let global_phase = if overall < 0.0 {
        wrap_angle(n.global_phase + std::f64::consts::PI)
    } else {
        n.global_phase
    };

    let leading = u1
        .entries()
        .find(|z| z.norm() > tol.eps_match)
        .expect("a unitary has a nonzero entry");
    let phase_split = wrap_angle(-leading.arg());
    u1 = u1.scale(cis(phase_split));
    u2 = u2.scale(cis(-phase_split));

    let mut fp = FactorPair {
        u1,
        u2,
        global_phase,
        phase_split,
        residual: 0.0,
    };
    fp.residual = fp.product().max_abs_diff(&n.restore());
    if fp.residual > tol.eps_match {
        return Err(Error::ReconstructionFailed {
            best_residual: fp.residual,
        });
    }
    Ok(fp)
}

/// Moves the gauge phase: `(e^{iα}u1, e^{−iα}u2)`, same product, same residual.
pub fn phase_family(fp: &FactorPair, alpha: f64) -> FactorPair {
    FactorPair {
        u1: fp.u1.scale(cis(alpha)),
        u2: fp.u2.scale(cis(-alpha)),
        phase_split: wrap_angle(fp.phase_split + alpha),
        ..*fp
    }
}
