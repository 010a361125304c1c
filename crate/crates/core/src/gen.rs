//! Seeded random gates for property suites and the `gen` subcommand.
//!
//! All draws come from `ChaCha8Rng::seed_from_u64(seed)`, so a seed fully
//! determines the output on every platform.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, GateInstance, GateOp};
use crate::matrix::{cis, tensor2x2, GateMatrix2, GateMatrix4, Tolerance};
use crate::separability::separability_oracle;
use crate::single_qubit::CanonicalSingleQubit;
use crate::two_qubit::cnot;

/// Oracle residual a generated entangling gate must exceed.
const GENUINE_MARGIN: f64 = 1e-3;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Single,
    Separable,
    Genuine,
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(GenKind::Single),
            "separable" => Ok(GenKind::Separable),
            "genuine" => Ok(GenKind::Genuine),
            other => Err(format!(
                "unknown kind `{other}` (expected single, separable or genuine)"
            )),
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::Single => "single",
            GenKind::Separable => "separable",
            GenKind::Genuine => "genuine",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generated {
    Two(GateMatrix2),
    Four(GateMatrix4),
}

fn phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(-PI..PI)
}

/// Canonical parameters drawn uniformly from `θ ∈ [0, π/2]` and phases in
/// `[−π, π)`.
pub fn random_canonical<R: Rng + ?Sized>(rng: &mut R) -> CanonicalSingleQubit {
    CanonicalSingleQubit::new(
        rng.gen_range(0.0..=FRAC_PI_2),
        phase(rng),
        phase(rng),
        phase(rng),
    )
}

pub fn random_single<R: Rng + ?Sized>(rng: &mut R) -> GateMatrix2 {
    random_canonical(rng).realize()
}

/// `e^{iγ}·(U1 ⊗ U2)` with random factors and phase.
pub fn random_separable<R: Rng + ?Sized>(rng: &mut R) -> GateMatrix4 {
    let (u1, u2) = (random_single(rng), random_single(rng));
    tensor2x2(&u1, &u2).scale(cis(phase(rng)))
}

/// `(A⊗B)·CNOT·(C⊗D)` with random singles, redrawn until the realignment
/// oracle confirms it is at least `1e-3` away from every product.
pub fn random_genuine<R: Rng + ?Sized>(rng: &mut R) -> GateMatrix4 {
    let tol = Tolerance::default();
    loop {
        let left = tensor2x2(&random_single(rng), &random_single(rng));
        let right = tensor2x2(&random_single(rng), &random_single(rng));
        let g = left.mat_mul(&cnot()).mat_mul(&right);
        let residual = separability_oracle(&g, &tol)
            .map(|o| o.residual)
            .unwrap_or(0.0);
        if residual > GENUINE_MARGIN {
            return g;
        }
    }
}

/// One gate of the requested kind from a fresh generator seeded with `seed`.
pub fn gen_random(kind: GenKind, seed: u64) -> Generated {
    let mut rng = rng_from_seed(seed);
    match kind {
        GenKind::Single => Generated::Two(random_single(&mut rng)),
        GenKind::Separable => Generated::Four(random_separable(&mut rng)),
        GenKind::Genuine => Generated::Four(random_genuine(&mut rng)),
    }
}

/// Random circuit of `1..=max_gates` gates over `num_lines ≥ 2` lines, mixing
/// single-qubit gates, separable and genuine two-qubit gates, and inserted
/// inverses so that the optimization passes have something to find: the
/// exact inverse of the previous gate (possibly with its lines listed in
/// reverse order and a phase), or the inverse of one factor of a preceding
/// product gate.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, num_lines: usize, max_gates: usize) -> Circuit {
    assert!(num_lines >= 2, "two-qubit gates need two lines");
    let tol = Tolerance::default();
    let target = rng.gen_range(1..=max_gates.max(1));
    let mut c = Circuit::new(num_lines).expect("num_lines > 0");
    let mut last_product: Option<([usize; 2], GateMatrix2, GateMatrix2)> = None;

    while c.gates().len() < target {
        let k = c.gates().len();
        let line = rng.gen_range(0..num_lines);
        let other = (line + rng.gen_range(1..num_lines)) % num_lines;
        let gate = match rng.gen_range(0..5) {
            0 => GateInstance::single(format!("s{k}"), line, random_single(rng)),
            1 => {
                let (u1, u2) = (random_single(rng), random_single(rng));
                last_product = Some(([line, other], u1, u2));
                let m = tensor2x2(&u1, &u2).scale(cis(phase(rng)));
                GateInstance::pair(format!("p{k}"), [line, other], m)
            }
            2 => GateInstance::pair(format!("g{k}"), [line, other], random_genuine(rng)),
            3 => {
                let Some(prev) = c.gates().last() else {
                    continue;
                };
                let ph = cis(if rng.gen_bool(0.5) { phase(rng) } else { 0.0 });
                match &prev.op {
                    GateOp::Single { line, matrix } => {
                        GateInstance::single(format!("inv{k}"), *line, matrix.adjoint().scale(ph))
                    }
                    GateOp::Pair { lines, matrix } if rng.gen_bool(0.5) => GateInstance::pair(
                        format!("inv{k}"),
                        [lines[1], lines[0]],
                        matrix.adjoint().swap_qubits().scale(ph),
                    ),
                    GateOp::Pair { lines, matrix } => {
                        GateInstance::pair(format!("inv{k}"), *lines, matrix.adjoint().scale(ph))
                    }
                }
            }
            _ => {
                let Some((lines, u1, u2)) = last_product else {
                    continue;
                };
                if rng.gen_bool(0.5) {
                    GateInstance::single(format!("inv{k}"), lines[0], u1.adjoint())
                } else {
                    GateInstance::single(format!("inv{k}"), lines[1], u2.adjoint())
                }
            }
        };
        c.push(gate, &tol).expect("generated gates are valid");
    }
    c
}
