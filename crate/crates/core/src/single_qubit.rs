//! Single-qubit gates in canonical form
//! `e^{iφ0} [[cosθ e^{iφ1}, sinθ e^{iφ2}], [−sinθ e^{−iφ2}, cosθ e^{−iφ1}]]`
//! and the classification of self-inverse (Hermitian) gates.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{angular_distance, c64, cis, wrap_angle, GateMatrix2, Mat, Tolerance};

/// Canonical parameters of a single-qubit unitary.
///
/// `theta` lies in [0, π/2]; the three phases lie in (−π, π]. The branch
/// integer of the off-diagonal phase condition is resolved into `phi2` and is
/// not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSingleQubit {
    pub theta: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl CanonicalSingleQubit {
    pub fn new(theta: f64, phi0: f64, phi1: f64, phi2: f64) -> Self {
        Self {
            theta,
            phi0,
            phi1,
            phi2,
        }
    }

    /// Evaluates the canonical form.
    pub fn realize(&self) -> GateMatrix2 {
        self.signed_form(SignPosition::Lower)
    }

    /// Recovers canonical parameters from a unitary.
    ///
    /// `phi0` is computed from `½·arg det U` and placed on the branch closest to
    /// `½(arg a + arg d)`; the SU(2) part `e^{−iφ0}U` then yields `theta`, `phi1`
    /// and `phi2`. A phase whose carrying entry has modulus below
    /// `eps_roundtrip / 4` cannot influence the matrix at round-trip precision
    /// and is set to 0.
    pub fn canonicalize(u: &GateMatrix2, tol: &Tolerance) -> Result<Self> {
        u.ensure_unitary(tol)?;
        let (a, b, c, d) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);

        let mut phi0 = 0.5 * u.determinant().arg();
        if a.norm() >= tol.eps_match && d.norm() >= tol.eps_match {
            let target = 0.5 * (a.arg() + d.arg());
            if angular_distance(phi0 + PI, target) < angular_distance(phi0, target) {
                phi0 += PI;
            }
        }
        let phi0 = wrap_angle(phi0);

        let unphase = cis(-phi0);
        let alpha = 0.5 * (a * unphase + (d * unphase).conj());
        let beta = 0.5 * (b * unphase - (c * unphase).conj());

        let floor = tol.eps_roundtrip / 4.0;
        let phase_of = |z: Complex64| if z.norm() > floor { z.arg() } else { 0.0 };

        Ok(Self {
            theta: beta.norm().atan2(alpha.norm()),
            phi0,
            phi1: phase_of(alpha),
            phi2: phase_of(beta),
        })
    }

    /// The four equivalent forms obtained by putting the single negative sign in
    /// front of each entry in turn, ordered (1,1), (1,2), (2,1), (2,2). The
    /// third is [`realize`](Self::realize).
    pub fn equivalent_sign_forms(&self) -> [GateMatrix2; 4] {
        SignPosition::ALL.map(|pos| self.signed_form(pos))
    }

    fn signed_form(&self, pos: SignPosition) -> GateMatrix2 {
        let (s, co) = self.theta.sin_cos();
        let mut m = [
            [co * cis(self.phi1), s * cis(self.phi2)],
            [s * cis(-self.phi2), co * cis(-self.phi1)],
        ];
        let (r, col) = pos.index();
        m[r][col] = -m[r][col];
        Mat::from_rows(m).scale(cis(self.phi0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SignPosition {
    Upper00,
    Upper01,
    Lower,
    Lower11,
}

impl SignPosition {
    const ALL: [SignPosition; 4] = [Self::Upper00, Self::Upper01, Self::Lower, Self::Lower11];

    fn index(self) -> (usize, usize) {
        match self {
            Self::Upper00 => (0, 0),
            Self::Upper01 => (0, 1),
            Self::Lower => (1, 0),
            Self::Lower11 => (1, 1),
        }
    }
}

/// The free global ± in front of a Hermitian gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn of(x: f64) -> Self {
        if x >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// `sign · [[cosθ, i sinθ e^{iφ2}], [−i sinθ e^{−iφ2}, −cosθ]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianParams {
    pub theta: f64,
    pub phi2: f64,
    pub sign: Sign,
}

impl HermitianParams {
    pub fn realize(&self) -> GateMatrix2 {
        let (s, co) = self.theta.sin_cos();
        let i = Complex64::i();
        Mat::from_rows([
            [c64(co, 0.0), i * s * cis(self.phi2)],
            [-i * s * cis(-self.phi2), c64(-co, 0.0)],
        ])
        .scale(c64(self.sign.value(), 0.0))
    }
}

/// Free-function alias of [`HermitianParams::realize`].
pub fn realize_hermitian(h: &HermitianParams) -> GateMatrix2 {
    h.realize()
}

/// Outcome of [`classify_hermitian`].
///
/// A Hermitian unitary has eigenvalues ±1. With one of each it is traceless
/// and has the `U_H(θ, φ2)` form. With a repeated eigenvalue it is `±I`, which
/// is self-inverse but has no `U_H` representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hermiticity {
    Reflection(HermitianParams),
    Scalar(Sign),
    NotSelfInverse,
}

impl Hermiticity {
    pub fn is_self_inverse(&self) -> bool {
        !matches!(self, Hermiticity::NotSelfInverse)
    }
}

/// Decides whether `u` is self-inverse and, if so, recovers its parameters.
///
/// Sign convention: `+` when `Re u11 ≥ 0`; when `cosθ` vanishes the sign is
/// taken from `Im u12` (then `Re u12`), which puts `φ2` in [−π/2, π/2].
pub fn classify_hermitian(u: &GateMatrix2, tol: &Tolerance) -> Result<Hermiticity> {
    u.ensure_unitary(tol)?;
    if u.max_abs_diff(&u.adjoint()) > tol.eps_match {
        return Ok(Hermiticity::NotSelfInverse);
    }
    let trace = u.trace().re;
    if trace.abs() > 1.0 {
        return Ok(Hermiticity::Scalar(Sign::of(trace)));
    }

    let (u11, u12) = (u[(0, 0)], u[(0, 1)]);
    let sign = if u11.re.abs() > tol.eps_match {
        Sign::of(u11.re)
    } else if u12.im.abs() > tol.eps_match {
        Sign::of(u12.im)
    } else {
        Sign::of(u12.re)
    };
    let signed12 = u12 * sign.value();
    let theta = signed12.norm().atan2(sign.value() * u11.re);
    let phi2 = if signed12.norm() > tol.eps_match {
        wrap_angle((-Complex64::i() * signed12).arg())
    } else {
        0.0
    };
    Ok(Hermiticity::Reflection(HermitianParams {
        theta,
        phi2,
        sign,
    }))
}

/// Gates with a fixed textbook matrix.
///
/// `IY` is the Hermitian matrix `[[0, i], [−i, 0]]` (equal to `−Y`), the
/// member of the `U_H` family at `θ = π/2, φ2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedGate {
    I,
    X,
    IY,
    Z,
    H,
    /// Phase gate `diag(1, e^{iξ})`.
    P(f64),
}

impl NamedGate {
    pub fn matrix(&self) -> GateMatrix2 {
        let zero = c64(0.0, 0.0);
        let one = c64(1.0, 0.0);
        match *self {
            NamedGate::I => GateMatrix2::identity(),
            NamedGate::X => Mat::from_rows([[zero, one], [one, zero]]),
            NamedGate::IY => Mat::from_rows([[zero, c64(0.0, 1.0)], [c64(0.0, -1.0), zero]]),
            NamedGate::Z => GateMatrix2::diagonal([one, -one]),
            NamedGate::H => {
                let s = c64(FRAC_1_SQRT_2, 0.0);
                Mat::from_rows([[s, s], [s, -s]])
            }
            NamedGate::P(xi) => GateMatrix2::diagonal([one, cis(xi)]),
        }
    }
}

impl FromStr for NamedGate {
    type Err = Error;

    /// Accepts `I`, `X`, `iY`, `Z`, `H` and `P(<ξ>)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "I" => return Ok(NamedGate::I),
            "X" => return Ok(NamedGate::X),
            "iY" => return Ok(NamedGate::IY),
            "Z" => return Ok(NamedGate::Z),
            "H" => return Ok(NamedGate::H),
            _ => {}
        }
        s.strip_prefix("P(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|xi| xi.trim().parse::<f64>().ok())
            .filter(|xi| xi.is_finite())
            .map(NamedGate::P)
            .ok_or_else(|| Error::UnknownGateName(s.to_string()))
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedGate::I => f.write_str("I"),
            NamedGate::X => f.write_str("X"),
            NamedGate::IY => f.write_str("iY"),
            NamedGate::Z => f.write_str("Z"),
            NamedGate::H => f.write_str("H"),
            NamedGate::P(xi) => write!(f, "P({xi})"),
        }
    }
}

/// Looks up a named gate by its textual name.
pub fn named_gate(name: &str) -> Result<GateMatrix2> {
    name.parse::<NamedGate>().map(|g| g.matrix())
}
