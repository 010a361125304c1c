//! Complex scalars, fixed-size gate matrices and the tolerance policy shared by
//! every verdict in the crate.
//!
//! Storage is row-major throughout. For two-qubit matrices the first Kronecker
//! factor is the most significant qubit, so `tensor2x2(u1, u2)` places `u1`'s
//! entries on the 2×2 block grid and `u2` inside each block.

use std::f64::consts::PI;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The atom of every matrix in the crate.
pub type ComplexScalar = Complex64;

/// Shorthand constructor for a complex scalar.
#[inline]
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Wraps an angle into the principal range (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Distance between two angles on the circle, in [0, π].
pub fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// The three independent tolerance knobs.
///
/// `eps_unitary` gates acceptance of an input as a unitary, `eps_match` decides
/// every entrywise equality claim (tests, verdicts, pass rewrites) and
/// `eps_roundtrip` bounds parametrize/realize round trips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_unitary: f64,
    pub eps_match: f64,
    pub eps_roundtrip: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_unitary: 1e-9,
            eps_match: 1e-9,
            eps_roundtrip: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(eps_unitary: f64, eps_match: f64, eps_roundtrip: f64) -> Result<Self> {
        Self {
            eps_unitary,
            eps_match,
            eps_roundtrip,
        }
        .validated()
    }

    /// Returns `self` if all three knobs are finite and strictly positive.
    pub fn validated(self) -> Result<Self> {
        for (name, value) in [
            ("eps_unitary", self.eps_unitary),
            ("eps_match", self.eps_match),
            ("eps_roundtrip", self.eps_roundtrip),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(self)
    }
}

/// Dense square complex matrix of fixed size `N`, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat<const N: usize>([[Complex64; N]; N]);

/// A single-qubit gate `[[a, b], [c, d]]`.
pub type GateMatrix2 = Mat<2>;
/// A two-qubit gate, entries `a11 … a44`.
pub type GateMatrix4 = Mat<4>;

impl<const N: usize> Mat<N> {
    pub const DIM: usize = N;

    pub const fn from_rows(rows: [[Complex64; N]; N]) -> Self {
        Self(rows)
    }

    /// Builds a matrix from `N*N` row-major entries.
    pub fn from_row_major(entries: &[Complex64]) -> Option<Self> {
        if entries.len() != N * N {
            return None;
        }
        let mut m = Self::zeros();
        for (k, z) in entries.iter().enumerate() {
            m.0[k / N][k % N] = *z;
        }
        Some(m)
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] = f(r, c);
            }
        }
        m
    }

    pub fn zeros() -> Self {
        Self([[Complex64::new(0.0, 0.0); N]; N])
    }

    pub fn identity() -> Self {
        Self::from_fn(|r, c| if r == c { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
    }

    pub fn diagonal(diag: [Complex64; N]) -> Self {
        Self::from_fn(|r, c| if r == c { diag[r] } else { c64(0.0, 0.0) })
    }

    pub fn rows(&self) -> &[[Complex64; N]; N] {
        &self.0
    }

    /// Row-major entries.
    pub fn entries(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.0.iter().flat_map(|row| row.iter().copied())
    }

    pub fn to_row_major(&self) -> Vec<Complex64> {
        self.entries().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mat_mul(&self, rhs: &Self) -> Self {
        Self::from_fn(|r, c| (0..N).map(|k| self.0[r][k] * rhs.0[k][c]).sum())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(|r, c| self.0[c][r].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(|r, c| self.0[r][c] * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|k| self.0[k][k]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .zip(other.entries())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Max over entries of |A†A − I| and |AA† − I|.
    pub fn unitarity_residual(&self) -> f64 {
        let id = Self::identity();
        let left = self.adjoint().mat_mul(self).max_abs_diff(&id);
        let right = self.mat_mul(&self.adjoint()).max_abs_diff(&id);
        left.max(right)
    }

    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        self.is_finite() && self.unitarity_residual() <= tol.eps_unitary
    }

    /// Fails with [`Error::NotUnitary`] unless the matrix is finite and unitary
    /// within `tol.eps_unitary`.
    pub fn ensure_unitary(&self, tol: &Tolerance) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let residual = self.unitarity_residual();
        if residual > tol.eps_unitary {
            return Err(Error::NotUnitary {
                residual,
                tolerance: tol.eps_unitary,
            });
        }
        Ok(())
    }

    /// Entrywise distance after removing the best global phase, estimated from
    /// the largest-modulus entry of `other`.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        phase_insensitive_distance(&self.to_row_major(), &other.to_row_major())
    }
}

impl Mat<2> {
    pub fn determinant(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Projects onto the nearest unitary in the column Gram–Schmidt sense:
    /// normalize column 1, orthogonalize column 2 against it, normalize.
    pub fn orthonormalize_columns(&self) -> Self {
        let m = &self.0;
        let n0 = (m[0][0].norm_sqr() + m[1][0].norm_sqr()).sqrt();
        let c0 = [m[0][0] / n0, m[1][0] / n0];
        let overlap = c0[0].conj() * m[0][1] + c0[1].conj() * m[1][1];
        let mut c1 = [m[0][1] - overlap * c0[0], m[1][1] - overlap * c0[1]];
        let n1 = (c1[0].norm_sqr() + c1[1].norm_sqr()).sqrt();
        c1 = [c1[0] / n1, c1[1] / n1];
        Self([[c0[0], c1[0]], [c0[1], c1[1]]])
    }
}

impl Mat<4> {
    /// Conjugation by SWAP: the same gate with its two qubits exchanged.
    pub fn swap_qubits(&self) -> Self {
        const P: [usize; 4] = [0, 2, 1, 3];
        Self::from_fn(|r, c| self.0[P[r]][P[c]])
    }
}

impl<const N: usize> Index<(usize, usize)> for Mat<N> {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.0[r][c]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Mat<N> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.0[r][c]
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mat_mul(&rhs)
    }
}

impl<const N: usize> Mul for &Mat<N> {
    type Output = Mat<N>;
    fn mul(self, rhs: Self) -> Mat<N> {
        self.mat_mul(rhs)
    }
}

impl<const N: usize> std::fmt::Debug for Mat<N> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("[")?;
        for (r, row) in self.0.iter().enumerate() {
            if r > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (c, z) in row.iter().enumerate() {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Kronecker product `u1 ⊗ u2`; `u1` acts on the most significant qubit.
pub fn tensor2x2(u1: &GateMatrix2, u2: &GateMatrix2) -> GateMatrix4 {
    Mat::from_fn(|r, c| u1[(r / 2, c / 2)] * u2[(r % 2, c % 2)])
}

/// Entrywise distance between two equally sized row-major buffers after
/// dividing out the global phase read off the largest-modulus entry of `b`.
pub fn phase_insensitive_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "buffers must have the same length");
    let Some((k, _)) = b
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.norm().total_cmp(&y.norm()))
    else {
        return 0.0;
    };
    let phase = if b[k].norm() > 0.0 && a[k].norm() > 0.0 {
        let ratio = a[k] / b[k];
        ratio / ratio.norm()
    } else {
        c64(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl<const N: usize> Serialize for Mat<N> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixDoc {
            dim: N,
            entries: self.entries().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, const N: usize> Deserialize<'de> for Mat<N> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = MatrixDoc::deserialize(deserializer)?;
        if doc.dim != N || doc.entries.len() != N * N {
            return Err(D::Error::custom(format!(
                "expected a {N}x{N} matrix, found dim {} with {} entries",
                doc.dim,
                doc.entries.len()
            )));
        }
        let entries: Vec<_> = doc.entries.iter().map(|[re, im]| c64(*re, *im)).collect();
        Ok(Self::from_row_major(&entries).expect("length checked"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn x() -> GateMatrix2 {
        Mat::from_rows([
            [c64(0.0, 0.0), c64(1.0, 0.0)],
            [c64(1.0, 0.0), c64(0.0, 0.0)],
        ])
    }

    fn h() -> GateMatrix2 {
        let s = c64(FRAC_1_SQRT_2, 0.0);
        Mat::from_rows([[s, s], [s, -s]])
    }

    #[test]
    fn products_of_involutions() {
        let id = GateMatrix2::identity();
        assert_eq!(id * id, id);
        assert_eq!(x() * x(), id);
        assert!((h() * h()).max_abs_diff(&id) <= 1e-15);
    }

    #[test]
    fn adjoint_examples() {
        let y = Mat::from_rows([
            [c64(0.0, 0.0), c64(0.0, 1.0)],
            [c64(0.0, -1.0), c64(0.0, 0.0)],
        ]);
        assert_eq!(y.adjoint(), y);
        let xi = 0.37;
        let d = GateMatrix2::diagonal([cis(xi), c64(1.0, 0.0)]);
        assert_eq!(
            d.adjoint(),
            GateMatrix2::diagonal([cis(-xi), c64(1.0, 0.0)])
        );
    }

    #[test]
    fn kronecker_layout() {
        assert_eq!(
            tensor2x2(&GateMatrix2::identity(), &GateMatrix2::identity()),
            GateMatrix4::identity()
        );
        // X ⊗ I swaps the two 2×2 diagonal blocks.
        let one = c64(1.0, 0.0);
        let zero = c64(0.0, 0.0);
        let expected = Mat::from_rows([
            [zero, zero, one, zero],
            [zero, zero, zero, one],
            [one, zero, zero, zero],
            [zero, one, zero, zero],
        ]);
        assert_eq!(tensor2x2(&x(), &GateMatrix2::identity()), expected);
    }

    #[test]
    fn kronecker_entry_matches_block_formula() {
        let (u1, u2) = (c64(0.6, 0.1), c64(0.2, -0.3));
        let (v1, v2) = (c64(-0.4, 0.5), c64(0.1, 0.7));
        let a = Mat::from_rows([[u1, u2], [-u2.conj(), u1.conj()]]);
        let b = Mat::from_rows([[v1, v2], [-v2.conj(), v1.conj()]]);
        let t = tensor2x2(&a, &b);
        assert_eq!(t[(1, 0)], -(u1 * v2.conj()));
        assert_eq!(t[(3, 0)], u2.conj() * v2.conj());
        assert_eq!(t[(2, 3)], u1.conj() * v2);
    }

    #[test]
    fn unitarity_residual_examples() {
        assert_eq!(GateMatrix4::identity().unitarity_residual(), 0.0);
        let m = GateMatrix2::diagonal([c64(1.0, 0.0), c64(2.0, 0.0)]);
        assert_eq!(m.unitarity_residual(), 3.0);
    }

    #[test]
    fn wrap_angle_lands_in_principal_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn swap_qubits_exchanges_factors() {
        let t = tensor2x2(&x(), &h());
        assert!(t.swap_qubits().max_abs_diff(&tensor2x2(&h(), &x())) < 1e-15);
    }

    #[test]
    fn phase_insensitive_distance_ignores_global_phase() {
        let a = h().scale(cis(1.234));
        assert!(a.distance_up_to_phase(&h()) < 1e-15);
        assert!(x().distance_up_to_phase(&h()) > 0.5);
    }

    #[test]
    fn tolerance_rejects_non_positive() {
        assert!(Tolerance::new(1e-9, 0.0, 1e-12).is_err());
        assert!(Tolerance::new(1e-9, 1e-9, f64::NAN).is_err());
        assert!(Tolerance::new(1e-3, 1e-9, 1e-2).is_ok());
    }

    #[test]
    fn json_shape() {
        let doc = serde_json::to_value(GateMatrix2::identity()).unwrap();
        assert_eq!(doc["dim"], 2);
        assert_eq!(doc["entries"].as_array().unwrap().len(), 4);
        let back: GateMatrix2 = serde_json::from_value(doc).unwrap();
        assert_eq!(back, GateMatrix2::identity());
        let bad = serde_json::json!({"dim": 4, "entries": [[1.0, 0.0]]});
        assert!(serde_json::from_value::<GateMatrix4>(bad).is_err());
    }
}
