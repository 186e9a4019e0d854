//! Symmetric positive definite matrices for geometric anisotropy.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A symmetric positive definite `d × d` matrix with its eigen-decomposition.
///
/// Eigenvalues are stored in descending order with matching eigenvector
/// columns. Instances are immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyMatrix {
    entries: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    det: f64,
}

impl AnisotropyMatrix {
    /// Builds from a row-major `d × d` array.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::InvalidParameter("anisotropy matrix must be nonempty".into()));
        }
        for r in rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: r.len() });
            }
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let d = m.nrows();
        if d == 0 || m.ncols() != d {
            return Err(Error::InvalidParameter(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        for i in 0..d {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::InvalidParameter(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let sym = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym.clone());
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = DVector::from_fn(d, |i, _| eig.eigenvalues[order[i]]);
        let eigenvectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        if !(eigenvalues[d - 1] > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "matrix is not positive definite (smallest eigenvalue {})",
                eigenvalues[d - 1]
            )));
        }
        let det = eigenvalues.iter().product();
        Ok(Self { entries: sym, eigenvalues, eigenvectors, det })
    }

    pub fn identity(d: usize) -> Self {
        Self::scaled_identity(d, 1.0).expect("identity is SPD")
    }

    pub fn scaled_identity(d: usize, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!("scale {a} must be > 0")));
        }
        Self::new(DMatrix::identity(d, d) * a)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// `P diag(scales) Pᵀ` with `P` a rotation: one angle in 2D, three
    /// (z-y-x Euler) angles in 3D.
    pub fn from_rotation_scaling(angles: &[f64], scales: &[f64]) -> Result<Self> {
        let d = scales.len();
        if let Some(s) = scales.iter().find(|s| !(**s > 0.0)) {
            return Err(Error::InvalidParameter(format!("scale {s} must be > 0")));
        }
        let p = match (d, angles.len()) {
            (2, 1) => {
                let (s, c) = angles[0].sin_cos();
                DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
            }
            (3, 3) => {
                let rz = |t: f64| {
                    let (s, c) = t.sin_cos();
                    DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
                };
                let ry = |t: f64| {
                    let (s, c) = t.sin_cos();
                    DMatrix::from_row_slice(3, 3, &[c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c])
                };
                let rx = |t: f64| {
                    let (s, c) = t.sin_cos();
                    DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c])
                };
                rz(angles[0]) * ry(angles[1]) * rx(angles[2])
            }
            (2, n) | (3, n) => {
                return Err(Error::InvalidParameter(format!(
                    "{d}D rotation needs {} angle(s), got {n}",
                    if d == 2 { 1 } else { 3 }
                )))
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "rotation parameterization supports d in {{2, 3}}, got {d}"
                )))
            }
        };
        let diag = DMatrix::from_diagonal(&DVector::from_column_slice(scales));
        let m = &p * diag * p.transpose();
        Self::new((&m + m.transpose()) * 0.5)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Row-major entries.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.entries[(i, j)]).collect())
            .collect()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Scalar `a` when the matrix is `a·I` (relative tolerance 1e-14).
    pub fn as_scaled_identity(&self) -> Option<f64> {
        let a = self.lambda_max();
        let d = self.dim();
        let off = (0..d).all(|i| (0..d).all(|j| i == j || self.entries[(i, j)].abs() <= 1e-14 * a));
        let diag = (0..d).all(|i| (self.entries[(i, i)] - a).abs() <= 1e-14 * a);
        (off && diag).then_some(a)
    }

    /// `hᵀ A h` without the square root.
    pub fn quad_form(&self, h: &[f64]) -> Result<f64> {
        let d = self.dim();
        if h.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: h.len() });
        }
        let mut q = 0.0;
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += self.entries[(i, j)] * h[j];
            }
            q += h[i] * row;
        }
        Ok(q.max(0.0))
    }

    /// `√(hᵀ A h)`.
    pub fn quad_form_sqrt(&self, h: &[f64]) -> Result<f64> {
        Ok(self.quad_form(h)?.sqrt())
    }

    pub fn inverse(&self) -> Self {
        let inv_vals = self.eigenvalues.map(|v| 1.0 / v);
        let m = &self.eigenvectors * DMatrix::from_diagonal(&inv_vals) * self.eigenvectors.transpose();
        Self::new((&m + m.transpose()) * 0.5).expect("inverse of SPD is SPD")
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("scale {c} must be > 0")));
        }
        Self::new(&self.entries * c)
    }

    /// Loewner order `self ⪰ other`: `λ_min(self - other) >= -1e-10·λ_max(self)`.
    pub fn loewner_geq(&self, other: &Self) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let diff = &self.entries - &other.entries;
        let eig = SymmetricEigen::new(diff);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        min >= -1e-10 * self.lambda_max()
    }
}

impl Serialize for AnisotropyMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AnisotropyMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Self::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn scenario_a2() -> AnisotropyMatrix {
        AnisotropyMatrix::from_rotation_scaling(&[FRAC_PI_4], &[0.2, 0.8]).unwrap()
    }

    #[test]
    fn rotation_examples() {
        let a = scenario_a2();
        let expect = [[0.5, -0.3], [-0.3, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a.matrix()[(i, j)] - expect[i][j]).abs() < 1e-15);
            }
        }
        let id = AnisotropyMatrix::from_rotation_scaling(&[0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(id.as_scaled_identity(), Some(1.0));
        let sw = AnisotropyMatrix::from_rotation_scaling(&[std::f64::consts::FRAC_PI_2], &[2.0, 5.0]).unwrap();
        assert!((sw.matrix()[(0, 0)] - 5.0).abs() < 1e-14 && (sw.matrix()[(1, 1)] - 2.0).abs() < 1e-14);
        assert!(AnisotropyMatrix::from_rotation_scaling(&[0.0], &[1.0, 0.0]).is_err());
        assert!(AnisotropyMatrix::from_rotation_scaling(&[0.0, 0.1], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn quadratic_forms() {
        let h = [0.3, -1.7, 2.0];
        let n = AnisotropyMatrix::identity(3).quad_form_sqrt(&h).unwrap();
        assert!((n - (0.09f64 + 2.89 + 4.0).sqrt()).abs() < 1e-15);
        let d = AnisotropyMatrix::diagonal(&[4.0, 1.0]).unwrap();
        assert_eq!(d.quad_form_sqrt(&[1.0, 0.0]).unwrap(), 2.0);
        // (1,1)·[[0.5,-0.3],[-0.3,0.5]]·(1,1)ᵀ = 0.4
        let v = scenario_a2().quad_form_sqrt(&[1.0, 1.0]).unwrap();
        assert!((v - 0.4f64.sqrt()).abs() < 1e-15);
        assert!(matches!(d.quad_form(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn loewner_examples() {
        let i2 = AnisotropyMatrix::identity(2);
        let two = AnisotropyMatrix::scaled_identity(2, 2.0).unwrap();
        assert!(two.loewner_geq(&i2));
        assert!(!i2.loewner_geq(&two));
        assert!(i2.loewner_geq(&scenario_a2()));
        assert!(i2.loewner_geq(&i2));
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        assert!(AnisotropyMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(AnisotropyMatrix::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).is_err());
        assert!(AnisotropyMatrix::from_rows(&[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn inverse_and_det() {
        let a = AnisotropyMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        assert!((a.det() - 1.75).abs() < 1e-14);
        let prod = a.matrix() * a.inverse().matrix();
        assert!((prod - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn serde_is_row_major() {
        let a = AnisotropyMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[2.0,0.5],[0.5,1.0]]");
        let b: AnisotropyMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<AnisotropyMatrix>("[[1,3],[3,1]]").is_err());
    }
}
