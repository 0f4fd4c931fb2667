//! Small dense linear algebra for 2x2 and 3x3 real matrices.
//!
//! Everything in the crate runs through this module: matrix products for
//! groupoid composition, the closed-form symmetric eigensolver behind the
//! orthogonal-normalizer analysis, and the SVD used to decide double-coset
//! membership.

use thiserror::Error;

/// Absolute/relative tolerance used for payload equality throughout the crate.
pub const PAYLOAD_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular (|det| <= {0:e})")]
    Singular(f64),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

/// Row-major n x n matrix, n in {2, 3}. Entries beyond n x n are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    a: [f64; 9],
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n == 2 || n == 3, "only 2x2 and 3x3 matrices are supported");
        Matrix { n, a: [0.0; 9] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from row-major entries; `entries.len()` must be `n*n`.
    pub fn from_rows(n: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), n * n);
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, entries[i * n + j]);
            }
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n);
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        self.a[i * 3 + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.a[i * 3 + j] = v;
    }

    pub fn row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.push(self.at(i, j));
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.row_major().iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.at(j, i));
            }
        }
        m
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        let mut m = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s = 0.0;
                for k in 0..self.n {
                    s += self.at(i, k) * other.at(k, j);
                }
                m.set(i, j, s);
            }
        }
        m
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.at(i, j) + other.at(i, j));
            }
        }
        m
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.at(i, j) - other.at(i, j));
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.at(i, j) * s);
            }
        }
        m
    }

    pub fn det(&self) -> f64 {
        match self.n {
            2 => self.at(0, 0) * self.at(1, 1) - self.at(0, 1) * self.at(1, 0),
            3 => {
                self.at(0, 0) * (self.at(1, 1) * self.at(2, 2) - self.at(1, 2) * self.at(2, 1))
                    - self.at(0, 1)
                        * (self.at(1, 0) * self.at(2, 2) - self.at(1, 2) * self.at(2, 0))
                    + self.at(0, 2)
                        * (self.at(1, 0) * self.at(2, 1) - self.at(1, 1) * self.at(2, 0))
            }
            _ => unreachable!(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.row_major().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Inverse via the adjugate; errors when |det| <= 1e-12.
    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        let d = self.det();
        if d.abs() <= 1e-12 {
            return Err(LinalgError::Singular(1e-12));
        }
        let mut m = Matrix::zeros(self.n);
        match self.n {
            2 => {
                m.set(0, 0, self.at(1, 1) / d);
                m.set(0, 1, -self.at(0, 1) / d);
                m.set(1, 0, -self.at(1, 0) / d);
                m.set(1, 1, self.at(0, 0) / d);
            }
            3 => {
                for i in 0..3 {
                    for j in 0..3 {
                        let (i1, i2) = match j {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let (j1, j2) = match i {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let minor = self.at(i1, j1) * self.at(i2, j2)
                            - self.at(i1, j2) * self.at(i2, j1);
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        m.set(i, j, sign * minor / d);
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(m)
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }

    /// Column j as a vector.
    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.at(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        for i in 0..self.n {
            self.set(i, j, v[i]);
        }
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &Matrix) -> f64 {
        self.sub(other).frobenius_norm()
    }

    /// Equality within absolute tolerance scaled by max(1, ||self||).
    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.n == other.n && self.distance(other) <= tol * self.frobenius_norm().max(1.0)
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.transpose()
            .mul(self)
            .approx_eq(&Matrix::identity(self.n), tol)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.sub(&self.transpose()).frobenius_norm() <= tol * self.frobenius_norm().max(1.0)
    }
}

// ---- vectors -------------------------------------------------------------

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

// ---- rotations -----------------------------------------------------------

pub fn rot2(theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_rows(2, &[c, -s, s, c])
}

/// Rotation about a (unit) axis by `theta`, 3x3.
pub fn rot3(axis: &[f64], theta: f64) -> Matrix {
    let u = normalize(axis);
    let (s, c) = theta.sin_cos();
    let t = 1.0 - c;
    let (x, y, z) = (u[0], u[1], u[2]);
    Matrix::from_rows(
        3,
        &[
            t * x * x + c,
            t * x * y - s * z,
            t * x * z + s * y,
            t * x * y + s * z,
            t * y * y + c,
            t * y * z - s * x,
            t * x * z - s * y,
            t * y * z + s * x,
            t * z * z + c,
        ],
    )
}

/// Rotation by pi about a (unit) axis.
pub fn pi_rotation(axis: &[f64]) -> Matrix {
    rot3(axis, std::f64::consts::PI)
}

/// Haar-ish random rotation: uniform angle in 2D, quaternion method in 3D.
pub fn random_rotation<R: rand::Rng>(rng: &mut R, n: usize) -> Matrix {
    match n {
        2 => rot2(rng.gen_range(0.0..std::f64::consts::TAU)),
        3 => {
            // uniform unit quaternion
            let q: [f64; 4] = {
                loop {
                    let v: [f64; 4] = [
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    ];
                    let nn = v.iter().map(|x| x * x).sum::<f64>();
                    if nn > 1e-12 && nn <= 1.0 {
                        let s = nn.sqrt();
                        break [v[0] / s, v[1] / s, v[2] / s, v[3] / s];
                    }
                }
            };
            let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
            Matrix::from_rows(
                3,
                &[
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            )
        }
        _ => panic!("unsupported dimension"),
    }
}

// ---- symmetric eigensolver -----------------------------------------------

/// Eigendecomposition of a symmetric positive definite 2x2 or 3x3 matrix.
///
/// Returns eigenvalues in ascending order and the matrix whose columns are
/// the corresponding orthonormal eigenvectors. The 3x3 path uses the
/// closed-form trigonometric solution for the characteristic cubic, extracts
/// eigenvectors by cross products (falling back to a 2x2 sub-problem on the
/// orthogonal complement for clustered eigenvalues), and finishes with a
/// Rayleigh-quotient refinement of the eigenvalues.
pub fn eig_sym(c: &Matrix) -> Result<(Vec<f64>, Matrix), LinalgError> {
    if !c.is_symmetric(PAYLOAD_TOL) {
        return Err(LinalgError::NotSymmetric);
    }
    let (vals, vecs) = match c.dim() {
        2 => eig_sym2(c),
        3 => eig_sym3(c),
        _ => unreachable!(),
    };
    if vals[0] <= 0.0 {
        return Err(LinalgError::NotPositiveDefinite);
    }
    Ok((vals, vecs))
}

fn eig_sym2(c: &Matrix) -> (Vec<f64>, Matrix) {
    let (a, b, d) = (c.at(0, 0), (c.at(0, 1) + c.at(1, 0)) / 2.0, c.at(1, 1));
    let m = (a + d) / 2.0;
    let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    let (lo, hi) = (m - r, m + r);
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (s, cth) = theta.sin_cos();
    // columns: eigenvector of hi is (cos, sin); of lo is (-sin, cos)
    let v = Matrix::from_rows(2, &[-s, cth, cth, s]);
    (vec![lo, hi], v)
}

fn eig_sym3(c: &Matrix) -> (Vec<f64>, Matrix) {
    let scale = c.frobenius_norm().max(1e-300);
    let p1 = c.at(0, 1).powi(2) + c.at(0, 2).powi(2) + c.at(1, 2).powi(2);
    if p1.sqrt() <= 1e-14 * scale {
        // already diagonal: sort the diagonal
        let mut idx = [0usize, 1, 2];
        let d = [c.at(0, 0), c.at(1, 1), c.at(2, 2)];
        idx.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
        let mut v = Matrix::zeros(3);
        for (col, &i) in idx.iter().enumerate() {
            v.set(i, col, 1.0);
        }
        return (idx.iter().map(|&i| d[i]).collect(), v);
    }
    let q = c.trace() / 3.0;
    let p2 = (c.at(0, 0) - q).powi(2)
        + (c.at(1, 1) - q).powi(2)
        + (c.at(2, 2) - q).powi(2)
        + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = c.sub(&Matrix::identity(3).scale(q)).scale(1.0 / p);
    let r = (b.det() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
    let l_hi = q + 2.0 * p * phi.cos();
    let l_lo = q + 2.0 * p * (phi + two_pi_3).cos();
    let l_mid = 3.0 * q - l_hi - l_lo;
    let mut vals = [l_lo, l_mid, l_hi];

    let gap_lo = vals[1] - vals[0];
    let gap_hi = vals[2] - vals[1];
    let spread = vals[2] - vals[0];
    let mut v = Matrix::identity(3);
    if spread > 1e-12 * scale {
        // compute the best-separated eigenvector first, then diagonalize the
        // restriction of c to its orthogonal complement
        let (isolated, _other_pair) = if gap_lo >= gap_hi {
            (0usize, (1usize, 2usize))
        } else {
            (2usize, (0usize, 1usize))
        };
        let v_iso = null_vector(&shift(c, vals[isolated]));
        let (u, w) = orthonormal_complement(&v_iso);
        // 2x2 restriction [uᵀCu uᵀCw; wᵀCu wᵀCw]
        let cu = c.matvec(&u);
        let cw = c.matvec(&w);
        let r2 = Matrix::from_rows(
            2,
            &[
                dot(&u, &cu),
                (dot(&u, &cw) + dot(&w, &cu)) / 2.0,
                (dot(&u, &cw) + dot(&w, &cu)) / 2.0,
                dot(&w, &cw),
            ],
        );
        let (sub_vals, sub_vecs) = eig_sym2(&r2);
        let mut cols: Vec<(f64, Vec<f64>)> = Vec::new();
        cols.push((vals[isolated], v_iso.clone()));
        for k in 0..2 {
            let e = sub_vecs.col(k);
            let vec3: Vec<f64> = (0..3).map(|i| e[0] * u[i] + e[1] * w[i]).collect();
            cols.push((sub_vals[k], vec3));
        }
        cols.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (k, (val, veck)) in cols.into_iter().enumerate() {
            vals[k] = val;
            v.set_col(k, &normalize(&veck));
        }
    }
    // Rayleigh-quotient refinement
    for k in 0..3 {
        let e = v.col(k);
        vals[k] = dot(&e, &c.matvec(&e)) / dot(&e, &e);
    }
    (vals.to_vec(), v)
}

fn shift(c: &Matrix, lambda: f64) -> Matrix {
    c.sub(&Matrix::identity(3).scale(lambda))
}

/// Approximate null vector of a (near-)rank-2 symmetric 3x3 matrix, via the
/// largest cross product of row pairs.
fn null_vector(m: &Matrix) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| m.at(i, j)).collect()).collect();
    let candidates = [
        cross3(&rows[0], &rows[1]),
        cross3(&rows[0], &rows[2]),
        cross3(&rows[1], &rows[2]),
    ];
    let best = candidates
        .iter()
        .max_by(|a, b| norm(&a[..]).partial_cmp(&norm(&b[..])).unwrap())
        .unwrap();
    normalize(&best[..])
}

fn orthonormal_complement(v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pick = if v[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let u = normalize(&cross3(v, &pick)[..]);
    let w = cross3(v, &u);
    (u, w.to_vec())
}

// ---- SVD and polar decomposition ------------------------------------------

/// SVD of an invertible matrix: m = U diag(s) Vᵀ with U, V orthogonal and
/// singular values ascending.
pub fn svd(m: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix), LinalgError> {
    let mtm = m.transpose().mul(m);
    let (vals, v) = eig_sym(&mtm)?;
    let s: Vec<f64> = vals.iter().map(|x| x.sqrt()).collect();
    let mut u = Matrix::zeros(m.dim());
    for k in 0..m.dim() {
        let col = m.matvec(&v.col(k));
        let scaled: Vec<f64> = col.iter().map(|x| x / s[k]).collect();
        u.set_col(k, &scaled);
    }
    Ok((u, s, v))
}

/// SVD with both factors forced into SO(n); requires det(m) > 0.
pub fn svd_proper(m: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix), LinalgError> {
    let (mut u, s, mut v) = svd(m)?;
    // flipping the same column of U and V preserves the product
    if v.det() < 0.0 {
        let flip = |mat: &mut Matrix| {
            let c: Vec<f64> = mat.col(0).iter().map(|x| -x).collect();
            mat.set_col(0, &c);
        };
        flip(&mut u);
        flip(&mut v);
    }
    if u.det() < 0.0 {
        return Err(LinalgError::NotPositiveDefinite);
    }
    Ok((u, s, v))
}

/// Singular values of `m`, ascending.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>, LinalgError> {
    Ok(svd(m)?.1)
}

/// Right polar stretch U = sqrt(mᵀm) of an invertible matrix.
pub fn polar_stretch(m: &Matrix) -> Result<Matrix, LinalgError> {
    let (vals, v) = eig_sym(&m.transpose().mul(m))?;
    let mut d = Matrix::zeros(m.dim());
    for i in 0..m.dim() {
        d.set(i, i, vals[i].sqrt());
    }
    Ok(v.mul(&d).mul(&v.transpose()))
}

// ---- small dense solver ----------------------------------------------------

/// Solve a dense k x k system in place via Gaussian elimination with partial
/// pivoting. `a` is row-major k*k, `b` has length k.
pub fn solve_dense(k: usize, a: &mut [f64], b: &mut [f64]) -> Result<Vec<f64>, LinalgError> {
    assert_eq!(a.len(), k * k);
    assert_eq!(b.len(), k);
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i * k + col].abs().partial_cmp(&a[j * k + col].abs()).unwrap())
            .unwrap();
        if a[pivot * k + col].abs() < 1e-300 {
            return Err(LinalgError::Singular(1e-300));
        }
        if pivot != col {
            for j in 0..k {
                a.swap(col * k + j, pivot * k + j);
            }
            b.swap(col, pivot);
        }
        for row in (col + 1)..k {
            let f = a[row * k + col] / a[col * k + col];
            for j in col..k {
                a[row * k + j] -= f * a[col * k + j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut s = b[row];
        for j in (row + 1)..k {
            s -= a[row * k + j] * x[j];
        }
        x[row] = s / a[row * k + row];
    }
    Ok(x)
}
