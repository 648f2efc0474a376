//! Dense 4x4 helpers over any ring, plus nalgebra bridges for plain values.

use nalgebra::{Matrix4, SymmetricEigen};

use crate::jet::{Jet2, NumError, Real};

pub type M4<T> = [[T; 4]; 4];
pub type V4<T> = [T; 4];
pub type Mat4 = Matrix4<f64>;

/// Determinant threshold below which a matrix counts as singular.
pub const SINGULAR_DET: f64 = 1e-10;

pub fn identity<T: Real>() -> M4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| T::cst(if i == j { 1.0 } else { 0.0 })))
}

pub fn zeros<T: Real>() -> M4<T> {
    [[T::zero(); 4]; 4]
}

pub fn diag<T: Real>(d: [f64; 4]) -> M4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| T::cst(if i == j { d[i] } else { 0.0 })))
}

pub fn matmul<T: Real>(a: &M4<T>, b: &M4<T>) -> M4<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = a[i][0] * b[0][j];
            for k in 1..4 {
                s += a[i][k] * b[k][j];
            }
            s
        })
    })
}

pub fn matvec<T: Real>(a: &M4<T>, v: &V4<T>) -> V4<T> {
    std::array::from_fn(|i| {
        let mut s = a[i][0] * v[0];
        for k in 1..4 {
            s += a[i][k] * v[k];
        }
        s
    })
}

pub fn transpose<T: Real>(a: &M4<T>) -> M4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn scale<T: Real>(a: &M4<T>, s: f64) -> M4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] * s))
}

pub fn add<T: Real>(a: &M4<T>, b: &M4<T>) -> M4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

pub fn sub<T: Real>(a: &M4<T>, b: &M4<T>) -> M4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

/// Gauss-Jordan inverse with partial pivoting on the order-0 parts.
pub fn inverse<T: Real>(m: &M4<T>) -> Result<M4<T>, NumError> {
    let det = det_value(&values(m));
    if det.abs() <= SINGULAR_DET {
        return Err(NumError::SingularMatrix(det.abs()));
    }
    let mut a = *m;
    let mut inv = identity::<T>();
    for col in 0..4 {
        let piv = (col..4).max_by(|&r, &s| a[r][col].val().abs().total_cmp(&a[s][col].val().abs())).unwrap_or(col);
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].recip();
        for j in 0..4 {
            a[col][j] = a[col][j] * p;
            inv[col][j] = inv[col][j] * p;
        }
        for r in 0..4 {
            if r == col {
                continue;
            }
            let f = a[r][col];
            for j in 0..4 {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    Ok(inv)
}

pub fn det<T: Real>(m: &M4<T>) -> T {
    // cofactor expansion along the first row
    let minor = |r: usize, c: usize| -> T {
        let rows: Vec<usize> = (0..4).filter(|&k| k != r).collect();
        let cols: Vec<usize> = (0..4).filter(|&k| k != c).collect();
        let e = |i: usize, j: usize| m[rows[i]][cols[j]];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    };
    let mut s = m[0][0] * minor(0, 0);
    s -= m[0][1] * minor(0, 1);
    s += m[0][2] * minor(0, 2);
    s -= m[0][3] * minor(0, 3);
    s
}

pub fn values<T: Real>(m: &M4<T>) -> M4<f64> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].val()))
}

pub fn det_value(m: &M4<f64>) -> f64 {
    to_na(m).determinant()
}

/// `∂_k m` of a jet matrix.
pub fn grad_slice(m: &M4<Jet2>, k: usize) -> M4<f64> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].grad[k]))
}

pub fn to_na(m: &M4<f64>) -> Mat4 {
    Matrix4::from_fn(|i, j| m[i][j])
}

pub fn from_na(m: &Mat4) -> M4<f64> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Inverse of a plain matrix; singular when `|det| <= 1e-10`.
pub fn mat4_inverse(m: &Mat4) -> Result<Mat4, NumError> {
    let d = m.determinant();
    if d.abs() <= SINGULAR_DET {
        return Err(NumError::SingularMatrix(d.abs()));
    }
    m.try_inverse().ok_or(NumError::SingularMatrix(d.abs()))
}

/// Count of (positive, negative) eigenvalues of a symmetric matrix.
pub fn inertia(m: &M4<f64>, tol: f64) -> (usize, usize) {
    let a = to_na(m);
    let sym = (a + a.transpose()) * 0.5;
    let e = SymmetricEigen::new(sym);
    let pos = e.eigenvalues.iter().filter(|&&v| v > tol).count();
    let neg = e.eigenvalues.iter().filter(|&&v| v < -tol).count();
    (pos, neg)
}

pub fn max_abs(m: &M4<f64>) -> f64 {
    m.iter().flatten().fold(0.0_f64, |a, &b| a.max(b.abs()))
}

pub fn max_abs_diff(a: &M4<f64>, b: &M4<f64>) -> f64 {
    let mut out = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            out = out.max((a[i][j] - b[i][j]).abs());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_inverse_matches_nalgebra() {
        let m = [[2.0, 0.3, -1.0, 0.1], [0.0, 1.5, 0.2, 0.7], [0.4, -0.3, 3.0, 0.0], [1.0, 0.0, 0.2, -2.0]];
        let a = inverse(&m).unwrap();
        let b = from_na(&mat4_inverse(&to_na(&m)).unwrap());
        assert!(max_abs_diff(&a, &b) < 1e-14);
        assert!((det(&m) - det_value(&m)).abs() < 1e-13);
    }

    #[test]
    fn singular_is_rejected() {
        let mut m = identity::<f64>();
        m[3][3] = 0.0;
        assert!(matches!(inverse(&m), Err(NumError::SingularMatrix(_))));
        assert!(mat4_inverse(&to_na(&m)).is_err());
    }

    #[test]
    fn inertia_counts() {
        assert_eq!(inertia(&diag([1.0, 1.0, -1.0, -1.0]), 1e-12), (2, 2));
        assert_eq!(inertia(&diag([-1.0, -2.0, -3.0, -4.0]), 1e-12), (0, 4));
    }
}
