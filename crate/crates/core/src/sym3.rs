//! Real symmetric 3×3 eigenproblem via cyclic Jacobi rotations, plus the
//! few 3-vector helpers the covariance analysis needs.
//!
//! The covariance matrix of the Stokes vector is tiny but must be
//! diagonalized robustly even with degenerate spectra, so a foolproof Jacobi
//! sweep is used instead of closed-form roots.

use crate::scalar::{real, Real};

pub type Vec3<T> = [T; 3];
pub type Mat3<T> = [[T; 3]; 3];

pub fn dot<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm<T: Real>(a: &Vec3<T>) -> T {
    dot(a, a).sqrt()
}

pub fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn mat_vec<T: Real>(m: &Mat3<T>, v: &Vec3<T>) -> Vec3<T> {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

/// Quadratic form vᵗ M v.
pub fn quadratic_form<T: Real>(m: &Mat3<T>, v: &Vec3<T>) -> T {
    dot(v, &mat_vec(m, v))
}

pub fn det3<T: Real>(m: &Mat3<T>) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn transpose3<T: Real>(m: &Mat3<T>) -> Mat3<T> {
    let mut t = *m;
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

pub fn max_abs_asymmetry<T: Real>(m: &Mat3<T>) -> T {
    let mut worst = T::zero();
    for i in 0..3 {
        for j in (i + 1)..3 {
            worst = worst.max((m[i][j] - m[j][i]).abs());
        }
    }
    worst
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors (as rows of
/// the returned rotation matrix) of a real symmetric 3×3 matrix.
///
/// Cyclic Jacobi; converges to machine precision in a handful of sweeps and
/// is insensitive to degenerate eigenvalues.
pub fn eigen_sym3<T: Real>(m: &Mat3<T>) -> (Vec3<T>, Mat3<T>) {
    let mut a = *m;
    // v columns accumulate the rotations
    let mut v: Mat3<T> = [
        [T::one(), T::zero(), T::zero()],
        [T::zero(), T::one(), T::zero()],
        [T::zero(), T::zero(), T::one()],
    ];
    let scale = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .fold(T::zero(), |acc, (i, j)| acc.max(a[i][j].abs()))
        .max(T::one());
    let tol = T::epsilon() * scale;

    for _sweep in 0..64 {
        let off = a[0][1].abs().max(a[0][2].abs()).max(a[1][2].abs());
        if off <= tol {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq.abs() <= tol * real::<T>(1e-3) {
                continue;
            }
            let theta2 = (apq + apq).atan2(a[p][p] - a[q][q]);
            let theta = theta2 * real::<T>(0.5);
            let c = theta.cos();
            let s = theta.sin();
            // A ← Rᵗ A R applied to rows/columns p,q
            for i in 0..3 {
                let aip = a[i][p];
                let aiq = a[i][q];
                a[i][p] = c * aip + s * aiq;
                a[i][q] = c * aiq - s * aip;
            }
            for j in 0..3 {
                let apj = a[p][j];
                let aqj = a[q][j];
                a[p][j] = c * apj + s * aqj;
                a[q][j] = c * aqj - s * apj;
            }
            for i in 0..3 {
                let vip = v[i][p];
                let viq = v[i][q];
                v[i][p] = c * vip + s * viq;
                v[i][q] = c * viq - s * vip;
            }
        }
    }

    let vals = [a[0][0], a[1][1], a[2][2]];
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());

    let eigenvalues = [vals[order[0]], vals[order[1]], vals[order[2]]];
    // rows of the rotation matrix are the eigenvectors
    let mut rotation: Mat3<T> = [[T::zero(); 3]; 3];
    for (row, &col) in order.iter().enumerate() {
        for i in 0..3 {
            rotation[row][i] = v[i][col];
        }
    }
    // enforce a proper rotation, det = +1
    if det3(&rotation) < T::zero() {
        for x in rotation[2].iter_mut() {
            *x = -*x;
        }
    }
    (eigenvalues, rotation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let m = [[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]];
        let (vals, rot) = eigen_sym3(&m);
        approx(vals[0], 1.0, 1e-14);
        approx(vals[1], 2.0, 1e-14);
        approx(vals[2], 3.0, 1e-14);
        // smallest eigenvalue direction is the y axis
        approx(rot[0][1].abs(), 1.0, 1e-14);
        approx(det3(&rot), 1.0, 1e-12);
    }

    #[test]
    fn construct_then_recover_random_rotation() {
        // rotation from three Euler-ish angles
        let (a, b, g) = (0.4_f64, 1.1, -0.7);
        let rz = |t: f64| [[t.cos(), -t.sin(), 0.0], [t.sin(), t.cos(), 0.0], [0.0, 0.0, 1.0]];
        let ry = |t: f64| [[t.cos(), 0.0, t.sin()], [0.0, 1.0, 0.0], [-t.sin(), 0.0, t.cos()]];
        let mul = |x: Mat3<f64>, y: Mat3<f64>| {
            let mut out = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        out[i][j] += x[i][k] * y[k][j];
                    }
                }
            }
            out
        };
        let q = mul(mul(rz(a), ry(b)), rz(g));
        let d = [[0.5, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let m = mul(mul(q, d), transpose3(&q));
        let (vals, rot) = eigen_sym3(&m);
        approx(vals[0], 0.5, 1e-12);
        approx(vals[1], 2.0, 1e-12);
        approx(vals[2], 5.0, 1e-12);
        // recovered axes match the columns of q up to sign
        for k in 0..3 {
            let axis = [q[0][k], q[1][k], q[2][k]];
            let overlap = dot(&rot[k], &axis).abs();
            approx(overlap, 1.0, 1e-10);
        }
        // R M Rᵗ diagonal
        let rmrt = mul(mul(rot, m), transpose3(&rot));
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(rmrt[i][j].abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn degenerate_spectrum_is_stable() {
        let m = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let (vals, rot) = eigen_sym3(&m);
        for v in vals {
            approx(v, 1.0, 1e-14);
        }
        approx(det3(&rot), 1.0, 1e-12);
    }
}
