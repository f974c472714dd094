//! Fixed-size dense linear algebra on row-major `[[f64; D]; D]` matrices.
//!
//! Only what the lattice code needs: determinants, inverses and products in
//! dimension 2 and 3.

pub type Matrix<const D: usize> = [[f64; D]; D];
pub type Mat2 = Matrix<2>;
pub type Mat3 = Matrix<3>;

pub fn identity<const D: usize>() -> Matrix<D> {
    let mut m = [[0.0; D]; D];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn det<const D: usize>(m: &Matrix<D>) -> f64 {
    match D {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => lu_det(m),
    }
}

fn lu_det<const D: usize>(m: &Matrix<D>) -> f64 {
    let mut a = *m;
    let mut sign = 1.0;
    for col in 0..D {
        let pivot = (col..D)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            sign = -sign;
        }
        for row in col + 1..D {
            let f = a[row][col] / a[col][col];
            for k in col..D {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    (0..D).fold(sign, |acc, i| acc * a[i][i])
}

/// Gauss-Jordan inverse with partial pivoting. `None` if singular.
pub fn inverse<const D: usize>(m: &Matrix<D>) -> Option<Matrix<D>> {
    let mut a = *m;
    let mut inv = identity::<D>();
    for col in 0..D {
        let pivot = (col..D).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p = a[col][col];
        for k in 0..D {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for row in 0..D {
            if row != col {
                let f = a[row][col];
                if f != 0.0 {
                    for k in 0..D {
                        a[row][k] -= f * a[col][k];
                        inv[row][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    Some(inv)
}

pub fn mat_vec<const D: usize>(m: &Matrix<D>, v: &[f64; D]) -> [f64; D] {
    let mut out = [0.0; D];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn mat_mul<const D: usize>(a: &Matrix<D>, b: &Matrix<D>) -> Matrix<D> {
    let mut out = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            out[i][j] = (0..D).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose<const D: usize>(m: &Matrix<D>) -> Matrix<D> {
    let mut out = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            out[j][i] = m[i][j];
        }
    }
    out
}

pub fn column<const D: usize>(m: &Matrix<D>, j: usize) -> [f64; D] {
    std::array::from_fn(|i| m[i][j])
}

pub fn from_columns<const D: usize>(cols: &[[f64; D]; D]) -> Matrix<D> {
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i]))
}

pub fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2<const D: usize>(a: &[f64; D]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale<const D: usize>(m: &Matrix<D>, s: f64) -> Matrix<D> {
    m.map(|row| row.map(|x| x * s))
}

/// Largest absolute entry difference.
pub fn max_abs_diff<const D: usize>(a: &Matrix<D>, b: &Matrix<D>) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Numerical rank of a set of vectors, by Gram-Schmidt with a relative cutoff.
pub fn rank<const D: usize>(vectors: &[[f64; D]], rel_tol: f64) -> usize {
    let mut basis: Vec<[f64; D]> = Vec::new();
    for v in vectors {
        let scale = norm2(v);
        if scale == 0.0 {
            continue;
        }
        let mut w = *v;
        for b in &basis {
            let c = dot(&w, b);
            for k in 0..D {
                w[k] -= c * b[k];
            }
        }
        let n = norm2(&w);
        if n > rel_tol * scale {
            basis.push(w.map(|x| x / n));
            if basis.len() == D {
                break;
            }
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = [[2.0, 1.0, 0.5], [0.0, 3.0, -1.0], [1.0, 0.0, 1.0]];
        let inv = inverse(&m).unwrap();
        let id = mat_mul(&m, &inv);
        assert!(max_abs_diff(&id, &identity()) < 1e-14);
        assert!((det(&m) * det(&inv) - 1.0).abs() < 1e-14);
        assert!((det(&m) - lu_det(&m)).abs() < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        assert!(inverse(&[[1.0, 2.0], [2.0, 4.0]]).is_none());
    }

    #[test]
    fn rank_detects_dependence() {
        let v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert_eq!(rank(&v, 1e-9), 2);
        assert_eq!(rank(&[[0.0, 0.0, 1.0]], 1e-9), 1);
    }
}
