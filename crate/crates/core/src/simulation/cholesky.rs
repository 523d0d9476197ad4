use crate::error::{Error, Result};

/// Lower-triangular `L` with `L L' = m`.
///
/// Fails with a numerical error naming the first non-positive pivot when `m`
/// is not positive definite.
pub fn cholesky_factor(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = m.len();
    if d == 0 {
        return Err(Error::Domain("covariance matrix is empty".into()));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != d {
            return Err(Error::Domain(format!(
                "covariance row {i} has {} entries, expected {d}",
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Domain(format!("covariance entry ({i}, {j}) is not finite")));
            }
            if (v - m[j][i]).abs() > 1e-12 * (1.0 + v.abs()) {
                return Err(Error::Domain(format!(
                    "covariance is not symmetric at ({i}, {j}): {v} vs {}",
                    m[j][i]
                )));
            }
        }
    }
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|p| l[i][p] * l[j][p]).sum();
            if i == j {
                let pivot = m[i][i] - dot;
                if !(pivot > 0.0) {
                    return Err(Error::Numerical(format!(
                        "covariance is not positive definite: pivot {} is {pivot}",
                        i + 1
                    )));
                }
                l[i][i] = pivot.sqrt();
            } else {
                l[i][j] = (m[i][j] - dot) / l[j][j];
            }
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(cholesky_factor(&m).unwrap(), m);
    }

    #[test]
    fn two_by_two() {
        let l = cholesky_factor(&[vec![1.0, 0.8], vec![0.8, 1.0]]).unwrap();
        assert_abs_diff_eq!(l[1][0], 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(l[1][1], 0.6, epsilon = 1e-15);
        assert_eq!(l[0][1], 0.0);
    }

    #[test]
    fn names_failing_pivot() {
        let m = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![0.0, 1.0, 1.0],
        ];
        match cholesky_factor(&m) {
            Err(Error::Numerical(msg)) => assert!(msg.contains("pivot 3"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(cholesky_factor(&[]).is_err());
        assert!(cholesky_factor(&[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(cholesky_factor(&[vec![1.0, 0.5]]).is_err());
    }
}
