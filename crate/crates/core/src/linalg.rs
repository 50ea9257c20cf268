//! Exact Gaussian elimination over the Gaussian rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::GaussianRational;

pub type Vector = Vec<GaussianRational>;

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
pub fn rref(rows: &[Vector], cols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut m: Vec<Vector> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = GaussianRational::one() / m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..cols {
                    let delta = factor.clone() * m[row][c].clone();
                    m[r][c] = m[r][c].clone() - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    m.truncate(row);
    (m, pivots)
}

/// Basis of `{u : r . u = 0 for every row r}`, each vector normalized by
/// [`normalize`].
pub fn kernel(rows: &[Vector], cols: usize) -> Vec<Vector> {
    let (m, pivots) = rref(rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut u = vec![GaussianRational::zero(); cols];
            u[f] = GaussianRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                u[p] = -m[r][f].clone();
            }
            normalize(u)
        })
        .collect()
}

/// Scales a vector with real rational entries to a primitive integer vector
/// with positive leading entry; other vectors are scaled so that their
/// leading entry is one.
pub fn normalize(u: Vector) -> Vector {
    let Some(lead) = u.iter().find(|x| !x.is_zero()).cloned() else {
        return u;
    };
    if u.iter().all(|x| x.im.is_zero()) {
        let lcm = u.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.re.denom()));
        let ints: Vec<BigInt> = u.iter().map(|x| (x.re.clone() * num_rational::BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = if lead.re.is_negative() { -BigInt::one() } else { BigInt::one() };
        return ints
            .into_iter()
            .map(|x| {
                GaussianRational::new(
                    num_rational::BigRational::from_integer(x / gcd.clone() * sign.clone()),
                    Zero::zero(),
                )
            })
            .collect();
    }
    let inv = GaussianRational::one() / lead;
    u.into_iter().map(|x| x * inv.clone()).collect()
}

/// Whether two families span the same subspace.
pub fn same_span(a: &[Vector], b: &[Vector], cols: usize) -> bool {
    rref(a, cols).0 == rref(b, cols).0
}

/// Whether `u` lies in the span of `basis`.
pub fn in_span(u: &Vector, basis: &[Vector], cols: usize) -> bool {
    let mut extended = basis.to_vec();
    extended.push(u.clone());
    rref(&extended, cols).0.len() == rref(basis, cols).0.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gaussian;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| gaussian(x, 0)).collect()
    }

    #[test]
    fn kernel_of_single_row() {
        // 3 u1 - 2 u2 = 0  ->  span{(2, 3)}
        assert_eq!(kernel(&[v(&[3, -2])], 2), vec![v(&[2, 3])]);
    }

    #[test]
    fn kernel_of_empty_system_is_everything() {
        assert_eq!(kernel(&[], 2), vec![v(&[1, 0]), v(&[0, 1])]);
    }

    #[test]
    fn kernel_with_imaginary_rows() {
        let row = vec![gaussian(0, 1), gaussian(0, -1)];
        assert_eq!(kernel(&[row], 2), vec![v(&[1, 1])]);
    }

    #[test]
    fn span_comparison() {
        assert!(same_span(&[v(&[1, 2])], &[v(&[-2, -4])], 2));
        assert!(!same_span(&[v(&[1, 2])], &[v(&[1, 0])], 2));
        assert!(in_span(&v(&[3, 6]), &[v(&[1, 2])], 2));
    }
}
