//! Exact Gaussian elimination over Q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigRational>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![vec![BigRational::zero(); cols]; rows],
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &v) in r.iter().enumerate() {
                m.data[i][j] = BigRational::from_integer(BigInt::from(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i]
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Reduced row echelon form with pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.matrix.cols)
            .filter(|c| !self.pivots.contains(c))
            .collect()
    }
}

/// Pivots on the first nonzero entry of each column, left to right.
pub fn rref(m: &Matrix) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.data[i][c].is_zero()) else {
            continue;
        };
        a.data.swap(r, p);
        let inv = a.data[r][c].recip();
        for x in a.data[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = a.data[r].clone();
        for i in 0..a.rows {
            if i != r && !a.data[i][c].is_zero() {
                let f = a.data[i][c].clone();
                for (x, y) in a.data[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

/// Basis of the kernel, one vector per free column with that entry set to 1.
pub fn nullspace(m: &Matrix) -> Vec<Vec<BigRational>> {
    let e = rref(m);
    e.free_columns()
        .into_iter()
        .map(|f| {
            let mut v = vec![BigRational::zero(); m.cols];
            v[f] = BigRational::one();
            for (row, &pc) in e.pivots.iter().enumerate() {
                v[pc] = -e.matrix.data[row][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_of_singular_matrix() {
        let m = Matrix::from_i64_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        let e = rref(&m);
        assert_eq!(e.rank(), 2);
        assert_eq!(e.pivots, vec![0, 1]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn empty_and_zero_matrices() {
        assert_eq!(rref(&Matrix::zeros(3, 4)).rank(), 0);
        assert_eq!(nullspace(&Matrix::zeros(2, 3)).len(), 3);
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in proptest::collection::vec(proptest::collection::vec(-3i64..3, 5), 1..6)) {
            let m = Matrix::from_i64_rows(&rows);
            let e = rref(&m);
            let ns = nullspace(&m);
            prop_assert_eq!(e.rank() + ns.len(), m.cols());
            for v in &ns {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
        }
    }
}
