use std::fmt;

use super::{FieldElement, FieldSpec, GfError, OpCounter};

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[u32]> = self.data.chunks(self.cols.max(1)).collect();
        write!(f, "Matrix<{}>{:?}", self.spec, rows)
    }
}

impl Matrix {
    pub fn zeros(spec: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            spec,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(spec, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows; every value must lie in the field.
    pub fn from_rows(spec: FieldSpec, rows: &[Vec<u64>]) -> Result<Self, GfError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(GfError::Dimension("ragged rows".into()));
            }
            for &v in row {
                data.push(spec.elem(v)?.value());
            }
        }
        Ok(Matrix {
            spec,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.spec
            .elem(self.data[r * self.cols + c] as u64)
            .expect("stored values are reduced")
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) -> Result<(), GfError> {
        if v.spec() != self.spec {
            return Err(GfError::SpecMismatch(self.spec, v.spec()));
        }
        self.data[r * self.cols + c] = v.value();
        Ok(())
    }

    pub(crate) fn raw(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.data
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(|r| r.iter().map(|&v| v as u64).collect())
            .collect()
    }

    /// Standard product; charges `rows * inner * cols` multiplications.
    pub fn mul(&self, rhs: &Matrix, ctr: &OpCounter) -> Result<Matrix, GfError> {
        if self.spec != rhs.spec {
            return Err(GfError::SpecMismatch(self.spec, rhs.spec));
        }
        if self.cols != rhs.rows {
            return Err(GfError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.spec;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0;
                for k in 0..self.cols {
                    acc = f.raw_add(acc, f.raw_mul(self.raw(i, k), rhs.raw(k, j)));
                }
                out.data[i * rhs.cols + j] = acc;
            }
        }
        ctr.charge((self.rows * self.cols * rhs.cols) as u64);
        Ok(out)
    }

    /// Matrix-vector product; charges `rows * cols` multiplications.
    pub fn mul_vec(
        &self,
        v: &[FieldElement],
        ctr: &OpCounter,
    ) -> Result<Vec<FieldElement>, GfError> {
        let col = Matrix::column(self.spec, v)?;
        let out = self.mul(&col, ctr)?;
        Ok((0..out.rows).map(|r| out.get(r, 0)).collect())
    }

    pub fn column(spec: FieldSpec, v: &[FieldElement]) -> Result<Matrix, GfError> {
        let mut m = Matrix::zeros(spec, v.len(), 1);
        for (i, e) in v.iter().enumerate() {
            m.set(i, 0, *e)?;
        }
        Ok(m)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.spec, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.data[i * cols.len() + j] = self.raw(r, c);
            }
        }
        m
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix, GfError> {
        if !self.is_square() {
            return Err(GfError::Dimension(format!(
                "inverse of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let f = self.spec;
        let mut a = self.clone();
        let mut inv = Matrix::identity(f, n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a.raw(r, col) != 0)
                .ok_or(GfError::Singular)?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let s = f.raw_inv(a.raw(col, col))?;
            a.scale_row(col, s);
            inv.scale_row(col, s);
            for r in 0..n {
                if r != col && a.raw(r, col) != 0 {
                    let factor = f.raw_neg(a.raw(r, col));
                    a.add_scaled_row(r, col, factor);
                    inv.add_scaled_row(r, col, factor);
                }
            }
        }
        Ok(inv)
    }

    pub fn rank(&self) -> usize {
        let f = self.spec;
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| a.raw(r, col) != 0) else {
                continue;
            };
            a.swap_rows(pivot, rank);
            let s = f.raw_inv(a.raw(rank, col)).expect("pivot is nonzero");
            a.scale_row(rank, s);
            for r in 0..self.rows {
                if r != rank && a.raw(r, col) != 0 {
                    let factor = f.raw_neg(a.raw(r, col));
                    a.add_scaled_row(r, rank, factor);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: u32) {
        for c in 0..self.cols {
            let v = self.raw(r, c);
            self.data[r * self.cols + c] = self.spec.raw_mul(v, s);
        }
    }

    // row[dst] += factor * row[src]
    fn add_scaled_row(&mut self, dst: usize, src: usize, factor: u32) {
        for c in 0..self.cols {
            let v = self.spec.raw_mul(self.raw(src, c), factor);
            let d = self.raw(dst, c);
            self.data[dst * self.cols + c] = self.spec.raw_add(d, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f5() -> FieldSpec {
        FieldSpec::prime(5).unwrap()
    }

    #[test]
    fn small_prime_examples() {
        let f = f5();
        let a = Matrix::from_rows(f, &[vec![1, 1], vec![1, 2]]).unwrap();
        let ctr = OpCounter::new();
        let v = [f.elem(3).unwrap(), f.elem(4).unwrap()];
        let x = a.mul_vec(&v, &ctr).unwrap();
        assert_eq!(x, vec![f.elem(2).unwrap(), f.elem(1).unwrap()]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv.to_rows(), vec![vec![2, 4], vec![4, 1]]);
        assert_eq!(a.mul(&inv, &ctr).unwrap(), Matrix::identity(f, 2));
    }

    #[test]
    fn identity_cases() {
        let f = FieldSpec::gf256();
        let i = Matrix::identity(f, 4);
        assert_eq!(i.inverse().unwrap(), i);
        let m = Matrix::from_rows(
            f,
            &[vec![3, 0, 9], vec![1, 1, 1], vec![200, 7, 0], vec![5, 5, 5]],
        )
        .unwrap();
        let ctr = OpCounter::new();
        assert_eq!(i.mul(&m, &ctr).unwrap(), m);
    }

    #[test]
    fn counter_charges_cubic_for_square_products() {
        let f = FieldSpec::gf256();
        for ell in 1..6 {
            let ctr = OpCounter::new();
            let a = Matrix::identity(f, ell);
            a.mul(&a, &ctr).unwrap();
            assert_eq!(ctr.mults(), (ell * ell * ell) as u64);
        }
    }

    #[test]
    fn errors() {
        let f = f5();
        let ctr = OpCounter::new();
        let a = Matrix::from_rows(f, &[vec![1, 2, 3]]).unwrap();
        assert!(matches!(a.mul(&a, &ctr), Err(GfError::Dimension(_))));
        assert!(matches!(a.inverse(), Err(GfError::Dimension(_))));
        let s = Matrix::from_rows(f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(s.inverse(), Err(GfError::Singular));
        let g = Matrix::identity(FieldSpec::gf256(), 3);
        assert!(matches!(
            g.mul(&Matrix::identity(f, 3), &ctr),
            Err(GfError::SpecMismatch(..))
        ));
        assert!(Matrix::from_rows(f, &[vec![1, 2], vec![1]]).is_err());
        assert!(Matrix::from_rows(f, &[vec![7]]).is_err());
    }

    fn random_invertible(rng: &mut ChaCha8Rng, f: FieldSpec, n: usize) -> Matrix {
        loop {
            let rows: Vec<Vec<u64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(0..f.size())).collect())
                .collect();
            let m = Matrix::from_rows(f, &rows).unwrap();
            if m.is_invertible() {
                return m;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_inverse_over_gf256(seed in any::<u64>(), n in 1usize..8) {
            let f = FieldSpec::gf256();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_invertible(&mut rng, f, n);
            let ctr = OpCounter::new();
            prop_assert_eq!(a.mul(&a.inverse().unwrap(), &ctr).unwrap(), Matrix::identity(f, n));
        }

        #[test]
        fn inverse_of_product_reverses(seed in any::<u64>(), n in 1usize..6, prime in prop::sample::select(vec![5u32, 7, 11])) {
            let f = FieldSpec::prime(prime).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_invertible(&mut rng, f, n);
            let b = random_invertible(&mut rng, f, n);
            let ctr = OpCounter::new();
            let lhs = a.mul(&b, &ctr).unwrap().inverse().unwrap();
            let rhs = b.inverse().unwrap().mul(&a.inverse().unwrap(), &ctr).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
