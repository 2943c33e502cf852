use std::collections::BTreeMap;

/// Column-compressed integer matrix without stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols: vec![Vec::new(); cols] }
    }

    /// Columns given as (row, value) lists; duplicates are summed and zeros dropped.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = columns
            .into_iter()
            .map(|c| {
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for (r, v) in c {
                    assert!(r < rows, "row {r} out of range");
                    *acc.entry(r).or_insert(0) += v;
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect()
            })
            .collect();
        SparseIntMatrix { rows, cols }
    }

    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, i64)]) -> Self {
        let mut columns = vec![Vec::new(); cols];
        for &(r, c, v) in triplets {
            columns[c].push((r, v));
        }
        Self::from_columns(rows, columns)
    }

    pub fn from_dense(m: &[Vec<i64>]) -> Self {
        let rows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        let mut t = Vec::new();
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                t.push((i, j, v));
            }
        }
        Self::from_triplets(rows, cols, &t)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[(usize, i64)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        match self.cols[c].binary_search_by_key(&r, |e| e.0) {
            Ok(k) => self.cols[c][k].1,
            Err(_) => 0,
        }
    }

    /// (row, col, value) in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |&(i, v)| (i, j, v)))
    }

    /// Row-major view: for each row, its (col, value) entries.
    pub fn row_lists(&self) -> Vec<Vec<(usize, i64)>> {
        let mut out = vec![Vec::new(); self.rows];
        for (i, j, v) in self.entries() {
            out[i].push((j, v));
        }
        out
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        SparseIntMatrix { rows: self.cols(), cols: self.row_lists() }
    }

    pub fn mul_vec(&self, x: &[i64]) -> Vec<i128> {
        assert_eq!(x.len(), self.cols());
        let mut y = vec![0i128; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0 {
                for &(i, v) in &self.cols[j] {
                    y[i] += v as i128 * xj as i128;
                }
            }
        }
        y
    }

    /// Product `self * other`.
    pub fn mul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.cols(), other.rows);
        let columns = other
            .cols
            .iter()
            .map(|c| {
                let mut acc: Vec<(usize, i64)> = Vec::new();
                for &(k, v) in c {
                    for &(i, w) in &self.cols[k] {
                        acc.push((i, v * w));
                    }
                }
                acc
            })
            .collect();
        SparseIntMatrix::from_columns(self.rows, columns)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols()]; self.rows];
        for (i, j, v) in self.entries() {
            d[i][j] = v;
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_stored_zeros() {
        let m = SparseIntMatrix::from_triplets(2, 2, &[(0, 0, 1), (0, 0, -1), (1, 1, 3)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), 3);
        assert_eq!(m.get(0, 0), 0);
    }

    #[test]
    fn product_and_transpose() {
        let a = SparseIntMatrix::from_dense(&[vec![1, 2], vec![0, -1]]);
        let b = SparseIntMatrix::from_dense(&[vec![3], vec![4]]);
        assert_eq!(a.mul(&b).to_dense(), vec![vec![11], vec![-4]]);
        assert_eq!(a.transpose().to_dense(), vec![vec![1, 0], vec![2, -1]]);
        assert_eq!(a.mul_vec(&[1, 1]), vec![3, -1]);
    }
}
