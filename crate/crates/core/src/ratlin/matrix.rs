use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Scalar;
use crate::error::{Error, Result};

/// A column vector of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<Scalar>);

impl Vector {
    pub fn new(entries: Vec<Scalar>) -> Self {
        Vector(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Vector(vec![Scalar::zero(); len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[i] = Scalar::one();
        v
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        Vector(entries.iter().map(|&x| Scalar::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.0.iter().position(|x| !x.is_zero())
    }

    pub fn dot(&self, other: &Vector) -> Scalar {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: &Scalar, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    /// Splits `self = scale * p` with `p` a primitive integer vector whose
    /// first nonzero entry is positive. Zero splits as `(1, 0)`.
    pub fn primitive(&self) -> (Scalar, Vector) {
        let Some(lead) = self.first_nonzero() else {
            return (Scalar::one(), self.clone());
        };
        let row = integer_row(&self.0);
        let mut p: Vector = row.into_iter().map(Scalar::from).collect();
        if p[lead].is_negative() {
            p = -&p;
        }
        (&self.0[lead] / &p[lead], p)
    }

    /// If `self = mu * base` for some scalar `mu`, returns `mu`.
    /// `base` must be nonzero.
    pub fn ratio_to(&self, base: &Vector) -> Option<Scalar> {
        let pivot = base.first_nonzero()?;
        let mu = &self.0[pivot] / &base.0[pivot];
        if *self == base.scale(&mu) {
            Some(mu)
        } else {
            None
        }
    }

    /// Reshape a row-major flattened `rows x cols` array into a matrix.
    pub fn reshape(&self, rows: usize, cols: usize) -> Matrix {
        assert_eq!(rows * cols, self.len(), "reshape size mismatch");
        Matrix { rows, cols, data: self.0.clone() }
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found: self.len() })
        }
    }
}

impl Index<usize> for Vector {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut Scalar {
        &mut self.0[i]
    }
}

impl std::ops::Add<&Vector> for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "vector length mismatch");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Sub<&Vector> for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "vector length mismatch");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl std::ops::Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|x| -x).collect())
    }
}

impl FromIterator<Scalar> for Vector {
    fn from_iter<I: IntoIterator<Item = Scalar>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// A dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    /// Builds a matrix from rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(cols: usize, rows: &[Vector]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn from_columns(rows: usize, cols: &[Vector]) -> Self {
        Self::from_rows(rows, cols).transpose()
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vector> = rows.iter().map(|r| Vector::from_ints(r)).collect();
        Self::from_rows(cols, &rows)
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

    pub fn row(&self, i: usize) -> Vector {
        Vector::new(self.row_slice(i).to_vec())
    }

    pub fn row_slice(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn column_vectors(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Row-major flattening.
    pub fn flatten(&self) -> Vector {
        Vector::new(self.data.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector size mismatch");
        (0..self.rows)
            .map(|i| {
                self.row_slice(i)
                    .iter()
                    .zip(v.iter())
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product size mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Kronecker product; with row-major flattening,
    /// `(g.kron(h)) * vec(X) = vec(g X h^T)`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Matrix::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * &other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack width mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack height mismatch");
        let mut data = Vec::with_capacity(self.rows * (self.cols + other.cols));
        for i in 0..self.rows {
            data.extend(self.row_slice(i).iter().cloned());
            data.extend(other.row_slice(i).iter().cloned());
        }
        Matrix { rows: self.rows, cols: self.cols + other.cols, data }
    }

    pub fn rank(&self) -> usize {
        echelon(self).pivots.len()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let e = echelon(&self.hstack(&Matrix::identity(n)));
        if e.pivots.len() < n || e.pivots[n - 1] >= n {
            return Err(Error::RankDeficient);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = e.matrix[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row_slice(i))).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row_slice(i))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Matrix, D::Error> {
        let rows: Vec<Vector> = Vec::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, Vector::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("matrix rows have unequal lengths"));
        }
        Ok(Matrix::from_rows(cols, &rows))
    }
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination carried out fraction-free on integer rows.
///
/// Each row is first cleared of denominators; elimination uses the
/// cross-multiplication update `r <- p*r - c*pivot_row` followed by removal of
/// the row content, so intermediate numbers stay integral and primitive.
/// Pivot rows are divided through only at the end. The work is done in
/// `i128` while nothing overflows and redone with big integers otherwise.
pub(crate) fn echelon(m: &Matrix) -> Echelon {
    small_echelon(m).unwrap_or_else(|| big_echelon(m))
}

fn big_echelon(m: &Matrix) -> Echelon {
    let (rows, cols) = (m.rows, m.cols);
    let mut int_rows: Vec<Vec<BigInt>> = (0..rows).map(|i| integer_row(m.row_slice(i))).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Smallest nonzero magnitude keeps the update multipliers small.
        let Some(p) = (r..rows)
            .filter(|&i| !int_rows[i][c].is_zero())
            .min_by(|&a, &b| int_rows[a][c].magnitude().cmp(int_rows[b][c].magnitude()))
        else {
            continue;
        };
        int_rows.swap(r, p);
        let pivot_row = std::mem::take(&mut int_rows[r]);
        for (i, row) in int_rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let g = row[c].gcd(&pivot_row[c]);
            let a = &pivot_row[c] / &g;
            let b = &row[c] / &g;
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &a * &*x - &b * y;
            }
            make_primitive(row);
        }
        int_rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }

    let mut out = Matrix::zeros(rows, cols);
    for (i, &c) in pivots.iter().enumerate() {
        let p = int_rows[i][c].clone();
        for j in 0..cols {
            if !int_rows[i][j].is_zero() {
                out[(i, j)] = Scalar::new(int_rows[i][j].clone(), p.clone());
            }
        }
    }
    Echelon { matrix: out, pivots }
}

/// [`echelon`] in checked `i128` arithmetic; `None` on overflow.
fn small_echelon(m: &Matrix) -> Option<Echelon> {
    let (rows, cols) = (m.rows, m.cols);
    let mut int_rows: Vec<Vec<i128>> = (0..rows).map(|i| small_integer_row(m.row_slice(i))).collect::<Option<_>>()?;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).filter(|&i| int_rows[i][c] != 0).min_by_key(|&i| int_rows[i][c].unsigned_abs()) else {
            continue;
        };
        int_rows.swap(r, p);
        let pivot_row = std::mem::take(&mut int_rows[r]);
        for (i, row) in int_rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let g = row[c].gcd(&pivot_row[c]);
            let a = pivot_row[c] / g;
            let b = row[c] / g;
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?).filter(|v| *v != i128::MIN)?;
            }
            small_make_primitive(row);
        }
        int_rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }

    let mut out = Matrix::zeros(rows, cols);
    for (i, &c) in pivots.iter().enumerate() {
        let p = int_rows[i][c];
        for j in 0..cols {
            if int_rows[i][j] != 0 {
                out[(i, j)] = Scalar::from_ratio_i128(int_rows[i][j], p);
            }
        }
    }
    Some(Echelon { matrix: out, pivots })
}

fn small_integer_row(row: &[Scalar]) -> Option<Vec<i128>> {
    let mut lcm: i128 = 1;
    let mut parts = Vec::with_capacity(row.len());
    for x in row {
        let (n, d) = x.small_parts()?;
        let d = d as i128;
        lcm = (lcm / lcm.gcd(&d)).checked_mul(d)?;
        parts.push((n as i128, d));
    }
    let mut out: Vec<i128> = parts.into_iter().map(|(n, d)| n.checked_mul(lcm / d)).collect::<Option<_>>()?;
    small_make_primitive(&mut out);
    Some(out)
}

fn small_make_primitive(row: &mut [i128]) {
    let g = row.iter().fold(0i128, |acc, x| acc.gcd(x));
    if g > 1 {
        for x in row.iter_mut() {
            *x /= g;
        }
    }
}

fn integer_row(row: &[Scalar]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(&x.denom()));
    let mut out: Vec<BigInt> = row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
    debug_assert!(g.is_zero() || !g.is_negative());
}

/// Unique reduced row-echelon form of `m`; the row space is preserved and
/// zero rows sit at the bottom.
pub fn rref(m: &Matrix) -> Matrix {
    echelon(m).matrix
}
