//! Dense linear algebra over GF(q^2) and hermitian matrices.
//!
//! Vectors are plain `Vec<Fe>` column vectors; `x*` is the conjugate
//! transpose, so `dot(x, y) = x* y = sum conj(x_i) y_i`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};

/// `x* y`.
pub fn dot(f: &Field, x: &[Fe], y: &[Fe]) -> Fe {
    x.iter().zip(y).fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(f.conj(a), b)))
}

pub fn is_zero_vec(x: &[Fe]) -> bool {
    x.iter().all(|v| v.is_zero())
}

pub fn scale_vec(f: &Field, c: Fe, x: &[Fe]) -> Vec<Fe> {
    x.iter().map(|&v| f.mul(c, v)).collect()
}

pub fn add_vec(f: &Field, x: &[Fe], y: &[Fe]) -> Vec<Fe> {
    x.iter().zip(y).map(|(&a, &b)| f.add(a, b)).collect()
}

pub fn sub_vec(f: &Field, x: &[Fe], y: &[Fe]) -> Vec<Fe> {
    x.iter().zip(y).map(|(&a, &b)| f.sub(a, b)).collect()
}

/// `sum c_i x_i`.
pub fn combine(f: &Field, terms: &[(Fe, &[Fe])]) -> Vec<Fe> {
    let n = terms.first().map_or(0, |t| t.1.len());
    let mut out = vec![Fe::ZERO; n];
    for &(c, x) in terms {
        for (o, &v) in out.iter_mut().zip(x) {
            *o = f.add(*o, f.mul(c, v));
        }
    }
    out
}

/// Scales `x` so that its first nonzero coordinate is one.
pub fn normalize_projective(f: &Field, x: &[Fe]) -> Option<Vec<Fe>> {
    let lead = *x.iter().find(|v| !v.is_zero())?;
    let inv = f.inv(lead)?;
    Some(scale_vec(f, inv, x))
}

pub fn unit_vector(n: usize, i: usize) -> Vec<Fe> {
    let mut e = vec![Fe::ZERO; n];
    e[i] = Fe::ONE;
    e
}

/// Dense row-major matrix over GF(q^2).
#[derive(Clone)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    pub fn from_fn(
        field: &Field,
        rows: usize,
        cols: usize,
        mut entry: impl FnMut(usize, usize) -> Fe,
    ) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(entry(i, j));
            }
        }
        Matrix { field: field.clone(), rows, cols, data }
    }

    pub fn from_rows(field: &Field, rows: &[Vec<Fe>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix::from_fn(field, rows.len(), cols, |i, j| rows[i][j]))
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(field: &Field, columns: &[Vec<Fe>]) -> Result<Matrix> {
        let rows = columns.first().map_or(0, |c| c.len());
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        Ok(Matrix::from_fn(field, rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn diagonal(field: &Field, diag: &[Fe]) -> Matrix {
        Matrix::from_fn(field, diag.len(), diag.len(), |i, j| if i == j { diag[i] } else { Fe::ZERO })
    }

    /// `x y*`.
    pub fn outer(field: &Field, x: &[Fe], y: &[Fe]) -> Matrix {
        Matrix::from_fn(field, x.len(), y.len(), |i, j| field.mul(x[i], field.conj(y[j])))
    }

    pub fn field(&self) -> &Field {
        &self.field
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Fe>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[Fe] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let f = &self.field;
        Ok(Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let f = &self.field;
        Ok(Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: Fe) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(c, a)).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Fe]) -> Result<Vec<Fe>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect())
    }

    /// Conjugate transpose.
    pub fn star(&self) -> Matrix {
        let f = &self.field;
        Matrix::from_fn(f, self.cols, self.rows, |i, j| f.conj(self.get(j, i)))
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Matrix {
        let f = &self.field;
        Matrix::from_fn(f, self.rows, self.cols, |i, j| f.conj(self.get(i, j)))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.star()
    }

    /// `[[self, 0], [0, other]]`.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let (r, c) = (self.rows, self.cols);
        Matrix::from_fn(&self.field, r + other.rows, c + other.cols, |i, j| {
            if i < r && j < c {
                self.get(i, j)
            } else if i >= r && j >= c {
                other.get(i - r, j - c)
            } else {
                Fe::ZERO
            }
        })
    }

    /// Reduced row echelon form together with pivot columns.
    fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                m.set(r, j, f.mul(inv, m.get(r, j)));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{ x : self x = 0 }`.
    pub fn kernel(&self) -> Vec<Vec<Fe>> {
        let f = &self.field;
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Fe::ZERO; self.cols];
                v[fc] = Fe::ONE;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(r, fc));
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> Result<Fe> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Fe::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(Fe::ZERO);
            };
            if p != c {
                m.swap_rows(p, c);
                det = f.neg(det);
            }
            let pivot = m.get(c, c);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot).expect("pivot is nonzero");
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let aug = Matrix::from_fn(&self.field, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                Fe::ONE
            } else {
                Fe::ZERO
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(Matrix::from_fn(&self.field, n, n, |i, j| r.get(i, n + j)))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// `x* self y`.
    pub fn form(&self, x: &[Fe], y: &[Fe]) -> Fe {
        let f = &self.field;
        let mut acc = Fe::ZERO;
        for (i, &xi) in x.iter().enumerate().take(self.rows) {
            if xi.is_zero() {
                continue;
            }
            let row = self.row(i).iter().zip(y).fold(Fe::ZERO, |r, (&a, &b)| f.add(r, f.mul(a, b)));
            acc = f.add(acc, f.mul(f.conj(xi), row));
        }
        acc
    }

    /// `self + lambda x x*`.
    pub fn rank_one_update(&self, x: &[Fe], lambda: Fe) -> Matrix {
        let f = &self.field;
        let mut m = self.clone();
        for (i, &xi) in x.iter().enumerate().take(self.rows) {
            let lx = f.mul(lambda, xi);
            if lx.is_zero() {
                continue;
            }
            for (j, &xj) in x.iter().enumerate().take(self.cols) {
                let v = f.add(m.get(i, j), f.mul(lx, f.conj(xj)));
                m.set(i, j, v);
            }
        }
        m
    }

    /// `P self P*`.
    pub fn congruence(&self, p: &Matrix) -> Result<Matrix> {
        p.mul(self)?.mul(&p.star())
    }
}

/// A hermitian matrix. Construction checks `A* = A`.
#[derive(Clone, PartialEq, Eq)]
pub struct HermMatrix(Matrix);

impl fmt::Debug for HermMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::ops::Deref for HermMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl TryFrom<Matrix> for HermMatrix {
    type Error = Error;
    fn try_from(m: Matrix) -> Result<HermMatrix> {
        if m.is_hermitian() {
            Ok(HermMatrix(m))
        } else {
            Err(Error::NotHermitian)
        }
    }
}

/// Bytes per entry in the canonical encoding.
pub fn entry_width(field: &Field) -> usize {
    match field.order() {
        0..=256 => 1,
        257..=65536 => 2,
        _ => 4,
    }
}

impl HermMatrix {
    pub fn new(m: Matrix) -> Result<HermMatrix> {
        HermMatrix::try_from(m)
    }

    pub fn identity(field: &Field, n: usize) -> HermMatrix {
        HermMatrix(Matrix::identity(field, n))
    }

    pub fn zeros(field: &Field, n: usize) -> HermMatrix {
        HermMatrix(Matrix::zeros(field, n, n))
    }

    /// `diag(d)` with fixed-field entries.
    pub fn diagonal(field: &Field, d: &[Fe]) -> Result<HermMatrix> {
        for &t in d {
            field.fixed(t)?;
        }
        Ok(HermMatrix(Matrix::diagonal(field, d)))
    }

    /// `x x*`.
    pub fn outer(field: &Field, x: &[Fe]) -> HermMatrix {
        HermMatrix(Matrix::outer(field, x, x))
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn add(&self, other: &HermMatrix) -> Result<HermMatrix> {
        Ok(HermMatrix(self.0.add(&other.0)?))
    }

    pub fn sub(&self, other: &HermMatrix) -> Result<HermMatrix> {
        Ok(HermMatrix(self.0.sub(&other.0)?))
    }

    /// `lambda A` for a fixed scalar.
    pub fn scale_fixed(&self, lambda: Fe) -> Result<HermMatrix> {
        self.0.field.fixed(lambda)?;
        Ok(HermMatrix(self.0.scale(lambda)))
    }

    /// `A + lambda x x*` for a fixed scalar.
    pub fn update(&self, x: &[Fe], lambda: Fe) -> Result<HermMatrix> {
        self.0.field.fixed(lambda)?;
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        Ok(HermMatrix(self.0.rank_one_update(x, lambda)))
    }

    /// `P A P*`.
    pub fn congruence(&self, p: &Matrix) -> Result<HermMatrix> {
        Ok(HermMatrix(self.0.congruence(p)?))
    }

    pub fn inverse(&self) -> Result<HermMatrix> {
        Ok(HermMatrix(self.0.inverse()?))
    }

    pub fn direct_sum(&self, other: &HermMatrix) -> HermMatrix {
        HermMatrix(self.0.direct_sum(&other.0))
    }

    /// Upper triangle including the diagonal, row-major, each entry as its
    /// big-endian element index.
    pub fn encode(&self) -> Vec<u8> {
        let width = entry_width(&self.0.field);
        let n = self.n();
        let mut out = Vec::with_capacity(width * n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let bytes = self.get(i, j).index().to_be_bytes();
                out.extend_from_slice(&bytes[4 - width..]);
            }
        }
        out
    }

    pub fn encode_hex(&self) -> String {
        hex::encode(self.encode())
    }

    pub fn decode(field: &Field, n: usize, bytes: &[u8]) -> Result<HermMatrix> {
        let width = entry_width(field);
        if bytes.len() != width * n * (n + 1) / 2 {
            return Err(Error::Invalid(format!(
                "encoding of length {} does not describe a {n}x{n} matrix",
                bytes.len()
            )));
        }
        let mut m = Matrix::zeros(field, n, n);
        let mut chunks = bytes.chunks(width);
        for i in 0..n {
            for j in i..n {
                let chunk = chunks.next().expect("length checked");
                let idx = chunk.iter().fold(0u32, |acc, &b| (acc << 8) | b as u32);
                let v = field.element(idx)?;
                if i == j {
                    field.fixed(v)?;
                }
                m.set(i, j, v);
                m.set(j, i, field.conj(v));
            }
        }
        Ok(HermMatrix(m))
    }

    pub fn decode_hex(field: &Field, n: usize, s: &str) -> Result<HermMatrix> {
        let bytes = hex::decode(s.trim()).map_err(|e| Error::Invalid(e.to_string()))?;
        HermMatrix::decode(field, n, &bytes)
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> HermMatrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.random_fixed(rng));
            for j in i + 1..n {
                let v = field.random(rng);
                m.set(i, j, v);
                m.set(j, i, field.conj(v));
            }
        }
        HermMatrix(m)
    }

    pub fn random_invertible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> HermMatrix {
        loop {
            let a = HermMatrix::random(field, n, rng);
            if a.is_invertible() {
                return a;
            }
        }
    }
}

/// Number of hermitian `n x n` matrices, `q^(n^2)`.
pub fn hermitian_count(q: u32, n: usize) -> u128 {
    (q as u128).pow((n * n) as u32)
}

/// Every hermitian `n x n` matrix, in increasing order of encoding.
pub fn enumerate_hermitian(field: &Field, n: usize) -> impl Iterator<Item = HermMatrix> + '_ {
    let mut fixed: Vec<Fe> = field.fixed_field().to_vec();
    fixed.sort();
    let positions: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let radix: Vec<u32> =
        positions.iter().map(|&(i, j)| if i == j { fixed.len() as u32 } else { field.order() }).collect();
    let mut counter = vec![0u32; positions.len()];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut m = Matrix::zeros(field, n, n);
        for (k, &(i, j)) in positions.iter().enumerate() {
            if i == j {
                m.set(i, i, fixed[counter[k] as usize]);
            } else {
                let v = Fe::from_index(counter[k]);
                m.set(i, j, v);
                m.set(j, i, field.conj(v));
            }
        }
        // advance the mixed-radix counter, last position fastest
        done = true;
        for k in (0..counter.len()).rev() {
            counter[k] += 1;
            if counter[k] < radix[k] {
                done = false;
                break;
            }
            counter[k] = 0;
        }
        Some(HermMatrix(m))
    })
}

/// `rank(A - B) == 1`.
pub fn adjacent(a: &Matrix, b: &Matrix) -> Result<bool> {
    Ok(a.sub(b)?.rank() == 1)
}

/// Writes a rank-one hermitian `D` as `lambda x x*` with `x` projectively
/// normalized and `lambda` fixed.
pub fn rank_one_factor(d: &HermMatrix) -> Result<(Fe, Vec<Fe>)> {
    let f = d.field();
    if d.rank() != 1 {
        return Err(Error::Precondition("matrix does not have rank one".into()));
    }
    let col = (0..d.n()).map(|j| d.column(j)).find(|c| !is_zero_vec(c)).expect("rank one");
    let x = normalize_projective(f, &col).expect("nonzero column");
    let p = x.iter().position(|v| !v.is_zero()).expect("nonzero");
    let lambda = d.get(p, p);
    debug_assert_eq!(&HermMatrix::outer(f, &x).scale(lambda), d.matrix());
    Ok((lambda, x))
}

/// Result of [`congruence_diagonalize`].
#[derive(Clone, Debug)]
pub struct Congruence {
    /// Invertible with `A = P diag(1,..,1,0,..,0) P*`.
    pub p: Matrix,
    pub rank: usize,
}

impl Congruence {
    /// The first `rank` columns of `P`; `A` is the sum of their outer products.
    pub fn rank_one_terms(&self) -> Vec<Vec<Fe>> {
        (0..self.rank).map(|j| self.p.column(j)).collect()
    }
}

/// Finds invertible `P` with `A = P diag(1,..,1,0,..,0) P*`.
///
/// Symmetric elimination builds `T` with `T A T*` diagonal. When every
/// remaining diagonal entry is zero but some off-diagonal entry `b = M[j][i]`
/// is not, adding `(u/b)` times row `j` to row `i` (and the conjugate column
/// operation) puts `Tr(u) != 0` on the diagonal.
pub fn congruence_diagonalize(a: &HermMatrix) -> Congruence {
    let f = a.field().clone();
    let n = a.n();
    let mut m = a.matrix().clone();
    let mut t = Matrix::identity(&f, n);

    // row_i += c row_j, col_i += conj(c) col_j
    let add_multiple = |m: &mut Matrix, t: &mut Matrix, i: usize, j: usize, c: Fe| {
        for k in 0..n {
            let v = f.add(m.get(i, k), f.mul(c, m.get(j, k)));
            m.set(i, k, v);
            let w = f.add(t.get(i, k), f.mul(c, t.get(j, k)));
            t.set(i, k, w);
        }
        let cc = f.conj(c);
        for k in 0..n {
            let v = f.add(m.get(k, i), f.mul(m.get(k, j), cc));
            m.set(k, i, v);
        }
    };
    let swap = |m: &mut Matrix, t: &mut Matrix, i: usize, j: usize| {
        if i == j {
            return;
        }
        m.swap_rows(i, j);
        t.swap_rows(i, j);
        for k in 0..n {
            let (a, b) = (m.get(k, i), m.get(k, j));
            m.set(k, i, b);
            m.set(k, j, a);
        }
    };

    let mut rank = 0;
    for k in 0..n {
        if m.get(k, k).is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !m.get(i, i).is_zero()) {
                swap(&mut m, &mut t, i, k);
            } else {
                let off = (k..n)
                    .flat_map(|i| (k..n).map(move |j| (i, j)))
                    .find(|&(i, j)| i != j && !m.get(j, i).is_zero());
                let Some((i, j)) = off else {
                    break;
                };
                let c = f.div(f.trace_one(), m.get(j, i));
                add_multiple(&mut m, &mut t, i, j, c);
                debug_assert!(!m.get(i, i).is_zero());
                swap(&mut m, &mut t, i, k);
            }
        }
        let pivot_inv = f.inv(m.get(k, k)).expect("pivot is nonzero");
        for i in k + 1..n {
            let c = f.neg(f.mul(m.get(i, k), pivot_inv));
            if !c.is_zero() {
                add_multiple(&mut m, &mut t, i, k, c);
            }
        }
        rank += 1;
    }

    // T A T* = diag(d), d_i = N(c_i)  =>  A = (T^-1 C) E (T^-1 C)*
    let t_inv = t.inverse().expect("elimination matrix is invertible");
    let scales: Vec<Fe> = (0..n)
        .map(|i| {
            if i < rank {
                f.norm_root(m.get(i, i)).expect("diagonal of a hermitian matrix is fixed")
            } else {
                Fe::ONE
            }
        })
        .collect();
    let p = t_inv.mul(&Matrix::diagonal(&f, &scales)).expect("square");
    Congruence { p, rank }
}

/// `det(A + lambda x x*)` via `(det A)(1 + lambda x* A^-1 x)`.
pub fn det_rank_one_update(a: &HermMatrix, x: &[Fe], lambda: Fe) -> Result<Fe> {
    let f = a.field();
    f.fixed(lambda)?;
    let inv = a.inverse()?;
    let s = inv.form(x, x);
    Ok(f.mul(a.det()?, f.add(Fe::ONE, f.mul(lambda, s))))
}

/// Whether `A + lambda x x*` is invertible, decided by `lambda x* A^-1 x != -1`.
pub fn update_invertible(a: &HermMatrix, x: &[Fe], lambda: Fe) -> Result<bool> {
    let f = a.field();
    f.fixed(lambda)?;
    let inv = a.inverse()?;
    Ok(f.mul(lambda, inv.form(x, x)) != f.neg(Fe::ONE))
}

/// `(A + lambda x x*)^-1 = A^-1 - lambda / (1 + lambda x* A^-1 x) (A^-1 x)(A^-1 x)*`.
pub fn inverse_rank_one_update(a: &HermMatrix, x: &[Fe], lambda: Fe) -> Result<HermMatrix> {
    let f = a.field();
    f.fixed(lambda)?;
    let inv = a.inverse()?;
    let denom = f.add(Fe::ONE, f.mul(lambda, inv.form(x, x)));
    if denom.is_zero() {
        return Err(Error::Singular);
    }
    let y = inv.mul_vec(x)?;
    let coef = f.neg(f.div(lambda, denom));
    Ok(HermMatrix(inv.rank_one_update(&y, coef)))
}

/// Both sides of `det(sum a_i x_i x_i*) = det(sum x_i x_i*) prod a_i`.
pub fn det_tensor_scale(alpha: &[Fe], xs: &[Vec<Fe>], field: &Field) -> Result<(Fe, Fe)> {
    if alpha.len() != xs.len() {
        return Err(Error::DimensionMismatch(format!("{} scalars for {} vectors", alpha.len(), xs.len())));
    }
    let n = xs.first().map_or(0, |x| x.len());
    if xs.len() != n || xs.iter().any(|x| x.len() != n) {
        return Err(Error::DimensionMismatch("need n vectors of length n".into()));
    }
    for &a in alpha {
        field.fixed(a)?;
    }
    let mut scaled = Matrix::zeros(field, n, n);
    let mut plain = Matrix::zeros(field, n, n);
    for (x, &a) in xs.iter().zip(alpha) {
        scaled = scaled.rank_one_update(x, a);
        plain = plain.rank_one_update(x, Fe::ONE);
    }
    let prod = alpha.iter().fold(Fe::ONE, |acc, &a| field.mul(acc, a));
    Ok((scaled.det()?, field.mul(plain.det()?, prod)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(f, n, n, |_, _| f.random(rng))
    }

    #[test]
    fn rank_basics() {
        let f = Field::new(3).unwrap();
        assert_eq!(Matrix::zeros(&f, 3, 3).rank(), 0);
        assert_eq!(Matrix::identity(&f, 3).rank(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x: Vec<Fe> = (0..3).map(|_| f.random(&mut rng)).collect();
            if is_zero_vec(&x) {
                continue;
            }
            assert_eq!(HermMatrix::outer(&f, &x).rank(), 1);
        }
    }

    #[test]
    fn rank_matches_transpose_and_kernel() {
        let f = Field::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let m = Matrix::from_fn(
                &f,
                3,
                4,
                |_, _| {
                    if rng.gen_bool(0.5) {
                        Fe::ZERO
                    } else {
                        f.random(&mut rng)
                    }
                },
            );
            let r = m.rank();
            assert_eq!(r, m.transpose().rank());
            let ker = m.kernel();
            assert_eq!(ker.len(), 4 - r);
            for v in &ker {
                assert!(is_zero_vec(&m.mul_vec(v).unwrap()));
            }
        }
    }

    #[test]
    fn det_and_inverse() {
        let f = Field::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(Matrix::identity(&f, 3).det().unwrap(), Fe::ONE);
        for _ in 0..200 {
            let a = random_matrix(&f, 3, &mut rng);
            let b = random_matrix(&f, 3, &mut rng);
            let ab = a.mul(&b).unwrap();
            assert_eq!(ab.det().unwrap(), f.mul(a.det().unwrap(), b.det().unwrap()));
            assert_eq!(a.det().unwrap().is_zero(), !a.is_invertible());
            match a.inverse() {
                Ok(inv) => assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(&f, 3)),
                Err(e) => {
                    assert_eq!(e, Error::Singular);
                    assert!(a.det().unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn det_by_cofactor_oracle() {
        // Leibniz expansion over all permutations of 3 elements.
        let f = Field::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let perms = [
            ([0, 1, 2], false),
            ([1, 2, 0], false),
            ([2, 0, 1], false),
            ([0, 2, 1], true),
            ([2, 1, 0], true),
            ([1, 0, 2], true),
        ];
        for _ in 0..100 {
            let a = random_matrix(&f, 3, &mut rng);
            let mut d = Fe::ZERO;
            for (p, odd) in perms {
                let term = (0..3).fold(Fe::ONE, |acc, i| f.mul(acc, a.get(i, p[i])));
                d = if odd { f.sub(d, term) } else { f.add(d, term) };
            }
            assert_eq!(a.det().unwrap(), d);
        }
    }

    #[test]
    fn hermitian_det_is_fixed_and_congruence_scales_by_norm() {
        let f = Field::new(3).unwrap();
        let mut count = 0;
        for a in enumerate_hermitian(&f, 2) {
            let d = a.det().unwrap();
            assert!(f.is_fixed(d));
            if !d.is_zero() {
                count += 1;
            }
        }
        assert_eq!(count, 60);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = HermMatrix::random(&f, 3, &mut rng);
            let p = random_matrix(&f, 3, &mut rng);
            let pap = a.congruence(&p).unwrap();
            assert!(pap.is_hermitian());
            assert_eq!(pap.det().unwrap(), f.mul(a.det().unwrap(), f.norm(p.det().unwrap())));
        }
    }

    #[test]
    fn adjacency_examples() {
        let f = Field::new(3).unwrap();
        let i = HermMatrix::identity(&f, 2);
        assert!(!adjacent(&i, &i).unwrap());
        let x = vec![Fe::ONE, f.generator()];
        let b = i.update(&x, Fe::ONE).unwrap();
        assert!(adjacent(&i, &b).unwrap());
        let two = f.from_int(2);
        let d = HermMatrix::diagonal(&f, &[two, two]).unwrap();
        assert!(!adjacent(&i, &d).unwrap());
        let three = HermMatrix::identity(&f, 3);
        assert!(adjacent(&i, &three).is_err());
    }

    #[test]
    fn encoding_round_trip_and_order() {
        let f = Field::new(3).unwrap();
        let all: Vec<HermMatrix> = enumerate_hermitian(&f, 2).collect();
        assert_eq!(all.len() as u128, hermitian_count(3, 2));
        let enc: Vec<Vec<u8>> = all.iter().map(|a| a.encode()).collect();
        assert!(enc.windows(2).all(|w| w[0] < w[1]));
        for (a, e) in all.iter().zip(&enc) {
            assert!(a.is_hermitian());
            assert_eq!(&HermMatrix::decode(&f, 2, e).unwrap(), a);
            assert_eq!(HermMatrix::decode_hex(&f, 2, &a.encode_hex()).unwrap(), *a);
        }
        // non-fixed diagonal is rejected
        let bad = vec![f.generator().index() as u8, 0, 0];
        assert!(HermMatrix::decode(&f, 2, &bad).is_err());
        assert!(HermMatrix::decode(&f, 2, &[0, 0]).is_err());
    }

    #[test]
    fn congruence_round_trip_exhaustive() {
        for q in [2, 3] {
            let f = Field::new(q).unwrap();
            for n in [2, 3] {
                for a in enumerate_hermitian(&f, n) {
                    let c = congruence_diagonalize(&a);
                    assert_eq!(c.rank, a.rank());
                    assert!(c.p.is_invertible());
                    let mut e = vec![Fe::ZERO; n];
                    e[..c.rank].fill(Fe::ONE);
                    let back = Matrix::diagonal(&f, &e).congruence(&c.p).unwrap();
                    assert_eq!(&back, a.matrix());
                    let mut sum = Matrix::zeros(&f, n, n);
                    for x in c.rank_one_terms() {
                        sum = sum.rank_one_update(&x, Fe::ONE);
                    }
                    assert_eq!(&sum, a.matrix());
                }
            }
        }
    }

    #[test]
    fn congruence_handles_zero_diagonal() {
        for q in [2, 3, 4] {
            let f = Field::new(q).unwrap();
            let g = f.generator();
            let m = Matrix::from_rows(&f, &[vec![Fe::ZERO, g], vec![f.conj(g), Fe::ZERO]]).unwrap();
            let a = HermMatrix::new(m).unwrap();
            let c = congruence_diagonalize(&a);
            assert_eq!(c.rank, 2);
            assert_eq!(&Matrix::identity(&f, 2).congruence(&c.p).unwrap(), a.matrix());
        }
    }

    #[test]
    fn equal_rank_means_congruent() {
        let f = Field::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = HermMatrix::random(&f, 3, &mut rng);
            let b = HermMatrix::random(&f, 3, &mut rng);
            if a.rank() != b.rank() {
                continue;
            }
            let pa = congruence_diagonalize(&a).p;
            let pb = congruence_diagonalize(&b).p;
            let m = pb.mul(&pa.inverse().unwrap()).unwrap();
            assert_eq!(a.congruence(&m).unwrap(), b);
        }
    }

    #[test]
    fn rank_one_calculus() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [3, 4] {
            let f = Field::new(q).unwrap();
            for n in [2, 3, 4] {
                for _ in 0..300 {
                    let a = HermMatrix::random_invertible(&f, n, &mut rng);
                    let x: Vec<Fe> = (0..n).map(|_| f.random(&mut rng)).collect();
                    let lambda = f.random_fixed(&mut rng);
                    let updated = a.update(&x, lambda).unwrap();
                    let direct = updated.det().unwrap();
                    assert_eq!(det_rank_one_update(&a, &x, lambda).unwrap(), direct);
                    let inv_ok = update_invertible(&a, &x, lambda).unwrap();
                    assert_eq!(inv_ok, !direct.is_zero());
                    match inverse_rank_one_update(&a, &x, lambda) {
                        Ok(inv) => {
                            assert!(inv.is_hermitian());
                            assert_eq!(updated.mul(&inv).unwrap(), Matrix::identity(&f, n));
                        }
                        Err(_) => assert!(!inv_ok),
                    }
                }
            }
        }
    }

    #[test]
    fn rank_one_special_cases() {
        let f = Field::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = HermMatrix::random_invertible(&f, 3, &mut rng);
        let x = vec![f.generator(), Fe::ONE, Fe::ZERO];
        assert_eq!(det_rank_one_update(&a, &x, Fe::ZERO).unwrap(), a.det().unwrap());
        assert_eq!(inverse_rank_one_update(&a, &x, Fe::ZERO).unwrap(), a.inverse().unwrap());
        let i = HermMatrix::identity(&f, 3);
        for &l in f.fixed_field() {
            let expect = f.add(Fe::ONE, f.mul(l, dot(&f, &x, &x)));
            assert_eq!(det_rank_one_update(&i, &x, l).unwrap(), expect);
        }
        assert_eq!(det_rank_one_update(&HermMatrix::zeros(&f, 3), &x, Fe::ONE), Err(Error::Singular));
        assert!(det_rank_one_update(&i, &x, f.generator()).is_err());
    }

    #[test]
    fn isotropic_updates_always_invertible() {
        let f = Field::new(3).unwrap();
        for a in enumerate_hermitian(&f, 2).filter(|a| a.is_invertible()) {
            let inv = a.inverse().unwrap();
            for x0 in f.elements() {
                for x1 in f.elements() {
                    let x = vec![x0, x1];
                    let iso = inv.form(&x, &x).is_zero();
                    for &l in f.fixed_field() {
                        let by_rank = a.update(&x, l).unwrap().is_invertible();
                        assert_eq!(update_invertible(&a, &x, l).unwrap(), by_rank);
                        if iso {
                            assert!(by_rank);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_scale_identity() {
        let f = Field::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let xs: Vec<Vec<Fe>> = (0..3).map(|_| (0..3).map(|_| f.random(&mut rng)).collect()).collect();
            let alpha: Vec<Fe> = (0..3).map(|_| f.random_fixed(&mut rng)).collect();
            let (l, r) = det_tensor_scale(&alpha, &xs, &f).unwrap();
            assert_eq!(l, r);
        }
        let xs = vec![vec![Fe::ONE, Fe::ZERO], vec![Fe::ZERO, Fe::ONE]];
        assert_eq!(det_tensor_scale(&[Fe::ZERO, Fe::ONE], &xs, &f).unwrap(), (Fe::ZERO, Fe::ZERO));
        assert!(det_tensor_scale(&[Fe::ONE], &xs, &f).is_err());
    }

    #[test]
    fn rank_one_factoring() {
        let f = Field::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let x: Vec<Fe> = (0..3).map(|_| f.random(&mut rng)).collect();
            let l = f.random_fixed(&mut rng);
            if is_zero_vec(&x) || l.is_zero() {
                continue;
            }
            let d = HermMatrix::outer(&f, &x).scale_fixed(l).unwrap();
            let (lambda, y) = rank_one_factor(&d).unwrap();
            assert_eq!(HermMatrix::outer(&f, &y).scale_fixed(lambda).unwrap(), d);
            assert_eq!(Some(y), normalize_projective(&f, &x));
        }
        assert!(rank_one_factor(&HermMatrix::identity(&f, 2)).is_err());
    }
}
