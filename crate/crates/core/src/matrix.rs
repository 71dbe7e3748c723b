//! Dense row-major matrices, block partitioning and the partition parameters
//! of a coded session.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{PrimeField, Scalar};

/// Dense matrix stored row-major. Blocks taken from a matrix are copies.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Matrix::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let data = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| F::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn scalar(v: F) -> Self {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![v],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn scale(&self, c: &F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    /// `self += other`
    pub fn add_assign_matrix(&mut self, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = a.clone() + b.clone();
        }
        Ok(())
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Self, c: &F) -> Result<()> {
        self.check_same_shape(other)?;
        if c.is_zero() {
            return Ok(());
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = a.clone() + b.clone() * c.clone();
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_assign_matrix(other)?;
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    /// Schoolbook product.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![F::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * other.cols..(i + 1) * other.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o = o.clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data: out,
        })
    }

    /// Copies rows `[start, start + len)`.
    pub fn row_band(&self, start: usize, len: usize) -> Self {
        Matrix {
            rows: len,
            cols: self.cols,
            data: self.data[start * self.cols..(start + len) * self.cols].to_vec(),
        }
    }

    /// Copies columns `[start, start + len)`.
    pub fn col_band(&self, start: usize, len: usize) -> Self {
        Matrix::from_fn(self.rows, len, |r, c| self.get(r, start + c).clone())
    }

    /// Splits into `m` equal row bands, top first.
    pub fn partition_rows(&self, m: usize) -> Result<Vec<Self>> {
        if m == 0 || self.rows % m != 0 {
            return Err(Error::Partition {
                len: self.rows,
                parts: m,
            });
        }
        let h = self.rows / m;
        Ok((0..m).map(|i| self.row_band(i * h, h)).collect())
    }

    /// Splits into `blocks` equal column bands, left first.
    pub fn partition_cols(&self, blocks: usize) -> Result<Vec<Self>> {
        if blocks == 0 || self.cols % blocks != 0 {
            return Err(Error::Partition {
                len: self.cols,
                parts: blocks,
            });
        }
        let w = self.cols / blocks;
        Ok((0..blocks).map(|i| self.col_band(i * w, w)).collect())
    }

    /// Stacks blocks of equal width on top of each other.
    pub fn vstack(blocks: &[Self]) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::Shape("nothing to stack".into()))?;
        if blocks.iter().any(|b| b.cols != first.cols) {
            return Err(Error::Shape("vstack: blocks differ in width".into()));
        }
        let data = blocks.iter().flat_map(|b| b.data.iter().cloned()).collect();
        Matrix::from_vec(blocks.iter().map(|b| b.rows).sum(), first.cols, data)
    }

    /// Places blocks of equal height side by side.
    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::Shape("nothing to stack".into()))?;
        if blocks.iter().any(|b| b.rows != first.rows) {
            return Err(Error::Shape("hstack: blocks differ in height".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(first.rows * cols);
        for r in 0..first.rows {
            for b in blocks {
                data.extend_from_slice(b.row(r));
            }
        }
        Matrix::from_vec(first.rows, cols, data)
    }

    /// Zero-pads on the bottom and right up to `rows x cols`.
    pub fn pad_to(&self, rows: usize, cols: usize) -> Self {
        assert!(rows >= self.rows && cols >= self.cols, "padding cannot shrink");
        Matrix::from_fn(rows, cols, |r, c| {
            if r < self.rows && c < self.cols {
                self.get(r, c).clone()
            } else {
                F::zero()
            }
        })
    }

    /// Keeps the top-left `rows x cols` corner.
    pub fn crop(&self, rows: usize, cols: usize) -> Self {
        assert!(rows <= self.rows && cols <= self.cols, "crop must shrink");
        Matrix::from_fn(rows, cols, |r, c| self.get(r, c).clone())
    }
}

/// Reassembles `AB` from the grid of block products: `grid[l][r]` is the
/// block in row band `l` and column band `r`.
pub fn assemble_product<F: Scalar>(grid: &[Vec<Matrix<F>>]) -> Result<Matrix<F>> {
    let width = grid
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Shape("empty block grid".into()))?;
    if width == 0 || grid.iter().any(|row| row.len() != width) {
        return Err(Error::Shape("ragged block grid".into()));
    }
    let shape = grid[0][0].shape();
    if grid.iter().flatten().any(|b| b.shape() != shape) {
        return Err(Error::Shape("blocks in the grid differ in shape".into()));
    }
    let bands = grid
        .iter()
        .map(|row| Matrix::hstack(row))
        .collect::<Result<Vec<_>>>()?;
    Matrix::vstack(&bands)
}

impl<F: PrimeField> Matrix<F> {
    /// Uniformly random entries.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Matrix::from_fn(rows, cols, |_, _| F::from_u64(rng.random_range(0..F::MODULUS)))
    }

    /// Canonical little-endian encoding: rows, cols, then residues.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.data.len());
        out.extend_from_slice(&(self.rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.cols as u64).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.residue().to_le_bytes());
        }
        out
    }

    /// Renders the fixture format: a `rows cols p` header, then one line of
    /// space-separated residues per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, F::MODULUS);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| v.residue().to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Parses the fixture format. Entries are reduced modulo `p`; negative
    /// entries are accepted and reduced the same way.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("header must be `rows cols p`, got `{header}`")));
        }
        let num = |s: &str| {
            s.parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad header field `{s}`: {e}")))
        };
        let (rows, cols, p) = (num(fields[0])? as usize, num(fields[1])? as usize, num(fields[2])?);
        if p != F::MODULUS {
            return Err(Error::Parse(format!(
                "matrix is over p = {p}, expected p = {}",
                F::MODULUS
            )));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for (i, line) in lines.enumerate() {
            if i >= rows {
                return Err(Error::Parse(format!("more than {rows} rows")));
            }
            let row: Vec<F> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<i128>()
                        .map(F::from_i128)
                        .map_err(|e| Error::Parse(format!("bad entry `{t}`: {e}")))
                })
                .collect::<Result<_>>()?;
            if row.len() != cols {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        if data.len() != rows * cols {
            return Err(Error::Parse(format!(
                "expected {rows} rows, found {}",
                data.len() / cols.max(1)
            )));
        }
        Matrix::from_vec(rows, cols, data)
    }
}

/// Partition parameters of one coded session.
///
/// `m` row blocks of `A`, `n` groups (each library matrix splits into
/// `n - 1` column blocks), `library_size` matrices, `workers` workers and
/// `per_worker` evaluations of the encoded `A` sent to each worker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionSpec {
    m: usize,
    n: usize,
    library_size: usize,
    workers: usize,
    per_worker: usize,
}

impl PartitionSpec {
    pub fn new(m: usize, n: usize, library_size: usize, workers: usize, per_worker: usize) -> Result<Self> {
        if m == 0 || library_size == 0 || workers == 0 || per_worker == 0 {
            return Err(Error::InvalidSpec(format!(
                "m, M, N and L must be positive (m = {m}, M = {library_size}, N = {workers}, L = {per_worker})"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidSpec(format!("n ≥ 2 required, got n = {n}")));
        }
        if workers % n != 0 {
            return Err(Error::InvalidSpec(format!(
                "n must divide N (N = {workers}, n = {n})"
            )));
        }
        if per_worker > m {
            return Err(Error::InvalidSpec(format!(
                "L ≤ m violated (L = {per_worker}, m = {m})"
            )));
        }
        let group_capacity = per_worker * (workers / n);
        if group_capacity < m {
            return Err(Error::InvalidSpec(format!(
                "L·N/n ≥ m violated (L·N/n = {group_capacity} < m = {m})"
            )));
        }
        Ok(PartitionSpec {
            m,
            n,
            library_size,
            workers,
            per_worker,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn library_size(&self) -> usize {
        self.library_size
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn per_worker(&self) -> usize {
        self.per_worker
    }

    pub fn group_size(&self) -> usize {
        self.workers / self.n
    }

    /// Column blocks per library matrix.
    pub fn col_blocks(&self) -> usize {
        self.n - 1
    }

    /// Results needed to decode: `m` from each of the `n` groups.
    pub fn recovery_threshold(&self) -> usize {
        self.m * self.n
    }

    /// Checks that `A` has `r` rows splitting into `m` bands and the library
    /// has `t` columns splitting into `n - 1` bands.
    pub fn check_dims(&self, r: usize, t: usize) -> Result<()> {
        if r % self.m != 0 {
            return Err(Error::Partition { len: r, parts: self.m });
        }
        if t % self.col_blocks() != 0 {
            return Err(Error::Partition {
                len: t,
                parts: self.col_blocks(),
            });
        }
        Ok(())
    }
}
