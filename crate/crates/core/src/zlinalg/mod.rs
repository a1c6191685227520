//! Exact integer lattices: Hermite and Smith normal forms, membership,
//! orders in quotients, intersections and quotient structure.
//!
//! A [`Lattice`] is a subgroup of `Z^N` stored as its row Hermite normal
//! form, so two lattices are equal exactly when their stored bases are.

mod kernels;
mod scalar;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::LinalgError;
use kernels::Echelon;
use scalar::{run_exact, to_big_rows, Checked, Entry};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows. All rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend(r);
        }
        Ok(IntMatrix { rows: n, cols, data })
    }

    /// Convenience constructor from small integers. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(cols, rows).expect("ragged rows")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(if n == 0 { BigInt::one() } else { sign * &a[n - 1][n - 1] })
    }

    /// JSON form: array of rows, entries as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| {
                    serde_json::Value::Array(
                        self.row(i).iter().map(|x| serde_json::Value::String(x.to_string())).collect(),
                    )
                })
                .collect(),
        )
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Text format: a `rows cols` header line, then one line per row.
impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| LinalgError::Format("missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| LinalgError::Format(format!("bad header `{header}`"))))
            .collect::<Result<_, _>>()?;
        let [rows, cols] = dims[..] else {
            return Err(LinalgError::Format(format!("header must be `rows cols`, got `{header}`")));
        };
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| LinalgError::Format(format!("expected {rows} rows, found {i}")))?;
            let before = data.len();
            for tok in line.split_whitespace() {
                data.push(
                    tok.parse::<BigInt>()
                        .map_err(|_| LinalgError::Format(format!("bad integer `{tok}`")))?,
                );
            }
            if data.len() - before != cols {
                return Err(LinalgError::Format(format!(
                    "row {i} has {} entries, expected {cols}",
                    data.len() - before
                )));
            }
        }
        if lines.next().is_some() {
            return Err(LinalgError::Format("trailing rows".into()));
        }
        Ok(IntMatrix { rows, cols, data })
    }
}

/// Order of an element in a quotient group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(BigInt),
    Infinite,
}

impl Order {
    pub fn is_finite(&self) -> bool {
        matches!(self, Order::Finite(_))
    }

    /// Least common multiple; infinite absorbs.
    pub fn lcm(&self, other: &Order) -> Order {
        use num_integer::Integer;
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a.lcm(b)),
            _ => Order::Infinite,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Result of a Smith normal form computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// Nonzero invariant factors, positive, each dividing the next.
    pub d: Vec<BigInt>,
    pub rank: usize,
    /// `(U, V)` with `U * M * V` diagonal, when requested.
    pub transforms: Option<(IntMatrix, IntMatrix)>,
}

/// Structure of `L_big / L_small`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientInvariants {
    pub free_rank: usize,
    #[serde(serialize_with = "ser_bigints")]
    pub torsion: Vec<BigInt>,
}

impl QuotientInvariants {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

pub(crate) fn ser_bigints<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

/// A subgroup of `Z^N` in canonical row Hermite normal form.
#[derive(Clone)]
pub struct Lattice {
    dim: usize,
    basis: IntMatrix,
    pivots: Vec<usize>,
    small: Option<Arc<Vec<Vec<i64>>>>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.basis == other.basis
    }
}

impl Eq for Lattice {}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("dim", &self.dim)
            .field("rank", &self.rank())
            .field("basis", &self.basis)
            .finish()
    }
}

impl Lattice {
    fn from_hnf_rows<E: Entry>(dim: usize, pivots: Vec<usize>, rows: Vec<Vec<E>>) -> Self {
        let big = to_big_rows(&rows);
        let small = scalar::to_small(&big).map(Arc::new);
        let basis = IntMatrix::from_rows(dim, big).expect("rows have ambient length");
        Lattice { dim, basis, pivots, small }
    }

    pub fn zero(dim: usize) -> Self {
        Lattice {
            dim,
            basis: IntMatrix::zeros(0, dim),
            pivots: Vec::new(),
            small: Some(Arc::new(Vec::new())),
        }
    }

    /// All of `Z^dim`.
    pub fn full(dim: usize) -> Self {
        let rows = kernels::identity::<i64>(dim);
        Self::from_hnf_rows(dim, (0..dim).collect(), rows)
    }

    /// Lattice spanned by dense rows of length `dim`.
    pub fn from_rows(dim: usize, rows: &[Vec<BigInt>]) -> Result<Self, LinalgError> {
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(LinalgError::DimensionMismatch { expected: dim, found: r.len() });
        }
        fn build<E: Entry>(dim: usize, rows: Vec<Vec<E>>) -> Checked<Lattice> {
            let mut ech = Echelon::new(dim);
            for r in rows {
                ech.insert(r)?;
            }
            let (piv, hnf) = ech.finish()?;
            Ok(Lattice::from_hnf_rows(dim, piv, hnf))
        }
        Ok(run_exact(rows, |s| build(dim, s), |b| build(dim, b)))
    }

    /// Lattice spanned by sparse rows given as `(column, value)` pairs.
    ///
    /// Rows are expanded one at a time, so large generating sets never
    /// exist as a dense matrix.
    pub fn from_sparse_rows(dim: usize, rows: &[Vec<(usize, BigInt)>]) -> Result<Self, LinalgError> {
        if let Some(&(c, _)) = rows.iter().flatten().find(|(c, _)| *c >= dim) {
            return Err(LinalgError::DimensionMismatch { expected: dim, found: c + 1 });
        }
        fn build<E: Entry>(dim: usize, rows: &[Vec<(usize, BigInt)>]) -> Option<Lattice> {
            let mut ech = Echelon::<E>::new(dim);
            for r in rows {
                if ech.is_everything() {
                    break;
                }
                let mut v = vec![E::nil(); dim];
                for (c, x) in r {
                    let x = E::from_big(x)?;
                    v[*c] = v[*c].add(&x).ok()?;
                }
                ech.insert(v).ok()?;
            }
            let (piv, hnf) = ech.finish().ok()?;
            Some(Lattice::from_hnf_rows(dim, piv, hnf))
        }
        Ok(build::<i64>(dim, rows)
            .or_else(|| build::<BigInt>(dim, rows))
            .expect("BigInt arithmetic cannot overflow"))
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis_matrix(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_rows(&self) -> Vec<Vec<BigInt>> {
        self.basis.row_vecs()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim && (0..self.dim).all(|i| self.basis.get(i, i).is_one())
    }

    fn check_dim(&self, n: usize) -> Result<(), LinalgError> {
        if n != self.dim {
            return Err(LinalgError::DimensionMismatch { expected: self.dim, found: n });
        }
        Ok(())
    }

    /// Runs a back-substitution kernel on the small rows when possible.
    fn with_rows<R>(
        &self,
        v: &[BigInt],
        small: impl FnOnce(&[Vec<i64>], Vec<i64>) -> Checked<R>,
        big: impl FnOnce(&[Vec<BigInt>], Vec<BigInt>) -> Checked<R>,
    ) -> R {
        if let (Some(rows), Some(sv)) = (&self.small, v.iter().map(i64::from_big).collect::<Option<Vec<_>>>()) {
            if let Ok(r) = small(rows, sv) {
                return r;
            }
        }
        big(&self.basis.row_vecs(), v.to_vec()).expect("BigInt arithmetic cannot overflow")
    }

    /// Integer coordinates of `v` in the stored basis, if `v` is a member.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>, LinalgError> {
        self.check_dim(v.len())?;
        let piv = &self.pivots;
        Ok(self.with_rows(
            v,
            |rows, sv| Ok(kernels::coordinates(rows, piv, sv)?.map(|c| c.iter().map(Entry::to_big).collect())),
            |rows, bv| kernels::coordinates(rows, piv, bv),
        ))
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool, LinalgError> {
        Ok(self.coordinates(v)?.is_some())
    }

    pub fn order_of(&self, v: &[BigInt]) -> Result<Order, LinalgError> {
        self.check_dim(v.len())?;
        let piv = &self.pivots;
        let k = self.with_rows(
            v,
            |rows, sv| Ok(kernels::order(rows, piv, sv)?.map(|k| k.to_big())),
            |rows, bv| kernels::order(rows, piv, bv),
        );
        Ok(k.map_or(Order::Infinite, Order::Finite))
    }

    /// `self + other`.
    pub fn sum(&self, other: &Lattice) -> Result<Lattice, LinalgError> {
        self.check_dim(other.dim)?;
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Lattice::from_rows(self.dim, &rows)
    }

    /// Every basis row of `self` lies in `other`.
    pub fn is_sublattice_of(&self, other: &Lattice) -> Result<bool, LinalgError> {
        self.check_dim(other.dim)?;
        for r in self.basis_rows() {
            if !other.contains(&r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Row Hermite normal form with transform: `U * M = H`, `U` unimodular,
/// `H` of the same shape as `M` with its zero rows last.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let cols = m.ncols();
    let (h, u, _) = run_exact(
        &m.row_vecs(),
        |s| kernels::hnf_with_transform(s, cols).map(|(h, u, r)| (to_big_rows(&h), to_big_rows(&u), r)),
        |b| kernels::hnf_with_transform(b, cols),
    );
    let rows = m.nrows();
    (
        IntMatrix::from_rows(cols, h).expect("shape"),
        IntMatrix::from_rows(rows, u).expect("shape"),
    )
}

/// Smith normal form. With `transforms`, also returns unimodular `U`, `V`
/// with `U * M * V` equal to `diag(d)` padded with zeros.
pub fn snf(m: &IntMatrix, transforms: bool) -> SnfResult {
    let cols = m.ncols();
    let rows = m.nrows();
    let s = run_exact(
        &m.row_vecs(),
        |s| {
            kernels::smith(s, cols, transforms).map(|r| kernels::Smith {
                diag: r.diag.iter().map(Entry::to_big).collect(),
                u: r.u.map(|u| to_big_rows(&u)),
                v: r.v.map(|v| to_big_rows(&v)),
            })
        },
        |b| kernels::smith(b, cols, transforms),
    );
    let transforms = match (s.u, s.v) {
        (Some(u), Some(v)) => Some((
            IntMatrix::from_rows(rows, u).expect("shape"),
            IntMatrix::from_rows(cols, v).expect("shape"),
        )),
        _ => None,
    };
    SnfResult { rank: s.diag.len(), d: s.diag, transforms }
}

pub fn lattice_from_rows(rows: &IntMatrix) -> Lattice {
    Lattice::from_rows(rows.ncols(), &rows.row_vecs()).expect("rows have matrix width")
}

pub fn member(v: &[BigInt], l: &Lattice) -> Result<bool, LinalgError> {
    l.contains(v)
}

pub fn order_in_quotient(v: &[BigInt], l: &Lattice) -> Result<Order, LinalgError> {
    l.order_of(v)
}

pub fn lattice_equal(a: &Lattice, b: &Lattice) -> Result<bool, LinalgError> {
    a.check_dim(b.dim)?;
    Ok(a == b)
}

/// Basis of the integer left kernel `{x : x * M = 0}` as a lattice in
/// `Z^rows`.
pub fn left_kernel(m: &IntMatrix) -> Lattice {
    let (h, u) = hnf(m);
    let zero_rows: Vec<Vec<BigInt>> = (0..h.nrows())
        .filter(|&i| h.row(i).iter().all(Zero::is_zero))
        .map(|i| u.row(i).to_vec())
        .collect();
    Lattice::from_rows(m.nrows(), &zero_rows).expect("kernel rows have length rows(M)")
}

/// `{x in Z^rows(A) : x * A in target}`.
pub fn preimage(a: &IntMatrix, target: &Lattice) -> Result<Lattice, LinalgError> {
    target.check_dim(a.ncols())?;
    let n = a.nrows();
    let mut stacked = a.row_vecs();
    stacked.extend(target.basis_rows());
    let st = IntMatrix::from_rows(a.ncols(), stacked)?;
    let k = left_kernel(&st);
    let proj: Vec<Vec<BigInt>> = k.basis_rows().into_iter().map(|r| r[..n].to_vec()).collect();
    Lattice::from_rows(n, &proj)
}

/// Intersection by the kernel method: common integer combinations of the
/// two bases.
pub fn lattice_intersect(a: &Lattice, b: &Lattice) -> Result<Lattice, LinalgError> {
    a.check_dim(b.dim)?;
    let pre = preimage(&a.basis, b)?;
    let rows: Vec<Vec<BigInt>> = pre
        .basis_rows()
        .iter()
        .map(|x| combine(x, &a.basis))
        .collect();
    Lattice::from_rows(a.dim, &rows)
}

/// `x * M` for a row vector `x`.
pub fn combine(x: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); m.ncols()];
    for (i, c) in x.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (o, e) in out.iter_mut().zip(m.row(i)) {
            if !e.is_zero() {
                *o += c * e;
            }
        }
    }
    out
}

/// For each `y`, some integer `x` with `x * A = y`, or `None` if there is
/// none. When the rows of `A` are independent the solution is unique.
pub fn solve_left(a: &IntMatrix, ys: &[Vec<BigInt>]) -> Result<Vec<Option<Vec<BigInt>>>, LinalgError> {
    if let Some(y) = ys.iter().find(|y| y.len() != a.ncols()) {
        return Err(LinalgError::DimensionMismatch { expected: a.ncols(), found: y.len() });
    }
    let (h, u) = hnf(a);
    let r = (0..h.nrows())
        .take_while(|&i| h.row(i).iter().any(|x| !x.is_zero()))
        .count();
    let rows: Vec<Vec<BigInt>> = (0..r).map(|i| h.row(i).to_vec()).collect();
    let pivots: Vec<usize> = rows
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).expect("nonzero row"))
        .collect();
    let top_u = IntMatrix::from_rows(a.nrows(), (0..r).map(|i| u.row(i).to_vec()).collect())?;
    Ok(ys
        .iter()
        .map(|y| {
            // y = c * H = c * U_top * A
            kernels::coordinates(&rows, &pivots, y.clone())
                .expect("BigInt arithmetic cannot overflow")
                .map(|c| combine(&c, &top_u))
        })
        .collect())
}

/// Structure of `big / small`: free rank and invariant factors above one.
///
/// Fails with a witness row when `small` is not contained in `big`.
pub fn quotient_invariants(small: &Lattice, big: &Lattice) -> Result<QuotientInvariants, LinalgError> {
    small.check_dim(big.dim)?;
    let coords: Vec<Vec<BigInt>> = if big.is_full() {
        small.basis_rows()
    } else {
        let mut out = Vec::with_capacity(small.rank());
        for (i, r) in small.basis_rows().into_iter().enumerate() {
            match big.coordinates(&r)? {
                Some(c) => out.push(c),
                None => return Err(LinalgError::NotContained { row: i, witness: r }),
            }
        }
        out
    };
    let m = IntMatrix::from_rows(big.rank(), coords)?;
    let s = snf(&m, false);
    Ok(QuotientInvariants {
        free_rank: big.rank() - s.rank,
        torsion: s.d.into_iter().filter(|d| !d.is_one()).collect(),
    })
}
