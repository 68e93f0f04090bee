//! Exact integer linear algebra: Hermite and Smith normal forms, invariant
//! factors of quotients `Z^m / <v_1, ..., v_k>`, divisibility of lattice
//! vectors.
//!
//! All entries are arbitrary-precision integers. Diagram pipelines only ever
//! feed small numbers in, but Smith normal form intermediates can grow, and
//! exactness is non-negotiable here: every abelianization in the crate
//! funnels through this module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntLinalgError {
    #[error("generator has length {got}, expected ambient rank {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense matrix over `Z`, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.clone().into();
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

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination. Square only.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let pivot = (k + 1..n).find(|&r| !a[(r, k)].is_zero());
                match pivot {
                    Some(r) => {
                        for c in 0..n {
                            a.data.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = num / &prev;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn row_addmul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let add = q * &self[(src, c)];
            self[(dst, c)] += add;
        }
    }

    /// col[dst] += q * col[src]
    fn col_addmul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let add = q * &self[(r, src)];
            self[(r, dst)] += add;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self[(r, c)].clone();
            self[(r, c)] = v;
        }
    }
}

/// Result of a Smith normal form computation: `u * m * v = d` with `u`, `v`
/// unimodular and `d` diagonal, each diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

/// Smith normal form with transforms. Total: succeeds on any matrix,
/// including empty and zero ones.
///
/// Pivoting is by minimal non-zero absolute value in the remaining
/// submatrix, which keeps coefficient growth tame in practice.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let rank_bound = rows.min(cols);
    let mut k = 0;
    while k < rank_bound {
        // minimal |entry| pivot in d[k.., k..]
        let mut pivot: Option<(usize, usize)> = None;
        for r in k..rows {
            for c in k..cols {
                if d[(r, c)].is_zero() {
                    continue;
                }
                let better = match pivot {
                    None => true,
                    Some((pr, pc)) => d[(r, c)].abs() < d[(pr, pc)].abs(),
                };
                if better {
                    pivot = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        d.swap_rows(k, pr);
        u.swap_rows(k, pr);
        d.swap_cols(k, pc);
        v.swap_cols(k, pc);

        // clear row k and column k; a reduction step may reintroduce
        // entries, so loop until both are clean
        loop {
            let mut dirty = false;
            for r in k + 1..rows {
                if d[(r, k)].is_zero() {
                    continue;
                }
                let q = -(&d[(r, k)] / &d[(k, k)]);
                d.row_addmul(r, k, &q);
                u.row_addmul(r, k, &q);
                if !d[(r, k)].is_zero() {
                    // remainder smaller than pivot: swap up and restart
                    d.swap_rows(k, r);
                    u.swap_rows(k, r);
                    dirty = true;
                }
            }
            for c in k + 1..cols {
                if d[(k, c)].is_zero() {
                    continue;
                }
                let q = -(&d[(k, c)] / &d[(k, k)]);
                d.col_addmul(c, k, &q);
                v.col_addmul(c, k, &q);
                if !d[(k, c)].is_zero() {
                    d.swap_cols(k, c);
                    v.swap_cols(k, c);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        k += 1;
    }

    let rank = k;
    // sign normalization
    for i in 0..rank {
        if d[(i, i)].is_negative() {
            d.negate_row(i);
            u.negate_row(i);
        }
    }
    // divisibility chain d_i | d_{i+1}
    loop {
        let mut fixed = true;
        for i in 0..rank.saturating_sub(1) {
            for j in i + 1..rank {
                if (&d[(j, j)] % &d[(i, i)]).is_zero() {
                    continue;
                }
                fixed = false;
                // fold d[j,j] into column i, then redo the 2x2 block
                d.col_addmul(i, j, &BigInt::one());
                v.col_addmul(i, j, &BigInt::one());
                // now d[(i,i)] and d[(j,i)] share column i
                let (g, x, y) = ext_gcd(&d[(i, i)], &d[(j, i)]);
                // rows i and j: [x y; -b/g a/g] is unimodular
                let a_over = &d[(i, i)] / &g;
                let b_over = &d[(j, i)] / &g;
                unimodular_row_pair(&mut d, &mut u, i, j, &x, &y, &(-b_over), &a_over);
                // clear the off-diagonal leftovers
                let q = -(&d[(i, j)] / &d[(i, i)]);
                d.col_addmul(j, i, &q);
                v.col_addmul(j, i, &q);
                if d[(j, j)].is_negative() {
                    d.negate_row(j);
                    u.negate_row(j);
                }
            }
        }
        if fixed {
            break;
        }
    }

    SmithDecomposition { u, d, v }
}

/// Apply the 2x2 unimodular row transform [[x, y], [z, w]] to rows (i, j)
/// of both `d` and `u`.
#[allow(clippy::too_many_arguments)]
fn unimodular_row_pair(
    d: &mut IntMatrix,
    u: &mut IntMatrix,
    i: usize,
    j: usize,
    x: &BigInt,
    y: &BigInt,
    z: &BigInt,
    w: &BigInt,
) {
    for m in [d, u] {
        for c in 0..m.cols() {
            let a = m[(i, c)].clone();
            let b = m[(j, c)].clone();
            m[(i, c)] = x * &a + y * &b;
            m[(j, c)] = z * &a + w * &b;
        }
    }
}

/// Extended gcd: returns (g, x, y) with g = x*a + y*b, g >= 0.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Row Hermite normal form: integer row echelon with positive pivots and
/// entries above each pivot reduced modulo it. Zero rows are dropped, so
/// two generating sets span the same subgroup of `Z^cols` iff their HNFs
/// are equal.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // gcd out column `col` below pivot_row
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if a[(r, col)].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(r),
                    Some(b) if a[(r, col)].abs() < a[(b, col)].abs() => Some(r),
                    keep => keep,
                };
            }
            let Some(b) = best else { break };
            a.swap_rows(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..rows {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let q = -(&a[(r, col)] / &a[(pivot_row, col)]);
                a.row_addmul(r, pivot_row, &q);
                if !a[(r, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[(pivot_row, col)].is_zero() {
            continue;
        }
        if a[(pivot_row, col)].is_negative() {
            a.negate_row(pivot_row);
        }
        // reduce entries above the pivot
        for r in 0..pivot_row {
            let q = -(a[(r, col)].div_floor(&a[(pivot_row, col)]));
            a.row_addmul(r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    let mut out = IntMatrix::zero(pivot_row, cols);
    for r in 0..pivot_row {
        for c in 0..cols {
            out[(r, c)] = a[(r, c)].clone();
        }
    }
    out
}

/// Invariant factors d_1 | d_2 | ... of a finitely generated abelian group,
/// with 0 encoding an infinite cyclic factor and trivial factors (1) dropped.
///
/// The 0-as-`Z` convention is applied uniformly, so a factor list like
/// `[2, 0]` reads `Z_2 + Z`.
#[derive(Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct InvariantFactors(Vec<BigInt>);

impl InvariantFactors {
    pub fn new(mut factors: Vec<BigInt>) -> Self {
        factors.retain(|f| !f.is_one());
        // canonical order: finite factors ascending by divisibility, then zeros
        InvariantFactors(factors)
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of `Z` summands.
    pub fn free_rank(&self) -> usize {
        self.0.iter().filter(|f| f.is_zero()).count()
    }

    /// Order of the torsion part (product of the non-zero factors).
    pub fn torsion_order(&self) -> BigInt {
        self.0.iter().filter(|f| !f.is_zero()).product()
    }
}

impl fmt::Debug for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InvariantFactors({})", self)
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z_{}", d) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl From<Vec<i64>> for InvariantFactors {
    fn from(v: Vec<i64>) -> Self {
        InvariantFactors::new(v.into_iter().map(BigInt::from).collect())
    }
}

/// Invariant factors of `Z^ambient_rank` modulo the subgroup generated by
/// `generators` (rows). `Z` factors are encoded as 0 and trivial factors
/// dropped.
pub fn quotient_invariants(
    ambient_rank: usize,
    generators: &[Vec<BigInt>],
) -> Result<InvariantFactors, IntLinalgError> {
    for g in generators {
        if g.len() != ambient_rank {
            return Err(IntLinalgError::DimensionMismatch {
                expected: ambient_rank,
                got: g.len(),
            });
        }
    }
    let m = IntMatrix::from_rows(generators);
    let snf = smith_normal_form(&m);
    let mut factors = Vec::new();
    let r = m.rows().min(m.cols());
    let mut rank = 0;
    for i in 0..r {
        if snf.d[(i, i)].is_zero() {
            break;
        }
        factors.push(snf.d[(i, i)].clone());
        rank += 1;
    }
    for _ in rank..ambient_rank {
        factors.push(BigInt::zero());
    }
    Ok(InvariantFactors::new(factors))
}

/// Convenience wrapper over i64 generator rows.
pub fn quotient_invariants_i64(
    ambient_rank: usize,
    generators: &[Vec<i64>],
) -> Result<InvariantFactors, IntLinalgError> {
    let gens: Vec<Vec<BigInt>> = generators
        .iter()
        .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    quotient_invariants(ambient_rank, &gens)
}

/// gcd of the entries of `v`; 0 for the zero vector. For a class in a
/// unimodular lattice given by its pairing row this is the divisibility.
pub fn divisibility(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}
