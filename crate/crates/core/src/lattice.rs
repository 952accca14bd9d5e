//! Exact integer-lattice arithmetic over `Z^r`: Hermite/Smith normal forms,
//! membership, index, intersection, adapted bases, and the finite-index
//! supergroup construction used by the coset decision procedures.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

use crate::util::MixedRadix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ambient rank must be at least 1")]
    ZeroAmbientRank,
    #[error("zero subgroup has no adapted basis")]
    ZeroSubgroup,
    #[error("subgroup has finite index; construction needs infinite index")]
    IndexNotInfinite,
    #[error("point already lies in the subgroup")]
    PointInSubgroup,
}

/// Dense integer matrix, row-major, arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self, LatticeError> {
        for row in &rows {
            if row.len() != cols {
                return Err(LatticeError::DimensionMismatch { expected: cols, got: row.len() });
            }
        }
        let nrows = rows.len();
        Ok(IntMatrix { rows: nrows, cols, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]], cols: usize) -> Self {
        let rows: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntMatrix::from_rows(rows, cols).expect("consistent row lengths")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix { rows: n, cols: n, entries: vec![BigInt::zero(); n * n] };
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn stack(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != other.cols {
            return Err(LatticeError::DimensionMismatch { expected: self.cols, got: other.cols });
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(IntMatrix { rows: self.rows + other.rows, cols: self.cols, entries })
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if v.len() != self.rows {
            return Err(LatticeError::DimensionMismatch { expected: self.rows, got: v.len() });
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] += coeff * self.get(i, j);
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut entries = vec![BigInt::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(IntMatrix { rows: self.rows, cols: other.cols, entries })
    }

    /// Exact determinant of a square matrix (Bareiss fraction-free elimination).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.entries.clone();
        let at = |m: &Vec<BigInt>, i: usize, j: usize| m[i * n + j].clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if at(&m, k, k).is_zero() {
                match (k + 1..n).find(|&i| !at(&m, i, k).is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            m.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = at(&m, i, j) * at(&m, k, k) - at(&m, i, k) * at(&m, k, j);
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    m[i * n + j] = q;
                }
            }
            prev = at(&m, k, k);
        }
        sign * at(&m, n - 1, n - 1)
    }

    /// Row Hermite normal form together with a unimodular transform `u`
    /// satisfying `u * self = h`. Nonzero rows of `h` come first.
    pub fn hnf_with_transform(&self) -> HnfResult {
        let mut m = self.row_vecs();
        let mut u = IntMatrix::identity(self.rows).row_vecs();
        let rank = hnf_in_place(&mut m, self.cols, Some(&mut u));
        HnfResult {
            h: IntMatrix::from_rows(m, self.cols).unwrap(),
            u: IntMatrix::from_rows(u, self.rows).unwrap(),
            rank,
        }
    }

    pub fn hnf(&self) -> (IntMatrix, usize) {
        let mut m = self.row_vecs();
        let rank = hnf_in_place(&mut m, self.cols, None);
        (IntMatrix::from_rows(m, self.cols).unwrap(), rank)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub struct HnfResult {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
}

fn sub_scaled(target: &mut [BigInt], q: &BigInt, source: &[BigInt]) {
    if q.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(source) {
        *t -= q * s;
    }
}

/// In-place row HNF. Returns the rank; nonzero rows end up on top, in
/// echelon order, with positive pivots and entries above each pivot reduced
/// into `[0, pivot)`. Row operations are mirrored onto `transform`.
fn hnf_in_place(m: &mut [Vec<BigInt>], cols: usize, mut transform: Option<&mut Vec<Vec<BigInt>>>) -> usize {
    let nrows = m.len();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == nrows {
            break;
        }
        // Euclidean descent in this column until one nonzero entry remains.
        loop {
            let nz: Vec<usize> = (pivot_row..nrows).filter(|&i| !m[i][col].is_zero()).collect();
            match nz.len() {
                0 => break,
                1 => {
                    let i0 = nz[0];
                    m.swap(pivot_row, i0);
                    if let Some(u) = transform.as_deref_mut() {
                        u.swap(pivot_row, i0);
                    }
                    if m[pivot_row][col].is_negative() {
                        for x in m[pivot_row].iter_mut() {
                            *x = -std::mem::take(x);
                        }
                        if let Some(u) = transform.as_deref_mut() {
                            for x in u[pivot_row].iter_mut() {
                                *x = -std::mem::take(x);
                            }
                        }
                    }
                    // Reduce entries above the pivot into [0, pivot).
                    for i in 0..pivot_row {
                        let q = m[i][col].div_floor(&m[pivot_row][col]);
                        if !q.is_zero() {
                            let pivot = m[pivot_row].clone();
                            sub_scaled(&mut m[i], &q, &pivot);
                            if let Some(u) = transform.as_deref_mut() {
                                let upivot = u[pivot_row].clone();
                                sub_scaled(&mut u[i], &q, &upivot);
                            }
                        }
                    }
                    pivot_row += 1;
                    break;
                }
                _ => {
                    let &imin = nz
                        .iter()
                        .min_by_key(|&&i| m[i][col].abs())
                        .expect("nonempty nonzero set");
                    for &i in &nz {
                        if i == imin {
                            continue;
                        }
                        let (q, _) = m[i][col].div_rem(&m[imin][col]);
                        let src = m[imin].clone();
                        sub_scaled(&mut m[i], &q, &src);
                        if let Some(u) = transform.as_deref_mut() {
                            let usrc = u[imin].clone();
                            sub_scaled(&mut u[i], &q, &usrc);
                        }
                    }
                }
            }
        }
    }
    pivot_row
}

/// Solves `x * m = d` over the integers, if solvable.
pub fn solve_row_system(m: &IntMatrix, d: &[BigInt]) -> Result<Option<Vec<BigInt>>, LatticeError> {
    if d.len() != m.cols() {
        return Err(LatticeError::DimensionMismatch { expected: m.cols(), got: d.len() });
    }
    let HnfResult { h, u, rank } = m.hnf_with_transform();
    let mut w = d.to_vec();
    let mut x = vec![BigInt::zero(); m.rows()];
    for i in 0..rank {
        let p = match h.row(i).iter().position(|e| !e.is_zero()) {
            Some(p) => p,
            None => break,
        };
        let (q, r) = w[p].div_rem(h.get(i, p));
        if !r.is_zero() {
            return Ok(None);
        }
        sub_scaled(&mut w, &q, h.row(i));
        if !q.is_zero() {
            for j in 0..m.rows() {
                x[j] += &q * u.get(i, j);
            }
        }
    }
    if w.iter().all(|e| e.is_zero()) {
        Ok(Some(x))
    } else {
        Ok(None)
    }
}

/// Index of a subgroup in its ambient `Z^r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IndexValue {
    Finite(BigInt),
    Infinite,
}

impl IndexValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, IndexValue::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            IndexValue::Finite(n) => Some(n),
            IndexValue::Infinite => None,
        }
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Finite(n) => write!(f, "{n}"),
            IndexValue::Infinite => write!(f, "infinite"),
        }
    }
}

/// A subgroup of `Z^r` in canonical form: the basis matrix is the row
/// Hermite normal form of any generating set, with zero rows dropped.
/// Two values are equal iff they denote the same subgroup.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatticeSubgroup {
    ambient_rank: usize,
    basis: IntMatrix,
}

impl LatticeSubgroup {
    /// Canonicalizes a generator list into HNF ("hnf_reduce").
    pub fn from_generators(generators: &IntMatrix, ambient_rank: usize) -> Result<Self, LatticeError> {
        if ambient_rank == 0 {
            return Err(LatticeError::ZeroAmbientRank);
        }
        if generators.cols() != ambient_rank && generators.rows() > 0 {
            return Err(LatticeError::DimensionMismatch {
                expected: ambient_rank,
                got: generators.cols(),
            });
        }
        let mut rows = generators.row_vecs();
        let rank = hnf_in_place(&mut rows, ambient_rank, None);
        rows.truncate(rank);
        Ok(LatticeSubgroup {
            ambient_rank,
            basis: IntMatrix::from_rows(rows, ambient_rank).unwrap(),
        })
    }

    pub fn from_generator_rows(rows: Vec<Vec<BigInt>>, ambient_rank: usize) -> Result<Self, LatticeError> {
        let m = IntMatrix::from_rows(rows, ambient_rank)?;
        Self::from_generators(&m, ambient_rank)
    }

    pub fn from_i64_rows(rows: &[&[i64]], ambient_rank: usize) -> Self {
        let m = IntMatrix::from_i64_rows(rows, ambient_rank);
        Self::from_generators(&m, ambient_rank).expect("valid generators")
    }

    pub fn zero(ambient_rank: usize) -> Self {
        assert!(ambient_rank > 0, "ambient rank must be positive");
        LatticeSubgroup {
            ambient_rank,
            basis: IntMatrix::from_rows(Vec::new(), ambient_rank).unwrap(),
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        assert!(ambient_rank > 0, "ambient rank must be positive");
        LatticeSubgroup { ambient_rank, basis: IntMatrix::identity(ambient_rank) }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient_rank && self.basis == IntMatrix::identity(self.ambient_rank)
    }

    fn check_dim(&self, v: &[BigInt]) -> Result<(), LatticeError> {
        if v.len() != self.ambient_rank {
            return Err(LatticeError::DimensionMismatch { expected: self.ambient_rank, got: v.len() });
        }
        Ok(())
    }

    /// Integer coefficients of `v` over the HNF basis, when `v` lies in the
    /// subgroup (exact back-substitution).
    pub fn decompose(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>, LatticeError> {
        self.check_dim(v)?;
        let mut w = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let p = row.iter().position(|e| !e.is_zero()).expect("basis rows are nonzero");
            let (q, r) = w[p].div_rem(&row[p]);
            if !r.is_zero() {
                return Ok(None);
            }
            sub_scaled(&mut w, &q, row);
            coeffs.push(q);
        }
        if w.iter().all(|e| e.is_zero()) {
            Ok(Some(coeffs))
        } else {
            Ok(None)
        }
    }

    /// Exact membership test ("member").
    pub fn contains(&self, v: &[BigInt]) -> Result<bool, LatticeError> {
        Ok(self.decompose(v)?.is_some())
    }

    /// Canonical coset representative of `v` modulo this subgroup: each
    /// pivot coordinate is reduced into `[0, pivot)`.
    pub fn reduce_point(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        self.check_dim(v)?;
        let mut w = v.to_vec();
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let p = row.iter().position(|e| !e.is_zero()).expect("basis rows are nonzero");
            let q = w[p].div_floor(&row[p]);
            sub_scaled(&mut w, &q, row);
        }
        Ok(w)
    }

    /// `Finite(product of HNF pivots)` iff the subgroup has full rank.
    pub fn index(&self) -> IndexValue {
        if self.rank() < self.ambient_rank {
            return IndexValue::Infinite;
        }
        let mut n = BigInt::one();
        for i in 0..self.rank() {
            n *= self.basis.get(i, i);
        }
        IndexValue::Finite(n)
    }

    /// Exact intersection, via the left kernel of the stacked basis.
    pub fn intersect(&self, other: &Self) -> Result<Self, LatticeError> {
        if self.ambient_rank != other.ambient_rank {
            return Err(LatticeError::DimensionMismatch {
                expected: self.ambient_rank,
                got: other.ambient_rank,
            });
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ambient_rank));
        }
        let stacked = self.basis.stack(&other.basis)?;
        let HnfResult { u, rank, .. } = stacked.hnf_with_transform();
        let s1 = self.rank();
        let mut gens = Vec::new();
        for i in rank..stacked.rows() {
            let coeffs = &u.row(i)[..s1];
            gens.push(self.basis.left_mul(coeffs)?);
        }
        Self::from_generator_rows(gens, self.ambient_rank)
    }

    /// Smallest subgroup containing both ("join"): HNF of the stacked rows.
    pub fn join(&self, other: &Self) -> Result<Self, LatticeError> {
        if self.ambient_rank != other.ambient_rank {
            return Err(LatticeError::DimensionMismatch {
                expected: self.ambient_rank,
                got: other.ambient_rank,
            });
        }
        let stacked = self.basis.stack(&other.basis)?;
        Self::from_generators(&stacked, self.ambient_rank)
    }

    pub fn is_subset_of(&self, other: &Self) -> Result<bool, LatticeError> {
        for i in 0..self.rank() {
            if !other.contains(self.basis.row(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Index of `self` inside `sup` (requires `self` a subgroup of `sup`):
    /// the index of the coefficient lattice of `self` over `sup`'s basis.
    pub fn index_in(&self, sup: &Self) -> Result<IndexValue, LatticeError> {
        let mut coeff_rows = Vec::new();
        for i in 0..self.rank() {
            match sup.decompose(self.basis.row(i))? {
                Some(c) => coeff_rows.push(c),
                None => return Err(LatticeError::PointInSubgroup),
            }
        }
        if sup.rank() == 0 {
            return Ok(IndexValue::Finite(BigInt::one()));
        }
        Ok(LatticeSubgroup::from_generator_rows(coeff_rows, sup.rank())?.index())
    }

    /// Smith-style adapted basis: rows `x_1..x_r` of a basis of `Z^r` and
    /// divisors `a_1 | a_2 | ... | a_s` with `a_i x_i` generating the
    /// subgroup.
    pub fn adapted_basis(&self) -> Result<AdaptedBasis, LatticeError> {
        if self.is_zero() {
            return Err(LatticeError::ZeroSubgroup);
        }
        let sm = smith(&self.basis);
        let divisors: Vec<BigInt> = sm.diag.into_iter().take(self.rank()).collect();
        debug_assert!(divisors.iter().all(|d| d.is_positive()));
        Ok(AdaptedBasis { full_basis: sm.v_inv, coords: sm.v, divisors })
    }

    /// Lemma-3.2-style construction: a finite-index supergroup of an
    /// infinite-index subgroup that still avoids `y`. The new scale on a
    /// basis direction with coefficient `b != 0` is `|b| + 1`.
    pub fn fi_supergroup(&self, y: &[BigInt]) -> Result<LatticeSubgroup, LatticeError> {
        self.fi_supergroup_with(y, |b| b.abs() + 1)
    }

    /// Variant of [`fi_supergroup`] choosing the smallest integer >= 2 that
    /// does not divide the coefficient. Indices (and therefore the
    /// annihilator conductors of derived vanishing polynomials) stay small
    /// even for large coefficients.
    pub fn fi_supergroup_compact(&self, y: &[BigInt]) -> Result<LatticeSubgroup, LatticeError> {
        self.fi_supergroup_with(y, |b| {
            let mut a = BigInt::from(2);
            while b.mod_floor(&a).is_zero() {
                a += 1;
            }
            a
        })
    }

    fn fi_supergroup_with(
        &self,
        y: &[BigInt],
        non_divisor: impl Fn(&BigInt) -> BigInt,
    ) -> Result<LatticeSubgroup, LatticeError> {
        self.check_dim(y)?;
        if self.index().is_finite() {
            return Err(LatticeError::IndexNotInfinite);
        }
        if self.contains(y)? {
            return Err(LatticeError::PointInSubgroup);
        }
        let r = self.ambient_rank;
        let (xs, alphas, beta) = if self.is_zero() {
            (IntMatrix::identity(r), Vec::new(), y.to_vec())
        } else {
            let ab = self.adapted_basis()?;
            let beta = ab.express(y)?;
            (ab.full_basis, ab.divisors, beta)
        };
        let s = alphas.len();
        let tail_zero = beta[s..].iter().all(|b| b.is_zero());
        let mut gens = Vec::with_capacity(r);
        for i in 0..r {
            let scale = if i < s {
                alphas[i].clone()
            } else if tail_zero {
                BigInt::one()
            } else if beta[i].is_zero() {
                BigInt::from(2)
            } else {
                non_divisor(&beta[i])
            };
            gens.push(xs.row(i).iter().map(|e| e * &scale).collect::<Vec<_>>());
        }
        let sup = Self::from_generator_rows(gens, r)?;
        assert!(sup.index().is_finite(), "supergroup must have finite index");
        assert!(self.is_subset_of(&sup)?, "supergroup must contain the subgroup");
        assert!(!sup.contains(y)?, "supergroup must avoid the excluded point");
        Ok(sup)
    }
}

impl fmt::Debug for LatticeSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeSubgroup(r={}, basis={:?})", self.ambient_rank, self.basis)
    }
}

/// Adapted basis of a subgroup: `full_basis` rows form a basis of `Z^r`
/// (unimodular), and the first `divisors.len()` rows scaled by the divisors
/// generate the subgroup. `coords` maps points to their coefficients over
/// `full_basis` (right multiplication).
#[derive(Clone, Debug)]
pub struct AdaptedBasis {
    pub full_basis: IntMatrix,
    pub divisors: Vec<BigInt>,
    coords: IntMatrix,
}

impl AdaptedBasis {
    /// Coefficients of `y` over the adapted basis rows.
    pub fn express(&self, y: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if y.len() != self.coords.rows() {
            return Err(LatticeError::DimensionMismatch { expected: self.coords.rows(), got: y.len() });
        }
        let mut out = vec![BigInt::zero(); self.coords.cols()];
        for (i, c) in y.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for j in 0..self.coords.cols() {
                out[j] += c * self.coords.get(i, j);
            }
        }
        Ok(out)
    }

    /// Column `i` of the coordinate matrix: the dual-basis vector paired
    /// with adapted-basis row `i`.
    pub fn dual_vector(&self, i: usize) -> Vec<BigInt> {
        (0..self.coords.rows()).map(|k| self.coords.get(k, i).clone()).collect()
    }
}

struct SmithResult {
    diag: Vec<BigInt>,
    v: IntMatrix,
    v_inv: IntMatrix,
}

/// Smith normal form `d = u * m * v` with the column transform `v` and its
/// inverse tracked; the row transform is discarded. Diagonal entries are
/// nonnegative and form a divisibility chain.
fn smith(m: &IntMatrix) -> SmithResult {
    let (s, r) = (m.rows(), m.cols());
    let mut a = m.row_vecs();
    let mut v = IntMatrix::identity(r).row_vecs();
    let mut v_inv = IntMatrix::identity(r).row_vecs();
    let k = s.min(r);

    // Column operation col_j -= q * col_t, mirrored onto v and v_inv.
    fn col_op(a: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], v_inv: &mut [Vec<BigInt>], t: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in a.iter_mut() {
            let sub = q * &row[t];
            row[j] -= sub;
        }
        for row in v.iter_mut() {
            let sub = q * &row[t];
            row[j] -= sub;
        }
        // (I - q E_{t,j})^{-1} = I + q E_{t,j}: row_t += q * row_j on v_inv.
        let src = v_inv[j].clone();
        for (x, y) in v_inv[t].iter_mut().zip(&src) {
            *x += q * y;
        }
    }

    fn col_swap(a: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], v_inv: &mut [Vec<BigInt>], t: usize, j: usize) {
        if t == j {
            return;
        }
        for row in a.iter_mut() {
            row.swap(t, j);
        }
        for row in v.iter_mut() {
            row.swap(t, j);
        }
        v_inv.swap(t, j);
    }

    let mut t = 0;
    while t < k {
        // Locate the smallest-magnitude nonzero entry in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..s {
            for j in t..r {
                if !a[i][j].is_zero()
                    && pivot.map_or(true, |(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        col_swap(&mut a, &mut v, &mut v_inv, t, pj);

        // Clear column t with row operations.
        let mut dirty = false;
        for i in t + 1..s {
            if a[i][t].is_zero() {
                continue;
            }
            let (q, _) = a[i][t].div_rem(&a[t][t]);
            let src = a[t].clone();
            sub_scaled(&mut a[i], &q, &src);
            if !a[i][t].is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // Clear row t with column operations.
        for j in t + 1..r {
            if a[t][j].is_zero() {
                continue;
            }
            let (q, _) = a[t][j].div_rem(&a[t][t].clone());
            col_op(&mut a, &mut v, &mut v_inv, t, j, &q);
            if !a[t][j].is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // Enforce divisibility of the trailing block by the pivot.
        let pv = a[t][t].clone();
        let bad = (t + 1..s).find(|&i| (t + 1..r).any(|j| !a[i][j].mod_floor(&pv.abs()).is_zero()));
        if let Some(i) = bad {
            let src = a[i].clone();
            for (x, y) in a[t].iter_mut().zip(&src) {
                *x += y;
            }
            continue;
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        t += 1;
    }

    let diag = (0..k).map(|i| a[i][i].clone()).collect();
    SmithResult {
        diag,
        v: IntMatrix::from_rows(v, r).unwrap(),
        v_inv: IntMatrix::from_rows(v_inv, r).unwrap(),
    }
}

/// All finite-index subgroups of `Z^r` with index at most `max_index`, each
/// exactly once (full-rank HNF matrices ordered by index).
pub fn enumerate_fi_subgroups(r: usize, max_index: u64) -> impl Iterator<Item = LatticeSubgroup> {
    assert!(r > 0, "ambient rank must be positive");
    (1..=max_index).flat_map(move |n| {
        diagonal_factorizations(r, n).into_iter().flat_map(move |diag| {
            let mut radices = Vec::new();
            for i in 0..r {
                for j in i + 1..r {
                    let _ = i;
                    radices.push(diag[j]);
                }
            }
            MixedRadix::new(radices).map(move |digits| {
                let mut rows = vec![vec![BigInt::zero(); r]; r];
                let mut pos = 0;
                for i in 0..r {
                    rows[i][i] = BigInt::from(diag[i]);
                    for j in i + 1..r {
                        rows[i][j] = BigInt::from(digits[pos]);
                        pos += 1;
                    }
                }
                LatticeSubgroup {
                    ambient_rank: r,
                    basis: IntMatrix::from_rows(rows, r).unwrap(),
                }
            })
        })
    })
}

fn diagonal_factorizations(r: usize, n: u64) -> Vec<Vec<u64>> {
    if r == 0 {
        return if n == 1 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for d in 1..=n {
        if n % d == 0 {
            for mut tail in diagonal_factorizations(r - 1, n / d) {
                tail.insert(0, d);
                out.push(tail);
            }
        }
    }
    out
}

pub fn vec_from_i64(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(rows: &[&[i64]], r: usize) -> LatticeSubgroup {
        LatticeSubgroup::from_i64_rows(rows, r)
    }

    /// Brute-force membership oracle: search integer combinations of the
    /// generators with coefficients in a box.
    fn member_bruteforce(gens: &[&[i64]], v: &[i64], bound: i64) -> bool {
        fn rec(gens: &[&[i64]], acc: Vec<i64>, v: &[i64], bound: i64) -> bool {
            if gens.is_empty() {
                return acc == v;
            }
            for c in -bound..=bound {
                let next: Vec<i64> =
                    acc.iter().zip(gens[0]).map(|(a, g)| a + c * g).collect();
                if rec(&gens[1..], next, v, bound) {
                    return true;
                }
            }
            false
        }
        rec(gens, vec![0; v.len()], v, bound)
    }

    #[test]
    fn hnf_reduce_examples() {
        let h = sg(&[&[2, 0], &[0, 3]], 2);
        assert_eq!(h.basis().row_vecs(), vec![vec_from_i64(&[2, 0]), vec_from_i64(&[0, 3])]);
        assert_eq!(h.rank(), 2);

        let h = sg(&[&[4, 6]], 2);
        assert_eq!(h.basis().row_vecs(), vec![vec_from_i64(&[4, 6])]);
        assert_eq!(h.rank(), 1);

        let h = sg(&[&[-4, -6]], 2);
        assert_eq!(h.basis().row_vecs(), vec![vec_from_i64(&[4, 6])]);
    }

    #[test]
    fn hnf_membership_agrees_with_bruteforce() {
        let gens: &[&[i64]] = &[&[2, 1], &[0, 3]];
        let h = sg(gens, 2);
        for v in [[2i64, 1], [0, 3], [2, 4], [1, 0], [4, 2], [-2, -1], [3, 3]] {
            let expect = member_bruteforce(gens, &v, 20);
            assert_eq!(h.contains(&vec_from_i64(&v)).unwrap(), expect, "point {v:?}");
        }
    }

    #[test]
    fn member_edge_cases() {
        let h = sg(&[&[2, 0]], 2);
        assert!(h.contains(&vec_from_i64(&[0, 0])).unwrap());
        assert!(!h.contains(&vec_from_i64(&[3, 0])).unwrap());
        let h2 = sg(&[&[2, 2], &[0, 6]], 2);
        assert!(h2.contains(&vec_from_i64(&[6, 6])).unwrap());
        assert!(member_bruteforce(&[&[2, 2], &[0, 6]], &[6, 6], 6));
        assert!(h.contains(&vec_from_i64(&[0])).is_err());
    }

    #[test]
    fn index_examples() {
        assert_eq!(sg(&[&[2, 0], &[0, 3]], 2).index(), IndexValue::Finite(BigInt::from(6)));
        assert_eq!(sg(&[&[1, 1]], 2).index(), IndexValue::Infinite);
        assert_eq!(sg(&[&[2, 1], &[0, 3]], 2).index(), IndexValue::Finite(BigInt::from(6)));
        assert_eq!(LatticeSubgroup::zero(1).index(), IndexValue::Infinite);
    }

    #[test]
    fn index_counts_residues() {
        // Count residues of Z^2 mod H by brute force over [0,6)^2.
        let h = sg(&[&[2, 1], &[0, 3]], 2);
        let mut reps = std::collections::HashSet::new();
        for a in 0..6i64 {
            for b in 0..6i64 {
                reps.insert(h.reduce_point(&vec_from_i64(&[a, b])).unwrap());
            }
        }
        assert_eq!(reps.len(), 6);
    }

    #[test]
    fn intersect_examples() {
        let two = sg(&[&[2]], 1);
        let three = sg(&[&[3]], 1);
        assert_eq!(two.intersect(&three).unwrap(), sg(&[&[6]], 1));

        // {(a,b): a+b even} cap 2Z x Z has index 4.
        let h1 = sg(&[&[1, 1], &[0, 2]], 2);
        let h2 = sg(&[&[2, 0], &[0, 1]], 2);
        let cap = h1.intersect(&h2).unwrap();
        assert_eq!(cap.index(), IndexValue::Finite(BigInt::from(4)));

        assert_eq!(h1.intersect(&h1).unwrap(), h1);
    }

    #[test]
    fn intersect_rank_deficient() {
        let a = sg(&[&[1, 1]], 2);
        let b = sg(&[&[2, 0]], 2);
        let cap = a.intersect(&b).unwrap();
        assert!(cap.is_zero());
        let c = sg(&[&[2, 2]], 2);
        assert_eq!(a.intersect(&c).unwrap(), c);
    }

    #[test]
    fn join_examples() {
        let two = sg(&[&[2]], 1);
        let three = sg(&[&[3]], 1);
        assert!(two.join(&three).unwrap().is_full());
        let h = sg(&[&[5, 7]], 2);
        assert_eq!(h.join(&LatticeSubgroup::zero(2)).unwrap(), h);
        let ex = sg(&[&[2, 0]], 2).join(&sg(&[&[0, 2]], 2)).unwrap();
        assert_eq!(ex, sg(&[&[2, 0], &[0, 2]], 2));
    }

    #[test]
    fn adapted_basis_diag_2_3() {
        let h = sg(&[&[2, 0], &[0, 3]], 2);
        let ab = h.adapted_basis().unwrap();
        assert_eq!(ab.divisors, vec![BigInt::from(1), BigInt::from(6)]);
        let det = ab.full_basis.det();
        assert!(det.abs().is_one(), "full basis must be unimodular, det={det}");
        // a_i x_i regenerate H exactly.
        let scaled: Vec<Vec<BigInt>> = ab
            .divisors
            .iter()
            .enumerate()
            .map(|(i, d)| ab.full_basis.row(i).iter().map(|e| e * d).collect())
            .collect();
        assert_eq!(LatticeSubgroup::from_generator_rows(scaled, 2).unwrap(), h);
    }

    #[test]
    fn adapted_basis_axis_and_diagonal() {
        let h = sg(&[&[2, 0]], 2);
        let ab = h.adapted_basis().unwrap();
        assert_eq!(ab.divisors, vec![BigInt::from(2)]);
        assert_eq!(ab.full_basis.row(0), &vec_from_i64(&[1, 0])[..]);
        assert!(ab.full_basis.det().abs().is_one());

        let h = sg(&[&[1, 1]], 2);
        let ab = h.adapted_basis().unwrap();
        assert_eq!(ab.divisors, vec![BigInt::from(1)]);
        assert!(ab.full_basis.det().abs().is_one());
        // x_1 must be primitive and in H.
        assert!(h.contains(ab.full_basis.row(0)).unwrap());
    }

    #[test]
    fn adapted_basis_rejects_zero() {
        assert_eq!(LatticeSubgroup::zero(2).adapted_basis().unwrap_err(), LatticeError::ZeroSubgroup);
    }

    #[test]
    fn express_inverts_full_basis() {
        let h = sg(&[&[3, 1, 0], &[0, 2, 5]], 3);
        let ab = h.adapted_basis().unwrap();
        let y = vec_from_i64(&[7, -4, 9]);
        let beta = ab.express(&y).unwrap();
        let back = ab.full_basis.left_mul(&beta).unwrap();
        assert_eq!(back, y);
    }

    #[test]
    fn fi_supergroup_examples() {
        // H = span{(1,1)}, y = (1,0).
        let h = sg(&[&[1, 1]], 2);
        let y = vec_from_i64(&[1, 0]);
        let g = h.fi_supergroup(&y).unwrap();
        assert!(g.index().is_finite());
        assert!(h.is_subset_of(&g).unwrap());
        assert!(!g.contains(&y).unwrap());
        assert_eq!(g, sg(&[&[1, 1], &[0, 2]], 2));
        assert_eq!(g.index(), IndexValue::Finite(BigInt::from(2)));

        // H = 2Z x {0}, y = (1,0): zero tail coefficients.
        let h = sg(&[&[2, 0]], 2);
        let g = h.fi_supergroup(&vec_from_i64(&[1, 0])).unwrap();
        assert_eq!(g, sg(&[&[2, 0], &[0, 1]], 2));
        assert_eq!(g.index(), IndexValue::Finite(BigInt::from(2)));

        // H = {0} in Z^1, y = 3 -> 4Z.
        let g = LatticeSubgroup::zero(1).fi_supergroup(&vec_from_i64(&[3])).unwrap();
        assert_eq!(g, sg(&[&[4]], 1));
    }

    #[test]
    fn fi_supergroup_preconditions() {
        let full_rank = sg(&[&[2, 0], &[0, 2]], 2);
        assert_eq!(
            full_rank.fi_supergroup(&vec_from_i64(&[1, 0])).unwrap_err(),
            LatticeError::IndexNotInfinite
        );
        let h = sg(&[&[1, 1]], 2);
        assert_eq!(
            h.fi_supergroup(&vec_from_i64(&[2, 2])).unwrap_err(),
            LatticeError::PointInSubgroup
        );
    }

    #[test]
    fn enumerate_small_ranks() {
        let one: Vec<_> = enumerate_fi_subgroups(1, 3).collect();
        assert_eq!(one, vec![sg(&[&[1]], 1), sg(&[&[2]], 1), sg(&[&[3]], 1)]);

        let two: Vec<_> = enumerate_fi_subgroups(2, 2).collect();
        assert_eq!(two.len(), 4); // Z^2 plus the three subgroups of index 2
        let unique: std::collections::HashSet<_> = two.iter().cloned().collect();
        assert_eq!(unique.len(), 4);
        for h in &two {
            assert!(h.index().is_finite());
        }

        let trivial: Vec<_> = enumerate_fi_subgroups(2, 1).collect();
        assert_eq!(trivial, vec![LatticeSubgroup::full(2)]);
    }

    #[test]
    fn enumerate_matches_sigma_counts() {
        // Subgroups of index n in Z^2 are counted by sigma(n).
        let sigma = |n: u64| (1..=n).filter(|d| n % d == 0).sum::<u64>();
        for n in 1..=6u64 {
            let count = enumerate_fi_subgroups(2, n)
                .filter(|h| h.index() == IndexValue::Finite(BigInt::from(n)))
                .count() as u64;
            assert_eq!(count, sigma(n), "index {n}");
        }
    }

    #[test]
    fn enumerated_bases_are_canonical() {
        for h in enumerate_fi_subgroups(3, 4) {
            let re = LatticeSubgroup::from_generators(h.basis(), 3).unwrap();
            assert_eq!(re, h);
        }
    }

    #[test]
    fn solve_row_system_roundtrip() {
        let m = IntMatrix::from_i64_rows(&[&[2, 1, 0], &[0, 3, 1]], 3);
        let d = vec_from_i64(&[2, 4, 1]); // row0 + row1
        let x = solve_row_system(&m, &d).unwrap().unwrap();
        assert_eq!(m.left_mul(&x).unwrap(), d);
        assert!(solve_row_system(&m, &vec_from_i64(&[1, 0, 0])).unwrap().is_none());
    }

    #[test]
    fn det_small() {
        assert_eq!(IntMatrix::from_i64_rows(&[&[2, 3], &[6, 6]], 2).det(), BigInt::from(-6));
        assert_eq!(IntMatrix::identity(4).det(), BigInt::one());
        assert_eq!(IntMatrix::from_i64_rows(&[&[1, 2], &[2, 4]], 2).det(), BigInt::zero());
    }
}
