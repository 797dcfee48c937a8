//! Exact linear algebra over `Q` and over number fields: row reduction,
//! kernels, subspace lattice operations, determinants and commutant
//! solving.
//!
//! Subspaces are kept in reduced row-echelon form so that equality is a
//! syntactic check; the normalizer search performs a very large number
//! of such checks.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::numberfield::{FieldError, NumberField, NumberFieldElement, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square")]
    NotSquare,
    #[error("ambient dimension or field mismatch")]
    AmbientMismatch,
    #[error("operation requires rational entries")]
    NotRational,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Dense matrix with entries in a single number field. A degree-1
/// field makes this a rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: NumberField,
    entries: Vec<NumberFieldElement>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, field: &NumberField) -> Matrix {
        Matrix {
            rows,
            cols,
            field: field.clone(),
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: &NumberField) -> Matrix {
        let mut m = Matrix::zero(n, n, field);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn from_rows(field: &NumberField, rows: Vec<Vec<NumberFieldElement>>) -> Matrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            entries.extend(r);
        }
        Matrix {
            rows: nrows,
            cols: ncols,
            field: field.clone(),
            entries,
        }
    }

    /// Rational matrix from plain rational rows.
    pub fn from_rational_rows(rows: Vec<Vec<Rational>>) -> Matrix {
        let q = NumberField::rationals();
        let converted = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| q.from_rational(x)).collect())
            .collect();
        Matrix::from_rows(&q, converted)
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rational_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::numberfield::rint(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn at(&self, r: usize, c: usize) -> &NumberFieldElement {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut NumberFieldElement {
        &mut self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[NumberFieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.cols, self.rows, &self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows || self.field != other.field {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zero(self.rows, other.cols, &self.field);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.field.zero();
                for l in 0..self.cols {
                    if self.at(i, l).is_zero() || other.at(l, j).is_zero() {
                        continue;
                    }
                    acc = acc.add(&self.at(i, l).mul(other.at(l, j))?)?;
                }
                *out.at_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols || self.field != other.field {
            return Err(LinalgError::DimensionMismatch("sub".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.sub(b)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols || self.field != other.field {
            return Err(LinalgError::DimensionMismatch("add".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.add(b)?;
        }
        Ok(out)
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[NumberFieldElement]) -> Result<Vec<NumberFieldElement>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch("apply".into()));
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = self.field.zero();
            for j in 0..self.cols {
                if !self.at(i, j).is_zero() && !v[j].is_zero() {
                    acc = acc.add(&self.at(i, j).mul(&v[j])?)?;
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Exact determinant by fraction-free (Bareiss-style) elimination;
    /// the divisions are exact in any field, and over `Q` this controls
    /// coefficient blow-up.
    pub fn det(&self) -> Result<NumberFieldElement, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.field.one());
        }
        let mut a = self.clone();
        let mut sign = false;
        let mut prev = self.field.one();
        for k in 0..n - 1 {
            if a.at(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.at(i, k).is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            let tmp = a.at(k, j).clone();
                            *a.at_mut(k, j) = a.at(i, j).clone();
                            *a.at_mut(i, j) = tmp;
                        }
                        sign = !sign;
                    }
                    None => return Ok(self.field.zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a
                        .at(i, j)
                        .mul(a.at(k, k))?
                        .sub(&a.at(i, k).mul(a.at(k, j))?)?;
                    *a.at_mut(i, j) = num.div(&prev)?;
                }
            }
            prev = a.at(k, k).clone();
        }
        let d = a.at(n - 1, n - 1).clone();
        Ok(if sign { d.neg() } else { d })
    }

    /// Row-reduce in place to reduced row-echelon form.
    pub fn rref(&self) -> RrefResult {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let pivot_row = (row..m.rows).find(|&r| !m.at(r, col).is_zero());
            let pr = match pivot_row {
                Some(pr) => pr,
                None => continue,
            };
            if pr != row {
                for j in 0..m.cols {
                    let tmp = m.at(row, j).clone();
                    *m.at_mut(row, j) = m.at(pr, j).clone();
                    *m.at_mut(pr, j) = tmp;
                }
            }
            let inv = m.at(row, col).inverse().expect("pivot nonzero");
            for j in col..m.cols {
                *m.at_mut(row, j) = m.at(row, j).mul(&inv).expect("same field");
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for j in col..m.cols {
                        let t = m.at(row, j).mul(&factor).expect("same field");
                        *m.at_mut(r, j) = m.at(r, j).sub(&t).expect("same field");
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let rank = pivots.len();
        RrefResult {
            reduced: m,
            rank,
            pivots,
        }
    }

    /// Right kernel `{v : M v = 0}` as a subspace of the column space.
    pub fn kernel(&self) -> Subspace {
        let RrefResult {
            reduced, pivots, ..
        } = self.rref();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &p in &pivots {
                s[p] = true;
            }
            s
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !pivot_set[c]).collect();
        let mut basis_rows = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![self.field.zero(); self.cols];
            v[f] = self.field.one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = reduced.at(r, f).neg();
            }
            basis_rows.push(v);
        }
        let basis = Matrix::from_rows(&self.field, basis_rows);
        Subspace::from_generators(self.cols, &basis)
    }

    /// Entries as rationals; fails when some entry is non-constant.
    pub fn to_rational_rows(&self) -> Result<Vec<Vec<Rational>>, LinalgError> {
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                row.push(
                    self.at(i, j)
                        .as_rational()
                        .ok_or(LinalgError::NotRational)?
                        .clone(),
                );
            }
            out.push(row);
        }
        Ok(out)
    }

    /// Serialize as rows of rational strings ("p/q").
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).to_string()).collect())
            .collect()
    }

    /// Multiplicative order by repeated multiplication, up to `max`.
    pub fn order(&self, max: u32) -> Option<u32> {
        if self.rows != self.cols {
            return None;
        }
        let mut acc = self.clone();
        for m in 1..=max {
            if acc.is_identity() {
                return Some(m);
            }
            acc = acc.mul(self).ok()?;
        }
        None
    }
}

#[derive(Debug, Clone)]
pub struct RrefResult {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// A linear subspace of `F^k`, canonically represented by a reduced
/// row-echelon basis. Equality of subspaces is equality of bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Matrix,
    field: NumberField,
}

impl Subspace {
    /// Span of the rows of `gens` (rows are canonicalized; zero rows
    /// dropped).
    pub fn from_generators(ambient_dim: usize, gens: &Matrix) -> Subspace {
        assert!(gens.cols() == ambient_dim || gens.rows() == 0);
        let field = gens.field().clone();
        if gens.rows() == 0 {
            return Subspace {
                ambient_dim,
                basis: Matrix::zero(0, ambient_dim, &field),
                field,
            };
        }
        let RrefResult { reduced, rank, .. } = gens.rref();
        let rows = (0..rank).map(|r| reduced.row(r).to_vec()).collect();
        Subspace {
            ambient_dim,
            basis: Matrix::from_rows(&field, rows),
            field,
        }
    }

    pub fn from_rational_rows(ambient_dim: usize, rows: Vec<Vec<Rational>>) -> Subspace {
        if rows.is_empty() {
            return Subspace::zero(ambient_dim, &NumberField::rationals());
        }
        Subspace::from_generators(ambient_dim, &Matrix::from_rational_rows(rows))
    }

    pub fn zero(ambient_dim: usize, field: &NumberField) -> Subspace {
        Subspace {
            ambient_dim,
            basis: Matrix::zero(0, ambient_dim, field),
            field: field.clone(),
        }
    }

    pub fn full(ambient_dim: usize, field: &NumberField) -> Subspace {
        Subspace {
            ambient_dim,
            basis: Matrix::identity(ambient_dim, field),
            field: field.clone(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    /// Canonical (RREF) basis; rows are the basis vectors.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn contains_vector(&self, v: &[NumberFieldElement]) -> bool {
        self.reduce_vector(v).iter().all(|c| c.is_zero())
    }

    /// Residual of `v` after subtracting its projection onto the
    /// row-echelon basis (zero iff `v` lies in the subspace).
    pub fn reduce_vector(&self, v: &[NumberFieldElement]) -> Vec<NumberFieldElement> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut r: Vec<NumberFieldElement> = v.to_vec();
        for row in 0..self.basis.rows() {
            // pivot column = first nonzero entry of the basis row
            let pivot = (0..self.ambient_dim)
                .find(|&c| !self.basis.at(row, c).is_zero())
                .expect("basis rows nonzero");
            if r[pivot].is_zero() {
                continue;
            }
            let factor = r[pivot].clone(); // basis pivot is 1 in RREF
            for c in 0..self.ambient_dim {
                if !self.basis.at(row, c).is_zero() {
                    let t = self.basis.at(row, c).mul(&factor).expect("same field");
                    r[c] = r[c].sub(&t).expect("same field");
                }
            }
        }
        r
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the
    /// subspace.
    pub fn coordinates(&self, v: &[NumberFieldElement]) -> Option<Vec<NumberFieldElement>> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut r: Vec<NumberFieldElement> = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.rows());
        for row in 0..self.basis.rows() {
            let pivot = (0..self.ambient_dim)
                .find(|&c| !self.basis.at(row, c).is_zero())
                .expect("basis rows nonzero");
            let factor = r[pivot].clone();
            coords.push(factor.clone());
            if factor.is_zero() {
                continue;
            }
            for c in 0..self.ambient_dim {
                if !self.basis.at(row, c).is_zero() {
                    let t = self.basis.at(row, c).mul(&factor).expect("same field");
                    r[c] = r[c].sub(&t).expect("same field");
                }
            }
        }
        if r.iter().all(|c| c.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    fn check_compat(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient_dim != other.ambient_dim || self.field != other.field {
            return Err(LinalgError::AmbientMismatch);
        }
        Ok(())
    }

    pub fn equal(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_compat(other)?;
        Ok(self == other)
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_compat(other)?;
        Ok((0..other.basis.rows()).all(|r| self.contains_vector(other.basis.row(r))))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_compat(other)?;
        let mut rows: Vec<Vec<NumberFieldElement>> = Vec::new();
        for r in 0..self.basis.rows() {
            rows.push(self.basis.row(r).to_vec());
        }
        for r in 0..other.basis.rows() {
            rows.push(other.basis.row(r).to_vec());
        }
        if rows.is_empty() {
            return Ok(Subspace::zero(self.ambient_dim, &self.field));
        }
        Ok(Subspace::from_generators(
            self.ambient_dim,
            &Matrix::from_rows(&self.field, rows),
        ))
    }

    /// Dual constraints: a matrix whose right kernel is exactly this
    /// subspace (rows span the orthogonal complement under the
    /// standard bilinear form).
    pub fn dual_constraints(&self) -> Matrix {
        let ortho = self.basis.kernel();
        ortho.basis.clone()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_compat(other)?;
        let ca = self.dual_constraints();
        let cb = other.dual_constraints();
        let mut rows = Vec::new();
        for r in 0..ca.rows() {
            rows.push(ca.row(r).to_vec());
        }
        for r in 0..cb.rows() {
            rows.push(cb.row(r).to_vec());
        }
        if rows.is_empty() {
            return Ok(Subspace::full(self.ambient_dim, &self.field));
        }
        let stacked = Matrix::from_rows(&self.field, rows);
        Ok(stacked.kernel())
    }

    /// Rank of `B B^T` for the canonical rational basis `B`; equals
    /// `dim` exactly when the standard inner product restricted to the
    /// subspace is non-degenerate.
    pub fn gram_rank(&self) -> Result<usize, LinalgError> {
        if !self.field.is_rational() {
            return Err(LinalgError::NotRational);
        }
        let bt = self.basis.transpose();
        let gram = self.basis.mul(&bt)?;
        Ok(gram.rref().rank)
    }
}

/// Serialized subspace: a "basis"-tagged matrix of rational strings.
#[derive(Debug, Clone, Serialize)]
pub struct SubspaceRepr {
    pub basis: Vec<Vec<String>>,
    pub ambient_dim: usize,
}

impl From<&Subspace> for SubspaceRepr {
    fn from(s: &Subspace) -> SubspaceRepr {
        SubspaceRepr {
            basis: s.basis().to_string_rows(),
            ambient_dim: s.ambient_dim(),
        }
    }
}

/// Solve for the rational matrices commuting with every constraint:
/// `{M in Q^{d x d} : M C = C M for all C}`, returned as a subspace of
/// `Q^{d^2}` (row-major vectorized matrices). Field-valued constraint
/// entries are split over the `Q`-basis of the field into several
/// rational constraints.
pub fn solve_commutant(constraints: &[Matrix]) -> Result<Subspace, LinalgError> {
    let d = match constraints.first() {
        Some(c) => {
            if c.rows() != c.cols() {
                return Err(LinalgError::NotSquare);
            }
            c.rows()
        }
        None => return Err(LinalgError::DimensionMismatch("no constraints".into())),
    };
    for c in constraints {
        if c.rows() != d || c.cols() != d {
            return Err(LinalgError::DimensionMismatch("constraint sizes".into()));
        }
    }
    let q = NumberField::rationals();
    let mut eq_rows: Vec<Vec<Rational>> = Vec::new();
    for c in constraints {
        let deg = c.field().degree();
        // Equation (i,j): sum_l M[i][l] C[l][j] - C[i][l] M[l][j] = 0,
        // one rational row per field-basis coordinate t.
        for i in 0..d {
            for j in 0..d {
                let mut rows_t = vec![vec![Rational::zero(); d * d]; deg];
                for l in 0..d {
                    let clj = c.at(l, j);
                    let cil = c.at(i, l);
                    for t in 0..deg {
                        rows_t[t][i * d + l] += &clj.coeffs()[t];
                        rows_t[t][l * d + j] -= &cil.coeffs()[t];
                    }
                }
                for row in rows_t {
                    if row.iter().any(|x| !x.is_zero()) {
                        eq_rows.push(row);
                    }
                }
            }
        }
    }
    if eq_rows.is_empty() {
        return Ok(Subspace::full(d * d, &q));
    }
    Ok(Matrix::from_rational_rows(eq_rows).kernel())
}

/// Normalize a rational vector to a primitive integer vector (clear
/// denominators, divide by the gcd). Sign is the caller's business.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * &lcm / x.denom()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.iter().map(|x| x / &g).collect()
}
