//! Reflection analysis of a finite matrix group: pseudo-reflection
//! detection, the reflection subgroup, the Chevalley–Shephard–Todd
//! smoothness verdict, real-reflection verification, root extraction
//! and Coxeter/Dynkin classification with a crystallographic (Weyl)
//! flag.
//!
//! A pseudo-reflection is a finite-order automorphism whose fixed
//! space has codimension exactly 1; its nontrivial eigenvalue is
//! `det(g)`, which is exact — no general eigenvalue machinery is ever
//! used.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::linalg::{primitive_integer_vector, LinalgError, Matrix, Subspace};
use crate::numberfield::{NumberFieldElement, Rational};
use crate::permaction::{GroupError, MatrixGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReflectError {
    #[error("element is not of finite order within bound {0}")]
    NotFiniteOrder(u32),
    #[error("group contains non-real reflections")]
    NonRealReflections,
    #[error("group is not generated by reflections")]
    NotReflectionGenerated,
    #[error("inner product is not positive definite")]
    NotPositiveDefinite,
    #[error("Coxeter graph does not match any finite type: {0}")]
    CatalogMismatch(String),
    #[error("group does not preserve the given subspace")]
    InvarianceViolated,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A detected pseudo-reflection.
#[derive(Debug, Clone)]
pub struct ReflectionRecord {
    pub element: Matrix,
    pub fixed_space: Subspace,
    pub order: u32,
    /// The nontrivial eigenvalue, equal to `det(element)`.
    pub eigenvalue: NumberFieldElement,
    pub is_real: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementClass {
    Identity,
    PseudoReflection(ReflectionRecord),
    Other,
}

impl PartialEq for ReflectionRecord {
    fn eq(&self, other: &Self) -> bool {
        self.element == other.element
    }
}

/// `V^g = ker(g - id)`.
pub fn fixed_space(g: &Matrix) -> Result<Subspace, ReflectError> {
    let id = Matrix::identity(g.rows(), g.field());
    Ok(g.sub(&id)?.kernel())
}

pub fn classify_element(g: &Matrix, max_order: u32) -> Result<ElementClass, ReflectError> {
    if g.is_identity() {
        return Ok(ElementClass::Identity);
    }
    let fix = fixed_space(g)?;
    let codim = g.rows() - fix.dim();
    if codim != 1 {
        return Ok(ElementClass::Other);
    }
    let order = g.order(max_order).ok_or(ReflectError::NotFiniteOrder(max_order))?;
    let eigenvalue = g.det()?;
    let is_real = order == 2;
    debug_assert!(!eigenvalue.is_one());
    debug_assert!(eigenvalue.pow(order as u64).map(|e| e.is_one()).unwrap_or(false));
    Ok(ElementClass::PseudoReflection(ReflectionRecord {
        element: g.clone(),
        fixed_space: fix,
        order,
        eigenvalue,
        is_real,
    }))
}

/// All pseudo-reflections of a finite matrix group, plus the subgroup
/// they generate.
pub fn reflection_subgroup(
    g: &MatrixGroup,
    max_order: u32,
) -> Result<(Vec<ReflectionRecord>, MatrixGroup), ReflectError> {
    #[cfg(feature = "parallel")]
    let classes: Vec<ElementClass> = g
        .elements()
        .par_iter()
        .map(|m| classify_element(m, max_order))
        .collect::<Result<_, _>>()?;
    #[cfg(not(feature = "parallel"))]
    let classes: Vec<ElementClass> = g
        .elements()
        .iter()
        .map(|m| classify_element(m, max_order))
        .collect::<Result<_, _>>()?;
    let refls: Vec<ReflectionRecord> = classes
        .into_iter()
        .filter_map(|c| match c {
            ElementClass::PseudoReflection(r) => Some(r),
            _ => None,
        })
        .collect();
    let gens: Vec<Matrix> = refls.iter().map(|r| r.element.clone()).collect();
    let generated = if gens.is_empty() {
        MatrixGroup::trivial(g.dim(), g.field())
    } else {
        MatrixGroup::close(g.field(), g.dim(), &gens, g.order() + 1)?
    };
    Ok((refls, generated))
}

/// Chevalley–Shephard–Todd verdict for the quotient by `g`.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothVerdict {
    Smooth,
    /// The quotient is singular; the witness is an element of the
    /// group outside its reflection subgroup.
    Singular { witness: Matrix },
}

pub fn cst_smoothness(g: &MatrixGroup, max_order: u32) -> Result<SmoothVerdict, ReflectError> {
    let (_, generated) = reflection_subgroup(g, max_order)?;
    if generated.order() == g.order() {
        return Ok(SmoothVerdict::Smooth);
    }
    let witness = g
        .elements()
        .iter()
        .find(|m| !generated.contains(m))
        .expect("proper subgroup leaves a witness")
        .clone();
    Ok(SmoothVerdict::Singular { witness })
}

pub fn all_reflections_real(g: &MatrixGroup, max_order: u32) -> Result<bool, ReflectError> {
    let (refls, _) = reflection_subgroup(g, max_order)?;
    Ok(refls.iter().all(|r| r.is_real))
}

// ---------------------------------------------------------------------
// Coxeter classification
// ---------------------------------------------------------------------

/// Finite Coxeter types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "rank")]
pub enum CoxeterType {
    A(usize),
    /// Reported for both B and C; the Coxeter matrix cannot tell them
    /// apart.
    B(usize),
    D(usize),
    E6,
    E7,
    E8,
    F4,
    G2,
    H3,
    H4,
    I2(u32),
}

impl CoxeterType {
    pub fn rank(&self) -> usize {
        match self {
            CoxeterType::A(n) | CoxeterType::B(n) | CoxeterType::D(n) => *n,
            CoxeterType::E6 => 6,
            CoxeterType::E7 => 7,
            CoxeterType::E8 => 8,
            CoxeterType::F4 => 4,
            CoxeterType::G2 | CoxeterType::I2(_) => 2,
            CoxeterType::H3 => 3,
            CoxeterType::H4 => 4,
        }
    }

    /// Order of the associated finite reflection group.
    pub fn group_order(&self) -> u128 {
        fn fact(n: usize) -> u128 {
            (1..=n as u128).product()
        }
        match self {
            CoxeterType::A(n) => fact(n + 1),
            CoxeterType::B(n) => (1u128 << n) * fact(*n),
            CoxeterType::D(n) => (1u128 << (n - 1)) * fact(*n),
            CoxeterType::E6 => 51_840,
            CoxeterType::E7 => 2_903_040,
            CoxeterType::E8 => 696_729_600,
            CoxeterType::F4 => 1_152,
            CoxeterType::G2 => 12,
            CoxeterType::H3 => 120,
            CoxeterType::H4 => 14_400,
            CoxeterType::I2(m) => 2 * *m as u128,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CoxeterType::A(n) => format!("A_{n}"),
            CoxeterType::B(n) => format!("B_{n} (=C_{n} as Coxeter type)"),
            CoxeterType::D(n) => format!("D_{n}"),
            CoxeterType::E6 => "E_6".to_string(),
            CoxeterType::E7 => "E_7".to_string(),
            CoxeterType::E8 => "E_8".to_string(),
            CoxeterType::F4 => "F_4".to_string(),
            CoxeterType::G2 => "G_2".to_string(),
            CoxeterType::H3 => "H_3".to_string(),
            CoxeterType::H4 => "H_4".to_string(),
            CoxeterType::I2(m) => format!("I_2({m})"),
        }
    }
}

/// One connected component of the Coxeter graph of a real reflection
/// group.
#[derive(Debug, Clone)]
pub struct CoxeterComponent {
    /// Primitive integer simple roots, in ambient (acted-space)
    /// coordinates.
    pub simple_roots: Vec<Vec<BigInt>>,
    /// Orders `m_ij` of the pairwise products of simple reflections.
    pub coxeter_matrix: Vec<Vec<u32>>,
    pub coxeter_type: CoxeterType,
    pub crystallographic: bool,
}

fn is_crystallographic(m: &[Vec<u32>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, &mij)| i == j || matches!(mij, 2 | 3 | 4 | 6))
    })
}

/// Positive-definiteness by leading principal minors.
fn check_positive_definite(gram: &Matrix) -> Result<(), ReflectError> {
    let n = gram.rows();
    for s in 1..=n {
        let mut rows = Vec::with_capacity(s);
        for i in 0..s {
            rows.push(gram.row(i)[..s].to_vec());
        }
        let minor = Matrix::from_rows(gram.field(), rows);
        let d = minor.det()?;
        let pos = d
            .as_rational()
            .map(|r| r.is_positive())
            .unwrap_or(false);
        if !pos {
            return Err(ReflectError::NotPositiveDefinite);
        }
    }
    Ok(())
}

/// Deterministic positivity functional: powers of a large base, with
/// lexicographic fallback on the (measure-zero) ties.
fn root_is_positive(root: &[BigInt]) -> bool {
    let base = BigInt::from(1_000_003);
    let mut acc = BigInt::zero();
    let mut pow = BigInt::one();
    for c in root {
        acc += c * &pow;
        pow *= &base;
    }
    if !acc.is_zero() {
        return acc.is_positive();
    }
    for c in root {
        if !c.is_zero() {
            return c.is_positive();
        }
    }
    false
}

/// Does `alpha` lie in the cone spanned by `beta` and `gamma`?
/// Solves `s beta + t gamma = alpha` exactly and checks `s, t >= 0`.
/// Robust against per-root rescaling (roots are stored as primitive
/// integer vectors, not at their geometric lengths).
fn in_cone_of_two(alpha: &[BigInt], beta: &[BigInt], gamma: &[BigInt]) -> bool {
    let d = alpha.len();
    let to_rat = |x: &BigInt| Rational::from_integer(x.clone());
    for i in 0..d {
        for j in i + 1..d {
            let det = &beta[i] * &gamma[j] - &beta[j] * &gamma[i];
            if det.is_zero() {
                continue;
            }
            let det = to_rat(&det);
            let s = (to_rat(&(&alpha[i] * &gamma[j] - &alpha[j] * &gamma[i]))) / det.clone();
            let t = (to_rat(&(&beta[i] * &alpha[j] - &beta[j] * &alpha[i]))) / det;
            if s.is_negative() || t.is_negative() {
                return false;
            }
            // Verify the remaining coordinates.
            return (0..d).all(|c| {
                s.clone() * to_rat(&beta[c]) + t.clone() * to_rat(&gamma[c]) == to_rat(&alpha[c])
            });
        }
    }
    false // beta and gamma are collinear
}

/// Classify a real reflection group acting on `Q^d` into its product
/// of finite Coxeter components.
///
/// The inner product defaults to the standard one (which is invariant
/// for groups induced from permutation actions, since permutation
/// matrices are orthogonal); a caller-supplied Gram matrix is accepted
/// for other inputs and checked positive definite.
pub fn coxeter_classify(
    g: &MatrixGroup,
    inner_product: Option<&Matrix>,
    max_order: u32,
) -> Result<Vec<CoxeterComponent>, ReflectError> {
    if g.order() == 1 {
        return Ok(Vec::new());
    }
    if let Some(gram) = inner_product {
        check_positive_definite(gram)?;
    }
    let (refls, generated) = reflection_subgroup(g, max_order)?;
    if refls.iter().any(|r| !r.is_real) {
        return Err(ReflectError::NonRealReflections);
    }
    if generated.order() != g.order() {
        return Err(ReflectError::NotReflectionGenerated);
    }

    // One root line per reflection: the (-1)-eigenline ker(g + id),
    // normalized to a primitive integer vector with positive sign.
    let mut roots: Vec<Vec<BigInt>> = Vec::with_capacity(refls.len());
    let mut root_refl: Vec<&ReflectionRecord> = Vec::with_capacity(refls.len());
    for r in &refls {
        let id = Matrix::identity(g.dim(), g.field());
        let eigenline = r.element.add(&id)?.kernel();
        debug_assert_eq!(eigenline.dim(), 1);
        let row: Vec<Rational> = eigenline
            .basis()
            .row(0)
            .iter()
            .map(|e| e.as_rational().cloned().ok_or(LinalgError::NotRational))
            .collect::<Result<_, _>>()?;
        let mut prim = primitive_integer_vector(&row);
        if !root_is_positive(&prim) {
            for c in prim.iter_mut() {
                *c = -c.clone();
            }
        }
        roots.push(prim);
        root_refl.push(r);
    }

    // Simple roots: positive roots not expressible as a sum of two
    // positive roots. Stored roots are positive primitive
    // representatives, so the test is phrased as cone membership.
    let simple_idx: Vec<usize> = (0..roots.len())
        .filter(|&i| {
            !(0..roots.len()).any(|a| {
                a != i
                    && (a + 1..roots.len())
                        .any(|b| b != i && in_cone_of_two(&roots[i], &roots[a], &roots[b]))
            })
        })
        .collect();

    let n = simple_idx.len();
    let mut coxeter = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                coxeter[i][j] = 1;
            } else {
                let prod = root_refl[simple_idx[i]]
                    .element
                    .mul(&root_refl[simple_idx[j]].element)?;
                coxeter[i][j] = prod
                    .order(max_order)
                    .ok_or(ReflectError::NotFiniteOrder(max_order))?;
            }
        }
    }

    // Connected components of the Coxeter graph (edges where m_ij >= 3).
    let mut comp = vec![usize::MAX; n];
    let mut ncomp = 0usize;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = ncomp;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if comp[w] == usize::MAX && coxeter[v][w] >= 3 {
                    comp[w] = ncomp;
                    stack.push(w);
                }
            }
        }
        ncomp += 1;
    }

    let mut components = Vec::with_capacity(ncomp);
    for c in 0..ncomp {
        let idx: Vec<usize> = (0..n).filter(|&i| comp[i] == c).collect();
        let m: Vec<Vec<u32>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| coxeter[i][j]).collect())
            .collect();
        let coxeter_type = identify_type(&m)?;
        let crystallographic = is_crystallographic(&m);
        components.push(CoxeterComponent {
            simple_roots: idx.iter().map(|&i| roots[simple_idx[i]].clone()).collect(),
            coxeter_matrix: m,
            coxeter_type,
            crystallographic,
        });
    }
    components.sort_by(|a, b| {
        a.coxeter_type
            .label()
            .cmp(&b.coxeter_type.label())
            .then(a.simple_roots.cmp(&b.simple_roots))
    });
    Ok(components)
}

/// Match a connected Coxeter matrix against the finite catalog, up to
/// simultaneous permutation of the simple roots.
fn identify_type(m: &[Vec<u32>]) -> Result<CoxeterType, ReflectError> {
    let n = m.len();
    let mismatch = |msg: &str| ReflectError::CatalogMismatch(format!("{msg} (rank {n})"));
    if n == 0 {
        return Err(mismatch("empty component"));
    }
    if n == 1 {
        return Ok(CoxeterType::A(1));
    }
    if n == 2 {
        return Ok(match m[0][1] {
            3 => CoxeterType::A(2),
            4 => CoxeterType::B(2),
            6 => CoxeterType::G2,
            mij if mij >= 5 => CoxeterType::I2(mij),
            _ => return Err(mismatch("rank-2 label below 3")),
        });
    }
    // Edges of the Coxeter graph with their labels.
    let mut edges: Vec<(usize, usize, u32)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if m[i][j] >= 3 {
                edges.push((i, j, m[i][j]));
            }
        }
    }
    // A connected finite-type graph is a tree.
    if edges.len() != n - 1 {
        return Err(mismatch("graph has a cycle"));
    }
    let mut degree = vec![0usize; n];
    for &(i, j, _) in &edges {
        degree[i] += 1;
        degree[j] += 1;
    }
    let branch_nodes: Vec<usize> = (0..n).filter(|&i| degree[i] >= 3).collect();
    if branch_nodes.iter().any(|&i| degree[i] > 3) || branch_nodes.len() > 1 {
        return Err(mismatch("too much branching"));
    }
    let labelled: Vec<&(usize, usize, u32)> = edges.iter().filter(|&&(_, _, l)| l > 3).collect();

    if branch_nodes.is_empty() {
        // A path. Order the nodes along it.
        let path = path_order(n, &edges).ok_or_else(|| mismatch("not a path"))?;
        let labels: Vec<u32> = path
            .windows(2)
            .map(|w| m[w[0]][w[1]])
            .collect();
        let big: Vec<(usize, u32)> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 3)
            .map(|(i, &l)| (i, l))
            .collect();
        return match big.as_slice() {
            [] => Ok(CoxeterType::A(n)),
            [(pos, 4)] if *pos == 0 || *pos == n - 2 => Ok(CoxeterType::B(n)),
            [(pos, 4)] if n == 4 && *pos == 1 => Ok(CoxeterType::F4),
            [(pos, 5)] if n == 3 && (*pos == 0 || *pos == 1) => Ok(CoxeterType::H3),
            [(pos, 5)] if n == 4 && (*pos == 0 || *pos == 2) => Ok(CoxeterType::H4),
            _ => Err(mismatch("path labels match no finite type")),
        };
    }

    // One trivalent node, all labels 3: D_n or E_6/7/8.
    if !labelled.is_empty() {
        return Err(mismatch("branching with labelled edge"));
    }
    let center = branch_nodes[0];
    let mut arms: Vec<usize> = Vec::new();
    let neighbors: Vec<usize> = (0..n).filter(|&j| j != center && m[center][j] >= 3).collect();
    for start in neighbors {
        let mut len = 1usize;
        let mut prev = center;
        let mut cur = start;
        loop {
            let next = (0..n).find(|&j| j != prev && j != cur && m[cur][j] >= 3);
            match next {
                Some(nx) => {
                    prev = cur;
                    cur = nx;
                    len += 1;
                }
                None => break,
            }
        }
        arms.push(len);
    }
    arms.sort_unstable();
    match arms.as_slice() {
        [1, 1, _] => Ok(CoxeterType::D(n)),
        [1, 2, 2] => Ok(CoxeterType::E6),
        [1, 2, 3] => Ok(CoxeterType::E7),
        [1, 2, 4] => Ok(CoxeterType::E8),
        _ => Err(mismatch("branch arms match no finite type")),
    }
}

/// Order the nodes of a path graph from one end to the other.
fn path_order(n: usize, edges: &[(usize, usize, u32)]) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j, _) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let start = (0..n).find(|&i| adj[i].len() == 1)?;
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < n {
        let next = *adj[cur].iter().find(|&&x| x != prev)?;
        order.push(next);
        prev = cur;
        cur = next;
    }
    Some(order)
}

// ---------------------------------------------------------------------
// Equivariant maps and the doubled module
// ---------------------------------------------------------------------

/// Dimension of the space of `G`-equivariant linear maps `a -> b`,
/// where `g` acts on the common ambient space and preserves both.
pub fn hom_g_dimension(
    g: &MatrixGroup,
    a: &Subspace,
    b: &Subspace,
) -> Result<usize, ReflectError> {
    let da = a.dim();
    let db = b.dim();
    // Induced matrices of each group element on a and on b.
    let induced = |u: &Subspace, m: &Matrix| -> Result<Matrix, ReflectError> {
        let mut rows = Vec::with_capacity(u.dim());
        for r in 0..u.dim() {
            let image = m.apply(u.basis().row(r))?;
            let coords = u
                .coordinates(&image)
                .ok_or(ReflectError::InvarianceViolated)?;
            rows.push(coords);
        }
        Ok(Matrix::from_rows(u.field(), rows))
    };
    // Unknown M (db x da) with M R_a(g) = R_b(g) M for all g; split
    // field entries over the Q-basis as in the commutant solver.
    let deg = g.field().degree();
    let mut eq_rows: Vec<Vec<Rational>> = Vec::new();
    for m in g.elements() {
        let ra = induced(a, m)?; // acts on row-coordinate vectors: coords' = coords * Ra
        let rb = induced(b, m)?;
        // With row-vector convention x -> x Ra on a and y -> y Rb on b,
        // equivariance of the map M (da x db, x -> x M) reads
        // Ra M = M Rb, i.e. sum_l Ra[i][l] M[l][j] - M[i][l] Rb[l][j] = 0.
        for i in 0..da {
            for j in 0..db {
                let mut rows_t = vec![vec![Rational::zero(); da * db]; deg];
                for l in 0..da.max(db) {
                    if l < da {
                        let c = ra.at(i, l);
                        for t in 0..deg {
                            rows_t[t][l * db + j] += &c.coeffs()[t];
                        }
                    }
                    if l < db {
                        let c = rb.at(l, j);
                        for t in 0..deg {
                            rows_t[t][i * db + l] -= &c.coeffs()[t];
                        }
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
        return Ok(da * db);
    }
    Ok(Matrix::from_rational_rows(eq_rows).kernel().dim())
}

/// Bookkeeping for the doubled module `V = U ⊕ U` (the rational model
/// of `V = W ⊗ U` with the group acting trivially on the 2-dimensional
/// factor `W`). The certificate is the identity intertwiner between
/// the two copies.
#[derive(Debug, Clone)]
pub struct DoubledModule {
    pub component: Subspace,
    pub copies: usize,
    pub total_dim: usize,
    pub certificate: Matrix,
}

pub fn tensor_model(u: &Subspace) -> DoubledModule {
    DoubledModule {
        component: u.clone(),
        copies: 2,
        total_dim: 2 * u.dim(),
        certificate: Matrix::identity(u.dim(), u.field()),
    }
}
