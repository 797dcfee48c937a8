//! Finite permutation groups in `S_k`, their linear actions on
//! subspaces of `F^k`, subgroup closure, the normalizer-of-subspace
//! search, Young subgroups and kernels of actions.
//!
//! Groups store their full element list; at desk scale (`k <= 8`,
//! `|G| <= 8!`) plain enumeration with early pruning beats stabilizer
//! chains.

use std::collections::BTreeSet;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{LinalgError, Matrix, Subspace};
use crate::numberfield::NumberField;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group too large: closure exceeded cap {0}")]
    GroupTooLarge(usize),
    #[error("permutations act on different numbers of letters")]
    MixedDegrees,
    #[error("k = {k} too large for full S_k search (cap {cap}); supply a search subgroup")]
    FullSearchTooLarge { k: usize, cap: usize },
    #[error("partition parts sum to {sum}, expected {k}")]
    PartitionMismatch { sum: u64, k: u64 },
    #[error("group element does not preserve the subspace")]
    SubspaceNotPreserved,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A permutation of `{0, ..., k-1}`, stored as its image vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(k: usize) -> Perm {
        Perm {
            images: (0..k).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Option<Perm> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &i in &images {
            if i >= k || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm { images })
    }

    pub fn transposition(k: usize, i: usize, j: usize) -> Perm {
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(i, j);
        Perm { images }
    }

    pub fn from_cycle(k: usize, cycle: &[usize]) -> Perm {
        let mut images: Vec<usize> = (0..k).collect();
        for w in 0..cycle.len() {
            images[cycle[w]] = cycle[(w + 1) % cycle.len()];
        }
        Perm { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self.compose(other)` applies `other` first: `(self∘other)(i) =
    /// self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Permutation matrix `P` with `P e_i = e_{sigma(i)}`, so that `P`
    /// applied to a coordinate vector permutes coordinates by sigma.
    pub fn matrix(&self, field: &NumberField) -> Matrix {
        let k = self.degree();
        let mut m = Matrix::zero(k, k, field);
        for i in 0..k {
            *m.at_mut(self.images[i], i) = field.one();
        }
        m
    }

    /// Image of a vector: `(sigma . v)[sigma(i)] = v[i]`.
    pub fn permute_slice<T: Clone>(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        for (i, &j) in self.images.iter().enumerate() {
            out[j] = v[i].clone();
        }
        out
    }

    /// Cycle notation (zero-based), e.g. "(0 1)(2 3)"; "()" for the
    /// identity.
    pub fn cycle_string(&self) -> String {
        let k = self.degree();
        let mut seen = vec![false; k];
        let mut out = String::new();
        for start in 0..k {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut cur = start;
            let mut first = true;
            while !seen[cur] {
                seen[cur] = true;
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&cur.to_string());
                cur = self.images[cur];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    /// All `k!` permutations in lexicographic order of image vectors.
    pub fn all(k: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut images: Vec<usize> = (0..k).collect();
        loop {
            out.push(Perm {
                images: images.clone(),
            });
            if !next_permutation(&mut images) {
                break;
            }
        }
        out
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// A finite subgroup of `S_k` with its full, sorted element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    k: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PermGroup {
    pub fn trivial(k: usize) -> PermGroup {
        PermGroup {
            k,
            generators: Vec::new(),
            elements: vec![Perm::identity(k)],
        }
    }

    pub fn symmetric(k: usize) -> PermGroup {
        let mut gens = Vec::new();
        if k >= 2 {
            gens.push(Perm::transposition(k, 0, 1));
            gens.push(Perm::from_cycle(k, &(0..k).collect::<Vec<_>>()));
        }
        close_subgroup(&gens, usize::MAX).expect("S_k closure")
    }

    /// Assemble a group from an already-closed element set (sorted and
    /// deduplicated here; closure is the caller's responsibility and
    /// checked in debug builds).
    pub fn from_elements(k: usize, elements: Vec<Perm>, generators: Vec<Perm>) -> PermGroup {
        let set: BTreeSet<Perm> = elements.into_iter().collect();
        let elements: Vec<Perm> = set.into_iter().collect();
        debug_assert!(elements.iter().all(|p| p.degree() == k));
        debug_assert!(elements.binary_search(&Perm::identity(k)).is_ok());
        PermGroup {
            k,
            generators,
            elements,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.elements.iter().all(|p| other.contains(p))
    }

    /// Group-axiom check (closure under composition and inverse).
    /// Quadratic; intended for tests and debug assertions.
    pub fn verify_closure(&self) -> bool {
        self.contains(&Perm::identity(self.k))
            && self.elements.iter().all(|p| self.contains(&p.inverse()))
            && self
                .elements
                .iter()
                .all(|p| self.elements.iter().all(|q| self.contains(&p.compose(q))))
    }
}

/// Breadth-first (Dimino-style) closure of a generating set.
pub fn close_subgroup(gens: &[Perm], cap: usize) -> Result<PermGroup, GroupError> {
    let k = match gens.first() {
        Some(g) => g.degree(),
        // No generators carry no degree information; use
        // `close_subgroup_in` when the trivial group is meant.
        None => return Err(GroupError::MixedDegrees),
    };
    if gens.iter().any(|g| g.degree() != k) {
        return Err(GroupError::MixedDegrees);
    }
    let mut set: BTreeSet<Perm> = BTreeSet::new();
    set.insert(Perm::identity(k));
    let mut frontier: Vec<Perm> = vec![Perm::identity(k)];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = g.compose(&p);
            if !set.contains(&q) {
                if set.len() + 1 > cap {
                    return Err(GroupError::GroupTooLarge(cap));
                }
                set.insert(q.clone());
                frontier.push(q);
            }
        }
    }
    Ok(PermGroup {
        k,
        generators: gens.to_vec(),
        elements: set.into_iter().collect(),
    })
}

/// Closure for an explicit degree (handles the empty generating set).
pub fn close_subgroup_in(k: usize, gens: &[Perm], cap: usize) -> Result<PermGroup, GroupError> {
    if gens.is_empty() {
        return Ok(PermGroup::trivial(k));
    }
    if gens.iter().any(|g| g.degree() != k) {
        return Err(GroupError::MixedDegrees);
    }
    close_subgroup(gens, cap)
}

/// Where the normalizer search enumerates candidates.
pub enum SearchSpace<'a> {
    /// All of `S_k`; requires `k <=` the configured cap.
    FullSymmetric { cap_k: usize },
    /// Only the elements of a supplied subgroup.
    Within(&'a PermGroup),
}

/// All permutations (in the search space) whose permutation matrix
/// maps `u` onto itself.
pub fn normalizer_of_subspace(
    u: &Subspace,
    search: SearchSpace<'_>,
) -> Result<PermGroup, GroupError> {
    let k = u.ambient_dim();
    let candidates: Vec<Perm> = match search {
        SearchSpace::FullSymmetric { cap_k } => {
            if k > cap_k {
                return Err(GroupError::FullSearchTooLarge { k, cap: cap_k });
            }
            Perm::all(k)
        }
        SearchSpace::Within(g) => {
            if g.k() != k {
                return Err(GroupError::MixedDegrees);
            }
            g.elements().to_vec()
        }
    };
    let preserves = |p: &Perm| -> bool {
        // Early pruning: reject as soon as one basis row's image
        // leaves u. P u ⊆ u with P invertible implies P u = u.
        let b = u.basis();
        (0..b.rows()).all(|r| {
            let image = p.permute_slice(b.row(r));
            u.contains_vector(&image)
        })
    };
    #[cfg(feature = "parallel")]
    let found: Vec<Perm> = candidates.into_par_iter().filter(preserves).collect();
    #[cfg(not(feature = "parallel"))]
    let found: Vec<Perm> = candidates.into_iter().filter(preserves).collect();
    let gens = found.clone();
    Ok(PermGroup::from_elements(k, found, gens))
}

/// A finite group of invertible matrices over one field, fully
/// enumerated, optionally labeled by the permutations it came from.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    field: NumberField,
    dim: usize,
    elements: Vec<Matrix>,
    /// For each matrix, one source permutation (when the group was
    /// induced from a permutation action).
    labels: Option<Vec<Perm>>,
}

impl MatrixGroup {
    pub fn trivial(dim: usize, field: &NumberField) -> MatrixGroup {
        MatrixGroup {
            field: field.clone(),
            dim,
            elements: vec![Matrix::identity(dim, field)],
            labels: None,
        }
    }

    pub fn from_elements(
        field: &NumberField,
        dim: usize,
        elements: Vec<Matrix>,
        labels: Option<Vec<Perm>>,
    ) -> MatrixGroup {
        MatrixGroup {
            field: field.clone(),
            dim,
            elements,
            labels,
        }
    }

    /// BFS closure of a set of invertible matrices.
    pub fn close(
        field: &NumberField,
        dim: usize,
        gens: &[Matrix],
        cap: usize,
    ) -> Result<MatrixGroup, GroupError> {
        let id = Matrix::identity(dim, field);
        let mut elements: Vec<Matrix> = vec![id.clone()];
        let mut frontier: Vec<Matrix> = vec![id];
        while let Some(m) = frontier.pop() {
            for g in gens {
                let p = g.mul(&m)?;
                if !elements.contains(&p) {
                    if elements.len() + 1 > cap {
                        return Err(GroupError::GroupTooLarge(cap));
                    }
                    elements.push(p.clone());
                    frontier.push(p);
                }
            }
        }
        Ok(MatrixGroup {
            field: field.clone(),
            dim,
            elements,
            labels: None,
        })
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn labels(&self) -> Option<&[Perm]> {
        self.labels.as_deref()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.elements.contains(m)
    }
}

/// Restrict a permutation group to its induced linear action on an
/// invariant subspace. Returns the induced matrix group (in the
/// canonical basis of `u`) and the kernel of the action.
pub fn restrict_action(
    g: &PermGroup,
    u: &Subspace,
) -> Result<(MatrixGroup, PermGroup), GroupError> {
    let d = u.dim();
    let b = u.basis();
    let mut matrices: Vec<Matrix> = Vec::new();
    let mut labels: Vec<Perm> = Vec::new();
    let mut kernel: Vec<Perm> = Vec::new();
    for p in g.elements() {
        // Induced matrix X with X . coords(v) = coords(P v) for v in u:
        // row i of X = coordinates of the image of basis row i.
        let mut rows = Vec::with_capacity(d);
        for r in 0..d {
            let image = p.permute_slice(b.row(r));
            let coords = u
                .coordinates(&image)
                .ok_or(GroupError::SubspaceNotPreserved)?;
            rows.push(coords);
        }
        let x = Matrix::from_rows(u.field(), rows);
        if x.is_identity() {
            kernel.push(p.clone());
        }
        if !matrices.contains(&x) {
            matrices.push(x);
            labels.push(p.clone());
        }
    }
    let mg = MatrixGroup {
        field: u.field().clone(),
        dim: d,
        elements: matrices,
        labels: Some(labels),
    };
    let kernel_gens = kernel.clone();
    Ok((mg, PermGroup::from_elements(g.k(), kernel, kernel_gens)))
}

/// Young subgroup `S_{a_1} x ... x S_{a_l}` on consecutive blocks.
pub fn young_subgroup(parts: &[u64], k: usize, cap: usize) -> Result<PermGroup, GroupError> {
    let sum: u64 = parts.iter().sum();
    if sum != k as u64 {
        return Err(GroupError::PartitionMismatch { sum, k: k as u64 });
    }
    let mut gens = Vec::new();
    let mut offset = 0usize;
    for &a in parts {
        let a = a as usize;
        for i in 0..a.saturating_sub(1) {
            gens.push(Perm::transposition(k, offset + i, offset + i + 1));
        }
        offset += a;
    }
    close_subgroup_in(k, &gens, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn q() -> NumberField {
        NumberField::rationals()
    }

    #[test]
    fn closure_examples() {
        // Empty generating set: trivial group.
        assert_eq!(close_subgroup_in(3, &[], 10).unwrap().order(), 1);
        // Two adjacent transpositions generate S_3 — oracle: the
        // closure enumerates all 6 products.
        let g = close_subgroup(
            &[Perm::transposition(3, 0, 1), Perm::transposition(3, 1, 2)],
            100,
        )
        .unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.verify_closure());
        // Cyclic group on 4 letters.
        let c = close_subgroup(&[Perm::from_cycle(4, &[0, 1, 2, 3])], 100).unwrap();
        assert_eq!(c.order(), 4);
    }

    #[test]
    fn closure_cap() {
        let gens = [Perm::transposition(5, 0, 1), Perm::from_cycle(5, &[0, 1, 2, 3, 4])];
        assert!(matches!(
            close_subgroup(&gens, 10),
            Err(GroupError::GroupTooLarge(10))
        ));
    }

    #[test]
    fn normalizer_of_diagonal_is_full_symmetric() {
        for k in 2..=6 {
            let u = Subspace::from_generators(
                k,
                &Matrix::from_rational_rows(vec![vec![crate::numberfield::rint(1); k]]),
            );
            let g = normalizer_of_subspace(&u, SearchSpace::FullSymmetric { cap_k: 8 }).unwrap();
            assert_eq!(g.order(), (1..=k).product::<usize>(), "k = {k}");
        }
    }

    #[test]
    fn normalizer_of_axis_line() {
        let u = Subspace::from_generators(3, &Matrix::from_int_rows(&[&[1, 0, 0]]));
        let g = normalizer_of_subspace(&u, SearchSpace::FullSymmetric { cap_k: 8 }).unwrap();
        // Oracle: brute force over all 6 permutations keeps those
        // fixing letter 0: id and (1 2).
        assert_eq!(g.order(), 2);
        assert!(g.contains(&Perm::transposition(3, 1, 2)));
        assert!(g.verify_closure());
    }

    #[test]
    fn normalizer_of_two_difference_lines() {
        let u = Subspace::from_generators(4, &Matrix::from_int_rows(&[&[1, -1, 0, 0], &[0, 0, 1, -1]]));
        let g = normalizer_of_subspace(&u, SearchSpace::FullSymmetric { cap_k: 8 }).unwrap();
        // Oracle: brute force over all 24 permutations gives the
        // dihedral group of order 8.
        assert_eq!(g.order(), 8);
        assert!(g.contains(&Perm::transposition(4, 0, 1)));
        assert!(g.contains(&Perm::transposition(4, 2, 3)));
        assert!(g.contains(&Perm::from_images(vec![2, 3, 0, 1]).unwrap()));
        assert!(g.verify_closure());
    }

    #[test]
    fn full_search_cap_enforced() {
        let u = Subspace::full(9, &q());
        assert!(matches!(
            normalizer_of_subspace(&u, SearchSpace::FullSymmetric { cap_k: 8 }),
            Err(GroupError::FullSearchTooLarge { .. })
        ));
    }

    #[test]
    fn restrict_to_diagonal_kills_everything() {
        let u = Subspace::from_generators(2, &Matrix::from_int_rows(&[&[1, 1]]));
        let s2 = PermGroup::symmetric(2);
        let (mg, ker) = restrict_action(&s2, &u).unwrap();
        assert_eq!(mg.order(), 1);
        assert_eq!(ker.order(), 2);
    }

    #[test]
    fn restrict_to_antidiagonal_gives_sign() {
        let u = Subspace::from_generators(2, &Matrix::from_int_rows(&[&[1, -1]]));
        let s2 = PermGroup::symmetric(2);
        let (mg, ker) = restrict_action(&s2, &u).unwrap();
        assert_eq!(mg.order(), 2);
        assert_eq!(ker.order(), 1);
        // The nontrivial induced matrix is -1 on the line.
        let nontriv = mg.elements().iter().find(|m| !m.is_identity()).unwrap();
        assert_eq!(*nontriv.at(0, 0), q().from_int(-1));
    }

    #[test]
    fn restrict_s3_to_sum_zero_plane_is_faithful() {
        let u = Subspace::from_generators(3, &Matrix::from_int_rows(&[&[1, -1, 0], &[0, 1, -1]]));
        let s3 = PermGroup::symmetric(3);
        let (mg, ker) = restrict_action(&s3, &u).unwrap();
        // Oracle: all six induced matrices are distinct.
        assert_eq!(mg.order(), 6);
        assert_eq!(ker.order(), 1);
        assert_eq!(mg.order() * ker.order(), s3.order());
    }

    #[test]
    fn restrict_rejects_non_invariant_subspace() {
        let u = Subspace::from_generators(3, &Matrix::from_int_rows(&[&[1, 0, 0]]));
        let s3 = PermGroup::symmetric(3);
        assert!(matches!(
            restrict_action(&s3, &u),
            Err(GroupError::SubspaceNotPreserved)
        ));
    }

    #[test]
    fn kernel_of_restriction_is_normal() {
        let u = Subspace::from_generators(4, &Matrix::from_int_rows(&[&[1, 1, 0, 0]]));
        let g = normalizer_of_subspace(&u, SearchSpace::FullSymmetric { cap_k: 8 }).unwrap();
        let (_, ker) = restrict_action(&g, &u).unwrap();
        for p in g.elements() {
            for n in ker.elements() {
                let conj = p.compose(n).compose(&p.inverse());
                assert!(ker.contains(&conj));
            }
        }
    }

    #[test]
    fn young_subgroup_orders() {
        assert_eq!(young_subgroup(&[3], 3, 1000).unwrap().order(), 6);
        assert_eq!(young_subgroup(&[1, 1, 1], 3, 1000).unwrap().order(), 1);
        assert_eq!(young_subgroup(&[2, 1], 3, 1000).unwrap().order(), 2);
        assert_eq!(young_subgroup(&[3, 2], 5, 1000).unwrap().order(), 12);
        assert!(matches!(
            young_subgroup(&[2, 2], 3, 1000),
            Err(GroupError::PartitionMismatch { .. })
        ));
    }

    #[test]
    fn cycle_string_rendering() {
        assert_eq!(Perm::identity(3).cycle_string(), "()");
        assert_eq!(Perm::transposition(4, 0, 1).cycle_string(), "(0 1)");
        assert_eq!(
            Perm::from_images(vec![1, 0, 3, 2]).unwrap().cycle_string(),
            "(0 1)(2 3)"
        );
    }

    #[test]
    fn matrix_of_cycle_acts_correctly() {
        let c = Perm::from_cycle(3, &[0, 1, 2]);
        let m = c.matrix(&q());
        // P e_0 = e_1
        assert!(m.at(1, 0).is_one());
        let v = vec![q().from_int(5), q().from_int(7), q().from_int(9)];
        let permuted = c.permute_slice(&v);
        assert_eq!(m.apply(&v).unwrap(), permuted);
    }
}
