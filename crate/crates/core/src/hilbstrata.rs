//! Combinatorics of Hilbert schemes of points on a surface:
//! partitions, staircase monomial ideals (the torus-fixed punctual
//! subschemes), the stratification by diagonals with its subdivision
//! order, stratum dimensions and symmetry orders.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrataError {
    #[error("k = {k} exceeds cap {cap}")]
    CapExceeded { k: u64, cap: u64 },
    #[error("steps are not non-increasing: not an ideal")]
    NotAnIdeal,
    #[error("partition totals differ: {0} vs {1}")]
    TotalMismatch(u64, u64),
}

/// A partition of a positive integer, stored non-increasing. Also used
/// as the unordered multiset `Δ = {a_1, ..., a_l}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    /// Canonicalizes (sorts non-increasing); empty parts are rejected
    /// by debug assertion.
    pub fn new(mut parts: Vec<u64>) -> Partition {
        debug_assert!(parts.iter().all(|&p| p > 0));
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Multiplicity of each distinct part value, largest part first.
    pub fn multiplicities(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((v, m)) if *v == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

/// All partitions of `k`, in reverse-lexicographic order: `{k}` first,
/// `{1,...,1}` last.
pub fn partitions(k: u64, cap: u64) -> Result<Vec<Partition>, StrataError> {
    if k > cap {
        return Err(StrataError::CapExceeded { k, cap });
    }
    let mut out = Vec::new();
    let mut current: Vec<u64> = Vec::new();
    fn rec(remaining: u64, max_part: u64, current: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: current.clone(),
            });
            return;
        }
        let hi = remaining.min(max_part);
        for p in (1..=hi).rev() {
            current.push(p);
            rec(remaining - p, p, current, out);
            current.pop();
        }
    }
    rec(k, k, &mut current, &mut out);
    Ok(out)
}

/// A staircase monomial ideal `⟨x^{n_i} y^i⟩` of `C[x, y]`, given by
/// its non-increasing step sequence. These are exactly the
/// torus-fixed points of the punctual Hilbert scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StaircaseIdeal {
    steps: Vec<u64>,
}

impl StaircaseIdeal {
    pub fn new(steps: Vec<u64>) -> Result<StaircaseIdeal, StrataError> {
        if steps.windows(2).any(|w| w[0] < w[1]) || steps.contains(&0) {
            return Err(StrataError::NotAnIdeal);
        }
        Ok(StaircaseIdeal { steps })
    }

    pub fn from_partition(p: &Partition) -> StaircaseIdeal {
        StaircaseIdeal {
            steps: p.parts.clone(),
        }
    }

    pub fn to_partition(&self) -> Partition {
        Partition::new(self.steps.clone())
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    /// `dim C[x,y]/I`: the number of monomials under the staircase.
    pub fn colength(&self) -> u64 {
        self.steps.iter().sum()
    }

    /// Minimal monomial generators `x^{n_i} y^i` (plus `y^r`), rendered
    /// for human inspection.
    pub fn generator_strings(&self) -> Vec<String> {
        let mono = |a: u64, b: u64| -> String {
            let x = match a {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{a}"),
            };
            let y = match b {
                0 => String::new(),
                1 => "y".to_string(),
                _ => format!("y^{b}"),
            };
            match (x.is_empty(), y.is_empty()) {
                (true, true) => "1".to_string(),
                (false, true) => x,
                (true, false) => y,
                (false, false) => format!("{x} {y}"),
            }
        };
        let r = self.steps.len() as u64;
        let mut out = Vec::new();
        for (i, &n) in self.steps.iter().enumerate() {
            // Skip non-minimal generators (same step as the previous row).
            if i == 0 || self.steps[i - 1] > n {
                out.push(mono(n, i as u64));
            }
        }
        out.push(mono(0, r));
        out
    }
}

/// All staircase ideals of colength `k`, in bijection with the
/// partitions of `k` via steps <-> parts.
pub fn torus_fixed_points(k: u64, cap: u64) -> Result<Vec<StaircaseIdeal>, StrataError> {
    Ok(partitions(k, cap)?
        .iter()
        .map(StaircaseIdeal::from_partition)
        .collect())
}

/// Is `fine` a subdivision of `coarse` — can fine's parts be grouped
/// into blocks summing to coarse's parts? Returns one grouping witness
/// (per coarse part, the multiset of fine parts assigned to it).
pub fn is_subdivision(
    fine: &Partition,
    coarse: &Partition,
) -> Result<Option<Vec<Vec<u64>>>, StrataError> {
    if fine.total() != coarse.total() {
        return Err(StrataError::TotalMismatch(fine.total(), coarse.total()));
    }
    // Backtracking over the multiset of fine parts; fill coarse parts
    // in order, choosing for each a sub-multiset with the right sum.
    fn fill_block(
        target: u64,
        pool: &mut Vec<(u64, u64)>, // (value, available multiplicity), descending
        start: usize,
        chosen: &mut Vec<u64>,
        rest: &[u64],
        witness: &mut Vec<Vec<u64>>,
    ) -> bool {
        if target == 0 {
            witness.push(chosen.clone());
            let ok = fill_all(rest, pool, witness);
            if !ok {
                witness.pop();
            }
            return ok;
        }
        for i in start..pool.len() {
            let (v, avail) = pool[i];
            if avail == 0 || v > target {
                continue;
            }
            pool[i].1 -= 1;
            chosen.push(v);
            if fill_block(target - v, pool, i, chosen, rest, witness) {
                return true;
            }
            chosen.pop();
            pool[i].1 += 1;
        }
        false
    }
    fn fill_all(coarse_rest: &[u64], pool: &mut Vec<(u64, u64)>, witness: &mut Vec<Vec<u64>>) -> bool {
        match coarse_rest.split_first() {
            None => pool.iter().all(|&(_, m)| m == 0),
            Some((&target, rest)) => {
                let mut chosen = Vec::new();
                fill_block(target, pool, 0, &mut chosen, rest, witness)
            }
        }
    }
    let mut pool: Vec<(u64, u64)> = fine.multiplicities();
    let mut witness = Vec::new();
    if fill_all(coarse.parts(), &mut pool, &mut witness) {
        Ok(Some(witness))
    } else {
        Ok(None)
    }
}

/// Dimension bookkeeping for one diagonal stratum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumInfo {
    pub delta: Partition,
    /// Number of parts `l`.
    pub num_points: usize,
    /// `2l`: dimension of the stratum downstairs in the symmetric
    /// power (surface points are 2-dimensional).
    pub dim_symmetric: u64,
    /// `Σ (a_i - 1)`: dimension of the punctual fiber `F_Δ`.
    pub dim_fiber: u64,
    /// `2l + Σ (a_i - 1) = k + l`.
    pub dim_hilbert_stratum: u64,
    /// `|Σ_Δ| = Π multiplicity!` — permutations of the points that
    /// preserve the lengths.
    pub sigma_order: u64,
}

/// Dimension of the punctual Hilbert scheme `F_a` of a smooth surface.
///
/// Classical convention, isolated here so a different one can be
/// swapped in: `dim F_a = a - 1`.
pub fn punctual_fiber_dim(a: u64) -> u64 {
    a - 1
}

pub fn stratum_info(delta: &Partition) -> StratumInfo {
    let l = delta.len() as u64;
    let dim_fiber: u64 = delta.parts().iter().map(|&a| punctual_fiber_dim(a)).sum();
    let sigma_order: u64 = delta
        .multiplicities()
        .iter()
        .map(|&(_, m)| (1..=m).product::<u64>())
        .product();
    StratumInfo {
        delta: delta.clone(),
        num_points: delta.len(),
        dim_symmetric: 2 * l,
        dim_fiber,
        dim_hilbert_stratum: 2 * l + dim_fiber,
        sigma_order,
    }
}

/// The poset of all partitions of `k` under the subdivision order.
///
/// Orientation, stored exactly as stated: stratum(Δ) lies in the
/// closure of stratum(Δ') if and only if Δ' is a subdivision of Δ.
/// The open stratum `{1,...,1}` is the maximal element, the small
/// diagonal `{k}` the minimal one.
#[derive(Debug, Clone)]
pub struct StrataPoset {
    partitions: Vec<Partition>,
    /// `relation[i][j]` = partitions[i] is a subdivision of
    /// partitions[j] (equivalently stratum j lies in the closure of
    /// stratum i).
    relation: Vec<Vec<bool>>,
}

impl StrataPoset {
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn is_subdivision_of(&self, fine: usize, coarse: usize) -> bool {
        self.relation[fine][coarse]
    }

    /// stratum(i) lies in the closure of stratum(j)?
    pub fn in_closure_of(&self, i: usize, j: usize) -> bool {
        self.relation[j][i]
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }

    /// Covering pairs (fine covers coarse in the subdivision order).
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.relation[i][j] {
                    continue;
                }
                let has_middle = (0..n)
                    .any(|m| m != i && m != j && self.relation[i][m] && self.relation[m][j]);
                if !has_middle {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn relation_count(&self) -> usize {
        self.relation
            .iter()
            .map(|row| row.iter().filter(|&&b| b).count())
            .sum()
    }
}

pub fn strata_poset(k: u64, cap: u64) -> Result<StrataPoset, StrataError> {
    if k > cap {
        return Err(StrataError::CapExceeded { k, cap });
    }
    let parts = partitions(k, k)?;
    let n = parts.len();
    let mut relation = vec![vec![false; n]; n];
    for i in 0..n {
        for (j, rel) in relation[i].iter_mut().enumerate() {
            *rel = i == j || is_subdivision(&parts[i], &parts[j])?.is_some();
        }
    }
    Ok(StrataPoset {
        partitions: parts,
        relation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: count partitions by the recurrence
    /// p(k, max) = p(k-max', max') summed over first parts.
    fn count_partitions_oracle(k: u64, max: u64) -> u64 {
        if k == 0 {
            return 1;
        }
        (1..=max.min(k))
            .map(|p| count_partitions_oracle(k - p, p))
            .sum()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions(1, 60).unwrap().len(), 1);
        assert_eq!(partitions(4, 60).unwrap().len(), 5);
        assert_eq!(partitions(12, 60).unwrap().len(), 77);
        for k in 1..=15 {
            assert_eq!(
                partitions(k, 60).unwrap().len() as u64,
                count_partitions_oracle(k, k),
                "p({k})"
            );
        }
    }

    #[test]
    fn partition_cap() {
        assert!(matches!(
            partitions(61, 60),
            Err(StrataError::CapExceeded { .. })
        ));
    }

    #[test]
    fn partitions_are_canonical_and_ordered() {
        let ps = partitions(6, 60).unwrap();
        assert_eq!(ps.first().unwrap().parts(), &[6]);
        assert_eq!(ps.last().unwrap().parts(), &[1, 1, 1, 1, 1, 1]);
        for p in &ps {
            assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
            assert_eq!(p.total(), 6);
        }
    }

    #[test]
    fn staircase_bijection_with_partitions() {
        for k in 1..=30 {
            let ps = partitions(k, 60).unwrap();
            let ideals = torus_fixed_points(k, 60).unwrap();
            assert_eq!(ps.len(), ideals.len());
            for (p, i) in ps.iter().zip(&ideals) {
                assert_eq!(&i.to_partition(), p);
                assert_eq!(i.colength(), k);
            }
        }
    }

    #[test]
    fn torus_fixed_point_examples() {
        let k1 = torus_fixed_points(1, 60).unwrap();
        assert_eq!(k1.len(), 1);
        assert_eq!(k1[0].steps(), &[1]);
        assert_eq!(k1[0].generator_strings(), vec!["x", "y"]);
        let k3 = torus_fixed_points(3, 60).unwrap();
        let steps: Vec<&[u64]> = k3.iter().map(|i| i.steps()).collect();
        assert_eq!(steps, vec![&[3][..], &[2, 1][..], &[1, 1, 1][..]]);
        assert_eq!(torus_fixed_points(5, 60).unwrap().len(), 7);
    }

    #[test]
    fn colength_examples() {
        assert_eq!(StaircaseIdeal::new(vec![1]).unwrap().colength(), 1);
        // steps {2,1}: monomials 1, x, y.
        assert_eq!(StaircaseIdeal::new(vec![2, 1]).unwrap().colength(), 3);
        // steps {3,3,1}: census 1,x,x^2,y,xy,x^2y,y^2 = 7.
        assert_eq!(StaircaseIdeal::new(vec![3, 3, 1]).unwrap().colength(), 7);
    }

    #[test]
    fn non_monotone_steps_rejected() {
        assert!(matches!(
            StaircaseIdeal::new(vec![1, 2]),
            Err(StrataError::NotAnIdeal)
        ));
        assert!(matches!(
            StaircaseIdeal::new(vec![2, 0]),
            Err(StrataError::NotAnIdeal)
        ));
    }

    #[test]
    fn subdivision_examples() {
        let p = |v: &[u64]| Partition::new(v.to_vec());
        assert!(is_subdivision(&p(&[1, 1, 1]), &p(&[3])).unwrap().is_some());
        assert!(is_subdivision(&p(&[2, 2]), &p(&[2, 2])).unwrap().is_some());
        // Oracle: exhaustive grouping of {2,2} into blocks 3 and 1
        // finds none.
        assert!(is_subdivision(&p(&[2, 2]), &p(&[3, 1])).unwrap().is_none());
        assert!(matches!(
            is_subdivision(&p(&[2]), &p(&[3])),
            Err(StrataError::TotalMismatch(2, 3))
        ));
    }

    #[test]
    fn subdivision_witness_is_valid() {
        let fine = Partition::new(vec![2, 1, 1, 1]);
        let coarse = Partition::new(vec![3, 2]);
        let w = is_subdivision(&fine, &coarse).unwrap().unwrap();
        assert_eq!(w.len(), coarse.len());
        for (block, &target) in w.iter().zip(coarse.parts()) {
            assert_eq!(block.iter().sum::<u64>(), target);
        }
        let mut all: Vec<u64> = w.concat();
        all.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(all, fine.parts());
    }

    #[test]
    fn poset_k2_and_k4() {
        let p2 = strata_poset(2, 15).unwrap();
        assert_eq!(p2.len(), 2);
        let fine = p2.index_of(&Partition::new(vec![1, 1])).unwrap();
        let coarse = p2.index_of(&Partition::new(vec![2])).unwrap();
        assert!(p2.is_subdivision_of(fine, coarse));
        assert!(!p2.is_subdivision_of(coarse, fine));
        assert_eq!(p2.covers(), vec![(fine, coarse)]);

        let p4 = strata_poset(4, 15).unwrap();
        let i211 = p4.index_of(&Partition::new(vec![2, 1, 1])).unwrap();
        let i22 = p4.index_of(&Partition::new(vec![2, 2])).unwrap();
        let i31 = p4.index_of(&Partition::new(vec![3, 1])).unwrap();
        let i4 = p4.index_of(&Partition::new(vec![4])).unwrap();
        // {2,1,1} = {2} ∪ {1,1} refines {2,2}; oracle-checked.
        assert!(p4.is_subdivision_of(i211, i22));
        assert!(p4.is_subdivision_of(i211, i31));
        assert!(p4.is_subdivision_of(i211, i4));
        assert!(!p4.is_subdivision_of(i22, i31));
        assert!(!p4.is_subdivision_of(i31, i22));
    }

    #[test]
    fn poset_extremes() {
        for k in 2..=8u64 {
            let poset = strata_poset(k, 15).unwrap();
            let top = poset
                .index_of(&Partition::new(vec![1; k as usize]))
                .unwrap();
            let bottom = poset.index_of(&Partition::new(vec![k])).unwrap();
            for i in 0..poset.len() {
                assert!(poset.is_subdivision_of(top, i));
                assert!(poset.is_subdivision_of(i, bottom));
            }
        }
    }

    #[test]
    fn poset_k5_relation_count_golden() {
        // Golden value recorded from an independent exhaustive
        // pairwise grouping oracle (includes the 7 reflexive pairs).
        let p5 = strata_poset(5, 15).unwrap();
        assert_eq!(p5.len(), 7);
        assert_eq!(p5.relation_count(), 26);
    }

    #[test]
    fn stratum_info_examples() {
        let open = stratum_info(&Partition::new(vec![1, 1, 1, 1]));
        assert_eq!(open.dim_symmetric, 8);
        assert_eq!(open.dim_fiber, 0);
        assert_eq!(open.sigma_order, 24);
        let small = stratum_info(&Partition::new(vec![5]));
        assert_eq!(small.dim_symmetric, 2);
        assert_eq!(small.dim_fiber, 4);
        assert_eq!(small.dim_hilbert_stratum, 6); // k + l = 5 + 1
        let mid = stratum_info(&Partition::new(vec![2, 1]));
        assert_eq!(mid.dim_symmetric, 4);
        assert_eq!(mid.dim_fiber, 1);
        assert_eq!(mid.dim_hilbert_stratum, 5);
        assert_eq!(mid.sigma_order, 1);
    }

    #[test]
    fn stratum_dimension_formula() {
        for k in 1..=10u64 {
            for p in partitions(k, 60).unwrap() {
                let info = stratum_info(&p);
                assert_eq!(info.dim_hilbert_stratum, k + p.len() as u64);
                assert!(info.sigma_order <= (1..=p.len() as u64).product::<u64>());
                assert_eq!(
                    (1..=p.len() as u64).product::<u64>() % info.sigma_order,
                    0
                );
            }
        }
    }

    #[test]
    fn dimensions_strictly_decrease_down_covers() {
        for k in 2..=8u64 {
            let poset = strata_poset(k, 15).unwrap();
            for (fine, coarse) in poset.covers() {
                let df = stratum_info(&poset.partitions()[fine]).dim_hilbert_stratum;
                let dc = stratum_info(&poset.partitions()[coarse]).dim_hilbert_stratum;
                assert!(df > dc, "k={k}: cover must drop dimension");
            }
        }
    }
}
