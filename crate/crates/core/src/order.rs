//! Finite posets, join semilattices with a least element, ideals and the
//! lattice of down-sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("element index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("relation is not antisymmetric: {0} <= {1} and {1} <= {0}")]
    NotAntisymmetric(usize, usize),
    #[error("relation given as full order is not transitive at ({0}, {1}, {2})")]
    NotTransitive(usize, usize, usize),
    #[error("poset has no least element")]
    NoLeastElement,
    #[error("elements {0} and {1} have no least upper bound")]
    NoJoin(usize, usize),
    #[error("dense set is not sup-dense: element {0} is not the supremum of the dense elements below it")]
    NotSupDense(usize),
    #[error("poset too large for down-set enumeration ({0} elements)")]
    TooLarge(usize),
    #[error("unknown relation kind {0:?}")]
    UnknownRelation(String),
}

/// How the `le` pairs of a poset file should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    /// Generating pairs; reflexive-transitive closure is taken.
    Cover,
    /// The pairs already form the whole order (reflexive pairs may be omitted).
    #[default]
    Full,
}

/// On-disk representation of a poset.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PosetFile {
    pub elements: Vec<String>,
    #[serde(default)]
    pub le: Vec<(usize, usize)>,
    #[serde(default)]
    pub relation: RelationKind,
}

/// A finite partial order with stable integer indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    le: Vec<Vec<bool>>,
}

impl Poset {
    pub fn new(
        labels: Vec<String>,
        pairs: &[(usize, usize)],
        kind: RelationKind,
    ) -> Result<Self, OrderError> {
        let n = labels.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in pairs {
            if i >= n {
                return Err(OrderError::IndexOutOfRange(i));
            }
            if j >= n {
                return Err(OrderError::IndexOutOfRange(j));
            }
            le[i][j] = true;
        }
        match kind {
            RelationKind::Cover => {
                for k in 0..n {
                    let through = le[k].clone();
                    for row in le.iter_mut().filter(|row| row[k]) {
                        for (x, &y) in row.iter_mut().zip(&through) {
                            *x |= y;
                        }
                    }
                }
            }
            RelationKind::Full => {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            if le[i][j] && le[j][k] && !le[i][k] {
                                return Err(OrderError::NotTransitive(i, j, k));
                            }
                        }
                    }
                }
            }
        }
        let mut pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        if let Some((i, j)) = pairs.find(|&(i, j)| le[i][j] && le[j][i]) {
            return Err(OrderError::NotAntisymmetric(i, j));
        }
        Ok(Self { labels, le })
    }

    pub fn from_file(file: &PosetFile) -> Result<Self, OrderError> {
        Self::new(file.elements.clone(), &file.le, file.relation)
    }

    pub fn to_file(&self) -> PosetFile {
        let mut le = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i != j && self.le[i][j] {
                    le.push((i, j));
                }
            }
        }
        PosetFile { elements: self.labels.clone(), le, relation: RelationKind::Full }
    }

    /// Chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("c{i}")).collect();
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(labels, &pairs, RelationKind::Cover).expect("chain is a poset")
    }

    pub fn antichain(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("x{i}")).collect();
        Self::new(labels, &[], RelationKind::Full).expect("antichain is a poset")
    }

    /// `{0, a, b, t}` with `a`, `b` incomparable.
    pub fn diamond() -> Self {
        let labels = ["0", "a", "b", "t"].map(String::from).to_vec();
        Self::new(labels, &[(0, 1), (0, 2), (1, 3), (2, 3)], RelationKind::Cover)
            .expect("diamond is a poset")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i][j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.le[i][j]
    }

    fn check(&self, i: usize) -> Result<(), OrderError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(OrderError::IndexOutOfRange(i))
        }
    }

    pub fn is_down_closed(&self, members: &BTreeSet<usize>) -> bool {
        members
            .iter()
            .all(|&j| (0..self.len()).all(|k| !self.le[k][j] || members.contains(&k)))
    }

    pub fn down_closure(&self, seed: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.len()).filter(|&k| seed.iter().any(|&j| self.le[k][j])).collect()
    }

    /// Least upper bound of a set, if it exists.
    pub fn supremum(&self, set: &BTreeSet<usize>) -> Option<usize> {
        let upper: Vec<usize> = (0..self.len())
            .filter(|&u| set.iter().all(|&s| self.le[s][u]))
            .collect();
        upper.iter().copied().find(|&u| upper.iter().all(|&v| self.le[u][v]))
    }

    /// Indices ordered so that every element comes after everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        let below = |i: usize| (0..self.len()).filter(|&k| self.le[k][i]).count();
        order.sort_by_key(|&i| (below(i), i));
        order
    }

    /// All down-sets, enumerated along a linear extension.
    pub fn down_sets(&self) -> Result<Vec<BTreeSet<usize>>, OrderError> {
        if self.len() > 24 {
            return Err(OrderError::TooLarge(self.len()));
        }
        let order = self.linear_extension();
        let mut out = Vec::new();
        let mut current = BTreeSet::new();
        self.down_sets_rec(&order, 0, &mut current, &mut out);
        out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        Ok(out)
    }

    fn down_sets_rec(
        &self,
        order: &[usize],
        pos: usize,
        current: &mut BTreeSet<usize>,
        out: &mut Vec<BTreeSet<usize>>,
    ) {
        if pos == order.len() {
            out.push(current.clone());
            return;
        }
        let i = order[pos];
        self.down_sets_rec(order, pos + 1, current, out);
        let admissible = (0..self.len()).all(|k| !self.lt(k, i) || current.contains(&k));
        if admissible {
            current.insert(i);
            self.down_sets_rec(order, pos + 1, current, out);
            current.remove(&i);
        }
    }
}

/// A finite join semilattice with least element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinSemilattice {
    poset: Poset,
    zero: usize,
    join: Vec<Vec<usize>>,
}

impl JoinSemilattice {
    pub fn new(poset: Poset) -> Result<Self, OrderError> {
        let n = poset.len();
        let zero = (0..n)
            .find(|&z| (0..n).all(|j| poset.le(z, j)))
            .ok_or(OrderError::NoLeastElement)?;
        let join = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| poset.supremum(&BTreeSet::from([i, j])).ok_or(OrderError::NoJoin(i, j)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { poset, zero, join })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.poset.le(a, b)
    }

    pub fn join(&self, a: usize, b: usize) -> Result<usize, OrderError> {
        self.poset.check(a)?;
        self.poset.check(b)?;
        Ok(self.join[a][b])
    }

    /// Unchecked join for hot loops; indices come from the semilattice itself.
    #[inline]
    pub fn join_idx(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn join_all<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.zero, |acc, x| self.join[acc][x])
    }

    /// Smallest ideal (down-closed, join-closed, containing 0) containing `seed`.
    pub fn ideal_generated(&self, seed: &BTreeSet<usize>) -> Result<DownSet, OrderError> {
        for &s in seed {
            self.poset.check(s)?;
        }
        let mut members: BTreeSet<usize> = seed.clone();
        members.insert(self.zero);
        loop {
            let mut next = self.poset.down_closure(&members);
            let snapshot: Vec<usize> = next.iter().copied().collect();
            for &x in &snapshot {
                for &y in &snapshot {
                    next.insert(self.join[x][y]);
                }
            }
            if next == members {
                return Ok(DownSet { members });
            }
            members = next;
        }
    }

    pub fn principal_ideal(&self, a: usize) -> DownSet {
        DownSet { members: (0..self.len()).filter(|&k| self.le(k, a)).collect() }
    }

    pub fn is_ideal(&self, set: &BTreeSet<usize>) -> bool {
        set.contains(&self.zero)
            && self.poset.is_down_closed(set)
            && set.iter().all(|&x| set.iter().all(|&y| set.contains(&self.join[x][y])))
    }

    /// All ideals, ordered by size then lexicographically.
    pub fn ideals(&self) -> Result<Vec<DownSet>, OrderError> {
        Ok(self
            .poset
            .down_sets()?
            .into_iter()
            .filter(|s| self.is_ideal(s))
            .map(|members| DownSet { members })
            .collect())
    }
}

/// A downward-closed subset, also used for ideals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DownSet {
    pub members: BTreeSet<usize>,
}

impl DownSet {
    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    pub fn is_subset(&self, other: &DownSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

/// A finite lattice given by explicit tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteLattice {
    pub elements: Vec<DownSet>,
    pub le: Vec<Vec<bool>>,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
}

impl FiniteLattice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn bottom(&self) -> usize {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.le[i][j])).unwrap_or(0)
    }

    pub fn top(&self) -> usize {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.le[j][i])).unwrap_or(0)
    }

    /// Checks absorption, commutativity, associativity and idempotence.
    pub fn satisfies_lattice_axioms(&self) -> bool {
        let n = self.len();
        for a in 0..n {
            if self.join[a][a] != a || self.meet[a][a] != a {
                return false;
            }
            for b in 0..n {
                if self.join[a][b] != self.join[b][a] || self.meet[a][b] != self.meet[b][a] {
                    return false;
                }
                if self.join[a][self.meet[a][b]] != a || self.meet[a][self.join[a][b]] != a {
                    return false;
                }
                for c in 0..n {
                    if self.join[self.join[a][b]][c] != self.join[a][self.join[b][c]] {
                        return false;
                    }
                    if self.meet[self.meet[a][b]][c] != self.meet[a][self.meet[b][c]] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The lattice of all down-sets of `p`, ordered by inclusion.
pub fn completion(p: &Poset) -> Result<FiniteLattice, OrderError> {
    let elements: Vec<DownSet> =
        p.down_sets()?.into_iter().map(|members| DownSet { members }).collect();
    let index = |s: &BTreeSet<usize>| {
        elements.iter().position(|d| &d.members == s).expect("closed under union and intersection")
    };
    let n = elements.len();
    let mut le = vec![vec![false; n]; n];
    let mut meet = vec![vec![0; n]; n];
    let mut join = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (&elements[i].members, &elements[j].members);
            le[i][j] = x.is_subset(y);
            meet[i][j] = index(&x.intersection(y).copied().collect());
            join[i][j] = index(&x.union(y).copied().collect());
        }
    }
    Ok(FiniteLattice { elements, le, meet, join })
}

/// `i ↦ {j ∈ dense : j ≤ i}`, after checking that `dense` is sup-dense.
pub fn phi_embedding(p: &Poset, dense: &BTreeSet<usize>) -> Result<Vec<DownSet>, OrderError> {
    for &d in dense {
        p.check(d)?;
    }
    let mut images = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let below: BTreeSet<usize> = dense.iter().copied().filter(|&j| p.le(j, i)).collect();
        if p.supremum(&below) != Some(i) {
            return Err(OrderError::NotSupDense(i));
        }
        images.push(DownSet { members: below });
    }
    Ok(images)
}

/// Every element of a finite lattice is compact.
pub fn is_compact(lat: &FiniteLattice, a: usize) -> bool {
    let _ = &lat.elements[a];
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn diamond_joins() {
        let sl = JoinSemilattice::new(Poset::diamond()).unwrap();
        assert_eq!(sl.zero(), 0);
        assert_eq!(sl.join(1, 2).unwrap(), 3);
        assert_eq!(sl.join(0, 2).unwrap(), 2);
        assert_eq!(sl.join(1, 1).unwrap(), 1);
        assert_eq!(sl.join(4, 0), Err(OrderError::IndexOutOfRange(4)));
    }

    #[test]
    fn generated_ideals() {
        let sl = JoinSemilattice::new(Poset::diamond()).unwrap();
        assert_eq!(sl.ideal_generated(&set(&[])).unwrap().members, set(&[0]));
        assert_eq!(sl.ideal_generated(&set(&[1])).unwrap().members, set(&[0, 1]));
        assert_eq!(sl.ideal_generated(&set(&[1, 2])).unwrap().members, set(&[0, 1, 2, 3]));
        assert_eq!(sl.ideals().unwrap().len(), 4);
    }

    #[test]
    fn completion_sizes() {
        let empty = Poset::new(vec![], &[], RelationKind::Full).unwrap();
        assert_eq!(completion(&empty).unwrap().len(), 1);
        let c = completion(&Poset::chain(2)).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.satisfies_lattice_axioms());
        let b = completion(&Poset::antichain(2)).unwrap();
        assert_eq!(b.len(), 4);
        assert!(b.satisfies_lattice_axioms());
        assert!(is_compact(&b, b.top()));
    }

    #[test]
    fn rejects_bad_relations() {
        let labels = vec!["x".into(), "y".into()];
        assert_eq!(
            Poset::new(labels.clone(), &[(0, 1), (1, 0)], RelationKind::Cover),
            Err(OrderError::NotAntisymmetric(0, 1))
        );
        let three = vec!["x".into(), "y".into(), "z".into()];
        assert!(matches!(
            Poset::new(three, &[(0, 1), (1, 2)], RelationKind::Full),
            Err(OrderError::NotTransitive(..))
        ));
        assert!(Poset::new(labels, &[(0, 5)], RelationKind::Full).is_err());
    }

    #[test]
    fn phi_on_v_shape() {
        let p = Poset::new(
            vec!["x".into(), "y".into(), "z".into()],
            &[(0, 2), (1, 2)],
            RelationKind::Cover,
        )
        .unwrap();
        let phi = phi_embedding(&p, &set(&[0, 1])).unwrap();
        assert_eq!(phi[2].members, set(&[0, 1]));
        assert_eq!(phi[0].members, set(&[0]));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(phi[i].is_subset(&phi[j]), p.le(i, j));
            }
        }
        assert_eq!(phi_embedding(&p, &set(&[0])), Err(OrderError::NotSupDense(1)));
    }

    #[test]
    fn chain_phi() {
        let p = Poset::chain(2);
        let phi = phi_embedding(&p, &set(&[0, 1])).unwrap();
        assert_eq!(phi[1].members, set(&[0, 1]));
        assert_eq!(phi[0].members, set(&[0]));
    }

    #[test]
    fn no_join_detected() {
        let p = Poset::antichain(2);
        assert_eq!(JoinSemilattice::new(p), Err(OrderError::NoLeastElement));
    }
}
