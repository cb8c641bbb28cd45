//! Splits, weighted split systems and the l1 decomposition of planar point
//! sets into vertical and horizontal threshold splits.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};

use crate::bits::{self, Mask};
use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::{Rational, MAX_LABELS};

/// Bipartition of `{0, .., n-1}`, stored by the side holding element 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Split {
    n: usize,
    side_a: Mask,
}

impl Split {
    /// `side` may be either part; the result is canonical.
    pub fn new(n: usize, side: &[usize]) -> Result<Self> {
        if n > MAX_LABELS {
            return Err(Error::TooManyLabels(n));
        }
        let mut mask: Mask = 0;
        for &i in side {
            if i >= n {
                return Err(Error::UnknownLabel(i.to_string()));
            }
            mask |= bits::single(i);
        }
        Self::from_mask(n, mask).ok_or(Error::EmptySplitSide)
    }

    pub(crate) fn from_mask(n: usize, side: Mask) -> Option<Self> {
        let all = bits::full(n);
        let side = side & all;
        if side == 0 || side == all {
            return None;
        }
        let side_a = if bits::contains(side, 0) { side } else { all & !side };
        Some(Split { n, side_a })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn side_a(&self) -> Vec<usize> {
        bits::iter(self.side_a).collect()
    }

    pub fn side_b(&self) -> Vec<usize> {
        bits::iter(self.mask_b()).collect()
    }

    fn mask_b(&self) -> Mask {
        bits::full(self.n) & !self.side_a
    }

    /// Whether `x` and `y` lie on different sides.
    pub fn separates(&self, x: usize, y: usize) -> bool {
        bits::contains(self.side_a, x) != bits::contains(self.side_a, y)
    }
}

/// At least one of the four part intersections is empty.
pub fn compatible(s1: &Split, s2: &Split) -> Result<bool> {
    if s1.n != s2.n {
        return Err(Error::GroundSetMismatch(s1.n, s2.n));
    }
    let (a, b) = (s1.side_a, s1.mask_b());
    let (c, d) = (s2.side_a, s2.mask_b());
    Ok(a & c == 0 || a & d == 0 || b & c == 0 || b & d == 0)
}

/// The 0/1 split pseudometric as a raw matrix.
pub fn split_metric(s: &Split) -> Vec<Vec<Rational>> {
    (0..s.n)
        .map(|x| {
            (0..s.n)
                .map(|y| if s.separates(x, y) { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSplitSystem {
    labels: Vec<String>,
    weights: BTreeMap<Split, Rational>,
}

impl WeightedSplitSystem {
    pub fn new(labels: Vec<String>) -> Self {
        WeightedSplitSystem { labels, weights: BTreeMap::new() }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn contains(&self, s: &Split) -> bool {
        self.weights.contains_key(s)
    }

    pub fn weight(&self, s: &Split) -> Option<&Rational> {
        self.weights.get(s)
    }

    /// Splits in canonical order with their weights.
    pub fn iter(&self) -> impl Iterator<Item = (&Split, &Rational)> {
        self.weights.iter()
    }

    pub fn splits(&self) -> Vec<Split> {
        self.weights.keys().copied().collect()
    }

    /// Adds `s`, failing on a duplicate, a non-positive weight or a split of
    /// another ground set.
    pub fn insert(&mut self, s: Split, weight: Rational) -> Result<()> {
        if s.n != self.labels.len() {
            return Err(Error::GroundSetMismatch(s.n, self.labels.len()));
        }
        if !weight.is_positive() {
            return Err(Error::NonPositiveWeight(weight.to_string()));
        }
        if self.weights.contains_key(&s) {
            return Err(Error::DuplicateSplit(format!("{:?} | {:?}", s.side_a(), s.side_b())));
        }
        self.weights.insert(s, weight);
        Ok(())
    }

    pub(crate) fn add_weight(&mut self, s: Split, weight: Rational) {
        *self.weights.entry(s).or_insert_with(Rational::zero) += weight;
    }

    pub fn remove(&mut self, s: &Split) -> Option<Rational> {
        self.weights.remove(s)
    }

    /// `sum_S weight(S) * D_S` as a raw matrix (zeros allowed off the diagonal).
    pub fn induced_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.labels.len();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (s, w) in &self.weights {
            for x in bits::iter(s.side_a) {
                for y in bits::iter(s.mask_b()) {
                    m[x][y] += w;
                    m[y][x] += w;
                }
            }
        }
        m
    }
}

/// No three splits are pairwise incompatible.
pub fn is_two_compatible(system: &WeightedSplitSystem) -> bool {
    let splits = system.splits();
    let k = splits.len();
    let mut incompatible = vec![vec![false; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let c = compatible(&splits[i], &splits[j]).expect("one ground set per system");
            incompatible[i][j] = !c;
            incompatible[j][i] = !c;
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if !incompatible[i][j] {
                continue;
            }
            if ((j + 1)..k).any(|l| incompatible[i][l] && incompatible[j][l]) {
                return false;
            }
        }
    }
    true
}

/// Every pair of splits is compatible (the system is treelike).
pub fn is_pairwise_compatible(system: &WeightedSplitSystem) -> bool {
    let splits = system.splits();
    splits
        .iter()
        .enumerate()
        .all(|(i, s)| splits[i + 1..].iter().all(|t| compatible(s, t).unwrap_or(false)))
}

/// The metric `sum_S weight(S) * D_S`; fails if some pair is separated by no split.
pub fn induced_metric(system: &WeightedSplitSystem) -> Result<FiniteMetric> {
    FiniteMetric::new(system.labels.clone(), system.induced_matrix())
}

/// Pairwise distinct points of the plane, labeled `p0, p1, ..`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet2D {
    points: Vec<(Rational, Rational)>,
}

impl PointSet2D {
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.len() > MAX_LABELS {
            return Err(Error::TooManyLabels(points.len()));
        }
        let mut seen = HashSet::new();
        for (i, p) in points.iter().enumerate() {
            if !seen.insert(p) {
                return Err(Error::DuplicatePoint { index: i, x: p.0.to_string(), y: p.1.to_string() });
            }
        }
        Ok(PointSet2D { points })
    }

    pub fn from_integers(points: &[(i64, i64)]) -> Result<Self> {
        Self::new(points.iter().map(|&(x, y)| (crate::rat(x), crate::rat(y))).collect())
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.points.len()).map(|i| format!("p{i}")).collect()
    }

    /// The l1 (Manhattan) distance matrix.
    pub fn l1_matrix(&self) -> Vec<Vec<Rational>> {
        self.points
            .iter()
            .map(|p| self.points.iter().map(|q| l1(p, q)).collect())
            .collect()
    }

    pub fn l1_metric(&self) -> Result<FiniteMetric> {
        FiniteMetric::new(self.labels(), self.l1_matrix())
    }
}

pub(crate) fn l1(p: &(Rational, Rational), q: &(Rational, Rational)) -> Rational {
    (&p.0 - &q.0).abs() + (&p.1 - &q.1).abs()
}

/// Threshold splits along one axis with their gap weights: one split between
/// each pair of consecutive distinct coordinate values.
fn threshold_splits(n: usize, coord: &[Rational], labels: Vec<String>) -> WeightedSplitSystem {
    let mut values: Vec<&Rational> = coord.iter().collect();
    values.sort();
    values.dedup();
    let mut system = WeightedSplitSystem::new(labels);
    for w in values.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let below: Mask = (0..n).filter(|&i| coord[i] <= *lo).fold(0, |m, i| m | bits::single(i));
        let split = Split::from_mask(n, below).expect("both sides are nonempty");
        system.add_weight(split, hi - lo);
    }
    system
}

/// Vertical splits weighted by horizontal gaps and horizontal splits weighted
/// by vertical gaps; each system is pairwise compatible and the two induced
/// pseudometrics sum to the l1 metric.
pub fn l1_two_trees(points: &PointSet2D) -> (WeightedSplitSystem, WeightedSplitSystem) {
    let n = points.len();
    let xs: Vec<Rational> = points.points.iter().map(|p| p.0.clone()).collect();
    let ys: Vec<Rational> = points.points.iter().map(|p| p.1.clone()).collect();
    (threshold_splits(n, &xs, points.labels()), threshold_splits(n, &ys, points.labels()))
}

/// Two-compatible system inducing the l1 metric; a bipartition that is both a
/// vertical and a horizontal threshold split carries the sum of both gaps.
pub fn l1_decompose(points: &PointSet2D) -> WeightedSplitSystem {
    let (vertical, horizontal) = l1_two_trees(points);
    let mut system = vertical;
    for (s, w) in horizontal.iter() {
        system.add_weight(*s, w.clone());
    }
    system
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn abcd() -> Vec<String> {
        ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect()
    }

    fn sp(n: usize, side: &[usize]) -> Split {
        Split::new(n, side).unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(sp(4, &[2, 3]), sp(4, &[0, 1]));
        assert_eq!(sp(4, &[2, 3]).side_a(), vec![0, 1]);
        assert!(Split::new(3, &[]).is_err());
        assert!(Split::new(3, &[0, 1, 2]).is_err());
        assert!(Split::new(3, &[5]).is_err());
    }

    #[test]
    fn compatibility_examples() {
        let ab_cd = sp(4, &[0, 1]);
        assert!(compatible(&ab_cd, &sp(4, &[0])).unwrap());
        assert!(!compatible(&ab_cd, &sp(4, &[0, 2])).unwrap());
        assert!(compatible(&ab_cd, &ab_cd).unwrap());
        assert_eq!(compatible(&ab_cd, &sp(3, &[0])).unwrap_err(), Error::GroundSetMismatch(4, 3));
    }

    #[test]
    fn two_compatibility_examples() {
        let mut sys = WeightedSplitSystem::new(abcd());
        sys.insert(sp(4, &[0, 1]), rat(1)).unwrap();
        sys.insert(sp(4, &[0, 2]), rat(1)).unwrap();
        assert!(is_two_compatible(&sys));
        sys.insert(sp(4, &[0, 3]), rat(1)).unwrap();
        assert!(!is_two_compatible(&sys));

        let mut tree = WeightedSplitSystem::new(abcd());
        for side in [&[0][..], &[1], &[2], &[3], &[0, 1]] {
            tree.insert(sp(4, side), rat(1)).unwrap();
        }
        assert!(is_pairwise_compatible(&tree));
        assert!(is_two_compatible(&tree));
    }

    #[test]
    fn insert_rejects_duplicates_and_bad_weights() {
        let mut sys = WeightedSplitSystem::new(abcd());
        sys.insert(sp(4, &[0, 1]), rat(1)).unwrap();
        assert!(sys.insert(sp(4, &[2, 3]), rat(2)).is_err());
        assert!(sys.insert(sp(4, &[0]), rat(0)).is_err());
        assert!(sys.insert(sp(3, &[0]), rat(1)).is_err());
    }

    #[test]
    fn split_metric_is_zero_one() {
        let m = split_metric(&sp(3, &[0, 1]));
        assert_eq!(m[0][1], rat(0));
        assert_eq!(m[0][2], rat(1));
        assert_eq!(m[2][1], rat(1));
        for x in 0..3 {
            assert_eq!(m[x][x], rat(0));
            for y in 0..3 {
                assert_eq!(m[x][y], m[y][x]);
            }
        }
    }

    #[test]
    fn induced_metric_examples() {
        let labels = vec!["a".to_string(), "b".into(), "c".into()];
        let mut one = WeightedSplitSystem::new(labels.clone());
        one.insert(sp(3, &[0, 1]), rat(2)).unwrap();
        assert_eq!(
            induced_metric(&one).unwrap_err(),
            Error::ZeroOffDiagonal("a".into(), "b".into())
        );

        let mut pendant = WeightedSplitSystem::new(labels);
        pendant.insert(sp(3, &[0]), rat(1)).unwrap();
        pendant.insert(sp(3, &[1]), rat(2)).unwrap();
        pendant.insert(sp(3, &[2]), rat(3)).unwrap();
        let d = induced_metric(&pendant).unwrap();
        assert_eq!((d.dist(0, 1), d.dist(0, 2), d.dist(1, 2)), (&rat(3), &rat(4), &rat(5)));
    }

    #[test]
    fn l1_decomposition_of_three_points() {
        let p = PointSet2D::from_integers(&[(0, 0), (3, 1), (1, 2)]).unwrap();
        let (v, h) = l1_two_trees(&p);
        assert_eq!(v.len(), 2);
        assert_eq!(v.weight(&sp(3, &[0])), Some(&rat(1)));
        assert_eq!(v.weight(&sp(3, &[0, 2])), Some(&rat(2)));
        assert_eq!(h.len(), 2);
        assert_eq!(h.weight(&sp(3, &[0])), Some(&rat(1)));
        assert_eq!(h.weight(&sp(3, &[0, 1])), Some(&rat(1)));
        let (dv, dh) = (v.induced_matrix(), h.induced_matrix());
        assert_eq!((&dv[0][1], &dh[0][1]), (&rat(3), &rat(1)));

        let sys = l1_decompose(&p);
        // {p0} | rest is both vertical and horizontal
        assert_eq!(sys.weight(&sp(3, &[0])), Some(&rat(2)));
        let d = induced_metric(&sys).unwrap();
        assert_eq!(d.dist(0, 1), &rat(4));
        assert_eq!(d.matrix(), p.l1_matrix().as_slice());
        assert!(is_two_compatible(&sys));
    }

    #[test]
    fn l1_degenerate_axes() {
        let p = PointSet2D::from_integers(&[(0, 0), (5, 0)]).unwrap();
        let sys = l1_decompose(&p);
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.weight(&sp(2, &[0])), Some(&rat(5)));

        let p = PointSet2D::from_integers(&[(0, 0), (2, 2)]).unwrap();
        let sys = l1_decompose(&p);
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.weight(&sp(2, &[0])), Some(&rat(4)));

        let p = PointSet2D::from_integers(&[(1, 0), (1, 4), (1, 9)]).unwrap();
        let (v, h) = l1_two_trees(&p);
        assert!(v.is_empty());
        assert_eq!(h.induced_matrix(), p.l1_matrix());
    }

    #[test]
    fn rejects_repeated_points() {
        assert!(PointSet2D::from_integers(&[(1, 1), (1, 1)]).is_err());
    }
}
