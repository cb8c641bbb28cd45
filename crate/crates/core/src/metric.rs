//! Exact finite metric spaces and points of the ambient function space.
//!
//! A [`FiniteMetric`] is validated once at construction and immutable after.
//! Label order is the canonical total order used for every tie-break in the
//! crate. Functions `X -> Q` are represented by [`TightPoint`], a plain
//! coordinate vector in label order; operations that need the metric take it
//! as an explicit argument.

use std::collections::HashSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::{Rational, MAX_LABELS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetric {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

impl FiniteMetric {
    /// Validates `matrix` against the metric axioms (exactly, no tolerance)
    /// and requires distinct elements to be at positive distance.
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let n = labels.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch { rows: matrix.len(), labels: n });
        }
        if n > MAX_LABELS {
            return Err(Error::TooManyLabels(n));
        }
        let mut seen = HashSet::with_capacity(n);
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        for i in 0..n {
            if !matrix[i][i].is_zero() {
                return Err(Error::NonzeroDiagonal(labels[i].clone()));
            }
            for j in (i + 1)..n {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::AsymmetricMatrix(labels[i].clone(), labels[j].clone()));
                }
                if matrix[i][j].is_negative() {
                    return Err(Error::NegativeDistance(labels[i].clone(), labels[j].clone()));
                }
                if matrix[i][j].is_zero() {
                    return Err(Error::ZeroOffDiagonal(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if matrix[x][z] > &matrix[x][y] + &matrix[y][z] {
                        return Err(Error::TriangleViolation {
                            x: labels[x].clone(),
                            y: labels[y].clone(),
                            z: labels[z].clone(),
                        });
                    }
                }
            }
        }
        Ok(FiniteMetric { labels, dist: matrix })
    }

    /// Like [`FiniteMetric::new`] with labels `0, 1, ..`.
    pub fn with_default_labels(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| format!("x{i}")).collect();
        Self::new(labels, matrix)
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

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// Image of element `i` under the Kuratowski embedding, `y -> D(i, y)`.
    pub fn kuratowski(&self, i: usize) -> TightPoint {
        TightPoint::new(self.dist[i].clone())
    }

    pub fn kuratowski_of(&self, label: &str) -> Result<TightPoint> {
        Ok(self.kuratowski(self.index_of(label)?))
    }

    /// Unordered pairs `(i, j)`, `i < j`, sorted by increasing distance with
    /// ties broken lexicographically in label order.
    pub fn pair_schedule(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        pairs.sort_by(|a, b| self.dist[a.0][a.1].cmp(&self.dist[b.0][b.1]).then(a.cmp(b)));
        pairs
    }
}

/// A function from the ground set to the rationals, stored in label order.
///
/// Equality, hashing and ordering are exact and lexicographic on the
/// coordinate vector; vertex identity in a [`crate::RealizationGraph`] is
/// this equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TightPoint {
    coords: Vec<Rational>,
}

impl TightPoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        TightPoint { coords }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        TightPoint::new(values.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.coords
    }

    /// Coordinatewise `(self + other) / 2`.
    pub fn midpoint(&self, other: &TightPoint) -> Result<TightPoint> {
        check_same_ground(self, other)?;
        let two = Rational::from_integer(2.into());
        Ok(TightPoint::new(
            self.coords.iter().zip(&other.coords).map(|(a, b)| (a + b) / &two).collect(),
        ))
    }
}

impl std::ops::Index<usize> for TightPoint {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.coords[i]
    }
}

impl fmt::Display for TightPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn check_same_ground(f: &TightPoint, g: &TightPoint) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::GroundSetMismatch(f.len(), g.len()));
    }
    Ok(())
}

/// Maximum coordinate deviation `max_x |f(x) - g(x)|`.
pub fn linf_dist(f: &TightPoint, g: &TightPoint) -> Result<Rational> {
    check_same_ground(f, g)?;
    Ok(linf(f, g))
}

pub(crate) fn linf(f: &TightPoint, g: &TightPoint) -> Rational {
    debug_assert_eq!(f.len(), g.len());
    f.coords
        .iter()
        .zip(&g.coords)
        .map(|(a, b)| (a - b).abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rat;

    pub(crate) fn int_metric(labels: &[&str], rows: &[&[i64]]) -> FiniteMetric {
        FiniteMetric::new(
            labels.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect(),
        )
        .unwrap()
    }

    pub(crate) fn metric_345() -> FiniteMetric {
        int_metric(&["a", "b", "c"], &[&[0, 3, 4], &[3, 0, 5], &[4, 5, 0]])
    }

    #[test]
    fn accepts_345() {
        let d = metric_345();
        assert_eq!(d.len(), 3);
        assert_eq!(d.dist(1, 2), &rat(5));
    }

    #[test]
    fn rejects_triangle_violation() {
        let err = FiniteMetric::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![rat(0), rat(1), rat(5)],
                vec![rat(1), rat(0), rat(1)],
                vec![rat(5), rat(1), rat(0)],
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::TriangleViolation { x: "a".into(), y: "b".into(), z: "c".into() }
        );
    }

    #[test]
    fn rejects_bad_matrices() {
        let labels = || vec!["a".to_string(), "b".to_string()];
        let m = |a: i64, b: i64, c: i64, d: i64| vec![vec![rat(a), rat(b)], vec![rat(c), rat(d)]];
        assert_eq!(
            FiniteMetric::new(labels(), m(0, 1, 2, 0)).unwrap_err(),
            Error::AsymmetricMatrix("a".into(), "b".into())
        );
        assert_eq!(
            FiniteMetric::new(labels(), m(1, 1, 1, 0)).unwrap_err(),
            Error::NonzeroDiagonal("a".into())
        );
        assert_eq!(
            FiniteMetric::new(labels(), m(0, 0, 0, 0)).unwrap_err(),
            Error::ZeroOffDiagonal("a".into(), "b".into())
        );
        assert!(matches!(
            FiniteMetric::new(vec!["a".into()], m(0, 1, 1, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            FiniteMetric::new(vec!["a".into(), "a".into()], m(0, 1, 1, 0)),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn wide_band_matrix_is_always_metric() {
        let vals = [1_000_000i64, 2_000_000, 1_500_000, 1_999_999, 1_000_001, 1_234_567];
        let mut m = vec![vec![rat(0); 4]; 4];
        let mut k = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                m[i][j] = rat(vals[k]);
                m[j][i] = rat(vals[k]);
                k += 1;
            }
        }
        assert!(FiniteMetric::with_default_labels(m).is_ok());
    }

    #[test]
    fn linf_examples() {
        let d = metric_345();
        let ka = d.kuratowski(0);
        assert_eq!(linf_dist(&ka, &ka).unwrap(), rat(0));
        assert_eq!(linf_dist(&ka, &TightPoint::from_integers(&[1, 2, 3])).unwrap(), rat(1));
        let two = int_metric(&["a", "b"], &[&[0, 7], &[7, 0]]);
        assert_eq!(linf_dist(&two.kuratowski(0), &two.kuratowski(1)).unwrap(), rat(7));
        assert_eq!(
            linf_dist(&ka, &TightPoint::from_integers(&[1, 2])).unwrap_err(),
            Error::GroundSetMismatch(3, 2)
        );
    }

    #[test]
    fn kuratowski_rows() {
        let d = metric_345();
        assert_eq!(d.kuratowski_of("b").unwrap(), TightPoint::from_integers(&[3, 0, 5]));
        assert_eq!(d.kuratowski_of("z").unwrap_err(), Error::UnknownLabel("z".into()));
    }

    #[test]
    fn schedule_sorted_with_lexicographic_ties() {
        let d = int_metric(
            &["a", "b", "c", "d"],
            &[&[0, 1, 2, 1], &[1, 0, 1, 2], &[2, 1, 0, 1], &[1, 2, 1, 0]],
        );
        assert_eq!(
            d.pair_schedule(),
            vec![(0, 1), (0, 3), (1, 2), (2, 3), (0, 2), (1, 3)]
        );
    }
}
