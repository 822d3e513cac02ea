use std::ops::{Add, Deref, DerefMut, Index, IndexMut, Sub};

use serde::{Deserialize, Serialize};

use super::{Interval, IntervalError};

/// Interval box `[a_1,b_1] x ... x [a_n,b_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalVector(Vec<Interval>);

impl IntervalVector {
    pub fn new(components: Vec<Interval>) -> Self {
        IntervalVector(components)
    }

    pub fn zeros(n: usize) -> Self {
        IntervalVector(vec![Interval::ZERO; n])
    }

    pub fn from_points(x: &[f64]) -> Self {
        IntervalVector(x.iter().map(|&v| Interval::point(v)).collect())
    }

    /// Box `center ± radius` in every component.
    pub fn around(center: &[f64], radius: f64) -> Self {
        IntervalVector(
            center
                .iter()
                .map(|&c| Interval::around(c, radius))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Interval> {
        self.0
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    fn check(&self, other: &Self) -> Result<(), IntervalError> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(IntervalError::DimensionMismatch(self.len(), other.len()))
        }
    }

    pub fn mid(&self) -> Vec<f64> {
        self.0.iter().map(Interval::mid).collect()
    }

    pub fn diam(&self) -> Vec<f64> {
        self.0.iter().map(Interval::diam).collect()
    }

    pub fn max_diam(&self) -> f64 {
        self.0.iter().map(Interval::diam).fold(0.0, f64::max)
    }

    pub fn rad(&self) -> Vec<f64> {
        self.0.iter().map(Interval::rad).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(Interval::is_finite)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.len() && self.0.iter().zip(x).all(|(a, &v)| a.contains(v))
    }

    pub fn hull(&self, other: &Self) -> Result<Self, IntervalError> {
        self.check(other)?;
        Ok(IntervalVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.hull(b))
                .collect(),
        ))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, IntervalError> {
        self.check(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.intersect(b))
            .collect::<Result<Vec<_>, _>>()
            .map(IntervalVector)
    }

    pub fn subset(&self, other: &Self) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.subset(b))
    }

    pub fn subset_interior(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.subset_interior(b))
    }

    /// True when some component pair is disjoint, hence the boxes are.
    pub fn disjoint(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a.disjoint(b))
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.len() == other.len() && !self.disjoint(other)
    }

    pub fn scale(&self, c: f64) -> Self {
        IntervalVector(self.0.iter().map(|a| a.scale(c)).collect())
    }

    pub fn dot(&self, other: &Self) -> Interval {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Interval::ZERO, |acc, (a, b)| acc + *a * *b)
    }

    /// Inflates each component about its midpoint.
    pub fn inflate(&self, factor: f64, abs: f64) -> Self {
        IntervalVector(self.0.iter().map(|a| a.inflate(factor, abs)).collect())
    }
}

impl Deref for IntervalVector {
    type Target = [Interval];
    fn deref(&self) -> &[Interval] {
        &self.0
    }
}

impl DerefMut for IntervalVector {
    fn deref_mut(&mut self) -> &mut [Interval] {
        &mut self.0
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

impl From<Vec<Interval>> for IntervalVector {
    fn from(v: Vec<Interval>) -> Self {
        IntervalVector(v)
    }
}

impl FromIterator<Interval> for IntervalVector {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        IntervalVector(iter.into_iter().collect())
    }
}

impl Add for &IntervalVector {
    type Output = IntervalVector;
    fn add(self, rhs: &IntervalVector) -> IntervalVector {
        assert_eq!(self.len(), rhs.len());
        self.0.iter().zip(&rhs.0).map(|(a, b)| *a + *b).collect()
    }
}

impl Sub for &IntervalVector {
    type Output = IntervalVector;
    fn sub(self, rhs: &IntervalVector) -> IntervalVector {
        assert_eq!(self.len(), rhs.len());
        self.0.iter().zip(&rhs.0).map(|(a, b)| *a - *b).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(v: &[(f64, f64)]) -> IntervalVector {
        v.iter()
            .map(|&(a, b)| Interval::new(a, b).unwrap())
            .collect()
    }

    #[test]
    fn hull_of_boxes() {
        let h = bx(&[(0.0, 1.0), (0.0, 1.0)])
            .hull(&bx(&[(2.0, 3.0), (0.0, 1.0)]))
            .unwrap();
        assert_eq!(h, bx(&[(0.0, 3.0), (0.0, 1.0)]));
    }

    #[test]
    fn intersection_signals_emptiness() {
        let a = bx(&[(0.0, 1.0), (0.0, 1.0)]);
        let b = bx(&[(2.0, 3.0), (0.0, 1.0)]);
        assert_eq!(a.intersect(&b), Err(IntervalError::EmptyIntersection));
        assert!(a.disjoint(&b));
        assert_eq!(a.intersect(&a).unwrap(), a);
    }

    #[test]
    fn midpoint_and_length_mismatch() {
        let a = bx(&[(0.0, 2.0), (-1.0, 1.0)]);
        assert_eq!(a.mid(), vec![1.0, 0.0]);
        assert!(matches!(
            a.hull(&bx(&[(0.0, 1.0)])),
            Err(IntervalError::DimensionMismatch(2, 1))
        ));
    }
}
