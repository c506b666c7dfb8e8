//! Finite metric spaces, the closed-ball tolerance relation, and system models.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::set::PointSet;

/// Slack allowed in the triangle inequality of an explicit distance matrix.
pub const TRIANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum Metric {
    /// Points in ℝᵈ with the Euclidean distance.
    Coords { coords: Vec<Vec<f64>> },
    /// Explicit symmetric distance matrix.
    Matrix { distances: Vec<Vec<f64>> },
}

/// A finite metric space on points `0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct FiniteSpace {
    metric: Metric,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    #[serde(flatten)]
    metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<SpaceRepr> for FiniteSpace {
    type Error = Error;

    fn try_from(r: SpaceRepr) -> Result<Self> {
        let s = FiniteSpace::new(r.metric)?;
        match r.labels {
            Some(l) => s.with_labels(l),
            None => Ok(s),
        }
    }
}

impl From<FiniteSpace> for SpaceRepr {
    fn from(s: FiniteSpace) -> Self {
        SpaceRepr { metric: s.metric, labels: s.labels }
    }
}

impl FiniteSpace {
    pub fn new(metric: Metric) -> Result<Self> {
        match &metric {
            Metric::Coords { coords } => validate_coords(coords)?,
            Metric::Matrix { distances } => validate_matrix(distances)?,
        }
        Ok(FiniteSpace { metric, labels: None })
    }

    pub fn from_coords(coords: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(Metric::Coords { coords })
    }

    pub fn from_matrix(distances: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(Metric::Matrix { distances })
    }

    /// For matrices that are metric by construction (shortest-path closures); skips the cubic
    /// triangle check.
    pub(crate) fn from_metric_matrix(distances: Vec<Vec<f64>>) -> Result<Self> {
        let n = distances.len();
        if n == 0 || distances.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMetric("distance matrix must be square and nonempty".into()));
        }
        Ok(FiniteSpace { metric: Metric::Matrix { distances }, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::DimensionMismatch { left: self.n(), right: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        match &self.metric {
            Metric::Coords { coords } => coords.len(),
            Metric::Matrix { distances } => distances.len(),
        }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[x].as_str())
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        match &self.metric {
            Metric::Coords { coords } => Some(coords),
            Metric::Matrix { .. } => None,
        }
    }

    #[inline]
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        match &self.metric {
            Metric::Coords { coords } => euclid(&coords[x], &coords[y]),
            Metric::Matrix { distances } => distances[x][y],
        }
    }

    pub fn diameter(&self) -> f64 {
        let n = self.n();
        let mut d = 0.0f64;
        for x in 0..n {
            for y in x + 1..n {
                d = d.max(self.distance(x, y));
            }
        }
        d
    }

    /// `d(x, A)`, infinite for empty `A`.
    pub fn distance_to_set(&self, x: usize, a: &PointSet) -> f64 {
        a.iter().map(|y| self.distance(x, y)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest distance between a point of `a` and a point of `b`.
    pub fn set_distance(&self, a: &PointSet, b: &PointSet) -> f64 {
        a.iter().map(|x| self.distance_to_set(x, b)).fold(f64::INFINITY, f64::min)
    }

    pub fn set_diameter(&self, a: &PointSet) -> f64 {
        let pts: Vec<usize> = a.iter().collect();
        let mut d = 0.0f64;
        for (i, &x) in pts.iter().enumerate() {
            for &y in &pts[i + 1..] {
                d = d.max(self.distance(x, y));
            }
        }
        d
    }

    /// All pairwise distances `d(x, y)` with `x < y`, sorted.
    pub fn sorted_distances(&self) -> Vec<f64> {
        let n = self.n();
        let mut v = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for x in 0..n {
            for y in x + 1..n {
                v.push(self.distance(x, y));
            }
        }
        v.sort_by(f64::total_cmp);
        v
    }

    /// Smallest gap between `eps` and any pairwise distance.
    pub fn scale_margin(&self, eps: f64) -> f64 {
        self.sorted_distances().iter().map(|d| (d - eps).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Explicit distance matrix.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n).map(|x| (0..n).map(|y| self.distance(x, y)).collect()).collect()
    }

    /// Subspace on the points of `a`, reindexed increasingly.
    pub fn subspace(&self, a: &PointSet) -> Result<FiniteSpace> {
        let idx: Vec<usize> = a.iter().collect();
        let metric = match &self.metric {
            Metric::Coords { coords } => Metric::Coords { coords: idx.iter().map(|&i| coords[i].clone()).collect() },
            Metric::Matrix { distances } => Metric::Matrix {
                distances: idx.iter().map(|&i| idx.iter().map(|&j| distances[i][j]).collect()).collect(),
            },
        };
        let mut s = FiniteSpace::new(metric)?;
        if let Some(l) = &self.labels {
            s.labels = Some(idx.iter().map(|&i| l[i].clone()).collect());
        }
        Ok(s)
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

fn validate_coords(coords: &[Vec<f64>]) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::InvalidMetric("space must have at least one point".into()));
    }
    let dim = coords[0].len();
    for (i, c) in coords.iter().enumerate() {
        if c.len() != dim {
            return Err(Error::InvalidMetric(format!("point {i} has dimension {}, expected {dim}", c.len())));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMetric(format!("point {i} has a non-finite coordinate")));
        }
    }
    Ok(())
}

fn validate_matrix(d: &[Vec<f64>]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Err(Error::InvalidMetric("space must have at least one point".into()));
    }
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidMetric(format!("row {i} has length {}, expected {n}", row.len())));
        }
        if row[i] != 0.0 {
            return Err(Error::InvalidMetric(format!("d({i},{i}) = {} is not zero", row[i])));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidMetric(format!("d({i},{j}) = {v} is not a finite nonnegative number")));
            }
            if v != d[j][i] {
                return Err(Error::InvalidMetric(format!("d({i},{j}) != d({j},{i})")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i][k] > d[i][j] + d[j][k] + TRIANGLE_TOL {
                    return Err(Error::InvalidMetric(format!("triangle inequality fails for ({i},{j},{k})")));
                }
            }
        }
    }
    Ok(())
}

/// Closed `eps`-ball relation: `(x, y)` related iff `d(x, y) ≤ eps`.
pub fn vbar(space: &FiniteSpace, eps: f64) -> Result<Relation> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::NegativeScale(eps));
    }
    let n = space.n();
    let mut r = Relation::empty(n);
    for x in 0..n {
        r.insert(x, x);
        for y in x + 1..n {
            if space.distance(x, y) <= eps {
                r.insert(x, y);
                r.insert(y, x);
            }
        }
    }
    Ok(r)
}

/// A relation on a finite metric space together with a working scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemModel {
    pub name: String,
    pub space: FiniteSpace,
    pub relation: Relation,
    pub eps: f64,
    /// Named point groups (structural points, isolated points, pieces of the space).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub groups: BTreeMap<String, Vec<usize>>,
}

impl SystemModel {
    pub fn new(name: impl Into<String>, space: FiniteSpace, relation: Relation, eps: f64) -> Result<Self> {
        if space.n() != relation.n() {
            return Err(Error::DimensionMismatch { left: space.n(), right: relation.n() });
        }
        if eps.is_nan() || eps < 0.0 {
            return Err(Error::NegativeScale(eps));
        }
        Ok(SystemModel { name: name.into(), space, relation, eps, groups: BTreeMap::new() })
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn with_group(mut self, name: impl Into<String>, points: Vec<usize>) -> Self {
        self.groups.insert(name.into(), points);
        self
    }

    pub fn group(&self, name: &str) -> Option<PointSet> {
        self.groups
            .get(name)
            .map(|v| PointSet::from_indices(self.n(), v.iter().copied()).expect("group indices in range"))
    }

    /// Re-validates dimensions after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.space.n() != self.relation.n() {
            return Err(Error::DimensionMismatch { left: self.space.n(), right: self.relation.n() });
        }
        for (name, pts) in &self.groups {
            if let Some(&bad) = pts.iter().find(|&&p| p >= self.n()) {
                return Err(Error::InvalidParameter(format!("group {name} has index {bad} out of range")));
            }
        }
        Ok(())
    }
}
