use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, WeightedAdjacency};
use crate::netstats::{
    betweenness, centralization, closeness, conductance, degree_centrality, density, eigenvector_centrality,
    geodesic_distances, k_walk_counts, CentralityKind,
};
use crate::scalar::Scalar;

pub const STATISTIC_NAMES: &str = "density, degree, eigenvector, conductance:<set-file>, kwalk:<k>, \
     centralization:<degree|eigenvector|closeness|betweenness>, geodesic, betweenness, closeness";

/// Residual tolerance for eigenvector centrality inside [`Statistic`].
const EIGENVECTOR_TOL: f64 = 1e-8;

/// A statistic selected by name.
#[derive(Clone, Debug, PartialEq)]
pub enum Statistic {
    Density,
    Degree,
    Eigenvector,
    Conductance { path: PathBuf, set: Vec<usize> },
    KWalk(u32),
    Centralization(CentralityKind),
    Geodesic,
    Betweenness,
    Closeness,
}

/// Whitespace- or comma-separated vertex indices, `#` comments allowed.
pub fn read_vertex_set(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path.as_ref())?;
    let mut set = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for tok in body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v = tok.parse().map_err(|_| Error::Parse(format!("line {}: bad vertex index {tok:?}", lineno + 1)))?;
            set.push(v);
        }
    }
    Ok(set)
}

impl Statistic {
    /// Parses a canonical name; `conductance:<file>` reads the vertex set.
    pub fn parse(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownStatistic { name: name.to_string(), valid: STATISTIC_NAMES.to_string() };
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        Ok(match (head, arg) {
            ("density", None) => Self::Density,
            ("degree", None) => Self::Degree,
            ("eigenvector", None) => Self::Eigenvector,
            ("geodesic", None) => Self::Geodesic,
            ("betweenness", None) => Self::Betweenness,
            ("closeness", None) => Self::Closeness,
            ("kwalk", Some(k)) => match k.parse::<u32>() {
                Ok(k) if k >= 1 => Self::KWalk(k),
                _ => return Err(unknown()),
            },
            ("centralization", Some(base)) => Self::Centralization(match base {
                "degree" => CentralityKind::Degree,
                "eigenvector" => CentralityKind::Eigenvector,
                "closeness" => CentralityKind::Closeness,
                "betweenness" => CentralityKind::Betweenness,
                _ => return Err(unknown()),
            }),
            ("conductance", Some(p)) if !p.is_empty() => {
                let path = PathBuf::from(p);
                let set = read_vertex_set(&path)?;
                Self::Conductance { path, set }
            }
            _ => return Err(unknown()),
        })
    }

    pub fn evaluate<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(&self, w: &A) -> Result<StatValue> {
        let vec = |v: Vec<T>| StatValue::Vector(v.into_iter().map(Scalar::as_f64).collect());
        Ok(match self {
            Self::Density => StatValue::Scalar(density(w)?.as_f64()),
            Self::Degree => vec(degree_centrality(w).scores),
            Self::Eigenvector => vec(eigenvector_centrality(w, EIGENVECTOR_TOL, true)?.scores),
            Self::Conductance { set, .. } => StatValue::Scalar(conductance(w, set)?.as_f64()),
            Self::KWalk(k) => StatValue::from_matrix(&k_walk_counts(w, *k)?),
            Self::Centralization(kind) => {
                let scores = match kind {
                    CentralityKind::Degree => degree_centrality(w).scores,
                    CentralityKind::Eigenvector => eigenvector_centrality(w, EIGENVECTOR_TOL, true)?.scores,
                    CentralityKind::Closeness => closeness(w)?.scores,
                    CentralityKind::Betweenness => betweenness(w).scores,
                };
                StatValue::Scalar(centralization(&scores, w.dim())?.as_f64())
            }
            Self::Geodesic => StatValue::from_matrix(&geodesic_distances(w)),
            Self::Betweenness => vec(betweenness(w).scores),
            Self::Closeness => vec(closeness(w)?.scores),
        })
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Density => f.write_str("density"),
            Self::Degree => f.write_str("degree"),
            Self::Eigenvector => f.write_str("eigenvector"),
            Self::Conductance { path, .. } => write!(f, "conductance:{}", path.display()),
            Self::KWalk(k) => write!(f, "kwalk:{k}"),
            Self::Centralization(kind) => {
                let base = match kind {
                    CentralityKind::Degree => "degree",
                    CentralityKind::Eigenvector => "eigenvector",
                    CentralityKind::Closeness => "closeness",
                    CentralityKind::Betweenness => "betweenness",
                };
                write!(f, "centralization:{base}")
            }
            Self::Geodesic => f.write_str("geodesic"),
            Self::Betweenness => f.write_str("betweenness"),
            Self::Closeness => f.write_str("closeness"),
        }
    }
}

/// Value of a statistic; non-finite distances serialise as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StatValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

impl StatValue {
    fn from_matrix<T: Scalar>(m: &Matrix<T>) -> Self {
        Self::Matrix((0..m.rows()).map(|i| m.row(i).iter().map(|x| x.as_f64()).collect()).collect())
    }

    fn flat(&self) -> Vec<f64> {
        match self {
            Self::Scalar(x) => vec![*x],
            Self::Vector(v) => v.clone(),
            Self::Matrix(rows) => rows.concat(),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Self::Scalar(x) => Some(*x),
            _ => None,
        }
    }

    /// Squared Euclidean (Frobenius) distance. Matching infinities
    /// contribute nothing; an infinity against a finite value is infinite.
    pub fn squared_error(&self, other: &Self) -> Result<f64> {
        let (a, b) = (self.flat(), other.flat());
        if a.len() != b.len() || std::mem::discriminant(self) != std::mem::discriminant(other) {
            return Err(Error::dims("statistic values have different shapes"));
        }
        Ok(a.iter().zip(&b).map(|(&x, &y)| if x == y { 0.0 } else { (x - y).powi(2) }).sum())
    }
}
