//! Experiment configuration, read from TOML.
//!
//! ```toml
//! trials = 500
//! estimators = ["naive", "ideal(auto)"]
//! statistics = ["density"]
//! output_dir = "out"
//! strict_corollary = false
//!
//! [graph]
//! kind = "torus"      # torus | lattice | cycle | path | star | complete | powerlaw | edges
//! cycle = 5
//! dim = 5
//!
//! [noise]
//! p = 0.3
//! q = 0.4
//! seed = 1
//!
//! [grid]              # robustness only
//! p = [0.35, 0.4, 0.45]
//! q = [0.3, 0.35, 0.4]
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use netdenoise::graph::{
    chung_lu_power_law, complete_offdiag, cycle_graph, neps, path_graph, read_edge_list, star_graph,
};
use netdenoise::spectral::{cycle_eigensystem, neps_eigensystem, path_eigensystem};
use netdenoise::{Adjacency, Eigen, NepsBasis, NoiseSpec};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Where the true graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphSpec {
    /// `dim`-fold Cartesian product of `cycle`-cycles.
    Torus {
        cycle: usize,
        dim: usize,
    },
    /// Product of paths with the given lengths under a named NEPS basis.
    Lattice {
        sizes: Vec<usize>,
        #[serde(default = "default_basis")]
        basis: String,
    },
    Cycle {
        k: usize,
    },
    Path {
        k: usize,
    },
    Star {
        leaves: usize,
    },
    Complete {
        n: usize,
    },
    Powerlaw {
        n: usize,
        gamma: f64,
        #[serde(default = "default_d_min")]
        d_min: f64,
        #[serde(default)]
        seed: u64,
    },
    Edges {
        path: PathBuf,
    },
}

fn default_basis() -> String {
    "cartesian".into()
}

fn default_d_min() -> f64 {
    2.0
}

fn basis_from_name(name: &str, arity: usize) -> Result<NepsBasis, Failure> {
    match name {
        "cartesian" => Ok(NepsBasis::cartesian(arity)),
        "tensor" => Ok(NepsBasis::tensor(arity)),
        "strong" => Ok(NepsBasis::strong(arity)),
        other => Err(Failure::Usage(format!("unknown NEPS basis {other:?}; expected cartesian, tensor or strong"))),
    }
}

impl GraphSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Torus { .. } => "torus",
            Self::Lattice { .. } => "lattice",
            Self::Cycle { .. } => "cycle",
            Self::Path { .. } => "path",
            Self::Star { .. } => "star",
            Self::Complete { .. } => "complete",
            Self::Powerlaw { .. } => "powerlaw",
            Self::Edges { .. } => "edges",
        }
    }

    /// Replaces the generator seed, for generators that have one.
    pub fn reseed(&mut self, new_seed: u64) {
        if let Self::Powerlaw { seed, .. } = self {
            *seed = new_seed;
        }
    }

    /// The graph, and its closed-form eigensystem when one is known.
    pub fn build(&self) -> Result<(Adjacency, Option<Eigen>), Failure> {
        Ok(match self {
            Self::Torus { cycle, dim } => {
                let factor: Adjacency = cycle_graph(*cycle)?;
                let basis = NepsBasis::cartesian(*dim);
                let graph = neps(&vec![factor; *dim], &basis)?;
                let sys = neps_eigensystem(&vec![cycle_eigensystem(*cycle)?; *dim], &basis)?;
                (graph, Some(sys))
            }
            Self::Lattice { sizes, basis } => {
                let basis = basis_from_name(basis, sizes.len())?;
                let factors = sizes.iter().map(|&k| path_graph(k)).collect::<Result<Vec<Adjacency>, _>>()?;
                let systems = sizes.iter().map(|&k| path_eigensystem(k)).collect::<Result<Vec<_>, _>>()?;
                (neps(&factors, &basis)?, Some(neps_eigensystem(&systems, &basis)?))
            }
            Self::Cycle { k } => (cycle_graph(*k)?, Some(cycle_eigensystem(*k)?)),
            Self::Path { k } => (path_graph(*k)?, Some(path_eigensystem(*k)?)),
            Self::Star { leaves } => (star_graph(*leaves)?, None),
            Self::Complete { n } => (complete_offdiag(*n)?, None),
            Self::Powerlaw { n, gamma, d_min, seed } => (chung_lu_power_law(*n, *gamma, *d_min, *seed)?, None),
            Self::Edges { path } => (read_edge_list(path)?, None),
        })
    }
}

/// How the truncation rank of an estimator is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank {
    Auto,
    Fixed(usize),
}

/// `naive`, `ideal(s|auto)` or `empirical(s|auto)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorSpec {
    Naive,
    Ideal(Rank),
    Empirical(Rank),
}

impl FromStr for EstimatorSpec {
    type Err = Failure;

    fn from_str(s: &str) -> Result<Self, Failure> {
        let bad =
            || Failure::Usage(format!("bad estimator {s:?}; expected naive, ideal(<s>|auto) or empirical(<s>|auto)"));
        let s = s.trim();
        if s == "naive" {
            return Ok(Self::Naive);
        }
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let arg = rest.strip_suffix(')').ok_or_else(bad)?.trim();
        let rank = match arg {
            "auto" => Rank::Auto,
            n => match n.parse::<usize>() {
                Ok(k) if k >= 1 => Rank::Fixed(k),
                _ => return Err(bad()),
            },
        };
        match head.trim() {
            "ideal" => Ok(Self::Ideal(rank)),
            "empirical" => Ok(Self::Empirical(rank)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rank = |r: &Rank| match r {
            Rank::Auto => "auto".to_string(),
            Rank::Fixed(k) => k.to_string(),
        };
        match self {
            Self::Naive => f.write_str("naive"),
            Self::Ideal(r) => write!(f, "ideal({})", rank(r)),
            Self::Empirical(r) => write!(f, "empirical({})", rank(r)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub noise: NoiseSpec,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<String>,
    #[serde(default)]
    pub statistics: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Keep the `(n-1)²` factor in the maximum-degree remainder term.
    #[serde(default)]
    pub strict_corollary: bool,
    #[serde(default)]
    pub grid: Option<Grid>,
}

fn default_estimators() -> Vec<String> {
    vec!["naive".into(), "ideal(auto)".into()]
}

fn default_trials() -> usize {
    500
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Defaults for everything but the graph and the noise.
    pub fn new(graph: GraphSpec, noise: NoiseSpec) -> Self {
        Self {
            graph,
            noise,
            estimators: default_estimators(),
            statistics: Vec::new(),
            trials: default_trials(),
            output_dir: default_output_dir(),
            strict_corollary: false,
            grid: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, Failure> {
        let cfg: Self = toml::from_str(text).map_err(|e| Failure::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if self.trials == 0 {
            return Err(Failure::Usage("trials must be at least 1".into()));
        }
        self.noise.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        self.estimator_specs()?;
        Ok(())
    }

    pub fn estimator_specs(&self) -> Result<Vec<EstimatorSpec>, Failure> {
        self.estimators.iter().map(|s| s.parse()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            trials = 20
            estimators = ["naive", "ideal(auto)", "empirical(3)"]
            statistics = ["density"]
            [graph]
            kind = "torus"
            cycle = 3
            dim = 2
            [noise]
            p = 0.3
            q = 0.4
            seed = 9
            [grid]
            p = [0.3]
            q = [0.35, 0.4]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.graph, GraphSpec::Torus { cycle: 3, dim: 2 });
        assert_eq!(
            cfg.estimator_specs().unwrap(),
            vec![EstimatorSpec::Naive, EstimatorSpec::Ideal(Rank::Auto), EstimatorSpec::Empirical(Rank::Fixed(3))]
        );
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        let (g, sys) = cfg.graph.build().unwrap();
        assert_eq!(g.n(), 9);
        assert_eq!(sys.unwrap().len(), 9);
    }

    #[test]
    fn rejects_bad_values() {
        let base = "[graph]\nkind = \"cycle\"\nk = 5\n[noise]\np = 0.1\nq = 0.1\n";
        assert!(ExperimentConfig::from_toml(base).is_ok());
        assert!(ExperimentConfig::from_toml(&format!("trials = 0\n{base}")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("estimators = [\"ideal(0)\"]\n{base}")).is_err());
        assert!(ExperimentConfig::from_toml(&base.replace("q = 0.1", "q = 0.95")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("bogus = 1\n{base}")).is_err());
    }

    #[test]
    fn estimator_round_trip() {
        for s in ["naive", "ideal(auto)", "ideal(12)", "empirical(auto)", "empirical(1)"] {
            assert_eq!(s.parse::<EstimatorSpec>().unwrap().to_string(), s);
        }
        for s in ["ideal", "ideal()", "empirical(x)", "oracle(2)"] {
            assert!(s.parse::<EstimatorSpec>().is_err());
        }
    }
}
