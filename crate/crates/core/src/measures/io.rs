//! JSON measure files.
//!
//! ```json
//! {"type":"discrete","dim":2,"points":[[0,0]],"weights":[1]}
//! {"type":"grid","origin":[..],"spacing":[..],"shape":[..],"cell_mass":[..],"lambda":1}
//! {"type":"ball_union","centers":[[..]],"radii":[..],"lambda":1}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{BallUnionMeasure, DiscreteMeasure, GridMeasure, GridSpec};

/// Any measure that can be read from or written to a measure file.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Discrete(DiscreteMeasure),
    Grid(GridMeasure),
    BallUnion(BallUnionMeasure),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum MeasureFile {
    Discrete {
        dim: usize,
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    Grid {
        origin: Vec<f64>,
        spacing: Vec<f64>,
        shape: Vec<usize>,
        cell_mass: Vec<f64>,
        lambda: f64,
    },
    BallUnion {
        centers: Vec<Vec<f64>>,
        radii: Vec<f64>,
        lambda: f64,
    },
}

impl Measure {
    pub fn dim(&self) -> usize {
        match self {
            Measure::Discrete(m) => m.dim(),
            Measure::Grid(m) => m.dim(),
            Measure::BallUnion(m) => m.dim(),
        }
    }

    pub fn barycenter(&self) -> Vec<f64> {
        match self {
            Measure::Discrete(m) => m.barycenter(),
            Measure::Grid(m) => m.barycenter(),
            Measure::BallUnion(m) => m.barycenter(),
        }
    }

    /// Finite representation usable by the discrete solvers: grids are atomized at
    /// cell centers; ball unions are rejected.
    pub fn to_discrete(&self) -> Result<DiscreteMeasure> {
        match self {
            Measure::Discrete(m) => Ok(m.clone()),
            Measure::Grid(g) => Ok(g.to_discrete().0),
            Measure::BallUnion(_) => Err(Error::InvalidSpec(
                "ball unions must be sampled or discretized first".into(),
            )),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = match self {
            Measure::Discrete(m) => MeasureFile::Discrete {
                dim: m.dim(),
                points: m.points().map(|p| p.to_vec()).collect(),
                weights: m.weights().to_vec(),
            },
            Measure::Grid(g) => MeasureFile::Grid {
                origin: g.grid().origin().to_vec(),
                spacing: g.grid().spacing().to_vec(),
                shape: g.grid().shape().to_vec(),
                cell_mass: g.cell_mass().to_vec(),
                lambda: g.lambda(),
            },
            Measure::BallUnion(b) => MeasureFile::BallUnion {
                centers: b.centers().to_vec(),
                radii: b.radii().to_vec(),
                lambda: b.lambda(),
            },
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeasureFile = serde_json::from_str(text)?;
        Ok(match file {
            MeasureFile::Discrete {
                dim,
                points,
                weights,
            } => {
                let m = DiscreteMeasure::new(points, weights)?;
                if m.dim() != dim {
                    return Err(Error::DimMismatch {
                        expected: dim,
                        got: m.dim(),
                    });
                }
                Measure::Discrete(m)
            }
            MeasureFile::Grid {
                origin,
                spacing,
                shape,
                cell_mass,
                lambda,
            } => Measure::Grid(GridMeasure::new(
                GridSpec::new(origin, spacing, shape)?,
                cell_mass,
                lambda,
            )?),
            MeasureFile::BallUnion {
                centers,
                radii,
                lambda,
            } => Measure::BallUnion(BallUnionMeasure::new(centers, radii, lambda)?),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

impl From<DiscreteMeasure> for Measure {
    fn from(m: DiscreteMeasure) -> Self {
        Measure::Discrete(m)
    }
}

impl From<GridMeasure> for Measure {
    fn from(m: GridMeasure) -> Self {
        Measure::Grid(m)
    }
}

impl From<BallUnionMeasure> for Measure {
    fn from(m: BallUnionMeasure) -> Self {
        Measure::BallUnion(m)
    }
}
