//! Square-lattice geometry and random input specifications.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Open-boundary `rows x cols` lattice with row-major qubit indexing.
///
/// Qubit `(r, c)` has index `r * cols + c`. `partition_b` is the sublattice
/// with `r + c` odd; every edge has exactly one endpoint in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub rows: usize,
    pub cols: usize,
    pub edges: Vec<[usize; 2]>,
    pub partition_b: Vec<usize>,
}

impl LatticeGeometry {
    pub fn num_qubits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn in_partition_b(&self, qubit: usize) -> bool {
        let (r, c) = (qubit / self.cols, qubit % self.cols);
        (r + c) % 2 == 1
    }

    /// Bitmask of the qubits in partition B.
    pub fn partition_b_mask(&self) -> u64 {
        self.partition_b.iter().fold(0, |m, &q| m | (1 << q))
    }
}

/// Build the nearest-neighbour geometry of a `rows x cols` grid.
pub fn build_lattice(rows: usize, cols: usize) -> Result<LatticeGeometry> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidDimension { rows, cols });
    }
    let index = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push([index(r, c), index(r, c + 1)]);
            }
            if r + 1 < rows {
                edges.push([index(r, c), index(r + 1, c)]);
            }
        }
    }
    let partition_b = (0..rows * cols)
        .filter(|&q| (q / cols + q % cols) % 2 == 1)
        .collect();
    Ok(LatticeGeometry {
        rows,
        cols,
        edges,
        partition_b,
    })
}

/// The two allowed single-qubit input states, with the local Z field
/// absorbed.
///
/// `X` is `((1+i)|0> + (1-i)|1>)/2`; `Y` is
/// `((1+i)|0> + e^{-i pi/4}(1-i)|1>)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InputType {
    #[serde(rename = "X_TYPE")]
    X,
    #[serde(rename = "Y_TYPE")]
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSpec {
    pub choices: Vec<InputType>,
}

impl InputSpec {
    pub fn new(choices: Vec<InputType>) -> Self {
        Self { choices }
    }

    pub fn uniform(n: usize, kind: InputType) -> Self {
        Self {
            choices: vec![kind; n],
        }
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn check_matches(&self, lattice: &LatticeGeometry) -> Result<()> {
        if self.len() != lattice.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: lattice.num_qubits(),
                actual: self.len(),
            });
        }
        Ok(())
    }
}

/// Draw each qubit's input type independently and uniformly.
pub fn random_input<R: Rng + ?Sized>(n: usize, rng: &mut R) -> InputSpec {
    let choices = (0..n)
        .map(|_| {
            if rng.random::<bool>() {
                InputType::Y
            } else {
                InputType::X
            }
        })
        .collect();
    InputSpec { choices }
}
