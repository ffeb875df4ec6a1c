use std::fmt;

use serde::{Deserialize, Serialize};

/// Binary reset map applied as a row-vector product, `x' = x A`.
///
/// Entry `(i, j) = 1` means the old component `x_i` contributes to the new
/// component `x'_j`. Entries are stored as `u8` so that malformed maps can
/// be represented and reported by [`ShsModel::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResetMap {
    dim: usize,
    entries: Vec<u8>,
}

impl ResetMap {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a map from the source index of each new component:
    /// `sources[j] = Some(i)` gives `x'_j = x_i`, `None` zeroes `x'_j`.
    pub fn from_sources(sources: &[Option<usize>]) -> Self {
        let mut m = Self::zeros(sources.len());
        for (j, src) in sources.iter().enumerate() {
            if let Some(i) = *src {
                m.set(i, j, 1);
            }
        }
        m
    }

    /// Row-major constructor; `rows.len()` fixes the dimension.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "reset map rows must be square");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.entries[row * self.dim + col] = value;
    }

    /// `x A` for a row vector `x` of length `dim`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|j| {
                (0..self.dim)
                    .filter(|&i| self.get(i, j) != 0)
                    .map(|i| f64::from(self.get(i, j)) * x[i])
                    .sum()
            })
            .collect()
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0)
            .map(move |(k, v)| (k / self.dim, k % self.dim, *v))
    }
}

/// One edge of the discrete chain together with its reset map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub source: usize,
    pub dest: usize,
    pub rate: f64,
    pub reset: ResetMap,
}

impl Transition {
    pub fn new(source: usize, dest: usize, rate: f64, reset: ResetMap) -> Self {
        Self {
            source,
            dest,
            rate,
            reset,
        }
    }

    pub fn is_self_loop(&self) -> bool {
        self.source == self.dest
    }
}

/// Piecewise-linear stochastic hybrid system for age analysis.
///
/// The discrete state is a finite CTMC over `0..state_count`. In state `q`
/// the continuous age vector grows at the binary rates `growth[q]`, and
/// transition `l` replaces it by `x A_l`. Component 0 is the age at the
/// monitor by convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShsModel {
    pub state_count: usize,
    pub age_dim: usize,
    pub transitions: Vec<Transition>,
    pub growth: Vec<Vec<u8>>,
}

impl ShsModel {
    pub fn new(state_count: usize, age_dim: usize, growth: Vec<Vec<u8>>) -> Self {
        Self {
            state_count,
            age_dim,
            transitions: Vec::new(),
            growth,
        }
    }

    pub fn with_transition(mut self, t: Transition) -> Self {
        self.transitions.push(t);
        self
    }

    pub fn push(&mut self, t: Transition) {
        self.transitions.push(t);
    }

    /// Returns every well-formedness violation; empty iff the model is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.state_count == 0 {
            out.push(Violation::EmptyStateSpace);
        }
        if self.age_dim == 0 {
            out.push(Violation::EmptyAgeVector);
        }

        if self.growth.len() != self.state_count {
            out.push(Violation::GrowthCount {
                expected: self.state_count,
                found: self.growth.len(),
            });
        }
        for (state, b) in self.growth.iter().enumerate() {
            if b.len() != self.age_dim {
                out.push(Violation::GrowthLength {
                    state,
                    expected: self.age_dim,
                    found: b.len(),
                });
            }
            for (component, &value) in b.iter().enumerate() {
                if value > 1 {
                    out.push(Violation::NonBinaryGrowth {
                        state,
                        component,
                        value,
                    });
                }
            }
        }

        for (index, t) in self.transitions.iter().enumerate() {
            if t.source >= self.state_count {
                out.push(Violation::StateOutOfRange {
                    transition: index,
                    endpoint: Endpoint::Source,
                    state: t.source,
                });
            }
            if t.dest >= self.state_count {
                out.push(Violation::StateOutOfRange {
                    transition: index,
                    endpoint: Endpoint::Dest,
                    state: t.dest,
                });
            }
            if !(t.rate.is_finite() && t.rate > 0.0) {
                out.push(Violation::BadRate {
                    transition: index,
                    rate: t.rate,
                });
            }
            if t.reset.dim() != self.age_dim {
                out.push(Violation::ResetDimension {
                    transition: index,
                    expected: self.age_dim,
                    found: t.reset.dim(),
                });
            }
            for (row, col, value) in t.reset.nonzeros() {
                if value > 1 {
                    out.push(Violation::NonBinaryReset {
                        transition: index,
                        row,
                        col,
                        value,
                    });
                }
            }
        }
        out
    }

    /// Sum of rates leaving `state`, self-loops included.
    pub fn exit_rate(&self, state: usize) -> f64 {
        self.transitions
            .iter()
            .filter(|t| t.source == state)
            .map(|t| t.rate)
            .sum()
    }

    /// Same model with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut m = self.clone();
        for t in &mut m.transitions {
            t.rate *= factor;
        }
        m
    }
}

/// Free-function form of [`ShsModel::validate`].
pub fn validate_model(model: &ShsModel) -> Vec<Violation> {
    model.validate()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoint {
    Source,
    Dest,
}

/// A single well-formedness problem in an [`ShsModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    EmptyStateSpace,
    EmptyAgeVector,
    GrowthCount {
        expected: usize,
        found: usize,
    },
    GrowthLength {
        state: usize,
        expected: usize,
        found: usize,
    },
    NonBinaryGrowth {
        state: usize,
        component: usize,
        value: u8,
    },
    StateOutOfRange {
        transition: usize,
        endpoint: Endpoint,
        state: usize,
    },
    BadRate {
        transition: usize,
        rate: f64,
    },
    ResetDimension {
        transition: usize,
        expected: usize,
        found: usize,
    },
    NonBinaryReset {
        transition: usize,
        row: usize,
        col: usize,
        value: u8,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyStateSpace => write!(f, "model has no discrete states"),
            Violation::EmptyAgeVector => write!(f, "age vector has dimension 0"),
            Violation::GrowthCount { expected, found } => {
                write!(f, "expected {expected} growth vectors, found {found}")
            }
            Violation::GrowthLength {
                state,
                expected,
                found,
            } => write!(
                f,
                "growth vector of state {state} has length {found}, expected {expected}"
            ),
            Violation::NonBinaryGrowth {
                state,
                component,
                value,
            } => write!(
                f,
                "growth vector of state {state} has entry {value} at component {component}"
            ),
            Violation::StateOutOfRange {
                transition,
                endpoint,
                state,
            } => {
                let which = match endpoint {
                    Endpoint::Source => "source",
                    Endpoint::Dest => "destination",
                };
                write!(f, "transition {transition} has {which} state {state} out of range")
            }
            Violation::BadRate { transition, rate } => write!(
                f,
                "transition {transition} has rate {rate}; rates must be positive and finite"
            ),
            Violation::ResetDimension {
                transition,
                expected,
                found,
            } => write!(
                f,
                "transition {transition} reset map is {found}x{found}, expected {expected}x{expected}"
            ),
            Violation::NonBinaryReset {
                transition,
                row,
                col,
                value,
            } => write!(
                f,
                "transition {transition} reset map has entry {value} at ({row}, {col})"
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_node() -> ShsModel {
        ShsModel::new(1, 2, vec![vec![1, 1]])
            .with_transition(Transition::new(0, 0, 1.0, ResetMap::from_sources(&[Some(0), None])))
            .with_transition(Transition::new(0, 0, 2.0, ResetMap::from_sources(&[Some(1), Some(1)])))
    }

    #[test]
    fn reset_map_applies_as_row_vector_product() {
        // x' = (x2, x1, 0)
        let a = ResetMap::from_rows(&[&[0, 0, 0], &[0, 1, 0], &[1, 0, 0]]);
        assert_eq!(a.apply(&[3.0, 5.0, 7.0]), vec![7.0, 5.0, 0.0]);
        assert_eq!(a, ResetMap::from_sources(&[Some(2), Some(1), None]));
    }

    #[test]
    fn valid_model_has_no_violations() {
        assert!(single_node().validate().is_empty());
    }

    #[test]
    fn zero_rate_is_reported_once() {
        let mut m = single_node();
        m.transitions[1].rate = 0.0;
        assert_eq!(
            m.validate(),
            vec![Violation::BadRate {
                transition: 1,
                rate: 0.0
            }]
        );
    }

    #[test]
    fn non_finite_and_negative_rates_are_reported() {
        let mut m = single_node();
        m.transitions[0].rate = f64::NAN;
        m.transitions[1].rate = -1.0;
        assert_eq!(m.validate().len(), 2);
    }

    #[test]
    fn non_binary_reset_entry_names_position() {
        let mut m = single_node();
        m.transitions[0].reset.set(1, 0, 2);
        let v = m.validate();
        assert_eq!(
            v,
            vec![Violation::NonBinaryReset {
                transition: 0,
                row: 1,
                col: 0,
                value: 2
            }]
        );
        assert_eq!(v[0].to_string(), "transition 0 reset map has entry 2 at (1, 0)");
    }

    #[test]
    fn shape_problems_are_all_collected() {
        let m = ShsModel::new(2, 2, vec![vec![1, 3]])
            .with_transition(Transition::new(0, 5, 1.0, ResetMap::identity(3)));
        let v = m.validate();
        assert!(v.contains(&Violation::GrowthCount {
            expected: 2,
            found: 1
        }));
        assert!(v.contains(&Violation::NonBinaryGrowth {
            state: 0,
            component: 1,
            value: 3
        }));
        assert!(v.contains(&Violation::StateOutOfRange {
            transition: 0,
            endpoint: Endpoint::Dest,
            state: 5
        }));
        assert!(v.contains(&Violation::ResetDimension {
            transition: 0,
            expected: 2,
            found: 3
        }));
    }
}
