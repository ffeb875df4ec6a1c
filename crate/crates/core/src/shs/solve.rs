use serde::Serialize;

use super::model::ShsModel;
use crate::error::{LinearSystem, ShsError};
use crate::linalg::{self, DenseMatrix};

/// Correlation entries in `[-NEGATIVE_TOLERANCE, 0)` are float noise and are
/// clamped to zero; anything lower is a genuine negative solution.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Max-norm residual bound for the balance equations, per unit of rate.
const BALANCE_TOL: f64 = 1e-10;
/// Max-norm residual bound for the correlation system, per unit of rate.
const CORRELATION_TOL: f64 = 1e-9;

/// Limiting occupancy probabilities of the discrete chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryDistribution {
    probs: Vec<f64>,
}

impl StationaryDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, state: usize) -> f64 {
        self.probs[state]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Stationary probabilities, correlation vectors and the average age.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgeSolution {
    pub pi: StationaryDistribution,
    /// `v[q][j]`: limit of `E[x_j(t) 1{q(t) = q}]`.
    pub v: Vec<Vec<f64>>,
    /// Average age at the monitor, the sum over states of `v[q][0]`.
    pub delta: f64,
}

impl AgeSolution {
    pub fn age_dim(&self) -> usize {
        self.v.first().map_or(0, Vec::len)
    }

    /// `E[x_k] = sum_q v[q][k]`.
    pub fn component(&self, k: usize) -> Result<f64, ShsError> {
        let dim = self.age_dim();
        if k >= dim {
            return Err(ShsError::IndexOutOfRange { index: k, dim });
        }
        Ok(self.v.iter().map(|vq| vq[k]).sum())
    }

    /// All `E[x_k]` for `k` in `0..age_dim`.
    pub fn components(&self) -> Vec<f64> {
        (0..self.age_dim())
            .map(|k| self.v.iter().map(|vq| vq[k]).sum())
            .collect()
    }
}

/// Free-function form of [`AgeSolution::component`].
pub fn age_components(solution: &AgeSolution, k: usize) -> Result<f64, ShsError> {
    solution.component(k)
}

fn ensure_valid(model: &ShsModel) -> Result<(), ShsError> {
    let violations = model.validate();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ShsError::InvalidModel(violations))
    }
}

/// Strong connectivity of the transition digraph, ignoring self-loops.
fn check_irreducible(model: &ShsModel) -> Result<(), ShsError> {
    let n = model.state_count;
    let mut forward = vec![Vec::new(); n];
    let mut backward = vec![Vec::new(); n];
    for t in model.transitions.iter().filter(|t| !t.is_self_loop()) {
        forward[t.source].push(t.dest);
        backward[t.dest].push(t.source);
    }

    let reach = |adj: &[Vec<usize>]| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };

    if let Some(to) = reach(&forward).iter().position(|s| !s) {
        return Err(ShsError::ReducibleChain { from: 0, to });
    }
    if let Some(from) = reach(&backward).iter().position(|s| !s) {
        return Err(ShsError::ReducibleChain { from, to: 0 });
    }
    Ok(())
}

/// Balance-equation matrix `G` with `(G pi)_q = pi_q * out_q - sum_in rate * pi_src`.
/// Self-loops are dropped from both sides.
fn balance_matrix(model: &ShsModel) -> DenseMatrix {
    let mut g = DenseMatrix::zeros(model.state_count);
    for t in model.transitions.iter().filter(|t| !t.is_self_loop()) {
        g.add(t.source, t.source, t.rate);
        g.add(t.dest, t.source, -t.rate);
    }
    g
}

fn rate_scale(model: &ShsModel) -> f64 {
    (0..model.state_count)
        .map(|q| model.exit_rate(q))
        .fold(1.0, f64::max)
}

/// Max-norm residual of the balance equations at `pi`.
pub fn balance_residual(model: &ShsModel, pi: &[f64]) -> f64 {
    balance_matrix(model).residual_max(pi, &vec![0.0; model.state_count])
}

/// Unique stationary vector of the discrete chain.
///
/// The balance equation of the highest-index state is replaced by the
/// normalization constraint before the direct solve.
pub fn stationary_distribution(model: &ShsModel) -> Result<StationaryDistribution, ShsError> {
    ensure_valid(model)?;
    check_irreducible(model)?;

    let m = model.state_count;
    let mut a = balance_matrix(model);
    let last = m - 1;
    for c in 0..m {
        a.set(last, c, 1.0);
    }
    let mut rhs = vec![0.0; m];
    rhs[last] = 1.0;

    let mut probs = linalg::solve(&a, &rhs).map_err(|s| ShsError::SingularSystem {
        system: LinearSystem::Stationary,
        detail: format!("pivot {:e} at column {}", s.pivot, s.column),
    })?;

    for (q, p) in probs.iter_mut().enumerate() {
        if *p < 0.0 {
            if *p < -NEGATIVE_TOLERANCE {
                return Err(ShsError::SingularSystem {
                    system: LinearSystem::Stationary,
                    detail: format!("state {q} has probability {p:e}"),
                });
            }
            *p = 0.0;
        }
    }

    let residual = balance_residual(model, &probs);
    if residual > BALANCE_TOL * rate_scale(model) {
        return Err(ShsError::SingularSystem {
            system: LinearSystem::Stationary,
            detail: format!("balance residual {residual:e}"),
        });
    }
    Ok(StationaryDistribution { probs })
}

/// Unknown index of `v[q][j]`: state-major, then component.
#[inline]
fn unknown(age_dim: usize, q: usize, j: usize) -> usize {
    q * age_dim + j
}

/// Assembles `M v = c` for the stationary correlation vectors:
///
/// `v_q * sum_{l out of q} rate_l - sum_{l into q} rate_l * v_{src(l)} A_l = b_q pi_q`.
///
/// A self-loop at `q` whose reset keeps component `j` (`A_jj = 1`) adds
/// `+rate` and `-rate` to the same diagonal entry. Such pairs are left out
/// rather than summed, so the diagonal carries no cancellation error.
fn correlation_system(model: &ShsModel, pi: &[f64]) -> (DenseMatrix, Vec<f64>) {
    let d = model.age_dim;
    let size = model.state_count * d;
    let mut mat = DenseMatrix::zeros(size);
    let mut rhs = vec![0.0; size];

    for q in 0..model.state_count {
        for j in 0..d {
            let diag: f64 = model
                .transitions
                .iter()
                .filter(|t| t.source == q && !(t.is_self_loop() && t.reset.get(j, j) == 1))
                .map(|t| t.rate)
                .sum();
            mat.add(unknown(d, q, j), unknown(d, q, j), diag);
            rhs[unknown(d, q, j)] = f64::from(model.growth[q][j]) * pi[q];
        }
    }
    for t in &model.transitions {
        // (v_src A)_j = sum_i v_src,i A_ij
        for (i, j, a) in t.reset.nonzeros() {
            if t.is_self_loop() && i == j && a == 1 {
                continue;
            }
            mat.add(
                unknown(d, t.dest, j),
                unknown(d, t.source, i),
                -t.rate * f64::from(a),
            );
        }
    }
    (mat, rhs)
}

/// Max-norm residual of the correlation system at the solution's `v`.
pub fn age_system_residual(model: &ShsModel, solution: &AgeSolution) -> f64 {
    let (mat, rhs) = correlation_system(model, solution.pi.probs());
    let flat: Vec<f64> = solution.v.iter().flatten().copied().collect();
    mat.residual_max(&flat, &rhs)
}

/// Solves for the stationary correlation vectors and the average age.
///
/// A unique non-negative solution certifies stability of the first-moment
/// dynamics, so no transient integration is performed.
pub fn solve_age(model: &ShsModel) -> Result<AgeSolution, ShsError> {
    let pi = stationary_distribution(model)?;
    let (mat, rhs) = correlation_system(model, pi.probs());

    let flat = linalg::solve(&mat, &rhs).map_err(|s| ShsError::SingularSystem {
        system: LinearSystem::Correlation,
        detail: format!("pivot {:e} at column {}", s.pivot, s.column),
    })?;

    let residual = mat.residual_max(&flat, &rhs);
    if residual.is_nan() || residual > CORRELATION_TOL * rate_scale(model) {
        return Err(ShsError::SingularSystem {
            system: LinearSystem::Correlation,
            detail: format!("residual {residual:e}"),
        });
    }

    let d = model.age_dim;
    let mut v: Vec<Vec<f64>> = flat.chunks(d).map(<[f64]>::to_vec).collect();
    for (state, vq) in v.iter_mut().enumerate() {
        for (component, value) in vq.iter_mut().enumerate() {
            if *value < 0.0 {
                if *value < -NEGATIVE_TOLERANCE {
                    return Err(ShsError::NegativeSolution {
                        state,
                        component,
                        value: *value,
                    });
                }
                *value = 0.0;
            }
        }
    }

    let delta = v.iter().map(|vq| vq[0]).sum();
    Ok(AgeSolution { pi, v, delta })
}
