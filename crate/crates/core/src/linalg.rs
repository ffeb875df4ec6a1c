//! Dense LU factorization with partial pivoting.
//!
//! The systems assembled by the SHS solver have at most a few hundred
//! unknowns, so a row-major `Vec<f64>` and a textbook Doolittle sweep are
//! all that is needed.

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] += value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Max-norm of `A x - b`.
    pub fn residual_max(&self, x: &[f64], b: &[f64]) -> f64 {
        self.mul_vec(x)
            .iter()
            .zip(b)
            .map(|(ax, bi)| (ax - bi).abs())
            .fold(0.0, f64::max)
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Returned when a pivot falls below the rank tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singular {
    /// Elimination step at which no acceptable pivot was found.
    pub column: usize,
    pub pivot: f64,
}

/// `P A = L U`, stored packed in one matrix.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

/// Pivots smaller than this multiple of `max |a_ij|` count as zero.
pub const RELATIVE_PIVOT_TOL: f64 = 1e-12;

impl LuDecomposition {
    pub fn factor(mut a: DenseMatrix) -> Result<Self, Singular> {
        let n = a.dim;
        let threshold = a.max_abs() * RELATIVE_PIVOT_TOL;
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|r| (r, a.get(r, k).abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot.is_nan() || pivot <= threshold {
                return Err(Singular {
                    column: k,
                    pivot: a.get(p, k),
                });
            }
            if p != k {
                for c in 0..n {
                    a.data.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let diag = a.get(k, k);
            for r in k + 1..n {
                let factor = a.get(r, k) / diag;
                a.set(r, k, factor);
                if factor != 0.0 {
                    for c in k + 1..n {
                        let v = a.get(k, c);
                        a.add(r, c, -factor * v);
                    }
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.dim;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let s: f64 = (0..r).map(|c| self.lu.get(r, c) * x[c]).sum();
            x[r] -= s;
        }
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| self.lu.get(r, c) * x[c]).sum();
            x[r] = (x[r] - s) / self.lu.get(r, r);
        }
        x
    }
}

/// Error-free product: `a * b = p + e` exactly.
#[inline]
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Error-free sum: `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

/// `b - A x` evaluated as if in twice the working precision (Ogita-Rump-Oishi
/// `Dot2`), so refinement can recover accuracy lost in the factorization.
fn compensated_residual(a: &DenseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.dim())
        .map(|r| {
            let (mut s, mut c) = (b[r], 0.0);
            for (aij, xj) in a.row(r).iter().zip(x) {
                let (p, pe) = two_product(-aij, *xj);
                let (t, te) = two_sum(s, p);
                s = t;
                c += pe + te;
            }
            s + c
        })
        .collect()
}

/// Maximum number of refinement sweeps after the initial solve.
const REFINEMENT_STEPS: usize = 3;

/// Factor and solve in one step, followed by iterative refinement with a
/// compensated residual.
pub fn solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, Singular> {
    let lu = LuDecomposition::factor(a.clone())?;
    let mut x = lu.solve(b);
    for _ in 0..REFINEMENT_STEPS {
        let r = compensated_residual(a, &x, b);
        let dx = lu.solve(&r);
        let mut changed = false;
        for (xi, di) in x.iter_mut().zip(&dx) {
            let next = *xi + di;
            changed |= next != *xi;
            *xi = next;
        }
        if !changed {
            break;
        }
    }
    Ok(x)
}
