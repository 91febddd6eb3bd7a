use crate::error::{dim_err, Error, Result};
use crate::linalg::{expm, Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDomain {
    Continuous,
    Discrete,
}

/// `x' = A x + B u` (continuous) or `x+ = A x + B u` (discrete).
#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    a: Matrix,
    b: Matrix,
    domain: TimeDomain,
}

impl LtiSystem {
    pub fn new(a: Matrix, b: Matrix, domain: TimeDomain) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                context: "system matrix A",
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        if b.nrows() != a.nrows() {
            return Err(dim_err("input matrix B rows", a.nrows(), b.nrows()));
        }
        if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("system matrices"));
        }
        Ok(Self { a, b, domain })
    }

    pub fn continuous(a: Matrix, b: Matrix) -> Result<Self> {
        Self::new(a, b, TimeDomain::Continuous)
    }

    pub fn discrete(a: Matrix, b: Matrix) -> Result<Self> {
        Self::new(a, b, TimeDomain::Discrete)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn domain(&self) -> TimeDomain {
        self.domain
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    /// `[A B]`.
    pub fn stacked(&self) -> Matrix {
        let n = self.state_dim();
        let m = self.input_dim();
        let mut k = Matrix::zeros(n, n + m);
        k.columns_mut(0, n).copy_from(&self.a);
        k.columns_mut(n, m).copy_from(&self.b);
        k
    }

    /// One discrete step `A x + B u`.
    pub fn step(&self, x: &Vector, u: &Vector) -> Result<Vector> {
        if x.len() != self.state_dim() {
            return Err(dim_err("state vector", self.state_dim(), x.len()));
        }
        if u.len() != self.input_dim() {
            return Err(dim_err("input vector", self.input_dim(), u.len()));
        }
        Ok(&self.a * x + &self.b * u)
    }

    /// Zero-order-hold discretization `(e^{A tau}, int_0^tau e^{A s} ds B)`.
    pub fn zero_order_hold(&self, tau: f64) -> Result<LtiSystem> {
        let n = self.state_dim();
        let m = self.input_dim();
        let mut aug = Matrix::zeros(n + m, n + m);
        aug.view_mut((0, 0), (n, n)).copy_from(&(&self.a * tau));
        aug.view_mut((0, n), (n, m)).copy_from(&(&self.b * tau));
        let e = expm(&aug)?;
        LtiSystem::discrete(
            e.view((0, 0), (n, n)).into_owned(),
            e.view((0, n), (n, m)).into_owned(),
        )
    }
}
