//! Feedback capacity of the Gaussian linear channel model
//! `B_i = C B_{i-1} + D A_i + V_i` under the quadratic transmission cost
//! `E[<A, R A> + <B_{i-1}, Q B_{i-1}>] <= kappa`.
//!
//! The scalar case (`p = q = 1`, `D = 1`) has closed forms for the Riccati
//! solution, the feedback gain, the optimal innovation variance, the
//! multiplier `s(kappa)`, and the capacity. The matrix case is solved
//! numerically: a fixed-point Riccati iteration for `P` and the feedback gain,
//! and projected gradient ascent over the PSD cone for the innovation
//! covariance `K_Z`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{CoreError, Result};

/// Eigenvalue/definiteness tolerance used throughout this module.
pub const EIG_TOL: f64 = 1e-10;

/// Whether the power budget is binding or the rate is pinned at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `kappa < kappa_min`: the innovation covariance hits the cone boundary
    /// and the capacity is zero.
    BelowMin,
    /// `kappa >= kappa_min`.
    Active,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::BelowMin => "belowMin",
            Regime::Active => "active",
        }
    }
}

/// Parameters of the scalar model.
#[derive(Debug, Clone, Copy)]
pub struct GaussianScalarParams {
    /// Channel pole.
    pub c: f64,
    /// Input gain; the closed forms require `d = 1`.
    pub d: f64,
    /// Input power weight, `> 0`.
    pub r: f64,
    /// Output power weight, `>= 0`.
    pub q: f64,
    /// Noise variance, `> 0`.
    pub k_v: f64,
    /// Power budget, `>= 0`.
    pub kappa: f64,
}

impl GaussianScalarParams {
    pub fn validate(&self) -> Result<()> {
        if !self.c.is_finite() || !self.d.is_finite() || self.d == 0.0 {
            return Err(CoreError::Domain(format!(
                "channel coefficients c={}, d={} must be finite with d != 0",
                self.c, self.d
            )));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(CoreError::Domain(format!("input weight r={} must be > 0", self.r)));
        }
        if !(self.q >= 0.0) || !self.q.is_finite() {
            return Err(CoreError::Domain(format!("output weight q={} must be >= 0", self.q)));
        }
        if !(self.k_v > 0.0) || !self.k_v.is_finite() {
            return Err(CoreError::Domain(format!(
                "noise variance k_v={} must be > 0",
                self.k_v
            )));
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(CoreError::Domain(format!(
                "budget kappa={} must be >= 0",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// Closed-form solution of the scalar model.
#[derive(Debug, Clone, Copy)]
pub struct GaussianScalarSolution {
    /// `sqrt((R(C-1)^2 + Q)(R(C+1)^2 + Q))`.
    pub f: f64,
    /// Riccati solution (scales linearly with `s`).
    pub p: f64,
    /// Optimal feedback gain; `|C + gamma_star| < 1` off the marginal boundary.
    pub gamma_star: f64,
    /// Optimal innovation variance, clamped at the cone boundary.
    pub k_z_star: f64,
    /// Multiplier `s(kappa) = 1 / (2 (kappa + K_V R))`.
    pub s: f64,
    /// Minimum power at which the rate becomes positive.
    pub kappa_min: f64,
    pub capacity_nats: f64,
    pub regime: Regime,
}

/// Solves the scalar model in closed form (requires `d = 1`).
pub fn scalar_solve(params: &GaussianScalarParams) -> Result<GaussianScalarSolution> {
    params.validate()?;
    if params.d != 1.0 {
        return Err(CoreError::Unsupported(format!(
            "scalar closed forms require d = 1 (got d = {}); use the matrix path",
            params.d
        )));
    }
    let (c, r, q, k_v, kappa) = (params.c, params.r, params.q, params.k_v, params.kappa);
    let f = ((r * (c - 1.0).powi(2) + q) * (r * (c + 1.0).powi(2) + q)).sqrt();
    let g = q - r + c * c * r + f;
    let h = q + r + c * c * r + f;
    let s = 1.0 / (2.0 * (kappa + k_v * r));
    let p = s * g / 2.0;
    let gamma_star = if c == 0.0 { 0.0 } else { -c * g / h };
    let kappa_min = k_v * g / 2.0;
    let k_z_unclamped = 1.0 / (s * h) - k_v;
    // the innovation sits on the cone boundary up to and including the
    // threshold (when there is one), and the rate is pinned at zero there
    let below = kappa_min > 0.0 && kappa <= kappa_min;
    let k_z_star = if below { 0.0 } else { k_z_unclamped.max(0.0) };
    let capacity_nats = if below {
        0.0
    } else {
        0.5 * ((2.0 * (kappa + k_v * r)) / (k_v * h)).ln()
    };
    Ok(GaussianScalarSolution {
        f,
        p,
        gamma_star,
        k_z_star,
        s,
        kappa_min,
        capacity_nats,
        regime: if below { Regime::BelowMin } else { Regime::Active },
    })
}

/// Long-run average power `E[R A^2 + Q B_{i-1}^2]` achieved by the returned
/// strategy `(gamma_star, k_z_star)` in closed loop. Infinite if the loop is
/// not strictly stable.
pub fn scalar_achieved_power(params: &GaussianScalarParams, sol: &GaussianScalarSolution) -> f64 {
    let loop_gain = params.c + sol.gamma_star;
    let contraction = 1.0 - loop_gain * loop_gain;
    if contraction <= 0.0 {
        return f64::INFINITY;
    }
    let k_b = (sol.k_z_star + params.k_v) / contraction;
    params.r * (sol.gamma_star * sol.gamma_star * k_b + sol.k_z_star) + params.q * k_b
}

/// Rate lost to channel instability in the `Q = 0`, `R = D = 1` regime:
/// capacity of a stable pole minus capacity of an unstable pole at the same
/// budget. Equals `ln|C_u|` once the budget covers `kappa_min` and the full
/// stable-channel rate below it.
pub fn rate_loss(stable: &GaussianScalarParams, unstable: &GaussianScalarParams) -> Result<f64> {
    stable.validate()?;
    unstable.validate()?;
    for (p, name) in [(stable, "stable"), (unstable, "unstable")] {
        if p.q != 0.0 || p.r != 1.0 || p.d != 1.0 {
            return Err(CoreError::Domain(format!(
                "rate_loss requires Q = 0, R = D = 1 ({name} params violate this)"
            )));
        }
    }
    if stable.c.abs() >= 1.0 {
        return Err(CoreError::Domain(format!(
            "stable pole |C| = {} must be < 1",
            stable.c.abs()
        )));
    }
    if unstable.c.abs() < 1.0 {
        return Err(CoreError::Domain(format!(
            "unstable pole |C| = {} must be >= 1",
            unstable.c.abs()
        )));
    }
    if stable.k_v != unstable.k_v || stable.kappa != unstable.kappa {
        return Err(CoreError::Domain(
            "rate_loss compares the two poles at the same noise level and budget".into(),
        ));
    }
    let kappa = unstable.kappa;
    let k_v = unstable.k_v;
    let kappa_min = (unstable.c * unstable.c - 1.0) * k_v;
    Ok(if kappa >= kappa_min {
        unstable.c.abs().ln()
    } else {
        0.5 * (1.0 + kappa / k_v).ln()
    })
}

/// Parameters of the matrix model.
#[derive(Debug, Clone)]
pub struct GaussianMatrixParams {
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub k_v: DMatrix<f64>,
    pub kappa: f64,
}

fn check_symmetric(m: &DMatrix<f64>, name: &str) -> Result<()> {
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > EIG_TOL * scale {
                return Err(CoreError::Domain(format!("{name} must be symmetric")));
            }
        }
    }
    Ok(())
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

impl GaussianMatrixParams {
    pub fn new(
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        r: DMatrix<f64>,
        q: DMatrix<f64>,
        k_v: DMatrix<f64>,
        kappa: f64,
    ) -> Result<Self> {
        let p = c.nrows();
        if c.ncols() != p || q.nrows() != p || q.ncols() != p || k_v.nrows() != p || k_v.ncols() != p
        {
            return Err(CoreError::Domain(
                "C, Q, K_V must be square with matching dimension p".into(),
            ));
        }
        let qdim = d.ncols();
        if d.nrows() != p || r.nrows() != qdim || r.ncols() != qdim {
            return Err(CoreError::Domain(
                "D must be p x q and R must be q x q".into(),
            ));
        }
        check_symmetric(&r, "R")?;
        check_symmetric(&q, "Q")?;
        check_symmetric(&k_v, "K_V")?;
        if min_eigenvalue(&r) <= EIG_TOL {
            return Err(CoreError::Domain("R must be positive definite".into()));
        }
        if min_eigenvalue(&q) < -EIG_TOL {
            return Err(CoreError::Domain("Q must be positive semidefinite".into()));
        }
        if min_eigenvalue(&k_v) <= EIG_TOL {
            return Err(CoreError::Domain("K_V must be positive definite".into()));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(CoreError::Domain(format!("budget kappa={kappa} must be >= 0")));
        }
        Ok(Self { c, d, r, q, k_v, kappa })
    }

    pub fn state_dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.d.ncols()
    }
}

/// Riccati fixed point and the induced feedback gain.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub p: DMatrix<f64>,
    pub gamma_star: DMatrix<f64>,
    /// Spectral radius of `C + D gamma_star` strictly inside the unit disc.
    pub stable: bool,
    pub iterations: usize,
    pub residual: f64,
}

pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Solves `P = C' P C + s Q - C' P D (D' P D + s R)^{-1} (C' P D)'` by
/// fixed-point iteration and returns the stabilizing gain
/// `gamma_star = -(D' P D + s R)^{-1} D' P C`.
///
/// The iteration starts from the identity rather than zero: with `Q = 0` and
/// an unstable `C`, zero is a fixed point but not the stabilizing solution.
pub fn matrix_riccati_solve(
    params: &GaussianMatrixParams,
    s: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RiccatiSolution> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(CoreError::Domain(format!("multiplier s={s} must be > 0")));
    }
    if tol <= 0.0 {
        return Err(CoreError::Domain("riccati tolerance must be > 0".into()));
    }
    let pdim = params.state_dim();
    let mut p = DMatrix::<f64>::identity(pdim, pdim);
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        let dpd = params.d.transpose() * &p * &params.d + s * &params.r;
        let inv = dpd.clone().try_inverse().ok_or_else(|| {
            CoreError::Domain("D' P D + s R is singular (R must be positive definite)".into())
        })?;
        let cpd = params.c.transpose() * &p * &params.d;
        let next =
            params.c.transpose() * &p * &params.c + s * &params.q - &cpd * inv * cpd.transpose();
        residual = (&next - &p).amax();
        let scale = next.amax().max(1.0);
        p = next;
        if residual < tol * scale {
            let dpd = params.d.transpose() * &p * &params.d + s * &params.r;
            let gamma = -dpd
                .try_inverse()
                .ok_or_else(|| CoreError::Domain("D' P D + s R is singular".into()))?
                * params.d.transpose()
                * &p
                * &params.c;
            let closed = &params.c + &params.d * &gamma;
            return Ok(RiccatiSolution {
                p,
                gamma_star: gamma,
                stable: spectral_radius(&closed) < 1.0 - 1e-9,
                iterations: iter,
                residual,
            });
        }
    }
    Err(CoreError::NonConvergence {
        what: "riccati fixed-point iteration".into(),
        iterations: max_iter,
        residual,
    })
}

/// Optimal innovation covariance and per-unit-time value at a fixed
/// multiplier.
#[derive(Debug, Clone)]
pub struct MatrixInnovationSolution {
    pub k_z_star: DMatrix<f64>,
    /// `j_star = 1/2 ln|D K D' + K_V| - 1/2 ln|K_V| + s kappa - tr(s R K) -
    /// tr(P [D K D' + K_V])`.
    pub j_star: f64,
    /// Projected-gradient fixed-point residual at exit.
    pub kkt_residual: f64,
}

fn log_det(m: &DMatrix<f64>) -> Option<f64> {
    m.clone().cholesky().map(|ch| {
        let l = ch.l();
        (0..m.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0
    })
}

fn psd_project(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut acc = DMatrix::<f64>::zeros(m.nrows(), m.ncols());
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 0.0 {
            let v = eig.eigenvectors.column(k);
            acc += lambda * &v * v.transpose();
        }
    }
    acc
}

/// Maximizes the innovation objective over the PSD cone by projected gradient
/// ascent with backtracking, multi-start. Scalar instances reproduce the
/// closed form.
pub fn matrix_j_star(
    params: &GaussianMatrixParams,
    s: f64,
    p: &DMatrix<f64>,
    tol: f64,
) -> Result<MatrixInnovationSolution> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(CoreError::Domain(format!("multiplier s={s} must be > 0")));
    }
    let qdim = params.input_dim();
    let ln_det_kv = log_det(&params.k_v)
        .ok_or_else(|| CoreError::Domain("K_V must be positive definite".into()))?;
    let objective = |k: &DMatrix<f64>| -> f64 {
        let inner = &params.d * k * params.d.transpose() + &params.k_v;
        match log_det(&inner) {
            Some(ld) => {
                0.5 * ld - 0.5 * ln_det_kv + s * params.kappa
                    - s * (&params.r * k).trace()
                    - (p * inner).trace()
            }
            None => f64::NEG_INFINITY,
        }
    };
    let gradient = |k: &DMatrix<f64>| -> Option<DMatrix<f64>> {
        let inner = &params.d * k * params.d.transpose() + &params.k_v;
        let inv = inner.try_inverse()?;
        Some(
            0.5 * params.d.transpose() * inv * &params.d
                - s * &params.r
                - params.d.transpose() * p * &params.d,
        )
    };

    let mut starts: Vec<DMatrix<f64>> = vec![
        DMatrix::zeros(qdim, qdim),
        DMatrix::identity(qdim, qdim) * 0.1,
        DMatrix::identity(qdim, qdim),
        DMatrix::identity(qdim, qdim) * 10.0,
    ];
    {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0x6a55_1a2b);
        for _ in 0..4 {
            let a = DMatrix::from_fn(qdim, qdim, |_, _| rng.random_range(-1.0..1.0));
            starts.push(&a * a.transpose());
        }
    }

    // starts run in parallel; ties reduce to the earliest start
    let results: Vec<(f64, DMatrix<f64>, f64)> = starts
        .into_par_iter()
        .map(|start| {
            let mut k = psd_project(&start);
            let mut val = objective(&k);
            let mut kkt = f64::INFINITY;
            // step adapts upward so badly conditioned directions still move
            let mut step = 1.0;
            for _ in 0..20_000 {
                let Some(g) = gradient(&k) else { break };
                // projected-gradient fixed-point residual at unit step
                let moved = psd_project(&(&k + &g));
                kkt = (&moved - &k).amax();
                if kkt < tol {
                    break;
                }
                step *= 4.0;
                let mut improved = false;
                for _ in 0..90 {
                    let cand = psd_project(&(&k + step * &g));
                    let cv = objective(&cand);
                    if cv > val + 1e-16 {
                        k = cand;
                        val = cv;
                        improved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !improved {
                    break;
                }
            }
            (val, k, kkt)
        })
        .collect();
    let mut best = 0;
    for i in 1..results.len() {
        if results[i].0 > results[best].0 {
            best = i;
        }
    }
    let (j_star, k_z_star, kkt_residual) =
        results.into_iter().nth(best).expect("at least one start");
    if !kkt_residual.is_finite() || kkt_residual > tol.max(1e-7) * 100.0 {
        return Err(CoreError::NonConvergence {
            what: "innovation covariance ascent".into(),
            iterations: 20_000,
            residual: kkt_residual,
        });
    }
    Ok(MatrixInnovationSolution {
        k_z_star,
        j_star,
        kkt_residual,
    })
}

/// Capacity of the matrix model via the dual: minimizes the convex map
/// `s -> j_star(s)` by golden-section search (no matrix closed form for
/// `s(kappa)` is available, unlike the scalar case).
#[derive(Debug, Clone)]
pub struct MatrixCapacitySolution {
    pub s_star: f64,
    pub capacity_nats: f64,
    pub k_z_star: DMatrix<f64>,
    pub gamma_star: DMatrix<f64>,
    pub stable: bool,
    pub regime: Regime,
}

pub fn matrix_capacity_solve(
    params: &GaussianMatrixParams,
    tol: f64,
) -> Result<MatrixCapacitySolution> {
    let eval = |s: f64| -> Result<(f64, RiccatiSolution, MatrixInnovationSolution)> {
        let ric = matrix_riccati_solve(params, s, 1e-13, 200_000)?;
        let inn = matrix_j_star(params, s, &ric.p, tol.min(1e-9))?;
        Ok((inn.j_star, ric, inn))
    };
    // golden section on ln s; j_star(s) is convex in s, hence unimodal
    let (mut lo, mut hi) = (1e-8f64.ln(), 1e6f64.ln());
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut m1 = hi - phi * (hi - lo);
    let mut m2 = lo + phi * (hi - lo);
    let mut f1 = eval(m1.exp())?.0;
    let mut f2 = eval(m2.exp())?.0;
    for _ in 0..90 {
        if f1 <= f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - phi * (hi - lo);
            f1 = eval(m1.exp())?.0;
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + phi * (hi - lo);
            f2 = eval(m2.exp())?.0;
        }
    }
    let s_star = (0.5 * (lo + hi)).exp();
    let (value, ric, inn) = eval(s_star)?;
    let below = value < 0.0;
    Ok(MatrixCapacitySolution {
        s_star,
        capacity_nats: if below { 0.0 } else { value },
        k_z_star: inn.k_z_star,
        gamma_star: ric.gamma_star,
        stable: ric.stable,
        regime: if below { Regime::BelowMin } else { Regime::Active },
    })
}

/// Achieved long-run average power of a matrix strategy `(gamma, K_Z)`:
/// solves the closed-loop Lyapunov equation for the output covariance.
pub fn matrix_achieved_power(
    params: &GaussianMatrixParams,
    gamma: &DMatrix<f64>,
    k_z: &DMatrix<f64>,
) -> Result<f64> {
    let closed = &params.c + &params.d * gamma;
    if spectral_radius(&closed) >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let pdim = params.state_dim();
    let w = &params.d * k_z * params.d.transpose() + &params.k_v;
    // vec(K_B) = (I - closed (x) closed)^{-1} vec(W)
    let kron = closed.kronecker(&closed);
    let sys = DMatrix::<f64>::identity(pdim * pdim, pdim * pdim) - kron;
    let wvec = DVector::from_iterator(pdim * pdim, w.iter().cloned());
    let kb_vec = sys
        .lu()
        .solve(&wvec)
        .ok_or_else(|| CoreError::Domain("closed-loop Lyapunov solve failed".into()))?;
    let k_b = DMatrix::from_iterator(pdim, pdim, kb_vec.iter().cloned());
    let input_cov = gamma * &k_b * gamma.transpose() + k_z;
    Ok((&params.r * input_cov).trace() + (&params.q * k_b).trace())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(c: f64, q: f64, r: f64, k_v: f64, kappa: f64) -> GaussianScalarParams {
        GaussianScalarParams {
            c,
            d: 1.0,
            r,
            q,
            k_v,
            kappa,
        }
    }

    #[test]
    fn unstable_q0_at_threshold() {
        let sol = scalar_solve(&scalar(2.0, 0.0, 1.0, 1.0, 3.0)).unwrap();
        assert_eq!(sol.kappa_min, 3.0);
        assert_eq!(sol.capacity_nats, 0.0);
        assert!((sol.gamma_star + 1.5).abs() < 1e-15);
        assert_eq!(sol.k_z_star, 0.0);
        // the innovation is exactly on the cone boundary at the threshold
        assert_eq!(sol.regime, Regime::BelowMin);
        let above = scalar_solve(&scalar(2.0, 0.0, 1.0, 1.0, 3.0 + 1e-9)).unwrap();
        assert_eq!(above.regime, Regime::Active);
    }

    #[test]
    fn stable_q0_is_memoryless() {
        let sol = scalar_solve(&scalar(0.5, 0.0, 1.0, 1.0, 1.0)).unwrap();
        assert!((sol.capacity_nats - 0.5 * 2.0f64.ln()).abs() < 1e-15);
        assert_eq!(sol.gamma_star, 0.0);
        assert!((sol.k_z_star - 1.0).abs() < 1e-12);
        assert_eq!(sol.kappa_min, 0.0);
    }

    #[test]
    fn q1_r1_c1_closed_form() {
        let sol = scalar_solve(&scalar(1.0, 1.0, 1.0, 1.0, 2.0)).unwrap();
        let sqrt5 = 5.0f64.sqrt();
        assert!((sol.f - sqrt5).abs() < 1e-14);
        assert!((sol.kappa_min - (sqrt5 + 1.0) / 2.0).abs() < 1e-14);
        let expect = 0.5 * (6.0 / (sqrt5 + 3.0)).ln();
        assert!((sol.capacity_nats - expect).abs() < 1e-14);
    }

    #[test]
    fn achieved_power_meets_budget_when_active() {
        for (c, q, r, k_v, kappa) in [
            (1.0, 1.0, 1.0, 1.0, 2.0),
            (2.0, 0.0, 1.0, 1.0, 7.0),
            (0.5, 0.3, 1.5, 0.7, 4.0),
            (-1.4, 0.2, 0.6, 1.3, 9.0),
        ] {
            let params = scalar(c, q, r, k_v, kappa);
            let sol = scalar_solve(&params).unwrap();
            assert_eq!(sol.regime, Regime::Active);
            let power = scalar_achieved_power(&params, &sol);
            assert!(
                (power - kappa).abs() < 1e-10,
                "achieved {power} vs budget {kappa}"
            );
        }
    }

    #[test]
    fn below_min_strategy_spends_kappa_min() {
        let params = scalar(2.0, 0.0, 1.0, 1.0, 1.0);
        let sol = scalar_solve(&params).unwrap();
        assert_eq!(sol.regime, Regime::BelowMin);
        assert_eq!(sol.capacity_nats, 0.0);
        assert_eq!(sol.k_z_star, 0.0);
        let power = scalar_achieved_power(&params, &sol);
        assert!((power - sol.kappa_min).abs() < 1e-12);
    }

    #[test]
    fn rate_loss_branches() {
        let stable = scalar(0.5, 0.0, 1.0, 1.0, 7.0);
        let unstable = scalar(2.0, 0.0, 1.0, 1.0, 7.0);
        let loss = rate_loss(&stable, &unstable).unwrap();
        assert!((loss - 2.0f64.ln()).abs() < 1e-15);

        // boundary kappa = kappa_min: both branches agree
        let stable = scalar(0.5, 0.0, 1.0, 1.0, 3.0);
        let unstable = scalar(2.0, 0.0, 1.0, 1.0, 3.0);
        let loss = rate_loss(&stable, &unstable).unwrap();
        assert!((loss - 0.5 * 4.0f64.ln()).abs() < 1e-15);

        // |C| = 1 edge: kappa_min = 0, loss = 0
        let stable = scalar(0.0, 0.0, 1.0, 1.0, 2.0);
        let unit = scalar(1.0, 0.0, 1.0, 1.0, 2.0);
        assert_eq!(rate_loss(&stable, &unit).unwrap(), 0.0);
    }

    fn scalar_matrix(c: f64, q: f64, r: f64, k_v: f64, kappa: f64) -> GaussianMatrixParams {
        GaussianMatrixParams::new(
            DMatrix::from_element(1, 1, c),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, r),
            DMatrix::from_element(1, 1, q),
            DMatrix::from_element(1, 1, k_v),
            kappa,
        )
        .unwrap()
    }

    #[test]
    fn riccati_scalar_embeddings() {
        // Q=0, C=2: P = 3s for any s
        for s in [0.07, 1.0, 4.2] {
            let params = scalar_matrix(2.0, 0.0, 1.0, 1.0, 7.0);
            let sol = matrix_riccati_solve(&params, s, 1e-13, 100_000).unwrap();
            assert!((sol.p[(0, 0)] - 3.0 * s).abs() < 1e-10, "s={s}");
            assert!((sol.gamma_star[(0, 0)] + 1.5).abs() < 1e-10);
            assert!(sol.stable);
        }
        // Q=0, |C|<1: P = 0, gamma = 0
        let params = scalar_matrix(0.6, 0.0, 1.0, 1.0, 1.0);
        let sol = matrix_riccati_solve(&params, 0.8, 1e-13, 100_000).unwrap();
        assert!(sol.p[(0, 0)].abs() < 1e-11);
        assert!(sol.gamma_star[(0, 0)].abs() < 1e-11);
        assert!(sol.stable);
        // Q=R=1, C=1, s=0.25: P = 0.25 (1 + sqrt 5)/2
        let params = scalar_matrix(1.0, 1.0, 1.0, 1.0, 1.0);
        let sol = matrix_riccati_solve(&params, 0.25, 1e-14, 100_000).unwrap();
        let expect = 0.25 * (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((sol.p[(0, 0)] - expect).abs() < 1e-11);
    }

    #[test]
    fn innovation_scalar_closed_form() {
        // Q=0, R=1, C=2, K_V=1, kappa=7 with s = s(kappa) = 1/16
        let params = scalar_matrix(2.0, 0.0, 1.0, 1.0, 7.0);
        let s = 1.0 / 16.0;
        let ric = matrix_riccati_solve(&params, s, 1e-14, 100_000).unwrap();
        let inn = matrix_j_star(&params, s, &ric.p, 1e-11).unwrap();
        assert!((inn.k_z_star[(0, 0)] - 1.0).abs() < 1e-8);
        assert!((inn.j_star - 0.5 * 2.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn innovation_at_threshold_sits_on_cone_boundary() {
        // kappa = kappa_min = 3: K_Z* = 0 and j_star = 0
        let params = scalar_matrix(2.0, 0.0, 1.0, 1.0, 3.0);
        let s = 1.0 / (2.0 * (3.0 + 1.0));
        let ric = matrix_riccati_solve(&params, s, 1e-14, 100_000).unwrap();
        let inn = matrix_j_star(&params, s, &ric.p, 1e-11).unwrap();
        assert!(inn.k_z_star[(0, 0)].abs() < 1e-9);
        assert!(inn.j_star.abs() < 1e-10);
    }

    #[test]
    fn innovation_block_diagonal_decouples() {
        // blocks: (C=2, Q=0, R=1, K_V=1, kappa=7) and (C=0.5, Q=0, R=1,
        // K_V=2, kappa=6); both have s(kappa) = 1/16
        let s = 1.0 / 16.0;
        let c = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        let params = GaussianMatrixParams::new(
            c,
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2),
            DMatrix::zeros(2, 2),
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])),
            13.0,
        )
        .unwrap();
        let ric = matrix_riccati_solve(&params, s, 1e-14, 100_000).unwrap();
        assert!((ric.p[(0, 0)] - 3.0 * s).abs() < 1e-10);
        assert!(ric.p[(1, 1)].abs() < 1e-10);
        let inn = matrix_j_star(&params, s, &ric.p, 1e-11).unwrap();
        assert!((inn.k_z_star[(0, 0)] - 1.0).abs() < 1e-7);
        assert!((inn.k_z_star[(1, 1)] - 6.0).abs() < 1e-7);
        assert!(inn.k_z_star[(0, 1)].abs() < 1e-7);
        let s1 = 0.5 * 8.0f64.ln() - 2.0f64.ln();
        let s2 = 0.5 * 4.0f64.ln();
        assert!((inn.j_star - (s1 + s2)).abs() < 1e-8);
    }

    #[test]
    fn matrix_capacity_matches_scalar_closed_form() {
        for (c, q, r, k_v, kappa) in [(2.0, 0.0, 1.0, 1.0, 7.0), (1.0, 1.0, 1.0, 1.0, 2.0)] {
            let scalar_sol = scalar_solve(&scalar(c, q, r, k_v, kappa)).unwrap();
            let msol = matrix_capacity_solve(&scalar_matrix(c, q, r, k_v, kappa), 1e-10).unwrap();
            assert!(
                (msol.capacity_nats - scalar_sol.capacity_nats).abs() < 1e-6,
                "matrix {} vs scalar {}",
                msol.capacity_nats,
                scalar_sol.capacity_nats
            );
        }
    }

    #[test]
    fn scalar_rejects_unsupported_closed_forms() {
        let mut p = scalar(0.5, 0.0, 1.0, 1.0, 1.0);
        p.d = 2.0;
        assert!(matches!(scalar_solve(&p), Err(CoreError::Unsupported(_))));
        p.d = 1.0;
        p.k_v = 0.0;
        assert!(scalar_solve(&p).is_err());
        p.k_v = 1.0;
        p.r = 0.0;
        assert!(scalar_solve(&p).is_err());
    }
}
