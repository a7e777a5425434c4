//! Dynamic-programming solvers over `J`-window states: per-stage concave
//! maximization, backward finite-horizon recursion, relative value iteration
//! for the per-unit-time value, and Lagrangian dual search over the cost
//! multiplier.
//!
//! The optimal input distribution of a channel with output memory `M` and a
//! cost with output memory `K` conditions on the last `J = max(M, K)` outputs
//! only, so every recursion here runs over the `|B|^J` window states.

use rayon::prelude::*;

use crate::channel::{FiniteChannelKernel, MarkovInputPolicy, TransmissionCost};
use crate::error::{CoreError, Result};
use crate::prob::{shift_state, state_count, Simplex};

/// Default multiplier upper bound for the dual bracket search.
pub const DEFAULT_S_MAX: f64 = 1e6;

/// One per-state stage problem: channel rows lifted to a `J`-state plus a
/// linear reward per input (Lagrangian cost and continuation value folded in).
#[derive(Debug, Clone)]
pub struct StageProblem {
    /// `rows[a]` = Q(. | s_M, a) for the stage's state.
    pub rows: Vec<Vec<f64>>,
    /// `rewards[a]` = -s_L gamma(a, s_K) + sum_b Q(b|s_M,a) C_next(shift(s,b)).
    pub rewards: Vec<f64>,
}

impl StageProblem {
    /// Builds the stage problem at `state` (a `J`-window index).
    pub fn at_state(
        channel: &FiniteChannelKernel,
        cost: Option<&TransmissionCost>,
        multiplier: f64,
        policy_memory: usize,
        state: usize,
        continuation: Option<&ValueFunction>,
    ) -> Result<Self> {
        let in_size = channel.input_alphabet().size();
        let out_size = channel.output_alphabet().size();
        let mut rows = Vec::with_capacity(in_size);
        let mut rewards = Vec::with_capacity(in_size);
        for a in 0..in_size {
            let q = channel.row_for_window(state, a);
            let mut r = 0.0;
            if let Some(c) = cost {
                r -= multiplier * c.cost_for_window(state, a);
            }
            if let Some(next) = continuation {
                for (b, &qb) in q.iter().enumerate() {
                    if qb > 0.0 {
                        r += qb * next.values[shift_state(state, b, policy_memory, out_size)?];
                    }
                }
            }
            if !r.is_finite() {
                return Err(CoreError::Domain(format!(
                    "non-finite stage reward at state {state}, input {a}"
                )));
            }
            rows.push(q.to_vec());
            rewards.push(r);
        }
        Ok(Self { rows, rewards })
    }

    /// The stage objective `F(pi) = sum_a pi(a) [KL(Q_a || nu_pi) + r(a)]`.
    pub fn objective(&self, pi: &[f64]) -> f64 {
        let nb = self.rows[0].len();
        let mut nu = vec![0.0; nb];
        for (a, row) in self.rows.iter().enumerate() {
            for (b, &qb) in row.iter().enumerate() {
                nu[b] += pi[a] * qb;
            }
        }
        let mut f = 0.0;
        for (a, row) in self.rows.iter().enumerate() {
            if pi[a] == 0.0 {
                continue;
            }
            let mut d = self.rewards[a];
            for (b, &qb) in row.iter().enumerate() {
                if qb > 0.0 {
                    d += qb * (qb / nu[b]).ln();
                }
            }
            f += pi[a] * d;
        }
        f
    }
}

/// Result of one per-stage maximization.
#[derive(Debug, Clone)]
pub struct StageSolution {
    pub pi: Simplex,
    pub value: f64,
    /// Optimality bracket `max_a [KL + r] - F(pi)` at exit.
    pub bracket: f64,
    pub iterations: usize,
}

/// Maximizes `F(pi) = sum_a pi(a)[KL(Q_a || nu_pi) + r(a)]` over the input
/// simplex by the multiplicative Blahut-Arimoto update with the reward in the
/// exponent. `F` is mutual information plus a linear term, hence concave; the
/// fixed point is the global maximum and `max_a[KL + r] - F` brackets the gap.
///
/// When the optimum sits on the simplex boundary with a touching inactive
/// input, the multiplicative update closes the bracket only at O(1/k); for
/// two-input problems a golden-section polish on the one-dimensional concave
/// objective then certifies the gap directly.
pub fn stage_maximize(problem: &StageProblem, tol: f64, max_iter: usize) -> Result<StageSolution> {
    let na = problem.rows.len();
    let nb = problem.rows[0].len();
    if tol <= 0.0 {
        return Err(CoreError::Domain("stage tolerance must be > 0".into()));
    }
    // cap the multiplicative phase when a 1-D polish is available
    let ba_iters = if na == 2 { max_iter.min(5_000) } else { max_iter };
    let mut pi = vec![1.0 / na as f64; na];
    let mut d = vec![0.0; na];
    let mut nu = vec![0.0; nb];
    for iter in 1..=ba_iters {
        for nb_ in nu.iter_mut() {
            *nb_ = 0.0;
        }
        for a in 0..na {
            if pi[a] > 0.0 {
                for (b, &qb) in problem.rows[a].iter().enumerate() {
                    nu[b] += pi[a] * qb;
                }
            }
        }
        // d(a) = KL(Q_a || nu) + r(a); +inf when input a reaches an output of
        // nu-measure zero (only possible once pi(a) has underflowed to 0)
        let mut max_d = f64::NEG_INFINITY;
        for a in 0..na {
            let mut v = problem.rewards[a];
            for (b, &qb) in problem.rows[a].iter().enumerate() {
                if qb > 0.0 {
                    if nu[b] <= 0.0 {
                        v = f64::INFINITY;
                        break;
                    }
                    v += qb * (qb / nu[b]).ln();
                }
            }
            d[a] = v;
            if v > max_d {
                max_d = v;
            }
        }
        let f: f64 = (0..na).filter(|&a| pi[a] > 0.0).map(|a| pi[a] * d[a]).sum();
        let bracket = max_d - f;
        if bracket < tol {
            return Ok(StageSolution {
                pi: Simplex::from_weights(&pi).expect("BA iterate is a distribution"),
                value: f,
                bracket,
                iterations: iter,
            });
        }
        if max_d.is_infinite() {
            // limit of the multiplicative update: all mass on the unreached inputs
            let mut total = 0.0;
            for a in 0..na {
                pi[a] = if d[a].is_infinite() { 1.0 } else { 0.0 };
                total += pi[a];
            }
            for p in pi.iter_mut() {
                *p /= total;
            }
            continue;
        }
        let mut total = 0.0;
        for a in 0..na {
            pi[a] *= (d[a] - max_d).exp();
            total += pi[a];
        }
        for p in pi.iter_mut() {
            *p /= total;
        }
    }
    if na == 2 {
        if let Some(sol) = polish_two_input(problem, tol) {
            return Ok(sol);
        }
    }
    // recompute the final value for the error payload
    let f = problem.objective(&pi);
    let max_d = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Err(CoreError::StageNonConvergence {
        iterations: max_iter,
        bracket: max_d - f,
        best_policy: pi,
        best_value: f,
    })
}

/// Golden-section maximization of the two-input stage objective over
/// `pi = (p, 1-p)`, with the bracket recomputed at the result.
fn polish_two_input(problem: &StageProblem, tol: f64) -> Option<StageSolution> {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let eval = |p: f64| problem.objective(&[p, 1.0 - p]);
    let mut m1 = hi - phi * (hi - lo);
    let mut m2 = lo + phi * (hi - lo);
    let mut f1 = eval(m1);
    let mut f2 = eval(m2);
    for _ in 0..220 {
        if f1 >= f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - phi * (hi - lo);
            f1 = eval(m1);
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + phi * (hi - lo);
            f2 = eval(m2);
        }
    }
    // snap to the simplex boundary when it is strictly better
    let mut p = 0.5 * (lo + hi);
    for cand in [0.0, 1.0] {
        if eval(cand) > eval(p) {
            p = cand;
        }
    }
    let pi = vec![p, 1.0 - p];
    let f = eval(p);
    let mut nu = vec![0.0; problem.rows[0].len()];
    for (a, row) in problem.rows.iter().enumerate() {
        for (b, &qb) in row.iter().enumerate() {
            nu[b] += pi[a] * qb;
        }
    }
    let mut max_d = f64::NEG_INFINITY;
    for a in 0..2 {
        let mut v = problem.rewards[a];
        for (b, &qb) in problem.rows[a].iter().enumerate() {
            if qb > 0.0 {
                if nu[b] <= 0.0 {
                    return None;
                }
                v += qb * (qb / nu[b]).ln();
            }
        }
        max_d = max_d.max(v);
    }
    let bracket = max_d - f;
    if bracket < tol {
        Some(StageSolution {
            pi: Simplex::from_weights(&pi).expect("distribution"),
            value: f,
            bracket,
            iterations: 220,
        })
    } else {
        None
    }
}

/// Value table over `J`-window states, in nats.
#[derive(Debug, Clone)]
pub struct ValueFunction {
    pub values: Vec<f64>,
}

impl ValueFunction {
    pub fn zeros(states: usize) -> Self {
        Self {
            values: vec![0.0; states],
        }
    }

    pub fn span(&self) -> f64 {
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Policy memory for a channel/cost pair: `J = max(M, K)`.
pub fn policy_memory(channel: &FiniteChannelKernel, cost: Option<&TransmissionCost>) -> usize {
    channel.memory().max(cost.map_or(0, |c| c.memory()))
}

fn window_states(channel: &FiniteChannelKernel, j: usize) -> Result<usize> {
    state_count(j, channel.output_alphabet().size())
}

/// One backward sweep: applies the stage operator to `continuation` at every
/// state. States are independent; the sweep reduces in ascending state order.
fn sweep(
    channel: &FiniteChannelKernel,
    cost: Option<&TransmissionCost>,
    multiplier: f64,
    j: usize,
    continuation: Option<&ValueFunction>,
    tol: f64,
    max_iter: usize,
) -> Result<(ValueFunction, Vec<Simplex>)> {
    let states = window_states(channel, j)?;
    let solved: Vec<Result<StageSolution>> = (0..states)
        .into_par_iter()
        .map(|s| {
            let problem =
                StageProblem::at_state(channel, cost, multiplier, j, s, continuation)?;
            stage_maximize(&problem, tol, max_iter)
        })
        .collect();
    let mut values = Vec::with_capacity(states);
    let mut rows = Vec::with_capacity(states);
    for r in solved {
        let sol = r?;
        values.push(sol.value);
        rows.push(sol.pi);
    }
    Ok((ValueFunction { values }, rows))
}

/// Result of the backward finite-horizon recursion.
#[derive(Debug, Clone)]
pub struct FiniteHorizonSolve {
    /// `int C_0 dmu`: the horizon value averaged over the initial window.
    pub value: f64,
    /// `C_0` itself.
    pub initial_values: ValueFunction,
    /// Per-stage policies, `policies[t]` used at time `t`.
    pub policies: Vec<MarkovInputPolicy>,
}

/// Backward dynamic programming over `J`-window states for the
/// Lagrangian-weighted directed-information objective
/// (`multiplier = 0` and no cost gives the unconstrained characterization).
pub fn finite_horizon_dp(
    channel: &FiniteChannelKernel,
    cost: Option<&TransmissionCost>,
    multiplier: f64,
    horizon: usize,
    initial: &Simplex,
    tol: f64,
    max_iter: usize,
) -> Result<FiniteHorizonSolve> {
    if multiplier < 0.0 {
        return Err(CoreError::Domain("multiplier must be >= 0".into()));
    }
    let j = policy_memory(channel, cost);
    let states = window_states(channel, j)?;
    if initial.len() != states {
        return Err(CoreError::Domain(format!(
            "initial distribution has {} entries, expected {states}",
            initial.len()
        )));
    }
    let in_alpha = channel.input_alphabet();
    let out_alpha = channel.output_alphabet();
    let mut continuation: Option<ValueFunction> = None;
    let mut policies = vec![MarkovInputPolicy::uniform(j, in_alpha, out_alpha)?; horizon + 1];
    for t in (0..=horizon).rev() {
        let (vf, rows) = sweep(
            channel,
            cost,
            multiplier,
            j,
            continuation.as_ref(),
            tol,
            max_iter,
        )?;
        policies[t] = MarkovInputPolicy::new(j, in_alpha, out_alpha, rows)?;
        continuation = Some(vf);
    }
    let initial_values = continuation.expect("horizon >= 0 leaves a value table");
    let value = initial
        .probs()
        .iter()
        .zip(&initial_values.values)
        .map(|(&m, &v)| m * v)
        .sum();
    Ok(FiniteHorizonSolve {
        value,
        initial_values,
        policies,
    })
}

/// Irreducibility/aperiodicity diagnostic of the induced output chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainDiagnostics {
    pub irreducible: bool,
    pub aperiodic: bool,
}

impl ChainDiagnostics {
    pub fn ergodic(&self) -> bool {
        self.irreducible && self.aperiodic
    }
}

/// Transition matrix of the `J`-window output chain under a stationary policy:
/// `T[s][shift(s, b)] += nu_pi(b | s)`.
pub fn output_transition_matrix(
    channel: &FiniteChannelKernel,
    policy: &MarkovInputPolicy,
) -> Result<Vec<Vec<f64>>> {
    let j = policy.memory();
    if j < channel.memory() {
        return Err(CoreError::Domain(format!(
            "policy memory {j} shorter than channel memory {}",
            channel.memory()
        )));
    }
    let out_size = channel.output_alphabet().size();
    let in_size = channel.input_alphabet().size();
    let states = policy.state_count();
    let mut t = vec![vec![0.0; states]; states];
    for s in 0..states {
        for a in 0..in_size {
            let pa = policy.prob(s, a);
            if pa == 0.0 {
                continue;
            }
            for (b, &qb) in channel.row_for_window(s, a).iter().enumerate() {
                if qb > 0.0 {
                    t[s][shift_state(s, b, j, out_size)?] += pa * qb;
                }
            }
        }
    }
    Ok(t)
}

const EDGE_EPS: f64 = 1e-14;

/// Strong connectivity and period of the chain's support graph.
pub fn chain_diagnostics(transition: &[Vec<f64>]) -> ChainDiagnostics {
    let n = transition.len();
    let reach = |forward: bool| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let edge = if forward {
                    transition[u][v]
                } else {
                    transition[v][u]
                };
                if edge > EDGE_EPS && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    let bwd = reach(false);
    let irreducible = fwd.iter().all(|&x| x) && bwd.iter().all(|&x| x);
    if !irreducible {
        return ChainDiagnostics {
            irreducible,
            aperiodic: false,
        };
    }
    // period = gcd over edges (u -> v) of level(u) + 1 - level(v), BFS levels
    let mut level = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    level[0] = 0;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if transition[u][v] > EDGE_EPS && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g: i64 = 0;
    for u in 0..n {
        for v in 0..n {
            if transition[u][v] > EDGE_EPS {
                let d = level[u] as i64 + 1 - level[v] as i64;
                g = gcd(g, d.abs());
            }
        }
    }
    ChainDiagnostics {
        irreducible,
        aperiodic: g == 1,
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Unique stationary distribution of an irreducible chain, by direct linear
/// solve of `rho T = rho`, `sum rho = 1`.
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let diag = chain_diagnostics(transition);
    if !diag.irreducible {
        return Err(CoreError::NotErgodic(
            "transition graph is reducible; stationary distribution is not unique".into(),
        ));
    }
    let n = transition.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            // rows of (T^t - I), last row replaced by the normalization
            a[(r, c)] = if r + 1 == n {
                1.0
            } else {
                transition[c][r] - if r == c { 1.0 } else { 0.0 }
            };
        }
    }
    let mut b = nalgebra::DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let rho = a
        .lu()
        .solve(&b)
        .ok_or_else(|| CoreError::NotErgodic("stationary linear system is singular".into()))?;
    let mut out: Vec<f64> = rho.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = out.iter().sum();
    if total <= 0.0 {
        return Err(CoreError::NotErgodic(
            "stationary solve produced a non-distribution".into(),
        ));
    }
    for x in out.iter_mut() {
        *x /= total;
    }
    // residual check
    for c in 0..n {
        let mut acc = -out[c];
        for r in 0..n {
            acc += out[r] * transition[r][c];
        }
        if acc.abs() > 1e-10 {
            return Err(CoreError::NotErgodic(format!(
                "stationary residual {acc:.3e} at state {c}"
            )));
        }
    }
    Ok(out)
}

/// Long-run average transmission cost of a stationary policy.
pub fn policy_average_cost(
    channel: &FiniteChannelKernel,
    policy: &MarkovInputPolicy,
    cost: &TransmissionCost,
) -> Result<f64> {
    let t = output_transition_matrix(channel, policy)?;
    let rho = stationary_distribution(&t)?;
    let in_size = channel.input_alphabet().size();
    let mut acc = 0.0;
    for (s, &ps) in rho.iter().enumerate() {
        for a in 0..in_size {
            acc += ps * policy.prob(s, a) * cost.cost_for_window(s, a);
        }
    }
    Ok(acc)
}

/// Result of relative value iteration.
#[derive(Debug, Clone)]
pub struct RviSolve {
    /// Per-unit-time value of the Lagrangian objective, nats per use.
    pub j_star: f64,
    /// Relative value function, anchored to 0 at state 0.
    pub rel_value: ValueFunction,
    pub policy: MarkovInputPolicy,
    pub iterations: usize,
    pub span_residual: f64,
    pub diagnostics: ChainDiagnostics,
}

/// Relative value iteration for the per-unit-time limit: repeats backward
/// sweeps, tracking the span of the value increments; `j_star` is the midpoint
/// of the final span bracket.
pub fn relative_value_iteration(
    channel: &FiniteChannelKernel,
    cost: Option<&TransmissionCost>,
    multiplier: f64,
    span_tol: f64,
    max_iter: usize,
    stage_tol: f64,
    stage_max_iter: usize,
) -> Result<RviSolve> {
    if span_tol <= 0.0 {
        return Err(CoreError::Domain("span tolerance must be > 0".into()));
    }
    let j = policy_memory(channel, cost);
    let states = window_states(channel, j)?;
    let mut h = ValueFunction::zeros(states);
    let mut span = f64::INFINITY;
    for iter in 1..=max_iter {
        let (th, rows) = sweep(
            channel,
            cost,
            multiplier,
            j,
            Some(&h),
            stage_tol,
            stage_max_iter,
        )?;
        let mut max_d = f64::NEG_INFINITY;
        let mut min_d = f64::INFINITY;
        for (new, old) in th.values.iter().zip(&h.values) {
            let d = new - old;
            max_d = max_d.max(d);
            min_d = min_d.min(d);
        }
        span = max_d - min_d;
        if span < span_tol {
            let anchor = th.values[0];
            let rel = ValueFunction {
                values: th.values.iter().map(|v| v - anchor).collect(),
            };
            let policy = MarkovInputPolicy::new(
                j,
                channel.input_alphabet(),
                channel.output_alphabet(),
                rows,
            )?;
            let t = output_transition_matrix(channel, &policy)?;
            let diagnostics = chain_diagnostics(&t);
            return Ok(RviSolve {
                j_star: 0.5 * (max_d + min_d),
                rel_value: rel,
                policy,
                iterations: iter,
                span_residual: span,
                diagnostics,
            });
        }
        let anchor = th.values[0];
        h = ValueFunction {
            values: th.values.iter().map(|v| v - anchor).collect(),
        };
    }
    Err(CoreError::NonConvergence {
        what: "relative value iteration (possible periodicity or non-ergodicity)".into(),
        iterations: max_iter,
        residual: span,
    })
}

/// Result of the Lagrangian dual search over the cost multiplier.
#[derive(Debug, Clone)]
pub struct DualSolveResult {
    pub s_star: f64,
    /// Per-unit-time value of the Lagrangian at `s_star`.
    pub j_star: f64,
    pub policy: MarkovInputPolicy,
    pub rel_value: ValueFunction,
    /// Long-run average cost achieved by the returned policy.
    pub avg_cost: f64,
    /// `j_star + s_star * kappa`, the per-unit-time constrained capacity.
    pub capacity_nats: f64,
    /// Whether the budget constraint binds at the optimum.
    pub binding: bool,
    pub iterations: usize,
    pub span_residual: f64,
    pub diagnostics: ChainDiagnostics,
}

/// Feedback capacity with an average transmission cost constraint:
/// `capacity(kappa) = inf_{s >= 0} [ j_star(s) + s kappa ]`.
///
/// If the unconstrained policy already meets the budget it is returned with
/// `s_star = 0`; otherwise the multiplier is bisected on the monotone
/// nonincreasing map `s -> avg_cost(policy_s)` until the achieved cost is
/// within `tol_outer` of the budget.
pub fn dual_search(
    channel: &FiniteChannelKernel,
    cost: &TransmissionCost,
    tol_outer: f64,
    tol_inner: f64,
    max_iter: usize,
) -> Result<DualSolveResult> {
    let kappa = cost.kappa();
    let stage_tol = (tol_inner * 0.1).max(1e-14);
    let solve = |s: f64| -> Result<(RviSolve, f64)> {
        let rvi = relative_value_iteration(
            channel,
            Some(cost),
            s,
            tol_inner,
            max_iter,
            stage_tol,
            max_iter,
        )?;
        let avg = policy_average_cost(channel, &rvi.policy, cost)?;
        Ok((rvi, avg))
    };

    let (rvi0, avg0) = solve(0.0)?;
    if avg0 <= kappa + tol_outer {
        let capacity = rvi0.j_star;
        return Ok(DualSolveResult {
            s_star: 0.0,
            j_star: rvi0.j_star,
            avg_cost: avg0,
            capacity_nats: capacity,
            binding: false,
            policy: rvi0.policy,
            rel_value: rvi0.rel_value,
            iterations: rvi0.iterations,
            span_residual: rvi0.span_residual,
            diagnostics: rvi0.diagnostics,
        });
    }

    // bracket: find s_hi whose policy is within budget
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut best = loop {
        let (rvi, avg) = solve(hi)?;
        if avg <= kappa + tol_outer {
            break (hi, rvi, avg);
        }
        lo = hi;
        hi *= 2.0;
        if hi > DEFAULT_S_MAX {
            return Err(CoreError::NonConvergence {
                what: format!("dual bracket search (no feasible multiplier below {DEFAULT_S_MAX:e})"),
                iterations: 0,
                residual: avg - kappa,
            });
        }
    };

    for _ in 0..200 {
        if (best.2 - kappa).abs() <= tol_outer || (hi - lo) <= 1e-14 * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (rvi, avg) = solve(mid)?;
        if avg > kappa + tol_outer {
            lo = mid;
        } else {
            hi = mid;
            best = (mid, rvi, avg);
        }
    }

    let (s_star, rvi, avg) = best;
    let capacity = rvi.j_star + s_star * kappa;
    Ok(DualSolveResult {
        s_star,
        j_star: rvi.j_star,
        avg_cost: avg,
        capacity_nats: capacity,
        binding: true,
        policy: rvi.policy,
        rel_value: rvi.rel_value,
        iterations: rvi.iterations,
        span_residual: rvi.span_residual,
        diagnostics: rvi.diagnostics,
    })
}
