//! Brute-force maximization of directed information over unrestricted
//! full-history feedback policies on tiny instances.
//!
//! This is the ground truth for the information-structure results: the
//! structured DP solvers restrict inputs to `J`-window policies, and on
//! desk-scale instances this module maximizes over *all* history-dependent
//! policies so the two values can be compared.
//!
//! Method: multi-start block-coordinate ascent over policy rows. With all
//! other rows fixed, a row's objective is concave, and its gradient is an
//! exact expectation computed by enumeration; each visit applies the
//! Blahut-Arimoto style multiplicative update in that gradient, backtracking
//! until the exact objective does not decrease. Values are certified lower
//! bounds; with every per-row bracket below tolerance they are (heuristic)
//! global estimates.

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::channel::{FiniteChannelKernel, TransmissionCost};
use crate::directed::FullHistoryPolicy;
use crate::error::{CoreError, Result};
use crate::prob::{state_count, window_suffix, Simplex};

/// Hard cap on the number of free policy parameters.
pub const PARAM_CAP: usize = 10_000;

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub restarts: usize,
    pub max_outer_iters: usize,
    /// Stop when every per-row optimality bracket falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_outer_iters: 5000,
            // per-row optimality brackets are first-order quantities measured
            // through the exactly-maximized value, so their floor is about
            // sqrt(machine epsilon); the value itself converges quadratically
            // in the bracket
            tol: 3e-8,
            seed: 0x0cab_f00d,
        }
    }
}

/// Best value over restarts together with the per-restart values.
#[derive(Debug, Clone)]
pub struct OracleSolve {
    pub value: f64,
    pub policy: FullHistoryPolicy,
    pub restart_values: Vec<f64>,
}

/// Comparison of the restricted `J`-window optimum against the full-history
/// optimum on the same instance.
#[derive(Debug, Clone)]
pub struct RestrictionReport {
    pub restricted_value: f64,
    pub full_value: f64,
    /// `full - restricted`; nonnegative up to solver tolerance.
    pub gap: f64,
}

/// How stage rows are shared across histories.
#[derive(Debug, Clone, Copy)]
enum Shape {
    /// One row per full history (the unrestricted class).
    FullHistory,
    /// One row per (stage, last-`j`-outputs window): time-varying Markov.
    Window(usize),
}

struct Path {
    /// mu(w) times the product of channel factors; rows excluded.
    static_mass: f64,
    /// sum_i ln Q(b_i | ., a_i) - s_L sum_i gamma(a_i, .).
    payoff_static: f64,
    /// Row id visited at each stage.
    rows: Vec<u32>,
    /// Input symbol chosen at each stage.
    inputs: Vec<u8>,
    /// Finest output node: fold of (w, b_0..b_n).
    node: u32,
    w: u32,
}

struct Instance {
    horizon: usize,
    in_size: usize,
    out_size: usize,
    mu: Vec<f64>,
    n_rows: usize,
    /// Stage of each row id.
    row_stage: Vec<u32>,
    /// Per-stage first row id (FullHistory shape).
    stage_offsets: Vec<usize>,
    paths: Vec<Path>,
    /// Indices into `paths` per row id.
    row_paths: Vec<Vec<u32>>,
    finest_nodes: usize,
}

impl Instance {
    fn build(
        channel: &FiniteChannelKernel,
        cost: Option<(&TransmissionCost, f64)>,
        horizon: usize,
        window: usize,
        mu: &Simplex,
        shape: Shape,
    ) -> Result<Self> {
        let in_size = channel.input_alphabet().size();
        let out_size = channel.output_alphabet().size();
        if window < channel.memory() {
            return Err(CoreError::Domain(format!(
                "window {window} shorter than channel memory {}",
                channel.memory()
            )));
        }
        if let Some((c, _)) = cost {
            if window < c.memory() {
                return Err(CoreError::Domain(format!(
                    "window {window} shorter than cost memory {}",
                    c.memory()
                )));
            }
        }
        let windows = state_count(window, out_size)?;
        if mu.len() != windows {
            return Err(CoreError::Domain(format!(
                "initial distribution has {} entries, expected {windows}",
                mu.len()
            )));
        }

        // row ids
        let mut stage_offsets = vec![0usize; horizon + 2];
        let mut row_stage = Vec::new();
        let n_rows = match shape {
            Shape::FullHistory => {
                let mut total = 0usize;
                for i in 0..=horizon {
                    stage_offsets[i] = total;
                    let count =
                        FullHistoryPolicy::history_count(window, in_size, out_size, i)?;
                    total += count;
                }
                stage_offsets[horizon + 1] = total;
                for i in 0..=horizon {
                    for _ in stage_offsets[i]..stage_offsets[i + 1] {
                        row_stage.push(i as u32);
                    }
                }
                total
            }
            Shape::Window(j) => {
                let states = state_count(j, out_size)?;
                for i in 0..=horizon {
                    stage_offsets[i] = i * states;
                    for _ in 0..states {
                        row_stage.push(i as u32);
                    }
                }
                stage_offsets[horizon + 1] = (horizon + 1) * states;
                (horizon + 1) * states
            }
        };
        let params = n_rows as u128 * in_size as u128;
        if params > PARAM_CAP as u128 {
            return Err(CoreError::Resource {
                needed: params,
                cap: PARAM_CAP as u64,
            });
        }

        // enumerate positive-static-mass paths
        let mut paths = Vec::new();
        let mut row_paths = vec![Vec::new(); n_rows];
        struct Frame {
            stage: usize,
            hist: usize,
            out_prefix: usize,
            mass: f64,
            payoff: f64,
            rows: Vec<u32>,
            inputs: Vec<u8>,
        }
        let mut stack: Vec<Frame> = (0..windows)
            .filter(|&w| mu.get(w) > 0.0)
            .map(|w| Frame {
                stage: 0,
                hist: w,
                out_prefix: w,
                mass: mu.get(w),
                payoff: 0.0,
                rows: Vec::new(),
                inputs: Vec::new(),
            })
            .collect();
        while let Some(f) = stack.pop() {
            if f.stage > horizon {
                let w = {
                    // leading digits of the output prefix
                    let mut p = f.out_prefix;
                    for _ in 0..=horizon {
                        p /= out_size;
                    }
                    p
                };
                let idx = paths.len() as u32;
                for &rid in &f.rows {
                    row_paths[rid as usize].push(idx);
                }
                paths.push(Path {
                    static_mass: f.mass,
                    payoff_static: f.payoff,
                    rows: f.rows,
                    inputs: f.inputs,
                    node: f.out_prefix as u32,
                    w: w as u32,
                });
                continue;
            }
            let chan_state = window_suffix(f.out_prefix, channel.memory(), out_size);
            let rid = match shape {
                Shape::FullHistory => stage_offsets[f.stage] + f.hist,
                Shape::Window(j) => {
                    stage_offsets[f.stage] + window_suffix(f.out_prefix, j, out_size)
                }
            };
            for a in 0..in_size {
                let mut step_payoff = 0.0;
                if let Some((c, s_l)) = cost {
                    step_payoff -= s_l * c.cost_for_window(f.out_prefix, a);
                }
                for (b, &qb) in channel.row(chan_state, a).iter().enumerate() {
                    if qb <= 0.0 {
                        continue;
                    }
                    let mut rows = f.rows.clone();
                    rows.push(rid as u32);
                    let mut inputs = f.inputs.clone();
                    inputs.push(a as u8);
                    stack.push(Frame {
                        stage: f.stage + 1,
                        hist: (f.hist * in_size + a) * out_size + b,
                        out_prefix: f.out_prefix * out_size + b,
                        mass: f.mass * qb,
                        payoff: f.payoff + step_payoff + qb.ln(),
                        rows,
                        inputs,
                    });
                }
            }
        }

        let mut finest_nodes = windows;
        for _ in 0..=horizon {
            finest_nodes *= out_size;
        }
        Ok(Self {
            horizon,
            in_size,
            out_size,
            mu: mu.probs().to_vec(),
            n_rows,
            row_stage,
            stage_offsets,
            paths,
            row_paths,
            finest_nodes,
        })
    }

    fn uniform_rows(&self) -> Vec<Vec<f64>> {
        vec![vec![1.0 / self.in_size as f64; self.in_size]; self.n_rows]
    }

    fn random_rows(&self, rng: &mut ChaCha20Rng) -> Vec<Vec<f64>> {
        (0..self.n_rows)
            .map(|_| {
                let w: Vec<f64> = (0..self.in_size)
                    .map(|_| rng.random_range(0.05..1.0))
                    .collect();
                let total: f64 = w.iter().sum();
                w.into_iter().map(|x| x / total).collect()
            })
            .collect()
    }
}

/// Scratch buffers for repeated objective evaluations.
struct Evaluator {
    mass: Vec<f64>,
    /// Level-`n` output marginal (the fold of `w, b_0..b_n`), preserved
    /// across calls for gradient evaluation.
    finest: Vec<f64>,
    /// Coarser levels `n-1, ..., -1`.
    levels: Vec<Vec<f64>>,
}

impl Evaluator {
    fn new(inst: &Instance) -> Self {
        let mut levels = Vec::with_capacity(inst.horizon + 1);
        let mut size = inst.finest_nodes;
        for _ in 0..=inst.horizon {
            size /= inst.out_size;
            levels.push(vec![0.0; size]);
        }
        Self {
            mass: vec![0.0; inst.paths.len()],
            finest: vec![0.0; inst.finest_nodes],
            levels,
        }
    }

    /// Exact objective: E[payoff_static] minus the output-sequence
    /// log-likelihood telescoped over prefix levels. Refreshes `mass` and
    /// `finest` as a side effect.
    fn objective(&mut self, inst: &Instance, rows: &[Vec<f64>]) -> f64 {
        self.finest.iter_mut().for_each(|x| *x = 0.0);
        let mut pay = 0.0;
        for (k, p) in inst.paths.iter().enumerate() {
            let mut m = p.static_mass;
            for (i, &rid) in p.rows.iter().enumerate() {
                m *= rows[rid as usize][p.inputs[i] as usize];
            }
            self.mass[k] = m;
            pay += m * p.payoff_static;
            self.finest[p.node as usize] += m;
        }
        let mut ent = 0.0;
        let out = inst.out_size;
        for lvl in 0..self.levels.len() {
            let (done, rest) = self.levels.split_at_mut(lvl);
            let child: &[f64] = if lvl == 0 { &self.finest } else { &done[lvl - 1] };
            let parent = &mut rest[0];
            parent.iter_mut().for_each(|x| *x = 0.0);
            for (v, &m) in child.iter().enumerate() {
                parent[v / out] += m;
            }
            for (v, &m) in child.iter().enumerate() {
                if m > 0.0 {
                    ent += m * (m / parent[v / out]).ln();
                }
            }
        }
        pay - ent
    }
}

struct RowStep {
    cond_gradient: Vec<f64>,
    bracket: f64,
}

/// Exact gradient of the objective in one row, conditioned on reaching it.
fn row_gradient(
    inst: &Instance,
    rows: &[Vec<f64>],
    ev: &Evaluator,
    rid: usize,
) -> Option<RowStep> {
    let stage = inst.row_stage[rid] as usize;
    let mut g = vec![0.0; inst.in_size];
    let mut reach = 0.0;
    for &pk in &inst.row_paths[rid] {
        let p = &inst.paths[pk as usize];
        let mut m_excl = p.static_mass;
        for (i, &r) in p.rows.iter().enumerate() {
            if i != stage {
                m_excl *= rows[r as usize][p.inputs[i] as usize];
            }
        }
        if m_excl == 0.0 {
            continue;
        }
        // telescoped log output likelihood of the whole path; floor the
        // marginal so boundary rows see the (divergent) entropy pull
        let nb = ev.finest[p.node as usize].max(1e-300);
        let ell = p.payoff_static - nb.ln() + inst.mu[p.w as usize].ln();
        let a = p.inputs[stage] as usize;
        g[a] += m_excl * ell;
        reach += m_excl * rows[rid][a];
    }
    if reach < 1e-300 {
        return None;
    }
    let cond: Vec<f64> = g.iter().map(|x| x / reach).collect();
    let mean: f64 = cond.iter().zip(&rows[rid]).map(|(c, r)| c * r).sum();
    let max = cond.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Some(RowStep {
        cond_gradient: cond,
        bracket: (max - mean) * reach,
    })
}

/// Exact maximization of the objective in one two-entry row by golden-section
/// search over `rows[rid] = (p, 1-p)`, with boundary snapping. The row
/// objective is concave, so this is an exact block-coordinate step.
fn maximize_row_golden(
    inst: &Instance,
    rows: &mut [Vec<f64>],
    ev: &mut Evaluator,
    rid: usize,
) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let eval = |p: f64, rows: &mut [Vec<f64>], ev: &mut Evaluator| -> f64 {
        rows[rid][0] = p;
        rows[rid][1] = 1.0 - p;
        ev.objective(inst, rows)
    };
    let mut m1 = hi - phi * (hi - lo);
    let mut m2 = lo + phi * (hi - lo);
    let mut f1 = eval(m1, rows, ev);
    let mut f2 = eval(m2, rows, ev);
    for _ in 0..60 {
        if f1 >= f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - phi * (hi - lo);
            f1 = eval(m1, rows, ev);
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + phi * (hi - lo);
            f2 = eval(m2, rows, ev);
        }
    }
    let mut best_p = 0.5 * (lo + hi);
    let mut best_v = eval(best_p, rows, ev);
    for cand in [0.0, 1.0] {
        let v = eval(cand, rows, ev);
        if v > best_v {
            best_v = v;
            best_p = cand;
        }
    }
    // leave the buffers consistent with the accepted point
    best_v = eval(best_p, rows, ev);
    best_v
}

/// One coordinate-ascent run from the given starting rows. Monotone by
/// construction: every visit either maximizes its row exactly (two-input
/// rows) or applies a backtracked multiplicative step in the exact row
/// gradient.
fn ascend(inst: &Instance, mut rows: Vec<Vec<f64>>, config: &OracleConfig) -> (f64, Vec<Vec<f64>>) {
    let mut ev = Evaluator::new(inst);
    let mut value = ev.objective(inst, &rows);
    for _ in 0..config.max_outer_iters {
        let mut max_bracket = 0.0f64;
        for rid in 0..inst.n_rows {
            let Some(step) = row_gradient(inst, &rows, &ev, rid) else {
                continue;
            };
            max_bracket = max_bracket.max(step.bracket);
            if step.bracket <= config.tol * 1e-3 {
                continue;
            }
            if inst.in_size == 2 {
                let v = maximize_row_golden(inst, &mut rows, &mut ev, rid);
                debug_assert!(v >= value - 1e-12, "exact row step decreased objective");
                value = v.max(value);
                continue;
            }
            let gmax = step
                .cond_gradient
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let old_row = rows[rid].clone();
            let mut eta = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let mut proposal: Vec<f64> = old_row
                    .iter()
                    .zip(&step.cond_gradient)
                    .map(|(&r, &c)| r * (eta * (c - gmax)).exp())
                    .collect();
                let total: f64 = proposal.iter().sum();
                if total > 0.0 {
                    proposal.iter_mut().for_each(|x| *x /= total);
                    rows[rid] = proposal;
                    let v = ev.objective(inst, &rows);
                    if v >= value - 1e-13 {
                        debug_assert!(v >= value - 1e-12, "coordinate step decreased objective");
                        value = v.max(value);
                        accepted = true;
                        break;
                    }
                }
                eta *= 0.5;
            }
            if !accepted {
                rows[rid] = old_row;
                // restore mass/marginal buffers for the next gradient
                value = ev.objective(inst, &rows);
            }
        }
        if max_bracket < config.tol {
            break;
        }
    }
    (value, rows)
}

fn optimize(inst: &Instance, config: &OracleConfig) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
    let starts: Vec<Vec<Vec<f64>>> = (0..config.restarts.max(1))
        .map(|k| {
            if k == 0 {
                inst.uniform_rows()
            } else {
                let mut rng = ChaCha20Rng::seed_from_u64(config.seed.wrapping_add(k as u64));
                inst.random_rows(&mut rng)
            }
        })
        .collect();
    let results: Vec<(f64, Vec<Vec<f64>>)> = starts
        .into_par_iter()
        .map(|rows| ascend(inst, rows, config))
        .collect();
    let restart_values: Vec<f64> = results.iter().map(|(v, _)| *v).collect();
    // best by value, earliest restart on ties
    let mut best = 0;
    for k in 1..results.len() {
        if results[k].0 > results[best].0 {
            best = k;
        }
    }
    let (value, rows) = results.into_iter().nth(best).expect("at least one restart");
    (value, rows, restart_values)
}

/// Window length used by the full-history optimization: long enough for the
/// channel and the cost to read their states.
pub fn oracle_window(channel: &FiniteChannelKernel, cost: Option<&TransmissionCost>) -> usize {
    channel.memory().max(cost.map_or(0, |c| c.memory()))
}

/// Maximizes `I(A^n -> B^n) - s_L E[total cost]` over unrestricted
/// full-history policies by multi-start coordinate ascent.
pub fn maximize_full_history(
    channel: &FiniteChannelKernel,
    cost: Option<(&TransmissionCost, f64)>,
    horizon: usize,
    mu: &Simplex,
    config: &OracleConfig,
) -> Result<OracleSolve> {
    let window = oracle_window(channel, cost.map(|(c, _)| c));
    maximize_full_history_windowed(channel, cost, horizon, window, mu, config)
}

fn maximize_full_history_windowed(
    channel: &FiniteChannelKernel,
    cost: Option<(&TransmissionCost, f64)>,
    horizon: usize,
    window: usize,
    mu: &Simplex,
    config: &OracleConfig,
) -> Result<OracleSolve> {
    let inst = Instance::build(channel, cost, horizon, window, mu, Shape::FullHistory)?;
    let (value, rows, restart_values) = optimize(&inst, config);
    let in_size = inst.in_size;
    let policy = FullHistoryPolicy::from_fn(
        horizon,
        window,
        in_size,
        inst.out_size,
        u64::MAX,
        |stage, hist| {
            let rid = inst.stage_offsets[stage] + hist;
            Simplex::from_weights(&rows[rid]).expect("row is a distribution")
        },
    )?;
    Ok(OracleSolve {
        value,
        policy,
        restart_values,
    })
}

/// Optimizes over time-varying `j`-window Markov policies by the same
/// coordinate ascent (rows tied across histories sharing a window), and over
/// full-history policies, on a common initial window; reports both values and
/// the gap.
///
/// With `j >= max(M, K)` the gap is zero up to solver tolerance (the
/// restriction loses nothing); with `j` below that the gap can be strictly
/// positive.
pub fn evaluate_restricted_vs_full(
    channel: &FiniteChannelKernel,
    cost: Option<(&TransmissionCost, f64)>,
    horizon: usize,
    mu: &Simplex,
    j: usize,
    config: &OracleConfig,
) -> Result<RestrictionReport> {
    let window = oracle_window(channel, cost.map(|(c, _)| c)).max(j);
    let restricted_inst = Instance::build(channel, cost, horizon, window, mu, Shape::Window(j))?;
    let (restricted_value, _, _) = optimize(&restricted_inst, config);
    let full = maximize_full_history_windowed(channel, cost, horizon, window, mu, config)?;
    Ok(RestrictionReport {
        restricted_value,
        full_value: full.value,
        gap: full.value - restricted_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::{build_joint, directed_information_of};
    use crate::dp::finite_horizon_dp;
    use crate::prob::Alphabet;

    fn bsc(eps: f64) -> FiniteChannelKernel {
        FiniteChannelKernel::binary_symmetric(eps).unwrap()
    }

    fn single_letter_grid_optimum(eps: f64) -> f64 {
        // I(p) for a BSC input law (p, 1-p), maximized on a dense grid
        let q = [[1.0 - eps, eps], [eps, 1.0 - eps]];
        let mut best = f64::NEG_INFINITY;
        let steps = 100_000usize;
        for k in 0..=steps {
            let p = k as f64 / steps as f64;
            let pin = [p, 1.0 - p];
            let mut nu = [0.0; 2];
            for a in 0..2 {
                for b in 0..2 {
                    nu[b] += pin[a] * q[a][b];
                }
            }
            let mut i = 0.0;
            for a in 0..2 {
                if pin[a] == 0.0 {
                    continue;
                }
                for b in 0..2 {
                    if q[a][b] > 0.0 && nu[b] > 0.0 {
                        i += pin[a] * q[a][b] * (q[a][b] / nu[b]).ln();
                    }
                }
            }
            best = best.max(i);
        }
        best
    }

    #[test]
    fn oracle_memoryless_bsc_two_stages() {
        let chan = bsc(0.1);
        let config = OracleConfig {
            restarts: 2,
            ..OracleConfig::default()
        };
        let solve =
            maximize_full_history(&chan, None, 1, &Simplex::uniform(1), &config).unwrap();
        let single = single_letter_grid_optimum(0.1);
        assert!(
            (solve.value - 2.0 * single).abs() < 1e-6,
            "oracle {} vs grid {}",
            solve.value,
            2.0 * single
        );
        // optimal rows are uniform
        assert!((solve.policy.row(0, 0).get(0) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn oracle_identity_channel_noiseless_bound() {
        let a = Alphabet::new(2).unwrap();
        let chan =
            FiniteChannelKernel::new(0, a, a, vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]]).unwrap();
        let config = OracleConfig {
            restarts: 2,
            ..OracleConfig::default()
        };
        let solve =
            maximize_full_history(&chan, None, 2, &Simplex::uniform(1), &config).unwrap();
        assert!((solve.value - 3.0 * std::f64::consts::LN_2).abs() < 1e-8);
    }

    #[test]
    fn oracle_value_agrees_with_enumeration_of_returned_policy() {
        let a = Alphabet::new(2).unwrap();
        let chan = FiniteChannelKernel::new(
            1,
            a,
            a,
            vec![
                vec![vec![0.83, 0.17], vec![0.31, 0.69]],
                vec![vec![0.22, 0.78], vec![0.64, 0.36]],
            ],
        )
        .unwrap();
        let config = OracleConfig {
            restarts: 2,
            ..OracleConfig::default()
        };
        let mu = Simplex::uniform(2);
        let solve = maximize_full_history(&chan, None, 2, &mu, &config).unwrap();
        let joint = build_joint(&chan, &solve.policy, &mu, 2).unwrap();
        let di = directed_information_of(&joint, &chan);
        assert!((solve.value - di).abs() < 1e-10);
    }

    #[test]
    fn oracle_matches_dp_on_umco() {
        let a = Alphabet::new(2).unwrap();
        let chan = FiniteChannelKernel::new(
            1,
            a,
            a,
            vec![
                vec![vec![0.9, 0.1], vec![0.25, 0.75]],
                vec![vec![0.4, 0.6], vec![0.7, 0.3]],
            ],
        )
        .unwrap();
        let mu = Simplex::uniform(2);
        let dp = finite_horizon_dp(&chan, None, 0.0, 2, &mu, 1e-12, 100_000).unwrap();
        let config = OracleConfig {
            restarts: 4,
            ..OracleConfig::default()
        };
        let oracle = maximize_full_history(&chan, None, 2, &mu, &config).unwrap();
        assert!(
            (dp.value - oracle.value).abs() < 1e-5,
            "dp {} vs oracle {}",
            dp.value,
            oracle.value
        );
    }

    #[test]
    fn restart_stability_on_fixtures() {
        let chan = bsc(0.1);
        let config = OracleConfig::default();
        let solve =
            maximize_full_history(&chan, None, 1, &Simplex::uniform(1), &config).unwrap();
        let min = solve
            .restart_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert_eq!(solve.restart_values.len(), 8);
        assert!(solve.value - min < 1e-6, "restart range {:e}", solve.value - min);
    }

    #[test]
    fn restriction_lossless_at_structural_j() {
        let a = Alphabet::new(2).unwrap();
        let chan = FiniteChannelKernel::new(
            1,
            a,
            a,
            vec![
                vec![vec![0.88, 0.12], vec![0.33, 0.67]],
                vec![vec![0.15, 0.85], vec![0.6, 0.4]],
            ],
        )
        .unwrap();
        let config = OracleConfig {
            restarts: 3,
            ..OracleConfig::default()
        };
        let report =
            evaluate_restricted_vs_full(&chan, None, 2, &Simplex::uniform(2), 1, &config)
                .unwrap();
        assert!(report.gap.abs() < 1e-5, "gap {:e}", report.gap);
        assert!(report.full_value >= report.restricted_value - 1e-9);
    }

    #[test]
    fn under_restriction_pays_on_asymmetric_kernel() {
        let a = Alphabet::new(2).unwrap();
        // found by seeded search: state 1 separates the inputs sharply while
        // state 0 barely does, so the optimal input law must read the state
        let chan = FiniteChannelKernel::new(
            1,
            a,
            a,
            vec![
                vec![vec![0.68, 0.32], vec![0.72, 0.28]],
                vec![vec![0.9, 0.1], vec![0.07, 0.93]],
            ],
        )
        .unwrap();
        let config = OracleConfig {
            restarts: 3,
            ..OracleConfig::default()
        };
        let report =
            evaluate_restricted_vs_full(&chan, None, 2, &Simplex::uniform(2), 0, &config)
                .unwrap();
        assert!(report.gap > 1e-3, "expected a positive gap, got {:e}", report.gap);
    }

    #[test]
    fn memoryless_channel_needs_no_memory() {
        let chan = bsc(0.1);
        let config = OracleConfig {
            restarts: 3,
            ..OracleConfig::default()
        };
        let report =
            evaluate_restricted_vs_full(&chan, None, 2, &Simplex::uniform(1), 0, &config)
                .unwrap();
        assert!(report.gap.abs() < 1e-6, "gap {:e}", report.gap);
    }

    #[test]
    fn parameter_cap_is_enforced() {
        let chan = bsc(0.1);
        let config = OracleConfig::default();
        let err = maximize_full_history(&chan, None, 7, &Simplex::uniform(1), &config);
        assert!(matches!(err, Err(CoreError::Resource { .. })));
    }
}
