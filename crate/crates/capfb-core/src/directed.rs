//! Exact joint distributions, directed information, and the variational
//! functional, by dense enumeration on small horizons.
//!
//! This module is the small-instance ground truth the structured solvers are
//! checked against, not a production path: histories are enumerated densely
//! and a hard entry cap guards the exponential blow-up.
//!
//! Conventions. A problem instance carries an initial output window
//! `b_{-W}^{-1}` of length `W` drawn from a caller-supplied distribution (`W`
//! at least the channel memory). Sequences are indexed by folding digits in
//! time order, `idx = ((w * |A| + a_0) * |B| + b_0) * |A| + a_1 ...`, so
//! ascending index enumeration is ascending lexicographic-in-time order, and
//! the last `m` output symbols of any output-history index are simply its
//! value modulo `|B|^m`.

use crate::channel::{FiniteChannelKernel, MarkovInputPolicy, TransmissionCost};
use crate::error::{CoreError, Result};
use crate::prob::{state_count, window_suffix, Simplex};

/// Default cap on dense table entries.
pub const DEFAULT_ENTRY_CAP: u64 = 10_000_000;

/// Feedback input distribution with full-history information structure:
/// one simplex row per history `(b_{-W}^{-1}, a^{i-1}, b^{i-1})` per stage.
#[derive(Debug, Clone)]
pub struct FullHistoryPolicy {
    horizon: usize,
    window: usize,
    in_size: usize,
    out_size: usize,
    /// `tables[i][h]` is the input row at stage `i`, history index `h`.
    tables: Vec<Vec<Simplex>>,
}

impl FullHistoryPolicy {
    /// Number of histories at stage `i`: `|B|^W * (|A||B|)^i`.
    pub fn history_count(
        window: usize,
        in_size: usize,
        out_size: usize,
        stage: usize,
    ) -> Result<usize> {
        let w = state_count(window, out_size)? as u128;
        let mut acc = w;
        for _ in 0..stage {
            acc = acc.saturating_mul((in_size * out_size) as u128);
        }
        usize::try_from(acc).map_err(|_| CoreError::Resource {
            needed: acc,
            cap: u64::MAX,
        })
    }

    fn check_cap(
        horizon: usize,
        window: usize,
        in_size: usize,
        out_size: usize,
        cap: u64,
    ) -> Result<()> {
        let mut total: u128 = 0;
        for i in 0..=horizon {
            total +=
                Self::history_count(window, in_size, out_size, i)? as u128 * in_size as u128;
        }
        if total > cap as u128 {
            return Err(CoreError::Resource { needed: total, cap });
        }
        Ok(())
    }

    /// Builds a policy by evaluating `row(stage, history)` over all histories.
    pub fn from_fn(
        horizon: usize,
        window: usize,
        in_size: usize,
        out_size: usize,
        cap: u64,
        mut row: impl FnMut(usize, usize) -> Simplex,
    ) -> Result<Self> {
        Self::check_cap(horizon, window, in_size, out_size, cap)?;
        let mut tables = Vec::with_capacity(horizon + 1);
        for i in 0..=horizon {
            let count = Self::history_count(window, in_size, out_size, i)?;
            let mut t = Vec::with_capacity(count);
            for h in 0..count {
                let r = row(i, h);
                assert_eq!(r.len(), in_size, "policy row has wrong input arity");
                t.push(r);
            }
            tables.push(t);
        }
        Ok(Self {
            horizon,
            window,
            in_size,
            out_size,
            tables,
        })
    }

    pub fn uniform(
        horizon: usize,
        window: usize,
        in_size: usize,
        out_size: usize,
        cap: u64,
    ) -> Result<Self> {
        let u = Simplex::uniform(in_size);
        Self::from_fn(horizon, window, in_size, out_size, cap, |_, _| u.clone())
    }

    /// Embeds a `J`-window Markov policy: every history row equals the policy
    /// row of the last `J` output symbols. Requires `window >= J`.
    pub fn from_markov(
        policy: &MarkovInputPolicy,
        horizon: usize,
        window: usize,
        cap: u64,
    ) -> Result<Self> {
        let j = policy.memory();
        if window < j {
            return Err(CoreError::Domain(format!(
                "initial window {window} shorter than policy memory {j}"
            )));
        }
        let in_size = policy.input_alphabet().size();
        let out_size = policy.output_alphabet().size();
        Self::check_cap(horizon, window, in_size, out_size, cap)?;
        let mut tables = Vec::with_capacity(horizon + 1);
        for i in 0..=horizon {
            let count = Self::history_count(window, in_size, out_size, i)?;
            let mut t = Vec::with_capacity(count);
            // walk histories in index order, tracking the output-prefix index
            let mut walk = HistoryWalk::new(window, in_size, out_size, i);
            for _ in 0..count {
                let out_prefix = walk.next_output_prefix();
                let state = window_suffix(out_prefix, j, out_size);
                t.push(policy.row(state).clone());
            }
            tables.push(t);
        }
        Ok(Self {
            horizon,
            window,
            in_size,
            out_size,
            tables,
        })
    }

    #[inline]
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    pub fn window(&self) -> usize {
        self.window
    }

    #[inline]
    pub fn input_size(&self) -> usize {
        self.in_size
    }

    #[inline]
    pub fn output_size(&self) -> usize {
        self.out_size
    }

    #[inline]
    pub fn row(&self, stage: usize, history: usize) -> &Simplex {
        &self.tables[stage][history]
    }

    pub fn set_row(&mut self, stage: usize, history: usize, row: Simplex) {
        assert_eq!(row.len(), self.in_size);
        self.tables[stage][history] = row;
    }
}

/// Enumerates history indices of one stage in ascending order while exposing
/// the output-prefix index (fold of `w, b_0, ..., b_{i-1}`) of each history.
struct HistoryWalk {
    in_size: usize,
    out_size: usize,
    stage: usize,
    /// digits: w index followed by (a_j, b_j) pairs
    digits: Vec<usize>,
    windows: usize,
    done: bool,
}

impl HistoryWalk {
    fn new(window: usize, in_size: usize, out_size: usize, stage: usize) -> Self {
        Self {
            in_size,
            out_size,
            stage,
            digits: vec![0; 1 + 2 * stage],
            windows: state_count(window, out_size).expect("window state count"),
            done: false,
        }
    }

    fn next_output_prefix(&mut self) -> usize {
        assert!(!self.done, "history walk exhausted");
        let mut prefix = self.digits[0];
        for j in 0..self.stage {
            prefix = prefix * self.out_size + self.digits[2 + 2 * j];
        }
        // advance mixed-radix counter, least-significant digit last
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            let radix = if pos == 0 {
                self.windows
            } else if pos % 2 == 1 {
                self.in_size
            } else {
                self.out_size
            };
            self.digits[pos] += 1;
            if self.digits[pos] < radix {
                break;
            }
            self.digits[pos] = 0;
        }
        prefix
    }
}

/// Dense joint distribution of the initial window and `(A^n, B^n)`.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    horizon: usize,
    window: usize,
    in_size: usize,
    out_size: usize,
    /// Indexed by folding `(w, a_0, b_0, ..., a_n, b_n)` in time order.
    mass: Vec<f64>,
}

impl JointDistribution {
    #[inline]
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    pub fn window(&self) -> usize {
        self.window
    }

    #[inline]
    pub fn input_size(&self) -> usize {
        self.in_size
    }

    #[inline]
    pub fn output_size(&self) -> usize {
        self.out_size
    }

    #[inline]
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Decomposes a flat path index into `(w, inputs, outputs)`.
    pub fn decompose(&self, mut idx: usize) -> (usize, Vec<usize>, Vec<usize>) {
        let n = self.horizon;
        let mut inputs = vec![0; n + 1];
        let mut outputs = vec![0; n + 1];
        for i in (0..=n).rev() {
            outputs[i] = idx % self.out_size;
            idx /= self.out_size;
            inputs[i] = idx % self.in_size;
            idx /= self.in_size;
        }
        (idx, inputs, outputs)
    }

    /// Output-sequence marginals per level: element `i` maps the fold of
    /// `(w, b_0..b_i)` to its probability; a leading element maps `w` alone.
    /// Returned as `(initial, levels)`.
    pub fn output_marginals(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.horizon;
        let windows = self.mass.len() / pow(self.in_size * self.out_size, n + 1);
        let mut finest = vec![0.0; windows * pow(self.out_size, n + 1)];
        for (idx, &m) in self.mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let (w, _, outputs) = self.decompose(idx);
            let mut o = w;
            for &b in &outputs {
                o = o * self.out_size + b;
            }
            finest[o] += m;
        }
        let mut levels = vec![Vec::new(); n + 1];
        levels[n] = finest;
        for i in (0..n).rev() {
            let child = &levels[i + 1];
            let mut parent = vec![0.0; child.len() / self.out_size];
            for (c, &m) in child.iter().enumerate() {
                parent[c / self.out_size] += m;
            }
            levels[i] = parent;
        }
        let mut initial = vec![0.0; levels[0].len() / self.out_size];
        for (c, &m) in levels[0].iter().enumerate() {
            initial[c / self.out_size] += m;
        }
        (initial, levels)
    }
}

#[inline]
fn pow(base: usize, exp: usize) -> usize {
    let mut acc = 1usize;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

fn validate_instance(
    channel: &FiniteChannelKernel,
    policy: &FullHistoryPolicy,
    initial: &Simplex,
) -> Result<()> {
    if policy.input_size() != channel.input_alphabet().size()
        || policy.output_size() != channel.output_alphabet().size()
    {
        return Err(CoreError::Domain(
            "policy and channel alphabets disagree".into(),
        ));
    }
    if policy.window() < channel.memory() {
        return Err(CoreError::Domain(format!(
            "initial window {} shorter than channel memory {}",
            policy.window(),
            channel.memory()
        )));
    }
    let windows = state_count(policy.window(), channel.output_alphabet().size())?;
    if initial.len() != windows {
        return Err(CoreError::Domain(format!(
            "initial distribution has {} entries, expected {windows}",
            initial.len()
        )));
    }
    Ok(())
}

/// The joint distribution induced by a channel, a full-history policy, and an
/// initial-window distribution, by exact product enumeration.
pub fn build_joint(
    channel: &FiniteChannelKernel,
    policy: &FullHistoryPolicy,
    initial: &Simplex,
    horizon: usize,
) -> Result<JointDistribution> {
    build_joint_capped(channel, policy, initial, horizon, DEFAULT_ENTRY_CAP)
}

/// As [`build_joint`] with an explicit entry cap.
pub fn build_joint_capped(
    channel: &FiniteChannelKernel,
    policy: &FullHistoryPolicy,
    initial: &Simplex,
    horizon: usize,
    cap: u64,
) -> Result<JointDistribution> {
    validate_instance(channel, policy, initial)?;
    if horizon != policy.horizon() {
        return Err(CoreError::Domain(format!(
            "policy horizon {} does not match requested horizon {horizon}",
            policy.horizon()
        )));
    }
    let in_size = policy.input_size();
    let out_size = policy.output_size();
    let windows = initial.len();
    let entries = windows as u128 * (pow(in_size * out_size, horizon + 1)) as u128;
    if entries > cap as u128 {
        return Err(CoreError::Resource { needed: entries, cap });
    }
    let mut mass = vec![0.0; entries as usize];

    // depth-first product walk; path and history indices share digit order
    struct Walk<'a> {
        channel: &'a FiniteChannelKernel,
        policy: &'a FullHistoryPolicy,
        horizon: usize,
        out_size: usize,
        mass: &'a mut [f64],
    }
    impl Walk<'_> {
        fn go(&mut self, stage: usize, hist: usize, out_prefix: usize, prob: f64) {
            if prob == 0.0 {
                // zero-mass subtree: leaves are already zero
                return;
            }
            if stage > self.horizon {
                self.mass[hist] = prob;
                return;
            }
            let chan_state =
                window_suffix(out_prefix, self.channel.memory(), self.out_size);
            let row = self.policy.row(stage, hist);
            for a in 0..row.len() {
                let pa = row.get(a);
                let q = self.channel.row(chan_state, a);
                for (b, &qb) in q.iter().enumerate() {
                    self.go(
                        stage + 1,
                        (hist * row.len() + a) * self.out_size + b,
                        out_prefix * self.out_size + b,
                        prob * pa * qb,
                    );
                }
            }
        }
    }
    let mut walk = Walk {
        channel,
        policy,
        horizon,
        out_size,
        mass: &mut mass,
    };
    for w in 0..windows {
        walk.go(0, w, w, initial.get(w));
    }
    Ok(JointDistribution {
        horizon,
        window: policy.window(),
        in_size,
        out_size,
        mass,
    })
}

/// Expected log-likelihood of the channel factors,
/// `E[sum_i ln Q(B_i | B_{i-M}^{i-1}, A_i)]`.
fn expected_log_channel(joint: &JointDistribution, channel: &FiniteChannelKernel) -> f64 {
    let out_size = joint.output_size();
    let mut acc = 0.0;
    for (idx, &m) in joint.mass().iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let (w, inputs, outputs) = joint.decompose(idx);
        let mut prefix = w;
        let mut term = 0.0;
        for i in 0..=joint.horizon() {
            let state = window_suffix(prefix, channel.memory(), out_size);
            term += channel.prob(state, inputs[i], outputs[i]).ln();
            prefix = prefix * out_size + outputs[i];
        }
        acc += m * term;
    }
    acc
}

/// `E[sum_i ln Pi_i(B_i | B^{i-1})]` from the output marginals.
fn expected_log_output_law(joint: &JointDistribution) -> f64 {
    let (initial, levels) = joint.output_marginals();
    let out_size = joint.output_size();
    let mut acc = 0.0;
    for (i, level) in levels.iter().enumerate() {
        let parents: &[f64] = if i == 0 { &initial } else { &levels[i - 1] };
        for (v, &m) in level.iter().enumerate() {
            if m > 0.0 {
                acc += m * (m / parents[v / out_size]).ln();
            }
        }
    }
    acc
}

/// Directed information `I(A^n -> B^n)` in nats under the induced joint
/// distribution, by full enumeration.
pub fn directed_information(
    channel: &FiniteChannelKernel,
    policy: &FullHistoryPolicy,
    initial: &Simplex,
    horizon: usize,
) -> Result<f64> {
    let joint = build_joint(channel, policy, initial, horizon)?;
    Ok(directed_information_of(&joint, channel))
}

/// Directed information of an already-built joint distribution.
pub fn directed_information_of(joint: &JointDistribution, channel: &FiniteChannelKernel) -> f64 {
    expected_log_channel(joint, channel) - expected_log_output_law(joint)
}

/// One comparison output kernel per stage: either conditioned on the full
/// output history or on a window of the last `order` outputs.
#[derive(Debug, Clone)]
pub enum OutputKernel {
    /// Rows indexed by the output-history fold `(w, b_0..b_{i-1})`.
    Full(Vec<Simplex>),
    /// Rows indexed by the last `order` output symbols.
    Windowed { order: usize, rows: Vec<Simplex> },
}

/// A sequence `V_0, ..., V_n` of output kernels.
#[derive(Debug, Clone)]
pub struct OutputKernelSeq {
    pub kernels: Vec<OutputKernel>,
}

impl OutputKernelSeq {
    /// Uniform output law at every stage.
    pub fn uniform(horizon: usize, out_size: usize) -> Self {
        let rows = vec![Simplex::uniform(out_size)];
        Self {
            kernels: vec![
                OutputKernel::Windowed { order: 0, rows };
                horizon + 1
            ],
        }
    }
}

/// The induced output kernels `Pi_i^P(. | b^{i-1})` of a joint distribution.
/// Rows of zero-mass histories are filled uniformly; they carry no weight.
pub fn induced_output_kernels(joint: &JointDistribution) -> OutputKernelSeq {
    let (initial, levels) = joint.output_marginals();
    let out_size = joint.output_size();
    let mut kernels = Vec::with_capacity(joint.horizon() + 1);
    for (i, level) in levels.iter().enumerate() {
        let parents: &[f64] = if i == 0 { &initial } else { &levels[i - 1] };
        let mut rows = Vec::with_capacity(parents.len());
        for (u, &pm) in parents.iter().enumerate() {
            if pm > 0.0 {
                let w: Vec<f64> = (0..out_size)
                    .map(|b| level[u * out_size + b] / pm)
                    .collect();
                rows.push(Simplex::from_weights(&w).expect("stochastic row"));
            } else {
                rows.push(Simplex::uniform(out_size));
            }
        }
        kernels.push(OutputKernel::Full(rows));
    }
    OutputKernelSeq { kernels }
}

/// The variational functional of directed information,
/// `sum_i E[ln(Q_i(B_i|.) / V_i(B_i|.))]`, for arbitrary comparison kernels.
///
/// Returns `f64::INFINITY` when some `V_i` assigns zero mass where the induced
/// output law does not (absolute-continuity failure).
pub fn variational_objective(
    channel: &FiniteChannelKernel,
    policy: &FullHistoryPolicy,
    initial: &Simplex,
    horizon: usize,
    v: &OutputKernelSeq,
) -> Result<f64> {
    let joint = build_joint(channel, policy, initial, horizon)?;
    variational_objective_of(&joint, channel, v)
}

/// As [`variational_objective`] on an already-built joint distribution.
pub fn variational_objective_of(
    joint: &JointDistribution,
    channel: &FiniteChannelKernel,
    v: &OutputKernelSeq,
) -> Result<f64> {
    if v.kernels.len() != joint.horizon() + 1 {
        return Err(CoreError::Domain(format!(
            "kernel sequence has {} stages, expected {}",
            v.kernels.len(),
            joint.horizon() + 1
        )));
    }
    let out_size = joint.output_size();
    let (_, levels) = joint.output_marginals();
    let mut acc = expected_log_channel(joint, channel);
    for (i, level) in levels.iter().enumerate() {
        let kernel = &v.kernels[i];
        for (node, &m) in level.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let parent = node / out_size;
            let b = node % out_size;
            let vb = match kernel {
                OutputKernel::Full(rows) => {
                    if parent >= rows.len() {
                        return Err(CoreError::Domain(format!(
                            "stage {i} kernel has {} rows, history index {parent} out of range",
                            rows.len()
                        )));
                    }
                    rows[parent].get(b)
                }
                OutputKernel::Windowed { order, rows } => {
                    if *order > joint.window() + i {
                        return Err(CoreError::Domain(format!(
                            "stage {i} kernel window {order} exceeds available history"
                        )));
                    }
                    let state = window_suffix(parent, *order, out_size);
                    rows[state].get(b)
                }
            };
            if vb <= 0.0 {
                return Ok(f64::INFINITY);
            }
            acc -= m * vb.ln();
        }
    }
    Ok(acc)
}

/// The identity gap `sum_i E[KL(Pi_i(.|B^{i-1}) || V_i(.|B^{i-1}))]` between
/// the induced output law of a joint distribution and arbitrary comparison
/// kernels; this is exactly `variational_objective - directed_information`.
pub fn expected_kl_gap(joint: &JointDistribution, v: &OutputKernelSeq) -> f64 {
    let (initial, levels) = joint.output_marginals();
    let out_size = joint.output_size();
    let induced = induced_output_kernels(joint);
    let mut acc = 0.0;
    for i in 0..levels.len() {
        let parents: &[f64] = if i == 0 { &initial } else { &levels[i - 1] };
        let OutputKernel::Full(rows) = &induced.kernels[i] else {
            unreachable!("induced kernels are full-history")
        };
        for (u, &pm) in parents.iter().enumerate() {
            if pm == 0.0 {
                continue;
            }
            let vrow: Vec<f64> = (0..out_size)
                .map(|b| match &v.kernels[i] {
                    OutputKernel::Full(r) => r[u].get(b),
                    OutputKernel::Windowed { order, rows } => {
                        rows[window_suffix(u, *order, out_size)].get(b)
                    }
                })
                .collect();
            acc += pm * crate::prob::kl_divergence_raw(rows[u].probs(), &vrow);
        }
    }
    acc
}

/// Per-stage directed-information terms of a `J`-window Markov policy via the
/// `J`-state recursion (no history enumeration), and their total.
///
/// Propagates the distribution of `B_{i-J}^{i-1}`, forms the induced one-step
/// output law per state, and accumulates `E[ln(dQ/dnu)]` stage by stage. For
/// any `J >= M` this equals full-enumeration directed information of the
/// embedded policy.
pub fn stationary_rate_via_states(
    channel: &FiniteChannelKernel,
    policy: &MarkovInputPolicy,
    initial: &Simplex,
    horizon: usize,
) -> Result<(Vec<f64>, f64)> {
    let j = policy.memory();
    if j < channel.memory() {
        return Err(CoreError::Domain(format!(
            "policy memory {j} shorter than channel memory {} (J >= M required)",
            channel.memory()
        )));
    }
    if policy.input_alphabet().size() != channel.input_alphabet().size()
        || policy.output_alphabet().size() != channel.output_alphabet().size()
    {
        return Err(CoreError::Domain(
            "policy and channel alphabets disagree".into(),
        ));
    }
    let out_size = channel.output_alphabet().size();
    let in_size = channel.input_alphabet().size();
    let states = state_count(j, out_size)?;
    if initial.len() != states {
        return Err(CoreError::Domain(format!(
            "initial distribution has {} entries, expected {states}",
            initial.len()
        )));
    }

    let mut p: Vec<f64> = initial.probs().to_vec();
    let mut per_stage = Vec::with_capacity(horizon + 1);
    for _ in 0..=horizon {
        let mut stage = 0.0;
        let mut next = vec![0.0; states];
        for (s, &ps) in p.iter().enumerate() {
            // induced one-step output law at this state
            let mut nu = vec![0.0; out_size];
            for a in 0..in_size {
                let pa = policy.prob(s, a);
                if pa == 0.0 {
                    continue;
                }
                for (b, &qb) in channel.row_for_window(s, a).iter().enumerate() {
                    nu[b] += pa * qb;
                }
            }
            if ps > 0.0 {
                let mut term = 0.0;
                for a in 0..in_size {
                    let pa = policy.prob(s, a);
                    if pa == 0.0 {
                        continue;
                    }
                    for (b, &qb) in channel.row_for_window(s, a).iter().enumerate() {
                        if qb > 0.0 {
                            term += pa * qb * (qb / nu[b]).ln();
                        }
                    }
                }
                stage += ps * term;
            }
            for (b, &nb) in nu.iter().enumerate() {
                if nb > 0.0 {
                    next[crate::prob::shift_state(s, b, j, out_size)?] += ps * nb;
                }
            }
        }
        per_stage.push(stage);
        p = next;
    }
    let total = per_stage.iter().sum();
    Ok((per_stage, total))
}

/// Expected total transmission cost `E[sum_i gamma(A_i, B_{i-K}^{i-1})]` of a
/// joint distribution.
pub fn expected_total_cost(joint: &JointDistribution, cost: &TransmissionCost) -> f64 {
    let out_size = joint.output_size();
    let mut acc = 0.0;
    for (idx, &m) in joint.mass().iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let (w, inputs, outputs) = joint.decompose(idx);
        let mut prefix = w;
        let mut term = 0.0;
        for i in 0..=joint.horizon() {
            term += cost.cost_for_window(prefix, inputs[i]);
            prefix = prefix * out_size + outputs[i];
        }
        acc += m * term;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FiniteChannelKernel;
    use crate::prob::Alphabet;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    fn identity_channel() -> FiniteChannelKernel {
        let a = Alphabet::new(2).unwrap();
        FiniteChannelKernel::new(0, a, a, vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]]).unwrap()
    }

    fn random_umco(rng: &mut ChaCha20Rng) -> FiniteChannelKernel {
        let a = Alphabet::new(2).unwrap();
        let mut rows = Vec::new();
        for _ in 0..2 {
            let mut slice = Vec::new();
            for _ in 0..2 {
                let x: f64 = rng.random_range(0.05..0.95);
                slice.push(vec![x, 1.0 - x]);
            }
            rows.push(slice);
        }
        FiniteChannelKernel::new(1, a, a, rows).unwrap()
    }

    fn random_markov_policy(rng: &mut ChaCha20Rng, j: usize) -> MarkovInputPolicy {
        let a = Alphabet::new(2).unwrap();
        let states = state_count(j, 2).unwrap();
        let rows = (0..states)
            .map(|_| {
                let x: f64 = rng.random_range(0.05..0.95);
                Simplex::new(vec![x, 1.0 - x]).unwrap()
            })
            .collect();
        MarkovInputPolicy::new(j, a, a, rows).unwrap()
    }

    #[test]
    fn joint_identity_channel_n0() {
        let chan = identity_channel();
        let policy = FullHistoryPolicy::uniform(0, 0, 2, 2, DEFAULT_ENTRY_CAP).unwrap();
        let init = Simplex::uniform(1);
        let joint = build_joint(&chan, &policy, &init, 0).unwrap();
        // atoms (a,b): (0,0) and (1,1) carry 0.5 each
        assert_eq!(joint.mass().len(), 4);
        assert_eq!(joint.mass()[0], 0.5);
        assert_eq!(joint.mass()[1], 0.0);
        assert_eq!(joint.mass()[2], 0.0);
        assert_eq!(joint.mass()[3], 0.5);
    }

    #[test]
    fn joint_degenerate_policy_supported_on_zero_input() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let chan = random_umco(&mut rng);
        let zero = Simplex::point(2, 0);
        let policy =
            FullHistoryPolicy::from_fn(1, 1, 2, 2, DEFAULT_ENTRY_CAP, |_, _| zero.clone())
                .unwrap();
        let init = Simplex::uniform(2);
        let joint = build_joint(&chan, &policy, &init, 1).unwrap();
        for (idx, &m) in joint.mass().iter().enumerate() {
            let (_, inputs, _) = joint.decompose(idx);
            if inputs.iter().any(|&a| a != 0) {
                assert_eq!(m, 0.0);
            }
        }
        assert!((joint.total() - 1.0).abs() < 1e-12);
        // deterministic open-loop input carries no information
        let di = directed_information(&chan, &policy, &init, 1).unwrap();
        assert!(di.abs() < 1e-12);
    }

    #[test]
    fn joint_bsc_product_form() {
        let chan = FiniteChannelKernel::binary_symmetric(0.1).unwrap();
        let policy = FullHistoryPolicy::uniform(2, 0, 2, 2, DEFAULT_ENTRY_CAP).unwrap();
        let init = Simplex::uniform(1);
        let joint = build_joint(&chan, &policy, &init, 2).unwrap();
        assert_eq!(joint.mass().len(), 64);
        assert!((joint.total() - 1.0).abs() < 1e-12);
        for (idx, &m) in joint.mass().iter().enumerate() {
            let (_, inputs, outputs) = joint.decompose(idx);
            let agree = inputs
                .iter()
                .zip(&outputs)
                .filter(|(a, b)| a == b)
                .count();
            let expect = 0.125 * 0.9f64.powi(agree as i32) * 0.1f64.powi(3 - agree as i32);
            assert!((m - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn di_bsc_single_letter() {
        let chan = FiniteChannelKernel::binary_symmetric(0.1).unwrap();
        let policy = FullHistoryPolicy::uniform(0, 0, 2, 2, DEFAULT_ENTRY_CAP).unwrap();
        let init = Simplex::uniform(1);
        let di = directed_information(&chan, &policy, &init, 0).unwrap();
        // ln 2 - h(0.1), by brute force over the 4 outcomes
        let h = -(0.1f64 * 0.1f64.ln() + 0.9 * 0.9f64.ln());
        assert!((di - (std::f64::consts::LN_2 - h)).abs() < 1e-14);
    }

    #[test]
    fn di_matches_state_recursion_on_umco() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        for trial in 0..20 {
            let chan = random_umco(&mut rng);
            let n = (trial % 4) + 1;
            let policy = random_markov_policy(&mut rng, 1);
            let init = Simplex::from_weights(&[rng.random_range(0.2..1.0), rng.random_range(0.2..1.0)])
                .unwrap();
            let full = FullHistoryPolicy::from_markov(&policy, n, 1, DEFAULT_ENTRY_CAP).unwrap();
            let di = directed_information(&chan, &full, &init, n).unwrap();
            let (stages, total) = stationary_rate_via_states(&chan, &policy, &init, n).unwrap();
            assert_eq!(stages.len(), n + 1);
            assert!(
                (di - total).abs() < 1e-12,
                "trial {trial}: enumeration {di} vs recursion {total}"
            );
        }
    }

    #[test]
    fn state_recursion_memoryless_reduction() {
        let chan = FiniteChannelKernel::binary_symmetric(0.1).unwrap();
        let a = Alphabet::new(2).unwrap();
        let policy = MarkovInputPolicy::uniform(0, a, a).unwrap();
        let init = Simplex::uniform(1);
        let n = 5;
        let (stages, total) = stationary_rate_via_states(&chan, &policy, &init, n).unwrap();
        let h = -(0.1f64 * 0.1f64.ln() + 0.9 * 0.9f64.ln());
        let single = std::f64::consts::LN_2 - h;
        for s in &stages {
            assert!((s - single).abs() < 1e-14);
        }
        assert!((total - (n as f64 + 1.0) * single).abs() < 1e-13);
    }

    #[test]
    fn state_recursion_insensitive_to_degenerate_memory() {
        // UMCO whose two state slices coincide: J=1 and J=0 policies with the
        // same marginals give identical totals
        let a = Alphabet::new(2).unwrap();
        let slice = vec![vec![0.8, 0.2], vec![0.3, 0.7]];
        let chan =
            FiniteChannelKernel::new(1, a, a, vec![slice.clone(), slice]).unwrap();
        let row = Simplex::new(vec![0.4, 0.6]).unwrap();
        let p1 = MarkovInputPolicy::new(1, a, a, vec![row.clone(), row.clone()]).unwrap();
        let (_, t1) =
            stationary_rate_via_states(&chan, &p1, &Simplex::uniform(2), 3).unwrap();
        // J=0 comparison needs a J>=M policy; embed it as state-independent J=1
        let p0 = MarkovInputPolicy::new(1, a, a, vec![row.clone(), row]).unwrap();
        let (_, t0) =
            stationary_rate_via_states(&chan, &p0, &Simplex::uniform(2), 3).unwrap();
        assert!((t1 - t0).abs() < 1e-14);
    }

    #[test]
    fn state_recursion_rejects_short_policy_memory() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let chan = random_umco(&mut rng);
        let a = Alphabet::new(2).unwrap();
        let policy = MarkovInputPolicy::uniform(0, a, a).unwrap();
        assert!(stationary_rate_via_states(&chan, &policy, &Simplex::uniform(1), 2).is_err());
    }

    #[test]
    fn variational_equality_and_gap_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..10 {
            let chan = random_umco(&mut rng);
            let n = 2;
            let policy = FullHistoryPolicy::from_fn(n, 1, 2, 2, DEFAULT_ENTRY_CAP, |_, _| {
                let x: f64 = rng.random_range(0.05..0.95);
                Simplex::new(vec![x, 1.0 - x]).unwrap()
            })
            .unwrap();
            let init = Simplex::uniform(2);
            let joint = build_joint(&chan, &policy, &init, n).unwrap();
            let di = directed_information_of(&joint, &chan);

            // achiever: V = induced output law
            let induced = induced_output_kernels(&joint);
            let at_induced = variational_objective_of(&joint, &chan, &induced).unwrap();
            assert!((at_induced - di).abs() < 1e-12);

            // arbitrary V: objective - DI equals the sum of KL terms
            for _ in 0..20 {
                let v = OutputKernelSeq {
                    kernels: (0..=n)
                        .map(|_| {
                            let x: f64 = rng.random_range(0.05..0.95);
                            OutputKernel::Windowed {
                                order: 1,
                                rows: vec![
                                    Simplex::new(vec![x, 1.0 - x]).unwrap(),
                                    Simplex::new(vec![1.0 - x, x]).unwrap(),
                                ],
                            }
                        })
                        .collect(),
                };
                let obj = variational_objective_of(&joint, &chan, &v).unwrap();
                assert!(obj >= di - 1e-12);
                let gap = expected_kl_gap(&joint, &v);
                assert!(((obj - di) - gap).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn uniform_kernels_achieve_di_when_output_law_is_uniform() {
        // BSC with uniform input induces a uniform output law, so the
        // comparison against uniform kernels has zero KL gap
        let chan = FiniteChannelKernel::binary_symmetric(0.1).unwrap();
        let policy = FullHistoryPolicy::uniform(0, 0, 2, 2, DEFAULT_ENTRY_CAP).unwrap();
        let init = Simplex::uniform(1);
        let joint = build_joint(&chan, &policy, &init, 0).unwrap();
        let di = directed_information_of(&joint, &chan);
        let v = OutputKernelSeq::uniform(0, 2);
        let obj = variational_objective_of(&joint, &chan, &v).unwrap();
        assert!((obj - di).abs() < 1e-14);
    }

    #[test]
    fn marginal_consistency() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let chan = random_umco(&mut rng);
        let policy = random_markov_policy(&mut rng, 1);
        let n = 3;
        let full = FullHistoryPolicy::from_markov(&policy, n, 1, DEFAULT_ENTRY_CAP).unwrap();
        let init = Simplex::uniform(2);
        let joint = build_joint(&chan, &full, &init, n).unwrap();
        // summing the joint over inputs must reproduce mu x prod Pi_i
        let (initial, levels) = joint.output_marginals();
        assert!((initial.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let induced = induced_output_kernels(&joint);
        let finest = &levels[n];
        for (node, &m) in finest.iter().enumerate() {
            // rebuild mass from mu and the chain of induced kernels
            let mut digits = Vec::new();
            let mut rem = node;
            for _ in 0..=n {
                digits.push(rem % 2);
                rem /= 2;
            }
            digits.reverse();
            let w = rem;
            let mut expect = init.get(w);
            let mut prefix = w;
            for (i, &b) in digits.iter().enumerate() {
                let OutputKernel::Full(rows) = &induced.kernels[i] else {
                    unreachable!()
                };
                expect *= rows[prefix].get(b);
                prefix = prefix * 2 + b;
            }
            assert!((m - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let chan = FiniteChannelKernel::binary_symmetric(0.1).unwrap();
        let err = FullHistoryPolicy::uniform(12, 0, 2, 2, 1000);
        assert!(matches!(err, Err(CoreError::Resource { .. })));
        let policy = FullHistoryPolicy::uniform(2, 0, 2, 2, DEFAULT_ENTRY_CAP).unwrap();
        let err = build_joint_capped(&chan, &policy, &Simplex::uniform(1), 2, 10);
        assert!(matches!(err, Err(CoreError::Resource { .. })));
    }
}
