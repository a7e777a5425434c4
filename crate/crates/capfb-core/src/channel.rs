//! Channel kernels with output memory, transmission cost tables, and Markov
//! input policies.
//!
//! A kernel `Q(b | b_{i-M}^{i-1}, a)` is stored as a row-stochastic tensor
//! indexed `[window state][input][output]`; `M = 0` collapses the state axis
//! to a single state and the channel degenerates to a memoryless one.

use crate::error::{CoreError, Result};
use crate::prob::{state_count, window_suffix, Alphabet, Simplex};

/// Channel conditional distribution `Q(b_i | b_{i-M}^{i-1}, a_i)` on finite
/// alphabets.
#[derive(Debug, Clone)]
pub struct FiniteChannelKernel {
    memory: usize,
    input: Alphabet,
    output: Alphabet,
    states: usize,
    /// Flattened `[state][input][output]`, every (state, input) row stochastic.
    q: Vec<f64>,
}

impl FiniteChannelKernel {
    pub fn new(
        memory: usize,
        input: Alphabet,
        output: Alphabet,
        rows: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let states = state_count(memory, output.size())?;
        if rows.len() != states {
            return Err(CoreError::Domain(format!(
                "kernel has {} state slices, expected {states}",
                rows.len()
            )));
        }
        let mut q = Vec::with_capacity(states * input.size() * output.size());
        for (s, slice) in rows.iter().enumerate() {
            if slice.len() != input.size() {
                return Err(CoreError::Domain(format!(
                    "kernel state {s} has {} input rows, expected {}",
                    slice.len(),
                    input.size()
                )));
            }
            for (a, row) in slice.iter().enumerate() {
                if row.len() != output.size() {
                    return Err(CoreError::Domain(format!(
                        "kernel row (state {s}, input {a}) has {} outputs, expected {}",
                        row.len(),
                        output.size()
                    )));
                }
                let simplex = Simplex::new(row.clone()).map_err(|e| {
                    CoreError::Domain(format!("kernel row (state {s}, input {a}): {e}"))
                })?;
                q.extend_from_slice(simplex.probs());
            }
        }
        Ok(Self {
            memory,
            input,
            output,
            states,
            q,
        })
    }

    /// Memoryless binary symmetric channel with crossover probability `eps`.
    pub fn binary_symmetric(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(CoreError::Domain(format!(
                "crossover probability {eps} outside [0, 1]"
            )));
        }
        let a = Alphabet::new(2)?;
        Self::new(
            0,
            a,
            a,
            vec![vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]]],
        )
    }

    #[inline]
    pub fn memory(&self) -> usize {
        self.memory
    }

    #[inline]
    pub fn input_alphabet(&self) -> Alphabet {
        self.input
    }

    #[inline]
    pub fn output_alphabet(&self) -> Alphabet {
        self.output
    }

    /// Number of channel window states, `|B|^M`.
    #[inline]
    pub fn state_count(&self) -> usize {
        self.states
    }

    #[inline]
    pub fn prob(&self, state: usize, input: usize, output: usize) -> f64 {
        self.q[(state * self.input.size() + input) * self.output.size() + output]
    }

    /// The stochastic row `Q(. | state, input)`.
    #[inline]
    pub fn row(&self, state: usize, input: usize) -> &[f64] {
        let base = (state * self.input.size() + input) * self.output.size();
        &self.q[base..base + self.output.size()]
    }

    /// Row addressed by a `j`-window state with `j >= M`; the channel reads
    /// the last `M` symbols.
    #[inline]
    pub fn row_for_window(&self, window_state: usize, input: usize) -> &[f64] {
        self.row(
            window_suffix(window_state, self.memory, self.output.size()),
            input,
        )
    }
}

/// Transmission cost table `gamma(a_i, b_{i-K}^{i-1})` with budget `kappa`.
#[derive(Debug, Clone)]
pub struct TransmissionCost {
    memory: usize,
    input: Alphabet,
    output: Alphabet,
    states: usize,
    /// Flattened `[cost state][input]`, nonnegative.
    table: Vec<f64>,
    kappa: f64,
}

impl TransmissionCost {
    pub fn new(
        memory: usize,
        input: Alphabet,
        output: Alphabet,
        rows: Vec<Vec<f64>>,
        kappa: f64,
    ) -> Result<Self> {
        let states = state_count(memory, output.size())?;
        if rows.len() != states {
            return Err(CoreError::Domain(format!(
                "cost table has {} state rows, expected {states}",
                rows.len()
            )));
        }
        let mut table = Vec::with_capacity(states * input.size());
        for (s, row) in rows.iter().enumerate() {
            if row.len() != input.size() {
                return Err(CoreError::Domain(format!(
                    "cost row {s} has {} entries, expected {}",
                    row.len(),
                    input.size()
                )));
            }
            for (a, &c) in row.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(CoreError::Domain(format!(
                        "cost entry (state {s}, input {a}) = {c} must be finite and >= 0"
                    )));
                }
                table.push(c);
            }
        }
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(CoreError::Domain(format!(
                "budget kappa = {kappa} must be finite and >= 0"
            )));
        }
        Ok(Self {
            memory,
            input,
            output,
            states,
            table,
            kappa,
        })
    }

    /// Memoryless cost `gamma(a)` (K = 0).
    pub fn memoryless(input: Alphabet, output: Alphabet, row: Vec<f64>, kappa: f64) -> Result<Self> {
        Self::new(0, input, output, vec![row], kappa)
    }

    /// Same table with a different budget.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(CoreError::Domain(format!(
                "budget kappa = {kappa} must be finite and >= 0"
            )));
        }
        let mut out = self.clone();
        out.kappa = kappa;
        Ok(out)
    }

    #[inline]
    pub fn memory(&self) -> usize {
        self.memory
    }

    #[inline]
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    #[inline]
    pub fn state_count(&self) -> usize {
        self.states
    }

    #[inline]
    pub fn input_alphabet(&self) -> Alphabet {
        self.input
    }

    #[inline]
    pub fn cost(&self, state: usize, input: usize) -> f64 {
        self.table[state * self.input.size() + input]
    }

    /// Cost addressed by a `j`-window state with `j >= K`.
    #[inline]
    pub fn cost_for_window(&self, window_state: usize, input: usize) -> f64 {
        self.cost(
            window_suffix(window_state, self.memory, self.output.size()),
            input,
        )
    }

    /// Largest cost achievable by any (state, input) pair.
    pub fn max_entry(&self) -> f64 {
        self.table.iter().cloned().fold(0.0, f64::max)
    }
}

/// Channel input policy `pi(a | b_{i-J}^{i-1})`: one simplex row per
/// `J`-window state.
#[derive(Debug, Clone)]
pub struct MarkovInputPolicy {
    memory: usize,
    input: Alphabet,
    output: Alphabet,
    rows: Vec<Simplex>,
}

impl MarkovInputPolicy {
    pub fn new(
        memory: usize,
        input: Alphabet,
        output: Alphabet,
        rows: Vec<Simplex>,
    ) -> Result<Self> {
        let states = state_count(memory, output.size())?;
        if rows.len() != states {
            return Err(CoreError::Domain(format!(
                "policy has {} rows, expected {states}",
                rows.len()
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != input.size()) {
            return Err(CoreError::Domain(format!(
                "policy row has {} entries, expected {}",
                r.len(),
                input.size()
            )));
        }
        Ok(Self {
            memory,
            input,
            output,
            rows,
        })
    }

    pub fn uniform(memory: usize, input: Alphabet, output: Alphabet) -> Result<Self> {
        let states = state_count(memory, output.size())?;
        Self::new(
            memory,
            input,
            output,
            vec![Simplex::uniform(input.size()); states],
        )
    }

    #[inline]
    pub fn memory(&self) -> usize {
        self.memory
    }

    #[inline]
    pub fn input_alphabet(&self) -> Alphabet {
        self.input
    }

    #[inline]
    pub fn output_alphabet(&self) -> Alphabet {
        self.output
    }

    #[inline]
    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn row(&self, state: usize) -> &Simplex {
        &self.rows[state]
    }

    pub fn rows(&self) -> &[Simplex] {
        &self.rows
    }

    #[inline]
    pub fn prob(&self, state: usize, input: usize) -> f64 {
        self.rows[state].get(input)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_indexing_uses_low_digits_for_recent_symbols() {
        let a = Alphabet::new(2).unwrap();
        // M = 1: state is just the previous output symbol
        let k = FiniteChannelKernel::new(
            1,
            a,
            a,
            vec![
                vec![vec![0.9, 0.1], vec![0.2, 0.8]],
                vec![vec![0.6, 0.4], vec![0.3, 0.7]],
            ],
        )
        .unwrap();
        assert_eq!(k.prob(1, 0, 1), 0.4);
        // lifted to a J=2 window (b_{-2}, b_{-1}) = (1, 0) -> state 2, channel
        // reads b_{-1} = 0
        assert_eq!(k.row_for_window(2, 1), k.row(0, 1));
    }

    #[test]
    fn kernel_rejects_non_stochastic_rows() {
        let a = Alphabet::new(2).unwrap();
        let err = FiniteChannelKernel::new(0, a, a, vec![vec![vec![0.5, 0.3], vec![0.5, 0.5]]]);
        assert!(err.is_err());
        let msg = format!("{}", err.unwrap_err());
        assert!(msg.contains("state 0, input 0"), "{msg}");
    }

    #[test]
    fn memoryless_collapse_single_state() {
        let k = FiniteChannelKernel::binary_symmetric(0.1).unwrap();
        assert_eq!(k.state_count(), 1);
        assert_eq!(k.memory(), 0);
        assert_eq!(k.row_for_window(0, 0), k.row(0, 0));
    }

    #[test]
    fn cost_table_validation() {
        let a = Alphabet::new(2).unwrap();
        assert!(TransmissionCost::memoryless(a, a, vec![0.0, 1.0], 0.5).is_ok());
        assert!(TransmissionCost::memoryless(a, a, vec![0.0, -1.0], 0.5).is_err());
        assert!(TransmissionCost::memoryless(a, a, vec![0.0, f64::NAN], 0.5).is_err());
        assert!(TransmissionCost::memoryless(a, a, vec![0.0, 1.0], -0.1).is_err());
    }
}
