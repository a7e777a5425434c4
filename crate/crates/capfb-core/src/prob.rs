//! Alphabets, probability simplices, output-window state encodings, and
//! relative entropy.
//!
//! Every tensor in this crate indexes window states with the same mixed-radix
//! rule: the most recent output symbol is the least-significant digit. With
//! that convention the last `m <= j` symbols of a `j`-window are simply the
//! state index modulo `radix^m`, which is how channel slices and cost slices
//! are extracted from lifted states everywhere downstream.
//!
//! All logarithms are natural; conversion to bits happens only at reporting
//! boundaries.

use crate::error::{CoreError, Result};

/// Acceptance band for simplex row sums: rows whose total deviates from 1 by
/// more than this are rejected, anything inside the band is renormalized.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// ln(2), used when converting nats to bits at output boundaries.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// A finite symbol alphabet `{0, 1, ..., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(CoreError::Domain("alphabet size must be >= 1".into()));
        }
        Ok(Self { size })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn symbols(&self) -> std::ops::Range<usize> {
        0..self.size
    }
}

/// A probability vector: nonnegative entries summing to one.
///
/// Construction renormalizes exactly when the raw sum is inside
/// [`SIMPLEX_SUM_TOL`] of 1 and rejects otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    probs: Vec<f64>,
}

impl Simplex {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(CoreError::Domain("simplex must have at least one entry".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 || p > 1.0 + SIMPLEX_SUM_TOL {
                return Err(CoreError::Domain(format!(
                    "simplex entry {i} = {p} outside [0, 1]"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(CoreError::Domain(format!(
                "simplex sum {sum} deviates from 1 by more than {SIMPLEX_SUM_TOL:e}"
            )));
        }
        let mut probs = probs;
        if sum != 1.0 {
            for p in &mut probs {
                *p /= sum;
            }
        }
        Ok(Self { probs })
    }

    /// Normalizes an arbitrary nonnegative weight vector with positive mass.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(CoreError::Domain("weight vector must be non-empty".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(CoreError::Domain(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(CoreError::Domain("weights must have positive total mass".into()));
        }
        Ok(Self {
            probs: weights.iter().map(|w| w / sum).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n.max(1)],
        }
    }

    /// Point mass on symbol `i`.
    pub fn point(n: usize, i: usize) -> Self {
        let mut probs = vec![0.0; n.max(1)];
        probs[i] = 1.0;
        Self { probs }
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }
}

/// Relative entropy D(p || q) in nats, with the 0 log 0 = 0 convention.
///
/// Returns `f64::INFINITY` when `p` puts mass where `q` does not; that is a
/// documented sentinel, not an error.
pub fn kl_divergence(p: &Simplex, q: &Simplex) -> f64 {
    kl_divergence_raw(p.probs(), q.probs())
}

pub(crate) fn kl_divergence_raw(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            acc += pi * (pi / qi).ln();
        }
    }
    // Rounding can push the sum a hair below zero when p == q.
    if acc < 0.0 && acc > -1e-15 {
        0.0
    } else {
        acc
    }
}

/// A window of the last `order` output symbols, most recent last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateWindow {
    order: usize,
    radix: usize,
    symbols: Vec<usize>,
}

impl StateWindow {
    /// `symbols[0]` is the oldest symbol `b_{i-order}`, `symbols[order-1]` the
    /// most recent `b_{i-1}`.
    pub fn new(order: usize, radix: usize, symbols: Vec<usize>) -> Result<Self> {
        if radix == 0 {
            return Err(CoreError::Domain("window radix must be >= 1".into()));
        }
        if symbols.len() != order {
            return Err(CoreError::Domain(format!(
                "window of order {order} given {} symbols",
                symbols.len()
            )));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= radix) {
            return Err(CoreError::Domain(format!(
                "window symbol {s} out of range for radix {radix}"
            )));
        }
        Ok(Self { order, radix, symbols })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }
}

/// Number of distinct `order`-windows, `radix^order`, guarded against overflow.
pub fn state_count(order: usize, radix: usize) -> Result<usize> {
    let mut acc: u128 = 1;
    for _ in 0..order {
        acc = acc.saturating_mul(radix as u128);
        if acc > u128::from(u64::MAX) {
            return Err(CoreError::Resource {
                needed: acc,
                cap: u64::MAX,
            });
        }
    }
    usize::try_from(acc).map_err(|_| CoreError::Resource {
        needed: acc,
        cap: u64::MAX,
    })
}

/// Mixed-radix encoding of a window; the most recent symbol is the
/// least-significant digit.
pub fn encode_state(window: &StateWindow) -> usize {
    let mut idx = 0usize;
    // symbols are oldest first, so folding left-to-right puts the most
    // recent symbol in the low digit
    for &s in window.symbols() {
        idx = idx * window.radix() + s;
    }
    idx
}

/// Exact inverse of [`encode_state`].
pub fn decode_state(index: usize, order: usize, radix: usize) -> Result<StateWindow> {
    let total = state_count(order, radix)?;
    if index >= total {
        return Err(CoreError::Domain(format!(
            "state index {index} out of range for {order} digits of radix {radix}"
        )));
    }
    let mut symbols = vec![0usize; order];
    let mut rem = index;
    for slot in symbols.iter_mut().rev() {
        *slot = rem % radix;
        rem /= radix;
    }
    StateWindow::new(order, radix, symbols)
}

/// Window update `b_{i-J}^{i-1} -> b_{i+1-J}^{i}`: drops the oldest symbol and
/// appends `new_symbol` as the most recent. For `order == 0` the single state 0
/// is returned.
pub fn shift_state(state: usize, new_symbol: usize, order: usize, radix: usize) -> Result<usize> {
    if order == 0 {
        if new_symbol >= radix {
            return Err(CoreError::Domain(format!(
                "symbol {new_symbol} out of range for radix {radix}"
            )));
        }
        return Ok(0);
    }
    let total = state_count(order, radix)?;
    if state >= total {
        return Err(CoreError::Domain(format!(
            "state index {state} out of range ({total} states)"
        )));
    }
    if new_symbol >= radix {
        return Err(CoreError::Domain(format!(
            "symbol {new_symbol} out of range for radix {radix}"
        )));
    }
    Ok((state % (total / radix)) * radix + new_symbol)
}

/// The last `sub_order` symbols of an `order`-window are its low digits.
#[inline]
pub fn window_suffix(state: usize, sub_order: usize, radix: usize) -> usize {
    let mut modulus = 1usize;
    for _ in 0..sub_order {
        modulus *= radix;
    }
    state % modulus
}
