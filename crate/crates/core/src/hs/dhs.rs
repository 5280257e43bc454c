//! Dynamic adaptation of HMCR and PAR.
//!
//! HMCR moves by `(1 − HMCR)(α − β)`, where α and β are the mean
//! normalized fitness of the last ten memory-considered and the last ten
//! random improvisations (min-max normalization over the pooled twenty
//! values). PAR moves by `E(1 − PAR)/100`, with E the percentage of the last
//! ten pitch-adjusted improvisations that beat their pre-adjustment genome.
//! Both results are clamped and the windows involved are cleared.

use alloc::collections::VecDeque;

use super::Interval;

/// Capacity of every adaptation window, and the HMCR check period.
pub const WINDOW: usize = 10;

/// Fixed-capacity ring keeping the most recent [`WINDOW`] values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Window<T> {
    items: VecDeque<T>,
}

impl<T: Copy> Window<T> {
    pub fn push(&mut self, value: T) {
        if self.items.len() == WINDOW {
            self.items.pop_front();
        }
        self.items.push_back(value);
    }

    pub fn is_full(&self) -> bool {
        self.items.len() == WINDOW
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn clear(&mut self) {
        self.items.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.items.iter().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DhsState {
    pub recent_memory_fitness: Window<f64>,
    pub recent_random_fitness: Window<f64>,
    pub pitch_success: Window<bool>,
}

impl DhsState {
    /// Books one improvisation. `pitch_success` is `None` when no gene was
    /// pitch-adjusted.
    pub fn record(&mut self, memory_considered: bool, fitness: f64, pitch_success: Option<bool>) {
        if memory_considered {
            self.recent_memory_fitness.push(fitness);
        } else {
            self.recent_random_fitness.push(fitness);
        }
        if let Some(s) = pitch_success {
            self.pitch_success.push(s);
        }
    }
}

/// `α − β` over the two windows after pooled min-max normalization.
/// Zero when all pooled values are equal.
pub fn normalized_gap(memory: &Window<f64>, random: &Window<f64>) -> f64 {
    let pooled = memory.iter().chain(random.iter());
    let (lo, hi) = pooled.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if !(hi > lo) {
        return 0.0;
    }
    let mean_norm = |w: &Window<f64>| w.iter().map(|x| (x - lo) / (hi - lo)).sum::<f64>() / w.len() as f64;
    mean_norm(memory) - mean_norm(random)
}

pub fn hmcr_step(hmcr: f64, gap: f64, clamp: Interval) -> f64 {
    clamp.clamp(hmcr + (1.0 - hmcr) * gap)
}

/// `e` is a percentage in `[0, 100]`.
pub fn par_step(par: f64, e: f64, clamp: Interval) -> f64 {
    clamp.clamp(par + e * (1.0 - par) / 100.0)
}

/// Adapts HMCR when both fitness windows are full, clearing them.
/// Returns `None` (state untouched) otherwise.
pub fn adapt_hmcr(state: &mut DhsState, hmcr: f64, clamp: Interval) -> Option<f64> {
    if !(state.recent_memory_fitness.is_full() && state.recent_random_fitness.is_full()) {
        return None;
    }
    let gap = normalized_gap(&state.recent_memory_fitness, &state.recent_random_fitness);
    state.recent_memory_fitness.clear();
    state.recent_random_fitness.clear();
    Some(hmcr_step(hmcr, gap, clamp))
}

/// Adapts PAR when the pitch-success window is full, clearing it.
pub fn adapt_par(state: &mut DhsState, par: f64, clamp: Interval) -> Option<f64> {
    if !state.pitch_success.is_full() {
        return None;
    }
    let successes = state.pitch_success.iter().filter(|&s| s).count();
    let e = 100.0 * successes as f64 / WINDOW as f64;
    state.pitch_success.clear();
    Some(par_step(par, e, clamp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hs::{DEFAULT_HMCR_BOUNDS, DEFAULT_PAR_BOUNDS};

    #[test]
    fn hmcr_examples() {
        assert_eq!(hmcr_step(0.8, 0.0, DEFAULT_HMCR_BOUNDS), 0.8);
        assert_eq!(hmcr_step(0.9, 1.0, DEFAULT_HMCR_BOUNDS), 0.99);
        assert!((hmcr_step(0.9, -0.5, DEFAULT_HMCR_BOUNDS) - 0.85).abs() < 1e-15);
    }

    #[test]
    fn par_examples() {
        assert_eq!(par_step(0.3, 0.0, DEFAULT_PAR_BOUNDS), 0.3);
        assert_eq!(par_step(0.3, 100.0, DEFAULT_PAR_BOUNDS), 0.99);
        assert!((par_step(0.3, 50.0, DEFAULT_PAR_BOUNDS) - 0.65).abs() < 1e-15);
    }

    #[test]
    fn window_keeps_last_ten() {
        let mut w = Window::default();
        for i in 0..15 {
            w.push(i as f64);
        }
        assert!(w.is_full());
        assert_eq!(w.iter().next(), Some(5.0));
    }

    #[test]
    fn gap_extremes() {
        let mut state = DhsState::default();
        for _ in 0..WINDOW {
            state.record(true, 3.0, None);
            state.record(false, 1.0, None);
        }
        assert_eq!(normalized_gap(&state.recent_memory_fitness, &state.recent_random_fitness), 1.0);
        assert_eq!(adapt_hmcr(&mut state, 0.9, DEFAULT_HMCR_BOUNDS), Some(0.99));
        assert!(state.recent_memory_fitness.is_empty() && state.recent_random_fitness.is_empty());
    }

    #[test]
    fn equal_values_leave_hmcr_alone() {
        let mut state = DhsState::default();
        for _ in 0..WINDOW {
            state.record(true, 2.0, None);
            state.record(false, 2.0, None);
        }
        assert_eq!(adapt_hmcr(&mut state, 0.7, DEFAULT_HMCR_BOUNDS), Some(0.7));
    }

    #[test]
    fn adaptation_waits_for_full_windows() {
        let mut state = DhsState::default();
        for _ in 0..WINDOW {
            state.record(true, 1.0, Some(true));
        }
        assert_eq!(adapt_hmcr(&mut state, 0.9, DEFAULT_HMCR_BOUNDS), None);
        assert_eq!(state.recent_memory_fitness.len(), WINDOW);
        let par = adapt_par(&mut state, 0.3, DEFAULT_PAR_BOUNDS).unwrap();
        assert_eq!(par, 0.99);
        assert!(state.pitch_success.is_empty());
        assert_eq!(adapt_par(&mut state, par, DEFAULT_PAR_BOUNDS), None);
    }

    #[test]
    fn half_successes() {
        let mut state = DhsState::default();
        for i in 0..WINDOW {
            state.record(true, 1.0, Some(i % 2 == 0));
        }
        let par = adapt_par(&mut state, 0.3, DEFAULT_PAR_BOUNDS).unwrap();
        assert!((par - 0.65).abs() < 1e-15);
    }
}
