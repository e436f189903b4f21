//! Sliding-window estimators of the hit probability and of the expected
//! change in model size.

use std::collections::VecDeque;

use crate::learner::{Action, StepOutcome};

pub const DEFAULT_WINDOW: usize = 1000;

#[derive(Clone, Debug)]
pub struct WindowStats {
    window_size: usize,
    recent: VecDeque<(bool, Action)>,
    hits: usize,
    inserts: usize,
    removes: usize,
    steps: u64,
    model_size: usize,
}

impl WindowStats {
    pub fn new(window_size: usize) -> Self {
        assert!(window_size > 0, "window size must be positive");
        Self {
            window_size,
            recent: VecDeque::with_capacity(window_size.min(1 << 16)),
            hits: 0,
            inserts: 0,
            removes: 0,
            steps: 0,
            model_size: 0,
        }
    }

    pub fn update(&mut self, outcome: &StepOutcome) {
        self.push(outcome.hit, outcome.action);
        self.model_size = outcome.model_size_after;
    }

    /// Records a step without a model (for stubbed traces).
    pub fn push(&mut self, hit: bool, action: Action) {
        if self.recent.len() == self.window_size {
            let (old_hit, old_action) = self.recent.pop_front().expect("full window");
            self.forget(old_hit, old_action);
        }
        self.recent.push_back((hit, action));
        self.hits += hit as usize;
        match action {
            Action::Insert => self.inserts += 1,
            Action::Remove => self.removes += 1,
            Action::Keep => {}
        }
        self.steps += 1;
    }

    fn forget(&mut self, hit: bool, action: Action) {
        self.hits -= hit as usize;
        match action {
            Action::Insert => self.inserts -= 1,
            Action::Remove => self.removes -= 1,
            Action::Keep => {}
        }
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    /// Steps currently in the window, `min(n, window_size)`.
    pub fn len(&self) -> usize {
        self.recent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recent.is_empty()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn model_size(&self) -> usize {
        self.model_size
    }

    fn fraction(&self, count: usize) -> f64 {
        if self.recent.is_empty() {
            0.0
        } else {
            count as f64 / self.recent.len() as f64
        }
    }

    pub fn hit_rate(&self) -> f64 {
        self.fraction(self.hits)
    }

    pub fn miss_fraction(&self) -> f64 {
        self.fraction(self.recent.len() - self.hits)
    }

    pub fn remove_fraction(&self) -> f64 {
        self.fraction(self.removes)
    }

    /// `(inserts - removes) / len` over the window.
    pub fn mean_size_delta(&self) -> f64 {
        if self.recent.is_empty() {
            0.0
        } else {
            (self.inserts as f64 - self.removes as f64) / self.recent.len() as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_misses() {
        let mut s = WindowStats::new(10);
        for _ in 0..25 {
            s.push(false, Action::Insert);
        }
        assert_eq!(s.len(), 10);
        assert_eq!(s.hit_rate(), 0.0);
        assert_eq!(s.mean_size_delta(), 1.0);
    }

    #[test]
    fn all_hits_removing() {
        let mut s = WindowStats::new(10);
        for _ in 0..25 {
            s.push(true, Action::Remove);
        }
        assert_eq!(s.hit_rate(), 1.0);
        assert_eq!(s.mean_size_delta(), -1.0);
    }

    #[test]
    fn only_last_window_counts() {
        let mut s = WindowStats::new(4);
        for a in [Action::Insert, Action::Insert, Action::Insert, Action::Keep, Action::Remove, Action::Keep, Action::Insert] {
            s.push(a != Action::Insert, a);
        }
        // Window: Keep, Remove, Keep, Insert.
        assert_eq!(s.hit_rate(), 0.75);
        assert_eq!(s.mean_size_delta(), 0.0);
        assert_eq!(s.steps(), 7);
    }

    #[test]
    fn partial_window() {
        let mut s = WindowStats::new(100);
        s.push(false, Action::Insert);
        s.push(true, Action::Keep);
        assert_eq!(s.len(), 2);
        assert_eq!(s.hit_rate(), 0.5);
        assert_eq!(s.mean_size_delta(), 0.5);
        assert_eq!(WindowStats::new(3).mean_size_delta(), 0.0);
    }
}
