//! Small numeric helpers shared across modules.

/// Neumaier-compensated accumulator. Keeps long mean/series sums accurate to
/// a couple of ulps regardless of term ordering or magnitude spread.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_cancellation() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn matches_naive_sum_on_benign_input() {
        let mut s = CompensatedSum::new();
        let mut naive = 0.0;
        for k in 1..=1000 {
            let v = 1.0 / k as f64;
            s.add(v);
            naive += v;
        }
        assert!((s.value() - naive).abs() < 1e-12);
    }
}
