//! Compensated floating-point accumulation.
//!
//! Long prime sums (up to ~6e6 terms at the default truncation) lose about
//! eight digits under naive f64 accumulation. Every real-valued sum in this
//! crate goes through [`KahanSum`] (Neumaier variant), which keeps the error
//! at a few ulps independent of length. Parallel reductions combine per-block
//! partials in a fixed block order, so results do not depend on thread count.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Fold another compensated partial into this one, preserving both
    /// compensation terms. Used for block-ordered parallel reduction.
    pub fn merge(&mut self, other: KahanSum) {
        self.add(other.sum);
        self.compensation += other.compensation;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}
