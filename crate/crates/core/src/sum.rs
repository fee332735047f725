//! Compensated (Kahan-Neumaier) summation for long log-domain sums.

/// Running sum with a correction term against catastrophic cancellation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    err: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.err += (self.sum - t) + value;
        } else {
            self.err += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.err
    }
}

/// Prefix sums of `values` with compensation; `result[k] = sum of values[..=k]`.
pub fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    values
        .iter()
        .map(|&v| {
            acc.add(v);
            acc.value()
        })
        .collect()
}
