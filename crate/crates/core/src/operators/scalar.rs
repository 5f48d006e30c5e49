use crate::error::{Error, Result};

/// Continuous piecewise-linear `f: ℝ → ℝ`.
///
/// `slopes[i]` applies on the `i`-th interval cut out by the sorted `knots`
/// (so there is one more slope than knots). `f(0) = value_at_zero`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    slopes: Vec<f64>,
    value_at_zero: f64,
    // Antiderivative of the slope function at each knot, zero at knots[0].
    cumulative: Vec<f64>,
    // f(x) = shift + cumulative_at(x)
    shift: f64,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, slopes: Vec<f64>, value_at_zero: f64) -> Result<Self> {
        if slopes.len() != knots.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "need {} slopes for {} knots, got {}",
                knots.len() + 1,
                knots.len(),
                slopes.len()
            )));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) || knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidArgument("knots must be finite and strictly increasing".into()));
        }
        if let Some(s) = slopes.iter().find(|s| !(-1.0..=1.0).contains(*s)) {
            return Err(Error::InvalidArgument(format!("slope {s} outside [-1, 1]")));
        }
        if !value_at_zero.is_finite() {
            return Err(Error::InvalidArgument("value_at_zero must be finite".into()));
        }
        let mut cumulative = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        for (i, k) in knots.iter().enumerate() {
            if i > 0 {
                acc += slopes[i] * (k - knots[i - 1]);
            }
            cumulative.push(acc);
        }
        let mut f = PiecewiseLinear {
            knots,
            slopes,
            value_at_zero,
            cumulative,
            shift: 0.0,
        };
        f.shift = value_at_zero - f.antiderivative(0.0);
        Ok(f)
    }

    fn antiderivative(&self, x: f64) -> f64 {
        if self.knots.is_empty() {
            return self.slopes[0] * x;
        }
        let i = self.knots.partition_point(|k| *k <= x);
        if i == 0 {
            self.slopes[0] * (x - self.knots[0])
        } else {
            self.cumulative[i - 1] + self.slopes[i] * (x - self.knots[i - 1])
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.shift + self.antiderivative(x)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    pub fn min_slope(&self) -> f64 {
        self.slopes.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
