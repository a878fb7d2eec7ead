use alloc::vec::Vec;

use crate::{Error, Result};

/// Realizable input signals.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal {
    Constant(f64),
    /// `values[0]` on `[0, breakpoints[0])`, `values[k]` on
    /// `[breakpoints[k-1], breakpoints[k])`, the last value afterwards.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// Linear interpolation through `(times[k], values[k])`, held constant
    /// outside the sample range.
    Sampled {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl InputSignal {
    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let s = InputSignal::PiecewiseConstant { breakpoints, values };
        s.validate()?;
        Ok(s)
    }

    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let s = InputSignal::Sampled { times, values };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            InputSignal::Constant(v) => v.is_finite(),
            InputSignal::PiecewiseConstant { breakpoints, values } => {
                values.len() == breakpoints.len() + 1
                    && strictly_increasing(breakpoints)
                    && breakpoints.iter().chain(values).all(|v| v.is_finite())
            }
            InputSignal::Sampled { times, values } => {
                !times.is_empty()
                    && times.len() == values.len()
                    && strictly_increasing(times)
                    && times.iter().chain(values).all(|v| v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("malformed input signal".into()))
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            InputSignal::Constant(v) => *v,
            InputSignal::PiecewiseConstant { breakpoints, values } => values[breakpoints.partition_point(|b| *b <= t)],
            InputSignal::Sampled { times, values } => {
                let k = times.partition_point(|s| *s <= t);
                if k == 0 {
                    values[0]
                } else if k == times.len() {
                    values[k - 1]
                } else {
                    let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
                    values[k - 1] + w * (values[k] - values[k - 1])
                }
            }
        }
    }

    /// Times where the signal (or its slope) jumps; the integrator restarts
    /// there.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            InputSignal::Constant(_) => &[],
            InputSignal::PiecewiseConstant { breakpoints, .. } => breakpoints,
            InputSignal::Sampled { times, .. } => times,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn values() {
        let p = InputSignal::piecewise_constant(vec![1.0, 2.0], vec![0.0, 5.0, -1.0]).unwrap();
        assert_eq!(p.value(0.5), 0.0);
        assert_eq!(p.value(1.0), 5.0);
        assert_eq!(p.value(7.0), -1.0);
        let s = InputSignal::sampled(vec![0.0, 2.0], vec![1.0, 3.0]).unwrap();
        assert_eq!(s.value(1.0), 2.0);
        assert_eq!(s.value(5.0), 3.0);
        assert!(InputSignal::piecewise_constant(vec![2.0, 1.0], vec![0.0; 3]).is_err());
        assert!(InputSignal::sampled(vec![0.0], vec![]).is_err());
    }
}
