//! Adam optimizer with bias correction, one state per parameter matrix.

use crate::numerics::dense::{Dense, DenseError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig<T> {
    pub learning_rate: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Scalar> AdamConfig<T> {
    pub fn with_learning_rate(learning_rate: T) -> Self {
        AdamConfig {
            learning_rate,
            beta1: T::from_f64_c(0.9),
            beta2: T::from_f64_c(0.999),
            epsilon: T::from_f64_c(1e-8),
        }
    }
}

/// Per-parameter optimizer state: first/second moments and step counter.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub config: AdamConfig<T>,
    m: Dense<T>,
    v: Dense<T>,
    t: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(rows: usize, cols: usize, config: AdamConfig<T>) -> Self {
        AdamState { config, m: Dense::zeros(rows, cols), v: Dense::zeros(rows, cols), t: 0 }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected Adam update; increments the step counter.
pub fn adam_step<T: Scalar>(
    param: &mut Dense<T>,
    grad: &Dense<T>,
    state: &mut AdamState<T>,
) -> Result<(), DenseError> {
    if param.rows() != grad.rows()
        || param.cols() != grad.cols()
        || param.rows() != state.m.rows()
        || param.cols() != state.m.cols()
    {
        return Err(DenseError::ShapeMismatch {
            context: "adam_step",
            left_rows: param.rows(),
            left_cols: param.cols(),
            right_rows: grad.rows(),
            right_cols: grad.cols(),
        });
    }
    state.t += 1;
    let c = state.config;
    let one = T::one();
    let b1t = c.beta1.powi(state.t as i32);
    let b2t = c.beta2.powi(state.t as i32);
    for i in 0..param.data().len() {
        let g = grad.data()[i];
        let m = c.beta1 * state.m.data()[i] + (one - c.beta1) * g;
        let v = c.beta2 * state.v.data()[i] + (one - c.beta2) * g * g;
        state.m.data_mut()[i] = m;
        state.v.data_mut()[i] = v;
        let m_hat = m / (one - b1t);
        let v_hat = v / (one - b2t);
        param.data_mut()[i] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step_matches_reference_formula() {
        // theta=0, g=1, lr=1e-3: m_hat=1, v_hat=1, delta = -lr/(1+eps)
        let mut p = Dense::<f64>::zeros(1, 1);
        let g = Dense::from_vec(1, 1, vec![1.0]).unwrap();
        let mut st = AdamState::new(1, 1, AdamConfig::with_learning_rate(1e-3));
        adam_step(&mut p, &g, &mut st).unwrap();
        let expected = -1e-3 / (1.0 + 1e-8);
        assert!((p.get(0, 0) - expected).abs() < 1e-15);
        assert_eq!(st.step_count(), 1);
    }

    #[test]
    fn zero_gradient_leaves_param_unchanged() {
        let mut p = Dense::from_vec(1, 2, vec![0.3, -0.7]).unwrap();
        let before = p.clone();
        let g = Dense::zeros(1, 2);
        let mut st = AdamState::new(1, 2, AdamConfig::with_learning_rate(1e-2));
        adam_step(&mut p, &g, &mut st).unwrap();
        assert_eq!(p, before);
    }

    #[test]
    fn constant_gradient_gives_equal_step_sizes() {
        // bias correction cancels a constant gradient, so |step2| ~ |step1|
        let mut p = Dense::<f64>::zeros(1, 1);
        let g = Dense::from_vec(1, 1, vec![0.5]).unwrap();
        let mut st = AdamState::new(1, 1, AdamConfig::with_learning_rate(1e-3));
        adam_step(&mut p, &g, &mut st).unwrap();
        let d1 = p.get(0, 0);
        adam_step(&mut p, &g, &mut st).unwrap();
        let d2 = p.get(0, 0) - d1;
        assert!((d1.abs() - d2.abs()).abs() < 1e-9, "d1={d1} d2={d2}");
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut p = Dense::<f64>::zeros(2, 2);
        let g = Dense::zeros(1, 2);
        let mut st = AdamState::new(2, 2, AdamConfig::with_learning_rate(1e-3));
        assert!(adam_step(&mut p, &g, &mut st).is_err());
    }
}
