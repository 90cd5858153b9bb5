//! Central-difference gradient checker. Independent of every backward pass in
//! the crate: it only re-evaluates the loss closure at perturbed parameters.

use thiserror::Error;

use crate::numerics::dense::Dense;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum GradCheckError {
    #[error("loss is non-finite at perturbation of parameter {param} entry {entry}")]
    NonFiniteLoss { param: usize, entry: usize },
    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("parameter/gradient count mismatch: {params} params, {grads} gradients")]
    CountMismatch { params: usize, grads: usize },
}

/// Per-parameter result of a finite-difference sweep.
#[derive(Debug, Clone)]
pub struct GradCheckEntry {
    pub name: String,
    pub max_rel_error: f64,
    /// Largest absolute analytic gradient in the block, for context.
    pub max_abs_grad: f64,
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub entries: Vec<GradCheckEntry>,
}

impl GradCheckReport {
    pub fn max_rel_error(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc.max(e.max_rel_error))
    }
}

/// rel = |a - n| / max(1e-8, |a| + |n|)
fn rel_error<T: Scalar>(a: T, n: T) -> f64 {
    let a = a.to_f64().unwrap_or(f64::NAN);
    let n = n.to_f64().unwrap_or(f64::NAN);
    (a - n).abs() / (1e-8f64).max(a.abs() + n.abs())
}

/// Compares analytic gradients against central differences
/// (L(p+h) - L(p-h)) / 2h, sweeping every entry of every parameter.
///
/// `loss_fn` must be a deterministic scalar function of the full parameter
/// list; `analytic` holds one gradient matrix per parameter, same order.
pub fn finite_diff_check<T, F>(
    names: &[&str],
    params: &[Dense<T>],
    analytic: &[Dense<T>],
    h: f64,
    loss_fn: F,
) -> Result<GradCheckReport, GradCheckError>
where
    T: Scalar,
    F: Fn(&[Dense<T>]) -> T,
{
    if h <= 0.0 {
        return Err(GradCheckError::NonPositiveStep(h));
    }
    if params.len() != analytic.len() {
        return Err(GradCheckError::CountMismatch { params: params.len(), grads: analytic.len() });
    }
    let hp = T::from_f64_c(h);
    let two_h = T::from_f64_c(2.0 * h);
    let mut work: Vec<Dense<T>> = params.to_vec();
    let mut entries = Vec::with_capacity(params.len());
    for (pi, grad) in analytic.iter().enumerate() {
        let mut max_rel = 0.0f64;
        let mut max_abs = 0.0f64;
        for ei in 0..grad.data().len() {
            let orig = work[pi].data()[ei];
            work[pi].data_mut()[ei] = orig + hp;
            let up = loss_fn(&work);
            work[pi].data_mut()[ei] = orig - hp;
            let down = loss_fn(&work);
            work[pi].data_mut()[ei] = orig;
            if !up.is_finite() || !down.is_finite() {
                return Err(GradCheckError::NonFiniteLoss { param: pi, entry: ei });
            }
            let numeric = (up - down) / two_h;
            let a = grad.data()[ei];
            max_rel = max_rel.max(rel_error(a, numeric));
            max_abs = max_abs.max(a.to_f64().unwrap_or(0.0).abs());
        }
        let name = names.get(pi).copied().unwrap_or("param").to_string();
        entries.push(GradCheckEntry { name, max_rel_error: max_rel, max_abs_grad: max_abs });
    }
    Ok(GradCheckReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gradient_matches() {
        // L(x) = sum x^2, dL/dx = 2x; at x=3 the gradient is 6
        let p = Dense::from_vec(1, 1, vec![3.0]).unwrap();
        let g = Dense::from_vec(1, 1, vec![6.0]).unwrap();
        let report = finite_diff_check(&["x"], &[p], &[g], 1e-5, |ps: &[Dense<f64>]| {
            ps[0].data().iter().map(|v| v * v).sum()
        })
        .unwrap();
        assert!(report.max_rel_error() <= 1e-6, "rel={}", report.max_rel_error());
    }

    #[test]
    fn constant_loss_has_zero_gradient() {
        let p = Dense::from_vec(1, 2, vec![1.0, -2.0]).unwrap();
        let g = Dense::zeros(1, 2);
        let report =
            finite_diff_check(&["x"], &[p], &[g], 1e-5, |_: &[Dense<f64>]| 4.2).unwrap();
        assert!(report.max_rel_error() <= 1e-9);
    }

    #[test]
    fn wrong_gradient_is_flagged() {
        let p = Dense::from_vec(1, 1, vec![3.0]).unwrap();
        let g = Dense::from_vec(1, 1, vec![5.0]).unwrap(); // truth is 6
        let report = finite_diff_check(&["x"], &[p], &[g], 1e-5, |ps: &[Dense<f64>]| {
            ps[0].data().iter().map(|v| v * v).sum()
        })
        .unwrap();
        assert!(report.max_rel_error() > 1e-2);
    }

    #[test]
    fn non_finite_loss_rejected() {
        let p = Dense::from_vec(1, 1, vec![0.0]).unwrap();
        let g = Dense::zeros(1, 1);
        let err = finite_diff_check(&["x"], &[p], &[g], 1e-5, |ps: &[Dense<f64>]| {
            1.0 / ps[0].get(0, 0)
        });
        assert!(matches!(err, Err(GradCheckError::NonFiniteLoss { .. })));
    }
}
