use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// AdaMax optimizer state: Adam with an infinity-norm second moment.
///
/// ```text
/// t <- t + 1
/// m <- b1*m + (1 - b1)*g
/// u <- max(b2*u, |g|)
/// p <- p - (lr / (1 - b1^t)) * m / u
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaMaxState<T> {
    pub m: Vec<T>,
    pub u: Vec<T>,
    pub t: u64,
    pub learning_rate: T,
    pub beta1: T,
    pub beta2: T,
}

/// Floor on `u` in the update denominator.
const U_FLOOR: f64 = 1e-30;

impl<T: Real> AdaMaxState<T> {
    pub fn new(n_params: usize, learning_rate: T) -> Self {
        Self::with_betas(n_params, learning_rate, T::lit(0.9), T::lit(0.999))
    }

    pub fn with_betas(n_params: usize, learning_rate: T, beta1: T, beta2: T) -> Self {
        Self { m: vec![T::zero(); n_params], u: vec![T::zero(); n_params], t: 0, learning_rate, beta1, beta2 }
    }

    pub fn step(&mut self, params: &mut [T], grads: &[T]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                context: "optimizer step",
                expected: self.m.len(),
                found: if params.len() != self.m.len() { params.len() } else { grads.len() },
            });
        }
        self.t += 1;
        let t = i32::try_from(self.t).unwrap_or(i32::MAX);
        let rate = self.learning_rate / (T::one() - self.beta1.powi(t));
        let floor = T::lit(U_FLOOR);
        let (b1, b2) = (self.beta1, self.beta2);
        for (((p, g), m), u) in params.iter_mut().zip(grads).zip(self.m.iter_mut()).zip(self.u.iter_mut()) {
            *m = b1 * *m + (T::one() - b1) * *g;
            *u = (b2 * *u).max(g.abs());
            *p = *p - rate * *m / u.max(floor);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_by_hand() {
        let mut s = AdaMaxState::new(1, 1e-5);
        let mut p = [0.0f64];
        s.step(&mut p, &[0.5]).unwrap();
        assert!((s.m[0] - 0.05).abs() < 1e-15);
        assert_eq!(s.u[0], 0.5);
        assert!((p[0] + 1e-5).abs() < 1e-10);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut s = AdaMaxState::new(3, 1e-3);
        let mut p = [1.0f64, -2.0, 0.5];
        s.step(&mut p, &[0.0; 3]).unwrap();
        assert_eq!(p, [1.0, -2.0, 0.5]);
    }

    #[test]
    fn first_step_is_gradient_scale_free() {
        for c in [1e-6, 0.3, 7.0, 1e4] {
            let mut s = AdaMaxState::new(2, 1e-5);
            let mut p = [0.0f64, 0.0];
            s.step(&mut p, &[0.5 * c, -2.0 * c]).unwrap();
            assert!((p[0] + 1e-5).abs() < 1e-15);
            assert!((p[1] - 1e-5).abs() < 1e-15);
        }
    }

    #[test]
    fn second_step_by_hand() {
        let mut s = AdaMaxState::new(1, 0.01);
        let mut p = [1.0f64];
        s.step(&mut p, &[0.5]).unwrap();
        s.step(&mut p, &[-0.2]).unwrap();
        // m = 0.9*0.05 - 0.02 = 0.025; u = max(0.4995, 0.2); rate = 0.01/0.19
        let expect = 1.0 - 0.01 - (0.01 / 0.19) * (0.025 / 0.4995);
        assert!((p[0] - expect).abs() < 1e-14);
    }

    #[test]
    fn shape_mismatch() {
        let mut s = AdaMaxState::<f32>::new(2, 1e-3);
        assert!(s.step(&mut [0.0; 3], &[0.0; 3]).is_err());
        assert!(s.step(&mut [0.0; 2], &[0.0; 1]).is_err());
    }
}
