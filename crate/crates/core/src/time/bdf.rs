//! Backward differentiation and extrapolation coefficients, and the state
//! history they act on.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// `[a_0, a_1, ..., a_s]` with `D_t^s u^m = (Σ_j a_j u^{m-j}) / δt`.
pub fn bdf_coefficients(s: usize) -> Result<&'static [f64]> {
    match s {
        1 => Ok(&[1.0, -1.0]),
        2 => Ok(&[1.5, -2.0, 0.5]),
        3 => Ok(&[11.0 / 6.0, -3.0, 1.5, -1.0 / 3.0]),
        _ => Err(Error::Parameter(format!("BDF order must be 1, 2 or 3, got {s}"))),
    }
}

/// `[b_1, ..., b_s]` with `ũ^{m,s} = Σ_j b_j u^{m-j}`.
pub fn sbdf_coefficients(s: usize) -> Result<&'static [f64]> {
    match s {
        1 => Ok(&[1.0]),
        2 => Ok(&[2.0, -1.0]),
        3 => Ok(&[3.0, -3.0, 1.0]),
        _ => Err(Error::Parameter(format!("extrapolation order must be 1, 2 or 3, got {s}"))),
    }
}

/// Ring buffer of past coefficient vectors, newest first. The vectors are
/// reused verbatim on whatever mesh configuration is current.
#[derive(Clone, Debug)]
pub struct History {
    states: VecDeque<Vec<f64>>,
    capacity: usize,
    pub dt: f64,
    /// Index of the newest stored level.
    pub m: usize,
}

impl History {
    pub fn new(dt: f64, capacity: usize) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
        }
        Ok(History {
            states: VecDeque::with_capacity(capacity),
            capacity: capacity.max(1),
            dt,
            m: 0,
        })
    }

    /// Appends level `m + 1` (or level 0 for the first push).
    pub fn push(&mut self, u: Vec<f64>) {
        if !self.states.is_empty() {
            self.m += 1;
        }
        if self.states.len() == self.capacity {
            self.states.pop_back();
        }
        self.states.push_front(u);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `u^{m-j}` relative to the level being computed (`j = 1` is the newest).
    pub fn back(&self, j: usize) -> Option<&[f64]> {
        self.states.get(j - 1).map(|v| v.as_slice())
    }

    pub fn newest(&self) -> Option<&[f64]> {
        self.back(1)
    }

    fn require(&self, s: usize) -> Result<()> {
        if self.states.len() < s {
            return Err(Error::Startup {
                needed: s,
                available: self.states.len(),
            });
        }
        Ok(())
    }

    /// `a_0 / δt`, the coefficient of the unknown level.
    pub fn leading(&self, s: usize) -> Result<f64> {
        Ok(bdf_coefficients(s)?[0] / self.dt)
    }

    /// `(a_j / δt, u^{m-j})` for `j = 1..=s`.
    pub fn history_terms(&self, s: usize) -> Result<Vec<(f64, &[f64])>> {
        let a = bdf_coefficients(s)?;
        self.require(s)?;
        Ok((1..=s).map(|j| (a[j] / self.dt, self.back(j).unwrap())).collect())
    }

    /// `D_t^s u^m` for a given new level `u^m`.
    pub fn bdf_apply(&self, u_m: &[f64], s: usize) -> Result<Vec<f64>> {
        let lead = self.leading(s)?;
        let mut out: Vec<f64> = u_m.iter().map(|v| lead * v).collect();
        for (c, u) in self.history_terms(s)? {
            for (o, v) in out.iter_mut().zip(u) {
                *o += c * v;
            }
        }
        Ok(out)
    }

    /// SBDF extrapolation `ũ^{m,s}`.
    pub fn extrapolate(&self, s: usize) -> Result<Vec<f64>> {
        let b = sbdf_coefficients(s)?;
        self.require(s)?;
        let mut out = vec![0.0; self.states[0].len()];
        for (j, bj) in b.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(&self.states[j]) {
                *o += bj * v;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sampled(f: impl Fn(f64) -> f64, dt: f64, levels: usize) -> History {
        let mut h = History::new(dt, 3).unwrap();
        for i in 0..levels {
            h.push(vec![f(i as f64 * dt)]);
        }
        h
    }

    #[test]
    fn coefficients_are_exact() {
        assert_eq!(bdf_coefficients(2).unwrap(), &[1.5, -2.0, 0.5]);
        assert_eq!(sbdf_coefficients(3).unwrap(), &[3.0, -3.0, 1.0]);
        assert!(bdf_coefficients(4).is_err());
    }

    #[test]
    fn constant_history_has_zero_derivative() {
        let h = sampled(|_| 2.5, 0.1, 3);
        for s in 1..=3 {
            assert!(h.bdf_apply(&[2.5], s).unwrap()[0].abs() < 1e-12);
            assert!((h.extrapolate(s).unwrap()[0] - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_samples_differentiate_exactly() {
        let dt = 0.125;
        let h = sampled(|t| t, dt, 3);
        let tm = 3.0 * dt;
        for s in 1..=3 {
            assert!((h.bdf_apply(&[tm], s).unwrap()[0] - 1.0).abs() < 1e-12);
        }
        assert!((h.extrapolate(2).unwrap()[0] - tm).abs() < 1e-14);
    }

    #[test]
    fn cubic_samples() {
        let dt = 0.05;
        let f = |t: f64| t * t * t;
        let h = sampled(f, dt, 3);
        let tm = 3.0 * dt;
        // BDF3 is exact on cubics
        assert!((h.bdf_apply(&[f(tm)], 3).unwrap()[0] - 3.0 * tm * tm).abs() < 1e-12);
        // BDF2 error is O(δt²): halving δt quarters it
        let err = |dt: f64| {
            let h = sampled(f, dt, 3);
            let tm = 3.0 * dt;
            (h.bdf_apply(&[f(tm)], 2).unwrap()[0] - 3.0 * tm * tm).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
    }

    #[test]
    fn quadratic_extrapolation_is_exact_at_order_three() {
        let dt = 0.2;
        let f = |t: f64| 1.0 - 2.0 * t + 3.0 * t * t;
        let h = sampled(f, dt, 3);
        assert!((h.extrapolate(3).unwrap()[0] - f(3.0 * dt)).abs() < 1e-12);
    }

    #[test]
    fn insufficient_history_is_a_startup_error() {
        let h = sampled(|t| t, 0.1, 1);
        match h.extrapolate(2) {
            Err(Error::Startup { needed: 2, available: 1 }) => {}
            other => panic!("{other:?}"),
        }
        assert!(h.history_terms(3).is_err());
        assert!(History::new(0.0, 2).is_err());
    }

    proptest! {
        #[test]
        fn polynomial_exactness(c0 in -2.0f64..2.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, dt in 0.01f64..0.5) {
            let f = |t: f64| c0 + c1 * t + c2 * t * t;
            let h = sampled(f, dt, 3);
            let tm = 3.0 * dt;
            let d = h.bdf_apply(&[f(tm)], 3).unwrap()[0];
            prop_assert!((d - (c1 + 2.0 * c2 * tm)).abs() < 1e-9);
            let d2 = h.bdf_apply(&[f(tm)], 2).unwrap()[0];
            prop_assert!((d2 - (c1 + 2.0 * c2 * tm)).abs() < 1e-9);
        }
    }
}
