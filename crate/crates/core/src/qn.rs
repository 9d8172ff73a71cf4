//! Cautious BFGS model of the Jacobian.
//!
//! The update is applied only when `yᵀs / ‖s‖² ≥ h·μᵏʳ`; since the threshold
//! is positive, every applied update has `yᵀs > 0` and keeps `B` positive
//! definite.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QnError {
    #[error("step has zero length")]
    ZeroStep,
    #[error("degenerate curvature: sᵀBs = {sbs:e}")]
    DegenerateCurvature { sbs: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateOutcome {
    Updated,
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QnState {
    b: DMatrix<f64>,
    update_count: usize,
    skip_count: usize,
}

impl QnState {
    /// `B₀ = I`.
    pub fn identity(n: usize) -> Self {
        Self::from_matrix(DMatrix::identity(n, n))
    }

    pub fn from_matrix(b: DMatrix<f64>) -> Self {
        Self {
            b,
            update_count: 0,
            skip_count: 0,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn update_count(&self) -> usize {
        self.update_count
    }

    pub fn skip_count(&self) -> usize {
        self.skip_count
    }

    /// Applies `B⁺ = B − BssᵀB/(sᵀBs) + yyᵀ/(yᵀs)` when the cautious test
    /// passes, otherwise leaves `B` untouched and counts a skip.
    ///
    /// `DegenerateCurvature` also counts as a skip; `B` is unchanged.
    pub fn cautious_bfgs_update(
        &mut self,
        s: &DVector<f64>,
        y: &DVector<f64>,
        h: f64,
        mu: f64,
        r_exp: f64,
    ) -> Result<UpdateOutcome, QnError> {
        let ss = s.norm_squared();
        if ss == 0.0 {
            self.skip_count += 1;
            return Err(QnError::ZeroStep);
        }
        let ys = y.dot(s);
        if ys / ss < h * mu.powf(r_exp) {
            self.skip_count += 1;
            return Ok(UpdateOutcome::Skipped);
        }
        let bs = &self.b * s;
        let sbs = s.dot(&bs);
        if sbs <= 1e-14 * ss {
            self.skip_count += 1;
            return Err(QnError::DegenerateCurvature { sbs });
        }
        self.b.ger(-1.0 / sbs, &bs, &bs, 1.0);
        self.b.ger(1.0 / ys, y, y, 1.0);
        let sym = (&self.b + self.b.transpose()) * 0.5;
        self.b = sym;
        self.update_count += 1;
        Ok(UpdateOutcome::Updated)
    }

    /// Self-scaling variant of [`QnState::cautious_bfgs_update`]. When the
    /// cautious test passes, `B` is first replaced by `(yᵀy/yᵀs)·I` if no
    /// update has been applied yet, and otherwise multiplied by
    /// `min(1, yᵀs/sᵀBs)`; the BFGS update then follows.
    ///
    /// `yᵀy/yᵀs` is a Rayleigh quotient of the averaged Jacobian at the top
    /// of its spectrum. Starting high and shrinking is deliberate: a model
    /// that underestimates the Jacobian overshoots along directions it has
    /// not seen yet.
    pub fn scaled_cautious_update(
        &mut self,
        s: &DVector<f64>,
        y: &DVector<f64>,
        h: f64,
        mu: f64,
        r_exp: f64,
    ) -> Result<UpdateOutcome, QnError> {
        let ss = s.norm_squared();
        let ys = y.dot(s);
        if ss > 0.0 && ys / ss >= h * mu.powf(r_exp) {
            if self.update_count == 0 {
                let n = self.b.nrows();
                self.b = DMatrix::identity(n, n) * (y.norm_squared() / ys);
            } else {
                let sbs = s.dot(&(&self.b * s));
                if sbs > ys {
                    self.b *= ys / sbs;
                }
            }
        }
        self.cautious_bfgs_update(s, y, h, mu, r_exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn hand_computed_update() {
        // B = I, s = e₁, y = 2e₁: B − e₁e₁ᵀ + 4e₁e₁ᵀ/2 = diag(2, 1).
        let mut q = QnState::identity(2);
        let out = q.cautious_bfgs_update(&v(&[1.0, 0.0]), &v(&[2.0, 0.0]), 1e-5, 0.1, 1.0).unwrap();
        assert_eq!(out, UpdateOutcome::Updated);
        assert_eq!(q.matrix(), &DMatrix::from_diagonal(&v(&[2.0, 1.0])));
        assert_eq!(q.update_count(), 1);
    }

    #[test]
    fn skip_just_below_threshold() {
        let (h, mu, r) = (1e-5, 0.1, 1.0);
        let threshold = h * f64::powf(mu, r);
        let mut q = QnState::identity(2);
        let before = q.matrix().clone();
        let s = v(&[1.0, 0.0]);
        let y = v(&[threshold - 1e-12, 5.0]);
        assert_eq!(q.cautious_bfgs_update(&s, &y, h, mu, r).unwrap(), UpdateOutcome::Skipped);
        assert_eq!(q.skip_count(), 1);
        assert_eq!(q.matrix(), &before);
    }

    #[test]
    fn identity_is_fixed_point_when_s_equals_y() {
        let mut q = QnState::identity(3);
        let s = v(&[0.3, -1.0, 2.0]);
        q.cautious_bfgs_update(&s, &s, 1e-5, 0.1, 1.0).unwrap();
        assert!((q.matrix() - DMatrix::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn degenerate_curvature_leaves_b() {
        let mut q = QnState::from_matrix(DMatrix::from_diagonal(&v(&[0.0, 1.0])));
        let err = q.cautious_bfgs_update(&v(&[1.0, 0.0]), &v(&[1.0, 0.0]), 1e-5, 0.1, 1.0).unwrap_err();
        assert!(matches!(err, QnError::DegenerateCurvature { .. }));
        assert_eq!(q.matrix(), &DMatrix::from_diagonal(&v(&[0.0, 1.0])));
        assert_eq!(q.skip_count(), 1);
    }

    #[test]
    fn scaled_update_hand_values() {
        // First update: B₀ ← (yᵀy/yᵀs)·I = 3I, which already satisfies Bs = y.
        let mut q = QnState::identity(2);
        q.scaled_cautious_update(&v(&[1.0, 0.0]), &v(&[3.0, 0.0]), 1e-5, 0.1, 1.0).unwrap();
        assert!((q.matrix() - DMatrix::identity(2, 2) * 3.0).amax() < 1e-15);
        // Then sᵀBs = 3 > yᵀs = 1 shrinks B to I, and s = y keeps it there.
        q.scaled_cautious_update(&v(&[0.0, 1.0]), &v(&[0.0, 1.0]), 1e-5, 0.1, 1.0).unwrap();
        assert!((q.matrix() - DMatrix::identity(2, 2)).amax() < 1e-15);
        assert_eq!(q.update_count(), 2);
    }

    #[test]
    fn first_scale_is_top_rayleigh_quotient() {
        // y = diag(1, 4) s with s = (1, 1): yᵀy/yᵀs = 17/5, then BFGS.
        let mut q = QnState::identity(2);
        let (s, y) = (v(&[1.0, 1.0]), v(&[1.0, 4.0]));
        q.scaled_cautious_update(&s, &y, 1e-5, 0.1, 1.0).unwrap();
        let b0 = DMatrix::identity(2, 2) * (17.0 / 5.0);
        let bs = &b0 * &s;
        let expected = &b0 - &bs * bs.transpose() / s.dot(&bs) + &y * y.transpose() / y.dot(&s);
        assert!((q.matrix() - expected).amax() < 1e-14);
    }

    #[test]
    fn scaled_update_skips_without_rescaling() {
        let mut q = QnState::identity(2);
        let out = q.scaled_cautious_update(&v(&[1.0, 0.0]), &v(&[-1.0, 0.0]), 1e-5, 0.1, 1.0).unwrap();
        assert_eq!(out, UpdateOutcome::Skipped);
        assert_eq!(q.matrix(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn zero_step_is_rejected() {
        let mut q = QnState::identity(2);
        assert_eq!(q.cautious_bfgs_update(&v(&[0.0, 0.0]), &v(&[1.0, 0.0]), 1e-5, 0.1, 1.0), Err(QnError::ZeroStep));
    }
}
