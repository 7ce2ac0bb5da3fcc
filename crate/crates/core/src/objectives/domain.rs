use crate::error::{invalid, Result};

/// Bounded convex parameter space. The base measure of the sampling
/// mechanisms is the uniform measure on this set.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleDomain {
    /// `{ θ ∈ ℝ^dim : ‖θ‖₁ ≤ radius }`
    L1Ball { dim: usize, radius: f64 },
    /// Axis-aligned box `lo ≤ θ ≤ hi`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// One-dimensional interval `[lo, hi]`.
    Interval { lo: f64, hi: f64 },
}

impl FeasibleDomain {
    pub fn l1_ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("domain dimension must be at least 1"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("l1 ball radius must be positive and finite, got {radius}")));
        }
        Ok(Self::L1Ball { dim, radius })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(invalid("box bounds must be nonempty and of equal length"));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(invalid(format!("invalid box side [{l}, {h}]")));
            }
        }
        Ok(Self::Box { lo, hi })
    }

    /// The symmetric box `[-half_width, half_width]^dim`.
    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        Self::boxed(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self::Interval { lo, hi })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::L1Ball { dim, .. } => *dim,
            Self::Box { lo, .. } => lo.len(),
            Self::Interval { .. } => 1,
        }
    }

    /// Exact membership test.
    pub fn contains(&self, theta: &[f64]) -> bool {
        if theta.len() != self.dim() {
            return false;
        }
        match self {
            Self::L1Ball { radius, .. } => theta.iter().map(|t| t.abs()).sum::<f64>() <= *radius,
            Self::Box { lo, hi } => theta.iter().zip(lo.iter().zip(hi)).all(|(t, (l, h))| *l <= *t && *t <= *h),
            Self::Interval { lo, hi } => *lo <= theta[0] && theta[0] <= *hi,
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            Self::L1Ball { dim, .. } => vec![0.0; *dim],
            Self::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
            Self::Interval { lo, hi } => vec![0.5 * (lo + hi)],
        }
    }

    /// Length of the domain's projection onto coordinate `j`.
    pub fn coordinate_extent(&self, j: usize) -> f64 {
        match self {
            Self::L1Ball { radius, .. } => 2.0 * radius,
            Self::Box { lo, hi } => hi[j] - lo[j],
            Self::Interval { lo, hi } => hi - lo,
        }
    }

    /// `sup { ‖θ‖₁ : θ ∈ domain }`
    pub fn max_l1_norm(&self) -> f64 {
        match self {
            Self::L1Ball { radius, .. } => *radius,
            Self::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| l.abs().max(h.abs())).sum(),
            Self::Interval { lo, hi } => lo.abs().max(hi.abs()),
        }
    }

    /// `sup { ‖θ‖₂ : θ ∈ domain }`
    pub fn max_l2_norm(&self) -> f64 {
        match self {
            Self::L1Ball { radius, .. } => *radius,
            Self::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| l.abs().max(h.abs()).powi(2)).sum::<f64>().sqrt(),
            Self::Interval { lo, hi } => lo.abs().max(hi.abs()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_is_exact_on_the_boundary() {
        let ball = FeasibleDomain::l1_ball(2, 1.0).unwrap();
        assert!(ball.contains(&[0.5, -0.5]));
        assert!(!ball.contains(&[0.5, 0.5000001]));
        assert!(!ball.contains(&[0.1]));

        let b = FeasibleDomain::boxed(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!(b.contains(&[1.0, 2.0]));
        assert!(!b.contains(&[1.0, 2.1]));
        assert_eq!(b.center(), vec![0.0, 1.0]);
        assert_eq!(b.max_l1_norm(), 3.0);

        let iv = FeasibleDomain::interval(-2.0, 1.0).unwrap();
        assert!(iv.contains(&[-2.0]));
        assert_eq!(iv.center(), vec![-0.5]);
        assert_eq!(iv.coordinate_extent(0), 3.0);
    }

    #[test]
    fn rejects_degenerate_domains() {
        assert!(FeasibleDomain::l1_ball(2, 0.0).is_err());
        assert!(FeasibleDomain::l1_ball(0, 1.0).is_err());
        assert!(FeasibleDomain::interval(1.0, 1.0).is_err());
        assert!(FeasibleDomain::boxed(vec![0.0], vec![0.0, 1.0]).is_err());
        assert!(FeasibleDomain::boxed(vec![], vec![]).is_err());
    }
}
