//! Scaling-law reference columns anchored to a simulated point.

use cellcap_core::stats::linear_fit;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceKind {
    /// y0·(λ/λ0)^{−α/2}.
    Poly { pathloss_exp: f64 },
    /// y0·exp(s(λ − λ0)).
    Exp { slope: f64 },
}

impl ReferenceKind {
    pub fn column(&self) -> &'static str {
        match self {
            ReferenceKind::Poly { .. } => "ref_poly",
            ReferenceKind::Exp { .. } => "ref_exp",
        }
    }
}

/// Reference curve over `grid` passing through `anchor`, which must be a
/// grid point.
pub fn emit_reference_curve(kind: ReferenceKind, grid: &[f64], anchor: (f64, f64)) -> Result<Vec<f64>, CliError> {
    let (l0, y0) = anchor;
    if !grid.iter().any(|&g| (g - l0).abs() <= 1e-12 * l0.abs().max(1.0)) {
        return Err(CliError::Core(cellcap_core::Error::Request(format!(
            "anchor density {l0} is not on the grid"
        ))));
    }
    Ok(grid
        .iter()
        .map(|&lam| {
            if lam == l0 {
                return y0;
            }
            match kind {
                ReferenceKind::Poly { pathloss_exp } => y0 * (lam / l0).powf(-pathloss_exp / 2.0),
                ReferenceKind::Exp { slope } => y0 * (slope * (lam - l0)).exp(),
            }
        })
        .collect())
}

/// Slope of log(values) against the grid.
pub fn fit_exp_slope(grid: &[f64], values: &[f64]) -> f64 {
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    linear_fit(grid, &logs).slope
}

#[cfg(test)]
mod tests {
    use super::*;
    use cellcap_core::bounds::{lb_highdensity, BoundParams};
    use cellcap_core::geometry::NetworkConfig;

    #[test]
    fn poly_curve() {
        let grid = [0.01, 0.02, 0.04];
        let c = emit_reference_curve(ReferenceKind::Poly { pathloss_exp: 3.0 }, &grid, (0.01, 1000.0)).unwrap();
        assert_eq!(c[0], 1000.0);
        assert!((c[2] - 125.0).abs() < 1e-9);
    }

    #[test]
    fn passes_through_anchor() {
        let grid = [1.0, 2.0, 3.0];
        let c = emit_reference_curve(ReferenceKind::Exp { slope: 0.7 }, &grid, (2.0, 5.5)).unwrap();
        assert_eq!(c[1], 5.5);
        assert!((c[2] / c[1] - 0.7f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn anchor_off_grid() {
        let e = emit_reference_curve(ReferenceKind::Exp { slope: 1.0 }, &[1.0, 2.0], (1.5, 1.0)).unwrap_err();
        assert!(matches!(e, CliError::Core(cellcap_core::Error::Request(_))));
    }

    #[test]
    fn exp_slope_matches_bound() {
        let p = BoundParams::from_config(&NetworkConfig::new(1.0), 0.5, 0.5);
        let grid: Vec<f64> = (8..=16).map(|v| v as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&l| lb_highdensity(&p.with_density(l)).unwrap()).collect();
        let s = fit_exp_slope(&grid, &vals);
        let target = std::f64::consts::PI * p.c2();
        assert!((s - target).abs() / target < 1e-6);
        let curve = emit_reference_curve(ReferenceKind::Exp { slope: s }, &grid, (8.0, vals[0])).unwrap();
        for (c, v) in curve.iter().zip(&vals) {
            assert!((c / v - 1.0).abs() < 1e-6);
        }
    }
}
