//! Engine self-checks shared by the verification suites.

use crate::error::Result;
use crate::jet::{seed_point, FD_GRAD_STEP, FD_HESS_STEP};
use crate::tensor::{curvature, MatrixProgram, MetricField};

/// Largest disagreement between jet derivatives of every entry of a matrix field and central
/// differences, scaled by `max(1, |entry derivative|)`.
pub fn jet_fd_residual(prog: &dyn MatrixProgram, p: &[f64; 4]) -> Result<f64> {
    let jets = prog.at_jet(&seed_point(*p))?;
    let at = |moves: &[(usize, f64)]| -> Result<[[f64; 4]; 4]> {
        let mut x = *p;
        for &(a, h) in moves {
            x[a] += h;
        }
        prog.at_f64(&x)
    };
    let rel = |fd: f64, jet: f64| (fd - jet).abs() / jet.abs().max(1.0);
    let (hg, hh) = (FD_GRAD_STEP, FD_HESS_STEP);
    let f0 = at(&[])?;
    let mut worst = 0.0_f64;
    for a in 0..4 {
        let (gp, gm) = (at(&[(a, hg)])?, at(&[(a, -hg)])?);
        let (hp, hm) = (at(&[(a, hh)])?, at(&[(a, -hh)])?);
        for i in 0..4 {
            for j in 0..4 {
                let jt = &jets[i][j];
                worst = worst.max((f0[i][j] - jt.value).abs());
                worst = worst.max(rel((gp[i][j] - gm[i][j]) / (2.0 * hg), jt.grad[a]));
                worst = worst.max(rel((hp[i][j] - 2.0 * f0[i][j] + hm[i][j]) / (hh * hh), jt.hess[a][a]));
            }
        }
        for b in (a + 1)..4 {
            let pp = at(&[(a, hh), (b, hh)])?;
            let pm = at(&[(a, hh), (b, -hh)])?;
            let mp = at(&[(a, -hh), (b, hh)])?;
            let mm = at(&[(a, -hh), (b, -hh)])?;
            for i in 0..4 {
                for j in 0..4 {
                    let fd = (pp[i][j] - pm[i][j] - mp[i][j] + mm[i][j]) / (4.0 * hh * hh);
                    worst = worst.max(rel(fd, jets[i][j].hess[a][b]));
                }
            }
        }
    }
    Ok(worst)
}

/// Curvature-engine residuals at a set of points.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct EngineResiduals {
    /// jet vs central differences on the metric entries
    pub jet_fd: f64,
    /// Riemann pair symmetries and first Bianchi identity
    pub symmetries: f64,
    /// `|W⁺|² + |W⁻|² − |W|²`, zero for Lorentzian metrics where the split is not defined
    pub weyl_split: f64,
}

pub fn engine_residuals(g: &MetricField, points: &[[f64; 4]]) -> Result<EngineResiduals> {
    let mut r = EngineResiduals::default();
    let prog = g.program();
    for p in points {
        r.jet_fd = r.jet_fd.max(jet_fd_residual(prog.as_ref(), p)?);
        let c = curvature(g, p)?;
        r.symmetries = r.symmetries.max(c.symmetry_residual());
        if let (Some(a), Some(b)) = (c.weyl_plus_sq, c.weyl_minus_sq) {
            r.weyl_split = r.weyl_split.max((a + b - c.weyl_sq).abs());
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linespace;
    use crate::tensor::{flat_metric, ConstMatrix};

    #[test]
    fn flat_metric_has_zero_residuals() {
        let r = engine_residuals(&flat_metric("R4", [1.0; 4]), &[[0.1, 0.2, 0.3, 0.4]]).unwrap();
        assert_eq!(r, EngineResiduals::default());
    }

    #[test]
    fn line_space_metric_jets_match_differences() {
        let g = linespace::metric_g();
        let r = engine_residuals(&g, &[[0.3, -0.2, 0.5, 0.1], [-0.6, 0.1, -1.0, 0.7]]).unwrap();
        assert!(r.jet_fd < 1e-5 && r.symmetries < 1e-9 && r.weyl_split < 1e-8, "{r:?}");
    }

    #[test]
    fn constant_program_is_exact() {
        let m = [[2.0, 1.0, 0.0, 0.0], [1.0, 3.0, 0.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, 5.0]];
        assert_eq!(jet_fd_residual(&ConstMatrix(m), &[1.0, 2.0, 3.0, 4.0]).unwrap(), 0.0);
    }
}
