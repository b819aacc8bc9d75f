//! Mode-by-mode action of an operator on sampled functions.
//!
//! Functions are stored as `u[(i, m, c)]`: radial sample `i`, cross-section
//! mode `m`, system component `c`. The radial variable is `t = log r`, where
//! the radial frame field becomes `e^{(p-1)t} ∂_t`.

use ndarray::Array3;
use nalgebra::DMatrix;
use rustfft::FftPlanner;

use super::{BoundaryOperator, MultiIndex};
use crate::crosssec::{fourier_basis, CrossSection, Mode};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::poly::{i_pow, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    /// Periodic window in `t`, FFT differentiation.
    Fourier,
    /// Chebyshev–Gauss–Lobatto nodes in `t`.
    Chebyshev,
}

#[derive(Clone, Debug)]
pub struct RadialGrid {
    kind: GridKind,
    t: Vec<f64>,
    t_min: f64,
    t_max: f64,
    cheb: Option<DMatrix<f64>>,
}

impl RadialGrid {
    /// `n` equispaced nodes on the periodic window `[t_min, t_max)`.
    pub fn fourier(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::Grid(format!("Fourier grid needs an even n >= 4, got {n}")));
        }
        check_window(t_min, t_max)?;
        let h = (t_max - t_min) / n as f64;
        Ok(RadialGrid {
            kind: GridKind::Fourier,
            t: (0..n).map(|j| t_min + h * j as f64).collect(),
            t_min,
            t_max,
            cheb: None,
        })
    }

    /// `n` Chebyshev–Gauss–Lobatto nodes on `[t_min, t_max]`, descending.
    pub fn chebyshev(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Grid(format!("Chebyshev grid needs n >= 2, got {n}")));
        }
        check_window(t_min, t_max)?;
        let big_n = n - 1;
        let mid = 0.5 * (t_min + t_max);
        let half = 0.5 * (t_max - t_min);
        let x: Vec<f64> = (0..n)
            .map(|j| (std::f64::consts::PI * j as f64 / big_n as f64).cos())
            .collect();
        let weight = |j: usize| {
            let base = if j == 0 || j == big_n { 2.0 } else { 1.0 };
            if j % 2 == 0 {
                base
            } else {
                -base
            }
        };
        let mut d = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                if i != j {
                    let v = weight(i) / weight(j) / (x[i] - x[j]);
                    d[(i, j)] = v;
                    row_sum += v;
                }
            }
            d[(i, i)] = -row_sum;
        }
        d /= half;
        Ok(RadialGrid {
            kind: GridKind::Chebyshev,
            t: x.iter().map(|xi| mid + half * xi).collect(),
            t_min,
            t_max,
            cheb: Some(d),
        })
    }

    /// Grid covering `r ∈ [r_min, r_max]`; `r_min` must be positive.
    pub fn from_r_range(kind: GridKind, r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min > 0.0) {
            return Err(Error::Grid(format!("radial grid touches r = 0 (r_min = {r_min})")));
        }
        if !(r_max > r_min) {
            return Err(Error::Grid(format!("empty radial range [{r_min}, {r_max}]")));
        }
        match kind {
            GridKind::Fourier => RadialGrid::fourier(r_min.ln(), r_max.ln(), n),
            GridKind::Chebyshev => RadialGrid::chebyshev(r_min.ln(), r_max.ln(), n),
        }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    pub fn r(&self) -> Vec<f64> {
        self.t.iter().map(|t| t.exp()).collect()
    }

    /// Spectral `d/dt` of the samples.
    pub fn d_t(&self, u: &[C64]) -> Vec<C64> {
        match self.kind {
            GridKind::Chebyshev => {
                let d = self.cheb.as_ref().expect("chebyshev matrix");
                (0..u.len())
                    .map(|i| (0..u.len()).map(|j| u[j] * d[(i, j)]).sum())
                    .collect()
            }
            GridKind::Fourier => {
                let n = u.len();
                let mut planner = FftPlanner::<f64>::new();
                let fwd = planner.plan_fft_forward(n);
                let inv = planner.plan_fft_inverse(n);
                let mut buf = u.to_vec();
                fwd.process(&mut buf);
                let scale = 2.0 * std::f64::consts::PI / (self.t_max - self.t_min);
                for (k, v) in buf.iter_mut().enumerate() {
                    let freq = if k < n / 2 {
                        k as f64
                    } else if k == n / 2 {
                        0.0
                    } else {
                        k as f64 - n as f64
                    };
                    *v *= C64::new(0.0, scale * freq) / n as f64;
                }
                inv.process(&mut buf);
                buf
            }
        }
    }
}

fn check_window(t_min: f64, t_max: f64) -> Result<()> {
    if !(t_min.is_finite() && t_max.is_finite() && t_max > t_min) {
        return Err(Error::Grid(format!("invalid window [{t_min}, {t_max}]")));
    }
    Ok(())
}

/// Modes resolving the operator: Fourier modes when explicit partials need
/// them, Laplacian eigenspaces otherwise.
pub fn mode_basis(op: &BoundaryOperator, cutoff: f64) -> Result<Vec<Mode>> {
    if op.needs_fourier_modes() {
        Ok(fourier_basis(op.cross_section(), cutoff))
    } else {
        Ok(op.cross_section().spectrum(cutoff)?.modes())
    }
}

/// Scalar by which the cross part of `alpha` acts on `mode`.
pub fn cross_symbol(alpha: &MultiIndex, mode: &Mode, cross: &CrossSection) -> Result<C64> {
    let mut s = C64::new(mode.eigenvalue.powi(alpha.laplacian as i32), 0.0);
    if alpha.cross.iter().all(|&b| b == 0) {
        return Ok(s);
    }
    match &mode.wavevector {
        Some(k) => {
            for (j, &b) in alpha.cross.iter().enumerate() {
                s *= i_pow(b) * (k[j] as f64).powi(b as i32);
            }
            Ok(s)
        }
        None if matches!(cross, CrossSection::Circle) && alpha.cross[0] % 2 == 0 => {
            // ∂_θ^{2j} acts as (-λ)^j on the whole eigenspace.
            Ok(s * (-mode.eigenvalue).powi((alpha.cross[0] / 2) as i32))
        }
        None => Err(Error::DegenerateMode {
            mode: mode.label(),
            reason: "explicit cross partials need individual Fourier modes".into(),
        }),
    }
}

/// `(P u)` on the grid, one mode at a time.
pub fn apply(
    op: &BoundaryOperator,
    grid: &RadialGrid,
    modes: &[Mode],
    u: &Array3<C64>,
    exec: Execution,
) -> Result<Array3<C64>> {
    let k = op.system_size();
    let n = grid.len();
    if u.dim() != (n, modes.len(), k) {
        return Err(Error::InvalidParameter(format!(
            "samples have shape {:?}, expected ({n}, {}, {k})",
            u.dim(),
            modes.len()
        )));
    }
    if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("samples must be finite".into()));
    }
    let p = op.structure().radial_exponent();
    let q = op.structure().cross_exponent();
    let max_a = op.terms().keys().map(|a| a.radial).max().unwrap_or(0) as usize;
    let t = grid.t();
    let stretch: Vec<f64> = t.iter().map(|t| ((p - 1.0) * t).exp()).collect();

    let per_mode = par::map_range(exec, modes.len(), |m| -> Result<Vec<Vec<C64>>> {
        // powers[a][c] = X^a applied to component c
        let mut powers: Vec<Vec<Vec<C64>>> = Vec::with_capacity(max_a + 1);
        powers.push((0..k).map(|c| (0..n).map(|i| u[(i, m, c)]).collect()).collect());
        for a in 0..max_a {
            let next = powers[a]
                .iter()
                .map(|col| {
                    grid.d_t(col)
                        .into_iter()
                        .zip(&stretch)
                        .map(|(v, s)| v * s)
                        .collect()
                })
                .collect();
            powers.push(next);
        }
        let mut out = vec![vec![C64::new(0.0, 0.0); n]; k];
        for (alpha, coeff) in op.terms() {
            let s = cross_symbol(alpha, &modes[m], op.cross_section())?;
            let shift = q * f64::from(alpha.cross_order());
            let src = &powers[alpha.radial as usize];
            for term in coeff.terms() {
                let mu = term.exponent + shift;
                for i in 0..n {
                    let w = s * (mu * t[i]).exp();
                    for (co, row) in out.iter_mut().enumerate() {
                        let mut acc = C64::new(0.0, 0.0);
                        for (ci, col) in src.iter().enumerate() {
                            acc += term.value[(co, ci)] * col[i];
                        }
                        row[i] += w * acc;
                    }
                }
            }
        }
        Ok(out)
    });

    let mut result = Array3::<C64>::zeros((n, modes.len(), k));
    for (m, cols) in per_mode.into_iter().enumerate() {
        for (c, col) in cols?.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                result[(i, m, c)] = v;
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liestruct::StructureKind;
    use crate::opalg::{make_model, Model};
    use crate::poly::c;

    fn single_mode(eigenvalue: f64) -> Mode {
        Mode {
            id: 0,
            eigenvalue,
            multiplicity: 1,
            wavevector: None,
        }
    }

    fn sample(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Array3<C64> {
        let r = grid.r();
        Array3::from_shape_fn((r.len(), 1, 1), |(i, _, _)| c(f(r[i])))
    }

    #[test]
    fn radial_square_on_a_power() {
        let op = BoundaryOperator::new(StructureKind::B, CrossSection::circle(), 1)
            .unwrap()
            .with_scalar(MultiIndex::radial(2, 1), 0.0, 1.0)
            .unwrap();
        let grid = RadialGrid::from_r_range(GridKind::Chebyshev, 0.2, 1.5, 24).unwrap();
        let u = sample(&grid, |r| r * r);
        let out = apply(&op, &grid, &[single_mode(0.0)], &u, Execution::Sequential).unwrap();
        for (i, r) in grid.r().iter().enumerate() {
            assert!((out[(i, 0, 0)] - c(4.0 * r * r)).norm() < 1e-9 * (1.0 + r * r));
        }
    }

    #[test]
    fn polar_laplacian_kills_r_on_mode_one() {
        let op = make_model(&Model::PolarLaplacian).unwrap();
        let grid = RadialGrid::from_r_range(GridKind::Chebyshev, 0.1, 2.0, 20).unwrap();
        let u = sample(&grid, |r| r);
        let out = apply(&op, &grid, &[single_mode(1.0)], &u, Execution::Sequential).unwrap();
        assert!(out.iter().all(|z| z.norm() < 1e-9));
    }

    #[test]
    fn black_scholes_kills_x() {
        let op = make_model(&Model::BlackScholes { sigma: 1.0, rate: 0.0 }).unwrap();
        let grid = RadialGrid::from_r_range(GridKind::Chebyshev, 0.1, 3.0, 20).unwrap();
        let u = sample(&grid, |r| r);
        let out = apply(&op, &grid, &[single_mode(0.0)], &u, Execution::Sequential).unwrap();
        assert!(out.iter().all(|z| z.norm() < 1e-9));
    }

    #[test]
    fn fourier_derivative_is_spectral() {
        let grid = RadialGrid::fourier(-3.0, 3.0, 64).unwrap();
        let w = 2.0 * std::f64::consts::PI / 6.0;
        let u: Vec<C64> = grid.t().iter().map(|t| c((3.0 * w * t).sin())).collect();
        let du = grid.d_t(&u);
        for (t, d) in grid.t().iter().zip(&du) {
            assert!((d - c(3.0 * w * (3.0 * w * t).cos())).norm() < 1e-11);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RadialGrid::from_r_range(GridKind::Fourier, 0.0, 1.0, 16).is_err());
        let op = make_model(&Model::PolarLaplacian).unwrap();
        let grid = RadialGrid::fourier(-1.0, 1.0, 8).unwrap();
        let u = Array3::<C64>::zeros((8, 2, 1));
        assert!(apply(&op, &grid, &[single_mode(0.0)], &u, Execution::Sequential).is_err());
    }
}
