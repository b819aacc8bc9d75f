//! Spectral data of the boundary cross-section.
//!
//! Every operator in this crate touches the cross-section only through its
//! Laplacian `L` (the nonnegative, geometer's Laplacian) and, on circles and
//! tori, through explicit coordinate partials. Indicial families are therefore
//! block-diagonal in the eigenmodes listed here.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::C64;

const HERMITIAN_TOL: f64 = 1e-12;
const EIGEN_MERGE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum CrossSection {
    Circle,
    Torus {
        dim: usize,
    },
    /// The round sphere `S^dim`.
    Sphere {
        dim: usize,
    },
    /// A pre-discretised cross-section: `matrix` plays the role of `L`.
    /// `dim` is the geometric dimension used for covector sampling.
    GenericMatrix {
        matrix: DMatrix<C64>,
        dim: usize,
        eigenvalues: Vec<f64>,
    },
}

impl CrossSection {
    pub fn circle() -> Self {
        CrossSection::Circle
    }

    pub fn torus(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("torus dimension must be >= 1".into()));
        }
        Ok(CrossSection::Torus { dim })
    }

    pub fn sphere(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("sphere dimension must be >= 1".into()));
        }
        Ok(CrossSection::Sphere { dim })
    }

    /// Validates that `matrix` is Hermitian with nonnegative spectrum.
    pub fn generic(matrix: DMatrix<C64>, dim: usize) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidParameter(format!(
                "cross-section matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = matrix.nrows();
        for i in 0..n {
            for j in 0..n {
                let d = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if d > HERMITIAN_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "cross-section matrix is not Hermitian: |H[{i},{j}] - conj(H[{j},{i}])| = {d:e}"
                    )));
                }
            }
        }
        let mut eigenvalues: Vec<f64> = matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigenvalues.sort_by(f64::total_cmp);
        if let Some(&min) = eigenvalues.first() {
            if min < -HERMITIAN_TOL {
                return Err(Error::InvalidParameter(format!(
                    "cross-section matrix has negative eigenvalue {min}; it must act as a nonnegative Laplacian"
                )));
            }
        }
        let eigenvalues = eigenvalues.into_iter().map(|x| x.max(0.0)).collect();
        Ok(CrossSection::GenericMatrix {
            matrix,
            dim,
            eigenvalues,
        })
    }

    /// Geometric dimension (length of the cross covector).
    pub fn dimension(&self) -> usize {
        match self {
            CrossSection::Circle => 1,
            CrossSection::Torus { dim } | CrossSection::Sphere { dim } => *dim,
            CrossSection::GenericMatrix { dim, .. } => *dim,
        }
    }

    /// Number of coordinate directions with explicit partials.
    pub fn partial_dims(&self) -> usize {
        match self {
            CrossSection::Circle => 1,
            CrossSection::Torus { dim } => *dim,
            _ => 0,
        }
    }

    pub fn has_fourier_basis(&self) -> bool {
        matches!(self, CrossSection::Circle | CrossSection::Torus { .. })
    }

    /// Compact cross-sections with finitely many modes.
    pub fn is_finite(&self) -> bool {
        matches!(self, CrossSection::GenericMatrix { .. })
    }

    pub fn max_eigenvalue(&self) -> Option<f64> {
        match self {
            CrossSection::GenericMatrix { eigenvalues, .. } => eigenvalues.last().copied(),
            _ => None,
        }
    }

    /// All Laplace eigenvalues `≤ cutoff` with multiplicities. The lowest
    /// mode is always returned, even above the cutoff.
    pub fn spectrum(&self, cutoff: f64) -> Result<ModeTable> {
        if !(cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
        }
        let mut entries: Vec<ModeEntry> = Vec::new();
        match self {
            CrossSection::Circle => {
                let kmax = cutoff.sqrt().floor() as u64;
                for k in 0..=kmax {
                    entries.push(ModeEntry {
                        id: k as usize,
                        eigenvalue: (k * k) as f64,
                        multiplicity: if k == 0 { 1 } else { 2 },
                    });
                }
            }
            CrossSection::Sphere { dim } => {
                let d = *dim as f64;
                let mut l = 0u64;
                loop {
                    let ev = (l as f64) * (l as f64 + d - 1.0);
                    if l > 0 && ev > cutoff {
                        break;
                    }
                    entries.push(ModeEntry {
                        id: l as usize,
                        eigenvalue: ev,
                        multiplicity: sphere_multiplicity(*dim, l as u32) as usize,
                    });
                    l += 1;
                }
            }
            CrossSection::Torus { .. } => {
                let mut counts: std::collections::BTreeMap<u64, usize> = Default::default();
                for k in self.fourier_modes(cutoff) {
                    let n2: i64 = k.iter().map(|x| x * x).sum();
                    *counts.entry(n2 as u64).or_default() += 1;
                }
                for (id, (n2, m)) in counts.into_iter().enumerate() {
                    entries.push(ModeEntry {
                        id,
                        eigenvalue: n2 as f64,
                        multiplicity: m,
                    });
                }
            }
            CrossSection::GenericMatrix { eigenvalues, .. } => {
                for &ev in eigenvalues {
                    if !entries.is_empty() && ev > cutoff {
                        break;
                    }
                    match entries.last_mut() {
                        Some(last) if (ev - last.eigenvalue).abs() <= EIGEN_MERGE_TOL * ev.max(1.0) => {
                            last.multiplicity += 1
                        }
                        _ => entries.push(ModeEntry {
                            id: entries.len(),
                            eigenvalue: ev,
                            multiplicity: 1,
                        }),
                    }
                }
            }
        }
        Ok(ModeTable { entries, cutoff })
    }

    /// Integer wavevectors `k` with `|k|² ≤ cutoff` (circle and torus only),
    /// ordered by `|k|²` then lexicographically.
    pub fn fourier_modes(&self, cutoff: f64) -> Vec<Vec<i64>> {
        let d = match self {
            CrossSection::Circle => 1,
            CrossSection::Torus { dim } => *dim,
            _ => return Vec::new(),
        };
        let kmax = cutoff.max(0.0).sqrt().floor() as i64;
        let mut out = Vec::new();
        let mut k = vec![-kmax; d];
        loop {
            let n2: i64 = k.iter().map(|x| x * x).sum();
            if (n2 as f64) <= cutoff {
                out.push(k.clone());
            }
            let mut j = 0;
            loop {
                if j == d {
                    out.sort_by(|a, b| {
                        let na: i64 = a.iter().map(|x| x * x).sum();
                        let nb: i64 = b.iter().map(|x| x * x).sum();
                        na.cmp(&nb).then(a.cmp(b))
                    });
                    if out.is_empty() {
                        out.push(vec![0; d]);
                    }
                    return out;
                }
                k[j] += 1;
                if k[j] > kmax {
                    k[j] = -kmax;
                    j += 1;
                } else {
                    break;
                }
            }
        }
    }
}

impl fmt::Display for CrossSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossSection::Circle => write!(f, "S^1"),
            CrossSection::Torus { dim } => write!(f, "T^{dim}"),
            CrossSection::Sphere { dim } => write!(f, "S^{dim}"),
            CrossSection::GenericMatrix { matrix, .. } => {
                write!(f, "generic({}x{})", matrix.nrows(), matrix.ncols())
            }
        }
    }
}

/// Dimension of the degree-`l` spherical harmonics on `S^dim`.
pub fn sphere_multiplicity(dim: usize, l: u32) -> u64 {
    fn binom(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        (0..k).fold(1u64, |acc, j| acc * (n - j) / (j + 1))
    }
    let d = dim as u64;
    let l = u64::from(l);
    let lower = if l >= 2 { binom(l + d - 2, d) } else { 0 };
    binom(l + d, d) - lower
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeEntry {
    pub id: usize,
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeTable {
    pub entries: Vec<ModeEntry>,
    pub cutoff: f64,
}

/// One block of a mode decomposition: either a whole eigenspace of `L`, or
/// a single Fourier mode on a circle or torus.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub id: usize,
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub wavevector: Option<Vec<i64>>,
}

impl Mode {
    pub fn label(&self) -> String {
        match &self.wavevector {
            Some(k) if k.len() == 1 => format!("k={}", k[0]),
            Some(k) => {
                let parts: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                format!("k=({})", parts.join(","))
            }
            None => format!("mode {} (lambda={})", self.id, self.eigenvalue),
        }
    }

    /// Frequency `|η| = √λ` used by the ellipticity tail bound.
    pub fn frequency(&self) -> f64 {
        self.eigenvalue.sqrt()
    }
}

impl ModeTable {
    pub fn modes(&self) -> Vec<Mode> {
        self.entries
            .iter()
            .map(|e| Mode {
                id: e.id,
                eigenvalue: e.eigenvalue,
                multiplicity: e.multiplicity,
                wavevector: None,
            })
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

/// Individual Fourier modes `e^{ik·y}` up to the cutoff.
pub fn fourier_basis(cross: &CrossSection, cutoff: f64) -> Vec<Mode> {
    cross
        .fourier_modes(cutoff)
        .into_iter()
        .enumerate()
        .map(|(id, k)| Mode {
            id,
            eigenvalue: k.iter().map(|x| (x * x) as f64).sum(),
            multiplicity: 1,
            wavevector: Some(k),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::c;

    fn triples(t: &ModeTable) -> Vec<(usize, f64, usize)> {
        t.entries.iter().map(|e| (e.id, e.eigenvalue, e.multiplicity)).collect()
    }

    #[test]
    fn circle_and_sphere_tables() {
        let t = CrossSection::circle().spectrum(4.5).unwrap();
        assert_eq!(triples(&t), vec![(0, 0.0, 1), (1, 1.0, 2), (2, 4.0, 2)]);
        let t = CrossSection::sphere(2).unwrap().spectrum(6.5).unwrap();
        assert_eq!(triples(&t), vec![(0, 0.0, 1), (1, 2.0, 3), (2, 6.0, 5)]);
        let t = CrossSection::sphere(2).unwrap().spectrum(0.1).unwrap();
        assert_eq!(triples(&t), vec![(0, 0.0, 1)]);
    }

    #[test]
    fn generic_matrix_table() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.3), c(1.7)]));
        let g = CrossSection::generic(m, 1).unwrap();
        let t = g.spectrum(1.0).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert!((t.entries[0].eigenvalue - 0.3).abs() < 1e-14);
        assert_eq!(t.entries[0].multiplicity, 1);
        // smallest mode is kept even above the cutoff
        assert_eq!(g.spectrum(0.1).unwrap().entries.len(), 1);

        let bad = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        assert!(CrossSection::generic(bad, 1).is_err());
        let neg = DMatrix::from_row_slice(1, 1, &[c(-1.0)]);
        assert!(CrossSection::generic(neg, 1).is_err());
    }

    #[test]
    fn multiplicities() {
        assert_eq!(sphere_multiplicity(1, 3), 2);
        assert_eq!(sphere_multiplicity(2, 2), 5);
        for d in 1..6 {
            assert_eq!(sphere_multiplicity(d, 0), 1);
        }
        // S^3: (l+1)^2
        for l in 0..8 {
            assert_eq!(sphere_multiplicity(3, l), u64::from((l + 1) * (l + 1)));
        }
        for big_l in 0..12u32 {
            let total: u64 = (0..=big_l).map(|l| sphere_multiplicity(2, l)).sum();
            assert_eq!(total, u64::from((big_l + 1) * (big_l + 1)));
        }
    }

    #[test]
    fn torus_counts_lattice_points() {
        let t = CrossSection::torus(2).unwrap().spectrum(2.0).unwrap();
        assert_eq!(triples(&t), vec![(0, 0.0, 1), (1, 1.0, 4), (2, 2.0, 4)]);
        assert_eq!(CrossSection::circle().fourier_modes(1.0), vec![vec![0], vec![-1], vec![1]]);
    }

    #[test]
    fn spectrum_is_monotone_in_cutoff() {
        for x in [CrossSection::circle(), CrossSection::sphere(3).unwrap(), CrossSection::torus(2).unwrap()] {
            let small = x.spectrum(7.0).unwrap();
            let large = x.spectrum(30.0).unwrap();
            assert!(small.entries.iter().all(|e| large.entries.contains(e)));
        }
    }

    /// Second-order finite differences for the circle Laplacian.
    fn fd_circle(n: usize) -> Vec<f64> {
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 2.0 / (h * h);
            m[(i, (i + 1) % n)] = -1.0 / (h * h);
            m[(i, (i + n - 1) % n)] = -1.0 / (h * h);
        }
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Finite volumes for the zonal part of the `S^2` Laplacian,
    /// `-(1/sinθ) d/dθ (sinθ d/dθ)`, symmetrised by the cell volumes.
    fn fd_sphere_zonal(n: usize) -> Vec<f64> {
        let h = std::f64::consts::PI / n as f64;
        let centers: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let wi = centers[i].sin();
            let fl = ((i as f64) * h).sin();
            let fr = ((i as f64 + 1.0) * h).sin();
            m[(i, i)] = (fl + fr) / (h * h);
            if i > 0 {
                m[(i, i - 1)] = -fl / (h * h);
            }
            if i + 1 < n {
                m[(i, i + 1)] = -fr / (h * h);
            }
            // symmetric scaling D^{-1/2} A D^{-1/2}
            for j in 0..n {
                m[(i, j)] /= wi.sqrt();
            }
        }
        for j in 0..n {
            let wj = centers[j].sin().sqrt();
            for i in 0..n {
                m[(i, j)] /= wj;
            }
        }
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn analytic_spectra_agree_with_finite_differences() {
        let circle = CrossSection::circle().spectrum(9.5).unwrap();
        let mut errs = Vec::new();
        for n in [64, 128, 256] {
            let fd = fd_circle(n);
            // fd eigenvalues come in pairs for k >= 1
            let e: f64 = circle
                .entries
                .iter()
                .map(|m| {
                    let idx = if m.id == 0 { 0 } else { 2 * m.id - 1 };
                    (fd[idx] - m.eigenvalue).abs()
                })
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(errs[0] > 3.5 * errs[1] && errs[1] > 3.5 * errs[2], "{errs:?}");
        assert!(errs[2] < 1e-2);

        let sphere = CrossSection::sphere(2).unwrap().spectrum(12.5).unwrap();
        let mut errs = Vec::new();
        for n in [50, 100, 200] {
            let fd = fd_sphere_zonal(n);
            let e: f64 = sphere
                .entries
                .iter()
                .map(|m| (fd[m.id] - m.eigenvalue).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(errs[0] > 3.0 * errs[1] && errs[1] > 3.0 * errs[2], "{errs:?}");
        assert!(errs[2] < 1e-2);
    }
}
