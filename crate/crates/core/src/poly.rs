//! Complex scalar and matrix polynomials, and the companion-matrix root
//! finder used for indicial roots.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `i^n` without floating point drift.
pub fn i_pow(n: u32) -> C64 {
    match n % 4 {
        0 => c(1.0),
        1 => I,
        2 => c(-1.0),
        _ => -I,
    }
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * f64::from(n - j) / f64::from(j + 1);
    }
    acc.round()
}

/// Polynomial with complex coefficients, stored in ascending order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| c(x)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(v: C64) -> Self {
        Poly::new(vec![v])
    }

    pub fn monomial(v: C64, degree: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); degree + 1];
        coeffs[degree] = v;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| a * s).collect())
    }

    /// Drops leading coefficients whose magnitude is at most `rel_tol`
    /// times the largest coefficient.
    pub fn trimmed(&self, rel_tol: f64) -> Poly {
        let scale = self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= rel_tol * scale) {
            coeffs.pop();
        }
        Poly::new(coeffs)
    }

    /// `q(z) = p(z + s)`.
    pub fn shift(&self, s: C64) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        for (k, &a) in self.coeffs.iter().enumerate() {
            for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                *slot += a * binomial(k as u32, j as u32) * s.powu((k - j) as u32);
            }
        }
        Poly::new(out)
    }

    pub fn approx_eq(&self, other: &Poly, tol: f64) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        let scale = self.max_abs_coeff().max(other.max_abs_coeff()).max(1.0);
        (0..n).all(|k| (self.coeff(k) - other.coeff(k)).norm() <= tol * scale)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(c(-1.0))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Polynomial whose coefficients are square complex matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoly {
    dim: usize,
    coeffs: Vec<Matrix>,
}

impl MatrixPoly {
    pub fn new(dim: usize, mut coeffs: Vec<Matrix>) -> Self {
        debug_assert!(coeffs.iter().all(|m| m.nrows() == dim && m.ncols() == dim));
        while coeffs.last().is_some_and(|m| m.iter().all(|x| x.norm() == 0.0)) {
            coeffs.pop();
        }
        MatrixPoly { dim, coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        MatrixPoly {
            dim,
            coeffs: Vec::new(),
        }
    }

    pub fn scalar(p: &Poly) -> Self {
        MatrixPoly::new(
            1,
            p.coeffs()
                .iter()
                .map(|&a| Matrix::from_element(1, 1, a))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Matrix {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim, self.dim))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, k: usize, m: &Matrix) {
        while self.coeffs.len() <= k {
            self.coeffs.push(Matrix::zeros(self.dim, self.dim));
        }
        self.coeffs[k] += m;
        while self
            .coeffs
            .last()
            .is_some_and(|m| m.iter().all(|x| x.norm() == 0.0))
        {
            self.coeffs.pop();
        }
    }

    pub fn eval(&self, z: C64) -> Matrix {
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for m in self.coeffs.iter().rev() {
            acc = acc * z + m;
        }
        acc
    }

    /// `p(s·z)` as a polynomial in `z`.
    pub fn rescale_variable(&self, s: C64) -> MatrixPoly {
        MatrixPoly::new(
            self.dim,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, m)| m * s.powu(k as u32))
                .collect(),
        )
    }

    /// `p(z + s)`.
    pub fn shift(&self, s: C64) -> MatrixPoly {
        let mut out = vec![Matrix::zeros(self.dim, self.dim); self.coeffs.len()];
        for (k, m) in self.coeffs.iter().enumerate() {
            for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                *slot += m * (binomial(k as u32, j as u32) * s.powu((k - j) as u32));
            }
        }
        MatrixPoly::new(self.dim, out)
    }

    pub fn mul(&self, rhs: &MatrixPoly) -> MatrixPoly {
        assert_eq!(self.dim, rhs.dim, "matrix polynomial dimensions differ");
        if self.is_zero() || rhs.is_zero() {
            return MatrixPoly::zero(self.dim);
        }
        let mut out = vec![Matrix::zeros(self.dim, self.dim); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        MatrixPoly::new(self.dim, out)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|m| m.iter())
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &MatrixPoly, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let scale = self.max_abs_coeff().max(other.max_abs_coeff()).max(1.0);
        (0..n).all(|k| {
            (self.coeff(k) - other.coeff(k))
                .iter()
                .all(|x| x.norm() <= tol * scale)
        })
    }

    /// Entry `(i, j)` as a scalar polynomial.
    pub fn entry(&self, i: usize, j: usize) -> Poly {
        Poly::new(self.coeffs.iter().map(|m| m[(i, j)]).collect())
    }

    /// Determinant as a scalar polynomial, by cofactor expansion memoised
    /// over column subsets.
    pub fn det(&self) -> Result<Poly> {
        let k = self.dim;
        if k == 0 {
            return Ok(Poly::constant(c(1.0)));
        }
        if k > 16 {
            return Err(Error::ResourceLimit(format!(
                "symbolic determinant of a {k}x{k} matrix polynomial"
            )));
        }
        let entries: Vec<Vec<Poly>> = (0..k)
            .map(|i| (0..k).map(|j| self.entry(i, j)).collect())
            .collect();
        let full = (1usize << k) - 1;
        let mut memo: Vec<Option<Poly>> = vec![None; 1 << k];
        memo[full] = Some(Poly::constant(c(1.0)));
        // Masks with more bits set are finished first.
        let mut masks: Vec<usize> = (0..full).collect();
        masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
        for mask in masks {
            let row = mask.count_ones() as usize;
            let mut acc = Poly::zero();
            let mut free_before = 0usize;
            for col in 0..k {
                if mask & (1 << col) != 0 {
                    continue;
                }
                let minor = memo[mask | (1 << col)].as_ref().expect("superset computed");
                let term = &entries[row][col] * minor;
                acc = if free_before % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
                free_before += 1;
            }
            memo[mask] = Some(acc);
        }
        Ok(memo[0].take().expect("determinant computed"))
    }
}

/// A root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyRoot {
    pub value: C64,
    pub multiplicity: usize,
}

/// Default distance below which eigenvalues of the companion matrix are
/// merged into one multiple root.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Roots of `p` from the eigenvalues of its companion matrix, clustered at
/// `cluster_tol` (relative to `max(1, |z|)`) and polished by Newton's method
/// on the appropriate derivative.
pub fn companion_roots(p: &Poly, cluster_tol: f64) -> Result<Vec<PolyRoot>> {
    let degree = p
        .degree()
        .ok_or_else(|| Error::Numerical("root finding on the zero polynomial".into()))?;
    let lead = p.leading();
    if lead.norm() == 0.0 {
        return Err(Error::Numerical("vanishing leading coefficient".into()));
    }
    let zeros_at_origin = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = Poly::new(p.coeffs()[zeros_at_origin..].to_vec());
    let d = degree - zeros_at_origin;

    let mut raw: Vec<C64> = Vec::with_capacity(degree);
    if d > 0 {
        raw = companion_eigenvalues(&reduced, d)?;
    }

    let mut roots = cluster(&raw, cluster_tol)
        .into_iter()
        .map(|(z, m)| PolyRoot {
            value: polish(&reduced, z, m),
            multiplicity: m,
        })
        .collect::<Vec<_>>();
    if zeros_at_origin > 0 {
        roots.push(PolyRoot {
            value: C64::new(0.0, 0.0),
            multiplicity: zeros_at_origin,
        });
    }
    sort_roots(&mut roots);
    Ok(roots)
}

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of the companion matrix of `p` (degree `d`). The shifted QR
/// iteration can stall on highly structured inputs, so on failure the
/// variable is rotated, `z = e^{iθ} w`, and the rotated roots mapped back.
fn companion_eigenvalues(p: &Poly, d: usize) -> Result<Vec<C64>> {
    for theta in [0.0, std::f64::consts::FRAC_PI_4, 0.3217505543966422, 1.9, 2.6] {
        let rot = C64::from_polar(1.0, theta);
        let lead = p.coeff(d) * rot.powu(d as u32);
        let mut comp = Matrix::zeros(d, d);
        for i in 1..d {
            comp[(i, i - 1)] = c(1.0);
        }
        for i in 0..d {
            comp[(i, d - 1)] = -p.coeff(i) * rot.powu(i as u32) / lead;
        }
        if let Some(eig) = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, SCHUR_MAX_ITER).and_then(|s| s.eigenvalues()) {
            return Ok(eig.iter().map(|w| w * rot).collect());
        }
    }
    Err(Error::Numerical("companion Schur form did not converge".into()))
}

/// Orders roots by real part, then imaginary part.
pub fn sort_roots(roots: &mut [PolyRoot]) {
    roots.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
}

fn cluster(points: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = points[i].norm().max(points[j].norm()).max(1.0);
            if (points[i] - points[j]).norm() < tol * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += points[i];
                g.2 += 1;
            }
            None => groups.push((root, points[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, m)| (sum / m as f64, m))
        .collect()
}

fn polish(p: &Poly, start: C64, multiplicity: usize) -> C64 {
    let q = p.nth_derivative(multiplicity - 1);
    let dq = q.derivative();
    let mut z = start;
    let mut best = (q.eval(z).norm(), z);
    for _ in 0..60 {
        let d = dq.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = q.eval(z) / d;
        z -= step;
        let r = q.eval(z).norm();
        if r < best.0 {
            best = (r, z);
        }
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    if (best.1 - start).norm() > 1e-3 * start.norm().max(1.0) {
        start
    } else {
        best.1
    }
}

/// Smallest singular value of a square complex matrix.
pub fn sigma_min(m: &Matrix) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
