//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Runs with `cargo test --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use fredholm_core::crosssec::{fourier_basis, CrossSection, Mode};
use fredholm_core::fredholm::{
    fredholm_check, indicial_roots, sc_invertible, CheckOptions, Invertibility, ScSearch, Verdict,
};
use fredholm_core::limitops::{indicial_family, indicial_family_on, normal_operator, ConstantSymbol, IndicialFamily};
use fredholm_core::liestruct::{LieStructure, StructureKind};
use fredholm_core::numoracle::{brute_roots, cross_check, scan_line, OracleOptions};
use fredholm_core::opalg::{apply, cgamma_rewrite, kondratiev_transform, make_model, BoundaryOperator, Coefficient, Model, MultiIndex, RadialGrid};
use fredholm_core::poly::{c, C64};
use fredholm_core::Execution;
use fredholm_kit::{run, Command, Format, RunOptions};
use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const SEQ: Execution = Execution::Sequential;
const PAR: Execution = Execution::Parallel;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn family(op: &BoundaryOperator, cutoff: f64) -> IndicialFamily {
    indicial_family(&normal_operator(op).unwrap(), cutoff, SEQ).unwrap()
}

fn at(weight: f64) -> CheckOptions {
    CheckOptions {
        weight,
        ..Default::default()
    }
}

fn random_operator(kind: StructureKind, rng: &mut ChaCha8Rng) -> BoundaryOperator {
    let mut op = BoundaryOperator::new(kind, CrossSection::circle(), 1).unwrap();
    for (a, b) in [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)] {
        if rng.gen_bool(0.3) {
            continue;
        }
        let mut coeff = Coefficient::zero(1);
        for _ in 0..rng.gen_range(1..=2) {
            let nu = f64::from(rng.gen_range(0..=2u32));
            let v = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            coeff = coeff.add(&Coefficient::scalar(nu, v).unwrap());
        }
        op.add_term(MultiIndex::new(a, vec![b], 0), coeff).unwrap();
    }
    if op.terms().is_empty() {
        op.add_scalar(MultiIndex::radial(1, 1), 0.0, c(1.0)).unwrap();
    }
    op
}

fn samples(grid: &RadialGrid, modes: &[Mode], f: &dyn Fn(f64, usize) -> C64) -> Array3<C64> {
    let t = grid.t().to_vec();
    Array3::from_shape_fn((t.len(), modes.len(), 1), |(i, m, _)| f(t[i], m))
}

fn b_models() -> Vec<BoundaryOperator> {
    [
        Model::PolarLaplacian,
        Model::SphericalSchrodinger { n: 3, z: c(1.0) },
        Model::SphericalSchrodinger { n: 4, z: C64::new(-0.5, 2.0) },
        Model::BlackScholes { sigma: 0.4, rate: 0.05 },
        Model::CGammaSchrodinger { n: 3, gamma: 0.5, v0: c(2.0) },
    ]
    .iter()
    .map(|m| make_model(m).unwrap())
    .collect()
}

fn spherical_roots() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2usize, 3, 4] {
        let op = make_model(&Model::SphericalSchrodinger { n, z: C64::new(0.7, -0.2) }).unwrap();
        let f = family(&op, 10.0 * (10.0 + n as f64 - 2.0) + 0.5);
        ensure!(f.modes.len() == 11, "n = {n}: {} modes below the cutoff", f.modes.len());
        let roots = indicial_roots(&f, PAR).unwrap();
        for (l, mf) in f.modes.iter().enumerate() {
            let l = l as f64;
            let want = [-(l + n as f64 - 2.0), l];
            let mut got: Vec<f64> = roots
                .iter()
                .filter(|r| r.mode_id == mf.mode.id)
                .flat_map(|r| std::iter::repeat(r.mellin).take(r.multiplicity))
                .map(|z| {
                    worst = worst.max(z.im.abs());
                    z.re
                })
                .collect();
            got.sort_by(f64::total_cmp);
            ensure!(got.len() == 2, "n = {n}, l = {l}: {} roots", got.len());
            for (g, w) in got.iter().zip(want) {
                worst = worst.max((g - w).abs());
            }
            for b in brute_roots(&mf.mellin().det().unwrap()).unwrap() {
                ensure!(
                    want.iter().any(|w| (b.value - c(*w)).norm() < 1e-7),
                    "n = {n}, l = {l}: brute root {} unexpected",
                    b.value
                );
            }
        }
    }
    ensure!(worst < 1e-9, "max deviation {worst:e}");
    Ok(format!("n = 2, 3, 4 and l <= 10, max deviation {worst:.1e}"))
}

fn cylinder(lambda: f64) -> BoundaryOperator {
    make_model(&Model::PolarLaplacian)
        .unwrap()
        .with_scalar(MultiIndex::radial(0, 1), 0.0, -lambda)
        .unwrap()
}

fn cylinder_family() -> Outcome {
    for lambda in [0.0, 0.25, 1.0, 4.0] {
        let op = cylinder(lambda);
        let report = fredholm_check(&op, &at(0.0)).unwrap();
        let scan = scan_line(&family(&op, 40.0), 0.0, (-6.0, 6.0), 1201, PAR).unwrap();
        if lambda == 0.0 {
            ensure!(report.verdict == Verdict::NotFredholm, "λ = 0: {:?}", report.verdict);
            ensure!(scan.global_min < 1e-3 && scan.argmin.abs() < 1e-2, "λ = 0: scan min {} at {}", scan.global_min, scan.argmin);
        } else {
            ensure!(report.verdict == Verdict::Fredholm, "λ = {lambda}: {:?}", report.verdict);
            ensure!(scan.global_min >= 0.99 * lambda, "λ = {lambda}: scan min {}", scan.global_min);
        }
    }
    Ok("λ = 0 blocked at τ = 0; λ = 0.25, 1, 4 invertible with σ_min >= λ".into())
}

fn conjugation() -> Outcome {
    let mut checked = 0;
    for op in b_models() {
        let cutoff = if op.cross_section().is_finite() { 1.0 } else { 30.0 };
        for delta in [-0.5, 0.3, 1.0] {
            let lhs = family(&op.conjugate(delta).unwrap(), cutoff);
            let rhs = family(&op, cutoff).shifted(C64::new(0.0, -delta));
            ensure!(lhs.approx_eq(&rhs, 1e-12), "{op} at δ = {delta}");
            let direct = fredholm_check(&op, &at(delta)).unwrap().verdict;
            let moved = fredholm_check(&op.conjugate(delta).unwrap(), &at(0.0)).unwrap().verdict;
            ensure!(direct == moved, "{op} at δ = {delta}: {direct:?} vs {moved:?}");
            checked += 1;
        }
    }
    Ok(format!("{checked} (operator, δ) pairs"))
}

fn homomorphism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let modes = fourier_basis(&CrossSection::circle(), 9.0);
    for trial in 0..20 {
        let p = random_operator(StructureKind::B, &mut rng);
        let q = random_operator(StructureKind::B, &mut rng);
        let pq = p.compose(&q).unwrap();
        let (np, nq, npq) = (normal_operator(&p).unwrap(), normal_operator(&q).unwrap(), normal_operator(&pq).unwrap());
        let product = np.base().compose(nq.base()).unwrap();
        ensure!(npq.base().approx_eq(&product, 1e-12), "trial {trial}: N(PQ) != N(P)N(Q)");
        let fp = indicial_family_on(&np, &modes, 9.0, SEQ).unwrap();
        let fq = indicial_family_on(&nq, &modes, 9.0, SEQ).unwrap();
        let fpq = indicial_family_on(&npq, &modes, 9.0, SEQ).unwrap();
        for m in 0..modes.len() {
            let want = fp.modes[m].poly.mul(&fq.modes[m].poly);
            ensure!(fpq.modes[m].poly.approx_eq(&want, 1e-12), "trial {trial}, mode {}", modes[m].label());
        }
    }
    Ok("20 random pairs: normal operators and indicial families multiply".into())
}

fn kondratiev() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for model in [Model::PolarLaplacian, Model::SphericalSchrodinger { n: 3, z: c(1.0) }] {
        let op = make_model(&model).unwrap();
        let cyl = kondratiev_transform(&op).unwrap();
        let modes = op.cross_section().spectrum(12.5).unwrap().modes();
        let grid = RadialGrid::fourier(-14.0, 10.0, 256).unwrap();
        for _ in 0..10 {
            let centers: Vec<(f64, f64)> = (0..modes.len()).map(|_| (rng.gen_range(-3.0..-1.0), rng.gen_range(0.0..3.0))).collect();
            let u = samples(&grid, &modes, &|t, m| {
                let (t0, w) = centers[m];
                C64::new(0.0, w * t).exp() * (-(t - t0) * (t - t0) / 2.0).exp()
            });
            let before = apply(&op, &grid, &modes, &u, SEQ).unwrap();
            let after = cyl.apply(&grid, &modes, &u, SEQ).unwrap();
            let scale = before.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let err = before.iter().zip(after.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
        }
    }
    ensure!(worst < 1e-10, "relative error {worst:e}");
    Ok(format!("relative error {worst:.1e} over 20 wave packets"))
}

fn cgamma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for (n, gamma) in [(3, 0.0), (3, 0.5), (3, 1.0), (3, 2.0), (4, 1.5), (2, 3.0)] {
        for _ in 0..5 {
            let v0 = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
            let (factor, op) = cgamma_rewrite(n, gamma, &Coefficient::scalar(0.0, v0).unwrap()).unwrap();
            let modes = op.cross_section().spectrum(30.0).unwrap().modes();
            let mode = modes[rng.gen_range(0..modes.len())].clone();
            let (center, width) = (rng.gen_range(-1.3..-0.5f64), rng.gen_range(0.08..0.11));
            let g = |t: f64| {
                let x = (t - center) / width;
                let e = (-0.5 * x * x).exp();
                [e, -x / width * e, (x * x - 1.0) / (width * width) * e]
            };
            let grid = RadialGrid::chebyshev(0.2f64.ln() - 0.3, 0.8f64.ln() + 0.3, 160).unwrap();
            let u = samples(&grid, std::slice::from_ref(&mode), &|t, _| c(g(t)[0]));
            let out = apply(&op, &grid, std::slice::from_ref(&mode), &u, SEQ).unwrap();
            let (mut scale, mut err) = (0.0f64, 0.0f64);
            for (i, &t) in grid.t().iter().enumerate() {
                let rho = t.exp();
                let [g0, g1, g2] = g(t);
                // Δu + ρ^{-2γ}V₀u for u = g(log ρ) on the mode
                let want = c((g2 - g1) / (rho * rho) + (n as f64 - 1.0) * g1 / (rho * rho) - mode.eigenvalue * g0 / (rho * rho))
                    + v0 * rho.powf(-2.0 * gamma) * g0;
                let got = out[(i, 0, 0)] * rho.powf(-factor);
                scale = scale.max(want.norm());
                err = err.max((got - want).norm());
            }
            worst = worst.max(err / scale);
        }
    }
    ensure!(worst < 1e-8, "relative error {worst:e}");
    Ok(format!("relative error {worst:.1e} over 30 potentials"))
}

fn brackets() -> Outcome {
    for dim in [2, 3, 4] {
        let b = LieStructure::new(StructureKind::B, dim).unwrap();
        let table = b.bracket_table().unwrap();
        ensure!(table.iter().flatten().all(|e| e.is_zero()), "b, dim {dim}: not abelian");

        let zero = LieStructure::new(StructureKind::Zero, dim).unwrap();
        let table = zero.bracket_table().unwrap();
        for j in 1..dim {
            for (k, coef) in table[0][j].coefficients.iter().enumerate() {
                let want = if k == j { 1.0 } else { 0.0 };
                ensure!(coef.terms().iter().all(|m| m.r_pow == 0.0) && coef.at_origin() == want, "zero, dim {dim}: [e0, e{j}] coefficient {k} is {coef}");
            }
            for i in 1..dim {
                ensure!(table[i][j].is_zero(), "zero, dim {dim}: [e{i}, e{j}] != 0");
            }
        }

        let sc = LieStructure::new(StructureKind::Sc, dim).unwrap();
        let iso = sc.isotropy();
        ensure!(iso.structure_constants.iter().flatten().flatten().all(|&x| x == 0.0), "sc, dim {dim}: constants at r = 0");
        let zi = zero.isotropy();
        ensure!(zi.structure_constants.iter().flatten().flatten().any(|&x| x != 0.0), "zero, dim {dim}: isotropy should be non-abelian");
    }
    Ok("b abelian; zero [e0, ej] = ej; sc constants vanish at r = 0 (dims 2-4)".into())
}

fn flat(shift: f64, dim: usize) -> BoundaryOperator {
    BoundaryOperator::new(StructureKind::Sc, CrossSection::sphere(dim).unwrap(), 1)
        .unwrap()
        .with_scalar(MultiIndex::radial(2, 0), 0.0, 1.0)
        .unwrap()
        .with_scalar(MultiIndex::laplacian_power(1, 0), 0.0, -1.0)
        .unwrap()
        .with_scalar(MultiIndex::radial(0, 0), 0.0, shift)
        .unwrap()
}

fn sc_stability() -> Outcome {
    for dim in [1, 2] {
        let laplace = ConstantSymbol::new(&flat(0.0, dim));
        let shifted = ConstantSymbol::new(&flat(-1.0, dim));
        for grid_points in [101, 301, 601] {
            let search = ScSearch {
                grid_points,
                ..Default::default()
            };
            let v = sc_invertible(&laplace, &search, PAR).unwrap();
            ensure!(v.invertible == Invertibility::No, "S^{dim}, {grid_points} points: Δ reported {:?}", v.invertible);
            ensure!(v.witness.iter().all(|x| x.abs() < 1e-9), "witness {:?}", v.witness);
            let v = sc_invertible(&shifted, &search, PAR).unwrap();
            ensure!(v.invertible == Invertibility::Yes, "S^{dim}, {grid_points} points: Δ - 1 reported {:?}", v.invertible);
            ensure!((v.min_abs_det - 1.0).abs() < 1e-9, "min |det| {}", v.min_abs_det);
        }
    }
    Ok("Δ blocked at ξ = 0, Δ - 1 invertible with margin 1, on 101/301/601-point grids".into())
}

fn safe_weights() -> Outcome {
    for z in [c(0.0), C64::new(3.0, -1.0), c(-7.5)] {
        let op = make_model(&Model::SphericalSchrodinger { n: 3, z }).unwrap();
        let report = fredholm_check(&op, &at(0.5)).unwrap();
        ensure!(report.certified_range == Some((-5.0, 5.0)), "z = {z}: range {:?}", report.certified_range);
        ensure!(report.safe_weights.len() == 10, "z = {z}: {} intervals", report.safe_weights.len());
        for (k, &(a, b)) in report.safe_weights.iter().enumerate() {
            let lo = k as f64 - 5.0;
            ensure!((a - lo).abs() < 1e-9 && (b - lo - 1.0).abs() < 1e-9, "z = {z}: interval ({a}, {b})");
        }
        for k in -5..=5 {
            let v = fredholm_check(&op, &at(f64::from(k))).unwrap().verdict;
            ensure!(v == Verdict::NotFredholm, "z = {z}, δ = {k}: {v:?}");
        }
    }
    Ok("excluded weights are exactly the integers in [-5, 5]".into())
}

fn oracle() -> Outcome {
    let models = [
        Model::PolarLaplacian,
        Model::SphericalSchrodinger { n: 3, z: c(1.0) },
        Model::BlackScholes { sigma: 0.3, rate: 0.04 },
        Model::CylCoordLaplacian,
        Model::CGammaSchrodinger { n: 3, gamma: 2.0, v0: c(1.0) },
        Model::CGammaSchrodinger { n: 3, gamma: 0.5, v0: c(1.0) },
    ];
    let mut entries = 0;
    for m in &models {
        let op = make_model(m).unwrap();
        for weight in [-0.5, 0.0, 0.3] {
            let check = at(weight);
            let report = fredholm_check(&op, &check).unwrap();
            let ledger = cross_check(&op, &report, &check, &OracleOptions::default()).unwrap();
            ensure!(ledger.passed(), "{} at δ = {weight}: {:?}", m.name(), ledger.first_failure());
            entries += ledger.entries.len();
        }
    }

    // negative controls: a moved root and a forged line verdict must both be caught
    let op = make_model(&Model::SphericalSchrodinger { n: 3, z: c(1.0) }).unwrap();
    let check = at(0.5);
    let mut moved = fredholm_check(&op, &check).unwrap();
    moved.roots[0].mellin += C64::new(1e-3, 0.0);
    let ledger = cross_check(&op, &moved, &check, &OracleOptions::default()).unwrap();
    ensure!(!ledger.passed(), "moved root went unnoticed");

    let polar = make_model(&Model::PolarLaplacian).unwrap();
    let check = at(0.0);
    let mut forged = fredholm_check(&polar, &check).unwrap();
    forged.limit_verdicts[0].invertible = Invertibility::Yes;
    forged.verdict = Verdict::Fredholm;
    let ledger = cross_check(&polar, &forged, &check, &OracleOptions::default()).unwrap();
    ensure!(!ledger.passed(), "forged verdict went unnoticed");
    Ok(format!("{entries} ledger entries agree over 6 models x 3 weights; both tampered reports rejected"))
}

fn determinism() -> Outcome {
    let specs = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs");
    let mut names: Vec<_> = std::fs::read_dir(&specs).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for path in &names {
        let docs: Vec<String> = [SEQ, PAR, PAR]
            .into_iter()
            .map(|execution| {
                let opts = RunOptions {
                    weight: 0.25,
                    format: Format::Json,
                    execution,
                    ..Default::default()
                };
                run(Command::Check, Some(path), &opts).document
            })
            .collect();
        ensure!(!docs[0].is_empty(), "{}: empty report", path.display());
        ensure!(docs.iter().all(|d| d == &docs[0]), "{}: reports differ", path.display());
    }
    let bin = env!("CARGO_BIN_EXE_fredholm-kit");
    let spec = specs.join("spherical_schrodinger_3.json");
    let outputs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|threads| {
            std::process::Command::new(bin)
                .args(["check", spec.to_str().unwrap(), "--weight", "0.25", "--format", "json"])
                .env("FREDHOLMKIT_THREADS", threads)
                .output()
                .unwrap()
                .stdout
        })
        .collect();
    ensure!(outputs[0] == outputs[1] && !outputs[0].is_empty(), "binary output depends on the thread count");
    Ok(format!("{} specs byte-identical (sequential, parallel, 1 vs 3 threads)", names.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("spherical indicial roots with brute-force oracle", spherical_roots),
        ("cylinder family and line scan", cylinder_family),
        ("conjugation covariance", conjugation),
        ("normal operator homomorphism", homomorphism),
        ("Kondratiev transform equivalence", kondratiev),
        ("c_gamma rewrite", cgamma),
        ("bracket tables", brackets),
        ("sc criterion stable across grids", sc_stability),
        ("spherical safe weights", safe_weights),
        ("independent oracle agreement", oracle),
        ("deterministic JSON reports", determinism),
    ];
    let previous = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} ({detail})", i + 1);
            }
        }
    }
    std::panic::set_hook(previous);
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
