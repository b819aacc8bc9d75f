mod common;

use common::{random_circle_operator, rng};
use fredholm_core::crosssec::{fourier_basis, CrossSection};
use fredholm_core::fredholm::{indicial_roots, IndicialRoot};
use fredholm_core::limitops::{indicial_family, indicial_family_on, normal_operator, IndicialFamily};
use fredholm_core::liestruct::StructureKind;
use fredholm_core::numoracle::brute_roots;
use fredholm_core::opalg::{make_model, BoundaryOperator, Model, MultiIndex};
use fredholm_core::poly::{c, C64};
use fredholm_core::Execution;

const SEQ: Execution = Execution::Sequential;

fn family(op: &BoundaryOperator, cutoff: f64) -> IndicialFamily {
    indicial_family(&normal_operator(op).unwrap(), cutoff, SEQ).unwrap()
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

#[test]
fn normal_operator_and_family_are_multiplicative() {
    let mut r = rng(2024);
    let modes = fourier_basis(&CrossSection::circle(), 9.0);
    for _ in 0..20 {
        let p = random_circle_operator(StructureKind::B, &mut r);
        let q = random_circle_operator(StructureKind::B, &mut r);
        let pq = p.compose(&q).unwrap();
        let (np, nq, npq) = (normal_operator(&p).unwrap(), normal_operator(&q).unwrap(), normal_operator(&pq).unwrap());
        let product = np.base().compose(nq.base()).unwrap();
        assert!(npq.base().approx_eq(&product, 1e-12), "N(PQ) = {}\nN(P)N(Q) = {product}", npq.base());

        let fp = indicial_family_on(&np, &modes, 9.0, SEQ).unwrap();
        let fq = indicial_family_on(&nq, &modes, 9.0, SEQ).unwrap();
        let fpq = indicial_family_on(&npq, &modes, 9.0, SEQ).unwrap();
        for m in 0..modes.len() {
            let want = fp.modes[m].poly.mul(&fq.modes[m].poly);
            assert!(fpq.modes[m].poly.approx_eq(&want, 1e-12), "mode {}", modes[m].label());
        }
    }
}

#[test]
fn conjugation_shifts_the_family() {
    for p in b_models() {
        let cutoff = if p.cross_section().is_finite() { 1.0 } else { 30.0 };
        for delta in [-0.5, 0.3, 1.0] {
            let lhs = family(&p.conjugate(delta).unwrap(), cutoff);
            let rhs = family(&p, cutoff).shifted(C64::new(0.0, -delta));
            assert!(lhs.approx_eq(&rhs, 1e-12), "{p} at δ = {delta}");
        }
    }
}

#[test]
fn real_operators_have_conjugate_root_pairs() {
    let mut r = rng(7);
    for _ in 0..10 {
        let mut p = random_circle_operator(StructureKind::B, &mut r);
        // keep only even circle powers with real coefficients
        let mut real = BoundaryOperator::new(StructureKind::B, CrossSection::circle(), 1).unwrap();
        for (alpha, coeff) in p.terms().clone() {
            if alpha.cross[0] % 2 == 0 {
                let v = coeff.at_zero()[(0, 0)].re;
                real.add_scalar(alpha, 0.0, c(v)).unwrap();
            }
        }
        real.add_scalar(MultiIndex::radial(2, 1), 0.0, c(1.0)).unwrap();
        p = real;
        let roots = indicial_roots(&family(&p, 16.0), SEQ).unwrap();
        for root in &roots {
            let partner = roots
                .iter()
                .filter(|s| s.mode_id == root.mode_id)
                .any(|s| (s.mellin - root.mellin.conj()).norm() < 1e-8 * root.mellin.norm().max(1.0));
            assert!(partner, "{p}: no partner for {}", root.mellin);
        }
    }
}

fn mode_count(roots: &[IndicialRoot], id: usize) -> usize {
    roots.iter().filter(|r| r.mode_id == id).map(|r| r.multiplicity).sum()
}

#[test]
fn every_mode_carries_a_full_set_of_roots() {
    for p in b_models() {
        let cutoff = if p.cross_section().is_finite() { 1.0 } else { 40.0 };
        let f = family(&p, cutoff);
        let roots = indicial_roots(&f, SEQ).unwrap();
        for mf in &f.modes {
            let det = mf.mellin().det().unwrap();
            assert_eq!(mode_count(&roots, mf.mode.id), det.degree().unwrap(), "{p} on {}", mf.mode.label());
        }
    }
}

#[test]
fn raising_the_cutoff_only_adds_modes() {
    for p in b_models().into_iter().filter(|p| !p.cross_section().is_finite()) {
        let low = indicial_roots(&family(&p, 20.0), SEQ).unwrap();
        let high = indicial_roots(&family(&p, 45.0), SEQ).unwrap();
        assert!(high.len() > low.len());
        for root in &low {
            assert!(
                high.iter().any(|h| h.mode_id == root.mode_id && (h.mellin - root.mellin).norm() < 1e-12),
                "{p}: {} moved",
                root.mellin
            );
        }
    }
}

#[test]
fn spherical_roots_match_the_closed_form() {
    for n in [2usize, 3, 4] {
        let p = make_model(&Model::SphericalSchrodinger { n, z: C64::new(0.7, -0.2) }).unwrap();
        let top = 10.0 * (10.0 + n as f64 - 2.0);
        let f = family(&p, top + 0.5);
        let roots = indicial_roots(&f, SEQ).unwrap();
        assert_eq!(f.modes.len(), 11, "n = {n}");
        for (l, mf) in f.modes.iter().enumerate() {
            let l = l as f64;
            let mut want = [l, -(l + n as f64 - 2.0)];
            want.sort_by(f64::total_cmp);
            let mut got: Vec<f64> = roots
                .iter()
                .filter(|r| r.mode_id == mf.mode.id)
                .flat_map(|r| std::iter::repeat(r.mellin.re).take(r.multiplicity))
                .collect();
            got.sort_by(f64::total_cmp);
            assert_eq!(got.len(), 2);
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-9, "n = {n}, l = {l}: {g} vs {w}");
            }
            let brute = brute_roots(&mf.mellin().det().unwrap()).unwrap();
            for b in &brute {
                assert!(want.iter().any(|w| (b.value - c(*w)).norm() < 1e-7), "n = {n}, l = {l}: {}", b.value);
            }
        }
    }
}
