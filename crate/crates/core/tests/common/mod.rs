#![allow(dead_code)]

use fredholm_core::crosssec::CrossSection;
use fredholm_core::liestruct::StructureKind;
use fredholm_core::opalg::{BoundaryOperator, Coefficient, MultiIndex};
use fredholm_core::poly::C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn small_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

/// Random scalar operator of order at most 2 on the circle, with
/// coefficients polynomial in `r` (degree <= 2).
pub fn random_circle_operator(kind: StructureKind, rng: &mut ChaCha8Rng) -> BoundaryOperator {
    let mut op = BoundaryOperator::new(kind, CrossSection::circle(), 1).unwrap();
    let monomials = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)];
    for (a, b) in monomials {
        if rng.gen_bool(0.3) {
            continue;
        }
        let terms = (0..rng.gen_range(1..=2))
            .map(|_| {
                let nu = f64::from(rng.gen_range(0..=2u32));
                (nu, nalgebra::DMatrix::from_element(1, 1, small_complex(rng)))
            })
            .collect();
        op.add_term(MultiIndex::new(a, vec![b], 0), Coefficient::from_terms(1, terms).unwrap())
            .unwrap();
    }
    if op.terms().is_empty() {
        op.add_scalar(MultiIndex::radial(1, 1), 0.0, C64::new(1.0, 0.0)).unwrap();
    }
    op
}

/// Gaussian-enveloped band-limited profile in `t = log r`.
pub fn wave_packet(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> C64 {
    let center = rng.gen_range(-3.0..-1.0);
    let width = rng.gen_range(0.8..1.2);
    let freqs: Vec<(f64, C64)> = (0..3)
        .map(|_| (rng.gen_range(0.0..3.0), small_complex(rng)))
        .collect();
    move |t: f64| {
        let env = (-(t - center) * (t - center) / (2.0 * width * width)).exp();
        freqs
            .iter()
            .map(|(w, a)| a * C64::new(0.0, w * t).exp())
            .sum::<C64>()
            * env
    }
}

pub fn max_norm<'a>(it: impl Iterator<Item = &'a C64>) -> f64 {
    it.map(|z| z.norm()).fold(0.0, f64::max)
}
