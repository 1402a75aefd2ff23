//! Seeded sampling of coordinate boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::DomainBox;

/// How many points to draw and from which seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(count: usize, seed: u64) -> SampleSpec {
        SampleSpec { count, seed }
    }
}

/// Uniform points in the interior of `b`. Every axis must be finite.
/// Points are kept a relative margin of 1e-9 away from the faces.
pub fn sample_box(b: &DomainBox, spec: SampleSpec) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count)
        .map(|_| {
            b.axes
                .iter()
                .map(|a| {
                    assert!(a.lo.is_finite() && a.hi.is_finite(), "sampling box must be finite");
                    let w = a.hi - a.lo;
                    let t: f64 = rng.random();
                    a.lo + w * (1e-9 + (1.0 - 2e-9) * t)
                })
                .collect()
        })
        .collect()
}

/// Random unit vectors (Euclidean) in dimension `dim`.
pub fn random_directions(dim: usize, count: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    use rand_distr::{Distribution, StandardNormal};
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-8 {
                break v.into_iter().map(|x| x / n).collect();
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Interval;

    #[test]
    fn sampling_is_seeded_and_inside() {
        let b = DomainBox::new(vec![Interval::new(-1.0, 2.0), Interval::new(0.0, 1e-3)]);
        let a = sample_box(&b, SampleSpec::new(50, 7));
        assert_eq!(a, sample_box(&b, SampleSpec::new(50, 7)));
        assert_ne!(a, sample_box(&b, SampleSpec::new(50, 8)));
        assert!(a.iter().all(|p| b.contains(p)));
    }
}
