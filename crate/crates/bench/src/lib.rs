//! Seeded inputs shared by the benchmarks.

use hilmod::free_prob::SandwichCovariance;
use hilmod::preserver::{BlackBoxPreserver, PreserverKind, StructuredPreserver};
use hilmod::sample::Sampler;
use hilmod::OperatorMatrix;

pub fn covariance(seed: u64, d: usize, n: usize) -> SandwichCovariance {
    let mut s = Sampler::new(seed);
    SandwichCovariance::new(s.invertible_operator(d, n), s.invertible_operator(d, n)).expect("shapes agree")
}

pub fn coefficients(seed: u64, count: usize, d: usize, n: usize) -> Vec<OperatorMatrix> {
    let mut s = Sampler::new(seed);
    (0..count).map(|_| s.operator(d, n)).collect()
}

pub fn preserver_images(seed: u64, kind: PreserverKind, d: usize, n: usize) -> BlackBoxPreserver {
    let mut s = Sampler::new(seed);
    let p = StructuredPreserver::new(kind, s.invertible_operator(d, n), s.invertible_operator(d, n)).expect("shapes agree");
    p.to_black_box()
}
