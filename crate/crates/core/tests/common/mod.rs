//! Seeded instance generators shared by the integration tests.
#![allow(dead_code)]

use pmx::model::{AuctionInstance, Bid, CostFunction, SupplyCurve, SupplyStep};
use pmx::scalar::{ratio, Rational};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Rational {
    ratio(n, 1)
}

/// Bid values on the integer grid `0..=max_value`; every good gets at least
/// one positive value.
pub fn grid_bids(
    rng: &mut ChaCha8Rng,
    goods: usize,
    count: usize,
    max_value: i64,
) -> Vec<Bid<Rational>> {
    let mut values: Vec<Vec<i64>> = (0..count)
        .map(|_| (0..goods).map(|_| rng.gen_range(0..=max_value)).collect())
        .collect();
    for good in 0..goods {
        if values.iter().all(|v| v[good] == 0) {
            let b = rng.gen_range(0..count);
            values[b][good] = rng.gen_range(1..=max_value);
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            let budget = q(rng.gen_range(1..=10));
            Bid::new(format!("b{k}"), v.into_iter().map(q).collect(), budget)
        })
        .collect()
}

/// One or two steps with small nonnegative increasing marginals.
pub fn random_curve(rng: &mut ChaCha8Rng, max_steps: usize) -> SupplyCurve<Rational> {
    let steps = rng.gen_range(1..=max_steps);
    let mut until = 0i64;
    let mut marginal = 0i64;
    let mut out = Vec::new();
    for s in 0..steps {
        until += rng.gen_range(1..=6);
        if s > 0 || rng.gen_bool(0.5) {
            marginal += rng.gen_range(0..=2);
        }
        out.push(SupplyStep {
            until: q(until),
            marginal: q(marginal),
        });
    }
    SupplyCurve::new(out)
}

pub fn random_instance(
    seed: u64,
    goods: usize,
    max_bids: usize,
    max_value: i64,
    max_steps: usize,
) -> AuctionInstance<Rational> {
    let mut rng = rng(seed);
    let count = rng.gen_range(1..=max_bids);
    let bids = grid_bids(&mut rng, goods, count, max_value);
    let cost = CostFunction::new(
        (0..goods)
            .map(|_| random_curve(&mut rng, max_steps))
            .collect(),
    );
    AuctionInstance::exact(goods, bids, cost).expect("generated instance is valid")
}

/// The seeded corpus used by the candidate-set suites: goods cycle through
/// 1, 2, 3 and bid counts through 1..=4.
pub fn oracle_corpus(size: usize) -> Vec<AuctionInstance<Rational>> {
    (0..size as u64)
        .map(|seed| random_instance(1000 + seed, 1 + (seed as usize % 3), 4, 6, 2))
        .collect()
}

pub fn two_bid_instance() -> AuctionInstance<Rational> {
    let bids = vec![
        Bid::new("a", vec![q(2), q(3)], q(10)),
        Bid::new("b", vec![q(5), q(4)], q(20)),
    ];
    AuctionInstance::exact(2, bids, CostFunction::free(2, q(100))).unwrap()
}
