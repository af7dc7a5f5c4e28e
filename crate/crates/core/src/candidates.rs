//! Candidate clearing prices.
//!
//! An optimal price always sits at the intersection of `n` linearly
//! independent indifference hyperplanes. [`generate_candidate`] walks a bid
//! tuple and a permutation of the goods and, if the walk stays feasible,
//! lands on one such intersection. [`filtered_prices`] runs it over every
//! bid tuple and every permutation, skipping whole blocks of permutations
//! once a prefix is known to be infeasible.

use rayon::prelude::*;

use crate::linalg;
use crate::model::{AuctionInstance, Bid, PriceVector};
use crate::permutations::{factorial, PrefixSkipPermutations};
use crate::scalar::Scalar;

/// Bid `bid` (index into the instance) indifferent between goods `goods.0`
/// and `goods.1` (`0` is the dummy good, `goods.0 < goods.1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndifferencePair {
    pub bid: usize,
    pub goods: (usize, usize),
}

impl IndifferencePair {
    pub fn new(bid: usize, i: usize, j: usize) -> Self {
        assert_ne!(i, j, "an indifference pair needs two distinct goods");
        IndifferencePair {
            bid,
            goods: (i.min(j), i.max(j)),
        }
    }

    pub fn contains<S: Scalar>(&self, instance: &AuctionInstance<S>, p: &PriceVector<S>) -> bool {
        hyperplane_contains(
            &instance.bids()[self.bid],
            self.goods,
            p,
            instance.tolerance(),
        )
    }

    /// The defining equation `b_i p_j - b_j p_i = 0` as a row over
    /// `p_1..p_n` and a right-hand side, with `p_0 = 1` moved to the right.
    pub fn equation<S: Scalar>(&self, bid: &Bid<S>) -> (Vec<S>, S) {
        let (i, j) = self.goods;
        let mut row = vec![S::zero(); bid.goods()];
        let mut rhs = S::zero();
        // + b_i p_j
        if j == 0 {
            rhs = rhs - bid.value(i);
        } else {
            row[j - 1] = row[j - 1].clone() + bid.value(i);
        }
        // - b_j p_i
        if i == 0 {
            rhs = rhs + bid.value(j);
        } else {
            row[i - 1] = row[i - 1].clone() - bid.value(j);
        }
        (row, rhs)
    }
}

/// `p` lies in `H(b, {i, j})`: the bid is indifferent between `i` and `j`
/// and weakly prefers them to every other good.
pub fn hyperplane_contains<S: Scalar>(
    bid: &Bid<S>,
    goods: (usize, usize),
    p: &PriceVector<S>,
    tol: f64,
) -> bool {
    let (i, j) = goods;
    let (bi, bj) = (bid.value(i), bid.value(j));
    let (pi, pj) = (p.get(i), p.get(j));
    if !(bi.clone() * pj).approx_eq(&(bj * pi.clone()), tol) {
        return false;
    }
    (0..=bid.goods()).all(|k| (bi.clone() * p.get(k)).approx_ge(&(bid.value(k) * pi.clone()), tol))
}

/// The candidate walk stopped at 1-based step `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InfeasibleAt(pub usize);

/// A price returned by [`generate_candidate`] with the hyperplanes it was
/// built on: for step `k`, tuple position `k - 1` is indifferent between
/// `anchors[k - 1]` and `sigma(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedPrice<S> {
    pub price: PriceVector<S>,
    pub anchors: Vec<usize>,
}

/// State visible at the start of step `k` of [`generate_candidate_traced`].
pub struct StepView<'a, S> {
    pub k: usize,
    /// `factors[l]` is the running factor `C^l_k` for `l` in `k..=n`.
    pub factors: &'a [S],
    /// Prices indexed `0..=n`; zero where not yet set, `prices[0] = 1`.
    pub prices: &'a [S],
}

/// Runs the candidate walk for the bid tuple `bids` and permutation
/// `sigma` (images in `1..=n`, `sigma[k - 1] = sigma(k)`).
pub fn generate_candidate<S: Scalar>(
    bids: &[&Bid<S>],
    sigma: &[usize],
    tol: f64,
) -> Result<GeneratedPrice<S>, InfeasibleAt> {
    generate_candidate_traced(bids, sigma, tol, |_| {})
}

/// [`generate_candidate`] with a callback observing every step.
pub fn generate_candidate_traced<S: Scalar>(
    bids: &[&Bid<S>],
    sigma: &[usize],
    tol: f64,
    mut observe: impl FnMut(StepView<'_, S>),
) -> Result<GeneratedPrice<S>, InfeasibleAt> {
    let n = sigma.len();
    assert_eq!(bids.len(), n, "one bid per good");
    let mut prices = vec![S::zero(); n + 1];
    prices[0] = S::one();
    let mut factors = vec![S::one(); n + 1];
    let mut anchors = vec![0usize; n + 1];

    for k in 1..=n {
        observe(StepView {
            k,
            factors: &factors,
            prices: &prices,
        });
        let good = sigma[k - 1];
        let price = factors[k].clone() * bids[k - 1].value(good);
        // Earlier bids must still weakly prefer their own good to this one.
        for m in 1..k {
            let (bid, own) = (bids[m - 1], sigma[m - 1]);
            if (bid.value(own) * price.clone())
                .approx_lt(&(bid.value(good) * prices[own].clone()), tol)
            {
                return Err(InfeasibleAt(k));
            }
        }
        if !price.gt_zero() {
            return Err(InfeasibleAt(k));
        }
        for l in k + 1..=n {
            let value = bids[l - 1].value(good);
            // price < C * b  <=>  price / b < C, without dividing by b = 0
            if price < factors[l].clone() * value.clone() {
                factors[l] = price.clone() / value;
                anchors[l] = good;
            }
        }
        prices[good] = price;
    }
    prices.remove(0);
    Ok(GeneratedPrice {
        price: PriceVector::new(prices).expect("every step produced a positive price"),
        anchors: anchors[1..].to_vec(),
    })
}

/// Closed form of the running factor:
/// `C^l_k = min_{m = 0..k-1} p_{sigma(m)} / b^l_{sigma(m)}` with
/// `sigma(0) = 0`; zero denominators count as +inf.
pub fn factor_values_reference<S: Scalar>(
    bids: &[&Bid<S>],
    sigma: &[usize],
    k: usize,
    l: usize,
    prices: &[S],
) -> S {
    assert!(1 <= k && k <= l && l <= sigma.len());
    let bid = bids[l - 1];
    (0..k)
        .map(|m| if m == 0 { 0 } else { sigma[m - 1] })
        .filter(|&good| !bid.value(good).is_zero())
        .map(|good| prices[good].clone() / bid.value(good))
        .fold(None, |best: Option<S>, v| match best {
            Some(b) if b <= v => Some(b),
            _ => Some(v),
        })
        .expect("the dummy term is always present")
}

/// Which bid tuple and permutation produced a candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Instance bid indices, one per step.
    pub bids: Vec<usize>,
    pub sigma: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRecord<S> {
    pub price: PriceVector<S>,
    pub witness: Witness,
    /// The `n` hyperplanes the price lies on.
    pub hyperplanes: Vec<IndifferencePair>,
}

impl<S: Scalar> CandidateRecord<S> {
    /// Every recorded hyperplane contains the price and their equations
    /// have full rank.
    pub fn verify(&self, instance: &AuctionInstance<S>) -> bool {
        let on_all = self
            .hyperplanes
            .iter()
            .all(|h| h.contains(instance, &self.price));
        let rows: Vec<Vec<S>> = self
            .hyperplanes
            .iter()
            .map(|h| h.equation(&instance.bids()[h.bid]).0)
            .collect();
        on_all && linalg::rank(&rows, instance.tolerance()) == instance.goods()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnumerationStats {
    /// `|B|^n * n!`
    pub total_combinations: u128,
    /// Calls to the candidate walk.
    pub calls: u128,
    /// Permutations pruned without a call.
    pub skipped: u128,
    pub infeasible: u128,
    pub raw_candidates: u128,
    pub unique_candidates: u128,
}

impl EnumerationStats {
    fn merge(&mut self, other: &EnumerationStats) {
        self.calls += other.calls;
        self.skipped += other.skipped;
        self.infeasible += other.infeasible;
        self.raw_candidates += other.raw_candidates;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet<S> {
    /// Distinct prices sorted lexicographically, first witness kept.
    pub records: Vec<CandidateRecord<S>>,
    pub stats: EnumerationStats,
}

impl<S: Scalar> CandidateSet<S> {
    pub fn prices(&self) -> Vec<PriceVector<S>> {
        self.records.iter().map(|r| r.price.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterOptions {
    /// Skip permutations sharing an infeasible prefix.
    pub prune: bool,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions { prune: true }
    }
}

/// Candidate prices of an instance with prefix pruning enabled.
pub fn filtered_prices<S: Scalar>(instance: &AuctionInstance<S>) -> CandidateSet<S> {
    filtered_prices_with(instance, FilterOptions::default())
}

pub fn filtered_prices_with<S: Scalar>(
    instance: &AuctionInstance<S>,
    options: FilterOptions,
) -> CandidateSet<S> {
    let n = instance.goods();
    let bid_count = instance.bids().len();
    let tuples = (bid_count as u128).pow(n as u32);
    let tol = instance.tolerance();

    let per_tuple: Vec<(Vec<CandidateRecord<S>>, EnumerationStats)> = (0..tuples as u64)
        .into_par_iter()
        .map(|code| {
            let tuple = decode_tuple(code, bid_count, n);
            enumerate_tuple(instance, &tuple, options, tol)
        })
        .collect();

    let mut stats = EnumerationStats {
        total_combinations: tuples * factorial(n) as u128,
        ..Default::default()
    };
    let mut records: Vec<CandidateRecord<S>> = Vec::new();
    for (found, tuple_stats) in per_tuple {
        stats.merge(&tuple_stats);
        for record in found {
            if !records
                .iter()
                .any(|r| r.price.approx_eq(&record.price, tol))
            {
                records.push(record);
            }
        }
    }
    records.sort_by(|a, b| a.price.lex_cmp(&b.price, tol));
    stats.unique_candidates = records.len() as u128;
    CandidateSet { records, stats }
}

/// Mixed-radix decoding; position 0 varies slowest so tuples come out in
/// lexicographic order.
fn decode_tuple(mut code: u64, base: usize, len: usize) -> Vec<usize> {
    let mut tuple = vec![0; len];
    for slot in tuple.iter_mut().rev() {
        *slot = (code % base as u64) as usize;
        code /= base as u64;
    }
    tuple
}

fn enumerate_tuple<S: Scalar>(
    instance: &AuctionInstance<S>,
    tuple: &[usize],
    options: FilterOptions,
    tol: f64,
) -> (Vec<CandidateRecord<S>>, EnumerationStats) {
    let bids: Vec<&Bid<S>> = tuple.iter().map(|&i| &instance.bids()[i]).collect();
    let mut stats = EnumerationStats::default();
    let mut found = Vec::new();
    let mut perms = PrefixSkipPermutations::new(tuple.len());
    while let Some(sigma) = perms.next() {
        let sigma = sigma.to_vec();
        stats.calls += 1;
        match generate_candidate(&bids, &sigma, tol) {
            Ok(generated) => {
                stats.raw_candidates += 1;
                let hyperplanes = generated
                    .anchors
                    .iter()
                    .zip(&sigma)
                    .zip(tuple)
                    .map(|((&anchor, &good), &bid)| IndifferencePair::new(bid, anchor, good))
                    .collect();
                found.push(CandidateRecord {
                    price: generated.price,
                    witness: Witness {
                        bids: tuple.to_vec(),
                        sigma,
                    },
                    hyperplanes,
                });
            }
            Err(InfeasibleAt(k)) => {
                stats.infeasible += 1;
                if options.prune {
                    stats.skipped += (perms.skip_prefix(k) - 1) as u128;
                }
            }
        }
    }
    (found, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CostFunction;
    use crate::scalar::{ratio, Rational};

    fn r(n: i64) -> Rational {
        ratio(n, 1)
    }

    fn bid(values: &[i64]) -> Bid<Rational> {
        Bid::new("b", values.iter().map(|&v| r(v)).collect(), r(1))
    }

    fn price(values: &[Rational]) -> PriceVector<Rational> {
        PriceVector::new(values.to_vec()).unwrap()
    }

    fn instance(bids: &[&[i64]]) -> AuctionInstance<Rational> {
        let n = bids[0].len();
        let bids = bids
            .iter()
            .enumerate()
            .map(|(k, v)| Bid::new(format!("b{k}"), v.iter().map(|&x| r(x)).collect(), r(10)))
            .collect();
        AuctionInstance::exact(n, bids, CostFunction::free(n, r(100))).unwrap()
    }

    #[test]
    fn hyperplane_membership_examples() {
        let b = bid(&[2, 3]);
        assert!(hyperplane_contains(&b, (1, 2), &price(&[r(2), r(3)]), 0.0));
        assert!(!hyperplane_contains(&b, (1, 2), &price(&[r(4), r(6)]), 0.0));
        assert!(hyperplane_contains(
            &b,
            (0, 2),
            &price(&[ratio(15, 4), r(3)]),
            0.0
        ));
    }

    #[test]
    fn equation_moves_dummy_to_rhs() {
        let b = bid(&[2, 3]);
        // 1 * p_2 - 3 * p_0 = 0  ->  p_2 = 3
        assert_eq!(
            IndifferencePair::new(0, 0, 2).equation(&b),
            (vec![r(0), r(1)], r(3))
        );
        // 2 p_2 - 3 p_1 = 0
        assert_eq!(
            IndifferencePair::new(0, 1, 2).equation(&b),
            (vec![r(-3), r(2)], r(0))
        );
    }

    #[test]
    fn generate_candidate_traces() {
        let (a, b) = (bid(&[2, 3]), bid(&[5, 4]));
        assert_eq!(
            generate_candidate(&[&a, &b], &[1, 2], 0.0),
            Err(InfeasibleAt(2))
        );
        let swapped = generate_candidate(&[&a, &b], &[2, 1], 0.0).unwrap();
        assert_eq!(swapped.price, price(&[ratio(15, 4), r(3)]));
        assert_eq!(swapped.anchors, vec![0, 2]);
        let same = generate_candidate(&[&a, &a], &[1, 2], 0.0).unwrap();
        assert_eq!(same.price, price(&[r(2), r(3)]));
    }

    #[test]
    fn zero_value_makes_step_infeasible() {
        let a = bid(&[0, 3]);
        assert_eq!(
            generate_candidate(&[&a, &a], &[1, 2], 0.0),
            Err(InfeasibleAt(1))
        );
    }

    #[test]
    fn factor_reference_examples() {
        let (a, b) = (bid(&[2, 3]), bid(&[5, 4]));
        let sigma = [2, 1];
        let prices = vec![r(1), r(0), r(3)];
        assert_eq!(
            factor_values_reference(&[&a, &b], &sigma, 1, 2, &prices),
            r(1)
        );
        assert_eq!(
            factor_values_reference(&[&a, &b], &sigma, 2, 2, &prices),
            ratio(3, 4)
        );
        let prices = vec![r(1), r(2), r(0)];
        assert_eq!(
            factor_values_reference(&[&a, &a], &[1, 2], 2, 2, &prices),
            r(1)
        );
    }

    #[test]
    fn two_bid_candidates() {
        let set = filtered_prices(&instance(&[&[2, 3], &[5, 4]]));
        assert_eq!(
            set.prices(),
            vec![
                price(&[r(2), r(3)]),
                price(&[ratio(15, 4), r(3)]),
                price(&[r(5), r(4)])
            ]
        );
        assert_eq!(set.stats.total_combinations, 8);
        assert_eq!(set.stats.calls + set.stats.skipped, 8);
        let inst = instance(&[&[2, 3], &[5, 4]]);
        assert!(set.records.iter().all(|rec| rec.verify(&inst)));
    }

    #[test]
    fn single_bid_candidates() {
        assert_eq!(
            filtered_prices(&instance(&[&[2, 3]])).prices(),
            vec![price(&[r(2), r(3)])]
        );
        assert_eq!(
            filtered_prices(&instance(&[&[5]])).prices(),
            vec![price(&[r(5)])]
        );
    }

    #[test]
    fn pruning_only_removes_calls() {
        let inst = instance(&[&[2, 3, 1], &[5, 4, 0], &[1, 1, 6]]);
        let pruned = filtered_prices(&inst);
        let full = filtered_prices_with(&inst, FilterOptions { prune: false });
        assert_eq!(pruned.prices(), full.prices());
        assert_eq!(full.stats.calls, full.stats.total_combinations);
        assert!(pruned.stats.calls < full.stats.calls);
        assert_eq!(
            pruned.stats.calls + pruned.stats.skipped,
            pruned.stats.total_combinations
        );
    }

    #[test]
    fn float_mode_matches_rational() {
        let inst = instance(&[&[2, 3], &[5, 4], &[1, 6]]);
        let exact = filtered_prices(&inst).prices();
        let float = filtered_prices(&inst.convert::<f64>()).prices();
        assert_eq!(exact.len(), float.len());
        for (e, f) in exact.iter().zip(&float) {
            assert!(e.convert::<f64>().approx_eq(f, 1e-9));
        }
    }
}
