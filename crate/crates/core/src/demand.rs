//! Budget-constrained demand.
//!
//! A bid demands good `i` at prices `p` when `b_i / p_i` is maximal over
//! `0..=n`. The demand set is the simplex spanned by the full-budget
//! single-good bundles `(beta / p_i) e_i` of the demanded goods (the zero
//! bundle for the dummy good). Everything here is division-free where it
//! matters for exactness: `i` is demanded iff `b_i p_j >= b_j p_i` for all `j`.

use crate::model::{AuctionInstance, Bid, Bundle, PriceVector};
use crate::scalar::Scalar;

/// Goods (including dummy `0`) a bid demands at some price, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandedGoods(Vec<usize>);

impl DemandedGoods {
    pub fn contains(&self, good: usize) -> bool {
        self.0.binary_search(&good).is_ok()
    }

    pub fn goods(&self) -> &[usize] {
        &self.0
    }

    pub fn includes_dummy(&self) -> bool {
        self.contains(0)
    }

    /// Demanded goods excluding the dummy.
    pub fn real_goods(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied().filter(|&g| g != 0)
    }

    pub fn is_superset_of(&self, other: &DemandedGoods) -> bool {
        other.0.iter().all(|&g| self.contains(g))
    }
}

/// `true` when `b_i p_j >= b_j p_i` for every `j` in `0..=n`.
pub fn prefers_weakly<S: Scalar>(bid: &Bid<S>, p: &PriceVector<S>, i: usize, tol: f64) -> bool {
    let (bi, pi) = (bid.value(i), p.get(i));
    (0..=bid.goods()).all(|j| (bi.clone() * p.get(j)).approx_ge(&(bid.value(j) * pi.clone()), tol))
}

pub fn demanded_goods<S: Scalar>(bid: &Bid<S>, p: &PriceVector<S>, tol: f64) -> DemandedGoods {
    DemandedGoods(
        (0..=bid.goods())
            .filter(|&i| prefers_weakly(bid, p, i, tol))
            .collect(),
    )
}

/// Full-budget bundle `(beta / p_i) e_i`; the zero bundle for `i = 0`.
pub fn vertex<S: Scalar>(bid: &Bid<S>, p: &PriceVector<S>, i: usize) -> Bundle<S> {
    let mut x = Bundle::zero(bid.goods());
    if i > 0 {
        x.0[i - 1] = bid.budget().clone() / p.get(i);
    }
    x
}

/// Vertices of the demand set, one per demanded good in increasing order.
pub fn demand_vertices<S: Scalar>(bid: &Bid<S>, p: &PriceVector<S>, tol: f64) -> Vec<Bundle<S>> {
    demanded_goods(bid, p, tol)
        .goods()
        .iter()
        .map(|&i| vertex(bid, p, i))
        .collect()
}

/// Membership in the demand set via the convex weights `x_i p_i / beta`:
/// no mass on undemanded goods, weights summing to at most one, and exactly
/// one when the dummy good is not demanded.
pub fn in_demand_set<S: Scalar>(bid: &Bid<S>, p: &PriceVector<S>, x: &Bundle<S>, tol: f64) -> bool {
    if x.as_slice().iter().any(|xi| xi.approx_lt(&S::zero(), tol)) {
        return false;
    }
    let demanded = demanded_goods(bid, p, tol);
    let off_support =
        (1..=bid.goods()).any(|j| !demanded.contains(j) && !x.get(j).approx_zero(tol));
    if off_support {
        return false;
    }
    let spend = x.cost_at(p);
    let budget = bid.budget();
    if demanded.includes_dummy() {
        spend.approx_le(budget, tol)
    } else {
        spend.approx_eq(budget, tol)
    }
}

/// `<b - p, x>`
pub fn utility<S: Scalar>(bid: &Bid<S>, p: &PriceVector<S>, x: &Bundle<S>) -> S {
    (1..=bid.goods()).fold(S::zero(), |acc, i| {
        acc + (bid.value(i) - p.get(i)) * x.get(i)
    })
}

/// Best utility from spending the whole budget on a single good, dummy
/// included: `max_i (beta / p_i)(b_i - p_i)`. Never negative.
pub fn max_single_good_utility<S: Scalar>(bid: &Bid<S>, p: &PriceVector<S>) -> S {
    (1..=bid.goods())
        .map(|i| bid.budget().clone() / p.get(i) * (bid.value(i) - p.get(i)))
        .fold(S::zero(), |best, u| if u > best { u } else { best })
}

/// Lowers the prices of goods nobody demands until every good is demanded
/// by some bid. Each lift sets
/// `p_k = max_b max_{i in G_b(p)} (b_k / b_i) p_i`, which keeps every
/// previously demanded good demanded and ties good `k` with at least one of
/// them. Undemanded goods are processed in increasing index order.
pub fn saturate_prices<S: Scalar>(
    instance: &AuctionInstance<S>,
    start: &PriceVector<S>,
) -> PriceVector<S> {
    let tol = instance.tolerance();
    let n = instance.goods();
    let mut prices = start.as_slice().to_vec();
    for _ in 0..n {
        let current = PriceVector::new(prices.clone()).expect("prices stay positive");
        let demand: Vec<DemandedGoods> = instance
            .bids()
            .iter()
            .map(|b| demanded_goods(b, &current, tol))
            .collect();
        let Some(k) = (1..=n).find(|&k| !demand.iter().any(|g| g.contains(k))) else {
            return current;
        };
        let mut lifted: Option<S> = None;
        for (bid, goods) in instance.bids().iter().zip(&demand) {
            for &i in goods.goods() {
                let bi = bid.value(i);
                if bi.is_zero() {
                    continue;
                }
                let candidate = bid.value(k) * current.get(i) / bi;
                if lifted.as_ref().is_none_or(|best| candidate > *best) {
                    lifted = Some(candidate);
                }
            }
        }
        match lifted {
            Some(value) if value.gt_zero() => prices[k - 1] = value,
            // Only reachable on unvalidated instances where nobody values k.
            _ => return current,
        }
    }
    PriceVector::new(prices).expect("prices stay positive")
}
