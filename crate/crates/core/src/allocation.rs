//! Revenue at a fixed price and the overall clearing problem.
//!
//! At fixed prices the revenue-maximizing envy-free allocation is a linear
//! program once supply costs are step curves: the cost of each good is the
//! maximum of affine pieces (an epigraph variable per good), and a bundle is
//! in a bidder's demand set exactly when it is budget-feasible and achieves
//! the best single-good utility.

use rayon::prelude::*;

use crate::candidates::{filtered_prices, CandidateSet};
use crate::demand::{in_demand_set, max_single_good_utility};
use crate::lp::{solve_lp, LinearProgram, LpError, Relation};
use crate::model::{AuctionInstance, Bundle, ModelError, PriceVector};
use crate::scalar::Scalar;

/// Column layout of the allocation program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllocationLayout {
    pub goods: usize,
    pub bids: usize,
}

impl AllocationLayout {
    /// Amount of good `good` (1-based) assigned to bid `bid`.
    pub fn bid_amount(&self, bid: usize, good: usize) -> usize {
        bid * self.goods + good - 1
    }

    /// Aggregate amount of good `good`.
    pub fn aggregate(&self, good: usize) -> usize {
        self.bids * self.goods + good - 1
    }

    /// Epigraph variable bounding the cost of good `good`.
    pub fn cost(&self, good: usize) -> usize {
        (self.bids + 1) * self.goods + good - 1
    }

    pub fn variables(&self) -> usize {
        (self.bids + 2) * self.goods
    }
}

/// Builds the fixed-price allocation program. Rows come in blocks:
/// aggregate definitions, capacities, cost epigraph pieces, demand
/// (utility) rows, budget rows.
pub fn build_allocation_lp<S: Scalar>(
    instance: &AuctionInstance<S>,
    p: &PriceVector<S>,
) -> (LinearProgram<S>, AllocationLayout) {
    let n = instance.goods();
    let layout = AllocationLayout {
        goods: n,
        bids: instance.bids().len(),
    };
    let mut lp = LinearProgram::new(layout.variables());

    for (b, _) in instance.bids().iter().enumerate() {
        for i in 1..=n {
            lp.objective[layout.bid_amount(b, i)] = p.get(i);
        }
    }
    for i in 1..=n {
        lp.objective[layout.cost(i)] = -S::one();
    }

    for i in 1..=n {
        let mut terms = vec![(layout.aggregate(i), S::one())];
        terms.extend((0..layout.bids).map(|b| (layout.bid_amount(b, i), -S::one())));
        lp.add(&terms, Relation::Eq, S::zero());
    }
    for i in 1..=n {
        lp.add(
            &[(layout.aggregate(i), S::one())],
            Relation::Le,
            instance.cost().curve(i).capacity(),
        );
    }
    for i in 1..=n {
        for (slope, intercept) in instance.cost().curve(i).affine_pieces() {
            lp.add(
                &[(layout.cost(i), S::one()), (layout.aggregate(i), -slope)],
                Relation::Ge,
                intercept,
            );
        }
    }
    for (b, bid) in instance.bids().iter().enumerate() {
        let terms: Vec<(usize, S)> = (1..=n)
            .map(|i| (layout.bid_amount(b, i), bid.value(i) - p.get(i)))
            .collect();
        lp.add(&terms, Relation::Ge, max_single_good_utility(bid, p));
    }
    for (b, bid) in instance.bids().iter().enumerate() {
        let terms: Vec<(usize, S)> = (1..=n)
            .map(|i| (layout.bid_amount(b, i), p.get(i)))
            .collect();
        lp.add(&terms, Relation::Le, bid.budget().clone());
    }
    (lp, layout)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BidAllocation<S> {
    pub id: String,
    pub bundle: Bundle<S>,
}

/// Prices, the envy-free allocation and the resulting seller revenue.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearingResult<S> {
    pub price: PriceVector<S>,
    pub allocation: Vec<BidAllocation<S>>,
    pub aggregate: Bundle<S>,
    /// Payments minus supply cost.
    pub revenue: S,
}

impl<S: Scalar> ClearingResult<S> {
    pub fn payments(&self) -> S {
        self.allocation
            .iter()
            .fold(S::zero(), |acc, a| acc + a.bundle.cost_at(&self.price))
    }

    /// Every bundle lies in its bidder's demand set.
    pub fn is_envy_free(&self, instance: &AuctionInstance<S>) -> bool {
        instance
            .bids()
            .iter()
            .zip(&self.allocation)
            .all(|(bid, a)| in_demand_set(bid, &self.price, &a.bundle, instance.tolerance()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AllocationError {
    /// No envy-free allocation fits within supply capacity, so the revenue
    /// at this price is minus infinity.
    #[error("no envy-free allocation fits within supply capacity")]
    NoEnvyFreeAllocation,
    #[error("allocation program failed: {0}")]
    Lp(LpError),
    #[error(transparent)]
    Price(#[from] ModelError),
    #[error("optimal allocation exceeds supply capacity")]
    CapacityExceeded,
}

/// Best revenue over envy-free allocations at the fixed price `p`.
pub fn revenue_at<S: Scalar>(
    instance: &AuctionInstance<S>,
    p: &PriceVector<S>,
) -> Result<ClearingResult<S>, AllocationError> {
    if p.goods() != instance.goods() {
        return Err(ModelError::PriceArity {
            expected: instance.goods(),
            found: p.goods(),
        }
        .into());
    }
    let tol = instance.tolerance();
    let (lp, layout) = build_allocation_lp(instance, p);
    let solution = solve_lp(&lp, tol).map_err(|e| match e {
        LpError::Infeasible => AllocationError::NoEnvyFreeAllocation,
        other => AllocationError::Lp(other),
    })?;
    let n = instance.goods();
    let allocation: Vec<BidAllocation<S>> = instance
        .bids()
        .iter()
        .enumerate()
        .map(|(b, bid)| BidAllocation {
            id: bid.id().to_string(),
            bundle: Bundle(
                (1..=n)
                    .map(|i| solution.values[layout.bid_amount(b, i)].clone())
                    .collect(),
            ),
        })
        .collect();
    let aggregate = Bundle(
        (1..=n)
            .map(|i| {
                allocation
                    .iter()
                    .fold(S::zero(), |acc, a| acc + a.bundle.get(i))
            })
            .collect(),
    );
    let cost = instance
        .cost()
        .value(&aggregate, tol)
        .ok_or(AllocationError::CapacityExceeded)?;
    let mut result = ClearingResult {
        price: p.clone(),
        allocation,
        aggregate,
        revenue: S::zero(),
    };
    result.revenue = result.payments() - cost;
    Ok(result)
}

/// Candidate set, the revenue at each candidate and the chosen optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionSolution<S> {
    pub best: ClearingResult<S>,
    pub candidates: CandidateSet<S>,
    /// Revenue at each candidate, in candidate order; `None` where no
    /// envy-free allocation exists.
    pub revenues: Vec<Option<S>>,
}

/// Evaluates every candidate price and keeps the revenue maximizer; ties go
/// to the lexicographically smallest price.
pub fn solve_auction<S: Scalar>(
    instance: &AuctionInstance<S>,
) -> Result<ClearingResult<S>, AllocationError> {
    solve_auction_detailed(instance).map(|s| s.best)
}

pub fn solve_auction_detailed<S: Scalar>(
    instance: &AuctionInstance<S>,
) -> Result<AuctionSolution<S>, AllocationError> {
    let candidates = filtered_prices(instance);
    let results: Vec<Option<ClearingResult<S>>> = candidates
        .records
        .par_iter()
        .map(|record| match revenue_at(instance, &record.price) {
            Ok(result) => Ok(Some(result)),
            Err(AllocationError::NoEnvyFreeAllocation) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;
    let tol = instance.tolerance();
    // Records are sorted lexicographically, so the first maximizer wins ties.
    let best = results
        .iter()
        .flatten()
        .fold(None::<&ClearingResult<S>>, |best, r| match best {
            Some(b) if !b.revenue.approx_lt(&r.revenue, tol) => Some(b),
            _ => Some(r),
        })
        .ok_or(AllocationError::NoEnvyFreeAllocation)?
        .clone();
    let revenues = results.into_iter().map(|r| r.map(|r| r.revenue)).collect();
    Ok(AuctionSolution {
        best,
        candidates,
        revenues,
    })
}
