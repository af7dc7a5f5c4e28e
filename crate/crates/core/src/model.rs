//! Auction instances: bids, prices, bundles and step supply curves.
//!
//! Goods are indexed `1..=n`. Index `0` is the dummy good (the empty bundle)
//! with `b_0 = p_0 = 1`; it is never stored and is synthesized by the
//! `value`/`get` accessors.

use std::fmt;

use crate::scalar::{Rational, Scalar, DEFAULT_TOLERANCE};

/// A single bid: per-unit values for each good plus a budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Bid<S> {
    id: String,
    values: Vec<S>,
    budget: S,
}

impl<S: Scalar> Bid<S> {
    /// Builds a bid without validation. Use [`AuctionInstance::new`] to check
    /// the instance-level invariants.
    pub fn new(id: impl Into<String>, values: Vec<S>, budget: S) -> Self {
        Bid {
            id: id.into(),
            values,
            budget,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Value of good `i`; `value(0)` is the dummy value 1.
    pub fn value(&self, i: usize) -> S {
        if i == 0 {
            S::one()
        } else {
            self.values[i - 1].clone()
        }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn budget(&self) -> &S {
        &self.budget
    }

    pub fn goods(&self) -> usize {
        self.values.len()
    }

    pub fn convert<T: Scalar>(&self) -> Bid<T> {
        Bid {
            id: self.id.clone(),
            values: self
                .values
                .iter()
                .map(|v| T::from_rational(&v.to_rational()))
                .collect(),
            budget: T::from_rational(&self.budget.to_rational()),
        }
    }
}

/// Strictly positive linear anonymous prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector<S>(Vec<S>);

impl<S: Scalar> PriceVector<S> {
    pub fn new(prices: Vec<S>) -> Result<Self, ModelError> {
        if let Some(i) = prices.iter().position(|p| !p.gt_zero()) {
            return Err(ModelError::NonPositivePrice(i + 1));
        }
        Ok(PriceVector(prices))
    }

    /// Price of good `i`; `get(0)` is the dummy price 1.
    pub fn get(&self, i: usize) -> S {
        if i == 0 {
            S::one()
        } else {
            self.0[i - 1].clone()
        }
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn goods(&self) -> usize {
        self.0.len()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Lexicographic comparison, used for deterministic ordering. In float
    /// mode coordinates are first snapped to multiples of `tol`, so values
    /// that differ only by rounding noise compare equal while the order stays
    /// total.
    pub fn lex_cmp(&self, other: &Self, tol: f64) -> std::cmp::Ordering {
        let snap = |v: &S| (v.to_f64() / tol).round();
        for (a, b) in self.0.iter().zip(&other.0) {
            let ord = if S::EXACT || tol <= 0.0 {
                a.partial_cmp(b)
            } else {
                snap(a).partial_cmp(&snap(b))
            };
            match ord {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    pub fn convert<T: Scalar>(&self) -> PriceVector<T> {
        PriceVector(
            self.0
                .iter()
                .map(|v| T::from_rational(&v.to_rational()))
                .collect(),
        )
    }
}

impl<S: Scalar> fmt::Display for PriceVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Nonnegative amounts of each good.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle<S>(pub Vec<S>);

impl<S: Scalar> Bundle<S> {
    pub fn zero(goods: usize) -> Self {
        Bundle(vec![S::zero(); goods])
    }

    /// Amount of good `i` (1-based); the dummy good has amount 0.
    pub fn get(&self, i: usize) -> S {
        if i == 0 {
            S::zero()
        } else {
            self.0[i - 1].clone()
        }
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    /// `<p, x>`
    pub fn cost_at(&self, prices: &PriceVector<S>) -> S {
        self.0
            .iter()
            .zip(prices.as_slice())
            .fold(S::zero(), |acc, (x, p)| acc + x.clone() * p.clone())
    }
}

/// One step of a supply curve: marginal cost `marginal` applies to units up
/// to `until`, starting from the previous step's end (or 0).
#[derive(Debug, Clone, PartialEq)]
pub struct SupplyStep<S> {
    pub until: S,
    pub marginal: S,
}

/// Step marginal-cost curve for one good. Its integral is the convex cost of
/// providing a quantity, infinite beyond the last step.
#[derive(Debug, Clone, PartialEq)]
pub struct SupplyCurve<S> {
    steps: Vec<SupplyStep<S>>,
}

impl<S: Scalar> SupplyCurve<S> {
    pub fn new(steps: Vec<SupplyStep<S>>) -> Self {
        SupplyCurve { steps }
    }

    /// A single step with constant marginal cost.
    pub fn linear(capacity: S, marginal: S) -> Self {
        SupplyCurve::new(vec![SupplyStep {
            until: capacity,
            marginal,
        }])
    }

    pub fn steps(&self) -> &[SupplyStep<S>] {
        &self.steps
    }

    pub fn capacity(&self) -> S {
        self.steps
            .last()
            .map(|s| s.until.clone())
            .unwrap_or_else(S::zero)
    }

    /// Integral of the step function from 0 to `x`; `None` means +inf.
    pub fn cost(&self, x: &S, tol: f64) -> Option<S> {
        if !x.approx_le(&self.capacity(), tol) {
            return None;
        }
        let mut total = S::zero();
        let mut lower = S::zero();
        for step in &self.steps {
            if *x <= step.until {
                if *x > lower {
                    total = total + step.marginal.clone() * (x.clone() - lower);
                }
                return Some(total);
            }
            total = total + step.marginal.clone() * (step.until.clone() - lower);
            lower = step.until.clone();
        }
        // x exceeds capacity only by the float tolerance.
        Some(total)
    }

    /// Affine pieces `(slope, intercept)` whose pointwise maximum equals the
    /// cost on `[0, capacity]`. Piece `r` is
    /// `sum_{q<r} mu_q (e_{q+1} - e_q) + mu_r (x - e_r)`.
    pub fn affine_pieces(&self) -> Vec<(S, S)> {
        let mut pieces = Vec::with_capacity(self.steps.len());
        let mut lower = S::zero();
        let mut accumulated = S::zero();
        for step in &self.steps {
            let intercept = accumulated.clone() - step.marginal.clone() * lower.clone();
            pieces.push((step.marginal.clone(), intercept));
            accumulated = accumulated + step.marginal.clone() * (step.until.clone() - lower);
            lower = step.until.clone();
        }
        pieces
    }

    pub fn convert<T: Scalar>(&self) -> SupplyCurve<T> {
        SupplyCurve::new(
            self.steps
                .iter()
                .map(|s| SupplyStep {
                    until: T::from_rational(&s.until.to_rational()),
                    marginal: T::from_rational(&s.marginal.to_rational()),
                })
                .collect(),
        )
    }
}

/// Separable cost `psi(x) = sum_i cost_i(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction<S> {
    curves: Vec<SupplyCurve<S>>,
}

impl<S: Scalar> CostFunction<S> {
    pub fn new(curves: Vec<SupplyCurve<S>>) -> Self {
        CostFunction { curves }
    }

    /// Zero marginal cost with the given capacity for every good.
    pub fn free(goods: usize, capacity: S) -> Self {
        CostFunction::new(vec![SupplyCurve::linear(capacity, S::zero()); goods])
    }

    pub fn curves(&self) -> &[SupplyCurve<S>] {
        &self.curves
    }

    /// Curve of good `i` (1-based).
    pub fn curve(&self, i: usize) -> &SupplyCurve<S> {
        &self.curves[i - 1]
    }

    /// `psi(x)`, or `None` for +inf.
    pub fn value(&self, x: &Bundle<S>, tol: f64) -> Option<S> {
        self.curves
            .iter()
            .zip(x.as_slice())
            .try_fold(S::zero(), |acc, (curve, xi)| {
                curve.cost(xi, tol).map(|c| acc + c)
            })
    }

    pub fn convert<T: Scalar>(&self) -> CostFunction<T> {
        CostFunction::new(self.curves.iter().map(SupplyCurve::convert).collect())
    }
}

/// Free function form of [`CostFunction::value`].
pub fn cost_value<S: Scalar>(cost: &CostFunction<S>, x: &Bundle<S>, tol: f64) -> Option<S> {
    cost.value(x, tol)
}

/// A validated auction instance.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionInstance<S> {
    goods: usize,
    bids: Vec<Bid<S>>,
    cost: CostFunction<S>,
    tolerance: f64,
}

impl<S: Scalar> AuctionInstance<S> {
    /// Validates and builds an instance, reporting every violated invariant.
    pub fn new(
        goods: usize,
        bids: Vec<Bid<S>>,
        cost: CostFunction<S>,
        tolerance: f64,
    ) -> Result<Self, ValidationErrors> {
        let mut issues = Vec::new();
        if goods == 0 {
            issues.push(InstanceError::NoGoods);
        }
        if bids.is_empty() {
            issues.push(InstanceError::EmptyBidSet);
        }
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            issues.push(InstanceError::InvalidTolerance(tolerance));
        }
        let mut seen = std::collections::HashSet::new();
        for bid in &bids {
            if !seen.insert(bid.id()) {
                issues.push(InstanceError::DuplicateBidId(bid.id().to_string()));
            }
            if bid.goods() != goods {
                issues.push(InstanceError::BidArity {
                    bid: bid.id().to_string(),
                    expected: goods,
                    found: bid.goods(),
                });
                continue;
            }
            if !bid.budget().gt_zero() {
                issues.push(InstanceError::NonPositiveBudget(bid.id().to_string()));
            }
            for (i, v) in bid.values().iter().enumerate() {
                if v.lt_zero() {
                    issues.push(InstanceError::NegativeBidValue {
                        bid: bid.id().to_string(),
                        good: i + 1,
                    });
                }
            }
        }
        if cost.curves().len() != goods {
            issues.push(InstanceError::SupplyArity {
                expected: goods,
                found: cost.curves().len(),
            });
        } else {
            for (i, curve) in cost.curves().iter().enumerate() {
                let good = i + 1;
                let steps = curve.steps();
                let mut lower = S::zero();
                let mut monotone = true;
                for s in steps {
                    monotone &= s.until > lower;
                    lower = s.until.clone();
                }
                if !monotone {
                    issues.push(InstanceError::NonMonotoneStepEnds(good));
                }
                if steps.iter().any(|s| s.marginal.lt_zero()) {
                    issues.push(InstanceError::NegativeMarginal(good));
                }
                if steps.windows(2).any(|w| w[1].marginal < w[0].marginal) {
                    issues.push(InstanceError::NonIncreasingMarginals(good));
                }
            }
        }
        for good in 1..=goods {
            let demanded = bids
                .iter()
                .filter(|b| b.goods() == goods)
                .any(|b| b.value(good).gt_zero());
            if !demanded && !bids.is_empty() {
                issues.push(InstanceError::UndemandedGood(good));
            }
        }
        if issues.is_empty() {
            Ok(AuctionInstance {
                goods,
                bids,
                cost,
                tolerance,
            })
        } else {
            Err(ValidationErrors(issues))
        }
    }

    /// Builds an instance that skips validation. Only oracles running in a
    /// relaxed mode use this (e.g. goods no bid values).
    pub fn new_unchecked(
        goods: usize,
        bids: Vec<Bid<S>>,
        cost: CostFunction<S>,
        tolerance: f64,
    ) -> Self {
        AuctionInstance {
            goods,
            bids,
            cost,
            tolerance,
        }
    }

    pub fn goods(&self) -> usize {
        self.goods
    }

    pub fn bids(&self) -> &[Bid<S>] {
        &self.bids
    }

    pub fn cost(&self) -> &CostFunction<S> {
        &self.cost
    }

    /// Comparison tolerance; ignored in exact mode.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn bid(&self, id: &str) -> Option<&Bid<S>> {
        self.bids.iter().find(|b| b.id() == id)
    }

    /// Same instance with every number converted to another arithmetic mode.
    pub fn convert<T: Scalar>(&self) -> AuctionInstance<T> {
        AuctionInstance {
            goods: self.goods,
            bids: self.bids.iter().map(Bid::convert).collect(),
            cost: self.cost.convert(),
            tolerance: self.tolerance,
        }
    }

    /// Same bids with different budgets (in bid order).
    pub fn with_budgets(&self, budgets: Vec<S>) -> Self {
        let bids = self
            .bids
            .iter()
            .zip(budgets)
            .map(|(b, budget)| Bid::new(b.id(), b.values().to_vec(), budget))
            .collect();
        AuctionInstance {
            bids,
            ..self.clone()
        }
    }
}

impl AuctionInstance<Rational> {
    pub fn exact(
        goods: usize,
        bids: Vec<Bid<Rational>>,
        cost: CostFunction<Rational>,
    ) -> Result<Self, ValidationErrors> {
        AuctionInstance::new(goods, bids, cost, DEFAULT_TOLERANCE)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("price of good {0} must be strictly positive")]
    NonPositivePrice(usize),
    #[error("expected {expected} prices, got {found}")]
    PriceArity { expected: usize, found: usize },
}

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance has no goods")]
    NoGoods,
    #[error("instance has no bids")]
    EmptyBidSet,
    #[error("tolerance {0} must be finite and nonnegative")]
    InvalidTolerance(f64),
    #[error("bid `{0}`: budget must be strictly positive")]
    NonPositiveBudget(String),
    #[error("bid `{bid}`: value for good {good} is negative")]
    NegativeBidValue { bid: String, good: usize },
    #[error("bid `{bid}`: expected {expected} values, found {found}")]
    BidArity {
        bid: String,
        expected: usize,
        found: usize,
    },
    #[error("bid id `{0}` is used more than once")]
    DuplicateBidId(String),
    #[error("good {0}: no bid has a positive value for it")]
    UndemandedGood(usize),
    #[error("good {0}: marginal costs must be weakly increasing")]
    NonIncreasingMarginals(usize),
    #[error("good {0}: step ends must be positive and strictly increasing")]
    NonMonotoneStepEnds(usize),
    #[error("good {0}: marginal costs must be nonnegative")]
    NegativeMarginal(usize),
    #[error("expected {expected} supply curves, found {found}")]
    SupplyArity { expected: usize, found: usize },
}

/// Every invariant an instance violates.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ValidationErrors(pub Vec<InstanceError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid instance:")?;
        for issue in &self.0 {
            writeln!(f, "  - {issue}")?;
        }
        Ok(())
    }
}
