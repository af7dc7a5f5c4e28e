//! Brute-force reference computations for small instances.
//!
//! None of these share a code path with the production algorithms they
//! check: intersections come from solving every `n x n` system of
//! hyperplane equations, revenue at a price from an exhaustive search over a
//! discretized allocation space, and the global optimum from a price grid.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::allocation::{revenue_at, AllocationError};
use crate::candidates::{hyperplane_contains, IndifferencePair};
use crate::demand::demanded_goods;
use crate::linalg;
use crate::model::{AuctionInstance, PriceVector};
use crate::scalar::{Rational, Scalar};

pub const MAX_INTERSECTION_GOODS: usize = 4;
pub const MAX_INTERSECTION_BIDS: usize = 5;
pub const MAX_GRID_GOODS: usize = 3;
pub const MAX_GRID_RESOLUTION: usize = 100;
pub const MAX_ALLOCATION_GOODS: usize = 2;
pub const MAX_ALLOCATION_BIDS: usize = 3;
/// Largest spend lattice the allocation oracle will allocate.
pub const MAX_LATTICE_CELLS: usize = 60_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for this oracle: {0}")]
    SizeGuardExceeded(String),
    #[error("revenue evaluation failed: {0}")]
    Allocation(String),
}

/// A price that is the unique intersection of `n` hyperplanes.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionWitness<S> {
    pub price: PriceVector<S>,
    pub pairs: Vec<IndifferencePair>,
    /// Rank of the defining equations; always `n`.
    pub rank: usize,
}

fn pair_equation<S: Scalar>(instance: &AuctionInstance<S>, pair: &IndifferencePair) -> (Vec<S>, S) {
    let bid = &instance.bids()[pair.bid];
    let n = instance.goods();
    let (i, j) = pair.goods;
    // b_i p_j - b_j p_i = 0 with p_0 = 1 treated as a constant
    let mut row = vec![S::zero(); n];
    let mut rhs = S::zero();
    for (good, coeff) in [(j, bid.value(i)), (i, -bid.value(j))] {
        if good == 0 {
            rhs = rhs - coeff;
        } else {
            row[good - 1] = row[good - 1].clone() + coeff;
        }
    }
    (row, rhs)
}

/// Every intersection point of `n` linearly independent indifference
/// hyperplanes, deduplicated and sorted lexicographically.
pub fn enumerate_hyperplane_intersections<S: Scalar>(
    instance: &AuctionInstance<S>,
) -> Result<Vec<IntersectionWitness<S>>, OracleError> {
    let n = instance.goods();
    if n > MAX_INTERSECTION_GOODS || instance.bids().len() > MAX_INTERSECTION_BIDS {
        return Err(OracleError::SizeGuardExceeded(format!(
            "{n} goods and {} bids (limit {MAX_INTERSECTION_GOODS} and {MAX_INTERSECTION_BIDS})",
            instance.bids().len()
        )));
    }
    let tol = instance.tolerance();
    let pairs: Vec<IndifferencePair> = (0..instance.bids().len())
        .flat_map(|b| {
            (0..=n)
                .tuple_combinations()
                .map(move |(i, j)| IndifferencePair::new(b, i, j))
        })
        .collect();

    let mut found: Vec<IntersectionWitness<S>> = Vec::new();
    for chosen in pairs.iter().copied().combinations(n) {
        let (rows, rhs): (Vec<Vec<S>>, Vec<S>) =
            chosen.iter().map(|p| pair_equation(instance, p)).unzip();
        let Some(solution) = linalg::solve(&rows, &rhs, tol) else {
            continue;
        };
        let Ok(price) = PriceVector::new(solution) else {
            continue;
        };
        if S::EXACT && price.as_slice().iter().any(|v| !v.gt_zero()) {
            continue;
        }
        let on_all = chosen
            .iter()
            .all(|p| hyperplane_contains(&instance.bids()[p.bid], p.goods, &price, tol));
        if !on_all || found.iter().any(|w| w.price.approx_eq(&price, tol)) {
            continue;
        }
        found.push(IntersectionWitness {
            price,
            pairs: chosen,
            rank: n,
        });
    }
    found.sort_by(|a, b| a.price.lex_cmp(&b.price, tol));
    Ok(found)
}

/// For every proper subset of goods containing the dummy good, some pair of
/// the witness has exactly one good inside it.
pub fn check_hyperplane_ordering<S: Scalar>(
    witness: &IntersectionWitness<S>,
    goods: usize,
) -> bool {
    // bit g-1 of `mask` set <=> good g in the subset; the dummy is always in
    let full = (1u64 << goods) - 1;
    (0..full).all(|mask| {
        let inside = |g: usize| g == 0 || mask & (1 << (g - 1)) != 0;
        witness
            .pairs
            .iter()
            .any(|p| inside(p.goods.0) != inside(p.goods.1))
    })
}

/// Best revenue over a price grid with `resolution` points per axis on
/// `(0, max_b b_i]`. Only a lower bound on the true optimum.
pub fn grid_search_revenue<S: Scalar>(
    instance: &AuctionInstance<S>,
    resolution: usize,
) -> Result<Option<(PriceVector<S>, S)>, OracleError> {
    let n = instance.goods();
    if n > MAX_GRID_GOODS || resolution > MAX_GRID_RESOLUTION || resolution == 0 {
        return Err(OracleError::SizeGuardExceeded(format!(
            "{n} goods at resolution {resolution} (limit {MAX_GRID_GOODS} goods, resolution 1..={MAX_GRID_RESOLUTION})"
        )));
    }
    let upper: Vec<S> = (1..=n)
        .map(|i| {
            let top = instance
                .bids()
                .iter()
                .map(|b| b.value(i))
                .fold(S::zero(), |m, v| if v > m { v } else { m });
            // A good nobody values: its price is irrelevant, any positive axis works.
            if top.is_zero() {
                S::one()
            } else {
                top
            }
        })
        .collect();
    let steps = S::from_usize(resolution);
    let mut best: Option<(PriceVector<S>, S)> = None;
    for point in (0..n).map(|_| 1..=resolution).multi_cartesian_product() {
        let prices = point
            .iter()
            .zip(&upper)
            .map(|(&j, top)| top.clone() * S::from_usize(j) / steps.clone())
            .collect();
        let p = PriceVector::new(prices).expect("grid points are positive");
        let revenue = match revenue_at(instance, &p) {
            Ok(result) => result.revenue,
            Err(AllocationError::NoEnvyFreeAllocation) => continue,
            Err(e) => return Err(OracleError::Allocation(e.to_string())),
        };
        if best.as_ref().is_none_or(|(_, r)| revenue > *r) {
            best = Some((p, revenue));
        }
    }
    Ok(best)
}

/// 2-D (or 1-D) boolean lattice of reachable aggregate spends.
struct SpendLattice {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl SpendLattice {
    fn index(&self, x: usize, y: usize) -> usize {
        x * self.height + y
    }

    fn shifted(&self, dx: usize, dy: usize) -> SpendLattice {
        let mut out = vec![false; self.cells.len()];
        for x in 0..self.width.saturating_sub(dx) {
            for y in 0..self.height.saturating_sub(dy) {
                if self.cells[self.index(x, y)] {
                    out[self.index(x + dx, y + dy)] = true;
                }
            }
        }
        SpendLattice {
            cells: out,
            ..*self
        }
    }

    /// Points reachable from the current set with at most `max_moves` steps
    /// drawn from `moves` (each with `dx > 0`, or `dx == 0` and `dy > 0`).
    fn dilated(&self, moves: &[(usize, isize)], max_moves: usize) -> SpendLattice {
        let unreachable = u16::MAX;
        let mut dist = vec![unreachable; self.cells.len()];
        for x in 0..self.width {
            for y in 0..self.height {
                let here = self.index(x, y);
                if self.cells[here] {
                    dist[here] = 0;
                    continue;
                }
                let mut best = unreachable;
                for &(dx, dy) in moves {
                    let (Some(px), Some(py)) = (x.checked_sub(dx), y.checked_add_signed(-dy))
                    else {
                        continue;
                    };
                    if py >= self.height {
                        continue;
                    }
                    let d = dist[self.index(px, py)];
                    if d != unreachable && d + 1 < best {
                        best = d + 1;
                    }
                }
                dist[here] = best;
            }
        }
        SpendLattice {
            cells: dist
                .into_iter()
                .map(|d| (d as usize) <= max_moves)
                .collect(),
            ..*self
        }
    }
}

fn rational_gcd(values: &[Rational]) -> Rational {
    let lcm_den = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let gcd_num = values
        .iter()
        .map(|v| (v * Rational::from_integer(lcm_den.clone())).to_integer())
        .fold(BigInt::zero(), |acc, v| acc.gcd(&v));
    Rational::new(gcd_num, lcm_den)
}

/// Best revenue at the fixed price `p` over all allocations whose per-bid
/// convex weights on the demand-set vertices are multiples of
/// `1 / resolution`. `Ok(None)` when no such allocation respects capacity.
///
/// Revenue only depends on the aggregate spend per good, so the product of
/// the per-bid weight grids is searched by propagating the set of reachable
/// aggregate spends bid by bid on the common lattice `gcd(budgets) /
/// resolution`; every grid allocation maps to exactly one lattice point.
pub fn allocation_oracle(
    instance: &AuctionInstance<Rational>,
    p: &PriceVector<Rational>,
    resolution: usize,
) -> Result<Option<f64>, OracleError> {
    let n = instance.goods();
    let bids = instance.bids();
    if n > MAX_ALLOCATION_GOODS || bids.len() > MAX_ALLOCATION_BIDS || resolution == 0 {
        return Err(OracleError::SizeGuardExceeded(format!(
            "{n} goods and {} bids (limit {MAX_ALLOCATION_GOODS} and {MAX_ALLOCATION_BIDS})",
            bids.len()
        )));
    }
    if bids.is_empty() {
        return Ok(Some(0.0));
    }
    let budgets: Vec<Rational> = bids.iter().map(|b| b.budget().clone()).collect();
    let unit = rational_gcd(&budgets);
    let multiples: Vec<usize> = budgets
        .iter()
        .map(|b| {
            (b / &unit)
                .to_integer()
                .to_usize()
                .expect("small budget multiple")
        })
        .collect();
    let extent = resolution * multiples.iter().sum::<usize>() + 1;
    let height = if n == 2 { extent } else { 1 };
    if extent.saturating_mul(height) > MAX_LATTICE_CELLS {
        return Err(OracleError::SizeGuardExceeded(format!(
            "spend lattice of {extent}x{height} cells"
        )));
    }
    let mut lattice = SpendLattice {
        width: extent,
        height,
        cells: vec![false; extent * height],
    };
    lattice.cells[0] = true;

    for (bid, &m) in bids.iter().zip(&multiples) {
        let demand = demanded_goods(bid, p, 0.0);
        let real: Vec<usize> = demand.real_goods().collect();
        let full = m * resolution;
        let axis = |good: usize, amount: usize| if good == 1 { (amount, 0) } else { (0, amount) };
        lattice = match (real.as_slice(), demand.includes_dummy()) {
            ([], _) => lattice,
            (&[g], true) => {
                let (dx, dy) = axis(g, m);
                lattice.dilated(&[(dx, dy as isize)], resolution)
            }
            (&[g], false) => {
                let (dx, dy) = axis(g, full);
                lattice.shifted(dx, dy)
            }
            (&[_, _], true) => lattice.dilated(&[(m, 0), (0, m as isize)], resolution),
            (&[_, _], false) => lattice
                .shifted(0, full)
                .dilated(&[(m, -(m as isize))], resolution),
            _ => unreachable!("at most two goods"),
        };
    }

    let step = Scalar::to_f64(&(&unit / Rational::from_integer(BigInt::from(resolution))));
    let prices: Vec<f64> = p.as_slice().iter().map(Scalar::to_f64).collect();
    let curves: Vec<Vec<(f64, f64)>> = instance
        .cost()
        .curves()
        .iter()
        .map(|c| {
            c.steps()
                .iter()
                .map(|s| (Scalar::to_f64(&s.until), Scalar::to_f64(&s.marginal)))
                .collect()
        })
        .collect();
    let cost = |good: usize, quantity: f64| -> Option<f64> {
        let steps = &curves[good];
        let capacity = steps.last().map_or(0.0, |s| s.0);
        if quantity > capacity + 1e-12 {
            return None;
        }
        let (mut total, mut lower) = (0.0, 0.0);
        for &(until, marginal) in steps {
            let top = quantity.min(until);
            if top > lower {
                total += marginal * (top - lower);
            }
            lower = until;
        }
        Some(total)
    };

    let mut best: Option<f64> = None;
    for x in 0..lattice.width {
        for y in 0..lattice.height {
            if !lattice.cells[lattice.index(x, y)] {
                continue;
            }
            let spends = [x as f64 * step, y as f64 * step];
            let mut revenue = 0.0;
            let mut feasible = true;
            for good in 0..n {
                match cost(good, spends[good] / prices[good]) {
                    Some(c) => revenue += spends[good] - c,
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible && best.is_none_or(|b| revenue > b) {
                best = Some(revenue);
            }
        }
    }
    Ok(best)
}
