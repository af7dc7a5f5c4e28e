//! Revenue-maximizing clearing for budget-constrained product-mix auctions.
//!
//! Bidders submit per-unit values for `n` goods and a budget; the seller
//! posts linear anonymous prices, supplies goods along step marginal-cost
//! curves and allocates envy-free bundles. The optimal price is found among a
//! finite set of candidates ([`candidates::filtered_prices`]), each evaluated
//! by a fixed-price linear program ([`allocation::revenue_at`]).
//!
//! ```
//! use pmx::io::parse_instance;
//! use pmx::allocation::solve_auction;
//!
//! let json = r#"{
//!   "goods": 1,
//!   "bids": [{"id": "a", "values": ["5"], "budget": "5"}],
//!   "supply": [{"steps": [{"until": "10", "marginal": "0"}]}]
//! }"#;
//! let instance = parse_instance(json).unwrap().into_rational();
//! let best = solve_auction(&instance).unwrap();
//! assert_eq!(best.price.to_string(), "5");
//! assert_eq!(best.revenue.to_string(), "5");
//! ```

pub mod allocation;
pub mod candidates;
pub mod cli;
pub mod demand;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod permutations;
pub mod plot;
pub mod scalar;

pub use allocation::{revenue_at, solve_auction, ClearingResult};
pub use candidates::{filtered_prices, CandidateSet};
pub use model::{AuctionInstance, Bid, Bundle, CostFunction, PriceVector, SupplyCurve, SupplyStep};
pub use scalar::{Rational, Scalar};
