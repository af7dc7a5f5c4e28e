//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes the instance as JSON text (the CLI file format) and
//! returns a string; errors come back as JavaScript exceptions carrying the
//! diagnostic text. The `*_text` functions hold the logic and run natively.

use pmx::allocation::{revenue_at, solve_auction_detailed, AllocationError};
use pmx::candidates::filtered_prices;
use pmx::io::{parse_instance, parse_price_list, CandidatesReport, ClearingReport};
use pmx::model::AuctionInstance;
use pmx::plot::render_price_space;
use pmx::Rational;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn load(instance: &str) -> Result<AuctionInstance<Rational>, String> {
    parse_instance(instance)
        .map(|i| i.into_rational())
        .map_err(|e| e.to_string())
}

fn allocation_error(e: AllocationError) -> String {
    match e {
        AllocationError::NoEnvyFreeAllocation => {
            "no envy-free allocation fits within supply capacity at this price".to_string()
        }
        other => other.to_string(),
    }
}

/// SVG of the two-good price plane with candidate prices marked.
pub fn plot_text(instance: &str) -> Result<String, String> {
    let instance = load(instance)?;
    let prices = if instance.goods() == 2 {
        filtered_prices(&instance).prices()
    } else {
        Vec::new()
    };
    render_price_space(&instance, &prices).map_err(|e| e.to_string())
}

/// Candidate prices with witnesses and enumeration counts, as JSON.
pub fn candidates_text(instance: &str) -> Result<String, String> {
    let instance = load(instance)?;
    let set = filtered_prices(&instance);
    serde_json::to_string(&CandidatesReport::new(&instance, &set)).map_err(|e| e.to_string())
}

/// Optimal price and allocation plus the revenue at every candidate.
pub fn solve_text(instance: &str) -> Result<String, String> {
    let instance = load(instance)?;
    let solution = solve_auction_detailed(&instance).map_err(allocation_error)?;
    let revenues: Vec<_> = solution
        .candidates
        .records
        .iter()
        .zip(&solution.revenues)
        .map(|(record, revenue)| {
            json!({
                "price": record.price.as_slice().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "revenue": revenue.as_ref().map(|r| r.to_string()),
            })
        })
        .collect();
    let doc = json!({
        "best": ClearingReport::from_result(&solution.best),
        "candidates": revenues,
    });
    Ok(doc.to_string())
}

/// Best envy-free allocation at a comma-separated price.
pub fn allocate_text(instance: &str, price: &str) -> Result<String, String> {
    let instance = load(instance)?;
    let p = parse_price_list(price, instance.goods()).map_err(|e| format!("price: {e}"))?;
    let result = revenue_at(&instance, &p).map_err(allocation_error)?;
    serde_json::to_string(&ClearingReport::from_result(&result)).map_err(|e| e.to_string())
}

fn to_js(result: Result<String, String>) -> Result<String, JsValue> {
    result.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn plot(instance: &str) -> Result<String, JsValue> {
    to_js(plot_text(instance))
}

#[wasm_bindgen]
pub fn candidates(instance: &str) -> Result<String, JsValue> {
    to_js(candidates_text(instance))
}

#[wasm_bindgen]
pub fn solve(instance: &str) -> Result<String, JsValue> {
    to_js(solve_text(instance))
}

#[wasm_bindgen]
pub fn allocate(instance: &str, price: &str) -> Result<String, JsValue> {
    to_js(allocate_text(instance, price))
}
