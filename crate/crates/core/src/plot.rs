//! SVG drawing of the two-good price plane: indifference hyperplanes, bid
//! points and candidate prices.

use std::fmt::Write;

use crate::model::{AuctionInstance, PriceVector};
use crate::scalar::Scalar;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlotError {
    #[error("price-space plot needs exactly 2 goods, instance has {0}")]
    NotTwoGoods(usize),
}

/// A drawn piece of an indifference hyperplane, in price coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub bid: usize,
    pub goods: (usize, usize),
    pub from: [f64; 2],
    pub to: [f64; 2],
}

/// `g . p + e >= 0` in the plane.
#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    g: [f64; 2],
    e: f64,
}

/// Linear form `b_i p_j - b_j p_i` with `p_0 = 1` folded into the constant.
fn preference_form(values: &[f64; 3], i: usize, j: usize) -> HalfPlane {
    let mut g = [0.0; 2];
    let mut e = 0.0;
    // + b_i p_j
    if j == 0 {
        e += values[i];
    } else {
        g[j - 1] += values[i];
    }
    // - b_j p_i
    if i == 0 {
        e -= values[j];
    } else {
        g[i - 1] -= values[j];
    }
    HalfPlane { g, e }
}

/// Clipped pieces of every hyperplane `H(b, {i, j})` inside `[0, limit]^2`.
pub fn hyperplane_segments<S: Scalar>(instance: &AuctionInstance<S>, limit: f64) -> Vec<Segment> {
    let mut out = Vec::new();
    for (index, bid) in instance.bids().iter().enumerate() {
        let values = [1.0, bid.value(1).to_f64(), bid.value(2).to_f64()];
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let line = preference_form(&values, i, j);
            let k = 3 - i - j;
            // i and j both weakly preferred to the remaining good k
            let region = [
                preference_form(&values, i, k),
                preference_form(&values, j, k),
            ];
            if let Some((from, to)) = clip_line(line, &region, limit) {
                let on_axis = (0..2).any(|m| from[m].abs() < EPS && to[m].abs() < EPS);
                if !on_axis {
                    out.push(Segment {
                        bid: index,
                        goods: (i, j),
                        from,
                        to,
                    });
                }
            }
        }
    }
    out
}

fn clip_line(line: HalfPlane, region: &[HalfPlane], limit: f64) -> Option<([f64; 2], [f64; 2])> {
    let [a1, a2] = line.g;
    let norm = a1 * a1 + a2 * a2;
    if norm < EPS {
        return None;
    }
    let origin = [-line.e * a1 / norm, -line.e * a2 / norm];
    let dir = [-a2 / norm.sqrt(), a1 / norm.sqrt()];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let bounds = [
        HalfPlane {
            g: [1.0, 0.0],
            e: 0.0,
        },
        HalfPlane {
            g: [0.0, 1.0],
            e: 0.0,
        },
        HalfPlane {
            g: [-1.0, 0.0],
            e: limit,
        },
        HalfPlane {
            g: [0.0, -1.0],
            e: limit,
        },
    ];
    for h in region.iter().chain(&bounds) {
        let slope = h.g[0] * dir[0] + h.g[1] * dir[1];
        let at_origin = h.g[0] * origin[0] + h.g[1] * origin[1] + h.e;
        if slope.abs() < EPS {
            if at_origin < -EPS {
                return None;
            }
        } else if slope > 0.0 {
            lo = lo.max(-at_origin / slope);
        } else {
            hi = hi.min(-at_origin / slope);
        }
    }
    if hi - lo <= 1e-9 * limit.max(1.0) {
        return None;
    }
    let at = |t: f64| [origin[0] + t * dir[0], origin[1] + t * dir[1]];
    Some((at(lo), at(hi)))
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the price plane over `[0, 1.2 max b]^2`. Output depends only on
/// the inputs, so equal inputs give byte-identical documents.
pub fn render_price_space<S: Scalar>(
    instance: &AuctionInstance<S>,
    candidates: &[PriceVector<S>],
) -> Result<String, PlotError> {
    if instance.goods() != 2 {
        return Err(PlotError::NotTwoGoods(instance.goods()));
    }
    let max_value = instance
        .bids()
        .iter()
        .flat_map(|b| b.values().iter().map(|v| v.to_f64()))
        .fold(0.0f64, f64::max);
    let limit = if max_value > 0.0 {
        1.2 * max_value
    } else {
        1.0
    };
    let scale = SIZE / limit;
    let px = |p: [f64; 2]| (MARGIN + p[0] * scale, MARGIN + SIZE - p[1] * scale);
    let total = SIZE + 2.0 * MARGIN;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total:.0}" height="{total:.0}" viewBox="0 0 {total:.0} {total:.0}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{total:.0}" height="{total:.0}" fill="white"/>"#
    );

    let (x0, y0) = px([0.0, 0.0]);
    let (x1, y1) = px([limit, limit]);
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/></g>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="end">p1</text>"#,
        x1,
        y0 + 24.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14">p2</text>"#,
        x0 - 30.0,
        y1 + 4.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{:.2}</text>"#,
        x1,
        y0 + 12.0,
        limit
    );

    for s in hyperplane_segments(instance, limit) {
        let (ax, ay) = px(s.from);
        let (bx, by) = px(s.to);
        let _ = writeln!(
            svg,
            r##"<line class="hyperplane" data-bid="{}" data-goods="{},{}" x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="#999999" stroke-width="2"/>"##,
            escape(instance.bids()[s.bid].id()),
            s.goods.0,
            s.goods.1
        );
    }

    for bid in instance.bids() {
        let (cx, cy) = px([bid.value(1).to_f64(), bid.value(2).to_f64()]);
        let _ = writeln!(
            svg,
            r##"<rect class="bid" x="{:.2}" y="{:.2}" width="8" height="8" fill="none" stroke="#1f4e9c" stroke-width="2"/>"##,
            cx - 4.0,
            cy - 4.0
        );
        let _ = writeln!(
            svg,
            r##"<text class="bid-label" x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" fill="#1f4e9c">{}</text>"##,
            cx + 7.0,
            cy - 7.0,
            escape(bid.id())
        );
    }

    for p in candidates {
        let (cx, cy) = px([p.get(1).to_f64(), p.get(2).to_f64()]);
        let _ = writeln!(
            svg,
            r#"<circle class="candidate" cx="{cx:.2}" cy="{cy:.2}" r="4" fill="black"><title>{}</title></circle>"#,
            escape(&p.to_string())
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::filtered_prices;
    use crate::model::{Bid, CostFunction};
    use crate::scalar::{ratio, Rational};

    fn instance(bids: &[(i64, i64)]) -> AuctionInstance<Rational> {
        let bids = bids
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| {
                Bid::new(
                    format!("b{k}"),
                    vec![ratio(x, 1), ratio(y, 1)],
                    ratio(10, 1),
                )
            })
            .collect();
        AuctionInstance::exact(2, bids, CostFunction::free(2, ratio(100, 1))).unwrap()
    }

    fn render(inst: &AuctionInstance<Rational>) -> String {
        render_price_space(inst, &filtered_prices(inst).prices()).unwrap()
    }

    #[test]
    fn two_bid_counts() {
        let svg = render(&instance(&[(2, 3), (5, 4)]));
        assert_eq!(svg.matches(r#"class="hyperplane""#).count(), 6);
        assert_eq!(svg.matches(r#"class="bid""#).count(), 2);
        assert_eq!(svg.matches(r#"class="candidate""#).count(), 3);
    }

    #[test]
    fn single_bid_counts() {
        let inst = instance(&[(2, 3)]);
        let svg = render(&inst);
        assert_eq!(svg.matches(r#"class="hyperplane""#).count(), 3);
        assert_eq!(svg.matches(r#"class="candidate""#).count(), 1);
        assert!(svg.contains("<title>2 3</title>"));
    }

    #[test]
    fn segments_of_single_bid() {
        let segs = hyperplane_segments(&instance(&[(2, 3)]), 3.6);
        let close =
            |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9;
        let find = |g| segs.iter().find(|s| s.goods == g).unwrap();
        // p1 = 2 for p2 >= 3
        let s = find((0, 1));
        assert!(close(s.from, [2.0, 3.0]) || close(s.to, [2.0, 3.0]));
        assert!(close(s.from, [2.0, 3.6]) || close(s.to, [2.0, 3.6]));
        // 2 p2 = 3 p1 from the origin up to the bid point
        let s = find((1, 2));
        assert!(close(s.from, [0.0, 0.0]) || close(s.to, [0.0, 0.0]));
        assert!(close(s.from, [2.0, 3.0]) || close(s.to, [2.0, 3.0]));
    }

    #[test]
    fn deterministic() {
        let inst = instance(&[(2, 3), (5, 4)]);
        assert_eq!(render(&inst), render(&inst));
    }

    #[test]
    fn rejects_other_dimensions() {
        let bids = vec![Bid::new("a", vec![ratio(1, 1)], ratio(1, 1))];
        let inst = AuctionInstance::exact(1, bids, CostFunction::free(1, ratio(1, 1))).unwrap();
        assert_eq!(
            render_price_space(&inst, &[]),
            Err(PlotError::NotTwoGoods(1))
        );
    }
}
