//! Upper-right convex hull of a finite set of rate pairs.

use super::{BoundaryPoint, RatePair};

/// Interior samples emitted along each time-sharing segment.
pub const SEGMENT_SAMPLES: usize = 16;

/// A labelled rate pair; `tag` is carried into the emitted parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedPair {
    pub tag: f64,
    pub rates: RatePair,
}

fn cross(o: RatePair, a: RatePair, b: RatePair) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Pareto part of the upper convex hull, ordered by ascending R1.
pub fn upper_right_hull(points: &[TaggedPair]) -> Vec<TaggedPair> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|p, q| {
        p.rates[0]
            .total_cmp(&q.rates[0])
            .then(p.rates[1].total_cmp(&q.rates[1]))
    });
    let mut upper: Vec<TaggedPair> = Vec::with_capacity(sorted.len());
    for p in sorted {
        while upper.len() >= 2 {
            let n = upper.len();
            if cross(upper[n - 2].rates, upper[n - 1].rates, p.rates) >= 0.0 {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    let top = upper.iter().enumerate().fold(0, |best, (i, p)| {
        if p.rates[1] >= upper[best].rates[1] {
            i
        } else {
            best
        }
    });
    upper.split_off(top)
}

/// Hull vertices plus evenly spaced time-sharing points between neighbours.
///
/// Parameters are `[tag_left, tag_right, lambda]`; vertices carry `lambda = 0`.
pub fn sample_hull(vertices: &[TaggedPair], per_segment: usize) -> Vec<BoundaryPoint> {
    let mut out = Vec::with_capacity(vertices.len() * (per_segment + 1));
    for (i, v) in vertices.iter().enumerate() {
        out.push(BoundaryPoint {
            params: vec![v.tag, v.tag, 0.0],
            rates: v.rates.to_vec(),
        });
        if let Some(w) = vertices.get(i + 1) {
            for j in 1..=per_segment {
                let lambda = j as f64 / (per_segment + 1) as f64;
                let r1 = (1.0 - lambda) * v.rates[0] + lambda * w.rates[0];
                let r2 = (1.0 - lambda) * v.rates[1] + lambda * w.rates[1];
                out.push(BoundaryPoint {
                    params: vec![v.tag, w.tag, lambda],
                    rates: vec![r1, r2],
                });
            }
        }
    }
    out
}
