use num_traits::Zero;
use serde::Serialize;

use crate::arith::{BiPoly, Rational, UniPoly};
use crate::error::{Error, Result};

/// Lower hull of integer points given as `(j, k)` with increasing `j`.
/// Returns the hull vertices from left to right.
pub(crate) fn lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut h: Vec<(usize, i64)> = Vec::new();
    for &p in points {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            // drop b unless it lies strictly below the chord a-p
            let cross = (b.0 as i128 - a.0 as i128) * (p.1 as i128 - a.1 as i128)
                - (b.1 as i128 - a.1 as i128) * (p.0 as i128 - a.0 as i128);
            if cross <= 0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(p);
    }
    h
}

/// One edge of the Newton polygon of P in the (V-degree, mu-order) plane.
#[derive(Clone, Debug, Serialize)]
pub struct Segment {
    pub left: (usize, usize),
    pub right: (usize, usize),
    /// Negated slope: the leading exponent of the roots this edge accounts for.
    #[serde(serialize_with = "crate::serde_rational")]
    pub gamma: Rational,
    /// Sum of the coefficients on the edge, as a polynomial in T shifted so
    /// that the left end point contributes the constant term.
    #[serde(serialize_with = "crate::serde_display")]
    pub edge_polynomial: UniPoly,
}

/// Lower Newton polygon of P, edges sorted by increasing gamma.
pub fn newton_polygon(p: &BiPoly) -> Result<Vec<Segment>> {
    let pts: Vec<(usize, i64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(j, c)| c.order().map(|o| (j, o as i64)))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Degenerate("polynomial is a monomial in V; its Newton polygon has no edges".into()));
    }
    let hull = lower_hull(&pts);
    let mut segs: Vec<Segment> = hull
        .windows(2)
        .map(|w| {
            let (l, r) = (w[0], w[1]);
            let gamma = Rational::new((l.1 - r.1).into(), ((r.0 - l.0) as i64).into());
            let mut edge = vec![Rational::zero(); r.0 - l.0 + 1];
            for (j, e) in edge.iter_mut().enumerate() {
                let jj = l.0 + j;
                // mu-order on the edge at jj
                let k = Rational::from_integer(l.1.into()) - &gamma * Rational::from_integer((j as i64).into());
                if k.is_integer() {
                    let k = k.to_integer();
                    if let Ok(k) = usize::try_from(k) {
                        *e = p.term(k, jj);
                    }
                }
            }
            Segment {
                left: (l.0, l.1 as usize),
                right: (r.0, r.1 as usize),
                gamma,
                edge_polynomial: UniPoly::new(edge),
            }
        })
        .collect();
    segs.sort_by(|a, b| a.gamma.cmp(&b.gamma));
    Ok(segs)
}
