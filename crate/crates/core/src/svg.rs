//! Wall diagrams by exact sign sampling on a grid. Presentation only.

use std::fmt::Write;

use num_bigint::BigInt;

use crate::arith::{BiPoly, Q};
use crate::walls::SliceRegion;

const COLORS: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn node(lo: &Q, hi: &Q, i: usize, n: usize) -> Q {
    lo + (hi - lo) * Q::new(BigInt::from(i), BigInt::from(n))
}

/// Cells `(i, j)` (column in `b`, row in `t`) whose corner signs of `poly` are
/// not all equal and nonzero.
pub fn marked_cells(poly: &BiPoly, region: &SliceRegion, grid: usize) -> Vec<(usize, usize)> {
    let n = grid.max(1);
    let bs: Vec<Q> = (0..=n).map(|i| node(&region.b0, &region.b1, i, n)).collect();
    let ts: Vec<Q> = (0..=n).map(|j| node(&region.t0, &region.t1, j, n)).collect();
    let signs: Vec<Vec<i8>> = bs
        .iter()
        .map(|b| {
            let p = poly.at_b(b);
            ts.iter()
                .map(|t| match p.eval_q(t).cmp(&Q::from_integer(BigInt::from(0))) {
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => 1,
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = [signs[i][j], signs[i + 1][j], signs[i][j + 1], signs[i + 1][j + 1]];
            if c.contains(&0) || c.iter().any(|s| *s != c[0]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// SVG of the rectangle with one colour per wall; `t` grows upward.
pub fn render(polys: &[BiPoly], region: &SliceRegion, grid: usize) -> String {
    let n = grid.max(1);
    let cell = 600.0 / n as f64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" viewBox="0 0 600 600">"#);
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="600" height="600" fill="white" stroke="black"/><!-- b in [{}, {}], t in [{}, {}], grid {n} -->"#,
        region.b0, region.b1, region.t0, region.t1
    );
    for (k, p) in polys.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(s, r#"<g fill="{color}" data-wall="{k}">"#);
        for (i, j) in marked_cells(p, region, n) {
            let x = i as f64 * cell;
            let y = (n - 1 - j) as f64 * cell;
            let _ = writeln!(s, r#"<rect x="{x:.3}" y="{y:.3}" width="{cell:.3}" height="{cell:.3}"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qi;
    use crate::lattice::{NsLattice, RationalDivisor};

    fn region() -> SliceRegion {
        let h = RationalDivisor::from_ints(&[1]);
        SliceRegion::new(&NsLattice::rank_one(2, 1).unwrap(), h.clone(), h, (qi(-2), qi(2)), (qi(1), qi(3))).unwrap()
    }

    #[test]
    fn blank_grid() {
        let s = render(&[], &region(), 10);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(!s.contains("data-wall"));
    }

    #[test]
    fn vertical_line_marks_one_column_pair() {
        // W = b t vanishes on b = 0, a grid line when the grid is even
        let p = BiPoly::b().mul(&BiPoly::t());
        let cells = marked_cells(&p, &region(), 4);
        assert!(cells.iter().all(|(i, _)| *i == 1 || *i == 2));
        assert_eq!(cells.len(), 8);
    }
}
