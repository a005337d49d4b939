//! Marching-squares extraction of the zero set of a scalar field.
//!
//! Cells are classified by the sign pattern of F at their corners
//! (positive vs non-positive), edge crossings are refined by bisection
//! until |F| drops under the requested tolerance, and the per-cell segments
//! are stitched into polylines through their shared cell edges. The two
//! ambiguous saddle patterns are resolved by the sign of F at the cell
//! centre.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContourError<E> {
    #[error("bisection stalled at {at} with |F| = {f_abs:.3e} above tolerance {tol:.3e}")]
    RefinementFailed { at: Complex64, f_abs: f64, tol: f64 },
    #[error("field evaluation failed: {0}")]
    Field(E),
    #[error("grid must be at least 2x2 with positive area")]
    DegenerateGrid,
}

/// Axis-aligned box in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2 {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Box2 {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Box2 { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

pub type Polyline = Vec<Complex64>;

// Cell-edge identifiers: horizontal edge H(i,j) joins nodes (i,j)-(i+1,j),
// vertical edge V(i,j) joins (i,j)-(i,j+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum EdgeKey {
    H(usize, usize),
    V(usize, usize),
}

/// Trace the zero set of F on an nx × ny node grid over `bbox`.
///
/// `values[j*nx + i]` must hold F at node (i, j); `f` re-evaluates F for
/// the bisection refinement. Every returned vertex z satisfies
/// |F(z)| ≤ `tol`. Closed loops repeat their first vertex at the end.
pub fn marching_squares<E, F>(
    values: &[f64],
    bbox: Box2,
    nx: usize,
    ny: usize,
    f: &F,
    tol: f64,
) -> Result<Vec<Polyline>, ContourError<E>>
where
    F: Fn(Complex64) -> Result<f64, E>,
{
    if nx < 2 || ny < 2 || bbox.width() <= 0.0 || bbox.height() <= 0.0 {
        return Err(ContourError::DegenerateGrid);
    }
    assert_eq!(values.len(), nx * ny);
    let dx = bbox.width() / (nx - 1) as f64;
    let dy = bbox.height() / (ny - 1) as f64;
    let node = |i: usize, j: usize| Complex64::new(bbox.x0 + i as f64 * dx, bbox.y0 + j as f64 * dy);
    let val = |i: usize, j: usize| values[j * nx + i];
    let pos = |i: usize, j: usize| val(i, j) > 0.0;

    // Refined crossing points, computed once per cell edge.
    let mut h_cross: Vec<Option<Complex64>> = vec![None; (nx - 1) * ny];
    let mut v_cross: Vec<Option<Complex64>> = vec![None; nx * (ny - 1)];

    let refine = |a: Complex64,
                  fa: f64,
                  b: Complex64,
                  fb: f64|
     -> Result<Complex64, ContourError<E>> {
        // Keep the invariant: lo is on the non-positive side.
        let (mut lo, mut hi) = if fa > 0.0 { (b, a) } else { (a, b) };
        debug_assert!(fa > 0.0 && fb <= 0.0 || fa <= 0.0 && fb > 0.0);
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..200 {
            let fm = f(mid).map_err(ContourError::Field)?;
            if fm.abs() <= tol {
                return Ok(mid);
            }
            if fm > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            mid = 0.5 * (lo + hi);
        }
        let f_abs = f(mid).map_err(ContourError::Field)?.abs();
        if f_abs <= tol {
            return Ok(mid);
        }
        Err(ContourError::RefinementFailed { at: mid, f_abs, tol })
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let mask = (pos(i, j) as u8)
                | (pos(i + 1, j) as u8) << 1
                | (pos(i + 1, j + 1) as u8) << 2
                | (pos(i, j + 1) as u8) << 3;
            if mask == 0 || mask == 15 {
                continue;
            }
            let bottom = EdgeKey::H(i, j);
            let top = EdgeKey::H(i, j + 1);
            let left = EdgeKey::V(i, j);
            let right = EdgeKey::V(i + 1, j);
            let mut push = |a: EdgeKey, b: EdgeKey| segments.push((a, b));
            match mask {
                1 | 14 => push(left, bottom),
                2 | 13 => push(bottom, right),
                3 | 12 => push(left, right),
                4 | 11 => push(right, top),
                6 | 9 => push(bottom, top),
                7 | 8 => push(left, top),
                5 | 10 => {
                    // Saddle: the centre sign decides which diagonal the
                    // positive region takes, i.e. which corner pair the two
                    // segments cut off.
                    let centre = f(node(i, j) + Complex64::new(0.5 * dx, 0.5 * dy))
                        .map_err(ContourError::Field)?;
                    let cut_odd_corners = (mask == 5) == (centre > 0.0);
                    if cut_odd_corners {
                        // Isolate (i+1, j) and (i, j+1).
                        push(bottom, right);
                        push(left, top);
                    } else {
                        // Isolate (i, j) and (i+1, j+1).
                        push(left, bottom);
                        push(right, top);
                    }
                }
                _ => unreachable!(),
            }

            // Refine the crossings this cell refers to.
            for key in [bottom, top, left, right] {
                let (slot, a, b) = match key {
                    EdgeKey::H(ii, jj) => (
                        &mut h_cross[jj * (nx - 1) + ii],
                        (ii, jj),
                        (ii + 1, jj),
                    ),
                    EdgeKey::V(ii, jj) => (
                        &mut v_cross[jj * nx + ii],
                        (ii, jj),
                        (ii, jj + 1),
                    ),
                };
                let crossing = pos(a.0, a.1) != pos(b.0, b.1);
                if crossing && slot.is_none() {
                    let pa = node(a.0, a.1);
                    let pb = node(b.0, b.1);
                    *slot = Some(refine(pa, val(a.0, a.1), pb, val(b.0, b.1))?);
                }
            }
        }
    }

    let point_of = |key: EdgeKey| -> Complex64 {
        match key {
            EdgeKey::H(i, j) => h_cross[j * (nx - 1) + i].expect("crossing computed"),
            EdgeKey::V(i, j) => v_cross[j * nx + i].expect("crossing computed"),
        }
    };

    // Adjacency: each edge key joins at most two segments.
    use std::collections::HashMap;
    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(idx);
        adjacency.entry(*b).or_default().push(idx);
    }

    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();

    // Open curves first: start from edges of degree 1 in segment order.
    for start_open in [true, false] {
        for s in 0..segments.len() {
            if used[s] {
                continue;
            }
            let (a, b) = segments[s];
            let deg = |k: EdgeKey| adjacency.get(&k).map(|v| v.len()).unwrap_or(0);
            if start_open && deg(a) != 1 && deg(b) != 1 {
                continue;
            }
            // Walk from a degree-1 end when there is one, else anywhere.
            let (start, mut cur) = if deg(a) == 1 { (a, b) } else { (b, a) };
            used[s] = true;
            let mut line = vec![point_of(start), point_of(cur)];
            loop {
                let next_seg = adjacency
                    .get(&cur)
                    .and_then(|v| v.iter().find(|&&t| !used[t]))
                    .copied();
                let Some(t) = next_seg else { break };
                used[t] = true;
                let (ta, tb) = segments[t];
                cur = if ta == cur { tb } else { ta };
                line.push(point_of(cur));
            }
            polylines.push(line);
        }
    }

    Ok(polylines)
}
