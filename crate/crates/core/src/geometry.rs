//! Point-set utilities: bucketed nearest-neighbour queries, Hausdorff
//! distances, and an even–odd interior test for closed polylines.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point set is empty")]
    EmptyPointSet,
}

/// Uniform spatial hash over a point set for exact nearest-point distances.
///
/// Queries expand square rings of cells outward until the ring's lower
/// distance bound exceeds the best match found, so the result is exact, not
/// approximate.
#[derive(Debug, Clone)]
pub struct BucketGrid {
    points: Vec<Complex64>,
    min_x: f64,
    min_y: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl BucketGrid {
    pub fn new(points: &[Complex64]) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyPointSet);
        }
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for p in points {
            min_x = min_x.min(p.re);
            max_x = max_x.max(p.re);
            min_y = min_y.min(p.im);
            max_y = max_y.max(p.im);
        }
        let spread = (max_x - min_x).max(max_y - min_y).max(1e-12);
        let target = (points.len() as f64).sqrt().ceil() as usize;
        let cell = spread / target as f64;
        let nx = (((max_x - min_x) / cell).floor() as usize + 1).max(1);
        let ny = (((max_y - min_y) / cell).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (idx, p) in points.iter().enumerate() {
            let i = (((p.re - min_x) / cell) as usize).min(nx - 1);
            let j = (((p.im - min_y) / cell) as usize).min(ny - 1);
            buckets[j * nx + i].push(idx as u32);
        }
        Ok(BucketGrid {
            points: points.to_vec(),
            min_x,
            min_y,
            cell,
            nx,
            ny,
            buckets,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact distance from z to the nearest stored point.
    pub fn nearest_distance(&self, z: Complex64) -> f64 {
        let ci = ((z.re - self.min_x) / self.cell).floor();
        let cj = ((z.im - self.min_y) / self.cell).floor();
        let ci = ci.clamp(0.0, (self.nx - 1) as f64) as isize;
        let cj = cj.clamp(0.0, (self.ny - 1) as f64) as isize;

        // Distance from z to the grid hull; every stored point is inside it.
        let hull_gap = {
            let dx = (self.min_x - z.re)
                .max(z.re - (self.min_x + self.cell * self.nx as f64))
                .max(0.0);
            let dy = (self.min_y - z.im)
                .max(z.im - (self.min_y + self.cell * self.ny as f64))
                .max(0.0);
            (dx * dx + dy * dy).sqrt()
        };

        let mut best = f64::INFINITY;
        let max_ring = self.nx + self.ny + 2;
        for r in 0..=max_ring {
            // Everything in ring r is at least (r-1) cells away from the
            // query's (possibly clamped) cell, and never nearer than the
            // hull gap; max of the two is a valid lower bound.
            let ring_bound = ((r as f64 - 1.0).max(0.0) * self.cell).max(hull_gap);
            if best.is_finite() && ring_bound > best {
                break;
            }
            let lo_i = ci - r as isize;
            let hi_i = ci + r as isize;
            let lo_j = cj - r as isize;
            let hi_j = cj + r as isize;
            let visit = |i: isize, j: isize, best: &mut f64| {
                if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
                    return;
                }
                for &idx in &self.buckets[j as usize * self.nx + i as usize] {
                    let d = (z - self.points[idx as usize]).norm();
                    if d < *best {
                        *best = d;
                    }
                }
            };
            if r == 0 {
                visit(ci, cj, &mut best);
            } else {
                for i in lo_i..=hi_i {
                    visit(i, lo_j, &mut best);
                    visit(i, hi_j, &mut best);
                }
                for j in lo_j + 1..hi_j {
                    visit(lo_i, j, &mut best);
                    visit(hi_i, j, &mut best);
                }
            }
        }
        best
    }
}

/// sup_{a ∈ A} dist(a, B): how far A sticks out of B.
pub fn directed_hausdorff(a: &[Complex64], b: &[Complex64]) -> Result<f64, GeometryError> {
    if a.is_empty() {
        return Err(GeometryError::EmptyPointSet);
    }
    let grid = BucketGrid::new(b)?;
    Ok(a.iter()
        .map(|&p| grid.nearest_distance(p))
        .fold(0.0, f64::max))
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> Result<f64, GeometryError> {
    let ab = directed_hausdorff(a, b)?;
    let ba = directed_hausdorff(b, a)?;
    Ok(ab.max(ba))
}

/// Even–odd interior test against a closed polyline (the last vertex is
/// joined back to the first).
pub fn polygon_contains(poly: &[Complex64], z: Complex64) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi.im > z.im) != (pj.im > z.im) {
            let t = (z.im - pi.im) / (pj.im - pi.im);
            let x_cross = pi.re + t * (pj.re - pi.re);
            if z.re < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
