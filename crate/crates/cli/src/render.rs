//! Figure emission: binary PPM rasters of the classification grid and SVG
//! vector output for the level curves. Both writers format every number the
//! same way on every run, so output files are byte-deterministic.

use std::fmt::Write as _;

use num_complex::Complex64;

use spectral_atlas::spectrum::{ClassGrid, Label, SpectrumSet};

/// P6 raster: resolvent white, C mid-gray, P black. Row 0 of the image is
/// the top of the box (max y).
pub fn ppm(grid: &ClassGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(grid.nx * grid.ny * 3 + 32);
    out.extend_from_slice(format!("P6\n{} {}\n255\n", grid.nx, grid.ny).as_bytes());
    for j in (0..grid.ny).rev() {
        for i in 0..grid.nx {
            let shade: u8 = match grid.label(i, j) {
                Label::Resolvent => 255,
                Label::C => 128,
                Label::P => 0,
            };
            out.extend_from_slice(&[shade, shade, shade]);
        }
    }
    out
}

fn svg_path(line: &[Complex64], flip_y: f64) -> String {
    let mut d = String::new();
    for (k, z) in line.iter().enumerate() {
        let cmd = if k == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{}{:.6} {:.6} ", cmd, z.re, flip_y - z.im);
    }
    d.trim_end().to_string()
}

/// Level curves stroked solid, C points dotted, optional oracle overlays
/// dashed. Coordinates are in spectrum units; y is flipped into screen
/// orientation.
pub fn svg(set: &SpectrumSet, overlays: &[Vec<Complex64>]) -> String {
    let bbox = set.grid.bbox;
    // Flip y about the box midline so +Im points up on screen.
    let flip = bbox.y0 + bbox.y1;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">",
        bbox.x0,
        bbox.y0,
        bbox.width(),
        bbox.height()
    );
    let stroke = bbox.width().max(bbox.height()) / 400.0;
    let _ = writeln!(
        out,
        "<rect x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\" fill=\"white\"/>",
        bbox.x0,
        bbox.y0,
        bbox.width(),
        bbox.height()
    );
    for pt in &set.c_points {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"#808080\"/>",
            pt.re,
            flip - pt.im,
            stroke * 1.2
        );
    }
    for line in &set.p_curves {
        if line.is_empty() {
            continue;
        }
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.6}\"/>",
            svg_path(line, flip),
            stroke
        );
    }
    for overlay in overlays {
        if overlay.is_empty() {
            continue;
        }
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"#c03020\" stroke-width=\"{:.6}\" stroke-dasharray=\"{:.6} {:.6}\"/>",
            svg_path(overlay, flip),
            stroke * 0.8,
            stroke * 3.0,
            stroke * 3.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// grid.csv rows: x, y, label, G.
pub fn grid_csv(grid: &ClassGrid) -> String {
    let mut out = String::from("x,y,label,G\n");
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let z = grid.node(i, j);
            let _ = writeln!(
                out,
                "{},{},{},{}",
                z.re,
                z.im,
                grid.label(i, j).as_str(),
                grid.g[j * grid.nx + i]
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_atlas::contour::Box2;

    #[test]
    fn ppm_header_and_size() {
        let grid = ClassGrid {
            bbox: Box2::new(0.0, 0.0, 1.0, 1.0),
            nx: 3,
            ny: 2,
            lambda: 1.0,
            labels: vec![
                Label::P,
                Label::C,
                Label::Resolvent,
                Label::P,
                Label::C,
                Label::Resolvent,
            ],
            g: vec![0.0; 6],
            dist: vec![0.0; 6],
            failed: vec![false; 6],
            any_failed: false,
        };
        let bytes = ppm(&grid);
        assert!(bytes.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 18);
        // Top-left pixel is the (0, ny-1) node: P = black.
        assert_eq!(&bytes[11..14], &[0, 0, 0]);
    }
}
