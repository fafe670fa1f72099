//! Amoebas `Log(V(P))` of Laurent polynomials that are at most quadratic in
//! their last variable: slice points, membership rasters in the plane and
//! the connected components of the complement.

use crate::error::{Error, Result};
use crate::geometry::polytope::newton_polytope;
use crate::laurent::LaurentPolynomial;
use crate::quadrature::QuadratureSpec;
use crate::ronkin::ronkin_gradient;
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use std::collections::VecDeque;
use std::f64::consts::PI;

/// Coefficients of `P` in its last variable, after clearing negative powers.
struct LastVariable {
    /// `slices[m - m_min]` as polynomials in the other variables.
    slices: Vec<Option<LaurentPolynomial>>,
}

impl LastVariable {
    fn new(p: &LaurentPolynomial) -> Result<Self> {
        let k = p.k();
        let (lo, hi) = p
            .degree_span(k - 1)
            .ok_or_else(|| Error::Domain("the zero polynomial has no amoeba".into()))?;
        let span = hi - lo;
        if !(1..=2).contains(&span) {
            return Err(Error::Unsupported(format!(
                "amoeba slices need the last variable with exponent span 1 or 2 (got {span})"
            )));
        }
        let mut slices = vec![None; (span + 1) as usize];
        for (m, q) in p.last_variable_slices() {
            slices[(m - lo) as usize] = Some(q);
        }
        Ok(LastVariable { slices })
    }

    fn coefficients(&self, x: &[f64], theta: &[f64]) -> Vec<Complex64> {
        self.slices
            .iter()
            .map(|q| q.as_ref().map_or(Complex64::zero(), |q| q.eval_polar(x, theta)))
            .collect()
    }

    /// `log|z_k|` of the nonzero roots; `None` when the leading coefficient
    /// vanishes.
    fn log_roots(&self, x: &[f64], theta: &[f64]) -> Option<Vec<f64>> {
        let c = self.coefficients(x, theta);
        let lead = *c.last().expect("span >= 1");
        if lead.is_zero() {
            return None;
        }
        let roots = if c.len() == 2 {
            vec![-c[0] / c[1]]
        } else {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = (b * b - 4.0 * a * cc).sqrt();
            let s = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
            let q = -(b + s * disc) / 2.0;
            if q.is_zero() {
                vec![Complex64::zero(), Complex64::zero()]
            } else {
                vec![q / a, cc / q]
            }
        };
        Some(
            roots
                .into_iter()
                .map(|r| r.norm().ln())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceOutcome {
    pub points: Vec<Vec<f64>>,
    /// Samples dropped because the leading coefficient vanished there.
    pub skipped: usize,
}

/// Amoeba points `(x_prefix, log|z_k|)` over the roots `z_k` of
/// `P(e^{x_prefix + iθ}, z_k)` for each `θ` in `thetas`.
pub fn amoeba_slice(p: &LaurentPolynomial, x_prefix: &[f64], thetas: &[Vec<f64>]) -> Result<SliceOutcome> {
    if x_prefix.len() + 1 != p.k() {
        return Err(Error::Dimension(format!(
            "prefix has length {}, polynomial has k = {}",
            x_prefix.len(),
            p.k()
        )));
    }
    let lv = LastVariable::new(p)?;
    let mut points = Vec::new();
    let mut skipped = 0;
    let single = [Vec::new()];
    let thetas: &[Vec<f64>] = if p.k() == 1 { &single } else { thetas };
    for th in thetas {
        if th.len() != x_prefix.len() {
            return Err(Error::Dimension("angle vector does not match the prefix".into()));
        }
        match lv.log_roots(x_prefix, th) {
            None => skipped += 1,
            Some(ls) => {
                for l in ls.into_iter().filter(|l| l.is_finite()) {
                    let mut pt = x_prefix.to_vec();
                    pt.push(l);
                    points.push(pt);
                }
            }
        }
    }
    Ok(SliceOutcome { points, skipped })
}

/// `n` equally spaced angles in `[0, 2π)`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

/// Point cloud of a planar amoeba: `columns` values of `x_1` across
/// `[x_min, x_max]`, `angles` values of `θ_1` each.
pub fn amoeba_points(
    p: &LaurentPolynomial,
    x_min: f64,
    x_max: f64,
    columns: usize,
    angles: usize,
) -> Result<SliceOutcome> {
    if p.k() != 2 {
        return Err(Error::Unsupported("point clouds are produced for k = 2".into()));
    }
    let thetas: Vec<Vec<f64>> = uniform_angles(angles).into_iter().map(|t| vec![t]).collect();
    let mut all = SliceOutcome {
        points: Vec::new(),
        skipped: 0,
    };
    for i in 0..columns {
        let x = if columns == 1 {
            0.5 * (x_min + x_max)
        } else {
            x_min + (x_max - x_min) * i as f64 / (columns - 1) as f64
        };
        let s = amoeba_slice(p, &[x], &thetas)?;
        all.points.extend(s.points);
        all.skipped += s.skipped;
    }
    Ok(all)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl BoxSpec {
    pub fn square(half: f64) -> Self {
        BoxSpec {
            x_min: -half,
            x_max: half,
            y_min: -half,
            y_max: half,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_min < self.x_max && self.y_min < self.y_max) {
            return Err(Error::Domain(format!("empty box {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RasterOptions {
    pub angles: usize,
    /// Compute the Ronkin gradient at each component representative.
    pub gradients: bool,
    pub gradient_step: f64,
    pub quad: QuadratureSpec,
}

impl Default for RasterOptions {
    fn default() -> Self {
        RasterOptions {
            angles: 2048,
            gradients: true,
            gradient_step: 1e-4,
            quad: QuadratureSpec::new(16, 1e-12).expect("valid"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentInfo {
    pub label: u32,
    pub cells: usize,
    /// Does not touch the box boundary.
    pub bounded: bool,
    /// Cell center farthest from the amoeba.
    pub representative: [f64; 2],
    pub gradient: Option<Vec<f64>>,
    /// Lattice point of the Newton polytope nearest the gradient.
    pub nearest_lattice_point: Option<Vec<i32>>,
    pub gradient_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FptBounds {
    pub vertices: usize,
    pub lattice_points: usize,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmoebaRaster {
    pub bounds: BoxSpec,
    pub nx: usize,
    pub ny: usize,
    /// Row-major from the bottom row: index `j * nx + i` for cell column `i`
    /// and row `j`.
    pub membership: Vec<bool>,
    /// 0 on the amoeba, component labels `1..` on the complement.
    pub labels: Vec<u32>,
    pub components: Vec<ComponentInfo>,
    pub fpt: Option<FptBounds>,
    pub skipped_samples: usize,
    pub warnings: Vec<String>,
}

impl AmoebaRaster {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        let dx = (self.bounds.x_max - self.bounds.x_min) / self.nx as f64;
        let dy = (self.bounds.y_max - self.bounds.y_min) / self.ny as f64;
        [
            self.bounds.x_min + (i as f64 + 0.5) * dx,
            self.bounds.y_min + (j as f64 + 0.5) * dy,
        ]
    }

    /// Label of the cell containing `(x, y)`, if inside the box.
    pub fn label_at(&self, x: f64, y: f64) -> Option<u32> {
        let b = &self.bounds;
        if x < b.x_min || x >= b.x_max || y < b.y_min || y >= b.y_max {
            return None;
        }
        let i = ((x - b.x_min) / (b.x_max - b.x_min) * self.nx as f64) as usize;
        let j = ((y - b.y_min) / (b.y_max - b.y_min) * self.ny as f64) as usize;
        Some(self.labels[j.min(self.ny - 1) * self.nx + i.min(self.nx - 1)])
    }

    /// Plain PGM (P2): amoeba black, complement components in grey levels.
    pub fn to_pgm(&self) -> String {
        let n = self.components.len().max(1) as u32;
        let mut out = format!("P2\n{} {}\n255\n", self.nx, self.ny);
        for j in (0..self.ny).rev() {
            let row: Vec<String> = (0..self.nx)
                .map(|i| {
                    let l = self.labels[j * self.nx + i];
                    if l == 0 {
                        "0".to_string()
                    } else {
                        (95 + 160 * l / n).min(255).to_string()
                    }
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<&[u32]> = self.labels.chunks(self.nx).collect();
        serde_json::json!({
            "box": self.bounds,
            "nx": self.nx,
            "ny": self.ny,
            "labels": rows,
            "components": self.components,
            "fpt": self.fpt,
            "skipped_samples": self.skipped_samples,
            "warnings": self.warnings,
        })
        .to_string()
    }

    /// SVG with amoeba cells merged into horizontal runs.
    pub fn to_svg(&self) -> String {
        let size = 600.0;
        let (cw, ch) = (size / self.nx as f64, size / self.ny as f64);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n<rect width=\"{size}\" height=\"{size}\" fill=\"#ffffff\"/>\n"
        );
        for j in 0..self.ny {
            let y = size - (j + 1) as f64 * ch;
            let mut i = 0;
            while i < self.nx {
                if self.membership[j * self.nx + i] {
                    let start = i;
                    while i < self.nx && self.membership[j * self.nx + i] {
                        i += 1;
                    }
                    svg.push_str(&format!(
                        "<rect x=\"{:.3}\" y=\"{y:.3}\" width=\"{:.3}\" height=\"{ch:.3}\" fill=\"#1f4e8c\"/>\n",
                        start as f64 * cw,
                        (i - start) as f64 * cw
                    ));
                } else {
                    i += 1;
                }
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Vertical amoeba intervals over one column `x`: each modulus-sorted root
/// branch is continuous in `θ`, so its image is an interval.
fn column_intervals(lv: &LastVariable, x: f64, angles: &[f64], skipped: &mut usize) -> Vec<(f64, f64)> {
    let mut branch: Vec<(f64, f64)> = Vec::new();
    let mut unbounded_top = false;
    for &t in angles {
        match lv.log_roots(&[x], &[t]) {
            None => {
                *skipped += 1;
                unbounded_top = true;
            }
            Some(mut ls) => {
                ls.sort_by(|a, b| a.total_cmp(b));
                if branch.is_empty() {
                    branch = ls.iter().map(|&l| (l, l)).collect();
                } else {
                    for (b, &l) in branch.iter_mut().zip(&ls) {
                        b.0 = b.0.min(l);
                        b.1 = b.1.max(l);
                    }
                }
            }
        }
    }
    if unbounded_top {
        if let Some(last) = branch.last_mut() {
            last.1 = f64::INFINITY;
        }
    }
    branch
}

/// Rasterizes the amoeba of a planar `P` over `bounds` on an `nx × ny`
/// grid, dilates it by one cell, labels the 4-connected components of the
/// complement and evaluates the Ronkin gradient on each.
pub fn amoeba_complement_components(
    p: &LaurentPolynomial,
    bounds: BoxSpec,
    nx: usize,
    ny: usize,
    opts: &RasterOptions,
) -> Result<AmoebaRaster> {
    if p.k() != 2 {
        return Err(Error::Unsupported("amoeba rasters need k = 2".into()));
    }
    if p.is_zero() {
        return Err(Error::Domain("the zero polynomial has no amoeba".into()));
    }
    bounds.validate()?;
    if nx < 3 || ny < 3 {
        return Err(Error::Domain("raster needs at least 3 cells per axis".into()));
    }
    let dx = (bounds.x_max - bounds.x_min) / nx as f64;
    let dy = (bounds.y_max - bounds.y_min) / ny as f64;
    let mut raw = vec![false; nx * ny];
    let mut skipped = 0;
    if p.len() > 1 {
        let lv = LastVariable::new(p)?;
        let angles = uniform_angles(opts.angles.max(8));
        for i in 0..nx {
            let x = bounds.x_min + (i as f64 + 0.5) * dx;
            for (lo, hi) in column_intervals(&lv, x, &angles, &mut skipped) {
                let j0 = ((lo - bounds.y_min) / dy).floor().max(0.0);
                let j1 = ((hi - bounds.y_min) / dy).floor().min(ny as f64 - 1.0);
                if j0 > j1 {
                    continue;
                }
                for j in j0 as usize..=j1 as usize {
                    raw[j * nx + i] = true;
                }
            }
        }
    }
    let mut membership = raw.clone();
    for j in 0..ny {
        for i in 0..nx {
            if !raw[j * nx + i] {
                continue;
            }
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if a >= 0 && b >= 0 && (a as usize) < nx && (b as usize) < ny {
                        membership[b as usize * nx + a as usize] = true;
                    }
                }
            }
        }
    }

    // 4-connected labeling of the complement
    let mut labels = vec![0u32; nx * ny];
    let mut sizes: Vec<usize> = Vec::new();
    let mut touches: Vec<bool> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..nx * ny {
        if membership[start] || labels[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32 + 1;
        labels[start] = label;
        queue.push_back(start);
        let (mut size, mut touch) = (0, false);
        while let Some(c) = queue.pop_front() {
            size += 1;
            let (i, j) = (c % nx, c / nx);
            if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                touch = true;
            }
            let mut visit = |n: usize| {
                if !membership[n] && labels[n] == 0 {
                    labels[n] = label;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                visit(c - 1);
            }
            if i + 1 < nx {
                visit(c + 1);
            }
            if j > 0 {
                visit(c - nx);
            }
            if j + 1 < ny {
                visit(c + nx);
            }
        }
        sizes.push(size);
        touches.push(touch);
    }

    // distance to the amoeba, for choosing representatives
    let mut dist = vec![u32::MAX; nx * ny];
    for (c, &m) in membership.iter().enumerate() {
        if m {
            dist[c] = 0;
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        let (i, j) = (c % nx, c / nx);
        let mut nbrs = Vec::with_capacity(4);
        if i > 0 {
            nbrs.push(c - 1);
        }
        if i + 1 < nx {
            nbrs.push(c + 1);
        }
        if j > 0 {
            nbrs.push(c - nx);
        }
        if j + 1 < ny {
            nbrs.push(c + nx);
        }
        for n in nbrs {
            if dist[n] == u32::MAX {
                dist[n] = dist[c] + 1;
                queue.push_back(n);
            }
        }
    }
    let mut best: Vec<Option<usize>> = vec![None; sizes.len()];
    for c in 0..nx * ny {
        let l = labels[c];
        if l == 0 {
            continue;
        }
        let slot = &mut best[l as usize - 1];
        if slot.is_none_or(|b| dist[c] > dist[b]) {
            *slot = Some(c);
        }
    }

    let mut raster = AmoebaRaster {
        bounds,
        nx,
        ny,
        membership,
        labels,
        components: Vec::new(),
        fpt: None,
        skipped_samples: skipped,
        warnings: Vec::new(),
    };
    let np = newton_polytope(p).ok();
    for (idx, rep) in best.iter().enumerate() {
        let rep = rep.expect("nonempty component");
        let center = raster.cell_center(rep % nx, rep / nx);
        let (gradient, nearest, err) = if opts.gradients {
            let g = ronkin_gradient(p, &center, opts.gradient_step, &opts.quad)?;
            let near = np.as_ref().and_then(|np| {
                np.lattice_points
                    .iter()
                    .map(|l| {
                        let e = l
                            .iter()
                            .zip(&g)
                            .map(|(&a, b)| (a as f64 - b).abs())
                            .fold(0.0, f64::max);
                        (l.clone(), e)
                    })
                    .min_by(|a, b| a.1.total_cmp(&b.1))
            });
            match near {
                Some((l, e)) => (Some(g), Some(l), Some(e)),
                None => (Some(g), None, None),
            }
        } else {
            (None, None, None)
        };
        raster.components.push(ComponentInfo {
            label: idx as u32 + 1,
            cells: sizes[idx],
            bounded: !touches[idx],
            representative: center,
            gradient,
            nearest_lattice_point: nearest,
            gradient_error: err,
        });
    }
    if let Some(np) = &np {
        let count = raster.components.len();
        let within = np.num_vertices() <= count && count <= np.num_lattice_points();
        if !within {
            raster.warnings.push(format!(
                "{count} complement components outside the bounds [{}, {}]; the box or resolution may be inadequate",
                np.num_vertices(),
                np.num_lattice_points()
            ));
        }
        raster.fpt = Some(FptBounds {
            vertices: np.num_vertices(),
            lattice_points: np.num_lattice_points(),
            within,
        });
    }
    let mut orders: Vec<&Vec<i32>> = raster
        .components
        .iter()
        .filter_map(|c| c.nearest_lattice_point.as_ref())
        .collect();
    orders.sort();
    if orders.windows(2).any(|w| w[0] == w[1]) {
        raster.warnings.push(
            "two components share a Ronkin gradient; the resolution may be too coarse to separate them".into(),
        );
    }
    if raster.components.iter().any(|c| c.gradient_error.is_some_and(|e| e > 1e-3)) {
        raster
            .warnings
            .push("a component gradient is not near a lattice point of the Newton polytope".into());
    }
    Ok(raster)
}
