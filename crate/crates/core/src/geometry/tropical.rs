//! Tropical polynomials, their hypersurfaces (where the maximum is attained
//! at least twice), the cones `C_S` and faces `F_S` of the direction
//! polytope, and the duality checks between them.

use crate::error::{Error, Result};
use crate::geometry::polytope::{direction_polytope, LatticePolytope};
use crate::laurent::{LaurentPolynomial, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Default tie tolerance for `trop_member`.
pub const TROP_TOL: f64 = 1e-9;

fn rat_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TropicalTerm {
    pub form: Vec<i32>,
    #[serde(serialize_with = "ser_rational")]
    pub offset: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TropicalPolynomial {
    pub dim: usize,
    /// Sorted, with duplicate `(form, offset)` pairs merged.
    pub terms: Vec<TropicalTerm>,
}

impl TropicalPolynomial {
    pub fn new(dim: usize, mut terms: Vec<TropicalTerm>) -> Result<Self> {
        if terms.iter().any(|t| t.form.len() != dim) {
            return Err(Error::Dimension(format!("tropical term of wrong length (dim = {dim})")));
        }
        terms.sort();
        terms.dedup();
        Ok(TropicalPolynomial { dim, terms })
    }

    fn term_values(&self, x: &[f64]) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| {
                t.form.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum::<f64>() + rat_f64(&t.offset)
            })
            .collect()
    }

    /// `max_I (<I, x> + offset_I)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.term_values(x).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The largest and second largest term values.
    pub fn top_two(&self, x: &[f64]) -> (f64, f64) {
        let mut a = f64::NEG_INFINITY;
        let mut b = f64::NEG_INFINITY;
        for v in self.term_values(x) {
            if v > a {
                b = a;
                a = v;
            } else if v > b {
                b = v;
            }
        }
        (a, b)
    }
}

/// One term per monomial: form = exponent, offset = `-val(a)`.
pub fn tropicalize(p: &LaurentPolynomial) -> TropicalPolynomial {
    let terms = p
        .terms()
        .map(|(e, c)| TropicalTerm {
            form: e.clone(),
            offset: -c.valuation,
        })
        .collect();
    TropicalPolynomial::new(p.k(), terms).expect("exponents have length k")
}

/// True iff the two largest term values at `x` differ by less than `tol`.
pub fn trop_member(t: &TropicalPolynomial, x: &[f64], tol: f64) -> bool {
    let (a, b) = t.top_two(x);
    b.is_finite() && a - b < tol
}

/// `±x_axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SignedAxis {
    pub axis: usize,
    pub sign: i8,
}

impl SignedAxis {
    pub fn new(axis: usize, positive: bool) -> Self {
        SignedAxis {
            axis,
            sign: if positive { 1 } else { -1 },
        }
    }

    pub fn vector(&self, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[self.axis] = self.sign as f64;
        v
    }
}

fn validate_set(s: &[SignedAxis], d: usize) -> Result<Vec<SignedAxis>> {
    if s.is_empty() {
        return Err(Error::InvalidSet("S must be nonempty".into()));
    }
    if s.iter().any(|a| a.axis >= d || a.sign.abs() != 1) {
        return Err(Error::InvalidSet(format!("S has an entry outside ±x_1..±x_{d}")));
    }
    let mut v = s.to_vec();
    v.sort();
    v.dedup();
    for w in v.windows(2) {
        if w[0].axis == w[1].axis {
            return Err(Error::InvalidSet(format!(
                "S contains both x_{0} and -x_{0}",
                w[0].axis + 1
            )));
        }
    }
    Ok(v)
}

/// All valid signed sets of size `r` in dimension `d`.
pub fn signed_sets(d: usize, r: usize) -> Vec<Vec<SignedAxis>> {
    let mut out = Vec::new();
    let mut axes: Vec<usize> = Vec::new();
    fn rec(d: usize, r: usize, start: usize, axes: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if axes.len() == r {
            out.push(axes.clone());
            return;
        }
        for a in start..d {
            axes.push(a);
            rec(d, r, a + 1, axes, out);
            axes.pop();
        }
    }
    let mut subsets = Vec::new();
    rec(d, r, 0, &mut axes, &mut subsets);
    for sub in subsets {
        for mask in 0..(1u32 << r) {
            out.push(
                sub.iter()
                    .enumerate()
                    .map(|(i, &a)| SignedAxis::new(a, (mask >> i) & 1 == 0))
                    .collect(),
            );
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyhedralCone {
    pub set: Vec<SignedAxis>,
    pub rays: Vec<Vec<f64>>,
}

/// The cone generated by `(Σ s_i) ± x_j` for the coordinates `x_j ∉ S`; when
/// `S` uses every coordinate, the ray `R≥0 (Σ s_i)`.
pub fn cone_cs(s: &[SignedAxis], d: usize) -> Result<PolyhedralCone> {
    let set = validate_set(s, d)?;
    let mut sum = vec![0.0; d];
    for a in &set {
        sum[a.axis] += a.sign as f64;
    }
    let used: Vec<usize> = set.iter().map(|a| a.axis).collect();
    let mut rays = Vec::new();
    for j in (0..d).filter(|j| !used.contains(j)) {
        for sg in [1.0, -1.0] {
            let mut g = sum.clone();
            g[j] += sg;
            rays.push(g);
        }
    }
    if rays.is_empty() {
        rays.push(sum);
    }
    Ok(PolyhedralCone { set, rays })
}

/// `F_S = Conv(s_1, ..., s_r)`, a face of the direction polytope.
pub fn face_fs(s: &[SignedAxis], d: usize) -> Result<LatticePolytope> {
    let set = validate_set(s, d)?;
    let mut vertices: Vec<Vec<i32>> = set
        .iter()
        .map(|a| {
            let mut e = vec![0; d];
            e[a.axis] = a.sign as i32;
            e
        })
        .collect();
    vertices.sort();
    Ok(LatticePolytope {
        dim: d,
        lattice_points: vertices.clone(),
        vertices,
    })
}

/// Largest `|<g, s_1 - s_i>|` over ray generators `g` of `C_S`.
pub fn perpendicularity_max(s: &[SignedAxis], d: usize) -> Result<f64> {
    let cone = cone_cs(s, d)?;
    let s1 = cone.set[0].vector(d);
    let mut worst: f64 = 0.0;
    for a in &cone.set[1..] {
        let dir: Vec<f64> = s1.iter().zip(a.vector(d)).map(|(x, y)| x - y).collect();
        for g in &cone.rays {
            let ip: f64 = g.iter().zip(&dir).map(|(x, y)| x * y).sum();
            worst = worst.max(ip.abs());
        }
    }
    Ok(worst)
}

/// True iff `C_S` is perpendicular to `F_S` to 1e-12.
pub fn perpendicularity_check(s: &[SignedAxis], d: usize) -> Result<bool> {
    Ok(perpendicularity_max(s, d)? < 1e-12)
}

/// A cell `conv(vertices) + cone(rays)`, by indices into the complex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub vertices: Vec<usize>,
    pub rays: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyhedralComplex {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
    #[serde(rename = "cones")]
    pub cells: Vec<Cell>,
}

const MERGE_TOL: f64 = 1e-9;

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < MERGE_TOL)
}

/// Rays scaled to max-norm 1 so equal directions compare equal.
fn normalize_ray(r: &[f64]) -> Vec<f64> {
    let m = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    r.iter().map(|x| x / m).collect()
}

impl PolyhedralComplex {
    fn empty(dim: usize) -> Self {
        PolyhedralComplex {
            dim,
            vertices: Vec::new(),
            rays: Vec::new(),
            cells: Vec::new(),
        }
    }

    fn vertex_index(&mut self, v: Vec<f64>) -> usize {
        if let Some(i) = self.vertices.iter().position(|w| close(w, &v)) {
            return i;
        }
        self.vertices.push(v);
        self.vertices.len() - 1
    }

    fn ray_index(&mut self, r: &[f64]) -> usize {
        let r = normalize_ray(r);
        if let Some(i) = self.rays.iter().position(|w| close(w, &r)) {
            return i;
        }
        self.rays.push(r);
        self.rays.len() - 1
    }

    fn add_cell(&mut self, vertices: Vec<Vec<f64>>, rays: Vec<Vec<f64>>) {
        let mut vs: Vec<usize> = vertices.into_iter().map(|v| self.vertex_index(v)).collect();
        let mut rs: Vec<usize> = rays.iter().map(|r| self.ray_index(r)).collect();
        vs.sort();
        vs.dedup();
        rs.sort();
        rs.dedup();
        let cell = Cell { vertices: vs, rays: rs };
        if !self.cells.contains(&cell) {
            self.cells.push(cell);
        }
    }

    /// Each cell as (vertex coordinates, normalized rays), for comparing
    /// complexes built in different orders.
    pub fn canonical_cells(&self) -> Vec<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
        let key = |v: &[f64]| -> Vec<i64> { v.iter().map(|x| (x * 1e9).round() as i64).collect() };
        let mut cells: Vec<_> = self
            .cells
            .iter()
            .map(|c| {
                let mut vs: Vec<Vec<i64>> = c.vertices.iter().map(|&i| key(&self.vertices[i])).collect();
                let mut rs: Vec<Vec<i64>> = c.rays.iter().map(|&i| key(&self.rays[i])).collect();
                vs.sort();
                rs.sort();
                (vs, rs)
            })
            .collect();
        cells.sort();
        cells
    }

    /// Euclidean distance from `x` to the cell.
    pub fn cell_distance(&self, cell: &Cell, x: &[f64]) -> f64 {
        let vs: Vec<&Vec<f64>> = cell.vertices.iter().map(|&i| &self.vertices[i]).collect();
        let rs: Vec<&Vec<f64>> = cell.rays.iter().map(|&i| &self.rays[i]).collect();
        cell_distance(&vs, &rs, x)
    }

    /// Distance from `x` to the union of all cells.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.cells
            .iter()
            .map(|c| self.cell_distance(c, x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("complex serializes")
    }

    /// A random point of each cell: convex weights on the vertices plus
    /// non-negative multiples (up to `reach`) of the rays.
    fn sample_cell(&self, cell: &Cell, rng: &mut ChaCha8Rng, reach: f64) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        if !cell.vertices.is_empty() {
            let w: Vec<f64> = cell.vertices.iter().map(|_| rng.gen::<f64>() + 1e-3).collect();
            let total: f64 = w.iter().sum();
            for (&i, wi) in cell.vertices.iter().zip(&w) {
                for (xj, vj) in x.iter_mut().zip(&self.vertices[i]) {
                    *xj += wi / total * vj;
                }
            }
        }
        for &i in &cell.rays {
            let t = rng.gen::<f64>() * reach;
            for (xj, rj) in x.iter_mut().zip(&self.rays[i]) {
                *xj += t * rj;
            }
        }
        x
    }
}

/// Solves the small symmetric system `A w = b` by Gaussian elimination;
/// `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= f * a[c][j];
            }
            b[i] -= f * b[c];
        }
    }
    let mut w = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * w[j]).sum();
        w[i] = (b[i] - s) / a[i][i];
    }
    Some(w)
}

/// Distance from `x` to `conv(vs) + cone(rs)`: least squares on every
/// subset of generators, keeping the feasible projections.
fn cell_distance(vs: &[&Vec<f64>], rs: &[&Vec<f64>], x: &[f64]) -> f64 {
    let d = x.len();
    let origin = vec![0.0; d];
    let nv = vs.len();
    let nr = rs.len();
    let mut best = f64::INFINITY;
    let anchors: Vec<&Vec<f64>> = if nv == 0 { vec![&origin] } else { vs.to_vec() };
    for (ai, &v0) in anchors.iter().enumerate() {
        let others: Vec<usize> = (0..nv).filter(|&i| i != ai).collect();
        for vmask in 0..(1usize << others.len()) {
            for rmask in 0..(1usize << nr) {
                let mut dirs: Vec<Vec<f64>> = Vec::new();
                let mut convex = 0;
                for (b, &i) in others.iter().enumerate() {
                    if (vmask >> b) & 1 == 1 {
                        dirs.push(vs[i].iter().zip(v0).map(|(a, c)| a - c).collect());
                        convex += 1;
                    }
                }
                for (b, r) in rs.iter().enumerate() {
                    if (rmask >> b) & 1 == 1 {
                        dirs.push(r.to_vec());
                    }
                }
                if dirs.len() > d {
                    continue;
                }
                let rel: Vec<f64> = x.iter().zip(v0).map(|(a, b)| a - b).collect();
                let w = if dirs.is_empty() {
                    Vec::new()
                } else {
                    let m = dirs.len();
                    let gram: Vec<Vec<f64>> = (0..m)
                        .map(|i| (0..m).map(|j| dot(&dirs[i], &dirs[j])).collect())
                        .collect();
                    let rhs: Vec<f64> = dirs.iter().map(|g| dot(g, &rel)).collect();
                    match solve(gram, rhs) {
                        Some(w) => w,
                        None => continue,
                    }
                };
                let eps = 1e-12;
                if w.iter().any(|&c| c < -eps) || w[..convex].iter().sum::<f64>() > 1.0 + eps {
                    continue;
                }
                let mut res = rel.clone();
                for (g, c) in dirs.iter().zip(&w) {
                    for (r, gj) in res.iter_mut().zip(g) {
                        *r -= c * gj;
                    }
                }
                best = best.min(dot(&res, &res).sqrt());
            }
        }
    }
    best
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Detects `max(±x_j) + c` with an optional constant term of offset `<= c`.
fn symmetric_family(t: &TropicalPolynomial) -> bool {
    let d = t.dim;
    let mut c = None;
    let mut constant = None;
    let mut seen = vec![[false; 2]; d];
    for term in &t.terms {
        let nz: Vec<usize> = (0..d).filter(|&j| term.form[j] != 0).collect();
        match nz.as_slice() {
            [] => constant = Some(term.offset),
            [j] if term.form[*j].abs() == 1 => {
                if *c.get_or_insert(term.offset) != term.offset {
                    return false;
                }
                seen[*j][(term.form[*j] < 0) as usize] = true;
            }
            _ => return false,
        }
    }
    match c {
        Some(c) => seen.iter().all(|s| s[0] && s[1]) && constant.is_none_or(|k| k <= c),
        None => false,
    }
}

/// Ties between pairs of terms in one or two variables, clipped to where the
/// pair attains the maximum.
fn generic_hypersurface(t: &TropicalPolynomial) -> Result<PolyhedralComplex> {
    let d = t.dim;
    let mut cx = PolyhedralComplex::empty(d);
    let off: Vec<f64> = t.terms.iter().map(|x| rat_f64(&x.offset)).collect();
    let form: Vec<Vec<f64>> = t
        .terms
        .iter()
        .map(|x| x.form.iter().map(|&v| v as f64).collect())
        .collect();
    let n = t.terms.len();
    for i in 0..n {
        for j in i + 1..n {
            let g: Vec<f64> = form[i].iter().zip(&form[j]).map(|(a, b)| a - b).collect();
            let h = off[j] - off[i];
            // tie set {<g, x> = h}
            let gg = dot(&g, &g);
            if gg == 0.0 {
                continue;
            }
            let p0: Vec<f64> = g.iter().map(|v| v * h / gg).collect();
            let dir: Vec<f64> = if d == 1 { vec![] } else { vec![-g[1], g[0]] };
            // constraints <f_i - f_k, x> >= off_k - off_i along p0 + s·dir
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut feasible = true;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let a: Vec<f64> = form[i].iter().zip(&form[k]).map(|(x, y)| x - y).collect();
                let rhs = off[k] - off[i] - dot(&a, &p0);
                let slope = if d == 1 { 0.0 } else { dot(&a, &dir) };
                if slope.abs() < 1e-15 {
                    if rhs > MERGE_TOL {
                        feasible = false;
                        break;
                    }
                } else if slope > 0.0 {
                    lo = lo.max(rhs / slope);
                } else {
                    hi = hi.min(rhs / slope);
                }
            }
            if !feasible || lo > hi + MERGE_TOL {
                continue;
            }
            let at = |s: f64| -> Vec<f64> { p0.iter().zip(&dir).map(|(p, q)| p + s * q).collect() };
            if d == 1 {
                cx.add_cell(vec![p0.clone()], vec![]);
                continue;
            }
            if (hi - lo).abs() < MERGE_TOL {
                // isolated tie point; kept only as a vertex of other cells
                continue;
            }
            let neg: Vec<f64> = dir.iter().map(|v| -v).collect();
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => cx.add_cell(vec![at(lo), at(hi)], vec![]),
                (true, false) => cx.add_cell(vec![at(lo)], vec![dir.clone()]),
                (false, true) => cx.add_cell(vec![at(hi)], vec![neg]),
                (false, false) => cx.add_cell(vec![p0.clone()], vec![dir.clone(), neg]),
            }
        }
    }
    Ok(cx)
}

/// The complex of cones `C_S`, `#S = 2`, of the symmetric family in
/// dimension `d <= 3` (a point when `d = 1`).
fn family_hypersurface(d: usize) -> Result<PolyhedralComplex> {
    let mut cx = PolyhedralComplex::empty(d);
    let origin = vec![0.0; d];
    if d == 1 {
        cx.add_cell(vec![origin], vec![]);
        return Ok(cx);
    }
    for s in signed_sets(d, 2) {
        let cone = cone_cs(&s, d)?;
        cx.add_cell(vec![origin.clone()], cone.rays);
    }
    Ok(cx)
}

/// Tropical hypersurface of `T` as a polyhedral complex.
///
/// The symmetric family `max(±x_j, 0)` is handled for `d <= 3` through the
/// cones `C_S`; other polynomials only for `d <= 2`.
pub fn trop_hypersurface(t: &TropicalPolynomial) -> Result<PolyhedralComplex> {
    if symmetric_family(t) && t.dim <= 3 {
        return family_hypersurface(t.dim);
    }
    if t.dim > 2 {
        return Err(Error::Unsupported(format!(
            "tropical hypersurfaces of general polynomials need d <= 2 (d = {})",
            t.dim
        )));
    }
    generic_hypersurface(t)
}

/// Codimension-one skeleton of the normal fan of the direction polytope: for
/// each edge `{s_i, s_j}` the cone over the sign vectors agreeing with it.
pub fn direction_graph(d: usize) -> Result<PolyhedralComplex> {
    if d == 0 {
        return Err(Error::Dimension("direction graph needs d >= 1".into()));
    }
    let mut cx = PolyhedralComplex::empty(d);
    let origin = vec![0.0; d];
    if d == 1 {
        cx.add_cell(vec![origin], vec![]);
        return Ok(cx);
    }
    for s in signed_sets(d, 2) {
        let free: Vec<usize> = (0..d).filter(|j| s.iter().all(|a| a.axis != *j)).collect();
        let rays: Vec<Vec<f64>> = (0..(1usize << free.len()))
            .map(|mask| {
                let mut v = vec![0.0; d];
                for a in &s {
                    v[a.axis] = a.sign as f64;
                }
                for (b, &j) in free.iter().enumerate() {
                    v[j] = if (mask >> b) & 1 == 0 { 1.0 } else { -1.0 };
                }
                v
            })
            .collect();
        cx.add_cell(vec![origin.clone()], rays);
    }
    Ok(cx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub dim: usize,
    pub cells: usize,
    /// Random points drawn from the cells.
    pub cell_samples: usize,
    /// Cell points where `trop_member` is false.
    pub cell_failures: usize,
    /// Grid and random points compared between the two descriptions.
    pub samples: usize,
    pub mismatches: usize,
    /// Whether Newton polytope and complex agree with the direction
    /// polytope and graph (`None` outside the symmetric family).
    pub family_match: Option<bool>,
    pub passed: bool,
}

/// Compares the cone description of the tropical hypersurface of `P` with
/// pointwise `trop_member` on cell samples and on a sample grid in
/// `[-box_half, box_half]^d`; for the symmetric family also compares with
/// the direction polytope and graph.
pub fn duality_check(p: &LaurentPolynomial, grid_per_axis: usize, box_half: f64, seed: u64) -> Result<DualityReport> {
    let t = tropicalize(p);
    let cx = trop_hypersurface(&t)?;
    let d = t.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_cell = 200;
    let mut cell_failures = 0;
    for cell in &cx.cells {
        for _ in 0..per_cell {
            let x = cx.sample_cell(cell, &mut rng, box_half);
            if !trop_member(&t, &x, TROP_TOL) {
                cell_failures += 1;
            }
        }
    }
    let mut samples = 0;
    let mut mismatches = 0;
    if d <= 2 {
        let g = grid_per_axis.max(2);
        let coord = |i: usize| -box_half + 2.0 * box_half * i as f64 / (g - 1) as f64;
        let total = g.pow(d as u32);
        let mut check = |x: &[f64]| {
            let a = trop_member(&t, x, TROP_TOL);
            let b = cx.distance(x) < TROP_TOL;
            samples += 1;
            if a != b {
                mismatches += 1;
            }
        };
        for f in 0..total {
            let x: Vec<f64> = if d == 1 {
                vec![coord(f)]
            } else {
                vec![coord(f / g), coord(f % g)]
            };
            check(&x);
        }
        for _ in 0..total.min(2000) {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-box_half..box_half)).collect();
            check(&x);
        }
    }
    let family_match = if symmetric_family(&t) {
        let np = crate::geometry::polytope::newton_polytope(p)?;
        let same_poly = np.vertices == direction_polytope(d)?.vertices;
        let same_graph = cx.canonical_cells() == direction_graph(d)?.canonical_cells();
        Some(same_poly && same_graph)
    } else {
        None
    };
    Ok(DualityReport {
        dim: d,
        cells: cx.cells.len(),
        cell_samples: per_cell * cx.cells.len(),
        cell_failures,
        samples,
        mismatches,
        family_match,
        passed: cell_failures == 0 && mismatches == 0 && family_match != Some(false),
    })
}

/// SVG of a planar complex clipped to `[-half, half]^2`.
pub fn complex_svg(cx: &PolyhedralComplex, half: f64) -> Result<String> {
    if cx.dim != 2 {
        return Err(Error::Unsupported("SVG output needs a planar complex".into()));
    }
    let size = 400.0;
    let s = size / (2.0 * half);
    let map = |p: &[f64]| (size / 2.0 + s * p[0], size / 2.0 - s * p[1]);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    let far = 4.0 * half;
    for cell in &cx.cells {
        let vs: Vec<&Vec<f64>> = cell.vertices.iter().map(|&i| &cx.vertices[i]).collect();
        let rs: Vec<&Vec<f64>> = cell.rays.iter().map(|&i| &cx.rays[i]).collect();
        let segs: Vec<(Vec<f64>, Vec<f64>)> = match (vs.len(), rs.len()) {
            (2, 0) => vec![(vs[0].clone(), vs[1].clone())],
            (1, _) => rs
                .iter()
                .map(|r| (vs[0].clone(), vs[0].iter().zip(r.iter()).map(|(a, b)| a + far * b).collect()))
                .collect(),
            _ => Vec::new(),
        };
        for (a, b) in segs {
            let (x1, y1) = map(&a);
            let (x2, y2) = map(&b);
            svg.push_str(&format!(
                "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" stroke=\"#8c1f1f\" stroke-width=\"2\"/>\n"
            ));
        }
    }
    for v in &cx.vertices {
        let (x, y) = map(v);
        svg.push_str(&format!("<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"#8c1f1f\"/>\n"));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
