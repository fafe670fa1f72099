//! Lattice polytopes: Newton polytopes of Laurent polynomials and the
//! cross-polytope of walk step directions.
//!
//! Hulls in dimension at most 3 are computed by enumerating supporting
//! hyperplanes through point subsets. A point set of lower affine rank is
//! projected onto coordinates where the projection is injective.

use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use serde::Serialize;

pub type Point = Vec<i32>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticePolytope {
    pub dim: usize,
    /// Extreme points, sorted lexicographically.
    pub vertices: Vec<Point>,
    /// All lattice points in the closed hull, sorted lexicographically.
    pub lattice_points: Vec<Point>,
}

impl LatticePolytope {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_lattice_points(&self) -> usize {
        self.lattice_points.len()
    }

    /// JSON `{vertices, rays, cones}` with one cell spanning every vertex,
    /// plus the lattice points.
    pub fn to_json(&self) -> String {
        let cell = serde_json::json!({
            "vertices": (0..self.vertices.len()).collect::<Vec<_>>(),
            "rays": Vec::<usize>::new(),
        });
        serde_json::json!({
            "dim": self.dim,
            "vertices": self.vertices,
            "rays": Vec::<Vec<i32>>::new(),
            "cones": [cell],
            "lattice_points": self.lattice_points,
        })
        .to_string()
    }
}

/// Half-space `<normal, y> <= offset` in projected coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
struct HalfSpace {
    normal: Vec<i64>,
    offset: i64,
}

/// H-description of the hull of a point set of affine rank `rank <= 3`.
#[derive(Debug, Clone)]
pub(crate) struct Hull {
    d: usize,
    base: Vec<i64>,
    /// Linearly independent differences spanning the affine hull.
    span: Vec<Vec<i64>>,
    /// Coordinates onto which the affine hull projects injectively.
    coords: Vec<usize>,
    facets: Vec<HalfSpace>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn primitive(mut n: Vec<i64>, mut off: i64) -> HalfSpace {
    let g = n.iter().fold(off, |g, &x| gcd(g, x));
    if g > 1 {
        n.iter_mut().for_each(|x| *x /= g);
        off /= g;
    }
    HalfSpace { normal: n, offset: off }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Rank of integer vectors by fraction-free elimination.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            let (a, b) = (m[r][c], m[i][c]);
            if b != 0 {
                for j in 0..cols {
                    m[i][j] = m[i][j] * a - m[r][j] * b;
                }
                let g = m[i].iter().fold(0i128, |g, &x| {
                    let (mut a, mut b) = (g.abs(), x.abs());
                    while b != 0 {
                        (a, b) = (b, a % b);
                    }
                    a
                });
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        r += 1;
    }
    r
}

/// Supporting half-spaces of a full-dimensional point set in `R^r`, `r <= 3`.
fn full_dim_facets(pts: &[Vec<i64>], r: usize) -> Vec<HalfSpace> {
    let mut out: Vec<HalfSpace> = Vec::new();
    let mut push = |n: Vec<i64>, base: &[i64]| {
        if n.iter().all(|&x| x == 0) {
            return;
        }
        let vals: Vec<i64> = pts.iter().map(|q| dot(&n, q)).collect();
        let off = dot(&n, base);
        let cand = if vals.iter().all(|&v| v <= off) {
            primitive(n, off)
        } else if vals.iter().all(|&v| v >= off) {
            primitive(n.iter().map(|x| -x).collect(), -off)
        } else {
            return;
        };
        if !out.contains(&cand) {
            out.push(cand);
        }
    };
    let n = pts.len();
    match r {
        1 => {
            for p in pts {
                push(vec![1], p);
            }
        }
        2 => {
            for i in 0..n {
                for j in i + 1..n {
                    let e = sub(&pts[j], &pts[i]);
                    push(vec![-e[1], e[0]], &pts[i]);
                }
            }
        }
        3 => {
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let a = sub(&pts[j], &pts[i]);
                        let b = sub(&pts[k], &pts[i]);
                        let c = vec![
                            a[1] * b[2] - a[2] * b[1],
                            a[2] * b[0] - a[0] * b[2],
                            a[0] * b[1] - a[1] * b[0],
                        ];
                        push(c, &pts[i]);
                    }
                }
            }
        }
        _ => unreachable!("rank <= 3"),
    }
    out
}

impl Hull {
    pub(crate) fn new(points: &[Point]) -> Result<Hull> {
        let d = points.first().map_or(0, |p| p.len());
        let pts: Vec<Vec<i64>> = points
            .iter()
            .map(|p| p.iter().map(|&x| x as i64).collect())
            .collect();
        let base = pts[0].clone();
        let mut span: Vec<Vec<i64>> = Vec::new();
        for q in &pts[1..] {
            let diff = sub(q, &base);
            let mut trial = span.clone();
            trial.push(diff.clone());
            if rank(&trial) > span.len() {
                span = trial;
            }
        }
        let r = span.len();
        if r > 3 {
            return Err(Error::Unsupported(format!(
                "convex hulls are limited to affine dimension <= 3 (got {r})"
            )));
        }
        // choose r coordinates making the projection injective on the span
        let mut coords = Vec::new();
        for c in 0..d {
            let mut trial = coords.clone();
            trial.push(c);
            let cols: Vec<Vec<i64>> = span
                .iter()
                .map(|v| trial.iter().map(|&j| v[j]).collect())
                .collect();
            if rank(&cols) == trial.len() {
                coords = trial;
            }
            if coords.len() == r {
                break;
            }
        }
        let proj: Vec<Vec<i64>> = pts
            .iter()
            .map(|p| coords.iter().map(|&j| p[j]).collect())
            .collect();
        let facets = if r == 0 { Vec::new() } else { full_dim_facets(&proj, r) };
        Ok(Hull {
            d,
            base,
            span,
            coords,
            facets,
        })
    }

    fn project(&self, q: &[i64]) -> Vec<i64> {
        self.coords.iter().map(|&j| q[j]).collect()
    }

    pub(crate) fn contains(&self, q: &[i32]) -> bool {
        let q: Vec<i64> = q.iter().map(|&x| x as i64).collect();
        let diff = sub(&q, &self.base);
        if self.span.is_empty() {
            return diff.iter().all(|&x| x == 0);
        }
        let mut trial = self.span.clone();
        trial.push(diff);
        if rank(&trial) > self.span.len() {
            return false;
        }
        let y = self.project(&q);
        self.facets.iter().all(|h| dot(&h.normal, &y) <= h.offset)
    }

    /// A point is a vertex iff the normals of the facets through it span the
    /// projected space.
    pub(crate) fn is_vertex(&self, q: &[i32]) -> bool {
        let r = self.span.len();
        let y: Vec<i64> = self.project(&q.iter().map(|&x| x as i64).collect::<Vec<_>>());
        let active: Vec<Vec<i64>> = self
            .facets
            .iter()
            .filter(|h| dot(&h.normal, &y) == h.offset)
            .map(|h| h.normal.clone())
            .collect();
        r == 0 || rank(&active) == r
    }

    fn bounding_box(points: &[Point]) -> (Vec<i32>, Vec<i32>) {
        let d = points[0].len();
        let lo = (0..d).map(|j| points.iter().map(|p| p[j]).min().unwrap()).collect();
        let hi = (0..d).map(|j| points.iter().map(|p| p[j]).max().unwrap()).collect();
        (lo, hi)
    }

    pub(crate) fn dim(&self) -> usize {
        self.d
    }
}

/// Cap on the bounding-box scan for lattice points.
const LATTICE_SCAN_CAP: u64 = 1 << 24;

fn polytope_from_points(dim: usize, points: &[Point]) -> Result<LatticePolytope> {
    let hull = Hull::new(points)?;
    let mut vertices: Vec<Point> = points.iter().filter(|p| hull.is_vertex(p)).cloned().collect();
    vertices.sort();
    vertices.dedup();
    let (lo, hi) = Hull::bounding_box(points);
    let count: u64 = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (b - a + 1) as u64)
        .product();
    if count > LATTICE_SCAN_CAP {
        return Err(Error::Unsupported(format!(
            "bounding box has {count} lattice points (cap {LATTICE_SCAN_CAP})"
        )));
    }
    let mut lattice_points = Vec::new();
    let mut cur = lo.clone();
    'scan: loop {
        if hull.contains(&cur) {
            lattice_points.push(cur.clone());
        }
        for j in (0..hull.dim()).rev() {
            if cur[j] < hi[j] {
                cur[j] += 1;
                continue 'scan;
            }
            cur[j] = lo[j];
        }
        break;
    }
    Ok(LatticePolytope {
        dim,
        vertices,
        lattice_points,
    })
}

/// `Conv(±e_1, ..., ±e_d)`.
pub fn direction_polytope(d: usize) -> Result<LatticePolytope> {
    if d == 0 {
        return Err(Error::Dimension("direction polytope needs d >= 1".into()));
    }
    let mut vertices = Vec::with_capacity(2 * d);
    for j in 0..d {
        for s in [1, -1] {
            let mut e = vec![0; d];
            e[j] = s;
            vertices.push(e);
        }
    }
    vertices.sort();
    let mut lattice_points = vertices.clone();
    lattice_points.push(vec![0; d]);
    lattice_points.sort();
    Ok(LatticePolytope {
        dim: d,
        vertices,
        lattice_points,
    })
}

/// True when `support ⊆ {0, ±e_j}` and contains every `±e_j`.
fn is_cross_polytope_support(d: usize, support: &[Point]) -> bool {
    let unit = |p: &Point| p.iter().filter(|&&x| x != 0).count() <= 1 && p.iter().all(|x| x.abs() <= 1);
    if !support.iter().all(unit) {
        return false;
    }
    (0..d).all(|j| {
        [1, -1].iter().all(|&s| {
            support
                .iter()
                .any(|p| p[j] == s && p.iter().enumerate().all(|(i, &x)| i == j || x == 0))
        })
    })
}

/// Convex hull of the exponent vectors of `P`.
pub fn newton_polytope(p: &LaurentPolynomial) -> Result<LatticePolytope> {
    let support = p.support();
    if support.is_empty() {
        return Err(Error::Domain("the zero polynomial has no Newton polytope".into()));
    }
    let d = p.k();
    if is_cross_polytope_support(d, &support) {
        return direction_polytope(d);
    }
    if d > 3 {
        let hull_rank = Hull::new(&support).map(|h| h.span.len());
        if !matches!(hull_rank, Ok(r) if r <= 3) {
            return Err(Error::Unsupported(format!(
                "Newton polytopes in d = {d} are supported only for the cross-polytope family"
            )));
        }
    }
    polytope_from_points(d, &support)
}

/// Convex hull of arbitrary lattice points (affine dimension at most 3).
pub fn lattice_hull(points: &[Point]) -> Result<LatticePolytope> {
    if points.is_empty() {
        return Err(Error::Domain("empty point set".into()));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Dimension("points of different lengths".into()));
    }
    polytope_from_points(d, points)
}

/// SVG of a planar polytope: the hull outline and its lattice points.
pub fn polytope_svg(poly: &LatticePolytope) -> Result<String> {
    if poly.dim != 2 {
        return Err(Error::Unsupported("SVG output needs a planar polytope".into()));
    }
    let ext = poly
        .lattice_points
        .iter()
        .flat_map(|p| p.iter().map(|x| x.abs()))
        .max()
        .unwrap_or(1)
        .max(1) as f64
        + 0.5;
    let (size, half) = (400.0, 200.0);
    let s = half / ext;
    let map = |p: &[i32]| (half + s * p[0] as f64, half - s * p[1] as f64);
    // order the vertices by angle around their centroid
    let n = poly.vertices.len() as f64;
    let cx = poly.vertices.iter().map(|v| v[0] as f64).sum::<f64>() / n;
    let cy = poly.vertices.iter().map(|v| v[1] as f64).sum::<f64>() / n;
    let mut ring = poly.vertices.clone();
    ring.sort_by(|a, b| {
        let ta = (a[1] as f64 - cy).atan2(a[0] as f64 - cx);
        let tb = (b[1] as f64 - cy).atan2(b[0] as f64 - cx);
        ta.total_cmp(&tb)
    });
    let pts: Vec<String> = ring
        .iter()
        .map(|v| {
            let (x, y) = map(v);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    svg.push_str(&format!(
        "<line x1=\"0\" y1=\"{half}\" x2=\"{size}\" y2=\"{half}\" stroke=\"#ccc\"/>\n<line x1=\"{half}\" y1=\"0\" x2=\"{half}\" y2=\"{size}\" stroke=\"#ccc\"/>\n"
    ));
    svg.push_str(&format!(
        "<polygon points=\"{}\" fill=\"#dde8f5\" stroke=\"#1f4e8c\" stroke-width=\"2\"/>\n",
        pts.join(" ")
    ));
    for p in &poly.lattice_points {
        let (x, y) = map(p);
        svg.push_str(&format!("<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"4\" fill=\"#1f4e8c\"/>\n"));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ronkin::{p_rw, p_simplified, WalkFamily};

    #[test]
    fn rw_family_is_cross_polytope() {
        let np = newton_polytope(&p_simplified(WalkFamily::Rw { d: 2 }).unwrap()).unwrap();
        assert_eq!(np.vertices, vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
        assert_eq!(np.num_lattice_points(), 5);
        assert!(np.lattice_points.contains(&vec![0, 0]));
        assert_eq!(np, direction_polytope(2).unwrap());
        let d5 = newton_polytope(&p_rw(5, 0.3).unwrap()).unwrap();
        assert_eq!((d5.num_vertices(), d5.num_lattice_points()), (10, 11));
    }

    #[test]
    fn generic_hull_matches_family_path() {
        let pts: Vec<Point> = vec![
            vec![1, 0, 0],
            vec![-1, 0, 0],
            vec![0, 1, 0],
            vec![0, -1, 0],
            vec![0, 0, 1],
            vec![0, 0, -1],
            vec![0, 0, 0],
        ];
        let h = lattice_hull(&pts).unwrap();
        assert_eq!(h, direction_polytope(3).unwrap());
    }

    #[test]
    fn segment_and_point() {
        let m = p_simplified(WalkFamily::QwM { xi: 0.7 }).unwrap();
        let np = newton_polytope(&m).unwrap();
        assert_eq!(np.vertices, vec![vec![-1], vec![1]]);
        assert_eq!(np.num_lattice_points(), 3);
        let c = LaurentPolynomial::from_real_terms(2, vec![(vec![0, 0], 2.0)]).unwrap();
        let np = newton_polytope(&c).unwrap();
        assert_eq!(np.vertices, vec![vec![0, 0]]);
        assert_eq!(np.lattice_points, vec![vec![0, 0]]);
    }

    #[test]
    fn lower_rank_in_higher_dimension() {
        // a triangle inside the plane x + y + z = 2
        let pts: Vec<Point> = vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2], vec![1, 1, 0]];
        let h = lattice_hull(&pts).unwrap();
        assert_eq!(h.num_vertices(), 3);
        assert_eq!(h.num_lattice_points(), 6);
    }

    #[test]
    fn square_with_interior() {
        let pts: Vec<Point> = vec![vec![0, 0], vec![2, 0], vec![0, 2], vec![2, 2], vec![1, 1], vec![1, 0]];
        let h = lattice_hull(&pts).unwrap();
        assert_eq!(h.num_vertices(), 4);
        assert_eq!(h.num_lattice_points(), 9);
    }

    #[test]
    fn unsupported_high_dimension() {
        let p = LaurentPolynomial::from_real_terms(
            4,
            vec![
                (vec![0, 0, 0, 0], 1.0),
                (vec![1, 0, 0, 0], 1.0),
                (vec![0, 1, 0, 0], 1.0),
                (vec![0, 0, 1, 0], 1.0),
                (vec![0, 0, 0, 1], 1.0),
            ],
        )
        .unwrap();
        assert!(matches!(newton_polytope(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn svg_has_polygon() {
        let svg = polytope_svg(&direction_polytope(2).unwrap()).unwrap();
        assert!(svg.contains("<polygon") && svg.matches("<circle").count() == 5);
        assert!(polytope_svg(&direction_polytope(3).unwrap()).is_err());
    }
}
