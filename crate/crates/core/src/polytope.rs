//! Convex polytopes containing the origin, in vertex representation.
//!
//! Every polytope carries its intrinsic dimension and the facets of its linear hull
//! (expressed in a coordinate chart of that hull). Facet data in the ambient space, the
//! face lattice and a triangulation are computed on first use and cached.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{to_f64, Rational};
use crate::vector::{LinearMap, Vector};

/// Bit set over the vertex indices of one polytope.
pub type VertexSet = u64;

pub const MAX_AMBIENT: usize = 5;
const MAX_POINTS: usize = 64;

/// Where the origin sits relative to the polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OriginPosition {
    /// Full-dimensional with the origin in the interior.
    Interior,
    /// On the relative boundary (the origin lies in some proper face).
    RelativeBoundary,
    /// Lower-dimensional with the origin in the relative interior (includes `{o}`).
    RelativeInteriorOfLowerDim,
}

/// A facet of the linear hull, in chart coordinates: `normal . chart(y) <= offset`.
#[derive(Clone, Debug)]
pub(crate) struct ChartFacet {
    pub normal: Vec<Rational>,
    pub offset: Rational,
    pub mask: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub mask: VertexSet,
    pub dim: usize,
    pub contains_origin: bool,
}

impl Face {
    pub fn vertex_indices(&self) -> Vec<usize> {
        bits(self.mask)
    }
}

#[derive(Clone, Debug)]
pub struct FaceLattice {
    /// `by_dim[j]` lists the proper faces of dimension `j`, `0 <= j < dim P`.
    by_dim: Vec<Vec<Face>>,
}

impl FaceLattice {
    pub fn faces(&self, j: usize) -> &[Face] {
        self.by_dim.get(j).map_or(&[], Vec::as_slice)
    }

    pub fn faces_through_origin(&self, j: usize) -> Vec<Face> {
        self.faces(j).iter().filter(|f| f.contains_origin).cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Facet of a full-dimensional polytope.
///
/// `normal` is the outer normal scaled by the facet's (n-1)-volume, so that
/// `measure * unit_normal == normal` holds exactly, and `offset = h_P(normal)`
/// (the facet's cone-volume atom times n). Only `measure` itself needs a square root.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FacetData {
    pub normal: Vector,
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub offset: Rational,
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub measure_sq: Rational,
    pub contains_origin: bool,
    #[serde(skip)]
    pub mask: VertexSet,
}

impl FacetData {
    pub fn measure(&self) -> f64 {
        to_f64(&self.measure_sq).sqrt()
    }

    pub fn unit_normal(&self) -> Vec<f64> {
        let m = self.measure();
        self.normal.to_f64().into_iter().map(|v| v / m).collect()
    }

    /// `h_P(u)` for the unit normal `u`.
    pub fn unit_offset(&self) -> f64 {
        to_f64(&self.offset) / self.measure()
    }
}

struct Inner {
    n: usize,
    vertices: Vec<Vector>,
    dim: usize,
    chart: Vec<usize>,
    facets: Vec<ChartFacet>,
    origin: OriginPosition,
    lattice: OnceLock<FaceLattice>,
    facet_data: OnceLock<Vec<FacetData>>,
    simplices: OnceLock<Vec<Vec<usize>>>,
}

/// An immutable convex polytope in `R^n` (`n <= 5`) that contains the origin.
#[derive(Clone)]
pub struct Polytope {
    inner: Arc<Inner>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.vertices == other.inner.vertices
    }
}

impl fmt::Debug for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polytope")
            .field("n", &self.inner.n)
            .field("dim", &self.inner.dim)
            .field("vertices", &self.inner.vertices.iter().map(ToString::to_string).collect::<Vec<_>>())
            .finish()
    }
}

fn bits(mask: VertexSet) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Coordinate chart of the affine hull: pivot coordinates of the difference vectors.
fn affine_chart(points: &[Vector]) -> Vec<usize> {
    let base = &points[0];
    let mut diffs: Matrix = points[1..].iter().map(|p| (p - base).0).collect();
    if diffs.is_empty() {
        return Vec::new();
    }
    linalg::rref(&mut diffs)
}

fn chart_coords(p: &Vector, chart: &[usize]) -> Vec<Rational> {
    chart.iter().map(|&i| p[i].clone()).collect()
}

/// Scales `(w, c)` so that the first nonzero entry of `w` is `±1`.
fn normalize_plane(w: &mut [Rational], c: &mut Rational) {
    if let Some(lead) = w.iter().find(|v| !v.is_zero()).map(|v| v.abs()) {
        w.iter_mut().for_each(|v| *v = &*v / &lead);
        *c = &*c / &lead;
    }
}

/// Hyperplane `w . x = c` through the given points, oriented so that `w . q < c`.
fn plane_through(points: &[&Vec<Rational>], q: &[Rational], d: usize) -> Option<(Vec<Rational>, Rational)> {
    let rows: Matrix = points
        .iter()
        .map(|p| {
            let mut r = (*p).clone();
            r.push(-Rational::one());
            r
        })
        .collect();
    let ns = linalg::nullspace(&rows, d + 1);
    if ns.len() != 1 {
        return None;
    }
    let mut w = ns[0][..d].to_vec();
    let mut c = ns[0][d].clone();
    if w.iter().all(Zero::is_zero) {
        return None;
    }
    if (linalg::dot(&w, q) - &c).is_positive() {
        w.iter_mut().for_each(|v| *v = -v.clone());
        c = -c;
    }
    normalize_plane(&mut w, &mut c);
    Some((w, c))
}

fn affine_rank(points: &[&Vec<Rational>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let diffs: Matrix =
        points[1..].iter().map(|p| p.iter().zip(points[0]).map(|(a, b)| a - b).collect()).collect();
    linalg::rank(&diffs)
}

/// Facets of the hull of `pts` (chart coordinates, full-dimensional in `R^d`), by exact
/// beneath-beyond insertion. Facet membership is returned as index lists into `pts`.
fn hull_facets(pts: &[Vec<Rational>], d: usize) -> Vec<(Vec<Rational>, Rational, Vec<usize>)> {
    let m = pts.len();
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        let (lo, hi) = pts.iter().fold((pts[0][0].clone(), pts[0][0].clone()), |(lo, hi), p| {
            (if p[0] < lo { p[0].clone() } else { lo }, if p[0] > hi { p[0].clone() } else { hi })
        });
        let at = |v: &Rational| (0..m).filter(|&i| &pts[i][0] == v).collect::<Vec<_>>();
        return vec![
            (vec![-Rational::one()], -lo.clone(), at(&lo)),
            (vec![Rational::one()], hi.clone(), at(&hi)),
        ];
    }
    let slack = |w: &[Rational], c: &Rational, p: &[Rational]| linalg::dot(w, p) - c;
    // initial simplex
    let mut simplex = vec![0];
    let mut basis: Matrix = Vec::new();
    for i in 1..m {
        if simplex.len() == d + 1 {
            break;
        }
        let mut trial = basis.clone();
        trial.push(pts[i].iter().zip(&pts[0]).map(|(a, b)| a - b).collect());
        if linalg::rank(&trial) > basis.len() {
            basis = trial;
            simplex.push(i);
        }
    }
    let inv = Rational::from_integer(((d + 1) as i64).into()).recip();
    let q: Vec<Rational> = (0..d).map(|k| simplex.iter().map(|&i| &pts[i][k]).sum::<Rational>() * &inv).collect();
    let mut planes: Vec<(Vec<Rational>, Rational)> = (0..=d)
        .filter_map(|skip| {
            let face: Vec<&Vec<Rational>> =
                simplex.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| &pts[i]).collect();
            plane_through(&face, &q, d)
        })
        .collect();
    let mut processed: Vec<usize> = simplex.clone();
    for i in 0..m {
        if simplex.contains(&i) {
            continue;
        }
        let p = &pts[i];
        let visible: Vec<bool> = planes.iter().map(|(w, c)| slack(w, c, p).is_positive()).collect();
        if visible.iter().any(|&v| v) {
            let members: Vec<Vec<usize>> = planes
                .iter()
                .map(|(w, c)| processed.iter().copied().filter(|&j| slack(w, c, &pts[j]).is_zero()).collect())
                .collect();
            let mut next: Vec<(Vec<Rational>, Rational)> =
                planes.iter().zip(&visible).filter(|(_, &v)| !v).map(|(f, _)| f.clone()).collect();
            for f in (0..planes.len()).filter(|&f| visible[f]) {
                for g in (0..planes.len()).filter(|&g| !visible[g]) {
                    let ridge: Vec<&Vec<Rational>> =
                        members[f].iter().filter(|j| members[g].contains(j)).map(|&j| &pts[j]).collect();
                    if ridge.len() + 1 < d || affine_rank(&ridge) != d - 2 {
                        continue;
                    }
                    let mut through = ridge.clone();
                    through.push(p);
                    if let Some(plane) = plane_through(&through, &q, d) {
                        if !next.contains(&plane) {
                            next.push(plane);
                        }
                    }
                }
            }
            planes = next;
        }
        processed.push(i);
    }
    planes
        .into_iter()
        .map(|(w, c)| {
            let members: Vec<usize> = (0..m).filter(|&j| slack(&w, &c, &pts[j]).is_zero()).collect();
            (w, c, members)
        })
        .collect()
}

/// Indices of the points that are vertices of their hull, given the facet memberships.
fn vertex_indices(m: usize, d: usize, facets: &[(Vec<Rational>, Rational, Vec<usize>)]) -> Vec<usize> {
    if d == 0 {
        return vec![0];
    }
    (0..m)
        .filter(|&i| {
            let mut common: Option<BTreeSet<usize>> = None;
            for (_, _, members) in facets.iter().filter(|f| f.2.contains(&i)) {
                let s: BTreeSet<usize> = members.iter().copied().collect();
                common = Some(match common {
                    None => s,
                    Some(c) => c.intersection(&s).copied().collect(),
                });
            }
            matches!(common, Some(c) if c.len() == 1)
        })
        .collect()
}

/// Vertices of the hull of `pts` (distinct points, chart coordinates).
fn extreme_points(pts: &[Vec<Rational>], d: usize) -> Vec<usize> {
    let f = hull_facets(pts, d);
    vertex_indices(pts.len(), d, &f)
}

impl Polytope {
    /// Convex hull of a finite point set; the origin must lie in the hull.
    pub fn convex_hull(points: &[Vector]) -> Result<Polytope> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let n = first.dim();
        if n == 0 || n > MAX_AMBIENT {
            return Err(Error::UnsupportedAmbient(n));
        }
        for p in points {
            p.check_dim(n)?;
        }
        let distinct: Vec<Vector> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        if distinct.len() > MAX_POINTS * 4 {
            return Err(Error::TooManyPoints(distinct.len()));
        }
        let chart = affine_chart(&distinct);
        let d = chart.len();
        // origin in the affine hull?
        let base = &distinct[0];
        let mut rows: Matrix = distinct[1..].iter().map(|p| (p - base).0).collect();
        rows.push((-base).0);
        if linalg::rank(&rows) != d {
            return Err(Error::OriginNotContained);
        }
        let coords: Vec<Vec<Rational>> = distinct.iter().map(|p| chart_coords(p, &chart)).collect();
        let mut verts: Vec<Vector> =
            extreme_points(&coords, d).into_iter().map(|i| distinct[i].clone()).collect();
        verts.sort();
        if verts.len() > MAX_POINTS {
            return Err(Error::TooManyPoints(verts.len()));
        }
        Self::from_vertices(n, verts, chart)
    }

    fn from_vertices(n: usize, vertices: Vec<Vector>, chart: Vec<usize>) -> Result<Polytope> {
        let d = chart.len();
        let coords: Vec<Vec<Rational>> = vertices.iter().map(|p| chart_coords(p, &chart)).collect();
        let raw = hull_facets(&coords, d);
        let facets: Vec<ChartFacet> = raw
            .into_iter()
            .map(|(normal, offset, members)| ChartFacet {
                normal,
                offset,
                mask: members.iter().fold(0, |m, &i| m | (1u64 << i)),
            })
            .collect();
        if facets.iter().any(|f| f.offset.is_negative()) {
            return Err(Error::OriginNotContained);
        }
        let on_boundary = facets.iter().any(|f| f.offset.is_zero());
        let origin = if on_boundary {
            OriginPosition::RelativeBoundary
        } else if d == n {
            OriginPosition::Interior
        } else {
            OriginPosition::RelativeInteriorOfLowerDim
        };
        Ok(Polytope {
            inner: Arc::new(Inner {
                n,
                vertices,
                dim: d,
                chart,
                facets,
                origin,
                lattice: OnceLock::new(),
                facet_data: OnceLock::new(),
                simplices: OnceLock::new(),
            }),
        })
    }

    /// `{o}` in `R^n`.
    pub fn origin(n: usize) -> Polytope {
        Self::convex_hull(&[Vector::zeros(n)]).expect("origin is a polytope")
    }

    /// `s T^d = [o, s e_1, ..., s e_d]` in `R^n`.
    pub fn standard_simplex(d: usize, n: usize, s: &Rational) -> Result<Polytope> {
        if d < 1 || d > n {
            return Err(Error::DimensionOutOfRange { dim: d, ambient: n });
        }
        if !s.is_positive() {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        let mut pts = vec![Vector::zeros(n)];
        pts.extend((0..d).map(|i| Vector::unit(n, i).scale(s)));
        Self::convex_hull(&pts)
    }

    /// `s T^{d-1}-hat = [o, s e_1, s e_3, ..., s e_d]` in `R^n`, for `2 <= d <= n`.
    pub fn hat_simplex(d: usize, n: usize, s: &Rational) -> Result<Polytope> {
        if d < 2 || d > n {
            return Err(Error::DimensionOutOfRange { dim: d, ambient: n });
        }
        if !s.is_positive() {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        let mut pts = vec![Vector::zeros(n), Vector::unit(n, 0).scale(s)];
        pts.extend((2..d).map(|i| Vector::unit(n, i).scale(s)));
        Self::convex_hull(&pts)
    }

    /// Axis-parallel box `prod [lo_i, hi_i]` (must contain the origin).
    pub fn cuboid(bounds: &[(Rational, Rational)]) -> Result<Polytope> {
        let n = bounds.len();
        let pts: Vec<Vector> = (0..1usize << n)
            .map(|m| {
                Vector(
                    (0..n)
                        .map(|i| if m >> i & 1 == 1 { bounds[i].1.clone() } else { bounds[i].0.clone() })
                        .collect(),
                )
            })
            .collect();
        Self::convex_hull(&pts)
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.inner.vertices
    }

    pub fn origin_position(&self) -> OriginPosition {
        self.inner.origin
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.inner.dim == self.inner.n
    }

    pub fn is_simplex(&self) -> bool {
        self.inner.vertices.len() == self.inner.dim + 1
    }

    pub fn has_origin_vertex(&self) -> bool {
        self.inner.vertices.iter().any(Vector::is_zero)
    }

    pub(crate) fn chart_facets(&self) -> &[ChartFacet] {
        &self.inner.facets
    }

    pub(crate) fn chart(&self, v: &Vector) -> Vec<Rational> {
        chart_coords(v, &self.inner.chart)
    }

    /// `h_P(x) = max_v x . v`.
    pub fn support(&self, x: &Vector) -> Rational {
        self.inner.vertices.iter().map(|v| v.dot(x)).max().expect("polytope has a vertex")
    }

    pub fn support_checked(&self, x: &Vector) -> Result<Rational> {
        x.check_dim(self.n())?;
        Ok(self.support(x))
    }

    /// `x . v` for every vertex, in vertex order.
    pub fn vertex_dots(&self, x: &Vector) -> Vec<Rational> {
        self.inner.vertices.iter().map(|v| v.dot(x)).collect()
    }

    pub fn vertex_subset(&self, mask: VertexSet) -> Vec<Vector> {
        bits(mask).into_iter().map(|i| self.inner.vertices[i].clone()).collect()
    }

    pub fn contains(&self, y: &Vector) -> bool {
        if y.dim() != self.n() {
            return false;
        }
        // y must be in the linear hull and satisfy all chart facets
        let mut rows: Matrix = self.inner.vertices.iter().map(|v| v.0.clone()).collect();
        let r = linalg::rank(&rows);
        rows.push(y.0.clone());
        if linalg::rank(&rows) != r {
            return false;
        }
        let c = self.chart(y);
        self.inner.facets.iter().all(|f| linalg::dot(&f.normal, &c) <= f.offset)
    }

    pub fn face_lattice(&self) -> &FaceLattice {
        self.inner.lattice.get_or_init(|| self.compute_lattice())
    }

    pub fn faces(&self, j: usize) -> &[Face] {
        self.face_lattice().faces(j)
    }

    /// `j`-dimensional faces containing the origin, `1 <= j <= dim P - 1`.
    pub fn faces_through_origin(&self, j: usize) -> Vec<Face> {
        if j == 0 || j + 1 > self.dim() {
            return Vec::new();
        }
        self.face_lattice().faces_through_origin(j)
    }

    fn affine_rank(&self, mask: VertexSet) -> usize {
        let idx = bits(mask);
        let base = &self.inner.vertices[idx[0]];
        let rows: Matrix = idx[1..].iter().map(|&i| (&self.inner.vertices[i] - base).0).collect();
        if rows.is_empty() {
            0
        } else {
            linalg::rank(&rows)
        }
    }

    fn compute_lattice(&self) -> FaceLattice {
        let d = self.dim();
        let mut by_dim: Vec<Vec<Face>> = vec![Vec::new(); d];
        if d == 0 {
            return FaceLattice { by_dim };
        }
        let facets = &self.inner.facets;
        let origin_mask: Option<VertexSet> = facets
            .iter()
            .filter(|f| f.offset.is_zero())
            .map(|f| f.mask)
            .reduce(|a, b| a & b);
        let mut seen: BTreeSet<VertexSet> = facets.iter().map(|f| f.mask).collect();
        let mut queue: Vec<VertexSet> = seen.iter().copied().collect();
        while let Some(face) = queue.pop() {
            for f in facets {
                let meet = face & f.mask;
                if meet != 0 && seen.insert(meet) {
                    queue.push(meet);
                }
            }
        }
        for mask in seen {
            let j = self.affine_rank(mask);
            let contains_origin = origin_mask.is_some_and(|o| mask & o == o);
            by_dim[j].push(Face { mask, dim: j, contains_origin });
        }
        FaceLattice { by_dim }
    }

    /// Pulling triangulation of the face `mask` of dimension `k`, as vertex sets.
    fn pulling(&self, mask: VertexSet, k: usize) -> Vec<VertexSet> {
        if mask.count_ones() as usize == k + 1 {
            return vec![mask];
        }
        let apex = mask & mask.wrapping_neg();
        let lattice = self.face_lattice();
        let mut out = Vec::new();
        for g in lattice.faces(k - 1) {
            if g.mask & !mask == 0 && g.mask & apex == 0 {
                out.extend(self.pulling(g.mask, k - 1).into_iter().map(|s| s | apex));
            }
        }
        out
    }

    /// Triangulation of `P` into `dim P`-simplices (vertex index lists).
    pub fn triangulation(&self) -> &[Vec<usize>] {
        self.inner.simplices.get_or_init(|| {
            let all = (1u64 << self.inner.vertices.len()) - 1;
            self.pulling(all, self.dim()).into_iter().map(bits).collect()
        })
    }

    /// n-dimensional volume (zero when lower-dimensional).
    pub fn volume(&self) -> Rational {
        if !self.is_full_dimensional() {
            return Rational::zero();
        }
        let n = self.n();
        let fact: Rational = Rational::from_integer((1..=n as u64).product::<u64>().into());
        self.triangulation()
            .iter()
            .map(|s| simplex_abs_det(&self.vertex_list(s)))
            .fold(Rational::zero(), |a, b| a + b)
            / fact
    }

    pub fn vertex_list(&self, idx: &[usize]) -> Vec<Vector> {
        idx.iter().map(|&i| self.inner.vertices[i].clone()).collect()
    }

    /// Sum of oriented `(n-1)`-simplex cross products over a triangulation of the face
    /// `mask` (dimension `n-1`), oriented along `reference`: `vol_{n-1}(F) u_F`.
    fn area_vector_of(&self, mask: VertexSet, reference: &[Rational]) -> Vector {
        let n = self.n();
        let fact: Rational = Rational::from_integer((1..n as u64).product::<u64>().into());
        let mut total = Vector::zeros(n);
        for s in self.pulling(mask, n - 1) {
            let vs = self.vertex_subset(s);
            let rows: Matrix = vs[1..].iter().map(|v| (v - &vs[0]).0).collect();
            let mut c = Vector(linalg::cross(&rows));
            if linalg::dot(&c.0, reference).is_negative() {
                c = -&c;
            }
            total = &total + &c;
        }
        total.scale(&fact.recip())
    }

    /// Facet data of a full-dimensional polytope; empty when `dim P < n`.
    pub fn facet_data(&self) -> &[FacetData] {
        self.inner.facet_data.get_or_init(|| {
            if !self.is_full_dimensional() {
                return Vec::new();
            }
            self.inner
                .facets
                .iter()
                .map(|f| {
                    let normal = self.area_vector_of(f.mask, &f.normal);
                    let offset = self.support(&normal);
                    FacetData {
                        measure_sq: normal.norm_sq(),
                        contains_origin: offset.is_zero(),
                        offset,
                        normal,
                        mask: f.mask,
                    }
                })
                .collect()
        })
    }

    /// For `dim P = n - 1`: `vol_{n-1}(P) u` for a unit normal `u` of `lin P`
    /// (sign fixed by the first nonzero coordinate being positive).
    pub fn hyperplane_area_vector(&self) -> Option<Vector> {
        let n = self.n();
        if self.dim() + 1 != n || n < 2 {
            return None;
        }
        let mut rows: Matrix = self.inner.vertices.iter().map(|v| v.0.clone()).collect();
        let pivots = linalg::rref(&mut rows);
        let basis: Matrix = rows[..pivots.len()].to_vec();
        let mut reference = linalg::cross(&basis);
        if reference.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative()) {
            reference.iter_mut().for_each(|v| *v = -v.clone());
        }
        let all = (1u64 << self.inner.vertices.len()) - 1;
        Some(self.area_vector_of(all, &reference))
    }

    pub fn neg(&self) -> Polytope {
        let pts: Vec<Vector> = self.inner.vertices.iter().map(|v| -v).collect();
        Self::convex_hull(&pts).expect("reflection keeps the origin")
    }

    pub fn scale(&self, s: &Rational) -> Result<Polytope> {
        if s.is_negative() {
            return Err(Error::InvalidParameter("negative dilation".into()));
        }
        let pts: Vec<Vector> = self.inner.vertices.iter().map(|v| v.scale(s)).collect();
        Self::convex_hull(&pts)
    }

    pub fn apply_linear(&self, a: &LinearMap) -> Result<Polytope> {
        if a.dim() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: a.dim() });
        }
        if a.det().is_zero() {
            return Err(Error::SingularMap);
        }
        let pts: Vec<Vector> = self.inner.vertices.iter().map(|v| a.apply(v)).collect();
        Self::convex_hull(&pts)
    }

    /// Split by the hyperplane through the origin with the given normal.
    pub fn halfspace_split(&self, normal: &Vector) -> Result<SplitCase> {
        normal.check_dim(self.n())?;
        if normal.is_zero() {
            return Err(Error::InvalidParameter("zero hyperplane normal".into()));
        }
        let s: Vec<Rational> = self.vertex_dots(normal);
        let mut plus: Vec<Vector> = Vec::new();
        let mut minus: Vec<Vector> = Vec::new();
        let mut section: Vec<Vector> = vec![Vector::zeros(self.n())];
        for (v, sv) in self.inner.vertices.iter().zip(&s) {
            if !sv.is_negative() {
                plus.push(v.clone());
            }
            if !sv.is_positive() {
                minus.push(v.clone());
            }
            if sv.is_zero() {
                section.push(v.clone());
            }
        }
        if self.dim() >= 1 {
            for e in self.faces(1) {
                let ij = bits(e.mask);
                let (i, j) = (ij[0], ij[1]);
                if (s[i].is_positive() && s[j].is_negative()) || (s[i].is_negative() && s[j].is_positive()) {
                    let t = &s[i] / (&s[i] - &s[j]);
                    let vi = &self.inner.vertices[i];
                    let vj = &self.inner.vertices[j];
                    let p = vi + &(vj - vi).scale(&t);
                    plus.push(p.clone());
                    minus.push(p.clone());
                    section.push(p);
                }
            }
        }
        let degenerate = !s.iter().any(Signed::is_positive) || !s.iter().any(Signed::is_negative);
        plus.push(Vector::zeros(self.n()));
        minus.push(Vector::zeros(self.n()));
        Ok(SplitCase {
            parent: self.clone(),
            normal: normal.clone(),
            positive: Self::convex_hull(&plus)?,
            negative: Self::convex_hull(&minus)?,
            section: Self::convex_hull(&section)?,
            degenerate,
        })
    }

    /// Orthogonal projection onto `span(basis)`, returned in ambient coordinates.
    pub fn project(&self, basis: &[Vector]) -> Result<Polytope> {
        let ortho = gram_schmidt(basis, self.n())?;
        let pts: Vec<Vector> = self.inner.vertices.iter().map(|v| project_onto(v, &ortho)).collect();
        Self::convex_hull(&pts)
    }

    /// `x|P`: orthogonal projection of `x` onto `lin P`.
    pub fn project_vector(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.n())?;
        let mut rows: Matrix = self.inner.vertices.iter().map(|v| v.0.clone()).collect();
        let k = linalg::rref(&mut rows).len();
        if k == 0 {
            return Ok(Vector::zeros(self.n()));
        }
        let basis: Vec<Vector> = rows[..k].iter().cloned().map(Vector).collect();
        let ortho = gram_schmidt(&basis, self.n())?;
        Ok(project_onto(x, &ortho))
    }

    pub fn to_file(&self) -> PolytopeFile {
        PolytopeFile { n: self.n(), vertices: self.inner.vertices.clone(), mode: None }
    }
}

fn simplex_abs_det(vs: &[Vector]) -> Rational {
    let rows: Matrix = vs[1..].iter().map(|v| (v - &vs[0]).0).collect();
    linalg::abs_det(&rows)
}

/// Exact Gram-Schmidt producing an orthogonal (unnormalized) basis.
pub fn gram_schmidt(basis: &[Vector], n: usize) -> Result<Vec<Vector>> {
    let mut out: Vec<Vector> = Vec::new();
    for b in basis {
        b.check_dim(n)?;
        let mut v = b.clone();
        for q in &out {
            let c = v.dot(q) / q.norm_sq();
            v = &v - &q.scale(&c);
        }
        if v.is_zero() {
            return Err(Error::DegenerateBasis);
        }
        out.push(v);
    }
    Ok(out)
}

pub fn project_onto(x: &Vector, ortho: &[Vector]) -> Vector {
    ortho.iter().fold(Vector::zeros(x.dim()), |acc, q| &acc + &q.scale(&(x.dot(q) / q.norm_sq())))
}

/// Largest distance between matched vertices of two float vertex sets (each vertex of
/// one set to the nearest vertex of the other); bounds the Hausdorff distance.
pub fn vertex_hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let dist = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let one_way = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter()
            .map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// A polytope cut by a hyperplane through the origin.
#[derive(Clone, Debug)]
pub struct SplitCase {
    pub parent: Polytope,
    pub normal: Vector,
    /// `P ∩ {x . normal >= 0}`
    pub positive: Polytope,
    /// `P ∩ {x . normal <= 0}`
    pub negative: Polytope,
    pub section: Polytope,
    /// The hyperplane misses the relative interior; one piece equals the parent.
    pub degenerate: bool,
}

/// On-disk polytope: `{"n": 3, "vertices": [["0","1/2","1"], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub n: usize,
    pub vertices: Vec<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

impl PolytopeFile {
    pub fn into_polytope(self) -> Result<Polytope> {
        if let Some(m) = &self.mode {
            if m != "float" && m != "exact" {
                return Err(Error::Parse(format!("unknown mode {m:?}")));
            }
        }
        for v in &self.vertices {
            v.check_dim(self.n)?;
        }
        Polytope::convex_hull(&self.vertices)
    }
}

impl Polytope {
    pub fn from_json(text: &str) -> Result<Polytope> {
        let file: PolytopeFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_polytope()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("polytope serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn v(xs: &[i64]) -> Vector {
        Vector::from_ints(xs)
    }

    fn unit_cube() -> Polytope {
        Polytope::cuboid(&[(int(0), int(1)), (int(0), int(1)), (int(0), int(1))]).unwrap()
    }

    #[test]
    fn triangle_hull_drops_interior_point() {
        let p = Polytope::convex_hull(&[v(&[0, 0]), v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.vertices().len(), 3);
        let q = Polytope::convex_hull(&[
            v(&[0, 0]),
            v(&[1, 0]),
            v(&[0, 1]),
            Vector(vec![rat(1, 2), rat(1, 4)]),
        ])
        .unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn cube_counts() {
        let c = unit_cube();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.dim(), 3);
        assert_eq!(c.chart_facets().len(), 6);
        assert_eq!(c.faces(1).len(), 12);
        assert_eq!(c.faces(0).len(), 8);
        assert_eq!(c.volume(), int(1));
        assert_eq!(c.origin_position(), OriginPosition::RelativeBoundary);
    }

    #[test]
    fn hull_errors() {
        assert_eq!(Polytope::convex_hull(&[]).unwrap_err(), Error::EmptyInput);
        assert_eq!(
            Polytope::convex_hull(&[v(&[1, 0]), v(&[0, 1])]).unwrap_err(),
            Error::OriginNotContained
        );
        assert_eq!(
            Polytope::convex_hull(&[v(&[1, 1]), v(&[2, 0]), v(&[0, 2])]).unwrap_err(),
            Error::OriginNotContained
        );
    }

    #[test]
    fn many_points_reduce_to_extremes() {
        // 5x5x5 integer grid in [-2,2]^3: only the 8 corners survive
        let mut pts = Vec::new();
        for a in -2..=2 {
            for b in -2..=2 {
                for c in -2..=2 {
                    pts.push(v(&[a, b, c]));
                }
            }
        }
        let p = Polytope::convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.origin_position(), OriginPosition::Interior);
    }

    #[test]
    fn simplex_lattice_through_origin() {
        let t = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
        let edges = t.faces_through_origin(1);
        let tris = t.faces_through_origin(2);
        assert_eq!(edges.len(), 3);
        assert_eq!(tris.len(), 3);
        let c = unit_cube();
        assert_eq!(c.faces_through_origin(1).len(), 3);
        assert_eq!(c.faces_through_origin(2).len(), 3);
        let sym = Polytope::cuboid(&[(int(-1), int(1)), (int(-1), int(1)), (int(-1), int(1))]).unwrap();
        for j in 0..3 {
            assert!(sym.faces_through_origin(j).is_empty());
        }
    }

    #[test]
    fn triangle_facet_data() {
        let t = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
        let mut fd: Vec<(Vector, Rational, Rational)> = t
            .facet_data()
            .iter()
            .map(|f| (f.normal.clone(), f.offset.clone(), f.measure_sq.clone()))
            .collect();
        fd.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(
            fd,
            vec![
                (v(&[-1, 0]), int(0), int(1)),
                (v(&[0, -1]), int(0), int(1)),
                (v(&[1, 1]), int(1), int(2)),
            ]
        );
        let slanted = t.facet_data().iter().find(|f| !f.contains_origin).unwrap();
        assert!((slanted.unit_offset() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((slanted.measure() - 2f64.sqrt()).abs() < 1e-15);
        let seg = Polytope::standard_simplex(1, 3, &int(1)).unwrap();
        assert!(seg.facet_data().is_empty());
    }

    #[test]
    fn cube_facet_data() {
        for f in unit_cube().facet_data() {
            assert_eq!(f.measure_sq, int(1));
            let nonzero: Vec<&Rational> = f.normal.0.iter().filter(|c| !c.is_zero()).collect();
            assert_eq!(nonzero.len(), 1);
            if f.contains_origin {
                assert_eq!(nonzero[0], &int(-1));
                assert_eq!(f.offset, int(0));
            } else {
                assert_eq!(nonzero[0], &int(1));
                assert_eq!(f.offset, int(1));
            }
        }
    }

    #[test]
    fn split_square() {
        let sq = Polytope::cuboid(&[(int(-1), int(1)), (int(-1), int(1))]).unwrap();
        let split = sq.halfspace_split(&v(&[1, 0])).unwrap();
        assert_eq!(split.positive, Polytope::cuboid(&[(int(0), int(1)), (int(-1), int(1))]).unwrap());
        assert_eq!(split.negative, Polytope::cuboid(&[(int(-1), int(0)), (int(-1), int(1))]).unwrap());
        assert_eq!(split.section, Polytope::convex_hull(&[v(&[0, -1]), v(&[0, 1])]).unwrap());
        assert!(!split.degenerate);
        let edge = sq.halfspace_split(&v(&[1, 1])).unwrap();
        assert_eq!(edge.section.dim(), 1);
    }

    #[test]
    fn split_tetrahedron_into_tetrahedra() {
        let t = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
        // H_{1/3}: normal (1 - 1/3) e1 - 1/3 e2 ~ (2, -1, 0)
        let split = t.halfspace_split(&v(&[2, -1, 0])).unwrap();
        assert_eq!(split.positive.vertices().len(), 4);
        assert_eq!(split.negative.vertices().len(), 4);
        assert_eq!(split.section.dim(), 2);
        assert_eq!(&split.positive.volume() + &split.negative.volume(), t.volume());
    }

    #[test]
    fn degenerate_split_flagged() {
        let t = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
        let s = t.halfspace_split(&v(&[1, 0])).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.positive, t);
        assert_eq!(s.section.dim(), 1);
    }

    #[test]
    fn projections() {
        let t3 = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
        let img = t3.project(&[Vector::unit(3, 0), Vector::unit(3, 1)]).unwrap();
        assert_eq!(img, Polytope::standard_simplex(2, 3, &int(1)).unwrap());
        let seg = Polytope::standard_simplex(1, 3, &int(1)).unwrap();
        assert_eq!(seg.project_vector(&v(&[1, 2, 3])).unwrap(), v(&[1, 0, 0]));
        let t2 = Polytope::standard_simplex(2, 3, &int(1)).unwrap();
        assert_eq!(t2.project_vector(&v(&[4, 5, 0])).unwrap(), v(&[4, 5, 0]));
        assert_eq!(t3.project(&[v(&[1, 0, 0]), v(&[2, 0, 0])]).unwrap_err(), Error::DegenerateBasis);
    }

    #[test]
    fn simplices_and_hat() {
        let seg = Polytope::standard_simplex(1, 3, &int(1)).unwrap();
        assert_eq!(seg.vertices(), &[v(&[0, 0, 0]), v(&[1, 0, 0])]);
        let t = Polytope::standard_simplex(3, 3, &int(2)).unwrap();
        assert_eq!(t.vertices().len(), 4);
        assert!(t.vertices().contains(&v(&[0, 2, 0])));
        let hat = Polytope::hat_simplex(3, 3, &int(1)).unwrap();
        assert_eq!(hat.vertices(), &[v(&[0, 0, 0]), v(&[0, 0, 1]), v(&[1, 0, 0])]);
        assert!(Polytope::standard_simplex(4, 3, &int(1)).is_err());
    }

    #[test]
    fn lower_dimensional_area_vector() {
        let t2 = Polytope::standard_simplex(2, 3, &int(2)).unwrap();
        assert_eq!(t2.hyperplane_area_vector().unwrap(), v(&[0, 0, 2]));
        assert!(Polytope::standard_simplex(1, 3, &int(1)).unwrap().hyperplane_area_vector().is_none());
    }

    #[test]
    fn json_round_trip() {
        let t = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
        let back = Polytope::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let floaty = Polytope::from_json(r#"{"n":2,"vertices":[[0,0],[0.5,0],[0,0.25]],"mode":"float"}"#).unwrap();
        assert!(floaty.vertices().contains(&Vector(vec![rat(1, 2), int(0)])));
        assert!(Polytope::from_json(r#"{"n":2,"vertices":[[1,1],[2,1]]}"#).is_err());
    }

    #[test]
    fn contains_points() {
        let t = Polytope::standard_simplex(2, 3, &int(1)).unwrap();
        assert!(t.contains(&Vector(vec![rat(1, 3), rat(1, 3), int(0)])));
        assert!(!t.contains(&Vector(vec![rat(1, 3), rat(1, 3), rat(1, 9)])));
        assert!(!t.contains(&v(&[1, 1, 0])));
    }
}
