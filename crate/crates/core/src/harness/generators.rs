//! Test-instance generators: simplex splits, union chains and SL(n) batteries.

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::{Polytope, SplitCase};
use crate::probes;
use crate::scalar::{Num, Rational};
use crate::vector::{transform_phi, transform_phi_scale_free, LinearMap, PhiKind, Transform, Vector};

/// `(K, L, K ∪ L, K ∩ L)` with all four convex.
#[derive(Clone, Debug)]
pub struct Quadruple {
    pub k: Polytope,
    pub l: Polytope,
    pub union: Polytope,
    pub inter: Polytope,
}

impl From<&SplitCase> for Quadruple {
    fn from(s: &SplitCase) -> Self {
        Quadruple { k: s.positive.clone(), l: s.negative.clone(), union: s.parent.clone(), inter: s.section.clone() }
    }
}

impl Quadruple {
    /// Convexity side conditions, checked exactly: `K ∪ L` is the hull of both pieces,
    /// volumes add up, and `K ∩ L` is the common section.
    pub fn is_sound(&self) -> bool {
        let both: Vec<Vector> = self.k.vertices().iter().chain(self.l.vertices()).cloned().collect();
        let Ok(hull) = Polytope::convex_hull(&both) else {
            return false;
        };
        hull == self.union
            && &self.k.volume() + &self.l.volume() == self.union.volume()
            && self.inter.vertices().iter().all(|v| self.k.contains(v) && self.l.contains(v))
    }
}

/// Normal of `H_λ`: `(1 - λ) e1 - λ e2`; `H^- = {x . u <= 0}`.
pub fn h_lambda_normal(lambda: &Rational, n: usize) -> Vector {
    let one = Rational::one();
    &Vector::unit(n, 0).scale(&(&one - lambda)) - &Vector::unit(n, 1).scale(lambda)
}

#[derive(Clone, Debug)]
pub struct SimplexSplit {
    pub n: usize,
    pub d: usize,
    pub lambda: Rational,
    pub s: Rational,
    pub case: SplitCase,
    /// `M_3(sT^d)` and `M_4(sT^d)` for the scale-free maps `M_3`, `M_4`: the predicted
    /// negative and positive pieces.
    pub predicted_negative: Polytope,
    pub predicted_positive: Polytope,
    /// `φ_1 sT^d` when `d < n`.
    pub phi1_image: Option<Polytope>,
}

impl SimplexSplit {
    pub fn key(&self) -> String {
        format!("n={} d={} lambda={} s={}", self.n, self.d, self.lambda, self.s)
    }

    pub fn quadruple(&self) -> Quadruple {
        Quadruple::from(&self.case)
    }

    /// Compares the pieces with the predicted linear images.
    pub fn predictions_hold(&self) -> bool {
        self.case.negative == self.predicted_negative
            && self.case.positive == self.predicted_positive
            && self.phi1_image.as_ref().is_none_or(|p| p == &self.case.negative)
    }

    /// Double-mode check of `sT^n ∩ H_λ^- = φ_3 λ^{1/n} sT^n` (vertex distance).
    pub fn phi3_float_distance(&self) -> Result<Option<f64>> {
        if self.d != self.n {
            return Ok(None);
        }
        let Transform::Float(map) = transform_phi(PhiKind::Three, &self.lambda, self.n)? else {
            return Ok(None);
        };
        let shrink = crate::scalar::to_f64(&self.lambda).powf(1.0 / self.n as f64);
        let image: Vec<Vec<f64>> = Polytope::standard_simplex(self.d, self.n, &self.s)?
            .vertices()
            .iter()
            .map(|v| map.apply(&v.to_f64().iter().map(|c| c * shrink).collect::<Vec<_>>()))
            .collect();
        let piece: Vec<Vec<f64>> = self.case.negative.vertices().iter().map(Vector::to_f64).collect();
        Ok(Some(crate::polytope::vertex_hausdorff(&image, &piece)))
    }
}

/// Exact splits of `sT^d` by `H_λ` over the given grids.
pub fn generate_simplex_splits(n: usize, d: usize, lambdas: &[Rational], scales: &[Rational]) -> Result<Vec<SimplexSplit>> {
    if d < 2 || d > n {
        return Err(Error::DimensionOutOfRange { dim: d, ambient: n });
    }
    let mut out = Vec::new();
    for lambda in lambdas {
        if !lambda.is_positive() || lambda >= &Rational::one() {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} outside (0, 1)")));
        }
        let m3 = transform_phi_scale_free(PhiKind::Three, lambda, n)?;
        let m4 = transform_phi_scale_free(PhiKind::Four, lambda, n)?;
        let phi1 = match transform_phi(PhiKind::One, lambda, n)? {
            Transform::Exact(m) => Some(m),
            Transform::Float(_) => None,
        };
        for s in scales {
            let t = Polytope::standard_simplex(d, n, s)?;
            let case = t.halfspace_split(&h_lambda_normal(lambda, n))?;
            let phi1_image = match (&phi1, d < n) {
                (Some(m), true) => Some(t.apply_linear(m)?),
                _ => None,
            };
            out.push(SimplexSplit {
                n,
                d,
                lambda: lambda.clone(),
                s: s.clone(),
                predicted_negative: t.apply_linear(&m3)?,
                predicted_positive: t.apply_linear(&m4)?,
                phi1_image,
                case,
            });
        }
    }
    Ok(out)
}

/// Polytopes of a union chain together with the split quadruples that assemble them.
#[derive(Clone, Debug)]
pub struct UnionChain {
    pub n: usize,
    pub seed: u64,
    /// `levels[0]` holds simplices; `levels[i]` unions of pieces from lower levels.
    pub levels: Vec<Vec<Polytope>>,
    pub quadruples: Vec<Quadruple>,
}

impl UnionChain {
    pub fn root(&self) -> &Polytope {
        &self.levels.last().expect("chain has a level")[0]
    }
}

const MAX_ATTEMPTS: usize = 50;

fn random_apex_polytope(rng: &mut impl Rng, n: usize, extra: usize) -> Result<Polytope> {
    // points with positive coordinate sum keep o a vertex
    let mut pts = vec![Vector::zeros(n)];
    while pts.len() < n + 1 + extra {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=4)).collect();
        if v.iter().sum::<i64>() > 0 {
            pts.push(Vector::from_ints(&v));
        }
    }
    Polytope::convex_hull(&pts)
}

/// Cuts `p` by a hyperplane through `o` and `n - 1` other vertices, chosen at random among
/// those giving a proper split.
fn random_cut(rng: &mut impl Rng, p: &Polytope) -> Option<SplitCase> {
    let n = p.n();
    let others: Vec<&Vector> = p.vertices().iter().filter(|v| !v.is_zero()).collect();
    for _ in 0..MAX_ATTEMPTS {
        let chosen: Vec<&Vector> = others.choose_multiple(rng, n - 1).copied().collect();
        if chosen.len() < n - 1 {
            return None;
        }
        let rows: Vec<Vec<Rational>> = chosen.iter().map(|v| v.0.clone()).collect();
        let normal = Vector(crate::linalg::cross(&rows));
        if normal.is_zero() {
            continue;
        }
        if let Ok(split) = p.halfspace_split(&normal) {
            if !split.degenerate && split.positive.is_full_dimensional() && split.negative.is_full_dimensional() {
                return Some(split);
            }
        }
    }
    None
}

/// A chain of depth `depth`: a random polytope with `o` as a vertex, cut recursively
/// through the origin until the pieces are simplices or the depth is used up. Each cut is
/// one quadruple `(K, L, K ∪ L, K ∩ L)`.
pub fn generate_union_chain(n: usize, depth: usize, seed: u64) -> Result<UnionChain> {
    if !(1..=3).contains(&depth) {
        return Err(Error::InvalidParameter(format!("depth {depth} outside 1..=3")));
    }
    if !(2..=crate::polytope::MAX_AMBIENT).contains(&n) {
        return Err(Error::UnsupportedAmbient(n));
    }
    let mut rng = probes::rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        let root = if depth == 1 {
            random_apex_polytope(&mut rng, n, 0)?
        } else {
            random_apex_polytope(&mut rng, n, depth)?
        };
        if !root.is_full_dimensional() || (depth == 1 && !root.is_simplex()) {
            continue;
        }
        let mut levels: Vec<Vec<Polytope>> = vec![Vec::new(); depth];
        let mut quadruples = Vec::new();
        if build(&mut rng, &root, depth - 1, &mut levels, &mut quadruples) {
            return Ok(UnionChain { n, seed, levels, quadruples });
        }
    }
    Err(Error::GenerationFailed(format!("no chain for n = {n}, depth = {depth}, seed = {seed}")))
}

fn build(
    rng: &mut impl Rng,
    p: &Polytope,
    level: usize,
    levels: &mut Vec<Vec<Polytope>>,
    quads: &mut Vec<Quadruple>,
) -> bool {
    levels[level].push(p.clone());
    if level == 0 || p.is_simplex() {
        return true;
    }
    let Some(split) = random_cut(rng, p) else {
        return false;
    };
    quads.push(Quadruple::from(&split));
    build(rng, &split.positive, level - 1, levels, quads) && build(rng, &split.negative, level - 1, levels, quads)
}

/// `count` seeded integer unimodular maps (products of elementary row operations).
pub fn unimodular_maps(n: usize, count: usize, seed: u64) -> Vec<LinearMap> {
    let mut rng = probes::rng(seed);
    (0..count)
        .map(|_| {
            let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
            for _ in 0..2 * n {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let c: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
                for k in 0..n {
                    m[i][k] += c * m[j][k];
                }
            }
            // an odd permutation with a sign flip keeps det = 1 and mixes coordinates
            if rng.gen_bool(0.5) {
                m.swap(0, 1);
                m[0].iter_mut().for_each(|v| *v = -*v);
            }
            LinearMap::from_ints(&m).expect("square")
        })
        .collect()
}

/// The standard battery: seeded unimodular maps plus `φ_1`, `φ_2` at `λ ∈ {1/4, 1/2}`.
pub fn transform_battery(n: usize, seed: u64) -> Result<Vec<(String, LinearMap)>> {
    let mut out: Vec<(String, LinearMap)> =
        unimodular_maps(n, 10, seed).into_iter().enumerate().map(|(i, m)| (format!("unimodular#{i}"), m)).collect();
    for lambda in [Rational::new(1.into(), 4.into()), Rational::new(1.into(), 2.into())] {
        for kind in [PhiKind::One, PhiKind::Two] {
            if let Transform::Exact(m) = transform_phi(kind, &lambda, n)? {
                out.push((format!("{kind:?}(lambda={lambda})"), m));
            }
        }
    }
    Ok(out)
}

/// Serializable summary of a generated split.
#[derive(Clone, Debug, Serialize)]
pub struct SplitSummary {
    pub key: String,
    pub positive_vertices: usize,
    pub negative_vertices: usize,
    pub section_dim: usize,
    pub degenerate: bool,
}

impl From<&SimplexSplit> for SplitSummary {
    fn from(s: &SimplexSplit) -> Self {
        SplitSummary {
            key: s.key(),
            positive_vertices: s.case.positive.vertices().len(),
            negative_vertices: s.case.negative.vertices().len(),
            section_dim: s.case.section.dim(),
            degenerate: s.case.degenerate,
        }
    }
}

pub fn rational_grid(values: &[Num]) -> Vec<Rational> {
    values.iter().map(|v| v.0.clone()).collect()
}

pub fn default_lambdas() -> Vec<Rational> {
    [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4)].iter().map(|&(a, b)| Rational::new(a.into(), b.into())).collect()
}

pub fn default_scales() -> Vec<Rational> {
    [(1, 2), (1, 1), (2, 1)].iter().map(|&(a, b)| Rational::new(a.into(), b.into())).collect()
}

/// `true` when every chain leaf is a simplex.
pub fn leaves_are_simplices(chain: &UnionChain) -> bool {
    chain.levels[0].iter().all(Polytope::is_simplex)
}

/// Exact `K ∩ H = R ∩ H` consistency of a quadruple's section with its union.
pub fn section_consistent(q: &Quadruple) -> bool {
    q.inter.dim() + 1 == q.union.dim() && q.inter.vertices().iter().all(|v| q.union.contains(v))
        && q.inter.volume().is_zero()
}
