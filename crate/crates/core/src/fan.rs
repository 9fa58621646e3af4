//! Weighted rational fans of dimension one and two.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{
    are_parallel, dual_unit, kernel_basis, rank_of, saturate, solve_rational, wedge_content, IntMatrix, LatticeError,
    LatticeVector, RationalSolution,
};
use crate::scalar::{Rational, Scalar};
use crate::trop::TrFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("cone {cone} refers to ray {index}, but the fan has {nrays} rays")]
    RayIndexOutOfRange { cone: usize, index: usize, nrays: usize },
    #[error("cone {cone} has {len} generators; only rays and 2-cones are supported")]
    ConeSize { cone: usize, len: usize },
    #[error("expected {expected} weights (one per top-dimensional cone), found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("ray {ray} has dimension {found}, ambient dimension is {expected}")]
    RayDimension { ray: usize, expected: usize, found: usize },
    #[error("fan has no cones")]
    Empty,
    #[error("operation needs a 1-dimensional fan, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("fan dimension {0} is not supported")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// The cone generated by primitive vectors (none for the origin).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone<S> {
    pub generators: Vec<LatticeVector<S>>,
}

impl<S: Scalar> Cone<S> {
    pub fn dim(&self) -> usize {
        rank_of(&self.generators)
    }

    /// Membership of a lattice point, exact.
    pub fn contains(&self, v: &LatticeVector<S>) -> bool {
        if v.is_zero() {
            return true;
        }
        match cone_coordinates(&self.generators, v) {
            Some(c) => c.iter().all(|x| !x.is_negative()),
            None => false,
        }
    }

    /// A point in the relative interior: the sum of the generators.
    pub fn interior_point(&self) -> LatticeVector<S> {
        let n = self.generators.first().map_or(0, LatticeVector::dim);
        self.generators.iter().fold(LatticeVector::zeros(n), |acc, g| &acc + g)
    }
}

/// Coefficients of `v` in the (independent) generators, if `v` lies in their span.
pub fn cone_coordinates<S: Scalar>(gens: &[LatticeVector<S>], v: &LatticeVector<S>) -> Option<Vec<Rational<S>>> {
    let n = v.dim();
    let rows: Vec<Vec<S>> = (0..n).map(|i| gens.iter().map(|g| g[i].clone()).collect()).collect();
    match solve_rational(&rows, v.coords(), gens.len()) {
        RationalSolution::Unique(x) => Some(x),
        _ => None,
    }
}

/// The weight-0 or intermediate 0-cycle at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZeroCycle<S> {
    pub weight: S,
}

/// A pure-dimensional rational fan with integer weights on its top-dimensional cones.
///
/// Rays are stored once; cones refer to them by index. Lower-dimensional faces are
/// implied. Cones listed below the top dimension are kept so that `validate` can
/// report them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedFan<S> {
    n: usize,
    dim: usize,
    rays: Vec<LatticeVector<S>>,
    facets: Vec<Vec<usize>>,
    weights: Vec<S>,
    extra: Vec<Vec<usize>>,
}

impl<S: Scalar> WeightedFan<S> {
    /// Builds a fan from listed cones; the dimension is the largest cone size.
    pub fn new(
        n: usize,
        rays: Vec<LatticeVector<S>>,
        cones: Vec<Vec<usize>>,
        weights: Vec<S>,
    ) -> Result<Self, FanError> {
        let dim = cones.iter().map(Vec::len).max().ok_or(FanError::Empty)?;
        Self::with_dim(n, dim, rays, cones, weights)
    }

    pub fn with_dim(
        n: usize,
        dim: usize,
        rays: Vec<LatticeVector<S>>,
        cones: Vec<Vec<usize>>,
        weights: Vec<S>,
    ) -> Result<Self, FanError> {
        if !(1..=2).contains(&dim) {
            return Err(FanError::UnsupportedDimension(dim));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.dim() != n {
                return Err(FanError::RayDimension { ray: i, expected: n, found: r.dim() });
            }
        }
        let mut facets = Vec::new();
        let mut extra = Vec::new();
        for (c, cone) in cones.into_iter().enumerate() {
            if cone.is_empty() || cone.len() > 2 {
                return Err(FanError::ConeSize { cone: c, len: cone.len() });
            }
            if let Some(&bad) = cone.iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::RayIndexOutOfRange { cone: c, index: bad, nrays: rays.len() });
            }
            let mut cone = cone;
            cone.sort_unstable();
            if cone.len() == dim {
                facets.push(cone);
            } else {
                extra.push(cone);
            }
        }
        if weights.len() != facets.len() {
            return Err(FanError::WeightCount { expected: facets.len(), found: weights.len() });
        }
        Ok(Self { n, dim, rays, facets, weights, extra })
    }

    /// The empty cycle of the given dimension.
    pub fn empty(n: usize, dim: usize) -> Self {
        Self { n, dim, rays: vec![], facets: vec![], weights: vec![], extra: vec![] }
    }

    /// A 1-dimensional fan from ray/weight pairs.
    pub fn from_rays(n: usize, rays: Vec<(LatticeVector<S>, S)>) -> Result<Self, FanError> {
        let (rays, weights): (Vec<_>, Vec<_>) = rays.into_iter().unzip();
        let cones = (0..rays.len()).map(|i| vec![i]).collect();
        Self::with_dim(n, 1, rays, cones, weights)
    }

    /// A 1-dimensional fan with weight 1 on each ray; rays given as small integers.
    pub fn rays_i64(rays: &[&[i64]]) -> Self {
        let n = rays.first().map_or(0, |r| r.len());
        Self::from_rays(n, rays.iter().map(|r| (LatticeVector::from_i64s(r), S::one())).collect())
            .expect("well-formed literal")
    }

    /// The plane spanned by `u` and `v` as a fan of four quadrants in a lattice basis, weight 1.
    pub fn plane(u: &LatticeVector<S>, v: &LatticeVector<S>) -> Result<Self, FanError> {
        let basis = saturate(&[u.clone(), v.clone()])?;
        if basis.len() != 2 {
            return Err(LatticeError::DimensionMismatch { expected: 2, found: basis.len() }.into());
        }
        let (b1, b2) = (&basis[0], &basis[1]);
        let rays = vec![b1.clone(), b2.clone(), -b1, -b2];
        let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]];
        Self::with_dim(u.dim(), 2, rays, cones, vec![S::one(); 4])
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[LatticeVector<S>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector<S> {
        &self.rays[i]
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, facet: usize) -> &S {
        &self.weights[facet]
    }

    /// Cones listed below the top dimension.
    pub fn extra_cones(&self) -> &[Vec<usize>] {
        &self.extra
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn cone(&self, facet: usize) -> Cone<S> {
        Cone { generators: self.facets[facet].iter().map(|&i| self.rays[i].clone()).collect() }
    }

    /// Indices of facets containing the given ray.
    pub fn facets_at(&self, ray: usize) -> Vec<usize> {
        (0..self.facets.len()).filter(|&f| self.facets[f].contains(&ray)).collect()
    }

    /// Rays that are faces of some facet, in index order.
    pub fn used_rays(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.facets.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// The weight of each primitive ray direction (1-dimensional fans), merging repeats.
    pub fn ray_weights(&self) -> BTreeMap<LatticeVector<S>, S> {
        assert_eq!(self.dim, 1, "ray weights are defined for 1-dimensional fans");
        let mut out: BTreeMap<LatticeVector<S>, S> = BTreeMap::new();
        for (f, w) in self.facets.iter().zip(&self.weights) {
            let r = self.rays[f[0]].primitive().expect("nonzero ray");
            let e = out.entry(r).or_insert_with(S::zero);
            *e = e.clone() + w.clone();
        }
        out.retain(|_, w| !w.is_zero());
        out
    }

    /// Facets with their generators and weights, canonicalised for comparison of supports.
    pub fn facet_set(&self) -> BTreeMap<Vec<LatticeVector<S>>, S> {
        let mut out = BTreeMap::new();
        for (f, w) in self.facets.iter().zip(&self.weights) {
            let mut g: Vec<LatticeVector<S>> = f.iter().map(|&i| self.rays[i].clone()).collect();
            g.sort();
            let e = out.entry(g).or_insert_with(S::zero);
            *e = e.clone() + w.clone();
        }
        out
    }

    /// Copy with every facet weight replaced.
    pub fn with_weights(&self, weights: Vec<S>) -> Result<Self, FanError> {
        if weights.len() != self.facets.len() {
            return Err(FanError::WeightCount { expected: self.facets.len(), found: weights.len() });
        }
        Ok(Self { weights, ..self.clone() })
    }

    /// Drops listed lower-dimensional cones and rays not used by any facet.
    pub fn compact(&self) -> Self {
        let used = self.used_rays();
        let remap: BTreeMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        Self {
            n: self.n,
            dim: self.dim,
            rays: used.iter().map(|&i| self.rays[i].clone()).collect(),
            facets: self.facets.iter().map(|f| f.iter().map(|i| remap[i]).collect()).collect(),
            weights: self.weights.clone(),
            extra: vec![],
        }
    }
}

/// The primitive vector of `cone(tau, other)` generating `Z_σ / Z_τ`, on the side of `other`.
pub fn normal_vector<S: Scalar>(
    tau: &LatticeVector<S>,
    other: &LatticeVector<S>,
) -> Result<LatticeVector<S>, LatticeError> {
    let d = wedge_content(tau, other);
    if d.is_zero() {
        return Err(LatticeError::NotPrimitive(format!("{other} is parallel to {tau}")));
    }
    let f = dual_unit(tau)?;
    let alpha = (-f.eval(other)).mod_floor(&d);
    let w = &tau.scaled(&alpha) + other;
    Ok(w.divided(&d).expect("class of other is divisible by the index"))
}

/// A face of a fan named in reports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    Origin,
    Ray(usize),
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Face::Origin => write!(f, "origin"),
            Face::Ray(i) => write!(f, "ray {i}"),
        }
    }
}

/// An axiom violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation<S> {
    ZeroRay {
        ray: usize,
    },
    NotPrimitive {
        ray: usize,
        vector: LatticeVector<S>,
    },
    DuplicateRay {
        first: usize,
        second: usize,
    },
    NotStronglyConvex {
        cone: Vec<usize>,
    },
    DuplicateCone {
        cone: Vec<usize>,
    },
    /// A listed cone that is maximal but below the top dimension, or a ray no cone uses.
    NotPure {
        cone: Vec<usize>,
    },
    /// Two cones whose intersection is not a face of both.
    BadIntersection {
        first: Vec<usize>,
        second: Vec<usize>,
    },
    NonPositiveWeight {
        cone: Vec<usize>,
        weight: S,
    },
}

impl<S: Scalar> fmt::Display for Violation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroRay { ray } => write!(f, "ray {ray} is zero"),
            Violation::NotPrimitive { ray, vector } => write!(f, "ray {ray} = {vector} is not primitive"),
            Violation::DuplicateRay { first, second } => write!(f, "rays {first} and {second} coincide"),
            Violation::NotStronglyConvex { cone } => write!(f, "cone {cone:?} is not strongly convex"),
            Violation::DuplicateCone { cone } => write!(f, "cone {cone:?} is listed twice"),
            Violation::NotPure { cone } => write!(f, "cone {cone:?} is maximal but not top-dimensional"),
            Violation::BadIntersection { first, second } => {
                write!(f, "cones {first:?} and {second:?} meet outside a common face")
            }
            Violation::NonPositiveWeight { cone, weight } => write!(f, "cone {cone:?} has weight {weight}"),
        }
    }
}

/// How two cones meet.
fn cones_meet_properly<S: Scalar>(rays: &[LatticeVector<S>], a: &[usize], b: &[usize]) -> bool {
    let ga: Vec<&LatticeVector<S>> = a.iter().map(|&i| &rays[i]).collect();
    let gb: Vec<&LatticeVector<S>> = b.iter().map(|&i| &rays[i]).collect();
    let shared = |v: &LatticeVector<S>| ga.contains(&v) && gb.contains(&v);
    let cone_a = Cone { generators: ga.iter().map(|v| (*v).clone()).collect() };
    let cone_b = Cone { generators: gb.iter().map(|v| (*v).clone()).collect() };
    match (ga.len(), gb.len()) {
        (1, 1) => true,
        (1, 2) | (2, 1) => {
            let (r, c) = if ga.len() == 1 { (ga[0], &cone_b) } else { (gb[0], &cone_a) };
            !c.contains(r) || c.generators.contains(r)
        }
        _ => {
            let all: Vec<LatticeVector<S>> = ga.iter().chain(&gb).map(|v| (*v).clone()).collect();
            match rank_of(&all) {
                2 => {
                    // same plane: the intersection is spanned by generators lying in the other cone
                    let mut inside: Vec<&LatticeVector<S>> = ga
                        .iter()
                        .filter(|v| cone_b.contains(v))
                        .chain(gb.iter().filter(|v| cone_a.contains(v)))
                        .copied()
                        .collect();
                    inside.sort();
                    inside.dedup();
                    match inside.len() {
                        0 => true,
                        1 => shared(inside[0]),
                        _ => {
                            let mut sa = ga.clone();
                            let mut sb = gb.clone();
                            sa.sort();
                            sb.sort();
                            sa == sb
                        }
                    }
                }
                3 => {
                    // planes meet in a line; find where it sits in each cone
                    let n = ga[0].dim();
                    let rows: Vec<Vec<S>> = (0..n)
                        .map(|i| vec![ga[0][i].clone(), ga[1][i].clone(), -gb[0][i].clone(), -gb[1][i].clone()])
                        .collect();
                    let m = IntMatrix::from_rows(rows).expect("rectangular");
                    let k = kernel_basis(&m);
                    let k = &k[0];
                    let c = k.coords();
                    let nonneg = c.iter().all(|x| !x.is_negative());
                    let nonpos = c.iter().all(|x| !x.is_positive());
                    if !(nonneg || nonpos) {
                        return true;
                    }
                    let w = (&ga[0].scaled(&c[0]) + &ga[1].scaled(&c[1])).primitive().expect("nonzero");
                    let w = if nonneg { w } else { -&w };
                    shared(&w)
                }
                _ => true,
            }
        }
    }
}

/// Checks the fan axioms; an empty list means the fan is valid.
pub fn validate<S: Scalar>(fan: &WeightedFan<S>) -> Vec<Violation<S>> {
    let mut out = Vec::new();
    let rays = &fan.rays;
    let mut good_ray = vec![true; rays.len()];
    for (i, r) in rays.iter().enumerate() {
        if r.is_zero() {
            out.push(Violation::ZeroRay { ray: i });
            good_ray[i] = false;
        } else if !r.is_primitive() {
            out.push(Violation::NotPrimitive { ray: i, vector: r.clone() });
        }
    }
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            if good_ray[i] && good_ray[j] && rays[i] == rays[j] {
                out.push(Violation::DuplicateRay { first: i, second: j });
            }
        }
    }
    let all: Vec<&Vec<usize>> = fan.facets.iter().chain(&fan.extra).collect();
    let mut convex = vec![true; all.len()];
    for (k, c) in all.iter().enumerate() {
        if c.iter().any(|&i| !good_ray[i]) {
            convex[k] = false;
            continue;
        }
        if c.len() == 2 && (c[0] == c[1] || are_parallel(&rays[c[0]], &rays[c[1]])) {
            out.push(Violation::NotStronglyConvex { cone: c.to_vec() });
            convex[k] = false;
        }
    }
    let mut seen = BTreeSet::new();
    for c in &all {
        if !seen.insert(c.to_vec()) {
            out.push(Violation::DuplicateCone { cone: c.to_vec() });
        }
    }
    let used: BTreeSet<usize> = fan.facets.iter().flatten().copied().collect();
    for c in &fan.extra {
        let is_face = fan.facets.iter().any(|f| c.iter().all(|i| f.contains(i)));
        if !is_face {
            out.push(Violation::NotPure { cone: c.clone() });
        }
    }
    for i in 0..rays.len() {
        if !used.contains(&i) && !fan.extra.iter().any(|c| c.contains(&i)) {
            out.push(Violation::NotPure { cone: vec![i] });
        }
    }
    for a in 0..all.len() {
        for b in a + 1..all.len() {
            if !convex[a] || !convex[b] || all[a] == all[b] {
                continue;
            }
            if !cones_meet_properly(rays, all[a], all[b]) {
                out.push(Violation::BadIntersection { first: all[a].to_vec(), second: all[b].to_vec() });
            }
        }
    }
    for (f, w) in fan.facets.iter().zip(&fan.weights) {
        if !w.is_positive() {
            out.push(Violation::NonPositiveWeight { cone: f.clone(), weight: w.clone() });
        }
    }
    out
}

/// The balancing sum at one codimension-1 face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceBalance<S> {
    pub face: Face,
    /// `Σ ω(σ) v_{σ/τ}` over facets σ containing the face.
    pub sum: LatticeVector<S>,
    pub balanced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport<S> {
    pub faces: Vec<FaceBalance<S>>,
}

impl<S: Scalar> BalanceReport<S> {
    pub fn is_balanced(&self) -> bool {
        self.faces.iter().all(|f| f.balanced)
    }

    pub fn unbalanced(&self) -> Vec<&FaceBalance<S>> {
        self.faces.iter().filter(|f| !f.balanced).collect()
    }
}

/// Checks the balancing condition at every codimension-1 face.
pub fn check_balanced<S: Scalar>(fan: &WeightedFan<S>) -> BalanceReport<S> {
    let n = fan.n;
    let mut faces = Vec::new();
    match fan.dim {
        1 => {
            let sum = fan
                .facets
                .iter()
                .zip(&fan.weights)
                .fold(LatticeVector::zeros(n), |acc, (f, w)| &acc + &fan.rays[f[0]].scaled(w));
            let balanced = sum.is_zero();
            faces.push(FaceBalance { face: Face::Origin, sum, balanced });
        }
        _ => {
            for tau in fan.used_rays() {
                let t = &fan.rays[tau];
                let mut sum = LatticeVector::zeros(n);
                for f in fan.facets_at(tau) {
                    let other = fan.facets[f].iter().copied().find(|&i| i != tau).expect("2-cone");
                    let v = normal_vector(t, &fan.rays[other]).expect("validated cone");
                    sum = &sum + &v.scaled(&fan.weights[f]);
                }
                let balanced = are_parallel(&sum, t);
                faces.push(FaceBalance { face: Face::Ray(tau), sum, balanced });
            }
        }
    }
    BalanceReport { faces }
}

/// Parameters `λ ∈ (0,1)` where the argmax of `T` changes along `(1-λ)a + λb`, increasing.
fn envelope_breaks<S: Scalar>(t: &TrFunction<S>, a: &LatticeVector<S>, b: &LatticeVector<S>) -> Vec<Rational<S>> {
    // each functional is the line c + λ s on [0, 1]
    let lines: Vec<(Rational<S>, Rational<S>)> = t
        .functionals()
        .iter()
        .map(|l| {
            let la = l.eval(a);
            let lb = l.eval(b);
            (Rational::from_integer(la.clone()), Rational::from_integer(lb - la))
        })
        .collect();
    let value = |k: usize, x: &Rational<S>| lines[k].0.clone() + lines[k].1.clone() * x.clone();
    let mut x = Rational::zero();
    // active line at 0+: highest value, then highest slope
    let mut cur = (0..lines.len())
        .max_by(|&i, &j| value(i, &x).cmp(&value(j, &x)).then(lines[i].1.cmp(&lines[j].1)))
        .expect("nonempty");
    let mut breaks = Vec::new();
    loop {
        let mut next: Option<(Rational<S>, usize)> = None;
        for k in 0..lines.len() {
            if lines[k].1 <= lines[cur].1 {
                continue;
            }
            let cross = (lines[cur].0.clone() - lines[k].0.clone()) / (lines[k].1.clone() - lines[cur].1.clone());
            if cross < x {
                continue;
            }
            let better = match &next {
                None => true,
                Some((bx, bk)) => cross < *bx || (cross == *bx && lines[k].1 > lines[*bk].1),
            };
            if better {
                next = Some((cross, k));
            }
        }
        match next {
            Some((cx, k)) if cx < Rational::one() => {
                if cx > Rational::zero() && breaks.last() != Some(&cx) {
                    breaks.push(cx.clone());
                }
                x = cx;
                cur = k;
            }
            _ => break,
        }
    }
    breaks
}

/// Subdivides each 2-cone where the maximising functional of `t` changes.
pub fn refine_by<S: Scalar>(fan: &WeightedFan<S>, t: &TrFunction<S>) -> WeightedFan<S> {
    if fan.dim == 1 {
        return fan.clone();
    }
    let mut rays = fan.rays.clone();
    let mut index: BTreeMap<LatticeVector<S>, usize> = BTreeMap::new();
    for (i, r) in rays.iter().enumerate() {
        index.entry(r.clone()).or_insert(i);
    }
    let mut facets = Vec::new();
    let mut weights = Vec::new();
    for (f, w) in fan.facets.iter().zip(&fan.weights) {
        let (ia, ib) = (f[0], f[1]);
        let (a, b) = (&fan.rays[ia], &fan.rays[ib]);
        let mut chain = vec![ia];
        for lam in envelope_breaks(t, a, b) {
            // (1-λ)a + λb with λ = p/q, scaled by q
            let p = lam.numer().clone();
            let q = lam.denom().clone();
            let r = (&a.scaled(&(q - p.clone())) + &b.scaled(&p)).primitive().expect("interior point is nonzero");
            let id = *index.entry(r.clone()).or_insert_with(|| {
                rays.push(r);
                rays.len() - 1
            });
            chain.push(id);
        }
        chain.push(ib);
        for pair in chain.windows(2) {
            let mut c = vec![pair[0], pair[1]];
            c.sort_unstable();
            facets.push(c);
            weights.push(w.clone());
        }
    }
    WeightedFan { n: fan.n, dim: 2, rays, facets, weights, extra: vec![] }
}

/// Image of a 1-dimensional fan under an integer linear map.
pub fn pushforward<S: Scalar>(f: &IntMatrix<S>, fan: &WeightedFan<S>) -> Result<WeightedFan<S>, FanError> {
    if fan.dim != 1 {
        return Err(FanError::NotOneDimensional(fan.dim));
    }
    if f.ncols() != fan.n {
        return Err(LatticeError::DimensionMismatch { expected: f.ncols(), found: fan.n }.into());
    }
    let m = f.nrows();
    let mut acc: Vec<(LatticeVector<S>, S)> = Vec::new();
    for (c, w) in fan.facets.iter().zip(&fan.weights) {
        let image = f.apply(&fan.rays[c[0]]);
        if image.is_zero() {
            continue;
        }
        let stretch = image.content();
        let p = image.divided(&stretch).expect("content divides");
        let add = w.clone() * stretch;
        match acc.iter_mut().find(|(r, _)| *r == p) {
            Some((_, wt)) => *wt = wt.clone() + add,
            None => acc.push((p, add)),
        }
    }
    if acc.is_empty() {
        return Ok(WeightedFan::empty(m, 1));
    }
    WeightedFan::from_rays(m, acc)
}
