//! Tropical rational functions, the intersection product and stable intersection.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fan::{check_balanced, normal_vector, pushforward, refine_by, Face, FanError, WeightedFan, ZeroCycle};
use crate::lattice::{
    kernel_basis, lattice_index, IntMatrix, LatticeError, LatticeIndex, LatticeVector, LinearFunctional,
};
use crate::polytope::NewtonPolytope;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropError {
    #[error("a tropical function needs at least one functional")]
    Empty,
    #[error("functional {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("fan is not balanced at {face} (sum {sum})")]
    Unbalanced { face: Face, sum: String },
    #[error("negative weight {weight} at ray {ray}; the function is not convex on this fan")]
    NegativeWeight { ray: String, weight: String },
    #[error("expected a fan of dimension {expected}, got {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("no generic shift found after {attempts} attempts")]
    GenericityFailure { attempts: usize },
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Maximum of finitely many integer linear functionals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrFunction<S> {
    functionals: Vec<LinearFunctional<S>>,
}

/// Reverse-lexicographic order: the last coordinate is the most significant.
pub fn colex_cmp<S: Scalar>(a: &LinearFunctional<S>, b: &LinearFunctional<S>) -> Ordering {
    a.coords().iter().rev().cmp(b.coords().iter().rev())
}

impl<S: Scalar> TrFunction<S> {
    pub fn new(functionals: Vec<LinearFunctional<S>>) -> Result<Self, TropError> {
        let n = functionals.first().ok_or(TropError::Empty)?.dim();
        for (i, l) in functionals.iter().enumerate() {
            if l.dim() != n {
                return Err(TropError::DimensionMismatch { index: i, expected: n, found: l.dim() });
            }
        }
        Ok(Self { functionals })
    }

    pub fn from_i64s(fs: &[&[i64]]) -> Self {
        Self::new(fs.iter().map(|f| LinearFunctional::from_i64s(f)).collect()).expect("well-formed literal")
    }

    /// `max(0, l_1, ..., l_k)`.
    pub fn nonneg(n: usize, ls: &[LinearFunctional<S>]) -> Self {
        let mut fs = vec![LinearFunctional::zeros(n)];
        fs.extend(ls.iter().cloned());
        Self { functionals: fs }
    }

    pub fn functionals(&self) -> &[LinearFunctional<S>] {
        &self.functionals
    }

    pub fn dim(&self) -> usize {
        self.functionals[0].dim()
    }

    pub fn with_functional(&self, l: LinearFunctional<S>) -> Self {
        let mut fs = self.functionals.clone();
        fs.push(l);
        Self::new(fs).expect("same dimension")
    }

    pub fn eval(&self, v: &LatticeVector<S>) -> S {
        self.functionals.iter().map(|l| l.eval(v)).max().expect("nonempty")
    }

    /// Indices of the functionals achieving the maximum at `v`.
    pub fn argmax(&self, v: &LatticeVector<S>) -> Vec<usize> {
        let vals: Vec<S> = self.functionals.iter().map(|l| l.eval(v)).collect();
        let m = vals.iter().max().expect("nonempty").clone();
        (0..vals.len()).filter(|&i| vals[i] == m).collect()
    }

    /// Whether the zero functional is among the functionals.
    pub fn is_nonnegative(&self) -> bool {
        self.functionals.iter().any(LinearFunctional::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.functionals.iter().all(|l| *l == self.functionals[0])
    }

    /// Adds a linear functional to every term.
    pub fn shift(&self, l: &LinearFunctional<S>) -> Self {
        Self { functionals: self.functionals.iter().map(|f| f + l).collect() }
    }

    /// Subtracts the reverse-lexicographically smallest functional from all terms.
    pub fn normalize(&self) -> Self {
        let min = self.functionals.iter().min_by(|a, b| colex_cmp(a, b)).expect("nonempty").clone();
        self.shift(&-&min)
    }

    /// `T ∘ f` for an integer map `f` into the domain of `T`.
    pub fn pull_back(&self, f: &IntMatrix<S>) -> Self {
        Self { functionals: self.functionals.iter().map(|l| f.pull_back(l)).collect() }
    }

    pub fn newton_polytope(&self) -> NewtonPolytope<S> {
        NewtonPolytope::from_points(&self.functionals)
    }

    /// Removes duplicates and functionals that are not vertices of the Newton polytope.
    pub fn reduce(&self) -> Reduction<S> {
        let poly = self.newton_polytope();
        let mut kept: Vec<LinearFunctional<S>> = Vec::new();
        let mut redundant = Vec::new();
        for (i, l) in self.functionals.iter().enumerate() {
            if poly.vertices().contains(l) && !kept.contains(l) {
                kept.push(l.clone());
            } else {
                redundant.push(i);
            }
        }
        Reduction { function: Self { functionals: kept }, redundant }
    }
}

impl<S: Scalar> fmt::Display for TrFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "max(")?;
        for (i, l) in self.functionals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction<S> {
    pub function: TrFunction<S>,
    /// Indices (in the input) of dropped functionals.
    pub redundant: Vec<usize>,
}

/// `max(l, h)` with `l ≠ h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binomial<S> {
    pub l: LinearFunctional<S>,
    pub h: LinearFunctional<S>,
}

impl<S: Scalar> Binomial<S> {
    pub fn new(l: LinearFunctional<S>, h: LinearFunctional<S>) -> Option<Self> {
        (l != h && l.dim() == h.dim()).then_some(Self { l, h })
    }

    pub fn to_function(&self) -> TrFunction<S> {
        TrFunction { functionals: vec![self.l.clone(), self.h.clone()] }
    }

    /// The hyperplane `{l = h}` is the kernel of this functional.
    pub fn difference(&self) -> LinearFunctional<S> {
        &self.l - &self.h
    }
}

/// Pointwise order between two tropical functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointwiseOrder {
    Le,
    Ge,
    Eq,
    Incomparable,
}

/// Decides the pointwise order by Newton-polytope containment.
pub fn compare<S: Scalar>(t: &TrFunction<S>, t2: &TrFunction<S>) -> PointwiseOrder {
    let p = t.newton_polytope();
    let q = t2.newton_polytope();
    let le = t.functionals.iter().all(|l| q.contains(l));
    let ge = t2.functionals.iter().all(|l| p.contains(l));
    match (le, ge) {
        (true, true) => PointwiseOrder::Eq,
        (true, false) => PointwiseOrder::Le,
        (false, true) => PointwiseOrder::Ge,
        (false, false) => PointwiseOrder::Incomparable,
    }
}

fn require_balanced<S: Scalar>(fan: &WeightedFan<S>) -> Result<(), TropError> {
    let report = check_balanced(fan);
    match report.unbalanced().first() {
        Some(f) => Err(TropError::Unbalanced { face: f.face.clone(), sum: f.sum.to_string() }),
        None => Ok(()),
    }
}

/// `T · F` for a 1-dimensional fan: `Σ ω_i T(v_i) − T(Σ ω_i v_i)`.
pub fn product_1d<S: Scalar>(t: &TrFunction<S>, fan: &WeightedFan<S>) -> Result<ZeroCycle<S>, TropError> {
    if fan.dim() != 1 {
        return Err(TropError::WrongDimension { expected: 1, found: fan.dim() });
    }
    require_balanced(fan)?;
    let n = fan.ambient_dim();
    let mut total = S::zero();
    let mut sum = LatticeVector::zeros(n);
    for (c, w) in fan.facets().iter().zip(fan.weights()) {
        let r = fan.ray(c[0]);
        total = total + w.clone() * t.eval(r);
        sum = &sum + &r.scaled(w);
    }
    let weight = total - t.eval(&sum);
    Ok(ZeroCycle { weight })
}

/// The 1-cycle `T · F` of a 2-dimensional fan, with rays whose weight vanished listed apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Product2d<S> {
    pub cycle: WeightedFan<S>,
    pub zero_weight_rays: Vec<LatticeVector<S>>,
}

/// `T · F` for a 2-dimensional fan.
pub fn product_2d<S: Scalar>(t: &TrFunction<S>, fan: &WeightedFan<S>) -> Result<Product2d<S>, TropError> {
    if fan.dim() != 2 {
        return Err(TropError::WrongDimension { expected: 2, found: fan.dim() });
    }
    require_balanced(fan)?;
    let n = fan.ambient_dim();
    let refined = refine_by(fan, t);
    let mut positive = Vec::new();
    let mut zero_weight_rays = Vec::new();
    for tau in refined.used_rays() {
        let rho = refined.ray(tau);
        let mut term = S::zero();
        let mut sum = LatticeVector::zeros(n);
        for f in refined.facets_at(tau) {
            let other = refined.facets()[f].iter().copied().find(|&i| i != tau).expect("2-cone");
            let u = normal_vector(rho, refined.ray(other))?;
            let wu = u.scaled(refined.weight(f));
            let inner = refined.cone(f).interior_point();
            let l_sigma = &t.functionals()[t.argmax(&inner)[0]];
            term = term + l_sigma.eval(&wu);
            sum = &sum + &wu;
        }
        let l_tau = &t.functionals()[t.argmax(rho)[0]];
        let weight = term - l_tau.eval(&sum);
        if weight.is_negative() {
            return Err(TropError::NegativeWeight { ray: rho.to_string(), weight: weight.to_string() });
        }
        if weight.is_zero() {
            zero_weight_rays.push(rho.clone());
        } else {
            positive.push((rho.clone(), weight));
        }
    }
    let cycle = if positive.is_empty() { WeightedFan::empty(n, 1) } else { WeightedFan::from_rays(n, positive)? };
    Ok(Product2d { cycle, zero_weight_rays })
}

/// `T_1 · ... · T_d · F` where `d = dim F`; the last function is applied first.
pub fn intersection_number<S: Scalar>(ts: &[TrFunction<S>], fan: &WeightedFan<S>) -> Result<S, TropError> {
    if ts.len() != fan.dim() {
        return Err(TropError::WrongDimension { expected: fan.dim(), found: ts.len() });
    }
    match fan.dim() {
        1 => Ok(product_1d(&ts[0], fan)?.weight),
        _ => {
            let curve = product_2d(&ts[1], fan)?.cycle;
            Ok(product_1d(&ts[0], &curve)?.weight)
        }
    }
}

/// Weighted 1-cycle as a map from primitive ray to weight.
pub type Curve<S> = BTreeMap<LatticeVector<S>, S>;

/// The tropical hypersurface of a function, described by the edges of its Newton polytope
/// at the origin. Local pieces away from the origin are recomputed from the active terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypersurface<S> {
    pub function: TrFunction<S>,
}

impl<S: Scalar> Hypersurface<S> {
    pub fn of(t: &TrFunction<S>) -> Self {
        Self { function: t.clone() }
    }

    /// Facets of the hypersurface at the origin: `(i, j, weight)` for every edge
    /// `[l_i, l_j]` of the Newton polytope, weight its lattice length.
    pub fn facets(&self) -> Vec<(usize, usize, S)> {
        let all: Vec<usize> = (0..self.function.functionals.len()).collect();
        local_cells(&self.function, &all)
            .into_iter()
            .filter(|c| {
                // edge test: the cell is full-dimensional in the hyperplane
                cell_is_facet(&self.function, c)
            })
            .map(|c| (c.i, c.j, c.weight))
            .collect()
    }
}

/// One candidate facet `{l_i = l_j ≥ others}` of a local hypersurface.
#[derive(Clone, Debug)]
struct Cell<S> {
    i: usize,
    j: usize,
    weight: S,
    /// Active functionals off the line through `l_i, l_j`.
    others: Vec<usize>,
}

/// Groups the active functionals by the lines they span, keeping extreme pairs.
fn local_cells<S: Scalar>(t: &TrFunction<S>, active: &[usize]) -> Vec<Cell<S>> {
    let fs = &t.functionals;
    let mut distinct: Vec<usize> = Vec::new();
    for &a in active {
        if !distinct.iter().any(|&d| fs[d] == fs[a]) {
            distinct.push(a);
        }
    }
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut cells = Vec::new();
    for x in 0..distinct.len() {
        for y in x + 1..distinct.len() {
            let (i, j) = (distinct[x], distinct[y]);
            let dir = &fs[j] - &fs[i];
            // position of each collinear term along l_i + μ (l_j − l_i)
            let mut line: Vec<(Rational<S>, usize)> = Vec::new();
            let mut others = Vec::new();
            for &k in &distinct {
                let off = &fs[k] - &fs[i];
                match collinear_parameter(&dir, &off) {
                    Some(mu) => line.push((mu, k)),
                    None => others.push(k),
                }
            }
            let mut key: Vec<usize> = line.iter().map(|(_, k)| *k).collect();
            key.sort_unstable();
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            line.sort();
            let lo = line.first().expect("contains i").1;
            let hi = line.last().expect("contains j").1;
            let weight = (&fs[hi] - &fs[lo]).content();
            cells.push(Cell { i: lo, j: hi, weight, others });
        }
    }
    cells
}

/// `μ` with `off = μ · dir`, if it exists.
fn collinear_parameter<S: Scalar>(dir: &LinearFunctional<S>, off: &LinearFunctional<S>) -> Option<Rational<S>> {
    let p = dir.coords().iter().position(|c| !c.is_zero())?;
    let mu = Rational::new(off[p].clone(), dir[p].clone());
    let ok = dir
        .coords()
        .iter()
        .zip(off.coords())
        .all(|(d, o)| Rational::from_integer(o.clone()) == mu.clone() * Rational::from_integer(d.clone()));
    ok.then_some(mu)
}

/// Whether `{l_i = l_j > l_k for the others}` is nonempty, decided by exact LP.
fn cell_is_facet<S: Scalar>(t: &TrFunction<S>, c: &Cell<S>) -> bool {
    let fs = &t.functionals;
    let n = t.dim();
    // x = p − q with p, q ≥ 0; slack s_k ≥ 0 with (l_i − l_k)(x) − s_k = 1
    let q = |x: &S| Rational::from_integer(x.clone());
    let nv = 2 * n + c.others.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let d = &fs[c.i] - &fs[c.j];
    let mut row: Vec<Rational<S>> = d.coords().iter().map(q).collect();
    row.extend(d.coords().iter().map(|x| -q(x)));
    row.extend(std::iter::repeat_n(Rational::zero(), c.others.len()));
    a.push(row);
    b.push(Rational::zero());
    for (s, &k) in c.others.iter().enumerate() {
        let e = &fs[c.i] - &fs[k];
        let mut row: Vec<Rational<S>> = e.coords().iter().map(q).collect();
        row.extend(e.coords().iter().map(|x| -q(x)));
        row.extend((0..c.others.len()).map(|z| if z == s { -Rational::one() } else { Rational::zero() }));
        a.push(row);
        b.push(Rational::one());
    }
    crate::polytope::feasible_point(&a, &b, nv).is_some()
}

/// Result of a stable intersection with a hypersurface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StableIntersection<S> {
    /// For a 2-dimensional fan: a weighted 1-cycle (zero weights dropped).
    Curve(Curve<S>),
    /// For a 1-dimensional fan: the multiplicity at the origin.
    Point(ZeroCycle<S>),
}

/// Bound on coordinates of sampled shift vectors.
pub const SHIFT_BOUND: i64 = 1_000_000;
/// Number of shift vectors tried before giving up.
pub const SHIFT_ATTEMPTS: usize = 32;

enum Local<S> {
    Generic(S),
    Degenerate,
}

/// One trial of the local stable intersection at `rho` with shift `v`.
fn local_trial<S: Scalar>(
    t: &TrFunction<S>,
    rho: Option<&LatticeVector<S>>,
    star: &[(LatticeVector<S>, S)],
    cells: &[Cell<S>],
    v: &LatticeVector<S>,
) -> Result<Local<S>, TropError> {
    let fs = &t.functionals;
    let mut total = S::zero();
    for (u, w) in star {
        for c in cells {
            let d = &fs[c.i] - &fs[c.j];
            let du = d.eval(u);
            let dv = d.eval(v);
            if du.is_zero() {
                if dv.is_zero() {
                    return Ok(Local::Degenerate);
                }
                continue;
            }
            // the shifted half-plane meets {d = 0} at v + s u with s = −dv/du
            if dv.is_zero() {
                return Ok(Local::Degenerate);
            }
            if (dv.is_positive()) == (du.is_positive()) {
                continue;
            }
            // x scaled by |du| > 0
            let x = &v.scaled(&du.abs()) - &u.scaled(&(dv.clone() * du.signum()));
            let mut meets = true;
            for &k in &c.others {
                let e = (&fs[c.i] - &fs[k]).eval(&x);
                if e.is_zero() {
                    return Ok(Local::Degenerate);
                }
                if e.is_negative() {
                    meets = false;
                }
            }
            if !meets {
                continue;
            }
            let mut gens: Vec<LatticeVector<S>> = rho.into_iter().cloned().collect();
            gens.push(u.clone());
            let h = IntMatrix::from_functionals(std::slice::from_ref(&d), d.dim())?;
            gens.extend(kernel_basis(&h));
            let index = match lattice_index(&gens)? {
                LatticeIndex::Finite(x) => x,
                LatticeIndex::Infinite => return Ok(Local::Degenerate),
            };
            total = total + w.clone() * c.weight.clone() * index;
        }
    }
    Ok(Local::Generic(total))
}

fn random_shift<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> LatticeVector<S> {
    LatticeVector::new((0..n).map(|_| S::of(rng.gen_range(-SHIFT_BOUND..=SHIFT_BOUND))).collect())
}

fn local_multiplicity<S: Scalar>(
    t: &TrFunction<S>,
    rho: Option<&LatticeVector<S>>,
    star: &[(LatticeVector<S>, S)],
    rng: &mut ChaCha8Rng,
) -> Result<S, TropError> {
    let n = t.dim();
    let active: Vec<usize> = match rho {
        Some(r) => t.argmax(r),
        None => (0..t.functionals.len()).collect(),
    };
    let cells = local_cells(t, &active);
    if cells.is_empty() || star.is_empty() {
        return Ok(S::zero());
    }
    for _ in 0..SHIFT_ATTEMPTS {
        let v = random_shift(rng, n);
        if let Local::Generic(m) = local_trial(t, rho, star, &cells, &v)? {
            return Ok(m);
        }
    }
    Err(TropError::GenericityFailure { attempts: SHIFT_ATTEMPTS })
}

/// Stable intersection of a balanced fan with the hypersurface of a function.
///
/// Computed locally: at each candidate ray the star of the fan (half-planes) meets
/// the local hypersurface after a random integer shift; a shift is accepted only if
/// every incidence it decides is strict.
pub fn stable_intersect<S: Scalar>(
    fan: &WeightedFan<S>,
    hyper: &Hypersurface<S>,
    seed: u64,
) -> Result<StableIntersection<S>, TropError> {
    require_balanced(fan)?;
    let t = &hyper.function;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match fan.dim() {
        1 => {
            let star: Vec<(LatticeVector<S>, S)> =
                fan.facets().iter().zip(fan.weights()).map(|(c, w)| (fan.ray(c[0]).clone(), w.clone())).collect();
            let weight = local_multiplicity(t, None, &star, &mut rng)?;
            Ok(StableIntersection::Point(ZeroCycle { weight }))
        }
        _ => {
            // candidate rays with their local stars
            let mut stars: BTreeMap<LatticeVector<S>, Vec<(LatticeVector<S>, S)>> = BTreeMap::new();
            for tau in fan.used_rays() {
                let rho = fan.ray(tau);
                let star = stars.entry(rho.clone()).or_default();
                for f in fan.facets_at(tau) {
                    let other = fan.facets()[f].iter().copied().find(|&i| i != tau).expect("2-cone");
                    star.push((normal_vector(rho, fan.ray(other))?, fan.weight(f).clone()));
                }
            }
            let fs = t.functionals();
            for (f, w) in fan.facets().iter().zip(fan.weights()) {
                let (a, b) = (fan.ray(f[0]), fan.ray(f[1]));
                for i in 0..fs.len() {
                    for j in i + 1..fs.len() {
                        let d = &fs[i] - &fs[j];
                        let (da, db) = (d.eval(a), d.eval(b));
                        if da.is_zero() || db.is_zero() || da.is_positive() == db.is_positive() {
                            continue;
                        }
                        let rho = (&a.scaled(&db.abs()) + &b.scaled(&da.abs())).primitive()?;
                        if stars.contains_key(&rho) {
                            continue;
                        }
                        let star = vec![(normal_vector(&rho, a)?, w.clone()), (normal_vector(&rho, b)?, w.clone())];
                        stars.insert(rho, star);
                    }
                }
            }
            let mut curve = Curve::new();
            for (rho, star) in &stars {
                let m = local_multiplicity(t, Some(rho), star, &mut rng)?;
                if !m.is_zero() {
                    curve.insert(rho.clone(), m);
                }
            }
            Ok(StableIntersection::Curve(curve))
        }
    }
}

/// Both sides of `T · f_* C = f_*(f^* T · C)` as intersection numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionCheck<S> {
    pub pushed: S,
    pub pulled: S,
}

impl<S: Scalar> ProjectionCheck<S> {
    pub fn holds(&self) -> bool {
        self.pushed == self.pulled
    }
}

pub fn projection_formula_check<S: Scalar>(
    f: &IntMatrix<S>,
    t: &TrFunction<S>,
    curve: &WeightedFan<S>,
) -> Result<ProjectionCheck<S>, TropError> {
    let image = pushforward(f, curve)?;
    let pushed = product_1d(t, &image)?.weight;
    let pulled = product_1d(&t.pull_back(f), curve)?.weight;
    Ok(ProjectionCheck { pushed, pulled })
}
