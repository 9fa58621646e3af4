//! Regular 1-dimensional fans: galleries, the canonical partition, maximal
//! regular functions and the projection onto a sum of Bergman fans.
//!
//! Rays are addressed by their position among the facets of the input fan.

use std::ops::Range;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::fan::{check_balanced, pushforward, FanError, WeightedFan};
use crate::lattice::{
    hermite_form, kernel_basis, lattice_index, rank_of, saturate, solve_dual, solve_rational, unimodular_inverse,
    DualError, IntMatrix, LatticeError, LatticeIndex, LatticeVector, LinearFunctional, RationalSolution,
};
use crate::scalar::{as_integer, Scalar};
use crate::trop::{compare, product_1d, PointwiseOrder, TrFunction, TropError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("expected a 1-dimensional fan, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("fan is not balanced")]
    Unbalanced,
    #[error("rays span a space of dimension {rank}, ambient dimension is {n}")]
    AmbientSpaceNotSpanned { rank: usize, n: usize },
    #[error("ray {ray} is not in class {class}")]
    RayNotInClass { class: usize, ray: usize },
    #[error("no class {0}")]
    NoSuchClass(usize),
    #[error("fan has no gallery, so it is not regular")]
    NotRegular,
    #[error("function is not regular on this fan (product {product})")]
    NotRegularFunction { product: String },
    #[error("function must contain the zero functional")]
    NotNonnegative,
    #[error("image is not a sum of 1-dimensional Bergman fans: {0}")]
    NotBergmanImage(String),
    #[error("projection does not factor through the minimal model")]
    FactorizationFailed,
    #[error("construction check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Trop(#[from] TropError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A functional that is `1` on ray `a`, `-1` on ray `b` and `0` on every other ray.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gallery1D<S> {
    pub l: LinearFunctional<S>,
    pub a: usize,
    pub b: usize,
}

impl<S: Scalar> Gallery1D<S> {
    /// The same gallery read from `b` to `a`.
    pub fn reversed(&self) -> Self {
        Self { l: -&self.l, a: self.b, b: self.a }
    }
}

/// Ray vectors and weights of a 1-dimensional fan, in facet order.
pub fn curve_rays<S: Scalar>(fan: &WeightedFan<S>) -> Vec<(LatticeVector<S>, S)> {
    fan.facets().iter().zip(fan.weights()).map(|(c, w)| (fan.ray(c[0]).clone(), w.clone())).collect()
}

fn check_curve<S: Scalar>(fan: &WeightedFan<S>) -> Result<Vec<(LatticeVector<S>, S)>, ClassifyError> {
    if fan.dim() != 1 {
        return Err(ClassifyError::NotOneDimensional(fan.dim()));
    }
    if !check_balanced(fan).is_balanced() {
        return Err(ClassifyError::Unbalanced);
    }
    let rays = curve_rays(fan);
    let vecs: Vec<LatticeVector<S>> = rays.iter().map(|(v, _)| v.clone()).collect();
    let rank = rank_of(&vecs);
    if rank != fan.ambient_dim() {
        return Err(ClassifyError::AmbientSpaceNotSpanned { rank, n: fan.ambient_dim() });
    }
    Ok(rays)
}

fn gallery_system<S: Scalar>(rays: &[(LatticeVector<S>, S)], a: usize, b: usize) -> Vec<(LatticeVector<S>, S)> {
    rays.iter()
        .enumerate()
        .map(|(k, (v, _))| {
            let c = if k == a {
                S::one()
            } else if k == b {
                -S::one()
            } else {
                S::zero()
            };
            (v.clone(), c)
        })
        .collect()
}

/// Solves the gallery system for rays `a`, `b`, in the given constraint order.
pub fn solve_gallery<S: Scalar>(
    rays: &[(LatticeVector<S>, S)],
    a: usize,
    b: usize,
    order: &[usize],
) -> Result<LinearFunctional<S>, DualError> {
    let sys = gallery_system(rays, a, b);
    let permuted: Vec<(LatticeVector<S>, S)> = order.iter().map(|&k| sys[k].clone()).collect();
    solve_dual(&permuted)
}

/// All galleries, one per unordered pair `a < b` of weight-1 rays.
pub fn find_galleries<S: Scalar>(fan: &WeightedFan<S>) -> Result<Vec<Gallery1D<S>>, ClassifyError> {
    let rays = check_curve(fan)?;
    let ones: Vec<usize> = (0..rays.len()).filter(|&k| rays[k].1.is_one()).collect();
    let pairs: Vec<(usize, usize)> =
        ones.iter().enumerate().flat_map(|(x, &a)| ones[x + 1..].iter().map(move |&b| (a, b))).collect();
    let identity: Vec<usize> = (0..rays.len()).collect();
    let found: Vec<Option<Gallery1D<S>>> = pairs
        .par_iter()
        .map(|&(a, b)| solve_gallery(&rays, a, b, &identity).ok().map(|l| Gallery1D { l, a, b }))
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Gallery-connected classes of rays plus the rays carrying no gallery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalPartition<S> {
    /// Sorted ray indices per class; the first entry is the representative.
    pub classes: Vec<Vec<usize>>,
    pub nongallery: Vec<usize>,
    pub class_galleries: Vec<Vec<Gallery1D<S>>>,
}

impl<S: Scalar> CanonicalPartition<S> {
    pub fn class_of(&self, ray: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&ray))
    }

    pub fn representative(&self, class: usize) -> usize {
        self.classes[class][0]
    }

    fn gallery(&self, class: usize, a: usize, b: usize) -> Option<Gallery1D<S>> {
        self.class_galleries[class].iter().find_map(|g| {
            if g.a == a && g.b == b {
                Some(g.clone())
            } else if g.a == b && g.b == a {
                Some(g.reversed())
            } else {
                None
            }
        })
    }
}

fn find_root(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find_root(parent, a), find_root(parent, b));
    if ra != rb {
        // the smaller index stays the root
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Groups rays into classes from a list of galleries.
pub fn partition_from_galleries<S: Scalar>(nrays: usize, galleries: &[Gallery1D<S>]) -> CanonicalPartition<S> {
    let mut parent: Vec<usize> = (0..nrays).collect();
    for g in galleries {
        union(&mut parent, g.a, g.b);
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); nrays];
    for k in 0..nrays {
        let r = find_root(&mut parent, k);
        groups[r].push(k);
    }
    let mut classes = Vec::new();
    let mut nongallery = Vec::new();
    for g in groups.into_iter().filter(|g| !g.is_empty()) {
        if g.len() == 1 {
            nongallery.push(g[0]);
        } else {
            classes.push(g);
        }
    }
    classes.sort();
    nongallery.sort_unstable();
    let class_galleries = classes
        .iter()
        .map(|c| {
            let mut gs: Vec<Gallery1D<S>> = galleries.iter().filter(|g| c.contains(&g.a)).cloned().collect();
            gs.sort_by_key(|g| (g.a, g.b));
            gs
        })
        .collect();
    CanonicalPartition { classes, nongallery, class_galleries }
}

pub fn canonical_partition<S: Scalar>(fan: &WeightedFan<S>) -> Result<CanonicalPartition<S>, ClassifyError> {
    let galleries = find_galleries(fan)?;
    Ok(partition_from_galleries(fan.facets().len(), &galleries))
}

/// `l_{ij}` for two rays of one class, from the galleries towards the representative.
pub fn class_functional<S: Scalar>(
    fan: &WeightedFan<S>,
    part: &CanonicalPartition<S>,
    class: usize,
    i: usize,
    j: usize,
) -> Result<LinearFunctional<S>, ClassifyError> {
    let members = part.classes.get(class).ok_or(ClassifyError::NoSuchClass(class))?;
    for &x in &[i, j] {
        if !members.contains(&x) {
            return Err(ClassifyError::RayNotInClass { class, ray: x });
        }
    }
    let r = part.representative(class);
    let to_rep = |x: usize| -> Result<LinearFunctional<S>, ClassifyError> {
        part.gallery(class, x, r)
            .map(|g| g.l)
            .ok_or_else(|| ClassifyError::Internal(format!("missing gallery between {x} and {r}")))
    };
    let l = if i == r {
        -&to_rep(j)?
    } else if j == r {
        to_rep(i)?
    } else {
        &to_rep(i)? - &to_rep(j)?
    };
    let rays = curve_rays(fan);
    for (k, (v, _)) in rays.iter().enumerate() {
        let want = if k == i {
            S::one()
        } else if k == j {
            -S::one()
        } else {
            S::zero()
        };
        if l.eval(v) != want {
            return Err(ClassifyError::Internal(format!("difference functional fails on ray {k}")));
        }
    }
    Ok(l)
}

/// `max(0, l_{ij} : j ≠ i in the class of i)`.
pub fn m_max<S: Scalar>(
    fan: &WeightedFan<S>,
    part: &CanonicalPartition<S>,
    class: usize,
    i: usize,
) -> Result<TrFunction<S>, ClassifyError> {
    let members = part.classes.get(class).ok_or(ClassifyError::NoSuchClass(class))?;
    if !members.contains(&i) {
        return Err(ClassifyError::RayNotInClass { class, ray: i });
    }
    let ls = members
        .iter()
        .filter(|&&j| j != i)
        .map(|&j| class_functional(fan, part, class, i, j))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrFunction::nonneg(fan.ambient_dim(), &ls))
}

/// Evidence that a function is regular on a fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularWitness<S> {
    /// The unique ray with value 1.
    pub ray: usize,
    pub class: usize,
    /// A binomial `max(0, l)` below the function, with `l` a gallery functional from `ray`.
    pub gallery: Gallery1D<S>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport<S> {
    pub product: S,
    pub witness: Option<RegularWitness<S>>,
}

impl<S: Scalar> RegularityReport<S> {
    pub fn is_regular(&self) -> bool {
        self.product.is_one()
    }
}

pub fn is_regular_function<S: Scalar>(
    fan: &WeightedFan<S>,
    m: &TrFunction<S>,
) -> Result<RegularityReport<S>, ClassifyError> {
    if !m.is_nonnegative() {
        return Err(ClassifyError::NotNonnegative);
    }
    let product = product_1d(m, fan)?.weight;
    if !product.is_one() {
        return Ok(RegularityReport { product, witness: None });
    }
    let part = canonical_partition(fan)?;
    let rays = curve_rays(fan);
    let hot: Vec<usize> = (0..rays.len()).filter(|&k| m.eval(&rays[k].0).is_one()).collect();
    let witness = match hot.as_slice() {
        [i] => part.class_of(*i).and_then(|c| {
            let poly = m.newton_polytope();
            part.classes[c].iter().filter(|&&j| j != *i).find_map(|&j| {
                let l = class_functional(fan, &part, c, *i, j).ok()?;
                poly.contains(&l).then(|| RegularWitness { ray: *i, class: c, gallery: Gallery1D { l, a: *i, b: j } })
            })
        }),
        _ => None,
    };
    if witness.is_none() {
        return Err(ClassifyError::Internal("regular function without a gallery witness".into()));
    }
    Ok(RegularityReport { product, witness })
}

/// Whether `M ≤ M_max(i)` for a nonconstant non-negative `M`.
pub fn characterize_class_functions<S: Scalar>(
    fan: &WeightedFan<S>,
    part: &CanonicalPartition<S>,
    class: usize,
    i: usize,
    m: &TrFunction<S>,
) -> Result<bool, ClassifyError> {
    if !m.is_nonnegative() {
        return Err(ClassifyError::NotNonnegative);
    }
    if m.is_constant() {
        return Ok(false);
    }
    let top = m_max(fan, part, class, i)?;
    Ok(matches!(compare(m, &top), PointwiseOrder::Le | PointwiseOrder::Eq))
}

/// The projection onto a direct sum of 1-dimensional Bergman fans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalModel<S> {
    pub partition: CanonicalPartition<S>,
    /// Rows `l_{j r}` for each non-representative `j` of each class.
    pub matrix: IntMatrix<S>,
    /// Columns are the rays `v_j` matching the rows, so `matrix · section = I`.
    pub section: IntMatrix<S>,
    pub image: WeightedFan<S>,
    pub class_blocks: Vec<Range<usize>>,
    pub decomposition: BergmanSum,
}

pub fn minimal_model<S: Scalar>(fan: &WeightedFan<S>) -> Result<MinimalModel<S>, ClassifyError> {
    let part = canonical_partition(fan)?;
    if part.classes.is_empty() {
        return Err(ClassifyError::NotRegular);
    }
    let n = fan.ambient_dim();
    let rays = curve_rays(fan);
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let mut class_blocks = Vec::new();
    for (c, members) in part.classes.iter().enumerate() {
        let r = members[0];
        let start = rows.len();
        for &j in &members[1..] {
            rows.push(class_functional(fan, &part, c, j, r)?);
            cols.push(rays[j].0.clone());
        }
        class_blocks.push(start..rows.len());
    }
    let matrix = IntMatrix::from_functionals(&rows, n)?;
    let section = IntMatrix::from_vectors(&cols, n)?.transpose();
    if matrix.mul(&section)? != IntMatrix::identity(rows.len()) {
        return Err(ClassifyError::Internal("section is not a right inverse".into()));
    }
    let image = pushforward(&matrix, fan)?;
    let decomposition = is_bergman_sum(&image).map_err(|e| ClassifyError::Internal(e.to_string()))?;
    Ok(MinimalModel { partition: part, matrix, section, image, class_blocks, decomposition })
}

/// Grouping of a fan's rays into Bergman summands (ray positions in facet order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BergmanSum {
    pub groups: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BergmanFailure {
    #[error("not a 1-dimensional fan")]
    NotACurve,
    #[error("ray {0} has weight other than 1")]
    Weight(usize),
    #[error("group {0:?} does not sum to zero")]
    Sum(Vec<usize>),
    #[error("group {0:?} is not saturated: a maximal proper subset has index {1} in its span")]
    Saturation(Vec<usize>, String),
    #[error("group spans do not form a direct sum equal to the lattice")]
    DirectSum,
}

/// `[Z^n ∩ span : Z-span]` for independent vectors.
fn index_in_span<S: Scalar>(gens: &[LatticeVector<S>]) -> Result<S, LatticeError> {
    let sat = saturate(gens)?;
    let n = gens[0].dim();
    let rows: Vec<Vec<S>> = (0..n).map(|i| sat.iter().map(|g| g[i].clone()).collect()).collect();
    let mut coords = Vec::new();
    for g in gens {
        match solve_rational(&rows, g.coords(), sat.len()) {
            RationalSolution::Unique(x) => coords
                .push(x.iter().map(|q| as_integer(q).expect("saturated basis has integral coordinates")).collect()),
            _ => return Err(LatticeError::DimensionMismatch { expected: sat.len(), found: gens.len() }),
        }
    }
    let c = IntMatrix::from_rows(coords)?;
    Ok(num_traits::Signed::abs(&c.det()?))
}

/// Tests whether a 1-dimensional fan is a direct sum of 1-dimensional Bergman fans.
pub fn is_bergman_sum<S: Scalar>(fan: &WeightedFan<S>) -> Result<BergmanSum, BergmanFailure> {
    if fan.dim() != 1 || fan.is_empty() {
        return Err(BergmanFailure::NotACurve);
    }
    let rays = curve_rays(fan);
    if let Some(k) = (0..rays.len()).find(|&k| !rays[k].1.is_one()) {
        return Err(BergmanFailure::Weight(k));
    }
    let vecs: Vec<LatticeVector<S>> = rays.iter().map(|(v, _)| v.clone()).collect();
    let n = fan.ambient_dim();
    // connected components of the vector matroid, via fundamental circuits of a greedy basis
    let mut basis: Vec<usize> = Vec::new();
    let mut parent: Vec<usize> = (0..vecs.len()).collect();
    for k in 0..vecs.len() {
        let mut trial: Vec<LatticeVector<S>> = basis.iter().map(|&b| vecs[b].clone()).collect();
        trial.push(vecs[k].clone());
        if rank_of(&trial) > basis.len() {
            basis.push(k);
            continue;
        }
        let rows: Vec<Vec<S>> = (0..n).map(|i| basis.iter().map(|&b| vecs[b][i].clone()).collect()).collect();
        if let RationalSolution::Unique(x) = solve_rational(&rows, vecs[k].coords(), basis.len()) {
            for (pos, q) in x.iter().enumerate() {
                if !q.is_zero() {
                    union(&mut parent, k, basis[pos]);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); vecs.len()];
    for k in 0..vecs.len() {
        let r = find_root(&mut parent, k);
        groups[r].push(k);
    }
    let groups: Vec<Vec<usize>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    let mut all_bases = Vec::new();
    for g in &groups {
        let sum = g.iter().fold(LatticeVector::zeros(n), |acc, &k| &acc + &vecs[k]);
        if !sum.is_zero() {
            return Err(BergmanFailure::Sum(g.clone()));
        }
        for skip in g {
            let sub: Vec<LatticeVector<S>> = g.iter().filter(|&k| k != skip).map(|&k| vecs[k].clone()).collect();
            let idx = index_in_span(&sub).map_err(|_| BergmanFailure::Saturation(g.clone(), "undefined".into()))?;
            if !idx.is_one() {
                return Err(BergmanFailure::Saturation(g.clone(), idx.to_string()));
            }
        }
        all_bases.extend(g[1..].iter().map(|&k| vecs[k].clone()));
    }
    if all_bases.len() != n || lattice_index(&all_bases) != Ok(LatticeIndex::Finite(S::one())) {
        return Err(BergmanFailure::DirectSum);
    }
    Ok(BergmanSum { groups })
}

/// Finds `ψ` with `ψ ∘ π_F = π` for a projection whose image is a Bergman sum.
pub fn factor_projection<S: Scalar>(
    fan: &WeightedFan<S>,
    model: &MinimalModel<S>,
    pi: &IntMatrix<S>,
) -> Result<IntMatrix<S>, ClassifyError> {
    let image = pushforward(pi, fan)?;
    is_bergman_sum(&image).map_err(|e| ClassifyError::NotBergmanImage(e.to_string()))?;
    let psi = pi.mul(&model.section)?;
    let composed = psi.mul(&model.matrix)?;
    for (v, _) in curve_rays(fan) {
        if composed.apply(&v) != pi.apply(&v) {
            return Err(ClassifyError::FactorizationFailed);
        }
    }
    Ok(psi)
}

/// A regular function on the model whose pullback along `π_F` is `M`.
pub fn lift_function<S: Scalar>(
    fan: &WeightedFan<S>,
    model: &MinimalModel<S>,
    m: &TrFunction<S>,
) -> Result<TrFunction<S>, ClassifyError> {
    let report = is_regular_function(fan, m)?;
    if !report.is_regular() {
        return Err(ClassifyError::NotRegularFunction { product: report.product.to_string() });
    }
    let mut lifted = Vec::new();
    for h in m.functionals() {
        let h2 = model.section.pull_back(h);
        if &model.matrix.pull_back(&h2) != h {
            return Err(ClassifyError::Internal(format!("functional {h} is not in the span of the model rows")));
        }
        lifted.push(h2);
    }
    Ok(TrFunction::new(lifted)?)
}

/// Per-class comparison of `dim <class rays>` with the number of galleries plus one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDimension {
    pub class: usize,
    /// Galleries from the other members to the representative.
    pub galleries: usize,
    pub span_dim: usize,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSpanReport {
    /// Set when a single class contains every ray, so there is nothing to check.
    pub excluded: bool,
    pub classes: Vec<ClassDimension>,
}

impl ClassSpanReport {
    pub fn mismatches(&self) -> Vec<&ClassDimension> {
        self.classes.iter().filter(|c| !c.matches).collect()
    }
}

/// Compares class span dimensions with gallery counts. Irreducibility of the fan is
/// the caller's assertion; a mismatch under it signals reducibility or a bug.
pub fn check_prop_317<S: Scalar>(fan: &WeightedFan<S>) -> Result<ClassSpanReport, ClassifyError> {
    let part = canonical_partition(fan)?;
    let rays = curve_rays(fan);
    let excluded = part.classes.iter().any(|c| c.len() == rays.len());
    if excluded {
        return Ok(ClassSpanReport { excluded, classes: vec![] });
    }
    let classes = part
        .classes
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let vecs: Vec<LatticeVector<S>> = members.iter().map(|&k| rays[k].0.clone()).collect();
            let span_dim = rank_of(&vecs);
            let galleries = members.len() - 1;
            ClassDimension { class: c, galleries, span_dim, matches: span_dim == galleries + 1 }
        })
        .collect();
    Ok(ClassSpanReport { excluded, classes })
}

/// A unimodular change of coordinates exhibiting a gallery in normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalleryCoordinates<S> {
    pub transform: IntMatrix<S>,
    /// `m` with `transform · v_b = (-1, 0, ..., 0, m)`.
    pub m: S,
}

/// Coordinates sending `v_a ↦ e_1`, `v_b ↦ (-1, 0, …, 0, m)` and every other ray into `e_1^⊥`.
pub fn gallery_coordinates<S: Scalar>(
    fan: &WeightedFan<S>,
    g: &Gallery1D<S>,
) -> Result<GalleryCoordinates<S>, ClassifyError> {
    let n = fan.ambient_dim();
    let rays = curve_rays(fan);
    let va = &rays[g.a].0;
    let vb = &rays[g.b].0;
    let lrow = IntMatrix::from_functionals(std::slice::from_ref(&g.l), n)?;
    let mut cols = vec![va.clone()];
    cols.extend(kernel_basis(&lrow));
    let b = IntMatrix::from_vectors(&cols, n)?.transpose();
    let binv =
        unimodular_inverse(&b).ok_or_else(|| ClassifyError::Internal("gallery basis is not unimodular".into()))?;
    let y = binv.apply(vb);
    let tail = LatticeVector::new(y.coords()[1..].to_vec());
    let mut block = IntMatrix::identity(n);
    let mut m = S::zero();
    if n > 1 && !tail.is_zero() {
        let col = IntMatrix::from_vectors(std::slice::from_ref(&tail), n - 1)?.transpose();
        let hf = hermite_form(&col)?;
        m = hf.h.get(0, 0).clone();
        // move the pivot row to the last position
        let mut rows: Vec<Vec<S>> = hf.u.rows().to_vec();
        let first = rows.remove(0);
        rows.push(first);
        let mut full = vec![];
        for i in 0..n {
            let mut r = vec![S::zero(); n];
            if i == 0 {
                r[0] = S::one();
            } else {
                r[1..].clone_from_slice(&rows[i - 1]);
            }
            full.push(r);
        }
        block = IntMatrix::from_rows(full)?;
    }
    let transform = block.mul(&binv)?;
    let check_a = transform.apply(va);
    let check_b = transform.apply(vb);
    let mut want_b = vec![S::zero(); n];
    want_b[0] = -S::one();
    if n > 1 {
        want_b[n - 1] = m.clone();
    }
    let ok = check_a == LatticeVector::unit(n, 0)
        && check_b.coords() == want_b.as_slice()
        && rays.iter().enumerate().all(|(k, (v, _))| k == g.a || k == g.b || transform.apply(v)[0].is_zero());
    if !ok {
        return Err(ClassifyError::Internal("normal form check failed".into()));
    }
    Ok(GalleryCoordinates { transform, m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;

    type F = WeightedFan<BigInt>;
    type V = LatticeVector<BigInt>;

    fn v(c: &[i64]) -> V {
        V::from_i64s(c)
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn tr(fs: &[&[i64]]) -> TrFunction<BigInt> {
        TrFunction::from_i64s(fs)
    }

    fn bergman2() -> F {
        F::rays_i64(&[&[1, 0], &[0, 1], &[-1, -1]])
    }

    fn cross() -> F {
        F::rays_i64(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]])
    }

    /// v1 = e1, v2 = (-1,0,m), plus a weight-1 triangle in e1^⊥ with no galleries.
    fn normal_form(m: i64) -> F {
        let rays = vec![
            (v(&[1, 0, 0]), b(1)),
            (v(&[-1, 0, m]), b(1)),
            (v(&[0, 2, 1]), b(1)),
            (v(&[0, -1, 1]), b(1)),
            (v(&[0, -1, -2 - m]), b(1)),
        ];
        F::from_rays(3, rays).unwrap()
    }

    #[test]
    fn galleries_of_small_fans() {
        let g = find_galleries(&bergman2()).unwrap();
        assert_eq!(g.len(), 3);
        let g = find_galleries(&cross()).unwrap();
        let pairs: Vec<(usize, usize)> = g.iter().map(|x| (x.a, x.b)).collect();
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
        let heavy = F::from_rays(1, vec![(v(&[1]), b(2)), (v(&[-1]), b(2))]).unwrap();
        assert!(find_galleries(&heavy).unwrap().is_empty());
        let flat = F::rays_i64(&[&[1, 0], &[-1, 0]]);
        assert!(matches!(find_galleries(&flat), Err(ClassifyError::AmbientSpaceNotSpanned { .. })));
    }

    #[test]
    fn partitions() {
        let p = canonical_partition(&bergman2()).unwrap();
        assert_eq!(p.classes, vec![vec![0, 1, 2]]);
        assert!(p.nongallery.is_empty());
        let p = canonical_partition(&cross()).unwrap();
        assert_eq!(p.classes, vec![vec![0, 1], vec![2, 3]]);
        for m in [2, 3, 5] {
            let f = normal_form(m);
            assert!(check_balanced(&f).is_balanced());
            let p = canonical_partition(&f).unwrap();
            assert_eq!(p.classes, vec![vec![0, 1]]);
            assert_eq!(p.nongallery, vec![2, 3, 4]);
        }
    }

    #[test]
    fn maximal_functions() {
        let f = bergman2();
        let p = canonical_partition(&f).unwrap();
        for i in 0..3 {
            let mm = m_max(&f, &p, 0, i).unwrap();
            assert_eq!(product_1d(&mm, &f).unwrap().weight, b(1));
        }
        let f = cross();
        let p = canonical_partition(&f).unwrap();
        let mm = m_max(&f, &p, 0, 0).unwrap();
        assert_eq!(mm, tr(&[&[0, 0], &[1, 0]]));
        assert_eq!(product_1d(&mm, &f).unwrap().weight, b(1));
        assert!(matches!(m_max(&f, &p, 0, 2), Err(ClassifyError::RayNotInClass { .. })));

        let f = normal_form(4);
        let p = canonical_partition(&f).unwrap();
        let mm = m_max(&f, &p, 0, 0).unwrap();
        assert_eq!(mm, tr(&[&[0, 0, 0], &[1, 0, 0]]));
    }

    #[test]
    fn regular_function_checks() {
        let f = cross();
        let p = canonical_partition(&f).unwrap();
        let mm = m_max(&f, &p, 1, 3).unwrap();
        let r = is_regular_function(&f, &mm).unwrap();
        assert!(r.is_regular());
        assert_eq!(r.witness.unwrap().ray, 3);
        let r = is_regular_function(&f, &tr(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
        assert_eq!(r.product, b(2));
        assert!(!is_regular_function(&f, &tr(&[&[0, 0]])).unwrap().is_regular());
        assert!(matches!(is_regular_function(&f, &tr(&[&[1, 0]])), Err(ClassifyError::NotNonnegative)));
    }

    #[test]
    fn class_function_characterization() {
        let f = bergman2();
        let p = canonical_partition(&f).unwrap();
        let top = m_max(&f, &p, 0, 2).unwrap();
        assert!(characterize_class_functions(&f, &p, 0, 2, &top).unwrap());
        let l = class_functional(&f, &p, 0, 2, 0).unwrap();
        let single = TrFunction::nonneg(2, std::slice::from_ref(&l));
        assert!(characterize_class_functions(&f, &p, 0, 2, &single).unwrap());
        let doubled = TrFunction::nonneg(2, &[l.scaled(&b(2))]);
        assert!(!characterize_class_functions(&f, &p, 0, 2, &doubled).unwrap());
    }

    #[test]
    fn minimal_models() {
        let f = bergman2();
        let mm = minimal_model(&f).unwrap();
        assert_eq!(mm.matrix.det().unwrap().abs(), b(1));
        assert_eq!(mm.decomposition.groups.len(), 1);

        let f = normal_form(3);
        let mm = minimal_model(&f).unwrap();
        assert_eq!(mm.matrix.nrows(), 1);
        assert_eq!(mm.image.ray_weights(), std::collections::BTreeMap::from([(v(&[-1]), b(1)), (v(&[1]), b(1))]));

        let f = cross();
        let mm = minimal_model(&f).unwrap();
        assert_eq!(mm.matrix.nrows(), 2);
        assert_eq!(mm.decomposition.groups.len(), 2);

        let tri = F::rays_i64(&[&[2, 1], &[-1, 1], &[-1, -2]]);
        assert!(matches!(minimal_model(&tri), Err(ClassifyError::NotRegular)));
    }

    #[test]
    fn bergman_sum_recognition() {
        assert_eq!(is_bergman_sum(&bergman2()).unwrap().groups, vec![vec![0, 1, 2]]);
        assert_eq!(is_bergman_sum(&cross()).unwrap().groups, vec![vec![0, 1], vec![2, 3]]);
        let bad = F::rays_i64(&[&[1, 0], &[1, 2], &[-2, -2]]);
        assert!(matches!(is_bergman_sum(&bad), Err(BergmanFailure::Saturation(..))));
    }

    #[test]
    fn factoring_projections() {
        let f = cross();
        let mm = minimal_model(&f).unwrap();
        let psi = factor_projection(&f, &mm, &mm.matrix).unwrap();
        assert_eq!(psi, IntMatrix::identity(2));
        let first = IntMatrix::from_i64_rows(&[&[1, 0]]);
        let pi = first.mul(&mm.matrix).unwrap();
        let psi = factor_projection(&f, &mm, &pi).unwrap();
        assert_eq!(psi.mul(&mm.matrix).unwrap(), pi);
        let zero = IntMatrix::from_i64_rows(&[&[0, 0]]);
        assert!(matches!(factor_projection(&f, &mm, &zero), Err(ClassifyError::NotBergmanImage(_))));
    }

    #[test]
    fn lifting() {
        let f = bergman2();
        let mm = minimal_model(&f).unwrap();
        let p = &mm.partition;
        let top = m_max(&f, p, 0, 0).unwrap();
        let lifted = lift_function(&f, &mm, &top).unwrap();
        assert_eq!(product_1d(&lifted, &mm.image).unwrap().weight, b(1));
        let single = TrFunction::nonneg(2, &[class_functional(&f, p, 0, 0, 1).unwrap()]);
        let lifted = lift_function(&f, &mm, &single).unwrap();
        assert_eq!(lifted.functionals().len(), 2);
        assert_eq!(product_1d(&lifted, &mm.image).unwrap().weight, b(1));
    }

    #[test]
    fn prop_317_reports() {
        let f = F::rays_i64(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[1, 1, 1], &[-1, -1, -1]]);
        let r = check_prop_317(&f).unwrap();
        assert!(!r.excluded);
        assert_eq!(r.classes.len(), 3);
        assert!(r.classes.iter().all(|c| c.span_dim == 1 && c.galleries == 1));
        assert_eq!(r.mismatches().len(), 3);
        assert!(check_prop_317(&bergman2()).unwrap().excluded);
    }

    #[test]
    fn normal_form_coordinates() {
        for m in [2, 3, 7] {
            let f = normal_form(m);
            let g = &find_galleries(&f).unwrap()[0];
            let c = gallery_coordinates(&f, g).unwrap();
            assert_eq!(c.transform.det().unwrap().abs(), b(1));
            assert_eq!(c.m.abs(), b(m));
        }
    }

    #[test]
    fn gallery_solutions_do_not_depend_on_order() {
        let f = normal_form(3);
        let rays = curve_rays(&f);
        let fwd: Vec<usize> = (0..rays.len()).collect();
        let rev: Vec<usize> = fwd.iter().rev().copied().collect();
        assert_eq!(solve_gallery(&rays, 0, 1, &fwd).unwrap(), solve_gallery(&rays, 0, 1, &rev).unwrap());
    }
}
