//! Planes and 2-cycles with bounded intersection numbers against a pair of
//! non-negative functions in general position.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use rayon::prelude::*;
use thiserror::Error;

use crate::fan::{check_balanced, cone_coordinates, normal_vector, FanError, WeightedFan};
use crate::lattice::{
    are_parallel, kernel_basis, rank_of, saturate, solve_rational, IntMatrix, LatticeError, LatticeVector,
    LinearFunctional, RationalSolution,
};
use crate::scalar::{as_integer, Scalar};
use crate::trop::{intersection_number, Binomial, TrFunction, TropError};

/// Upper bound on the number of plane subsets the assembly search may visit.
pub const SUBSET_BUDGET: usize = 250_000;
/// Upper bound on sector configurations explored for one plane subset.
pub const SECTOR_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Classify2dError {
    #[error("functions violate the general position convention: {0}")]
    Convention(String),
    #[error("generators do not span a plane")]
    DegeneratePlane,
    #[error("plane {0} appears twice")]
    DuplicatePlane(usize),
    #[error("binomials are not a regular sequence on the fan (product {product})")]
    NotRegularSequence { product: String },
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("fan is unbalanced at ray {ray}")]
    Unbalanced { ray: String },
    #[error("search bound exceeded: {subsets} plane subsets of size at most {max_planes} over {planes} planes (budget {budget})")]
    SearchBoundExceeded { planes: usize, max_planes: usize, subsets: usize, budget: usize },
    #[error(transparent)]
    Trop(#[from] TropError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// The triple `(T1·T1·[L], T1·T2·[L], T2·T2·[L])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile<S> {
    pub t11: S,
    pub t12: S,
    pub t22: S,
}

impl<S: Scalar> Profile<S> {
    pub fn new(t11: S, t12: S, t22: S) -> Self {
        Self { t11, t12, t22 }
    }

    pub fn of_i64s(t11: i64, t12: i64, t22: i64) -> Self {
        Self::new(S::of(t11), S::of(t12), S::of(t22))
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.t22.clone(), self.t12.clone(), self.t11.clone())
    }

    pub fn is_strongly_regular(&self) -> bool {
        self.t12.is_one() && self.t11 <= S::one() && self.t22 <= S::one()
    }

    /// Mixed product vanishes while both self-products are 1.
    pub fn violates_hodge_index(&self) -> bool {
        self.t12.is_zero() && self.t11.is_one() && self.t22.is_one()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.t11 <= other.t11 && self.t12 <= other.t12 && self.t22 <= other.t22
    }
}

impl<S: Scalar> fmt::Display for Profile<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.t11, self.t12, self.t22)
    }
}

/// `T1 = max(0, v_1..v_k)` and `T2 = max(0, w_1..w_{n-k})` with all `v_i, w_j` independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConventionPair<S> {
    t1: TrFunction<S>,
    t2: TrFunction<S>,
    v: Vec<LinearFunctional<S>>,
    w: Vec<LinearFunctional<S>>,
    m: IntMatrix<S>,
}

fn nonzero_terms<S: Scalar>(t: &TrFunction<S>) -> Vec<LinearFunctional<S>> {
    let mut out: Vec<LinearFunctional<S>> = Vec::new();
    for l in t.functionals() {
        if !l.is_zero() && !out.contains(l) {
            out.push(l.clone());
        }
    }
    out
}

impl<S: Scalar> ConventionPair<S> {
    pub fn new(t1: TrFunction<S>, t2: TrFunction<S>) -> Result<Self, Classify2dError> {
        let n = t1.dim();
        if t2.dim() != n {
            return Err(Classify2dError::Convention(format!("dimensions {} and {}", n, t2.dim())));
        }
        if !t1.is_nonnegative() || !t2.is_nonnegative() {
            return Err(Classify2dError::Convention("both functions must contain the zero functional".into()));
        }
        let v = nonzero_terms(&t1);
        let w = nonzero_terms(&t2);
        if v.is_empty() || w.is_empty() {
            return Err(Classify2dError::Convention("each function needs a nonzero term".into()));
        }
        if v.len() + w.len() != n {
            return Err(Classify2dError::Convention(format!("{} nonzero terms in dimension {n}", v.len() + w.len())));
        }
        let rows: Vec<LinearFunctional<S>> = v.iter().chain(&w).cloned().collect();
        let m = IntMatrix::from_functionals(&rows, n)?;
        if m.rank() != n {
            return Err(Classify2dError::Convention("nonzero terms are linearly dependent".into()));
        }
        Ok(Self { t1: TrFunction::nonneg(n, &v), t2: TrFunction::nonneg(n, &w), v, w, m })
    }

    /// `max(0, x_1..x_k)` and `max(0, x_{k+1}..x_n)`.
    pub fn standard(n: usize, k: usize) -> Self {
        let v: Vec<LinearFunctional<S>> = (0..k).map(|i| LinearFunctional::unit(n, i)).collect();
        let w: Vec<LinearFunctional<S>> = (k..n).map(|i| LinearFunctional::unit(n, i)).collect();
        Self::new(TrFunction::nonneg(n, &v), TrFunction::nonneg(n, &w)).expect("standard pair")
    }

    pub fn t1(&self) -> &TrFunction<S> {
        &self.t1
    }

    pub fn t2(&self) -> &TrFunction<S> {
        &self.t2
    }

    pub fn n(&self) -> usize {
        self.m.ncols()
    }

    pub fn k(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &[LinearFunctional<S>] {
        &self.v
    }

    pub fn w(&self) -> &[LinearFunctional<S>] {
        &self.w
    }

    /// Rows `v_1..v_k, w_1..w_{n-k}`.
    pub fn matrix(&self) -> &IntMatrix<S> {
        &self.m
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.t2.clone(), self.t1.clone()).expect("swap keeps the convention")
    }

    /// Solves `M r = y`; `None` unless the solution is integral.
    fn solve(&self, y: &[S]) -> Option<LatticeVector<S>> {
        match solve_rational(self.m.rows(), y, self.n()) {
            RationalSolution::Unique(x) => x.iter().map(as_integer).collect::<Option<Vec<S>>>().map(LatticeVector::new),
            _ => None,
        }
    }

    /// Binomials `max(a, b)` of distinct terms of `T1` (including 0), then of `T2`.
    pub fn binomials(&self) -> (Vec<Binomial<S>>, Vec<Binomial<S>>) {
        let pairs = |t: &TrFunction<S>| {
            let fs = t.functionals();
            let mut out = Vec::new();
            for i in 0..fs.len() {
                for j in i + 1..fs.len() {
                    out.extend(Binomial::new(fs[i].clone(), fs[j].clone()));
                }
            }
            out
        };
        (pairs(&self.t1), pairs(&self.t2))
    }

    /// Pairs of binomials whose galleries must cover every facet of a bounded 2-cycle.
    pub fn covering_pairs(&self) -> Vec<(Binomial<S>, Binomial<S>)> {
        let (b1, b2) = self.binomials();
        let mut out = Vec::new();
        for x in &b1 {
            for y in &b2 {
                out.push((x.clone(), y.clone()));
            }
        }
        for bs in [&b1, &b2] {
            for i in 0..bs.len() {
                for j in i + 1..bs.len() {
                    out.push((bs[i].clone(), bs[j].clone()));
                }
            }
        }
        out
    }
}

/// A rational 2-plane, stored by the Hermite basis of its integer points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plane<S> {
    basis: [LatticeVector<S>; 2],
}

impl<S: Scalar> Plane<S> {
    pub fn new(u: &LatticeVector<S>, v: &LatticeVector<S>) -> Result<Self, Classify2dError> {
        if u.dim() != v.dim() {
            return Err(LatticeError::DimensionMismatch { expected: u.dim(), found: v.dim() }.into());
        }
        let sat = saturate(&[u.clone(), v.clone()])?;
        match <[LatticeVector<S>; 2]>::try_from(sat) {
            Ok(basis) => Ok(Self { basis }),
            Err(_) => Err(Classify2dError::DegeneratePlane),
        }
    }

    pub fn from_i64s(u: &[i64], v: &[i64]) -> Result<Self, Classify2dError> {
        Self::new(&LatticeVector::from_i64s(u), &LatticeVector::from_i64s(v))
    }

    pub fn basis(&self) -> &[LatticeVector<S>; 2] {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis[0].dim()
    }

    pub fn contains(&self, x: &LatticeVector<S>) -> bool {
        rank_of(&[self.basis[0].clone(), self.basis[1].clone(), x.clone()]) == 2
    }

    /// The plane as a balanced weight-1 fan.
    pub fn fan(&self) -> WeightedFan<S> {
        WeightedFan::plane(&self.basis[0], &self.basis[1]).expect("basis spans a plane")
    }

    /// Functionals vanishing on the plane.
    fn annihilator(&self) -> Vec<LatticeVector<S>> {
        let m = IntMatrix::from_vectors(&self.basis, self.ambient_dim()).expect("same dimension");
        kernel_basis(&m)
    }

    /// The direction of `self ∩ other` in basis coordinates, when it is a line.
    fn meet_direction(&self, other: &Self) -> Option<(S, S)> {
        for f in other.annihilator() {
            let (a, b) = (f.as_functional().eval(&self.basis[0]), f.as_functional().eval(&self.basis[1]));
            if !a.is_zero() || !b.is_zero() {
                // a line exactly when the remaining annihilators agree
                let d = (b, -a);
                let x = self.point(&d);
                return other.contains(&x).then(|| canonical_direction(d));
            }
        }
        None
    }

    /// `s b_1 + t b_2`.
    fn point(&self, (s, t): &(S, S)) -> LatticeVector<S> {
        &self.basis[0].scaled(s) + &self.basis[1].scaled(t)
    }
}

impl<S: Scalar> fmt::Display for Plane<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.basis[0], self.basis[1])
    }
}

fn canonical_direction<S: Scalar>((a, b): (S, S)) -> (S, S) {
    let g = a.gcd(&b);
    let (a, b) = (a / g.clone(), b / g);
    if a.is_negative() || (a.is_zero() && b.is_negative()) {
        (-a, -b)
    } else {
        (a, b)
    }
}

/// Counterclockwise order of planar directions starting at the positive first axis.
fn angular_cmp<S: Scalar>(p: &(S, S), q: &(S, S)) -> Ordering {
    let half = |(x, y): &(S, S)| u8::from(!(y.is_positive() || (y.is_zero() && x.is_positive())));
    half(p).cmp(&half(q)).then_with(|| {
        let cross = p.0.clone() * q.1.clone() - p.1.clone() * q.0.clone();
        S::zero().cmp(&cross)
    })
}

/// Where a candidate plane came from. Functional indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// `ρ_2 = M^{-1}(x_A, 0)`, `ρ_1 = M^{-1}(0, x_B)`.
    Case1 { a: Vec<usize>, b: Vec<usize> },
    /// The Bergman curve `r_1, r_2, r_3` of `T1·[L]`; with `swapped` the roles of `T1`, `T2` are exchanged.
    Case2 { swapped: bool, bergman_side: SideTable, other_side: SideTable },
    /// The Bergman curve of `T2·[L]` with every `v_i` vanishing on it.
    SelfBergman { swapped: bool, bergman_side: SideTable },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Case1 { a, b } => write!(f, "case1 A={a:?} B={b:?}"),
            Provenance::Case2 { swapped, bergman_side, other_side } => {
                write!(f, "case2{} {bergman_side} | {other_side}", if *swapped { " swapped" } else { "" })
            }
            Provenance::SelfBergman { swapped, bergman_side } => {
                write!(f, "self-bergman{} {bergman_side}", if *swapped { " swapped" } else { "" })
            }
        }
    }
}

/// Values of one side's functionals on `r_1, r_2, r_3`: every functional in `delta`
/// is `1` on ray `hot` and `-1` on one other ray, all others vanish on the curve.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SideTable {
    /// 0-based index of the ray where the function takes the value 1.
    pub hot: usize,
    pub delta: Vec<usize>,
    /// Functionals that are `-1` on each of the two other rays, in ray order.
    pub parts: [Vec<usize>; 2],
}

impl SideTable {
    fn others(&self) -> [usize; 2] {
        match self.hot {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        }
    }

    /// Column `j` of the table for a side with `len` functionals.
    fn column<S: Scalar>(&self, len: usize, j: usize) -> Vec<S> {
        let mut col = vec![S::zero(); len];
        let others = self.others();
        for (side, part) in self.parts.iter().enumerate() {
            for &i in part {
                if j == self.hot {
                    col[i - 1] = S::one();
                } else if j == others[side] {
                    col[i - 1] = -S::one();
                }
            }
        }
        col
    }

    /// All tables with nonempty `delta` for a side of `len` functionals.
    fn enumerate(len: usize, hots: &[usize]) -> Vec<SideTable> {
        let mut out = Vec::new();
        for &hot in hots {
            let total = 3usize.pow(len as u32);
            for code in 1..total {
                let mut parts = [Vec::new(), Vec::new()];
                let mut c = code;
                let mut delta = Vec::new();
                for i in 1..=len {
                    match c % 3 {
                        1 => {
                            parts[0].push(i);
                            delta.push(i);
                        }
                        2 => {
                            parts[1].push(i);
                            delta.push(i);
                        }
                        _ => {}
                    }
                    c /= 3;
                }
                out.push(SideTable { hot, delta, parts });
            }
        }
        out
    }
}

impl fmt::Display for SideTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.others();
        write!(
            f,
            "delta={:?} hot=r{} to_r{}={:?} to_r{}={:?}",
            self.delta,
            self.hot + 1,
            a + 1,
            self.parts[0],
            b + 1,
            self.parts[1]
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCandidate<S> {
    pub plane: Plane<S>,
    /// `ρ_1, ρ_2` for case 1, `r_1, r_2, r_3` with zero sum otherwise.
    pub generators: Vec<LatticeVector<S>>,
    pub provenance: Provenance,
    pub profile: Profile<S>,
}

pub fn plane_profile<S: Scalar>(pair: &ConventionPair<S>, plane: &Plane<S>) -> Result<Profile<S>, Classify2dError> {
    fan_profile(pair, &plane.fan())
}

/// The profile of any balanced 2-dimensional fan.
pub fn fan_profile<S: Scalar>(pair: &ConventionPair<S>, fan: &WeightedFan<S>) -> Result<Profile<S>, Classify2dError> {
    let (t1, t2) = (pair.t1().clone(), pair.t2().clone());
    Ok(Profile::new(
        intersection_number(&[t1.clone(), t1.clone()], fan)?,
        intersection_number(&[t1, t2.clone()], fan)?,
        intersection_number(&[t2.clone(), t2], fan)?,
    ))
}

type Raw<S> = (Plane<S>, Vec<LatticeVector<S>>, Provenance);

fn subsets(len: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << len)).map(|mask| (0..len).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()).collect()
}

fn indicator<S: Scalar>(len: usize, set: &[usize]) -> Vec<S> {
    let mut x = vec![S::zero(); len];
    for &i in set {
        x[i - 1] = S::one();
    }
    x
}

fn case1_raw<S: Scalar>(pair: &ConventionPair<S>) -> Vec<Raw<S>> {
    let (k, n) = (pair.k(), pair.n());
    let solve_side = |len: usize, offset: usize| -> Vec<(Vec<usize>, LatticeVector<S>)> {
        subsets(len)
            .into_iter()
            .filter_map(|set| {
                let mut y = vec![S::zero(); n];
                for (i, x) in indicator::<S>(len, &set).into_iter().enumerate() {
                    y[offset + i] = x;
                }
                let r = pair.solve(&y)?;
                r.is_primitive().then_some((set, r))
            })
            .collect()
    };
    let rho2s = solve_side(k, 0);
    let rho1s = solve_side(n - k, k);
    let mut out = Vec::new();
    for (a, rho2) in &rho2s {
        for (b, rho1) in &rho1s {
            if let Ok(plane) = Plane::new(rho1, rho2) {
                out.push((plane, vec![rho1.clone(), rho2.clone()], Provenance::Case1 { a: a.clone(), b: b.clone() }));
            }
        }
    }
    out
}

/// Solves the three rays from per-side tables; `None` unless integral, primitive and spanning a plane.
fn solve_curve<S: Scalar>(
    pair: &ConventionPair<S>,
    v_cols: &[Vec<S>; 3],
    w_cols: &[Vec<S>; 3],
) -> Option<(Plane<S>, Vec<LatticeVector<S>>)> {
    let mut rays = Vec::with_capacity(3);
    for j in 0..3 {
        let y: Vec<S> = v_cols[j].iter().chain(&w_cols[j]).cloned().collect();
        let r = pair.solve(&y)?;
        if !r.is_primitive() {
            return None;
        }
        rays.push(r);
    }
    let plane = Plane::new(&rays[0], &rays[1]).ok()?;
    Some((plane, rays))
}

fn case2_raw_oriented<S: Scalar>(pair: &ConventionPair<S>, swapped: bool) -> Vec<Raw<S>> {
    let (k, nk) = (pair.k(), pair.n() - pair.k());
    let bergman = SideTable::enumerate(k, &[0]);
    let other = SideTable::enumerate(nk, &[0, 1, 2]);
    let combos: Vec<(&SideTable, &SideTable)> =
        bergman.iter().flat_map(|b| other.iter().map(move |o| (b, o))).collect();
    combos
        .par_iter()
        .filter_map(|(b, o)| {
            let v_cols = [b.column(k, 0), b.column(k, 1), b.column(k, 2)];
            let w_cols = [o.column(nk, 0), o.column(nk, 1), o.column(nk, 2)];
            let (plane, rays) = solve_curve(pair, &v_cols, &w_cols)?;
            Some((plane, rays, Provenance::Case2 { swapped, bergman_side: (*b).clone(), other_side: (*o).clone() }))
        })
        .collect()
}

fn self_bergman_raw_oriented<S: Scalar>(pair: &ConventionPair<S>, swapped: bool) -> Vec<Raw<S>> {
    // T2's side carries the curve; v vanishes on it
    let (k, nk) = (pair.k(), pair.n() - pair.k());
    let tables = SideTable::enumerate(nk, &[0]);
    tables
        .par_iter()
        .filter_map(|t| {
            let zero = vec![S::zero(); k];
            let v_cols = [zero.clone(), zero.clone(), zero];
            let w_cols = [t.column(nk, 0), t.column(nk, 1), t.column(nk, 2)];
            let (plane, rays) = solve_curve(pair, &v_cols, &w_cols)?;
            Some((plane, rays, Provenance::SelfBergman { swapped, bergman_side: t.clone() }))
        })
        .collect()
}

/// Re-expresses raw candidates of the swapped pair in terms of the original one.
fn unswap<S: Scalar>(pair: &ConventionPair<S>, f: impl Fn(&ConventionPair<S>, bool) -> Vec<Raw<S>>) -> Vec<Raw<S>> {
    f(&pair.swapped(), true)
}

/// Attaches profiles and keeps the first candidate per plane, ordered by plane.
fn with_profiles<S: Scalar>(
    pair: &ConventionPair<S>,
    raw: Vec<Raw<S>>,
) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    let mut first: BTreeMap<Plane<S>, (Vec<LatticeVector<S>>, Provenance)> = BTreeMap::new();
    for (plane, gens, prov) in raw {
        first.entry(plane).or_insert((gens, prov));
    }
    let entries: Vec<(Plane<S>, (Vec<LatticeVector<S>>, Provenance))> = first.into_iter().collect();
    entries
        .into_par_iter()
        .map(|(plane, (generators, provenance))| {
            let profile = plane_profile(pair, &plane)?;
            Ok(PlaneCandidate { plane, generators, provenance, profile })
        })
        .collect()
}

/// Case 1: both `T_i·[L]` are lines; keeps profile `(0,1,0)`.
pub fn enumerate_planes_case1<S: Scalar>(pair: &ConventionPair<S>) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    let target = Profile::of_i64s(0, 1, 0);
    Ok(with_profiles(pair, case1_raw(pair))?.into_iter().filter(|c| c.profile == target).collect())
}

/// Case 2: one of `T_i·[L]` is a Bergman curve; keeps profiles `(1,1,≤1)` and `(≤1,1,1)`.
pub fn enumerate_planes_case2<S: Scalar>(pair: &ConventionPair<S>) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    let mut raw = case2_raw_oriented(pair, false);
    raw.extend(unswap(pair, case2_raw_oriented));
    let all = with_profiles(pair, raw)?;
    Ok(all
        .into_iter()
        .filter(|c| {
            let p = match &c.provenance {
                Provenance::Case2 { swapped: true, .. } => c.profile.swapped(),
                _ => c.profile.clone(),
            };
            p.t11.is_one() && p.t12.is_one() && p.t22 <= S::one()
        })
        .collect())
}

/// Profile `(0,0,1)`, and `(1,0,0)` from the swapped pair.
pub fn enumerate_planes_lemma47a<S: Scalar>(
    pair: &ConventionPair<S>,
) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    let mut raw = self_bergman_raw_oriented(pair, false);
    raw.extend(unswap(pair, self_bergman_raw_oriented));
    let all = with_profiles(pair, raw)?;
    let (a, b) = (Profile::of_i64s(0, 0, 1), Profile::of_i64s(1, 0, 0));
    Ok(all
        .into_iter()
        .filter(|c| match &c.provenance {
            Provenance::SelfBergman { swapped: true, .. } => c.profile == b,
            _ => c.profile == a,
        })
        .collect())
}

/// Every integral plane produced by any branch, with its profile.
pub fn raw_candidates<S: Scalar>(pair: &ConventionPair<S>) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    let mut raw = case1_raw(pair);
    raw.extend(case2_raw_oriented(pair, false));
    raw.extend(unswap(pair, case2_raw_oriented));
    raw.extend(self_bergman_raw_oriented(pair, false));
    raw.extend(unswap(pair, self_bergman_raw_oriented));
    with_profiles(pair, raw)
}

/// Raw candidates with exactly the given profile.
pub fn sweep_profile<S: Scalar>(
    pair: &ConventionPair<S>,
    target: &Profile<S>,
) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    Ok(raw_candidates(pair)?.into_iter().filter(|c| &c.profile == target).collect())
}

/// Planes with `T1·T2 = 0 = T1·T1 = T2·T2`; expected empty.
pub fn zero_profile_sweep<S: Scalar>(pair: &ConventionPair<S>) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    sweep_profile(pair, &Profile::of_i64s(0, 0, 0))
}

/// Planes with `T1·T2 = 0` and `T1·T1 = 1 = T2·T2`; expected empty.
pub fn split_profile_sweep<S: Scalar>(pair: &ConventionPair<S>) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    sweep_profile(pair, &Profile::of_i64s(1, 0, 1))
}

/// Union of the three certified enumerations, one candidate per plane.
pub fn certified_planes<S: Scalar>(pair: &ConventionPair<S>) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    let mut by_plane: BTreeMap<Plane<S>, PlaneCandidate<S>> = BTreeMap::new();
    for c in enumerate_planes_case1(pair)?
        .into_iter()
        .chain(enumerate_planes_case2(pair)?)
        .chain(enumerate_planes_lemma47a(pair)?)
    {
        by_plane.entry(c.plane.clone()).or_insert(c);
    }
    Ok(by_plane.into_values().collect())
}

/// Certified planes with the given profile; other profiles fall back to the raw sweep.
pub fn planes_with_profile<S: Scalar>(
    pair: &ConventionPair<S>,
    target: &Profile<S>,
) -> Result<Vec<PlaneCandidate<S>>, Classify2dError> {
    let p = target.clone();
    let certified = p.t12.is_one() && (p.t11.is_zero() || p.t11.is_one()) && (p.t22.is_zero() || p.t22.is_one())
        || p == Profile::of_i64s(0, 0, 1)
        || p == Profile::of_i64s(1, 0, 0);
    if certified {
        Ok(certified_planes(pair)?.into_iter().filter(|c| &c.profile == target).collect())
    } else {
        sweep_profile(pair, target)
    }
}

/// The facets of a 2-dimensional fan transversal to `V(L1) ∩ V(L2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gallery2D<S> {
    pub l1: Binomial<S>,
    pub l2: Binomial<S>,
    /// Facet indices, ascending.
    pub facets: Vec<usize>,
}

fn cone_plane<S: Scalar>(fan: &WeightedFan<S>, facet: usize) -> Result<Plane<S>, Classify2dError> {
    let c = &fan.facets()[facet];
    Plane::new(fan.ray(c[0]), fan.ray(c[1]))
}

pub fn gallery_2d<S: Scalar>(
    fan: &WeightedFan<S>,
    l1: &Binomial<S>,
    l2: &Binomial<S>,
) -> Result<Gallery2D<S>, Classify2dError> {
    let (f1, f2) = (l1.to_function(), l2.to_function());
    let product = intersection_number(&[f1.clone(), f2.clone()], fan)?;
    if !product.is_one() {
        return Err(Classify2dError::NotRegularSequence { product: product.to_string() });
    }
    let n = fan.ambient_dim();
    let diffs = IntMatrix::from_functionals(&[l1.difference(), l2.difference()], n)?;
    let lineality = kernel_basis(&diffs);
    let mut facets = Vec::new();
    for (k, c) in fan.facets().iter().enumerate() {
        let mut gens: Vec<LatticeVector<S>> = c.iter().map(|&i| fan.ray(i).clone()).collect();
        gens.extend(lineality.iter().cloned());
        let by_dim = rank_of(&gens) == n;
        let plane = cone_plane(fan, k)?;
        let by_product = intersection_number(&[f1.clone(), f2.clone()], &plane.fan())?.is_one();
        if by_dim != by_product {
            return Err(Classify2dError::StructureViolation(format!(
                "facet {k}: transversality {by_dim} but plane product criterion {by_product}"
            )));
        }
        if by_dim {
            if !fan.weight(k).is_one() {
                return Err(Classify2dError::StructureViolation(format!(
                    "gallery facet {k} has weight {}",
                    fan.weight(k)
                )));
            }
            facets.push(k);
        }
    }
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in &facets {
        for &r in &fan.facets()[k] {
            *count.entry(r).or_default() += 1;
        }
    }
    if let Some((r, c)) = count.iter().find(|(_, &c)| c != 2) {
        return Err(Classify2dError::StructureViolation(format!("ray {} lies in {c} gallery facets", fan.ray(*r))));
    }
    Ok(Gallery2D { l1: l1.clone(), l2: l2.clone(), facets })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetBound<S> {
    pub facet: usize,
    pub profile: Profile<S>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetBoundReport<S> {
    pub total: Profile<S>,
    pub facets: Vec<FacetBound<S>>,
}

impl<S: Scalar> FacetBoundReport<S> {
    pub fn holds(&self) -> bool {
        self.facets.iter().all(|f| f.holds)
    }
}

/// Compares the profile of each facet's plane with the fan's profile.
pub fn facet_bound_check<S: Scalar>(
    pair: &ConventionPair<S>,
    fan: &WeightedFan<S>,
) -> Result<FacetBoundReport<S>, Classify2dError> {
    let total = fan_profile(pair, fan)?;
    let mut cache: BTreeMap<Plane<S>, Profile<S>> = BTreeMap::new();
    let mut facets = Vec::new();
    for k in 0..fan.facets().len() {
        let plane = cone_plane(fan, k)?;
        let profile = match cache.get(&plane) {
            Some(p) => p.clone(),
            None => {
                let p = plane_profile(pair, &plane)?;
                cache.insert(plane, p.clone());
                p
            }
        };
        let holds = profile.le(&total);
        facets.push(FacetBound { facet: k, profile, holds });
    }
    Ok(FacetBoundReport { total, facets })
}

/// A 2-cone of a plane arrangement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    pub plane: usize,
    pub rays: [usize; 2],
}

/// Planes subdivided along their pairwise intersection lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement<S> {
    pub planes: Vec<Plane<S>>,
    pub rays: Vec<LatticeVector<S>>,
    pub sectors: Vec<Sector>,
}

impl<S: Scalar> Arrangement<S> {
    pub fn new(planes: &[Plane<S>]) -> Result<Self, Classify2dError> {
        for (i, p) in planes.iter().enumerate() {
            if planes[..i].contains(p) {
                return Err(Classify2dError::DuplicatePlane(i));
            }
        }
        let mut ray_ids: BTreeMap<LatticeVector<S>, usize> = BTreeMap::new();
        let mut rays = Vec::new();
        let mut sectors = Vec::new();
        for (pi, p) in planes.iter().enumerate() {
            let mut lines: BTreeSet<(S, S)> = BTreeSet::new();
            for (qi, q) in planes.iter().enumerate() {
                if qi != pi {
                    lines.extend(p.meet_direction(q));
                }
            }
            // sectors must be strictly convex, so use at least two lines
            for extra in [(S::one(), S::zero()), (S::zero(), S::one())] {
                if lines.len() < 2 {
                    lines.insert(extra);
                }
            }
            let mut dirs: Vec<(S, S)> =
                lines.iter().flat_map(|(a, b)| [(a.clone(), b.clone()), (-a.clone(), -b.clone())]).collect();
            dirs.sort_by(angular_cmp);
            let ids: Vec<usize> = dirs
                .iter()
                .map(|d| {
                    let v = p.point(d);
                    *ray_ids.entry(v.clone()).or_insert_with(|| {
                        rays.push(v);
                        rays.len() - 1
                    })
                })
                .collect();
            for i in 0..ids.len() {
                sectors.push(Sector { plane: pi, rays: [ids[i], ids[(i + 1) % ids.len()]] });
            }
        }
        Ok(Self { planes: planes.to_vec(), rays, sectors })
    }

    pub fn fan(&self, chosen: &[usize]) -> Result<WeightedFan<S>, Classify2dError> {
        let n = self.planes.first().map_or(0, |p| p.ambient_dim());
        let cones: Vec<Vec<usize>> = chosen.iter().map(|&s| self.sectors[s].rays.to_vec()).collect();
        let weights = vec![S::one(); cones.len()];
        Ok(WeightedFan::with_dim(n, 2, self.rays.clone(), cones, weights)?.compact())
    }

    /// Sectors of this arrangement's plane `plane` lying inside the cone `(a, b)`.
    fn sectors_inside(&self, plane: usize, a: &LatticeVector<S>, b: &LatticeVector<S>) -> Vec<usize> {
        let gens = [a.clone(), b.clone()];
        (0..self.sectors.len())
            .filter(|&s| {
                let sec = &self.sectors[s];
                let inner = &self.rays[sec.rays[0]] + &self.rays[sec.rays[1]];
                sec.plane == plane && cone_coordinates(&gens, &inner).is_some_and(|c| c.iter().all(|x| x.is_positive()))
            })
            .collect()
    }
}

/// The union of full weight-1 planes, subdivided along their intersections.
pub fn fan_from_planes<S: Scalar>(planes: &[Plane<S>]) -> Result<WeightedFan<S>, Classify2dError> {
    let arr = Arrangement::new(planes)?;
    let all: Vec<usize> = (0..arr.sectors.len()).collect();
    let fan = arr.fan(&all)?;
    require_balanced(&fan)?;
    Ok(fan)
}

fn require_balanced<S: Scalar>(fan: &WeightedFan<S>) -> Result<(), Classify2dError> {
    match check_balanced(fan).unbalanced().first() {
        Some(f) => Err(Classify2dError::Unbalanced { ray: f.face.to_string() }),
        None => Ok(()),
    }
}

/// Removes rays where exactly two coplanar facets meet in a strictly convex angle.
pub fn coarsen<S: Scalar>(fan: &WeightedFan<S>) -> Result<WeightedFan<S>, Classify2dError> {
    let mut cones: Vec<Vec<usize>> = fan.facets().to_vec();
    let mut weights: Vec<S> = fan.weights().to_vec();
    loop {
        let mut merged = false;
        for r in 0..fan.rays().len() {
            let at: Vec<usize> = (0..cones.len()).filter(|&c| cones[c].contains(&r)).collect();
            if at.len() != 2 || weights[at[0]] != weights[at[1]] {
                continue;
            }
            let other = |c: usize| cones[c].iter().copied().find(|&x| x != r).expect("2-cone");
            let (a, b) = (other(at[0]), other(at[1]));
            let (va, vb) = (fan.ray(a), fan.ray(b));
            if rank_of(&[va.clone(), vb.clone()]) != 2 || rank_of(&[va.clone(), vb.clone(), fan.ray(r).clone()]) != 2 {
                continue;
            }
            let inside = cone_coordinates(&[va.clone(), vb.clone()], fan.ray(r))
                .is_some_and(|c| c.iter().all(|x| x.is_positive()));
            let mut key = vec![a, b];
            key.sort_unstable();
            if !inside || cones.contains(&key) {
                continue;
            }
            let w = weights[at[0]].clone();
            let (hi, lo) = (at[1], at[0]);
            cones.remove(hi);
            weights.remove(hi);
            cones[lo] = key;
            weights[lo] = w;
            merged = true;
            break;
        }
        if !merged {
            break;
        }
    }
    Ok(WeightedFan::with_dim(fan.ambient_dim(), 2, fan.rays().to_vec(), cones, weights)?.compact())
}

/// A facet together with the first covering pair whose gallery contains it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub facet: usize,
    /// Index into the pair's covering binomial pairs.
    pub pair: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssembledCycle<S> {
    /// Indices into the candidate plane list.
    pub planes: Vec<usize>,
    /// Coarsest representative found.
    pub fan: WeightedFan<S>,
    pub profile: Profile<S>,
    pub galleries: Vec<Gallery2D<S>>,
    pub coverage: Vec<Coverage>,
    pub facet_bounds: FacetBoundReport<S>,
}

impl<S: Scalar> AssembledCycle<S> {
    pub fn is_covered(&self) -> bool {
        self.coverage.iter().all(|c| c.pair.is_some())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssemblyReport<S> {
    pub planes: Vec<PlaneCandidate<S>>,
    pub cycles: Vec<AssembledCycle<S>>,
    /// Balanced candidates with `T1·T2 = 0` and `T1·T1 = 1 = T2·T2`.
    pub hodge_counterexamples: Vec<AssembledCycle<S>>,
    pub subsets_examined: usize,
    pub balanced_found: usize,
}

fn count_subsets(n: usize, max: usize, budget: usize) -> usize {
    let mut total = 0usize;
    let mut c = 1usize;
    for s in 1..=max.min(n) {
        c = c.saturating_mul(n - s + 1) / s;
        total = total.saturating_add(c);
        if total > budget {
            return total;
        }
    }
    total
}

fn plane_subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=max.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.clone());
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Balanced sector selections using every plane of the arrangement.
fn balanced_selections<S: Scalar>(arr: &Arrangement<S>) -> Result<Vec<Vec<usize>>, Classify2dError> {
    let ns = arr.sectors.len();
    let mut incident: Vec<Vec<(usize, LatticeVector<S>)>> = vec![Vec::new(); arr.rays.len()];
    for (s, sec) in arr.sectors.iter().enumerate() {
        for e in 0..2 {
            let (r, o) = (sec.rays[e], sec.rays[1 - e]);
            let u = normal_vector(&arr.rays[r], &arr.rays[o])?;
            incident[r].push((s, u));
        }
    }
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); ns];
    for (r, inc) in incident.iter().enumerate() {
        if let Some(last) = inc.iter().map(|(s, _)| *s).max() {
            closing[last].push(r);
        }
    }
    let mut chosen = vec![false; ns];
    let mut out = Vec::new();
    let mut visited = 0usize;
    search(arr, &incident, &closing, 0, &mut chosen, &mut out, &mut visited)?;
    Ok(out)
}

fn search<S: Scalar>(
    arr: &Arrangement<S>,
    incident: &[Vec<(usize, LatticeVector<S>)>],
    closing: &[Vec<usize>],
    t: usize,
    chosen: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
    visited: &mut usize,
) -> Result<(), Classify2dError> {
    *visited += 1;
    if *visited > SECTOR_BUDGET {
        return Err(Classify2dError::SearchBoundExceeded {
            planes: arr.planes.len(),
            max_planes: arr.planes.len(),
            subsets: *visited,
            budget: SECTOR_BUDGET,
        });
    }
    if t == chosen.len() {
        let used: BTreeSet<usize> = (0..chosen.len()).filter(|&s| chosen[s]).map(|s| arr.sectors[s].plane).collect();
        if used.len() == arr.planes.len() {
            out.push((0..chosen.len()).filter(|&s| chosen[s]).collect());
        }
        return Ok(());
    }
    for pick in [false, true] {
        chosen[t] = pick;
        let ok = closing[t].iter().all(|&r| {
            let n = arr.rays[r].dim();
            let sum =
                incident[r].iter().filter(|(s, _)| chosen[*s]).fold(LatticeVector::zeros(n), |acc, (_, u)| &acc + u);
            sum.is_zero() || are_parallel(&sum, &arr.rays[r])
        });
        if ok {
            search(arr, incident, closing, t + 1, chosen, out, visited)?;
        }
    }
    chosen[t] = false;
    Ok(())
}

fn certify<S: Scalar>(
    pair: &ConventionPair<S>,
    planes: Vec<usize>,
    fan: WeightedFan<S>,
    profile: Profile<S>,
) -> Result<AssembledCycle<S>, Classify2dError> {
    let pairs = pair.covering_pairs();
    let mut galleries = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; fan.facets().len()];
    for (pi, (a, b)) in pairs.iter().enumerate() {
        let product = intersection_number(&[a.to_function(), b.to_function()], &fan)?;
        if !product.is_one() {
            continue;
        }
        let g = gallery_2d(&fan, a, b)?;
        for &k in &g.facets {
            owner[k].get_or_insert(pi);
        }
        galleries.push(g);
    }
    let coverage = owner.into_iter().enumerate().map(|(facet, pair)| Coverage { facet, pair }).collect();
    let facet_bounds = facet_bound_check(pair, &fan)?;
    Ok(AssembledCycle { planes, fan, profile, galleries, coverage, facet_bounds })
}

/// Searches subfans of unions of at most `max_planes` certified planes for strongly regular cycles.
pub fn assemble_strongly_regular<S: Scalar>(
    pair: &ConventionPair<S>,
    max_planes: usize,
) -> Result<AssemblyReport<S>, Classify2dError> {
    let planes = certified_planes(pair)?;
    assemble_from(pair, planes, max_planes)
}

/// The assembly search over an explicit candidate plane list.
pub fn assemble_from<S: Scalar>(
    pair: &ConventionPair<S>,
    planes: Vec<PlaneCandidate<S>>,
    max_planes: usize,
) -> Result<AssemblyReport<S>, Classify2dError> {
    let total = count_subsets(planes.len(), max_planes, SUBSET_BUDGET);
    if total > SUBSET_BUDGET {
        return Err(Classify2dError::SearchBoundExceeded {
            planes: planes.len(),
            max_planes,
            subsets: total,
            budget: SUBSET_BUDGET,
        });
    }
    let all_planes: Vec<Plane<S>> = planes.iter().map(|c| c.plane.clone()).collect();
    let global = Arrangement::new(&all_planes)?;
    let subsets = plane_subsets(planes.len(), max_planes);
    type Found<S> = (Vec<usize>, Vec<usize>, WeightedFan<S>, Profile<S>);
    let found: Vec<Result<Vec<Found<S>>, Classify2dError>> = subsets
        .par_iter()
        .map(|subset| {
            let ps: Vec<Plane<S>> = subset.iter().map(|&i| all_planes[i].clone()).collect();
            let arr = Arrangement::new(&ps)?;
            let mut local = Vec::new();
            for sel in balanced_selections(&arr)? {
                let fan = arr.fan(&sel)?;
                let mut key: Vec<usize> = sel
                    .iter()
                    .flat_map(|&s| {
                        let sec = &arr.sectors[s];
                        let gp = subset[sec.plane];
                        global.sectors_inside(gp, &arr.rays[sec.rays[0]], &arr.rays[sec.rays[1]])
                    })
                    .collect();
                key.sort_unstable();
                let profile = fan_profile(pair, &fan)?;
                local.push((key, subset.clone(), fan, profile));
            }
            Ok(local)
        })
        .collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut cycles = Vec::new();
    let mut hodge = Vec::new();
    let mut balanced_found = 0;
    for batch in found {
        for (key, subset, fan, profile) in batch? {
            if !seen.insert(key) {
                continue;
            }
            balanced_found += 1;
            if profile.is_strongly_regular() {
                cycles.push(certify(pair, subset, coarsen(&fan)?, profile)?);
            } else if profile.violates_hodge_index() {
                hodge.push(certify(pair, subset, coarsen(&fan)?, profile)?);
            }
        }
    }
    Ok(AssemblyReport { planes, cycles, hodge_counterexamples: hodge, subsets_examined: subsets.len(), balanced_found })
}
