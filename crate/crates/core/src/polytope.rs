//! Exact feasibility for small linear programs and lattice polytopes given by
//! their points.

use num_traits::{One, Zero};

use crate::lattice::{rank_of, LatticeVector, LinearFunctional};
use crate::scalar::{Rational, Scalar};

/// Decides whether `A x = b, x >= 0` has a rational solution.
///
/// Phase one of the simplex method with Bland's rule, so it terminates on
/// degenerate instances. Returns a feasible point when one exists.
pub fn feasible_point<S: Scalar>(a: &[Vec<Rational<S>>], b: &[Rational<S>], nvars: usize) -> Option<Vec<Rational<S>>> {
    let m = a.len();
    assert_eq!(m, b.len());
    let zero = Rational::<S>::zero();
    // tableau columns: nvars originals, m artificials, rhs
    let width = nvars + m + 1;
    let mut t: Vec<Vec<Rational<S>>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), nvars);
        let flip = b[i] < zero;
        let mut r: Vec<Rational<S>> = row.iter().map(|x| if flip { -x.clone() } else { x.clone() }).collect();
        r.extend((0..m).map(|j| if j == i { Rational::one() } else { Rational::zero() }));
        r.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(r);
    }
    let mut basis: Vec<usize> = (nvars..nvars + m).collect();
    // reduced costs of the phase-one objective (minimise the sum of artificials)
    let mut cost: Vec<Rational<S>> = vec![Rational::zero(); width];
    for r in &t {
        for j in 0..nvars {
            cost[j] = cost[j].clone() + r[j].clone();
        }
        cost[width - 1] = cost[width - 1].clone() + r[width - 1].clone();
    }
    while let Some(enter) = (0..nvars + m).find(|&j| cost[j] > zero) {
        let mut leave: Option<(usize, Rational<S>)> = None;
        for i in 0..m {
            if t[i][enter] > zero {
                let ratio = t[i][width - 1].clone() / t[i][enter].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // the phase-one objective is bounded below by zero
        let (p, _) = leave.expect("phase one is bounded");
        let piv = t[p][enter].clone();
        for x in t[p].iter_mut() {
            *x = x.clone() / piv.clone();
        }
        for i in 0..m {
            if i != p && !t[i][enter].is_zero() {
                let f = t[i][enter].clone();
                for j in 0..width {
                    let d = f.clone() * t[p][j].clone();
                    t[i][j] = t[i][j].clone() - d;
                }
            }
        }
        let f = cost[enter].clone();
        for j in 0..width {
            let d = f.clone() * t[p][j].clone();
            cost[j] = cost[j].clone() - d;
        }
        basis[p] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); nvars];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nvars {
            x[bv] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

/// Whether `point` is a convex combination of `points`; returns the weights.
pub fn convex_weights<S: Scalar>(point: &[S], points: &[Vec<S>]) -> Option<Vec<Rational<S>>> {
    if points.is_empty() {
        return None;
    }
    let d = point.len();
    let q = |x: &S| Rational::from_integer(x.clone());
    let mut a: Vec<Vec<Rational<S>>> = (0..d).map(|i| points.iter().map(|p| q(&p[i])).collect()).collect();
    a.push(vec![Rational::one(); points.len()]);
    let mut b: Vec<Rational<S>> = point.iter().map(q).collect();
    b.push(Rational::one());
    let w = feasible_point(&a, &b, points.len())?;
    debug_assert!((0..d).all(|i| {
        let s = w.iter().zip(points).fold(Rational::zero(), |acc, (wi, p)| acc + wi.clone() * q(&p[i]));
        s == q(&point[i])
    }));
    Some(w)
}

pub fn in_convex_hull<S: Scalar>(point: &[S], points: &[Vec<S>]) -> bool {
    convex_weights(point, points).is_some()
}

/// The convex hull of finitely many dual lattice points, stored by its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolytope<S> {
    vertices: Vec<LinearFunctional<S>>,
}

impl<S: Scalar> NewtonPolytope<S> {
    pub fn from_points(points: &[LinearFunctional<S>]) -> Self {
        let mut pts: Vec<LinearFunctional<S>> = points.to_vec();
        pts.sort();
        pts.dedup();
        let coords: Vec<Vec<S>> = pts.iter().map(|p| p.coords().to_vec()).collect();
        let vertices = pts
            .iter()
            .enumerate()
            .filter(|(i, p)| {
                let others: Vec<Vec<S>> =
                    coords.iter().enumerate().filter(|(j, _)| j != i).map(|(_, c)| c.clone()).collect();
                !in_convex_hull(p.coords(), &others)
            })
            .map(|(_, p)| p.clone())
            .collect();
        Self { vertices }
    }

    pub fn vertices(&self) -> &[LinearFunctional<S>] {
        &self.vertices
    }

    pub fn contains(&self, p: &LinearFunctional<S>) -> bool {
        let coords: Vec<Vec<S>> = self.vertices.iter().map(|v| v.coords().to_vec()).collect();
        in_convex_hull(p.coords(), &coords)
    }

    /// Affine dimension.
    pub fn dim(&self) -> usize {
        affine_dim(&self.vertices)
    }
}

/// Affine dimension of a point set (0 for a single point, and for the empty set).
pub fn affine_dim<S: Scalar>(points: &[LinearFunctional<S>]) -> usize {
    let Some(base) = points.first() else { return 0 };
    let diffs: Vec<LatticeVector<S>> = points[1..].iter().map(|p| (p - base).as_vector()).collect();
    rank_of(&diffs)
}

/// `dim(P + Q)` for the Minkowski sum of two polytopes.
pub fn minkowski_dim<S: Scalar>(p: &NewtonPolytope<S>, q: &NewtonPolytope<S>) -> usize {
    let (Some(p0), Some(q0)) = (p.vertices.first(), q.vertices.first()) else { return 0 };
    let diffs: Vec<LatticeVector<S>> = p
        .vertices
        .iter()
        .map(|v| (v - p0).as_vector())
        .chain(q.vertices.iter().map(|v| (v - q0).as_vector()))
        .collect();
    rank_of(&diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    type L = LinearFunctional<BigInt>;

    fn l(c: &[i64]) -> L {
        L::from_i64s(c)
    }

    fn pts(ps: &[&[i64]]) -> Vec<Vec<BigInt>> {
        ps.iter().map(|p| p.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn hull_membership() {
        let square = pts(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]);
        assert!(in_convex_hull(l(&[1, 1]).coords(), &square));
        assert!(in_convex_hull(l(&[2, 1]).coords(), &square));
        assert!(!in_convex_hull(l(&[3, 1]).coords(), &square));
        let w = convex_weights(l(&[1, 1]).coords(), &pts(&[&[2, 0], &[0, 2]])).unwrap();
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(w, vec![half.clone(), half]);
    }

    #[test]
    fn degenerate_hull_terminates() {
        // many repeated and collinear points
        let p = pts(&[&[0, 0, 0], &[0, 0, 0], &[1, 1, 1], &[2, 2, 2], &[1, 1, 1], &[0, 0, 0]]);
        assert!(in_convex_hull(l(&[1, 1, 1]).coords(), &p));
        assert!(!in_convex_hull(l(&[1, 1, 0]).coords(), &p));
    }

    #[test]
    fn vertices_drop_interior_points() {
        let p = NewtonPolytope::from_points(&[l(&[0, 0]), l(&[2, 0]), l(&[0, 2]), l(&[1, 1]), l(&[1, 0])]);
        assert_eq!(p.vertices(), &[l(&[0, 0]), l(&[0, 2]), l(&[2, 0])]);
        assert_eq!(p.dim(), 2);
    }

    #[test]
    fn minkowski_dimension() {
        let p = NewtonPolytope::from_points(&[l(&[0, 0, 0]), l(&[1, 0, 0])]);
        let q = NewtonPolytope::from_points(&[l(&[0, 0, 0]), l(&[0, 0, 1])]);
        assert_eq!(minkowski_dim(&p, &q), 2);
    }

    proptest! {
        #[test]
        fn convex_combinations_are_members(
            ps in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 1..5),
            ws in prop::collection::vec(0i64..4, 5),
        ) {
            let total: i64 = ws.iter().take(ps.len()).sum();
            prop_assume!(total > 0);
            // total * point = sum w_i p_i; test the scaled point against scaled vertices
            let scaled: Vec<Vec<BigInt>> = ps.iter().map(|p| p.iter().map(|&x| BigInt::from(x * total)).collect()).collect();
            let point: Vec<BigInt> = (0..3)
                .map(|c| BigInt::from(ps.iter().zip(&ws).map(|(p, w)| p[c] * w).sum::<i64>()))
                .collect();
            prop_assert!(in_convex_hull(&point, &scaled));
        }

        #[test]
        fn vertices_span_same_hull(ps in prop::collection::vec(prop::collection::vec(-4i64..=4, 2), 1..7)) {
            let fs: Vec<L> = ps.iter().map(|p| l(p)).collect();
            let poly = NewtonPolytope::from_points(&fs);
            prop_assert!(!poly.vertices().is_empty());
            for f in &fs {
                prop_assert!(poly.contains(f));
            }
        }
    }
}
