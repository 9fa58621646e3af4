#![allow(dead_code)]

use proptest::prelude::*;

use tropfan_core::classify2d::{fan_from_planes, Plane};
use tropfan_core::lattice::{IntMatrix, LatticeVector, LinearFunctional};
use tropfan_core::{Fan, Int, Matrix, Pair, TrFn, Vector};

pub fn int(x: i64) -> Int {
    Int::from(x)
}

pub fn vector(c: &[i64]) -> Vector {
    LatticeVector::from_i64s(c)
}

pub fn apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn matrix(m: &[Vec<i64>]) -> Matrix {
    let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
    IntMatrix::from_i64_rows(&rows)
}

/// An element of GL_n(Z): a row permutation, sign flips and elementary row operations.
pub fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    let ops = prop::collection::vec((0..n, 0..n, -1i64..=1), 0..=2 * n);
    let perm = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
    let signs = prop::collection::vec(any::<bool>(), n);
    (ops, perm, signs).prop_map(move |(ops, perm, signs)| {
        let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        for (i, j, c) in ops {
            if i != j {
                let src = m[j].clone();
                m[i].iter_mut().zip(&src).for_each(|(x, y)| *x += c * y);
            }
        }
        let mut out: Vec<Vec<i64>> = perm.iter().map(|&p| m[p].clone()).collect();
        for (row, s) in out.iter_mut().zip(signs) {
            if s {
                row.iter_mut().for_each(|x| *x = -*x);
            }
        }
        out
    })
}

pub fn functional(n: usize, bound: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-bound..=bound, n)
}

/// A tropical function with 1 to 4 terms; about half contain the zero functional.
pub fn trfn(n: usize) -> impl Strategy<Value = TrFn> {
    (prop::collection::vec(functional(n, 2), 1..=4), any::<bool>()).prop_map(move |(mut fs, zero)| {
        if zero {
            fs.push(vec![0; n]);
        }
        let ls: Vec<LinearFunctional<Int>> = fs.iter().map(|f| LinearFunctional::from_i64s(f)).collect();
        TrFn::new(ls).expect("nonempty")
    })
}

fn curve_factor(kind: u8) -> Vec<(Vec<i64>, i64)> {
    match kind {
        0 => vec![(vec![1, 0], 1), (vec![0, 1], 1), (vec![-1, -1], 1)],
        1 => vec![(vec![2, 1], 1), (vec![-1, 1], 1), (vec![-1, -2], 1)],
        _ => vec![(vec![1, 0], 2), (vec![-1, 1], 1), (vec![-1, -1], 1)],
    }
}

fn product_fan(n: usize, kind: u8, tilt: i64, u: &[Vec<i64>]) -> Fan {
    let curve = curve_factor(kind);
    let mut rays: Vec<Vec<i64>> = curve
        .iter()
        .map(|(v, _)| {
            let mut x = v.clone();
            x.resize(n, 0);
            x
        })
        .collect();
    let mut up = vec![0; n];
    up[n - 1] = 1;
    if n == 4 {
        up[2] = tilt;
    }
    rays.push(up.iter().map(|x| -x).collect());
    rays.push(up);
    let mut cones = Vec::new();
    let mut weights = Vec::new();
    for (i, (_, w)) in curve.iter().enumerate() {
        for j in [3, 4] {
            cones.push(vec![i, j]);
            weights.push(int(*w));
        }
    }
    let rays: Vec<Vector> = rays.iter().map(|x| vector(&apply(u, x))).collect();
    Fan::new(n, rays, cones, weights).expect("product fan")
}

fn bergman_plane(u: &[Vec<i64>]) -> Fan {
    let base = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]];
    let rays: Vec<Vector> = base.iter().map(|x| vector(&apply(u, x))).collect();
    let cones = vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]];
    Fan::new(3, rays, cones, vec![int(1); 6]).expect("Bergman plane")
}

fn plane_union(n: usize, gens: &[(Vec<i64>, Vec<i64>)]) -> Option<Fan> {
    let mut planes: Vec<Plane<Int>> = Vec::new();
    for (a, b) in gens {
        let p = Plane::from_i64s(a, b).ok()?;
        if !planes.contains(&p) {
            planes.push(p);
        }
    }
    let f = fan_from_planes(&planes).ok()?;
    (!f.is_empty() && f.ambient_dim() == n).then_some(f)
}

/// A balanced 2-dimensional fan in R^n for n ∈ {3, 4}: a product of a curve and a line,
/// the Bergman plane of U_{3,4} (n = 3), or a union of up to three planes.
pub fn fan2(n: usize) -> impl Strategy<Value = Fan> {
    let gens = prop::collection::vec((functional(n, 2), functional(n, 2)), 1..=3);
    (0u8..3, 0u8..3, 1i64..=2, unimodular(n), gens).prop_filter_map(
        "degenerate planes",
        move |(which, kind, tilt, u, gens)| match which {
            0 => Some(product_fan(n, kind, tilt, &u)),
            1 if n == 3 => Some(bergman_plane(&u)),
            _ => plane_union(n, &gens),
        },
    )
}

/// A regular 1-dimensional fan assembled from coordinate blocks and moved by a unimodular map.
#[derive(Clone, Debug)]
pub struct RegularCurve {
    pub fan: Fan,
    pub classes: usize,
    pub nongallery: usize,
}

/// Blocks: `(0, d)` a Bergman line of rank d, `(1, 1)` a weight-2 line, `(2, 2)` a primitive triangle.
fn block() -> impl Strategy<Value = (u8, usize)> {
    prop_oneof![
        3 => (1usize..=3).prop_map(|d| (0u8, d)),
        1 => Just((1u8, 1usize)),
        1 => Just((2u8, 2usize)),
    ]
}

pub fn regular_curve() -> impl Strategy<Value = RegularCurve> {
    (1usize..=3, prop::collection::vec(block(), 0..=2))
        .prop_flat_map(|(d, rest)| {
            let mut blocks = vec![(0u8, d)];
            blocks.extend(rest);
            let n: usize = blocks.iter().map(|b| b.1).sum();
            (Just(blocks).prop_shuffle(), unimodular(n), any::<prop::sample::Index>())
        })
        .prop_map(|(blocks, u, rot)| {
            let n: usize = blocks.iter().map(|b| b.1).sum();
            let mut rays: Vec<(Vec<i64>, i64)> = Vec::new();
            let mut offset = 0;
            let mut nongallery = 0;
            for &(kind, d) in &blocks {
                let at = |local: &[i64]| {
                    let mut v = vec![0; n];
                    v[offset..offset + local.len()].copy_from_slice(local);
                    v
                };
                match kind {
                    0 => {
                        for i in 0..d {
                            let mut e = vec![0; d];
                            e[i] = 1;
                            rays.push((at(&e), 1));
                        }
                        rays.push((at(&vec![-1; d]), 1));
                    }
                    1 => {
                        rays.push((at(&[1]), 2));
                        rays.push((at(&[-1]), 2));
                        nongallery += 2;
                    }
                    _ => {
                        for t in [[2, 1], [-1, 1], [-1, -2]] {
                            rays.push((at(&t), 1));
                        }
                        nongallery += 3;
                    }
                }
                offset += d;
            }
            let k = rot.index(rays.len());
            rays.rotate_left(k);
            let fan =
                Fan::from_rays(n, rays.iter().map(|(v, w)| (vector(&apply(&u, v)), int(*w))).collect()).expect("curve");
            RegularCurve { fan, classes: blocks.iter().filter(|b| b.0 == 0).count(), nongallery }
        })
}

/// A pair satisfying the general position convention, n ∈ {3, 4, 5}.
pub fn pair() -> impl Strategy<Value = Pair> {
    (3usize..=5).prop_flat_map(|n| (Just(n), 1..n, prop::collection::vec(functional(n, 2), n))).prop_filter_map(
        "dependent terms",
        |(n, k, rows)| {
            let ls: Vec<LinearFunctional<Int>> = rows.iter().map(|r| LinearFunctional::from_i64s(r)).collect();
            Pair::new(TrFn::nonneg(n, &ls[..k]), TrFn::nonneg(n, &ls[k..])).ok()
        },
    )
}
