//! Exact linear algebra over `Z` and `Q`: primitive vectors, Hermite normal
//! forms with transformation tracking, lattice indices, saturated kernels and
//! integral solutions of dual systems.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_traits::Zero;
use thiserror::Error;

use crate::scalar::{as_integer, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("zero vector has no primitive generator")]
    ZeroVector,
    #[error("vector {0} is not primitive")]
    NotPrimitive(String),
    #[error("zero matrix has no Hermite form")]
    ZeroMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("empty generator set")]
    Empty,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Why an integral dual system has no answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NoSolution {
    #[error("constraints are inconsistent")]
    Inconsistent,
    #[error("the unique rational solution is not integral")]
    NonIntegral,
    #[error("constraints do not determine a unique functional")]
    Underdetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error(transparent)]
    NoSolution(#[from] NoSolution),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

macro_rules! coordinate_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name<S>(Vec<S>);

        impl<S: Scalar> $name<S> {
            pub fn new(coords: Vec<S>) -> Self {
                Self(coords)
            }

            pub fn from_i64s(coords: &[i64]) -> Self {
                Self(coords.iter().map(|&c| S::of(c)).collect())
            }

            pub fn zeros(n: usize) -> Self {
                Self(vec![S::zero(); n])
            }

            /// The `i`-th standard basis element of `Z^n`.
            pub fn unit(n: usize, i: usize) -> Self {
                let mut v = Self::zeros(n);
                v.0[i] = S::one();
                v
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn coords(&self) -> &[S] {
                &self.0
            }

            pub fn into_coords(self) -> Vec<S> {
                self.0
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(Zero::is_zero)
            }

            /// Greatest common divisor of the coordinates (zero for the zero vector).
            pub fn content(&self) -> S {
                self.0.iter().fold(S::zero(), |g, c| g.gcd(c))
            }

            pub fn scaled(&self, c: &S) -> Self {
                Self(self.0.iter().map(|x| x.clone() * c.clone()).collect())
            }

            /// Exact division of every coordinate, `None` if some coordinate is not divisible.
            pub fn divided(&self, c: &S) -> Option<Self> {
                if c.is_zero() {
                    return None;
                }
                let mut out = Vec::with_capacity(self.0.len());
                for x in &self.0 {
                    let (q, r) = x.div_rem(c);
                    if !r.is_zero() {
                        return None;
                    }
                    out.push(q);
                }
                Some(Self(out))
            }

            /// `self / gcd(self)`; a positive multiple of `self` with coprime coordinates.
            pub fn primitive(&self) -> Result<Self, LatticeError> {
                let g = self.content();
                if g.is_zero() {
                    return Err(LatticeError::ZeroVector);
                }
                Ok(self.divided(&g).expect("content divides every coordinate"))
            }

            pub fn is_primitive(&self) -> bool {
                self.content().is_one()
            }

            pub(crate) fn dot_coords(&self, other: &[S]) -> S {
                debug_assert_eq!(self.0.len(), other.len());
                self.0
                    .iter()
                    .zip(other)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            }

            pub fn to_i64s(&self) -> Option<Vec<i64>> {
                self.0.iter().map(|c| c.to_i64()).collect()
            }

            /// Reinterprets the coordinates in another scalar ring.
            pub fn convert<T: Scalar>(&self) -> Option<$name<T>> {
                self.0
                    .iter()
                    .map(|c| T::parse_decimal(&c.to_string()))
                    .collect::<Option<Vec<T>>>()
                    .map($name)
            }
        }

        impl<S> Index<usize> for $name<S> {
            type Output = S;
            fn index(&self, i: usize) -> &S {
                &self.0[i]
            }
        }

        impl<S: Scalar> Add for &$name<S> {
            type Output = $name<S>;
            fn add(self, rhs: Self) -> $name<S> {
                assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a.clone() + b.clone()).collect())
            }
        }

        impl<S: Scalar> Sub for &$name<S> {
            type Output = $name<S>;
            fn sub(self, rhs: Self) -> $name<S> {
                assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a.clone() - b.clone()).collect())
            }
        }

        impl<S: Scalar> Neg for &$name<S> {
            type Output = $name<S>;
            fn neg(self) -> $name<S> {
                $name(self.0.iter().map(|a| -a.clone()).collect())
            }
        }

        impl<S: Scalar> fmt::Display for $name<S> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "(")?;
                for (i, c) in self.0.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    };
}

coordinate_vector!(
    /// A point of `Z^n`.
    LatticeVector
);

coordinate_vector!(
    /// An element of the dual lattice `(Z^n)^∨`, acting by dot product.
    LinearFunctional
);

impl<S: Scalar> LinearFunctional<S> {
    pub fn eval(&self, v: &LatticeVector<S>) -> S {
        assert_eq!(self.dim(), v.dim(), "dimension mismatch");
        self.dot_coords(v.coords())
    }

    pub fn as_vector(&self) -> LatticeVector<S> {
        LatticeVector::new(self.0.clone())
    }
}

impl<S: Scalar> LatticeVector<S> {
    pub fn as_functional(&self) -> LinearFunctional<S> {
        LinearFunctional::new(self.0.clone())
    }
}

/// Free-function form of [`LatticeVector::primitive`].
pub fn primitive<S: Scalar>(v: &LatticeVector<S>) -> Result<LatticeVector<S>, LatticeError> {
    v.primitive()
}

/// A dense integer matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix<S> {
    rows: Vec<Vec<S>>,
    ncols: usize,
}

impl<S: Scalar> IntMatrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LatticeError> {
        let ncols = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(LatticeError::Ragged { row: i, expected: ncols, found: r.len() });
            }
        }
        Ok(Self { rows, ncols })
    }

    /// Builds an `r x ncols` matrix, also for `r = 0`.
    pub fn with_width(rows: Vec<Vec<S>>, ncols: usize) -> Result<Self, LatticeError> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(LatticeError::Ragged { row: i, expected: ncols, found: r.len() });
            }
        }
        Ok(Self { rows, ncols })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&c| S::of(c)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn from_functionals(rows: &[LinearFunctional<S>], ncols: usize) -> Result<Self, LatticeError> {
        Self::with_width(rows.iter().map(|r| r.coords().to_vec()).collect(), ncols)
    }

    pub fn from_vectors(rows: &[LatticeVector<S>], ncols: usize) -> Result<Self, LatticeError> {
        Self::with_width(rows.iter().map(|r| r.coords().to_vec()).collect(), ncols)
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
        Self { rows, ncols: n }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { rows: vec![vec![S::zero(); ncols]; nrows], ncols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> LinearFunctional<S> {
        LinearFunctional::new(self.rows[i].clone())
    }

    pub fn row_functionals(&self) -> Vec<LinearFunctional<S>> {
        (0..self.nrows()).map(|i| self.row(i)).collect()
    }

    pub fn column(&self, j: usize) -> LatticeVector<S> {
        LatticeVector::new(self.rows.iter().map(|r| r[j].clone()).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let rows = (0..self.ncols).map(|j| self.rows.iter().map(|r| r[j].clone()).collect()).collect();
        Self { rows, ncols: self.nrows() }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, LatticeError> {
        if self.ncols != rhs.nrows() {
            return Err(LatticeError::DimensionMismatch { expected: self.ncols, found: rhs.nrows() });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..rhs.ncols)
                    .map(|j| r.iter().zip(&rhs.rows).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b[j].clone()))
                    .collect()
            })
            .collect();
        Ok(Self { rows, ncols: rhs.ncols })
    }

    /// The image `A·v`.
    pub fn apply(&self, v: &LatticeVector<S>) -> LatticeVector<S> {
        assert_eq!(self.ncols, v.dim(), "dimension mismatch");
        LatticeVector::new(self.rows.iter().map(|r| v.dot_coords(r)).collect())
    }

    /// The pullback `l∘A` of a functional on the target.
    pub fn pull_back(&self, l: &LinearFunctional<S>) -> LinearFunctional<S> {
        assert_eq!(self.nrows(), l.dim(), "dimension mismatch");
        LinearFunctional::new(
            (0..self.ncols)
                .map(|j| self.rows.iter().zip(l.coords()).fold(S::zero(), |acc, (r, c)| acc + r[j].clone() * c.clone()))
                .collect(),
        )
    }

    pub fn stack(&self, below: &Self) -> Result<Self, LatticeError> {
        if self.ncols != below.ncols {
            return Err(LatticeError::DimensionMismatch { expected: self.ncols, found: below.ncols });
        }
        let mut rows = self.rows.clone();
        rows.extend(below.rows.iter().cloned());
        Ok(Self { rows, ncols: self.ncols })
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<S, LatticeError> {
        let n = self.nrows();
        if n != self.ncols {
            return Err(LatticeError::NotSquare { rows: n, cols: self.ncols });
        }
        if n == 0 {
            return Ok(S::one());
        }
        let mut m = self.rows.clone();
        let mut sign = S::one();
        let mut prev = S::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(p) => {
                        m.swap(k, p);
                        sign = -sign;
                    }
                    None => return Ok(S::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone();
                    m[i][j] = num / prev.clone();
                }
            }
            prev = m[k][k].clone();
        }
        Ok(sign * m[n - 1][n - 1].clone())
    }

    pub fn rank(&self) -> usize {
        match hermite_form(self) {
            Ok(hf) => hf.rank(),
            Err(_) => 0,
        }
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.rows.iter().map(|r| r.iter().map(|c| c.to_i64()).collect()).collect()
    }
}

impl<S: Scalar> fmt::Display for IntMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, c) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c}")?;
            }
        }
        write!(f, "]")
    }
}

/// Row Hermite normal form `H = U·A` with `U` unimodular.
#[derive(Clone, Debug)]
pub struct HermiteForm<S> {
    pub h: IntMatrix<S>,
    pub u: IntMatrix<S>,
    /// Pivot column of each nonzero row of `h`.
    pub pivots: Vec<usize>,
}

impl<S: Scalar> HermiteForm<S> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn row_axpy<S: Scalar>(rows: &mut [Vec<S>], target: usize, q: &S, source: usize) {
    // rows[target] -= q * rows[source]
    let (t, s) = if target < source {
        let (a, b) = rows.split_at_mut(source);
        (&mut a[target], &b[0])
    } else {
        let (a, b) = rows.split_at_mut(target);
        (&mut b[0], &a[source])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x = x.clone() - q.clone() * y.clone();
    }
}

/// Computes the row Hermite normal form of a nonzero matrix.
///
/// Pivots are positive and entries above a pivot lie in `[0, pivot)`.
pub fn hermite_form<S: Scalar>(a: &IntMatrix<S>) -> Result<HermiteForm<S>, LatticeError> {
    if a.nrows() == 0 || a.is_zero() {
        return Err(LatticeError::ZeroMatrix);
    }
    let m = a.nrows();
    let n = a.ncols();
    let mut h = a.rows.clone();
    let mut u = IntMatrix::<S>::identity(m).rows;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let best = (r..m).filter(|&i| !h[i][c].is_zero()).min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(p) = best else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut clean = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_axpy(&mut h, i, &q, r);
                row_axpy(&mut u, i, &q, r);
                if !h[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut().chain(u[r].iter_mut()) {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            if !q.is_zero() {
                row_axpy(&mut h, i, &q, r);
                row_axpy(&mut u, i, &q, r);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(HermiteForm { h: IntMatrix { rows: h, ncols: n }, u: IntMatrix { rows: u, ncols: m }, pivots })
}

/// The index of a sublattice of `Z^n`; `Infinite` when the generators do not span `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LatticeIndex<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> LatticeIndex<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            LatticeIndex::Finite(s) => Some(s),
            LatticeIndex::Infinite => None,
        }
    }
}

impl<S: Scalar> fmt::Display for LatticeIndex<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeIndex::Finite(s) => write!(f, "{s}"),
            LatticeIndex::Infinite => write!(f, "infinite"),
        }
    }
}

fn common_dim<S: Scalar>(gens: &[LatticeVector<S>]) -> Result<usize, LatticeError> {
    let n = gens.first().ok_or(LatticeError::Empty)?.dim();
    for g in gens {
        if g.dim() != n {
            return Err(LatticeError::DimensionMismatch { expected: n, found: g.dim() });
        }
    }
    Ok(n)
}

/// `[Z^n : span_Z(gens)]`, the product of the invariant factors of the generator matrix.
pub fn lattice_index<S: Scalar>(gens: &[LatticeVector<S>]) -> Result<LatticeIndex<S>, LatticeError> {
    let n = common_dim(gens)?;
    let m = IntMatrix::from_vectors(gens, n)?;
    if m.is_zero() {
        return Ok(if n == 0 { LatticeIndex::Finite(S::one()) } else { LatticeIndex::Infinite });
    }
    let hf = hermite_form(&m)?;
    if hf.rank() < n {
        return Ok(LatticeIndex::Infinite);
    }
    let idx = (0..n).fold(S::one(), |acc, i| acc * hf.h.rows[i][i].clone());
    Ok(LatticeIndex::Finite(idx.abs()))
}

/// Outcome of exact Gaussian elimination over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RationalSolution<S: Scalar> {
    Unique(Vec<Rational<S>>),
    Inconsistent,
    Underdetermined,
}

/// Solves `A x = b` over `Q` where `A` has `ncols` columns.
pub fn solve_rational<S: Scalar>(a: &[Vec<S>], b: &[S], ncols: usize) -> RationalSolution<S> {
    assert_eq!(a.len(), b.len());
    let mut m: Vec<Vec<Rational<S>>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            row.iter()
                .map(|x| Rational::from_integer(x.clone()))
                .chain(std::iter::once(Rational::from_integer(rhs.clone())))
                .collect()
        })
        .collect();
    let rows = m.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=ncols {
                    let delta = f.clone() * m[r][j].clone();
                    m[i][j] = m[i][j].clone() - delta;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[ncols].is_zero()) {
        return RationalSolution::Inconsistent;
    }
    if pivot_cols.len() < ncols {
        return RationalSolution::Underdetermined;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[i][ncols].clone();
    }
    RationalSolution::Unique(x)
}

/// Finds the integer functional `l` with `l(v) = c` for every constraint `(v, c)`.
pub fn solve_dual<S: Scalar>(constraints: &[(LatticeVector<S>, S)]) -> Result<LinearFunctional<S>, DualError> {
    let n = constraints.first().ok_or(LatticeError::Empty)?.0.dim();
    for (v, _) in constraints {
        if v.dim() != n {
            return Err(LatticeError::DimensionMismatch { expected: n, found: v.dim() }.into());
        }
    }
    let a: Vec<Vec<S>> = constraints.iter().map(|(v, _)| v.coords().to_vec()).collect();
    let b: Vec<S> = constraints.iter().map(|(_, c)| c.clone()).collect();
    match solve_rational(&a, &b, n) {
        RationalSolution::Inconsistent => Err(NoSolution::Inconsistent.into()),
        RationalSolution::Underdetermined => Err(NoSolution::Underdetermined.into()),
        RationalSolution::Unique(x) => {
            let coords: Option<Vec<S>> = x.iter().map(as_integer).collect();
            let l = LinearFunctional::new(coords.ok_or(NoSolution::NonIntegral)?);
            debug_assert!(constraints.iter().all(|(v, c)| &l.eval(v) == c));
            Ok(l)
        }
    }
}

/// Unimodular completion data for an integer matrix `A`.
#[derive(Clone, Debug)]
pub struct KernelSplit<S> {
    /// Rows mapped by `A` onto a basis of the image lattice.
    pub preimage: Vec<LatticeVector<S>>,
    /// A basis of the saturated lattice `{v : A v = 0}`, in Hermite normal form.
    pub kernel: Vec<LatticeVector<S>>,
}

/// Splits `Z^n` into a preimage part and the saturated kernel of `A`; the stacked
/// rows `preimage ++ kernel` form a unimodular matrix.
pub fn kernel_split<S: Scalar>(a: &IntMatrix<S>) -> KernelSplit<S> {
    let n = a.ncols();
    if a.nrows() == 0 || a.is_zero() {
        return KernelSplit { preimage: vec![], kernel: (0..n).map(|i| LatticeVector::unit(n, i)).collect() };
    }
    let hf = hermite_form(&a.transpose()).expect("nonzero matrix");
    let rank = hf.rank();
    let rows = hf.u.rows;
    let preimage = rows[..rank].iter().cloned().map(LatticeVector::new).collect();
    let kernel_rows: Vec<Vec<S>> = rows[rank..].to_vec();
    let kernel = if kernel_rows.is_empty() {
        vec![]
    } else {
        let km = IntMatrix { rows: kernel_rows, ncols: n };
        let khf = hermite_form(&km).expect("rows of a unimodular matrix are nonzero");
        khf.h.rows.into_iter().map(LatticeVector::new).collect()
    };
    KernelSplit { preimage, kernel }
}

/// A basis of the saturated integer kernel `{v ∈ Z^n : A v = 0}`.
pub fn kernel_basis<S: Scalar>(a: &IntMatrix<S>) -> Vec<LatticeVector<S>> {
    kernel_split(a).kernel
}

/// A basis (in Hermite normal form) of `Z^n ∩ span_Q(gens)`.
pub fn saturate<S: Scalar>(gens: &[LatticeVector<S>]) -> Result<Vec<LatticeVector<S>>, LatticeError> {
    let n = common_dim(gens)?;
    let m = IntMatrix::from_vectors(gens, n)?;
    if m.is_zero() {
        return Ok(vec![]);
    }
    let annihilator = kernel_basis(&m);
    if annihilator.is_empty() {
        return Ok((0..n).map(|i| LatticeVector::unit(n, i)).collect());
    }
    let ann = IntMatrix::from_vectors(&annihilator, n)?;
    Ok(kernel_basis(&ann))
}

/// Dimension of the rational span.
pub fn rank_of<S: Scalar>(vectors: &[LatticeVector<S>]) -> usize {
    match vectors.first() {
        None => 0,
        Some(v) => IntMatrix::from_vectors(vectors, v.dim()).map(|m| m.rank()).unwrap_or(0),
    }
}

/// A functional `f` with `f(v) = 1`; exists exactly when `v` is primitive.
pub fn dual_unit<S: Scalar>(v: &LatticeVector<S>) -> Result<LinearFunctional<S>, LatticeError> {
    if v.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    let col = IntMatrix::from_vectors(std::slice::from_ref(v), v.dim())?.transpose();
    let hf = hermite_form(&col)?;
    if !hf.h.rows[0][0].is_one() {
        return Err(LatticeError::NotPrimitive(v.to_string()));
    }
    Ok(hf.u.row(0))
}

/// Inverse of a unimodular matrix, `None` if `|det| != 1`.
pub fn unimodular_inverse<S: Scalar>(u: &IntMatrix<S>) -> Option<IntMatrix<S>> {
    let n = u.nrows();
    if n != u.ncols() || n == 0 {
        return None;
    }
    let hf = hermite_form(u).ok()?;
    if hf.h != IntMatrix::identity(n) {
        return None;
    }
    Some(hf.u)
}

/// Greatest common divisor of the `2x2` minors of the `2 x n` matrix `[a; b]`.
pub fn wedge_content<S: Scalar>(a: &LatticeVector<S>, b: &LatticeVector<S>) -> S {
    let n = a.dim();
    let mut g = S::zero();
    for i in 0..n {
        for j in i + 1..n {
            let minor = a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
            g = g.gcd(&minor);
        }
    }
    g
}

pub fn are_parallel<S: Scalar>(a: &LatticeVector<S>, b: &LatticeVector<S>) -> bool {
    wedge_content(a, b).is_zero()
}
