use std::fmt;
use std::ops::{Add, Index};

/// An element of `N^k`.
///
/// The derived `Ord` is lexicographic and is only used for canonical
/// ordering. The product order (`m <= n` in every coordinate) is
/// [`Degree::le`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree(Vec<u32>);

impl Degree {
    pub fn zero(rank: usize) -> Self {
        Degree(vec![0; rank])
    }

    pub fn new(coords: Vec<u32>) -> Self {
        Degree(coords)
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut d = Degree::zero(rank);
        d.0[i] = 1;
        d
    }

    pub fn splat(rank: usize, value: u32) -> Self {
        Degree(vec![value; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Coordinatewise `<=`.
    pub fn le(&self, other: &Degree) -> bool {
        debug_assert_eq!(self.rank(), other.rank());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Coordinatewise maximum.
    pub fn join(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Coordinatewise minimum.
    pub fn meet(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// `self - other`, or `None` unless `other <= self`.
    pub fn checked_sub(&self, other: &Degree) -> Option<Degree> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Degree)
    }

    /// All `n` with `0 <= n <= self`, in graded-lexicographic order
    /// (by total, then lexicographically).
    pub fn box_below(&self) -> Vec<Degree> {
        let mut out = vec![Vec::with_capacity(self.rank())];
        for &bound in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=bound).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        let mut out: Vec<Degree> = out.into_iter().map(Degree).collect();
        out.sort_by(|a, b| a.total().cmp(&b.total()).then_with(|| a.cmp(b)));
        out
    }
}

impl Add for &Degree {
    type Output = Degree;

    fn add(self, rhs: &Degree) -> Degree {
        Degree(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Index<usize> for Degree {
    type Output = u32;

    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Degree {
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

impl From<Vec<u32>> for Degree {
    fn from(v: Vec<u32>) -> Self {
        Degree(v)
    }
}

impl<const K: usize> From<[u32; K]> for Degree {
    fn from(v: [u32; K]) -> Self {
        Degree(v.to_vec())
    }
}
