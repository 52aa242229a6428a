//! Cartesian patches and finite-difference stencils.

use std::ops::{Add, Mul, Sub};

use crate::{Error, Result};

/// Values that finite-difference stencils can combine.
pub trait Lin: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Lin for T where T: Clone + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// A box `[lo, hi]` in four coordinates sampled by `n[a]` equally spaced
/// points along axis `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPatch {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
    pub n: [usize; 4],
}

impl GridPatch {
    pub fn new(lo: [f64; 4], hi: [f64; 4], n: [usize; 4]) -> Result<Self> {
        for a in 0..4 {
            if n[a] < 3 {
                return Err(Error::Invalid(format!("axis {a} needs at least 3 points")));
            }
            if !(hi[a] > lo[a]) {
                return Err(Error::Invalid(format!("axis {a} has an empty extent")));
            }
        }
        Ok(GridPatch { lo, hi, n })
    }

    /// Patch with `n` points per axis and spacing `h` centered at `c`.
    pub fn centered(c: [f64; 4], h: f64, n: usize) -> Result<Self> {
        let half = h * (n - 1) as f64 / 2.0;
        Self::new(c.map(|x| x - half), c.map(|x| x + half), [n; 4])
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.n[axis] - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, m: [usize; 4]) -> usize {
        ((m[0] * self.n[1] + m[1]) * self.n[2] + m[2]) * self.n[3] + m[3]
    }

    pub fn multi(&self, mut idx: usize) -> [usize; 4] {
        let mut m = [0; 4];
        for a in (0..4).rev() {
            m[a] = idx % self.n[a];
            idx /= self.n[a];
        }
        m
    }

    pub fn coords(&self, idx: usize) -> [f64; 4] {
        let m = self.multi(idx);
        std::array::from_fn(|a| self.lo[a] + self.spacing(a) * m[a] as f64)
    }

    /// Index of the neighbour `delta` steps along `axis`.
    pub fn step(&self, idx: usize, axis: usize, delta: isize) -> usize {
        let mut m = self.multi(idx);
        m[axis] = (m[axis] as isize + delta) as usize;
        self.index(m)
    }

    /// Nodes at least `margin` steps away from every face.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let m = self.multi(i);
                (0..4).all(|a| m[a] >= margin && m[a] + margin < self.n[a])
            })
            .collect()
    }

    /// Samples `f` at every node.
    pub fn sample<T>(&self, mut f: impl FnMut([f64; 4]) -> Result<T>) -> Result<Vec<T>> {
        (0..self.len()).map(|i| f(self.coords(i))).collect()
    }
}

/// Central first derivative along `axis`.
pub fn d1<T: Lin>(p: &GridPatch, data: &[T], idx: usize, axis: usize) -> T {
    let h = p.spacing(axis);
    (data[p.step(idx, axis, 1)].clone() - data[p.step(idx, axis, -1)].clone()) * (0.5 / h)
}

/// First derivative along `axis`, central in the interior and second-order
/// one-sided on the faces.
pub fn d1_any<T: Lin>(p: &GridPatch, data: &[T], idx: usize, axis: usize) -> T {
    let h = p.spacing(axis);
    let k = p.multi(idx)[axis];
    let at = |d: isize| data[p.step(idx, axis, d)].clone();
    if k == 0 {
        (at(1) * 4.0 - at(0) * 3.0 - at(2)) * (0.5 / h)
    } else if k + 1 == p.n[axis] {
        (at(0) * 3.0 - at(-1) * 4.0 + at(-2)) * (0.5 / h)
    } else {
        d1(p, data, idx, axis)
    }
}

/// Fourth-order first derivative along `axis`: the five-point central
/// stencil in the interior and five-point one-sided stencils within two
/// nodes of a face.  Needs at least five points on the axis.
pub fn d1_fourth<T: Lin>(p: &GridPatch, data: &[T], idx: usize, axis: usize) -> T {
    const W: [[f64; 5]; 3] = [
        [-25.0, 48.0, -36.0, 16.0, -3.0],
        [-3.0, -10.0, 18.0, -6.0, 1.0],
        [1.0, -8.0, 0.0, 8.0, -1.0],
    ];
    let h = p.spacing(axis);
    let k = p.multi(idx)[axis];
    let n = p.n[axis];
    let combine = |first: isize, w: &[f64; 5], sign: f64| {
        let mut acc = data[p.step(idx, axis, first)].clone() * w[0];
        for (j, wj) in w.iter().enumerate().skip(1) {
            let off = if sign > 0.0 { first + j as isize } else { first - j as isize };
            acc = acc + data[p.step(idx, axis, off)].clone() * *wj;
        }
        acc * (sign / (12.0 * h))
    };
    if k >= 2 && k + 2 < n {
        combine(-2, &W[2], 1.0)
    } else if k < 2 {
        combine(-(k as isize), &W[k], 1.0)
    } else {
        let from_end = n - 1 - k;
        combine(from_end as isize, &W[from_end], -1.0)
    }
}

/// Central second derivative `∂_a ∂_b`; the mixed stencil uses the four
/// diagonal neighbours.
pub fn d2<T: Lin>(p: &GridPatch, data: &[T], idx: usize, a: usize, b: usize) -> T {
    if a == b {
        let h = p.spacing(a);
        let c = data[idx].clone();
        (data[p.step(idx, a, 1)].clone() + data[p.step(idx, a, -1)].clone() - c * 2.0) * (1.0 / (h * h))
    } else {
        let at = |da: isize, db: isize| data[p.step(p.step(idx, a, da), b, db)].clone();
        (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) * (0.25 / (p.spacing(a) * p.spacing(b)))
    }
}
