//! Evaluation traits shared by polynomial draws, limit-field samples and test
//! fixtures.

use alloc::vec::Vec;

use crate::field::GridSpec;

/// A function on the unit sphere `S^{d-1} ⊂ R^d`, `d = ambient_dim()`.
pub trait SphereFunction {
    fn ambient_dim(&self) -> usize;

    /// Value at a unit vector.
    fn eval_unit(&self, x: &[f64]) -> f64;

    /// `Some(m)` when the function is the restriction of a homogeneous
    /// polynomial of degree `m`, whose values off the sphere are then exact.
    fn homogeneous_degree(&self) -> Option<usize> {
        None
    }
}

impl<T: SphereFunction + ?Sized> SphereFunction for &T {
    fn ambient_dim(&self) -> usize {
        (**self).ambient_dim()
    }

    fn eval_unit(&self, x: &[f64]) -> f64 {
        (**self).eval_unit(x)
    }

    fn homogeneous_degree(&self) -> Option<usize> {
        (**self).homogeneous_degree()
    }
}

/// Restriction of a function on `S^N` to the equatorial `S^n` spanned by the
/// first `n + 1` coordinates.
#[derive(Debug, Clone)]
pub struct Equatorial<F> {
    inner: F,
    dim: usize,
}

impl<F: SphereFunction> Equatorial<F> {
    /// `dim` is the number of retained coordinates `n + 1`.
    pub fn new(inner: F, dim: usize) -> Self {
        assert!(dim >= 2 && dim <= inner.ambient_dim());
        Self { inner, dim }
    }
}

impl<F: SphereFunction> SphereFunction for Equatorial<F> {
    fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn eval_unit(&self, x: &[f64]) -> f64 {
        let mut full = alloc::vec![0.0; self.inner.ambient_dim()];
        full[..self.dim].copy_from_slice(x);
        self.inner.eval_unit(&full)
    }

    fn homogeneous_degree(&self) -> Option<usize> {
        self.inner.homogeneous_degree()
    }
}

/// A function on (a box of) `R^n`.
pub trait ScalarField {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// Values at every vertex of `grid`, in [`GridSpec::point`] order.
    fn eval_grid(&self, grid: &GridSpec) -> Vec<f64> {
        let mut p = alloc::vec![0.0; grid.dim()];
        (0..grid.len())
            .map(|i| {
                grid.point(i, &mut p);
                self.eval(&p)
            })
            .collect()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }

    fn eval_grid(&self, grid: &GridSpec) -> Vec<f64> {
        (**self).eval_grid(grid)
    }
}

/// Wraps a closure as a [`ScalarField`].
#[derive(Clone)]
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64> ScalarField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Wraps a closure as a [`SphereFunction`].
#[derive(Clone)]
pub struct FnSphere<F> {
    dim: usize,
    degree: Option<usize>,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnSphere<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, degree: None, f }
    }

    /// Declares `f` homogeneous of degree `m` on all of `R^dim`.
    pub fn homogeneous(dim: usize, degree: usize, f: F) -> Self {
        Self { dim, degree: Some(degree), f }
    }
}

impl<F: Fn(&[f64]) -> f64> SphereFunction for FnSphere<F> {
    fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn eval_unit(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn homogeneous_degree(&self) -> Option<usize> {
        self.degree
    }
}
