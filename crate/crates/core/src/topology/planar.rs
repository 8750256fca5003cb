use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::contour::ContourGraph;
use super::surface::{march, mesh_components};
use super::{Component, ComponentReport, QuotientMode, Signature};
use crate::error::{invalid, Error, Result};
use crate::field::GridSpec;
use crate::func::ScalarField;

/// Vertex values below this magnitude count as zeros on the grid.
pub const GRID_ZERO_TOLERANCE: f64 = 1e-9;

/// Fraction of the spacing by which a degenerate grid is moved (`2 - φ`).
pub const OFFSET_FRACTION: f64 = 0.381_966_011_250_105;

/// Number of offset grids tried after the original one.
pub const MAX_OFFSET_ATTEMPTS: usize = 3;

fn offset(grid: &GridSpec, attempt: usize) -> Vec<f64> {
    let h = grid.spacing();
    (0..grid.dim())
        .map(|k| {
            let f = OFFSET_FRACTION * (attempt * (k + 1)) as f64;
            h * (f - f.floor())
        })
        .collect()
}

/// Zero set of `f` on `grid` (`n ∈ {1, 2, 3}`).
///
/// When a vertex value is within [`GRID_ZERO_TOLERANCE`] of zero, or a saddle
/// cannot be decided, the grid is moved by a fixed sub-cell offset and the
/// extraction repeated.
pub fn extract_components_hypersurface(f: &impl ScalarField, grid: &GridSpec) -> Result<ComponentReport> {
    if f.dim() != grid.dim() {
        return Err(invalid("field and grid dimensions differ"));
    }
    let mut last = Error::Degenerate(alloc::string::String::new());
    for attempt in 0..=MAX_OFFSET_ATTEMPTS {
        let g = if attempt == 0 { grid.clone() } else { grid.shifted(&offset(grid, attempt)) };
        let values = f.eval_grid(&g);
        match extract_from_values(&g, &values) {
            Ok(r) => return Ok(r),
            Err(e @ Error::Degenerate(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(match last {
        Error::Degenerate(msg) => Error::Degenerate(format!("{msg} after {MAX_OFFSET_ATTEMPTS} grid offsets")),
        e => e,
    })
}

/// Zero set of sampled values, with no offset retries.
pub fn extract_from_values(grid: &GridSpec, values: &[f64]) -> Result<ComponentReport> {
    if values.len() != grid.len() {
        return Err(invalid("value count does not match the grid"));
    }
    if let Some(i) = values.iter().position(|v| v.abs() < GRID_ZERO_TOLERANCE) {
        return Err(Error::Degenerate(format!("value {:e} at grid vertex {i}", values[i])));
    }
    let components = match grid.dim() {
        1 => crossings_1d(grid, values),
        2 => contours_2d(grid, values)?,
        3 => mesh_components(&march(grid, values)),
        _ => return Err(invalid("hypersurface extraction supports n = 1, 2, 3")),
    };
    Ok(ComponentReport {
        components,
        domain_dim: grid.dim(),
        point_dim: grid.dim(),
        grid: Some(grid.clone()),
        sphere_resolution: None,
        quotient: QuotientMode::None,
        unresolved_cells: 0,
    })
}

fn crossings_1d(grid: &GridSpec, values: &[f64]) -> Vec<Component> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] > 0.0) != (w[1] > 0.0))
        .map(|(i, w)| {
            let t = w[0] / (w[0] - w[1]);
            let x = grid.axis_coordinate(0, i) + t * grid.spacing();
            Component { signature: Signature::point(), closed: true, cells: vec![i], points: vec![x], antipodal_invariant: None }
        })
        .collect()
}

fn contours_2d(grid: &GridSpec, values: &[f64]) -> Result<Vec<Component>> {
    let r = grid.resolution;
    let mut graph = ContourGraph::new(2);
    let mut position = |i: usize, out: &mut [f64]| grid.point(i, out);
    for j in 0..r - 1 {
        for i in 0..r - 1 {
            let a = i + r * j;
            graph.add_cell(i + (r - 1) * j, [a, a + 1, a + 1 + r, a + r], values, &mut position, false)?;
        }
    }
    Ok(graph.components())
}

/// The triangle mesh of the zero surface of grid values, for export.
pub fn zero_surface(grid: &GridSpec, values: &[f64]) -> Result<super::TriangleMesh> {
    if grid.dim() != 3 || values.len() != grid.len() {
        return Err(invalid("surface export needs values on a three-dimensional grid"));
    }
    Ok(march(grid, values))
}
