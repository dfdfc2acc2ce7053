//! Uniform structured grids on boxes, nodal scalar fields, and the discrete
//! differential operators the solvers are built from.
//!
//! Node storage is row-major with the last axis fastest. Boundary nodes are
//! the nodes whose index along some axis is 0 or the last; on a box grid
//! these are exactly the geometric boundary nodes.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dims: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
    boundary: Vec<bool>,
}

impl Grid {
    /// At least 3 nodes per axis so one interior node exists; spacing > 0.
    pub fn new(dims: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Arc<Grid>> {
        if dims.is_empty() || dims.len() != spacing.len() || dims.len() != origin.len() {
            return Err(Error::Config(
                "grid needs matching non-empty dims/spacing/origin".into(),
            ));
        }
        if dims.iter().any(|&d| d < 3) {
            return Err(Error::Config(format!(
                "grid needs at least 3 nodes per axis, got {dims:?}"
            )));
        }
        if spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::Config(format!(
                "grid spacing must be positive and finite, got {spacing:?}"
            )));
        }
        let len: usize = dims.iter().product();
        let mut boundary = vec![false; len];
        let mut idx = vec![0usize; dims.len()];
        for b in boundary.iter_mut() {
            *b = idx
                .iter()
                .zip(&dims)
                .any(|(&i, &d)| i == 0 || i + 1 == d);
            // advance multi-index, last axis fastest
            for a in (0..dims.len()).rev() {
                idx[a] += 1;
                if idx[a] < dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(Arc::new(Grid {
            dims,
            spacing,
            origin,
            boundary,
        }))
    }

    /// 1-d grid with `n` nodes spanning [a, b].
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Arc<Grid>> {
        if !(a < b) {
            return Err(Error::Config(format!("interval needs a < b, got [{a}, {b}]")));
        }
        Grid::new(vec![n], vec![(b - a) / (n as f64 - 1.0)], vec![a])
    }

    /// Box grid spanning [lo, hi] with `nodes[a]` nodes along axis a.
    pub fn rectangle(lo: &[f64], hi: &[f64], nodes: &[usize]) -> Result<Arc<Grid>> {
        if lo.len() != hi.len() || lo.len() != nodes.len() {
            return Err(Error::Config("rectangle lo/hi/nodes lengths differ".into()));
        }
        if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
            return Err(Error::Config(format!(
                "rectangle needs lo < hi componentwise, got {lo:?} .. {hi:?}"
            )));
        }
        let spacing = lo
            .iter()
            .zip(hi)
            .zip(nodes)
            .map(|((l, h), &n)| (h - l) / (n as f64 - 1.0))
            .collect();
        Grid::new(nodes.to_vec(), spacing, lo.to_vec())
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Total node count.
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        self.boundary[flat]
    }

    /// Flat index of a multi-index (row-major, last axis fastest).
    pub fn flat(&self, multi: &[usize]) -> usize {
        let mut f = 0;
        for (a, &i) in multi.iter().enumerate() {
            f = f * self.dims[a] + i;
        }
        f
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let mut m = vec![0; self.dims.len()];
        for a in (0..self.dims.len()).rev() {
            m[a] = flat % self.dims[a];
            flat /= self.dims[a];
        }
        m
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.multi(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a])
            .collect()
    }

    /// Stride in flat index per unit step along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.dims[axis + 1..].iter().product()
    }

    pub fn center(&self) -> Vec<f64> {
        (0..self.ndim())
            .map(|a| self.origin[a] + (self.dims[a] - 1) as f64 * self.spacing[a] / 2.0)
            .collect()
    }
}

/// Grid-aligned scalar function, one value per node.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn constant(grid: &Arc<Grid>, c: f64) -> Field {
        Field {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Field {
        let values = (0..grid.len()).map(|i| f(&grid.coords(i))).collect();
        Field {
            grid: grid.clone(),
            values,
        }
    }

    /// Fallible variant of [`Field::from_fn`], for expression-backed sources.
    pub fn try_from_fn(
        grid: &Arc<Grid>,
        f: impl Fn(&[f64]) -> Result<f64>,
    ) -> Result<Field> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            values.push(f(&grid.coords(i))?);
        }
        Ok(Field {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "field has {} values for a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn assert_finite(&self, what: &str) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Structural(format!(
                "{what} contains non-finite values"
            )))
        }
    }

    /// CSV export: a `# grid:` header line, then one row per node in
    /// row-major order (last axis fastest), coordinates then value,
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let g = &self.grid;
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let dims = g
            .dims()
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x");
        writeln!(
            w,
            "# grid: dims={dims}, spacing={}, origin={}",
            join(g.spacing()),
            join(g.origin())
        )?;
        for i in 0..g.len() {
            for c in g.coords(i) {
                write!(w, "{c:.16e},")?;
            }
            writeln!(w, "{:.16e}", self.values[i])?;
        }
        Ok(())
    }
}

fn same_grid(a: &Field, b: &Field) -> Result<()> {
    if Arc::ptr_eq(a.grid(), b.grid()) || a.grid() == b.grid() {
        Ok(())
    } else {
        Err(Error::Shape("fields live on different grids".into()))
    }
}

/// Second-order central Laplacian at interior nodes; boundary nodes are 0
/// by convention (the Poisson solver pins Dirichlet rows and never reads
/// the boundary Laplacian).
pub fn laplacian(f: &Field) -> Field {
    let g = f.grid();
    let mut out = vec![0.0; g.len()];
    let v = f.values();
    for i in 0..g.len() {
        if g.is_boundary(i) {
            continue;
        }
        let mut acc = 0.0;
        for a in 0..g.ndim() {
            let s = g.stride(a);
            let h2 = g.spacing()[a] * g.spacing()[a];
            acc += (v[i - s] - 2.0 * v[i] + v[i + s]) / h2;
        }
        out[i] = acc;
    }
    Field {
        grid: g.clone(),
        values: out,
    }
}

/// Nodal gradient, one component field per axis. Central differences at
/// nodes interior to an axis; second-order one-sided differences
/// -/+ (3f(i) - 4f(i∓1) + f(i∓2)) / (2Δx) at the axis ends.
pub fn gradient(f: &Field) -> Vec<Field> {
    let g = f.grid();
    let v = f.values();
    let mut out = Vec::with_capacity(g.ndim());
    for a in 0..g.ndim() {
        let s = g.stride(a);
        let d = g.dims()[a];
        let two_h = 2.0 * g.spacing()[a];
        let mut comp = vec![0.0; g.len()];
        for (i, c) in comp.iter_mut().enumerate() {
            let ia = (i / s) % d;
            *c = if ia == 0 {
                -(3.0 * v[i] - 4.0 * v[i + s] + v[i + 2 * s]) / two_h
            } else if ia + 1 == d {
                (3.0 * v[i] - 4.0 * v[i - s] + v[i - 2 * s]) / two_h
            } else {
                (v[i + s] - v[i - s]) / two_h
            };
        }
        out.push(Field {
            grid: g.clone(),
            values: comp,
        });
    }
    out
}

/// Pointwise |∇f|^p computed from [`gradient`].
pub fn grad_p_norm(f: &Field, p: f64) -> Field {
    let comps = gradient(f);
    let g = f.grid();
    let mut out = vec![0.0; g.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let sq: f64 = comps.iter().map(|c| c.values()[i] * c.values()[i]).sum();
        *o = sq.powf(p / 2.0);
    }
    Field {
        grid: g.clone(),
        values: out,
    }
}

/// Max over all nodes of |a - b|.
pub fn sup_diff(a: &Field, b: &Field) -> Result<f64> {
    same_grid(a, b)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
}
