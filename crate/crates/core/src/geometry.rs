//! Quadrant geometry of the rectangular coaxial capacitor and per-node
//! boundary classification.
//!
//! The origin sits at the centre of the inner plate, so only the first
//! quadrant `x ∈ [0, a/2]`, `y ∈ [0, b/2]` is discretised. Nodes are
//! flattened row-major: `index = j * nx + i` with `j` the y index.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Geometry and boundary parameters of the capacitor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitorSpec<T> {
    /// Outer conductor width.
    pub a: T,
    /// Outer conductor height.
    pub b: T,
    /// Inner plate length; the plate spans `|x| <= d/2` on `y = 0`.
    pub d: T,
    /// Inner plate potential.
    pub v0: T,
}

impl<T: Scalar> Default for CapacitorSpec<T> {
    fn default() -> Self {
        Self {
            a: T::lit(2.0),
            b: T::lit(2.0),
            d: T::lit(0.5),
            v0: T::one(),
        }
    }
}

impl<T: Scalar> CapacitorSpec<T> {
    /// Default geometry (a = b = 2, v0 = 1) with the given plate length.
    pub fn with_d(d: T) -> Self {
        Self {
            d,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > T::zero() && self.a.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "a must be positive, got {}",
                self.a
            )));
        }
        if !(self.b > T::zero() && self.b.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "b must be positive, got {}",
                self.b
            )));
        }
        if !self.v0.is_finite() {
            return Err(Error::InvalidSpec("v0 must be finite".into()));
        }
        if !(self.d > T::zero()) {
            return Err(Error::InvalidSpec(format!(
                "d must be positive, got {}",
                self.d
            )));
        }
        if !(self.d < self.a) {
            return Err(Error::InvalidSpec(format!(
                "plate touches the outer wall: d = {} >= a = {}",
                self.d, self.a
            )));
        }
        Ok(())
    }
}

/// Uniform node lattice over the quadrant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub nx: usize,
    pub ny: usize,
    pub hx: T,
    pub hy: T,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(nx: usize, ny: usize, spec: &CapacitorSpec<T>) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3x3 nodes, got {nx}x{ny}"
            )));
        }
        let half = T::lit(0.5);
        Ok(Self {
            nx,
            ny,
            hx: spec.a * half / T::from_usize_exact(nx - 1),
            hy: spec.b * half / T::from_usize_exact(ny - 1),
        })
    }

    /// Total node count N.
    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords_of(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        T::from_usize_exact(i) * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> T {
        T::from_usize_exact(j) * self.hy
    }

    /// Quadrant area `(a/2)(b/2)`.
    pub fn quadrant_area(&self) -> T {
        self.hx * T::from_usize_exact(self.nx - 1) * self.hy * T::from_usize_exact(self.ny - 1)
    }

    /// `(x, y)` coordinates of every node in flattening order.
    pub fn coordinates(&self) -> Vec<[T; 2]> {
        (0..self.ny)
            .flat_map(|j| (0..self.nx).map(move |i| [self.x(i), self.y(j)]))
            .collect()
    }
}

/// Boundary role of a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeClass {
    /// Dirichlet `V = v0` on `y = 0`, `x <= d/2`.
    InnerPlate,
    /// Dirichlet `V = 0` on `x = a/2` and `y = b/2`.
    OuterWall,
    /// Mirror plane `x = 0`: `dV/dx = 0`.
    SymmetryX,
    /// Mirror plane `y = 0` beyond the plate: `dV/dy = 0`.
    SymmetryY,
    Interior,
}

impl NodeClass {
    #[inline]
    pub fn is_dirichlet(self) -> bool {
        matches!(self, NodeClass::InnerPlate | NodeClass::OuterWall)
    }

    #[inline]
    pub fn is_neumann(self) -> bool {
        matches!(self, NodeClass::SymmetryX | NodeClass::SymmetryY)
    }
}

/// Number of plate nodes on the `y = 0` row: all `i` with `i*hx <= d/2`.
///
/// The comparison carries a relative slack of `sqrt(eps)` grid spacings so
/// that plate ends landing exactly on a node include that node.
pub fn plate_node_count<T: Scalar>(spec: &CapacitorSpec<T>, grid: &GridSpec<T>) -> usize {
    let half_d = spec.d * T::lit(0.5);
    let slack = grid.hx * T::epsilon().sqrt();
    (0..grid.nx - 1)
        .take_while(|&i| grid.x(i) <= half_d + slack)
        .count()
        .max(1)
}

/// Classifies every node of the quadrant, in flattening order.
///
/// Precedence at corners is Dirichlet, then Neumann, then interior.
pub fn classify_nodes<T: Scalar>(
    spec: &CapacitorSpec<T>,
    grid: &GridSpec<T>,
) -> Result<Vec<NodeClass>> {
    spec.validate()?;
    let plate = plate_node_count(spec, grid);
    let mut classes = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let class = if j == 0 && i < plate {
                NodeClass::InnerPlate
            } else if i == grid.nx - 1 || j == grid.ny - 1 {
                NodeClass::OuterWall
            } else if i == 0 {
                NodeClass::SymmetryX
            } else if j == 0 {
                NodeClass::SymmetryY
            } else {
                NodeClass::Interior
            };
            classes.push(class);
        }
    }
    Ok(classes)
}

/// Prescribed value of a Dirichlet node, `None` otherwise.
#[inline]
pub fn dirichlet_value<T: Scalar>(class: NodeClass, spec: &CapacitorSpec<T>) -> Option<T> {
    match class {
        NodeClass::InnerPlate => Some(spec.v0),
        NodeClass::OuterWall => Some(T::zero()),
        _ => None,
    }
}
