use crate::error::{GeoError, Result};
use nalgebra::SVector;

pub type Point<const D: usize> = SVector<f64, D>;

const NODE_SNAP: f64 = 1e-9;

/// Coordinate box with a uniform node grid. Periodic axes hold `n` nodes on
/// `[lower, upper)`, closed axes hold `n` nodes on `[lower, upper]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartDomain<const D: usize> {
    lower: [f64; D],
    upper: [f64; D],
    nodes: [usize; D],
    periodic: [bool; D],
}

impl<const D: usize> ChartDomain<D> {
    pub fn new(lower: [f64; D], upper: [f64; D], nodes: [usize; D], periodic: [bool; D]) -> Result<Self> {
        for a in 0..D {
            if !(lower[a].is_finite() && upper[a].is_finite()) || upper[a] <= lower[a] {
                return Err(GeoError::InvalidChart(format!(
                    "axis {a}: bounds [{}, {}] are not an increasing finite interval",
                    lower[a], upper[a]
                )));
            }
            if nodes[a] < 3 {
                return Err(GeoError::ResolutionTooCoarse(format!(
                    "axis {a} has {} nodes, at least 3 are required",
                    nodes[a]
                )));
            }
        }
        Ok(Self { lower, upper, nodes, periodic })
    }

    /// Box with all axes closed.
    pub fn closed(lower: [f64; D], upper: [f64; D], nodes: [usize; D]) -> Result<Self> {
        Self::new(lower, upper, nodes, [false; D])
    }

    pub fn lower(&self) -> [f64; D] {
        self.lower
    }

    pub fn upper(&self) -> [f64; D] {
        self.upper
    }

    pub fn nodes(&self) -> [usize; D] {
        self.nodes
    }

    pub fn periodic(&self) -> [bool; D] {
        self.periodic
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let n = self.nodes[axis];
        if self.periodic[axis] {
            self.width(axis) / n as f64
        } else {
            self.width(axis) / (n - 1) as f64
        }
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lower[axis] + i as f64 * self.spacing(axis)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.iter().product()
    }

    /// Row-major linear index, last axis fastest.
    pub fn linear_index(&self, idx: &[usize; D]) -> usize {
        let mut k = 0;
        for a in 0..D {
            k = k * self.nodes[a] + idx[a];
        }
        k
    }

    pub fn multi_index(&self, mut k: usize) -> [usize; D] {
        let mut idx = [0; D];
        for a in (0..D).rev() {
            idx[a] = k % self.nodes[a];
            k /= self.nodes[a];
        }
        idx
    }

    pub fn node_point(&self, idx: &[usize; D]) -> Point<D> {
        Point::<D>::from_fn(|a, _| self.coord(a, idx[a]))
    }

    pub fn point(&self, k: usize) -> Point<D> {
        self.node_point(&self.multi_index(k))
    }

    pub fn contains(&self, x: &Point<D>) -> bool {
        (0..D).all(|a| {
            if self.periodic[a] {
                x[a].is_finite()
            } else {
                let tol = NODE_SNAP * self.width(a);
                x[a] >= self.lower[a] - tol && x[a] <= self.upper[a] + tol
            }
        })
    }

    pub fn check_contains(&self, x: &Point<D>) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GeoError::PointOutsideChart { point: x.iter().copied().collect() })
        }
    }

    /// Grid node coinciding with `x`, if any.
    pub fn locate_node(&self, x: &Point<D>) -> Option<[usize; D]> {
        let mut idx = [0; D];
        for a in 0..D {
            let t = (x[a] - self.lower[a]) / self.spacing(a);
            let r = t.round();
            if (t - r).abs() > NODE_SNAP * (1.0 + t.abs()) {
                return None;
            }
            let n = self.nodes[a] as i64;
            let mut i = r as i64;
            if self.periodic[a] {
                i = i.rem_euclid(n);
            } else if i < 0 || i >= n {
                return None;
            }
            idx[a] = i as usize;
        }
        Some(idx)
    }

    /// Interior in the sense of being at least `margin` nodes away from every
    /// closed edge.
    pub fn is_interior(&self, idx: &[usize; D], margin: usize) -> bool {
        (0..D).all(|a| self.periodic[a] || (idx[a] >= margin && idx[a] + margin < self.nodes[a]))
    }
}


impl<const D: usize> serde::Serialize for ChartDomain<D> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ChartDomain", 4)?;
        st.serialize_field("lower", &self.lower[..])?;
        st.serialize_field("upper", &self.upper[..])?;
        st.serialize_field("nodes", &self.nodes[..])?;
        st.serialize_field("periodic", &self.periodic[..])?;
        st.end()
    }
}
