//! Nearest-center partitions of a metric observation space.
//!
//! A partition is an ordered list of centers; an observation belongs to the
//! cell of its nearest center, lowest index on ties. Centers are stored
//! bit-exact and never moved, so a center doubles as the history token of
//! its cell.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{powf, sqrt};

/// Number of probe points used by grid covering-radius estimates.
pub const GRID_POINTS: usize = 10_000;

pub trait Metric: Clone + PartialEq {
    fn distance(&self, other: &Self) -> f64;
}

impl Metric for f64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl<const N: usize> Metric for [f64; N] {
    fn distance(&self, other: &Self) -> f64 {
        sqrt(self.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddOutcome {
    pub index: usize,
    /// The point was already a center; nothing was added.
    pub duplicate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiPartition<O> {
    centers: Vec<O>,
}

impl<O> Default for VoronoiPartition<O> {
    fn default() -> Self {
        Self { centers: Vec::new() }
    }
}

impl<O: Metric> VoronoiPartition<O> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_centers(centers: Vec<O>) -> Self {
        let mut p = Self::new();
        for c in centers {
            p.add_center(c);
        }
        p
    }

    /// Cell count `m`.
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[O] {
        &self.centers
    }

    pub fn center(&self, index: usize) -> &O {
        &self.centers[index]
    }

    /// Index of the nearest center, lowest index on ties.
    pub fn assign(&self, z: &O) -> Result<usize> {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.centers.iter().enumerate() {
            let d = z.distance(c);
            if best.is_none() || d < best_d {
                best = Some(i);
                best_d = d;
            }
        }
        best.ok_or(Error::NoCells)
    }

    /// Appends `z` as a new center. Existing cells keep their indices.
    pub fn add_center(&mut self, z: O) -> AddOutcome {
        if let Some(index) = self.centers.iter().position(|c| *c == z) {
            return AddOutcome { index, duplicate: true };
        }
        self.centers.push(z);
        AddOutcome { index: self.centers.len() - 1, duplicate: false }
    }
}

/// Progressive-widening test `m <= k_z N(ha)^alpha_z`.
pub fn pw_allows(m: usize, n_ha: u64, k_z: f64, alpha_z: f64) -> bool {
    m as f64 <= k_z * powf(n_ha as f64, alpha_z)
}

/// Covering radius `sup_z min_j D(z, c_j)` of a set of centers.
pub trait ObservationSpace<O> {
    fn covering_radius(&self, centers: &[O]) -> Result<f64>;
}

/// Closed interval observation space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Max-min distance over `points` evenly spaced probes including both ends.
    pub fn grid_covering_radius(&self, centers: &[f64], points: usize) -> Result<f64> {
        if centers.is_empty() {
            return Err(Error::NoCells);
        }
        let step = (self.hi - self.lo) / (points.max(2) - 1) as f64;
        let mut worst = 0.0f64;
        for i in 0..points.max(2) {
            let z = self.lo + i as f64 * step;
            let near = centers.iter().map(|c| (z - c).abs()).fold(f64::INFINITY, f64::min);
            worst = worst.max(near);
        }
        Ok(worst)
    }

    pub fn grid_spacing(&self, points: usize) -> f64 {
        (self.hi - self.lo) / (points.max(2) - 1) as f64
    }
}

impl ObservationSpace<f64> for Interval {
    /// Exact: the largest of the two boundary gaps and the half gaps between
    /// consecutive sorted centers.
    fn covering_radius(&self, centers: &[f64]) -> Result<f64> {
        if centers.is_empty() {
            return Err(Error::NoCells);
        }
        let mut sorted = centers.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut radius = (sorted[0] - self.lo).max(self.hi - sorted[sorted.len() - 1]).max(0.0);
        for w in sorted.windows(2) {
            radius = radius.max((w[1] - w[0]) / 2.0);
        }
        Ok(radius)
    }
}

/// Axis-aligned box in `N` dimensions. Covering radii are grid estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpace<const N: usize> {
    pub lo: [f64; N],
    pub hi: [f64; N],
}

impl<const N: usize> ObservationSpace<[f64; N]> for BoxSpace<N> {
    fn covering_radius(&self, centers: &[[f64; N]]) -> Result<f64> {
        if centers.is_empty() {
            return Err(Error::NoCells);
        }
        if N == 0 {
            return Ok(0.0);
        }
        let per_axis = (libm::ceil(powf(GRID_POINTS as f64, 1.0 / N as f64)) as usize).max(2);
        let total = per_axis.pow(N as u32);
        let mut worst = 0.0f64;
        let mut z = [0.0; N];
        for flat in 0..total {
            let mut rest = flat;
            for (d, zd) in z.iter_mut().enumerate() {
                let i = rest % per_axis;
                rest /= per_axis;
                *zd = self.lo[d] + (self.hi[d] - self.lo[d]) * i as f64 / (per_axis - 1) as f64;
            }
            let near = centers.iter().map(|c| z.distance(c)).fold(f64::INFINITY, f64::min);
            worst = worst.max(near);
        }
        Ok(worst)
    }
}
