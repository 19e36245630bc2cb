//! Basin classification of the dynamical plane and PPM export.

mod scan;

pub use scan::{scan_tongues, scan_tongues_with, Adjacency, ScanCell, ScanGrid, ScanOptions};

use num_complex::Complex;
use rayon::prelude::*;

use crate::circle::{CircleCycle, CircleLift};
use crate::error::{Error, Result};
use crate::map::{MapParams, SpherePoint};
use crate::scalar::Real;

pub const DEFAULT_R_IN: f64 = 1e-4;
pub const DEFAULT_R_OUT: f64 = 1e4;
pub const DEFAULT_BUDGET: usize = 500;
/// Largest period kept in the cycle table.
pub const TABLE_QMAX: u32 = 8;
/// Capture radius around a cycle point.
pub const CYCLE_RADIUS: f64 = 1e-6;

/// Axis-aligned window of the plane sampled at pixel centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Real> Viewport<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T, width: usize, height: usize) -> Result<Self> {
        if !(x_min < x_max) || !(y_min < y_max) || width == 0 || height == 0 {
            return Err(Error::InvalidParameter("degenerate viewport".into()));
        }
        Ok(Self { x_min, x_max, y_min, y_max, width, height })
    }

    /// Square `[-h, h]²` window.
    pub fn square(h: T, size: usize) -> Result<Self> {
        Self::new(-h, h, -h, h, size, size)
    }

    /// Center of pixel `(i, j)`; row 0 is the top (`y_max`) row.
    pub fn pixel_center(&self, i: usize, j: usize) -> Complex<T> {
        let half = T::lit(0.5);
        let dx = (self.x_max - self.x_min) / T::from_usize(self.width).unwrap();
        let dy = (self.y_max - self.y_min) / T::from_usize(self.height).unwrap();
        Complex::new(
            self.x_min + (T::from_usize(i).unwrap() + half) * dx,
            self.y_max - (T::from_usize(j).unwrap() + half) * dy,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasinClass {
    ToZero,
    ToInfinity,
    ToCircleCycle(u16),
    Undecided,
}

impl BasinClass {
    pub fn rgb(self) -> [u8; 3] {
        const CYCLES: [[u8; 3]; 8] = [
            [40, 170, 70],
            [220, 170, 30],
            [30, 160, 160],
            [160, 70, 180],
            [230, 110, 40],
            [120, 190, 230],
            [190, 190, 70],
            [240, 240, 240],
        ];
        match self {
            BasinClass::ToZero => [30, 30, 160],
            BasinClass::ToInfinity => [160, 30, 30],
            BasinClass::ToCircleCycle(k) => CYCLES[k as usize % CYCLES.len()],
            BasinClass::Undecided => [0, 0, 0],
        }
    }

    /// Image under the involution `z -> 1/conj(z)`.
    pub fn mirrored(self) -> Self {
        match self {
            BasinClass::ToZero => BasinClass::ToInfinity,
            BasinClass::ToInfinity => BasinClass::ToZero,
            other => other,
        }
    }
}

/// Non-repelling circle cycles with their plane points.
#[derive(Debug, Clone)]
pub struct CycleTable<T> {
    pub cycles: Vec<CircleCycle<T>>,
    /// Plane points of each cycle in dynamical order.
    pub points: Vec<Vec<Complex<T>>>,
}

impl<T: Real> CycleTable<T> {
    pub fn empty() -> Self {
        CycleTable { cycles: Vec::new(), points: Vec::new() }
    }

    /// All non-repelling circle cycles with `q <= q_max`; empty for `|a| <= 1`.
    pub fn for_params(params: &MapParams<T>, q_max: u32) -> Self {
        let lift = match CircleLift::from_params(params) {
            Ok(l) => l,
            Err(_) => return Self::empty(),
        };
        let mut table = Self::empty();
        for q in 1..=q_max {
            for p in 0..q {
                if num_integer::gcd(p, q) != 1 {
                    continue;
                }
                let Ok(cycles) = lift.circle_cycles(p as i64, q) else { continue };
                for c in cycles.into_iter().filter(|c| !c.stability.is_repelling()) {
                    table.points.push(c.orbit.iter().map(|&x| params.circle_point(x)).collect());
                    table.cycles.push(c);
                }
            }
        }
        table
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// `(cycle, index)` of a table point within `radius` of `z`.
    fn near(&self, z: Complex<T>, radius2: T) -> Option<(usize, usize)> {
        for (k, pts) in self.points.iter().enumerate() {
            for (j, p) in pts.iter().enumerate() {
                if (z - p).norm_sqr() < radius2 {
                    return Some((k, j));
                }
            }
        }
        None
    }
}

/// Iterates `z` and reports which attractor captures it.
pub fn classify_point<T: Real>(
    params: &MapParams<T>,
    z: SpherePoint<T>,
    budget: usize,
    r_in: T,
    r_out: T,
    table: &CycleTable<T>,
) -> BasinClass {
    let mut z = match z {
        SpherePoint::Infinity => return BasinClass::ToInfinity,
        SpherePoint::Finite(z) => z,
    };
    let (r_in2, r_out2) = (r_in * r_in, r_out * r_out);
    let radius2 = T::lit(CYCLE_RADIUS * CYCLE_RADIUS);
    let mut n = 0;
    while n < budget {
        let m = z.norm_sqr();
        if !m.is_finite() || m > r_out2 {
            return BasinClass::ToInfinity;
        }
        if m < r_in2 {
            return BasinClass::ToZero;
        }
        if let Some((k, j)) = table.near(z, radius2) {
            let q = table.cycles[k].q as usize;
            let target = table.points[k][j];
            let mut w = z;
            let mut stayed = true;
            for _ in 0..q {
                for _ in 0..q {
                    w = params.apply(w);
                }
                n += q;
                if !((w - target).norm_sqr() < radius2) {
                    stayed = false;
                    break;
                }
            }
            if stayed {
                return BasinClass::ToCircleCycle(k as u16);
            }
            z = w;
            continue;
        }
        z = params.apply(z);
        n += 1;
    }
    BasinClass::Undecided
}

/// Classified dynamical plane.
#[derive(Debug, Clone)]
pub struct Raster<T> {
    pub params: MapParams<T>,
    pub viewport: Viewport<T>,
    pub budget: usize,
    pub r_in: T,
    pub r_out: T,
    pub table: CycleTable<T>,
    /// Row-major, top row first.
    pub pixels: Vec<BasinClass>,
}

impl<T: Real> Raster<T> {
    pub fn get(&self, i: usize, j: usize) -> BasinClass {
        self.pixels[j * self.viewport.width + i]
    }

    pub fn count(&self, class: BasinClass) -> usize {
        self.pixels.iter().filter(|&&c| c == class).count()
    }

    pub fn count_cycle_pixels(&self) -> usize {
        self.pixels.iter().filter(|c| matches!(c, BasinClass::ToCircleCycle(_))).count()
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let header = format!("P6\n{} {}\n255\n", self.viewport.width, self.viewport.height);
        let mut out = Vec::with_capacity(header.len() + 3 * self.pixels.len());
        out.extend_from_slice(header.as_bytes());
        for c in &self.pixels {
            out.extend_from_slice(&c.rgb());
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions<T> {
    pub budget: usize,
    pub r_in: T,
    pub r_out: T,
    pub q_max: u32,
}

impl<T: Real> Default for RenderOptions<T> {
    fn default() -> Self {
        RenderOptions { budget: DEFAULT_BUDGET, r_in: T::lit(DEFAULT_R_IN), r_out: T::lit(DEFAULT_R_OUT), q_max: TABLE_QMAX }
    }
}

pub fn render_dynamical_plane<T: Real>(params: &MapParams<T>, vp: Viewport<T>, budget: usize) -> Result<Raster<T>> {
    render_with(params, vp, RenderOptions { budget, ..RenderOptions::default() })
}

/// Renders rows in parallel; each pixel depends only on its own center.
pub fn render_with<T: Real>(params: &MapParams<T>, vp: Viewport<T>, opts: RenderOptions<T>) -> Result<Raster<T>> {
    let vp = Viewport::new(vp.x_min, vp.x_max, vp.y_min, vp.y_max, vp.width, vp.height)?;
    if !(opts.r_in > T::zero() && opts.r_in < T::one() && opts.r_out > T::one()) {
        return Err(Error::InvalidParameter("need 0 < r_in < 1 < r_out".into()));
    }
    let table = CycleTable::for_params(params, opts.q_max);
    let mut pixels = vec![BasinClass::Undecided; vp.width * vp.height];
    pixels.par_chunks_mut(vp.width).enumerate().for_each(|(j, row)| {
        for (i, px) in row.iter_mut().enumerate() {
            let z = SpherePoint::Finite(vp.pixel_center(i, j));
            *px = classify_point(params, z, opts.budget, opts.r_in, opts.r_out, &table);
        }
    });
    Ok(Raster { params: *params, viewport: vp, budget: opts.budget, r_in: opts.r_in, r_out: opts.r_out, table, pixels })
}
