use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::circle::{is_adjacent, CircleLift, RationalLock, DEFAULT_ENVELOPE_GRID};
use crate::error::{Error, Result};
use crate::fmt::{sig17, Sig17};
use crate::map::{MapParams, RegionClass};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Adjacency {
    Adjacent,
    NotAdjacent,
    Inconclusive,
}

impl Adjacency {
    fn as_str(self) -> &'static str {
        match self {
            Adjacency::Adjacent => "true",
            Adjacency::NotAdjacent => "false",
            Adjacency::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanCell<T> {
    pub r: T,
    pub alpha: T,
    pub region: RegionClass,
    pub rho_lo: T,
    pub rho_hi: T,
    pub lock: Option<RationalLock>,
    /// Only for locked cells of the endomorphism region.
    pub adjacency: Option<Adjacency>,
}

impl<T: Real> Serialize for ScanCell<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ScanCell", 8)?;
        s.serialize_field("r", &Sig17(self.r.to_f64_lossy()))?;
        s.serialize_field("alpha", &Sig17(self.alpha.to_f64_lossy()))?;
        s.serialize_field("region", &self.region)?;
        s.serialize_field("rho_lo", &Sig17(self.rho_lo.to_f64_lossy()))?;
        s.serialize_field("rho_hi", &Sig17(self.rho_hi.to_f64_lossy()))?;
        s.serialize_field("lock_p", &self.lock.map(|l| l.p))?;
        s.serialize_field("lock_q", &self.lock.map(|l| l.q))?;
        s.serialize_field("adjacent", &self.adjacency.map(Adjacency::as_str))?;
        s.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub n_iter: usize,
    pub grid_n: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { n_iter: 4000, grid_n: DEFAULT_ENVELOPE_GRID }
    }
}

/// Parameter-plane grid over `r × α`, row-major with `r` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid<T> {
    pub d: u32,
    pub r_range: (T, T),
    pub alpha_range: (T, T),
    /// `(r cells, α cells)`.
    pub res: (usize, usize),
    pub q_max: u32,
    pub cells: Vec<ScanCell<T>>,
}

impl<T: Real> ScanGrid<T> {
    pub fn cell(&self, i_r: usize, j_alpha: usize) -> &ScanCell<T> {
        &self.cells[i_r * self.res.1 + j_alpha]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,alpha,region,rho_lo,rho_hi,lock_p,lock_q,adjacent\n");
        for c in &self.cells {
            let (lp, lq) = c.lock.map_or((String::new(), String::new()), |l| (l.p.to_string(), l.q.to_string()));
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                sig17(c.r.to_f64_lossy()),
                sig17(c.alpha.to_f64_lossy()),
                c.region.name(),
                sig17(c.rho_lo.to_f64_lossy()),
                sig17(c.rho_hi.to_f64_lossy()),
                lp,
                lq,
                c.adjacency.map_or("", Adjacency::as_str),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scan grid serializes")
    }
}

impl<T: Real> Serialize for ScanGrid<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pair = |(a, b): (T, T)| [Sig17(a.to_f64_lossy()), Sig17(b.to_f64_lossy())];
        let mut s = serializer.serialize_struct("ScanGrid", 6)?;
        s.serialize_field("d", &self.d)?;
        s.serialize_field("r_range", &pair(self.r_range))?;
        s.serialize_field("alpha_range", &pair(self.alpha_range))?;
        s.serialize_field("res", &[self.res.0, self.res.1])?;
        s.serialize_field("q_max", &self.q_max)?;
        s.serialize_field("cells", &self.cells)?;
        s.end()
    }
}

pub fn scan_tongues<T: Real>(d: u32, r_range: (T, T), alpha_range: (T, T), res: (usize, usize), q_max: u32) -> Result<ScanGrid<T>> {
    scan_tongues_with(d, r_range, alpha_range, res, q_max, ScanOptions::default())
}

pub fn scan_tongues_with<T: Real>(
    d: u32,
    r_range: (T, T),
    alpha_range: (T, T),
    res: (usize, usize),
    q_max: u32,
    opts: ScanOptions,
) -> Result<ScanGrid<T>> {
    if d == 0 || res.0 == 0 || res.1 == 0 {
        return Err(Error::InvalidParameter("need d >= 1 and a non-empty grid".into()));
    }
    if !(r_range.0 > T::one() && r_range.0 <= r_range.1) || !(alpha_range.0 <= alpha_range.1) {
        return Err(Error::InvalidParameter("need 1 < r_lo <= r_hi and alpha_lo <= alpha_hi".into()));
    }
    let quarter = T::one() / (T::lit(4.0) * T::from_u32(d).unwrap());
    if alpha_range.0 <= -quarter || alpha_range.1 > quarter {
        return Err(Error::InvalidParameter("alpha range leaves the fundamental domain".into()));
    }
    let center = |(lo, hi): (T, T), k: usize, n: usize| lo + (hi - lo) * (T::from_usize(k).unwrap() + T::lit(0.5)) / T::from_usize(n).unwrap();
    let cells = (0..res.0 * res.1)
        .into_par_iter()
        .map(|idx| {
            let r = center(r_range, idx / res.1, res.0);
            let alpha = center(alpha_range, idx % res.1, res.1);
            scan_cell(d, r, alpha, q_max, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanGrid { d, r_range, alpha_range, res, q_max, cells })
}

fn scan_cell<T: Real>(d: u32, r: T, alpha: T, q_max: u32, opts: ScanOptions) -> Result<ScanCell<T>> {
    let params = MapParams::from_polar(d, r, alpha)?;
    let region = params.classify_region();
    let lift = CircleLift::new(d, r, alpha)?;
    if region != RegionClass::Endomorphism {
        let est = lift.rotation_number(T::zero(), opts.n_iter, q_max);
        return Ok(ScanCell { r, alpha, region, rho_lo: est.value, rho_hi: est.value, lock: est.rational_lock, adjacency: None });
    }
    let interval = lift.rotation_interval(opts.grid_n, opts.n_iter);
    let x_plus = lift.critical_angles()[0];
    let est = lift.rotation_number(x_plus, opts.n_iter, q_max);
    let adjacency = est.rational_lock.map(|l| match is_adjacent(&params, l.p as i64, l.q) {
        Ok(true) => Adjacency::Adjacent,
        Ok(false) => Adjacency::NotAdjacent,
        Err(_) => Adjacency::Inconclusive,
    });
    Ok(ScanCell {
        r,
        alpha,
        region,
        rho_lo: interval.lo.value,
        rho_hi: interval.hi.value,
        lock: est.rational_lock,
        adjacency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::find_superattracting_alpha;

    #[test]
    fn zero_tongue_and_mirror() {
        let g = scan_tongues(1, (3.1, 4.0), (-0.05, 0.05), (16, 16), 4).unwrap();
        for i in 0..16 {
            for j in [7, 8] {
                let l = g.cell(i, j).lock.unwrap();
                assert_eq!((l.p, l.q), (0, 1));
            }
            for j in 0..16 {
                let (a, b) = (g.cell(i, j).lock, g.cell(i, 15 - j).lock);
                if let (Some(a), Some(b)) = (a, b) {
                    assert_eq!(a.q, b.q);
                    assert_eq!((a.p + b.p) % a.q, 0);
                }
            }
        }
        assert!(g.cells.iter().all(|c| c.region == RegionClass::Diffeo && c.adjacency.is_none()));
    }

    #[test]
    fn half_tongue_column() {
        let alpha_star = find_superattracting_alpha(2, 2.0, 1, 2, (-0.125, 0.125)).unwrap();
        let n = 81;
        let g = scan_tongues(2, (2.0, 2.0), (-0.1, -0.065), (1, n), 2).unwrap();
        let locked: Vec<bool> = g.cells.iter().map(|c| c.lock == Some(RationalLock { p: 1, q: 2 })).collect();
        let width = (-0.065 + 0.1) / n as f64;
        let k = ((alpha_star + 0.1) / width) as usize;
        assert!(locked[k]);
        // contiguous run around alpha_star
        let lo = (0..=k).rev().take_while(|&i| locked[i]).last().unwrap();
        let hi = (k..n).take_while(|&i| locked[i]).last().unwrap();
        assert!(hi > lo);
        assert!((lo..=hi).any(|i| g.cells[i].adjacency == Some(Adjacency::Adjacent)));
        for c in &g.cells {
            if c.adjacency == Some(Adjacency::Adjacent) {
                assert!(c.lock.is_some());
            }
        }
    }

    #[test]
    fn csv_and_json_shape() {
        let g = scan_tongues(2, (2.0, 6.5), (-0.1, 0.1), (2, 2), 3).unwrap();
        let csv = g.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "r,alpha,region,rho_lo,rho_hi,lock_p,lock_q,adjacent");
        assert_eq!(lines.count(), 4);
        let v: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(v["cells"].as_array().unwrap().len(), 4);
        assert_eq!(v["res"], serde_json::json!([2, 2]));
        assert!(scan_tongues(2, (0.5, 2.0), (-0.1, 0.1), (2, 2), 3).is_err());
    }
}
