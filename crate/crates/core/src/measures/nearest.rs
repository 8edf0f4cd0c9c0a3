//! Bucketed nearest-neighbour search on the flat torus.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use crate::torus;

/// Points of `T^d` hashed into a periodic grid of cubic cells.
#[derive(Debug, Clone)]
pub struct NearestGrid {
    d: usize,
    m: usize,
    cell: f64,
    starts: Vec<usize>,
    order: Vec<usize>,
    points: Vec<[f64; 3]>,
}

impl NearestGrid {
    /// `cell_hint` is the target cell side; the grid is capped so that the
    /// cell table stays small.
    pub fn new(d: usize, points: Vec<[f64; 3]>, cell_hint: f64) -> Self {
        let cap = match d {
            1 => 1 << 16,
            2 => 512,
            _ => 64,
        };
        let m = ((TAU / cell_hint.max(1e-9)).floor() as usize).clamp(1, cap);
        let cell = TAU / m as f64;
        let total = m.pow(d as u32);
        let keys: Vec<usize> = points.iter().map(|p| cell_key(d, m, cell, p)).collect();
        let mut counts = alloc::vec![0usize; total + 1];
        for k in &keys {
            counts[k + 1] += 1;
        }
        for i in 0..total {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut order = alloc::vec![0; points.len()];
        for (i, k) in keys.iter().enumerate() {
            order[fill[*k]] = i;
            fill[*k] += 1;
        }
        NearestGrid {
            d,
            m,
            cell,
            starts: counts,
            order,
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, index: usize) -> &[f64; 3] {
        &self.points[index]
    }

    /// Index of and distance to the nearest stored point, provided it lies
    /// within `radius`.
    pub fn nearest(&self, x: &[f64; 3], radius: f64) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let r = (radius / self.cell).ceil() as usize;
        let home: Vec<usize> = (0..self.d).map(|c| axis_cell(self.m, self.cell, x[c])).collect();
        let axis_cells: Vec<Vec<usize>> = home
            .iter()
            .map(|h| {
                if 2 * r + 1 >= self.m {
                    (0..self.m).collect()
                } else {
                    (0..=2 * r).map(|o| (h + self.m + o - r) % self.m).collect()
                }
            })
            .collect();
        let mut best: Option<(usize, f64)> = None;
        let mut idx = alloc::vec![0usize; self.d];
        loop {
            let mut key = 0;
            for c in 0..self.d {
                key = key * self.m + axis_cells[c][idx[c]];
            }
            for &p in &self.order[self.starts[key]..self.starts[key + 1]] {
                let dist = torus::distance(self.d, x, &self.points[p]);
                if best.is_none_or(|(_, b)| dist < b) {
                    best = Some((p, dist));
                }
            }
            let mut c = self.d;
            loop {
                if c == 0 {
                    return best.filter(|(_, b)| *b <= radius);
                }
                c -= 1;
                idx[c] += 1;
                if idx[c] < axis_cells[c].len() {
                    break;
                }
                idx[c] = 0;
            }
        }
    }
}

fn axis_cell(m: usize, cell: f64, x: f64) -> usize {
    let t = torus::rem_tau(x);
    ((t / cell).floor() as usize).min(m - 1)
}

fn cell_key(d: usize, m: usize, cell: f64, p: &[f64; 3]) -> usize {
    (0..d).fold(0, |k, c| k * m + axis_cell(m, cell, p[c]))
}
