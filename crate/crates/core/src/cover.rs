//! Adaptive rectangle covers outer-approximating the maximal invariant set.
//!
//! Starting from the two strips `H` and `H_tilde`, boxes are bisected round by
//! round (the dynamic y-direction preferentially) and pruned: a box is removed
//! only when its image misses every box or no box's image reaches it, so the
//! surviving union always contains every point with a full orbit in the
//! strips.  Because every box of a strip is split the same way, the cover is a
//! uniform cell grid per strip and transitions are computed from exact
//! interval images of the diagonal strip maps.

use crate::error::{Error, Result};
use crate::horseshoe::HorseshoeMap2D;
use crate::interval::Iv;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Strip {
    H,
    HTilde,
}

/// Component tag used to organize the certificate after the bifurcation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    /// Expansion witnesses are required.
    Nontrivial,
    /// Contains the repelling fixed point column base (p, p).
    SaddleP,
    /// Inside the basin of the attracting point born at the bifurcation
    /// (mu < 0 only); certified through the attracting fixed point instead
    /// of an expansion witness.
    AttractingBasin,
}

#[derive(Debug, Clone, Copy)]
pub struct CoverBox {
    pub x: Iv,
    pub y: Iv,
    pub strip: Strip,
    pub component: Component,
}

/// Uniform cell grid of one strip.
#[derive(Debug, Clone)]
struct StripGrid {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: u32,
    ny: u32,
    /// Occupied cells, mapped to box index.
    cells: HashMap<(u32, u32), usize>,
}

impl StripGrid {
    fn cell_x(&self, i: u32) -> Iv {
        let w = (self.x1 - self.x0) / self.nx as f64;
        Iv::new(self.x0 + w * i as f64, self.x0 + w * (i + 1) as f64)
    }

    fn cell_y(&self, j: u32) -> Iv {
        let h = (self.y1 - self.y0) / self.ny as f64;
        Iv::new(self.y0 + h * j as f64, self.y0 + h * (j + 1) as f64)
    }

    /// Index range of cells meeting the interval, or None when disjoint.
    fn x_range(&self, v: Iv) -> Option<(u32, u32)> {
        range_of(self.x0, self.x1, self.nx, v)
    }

    fn y_range(&self, v: Iv) -> Option<(u32, u32)> {
        range_of(self.y0, self.y1, self.ny, v)
    }
}

fn range_of(lo: f64, hi: f64, n: u32, v: Iv) -> Option<(u32, u32)> {
    if v.hi < lo || v.lo > hi {
        return None;
    }
    let w = (hi - lo) / n as f64;
    let a = (((v.lo - lo) / w).floor() as i64).clamp(0, n as i64 - 1) as u32;
    let b = (((v.hi - lo) / w).floor() as i64).clamp(0, n as i64 - 1) as u32;
    Some((a, b))
}

/// The box cover with its transition graph.
#[derive(Debug, Clone)]
pub struct BoxCover {
    pub mu: f64,
    pub depth: u32,
    pub boxes: Vec<CoverBox>,
    /// Forward adjacency: transitions[i] lists j with phi(box_i) meeting box_j.
    pub transitions: Vec<Vec<u32>>,
    grids: [StripGrid; 2],
}

impl BoxCover {
    pub fn total_area(&self) -> f64 {
        self.boxes
            .iter()
            .map(|b| b.x.width() * b.y.width())
            .sum()
    }

    pub fn box_containing(&self, x: f64, y: f64) -> Option<usize> {
        for grid in self.grids.iter() {
            if x >= grid.x0 && x <= grid.x1 && y >= grid.y0 && y <= grid.y1 {
                let (ia, _) = grid.x_range(Iv::point(x))?;
                let (ja, _) = grid.y_range(Iv::point(y))?;
                // a point on a shared cell edge belongs to either cell
                for di in 0..2u32 {
                    for dj in 0..2u32 {
                        let key = (ia.saturating_sub(di), ja.saturating_sub(dj));
                        if let Some(&idx) = grid.cells.get(&key) {
                            let b = &self.boxes[idx];
                            if b.x.contains(x) && b.y.contains(y) {
                                return Some(idx);
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

/// Build the pruned cover at the given bisection depth (rounds; two y-splits
/// per x-split).
pub fn build_cover(h: &HorseshoeMap2D, mu: f64, depth: u32, budget: usize) -> Result<BoxCover> {
    if mu == 0.0 {
        return Err(Error::Precondition(
            "cover construction requires mu != 0 (saddle-node parameter excluded)".into(),
        ));
    }
    if mu <= -h.base.core.t2 || mu >= h.base.core.t1 {
        return Err(Error::Domain(format!("mu={mu} outside parameter window")));
    }

    let (r_lo, r_hi) = h.rectangle();
    let (h_lo, h_hi) = h.h_strip_y();
    let mut grids = [
        StripGrid {
            x0: r_lo,
            x1: r_hi,
            y0: h_lo,
            y1: h_hi,
            nx: 1,
            ny: 1,
            cells: HashMap::new(),
        },
        StripGrid {
            x0: r_lo,
            x1: r_hi,
            y0: h.l,
            y1: h.l_tilde,
            nx: 1,
            ny: 1,
            cells: HashMap::new(),
        },
    ];
    // occupancy as cell-coordinate sets
    let mut occ: [Vec<(u32, u32)>; 2] = [vec![(0, 0)], vec![(0, 0)]];

    for round in 0..=depth {
        if round > 0 {
            // split: y twice as often as x
            let split_x = round % 3 == 0;
            for s in 0..2 {
                let g = &mut grids[s];
                let mut next = Vec::with_capacity(occ[s].len() * 2);
                if split_x {
                    g.nx *= 2;
                    for &(i, j) in &occ[s] {
                        next.push((2 * i, j));
                        next.push((2 * i + 1, j));
                    }
                } else {
                    g.ny *= 2;
                    for &(i, j) in &occ[s] {
                        next.push((i, 2 * j));
                        next.push((i, 2 * j + 1));
                    }
                }
                occ[s] = next;
            }
        }
        let total = occ[0].len() + occ[1].len();
        if total > budget {
            return Err(Error::Budget {
                budget: budget as u64,
                context: format!("box cover at depth {round}"),
            });
        }
        prune(h, mu, &grids, &mut occ);
        if occ[0].is_empty() && occ[1].is_empty() {
            return Err(Error::CertificateFailure(
                "cover pruned to nothing; no invariant set detected".into(),
            ));
        }
    }

    // freeze into box list
    let mut boxes = Vec::new();
    let mut ids = Vec::new();
    for (s, strip) in [(0usize, Strip::H), (1usize, Strip::HTilde)] {
        occ[s].sort_unstable();
        for &(i, j) in &occ[s] {
            let g = &grids[s];
            boxes.push(CoverBox {
                x: g.cell_x(i),
                y: g.cell_y(j),
                strip,
                component: Component::Nontrivial,
            });
            ids.push((strip, i, j));
        }
    }
    for (s, _) in [(0usize, Strip::H), (1usize, Strip::HTilde)] {
        let g = &mut grids[s];
        g.cells.clear();
    }
    for (idx, &(strip, i, j)) in ids.iter().enumerate() {
        let s = if strip == Strip::H { 0 } else { 1 };
        grids[s].cells.insert((i, j), idx);
    }

    // transitions on the frozen cover
    let mut transitions = vec![Vec::new(); boxes.len()];
    for (idx, b) in boxes.iter().enumerate() {
        let (ix, iy) = image_of(h, mu, b);
        for (s, _) in [(0usize, Strip::H), (1usize, Strip::HTilde)] {
            let g = &grids[s];
            if let (Some((xa, xb)), Some((ya, yb))) = (g.x_range(ix), g.y_range(iy)) {
                for i in xa..=xb {
                    for j in ya..=yb {
                        if let Some(&t) = g.cells.get(&(i, j)) {
                            transitions[idx].push(t as u32);
                        }
                    }
                }
            }
        }
    }

    let mut cover = BoxCover {
        mu,
        depth,
        boxes,
        transitions,
        grids,
    };
    tag_components(h, mu, &mut cover);
    Ok(cover)
}

/// Exact interval image of a box under the strip dynamics.
fn image_of(h: &HorseshoeMap2D, mu: f64, b: &CoverBox) -> (Iv, Iv) {
    let p = h.base.spec.p;
    match b.strip {
        Strip::H => {
            let ix = (b.x - Iv::point(p)).scale(h.lambda).offset(p);
            let iy = h.base.eval_interval(mu, b.y);
            (ix, iy)
        }
        Strip::HTilde => {
            let ix = (b.x - Iv::point(p)).scale(-h.lambda).offset(h.flip_x_anchor);
            let iy = (b.y - Iv::point(h.l))
                .scale(-h.sigma_tilde)
                .offset(h.base.top());
            (ix, iy)
        }
    }
}

/// Two-sided trimming: peel cells with no outgoing or no incoming transition
/// until stable.
fn prune(h: &HorseshoeMap2D, mu: f64, grids: &[StripGrid; 2], occ: &mut [Vec<(u32, u32)>; 2]) {
    {
        let mut index: [HashMap<(u32, u32), usize>; 2] = [HashMap::new(), HashMap::new()];
        let mut flat: Vec<(usize, u32, u32)> = Vec::new();
        for s in 0..2 {
            for &(i, j) in &occ[s] {
                index[s].insert((i, j), flat.len());
                flat.push((s, i, j));
            }
        }
        let n = flat.len();
        if n == 0 {
            return;
        }
        let mut out_deg = vec![0u32; n];
        let mut in_deg = vec![0u32; n];
        let mut fwd: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (id, &(s, i, j)) in flat.iter().enumerate() {
            let g = &grids[s];
            let b = CoverBox {
                x: g.cell_x(i),
                y: g.cell_y(j),
                strip: if s == 0 { Strip::H } else { Strip::HTilde },
                component: Component::Nontrivial,
            };
            let (ix, iy) = image_of(h, mu, &b);
            for t in 0..2 {
                let tg = &grids[t];
                if let (Some((xa, xb)), Some((ya, yb))) = (tg.x_range(ix), tg.y_range(iy)) {
                    for ii in xa..=xb {
                        for jj in ya..=yb {
                            if let Some(&tid) = index[t].get(&(ii, jj)) {
                                fwd[id].push(tid as u32);
                                rev[tid].push(id as u32);
                                out_deg[id] += 1;
                                in_deg[tid] += 1;
                            }
                        }
                    }
                }
            }
        }
        let mut dead = vec![false; n];
        let mut queue: Vec<usize> = (0..n)
            .filter(|&i| out_deg[i] == 0 || in_deg[i] == 0)
            .collect();
        for &i in &queue {
            dead[i] = true;
        }
        let mut qi = 0;
        while qi < queue.len() {
            let v = queue[qi];
            qi += 1;
            for &w in &fwd[v] {
                let w = w as usize;
                if !dead[w] {
                    in_deg[w] -= 1;
                    if in_deg[w] == 0 {
                        dead[w] = true;
                        queue.push(w);
                    }
                }
            }
            for &w in &rev[v] {
                let w = w as usize;
                if !dead[w] {
                    out_deg[w] -= 1;
                    if out_deg[w] == 0 {
                        dead[w] = true;
                        queue.push(w);
                    }
                }
            }
        }
        if !dead.iter().any(|&d| d) {
            return;
        }
        // the queue peels cascades to a fixpoint on this graph; box images do
        // not change within a round, so one pass is complete
        for s in 0..2 {
            occ[s].retain(|&(i, j)| !dead[index[s][&(i, j)]]);
        }
    }
}

/// Tag the boxes of the cover by dynamical component.
fn tag_components(h: &HorseshoeMap2D, mu: f64, cover: &mut BoxCover) {
    let p = h.base.spec.p;
    let q_hat = if mu < 0.0 {
        h.base.core.field_zeros(mu).map(|(_s, q)| q)
    } else {
        None
    };
    for b in &mut cover.boxes {
        if b.strip == Strip::H && b.y.contains(p) {
            b.component = Component::SaddleP;
            continue;
        }
        if let Some(q) = q_hat {
            if b.strip == Strip::H && b.y.hi < q - 1e-12 && b.y.lo > p {
                b.component = Component::AttractingBasin;
            }
        }
    }
}
