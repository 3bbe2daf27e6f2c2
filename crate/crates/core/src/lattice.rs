//! Oriented `k×k` square lattice on the torus.
//!
//! Horizontal edge `h(x,y)` points from vertex `(x,y)` to `(x+1,y)`, vertical
//! edge `v(x,y)` from `(x,y)` to `(x,y+1)`. Plaquette `(x,y)` has corners
//! `(x,y)` and `(x+1,y+1)`; its bottom and right edges carry boundary sign +1,
//! its top and left edges −1.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gpauli::{commutation_phase, PauliWord};

/// Error/loop species: `Z` errors move vertex charges, `X` errors plaquette charges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    X,
    Z,
}

impl Sector {
    pub fn other(self) -> Sector {
        match self {
            Sector::X => Sector::Z,
            Sector::Z => Sector::X,
        }
    }
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sector::X => "x",
            Sector::Z => "z",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: usize,
    pub axis: Axis,
    pub x: usize,
    pub y: usize,
}

/// Whether a loop runs along lattice edges or crosses them on the dual lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Direct,
    Dual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgePath {
    pub edges: Vec<(usize, i32)>,
    pub winding: (i32, i32),
    pub sector: Sector,
    pub direction: u8,
    pub offset: usize,
    pub placement: Placement,
}

impl EdgePath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.iter().any(|&(e, _)| e == edge)
    }

    /// `∏ σ_j^{sign}` along the path, with σ = X or Z by sector.
    pub fn word(&self, d: u32) -> PauliWord {
        let raw = self.edges.iter().map(|&(e, s)| (e, s as i64));
        match self.sector {
            Sector::X => PauliWord::from_parts(d, 0, raw, []),
            Sector::Z => PauliWord::from_parts(d, 0, [], raw),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientedLattice {
    k: usize,
    edges: Vec<Edge>,
}

impl OrientedLattice {
    pub fn build_torus(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(invalid(format!("torus size must be at least 2, got {k}")));
        }
        let mut edges = Vec::with_capacity(2 * k * k);
        for axis in [Axis::Horizontal, Axis::Vertical] {
            for y in 0..k {
                for x in 0..k {
                    edges.push(Edge {
                        id: edges.len(),
                        axis,
                        x,
                        y,
                    });
                }
            }
        }
        Ok(OrientedLattice { k, edges })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.k * self.k
    }

    pub fn n_plaquettes(&self) -> usize {
        self.k * self.k
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn wrap(&self, c: i64) -> usize {
        c.rem_euclid(self.k as i64) as usize
    }

    pub fn h(&self, x: i64, y: i64) -> usize {
        self.wrap(y) * self.k + self.wrap(x)
    }

    pub fn v(&self, x: i64, y: i64) -> usize {
        self.k * self.k + self.wrap(y) * self.k + self.wrap(x)
    }

    pub fn site(&self, x: i64, y: i64) -> usize {
        self.wrap(y) * self.k + self.wrap(x)
    }

    pub fn coords(&self, site: usize) -> (i64, i64) {
        ((site % self.k) as i64, (site / self.k) as i64)
    }

    /// Signed incidences of vertex `s`: +1 for outgoing arrows, −1 for incoming.
    pub fn star(&self, s: usize) -> Result<[(usize, i32); 4]> {
        if s >= self.n_vertices() {
            return Err(invalid(format!("vertex {s} out of range")));
        }
        let (x, y) = self.coords(s);
        Ok([
            (self.h(x, y), 1),
            (self.h(x - 1, y), -1),
            (self.v(x, y), 1),
            (self.v(x, y - 1), -1),
        ])
    }

    /// Signed boundary of plaquette `p`.
    pub fn boundary(&self, p: usize) -> Result<[(usize, i32); 4]> {
        if p >= self.n_plaquettes() {
            return Err(invalid(format!("plaquette {p} out of range")));
        }
        let (x, y) = self.coords(p);
        Ok([
            (self.h(x, y), 1),
            (self.v(x + 1, y), 1),
            (self.h(x, y + 1), -1),
            (self.v(x, y), -1),
        ])
    }

    /// `(tail, head)` vertices of an edge.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let edge = self.edges[e];
        let (x, y) = (edge.x as i64, edge.y as i64);
        match edge.axis {
            Axis::Horizontal => (self.site(x, y), self.site(x + 1, y)),
            Axis::Vertical => (self.site(x, y), self.site(x, y + 1)),
        }
    }

    /// `(plaquette with sign +1, plaquette with sign −1)` containing the edge.
    pub fn faces(&self, e: usize) -> (usize, usize) {
        let edge = self.edges[e];
        let (x, y) = (edge.x as i64, edge.y as i64);
        match edge.axis {
            Axis::Horizontal => (self.site(x, y), self.site(x, y - 1)),
            Axis::Vertical => (self.site(x - 1, y), self.site(x, y)),
        }
    }

    pub fn star_word(&self, d: u32, s: usize) -> Result<PauliWord> {
        let st = self.star(s)?;
        Ok(PauliWord::from_parts(d, 0, st.map(|(e, sg)| (e, sg as i64)), []))
    }

    pub fn boundary_word(&self, d: u32, p: usize) -> Result<PauliWord> {
        let b = self.boundary(p)?;
        Ok(PauliWord::from_parts(d, 0, [], b.map(|(e, sg)| (e, sg as i64))))
    }

    /// Straight loops of the requested sector, dual placement first.
    pub fn loop_candidates(&self, sector: Sector, direction: u8, offset: usize) -> Result<Vec<EdgePath>> {
        if offset >= self.k {
            return Err(invalid(format!("offset {offset} must be below k={}", self.k)));
        }
        if direction != 1 && direction != 2 {
            return Err(invalid(format!("direction must be 1 or 2, got {direction}")));
        }
        let o = offset as i64;
        let k = self.k as i64;
        let winding = if direction == 1 { (1, 0) } else { (0, 1) };
        let path = |placement, edges: Vec<usize>| EdgePath {
            edges: edges.into_iter().map(|e| (e, 1)).collect(),
            winding,
            sector,
            direction,
            offset,
            placement,
        };
        let along: Vec<usize> = (0..k)
            .map(|t| if direction == 1 { self.h(t, o) } else { self.v(o, t) })
            .collect();
        let across: Vec<usize> = (0..k)
            .map(|t| if direction == 1 { self.v(t, o) } else { self.h(o, t) })
            .collect();
        Ok(vec![path(Placement::Dual, across), path(Placement::Direct, along)])
    }

    /// A straight non-contractible loop whose string commutes with every stabilizer.
    pub fn logical_loop(&self, d: u32, sector: Sector, direction: u8, offset: usize) -> Result<EdgePath> {
        let stabilizers = self.stabilizer_words(d)?;
        let mut tried = Vec::new();
        for cand in self.loop_candidates(sector, direction, offset)? {
            let w = cand.word(d);
            let clash = stabilizers
                .iter()
                .position(|s| commutation_phase(s, &w).expect("same level") != 0);
            match clash {
                None if self.is_closed(&cand) => return Ok(cand),
                None => tried.push(format!("{:?}: open chain", cand.placement)),
                Some(i) => tried.push(format!("{:?}: fails stabilizer #{i}", cand.placement)),
            }
        }
        Err(invalid(format!(
            "no straight {sector}-loop commutes with the code ({})",
            tried.join(", ")
        )))
    }

    /// Vertex stars followed by plaquette boundaries.
    pub fn stabilizer_words(&self, d: u32) -> Result<Vec<PauliWord>> {
        let mut out = Vec::with_capacity(2 * self.k * self.k);
        for s in 0..self.n_vertices() {
            out.push(self.star_word(d, s)?);
        }
        for p in 0..self.n_plaquettes() {
            out.push(self.boundary_word(d, p)?);
        }
        Ok(out)
    }

    /// Whether the chain has vanishing boundary (direct) or coboundary (dual).
    pub fn is_closed(&self, path: &EdgePath) -> bool {
        let mut acc = vec![0i64; self.k * self.k];
        for &(e, s) in &path.edges {
            match path.placement {
                Placement::Direct => {
                    let (t, h) = self.endpoints(e);
                    acc[h] += s as i64;
                    acc[t] -= s as i64;
                }
                Placement::Dual => {
                    let (plus, minus) = self.faces(e);
                    acc[plus] += s as i64;
                    acc[minus] -= s as i64;
                }
            }
        }
        acc.iter().all(|&a| a == 0)
    }
}
