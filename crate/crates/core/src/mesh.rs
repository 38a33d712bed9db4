//! Freudenthal (Kuhn) tetrahedralization of the vertex lattice.
//!
//! Every cell is split into the six tetrahedra that share its main diagonal
//! from the lowest corner to the highest corner. The diagonal direction is the
//! same in every cell, so the split of each shared square face matches on both
//! sides and the tetrahedra form a conforming mesh.

use std::collections::HashMap;

use crate::model::{GridDomain, MultifieldFrame};

const AXIS_ORDERS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// A tetrahedron of the mesh together with its per-field vertex values.
#[derive(Debug, Clone, PartialEq)]
pub struct Tetrahedron {
    pub vertex_ids: [usize; 4],
    pub positions: [[f64; 3]; 4],
    /// `values[k][i]` is field `k` at vertex `i`.
    pub values: Vec<[f64; 4]>,
}

impl Tetrahedron {
    pub fn volume(&self) -> f64 {
        signed_volume(&self.positions).abs()
    }
}

/// A triangle on the boundary of the domain, owned by exactly one tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryTriangle {
    pub tet: u32,
    /// Local face index within the owning tet (the face opposite this vertex).
    pub face: u8,
    pub vertex_ids: [usize; 3],
}

/// Tetrahedral mesh topology for a lattice of given dims.
///
/// Geometry is not stored: positions come from whichever [`GridDomain`] is
/// supplied, so one topology serves every frame of a series.
#[derive(Debug, Clone)]
pub struct TetMesh {
    dims: [usize; 3],
    tets: Vec<[usize; 4]>,
    /// `neighbors[t][f]` is the tet across face `f` (opposite local vertex `f`).
    neighbors: Vec<[Option<u32>; 4]>,
    boundary: Vec<BoundaryTriangle>,
}

/// Local vertex indices of face `f` (the face opposite vertex `f`).
pub const FACE_VERTICES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

impl TetMesh {
    pub fn new(grid: &GridDomain) -> Self {
        let dims = grid.dims();
        let [nx, ny, nz] = dims;
        let mut tets = Vec::with_capacity(6 * grid.cell_count());
        for k in 0..nz - 1 {
            for j in 0..ny - 1 {
                for i in 0..nx - 1 {
                    for order in AXIS_ORDERS {
                        let mut c = [i, j, k];
                        let mut ids = [0usize; 4];
                        ids[0] = grid.index(c[0], c[1], c[2]);
                        for (s, &axis) in order.iter().enumerate() {
                            c[axis] += 1;
                            ids[s + 1] = grid.index(c[0], c[1], c[2]);
                        }
                        if permutation_is_odd(order) {
                            ids.swap(2, 3);
                        }
                        tets.push(ids);
                    }
                }
            }
        }

        let mut faces: HashMap<[usize; 3], (u32, u8)> = HashMap::with_capacity(tets.len() * 2);
        let mut neighbors = vec![[None; 4]; tets.len()];
        for (t, ids) in tets.iter().enumerate() {
            for (f, fv) in FACE_VERTICES.iter().enumerate() {
                let mut key = [ids[fv[0]], ids[fv[1]], ids[fv[2]]];
                key.sort_unstable();
                if let Some((other, of)) = faces.remove(&key) {
                    neighbors[t][f] = Some(other);
                    neighbors[other as usize][of as usize] = Some(t as u32);
                } else {
                    faces.insert(key, (t as u32, f as u8));
                }
            }
        }

        let mut boundary: Vec<BoundaryTriangle> = faces
            .into_values()
            .map(|(t, f)| {
                let ids = tets[t as usize];
                let fv = FACE_VERTICES[f as usize];
                BoundaryTriangle {
                    tet: t,
                    face: f,
                    vertex_ids: [ids[fv[0]], ids[fv[1]], ids[fv[2]]],
                }
            })
            .collect();
        boundary.sort_unstable_by_key(|b| (b.tet, b.face));

        Self {
            dims,
            tets,
            neighbors,
            boundary,
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn tet_count(&self) -> usize {
        self.tets.len()
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn tet(&self, t: usize) -> [usize; 4] {
        self.tets[t]
    }

    pub fn neighbors(&self, t: usize) -> [Option<u32>; 4] {
        self.neighbors[t]
    }

    pub fn boundary_triangles(&self) -> &[BoundaryTriangle] {
        &self.boundary
    }

    pub fn positions(&self, grid: &GridDomain, t: usize) -> [[f64; 3]; 4] {
        self.tets[t].map(|v| grid.vertex_position(v))
    }

    /// Values of field `k` at the four vertices of tet `t`.
    #[inline]
    pub fn field_values(&self, frame: &MultifieldFrame, k: usize, t: usize) -> [f64; 4] {
        let vals = frame.field(k).values();
        self.tets[t].map(|v| vals[v])
    }

    pub fn tetrahedron(&self, frame: &MultifieldFrame, t: usize) -> Tetrahedron {
        Tetrahedron {
            vertex_ids: self.tets[t],
            positions: self.positions(frame.grid(), t),
            values: (0..frame.arity())
                .map(|k| self.field_values(frame, k, t))
                .collect(),
        }
    }
}

/// Decomposes every cell of the frame's grid into six tetrahedra.
pub fn tetrahedralize(frame: &MultifieldFrame) -> Vec<Tetrahedron> {
    let mesh = TetMesh::new(frame.grid());
    (0..mesh.tet_count())
        .map(|t| mesh.tetrahedron(frame, t))
        .collect()
}

fn permutation_is_odd(p: [usize; 3]) -> bool {
    let mut inversions = 0;
    for a in 0..3 {
        for b in a + 1..3 {
            if p[a] > p[b] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

#[inline]
pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn signed_volume(p: &[[f64; 3]; 4]) -> f64 {
    let e1 = sub(p[1], p[0]);
    let e2 = sub(p[2], p[0]);
    let e3 = sub(p[3], p[0]);
    dot(e1, cross(e2, e3)) / 6.0
}
