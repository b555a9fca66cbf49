//! Plane combinatorial maps: darts, the twin involution, counterclockwise
//! rotations, and the face structure derived from them.
//!
//! The map is the only representation of a drawing this crate uses. A dart is
//! one side of one planarization edge; `twin` pairs the two sides and `rot`
//! is the counterclockwise successor around the dart's tail vertex. Faces are
//! the orbits of `d ↦ rot(twin(d))`, which traverses every face with that
//! face on the left of each dart. The outer face is part of the data model
//! and must be designated explicitly.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Index of a dart (half-edge). Dense, 0-based.
pub type Dart = u32;
/// Index of a vertex of the planarization. Dense, 0-based.
pub type VertexId = u32;
/// Index of a face of the planarization. Dense, 0-based.
pub type FaceId = u32;
/// Index of a planarization edge (an edge segment of an original edge).
pub type SegId = u32;
/// Index of an original edge of the underlying graph `G`.
pub type EdgeId = u32;

/// Role of a planarization vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexRole {
    Real,
    Crossing,
}

/// A connected genus-0 combinatorial map.
///
/// Invariants are established by [`CombinatorialMap::build`]; afterwards all
/// accessors are total and panic-free.
#[derive(Debug, Clone)]
pub struct CombinatorialMap {
    twin: Vec<Dart>,
    rot: Vec<Dart>,
    vertex_of: Vec<VertexId>,
    n_vertices: u32,
    // Face structure derived from rot/twin at build time.
    face_of: Vec<FaceId>,
    face_walks: Vec<Vec<Dart>>,
    outer_face: FaceId,
    // Canonical segment ids: one per twin pair, numbered by smaller dart.
    seg_of: Vec<SegId>,
    seg_dart: Vec<Dart>,
}

/// A single violated invariant, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapViolation {
    #[error("twin[{dart}] = {dart} is a fixed point")]
    TwinFixedPoint { dart: Dart },
    #[error("twin is not an involution at dart {dart}: twin(twin({dart})) = {back}")]
    TwinNotInvolution { dart: Dart, back: Dart },
    #[error("rot is not a permutation: dart {dart} has {preimages} rot-preimages")]
    RotNotPermutation { dart: Dart, preimages: usize },
    #[error("rot orbit of dart {dart} leaves its vertex: vertex_of({dart}) = {vertex}, vertex_of(rot) = {other}")]
    RotLeavesVertex { dart: Dart, vertex: VertexId, other: VertexId },
    #[error("vertex {vertex} is split across several rot orbits (darts {a} and {b})")]
    VertexSplit { vertex: VertexId, a: Dart, b: Dart },
    #[error("vertex ids are not dense: max id {max} but {distinct} distinct ids")]
    VerticesNotDense { max: VertexId, distinct: usize },
    #[error("map is disconnected: vertex {vertex} is not reachable from vertex 0")]
    Disconnected { vertex: VertexId },
    #[error("Euler check failed: V={v} E={e} F={f}, V-E+F={chi} (expected 2)")]
    EulerViolation { v: usize, e: usize, f: usize, chi: i64 },
    #[error("map has no darts")]
    Empty,
}

/// Outcome of validating raw map arrays: every violated invariant, each with
/// a witness.
#[derive(Debug, Clone, Default)]
pub struct MapReport {
    pub violations: Vec<MapViolation>,
}

impl fmt::Display for MapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl CombinatorialMap {
    /// Validates the raw arrays and derives the face structure.
    ///
    /// `outer_face_dart` designates the orbit of `rot(twin(·))` that is the
    /// unbounded face. Returns every violated invariant if the arrays do not
    /// describe a connected plane map.
    pub fn build(
        twin: Vec<Dart>,
        rot: Vec<Dart>,
        vertex_of: Vec<VertexId>,
        outer_face_dart: Dart,
    ) -> Result<Self, MapReport> {
        let n = twin.len();
        let mut report = MapReport::default();
        if n == 0 {
            report.violations.push(MapViolation::Empty);
            return Err(report);
        }
        debug_assert!(rot.len() == n && vertex_of.len() == n);

        for d in 0..n as u32 {
            let t = twin[d as usize];
            if t == d {
                report.violations.push(MapViolation::TwinFixedPoint { dart: d });
            } else if twin[t as usize] != d {
                report.violations.push(MapViolation::TwinNotInvolution { dart: d, back: twin[t as usize] });
            }
        }

        let mut preimages = vec![0usize; n];
        for d in 0..n {
            preimages[rot[d] as usize] += 1;
        }
        for d in 0..n {
            if preimages[d] != 1 {
                report.violations.push(MapViolation::RotNotPermutation { dart: d as Dart, preimages: preimages[d] });
            }
        }
        if !report.violations.is_empty() {
            // Orbit computations below assume bijectivity.
            return Err(report);
        }

        // rot orbits must partition the darts by vertex.
        let mut orbit_of = vec![u32::MAX; n];
        let mut orbit_rep: Vec<Dart> = Vec::new();
        for d0 in 0..n as u32 {
            if orbit_of[d0 as usize] != u32::MAX {
                continue;
            }
            let id = orbit_rep.len() as u32;
            orbit_rep.push(d0);
            let mut d = d0;
            loop {
                orbit_of[d as usize] = id;
                if vertex_of[d as usize] != vertex_of[d0 as usize] {
                    report.violations.push(MapViolation::RotLeavesVertex {
                        dart: d0,
                        vertex: vertex_of[d0 as usize],
                        other: vertex_of[d as usize],
                    });
                }
                d = rot[d as usize];
                if d == d0 {
                    break;
                }
            }
        }
        let mut orbit_seen_for_vertex: std::collections::HashMap<VertexId, Dart> = std::collections::HashMap::new();
        for d0 in &orbit_rep {
            let v = vertex_of[*d0 as usize];
            if let Some(prev) = orbit_seen_for_vertex.insert(v, *d0) {
                report.violations.push(MapViolation::VertexSplit { vertex: v, a: prev, b: *d0 });
            }
        }
        let max_v = *vertex_of.iter().max().unwrap();
        let distinct = orbit_seen_for_vertex.len();
        if (max_v as usize) + 1 != distinct {
            report.violations.push(MapViolation::VerticesNotDense { max: max_v, distinct });
        }
        if !report.violations.is_empty() {
            return Err(report);
        }
        let n_vertices = distinct as u32;

        // Connectivity over the underlying graph.
        let mut vertex_dart = vec![u32::MAX; n_vertices as usize];
        for d in 0..n as u32 {
            vertex_dart[vertex_of[d as usize] as usize] = d;
        }
        let mut seen_v = vec![false; n_vertices as usize];
        let mut stack = vec![vertex_of[0]];
        seen_v[vertex_of[0] as usize] = true;
        while let Some(v) = stack.pop() {
            let d0 = vertex_dart[v as usize];
            let mut d = d0;
            loop {
                let w = vertex_of[twin[d as usize] as usize];
                if !seen_v[w as usize] {
                    seen_v[w as usize] = true;
                    stack.push(w);
                }
                d = rot[d as usize];
                if d == d0 {
                    break;
                }
            }
        }
        if let Some(v) = seen_v.iter().position(|s| !s) {
            report.violations.push(MapViolation::Disconnected { vertex: v as VertexId });
        }

        // Face orbits of d ↦ rot(twin(d)).
        let mut face_of = vec![u32::MAX; n];
        let mut face_walks: Vec<Vec<Dart>> = Vec::new();
        for d0 in 0..n as u32 {
            if face_of[d0 as usize] != u32::MAX {
                continue;
            }
            let id = face_walks.len() as u32;
            let mut walk = Vec::new();
            let mut d = d0;
            loop {
                face_of[d as usize] = id;
                walk.push(d);
                d = rot[twin[d as usize] as usize];
                if d == d0 {
                    break;
                }
            }
            face_walks.push(walk);
        }

        let v = n_vertices as i64;
        let e = (n / 2) as i64;
        let f = face_walks.len() as i64;
        if v - e + f != 2 {
            report.violations.push(MapViolation::EulerViolation {
                v: v as usize,
                e: e as usize,
                f: f as usize,
                chi: v - e + f,
            });
        }
        if !report.violations.is_empty() {
            return Err(report);
        }

        let mut seg_of = vec![u32::MAX; n];
        let mut seg_dart = Vec::with_capacity(n / 2);
        for d in 0..n as u32 {
            if seg_of[d as usize] == u32::MAX {
                let id = seg_dart.len() as u32;
                seg_of[d as usize] = id;
                seg_of[twin[d as usize] as usize] = id;
                seg_dart.push(d.min(twin[d as usize]));
            }
        }

        let outer_face = face_of[outer_face_dart as usize];
        Ok(CombinatorialMap {
            twin,
            rot,
            vertex_of,
            n_vertices,
            face_of,
            face_walks,
            outer_face,
            seg_of,
            seg_dart,
        })
    }

    pub fn dart_count(&self) -> usize {
        self.twin.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices as usize
    }

    pub fn seg_count(&self) -> usize {
        self.seg_dart.len()
    }

    pub fn face_count(&self) -> usize {
        self.face_walks.len()
    }

    #[inline]
    pub fn twin(&self, d: Dart) -> Dart {
        self.twin[d as usize]
    }

    #[inline]
    pub fn rot(&self, d: Dart) -> Dart {
        self.rot[d as usize]
    }

    /// The dart following `d` along its face (face kept on the left).
    #[inline]
    pub fn face_next(&self, d: Dart) -> Dart {
        self.rot[self.twin[d as usize] as usize]
    }

    #[inline]
    pub fn vertex_of(&self, d: Dart) -> VertexId {
        self.vertex_of[d as usize]
    }

    /// Tail vertex of the dart (synonym of [`Self::vertex_of`]).
    #[inline]
    pub fn tail(&self, d: Dart) -> VertexId {
        self.vertex_of(d)
    }

    /// Head vertex of the dart.
    #[inline]
    pub fn head(&self, d: Dart) -> VertexId {
        self.vertex_of(self.twin(d))
    }

    #[inline]
    pub fn face_of(&self, d: Dart) -> FaceId {
        self.face_of[d as usize]
    }

    #[inline]
    pub fn seg_of(&self, d: Dart) -> SegId {
        self.seg_of[d as usize]
    }

    /// The canonical (smaller) dart of a segment.
    #[inline]
    pub fn seg_dart(&self, s: SegId) -> Dart {
        self.seg_dart[s as usize]
    }

    pub fn outer_face(&self) -> FaceId {
        self.outer_face
    }

    /// All faces as dart cycles, outer face designated separately.
    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.face_walks
    }

    /// The closed walk of a face as `(dart, tail vertex)` incidences.
    ///
    /// A cut vertex appears once per incidence; each occurrence is distinct.
    pub fn boundary_walk(&self, f: FaceId) -> Vec<(Dart, VertexId)> {
        self.face_walks[f as usize]
            .iter()
            .map(|&d| (d, self.vertex_of(d)))
            .collect()
    }

    /// Iterates all darts with tail `v` in counterclockwise order, starting
    /// at an arbitrary but fixed dart.
    pub fn vertex_darts(&self, v: VertexId) -> Vec<Dart> {
        let d0 = self.some_dart_at(v);
        let mut out = Vec::new();
        let mut d = d0;
        loop {
            out.push(d);
            d = self.rot(d);
            if d == d0 {
                break;
            }
        }
        out
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.vertex_darts(v).len()
    }

    fn some_dart_at(&self, v: VertexId) -> Dart {
        // Dense scan kept simple; maps at desk scale are small. Callers that
        // need this in hot loops should go through Drawing, which caches it.
        (0..self.dart_count() as u32)
            .find(|&d| self.vertex_of(d) == v)
            .expect("vertex id out of range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgraphs;

    #[test]
    fn triangle_has_two_faces() {
        let m = testgraphs::triangle_map();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.seg_count(), 3);
        assert_eq!(m.face_count(), 2);
    }

    #[test]
    fn single_edge_has_one_face_walk_of_length_two() {
        // A single edge: darts 0,1; rot is the identity.
        let m = CombinatorialMap::build(vec![1, 0], vec![0, 1], vec![0, 1], 0).unwrap();
        assert_eq!(m.face_count(), 1);
        let walk = m.boundary_walk(0);
        assert_eq!(walk.len(), 2);
        let verts: Vec<_> = walk.iter().map(|&(_, v)| v).collect();
        assert_eq!(verts, vec![0, 1]);
    }

    #[test]
    fn twin_fixed_point_is_reported() {
        let err = CombinatorialMap::build(vec![0, 1], vec![0, 1], vec![0, 1], 0).unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, MapViolation::TwinFixedPoint { .. })));
    }

    #[test]
    fn disconnected_map_is_reported() {
        // Two disjoint edges.
        let err = CombinatorialMap::build(
            vec![1, 0, 3, 2],
            vec![0, 1, 2, 3],
            vec![0, 1, 2, 3],
            0,
        )
        .unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, MapViolation::Disconnected { .. })));
    }

    #[test]
    fn k4_with_one_crossing_satisfies_euler() {
        let m = testgraphs::k4_convex_map();
        // Planarization: 4 real + 1 crossing vertex, 8 edges, 5 faces.
        assert_eq!(m.vertex_count(), 5);
        assert_eq!(m.seg_count(), 8);
        assert_eq!(m.face_count(), 5);
    }

    #[test]
    fn k4_outer_walk_has_length_four() {
        let m = testgraphs::k4_convex_map();
        let outer = m.outer_face();
        assert_eq!(m.boundary_walk(outer).len(), 4);
    }
}
