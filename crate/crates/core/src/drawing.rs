//! Validated simple drawings: a plane map plus vertex roles and the
//! segment → original-edge identity.

use crate::map::{
    CombinatorialMap, Dart, EdgeId, FaceId, MapReport, MapViolation, SegId, VertexId, VertexRole,
};
use std::collections::HashMap;
use std::fmt;

/// Unvalidated drawing data. [`RawDrawing::validate`] turns it into a
/// [`Drawing`] or reports every violated invariant.
#[derive(Debug, Clone)]
pub struct RawDrawing {
    pub map: CombinatorialMap,
    pub roles: Vec<VertexRole>,
    /// Original edge of each dart; equal on twins.
    pub edge_of_dart: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DrawingViolation {
    #[error("map violation: {0}")]
    Map(MapViolation),
    #[error("crossing vertex {vertex} has degree {degree}, expected 4")]
    CrossingDegree { vertex: VertexId, degree: usize },
    #[error("crossing vertex {vertex} does not pair opposite darts of the same edge")]
    CrossingNotOpposite { vertex: VertexId },
    #[error("crossing vertex {vertex} is a self-crossing of edge {edge}")]
    SelfCrossing { vertex: VertexId, edge: EdgeId },
    #[error("edge_of differs on twins at dart {dart}")]
    EdgeOfTwinMismatch { dart: Dart },
    #[error("edge ids are not dense: max id {max} but {distinct} distinct ids")]
    EdgesNotDense { max: EdgeId, distinct: usize },
    #[error("edge {edge} does not form a simple real-to-real path ({reason})")]
    EdgeSeqBroken { edge: EdgeId, reason: String },
    #[error("edges {e1} and {e2} cross more than once (e.g. at vertices {v1} and {v2})")]
    DuplicateCrossing { e1: EdgeId, e2: EdgeId, v1: VertexId, v2: VertexId },
    #[error("edges {e1} and {e2} share endpoint {endpoint} and also cross at {crossing}")]
    AdjacentEdgesCross { e1: EdgeId, e2: EdgeId, endpoint: VertexId, crossing: VertexId },
    #[error("role/edge arrays have wrong length")]
    ArrayLength,
}

#[derive(Debug, Clone, Default)]
pub struct DrawingReport {
    pub violations: Vec<DrawingViolation>,
}

impl fmt::Display for DrawingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A validated connected simple drawing, given by the plane combinatorial
/// map of its planarization.
///
/// Everything downstream (dual, holes, patchwork, solvers) reads the drawing
/// through this type. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Drawing {
    map: CombinatorialMap,
    roles: Vec<VertexRole>,
    edge_of_dart: Vec<EdgeId>,
    /// Per original edge: its darts ordered tail-endpoint → head-endpoint.
    edge_seqs: Vec<Vec<Dart>>,
    /// Per segment: (edge, index into that edge's `edge_seq`).
    seg_pos: Vec<(EdgeId, u32)>,
    /// One dart per vertex, for O(1) rotation access.
    vertex_dart: Vec<Dart>,
    crossing_count: usize,
}

impl RawDrawing {
    pub fn validate(self) -> Result<Drawing, DrawingReport> {
        let mut report = DrawingReport::default();
        let map = self.map;
        let n_darts = map.dart_count();
        if self.roles.len() != map.vertex_count() || self.edge_of_dart.len() != n_darts {
            report.violations.push(DrawingViolation::ArrayLength);
            return Err(report);
        }
        let roles = self.roles;
        let edge_of = self.edge_of_dart;

        let mut vertex_dart = vec![u32::MAX; map.vertex_count()];
        for d in (0..n_darts as u32).rev() {
            vertex_dart[map.vertex_of(d) as usize] = d;
        }

        for d in 0..n_darts as u32 {
            if edge_of[d as usize] != edge_of[map.twin(d) as usize] {
                report.violations.push(DrawingViolation::EdgeOfTwinMismatch { dart: d });
            }
        }
        let max_e = edge_of.iter().copied().max().unwrap_or(0);
        let distinct: std::collections::HashSet<_> = edge_of.iter().collect();
        if (max_e as usize) + 1 != distinct.len() {
            report.violations.push(DrawingViolation::EdgesNotDense { max: max_e, distinct: distinct.len() });
        }
        if !report.violations.is_empty() {
            return Err(report);
        }
        let n_edges = max_e as usize + 1;

        // Crossing vertices: degree 4, opposite darts carry the same edge,
        // the two edges differ.
        let mut crossing_count = 0;
        for v in 0..map.vertex_count() as u32 {
            if roles[v as usize] != VertexRole::Crossing {
                continue;
            }
            crossing_count += 1;
            let darts = rot_orbit(&map, vertex_dart[v as usize]);
            if darts.len() != 4 {
                report
                    .violations
                    .push(DrawingViolation::CrossingDegree { vertex: v, degree: darts.len() });
                continue;
            }
            let e: Vec<EdgeId> = darts.iter().map(|&d| edge_of[d as usize]).collect();
            if e[0] == e[1] && e[1] == e[2] && e[2] == e[3] {
                report.violations.push(DrawingViolation::SelfCrossing { vertex: v, edge: e[0] });
            } else if !(e[0] == e[2] && e[1] == e[3] && e[0] != e[1]) {
                report.violations.push(DrawingViolation::CrossingNotOpposite { vertex: v });
            }
        }

        // Each original edge must trace a simple path between two real
        // vertices through crossing vertices.
        let mut edge_seqs: Vec<Vec<Dart>> = vec![Vec::new(); n_edges];
        let mut endpoints: Vec<Vec<(VertexId, Dart)>> = vec![Vec::new(); n_edges];
        for v in 0..map.vertex_count() as u32 {
            if roles[v as usize] != VertexRole::Real {
                continue;
            }
            for d in rot_orbit(&map, vertex_dart[v as usize]) {
                endpoints[edge_of[d as usize] as usize].push((v, d));
            }
        }
        'edges: for e in 0..n_edges {
            let ends = &endpoints[e];
            if ends.len() != 2 {
                report.violations.push(DrawingViolation::EdgeSeqBroken {
                    edge: e as EdgeId,
                    reason: format!("{} dart incidences at real vertices, expected 2", ends.len()),
                });
                continue;
            }
            let (start, mut d) = {
                let a = ends[0];
                let b = ends[1];
                if (a.0, a.1) <= (b.0, b.1) {
                    a
                } else {
                    b
                }
            };
            let mut seq = vec![d];
            let mut visited = vec![start];
            loop {
                let head = map.head(d);
                if roles[head as usize] == VertexRole::Real {
                    break;
                }
                if visited.contains(&head) {
                    report.violations.push(DrawingViolation::EdgeSeqBroken {
                        edge: e as EdgeId,
                        reason: format!("revisits vertex {head}"),
                    });
                    continue 'edges;
                }
                visited.push(head);
                // Continue straight through the crossing: two rot steps.
                let next = map.rot(map.rot(map.twin(d)));
                if edge_of[next as usize] != e as EdgeId {
                    report.violations.push(DrawingViolation::EdgeSeqBroken {
                        edge: e as EdgeId,
                        reason: format!("not straight through crossing {head}"),
                    });
                    continue 'edges;
                }
                d = next;
                seq.push(d);
            }
            let seg_count = edge_of.iter().filter(|&&x| x == e as EdgeId).count() / 2;
            if seq.len() != seg_count {
                report.violations.push(DrawingViolation::EdgeSeqBroken {
                    edge: e as EdgeId,
                    reason: format!("path covers {} of {} segments", seq.len(), seg_count),
                });
                continue;
            }
            edge_seqs[e] = seq;
        }
        if !report.violations.is_empty() {
            return Err(report);
        }

        // Simplicity across edge pairs.
        let mut pair_crossings: HashMap<(EdgeId, EdgeId), Vec<VertexId>> = HashMap::new();
        for v in 0..map.vertex_count() as u32 {
            if roles[v as usize] != VertexRole::Crossing {
                continue;
            }
            let darts = rot_orbit(&map, vertex_dart[v as usize]);
            let mut es: Vec<EdgeId> = darts.iter().map(|&d| edge_of[d as usize]).collect();
            es.sort_unstable();
            es.dedup();
            if es.len() == 2 {
                pair_crossings.entry((es[0], es[1])).or_default().push(v);
            }
        }
        let mut pairs: Vec<_> = pair_crossings.iter().collect();
        pairs.sort();
        for (&(e1, e2), vs) in pairs {
            if vs.len() > 1 {
                report.violations.push(DrawingViolation::DuplicateCrossing {
                    e1,
                    e2,
                    v1: vs[0],
                    v2: vs[1],
                });
            }
            let ends1 = [endpoint_of(&map, &edge_seqs[e1 as usize], true), endpoint_of(&map, &edge_seqs[e1 as usize], false)];
            for &w in &[endpoint_of(&map, &edge_seqs[e2 as usize], true), endpoint_of(&map, &edge_seqs[e2 as usize], false)] {
                if ends1.contains(&w) {
                    report.violations.push(DrawingViolation::AdjacentEdgesCross {
                        e1,
                        e2,
                        endpoint: w,
                        crossing: vs[0],
                    });
                }
            }
        }
        if !report.violations.is_empty() {
            return Err(report);
        }

        let mut seg_pos = vec![(0u32, 0u32); map.seg_count()];
        for (e, seq) in edge_seqs.iter().enumerate() {
            for (i, &d) in seq.iter().enumerate() {
                seg_pos[map.seg_of(d) as usize] = (e as EdgeId, i as u32);
            }
        }

        Ok(Drawing {
            map,
            roles,
            edge_of_dart: edge_of,
            edge_seqs,
            seg_pos,
            vertex_dart,
            crossing_count,
        })
    }
}

fn rot_orbit(map: &CombinatorialMap, d0: Dart) -> Vec<Dart> {
    let mut out = Vec::new();
    let mut d = d0;
    loop {
        out.push(d);
        d = map.rot(d);
        if d == d0 {
            break;
        }
    }
    out
}

fn endpoint_of(map: &CombinatorialMap, seq: &[Dart], first: bool) -> VertexId {
    if first {
        map.tail(seq[0])
    } else {
        map.head(*seq.last().unwrap())
    }
}

impl Drawing {
    pub fn map(&self) -> &CombinatorialMap {
        &self.map
    }

    pub fn role(&self, v: VertexId) -> VertexRole {
        self.roles[v as usize]
    }

    pub fn roles(&self) -> &[VertexRole] {
        &self.roles
    }

    pub fn edge_of_dart(&self, d: Dart) -> EdgeId {
        self.edge_of_dart[d as usize]
    }

    pub fn edge_of_seg(&self, s: SegId) -> EdgeId {
        self.seg_pos[s as usize].0
    }

    /// Index of segment `s` along its edge's tail→head order.
    pub fn seg_index(&self, s: SegId) -> u32 {
        self.seg_pos[s as usize].1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_seqs.len()
    }

    /// Darts of an original edge, ordered from its smaller endpoint.
    pub fn edge_seq(&self, e: EdgeId) -> &[Dart] {
        &self.edge_seqs[e as usize]
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let seq = &self.edge_seqs[e as usize];
        (self.map.tail(seq[0]), self.map.head(*seq.last().unwrap()))
    }

    /// Number of crossings the drawing of edge `e` is involved in.
    pub fn edge_crossings(&self, e: EdgeId) -> usize {
        self.edge_seqs[e as usize].len() - 1
    }

    pub fn crossing_count(&self) -> usize {
        self.crossing_count
    }

    /// Counterclockwise darts out of `v`, starting at a fixed dart.
    pub fn vertex_darts(&self, v: VertexId) -> Vec<Dart> {
        rot_orbit(&self.map, self.vertex_dart[v as usize])
    }

    /// Faces whose boundary walk contains `v`, deduplicated, ascending.
    pub fn faces_at(&self, v: VertexId) -> Vec<FaceId> {
        let mut fs: Vec<FaceId> = self
            .vertex_darts(v)
            .iter()
            .map(|&d| self.map.face_of(d))
            .collect();
        fs.sort_unstable();
        fs.dedup();
        fs
    }

    pub fn is_edge_between(&self, a: VertexId, b: VertexId) -> bool {
        (0..self.edge_count() as u32).any(|e| {
            let (s, t) = self.edge_endpoints(e);
            (s, t) == (a, b) || (s, t) == (b, a)
        })
    }
}

impl From<MapReport> for DrawingReport {
    fn from(r: MapReport) -> Self {
        DrawingReport {
            violations: r.violations.into_iter().map(DrawingViolation::Map).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::VertexRole::*;
    use crate::testgraphs;

    #[test]
    fn triangle_validates() {
        let d = testgraphs::triangle_drawing();
        assert_eq!(d.edge_count(), 3);
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.map().face_count(), 2);
    }

    #[test]
    fn k4_convex_validates() {
        let d = testgraphs::k4_convex_drawing();
        assert_eq!(d.crossing_count(), 1);
        assert_eq!(d.edge_crossings(4), 1);
        assert_eq!(d.edge_crossings(0), 0);
        assert_eq!(d.edge_seq(4).len(), 2);
        // U-sets: each hull vertex of K4 lies on 3 cells.
        assert_eq!(d.faces_at(0).len(), 3);
    }

    #[test]
    fn degree_three_crossing_is_rejected() {
        // Star with three leaves, center mislabeled as a crossing.
        let map = crate::map::CombinatorialMap::build(
            vec![1, 0, 3, 2, 5, 4],
            vec![2, 1, 4, 3, 0, 5],
            vec![0, 1, 0, 2, 0, 3],
            0,
        )
        .unwrap();
        let err = RawDrawing {
            map,
            roles: vec![Crossing, Real, Real, Real],
            edge_of_dart: vec![0, 0, 1, 1, 2, 2],
        }
        .validate()
        .unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, DrawingViolation::CrossingDegree { degree: 3, .. })));
    }

    #[test]
    fn crossing_count_equals_pairwise_sum() {
        let d = testgraphs::k4_convex_drawing();
        let mut pair_sum = 0;
        for e1 in 0..d.edge_count() as u32 {
            for e2 in e1 + 1..d.edge_count() as u32 {
                let c1: std::collections::HashSet<_> = d
                    .edge_seq(e1)
                    .iter()
                    .skip(1)
                    .map(|&dd| d.map().tail(dd))
                    .collect();
                let c2: std::collections::HashSet<_> = d
                    .edge_seq(e2)
                    .iter()
                    .skip(1)
                    .map(|&dd| d.map().tail(dd))
                    .collect();
                pair_sum += c1.intersection(&c2).count();
            }
        }
        assert_eq!(pair_sum, d.crossing_count());
    }
}
