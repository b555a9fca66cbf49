//! Exact planarization of straight-line segment arrangements.
//!
//! All predicates are exact over integer input coordinates; crossing points
//! are represented as reduced `i128` rationals. Degenerate configurations
//! (concurrent crossings, vertices inside segments, collinear overlaps) are
//! rejected, never perturbed. Input coordinates are bounded so that every
//! intermediate product provably fits in `i128`.

use crate::drawing::{Drawing, RawDrawing};
use crate::map::{CombinatorialMap, Dart, EdgeId, VertexRole};
use num_rational::Ratio;
use std::collections::HashMap;

pub type Coord = i64;
/// Inputs are clamped to this magnitude; keeps all predicates in `i128`.
pub const MAX_COORD: i64 = 1 << 20;

pub type Rat = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pt {
    pub x: Coord,
    pub y: Coord,
}

impl Pt {
    pub fn new(x: Coord, y: Coord) -> Self {
        Pt { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RPt {
    pub x: Rat,
    pub y: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("coordinate out of range at point {index}")]
    CoordRange { index: usize },
    #[error("points {i} and {j} coincide")]
    DuplicatePoints { i: usize, j: usize },
    #[error("edge {e} is a loop")]
    EdgeLoop { e: usize },
    #[error("edges {e1} and {e2} connect the same endpoints")]
    DuplicateEdges { e1: usize, e2: usize },
    #[error("edge index out of range in edge {e}")]
    EdgeRange { e: usize },
    #[error("point {point} lies in the interior of segment {e}")]
    VertexInsideSegment { point: usize, e: usize },
    #[error("segments {e1} and {e2} overlap collinearly")]
    CollinearOverlap { e1: usize, e2: usize },
    #[error("three or more segments concurrent: pairs ({a1},{a2}) and ({b1},{b2}) cross in one point")]
    ConcurrentCrossings { a1: usize, a2: usize, b1: usize, b2: usize },
    #[error("drawing is disconnected")]
    Disconnected,
    #[error("drawing has no edges")]
    NoEdges,
    #[error("planarization failed validation: {0}")]
    Internal(String),
}

/// Sign of the cross product (b−a) × (c−a): +1 counterclockwise, −1
/// clockwise, 0 collinear.
pub fn orient(a: Pt, b: Pt, c: Pt) -> i32 {
    let v = (b.x as i128 - a.x as i128) * (c.y as i128 - a.y as i128)
        - (b.y as i128 - a.y as i128) * (c.x as i128 - a.x as i128);
    v.signum() as i32
}

/// Strict interior containment of `p` on segment `ab`.
pub fn point_inside_segment(p: Pt, a: Pt, b: Pt) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    let dot = (p.x as i128 - a.x as i128) * (b.x as i128 - a.x as i128)
        + (p.y as i128 - a.y as i128) * (b.y as i128 - a.y as i128);
    let len2 = (b.x as i128 - a.x as i128).pow(2) + (b.y as i128 - a.y as i128).pow(2);
    dot > 0 && dot < len2
}

/// Proper (interior, transversal) crossing test for segments with no shared
/// endpoints.
pub fn properly_cross(a: Pt, b: Pt, c: Pt, d: Pt) -> bool {
    orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0
}

/// Do three points lie on one line?
pub fn collinear(a: Pt, b: Pt, c: Pt) -> bool {
    orient(a, b, c) == 0
}

fn rat(x: i64) -> Rat {
    Ratio::from_integer(x as i128)
}

/// Exact crossing point of properly crossing segments, plus the parameter of
/// the point along `ab`.
fn crossing_point(a: Pt, b: Pt, c: Pt, d: Pt) -> (RPt, Rat) {
    let denom = (b.x as i128 - a.x as i128) * (d.y as i128 - c.y as i128)
        - (b.y as i128 - a.y as i128) * (d.x as i128 - c.x as i128);
    let num = (c.x as i128 - a.x as i128) * (d.y as i128 - c.y as i128)
        - (c.y as i128 - a.y as i128) * (d.x as i128 - c.x as i128);
    let t = Ratio::new(num, denom);
    let x = rat(a.x) + t.clone() * rat(b.x - a.x);
    let y = rat(a.y) + t.clone() * rat(b.y - a.y);
    (RPt { x, y }, t)
}

/// Result of planarizing a segment arrangement: a validated [`Drawing`]
/// whose first `n` vertices are the input points, plus exact positions of
/// all planarization vertices.
pub struct Planarized {
    pub drawing: Drawing,
    pub positions: Vec<RPt>,
}

/// Planarizes the straight-line drawing given by `points` and `edges`.
///
/// Vertices `0..points.len()` of the result are the input points in order;
/// crossing vertices follow in deterministic order.
pub fn planarize(points: &[Pt], edges: &[(u32, u32)]) -> Result<Planarized, GeomError> {
    let n = points.len();
    if edges.is_empty() {
        return Err(GeomError::NoEdges);
    }
    for (i, p) in points.iter().enumerate() {
        if p.x.abs() > MAX_COORD || p.y.abs() > MAX_COORD {
            return Err(GeomError::CoordRange { index: i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                return Err(GeomError::DuplicatePoints { i, j });
            }
        }
    }
    let mut seen_pairs: HashMap<(u32, u32), usize> = HashMap::new();
    for (e, &(u, v)) in edges.iter().enumerate() {
        if u as usize >= n || v as usize >= n {
            return Err(GeomError::EdgeRange { e });
        }
        if u == v {
            return Err(GeomError::EdgeLoop { e });
        }
        let key = (u.min(v), u.max(v));
        if let Some(prev) = seen_pairs.insert(key, e) {
            return Err(GeomError::DuplicateEdges { e1: prev, e2: e });
        }
    }
    for p in 0..n {
        for (e, &(u, v)) in edges.iter().enumerate() {
            if p as u32 != u
                && p as u32 != v
                && point_inside_segment(points[p], points[u as usize], points[v as usize])
            {
                return Err(GeomError::VertexInsideSegment { point: p, e });
            }
        }
    }

    // Pairwise crossings; collinear overlaps and concurrent crossing points
    // are rejected.
    let m = edges.len();
    let mut crossings_on: Vec<Vec<(Rat, usize)>> = vec![Vec::new(); m]; // (param, crossing id)
    let mut cross_pts: Vec<RPt> = Vec::new();
    let mut cross_pairs: Vec<(usize, usize)> = Vec::new();
    let mut point_ids: HashMap<RPt, usize> = HashMap::new();
    for e1 in 0..m {
        let (a, b) = (points[edges[e1].0 as usize], points[edges[e1].1 as usize]);
        for e2 in e1 + 1..m {
            let (c, d) = (points[edges[e2].0 as usize], points[edges[e2].1 as usize]);
            let shared = edges[e1].0 == edges[e2].0
                || edges[e1].0 == edges[e2].1
                || edges[e1].1 == edges[e2].0
                || edges[e1].1 == edges[e2].1;
            if shared {
                // With a shared endpoint, the only way to intersect again is
                // a collinear overlap; the vertex-inside check above already
                // rejects strict containment, so only the equal-ray case is
                // left.
                let s = if edges[e1].0 == edges[e2].0 || edges[e1].0 == edges[e2].1 {
                    edges[e1].0
                } else {
                    edges[e1].1
                };
                let o1 = if edges[e1].0 == s { edges[e1].1 } else { edges[e1].0 };
                let o2 = if edges[e2].0 == s { edges[e2].1 } else { edges[e2].0 };
                let (sv, p1, p2) = (points[s as usize], points[o1 as usize], points[o2 as usize]);
                if collinear(sv, p1, p2) {
                    let dot = (p1.x as i128 - sv.x as i128) * (p2.x as i128 - sv.x as i128)
                        + (p1.y as i128 - sv.y as i128) * (p2.y as i128 - sv.y as i128);
                    if dot > 0 {
                        return Err(GeomError::CollinearOverlap { e1, e2 });
                    }
                }
                continue;
            }
            if orient(a, b, c) == 0 && orient(a, b, d) == 0 {
                // Fully collinear, disjoint-or-overlapping; overlap means
                // some endpoint is inside the other segment, which was
                // already rejected, except the exact-equality case handled
                // by the duplicate-edge check. Nothing to do.
                continue;
            }
            if properly_cross(a, b, c, d) {
                let (p, t1) = crossing_point(a, b, c, d);
                let (_, t2) = crossing_point(c, d, a, b);
                let id = match point_ids.get(&p) {
                    Some(&prev) => {
                        let (b1, b2) = cross_pairs[prev];
                        return Err(GeomError::ConcurrentCrossings { a1: e1, a2: e2, b1, b2 });
                    }
                    None => {
                        let id = cross_pts.len();
                        point_ids.insert(p.clone(), id);
                        cross_pts.push(p);
                        cross_pairs.push((e1, e2));
                        id
                    }
                };
                crossings_on[e1].push((t1, id));
                crossings_on[e2].push((t2, id));
            }
        }
    }

    // Graph connectivity equals drawing connectivity.
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        if uf[x] != x {
            let r = find(uf, uf[x]);
            uf[x] = r;
        }
        uf[x]
    }
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut uf, u as usize), find(&mut uf, v as usize));
        uf[ru] = rv;
    }
    let r0 = find(&mut uf, 0);
    for p in 1..n {
        if find(&mut uf, p) != r0 {
            return Err(GeomError::Disconnected);
        }
    }

    // Chains: per edge, the run of planarization vertices from tail to head.
    let n_cross = cross_pts.len();
    let total_vertices = n + n_cross;
    let mut positions: Vec<RPt> = points
        .iter()
        .map(|p| RPt { x: rat(p.x), y: rat(p.y) })
        .collect();
    positions.extend(cross_pts.iter().cloned());

    struct DartRec {
        head_from_tail: (u32, u32), // (tail vertex, head vertex)
        edge: EdgeId,
        dir: (i64, i64),
    }
    let mut darts: Vec<DartRec> = Vec::new();
    let mut twin: Vec<Dart> = Vec::new();
    for (e, &(u, v)) in edges.iter().enumerate() {
        let mut chain = vec![u as usize];
        crossings_on[e].sort();
        chain.extend(crossings_on[e].iter().map(|&(_, id)| n + id));
        chain.push(v as usize);
        let (a, b) = (points[u as usize], points[v as usize]);
        let fwd = (b.x - a.x, b.y - a.y);
        let bwd = (a.x - b.x, a.y - b.y);
        for w in chain.windows(2) {
            let d0 = darts.len() as u32;
            darts.push(DartRec {
                head_from_tail: (w[0] as u32, w[1] as u32),
                edge: e as EdgeId,
                dir: fwd,
            });
            darts.push(DartRec {
                head_from_tail: (w[1] as u32, w[0] as u32),
                edge: e as EdgeId,
                dir: bwd,
            });
            twin.push(d0 + 1);
            twin.push(d0);
        }
    }

    // Counterclockwise rotation at every vertex from exact angular order.
    let mut at_vertex: Vec<Vec<Dart>> = vec![Vec::new(); total_vertices];
    for (d, rec) in darts.iter().enumerate() {
        at_vertex[rec.head_from_tail.0 as usize].push(d as u32);
    }
    let mut rot: Vec<Dart> = vec![0; darts.len()];
    for list in at_vertex.iter_mut() {
        list.sort_by(|&d1, &d2| cmp_ccw(darts[d1 as usize].dir, darts[d2 as usize].dir));
        for (i, &d) in list.iter().enumerate() {
            rot[d as usize] = list[(i + 1) % list.len()];
        }
    }

    // Outer face: at the lexicographically smallest vertex all darts point
    // into the right half-plane; the face clockwise of the lowest-angle dart
    // is unbounded.
    let p_star = (0..total_vertices)
        .min_by(|&i, &j| {
            (positions[i].x.clone(), positions[i].y.clone())
                .cmp(&(positions[j].x.clone(), positions[j].y.clone()))
        })
        .unwrap();
    let outer_dart = *at_vertex[p_star]
        .first()
        .expect("connected drawing has darts everywhere");
    // at_vertex is sorted ccw starting from the comparator's global minimum,
    // which for right-half-plane vectors is the most clockwise one.
    let vertex_of: Vec<u32> = darts.iter().map(|r| r.head_from_tail.0).collect();
    let edge_of_dart: Vec<EdgeId> = darts.iter().map(|r| r.edge).collect();

    let map = CombinatorialMap::build(twin, rot, vertex_of, outer_dart)
        .map_err(|r| GeomError::Internal(r.to_string()))?;
    let mut roles = vec![VertexRole::Real; n];
    roles.extend(std::iter::repeat(VertexRole::Crossing).take(n_cross));
    let drawing = RawDrawing { map, roles, edge_of_dart }
        .validate()
        .map_err(|r| GeomError::Internal(r.to_string()))?;
    Ok(Planarized { drawing, positions })
}

/// Counterclockwise angular order of direction vectors, starting just above
/// the positive x-axis... more precisely: vectors with angle in (−π/2, π/2]
/// (the right half-plane including straight up) come first, ascending.
///
/// The exact starting ray only matters for determinism; callers rely on the
/// order being a strict circular order. For the outer-face rule the minimum
/// must lie in the right half-plane whenever all vectors do.
fn cmp_ccw(a: (i64, i64), b: (i64, i64)) -> std::cmp::Ordering {
    let half = |v: (i64, i64)| -> u8 {
        if v.0 > 0 || (v.0 == 0 && v.1 > 0) {
            0
        } else {
            1
        }
    };
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    let cross = a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128;
    // Within one half-plane, a precedes b iff b is counterclockwise of a.
    0i128.cmp(&cross)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64)]) -> Vec<Pt> {
        v.iter().map(|&(x, y)| Pt::new(x, y)).collect()
    }

    #[test]
    fn square_with_diagonals_has_one_crossing() {
        let p = pts(&[(0, 0), (4, 0), (4, 4), (0, 4)]);
        let e = vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)];
        let out = planarize(&p, &e).unwrap();
        assert_eq!(out.drawing.crossing_count(), 1);
        assert_eq!(out.drawing.map().vertex_count(), 5);
        assert_eq!(out.drawing.map().seg_count(), 8);
        assert_eq!(out.drawing.map().face_count(), 5);
        // Outer boundary walk has length 4.
        let outer = out.drawing.map().outer_face();
        assert_eq!(out.drawing.map().boundary_walk(outer).len(), 4);
    }

    #[test]
    fn concurrent_segments_are_rejected() {
        // Three segments through the origin.
        let p = pts(&[(-2, 0), (2, 0), (0, -2), (0, 2), (-2, -2), (2, 2)]);
        let e = vec![(0, 1), (2, 3), (4, 5)];
        assert!(matches!(
            planarize(&p, &e),
            Err(GeomError::ConcurrentCrossings { .. })
        ));
    }

    #[test]
    fn vertex_inside_segment_is_rejected() {
        let p = pts(&[(0, 0), (4, 0), (2, 0), (2, 2)]);
        let e = vec![(0, 1), (2, 3)];
        assert!(matches!(
            planarize(&p, &e),
            Err(GeomError::VertexInsideSegment { .. })
        ));
    }

    #[test]
    fn collinear_overlap_is_rejected() {
        let p = pts(&[(0, 0), (4, 0), (6, 0)]);
        // Shares endpoint 0... no: (0,1) and (0,2) share point 0 and overlap.
        let e = vec![(0, 1), (0, 2)];
        let r = planarize(&p, &e);
        assert!(
            matches!(r, Err(GeomError::CollinearOverlap { .. }))
                || matches!(r, Err(GeomError::VertexInsideSegment { .. }))
        );
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let p = pts(&[(0, 0), (1, 0), (5, 5), (6, 5)]);
        let e = vec![(0, 1), (2, 3)];
        assert!(matches!(planarize(&p, &e), Err(GeomError::Disconnected)));
    }

    #[test]
    fn crossing_count_matches_quadratic_oracle() {
        // A small fixed arrangement; oracle is the direct pairwise test.
        let p = pts(&[(0, 0), (10, 1), (1, 8), (9, 9), (0, 5), (10, 4), (5, -2), (4, 10)]);
        let e = vec![(0, 3), (1, 2), (4, 5), (6, 7), (0, 1), (2, 3), (1, 4), (5, 6)];
        let out = planarize(&p, &e).unwrap();
        let mut oracle = 0;
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let shared = e[i].0 == e[j].0 || e[i].0 == e[j].1 || e[i].1 == e[j].0 || e[i].1 == e[j].1;
                if !shared
                    && properly_cross(
                        p[e[i].0 as usize],
                        p[e[i].1 as usize],
                        p[e[j].0 as usize],
                        p[e[j].1 as usize],
                    )
                {
                    oracle += 1;
                }
            }
        }
        assert_eq!(out.drawing.crossing_count(), oracle);
    }
}
