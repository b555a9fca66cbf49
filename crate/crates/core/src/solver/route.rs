//! Common route representation for assembled insertions.
//!
//! Both the patchwork preimage search and the brute-force oracle reduce
//! their candidates to `Route`s: per added edge, the ordered crossings with
//! existing segments plus, for every cell passage, the cyclic positions of
//! its two endpoints on that cell's boundary. Assembly then declares a
//! crossing between two passages of different curves exactly when their
//! endpoint positions interleave and no endpoint is shared; interleaving
//! passages of one curve mark a forced self-crossing instead.

use crate::map::{EdgeId, SegId, VertexId};
use serde::Serialize;

/// A passage endpoint on a cell boundary. `pos` orders all endpoints of one
/// cell cyclically; `anchor` identifies the underlying access point so that
/// passages meeting in one point are never declared crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutePoint {
    pub cell: u32,
    pub pos: u64,
    pub anchor: u64,
}

/// One crossing of an added edge with an existing segment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RouteCrossing {
    pub edge: EdgeId,
    pub seg: SegId,
    /// Index of the segment along its edge.
    pub seg_index: u32,
    /// Crossing position along the segment (subdivision slot).
    pub slot: u32,
}

/// Access description at a route's endpoint, serializable for reports.
#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct AccessRef {
    pub vertex: VertexId,
    pub cell: u32,
    pub ring_pos: u32,
}

#[derive(Debug, Clone)]
pub struct Route {
    /// Existing-edge crossings in curve order; `passages.len() ==
    /// crossings.len() + 1`.
    pub crossings: Vec<RouteCrossing>,
    /// Per cell passage: its two boundary endpoints in curve order.
    pub passages: Vec<(RoutePoint, RoutePoint)>,
    pub start: AccessRef,
    pub end: AccessRef,
}

/// Is `x` strictly inside the cyclic open interval (a, b)?
fn in_open_arc(a: u64, b: u64, x: u64) -> bool {
    if a < b {
        a < x && x < b
    } else {
        x > a || x < b
    }
}

/// Do the endpoint pairs interleave on the cell boundary circle?
pub fn passages_interleave(p: (RoutePoint, RoutePoint), q: (RoutePoint, RoutePoint)) -> bool {
    debug_assert_eq!(p.0.cell, q.0.cell);
    let anchors = [p.0.anchor, p.1.anchor, q.0.anchor, q.1.anchor];
    if anchors[0] == anchors[2]
        || anchors[0] == anchors[3]
        || anchors[1] == anchors[2]
        || anchors[1] == anchors[3]
    {
        return false;
    }
    in_open_arc(p.0.pos, p.1.pos, q.0.pos) != in_open_arc(p.0.pos, p.1.pos, q.1.pos)
}

/// A declared crossing between two added edges inside one cell.
#[derive(Debug, Clone, Copy)]
pub struct NewNewCrossing {
    pub i: usize,
    pub j: usize,
    pub cell: u32,
    pub passage_i: usize,
    pub passage_j: usize,
    /// Position of j's endpoint inside i's passage arc; orders the events
    /// along curve i's passage, and vice versa.
    pub along_i: u64,
    pub along_j: u64,
}

/// The assembled combinatorial extension, ready for verification.
#[derive(Debug, Clone, Default)]
pub struct ExtendedDrawing {
    pub routes: Vec<Route>,
    pub newnew: Vec<NewNewCrossing>,
    /// (curve, cell) pairs whose own passages interleave: a forced
    /// self-crossing.
    pub self_interleave: Vec<(usize, u32)>,
}

/// Runs the assembly procedure on a full set of routes: pairwise passage
/// interleaving inside every shared cell.
pub fn assemble(routes: Vec<Route>) -> ExtendedDrawing {
    let mut out = ExtendedDrawing { routes, ..Default::default() };
    let n = out.routes.len();
    for i in 0..n {
        for pi in 0..out.routes[i].passages.len() {
            let p = out.routes[i].passages[pi];
            // Self-interleaving among later passages of the same curve.
            for pj in pi + 1..out.routes[i].passages.len() {
                let q = out.routes[i].passages[pj];
                if p.0.cell == q.0.cell && passages_interleave(p, q) {
                    out.self_interleave.push((i, p.0.cell));
                }
            }
            for j in i + 1..n {
                for pj in 0..out.routes[j].passages.len() {
                    let q = out.routes[j].passages[pj];
                    if p.0.cell == q.0.cell && passages_interleave(p, q) {
                        let along_i = if in_open_arc(p.0.pos, p.1.pos, q.0.pos) {
                            q.0.pos
                        } else {
                            q.1.pos
                        };
                        let along_j = if in_open_arc(q.0.pos, q.1.pos, p.0.pos) {
                            p.0.pos
                        } else {
                            p.1.pos
                        };
                        out.newnew.push(NewNewCrossing {
                            i,
                            j,
                            cell: p.0.cell,
                            passage_i: pi,
                            passage_j: pj,
                            along_i,
                            along_j,
                        });
                    }
                }
            }
        }
    }
    out
}

impl ExtendedDrawing {
    /// Crossing events of curve `i` in curve order: existing crossings at
    /// passage boundaries, added-edge crossings ordered inside each passage
    /// by position along the passage arc.
    pub fn events_of(&self, i: usize) -> Vec<Event> {
        let route = &self.routes[i];
        let mut events = Vec::new();
        for p in 0..route.passages.len() {
            let mut inside: Vec<(u64, usize)> = self
                .newnew
                .iter()
                .filter(|c| (c.i == i && c.passage_i == p) || (c.j == i && c.passage_j == p))
                .map(|c| {
                    let other = if c.i == i { c.j } else { c.i };
                    let along = if c.i == i { c.along_i } else { c.along_j };
                    (along, other)
                })
                .collect();
            let (a, b) = (route.passages[p].0.pos, route.passages[p].1.pos);
            inside.sort_by_key(|&(pos, other)| (arc_offset(a, b, pos), other));
            for (_, other) in inside {
                events.push(Event::Added { other });
            }
            if p < route.crossings.len() {
                events.push(Event::Existing(route.crossings[p]));
            }
        }
        events
    }
}

fn arc_offset(a: u64, _b: u64, x: u64) -> u64 {
    x.wrapping_sub(a)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub enum Event {
    Existing(RouteCrossing),
    Added { other: usize },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(cell: u32, pos: u64) -> RoutePoint {
        RoutePoint { cell, pos, anchor: 1000 + pos }
    }

    #[test]
    fn interleaving_passages_cross() {
        // Cyclic order p1, q1, p2, q2.
        let p = (pt(0, 1), pt(0, 3));
        let q = (pt(0, 2), pt(0, 4));
        assert!(passages_interleave(p, q));
    }

    #[test]
    fn nested_passages_do_not_cross() {
        // Cyclic order p1, p2, q1, q2.
        let p = (pt(0, 1), pt(0, 2));
        let q = (pt(0, 3), pt(0, 4));
        assert!(!passages_interleave(p, q));
    }

    #[test]
    fn shared_anchor_suppresses_crossing() {
        let shared = RoutePoint { cell: 0, pos: 1, anchor: 7 };
        let shared2 = RoutePoint { cell: 0, pos: 2, anchor: 7 };
        let p = (shared, pt(0, 3));
        let q = (shared2, pt(0, 4));
        assert!(!passages_interleave(p, q));
    }

    #[test]
    fn three_pairwise_interleaved_passages_give_three_crossings() {
        // Positions p: (0, 3), q: (1, 4), r: (2, 5) — pairwise interleaving.
        let mk = |a: u64, b: u64| Route {
            crossings: vec![],
            passages: vec![(pt(0, a), pt(0, b))],
            start: AccessRef { vertex: 0, cell: 0, ring_pos: 0 },
            end: AccessRef { vertex: 1, cell: 0, ring_pos: 0 },
        };
        let ext = assemble(vec![mk(0, 3), mk(1, 4), mk(2, 5)]);
        assert_eq!(ext.newnew.len(), 3);
        assert!(ext.self_interleave.is_empty());
    }
}
