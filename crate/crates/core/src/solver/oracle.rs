//! Brute-force oracle: exhaustive trace enumeration directly on the
//! cell/segment incidence structure of the planarization.
//!
//! Works on the full drawing with no holes, stitches, or crossable
//! filtering; shares only the assembly and verification machinery with the
//! main solver. Traces are placed edge by edge; each crossing additionally
//! chooses its rank among the crossings already placed on the same segment,
//! which enumerates all per-cell interleaving patterns. After each placed
//! walk the partial assembly is verified, pruning branches whose violations
//! could only persist.

use super::preimage::{CapExceeded, SearchBudget};
use super::route::{assemble, AccessRef, Route, RouteCrossing, RoutePoint};
use super::verify::verify;
use super::{enumerate_budget_profiles, solution_from, SolveOptions, Verdict};
use crate::drawing::Drawing;
use crate::instance::InsertionInstance;
use crate::map::{Dart, FaceId, SegId};
use std::collections::BTreeMap;
use std::ops::ControlFlow;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("oracle guard tripped: {reason}")]
    Guard { reason: String },
}

/// Position stride per boundary-walk slot; bounds the number of crossing
/// points on one segment.
const W: u64 = 4096;

#[derive(Debug, Clone, Copy)]
struct Corner {
    face: FaceId,
    walk_pos: u32,
}

#[derive(Debug, Clone)]
struct Trace {
    start: Corner,
    /// Per crossing: the dart occurrence crossed (face, position in walk).
    steps: Vec<(FaceId, u32)>,
    end: Option<Corner>,
}

struct OracleSearch<'a> {
    inst: &'a InsertionInstance,
    d: &'a Drawing,
    profile: &'a [u32],
    /// Per segment: crossing events in order along the edge direction.
    seg_events: BTreeMap<SegId, Vec<(usize, usize)>>,
    traces: Vec<Trace>,
    dart_pos: Vec<(FaceId, u32)>,
    budget: &'a mut SearchBudget,
    found: Option<super::Solution>,
}

pub fn brute_force_solve(inst: &InsertionInstance) -> Result<Verdict, OracleError> {
    brute_force_solve_with(inst, SolveOptions::default())
}

pub fn brute_force_solve_with(
    inst: &InsertionInstance,
    opts: SolveOptions,
) -> Result<Verdict, OracleError> {
    if inst.drawing().crossing_count() > 12 {
        return Err(OracleError::Guard {
            reason: format!("{} crossings exceed the guard of 12", inst.drawing().crossing_count()),
        });
    }
    if inst.k() > 3 {
        return Err(OracleError::Guard { reason: format!("k = {} exceeds 3", inst.k()) });
    }
    if inst.max_budget() > 3 {
        return Err(OracleError::Guard { reason: format!("budget {} exceeds 3", inst.max_budget()) });
    }

    let d = inst.drawing();
    let map = d.map();
    let mut dart_pos = vec![(0u32, 0u32); map.dart_count()];
    for f in 0..map.face_count() as u32 {
        for (j, &dart) in map.faces()[f as usize].iter().enumerate() {
            dart_pos[dart as usize] = (f, j as u32);
        }
    }

    let mut budget = SearchBudget::new(opts.max_nodes);
    for profile in enumerate_budget_profiles(inst.budgets(), inst.variant()) {
        let mut search = OracleSearch {
            inst,
            d,
            profile: &profile,
            seg_events: BTreeMap::new(),
            traces: Vec::new(),
            dart_pos: dart_pos.clone(),
            budget: &mut budget,
            found: None,
        };
        match search.place_edge(0) {
            Ok(_) => {
                if let Some(solution) = search.found {
                    return Ok(Verdict::Feasible(Box::new(solution)));
                }
            }
            Err(cap) => return Ok(Verdict::CapExceeded { expanded: cap.expanded, profile }),
        }
    }
    Ok(Verdict::Infeasible)
}

impl<'a> OracleSearch<'a> {
    fn corners_of(&self, v: u32) -> Vec<Corner> {
        let map = self.d.map();
        let mut out = Vec::new();
        for f in 0..map.face_count() as u32 {
            for (j, &dart) in map.faces()[f as usize].iter().enumerate() {
                if map.head(dart) == v {
                    out.push(Corner { face: f, walk_pos: j as u32 });
                }
            }
        }
        out
    }

    fn place_edge(&mut self, i: usize) -> Result<ControlFlow<()>, CapExceeded> {
        if i == self.inst.k() {
            let ext = assemble(self.build_routes());
            let out = verify(&ext, self.inst, self.inst.variant());
            if out.ok {
                self.found = Some(solution_from(&ext, self.inst, self.profile, &out));
                return Ok(ControlFlow::Break(()));
            }
            return Ok(ControlFlow::Continue(()));
        }
        let (s, _) = self.inst.added()[i];
        for corner in self.corners_of(s) {
            self.traces.push(Trace { start: corner, steps: Vec::new(), end: None });
            let flow = self.step(i, corner.face, 0)?;
            self.traces.pop();
            if flow.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    fn step(&mut self, i: usize, face: FaceId, used: u32) -> Result<ControlFlow<()>, CapExceeded> {
        self.budget.tick()?;
        let map = self.d.map();
        if used == self.profile[i] {
            let (_, t) = self.inst.added()[i];
            for corner in self.corners_of(t) {
                if corner.face != face {
                    continue;
                }
                self.traces[i].end = Some(corner);
                // Partial verification over the placed prefix.
                let ext = assemble(self.build_routes());
                let ok = verify(&ext, self.inst, self.inst.variant()).reasons.is_empty();
                let flow = if ok { self.place_edge(i + 1)? } else { ControlFlow::Continue(()) };
                self.traces[i].end = None;
                if flow.is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            }
            return Ok(ControlFlow::Continue(()));
        }
        let simple = self.inst.variant().requires_simple();
        let (s_i, t_i) = self.inst.added()[i];
        let walk: Vec<Dart> = map.faces()[face as usize].to_vec();
        for (j, &dart) in walk.iter().enumerate() {
            let seg = map.seg_of(dart);
            let edge = self.d.edge_of_seg(seg);
            if simple {
                let crossed_before = self.traces[i].steps.iter().any(|&(f2, j2)| {
                    let d2 = map.faces()[f2 as usize][j2 as usize];
                    self.d.edge_of_seg(map.seg_of(d2)) == edge
                });
                if crossed_before {
                    continue;
                }
                let (a, b) = self.d.edge_endpoints(edge);
                if a == s_i || a == t_i || b == s_i || b == t_i {
                    continue;
                }
            }
            let next_face = map.face_of(map.twin(dart));
            let step_idx = self.traces[i].steps.len();
            let slots = self.seg_events.get(&seg).map(|v| v.len()).unwrap_or(0);
            for rank in 0..=slots {
                self.seg_events.entry(seg).or_default().insert(rank, (i, step_idx));
                self.traces[i].steps.push((face, j as u32));
                let flow = self.step(i, next_face, used + 1)?;
                self.traces[i].steps.pop();
                let events = self.seg_events.get_mut(&seg).unwrap();
                events.remove(rank);
                if events.is_empty() {
                    self.seg_events.remove(&seg);
                }
                if flow.is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Builds routes for all placed traces against the current segment
    /// event orders.
    fn build_routes(&self) -> Vec<Route> {
        let map = self.d.map();
        let mut routes = Vec::new();
        for (i, trace) in self.traces.iter().enumerate() {
            let corner_point = |c: Corner| -> RoutePoint {
                RoutePoint {
                    cell: c.face,
                    pos: c.walk_pos as u64 * W + (W - 1),
                    anchor: (1 << 62) | ((c.face as u64) << 24) | c.walk_pos as u64,
                }
            };
            let corner_access = |c: Corner| -> AccessRef {
                let dart = map.faces()[c.face as usize][c.walk_pos as usize];
                AccessRef { vertex: map.head(dart), cell: c.face, ring_pos: c.walk_pos }
            };
            let mut passages = Vec::new();
            let mut crossings = Vec::new();
            let mut current_in = corner_point(trace.start);
            for (step_idx, &(f, j)) in trace.steps.iter().enumerate() {
                let dart = map.faces()[f as usize][j as usize];
                let seg = map.seg_of(dart);
                let events = &self.seg_events[&seg];
                let rank = events.iter().position(|&e| e == (i, step_idx)).expect("event present");
                let forward = self.d.edge_seq(self.d.edge_of_dart(dart)).contains(&dart);
                let sub = if forward { rank } else { events.len() - 1 - rank };
                let exit = RoutePoint {
                    cell: f,
                    pos: j as u64 * W + sub as u64,
                    anchor: ((seg as u64) << 16) | rank as u64,
                };
                passages.push((current_in, exit));
                let twin = map.twin(dart);
                let (f2, j2) = self.dart_pos[twin as usize];
                let forward2 = self.d.edge_seq(self.d.edge_of_dart(twin)).contains(&twin);
                let sub2 = if forward2 { rank } else { events.len() - 1 - rank };
                current_in = RoutePoint {
                    cell: f2,
                    pos: j2 as u64 * W + sub2 as u64,
                    anchor: ((seg as u64) << 16) | rank as u64,
                };
                crossings.push(RouteCrossing {
                    edge: self.d.edge_of_seg(seg),
                    seg,
                    seg_index: self.d.seg_index(seg),
                    slot: rank as u32,
                });
            }
            let end_corner = trace.end.unwrap_or(trace.start);
            passages.push((current_in, corner_point(end_corner)));
            routes.push(Route {
                crossings,
                passages,
                start: corner_access(trace.start),
                end: corner_access(end_corner),
            });
        }
        routes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::CoordJson;
    use crate::testgraphs;

    fn ingest(cj: &CoordJson) -> InsertionInstance {
        crate::ingest::ingest_straightline(cj).unwrap()
    }

    #[test]
    fn triangle_with_pendant_inserts_freely() {
        // Triangle plus an inner pendant vertex; the missing adjacency can
        // be drawn with zero crossings inside the triangle.
        let cj = CoordJson {
            points: vec![(0, 0), (8, 0), (4, 7), (4, 3)],
            edges: vec![(0, 1), (1, 2), (2, 0), (0, 3)],
            added: vec![(3, 1)],
            budgets: vec![0],
            variant: "slcei".into(),
            total: None,
            provenance: None,
        };
        let inst = ingest(&cj);
        let v = brute_force_solve(&inst).unwrap();
        let sol = v.solution().expect("feasible with 0 crossings");
        assert_eq!(sol.profile, vec![0]);
    }

    #[test]
    fn oracle_agrees_with_solver_on_square_diagonals() {
        let cj = CoordJson {
            points: vec![(0, 0), (4, 0), (4, 4), (0, 4)],
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
            added: vec![(0, 2), (1, 3)],
            budgets: vec![1, 1],
            variant: "slcei".into(),
            total: None,
            provenance: None,
        };
        let inst = ingest(&cj);
        let a = super::super::solve(&inst).unwrap();
        let b = brute_force_solve(&inst).unwrap();
        assert!(a.is_feasible() && b.is_feasible());
        let (sa, sb) = (a.solution().unwrap(), b.solution().unwrap());
        assert_eq!(sa.profile.iter().sum::<u32>(), sb.profile.iter().sum::<u32>());
    }

    #[test]
    fn guard_trips_on_large_budget() {
        let inst = testgraphs::nested_squares_instance(4);
        assert!(matches!(brute_force_solve(&inst), Err(OracleError::Guard { .. })));
    }

    #[test]
    fn infeasible_zero_budget_case() {
        let mut cj = testgraphs::nested_squares_coord(0);
        cj.added = vec![(1, 9)];
        cj.budgets = vec![0];
        let inst = ingest(&cj);
        let v = brute_force_solve(&inst).unwrap();
        assert!(matches!(v, Verdict::Infeasible));
    }
}
