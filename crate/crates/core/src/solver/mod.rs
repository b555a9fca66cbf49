//! Multi-edge insertion solver: budget-profile branching, preimage search on
//! the patchwork graph, assembly, and verification — plus the independent
//! brute-force oracle.

pub mod oracle;
pub mod preimage;
pub mod route;
pub mod templates;
pub mod verify;

use crate::instance::{InsertionInstance, Variant};
use crate::map::VertexId;
use crate::patchwork::{self, Patchwork, PwId, PwLabel, SegmentOrigin};
use preimage::{CapExceeded, Preimage, SearchBudget};
use route::{assemble, AccessRef, Event, ExtendedDrawing, Route, RouteCrossing, RoutePoint};
use serde::Serialize;
use std::ops::ControlFlow;
use verify::{verify, VerifyOutcome};

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Node-expansion limit for the preimage search.
    pub max_nodes: u64,
    /// Worker threads for profile evaluation; results are still selected in
    /// profile order.
    pub jobs: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_nodes: 10_000_000, jobs: 1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionEdge {
    pub s: VertexId,
    pub t: VertexId,
    pub crossings: Vec<Event>,
    pub start: AccessRef,
    pub end: AccessRef,
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub profile: Vec<u32>,
    pub edges: Vec<SolutionEdge>,
    pub existing_crossings: Vec<u32>,
    pub added_added_points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub enum Verdict {
    Feasible(Box<Solution>),
    Infeasible,
    CapExceeded { expanded: u64, profile: Vec<u32> },
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible(_))
    }

    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Verdict::Feasible(s) => Some(s),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Feasible(_) => 0,
            Verdict::Infeasible => 1,
            Verdict::CapExceeded { .. } => 2,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Pipeline(#[from] patchwork::PipelineError),
}

/// All exact crossing profiles, ascending by total then lexicographically.
/// The first feasible profile found is therefore minimal in the number of
/// crossings with existing edges.
pub fn enumerate_budget_profiles(budgets: &[u32], variant: Variant) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; budgets.len()];
    loop {
        let total: u32 = current.iter().sum();
        let within = match variant {
            Variant::Scei { total: cap } => total <= cap,
            _ => true,
        };
        if within {
            out.push(current.clone());
        }
        let mut pos = budgets.len();
        loop {
            if pos == 0 {
                out.sort_by(|a, b| {
                    let (sa, sb) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
                    sa.cmp(&sb).then_with(|| a.cmp(b))
                });
                return out;
            }
            pos -= 1;
            if current[pos] < budgets[pos] {
                current[pos] += 1;
                for c in current.iter_mut().skip(pos + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// Converts a preimage walk into a route: shadows give ring positions,
/// segment vertices give the existing-edge crossings.
pub fn walk_to_route(inst: &InsertionInstance, pw: &Patchwork, walk: &[PwId]) -> Route {
    let d = inst.drawing();
    let shadow_info = |sh: PwId| -> (PwId, PwId, u32) {
        let PwLabel::Shadow { anchor, cell, ring_pos } = pw.labels[sh as usize] else {
            panic!("walk position is not a shadow");
        };
        (anchor, cell, ring_pos)
    };
    let cell_face = |cell: PwId| -> u32 {
        let PwLabel::Cell { face } = pw.labels[cell as usize] else { panic!("not a cell") };
        face
    };
    let point = |sh: PwId| -> RoutePoint {
        let (anchor, cell, ring_pos) = shadow_info(sh);
        let anchor_id = match pw.labels[anchor as usize] {
            // Segment-vertex shadows anchor at the crossing point itself so
            // that the two sides of one crossing never interleave.
            PwLabel::Segment { .. } => anchor as u64,
            // Endpoint shadows anchor at the access direction.
            _ => sh as u64,
        };
        RoutePoint { cell: cell_face(cell), pos: ring_pos as u64, anchor: anchor_id }
    };
    let access = |sh: PwId| -> AccessRef {
        let (anchor, cell, ring_pos) = shadow_info(sh);
        let PwLabel::Real { vertex } = pw.labels[anchor as usize] else {
            panic!("access shadow must anchor at a real vertex");
        };
        AccessRef { vertex, cell: cell_face(cell), ring_pos }
    };

    let c = (walk.len() - 5) / 4;
    let mut crossings = Vec::with_capacity(c);
    let mut passages = Vec::with_capacity(c + 1);
    for p in 0..=c {
        let in_sh = walk[4 * p + 1];
        let out_sh = walk[4 * p + 3];
        passages.push((point(in_sh), point(out_sh)));
        if p < c {
            let seg_node = walk[4 * p + 4];
            let PwLabel::Segment { origin: SegmentOrigin::Drawing { seg, slot } } =
                pw.labels[seg_node as usize]
            else {
                panic!("walk crossing must be a drawing segment vertex");
            };
            crossings.push(RouteCrossing {
                edge: d.edge_of_seg(seg),
                seg,
                seg_index: d.seg_index(seg),
                slot,
            });
        }
    }
    Route { crossings, passages, start: access(walk[1]), end: access(walk[walk.len() - 2]) }
}

/// Runs the assembly procedure on a preimage (spec surface).
pub fn assemble_preimage(inst: &InsertionInstance, pw: &Patchwork, p: &Preimage) -> ExtendedDrawing {
    assemble(p.walks.iter().map(|w| walk_to_route(inst, pw, w)).collect())
}

/// Sound early rejection on a prefix of placed walks: every violation the
/// verifier can report only gets worse as more walks are added.
fn partial_ok(ext: &ExtendedDrawing, inst: &InsertionInstance, variant: Variant) -> bool {
    verify(ext, inst, variant).reasons.is_empty()
}

fn solution_from(
    ext: &ExtendedDrawing,
    inst: &InsertionInstance,
    profile: &[u32],
    out: &VerifyOutcome,
) -> Solution {
    let edges = (0..ext.routes.len())
        .map(|i| SolutionEdge {
            s: inst.added()[i].0,
            t: inst.added()[i].1,
            crossings: ext.events_of(i),
            start: ext.routes[i].start,
            end: ext.routes[i].end,
        })
        .collect();
    Solution {
        profile: profile.to_vec(),
        edges,
        existing_crossings: out.existing_per_edge.clone(),
        added_added_points: out.newnew_points,
    }
}

/// Evaluates one profile: first verified preimage wins.
fn try_profile(
    inst: &InsertionInstance,
    pw: &Patchwork,
    profile: &[u32],
    budget: &mut SearchBudget,
) -> Result<Option<Solution>, CapExceeded> {
    let variant = inst.variant();
    let enforce_same_edge = variant.requires_simple();
    let mut found: Option<Solution> = None;
    for_each_preimage_wrapper(inst, pw, profile, enforce_same_edge, budget, &mut found, variant)?;
    Ok(found)
}

fn for_each_preimage_wrapper(
    inst: &InsertionInstance,
    pw: &Patchwork,
    profile: &[u32],
    enforce_same_edge: bool,
    budget: &mut SearchBudget,
    found: &mut Option<Solution>,
    variant: Variant,
) -> Result<(), CapExceeded> {
    let _ = preimage::for_each_preimage(
        inst,
        pw,
        profile,
        enforce_same_edge,
        budget,
        &mut |walks| {
            let ext = assemble(walks.iter().map(|w| walk_to_route(inst, pw, w)).collect());
            partial_ok(&ext, inst, variant)
        },
        &mut |p| {
            let ext = assemble_preimage(inst, pw, p);
            let out = verify(&ext, inst, variant);
            if out.ok {
                *found = Some(solution_from(&ext, inst, profile, &out));
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    )?;
    Ok(())
}

/// Decides the instance and constructs a witness extension when feasible.
///
/// Profiles are evaluated in ascending order of total existing-edge
/// crossings; the first feasible profile is returned, so the witness is
/// crossing-minimal in that count. With `jobs > 1` profiles are evaluated
/// concurrently but selected strictly by profile order.
pub fn solve_with(inst: &InsertionInstance, opts: SolveOptions) -> Result<Verdict, SolveError> {
    let pipe = patchwork::pipeline(inst)?;
    let profiles = enumerate_budget_profiles(inst.budgets(), inst.variant());
    if opts.jobs <= 1 {
        let mut budget = SearchBudget::new(opts.max_nodes);
        for profile in &profiles {
            match try_profile(inst, &pipe.pw, profile, &mut budget) {
                Ok(Some(solution)) => return Ok(Verdict::Feasible(Box::new(solution))),
                Ok(None) => {}
                Err(cap) => {
                    return Ok(Verdict::CapExceeded {
                        expanded: cap.expanded,
                        profile: profile.clone(),
                    })
                }
            }
        }
        return Ok(Verdict::Infeasible);
    }
    // Parallel evaluation in chunks; each profile gets its own node budget.
    let mut results: Vec<Option<Result<Option<Solution>, CapExceeded>>> =
        (0..profiles.len()).map(|_| None).collect();
    let indices: Vec<usize> = (0..profiles.len()).collect();
    for chunk in indices.chunks(opts.jobs.max(1)) {
        let mut chunk_results: Vec<(usize, Result<Option<Solution>, CapExceeded>)> = Vec::new();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for &idx in chunk {
                let profile = profiles[idx].clone();
                let pw = &pipe.pw;
                handles.push((
                    idx,
                    scope.spawn(move || {
                        let mut budget = SearchBudget::new(opts.max_nodes);
                        try_profile(inst, pw, &profile, &mut budget)
                    }),
                ));
            }
            for (idx, h) in handles {
                chunk_results.push((idx, h.join().expect("profile worker panicked")));
            }
        });
        for (idx, r) in chunk_results {
            results[idx] = Some(r);
        }
        for &idx in chunk {
            match results[idx].take().unwrap() {
                Ok(Some(solution)) => return Ok(Verdict::Feasible(Box::new(solution))),
                Ok(None) => {}
                Err(cap) => {
                    return Ok(Verdict::CapExceeded {
                        expanded: cap.expanded,
                        profile: profiles[idx].clone(),
                    })
                }
            }
        }
    }
    Ok(Verdict::Infeasible)
}

pub fn solve(inst: &InsertionInstance) -> Result<Verdict, SolveError> {
    solve_with(inst, SolveOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::CoordJson;
    use crate::testgraphs;

    fn square_diag_instance(added: Vec<(u32, u32)>, budgets: Vec<u32>) -> InsertionInstance {
        let cj = CoordJson {
            points: vec![(0, 0), (4, 0), (4, 4), (0, 4)],
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
            added,
            budgets,
            variant: "slcei".into(),
            total: None,
            provenance: None,
        };
        crate::ingest::ingest_straightline(&cj).unwrap()
    }

    #[test]
    fn profiles_are_ascending() {
        let p = enumerate_budget_profiles(&[1, 1], Variant::Slcei);
        assert_eq!(p, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let p = enumerate_budget_profiles(&[2], Variant::Slcei);
        assert_eq!(p, vec![vec![0], vec![1], vec![2]]);
        let p = enumerate_budget_profiles(&[1, 1], Variant::Scei { total: 1 });
        assert_eq!(p, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn square_bd_inserts_without_crossings() {
        // Square with one diagonal; the other diagonal routes through the
        // outer cell with zero crossings.
        let inst = square_diag_instance(vec![(1, 3)], vec![1]);
        let v = solve(&inst).unwrap();
        let sol = v.solution().expect("feasible");
        assert_eq!(sol.profile, vec![0]);
    }

    #[test]
    fn zero_budget_no_shared_cell_is_infeasible() {
        let mut cj = testgraphs::nested_squares_coord(0);
        cj.added = vec![(1, 9)]; // outer corner to inner-square corner
        cj.budgets = vec![0];
        let inst = crate::ingest::ingest_straightline(&cj).unwrap();
        let v = solve(&inst).unwrap();
        assert!(matches!(v, Verdict::Infeasible));
    }

    #[test]
    fn both_diagonals_into_square() {
        let cj = CoordJson {
            points: vec![(0, 0), (4, 0), (4, 4), (0, 4)],
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
            added: vec![(0, 2), (1, 3)],
            budgets: vec![1, 1],
            variant: "slcei".into(),
            total: None,
            provenance: None,
        };
        let inst = crate::ingest::ingest_straightline(&cj).unwrap();
        let v = solve(&inst).unwrap();
        let sol = v.solution().expect("feasible");
        assert_eq!(sol.profile, vec![0, 0]);
    }

    #[test]
    fn torn_chord_instance_solves() {
        let inst = testgraphs::torn_chord_instance(2);
        let v = solve(&inst).unwrap();
        assert!(v.is_feasible(), "{v:?}");
    }

    #[test]
    fn cap_exceeded_is_reported() {
        let inst = testgraphs::torn_chord_instance(2);
        let v = solve_with(&inst, SolveOptions { max_nodes: 0, jobs: 1 }).unwrap();
        assert!(matches!(v, Verdict::CapExceeded { .. }));
    }

    #[test]
    fn parallel_jobs_agree_with_sequential() {
        let inst = testgraphs::torn_chord_instance(2);
        let a = solve(&inst).unwrap();
        let b = solve_with(&inst, SolveOptions { jobs: 4, ..Default::default() }).unwrap();
        assert_eq!(
            serde_json::to_string(&a.solution()).unwrap(),
            serde_json::to_string(&b.solution()).unwrap()
        );
    }
}
