//! Dual of the planarization, far cells, holes, and torn edge parts.
//!
//! A cell is far for an added edge when its dual distance to the cells
//! around either endpoint exceeds that edge's budget; no drawing of the edge
//! within budget can ever reach such a cell. Cells far for *every* added
//! edge clump into holes, and removing a hole's interior tears edges that
//! run through it into parts.

use crate::drawing::Drawing;
use crate::instance::InsertionInstance;
use crate::map::{EdgeId, FaceId, SegId, VertexId};
use serde::Serialize;

/// Dual graph of the planarization: one vertex per cell, one link per edge
/// segment (parallel links kept), plus the `U_v` incidence sets.
#[derive(Debug, Clone)]
pub struct DualGraph {
    pub cell_count: usize,
    /// Per cell: (neighbor cell, crossed segment), one entry per segment.
    pub adj: Vec<Vec<(FaceId, SegId)>>,
    /// One link per segment: (side, other side, segment).
    pub links: Vec<(FaceId, FaceId, SegId)>,
    /// Per vertex: cells whose boundary contains it (sorted, deduplicated).
    pub u_sets: Vec<Vec<FaceId>>,
}

/// Both side cells of a segment (equal for bridges).
pub fn seg_sides(d: &Drawing, s: SegId) -> (FaceId, FaceId) {
    let dart = d.map().seg_dart(s);
    (d.map().face_of(dart), d.map().face_of(d.map().twin(dart)))
}

pub fn build_dual(d: &Drawing) -> DualGraph {
    let cells = d.map().face_count();
    let mut adj: Vec<Vec<(FaceId, SegId)>> = vec![Vec::new(); cells];
    let mut links = Vec::with_capacity(d.map().seg_count());
    for s in 0..d.map().seg_count() as u32 {
        let (a, b) = seg_sides(d, s);
        links.push((a, b, s));
        adj[a as usize].push((b, s));
        if b != a {
            adj[b as usize].push((a, s));
        }
    }
    let mut u_sets: Vec<Vec<FaceId>> = Vec::with_capacity(d.map().vertex_count());
    for v in 0..d.map().vertex_count() as u32 {
        u_sets.push(d.faces_at(v));
    }
    DualGraph { cell_count: cells, adj, links, u_sets }
}

/// Multi-source BFS distances in the dual; `usize::MAX` marks unreachable.
fn dual_distances(dual: &DualGraph, sources: &[FaceId]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; dual.cell_count];
    let mut queue = std::collections::VecDeque::new();
    for &s in sources {
        if dist[s as usize] == usize::MAX {
            dist[s as usize] = 0;
            queue.push_back(s);
        }
    }
    while let Some(c) = queue.pop_front() {
        for &(nb, _) in &dual.adj[c as usize] {
            if dist[nb as usize] == usize::MAX {
                dist[nb as usize] = dist[c as usize] + 1;
                queue.push_back(nb);
            }
        }
    }
    dist
}

/// Cells far for added edge `i`: dual distance to `U_{s_i}` or to `U_{t_i}`
/// exceeds the edge's budget.
pub fn far_cells(inst: &InsertionInstance, dual: &DualGraph, i: usize) -> Vec<bool> {
    let (s, t) = inst.added()[i];
    let l = inst.budget(i) as usize;
    let ds = dual_distances(dual, &dual.u_sets[s as usize]);
    let dt = dual_distances(dual, &dual.u_sets[t as usize]);
    (0..dual.cell_count).map(|c| ds[c] > l || dt[c] > l).collect()
}

/// One maximal union of globally far cells with connected interior.
///
/// Interior connectivity is realized as connectivity in the dual restricted
/// to far cells (cells glued along shared segments); cells meeting only in a
/// point are not merged, and indeed cannot be: if every cell around a vertex
/// is far they are already glued pairwise by the segments at that vertex.
#[derive(Debug, Clone)]
pub struct Hole {
    pub cells: Vec<FaceId>,
}

/// A maximal run of segments of one edge outside a hole's interior, as an
/// inclusive index range into the edge's segment sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartRange {
    pub first: u32,
    pub last: u32,
    /// The part's tail/head end abuts the hole (a deleted segment follows).
    pub hole_start: bool,
    pub hole_end: bool,
}

#[derive(Debug, Clone)]
pub struct EdgeParts {
    pub edge: EdgeId,
    pub parts: Vec<PartRange>,
}

#[derive(Debug, Clone)]
pub struct HoleDecomposition {
    pub far_per_edge: Vec<Vec<bool>>,
    pub far_all: Vec<bool>,
    pub holes: Vec<Hole>,
    /// Per cell: hole id if the cell is far.
    pub hole_of_cell: Vec<Option<u32>>,
    /// Per segment: hole id if the segment lies in that hole's interior
    /// (both sides far).
    pub seg_interior: Vec<Option<u32>>,
    /// Per vertex: true when some incident cell is kept.
    pub vertex_kept: Vec<bool>,
    /// Per hole: torn edges (≥ 2 parts), ascending by edge id.
    pub torn: Vec<Vec<EdgeParts>>,
    /// Per hole: edges entirely inside the hole (0 parts).
    pub swallowed: Vec<Vec<EdgeId>>,
}

impl HoleDecomposition {
    pub fn seg_kept(&self, s: SegId) -> bool {
        self.seg_interior[s as usize].is_none()
    }

    pub fn cell_kept(&self, c: FaceId) -> bool {
        !self.far_all[c as usize]
    }

    pub fn vertex_kept(&self, v: VertexId) -> bool {
        self.vertex_kept[v as usize]
    }

    /// Parts of `edge` w.r.t. hole `h`, even when not torn (one part) —
    /// `None` if the edge is swallowed by `h`.
    pub fn parts_of(&self, d: &Drawing, h: u32, edge: EdgeId) -> Option<Vec<PartRange>> {
        parts_along(d, &self.seg_interior, h, edge)
    }
}

fn parts_along(
    d: &Drawing,
    seg_interior: &[Option<u32>],
    h: u32,
    edge: EdgeId,
) -> Option<Vec<PartRange>> {
    let seq = d.edge_seq(edge);
    let mut parts: Vec<PartRange> = Vec::new();
    let mut run_start: Option<u32> = None;
    for (idx, &dart) in seq.iter().enumerate() {
        let s = d.map().seg_of(dart);
        let inside = seg_interior[s as usize] == Some(h);
        if inside {
            if let Some(st) = run_start.take() {
                parts.push(PartRange { first: st, last: idx as u32 - 1, hole_start: st > 0, hole_end: true });
            }
        } else if run_start.is_none() {
            run_start = Some(idx as u32);
        }
    }
    if let Some(st) = run_start {
        parts.push(PartRange {
            first: st,
            last: seq.len() as u32 - 1,
            hole_start: st > 0,
            hole_end: false,
        });
    }
    // hole_start of the first part is false only when it begins at the real
    // endpoint; parts after an interior run always start at the hole.
    if parts.is_empty() {
        None
    } else {
        Some(parts)
    }
}

pub fn holes(inst: &InsertionInstance, dual: &DualGraph) -> HoleDecomposition {
    let d = inst.drawing();
    let k = inst.k();
    let far_per_edge: Vec<Vec<bool>> = (0..k).map(|i| far_cells(inst, dual, i)).collect();
    // No added edges: nothing is far (the all-i quantifier is vacuous, but a
    // drawing without insertions has no reason to lose any cells).
    let far_all: Vec<bool> = (0..dual.cell_count)
        .map(|c| k > 0 && far_per_edge.iter().all(|f| f[c]))
        .collect();

    let mut hole_of_cell: Vec<Option<u32>> = vec![None; dual.cell_count];
    let mut holes: Vec<Hole> = Vec::new();
    for c0 in 0..dual.cell_count {
        if !far_all[c0] || hole_of_cell[c0].is_some() {
            continue;
        }
        let id = holes.len() as u32;
        let mut cells = Vec::new();
        let mut stack = vec![c0 as FaceId];
        hole_of_cell[c0] = Some(id);
        while let Some(c) = stack.pop() {
            cells.push(c);
            for &(nb, _) in &dual.adj[c as usize] {
                if far_all[nb as usize] && hole_of_cell[nb as usize].is_none() {
                    hole_of_cell[nb as usize] = Some(id);
                    stack.push(nb);
                }
            }
        }
        cells.sort_unstable();
        holes.push(Hole { cells });
    }

    let mut seg_interior: Vec<Option<u32>> = vec![None; d.map().seg_count()];
    for s in 0..d.map().seg_count() as u32 {
        let (a, b) = seg_sides(d, s);
        if far_all[a as usize] && far_all[b as usize] {
            debug_assert_eq!(hole_of_cell[a as usize], hole_of_cell[b as usize]);
            seg_interior[s as usize] = hole_of_cell[a as usize];
        }
    }
    let vertex_kept: Vec<bool> = (0..d.map().vertex_count() as u32)
        .map(|v| d.faces_at(v).iter().any(|&c| !far_all[c as usize]))
        .collect();

    let mut torn: Vec<Vec<EdgeParts>> = vec![Vec::new(); holes.len()];
    let mut swallowed: Vec<Vec<EdgeId>> = vec![Vec::new(); holes.len()];
    for h in 0..holes.len() as u32 {
        for e in 0..d.edge_count() as u32 {
            match parts_along(d, &seg_interior, h, e) {
                None => swallowed[h as usize].push(e),
                Some(parts) => {
                    if parts.len() >= 2 {
                        // Every part of a torn edge must touch the hole.
                        debug_assert!(parts.iter().all(|p| p.hole_start || p.hole_end));
                        torn[h as usize].push(EdgeParts { edge: e, parts });
                    }
                }
            }
        }
    }

    HoleDecomposition {
        far_per_edge,
        far_all,
        holes,
        hole_of_cell,
        seg_interior,
        vertex_kept,
        torn,
        swallowed,
    }
}

/// Summary emitted by `sdx holes --report`.
#[derive(Debug, Serialize)]
pub struct HoleReport {
    pub cells: usize,
    pub far_cells_per_edge: Vec<usize>,
    pub hole_count: usize,
    pub holes: Vec<HoleStat>,
}

#[derive(Debug, Serialize)]
pub struct HoleStat {
    pub cells: usize,
    pub torn_edges: usize,
    pub max_parts: usize,
    pub swallowed_edges: usize,
}

pub fn hole_report(dec: &HoleDecomposition, dual: &DualGraph) -> HoleReport {
    HoleReport {
        cells: dual.cell_count,
        far_cells_per_edge: dec.far_per_edge.iter().map(|f| f.iter().filter(|&&x| x).count()).collect(),
        hole_count: dec.holes.len(),
        holes: dec
            .holes
            .iter()
            .enumerate()
            .map(|(h, hole)| HoleStat {
                cells: hole.cells.len(),
                torn_edges: dec.torn[h].len(),
                max_parts: dec.torn[h].iter().map(|t| t.parts.len()).max().unwrap_or(0),
                swallowed_edges: dec.swallowed[h].len(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{InsertionInstance, Variant};
    use crate::testgraphs;

    #[test]
    fn triangle_dual_has_two_cells_three_parallel_links() {
        let d = testgraphs::triangle_drawing();
        let dual = build_dual(&d);
        assert_eq!(dual.cell_count, 2);
        assert_eq!(dual.links.len(), 3);
        assert!(dual.links.iter().all(|&(a, b, _)| a != b));
        assert_eq!(dual.adj[0].len(), 3);
    }

    #[test]
    fn single_edge_dual_is_one_cell_with_self_link() {
        let map = crate::map::CombinatorialMap::build(vec![1, 0], vec![0, 1], vec![0, 1], 0).unwrap();
        let d = crate::drawing::RawDrawing {
            map,
            roles: vec![crate::map::VertexRole::Real; 2],
            edge_of_dart: vec![0, 0],
        }
        .validate()
        .unwrap();
        let dual = build_dual(&d);
        assert_eq!(dual.cell_count, 1);
        assert_eq!(dual.links.len(), 1);
        assert_eq!(dual.links[0].0, dual.links[0].1);
    }

    #[test]
    fn k4_dual_counts_and_u_sets() {
        let d = testgraphs::k4_convex_drawing();
        let dual = build_dual(&d);
        assert_eq!(dual.cell_count, 5);
        assert_eq!(dual.links.len(), 8);
        for hull in 0..4u32 {
            assert_eq!(dual.u_sets[hull as usize].len(), 3, "hull vertex {hull}");
        }
    }

    #[test]
    fn generous_budget_has_no_far_cells() {
        let inst = testgraphs::nested_squares_instance(10);
        let dual = build_dual(inst.drawing());
        let far = far_cells(&inst, &dual, 0);
        assert!(far.iter().all(|&f| !f));
    }

    #[test]
    fn endpoint_cells_are_never_far() {
        let inst = testgraphs::nested_squares_instance(1);
        let dual = build_dual(inst.drawing());
        for i in 0..inst.k() {
            let far = far_cells(&inst, &dual, i);
            let (s, t) = inst.added()[i];
            for &c in dual.u_sets[s as usize].iter().chain(dual.u_sets[t as usize].iter()) {
                assert!(!far[c as usize]);
            }
        }
    }

    #[test]
    fn nested_squares_innermost_cell_is_far_and_forms_a_hole() {
        let inst = testgraphs::nested_squares_instance(1);
        let dual = build_dual(inst.drawing());
        let dec = holes(&inst, &dual);
        // Independent BFS oracle: recompute far cells by brute-force
        // all-pairs distances.
        let far = far_cells(&inst, &dual, 0);
        let inner = testgraphs::nested_squares_innermost_cell(&inst);
        assert!(far[inner as usize], "innermost cell must be far at budget 1");
        assert_eq!(dec.holes.len(), 1);
        assert!(dec.holes[0].cells.contains(&inner));
    }

    #[test]
    fn plane_drawing_with_near_cells_has_no_holes() {
        let d = testgraphs::triangle_drawing();
        let inst = InsertionInstance::new(d, vec![], vec![], Variant::Slcei).unwrap();
        let dual = build_dual(inst.drawing());
        let dec = holes(&inst, &dual);
        assert!(dec.holes.is_empty());
        assert!(dec.torn.is_empty());
    }

    #[test]
    fn monotone_in_budget() {
        for l in 0..3u32 {
            let a = testgraphs::nested_squares_instance(l);
            let b = testgraphs::nested_squares_instance(l + 1);
            let dual = build_dual(a.drawing());
            let fa = far_cells(&a, &dual, 0);
            let fb = far_cells(&b, &dual, 0);
            for c in 0..dual.cell_count {
                assert!(!fb[c] || fa[c], "raising the budget must not enlarge far cells");
            }
        }
    }
}
