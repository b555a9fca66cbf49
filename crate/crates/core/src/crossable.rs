//! The combined primal-dual graph of the holed planarization, the
//! solution-curve walk search over it, and the crossable-part bound.
//!
//! Solution curves for an added edge are simple curves within that edge's
//! crossing budget whose cell revisits are each justified by an avoided
//! endpoint of some other added edge. A part of a torn edge is crossable
//! when some solution curve crosses one of its segments. The search is a
//! plain depth-first enumeration of alternating face/edge-vertex walks with
//! two pruning filters: a forced-self-crossing test (interleaving around a
//! face) and the revisit-justification test (separation from the outer face
//! vertex). Memoization is deliberately absent; the justification condition
//! is history-dependent.

use crate::drawing::Drawing;
use crate::dual::HoleDecomposition;
use crate::instance::InsertionInstance;
use crate::map::{Dart, EdgeId, FaceId, SegId, VertexId};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpdNode {
    /// A kept planarization vertex.
    Orig(VertexId),
    /// The subdivision vertex of a kept segment.
    EdgeV(SegId),
    /// The face vertex of a gface (kept cell or hole).
    FaceV(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GFaceKind {
    Cell(FaceId),
    Hole(u32),
}

/// One face of the planarization with hole interiors removed. Hole faces
/// can have several boundary walks (pieces).
#[derive(Debug, Clone)]
pub struct GFace {
    pub kind: GFaceKind,
    /// Boundary walks in kept darts; the face lies on the right of each dart.
    pub walks: Vec<Vec<Dart>>,
    /// Node rings along each walk: Orig(tail), EdgeV(seg), Orig(tail), ...
    pub rings: Vec<Vec<u32>>,
}

/// Combined primal-dual graph: original vertices, one edge vertex per kept
/// segment, one face vertex per face of the holed graph.
#[derive(Debug, Clone)]
pub struct Gpd {
    pub nodes: Vec<GpdNode>,
    pub adj: Vec<Vec<u32>>,
    pub node_of_vertex: Vec<Option<u32>>,
    pub node_of_seg: Vec<Option<u32>>,
    pub gfaces: Vec<GFace>,
    pub face_node: Vec<u32>,
    pub gface_of_cell: Vec<u32>,
    pub outer_gface: u32,
}

impl Gpd {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_hole_gface(&self, g: u32) -> bool {
        matches!(self.gfaces[g as usize].kind, GFaceKind::Hole(_))
    }

    /// Per-component diameters (all-pairs BFS; diagnostic only).
    pub fn component_diameters(&self) -> Vec<usize> {
        component_diameters(&self.adj)
    }
}

pub(crate) fn component_diameters(adj: &[Vec<u32>]) -> Vec<usize> {
    let n = adj.len();
    let mut comp = vec![u32::MAX; n];
    let mut diameters = Vec::new();
    for start in 0..n {
        if comp[start] != u32::MAX {
            continue;
        }
        let id = diameters.len() as u32;
        let mut members = vec![start as u32];
        comp[start] = id;
        let mut head = 0;
        while head < members.len() {
            let v = members[head];
            head += 1;
            for &w in &adj[v as usize] {
                if comp[w as usize] == u32::MAX {
                    comp[w as usize] = id;
                    members.push(w);
                }
            }
        }
        let mut diam = 0usize;
        for &m in &members {
            let dist = bfs(adj, m);
            for &x in &members {
                let dx = dist[x as usize];
                if dx != usize::MAX {
                    diam = diam.max(dx);
                }
            }
        }
        diameters.push(diam);
    }
    diameters
}

fn bfs(adj: &[Vec<u32>], source: u32) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[source as usize] = 0;
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v as usize] {
            if dist[w as usize] == usize::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Builds the combined primal-dual graph for the given hole decomposition.
pub fn build_gpd(inst: &InsertionInstance, dec: &HoleDecomposition) -> Gpd {
    let d = inst.drawing();
    let map = d.map();

    // Orbits of the restricted face-next over kept darts give the faces of
    // the holed graph: kept cells keep their walks, each hole becomes one
    // face with one walk per boundary piece.
    let kept_dart = |dart: Dart| dec.seg_kept(map.seg_of(dart));
    let restricted_next = |dart: Dart| -> Dart {
        let mut r = map.rot(map.twin(dart));
        while !kept_dart(r) {
            r = map.rot(r);
        }
        r
    };

    let n_darts = map.dart_count();
    let mut walk_of_dart = vec![u32::MAX; n_darts];
    let mut walks: Vec<Vec<Dart>> = Vec::new();
    for d0 in 0..n_darts as u32 {
        if !kept_dart(d0) || walk_of_dart[d0 as usize] != u32::MAX {
            continue;
        }
        let id = walks.len() as u32;
        let mut walk = Vec::new();
        let mut x = d0;
        loop {
            walk_of_dart[x as usize] = id;
            walk.push(x);
            x = restricted_next(x);
            if x == d0 {
                break;
            }
        }
        walks.push(walk);
    }

    // Classify each walk by the right face of its darts.
    let n_holes = dec.holes.len();
    let mut gfaces: Vec<GFace> = Vec::new();
    let mut gface_of_cell: Vec<u32> = vec![u32::MAX; map.face_count()];
    for c in 0..map.face_count() as u32 {
        if dec.cell_kept(c) {
            let id = gfaces.len() as u32;
            gface_of_cell[c as usize] = id;
            gfaces.push(GFace { kind: GFaceKind::Cell(c), walks: Vec::new(), rings: Vec::new() });
        }
    }
    for h in 0..n_holes as u32 {
        let id = gfaces.len() as u32;
        gfaces.push(GFace { kind: GFaceKind::Hole(h), walks: Vec::new(), rings: Vec::new() });
        for &c in &dec.holes[h as usize].cells {
            gface_of_cell[c as usize] = id;
        }
    }
    for walk in walks {
        let right = map.face_of(walk[0]);
        let g = gface_of_cell[right as usize];
        debug_assert!(walk.iter().all(|&x| gface_of_cell[map.face_of(x) as usize] == g));
        gfaces[g as usize].walks.push(walk);
    }

    // Node space.
    let mut nodes: Vec<GpdNode> = Vec::new();
    let mut node_of_vertex: Vec<Option<u32>> = vec![None; map.vertex_count()];
    for v in 0..map.vertex_count() as u32 {
        if dec.vertex_kept(v) {
            node_of_vertex[v as usize] = Some(nodes.len() as u32);
            nodes.push(GpdNode::Orig(v));
        }
    }
    let mut node_of_seg: Vec<Option<u32>> = vec![None; map.seg_count()];
    for s in 0..map.seg_count() as u32 {
        if dec.seg_kept(s) {
            node_of_seg[s as usize] = Some(nodes.len() as u32);
            nodes.push(GpdNode::EdgeV(s));
        }
    }
    let mut face_node: Vec<u32> = Vec::with_capacity(gfaces.len());
    for g in 0..gfaces.len() as u32 {
        face_node.push(nodes.len() as u32);
        nodes.push(GpdNode::FaceV(g));
    }

    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); nodes.len()];
    fn connect(adj: &mut [BTreeSet<u32>], a: u32, b: u32) {
        adj[a as usize].insert(b);
        adj[b as usize].insert(a);
    }
    for s in 0..map.seg_count() as u32 {
        if let Some(x) = node_of_seg[s as usize] {
            let dart = map.seg_dart(s);
            let u = node_of_vertex[map.tail(dart) as usize].expect("kept seg has kept tail");
            let w = node_of_vertex[map.head(dart) as usize].expect("kept seg has kept head");
            connect(&mut adj, x, u);
            connect(&mut adj, x, w);
        }
    }
    // Face vertices join every vertex on the boundary of their face; rings
    // double as the cyclic orders for the interleave filter.
    for g in 0..gfaces.len() {
        let fnode = face_node[g];
        let mut rings = Vec::new();
        for walk in &gfaces[g].walks {
            let mut ring = Vec::with_capacity(walk.len() * 2);
            for &dart in walk {
                let u = node_of_vertex[map.tail(dart) as usize].unwrap();
                let x = node_of_seg[map.seg_of(dart) as usize].unwrap();
                ring.push(u);
                ring.push(x);
                connect(&mut adj, fnode, u);
                connect(&mut adj, fnode, x);
            }
            rings.push(ring);
        }
        gfaces[g].rings = rings;
    }

    let outer_gface = gface_of_cell[map.outer_face() as usize];
    Gpd {
        nodes,
        adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        node_of_vertex,
        node_of_seg,
        gfaces,
        face_node,
        gface_of_cell,
        outer_gface,
    }
}

/// Crossable parts per hole for one added edge, plus the segments actually
/// crossed by solution-curve walks.
#[derive(Debug, Clone, Default)]
pub struct CrossableParts {
    /// Per hole: (edge, part index) pairs crossable for the given edge.
    pub per_hole: Vec<BTreeSet<(EdgeId, usize)>>,
    pub crossed_segs: BTreeSet<SegId>,
    pub walks_found: usize,
}

/// Exhaustive solution-curve walk search for added edge `i`.
///
/// Walks live on kept-cell face vertices only; crossing into a hole face is
/// never part of a solution curve. Both pruning filters only ever cut
/// branches, so the result equals unpruned enumeration plus post-hoc
/// filtering.
pub fn crossable_parts(
    inst: &InsertionInstance,
    dec: &HoleDecomposition,
    gpd: &Gpd,
    i: usize,
) -> CrossableParts {
    let d = inst.drawing();
    let mut out = CrossableParts {
        per_hole: vec![BTreeSet::new(); dec.holes.len()],
        ..Default::default()
    };
    let (s_i, t_i) = inst.added()[i];
    let budget = inst.budget(i) as usize;
    let (Some(s_node), Some(t_node)) =
        (gpd.node_of_vertex[s_i as usize], gpd.node_of_vertex[t_i as usize])
    else {
        return out;
    };

    {
        let mut search = Search { inst, gpd, i, t_node, budget, out: &mut out };
        let mut starts: Vec<u32> = gpd.adj[s_node as usize]
            .iter()
            .copied()
            .filter(|&n| matches!(gpd.nodes[n as usize], GpdNode::FaceV(g) if !gpd.is_hole_gface(g)))
            .collect();
        starts.sort_unstable();
        let mut walk: Vec<u32> = Vec::new();
        for f in starts {
            walk.push(f);
            search.recurse(&mut walk, 0);
            walk.pop();
        }
    }
    mark_parts(d, dec, &mut out);
    out
}

fn mark_parts(d: &Drawing, dec: &HoleDecomposition, out: &mut CrossableParts) {
    let segs: Vec<SegId> = out.crossed_segs.iter().copied().collect();
    for &s in &segs {
        let e = d.edge_of_seg(s);
        let idx = d.seg_index(s);
        for h in 0..dec.holes.len() as u32 {
            if let Some(parts) = dec.parts_of(d, h, e) {
                if parts.len() >= 2 {
                    if let Some(p) = parts.iter().position(|p| p.first <= idx && idx <= p.last) {
                        out.per_hole[h as usize].insert((e, p));
                    }
                }
            }
        }
    }
}

struct Search<'a> {
    inst: &'a InsertionInstance,
    gpd: &'a Gpd,
    i: usize,
    t_node: u32,
    budget: usize,
    out: &'a mut CrossableParts,
}

impl<'a> Search<'a> {
    fn recurse(&mut self, walk: &mut Vec<u32>, used: usize) {
        let f = *walk.last().unwrap();
        if self.gpd.adj[f as usize].binary_search(&self.t_node).is_ok() {
            self.record(walk);
        }
        if used == self.budget {
            return;
        }
        let candidates: Vec<u32> = self.gpd.adj[f as usize]
            .iter()
            .copied()
            .filter(|&n| matches!(self.gpd.nodes[n as usize], GpdNode::EdgeV(_)))
            .collect();
        let map = self.inst.drawing().map();
        for x in candidates {
            let GpdNode::EdgeV(seg) = self.gpd.nodes[x as usize] else { unreachable!() };
            let dart = map.seg_dart(seg);
            let a = self.gpd.gface_of_cell[map.face_of(dart) as usize];
            let b = self.gpd.gface_of_cell[map.face_of(map.twin(dart)) as usize];
            let GpdNode::FaceV(gf) = self.gpd.nodes[f as usize] else { unreachable!() };
            let g2 = if a == gf {
                b
            } else if b == gf {
                a
            } else {
                continue;
            };
            if self.gpd.is_hole_gface(g2) {
                continue;
            }
            let f2 = self.gpd.face_node[g2 as usize];
            walk.push(x);
            if self.forced_self_crossing(walk) {
                walk.pop();
                continue;
            }
            walk.push(f2);
            if self.unjustified_revisit(walk) {
                walk.pop();
                walk.pop();
                continue;
            }
            self.recurse(walk, used + 1);
            walk.pop();
            walk.pop();
        }
    }

    fn record(&mut self, walk: &[u32]) {
        self.out.walks_found += 1;
        for &n in walk {
            if let GpdNode::EdgeV(s) = self.gpd.nodes[n as usize] {
                self.out.crossed_segs.insert(s);
            }
        }
    }

    /// Filter (a): four edge vertices visited in temporal order whose chords
    /// interleave in the cyclic order around a common face force a
    /// self-crossing of the curve.
    fn forced_self_crossing(&self, walk: &[u32]) -> bool {
        let newest = *walk.last().unwrap();
        let visited: Vec<u32> = walk
            .iter()
            .copied()
            .filter(|&n| matches!(self.gpd.nodes[n as usize], GpdNode::EdgeV(_)))
            .collect();
        if visited.len() < 4 {
            return false;
        }
        // Only quadruples ending at the newest edge vertex need checking.
        let m = visited.len();
        for a in 0..m - 3 {
            for b in a + 1..m - 2 {
                for c in b + 1..m - 1 {
                    if quad_interleaves(self.gpd, [visited[a], visited[b], visited[c], newest]) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Filter (b): a revisit of a face vertex is justified only when the
    /// excursion avoids exactly one endpoint of some other added edge, where
    /// avoidance is separation from the outer face vertex after removing the
    /// excursion and the closed neighborhood of the revisited face vertex.
    fn unjustified_revisit(&self, walk: &[u32]) -> bool {
        let f = *walk.last().unwrap();
        let Some(prev) = walk[..walk.len() - 1].iter().rposition(|&n| n == f) else {
            return false;
        };
        let excursion = &walk[prev + 1..walk.len() - 1];
        !self.excursion_justified(f, excursion)
    }

    fn excursion_justified(&self, f: u32, excursion: &[u32]) -> bool {
        let gpd = self.gpd;
        let mut removed = vec![false; gpd.node_count()];
        for &n in excursion {
            removed[n as usize] = true;
        }
        removed[f as usize] = true;
        for &n in &gpd.adj[f as usize] {
            removed[n as usize] = true;
        }
        let source = gpd.face_node[gpd.outer_gface as usize];
        let mut reach = vec![false; gpd.node_count()];
        if !removed[source as usize] {
            reach[source as usize] = true;
            let mut queue = std::collections::VecDeque::from([source]);
            while let Some(v) = queue.pop_front() {
                for &w in &gpd.adj[v as usize] {
                    if !removed[w as usize] && !reach[w as usize] {
                        reach[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let avoided = |v: VertexId| -> bool {
            let node = match gpd.node_of_vertex[v as usize] {
                Some(n) => n,
                None => {
                    // Endpoint swallowed by a hole: the hole region stands in
                    // for it.
                    let c = self.inst.drawing().faces_at(v)[0];
                    gpd.face_node[gpd.gface_of_cell[c as usize] as usize]
                }
            };
            !removed[node as usize] && !reach[node as usize]
        };
        for (j, &(s_j, t_j)) in self.inst.added().iter().enumerate() {
            if j == self.i {
                continue;
            }
            if avoided(s_j) != avoided(t_j) {
                return true;
            }
        }
        false
    }
}

/// Interleave test for a temporal quadruple around one face: true when all
/// four lie on one ring of a common face and the chord (1st,2nd) crosses the
/// chord (3rd,4th) there, for some choice of occurrences.
fn quad_interleaves(gpd: &Gpd, quad: [u32; 4]) -> bool {
    if quad[0] == quad[1] || quad[2] == quad[3] {
        return false;
    }
    for g in &gpd.gfaces {
        for ring in &g.rings {
            let pos: Vec<Vec<usize>> = quad
                .iter()
                .map(|&q| {
                    ring.iter()
                        .enumerate()
                        .filter(|&(_, &r)| r == q)
                        .map(|(idx, _)| idx)
                        .collect()
                })
                .collect();
            if pos.iter().any(|p: &Vec<usize>| p.is_empty()) {
                continue;
            }
            for &p0 in &pos[0] {
                for &p1 in &pos[1] {
                    for &p2 in &pos[2] {
                        for &p3 in &pos[3] {
                            if chords_cross(ring.len(), p0, p1, p2, p3) {
                                return true;
                            }
                        }
                    }
                }
            }
        }
    }
    false
}

/// Do chords {a,b} and {c,d} of a cycle of length `n` interleave?
pub fn chords_cross(n: usize, a: usize, b: usize, c: usize, d: usize) -> bool {
    if a == b || c == d || [c, d].contains(&a) || [c, d].contains(&b) {
        return false;
    }
    let inside = |x: usize| -> bool {
        let span = (b + n - a) % n;
        let off = (x + n - a) % n;
        off > 0 && off < span
    };
    inside(c) != inside(d)
}

/// The crossable-part bound for one added edge and one hole:
/// `l(2l+1)! · (4k(l+2)(l+1)^{l+1})^{2l+1}` (saturating).
///
/// Degenerate at l = 0, where no crossable part can exist at all; callers
/// must treat that case as "must be empty".
pub fn crossable_bound(k: usize, l: u32) -> u128 {
    let l = l as u128;
    let k = k as u128;
    let fact = |x: u128| -> u128 {
        let mut acc: u128 = 1;
        for i in 2..=x {
            acc = acc.saturating_mul(i);
        }
        acc
    };
    let pow = |base: u128, exp: u128| -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..exp {
            acc = acc.saturating_mul(base);
        }
        acc
    };
    let inner = 4u128
        .saturating_mul(k)
        .saturating_mul(l + 2)
        .saturating_mul(pow(l + 1, l + 1));
    l.saturating_mul(fact(2 * l + 1)).saturating_mul(pow(inner, 2 * l + 1))
}

#[derive(Debug, thiserror::Error)]
#[error("crossable-part bound violated for edge {edge} and hole {hole}: {count} parts, bound {bound} — library bug or source contradiction")]
pub struct BoundViolation {
    pub edge: usize,
    pub hole: usize,
    pub count: usize,
    pub bound: u128,
}

/// Asserts the crossable-part bound for edge `i` over all holes.
pub fn check_bound(
    inst: &InsertionInstance,
    parts: &CrossableParts,
    i: usize,
) -> Result<(), BoundViolation> {
    let l = inst.budget(i);
    let bound = crossable_bound(inst.k(), l);
    for (h, set) in parts.per_hole.iter().enumerate() {
        let count = set.len();
        let ok = if l == 0 { count == 0 } else { (count as u128) < bound };
        if !ok {
            return Err(BoundViolation { edge: i, hole: h, count, bound });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual;
    use crate::instance::{InsertionInstance, Variant};
    use crate::testgraphs;

    fn pipeline(inst: &InsertionInstance) -> (HoleDecomposition, Gpd) {
        let dualg = dual::build_dual(inst.drawing());
        let dec = dual::holes(inst, &dualg);
        let gpd = build_gpd(inst, &dec);
        (dec, gpd)
    }

    #[test]
    fn plane_triangle_gpd_counts() {
        let d = testgraphs::triangle_drawing();
        let inst = InsertionInstance::new(d, vec![], vec![], Variant::Slcei).unwrap();
        let (dec, gpd) = pipeline(&inst);
        assert!(dec.holes.is_empty());
        // 3 original + 3 edge + 2 face vertices.
        assert_eq!(gpd.node_count(), 8);
    }

    #[test]
    fn hole_face_vertex_touches_every_hole_boundary_vertex() {
        let inst = testgraphs::nested_squares_instance(1);
        let (dec, gpd) = pipeline(&inst);
        assert_eq!(dec.holes.len(), 1);
        let hole_g = (0..gpd.gfaces.len() as u32)
            .find(|&g| matches!(gpd.gfaces[g as usize].kind, GFaceKind::Hole(_)))
            .unwrap();
        let fnode = gpd.face_node[hole_g as usize];
        // Hole = inner cell; its boundary is the inner square: 4 vertices
        // and 4 edge vertices.
        assert_eq!(gpd.adj[fnode as usize].len(), 8);
    }

    #[test]
    fn chord_interleaving() {
        assert!(chords_cross(8, 0, 4, 2, 6));
        assert!(!chords_cross(8, 0, 2, 4, 6));
        assert!(!chords_cross(8, 0, 4, 0, 2));
    }

    #[test]
    fn bound_value_for_k1_l1() {
        // 1·3!·(4·1·3·4)^3 = 6·48³
        assert_eq!(crossable_bound(1, 1), 6 * 48u128.pow(3));
    }

    #[test]
    fn zero_budget_forces_empty_crossable() {
        let inst = testgraphs::nested_squares_instance(0);
        let (dec, gpd) = pipeline(&inst);
        for i in 0..inst.k() {
            let parts = crossable_parts(&inst, &dec, &gpd, i);
            assert!(parts.crossed_segs.is_empty());
            check_bound(&inst, &parts, i).unwrap();
        }
    }

    #[test]
    fn torn_chord_has_crossable_parts() {
        let inst = testgraphs::torn_chord_instance(2);
        let (dec, gpd) = pipeline(&inst);
        assert_eq!(dec.holes.len(), 1);
        assert!(!dec.torn[0].is_empty(), "chord should be torn by the hole");
        let parts = crossable_parts(&inst, &dec, &gpd, 0);
        assert!(parts.walks_found > 0);
        let total: usize = parts.per_hole.iter().map(|s| s.len()).sum();
        assert!(total > 0);
        check_bound(&inst, &parts, 0).unwrap();
    }
}
