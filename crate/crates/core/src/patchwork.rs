//! The patchwork graph: a labeled combinatorialization of the drawing with
//! segment, cell, shadow, crossing, and real vertices plus stitches.
//!
//! Construction, in order: planarization vertices keep their roles; every
//! kept segment is subdivided by max(k,2) segment vertices; every kept cell
//! receives a cell vertex and a shadow ring tracing its boundary (one shadow
//! per segment-vertex side and one per added-edge-endpoint corner, in
//! boundary-walk order); hole interiors contribute nothing except the
//! planarized threads, whose pieces carry two segment vertices each.
//! Crossable labels mark which added edges may cross a segment vertex;
//! tracking labels pair the neighbors of each crossing vertex that continue
//! the same edge lineage.

use crate::crossable::{CrossableParts, Gpd};
use crate::drawing::Drawing;
use crate::dual::HoleDecomposition;
use crate::instance::InsertionInstance;
use crate::map::{Dart, EdgeId, FaceId, SegId, VertexId, VertexRole};
use crate::stitches::{StitchCell, StitchPlan};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

pub type PwId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PwLabel {
    Real { vertex: VertexId },
    Crossing { origin: CrossingOrigin },
    Segment { origin: SegmentOrigin },
    Cell { face: FaceId },
    Shadow { anchor: PwId, cell: PwId, ring_pos: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingOrigin {
    Drawing { vertex: VertexId },
    Stitch { hole: u32, crossing: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentOrigin {
    /// Subdivision vertex `slot` (0-based along the edge's tail→head order)
    /// of a kept planarization segment.
    Drawing { seg: SegId, slot: u32 },
    /// Subdivision vertex of a stitch edge: piece `piece` of a thread,
    /// slot 0 or 1 along the thread's a→b order.
    Stitch { hole: u32, thread: u32, piece: u32, slot: u8 },
}

/// The built patchwork graph. Immutable; the solver and diagnostics read it
/// concurrently.
#[derive(Debug, Clone)]
pub struct Patchwork {
    pub labels: Vec<PwLabel>,
    pub adj: Vec<Vec<PwId>>,
    /// max(k, 2): subdivision vertices per segment.
    pub subdiv: usize,
    pub node_of_vertex: Vec<Option<PwId>>,
    /// Kept segment → its subdivision vertices in edge tail→head order.
    pub seg_nodes: Vec<Vec<PwId>>,
    pub cell_node: Vec<Option<PwId>>,
    /// Per kept cell (indexed by face id): shadow ring in boundary-walk order.
    pub cell_ring: Vec<Vec<PwId>>,
    /// Per segment vertex node: its shadows (one per live side).
    pub seg_shadows: BTreeMap<PwId, Vec<PwId>>,
    /// Per real node: endpoint shadows in creation order.
    pub endpoint_shadows: BTreeMap<PwId, Vec<PwId>>,
    /// Per segment vertex node: bitmask over added edges that may cross it.
    pub crossable: BTreeMap<PwId, u32>,
    /// Tracking label of (crossing node, segment neighbor).
    pub tracking: BTreeMap<(PwId, PwId), u8>,
    /// Lineage component of each segment node: connected via chains and
    /// equal-tracking-label transitions through crossings.
    pub lineage: BTreeMap<PwId, u32>,
    /// Edge lineage of each segment node (threads inherit their edge).
    pub lineage_edge: BTreeMap<PwId, EdgeId>,
    /// Stitch vertices → (hole, thread) provenance (u32::MAX marks stitch
    /// crossing vertices, which belong to two threads).
    pub stitch_origin: BTreeMap<PwId, (u32, u32)>,
    /// In-hole cells for the P⁺ diagnostics: per cell, the P nodes on its
    /// boundary.
    pub hole_cells: Vec<Vec<PwId>>,
    pub hole_count: usize,
}

impl Patchwork {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn is_crossable_for(&self, node: PwId, i: usize) -> bool {
        self.crossable.get(&node).is_some_and(|m| m & (1 << i) != 0)
    }

    /// Shadow ring of a cell node in boundary-walk order.
    pub fn ring_of_cell_node(&self, cell: PwId) -> &[PwId] {
        let PwLabel::Cell { face } = self.labels[cell as usize] else {
            panic!("not a cell node");
        };
        &self.cell_ring[face as usize]
    }

    /// True when a lineage path of segment and crossing vertices connects
    /// the two segment vertices such that both segment neighbors of every
    /// crossing on it share a tracking label.
    ///
    /// For two vertices of the same edge that are both crossable for added
    /// edge `i` this always holds; the parameter records that context and is
    /// asserted against the edge-identity oracle in the tests.
    pub fn same_edge_reachable(&self, v1: PwId, v2: PwId, _i: usize) -> bool {
        self.lineage.get(&v1).is_some() && self.lineage.get(&v1) == self.lineage.get(&v2)
    }
}

/// Builds the patchwork graph from the full preceding pipeline.
pub fn build_patchwork(
    inst: &InsertionInstance,
    dec: &HoleDecomposition,
    gpd: &Gpd,
    plan: &StitchPlan,
    crossable: &[CrossableParts],
) -> Patchwork {
    let d = inst.drawing();
    let map = d.map();
    let k = inst.k();
    let subdiv = k.max(2);

    let mut labels: Vec<PwLabel> = Vec::new();
    let mut adj: Vec<BTreeSet<PwId>> = Vec::new();
    fn new_node(labels: &mut Vec<PwLabel>, adj: &mut Vec<BTreeSet<PwId>>, l: PwLabel) -> PwId {
        labels.push(l);
        adj.push(BTreeSet::new());
        (labels.len() - 1) as PwId
    }
    fn connect(adj: &mut [BTreeSet<PwId>], a: PwId, b: PwId) {
        adj[a as usize].insert(b);
        adj[b as usize].insert(a);
    }

    // Step 1: kept planarization vertices.
    let mut node_of_vertex: Vec<Option<PwId>> = vec![None; map.vertex_count()];
    for v in 0..map.vertex_count() as u32 {
        if !dec.vertex_kept(v) {
            continue;
        }
        let label = match d.role(v) {
            VertexRole::Real => PwLabel::Real { vertex: v },
            VertexRole::Crossing => {
                PwLabel::Crossing { origin: CrossingOrigin::Drawing { vertex: v } }
            }
        };
        node_of_vertex[v as usize] = Some(new_node(&mut labels, &mut adj, label));
    }

    // Step 2: subdivision chains on kept segments.
    let mut seg_nodes: Vec<Vec<PwId>> = vec![Vec::new(); map.seg_count()];
    for e in 0..d.edge_count() as u32 {
        for &dart in d.edge_seq(e) {
            let s = map.seg_of(dart);
            if !dec.seg_kept(s) {
                continue;
            }
            let mut chain = Vec::with_capacity(subdiv);
            for slot in 0..subdiv as u32 {
                chain.push(new_node(
                    &mut labels,
                    &mut adj,
                    PwLabel::Segment { origin: SegmentOrigin::Drawing { seg: s, slot } },
                ));
            }
            let tail = node_of_vertex[map.tail(dart) as usize].expect("kept seg tail");
            let head = node_of_vertex[map.head(dart) as usize].expect("kept seg head");
            connect(&mut adj, tail, chain[0]);
            for w in chain.windows(2) {
                connect(&mut adj, w[0], w[1]);
            }
            connect(&mut adj, *chain.last().unwrap(), head);
            seg_nodes[s as usize] = chain;
        }
    }

    // Steps 3–4: cell vertices and shadow rings over kept cells.
    let endpoints: BTreeSet<VertexId> = inst.added().iter().flat_map(|&(s, t)| [s, t]).collect();
    let mut cell_node: Vec<Option<PwId>> = vec![None; map.face_count()];
    let mut cell_ring: Vec<Vec<PwId>> = vec![Vec::new(); map.face_count()];
    let mut seg_shadows: BTreeMap<PwId, Vec<PwId>> = BTreeMap::new();
    let mut endpoint_shadows: BTreeMap<PwId, Vec<PwId>> = BTreeMap::new();
    for f in 0..map.face_count() as u32 {
        if !dec.cell_kept(f) {
            continue;
        }
        let cnode = new_node(&mut labels, &mut adj, PwLabel::Cell { face: f });
        cell_node[f as usize] = Some(cnode);
        let mut ring: Vec<PwId> = Vec::new();
        for &dart in &map.faces()[f as usize] {
            let s = map.seg_of(dart);
            let chain = &seg_nodes[s as usize];
            debug_assert!(!chain.is_empty(), "kept cell borders only kept segments");
            let forward = d.edge_seq(d.edge_of_dart(dart)).contains(&dart);
            let ordered: Vec<PwId> = if forward {
                chain.clone()
            } else {
                chain.iter().rev().copied().collect()
            };
            for anchor in ordered {
                let ring_pos = ring.len() as u32;
                let sh = new_node(
                    &mut labels,
                    &mut adj,
                    PwLabel::Shadow { anchor, cell: cnode, ring_pos },
                );
                connect(&mut adj, sh, anchor);
                connect(&mut adj, sh, cnode);
                ring.push(sh);
                seg_shadows.entry(anchor).or_default().push(sh);
            }
            let corner_vertex = map.head(dart);
            if endpoints.contains(&corner_vertex) {
                let anchor = node_of_vertex[corner_vertex as usize].unwrap();
                let ring_pos = ring.len() as u32;
                let sh = new_node(
                    &mut labels,
                    &mut adj,
                    PwLabel::Shadow { anchor, cell: cnode, ring_pos },
                );
                connect(&mut adj, sh, anchor);
                connect(&mut adj, sh, cnode);
                ring.push(sh);
                endpoint_shadows.entry(anchor).or_default().push(sh);
            }
        }
        cell_ring[f as usize] = ring;
    }

    // Steps 6–7: stitches. One crossing vertex per stitch crossing, two
    // segment vertices per stitch piece.
    let mut stitch_origin: BTreeMap<PwId, (u32, u32)> = BTreeMap::new();
    let mut stitch_piece_nodes: BTreeMap<(u32, u32, u32), [PwId; 2]> = BTreeMap::new();
    let mut stitch_cross_node: BTreeMap<(u32, u32), PwId> = BTreeMap::new();
    for hs in &plan.holes {
        let h = hs.hole;
        for ci in 0..hs.crossings.len() as u32 {
            let node = new_node(
                &mut labels,
                &mut adj,
                PwLabel::Crossing { origin: CrossingOrigin::Stitch { hole: h, crossing: ci } },
            );
            stitch_cross_node.insert((h, ci), node);
            stitch_origin.insert(node, (h, u32::MAX));
        }
        for (ti, t) in hs.threads.iter().enumerate() {
            let a = node_of_vertex[t.a.vertex as usize].expect("thread anchors are kept");
            let b = node_of_vertex[t.b.vertex as usize].expect("thread anchors are kept");
            let along = &hs.thread_crossings[ti];
            let pieces = along.len() + 1;
            let mut prev = a;
            for piece in 0..pieces as u32 {
                let mut pair = [0 as PwId; 2];
                for slot in 0..2u8 {
                    let node = new_node(
                        &mut labels,
                        &mut adj,
                        PwLabel::Segment {
                            origin: SegmentOrigin::Stitch { hole: h, thread: ti as u32, piece, slot },
                        },
                    );
                    stitch_origin.insert(node, (h, ti as u32));
                    pair[slot as usize] = node;
                }
                stitch_piece_nodes.insert((h, ti as u32, piece), pair);
                connect(&mut adj, prev, pair[0]);
                connect(&mut adj, pair[0], pair[1]);
                let next = if (piece as usize) < along.len() {
                    stitch_cross_node[&(h, along[piece as usize] as u32)]
                } else {
                    b
                };
                connect(&mut adj, pair[1], next);
                prev = next;
            }
        }
    }

    let adj: Vec<Vec<PwId>> = adj.into_iter().map(|s| s.into_iter().collect()).collect();

    // Crossable labels.
    let mut crossable_masks: BTreeMap<PwId, u32> = BTreeMap::new();
    for s in 0..map.seg_count() as u32 {
        if seg_nodes[s as usize].is_empty() {
            continue;
        }
        let e = d.edge_of_seg(s);
        let idx = d.seg_index(s);
        let mut mask = 0u32;
        for i in 0..k {
            let mut ok = true;
            for h in 0..dec.holes.len() {
                let Some(torn) = dec.torn[h].iter().find(|t| t.edge == e) else { continue };
                let part = torn.parts.iter().position(|p| p.first <= idx && idx <= p.last);
                match part {
                    Some(part) if crossable[i].per_hole[h].contains(&(e, part)) => {}
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                mask |= 1 << i;
            }
        }
        for &n in &seg_nodes[s as usize] {
            crossable_masks.insert(n, mask);
        }
    }
    // Stitch segment vertices are never crossable.
    for (&n, _) in &stitch_origin {
        if matches!(labels[n as usize], PwLabel::Segment { .. }) {
            crossable_masks.insert(n, 0);
        }
    }

    // Edge lineage: drawing segments carry their edge; thread segments
    // inherit the torn edge.
    let mut lineage_edge: BTreeMap<PwId, EdgeId> = BTreeMap::new();
    for (s, chain) in seg_nodes.iter().enumerate() {
        for &n in chain {
            lineage_edge.insert(n, d.edge_of_seg(s as SegId));
        }
    }
    for hs in &plan.holes {
        for (&node, &(h, tt)) in &stitch_origin {
            if h == hs.hole && tt != u32::MAX && matches!(labels[node as usize], PwLabel::Segment { .. }) {
                lineage_edge.insert(node, hs.threads[tt as usize].edge);
            }
        }
    }

    // Tracking labels: pair the segment neighbors of a crossing vertex by
    // the curve they continue (edges for drawing crossings, threads for
    // stitch crossings); symmetry broken by ascending identifier.
    let mut tracking: BTreeMap<(PwId, PwId), u8> = BTreeMap::new();
    for node in 0..labels.len() as PwId {
        let PwLabel::Crossing { origin } = labels[node as usize] else { continue };
        let mut groups: BTreeMap<u64, Vec<PwId>> = BTreeMap::new();
        for &nb in &adj[node as usize] {
            let PwLabel::Segment { origin: so } = labels[nb as usize] else { continue };
            let key = match (origin, so) {
                (CrossingOrigin::Drawing { .. }, SegmentOrigin::Drawing { seg, .. }) => {
                    d.edge_of_seg(seg) as u64
                }
                (CrossingOrigin::Drawing { .. }, SegmentOrigin::Stitch { .. }) => {
                    lineage_edge[&nb] as u64
                }
                (CrossingOrigin::Stitch { .. }, SegmentOrigin::Stitch { hole, thread, .. }) => {
                    (1 << 32) | ((hole as u64) << 16) | thread as u64
                }
                _ => unreachable!("stitch crossings neighbor only stitch segments"),
            };
            groups.entry(key).or_default().push(nb);
        }
        for (rank, (_, members)) in groups.into_iter().enumerate() {
            let label = if rank == 0 { 1 } else { 2 };
            for nb in members {
                tracking.insert((node, nb), label);
            }
        }
    }

    // Lineage components: union chains and same-label pairs at crossings.
    let seg_node_ids: Vec<PwId> = (0..labels.len() as PwId)
        .filter(|&n| matches!(labels[n as usize], PwLabel::Segment { .. }))
        .collect();
    let mut uf: BTreeMap<PwId, PwId> = seg_node_ids.iter().map(|&n| (n, n)).collect();
    fn find(uf: &mut BTreeMap<PwId, PwId>, x: PwId) -> PwId {
        let p = uf[&x];
        if p == x {
            return x;
        }
        let r = find(uf, p);
        uf.insert(x, r);
        r
    }
    for &n in &seg_node_ids {
        for &nb in adj[n as usize].clone().iter() {
            match labels[nb as usize] {
                PwLabel::Segment { .. } => {
                    let (ra, rb) = (find(&mut uf, n), find(&mut uf, nb));
                    if ra != rb {
                        uf.insert(ra.max(rb), ra.min(rb));
                    }
                }
                PwLabel::Crossing { .. } => {
                    for &nb2 in &adj[nb as usize] {
                        if nb2 != n
                            && matches!(labels[nb2 as usize], PwLabel::Segment { .. })
                            && tracking.get(&(nb, n)) == tracking.get(&(nb, nb2))
                        {
                            let (ra, rb) = (find(&mut uf, n), find(&mut uf, nb2));
                            if ra != rb {
                                uf.insert(ra.max(rb), ra.min(rb));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }
    let lineage: BTreeMap<PwId, u32> = seg_node_ids
        .iter()
        .map(|&n| {
            let r = find(&mut uf, n);
            (n, r)
        })
        .collect();

    // P⁺ cells inside holes, resolved to patchwork nodes.
    let mut hole_cells: Vec<Vec<PwId>> = Vec::new();
    for hs in &plan.holes {
        let gface = gpd
            .gfaces
            .iter()
            .find(|g| g.kind == crate::crossable::GFaceKind::Hole(hs.hole))
            .unwrap();
        for cell in &hs.cells {
            hole_cells.push(resolve_stitch_cell(
                d,
                &gface.walks,
                hs,
                cell,
                &node_of_vertex,
                &seg_nodes,
                &stitch_piece_nodes,
                &stitch_cross_node,
            ));
        }
    }

    Patchwork {
        labels,
        adj,
        subdiv,
        node_of_vertex,
        seg_nodes,
        cell_node,
        cell_ring,
        seg_shadows,
        endpoint_shadows,
        crossable: crossable_masks,
        tracking,
        lineage,
        lineage_edge,
        stitch_origin,
        hole_cells,
        hole_count: dec.holes.len(),
    }
}

/// P nodes on the boundary of one stitch cell: chord pieces contribute their
/// segment vertices and end vertices, arcs contribute the boundary stretch
/// between the anchors, whole pieces contribute their entire walk.
#[allow(clippy::too_many_arguments)]
fn resolve_stitch_cell(
    d: &Drawing,
    walks: &[Vec<Dart>],
    hs: &crate::stitches::HoleStitches,
    cell: &StitchCell,
    node_of_vertex: &[Option<PwId>],
    seg_nodes: &[Vec<PwId>],
    stitch_piece_nodes: &BTreeMap<(u32, u32, u32), [PwId; 2]>,
    stitch_cross_node: &BTreeMap<(u32, u32), PwId>,
) -> Vec<PwId> {
    let map = d.map();
    let mut out: BTreeSet<PwId> = BTreeSet::new();
    let h = hs.hole;
    for &(ti, piece) in &cell.chord_pieces {
        let pair = stitch_piece_nodes[&(h, ti as u32, piece as u32)];
        out.insert(pair[0]);
        out.insert(pair[1]);
        let along = &hs.thread_crossings[ti];
        let left = if piece == 0 {
            node_of_vertex[hs.threads[ti].a.vertex as usize].unwrap()
        } else {
            stitch_cross_node[&(h, along[piece - 1] as u32)]
        };
        let right = if piece == along.len() {
            node_of_vertex[hs.threads[ti].b.vertex as usize].unwrap()
        } else {
            stitch_cross_node[&(h, along[piece] as u32)]
        };
        out.insert(left);
        out.insert(right);
    }
    let add_walk_dart = |dart: Dart, out: &mut BTreeSet<PwId>| {
        for &n in &seg_nodes[map.seg_of(dart) as usize] {
            out.insert(n);
        }
        if let Some(n) = node_of_vertex[map.head(dart) as usize] {
            out.insert(n);
        }
        if let Some(n) = node_of_vertex[map.tail(dart) as usize] {
            out.insert(n);
        }
    };
    for &(piece, from, to) in &cell.arcs {
        let walk = &walks[piece as usize];
        let len = walk.len() as u32;
        if let Some(n) = node_of_vertex[from.vertex as usize] {
            out.insert(n);
        }
        if let Some(n) = node_of_vertex[to.vertex as usize] {
            out.insert(n);
        }
        let mut c = from.corner;
        while c != to.corner {
            c = (c + 1) % len;
            add_walk_dart(walk[c as usize], &mut out);
        }
    }
    for &piece in &cell.whole_pieces {
        for &dart in &walks[piece as usize] {
            add_walk_dart(dart, &mut out);
        }
    }
    out.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Diagnostics.

#[derive(Debug, Serialize)]
pub struct PatchworkDiagnostics {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub label_counts: LabelCounts,
    pub expected_counts: LabelCounts,
    pub euler_ok: bool,
    pub faces_structural: usize,
    pub pplus_component_diameters: Vec<usize>,
    pub pplus_diameter_bound: u128,
    pub gpd_component_diameters: Vec<usize>,
    pub gpd_diameter_bound: usize,
    pub tracking_ok: bool,
}

#[derive(Debug, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    pub real: usize,
    pub crossing: usize,
    pub segment: usize,
    pub cell: usize,
    pub shadow: usize,
}

#[derive(Debug, thiserror::Error)]
#[error("patchwork diameter bound violated: component diameter {diameter} exceeds {bound}")]
pub struct DiameterViolation {
    pub diameter: usize,
    pub bound: u128,
}

/// Structural diagnostics: Euler-based planarity accounting, label-count
/// closed forms, tracking pairing, and the P⁺ diameter bound. The diameter
/// bound is fatal when violated; everything else is reported.
pub fn diagnostics(
    inst: &InsertionInstance,
    dec: &HoleDecomposition,
    gpd: &Gpd,
    plan: &StitchPlan,
    pw: &Patchwork,
) -> Result<PatchworkDiagnostics, DiameterViolation> {
    let d = inst.drawing();
    let map = d.map();
    let k = inst.k();
    let subdiv = pw.subdiv;

    let mut counts = LabelCounts { real: 0, crossing: 0, segment: 0, cell: 0, shadow: 0 };
    for l in &pw.labels {
        match l {
            PwLabel::Real { .. } => counts.real += 1,
            PwLabel::Crossing { .. } => counts.crossing += 1,
            PwLabel::Segment { .. } => counts.segment += 1,
            PwLabel::Cell { .. } => counts.cell += 1,
            PwLabel::Shadow { .. } => counts.shadow += 1,
        }
    }

    // Closed forms from drawing statistics.
    let kept_segs = (0..map.seg_count() as u32).filter(|&s| dec.seg_kept(s)).count();
    let kept_cells = (0..map.face_count() as u32).filter(|&f| dec.cell_kept(f)).count();
    let kept_real = (0..map.vertex_count() as u32)
        .filter(|&v| dec.vertex_kept(v) && d.role(v) == VertexRole::Real)
        .count();
    let kept_crossings = (0..map.vertex_count() as u32)
        .filter(|&v| dec.vertex_kept(v) && d.role(v) == VertexRole::Crossing)
        .count();
    let stitch_edges: usize = plan
        .holes
        .iter()
        .map(|hs| hs.threads.len() + 2 * hs.crossings.len())
        .sum();
    let endpoints: BTreeSet<VertexId> = inst.added().iter().flat_map(|&(s, t)| [s, t]).collect();
    let endpoint_corner_occurrences: usize = (0..map.face_count() as u32)
        .filter(|&f| dec.cell_kept(f))
        .map(|f| {
            map.faces()[f as usize]
                .iter()
                .filter(|&&dart| endpoints.contains(&map.head(dart)))
                .count()
        })
        .sum();
    let boundary_dart_sides: usize = (0..map.face_count() as u32)
        .filter(|&f| dec.cell_kept(f))
        .map(|f| map.faces()[f as usize].len())
        .sum();
    let expected = LabelCounts {
        real: kept_real,
        crossing: kept_crossings + plan.total_crossings(),
        segment: kept_segs * subdiv + 2 * stitch_edges,
        cell: kept_cells,
        shadow: boundary_dart_sides * subdiv + endpoint_corner_occurrences,
    };

    // Euler accounting: the faces of P are the shadow wheels plus the
    // in-hole stitch cells; V − E + F must equal 1 + #components.
    let comps = components(&pw.adj);
    let wheel_faces: usize = pw.cell_ring.iter().map(|r| r.len()).sum();
    let hole_faces: usize = plan.holes.iter().map(|hs| hs.cells.len()).sum();
    let faces_structural = wheel_faces + hole_faces;
    let v = pw.node_count() as i64;
    let e = pw.edge_count() as i64;
    let euler_ok = v - e + faces_structural as i64 == 1 + comps as i64;

    // Tracking pairing: same-label neighbors share an edge lineage;
    // full-degree drawing crossings have exactly four segment neighbors,
    // two per label.
    let mut tracking_ok = true;
    for node in 0..pw.labels.len() as PwId {
        let PwLabel::Crossing { origin } = pw.labels[node as usize] else { continue };
        let segs: Vec<PwId> = pw.adj[node as usize]
            .iter()
            .copied()
            .filter(|&n| matches!(pw.labels[n as usize], PwLabel::Segment { .. }))
            .collect();
        let mut by_label: BTreeMap<u8, BTreeSet<EdgeId>> = BTreeMap::new();
        for &s in &segs {
            let l = pw.tracking[&(node, s)];
            by_label.entry(l).or_default().insert(pw.lineage_edge[&s]);
        }
        for (_, lineages) in &by_label {
            if lineages.len() != 1 {
                tracking_ok = false;
            }
        }
        if let CrossingOrigin::Drawing { vertex } = origin {
            let full_degree =
                d.vertex_darts(vertex).iter().all(|&dd| dec.seg_kept(map.seg_of(dd)));
            if full_degree {
                let ones = segs.iter().filter(|&&s| pw.tracking[&(node, s)] == 1).count();
                let twos = segs.iter().filter(|&&s| pw.tracking[&(node, s)] == 2).count();
                if segs.len() != 4 || ones != 2 || twos != 2 {
                    tracking_ok = false;
                }
            }
        }
    }

    // P⁺: a helper vertex per in-hole cell, joined to the cell's boundary.
    let mut pplus_adj: Vec<Vec<u32>> = pw.adj.to_vec();
    for cell in &pw.hole_cells {
        let helper = pplus_adj.len() as u32;
        pplus_adj.push(Vec::new());
        for &n in cell {
            pplus_adj[n as usize].push(helper);
            pplus_adj[helper as usize].push(n);
        }
    }
    let pplus_component_diameters = crate::crossable::component_diameters(&pplus_adj);
    let l = inst.max_budget() as u128;
    let f_bound = crate::crossable::crossable_bound(k.max(1), inst.max_budget());
    let d_term: u128 = if pw.hole_count == 0 {
        0
    } else {
        8u128.saturating_mul((k as u128).saturating_mul(f_bound).saturating_sub(1)).max(2)
    };
    let pplus_diameter_bound =
        (2 + 4 * (k.max(1) as u128 - 1)).saturating_mul((4 * l).saturating_add(d_term).saturating_add(4));
    for &diam in &pplus_component_diameters {
        if (diam as u128) > pplus_diameter_bound {
            return Err(DiameterViolation { diameter: diam, bound: pplus_diameter_bound });
        }
    }

    let gpd_component_diameters = gpd.component_diameters();
    let gpd_diameter_bound = 4 * inst.max_budget() as usize + 4;

    Ok(PatchworkDiagnostics {
        nodes: pw.node_count(),
        edges: pw.edge_count(),
        components: comps,
        label_counts: counts,
        expected_counts: expected,
        euler_ok,
        faces_structural,
        pplus_component_diameters,
        pplus_diameter_bound,
        gpd_component_diameters,
        gpd_diameter_bound,
        tracking_ok,
    })
}

fn components(adj: &[Vec<PwId>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut comps = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        comps += 1;
        let mut stack = vec![start as u32];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
    }
    comps
}

/// The full pipeline from an instance to its patchwork.
pub struct Pipeline {
    pub dual: crate::dual::DualGraph,
    pub dec: HoleDecomposition,
    pub gpd: Gpd,
    pub crossable: Vec<CrossableParts>,
    pub plan: StitchPlan,
    pub pw: Patchwork,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Bound(#[from] crate::crossable::BoundViolation),
    #[error(transparent)]
    Stitch(#[from] crate::stitches::StitchError),
}

pub fn pipeline(inst: &InsertionInstance) -> Result<Pipeline, PipelineError> {
    let dual = crate::dual::build_dual(inst.drawing());
    let dec = crate::dual::holes(inst, &dual);
    let gpd = crate::crossable::build_gpd(inst, &dec);
    let mut crossable = Vec::with_capacity(inst.k());
    for i in 0..inst.k() {
        let cp = crate::crossable::crossable_parts(inst, &dec, &gpd, i);
        crate::crossable::check_bound(inst, &cp, i)?;
        crossable.push(cp);
    }
    let plan = crate::stitches::threads_and_stitches(inst, &dec, &gpd, &crossable)?;
    let pw = build_patchwork(inst, &dec, &gpd, &plan, &crossable);
    Ok(Pipeline { dual, dec, gpd, crossable, plan, pw })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgraphs;

    fn build(inst: &InsertionInstance) -> Pipeline {
        pipeline(inst).unwrap()
    }

    #[test]
    fn no_hole_instance_counts_and_euler() {
        let inst = testgraphs::nested_squares_instance(10); // no holes at l=10
        let p = build(&inst);
        let diag = diagnostics(&inst, &p.dec, &p.gpd, &p.plan, &p.pw).unwrap();
        assert_eq!(diag.label_counts, diag.expected_counts);
        assert!(diag.euler_ok);
        assert!(diag.tracking_ok);
        assert_eq!(diag.components, 1);
    }

    #[test]
    fn k1_segments_carry_two_subdivision_vertices() {
        let inst = testgraphs::nested_squares_instance(1);
        let p = build(&inst);
        assert_eq!(p.pw.subdiv, 2);
        for s in 0..inst.drawing().map().seg_count() as u32 {
            if p.dec.seg_kept(s) {
                assert_eq!(p.pw.seg_nodes[s as usize].len(), 2);
            } else {
                assert!(p.pw.seg_nodes[s as usize].is_empty());
            }
        }
    }

    #[test]
    fn torn_chord_patchwork_is_consistent() {
        let inst = testgraphs::torn_chord_instance(2);
        let p = build(&inst);
        let diag = diagnostics(&inst, &p.dec, &p.gpd, &p.plan, &p.pw).unwrap();
        assert_eq!(diag.label_counts, diag.expected_counts);
        assert!(diag.euler_ok, "structural faces must satisfy Euler");
        assert!(diag.tracking_ok);
        // One thread with no crossings: one stitch edge, two stitch segment
        // vertices; no stitch crossing vertices.
        let stitch_segs = p
            .pw
            .labels
            .iter()
            .filter(|l| matches!(l, PwLabel::Segment { origin: SegmentOrigin::Stitch { .. } }))
            .count();
        assert_eq!(stitch_segs, 2);
    }

    #[test]
    fn crossable_labels_fill_when_no_holes() {
        let inst = testgraphs::nested_squares_instance(10);
        let p = build(&inst);
        for (_, &mask) in &p.pw.crossable {
            assert_eq!(mask, 1, "no holes: every segment vertex crossable for the only edge");
        }
    }

    #[test]
    fn same_edge_reachability_matches_edge_identity() {
        let inst = testgraphs::torn_chord_instance(2);
        let p = build(&inst);
        let pw = &p.pw;
        let seg_ids: Vec<PwId> = (0..pw.labels.len() as PwId)
            .filter(|&n| matches!(pw.labels[n as usize], PwLabel::Segment { .. }))
            .collect();
        for &a in &seg_ids {
            for &b in &seg_ids {
                let same_lineage = pw.same_edge_reachable(a, b, 0);
                let same_edge = pw.lineage_edge[&a] == pw.lineage_edge[&b];
                assert!(!same_lineage || same_edge, "lineage paths stay on one edge");
                let both_crossable = pw.is_crossable_for(a, 0) && pw.is_crossable_for(b, 0);
                let both_drawing = matches!(
                    pw.labels[a as usize],
                    PwLabel::Segment { origin: SegmentOrigin::Drawing { .. } }
                ) && matches!(
                    pw.labels[b as usize],
                    PwLabel::Segment { origin: SegmentOrigin::Drawing { .. } }
                );
                if same_edge && both_crossable && both_drawing {
                    assert!(same_lineage, "crossable same-edge vertices connect");
                }
            }
        }
    }

    #[test]
    fn deterministic_rebuild() {
        let inst = testgraphs::torn_chord_instance(2);
        let a = build(&inst);
        let b = build(&inst);
        assert_eq!(format!("{:?}", a.pw.labels), format!("{:?}", b.pw.labels));
        assert_eq!(a.pw.adj, b.pw.adj);
    }
}
