//! Threads between consecutive crossable parts of torn edges, and their
//! canonical planarized embedding inside each hole (the stitches).
//!
//! Threads pair the facing endpoints of consecutive crossable parts of one
//! torn edge. All thread endpoints of one hole lie on connected pieces of
//! its boundary, never across two pieces; per piece the embedding is a chord
//! diagram: endpoints ordered along the boundary walk, two threads crossing
//! exactly when their endpoint pairs interleave. The diagram is realized
//! with straight chords between points in convex position and planarized
//! exactly, which also yields the stitch cells used by the patchwork
//! diagnostics.

use crate::crossable::{CrossableParts, GFaceKind, Gpd};
use crate::drawing::Drawing;
use crate::dual::HoleDecomposition;
use crate::geom::{self, Pt};
use crate::instance::InsertionInstance;
use crate::map::{Dart, EdgeId, VertexId};
use std::collections::{BTreeMap, BTreeSet};

/// One endpoint of a thread: a junction vertex on the hole boundary plus the
/// torn edge's deleted dart at it, located on the hole's boundary walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ThreadEnd {
    pub vertex: VertexId,
    pub dart: Dart,
    /// Boundary piece (walk index of the hole's face).
    pub piece: u32,
    /// Corner occurrence along the piece walk.
    pub corner: u32,
    /// Rank within the deleted-dart fan of that corner.
    pub fan: u32,
}

#[derive(Debug, Clone)]
pub struct Thread {
    pub edge: EdgeId,
    pub a: ThreadEnd,
    pub b: ThreadEnd,
    /// Added edges whose crossable parts induced this thread.
    pub for_edges: BTreeSet<usize>,
}

/// A crossing between two threads of one hole.
#[derive(Debug, Clone, Copy)]
pub struct StitchCrossing {
    pub t1: usize,
    pub t2: usize,
}

/// A cell of the stitch embedding inside a hole. The boundary consists of
/// thread pieces and stretches of the hole boundary between anchors;
/// anchor-free boundary pieces belong wholly to the central cell.
#[derive(Debug, Clone, Default)]
pub struct StitchCell {
    /// (thread index, piece index along the thread, in a→b order).
    pub chord_pieces: Vec<(usize, usize)>,
    /// (piece, from anchor, to anchor) walk stretches, forward along the walk.
    pub arcs: Vec<(u32, ThreadEnd, ThreadEnd)>,
    /// Boundary pieces without anchors lying entirely on this cell.
    pub whole_pieces: Vec<u32>,
    /// The designated central cell of the hole.
    pub central: bool,
}

#[derive(Debug, Clone)]
pub struct HoleStitches {
    pub hole: u32,
    pub threads: Vec<Thread>,
    /// Per thread: crossings in order of appearance from end `a` to end `b`.
    pub thread_crossings: Vec<Vec<usize>>,
    pub crossings: Vec<StitchCrossing>,
    pub cells: Vec<StitchCell>,
    pub piece_count: usize,
}

#[derive(Debug, Clone)]
pub struct StitchPlan {
    pub holes: Vec<HoleStitches>,
}

impl StitchPlan {
    pub fn total_threads(&self) -> usize {
        self.holes.iter().map(|h| h.threads.len()).sum()
    }

    pub fn total_crossings(&self) -> usize {
        self.holes.iter().map(|h| h.crossings.len()).sum()
    }

    pub fn max_threads_per_hole(&self) -> usize {
        self.holes.iter().map(|h| h.threads.len()).max().unwrap_or(0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StitchError {
    #[error("thread endpoint (vertex {vertex}, dart {dart}) is not on the boundary of hole {hole}")]
    EndNotOnHole { hole: u32, vertex: VertexId, dart: Dart },
    #[error("thread of edge {edge} spans two boundary pieces of hole {hole}")]
    AcrossPieces { hole: u32, edge: EdgeId },
    #[error("chord diagram embedding failed after retries: {0}")]
    Embedding(String),
}

/// Computes all threads and their canonical embedding for every hole.
pub fn threads_and_stitches(
    inst: &InsertionInstance,
    dec: &HoleDecomposition,
    gpd: &Gpd,
    crossable: &[CrossableParts],
) -> Result<StitchPlan, StitchError> {
    let d = inst.drawing();
    let mut holes = Vec::new();
    for h in 0..dec.holes.len() as u32 {
        holes.push(hole_stitches(inst, d, dec, gpd, crossable, h)?);
    }
    Ok(StitchPlan { holes })
}

/// Locates every deleted dart of hole `h` on its boundary walks: corner fans
/// between consecutive kept darts.
fn anchor_positions(
    d: &Drawing,
    dec: &HoleDecomposition,
    gpd: &Gpd,
    h: u32,
) -> (BTreeMap<Dart, (u32, u32, u32)>, usize) {
    let map = d.map();
    let gface = gpd
        .gfaces
        .iter()
        .position(|g| g.kind == GFaceKind::Hole(h))
        .expect("hole gface");
    let walks = &gpd.gfaces[gface].walks;
    let mut out = BTreeMap::new();
    for (piece, walk) in walks.iter().enumerate() {
        for (corner, &dart) in walk.iter().enumerate() {
            let next = walk[(corner + 1) % walk.len()];
            // Deleted darts inside the corner at head(dart), swept from
            // twin(dart) to the next walk dart.
            let mut r = map.rot(map.twin(dart));
            let mut fan = 0u32;
            while r != next {
                debug_assert!(!dec.seg_kept(map.seg_of(r)));
                out.insert(r, (piece as u32, corner as u32, fan));
                fan += 1;
                r = map.rot(r);
            }
        }
    }
    (out, walks.len())
}

fn hole_stitches(
    _inst: &InsertionInstance,
    d: &Drawing,
    dec: &HoleDecomposition,
    gpd: &Gpd,
    crossable: &[CrossableParts],
    h: u32,
) -> Result<HoleStitches, StitchError> {
    let map = d.map();
    let (anchor_map, piece_count) = anchor_positions(d, dec, gpd, h);
    let locate = |dart: Dart| -> Result<ThreadEnd, StitchError> {
        let vertex = map.tail(dart);
        match anchor_map.get(&dart) {
            Some(&(piece, corner, fan)) => Ok(ThreadEnd { vertex, dart, piece, corner, fan }),
            None => Err(StitchError::EndNotOnHole { hole: h, vertex, dart }),
        }
    };

    // Threads per added edge, deduplicated across added edges.
    let mut threads: Vec<Thread> = Vec::new();
    let mut index: BTreeMap<(Dart, Dart), usize> = BTreeMap::new();
    for (i, cp) in crossable.iter().enumerate() {
        let by_edge: BTreeMap<EdgeId, Vec<usize>> =
            cp.per_hole[h as usize]
                .iter()
                .fold(BTreeMap::new(), |mut acc, &(e, p)| {
                    acc.entry(e).or_default().push(p);
                    acc
                });
        for (edge, mut parts) in by_edge {
            parts.sort_unstable();
            let all = dec.parts_of(d, h, edge).expect("crossable edge cannot be swallowed");
            for w in parts.windows(2) {
                let (p, q) = (w[0], w[1]);
                // Facing endpoints: the hole-side end of part p and the
                // hole-side start of part q along the traversal of the edge.
                let seq = d.edge_seq(edge);
                let a_dart = seq[all[p].last as usize + 1];
                let b_dart = map.twin(seq[all[q].first as usize - 1]);
                let a = locate(a_dart)?;
                let b = locate(b_dart)?;
                if a.piece != b.piece {
                    return Err(StitchError::AcrossPieces { hole: h, edge });
                }
                let key = (a_dart.min(b_dart), a_dart.max(b_dart));
                match index.get(&key) {
                    Some(&t) => {
                        threads[t].for_edges.insert(i);
                    }
                    None => {
                        index.insert(key, threads.len());
                        threads.push(Thread { edge, a, b, for_edges: BTreeSet::from([i]) });
                    }
                }
            }
        }
    }

    // Anchor order per piece; chord diagram per piece.
    let mut piece_anchor_sets: Vec<BTreeSet<ThreadEnd>> = vec![BTreeSet::new(); piece_count];
    for t in &threads {
        piece_anchor_sets[t.a.piece as usize].insert(t.a);
        piece_anchor_sets[t.b.piece as usize].insert(t.b);
    }
    let piece_anchors: Vec<Vec<ThreadEnd>> = piece_anchor_sets
        .into_iter()
        .map(|s| {
            let mut v: Vec<ThreadEnd> = s.into_iter().collect();
            v.sort_by_key(|a| (a.corner, a.fan, a.dart));
            v
        })
        .collect();

    let walk_lens: Vec<u32> = {
        let g = gpd.gfaces.iter().find(|g| g.kind == GFaceKind::Hole(h)).unwrap();
        g.walks.iter().map(|w| w.len() as u32).collect()
    };

    let mut thread_crossings: Vec<Vec<usize>> = vec![Vec::new(); threads.len()];
    let mut crossings: Vec<StitchCrossing> = Vec::new();
    let mut cells: Vec<StitchCell> = Vec::new();
    let mut central = StitchCell { central: true, ..Default::default() };

    for piece in 0..piece_count as u32 {
        let anchors = &piece_anchors[piece as usize];
        let chords: Vec<(usize, usize, usize)> = threads
            .iter()
            .enumerate()
            .filter(|(_, t)| t.a.piece == piece)
            .map(|(ti, t)| {
                let pa = anchors.iter().position(|x| *x == t.a).unwrap();
                let pb = anchors.iter().position(|x| *x == t.b).unwrap();
                (ti, pa, pb)
            })
            .collect();
        if anchors.is_empty() {
            central.whole_pieces.push(piece);
            continue;
        }
        let arc = |from: usize, to: usize| (piece, anchors[from], anchors[to]);
        let m = anchors.len();
        if m == 2 {
            // A single chord splitting the piece disk in two.
            debug_assert_eq!(chords.len(), 1);
            let ti = chords[0].0;
            cells.push(StitchCell {
                chord_pieces: vec![(ti, 0)],
                arcs: vec![arc(0, 1)],
                ..Default::default()
            });
            // The wrap-around side opens toward the rest of the hole.
            central.chord_pieces.push((ti, 0));
            central.arcs.push(arc(1, 0));
            continue;
        }

        let emb = embed_piece(m, &chords)?;
        let base = crossings.len();
        for &(t1, t2, _) in &emb.crossings {
            crossings.push(StitchCrossing { t1, t2 });
        }
        for (ti, along) in &emb.per_thread {
            thread_crossings[*ti] = along.iter().map(|&c| base + c).collect();
        }
        let mut piece_cells: Vec<StitchCell> = Vec::new();
        for face in &emb.faces {
            let mut cell = StitchCell::default();
            for el in face {
                match *el {
                    EmbElement::Arc(fr, to) => cell.arcs.push(arc(fr, to)),
                    EmbElement::ChordPiece(t, p) => cell.chord_pieces.push((t, p)),
                }
            }
            piece_cells.push(cell);
        }
        // The face carrying the most boundary material (measured in walk
        // corners) opens toward the hole's central region.
        let len = walk_lens[piece as usize];
        let material = |c: &StitchCell| -> usize {
            c.arcs
                .iter()
                .map(|&(_, fr, to)| ((to.corner + len - fr.corner) % len) as usize)
                .sum()
        };
        let deep = (0..piece_cells.len()).max_by_key(|&i| material(&piece_cells[i])).unwrap();
        for (i, cell) in piece_cells.into_iter().enumerate() {
            if i == deep {
                central.chord_pieces.extend(cell.chord_pieces);
                central.arcs.extend(cell.arcs);
            } else {
                cells.push(cell);
            }
        }
    }
    cells.push(central);

    // The canonical embedding crosses two threads exactly when their
    // endpoint pairs interleave.
    for (i1, t1) in threads.iter().enumerate() {
        for (i2, t2) in threads.iter().enumerate().skip(i1 + 1) {
            if t1.a.piece != t2.a.piece {
                continue;
            }
            let anchors = &piece_anchors[t1.a.piece as usize];
            let pos = |e: &ThreadEnd| anchors.iter().position(|x| x == e).unwrap();
            let expected = crate::crossable::chords_cross(
                anchors.len(),
                pos(&t1.a),
                pos(&t1.b),
                pos(&t2.a),
                pos(&t2.b),
            );
            let actual = crossings
                .iter()
                .any(|c| (c.t1, c.t2) == (i1, i2) || (c.t1, c.t2) == (i2, i1));
            debug_assert_eq!(expected, actual, "stitch embedding must cross iff interleaving");
        }
    }

    Ok(HoleStitches { hole: h, threads, thread_crossings, crossings, cells, piece_count })
}

pub enum EmbElement {
    /// Boundary stretch between consecutive anchors (forward along walk).
    Arc(usize, usize),
    /// (thread, piece index along the thread in a→b order).
    ChordPiece(usize, usize),
}

pub struct PieceEmbedding {
    /// (thread1, thread2, mini crossing vertex) per crossing.
    pub crossings: Vec<(usize, usize, u32)>,
    /// Per thread: local crossing indices ordered from end a to end b.
    pub per_thread: Vec<(usize, Vec<usize>)>,
    pub faces: Vec<Vec<EmbElement>>,
}

/// Embeds the chords of one piece with straight segments between convex
/// anchor points, then reads the arrangement off the exact planarization.
fn embed_piece(m: usize, chords: &[(usize, usize, usize)]) -> Result<PieceEmbedding, StitchError> {
    // Chords between adjacent anchors cannot cross anything; they are carved
    // off as slivers afterwards so the planarizer never sees duplicate
    // edges.
    let adjacent = |a: usize, b: usize| (a + 1) % m == b || (b + 1) % m == a;
    let (sliver_chords, real_chords): (Vec<_>, Vec<_>) =
        chords.iter().partition(|&&(_, a, b)| adjacent(a, b));

    let mut attempt = 0u64;
    let planar = loop {
        let k = (1024 / (m as i64 + 2)).clamp(2, 64);
        let points: Vec<Pt> = (0..m as i64)
            .map(|j| {
                let jitter = if attempt == 0 {
                    0
                } else {
                    ((attempt.wrapping_mul(2654435761)).wrapping_add((j as u64 + 1).pow(2))
                        % (k / 2).max(1) as u64) as i64
                };
                let x = (j + 1) * k + jitter;
                Pt::new(x, x * x)
            })
            .collect();
        let mut edges: Vec<(u32, u32)> = (0..m as u32).map(|j| (j, (j + 1) % m as u32)).collect();
        for &&(_, a, b) in &real_chords {
            edges.push((a as u32, b as u32));
        }
        match geom::planarize(&points, &edges) {
            Ok(p) => break p,
            Err(geom::GeomError::ConcurrentCrossings { .. }) if attempt < 64 => {
                attempt += 1;
            }
            Err(e) => return Err(StitchError::Embedding(e.to_string())),
        }
    };
    let d = &planar.drawing;
    let map = d.map();

    // Mini-drawing edge ids: 0..m are polygon sides, then real chords.
    let chord_of_edge = |e: EdgeId| -> Option<usize> {
        if (e as usize) < m {
            None
        } else {
            Some(real_chords[e as usize - m].0)
        }
    };
    let chord_flipped: BTreeMap<usize, bool> = real_chords
        .iter()
        .enumerate()
        .map(|(ci, &&(ti, a, _b))| {
            // The mini edge_seq runs from the smaller mini endpoint; flip
            // when the thread's a-end is not that endpoint.
            let e = (m + ci) as EdgeId;
            let (tail, _) = d.edge_endpoints(e);
            (ti, tail as usize != a)
        })
        .collect();

    // Crossings and their order along each thread from its a end.
    let mut crossings: Vec<(usize, usize, u32)> = Vec::new();
    let mut crossing_id: BTreeMap<u32, usize> = BTreeMap::new();
    let mut per_thread: Vec<(usize, Vec<usize>)> = Vec::new();
    for (ci, &&(ti, _, _)) in real_chords.iter().enumerate() {
        let e = (m + ci) as EdgeId;
        let seq = d.edge_seq(e);
        let mut along: Vec<u32> = seq.iter().skip(1).map(|&dart| map.tail(dart)).collect();
        if chord_flipped[&ti] {
            along.reverse();
        }
        let mut local = Vec::new();
        for v in along {
            let id = *crossing_id.entry(v).or_insert_with(|| {
                let darts = d.vertex_darts(v);
                let mut ts: Vec<usize> = darts
                    .iter()
                    .map(|&dd| chord_of_edge(d.edge_of_dart(dd)).expect("chords cross only chords"))
                    .collect();
                ts.sort_unstable();
                ts.dedup();
                crossings.push((ts[0], ts[1], v));
                crossings.len() - 1
            });
            local.push(id);
        }
        per_thread.push((ti, local));
    }

    // Faces strictly inside the polygon.
    let mut faces: Vec<Vec<EmbElement>> = Vec::new();
    for f in 0..map.face_count() as u32 {
        if f == map.outer_face() {
            continue;
        }
        let mut elements = Vec::new();
        for (dart, _) in map.boundary_walk(f) {
            let e = d.edge_of_dart(dart);
            match chord_of_edge(e) {
                None => {
                    let a = e as usize;
                    elements.push(EmbElement::Arc(a, (a + 1) % m));
                }
                Some(ti) => {
                    let mut piece = d.seg_index(map.seg_of(dart)) as usize;
                    if chord_flipped[&ti] {
                        piece = d.edge_seq(e).len() - 1 - piece;
                    }
                    elements.push(EmbElement::ChordPiece(ti, piece));
                }
            }
        }
        faces.push(elements);
    }

    // Slivers: carve each adjacent-anchor chord out of the face that owns
    // its polygon side.
    for &&(ti, a, b) in &sliver_chords {
        let (fr, to) = if (a + 1) % m == b { (a, b) } else { (b, a) };
        let side = fr; // polygon side id equals its starting anchor
        let owner = faces
            .iter_mut()
            .find(|els| els.iter().any(|el| matches!(el, EmbElement::Arc(x, _) if *x == side)))
            .expect("every side borders an inner face");
        let pos = owner
            .iter()
            .position(|el| matches!(el, EmbElement::Arc(x, _) if *x == side))
            .unwrap();
        owner[pos] = EmbElement::ChordPiece(ti, 0);
        faces.push(vec![EmbElement::Arc(fr, to), EmbElement::ChordPiece(ti, 0)]);
        per_thread.push((ti, Vec::new()));
    }

    Ok(PieceEmbedding { crossings, per_thread, faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual;
    use crate::instance::InsertionInstance;
    use crate::testgraphs;

    fn full(inst: &InsertionInstance) -> StitchPlan {
        let dualg = dual::build_dual(inst.drawing());
        let dec = dual::holes(inst, &dualg);
        let gpd = crate::crossable::build_gpd(inst, &dec);
        let crossable: Vec<_> = (0..inst.k())
            .map(|i| crate::crossable::crossable_parts(inst, &dec, &gpd, i))
            .collect();
        threads_and_stitches(inst, &dec, &gpd, &crossable).unwrap()
    }

    #[test]
    fn torn_chord_yields_one_thread_no_crossings() {
        let inst = testgraphs::torn_chord_instance(2);
        let plan = full(&inst);
        assert_eq!(plan.holes.len(), 1);
        let hs = &plan.holes[0];
        assert_eq!(hs.threads.len(), 1, "two consecutive crossable parts give one thread");
        assert!(hs.crossings.is_empty());
        assert_eq!(hs.threads[0].edge, 19);
        // One chord on one piece: two stitch cells, one of them central.
        assert_eq!(hs.cells.len(), 2);
        assert_eq!(hs.cells.iter().filter(|c| c.central).count(), 1);
    }

    #[test]
    fn thread_endpoints_share_a_piece() {
        let inst = testgraphs::torn_chord_instance(2);
        let plan = full(&inst);
        for hs in &plan.holes {
            for t in &hs.threads {
                assert_eq!(t.a.piece, t.b.piece);
            }
        }
    }

    #[test]
    fn interleaving_endpoint_pairs_cross_once() {
        let emb = embed_piece(4, &[(0, 0, 2), (1, 1, 3)]).unwrap();
        assert_eq!(emb.crossings.len(), 1);
        let emb = embed_piece(4, &[(0, 0, 1), (1, 2, 3)]).unwrap();
        assert_eq!(emb.crossings.len(), 0);
    }

    #[test]
    fn five_anchor_diagram_faces_close_up() {
        // Chords (0,2), (1,3), (1,4): (0,2)×(1,3) and (0,2)×(1,4)
        // interleave; (1,3) and (1,4) share an anchor.
        let emb = embed_piece(5, &[(0, 0, 2), (1, 1, 3), (2, 1, 4)]).unwrap();
        assert_eq!(emb.crossings.len(), 2);
        assert!(emb.faces.len() >= 4);
    }
}
