//! Hand-built maps used across unit tests.
//!
//! Conventions: `rot` is the counterclockwise successor around the tail
//! vertex, so the orbit of `rot ∘ twin` keeps its face on the *right* of
//! every dart. Inner face walks are clockwise, the outer face walk is
//! counterclockwise.

use crate::drawing::{Drawing, RawDrawing};
use crate::instance::{CoordJson, InsertionInstance};
use crate::map::{CombinatorialMap, FaceId, VertexRole};

/// Plane triangle on vertices 0,1,2 at positions (0,0), (1,0), (1/2,1).
///
/// Darts: edge 01 → 0,1; edge 12 → 2,3; edge 20 → 4,5. Outer face is the
/// orbit of dart 0.
pub fn triangle_map() -> CombinatorialMap {
    CombinatorialMap::build(
        vec![1, 0, 3, 2, 5, 4],
        vec![5, 2, 1, 4, 3, 0],
        vec![0, 1, 1, 2, 2, 0],
        0,
    )
    .unwrap()
}

pub fn triangle_drawing() -> Drawing {
    RawDrawing {
        map: triangle_map(),
        roles: vec![VertexRole::Real; 3],
        edge_of_dart: vec![0, 0, 1, 1, 2, 2],
    }
    .validate()
    .unwrap()
}

/// K4 drawn on 4 convex points (unit square corners 0..3 counterclockwise),
/// diagonals 02 and 13 crossing in vertex 4.
///
/// Darts: 01 → 0,1; 12 → 2,3; 23 → 4,5; 30 → 6,7; 0–x → 8,9; x–2 → 10,11;
/// 1–x → 12,13; x–3 → 14,15. Outer face is the orbit of dart 0.
pub fn k4_convex_map() -> CombinatorialMap {
    CombinatorialMap::build(
        vec![1, 0, 3, 2, 5, 4, 7, 6, 9, 8, 11, 10, 13, 12, 15, 14],
        vec![8, 2, 12, 4, 11, 6, 15, 0, 7, 13, 14, 3, 1, 10, 9, 5],
        vec![0, 1, 1, 2, 2, 3, 3, 0, 0, 4, 4, 2, 1, 4, 4, 3],
        0,
    )
    .unwrap()
}

/// Original-edge assignment for [`k4_convex_map`]: hull edges 0..=3 are
/// edges 01, 12, 23, 30; edge 4 is the diagonal 02; edge 5 is the
/// diagonal 13.
pub fn k4_convex_drawing() -> Drawing {
    RawDrawing {
        map: k4_convex_map(),
        roles: vec![
            VertexRole::Real,
            VertexRole::Real,
            VertexRole::Real,
            VertexRole::Real,
            VertexRole::Crossing,
        ],
        edge_of_dart: vec![0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5],
    }
    .validate()
    .unwrap()
}

/// Three nested axis-aligned squares joined by two corner connectors, with
/// one added edge between opposite corners of the outer square.
///
/// Cells: outer, ring A–B, ring B–C, inner. With budget 1 the inner cell is
/// the unique far cell.
pub fn nested_squares_coord(l: u32) -> CoordJson {
    CoordJson {
        points: vec![
            (6, 6),
            (-6, 6),
            (-6, -6),
            (6, -6),
            (4, 4),
            (-4, 4),
            (-4, -4),
            (4, -4),
            (2, 2),
            (-2, 2),
            (-2, -2),
            (2, -2),
        ],
        edges: vec![
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 4),
            (8, 9),
            (9, 10),
            (10, 11),
            (11, 8),
            (0, 4),
            (4, 8),
        ],
        added: vec![(1, 3)],
        budgets: vec![l],
        variant: "slcei".into(),
        total: None,
        provenance: None,
    }
}

pub fn nested_squares_instance(l: u32) -> InsertionInstance {
    crate::ingest::ingest_straightline(&nested_squares_coord(l)).unwrap()
}

/// The cell bounded by the innermost square alone.
pub fn nested_squares_innermost_cell(inst: &InsertionInstance) -> FaceId {
    let d = inst.drawing();
    (0..d.map().face_count() as u32)
        .find(|&f| {
            let walk = d.map().boundary_walk(f);
            walk.len() == 4 && walk.iter().all(|&(dart, _)| (8..12).contains(&d.edge_of_dart(dart)))
        })
        .expect("inner square cell")
}

/// Four nested axis-aligned squares (A ⊃ B ⊃ C ⊃ D) joined by corner
/// connectors, plus a horizontal chord through all of B, C, D whose middle
/// segment runs inside D. Spurs attach the chord's dangling endpoints to the
/// B square. The added edge runs from the chord's left endpoint (16) to the
/// B square's top-right corner (4).
///
/// At budget 2 the far cells are the two inner halves of D plus the
/// north-east C–D pocket; the chord is torn into two parts and both are
/// crossable, which forces exactly one thread through the hole.
pub fn torn_chord_coord(l: u32) -> CoordJson {
    CoordJson {
        points: vec![
            (8, 8),
            (-8, 8),
            (-8, -8),
            (8, -8),
            (6, 6),
            (-6, 6),
            (-6, -6),
            (6, -6),
            (4, 4),
            (-4, 4),
            (-4, -4),
            (4, -4),
            (2, 2),
            (-2, 2),
            (-2, -2),
            (2, -2),
            (-7, 0),
            (7, 0),
        ],
        edges: vec![
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 4),
            (8, 9),
            (9, 10),
            (10, 11),
            (11, 8),
            (12, 13),
            (13, 14),
            (14, 15),
            (15, 12),
            (0, 4),
            (4, 8),
            (8, 12),
            (16, 17),
            (16, 5),
            (17, 4),
        ],
        added: vec![(16, 4)],
        budgets: vec![l],
        variant: "slcei".into(),
        total: None,
        provenance: None,
    }
}

pub fn torn_chord_instance(l: u32) -> InsertionInstance {
    crate::ingest::ingest_straightline(&torn_chord_coord(l)).unwrap()
}
