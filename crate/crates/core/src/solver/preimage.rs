//! Depth-first enumeration of preimages: k label-patterned walks in the
//! patchwork graph.
//!
//! Walk pattern for edge i with exactly c crossings: real, shadow, cell,
//! then c repetitions of (shadow, segment, shadow, cell), then shadow, real.
//! Distinct walks may meet only in cell vertices, shared real endpoints and
//! their shadows; every segment vertex on a walk must be crossable for its
//! edge; within one walk no vertex repeats except cell vertices. The
//! same-edge exclusion (no two segment vertices of one walk on the same
//! edge) applies to the simple variants; the non-simple variants drop it and
//! let verification count double crossings instead.

use crate::instance::InsertionInstance;
use crate::map::EdgeId;
use crate::patchwork::{Patchwork, PwId, PwLabel, SegmentOrigin};
use std::ops::ControlFlow;

/// k walks in the patchwork graph, each matching the label pattern.
#[derive(Debug, Clone)]
pub struct Preimage {
    pub walks: Vec<Vec<PwId>>,
}

#[derive(Debug, thiserror::Error)]
#[error("node expansion cap exceeded; {expanded} nodes expanded")]
pub struct CapExceeded {
    pub expanded: u64,
}

pub struct SearchBudget {
    pub remaining: u64,
    pub expanded: u64,
}

impl SearchBudget {
    pub fn new(max_nodes: u64) -> Self {
        SearchBudget { remaining: max_nodes, expanded: 0 }
    }

    pub(crate) fn tick(&mut self) -> Result<(), CapExceeded> {
        self.expanded += 1;
        if self.remaining == 0 {
            return Err(CapExceeded { expanded: self.expanded });
        }
        self.remaining -= 1;
        Ok(())
    }
}

/// Streams all preimages for the exact crossing profile in deterministic
/// order (ascending node ids at every choice point).
///
/// `partial` runs after each completed walk and may veto the prefix;
/// `visit` receives complete preimages and may stop the search.
pub fn for_each_preimage(
    inst: &InsertionInstance,
    pw: &Patchwork,
    profile: &[u32],
    enforce_same_edge: bool,
    budget: &mut SearchBudget,
    partial: &mut dyn FnMut(&[Vec<PwId>]) -> bool,
    visit: &mut dyn FnMut(&Preimage) -> ControlFlow<()>,
) -> Result<ControlFlow<()>, CapExceeded> {
    let mut search = PreimageSearch {
        inst,
        pw,
        profile,
        enforce_same_edge,
        used_seg: vec![false; pw.node_count()],
        walks: Vec::new(),
        budget,
        partial,
        visit,
    };
    search.place_edge(0)
}

struct PreimageSearch<'a> {
    inst: &'a InsertionInstance,
    pw: &'a Patchwork,
    profile: &'a [u32],
    enforce_same_edge: bool,
    used_seg: Vec<bool>,
    walks: Vec<Vec<PwId>>,
    budget: &'a mut SearchBudget,
    partial: &'a mut dyn FnMut(&[Vec<PwId>]) -> bool,
    visit: &'a mut dyn FnMut(&Preimage) -> ControlFlow<()>,
}

impl<'a> PreimageSearch<'a> {
    fn place_edge(&mut self, i: usize) -> Result<ControlFlow<()>, CapExceeded> {
        if i == self.walks.len() && i == self.profile.len() {
            let preimage = Preimage { walks: self.walks.clone() };
            return Ok((self.visit)(&preimage));
        }
        let (s, _t) = self.inst.added()[i];
        let Some(s_node) = self.pw.node_of_vertex[s as usize] else {
            return Ok(ControlFlow::Continue(()));
        };
        let start_shadows: Vec<PwId> = self
            .pw
            .endpoint_shadows
            .get(&s_node)
            .map(|v| v.to_vec())
            .unwrap_or_default();
        for sh in start_shadows {
            let PwLabel::Shadow { cell, .. } = self.pw.labels[sh as usize] else { unreachable!() };
            let mut walk = vec![s_node, sh, cell];
            if let ControlFlow::Break(()) = self.step(i, &mut walk, 0)? {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    fn step(&mut self, i: usize, walk: &mut Vec<PwId>, used: u32) -> Result<ControlFlow<()>, CapExceeded> {
        self.budget.tick()?;
        let cell = *walk.last().unwrap();
        if used == self.profile[i] {
            let (_s, t) = self.inst.added()[i];
            let Some(t_node) = self.pw.node_of_vertex[t as usize] else {
                return Ok(ControlFlow::Continue(()));
            };
            let end_shadows: Vec<PwId> = self
                .pw
                .endpoint_shadows
                .get(&t_node)
                .map(|v| v.to_vec())
                .unwrap_or_default();
            for sh in end_shadows {
                let PwLabel::Shadow { cell: sh_cell, .. } = self.pw.labels[sh as usize] else {
                    unreachable!()
                };
                if sh_cell != cell {
                    continue;
                }
                walk.push(sh);
                walk.push(t_node);
                self.walks.push(walk.clone());
                let go = (self.partial)(&self.walks);
                let flow = if go { self.place_edge(i + 1)? } else { ControlFlow::Continue(()) };
                self.walks.pop();
                walk.pop();
                walk.pop();
                if flow.is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            }
            return Ok(ControlFlow::Continue(()));
        }

        let ring: Vec<PwId> = self.pw.ring_of_cell_node(cell).to_vec();
        let mut candidates: Vec<PwId> = ring;
        candidates.sort_unstable();
        for sh in candidates {
            let PwLabel::Shadow { anchor, .. } = self.pw.labels[sh as usize] else { unreachable!() };
            let PwLabel::Segment { origin } = self.pw.labels[anchor as usize] else {
                continue; // endpoint shadows do not continue a walk
            };
            let SegmentOrigin::Drawing { .. } = origin else { continue };
            if self.used_seg[anchor as usize] || !self.pw.is_crossable_for(anchor, i) {
                continue;
            }
            let shadows = &self.pw.seg_shadows[&anchor];
            if shadows.len() != 2 {
                continue; // hole-boundary segment: the far side is gone
            }
            let other = if shadows[0] == sh { shadows[1] } else { shadows[0] };
            debug_assert!(shadows.contains(&sh));
            let edge = self.pw.lineage_edge[&anchor];
            if self.crossing_excluded(i, walk, anchor, edge) {
                continue;
            }
            let PwLabel::Shadow { cell: cell2, .. } = self.pw.labels[other as usize] else {
                unreachable!()
            };
            self.used_seg[anchor as usize] = true;
            walk.extend([sh, anchor, other, cell2]);
            let flow = self.step(i, walk, used + 1)?;
            walk.truncate(walk.len() - 4);
            self.used_seg[anchor as usize] = false;
            if flow.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Same-edge exclusion for simple variants, cross-validated against the
    /// tracking-label lineage; in simple variants a curve also never crosses
    /// an edge incident to one of its own endpoints.
    fn crossing_excluded(&self, i: usize, walk: &[PwId], anchor: PwId, edge: EdgeId) -> bool {
        if !self.enforce_same_edge {
            return false;
        }
        let (s, t) = self.inst.added()[i];
        let (a, b) = self.inst.drawing().edge_endpoints(edge);
        if a == s || a == t || b == s || b == t {
            return true;
        }
        for &n in walk.iter() {
            if let PwLabel::Segment { .. } = self.pw.labels[n as usize] {
                let same_edge = self.pw.lineage_edge[&n] == edge;
                let reachable = self.pw.same_edge_reachable(n, anchor, i);
                // Both vertices on a walk are crossable for i, so the lemma
                // guarantees the two criteria coincide.
                assert_eq!(
                    same_edge, reachable,
                    "same-edge identity and tracking-lineage reachability disagree"
                );
                if same_edge {
                    return true;
                }
            }
        }
        false
    }
}

/// First preimage in search order, if any (spec surface; the solver streams
/// instead).
pub fn search_preimage(
    inst: &InsertionInstance,
    pw: &Patchwork,
    profile: &[u32],
    enforce_same_edge: bool,
    max_nodes: u64,
) -> Result<Option<Preimage>, CapExceeded> {
    let mut found = None;
    let mut budget = SearchBudget::new(max_nodes);
    let _ = for_each_preimage(
        inst,
        pw,
        profile,
        enforce_same_edge,
        &mut budget,
        &mut |_| true,
        &mut |p| {
            found = Some(p.clone());
            ControlFlow::Break(())
        },
    )?;
    Ok(found)
}
