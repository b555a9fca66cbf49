//! Insertion instances, problem variants, and the JSON wire formats.

use crate::drawing::{Drawing, DrawingReport, RawDrawing};
use crate::geom::GeomError;
use crate::map::{CombinatorialMap, VertexId, VertexRole};
use serde::{Deserialize, Serialize};

/// Problem variant. The scalar of SCEI / Sℓ-PEI / ℓ-PEI rides along.
///
/// * `Slcei` — per-added-edge budgets, result must be simple. With
///   heterogeneous budgets this is the general crossing-restricted problem;
///   with equal budgets it is SLCEI proper.
/// * `Scei` — one total budget over all crossings involving added edges;
///   each crossing point counts once.
/// * `Slpei` — every edge of the extended drawing, old or new, has at most
///   `l` crossings; result must be simple.
/// * `Lpei` — like `Slpei` without the simplicity requirement.
/// * `NonsimpleLocal` — per-added-edge budgets without simplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Slcei,
    Scei { total: u32 },
    Slpei { l: u32 },
    Lpei { l: u32 },
    NonsimpleLocal,
}

impl Variant {
    pub fn requires_simple(&self) -> bool {
        matches!(self, Variant::Slcei | Variant::Scei { .. } | Variant::Slpei { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Slcei => "slcei",
            Variant::Scei { .. } => "scei",
            Variant::Slpei { .. } => "slpei",
            Variant::Lpei { .. } => "lpei",
            Variant::NonsimpleLocal => "nonsimple-local",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("added edge {i}: endpoints coincide")]
    LoopAdded { i: usize },
    #[error("added edge {i}: vertex out of range or not a real vertex")]
    BadEndpoint { i: usize },
    #[error("added edge {i} already exists in the drawing")]
    NotANonEdge { i: usize },
    #[error("added edges {i} and {j} are the same vertex pair")]
    DuplicateAdded { i: usize, j: usize },
    #[error("budgets has length {got}, expected {want}")]
    BudgetLength { got: usize, want: usize },
    #[error("variant {variant} requires field \"total\"")]
    TotalRequired { variant: String },
    #[error("unknown variant {0:?}")]
    UnknownVariant(String),
    #[error("variant scei requires budgets equal to the total")]
    SceiBudgets,
    #[error("variant {0} requires all budgets equal")]
    UnequalBudgets(&'static str),
}

/// A validated insertion instance: drawing, added endpoint pairs, budgets,
/// variant.
#[derive(Debug, Clone)]
pub struct InsertionInstance {
    drawing: Drawing,
    added: Vec<(VertexId, VertexId)>,
    budgets: Vec<u32>,
    variant: Variant,
}

impl InsertionInstance {
    pub fn new(
        drawing: Drawing,
        added: Vec<(VertexId, VertexId)>,
        budgets: Vec<u32>,
        variant: Variant,
    ) -> Result<Self, InstanceError> {
        if budgets.len() != added.len() {
            return Err(InstanceError::BudgetLength { got: budgets.len(), want: added.len() });
        }
        let nv = drawing.map().vertex_count() as u32;
        for (i, &(s, t)) in added.iter().enumerate() {
            if s == t {
                return Err(InstanceError::LoopAdded { i });
            }
            if s >= nv || t >= nv || drawing.role(s) != VertexRole::Real || drawing.role(t) != VertexRole::Real {
                return Err(InstanceError::BadEndpoint { i });
            }
            if drawing.is_edge_between(s, t) {
                return Err(InstanceError::NotANonEdge { i });
            }
            for (j, &(s2, t2)) in added.iter().enumerate().take(i) {
                if (s, t) == (s2, t2) || (s, t) == (t2, s2) {
                    return Err(InstanceError::DuplicateAdded { i: j, j: i });
                }
            }
        }
        match variant {
            Variant::Scei { total } => {
                if budgets.iter().any(|&b| b != total) {
                    return Err(InstanceError::SceiBudgets);
                }
            }
            Variant::Slpei { l } | Variant::Lpei { l } => {
                if budgets.iter().any(|&b| b != l) {
                    return Err(InstanceError::UnequalBudgets(variant.name()));
                }
            }
            _ => {}
        }
        Ok(InsertionInstance { drawing, added, budgets, variant })
    }

    pub fn drawing(&self) -> &Drawing {
        &self.drawing
    }

    pub fn k(&self) -> usize {
        self.added.len()
    }

    pub fn added(&self) -> &[(VertexId, VertexId)] {
        &self.added
    }

    pub fn budgets(&self) -> &[u32] {
        &self.budgets
    }

    pub fn budget(&self, i: usize) -> u32 {
        self.budgets[i]
    }

    pub fn max_budget(&self) -> u32 {
        self.budgets.iter().copied().max().unwrap_or(0)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn with_variant(&self, variant: Variant) -> Result<Self, InstanceError> {
        let budgets = match variant {
            Variant::Scei { total } => vec![total; self.k()],
            Variant::Slpei { l } | Variant::Lpei { l } => vec![l; self.k()],
            _ => self.budgets.clone(),
        };
        InsertionInstance::new(self.drawing.clone(), self.added.clone(), budgets, variant)
    }
}

// ---------------------------------------------------------------------------
// Wire formats.

/// JSON schema of a combinatorial map. All arrays are 0-indexed and must
/// have length `darts`; `roles` and `edge_of` are per dart.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub darts: usize,
    pub twin: Vec<u32>,
    pub rot: Vec<u32>,
    pub vertex_of: Vec<u32>,
    pub roles: Vec<String>,
    pub edge_of: Vec<u32>,
    pub outer_face_dart: u32,
}

/// JSON schema of an instance over an explicit combinatorial map.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    pub map: MapJson,
    pub added: Vec<(u32, u32)>,
    pub budgets: Vec<u32>,
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<u32>,
}

/// JSON schema of a straight-line coordinate instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordJson {
    pub points: Vec<(i64, i64)>,
    pub edges: Vec<(u32, u32)>,
    pub added: Vec<(u32, u32)>,
    pub budgets: Vec<u32>,
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub seed: u64,
    pub grid: i64,
    pub attempts: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}{}: {msg}", .index.map(|i| format!("[{i}]")).unwrap_or_default())]
    Positioned { field: &'static str, index: Option<usize>, msg: String },
    #[error("invalid drawing:\n{0}")]
    Drawing(DrawingReport),
    #[error("geometry: {0}")]
    Geom(#[from] GeomError),
    #[error("instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("input is neither a map, an instance, nor a coordinate instance")]
    UnknownShape,
}

fn positioned(field: &'static str, index: Option<usize>, msg: impl Into<String>) -> LoadError {
    LoadError::Positioned { field, index, msg: msg.into() }
}

pub fn parse_variant(name: &str, total: Option<u32>) -> Result<Variant, InstanceError> {
    match name {
        "slcei" => Ok(Variant::Slcei),
        "nonsimple-local" => Ok(Variant::NonsimpleLocal),
        "scei" => total
            .map(|total| Variant::Scei { total })
            .ok_or(InstanceError::TotalRequired { variant: name.into() }),
        "slpei" => total
            .map(|l| Variant::Slpei { l })
            .ok_or(InstanceError::TotalRequired { variant: name.into() }),
        "lpei" => total
            .map(|l| Variant::Lpei { l })
            .ok_or(InstanceError::TotalRequired { variant: name.into() }),
        other => Err(InstanceError::UnknownVariant(other.into())),
    }
}

/// Derives the variant scalar from budgets when `total` is omitted: for
/// `slpei`/`lpei` the common budget, for `scei` there is no sensible default
/// and the field stays required.
pub fn variant_from_json(name: &str, total: Option<u32>, budgets: &[u32]) -> Result<Variant, InstanceError> {
    let effective = match (name, total) {
        ("slpei", None) | ("lpei", None) if !budgets.is_empty() => Some(budgets[0]),
        _ => total,
    };
    parse_variant(name, effective)
}

impl MapJson {
    pub fn to_drawing(&self) -> Result<Drawing, LoadError> {
        let n = self.darts;
        let check_len = |field: &'static str, len: usize| -> Result<(), LoadError> {
            if len != n {
                Err(positioned(field, None, format!("length {len}, expected darts = {n}")))
            } else {
                Ok(())
            }
        };
        check_len("twin", self.twin.len())?;
        check_len("rot", self.rot.len())?;
        check_len("vertex_of", self.vertex_of.len())?;
        check_len("roles", self.roles.len())?;
        check_len("edge_of", self.edge_of.len())?;
        for (field, arr) in [("twin", &self.twin), ("rot", &self.rot)] {
            for (i, &v) in arr.iter().enumerate() {
                if v as usize >= n {
                    return Err(positioned(field, Some(i), format!("dart {v} out of range")));
                }
            }
        }
        if self.outer_face_dart as usize >= n {
            return Err(positioned("outer_face_dart", None, "dart out of range"));
        }
        let mut roles_by_dart = Vec::with_capacity(n);
        for (i, r) in self.roles.iter().enumerate() {
            match r.as_str() {
                "real" => roles_by_dart.push(VertexRole::Real),
                "crossing" => roles_by_dart.push(VertexRole::Crossing),
                other => return Err(positioned("roles", Some(i), format!("unknown role {other:?}"))),
            }
        }
        let map = CombinatorialMap::build(
            self.twin.clone(),
            self.rot.clone(),
            self.vertex_of.clone(),
            self.outer_face_dart,
        )
        .map_err(|r| LoadError::Drawing(r.into()))?;
        let mut roles = vec![VertexRole::Real; map.vertex_count()];
        for d in 0..n {
            let v = self.vertex_of[d] as usize;
            roles[v] = roles_by_dart[d];
        }
        for d in 0..n {
            if roles[self.vertex_of[d] as usize] != roles_by_dart[d] {
                return Err(positioned("roles", Some(d), "role differs between darts of one vertex"));
            }
        }
        RawDrawing { map, roles, edge_of_dart: self.edge_of.clone() }
            .validate()
            .map_err(LoadError::Drawing)
    }

    pub fn from_drawing(d: &Drawing) -> MapJson {
        let map = d.map();
        let n = map.dart_count();
        MapJson {
            darts: n,
            twin: (0..n as u32).map(|x| map.twin(x)).collect(),
            rot: (0..n as u32).map(|x| map.rot(x)).collect(),
            vertex_of: (0..n as u32).map(|x| map.vertex_of(x)).collect(),
            roles: (0..n as u32)
                .map(|x| match d.role(map.vertex_of(x)) {
                    VertexRole::Real => "real".to_string(),
                    VertexRole::Crossing => "crossing".to_string(),
                })
                .collect(),
            edge_of: (0..n as u32).map(|x| d.edge_of_dart(x)).collect(),
            outer_face_dart: map.faces()[map.outer_face() as usize][0],
        }
    }
}

impl InstanceJson {
    pub fn to_instance(&self) -> Result<InsertionInstance, LoadError> {
        let drawing = self.map.to_drawing()?;
        let variant = variant_from_json(&self.variant, self.total, &self.budgets)?;
        Ok(InsertionInstance::new(drawing, self.added.clone(), self.budgets.clone(), variant)?)
    }

    pub fn from_instance(inst: &InsertionInstance) -> InstanceJson {
        let (variant, total) = match inst.variant() {
            Variant::Slcei => ("slcei", None),
            Variant::Scei { total } => ("scei", Some(total)),
            Variant::Slpei { l } => ("slpei", Some(l)),
            Variant::Lpei { l } => ("lpei", Some(l)),
            Variant::NonsimpleLocal => ("nonsimple-local", None),
        };
        InstanceJson {
            map: MapJson::from_drawing(inst.drawing()),
            added: inst.added().to_vec(),
            budgets: inst.budgets().to_vec(),
            variant: variant.to_string(),
            total,
        }
    }
}

/// Parses any of the accepted instance shapes: a coordinate instance, a
/// combinatorial instance, or a bare map (which yields an instance with no
/// added edges under `slcei`).
pub fn instance_from_json(text: &str) -> Result<InsertionInstance, LoadError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value.as_object().ok_or(LoadError::UnknownShape)?;
    if obj.contains_key("points") {
        let cj: CoordJson = serde_json::from_value(value)?;
        crate::ingest::ingest_straightline(&cj)
    } else if obj.contains_key("map") {
        let ij: InstanceJson = serde_json::from_value(value)?;
        ij.to_instance()
    } else if obj.contains_key("darts") {
        let mj: MapJson = serde_json::from_value(value)?;
        let drawing = mj.to_drawing()?;
        Ok(InsertionInstance::new(drawing, vec![], vec![], Variant::Slcei)?)
    } else {
        Err(LoadError::UnknownShape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgraphs;

    #[test]
    fn map_json_round_trip() {
        let d = testgraphs::k4_convex_drawing();
        let j = MapJson::from_drawing(&d);
        let d2 = j.to_drawing().unwrap();
        let j2 = MapJson::from_drawing(&d2);
        assert_eq!(serde_json::to_string(&j).unwrap(), serde_json::to_string(&j2).unwrap());
    }

    #[test]
    fn bad_role_is_positioned() {
        let d = testgraphs::triangle_drawing();
        let mut j = MapJson::from_drawing(&d);
        j.roles[3] = "croissant".into();
        let err = j.to_drawing().unwrap_err();
        assert!(err.to_string().contains("roles[3]"));
    }

    #[test]
    fn added_edge_must_be_nonedge() {
        let d = testgraphs::triangle_drawing();
        let err = InsertionInstance::new(d, vec![(0, 1)], vec![1], Variant::Slcei).unwrap_err();
        assert!(matches!(err, InstanceError::NotANonEdge { .. }));
    }
}
