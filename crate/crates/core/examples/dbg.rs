fn main() {
    let inst = sdx::testgraphs::torn_chord_instance(2);
    let d = inst.drawing();
    let dual = sdx::dual::build_dual(d);
    let dec = sdx::dual::holes(&inst, &dual);
    println!("faces {} far {:?}", d.map().face_count(), dec.far_all);
    println!("holes {:?}", dec.holes.iter().map(|h| &h.cells).collect::<Vec<_>>());
    for (h, t) in dec.torn.iter().enumerate() {
        for ep in t { println!("hole {h}: edge {} parts {:?}", ep.edge, ep.parts.len()); }
    }
    let gpd = sdx::crossable::build_gpd(&inst, &dec);
    let parts = sdx::crossable::crossable_parts(&inst, &dec, &gpd, 0);
    println!("walks {} per_hole {:?}", parts.walks_found, parts.per_hole);
}
