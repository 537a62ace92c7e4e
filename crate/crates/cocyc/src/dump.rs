//! Plain text dump of one pyramid level, for debugging and golden files.
//!
//! Format, one record per line, ids in ascending order:
//!
//! ```text
//! level <k> of <height>
//! vertices <count>: <id> <id> ...
//! corners <count>: <id> <id> ...
//! edge <id> crack <x1>,<y1>-<x2>,<y2> vertices <v0> <v1> corners <c0> <c1>
//! kernel root <r> edges <edge>:<child>><parent> ...
//! contract <edge> into <vertex>
//! pending <edge> eliminate <corner> into <corner>
//! chain <edge> eliminate <corner> into <corner> survivor <edge>
//! ```
//!
//! `kernel` and the operation lines describe the step from level `k` to
//! `k + 1` and are absent on the top level. Operations keep log order.
//! Vertex `v0` of an edge is the one on dart side 0.

use std::fmt::Write;

use cocyc_core::{Op, Pyramid};

pub fn level_text(p: &Pyramid, k: usize) -> cocyc_core::Result<String> {
    let level = p.level(k)?;
    let pm = p.pixel_map();
    let mut s = String::new();
    let join = |ids: &[u32]| ids.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    writeln!(s, "level {k} of {}", p.height()).unwrap();
    let mut vertices = level.vertices().to_vec();
    vertices.sort_unstable();
    writeln!(s, "vertices {}: {}", vertices.len(), join(&vertices)).unwrap();
    let mut corners = level.corners().to_vec();
    corners.sort_unstable();
    writeln!(s, "corners {}: {}", corners.len(), join(&corners)).unwrap();
    let mut edges = level.edges().to_vec();
    edges.sort_unstable();
    for e in edges {
        let c = pm.edge_to_crack(e);
        let [v0, v1] = level.endpoints(e).expect("live edge");
        let [c0, c1] = level.corner_endpoints(e).expect("live edge");
        writeln!(
            s,
            "edge {e} crack {},{}-{},{} vertices {v0} {v1} corners {c0} {c1}",
            c.a.0, c.a.1, c.b.0, c.b.1
        )
        .unwrap();
    }
    if let Some(log) = p.logs().get(k) {
        for kernel in &log.kernels {
            let parts: Vec<String> =
                kernel.edges.iter().map(|ke| format!("{}:{}>{}", ke.edge, ke.child, ke.parent)).collect();
            writeln!(s, "kernel root {} edges {}", kernel.root, parts.join(" ")).unwrap();
        }
        for op in &log.ops {
            match *op {
                Op::Contract { edge, into } => writeln!(s, "contract {edge} into {into}"),
                Op::RemovePending { edge, eliminated, into } => {
                    writeln!(s, "pending {edge} eliminate {eliminated} into {into}")
                }
                Op::RemoveChain { edge, eliminated, into, survivor } => {
                    writeln!(s, "chain {edge} eliminate {eliminated} into {into} survivor {survivor}")
                }
            }
            .unwrap();
        }
    }
    Ok(s)
}

/// Writes `level_<k>.txt` for every level into `dir`.
pub fn write_all(p: &Pyramid, dir: &std::path::Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for k in 0..=p.height() {
        let text = level_text(p, k).expect("level in range");
        std::fs::write(dir.join(format!("level_{k}.txt")), text)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use cocyc_core::{BinaryImage, PyramidConfig};

    #[test]
    fn two_pixel_dump() {
        let img = BinaryImage::from_ascii("##");
        let p = Pyramid::build(&img, &PyramidConfig::fast(0)).unwrap();
        let base = level_text(&p, 0).unwrap();
        assert!(base.starts_with("level 0 of "));
        assert!(base.contains("vertices 3: 0 1 2\n"));
        assert!(base.contains("corners 6: "));
        assert_eq!(base.lines().filter(|l| l.starts_with("edge ")).count(), 7);
        assert!(base.contains("kernel root 0 edges "));
        let top = level_text(&p, p.height()).unwrap();
        assert!(!top.contains("kernel") && !top.contains("contract"));
    }
}
