//! SVG overlay: image pixels with the cocycle cracks drawn as bold segments.

use std::fmt::Write;

use cocyc_core::BinaryImage;

use crate::document::ResultDocument;

const CELL: u32 = 16;
const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf"];

pub fn render(img: &BinaryImage, doc: &ResultDocument) -> String {
    let (w, h) = (img.width() * CELL, img.height() * CELL);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##).unwrap();
    s.push_str(r##"<g fill="#b0b0b0" stroke="#ffffff" stroke-width="0.5">"##);
    s.push('\n');
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.get(x, y) {
                writeln!(s, r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}"/>"#, x * CELL, y * CELL).unwrap();
            }
        }
    }
    s.push_str("</g>\n");
    let mut colour = 0;
    for obj in &doc.objects {
        for hole in &obj.cocycles {
            let c = PALETTE[colour % PALETTE.len()];
            colour += 1;
            writeln!(
                s,
                r#"<g stroke="{c}" stroke-width="4" stroke-linecap="round" data-object="{}" data-hole="{}">"#,
                obj.id, hole.hole
            )
            .unwrap();
            for [[x1, y1], [x2, y2]] in &hole.cracks {
                writeln!(
                    s,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                    x1 * CELL,
                    y1 * CELL,
                    x2 * CELL,
                    y2 * CELL
                )
                .unwrap();
            }
            s.push_str("</g>\n");
        }
    }
    s.push_str("</svg>\n");
    s
}
