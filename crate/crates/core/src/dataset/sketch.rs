use std::fmt::Write;

use super::layout::{build_layout, Layout};
use super::spec::GenSpec;

const SCALE: f64 = 30.0;
const MARGIN: f64 = 60.0;
const BOX_W: f64 = 84.0;
const BOX_H: f64 = 30.0;
const TITLE_H: f64 = 40.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Point where the segment from the centre of a box toward `(dx, dy)`
/// leaves the box.
fn box_exit(dx: f64, dy: f64) -> (f64, f64) {
    let tx = if dx == 0.0 { f64::INFINITY } else { (BOX_W / 2.0) / dx.abs() };
    let ty = if dy == 0.0 { f64::INFINITY } else { (BOX_H / 2.0) / dy.abs() };
    let t = tx.min(ty).min(1.0);
    (dx * t, dy * t)
}

/// Draws `spec` as an SVG document: one labelled box per object, an arrow
/// per flow connection and a dashed line per transporter binding.
pub fn render_sketch(spec: &GenSpec) -> String {
    draw(spec, &build_layout(spec))
}

pub(crate) fn draw(spec: &GenSpec, layout: &Layout) -> String {
    let xs = layout.objects.iter().map(|o| o.position[0]);
    let ys = layout.objects.iter().map(|o| o.position[1]);
    let min_x = xs.clone().fold(f64::INFINITY, f64::min);
    let max_x = xs.fold(f64::NEG_INFINITY, f64::max);
    let min_y = ys.clone().fold(f64::INFINITY, f64::min);
    let max_y = ys.fold(f64::NEG_INFINITY, f64::max);
    let px = |x: f64| MARGIN + (x - min_x) * SCALE;
    let py = |y: f64| TITLE_H + MARGIN + (y - min_y) * SCALE;
    let width = 2.0 * MARGIN + (max_x - min_x) * SCALE;
    let height = TITLE_H + 2.0 * MARGIN + (max_y - min_y) * SCALE;
    let centre = |name: &str| {
        let o = layout.object(name).expect("edge endpoints are placed");
        (px(o.position[0]), py(o.position[1]))
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    svg.push_str(concat!(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" ",
        "markerWidth=\"8\" markerHeight=\"8\" orient=\"auto-start-reverse\">",
        "<path d=\"M 0 0 L 10 5 L 0 10 z\"/></marker></defs>\n"
    ));
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{MARGIN}" y="28" font-family="sans-serif" font-size="16">{} | {} | {} | {}</text>"#,
        escape(&spec.industry.replace('_', " ")),
        escape(spec.automation.label()),
        spec.layout_category.label(),
        spec.layout_type,
    );

    for (from, to) in &layout.bindings {
        let (x1, y1) = centre(from);
        let (x2, y2) = centre(to);
        let _ = writeln!(
            svg,
            r#"<line class="binding" data-from="{}" data-to="{}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="gray" stroke-dasharray="4 3"/>"#,
            escape(from),
            escape(to)
        );
    }
    for (from, to) in &layout.flow {
        let (x1, y1) = centre(from);
        let (x2, y2) = centre(to);
        let (ox, oy) = box_exit(x2 - x1, y2 - y1);
        let _ = writeln!(
            svg,
            r#"<line class="flow" data-from="{}" data-to="{}" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" marker-end="url(#arrow)"/>"#,
            escape(from),
            escape(to),
            x1 + ox,
            y1 + oy,
            x2 - ox,
            y2 - oy
        );
    }
    for o in &layout.objects {
        let (cx, cy) = (px(o.position[0]), py(o.position[1]));
        let name = escape(&o.name);
        let _ = writeln!(
            svg,
            r#"<rect class="object" data-name="{name}" data-type="{}" x="{:.1}" y="{:.1}" width="{BOX_W}" height="{BOX_H}" fill="white" stroke="black"/>"#,
            o.obj_type.path(),
            cx - BOX_W / 2.0,
            cy - BOX_H / 2.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="label" x="{cx:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{name}</text>"#,
            cy + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
