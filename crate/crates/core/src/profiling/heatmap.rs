use ndarray::Array2;

use crate::dataset::BiomarkerDescriptor;
use crate::svg::Svg;

/// |z| at which the colour scale saturates.
pub const HEAT_CLIP: f64 = 3.0;

const NEUTRAL: [f64; 3] = [247.0, 247.0, 247.0];
const WARM: [f64; 3] = [178.0, 24.0, 43.0];
const COOL: [f64; 3] = [33.0, 102.0, 172.0];

/// Diverging scale: neutral at 0, warm above, cool below, linear in z and
/// clipped at `HEAT_CLIP`.
pub fn heat_color(z: f64) -> String {
    let t = (z / HEAT_CLIP).clamp(-1.0, 1.0);
    let end = if t >= 0.0 { WARM } else { COOL };
    let a = t.abs();
    let c: Vec<u8> = (0..3)
        .map(|i| (NEUTRAL[i] + a * (end[i] - NEUTRAL[i])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn annotate(z: f64) -> String {
    let s = format!("{z:.1}");
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

/// One row per cluster, one column per biomarker, annotated with z.
pub fn render_heatmap(signatures: &Array2<f64>, schema: &[BiomarkerDescriptor], row_labels: &[String]) -> String {
    let (k, b) = signatures.dim();
    let (cell_w, cell_h) = (34.0, 24.0);
    let (left, top) = (170.0, 120.0);
    let width = left + cell_w * b as f64 + 20.0;
    let height = top + cell_h * k as f64 + 20.0;
    let mut svg = Svg::new(width, height);
    svg.text(left, 18.0, 12.0, "start", "Cluster centroid z-scores");

    for (j, d) in schema.iter().enumerate().take(b) {
        let x = left + cell_w * (j as f64 + 0.5);
        svg.rotated_text(x, top - 6.0, 9.0, -60.0, &d.label());
    }
    for r in 0..k {
        let y = top + cell_h * r as f64;
        let label = row_labels.get(r).cloned().unwrap_or_else(|| format!("cluster {r}"));
        svg.text(left - 6.0, y + cell_h * 0.65, 10.0, "end", &label);
        for j in 0..b {
            let z = signatures[[r, j]];
            let x = left + cell_w * j as f64;
            svg.rect(x, y, cell_w, cell_h, &heat_color(z));
            svg.text(x + cell_w / 2.0, y + cell_h * 0.65, 8.0, "middle", &annotate(z));
        }
    }
    svg.finish()
}
