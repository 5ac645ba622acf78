use super::LinkageTree;
use crate::svg::Svg;

/// Renders the tree with leaves along the bottom and merge height upwards.
pub fn render_dendrogram(tree: &LinkageTree, labels: &[String]) -> String {
    let n = tree.leaf_count;
    let (margin_x, top, plot_h, label_h) = (50.0, 30.0, 360.0, 80.0);
    let spacing = if n > 60 { 6.0 } else { 14.0 };
    let width = 2.0 * margin_x + spacing * n.max(1) as f64;
    let height = top + plot_h + label_h;
    let max_h = tree.heights().fold(0.0, f64::max);
    let y_of = |h: f64| {
        if max_h > 0.0 {
            top + plot_h * (1.0 - h / max_h)
        } else {
            top + plot_h
        }
    };

    let mut x = vec![0.0; n + tree.merges.len()];
    let mut y = vec![y_of(0.0); n + tree.merges.len()];
    for (pos, leaf) in tree.leaf_order().into_iter().enumerate() {
        x[leaf] = margin_x + spacing * (pos as f64 + 0.5);
    }

    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, 18.0, 12.0, "middle", "Ward linkage dendrogram");
    svg.polyline(&[(margin_x - 10.0, top), (margin_x - 10.0, top + plot_h)], "#555555");
    svg.text(margin_x - 14.0, top + 4.0, 9.0, "end", &format!("{max_h:.1}"));
    svg.text(margin_x - 14.0, top + plot_h, 9.0, "end", "0");

    for (step, m) in tree.merges.iter().enumerate() {
        let node = n + step;
        let h = y_of(m.height);
        x[node] = 0.5 * (x[m.left] + x[m.right]);
        y[node] = h;
        svg.polyline(
            &[(x[m.left], y[m.left]), (x[m.left], h), (x[m.right], h), (x[m.right], y[m.right])],
            "#333333",
        );
    }
    if n <= 120 {
        for (leaf, label) in labels.iter().enumerate().take(n) {
            svg.rotated_text(x[leaf], top + plot_h + 8.0, 8.0, -90.0, label);
        }
    }
    svg.finish()
}
