//! Minimal SVG line charts: axes, ticks, and polylines.
//!
//! Figures are diagnostics generated from the CSV artifacts, not the product;
//! there is no styling beyond stroke color and dashing.

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

/// Render series sharing an x-range of `[0, 1]`.
pub fn line_chart(title: &str, series: &[Series]) -> String {
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(_, y) in &s.points {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let x_px = |x: f64| MARGIN_L + x * (WIDTH - MARGIN_L - MARGIN_R);
    let y_px = |y: f64| {
        HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        MARGIN_L,
        xml_escape(title)
    ));
    // axes
    out.push_str(&format!(
        "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    out.push_str(&format!(
        "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_L,
        MARGIN_T,
        MARGIN_L,
        HEIGHT - MARGIN_B
    ));
    // ticks
    for i in 0..=5 {
        let x = i as f64 / 5.0;
        out.push_str(&format!(
            "  <line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\" stroke=\"black\"/>\n",
            x_px(x),
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        ));
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.1}</text>\n",
            x_px(x),
            HEIGHT - MARGIN_B + 18.0,
            x
        ));
        let y = y_min + (y_max - y_min) * i as f64 / 5.0;
        out.push_str(&format!(
            "  <line x1=\"{1:.1}\" y1=\"{0:.1}\" x2=\"{2:.1}\" y2=\"{0:.1}\" stroke=\"black\"/>\n",
            y_px(y),
            MARGIN_L - 5.0,
            MARGIN_L
        ));
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>\n",
            MARGIN_L - 8.0,
            y_px(y) + 4.0,
            y
        ));
    }
    // series
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", x_px(x), y_px(y)))
            .collect();
        let dash = if s.dashed {
            " stroke-dasharray=\"6,4\""
        } else {
            ""
        };
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\"{} stroke-width=\"1.5\" points=\"{}\"/>\n",
            s.color,
            dash,
            pts.join(" ")
        ));
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n",
            WIDTH - MARGIN_R - 180.0,
            MARGIN_T + 16.0 * (i as f64 + 1.0),
            s.color,
            xml_escape(&s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polylines_and_axes() {
        let svg = line_chart(
            "test",
            &[Series {
                label: "y = x".to_owned(),
                color: "blue",
                dashed: false,
                points: vec![(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)],
            }],
        );
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("</svg>"));
        assert!(svg.matches("<line").count() >= 12);
    }
}
