//! Standalone SVG line charts for evaluation and forecast output.

use crate::error::{Error, Result};

/// One plotted line.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesLine {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Affine mapping between data space and pixel space; exposed so tests can
/// invert emitted coordinates back to data values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartGeometry {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl ChartGeometry {
    pub fn map_x(&self, x: f64) -> f64 {
        self.margin
            + (x - self.x_min) / (self.x_max - self.x_min) * (self.width - 2.0 * self.margin)
    }

    pub fn map_y(&self, y: f64) -> f64 {
        // SVG y grows downward.
        self.height
            - self.margin
            - (y - self.y_min) / (self.y_max - self.y_min) * (self.height - 2.0 * self.margin)
    }

    pub fn unmap_x(&self, px: f64) -> f64 {
        self.x_min
            + (px - self.margin) / (self.width - 2.0 * self.margin) * (self.x_max - self.x_min)
    }

    pub fn unmap_y(&self, py: f64) -> f64 {
        self.y_min
            + (self.height - self.margin - py) / (self.height - 2.0 * self.margin)
                * (self.y_max - self.y_min)
    }
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render a line chart; returns the document and the geometry used.
pub fn line_chart(title: &str, series: &[SeriesLine]) -> Result<(String, ChartGeometry)> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return Err(Error::EmptyInput("chart with no data".into()));
    }
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("chart data".into()));
        }
        x_min = x_min.min(*x);
        x_max = x_max.max(*x);
        y_min = y_min.min(*y);
        y_max = y_max.max(*y);
    }
    if x_max == x_min {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max == y_min {
        let pad = y_min.abs().max(1.0) * 0.1;
        y_min -= pad;
        y_max += pad;
    }

    let geometry = ChartGeometry {
        width: 960.0,
        height: 540.0,
        margin: 70.0,
        x_min,
        x_max,
        y_min,
        y_max,
    };
    let g = &geometry;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = g.width,
        h = g.height
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        g.width, g.height
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">{}</text>\n",
        g.width / 2.0,
        escape(title)
    ));

    // Axes with min/max tick labels.
    let (x0, y0) = (g.margin, g.height - g.margin);
    svg.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        g.width - g.margin
    ));
    svg.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{}\" stroke=\"black\"/>\n",
        g.margin
    ));
    for (value, px) in [(g.x_min, g.map_x(g.x_min)), (g.x_max, g.map_x(g.x_max))] {
        svg.push_str(&format!(
            "  <text x=\"{px}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{value}</text>\n",
            y0 + 20.0
        ));
    }
    for (value, py) in [(g.y_min, g.map_y(g.y_min)), (g.y_max, g.map_y(g.y_max))] {
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{py}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">{value}</text>\n",
            x0 - 8.0
        ));
    }

    for (i, line) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = line
            .points
            .iter()
            .map(|(x, y)| format!("{},{}", g.map_x(*x), g.map_y(*y)))
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        // Legend entry.
        let ly = g.margin + 18.0 * i as f64;
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            g.width - g.margin - 180.0,
            g.width - g.margin - 150.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            g.width - g.margin - 142.0,
            ly + 4.0,
            escape(&line.name)
        ));
    }
    svg.push_str("</svg>\n");
    Ok((svg, geometry))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<SeriesLine> {
        vec![
            SeriesLine {
                name: "a & b".into(),
                points: vec![(2018.0, 10.0), (2019.0, 12.5), (2020.0, 11.0)],
            },
            SeriesLine {
                name: "c".into(),
                points: vec![(2018.0, 5.0), (2019.0, 6.0), (2020.0, 9.0)],
            },
        ]
    }

    #[test]
    fn chart_has_one_polyline_per_series() {
        let (svg, _) = line_chart("demo", &sample()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &amp; b"));
    }

    #[test]
    fn coordinates_invert_back_to_data() {
        let lines = sample();
        let (svg, g) = line_chart("demo", &lines).unwrap();
        // Pull the first polyline's points attribute back out.
        let start = svg.find("points=\"").unwrap() + 8;
        let end = svg[start..].find('"').unwrap() + start;
        let parsed: Vec<(f64, f64)> = svg[start..end]
            .split(' ')
            .map(|pair| {
                let (x, y) = pair.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect();
        for ((px, py), (x, y)) in parsed.iter().zip(&lines[0].points) {
            assert!((g.unmap_x(*px) - x).abs() < 1e-9 * x.abs().max(1.0));
            assert!((g.unmap_y(*py) - y).abs() < 1e-9 * y.abs().max(1.0));
        }
    }

    #[test]
    fn degenerate_ranges_are_padded() {
        let flat = vec![SeriesLine {
            name: "flat".into(),
            points: vec![(1.0, 3.0), (2.0, 3.0)],
        }];
        let (_, g) = line_chart("flat", &flat).unwrap();
        assert!(g.y_max > g.y_min);
    }

    #[test]
    fn empty_chart_is_rejected() {
        assert!(line_chart("none", &[]).is_err());
    }
}
