//! Minimal static SVG plots: line series and scatter, no external renderer.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf"];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in s.points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    if !x0.is_finite() || x0 == x1 {
        x1 = x0 + 1.0;
    }
    if !y0.is_finite() || y0 == y1 {
        y1 = y0 + 1.0;
    }
    (x0, x1, y0, y1)
}

fn render(series: &[Series], title: &str, scatter: bool) -> String {
    let (x0, x1, y0, y1) = bounds(series);
    let sx = (WIDTH - 2.0 * MARGIN) / (x1 - x0);
    let sy = (HEIGHT - 2.0 * MARGIN) / (y1 - y0);
    let px = |x: f64| MARGIN + (x - x0) * sx;
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) * sy;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"black\"/>\n",
        m = MARGIN,
        w = WIDTH - 2.0 * MARGIN,
        h = HEIGHT - 2.0 * MARGIN
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        MARGIN / 2.0,
        xml_escape(title)
    ));
    // axis range labels
    for (x, y, anchor, text) in [
        (MARGIN, HEIGHT - MARGIN + 18.0, "middle", format!("{x0:.4}")),
        (WIDTH - MARGIN, HEIGHT - MARGIN + 18.0, "middle", format!("{x1:.4}")),
        (MARGIN - 6.0, HEIGHT - MARGIN, "end", format!("{y0:.4}")),
        (MARGIN - 6.0, MARGIN + 4.0, "end", format!("{y1:.4}")),
    ] {
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"12\">{text}</text>\n"
        ));
    }

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        if scatter {
            for &(x, y) in s.points {
                out.push_str(&format!(
                    "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"1.5\" fill=\"{color}\"/>\n",
                    px(x),
                    py(y)
                ));
            }
        } else if !s.points.is_empty() {
            let mut d = String::new();
            for (i, &(x, y)) in s.points.iter().enumerate() {
                d.push_str(if i == 0 { "M" } else { "L" });
                d.push_str(&format!("{:.3} {:.3}", px(x), py(y)));
            }
            out.push_str(&format!(
                "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1\"/>\n"
            ));
        }
        // legend
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            MARGIN + 8.0,
            MARGIN + 16.0 + 14.0 * k as f64,
            xml_escape(s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

pub fn line_plot(series: &[Series], title: &str) -> String {
    render(series, title, false)
}

pub fn scatter_plot(series: &[Series], title: &str) -> String {
    render(series, title, true)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
