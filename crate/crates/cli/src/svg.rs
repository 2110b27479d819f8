use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const PAD: f64 = 48.0;

/// A minimal SVG 1.1 canvas over a fixed data window.
pub struct Plot {
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        Plot { x: widen(x), y: widen(y), body: String::new() }
    }

    /// Square window around the given points with equal scale on both axes.
    pub fn fitted(points: impl IntoIterator<Item = (f64, f64)>, margin: f64) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return Plot::new((-1.0, 1.0), (-1.0, 1.0));
        }
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        let half = ((x1 - x0).max(y1 - y0) / 2.0 + margin).max(1e-9);
        let aspect = (WIDTH - 2.0 * PAD) / (HEIGHT - 2.0 * PAD);
        Plot::new((cx - half * aspect, cx + half * aspect), (cy - half, cy + half))
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * PAD)
    }

    fn scale(&self) -> f64 {
        (HEIGHT - 2.0 * PAD) / (self.y.1 - self.y.0)
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str) {
        let coords: Vec<String> = pts
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{stroke}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
    }

    /// Circle with a radius in data units.
    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, stroke: &str, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" stroke="{stroke}" fill="{fill}"/>"#,
            self.px(cx),
            self.py(cy),
            r * self.scale()
        );
    }

    /// Marker with a radius in pixels.
    pub fn dot(&mut self, cx: f64, cy: f64, px_radius: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{px_radius:.2}" fill="{fill}"/>"#,
            self.px(cx),
            self.py(cy)
        );
    }

    pub fn label(&mut self, x: f64, y: f64, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">{}</text>"#,
            self.px(x),
            self.py(y),
            esc(text)
        );
    }

    pub fn finish(self, title: &str, x_label: &str, y_label: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * PAD,
            HEIGHT - 2.0 * PAD
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" font-size="14" font-family="sans-serif" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            esc(title)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" font-family="sans-serif" text-anchor="middle">{} [{:.3}, {:.3}]</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0,
            esc(x_label),
            self.x.0,
            self.x.1
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{}" font-size="12" font-family="sans-serif" text-anchor="middle" transform="rotate(-90 14 {})">{} [{:.3}, {:.3}]</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            esc(y_label),
            self.y.0,
            self.y.1
        );
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_is_well_formed_and_stable() {
        let mut p = Plot::new((0.0, 1.0), (0.0, 1.0));
        p.polyline(&[(0.0, 0.0), (1.0, 1.0)], "black");
        p.circle(0.5, 0.5, 0.1, "red", "none");
        p.label(0.1, 0.9, "a < b");
        let a = p.finish("t", "x", "y");
        assert!(a.starts_with("<?xml"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("a &lt; b"));
        assert!(a.contains(r#"points="48.00,432.00 592.00,48.00""#));
    }
}
