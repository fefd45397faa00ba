use std::fmt::Write as _;

use magnus_lab::operators::ComplexMatrix;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Errors below this are treated as rounding noise when fitting slopes.
pub const NOISE_FLOOR: f64 = 1e-12;

pub enum Report {
    Json(Value),
    Csv(String),
}

impl Report {
    pub fn render(&self) -> String {
        match self {
            Report::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("report serializes");
                s.push('\n');
                s
            }
            Report::Csv(s) => s.clone(),
        }
    }
}

/// Header object shared by every JSON report.
pub fn json_header(command: &str, config: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
    })
}

pub fn matrix_json(m: &ComplexMatrix) -> Value {
    let part = |f: fn(&magnus_lab::operators::Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect())
            .collect()
    };
    json!({ "re": part(|z| z.re), "im": part(|z| z.im) })
}

/// CSV table with `#` comment rows before the header and after the body.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(command: &str, config: &Value) -> Self {
        let mut text = String::new();
        writeln!(text, "# schema_version,{SCHEMA_VERSION}").unwrap();
        writeln!(text, "# command,{command}").unwrap();
        writeln!(text, "# config,{config}").unwrap();
        Csv { text }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        let cells: Vec<&str> = cells.iter().map(|c| c.as_ref()).collect();
        writeln!(self.text, "{}", cells.join(",")).unwrap();
    }

    pub fn comment(&mut self, key: &str, value: &str) {
        writeln!(self.text, "# {key},{value}").unwrap();
    }

    pub fn finish(self) -> Report {
        Report::Csv(self.text)
    }
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn slope_cell(s: Option<f64>) -> String {
    s.map_or_else(|| "N/A".to_string(), |v| format!("{v:.4}"))
}

/// Slope of `log y` against `log x` between two points.
pub fn pair_slope(x0: f64, y0: f64, x1: f64, y1: f64) -> Option<f64> {
    if y0 < NOISE_FLOOR || y1 < NOISE_FLOOR {
        return None;
    }
    Some((y1 / y0).ln() / (x1 / x0).ln())
}

/// Least-squares slope of `log y` against `log x`. None if any `y` sits
/// at the noise floor or fewer than two points are given.
pub fn fitted_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || ys.iter().any(|&y| y < NOISE_FLOOR) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slopes_of_power_laws() {
        let xs = [0.25, 0.125, 0.0625];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((fitted_slope(&xs, &ys).unwrap() - 2.0).abs() < 1e-12);
        assert!((pair_slope(xs[0], ys[0], xs[1], ys[1]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fitted_slope(&xs, &[1.0, 1e-15, 1.0]), None);
        assert_eq!(fitted_slope(&xs[..1], &ys[..1]), None);
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new("converge", &json!({"p": 1}));
        csv.row(&["h", "error"]);
        csv.row(&[num(0.5), num(1e-3)]);
        csv.comment("fitted_slope", &slope_cell(None));
        let Report::Csv(text) = csv.finish() else { unreachable!() };
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema_version,1");
        assert_eq!(lines[2], "# config,{\"p\":1}");
        assert_eq!(lines[3], "h,error");
        assert_eq!(lines[4], "5e-1,1e-3");
        assert_eq!(lines[5], "# fitted_slope,N/A");
    }
}
