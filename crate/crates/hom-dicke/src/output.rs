//! CSV and JSON artifacts. Numbers in CSV carry 17 significant digits; JSON
//! objects have sorted keys, so identical results give identical bytes.

use crate::biphoton::CoincidenceTrace;
use crate::config::{ScanConfig, KEYS};
use crate::dicke::PolaritonSpectrum;
use crate::scan::{peak_alignment, LambdaScan, PoleRow, ScanPoint, Skipped, SpectrumPoint};
use crate::{Result, C64};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Minimal RFC-4180 table; fields never need quoting here.
#[derive(Clone, Debug, Default)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Csv::default();
        c.out.push_str(&header.join(","));
        c.out.push_str("\r\n");
        c
    }

    pub fn row(&mut self, fields: &[String]) {
        self.out.push_str(&fields.join(","));
        self.out.push_str("\r\n");
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn complex_list(z: &[C64]) -> Value {
    Value::Array(z.iter().map(|z| json!([z.re, z.im])).collect())
}

pub fn config_json(cfg: &ScanConfig) -> Value {
    let mut m = Map::new();
    for k in KEYS {
        m.insert(k.to_string(), Value::String(cfg.get(k).expect("listed key")));
    }
    Value::Object(m)
}

fn header(cfg: &ScanConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!(TOOL));
    m.insert("version".into(), json!(VERSION));
    m.insert("config".into(), config_json(cfg));
    m
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Columns `t_delay, p_c, p_c_normalized`, plus `p_c_shifted` when `shift`
/// is given.
pub fn trace_csv(trace: &CoincidenceTrace, shift: Option<f64>) -> String {
    let mut head = vec!["t_delay", "p_c", "p_c_normalized"];
    if shift.is_some() {
        head.push("p_c_shifted");
    }
    let mut c = Csv::new(&head);
    for ((t, p), n) in trace.t_delay.iter().zip(&trace.p_c).zip(trace.normalized()) {
        let mut row = vec![fmt17(*t), fmt17(*p), fmt17(n)];
        if let Some(s) = shift {
            row.push(fmt17(n + s));
        }
        c.row(&row);
    }
    c.finish()
}

pub fn trace_json(trace: &CoincidenceTrace, cfg: &ScanConfig, extra: Map<String, Value>) -> Value {
    let mut m = header(cfg);
    m.insert("background".into(), json!(trace.background));
    m.insert("branch".into(), json!(trace.meta.branch.map(|b| b.name())));
    m.insert("lambda".into(), json!(trace.meta.params.map(|p| p.lambda)));
    m.insert("biphoton".into(), json!({"omega_l": trace.meta.spec.omega_l, "b": trace.meta.spec.b}));
    m.insert("points".into(), json!(trace.t_delay.len()));
    m.extend(extra);
    Value::Object(m)
}

fn write(dir: &Path, name: &str, body: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let p = dir.join(name);
    std::fs::write(&p, body)?;
    files.push(p);
    Ok(())
}

fn point_extra(p: &ScanPoint) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("response_poles".into(), complex_list(&p.response_poles));
    m.insert("product_poles".into(), complex_list(&p.product_poles));
    m.insert("quadrature_error_estimate".into(), json!(p.quadrature_error));
    m
}

/// One trace CSV with its JSON sidecar.
pub fn emit_trace(dir: &Path, stem: &str, trace: &CoincidenceTrace, cfg: &ScanConfig, extra: Map<String, Value>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files = vec![];
    let shift = (cfg.output.trace_offset != 0.0).then_some(0.0);
    write(dir, &format!("{stem}.csv"), &trace_csv(trace, shift), &mut files)?;
    write(dir, &format!("{stem}.json"), &to_json_string(&trace_json(trace, cfg, extra)), &mut files)?;
    Ok(files)
}

pub fn spectrum_csv(spectra: &[SpectrumPoint]) -> String {
    let mut c = Csv::new(&["lambda", "omega", "magnitude", "nearest_pole_re"]);
    for s in spectra {
        let sp = &s.spectrum;
        for (w, m) in sp.omega_grid.iter().zip(&sp.magnitude) {
            let near = sp.nearest_pole_re(*w).map(fmt17).unwrap_or_default();
            c.row(&[fmt17(s.lambda), fmt17(*w), fmt17(*m), near]);
        }
    }
    c.finish()
}

pub fn poles_csv(rows: &[PoleRow]) -> String {
    let mut c = Csv::new(&["lambda", "branch", "kind", "index", "re", "im"]);
    for r in rows {
        for (kind, list) in [("response", &r.response_poles), ("product", &r.product_poles)] {
            for (k, z) in list.iter().enumerate() {
                c.row(&[fmt17(r.lambda), r.branch.name().into(), kind.into(), k.to_string(), fmt17(z.re), fmt17(z.im)]);
            }
        }
    }
    c.finish()
}

pub fn eigenvalues_csv(rows: &[(f64, &str, PolaritonSpectrum, Option<(f64, f64)>)]) -> String {
    let mut c = Csv::new(&["lambda", "branch", "index", "label", "re", "im", "closed_form_plus", "closed_form_minus"]);
    for (lambda, branch, sp, cf) in rows {
        for k in 0..5 {
            let e = sp.eigenvalues[k];
            let (p, m) = cf.map(|(p, m)| (fmt17(p), fmt17(m))).unwrap_or_default();
            c.row(&[fmt17(*lambda), branch.to_string(), k.to_string(), format!("{:?}", sp.labels[k]), fmt17(e.re), fmt17(e.im), p, m]);
        }
    }
    c.finish()
}

fn skipped_json(s: &[Skipped]) -> Value {
    Value::Array(s.iter().map(|s| json!({"lambda": s.lambda, "reason": s.reason})).collect())
}

/// Everything a `scan` run produces: one trace pair per λ, the combined
/// spectrum, pole trajectories and a manifest listing them.
pub fn emit_scan(cfg: &ScanConfig, scan: &LambdaScan, spectra: &[SpectrumPoint], poles: &[PoleRow], pole_skips: &[Skipped]) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir)?;
    let mut files = vec![];
    for (i, p) in scan.points.iter().enumerate() {
        let stem = format!("trace_{i:03}");
        let mut extra = point_extra(p);
        extra.insert("index".into(), json!(i));
        let shift = (cfg.output.trace_offset != 0.0).then_some(i as f64 * cfg.output.trace_offset);
        write(dir, &format!("{stem}.csv"), &trace_csv(&p.trace, shift), &mut files)?;
        write(dir, &format!("{stem}.json"), &to_json_string(&trace_json(&p.trace, cfg, extra)), &mut files)?;
    }
    write(dir, "spectrum.csv", &spectrum_csv(spectra), &mut files)?;
    write(dir, "poles.csv", &poles_csv(poles), &mut files)?;
    let peaks: Vec<Value> = spectra
        .iter()
        .map(|s| {
            let al = peak_alignment(&s.spectrum, cfg.spectrum.peak_threshold);
            json!({
                "lambda": s.lambda,
                "bin": s.spectrum.bin,
                "peaks": al.iter().map(|(w, d)| json!({"omega": w, "offset_bins": d})).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut m = header(cfg);
    m.insert(
        "traces".into(),
        Value::Array(
            scan.points
                .iter()
                .enumerate()
                .map(|(i, p)| json!({"lambda": p.lambda, "branch": p.branch.name(), "csv": format!("trace_{i:03}.csv")}))
                .collect(),
        ),
    );
    m.insert("skipped".into(), skipped_json(&scan.skipped));
    m.insert("pole_skipped".into(), skipped_json(pole_skips));
    m.insert("spectrum_peaks".into(), Value::Array(peaks));
    m.insert("spectrum_window".into(), json!(cfg.spectrum_window()));
    let names: Vec<String> = files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect();
    m.insert("files".into(), json!(names));
    write(dir, "manifest.json", &to_json_string(&Value::Object(m)), &mut files)?;
    Ok(files)
}
