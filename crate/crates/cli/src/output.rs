//! CSV, graymap and SVG writers. Every file written is recorded with its
//! checksum for the manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use biphoton_core::{Profile64, RateMap64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Profile,
    Map,
    Table,
    Image,
    Plot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Emitted {
    pub file: String,
    pub kind: OutputKind,
    pub rows: usize,
    pub cols: usize,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Writer {
    dir: PathBuf,
    formats: Vec<Format>,
    pub emitted: Vec<Emitted>,
}

fn fmt_q(q: f64) -> String {
    // q/q0 on the lattice; trim representation noise from the division
    let r = (q * 1e12).round() / 1e12;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn fmt_v(v: f64) -> String {
    format!("{v:e}")
}

impl Writer {
    pub fn new(dir: &Path, formats: &[Format]) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            formats: formats.to_vec(),
            emitted: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn write(&mut self, file: String, kind: OutputKind, rows: usize, cols: usize, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(self.dir.join(&file), bytes)?;
        self.emitted.push(Emitted {
            file,
            kind,
            rows,
            cols,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    fn csv(&mut self, file: String, kind: OutputKind, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(anyhow::Error::from)?;
        let n = rows.len();
        for r in rows {
            w.write_record(&r).map_err(anyhow::Error::from)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!(e.to_string()))?;
        self.write(file, kind, n, header.len(), &bytes)
    }

    /// `q_over_q0,value` plus an SVG line plot when requested.
    pub fn profile(&mut self, stem: &str, p: &Profile64, title: &str) -> Result<(), CliError> {
        if self.wants(Format::Csv) {
            let q = p.q_normalized();
            let rows = q
                .iter()
                .zip(&p.values)
                .map(|(&q, &v)| vec![fmt_q(q), fmt_v(v)])
                .collect();
            self.csv(format!("{stem}.csv"), OutputKind::Profile, &["q_over_q0", "value"], rows)?;
        }
        if self.wants(Format::Svg) {
            self.overlay(stem, &[(String::new(), p)], title)?;
        }
        Ok(())
    }

    /// Long-format `q_over_q0,qprime_over_q0,value` plus a graymap.
    pub fn map(&mut self, stem: &str, m: &RateMap64) -> Result<(), CliError> {
        let axis = m.axis;
        let len = axis.len();
        if self.wants(Format::Csv) {
            let mut rows = Vec::with_capacity(len * len);
            for i in 0..len {
                for c in 0..len {
                    rows.push(vec![
                        fmt_q(axis.q_normalized(i)),
                        fmt_q(axis.q_normalized(c)),
                        fmt_v(m.values[[i, c]]),
                    ]);
                }
            }
            self.csv(
                format!("{stem}.csv"),
                OutputKind::Map,
                &["q_over_q0", "qprime_over_q0", "value"],
                rows,
            )?;
        }
        if self.wants(Format::Pgm) {
            let bytes = graymap(m);
            self.write(format!("{stem}.pgm"), OutputKind::Image, len, len, &bytes)?;
        }
        Ok(())
    }

    pub fn table(&mut self, stem: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| format!("{v}")).collect())
            .collect();
        self.csv(format!("{stem}.csv"), OutputKind::Table, header, rows)
    }

    /// Several profiles on one set of axes.
    pub fn overlay(&mut self, stem: &str, series: &[(String, &Profile64)], title: &str) -> Result<(), CliError> {
        if !self.wants(Format::Svg) {
            return Ok(());
        }
        let svg = line_plot(series, title);
        let points = series.iter().map(|(_, p)| p.len()).max().unwrap_or(0);
        self.write(format!("{stem}.svg"), OutputKind::Plot, points, series.len(), svg.as_bytes())
    }
}

/// Binary 8-bit graymap, brighter for larger values. `q` runs left to
/// right and `q'` bottom to top.
fn graymap(m: &RateMap64) -> Vec<u8> {
    let len = m.axis.len();
    let peak = m.max();
    let mut out = format!("P5\n{len} {len}\n255\n").into_bytes();
    for y in 0..len {
        let c = len - 1 - y;
        for i in 0..len {
            let v = if peak > 0.0 { m.values[[i, c]] / peak } else { 0.0 };
            out.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    out
}

const PALETTE: [&str; 6] = ["#1f4e79", "#c0392b", "#27ae60", "#8e44ad", "#d68910", "#17202a"];

fn line_plot(series: &[(String, &Profile64)], title: &str) -> String {
    let (w, h) = (720.0, 420.0);
    let (left, right, top, bottom) = (60.0, 20.0, 36.0, 44.0);
    let mut q_lo = f64::INFINITY;
    let mut q_hi = f64::NEG_INFINITY;
    let mut v_hi = 0.0f64;
    for (_, p) in series {
        for (q, v) in p.q_normalized().into_iter().zip(&p.values) {
            q_lo = q_lo.min(q);
            q_hi = q_hi.max(q);
            v_hi = v_hi.max(*v);
        }
    }
    if !(q_hi > q_lo) {
        q_lo = -1.0;
        q_hi = 1.0;
    }
    if !(v_hi > 0.0) {
        v_hi = 1.0;
    }
    let pw = w - left - right;
    let ph = h - top - bottom;
    let px = |q: f64| left + (q - q_lo) / (q_hi - q_lo) * pw;
    let py = |v: f64| top + ph - v / v_hi * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let mut t = q_lo.ceil();
    while t <= q_hi.floor() {
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            top + ph,
            top + ph + 5.0,
            top + ph + 18.0
        );
        t += 1.0;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">q / q0</text>"#,
        left + pw / 2.0,
        h - 8.0
    );
    for (j, (label, p)) in series.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        let mut pts = String::new();
        for (q, v) in p.q_normalized().into_iter().zip(&p.values) {
            let _ = write!(pts, "{:.2},{:.2} ", px(q), py(*v));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            pts.trim_end()
        );
        if !label.is_empty() {
            let y = top + 16.0 + 16.0 * j as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{y:.1}" fill="{color}" text-anchor="end">{}</text>"#,
                w - right - 8.0,
                escape(label)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_positions_print_cleanly() {
        assert_eq!(fmt_q(0.5000000000000001), "0.5");
        assert_eq!(fmt_q(-0.0), "0");
        assert_eq!(fmt_v(0.25), "2.5e-1");
    }
}
