//! TSV charts, the d2 table and the ASCII dot grid.

use std::collections::BTreeMap;
use std::fmt::Write;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartRow {
    pub s: usize,
    pub t: i32,
    pub m: u32,
    pub dim: usize,
    pub witnesses: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub title: String,
    pub rows: Vec<ChartRow>,
}

const CHART_HEADER: &str = "s\tt\tm\tdim\twitnesses";
const D2_HEADER: &str = "s\tt\tm\tclass\timage";

fn fmt_vec(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn parse_vec(s: &str) -> Result<Vec<u32>> {
    let inner = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(|| anyhow!("expected [..], found {s:?}"))?;
    if inner.is_empty() {
        return Ok(vec![]);
    }
    inner.split(',').map(|x| x.parse::<u32>().with_context(|| format!("bad entry {x:?}"))).collect()
}

fn fmt_vecs(vs: &[Vec<u32>]) -> String {
    if vs.is_empty() {
        return "-".into();
    }
    vs.iter().map(|v| fmt_vec(v)).collect::<Vec<_>>().join(";")
}

fn parse_vecs(s: &str) -> Result<Vec<Vec<u32>>> {
    if s == "-" {
        return Ok(vec![]);
    }
    s.split(';').map(parse_vec).collect()
}

/// Splits off the `# title` line and checks the column header.
fn body<'a>(text: &'a str, header: &str) -> Result<(String, Vec<(usize, &'a str)>)> {
    let mut lines = text.lines().enumerate();
    let title = match lines.next() {
        Some((_, l)) => l.strip_prefix("# ").ok_or_else(|| anyhow!("line 1: expected '# title'"))?.to_string(),
        None => bail!("empty table"),
    };
    match lines.next() {
        Some((_, l)) if l == header => {}
        _ => bail!("line 2: expected header {header:?}"),
    }
    Ok((title, lines.map(|(i, l)| (i + 1, l)).collect()))
}

fn fields<const N: usize>(line: &str, no: usize) -> Result<[&str; N]> {
    let f: Vec<&str> = line.split('\t').collect();
    f.try_into().map_err(|f: Vec<&str>| anyhow!("line {no}: expected {N} fields, found {}", f.len()))
}

impl Chart {
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {}\n{CHART_HEADER}\n", self.title);
        for r in &self.rows {
            writeln!(out, "{}\t{}\t{}\t{}\t{}", r.s, r.t, r.m, r.dim, fmt_vecs(&r.witnesses)).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Chart> {
        let (title, lines) = body(text, CHART_HEADER)?;
        let mut rows = Vec::new();
        for (no, l) in lines {
            let [s, t, m, dim, w] = fields::<5>(l, no)?;
            let row = (|| -> Result<ChartRow> {
                Ok(ChartRow { s: s.parse()?, t: t.parse()?, m: m.parse()?, dim: dim.parse()?, witnesses: parse_vecs(w)? })
            })()
            .with_context(|| format!("line {no}"))?;
            rows.push(row);
        }
        Ok(Chart { title, rows })
    }

    /// Adams-style grid per level: stem `t - s` across, `s` upward; a digit
    /// gives the dimension, `.` an empty spot.
    pub fn grid(&self) -> String {
        let mut out = String::new();
        let mut levels: BTreeMap<u32, BTreeMap<(usize, i32), usize>> = BTreeMap::new();
        for r in &self.rows {
            if r.dim > 0 {
                *levels.entry(r.m).or_default().entry((r.s, r.t - r.s as i32)).or_default() += r.dim;
            }
        }
        writeln!(out, "{}", self.title).unwrap();
        if levels.is_empty() {
            out.push_str("(empty)\n");
        }
        for (m, cells) in &levels {
            let s_max = cells.keys().map(|k| k.0).max().unwrap_or(0);
            let n_min = cells.keys().map(|k| k.1).min().unwrap_or(0).min(0);
            let n_max = cells.keys().map(|k| k.1).max().unwrap_or(0).max(0);
            writeln!(out, "m = {m}").unwrap();
            for s in (0..=s_max).rev() {
                write!(out, "{s:>3} |").unwrap();
                for n in n_min..=n_max {
                    let c = match cells.get(&(s, n)).copied().unwrap_or(0) {
                        0 => '.',
                        d if d < 10 => char::from_digit(d as u32, 10).unwrap(),
                        _ => '*',
                    };
                    write!(out, "{c:>3}").unwrap();
                }
                out.push('\n');
            }
            write!(out, "    +").unwrap();
            for _ in n_min..=n_max {
                out.push_str("---");
            }
            out.push('\n');
            write!(out, "t-s  ").unwrap();
            for n in n_min..=n_max {
                write!(out, "{n:>3}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Internal degree to class coordinates.
pub type Image = BTreeMap<i32, Vec<u32>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Line {
    pub s: usize,
    pub t: i32,
    pub m: u32,
    pub class: Vec<u32>,
    pub image: Image,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Table {
    pub title: String,
    pub rows: Vec<D2Line>,
}

fn fmt_image(img: &Image) -> String {
    if img.is_empty() {
        return "0".into();
    }
    img.iter().map(|(t, v)| format!("t={t}:{}", fmt_vec(v))).collect::<Vec<_>>().join(";")
}

fn parse_image(s: &str) -> Result<Image> {
    let mut out = Image::new();
    if s == "0" {
        return Ok(out);
    }
    for part in s.split(';') {
        let (t, v) = part.strip_prefix("t=").and_then(|x| x.split_once(':')).ok_or_else(|| anyhow!("bad image component {part:?}"))?;
        out.insert(t.parse()?, parse_vec(v)?);
    }
    Ok(out)
}

impl D2Table {
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {}\n{D2_HEADER}\n", self.title);
        for r in &self.rows {
            writeln!(out, "{}\t{}\t{}\t{}\t{}", r.s, r.t, r.m, fmt_vec(&r.class), fmt_image(&r.image)).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<D2Table> {
        let (title, lines) = body(text, D2_HEADER)?;
        let mut rows = Vec::new();
        for (no, l) in lines {
            let [s, t, m, class, image] = fields::<5>(l, no)?;
            let row = (|| -> Result<D2Line> {
                Ok(D2Line { s: s.parse()?, t: t.parse()?, m: m.parse()?, class: parse_vec(class)?, image: parse_image(image)? })
            })()
            .with_context(|| format!("line {no}"))?;
            rows.push(row);
        }
        Ok(D2Table { title, rows })
    }

    pub fn summary(&self) -> String {
        let nonzero = self.rows.iter().filter(|r| !r.image.is_empty()).count();
        format!("{}\n{} classes, {} with nonzero d2\n", self.title, self.rows.len(), nonzero)
    }
}
