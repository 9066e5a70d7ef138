//! Quintile grids and the standalone HTML report.
//!
//! A quintile column spreads a segment's ensemble counts over five cells by
//! largest-remainder apportionment, so each cell stands for roughly a fifth
//! of the trials. The report shows, per cognate set, the alignment (with the
//! gold proto-form when known), the fuzzy summary and its quintile grid.

use std::fmt::Write as _;
use std::path::Path;

use crate::alignment::align_cognate_set;
use crate::error::{Error, Result};
use crate::fuzzy::{render_fuzzy, FuzzyReconstruction, FuzzySegment};
use crate::sites::ProtoLabel;
use crate::wordlist::Wordlist;

pub const QUINTILE_CELLS: usize = 5;

/// One quintile column per segment, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuintileGrid {
    pub columns: Vec<[ProtoLabel; QUINTILE_CELLS]>,
}

impl QuintileGrid {
    pub fn from_reconstruction(fr: &FuzzyReconstruction) -> Self {
        QuintileGrid {
            columns: fr.segments.iter().map(to_quintiles).collect(),
        }
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = &ProtoLabel> {
        self.columns.iter().map(move |c| &c[r])
    }
}

/// Cells per option, in the segment's option order.
///
/// Remainders are compared exactly as `count * 5 mod total`; equal
/// remainders go to the lexicographically smaller label.
pub fn apportion(seg: &FuzzySegment) -> Vec<(ProtoLabel, usize)> {
    let cells = QUINTILE_CELLS;
    let total = seg.total.max(1);
    let mut shares: Vec<(ProtoLabel, usize)> = seg
        .options
        .iter()
        .map(|(l, n)| (l.clone(), n * cells / total))
        .collect();
    let assigned: usize = shares.iter().map(|(_, s)| s).sum();
    let mut by_remainder: Vec<usize> = (0..shares.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = seg.options[a].1 * cells % total;
        let rb = seg.options[b].1 * cells % total;
        rb.cmp(&ra).then_with(|| seg.options[a].0.cmp(&seg.options[b].0))
    });
    for &i in by_remainder.iter().take(cells.saturating_sub(assigned)) {
        shares[i].1 += 1;
    }
    shares
}

pub fn to_quintiles(seg: &FuzzySegment) -> [ProtoLabel; QUINTILE_CELLS] {
    let stacked: Vec<ProtoLabel> = apportion(seg)
        .into_iter()
        .flat_map(|(l, n)| std::iter::repeat_n(l, n))
        .collect();
    stacked.try_into().expect("apportionment always fills five cells")
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

const STYLE: &str = "\
body{font-family:sans-serif;margin:2em;color:#222}\
section{margin-bottom:2.5em}\
table{border-collapse:collapse;margin:0.5em 0}\
td,th{border:1px solid #bbb;padding:0.2em 0.6em;text-align:center}\
th{background:#eee;text-align:left}\
tr.gold td{background:#e8f4e8;font-weight:bold}\
tr.summary td{background:#f4f4fb}\
td.uncertain{background:#ffd9a8 !important}\
td.q{font-family:monospace}\
td.q.uncertain{background:#ffe9cc !important}\
p.none{font-style:italic}";

fn write_set(out: &mut String, wl: &Wordlist, fr: &FuzzyReconstruction, bare: bool) -> Result<()> {
    let status = if fr.certain { "certain" } else { "uncertain" };
    let _ = writeln!(
        out,
        "<section id=\"set-{}\"><h2>{} <small>({}, {status})</small></h2>",
        escape(&fr.cogid),
        escape(&fr.cogid),
        escape(&fr.concept)
    );
    if let Some(set) = wl.get(&fr.cogid) {
        let alignment = align_cognate_set(set, set.has_proto())?;
        let proto = wl.proto_doculect();
        out.push_str("<table class=\"alignment\">\n");
        for row in &alignment.rows {
            let is_gold = proto == Some(row.doculect.as_str()) && set.has_proto();
            let (class, label) = if is_gold {
                (" class=\"gold\"", format!("Gold ({})", row.doculect))
            } else {
                ("", row.doculect.clone())
            };
            let _ = write!(out, "<tr{class}><th>{}</th>", escape(&label));
            for t in &row.tokens {
                let _ = write!(out, "<td>{}</td>", escape(t.as_str()));
            }
            out.push_str("</tr>\n");
        }
        out.push_str("</table>\n");
    }

    out.push_str("<table class=\"fuzzy\">\n<tr class=\"summary\"><th>Summary</th>");
    for seg in &fr.segments {
        let class = if seg.is_certain() { "" } else { " class=\"uncertain\"" };
        let _ = write!(out, "<td{class}>{}</td>", escape(&seg.render(bare)));
    }
    out.push_str("</tr>\n");
    let grid = QuintileGrid::from_reconstruction(fr);
    for r in 0..QUINTILE_CELLS {
        let _ = write!(out, "<tr><th>Q{}</th>", r + 1);
        for (seg, label) in fr.segments.iter().zip(grid.row(r)) {
            let class = if seg.is_certain() { "q" } else { "q uncertain" };
            let _ = write!(out, "<td class=\"{class}\">{}</td>", escape(label.as_str()));
        }
        out.push_str("</tr>\n");
    }
    let _ = writeln!(
        out,
        "</table>\n<p>Fuzzy form: <code>{}</code></p></section>",
        escape(&render_fuzzy(fr, bare))
    );
    Ok(())
}

/// The whole report as an XHTML-compatible string.
pub fn render_report(wl: &Wordlist, frs: &[FuzzyReconstruction], bare: bool) -> Result<String> {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\" lang=\"en\">\n<head>\n");
    out.push_str("<meta charset=\"utf-8\"/>\n<title>Fuzzy reconstructions</title>\n");
    let _ = writeln!(
        out,
        "<style>{STYLE}</style>\n</head>\n<body>\n<h1>Fuzzy reconstructions</h1>"
    );
    if frs.is_empty() {
        out.push_str("<p class=\"none\">No data: there are no reconstructions to show.</p>\n");
    } else {
        let uncertain = frs.iter().filter(|f| !f.certain).count();
        let _ = writeln!(
            out,
            "<p>{} cognate sets, {uncertain} uncertain. Each quintile row stands for a fifth of {} ensemble trials.</p>",
            frs.len(),
            frs[0].n_samples
        );
        for fr in frs {
            write_set(&mut out, wl, fr, bare)?;
        }
    }
    out.push_str("</body>\n</html>\n");
    Ok(out)
}

pub fn emit_report(wl: &Wordlist, frs: &[FuzzyReconstruction], path: &Path, bare: bool) -> Result<()> {
    let html = render_report(wl, frs, bare)?;
    std::fs::write(path, html).map_err(|e| Error::io(path, e))
}
