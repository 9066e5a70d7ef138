//! Wordlists with cognate codings.
//!
//! Input is a flat, tab-separated projection of the Lexibank layout: a header
//! row naming at least `ID`, `DOCULECT`, `CONCEPT`, `TOKENS` and `COGID`.
//! An optional `ALIGNMENT` column carries precomputed alignments. Lines that
//! start with `#` and blank lines are ignored, as are unknown columns.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::Read;

use log::warn;

use crate::error::{Error, Result};

pub const GAP: &str = "-";
pub const MISSING: &str = "Ø";

const REQUIRED_COLUMNS: [&str; 5] = ["ID", "DOCULECT", "CONCEPT", "TOKENS", "COGID"];

/// One sound segment, e.g. `a`, `tʃ` or `⁵⁵`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SoundToken(String);

impl SoundToken {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(text));
        }
        Ok(SoundToken(text))
    }

    pub fn gap() -> Self {
        SoundToken(GAP.to_string())
    }

    pub fn missing() -> Self {
        SoundToken(MISSING.to_string())
    }

    pub fn is_gap(&self) -> bool {
        self.0 == GAP
    }

    pub fn is_missing(&self) -> bool {
        self.0 == MISSING
    }

    /// Gap or missing-language placeholder.
    pub fn is_reserved(&self) -> bool {
        self.is_gap() || self.is_missing()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SoundToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Split a `TOKENS` cell into segments.
pub fn tokenize(cell: &str) -> Result<Vec<SoundToken>> {
    cell.split_whitespace()
        .map(|seg| {
            if seg == GAP || seg == MISSING {
                Err(Error::ReservedToken(seg.to_string()))
            } else {
                SoundToken::new(seg)
            }
        })
        .collect()
}

/// Parse an alignment cell, where gaps are allowed.
pub(crate) fn tokenize_alignment(cell: &str) -> Result<Vec<SoundToken>> {
    cell.split_whitespace()
        .map(|seg| {
            if seg == MISSING {
                Err(Error::ReservedToken(seg.to_string()))
            } else {
                SoundToken::new(seg)
            }
        })
        .collect()
}

pub(crate) fn join_tokens(tokens: &[SoundToken]) -> String {
    tokens.iter().map(SoundToken::as_str).collect::<Vec<_>>().join(" ")
}

/// A word form (reflex or proto-form) in one doculect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    pub id: String,
    pub doculect: String,
    pub concept: String,
    pub tokens: Vec<SoundToken>,
    /// Precomputed alignment row, if the input carried one.
    pub alignment: Option<Vec<SoundToken>>,
}

impl Form {
    pub fn new(id: &str, doculect: &str, concept: &str, tokens: Vec<SoundToken>) -> Self {
        Form {
            id: id.to_string(),
            doculect: doculect.to_string(),
            concept: concept.to_string(),
            tokens,
            alignment: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CognateSet {
    pub cogid: String,
    pub concept: String,
    /// Daughter-language reflexes, sorted by doculect.
    pub reflexes: Vec<Form>,
    /// Gold reconstruction.
    pub proto: Option<Form>,
}

impl CognateSet {
    pub fn reflex(&self, doculect: &str) -> Option<&Form> {
        self.reflexes.iter().find(|f| f.doculect == doculect)
    }

    pub fn has_proto(&self) -> bool {
        self.proto.is_some()
    }
}

/// Order cognate ids numerically when both are integers, textually otherwise.
pub fn cmp_cogid(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// An immutable, indexed collection of cognate sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wordlist {
    doculects: Vec<String>,
    proto_doculect: Option<String>,
    sets: Vec<CognateSet>,
    index: HashMap<String, usize>,
}

impl Wordlist {
    /// Build a wordlist from already-validated sets. Sets are ordered by
    /// cogid and reflexes by doculect; the doculect list is derived from the
    /// reflexes.
    pub fn from_sets(proto_doculect: Option<String>, mut sets: Vec<CognateSet>) -> Self {
        sets.sort_by(|a, b| cmp_cogid(&a.cogid, &b.cogid));
        let mut doculects = BTreeSet::new();
        for set in &mut sets {
            set.reflexes.sort_by(|a, b| a.doculect.cmp(&b.doculect));
            doculects.extend(set.reflexes.iter().map(|f| f.doculect.clone()));
        }
        let index = sets.iter().enumerate().map(|(i, s)| (s.cogid.clone(), i)).collect();
        Wordlist {
            doculects: doculects.into_iter().collect(),
            proto_doculect,
            sets,
            index,
        }
    }

    /// Sorted daughter doculects (the proto doculect is never included).
    pub fn doculects(&self) -> &[String] {
        &self.doculects
    }

    pub fn proto_doculect(&self) -> Option<&str> {
        self.proto_doculect.as_deref()
    }

    pub fn sets(&self) -> &[CognateSet] {
        &self.sets
    }

    pub fn get(&self, cogid: &str) -> Option<&CognateSet> {
        self.index.get(cogid).map(|&i| &self.sets[i])
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn reflex_count(&self) -> usize {
        self.sets.iter().map(|s| s.reflexes.len()).sum()
    }

    /// Sets that carry a gold proto-form.
    pub fn training_sets(&self) -> impl Iterator<Item = &CognateSet> {
        self.sets.iter().filter(|s| s.proto.is_some())
    }

    /// Serialise to the TSV layout accepted by [`parse_wordlist`].
    pub fn to_tsv(&self) -> String {
        let with_alignment = self
            .sets
            .iter()
            .flat_map(|s| s.proto.iter().chain(s.reflexes.iter()))
            .any(|f| f.alignment.is_some());
        let mut out = String::from("ID\tDOCULECT\tCONCEPT\tTOKENS\tCOGID");
        if with_alignment {
            out.push_str("\tALIGNMENT");
        }
        out.push('\n');
        for set in &self.sets {
            for form in set.proto.iter().chain(set.reflexes.iter()) {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}",
                    form.id,
                    form.doculect,
                    form.concept,
                    join_tokens(&form.tokens),
                    set.cogid
                ));
                if with_alignment {
                    out.push('\t');
                    if let Some(alm) = &form.alignment {
                        out.push_str(&join_tokens(alm));
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Non-fatal issues met while parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub dropped_sets: usize,
    pub skipped_rows: usize,
    pub duplicate_reflexes: usize,
    pub warnings: Vec<String>,
}

impl ParseReport {
    fn warn(&mut self, message: String) {
        warn!("{message}");
        self.warnings.push(message);
    }
}

struct Columns {
    id: usize,
    doculect: usize,
    concept: usize,
    tokens: usize,
    cogid: usize,
    alignment: Option<usize>,
}

impl Columns {
    fn from_header(header: &str) -> Result<Self> {
        let names: Vec<&str> = header.split('\t').map(str::trim).collect();
        let find = |name: &str| names.iter().position(|n| n.eq_ignore_ascii_case(name));
        let missing: Vec<String> = REQUIRED_COLUMNS
            .iter()
            .filter(|c| find(c).is_none())
            .map(|c| c.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingColumns(missing));
        }
        Ok(Columns {
            id: find("ID").unwrap(),
            doculect: find("DOCULECT").unwrap(),
            concept: find("CONCEPT").unwrap(),
            tokens: find("TOKENS").unwrap(),
            cogid: find("COGID").unwrap(),
            alignment: find("ALIGNMENT"),
        })
    }
}

/// Parse a wordlist TSV. Rows of `proto_doculect` become gold proto-forms.
/// Sets left with fewer than two reflexes are dropped and counted in the
/// returned report.
pub fn parse_wordlist<R: Read>(mut source: R, proto_doculect: Option<&str>) -> Result<(Wordlist, ParseReport)> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes).map_err(|e| Error::io("<input>", e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Malformed {
        line: 0,
        message: format!("input is not valid UTF-8: {e}"),
    })?;
    parse_wordlist_str(&text, proto_doculect)
}

pub fn parse_wordlist_str(text: &str, proto_doculect: Option<&str>) -> Result<(Wordlist, ParseReport)> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));

    let Some((_, header)) = lines.next() else {
        return Err(Error::MissingColumns(
            REQUIRED_COLUMNS.iter().map(|c| c.to_string()).collect(),
        ));
    };
    let cols = Columns::from_header(header)?;

    let mut report = ParseReport::default();
    let mut seen_ids = HashSet::new();
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, CognateSet> = HashMap::new();

    for (line, row) in lines {
        let cells: Vec<&str> = row.split('\t').collect();
        let cell = |i: usize| cells.get(i).map(|c| c.trim()).unwrap_or("");
        let id = cell(cols.id);
        if !seen_ids.insert(id.to_string()) {
            return Err(Error::DuplicateId {
                id: id.to_string(),
                line,
            });
        }
        let cogid = cell(cols.cogid);
        if cogid.is_empty() {
            continue;
        }
        let tokens = tokenize(cell(cols.tokens)).map_err(|e| Error::Malformed {
            line,
            message: e.to_string(),
        })?;
        if tokens.is_empty() {
            report.skipped_rows += 1;
            report.warn(format!("line {line}: empty TOKENS, row {id:?} skipped"));
            continue;
        }
        let alignment = match cols.alignment.map(cell).filter(|c| !c.is_empty()) {
            Some(c) => Some(tokenize_alignment(c).map_err(|e| Error::Malformed {
                line,
                message: e.to_string(),
            })?),
            None => None,
        };
        let doculect = cell(cols.doculect);
        let form = Form {
            id: id.to_string(),
            doculect: doculect.to_string(),
            concept: cell(cols.concept).to_string(),
            tokens,
            alignment,
        };

        let set = groups.entry(cogid.to_string()).or_insert_with(|| {
            order.push(cogid.to_string());
            CognateSet {
                cogid: cogid.to_string(),
                concept: form.concept.clone(),
                reflexes: Vec::new(),
                proto: None,
            }
        });
        let is_proto = proto_doculect == Some(doculect);
        let duplicate = if is_proto {
            set.proto.is_some()
        } else {
            set.reflex(doculect).is_some()
        };
        if duplicate {
            report.duplicate_reflexes += 1;
            report.warn(format!(
                "line {line}: second form of {doculect:?} in cognate set {cogid:?} ignored"
            ));
            continue;
        }
        if is_proto {
            set.proto = Some(form);
        } else {
            set.reflexes.push(form);
        }
    }

    let mut sets = Vec::with_capacity(order.len());
    for cogid in order {
        let set = groups.remove(&cogid).expect("grouped");
        if set.reflexes.len() < 2 {
            report.dropped_sets += 1;
            report.warn(format!(
                "cognate set {cogid:?} has {} reflex(es), dropped",
                set.reflexes.len()
            ));
            continue;
        }
        sets.push(set);
    }
    Ok((Wordlist::from_sets(proto_doculect.map(str::to_string), sets), report))
}
