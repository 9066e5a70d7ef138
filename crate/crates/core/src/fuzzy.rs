//! Fuzzy proto-forms and the pipe notation.
//!
//! A fuzzy reconstruction lists, per alignment column, the proto sounds the
//! ensemble members predicted and how often. It renders as space-separated
//! positions with alternatives joined by `|`, each annotated with its count
//! unless the bare form is requested: `p a:7|i:3 t`, or `p a|i t`.
//!
//! A pattern matches every form obtained by choosing one option per position
//! (the Cartesian product); a chosen `-` contributes nothing and a compound
//! label such as `a+n` contributes both sounds.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::sites::ProtoLabel;
use crate::wordlist::SoundToken;

/// Per-column tally of predicted labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzySegment {
    /// Column in the reflex alignment this segment summarises.
    pub column: usize,
    /// Options by count descending, then label ascending. Counts are ≥ 1.
    pub options: Vec<(ProtoLabel, usize)>,
    pub total: usize,
}

impl FuzzySegment {
    pub fn from_counts(column: usize, counts: BTreeMap<ProtoLabel, usize>) -> Self {
        let mut options: Vec<(ProtoLabel, usize)> = counts.into_iter().filter(|(_, n)| *n > 0).collect();
        options.sort_by(|(la, a), (lb, b)| b.cmp(a).then_with(|| la.cmp(lb)));
        let total = options.iter().map(|(_, n)| n).sum();
        FuzzySegment { column, options, total }
    }

    pub fn is_certain(&self) -> bool {
        self.options.len() == 1
    }

    pub fn top(&self) -> &ProtoLabel {
        &self.options[0].0
    }

    pub fn render(&self, bare: bool) -> String {
        if self.is_certain() {
            return self.top().to_string();
        }
        self.options
            .iter()
            .map(|(l, n)| if bare { l.to_string() } else { format!("{l}:{n}") })
            .collect::<Vec<_>>()
            .join("|")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyReconstruction {
    pub cogid: String,
    pub concept: String,
    pub segments: Vec<FuzzySegment>,
    pub n_samples: usize,
    /// Every segment has a single option.
    pub certain: bool,
    /// Reflex rows in the alignment the prediction was made from.
    pub reflex_count: usize,
    /// Columns of that alignment.
    pub width: usize,
}

impl FuzzyReconstruction {
    pub fn new(
        cogid: &str,
        concept: &str,
        segments: Vec<FuzzySegment>,
        n_samples: usize,
        reflex_count: usize,
        width: usize,
    ) -> Self {
        let certain = segments.iter().all(FuzzySegment::is_certain);
        FuzzyReconstruction {
            cogid: cogid.to_string(),
            concept: concept.to_string(),
            segments,
            n_samples,
            certain,
            reflex_count,
            width,
        }
    }

    /// Rebuild from rendered notation. Single-option positions carry no
    /// count and are taken as unanimous over `n_samples`.
    pub fn from_rendered(
        cogid: &str,
        concept: &str,
        text: &str,
        n_samples: usize,
        reflex_count: usize,
    ) -> Result<Self> {
        let pattern = FuzzyPattern::parse(text)?;
        let err = |reason: String| Error::Pattern {
            pattern: text.to_string(),
            reason,
        };
        let mut segments = Vec::with_capacity(pattern.positions.len());
        for (column, options) in pattern.positions.into_iter().enumerate() {
            let mut counts = BTreeMap::new();
            if options.len() == 1 {
                counts.insert(options[0].0.clone(), options[0].1.unwrap_or(n_samples));
            } else {
                for (label, count) in options {
                    let n = count.ok_or_else(|| err("alternatives need counts".into()))?;
                    *counts.entry(label).or_insert(0) += n;
                }
            }
            let seg = FuzzySegment::from_counts(column, counts);
            if seg.total != n_samples {
                return Err(err(format!(
                    "position {column} counts sum to {}, expected {n_samples}",
                    seg.total
                )));
            }
            segments.push(seg);
        }
        let width = segments.len();
        Ok(FuzzyReconstruction::new(
            cogid,
            concept,
            segments,
            n_samples,
            reflex_count,
            width,
        ))
    }
}

pub fn render_fuzzy(fr: &FuzzyReconstruction, bare: bool) -> String {
    fr.segments.iter().map(|s| s.render(bare)).collect::<Vec<_>>().join(" ")
}

/// Highest-count option per position, gaps dropped, compounds expanded.
pub fn consensus(fr: &FuzzyReconstruction) -> Result<Vec<SoundToken>> {
    let tokens: Vec<SoundToken> = fr
        .segments
        .iter()
        .flat_map(|s| s.top().sounds().iter().cloned())
        .collect();
    if tokens.is_empty() {
        return Err(Error::EmptyReconstruction {
            cogid: fr.cogid.clone(),
        });
    }
    Ok(tokens)
}

/// Parsed pipe notation. Counts are optional and ignored for matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyPattern {
    pub positions: Vec<Vec<(ProtoLabel, Option<usize>)>>,
}

impl FuzzyPattern {
    pub fn parse(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::Pattern {
            pattern: text.to_string(),
            reason: reason.to_string(),
        };
        let positions = text
            .split_whitespace()
            .map(|position| {
                position
                    .split('|')
                    .map(|option| {
                        if option.is_empty() {
                            return Err(err("empty alternative"));
                        }
                        let (label, count) = match option.rsplit_once(':') {
                            Some((l, n)) if !l.is_empty() && !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) => {
                                let n: usize = n.parse().map_err(|_| err("count out of range"))?;
                                if n == 0 {
                                    return Err(err("zero count"));
                                }
                                (l, Some(n))
                            }
                            Some(_) => return Err(err("malformed count")),
                            None => (option, None),
                        };
                        let label = ProtoLabel::parse(label).map_err(|e| err(&e.to_string()))?;
                        Ok((label, count))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if positions.is_empty() {
            return Err(err("empty pattern"));
        }
        Ok(FuzzyPattern { positions })
    }

    /// Number of option combinations; saturates at `u128::MAX`.
    pub fn expansion_count(&self) -> u128 {
        self.positions
            .iter()
            .fold(1u128, |acc, p| acc.saturating_mul(p.len() as u128))
    }

    pub fn matches(&self, form: &[SoundToken]) -> bool {
        let mut reachable = vec![false; form.len() + 1];
        reachable[0] = true;
        for options in &self.positions {
            let mut next = vec![false; form.len() + 1];
            for start in (0..=form.len()).filter(|&i| reachable[i]) {
                for (label, _) in options {
                    let sounds = label.sounds();
                    if form[start..].starts_with(sounds) {
                        next[start + sounds.len()] = true;
                    }
                }
            }
            reachable = next;
        }
        reachable[form.len()]
    }
}

impl fmt::Display for FuzzyPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self
            .positions
            .iter()
            .map(|options| {
                options
                    .iter()
                    .map(|(l, n)| match n {
                        Some(n) => format!("{l}:{n}"),
                        None => l.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join("|")
            })
            .collect::<Vec<_>>()
            .join(" ");
        f.write_str(&text)
    }
}

pub fn matches(pattern: &str, form: &[SoundToken]) -> Result<bool> {
    Ok(FuzzyPattern::parse(pattern)?.matches(form))
}

pub fn expansion_count(pattern: &str) -> Result<u128> {
    Ok(FuzzyPattern::parse(pattern)?.expansion_count())
}
