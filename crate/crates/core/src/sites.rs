//! Alignment columns as classifier instances.
//!
//! A site is one alignment column read as a correspondence pattern: every
//! daughter doculect maps to the token it shows there, `-` for an aligned
//! gap and `Ø` when the doculect has no reflex in the set.
//!
//! Training columns in which every reflex has a gap but the proto-form has a
//! sound carry no reflex evidence. Their proto sound is folded into the label
//! of the nearest preceding supported column (or the following one at the
//! left edge), so `[p a n]` against `[p a -]` yields the labels `p` and `a+n`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::alignment::Alignment;
use crate::error::{Error, Result};
use crate::wordlist::{CognateSet, SoundToken, GAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Position {
    pub index: usize,
    pub is_initial: bool,
    pub is_final: bool,
}

impl Position {
    pub fn new(index: usize, width: usize) -> Self {
        Position {
            index,
            is_initial: index == 0,
            is_final: index + 1 == width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    /// Doculect → token, one entry per daughter doculect of the wordlist.
    pub pattern: BTreeMap<String, SoundToken>,
    pub position: Position,
}

impl Site {
    /// Pattern entries with real tokens (neither gap nor missing).
    pub fn attested(&self) -> impl Iterator<Item = (&str, &SoundToken)> {
        self.pattern
            .iter()
            .filter(|(_, t)| !t.is_reserved())
            .map(|(d, t)| (d.as_str(), t))
    }
}

/// Target of the position-wise classifier: a proto sound, a gap, or a
/// sequence of sounds merged from unsupported columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProtoLabel {
    tokens: Vec<SoundToken>,
    text: String,
}

impl ProtoLabel {
    pub fn new(tokens: Vec<SoundToken>) -> Self {
        let tokens: Vec<SoundToken> = tokens.into_iter().filter(|t| !t.is_gap()).collect();
        if tokens.is_empty() {
            return ProtoLabel::gap();
        }
        let text = tokens.iter().map(SoundToken::as_str).collect::<Vec<_>>().join("+");
        ProtoLabel { tokens, text }
    }

    pub fn gap() -> Self {
        ProtoLabel {
            tokens: vec![SoundToken::gap()],
            text: GAP.to_string(),
        }
    }

    /// Inverse of the `+`-joined rendering.
    pub fn parse(text: &str) -> Result<Self> {
        if text == GAP {
            return Ok(ProtoLabel::gap());
        }
        if text == "+" {
            return Ok(ProtoLabel::new(vec![SoundToken::new("+")?]));
        }
        let tokens = text
            .split('+')
            .map(|t| {
                if t == GAP || t == crate::wordlist::MISSING {
                    Err(Error::ReservedToken(t.to_string()))
                } else {
                    SoundToken::new(t)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProtoLabel::new(tokens))
    }

    pub fn is_gap(&self) -> bool {
        self.text == GAP
    }

    pub fn is_compound(&self) -> bool {
        self.tokens.len() > 1
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Sounds contributed to an assembled form (empty for a gap).
    pub fn sounds(&self) -> &[SoundToken] {
        if self.is_gap() {
            &[]
        } else {
            &self.tokens
        }
    }
}

impl Ord for ProtoLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.text.cmp(&other.text)
    }
}

impl PartialOrd for ProtoLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ProtoLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn pattern_at(alignment: &Alignment, column: usize, doculects: &[String]) -> BTreeMap<String, SoundToken> {
    doculects
        .iter()
        .map(|d| {
            let token = alignment
                .row(d)
                .map_or_else(SoundToken::missing, |row| row[column].clone());
            (d.clone(), token)
        })
        .collect()
}

/// Labelled sites from a joint alignment that includes the proto row.
/// `doculects` are the daughter doculects of the wordlist.
pub fn extract_training_sites(
    set: &CognateSet,
    joint: &Alignment,
    doculects: &[String],
) -> Result<Vec<(Site, ProtoLabel)>> {
    let proto_doculect = set
        .proto
        .as_ref()
        .map(|p| p.doculect.as_str())
        .ok_or_else(|| Error::Alignment(format!("cognate set {} has no proto-form", set.cogid)))?;
    let proto_row = joint
        .row(proto_doculect)
        .ok_or_else(|| Error::Alignment(format!("joint alignment of {} lacks the proto row", set.cogid)))?;

    let width = joint.width();
    let supported: Vec<bool> = (0..width)
        .map(|c| {
            joint
                .rows
                .iter()
                .filter(|r| r.doculect != proto_doculect)
                .any(|r| !r.tokens[c].is_gap())
        })
        .collect();
    let kept: Vec<usize> = (0..width).filter(|&c| supported[c]).collect();
    if kept.is_empty() {
        return Err(Error::NoReflexSupport {
            cogid: set.cogid.clone(),
        });
    }

    // owner[c] = index into `kept` whose label absorbs column c
    let mut labels: Vec<Vec<SoundToken>> = vec![Vec::new(); kept.len()];
    let mut slot = None;
    for c in 0..width {
        if supported[c] {
            slot = Some(slot.map_or(0, |s| s + 1));
        }
        labels[slot.unwrap_or(0)].push(proto_row[c].clone());
    }

    Ok(kept
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (&c, tokens))| {
            let site = Site {
                pattern: pattern_at(joint, c, doculects),
                position: Position::new(i, kept.len()),
            };
            (site, ProtoLabel::new(tokens))
        })
        .collect())
}

/// Unlabelled sites, one per column of a reflex-only alignment.
pub fn extract_prediction_sites(alignment: &Alignment, doculects: &[String]) -> Vec<Site> {
    let width = alignment.width();
    (0..width)
        .map(|c| Site {
            pattern: pattern_at(alignment, c, doculects),
            position: Position::new(c, width),
        })
        .collect()
}

/// Concatenate labels into a form, expanding compounds and dropping gaps.
pub fn assemble_form<'a>(labels: impl IntoIterator<Item = &'a ProtoLabel>) -> Result<Vec<SoundToken>> {
    let tokens: Vec<SoundToken> = labels.into_iter().flat_map(|l| l.sounds().iter().cloned()).collect();
    if tokens.is_empty() {
        Err(Error::EmptyForm)
    } else {
        Ok(tokens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::{align_cognate_set, AlignedRow};
    use crate::wordlist::{tokenize, tokenize_alignment, Form};
    use proptest::prelude::*;

    fn label(s: &str) -> ProtoLabel {
        ProtoLabel::parse(s).unwrap()
    }

    fn alignment(rows: &[(&str, &str)]) -> Alignment {
        Alignment {
            rows: rows
                .iter()
                .map(|(d, s)| AlignedRow {
                    doculect: d.to_string(),
                    tokens: tokenize_alignment(s).unwrap(),
                })
                .collect(),
        }
    }

    fn set_with(rows: &[(&str, &str)], proto: &str) -> CognateSet {
        CognateSet {
            cogid: "1".into(),
            concept: "c".into(),
            reflexes: rows
                .iter()
                .map(|(d, s)| Form::new(d, d, "c", tokenize(&s.replace('-', " ")).unwrap()))
                .collect(),
            proto: Some(Form::new(
                "P",
                "Proto",
                "c",
                tokenize(&proto.replace('-', " ")).unwrap(),
            )),
        }
    }

    fn docs(d: &[&str]) -> Vec<String> {
        d.iter().map(|s| s.to_string()).collect()
    }

    fn labels_of(sites: &[(Site, ProtoLabel)]) -> Vec<String> {
        sites.iter().map(|(_, l)| l.to_string()).collect()
    }

    #[test]
    fn plain_columns() {
        let s = set_with(&[("A", "p a t"), ("B", "p a t")], "p a t");
        let joint = alignment(&[("A", "p a t"), ("B", "p a t"), ("Proto", "p a t")]);
        let sites = extract_training_sites(&s, &joint, &docs(&["A", "B"])).unwrap();
        assert_eq!(labels_of(&sites), ["p", "a", "t"]);
    }

    #[test]
    fn unsupported_final_merges_left() {
        let s = set_with(&[("A", "p a"), ("B", "p a")], "p a n");
        let joint = alignment(&[("A", "p a -"), ("B", "p a -"), ("Proto", "p a n")]);
        let sites = extract_training_sites(&s, &joint, &docs(&["A", "B"])).unwrap();
        assert_eq!(labels_of(&sites), ["p", "a+n"]);
        assert!(sites[1].0.position.is_final);
        assert!(sites[1].1.is_compound());
    }

    #[test]
    fn unsupported_initial_merges_right() {
        let s = set_with(&[("A", "a t"), ("B", "a t")], "s a t");
        let joint = alignment(&[("A", "- a t"), ("B", "- a t"), ("Proto", "s a t")]);
        let sites = extract_training_sites(&s, &joint, &docs(&["A", "B"])).unwrap();
        assert_eq!(labels_of(&sites), ["s+a", "t"]);
    }

    #[test]
    fn proto_gap_is_a_label() {
        let s = set_with(&[("A", "ŋ a t"), ("B", "a t")], "a t");
        let joint = alignment(&[("A", "ŋ a t"), ("B", "- a t"), ("Proto", "- a t")]);
        let sites = extract_training_sites(&s, &joint, &docs(&["A", "B"])).unwrap();
        assert_eq!(labels_of(&sites), ["-", "a", "t"]);
        assert!(sites[0].1.is_gap());
    }

    #[test]
    fn missing_doculects_and_positions() {
        let a = alignment(&[("A", "p a t -"), ("C", "p a t s")]);
        let sites = extract_prediction_sites(&a, &docs(&["A", "B", "C"]));
        assert_eq!(sites.len(), 4);
        for (i, s) in sites.iter().enumerate() {
            assert_eq!(s.position.index, i);
            assert_eq!(s.position.is_final, i == 3);
            assert_eq!(s.position.is_initial, i == 0);
            assert!(s.pattern["B"].is_missing());
            assert_eq!(s.pattern.len(), 3);
        }
        assert!(sites[3].pattern["A"].is_gap());
        assert_eq!(sites[3].attested().count(), 1);
    }

    #[test]
    fn no_reflex_support_is_an_error() {
        let s = set_with(&[("A", "p")], "p");
        let joint = alignment(&[("A", "-"), ("Proto", "p")]);
        assert!(matches!(
            extract_training_sites(&s, &joint, &docs(&["A"])),
            Err(Error::NoReflexSupport { .. })
        ));
    }

    #[test]
    fn assemble_examples() {
        let toks = |s: &str| tokenize(s).unwrap();
        assert_eq!(
            assemble_form(&[label("p"), label("a"), label("t")]).unwrap(),
            toks("p a t")
        );
        assert_eq!(assemble_form(&[label("p"), label("a+n")]).unwrap(), toks("p a n"));
        assert_eq!(
            assemble_form(&[label("-"), label("a"), label("t")]).unwrap(),
            toks("a t")
        );
        assert!(matches!(assemble_form(&[label("-")]), Err(Error::EmptyForm)));
    }

    #[test]
    fn label_rendering_round_trips() {
        for text in ["p", "a+n", "-", "ˀk", "+"] {
            assert_eq!(label(text).as_str(), text);
        }
        assert!(ProtoLabel::parse("a+-").is_err());
    }

    fn arb_tokens() -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(prop::sample::select(vec!["p", "t", "k", "a", "i", "n", "ŋ", "s"]), 1..6)
    }

    proptest! {
        // grouping never loses or reorders proto sounds
        #[test]
        fn training_labels_reassemble_gold(proto in arb_tokens(), reflexes in prop::collection::vec(arb_tokens(), 2..5)) {
            let rows: Vec<(String, String)> = reflexes.iter().enumerate().map(|(i, r)| (format!("D{i}"), r.join(" "))).collect();
            let refs: Vec<(&str, &str)> = rows.iter().map(|(d, r)| (d.as_str(), r.as_str())).collect();
            let s = set_with(&refs, &proto.join(" "));
            let joint = align_cognate_set(&s, true).unwrap();
            let doculects: Vec<String> = rows.iter().map(|(d, _)| d.clone()).collect();
            let sites = extract_training_sites(&s, &joint, &doculects).unwrap();
            let supported = (0..joint.width()).filter(|&c| joint.rows.iter().any(|r| r.doculect != "Proto" && !r.tokens[c].is_gap())).count();
            prop_assert_eq!(sites.len(), supported);
            let labels: Vec<&ProtoLabel> = sites.iter().map(|(_, l)| l).collect();
            prop_assert_eq!(assemble_form(labels).unwrap(), s.proto.unwrap().tokens);
        }
    }
}
