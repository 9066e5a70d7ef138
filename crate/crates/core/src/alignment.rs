//! Deterministic alignment of cognate sets.
//!
//! Segments are scored through a coarse sound-class system: identical tokens
//! score +2, tokens of the same class +1, different classes −1, token against
//! gap −1 and gap against gap 0. Pairs are aligned with Needleman–Wunsch
//! under a linear gap cost; cognate sets are aligned progressively against a
//! growing profile.

use std::fmt;

use log::warn;

use crate::error::{Error, Result};
use crate::wordlist::{join_tokens, CognateSet, Form, SoundToken};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SoundClass {
    Vowel,
    Stop,
    Fricative,
    Affricate,
    Nasal,
    Liquid,
    Glide,
    Tone,
    Laryngeal,
    Other,
}

impl fmt::Display for SoundClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SoundClass::Vowel => "VOWEL",
            SoundClass::Stop => "STOP",
            SoundClass::Fricative => "FRICATIVE",
            SoundClass::Affricate => "AFFRICATE",
            SoundClass::Nasal => "NASAL",
            SoundClass::Liquid => "LIQUID",
            SoundClass::Glide => "GLIDE",
            SoundClass::Tone => "TONE",
            SoundClass::Laryngeal => "LARYNGEAL",
            SoundClass::Other => "OTHER",
        };
        f.write_str(name)
    }
}

/// Whole-token overrides, consulted before base-character lookup. Matched
/// against the raw token and then against the token with modifiers removed.
const OVERRIDES: &[(&str, SoundClass)] = &[
    ("ts", SoundClass::Affricate),
    ("dz", SoundClass::Affricate),
    ("tʃ", SoundClass::Affricate),
    ("dʒ", SoundClass::Affricate),
    ("tɕ", SoundClass::Affricate),
    ("dʑ", SoundClass::Affricate),
    ("tʂ", SoundClass::Affricate),
    ("dʐ", SoundClass::Affricate),
    ("ʈʂ", SoundClass::Affricate),
    ("ɖʐ", SoundClass::Affricate),
    ("pf", SoundClass::Affricate),
    ("kx", SoundClass::Affricate),
    ("tθ", SoundClass::Affricate),
    ("tɬ", SoundClass::Affricate),
    ("ʔ", SoundClass::Laryngeal),
    ("h", SoundClass::Laryngeal),
    ("ɦ", SoundClass::Laryngeal),
    ("+", SoundClass::Other),
    ("_", SoundClass::Other),
];

/// Modifier letters for aspiration, glottalisation, labialisation,
/// palatalisation, prenasalisation and length.
const STRIPPED_MODIFIERS: &[char] = &[
    'ʰ', 'ʱ', 'ˀ', 'ʷ', 'ʲ', 'ˠ', 'ˤ', 'ⁿ', 'ᵐ', 'ᵑ', 'ᶮ', 'ʼ', 'ː', 'ˑ', 'ʴ', '\u{02de}',
];

const VOWELS: &str = "aeiouyɑɐɒæɛɜəɘɵɞɤɨʉɯɪʏʊøœɶɔʌɚɝᴀɿʅʮʯɩ\
    áàâãäåāăąéèêëēĕėęěíìîïĩīĭįóòôõöōŏőúùûüũūŭůűýÿ";
const STOPS: &str = "pbtdkgqɢcɟʈɖɡʡɓɗʄɠƥƭʛ";
const FRICATIVES: &str = "fvszʃʒɕʑʂʐxɣχʁθðçʝɸβħʕɬɮɧ";
const AFFRICATES: &str = "ʦʧʨʣʤʥ";
const NASALS: &str = "mnŋɲɳɴɱȵ";
const LIQUIDS: &str = "lrɾɹɻɭʎʟɽʀɫɺ";
const GLIDES: &str = "jwɥɰʋʍ";
const LARYNGEALS: &str = "ʔhɦ";

fn is_combining(c: char) -> bool {
    matches!(c as u32,
        0x0300..=0x036F | 0x1AB0..=0x1AFF | 0x1DC0..=0x1DFF | 0x20D0..=0x20FF | 0xFE20..=0xFE2F)
}

fn is_tone_char(c: char) -> bool {
    matches!(c, '⁰' | '¹' | '²' | '³' | '⁴'..='⁹' | '₀'..='₉' | '˥'..='˩' | '0'..='9')
}

fn lookup_override(text: &str) -> Option<SoundClass> {
    OVERRIDES.iter().find(|(t, _)| *t == text).map(|&(_, c)| c)
}

fn class_of_char(c: char) -> SoundClass {
    if is_tone_char(c) {
        SoundClass::Tone
    } else if VOWELS.contains(c) {
        SoundClass::Vowel
    } else if LARYNGEALS.contains(c) {
        SoundClass::Laryngeal
    } else if STOPS.contains(c) {
        SoundClass::Stop
    } else if AFFRICATES.contains(c) {
        SoundClass::Affricate
    } else if FRICATIVES.contains(c) {
        SoundClass::Fricative
    } else if NASALS.contains(c) {
        SoundClass::Nasal
    } else if LIQUIDS.contains(c) {
        SoundClass::Liquid
    } else if GLIDES.contains(c) {
        SoundClass::Glide
    } else {
        SoundClass::Other
    }
}

/// Coarse sound class of a segment. Total: unknown material maps to `Other`.
pub fn classify(token: &SoundToken) -> SoundClass {
    let text = token.as_str();
    if let Some(class) = lookup_override(text) {
        return class;
    }
    if text.chars().all(is_tone_char) {
        return SoundClass::Tone;
    }
    let stripped: String = text
        .chars()
        .filter(|&c| !is_combining(c) && !STRIPPED_MODIFIERS.contains(&c))
        .collect();
    if let Some(class) = lookup_override(&stripped) {
        return class;
    }
    match stripped.chars().next() {
        Some(c) => class_of_char(c.to_lowercase().next().unwrap_or(c)),
        // nothing but modifiers, e.g. a bare "ʰ"
        None => match text.chars().next() {
            Some('ʰ' | 'ʱ' | 'ˀ') => SoundClass::Laryngeal,
            _ => SoundClass::Other,
        },
    }
}

/// Pairwise column score. `Ø` is treated like a gap.
pub fn score(a: &SoundToken, b: &SoundToken) -> i32 {
    match (a.is_reserved(), b.is_reserved()) {
        (true, true) => 0,
        (true, false) | (false, true) => -1,
        (false, false) if a == b => 2,
        (false, false) if classify(a) == classify(b) => 1,
        (false, false) => -1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Step {
    /// Both sides advance.
    Diag,
    /// First sequence advances against a gap.
    Up,
    /// Second sequence advances against a gap.
    Left,
}

const TIE_EPS: f64 = 1e-9;

/// Global alignment over index spaces `0..n` and `0..m`. Traceback prefers
/// diagonal, then up, then left, among optimal predecessors.
fn global_align(
    n: usize,
    m: usize,
    sub: impl Fn(usize, usize) -> f64,
    gap_first: impl Fn(usize) -> f64,
    gap_second: impl Fn(usize) -> f64,
) -> Vec<Step> {
    let w = m + 1;
    let mut h = vec![0.0f64; (n + 1) * w];
    for i in 1..=n {
        h[i * w] = h[(i - 1) * w] + gap_first(i - 1);
    }
    for j in 1..=m {
        h[j] = h[j - 1] + gap_second(j - 1);
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = h[(i - 1) * w + j - 1] + sub(i - 1, j - 1);
            let up = h[(i - 1) * w + j] + gap_first(i - 1);
            let left = h[i * w + j - 1] + gap_second(j - 1);
            h[i * w + j] = diag.max(up).max(left);
        }
    }

    let mut steps = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = h[i * w + j];
        if i > 0 && j > 0 && (h[(i - 1) * w + j - 1] + sub(i - 1, j - 1) - here).abs() < TIE_EPS {
            steps.push(Step::Diag);
            i -= 1;
            j -= 1;
        } else if i > 0 && (j == 0 || (h[(i - 1) * w + j] + gap_first(i - 1) - here).abs() < TIE_EPS) {
            steps.push(Step::Up);
            i -= 1;
        } else {
            steps.push(Step::Left);
            j -= 1;
        }
    }
    steps.reverse();
    steps
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedRow {
    pub doculect: String,
    pub tokens: Vec<SoundToken>,
}

/// A rectangular alignment, one row per word form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub rows: Vec<AlignedRow>,
}

impl Alignment {
    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, |r| r.tokens.len())
    }

    pub fn row(&self, doculect: &str) -> Option<&[SoundToken]> {
        self.rows
            .iter()
            .find(|r| r.doculect == doculect)
            .map(|r| r.tokens.as_slice())
    }

    pub fn column(&self, index: usize) -> impl Iterator<Item = &SoundToken> {
        self.rows.iter().map(move |r| &r.tokens[index])
    }

    /// Check rectangularity and the absence of gap-only columns.
    pub fn validate(&self) -> Result<()> {
        let width = self.width();
        if let Some(r) = self.rows.iter().find(|r| r.tokens.len() != width) {
            return Err(Error::Alignment(format!(
                "row {} has {} entries, expected {width}",
                r.doculect,
                r.tokens.len()
            )));
        }
        if let Some(col) = (0..width).find(|&c| self.column(c).all(SoundToken::is_gap)) {
            return Err(Error::Alignment(format!("column {col} contains only gaps")));
        }
        Ok(())
    }

    fn drop_gap_columns(&mut self) {
        let keep: Vec<bool> = (0..self.width())
            .map(|c| !self.column(c).all(SoundToken::is_gap))
            .collect();
        for row in &mut self.rows {
            let mut k = keep.iter();
            row.tokens.retain(|_| *k.next().unwrap());
        }
    }

    fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| a.doculect.cmp(&b.doculect));
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{}\t{}", row.doculect, join_tokens(&row.tokens))?;
        }
        Ok(())
    }
}

fn strip_gaps(tokens: &[SoundToken]) -> Vec<SoundToken> {
    tokens.iter().filter(|t| !t.is_gap()).cloned().collect()
}

/// Add `seq` to `profile`, returning the merged rows (profile rows first).
fn align_to_profile(profile: &[Vec<SoundToken>], seq: &[SoundToken]) -> Vec<Vec<SoundToken>> {
    let width = profile.first().map_or(0, Vec::len);
    let column_score = |col: usize, token: &SoundToken| -> f64 {
        let entries: Vec<&SoundToken> = profile.iter().map(|r| &r[col]).filter(|t| !t.is_gap()).collect();
        if entries.is_empty() {
            return -1.0;
        }
        entries.iter().map(|e| f64::from(score(token, e))).sum::<f64>() / entries.len() as f64
    };
    let steps = global_align(width, seq.len(), |i, j| column_score(i, &seq[j]), |_| -1.0, |_| -1.0);

    let mut merged: Vec<Vec<SoundToken>> = vec![Vec::with_capacity(steps.len()); profile.len() + 1];
    let (mut i, mut j) = (0, 0);
    for step in steps {
        let (take_profile, take_seq) = match step {
            Step::Diag => (true, true),
            Step::Up => (true, false),
            Step::Left => (false, true),
        };
        for (r, row) in profile.iter().enumerate() {
            merged[r].push(if take_profile {
                row[i].clone()
            } else {
                SoundToken::gap()
            });
        }
        merged[profile.len()].push(if take_seq { seq[j].clone() } else { SoundToken::gap() });
        i += usize::from(take_profile);
        j += usize::from(take_seq);
    }
    merged
}

/// Needleman–Wunsch alignment of two forms. Rows keep the argument order.
pub fn align_pair(x: &Form, y: &Form) -> Alignment {
    let rows = align_to_profile(std::slice::from_ref(&x.tokens), &y.tokens);
    let mut rows = rows.into_iter();
    Alignment {
        rows: vec![
            AlignedRow {
                doculect: x.doculect.clone(),
                tokens: rows.next().unwrap(),
            },
            AlignedRow {
                doculect: y.doculect.clone(),
                tokens: rows.next().unwrap(),
            },
        ],
    }
}

/// Use the input's ALIGNMENT cells when every form has one and they agree
/// with the token sequences.
fn precomputed(forms: &[&Form]) -> Option<Result<Alignment>> {
    if !forms.iter().all(|f| f.alignment.is_some()) {
        return None;
    }
    let mut alignment = Alignment {
        rows: forms
            .iter()
            .map(|f| AlignedRow {
                doculect: f.doculect.clone(),
                tokens: f.alignment.clone().unwrap(),
            })
            .collect(),
    };
    let width = alignment.width();
    if alignment.rows.iter().any(|r| r.tokens.len() != width) {
        return Some(Err(Error::Alignment("precomputed rows differ in length".into())));
    }
    alignment.drop_gap_columns();
    for (row, form) in alignment.rows.iter().zip(forms) {
        if strip_gaps(&row.tokens) != form.tokens {
            return Some(Err(Error::Alignment(format!(
                "precomputed alignment of {} does not match its tokens",
                form.id
            ))));
        }
    }
    alignment.sort_rows();
    Some(alignment.validate().map(|_| alignment))
}

/// Align all reflexes of a set, plus the gold proto-form when
/// `include_proto` is set and one is present. A valid precomputed alignment
/// is returned as is (minus columns that became gap-only); an invalid one is
/// reported and recomputed.
pub fn align_cognate_set(set: &CognateSet, include_proto: bool) -> Result<Alignment> {
    let mut forms: Vec<&Form> = set.reflexes.iter().collect();
    if include_proto {
        forms.extend(set.proto.iter());
    }
    if forms.is_empty() {
        return Err(Error::Alignment(format!("cognate set {} is empty", set.cogid)));
    }

    match precomputed(&forms) {
        Some(Ok(alignment)) => return Ok(alignment),
        Some(Err(e)) => warn!("cognate set {}: {e}; realigning", set.cogid),
        None => {}
    }

    forms.sort_by(|a, b| {
        b.tokens
            .len()
            .cmp(&a.tokens.len())
            .then_with(|| a.doculect.cmp(&b.doculect))
    });
    let mut profile: Vec<Vec<SoundToken>> = vec![forms[0].tokens.clone()];
    for form in &forms[1..] {
        profile = align_to_profile(&profile, &form.tokens);
    }
    let mut alignment = Alignment {
        rows: forms
            .iter()
            .zip(profile)
            .map(|(f, tokens)| AlignedRow {
                doculect: f.doculect.clone(),
                tokens,
            })
            .collect(),
    };
    alignment.sort_rows();
    debug_assert!(alignment.validate().is_ok());
    Ok(alignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordlist::tokenize;
    use proptest::prelude::*;

    fn tok(s: &str) -> SoundToken {
        SoundToken::new(s).unwrap()
    }

    fn form(doculect: &str, s: &str) -> Form {
        Form::new(doculect, doculect, "c", tokenize(s).unwrap())
    }

    fn rendered(a: &Alignment) -> Vec<String> {
        a.rows.iter().map(|r| join_tokens(&r.tokens)).collect()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&tok("a")), SoundClass::Vowel);
        assert_eq!(classify(&tok("⁵⁵")), SoundClass::Tone);
        assert_eq!(classify(&tok("˥˩")), SoundClass::Tone);
        assert_eq!(classify(&tok("ʰk")), SoundClass::Stop);
        assert_eq!(classify(&tok("ˀs")), SoundClass::Fricative);
        assert_eq!(classify(&tok("tʃ")), SoundClass::Affricate);
        assert_eq!(classify(&tok("tsʰ")), SoundClass::Affricate);
        assert_eq!(classify(&tok("n̥")), SoundClass::Nasal);
        assert_eq!(classify(&tok("rⁿ")), SoundClass::Liquid);
        assert_eq!(classify(&tok("ʔ")), SoundClass::Laryngeal);
        assert_eq!(classify(&tok("ã")), SoundClass::Vowel);
        assert_eq!(classify(&tok("~")), SoundClass::Other);
        assert_eq!(classify(&tok("ʰ")), SoundClass::Laryngeal);
    }

    #[test]
    fn score_examples() {
        assert_eq!(score(&tok("p"), &tok("p")), 2);
        assert_eq!(score(&tok("p"), &tok("b")), 1);
        assert_eq!(score(&tok("p"), &tok("a")), -1);
        assert_eq!(score(&tok("p"), &SoundToken::gap()), -1);
        assert_eq!(score(&SoundToken::gap(), &SoundToken::gap()), 0);
    }

    #[test]
    fn pair_examples() {
        let a = align_pair(&form("X", "p a t"), &form("Y", "p a t"));
        assert_eq!(a.width(), 3);
        assert_eq!(rendered(&a), ["p a t", "p a t"]);

        let a = align_pair(&form("X", "p a t"), &form("Y", "p a"));
        assert_eq!(rendered(&a), ["p a t", "p a -"]);

        // two optima with score 0; traceback picks "up" at the last column
        let a = align_pair(&form("X", "p a"), &form("Y", "a p"));
        assert_eq!(rendered(&a), ["- p a", "a p -"]);
    }

    /// All alignments of `x` and `y` as step sequences.
    fn enumerate(n: usize, m: usize) -> Vec<Vec<Step>> {
        fn go(i: usize, j: usize, n: usize, m: usize, acc: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
            if i == n && j == m {
                out.push(acc.clone());
                return;
            }
            for (step, di, dj) in [(Step::Diag, 1, 1), (Step::Up, 1, 0), (Step::Left, 0, 1)] {
                if i + di <= n && j + dj <= m {
                    acc.push(step);
                    go(i + di, j + dj, n, m, acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(0, 0, n, m, &mut Vec::new(), &mut out);
        out
    }

    fn apply(steps: &[Step], x: &[SoundToken], y: &[SoundToken]) -> (Vec<SoundToken>, Vec<SoundToken>) {
        let (mut i, mut j) = (0, 0);
        let (mut rx, mut ry) = (Vec::new(), Vec::new());
        for s in steps {
            match s {
                Step::Diag => {
                    rx.push(x[i].clone());
                    ry.push(y[j].clone());
                    i += 1;
                    j += 1;
                }
                Step::Up => {
                    rx.push(x[i].clone());
                    ry.push(SoundToken::gap());
                    i += 1;
                }
                Step::Left => {
                    rx.push(SoundToken::gap());
                    ry.push(y[j].clone());
                    j += 1;
                }
            }
        }
        (rx, ry)
    }

    /// Brute force: best total score; among optima, the one whose step
    /// sequence read from the end is smallest under Diag < Up < Left.
    fn oracle(x: &[SoundToken], y: &[SoundToken]) -> (i32, Vec<SoundToken>, Vec<SoundToken>) {
        let mut best: Option<(i32, Vec<Step>)> = None;
        for steps in enumerate(x.len(), y.len()) {
            let (rx, ry) = apply(&steps, x, y);
            let total: i32 = rx.iter().zip(&ry).map(|(a, b)| score(a, b)).sum();
            let rev: Vec<Step> = steps.iter().rev().copied().collect();
            let better = match &best {
                None => true,
                Some((s, r)) => total > *s || (total == *s && rev < *r),
            };
            if better {
                best = Some((total, rev));
            }
        }
        let (total, rev) = best.unwrap();
        let steps: Vec<Step> = rev.into_iter().rev().collect();
        let (rx, ry) = apply(&steps, x, y);
        (total, rx, ry)
    }

    fn all_forms(inventory: &[&str], max_len: usize) -> Vec<Vec<SoundToken>> {
        let mut out: Vec<Vec<SoundToken>> = vec![vec![]];
        let mut all = Vec::new();
        for _ in 0..max_len {
            out = out
                .iter()
                .flat_map(|f| {
                    inventory.iter().map(move |t| {
                        let mut g = f.clone();
                        g.push(tok(t));
                        g
                    })
                })
                .collect();
            all.extend(out.iter().cloned());
        }
        all
    }

    #[test]
    fn pair_alignment_matches_brute_force() {
        let forms = all_forms(&["p", "b", "a"], 4);
        assert_eq!(forms.len(), 3 + 9 + 27 + 81);
        for x in &forms {
            for y in &forms {
                let fx = Form::new("X", "X", "c", x.clone());
                let fy = Form::new("Y", "Y", "c", y.clone());
                let got = align_pair(&fx, &fy);
                let (best, ox, oy) = oracle(x, y);
                let got_score: i32 = got.rows[0]
                    .tokens
                    .iter()
                    .zip(&got.rows[1].tokens)
                    .map(|(a, b)| score(a, b))
                    .sum();
                assert_eq!(got_score, best, "{x:?} vs {y:?}");
                assert_eq!(got.rows[0].tokens, ox, "{x:?} vs {y:?}");
                assert_eq!(got.rows[1].tokens, oy, "{x:?} vs {y:?}");
            }
        }
    }

    fn set(rows: &[(&str, &str)], proto: Option<&str>) -> CognateSet {
        CognateSet {
            cogid: "1".into(),
            concept: "c".into(),
            reflexes: rows.iter().map(|(d, s)| form(d, s)).collect(),
            proto: proto.map(|p| form("Proto", p)),
        }
    }

    #[test]
    fn identical_reflexes_need_no_gaps() {
        let s = set(&[("A", "p a t"), ("B", "p a t"), ("C", "p a t")], None);
        let a = align_cognate_set(&s, false).unwrap();
        assert_eq!(a.width(), 3);
        assert!(a.rows.iter().all(|r| r.tokens.iter().all(|t| !t.is_gap())));
    }

    #[test]
    fn proto_row_included_on_request() {
        let s = set(&[("A", "p a"), ("B", "p a")], Some("p a n"));
        let joint = align_cognate_set(&s, true).unwrap();
        assert_eq!(joint.width(), 3);
        assert_eq!(join_tokens(joint.row("A").unwrap()), "p a -");
        assert_eq!(join_tokens(joint.row("Proto").unwrap()), "p a n");
        let reflex_only = align_cognate_set(&s, false).unwrap();
        assert!(reflex_only.row("Proto").is_none());
        assert_eq!(reflex_only.width(), 2);
    }

    #[test]
    fn precomputed_alignment_passes_through() {
        let mut s = set(&[("A", "p a"), ("B", "p a t")], Some("b a t"));
        // deliberately unusual placement that recomputation would not pick
        s.reflexes[0].alignment = Some(tokenize_alignment_str("p - a"));
        s.reflexes[1].alignment = Some(tokenize_alignment_str("p a t"));
        s.proto.as_mut().unwrap().alignment = Some(tokenize_alignment_str("b a t"));
        let joint = align_cognate_set(&s, true).unwrap();
        assert_eq!(join_tokens(joint.row("A").unwrap()), "p - a");

        // inconsistent with tokens: recomputed instead
        s.reflexes[0].alignment = Some(tokenize_alignment_str("p o -"));
        let joint = align_cognate_set(&s, true).unwrap();
        assert_eq!(join_tokens(joint.row("A").unwrap()), "p a -");
    }

    #[test]
    fn precomputed_gap_only_columns_dropped_without_proto() {
        let mut s = set(&[("A", "p a"), ("B", "p a")], Some("p a n"));
        s.reflexes[0].alignment = Some(tokenize_alignment_str("p a -"));
        s.reflexes[1].alignment = Some(tokenize_alignment_str("p a -"));
        s.proto.as_mut().unwrap().alignment = Some(tokenize_alignment_str("p a n"));
        assert_eq!(align_cognate_set(&s, false).unwrap().width(), 2);
        assert_eq!(align_cognate_set(&s, true).unwrap().width(), 3);
    }

    fn tokenize_alignment_str(s: &str) -> Vec<SoundToken> {
        crate::wordlist::tokenize_alignment(s).unwrap()
    }

    #[test]
    fn empty_set_is_an_error() {
        let s = set(&[], None);
        assert!(align_cognate_set(&s, false).is_err());
    }

    fn arb_form() -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(
            prop::sample::select(vec!["p", "b", "t", "a", "i", "n", "s", "⁵⁵", "ŋ"]),
            1..6,
        )
    }

    proptest! {
        #[test]
        fn alignment_invariants_hold(forms in prop::collection::vec(arb_form(), 2..6)) {
            let rows: Vec<(String, String)> = forms.iter().enumerate().map(|(i, f)| (format!("D{i}"), f.join(" "))).collect();
            let refs: Vec<(&str, &str)> = rows.iter().map(|(d, f)| (d.as_str(), f.as_str())).collect();
            let s = set(&refs, None);
            let a = align_cognate_set(&s, false).unwrap();
            prop_assert!(a.validate().is_ok());
            for reflex in &s.reflexes {
                prop_assert_eq!(strip_gaps(a.row(&reflex.doculect).unwrap()), reflex.tokens.clone());
            }
            prop_assert_eq!(a, align_cognate_set(&s, false).unwrap());
        }
    }
}
