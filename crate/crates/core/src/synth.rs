//! Synthetic language families with known proto-forms.
//!
//! Proto-forms are drawn from a small inventory (alternating consonants and
//! vowels when the inventory has both), and every daughter applies its own
//! ordered list of sound changes. Optional noise corrupts or removes a fixed
//! number of reflexes. The generator is the ground truth for the oracle
//! checks used by `selftest` and the acceptance suite.
//!
//! # Spec file
//!
//! ```text
//! # comment
//! inventory = p t k m n s a e i o u
//! doculects = 8
//! cognate_sets = 300
//! length = 2-4
//! seed = 7
//! presence = 0.6          # chance that a daughter has a reflex (default 1)
//! min_present = 3        # fewest reflexes per set (default 2)
//! masks = 6               # sets share this many presence masks (0: one per set)
//! attestation_floor = 3   # min occurrences of every (sound, context, mask)
//! corrupted = 0
//! dropped = 0
//! rule = D2 p > pʰ
//! rule = D3 s > h / INITIAL
//! rule = D4 t > 0 / FINAL  # 0 deletes
//! ```
//!
//! Daughters are named `D1` … `Dn`; the proto-language is `Proto`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::alignment::{align_cognate_set, classify, SoundClass};
use crate::ensemble::training_instances;
use crate::error::{Error, Result};
use crate::fuzzy::{consensus, FuzzyReconstruction};
use crate::rng;
use crate::sites::extract_prediction_sites;
use crate::wordlist::{CognateSet, Form, SoundToken, Wordlist};

pub const PROTO_DOCULECT: &str = "Proto";
const MAX_FORM_RETRIES: usize = 100;
const MAX_REPAIRS_PER_SET: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Context {
    Any,
    Initial,
    Final,
}

impl Context {
    fn applies(self, index: usize, len: usize) -> bool {
        match self {
            Context::Any => true,
            Context::Initial => index == 0,
            Context::Final => index + 1 == len,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeRule {
    pub doculect: String,
    pub source: SoundToken,
    /// `None` deletes the segment.
    pub target: Option<SoundToken>,
    pub context: Context,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub inventory: Vec<SoundToken>,
    pub n_doculects: usize,
    pub n_cognate_sets: usize,
    pub min_length: usize,
    pub max_length: usize,
    pub rules: Vec<ChangeRule>,
    pub seed: u64,
    pub presence: f64,
    /// Fewest daughters with a reflex in any set (at least 2).
    pub min_present: usize,
    /// Size of the pool of presence masks sets draw from; 0 draws a fresh
    /// mask per set.
    pub n_masks: usize,
    pub attestation_floor: usize,
    pub n_corrupted: usize,
    pub n_dropped: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            inventory: Vec::new(),
            n_doculects: 8,
            n_cognate_sets: 300,
            min_length: 2,
            max_length: 4,
            rules: Vec::new(),
            seed: 42,
            presence: 1.0,
            n_masks: 0,
            min_present: 2,
            attestation_floor: 3,
            n_corrupted: 0,
            n_dropped: 0,
        }
    }
}

pub fn doculect_name(i: usize) -> String {
    format!("D{}", i + 1)
}

impl SynthSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = SynthSpec::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: String| Error::Synth(format!("spec line {}: {m}", n + 1));
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad("expected key = value".into()))?;
            let int = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| bad(format!("{key}: expected an integer")))
            };
            match key {
                "inventory" => {
                    spec.inventory = value
                        .split_whitespace()
                        .map(SoundToken::new)
                        .collect::<Result<_>>()
                        .map_err(|e| bad(e.to_string()))?
                }
                "doculects" => spec.n_doculects = int(value)?,
                "cognate_sets" => spec.n_cognate_sets = int(value)?,
                "length" => {
                    let (lo, hi) = value.split_once('-').unwrap_or((value, value));
                    spec.min_length = int(lo.trim())?;
                    spec.max_length = int(hi.trim())?;
                }
                "seed" => spec.seed = value.parse().map_err(|_| bad("seed: expected an integer".into()))?,
                "presence" => spec.presence = value.parse().map_err(|_| bad("presence: expected a number".into()))?,
                "masks" => spec.n_masks = int(value)?,
                "min_present" => spec.min_present = int(value)?,
                "attestation_floor" => spec.attestation_floor = int(value)?,
                "corrupted" => spec.n_corrupted = int(value)?,
                "dropped" => spec.n_dropped = int(value)?,
                "rule" => spec.rules.push(parse_rule(value).map_err(bad)?),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Synth(m.to_string()));
        if self.inventory.is_empty() {
            return fail("empty inventory");
        }
        if self.inventory.iter().any(SoundToken::is_reserved) {
            return fail("inventory may not contain '-' or 'Ø'");
        }
        if self.n_doculects < 2 {
            return fail("need at least two doculects");
        }
        if self.min_length == 0 || self.min_length > self.max_length {
            return fail("invalid length range");
        }
        if !(self.presence > 0.0 && self.presence <= 1.0) {
            return fail("presence must lie in (0, 1]");
        }
        if self.min_present < 2 || self.min_present > self.n_doculects {
            return fail("min_present must lie between 2 and the number of doculects");
        }
        if self.n_corrupted > self.n_cognate_sets {
            return fail("more corrupted reflexes than cognate sets");
        }
        let names: HashSet<String> = (0..self.n_doculects).map(doculect_name).collect();
        if let Some(r) = self.rules.iter().find(|r| !names.contains(&r.doculect)) {
            return Err(Error::Synth(format!("rule for unknown doculect {}", r.doculect)));
        }
        Ok(())
    }

    pub fn doculects(&self) -> Vec<String> {
        (0..self.n_doculects).map(doculect_name).collect()
    }

    fn rules_for(&self, doculect: &str) -> Vec<&ChangeRule> {
        self.rules.iter().filter(|r| r.doculect == doculect).collect()
    }

    /// Reflex of `proto` in `doculect`, each surviving token tagged with
    /// the proto position it descends from.
    pub fn derive(&self, doculect: &str, proto: &[SoundToken]) -> Vec<(usize, SoundToken)> {
        let rules = self.rules_for(doculect);
        proto
            .iter()
            .enumerate()
            .filter_map(|(i, seg)| {
                let rule = rules
                    .iter()
                    .find(|r| r.source == *seg && r.context.applies(i, proto.len()));
                match rule {
                    Some(r) => r.target.clone().map(|t| (i, t)),
                    None => Some((i, seg.clone())),
                }
            })
            .collect()
    }
}

fn parse_rule(value: &str) -> std::result::Result<ChangeRule, String> {
    let (body, context) = match value.split_once('/') {
        Some((b, c)) => (b.trim(), c.trim()),
        None => (value.trim(), "ANY"),
    };
    let context = match context {
        "ANY" => Context::Any,
        "INITIAL" => Context::Initial,
        "FINAL" => Context::Final,
        other => return Err(format!("unknown context {other:?}")),
    };
    let parts: Vec<&str> = body.split_whitespace().collect();
    let [doculect, source, ">", target] = parts.as_slice() else {
        return Err(format!("rule {value:?} is not of the form 'DOCULECT source > target'"));
    };
    let token = |t: &str| SoundToken::new(t).map_err(|e| e.to_string());
    let target = match *target {
        "0" | "∅" => None,
        t => Some(token(t)?),
    };
    Ok(ChangeRule {
        doculect: doculect.to_string(),
        source: token(source)?,
        target,
        context,
    })
}

/// A reflex deliberately changed by the noise step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corruption {
    pub cogid: String,
    pub doculect: String,
    pub position: usize,
    pub original: SoundToken,
    pub replacement: SoundToken,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub wordlist: Wordlist,
    pub corruptions: Vec<Corruption>,
    /// `(cogid, doculect)` of removed reflexes.
    pub dropped: Vec<(String, String)>,
}

/// (sound, is_initial, is_final, presence group). Under regular rules the
/// reflexes of a segment are fixed by these, so with pooled presence masks
/// one key is one correspondence pattern.
type PatternKey = (SoundToken, bool, bool, usize);

struct DraftSet {
    proto: Vec<SoundToken>,
    /// Index into the mask pool, or 0 when masks are drawn per set.
    group: usize,
    present: Vec<usize>,
}

/// Which sounds may fill each slot of a proto-form.
struct Phonotactics<'a> {
    inventory: &'a [SoundToken],
    vowels: Vec<SoundToken>,
    consonants: Vec<SoundToken>,
}

impl<'a> Phonotactics<'a> {
    fn new(inventory: &'a [SoundToken]) -> Self {
        let (vowels, consonants) = inventory
            .iter()
            .cloned()
            .partition(|t| classify(t) == SoundClass::Vowel);
        Phonotactics {
            inventory,
            vowels,
            consonants,
        }
    }

    fn pool(&self, i: usize) -> &[SoundToken] {
        if self.vowels.is_empty() || self.consonants.is_empty() {
            self.inventory
        } else if i.is_multiple_of(2) {
            &self.consonants
        } else {
            &self.vowels
        }
    }

    fn draw(&self, len: usize, rng: &mut ChaCha8Rng) -> Vec<SoundToken> {
        (0..len).map(|i| self.pool(i).choose(rng).unwrap().clone()).collect()
    }

    /// Every key a form of the given lengths can produce, with the
    /// `(length, index)` slots that produce it.
    fn keys(
        &self,
        lengths: std::ops::RangeInclusive<usize>,
        groups: usize,
    ) -> BTreeMap<PatternKey, Vec<(usize, usize)>> {
        let mut keys: BTreeMap<PatternKey, Vec<(usize, usize)>> = BTreeMap::new();
        for group in 0..groups {
            for len in lengths.clone() {
                for i in 0..len {
                    for t in self.pool(i) {
                        keys.entry((t.clone(), i == 0, i + 1 == len, group))
                            .or_default()
                            .push((len, i));
                    }
                }
            }
        }
        keys
    }
}

fn pattern_keys(proto: &[SoundToken], group: usize) -> impl Iterator<Item = PatternKey> + '_ {
    let n = proto.len();
    proto
        .iter()
        .enumerate()
        .map(move |(i, t)| (t.clone(), i == 0, i + 1 == n, group))
}

fn pattern_counts(drafts: &[DraftSet]) -> HashMap<PatternKey, usize> {
    let mut counts = HashMap::new();
    for d in drafts {
        for key in pattern_keys(&d.proto, d.group) {
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

/// A proto-form no daughter loses entirely, drawn by `draw`.
fn draw_viable(
    spec: &SynthSpec,
    rng: &mut ChaCha8Rng,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Vec<SoundToken>,
) -> Result<Vec<SoundToken>> {
    let doculects = spec.doculects();
    for _ in 0..MAX_FORM_RETRIES {
        let candidate = draw(rng);
        if doculects.iter().all(|d| !spec.derive(d, &candidate).is_empty()) {
            return Ok(candidate);
        }
    }
    Err(Error::Synth(format!(
        "rules delete every segment after {MAX_FORM_RETRIES} draws"
    )))
}

/// Daughters present in a set: each with probability `presence`, at least
/// `min_present`.
fn draw_mask(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<usize> {
    loop {
        let p: Vec<usize> = (0..spec.n_doculects).filter(|_| rng.gen_bool(spec.presence)).collect();
        if p.len() >= spec.min_present {
            return p;
        }
    }
}

fn draft_batch(
    spec: &SynthSpec,
    phon: &Phonotactics,
    masks: &[Vec<usize>],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<DraftSet>> {
    let mut drafts = Vec::with_capacity(spec.n_cognate_sets);
    for _ in 0..spec.n_cognate_sets {
        let proto = draw_viable(spec, rng, |rng| {
            let len = rng.gen_range(spec.min_length..=spec.max_length);
            phon.draw(len, rng)
        })?;
        let (group, present) = if masks.is_empty() {
            (0, draw_mask(spec, rng))
        } else {
            let g = rng.gen_range(0..masks.len());
            (g, masks[g].clone())
        };
        drafts.push(DraftSet { proto, group, present });
    }
    Ok(drafts)
}

/// Swap sets until every producible key occurs at least `floor` times. A set
/// is only replaced when none of its own keys would fall below the floor.
fn enforce_floor(
    spec: &SynthSpec,
    phon: &Phonotactics,
    masks: &[Vec<usize>],
    drafts: &mut [DraftSet],
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let floor = spec.attestation_floor;
    let keys = phon.keys(spec.min_length..=spec.max_length, masks.len().max(1));
    let mut counts = pattern_counts(drafts);
    let fail = || Error::Synth(format!("cannot attest every (sound, context, mask) {floor} times"));
    for _ in 0..MAX_REPAIRS_PER_SET * drafts.len().max(1) {
        let Some((key, slots)) = keys.iter().find(|(k, _)| counts.get(*k).copied().unwrap_or(0) < floor) else {
            return Ok(());
        };
        let victims: Vec<usize> = (0..drafts.len())
            .filter(|&s| {
                let mut own: HashMap<PatternKey, usize> = HashMap::new();
                for k in pattern_keys(&drafts[s].proto, drafts[s].group) {
                    *own.entry(k).or_default() += 1;
                }
                !own.contains_key(key) && own.iter().all(|(k, n)| counts[k] >= floor + n)
            })
            .collect();
        let &victim = victims.choose(rng).ok_or_else(fail)?;
        let &(len, at) = slots.choose(rng).unwrap();
        let proto = draw_viable(spec, rng, |rng| {
            let mut p = phon.draw(len, rng);
            p[at] = key.0.clone();
            p
        })?;
        let victim = &mut drafts[victim];
        for k in pattern_keys(&victim.proto, victim.group) {
            *counts.get_mut(&k).unwrap() -= 1;
        }
        for k in pattern_keys(&proto, key.3) {
            *counts.entry(k).or_insert(0) += 1;
        }
        victim.proto = proto;
        if !masks.is_empty() {
            victim.group = key.3;
            victim.present = masks[key.3].clone();
        }
    }
    Err(fail())
}

/// Generate a wordlist with gold proto-forms. Deterministic in `spec`.
pub fn generate(spec: &SynthSpec) -> Result<SynthOutput> {
    spec.validate()?;
    let mut rng = rng::stream(spec.seed, 0, "synth-forms");
    let phon = Phonotactics::new(&spec.inventory);
    let masks: Vec<Vec<usize>> = (0..spec.n_masks).map(|_| draw_mask(spec, &mut rng)).collect();
    let mut drafts = draft_batch(spec, &phon, &masks, &mut rng)?;
    enforce_floor(spec, &phon, &masks, &mut drafts, &mut rng)?;

    let doculects = spec.doculects();
    let mut derived: Vec<BTreeMap<usize, Vec<(usize, SoundToken)>>> = drafts
        .iter()
        .map(|d| {
            d.present
                .iter()
                .map(|&k| (k, spec.derive(&doculects[k], &d.proto)))
                .collect()
        })
        .collect();

    let mut noise_rng = rng::stream(spec.seed, 1, "synth-noise");
    let corruptions = corrupt(spec, &drafts, &mut derived, &mut noise_rng)?;
    let dropped_idx = drop_reflexes(spec, &mut derived, &corruptions, &mut noise_rng)?;

    let mut id = 0usize;
    let mut next_id = || {
        id += 1;
        id.to_string()
    };
    let mut sets = Vec::with_capacity(drafts.len());
    for (s, (draft, reflexes)) in drafts.iter().zip(&derived).enumerate() {
        let cogid = (s + 1).to_string();
        let concept = format!("concept_{}", s + 1);
        let proto = Form::new(&next_id(), PROTO_DOCULECT, &concept, draft.proto.clone());
        let reflexes = reflexes
            .iter()
            .map(|(&k, toks)| {
                Form::new(
                    &next_id(),
                    &doculects[k],
                    &concept,
                    toks.iter().map(|(_, t)| t.clone()).collect(),
                )
            })
            .collect();
        sets.push(CognateSet {
            cogid,
            concept,
            reflexes,
            proto: Some(proto),
        });
    }
    let dropped = dropped_idx
        .into_iter()
        .map(|(s, k)| ((s + 1).to_string(), doculects[k].clone()))
        .collect();
    Ok(SynthOutput {
        wordlist: Wordlist::from_sets(Some(PROTO_DOCULECT.to_string()), sets),
        corruptions,
        dropped,
    })
}

/// Substitute one token in one reflex of `n_corrupted` distinct sets, taken
/// from the sets with the fewest reflexes, where one bad reflex weighs most. The
/// replacement is preferably the same daughter's regular reflex of another
/// proto sound of the same class, so the word stays plausible.
fn corrupt(
    spec: &SynthSpec,
    drafts: &[DraftSet],
    derived: &mut [BTreeMap<usize, Vec<(usize, SoundToken)>>],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Corruption>> {
    let doculects = spec.doculects();
    // smallest sets first, random among equals
    let mut order: Vec<usize> = index::sample(rng, drafts.len(), drafts.len()).into_vec();
    order.sort_by_key(|&s| derived[s].len());
    let mut chosen: Vec<usize> = order.into_iter().take(spec.n_corrupted).collect();
    chosen.sort_unstable();
    let mut out = Vec::with_capacity(chosen.len());
    for s in chosen {
        let keys: Vec<usize> = derived[s].keys().copied().collect();
        let k = *keys.choose(rng).unwrap();
        let reflex = derived[s].get_mut(&k).unwrap();
        let pos = rng.gen_range(0..reflex.len());
        let (proto_pos, original) = reflex[pos].clone();
        let proto = &drafts[s].proto;
        let proto_class = classify(&proto[proto_pos]);

        let mut candidates: BTreeSet<SoundToken> = spec
            .inventory
            .iter()
            .filter(|q| **q != proto[proto_pos] && classify(q) == proto_class)
            .filter_map(|q| {
                let mut alt = proto.clone();
                alt[proto_pos] = q.clone();
                spec.derive(&doculects[k], &alt)
                    .into_iter()
                    .find(|(i, _)| *i == proto_pos)
                    .map(|(_, t)| t)
            })
            .filter(|t| *t != original)
            .collect();
        if candidates.is_empty() {
            candidates = spec.inventory.iter().filter(|t| **t != original).cloned().collect();
        }
        let candidates: Vec<SoundToken> = candidates.into_iter().collect();
        let replacement = candidates
            .choose(rng)
            .ok_or_else(|| Error::Synth("inventory too small to corrupt a reflex".into()))?
            .clone();
        reflex[pos].1 = replacement.clone();
        out.push(Corruption {
            cogid: (s + 1).to_string(),
            doculect: doculects[k].clone(),
            position: pos,
            original,
            replacement,
        });
    }
    Ok(out)
}

fn drop_reflexes(
    spec: &SynthSpec,
    derived: &mut [BTreeMap<usize, Vec<(usize, SoundToken)>>],
    corruptions: &[Corruption],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize)>> {
    let protected: HashSet<(String, String)> = corruptions
        .iter()
        .map(|c| (c.cogid.clone(), c.doculect.clone()))
        .collect();
    let doculects = spec.doculects();
    let mut dropped = Vec::with_capacity(spec.n_dropped);
    for _ in 0..spec.n_dropped {
        let eligible: Vec<(usize, usize)> = derived
            .iter()
            .enumerate()
            .filter(|(_, r)| r.len() > 2)
            .flat_map(|(s, r)| r.keys().map(move |&k| (s, k)))
            .filter(|(s, k)| !protected.contains(&((s + 1).to_string(), doculects[*k].clone())))
            .collect();
        let &(s, k) = eligible
            .choose(rng)
            .ok_or_else(|| Error::Synth("no reflex can be dropped without shrinking a set below two".into()))?;
        derived[s].remove(&k);
        dropped.push((s, k));
    }
    Ok(dropped)
}

/// Sites that occur with more than one label in the training data, as
/// `(rendered pattern, labels)`.
pub fn find_conflicts(wl: &Wordlist) -> Result<Vec<(String, Vec<String>)>> {
    let mut labels: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (site, label) in training_instances(wl, wl.doculects())? {
        let key = format!(
            "{}@{}{}{}",
            site.pattern
                .values()
                .map(SoundToken::as_str)
                .collect::<Vec<_>>()
                .join(" "),
            site.position.index,
            if site.position.is_initial { "I" } else { "" },
            if site.position.is_final { "F" } else { "" },
        );
        labels.entry(key).or_default().insert(label.to_string());
    }
    Ok(labels
        .into_iter()
        .filter(|(_, l)| l.len() > 1)
        .map(|(k, l)| (k, l.into_iter().collect()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
    /// Sets that are corrupted or share a correspondence pattern with one.
    pub exposed: BTreeSet<String>,
    pub uncertain: BTreeSet<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

fn preview(ids: &BTreeSet<String>) -> String {
    let shown: Vec<&str> = ids.iter().take(8).map(String::as_str).collect();
    let more = if ids.len() > shown.len() { ", …" } else { "" };
    format!("{}{more}", shown.join(", "))
}

/// Verify reconstructions of generated data: sets untouched by noise must be
/// certain and correct, and every uncertain set must be traceable to a
/// corrupted reflex. With corruptions present, at least one set must come
/// out uncertain.
pub fn oracle_check(wl: &Wordlist, frs: &[FuzzyReconstruction], corruptions: &[Corruption]) -> Result<OracleReport> {
    let corrupted: BTreeSet<String> = corruptions.iter().map(|c| c.cogid.clone()).collect();

    let mut patterns_of: BTreeMap<String, HashSet<Vec<SoundToken>>> = BTreeMap::new();
    for set in wl.sets() {
        let alignment = align_cognate_set(set, false)?;
        let pats = extract_prediction_sites(&alignment, wl.doculects())
            .into_iter()
            .map(|s| s.pattern.into_values().collect())
            .collect();
        patterns_of.insert(set.cogid.clone(), pats);
    }
    let noisy_patterns: HashSet<&Vec<SoundToken>> =
        corrupted.iter().filter_map(|c| patterns_of.get(c)).flatten().collect();
    let exposed: BTreeSet<String> = patterns_of
        .iter()
        .filter(|(cogid, pats)| corrupted.contains(*cogid) || pats.iter().any(|p| noisy_patterns.contains(p)))
        .map(|(c, _)| c.clone())
        .collect();

    let mut uncertain = BTreeSet::new();
    let mut clean_uncertain = BTreeSet::new();
    let mut clean_wrong = BTreeSet::new();
    let mut clean_total = 0;
    for fr in frs {
        if !fr.certain {
            uncertain.insert(fr.cogid.clone());
        }
        if exposed.contains(&fr.cogid) {
            continue;
        }
        clean_total += 1;
        if !fr.certain {
            clean_uncertain.insert(fr.cogid.clone());
        }
        let gold = wl.get(&fr.cogid).and_then(|s| s.proto.as_ref()).map(|p| &p.tokens);
        if consensus(fr).ok().as_ref() != gold {
            clean_wrong.insert(fr.cogid.clone());
        }
    }

    let mut checks = vec![
        OracleCheck {
            name: "unexposed sets are certain".into(),
            passed: clean_uncertain.is_empty(),
            detail: format!(
                "{} of {clean_total} uncertain {}",
                clean_uncertain.len(),
                preview(&clean_uncertain)
            ),
        },
        OracleCheck {
            name: "unexposed sets are correct".into(),
            passed: clean_wrong.is_empty(),
            detail: format!("{} of {clean_total} wrong {}", clean_wrong.len(), preview(&clean_wrong)),
        },
    ];
    if !corruptions.is_empty() {
        checks.push(OracleCheck {
            name: "corruption surfaces as uncertainty".into(),
            passed: !uncertain.is_empty(),
            detail: format!(
                "{} uncertain set(s), {} corrupted, {} exposed",
                uncertain.len(),
                corrupted.len(),
                exposed.len()
            ),
        });
        let unexplained: BTreeSet<String> = uncertain.difference(&exposed).cloned().collect();
        checks.push(OracleCheck {
            name: "uncertainty is attributable to corrupted patterns".into(),
            passed: unexplained.is_empty(),
            detail: format!("{} unexplained {}", unexplained.len(), preview(&unexplained)),
        });
    }
    Ok(OracleReport {
        checks,
        exposed,
        uncertain,
    })
}

/// Spec used for the clean-data oracle: eight daughters with regular,
/// non-merging sound changes.
pub const CLEAN_SPEC: &str = include_str!("../specs/clean.spec");
/// The clean spec with twenty corrupted reflexes.
pub const NOISY_SPEC: &str = include_str!("../specs/noisy.spec");
