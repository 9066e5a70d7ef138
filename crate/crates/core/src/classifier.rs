//! Position-wise proto-sound prediction.
//!
//! Sites are encoded as sparse binary features: one `(doculect, token)`
//! indicator per pattern entry (gaps and `Ø` included) plus position
//! indicators. A one-vs-rest linear model is trained with the averaged
//! perceptron. Training is fully deterministic: the visiting order of each
//! epoch comes from a seeded ChaCha stream, and argmax ties go to the
//! lexicographically smallest label.
//!
//! # Model file format
//!
//! ```text
//! fuzzyrecon-models<TAB>1
//! model<TAB><index><TAB>epochs=<n><TAB>seed=<n>
//! class<TAB><label>            (one line per class, sorted)
//! w<TAB><label><TAB><feature><TAB><weight>
//! end
//! ```
//!
//! Features render as `tok:<doculect>=<token>`, `pos:INITIAL`, `pos:FINAL`
//! or `pos:INDEX_<k>`. Zero weights are omitted; weights are written in
//! shortest round-trip form, so reading a file back reproduces the model
//! bit for bit.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;

use crate::alignment::Alignment;
use crate::error::{Error, Result};
use crate::rng;
use crate::sites::{assemble_form, extract_prediction_sites, ProtoLabel, Site};
use crate::wordlist::{CognateSet, SoundToken};

pub const MAX_INDEX_FEATURE: usize = 9;
const MODEL_HEADER: &str = "fuzzyrecon-models\t1";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    Token { doculect: String, token: String },
    Initial,
    Final,
    Index(usize),
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feature::Token { doculect, token } => write!(f, "tok:{doculect}={token}"),
            Feature::Initial => f.write_str("pos:INITIAL"),
            Feature::Final => f.write_str("pos:FINAL"),
            Feature::Index(k) => write!(f, "pos:INDEX_{k}"),
        }
    }
}

impl Feature {
    fn parse(text: &str) -> Option<Feature> {
        if let Some(rest) = text.strip_prefix("tok:") {
            let (doculect, token) = rest.split_once('=')?;
            return Some(Feature::Token {
                doculect: doculect.to_string(),
                token: token.to_string(),
            });
        }
        match text.strip_prefix("pos:")? {
            "INITIAL" => Some(Feature::Initial),
            "FINAL" => Some(Feature::Final),
            other => other.strip_prefix("INDEX_")?.parse().ok().map(Feature::Index),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub active: Vec<Feature>,
}

pub fn encode(site: &Site) -> FeatureVector {
    let mut active: Vec<Feature> = site
        .pattern
        .iter()
        .map(|(d, t)| Feature::Token {
            doculect: d.clone(),
            token: t.as_str().to_string(),
        })
        .collect();
    if site.position.is_initial {
        active.push(Feature::Initial);
    }
    if site.position.is_final {
        active.push(Feature::Final);
    }
    active.push(Feature::Index(site.position.index.min(MAX_INDEX_FEATURE)));
    FeatureVector { active }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub seed: u64,
}

/// One-vs-rest linear model over sparse binary features.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    classes: Vec<ProtoLabel>,
    features: Vec<Feature>,
    index: HashMap<Feature, usize>,
    /// Row-major: `weights[feature * classes.len() + class]`.
    weights: Vec<f64>,
    pub meta: TrainingMeta,
}

impl LinearModel {
    pub fn classes(&self) -> &[ProtoLabel] {
        &self.classes
    }

    pub fn weight(&self, class: &ProtoLabel, feature: &Feature) -> f64 {
        let Ok(c) = self.classes.binary_search(class) else {
            return 0.0;
        };
        self.index
            .get(feature)
            .map_or(0.0, |&f| self.weights[f * self.classes.len() + c])
    }

    fn feature_ids(&self, fv: &FeatureVector) -> Vec<usize> {
        fv.active.iter().filter_map(|f| self.index.get(f).copied()).collect()
    }

    pub fn scores(&self, fv: &FeatureVector) -> Vec<f64> {
        scores(&self.weights, self.classes.len(), &self.feature_ids(fv))
    }

    pub fn predict_features(&self, fv: &FeatureVector) -> &ProtoLabel {
        &self.classes[argmax(&self.scores(fv))]
    }

    /// Append this model to a model file body.
    pub fn write_to(&self, index: usize, out: &mut String) {
        out.push_str(&format!(
            "model\t{index}\tepochs={}\tseed={}\n",
            self.meta.epochs, self.meta.seed
        ));
        for class in &self.classes {
            out.push_str(&format!("class\t{class}\n"));
        }
        let k = self.classes.len();
        for (f, feature) in self.features.iter().enumerate() {
            for (c, class) in self.classes.iter().enumerate() {
                let w = self.weights[f * k + c];
                if w != 0.0 {
                    out.push_str(&format!("w\t{class}\t{feature}\t{w}\n"));
                }
            }
        }
        out.push_str("end\n");
    }
}

fn scores(weights: &[f64], n_classes: usize, active: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; n_classes];
    for &f in active {
        let row = &weights[f * n_classes..(f + 1) * n_classes];
        for (o, w) in out.iter_mut().zip(row) {
            *o += w;
        }
    }
    out
}

/// First maximal index. Classes are sorted, so ties resolve lexicographically.
fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Averaged-perceptron training.
pub fn train(instances: &[(FeatureVector, ProtoLabel)], epochs: usize, seed: u64) -> Result<LinearModel> {
    if instances.is_empty() {
        return Err(Error::EmptyTraining);
    }
    if epochs == 0 {
        return Err(Error::Config("epochs must be at least 1".into()));
    }

    let mut classes: Vec<ProtoLabel> = instances.iter().map(|(_, l)| l.clone()).collect();
    classes.sort();
    classes.dedup();
    let k = classes.len();

    let mut features = Vec::new();
    let mut index = HashMap::new();
    let encoded: Vec<(Vec<usize>, usize)> = instances
        .iter()
        .map(|(fv, label)| {
            let ids = fv
                .active
                .iter()
                .map(|f| {
                    *index.entry(f.clone()).or_insert_with(|| {
                        features.push(f.clone());
                        features.len() - 1
                    })
                })
                .collect();
            (ids, classes.binary_search(label).expect("label interned"))
        })
        .collect();

    let mut w = vec![0.0f64; features.len() * k];
    // Daumé's trick: averaged = w - u / c, with u accumulating c * update.
    let mut u = vec![0.0f64; features.len() * k];
    let mut c = 1.0f64;
    let mut order: Vec<usize> = (0..encoded.len()).collect();
    let mut rng = rng::stream(seed, 0, "perceptron");

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (ids, truth) = &encoded[i];
            let guess = argmax(&scores(&w, k, ids));
            if guess != *truth {
                for &f in ids {
                    w[f * k + truth] += 1.0;
                    w[f * k + guess] -= 1.0;
                    u[f * k + truth] += c;
                    u[f * k + guess] -= c;
                }
            }
            c += 1.0;
        }
    }

    let weights = w.iter().zip(&u).map(|(w, u)| w - u / c).collect();
    Ok(LinearModel {
        classes,
        features,
        index,
        weights,
        meta: TrainingMeta { epochs, seed },
    })
}

pub fn predict(model: &LinearModel, site: &Site) -> ProtoLabel {
    model.predict_features(&encode(site)).clone()
}

/// Predict a proto-form for `set` over an existing reflex alignment.
pub fn reconstruct_form(
    model: &LinearModel,
    set: &CognateSet,
    alignment: &Alignment,
    doculects: &[String],
) -> Result<Vec<SoundToken>> {
    let labels: Vec<ProtoLabel> = extract_prediction_sites(alignment, doculects)
        .iter()
        .map(|s| predict(model, s))
        .collect();
    assemble_form(&labels).map_err(|_| Error::EmptyReconstruction {
        cogid: set.cogid.clone(),
    })
}

/// Serialise an ensemble to the flat text format.
pub fn write_models(models: &[LinearModel]) -> String {
    let mut out = format!("{MODEL_HEADER}\n");
    for (i, m) in models.iter().enumerate() {
        m.write_to(i, &mut out);
    }
    out
}

pub fn read_models(text: &str) -> Result<Vec<LinearModel>> {
    let bad = |line: usize, message: &str| Error::ModelFormat {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h == MODEL_HEADER => {}
        _ => return Err(bad(1, "missing or unsupported header")),
    }

    struct Partial {
        meta: TrainingMeta,
        classes: Vec<ProtoLabel>,
        weights: Vec<(usize, Feature, f64)>,
    }
    let mut models = Vec::new();
    let mut current: Option<Partial> = None;

    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match (fields[0], current.as_mut()) {
            ("model", None) => {
                let value = |i: usize, key: &str| {
                    fields
                        .get(i)
                        .and_then(|f| f.strip_prefix(key))
                        .and_then(|v| v.parse::<u64>().ok())
                        .ok_or_else(|| bad(n, &format!("expected {key}<integer>")))
                };
                current = Some(Partial {
                    meta: TrainingMeta {
                        epochs: value(2, "epochs=")? as usize,
                        seed: value(3, "seed=")?,
                    },
                    classes: Vec::new(),
                    weights: Vec::new(),
                });
            }
            ("class", Some(p)) if fields.len() == 2 => {
                let label = ProtoLabel::parse(fields[1]).map_err(|e| bad(n, &e.to_string()))?;
                if p.classes.last().is_some_and(|last| *last >= label) {
                    return Err(bad(n, "classes must be sorted and unique"));
                }
                p.classes.push(label);
            }
            ("w", Some(p)) if fields.len() == 4 => {
                let label = ProtoLabel::parse(fields[1]).map_err(|e| bad(n, &e.to_string()))?;
                let class = p
                    .classes
                    .binary_search(&label)
                    .map_err(|_| bad(n, "weight for undeclared class"))?;
                let feature = Feature::parse(fields[2]).ok_or_else(|| bad(n, "unparsable feature"))?;
                let weight: f64 = fields[3].parse().map_err(|_| bad(n, "unparsable weight"))?;
                p.weights.push((class, feature, weight));
            }
            ("end", Some(_)) => {
                let p = current.take().unwrap();
                let k = p.classes.len();
                if k == 0 {
                    return Err(bad(n, "model without classes"));
                }
                let mut features = Vec::new();
                let mut index = HashMap::new();
                let mut weights = Vec::new();
                for (class, feature, w) in p.weights {
                    let f = *index.entry(feature.clone()).or_insert_with(|| {
                        features.push(feature);
                        weights.extend(std::iter::repeat_n(0.0, k));
                        features.len() - 1
                    });
                    weights[f * k + class] = w;
                }
                models.push(LinearModel {
                    classes: p.classes,
                    features,
                    index,
                    weights,
                    meta: p.meta,
                });
            }
            _ => return Err(bad(n, "unexpected line")),
        }
    }
    if current.is_some() {
        return Err(bad(text.lines().count(), "truncated model (missing end)"));
    }
    Ok(models)
}

type CanonicalPattern = Vec<(String, SoundToken)>;

/// Lookup baseline: label counts per exact correspondence pattern.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternMemory {
    table: BTreeMap<CanonicalPattern, BTreeMap<ProtoLabel, usize>>,
    global: BTreeMap<ProtoLabel, usize>,
}

fn canonical(site: &Site) -> CanonicalPattern {
    site.pattern.iter().map(|(d, t)| (d.clone(), t.clone())).collect()
}

fn majority(counts: &BTreeMap<ProtoLabel, usize>) -> Option<&ProtoLabel> {
    // BTreeMap iterates labels in order; keep the first maximum
    counts
        .iter()
        .fold(None, |best: Option<(&ProtoLabel, usize)>, (l, &n)| match best {
            Some((_, m)) if m >= n => best,
            _ => Some((l, n)),
        })
        .map(|(l, _)| l)
}

impl PatternMemory {
    pub fn fit<'a>(instances: impl IntoIterator<Item = &'a (Site, ProtoLabel)>) -> Self {
        let mut memory = PatternMemory::default();
        for (site, label) in instances {
            *memory
                .table
                .entry(canonical(site))
                .or_default()
                .entry(label.clone())
                .or_default() += 1;
            *memory.global.entry(label.clone()).or_default() += 1;
        }
        memory
    }

    pub fn is_empty(&self) -> bool {
        self.global.is_empty()
    }

    pub fn global_counts(&self) -> &BTreeMap<ProtoLabel, usize> {
        &self.global
    }
}

/// Exact pattern hit, else the stored pattern with most agreeing attested
/// entries (ties: more frequent, then smaller pattern), else the global
/// majority label.
pub fn predict_baseline(memory: &PatternMemory, site: &Site) -> Result<ProtoLabel> {
    if memory.is_empty() {
        return Err(Error::EmptyMemory);
    }
    let key = canonical(site);
    if let Some(counts) = memory.table.get(&key) {
        return Ok(majority(counts).unwrap().clone());
    }

    let agreements = |stored: &CanonicalPattern| {
        stored
            .iter()
            .filter(|(d, t)| !t.is_missing() && site.pattern.get(d).is_some_and(|s| s == t))
            .count()
    };
    let mut best: Option<(usize, usize, &CanonicalPattern, &BTreeMap<ProtoLabel, usize>)> = None;
    for (pattern, counts) in &memory.table {
        let agree = agreements(pattern);
        if agree == 0 {
            continue;
        }
        let freq: usize = counts.values().sum();
        // table iterates patterns in ascending order, so strict comparison
        // keeps the smallest pattern among equals
        let better = match best {
            None => true,
            Some((a, f, _, _)) => (agree, freq) > (a, f),
        };
        if better {
            best = Some((agree, freq, pattern, counts));
        }
    }
    let counts = best.map_or(&memory.global, |(_, _, _, c)| c);
    Ok(majority(counts).unwrap().clone())
}
