//! Resampling ensemble and per-column aggregation.
//!
//! Each ensemble member sees a copy of the training data from which a fixed
//! fraction of reflexes (word forms, never proto-forms) was removed at
//! random. Members are trained independently; every cognate set is then
//! aligned once and each member predicts a label for every column of that
//! shared alignment. The per-column tallies form the fuzzy reconstruction.

use std::collections::BTreeMap;

use log::warn;
use rand::seq::index;
use rayon::prelude::*;

use crate::alignment::{align_cognate_set, Alignment};
use crate::classifier::{encode, predict, train, LinearModel};
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyReconstruction, FuzzySegment};
use crate::rng;
use crate::sites::{extract_prediction_sites, extract_training_sites, ProtoLabel, Site};
use crate::wordlist::{CognateSet, Wordlist};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub n_samples: usize,
    /// Fraction of training reflexes removed from each sample.
    pub dropout: f64,
    pub seed: u64,
    pub epochs: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n_samples: 10,
            dropout: 0.1,
            seed: 42,
            epochs: 20,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::Config(format!(
                "need at least 2 samples, got {}",
                self.n_samples
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout must lie in [0, 1), got {}",
                self.dropout
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        Ok(())
    }

    /// Reflexes removed from a pool of `total` training reflexes.
    pub fn removed_per_sample(&self, total: usize) -> usize {
        (self.dropout * total as f64).floor() as usize
    }
}

/// Resampled training wordlists, one per ensemble member. Only sets with a
/// gold proto-form are kept; sets left with fewer than two reflexes are
/// excluded from that sample.
pub fn draw_samples(wl: &Wordlist, cfg: &EnsembleConfig) -> Result<Vec<Wordlist>> {
    cfg.validate()?;
    let training: Vec<&CognateSet> = wl.training_sets().collect();
    if training.is_empty() {
        return Err(Error::Config("no cognate set carries a gold proto-form".into()));
    }
    let total: usize = training.iter().map(|s| s.reflexes.len()).sum();
    let k = cfg.removed_per_sample(total);

    (0..cfg.n_samples)
        .map(|i| {
            let mut rng = rng::stream(cfg.seed, i as u64, "sample");
            let mut removed = vec![false; total];
            for r in index::sample(&mut rng, total, k) {
                removed[r] = true;
            }
            let mut flat = 0;
            let sets: Vec<CognateSet> = training
                .iter()
                .filter_map(|set| {
                    let reflexes: Vec<_> = set
                        .reflexes
                        .iter()
                        .filter(|_| {
                            flat += 1;
                            !removed[flat - 1]
                        })
                        .cloned()
                        .collect();
                    (reflexes.len() >= 2).then(|| CognateSet {
                        reflexes,
                        ..(*set).clone()
                    })
                })
                .collect();
            if sets.is_empty() {
                return Err(Error::Config(format!(
                    "dropout {} leaves sample {i} without training sets",
                    cfg.dropout
                )));
            }
            Ok(Wordlist::from_sets(wl.proto_doculect().map(str::to_string), sets))
        })
        .collect()
}

/// Labelled sites of every training set, over the given doculect frame.
pub fn training_instances(wl: &Wordlist, doculects: &[String]) -> Result<Vec<(Site, ProtoLabel)>> {
    let mut out = Vec::new();
    for set in wl.training_sets() {
        let joint = align_cognate_set(set, true)?;
        match extract_training_sites(set, &joint, doculects) {
            Ok(sites) => out.extend(sites),
            Err(e @ Error::NoReflexSupport { .. }) => warn!("{e}; set skipped"),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// One model per sample, trained concurrently. All members shuffle with the
/// same derived seed, so members differ only through their samples and
/// results do not depend on scheduling.
pub fn train_ensemble(wl: &Wordlist, cfg: &EnsembleConfig) -> Result<Vec<LinearModel>> {
    let samples = draw_samples(wl, cfg)?;
    let doculects = wl.doculects();
    samples
        .par_iter()
        .map(|sample| {
            let instances: Vec<_> = training_instances(sample, doculects)?
                .into_iter()
                .map(|(site, label)| (encode(&site), label))
                .collect();
            train(&instances, cfg.epochs, rng::derive_seed(cfg.seed, 0, "train"))
        })
        .collect()
}

/// Tally every model's prediction over a fixed reflex alignment.
pub fn fuzzy_reconstruct_aligned(
    models: &[LinearModel],
    set: &CognateSet,
    alignment: &Alignment,
    doculects: &[String],
) -> Result<FuzzyReconstruction> {
    let sites = extract_prediction_sites(alignment, doculects);
    let segments: Vec<FuzzySegment> = sites
        .iter()
        .enumerate()
        .map(|(column, site)| {
            let mut counts: BTreeMap<ProtoLabel, usize> = BTreeMap::new();
            for model in models {
                *counts.entry(predict(model, site)).or_default() += 1;
            }
            FuzzySegment::from_counts(column, counts)
        })
        .filter(|seg| !(seg.is_certain() && seg.top().is_gap()))
        .collect();
    if segments.is_empty() {
        return Err(Error::EmptyReconstruction {
            cogid: set.cogid.clone(),
        });
    }
    Ok(FuzzyReconstruction::new(
        &set.cogid,
        &set.concept,
        segments,
        models.len(),
        set.reflexes.len(),
        alignment.width(),
    ))
}

pub fn fuzzy_reconstruct(
    models: &[LinearModel],
    set: &CognateSet,
    doculects: &[String],
) -> Result<FuzzyReconstruction> {
    let alignment = align_cognate_set(set, false)?;
    fuzzy_reconstruct_aligned(models, set, &alignment, doculects)
}

/// Outcome of reconstructing one cognate set.
#[derive(Debug)]
pub struct SetResult {
    pub cogid: String,
    pub alignment: Alignment,
    pub reconstruction: Result<FuzzyReconstruction>,
}

/// Reconstruct every set of `wl` in parallel; results follow set order.
pub fn reconstruct_wordlist(models: &[LinearModel], wl: &Wordlist) -> Result<Vec<SetResult>> {
    wl.sets()
        .par_iter()
        .map(|set| {
            let alignment = align_cognate_set(set, false)?;
            let reconstruction = fuzzy_reconstruct_aligned(models, set, &alignment, wl.doculects());
            Ok(SetResult {
                cogid: set.cogid.clone(),
                alignment,
                reconstruction,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::{consensus, render_fuzzy};
    use crate::wordlist::parse_wordlist_str;

    fn toy() -> Wordlist {
        let mut tsv = String::from("ID\tDOCULECT\tCONCEPT\tTOKENS\tCOGID\n");
        let words = [
            ("p a t", "f a t", "p a d"),
            ("p i t", "f i t", "p i d"),
            ("t a p", "t a f", "d a p"),
            ("k a t", "k a t", "g a d"),
            ("p u k", "f u k", "p u g"),
            ("t i k", "t i k", "d i g"),
            ("k u p", "k u f", "g u p"),
            ("t u t", "t u t", "d u d"),
        ];
        let mut id = 0;
        for (c, (proto, a, b)) in words.iter().enumerate() {
            for (doc, form) in [("Proto", proto), ("A", a), ("B", b), ("C", proto)] {
                id += 1;
                tsv.push_str(&format!("{id}\t{doc}\tw{c}\t{form}\t{c}\n"));
            }
        }
        parse_wordlist_str(&tsv, Some("Proto")).unwrap().0
    }

    #[test]
    fn config_validation() {
        assert!(EnsembleConfig::default().validate().is_ok());
        for bad in [
            EnsembleConfig {
                n_samples: 1,
                ..Default::default()
            },
            EnsembleConfig {
                dropout: 1.0,
                ..Default::default()
            },
            EnsembleConfig {
                dropout: -0.1,
                ..Default::default()
            },
            EnsembleConfig {
                epochs: 0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn removal_count_is_floored() {
        let cfg = EnsembleConfig::default();
        assert_eq!(cfg.removed_per_sample(1442), 144);
        assert_eq!(cfg.removed_per_sample(7305), 730);
    }

    #[test]
    fn samples_remove_exact_counts() {
        let wl = toy();
        let cfg = EnsembleConfig {
            dropout: 0.25,
            ..Default::default()
        };
        let samples = draw_samples(&wl, &cfg).unwrap();
        assert_eq!(samples.len(), 10);
        for s in &samples {
            // 24 reflexes, 6 removed; a set that falls below 2 loses its rest too
            let lost = 24 - s.reflex_count();
            assert!(lost >= 6);
            assert!(s
                .sets()
                .iter()
                .all(|set| set.reflexes.len() >= 2 && set.proto.is_some()));
        }
        assert_eq!(samples, draw_samples(&wl, &cfg).unwrap());
        assert_ne!(samples[0], samples[1]);
    }

    #[test]
    fn zero_dropout_keeps_everything() {
        let wl = toy();
        let cfg = EnsembleConfig {
            dropout: 0.0,
            ..Default::default()
        };
        for s in draw_samples(&wl, &cfg).unwrap() {
            assert_eq!(s, wl);
        }
    }

    #[test]
    fn dropout_too_large_errors() {
        let wl = toy();
        let cfg = EnsembleConfig {
            dropout: 0.99,
            ..Default::default()
        };
        assert!(draw_samples(&wl, &cfg).is_err());
    }

    #[test]
    fn zero_dropout_gives_certain_reconstructions() {
        let wl = toy();
        let cfg = EnsembleConfig {
            dropout: 0.0,
            ..Default::default()
        };
        let models = train_ensemble(&wl, &cfg).unwrap();
        assert_eq!(models.len(), 10);
        for set in wl.sets() {
            let fr = fuzzy_reconstruct(&models, set, wl.doculects()).unwrap();
            assert!(fr.certain, "{}", render_fuzzy(&fr, false));
            assert!(fr.segments.iter().all(|s| s.total == 10));
            assert_eq!(consensus(&fr).unwrap(), set.proto.as_ref().unwrap().tokens);
        }
    }

    #[test]
    fn parallel_schedule_does_not_matter() {
        let wl = toy();
        let cfg = EnsembleConfig {
            dropout: 0.2,
            n_samples: 6,
            ..Default::default()
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| train_ensemble(&wl, &cfg)).unwrap();
        let b = four.install(|| train_ensemble(&wl, &cfg)).unwrap();
        assert_eq!(a, b);
        let ra: Vec<_> = one
            .install(|| reconstruct_wordlist(&a, &wl))
            .unwrap()
            .into_iter()
            .map(|r| r.reconstruction.unwrap())
            .collect();
        let rb: Vec<_> = four
            .install(|| reconstruct_wordlist(&b, &wl))
            .unwrap()
            .into_iter()
            .map(|r| r.reconstruction.unwrap())
            .collect();
        assert_eq!(ra, rb);
    }

    #[test]
    fn all_gap_predictions_are_an_error() {
        // a model that only knows the gap label
        let site_data = vec![(
            encode(
                &extract_prediction_sites(&align_cognate_set(&toy().sets()[0], false).unwrap(), toy().doculects())[0],
            ),
            ProtoLabel::gap(),
        )];
        let m = train(&site_data, 1, 0).unwrap();
        let wl = toy();
        let err = fuzzy_reconstruct(&[m.clone(), m], &wl.sets()[0], wl.doculects()).unwrap_err();
        assert!(matches!(err, Error::EmptyReconstruction { .. }));
    }
}
