//! Fuzzy phonological reconstruction.
//!
//! The pipeline reads a wordlist with cognate codings, aligns every cognate
//! set, turns alignment columns into correspondence-pattern sites, trains an
//! ensemble of position-wise proto-sound classifiers on resampled copies of
//! the data, and summarises their disagreement as fuzzy proto-forms written
//! in pipe notation (`p a:7|i:3 t`).

pub mod alignment;
pub mod classifier;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod fuzzy;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod sites;
pub mod synth;
pub mod wordlist;

pub use alignment::{align_cognate_set, align_pair, classify, score, Alignment, SoundClass};
pub use classifier::{encode, predict, reconstruct_form, train, Feature, FeatureVector, LinearModel, PatternMemory};
pub use ensemble::{draw_samples, fuzzy_reconstruct, train_ensemble, EnsembleConfig};
pub use error::{Error, Result};
pub use fuzzy::{consensus, expansion_count, matches, render_fuzzy, FuzzyPattern, FuzzyReconstruction, FuzzySegment};
pub use metrics::{confused_pairs, score_predictions, AlignmentSizeMode, ConfusionTable, SummaryScores};
pub use sites::{assemble_form, extract_prediction_sites, extract_training_sites, Position, ProtoLabel, Site};
pub use wordlist::{parse_wordlist, tokenize, CognateSet, Form, SoundToken, Wordlist};
