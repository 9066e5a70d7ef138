//! Evaluation against gold reconstructions.
//!
//! A prediction is *certain* when every ensemble member produced the same
//! form, and *correct* when it is certain and its consensus equals the gold
//! proto-form token for token. Confused sounds are counted once per cognate
//! set in which they co-occur as alternatives.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;

use crate::fuzzy::{consensus, FuzzyReconstruction};
use crate::wordlist::Wordlist;

/// What "alignment size" measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlignmentSizeMode {
    /// Number of reflexes (alignment rows).
    #[default]
    Rows,
    /// Number of alignment columns.
    Columns,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CategoryScore {
    pub count: usize,
    pub proportion: f64,
    /// `None` for an empty category.
    pub mean_alignment_size: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryScores {
    pub total: usize,
    pub correct: CategoryScore,
    pub incorrect: CategoryScore,
    pub certain: CategoryScore,
    pub uncertain: CategoryScore,
    /// Reconstructions skipped for lack of a gold proto-form.
    pub excluded: usize,
}

impl SummaryScores {
    pub fn categories(&self) -> [(&'static str, &CategoryScore); 4] {
        [
            ("correct", &self.correct),
            ("false", &self.incorrect),
            ("certain", &self.certain),
            ("uncertain", &self.uncertain),
        ]
    }

    /// Rows of the summary table, proportions and sizes to two decimals.
    pub fn to_tsv(&self, dataset: &str, with_header: bool) -> String {
        let mut out = String::new();
        if with_header {
            out.push_str("Dataset\tPrediction\tCount\tProportion\tAlignment Size\n");
        }
        for (name, cat) in self.categories() {
            let size = cat
                .mean_alignment_size
                .map_or_else(|| "NA".to_string(), |s| format!("{s:.2}"));
            out.push_str(&format!(
                "{dataset}\t{name}\t{}\t{:.2}\t{size}\n",
                cat.count, cat.proportion
            ));
        }
        out
    }
}

fn category(sizes: &[usize], total: usize) -> CategoryScore {
    CategoryScore {
        count: sizes.len(),
        proportion: if total == 0 {
            0.0
        } else {
            sizes.len() as f64 / total as f64
        },
        mean_alignment_size: (!sizes.is_empty()).then(|| sizes.iter().sum::<usize>() as f64 / sizes.len() as f64),
    }
}

pub fn score_predictions(frs: &[FuzzyReconstruction], gold: &Wordlist, mode: AlignmentSizeMode) -> SummaryScores {
    let (mut correct, mut incorrect, mut certain, mut uncertain) = (vec![], vec![], vec![], vec![]);
    let mut excluded = 0;
    for fr in frs {
        let Some(proto) = gold.get(&fr.cogid).and_then(|s| s.proto.as_ref()) else {
            warn!("cognate set {} has no gold proto-form; excluded from scoring", fr.cogid);
            excluded += 1;
            continue;
        };
        let size = match mode {
            AlignmentSizeMode::Rows => fr.reflex_count,
            AlignmentSizeMode::Columns => fr.width,
        };
        let is_correct = fr.certain && consensus(fr).is_ok_and(|c| c == proto.tokens);
        if is_correct { &mut correct } else { &mut incorrect }.push(size);
        if fr.certain { &mut certain } else { &mut uncertain }.push(size);
    }
    let total = correct.len() + incorrect.len();
    SummaryScores {
        total,
        correct: category(&correct, total),
        incorrect: category(&incorrect, total),
        certain: category(&certain, total),
        uncertain: category(&uncertain, total),
        excluded,
    }
}

/// Confused sound pairs, most frequent first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfusionTable {
    /// `(a, b, freq)` with `a < b`.
    pub rows: Vec<(String, String, usize)>,
}

impl ConfusionTable {
    pub fn to_tsv(&self, top: Option<usize>) -> String {
        let mut out = String::from("Sound A\tSound B\tFreq\n");
        for (a, b, n) in self.rows.iter().take(top.unwrap_or(usize::MAX)) {
            out.push_str(&format!("{a}\t{b}\t{n}\n"));
        }
        out
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.rows.iter().any(|(x, y, _)| x == a && y == b)
    }
}

pub fn confused_pairs(frs: &[FuzzyReconstruction]) -> ConfusionTable {
    let mut freq: BTreeMap<(String, String), usize> = BTreeMap::new();
    for fr in frs {
        let mut pairs = BTreeSet::new();
        for seg in &fr.segments {
            for (i, (a, _)) in seg.options.iter().enumerate() {
                for (b, _) in &seg.options[i + 1..] {
                    let (a, b) = (a.to_string(), b.to_string());
                    pairs.insert(if a < b { (a, b) } else { (b, a) });
                }
            }
        }
        for pair in pairs {
            *freq.entry(pair).or_default() += 1;
        }
    }
    let mut rows: Vec<(String, String, usize)> = freq.into_iter().map(|((a, b), n)| (a, b, n)).collect();
    rows.sort_by(|x, y| y.2.cmp(&x.2).then_with(|| (&x.0, &x.1).cmp(&(&y.0, &y.1))));
    ConfusionTable { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::FuzzySegment;
    use crate::sites::ProtoLabel;
    use crate::wordlist::parse_wordlist_str;

    fn seg(counts: &[(&str, usize)]) -> FuzzySegment {
        FuzzySegment::from_counts(
            0,
            counts
                .iter()
                .map(|(l, n)| (ProtoLabel::parse(l).unwrap(), *n))
                .collect(),
        )
    }

    fn fr(cogid: &str, reflexes: usize, segments: Vec<FuzzySegment>) -> FuzzyReconstruction {
        let w = segments.len();
        FuzzyReconstruction::new(cogid, "c", segments, 10, reflexes, w)
    }

    fn gold() -> Wordlist {
        let tsv = "ID\tDOCULECT\tCONCEPT\tTOKENS\tCOGID\n\
            1\tP\ta\tp a t\t1\n2\tA\ta\tp a t\t1\n3\tB\ta\tp a t\t1\n\
            4\tP\tb\tm i\t2\n5\tA\tb\tm i\t2\n6\tB\tb\tm e\t2\n7\tC\tb\tm e\t2\n\
            8\tA\tc\tk o\t3\n9\tB\tc\tk o\t3\n";
        parse_wordlist_str(tsv, Some("P")).unwrap().0
    }

    #[test]
    fn all_correct_toy() {
        let frs = vec![
            fr("1", 2, vec![seg(&[("p", 10)]), seg(&[("a", 10)]), seg(&[("t", 10)])]),
            fr("2", 2, vec![seg(&[("m", 10)]), seg(&[("i", 10)])]),
        ];
        let s = score_predictions(&frs, &gold(), AlignmentSizeMode::Rows);
        assert_eq!(s.total, 2);
        assert_eq!(s.correct.proportion, 1.0);
        assert_eq!(s.correct.mean_alignment_size, s.certain.mean_alignment_size);
        assert_eq!(s.incorrect.mean_alignment_size, None);
    }

    #[test]
    fn categories_and_sizes() {
        let frs = vec![
            fr("1", 2, vec![seg(&[("p", 10)]), seg(&[("a", 10)]), seg(&[("t", 10)])]),
            fr("2", 3, vec![seg(&[("m", 10)]), seg(&[("e", 9), ("i", 1)])]),
            fr("3", 2, vec![seg(&[("k", 10)]), seg(&[("o", 10)])]),
        ];
        let s = score_predictions(&frs, &gold(), AlignmentSizeMode::Rows);
        assert_eq!(s.excluded, 1);
        assert_eq!(
            (s.correct.count, s.incorrect.count, s.certain.count, s.uncertain.count),
            (1, 1, 1, 1)
        );
        assert_eq!(s.uncertain.mean_alignment_size, Some(3.0));
        let by_cols = score_predictions(&frs, &gold(), AlignmentSizeMode::Columns);
        assert_eq!(by_cols.correct.mean_alignment_size, Some(3.0));
        let table = s.to_tsv("Toy", true);
        assert_eq!(table.lines().count(), 5);
        assert!(table.contains("Toy\tfalse\t1\t0.50\t3.00"));
    }

    #[test]
    fn certain_but_wrong_is_false() {
        let frs = vec![fr("2", 3, vec![seg(&[("m", 10)]), seg(&[("e", 10)])])];
        let s = score_predictions(&frs, &gold(), AlignmentSizeMode::Rows);
        assert_eq!((s.correct.count, s.certain.count), (0, 1));
    }

    #[test]
    fn three_options_give_three_pairs() {
        let t = confused_pairs(&[fr("1", 2, vec![seg(&[("a", 8), ("e", 1), ("i", 1)])])]);
        assert_eq!(
            t.rows,
            vec![
                ("a".into(), "e".into(), 1),
                ("a".into(), "i".into(), 1),
                ("e".into(), "i".into(), 1)
            ]
        );
    }

    #[test]
    fn pairs_count_once_per_set() {
        let twice = || vec![seg(&[("a", 5), ("e", 5)]), seg(&[("e", 2), ("a", 8)])];
        let t = confused_pairs(&[fr("1", 2, twice()), fr("2", 2, twice())]);
        assert_eq!(t.rows, vec![("a".into(), "e".into(), 2)]);
    }

    #[test]
    fn gaps_take_part_and_order_is_by_frequency() {
        let t = confused_pairs(&[
            fr("1", 2, vec![seg(&[("ŋ", 6), ("-", 4)])]),
            fr("2", 2, vec![seg(&[("-", 6), ("ŋ", 4)])]),
            fr("3", 2, vec![seg(&[("⁴", 6), ("¹", 4)])]),
        ]);
        assert_eq!(t.rows[0], ("-".into(), "ŋ".into(), 2));
        assert!(t.contains("ŋ", "-"));
        assert!(t.to_tsv(Some(1)).lines().count() == 2);
    }
}
