//! Caption-style text metrics and edit distance.

use std::collections::HashMap;

use super::MetricError;

/// Smoothing numerator for n-gram orders with no matches.
pub const BLEU_EPSILON: f64 = 1e-9;

/// Lowercases and splits on every run of non-alphanumeric ASCII.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn ngram_counts<T: AsRef<str>>(tokens: &[T], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts
                .entry(w.iter().map(AsRef::as_ref).collect())
                .or_default() += 1;
        }
    }
    counts
}

fn clipped_overlap(
    hyp: &HashMap<Vec<&str>, usize>,
    reference: &HashMap<Vec<&str>, usize>,
) -> usize {
    hyp.iter()
        .map(|(g, &c)| c.min(reference.get(g).copied().unwrap_or(0)))
        .sum()
}

/// Corpus BLEU with uniform weights over orders 1..=max_n, one reference per
/// hypothesis. Returns a value in [0, 1].
pub fn corpus_bleu<T: AsRef<str>>(
    references: &[Vec<T>],
    hypotheses: &[Vec<T>],
    max_n: usize,
) -> f64 {
    let mut matches = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);
    for (r, h) in references.iter().zip(hypotheses) {
        hyp_len += h.len();
        ref_len += r.len();
        for n in 1..=max_n {
            let hc = ngram_counts(h, n);
            matches[n - 1] += clipped_overlap(&hc, &ngram_counts(r, n));
            totals[n - 1] += h.len().saturating_sub(n - 1);
        }
    }
    if matches[0] == 0 || hyp_len == 0 {
        return 0.0;
    }
    let log_sum: f64 = (0..max_n)
        .map(|k| {
            let num = if matches[k] == 0 {
                BLEU_EPSILON
            } else {
                matches[k] as f64
            };
            (num / totals[k].max(1) as f64).ln()
        })
        .sum();
    let bp = if hyp_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    bp * (log_sum / max_n as f64).exp()
}

fn f_measure(overlap: usize, hyp: usize, reference: usize) -> f64 {
    if hyp == 0 || reference == 0 || overlap == 0 {
        return 0.0;
    }
    let p = overlap as f64 / hyp as f64;
    let r = overlap as f64 / reference as f64;
    2.0 * p * r / (p + r)
}

/// ROUGE-N F-measure for one pair, in [0, 1].
pub fn rouge_n(reference: &[String], hypothesis: &[String], n: usize) -> f64 {
    let rc = ngram_counts(reference, n);
    let hc = ngram_counts(hypothesis, n);
    f_measure(
        clipped_overlap(&hc, &rc),
        hc.values().sum(),
        rc.values().sum(),
    )
}

fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    for x in a {
        let mut cur = vec![0usize; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        prev = cur;
    }
    prev[b.len()]
}

/// ROUGE-L (longest common subsequence) F-measure for one pair.
pub fn rouge_l(reference: &[String], hypothesis: &[String]) -> f64 {
    f_measure(
        lcs_len(reference, hypothesis),
        hypothesis.len(),
        reference.len(),
    )
}

/// METEOR restricted to exact unigram matches. Each hypothesis token is
/// aligned to the first unused identical reference token.
pub fn meteor_exact(reference: &[String], hypothesis: &[String]) -> f64 {
    let mut used = vec![false; reference.len()];
    let mut aligned: Vec<(usize, usize)> = Vec::new();
    for (i, h) in hypothesis.iter().enumerate() {
        if let Some(j) = (0..reference.len()).find(|&j| !used[j] && reference[j] == *h) {
            used[j] = true;
            aligned.push((i, j));
        }
    }
    let m = aligned.len();
    if m == 0 {
        return 0.0;
    }
    let p = m as f64 / hypothesis.len() as f64;
    let r = m as f64 / reference.len() as f64;
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    let chunks = 1 + aligned
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count();
    let penalty = 0.5 * (chunks as f64 / m as f64).powi(3);
    fmean * (1.0 - penalty)
}

/// Corpus-level caption scores, all scaled to [0, 100].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlgScores {
    pub bleu2: f64,
    pub bleu4: f64,
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub meteor: f64,
}

/// Per-pair ROUGE and METEOR values, scaled to [0, 100].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScores {
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub meteor: f64,
}

pub fn pair_scores(reference: &str, hypothesis: &str) -> PairScores {
    let r = tokenize(reference);
    let h = tokenize(hypothesis);
    PairScores {
        rouge1: 100.0 * rouge_n(&r, &h, 1),
        rouge2: 100.0 * rouge_n(&r, &h, 2),
        rouge_l: 100.0 * rouge_l(&r, &h),
        meteor: 100.0 * meteor_exact(&r, &h),
    }
}

/// BLEU is corpus-level; ROUGE and METEOR are means of per-pair scores.
pub fn nlg_metrics<R: AsRef<str>, H: AsRef<str>>(
    references: &[R],
    hypotheses: &[H],
) -> Result<NlgScores, MetricError> {
    check_lengths(references.len(), hypotheses.len())?;
    let refs: Vec<Vec<String>> = references.iter().map(|r| tokenize(r.as_ref())).collect();
    let hyps: Vec<Vec<String>> = hypotheses.iter().map(|h| tokenize(h.as_ref())).collect();
    let pairs: Vec<PairScores> = references
        .iter()
        .zip(hypotheses)
        .map(|(r, h)| pair_scores(r.as_ref(), h.as_ref()))
        .collect();
    let n = pairs.len() as f64;
    let mean = |f: fn(&PairScores) -> f64| pairs.iter().map(f).sum::<f64>() / n;
    Ok(NlgScores {
        bleu2: 100.0 * corpus_bleu(&refs, &hyps, 2),
        bleu4: 100.0 * corpus_bleu(&refs, &hyps, 4),
        rouge1: mean(|p| p.rouge1),
        rouge2: mean(|p| p.rouge2),
        rouge_l: mean(|p| p.rouge_l),
        meteor: mean(|p| p.meteor),
    })
}

pub(crate) fn check_lengths(references: usize, hypotheses: usize) -> Result<(), MetricError> {
    if references != hypotheses {
        return Err(MetricError::LengthMismatch {
            references,
            hypotheses,
        });
    }
    if references == 0 {
        return Err(MetricError::EmptyCorpus);
    }
    Ok(())
}

/// Minimum number of single-character insertions, deletions and
/// substitutions turning `a` into `b`.
pub fn levenshtein(a: &str, b: &str) -> usize {
    if a.is_ascii() && b.is_ascii() {
        return edit_distance(a.as_bytes(), b.as_bytes());
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    edit_distance(&a, &b)
}

fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    const STACK: usize = 64;
    if b.len() < STACK {
        let mut row = [0usize; STACK];
        edit_distance_in(a, b, &mut row[..=b.len()])
    } else {
        edit_distance_in(a, b, &mut vec![0; b.len() + 1])
    }
}

/// Single-row DP; `diag` carries the previous row's value at j - 1.
fn edit_distance_in<T: PartialEq>(a: &[T], b: &[T], row: &mut [usize]) -> usize {
    for (j, v) in row.iter_mut().enumerate() {
        *v = j;
    }
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = diag + usize::from(ca != cb);
            diag = row[j + 1];
            row[j + 1] = sub.min(diag + 1).min(row[j] + 1);
        }
    }
    row[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn tokenizer_splits_punctuation() {
        assert_eq!(
            toks("It derives from a pentan-1-ol."),
            ["it", "derives", "from", "a", "pentan", "1", "ol"]
        );
    }

    // Reference values from nltk corpus_bleu and rouge_score.
    #[test]
    fn small_pair_matches_reference_implementation() {
        let b2 = corpus_bleu(&[toks("the cat sat")], &[toks("the cat ran")], 2);
        assert!((100.0 * b2 - 57.735).abs() < 0.01);
        let p = pair_scores("the cat sat", "the cat ran");
        assert!((p.rouge1 - 66.667).abs() < 0.01);
        assert!((p.rouge2 - 50.0).abs() < 1e-9);
        assert!((p.rouge_l - 66.667).abs() < 0.01);
    }

    #[test]
    fn perfect_and_disjoint() {
        let refs = ["the molecule is a member of benzenes"];
        let s = nlg_metrics(&refs, &refs).unwrap();
        for v in [s.bleu2, s.bleu4, s.rouge1, s.rouge2, s.rouge_l] {
            assert!((v - 100.0).abs() < 1e-9);
        }
        let s = nlg_metrics(&["a b"], &["c d"]).unwrap();
        for v in [s.bleu2, s.bleu4, s.rouge1, s.rouge2, s.rouge_l, s.meteor] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn meteor_penalizes_fragmentation() {
        let r = toks("a b c d");
        assert!(meteor_exact(&r, &toks("a b c d")) > meteor_exact(&r, &toks("d c b a")));
        // One chunk of four matches: Fmean 1, penalty 0.5 / 64.
        assert!((meteor_exact(&r, &r) - (1.0 - 0.5 / 64.0)).abs() < 1e-12);
    }

    #[test]
    fn corpus_errors() {
        assert!(matches!(
            nlg_metrics::<&str, &str>(&[], &[]),
            Err(MetricError::EmptyCorpus)
        ));
        assert!(matches!(
            nlg_metrics(&["a"], &["a", "b"]),
            Err(MetricError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn edit_distance() {
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
    }
}
