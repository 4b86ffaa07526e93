//! Seeded few-shot subsampling: K training and K development examples drawn
//! without replacement, fully determined by the seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::text::dataset::EqaExample;

#[derive(Debug, Clone)]
pub struct FewShotSplit {
    pub train: Vec<EqaExample>,
    pub dev: Vec<EqaExample>,
    pub seed: u64,
}

/// Draw 2K distinct examples; the first K become the training set, the next
/// K the development set. Two calls with the same seed produce identical
/// membership and order.
pub fn sample_few_shot(dataset: &[EqaExample], k: usize, seed: u64) -> Result<FewShotSplit> {
    if k == 0 {
        return Err(Error::Config("K must be at least 1".into()));
    }
    if dataset.len() < 2 * k {
        return Err(Error::Data(format!(
            "dataset has {} examples but 2K = {} are required",
            dataset.len(),
            2 * k
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, dataset.len(), 2 * k);
    let train = picks.iter().take(k).map(|i| dataset[i].clone()).collect();
    let dev = picks.iter().skip(k).map(|i| dataset[i].clone()).collect();
    Ok(FewShotSplit { train, dev, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::dataset::{Passage, TokenSpan};
    use crate::text::vocab::Vocab;

    fn toy_dataset(n: usize) -> Vec<EqaExample> {
        let texts: Vec<String> = (0..n).map(|i| format!("tok{i} filler word")).collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let vocab = Vocab::build(&refs).unwrap();
        texts
            .iter()
            .map(|t| {
                let passage = Passage::from_text(t, &vocab).unwrap();
                EqaExample {
                    query: vocab.tokenize("which token?"),
                    query_text: "which token?".into(),
                    answer: TokenSpan::new(0, 0),
                    answer_text: t.split(' ').next().unwrap().into(),
                    passage,
                }
            })
            .collect()
    }

    fn fingerprint(split: &FewShotSplit) -> Vec<String> {
        split
            .train
            .iter()
            .chain(split.dev.iter())
            .map(|e| e.passage.raw.clone())
            .collect()
    }

    #[test]
    fn same_seed_reproduces_identical_split() {
        let data = toy_dataset(64);
        let a = sample_few_shot(&data, 16, 42).unwrap();
        let b = sample_few_shot(&data, 16, 42).unwrap();
        assert_eq!(fingerprint(&a), fingerprint(&b));
    }

    #[test]
    fn train_and_dev_are_disjoint() {
        let data = toy_dataset(64);
        let split = sample_few_shot(&data, 16, 87).unwrap();
        assert_eq!(split.train.len(), 16);
        assert_eq!(split.dev.len(), 16);
        let train: std::collections::HashSet<_> =
            split.train.iter().map(|e| e.passage.raw.clone()).collect();
        assert!(split.dev.iter().all(|e| !train.contains(&e.passage.raw)));
    }

    #[test]
    fn different_seeds_differ() {
        let data = toy_dataset(64);
        let a = sample_few_shot(&data, 16, 12).unwrap();
        let b = sample_few_shot(&data, 16, 21).unwrap();
        assert_ne!(fingerprint(&a), fingerprint(&b));
    }

    #[test]
    fn undersized_dataset_is_an_error() {
        let data = toy_dataset(10);
        assert!(matches!(sample_few_shot(&data, 16, 42), Err(Error::Data(_))));
    }
}
