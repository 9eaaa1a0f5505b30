//! Tournament protocol guarantees: the exact selector-call count and
//! argmax-consistency under any candidate permutation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retrieval::{tournament_select, Selector};
use std::collections::BTreeMap;

struct CountingFirst {
    calls: usize,
}

impl Selector for CountingFirst {
    fn pick(&mut self, batch: &[String]) -> Result<String, String> {
        self.calls += 1;
        Ok(batch[0].clone())
    }
}

#[test]
fn call_count_is_ceil_ratio_for_all_sizes() {
    for n in 1..=64usize {
        for batch in 2..=8usize {
            let candidates: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
            let mut selector = CountingFirst { calls: 0 };
            tournament_select(&candidates, batch, &mut selector).unwrap();
            let expected = if n <= 1 { 0 } else { (n - 1).div_ceil(batch - 1) };
            assert_eq!(
                selector.calls, expected,
                "n={n} batch={batch}: {} calls, expected {expected}",
                selector.calls
            );
        }
    }
}

struct ScoreSelector<'a> {
    scores: &'a BTreeMap<String, f64>,
    calls: usize,
}

impl Selector for ScoreSelector<'_> {
    fn pick(&mut self, batch: &[String]) -> Result<String, String> {
        self.calls += 1;
        Ok(batch
            .iter()
            .max_by(|a, b| self.scores[*a].partial_cmp(&self.scores[*b]).unwrap())
            .unwrap()
            .clone())
    }
}

#[test]
fn consistent_selector_always_yields_global_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for case in 0..200 {
        let n: usize = rng.gen_range(1..=40);
        let batch: usize = rng.gen_range(2..=8);
        let mut candidates: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let scores: BTreeMap<String, f64> =
            candidates.iter().map(|c| (c.clone(), rng.gen_range(0.0..1.0))).collect();
        candidates.shuffle(&mut rng);

        let expected = candidates
            .iter()
            .max_by(|a, b| scores[*a].partial_cmp(&scores[*b]).unwrap())
            .unwrap()
            .clone();

        let mut selector = ScoreSelector { scores: &scores, calls: 0 };
        let winner = tournament_select(&candidates, batch, &mut selector).unwrap();
        assert_eq!(winner, expected, "case {case} (n={n}, batch={batch})");
        let bound = if n <= 1 { 0 } else { (n - 1).div_ceil(batch - 1) };
        assert!(selector.calls <= bound, "case {case}: exceeded the call bound");
    }
}
