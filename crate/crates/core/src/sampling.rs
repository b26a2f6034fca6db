//! Weighted-sampling building blocks: Walker alias tables, Fenwick trees for
//! dynamic weighted sets, and the dyadic-block envelope walk that samples a
//! whole kernel row in expected O(degree) time.

use crate::params::{ModelParams, VertexTables};
use crate::rng::SeqRng;

/// Walker alias table over fixed nonnegative weights.
#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
    total: f64,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        assert!(n > 0 && total > 0.0, "alias table needs positive total weight");
        let scale = n as f64 / total;
        let mut prob = vec![0.0; n];
        let mut alias = vec![0u32; n];
        let mut small = Vec::new();
        let mut large = Vec::new();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        for (i, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(i)
            } else {
                large.push(i)
            }
        }
        while let Some(s) = small.pop() {
            match large.last().copied() {
                Some(l) => {
                    prob[s] = scaled[s];
                    alias[s] = l as u32;
                    scaled[l] -= 1.0 - scaled[s];
                    if scaled[l] < 1.0 {
                        large.pop();
                        small.push(l);
                    }
                }
                None => prob[s] = 1.0,
            }
        }
        for i in large {
            prob[i] = 1.0;
        }
        AliasTable { prob, alias, total }
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.total
    }

    #[inline]
    pub fn sample(&self, rng: &mut SeqRng) -> usize {
        let i = rng.below(self.prob.len());
        if rng.uniform() < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }
}

/// Fenwick (binary indexed) tree over f64 weights, for dynamic weighted
/// sampling with O(log n) updates and prefix searches.
#[derive(Debug, Clone)]
pub struct Fenwick {
    tree: Vec<f64>,
    weights: Vec<f64>,
}

impl Fenwick {
    pub fn new(n: usize) -> Self {
        Fenwick { tree: vec![0.0; n + 1], weights: vec![0.0; n + 1] }
    }

    pub fn len(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Set the weight at 1-based index i.
    pub fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.weights[i];
        if delta == 0.0 {
            return;
        }
        self.weights[i] = w;
        let mut k = i;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total(&self) -> f64 {
        let mut k = self.len();
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    /// Largest index with prefix sum <= target; samples i ∝ weight when
    /// target is uniform on [0, total).
    pub fn search(&self, mut target: f64) -> usize {
        let mut pos = 0usize;
        let mut step = self.tree.len().next_power_of_two() >> 1;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos + 1
    }

    pub fn sample(&self, rng: &mut SeqRng) -> usize {
        self.search(rng.uniform() * self.total())
    }
}

/// Sample the present neighbours `j` of row `i` among `lo..=hi` (1-based),
/// each independently with probability p_{i,j}∧1, by proposing from the
/// dyadic-block majorant of the separable kernel envelope and accepting with
/// the exact ratio. Expected cost O(E[deg] + log N).
pub fn sample_row(
    params: &ModelParams,
    tables: &VertexTables,
    i: u32,
    lo: u32,
    hi: u32,
    rng: &mut SeqRng,
    out: &mut Vec<u32>,
) {
    if lo > hi {
        return;
    }
    let n = params.n as f64;
    let coeff = params.kernel.beta / n * tables.envelope[i as usize];
    let mut block_lo = lo;
    while block_lo <= hi {
        let block_hi = (block_lo * 2 - 1).min(hi);
        // envelope is decreasing in j, so the block max sits at block_lo
        let q = (coeff * tables.envelope[block_lo as usize]).min(1.0);
        if q >= 1.0 {
            // capped region: every pair needs an explicit accept test
            for j in block_lo..=block_hi {
                if j == i {
                    continue;
                }
                let p = params.connection_prob_unchecked(i, j);
                if rng.uniform() < p {
                    out.push(j);
                }
            }
        } else if q > 0.0 {
            let log1mq = (-q).ln_1p();
            let mut j = block_lo as i64 - 1;
            loop {
                // geometric skip to the next envelope success
                let skip = (rng.uniform().ln() / log1mq).floor() as i64 + 1;
                j += skip.max(1);
                if j > block_hi as i64 {
                    break;
                }
                let cand = j as u32;
                if cand == i {
                    continue;
                }
                let p = params.connection_prob_unchecked(i, cand);
                if rng.uniform() < p / q {
                    out.push(cand);
                }
            }
        }
        block_lo = block_hi + 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{KernelKind, KernelSpec};
    use crate::params::ModelParams;

    #[test]
    fn alias_matches_weights() {
        let w = [1.0, 3.0, 0.0, 6.0];
        let t = AliasTable::new(&w);
        let mut rng = SeqRng::new(1);
        let mut counts = [0usize; 4];
        let reps = 200_000;
        for _ in 0..reps {
            counts[t.sample(&mut rng)] += 1;
        }
        assert_eq!(counts[2], 0);
        for (i, &wi) in w.iter().enumerate() {
            let expect = wi / 10.0 * reps as f64;
            assert!((counts[i] as f64 - expect).abs() < 4.0 * (expect.max(1.0)).sqrt() + 50.0);
        }
    }

    #[test]
    fn fenwick_sampling_and_updates() {
        let mut f = Fenwick::new(8);
        for i in 1..=8 {
            f.set(i, i as f64);
        }
        assert!((f.total() - 36.0).abs() < 1e-12);
        f.set(3, 0.0);
        assert!((f.total() - 33.0).abs() < 1e-12);
        let mut rng = SeqRng::new(2);
        let mut counts = [0usize; 9];
        for _ in 0..100_000 {
            counts[f.sample(&mut rng)] += 1;
        }
        assert_eq!(counts[3], 0);
        for i in 1..=8usize {
            if i == 3 {
                continue;
            }
            let expect = i as f64 / 33.0 * 100_000.0;
            assert!((counts[i] as f64 - expect).abs() < 5.0 * expect.sqrt() + 30.0, "{counts:?}");
        }
    }

    #[test]
    fn row_sampler_matches_pair_probabilities() {
        for kind in [KernelKind::Factor, KernelKind::Weak, KernelKind::PreferentialAttachment] {
            let params = ModelParams::new(
                32,
                KernelSpec::new(kind, 1.0, 0.5).unwrap(),
                0.0,
                1.0,
                1.0,
            )
            .unwrap();
            let tables = VertexTables::build(&params);
            let mut rng = SeqRng::new(77);
            let reps = 40_000;
            let mut counts = vec![0usize; 33];
            let mut buf = Vec::new();
            for _ in 0..reps {
                buf.clear();
                sample_row(&params, &tables, 2, 1, 32, &mut rng, &mut buf);
                for &j in &buf {
                    counts[j as usize] += 1;
                }
            }
            for j in 1..=32u32 {
                if j == 2 {
                    assert_eq!(counts[2], 0);
                    continue;
                }
                let p = params.connection_prob_unchecked(2, j);
                let expect = p * reps as f64;
                let sd = (reps as f64 * p * (1.0 - p)).sqrt();
                assert!(
                    (counts[j as usize] as f64 - expect).abs() < 4.5 * sd + 25.0,
                    "{kind:?} j={j} count={} expect={expect}",
                    counts[j as usize]
                );
            }
        }
    }
}
