//! Memo store keyed by encoded signatures.

use rustc_hash::FxHashMap;

/// Counters describing how a store was used.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MemoStats {
    pub lookups: u64,
    pub hits: u64,
    pub stores: u64,
    pub skips: u64,
}

/// Map from a 128-bit signature key to its count.
///
/// With `store_probability < 1` only some computed values are kept. Each offer
/// draws from a deterministic stream hashed from the seed, the key and the
/// number of offers made so far, so runs are repeatable while a signature that
/// was skipped once still gets a fresh chance the next time it is computed.
#[derive(Debug)]
pub struct MemoStore<V> {
    map: FxHashMap<u128, V>,
    store_probability: f64,
    threshold: u64,
    seed: u64,
    stats: MemoStats,
}

impl<V: Clone> MemoStore<V> {
    /// # Panics
    /// If `store_probability` is not in `(0, 1]`.
    pub fn new(store_probability: f64, seed: u64) -> Self {
        assert!(
            store_probability > 0.0 && store_probability <= 1.0,
            "store probability must lie in (0, 1]"
        );
        let threshold = if store_probability >= 1.0 {
            u64::MAX
        } else {
            (store_probability * 2f64.powi(64)) as u64
        };
        MemoStore {
            map: FxHashMap::default(),
            store_probability,
            threshold,
            seed,
            stats: MemoStats::default(),
        }
    }

    pub fn always() -> Self {
        Self::new(1.0, 0)
    }

    pub fn get(&mut self, key: u128) -> Option<&V> {
        self.stats.lookups += 1;
        let v = self.map.get(&key);
        if v.is_some() {
            self.stats.hits += 1;
        }
        v
    }

    /// Offers a freshly computed value; returns whether it was kept.
    pub fn offer(&mut self, key: u128, value: &V) -> bool {
        let draw = self.stats.stores + self.stats.skips;
        if self.threshold == u64::MAX || mix(self.seed ^ splitmix(draw), key) < self.threshold {
            self.map.insert(key, value.clone());
            self.stats.stores += 1;
            true
        } else {
            self.stats.skips += 1;
            false
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn stats(&self) -> MemoStats {
        self.stats
    }

    pub fn store_probability(&self) -> f64 {
        self.store_probability
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mix(seed: u64, key: u128) -> u64 {
    splitmix(splitmix(seed ^ key as u64) ^ (key >> 64) as u64)
}
