//! Synthetic runs for the metric oracle and frozen t-test references.

use lawfind::corpus::QueryTopic;
use lawfind::rank::RankedList;
use rand::seq::SliceRandom;
use rand::Rng;

use super::rng;

/// A random run over `n_queries` queries, with qrels. Some relevant lawyers
/// are left out of the ranking.
pub fn random_run(seed: u64, n_queries: usize) -> (Vec<RankedList>, Vec<QueryTopic>) {
    let mut r = rng(seed);
    let mut run = Vec::new();
    let mut qrels = Vec::new();
    for q in 0..n_queries {
        let qid = format!("q{q:03}");
        let mut pool: Vec<String> = (0..r.gen_range(3..30)).map(|i| format!("l{i:03}")).collect();
        pool.shuffle(&mut r);
        let n_rel = r.gen_range(1..=pool.len().min(6));
        let mut relevant: Vec<String> = pool[..n_rel].to_vec();
        if r.gen_bool(0.3) {
            relevant.push("unranked".into());
        }
        pool.shuffle(&mut r);
        let scores: Vec<(String, f64)> = pool.into_iter().map(|l| (l, r.gen_range(0..40) as f64 / 4.0)).collect();
        run.push(RankedList::from_scores(&qid, "synthetic", scores));
        qrels.push(QueryTopic::new(qid, "tag", relevant));
    }
    (run, qrels)
}

pub struct TTestCase {
    pub a: &'static [f64],
    pub b: &'static [f64],
    pub t: f64,
    pub p: f64,
}

// scipy.stats.ttest_rel(a, b, alternative="greater"), scipy 1.15.3
pub const TTEST_CASES: [TTestCase; 4] = [
    TTestCase {
        a: &[0.4524, 0.5598, 0.9242, 0.4657, 0.5078, 0.5874, 0.1847, 0.5119, 0.6299, 0.793, 0.0941, 0.3034, 0.0907, 0.8096, 0.6934, 0.0419, 0.9822, 0.9648, 0.6539, 0.6156, 0.1575, 0.015, 0.5284, 0.0596, 0.1902, 0.2419, 0.0301, 0.4639, 0.4405, 0.8424],
        b: &[0.1994, 0.4941, 0.6631, 0.426, 0.351, 0.5795, 0.6397, 0.4646, 0.7162, 0.5545, 0.0109, 0.3628, 0.0368, 0.8251, 0.6689, 0.0, 1.0, 0.803, 0.8947, 0.4998, 0.2204, 0.0, 0.6313, 0.0, 0.3, 0.1833, 0.1796, 0.5175, 0.4217, 0.6854],
        t: 0.6297106342999748,
        p: 0.26690709263982515,
    },
    TTestCase {
        a: &[0.0871, 0.3326, 0.9641, 0.758, 0.118, 0.2464, 0.101, 0.0599, 0.797, 0.1777, 0.5593, 0.4474, 0.1907, 0.7319, 0.131, 0.6437, 0.1165, 0.4208, 0.2129, 0.2698, 0.9709, 0.8034, 0.3041, 0.8849, 0.2107, 0.3943, 0.8544, 0.6418, 0.1003, 0.9893],
        b: &[0.1136, 0.4455, 0.9831, 0.6254, 0.1012, 0.3025, 0.2684, 0.1663, 0.8059, 0.3809, 0.4452, 0.5663, 0.3575, 0.6881, 0.0, 0.5078, 0.1521, 0.5, 0.4451, 0.1192, 0.9712, 0.9007, 0.2804, 0.5294, 0.3317, 0.7411, 1.0, 0.5042, 0.0384, 1.0],
        t: -0.9626622789229935,
        p: 0.8281620262226782,
    },
    TTestCase {
        a: &[0.0387, 0.9627, 0.2384, 0.7046, 0.257, 0.8237, 0.5965, 0.2934, 0.1754, 0.7204, 0.0688, 0.2284, 0.5594, 0.8524, 0.6143, 0.2802, 0.9174, 0.204, 0.0166, 0.2692, 0.4457, 0.0605, 0.1763, 0.3688, 0.5722, 0.1316, 0.3621, 0.8909, 0.9805, 0.6569],
        b: &[0.0, 0.8073, 0.2939, 0.7655, 0.6143, 0.8907, 0.5098, 0.0, 0.4168, 0.7788, 0.0, 0.2855, 0.3481, 1.0, 0.8121, 0.3961, 0.9211, 0.0, 0.0276, 0.066, 0.5651, 0.0, 0.0701, 0.5817, 0.8488, 0.0, 0.162, 1.0, 1.0, 0.5389],
        t: -0.26253999085601043,
        p: 0.6026193596020301,
    },
    TTestCase {
        a: &[0.4746, 0.6575, 0.6664, 0.1426, 0.0109, 0.3748, 0.274, 0.8103, 0.6906, 0.6015, 0.5582, 0.6613, 0.1453, 0.4401, 0.1623, 0.906, 0.0588, 0.8188, 0.0746, 0.6869, 0.337, 0.4046, 0.8424, 0.0186, 0.0608, 0.915, 0.5089, 0.091, 0.9871, 0.9467],
        b: &[0.4903, 0.6593, 0.6551, 0.1406, -0.1209, 0.2452, 0.1812, 0.6935, 0.7154, 0.7157, 0.3768, 0.6545, -0.0472, 0.2826, 0.06, 0.8458, -0.0677, 0.4282, 0.1698, 0.5806, 0.1864, 0.4141, 0.6964, -0.2284, 0.0471, 0.8926, 0.3351, 0.1197, 0.9592, 0.7354],
        t: 4.232207649332675,
        p: 0.0001061296621875835,
    },
];
