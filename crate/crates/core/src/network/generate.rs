use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FirmNetwork, IndustryId, IndustryTaxonomy, NetworkError, TaxonomyLevel};

/// Random directed network: every unordered pair of firms is linked
/// independently with probability `p`, and each realized link gets a
/// uniformly random direction.
///
/// Pairs are visited with geometric skips, so the cost is proportional to
/// the number of links rather than to `n²`.
pub fn generate_random_directed(n: usize, p: f64, seed: u64) -> Result<FirmNetwork, NetworkError> {
    if n < 2 {
        return Err(NetworkError::InvalidParameter(format!(
            "random network needs at least 2 firms, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(NetworkError::InvalidParameter(format!(
            "pair probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut links = Vec::new();
    if p > 0.0 {
        let expected = n as f64 * (n as f64 - 1.0) / 2.0 * p;
        links.reserve((expected * 1.01 + 16.0) as usize);
        // Pair (v, w) with w < v, enumerated row by row.
        let log_q = (1.0 - p).ln();
        let mut v: u64 = 1;
        let mut w: i64 = -1;
        let n = n as u64;
        while v < n {
            let skip = if p >= 1.0 {
                0
            } else {
                let r: f64 = rng.random();
                ((1.0 - r).ln() / log_q).floor() as i64
            };
            w += 1 + skip;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                let (a, b) = (v as u32, w as u32);
                links.push(if rng.random::<bool>() { (a, b) } else { (b, a) });
            }
        }
    }
    FirmNetwork::from_links(n, &links)
}

/// Preferential-attachment network grown on total degree.
///
/// Starts from a complete graph on `m + 1` firms; each later firm links to
/// `m` distinct existing firms chosen with probability proportional to their
/// total degree. Every link's direction is drawn uniformly at random.
pub fn generate_scale_free(n: usize, m: usize, seed: u64) -> Result<FirmNetwork, NetworkError> {
    if m < 1 {
        return Err(NetworkError::InvalidParameter(
            "links per new firm must be at least 1".into(),
        ));
    }
    if n <= m {
        return Err(NetworkError::InvalidParameter(format!(
            "firm count {n} must exceed links per new firm {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seed_links = m * (m + 1) / 2;
    // Uniform draws over link endpoints are degree-proportional draws over firms.
    let mut links: Vec<(u32, u32)> = Vec::with_capacity(seed_links + (n - m - 1) * m);
    let orient = |a: u32, b: u32, rng: &mut ChaCha8Rng| {
        if rng.random::<bool>() {
            (a, b)
        } else {
            (b, a)
        }
    };

    for a in 0..=m as u32 {
        for b in (a + 1)..=m as u32 {
            let link = orient(a, b, &mut rng);
            links.push(link);
        }
    }

    let mut chosen: Vec<u32> = Vec::with_capacity(m);
    for v in (m + 1) as u32..n as u32 {
        chosen.clear();
        let pool = links.len() * 2;
        while chosen.len() < m {
            let pick = endpoint_at(&links, rng.random_range(0..pool));
            if !chosen.contains(&pick) {
                chosen.push(pick);
            }
        }
        for &t in &chosen {
            let link = orient(v, t, &mut rng);
            links.push(link);
        }
    }
    FirmNetwork::from_links(n, &links)
}

#[inline]
fn endpoint_at(links: &[(u32, u32)], k: usize) -> u32 {
    let (a, b) = links[k / 2];
    if k.is_multiple_of(2) {
        a
    } else {
        b
    }
}

/// Labels each firm independently with a code drawn from `weights`.
///
/// Weights must be nonnegative and sum to 1 within `1e-9`. The resulting
/// taxonomy lists the codes in the given order.
pub fn assign_industries(
    net: FirmNetwork,
    weights: &[(String, f64)],
    seed: u64,
) -> Result<FirmNetwork, NetworkError> {
    if weights.is_empty() {
        return Err(NetworkError::InvalidWeights("no industries given".into()));
    }
    if let Some((code, w)) = weights.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
        return Err(NetworkError::InvalidWeights(format!(
            "weight {w} for {code} is not a nonnegative number"
        )));
    }
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(NetworkError::InvalidWeights(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    let taxonomy = IndustryTaxonomy::from_codes(
        weights.iter().map(|(c, _)| c.clone()),
        TaxonomyLevel::Division,
    )?;
    let dist = WeightedIndex::new(weights.iter().map(|(_, w)| *w))
        .map_err(|e| NetworkError::InvalidWeights(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = (0..net.firm_count())
        .map(|_| IndustryId(dist.sample(&mut rng) as u16))
        .collect();
    net.with_industries(taxonomy, labels)
}

/// `k` equally weighted codes `I01`, `I02`, ...
pub fn uniform_weights(k: usize) -> Vec<(String, f64)> {
    (1..=k)
        .map(|i| (format!("I{i:02}"), 1.0 / k as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Degree, FirmId};

    fn binomial_bound(trials: f64, p: f64, sigmas: f64) -> (f64, f64) {
        let mean = trials * p;
        let sd = (trials * p * (1.0 - p)).sqrt();
        (mean - sigmas * sd, mean + sigmas * sd)
    }

    #[test]
    fn random_zero_probability_has_no_links() {
        let net = generate_random_directed(100, 0.0, 3).unwrap();
        assert_eq!(net.link_count(), 0);
        assert_eq!(net.firm_count(), 100);
    }

    #[test]
    fn random_full_probability_links_every_pair_once() {
        let net = generate_random_directed(30, 1.0, 3).unwrap();
        assert_eq!(net.link_count(), 30 * 29 / 2);
        for f in net.firms() {
            assert_eq!(net.degree(f, Degree::Total), 29);
        }
    }

    #[test]
    fn random_link_count_is_binomial() {
        let (lo, hi) = binomial_bound(499_500.0, 0.01, 4.0);
        for seed in 0..5 {
            let net = generate_random_directed(1000, 0.01, seed).unwrap();
            let l = net.link_count() as f64;
            assert!(l >= lo && l <= hi, "seed {seed}: {l} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn random_million_pairs_within_five_sigma() {
        // C(1415, 2) = 1_000_405 pairs.
        let n = 1415;
        let pairs = (n * (n - 1) / 2) as f64;
        let (lo, hi) = binomial_bound(pairs, 0.003, 5.0);
        let l = generate_random_directed(n, 0.003, 11).unwrap().link_count() as f64;
        assert!(l >= lo && l <= hi);
    }

    #[test]
    fn random_directions_are_balanced() {
        let net = generate_random_directed(2000, 0.005, 5).unwrap();
        let forward = net.links().filter(|(s, c)| s < c).count() as f64;
        let (lo, hi) = binomial_bound(net.link_count() as f64, 0.5, 4.0);
        assert!(forward >= lo && forward <= hi);
    }

    #[test]
    fn random_rejects_bad_parameters() {
        assert!(generate_random_directed(10, -0.1, 0).is_err());
        assert!(generate_random_directed(10, 1.5, 0).is_err());
        assert!(generate_random_directed(1, 0.5, 0).is_err());
    }

    #[test]
    fn scale_free_seed_clique() {
        let net = generate_scale_free(4, 3, 9).unwrap();
        assert_eq!(net.link_count(), 6);
        for f in net.firms() {
            assert_eq!(net.degree(f, Degree::Total), 3);
        }
    }

    #[test]
    fn scale_free_tree_when_m_is_one() {
        let net = generate_scale_free(10, 1, 4).unwrap();
        // One seed link plus one link per each of the 8 grown firms.
        assert_eq!(net.link_count(), 9);
        let mut seen = [false; 10];
        let mut stack = vec![FirmId(0)];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for &g in net.suppliers_of(f).iter().chain(net.clients_of(f)) {
                if !seen[g.index()] {
                    seen[g.index()] = true;
                    stack.push(g);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn scale_free_link_count() {
        let (n, m) = (500, 4);
        let net = generate_scale_free(n, m, 1).unwrap();
        assert_eq!(net.link_count(), m * (m + 1) / 2 + (n - m - 1) * m);
    }

    #[test]
    fn scale_free_rejects_small_n() {
        assert!(generate_scale_free(3, 3, 0).is_err());
        assert!(generate_scale_free(5, 0, 0).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let a = generate_scale_free(300, 2, 17).unwrap();
        let b = generate_scale_free(300, 2, 17).unwrap();
        assert_eq!(a, b);
        let c = generate_random_directed(300, 0.02, 17).unwrap();
        let d = generate_random_directed(300, 0.02, 17).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn single_weight_labels_everyone() {
        let net = generate_random_directed(50, 0.1, 1).unwrap();
        let net = assign_industries(net, &[("X".into(), 1.0)], 2).unwrap();
        assert!(net.firms().all(|f| net.industry_code(f) == "X"));
    }

    #[test]
    fn equal_weights_give_binomial_counts() {
        let n = 100_000;
        let net = FirmNetwork::from_links(n, &[]).unwrap();
        let net = assign_industries(net, &uniform_weights(19), 8).unwrap();
        let (lo, hi) = binomial_bound(n as f64, 1.0 / 19.0, 4.0);
        for id in net.taxonomy().ids() {
            let k = net.firms_in(id).len() as f64;
            assert!(k >= lo && k <= hi, "{}: {k}", net.taxonomy().code(id));
        }
    }

    #[test]
    fn weights_are_validated() {
        let net = || FirmNetwork::from_links(3, &[]).unwrap();
        assert!(assign_industries(net(), &[], 0).is_err());
        assert!(assign_industries(net(), &[("A".into(), 0.5)], 0).is_err());
        assert!(assign_industries(net(), &[("A".into(), 1.5), ("B".into(), -0.5)], 0).is_err());
    }
}
