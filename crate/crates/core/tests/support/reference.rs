//! Straightforward cascade used as a test oracle: explicit per-wave maps and
//! sets, fresh allocations every call, no shared scratch state.

use std::collections::{BTreeMap, BTreeSet};

pub struct ReferenceOutcome {
    pub total: u64,
    pub productions: BTreeMap<u32, u64>,
    pub involved: BTreeSet<u32>,
    pub levels: Vec<u32>,
}

/// `suppliers[i]` lists the suppliers of firm `i`.
pub fn reference_avalanche(
    suppliers: &[Vec<u32>],
    levels: &[u32],
    source: u32,
) -> ReferenceOutcome {
    let mut levels = levels.to_vec();
    let mut involved = BTreeSet::new();
    let mut productions = BTreeMap::new();
    let mut wave: BTreeMap<u32, u64> = BTreeMap::from([(source, 1)]);
    while !wave.is_empty() {
        involved.extend(wave.keys().copied());
        let mut next: BTreeMap<u32, u64> = BTreeMap::new();
        for (&firm, &s) in &wave {
            let z = levels[firm as usize] as u64;
            let open: Vec<u32> = suppliers[firm as usize]
                .iter()
                .copied()
                .filter(|g| !involved.contains(g))
                .collect();
            let y = if open.is_empty() {
                s.saturating_sub(z)
            } else {
                let n = open.len() as u64;
                let mut a = 0;
                while z + a * n < s {
                    a += 1;
                }
                for g in open {
                    if a > 0 {
                        *next.entry(g).or_insert(0) += a;
                    }
                }
                a * n
            };
            levels[firm as usize] = (z + y - s) as u32;
            if y > 0 {
                productions.insert(firm, y);
            }
        }
        wave = next;
    }
    ReferenceOutcome {
        total: productions.values().sum(),
        productions,
        involved,
        levels,
    }
}

use avalanche_core::{
    propagate_avalanche, FirmId, FirmNetwork, InventoryState, PropagationScratch,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Builds a random network of at most 10 firms with random inventories and
/// compares a run of consecutive events against the reference.
/// Returns the number of events compared.
pub fn compare_on_random_network(seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=10u32);
    let p: f64 = rng.random_range(0.05..0.7);
    let mut links = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                links.push((i, j));
            }
        }
    }
    let net = FirmNetwork::from_links(n as usize, &links).map_err(|e| e.to_string())?;
    let suppliers: Vec<Vec<u32>> = net
        .firms()
        .map(|f| net.suppliers_of(f).iter().map(|g| g.0).collect())
        .collect();
    let levels: Vec<u32> = suppliers
        .iter()
        .map(|s| rng.random_range(0..=s.len() as u32))
        .collect();
    let mut state = InventoryState::from_levels(&net, levels.clone())?;
    let mut expected_levels = levels;
    let mut scratch = PropagationScratch::new(net.firm_count());
    let events = rng.random_range(1..=6usize);
    for event in 0..events {
        let source = rng.random_range(0..n);
        let want = reference_avalanche(&suppliers, &expected_levels, source);
        let got = propagate_avalanche(&net, &mut state, FirmId(source), &mut scratch);
        let got_productions: BTreeMap<u32, u64> =
            got.productions().map(|(f, y)| (f.0, y)).collect();
        let got_involved: BTreeSet<u32> = got.involved().map(|f| f.0).collect();
        let context = || format!("seed {seed}, event {event}, links {links:?}, source {source}");
        if got.total_size != want.total {
            return Err(format!(
                "{}: Y {} vs {}",
                context(),
                got.total_size,
                want.total
            ));
        }
        if got_productions != want.productions {
            return Err(format!(
                "{}: productions {got_productions:?} vs {:?}",
                context(),
                want.productions
            ));
        }
        if got_involved != want.involved {
            return Err(format!(
                "{}: involved {got_involved:?} vs {:?}",
                context(),
                want.involved
            ));
        }
        if state.levels() != want.levels.as_slice() {
            return Err(format!(
                "{}: inventories {:?} vs {:?}",
                context(),
                state.levels(),
                want.levels
            ));
        }
        expected_levels = want.levels;
    }
    Ok(events)
}
