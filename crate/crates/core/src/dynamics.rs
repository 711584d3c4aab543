//! One avalanche of orders and production.
//!
//! External demand of one unit arrives at a source firm. A firm that cannot
//! serve its received orders `s` from inventory `z` produces in batches: with
//! `n` available suppliers it places `a = ceil((s - z) / n)` orders with each
//! of them and produces `y = a * n` units (one unit of material per unit of
//! product). Its inventory becomes `z + y - s`.
//!
//! Orders travel upstream in waves. All orders a firm receives in one wave
//! are summed before it acts, and a firm acts at most once per avalanche:
//! once it has received an order it is ignored as a supplier for the rest of
//! the avalanche. A firm left with no available suppliers acts as a primary
//! producer and makes exactly its deficit `max(0, s - z)`.

use serde::{Deserialize, Serialize};

use crate::network::{FirmId, FirmNetwork};

/// Orders placed with each available supplier.
#[inline]
pub fn required_batches(inventory: u64, received: u64, available_suppliers: u64) -> u64 {
    debug_assert!(available_suppliers >= 1);
    if received <= inventory {
        0
    } else {
        (received - inventory).div_ceil(available_suppliers)
    }
}

/// Units produced by a firm with at least one available supplier.
#[inline]
pub fn production_amount(inventory: u64, received: u64, available_suppliers: u64) -> u64 {
    required_batches(inventory, received, available_suppliers) * available_suppliers
}

/// Per-firm inventories, persisted across demand events.
///
/// Invariant: `z[i] <= n_i`, and firms without suppliers hold nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventoryState {
    levels: Vec<u32>,
}

impl InventoryState {
    pub fn zeros(firm_count: usize) -> Self {
        Self {
            levels: vec![0; firm_count],
        }
    }

    /// Fails if a level exceeds the firm's supplier count.
    pub fn from_levels(net: &FirmNetwork, levels: Vec<u32>) -> Result<Self, String> {
        if levels.len() != net.firm_count() {
            return Err(format!(
                "{} inventory levels for {} firms",
                levels.len(),
                net.firm_count()
            ));
        }
        for f in net.firms() {
            let n = net.supplier_count(f);
            if levels[f.index()] as usize > n {
                return Err(format!(
                    "firm {} holds {} units but has {n} suppliers",
                    net.label(f),
                    levels[f.index()]
                ));
            }
        }
        Ok(Self { levels })
    }

    #[inline]
    pub fn get(&self, firm: FirmId) -> u32 {
        self.levels[firm.index()]
    }

    #[inline]
    pub(crate) fn set(&mut self, firm: FirmId, level: u32) {
        self.levels[firm.index()] = level;
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Checks `0 <= z_i <= n_i` and `z_i = 0` for supplier-less firms.
    pub fn within_bounds(&self, net: &FirmNetwork) -> bool {
        net.firms()
            .all(|f| self.get(f) as usize <= net.supplier_count(f))
    }
}

/// What one firm did during an avalanche.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirmStep {
    pub firm: FirmId,
    /// Orders received, summed over the wave (`s_i`).
    pub received: u64,
    pub inventory_before: u32,
    pub inventory_after: u32,
    /// Suppliers not yet involved when the firm acted. Zero means the firm
    /// produced as a primary producer.
    pub available_suppliers: u32,
    /// Orders placed with each available supplier (`a_i`).
    pub batches: u64,
    /// Units produced (`y_i`).
    pub produced: u64,
}

impl FirmStep {
    pub fn is_primary(&self) -> bool {
        self.available_suppliers == 0
    }
}

/// Outcome of one external demand event.
///
/// `steps` lists every involved firm once, in wave order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvalancheRecord {
    pub source: Option<FirmId>,
    pub total_size: u64,
    pub steps: Vec<FirmStep>,
    pub waves: u32,
}

impl AvalancheRecord {
    pub fn involved(&self) -> impl Iterator<Item = FirmId> + '_ {
        self.steps.iter().map(|s| s.firm)
    }

    /// Firms with positive production and their output.
    pub fn productions(&self) -> impl Iterator<Item = (FirmId, u64)> + '_ {
        self.steps
            .iter()
            .filter(|s| s.produced > 0)
            .map(|s| (s.firm, s.produced))
    }

    fn clear(&mut self) {
        self.source = None;
        self.total_size = 0;
        self.steps.clear();
        self.waves = 0;
    }
}

/// Reusable per-replica working memory.
///
/// Visited state is an epoch stamp per firm, so starting a new avalanche is
/// O(1) instead of clearing per-firm arrays.
#[derive(Debug, Clone)]
pub struct PropagationScratch {
    epoch: u32,
    involved: Vec<u32>,
    queued: Vec<u32>,
    orders: Vec<u64>,
    wave: Vec<FirmId>,
    next: Vec<FirmId>,
}

impl PropagationScratch {
    pub fn new(firm_count: usize) -> Self {
        Self {
            epoch: 0,
            involved: vec![0; firm_count],
            queued: vec![0; firm_count],
            orders: vec![0; firm_count],
            wave: Vec::new(),
            next: Vec::new(),
        }
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    fn advance(&mut self) {
        if self.epoch == u32::MAX {
            self.involved.fill(0);
            self.queued.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    #[inline]
    fn is_involved(&self, firm: FirmId) -> bool {
        self.involved[firm.index()] == self.epoch
    }

    #[inline]
    fn enqueue(&mut self, firm: FirmId, quantity: u64) {
        let i = firm.index();
        if self.queued[i] != self.epoch {
            self.queued[i] = self.epoch;
            self.orders[i] = 0;
            self.next.push(firm);
        }
        self.orders[i] += quantity;
    }
}

/// Runs one avalanche started by a unit of demand at `source`.
pub fn propagate_avalanche(
    net: &FirmNetwork,
    state: &mut InventoryState,
    source: FirmId,
    scratch: &mut PropagationScratch,
) -> AvalancheRecord {
    let mut record = AvalancheRecord::default();
    propagate_avalanche_into(net, state, source, scratch, &mut record);
    record
}

/// Like [`propagate_avalanche`] but reuses `record`'s allocation.
pub fn propagate_avalanche_into(
    net: &FirmNetwork,
    state: &mut InventoryState,
    source: FirmId,
    scratch: &mut PropagationScratch,
    record: &mut AvalancheRecord,
) {
    debug_assert_eq!(scratch.involved.len(), net.firm_count());
    record.clear();
    record.source = Some(source);
    scratch.advance();
    let epoch = scratch.epoch;

    scratch.enqueue(source, 1);
    while !scratch.next.is_empty() {
        std::mem::swap(&mut scratch.wave, &mut scratch.next);
        for &f in &scratch.wave {
            scratch.involved[f.index()] = epoch;
        }
        record.waves += 1;

        let wave = std::mem::take(&mut scratch.wave);
        for &firm in &wave {
            let received = scratch.orders[firm.index()];
            let before = state.get(firm);
            let z = before as u64;
            let suppliers = net.suppliers_of(firm);
            let available = suppliers
                .iter()
                .filter(|&&g| !scratch.is_involved(g))
                .count() as u64;

            let (batches, produced, after) = if available > 0 {
                let a = required_batches(z, received, available);
                let y = a * available;
                if a > 0 {
                    for &g in suppliers {
                        if !scratch.is_involved(g) {
                            scratch.enqueue(g, a);
                        }
                    }
                }
                (a, y, z + y - received)
            } else {
                let y = received.saturating_sub(z);
                (0, y, z + y - received)
            };

            let after = after as u32;
            state.set(firm, after);
            record.total_size += produced;
            record.steps.push(FirmStep {
                firm,
                received,
                inventory_before: before,
                inventory_after: after,
                available_suppliers: available as u32,
                batches,
                produced,
            });
        }
        scratch.wave = wave;
        scratch.wave.clear();
    }
}
