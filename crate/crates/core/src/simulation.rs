//! Repeated demand events on a firm network.
//!
//! Each event picks a source firm uniformly from a pool (all firms, one
//! industry, or an explicit list), delivers one unit of demand, and records
//! the resulting avalanche. Inventories persist from event to event.
//!
//! Randomness comes from ChaCha8 (`rand_chacha` 0.9) seeded with the
//! configured 64-bit seed; replica `r` uses stream `r` of that key, so
//! replicas are independent and each is reproducible from `(seed, r)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    propagate_avalanche_into, AvalancheRecord, InventoryState, PropagationScratch,
};
use crate::network::{FirmId, FirmNetwork};

pub const SCHEMA_VERSION: u32 = 1;
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9, rand 0.9); replica r uses stream r";

/// Sizes up to this bound are counted exactly; larger ones go to log bins.
pub const EXACT_SIZE_LIMIT: u64 = 1_000_000;
pub const LOG_BINS_PER_OCTAVE: u32 = 16;

#[derive(Debug, Error, PartialEq)]
pub enum SimulationError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("source pool is empty: {0}")]
    EmptySourcePool(String),
}

fn config_err(msg: impl Into<String>) -> SimulationError {
    SimulationError::Config(msg.into())
}

/// Where each event's unit of demand lands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SourceMode {
    AllFirms,
    Industry(String),
    /// External firm labels.
    Firms(Vec<String>),
}

impl fmt::Display for SourceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceMode::AllFirms => write!(f, "all"),
            SourceMode::Industry(code) => write!(f, "industry:{code}"),
            SourceMode::Firms(ids) => write!(f, "firms:{}", ids.join(",")),
        }
    }
}

impl FromStr for SourceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(SourceMode::AllFirms);
        }
        if let Some(code) = s.strip_prefix("industry:") {
            if code.is_empty() {
                return Err("empty industry code".into());
            }
            return Ok(SourceMode::Industry(code.to_string()));
        }
        if let Some(list) = s.strip_prefix("firms:") {
            let ids: Vec<String> = list
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect();
            return Ok(SourceMode::Firms(ids));
        }
        Err(format!(
            "unknown source '{s}' (all, industry:CODE, firms:ID,ID,...)"
        ))
    }
}

impl From<SourceMode> for String {
    fn from(m: SourceMode) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for SourceMode {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InventoryInit {
    #[default]
    Zeros,
    /// `z_i` uniform on `0..=n_i`.
    Uniform,
}

impl FromStr for InventoryInit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zeros" => Ok(Self::Zeros),
            "uniform" => Ok(Self::Uniform),
            _ => Err(format!("unknown inventory init '{s}' (zeros, uniform)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RecordMode {
    /// Keep `(source, size)` for every event as well as the aggregates.
    FullRecords,
    #[default]
    AggregatesOnly,
}

impl FromStr for RecordMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" | "full-records" => Ok(Self::FullRecords),
            "aggregates" | "aggregates-only" => Ok(Self::AggregatesOnly),
            _ => Err(format!("unknown record mode '{s}' (full, aggregates)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Recorded events, split across replicas.
    pub events: u64,
    /// Discarded events run by each replica before recording. `None` means
    /// ten times the firm count.
    pub warmup_events: Option<u64>,
    pub source: SourceMode,
    pub inventory_init: InventoryInit,
    pub seed: u64,
    pub replicas: u32,
    pub record_mode: RecordMode,
    /// Restore every firm's initial inventory after each event.
    #[serde(default)]
    pub reset_per_event: bool,
}

impl SimulationConfig {
    pub fn new(events: u64, seed: u64) -> Self {
        Self {
            events,
            warmup_events: None,
            source: SourceMode::AllFirms,
            inventory_init: InventoryInit::Zeros,
            seed,
            replicas: 1,
            record_mode: RecordMode::AggregatesOnly,
            reset_per_event: false,
        }
    }

    pub fn warmup_for(&self, net: &FirmNetwork) -> u64 {
        self.warmup_events.unwrap_or(10 * net.firm_count() as u64)
    }

    /// Builds a config from `key = value` entries. `events` and `seed` are
    /// required; unknown keys are rejected.
    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<Self, SimulationError> {
        fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, SimulationError>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>()
                .map_err(|e| config_err(format!("{key} = {v}: {e}")))
        }
        let required = |key: &str| {
            map.get(key)
                .ok_or_else(|| config_err(format!("missing required key '{key}'")))
        };
        let mut cfg = SimulationConfig::new(
            parse("events", required("events")?)?,
            parse("seed", required("seed")?)?,
        );
        for (key, v) in map {
            match key.as_str() {
                "events" | "seed" => {}
                "warmup" | "warmup_events" => {
                    cfg.warmup_events = if v == "auto" {
                        None
                    } else {
                        Some(parse(key, v)?)
                    }
                }
                "source" => cfg.source = parse(key, v)?,
                "init" | "inventory_init" => cfg.inventory_init = parse(key, v)?,
                "replicas" => cfg.replicas = parse(key, v)?,
                "record" | "record_mode" => cfg.record_mode = parse(key, v)?,
                "reset_per_event" => cfg.reset_per_event = parse(key, v)?,
                other => return Err(config_err(format!("unknown key '{other}'"))),
            }
        }
        cfg.validate_shape()?;
        Ok(cfg)
    }

    fn validate_shape(&self) -> Result<(), SimulationError> {
        if self.events < 1 {
            return Err(config_err("events must be at least 1"));
        }
        if self.replicas < 1 {
            return Err(config_err("replicas must be at least 1"));
        }
        if self.replicas as u64 > self.events {
            return Err(config_err("more replicas than events"));
        }
        Ok(())
    }

    fn source_pool(&self, net: &FirmNetwork) -> Result<SourcePool, SimulationError> {
        match &self.source {
            SourceMode::AllFirms => Ok(SourcePool::All(net.firm_count() as u32)),
            SourceMode::Industry(code) => {
                let id = net.taxonomy().id_of(code).ok_or_else(|| {
                    config_err(format!("industry '{code}' not in the network's taxonomy"))
                })?;
                let firms = net.firms_in(id);
                if firms.is_empty() {
                    return Err(SimulationError::EmptySourcePool(format!(
                        "industry '{code}' has no firms"
                    )));
                }
                Ok(SourcePool::List(firms))
            }
            SourceMode::Firms(labels) => {
                if labels.is_empty() {
                    return Err(SimulationError::EmptySourcePool("empty firm list".into()));
                }
                let firms = labels
                    .iter()
                    .map(|l| {
                        net.firm_by_label(l)
                            .ok_or_else(|| config_err(format!("unknown firm '{l}'")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(SourcePool::List(firms))
            }
        }
    }

    fn replica_events(&self, replica: u32) -> u64 {
        let r = self.replicas as u64;
        self.events / r + u64::from((replica as u64) < self.events % r)
    }
}

enum SourcePool {
    All(u32),
    List(Vec<FirmId>),
}

impl SourcePool {
    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> FirmId {
        match self {
            SourcePool::All(n) => FirmId(rng.random_range(0..*n)),
            SourcePool::List(firms) => firms[rng.random_range(0..firms.len())],
        }
    }
}

fn replica_rng(seed: u64, replica: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica as u64);
    rng
}

/// Initial inventories drawn from stream 0 of `seed`.
pub fn init_inventories(net: &FirmNetwork, mode: InventoryInit, seed: u64) -> InventoryState {
    init_inventories_with(net, mode, &mut replica_rng(seed, 0))
}

fn init_inventories_with(
    net: &FirmNetwork,
    mode: InventoryInit,
    rng: &mut ChaCha8Rng,
) -> InventoryState {
    match mode {
        InventoryInit::Zeros => InventoryState::zeros(net.firm_count()),
        InventoryInit::Uniform => {
            let levels = net
                .firms()
                .map(|f| {
                    let n = net.supplier_count(f) as u32;
                    if n == 0 {
                        0
                    } else {
                        rng.random_range(0..=n)
                    }
                })
                .collect();
            InventoryState::from_levels(net, levels).expect("levels drawn within bounds")
        }
    }
}

/// Histogram of avalanche sizes: exact counts up to [`EXACT_SIZE_LIMIT`],
/// geometric bins ([`LOG_BINS_PER_OCTAVE`] per doubling) above it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "HistogramRepr", try_from = "HistogramRepr")]
pub struct SizeHistogram {
    exact: Vec<u64>,
    overflow: BTreeMap<u32, u64>,
}

impl SizeHistogram {
    #[inline]
    pub fn add(&mut self, size: u64) {
        self.add_count(size, 1);
    }

    fn add_count(&mut self, size: u64, count: u64) {
        if size <= EXACT_SIZE_LIMIT {
            let i = size as usize;
            if i >= self.exact.len() {
                self.exact.resize(i + 1, 0);
            }
            self.exact[i] += count;
        } else {
            *self.overflow.entry(log_bin(size)).or_insert(0) += count;
        }
    }

    pub fn merge(&mut self, other: &SizeHistogram) {
        if other.exact.len() > self.exact.len() {
            self.exact.resize(other.exact.len(), 0);
        }
        for (a, b) in self.exact.iter_mut().zip(&other.exact) {
            *a += b;
        }
        for (&bin, &c) in &other.overflow {
            *self.overflow.entry(bin).or_insert(0) += c;
        }
    }

    pub fn total(&self) -> u64 {
        self.exact.iter().sum::<u64>() + self.overflow.values().sum::<u64>()
    }

    pub fn count_of(&self, size: u64) -> u64 {
        if size <= EXACT_SIZE_LIMIT {
            self.exact.get(size as usize).copied().unwrap_or(0)
        } else {
            0
        }
    }

    /// `(size, count)` ascending. Log-binned sizes are reported at the bin's
    /// lower edge.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.exact
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(s, &c)| (s as u64, c))
            .chain(self.overflow.iter().map(|(&b, &c)| (bin_bounds(b).0, c)))
    }

    pub fn has_log_bins(&self) -> bool {
        !self.overflow.is_empty()
    }
}

fn log_bin(size: u64) -> u32 {
    debug_assert!(size > EXACT_SIZE_LIMIT);
    let b = ((size as f64 / EXACT_SIZE_LIMIT as f64).log2() * LOG_BINS_PER_OCTAVE as f64).floor();
    let mut bin = b as u32;
    // Guard against rounding at bin edges.
    while bin > 0 && bin_bounds(bin).0 > size {
        bin -= 1;
    }
    while bin_bounds(bin).1 <= size {
        bin += 1;
    }
    bin
}

/// Half-open `[lo, hi)` size range of a log bin.
fn bin_bounds(bin: u32) -> (u64, u64) {
    let edge = |b: u32| {
        let e = (EXACT_SIZE_LIMIT as f64 * 2f64.powf(b as f64 / LOG_BINS_PER_OCTAVE as f64)).ceil()
            as u64;
        e.max(EXACT_SIZE_LIMIT + 1)
    };
    let lo = if bin == 0 {
        EXACT_SIZE_LIMIT + 1
    } else {
        edge(bin)
    };
    (lo, edge(bin + 1).max(lo + 1))
}

#[derive(Serialize, Deserialize)]
struct HistogramRepr {
    /// `[size, count]` for every observed size up to the exact limit.
    exact: Vec<(u64, u64)>,
    /// `[lo, hi, count]` with `lo <= size < hi`.
    log_bins: Vec<(u64, u64, u64)>,
}

impl From<SizeHistogram> for HistogramRepr {
    fn from(h: SizeHistogram) -> Self {
        HistogramRepr {
            exact: h
                .exact
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(s, &c)| (s as u64, c))
                .collect(),
            log_bins: h
                .overflow
                .iter()
                .map(|(&b, &c)| {
                    let (lo, hi) = bin_bounds(b);
                    (lo, hi, c)
                })
                .collect(),
        }
    }
}

impl TryFrom<HistogramRepr> for SizeHistogram {
    type Error = String;

    fn try_from(r: HistogramRepr) -> Result<Self, Self::Error> {
        let mut h = SizeHistogram::default();
        for (s, c) in r.exact {
            if s > EXACT_SIZE_LIMIT {
                return Err(format!("exact size {s} above limit {EXACT_SIZE_LIMIT}"));
            }
            h.add_count(s, c);
        }
        for (lo, hi, c) in r.log_bins {
            let bin = log_bin(lo.max(EXACT_SIZE_LIMIT + 1));
            if bin_bounds(bin) != (lo, hi) {
                return Err(format!("log bin [{lo}, {hi}) does not match the binning"));
            }
            *h.overflow.entry(bin).or_insert(0) += c;
        }
        Ok(h)
    }
}

/// Exact integer moments of avalanche sizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeMoments {
    pub count: u64,
    pub zero_count: u64,
    pub sum: u128,
    pub sum_sq: u128,
    pub max: u64,
}

impl SizeMoments {
    #[inline]
    pub fn add(&mut self, size: u64) {
        self.count += 1;
        self.zero_count += u64::from(size == 0);
        self.sum += size as u128;
        self.sum_sq += (size as u128) * (size as u128);
        self.max = self.max.max(size);
    }

    pub fn merge(&mut self, other: &SizeMoments) {
        self.count += other.count;
        self.zero_count += other.zero_count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.max = self.max.max(other.max);
    }

    /// Moments with zero-size events dropped.
    pub fn without_zeros(&self) -> SizeMoments {
        SizeMoments {
            count: self.count - self.zero_count,
            zero_count: 0,
            ..*self
        }
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.sum as f64 / self.count as f64
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        let n = self.count as u128;
        // n * sum_sq - sum^2 >= 0 by Cauchy-Schwarz, computed exactly.
        let numer = n * self.sum_sq - self.sum * self.sum;
        (numer as f64).sqrt() / self.count as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub source: FirmId,
    pub size: u64,
}

/// Mergeable per-replica accumulators.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Aggregate {
    pub histogram: SizeHistogram,
    pub moments: SizeMoments,
    pub firm_involvement: Vec<u64>,
    pub records: Option<Vec<EventRecord>>,
}

impl Aggregate {
    pub fn new(firm_count: usize, record_mode: RecordMode) -> Self {
        Self {
            histogram: SizeHistogram::default(),
            moments: SizeMoments::default(),
            firm_involvement: vec![0; firm_count],
            records: match record_mode {
                RecordMode::FullRecords => Some(Vec::new()),
                RecordMode::AggregatesOnly => None,
            },
        }
    }

    pub fn record(&mut self, avalanche: &AvalancheRecord) {
        let size = avalanche.total_size;
        self.histogram.add(size);
        self.moments.add(size);
        for f in avalanche.involved() {
            self.firm_involvement[f.index()] += 1;
        }
        if let (Some(records), Some(source)) = (&mut self.records, avalanche.source) {
            records.push(EventRecord { source, size });
        }
    }

    /// Adds `other`'s counts; event records are appended after `self`'s.
    pub fn merge(&mut self, other: &Aggregate) {
        self.histogram.merge(&other.histogram);
        self.moments.merge(&other.moments);
        if self.firm_involvement.len() < other.firm_involvement.len() {
            self.firm_involvement
                .resize(other.firm_involvement.len(), 0);
        }
        for (a, b) in self
            .firm_involvement
            .iter_mut()
            .zip(&other.firm_involvement)
        {
            *a += b;
        }
        match (&mut self.records, &other.records) {
            (Some(mine), Some(theirs)) => mine.extend_from_slice(theirs),
            (None, Some(theirs)) => self.records = Some(theirs.clone()),
            _ => {}
        }
    }
}

/// One independent history: its own inventories, scratch and RNG stream.
pub struct Replica<'a> {
    net: &'a FirmNetwork,
    state: InventoryState,
    initial: Option<InventoryState>,
    scratch: PropagationScratch,
    rng: ChaCha8Rng,
    pool: SourcePool,
    record: AvalancheRecord,
}

impl<'a> Replica<'a> {
    pub fn new(
        net: &'a FirmNetwork,
        config: &SimulationConfig,
        index: u32,
    ) -> Result<Self, SimulationError> {
        let pool = config.source_pool(net)?;
        let mut rng = replica_rng(config.seed, index);
        let state = init_inventories_with(net, config.inventory_init, &mut rng);
        Ok(Self {
            net,
            initial: config.reset_per_event.then(|| state.clone()),
            state,
            scratch: PropagationScratch::new(net.firm_count()),
            rng,
            pool,
            record: AvalancheRecord::default(),
        })
    }

    /// Runs one demand event and returns its avalanche.
    pub fn step(&mut self) -> &AvalancheRecord {
        let source = self.pool.draw(&mut self.rng);
        propagate_avalanche_into(
            self.net,
            &mut self.state,
            source,
            &mut self.scratch,
            &mut self.record,
        );
        if let Some(initial) = &self.initial {
            for f in self.record.involved() {
                self.state.set(f, initial.get(f));
            }
        }
        &self.record
    }

    pub fn state(&self) -> &InventoryState {
        &self.state
    }

    pub fn run(&mut self, warmup: u64, events: u64, record_mode: RecordMode) -> Aggregate {
        for _ in 0..warmup {
            self.step();
        }
        let mut agg = Aggregate::new(self.net.firm_count(), record_mode);
        for _ in 0..events {
            self.step();
            agg.record(&self.record);
        }
        agg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool: String,
    pub rng: String,
    pub firm_count: usize,
    pub link_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaSummary {
    pub replica: u32,
    pub events: u64,
    pub mean: f64,
    pub std: f64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndustryInvolvement {
    pub industry: String,
    pub firms: u64,
    pub involved: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub metadata: RunMetadata,
    /// Config with warm-up resolved.
    pub config: SimulationConfig,
    pub events: u64,
    pub histogram: SizeHistogram,
    pub moments: SizeMoments,
    /// Involvement count per firm, indexed by dense firm id.
    pub firm_involvement: Vec<u64>,
    pub industry_involvement: Vec<IndustryInvolvement>,
    pub replicas: Vec<ReplicaSummary>,
    /// Population variance of replica means.
    pub replica_mean_variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<EventRecord>>,
    /// Caller-supplied provenance, such as input file paths.
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
}

impl RunSummary {
    /// The source industry code when the run drew sources from one industry.
    pub fn source_industry(&self) -> Option<&str> {
        match &self.config.source {
            SourceMode::Industry(code) => Some(code),
            _ => None,
        }
    }

    pub fn sizes(&self) -> Option<Vec<u64>> {
        self.records
            .as_ref()
            .map(|r| r.iter().map(|e| e.size).collect())
    }
}

/// Runs `config.replicas` independent replicas and merges them in index order.
pub fn run_experiment(
    net: &FirmNetwork,
    config: &SimulationConfig,
) -> Result<RunSummary, SimulationError> {
    config.validate_shape()?;
    let warmup = config.warmup_for(net);
    // Fail on a bad pool before spawning work.
    config.source_pool(net)?;

    let aggregates: Vec<Aggregate> = (0..config.replicas)
        .into_par_iter()
        .map(|r| {
            Replica::new(net, config, r)
                .map(|mut rep| rep.run(warmup, config.replica_events(r), config.record_mode))
        })
        .collect::<Result<_, _>>()?;

    let replicas: Vec<ReplicaSummary> = aggregates
        .iter()
        .enumerate()
        .map(|(r, a)| ReplicaSummary {
            replica: r as u32,
            events: a.moments.count,
            mean: a.moments.mean(),
            std: a.moments.std(),
            max: a.moments.max,
        })
        .collect();
    let replica_mean_variance = {
        let k = replicas.len() as f64;
        let m = replicas.iter().map(|r| r.mean).sum::<f64>() / k;
        replicas.iter().map(|r| (r.mean - m).powi(2)).sum::<f64>() / k
    };

    let mut total = Aggregate::new(net.firm_count(), config.record_mode);
    for a in &aggregates {
        total.merge(a);
    }
    debug_assert_eq!(total.moments.count, config.events);

    let industry_involvement = industry_involvement(net, &total.firm_involvement);
    let mut echo = config.clone();
    echo.warmup_events = Some(warmup);
    Ok(RunSummary {
        schema_version: SCHEMA_VERSION,
        metadata: RunMetadata {
            tool: concat!("avalanche ", env!("CARGO_PKG_VERSION")).to_string(),
            rng: RNG_ALGORITHM.to_string(),
            firm_count: net.firm_count(),
            link_count: net.link_count(),
        },
        config: echo,
        events: total.moments.count,
        histogram: total.histogram,
        moments: total.moments,
        firm_involvement: total.firm_involvement,
        industry_involvement,
        replicas,
        replica_mean_variance,
        records: total.records,
        inputs: BTreeMap::new(),
    })
}

/// Summed involvement per industry, in taxonomy order.
pub fn industry_involvement(net: &FirmNetwork, firm_counts: &[u64]) -> Vec<IndustryInvolvement> {
    let tax = net.taxonomy();
    let mut firms = vec![0u64; tax.len()];
    let mut involved = vec![0u64; tax.len()];
    for f in net.firms() {
        let i = net.industry_of(f).index();
        firms[i] += 1;
        involved[i] += firm_counts[f.index()];
    }
    tax.ids()
        .map(|id| IndustryInvolvement {
            industry: tax.code(id).to_string(),
            firms: firms[id.index()],
            involved: involved[id.index()],
        })
        .collect()
}
