//! Per-firm material balance checks over long simulated runs.

use avalanche_core::simulation::Replica;
use avalanche_core::{FirmNetwork, SimulationConfig};

#[derive(Debug, Default)]
pub struct ConservationReport {
    pub events: u64,
    pub firm_steps: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

/// Runs `events` uniformly sourced events from empty inventories and checks
/// every firm step of every event.
pub fn check_conservation(net: &FirmNetwork, events: u64, seed: u64) -> ConservationReport {
    let mut config = SimulationConfig::new(events, seed);
    config.warmup_events = Some(0);
    let mut replica = Replica::new(net, &config, 0).expect("valid config");
    let mut report = ConservationReport::default();
    let links = net.link_count();
    for event in 0..events {
        let record = replica.step();
        let mut problems = Vec::new();
        let mut total = 0u64;
        for step in &record.steps {
            total += step.produced;
            let (z, s, y) = (step.inventory_before as u64, step.received, step.produced);
            let after = step.inventory_after as u64;
            let n_i = net.supplier_count(step.firm) as u64;
            let n = step.available_suppliers as u64;
            if s == 0 {
                problems.push(format!("firm {} involved without an order", step.firm.0));
            }
            if z + y < s || after != z + y - s {
                problems.push(format!(
                    "firm {}: z'={after} but z={z}, y={y}, s={s}",
                    step.firm.0
                ));
            }
            if after > n_i {
                problems.push(format!(
                    "firm {}: z'={after} exceeds n_i={n_i}",
                    step.firm.0
                ));
            }
            if n >= 1 {
                let a = step.batches;
                let minimal = z + a * n >= s && (a == 0 || z + (a - 1) * n < s);
                if y != a * n || !minimal {
                    problems.push(format!(
                        "firm {}: a={a}, n={n}, z={z}, s={s}, y={y}",
                        step.firm.0
                    ));
                }
                if a >= 1 && after >= n {
                    problems.push(format!(
                        "firm {}: z'={after} not below n_avail={n}",
                        step.firm.0
                    ));
                }
            } else if y != s.saturating_sub(z) {
                problems.push(format!("primary firm {}: y={y}, z={z}, s={s}", step.firm.0));
            }
        }
        report.firm_steps += record.steps.len() as u64;
        if total != record.total_size {
            problems.push(format!(
                "Y={} but productions sum to {total}",
                record.total_size
            ));
        }
        if record.steps.len() > links + 1 {
            problems.push(format!(
                "{} firm steps on {links} links",
                record.steps.len()
            ));
        }
        let served = record.steps.first().map(|s| s.inventory_before >= 1);
        if served != Some(record.total_size == 0) {
            problems.push("Y = 0 does not match the source serving from stock".to_string());
        }
        if !problems.is_empty() {
            report.violations += problems.len() as u64;
            report
                .first_violation
                .get_or_insert_with(|| format!("event {event}: {}", problems.join("; ")));
        }
        report.events += 1;
    }
    if !replica.state().within_bounds(net) {
        report.violations += 1;
        report
            .first_violation
            .get_or_insert_with(|| "final inventories out of bounds".to_string());
    }
    report
}
