use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use avalanche_core::config::parse_key_values;
use avalanche_core::fmt::g17;
use avalanche_core::iotable::{
    compare_with_means, leontief_inverse, load_io_table, load_sector_map, multipliers,
};
use avalanche_core::network::{
    assign_industries, generate_random_directed, generate_scale_free, load_edge_list,
    uniform_weights, write_degree_ccdf, write_edge_list, write_labels, FirmNetwork,
};
use avalanche_core::simulation::{run_experiment, RunSummary, SimulationConfig, SourceMode};
use avalanche_core::stats::{
    ccdf_from_histogram, hill_mle_histogram, industry_summary, involvement_expectation,
    read_industry_stats, write_ccdf, write_industry_stats, write_involvement, ZeroSizes,
};

use crate::cli::{
    Analyze, Command, Compare, DegreeDist, GenRandom, GenSf, Leontief, NetOut, Simulate,
};

/// Bad invocation; reported with exit status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Industry labels must not reuse the generator's random stream.
const LABEL_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::GenRandom(c) => gen_random(c),
        Command::GenSf(c) => gen_sf(c),
        Command::DegreeDist(c) => degree_dist(c),
        Command::Simulate(c) => simulate(c),
        Command::Analyze(c) => analyze(c),
        Command::Leontief(c) => leontief(c),
        Command::Compare(c) => compare(c),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_with(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

fn load_net(net: &Path, labels: Option<&Path>) -> Result<FirmNetwork> {
    Ok(load_edge_list(net, labels)?)
}

fn gen_random(c: GenRandom) -> Result<()> {
    if !(0.0..=1.0).contains(&c.p) {
        return Err(usage(format!("--p {} outside [0, 1]", c.p)));
    }
    if c.nodes < 2 {
        return Err(usage("--nodes must be at least 2"));
    }
    let net = generate_random_directed(c.nodes, c.p, c.seed)?;
    let header = format!(
        "avalanche {} gen-random nodes={} p={} seed={}",
        env!("CARGO_PKG_VERSION"),
        c.nodes,
        g17(c.p),
        c.seed
    );
    write_network(net, &c.output, c.seed, &header)
}

fn gen_sf(c: GenSf) -> Result<()> {
    if c.m < 1 || c.nodes <= c.m {
        return Err(usage("need --nodes > --m >= 1"));
    }
    let net = generate_scale_free(c.nodes, c.m, c.seed)?;
    let header = format!(
        "avalanche {} gen-sf nodes={} m={} seed={}",
        env!("CARGO_PKG_VERSION"),
        c.nodes,
        c.m,
        c.seed
    );
    write_network(net, &c.output, c.seed, &header)
}

fn write_network(net: FirmNetwork, out: &NetOut, seed: u64, header: &str) -> Result<()> {
    let (net, header) = match &out.labels {
        Some(_) => {
            if out.industries < 1 {
                return Err(usage("--industries must be at least 1"));
            }
            let net = assign_industries(
                net,
                &uniform_weights(out.industries),
                seed.wrapping_add(LABEL_SEED_OFFSET),
            )?;
            (net, format!("{header} industries={}", out.industries))
        }
        None => (net, header.to_string()),
    };
    write_with(&out.out, |w| {
        writeln!(w, "# {header}")?;
        writeln!(w, "# firms={} links={}", net.firm_count(), net.link_count())?;
        write_edge_list(&net, w)
    })?;
    if let Some(labels) = &out.labels {
        write_with(labels, |w| {
            writeln!(w, "# {header}")?;
            write_labels(&net, w)
        })?;
    }
    Ok(())
}

fn degree_dist(c: DegreeDist) -> Result<()> {
    let net = load_net(&c.net, c.labels.as_deref())?;
    let points = net.degree_ccdf(c.kind);
    write_with(&c.out, |w| write_degree_ccdf(&points, w))
}

/// `run.json` -> `run.<suffix>`.
fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn simulate(c: Simulate) -> Result<()> {
    let mut map = match &c.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            parse_key_values(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => BTreeMap::new(),
    };
    let mut take_path = |key: &str, flag: &Option<PathBuf>| {
        let from_file = map.remove(key).map(PathBuf::from);
        flag.clone().or(from_file)
    };
    let net_path = take_path("net", &c.input.net)
        .ok_or_else(|| usage("simulate needs --net (or 'net' in --config)"))?;
    let labels_path = take_path("labels", &c.input.labels);
    let out = take_path("out", &c.out)
        .ok_or_else(|| usage("simulate needs --out (or 'out' in --config)"))?;

    let flags = [
        ("events", c.events.map(|v| v.to_string())),
        ("warmup", c.warmup.clone()),
        ("seed", c.seed.map(|v| v.to_string())),
        ("source", c.source.clone()),
        ("init", c.init.clone()),
        ("replicas", c.replicas.map(|v| v.to_string())),
        ("record", c.record.clone()),
        (
            "reset_per_event",
            c.reset_per_event.then(|| "true".to_string()),
        ),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            // A flag replaces the config entry under either spelling.
            if key == "warmup" {
                map.remove("warmup_events");
            }
            map.insert(key.to_string(), v);
        }
    }
    if !map.contains_key("seed") {
        return Err(usage(
            "simulate needs an explicit --seed (or 'seed' in --config)",
        ));
    }
    let config = SimulationConfig::from_key_values(&map).map_err(|e| usage(e.to_string()))?;

    let net = load_net(&net_path, labels_path.as_deref())?;
    let mut summary = run_experiment(&net, &config)?;
    summary
        .inputs
        .insert("net".into(), net_path.display().to_string());
    if let Some(l) = &labels_path {
        summary
            .inputs
            .insert("labels".into(), l.display().to_string());
    }

    write_with(&out, |w| {
        serde_json::to_writer_pretty(&mut *w, &summary)?;
        writeln!(w)
    })?;
    write_with(&sidecar(&out, "sizes.csv"), |w| {
        writeln!(w, "size,count")?;
        for (s, n) in summary.histogram.iter() {
            writeln!(w, "{s},{n}")?;
        }
        Ok(())
    })?;
    write_with(&sidecar(&out, "firms.csv"), |w| {
        writeln!(w, "firm_id,involved_count")?;
        for f in net.firms() {
            writeln!(
                w,
                "{},{}",
                net.label(f),
                summary.firm_involvement[f.index()]
            )?;
        }
        Ok(())
    })?;
    write_with(&sidecar(&out, "industries.csv"), |w| {
        writeln!(w, "industry,involved_count")?;
        for row in &summary.industry_involvement {
            writeln!(w, "{},{}", row.industry, row.involved)?;
        }
        Ok(())
    })?;
    println!(
        "events={} mean={} std={} max={}",
        summary.events,
        g17(summary.moments.mean()),
        g17(summary.moments.std()),
        summary.moments.max
    );
    Ok(())
}

#[derive(Serialize)]
struct RunAnalysis {
    run: String,
    source: String,
    events: u64,
    mean: f64,
    std: f64,
    max: u64,
    zero_fraction: f64,
    /// log10 of (largest / smallest) nonzero size.
    nonzero_decades: Option<f64>,
    xmin: f64,
    hill_alpha: Option<f64>,
    hill_error: Option<String>,
}

fn read_run(path: &Path) -> Result<RunSummary> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("{} is not a run summary", path.display()))
}

fn analyze(c: Analyze) -> Result<()> {
    if !c.xmin.is_finite() || c.xmin <= 0.0 {
        return Err(usage("--xmin must be a positive number"));
    }
    if c.labels.is_some() && c.net.is_none() {
        return Err(usage("--labels needs --net"));
    }
    fs::create_dir_all(&c.out_dir)
        .with_context(|| format!("cannot create {}", c.out_dir.display()))?;
    let net = c
        .net
        .as_deref()
        .map(|n| load_net(n, c.labels.as_deref()))
        .transpose()?;

    let mut runs = Vec::new();
    let mut report = Vec::new();
    for path in &c.runs {
        let run = read_run(path)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into());

        if let Ok(points) = ccdf_from_histogram(&run.histogram, true) {
            write_with(&c.out_dir.join(format!("{stem}.ccdf.csv")), |w| {
                write_ccdf(&points, w)
            })?;
        }
        let nonzero: Vec<u64> = run
            .histogram
            .iter()
            .map(|(s, _)| s)
            .filter(|&s| s > 0)
            .collect();
        let decades = match (nonzero.first(), nonzero.last()) {
            (Some(&lo), Some(_)) => Some((run.moments.max as f64 / lo as f64).log10()),
            _ => None,
        };
        let hill = hill_mle_histogram(&run.histogram, c.xmin);
        if let (Some(net), SourceMode::AllFirms) = (&net, &run.config.source) {
            let inv = involvement_expectation(&run, net)?;
            write_with(&c.out_dir.join(format!("{stem}.involvement.csv")), |w| {
                write_involvement(&inv, w)
            })?;
        }
        report.push(RunAnalysis {
            run: path.display().to_string(),
            source: run.config.source.to_string(),
            events: run.events,
            mean: run.moments.mean(),
            std: run.moments.std(),
            max: run.moments.max,
            zero_fraction: run.moments.zero_count as f64 / run.events as f64,
            nonzero_decades: decades,
            xmin: c.xmin,
            hill_alpha: hill.as_ref().ok().copied(),
            hill_error: hill.as_ref().err().map(|e| e.to_string()),
        });
        println!(
            "{}: events={} mean={} max={} hill_alpha={}",
            path.display(),
            run.events,
            g17(run.moments.mean()),
            run.moments.max,
            match &hill {
                Ok(a) => g17(*a),
                Err(e) => format!("n/a ({e})"),
            }
        );
        runs.push(run);
    }

    let zeros = if c.exclude_zero {
        ZeroSizes::Exclude
    } else {
        ZeroSizes::Include
    };
    let industries = industry_summary(&runs, zeros);
    if !industries.rows.is_empty() {
        write_with(&c.out_dir.join("industry_means.csv"), |w| {
            write_industry_stats(&industries, w)
        })?;
    }
    write_with(&c.out_dir.join("analysis.json"), |w| {
        serde_json::to_writer_pretty(
            &mut *w,
            &serde_json::json!({ "runs": report, "industries": industries }),
        )?;
        writeln!(w)
    })
}

fn leontief(c: Leontief) -> Result<()> {
    let table = load_io_table(&c.io)?;
    let inverse = leontief_inverse(&table)?;
    write_with(&c.out, |w| {
        writeln!(w, "{}", table.sectors().join(","))?;
        for row in inverse.row_iter() {
            let cells: Vec<String> = row.iter().map(|&v| g17(v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    })?;
    if let Some(path) = &c.multipliers {
        let m = multipliers(&inverse, c.reduction);
        write_with(path, |w| {
            writeln!(w, "sector,multiplier")?;
            for (s, v) in table.sectors().iter().zip(&m) {
                writeln!(w, "{s},{}", g17(*v))?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn compare(c: Compare) -> Result<()> {
    let table = load_io_table(&c.io)?;
    let inverse = leontief_inverse(&table)?;
    let map = load_sector_map(&c.map)?;
    let means_file =
        File::open(&c.means).with_context(|| format!("cannot open {}", c.means.display()))?;
    let means = read_industry_stats(BufReader::new(means_file))
        .with_context(|| c.means.display().to_string())?;
    let cmp = compare_with_means(&table, &inverse, &map, &means.rows, c.reduction)?;
    if let Some(out) = &c.out {
        write_with(out, |w| {
            writeln!(w, "industry,multiplier,mean")?;
            for p in &cmp.points {
                writeln!(
                    w,
                    "{},{},{}",
                    p.industry,
                    g17(p.multiplier),
                    g17(p.mean_size)
                )?;
            }
            Ok(())
        })?;
    }
    println!("pairs={} pearson_r={}", cmp.points.len(), g17(cmp.pearson));
    Ok(())
}
