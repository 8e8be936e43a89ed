use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use geoperm::conjecture::{build_pinning_system, emit_system, search_pinning, search_tangency, Format, SearchOptions};
use geoperm::geometry::{Configuration, OrderedOrder};
use geoperm::pinning::shrink::{shrink_to_pin_with, two_stage_shrink_with, ShrinkOptions};
use geoperm::pinning::{classify_minimal_pinning, is_pinned_nested, make_hyperboloidal, HyperboloidalParams};
use geoperm::tol;
use geoperm::transversal::enumerate_geometric_permutations;

use crate::manifest::{read_input, RunManifest};
use crate::{verify, Cli, Command, Failure, Formulation, SystemFormat};

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let seed = cli.global.seed;
    let out = cli.global.out.as_deref();
    match &cli.command {
        Command::Perms { config, resolution } => {
            let (bytes, cfg) = load(config)?;
            let e = enumerate_geometric_permutations(&cfg, *resolution, seed)?;
            let body = json!({
                "gps": e.gps.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                "certificates": e.certificates,
                "uncertified": e.uncertified.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                "directions_sampled": e.directions_sampled,
            });
            emit_json(body, cli, Some(&bytes), start, out)
        }
        Command::Pin { config, order, two_stage, order2, budget } => {
            let (bytes, cfg) = load(config)?;
            let opts = ShrinkOptions { budget: *budget, seed };
            let o1 = OrderedOrder::parse(order)?;
            let body = match (two_stage, order2) {
                (true, Some(o2)) => pin_two_stage(&cfg, &o1, &OrderedOrder::parse(o2)?, &opts)?,
                _ => pin_single(&cfg, &o1, &opts)?,
            };
            emit_json(body, cli, Some(&bytes), start, out)
        }
        Command::Verify { lemma, trials, csv } => {
            let run = verify::run(*lemma, *trials, seed)?;
            let csv_path = csv.clone().or_else(|| out.map(|p| p.with_extension("csv")));
            if let Some(p) = &csv_path {
                std::fs::write(p, &run.csv)?;
            }
            let mut body = run.summary;
            body["csv"] = json!(csv_path.map(|p| p.display().to_string()));
            emit_json(body, cli, None, start, out)
        }
        Command::Hyperb { h, t } => {
            let t: [f64; 4] = t.as_slice().try_into().map_err(|_| Failure::Invalid("--t takes four values".into()))?;
            let body = hyperb(*h, t, seed)?;
            emit_json(body, cli, None, start, out)
        }
        Command::Search { formulation, budget } => {
            if *budget == 0 {
                return Err(Failure::Invalid("--budget must be at least 1".into()));
            }
            let report = match formulation {
                Formulation::Tangency => search_tangency(&SearchOptions::tangency(*budget, seed)),
                Formulation::Pinning => search_pinning(&SearchOptions::pinning(*budget, seed)),
            };
            emit_json(serde_json::to_value(report).expect("report serializes"), cli, None, start, out)
        }
        Command::EmitSystem { format } => {
            let f = match format {
                SystemFormat::Plain => Format::Plain,
                SystemFormat::Smtlib => Format::Smtlib,
            };
            write_text(&emit_system(&build_pinning_system(), f), out)?;
            let mut m = RunManifest::new(cli, None);
            m.wall_time = start.elapsed().as_secs_f64();
            eprintln!("{}", serde_json::to_string(&m).expect("manifest serializes"));
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<(Vec<u8>, Configuration), Failure> {
    let bytes = read_input(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    Ok((bytes, Configuration::from_json(&text)?))
}

fn pin_single(cfg: &Configuration, order: &OrderedOrder, opts: &ShrinkOptions) -> Result<Value, Failure> {
    let s = shrink_to_pin_with(cfg, order, opts)?;
    let r = cfg.common_radius()?;
    let shrunk = (s.t_star > tol::GEOM).then(|| cfg.with_radius(s.t_star * r)).transpose()?;
    let certificate = shrunk.as_ref().map(|c| is_pinned_nested(c, &s.line, opts.seed)).transpose()?;
    let (classification, classification_error) = match &shrunk {
        Some(c) if c.len() == 4 => match classify_minimal_pinning(c, &s.line) {
            Ok(k) => (Some(k), None),
            Err(e) => (None, Some(e.to_string())),
        },
        _ => (None, None),
    };
    Ok(json!({
        "mode": "single",
        "order": order.to_string(),
        "t_star": s.t_star,
        "line": s.line,
        "bisection_steps": s.bisection_steps,
        "polished": s.polished,
        "certificate": certificate,
        "classification": classification,
        "classification_error": classification_error,
    }))
}

fn pin_two_stage(
    cfg: &Configuration,
    o1: &OrderedOrder,
    o2: &OrderedOrder,
    opts: &ShrinkOptions,
) -> Result<Value, Failure> {
    let res = two_stage_shrink_with(cfg, o1, o2, opts)?;
    let c1 = is_pinned_nested(&res.configuration, &res.line1, opts.seed)?;
    let c2 = is_pinned_nested(&res.configuration, &res.line2, opts.seed)?;
    Ok(json!({
        "mode": "two_stage",
        "order": o1.to_string(),
        "order2": o2.to_string(),
        "configuration": res.configuration,
        "line1": res.line1,
        "line2": res.line2,
        "first_pinned": res.first_pinned.to_string(),
        "stage1_scale": res.stage1_scale,
        "stage2_ratio": res.stage2_ratio,
        "certificates": [c1, c2],
    }))
}

fn hyperb(h: f64, t: [f64; 4], seed: u64) -> Result<Value, Failure> {
    let p = HyperboloidalParams::new(h, t)?;
    let inst = make_hyperboloidal(&p)?;
    let quadric_residual = inst.centers.iter().map(|c| (c.x * c.y - h * c.z).abs()).fold(0.0, f64::max);
    let (classification, certificate) = if inst.non_overlapping {
        let cfg = inst.configuration()?;
        (Some(classify_minimal_pinning(&cfg, &inst.line)?), Some(is_pinned_nested(&cfg, &inst.line, seed)?))
    } else {
        (None, None)
    };
    Ok(json!({
        "params": p,
        "centers": inst.centers.iter().map(|c| [c.x, c.y, c.z]).collect::<Vec<_>>(),
        "line": inst.line,
        "tangent": inst.tangent,
        "non_overlapping": inst.non_overlapping,
        "min_pair_distance": inst.min_pair_distance(),
        "quadric_residual": quadric_residual,
        "classification": classification,
        "certificate": certificate,
    }))
}

fn emit_json(
    mut body: Value,
    cli: &Cli,
    input: Option<&[u8]>,
    start: Instant,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut m = RunManifest::new(cli, input);
    m.wall_time = start.elapsed().as_secs_f64();
    body["manifest"] = serde_json::to_value(m).expect("manifest serializes");
    let mut text = serde_json::to_string_pretty(&body).expect("report serializes");
    text.push('\n');
    write_text(&text, out)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
