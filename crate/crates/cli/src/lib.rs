//! Command-line front end: enumeration, classification, certificate checks, the
//! realizer, bound tables and SVG export.
//!
//! Exit status is 0 on success, 2 when a verification fails and 1 on usage or IO errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use matchstick::criteria::{self, Filter};
use matchstick::generator::{self, SearchConfig, Sink, Survivor};
use matchstick::geom::Point;
use matchstick::io::{certificate, planar_code, svg, CertificateRecord, Provenance};
use matchstick::realizer::{self, RealizeOptions, RealizeVerdict};
use matchstick::PlaneGraph;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "matchstick", version, about = "Enumerate and check 4-regular matchstick graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Target outer deficiency.
    #[arg(long, global = true)]
    tau: Option<i64>,
    /// Outer face size for classification.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long = "max-n", global = true)]
    max_n: Option<usize>,
    /// Comma-separated filter ids, or `default`, `all`, `none`.
    #[arg(long, global = true)]
    filters: Option<String>,
    #[arg(long = "two-connected", global = true, num_args = 0..=1, default_missing_value = "true")]
    two_connected: Option<bool>,
    /// Edge-length tolerance for realizations.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all, 1 runs sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for candidates with the given deficiency and stream the survivors.
    Enumerate,
    /// List the matchstick graphs with outer face size `--k`.
    Classify,
    /// Re-check every record of a JSONL certificate file.
    Verify,
    /// Run the realizer on every graph of a planar_code file.
    Realize,
    /// Print the bound tables, or a single cut bound.
    Bounds {
        #[arg(long, num_args = 2, value_names = ["N2", "N4"])]
        cut: Option<Vec<i64>>,
    },
    /// Draw the graphs of a planar_code or JSONL file.
    ExportSvg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    PlanarCode,
    Jsonl,
    Svg,
}

fn format_of(p: &Path) -> Result<Format> {
    match p.extension().and_then(|e| e.to_str()) {
        Some("plc") => Ok(Format::PlanarCode),
        Some("jsonl") => Ok(Format::Jsonl),
        Some("svg") => Ok(Format::Svg),
        _ => Err(usage(format!("{}: expected a .plc, .jsonl or .svg path", p.display()))),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(msg.into())
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match dispatch(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Enumerate => enumerate(cli, out),
        Command::Classify => classify(cli, out),
        Command::Verify => verify(cli, out),
        Command::Realize => realize(cli, out),
        Command::Bounds { cut } => bounds(cut.as_deref(), out),
        Command::ExportSvg => export_svg(cli, out),
    }
}

fn parse_filters(s: &str) -> Result<Vec<Filter>> {
    match s {
        "default" => Ok(Filter::default_set()),
        "all" => Ok(Filter::ALL.to_vec()),
        "none" | "" => Ok(Vec::new()),
        _ => s.split(',').map(|f| f.trim().parse::<Filter>().map_err(|e| usage(format!("--filters: {e}")))).collect(),
    }
}

fn realize_options(cli: &Cli) -> Result<RealizeOptions> {
    let mut o = RealizeOptions::default();
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage(format!("--tol {t} must be positive")));
        }
        o.tol = t;
    }
    if let Some(s) = cli.seed {
        o.seed = s;
    }
    Ok(o)
}

fn apply_common(cli: &Cli, cfg: &mut SearchConfig) -> Result<()> {
    if let Some(f) = &cli.filters {
        cfg.filters = parse_filters(f)?;
    }
    if let Some(c) = cli.two_connected {
        cfg.require_two_connected = c;
    }
    if let Some(j) = cli.jobs {
        cfg.parallel_width = j;
    }
    cfg.realize = realize_options(cli)?;
    cfg.validate().map_err(|e| usage(e.to_string()))
}

/// Default vertex budget for classification.
pub fn classify_max_n(k: usize) -> usize {
    (2 * k).max(12)
}

/// Writes survivors as they arrive, in the format of the output path.
struct StreamSink<'a> {
    config: &'a SearchConfig,
    jsonl: Option<Box<dyn Write + 'a>>,
    graphs: Vec<PlaneGraph>,
    written: usize,
    error: Option<io::Error>,
}

impl Sink for StreamSink<'_> {
    fn survivor(&mut self, s: Survivor) {
        self.written += 1;
        match &mut self.jsonl {
            Some(w) => {
                if self.error.is_none() {
                    let rec = CertificateRecord::from_survivor(&s, self.config);
                    if let Err(e) = certificate::write_jsonl([&rec], w) {
                        self.error = Some(e);
                    }
                }
            }
            None => self.graphs.push(s.node.graph),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn run_search(config: &SearchConfig, out_path: Option<&Path>, out: &mut dyn Write) -> Result<(generator::EnumStats, usize)> {
    let format = out_path.map(format_of).transpose()?;
    if format == Some(Format::Svg) {
        return Err(usage("--out: search results go to .jsonl or .plc"));
    }
    let jsonl: Option<Box<dyn Write + '_>> = match (format, out_path) {
        (Some(Format::Jsonl), Some(p)) => Some(Box::new(create(p)?)),
        (None, _) => Some(Box::new(&mut *out)),
        _ => None,
    };
    let mut sink = StreamSink { config, jsonl, graphs: Vec::new(), written: 0, error: None };
    let stats = match generator::enumerate(config, &mut sink) {
        Ok(s) => s,
        Err(generator::SearchError::BudgetExceeded(s)) => {
            eprintln!("node budget exceeded; partial results");
            *s
        }
        Err(e) => return Err(usage(e.to_string())),
    };
    if let Some(e) = sink.error.take() {
        return Err(e.into());
    }
    if let Some(mut w) = sink.jsonl.take() {
        w.flush()?;
    }
    if let (Some(Format::PlanarCode), Some(p)) = (format, out_path) {
        let mut w = create(p)?;
        planar_code::write(&sink.graphs, &mut w)?;
        w.flush()?;
    }
    Ok((stats, sink.written))
}

fn enumerate(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let tau = cli.tau.ok_or_else(|| usage("enumerate needs --tau"))?;
    let mut cfg = SearchConfig::tau(tau, cli.max_n.unwrap_or(16));
    apply_common(cli, &mut cfg)?;
    let (stats, n) = run_search(&cfg, cli.out.as_deref(), out)?;
    eprintln!(
        "expanded {} interior {} candidates {} survivors {} pruned {:?} [{:.2?}]",
        stats.expanded, stats.interior, stats.candidates, n, stats.pruned, stats.wall_time
    );
    Ok(EXIT_OK)
}

/// Collects survivors for printing.
struct Listing(Vec<Survivor>);

impl Sink for Listing {
    fn survivor(&mut self, s: Survivor) {
        self.0.push(s);
    }
}

fn classify(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let k = cli.k.ok_or_else(|| usage("classify needs --k"))?;
    let mut cfg = SearchConfig::classify(k, cli.max_n.unwrap_or(classify_max_n(k)), true);
    apply_common(cli, &mut cfg)?;
    let mut list = Listing(Vec::new());
    let stats = generator::enumerate(&cfg, &mut list).map_err(|e| anyhow!(e.to_string()))?;
    for s in &list.0 {
        let p = s.node.graph.face_profile();
        writeln!(out, "{}  n={} inner={} faces={:?}", s.node.code.to_hex(), p.n, p.n - p.k, p.census)?;
    }
    writeln!(out, "candidates {}", stats.candidates)?;
    writeln!(out, "count {}", list.0.len())?;
    if let Some(p) = &cli.out {
        match format_of(p)? {
            Format::Jsonl => {
                let mut w = create(p)?;
                let recs: Vec<CertificateRecord> = list.0.iter().map(|s| CertificateRecord::from_survivor(s, &cfg)).collect();
                certificate::write_jsonl(&recs, &mut w)?;
                w.flush()?;
            }
            Format::PlanarCode => {
                let mut w = create(p)?;
                planar_code::write(list.0.iter().map(|s| &s.node.graph), &mut w)?;
                w.flush()?;
            }
            Format::Svg => bail!("--out: classification results go to .jsonl or .plc"),
        }
    }
    Ok(EXIT_OK)
}

fn input(cli: &Cli) -> Result<(&Path, Format)> {
    let p = cli.input.as_deref().ok_or_else(|| usage("missing --in"))?;
    Ok((p, format_of(p)?))
}

fn read_graphs(path: &Path) -> Result<Vec<PlaneGraph>> {
    let mut f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    planar_code::read(&mut f).with_context(|| format!("reading {}", path.display()))
}

fn read_records(path: &Path) -> Result<Vec<CertificateRecord>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    certificate::read_jsonl(BufReader::new(f)).map_err(|e| anyhow!("reading {}: {e}", path.display()))
}

fn verify(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let (path, format) = input(cli)?;
    if format != Format::Jsonl {
        return Err(usage("verify reads a .jsonl certificate file"));
    }
    let recs = read_records(path)?;
    let mut failed = 0;
    for (i, r) in recs.iter().enumerate() {
        match r.recheck() {
            Ok(()) if r.passed() => writeln!(out, "{i} {} ok", r.code)?,
            Ok(()) => {
                failed += 1;
                let v = r.verdicts.iter().find(|v| !v.passed).expect("a failed verdict");
                writeln!(out, "{i} {} fails {}: {}", r.code, v.rule, v.witness)?;
            }
            Err(e) => {
                failed += 1;
                writeln!(out, "{i} {} does not re-verify: {e}", r.code)?;
            }
        }
    }
    writeln!(out, "verified {} of {}", recs.len() - failed, recs.len())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED })
}

fn realize(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let (path, format) = input(cli)?;
    if format != Format::PlanarCode {
        return Err(usage("realize reads a .plc file"));
    }
    let opts = realize_options(cli)?;
    let out_format = cli.out.as_deref().map(format_of).transpose()?;
    if matches!(out_format, Some(f) if f != Format::Jsonl) {
        return Err(usage("--out: realize writes .jsonl"));
    }
    let mut recs = Vec::new();
    let mut failed = 0;
    for (i, g) in read_graphs(path)?.into_iter().enumerate() {
        // Work in the labelling of the canonical code so records are portable.
        let g = g.canonical_code().decode()?;
        let rv = realizer::solve(&g, &opts);
        if !rv.is_realizable() {
            failed += 1;
        }
        writeln!(out, "{i} {} {}", g.canonical_code().to_hex(), rv.summary())?;
        let verdict = criteria::Verdict { passed: rv.is_realizable(), rule: criteria::Rule::Realizable, witness: rv.summary() };
        recs.push(CertificateRecord::new(&g, vec![verdict], Some(&rv), Provenance::for_realize(&opts)));
    }
    if let Some(p) = &cli.out {
        let mut w = create(p)?;
        certificate::write_jsonl(&recs, &mut w)?;
        w.flush()?;
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED })
}

fn bounds(cut: Option<&[i64]>, out: &mut dyn Write) -> Result<i32> {
    if let Some(c) = cut {
        let v = criteria::cut_decomposition_bound(c[0], c[1]).map_err(|e| usage(format!("--cut: {e}")))?;
        writeln!(out, "cut_decomposition_bound({}, {}) = {v}", c[0], c[1])?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "tau  min_k  min_A3  min_area  min_n")?;
    for r in criteria::BOUNDS_TABLE {
        writeln!(out, "{:>3}  {:>5}  {:>6}  {:>8}  {:>5}", r.tau, r.min_k, r.min_a3, r.min_area, r.min_n)?;
    }
    writeln!(out)?;
    writeln!(out, " k  area_upper   a4_upper  f4_upper")?;
    for k in 3..=12 {
        let a = criteria::area_upper(k).expect("k >= 3");
        writeln!(out, "{k:>2}  {a:>10.6}  {:>9}  {:>8}", criteria::a4_upper_bound(k), criteria::f4_upper_bound(k))?;
    }
    writeln!(out)?;
    let t = criteria::tau0_k10_exclusion();
    writeln!(out, "tau = 0, k = {} exclusion constants {:?}", t.k, t.constants())?;
    for c in &t.cases {
        writeln!(out, "  {}: margin {}", c.label, c.margin)?;
    }
    writeln!(out, "cut_decomposition_bound(17, 17) = {}", criteria::cut_decomposition_bound(17, 17)?)?;
    Ok(EXIT_OK)
}

fn export_svg(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let (path, format) = input(cli)?;
    let target = cli.out.as_deref().ok_or_else(|| usage("export-svg needs --out"))?;
    if format_of(target)? != Format::Svg {
        return Err(usage("--out: export-svg writes .svg"));
    }
    let drawings: Vec<(PlaneGraph, Option<Vec<Point>>)> = match format {
        Format::PlanarCode => {
            let opts = realize_options(cli)?;
            read_graphs(path)?
                .into_iter()
                .map(|g| {
                    let coords = match realizer::solve(&g, &opts) {
                        RealizeVerdict::Realizable(r) => Some(r.coords),
                        _ => None,
                    };
                    (g, coords)
                })
                .collect()
        }
        Format::Jsonl => read_records(path)?
            .into_iter()
            .map(|r| {
                let g = r.graph()?;
                let coords = r.coords.map(|c| c.iter().map(|p| Point::new(p[0], p[1])).collect());
                Ok((g, coords))
            })
            .collect::<Result<_>>()?,
        Format::Svg => return Err(usage("--in: cannot read .svg")),
    };
    let single = drawings.len() == 1;
    for (i, (g, coords)) in drawings.iter().enumerate() {
        let file = if single {
            target.to_path_buf()
        } else {
            let stem = target.file_stem().and_then(|s| s.to_str()).unwrap_or("graph");
            target.with_file_name(format!("{stem}-{i}.svg"))
        };
        std::fs::write(&file, svg::render(g, coords.as_deref())).with_context(|| format!("cannot write {}", file.display()))?;
        let kind = if coords.is_some() { "unit embedding" } else { svg::COMBINATORIAL_LABEL };
        writeln!(out, "{} ({kind})", file.display())?;
    }
    Ok(EXIT_OK)
}
