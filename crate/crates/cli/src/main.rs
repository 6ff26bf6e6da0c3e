//! Command-line front end: profile tables, model reports, condition-map
//! enumeration, curve slices, rational verification, and the golden-table
//! comparison. Counting subcommands honor `--workers` (default from the
//! `CARLITZ_WORKERS` environment variable) and emit deterministic output.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use carlitz_core::carlitz::{classify, enumerate_condition_maps_bounded, CarlitzForm, FieldOps,
    is_simple, PaleyGraph, DEFAULT_ENUM_BOUND, DEFAULT_PALEY_BOUND};
use carlitz_core::curves::{count_affine_points, quartic_slice_mod};
use carlitz_core::ffield::{first_nonresidue, is_prime, odd_primes_in};
use carlitz_core::gauss::{gauss_log_size, log_size, size_report};
use carlitz_core::rational::{parse_sequence, reduce_mod_p, verify_sequence};
use carlitz_core::search::{run_profile, SearchCheckpoint, SearchOpts, SearchStats, WProfile};
use carlitz_core::OddPrime;

#[derive(Parser)]
#[command(name = "carlitz", about = "square-difference-quotient sequence workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count profile W(p,x) for one prime
    Wtable(WtableArgs),
    /// Minimal length L(p) over a prime or range
    Lmin(SeriesArgs),
    /// First quadratic non-residue n(p) over a prime or range
    Nres(SeriesArgs),
    /// Logarithmic size sigma, model value g, and their difference
    Gauss(SeriesArgs),
    /// Enumerate and classify all condition maps on F_q
    Carlitz(CarlitzArgs),
    /// Simplicity verdict for the quadratic-residue graph on F_q
    Paley(PaleyArgs),
    /// Quartic slice coefficients, discriminant, and point count
    Curve(CurveArgs),
    /// Verify a rational sequence file
    Verify(VerifyArgs),
    /// Compare computed profiles against a reference table CSV
    TableCheck(TableCheckArgs),
    /// Emit two-column series files for plotting
    PlotData(PlotDataArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct WtableArgs {
    #[arg(long)]
    prime: u64,
    /// Largest column to compute (default p-1)
    #[arg(long)]
    x_max: Option<u32>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 3)]
    split_depth: u32,
    /// Resumable checkpoint file, created if absent
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, conflicts_with = "primes")]
    prime: Option<u64>,
    /// Inclusive range lo..hi
    #[arg(long)]
    primes: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CarlitzArgs {
    #[arg(long)]
    order: u64,
    #[arg(long, default_value_t = DEFAULT_ENUM_BOUND)]
    bound: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PaleyArgs {
    #[arg(long, conflicts_with = "max_order")]
    order: Option<u64>,
    /// Check every admissible order up to this bound
    #[arg(long)]
    max_order: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    s: u64,
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    file: PathBuf,
    /// Also reduce the sequence mod this prime and report the residues
    #[arg(long)]
    reduce: Option<u64>,
}

#[derive(Args)]
struct TableCheckArgs {
    #[arg(long)]
    reference: PathBuf,
    #[arg(long, default_value_t = 5)]
    min_p: u64,
    #[arg(long, default_value_t = 127)]
    max_p: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 3)]
    split_depth: u32,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotDataArgs {
    /// Inclusive range lo..hi
    #[arg(long)]
    primes: String,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    /// Stop after this many visited search nodes, marking the truncation
    #[arg(long)]
    node_budget: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({ "error": format!("{e:#}") }));
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Wtable(a) => cmd_wtable(a),
        Cmd::Lmin(a) => cmd_series(a, Series::Lmin),
        Cmd::Nres(a) => cmd_series(a, Series::Nres),
        Cmd::Gauss(a) => cmd_series(a, Series::Gauss),
        Cmd::Carlitz(a) => cmd_carlitz(a),
        Cmd::Paley(a) => cmd_paley(a),
        Cmd::Curve(a) => cmd_curve(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::TableCheck(a) => cmd_table_check(a),
        Cmd::PlotData(a) => cmd_plot_data(a),
    }
}

fn resolve_workers(flag: Option<usize>) -> Result<usize> {
    let w = match flag {
        Some(w) => w,
        None => match std::env::var("CARLITZ_WORKERS") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| anyhow!("CARLITZ_WORKERS is not a number: {s:?}"))?,
            Err(_) => 1,
        },
    };
    if w == 0 {
        bail!("workers must be >= 1");
    }
    Ok(w)
}

fn parse_prime(v: u64) -> Result<OddPrime> {
    OddPrime::new(v).map_err(|e| anyhow!("{e}"))
}

/// "lo..hi" or "lo..=hi", both bounds inclusive.
fn parse_range(s: &str) -> Result<(u64, u64)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("range must look like lo..hi, got {s:?}"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: u64 = lo.trim().parse().context("bad range start")?;
    let hi: u64 = hi.trim().parse().context("bad range end")?;
    Ok((lo, hi))
}

fn range_primes(args_prime: Option<u64>, args_primes: &Option<String>) -> Result<Vec<OddPrime>> {
    match (args_prime, args_primes) {
        (Some(p), None) => Ok(vec![parse_prime(p)?]),
        (None, Some(r)) => {
            let (lo, hi) = parse_range(r)?;
            Ok(odd_primes_in(lo.max(3), hi))
        }
        _ => bail!("exactly one of --prime and --primes is required"),
    }
}

fn write_out(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

/// Compute a full profile, optionally resuming from / appending to a
/// checkpoint file.
fn profile_with_checkpoint(
    p: OddPrime,
    opts: &SearchOpts,
    checkpoint: Option<&Path>,
) -> Result<(WProfile, SearchStats)> {
    let Some(path) = checkpoint else {
        let mut noop = |_: &[u64], _: &[u64]| {};
        return run_profile(p, opts, None, &mut noop).map_err(|e| anyhow!("{e}"));
    };
    let target = opts.x_max.unwrap_or_else(|| p.value() as u32 - 1);
    let existing = match fs::read_to_string(path) {
        Ok(text) if !text.trim().is_empty() => {
            Some(SearchCheckpoint::parse(&text).map_err(|e| anyhow!("{e}"))?)
        }
        Ok(_) => None,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    if existing.is_none() {
        let header = SearchCheckpoint::empty(p, target, opts.split_depth).serialize();
        file.write_all(header.as_bytes())?;
        file.flush()?;
    }
    let mut write_err = None;
    let mut on_done = |prefix: &[u64], counts: &[u64]| {
        let line = SearchCheckpoint::record_line(prefix, counts);
        if let Err(e) = writeln!(file, "{line}").and_then(|()| file.flush()) {
            write_err.get_or_insert(e);
        }
    };
    let result = run_profile(p, opts, existing.as_ref(), &mut on_done)
        .map_err(|e| anyhow!("{e}"));
    if let Some(e) = write_err {
        return Err(e).with_context(|| format!("appending to {}", path.display()));
    }
    result
}

fn cmd_wtable(a: WtableArgs) -> Result<ExitCode> {
    let p = parse_prime(a.prime)?;
    let opts = SearchOpts {
        workers: resolve_workers(a.workers)?,
        split_depth: a.split_depth,
        x_max: a.x_max,
    };
    let (profile, _) = profile_with_checkpoint(p, &opts, a.checkpoint.as_deref())?;
    let content = match a.format {
        Format::Csv => {
            let mut s = String::from("p,x,W\n");
            for (x, w) in profile.columns() {
                s.push_str(&format!("{},{x},{w}\n", p.value()));
            }
            s
        }
        Format::Json => {
            let mut prof = serde_json::Map::new();
            for (x, w) in profile.columns() {
                prof.insert(x.to_string(), json!(w));
            }
            let (sigma, g) = if profile.stabilized() {
                (Some(log_size(&profile).map_err(|e| anyhow!("{e}"))?),
                 Some(gauss_log_size(p)))
            } else {
                (None, None)
            };
            let record = json!({
                "p": p.value(),
                "profile": prof,
                "L": profile.minimal_length(),
                "sigma": sigma,
                "g": g,
            });
            format!("{record}\n")
        }
    };
    write_out(a.output.as_deref(), &content)?;
    Ok(ExitCode::SUCCESS)
}

enum Series {
    Lmin,
    Nres,
    Gauss,
}

fn cmd_series(a: SeriesArgs, which: Series) -> Result<ExitCode> {
    let primes = range_primes(a.prime, &a.primes)?;
    let workers = resolve_workers(a.workers)?;
    let opts = SearchOpts {
        workers,
        ..SearchOpts::default()
    };
    let mut rows: Vec<serde_json::Value> = Vec::new();
    for &p in &primes {
        let row = match which {
            Series::Nres => json!({ "p": p.value(), "n": first_nonresidue(p) }),
            Series::Lmin => {
                let (profile, _) = profile_with_checkpoint(p, &opts, None)?;
                let l = profile
                    .minimal_length()
                    .ok_or_else(|| anyhow!("no minimal length found for p={}", p.value()))?;
                json!({ "p": p.value(), "L": l })
            }
            Series::Gauss => {
                let (profile, _) = profile_with_checkpoint(p, &opts, None)?;
                let r = size_report(&profile).map_err(|e| anyhow!("{e}"))?;
                json!({ "p": r.p, "sigma": r.sigma, "g": r.g, "discrepancy": r.discrepancy })
            }
        };
        rows.push(row);
    }
    let header: &[&str] = match which {
        Series::Lmin => &["p", "L"],
        Series::Nres => &["p", "n"],
        Series::Gauss => &["p", "sigma", "g", "discrepancy"],
    };
    let content = match a.format {
        Format::Csv => {
            let mut s = header.join(",");
            s.push('\n');
            for row in &rows {
                let cells: Vec<String> = header
                    .iter()
                    .map(|k| {
                        let v = &row[k];
                        match v.as_f64() {
                            Some(f) if !v.is_u64() => format!("{f}"),
                            _ => v.to_string(),
                        }
                    })
                    .collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => format!("{}\n", serde_json::Value::Array(rows)),
    };
    write_out(a.output.as_deref(), &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_carlitz(a: CarlitzArgs) -> Result<ExitCode> {
    let ops = FieldOps::for_order(a.order).map_err(|e| anyhow!("{e}"))?;
    let maps = enumerate_condition_maps_bounded(&ops, a.bound).map_err(|e| anyhow!("{e}"))?;
    let q = ops.order();
    let k = ops.degree() as u64;
    let expected = q + k * q * (q - 1) / 2;
    let mut s = format!(
        "# q={q} p={} k={k} maps={} expected={expected}\n",
        ops.characteristic(),
        maps.len()
    );
    s.push_str("index,kind,c,a_sq,b,frob_power\n");
    for (i, map) in maps.iter().enumerate() {
        match classify(&ops, map).map_err(|e| anyhow!("{e}"))? {
            CarlitzForm::Constant(c) => s.push_str(&format!("{i},constant,{c},,,\n")),
            CarlitzForm::Affine { a_sq, b, frob_power } => {
                s.push_str(&format!("{i},affine,,{a_sq},{b},{frob_power}\n"));
            }
        }
    }
    write_out(a.output.as_deref(), &s)?;
    if maps.len() as u64 != expected {
        bail!("enumerated {} maps, expected {expected}", maps.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_paley(a: PaleyArgs) -> Result<ExitCode> {
    let orders: Vec<u64> = match (a.order, a.max_order) {
        (Some(q), None) => vec![q],
        (None, Some(m)) => (5..=m)
            .filter(|&q| q % 4 == 1 && FieldOps::for_order(q).is_ok())
            .collect(),
        _ => bail!("exactly one of --order and --max-order is required"),
    };
    let mut s = String::from("q,simple\n");
    for q in orders {
        let ops = FieldOps::for_order(q).map_err(|e| anyhow!("{e}"))?;
        let bound = q.max(DEFAULT_PALEY_BOUND);
        let graph = PaleyGraph::with_bound(ops, bound).map_err(|e| anyhow!("{e}"))?;
        s.push_str(&format!("{q},{}\n", is_simple(&graph)));
    }
    write_out(a.output.as_deref(), &s)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_curve(a: CurveArgs) -> Result<ExitCode> {
    let p = parse_prime(a.prime)?;
    let slice = quartic_slice_mod(a.s, p).map_err(|e| anyhow!("{e}"))?;
    let count = count_affine_points(a.s, p).map_err(|e| anyhow!("{e}"))?;
    let [c4, c3, c2, c1, c0] = slice.coeffs;
    let mut s = String::from("p,s,c4,c3,c2,c1,c0,disc,affine_count,trace,chi_c4\n");
    s.push_str(&format!(
        "{},{},{c4},{c3},{c2},{c1},{c0},{},{},{},{}\n",
        slice.p, slice.s, slice.disc, count.affine_count, count.trace_estimate, count.chi_c4
    ));
    write_out(a.output.as_deref(), &s)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.file)
        .with_context(|| format!("reading {}", a.file.display()))?;
    let seq = parse_sequence(&text).map_err(|e| anyhow!("{e}"))?;
    let ok = verify_sequence(&seq);
    println!("verdict {ok}");
    if let Some(pv) = a.reduce {
        let p = parse_prime(pv)?;
        let residues = reduce_mod_p(&seq, p).map_err(|e| anyhow!("{e}"))?;
        let joined: Vec<String> = residues.iter().map(|r| r.to_string()).collect();
        println!("mod {} {}", p.value(), joined.join(","));
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_table_check(a: TableCheckArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.reference)
        .with_context(|| format!("reading {}", a.reference.display()))?;
    let cells = parse_reference(&text)?;
    let workers = resolve_workers(a.workers)?;
    let opts = SearchOpts {
        workers,
        split_depth: a.split_depth,
        x_max: None,
    };
    let mut s = String::from("p,x,expected,computed,status\n");
    let mut checked = 0u64;
    let mut mismatches = 0u64;
    let mut primes: Vec<u64> = cells
        .iter()
        .map(|&(p, _, _)| p)
        .filter(|&p| p >= a.min_p && p <= a.max_p)
        .collect();
    primes.dedup();
    primes.sort_unstable();
    primes.dedup();
    for pv in primes {
        let p = parse_prime(pv)?;
        let (profile, _) = profile_with_checkpoint(p, &opts, None)?;
        if !profile.stabilized() {
            bail!("profile for p={pv} did not stabilize");
        }
        for &(cp, x, expected) in cells.iter().filter(|&&(cp, _, _)| cp == pv) {
            // columns past the traversal limit are all 1 once stabilized
            let computed = profile.count(x).unwrap_or(1);
            let status = if computed == expected { "ok" } else { "mismatch" };
            checked += 1;
            if computed != expected {
                mismatches += 1;
            }
            s.push_str(&format!("{cp},{x},{expected},{computed},{status}\n"));
        }
    }
    let verdict = if mismatches == 0 { "pass" } else { "fail" };
    s.push_str(&format!("# {verdict} cells={checked} mismatches={mismatches}\n"));
    write_out(a.output.as_deref(), &s)?;
    Ok(if mismatches == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

/// Reference CSV rows `p,x,W` (header required), kept in file order.
fn parse_reference(text: &str) -> Result<Vec<(u64, u32, u64)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if i == 0 {
            if line != "p,x,W" {
                bail!("reference line 1: expected header p,x,W, got {line:?}");
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            bail!("reference line {}: expected 3 fields, got {}", i + 1, fields.len());
        }
        let parse = |s: &str, what: &str| -> Result<u64> {
            s.trim()
                .parse()
                .map_err(|_| anyhow!("reference line {}: bad {what} {s:?}", i + 1))
        };
        out.push((
            parse(fields[0], "prime")?,
            parse(fields[1], "column")? as u32,
            parse(fields[2], "count")?,
        ));
    }
    if out.is_empty() {
        bail!("reference table has no data rows");
    }
    Ok(out)
}

/// 1-based index of p in the sequence of all primes.
fn prime_index(p: u64) -> u64 {
    (2..=p).filter(|&m| is_prime(m)).count() as u64
}

fn cmd_plot_data(a: PlotDataArgs) -> Result<ExitCode> {
    let (lo, hi) = parse_range(&a.primes)?;
    let primes = odd_primes_in(lo.max(5), hi);
    let workers = resolve_workers(a.workers)?;
    let opts = SearchOpts {
        workers,
        ..SearchOpts::default()
    };
    fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("creating {}", a.out_dir.display()))?;
    let mut lseries = String::from("# figure: minimal length L(p(n)) against prime index n\n");
    let mut sigma = String::from("# figure: logarithmic size sigma(p(n)) against prime index n\n");
    let mut disc =
        String::from("# figure: log discrepancy sigma(p(n)) - g(p(n)) against prime index n\n");
    let mut spent = 0u64;
    for &p in &primes {
        let (profile, stats) = profile_with_checkpoint(p, &opts, None)?;
        spent += stats.visited_nodes;
        let n = prime_index(p.value());
        let l = profile
            .minimal_length()
            .ok_or_else(|| anyhow!("no minimal length found for p={}", p.value()))?;
        let report = size_report(&profile).map_err(|e| anyhow!("{e}"))?;
        lseries.push_str(&format!("{n} {l}\n"));
        sigma.push_str(&format!("{n} {}\n", report.sigma));
        disc.push_str(&format!("{n} {}\n", report.discrepancy));
        if let Some(budget) = a.node_budget {
            if spent > budget {
                let marker = format!(
                    "# truncated: node budget {budget} exceeded after p={}\n",
                    p.value()
                );
                lseries.push_str(&marker);
                sigma.push_str(&marker);
                disc.push_str(&marker);
                break;
            }
        }
    }
    fs::write(a.out_dir.join("lseries.dat"), lseries)?;
    fs::write(a.out_dir.join("sigma.dat"), sigma)?;
    fs::write(a.out_dir.join("discrepancy.dat"), disc)?;
    Ok(ExitCode::SUCCESS)
}
