use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qc_core::castles::{
    capturing_tower_periodic, centered_cylinder, dungeon_castle_with, high_castle, is_capturing,
    kakutani_rokhlin, Castle, DungeonOptions, TowerOptions,
};
use qc_core::cocycle::{capture_time, remove_qc_with, verify_qc_certificate_with, Cocycle, QcCertificate, RemoveOptions};
use qc_core::io::{
    castle_dot, castle_from_file, castle_to_file, cocycle_to_json, parse_clopen, parse_cocycle,
    parse_sft, CastleFile,
};
use qc_core::matperturb::VERIFY_SLACK;
use qc_core::shiftspace::{periodic_orbits, EventuallyPeriodicPoint, PeriodicOrbit, Sft};
use qc_core::Error;

const EXIT_CERTIFICATE: u8 = 2;
const EXIT_CONSTRUCTION: u8 = 3;
const EXIT_PARSE: u8 = 4;

#[derive(Parser)]
#[command(name = "qc", version)]
#[command(about = "Castle partitions of shifts of finite type and certified removal of quasiconformality")]
struct Cli {
    /// Seed for `random:` points
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the full report as JSON to this path
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a shift of finite type
    #[command(subcommand)]
    Sft(SftCommand),
    /// Build and verify castles
    #[command(subcommand)]
    Castle(CastleCommand),
    /// Perturb, trace and verify cocycles
    #[command(subcommand)]
    Cocycle(CocycleCommand),
}

#[derive(Subcommand)]
enum SftCommand {
    /// Alphabet, edges, essentialization and periodic-orbit census
    Info {
        #[command(flatten)]
        sft: SftArg,
        /// Largest period counted in the census
        #[arg(long, default_value_t = 3)]
        periods: usize,
    },
}

#[derive(Args)]
struct SftArg {
    /// SFT file, or `builtin:golden-mean` / `builtin:full:<q>`
    #[arg(long)]
    sft: String,
}

#[derive(Args)]
struct CastleOut {
    /// Write the castle file here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a Graphviz drawing of the castle here
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Bound for every deepening loop
    #[arg(long, default_value_t = 32)]
    max_depth: usize,
}

#[derive(Subcommand)]
enum CastleCommand {
    /// First-return castle over a feedback set
    Kr {
        #[command(flatten)]
        sft: SftArg,
        /// Clopen expression for the base
        #[arg(long)]
        set: String,
        #[command(flatten)]
        out: CastleOut,
    },
    /// Castle partition with all heights at least N
    High {
        #[command(flatten)]
        sft: SftArg,
        /// Capture time N
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        out: CastleOut,
    },
    /// One N-capturing tower around a periodic orbit
    Capture {
        #[command(flatten)]
        sft: SftArg,
        /// A word spelling one period of the orbit
        #[arg(long)]
        orbit: String,
        /// Capture time N
        #[arg(long = "N")]
        n: usize,
        /// Clopen expression for U; defaults to the centred cylinder of radius --depth
        #[arg(long)]
        set: Option<String>,
        /// Radius of the default U
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[command(flatten)]
        out: CastleOut,
    },
    /// Castle partition into N-capturing towers with floors resolved on [-r, r]
    Dungeon {
        #[command(flatten)]
        sft: SftArg,
        /// Capture time N
        #[arg(long = "N")]
        n: usize,
        /// The resolution r
        #[arg(long)]
        depth: usize,
        /// Largest number of short periodic orbits handled
        #[arg(long, default_value_t = 1024)]
        max_short_orbits: usize,
        #[command(flatten)]
        out: CastleOut,
    },
}

#[derive(Args)]
struct TraceArgs {
    /// Point to trace: `periodic:<word>`, `point:<left>|<center>|<right>@<anchor>` or `random:<period>`
    #[arg(long)]
    trace: Option<String>,
    /// Range of n, as `a..b` (inclusive)
    #[arg(long, default_value = "-60..60", allow_hyphen_values = true)]
    range: String,
}

#[derive(Subcommand)]
enum CocycleCommand {
    /// Perturb a cocycle so that no orbit stays M-quasiconformal
    Perturb {
        #[command(flatten)]
        sft: SftArg,
        /// Cocycle file (text or JSON)
        #[arg(long)]
        cocycle: PathBuf,
        /// Quasiconformality bound, > 1
        #[arg(long = "M")]
        m: f64,
        /// Perturbation size relative to the local norm, > 0
        #[arg(long)]
        eps: f64,
        /// Relative slack of the metric and power-identity checks
        #[arg(long)]
        tol: Option<f64>,
        /// Bound for every deepening loop
        #[arg(long, default_value_t = 32)]
        max_depth: usize,
        /// Largest number of short periodic orbits handled
        #[arg(long, default_value_t = 1024)]
        max_short_orbits: usize,
        /// Write the perturbed cocycle (JSON) here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the castle file here
        #[arg(long)]
        castle_out: Option<PathBuf>,
        /// Write the certificate here
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Write a Graphviz drawing of the castle here
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        trace: TraceArgs,
    },
    /// kappa of the cocycle products along one orbit
    Trace {
        #[command(flatten)]
        sft: SftArg,
        /// Cocycle file (text or JSON)
        #[arg(long)]
        cocycle: PathBuf,
        /// Report the first n with kappa above M, and fail when there is none
        #[arg(long = "M")]
        m: Option<f64>,
        #[command(flatten)]
        trace: TraceArgs,
    },
    /// Re-verify a certificate from a cocycle and a castle file
    Verify {
        #[command(flatten)]
        sft: SftArg,
        /// The perturbed cocycle
        #[arg(long)]
        cocycle: PathBuf,
        /// Castle file written by `castle` or `cocycle perturb`
        #[arg(long)]
        castle: PathBuf,
        /// The unperturbed cocycle, to bound the distance
        #[arg(long)]
        original: Option<PathBuf>,
        /// Quasiconformality bound, > 1
        #[arg(long = "M")]
        m: f64,
        /// Perturbation size relative to the local norm, > 0
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the certificate here
        #[arg(long)]
        cert: Option<PathBuf>,
    },
}

/// Failure of a command, mapped onto an exit code.
enum Failure {
    Input(String),
    Construction(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::InvalidSymbol(_) | Error::Inadmissible(_) => Failure::Input(e.to_string()),
            _ => Failure::Construction(e.to_string()),
        }
    }
}

type CmdResult = Result<(Value, bool), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_PARSE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Sft(c) => sft_cmd(c),
        Command::Castle(c) => castle_cmd(c),
        Command::Cocycle(c) => cocycle_cmd(c, cli.seed),
    };
    match result {
        Ok((report, pass)) => {
            if let Some(path) = &cli.json {
                if let Err(f) = write_json(path, &report) {
                    return fail(f);
                }
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                println!("result: FAIL");
                ExitCode::from(EXIT_CERTIFICATE)
            }
        }
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> ExitCode {
    match f {
        Failure::Input(m) => {
            eprintln!("input error: {m}");
            ExitCode::from(EXIT_PARSE)
        }
        Failure::Construction(m) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONSTRUCTION)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Construction(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Construction(e.to_string()))?;
    write(path, &(text + "\n"))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn load_sft(arg: &SftArg) -> Result<Arc<Sft>, Failure> {
    let sft = match arg.sft.strip_prefix("builtin:") {
        Some("golden-mean") => Sft::golden_mean(),
        Some(name) => match name.strip_prefix("full:").and_then(|q| q.parse::<usize>().ok()) {
            Some(q) if q > 0 => Sft::full_shift(q),
            _ => return Err(Failure::Input(format!("unknown builtin shift `{name}`"))),
        },
        None => parse_sft(&read(Path::new(&arg.sft))?)?,
    };
    Ok(Arc::new(sft))
}

fn load_cocycle(space: &Arc<Sft>, path: &Path) -> Result<Cocycle, Failure> {
    Ok(parse_cocycle(space, &read(path)?)?)
}

fn parse_range(text: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Input(format!("range `{text}` is not of the form a..b with a <= b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_point(space: &Sft, spec: &str, seed: u64) -> Result<EventuallyPeriodicPoint, Failure> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Failure::Input(format!("point `{spec}` has no `kind:` prefix")))?;
    let x = match kind {
        "periodic" => EventuallyPeriodicPoint::periodic(&space.parse_word(rest)?),
        "point" => {
            let (body, anchor) = rest.rsplit_once('@').unwrap_or((rest, "0"));
            let parts: Vec<&str> = body.split('|').collect();
            let [l, c, r] = parts[..] else {
                return Err(Failure::Input(format!("point `{spec}` needs left|center|right")));
            };
            let anchor = anchor
                .parse()
                .map_err(|_| Failure::Input(format!("bad anchor `{anchor}`")))?;
            EventuallyPeriodicPoint::new(space.parse_word(l)?, space.parse_word(c)?, space.parse_word(r)?, anchor)?
        }
        "random" => {
            let p: usize = rest
                .parse()
                .map_err(|_| Failure::Input(format!("bad period `{rest}`")))?;
            let orbits: Vec<PeriodicOrbit> = periodic_orbits(space, p + 1)
                .into_iter()
                .filter(|o| o.period() == p)
                .collect();
            if orbits.is_empty() {
                return Err(Failure::Input(format!("no periodic orbit of period {p}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let o = &orbits[rng.random_range(0..orbits.len())];
            o.point(rng.random_range(0..p))
        }
        _ => return Err(Failure::Input(format!("unknown point kind `{kind}`"))),
    };
    if !x.is_admissible(space) {
        return Err(Failure::Input(format!("point `{spec}` is not in the shift")));
    }
    Ok(x)
}

fn sft_cmd(cmd: &SftCommand) -> CmdResult {
    let SftCommand::Info { sft, periods } = cmd;
    let space = load_sft(sft)?;
    let orbits = periodic_orbits(&space, periods + 1);
    let mut census = vec![0usize; *periods];
    for o in &orbits {
        census[o.period() - 1] += 1;
    }
    let prov = space.provenance();
    println!("alphabet: {}", space.labels().join(" "));
    println!("edges: {}", space.edge_count());
    if let Some(p) = prov {
        println!("block length: {}", p.block_len);
        let pruned = if p.pruned.is_empty() { "none".to_string() } else { p.pruned.join(" ") };
        println!("removed by essentialization: {pruned}");
    }
    println!("empty: {}", space.is_empty());
    for (i, c) in census.iter().enumerate() {
        let labels: Vec<&str> = orbits.iter().filter(|o| o.period() == i + 1).map(|o| o.label()).collect();
        println!("period {}: {c} {}", i + 1, labels.join(" "));
    }
    let report = json!({
        "command": "sft info",
        "alphabet": space.labels(),
        "edges": space.edge_count(),
        "empty": space.is_empty(),
        "provenance": prov.map(to_value),
        "census": census.iter().enumerate().map(|(i, c)| ((i + 1).to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
        "orbits": orbits.iter().map(|o| o.label()).collect::<Vec<_>>(),
    });
    Ok((report, true))
}

/// Serializes the castle, reloads it and re-runs every exact check on the
/// reloaded copy.
fn finish_castle(space: &Arc<Sft>, castle: &Castle, out: &CastleOut, mut report: Value) -> CmdResult {
    let file = castle_to_file(castle);
    let reloaded = castle_from_file(space, &file)?;
    let appendix = reloaded.verify()?;
    print_castle(&reloaded);
    match &appendix.partition_error {
        None if reloaded.is_partition => println!("partition: exact"),
        None => println!("disjoint: exact"),
        Some(m) => println!("partition: FAIL ({m})"),
    }
    for t in appendix.towers.iter().filter(|t| !t.pass) {
        println!("tower {}: FAIL", t.tower);
    }
    println!("verification: {}", if appendix.pass { "pass" } else { "FAIL" });
    if let Some(p) = &out.out {
        write_json(p, &to_value(&file))?;
    }
    if let Some(p) = &out.dot {
        write(p, &castle_dot(&reloaded))?;
    }
    report["castle"] = to_value(&file);
    report["verification"] = to_value(&appendix);
    let pass = appendix.pass && report.get("extra_pass").and_then(Value::as_bool).unwrap_or(true);
    Ok((report, pass))
}

/// Towers listed on stdout; the JSON report has all of them.
const LISTED_TOWERS: usize = 16;

fn print_castle(c: &Castle) {
    println!("towers: {}", c.towers.len());
    for (i, t) in c.towers.iter().enumerate().take(LISTED_TOWERS) {
        let kind = match (c.n, c.is_short(i)) {
            (None, _) => "",
            (Some(_), true) => " short",
            (Some(_), false) => " tall",
        };
        let orbit = t.orbit.as_ref().map(|o| format!(" orbit {}", o.label())).unwrap_or_default();
        let base = t.base.tighten();
        let (a, b) = base.window();
        println!(
            "  tower {i}: height {}{kind}{orbit}, base {} words on [{a}, {b}]",
            t.height,
            base.count()
        );
    }
    if c.towers.len() > LISTED_TOWERS {
        println!("  ... {} more", c.towers.len() - LISTED_TOWERS);
    }
}

fn castle_cmd(cmd: &CastleCommand) -> CmdResult {
    match cmd {
        CastleCommand::Kr { sft, set, out } => {
            let space = load_sft(sft)?;
            let e = parse_clopen(&space, set)?;
            let c = kakutani_rokhlin(&e)?;
            finish_castle(&space, &c, out, json!({"command": "castle kr", "set": set}))
        }
        CastleCommand::High { sft, n, out } => {
            let space = load_sft(sft)?;
            let c = high_castle(&space, *n)?;
            finish_castle(&space, &c, out, json!({"command": "castle high", "n": n}))
        }
        CastleCommand::Capture {
            sft,
            orbit,
            n,
            set,
            depth,
            out,
        } => {
            let space = load_sft(sft)?;
            let word = space.parse_word(orbit)?;
            let o = PeriodicOrbit::new(&space, &word)
                .ok_or_else(|| Failure::Input(format!("`{orbit}` does not spell a periodic orbit")))?;
            let u = match set {
                Some(s) => parse_clopen(&space, s)?,
                None => centered_cylinder(&space, &o.point(0), *depth)?,
            };
            let opts = TowerOptions {
                min_depth: 0,
                max_depth: out.max_depth,
            };
            let t = capturing_tower_periodic(&space, &o, *n, &u, opts)?;
            let k = t.union()?;
            let inside = qc_core::shiftspace::ClopenSet::union_all(&space, (0..t.height as i64).map(|i| u.shift(i)))?;
            let cap = is_capturing(&k, *n)?;
            let cap_c = is_capturing(&k.complement(), *n)?;
            let within = k.is_subset(&inside)?;
            println!("K capturing: {}", cap.pass);
            println!("complement capturing: {}", cap_c.pass);
            println!("K inside the first images of U: {within}");
            let mut c = Castle::new(&space, vec![t]);
            c.n = Some(*n);
            let report = json!({
                "command": "castle capture",
                "orbit": o.label(),
                "n": n,
                "capture": to_value(&cap),
                "complement_capture": to_value(&cap_c),
                "inside_u": within,
                "extra_pass": cap.pass && cap_c.pass && within,
            });
            finish_castle(&space, &c, out, report)
        }
        CastleCommand::Dungeon {
            sft,
            n,
            depth,
            max_short_orbits,
            out,
        } => {
            let space = load_sft(sft)?;
            let opts = DungeonOptions {
                max_depth: out.max_depth,
                max_short_orbits: *max_short_orbits,
            };
            let c = dungeon_castle_with(&space, *n, *depth, opts)?;
            finish_castle(&space, &c, out, json!({"command": "castle dungeon", "n": n, "depth": depth}))
        }
    }
}

fn print_certificate(cert: &QcCertificate) {
    println!("M = {}, eps = {}, N = {}", cert.m, cert.epsilon, cert.n);
    println!("partition: {}", cert.partition);
    let failed = cert.towers.iter().filter(|t| !t.pass).count();
    println!("towers: {}, failed: {failed}", cert.towers.len());
    let listed = cert.towers.iter().filter(|t| !t.pass).chain(cert.towers.iter().filter(|t| t.pass));
    for t in listed.take(LISTED_TOWERS) {
        let kind = if t.short { "short" } else { "tall" };
        let status = if t.pass { "pass" } else { "FAIL" };
        println!(
            "  tower {}: height {} {kind}, statistic {:.6e} > {:.6e}: {status}{}",
            t.tower,
            t.height,
            t.value,
            t.required,
            t.failure.as_ref().map(|f| format!(" ({f})")).unwrap_or_default()
        );
    }
    if let Some(m) = &cert.metric {
        println!(
            "d'(G, F) = {:.6e} <= {:.6e}, max relative change {:.6e}: {}",
            m.dprime,
            m.bound,
            m.max_relative_change,
            if m.pass { "pass" } else { "FAIL" }
        );
    }
    println!("horizon: {}", cert.horizon);
    println!("certificate: {}", if cert.pass { "pass" } else { "FAIL" });
}

fn run_trace(g: &Cocycle, args: &TraceArgs, seed: u64, m: Option<f64>) -> Result<Option<(Value, bool)>, Failure> {
    let Some(spec) = &args.trace else {
        return Ok(None);
    };
    let (a, b) = parse_range(&args.range)?;
    let x = parse_point(g.space(), spec, seed)?;
    let t = g.kappa_trace(&x, a, b)?;
    let first = m.and_then(|m| t.first_above(m));
    println!("trace at {} over [{a}, {b}]: max kappa {:.6e}", x.describe(g.space()), t.max);
    let every = if b - a <= 20 { 1 } else { 10 };
    for (i, k) in t.values.iter().enumerate() {
        let n = a + i as i64;
        if n % every == 0 || n == a || n == b || Some(n) == first {
            // max of kappa over |j| <= |n|
            println!("  n = {n:4}: kappa {k:.6e}, running max {:.6e}", t.max_within(n.abs()));
        }
    }
    if let Some(m) = m {
        match first {
            Some(n) => println!("first n with kappa > {m}: {n}"),
            None => println!("kappa stays <= {m} on the range"),
        }
    }
    let pass = m.is_none_or(|m| t.max > m);
    Ok(Some((
        json!({"point": spec, "range": [a, b], "trace": to_value(&t), "first_above": first}),
        pass,
    )))
}

fn cocycle_cmd(cmd: &CocycleCommand, seed: u64) -> CmdResult {
    match cmd {
        CocycleCommand::Perturb {
            sft,
            cocycle,
            m,
            eps,
            tol,
            max_depth,
            max_short_orbits,
            out,
            castle_out,
            cert,
            dot,
            trace,
        } => {
            let space = load_sft(sft)?;
            let f = load_cocycle(&space, cocycle)?;
            let n = capture_time(*m, *eps)?;
            println!("capture time N = {n}");
            let mut opts = RemoveOptions::default();
            opts.dungeon.max_depth = *max_depth;
            opts.dungeon.max_short_orbits = *max_short_orbits;
            let mut removal = remove_qc_with(&f, *m, *eps, opts)?;
            if let Some(tol) = tol {
                removal.certificate =
                    verify_qc_certificate_with(&removal.perturbed, &removal.castle, *m, *eps, Some(&f), *tol)?;
            }
            print_certificate(&removal.certificate);
            if let Some(p) = out {
                write_json(p, &cocycle_to_json(&removal.perturbed))?;
            }
            if let Some(p) = castle_out {
                write_json(p, &to_value(&castle_to_file(&removal.castle)))?;
            }
            if let Some(p) = cert {
                write_json(p, &to_value(&removal.certificate))?;
            }
            if let Some(p) = dot {
                write(p, &castle_dot(&removal.castle))?;
            }
            let mut report = json!({
                "command": "cocycle perturb",
                "certificate": to_value(&removal.certificate),
            });
            if let Some((t, _)) = run_trace(&removal.perturbed, trace, seed, Some(*m))? {
                report["trace"] = t;
            }
            Ok((report, removal.certificate.pass))
        }
        CocycleCommand::Trace { sft, cocycle, m, trace } => {
            let space = load_sft(sft)?;
            let g = load_cocycle(&space, cocycle)?;
            if trace.trace.is_none() {
                return Err(Failure::Input("`cocycle trace` needs --trace".into()));
            }
            let (t, pass) = run_trace(&g, trace, seed, *m)?.expect("trace requested");
            Ok((json!({"command": "cocycle trace", "trace": t}), pass))
        }
        CocycleCommand::Verify {
            sft,
            cocycle,
            castle,
            original,
            m,
            eps,
            tol,
            cert,
        } => {
            let space = load_sft(sft)?;
            let g = load_cocycle(&space, cocycle)?;
            let file: CastleFile =
                serde_json::from_str(&read(castle)?).map_err(|e| Failure::Input(format!("{}: {e}", castle.display())))?;
            let c = castle_from_file(&space, &file)?;
            let f = original.as_deref().map(|p| load_cocycle(&space, p)).transpose()?;
            let certificate =
                verify_qc_certificate_with(&g, &c, *m, *eps, f.as_ref(), tol.unwrap_or(VERIFY_SLACK))?;
            print_certificate(&certificate);
            if let Some(p) = cert {
                write_json(p, &to_value(&certificate))?;
            }
            let pass = certificate.pass;
            Ok((json!({"command": "cocycle verify", "certificate": to_value(&certificate)}), pass))
        }
    }
}
