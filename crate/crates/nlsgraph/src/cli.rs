//! Command-line front end.
//!
//! Every failure ends with one line `ERROR <CODE>: <message>` on stderr and
//! the exit code of [`CliError::exit_code`].

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nlsgraph_core::closed_forms::{
    critical_masses, gn_constant_halfline, gn_constant_line, halfsoliton_energy, soliton, soliton_energy,
};
use nlsgraph_core::critical;
use nlsgraph_core::rearrange::{self, Cell};
use nlsgraph_core::surgery::{self, CompetitorShape};
use nlsgraph_core::topology::classify_case;
use nlsgraph_core::{minimize, shapes, MetricGraph};
use serde::Serialize;

use crate::catalogue;
use crate::error::{CliError, Result};
use crate::io;
use crate::overrides::ConfigOverrides;
use crate::parallel;
use crate::report::{CompetitorReport, FlowSummary, ProfileCsvRow, SolveReport, SweepCsvRow};
use crate::scenario;

#[derive(Debug, Parser)]
#[command(name = "nlsgraph", version, about = "NLS ground states on noncompact metric graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Graph description (JSON).
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Catalogue graph instead of a file, e.g. `tadpole:6.283` or `star3`.
    #[arg(long, value_name = "NAME", conflicts_with = "graph")]
    pub named: Option<String>,
    /// Output directory (for `solve`, a path ending in `.csv` names the
    /// function file directly).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Common {
    fn graph(&self) -> Result<(String, MetricGraph)> {
        match (&self.graph, &self.named) {
            (Some(p), _) => Ok((p.display().to_string(), io::read_graph(p)?)),
            (None, Some(n)) => Ok((n.clone(), catalogue::resolve(n)?)),
            (None, None) => Err(CliError::Usage(String::from("a graph is required (--graph or --named)"))),
        }
    }

    fn graph_or(&self, default: &str) -> Result<(String, MetricGraph)> {
        if self.graph.is_none() && self.named.is_none() {
            Ok((default.to_string(), catalogue::resolve(default)?))
        } else {
            self.graph()
        }
    }

    fn overrides(&self, o: &ConfigOverrides) -> ConfigOverrides {
        let mut o = o.clone();
        if self.seed.is_some() {
            o.seed = self.seed;
        }
        o
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Topology report of a graph.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Ground state at one mass.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Report path; defaults to `report.json` next to the function CSV.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Extra initial guess read from a function CSV on the same mesh.
        #[arg(long, value_name = "CSV")]
        init_from: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigOverrides,
    },
    /// Ground states along a one-parameter family, with optional bisection.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["pendant", "g_ell", "fork", "tadpole", "signpost"])]
        family: String,
        /// Parameter grid `a:b:n`.
        #[arg(long, value_name = "A:B:N")]
        grid: Option<String>,
        /// Second parameter: loop length for `signpost` (default 2π), edge
        /// length for `fork` (default 0.2). For `fork` the swept parameter is
        /// the number of edges.
        #[arg(long)]
        fixed: Option<f64>,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Bisect for the sign change of the energy gap on `lo:hi`.
        #[arg(long, value_name = "LO:HI")]
        bisect: Option<String>,
        #[arg(long, default_value_t = 1e-2)]
        width: f64,
        #[command(flatten)]
        config: ConfigOverrides,
    },
    /// Critical-power report: predictions and the estimated constant.
    Gn {
        #[command(flatten)]
        common: Common,
        /// Skip the numerical estimate.
        #[arg(long)]
        predict_only: bool,
        #[command(flatten)]
        config: ConfigOverrides,
    },
    /// Energy levels at p = 6 over a mass grid.
    Profile6 {
        #[command(flatten)]
        common: Common,
        /// Mass grid `a:b:n`.
        #[arg(long, value_name = "A:B:N")]
        masses: String,
        #[command(flatten)]
        config: ConfigOverrides,
    },
    /// Monotone and symmetric rearrangements of a function CSV.
    Rearrange {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
    },
    /// Explicit competitor built from a cut soliton.
    Competitor {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["pendant", "signpost", "tadpole", "fork3", "bubbletower"])]
        shape: String,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Run the gradient flow from the competitor as well.
        #[arg(long)]
        flow: bool,
        #[command(flatten)]
        config: ConfigOverrides,
    },
    /// Closed-form constants; optionally writes the catalogue graphs.
    Reference {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = [3.0, 4.0, 5.0])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Write every catalogue graph as JSON into this directory.
        #[arg(long, value_name = "DIR")]
        emit_corpus: Option<PathBuf>,
    },
    /// Scenario files.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScenarioAction {
    /// Runs a scenario file; exits 2 if an assertion fails.
    Run {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Run only the scenario with this name.
        #[arg(long)]
        only: Option<String>,
        #[command(flatten)]
        config: ConfigOverrides,
    },
}

/// Parses `a:b:n`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Usage(format!("grid `{s}` must be `a:b:n`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok(parallel::linspace(a, b, n))
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || CliError::Usage(format!("bracket `{s}` must be `lo:hi`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.parse().map_err(|_| bad())?;
    let hi: f64 = b.parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

/// Writes `text` to `dir/name` when an output directory is given, otherwise
/// to stdout.
fn deliver(out: &mut dyn Write, dir: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match dir {
        Some(d) => io::write_text(&d.join(name), text),
        None => io::emit(out, Path::new("<stdout>"), text),
    }
}

fn family_builder(family: &str, fixed: Option<f64>) -> impl Fn(f64) -> nlsgraph_core::Result<MetricGraph> + Sync {
    let family = family.to_string();
    move |x: f64| match family.as_str() {
        "pendant" => shapes::pendant_line(x),
        "g_ell" => shapes::g_ell(x),
        "tadpole" => shapes::tadpole(x),
        "signpost" => shapes::signpost(x, fixed.unwrap_or(2.0 * std::f64::consts::PI)),
        "fork" => {
            if x < 1.0 || x.fract() != 0.0 {
                return Err(nlsgraph_core::Error::WrongShape(format!("fork needs a whole number of edges, got {x}")));
            }
            shapes::n_fork(x as usize, fixed.unwrap_or(0.2))
        }
        _ => unreachable!("family validated by clap"),
    }
}

#[derive(Debug, Serialize)]
struct ReferenceRow {
    p: f64,
    mu: f64,
    amplitude: f64,
    width_rate: f64,
    omega: f64,
    soliton_energy: f64,
    halfsoliton_energy: f64,
}

#[derive(Debug, Serialize)]
struct ReferenceTable {
    solitons: Vec<ReferenceRow>,
    critical_mass_line: f64,
    critical_mass_halfline: f64,
    gn_constant_line: f64,
    gn_constant_halfline: f64,
}

#[derive(Debug, Serialize)]
struct RearrangeSummary {
    total_length: f64,
    norms: Vec<(f64, f64, f64)>,
    kinetic: f64,
    kinetic_monotone: f64,
    kinetic_symmetric: f64,
    preimage_min: usize,
    preimage_max: usize,
}

fn cells_from_csv(samples: &[io::EdgeSamples]) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for s in samples {
        cells.extend(rearrange::cells_from_samples(s.spacing()?, &s.values));
    }
    Ok(cells)
}

fn knots_csv(profile: &rearrange::PlProfile) -> Result<String> {
    #[derive(Serialize)]
    struct Knot {
        x: f64,
        value: f64,
    }
    let rows: Vec<Knot> = profile.knots.iter().map(|&(x, value)| Knot { x, value }).collect();
    io::csv_string(&rows)
}

/// Executes a parsed command, writing machine-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Analyze { common } => {
            let (_, g) = common.graph()?;
            let report = classify_case(&g)?;
            deliver(out, common.out.as_deref(), "topology.json", &to_json(&report))
        }
        Command::Solve {
            common,
            p,
            mass,
            report,
            init_from,
            config,
        } => {
            let (label, g) = common.graph()?;
            let cfg = common.overrides(&config).config(p, mass);
            let mut extra = Vec::new();
            if let Some(path) = &init_from {
                let mesh = cfg.mesh(&g)?;
                let u0 = io::function_on_mesh(mesh, &io::read_function_samples(path)?)?;
                extra.push((format!("file:{}", path.display()), u0));
            }
            let r = parallel::ground_state_par(&g, p, mass, &cfg, extra)?;
            let rep = SolveReport::new(&label, &g, p, mass, &cfg, &r)?;
            let (csv_path, default_report) = match &common.out {
                Some(o) if o.extension().is_some_and(|e| e == "csv") => {
                    (Some(o.clone()), o.with_file_name("report.json"))
                }
                Some(d) => (Some(d.join("result.csv")), d.join("report.json")),
                None => (None, PathBuf::new()),
            };
            if let Some(c) = &csv_path {
                io::write_function(c, &r.u)?;
            }
            match (report, csv_path) {
                (Some(rp), _) => io::write_json(&rp, &rep)?,
                (None, Some(_)) => io::write_json(&default_report, &rep)?,
                (None, None) => {}
            }
            io::emit(out, Path::new("<stdout>"), &to_json(&rep))
        }
        Command::Sweep {
            common,
            family,
            grid,
            fixed,
            p,
            mass,
            bisect,
            width,
            config,
        } => {
            if grid.is_none() && bisect.is_none() {
                return Err(CliError::Usage(String::from("sweep needs --grid, --bisect or both")));
            }
            let cfg = common.overrides(&config).config(p, mass);
            let builder = family_builder(&family, fixed);
            if let Some(g) = grid {
                let rows = parallel::sweep_par(&builder, p, mass, &parse_grid(&g)?, &cfg)?;
                let csv_rows: Vec<SweepCsvRow> = rows.iter().map(SweepCsvRow::from).collect();
                deliver(out, common.out.as_deref(), "sweep.csv", &io::csv_string(&csv_rows)?)?;
            }
            if let Some(b) = bisect {
                let t = parallel::phase_transition_par(&builder, p, mass, parse_pair(&b)?, width, &cfg)?;
                deliver(out, common.out.as_deref(), "transition.json", &to_json(&t))?;
            }
            Ok(())
        }
        Command::Gn {
            common,
            predict_only,
            config,
        } => {
            let (_, g) = common.graph()?;
            let cfg = common.overrides(&config).config(6.0, critical_masses().0);
            let report = if predict_only {
                critical::predict(&g)?
            } else {
                critical::critical_report(&g, &cfg)?
            };
            deliver(out, common.out.as_deref(), "critical.json", &to_json(&report))
        }
        Command::Profile6 { common, masses, config } => {
            let (_, g) = common.graph()?;
            let grid = parse_grid(&masses)?;
            let cfg = common.overrides(&config).config(6.0, critical_masses().0);
            let rows = parallel::profile6_par(&g, &grid, &cfg)?;
            let csv_rows: Vec<ProfileCsvRow> = rows.iter().map(ProfileCsvRow::from).collect();
            deliver(out, common.out.as_deref(), "profile6.csv", &io::csv_string(&csv_rows)?)
        }
        Command::Rearrange { common, input } => {
            let samples = io::read_function_samples(&input)?;
            if common.graph.is_some() || common.named.is_some() {
                let (_, g) = common.graph()?;
                check_layout(&g, &samples)?;
            }
            let cells = cells_from_csv(&samples)?;
            let star = rearrange::monotone_rearrangement_of_cells(&cells)?;
            let hat = star.symmetrize();
            let count = rearrange::preimage_count_of_cells(&cells)?;
            let power = |q: f64| -> f64 {
                cells
                    .iter()
                    .map(|c| c.h * nlsgraph_core::math::mean_power_linear(c.left, c.right, q))
                    .sum()
            };
            let kinetic: f64 = cells.iter().map(|c| (c.right - c.left).powi(2) / (2.0 * c.h)).sum();
            let summary = RearrangeSummary {
                total_length: star.length(),
                norms: [2.0, 4.0, 6.0]
                    .iter()
                    .map(|&q| (q, power(q), star.power_integral(q)))
                    .collect(),
                kinetic,
                kinetic_monotone: star.kinetic(),
                kinetic_symmetric: hat.kinetic(),
                preimage_min: count.min(),
                preimage_max: count.max(),
            };
            let dir = common.out.as_deref();
            deliver(out, dir, "u_star.csv", &knots_csv(&star)?)?;
            deliver(out, dir, "u_hat.csv", &knots_csv(&hat)?)?;
            deliver(out, dir, "rearrange.json", &to_json(&summary))
        }
        Command::Competitor {
            common,
            shape,
            p,
            mass,
            flow,
            config,
        } => {
            let shape = CompetitorShape::parse(&shape).expect("validated by clap");
            let default = match shape {
                CompetitorShape::Pendant => "pendant_line:1",
                CompetitorShape::Signpost => "signpost:1,6.283185307179586",
                CompetitorShape::Tadpole => "tadpole:6.283185307179586",
                CompetitorShape::Fork3 => "fork:1,1,1",
                CompetitorShape::BubbleTower => "bubble_tower:1,2.5",
            };
            let (label, g) = common.graph_or(default)?;
            let cfg = common.overrides(&config).config(p, mass);
            let u = surgery::competitor(shape, &g, p, mass, &cfg)?;
            let mut rep = CompetitorReport::new(shape.as_str(), &label, p, mass, &u)?;
            if flow {
                let r = minimize::normalized_gradient_flow(p, mass, &u, &cfg)?;
                rep.flow = Some(FlowSummary {
                    energy: r.energy,
                    interpolant_energy: r.interpolant_energy,
                    status: r.status,
                    iterations: r.iterations,
                });
            }
            if let Some(d) = common.out.as_deref() {
                io::write_function(&d.join("competitor.csv"), &u)?;
            }
            deliver(out, common.out.as_deref(), "competitor.json", &to_json(&rep))
        }
        Command::Reference {
            common,
            p,
            mass,
            emit_corpus,
        } => {
            let mut solitons = Vec::with_capacity(p.len());
            for &q in &p {
                let s = soliton(q, mass)?;
                solitons.push(ReferenceRow {
                    p: q,
                    mu: mass,
                    amplitude: s.amplitude,
                    width_rate: s.width_rate,
                    omega: s.omega,
                    soliton_energy: soliton_energy(q, mass)?,
                    halfsoliton_energy: halfsoliton_energy(q, mass)?,
                });
            }
            let (line, half) = critical_masses();
            let table = ReferenceTable {
                solitons,
                critical_mass_line: line,
                critical_mass_halfline: half,
                gn_constant_line: gn_constant_line(),
                gn_constant_halfline: gn_constant_halfline(),
            };
            if let Some(dir) = emit_corpus {
                for (name, g) in catalogue::named_graphs() {
                    io::write_graph(&dir.join(format!("{name}.json")), &g)?;
                }
            }
            deliver(out, common.out.as_deref(), "reference.json", &to_json(&table))
        }
        Command::Scenario {
            action:
                ScenarioAction::Run {
                    file,
                    common,
                    only,
                    config,
                },
        } => {
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("scenario-out"));
            let outcomes = scenario::run_file(&file, &dir, only.as_deref(), &common.overrides(&config))?;
            for o in &outcomes {
                let line = match (&o.error, o.passed) {
                    (Some(e), _) => format!("ERROR {} {e}\n", o.name),
                    (None, true) => format!("PASS {}\n", o.name),
                    (None, false) => format!("FAIL {}: {}\n", o.name, o.failures.join("; ")),
                };
                io::emit(out, Path::new("<stdout>"), &line)?;
            }
            scenario::batch_status(&outcomes)
        }
    }
}

/// Edge ids of the CSV must be those of `g`, finite edges sampled over
/// their full length.
fn check_layout(g: &MetricGraph, samples: &[io::EdgeSamples]) -> Result<()> {
    for e in g.edges() {
        let s = samples
            .iter()
            .find(|s| s.edge == e.id)
            .ok_or_else(|| CliError::Parse(format!("edge `{}` missing from function CSV", e.id)))?;
        if let Some(len) = e.length.finite() {
            let last = *s.x.last().unwrap_or(&0.0);
            if (last - len).abs() > io::VERTEX_TOLERANCE * len.max(1.0) {
                return Err(CliError::Parse(format!(
                    "edge `{}` sampled up to {last}, its length is {len}",
                    e.id
                )));
            }
        }
    }
    if samples.len() != g.edges().len() {
        return Err(CliError::Parse(String::from("function CSV names edges not in the graph")));
    }
    Ok(())
}

/// Parses `args`, runs, reports errors on `err`, and returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let msg = e.render().to_string();
                    let first = msg.lines().next().unwrap_or("invalid arguments");
                    let first = first.strip_prefix("error: ").unwrap_or(first);
                    let _ = writeln!(err, "ERROR USAGE: {first}");
                    4
                }
            };
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "ERROR {}: {e}", e.code());
            e.exit_code()
        }
    }
}
