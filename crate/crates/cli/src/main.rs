use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ehp_core::classical::{
    build_WH, build_h_bo, build_laurent, build_wh_adic, pairing, HboVariant, Monomial, VMonomial,
};
use ehp_core::ehp::{apply_d1, build_e1, stems_from_resolution};
use ehp_core::extcalc::{resolve, Boundary, Ring};
use ehp_core::gradmod::{
    freeness_check, indecomposables_report, trivial_module, verify_action, GradedModule, Level,
};
use ehp_core::singer::{build_phi_point, singer_construct, verify_phi_point};
use ehp_core::steenrod::basis;
use ehp_core::verify::{self, CheckOutcome};
use ehp_core::Error;

const CRITERIA: &str = "\
Acceptance checks (one invocation each):
   1  steenrod-basis --check 1
   2  module-verify --check 2
   3  module-build --check 3
   4  phi-verify --check 4
   5  phi-verify --check 5
   6  pairing --check 6
   7  pairing --check 7
   8  pairing --check 8
   9  freeness --check 9
  10  indec --check 10
  11  ext --check 11
  12  ehp-e2 --check 12
verify-all runs all of them.

Exit codes: 0 success, 1 verification failure, 2 usage error.";

#[derive(Parser)]
#[command(name = "ehp", version, about = "Mod-2 Steenrod modules, Ext charts and stable EHP pages", after_help = CRITERIA)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output to PATH instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Admissible basis of A in one degree.
    SteenrodBasis {
        #[arg(long, required_unless_present = "check")]
        degree: Option<u32>,
        #[arg(long)]
        check: Option<u32>,
    },
    /// Build a module and print it as JSON.
    ModuleBuild {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        check: Option<u32>,
    },
    /// Check the Adem relations on a module's stored action.
    ModuleVerify {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        check: Option<u32>,
    },
    /// Indecomposables M / A^{>0} M per degree.
    Indec {
        #[command(flatten)]
        module: ModuleArgs,
        /// `full` or a subalgebra index n for A(n).
        #[arg(long, default_value = "full")]
        level: String,
        #[arg(long)]
        lo: Option<i32>,
        #[arg(long)]
        hi: Option<i32>,
        #[arg(long)]
        check: Option<u32>,
    },
    /// Degreewise freeness over A(n).
    Freeness {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        lo: Option<i32>,
        #[arg(long)]
        hi: Option<i32>,
        #[arg(long)]
        check: Option<u32>,
    },
    /// Ext chart from a minimal resolution.
    Ext {
        #[command(flatten)]
        module: ModuleArgs,
        /// `full` or a subalgebra index n for A(n).
        #[arg(long, default_value = "full")]
        ring: String,
        #[arg(long, default_value_t = 4)]
        max_s: u32,
        #[arg(long, default_value_t = 12)]
        max_t: i32,
        /// Generator ordering; omitted means input order.
        #[arg(long)]
        seed: Option<u64>,
        /// `exact` when the window is the whole module, `truncated` to erode
        /// the chart; defaults to exact for the trivial module only.
        #[arg(long, value_enum)]
        boundary: Option<BoundaryArg>,
        #[arg(long)]
        check: Option<u32>,
    },
    /// Evaluate <w-monomial, v-monomial> in H*(BO) x H_*(BO).
    Pairing {
        #[arg(long, required_unless_present = "check")]
        w: Option<String>,
        #[arg(long, required_unless_present = "check")]
        v: Option<String>,
        #[arg(long)]
        check: Option<u32>,
    },
    /// Build Phi for a point on [lo, hi] and verify it.
    PhiVerify {
        #[arg(long, default_value_t = -8, allow_hyphen_values = true)]
        lo: i32,
        #[arg(long, default_value_t = 8, allow_hyphen_values = true)]
        hi: i32,
        #[arg(long)]
        check: Option<u32>,
    },
    /// E1 page of the stable EHP spectral sequence for a point.
    EhpE1 {
        #[command(flatten)]
        page: PageArgs,
    },
    /// E2 page after d1.
    EhpE2 {
        #[command(flatten)]
        page: PageArgs,
        #[arg(long)]
        check: Option<u32>,
    },
    /// Run every acceptance check.
    VerifyAll,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Exact,
    Truncated,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Trivial,
    HBo,
    HBso,
    Mto,
    Mtso,
    Wh,
    WhOriented,
    WhAdic,
    Laurent,
    SingerTrivial,
    SingerMto,
}

#[derive(Args)]
struct ModuleArgs {
    /// Read the module from a JSON file instead of building it.
    #[arg(long, conflicts_with = "kind")]
    module: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Top degree for H*(BO)-type modules.
    #[arg(long, default_value_t = 8)]
    max_deg: u32,
    /// Top generator index for WH.
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    d: i32,
    /// Bottom generator index for WH.
    #[arg(long, default_value_t = -8, allow_hyphen_values = true)]
    gen_lo: i32,
    /// Largest coefficient degree for WH.
    #[arg(long, default_value_t = 6)]
    coeff_max: u32,
    /// xi_2-adic index l; the piece starts in degree 2l.
    #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
    l: i32,
    /// Window bounds for Laurent, Singer and xi_2-adic modules.
    #[arg(long = "win-lo", default_value_t = -8, allow_hyphen_values = true)]
    win_lo: i32,
    #[arg(long = "win-hi", default_value_t = 8, allow_hyphen_values = true)]
    win_hi: i32,
}

#[derive(Args)]
struct PageArgs {
    /// Top column.
    #[arg(long, allow_hyphen_values = true)]
    d: Option<i64>,
    /// Number of columns.
    #[arg(long)]
    r: Option<u32>,
    /// Restrict to one row t.
    #[arg(long)]
    row: Option<i64>,
    #[arg(long, default_value_t = 7)]
    max_stem: u32,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Integrity(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, ok: true }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

impl ModuleArgs {
    fn build(&self) -> Result<GradedModule, Failure> {
        if let Some(path) = &self.module {
            let s = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            return Ok(GradedModule::from_json(&s)?);
        }
        let kind = self.kind.ok_or_else(|| Failure::Usage("give --module FILE or --kind".into()))?;
        if self.win_hi < self.win_lo {
            return Err(Failure::Usage("--win-hi lies below --win-lo".into()));
        }
        if matches!(kind, Kind::Wh | Kind::WhOriented) && self.d < self.gen_lo {
            return Err(Failure::Usage("--d lies below --gen-lo".into()));
        }
        Ok(match kind {
            Kind::Trivial => trivial_module(),
            Kind::HBo => build_h_bo(self.max_deg, HboVariant::Plain),
            Kind::HBso => build_h_bo(self.max_deg, HboVariant::Oriented),
            Kind::Mto => build_h_bo(self.max_deg, HboVariant::Thom),
            Kind::Mtso => build_h_bo(self.max_deg, HboVariant::ThomOriented),
            Kind::Wh => build_WH(self.d, self.gen_lo, self.coeff_max, false),
            Kind::WhOriented => build_WH(self.d, self.gen_lo, self.coeff_max, true),
            Kind::WhAdic => build_wh_adic(self.l, self.win_hi, None)?.module,
            Kind::Laurent => build_laurent(self.win_lo, self.win_hi),
            Kind::SingerTrivial => singer_construct(&trivial_module(), self.win_lo, self.win_hi),
            Kind::SingerMto => singer_construct(&build_h_bo(self.max_deg, HboVariant::Thom), self.win_lo, self.win_hi),
        })
    }

    fn is_trivial(&self) -> bool {
        self.module.is_none() && matches!(self.kind, Some(Kind::Trivial))
    }
}

fn parse_level(s: &str) -> Result<Option<u32>, Failure> {
    if s == "full" {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Failure::Usage(format!("expected `full` or a subalgebra index, got {s:?}")))
}

fn check(id: u32, owned: &[u32], sub: &str, format: Format) -> Result<Output, Failure> {
    if !owned.contains(&id) {
        return Err(Failure::Usage(format!("{sub} runs check(s) {owned:?}, not {id}")));
    }
    let o = verify::run(id).expect("known id");
    Ok(report(&[o], format))
}

fn report(outcomes: &[CheckOutcome], format: Format) -> Output {
    let ok = outcomes.iter().all(|o| o.pass);
    let text = match format {
        Format::Json => json(&outcomes),
        _ => {
            let mut s = String::new();
            for o in outcomes {
                let _ = writeln!(s, "{}", o.line());
                for f in o.failures.iter().skip(1) {
                    let _ = writeln!(s, "      {f}");
                }
            }
            s
        }
    };
    Output { text, ok }
}

fn rows_for(row: Option<i64>, all: impl Iterator<Item = i64>) -> Vec<i64> {
    match row {
        Some(r) => vec![r],
        None => all.collect(),
    }
}

fn grid(columns: &[i64], rows: &[i64], cell: impl Fn(i64, i64) -> String) -> String {
    let mut s = format!("{:>4} |", "t\\s");
    for c in columns {
        let _ = write!(s, " {c:>6}");
    }
    s.push('\n');
    for &t in rows.iter().rev() {
        let _ = write!(s, "{t:>4} |");
        for &c in columns {
            let _ = write!(s, " {:>6}", cell(c, t));
        }
        s.push('\n');
    }
    s
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let format = cli.format;
    match &cli.command {
        Command::SteenrodBasis { degree, check: c } => {
            if let Some(id) = c {
                return check(*id, &[1], "steenrod-basis", format);
            }
            let b = basis(degree.expect("clap requires --degree"));
            let words: Vec<String> = b.iter().map(|w| w.to_string()).collect();
            Ok(Output::ok(match format {
                Format::Json => json(&words),
                _ => words.iter().map(|w| format!("{w}\n")).collect(),
            }))
        }
        Command::ModuleBuild { module, check: c } => {
            if let Some(id) = c {
                return check(*id, &[3], "module-build", format);
            }
            let mut s = module.build()?.to_json();
            s.push('\n');
            Ok(Output::ok(s))
        }
        Command::ModuleVerify { module, check: c } => {
            if let Some(id) = c {
                return check(*id, &[2], "module-verify", format);
            }
            let m = module.build()?;
            let v = verify_action(&m);
            let text = match format {
                Format::Json => json(&v),
                _ if v.is_empty() => format!("{}: action verified\n", m.name),
                _ => v.iter().map(|x| format!("{x:?}\n")).collect(),
            };
            Ok(Output { text, ok: v.is_empty() })
        }
        Command::Indec { module, level, lo, hi, check: c } => {
            if let Some(id) = c {
                return check(*id, &[10], "indec", format);
            }
            let m = module.build()?;
            let level = match parse_level(level)? {
                None => Level::Full,
                Some(n) => Level::Sub(n),
            };
            let (ilo, ihi) = m.window().interior();
            let rep = indecomposables_report(&m, level, lo.unwrap_or(ilo), hi.unwrap_or(ihi))?;
            Ok(Output::ok(match format {
                Format::Json => json(&rep),
                Format::Csv => {
                    let mut s = String::from("t,dim\n");
                    for sl in &rep.slices {
                        let _ = writeln!(s, "{},{}", sl.degree, sl.dim);
                    }
                    s
                }
                Format::Text => rep
                    .slices
                    .iter()
                    .map(|sl| format!("{:>4}  {}  {}\n", sl.degree, sl.dim, sl.representatives.join(", ")))
                    .collect(),
            }))
        }
        Command::Freeness { module, n, lo, hi, check: c } => {
            if let Some(id) = c {
                return check(*id, &[9], "freeness", format);
            }
            let m = module.build()?;
            let (ilo, ihi) = m.window().interior();
            let rep = freeness_check(&m, *n, lo.unwrap_or(ilo), hi.unwrap_or(ihi))?;
            let text = match format {
                Format::Json => json(&rep),
                _ => {
                    let mut s = String::new();
                    for d in &rep.degrees {
                        let _ = writeln!(
                            s,
                            "{:>4}  dim {}  predicted {}  {}",
                            d.degree,
                            d.dim,
                            d.predicted,
                            if d.pass { "free" } else { "not free" }
                        );
                    }
                    s
                }
            };
            Ok(Output { text, ok: rep.pass() })
        }
        Command::Ext { module, ring, max_s, max_t, seed, boundary, check: c } => {
            if let Some(id) = c {
                return check(*id, &[11], "ext", format);
            }
            let m = module.build()?;
            let ring = match parse_level(ring)? {
                None => Ring::Full,
                Some(n) => Ring::Sub(n),
            };
            let boundary = match boundary {
                Some(BoundaryArg::Exact) => Boundary::Exact,
                Some(BoundaryArg::Truncated) => Boundary::Truncated,
                None if module.is_trivial() => Boundary::Exact,
                None => Boundary::Truncated,
            };
            let chart = resolve(&m, ring, boundary, *max_s, *max_t, *seed)?.chart();
            Ok(Output::ok(match format {
                Format::Json => chart.to_json() + "\n",
                Format::Csv => chart.to_csv(),
                Format::Text => {
                    let mut s = String::new();
                    let stems: Vec<i32> = chart.entries.iter().map(|e| e.t - e.s as i32).collect();
                    let (lo, hi) = (stems.iter().min().copied().unwrap_or(0), stems.iter().max().copied().unwrap_or(0));
                    for sdeg in (0..=*max_s).rev() {
                        let _ = write!(s, "{sdeg:>3} |");
                        for stem in lo..=hi {
                            let cell = chart.dim(sdeg, stem + sdeg as i32).map_or(".".into(), |d| d.to_string());
                            let _ = write!(s, " {cell:>2}");
                        }
                        s.push('\n');
                    }
                    let _ = write!(s, "t-s |");
                    for stem in lo..=hi {
                        let _ = write!(s, " {stem:>2}");
                    }
                    s.push('\n');
                    s
                }
            }))
        }
        Command::Pairing { w, v, check: c } => {
            if let Some(id) = c {
                return check(*id, &[6, 7, 8], "pairing", format);
            }
            let (w, v) = (w.as_deref().expect("clap"), v.as_deref().expect("clap"));
            let wm = if w == "1" { Some(Monomial::one()) } else { Monomial::parse(w, "w") }
                .ok_or_else(|| Failure::Usage(format!("bad w-monomial {w:?}")))?;
            let vm = if v == "1" { Some(VMonomial::one()) } else { VMonomial::parse(v) }
                .ok_or_else(|| Failure::Usage(format!("bad v-monomial {v:?}")))?;
            let ws: Vec<u32> = wm.indices().iter().map(|&i| i as u32).collect();
            let value = u8::from(pairing(&ws, &vm));
            Ok(Output::ok(match format {
                Format::Json => json(&serde_json::json!({ "w": w, "v": v, "value": value })),
                _ => format!("{value}\n"),
            }))
        }
        Command::PhiVerify { lo, hi, check: c } => {
            if let Some(id) = c {
                return check(*id, &[4, 5], "phi-verify", format);
            }
            if hi < lo {
                return Err(Failure::Usage("--hi lies below --lo".into()));
            }
            let (wh, r, phi) = build_phi_point(*lo, *hi)?;
            let rep = verify_phi_point(&wh, &r, &phi, 8, 0)?;
            let text = match format {
                Format::Json => json(&rep),
                _ => format!(
                    "linearity violations {}\nnon-bijective degrees {:?}\nt-action violations {}\ntriangular {}\nprojection {}\n",
                    rep.linearity_violations, rep.non_bijective_degrees, rep.t_action_violations, rep.triangular, rep.projection
                ),
            };
            Ok(Output { text, ok: rep.pass() })
        }
        Command::EhpE1 { page } => {
            let (Some(d), Some(r)) = (page.d, page.r) else {
                return Err(Failure::Usage("--d and --r are required".into()));
            };
            let stems = stems_from_resolution(page.max_stem)?;
            let p = build_e1(d, r, &stems)?;
            let rows = rows_for(page.row, p.rows());
            let columns: Vec<i64> = p.columns().collect();
            Ok(Output::ok(match format {
                Format::Json => json(&p.to_json(&rows)),
                Format::Csv => p.to_csv(&rows),
                Format::Text => grid(&columns, &rows, |s, t| {
                    let m = if p.d1(s, t) == 0 { "" } else { "*" };
                    format!("{}{m}", p.group(s, t))
                }),
            }))
        }
        Command::EhpE2 { page, check: c } => {
            if let Some(id) = c {
                return check(*id, &[12], "ehp-e2", format);
            }
            let (Some(d), Some(r)) = (page.d, page.r) else {
                return Err(Failure::Usage("--d and --r are required".into()));
            };
            let stems = stems_from_resolution(page.max_stem)?;
            let e2 = apply_d1(&build_e1(d, r, &stems)?);
            let rows = rows_for(page.row, e2.rows.iter().copied());
            Ok(Output::ok(match format {
                Format::Json => json(&e2.to_json(&rows)),
                Format::Csv => e2.to_csv(&rows),
                Format::Text => grid(&e2.columns, &rows, |s, t| e2.group(s, t).map_or("?".into(), |g| g.to_string())),
            }))
        }
        Command::VerifyAll => Ok(report(&verify::run_all(), format)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    let (out, code) = match result {
        Ok(o) => {
            let code = if o.ok { 0 } else { 1 };
            (o.text, code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            return ExitCode::from(1);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, out) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{out}"),
    }
    ExitCode::from(code)
}
