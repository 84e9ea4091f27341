use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use orlicz_approx::bestapprox::en_sequence;
use orlicz_approx::config::{ConfigFile, FunctionSpec, PsiSpec};
use orlicz_approx::psi::{classify, psi_derivative, psi_integral, ClassifyOptions, PsiSequence};
use orlicz_approx::smoothness::{modulus, ModulusQuery};
use orlicz_approx::theorems::{self, fmt_num, ReportFormat, Verdict};
use orlicz_approx::weights::{ap_constant, IntervalFamily, Weight};
use orlicz_approx::{Error, PeriodicFunction, Result};

const EXIT_GROWING: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_HYPOTHESIS: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "orlicz-approx", version, about = "Approximation in weighted Orlicz spaces")]
struct Cli {
    /// JSON experiment config
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report files
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random corpora and random A_p intervals
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Quadrature nodes
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Default)]
struct SpaceArgs {
    /// Young function, e.g. "power 2"
    #[arg(long)]
    young: Option<String>,
    /// Weight, e.g. "abs-power 0.5 3.14159"
    #[arg(long)]
    weight: Option<String>,
    /// Function family, e.g. "harmonic 1"
    #[arg(long)]
    function: Option<String>,
}

#[derive(Args, Default)]
struct PsiArgs {
    /// Psi family, e.g. "power 2"
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Luxemburg and Amemiya norms of a function
    Norm(SpaceArgs),
    /// Best approximation errors E_1..E_n
    En {
        n_max: usize,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Psi-derivative of a function
    PsiDeriv {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        psi: PsiArgs,
    },
    /// Psi-integral of a function
    PsiInt {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        psi: PsiArgs,
        /// Constant term of the result
        #[arg(long)]
        a0: Option<f64>,
    },
    /// Modulus of smoothness of order r at step delta
    Modulus {
        r: usize,
        delta: f64,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Class membership of a psi sequence
    Classify {
        psi: String,
        #[arg(long, default_value_t = 1024)]
        k_max: usize,
    },
    /// A_p constant of a weight
    Ap { weight: String, p: f64 },
    /// Run the configured theorem check
    Verify,
    /// Re-read an emitted CSV report
    Report { path: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_hypothesis_failure() => EXIT_HYPOTHESIS,
        Error::Config { .. } | Error::InvalidArgument(_) | Error::Io { .. } | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

struct Ctx {
    file: ConfigFile,
    cli_seed: Option<u64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Self> {
        let mut file = match &cli.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        if let Some(g) = cli.grid {
            file.space.grid_points = g;
        }
        if let (Some(s), Some(run)) = (cli.seed, file.run.as_mut()) {
            run.seed = s;
        }
        Ok(Self {
            file,
            cli_seed: cli.seed,
            format: cli.format,
            out: cli.out.clone(),
        })
    }

    fn apply_space(&mut self, a: &SpaceArgs) {
        if let Some(y) = &a.young {
            self.file.space.young = y.clone();
        }
        if let Some(w) = &a.weight {
            self.file.space.weight = w.clone();
        }
        if let Some(f) = &a.function {
            self.file.function = Some(FunctionSpec::family(f.clone()));
        }
    }

    fn apply_psi(&mut self, a: &PsiArgs) {
        let psi = self.file.psi.get_or_insert_with(PsiSpec::default);
        if let Some(p) = &a.psi {
            psi.family = p.clone();
        }
        if let Some(b) = a.beta {
            psi.beta = b;
        }
    }

    fn function(&self) -> Result<PeriodicFunction> {
        self.file
            .function
            .as_ref()
            .ok_or_else(|| Error::Config {
                pointer: "/function".into(),
                message: "missing; pass --function or a config".into(),
            })?
            .fixed()
    }

    fn psi(&self) -> PsiSpec {
        self.file.psi.clone().unwrap_or_default()
    }

    fn emit(&self, name: &str, text: &str) -> Result<()> {
        match &self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|source| io_err(dir, source))?;
                let path = dir.join(name);
                std::fs::write(&path, text).map_err(|source| io_err(&path, source))?;
                println!("{}", path.display());
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(|source| io_err(Path::new("<stdout>"), source))?;
            }
        }
        Ok(())
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn coefficient_csv(f: &PeriodicFunction) -> String {
    let mut s = String::from("k,a,b\n");
    s.push_str(&format!("0,{},{}\n", fmt_num(2.0 * f.a0_half), fmt_num(0.0)));
    for (i, (a, b)) in f.coeffs.iter().enumerate() {
        s.push_str(&format!("{},{},{}\n", i + 1, fmt_num(*a), fmt_num(*b)));
    }
    s
}

fn function_out(ctx: &Ctx, name: &str, f: &PeriodicFunction) -> Result<()> {
    match ctx.format {
        Some(Format::Csv) => ctx.emit(&format!("{name}.csv"), &coefficient_csv(f)),
        _ => ctx.emit(&format!("{name}.json"), &json(f)?),
    }
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let mut ctx = Ctx::new(&cli)?;
    match &cli.cmd {
        Cmd::Norm(a) => {
            ctx.apply_space(a);
            let sp = ctx.file.space.build()?;
            let f = ctx.function()?;
            let lux = sp.luxemburg_norm(&f)?;
            let ame = sp.orlicz_norm(&f)?;
            let ratio = if lux > 0.0 { ame / lux } else { f64::NAN };
            println!("luxemburg {}", fmt_num(lux));
            println!("amemiya   {}", fmt_num(ame));
            println!("ratio     {}", fmt_num(ratio));
        }
        Cmd::En { n_max, space } => {
            ctx.apply_space(space);
            let sp = ctx.file.space.build()?;
            let seq = en_sequence(&sp, &ctx.function()?, *n_max)?;
            for v in &seq.violations {
                log::warn!("E_{} raw {} above E_{} = {}", v.n, v.raw, v.n - 1, v.previous);
            }
            let text = match ctx.format {
                Some(Format::Json) => json(&seq)?,
                _ => {
                    let mut s = String::from("n,e_n,iterations,converged\n");
                    for r in &seq.results {
                        s.push_str(&format!("{},{},{},{}\n", r.n, fmt_num(r.value), r.iterations, r.converged));
                    }
                    s
                }
            };
            ctx.emit("en.csv", &text)?;
        }
        Cmd::PsiDeriv { space, psi } => {
            ctx.apply_space(space);
            ctx.apply_psi(psi);
            let g = psi_derivative(&ctx.function()?, &ctx.psi().pair()?)?;
            function_out(&ctx, "psi_deriv", &g)?;
        }
        Cmd::PsiInt { space, psi, a0 } => {
            ctx.apply_space(space);
            ctx.apply_psi(psi);
            let spec = ctx.psi();
            let g = psi_integral(&ctx.function()?, &spec.pair()?, a0.unwrap_or(spec.a0));
            function_out(&ctx, "psi_int", &g)?;
        }
        Cmd::Modulus { r, delta, space } => {
            ctx.apply_space(space);
            let sp = ctx.file.space.build()?;
            let q = ModulusQuery::new(*r, *delta)?;
            println!("{}", fmt_num(modulus(&sp, &ctx.function()?, &q)?));
        }
        Cmd::Classify { psi, k_max } => {
            let seq: PsiSequence = psi
                .parse()
                .map_err(|e: Error| Error::Config { pointer: "/psi/family".into(), message: e.to_string() })?;
            let opts = ClassifyOptions {
                k_max: *k_max,
                ..Default::default()
            };
            let rep = classify(&seq, &opts)?;
            if ctx.format == Some(Format::Json) {
                ctx.emit("classify.json", &json(&rep)?)?;
            } else {
                println!("M*  {}", rep.in_mstar);
                println!("M   {}", rep.in_m);
                println!("M'  {}", rep.in_mprime());
                println!("M0  {}", rep.in_m0());
                println!("F   {}", rep.in_f());
            }
        }
        Cmd::Ap { weight, p } => {
            let w: Weight = weight
                .parse()
                .map_err(|e: Error| Error::Config { pointer: "/space/weight".into(), message: e.to_string() })?;
            let mut family = IntervalFamily::default();
            if let Some(s) = ctx.cli_seed {
                family.seed = s;
            }
            let rep = ap_constant(&w, *p, &family)?;
            if ctx.format == Some(Format::Json) {
                ctx.emit("ap.json", &json(&rep)?)?;
            } else {
                println!("p         {}", fmt_num(rep.p));
                println!("constant  {}", fmt_num(rep.constant_estimate));
                println!("intervals {}", rep.interval_count);
                println!("verdict   {}", serde_json::to_value(rep.verdict)?.as_str().unwrap_or(""));
            }
        }
        Cmd::Verify => {
            if cli.config.is_none() {
                return Err(Error::Config {
                    pointer: "/".into(),
                    message: "verify needs --config".into(),
                });
            }
            let exp = ctx.file.clone().experiment()?;
            let rep = theorems::run(&exp)?;
            let format = match ctx.format {
                Some(Format::Csv) => ReportFormat::Csv,
                Some(Format::Json) => ReportFormat::Json,
                None => ReportFormat::Both,
            };
            let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("."));
            for path in theorems::emit_report(&rep, &dir, format)? {
                log::info!("wrote {}", path.display());
            }
            let verdict = serde_json::to_value(rep.verdict)?;
            println!(
                "{} {} ratio_max {} trend {}",
                rep.theorem_id,
                verdict.as_str().unwrap_or(""),
                fmt_num(rep.ratio_max),
                fmt_num(rep.ratio_trend)
            );
            return Ok(if rep.verdict == Verdict::Bounded { 0 } else { EXIT_GROWING });
        }
        Cmd::Report { path } => {
            let rows = theorems::read_csv_file(path)?;
            if ctx.format == Some(Format::Json) {
                ctx.emit("report.json", &json(&rows)?)?;
            } else {
                let mut buf = Vec::new();
                theorems::write_csv(&rows, &mut buf)?;
                ctx.emit("report.csv", &String::from_utf8_lossy(&buf))?;
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ORLICZ_APPROX_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
