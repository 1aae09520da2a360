//! Command-line driver: build an instance, run the verification suite, emit
//! dimension tables and Gram matrices.
//!
//! Exit codes: 0 on success, 1 if any internal consistency check fails,
//! 2 on invalid input.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use steinberg::bn::BnProvider;
use steinberg::fields::{is_prime, CoeffField, FieldDesc};
use steinberg::gg::{gram_rank_mod, steinberg_gram_matrix, verify_suite, VerifyOptions};
use steinberg::report::FactorReport;

/// Instances are restricted to desk scale.
const MAX_INDEX_GB: u64 = 1000;

#[derive(Parser)]
#[command(
    name = "steinberg",
    version,
    about = "Exact Steinberg/Gelfand-Graev module computations for GL_n(q) and SL_2(q)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the per-character dimension table with a check summary.
    Table(InstanceArgs),
    /// Run every named consistency check and print one line per check.
    Verify(InstanceArgs),
    /// Export the integer Gram matrix of the Steinberg basis and its rank mod l.
    Gram(InstanceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Group {
    Gl,
    Sl2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct InstanceArgs {
    /// Group family.
    #[arg(long, value_enum, default_value = "gl")]
    group: Group,
    /// Matrix rank n (sl2 requires n = 2).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Structure field order q, a prime power.
    #[arg(long)]
    q: u64,
    /// Coefficient characteristic l, a prime different from char(F_q).
    #[arg(long)]
    ell: u64,
    /// Coefficient extension degree: "auto" for the minimal one, or an
    /// explicit integer m with l^m = 1 mod p.
    #[arg(long, default_value = "auto")]
    ext: String,
    /// Characters to include in the output: "all" or comma-separated indices.
    #[arg(long, default_value = "all")]
    sigma: String,
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    out: OutFormat,
    /// Write the output to a file instead of stdout.
    #[arg(long)]
    out_path: Option<PathBuf>,
}

struct Instance {
    provider: BnProvider,
    cf: CoeffField,
    sigma_filter: Option<Vec<usize>>,
}

fn fail_input(msg: String) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(2)
}

/// Factor a prime power; `None` if `q` is not one.
fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut f = 0;
    let mut rest = q;
    while rest > 1 {
        if !rest.is_multiple_of(p) {
            return None;
        }
        rest /= p;
        f += 1;
    }
    is_prime(p).then_some((p, f))
}

fn flag_count(q: u64, n: usize) -> u64 {
    (1..=n)
        .map(|i| (0..i).map(|e| q.saturating_pow(e as u32)).sum::<u64>())
        .fold(1u64, |acc, x| acc.saturating_mul(x))
}

fn build_instance(args: &InstanceArgs) -> Result<Instance, String> {
    let (p, f) = prime_power(args.q).ok_or(format!("q = {} is not a prime power", args.q))?;
    if args.n < 2 {
        return Err(format!("n must be at least 2, got {}", args.n));
    }
    if args.group == Group::Sl2 && args.n != 2 {
        return Err(format!("sl2 requires n = 2, got {}", args.n));
    }
    if !is_prime(args.ell) {
        return Err(format!("ell = {} is not prime", args.ell));
    }
    if args.ell == p {
        return Err(format!(
            "ell = {} equals the structure characteristic p = {}; |U| 1_k would vanish",
            args.ell, p
        ));
    }
    if flag_count(args.q, args.n) > MAX_INDEX_GB {
        return Err(format!(
            "[G:B] = {} exceeds the desk-scale limit {}",
            flag_count(args.q, args.n),
            MAX_INDEX_GB
        ));
    }
    let fd = FieldDesc::new(p, f).map_err(|e| e.to_string())?;
    let provider = match args.group {
        Group::Gl => BnProvider::gl(&fd, args.n),
        Group::Sl2 => BnProvider::sl2(&fd),
    }
    .map_err(|e| e.to_string())?;
    let cf = if args.ext == "auto" {
        CoeffField::new(p, args.ell).map_err(|e| e.to_string())?
    } else {
        let m: u32 = args
            .ext
            .parse()
            .map_err(|_| format!("--ext must be \"auto\" or a positive integer, got {:?}", args.ext))?;
        CoeffField::with_extension(p, args.ell, m).map_err(|e| e.to_string())?
    };
    let sigma_filter = if args.sigma == "all" {
        None
    } else {
        let count = steinberg::gg::expected_regular_count(&provider) as usize;
        let mut indices = Vec::new();
        for part in args.sigma.split(',') {
            let idx: usize = part
                .trim()
                .parse()
                .map_err(|_| format!("--sigma must be \"all\" or comma-separated indices, got {:?}", args.sigma))?;
            if idx >= count {
                return Err(format!(
                    "sigma index {} out of range: instance has {} regular characters",
                    idx, count
                ));
            }
            indices.push(idx);
        }
        Some(indices)
    };
    Ok(Instance { provider, cf, sigma_filter })
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match path {
        None => {
            print!("{}", content);
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
        Some(p) => std::fs::write(p, content).map_err(|e| e.to_string()),
    }
}

/// Restrict the report's character table to the requested indices.
fn apply_sigma_filter(report: &mut FactorReport, filter: &Option<Vec<usize>>) {
    if let Some(indices) = filter {
        report.sigmas =
            indices.iter().map(|&i| report.sigmas[i].clone()).collect();
    }
}

fn render_table_text(report: &FactorReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "group {} n={} q={} (p={}, f={})  coefficients l={} m={}\n",
        report.group, report.n, report.q, report.p, report.f, report.ell, report.m
    ));
    let passed = report.checks.iter().filter(|c| c.pass).count();
    out.push_str(&format!(
        "[G:B] = {}   dim St = {}   checks {}/{} passed\n",
        report.index_gb,
        report.dim_st,
        passed,
        report.checks.len()
    ));
    out.push_str("sigma  params        dim_S  dim_D  orbit\n");
    for (i, s) in report.sigmas.iter().enumerate() {
        let params = format!("{:?}", s.params);
        out.push_str(&format!(
            "{:<6} {:<13} {:<6} {:<6} {}\n",
            i, params, s.dim_s, s.dim_d, s.orbit
        ));
    }
    for c in report.failed_checks() {
        out.push_str(&format!("FAILED {}: {}\n", c.name, c.witness));
    }
    out
}

fn render_table_csv(report: &FactorReport) -> String {
    let mut out = String::from("group,n,q,ell,m,index_GB,dim_St,sigma,params,dim_S,dim_D,orbit,all_checks_pass\n");
    let all_pass = report.all_passed();
    for (i, s) in report.sigmas.iter().enumerate() {
        let params: Vec<String> = s.params.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            report.group,
            report.n,
            report.q,
            report.ell,
            report.m,
            report.index_gb,
            report.dim_st,
            i,
            params.join(";"),
            s.dim_s,
            s.dim_d,
            s.orbit,
            all_pass
        ));
    }
    out
}

fn render_verify_text(report: &FactorReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        out.push_str(&format!(
            "{} {:<32} {}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.witness
        ));
    }
    let passed = report.checks.iter().filter(|c| c.pass).count();
    out.push_str(&format!("{}/{} checks passed\n", passed, report.checks.len()));
    out
}

fn report_json(report: &FactorReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn run_report_command(args: &InstanceArgs, verify_style: bool) -> ExitCode {
    let instance = match build_instance(args) {
        Ok(i) => i,
        Err(msg) => return fail_input(msg),
    };
    let report = match verify_suite(&instance.provider, &instance.cf, &VerifyOptions::default()) {
        Ok(r) => r,
        Err(e) => return fail_input(e.to_string()),
    };
    let mut shown = report.clone();
    apply_sigma_filter(&mut shown, &instance.sigma_filter);
    let content = match (args.out, verify_style) {
        (OutFormat::Json, _) => report_json(&shown),
        (OutFormat::Text, false) => render_table_text(&shown),
        (OutFormat::Text, true) => render_verify_text(&shown),
        (OutFormat::Csv, _) => render_table_csv(&shown),
    };
    if let Err(msg) = write_output(&args.out_path, &content) {
        return fail_input(msg);
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_gram(args: &InstanceArgs) -> ExitCode {
    let instance = match build_instance(args) {
        Ok(i) => i,
        Err(msg) => return fail_input(msg),
    };
    let gram = steinberg_gram_matrix(&instance.provider);
    let rank = gram_rank_mod(&instance.cf, &gram);
    let size = gram.len();
    let content = match args.out {
        OutFormat::Json => {
            let value = serde_json::json!({
                "group": match instance.provider.kind() {
                    steinberg::bn::GroupKind::GeneralLinear => "gl",
                    steinberg::bn::GroupKind::SpecialLinear2 => "sl2",
                },
                "n": instance.provider.n(),
                "q": instance.provider.q(),
                "ell": instance.cf.ell(),
                "size": size,
                "entries": gram,
                "rank_mod_ell": rank,
            });
            let mut s = serde_json::to_string_pretty(&value).expect("gram serializes");
            s.push('\n');
            s
        }
        OutFormat::Text | OutFormat::Csv => {
            // Labeled CSV; rows and columns carry the U-enumeration indices.
            let mut out = String::from("u");
            for j in 0..size {
                out.push_str(&format!(",{}", j));
            }
            out.push('\n');
            for (i, row) in gram.iter().enumerate() {
                out.push_str(&i.to_string());
                for v in row {
                    out.push_str(&format!(",{}", v));
                }
                out.push('\n');
            }
            out.push_str(&format!("# rank mod {} = {}\n", instance.cf.ell(), rank));
            out
        }
    };
    if let Err(msg) = write_output(&args.out_path, &content) {
        return fail_input(msg);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Table(args) => run_report_command(args, false),
        Command::Verify(args) => run_report_command(args, true),
        Command::Gram(args) => run_gram(args),
    }
}
