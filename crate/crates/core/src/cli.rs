//! Command-line driver. `run` returns the process exit code: 0 on success,
//! 1 when a bank fails verification, 2 on usage or input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cascade::{export_grid, sample_psi, subdivide_phi};
use crate::design::{parametrize, Constraints, FamilyFile};
use crate::dual::{build_dual_bank, DualOptions, FirstPair};
use crate::error::{Error, Result};
use crate::io::{parse_rational, read_filter, render_pretty, write_filter, Bank, BankFile, BankMetadata};
use crate::lattice::DilationContext;
use crate::laurent::{Filter, Point, SupportBox};
use crate::moments::{report, Order, DEFAULT_CAP};
use crate::quasitight::build_quasitight;
use crate::smoothness::{sm2_estimate, Sm2Method, Sm2Options};
use crate::symmetry::{detect_symmetry, SymmetryGroup, SymmetryReport, SymmetryType};
use crate::verify::{verify_dual, verify_quasitight, BankReport};

#[derive(Parser, Debug)]
#[command(name = "framelet", version, about = "Interpolatory dual and quasi-tight framelet filter banks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moment, symmetry and interpolation report for one filter.
    Analyze {
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        dilation: String,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Build an interpolatory dual framelet bank from a primal/dual pair.
    Dual {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        ta: PathBuf,
        #[arg(long)]
        dilation: String,
        #[arg(long)]
        n1: u32,
        #[arg(long)]
        n2: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        merge_proportional: bool,
        #[arg(long, value_enum, default_value_t = FirstPairArg::Standard)]
        first_pair: FirstPairArg,
        #[arg(long)]
        group: Option<String>,
    },
    /// Build a quasi-tight framelet bank from an interpolatory filter.
    Qt {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        dilation: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        group: Option<String>,
    },
    /// Exact verification of a bank file.
    Verify {
        #[arg(long)]
        bank: PathBuf,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Sobolev smoothness estimate of the refinable function.
    Sm2 {
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        dilation: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Eig)]
        method: MethodArg,
        #[arg(long, default_value_t = 12)]
        max_n: u32,
        #[arg(long)]
        cross_check: bool,
        #[arg(long)]
        json: bool,
    },
    /// Parametrize all filters on a box meeting the constraints.
    Design(DesignArgs),
    /// Pick a member of a designed family.
    Instantiate {
        #[arg(long)]
        family: PathBuf,
        /// Comma-separated rationals, one per free parameter.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        params: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample refinable functions and framelets by the cascade algorithm.
    Render {
        #[arg(long)]
        bank: PathBuf,
        #[arg(long)]
        levels: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

#[derive(Args, Debug)]
struct DesignArgs {
    /// Box as "s1:t1,s2:t2".
    #[arg(long, allow_hyphen_values = true)]
    support: String,
    #[arg(long)]
    dilation: String,
    #[arg(long)]
    sr: u32,
    #[arg(long)]
    interpolatory: bool,
    /// Group and center, e.g. "D4@0,0".
    #[arg(long, allow_hyphen_values = true)]
    sym: Option<String>,
    #[arg(long)]
    antisymmetric: bool,
    /// Points whose coefficients become the parameters, e.g. "0,3" or "-2,-3;0,-3".
    #[arg(long, allow_hyphen_values = true)]
    coords: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FirstPairArg {
    Standard,
    Flipped,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Eig,
    Norm,
}

#[derive(Serialize)]
struct AnalyzeReport {
    dilation: String,
    normalized: bool,
    interpolatory: bool,
    sum_rules: Order,
    vanishing_moments: Order,
    linear_phase_moments: Order,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry: Option<SymmetryReport>,
}

fn show(o: Order) -> String {
    match o {
        Order::Exact(n) => n.to_string(),
        Order::AtLeast(n) => format!(">= {n}"),
    }
}

fn parse_group(s: Option<&str>, dim: usize) -> Result<Option<SymmetryGroup>> {
    s.map(|g| SymmetryGroup::parse(g, dim)).transpose()
}

fn parse_list<T>(s: &str, sep: char, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(sep).filter(|x| !x.trim().is_empty()).map(|x| f(x.trim())).collect()
}

fn parse_int(s: &str) -> Result<i64> {
    s.parse().map_err(|_| Error::Parse(format!("bad integer '{s}'")))
}

fn parse_point(s: &str) -> Result<Point> {
    parse_list(s, ',', parse_int)
}

fn parse_box(s: &str) -> Result<SupportBox> {
    let ranges = parse_list(s, ',', |r| {
        let (lo, hi) = r
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad range '{r}', expected s:t")))?;
        Ok((parse_int(lo.trim())?, parse_int(hi.trim())?))
    })?;
    Ok(SupportBox::new(
        ranges.iter().map(|r| r.0).collect(),
        ranges.iter().map(|r| r.1).collect(),
    ))
}

fn print_report(r: &BankReport, json: bool) -> Result<()> {
    if json {
        println!("{}", render_pretty(&serde_json::to_value(r)?));
    } else {
        print!("{}", r.to_text());
    }
    Ok(())
}

fn analyze(filter: &Path, dilation: &str, group: Option<&str>, json: bool) -> Result<i32> {
    let ctx = DilationContext::parse(dilation)?;
    let f = read_filter(filter)?;
    if f.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch(f.dim(), ctx.dim()));
    }
    let m = report(&f, Some(&ctx), DEFAULT_CAP);
    let symmetry = parse_group(group, ctx.dim())?
        .and_then(|g| detect_symmetry(&f, &g, &[]))
        .map(|t| SymmetryReport::from(&t));
    let r = AnalyzeReport {
        dilation: ctx.matrix().to_string(),
        normalized: f.is_normalized(),
        interpolatory: ctx.is_interpolatory(&f),
        sum_rules: m.sr.expect("context supplied"),
        vanishing_moments: m.vmo,
        linear_phase_moments: m.lpm,
        symmetry,
    };
    if json {
        println!("{}", render_pretty(&serde_json::to_value(&r)?));
    } else {
        println!("dilation: {}", r.dilation);
        println!("normalized: {}", r.normalized);
        println!("interpolatory: {}", r.interpolatory);
        println!("sr: {}", show(r.sum_rules));
        println!("vmo: {}", show(r.vanishing_moments));
        println!("lpm: {}", show(r.linear_phase_moments));
        match &r.symmetry {
            Some(s) => println!("symmetry: ({}, ({}), {:+})", s.group, s.center.join(", "), s.sign),
            None => println!("symmetry: none found"),
        }
    }
    Ok(0)
}

fn verify(path: &Path, group: Option<&str>, json: bool) -> Result<i32> {
    let file = BankFile::load(path)?;
    let ctx = DilationContext::new(file.dilation()?)?;
    let group = parse_group(group.or(file.metadata.group.as_deref()), ctx.dim())?;
    let r = match file.bank()? {
        Bank::Dual { a, ta, bs, tbs } => verify_dual(&ctx, &a, &ta, &bs, &tbs, group.as_ref())?,
        Bank::QuasiTight { a, bs, eps } => verify_quasitight(&ctx, &a, &bs, &eps, group.as_ref())?,
    };
    print_report(&r, json)?;
    Ok(if r.all_ok() { 0 } else { 1 })
}

fn design(args: &DesignArgs) -> Result<i32> {
    let ctx = DilationContext::parse(&args.dilation)?;
    let bx = parse_box(&args.support)?;
    let symmetry = match &args.sym {
        None => None,
        Some(s) => {
            let (g, c) = s
                .split_once('@')
                .ok_or_else(|| Error::Parse(format!("bad symmetry '{s}', expected GROUP@c1,c2")))?;
            let group = SymmetryGroup::parse(g, ctx.dim())?;
            let center = parse_list(c, ',', parse_rational)?;
            if center.len() != ctx.dim() {
                return Err(Error::DimensionMismatch(center.len(), ctx.dim()));
            }
            Some(SymmetryType::new(group, center, if args.antisymmetric { -1 } else { 1 }))
        }
    };
    let c = Constraints {
        sum_rules: args.sr,
        interpolatory: args.interpolatory,
        symmetry,
    };
    let mut fam = parametrize(&bx, &ctx, &c)?;
    if let Some(coords) = &args.coords {
        fam = fam.reparametrize(&parse_list(coords, ';', parse_point)?)?;
    }
    std::fs::write(&args.out, render_pretty(&serde_json::to_value(fam.to_file())?) + "\n")?;
    println!("family dimension: {}", fam.dimension());
    Ok(0)
}

fn instantiate(family: &Path, params: &str, out: &Path) -> Result<i32> {
    let file: FamilyFile = serde_json::from_str(&std::fs::read_to_string(family)?)?;
    let fam = file.to_family()?;
    let f = fam.instantiate(&parse_list(params, ',', parse_rational)?)?;
    write_filter(out, &f, None)?;
    Ok(0)
}

fn render(bank: &Path, levels: u32, out: &Path, format: &str) -> Result<i32> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be at least 1".into()));
    }
    if format != "csv" && format != "json" {
        return Err(Error::UnsupportedFormat(format.to_string()));
    }
    let file = BankFile::load(bank)?;
    let ctx = DilationContext::new(file.dilation()?)?;
    std::fs::create_dir_all(out)?;
    let bank = file.bank()?;
    let mut sides: Vec<(&str, &Filter, &[Filter])> = vec![("", bank.a(), bank.bs())];
    if let Bank::Dual { ta, tbs, .. } = &bank {
        sides.push(("t", ta, tbs));
    }
    for (prefix, a, bs) in sides {
        let phi = subdivide_phi(a, &ctx, levels)?;
        export_grid(&phi, out.join(format!("{prefix}phi.{format}")), format)?;
        let coarse = subdivide_phi(a, &ctx, levels - 1)?;
        for (i, b) in bs.iter().enumerate() {
            let psi = sample_psi(b, &coarse, &ctx)?;
            export_grid(&psi, out.join(format!("{prefix}psi_{}.{format}", i + 1)), format)?;
        }
    }
    Ok(0)
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Analyze {
            filter,
            dilation,
            group,
            json,
        } => analyze(&filter, &dilation, group.as_deref(), json),
        Command::Dual {
            a,
            ta,
            dilation,
            n1,
            n2,
            out,
            merge_proportional,
            first_pair,
            group,
        } => {
            let ctx = DilationContext::parse(&dilation)?;
            let opts = DualOptions {
                first_pair: match first_pair {
                    FirstPairArg::Standard => FirstPair::Standard,
                    FirstPairArg::Flipped => FirstPair::Flipped,
                },
                merge_proportional,
                ..DualOptions::default()
            };
            let bank = build_dual_bank(&read_filter(a)?, &read_filter(ta)?, &ctx, n1, n2, &opts)?;
            let meta = BankMetadata {
                n1: Some(n1),
                n2: Some(n2),
                group,
                origins: bank.origins.iter().map(|o| o.to_string()).collect(),
                ..BankMetadata::default()
            };
            let n = bank.len();
            let b = Bank::Dual {
                a: bank.a,
                ta: bank.ta,
                bs: bank.bs,
                tbs: bank.tbs,
            };
            BankFile::new(&b, ctx.matrix(), meta).save(&out)?;
            println!("wrote {n} high-pass pairs to {}", out.display());
            Ok(0)
        }
        Command::Qt {
            a,
            dilation,
            m,
            out,
            group,
        } => {
            let ctx = DilationContext::parse(&dilation)?;
            let bank = build_quasitight(&read_filter(a)?, &ctx, m)?;
            let meta = BankMetadata {
                m: Some(m),
                group,
                origins: bank.origins.iter().map(|o| o.to_string()).collect(),
                ..BankMetadata::default()
            };
            let n = bank.len();
            let b = Bank::QuasiTight {
                a: bank.a,
                bs: bank.bs,
                eps: bank.eps,
            };
            BankFile::new(&b, ctx.matrix(), meta).save(&out)?;
            println!("wrote {n} high-pass filters to {}", out.display());
            Ok(0)
        }
        Command::Verify { bank, group, json } => verify(&bank, group.as_deref(), json),
        Command::Sm2 {
            filter,
            dilation,
            method,
            max_n,
            cross_check,
            json,
        } => {
            let ctx = DilationContext::parse(&dilation)?;
            let opts = Sm2Options {
                method: match method {
                    MethodArg::Eig => Sm2Method::Eig,
                    MethodArg::Norm => Sm2Method::Norm,
                },
                cross_check,
                max_n,
            };
            let e = sm2_estimate(&read_filter(filter)?, &ctx, &opts)?;
            if json {
                println!("{}", render_pretty(&serde_json::to_value(&e)?));
            } else {
                println!("sm2: {:.4}", e.sm2);
                println!("sr: {}", e.sum_rule_order);
                println!("sm_inf in [{:.4}, {:.4}]", e.sm_inf_lower, e.sm_inf_upper);
                if let Some(o) = e.other_method {
                    println!("other method: {o:.4}");
                }
                for w in &e.warnings {
                    println!("warning: {w}");
                }
            }
            Ok(0)
        }
        Command::Design(args) => design(&args),
        Command::Instantiate { family, params, out } => instantiate(&family, &params, &out),
        Command::Render {
            bank,
            levels,
            out,
            format,
        } => render(&bank, levels, &out, &format),
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
