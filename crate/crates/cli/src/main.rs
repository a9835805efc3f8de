use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use setfam::frankl::{f_biased, f_uniform, frankl_mu, frankl_size};
use setfam::generate::{random_increasing, random_increasing_t_intersecting, random_uniform};
use setfam::io::{
    parse_family, parse_set_list, render_decomposition, render_family, render_search, render_trace, render_uniform, set_text,
    FamilyFile,
};
use setfam::measures::{measure_report, mu_p};
use setfam::regularity::{
    gen_paired_random, intersection_witness, max_slice_deviation, potential, regularity_decompose, DecomposeParams,
};
use setfam::scalar::fmt_f64;
use setfam::search::{max_forbidden, max_t_intersecting, SearchOptions};
use setfam::shadows::{biased_cross_bounds_audit, iterated_shadow};
use setfam::shifting::{compress_to, shift, stability_pipeline, PipelineParams, StopReason};
use setfam::{Bias, Error, Result, UniformFamily};

#[derive(Parser)]
#[command(name = "setfam", version, about = "Intersecting families of sets: measures, searches and audits")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel operations.
    #[arg(long, global = true, env = "SETFAM_THREADS")]
    threads: Option<usize>,
    /// Read every bias as an exact fraction.
    #[arg(long, global = true)]
    exact: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// μ_p of a family.
    Measure {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        p: String,
    },
    /// Influence of every coordinate and the total.
    Influence {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        p: String,
    },
    /// Sizes and measures of the Frankl families, and the best r.
    Frankl {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        r: Option<usize>,
        /// Uniform setting.
        #[arg(long, conflicts_with = "p")]
        k: Option<usize>,
        /// Biased setting.
        #[arg(long)]
        p: Option<String>,
    },
    /// Largest t-intersecting k-uniform family.
    Fmax(SearchArgs),
    /// Largest k-uniform family with no intersection of size t - 1.
    Gmax(SearchArgs),
    /// One shift `S_ij`, or a full compression towards `--coord`.
    Shift {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, conflicts_with_all = ["i", "j"])]
        coord: Option<usize>,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value = "1/2")]
        p: String,
    },
    /// Compress-and-increase loop ending in a junta.
    Pipeline {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        t: usize,
        /// Influence scale of the stop rule.
        #[arg(long)]
        c: f64,
        #[arg(long)]
        zeta: f64,
        /// Stop once at most `t + 2r` coordinates remain.
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    /// Iterated lower shadow of a uniform family.
    Shadow {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 1)]
        s: usize,
    },
    /// Biased bounds for a cross-intersecting pair.
    CrossAudit {
        /// Given twice: `--family A --family B`.
        #[arg(long, required = true)]
        family: Vec<PathBuf>,
        #[arg(long)]
        p: String,
    },
    /// Potential on a coordinate set, and the worst slice deviation.
    Potential {
        #[arg(long)]
        family: PathBuf,
        /// Coordinate set, e.g. `1,3`.
        #[arg(long, default_value = "-")]
        set: String,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Regularity decomposition with its post-condition audit.
    Decompose {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        zeta: f64,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        h: usize,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
    },
    /// First pair with intersection of size t - 1.
    Witness {
        /// Given twice: `--family A --family B`.
        #[arg(long, required = true)]
        family: Vec<PathBuf>,
        #[arg(long)]
        t: usize,
    },
    /// Seeded random family.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Density of the uniform generator.
        #[arg(long, default_value = "0.5")]
        p: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: usize,
    /// Search only shifted families.
    #[arg(long)]
    shifted: bool,
    /// Also count isomorphism classes of optima.
    #[arg(long)]
    all_optima: bool,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_secs: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Uniform,
    Increasing,
    Intersecting,
    Paired,
}

fn read_family(path: &Path) -> Result<FamilyFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    parse_family(&text).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn read_uniform(path: &Path) -> Result<UniformFamily> {
    let file = read_family(path)?;
    let k = file.k.ok_or_else(|| Error::input(format!("{}: expected a uniform family", path.display())))?;
    UniformFamily::new(file.n, k, file.family.iter())
}

fn read_pair(paths: &[PathBuf]) -> Result<(FamilyFile, FamilyFile)> {
    let [a, b] = paths else {
        return Err(Error::input("pass exactly two families with --family"));
    };
    let (a, b) = (read_family(a)?, read_family(b)?);
    if a.n != b.n {
        return Err(Error::input("both families need the same ground set"));
    }
    Ok((a, b))
}

fn bias(text: &str, exact: bool) -> Result<Bias> {
    if exact {
        Bias::parse_exact(text)
    } else {
        text.parse()
    }
}

fn search_options(a: &SearchArgs) -> Result<SearchOptions> {
    let max_time = match a.budget_secs {
        Some(s) if !(s.is_finite() && s >= 0.0) => return Err(Error::input("--budget-secs must be non-negative")),
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let base = if a.shifted { SearchOptions::shifted() } else { SearchOptions::default() };
    Ok(SearchOptions { max_nodes: a.budget_nodes, max_time, all_optima: a.all_optima, ..base })
}

fn run(cli: &Cli) -> Result<String> {
    let exact = cli.exact;
    let mut out = String::new();
    match &cli.cmd {
        Cmd::Measure { family, p } => {
            let f = read_family(family)?;
            let p = bias(p, exact)?;
            p.check_open_unit()?;
            let _ = writeln!(out, "{}", mu_p(&f.family, &p));
        }
        Cmd::Influence { family, p } => {
            let f = read_family(family)?;
            let p = bias(p, exact)?;
            p.check_open_unit()?;
            let rep = measure_report(&f.family, &p);
            let _ = writeln!(out, "mu {}", rep.mu);
            for (i, v) in rep.influences.iter().enumerate() {
                let _ = writeln!(out, "influence {} {v}", i + 1);
            }
            let _ = writeln!(out, "total {}", rep.total_influence);
        }
        Cmd::Frankl { n, t, r, k, p } => match (k, p) {
            (Some(k), _) => {
                if k > n {
                    return Err(Error::input(format!("k = {k} exceeds n = {n}")));
                }
                let (best, rs) = f_uniform(*n, *k, *t)?;
                if let Some(r) = r {
                    let _ = writeln!(out, "size {}", frankl_size(*n, *k, *t, *r));
                }
                let _ = writeln!(out, "f {best}");
                let _ = writeln!(out, "r {}", join(&rs));
            }
            (None, Some(p)) => {
                let p = bias(p, exact)?;
                if let Some(r) = r {
                    let _ = writeln!(out, "mu {}", frankl_mu(*t, *r, &p));
                }
                let best = f_biased(*n, &p, *t)?;
                let _ = writeln!(out, "f {}", best.value);
                let _ = writeln!(out, "r {}", join(&best.rs));
            }
            (None, None) => return Err(Error::input("frankl needs --k or --p")),
        },
        Cmd::Fmax(a) => out = render_search(&max_t_intersecting(a.n, a.k, a.t, &search_options(a)?)?),
        Cmd::Gmax(a) => out = render_search(&max_forbidden(a.n, a.k, a.t, &search_options(a)?)?),
        Cmd::Shift { family, i, j, coord, t, p } => {
            let f = read_family(family)?;
            match (i, j, coord) {
                (Some(i), Some(j), None) => out = render_family(&shift(&f.family, *i, *j)?),
                (None, None, Some(c)) => out = render_trace(&compress_to(&f.family, *c, *t, &bias(p, exact)?)?),
                _ => return Err(Error::input("shift needs either --i and --j, or --coord")),
            }
        }
        Cmd::Pipeline { family, p, t, c, zeta, r } => {
            let f = read_family(family)?;
            let prm = PipelineParams {
                p: bias(p, exact)?,
                t: *t,
                c: *c,
                zeta: *zeta,
                coord_threshold: t + 2 * r,
                max_iterations: None,
            };
            let o = stability_pipeline(&f.family, &prm)?;
            let stop = match o.stop {
                StopReason::FewCoordinates => "few-coordinates",
                StopReason::LargeInfluences => "large-influences",
            };
            let _ = writeln!(out, "iterations {}", o.iterations);
            let _ = writeln!(out, "stop {stop}");
            let _ = writeln!(out, "coords {}", join(&o.coords));
            let _ = writeln!(out, "mu_before {}", mu_p(&f.family, &prm.p));
            let _ = writeln!(out, "mu_after {}", mu_p(&o.trace.family, &prm.p));
            out.push_str(&render_trace(&o.trace));
        }
        Cmd::Shadow { family, s } => out = render_uniform(&iterated_shadow(&read_uniform(family)?, *s)?),
        Cmd::CrossAudit { family, p } => {
            let (a, b) = read_pair(family)?;
            let p = bias(p, false)?.to_f64();
            let rep = biased_cross_bounds_audit(&a.family, &b.family, p)?;
            let _ = writeln!(out, "mu_f {}", fmt_f64(rep.mu_f));
            let _ = writeln!(out, "mu_g {}", fmt_f64(rep.mu_g));
            let _ = writeln!(out, "power_bound {}", fmt_f64(rep.power_bound));
            let _ = writeln!(out, "power_holds {}", rep.power_holds);
            let _ = writeln!(out, "power_equality {}", rep.power_equality);
            let _ = writeln!(out, "half_sum {}", setfam::Value::Exact(rep.half_sum.clone()));
            let _ = writeln!(out, "half_holds {}", rep.half_holds);
        }
        Cmd::Potential { family, set, h, delta } => {
            let f = read_uniform(family)?;
            let j = parse_set_list(set, f.n())?;
            let _ = writeln!(out, "phi {}", fmt_f64(potential(&f, j)?));
            if let Some(h) = h {
                let (dev, at) = max_slice_deviation(&f, *h)?;
                let _ = writeln!(out, "max_deviation {}", fmt_f64(dev));
                if let Some((jj, b)) = at {
                    let _ = writeln!(out, "worst {} {}", set_text(jj), set_text(b));
                }
                if let Some(d) = delta {
                    let _ = writeln!(out, "quasirandom {}", dev <= *d);
                }
            }
        }
        Cmd::Decompose { family, zeta, delta, h, eps } => {
            let f = read_uniform(family)?;
            let prm = DecomposeParams { zeta: *zeta, delta: *delta, h: *h, eps: *eps };
            let d = regularity_decompose(&f, &prm)?;
            d.audit(&f, &prm)?;
            out = render_decomposition(&d);
            out.push_str("audit pass\n");
        }
        Cmd::Witness { family, t } => {
            let (a, b) = read_pair(family)?;
            if *t == 0 {
                return Err(Error::input("t must be at least 1"));
            }
            match intersection_witness(&a.family, &b.family, *t) {
                Some((x, y)) => {
                    let _ = writeln!(out, "a {}", set_text(x));
                    let _ = writeln!(out, "b {}", set_text(y));
                }
                None => out.push_str("none\n"),
            }
        }
        Cmd::Gen { kind, n, k, t, p, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let need_k = || k.ok_or_else(|| Error::input("this generator needs --k"));
            out = match kind {
                GenKind::Uniform => {
                    let density = bias(p, false)?.to_f64();
                    render_uniform(&random_uniform(*n, need_k()?, density, &mut rng)?)
                }
                GenKind::Increasing => render_family(&random_increasing(*n, &mut rng)?),
                GenKind::Intersecting => render_family(&random_increasing_t_intersecting(*n, *t, &mut rng)?),
                GenKind::Paired => render_uniform(&gen_paired_random(*n, *seed)?),
            };
        }
    }
    Ok(out)
}

fn join<T: ToString>(xs: &[T]) -> String {
    if xs.is_empty() {
        return "-".to_string();
    }
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::resource(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
