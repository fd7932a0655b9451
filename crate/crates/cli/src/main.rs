use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mkr_core::acceptance::{run_all, run_one};
use mkr_core::chow::{all_multi_indices, degree_simplicial};
use mkr_core::fy::Flavor;
use mkr_core::json::{
    class_from_json, class_to_json, exponents_from_json, int_to_json, matroid_from_json, matroid_to_json,
    multi_index_from_json, multi_index_to_json, snapper_to_json, zeta_to_json, ClassRing,
};
use mkr_core::kring::{omega_class, serre_check, MatroidRings};
use mkr_core::m0n::{m0n_context, m0n_euler_oracle, presentation_check, snap_m0n, snap_psi};
use mkr_core::matroid::{boolean, elements, fano, graphic, graphic_k4, reduced_char_poly, uniform, Matroid, Subset};
use mkr_core::snapper::{snap_fy, snap_fy_from_ring, snap_simplicial};
use num_bigint::BigInt;
use serde_json::{json, Value};

/// Ground sets above this size need --force.
const MAX_DEFAULT_GROUND: usize = 8;
/// Boolean matroids above this size need --force for augmented rings.
const MAX_DEFAULT_BOOLEAN_AUG: usize = 5;

#[derive(Parser)]
#[command(name = "mkr", version, about = "Exact Chow rings and K-rings of matroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Skip the size guards.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List the flats by rank.
    Flats(MatroidArgs),
    /// Reduced characteristic polynomial and its absolute coefficients.
    Charpoly(MatroidArgs),
    /// Ranks of the Chow and K-rings.
    RingInfo(RingArgs),
    /// Degree of a monomial in the simplicial or FY generators.
    Degree {
        #[command(flatten)]
        ring: RingArgs,
        /// Simplicial multi-index, e.g. '{"E": 2}'.
        #[arg(long, conflicts_with = "x")]
        h: Option<String>,
        /// FY multi-index.
        #[arg(long)]
        x: Option<String>,
    },
    /// Euler characteristic of a K-class.
    Euler {
        #[command(flatten)]
        ring: RingArgs,
        /// Simplicial multi-index m for η^m.
        #[arg(long, conflicts_with_all = ["class", "line"])]
        eta: Option<String>,
        /// A K-class in the JSON class format.
        #[arg(long, conflicts_with = "line")]
        class: Option<String>,
        /// Line bundle exponents {flat: a_F}.
        #[arg(long)]
        line: Option<String>,
    },
    /// Snapper polynomial in the rising-factorial basis.
    Snapper {
        #[command(flatten)]
        ring: RingArgs,
        /// The FY Snapper polynomial instead of the simplicial one.
        #[arg(long)]
        fy: bool,
        /// Compare every coefficient with the ring.
        #[arg(long)]
        verify: bool,
    },
    /// The exceptional isomorphism as an integer matrix.
    Zeta(RingArgs),
    /// Serre duality on every K-basis element.
    Serre(RingArgs),
    /// M̄₀,ₙ through the braid matroid.
    M0n {
        #[arg(long)]
        n: usize,
        /// Cerberus multi-index over subsets of {0..n−2}.
        #[arg(long, conflicts_with = "psi")]
        index: Option<String>,
        /// ψ exponents a_1..a_n, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<String>,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Run one criterion only.
        #[arg(long)]
        criterion: Option<u8>,
        /// Include timings.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Args, Clone)]
struct MatroidArgs {
    /// uniform, boolean, graphic, graphic-k4 or fano.
    #[arg(long, conflicts_with = "matroid_file")]
    family: Option<String>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    vertices: Option<usize>,
    /// Edges as "0-1,1-2" or a JSON list of pairs.
    #[arg(long)]
    edges: Option<String>,
    /// JSON matroid file.
    #[arg(long)]
    matroid_file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RingArgs {
    #[command(flatten)]
    matroid: MatroidArgs,
    /// plain or aug.
    #[arg(long, default_value = "plain")]
    flavor: Flavor,
    /// Largest total degree enumerated by --verify.
    #[arg(long)]
    max_degree: Option<usize>,
}

enum CliError {
    Invalid(String),
    Compute(mkr_core::Error),
    /// A check ran and failed.
    Failed(String),
    /// Input exceeds the size guards.
    TooLarge(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Failed(m) => write!(f, "check failed: {m}"),
            CliError::TooLarge(m) => write!(f, "combinatorial explosion: {m}; pass --force to run anyway"),
        }
    }
}

impl From<mkr_core::Error> for CliError {
    fn from(e: mkr_core::Error) -> Self {
        match e {
            mkr_core::Error::Parse(_)
            | mkr_core::Error::InvalidParameters(_)
            | mkr_core::Error::EmptyBasisSet
            | mkr_core::Error::UnequalBasisSizes { .. }
            | mkr_core::Error::ExchangeAxiomViolation { .. }
            | mkr_core::Error::NotAFlat(_)
            | mkr_core::Error::LoopyMatroid(_)
            | mkr_core::Error::WrongTotalDegree { .. } => CliError::Invalid(e.to_string()),
            e => CliError::Compute(e),
        }
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Invalid(_) => "invalid_input",
            CliError::Compute(_) => "computation",
            CliError::Failed(_) => "check_failed",
            CliError::TooLarge(_) => "combinatorial_explosion",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn parse_json(text: &str, what: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| invalid(format!("{what}: {e}")))
}

fn parse_edges(text: &str) -> CliResult<Vec<(usize, usize)>> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| invalid(format!("edges: {e}")));
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair.split_once('-').ok_or_else(|| invalid(format!("edge {pair:?} is not a-b")))?;
            let p = |s: &str| s.trim().parse::<usize>().map_err(|_| invalid(format!("bad vertex in {pair:?}")));
            Ok((p(a)?, p(b)?))
        })
        .collect()
}

fn load_matroid(args: &MatroidArgs) -> CliResult<Matroid> {
    if let Some(path) = &args.matroid_file {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        return Ok(matroid_from_json(&parse_json(&text, "matroid file")?)?);
    }
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| invalid(format!("--{name} is required")));
    let family = args.family.as_deref().ok_or_else(|| invalid("give --family or --matroid-file"))?;
    Ok(match family {
        "uniform" => uniform(need(args.r, "r")?, need(args.n, "n")?)?,
        "boolean" => boolean(need(args.n, "n")?)?,
        "graphic" => {
            let edges = parse_edges(args.edges.as_deref().ok_or_else(|| invalid("--edges is required"))?)?;
            let vertices = args
                .vertices
                .unwrap_or_else(|| edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0));
            graphic(vertices, &edges)?
        }
        "graphic-k4" | "k4" => graphic_k4(),
        "fano" => fano(),
        other => return Err(invalid(format!("unknown family {other:?}"))),
    })
}

fn guard(m: &Matroid, flavor: Option<Flavor>, force: bool) -> CliResult<()> {
    if force {
        return Ok(());
    }
    let n = m.ground_size();
    if n > MAX_DEFAULT_GROUND {
        return Err(CliError::TooLarge(format!("ground set of size {n} exceeds {MAX_DEFAULT_GROUND}")));
    }
    if flavor == Some(Flavor::Augmented) && m.rank() == n && n > MAX_DEFAULT_BOOLEAN_AUG {
        return Err(CliError::TooLarge(format!(
            "augmented rings of boolean({n}) exceed boolean({MAX_DEFAULT_BOOLEAN_AUG})"
        )));
    }
    Ok(())
}

fn rings(args: &RingArgs, force: bool) -> CliResult<MatroidRings> {
    let m = load_matroid(&args.matroid)?;
    guard(&m, Some(args.flavor), force)?;
    Ok(MatroidRings::new(&m, args.flavor)?)
}

fn flat_text(m: &Matroid, f: Subset) -> String {
    if f == m.ground() {
        "E".into()
    } else {
        format!("{:?}", elements(f))
    }
}

/// Output of a subcommand: human text and JSON.
struct Report {
    text: String,
    json: Value,
}

fn run(cli: &Cli) -> CliResult<Report> {
    let force = cli.force;
    match &cli.command {
        Command::Flats(args) => {
            let m = load_matroid(args)?;
            guard(&m, None, force)?;
            let lat = m.lattice()?;
            let mut text = String::new();
            let mut by_rank = Vec::new();
            for r in 0..=m.rank() {
                let flats: Vec<Subset> = lat.by_rank(r).iter().map(|&i| lat.flat(i)).collect();
                text += &format!(
                    "rank {r}: {}\n",
                    flats.iter().map(|&f| format!("{:?}", elements(f))).collect::<Vec<_>>().join(" ")
                );
                by_rank.push(flats.iter().map(|&f| elements(f)).collect::<Vec<_>>());
            }
            text += &format!("{} flats", lat.len());
            Ok(Report {
                text,
                json: json!({"matroid": matroid_to_json(&m), "count": lat.len(), "by_rank": by_rank}),
            })
        }
        Command::Charpoly(args) => {
            let m = load_matroid(args)?;
            guard(&m, None, force)?;
            let coeffs = reduced_char_poly(&m)?;
            let mu = mkr_core::matroid::char_poly_mu(&m)?.mu;
            Ok(Report {
                text: format!("reduced characteristic polynomial (highest power first): {coeffs:?}\nmu: {mu:?}"),
                json: json!({"reduced": coeffs, "mu": mu}),
            })
        }
        Command::RingInfo(args) => {
            let r = rings(args, force)?;
            let graded = r.chow.graded_ranks();
            Ok(Report {
                text: format!(
                    "flavor {}\nChow rank {} graded {:?}\nK rank {}\nzeta built from {} simplicial monomials, det {}",
                    args.flavor,
                    r.chow.rank(),
                    graded,
                    r.k.rank(),
                    r.zeta_monomials,
                    r.zeta.determinant()
                ),
                json: json!({
                    "flavor": args.flavor,
                    "chow_rank": r.chow.rank(),
                    "chow_graded_ranks": graded,
                    "k_rank": r.k.rank(),
                    "zeta_determinant": int_to_json(&r.zeta.determinant()),
                }),
            })
        }
        Command::Degree { ring, h, x } => {
            let r = rings(ring, force)?;
            let m = r.matroid().clone();
            let n = m.ground_size();
            match (h, x) {
                (Some(h), _) => {
                    let idx = multi_index_from_json(&parse_json(h, "--h")?, n)?;
                    let ring_deg = r.chow.degree(&r.chow.h_monomial(&idx)?)?;
                    let formula = degree_simplicial(&m, &idx, ring.flavor)?;
                    let agree = ring_deg == BigInt::from(formula);
                    let out = Report {
                        text: format!("degree {ring_deg} (combinatorial formula {formula})"),
                        json: json!({"index": multi_index_to_json(&idx), "degree": int_to_json(&ring_deg), "formula": formula}),
                    };
                    if agree {
                        Ok(out)
                    } else {
                        Err(CliError::Failed(out.text))
                    }
                }
                (None, Some(x)) => {
                    let idx = multi_index_from_json(&parse_json(x, "--x")?, n)?;
                    let d = r.chow.degree(&r.chow.t_monomial(&idx)?)?;
                    Ok(Report {
                        text: format!("degree {d}"),
                        json: json!({"index": multi_index_to_json(&idx), "degree": int_to_json(&d)}),
                    })
                }
                (None, None) => Err(invalid("give --h or --x")),
            }
        }
        Command::Euler { ring, eta, class, line } => {
            let r = rings(ring, force)?;
            let n = r.matroid().ground_size();
            let xi = if let Some(eta) = eta {
                r.k.eta_monomial(&multi_index_from_json(&parse_json(eta, "--eta")?, n)?)?
            } else if let Some(class) = class {
                class_from_json(ClassRing::K(&r.k), &parse_json(class, "--class")?)?
            } else if let Some(line) = line {
                let a: BTreeMap<Subset, i64> = exponents_from_json(&parse_json(line, "--line")?, n)?;
                r.k.line_bundle_class(&a)?
            } else {
                return Err(invalid("give --eta, --class or --line"));
            };
            let chi = r.euler_char(&xi)?;
            Ok(Report {
                text: chi.to_string(),
                json: json!({"chi": int_to_json(&chi), "class": class_to_json(ClassRing::K(&r.k), &xi)}),
            })
        }
        Command::Snapper { ring, fy, verify } => snapper(ring, *fy, *verify, force),
        Command::Zeta(args) => {
            let r = rings(args, force)?;
            let det = r.zeta.determinant();
            Ok(Report {
                text: format!(
                    "zeta: {}x{} integer matrix, det {det}\n{}",
                    r.zeta.matrix.len(),
                    r.zeta.matrix.len(),
                    r.zeta
                        .matrix
                        .iter()
                        .map(|row| row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
                        .collect::<Vec<_>>()
                        .join("\n")
                ),
                json: zeta_to_json(&r),
            })
        }
        Command::Serre(args) => {
            let r = rings(args, force)?;
            let omega = omega_class(&r.k)?;
            let d = r.k.duality_operator()?;
            let (mut with, mut without) = (0, 0);
            for j in 0..r.k.rank() {
                let rep = serre_check(&r, &r.k.ring().basis_element(j), &omega, &d)?;
                with += usize::from(rep.holds_with_omega());
                without += usize::from(rep.holds_without_omega());
            }
            let total = r.k.rank();
            let text = format!(
                "chi(xi) = (-1)^dim chi(omega D xi): {with}/{total} basis elements\nchi(xi) = (-1)^dim chi(D xi): {without}/{total} basis elements"
            );
            let json = json!({
                "flavor": args.flavor,
                "basis_size": total,
                "with_omega": with,
                "without_omega": without,
                "omega": class_to_json(ClassRing::K(&r.k), &omega),
            });
            if args.flavor == Flavor::Plain && with != total {
                return Err(CliError::Failed(text));
            }
            Ok(Report { text, json })
        }
        Command::M0n { n, index, psi } => m0n(*n, index.as_deref(), psi.as_deref()),
        Command::Selftest { seed, criterion, timings } => {
            let results = match criterion {
                Some(c) => vec![run_one(*c, *seed)?],
                None => run_all(*seed),
            };
            let passed = results.iter().filter(|r| r.passed).count();
            let mut text: Vec<String> = results
                .iter()
                .map(|r| if *timings { format!("{} [{:.1} s]", r.line(), r.seconds) } else { r.line() })
                .collect();
            text.push(format!("{passed}/{} criteria passed", results.len()));
            let json = Value::Array(
                results
                    .iter()
                    .map(|r| {
                        let mut v = json!({"id": r.id, "title": r.title, "passed": r.passed, "detail": r.detail});
                        if *timings {
                            v["seconds"] = json!(r.seconds);
                        }
                        v
                    })
                    .collect(),
            );
            let text = text.join("\n");
            if passed == results.len() {
                Ok(Report { text, json })
            } else {
                print_report(&Report { text, json }, cli.json);
                Err(CliError::Failed(format!("{} criteria failed", results.len() - passed)))
            }
        }
    }
}

fn snapper(args: &RingArgs, fy: bool, verify: bool, force: bool) -> CliResult<Report> {
    let m = load_matroid(&args.matroid)?;
    if fy && args.flavor == Flavor::Augmented {
        return Err(invalid("the FY Snapper polynomial is defined for the plain flavor"));
    }
    guard(&m, Some(args.flavor), force)?;
    let poly = if fy { snap_fy(&m)? } else { snap_simplicial(&m, args.flavor)? };
    let mut text = format!("{} terms\n", poly.terms.len());
    for (idx, c) in &poly.terms {
        let mono: Vec<String> = idx.pairs().iter().map(|&(f, e)| format!("a_{}^({e})", flat_text(&m, f))).collect();
        let mono = if mono.is_empty() { "1".to_string() } else { mono.join(" ") };
        text += &format!("{c:>+4} {mono}\n");
    }
    let mut json = snapper_to_json(&poly);
    if verify {
        let rings = MatroidRings::new(&m, args.flavor)?;
        let mismatches = if fy {
            let ring = snap_fy_from_ring(&rings)?;
            let keys: std::collections::BTreeSet<_> = poly.terms.keys().chain(ring.terms.keys()).collect();
            keys.into_iter().filter(|k| poly.coeff(k) != ring.coeff(k)).count()
        } else {
            let flats: Vec<Subset> = m.lattice()?.flats()[1..].to_vec();
            let hi = args.max_degree.unwrap_or(rings.chow.top_degree() + 1);
            let mut bad = 0;
            for idx in all_multi_indices(&flats, 0, hi) {
                if poly.coeff(&idx) != rings.euler_char(&rings.k.eta_monomial(&idx)?)? {
                    bad += 1;
                }
            }
            bad
        };
        json["verified"] = json!(mismatches == 0);
        if mismatches > 0 {
            return Err(CliError::Failed(format!("{mismatches} coefficients differ from the ring oracle")));
        }
        text += "all coefficients match ring oracle";
    }
    Ok(Report {
        text: text.trim_end().to_string(),
        json,
    })
}

fn m0n(n: usize, index: Option<&str>, psi: Option<&str>) -> CliResult<Report> {
    if let Some(psi) = psi {
        let a: Vec<i64> = psi
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| invalid(format!("bad exponent {t:?}"))))
            .collect::<CliResult<_>>()?;
        let v = snap_psi(n, &a)?;
        return Ok(Report {
            text: v.to_string(),
            json: json!({"n": n, "a": a, "snap_psi": int_to_json(&v)}),
        });
    }
    let ctx = m0n_context(n)?;
    let snap = snap_m0n(&ctx);
    if let Some(index) = index {
        let m = multi_index_from_json(&parse_json(index, "--index")?, n - 1)?;
        let rings = MatroidRings::new(ctx.braid(), Flavor::Plain)?;
        let coeff = snap.coeff(&m);
        let oracle = m0n_euler_oracle(&ctx, &rings, &m)?;
        let text = format!("coefficient {coeff}, braid chi {oracle}");
        if coeff != oracle {
            return Err(CliError::Failed(text));
        }
        return Ok(Report {
            text,
            json: json!({"index": multi_index_to_json(&m), "coefficient": int_to_json(&coeff), "chi": int_to_json(&oracle)}),
        });
    }
    let rings = MatroidRings::new(ctx.braid(), Flavor::Plain)?;
    let rep = presentation_check(&ctx, &rings.chow, &rings.k)?;
    let text = format!(
        "n = {n}: {} Cerberus indices; presentation quotient rank {} graded {:?}; relation failures chow {} k {}; image ranks chow {} k {}",
        snap.terms.len(),
        rep.quotient_rank,
        rep.quotient_graded_ranks,
        rep.chow_relation_failures,
        rep.k_relation_failures,
        rep.chow_image_rank,
        rep.k_image_rank
    );
    if !rep.passed() {
        return Err(CliError::Failed(text));
    }
    Ok(Report {
        text,
        json: json!({
            "n": n,
            "cerberus": snapper_to_json(&snap),
            "quotient_graded_ranks": rep.quotient_graded_ranks,
            "presentation_passed": rep.passed(),
        }),
    })
}

/// Write errors (a closed pipe) are ignored.
fn print_report(r: &Report, as_json: bool) {
    let text = if as_json {
        serde_json::to_string_pretty(&r.json).expect("values serialize")
    } else {
        r.text.clone()
    };
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn configure_threads() {
    if let Some(n) = std::env::var("MKR_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Ignore the error if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            print_report(&r, cli.json);
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(std::io::stdout().lock(), "{}", json!({"error": {"kind": e.kind(), "message": e.to_string()}}));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}
