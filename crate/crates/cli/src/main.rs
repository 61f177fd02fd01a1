//! `indcalc`: validate sites, profile relations, apply operators, check
//! claims, print the ACFG instance and draw implication diagrams.
//!
//! Exit status: 0 on success, 1 when a verdict is negative (invalid site,
//! refuted claim), 2 on usage, file or cap errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use indcalc::claims::{registry, verify_claim, Claim, ClaimStatus};
use indcalc::diagram::diagram;
use indcalc::fp::acfg_bmon_failure_instance;
use indcalc::relation::{builtin_by_name, RelationFile};
use indcalc::search::{search, SearchParams, SearchReport};
use indcalc::site::validate_site;
use indcalc::{apply_expr, axiom_profile, OperatorExpr, RawSite, Site, TernaryRelation};

#[derive(Parser)]
#[command(
    name = "indcalc",
    version,
    about = "Independence-relation operators on finite closure sites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a site file and list every violation.
    Validate {
        /// Site file (same as --site).
        file: Option<PathBuf>,
        #[arg(long)]
        site: Option<PathBuf>,
    },
    /// Print the axiom profile of a relation.
    Axioms {
        #[command(flatten)]
        input: Input,
        /// Also write the profile as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply an operator expression and emit the resulting relation file.
    Apply {
        #[command(flatten)]
        input: Input,
        /// Expression over R, m, M, star, c, e.g. "star(m(R))".
        #[arg(long)]
        op: String,
        /// Where to write the relation file (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a claim on one relation, or search for counterexamples.
    Claim(ClaimArgs),
    /// Print the base-monotonicity failure of the Kim analogue.
    AcfgDemo {
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
    /// Emit the implication diagram of a relation's operator images as DOT.
    Diagram {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    /// Site file; required when --relation is a built-in name.
    #[arg(long)]
    site: Option<PathBuf>,
    /// Relation file, or a built-in name: full, empty, a-indep.
    #[arg(long)]
    relation: String,
}

#[derive(Args)]
struct ClaimArgs {
    /// Claim id (C1..C11), claim name, or "all".
    id: String,
    #[arg(long)]
    site: Option<PathBuf>,
    #[arg(long)]
    relation: Option<String>,
    /// Search generated sites and relations instead.
    #[arg(long)]
    search: bool,
    /// Ground sizes, "A..B" or "A".
    #[arg(long, default_value = "3")]
    n: String,
    /// Random relations per site.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "0.2,0.5,0.8")]
    densities: String,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for the JSON report and witness bundles.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Negative verdicts, as opposed to operational errors.
struct Negative;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_site(path: &Path) -> Result<Arc<Site>> {
    let raw: RawSite = read_json(path)?;
    Ok(Arc::new(
        Site::from_raw(&raw).with_context(|| format!("site {}", path.display()))?,
    ))
}

fn load_relation(site: Option<&Path>, relation: &str) -> Result<TernaryRelation> {
    let site = site.map(load_site).transpose()?;
    let path = Path::new(relation);
    if !path.exists() {
        let Some(site) = site else {
            bail!("{relation:?} is neither a file nor usable as a built-in without --site");
        };
        return builtin_by_name(&site, relation).ok_or_else(|| anyhow!("unknown built-in relation {relation:?}"));
    }
    let file: RelationFile = read_json(path)?;
    let r = TernaryRelation::from_file(&file, path.parent()).with_context(|| format!("relation {relation}"))?;
    if let Some(site) = site {
        if **r.site() != *site {
            bail!("relation {relation} lives on a different site than --site");
        }
    }
    Ok(r)
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let parse = |x: &str| x.trim().parse::<usize>().with_context(|| format!("bad --n {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

fn parse_densities(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|d| d.trim().parse::<f64>().with_context(|| format!("bad density {d:?}")))
        .collect()
}

fn select_claims(id: &str) -> Result<Vec<Claim>> {
    if id == "all" {
        return Ok(registry());
    }
    Claim::find(id)
        .map(|c| vec![c])
        .ok_or_else(|| anyhow!("unknown claim {id:?}"))
}

fn validate(file: Option<PathBuf>, site: Option<PathBuf>) -> Result<Result<(), Negative>> {
    let path = file.or(site).ok_or_else(|| anyhow!("validate needs a site file"))?;
    let raw: RawSite = read_json(&path)?;
    let report = validate_site(&raw);
    println!("{}", report.to_string().trim_end());
    Ok(if report.is_valid() { Ok(()) } else { Err(Negative) })
}

fn write_bundles(dir: &Path, report: &SearchReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(&dir.join("report.json"), &report.to_json())?;
    for (i, b) in report.bundles.iter().enumerate() {
        let sub = dir.join(format!("bundle-{i}"));
        fs::create_dir_all(&sub).with_context(|| format!("creating {}", sub.display()))?;
        write_file(&sub.join("site.json"), &serde_json::to_string_pretty(&b.site)?)?;
        write_file(&sub.join("relation.json"), &serde_json::to_string_pretty(&b.relation)?)?;
        write_file(&sub.join("witness.json"), &serde_json::to_string_pretty(b)?)?;
    }
    Ok(())
}

fn claim(args: ClaimArgs) -> Result<Result<(), Negative>> {
    let claims = select_claims(&args.id)?;
    if args.search {
        if args.relation.is_some() || args.site.is_some() {
            bail!("--search generates its own sites; drop --site/--relation");
        }
        let (n_min, n_max) = parse_range(&args.n)?;
        let params = SearchParams {
            n_min,
            n_max,
            samples: args.samples,
            densities: parse_densities(&args.densities)?,
            seed: args.seed,
            jobs: args.jobs,
            ..Default::default()
        };
        let report = search(&claims, &params)?;
        print!("{}", report.render_text());
        if let Some(dir) = &args.out {
            write_bundles(dir, &report)?;
        }
        return Ok(if report.refutations() == 0 {
            Ok(())
        } else {
            Err(Negative)
        });
    }
    let relation = args
        .relation
        .as_deref()
        .ok_or_else(|| anyhow!("claim needs --relation (and --site for built-ins) or --search"))?;
    let r = load_relation(args.site.as_deref(), relation)?;
    let mut refuted = false;
    let mut verdicts = Vec::new();
    for c in &claims {
        let v = verify_claim(c, &r);
        let finding = if c.external_proof && v.is_refuted() {
            " (external-proof finding)"
        } else {
            ""
        };
        println!("{v}{finding}");
        refuted |= matches!(v.status, ClaimStatus::Refuted(_));
        verdicts.push(v);
    }
    if let Some(path) = &args.out {
        write_file(path, &serde_json::to_string_pretty(&verdicts)?)?;
    }
    Ok(if refuted { Err(Negative) } else { Ok(()) })
}

fn run(cli: Cli) -> Result<Result<(), Negative>> {
    match cli.command {
        Command::Validate { file, site } => validate(file, site),
        Command::Axioms { input, out } => {
            let r = load_relation(input.site.as_deref(), &input.relation)?;
            let profile = axiom_profile(&r);
            print!("{}", profile.render_table());
            if let Some(path) = out {
                write_file(&path, &serde_json::to_string_pretty(&profile.to_json())?)?;
            }
            Ok(Ok(()))
        }
        Command::Apply { input, op, out } => {
            let r = load_relation(input.site.as_deref(), &input.relation)?;
            let expr: OperatorExpr = op.parse()?;
            let img = apply_expr(&expr, &r, indcalc::operators::DEFAULT_DEPTH_CAP)?;
            // inline site: the output stands alone
            let file = img.to_file(true, None)?;
            let text = serde_json::to_string_pretty(&file)? + "\n";
            match out {
                Some(path) => {
                    write_file(&path, &text)?;
                    println!("{}: {} true triples", img.name(), file.true_triples.len());
                }
                None => print!("{text}"),
            }
            Ok(Ok(()))
        }
        Command::Claim(args) => claim(args),
        Command::AcfgDemo { p } => {
            let report = acfg_bmon_failure_instance(p)?;
            print!("{report}");
            Ok(if report.shows_bmon_failure() {
                Ok(())
            } else {
                Err(Negative)
            })
        }
        Command::Diagram { input, out } => {
            let r = load_relation(input.site.as_deref(), &input.relation)?;
            let dot = diagram(&r)?.to_dot(r.name());
            match out {
                Some(path) => write_file(&path, &dot)?,
                None => print!("{dot}"),
            }
            Ok(Ok(()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Negative)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
