//! Command-line front end. stdout carries machine JSON only; diagnostics go
//! to stderr.
//!
//! Exit codes: 0 success, 1 output failure, 2 malformed input, 3 domain error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{fmt_rational, Q};
use crate::charge::{central_charge, StabilityPoint};
use crate::enumeration::{effective_candidates, enumerate_bounded, EnumerationBudget};
use crate::hall::{FormalPoly, ITable, RatFunc};
use crate::invariants::{
    chamber_constancy_check, compare_j_jhat, j_alpha, jhat_alpha, jhat_candidates, large_volume_candidates,
    large_volume_threshold, wall_cross_check, CrossOptions, CrossReport,
};
use crate::io::{self, IoError};
use crate::lattice::{MukaiVector, NsLattice, RationalDivisor};
use crate::svg;
use crate::walls::{classify_point, compute_walls, SliceRegion, WallOptions, WallSet};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] IoError),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Domain(String),
    #[error("write failed: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => 1,
            CliError::Input(IoError::Lattice(_)) | CliError::Domain(_) => 3,
            CliError::Usage(_) | CliError::Input(_) | CliError::Read { .. } => 2,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "k3stab", version, about = "Exact stability data, walls and wall-crossing invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Central charge of a class and its phase in the heart.
    Charge(PointArgs),
    /// Classes with |Z|^2 at most the budget, sorted.
    Enumerate {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        budget: String,
    },
    /// Walls for a class in a rectangle of the slice.
    Walls {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// J at two points of one chamber.
    Chamber {
        #[command(flatten)]
        slice: SliceArgs,
        /// `b,t`; give exactly two.
        #[arg(long = "at", required = true)]
        at: Vec<String>,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Cross one wall (by index) or all of them.
    Cross {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long, default_value = "all")]
        wall: String,
        #[arg(long)]
        max_len: Option<usize>,
        #[command(flatten)]
        table: TableArgs,
    },
    /// J at a stability point.
    Jalpha {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Jhat at the omega of the point; beta is ignored.
    Jhat {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Large-volume threshold and the J/Jhat comparison; beta is ignored.
    Largevolume {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        table: TableArgs,
        /// Comparison scale; defaults to the threshold.
        #[arg(long)]
        k: Option<String>,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    /// JSON `{"gram": [[..]], "epsilon": 1}`, inline or a file.
    #[arg(long)]
    lattice: String,
    /// JSON `{"beta": [..], "omega": [..]}`, inline or a file.
    #[arg(long)]
    point: String,
    /// JSON `{"r": .., "l": [..], "s": ..}`.
    #[arg(long)]
    class: String,
}

#[derive(Args, Debug)]
struct SliceArgs {
    #[arg(long)]
    lattice: String,
    #[arg(long)]
    class: String,
    /// `b0,b1,t0,t1`
    #[arg(long)]
    region: String,
    /// Direction of beta; defaults to the first basis divisor.
    #[arg(long)]
    bdir: Option<String>,
    /// Direction of omega; defaults to the first basis divisor.
    #[arg(long)]
    wdir: Option<String>,
    #[arg(long, default_value_t = WallOptions::default().max_destabilizers)]
    max_destabilizers: usize,
    /// Also add walls between pairs of destabilizers.
    #[arg(long)]
    pairwise: bool,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// JSON `{"entries": [{"class": .., "value": ".."}]}`; without it every class gets a formal symbol.
    #[arg(long)]
    itable: Option<String>,
    /// Random integer values in [-9, 9] instead of formal symbols.
    #[arg(long)]
    seed: Option<u64>,
    /// Include per-decomposition weights.
    #[arg(long)]
    provenance: bool,
}

/// Runs one invocation and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn text_or_file(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|source| CliError::Read { path: PathBuf::from(arg), source })
}

fn lattice(arg: &str) -> Result<NsLattice, CliError> {
    Ok(io::lattice_from_json(&text_or_file(arg)?)?)
}

fn class(arg: &str, l: &NsLattice) -> Result<MukaiVector, CliError> {
    let v = io::class_from_json(arg)?;
    if v.l.len() != l.rank() {
        return Err(CliError::Usage(format!("class {v} does not match the lattice rank {}", l.rank())));
    }
    Ok(v)
}

fn rationals(arg: &str, n: usize, what: &str) -> Result<Vec<Q>, CliError> {
    let xs: Vec<Q> = arg.split(',').map(io::parse_rat).collect::<Result<_, _>>()?;
    if xs.len() != n {
        return Err(CliError::Usage(format!("{what} needs {n} comma-separated rationals")));
    }
    Ok(xs)
}

fn point(a: &PointArgs) -> Result<(NsLattice, StabilityPoint, MukaiVector), CliError> {
    let l = lattice(&a.lattice)?;
    let (beta, omega) = io::point_from_json(&text_or_file(&a.point)?)?;
    let v = class(&a.class, &l)?;
    let p = StabilityPoint::new(&l, beta, omega).map_err(domain)?;
    Ok((l, p, v))
}

fn direction(arg: &Option<String>, l: &NsLattice) -> Result<RationalDivisor, CliError> {
    match arg {
        Some(s) => Ok(io::divisor_from_value(&serde_json::from_str(s).map_err(IoError::from)?)?),
        None => {
            let mut e = vec![0; l.rank()];
            e[0] = 1;
            Ok(RationalDivisor::from_ints(&e))
        }
    }
}

fn wall_set(a: &SliceArgs, err: &mut dyn Write) -> Result<(NsLattice, WallSet), CliError> {
    let l = lattice(&a.lattice)?;
    let alpha = class(&a.class, &l)?;
    let r = rationals(&a.region, 4, "--region")?;
    let region = SliceRegion::new(
        &l,
        direction(&a.bdir, &l)?,
        direction(&a.wdir, &l)?,
        (r[0].clone(), r[1].clone()),
        (r[2].clone(), r[3].clone()),
    )
    .map_err(domain)?;
    let opts = WallOptions { max_destabilizers: a.max_destabilizers, pairwise: a.pairwise, ..WallOptions::default() };
    let ws = compute_walls(&l, &region, &alpha, &opts).map_err(domain)?;
    writeln!(
        err,
        "{} walls, {} destabilizers, mass bound {}{}",
        ws.walls.len(),
        ws.destabilizers.len(),
        fmt_rational(&ws.mass_bound),
        if ws.conservative { " (conservative)" } else { "" }
    )?;
    Ok((l, ws))
}

/// Table from `--itable`, else seeded integers or formal symbols on `classes`.
fn table(a: &TableArgs, classes: &[MukaiVector]) -> Result<ITable, CliError> {
    if let Some(t) = &a.itable {
        return Ok(io::itable_from_json(&text_or_file(t)?)?);
    }
    Ok(match a.seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            classes
                .iter()
                .map(|v| (v.clone(), FormalPoly::from(RatFunc::integer(rng.gen_range(-9..=9)))))
                .collect()
        }
        None => ITable::formal(classes),
    })
}

fn pair_json(p: &(Q, Q)) -> Value {
    json!([io::rat(&p.0), io::rat(&p.1)])
}

fn cross_json(index: usize, r: &CrossReport, provenance: bool) -> Value {
    let mut o = json!({
        "index": index,
        "vi": io::class_to_json(&r.wall.0),
        "vj": io::class_to_json(&r.wall.1),
        "site": {
            "b": r.site.point.b.to_string(),
            "t": r.site.point.t.to_string(),
            "left": pair_json(&r.site.left),
            "right": pair_json(&r.site.right),
        },
        "degenerate": r.degenerate,
        "scope": io::classes_to_json(&r.scope),
        "epsilon_invariant": r.epsilon_invariant,
        "j_left": r.j_left.to_string(),
        "j_right": r.j_right.to_string(),
        "equal": r.equal,
    });
    if provenance {
        for (key, side) in [("left", &r.left), ("right", &r.right)] {
            o[key] = side.as_ref().map_or(Value::Null, |s| io::report_to_json(s, true));
        }
    }
    o
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(out, "{v}")?;
    Ok(())
}

fn untwisted(p: &StabilityPoint, err: &mut dyn Write) -> Result<RationalDivisor, CliError> {
    if p.beta().0.iter().any(|x| *x != Q::from_integer(0.into())) {
        writeln!(err, "note: beta is ignored here")?;
    }
    Ok(p.omega().clone())
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Charge(a) => {
            let (_, p, v) = point(&a)?;
            emit(out, &io::charge_to_json(&p, &v).map_err(domain)?)
        }
        Command::Enumerate { point: a, budget } => {
            let (_, p, _) = point(&a)?;
            let m = io::parse_rat(&budget)?;
            let e = enumerate_bounded(&p, &EnumerationBudget::new(m)).map_err(domain)?;
            if e.truncated {
                writeln!(err, "warning: enumeration was truncated by a hard cap")?;
            }
            emit(out, &io::classes_to_json(&e.classes))
        }
        Command::Walls { slice, svg, grid } => {
            let (_, ws) = wall_set(&slice, err)?;
            if let Some(path) = svg {
                let polys: Vec<_> = ws.walls.iter().map(|w| w.poly.clone()).collect();
                write_file(&path, &svg::render(&polys, &ws.region, grid))?;
            }
            emit(out, &io::walls_to_json(&ws.walls))
        }
        Command::Chamber { slice, at, table: ta } => {
            if at.len() != 2 {
                return Err(CliError::Usage("--at must be given exactly twice".into()));
            }
            let (l, ws) = wall_set(&slice, err)?;
            let pts: Vec<(Q, Q)> = at
                .iter()
                .map(|s| rationals(s, 2, "--at").map(|x| (x[0].clone(), x[1].clone())))
                .collect::<Result<_, _>>()?;
            let mut classes = BTreeSet::new();
            for (b, t) in &pts {
                let s = ws.region.point(&l, b, t).map_err(domain)?;
                classes.extend(effective_candidates(&s, &ws.alpha).map_err(domain)?);
            }
            let classes: Vec<_> = classes.into_iter().collect();
            let itable = table(&ta, &classes)?;
            let r = chamber_constancy_check(&l, &ws.region, &ws.walls, &pts[0], &pts[1], &ws.alpha, &itable)
                .map_err(domain)?;
            let fp = classify_point(&ws.walls, &pts[0].0, &pts[0].1);
            emit(
                out,
                &json!({
                    "fingerprint": fp.0,
                    "constant": r.constant,
                    "same_candidates": r.same_candidates,
                    "aligned_pairs_proportional": r.aligned_pairs_proportional,
                    "j0": io::report_to_json(&r.j0, ta.provenance),
                    "j1": io::report_to_json(&r.j1, ta.provenance),
                }),
            )
        }
        Command::Cross { slice, wall, max_len, table: ta } => {
            let (l, ws) = wall_set(&slice, err)?;
            let indices: Vec<usize> = if wall == "all" {
                (0..ws.walls.len()).collect()
            } else {
                let i: usize = wall.parse().map_err(|_| CliError::Usage(format!("bad wall index {wall:?}")))?;
                if i >= ws.walls.len() {
                    return Err(domain(format!("wall index {i} out of range ({} walls)", ws.walls.len())));
                }
                vec![i]
            };
            let given = if ta.itable.is_some() || ta.seed.is_some() {
                let mut cls: Vec<MukaiVector> = ws.destabilizers.iter().chain(&ws.parallel).cloned().collect();
                cls.push(ws.alpha.clone());
                cls.sort();
                cls.dedup();
                Some(table(&ta, &cls)?)
            } else {
                None
            };
            let opts = CrossOptions { max_len, ..CrossOptions::default() };
            let mut reports = Vec::new();
            for &i in &indices {
                let r = wall_cross_check(&l, &ws, i, given.as_ref(), &opts).map_err(domain)?;
                if !r.equal {
                    writeln!(err, "wall {i}: invariance fails")?;
                }
                reports.push(cross_json(i, &r, ta.provenance));
            }
            if wall == "all" {
                emit(out, &Value::Array(reports))
            } else {
                emit(out, &reports.remove(0))
            }
        }
        Command::Jalpha { point: a, table: ta } => {
            let (_, p, v) = point(&a)?;
            let cands = effective_candidates(&p, &v).map_err(domain)?;
            let itable = table(&ta, &cands)?;
            let r = j_alpha(&p, &v, &itable).map_err(domain)?;
            emit(out, &io::report_to_json(&r, ta.provenance))
        }
        Command::Jhat { point: a, table: ta } => {
            let (l, p, v) = point(&a)?;
            let omega = untwisted(&p, err)?;
            let cands = jhat_candidates(&l, &omega, &v).map_err(domain)?;
            let itable = table(&ta, &cands)?;
            let r = jhat_alpha(&l, &omega, &v, &itable).map_err(domain)?;
            emit(out, &io::report_to_json(&r, ta.provenance))
        }
        Command::Largevolume { point: a, table: ta, k } => {
            let (l, p, v) = point(&a)?;
            let omega = untwisted(&p, err)?;
            let cands = large_volume_candidates(&l, &omega, &v).map_err(domain)?;
            let lv = large_volume_threshold(&l, &v, &omega, &cands).map_err(domain)?;
            let k = match k {
                Some(s) => io::parse_rat(&s)?,
                None => lv.threshold.clone(),
            };
            let pk = StabilityPoint::new(&l, RationalDivisor::zero(l.rank()), omega.scale(&k)).map_err(domain)?;
            let mut classes: BTreeSet<MukaiVector> = jhat_candidates(&l, &omega, &v).map_err(domain)?.into_iter().collect();
            if !central_charge(&pk, &v).is_zero() {
                classes.extend(effective_candidates(&pk, &v).map_err(domain)?);
            }
            let classes: Vec<_> = classes.into_iter().collect();
            let itable = table(&ta, &classes)?;
            let cmp = compare_j_jhat(&l, &omega, &v, &itable, &itable, &k).map_err(domain)?;
            let verdicts: Vec<Value> = lv
                .verdicts
                .iter()
                .map(|pv| {
                    json!({
                        "vi": io::class_to_json(&pv.vi),
                        "vj": io::class_to_json(&pv.vj),
                        "p_equal": pv.p_equal,
                        "aligned": pv.aligned,
                    })
                })
                .collect();
            emit(
                out,
                &json!({
                    "alpha": io::class_to_json(&lv.alpha),
                    "omega": io::divisor_to_json(&lv.omega),
                    "threshold": io::rat(&lv.threshold),
                    "samples": lv.samples.iter().map(io::rat).collect::<Vec<_>>(),
                    "consistent": lv.consistent,
                    "pairs": verdicts,
                    "compare": {
                        "k": io::rat(&cmp.k),
                        "same_decompositions": cmp.same_decompositions,
                        "equal": cmp.equal,
                        "j": io::report_to_json(&cmp.j, ta.provenance),
                        "jhat": io::report_to_json(&cmp.jhat, ta.provenance),
                    },
                }),
            )
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)?;
    Ok(())
}
