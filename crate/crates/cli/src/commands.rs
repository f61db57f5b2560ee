use num_rational::BigRational;
use serde_json::{json, Value};

use twofold::density::{gap_probe, limit_probe, wsp_witnesses, write_probe_csv, Anchor};
use twofold::dimension::{ladder, solve_dim, DimResult};
use twofold::ifs::{Address, IntervalCover, SetTag, SimilaritySystem, Word};
use twofold::numeric::{parse_rational, Interval};
use twofold::represent::{addr_to_altsum, order_violation_witness, transport, AltSumRep, OrderSearch};
use twofold::scan::{
    box_dim_estimate, default_scales, middle_thirds, scan_square, slice_scan, write_cells_csv, CellStatus, Domain,
    ScanBudget,
};
use twofold::tfcert::{check_tf, rational_json, Summary, SCHEMA_VERSION};
use twofold::{Caps, Error, Interval64, Params, Rational, Scalar};

use crate::{Cli, Command, ParamArgs};

pub enum Output {
    Json(Value),
    Text(String),
}

pub struct Outcome {
    pub output: Output,
    /// A budget ran out before every question was settled.
    pub exhausted: bool,
}

impl Outcome {
    fn done(output: Output) -> Self {
        Outcome { output, exhausted: false }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ExponentCap { .. } | Error::DepthCap { .. } | Error::InsufficientPrecision(_) | Error::Unresolved => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Run = Result<Outcome, Failure>;

pub fn run(cli: &Cli) -> Run {
    if cli.float {
        dispatch::<Interval64>(cli)
    } else {
        dispatch::<Rational>(cli)
    }
}

fn rational(text: &str) -> Result<BigRational, Failure> {
    Ok(parse_rational(text)?)
}

fn params<S: Scalar>(args: &ParamArgs) -> Result<Params<S>, Failure> {
    Ok(Params::<S>::from_rationals(&rational(&args.p)?, &rational(&args.q)?)?)
}

fn header<S: Scalar>(params: &Params<S>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "mode": params.mode(),
        "p": scalar_json(params.p()),
        "q": scalar_json(params.q()),
    })
}

/// Exact scalars as one rational; enclosures as their two bounds.
fn scalar_json<S: Scalar>(x: &S) -> Value {
    let (lo, hi) = (x.lower(), x.upper());
    if lo == hi {
        rational_json(&lo)
    } else {
        json!({ "lo": rational_json(&lo), "hi": rational_json(&hi) })
    }
}

fn float_json(x: f64) -> Value {
    BigRational::from_float(x).map_or(Value::Null, |r| rational_json(&r))
}

fn interval_json(iv: &Interval<f64>) -> Value {
    json!({ "lo": float_json(iv.lo), "hi": float_json(iv.hi) })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

fn dispatch<S: Scalar>(cli: &Cli) -> Run {
    match &cli.command {
        Command::Dim { params: a, tol, ladder } => dim::<S>(a, *tol, *ladder),
        Command::CheckTf { params: a, max_sum, depth } => check::<S>(a, *max_sum, *depth),
        Command::Scan {
            resolution,
            max_sum,
            depth,
            p_lo,
            p_hi,
            q_lo,
            q_hi,
            seeds,
            svg,
        } => {
            let domain = Domain::new((rational(p_lo)?, rational(p_hi)?), (rational(q_lo)?, rational(q_hi)?))?;
            let budget = ScanBudget { max_sum: *max_sum, depth: *depth };
            let grid = scan_square::<S>(&domain, *resolution, budget, seeds)?;
            if let Some(path) = svg {
                std::fs::write(path, grid.to_svg(4)).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            }
            let mut buf = Vec::new();
            grid.write_csv(&mut buf)?;
            Ok(Outcome {
                output: Output::Text(String::from_utf8(buf).expect("utf-8 csv")),
                exhausted: grid.cells.iter().any(|c| c.status == CellStatus::Undecided),
            })
        }
        Command::Slice {
            p,
            samples,
            max_sum,
            depth,
            seeds,
        } => {
            let budget = ScanBudget { max_sum: *max_sum, depth: *depth };
            let slice = slice_scan::<S>(&rational(p)?, *samples, budget, seeds)?;
            let mut buf = Vec::new();
            write_cells_csv(&slice.samples, &mut buf)?;
            Ok(Outcome {
                output: Output::Text(String::from_utf8(buf).expect("utf-8 csv")),
                exhausted: slice.samples.iter().any(|c| c.status == CellStatus::Undecided),
            })
        }
        Command::WitnessWsp { params: a, count, precision } => {
            let prm = params::<S>(a)?;
            let w = wsp_witnesses(&prm, *count, *precision)?;
            let entries: Vec<Value> = w
                .entries
                .iter()
                .map(|e| {
                    let (lo, hi) = e.deviation();
                    json!({
                        "m": e.m,
                        "n": e.n,
                        "log_ratio": { "lo": rational_json(&e.log_ratio.lo), "hi": rational_json(&e.log_ratio.hi) },
                        "ratio_decimal": e.ratio(),
                        "deviation": { "lo": lo, "hi": hi },
                    })
                })
                .collect();
            let body = json!({ "witnesses": entries, "precision": w.precision });
            Ok(Outcome::done(Output::Json(merge(header(&prm), body))))
        }
        Command::WitnessOrder { params: a, p2, q2, max_exp } => {
            let prm = params::<S>(a)?;
            let target = Params::<S>::from_rationals(&rational(p2)?, &rational(q2)?)?;
            let found = order_violation_witness(&prm, &target, *max_exp)?;
            let (result, exhausted) = match found {
                OrderSearch::Found(w) => (
                    json!({
                        "kind": "Found",
                        "kl": [w.kl.0, w.kl.1],
                        "mn": [w.mn.0, w.mn.1],
                        "verified": w.verify(&prm, &target),
                    }),
                    false,
                ),
                OrderSearch::NotFound => (json!({ "kind": "NotFound" }), true),
                OrderSearch::RequiresSupArgument => (json!({ "kind": "RequiresSupArgument" }), false),
            };
            let body = json!({
                "p2": scalar_json(target.p()),
                "q2": scalar_json(target.q()),
                "max_exp": max_exp,
                "result": result,
            });
            Ok(Outcome {
                output: Output::Json(merge(header(&prm), body)),
                exhausted,
            })
        }
        Command::Transport { params: a, rep, address } => {
            let prm = params::<S>(a)?;
            let rep = match (rep, address) {
                (Some(text), _) => {
                    let v: Value = serde_json::from_str(text).map_err(|e| invalid(format!("--rep: {e}")))?;
                    AltSumRep::from_json(&v)?
                }
                (None, Some(text)) => addr_to_altsum(&text.parse::<Address>()?)?,
                (None, None) => return Err(invalid("one of --rep or --address is required")),
            };
            let value = transport(&rep, &prm);
            let body = json!({ "rep": rep.to_json(), "value": scalar_json(&value) });
            Ok(Outcome::done(Output::Json(merge(header(&prm), body))))
        }
        Command::Gap {
            params: a,
            t,
            r,
            depth,
            anchor,
            k_max,
        } => {
            let prm = params::<S>(a)?;
            let sys = SimilaritySystem::new(prm.clone());
            let anchor = parse_anchor(&sys, anchor)?;
            let r = S::from_rational(&rational(r)?);
            if let Some(k_max) = k_max {
                let points = limit_probe(&sys, &anchor, &r, *k_max, *depth)?;
                let mut buf = Vec::new();
                write_probe_csv(&points, &mut buf)?;
                return Ok(Outcome::done(Output::Text(String::from_utf8(buf).expect("utf-8 csv"))));
            }
            let t = S::from_rational(&rational(t)?);
            let g = gap_probe(&sys, &anchor, &t, &r, *depth)?;
            let body = json!({
                "t": rational_json(&g.t),
                "r": rational_json(&g.r),
                "depth": depth,
                "gap": { "lo": rational_json(&g.lo), "hi": rational_json(&g.hi) },
            });
            Ok(Outcome::done(Output::Json(merge(header(&prm), body))))
        }
        Command::Cover { params: a, set, depth } => {
            let sys = SimilaritySystem::new(params::<S>(a)?);
            let tag: SetTag = set.parse()?;
            let cover = IntervalCover::build(&sys, tag, *depth, &Caps::default())?;
            let mut buf = Vec::new();
            cover.write_csv(&mut buf)?;
            Ok(Outcome::done(Output::Text(String::from_utf8(buf).expect("utf-8 csv"))))
        }
        Command::Boxdim {
            input,
            middle_thirds: mt,
            scales,
        } => {
            let points = match (input, mt) {
                (Some(path), _) => read_points(path)?,
                (None, Some(depth)) => middle_thirds(*depth),
                (None, None) => return Err(invalid("one of --input or --middle-thirds is required")),
            };
            let scales = if scales.is_empty() { default_scales() } else { scales.clone() };
            let est = box_dim_estimate(&points, &scales)?;
            Ok(Outcome::done(Output::Json(json!({
                "schema_version": SCHEMA_VERSION,
                "points": points.len(),
                "scales": est.scales,
                "counts": est.counts,
                "slope": est.slope,
                "r2": est.r2,
                "degenerate": est.degenerate,
            }))))
        }
    }
}

fn dim<S: Scalar>(a: &ParamArgs, tol: f64, rungs: u32) -> Run {
    let prm = params::<S>(a)?;
    let res: DimResult<f64> = solve_dim::<S, f64>(&prm, tol)?;
    let mut body = json!({
        "d": {
            "decimal": res.d,
            "bracket": interval_json(&res.bracket),
        },
        "residual": interval_json(&res.residual),
        "iterations": res.iterations,
        "converged": res.converged,
    });
    if rungs > 0 {
        let lad = ladder::<S, f64>(&prm, rungs, tol)?;
        body["ladder"] = json!({
            "certified_increasing": lad.certified_increasing(),
            "rungs": lad
                .rungs
                .iter()
                .map(|r| json!({ "n": r.n, "d_n": r.d_n, "deficit": interval_json(&r.deficit) }))
                .collect::<Vec<_>>(),
        });
    }
    Ok(Outcome {
        output: Output::Json(merge(header(&prm), body)),
        exhausted: !res.converged,
    })
}

fn check<S: Scalar>(a: &ParamArgs, max_sum: u32, depth: u32) -> Run {
    let prm = params::<S>(a)?;
    let report = check_tf(&prm, max_sum, depth, &Caps::default())?;
    let exhausted = matches!(&report.summary, Summary::CertifiedUpTo { unknowns, .. } if !unknowns.is_empty());
    Ok(Outcome {
        output: Output::Json(report.to_json()),
        exhausted,
    })
}

fn parse_word(text: &str) -> Result<Word, Failure> {
    let letters = text
        .split(',')
        .map(|s| s.trim().parse::<u8>().map_err(|_| invalid(format!("bad letter {s:?} in {text:?}"))))
        .collect::<Result<Vec<u8>, Failure>>()?;
    Ok(Word::new(letters)?)
}

fn parse_anchor<S: Scalar>(sys: &SimilaritySystem<S>, text: &str) -> Result<Anchor<S>, Failure> {
    match text.split_once(':') {
        None if text == "origin" => Ok(Anchor::origin()),
        Some(("zero", w)) => Ok(Anchor::image_of_zero(sys, &parse_word(w)?)),
        Some(("one", w)) => Ok(Anchor::image_of_one(sys, &parse_word(w)?)),
        _ => Err(invalid(format!("anchor {text:?} is not origin, zero:WORD or one:WORD"))),
    }
}

fn read_points(path: &std::path::Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<f64>()
                .or_else(|_| parse_rational(l).map(|r| twofold::numeric::rational_to_f64(&r)))
                .map_err(|_| invalid(format!("cannot parse {l:?} as a number")))
        })
        .collect()
}
