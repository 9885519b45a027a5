//! Command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and writes either plain
//! text or a single JSON envelope
//! `{"command", "inputs", "result", "warnings"}`. Exit codes: 0 success,
//! 1 rejected input, 2 usage error, 3 internal inconsistency.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::atoms::{atom, decompose_ratio, lucanomial, prime_search, RouteChoice};
use crate::error::{Error, Result};
use crate::holonomy::{default_window, divisibility_scan, fit_recurrence, t_zero_profile, RecurrenceOutcome};
use crate::lucasfam::{companion_int, companion_poly, cyclotomic, lucas_int, lucas_poly, LucasParams};
use crate::numtheory::Primality;
use crate::valuations::{classify, rank_of_appearance, vp_atom_closed, vp_atom_mobius, vp_atom_oracle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lucas-atoms", version, about = "Lucas polynomials, Lucas atoms and their p-adic valuations")]
struct Cli {
    /// Emit one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Params {
    #[arg(long, allow_negative_numbers = true)]
    s: BigInt,
    #[arg(long, allow_negative_numbers = true)]
    t: BigInt,
}

impl Params {
    fn lucas(&self) -> LucasParams {
        LucasParams::new(self.s.clone(), self.t.clone())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Route {
    Sym,
    Div,
    Red,
    Checked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Mobius,
    Oracle,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lucas atom P_N.
    Atom {
        n: u64,
        #[arg(long, value_enum, default_value = "sym")]
        route: Route,
        /// Evaluate at s = S, t = T.
        #[arg(long, num_args = 2, value_names = ["S", "T"], allow_negative_numbers = true)]
        eval: Option<Vec<BigInt>>,
    },
    /// Lucas polynomial U_N.
    Lucas {
        n: u64,
        #[arg(long, num_args = 2, value_names = ["S", "T"], allow_negative_numbers = true)]
        eval: Option<Vec<BigInt>>,
    },
    /// Companion polynomial W_N.
    Companion {
        n: u64,
        #[arg(long, num_args = 2, value_names = ["S", "T"], allow_negative_numbers = true)]
        eval: Option<Vec<BigInt>>,
    },
    /// Cyclotomic polynomial in q.
    Cyclotomic { n: u64 },
    /// Atomic decomposition of prod U_num / prod U_den.
    Decompose {
        #[arg(long, value_delimiter = ',', required = true)]
        num: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        den: Vec<u64>,
    },
    /// Lucas analogue of the binomial coefficient (N choose K).
    Lucanomial {
        n: u64,
        k: u64,
        #[arg(long, num_args = 2, value_names = ["S", "T"], allow_negative_numbers = true)]
        eval: Option<Vec<BigInt>>,
    },
    /// p-adic valuation of P_N(s, t).
    Val {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "closed")]
        method: Method,
    },
    /// Rank of appearance of p in U(s, t).
    Rank {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        params: Params,
    },
    /// Valuation regime of (p, s, t).
    Classify {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        params: Params,
    },
    /// Indices n <= LIMIT with p | P_n(s, t).
    Scan {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        limit: u64,
    },
    /// Fit or refute a polynomial-coefficient recurrence for P_n(s, t).
    Fit {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        order: u64,
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
    },
    /// P_n(s, 0) for n <= LIMIT.
    Tzero {
        #[arg(long, allow_negative_numbers = true)]
        s: BigInt,
        #[arg(long)]
        limit: u64,
    },
    /// Pairs |s|, |t| <= BOUND with P_N(s, t) prime.
    Primesearch {
        n: u64,
        #[arg(long)]
        bound: u64,
    },
}

struct Report {
    command: &'static str,
    inputs: Value,
    result: Value,
    text: String,
    warnings: Vec<String>,
}

fn big(x: &BigInt) -> Value {
    Value::Number(x.to_string().parse().expect("decimal integers are JSON numbers"))
}

fn rat(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

fn eval_pair(eval: &Option<Vec<BigInt>>) -> Option<LucasParams> {
    eval.as_ref().map(|v| LucasParams::new(v[0].clone(), v[1].clone()))
}

fn params_json(params: &LucasParams) -> Value {
    json!({ "s": big(&params.s), "t": big(&params.t) })
}

fn with_eval(mut inputs: Value, at: &Option<LucasParams>) -> Value {
    if let Some(params) = at {
        inputs["eval"] = params_json(params);
    }
    inputs
}

fn route_choice(route: Route) -> RouteChoice {
    match route {
        Route::Sym => "sym",
        Route::Div => "div",
        Route::Red => "red",
        Route::Checked => "checked",
    }
    .parse()
    .expect("every route name parses")
}

/// Polynomial in `var` with rational coefficients, highest degree first.
fn render_rational_poly(coeffs: &[BigRational], var: &str) -> String {
    let mut out = String::new();
    for (e, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let mag = c.abs();
        let mono = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        match (mono.is_empty(), mag.is_one()) {
            (true, _) => out.push_str(&mag.to_string()),
            (false, true) => out.push_str(&mono),
            (false, false) => out.push_str(&format!("{mag}*{mono}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn atom_product_text(exponents: &std::collections::BTreeMap<u64, u32>) -> String {
    if exponents.is_empty() {
        return "1".into();
    }
    exponents
        .iter()
        .map(|(d, e)| if *e == 1 { format!("P_{d}") } else { format!("P_{d}^{e}") })
        .collect::<Vec<_>>()
        .join(" * ")
}

fn execute(command: &Command) -> Result<Report> {
    Ok(match command {
        Command::Atom { n, route, eval } => {
            let at = eval_pair(eval);
            let choice = route_choice(*route);
            let poly = atom(*n, choice)?;
            let mut result = json!({ "poly": poly.to_string() });
            let text = match &at {
                Some(params) => {
                    let value = poly.eval(&params.s, &params.t);
                    result["value"] = big(&value);
                    value.to_string()
                }
                None => poly.to_string(),
            };
            Report {
                command: "atom",
                inputs: with_eval(json!({ "n": n, "route": choice.to_string() }), &at),
                result,
                text,
                warnings: vec![],
            }
        }
        Command::Lucas { n, eval } | Command::Companion { n, eval } => {
            let lucas = matches!(command, Command::Lucas { .. });
            let at = eval_pair(eval);
            let (result, text) = match &at {
                Some(params) => {
                    let value = if lucas { lucas_int(*n, params) } else { companion_int(*n, params) };
                    (json!({ "value": big(&value) }), value.to_string())
                }
                None => {
                    let poly = if lucas { lucas_poly(*n) } else { companion_poly(*n) };
                    (json!({ "poly": poly.to_string() }), poly.to_string())
                }
            };
            Report {
                command: if lucas { "lucas" } else { "companion" },
                inputs: with_eval(json!({ "n": n }), &at),
                result,
                text,
                warnings: vec![],
            }
        }
        Command::Cyclotomic { n } => {
            let poly = cyclotomic(*n)?;
            Report {
                command: "cyclotomic",
                inputs: json!({ "n": n }),
                result: json!({
                    "poly": poly.to_string(),
                    "coefficients": poly.coeffs().iter().map(big).collect::<Vec<_>>(),
                }),
                text: poly.to_string(),
                warnings: vec![],
            }
        }
        Command::Decompose { num, den } => {
            let dec = decompose_ratio(num, den)?;
            let expanded = dec.expand_quotient()?;
            let mut lines: Vec<String> = dec
                .exponents
                .iter()
                .map(|(d, (a, b))| format!("P_{d}: a={a} b={b}"))
                .collect();
            let mut result = json!({
                "exponents": dec.exponents.iter().map(|(d, (a, b))| json!({ "d": d, "a": a, "b": b })).collect::<Vec<_>>(),
                "polynomial": dec.is_polynomial,
            });
            if let Some(poly) = &expanded {
                lines.push("verdict: polynomial".into());
                lines.push(format!("quotient: {}", atom_product_text(&dec.quotient)));
                lines.push(format!("expanded: {poly}"));
                result["quotient"] = Value::Object(
                    dec.quotient.iter().map(|(d, e)| (d.to_string(), json!(e))).collect::<Map<_, _>>(),
                );
                result["expanded"] = json!(poly.to_string());
            } else {
                lines.push("verdict: not a polynomial".into());
            }
            Report {
                command: "decompose",
                inputs: json!({ "num": num, "den": den }),
                result,
                text: lines.join("\n"),
                warnings: vec![],
            }
        }
        Command::Lucanomial { n, k, eval } => {
            let at = eval_pair(eval);
            let l = lucanomial(*n, *k)?;
            let mut result = json!({
                "atoms": Value::Object(l.exponents.iter().map(|(d, e)| (d.to_string(), json!(e))).collect::<Map<_, _>>()),
                "poly": l.poly.to_string(),
            });
            let text = match &at {
                Some(params) => {
                    let value = l.poly.eval(&params.s, &params.t);
                    result["value"] = big(&value);
                    value.to_string()
                }
                None => l.poly.to_string(),
            };
            Report {
                command: "lucanomial",
                inputs: with_eval(json!({ "n": n, "k": k }), &at),
                result,
                text,
                warnings: vec![],
            }
        }
        Command::Val { p, params, n, method } => {
            let lp = params.lucas();
            let methods: Vec<(&str, fn(u64, &LucasParams, u64) -> Result<u64>)> = vec![
                ("closed", vp_atom_closed),
                ("mobius", vp_atom_mobius),
                ("oracle", vp_atom_oracle),
            ];
            let wanted: Vec<_> = methods
                .into_iter()
                .filter(|(name, _)| match method {
                    Method::All => true,
                    Method::Closed => *name == "closed",
                    Method::Mobius => *name == "mobius",
                    Method::Oracle => *name == "oracle",
                })
                .collect();
            let mut values = Vec::new();
            for (name, f) in wanted {
                values.push((name, f(*p, &lp, *n)?));
            }
            let text = if values.len() == 1 {
                values[0].1.to_string()
            } else {
                values.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
            };
            if values.windows(2).any(|w| w[0].1 != w[1].1) {
                return Err(Error::Internal(format!("valuation methods disagree: {text}")));
            }
            let mut inputs = json!({ "p": p, "n": n, "method": format!("{method:?}").to_lowercase() });
            inputs["s"] = big(&lp.s);
            inputs["t"] = big(&lp.t);
            Report {
                command: "val",
                inputs,
                result: Value::Object(values.iter().map(|(k, v)| (k.to_string(), json!(v))).collect()),
                text,
                warnings: vec![],
            }
        }
        Command::Rank { p, params } => {
            let lp = params.lucas();
            let r = rank_of_appearance(*p, &lp)?;
            let mut text = match r.rho {
                Some(rho) => format!("rho={rho}"),
                None => "rho=undefined".into(),
            };
            if let Some(bound) = r.divides_bound {
                text.push_str(&format!(" bound={bound}"));
            }
            Report {
                command: "rank",
                inputs: json!({ "p": p, "s": big(&lp.s), "t": big(&lp.t) }),
                result: json!({ "rho": r.rho, "divides_bound": r.divides_bound }),
                text,
                warnings: vec![],
            }
        }
        Command::Classify { p, params } => {
            let lp = params.lucas();
            let c = classify(*p, &lp)?;
            let show = |x: Option<u32>| x.map_or("inf".to_string(), |v| v.to_string());
            let opt = |x: Option<u64>| x.map_or("undefined".to_string(), |v| v.to_string());
            let lines = [
                format!("regime: {}", c.regime),
                format!("a: {}", show(c.a)),
                format!("b: {}", show(c.b)),
                format!("s': {}", c.s_prime),
                format!("t': {}", c.t_prime),
                format!("delta: {}", c.delta),
                format!("k: {}", opt(c.k)),
                format!("lambda: {}", opt(c.lambda.map(u64::from))),
            ];
            Report {
                command: "classify",
                inputs: json!({ "p": p, "s": big(&lp.s), "t": big(&lp.t) }),
                result: json!({
                    "regime": c.regime.code(),
                    "label": c.regime.label(),
                    "a": c.a,
                    "b": c.b,
                    "s_prime": big(&c.s_prime),
                    "t_prime": big(&c.t_prime),
                    "delta": big(&c.delta),
                    "k": c.k,
                    "lambda": c.lambda,
                }),
                text: lines.join("\n"),
                warnings: vec![],
            }
        }
        Command::Scan { p, params, limit } => {
            let lp = params.lucas();
            let scan = divisibility_scan(*p, &lp, *limit)?;
            let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
            let yes_no = |b: bool| if b { "yes" } else { "no" };
            let periodic = match scan.eventual_period {
                Some(e) => format!("yes (period {} from n = {})", e.period, e.start),
                None => format!("no (periods up to {} checked)", scan.max_period),
            };
            let text = [
                format!("hits: {}", join(&scan.hits)),
                format!("matches closed form: {}", yes_no(scan.matches)),
                format!("eventually periodic: {periodic}"),
            ]
            .join("\n");
            let mut warnings = vec![];
            if !scan.matches {
                warnings.push(format!("closed form predicts {}", join(&scan.expected)));
            }
            Report {
                command: "scan",
                inputs: json!({ "p": p, "s": big(&lp.s), "t": big(&lp.t), "limit": limit }),
                result: json!({
                    "hits": scan.hits,
                    "expected": scan.expected,
                    "matches": scan.matches,
                    "max_period": scan.max_period,
                    "eventual_period": scan.eventual_period.map(|e| json!({ "period": e.period, "start": e.start })),
                }),
                text,
                warnings,
            }
        }
        Command::Fit { params, order, degree, from, to } => {
            let lp = params.lucas();
            let (d_from, d_to) = default_window(*order, *degree);
            let (from, to) = (from.unwrap_or(d_from), to.unwrap_or(d_to));
            let fit = fit_recurrence(&lp, *order, *degree, from, to)?;
            let (result, text) = match &fit.outcome {
                RecurrenceOutcome::Refuted(w) => (
                    json!({
                        "refuted": true,
                        "witness": {
                            "start": w.start,
                            "end": w.end,
                            "certificate": w.certificate.iter().map(rat).collect::<Vec<_>>(),
                        },
                    }),
                    format!(
                        "refuted: no recurrence of order {order} and degree {degree} fits n = {}..{}",
                        w.start, w.end
                    ),
                ),
                RecurrenceOutcome::Fit { coefficients, freedom } => {
                    let mut lines = vec![format!("fit on n = {from}..{to} (solution space dimension {freedom})")];
                    for (j, g) in coefficients.iter().enumerate() {
                        lines.push(format!("G_{j}(n) = {}", render_rational_poly(g, "n")));
                    }
                    (
                        json!({
                            "refuted": false,
                            "freedom": freedom,
                            "coefficients": coefficients.iter().map(|g| g.iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
                        }),
                        lines.join("\n"),
                    )
                }
            };
            Report {
                command: "fit",
                inputs: json!({
                    "s": big(&lp.s), "t": big(&lp.t), "order": order, "degree": degree, "from": from, "to": to,
                }),
                result,
                text,
                warnings: vec![],
            }
        }
        Command::Tzero { s, limit } => {
            let profile = t_zero_profile(s, *limit)?;
            Report {
                command: "tzero",
                inputs: json!({ "s": big(s), "limit": limit }),
                result: json!({ "values": profile.iter().map(|(_, v)| big(v)).collect::<Vec<_>>() }),
                text: profile.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>().join(" "),
                warnings: vec![],
            }
        }
        Command::Primesearch { n, bound } => {
            let hits = prime_search(*n, *bound)?;
            let mut warnings = vec![];
            if hits.iter().any(|h| h.primality == Primality::ProbablePrime) {
                warnings.push("probabilistic primality: some values were only tested by Miller-Rabin".into());
            }
            Report {
                command: "primesearch",
                inputs: json!({ "n": n, "bound": bound }),
                result: json!({
                    "hits": hits.iter().map(|h| json!({
                        "s": h.s,
                        "t": h.t,
                        "value": big(&h.value),
                        "proven": h.primality == Primality::Prime,
                    })).collect::<Vec<_>>(),
                }),
                text: hits.iter().map(|h| format!("{} {} {}", h.s, h.t, h.value)).collect::<Vec<_>>().join("\n"),
                warnings,
            }
        }
    })
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("error: invalid usage");
            let _ = writeln!(stderr, "{}", one_line(first));
            return EXIT_USAGE;
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            if cli.json {
                let envelope = json!({
                    "command": report.command,
                    "inputs": report.inputs,
                    "result": report.result,
                    "warnings": report.warnings,
                });
                let _ = writeln!(stdout, "{envelope}");
            } else {
                let _ = writeln!(stdout, "{}", report.text);
                for w in &report.warnings {
                    let _ = writeln!(stderr, "warning: {}", one_line(w));
                }
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", one_line(&e.to_string()));
            if e.is_internal() {
                EXIT_INTERNAL
            } else {
                EXIT_DOMAIN
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("lucas-atoms").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn atom_text() {
        assert_eq!(run_args(&["atom", "6"]), (0, "s^2 + 3*t\n".into(), String::new()));
        assert_eq!(run_args(&["atom", "1"]).1, "1\n");
        assert_eq!(run_args(&["atom", "8", "--eval", "2", "2"]).1, "56\n");
        assert_eq!(run_args(&["atom", "3", "--eval", "1", "-1"]).1, "0\n");
    }

    #[test]
    fn val_all_methods() {
        let (code, out, _) = run_args(&["val", "--p", "2", "--s", "1", "--t", "1", "--n", "6", "--method", "all"]);
        assert_eq!(code, 0);
        assert_eq!(out, "closed=2 mobius=2 oracle=2\n");
    }

    #[test]
    fn rational_poly_rendering() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(render_rational_poly(&[r(0, 1)], "n"), "0");
        assert_eq!(render_rational_poly(&[r(3, 1), r(-1, 2), r(1, 1)], "n"), "n^2 - 1/2*n + 3");
        assert_eq!(render_rational_poly(&[r(0, 1), r(-1, 1)], "n"), "-n");
    }
}
