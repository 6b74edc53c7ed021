//! Command-line surface. Every invocation produces exactly one [`Envelope`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::hypergeometric::{
    chu_vandermonde_check, egf_pair_check, f11_transform_check, f32_gasper_check, f32_lhs,
    f32_single_sum, f32_trinomial_rhs, u_gf_check, u_number, IdentityCheck, TwoUrns,
};
use crate::transforms::{
    binomial_transform, difference_triangle, extend_rotated_row, inverse_binomial_transform,
    nonneg_extension_interval, rotate_triangle, sie_transform, Sequence,
};
use crate::urns::{multi_urn_abar, multi_urn_bbar, simulate_sharded, Experiment, UrnSpec};

pub const DEFAULT_SERIES_ORDER: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "sie", version, about = "Exact inclusion-exclusion transforms, urn probabilities and identity checks")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    Binomial,
    InvBinomial,
    Sie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Difference,
    Rotated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UrnMode {
    Exact,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Abar,
    Bbar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    ChuVandermonde,
    F11,
    F32Trinomial,
    F32Single,
    F32Gasper,
    UGf,
    EgfPair,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Binomial, inverse binomial or symmetric transform of a sequence.
    Transform {
        #[arg(long, value_enum)]
        kind: TransformKind,
        /// Comma separated rationals, e.g. "1,0,1/2".
        #[arg(long, conflicts_with = "file", allow_hyphen_values = true)]
        input: Option<String>,
        /// JSON array of rational strings.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Difference table of a top row, optionally rotated and extended.
    Table {
        #[arg(long, conflicts_with = "file", allow_hyphen_values = true)]
        top: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Rotated)]
        emit: Emit,
        /// Leftmost entry of a new bottom row; repeat to extend again.
        #[arg(long, allow_hyphen_values = true)]
        extend: Vec<String>,
    },
    /// Exact or simulated urn probabilities.
    Urn {
        #[arg(long, value_enum, default_value_t = UrnMode::Exact)]
        mode: UrnMode,
        /// Urn parameters "r1:b1,r2:b2,...".
        #[arg(long)]
        urns: String,
        #[arg(long)]
        n: String,
        #[arg(long, value_enum)]
        quantity: Quantity,
        #[arg(long)]
        trials: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, default_value = "1")]
        workers: String,
    },
    /// Checks one identity exactly and reports both sides.
    Verify {
        #[arg(long, value_enum)]
        identity: Identity,
        #[arg(long, allow_hyphen_values = true)]
        r: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        order: Option<String>,
        #[arg(long)]
        urns: Option<String>,
        /// Sequences for egf-pair (given twice).
        #[arg(long, allow_hyphen_values = true)]
        input: Vec<String>,
        /// egf-pair flavour: sie (symmetric) or binomial (asymmetric).
        #[arg(long, value_enum)]
        kind: Option<TransformKind>,
    },
    /// U_{m,n}(r) for m = 0..=m_max.
    UNumbers {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long)]
        n: String,
        #[arg(long = "m-max")]
        m_max: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    IdentityHolds,
    IdentityFails,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub command: String,
    /// Parsed flags keyed by flag name; replaying them reproduces the result.
    pub inputs: BTreeMap<String, Value>,
    pub result: Value,
    pub status: Status,
}

impl Envelope {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok | Status::IdentityHolds => 0,
            Status::IdentityFails => 1,
            Status::Error => 2,
        }
    }

    fn error(command: &str, inputs: BTreeMap<String, Value>, message: String) -> Self {
        Envelope {
            command: command.to_string(),
            inputs,
            result: json!({ "message": message }),
            status: Status::Error,
        }
    }

    /// Flag list that re-runs this command.
    pub fn replay_args(&self) -> Vec<String> {
        let mut args = vec![self.command.clone()];
        for (k, v) in &self.inputs {
            let values = match v {
                Value::Array(items) => items.clone(),
                other => vec![other.clone()],
            };
            for item in values {
                args.push(format!("--{k}"));
                args.push(match item {
                    Value::String(s) => s,
                    other => other.to_string(),
                });
            }
        }
        args
    }
}

/// Parses `args` (including the program name) and executes. Returns the
/// rendered output and the process exit code.
pub fn run<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    match Cli::try_parse_from(&args) {
        Ok(cli) => {
            let env = execute(&cli.command);
            (render(&env, cli.format), env.exit_code())
        }
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            (e.to_string(), 0)
        }
        Err(e) => {
            let command = args
                .iter()
                .skip(1)
                .filter_map(|a| a.to_str())
                .find(|a| !a.starts_with('-'))
                .unwrap_or("unknown");
            let message = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or(&message).trim_start_matches("error: ");
            let env = Envelope::error(command, BTreeMap::new(), first.to_string());
            (render(&env, Format::Json), env.exit_code())
        }
    }
}

pub fn execute(command: &Command) -> Envelope {
    let mut inputs = BTreeMap::new();
    let name = command_name(command);
    match dispatch(command, &mut inputs) {
        Ok((result, status)) => Envelope { command: name.into(), inputs, result, status },
        Err(e) => Envelope::error(name, inputs, e.to_string()),
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Transform { .. } => "transform",
        Command::Table { .. } => "table",
        Command::Urn { .. } => "urn",
        Command::Verify { .. } => "verify",
        Command::UNumbers { .. } => "u-numbers",
    }
}

fn enum_name<E: ValueEnum>(v: &E) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn parse_rational(flag: &str, s: &str) -> Result<Rational> {
    s.parse::<Rational>()
        .map_err(|e| Error::Parse(format!("--{flag}: {e}")))
}

/// Integer-valued flags accept any rational literal that is a nonnegative integer.
fn parse_count(flag: &str, s: &str) -> Result<u64> {
    let q = parse_rational(flag, s)?;
    if q.is_integer() && !q.is_negative() {
        if let Ok(v) = u64::try_from(q.numer()) {
            return Ok(v);
        }
    }
    Err(Error::Parse(format!("--{flag}: expected a nonnegative integer, got {s:?}")))
}

fn require<'a>(flag: &str, v: &'a Option<String>) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required")))
}

fn read_sequence(inline: &Option<String>, file: &Option<PathBuf>, flag: &str) -> Result<Sequence> {
    match (inline, file) {
        (Some(s), _) => s.parse().map_err(|e| Error::Parse(format!("--{flag}: {e}"))),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
        (None, None) => Err(Error::InvalidParameter(format!("--{flag} or --file is required"))),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn identity_status(holds: bool) -> Status {
    if holds {
        Status::IdentityHolds
    } else {
        Status::IdentityFails
    }
}

type Dispatch = Result<(Value, Status)>;

fn dispatch(command: &Command, inputs: &mut BTreeMap<String, Value>) -> Dispatch {
    match command {
        Command::Transform { kind, input, file } => {
            inputs.insert("kind".into(), json!(enum_name(kind)));
            let seq = read_sequence(input, file, "input")?;
            inputs.insert("input".into(), json!(seq.to_csv()));
            let out = match kind {
                TransformKind::Binomial => binomial_transform(&seq),
                TransformKind::InvBinomial => inverse_binomial_transform(&seq),
                TransformKind::Sie => sie_transform(&seq),
            };
            Ok((to_value(&out), Status::Ok))
        }
        Command::Table { top, file, emit, extend } => {
            inputs.insert("emit".into(), json!(enum_name(emit)));
            let top = read_sequence(top, file, "top")?;
            inputs.insert("top".into(), json!(top.to_csv()));
            let leftmost = extend
                .iter()
                .map(|s| parse_rational("extend", s))
                .collect::<Result<Vec<_>>>()?;
            if !leftmost.is_empty() {
                inputs.insert("extend".into(), json!(leftmost.iter().map(|q| q.to_string()).collect::<Vec<_>>()));
            }
            let diff = difference_triangle(&top);
            let rotated = rotate_triangle(&diff)?;
            let mut result = json!({
                "triangle": match emit {
                    Emit::Difference => to_value(&diff),
                    Emit::Rotated => to_value(&rotated),
                },
            });
            if !leftmost.is_empty() {
                let mut bottom = rotated.bottom_row();
                let mut rows = Vec::new();
                for x in &leftmost {
                    bottom = extend_rotated_row(&bottom, x);
                    rows.push(bottom.clone());
                }
                result["extended_rows"] = to_value(&rows);
                result["nonneg_interval"] = to_value(&nonneg_extension_interval(&bottom));
            }
            Ok((result, Status::Ok))
        }
        Command::Urn { mode, urns, n, quantity, trials, seed, workers } => {
            inputs.insert("mode".into(), json!(enum_name(mode)));
            inputs.insert("quantity".into(), json!(enum_name(quantity)));
            let spec: UrnSpec = urns.parse()?;
            inputs.insert("urns".into(), json!(spec.to_string()));
            let n = parse_count("n", n)?;
            inputs.insert("n".into(), json!(n.to_string()));
            match mode {
                UrnMode::Exact => {
                    let value = match quantity {
                        Quantity::Abar => multi_urn_abar(n, &spec)?,
                        Quantity::Bbar => multi_urn_bbar(n, &spec)?,
                    };
                    Ok((json!({ "value": value }), Status::Ok))
                }
                UrnMode::Simulate => {
                    let trials = parse_count("trials", require("trials", trials)?)?;
                    let seed = parse_count("seed", require("seed", seed)?)?;
                    let workers = parse_count("workers", workers)? as usize;
                    inputs.insert("trials".into(), json!(trials.to_string()));
                    inputs.insert("seed".into(), json!(seed.to_string()));
                    inputs.insert("workers".into(), json!(workers.to_string()));
                    let experiment = match quantity {
                        Quantity::Abar => match spec.urns() {
                            [u] => Experiment::SingleUrnAbar { n, r: u.r.clone(), b: u.b.clone() },
                            _ => {
                                return Err(Error::InvalidParameter(
                                    "abar simulation takes a single urn".into(),
                                ))
                            }
                        },
                        Quantity::Bbar => Experiment::MultiUrnBbar { n, spec },
                    };
                    let report = simulate_sharded(&experiment, trials, seed, workers)?;
                    Ok((to_value(&report), Status::Ok))
                }
            }
        }
        Command::Verify { identity, r, b, n, order, urns, input, kind } => {
            inputs.insert("identity".into(), json!(enum_name(identity)));
            verify(*identity, VerifyArgs { r, b, n, order, urns, input, kind: *kind }, inputs)
        }
        Command::UNumbers { r, n, m_max } => {
            let r = parse_rational("r", r)?;
            let n = parse_count("n", n)?;
            let m_max = parse_count("m-max", m_max)?;
            inputs.insert("r".into(), json!(r.to_string()));
            inputs.insert("n".into(), json!(n.to_string()));
            inputs.insert("m-max".into(), json!(m_max.to_string()));
            if !r.is_positive() {
                return Err(Error::InvalidParameter(format!("--r must be positive, got {r}")));
            }
            let m_max = u32::try_from(m_max).map_err(|_| Error::InvalidParameter("--m-max too large".into()))?;
            let values = (0..=m_max).map(|m| u_number(m, n, &r)).collect::<Result<Vec<_>>>()?;
            Ok((to_value(&values), Status::Ok))
        }
    }
}

struct VerifyArgs<'a> {
    r: &'a Option<String>,
    b: &'a Option<String>,
    n: &'a Option<String>,
    order: &'a Option<String>,
    urns: &'a Option<String>,
    input: &'a [String],
    kind: Option<TransformKind>,
}

impl VerifyArgs<'_> {
    fn rational(&self, flag: &str, inputs: &mut BTreeMap<String, Value>) -> Result<Rational> {
        let raw = match flag {
            "r" => self.r,
            "b" => self.b,
            _ => unreachable!("rational flag {flag}"),
        };
        let q = parse_rational(flag, require(flag, raw)?)?;
        inputs.insert(flag.into(), json!(q.to_string()));
        Ok(q)
    }

    fn count(&self, flag: &str, inputs: &mut BTreeMap<String, Value>, default: Option<u64>) -> Result<u64> {
        let raw = match flag {
            "n" => self.n,
            "order" => self.order,
            _ => unreachable!("count flag {flag}"),
        };
        let v = match (raw, default) {
            (Some(s), _) => parse_count(flag, s)?,
            (None, Some(d)) => d,
            (None, None) => return Err(Error::InvalidParameter(format!("--{flag} is required"))),
        };
        inputs.insert(flag.into(), json!(v.to_string()));
        Ok(v)
    }

    fn two_urns(&self, inputs: &mut BTreeMap<String, Value>) -> Result<TwoUrns> {
        let spec: UrnSpec = require("urns", self.urns)?.parse()?;
        inputs.insert("urns".into(), json!(spec.to_string()));
        TwoUrns::from_spec(&spec)
    }
}

fn verify(identity: Identity, a: VerifyArgs<'_>, inputs: &mut BTreeMap<String, Value>) -> Dispatch {
    let scalar = |c: IdentityCheck| Ok((to_value(&c), identity_status(c.holds)));
    let default_order = Some(DEFAULT_SERIES_ORDER as u64);
    match identity {
        Identity::ChuVandermonde => {
            let r = a.rational("r", inputs)?;
            let b = a.rational("b", inputs)?;
            let n = a.count("n", inputs, None)?;
            scalar(chu_vandermonde_check(n, &r, &b)?)
        }
        Identity::F11 => {
            let b = a.rational("b", inputs)?;
            let r = a.rational("r", inputs)?;
            if !b.is_positive() || !r.is_positive() {
                return Err(Error::InvalidParameter("--b and --r must be positive".into()));
            }
            let order = a.count("order", inputs, default_order)? as usize;
            let c = f11_transform_check(&b, &r, order)?;
            Ok((to_value(&c), identity_status(c.holds)))
        }
        Identity::F32Trinomial | Identity::F32Single => {
            let n = a.count("n", inputs, None)?;
            let p = a.two_urns(inputs)?;
            let rhs = if identity == Identity::F32Trinomial {
                f32_trinomial_rhs(n, &p)?
            } else {
                f32_single_sum(n, &p)?
            };
            scalar(IdentityCheck::compare(f32_lhs(n, &p)?, rhs))
        }
        Identity::F32Gasper => {
            let n = a.count("n", inputs, None)?;
            let p = a.two_urns(inputs)?;
            scalar(f32_gasper_check(n, &p)?)
        }
        Identity::UGf => {
            let n = a.count("n", inputs, None)?;
            let r = a.rational("r", inputs)?;
            if !r.is_positive() {
                return Err(Error::InvalidParameter(format!("--r must be positive, got {r}")));
            }
            let order = a.count("order", inputs, default_order)? as usize;
            let c = u_gf_check(n, &r, order)?;
            Ok((to_value(&c), identity_status(c.holds)))
        }
        Identity::EgfPair => {
            let [first, second] = a.input else {
                return Err(Error::InvalidParameter("egf-pair takes --input twice".into()));
            };
            let x: Sequence = first.parse()?;
            let y: Sequence = second.parse()?;
            inputs.insert("input".into(), json!([x.to_csv(), y.to_csv()]));
            let kind = a.kind.unwrap_or(TransformKind::Sie);
            let symmetric = match kind {
                TransformKind::Sie => true,
                TransformKind::Binomial => false,
                TransformKind::InvBinomial => {
                    return Err(Error::InvalidParameter("egf-pair --kind is sie or binomial".into()))
                }
            };
            inputs.insert("kind".into(), json!(enum_name(&kind)));
            let max = (x.len().min(y.len()) - 1) as u64;
            let order = a.count("order", inputs, Some(max))? as usize;
            let c = egf_pair_check(&x, &y, symmetric, order)?;
            Ok((to_value(&c), identity_status(c.holds)))
        }
    }
}

pub fn render(env: &Envelope, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(env).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in flatten(env) {
                out.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
            }
            out
        }
        Format::Plain => flatten(env).into_iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Dotted-key rows; arrays of scalars collapse to one comma separated value.
fn flatten(env: &Envelope) -> Vec<(String, String)> {
    let mut rows = vec![
        ("command".to_string(), env.command.clone()),
        ("status".to_string(), to_value(&env.status).as_str().unwrap_or_default().to_string()),
    ];
    for (k, v) in &env.inputs {
        flatten_value(&format!("inputs.{k}"), v, &mut rows);
    }
    flatten_value("result", &env.result, &mut rows);
    rows
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Null => Some("null".into()),
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        _ => None,
    }
}

fn flatten_value(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    if let Some(s) = scalar_text(v) {
        rows.push((prefix.to_string(), s));
        return;
    }
    match v {
        Value::Array(items) => {
            let scalars: Option<Vec<String>> = items.iter().map(scalar_text).collect();
            match scalars {
                Some(s) => rows.push((prefix.to_string(), s.join(","))),
                None => {
                    for (i, item) in items.iter().enumerate() {
                        flatten_value(&format!("{prefix}.{i}"), item, rows);
                    }
                }
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                flatten_value(&format!("{prefix}.{k}"), item, rows);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}
