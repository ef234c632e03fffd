//! The `bruhat` command line: parses arguments, reads JSON inputs, calls
//! into `bruhat-core` and renders the result.
//!
//! Exit codes: 0 success, 1 a self-test failure or I/O error, 2 malformed
//! input (bad flags or JSON), 3 a violated precondition.

use std::ffi::OsString;
use std::fmt::Write as _;

use bruhat_core::apartment::{
    act_monomial, contract, corner_chart, corner_chart_inv, f_set, f_value, f_value_oracle,
    fundamental_neighborhood, in_corner, nbhd_contains, ApartmentPointRepr, CornerChart,
    LatticeSeqRepr, NeighborhoodRepr, RayRepr,
};
use bruhat_core::group_action::{
    act, in_u_ax, stabilizes, MonomialRepr, ProjElementRepr, RootElementRepr,
};
use bruhat_core::lattice_building::{
    adjacent, ball, common_frame, is_simplex, neighbors, phi, phi_inv, rel_pos, LatticeClassRepr,
};
use bruhat_core::local_arith::check_prime;
use bruhat_core::norm_points::{from_apartment, to_apartment, NormPointRepr};
use bruhat_core::{
    selftest, ApartmentPoint, Error, ExtVal, LatticeClass, LatticeSeqSpec, Limits, MonomialElement,
    NeighborhoodSpec, NormPoint, ProjElement, Rat, RaySpec, Root, RootGroupElement,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "bruhat", version, about = "Exact computations in the compactified building of PGL_n(Q_p)")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// The prime p.
    #[arg(long, global = true, env = "BRUHAT_PRIME", default_value_t = 3)]
    pub p: u64,
    /// Ambient dimension n, used for defaults and for points given without "n".
    #[arg(long, global = true, default_value_t = 3)]
    pub n: usize,
    /// Seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Lift the size guardrails (n <= 4, p <= 7).
    #[arg(long, global = true)]
    pub override_limits: bool,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Table,
}

/// A group element: exactly one of the three forms.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct GroupArg {
    /// Monomial element, e.g. '{"perm":[2,1],"vals":[1,0]}'.
    #[arg(long)]
    pub monomial: Option<String>,
    /// Projective matrix, e.g. '{"matrix":[["3","0"],["0","1"]]}'.
    #[arg(long)]
    pub matrix: Option<String>,
    /// Root group element, e.g. '{"i":1,"j":2,"omega":"1/3"}'.
    #[arg(long)]
    pub root_element: Option<String>,
}

/// The thing acted on: exactly one of the three kinds.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct TargetArg {
    /// Apartment point.
    #[arg(long)]
    pub point: Option<String>,
    /// Lattice class.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Norm point.
    #[arg(long)]
    pub norm: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ball of the given radius around a vertex (default: the standard lattice).
    Ball {
        #[arg(long)]
        radius: u32,
        #[arg(long)]
        center: Option<String>,
        /// Write the label-to-class map of the DOT output here.
        #[arg(long)]
        sidecar: Option<std::path::PathBuf>,
    },
    /// Whether two classes are adjacent, with their relative position.
    Adjacent {
        /// Give exactly two classes.
        #[arg(long, required = true, action = clap::ArgAction::Append)]
        lattice: Vec<String>,
    },
    /// All classes adjacent to a class (default: the standard lattice).
    Neighbors {
        #[arg(long)]
        lattice: Option<String>,
    },
    /// Whether a JSON array of classes is pairwise adjacent.
    Simplex {
        #[arg(long)]
        lattices: String,
    },
    /// Apartment point of a class diagonal in the standard frame.
    Phi {
        #[arg(long)]
        lattice: String,
    },
    /// Class of an apartment point with integer coordinates.
    PhiInv {
        #[arg(long)]
        point: String,
    },
    /// Limit of an affine ray, with tail certificates for its first neighborhoods.
    LimitRay {
        #[arg(long)]
        ray: String,
        /// Number of canonical neighborhoods to certify.
        #[arg(long, default_value_t = 5)]
        certify: u32,
    },
    /// Limit of a nested diagonal lattice sequence.
    LimitLattices {
        #[arg(long)]
        seq: String,
    },
    /// f_x(a) for a point, or f_Ω(a) for a JSON array of points.
    FValue {
        /// The root as "i,j".
        #[arg(long)]
        root: String,
        #[arg(long)]
        point: String,
        /// Use the feasibility computation instead of the closed form.
        #[arg(long)]
        oracle: bool,
    },
    /// Membership of a point in a basic open set.
    NbhdContains {
        #[arg(long)]
        point: String,
        /// Neighborhood JSON, e.g. '{"I":[1,2],"box":[["-1","1"],["-1","1"]]}'.
        #[arg(long, conflicts_with_all = ["fundamental", "around"])]
        nbhd: Option<String>,
        /// Index k of the canonical neighborhood of `--around`.
        #[arg(long, requires = "around")]
        fundamental: Option<u32>,
        #[arg(long, requires = "fundamental")]
        around: Option<String>,
    },
    /// Corner chart of a point (default corner: the least one containing it).
    Chart {
        #[arg(long)]
        point: String,
        #[arg(long)]
        corner: Option<usize>,
    },
    /// Point with the given corner chart.
    ChartInv {
        #[arg(long)]
        chart: String,
    },
    /// The contraction r(x, t).
    Contract {
        #[arg(long)]
        point: String,
        #[arg(long)]
        t: String,
    },
    /// Action of a group element on a point, lattice class or norm point.
    Act {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        target: TargetArg,
    },
    /// Whether a group element fixes a point, lattice class or norm point.
    Stabilizes {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        target: TargetArg,
    },
    /// A frame adapted to a class and a full-rank class.
    CommonApartment {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Restriction of a group element to a coordinate subspace.
    Restrict {
        #[command(flatten)]
        group: GroupArg,
        /// Indices as "1,2".
        #[arg(long)]
        subset: String,
    },
    /// Run the seeded property suites.
    Selftest {
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Malformed(String),
    Precondition(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Precondition(e)
    }
}

struct Rendered {
    value: Value,
    dot: Option<String>,
    table: Option<String>,
    default: Format,
    code: i32,
}

impl Rendered {
    fn json(value: Value) -> Self {
        Rendered { value, dot: None, table: None, default: Format::Json, code: 0 }
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// Runs one command line (the first item is the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli).and_then(|r| render(r, cli.config.format)) {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(Failure::Malformed(m)) => Outcome { code: 2, stdout: String::new(), stderr: format!("malformed input: {m}\n") },
        Err(Failure::Precondition(e)) => Outcome {
            code: 3,
            stdout: String::new(),
            stderr: format!("precondition violated: {e}\n"),
        },
        Err(Failure::Io(m)) => Outcome { code: 1, stdout: String::new(), stderr: format!("{m}\n") },
    }
}

fn render(r: Rendered, format: Option<Format>) -> Res<(i32, String)> {
    let text = match format.unwrap_or(r.default) {
        Format::Json => serde_json::to_string_pretty(&r.value).expect("serializable") + "\n",
        Format::Dot => r.dot.ok_or_else(|| Failure::Malformed("--format dot is only available for ball".into()))?,
        Format::Table => r.table.unwrap_or_else(|| table(&r.value)),
    };
    Ok((r.code, text))
}

fn table(value: &Value) -> String {
    fn cell(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    match value {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in map {
                writeln!(out, "{k:width$}  {}", cell(v)).expect("write to string");
            }
        }
        Value::Array(items) => {
            for v in items {
                writeln!(out, "{}", cell(v)).expect("write to string");
            }
        }
        other => writeln!(out, "{}", cell(other)).expect("write to string"),
    }
    out
}

fn check_config(c: &Config) -> Res<()> {
    check_prime(c.p)?;
    let limits = limits(c);
    if c.n < 2 || c.n > limits.max_n || c.p > limits.max_p {
        return Err(Error::Guardrail(format!(
            "n = {}, p = {} outside 2 <= n <= {}, p <= {}",
            c.n, c.p, limits.max_n, limits.max_p
        ))
        .into());
    }
    Ok(())
}

fn limits(c: &Config) -> Limits {
    if c.override_limits {
        Limits::unlimited()
    } else {
        Limits::default()
    }
}

/// Inline JSON, or `@path` to read it from a file.
fn source(text: &str) -> Res<String> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

fn value(text: &str) -> Res<Value> {
    serde_json::from_str(&source(text)?).map_err(|e| Failure::Malformed(e.to_string()))
}

/// Parses into the wire form `R`, then validates into `T`: shape errors are
/// malformed input, validation errors are violated preconditions.
fn from_value<R, T>(v: Value) -> Res<T>
where
    R: DeserializeOwned,
    T: TryFrom<R, Error = Error>,
{
    let repr: R = serde_json::from_value(v).map_err(|e| Failure::Malformed(e.to_string()))?;
    Ok(T::try_from(repr)?)
}

fn parse<R, T>(text: &str) -> Res<T>
where
    R: DeserializeOwned,
    T: TryFrom<R, Error = Error>,
{
    from_value::<R, T>(value(text)?)
}

/// Points may omit `"n"` (taken from `--n`) and may list `"coords"` as an
/// array aligned with `"support"`.
fn point_value(mut v: Value, n: usize) -> Res<ApartmentPoint> {
    if let Value::Object(map) = &mut v {
        map.entry("n").or_insert(json!(n));
        if let (Some(Value::Array(sup)), Some(Value::Array(coords))) = (map.get("support"), map.get("coords")) {
            if sup.len() != coords.len() {
                return Err(Failure::Malformed("\"support\" and \"coords\" differ in length".into()));
            }
            let keyed: serde_json::Map<String, Value> =
                sup.iter().zip(coords).map(|(k, c)| (k.to_string(), c.clone())).collect();
            map.insert("coords".into(), Value::Object(keyed));
        }
    }
    from_value::<ApartmentPointRepr, ApartmentPoint>(v)
}

fn point(text: &str, n: usize) -> Res<ApartmentPoint> {
    point_value(value(text)?, n)
}

fn lattice(text: &str) -> Res<LatticeClass> {
    parse::<LatticeClassRepr, LatticeClass>(text)
}

fn norm(text: &str) -> Res<NormPoint> {
    parse::<NormPointRepr, NormPoint>(text)
}

fn indices(text: &str) -> Res<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| Failure::Malformed(format!("bad index list {text:?}"))))
        .collect()
}

fn rat(text: &str) -> Res<Rat> {
    text.parse().map_err(|e| Failure::Malformed(format!("bad rational {text:?}: {e}")))
}

fn to_json<S: serde::Serialize>(x: &S) -> Value {
    serde_json::to_value(x).expect("serializable")
}

enum Group {
    Monomial(MonomialElement),
    Proj(ProjElement),
    Root(RootGroupElement),
}

impl Group {
    fn parse(g: &GroupArg) -> Res<Group> {
        if let Some(t) = &g.monomial {
            Ok(Group::Monomial(parse::<MonomialRepr, MonomialElement>(t)?))
        } else if let Some(t) = &g.matrix {
            Ok(Group::Proj(parse::<ProjElementRepr, ProjElement>(t)?))
        } else if let Some(t) = &g.root_element {
            Ok(Group::Root(parse::<RootElementRepr, RootGroupElement>(t)?))
        } else {
            Err(Failure::Malformed("no group element given".into()))
        }
    }

    fn to_proj(&self, p: u64, n: usize) -> Res<ProjElement> {
        match self {
            Group::Monomial(m) => Ok(m.to_proj(p)),
            Group::Proj(g) => Ok(g.clone()),
            Group::Root(u) => Ok(u.to_proj(n)?),
        }
    }
}

enum Target {
    Point(ApartmentPoint),
    Lattice(LatticeClass),
    Norm(NormPoint),
}

impl Target {
    fn parse(t: &TargetArg, n: usize) -> Res<Target> {
        if let Some(s) = &t.point {
            Ok(Target::Point(point(s, n)?))
        } else if let Some(s) = &t.lattice {
            Ok(Target::Lattice(lattice(s)?))
        } else if let Some(s) = &t.norm {
            Ok(Target::Norm(norm(s)?))
        } else {
            Err(Failure::Malformed("no point, lattice or norm given".into()))
        }
    }

    fn n(&self) -> usize {
        match self {
            Target::Point(x) => x.n(),
            Target::Lattice(l) => l.n(),
            Target::Norm(x) => x.n(),
        }
    }

    /// The prime the target carries, or the configured one for points.
    fn p(&self, config: &Config) -> u64 {
        match self {
            Target::Point(_) => config.p,
            Target::Lattice(l) => l.p(),
            Target::Norm(x) => x.p(),
        }
    }
}

fn execute(cli: &Cli) -> Res<Rendered> {
    let c = &cli.config;
    check_config(c)?;
    let (p, n) = (c.p, c.n);
    let out = match &cli.command {
        Command::Ball { radius, center, sidecar } => {
            let center = match center {
                Some(t) => lattice(t)?,
                None => LatticeClass::standard(p, n)?,
            };
            let graph = ball(&center, *radius, &limits(c))?;
            let (dot, labels) = graph.to_dot();
            if let Some(path) = sidecar {
                let text = serde_json::to_string_pretty(&labels).expect("serializable") + "\n";
                std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            }
            let mut rows = String::new();
            for (v, class) in graph.vertices.iter().enumerate() {
                writeln!(rows, "{}  {}  {}", class.label(), graph.depth[v], class.canonical_json()).expect("write to string");
            }
            Rendered { value: to_json(&graph), dot: Some(dot), table: Some(rows), default: Format::Dot, code: 0 }
        }
        Command::Adjacent { lattice: texts } => {
            if texts.len() != 2 {
                return Err(Failure::Malformed(format!("adjacent takes two --lattice values, got {}", texts.len())));
            }
            let (l, m) = (lattice(&texts[0])?, lattice(&texts[1])?);
            let pos = match rel_pos(&l, &m) {
                Ok(d) => to_json(&d),
                Err(Error::DistinctSpans) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            Rendered::json(json!({ "adjacent": adjacent(&l, &m), "rel_pos": pos }))
        }
        Command::Neighbors { lattice: text } => {
            let l = match text {
                Some(t) => lattice(t)?,
                None => LatticeClass::standard(p, n)?,
            };
            Rendered::json(to_json(&neighbors(&l, &limits(c))?))
        }
        Command::Simplex { lattices } => {
            let items = match value(lattices)? {
                Value::Array(items) => items,
                _ => return Err(Failure::Malformed("--lattices expects a JSON array".into())),
            };
            let classes = items
                .into_iter()
                .map(from_value::<LatticeClassRepr, LatticeClass>)
                .collect::<Res<Vec<_>>>()?;
            Rendered::json(json!({ "simplex": is_simplex(&classes)? }))
        }
        Command::Phi { lattice: text } => Rendered::json(to_json(&phi(&lattice(text)?)?)),
        Command::PhiInv { point: text } => Rendered::json(to_json(&phi_inv(&point(text, n)?, p)?)),
        Command::LimitRay { ray, certify } => {
            let mut v = value(ray)?;
            if let Some(base) = v.get_mut("base") {
                *base = to_json(&point_value(base.take(), n)?);
            }
            let ray: RaySpec = from_value::<RayRepr, RaySpec>(v)?;
            let limit = ray.limit();
            let mut certificate = Vec::new();
            for k in 1..=*certify {
                let nb = fundamental_neighborhood(&limit, k)?;
                certificate.push(json!({ "k": k, "neighborhood": to_json(&nb), "tail_start": ray.tail_start(&nb)? }));
            }
            Rendered::json(json!({ "limit": to_json(&limit), "certificate": certificate }))
        }
        Command::LimitLattices { seq } => {
            let seq: LatticeSeqSpec = parse::<LatticeSeqRepr, LatticeSeqSpec>(seq)?;
            let limit = seq.limit();
            Rendered::json(json!({ "limit": to_json(&limit), "point": to_json(&phi(&limit)?) }))
        }
        Command::FValue { root, point: text, oracle } => {
            let idx = indices(root)?;
            let [i, j] = idx[..] else {
                return Err(Failure::Malformed(format!("--root expects \"i,j\", got {root:?}")));
            };
            let a = Root::new(i, j)?;
            let f = match value(text)? {
                Value::Array(items) => {
                    let omega = items.into_iter().map(|v| point_value(v, n)).collect::<Res<Vec<_>>>()?;
                    if *oracle {
                        let mut best = None;
                        for x in &omega {
                            let f = f_value_oracle(a, x)?;
                            best = Some(best.map_or(f.clone(), |b: ExtVal| b.max(f)));
                        }
                        best.ok_or(Error::EmptySet)?
                    } else {
                        f_set(a, &omega)?
                    }
                }
                v => {
                    let x = point_value(v, n)?;
                    if *oracle {
                        f_value_oracle(a, &x)?
                    } else {
                        f_value(a, &x)?
                    }
                }
            };
            Rendered::json(to_json(&f))
        }
        Command::NbhdContains { point: text, nbhd, fundamental, around } => {
            let x = point(text, n)?;
            let spec: NeighborhoodSpec = match (nbhd, fundamental, around) {
                (Some(t), _, _) => parse::<NeighborhoodRepr, NeighborhoodSpec>(t)?,
                (None, Some(k), Some(center)) => fundamental_neighborhood(&point(center, n)?, *k)?,
                _ => return Err(Failure::Malformed("give --nbhd, or --fundamental with --around".into())),
            };
            Rendered::json(json!({ "contains": nbhd_contains(&spec, &x)?, "neighborhood": to_json(&spec) }))
        }
        Command::Chart { point: text, corner } => {
            let x = point(text, n)?;
            let i = match corner {
                Some(i) => *i,
                None => (1..=x.n()).find(|&i| in_corner(i, &x)).ok_or(Error::NotInCorner(0))?,
            };
            Rendered::json(to_json(&corner_chart(i, &x)?))
        }
        Command::ChartInv { chart } => {
            let chart: CornerChart =
                serde_json::from_value(value(chart)?).map_err(|e| Failure::Malformed(e.to_string()))?;
            Rendered::json(to_json(&corner_chart_inv(&chart)?))
        }
        Command::Contract { point: text, t } => Rendered::json(to_json(&contract(&point(text, n)?, &rat(t)?)?)),
        Command::Act { group, target } => {
            let g = Group::parse(group)?;
            let target = Target::parse(target, n)?;
            let tp = target.p(c);
            let result = match (&g, target) {
                (Group::Monomial(m), Target::Point(x)) => json!({ "point": to_json(&act_monomial(m, &x)?) }),
                (_, Target::Point(x)) => {
                    let moved = act(&g.to_proj(p, x.n())?, &from_apartment(&x, p)?)?;
                    match to_apartment(&moved) {
                        Ok(y) => json!({ "point": to_json(&y) }),
                        Err(_) => json!({ "norm": to_json(&moved) }),
                    }
                }
                (_, Target::Lattice(l)) => json!({ "lattice": to_json(&act(&g.to_proj(tp, l.n())?, &l)?) }),
                (_, Target::Norm(x)) => json!({ "norm": to_json(&act(&g.to_proj(tp, x.n())?, &x)?) }),
            };
            Rendered::json(result)
        }
        Command::Stabilizes { group, target } => {
            let g = Group::parse(group)?;
            let target = Target::parse(target, n)?;
            let tp = target.p(c);
            let h = g.to_proj(tp, target.n())?;
            let mut result = serde_json::Map::new();
            let fixed = match &target {
                Target::Point(x) => {
                    if let Group::Root(u) = &g {
                        result.insert("in_u_ax".into(), json!(in_u_ax(u, x, p)?));
                    }
                    stabilizes(&h, &from_apartment(x, p)?)?
                }
                Target::Lattice(l) => act(&h, l)? == *l,
                Target::Norm(x) => stabilizes(&h, x)?,
            };
            result.insert("stabilizes".into(), json!(fixed));
            Rendered::json(Value::Object(result))
        }
        Command::CommonApartment { x, y } => {
            let (x, y) = (lattice(x)?, lattice(y)?);
            let frame = common_frame(&x, &y)?;
            Rendered::json(json!({ "frame": to_json(&frame), "verified": frame.verify(&x, &y) }))
        }
        Command::Restrict { group, subset } => {
            let g = Group::parse(group)?.to_proj(p, n_of_group(group, n)?)?;
            let r = g.restrict(&indices(subset)?)?;
            let root = r.as_root_element().map(|u| to_json(&u));
            Rendered::json(json!({ "restriction": to_json(&r), "root_element": root }))
        }
        Command::Selftest { cases } => {
            let report = selftest::run(c.seed, *cases);
            let code = if report.passed() { 0 } else { 1 };
            let mut rows = String::new();
            for suite in &report.suites {
                let status = if suite.failures.is_empty() { "ok" } else { "FAILED" };
                writeln!(rows, "{:<24} {:>5} cases  {status}", suite.name, suite.cases).expect("write to string");
                for f in suite.failures.iter().take(3) {
                    writeln!(rows, "    {f}").expect("write to string");
                }
            }
            Rendered { code, table: Some(rows), ..Rendered::json(to_json(&report)) }
        }
    };
    Ok(out)
}

/// Dimension carried by a group element; root elements take `--n`.
fn n_of_group(g: &GroupArg, n: usize) -> Res<usize> {
    Ok(match Group::parse(g)? {
        Group::Monomial(m) => m.n(),
        Group::Proj(h) => h.n(),
        Group::Root(_) => n,
    })
}
