use std::fmt;
use std::io::{self, Write};

use crystal_zeta::config::Model;
use crystal_zeta::dist::{compound_poisson_law, riemann_zeta_distribution, CompoundPoissonLaw, LatticeDistribution};
use crystal_zeta::lattice::{betti, is_maximal_abelian, Violation, DEFAULT_TOL};
use crystal_zeta::presets::{self, PRESET_NAMES, TRIANGULAR_DEFAULT_N};
use crystal_zeta::verify::{brute_force_cp_pmf, compare_cf, sampler_vs_oracle, t_grid, CfComparison};
use crystal_zeta::walk::{simulate, simulate_endpoints, walk_cf, WalkSpec};
use crystal_zeta::zeta::{finite_euler_eval, finite_euler_series, shintani_eval, zeta, FiniteEulerSpec, TruncationPolicy};
use crystal_zeta::Error;
use num_complex::Complex64;
use serde_json::Value;

use crate::output::{int, num, sink, text, Table};
use crate::{
    Cli, Command, DistCmd, GridArgs, LatticeCmd, LawArgs, LawKind, ModelArgs, PresetCmd, SamplerArgs, VerifyCfArgs,
    VerifyCmd, WalkArgs, WalkCmd, ZetaArgs, ZetaCmd, ZetaFunction,
};

pub enum Status {
    Ok,
    VerificationFailed,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Io(e) => write!(f, "i/o: {e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<Status> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    let mut out = sink(cli.out.as_deref())?;
    let (table, status) = match &cli.command {
        Command::Preset(PresetCmd::List) => (preset_list()?, Status::Ok),
        Command::Preset(PresetCmd::Show { name, n }) => {
            let model = load(&ModelArgs { preset: Some(name.clone()), config: None, n: *n, weights: None })?;
            writeln!(out, "{}", model.config().to_json())?;
            out.flush()?;
            return Ok(Status::Ok);
        }
        Command::Lattice(LatticeCmd::Info(m)) => (lattice_info(&load(m)?), Status::Ok),
        Command::Lattice(LatticeCmd::Check(m)) => lattice_check(&load(m)?),
        Command::Zeta(ZetaCmd::Eval(args)) => (zeta_eval(args)?, Status::Ok),
        Command::Dist(DistCmd::Table(args)) => (dist_table(args)?, Status::Ok),
        Command::Dist(DistCmd::Cf(args)) => (dist_cf(&args.law, &args.grid)?, Status::Ok),
        Command::Dist(DistCmd::Levy(args)) => (dist_levy(args)?, Status::Ok),
        Command::Walk(WalkCmd::Simulate(args)) => (walk_simulate(args)?, Status::Ok),
        Command::Walk(WalkCmd::Cf(args)) => {
            let cmp = cf_comparison(&args.walk, &args.grid, args.c)?;
            (comparison_table(&cmp), Status::Ok)
        }
        Command::Verify(VerifyCmd::Cf(args)) => verify_cf(args)?,
        Command::Verify(VerifyCmd::Sampler(args)) => verify_sampler(args)?,
    };
    table.write(cli.format, &mut out)?;
    out.flush()?;
    Ok(status)
}

fn load(m: &ModelArgs) -> Result<Model> {
    match (&m.preset, &m.config) {
        (Some(name), None) if name == "triangular" => {
            Ok(presets::triangular(m.n.unwrap_or(TRIANGULAR_DEFAULT_N), m.weights.clone())?)
        }
        (Some(name), None) => {
            if m.n.is_some() || m.weights.is_some() {
                return Err(CliError::Usage("--n and --weights apply only to the triangular preset".into()));
            }
            Ok(presets::preset(name)?)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            Ok(Model::from_json(&text)?)
        }
        _ => Err(CliError::Usage("exactly one of --preset or --config is required".into())),
    }
}

fn preset_list() -> Result<Table> {
    let mut t = Table::new(["name", "description"]);
    for name in PRESET_NAMES {
        let m = presets::preset(name)?;
        t.push(vec![text(name), text(m.description())]);
    }
    Ok(t)
}

fn lattice_info(m: &Model) -> Table {
    let base = m.lattice().base();
    let mut t = Table::new(["name", "vertices", "oriented_edges", "betti", "dim", "maximal_abelian"]);
    t.push(vec![
        text(m.name()),
        int(base.vertex_count() as i64),
        int(base.edge_count() as i64),
        int(betti(base) as i64),
        int(m.dim() as i64),
        Value::Bool(is_maximal_abelian(m.lattice())),
    ]);
    t
}

fn lattice_check(m: &Model) -> (Table, Status) {
    let violations = m.realization().check_nondegenerate(DEFAULT_TOL);
    let mut t = Table::new(["violation", "first", "second"]);
    for v in &violations {
        let (kind, a, b) = match *v {
            Violation::CoincidentVertices { first, second } => ("coincident_vertices", first, Some(second)),
            Violation::ZeroEdge { edge } => ("zero_edge", edge, None),
            Violation::ParallelEdges { first, second, .. } => ("parallel_edges", first, Some(second)),
        };
        t.push(vec![text(kind), int(a as i64), b.map_or(Value::Null, |b| int(b as i64))]);
    }
    let status = if violations.is_empty() { Status::Ok } else { Status::VerificationFailed };
    (t, status)
}

fn parse_s(values: &[String]) -> Result<Vec<Complex64>> {
    values
        .iter()
        .map(|v| {
            v.parse::<Complex64>()
                .map_err(|_| CliError::Usage(format!("cannot parse {v:?} as a complex number (e.g. 2, 1.5i, 2-0.5i)")))
        })
        .collect()
}

fn one_argument(s: &[Complex64]) -> Result<Complex64> {
    match s {
        [z] => Ok(*z),
        _ => Err(CliError::Usage(format!("this function takes one complex argument, got {}", s.len()))),
    }
}

fn zeta_eval(args: &ZetaArgs) -> Result<Table> {
    let s = parse_s(&args.s)?;
    let policy = TruncationPolicy::default();
    let mut t = Table::new(["function", "re", "im", "abs", "tail_bound"]);
    let mut row = |name: &str, v: Complex64, tail: f64| {
        t.push(vec![text(name), num(v.re), num(v.im), num(v.norm()), num(tail)]);
    };
    match args.function {
        ZetaFunction::Euler => {
            let model = load(&args.model)?;
            let (spec, _) = model.euler()?;
            row("euler", finite_euler_eval(spec, &s)?, 0.0);
            if let Some(k) = args.series {
                let z = finite_euler_series(spec, &s, k)?;
                row("euler_series", z.value, z.tail_bound);
            }
        }
        ZetaFunction::Riemann => row("riemann", zeta(one_argument(&s)?), 0.0),
        ZetaFunction::LineTwoPoint => {
            let [alpha, beta] = args.weights2[..] else {
                return Err(CliError::Usage("--weights2 takes two values: alpha,beta".into()));
            };
            let spec = presets::line_two_point(alpha, beta, args.line_sigma, 2, 3)?;
            let z = shintani_eval(&spec, &[one_argument(&s)?], &policy)?;
            row("line_two_point", z.value, z.tail_bound);
        }
        ZetaFunction::LinePoisson => {
            let spec = presets::line_poisson(args.rate, args.line_sigma)?;
            let z = shintani_eval(&spec, &[one_argument(&s)?], &policy)?;
            row("line_poisson", z.value, z.tail_bound);
        }
    }
    Ok(t)
}

#[allow(clippy::large_enum_variant)]
enum Law {
    Discrete(LatticeDistribution),
    Compound(CompoundPoissonLaw),
}

fn resolve_law(args: &LawArgs) -> Result<Law> {
    match args.law {
        LawKind::Riemann => {
            let sigma = match args.sigma.as_deref() {
                None => 2.0,
                Some([s]) => *s,
                Some(_) => return Err(CliError::Usage("the Riemann law takes a single --sigma".into())),
            };
            Ok(Law::Discrete(riemann_zeta_distribution(sigma, args.n_max)?))
        }
        LawKind::Kernel => {
            let model = load(&args.model)?;
            let base = model.lattice().base();
            let x = match &args.vertex {
                Some(name) => base
                    .vertex_id(name)
                    .ok_or_else(|| CliError::Usage(format!("model has no vertex {name:?}")))?,
                None => 0,
            };
            let walk = model.finite_walk()?;
            Ok(Law::Discrete(walk.kernel(x)?.law().clone()))
        }
        LawKind::Euler => {
            let model = load(&args.model)?;
            let (spec, sigma) = model.euler()?;
            let alpha = args.alpha.clone().unwrap_or_else(|| spec.alpha().to_vec());
            let sigma = args.sigma.clone().unwrap_or_else(|| sigma.to_vec());
            if sigma.len() != spec.dim() {
                return Err(CliError::Usage(format!("--sigma needs {} components", spec.dim())));
            }
            let spec = FiniteEulerSpec::new(spec.dim(), alpha, spec.a().to_vec())?;
            Ok(Law::Compound(compound_poisson_law(&spec, &sigma)?))
        }
    }
}

fn point_header(prefix: &str, d: usize) -> Vec<String> {
    (0..d).map(|i| format!("{prefix}{i}")).collect()
}

fn dist_table(args: &LawArgs) -> Result<Table> {
    let entries: Vec<(Vec<f64>, f64)> = match resolve_law(args)? {
        Law::Discrete(d) => d.support().iter().map(|p| (p.point.clone(), p.mass)).collect(),
        Law::Compound(law) => brute_force_cp_pmf(&law, args.radius).entries(),
    };
    let d = entries.first().map_or(0, |e| e.0.len());
    let mut header = point_header("x", d);
    header.push("mass".into());
    let mut t = Table::new(header);
    for (p, m) in entries {
        let mut row: Vec<Value> = p.into_iter().map(num).collect();
        row.push(num(m));
        t.push(row);
    }
    Ok(t)
}

fn grid(g: &GridArgs, d: usize) -> Result<Vec<Vec<f64>>> {
    if g.grid_points == 0 {
        return Err(CliError::Usage("--grid-points must be positive".into()));
    }
    Ok(t_grid(d, g.grid_points, g.grid_radius))
}

fn dist_cf(args: &LawArgs, g: &GridArgs) -> Result<Table> {
    let law = resolve_law(args)?;
    let d = match &law {
        Law::Discrete(l) => l.support().first().map_or(1, |p| p.point.len()),
        Law::Compound(l) => l.dim(),
    };
    let mut header = point_header("t", d);
    header.extend(["re", "im", "abs"].map(String::from));
    let mut t = Table::new(header);
    for tv in grid(g, d)? {
        let f = match &law {
            Law::Discrete(l) => l.cf(&tv),
            Law::Compound(l) => l.cf(&tv)?,
        };
        let mut row: Vec<Value> = tv.into_iter().map(num).collect();
        row.extend([num(f.re), num(f.im), num(f.norm())]);
        t.push(row);
    }
    Ok(t)
}

fn dist_levy(args: &LawArgs) -> Result<Table> {
    let Law::Compound(law) = resolve_law(args)? else {
        return Err(CliError::Usage("Levy atoms exist only for --law euler".into()));
    };
    let mut header = vec!["factor".to_string(), "order".to_string()];
    header.extend(point_header("x", law.dim()));
    header.push("weight".into());
    let mut t = Table::new(header);
    for atom in &law.levy().atoms {
        let mut row = vec![int(atom.factor as i64), int(atom.order as i64)];
        row.extend(atom.location.iter().map(|&x| num(x)));
        row.push(num(atom.weight));
        t.push(row);
    }
    Ok(t)
}

fn walk_spec(args: &WalkArgs) -> Result<(Model, WalkSpec)> {
    let model = load(&args.model)?;
    let spec = model.walk(args.infinite)?;
    Ok((model, spec))
}

fn walk_simulate(args: &WalkArgs) -> Result<Table> {
    let (model, spec) = walk_spec(args)?;
    let d = model.dim();
    let base = model.lattice().base();
    let mut header = vec!["path".to_string(), "step".to_string(), "vertex".to_string()];
    header.extend(point_header("cell", d));
    header.extend(point_header("x", d));
    let mut t = Table::new(header);
    for tr in simulate(&spec, args.steps, args.paths, args.seed)? {
        for (k, (p, x)) in tr.points.iter().zip(&tr.realized).enumerate() {
            let mut row = vec![int(tr.path as i64), int(k as i64), text(base.vertex_name(p.base_vertex))];
            row.extend(p.cell.iter().map(|&c| int(c)));
            row.extend(x.iter().map(|&c| num(c)));
            t.push(row);
        }
    }
    Ok(t)
}

fn cf_comparison(args: &WalkArgs, g: &GridArgs, c: f64) -> Result<CfComparison> {
    let (model, spec) = walk_spec(args)?;
    if args.paths == 0 {
        return Err(CliError::Usage("--paths must be positive".into()));
    }
    let real = model.realization();
    let origin = real.realize(spec.start());
    let samples: Vec<Vec<f64>> = simulate_endpoints(&spec, args.steps, args.paths, args.seed)?
        .iter()
        .map(|p| real.realize(p).iter().zip(&origin).map(|(a, b)| a - b).collect())
        .collect();
    Ok(compare_cf(|t| walk_cf(&spec, args.steps, t), &samples, &grid(g, model.dim())?, c)?)
}

fn comparison_table(cmp: &CfComparison) -> Table {
    let d = cmp.grid.first().map_or(0, Vec::len);
    let mut header = point_header("t", d);
    header.extend(["analytic_re", "analytic_im", "empirical_re", "empirical_im", "abs_dev"].map(String::from));
    let mut t = Table::new(header);
    for ((tv, a), e) in cmp.grid.iter().zip(&cmp.analytic).zip(&cmp.empirical) {
        let mut row: Vec<Value> = tv.iter().map(|&x| num(x)).collect();
        row.extend([num(a.re), num(a.im), num(e.re), num(e.im), num((a - e).norm())]);
        t.push(row);
    }
    t
}

fn verify_cf(args: &VerifyCfArgs) -> Result<(Table, Status)> {
    let walk = WalkArgs {
        model: args.model.clone(),
        steps: args.steps,
        paths: args.paths,
        seed: args.seed,
        infinite: args.infinite,
    };
    let cmp = cf_comparison(&walk, &args.grid, args.c)?;
    eprintln!(
        "max_abs_dev = {:e}, threshold c/sqrt(N) = {:e} (N = {}): {}",
        cmp.max_abs_dev,
        cmp.threshold,
        cmp.n_samples,
        if cmp.passed { "pass" } else { "FAIL" }
    );
    let status = if cmp.passed { Status::Ok } else { Status::VerificationFailed };
    Ok((comparison_table(&cmp), status))
}

fn verify_sampler(args: &SamplerArgs) -> Result<(Table, Status)> {
    let law = load(&args.model)?.compound_law()?;
    let p = sampler_vs_oracle(&law, args.draws, args.radius, args.seed)?;
    let passed = p > args.level;
    let mut t = Table::new(["p_value", "draws", "radius", "level", "passed"]);
    t.push(vec![num(p), int(args.draws as i64), num(args.radius), num(args.level), Value::Bool(passed)]);
    Ok((t, if passed { Status::Ok } else { Status::VerificationFailed }))
}
