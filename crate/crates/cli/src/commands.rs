use gnp_core::asymptotics::highprec::{EdgeSource, FloatModel, FloatOptions};
use gnp_core::asymptotics::{bounds_report, classify_regime, moment_approx, zone2_moment_approx, RegimeThresholds};
use gnp_core::counting::{brute_force_oracle, component_counts};
use gnp_core::exact::{parse_rational, rational_to_f64};
use gnp_core::montecarlo::{run_simulation, SimConfig};
use gnp_core::probability::{factorial_moments_from_pmf, isolated_vertex_probability, ComponentTable, ConnectivityTable};
use gnp_core::rug::ops::PowAssign;
use gnp_core::rug::{Float, Rational};
use gnp_core::{GraphParams, EXACT_N_LIMIT};
use serde_json::json;

use crate::output::{exact_cells, Cell, Table};
use crate::{CliError, ConvergeArgs, CountsArgs, ExactArgs, SimulateArgs, What, ZoneArg};

/// Component tables cost O(n^3) big-integer operations; cap them well below
/// the connectivity-only limit.
pub const PMF_N_LIMIT: u32 = 120;
pub const BOUNDS_N_LIMIT: u32 = 100_000;
pub const FLOAT_N_LIMIT: u32 = 5000;

fn limit(what: &'static str, n: u32, cap: u32) -> Result<(), CliError> {
    if n > cap {
        return Err(gnp_core::Error::ResourceLimit { what, n: n as u64, limit: cap as u64 }.into());
    }
    Ok(())
}

/// Exact commands take `p` only as `num/den`.
pub fn exact_p(s: &str) -> Result<Rational, CliError> {
    if !s.contains('/') {
        return Err(CliError::Usage(format!("exact commands take p as num/den, got {s:?}")));
    }
    Ok(parse_rational(s)?)
}

/// Float commands take `p` only as a decimal.
pub fn decimal(s: &str, what: &str) -> Result<f64, CliError> {
    if s.contains('/') {
        return Err(CliError::Usage(format!("{what} is a decimal here, got {s:?}")));
    }
    let v: f64 = s.trim().parse().map_err(|_| CliError::Usage(format!("cannot parse {what} = {s:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("{what} must be finite")));
    }
    Ok(v)
}

fn params(n: u32, p: &str) -> Result<GraphParams, CliError> {
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    Ok(GraphParams::new(n, exact_p(p)?)?)
}

pub fn exact(args: &ExactArgs) -> Result<Table, CliError> {
    let params = params(args.n, &args.p)?;
    let n = args.n;
    limit("exact evaluation n", n, EXACT_N_LIMIT)?;
    let needs_table = matches!(args.what, What::Pmf | What::Moments | What::All);
    if needs_table {
        limit("component distribution n", n, PMF_N_LIMIT)?;
    }
    let s_max = match args.smax {
        Some(s) if s > n => return Err(CliError::Usage(format!("--smax {s} exceeds n = {n}"))),
        Some(s) => s,
        None => n.min(2),
    };

    let mut t = Table::new("exact", "exact", ["quantity", "n", "s", "exact", "decimal"]);
    t.meta("p", json!(args.p));
    let row = |t: &mut Table, q: &str, s: Option<u32>, v: &Rational| {
        let [r, f] = exact_cells(v);
        t.push(vec![Cell::Text(q.into()), Cell::Int(n as i64), s.map_or(Cell::Empty, |s| Cell::Int(s as i64)), r, f]);
    };

    let table = needs_table.then(|| ComponentTable::build(&params));
    if matches!(args.what, What::Pn | What::All) {
        let pn = match &table {
            Some(t) => t.connectivity().probability(n),
            None => ConnectivityTable::build(&params).probability(n),
        };
        row(&mut t, "pn", None, pn.value());
    }
    if matches!(args.what, What::Pi | What::All) {
        row(&mut t, "pi", None, isolated_vertex_probability(&params)?.value());
    }
    if let Some(table) = &table {
        let pmf = table.pmf(n)?;
        if matches!(args.what, What::Pmf | What::All) {
            for s in 1..=n {
                row(&mut t, "pmf", Some(s), pmf.prob(s).value());
            }
        }
        if matches!(args.what, What::Moments | What::All) {
            let m = factorial_moments_from_pmf(&pmf, s_max)?;
            for s in 0..=s_max {
                row(&mut t, "shifted_moment", Some(s), &m.shifted[s as usize]);
            }
            for s in 0..=s_max {
                row(&mut t, "moment", Some(s), &m.plain[s as usize]);
            }
        }
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CountTableKind {
    All,
    Edges,
    Connected,
    Components,
    Forests,
}

pub fn counts(args: &CountsArgs) -> Result<Table, CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let c = component_counts(args.n)?;
    let n = Cell::Int(args.n as i64);
    let mut t = Table::new("counts", "exact", ["table", "n", "k", "s", "count"]);
    let want = |k: CountTableKind| args.table == CountTableKind::All || args.table == k;
    let int = |v: usize| Cell::Int(v as i64);
    if want(CountTableKind::Edges) {
        for (k, v) in c.edge_counts.iter().enumerate() {
            t.push(vec![Cell::Text("A".into()), n.clone(), int(k), Cell::Empty, Cell::Big(v.clone())]);
        }
    }
    if want(CountTableKind::Connected) {
        for (k, v) in c.connected_counts.iter().enumerate() {
            if *v != 0 {
                t.push(vec![Cell::Text("B".into()), n.clone(), int(k), Cell::Empty, Cell::Big(v.clone())]);
            }
        }
    }
    if want(CountTableKind::Components) {
        for (s, row) in c.component_counts.iter().enumerate().skip(1) {
            for (k, v) in row.iter().enumerate() {
                if *v != 0 {
                    t.push(vec![Cell::Text("A_s".into()), n.clone(), int(k), int(s), Cell::Big(v.clone())]);
                }
            }
        }
    }
    if want(CountTableKind::Forests) {
        for (s, v) in c.forest_counts.iter().enumerate().skip(1) {
            t.push(vec![Cell::Text("F".into()), n.clone(), int(args.n as usize - s), int(s), Cell::Big(v.clone())]);
        }
    }
    Ok(t)
}

/// `a..b` (inclusive) or a single `n`.
pub fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Usage(format!("expected n or a..b, got {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim_start_matches('=').trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn bounds(range: &str, ps: &str, use_exact: bool) -> Result<(Table, bool), CliError> {
    let (lo, hi) = parse_range(range)?;
    limit("bounds n", hi, BOUNDS_N_LIMIT)?;
    let ps = ps.split(',').map(exact_p).collect::<Result<Vec<_>, _>>()?;
    let names = ["lower_pn", "upper_pn", "lower_pi", "upper_pi", "cross_pi_next"];
    let mut columns: Vec<String> =
        ["n", "p", "pn", "pn_decimal", "pi", "pi_decimal", "pi_next", "pi_next_decimal"].map(String::from).into();
    for name in names {
        for suffix in ["", "_decimal", "_vacuous", "_holds"] {
            columns.push(format!("{name}{suffix}"));
        }
    }
    columns.push("pass".into());
    let mut t = Table::new("bounds", "exact", columns);
    let mut all_pass = true;
    for p in &ps {
        for n in lo..=hi {
            let params = GraphParams::new(n, p.clone())?;
            let r = bounds_report(&params, use_exact)?;
            let mut row = vec![Cell::Int(n as i64), Cell::Ratio(p.clone())];
            for v in [&r.exact_pn, &r.exact_pi, &r.exact_pi_next] {
                match v {
                    Some(v) => row.extend(exact_cells(v.value())),
                    None => row.extend([Cell::Empty, Cell::Empty]),
                }
            }
            for check in r.checks() {
                match &check.bound {
                    Some(b) => row.extend([Cell::Ratio(b.clone()), Cell::Float(rational_to_f64(b))]),
                    None => row.extend([Cell::Empty, Cell::Empty]),
                }
                row.push(Cell::Bool(check.vacuous));
                row.push(check.holds.map_or(Cell::Empty, Cell::Bool));
            }
            let pass = r.all_pass();
            all_pass &= pass;
            row.push(Cell::Bool(pass));
            t.push(row);
        }
    }
    Ok((t, all_pass))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("bad {what} list {s:?}"))))
        .collect()
}

pub fn converge(args: &ConvergeArgs, precision_bits: u32) -> Result<Table, CliError> {
    let ns = parse_list(&args.n, "n")?;
    let ss = parse_list(&args.s, "s")?;
    if ns.iter().any(|&n| n < 2) {
        return Err(CliError::Usage("every n must be at least 2".into()));
    }
    for &n in &ns {
        limit("float evaluation n", n, FLOAT_N_LIMIT)?;
    }
    let value = |name: &str, v: &Option<String>| -> Result<f64, CliError> {
        let s = v.as_deref().ok_or_else(|| CliError::Usage(format!("this zone needs --{name}")))?;
        decimal(s, name)
    };
    let s_max = ss.iter().copied().max().unwrap_or(0);
    let opts = FloatOptions { output_bits: precision_bits, s_max, j_max: 0 };
    let mut t = Table::new("converge", "float", ["n", "p", "s", "exact", "approx", "ratio", "zone"]);
    t.meta("precision_bits", json!(precision_bits));
    t.meta("zone", json!(args.zone.as_str()));

    for &n in &ns {
        let source = match args.zone {
            ZoneArg::NqnConst => EdgeSource::NqnTarget(value("alpha", &args.alpha)?),
            ZoneArg::QnConst => EdgeSource::Decimal(value("c", &args.c)? / n as f64),
            ZoneArg::FixedP => EdgeSource::Decimal(value("p", &args.p)?),
        };
        let model = FloatModel::build(n, &source, opts)?;
        let prec = model.working_bits();
        let p = model.p().to_f64();
        let zone = classify_regime(n as u64, p, &RegimeThresholds::default())?.zone;
        for &s in &ss {
            let exact = model.shifted_moment(n, s);
            let approx = match args.zone {
                ZoneArg::NqnConst => {
                    let mut a = model.n_q_pow_n();
                    a.pow_assign(s);
                    a
                }
                ZoneArg::QnConst => Float::with_val(prec, zone2_moment_approx(n as u64, p, s)?),
                ZoneArg::FixedP => Float::with_val(prec, moment_approx(n as u64, p, s)?),
            };
            let ratio = Float::with_val(prec, exact / &approx);
            t.push(vec![
                Cell::Int(n as i64),
                Cell::Float(p),
                Cell::Int(s as i64),
                Cell::Float(exact.to_f64()),
                Cell::Float(approx.to_f64()),
                Cell::Float(ratio.to_f64()),
                Cell::Text(zone.as_str().into()),
            ]);
        }
    }
    Ok(t)
}

pub fn simulate(args: &SimulateArgs) -> Result<Table, CliError> {
    let p = decimal(&args.p, "p")?;
    let cfg = SimConfig { n: args.n, p, samples: args.samples, seed: args.seed, streams: args.streams };
    let est = run_simulation(&cfg)?;
    let mut t = Table::new("simulate", "simulation", ["quantity", "s", "estimate", "std_error", "count"]);
    t.meta("n", json!(args.n));
    t.meta("p", json!(p));
    t.meta("samples", json!(args.samples));
    t.meta("seed", json!(args.seed));
    t.meta("streams", json!(args.streams));
    let total = est.samples as f64;
    let fraction = |t: &mut Table, q: &str, s: Option<u32>, count: u64| {
        let f = count as f64 / total;
        let se = (f * (1.0 - f) / total).sqrt();
        t.push(vec![
            Cell::Text(q.into()),
            s.map_or(Cell::Empty, |s| Cell::Int(s as i64)),
            Cell::Float(f),
            Cell::Float(se),
            Cell::Int(count as i64),
        ]);
    };
    fraction(&mut t, "connected_fraction", None, est.component_counts[1]);
    fraction(&mut t, "isolated_fraction", None, est.isolated_count);
    for (s, &c) in est.component_counts.iter().enumerate().skip(1) {
        if c > 0 {
            fraction(&mut t, "pmf", Some(s as u32), c);
        }
    }
    for s in 1..=args.smax {
        let (mean, se) = est.shifted_moment(s);
        t.push(vec![Cell::Text("shifted_moment".into()), Cell::Int(s as i64), Cell::Float(mean), Cell::Float(se), Cell::Empty]);
    }
    Ok(t)
}

pub fn oracle(n: u32, p: &str, max_n: u32) -> Result<Table, CliError> {
    let params = params(n, p)?;
    let r = brute_force_oracle(&params, max_n)?;
    let mut t = Table::new("oracle", "exact", ["quantity", "n", "s", "exact", "decimal"]);
    t.meta("p", json!(p));
    let nn = Cell::Int(n as i64);
    for s in 1..=n {
        let [a, b] = exact_cells(r.pmf.prob(s).value());
        t.push(vec![Cell::Text("pmf".into()), nn.clone(), Cell::Int(s as i64), a, b]);
    }
    for (q, v) in [("pn", &r.connected), ("pi", &r.isolated)] {
        let [a, b] = exact_cells(v.value());
        t.push(vec![Cell::Text(q.into()), nn.clone(), Cell::Empty, a, b]);
    }
    Ok(t)
}
