//! Command-line front end for the heatdr library.
//!
//! Subcommands: `eval`, `dist`, `deriv-r`, `table`, `verify <suite>`.
//! Argument parsing is hand-rolled key/value flags; a plain-text config file
//! (`key=value` per line) can supply the group, with command-line flags
//! winning on conflict. Exit codes: 0 success, 2 usage/parse error,
//! 3 numeric failure, 4 contract violation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

use heatdr::bounds_asymptotics::{
    self as bounds, ou_potential, sharpness_report, SharpnessBranch,
};
use heatdr::distance_calculus::{self, MultiIndex};
use heatdr::heat_kernel::{
    eval as kernel_eval, heat_equation_sides, mass_functional, radial_derivative,
    radial_derivatives_upto, time_derivative,
};
use heatdr::mixed_derivatives::{decomposition_sides, remark_nor_witness};
use heatdr::radial_symbolics::{gaussian_shift, radial_expansion, radial_laplacian, structural_check};
use heatdr::real::fl;
use heatdr::{Error, GroupPoint, HTypeGroup, KernelParams, QuadratureConfig, StandardFamily};

const USAGE: &str = "\
heatdr — heat kernels on Damek-Ricci spaces

USAGE:
  heatdr eval   <group> --t T --r R [--deriv-r K] [--deriv-t M] [--csv] [--prec BITS]
  heatdr dist   <group> [--x v1,v2,..] [--z v1,..] [--a A]
  heatdr deriv-r <group> --J j1,j2,.. [--x ..] [--z ..] [--a A]
  heatdr table  (--fjk K | --aj P,Q | --radlap M <group>)
  heatdr verify <suite> <group> [--grid-r MIN,MAX,N[,log|lin]] [--grid-t ..]
                [--k K] [--J j1,..] [--tol TOL] [--out FILE.csv] [--prec BITS]

  <group> is either --family real_hyperbolic --nu N
                  | --family heisenberg --m M
                  | --family quaternionic --m M
                  | --mu MU --nu NU --J-matrices 'a,b,..;c,d,..' (row-major, one matrix per ';')
                  | --config FILE (key=value lines: family, m, nu, mu, J; flags win)

  verify suites: pde | mass | bounds | sharpness | decomposition | asymptotics
               | prop-ls | ou | structure

  CSV reports use a fixed header `r,t,lhs,rhs,ratio` (eval: `r,t,value,deriv_r,deriv_t`),
  UTF-8 with LF line endings. The environment variable HEATDR_PRECISION_BITS
  overrides the default working precision (113 bits); --prec wins over it.

EXIT CODES: 0 ok, 2 usage error, 3 numeric failure, 4 contract violation.";

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
    Contract(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Contract(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownFamily(_)
            | Error::BadParameter(_)
            | Error::DimensionMismatch(_)
            | Error::NotSkew(_)
            | Error::NotCliffordAnticommuting(_, _)
            | Error::OddMu(_)
            | Error::OutOfRange(_) => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

struct Opts {
    flags: BTreeMap<String, String>,
}

impl Opts {
    fn get(&self, key: &str) -> Option<&str> {
        self.flags.get(key).map(|s| s.as_str())
    }

    fn f64(&self, key: &str) -> CliResult<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("--{key} expects a number, got `{s}`"))),
        }
    }

    fn require_f64(&self, key: &str) -> CliResult<f64> {
        self.f64(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required flag --{key}")))
    }

    fn usize(&self, key: &str) -> CliResult<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<usize>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("--{key} expects an integer, got `{s}`"))),
        }
    }

    fn f64_list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => {
                if s.trim().is_empty() {
                    return Ok(Some(Vec::new()));
                }
                s.split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map(Some)
                    .map_err(|_| CliError::Usage(format!("--{key} expects a comma list, got `{s}`")))
            }
        }
    }

    fn usize_list(&self, key: &str) -> CliResult<Option<Vec<usize>>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("--{key} expects integers, got `{s}`"))),
        }
    }
}

fn parse_args(args: &[String]) -> CliResult<(Vec<String>, Opts)> {
    let mut positional = Vec::new();
    let mut flags = BTreeMap::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(name) = a.strip_prefix("--") {
            if name == "csv" || name == "help" {
                flags.insert(name.to_string(), "true".to_string());
                i += 1;
                continue;
            }
            let value = args
                .get(i + 1)
                .ok_or_else(|| CliError::Usage(format!("flag --{name} needs a value")))?;
            flags.insert(name.to_string(), value.clone());
            i += 2;
        } else {
            positional.push(a.clone());
            i += 1;
        }
    }
    // config file values fill in behind explicit flags
    if let Some(path) = flags.get("config").cloned() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("bad config line `{line}`")))?;
            let key = match k.trim() {
                "J" => "J-matrices".to_string(),
                other => other.to_string(),
            };
            flags.entry(key).or_insert_with(|| v.trim().to_string());
        }
    }
    Ok((positional, Opts { flags }))
}

fn build_group(opts: &Opts) -> CliResult<HTypeGroup> {
    if let Some(fam) = opts.get("family") {
        let family: StandardFamily = fam.parse()?;
        let m = match family {
            StandardFamily::RealHyperbolic => opts
                .usize("nu")?
                .ok_or_else(|| CliError::Usage("real_hyperbolic needs --nu".into()))?
                as i64,
            _ => opts
                .usize("m")?
                .ok_or_else(|| CliError::Usage(format!("{family} needs --m")))?
                as i64,
        };
        return Ok(HTypeGroup::standard(family, m)?);
    }
    let mu = opts
        .usize("mu")?
        .ok_or_else(|| CliError::Usage("need --family or explicit --mu/--nu".into()))?;
    let nu = opts
        .usize("nu")?
        .ok_or_else(|| CliError::Usage("explicit group needs --nu".into()))?;
    let j_maps = match opts.get("J-matrices") {
        None if mu == 0 => Vec::new(),
        None => return Err(CliError::Usage("explicit group with mu > 0 needs --J-matrices".into())),
        Some(s) => s
            .split(';')
            .map(|mat| {
                mat.split(',')
                    .map(|e| e.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage("bad --J-matrices entry".into()))?,
    };
    Ok(HTypeGroup::new(mu, nu, j_maps)?)
}

fn precision(opts: &Opts) -> CliResult<u32> {
    if let Some(p) = opts.usize("prec")? {
        return Ok(p as u32);
    }
    if let Ok(env) = std::env::var("HEATDR_PRECISION_BITS") {
        return env
            .parse::<u32>()
            .map_err(|_| CliError::Usage(format!("HEATDR_PRECISION_BITS=`{env}` is not a number")));
    }
    Ok(113)
}

fn quad_config(opts: &Opts) -> CliResult<QuadratureConfig> {
    let mut cfg = QuadratureConfig::with_precision(precision(opts)?);
    if let Some(panels) = opts.usize("max-panels")? {
        cfg.max_panels = panels;
    }
    if let Some(rt) = opts.f64("quad-tol")? {
        cfg.rel_tol = rt;
    }
    Ok(cfg)
}

fn parse_grid(opts: &Opts, key: &str, default: (f64, f64, usize)) -> CliResult<Vec<f64>> {
    let spec = match opts.get(key) {
        None => {
            let (lo, hi, n) = default;
            return Ok(log_points(lo, hi, n));
        }
        Some(s) => s,
    };
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() < 3 {
        return Err(CliError::Usage(format!("--{key} expects MIN,MAX,N[,log|lin]")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| CliError::Usage(format!("bad --{key}")))?;
    let hi: f64 = parts[1].parse().map_err(|_| CliError::Usage(format!("bad --{key}")))?;
    let n: usize = parts[2].parse().map_err(|_| CliError::Usage(format!("bad --{key}")))?;
    if lo <= 0.0 || hi < lo || n < 1 {
        return Err(CliError::Usage(format!("--{key} needs 0 < MIN <= MAX and N >= 1")));
    }
    let log = parts.get(3).map(|&m| m != "lin").unwrap_or(true);
    Ok(if log {
        log_points(lo, hi, n)
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64)
            .collect()
    })
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn point_from_opts(group: &HTypeGroup, opts: &Opts, prec: u32) -> CliResult<GroupPoint> {
    let x = opts.f64_list("x")?.unwrap_or_else(|| vec![0.0; group.mu()]);
    let z = opts.f64_list("z")?.unwrap_or_else(|| vec![0.0; group.nu()]);
    let a = opts.f64("a")?.unwrap_or(1.0);
    Ok(group.point(&x, &z, a, prec)?)
}

fn write_report(opts: &Opts, csv: &str) -> CliResult<()> {
    if let Some(path) = opts.get("out") {
        std::fs::write(path, csv)
            .map_err(|e| CliError::Usage(format!("cannot write {path}: {e}")))?;
    }
    Ok(())
}

// --- subcommands ---------------------------------------------------------------

fn cmd_eval(opts: &Opts) -> CliResult<()> {
    let group = build_group(opts)?;
    let params = KernelParams::new(&group);
    let cfg = quad_config(opts)?;
    let prec = cfg.precision_bits;
    let t = opts.require_f64("t")?;
    let r = opts.require_f64("r")?;
    if t <= 0.0 || r < 0.0 {
        return Err(CliError::Usage("need t > 0 and r >= 0".into()));
    }
    let k = opts.usize("deriv-r")?.unwrap_or(0);
    let m = opts.usize("deriv-t")?.unwrap_or(0);
    let tf = fl(prec, t);
    let rf = fl(prec, r);
    let value = if m == 0 && k == 0 {
        kernel_eval(&params, &tf, &rf, &cfg)?
    } else if m == 0 {
        radial_derivative(&params, k, &tf, &rf, &cfg)?
    } else {
        time_derivative(&params, m, k, &tf, &rf, &cfg)?
    };
    if opts.get("csv").is_some() {
        println!("r,t,value,deriv_r,deriv_t");
        println!("{r},{t},{:e},{k},{m}", value.to_f64());
    } else {
        println!("{:e}", value.to_f64());
    }
    Ok(())
}

fn cmd_dist(opts: &Opts) -> CliResult<()> {
    let group = build_group(opts)?;
    let prec = precision(opts)?;
    let g = point_from_opts(&group, opts, prec)?;
    let r = distance_calculus::distance(&group, &g);
    println!("{:e}", r.to_f64());
    Ok(())
}

fn cmd_deriv_r(opts: &Opts) -> CliResult<()> {
    let group = build_group(opts)?;
    let prec = precision(opts)?;
    let g = point_from_opts(&group, opts, prec)?;
    let idx = opts
        .usize_list("J")?
        .ok_or_else(|| CliError::Usage("deriv-r needs --J j1,j2,..".into()))?;
    let j = MultiIndex::new(&group, idx)?;
    let v = distance_calculus::distance_derivative(&group, &j, &g)?;
    println!("{:e}", v.to_f64());
    Ok(())
}

fn cmd_table(opts: &Opts) -> CliResult<()> {
    if let Some(k) = opts.usize("fjk")? {
        if k == 0 || k > 12 {
            return Err(CliError::Usage("--fjk expects 1 <= K <= 12".into()));
        }
        let table = radial_expansion(k);
        for j in 1..=k {
            println!("f_{{{j},{k}}} = {}", table.coeff(j).render());
        }
        return Ok(());
    }
    if let Some(pq) = opts.usize_list("aj")? {
        if pq.len() != 2 || pq[0] + pq[1] == 0 || pq[0] + pq[1] > 12 {
            return Err(CliError::Usage("--aj expects P,Q with 1 <= P+Q <= 12".into()));
        }
        let exp = gaussian_shift(pq[0], pq[1]);
        for j in 1..=exp.len() {
            println!("a_{j} = {}", exp.coeff(j).render());
        }
        return Ok(());
    }
    if let Some(m) = opts.usize("radlap")? {
        if m == 0 || m > 6 {
            return Err(CliError::Usage("--radlap expects 1 <= M <= 6".into()));
        }
        let group = build_group(opts)?;
        let lap = radial_laplacian(m, group.mu(), group.nu());
        for j in 1..=2 * m {
            println!("c_{{{j},{m}}} = {}", lap.coeff(j).render());
        }
        return Ok(());
    }
    Err(CliError::Usage("table needs one of --fjk K, --aj P,Q, --radlap M".into()))
}

struct SuiteOutput {
    csv: String,
    worst: (f64, f64, f64),
    pass: bool,
    label: String,
}

fn verify_pde(group: &HTypeGroup, opts: &Opts) -> CliResult<SuiteOutput> {
    let params = KernelParams::new(group);
    let cfg = quad_config(opts)?;
    let tol = opts.f64("tol")?.unwrap_or(1e-8);
    let rs = parse_grid(opts, "grid-r", (0.05, 20.0, 20))?;
    let ts = parse_grid(opts, "grid-t", (0.1, 5.0, 12))?;
    let prec = cfg.precision_bits;
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    let mut worst = (0.0, 0.0, 0.0f64);
    for &r in &rs {
        for &t in &ts {
            let (dt, lap) =
                heat_equation_sides(&params, &fl(prec, t), &fl(prec, r), &cfg)?;
            let num = (dt.clone() + &lap).abs();
            let den = dt.clone().abs() + lap.clone().abs();
            let res = (num / den).to_f64();
            let _ = writeln!(csv, "{r},{t},{:e},{:e},{res:e}", dt.to_f64(), lap.to_f64());
            if res > worst.2 {
                worst = (r, t, res);
            }
        }
    }
    Ok(SuiteOutput {
        csv,
        worst,
        pass: worst.2 < tol,
        label: format!("max heat-equation residual {:.3e} (tolerance {:.1e})", worst.2, tol),
    })
}

fn verify_mass(group: &HTypeGroup, opts: &Opts) -> CliResult<SuiteOutput> {
    let params = KernelParams::new(group);
    let mut cfg = quad_config(opts)?;
    cfg.rel_tol = cfg.rel_tol.min(1e-9);
    let tol = opts.f64("tol")?.unwrap_or(1e-6);
    let prec = cfg.precision_bits;
    let m1 = mass_functional(&params, &fl(prec, 1), &cfg)?;
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    let mut worst = (0.0, 0.0, 0.0f64);
    for t in [0.25, 0.5, 2.0, 4.0] {
        let mt = mass_functional(&params, &fl(prec, t), &cfg)?;
        let ratio = (mt.to_f64() / m1.to_f64()) as f64;
        let dev = (ratio - 1.0).abs();
        let _ = writeln!(csv, "0,{t},{:e},{:e},{ratio}", mt.to_f64(), m1.to_f64());
        if dev > worst.2 {
            worst = (0.0, t, dev);
        }
    }
    Ok(SuiteOutput {
        csv,
        worst,
        pass: worst.2 < tol,
        label: format!("max |M(t)/M(1) - 1| = {:.3e} (tolerance {:.1e})", worst.2, tol),
    })
}

fn verify_bounds(group: &HTypeGroup, opts: &Opts) -> CliResult<SuiteOutput> {
    let params = KernelParams::new(group);
    let cfg = quad_config(opts)?;
    let kmax = opts.usize("k")?.unwrap_or(4).clamp(1, 6);
    let rs = parse_grid(opts, "grid-r", (0.01, 20.0, 16))?;
    let ts = parse_grid(opts, "grid-t", (0.05, 5.0, 10))?;
    let prec = cfg.precision_bits;
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    let mut worst = (0.0, 0.0, 0.0f64);
    for &r in &rs {
        for &t in &ts {
            let rf = fl(prec, r);
            let tf = fl(prec, t);
            let derivs = radial_derivatives_upto(&params, kmax, &tf, &rf, &cfg)?;
            for (k, d) in derivs.iter().enumerate().skip(1) {
                let env = bounds::psi(k, &rf, &tf) * &derivs[0];
                let ratio = (d.clone().abs() / &env).to_f64();
                let _ = writeln!(csv, "{r},{t},{:e},{:e},{ratio:e}", d.to_f64(), env.to_f64());
                if !ratio.is_finite() {
                    return Err(CliError::Numeric(format!("ratio not finite at ({r},{t})")));
                }
                if ratio > worst.2 {
                    worst = (r, t, ratio);
                }
            }
        }
    }
    Ok(SuiteOutput {
        csv,
        worst,
        pass: worst.2.is_finite(),
        label: format!("sup |∂^k h|/(Ψ_k h) finite up to k = {kmax}; largest {:.4}", worst.2),
    })
}

fn verify_sharpness(group: &HTypeGroup, opts: &Opts) -> CliResult<SuiteOutput> {
    let params = KernelParams::new(group);
    let cfg = quad_config(opts)?;
    let kmax = opts.usize("k")?.unwrap_or(3).clamp(1, 4);
    let gamma = opts.f64("gamma")?.unwrap_or(50.0);
    let alpha = opts.f64("alpha")?.unwrap_or(1.5);
    let floor = opts.f64("tol")?.unwrap_or(1e-6);
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    let mut worst = (0.0, 0.0, f64::INFINITY);
    let mut pass = true;
    for k in 1..=kmax {
        for branch in [SharpnessBranch::LargeRadius, SharpnessBranch::SmallRadius] {
            let rep = sharpness_report(&params, k, alpha, gamma, branch, &cfg)?;
            let _ = writeln!(
                csv,
                "{},{},inf_deriv_{k},psi_{k}_h,{:e}",
                rep.worst_point.0, rep.worst_point.1, rep.inf_ratio
            );
            pass &= rep.inf_ratio > floor;
            if rep.inf_ratio < worst.2 {
                worst = (rep.worst_point.0, rep.worst_point.1, rep.inf_ratio);
            }
        }
    }
    Ok(SuiteOutput {
        csv,
        worst,
        pass,
        label: format!("inf |∂^k h|/(Ψ_k h) = {:.3e} over both branches (floor {floor:.1e})", worst.2),
    })
}

fn verify_decomposition(group: &HTypeGroup, opts: &Opts) -> CliResult<SuiteOutput> {
    let params = KernelParams::new(group);
    let cfg = quad_config(opts)?;
    let tol = opts.f64("tol")?.unwrap_or(1e-7);
    let prec = cfg.precision_bits;
    let j_specs: Vec<Vec<usize>> = match opts.usize_list("J")? {
        Some(j) => vec![j],
        None => {
            let n = group.dim();
            let mut out = vec![vec![0], vec![0, 0]];
            if n > 2 {
                out.push(vec![n - 1, 0, n - 1]);
                out.push(vec![0, n - 1, 0, n - 1]);
            }
            if group.mu() >= 2 {
                out.push(vec![1, 2, group.mu() + 1]);
                out.push(vec![1, 1, 2, group.mu() + 1]);
            }
            out
        }
    };
    let xhat: Vec<f64> = (0..group.mu()).map(|i| [1.0, 0.6, -0.4, 0.3][i % 4]).collect();
    let zhat: Vec<f64> = (0..group.nu()).map(|i| [0.7, -0.5, 0.3][i % 3]).collect();
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    let mut worst = (0.0, 0.0, 0.0f64);
    for spec in &j_specs {
        let j = MultiIndex::new(group, spec.clone())?;
        for &r in &[0.01, 0.1, 0.5, 1.0] {
            let g = distance_calculus::point_with_radius(group, &xhat, &zhat, 0.45, r, prec)?;
            for &t in &[0.05, 0.5, 2.0] {
                let (lhs, rhs, residual) =
                    decomposition_sides(group, &params, &j, &fl(prec, t), &g, &cfg)?;
                let res = residual.to_f64();
                let _ = writeln!(csv, "{r},{t},{:e},{:e},{res:e}", lhs.to_f64(), rhs.to_f64());
                if res > worst.2 {
                    worst = (r, t, res);
                }
            }
        }
    }
    Ok(SuiteOutput {
        csv,
        worst,
        pass: worst.2 <= tol,
        label: format!("max decomposition residual {:.3e} (tolerance {:.1e})", worst.2, tol),
    })
}

fn verify_asymptotics(group: &HTypeGroup, opts: &Opts) -> CliResult<SuiteOutput> {
    let params = KernelParams::new(group);
    let cfg = quad_config(opts)?;
    let prec = cfg.precision_bits;
    let tol = opts.f64("tol")?.unwrap_or(0.15);
    let t = fl(prec, 1);
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    let mut worst = (0.0, 0.0, 0.0f64);
    let mut pass = true;
    for k in 0..=3usize {
        let mut errs = Vec::new();
        for r in [25.0, 100.0] {
            let v = radial_derivative(&params, k, &t, &fl(prec, r), &cfg)?;
            let want = bounds::asymptotic_radial(&params, k, &t, &fl(prec, r));
            let ratio = (v.clone() / &want).to_f64();
            let _ = writeln!(csv, "{r},1,{:e},{:e},{ratio}", v.to_f64(), want.to_f64());
            errs.push((ratio - 1.0).abs());
        }
        pass &= errs[1] < tol && (errs[1] < errs[0] || errs[1] < 1e-9);
        if errs[1] > worst.2 {
            worst = (100.0, 1.0, errs[1]);
        }
    }
    // fixed-t first time derivative
    let v = time_derivative(&params, 1, 0, &t, &fl(prec, 60), &cfg)?;
    let want = bounds::asymptotic_fixed_t(&params, 1, 0, &t, &fl(prec, 60));
    let ratio = (v.clone() / &want).to_f64();
    let _ = writeln!(csv, "60,1,{:e},{:e},{ratio}", v.to_f64(), want.to_f64());
    pass &= (ratio - 1.0).abs() < tol;
    Ok(SuiteOutput {
        csv,
        worst,
        pass,
        label: format!("asymptotic ratios within 1±{tol} (worst deviation {:.3})", worst.2),
    })
}

fn verify_prop_ls(group: &HTypeGroup, opts: &Opts) -> CliResult<SuiteOutput> {
    let params = KernelParams::new(group);
    let cfg = quad_config(opts)?;
    let prec = cfg.precision_bits;
    let rs = parse_grid(opts, "grid-r", (0.05, 20.0, 14))?;
    let ts = parse_grid(opts, "grid-t", (0.1, 5.0, 8))?;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    for &r in &rs {
        for &t in &ts {
            cells.push((r, t));
        }
    }
    for t in [0.5, 1.0, 2.0] {
        cells.push((params.q_f64() * t, t));
    }
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    let mut worst = (0.0, 0.0, 0.0f64);
    for (r, t) in cells {
        let rf = fl(prec, r);
        let tf = fl(prec, t);
        let dt = heatdr::heat_kernel::dt_direct(&params, &tf, &rf, &cfg)?;
        let h = kernel_eval(&params, &tf, &rf, &cfg)?;
        let q2 = params.q_f64() * params.q_f64() / 4.0;
        let gap = (r * r / (4.0 * t * t) - q2).abs() + 1.0 / t;
        let env = h * fl(prec, gap);
        let ratio = (dt.clone().abs() / &env).to_f64();
        let _ = writeln!(csv, "{r},{t},{:e},{:e},{ratio:e}", dt.to_f64(), env.to_f64());
        if !ratio.is_finite() {
            return Err(CliError::Numeric(format!("ratio not finite at ({r},{t})")));
        }
        if ratio > worst.2 {
            worst = (r, t, ratio);
        }
    }
    Ok(SuiteOutput {
        csv,
        worst,
        pass: worst.2.is_finite(),
        label: format!("sup |∂_t h|/((|r²/4t²-Q²/4|+1/t)h) = {:.4}", worst.2),
    })
}

fn verify_ou(group: &HTypeGroup, opts: &Opts) -> CliResult<SuiteOutput> {
    let params = KernelParams::new(group);
    let cfg = quad_config(opts)?;
    let prec = cfg.precision_bits;
    let tol = opts.f64("tol")?.unwrap_or(0.15);
    let t = fl(prec, 1);
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    let mut vals = Vec::new();
    for r in [40.0, 80.0] {
        let v = ou_potential(&params, &t, &fl(prec, r), &cfg)?;
        let target = r * r / 16.0;
        let normalized = (v.clone() / fl(prec, target)).to_f64();
        let _ = writeln!(csv, "{r},1,{:e},{:e},{normalized}", v.to_f64(), target);
        vals.push(normalized);
    }
    let pass = (vals[1] - 1.0).abs() < tol && (vals[1] - 1.0).abs() < (vals[0] - 1.0).abs();
    Ok(SuiteOutput {
        csv,
        worst: (80.0, 1.0, (vals[1] - 1.0).abs()),
        pass,
        label: format!("V_t(80)·16t²/r² = {:.4} (within 1±{tol}, improving from r=40)", vals[1]),
    })
}

fn verify_structure(opts: &Opts) -> CliResult<SuiteOutput> {
    let k = opts.usize("k")?.unwrap_or(8);
    if k == 0 || k > 12 {
        return Err(CliError::Usage("structure suite expects --k in 1..=12".into()));
    }
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    for kk in 1..=k {
        let rep = structural_check(kk).map_err(|e| CliError::Contract(e.to_string()))?;
        let _ = writeln!(csv, "0,0,f_orders_{kk},expected,{:?}", rep.vanishing_orders);
    }
    Ok(SuiteOutput {
        csv,
        worst: (0.0, 0.0, 0.0),
        pass: true,
        label: format!("f_{{j,k}} structure verified for k <= {k}"),
    })
}

fn verify_nor(group: &HTypeGroup, opts: &Opts) -> CliResult<SuiteOutput> {
    let params = KernelParams::new(group);
    let cfg = quad_config(opts)?;
    let rep = remark_nor_witness(group, &params, &cfg)?;
    let mut csv = String::from("r,t,lhs,rhs,ratio\n");
    for (i, r) in [0.1f64, 0.03, 0.01].into_iter().enumerate() {
        let _ = writeln!(csv, "{r},{},xjh_over_psitilde_h,floor,{}", r.sqrt(), rep.derivative_ratio[i]);
    }
    let pass = rep.derivative_ratio.iter().all(|&v| v > 0.01);
    Ok(SuiteOutput {
        csv,
        worst: (0.01, 0.1, rep.derivative_ratio[2]),
        pass,
        label: format!(
            "mixed witness J={:?}: derivative floor {:.3}, psi ratio {:.3} at r=0.01",
            rep.j.0, rep.derivative_ratio[2], rep.psi_ratio[2]
        ),
    })
}

fn cmd_verify(suite: &str, opts: &Opts) -> CliResult<()> {
    let needs_group = suite != "structure";
    let out = if needs_group {
        let group = build_group(opts)?;
        match suite {
            "pde" => verify_pde(&group, opts)?,
            "mass" => verify_mass(&group, opts)?,
            "bounds" => verify_bounds(&group, opts)?,
            "sharpness" => verify_sharpness(&group, opts)?,
            "decomposition" => verify_decomposition(&group, opts)?,
            "asymptotics" => verify_asymptotics(&group, opts)?,
            "prop-ls" => verify_prop_ls(&group, opts)?,
            "ou" => verify_ou(&group, opts)?,
            "nor" => verify_nor(&group, opts)?,
            other => return Err(CliError::Usage(format!("unknown suite `{other}`"))),
        }
    } else {
        verify_structure(opts)?
    };
    write_report(opts, &out.csv)?;
    if out.pass {
        println!("PASS {suite}: {}", out.label);
        Ok(())
    } else {
        println!(
            "FAIL {suite}: {} — worst at (r, t) = ({}, {}), value {:e}",
            out.label, out.worst.0, out.worst.1, out.worst.2
        );
        Err(CliError::Contract(out.label))
    }
}

fn run() -> CliResult<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        return Err(CliError::Usage("no subcommand given".into()));
    }
    let (positional, opts) = parse_args(&args)?;
    if opts.get("help").is_some() || positional.first().map(|s| s.as_str()) == Some("help") {
        println!("{USAGE}");
        return Ok(());
    }
    match positional.first().map(|s| s.as_str()) {
        Some("eval") => cmd_eval(&opts),
        Some("dist") => cmd_dist(&opts),
        Some("deriv-r") => cmd_deriv_r(&opts),
        Some("table") => cmd_table(&opts),
        Some("verify") => {
            let suite = positional
                .get(1)
                .ok_or_else(|| CliError::Usage("verify needs a suite name".into()))?;
            cmd_verify(suite, &opts)
        }
        Some(other) => Err(CliError::Usage(format!("unknown subcommand `{other}`"))),
        None => Err(CliError::Usage("no subcommand given".into())),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => {
                    eprintln!("error: {msg}");
                    eprintln!("{USAGE}");
                }
                CliError::Numeric(msg) => eprintln!("numeric failure: {msg}"),
                CliError::Contract(msg) => eprintln!("contract violation: {msg}"),
            }
            ExitCode::from(e.code())
        }
    }
}
