use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex;
use num_rational::Ratio;
use serde::Serialize;

use blaschke::circle::{find_superattracting_alpha, CircleLift, RotationEstimate, RotationInterval};
use blaschke::fmt::Sig17;
use blaschke::map::{ComplexJson, Connectivity, MapParams, RegionClass};
use blaschke::rays::{match_landings, trace_ray, verify_biaccessible, Basin};
use blaschke::render::{render_dynamical_plane, scan_tongues_with, Adjacency, BasinClass, ScanOptions, Viewport};
use blaschke::rotation::{enumerate_cycles, gen_interval, goldberg_realize, parse_word, word_classify, word_shift, AdmissibleWord, RationalAngle};
use blaschke::{Error, Params};

use crate::args::*;

pub enum Failure {
    Usage(String),
    Model(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

#[derive(Default)]
pub struct Outputs {
    pub stdout: String,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

type Res<T> = Result<T, Failure>;

macro_rules! w {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out.stdout, $($arg)*).expect("writing to a String")
    };
}

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Classify(_) => "classify",
        Command::Critical(_) => "critical",
        Command::Fixed(_) => "fixed",
        Command::Rotnum(_) => "rotnum",
        Command::Tongues(_) => "tongues",
        Command::Julia(_) => "julia",
        Command::Rays(_) => "rays",
        Command::Biaccess(_) => "biaccess",
        Command::Rotset(_) => "rotset",
        Command::Interval(_) => "interval",
        Command::Words(_) => "words",
    }
}

pub fn execute(cli: &Cli, out: &mut Outputs) -> Res<()> {
    match &cli.command {
        Command::Classify(a) => classify(cli, a, out)?,
        Command::Critical(a) => critical(cli, a, out)?,
        Command::Fixed(a) => fixed(cli, a, out)?,
        Command::Rotnum(a) => rotnum(cli, a, out)?,
        Command::Tongues(a) => tongues(cli, a, out)?,
        Command::Julia(a) => julia(cli, a, out)?,
        Command::Rays(a) => rays(a, out)?,
        Command::Biaccess(a) => biaccess(a, out)?,
        Command::Rotset(a) => rotset(a, out)?,
        Command::Interval(a) => out.stdout = to_json(&gen_interval(a.d, a.p, a.q)?) + "\n",
        Command::Words(a) => words(cli, a, out)?,
    }
    Ok(())
}

fn to_json<S: Serialize>(v: &S) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

fn write_out(path: &Path, bytes: &[u8], out: &mut Outputs) -> Res<()> {
    std::fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    out.files.push(path.display().to_string());
    Ok(())
}

/// Writes to `path` if given, else standard output.
fn emit(path: Option<&Path>, text: &str, out: &mut Outputs) -> Res<()> {
    match path {
        Some(p) => write_out(p, text.as_bytes(), out),
        None => {
            out.stdout.push_str(text);
            Ok(())
        }
    }
}

fn floats(s: &str, n: usize, flag: &str) -> Res<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("--{flag}: expected {n} comma-separated numbers")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Usage(format!("--{flag}: expected {n} comma-separated numbers")));
    }
    Ok(v)
}

fn dims(s: &str, flag: &str) -> Res<(usize, usize)> {
    let bad = || Failure::Usage(format!("--{flag}: expected AxB with positive integers"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

fn quarter(d: u32) -> f64 {
    1.0 / (4.0 * d as f64)
}

/// Builds the parameter from `--a` or `--r/--alpha`; `auto` needs the
/// rotation number of the target tongue.
fn params(p: &ParamArgs, tongue: Option<(u32, u32)>) -> Res<Params> {
    if let Some(a) = &p.a {
        let v = floats(a, 2, "a")?;
        return Ok(MapParams::new(p.d, Complex::new(v[0], v[1]))?);
    }
    let (Some(r), Some(alpha)) = (p.r, p.alpha.as_deref()) else {
        return Err(Failure::Usage("give either --a RE,IM or both --r and --alpha".into()));
    };
    if !(r.is_finite() && r >= 0.0) {
        return Err(Failure::Usage("--r must be a non-negative number".into()));
    }
    let alpha = if alpha == "auto" {
        let Some((pn, q)) = tongue else {
            return Err(Failure::Usage("--alpha auto needs --p and --q".into()));
        };
        let h = quarter(p.d);
        find_superattracting_alpha(p.d, r, pn as i64, q, (-h, h))?
    } else {
        let x: f64 = alpha.parse().map_err(|_| Failure::Usage("--alpha: expected a number or auto".into()))?;
        if !(x > -quarter(p.d) && x <= quarter(p.d)) {
            return Err(Failure::Usage("--alpha must lie in (-1/(4d), 1/(4d)]".into()));
        }
        x
    };
    Ok(MapParams::from_polar(p.d, r, alpha)?)
}

#[derive(Serialize)]
struct ParamEcho {
    d: u32,
    a: ComplexJson<f64>,
    r: Sig17,
    alpha: Sig17,
}

fn echo(m: &Params) -> ParamEcho {
    ParamEcho { d: m.d(), a: ComplexJson(m.a()), r: Sig17(m.r()), alpha: Sig17(m.alpha()) }
}

fn fmt_c(z: Complex<f64>) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn fmt_est(e: &RotationEstimate<f64>) -> String {
    let lock = e.rational_lock.map(|l| format!(" (locked {l})")).unwrap_or_default();
    format!("{} ± {:e}{lock}", e.value, e.error_bound)
}

fn classify(cli: &Cli, a: &ParamArgs, out: &mut Outputs) -> Res<()> {
    let m = params(a, None)?;
    let report = m.connectivity_verdict();
    #[derive(Serialize)]
    struct Out {
        params: ParamEcho,
        region: RegionClass,
        connectivity: Connectivity,
        rotation: Option<RotationEstimate<f64>>,
    }
    if cli.json {
        let o = Out { params: echo(&m), region: report.region, connectivity: report.verdict, rotation: report.rotation };
        w!(out, "{}", to_json(&o));
    } else {
        w!(out, "region: {}", report.region.name());
        w!(out, "connectivity: {:?}", report.verdict);
        if let Some(e) = &report.rotation {
            w!(out, "rotation: {}", fmt_est(e));
        }
    }
    Ok(())
}

fn critical(cli: &Cli, a: &ParamArgs, out: &mut Outputs) -> Res<()> {
    let m = params(a, None)?;
    let set = m.critical_set()?;
    let angles = if m.r() > 1.0 { CircleLift::from_params(&m)?.critical_angles() } else { Vec::new() };
    #[derive(Serialize)]
    struct Out {
        params: ParamEcho,
        c_plus: ComplexJson<f64>,
        c_minus: ComplexJson<f64>,
        critical_angles: Vec<Sig17>,
        cocritical: Option<(ComplexJson<f64>, ComplexJson<f64>)>,
    }
    if cli.json {
        let o = Out {
            params: echo(&m),
            c_plus: ComplexJson(set.free.0),
            c_minus: ComplexJson(set.free.1),
            critical_angles: angles.iter().map(|&x| Sig17(x)).collect(),
            cocritical: set.cocritical.map(|(u, v)| (ComplexJson(u), ComplexJson(v))),
        };
        w!(out, "{}", to_json(&o));
    } else {
        w!(out, "c+: {}", fmt_c(set.free.0));
        w!(out, "c-: {}", fmt_c(set.free.1));
        let list: Vec<String> = angles.iter().map(|x| x.to_string()).collect();
        w!(out, "critical angles: [{}]", list.join(", "));
    }
    Ok(())
}

fn fixed(cli: &Cli, a: &ParamArgs, out: &mut Outputs) -> Res<()> {
    let m = params(a, None)?;
    let pts = m.fixed_points()?;
    if cli.json {
        #[derive(Serialize)]
        struct Out<'a> {
            params: ParamEcho,
            fixed_points: &'a [blaschke::map::FixedPointRecord<f64>],
        }
        w!(out, "{}", to_json(&Out { params: echo(&m), fixed_points: &pts }));
    } else {
        for f in &pts {
            let z = f.point.finite().map_or("infinity".to_string(), fmt_c);
            w!(out, "{z}  multiplier {}  {:?}", fmt_c(f.multiplier), f.location);
        }
    }
    Ok(())
}

fn rotnum(cli: &Cli, a: &RotnumArgs, out: &mut Outputs) -> Res<()> {
    let m = params(&a.params, None)?;
    let lift = CircleLift::from_params(&m)?;
    if a.n_iter == 0 || a.grid == 0 {
        return Err(Failure::Usage("--n-iter and --grid must be positive".into()));
    }
    let est = lift.rotation_number(a.x0, a.n_iter, a.q_max);
    let interval = lift.rotation_interval(a.grid, a.n_iter);
    #[derive(Serialize)]
    struct Out {
        params: ParamEcho,
        region: RegionClass,
        estimate: RotationEstimate<f64>,
        interval: RotationInterval<f64>,
    }
    if cli.json {
        let o = Out { params: echo(&m), region: m.classify_region(), estimate: est, interval };
        w!(out, "{}", to_json(&o));
    } else {
        w!(out, "rotation number: {}", fmt_est(&est));
        w!(out, "interval: [{}, {}]", fmt_est(&interval.lo), fmt_est(&interval.hi));
    }
    Ok(())
}

fn tongues(cli: &Cli, a: &TonguesArgs, out: &mut Outputs) -> Res<()> {
    let rr = floats(&a.r_range, 2, "r-range")?;
    let ar = floats(&a.alpha_range, 2, "alpha-range")?;
    let res = dims(&a.res, "res")?;
    if !(rr[0] > 1.0 && rr[0] <= rr[1]) {
        return Err(Failure::Usage("--r-range needs 1 < lo <= hi".into()));
    }
    if !(ar[0] <= ar[1] && ar[0] > -quarter(a.d) && ar[1] <= quarter(a.d)) {
        return Err(Failure::Usage("--alpha-range must lie in (-1/(4d), 1/(4d)]".into()));
    }
    let opts = ScanOptions { n_iter: a.n_iter, grid_n: a.grid };
    let grid = scan_tongues_with(a.d, (rr[0], rr[1]), (ar[0], ar[1]), res, a.q_max, opts)?;
    let unknown = grid.cells.iter().filter(|c| c.adjacency == Some(Adjacency::Inconclusive)).count();
    if unknown > 0 {
        out.warnings.push(format!("{unknown} cells with inconclusive adjacency"));
    }
    let text = if cli.json { to_json(&grid) + "\n" } else { grid.to_csv() };
    emit(a.out.as_deref(), &text, out)
}

fn julia(cli: &Cli, a: &JuliaArgs, out: &mut Outputs) -> Res<()> {
    let m = params(&a.params, None)?;
    let v = floats(&a.viewport, 4, "viewport")?;
    let (w, h) = dims(&a.res, "res")?;
    if a.budget == 0 {
        return Err(Failure::Usage("--budget must be positive".into()));
    }
    let vp = Viewport::new(v[0], v[1], v[2], v[3], w, h).map_err(|_| Failure::Usage("--viewport needs min < max".into()))?;
    let raster = render_dynamical_plane(&m, vp, a.budget)?;
    write_out(&a.out, &raster.to_ppm(), out)?;
    let undecided = raster.count(BasinClass::Undecided);
    if undecided > 0 {
        out.warnings.push(format!("{undecided} undecided pixels"));
    }
    #[derive(Serialize)]
    struct Out {
        params: ParamEcho,
        width: usize,
        height: usize,
        to_zero: usize,
        to_infinity: usize,
        to_circle_cycle: usize,
        undecided: usize,
    }
    let o = Out {
        params: echo(&m),
        width: w,
        height: h,
        to_zero: raster.count(BasinClass::ToZero),
        to_infinity: raster.count(BasinClass::ToInfinity),
        to_circle_cycle: raster.count_cycle_pixels(),
        undecided,
    };
    if cli.json {
        w!(out, "{}", to_json(&o));
    } else {
        w!(out, 
            "{}x{}: zero {} infinity {} cycle {} undecided {}",
            o.width, o.height, o.to_zero, o.to_infinity, o.to_circle_cycle, o.undecided
        );
    }
    Ok(())
}

fn angle(s: &str) -> Res<RationalAngle> {
    s.parse().map_err(|_| Failure::Usage("--angle: expected num/den".into()))
}

fn rays(a: &RaysArgs, out: &mut Outputs) -> Res<()> {
    let m = params(&a.params, None)?;
    let basin = match a.basin {
        BasinArg::Zero => Basin::Zero,
        BasinArg::Infinity => Basin::Infinity,
    };
    let ray = trace_ray(&m, basin, angle(&a.angle)?, a.depth);
    out.warnings.extend((ray.landing.is_none()).then(|| format!("ray stopped: {:?}", ray.status)));
    emit(a.out.as_deref(), &ray.to_csv(), out)
}

fn biaccess(a: &BiaccessArgs, out: &mut Outputs) -> Res<()> {
    let m = params(&a.params, Some((a.p, a.q)))?;
    let report = match verify_biaccessible(&m, a.p, a.q, a.depth) {
        Err(Error::NotAdjacent) if m.classify_region() == RegionClass::Endomorphism => {
            // record where the rays land before failing
            if let Ok(r) = match_landings(&m, a.p, a.q, a.depth) {
                out.warnings.push(format!("without the adjacency precondition the rays give verdict {}", r.verdict));
            }
            return Err(Error::NotAdjacent.into());
        }
        r => r?,
    };
    emit(a.out.as_deref(), &(to_json(&report) + "\n"), out)
}

fn rotset(a: &RotsetArgs, out: &mut Outputs) -> Res<()> {
    let cycles = match (a.p, &a.delta) {
        (Some(p), Some(delta)) => {
            let delta = delta
                .split(',')
                .map(|s| s.trim().parse::<Ratio<i64>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::Usage("--delta: expected comma-separated rationals".into()))?;
            vec![goldberg_realize(a.n, p, a.q, &delta)?]
        }
        _ => enumerate_cycles(a.n, a.q)?,
    };
    let mut text = String::from("rho,points,deployment\n");
    for c in &cycles {
        let pts: Vec<String> = c.points.iter().map(ToString::to_string).collect();
        let dep: Vec<String> = c.deployment.iter().map(ToString::to_string).collect();
        writeln!(text, "{}/{},{},{}", c.p, c.q, pts.join(" "), dep.join(" ")).unwrap();
    }
    emit(a.out.as_deref(), &text, out)
}

fn words(cli: &Cli, a: &WordsArgs, out: &mut Outputs) -> Res<()> {
    let w = parse_word(&a.word)?;
    let class = word_classify(a.d, &w)?;
    let shifted = if a.shift {
        let word = AdmissibleWord::new(a.d, w)?;
        Some(word_shift(&word)?.to_string())
    } else {
        None
    };
    #[derive(Serialize)]
    struct Out {
        d: u32,
        word: String,
        #[serde(flatten)]
        class: blaschke::rotation::WordClass,
        #[serde(skip_serializing_if = "Option::is_none")]
        shift: Option<String>,
    }
    let o = Out { d: a.d, word: a.word.clone(), class, shift: shifted };
    if cli.json {
        w!(out, "{}", to_json(&o));
    } else {
        w!(out, 
            "admissible: {}  S: {}  S0: {}  S2: {}",
            o.class.admissible, o.class.in_s, o.class.in_s0, o.class.in_s2
        );
        if let Some(s) = &o.shift {
            w!(out, "shift: {s}");
        }
    }
    Ok(())
}
