mod args;
mod run;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::Cli;
use run::{Failure, Outputs};

/// Captured result of one invocation.
struct Response {
    code: u8,
    stdout: String,
    stderr: String,
}

fn main() -> ExitCode {
    let r = dispatch(std::env::args().collect());
    print!("{}", r.stdout);
    eprint!("{}", r.stderr);
    ExitCode::from(r.code)
}

fn usage(msg: &str) -> Response {
    Response { code: 2, stdout: String::new(), stderr: format!("usage error: {msg}\n") }
}

fn dispatch(argv: Vec<String>) -> Response {
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(msg) => return usage(&msg),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        // --help / --version
        Err(e) if !e.use_stderr() => return Response { code: 0, stdout: e.to_string(), stderr: String::new() },
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid invocation");
            return usage(line.trim_start_matches("error: "));
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            return Response { code: 3, stdout: String::new(), stderr: format!("error: ThreadPool: {e}\n") };
        }
    }
    let start = Instant::now();
    let mut out = Outputs::default();
    let result = run::execute(&cli, &mut out);
    let mut stderr = String::new();
    let code = match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => return usage(&msg),
        Err(Failure::Model(e)) => {
            stderr += &format!("error: {}: {e}\n", e.name());
            out.stdout.clear();
            3
        }
        Err(Failure::Io(msg)) => {
            stderr += &format!("error: Io: {msg}\n");
            out.stdout.clear();
            3
        }
    };
    for w in &out.warnings {
        stderr += &format!("warning: {w}\n");
    }
    if cli.report {
        stderr += &report(&cli, start, &out.files, code);
    }
    Response { code, stdout: out.stdout, stderr }
}

fn report(cli: &Cli, start: Instant, files: &[String], code: u8) -> String {
    let report = serde_json::json!({
        "subcommand": run::name(&cli.command),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "outputs": files,
        "exit_code": code,
    });
    format!("{report}\n")
}

/// Appends `--key value` for each `key=value` line of the `--config` file
/// whose flag is absent from `argv`.
fn merge_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let path = argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_owned)
        }
    });
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("--config {path}: {e}"))?;
    let given = |key: &str| {
        let flag = format!("--{key}");
        argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("--config {path}: line {} is not key=value", n + 1));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" || given(&key) {
            continue;
        }
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    let mut out = argv;
    out.extend(extra);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Response {
        dispatch(std::iter::once("blaschke").chain(args.iter().copied()).map(String::from).collect())
    }

    fn json(o: &Response) -> serde_json::Value {
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn classify_json() {
        let o = run(&["classify", "--d", "2", "--a", "3,0", "--json"]);
        assert_eq!(o.code, 0);
        let v = json(&o);
        assert_eq!(v["region"], "Endomorphism");
        assert_eq!(v["connectivity"], "Connected");
        assert_eq!(v["params"]["d"], 2);
        assert_eq!(v["params"]["a"]["re"], 3.0);
    }

    #[test]
    fn usage_errors_exit_2_on_one_line() {
        for args in [
            &["tongues", "--d", "0", "--r-range", "2,3", "--alpha-range", "0,0.1"][..],
            &["classify", "--d", "2", "--a", "3,0", "--bogus"],
            &["classify", "--d", "2", "--r", "2", "--alpha", "0.2"],
            &["classify", "--d", "2", "--a", "3"],
            &["classify", "--d", "2"],
            &["critical", "--d", "2", "--r", "2", "--alpha", "auto"],
            &["julia", "--d", "2", "--r", "2", "--alpha", "0", "--res", "0x10", "--out", "/dev/null"],
            &[],
        ] {
            let o = run(args);
            assert_eq!(o.code, 2, "{args:?}");
            assert_eq!(o.stderr.trim_end().lines().count(), 1, "{args:?}: {}", o.stderr);
            assert!(o.stdout.is_empty());
        }
    }

    #[test]
    fn module_errors_exit_3_with_name() {
        let o = run(&["words", "--d", "2", "--word", "5"]);
        assert_eq!(o.code, 3);
        assert!(o.stderr.starts_with("error: SymbolOutOfRange:"));
        let o = run(&["critical", "--d", "2", "--a", "0,0"]);
        assert_eq!(o.code, 3);
        assert!(o.stderr.starts_with("error: DegenerateParameter:"));
        let o = run(&["biaccess", "--d", "2", "--a", "0.5,0", "--p", "1", "--q", "2"]);
        assert_eq!(o.code, 3);
        assert!(o.stderr.contains("NotAdjacent"));
    }

    #[test]
    fn interval_exact_json() {
        let o = run(&["interval", "--d", "2", "--p", "1", "--q", "2"]);
        assert_eq!(o.code, 0);
        let v = json(&o);
        assert_eq!(v["a"], "11/18");
        assert_eq!(v["b"], "17/27");
        assert_eq!(v["t1"], "5/8");
        assert_eq!(v["itinerary"], serde_json::json!([0, 1]));
    }

    #[test]
    fn rotset_csv() {
        let o = run(&["rotset", "--n", "3", "--q", "2"]);
        assert_eq!(o.code, 0);
        let text = o.stdout.clone();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, ["rho,points,deployment", "1/2,1/8 3/8,1 0", "1/2,1/4 3/4,1/2 1/2", "1/2,5/8 7/8,0 1"]);
        let o = run(&["rotset", "--n", "3", "--q", "2", "--p", "1", "--delta", "0,1"]);
        assert_eq!(o.stdout.lines().nth(1), Some("1/2,5/8 7/8,0 1"));
    }

    #[test]
    fn words_classification() {
        let o = run(&["words", "--d", "2", "--word", "_0,2,1", "--json", "--shift"]);
        assert_eq!(o.code, 0);
        let v = json(&o);
        assert_eq!(v["admissible"], true);
        assert_eq!(v["in_s"], false);
        assert_eq!(v["shift"], "2,1");
    }

    #[test]
    fn biaccess_smoke_case() {
        let o = run(&["biaccess", "--d", "1", "--r", "4", "--alpha", "0", "--p", "0", "--q", "1"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = json(&o);
        assert_eq!(v["verdict"], true);
        assert_eq!(v["infinity_angles"], serde_json::json!(["0/1"]));
    }

    #[test]
    fn biaccess_auto_alpha_runs_solver_first() {
        // the solved parameter fails the adjacency precondition; the error
        // must still be a clean module error
        let o = run(&["biaccess", "--d", "2", "--r", "2", "--alpha", "auto", "--p", "1", "--q", "2"]);
        assert_eq!(o.code, 3);
        assert!(o.stderr.lines().any(|l| l.starts_with("error: NotAdjacent")));
    }

    #[test]
    fn config_file_fills_missing_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "# parameters\nd = 2\nr=2\nalpha=0.03\njson=true\n").unwrap();
        let from_cfg = run(&["critical", "--config", cfg.to_str().unwrap()]);
        let explicit = run(&["critical", "--d", "2", "--r", "2", "--alpha", "0.03", "--json"]);
        assert_eq!(from_cfg.code, 0, "{}", from_cfg.stderr);
        assert_eq!(from_cfg.stdout, explicit.stdout);
        // flags win
        let o = run(&["critical", "--config", cfg.to_str().unwrap(), "--d", "1"]);
        assert_eq!(json(&o)["params"]["d"], 1);
    }

    #[test]
    fn julia_writes_p6() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("j.ppm");
        let o = run(&[
            "julia", "--d", "2", "--r", "2", "--alpha", "0.03", "--viewport", "-2,2,-2,2", "--res", "40x30", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.code, 0);
        let bytes = std::fs::read(&out).unwrap();
        let header = b"P6\n40 30\n255\n";
        assert!(bytes.starts_with(header));
        assert_eq!(bytes.len(), header.len() + 3 * 40 * 30);
    }

    #[test]
    fn rays_csv_lands() {
        let o = run(&["rays", "--d", "1", "--a", "4,0", "--angle", "0/1", "--depth", "60"]);
        assert_eq!(o.code, 0);
        let text = o.stdout.clone();
        assert!(text.starts_with("k,potential,re,im\n"));
        let last: Vec<f64> = text.lines().last().unwrap().split(',').skip(2).map(|s| s.parse().unwrap()).collect();
        assert!((last[0] + 1.0).abs() < 1e-7 && last[1].abs() < 1e-12);
    }

    #[test]
    fn tongues_repeatable() {
        let args = ["tongues", "--d", "1", "--r-range", "1.5,4", "--alpha-range", "-0.2,0.2", "--res", "8x8"];
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.code, 0);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stdout.lines().count(), 65);
    }

    #[test]
    fn rotnum_and_fixed() {
        let v = json(&run(&["rotnum", "--d", "1", "--r", "4", "--alpha", "0", "--json"]));
        assert_eq!(v["estimate"]["rational_lock"], serde_json::json!({"p": 0, "q": 1}));
        let v = json(&run(&["fixed", "--d", "1", "--a", "4,0", "--json"]));
        assert_eq!(v["fixed_points"].as_array().unwrap().len(), 4);
    }
}
