use clap::{Arg, ArgAction, ArgMatches, Command};
use hom_dicke::biphoton::CoincidenceModel;
use hom_dicke::config::{ScanConfig, KEYS};
use hom_dicke::dicke::polariton_frequencies_closed_form;
use hom_dicke::output::{self, complex_list, emit_scan, emit_trace, to_json_string};
use hom_dicke::scan::{pole_trajectories, run_lambda_scan, run_spectrum_scan, Sample};
use hom_dicke::validate::validate;
use hom_dicke::Error;
use serde_json::{json, Map};
use std::path::PathBuf;
use std::process::ExitCode;

fn flag(key: &str) -> String {
    key.replace('_', "-")
}

fn common(cmd: Command) -> Command {
    let cmd = cmd
        .arg(Arg::new("config").long("config").short('c').value_name("FILE").help("key = value config file"))
        .arg(Arg::new("print-config").long("print-config").action(ArgAction::SetTrue).help("print the effective config and exit"));
    KEYS.iter().fold(cmd, |c, k| {
        c.arg(Arg::new(*k).long(flag(k)).value_name("VALUE").help(format!("override `{k}`")).allow_hyphen_values(true))
    })
}

fn cli() -> Command {
    Command::new("hom-dicke")
        .about("Two-photon coincidence signals of a driven Dicke sample")
        .version(output::VERSION)
        .subcommand_required(true)
        .subcommand(common(Command::new("spectrum").about("polariton eigenvalues and pole trajectories over the lambda grid")))
        .subcommand(common(Command::new("scan").about("coincidence traces, Fourier spectra and poles over the lambda grid")))
        .subcommand(common(
            Command::new("coincidence")
                .about("one coincidence trace")
                .arg(Arg::new("lambda").long("lambda").value_name("LAMBDA").help("coupling (default: first grid value)"))
                .arg(Arg::new("identity").long("identity").action(ArgAction::SetTrue).help("no sample, S = 1")),
        ))
        .subcommand(common(Command::new("poles").about("poles of the response and of the spectral product")))
        .subcommand(common(Command::new("validate").about("run the self-check suite and write a JSON report")))
}

fn load(m: &ArgMatches) -> hom_dicke::Result<ScanConfig> {
    let mut cfg = match m.get_one::<String>("config") {
        Some(p) => ScanConfig::from_file(&PathBuf::from(p))?,
        None => ScanConfig::default(),
    };
    for k in KEYS {
        if let Some(v) = m.get_one::<String>(k) {
            cfg.set(k, v)?;
        }
    }
    Ok(cfg)
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn spectrum(cfg: &ScanConfig) -> hom_dicke::Result<()> {
    cfg.validate()?;
    let (rows, skipped) = pole_trajectories(cfg)?;
    let mut eig = vec![];
    for r in &rows {
        let s = Sample::at(cfg, r.lambda)?;
        let cf = polariton_frequencies_closed_form(&s.params).ok().filter(|_| s.params.kappa == 0.0);
        eig.push((r.lambda, s.state.branch.name(), s.spectrum, cf));
    }
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("eigenvalues.csv"), output::eigenvalues_csv(&eig))?;
    std::fs::write(dir.join("poles.csv"), output::poles_csv(&rows))?;
    let meta = json!({
        "tool": output::TOOL,
        "version": output::VERSION,
        "config": output::config_json(cfg),
        "skipped": skipped.iter().map(|s| json!({"lambda": s.lambda, "reason": s.reason})).collect::<Vec<_>>(),
    });
    std::fs::write(dir.join("spectrum.json"), to_json_string(&meta))?;
    report(&[dir.join("eigenvalues.csv"), dir.join("poles.csv"), dir.join("spectrum.json")]);
    Ok(())
}

fn scan(cfg: &ScanConfig) -> hom_dicke::Result<()> {
    let traces = run_lambda_scan(cfg)?;
    let (spectra, _) = run_spectrum_scan(cfg)?;
    let (poles, pole_skips) = pole_trajectories(cfg)?;
    report(&emit_scan(cfg, &traces, &spectra, &poles, &pole_skips)?);
    for s in &traces.skipped {
        eprintln!("skipped lambda={}: {}", s.lambda, s.reason);
    }
    Ok(())
}

fn coincidence(cfg: &ScanConfig, m: &ArgMatches) -> hom_dicke::Result<()> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let grid = cfg.t_grid.values();
    let mut extra = Map::new();
    let trace = if m.get_flag("identity") {
        let meta = hom_dicke::biphoton::TraceMeta { params: None, branch: None, spec };
        CoincidenceModel::identity(spec, cfg.quadrature)?.trace(&grid, meta)?
    } else {
        let lambda = match m.get_one::<String>("lambda") {
            Some(v) => v.parse().map_err(|_| Error::Config(format!("bad lambda {v:?}")))?,
            None => cfg.lambdas()[0],
        };
        let s = Sample::at(cfg, lambda)?;
        let model = s.model(spec, cfg)?;
        extra.insert("response_poles".into(), complex_list(s.response.poles()));
        extra.insert("product_poles".into(), complex_list(&model.poles.rho()));
        model.trace(&grid, s.meta(spec))?
    };
    report(&emit_trace(&cfg.output.dir, "coincidence", &trace, cfg, extra)?);
    Ok(())
}

fn poles(cfg: &ScanConfig) -> hom_dicke::Result<()> {
    let (rows, skipped) = pole_trajectories(cfg)?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("poles.csv"), output::poles_csv(&rows))?;
    let meta = json!({
        "tool": output::TOOL,
        "version": output::VERSION,
        "config": output::config_json(cfg),
        "skipped": skipped.iter().map(|s| json!({"lambda": s.lambda, "reason": s.reason})).collect::<Vec<_>>(),
    });
    std::fs::write(dir.join("poles.json"), to_json_string(&meta))?;
    report(&[dir.join("poles.csv"), dir.join("poles.json")]);
    Ok(())
}

fn run_validate(cfg: &ScanConfig) -> hom_dicke::Result<bool> {
    let r = validate(cfg);
    let body = to_json_string(&serde_json::to_value(&r).expect("report serializes"));
    print!("{body}");
    if std::fs::create_dir_all(&cfg.output.dir).is_ok() {
        std::fs::write(cfg.output.dir.join("validation.json"), &body)?;
    }
    for c in &r.checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(r.passed)
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, m) = matches.subcommand().expect("subcommand required");
    let cfg = match load(m) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if m.get_flag("print-config") {
        print!("{}", cfg.to_canonical_string());
        return ExitCode::SUCCESS;
    }
    let res = match name {
        "spectrum" => spectrum(&cfg),
        "scan" => scan(&cfg),
        "coincidence" => coincidence(&cfg, m),
        "poles" => poles(&cfg),
        "validate" => match run_validate(&cfg) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
        _ => unreachable!(),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidParams(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
