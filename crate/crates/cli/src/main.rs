//! `hzcap`: command-line access to complexes, persistence, maps, dynamics,
//! and the bundled scenarios.
//!
//! Exit status: 0 when every verdict passes, 2 when a mathematical check
//! fails, 1 on malformed input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hzcap::chain_map::verify_factorization;
use hzcap::dynamics::admissible::check_admissible;
use hzcap::dynamics::chords::{chord_scan, min_return_time, ChordKind, ScanConfig};
use hzcap::dynamics::constructions::radial_capacity_lower_bound;
use hzcap::dynamics::HamiltonianModel;
use hzcap::input::{load_input, InputFile};
use hzcap::morse::{morse_betti, window_morse_homology};
use hzcap::scenarios::{run_scenario, run_suite, SCENARIOS};
use hzcap::{barcode, exact_triangle, verify_chain_map, window_homology, Error, FilteredChainMap, Window};

#[derive(Parser)]
#[command(name = "hzcap", version, about = "Filtered complexes, window persistence, chords, and capacity scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the complex axioms of a complex, instance, pearl, or Morse file.
    Validate { file: PathBuf },
    /// Window homology HF^(a,b).
    Homology {
        file: PathBuf,
        #[arg(long, value_parser = parse_window, value_name = "A,B")]
        window: Window,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Bars born in a fundamental domain.
    Barcode {
        file: PathBuf,
        #[arg(long, value_parser = parse_window, value_name = "A,B")]
        domain: Window,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Exactness of HF(a,b) -> HF(a,c) -> HF(b,c) -> HF(a,b)[-1].
    Triangle {
        file: PathBuf,
        #[arg(long, value_parser = parse_cuts, value_name = "A,B,C")]
        cuts: (f64, f64, f64),
    },
    /// Filtered chain maps.
    #[command(subcommand)]
    Map(MapCommand),
    /// Chords of a Hamiltonian model starting on its Lagrangian.
    ChordScan {
        hamfile: PathBuf,
        #[arg(long, value_name = "T")]
        tmax: f64,
        #[arg(long, default_value_t = 17, value_name = "N")]
        grid: usize,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Admissibility conditions of a Hamiltonian model.
    Admissible {
        hamfile: PathBuf,
        #[arg(long, value_name = "E")]
        eta: f64,
    },
    /// Certified capacity lower bounds.
    #[command(subcommand)]
    Capacity(CapacityCommand),
    /// Run a bundled scenario, or `all`.
    Scenario {
        name: String,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MapCommand {
    /// Chain-map and shift checks; with `--then`, also the factorization of
    /// `phi ∘ psi` through the inclusion.
    Verify {
        mapfile: PathBuf,
        #[arg(long, value_name = "PHIFILE", requires_all = ["c1", "c2"])]
        then: Option<PathBuf>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        /// Windows on which to compare homology; repeatable.
        #[arg(long = "window", value_parser = parse_window, value_name = "A,B")]
        windows: Vec<Window>,
    },
}

#[derive(Subcommand)]
enum CapacityCommand {
    /// Radial profile with slope `fraction * pi/2` on the ball of `radius`.
    Radial {
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        fraction: f64,
    },
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v = parse_floats(s, 2)?;
    Window::new(v[0], v[1]).map_err(|e| e.to_string())
}

fn parse_cuts(s: &str) -> Result<(f64, f64, f64), String> {
    let v = parse_floats(s, 3)?;
    Ok((v[0], v[1], v[2]))
}

fn write_out(dir: &Option<PathBuf>, file: &str, body: &str) -> hzcap::Result<()> {
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
        let p = d.join(file);
        std::fs::write(&p, body)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn validate(file: &Path) -> hzcap::Result<bool> {
    let input = load_input(file)?;
    println!("{}: {}", file.display(), input.kind());
    if let InputFile::Morse(md) = &input {
        md.check_indices()?;
        let betti = morse_betti(md)?;
        println!("indices and gradient counts are consistent");
        println!("Betti numbers {betti:?}");
        return Ok(true);
    }
    let cx = input.complex().expect("non-Morse inputs carry a complex");
    let rep = cx.validate();
    print!("{}", rep.render());
    if let InputFile::Instance(inst) = &input {
        println!("m_H = {}, kappa0 = {}, n = {}, d_L = {}", inst.m_h, inst.kappa0, inst.n, inst.d_l);
        println!("spectrum is a0 Z ∪ (m_H + a0 Z): yes");
    }
    Ok(rep.is_valid())
}

fn homology(file: &Path, w: Window, out: &Option<PathBuf>) -> hzcap::Result<bool> {
    let h = match load_input(file)? {
        InputFile::Morse(md) => window_morse_homology(&md, w)?,
        other => window_homology(other.checked_complex()?, w)?,
    };
    println!("HF{w} = {}", h.render_ranks());
    write_out(out, "homology.csv", &h.ranks_csv())?;
    Ok(true)
}

fn run_barcode(file: &Path, domain: Window, out: &Option<PathBuf>) -> hzcap::Result<bool> {
    let input = load_input(file)?;
    let bc = barcode(input.checked_complex()?, domain)?;
    println!("bars born in {} (a0 = {}, N_L = {})", bc.domain, bc.a0, bc.n_l);
    for b in &bc.bars {
        println!("  degree {}: [{}, {})", b.degree, b.birth, b.death);
    }
    write_out(out, "barcode.csv", &bc.to_csv())?;
    Ok(true)
}

fn triangle(file: &Path, (a, b, c): (f64, f64, f64)) -> hzcap::Result<bool> {
    let input = load_input(file)?;
    let rep = exact_triangle(input.checked_complex()?, a, b, c)?;
    print!("{}", rep.render());
    Ok(rep.is_exact())
}

fn map_verify(mapfile: &Path, then: &Option<PathBuf>, c1: Option<f64>, c2: Option<f64>, windows: &[Window]) -> hzcap::Result<bool> {
    let psi = FilteredChainMap::from_json_file(mapfile)?;
    let rep = verify_chain_map(&psi.map)?;
    print!("{}", rep.render());
    if let Some(phi_path) = then {
        let phi = FilteredChainMap::from_json_file(phi_path)?;
        let (c1, c2) = (c1.expect("clap requires c1"), c2.expect("clap requires c2"));
        let fr = verify_factorization(&psi.map, &phi.map, c1, c2, windows, psi.homotopy.as_deref())?;
        print!("{}", fr.render());
        return Ok(fr.homotopy_checked || fr.rows.iter().all(|r| r.agrees));
    }
    Ok(true)
}

fn chords(hamfile: &Path, tmax: f64, grid: usize, out: &Option<PathBuf>) -> hzcap::Result<bool> {
    let model = HamiltonianModel::load(hamfile)?;
    let cfg = ScanConfig { grid, ..ScanConfig::default() };
    let found = chord_scan(&model, tmax, &cfg)?;
    let constant = found.iter().filter(|c| c.kind == ChordKind::Constant).count();
    println!("{} chords with T <= {tmax}: {constant} constant, {} nonconstant", found.len(), found.len() - constant);
    let mut csv = String::from("kind,return_time,tangential,start,end\n");
    let coords = |z: &[f64]| z.iter().map(|v| format!("{v:.9}")).collect::<Vec<_>>().join(" ");
    for c in &found {
        let t = c.return_time.map_or("-".to_string(), |t| format!("{t:.9}"));
        let kind = if c.kind == ChordKind::Constant { "constant" } else { "nonconstant" };
        if c.kind == ChordKind::Nonconstant {
            println!("  T = {t} from [{}]{}", coords(&c.start), if c.tangential { " (tangential)" } else { "" });
        }
        let _ = writeln!(csv, "{kind},{t},{},{},{}", c.tangential, coords(&c.start), coords(&c.end));
    }
    if let Some(t) = min_return_time(&found) {
        println!("shortest return time {t:.9}");
    }
    write_out(out, "chords.csv", &csv)?;
    Ok(true)
}

fn admissible(hamfile: &Path, eta: f64) -> hzcap::Result<bool> {
    let model = HamiltonianModel::load(hamfile)?;
    let rep = check_admissible(&model, eta, &ScanConfig::default())?;
    print!("{}", rep.render());
    Ok(rep.is_admissible())
}

fn capacity(radius: f64, fraction: f64) -> hzcap::Result<bool> {
    let b = radial_capacity_lower_bound(radius, fraction)?;
    print!("{}", b.render());
    Ok(b.report.is_admissible())
}

fn scenario(name: &str, out: &Option<PathBuf>) -> hzcap::Result<bool> {
    let reports = if name == "all" { run_suite()? } else { vec![run_scenario(name)?] };
    let mut ok = true;
    for r in &reports {
        print!("{}", r.render());
        if let Some(d) = out {
            for p in r.write_artifacts(d)? {
                println!("wrote {}", p.display());
            }
        }
        ok &= r.passed();
    }
    Ok(ok)
}

fn run(cli: Cli) -> hzcap::Result<bool> {
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Homology { file, window, out } => homology(&file, window, &out),
        Command::Barcode { file, domain, out } => run_barcode(&file, domain, &out),
        Command::Triangle { file, cuts } => triangle(&file, cuts),
        Command::Map(MapCommand::Verify { mapfile, then, c1, c2, windows }) => map_verify(&mapfile, &then, c1, c2, &windows),
        Command::ChordScan { hamfile, tmax, grid, out } => chords(&hamfile, tmax, grid, &out),
        Command::Admissible { hamfile, eta } => admissible(&hamfile, eta),
        Command::Capacity(CapacityCommand::Radial { radius, fraction }) => capacity(radius, fraction),
        Command::Scenario { name, out } => {
            if name != "all" && !SCENARIOS.contains(&name.as_str()) {
                return Err(Error::Input(format!("unknown scenario '{name}'; known: all, {}", SCENARIOS.join(", "))));
            }
            scenario(&name, &out)
        }
    }
}

fn main() -> ExitCode {
    // usage errors are input errors (1), not clap's default 2
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            println!("verdict: FAIL");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_verdict() { 2 } else { 1 })
        }
    }
}
