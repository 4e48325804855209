use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ahlfors::evaluate::{convergence_sweep, SweepRow};
use ahlfors::presets::{self, TableCase};
use ahlfors::zerofinder::{solve_second_zero, BoundaryParameter, Mode, ZeroEstimate};
use ahlfors::{kernels, ErrorKind, Grid, Region, SzegoSolution};
use serde::Serialize;

use crate::complex;
use crate::{Command, ExportKind, Format, ModeArgs, ModeKind, OutputArgs, RegionArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] ahlfors::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Library(e) => match e.kind() {
                ErrorKind::Geometry => 3,
                ErrorKind::Solver => 4,
            },
            CliError::Io { .. } | CliError::Csv(_) => 5,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Solve {
            region,
            n,
            mode,
            output,
        } => solve(&region, n, &mode, &output),
        Command::Table { id, output } => table(&id, &output),
        Command::Export {
            what,
            region,
            n,
            out,
        } => export(what, &region, n, out.as_deref()),
        Command::Sweep {
            region,
            n_list,
            mode,
            output,
        } => sweep(&region, &n_list, &mode, &output),
    }
}

fn load_region(args: &RegionArgs) -> Result<Region> {
    match (&args.preset, &args.region) {
        (Some(name), None) => {
            if args.r.is_some() && name != "example1" {
                return Err(CliError::Usage(format!(
                    "--r only applies to the example1 preset, not {name}"
                )));
            }
            Ok(presets::by_name(name, args.r, args.a0)?)
        }
        (None, Some(path)) => {
            if args.r.is_some() {
                return Err(CliError::Usage("--r only applies to the example1 preset".into()));
            }
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let region = Region::from_json(&text)?;
            match args.a0 {
                Some(a0) => Ok(region.with_a0(a0)?),
                None => Ok(region),
            }
        }
        _ => Err(CliError::Usage("give exactly one of --preset and --region".into())),
    }
}

fn mode(args: &ModeArgs) -> Result<Mode> {
    match args.mode {
        ModeKind::LeastSquares => {
            if args.t1.is_some() || args.t2.is_some() || args.t3.is_some() {
                return Err(CliError::Usage("--t1/--t2/--t3 need --mode three-point".into()));
            }
            Ok(Mode::LeastSquares)
        }
        ModeKind::ThreePoint => {
            let pick = |t: Option<crate::TPoint>, flag: &str| {
                t.map(|p| BoundaryParameter {
                    boundary: p.boundary,
                    t: p.t,
                })
                .ok_or_else(|| CliError::Usage(format!("three-point mode needs {flag}")))
            };
            Ok(Mode::ThreePoint([
                pick(args.t1, "--t1")?,
                pick(args.t2, "--t2")?,
                pick(args.t3, "--t3")?,
            ]))
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io {
        path: PathBuf::from("<csv buffer>"),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
}

fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn solve(region: &RegionArgs, n: usize, mode_args: &ModeArgs, output: &OutputArgs) -> Result<()> {
    let region = load_region(region)?;
    let mode = mode(mode_args)?;
    let grid = Grid::new(&region, n)?;
    let est = solve_second_zero(&grid, &mode)?;
    let text = match output.format.unwrap_or(Format::Json) {
        Format::Json => json(&est),
        Format::Csv => csv_text(
            &[
                "n",
                "re_a1",
                "im_a1",
                "residual_f",
                "s_defect",
                "ls_residual",
                "condition_estimate",
                "mode",
            ],
            [vec![
                est.n.to_string(),
                est.a1.re.to_string(),
                est.a1.im.to_string(),
                sci(est.residual_f),
                sci(est.s_defect),
                sci(est.ls_residual),
                sci(est.condition_estimate),
                est.mode.name().to_string(),
            ]],
        )?,
        Format::Plain => plain_estimate(&est),
    };
    emit(output.out.as_deref(), &text)
}

fn plain_estimate(est: &ZeroEstimate) -> String {
    format!(
        "a1          {}\n|f(a1)|     {:.3e}\ns_defect    {:.3e}\nls_residual {:.3e}\ncondition   {:.3e}\nn           {}\nmode        {}\n",
        complex::format(est.a1),
        est.residual_f,
        est.s_defect,
        est.ls_residual,
        est.condition_estimate,
        est.n,
        est.mode.name()
    )
}

#[derive(Debug, Serialize)]
struct TableRow {
    case: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    a1: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_f: Option<f64>,
    /// `|a1n − a1|` when the exact zero is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

fn table_rows(case: &TableCase) -> Vec<TableRow> {
    convergence_sweep(&case.region, &case.n_list, &Mode::LeastSquares)
        .into_iter()
        .map(|row| {
            let est = row.estimate.as_ref();
            TableRow {
                case: case.label.clone(),
                n: row.n,
                a1: est.map(|e| [e.a1.re, e.a1.im]),
                residual_f: est.map(|e| e.residual_f),
                error: est.and_then(|e| case.exact.map(|x| (e.a1 - x).norm())),
                failure: row.error,
            }
        })
        .collect()
}

fn table(id: &str, output: &OutputArgs) -> Result<()> {
    let cases = presets::table_cases(id)?;
    let rows: Vec<(TableCase, Vec<TableRow>)> = cases
        .into_iter()
        .map(|case| {
            let rows = table_rows(&case);
            (case, rows)
        })
        .collect();
    let text = match output.format.unwrap_or(Format::Plain) {
        Format::Json => json(&rows.iter().flat_map(|(_, r)| r).collect::<Vec<_>>()),
        Format::Csv => csv_text(
            &["case", "n", "re_a1", "im_a1", "residual_f", "error", "failure"],
            rows.iter().flat_map(|(_, r)| r).map(|row| {
                vec![
                    row.case.clone(),
                    row.n.to_string(),
                    row.a1.map_or(String::new(), |a| a[0].to_string()),
                    row.a1.map_or(String::new(), |a| a[1].to_string()),
                    row.residual_f.map_or(String::new(), sci),
                    row.error.map_or(String::new(), sci),
                    row.failure.clone().unwrap_or_default(),
                ]
            }),
        )?,
        Format::Plain => plain_table(&rows),
    };
    emit(output.out.as_deref(), &text)
}

fn plain_table(blocks: &[(TableCase, Vec<TableRow>)]) -> String {
    let mut out = String::new();
    for (i, (case, rows)) in blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let last = if case.exact.is_some() { "|a1n - a1|" } else { "|f(a1n)|" };
        let _ = writeln!(out, "{}", case.label);
        let _ = writeln!(out, "{:>6}  {:<30}  {}", "n", "a1n", last);
        for row in rows {
            match (row.a1, &row.failure) {
                (Some(a), _) => {
                    let value = row.error.or(row.residual_f).unwrap_or(f64::NAN);
                    let a1 = format!("{:.10}{:+.10}i", a[0], a[1]);
                    let _ = writeln!(out, "{:>6}  {:<30}  {:.2e}", row.n, a1, value);
                }
                (None, failure) => {
                    let _ = writeln!(
                        out,
                        "{:>6}  failed: {}",
                        row.n,
                        failure.as_deref().unwrap_or("unknown error")
                    );
                }
            }
        }
    }
    out
}

fn sweep(region: &RegionArgs, n_list: &[usize], mode_args: &ModeArgs, output: &OutputArgs) -> Result<()> {
    let region = load_region(region)?;
    let mode = mode(mode_args)?;
    if !region.is_doubly_connected() {
        return Err(ahlfors::Error::NotDoublyConnected.into());
    }
    let rows = convergence_sweep(&region, n_list, &mode);
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Json => json(&rows),
        Format::Csv => csv_text(
            &["n", "re_a1", "im_a1", "residual_f", "s_defect", "ls_residual", "error"],
            rows.iter().map(sweep_record),
        )?,
        Format::Plain => {
            let mut out = format!(
                "{:>6}  {:<30}  {:>10}  {:>10}  {:>10}\n",
                "n", "a1", "|f(a1)|", "s_defect", "ls_resid"
            );
            for row in &rows {
                match &row.estimate {
                    Some(e) => {
                        let a1 = format!("{:.10}{:+.10}i", e.a1.re, e.a1.im);
                        let _ = writeln!(
                            out,
                            "{:>6}  {:<30}  {:>10.2e}  {:>10.2e}  {:>10.2e}",
                            row.n, a1, e.residual_f, e.s_defect, e.ls_residual
                        );
                    }
                    None => {
                        let _ = writeln!(
                            out,
                            "{:>6}  failed: {}",
                            row.n,
                            row.error.as_deref().unwrap_or("unknown error")
                        );
                    }
                }
            }
            out
        }
    };
    emit(output.out.as_deref(), &text)
}

fn sweep_record(row: &SweepRow) -> Vec<String> {
    match &row.estimate {
        Some(e) => vec![
            row.n.to_string(),
            e.a1.re.to_string(),
            e.a1.im.to_string(),
            sci(e.residual_f),
            sci(e.s_defect),
            sci(e.ls_residual),
            String::new(),
        ],
        None => {
            let mut record = vec![row.n.to_string()];
            record.extend(std::iter::repeat(String::new()).take(5));
            record.push(row.error.clone().unwrap_or_default());
            record
        }
    }
}

fn export(what: ExportKind, region: &RegionArgs, n: usize, out: Option<&Path>) -> Result<()> {
    let region = load_region(region)?;
    let grid = Grid::new(&region, n)?;
    match what {
        ExportKind::Boundary => {
            let sol = SzegoSolution::compute(&grid)?;
            let header = [
                "t", "curve", "x", "y", "re_dz", "im_dz", "re_d2z", "im_d2z", "re_d3z", "im_d3z",
                "re_s", "im_s", "re_s_p", "im_s_p", "theta_prime", "re_f", "im_f",
            ];
            let rows = grid.nodes().iter().enumerate().map(|(i, node)| {
                let j = &node.jet;
                let mut row = vec![node.t.to_string(), node.boundary.to_string()];
                for z in [j.z, j.d1, j.d2, j.d3, sol.s[i], sol.s_p[i]] {
                    row.push(z.re.to_string());
                    row.push(z.im.to_string());
                }
                row.push(sol.theta_prime[i].to_string());
                row.push(sol.f_boundary[i].re.to_string());
                row.push(sol.f_boundary[i].im.to_string());
                row
            });
            emit(out, &csv_text(&header, rows)?)
        }
        ExportKind::Theta => {
            let sol = SzegoSolution::compute(&grid)?;
            let rows = grid.nodes().iter().zip(&sol.theta_prime).map(|(node, th)| {
                vec![node.t.to_string(), node.boundary.to_string(), th.to_string()]
            });
            emit(out, &csv_text(&["t", "curve", "theta_prime"], rows)?)
        }
        ExportKind::Kernels => {
            let dir = out.ok_or_else(|| {
                CliError::Usage("export kernels writes several files; give a directory with --out".into())
            })?;
            fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            write_kernels(&grid, dir)
        }
    }
}

fn write_kernels(grid: &Grid, dir: &Path) -> Result<()> {
    let size = grid.len();
    let pairs = || (0..size).flat_map(move |i| (0..size).map(move |j| (i, j)));

    let mut ks = Vec::with_capacity(size * size);
    let mut dt = Vec::with_capacity(size * size);
    let mut ns = Vec::with_capacity(size * size);
    for (i, j) in pairs() {
        ks.push(kernels::kerzman_stein(grid, i, j)?);
        dt.push(kernels::kerzman_stein_dt(grid, i, j)?);
        ns.push(kernels::neumann_adjoint(grid, i, j)?);
    }
    let skew = pairs()
        .map(|(i, j)| (ks[i * size + j] + ks[j * size + i].conj()).norm())
        .fold(0.0, f64::max);

    let complex_file = |values: &[num_complex::Complex64], comments: &[String]| -> Result<String> {
        let body = csv_text(
            &["i", "j", "re", "im"],
            pairs().map(|(i, j)| {
                let v = values[i * size + j];
                vec![i.to_string(), j.to_string(), v.re.to_string(), v.im.to_string()]
            }),
        )?;
        Ok(comments.iter().map(|c| format!("# {c}\n")).collect::<String>() + &body)
    };
    let shape = format!(
        "n = {} per curve, {size} x {size} matrix; rows 0..{} outer, {}..{size} inner",
        grid.n(),
        grid.n(),
        grid.n()
    );

    let files = [
        (
            "kerzman_stein.csv",
            complex_file(
                &ks,
                &[
                    shape.clone(),
                    "A(z_i, z_j); zero diagonal".into(),
                    format!("skew-Hermitian check: max |A(i,j) + conj A(j,i)| = {skew:e}"),
                ],
            )?,
        ),
        (
            "kerzman_stein_dt.csv",
            complex_file(&dt, &[shape.clone(), "d/dt A(z(t_i), z(t_j))".into()])?,
        ),
        ("neumann_adjoint.csv", {
            let body = csv_text(
                &["i", "j", "value"],
                pairs().map(|(i, j)| vec![i.to_string(), j.to_string(), ns[i * size + j].to_string()]),
            )?;
            format!("# {shape}\n# adjoint Neumann kernel N*(t_i, t_j)\n{body}")
        }),
    ];
    for (name, text) in files {
        emit(Some(&dir.join(name)), &text)?;
    }
    Ok(())
}
