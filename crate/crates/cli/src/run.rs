//! Task dispatch and output files.
//!
//! Every run writes `summary.csv` (`key,value`), `report.txt` and the resolved
//! `config.json` into the output directory, plus task-specific tables and
//! profiles with header `index,coord1[,coord2],value`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nlground::analysis::{
    axial_symmetry_defect, check_criterion_with, find_min_a, rho_lower_bound,
    search_symmetry_axis, translation_experiment, trial_upper_bound, CriterionInputs,
    CriterionReport,
};
use nlground::solver::{solve_ground_state, solve_limit_problem};
use nlground::{Field, GridKind, GroundState};

use crate::config::{RunConfig, Task};
use crate::verify::verify_lemmas;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotConverged,
    CriterionFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotConverged => 3,
            Status::CriterionFailed => 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub status: Status,
    pub summary: Vec<(String, String)>,
    pub report: String,
}

impl RunOutput {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Text form of a summary or table entry; floats use the shortest round-trip form.
trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        format!("{self:?}")
    }
}

macro_rules! display_cell {
    ($($t:ty),*) => {
        $(impl Cell for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        })*
    };
}

display_cell!(usize, i32, bool, &str, String);

struct Out<'a> {
    dir: &'a Path,
    profiles: bool,
    summary: Vec<(String, String)>,
    status: Status,
}

impl Out<'_> {
    fn put(&mut self, key: &str, value: impl Cell) {
        self.summary.push((key.to_string(), value.cell()));
    }

    fn table(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn profile(&self, name: &str, f: &Field<f64>) -> Result<(), CliError> {
        if !self.profiles {
            return Ok(());
        }
        let g = f.grid();
        let square = g.kind() == GridKind::Cartesian2d;
        let header: &[&str] = if square {
            &["index", "coord1", "coord2", "value"]
        } else {
            &["index", "coord1", "value"]
        };
        let rows: Vec<Vec<String>> = (0..g.len())
            .map(|i| {
                let mut r = vec![i.to_string()];
                match g.kind() {
                    GridKind::RadialNd => r.push(g.radius(i).cell()),
                    _ => r.extend(g.node(i).iter().map(|c| c.cell())),
                }
                r.push(f.values()[i].cell());
                r
            })
            .collect();
        self.table(name, header, &rows)
    }

    fn ground_state(&mut self, gs: &GroundState<f64>, prefix: &str) {
        let key = |k: &str| format!("{prefix}{k}");
        self.put(&key("lambda"), gs.lambda);
        self.put(&key("iterations"), gs.iterations);
        self.put(&key("residual"), gs.residual);
        self.put(&key("tangential_gradient"), gs.tangential_gradient);
        self.put(&key("constraint_defect"), gs.constraint_defect);
        self.put(&key("converged"), gs.converged);
        let monotone = gs.history.windows(2).all(|p| p[1].energy <= p[0].energy);
        let worst = gs.history.iter().map(|r| r.constraint_defect).fold(0.0, f64::max);
        self.put(&key("history_monotone"), monotone);
        self.put(&key("history_max_defect"), worst);
        if !gs.converged {
            self.status = Status::NotConverged;
        }
    }

    fn history(&self, name: &str, gs: &GroundState<f64>) -> Result<(), CliError> {
        let rows: Vec<Vec<String>> = gs
            .history
            .iter()
            .enumerate()
            .map(|(k, r)| vec![k.to_string(), r.energy.cell(), r.constraint_defect.cell()])
            .collect();
        self.table(name, &["iterate", "energy", "constraint_defect"], &rows)
    }

    fn criterion(&mut self, r: &CriterionReport<f64>) {
        self.put("lambda1_upper", r.lambda1_upper);
        self.put("lambda1_solver", r.lambda1_solver);
        self.put("lambda1_inf", r.lambda1_inf);
        self.put("threshold", r.threshold);
        self.put("margin", r.margin);
        self.put("strict", r.strict);
        self.put("best_trial", format!("{:?}", r.best));
        self.put("residual", r.solver_residual);
        self.put("iterations", r.solver_iterations);
        self.put("authoritative", r.authoritative);
        if !r.authoritative {
            self.status = Status::NotConverged;
        }
    }
}

/// Runs the configured task and writes its outputs into `dir`.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<RunOutput, CliError> {
    fs::create_dir_all(dir)?;
    let mut out = Out { dir, profiles: cfg.raw.output.profiles, summary: Vec::new(), status: Status::Ok };
    let mut extra = String::new();
    let spec = &cfg.spec;
    let p = spec.exponent();
    out.put("task", cfg.raw.task.name());
    out.put("grid_kind", cfg.grid.kind().name());
    out.put("dim", cfg.grid.dim());
    out.put("nodes", cfg.grid.len());
    out.put("p_minus", p.p_minus());
    out.put("p_plus", p.p_plus());
    out.put("p_inf", p.p_inf());
    out.put("v_inf", spec.potential().v_inf());

    match cfg.raw.task {
        Task::Solve => {
            let gs = solve_ground_state(spec, &cfg.solve)?;
            out.ground_state(&gs, "");
            out.profile("w.csv", &gs.w)?;
            out.history("history.csv", &gs)?;
        }
        Task::SolveLimit => {
            let gs = solve_limit_problem(p.p_inf(), spec.potential().v_inf(), cfg.grid.clone(), &cfg.solve)?;
            out.ground_state(&gs, "");
            out.put("lambda1_inf", gs.lambda);
            out.profile("w_inf.csv", &gs.w)?;
            out.history("history.csv", &gs)?;
        }
        Task::CheckCriterion => {
            let trials: Vec<_> = cfg.trial.iter().cloned().collect();
            let inputs = CriterionInputs { trials: &trials, limit: None, rtol: cfg.raw.criterion.rtol };
            let r = check_criterion_with(spec, &cfg.solve, &inputs)?;
            out.criterion(&r);
        }
        Task::TrialBound => {
            let t = cfg.trial.as_ref().expect("validated");
            let b = trial_upper_bound(t, spec)?;
            out.put("a", t.a);
            out.put("radius", t.radius);
            out.put("trial_energy", b.energy);
            out.put("trial_norm", b.norm);
            out.put("trial_bound", b.bound);
            out.put("rho_lower_bound", rho_lower_bound(t, p.p_inf(), &cfg.grid)?);
            out.profile("trial.csv", &t.profile(&cfg.grid)?)?;
        }
        Task::FindMinA => {
            let family = cfg.dip_family()?;
            let r = find_min_a(&family, &cfg.solve)?;
            out.put("found", r.a.is_some());
            out.put("a", r.a.map_or("none".to_string(), |a| a.cell()));
            out.put("evaluations", r.evaluations.len());
            if let Some(rep) = &r.report {
                out.criterion(rep);
            } else {
                out.put("lambda1_inf", r.lambda1_inf);
                out.status = Status::CriterionFailed;
            }
            let rows: Vec<Vec<String>> =
                r.evaluations.iter().map(|(a, s)| vec![a.cell(), s.to_string()]).collect();
            out.table("evaluations.csv", &["a", "strict"], &rows)?;
            for (a, s) in &r.evaluations {
                writeln!(extra, "  a = {:<12} strict = {s}", a.cell()).unwrap();
            }
        }
        Task::TranslateExperiment => {
            let block = cfg.raw.translate.as_ref().expect("validated");
            let u = cfg.translate_u.as_ref().expect("validated");
            let t = translation_experiment(u, p, spec.potential(), &block.shifts)?;
            out.put("rho_inf", t.rho_inf);
            out.put("norm_inf", t.norm_inf);
            out.put("energy_inf", t.energy_inf);
            if let Some(last) = t.rows.last() {
                out.put("last_distance", last.distance);
                out.put("last_rho_deviation", (last.rho - t.rho_inf).abs());
                out.put("last_norm_deviation", (last.norm - t.norm_inf).abs());
                out.put("last_energy_deviation", (last.energy - t.energy_inf).abs());
            }
            let rows: Vec<Vec<String>> = t
                .rows
                .iter()
                .map(|r| vec![r.distance.cell(), r.rho.cell(), r.norm.cell(), r.energy.cell()])
                .collect();
            out.table("translation.csv", &["distance", "rho", "norm", "energy"], &rows)?;
        }
        Task::SymmetryDefect => {
            let gs = solve_ground_state(spec, &cfg.solve)?;
            out.ground_state(&gs, "");
            let axes = &cfg.raw.symmetry.axes;
            let best = if axes.is_empty() {
                search_symmetry_axis(&gs.w)?
            } else {
                axial_symmetry_defect(&gs.w, axes)?
            };
            out.put("axis_x", best.axis[0]);
            out.put("axis_y", best.axis[1]);
            out.put("defect", best.defect);
            out.profile("w.csv", &gs.w)?;
        }
        Task::VerifyLemmas => {
            let checks = verify_lemmas(cfg)?;
            let rows: Vec<Vec<String>> = checks.iter().map(|c| c.record()).collect();
            out.table("lemmas.csv", &["check", "samples", "worst", "tolerance", "status"], &rows)?;
            let failed = checks.iter().filter(|c| c.failed()).count();
            out.put("checks", checks.len());
            out.put("failed", failed);
            for c in &checks {
                writeln!(extra, "  {:<26} {:>5}  worst {:<24} tol {:<8} {}", c.name, c.samples, format!("{:.3e}", c.worst), format!("{:e}", c.tolerance), c.status())
                    .unwrap();
            }
            if failed > 0 {
                out.status = Status::CriterionFailed;
            }
        }
    }

    out.put("status", out.status.exit_code());
    let summary = out.summary.clone();
    let rows: Vec<Vec<String>> = summary.iter().map(|(k, v)| vec![k.clone(), v.clone()]).collect();
    out.table("summary.csv", &["key", "value"], &rows)?;

    let mut report = format!("nlground {}\n\n", cfg.raw.task.name());
    for (k, v) in &summary {
        writeln!(report, "{k:<24} {v}").unwrap();
    }
    if !extra.is_empty() {
        report.push('\n');
        report.push_str(&extra);
    }
    fs::write(dir.join("report.txt"), &report)?;
    let resolved = serde_json::to_string_pretty(&cfg.raw).expect("config serializes");
    fs::write(dir.join("config.json"), resolved + "\n")?;
    Ok(RunOutput { status: out.status, summary, report })
}
