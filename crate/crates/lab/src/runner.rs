//! Stage execution in dependency order.

use std::fs;
use std::path::{Path, PathBuf};

use kreiss_core::bounds::{
    growth_fit, plancherel_check, remark_alpha_check, resolvent_to_cesaro_check,
    strip_kreiss_check, theorem_bound_check, wave_proposition_demo, CheckEntry, DirectionRun,
    GrowthModel, VerificationReport,
};
use kreiss_core::propagator::{self, CesaroEstimate};
use kreiss_core::resolvent::{self, lemma1_check, KreissFit, ResolventSample};

use crate::artifacts::{self, SeriesFit};
use crate::config::{Plan, Stage};
use crate::Failure;

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub report: VerificationReport,
    pub fits: Vec<SeriesFit>,
    /// Files written, in write order.
    pub files: Vec<PathBuf>,
}

impl RunOutput {
    pub fn all_pass(&self) -> bool {
        self.report.all_pass()
    }
}

struct Runner<'a> {
    plan: &'a Plan,
    out: &'a Path,
    output: RunOutput,
    samples: Option<Vec<ResolventSample>>,
    kreiss: Option<KreissFit>,
    cesaro_written: bool,
}

/// Runs every stage of `plan`, writing artifacts under `out`.
///
/// On a numerical failure the entries collected so far are still written to
/// `report.json` before the error is returned.
pub fn run(plan: &Plan, out: &Path) -> Result<RunOutput, Failure> {
    fs::create_dir_all(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    let mut runner = Runner {
        plan,
        out,
        output: RunOutput::default(),
        samples: None,
        kreiss: None,
        cesaro_written: false,
    };
    let result = plan.stages.iter().try_for_each(|&stage| runner.stage(stage));
    runner.finish()?;
    result.map(|()| runner.output)
}

impl Runner<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.out.join(name);
        self.output.files.push(p.clone());
        p
    }

    fn push(&mut self, entry: CheckEntry) {
        self.output.report.push(entry);
    }

    fn finish(&mut self) -> Result<(), Failure> {
        let path = self.path(artifacts::REPORT_JSON);
        artifacts::write_report(&path, &self.output.report.entries)?;
        if !self.output.fits.is_empty() {
            let path = self.path(artifacts::FIT_JSON);
            artifacts::write_fits(&path, &self.output.fits)?;
        }
        Ok(())
    }

    fn stage(&mut self, stage: Stage) -> Result<(), Failure> {
        match stage {
            Stage::ResolventSweep => {
                self.sweep()?;
            }
            Stage::Kreiss => self.kreiss()?,
            Stage::Cesaro => {
                let est = propagator::cesaro_constants(&self.plan.system, self.plan.alpha, &self.plan.t)?;
                self.write_cesaro(&est)?;
            }
            Stage::VerifyTheorem => self.theorem()?,
            Stage::VerifyIdentities => self.identities()?,
            Stage::FitGrowth => self.fit_growth()?,
            Stage::WaveDemo => self.wave_demo()?,
        }
        Ok(())
    }

    fn sweep(&mut self) -> Result<&[ResolventSample], Failure> {
        if self.samples.is_none() {
            let samples = resolvent::sweep(&self.plan.system, &self.plan.r, &self.plan.beta)?;
            let path = self.path(artifacts::RESOLVENT_CSV);
            artifacts::write_resolvent(&path, &samples)?;
            self.samples = Some(samples);
        }
        Ok(self.samples.as_deref().unwrap_or_default())
    }

    fn kreiss(&mut self) -> Result<(), Failure> {
        let alpha = self.plan.alpha;
        let inequality = "|R(l,A)| <= C / (-Re l)^a on the sampled grid";
        let entry = match resolvent::kreiss_fit(self.sweep()?, alpha) {
            Ok(fit) => {
                self.kreiss = Some(fit);
                CheckEntry::from_margin(
                    "kreiss_constant",
                    inequality,
                    vec![fit.c_est],
                    vec![f64::MAX],
                    fit.c_est,
                    f64::MAX,
                )
                .with_detail("alpha", alpha)
                .with_detail("C_est", fit.c_est)
                .with_detail("argmax_re", fit.argmax_lambda.re)
                .with_detail("argmax_im", fit.argmax_lambda.im)
                .with_detail("r_min", fit.grid.r_min)
                .with_detail("r_max", fit.grid.r_max)
                .with_detail("beta_min", fit.grid.beta_min)
                .with_detail("beta_max", fit.grid.beta_max)
                .with_detail("grid_points", fit.grid.count as f64)
            }
            Err(err) => CheckEntry::failed("kreiss_constant", inequality, &err),
        };
        self.push(entry);
        if let Some(strip) = &self.plan.strip_r {
            let out = strip_kreiss_check(&self.plan.system, alpha, strip, &self.plan.beta)?;
            self.push(out.entry);
        }
        Ok(())
    }

    fn write_cesaro(&mut self, est: &CesaroEstimate) -> Result<(), Failure> {
        let path = self.path(artifacts::CESARO_CSV);
        artifacts::write_cesaro(&path, est)?;
        self.cesaro_written = true;
        Ok(())
    }

    fn theorem(&mut self) -> Result<(), Failure> {
        let plan = self.plan;
        let out = if plan.alpha <= 1.0 {
            theorem_bound_check(&plan.system, plan.alpha, &plan.t)?
        } else {
            remark_alpha_check(&plan.system, plan.alpha, &plan.t)?
        };
        if !self.cesaro_written {
            self.write_cesaro(&out.cesaro)?;
        }
        self.push(out.entry);
        Ok(())
    }

    fn identities(&mut self) -> Result<(), Failure> {
        let plan = self.plan;
        let many = plan.vectors.len() > 1;
        for (k, x) in plan.vectors.iter().enumerate() {
            let mut entry = plancherel_check(&plan.system, plan.plancherel_r, x, plan.tol)?;
            if many {
                entry.check = format!("plancherel[{k}]");
            }
            self.push(entry);
        }
        let entry = resolvent_to_cesaro_check(
            &plan.system,
            plan.alpha,
            &plan.cesaro_t,
            &plan.vectors,
            plan.tol,
        )?;
        self.push(entry);
        let c_kreiss = self.kreiss.map(|f| f.c_est).filter(|c| *c > 0.0);
        let entry = lemma1_check(&plan.system, plan.alpha, c_kreiss, &plan.lemma_r, &plan.vectors, plan.tol)?;
        self.push(entry);
        Ok(())
    }

    fn fit_growth(&mut self) -> Result<(), Failure> {
        let plan = self.plan;
        let samples = propagator::trajectory(&plan.system, &plan.fit_t, &[])?;
        let path = self.path(artifacts::TRAJECTORY_CSV);
        artifacts::write_trajectory(&path, &samples)?;
        let mut power_exponent = None;
        for &model in &plan.models {
            let omega = if model == GrowthModel::Shifted { plan.omega } else { None };
            let fit = growth_fit(&samples, model, omega)?;
            if model == GrowthModel::Power {
                power_exponent = Some(fit.a);
            }
            self.output.fits.push(SeriesFit {
                series: "growth".into(),
                fit,
            });
        }
        if let Some(a) = power_exponent {
            let gate = kreiss_core::bounds::EXPONENT_GATE;
            self.push(
                CheckEntry::from_margin(
                    "growth_exponent",
                    "fitted power exponent of |T_t| <= 1.1 alpha",
                    vec![a],
                    vec![gate * plan.alpha],
                    a / plan.alpha,
                    gate,
                )
                .with_detail("power_a", a)
                .with_detail("alpha", plan.alpha),
            );
        }
        Ok(())
    }

    fn wave_demo(&mut self) -> Result<(), Failure> {
        let plan = self.plan;
        let params = plan
            .wave
            .ok_or_else(|| Failure::Config("wave-demo needs a wave operator".into()))?;
        let demo = wave_proposition_demo(params, plan.wave_demo.t_max, &plan.wave_demo.grids)?;
        for run in demo.directions() {
            self.write_direction(run)?;
        }
        for entry in demo.report.entries {
            self.push(entry);
        }
        Ok(())
    }

    fn write_direction(&mut self, run: &DirectionRun) -> Result<(), Failure> {
        let dir = self.out.join(&run.name);
        fs::create_dir_all(&dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        let sub = |name: &str| format!("{}/{name}", run.name);
        if let Some(strip) = &run.strip {
            let path = self.path(&sub(artifacts::RESOLVENT_CSV));
            artifacts::write_resolvent(&path, &strip.samples)?;
        }
        if !run.trajectory.is_empty() {
            let path = self.path(&sub(artifacts::TRAJECTORY_CSV));
            artifacts::write_trajectory(&path, &run.trajectory)?;
        }
        if let Some(theorem) = &run.theorem {
            let path = self.path(&sub(artifacts::CESARO_CSV));
            artifacts::write_cesaro(&path, &theorem.cesaro)?;
        }
        for fit in &run.fits {
            self.output.fits.push(SeriesFit {
                series: run.name.clone(),
                fit: *fit,
            });
        }
        Ok(())
    }
}
