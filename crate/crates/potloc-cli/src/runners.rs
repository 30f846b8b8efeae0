//! The three subcommand implementations: forward synthesis, single-window
//! density recovery, and window-position sweeps.

use std::path::Path;

use potloc::{
    assemble_matrix, choose_alpha_discrepancy, ellipse_observation_points, layer_mass,
    mass_sweep_argmax, perturb, rectangle_boundary_segments, sample_std_dev, solve_lsq, solve_nnls,
    solve_tikhonov, sweep, synthesize_observations, DiscrepancyStatus, DiscretizedContour, Error,
    KernelMatrix, NnlsOptions, ObservationSet, SweepRecord,
};

use crate::config::{ExperimentConfig, SolverChoice};
use crate::fail::{error_chain, CliError};
use crate::output::{comment, document_header, float17, status_name, write_file};

struct PreparedData {
    observations: ObservationSet<f64>,
    /// Values handed to solvers: perturbed when noise is configured,
    /// the exact potentials otherwise.
    values: Vec<f64>,
    noisy: bool,
}

fn prepare(config: &ExperimentConfig) -> Result<PreparedData, CliError> {
    let points = ellipse_observation_points(&config.ellipse)?;
    let observations = synthesize_observations(&config.disks, &points)?;
    let (values, noisy) = match &config.noise {
        Some(noise) => (perturb(observations.values(), noise)?, true),
        None => (observations.values().to_vec(), false),
    };
    Ok(PreparedData {
        observations,
        values,
        noisy,
    })
}

pub fn run_forward(config: &ExperimentConfig, out: &Path, verbose: bool) -> Result<(), CliError> {
    let data = prepare(config)?;
    if verbose {
        eprintln!(
            "forward: {} observation points, {} disk(s){}",
            data.observations.len(),
            config.disks.len(),
            if data.noisy { ", noise applied" } else { "" }
        );
    }
    let mut doc = document_header("forward", config)?;
    doc.push_str(if data.noisy {
        "x1,x2,phi,phi_noisy\n"
    } else {
        "x1,x2,phi\n"
    });
    for (i, point) in data.observations.points().iter().enumerate() {
        doc.push_str(&float17(point.x1));
        doc.push(',');
        doc.push_str(&float17(point.x2));
        doc.push(',');
        doc.push_str(&float17(data.observations.values()[i]));
        if data.noisy {
            doc.push(',');
            doc.push_str(&float17(data.values[i]));
        }
        doc.push('\n');
    }
    write_file(out, &doc)
}

pub fn run_solve(config: &ExperimentConfig, out: &Path, verbose: bool) -> Result<(), CliError> {
    let data = prepare(config)?;
    let contour = rectangle_boundary_segments(&config.window)?;
    for segment in contour.segments() {
        if !config.ellipse.strictly_contains(segment.center) {
            return Err(CliError::Config(format!(
                "window segment center ({}, {}) lies on or outside the observation ellipse",
                segment.center.x1, segment.center.x2
            )));
        }
    }
    let matrix = assemble_matrix(data.observations.points(), &contour)?;
    if verbose {
        eprintln!(
            "solve: {} x {} system, solver {}",
            matrix.rows(),
            matrix.cols(),
            config.solver.name()
        );
    }

    let mut extra_lines = String::new();
    let result = match config.solver {
        SolverChoice::Lsq => solve_lsq(&matrix, &data.values)?,
        SolverChoice::Nnls => {
            match solve_nnls(&matrix, &data.values, &NnlsOptions::default()) {
                Ok(result) => result,
                Err(e) => {
                    if let Error::NonConvergence {
                        iterations,
                        kkt_violation,
                        best_density,
                        residual_norm,
                    } = &e
                    {
                        // Partial diagnostics: the best iterate so far.
                        let mut doc = document_header("solve", config)?;
                        doc.push_str(&comment("status", "non_converged"));
                        doc.push_str(&comment("residual_norm", float17(*residual_norm)));
                        doc.push_str(&comment("kkt_violation", float17(*kkt_violation)));
                        doc.push_str(&comment("iterations", iterations.to_string()));
                        doc.push_str(&comment("solver", config.solver.name()));
                        doc.push_str(&comment("alpha", "none"));
                        push_segment_rows(&mut doc, &contour, best_density);
                        write_file(out, &doc)?;
                        eprintln!("partial diagnostics written to {}", out.display());
                    }
                    return Err(e.into());
                }
            }
        }
        SolverChoice::Tikhonov => {
            let alpha = match config.alpha {
                Some(alpha) => alpha,
                None => {
                    let pick = choose_alpha(config, &matrix, &data)?;
                    extra_lines.push_str(&comment("alpha_selection", "discrepancy"));
                    extra_lines.push_str(&comment("discrepancy_status", status_name(pick.status)));
                    extra_lines.push_str(&comment("discrepancy_target", float17(pick.target)));
                    pick.alpha
                }
            };
            solve_tikhonov(&matrix, &data.values, alpha)?
        }
    };

    let mass = layer_mass(&result.density, &contour)?;
    let mut doc = document_header("solve", config)?;
    doc.push_str(&comment("status", "ok"));
    doc.push_str(&comment("residual_norm", float17(result.residual_norm)));
    doc.push_str(&comment(
        "relative_residual",
        float17(result.relative_residual),
    ));
    doc.push_str(&comment("mass", float17(mass)));
    doc.push_str(&comment("sign_changes", result.sign_changes.to_string()));
    doc.push_str(&comment("iterations", result.iterations.to_string()));
    doc.push_str(&comment("solver", config.solver.name()));
    match result.alpha {
        Some(alpha) => doc.push_str(&comment("alpha", float17(alpha))),
        None => doc.push_str(&comment("alpha", "none")),
    }
    doc.push_str(&extra_lines);
    push_segment_rows(&mut doc, &contour, &result.density);
    write_file(out, &doc)
}

struct AlphaPick {
    alpha: f64,
    status: DiscrepancyStatus,
    target: f64,
}

fn choose_alpha(
    config: &ExperimentConfig,
    matrix: &KernelMatrix<f64>,
    data: &PreparedData,
) -> Result<AlphaPick, CliError> {
    let section = config
        .discrepancy
        .as_ref()
        .expect("discrepancy presence was validated");
    let level = match section.noise_level {
        Some(level) => level,
        None => {
            let noise = config.noise.as_ref().expect("noise presence was validated");
            let spread = sample_std_dev(&data.values);
            let level = noise.delta * spread * (data.values.len() as f64).sqrt();
            if !(level.is_finite() && level > 0.0) {
                return Err(CliError::Config(
                    "the derived noise level is not positive; set \
                     \"discrepancy.noise_level\" explicitly"
                        .into(),
                ));
            }
            level
        }
    };
    let selection = choose_alpha_discrepancy(matrix, &data.values, level, section.tau)?;
    Ok(AlphaPick {
        alpha: selection.alpha,
        status: selection.status,
        target: section.tau * level,
    })
}

fn push_segment_rows(doc: &mut String, contour: &DiscretizedContour<f64>, density: &[f64]) {
    doc.push_str("arc_position,y1,y2,segment_length,v\n");
    let mut covered = 0.0f64;
    for (segment, &v) in contour.segments().iter().zip(density) {
        let arc_position = covered + 0.5 * segment.length;
        covered += segment.length;
        doc.push_str(&float17(arc_position));
        doc.push(',');
        doc.push_str(&float17(segment.center.x1));
        doc.push(',');
        doc.push_str(&float17(segment.center.x2));
        doc.push(',');
        doc.push_str(&float17(segment.length));
        doc.push(',');
        doc.push_str(&float17(v));
        doc.push('\n');
    }
}

pub fn run_sweep(config: &ExperimentConfig, out: &Path, verbose: bool) -> Result<(), CliError> {
    let Some(section) = &config.sweep else {
        return Err(CliError::Config(
            "the sweep subcommand requires a \"sweep\" section".into(),
        ));
    };
    let data = prepare(config)?;
    let sweep_config = section.to_sweep_config();
    let observations = data.observations.with_values(data.values.clone())?;
    if verbose {
        eprintln!(
            "sweep: {} window positions, {} x {} segments each",
            sweep_config.x0_values.len(),
            sweep_config.n_horizontal,
            sweep_config.n_vertical
        );
    }
    match sweep(&observations, &config.ellipse, &sweep_config) {
        Ok(report) => {
            let mass_argmax = mass_sweep_argmax(&report)?;
            let plateau_min = report.plateau.first().copied().unwrap_or(report.best_x0);
            let plateau_max = report.plateau.last().copied().unwrap_or(report.best_x0);
            let mut doc = document_header("sweep", config)?;
            doc.push_str(&comment("status", "ok"));
            doc.push_str(&comment("best_x0", float17(report.best_x0)));
            doc.push_str(&comment("plateau_min", float17(plateau_min)));
            doc.push_str(&comment("plateau_max", float17(plateau_max)));
            doc.push_str(&comment("mass_argmax", float17(mass_argmax)));
            push_sweep_rows(&mut doc, &report.records);
            write_file(out, &doc)
        }
        Err(e) => {
            if let Error::SweepAborted { partial, .. } = &e {
                let mut doc = document_header("sweep", config)?;
                doc.push_str(&comment("status", "aborted"));
                doc.push_str(&comment("error", error_chain(&e)));
                push_sweep_rows(&mut doc, partial);
                write_file(out, &doc)?;
                eprintln!("partial diagnostics written to {}", out.display());
            }
            Err(e.into())
        }
    }
}

fn push_sweep_rows(doc: &mut String, records: &[SweepRecord<f64>]) {
    doc.push_str("x0,residual_norm,relative_residual,mass,iterations\n");
    for record in records {
        doc.push_str(&float17(record.x0));
        doc.push(',');
        doc.push_str(&float17(record.residual_norm));
        doc.push(',');
        doc.push_str(&float17(record.relative_residual));
        doc.push(',');
        doc.push_str(&float17(record.mass));
        doc.push(',');
        doc.push_str(&record.iterations.to_string());
        doc.push('\n');
    }
}
