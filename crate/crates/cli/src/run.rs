//! Executes the tasks of a spec in order. A failing task becomes a failure
//! record; later tasks still run.

use num_complex::Complex64;
use phq_core::random::real_spectrum;
use phq_core::{
    biorthonormal_eigensystem, c_operator, discretize_schroedinger, equivalent_hermitian,
    hermiticity_defect, jump_condition_defect, kernel_to_matrix, master_order_equation_rhs,
    metric_from_series, offdiagonal_commutator_check, order_equation_rhs, order_residual,
    particular_kernel_q1, pseudo_hermiticity_residual, residual_threshold, scaling_exponent,
    solve_q_series, spectral_metric, step_q1_closed_form, Grid, HermitianEigen, Operator,
    PiecewisePotential, SplitHamiltonian, Tolerance,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::report::{
    KernelSlice, ModelSummary, Provenance, Report, ScalingPoint, TaskRecord, Verdict,
};
use crate::spec::{to_operator, Model, ModelSpec, NamedParity, ParitySpec, ScalingTask, Task};

/// Slack on the scaling slope below `ℓ + 1`.
pub const SLOPE_SLACK: f64 = 0.4;
/// `y₀` of the exported kernel slice `Q₁(x, y₀)`.
pub const SLICE_Y0: f64 = 0.3;
/// Half-width of the jump used by the wave task.
pub const JUMP_DELTA: f64 = 1e-3;
const KERNEL_SAMPLES: usize = 10_000;
const HERMITICITY_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub abs_tol: Option<f64>,
}

struct WaveModel {
    potential: PiecewisePotential,
    half_width: f64,
    points: usize,
}

struct Built {
    hamiltonian: Operator,
    split: SplitHamiltonian,
    wave: Option<WaveModel>,
    parity: Option<Operator>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Runs every task of `spec`; `source` is the raw file text, hashed into the
/// provenance record.
pub fn run(spec: &ModelSpec, source: &str, opts: RunOptions) -> Report {
    let seed = opts.seed.or(spec.seed).unwrap_or(0);
    let provenance = Provenance {
        spec_sha256: sha256_hex(source.as_bytes()),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let built = spec
        .tolerance_with(opts.abs_tol)
        .map_err(|e| e.to_string())
        .and_then(|tol| build(spec, seed, &tol).map(|b| (b, tol)));
    let (built, tol) = match built {
        Ok(pair) => pair,
        Err(error) => {
            return Report {
                name: spec.name.clone(),
                provenance,
                model: None,
                model_error: Some(error),
                tasks: Vec::new(),
                pass: false,
            }
        }
    };

    let default_ell = spec
        .tasks
        .iter()
        .find_map(|t| match t {
            Task::Perturbative(p) => Some(p.ell),
            _ => None,
        })
        .unwrap_or(1);
    let tasks: Vec<TaskRecord> = spec
        .tasks
        .iter()
        .map(|task| {
            let mut rec = TaskRecord::new(task.name());
            let outcome = match task {
                Task::Spectral => spectral(&built, &tol, &mut rec),
                Task::Perturbative(p) => perturbative(&built, p.ell, &tol, &mut rec),
                Task::Wave => wave(&built, seed, &tol, &mut rec),
                Task::Scaling(s) => scaling(&built, s, default_ell, &tol, &mut rec),
            };
            match outcome {
                Ok(()) => rec,
                Err(error) => TaskRecord {
                    ok: false,
                    error: Some(error),
                    ..rec
                },
            }
        })
        .collect();
    let pass = tasks.iter().all(TaskRecord::passed);
    Report {
        name: spec.name.clone(),
        provenance,
        model: Some(ModelSummary {
            kind: spec.model.kind().into(),
            dim: built.hamiltonian.dim(),
            abs_tol: tol.abs_tol,
            rel_tol: tol.rel_tol,
        }),
        model_error: None,
        tasks,
        pass,
    }
}

type TaskResult = Result<(), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn build(spec: &ModelSpec, seed: u64, tol: &Tolerance) -> Result<Built, String> {
    let (split, wave) = match &spec.model {
        Model::Matrix { entries } => (halves(to_operator(entries).map_err(err)?, tol)?, None),
        Model::SplitMatrix { h0, h1, epsilon } => {
            let h0 = to_operator(h0).map_err(err)?;
            let h1 = to_operator(h1).map_err(err)?;
            (
                SplitHamiltonian::new(h0, h1, *epsilon, tol).map_err(err)?,
                None,
            )
        }
        Model::RandomRealSpectrum { dim, cond } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (
                halves(real_spectrum(*dim, *cond, &mut rng).hamiltonian, tol)?,
                None,
            )
        }
        Model::Schroedinger {
            half_width,
            points,
            potential,
            epsilon,
        } => {
            let v = potential.build().map_err(err)?;
            let split =
                discretize_schroedinger(&v, *half_width, *points, *epsilon, tol).map_err(err)?;
            let wave = WaveModel {
                potential: v,
                half_width: *half_width,
                points: *points,
            };
            (split, Some(wave))
        }
    };
    let hamiltonian = split.hamiltonian();
    let n = hamiltonian.dim();
    let parity = match &spec.parity {
        None => None,
        Some(ParitySpec::Matrix(rows)) => Some(to_operator(rows).map_err(err)?),
        Some(ParitySpec::Named(NamedParity::GridReflection)) => {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i + j + 1 == n { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect();
            Some(Operator::from_real_rows(&rows).map_err(err)?)
        }
    };
    Ok(Built {
        hamiltonian,
        split,
        wave,
        parity,
    })
}

/// `H = H₀ + 1·H₁` with `H₀` the Hermitian and `H₁` the anti-Hermitian part.
fn halves(h: Operator, tol: &Tolerance) -> Result<SplitHamiltonian, String> {
    SplitHamiltonian::new(h.hermitian_part(), h.anti_hermitian_part(), 1.0, tol).map_err(err)
}

fn spectral(b: &Built, tol: &Tolerance, rec: &mut TaskRecord) -> TaskResult {
    let h = &b.hamiltonian;
    let sys = biorthonormal_eigensystem(h).map_err(err)?;
    let spectrum = sys.eigenvalues();
    rec.spectrum = Some(spectrum.iter().map(|z| [z.re, z.im]).collect());
    let scale = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_imag = spectrum.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    rec.verdicts.push(Verdict::at_most(
        "spectrum_real",
        max_imag,
        tol.threshold(scale),
    ));

    let d = sys.defects(h);
    rec.value("eigen_residual_right", d.right);
    rec.value("eigen_residual_left", d.left);
    rec.value("completeness_defect", d.completeness);
    rec.verdicts.push(Verdict::at_most(
        "biorthonormality",
        d.gram,
        tol.threshold(h.dim() as f64),
    ));

    let eta = spectral_metric(&sys, tol).map_err(err)?;
    let metric_eig = HermitianEigen::of_hermitian_part(eta.op());
    rec.value("metric_min_eigenvalue", metric_eig.min());
    rec.value(
        "metric_max_eigenvalue",
        metric_eig.values[metric_eig.values.len() - 1],
    );
    let residual = pseudo_hermiticity_residual(h, &eta).map_err(err)?;
    rec.verdicts.push(Verdict::at_most(
        "pseudo_hermiticity_residual",
        residual,
        residual_threshold(h, &eta, tol),
    ));

    let eq = equivalent_hermitian(h, &eta, f64::INFINITY, tol).map_err(err)?;
    rec.verdicts.push(Verdict::at_most(
        "equivalent_hermiticity",
        eq.h.hermiticity_defect(),
        tol.threshold(eq.h.max_norm()),
    ));
    let herm = HermitianEigen::of_hermitian_part(&eq.h);
    let drift = herm
        .values
        .iter()
        .zip(spectrum)
        .map(|(a, z)| (a - z.re).abs())
        .fold(0.0, f64::max);
    rec.verdicts.push(Verdict::at_most(
        "spectrum_preserved",
        drift,
        tol.threshold(scale),
    ));

    if let Some(p) = &b.parity {
        let c = c_operator(h, &eta, p, tol).map_err(err)?;
        rec.verdicts.push(Verdict::at_most(
            "c_commutator",
            c.commutator_residual,
            tol.threshold(c.c.max_norm() * h.max_norm()),
        ));
        rec.value("c_involution_defect", c.involution_defect);
        rec.value("parity_residual", c.parity_residual);
    }
    Ok(())
}

fn perturbative(b: &Built, ell: usize, tol: &Tolerance, rec: &mut TaskRecord) -> TaskResult {
    let split = &b.split;
    rec.value("epsilon", split.epsilon());
    let q = solve_q_series(split, ell, &[], tol).map_err(err)?;
    rec.gauge_log = q.gauge_log().iter().map(ToString::to_string).collect();
    let q_scale = q.terms().iter().map(Operator::max_norm).fold(0.0, f64::max);
    let scale = split.h0().max_norm() * q_scale.max(1.0) + split.h1().max_norm();
    for m in 1..=ell {
        rec.value(&format!("q{m}_max_norm"), q.term(m).max_norm());
        let res = order_residual(split, &q, m).map_err(err)?.max_norm();
        rec.verdicts.push(Verdict::at_most(
            format!("order_{m}_residual"),
            res,
            tol.threshold(scale),
        ));
        let lower = &q.terms()[..m - 1];
        let composition = order_equation_rhs(split, lower, m, tol).map_err(err)?;
        let master = master_order_equation_rhs(split, lower, m).map_err(err)?;
        rec.verdicts.push(Verdict::at_most(
            format!("order_{m}_master_agreement"),
            composition.max_diff(&master),
            tol.threshold(scale),
        ));
    }
    let eta = metric_from_series(&q, split.epsilon(), tol).map_err(err)?;
    let min_eig = HermitianEigen::of_hermitian_part(eta.op()).min();
    rec.verdicts.push(Verdict::at_least(
        "metric_min_eigenvalue",
        min_eig,
        tol.abs_tol,
    ));
    let residual = pseudo_hermiticity_residual(&b.hamiltonian, &eta).map_err(err)?;
    rec.value("pseudo_hermiticity_residual", residual);
    Ok(())
}

fn scaling(
    b: &Built,
    task: &ScalingTask,
    default_ell: usize,
    tol: &Tolerance,
    rec: &mut TaskRecord,
) -> TaskResult {
    let ell = task.ell.unwrap_or(default_ell);
    rec.value("ell", ell as f64);
    let q = solve_q_series(&b.split, ell, &[], tol).map_err(err)?;
    let fit = scaling_exponent(&b.split, &q, &task.eps_list, tol).map_err(err)?;
    rec.scaling = Some(
        fit.points
            .iter()
            .map(|&(epsilon, r)| ScalingPoint {
                epsilon,
                residual: crate::report::number(r),
            })
            .collect(),
    );
    rec.value("intercept", fit.intercept);
    rec.value("indeterminate", if fit.indeterminate { 1.0 } else { 0.0 });
    let target = (ell + 1) as f64 - SLOPE_SLACK;
    rec.verdicts
        .push(Verdict::at_least("slope", fit.slope, target));
    Ok(())
}

fn wave(b: &Built, seed: u64, tol: &Tolerance, rec: &mut TaskRecord) -> TaskResult {
    let w = b
        .wave
        .as_ref()
        .ok_or_else(|| "the wave task needs a schroedinger model".to_string())?;
    let k = particular_kernel_q1(&w.potential).with_half_width(w.half_width);

    if w.potential == PiecewisePotential::step() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let worst = (0..KERNEL_SAMPLES)
            .map(|_| {
                let (x, y) = (rng.random_range(-3.0..=3.0), rng.random_range(-3.0..=3.0));
                (k.eval(x, y) - step_q1_closed_form(x, y)).norm()
            })
            .fold(0.0, f64::max);
        rec.verdicts
            .push(Verdict::at_most("kernel_closed_form", worst, 1e-12));
        let spot = (k.eval(0.5, 0.3) - Complex64::new(0.0, -0.2)).norm();
        rec.verdicts
            .push(Verdict::at_most("kernel_spot_value", spot, 1e-12));
    }

    let herm = hermiticity_defect(&k, HERMITICITY_SAMPLES, seed).map_err(err)?;
    rec.verdicts
        .push(Verdict::at_most("kernel_hermiticity", herm, tol.abs_tol));

    let grid = Grid::new(w.half_width, w.points).map_err(err)?;
    let xs = grid.points();
    let jump = jump_condition_defect(&k, &w.potential, JUMP_DELTA, &xs).map_err(err)?;
    rec.value("jump_delta", JUMP_DELTA);
    rec.verdicts
        .push(Verdict::at_most("jump_condition", jump, tol.abs_tol));

    let m = kernel_to_matrix(&k, w.half_width, w.points).map_err(err)?;
    let defect = offdiagonal_commutator_check(&b.split, &m, 2).map_err(err)?;
    rec.verdicts.push(Verdict::at_most(
        "offdiagonal_commutator",
        defect,
        tol.threshold(b.split.h0().max_norm() * m.max_norm()),
    ));

    rec.kernel_slice = Some(KernelSlice {
        y0: SLICE_Y0,
        points: xs
            .iter()
            .map(|&x| {
                let z = k.eval(x, SLICE_Y0);
                [x, z.re, z.im]
            })
            .collect(),
    });
    Ok(())
}
