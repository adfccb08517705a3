use std::io::Write;

use bargmann_core::circulant::{channel_choi, circulant_channel_apply, circulantize, is_circulant_gram, CirculantSpec};
use bargmann_core::equivalence::{
    joint_projective_equivalent, joint_unitary_equivalent, mixed_orbit_equal, reconstruct_tuple, TupleOracle,
};
use bargmann_core::estimation::estimate_bargmann;
use bargmann_core::geometry::{
    boundary_curve, boundary_radius, cubic_residual, locate_envelope_t, obg_invariant, obg_tuple, principal_angle,
    region_bounds, region_contains, theta_to_t, RegionQuery,
};
use bargmann_core::invariants::{bargmann, n_product, sample_overlap_statistics};
use bargmann_core::linalg::{eigh, gram_matrix, partial_transpose, ComplexMatrix, DensityMatrix, StateTuple, Subsystem};
use bargmann_core::twoqubit::{
    closed_form_coefficients, entangled_by_invariants, imaginarity_quadratic, lu_invariants, ppt_oracle,
    EntanglementStatus,
};
use bargmann_core::{Complex64, SplitRng};
use serde_json::{json, Value};

use crate::{load_tuple, tuple_document, CliError, Command, EquivalenceMode, OutputFormat, RunConfig};

fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|&z| cx(z)).collect()))
            .collect(),
    )
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Numeric(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn json_only(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    if cfg.format == OutputFormat::Csv {
        return Err(CliError::Validation(format!("csv output is not available for `{command}`")));
    }
    Ok(())
}

fn invariant_json(z: Complex64, indices: &[usize]) -> Value {
    json!({
        "value": cx(z),
        "re": z.re,
        "im": z.im,
        "abs": z.norm(),
        "arg": z.arg(),
        "order": indices.len(),
        "indices": indices,
    })
}

fn single_two_qubit(tuple: &StateTuple) -> Result<DensityMatrix, CliError> {
    if tuple.len() != 1 {
        return Err(CliError::Validation(format!(
            "expected a document with one two-qubit state, got {} states",
            tuple.len()
        )));
    }
    Ok(DensityMatrix::new(tuple.densities().remove(0))?)
}

pub(crate) fn dispatch(command: &Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Invariant { input } => {
            let v = bargmann(&load_tuple(input)?)?;
            write_invariant(cfg, out, v.value, &v.indices)
        }
        Command::Nproduct { input, indices } => {
            let v = n_product(&load_tuple(input)?, indices)?;
            write_invariant(cfg, out, v.value, &v.indices)
        }
        Command::Boundary { n, points } => {
            let curve = boundary_curve(*n, *points)?;
            match cfg.format {
                OutputFormat::Csv => {
                    writeln!(out, "theta,r,x,y")?;
                    for s in &curve {
                        let p = s.point();
                        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", s.theta, s.r, p.re, p.im)?;
                    }
                    Ok(())
                }
                OutputFormat::Json => {
                    let pts: Vec<Value> = curve
                        .iter()
                        .map(|s| {
                            let p = s.point();
                            json!({"theta": s.theta, "r": s.r, "x": p.re, "y": p.im, "t": s.t})
                        })
                        .collect();
                    emit(out, &json!({"n": n, "points": pts}))
                }
            }
        }
        Command::Membership { n, re, im, tol } => {
            json_only(cfg, "membership")?;
            let z = Complex64::new(*re, *im);
            let inside = region_contains(&RegionQuery::new(*n, z)?, *tol)?;
            let theta = principal_angle(z);
            emit(
                out,
                &json!({
                    "n": n,
                    "z": cx(z),
                    "inside": inside,
                    "modulus": z.norm(),
                    "theta": theta,
                    "boundary_radius": boundary_radius(*n, theta)?,
                }),
            )
        }
        Command::Bounds { n } => {
            json_only(cfg, "bounds")?;
            let b = region_bounds(*n)?;
            emit(out, &json!({"n": n, "min_real": b.min_real, "tau": b.tau, "tau_angle": b.tau_angle}))
        }
        Command::Obg { n, t, theta } => {
            json_only(cfg, "obg")?;
            let t = match (t, theta) {
                (Some(t), _) => *t,
                (None, Some(th)) => theta_to_t(*n, *th)?,
                (None, None) => return Err(CliError::Validation("one of --t or --theta is required".into())),
            };
            let z = obg_invariant(*n, t)?;
            let doc = tuple_document(&obg_tuple(*n, t)?);
            emit(out, &json!({"n": n, "t": t, "invariant": cx(z), "abs": z.norm(), "arg": principal_angle(z), "tuple": doc}))
        }
        Command::Envelope { n, theta, r } => {
            json_only(cfg, "envelope")?;
            let r = match r {
                Some(r) => *r,
                None => boundary_radius(*n, *theta)?,
            };
            let sol = locate_envelope_t(*n, *theta, r)?;
            let mut v = json!({
                "n": n,
                "theta": theta,
                "r": r,
                "t": sol.t,
                "f": sol.residual.f,
                "df_dt": sol.residual.df_dt,
            });
            if *n == 3 {
                v["cubic_residual"] = json!(cubic_residual(*theta, r));
            }
            emit(out, &v)
        }
        Command::Circulantize { input } => {
            json_only(cfg, "circulantize")?;
            let c = circulantize(&load_tuple(input)?)?;
            emit(
                out,
                &json!({
                    "gram": matrix_json(c.gram.matrix()),
                    "phases": c.phases,
                    "rank": c.rank,
                    "overlap": cx(c.overlap),
                    "invariant_before": cx(c.invariant_before),
                    "invariant_after": cx(c.invariant_after),
                    "tuple": tuple_document(&c.tuple),
                }),
            )
        }
        Command::Channel { n, input } => {
            json_only(cfg, "channel")?;
            match input {
                Some(path) => {
                    let g = gram_matrix(&load_tuple(path)?)?;
                    let image = circulant_channel_apply(g.matrix())?;
                    let check = is_circulant_gram(&CirculantSpec::from_matrix(&image)?, cfg.psd_floor);
                    emit(out, &json!({"input_gram": matrix_json(g.matrix()), "output": matrix_json(&image), "circulant_gram": check.is_gram}))
                }
                None => {
                    let n = n.expect("clap requires --n without --input");
                    let choi = channel_choi(n)?;
                    let e = eigh(&choi);
                    let pt = eigh(&partial_transpose(&choi, Subsystem::B, n, n)?);
                    emit(
                        out,
                        &json!({
                            "n": n,
                            "choi_trace": choi.trace().re,
                            "choi_min_eigenvalue": e.min_value(),
                            "choi_partial_transpose_min_eigenvalue": pt.min_value(),
                        }),
                    )
                }
            }
        }
        Command::Equivalence {
            left,
            right,
            mode,
            max_degree,
            word_cap,
        } => {
            json_only(cfg, "equivalence")?;
            let (a, b) = (load_tuple(left)?, load_tuple(right)?);
            let v = match mode {
                EquivalenceMode::Unitary => {
                    let dec = joint_unitary_equivalent(&a, &b, cfg.equality_tol)?;
                    json!({
                        "mode": "unitary",
                        "equivalent": dec.equivalent,
                        "gram_gap": dec.gram_gap,
                        "witness": dec.witness.as_ref().map(matrix_json),
                        "witness_residual": dec.witness_residual,
                    })
                }
                EquivalenceMode::Projective => {
                    json!({"mode": "projective", "equivalent": joint_projective_equivalent(&a, &b, cfg.equality_tol)?})
                }
                EquivalenceMode::Orbit => {
                    let r = mixed_orbit_equal(&a, &b, *max_degree, cfg.equality_tol, *word_cap)?;
                    json!({
                        "mode": "orbit",
                        "equivalent": r.equal,
                        "max_degree": r.max_degree,
                        "words_compared": r.words_compared,
                        "max_gap": r.max_gap,
                        "witness_word": r.witness_word,
                    })
                }
            };
            emit(out, &v)
        }
        Command::Reconstruct { input } => {
            json_only(cfg, "reconstruct")?;
            let t = load_tuple(input)?;
            let r = reconstruct_tuple(&TupleOracle::new(&t), 1e-6)?;
            let equivalent = joint_projective_equivalent(&t, &r.tuple, cfg.equality_tol)?;
            emit(
                out,
                &json!({
                    "gram": matrix_json(r.gram.matrix()),
                    "invariant_calls": r.invariant_calls,
                    "call_bound": r.call_bound(),
                    "connected": r.graph.is_connected(),
                    "projective_equivalent_to_input": equivalent,
                    "tuple": tuple_document(&r.tuple),
                }),
            )
        }
        Command::Estimate { input, epsilon, delta } => {
            json_only(cfg, "estimate")?;
            let t = load_tuple(input)?;
            let shots = bargmann_core::estimation::hoeffding_shots(*epsilon, *delta)?;
            if shots > cfg.shot_cap {
                return Err(CliError::Validation(format!("{shots} shots per part exceed --shot-cap {}", cfg.shot_cap)));
            }
            let exact = bargmann(&t)?.value;
            let r = estimate_bargmann(&t, *epsilon, *delta, &SplitRng::new(cfg.seed), cfg.threads)?;
            emit(
                out,
                &json!({
                    "seed": cfg.seed,
                    "epsilon": epsilon,
                    "delta": delta,
                    "shots_per_part": r.shots_per_part,
                    "estimate": cx(r.estimate),
                    "real_mean": r.real_mean,
                    "imag_mean": r.imag_mean,
                    "exact": cx(exact),
                    "error": (r.estimate - exact).norm(),
                }),
            )
        }
        Command::PdfSample { d, pairs } => {
            json_only(cfg, "pdf-sample")?;
            let s = sample_overlap_statistics(*d, *pairs, &SplitRng::new(cfg.seed), cfg.threads)?;
            emit(
                out,
                &json!({
                    "seed": cfg.seed,
                    "d": d,
                    "pairs": pairs,
                    "mean_abs_sq": s.mean_abs_sq,
                    "expected_mean_abs_sq": 1.0 / *d as f64,
                    "max_abs": s.max_abs,
                    "chi_square_uniform": s.histogram.chi_square_uniform(),
                    "bins": s.histogram.counts,
                }),
            )
        }
        Command::Lu { input } => {
            json_only(cfg, "lu")?;
            let rho = single_two_qubit(&load_tuple(input)?)?;
            let b = lu_invariants(&rho)?;
            let values: Vec<Value> = b.values.iter().map(|&z| cx(z)).collect();
            emit(out, &json!({"B": values}))
        }
        Command::Entanglement { input } => {
            json_only(cfg, "entanglement")?;
            let rho = single_two_qubit(&load_tuple(input)?)?;
            let v = entangled_by_invariants(&rho, cfg.boundary_tol)?;
            let p = ppt_oracle(&rho, cfg.boundary_tol)?;
            let status = match v.status {
                EntanglementStatus::Entangled => "entangled",
                EntanglementStatus::Separable => "separable",
                EntanglementStatus::BoundaryIndeterminate => "boundary-indeterminate",
            };
            emit(
                out,
                &json!({
                    "lhs": v.lhs,
                    "entangled": v.entangled,
                    "status": status,
                    "det_gamma": p.det_gamma,
                    "ppt_entangled": p.entangled,
                }),
            )
        }
        Command::Imaginarity { input } => {
            json_only(cfg, "imaginarity")?;
            let t = load_tuple(input)?;
            let q = imaginarity_quadratic(&t)?;
            let mut v = json!({
                "n": q.n,
                "p": q.p,
                "q": q.q,
                "p_from_pairs": q.p_from_pairs,
                "q_from_pairs": q.q_from_pairs,
                "residual": q.residual,
                "imag_abs": q.imag_abs,
                "invariant": cx(bargmann(&t)?.value),
            });
            if matches!(q.n, 3 | 4) {
                let (a0, b0sq) = closed_form_coefficients(&t)?;
                v["closed_form"] = json!({"a0": a0, "b0_squared": b0sq});
            }
            emit(out, &v)
        }
    }
}

fn write_invariant(cfg: &RunConfig, out: &mut dyn Write, z: Complex64, indices: &[usize]) -> Result<(), CliError> {
    match cfg.format {
        OutputFormat::Csv => {
            writeln!(out, "re,im,abs,arg")?;
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", z.re, z.im, z.norm(), z.arg())?;
            Ok(())
        }
        OutputFormat::Json => emit(out, &invariant_json(z, indices)),
    }
}
