//! One function per subcommand. Each returns the human-readable summary
//! and the machine-readable data; the caller decides where both go.

use crate::json::{fmt_f64, num_array, Json};
use crate::{CliError, Format, ModelKind, Resolved, WavefnArgs};

use qes2d::interbasis::{
    gram_cartesian_v1, gram_cartesian_v2, gram_elliptic_2d, gram_elliptic_factorized,
    gram_identity_defect, gram_parabolic_2d, gram_parabolic_factorized, gram_polar,
    interbasis_closed_sum, interbasis_projection,
};
use qes2d::model::{coordinate_map, sextic_parameters};
use qes2d::niven::solve_niven;
use qes2d::oracle::{
    elliptic_separation_oracle, parabolic_separation_oracle, plane_energy_oracle_v1,
    plane_energy_oracle_v2, sextic_oracle, EllipticAxis, ParabolicAxis,
};
use qes2d::qes::{limit_check, solve_elliptic, solve_parabolic, QesSolution};
use qes2d::recurrence::{
    parabolic_series_log, predicted_tail_ratio_elliptic, predicted_tail_ratio_parabolic,
    tail_ratio_elliptic, tail_ratio_parabolic,
};
use qes2d::wavefn::{EllipticState, ParabolicState};
use qes2d::{CoordSystem, Sign};

pub struct CmdOut {
    pub summary: String,
    pub data: String,
}

fn sign_str(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

fn model_tag(r: &Resolved) -> &'static str {
    match r.kind {
        ModelKind::V1 => "v1",
        ModelKind::V2 => "v2",
    }
}

fn params_json(r: &Resolved) -> Json {
    match r.kind {
        ModelKind::V1 => Json::Obj(vec![
            ("omega", Json::Num(r.omega)),
            ("k1", Json::Num(r.k1)),
            ("k2", Json::Num(r.k2)),
            ("sign2", Json::Str(sign_str(r.sign2).to_string())),
        ]),
        ModelKind::V2 => Json::Obj(vec![
            ("omega", Json::Num(r.omega)),
            ("k1", Json::Num(r.k1)),
            ("k2", Json::Num(r.k2)),
            ("sign1", Json::Str(sign_str(r.sign1).to_string())),
            ("sign2", Json::Str(sign_str(r.sign2).to_string())),
        ]),
    }
}

fn describe(r: &Resolved) -> String {
    match r.kind {
        ModelKind::V1 => format!(
            "v1 (omega={}, k1={}, k2={} [{}])",
            r.omega,
            r.k1,
            r.k2,
            sign_str(r.sign2)
        ),
        ModelKind::V2 => format!(
            "v2 (omega={}, k1={} [{}], k2={} [{}])",
            r.omega,
            r.k1,
            sign_str(r.sign1),
            r.k2,
            sign_str(r.sign2)
        ),
    }
}

fn require_json(r: &Resolved, command: &str) -> Result<(), CliError> {
    if r.format != Format::Json {
        return Err(CliError::Usage(format!(
            "`{command}` emits json only; valid formats: json"
        )));
    }
    Ok(())
}

fn matrix_json(m: &[Vec<f64>]) -> Json {
    Json::Arr(m.iter().map(|row| num_array(row)).collect())
}

fn state_json(q: usize, st: &qes2d::qes::QesState) -> Json {
    Json::Obj(vec![
        ("q", Json::Int(q as i64)),
        ("lambda", Json::Num(st.lambda)),
        ("q1", Json::Int(st.node_split.0 as i64)),
        ("q2", Json::Int(st.node_split.1 as i64)),
        ("coefficients", num_array(&st.coefficients)),
        ("zeros", num_array(&st.polynomial_zeros)),
    ])
}

fn solve_for(r: &Resolved) -> Result<QesSolution, CliError> {
    match r.kind {
        ModelKind::V1 => Ok(solve_parabolic(&r.model_v1()?, r.n)?),
        ModelKind::V2 => Ok(solve_elliptic(&r.model_v2()?, r.n, r.d2)?),
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "ok"
    } else {
        "FAILED"
    }
}

pub fn spectrum(r: &Resolved) -> Result<CmdOut, CliError> {
    require_json(r, "spectrum")?;
    let sol = solve_for(r)?;
    let mut fields = vec![
        ("model", Json::Str(model_tag(r).to_string())),
        ("params", params_json(r)),
        ("n", Json::Int(r.n as i64)),
    ];
    if r.kind == ModelKind::V2 {
        fields.push(("d2", Json::Num(r.d2)));
    }
    fields.push(("energy", Json::Num(sol.energy)));
    fields.push((
        "states",
        Json::Arr(
            sol.states
                .iter()
                .enumerate()
                .map(|(q, st)| state_json(q, st))
                .collect(),
        ),
    ));
    let lo = sol.states.first().map(|s| s.lambda).unwrap_or(0.0);
    let hi = sol.states.last().map(|s| s.lambda).unwrap_or(0.0);
    let summary = format!(
        "spectrum of {} at level n={}: energy {:.6}; {} states with lambda in [{:.6}, {:.6}]",
        describe(r),
        r.n,
        sol.energy,
        sol.states.len(),
        lo,
        hi
    );
    Ok(CmdOut {
        summary,
        data: Json::Obj(fields).render(),
    })
}

pub fn sepconst(r: &Resolved) -> Result<CmdOut, CliError> {
    require_json(r, "sepconst")?;
    match r.kind {
        ModelKind::V1 => {
            let sol = solve_for(r)?;
            let states: Vec<Json> = sol
                .states
                .iter()
                .enumerate()
                .map(|(q, st)| {
                    Json::Obj(vec![
                        ("q", Json::Int(q as i64)),
                        ("lambda", Json::Num(st.lambda)),
                        ("axis1_constant", Json::Num(st.lambda)),
                        ("axis2_constant", Json::Num(-st.lambda)),
                    ])
                })
                .collect();
            let summary = format!(
                "separation constants of {} at n={}: the first separated operator takes +lambda, the second -lambda; {} values",
                describe(r),
                r.n,
                states.len()
            );
            Ok(CmdOut {
                summary,
                data: Json::Obj(vec![
                    ("model", Json::Str("v1".into())),
                    ("params", params_json(r)),
                    ("n", Json::Int(r.n as i64)),
                    ("energy", Json::Num(sol.energy)),
                    ("states", Json::Arr(states)),
                ])
                .render(),
            })
        }
        ModelKind::V2 => {
            let m = r.model_v2()?;
            let energy = m.energy(r.n);
            let (states, concentric) = if r.d2 == 0.0 {
                // Concentric limit: lambda_q -> -(2 (n - q) + 1 +- k1 +- k2)^2,
                // ascending in q; the separated constant is its negative.
                let states: Vec<Json> = (0..=r.n)
                    .map(|q| {
                        let m1 = (r.n - q) as f64;
                        let lambda = -(2.0 * m1 + 1.0 + m.sk1() + m.sk2()).powi(2);
                        Json::Obj(vec![
                            ("q", Json::Int(q as i64)),
                            ("lambda", Json::Num(lambda)),
                            ("constant", Json::Num(-lambda)),
                        ])
                    })
                    .collect();
                (states, true)
            } else {
                let sol = solve_for(r)?;
                let shift = 0.25 * r.d2 * energy + r.d2 * r.d2 * m.omega * m.omega / 64.0;
                let states: Vec<Json> = sol
                    .states
                    .iter()
                    .enumerate()
                    .map(|(q, st)| {
                        Json::Obj(vec![
                            ("q", Json::Int(q as i64)),
                            ("lambda", Json::Num(st.lambda)),
                            ("constant", Json::Num(-st.lambda + shift)),
                        ])
                    })
                    .collect();
                (states, false)
            };
            let summary = if concentric {
                format!(
                    "separation constants of {} at n={} in the concentric limit (d2 = 0): closed-form values",
                    describe(r),
                    r.n
                )
            } else {
                format!(
                    "separation constants of {} at n={}, d2={}: {} values (constant = -lambda + d2 E/4 + d2^2 omega^2/64)",
                    describe(r),
                    r.n,
                    r.d2,
                    states.len()
                )
            };
            Ok(CmdOut {
                summary,
                data: Json::Obj(vec![
                    ("model", Json::Str("v2".into())),
                    ("params", params_json(r)),
                    ("n", Json::Int(r.n as i64)),
                    ("d2", Json::Num(r.d2)),
                    ("energy", Json::Num(energy)),
                    ("concentric_limit", Json::Bool(concentric)),
                    ("states", Json::Arr(states)),
                ])
                .render(),
            })
        }
    }
}

pub fn eigvec(r: &Resolved, q: Option<usize>) -> Result<CmdOut, CliError> {
    require_json(r, "eigvec")?;
    let sol = solve_for(r)?;
    if let Some(q) = q {
        if q > r.n {
            return Err(CliError::Usage(format!(
                "rank q={q} exceeds the level degree n={}",
                r.n
            )));
        }
    }
    let mut fields = vec![
        ("model", Json::Str(model_tag(r).to_string())),
        ("params", params_json(r)),
        ("n", Json::Int(r.n as i64)),
    ];
    if r.kind == ModelKind::V2 {
        fields.push(("d2", Json::Num(r.d2)));
    }
    fields.push(("energy", Json::Num(sol.energy)));
    let summary;
    match q {
        Some(q) => {
            let st = &sol.states[q];
            fields.push(("q", Json::Int(q as i64)));
            fields.push(("lambda", Json::Num(st.lambda)));
            fields.push(("q1", Json::Int(st.node_split.0 as i64)));
            fields.push(("q2", Json::Int(st.node_split.1 as i64)));
            fields.push(("coefficients", num_array(&st.coefficients)));
            fields.push(("zeros", num_array(&st.polynomial_zeros)));
            summary = format!(
                "coefficient vector of {} at n={}, rank q={}: lambda {:.6}, {} coefficients, node split ({}, {})",
                describe(r),
                r.n,
                q,
                st.lambda,
                st.coefficients.len(),
                st.node_split.0,
                st.node_split.1
            );
        }
        None => {
            fields.push((
                "states",
                Json::Arr(
                    sol.states
                        .iter()
                        .enumerate()
                        .map(|(q, st)| state_json(q, st))
                        .collect(),
                ),
            ));
            summary = format!(
                "coefficient vectors of {} at n={}: all {} ranks",
                describe(r),
                r.n,
                sol.states.len()
            );
        }
    }
    Ok(CmdOut {
        summary,
        data: Json::Obj(fields).render(),
    })
}

fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let step = (max - min) / ((count - 1) as f64);
    (0..count).map(|i| min + step * i as f64).collect()
}

pub fn wavefn(r: &Resolved, args: &WavefnArgs) -> Result<CmdOut, CliError> {
    let q = args.q.unwrap_or(0);
    if q > r.n {
        return Err(CliError::Usage(format!(
            "rank q={q} exceeds the level degree n={}",
            r.n
        )));
    }
    enum State {
        Parabolic(ParabolicState),
        Elliptic(EllipticState),
    }
    let (state, sys, defaults) = match r.kind {
        ModelKind::V1 => {
            let st = ParabolicState::new(r.model_v1()?, r.n, q)?;
            let (c1, c2) = (st.cutoff_u1(), st.cutoff_u2());
            (
                State::Parabolic(st),
                CoordSystem::Parabolic,
                (-c1, c1, c2 / 50.0, c2),
            )
        }
        ModelKind::V2 => {
            let st = EllipticState::new(r.model_v2()?, r.d2, r.n, q)?;
            let c1 = st.cutoff_u1();
            let quarter = std::f64::consts::FRAC_PI_2;
            (
                State::Elliptic(st),
                CoordSystem::Elliptic { d2: r.d2 },
                (c1 / 50.0, c1, 0.02 * quarter, 0.98 * quarter),
            )
        }
    };
    let u1_min = args.u1_min.unwrap_or(defaults.0);
    let u1_max = args.u1_max.unwrap_or(defaults.1);
    let u2_min = args.u2_min.unwrap_or(defaults.2);
    let u2_max = args.u2_max.unwrap_or(defaults.3);
    let u1_count = args.u1_count.unwrap_or(41);
    let u2_count = args.u2_count.unwrap_or(25);
    if u1_count == 0 || u2_count == 0 {
        return Err(CliError::Usage("grid counts must be at least 1".into()));
    }
    if !(u1_min <= u1_max) || !(u2_min <= u2_max) {
        return Err(CliError::Usage(format!(
            "grid ranges must satisfy min <= max, got u1 [{u1_min}, {u1_max}], u2 [{u2_min}, {u2_max}]"
        )));
    }
    let lambda = match &state {
        State::Parabolic(st) => st.lambda,
        State::Elliptic(st) => st.lambda,
    };
    let mut rows: Vec<(f64, f64, f64, f64, f64)> =
        Vec::with_capacity(u1_count * u2_count);
    let mut max_abs = 0.0f64;
    for &u1 in &linspace(u1_min, u1_max, u1_count) {
        for &u2 in &linspace(u2_min, u2_max, u2_count) {
            let (x, y, _) = coordinate_map(sys, u1, u2)?;
            let value = match &state {
                State::Parabolic(st) => st.eval_coords(u1, u2)?,
                State::Elliptic(st) => st.eval_coords(u1, u2)?,
            };
            max_abs = max_abs.max(value.abs());
            rows.push((u1, u2, x, y, value));
        }
    }
    let summary = format!(
        "sampled the {} state of {} (n={}, q={}, lambda {:.6}) on a {} x {} grid; max |value| {:.6}",
        match r.kind {
            ModelKind::V1 => "parabolic",
            ModelKind::V2 => "elliptic",
        },
        describe(r),
        r.n,
        q,
        lambda,
        u1_count,
        u2_count,
        max_abs
    );
    let data = match r.format {
        Format::Csv => {
            let mut out = String::from("u1,u2,x,y,value\n");
            for (u1, u2, x, y, v) in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_f64(*u1),
                    fmt_f64(*u2),
                    fmt_f64(*x),
                    fmt_f64(*y),
                    fmt_f64(*v)
                ));
            }
            out
        }
        Format::Json => {
            let mut fields = vec![
                ("model", Json::Str(model_tag(r).to_string())),
                ("params", params_json(r)),
                ("n", Json::Int(r.n as i64)),
            ];
            if r.kind == ModelKind::V2 {
                fields.push(("d2", Json::Num(r.d2)));
            }
            fields.push(("q", Json::Int(q as i64)));
            fields.push(("lambda", Json::Num(lambda)));
            fields.push((
                "grid",
                Json::Obj(vec![
                    ("u1_min", Json::Num(u1_min)),
                    ("u1_max", Json::Num(u1_max)),
                    ("u1_count", Json::Int(u1_count as i64)),
                    ("u2_min", Json::Num(u2_min)),
                    ("u2_max", Json::Num(u2_max)),
                    ("u2_count", Json::Int(u2_count as i64)),
                ]),
            ));
            fields.push((
                "samples",
                Json::Arr(
                    rows.iter()
                        .map(|(u1, u2, x, y, v)| {
                            Json::Obj(vec![
                                ("u1", Json::Num(*u1)),
                                ("u2", Json::Num(*u2)),
                                ("x", Json::Num(*x)),
                                ("y", Json::Num(*y)),
                                ("value", Json::Num(*v)),
                            ])
                        })
                        .collect(),
                ),
            ));
            Json::Obj(fields).render()
        }
    };
    Ok(CmdOut { summary, data })
}

pub fn gram(
    r: &Resolved,
    basis: Option<&str>,
    route: Option<&str>,
    order: usize,
    panels: usize,
) -> Result<CmdOut, CliError> {
    require_json(r, "gram")?;
    let basis = basis.map(str::trim).unwrap_or(match r.kind {
        ModelKind::V1 => "parabolic",
        ModelKind::V2 => "elliptic",
    });
    let route = match route.map(str::trim) {
        None | Some("factorized") => "factorized",
        Some("grid") => "grid",
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown route `{other}`; valid values: factorized, grid"
            )))
        }
    };
    let (matrix, separable) = match (r.kind, basis) {
        (ModelKind::V1, "cartesian") => (gram_cartesian_v1(&r.model_v1()?, r.n)?, false),
        (ModelKind::V1, "parabolic") => {
            let states = qes2d::wavefn::parabolic_multiplet(&r.model_v1()?, r.n)?;
            let g = match route {
                "grid" => gram_parabolic_2d(&states, order, panels)?,
                _ => gram_parabolic_factorized(&states)?,
            };
            (g, true)
        }
        (ModelKind::V2, "cartesian") => (gram_cartesian_v2(&r.model_v2()?, r.n)?, false),
        (ModelKind::V2, "polar") => (gram_polar(&r.model_v2()?, r.n)?, false),
        (ModelKind::V2, "elliptic") => {
            let states = qes2d::wavefn::elliptic_multiplet(&r.model_v2()?, r.n, r.d2)?;
            let g = match route {
                "grid" => gram_elliptic_2d(&states, order, panels)?,
                _ => gram_elliptic_factorized(&states)?,
            };
            (g, true)
        }
        (ModelKind::V1, other) => {
            return Err(CliError::Usage(format!(
                "basis `{other}` is not defined for model v1; valid values: cartesian, parabolic"
            )))
        }
        (ModelKind::V2, other) => {
            return Err(CliError::Usage(format!(
                "basis `{other}` is not defined for model v2; valid values: cartesian, polar, elliptic"
            )))
        }
    };
    let defect = gram_identity_defect(&matrix);
    let tol = r.tol.unwrap_or(1e-6);
    let pass = defect <= tol;
    let mut fields = vec![
        ("model", Json::Str(model_tag(r).to_string())),
        ("params", params_json(r)),
        ("n", Json::Int(r.n as i64)),
    ];
    if r.kind == ModelKind::V2 && basis == "elliptic" {
        fields.push(("d2", Json::Num(r.d2)));
    }
    fields.push(("basis", Json::Str(basis.to_string())));
    if separable {
        fields.push(("route", Json::Str(route.to_string())));
    }
    fields.push(("matrix", matrix_json(&matrix)));
    fields.push(("defect", Json::Num(defect)));
    fields.push(("tol", Json::Num(tol)));
    fields.push(("pass", Json::Bool(pass)));
    let summary = format!(
        "gram matrix of the {} basis of {} at n={} ({} states{}): identity defect {:.2e} (tol {:.1e}) -> {}",
        basis,
        describe(r),
        r.n,
        matrix.len(),
        if separable {
            format!(", {route} route")
        } else {
            String::new()
        },
        defect,
        tol,
        verdict(pass)
    );
    Ok(CmdOut {
        summary,
        data: Json::Obj(fields).render(),
    })
}

pub fn interbasis(
    r: &Resolved,
    method: Option<&str>,
    order: usize,
    panels: usize,
) -> Result<CmdOut, CliError> {
    require_json(r, "interbasis")?;
    if r.kind != ModelKind::V1 {
        return Err(CliError::Usage(
            "`interbasis` relates the parabolic and Cartesian bases of model v1; pass --model v1"
                .into(),
        ));
    }
    let m = r.model_v1()?;
    let (w, method) = match method.map(str::trim) {
        None | Some("projection") => (interbasis_projection(&m, r.n, order, panels)?, "projection"),
        Some("closed-sum") | Some("closed_sum") => {
            (interbasis_closed_sum(&m, r.n)?, "closed-sum")
        }
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown method `{other}`; valid values: projection, closed-sum"
            )))
        }
    };
    let defect = w.orthonormality_defect();
    let tol = r.tol.unwrap_or(1e-6);
    let pass = defect <= tol;
    let summary = format!(
        "change of basis (parabolic <- Cartesian) for {} at n={} via {}: row-orthonormality defect {:.2e} (tol {:.1e}) -> {}",
        describe(r),
        r.n,
        method,
        defect,
        tol,
        verdict(pass)
    );
    Ok(CmdOut {
        summary,
        data: Json::Obj(vec![
            ("model", Json::Str("v1".into())),
            ("params", params_json(r)),
            ("n", Json::Int(r.n as i64)),
            ("method", Json::Str(method.to_string())),
            ("matrix", matrix_json(&w.entries)),
            ("row_orthonormality_defect", Json::Num(defect)),
            ("tol", Json::Num(tol)),
            ("pass", Json::Bool(pass)),
        ])
        .render(),
    })
}

pub fn niven(r: &Resolved, q: Option<usize>) -> Result<CmdOut, CliError> {
    require_json(r, "niven")?;
    if r.kind != ModelKind::V1 {
        return Err(CliError::Usage(
            "`niven` solves the parabolic zero system of model v1; pass --model v1".into(),
        ));
    }
    let m = r.model_v1()?;
    let sol = solve_parabolic(&m, r.n)?;
    let ranks: Vec<usize> = match q {
        Some(q) if q > r.n => {
            return Err(CliError::Usage(format!(
                "rank q={q} exceeds the level degree n={}",
                r.n
            )))
        }
        Some(q) => vec![q],
        None => (0..=r.n).collect(),
    };
    let tol = r.tol.unwrap_or(1e-10);
    let mut states = Vec::with_capacity(ranks.len());
    let mut worst_residual = 0.0f64;
    let mut worst_gap = 0.0f64;
    for &q in &ranks {
        let niv = solve_niven(&m, r.n, q)?;
        let reference = sol.states[q].lambda;
        worst_gap = worst_gap.max((niv.lambda - reference).abs());
        worst_residual = niv
            .residuals
            .iter()
            .fold(worst_residual, |acc, x| acc.max(x.abs()));
        states.push(Json::Obj(vec![
            ("q", Json::Int(q as i64)),
            ("lambda", Json::Num(niv.lambda)),
            ("reference_lambda", Json::Num(reference)),
            ("alphas", num_array(&niv.alphas)),
            ("residuals", num_array(&niv.residuals)),
            ("iterations", Json::Int(niv.iterations as i64)),
        ]));
    }
    let pass = worst_residual <= tol;
    let summary = format!(
        "zero configurations of {} at n={} ({} rank{}): worst equation residual {:.2e} (tol {:.1e}) -> {}; worst gap to the determinant lambda {:.2e}",
        describe(r),
        r.n,
        ranks.len(),
        if ranks.len() == 1 { "" } else { "s" },
        worst_residual,
        tol,
        verdict(pass),
        worst_gap
    );
    Ok(CmdOut {
        summary,
        data: Json::Obj(vec![
            ("model", Json::Str("v1".into())),
            ("params", params_json(r)),
            ("n", Json::Int(r.n as i64)),
            ("energy", Json::Num(sol.energy)),
            ("states", Json::Arr(states)),
            ("tol", Json::Num(tol)),
            ("pass", Json::Bool(pass)),
        ])
        .render(),
    })
}

pub fn limits(r: &Resolved) -> Result<CmdOut, CliError> {
    require_json(r, "limits")?;
    if r.kind != ModelKind::V2 {
        return Err(CliError::Usage(
            "`limits` probes the elliptic constants of model v2; pass --model v2".into(),
        ));
    }
    let m = r.model_v2()?;
    let report = limit_check(&m, r.n)?;
    let tol = r.tol.unwrap_or(1e-3);
    let worst_small = report
        .small_d2_errors
        .iter()
        .fold(0.0f64, |acc, x| acc.max(*x));
    let pass = worst_small <= tol && report.large_d2_fit_residual <= tol;
    let pair_objs = |pairs: &[(f64, f64)], second: &'static str| {
        Json::Arr(
            pairs
                .iter()
                .map(|&(fitted, reference)| {
                    Json::Obj(vec![
                        ("fitted", Json::Num(fitted)),
                        (second, Json::Num(reference)),
                    ])
                })
                .collect(),
        )
    };
    let summary = format!(
        "elliptic limits of {} at n={}: concentric probe d2={} worst relative error {:.2e}; far-separated pinned-quadratic fit residual {:.2e} at d2={} (tol {:.1e}) -> {}",
        describe(r),
        r.n,
        report.small_d2,
        worst_small,
        report.large_d2_fit_residual,
        report.large_d2[0],
        tol,
        verdict(pass)
    );
    Ok(CmdOut {
        summary,
        data: Json::Obj(vec![
            ("model", Json::Str("v2".into())),
            ("params", params_json(r)),
            ("n", Json::Int(r.n as i64)),
            ("small_d2", Json::Num(report.small_d2)),
            ("small_d2_lambda_errors", num_array(&report.small_d2_errors)),
            ("small_d2_slopes", num_array(&report.small_d2_slopes)),
            ("large_d2_probes", num_array(&report.large_d2)),
            (
                "large_d2_fit_residual",
                Json::Num(report.large_d2_fit_residual),
            ),
            (
                "large_d2_quadratic",
                pair_objs(&report.large_d2_quadratic, "exact"),
            ),
            (
                "large_d2_linear",
                pair_objs(&report.large_d2_linear, "reference"),
            ),
            ("tol", Json::Num(tol)),
            ("pass", Json::Bool(pass)),
        ])
        .render(),
    })
}

/// Exact plane energies with their degeneracies: level n appears n+1 times.
fn degenerate_energies(energy: impl Fn(usize) -> f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut level = 0usize;
    while out.len() < count {
        for _ in 0..=level {
            out.push(energy(level));
            if out.len() == count {
                break;
            }
        }
        level += 1;
    }
    out
}

pub fn oracle(
    r: &Resolved,
    check: Option<&str>,
    axis: Option<&str>,
    grid: Option<usize>,
    levels: usize,
) -> Result<CmdOut, CliError> {
    require_json(r, "oracle")?;
    let check = match check.map(str::trim) {
        None | Some("plane") => "plane",
        Some("axis") => "axis",
        Some("sextic") => "sextic",
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown check `{other}`; valid values: plane, axis, sextic"
            )))
        }
    };
    let mut fields = vec![
        ("model", Json::Str(model_tag(r).to_string())),
        ("params", params_json(r)),
        ("check", Json::Str(check.to_string())),
    ];
    let (computed, reference, default_tol, detail) = match check {
        "plane" => {
            let grid = grid.unwrap_or(72);
            if levels == 0 {
                return Err(CliError::Usage("--levels must be at least 1".into()));
            }
            let (computed, reference) = match r.kind {
                ModelKind::V1 => {
                    let m = r.model_v1()?;
                    (
                        plane_energy_oracle_v1(&m, levels, grid)?,
                        degenerate_energies(|n| m.energy(n), levels),
                    )
                }
                ModelKind::V2 => {
                    let m = r.model_v2()?;
                    (
                        plane_energy_oracle_v2(&m, levels, grid)?,
                        degenerate_energies(|n| m.energy(n), levels),
                    )
                }
            };
            fields.push(("grid", Json::Int(grid as i64)));
            fields.push(("levels", Json::Int(levels as i64)));
            (
                computed,
                reference,
                1e-3,
                format!("{levels} lowest plane energies on a {grid}^2 grid"),
            )
        }
        "axis" => {
            let grid = grid.unwrap_or(1600);
            fields.push(("n", Json::Int(r.n as i64)));
            let (computed, reference, axis_name) = match r.kind {
                ModelKind::V1 => {
                    let m = r.model_v1()?;
                    let which = match axis.map(str::trim) {
                        None | Some("xi") => (ParabolicAxis::Xi, "xi"),
                        Some("eta") => (ParabolicAxis::Eta, "eta"),
                        Some(other) => {
                            return Err(CliError::Usage(format!(
                                "unknown axis `{other}` for model v1; valid values: xi, eta"
                            )))
                        }
                    };
                    let fd = parabolic_separation_oracle(&m, r.n, grid, which.0)?;
                    let sol = solve_parabolic(&m, r.n)?;
                    (fd, sol.states.iter().map(|s| s.lambda).collect(), which.1)
                }
                ModelKind::V2 => {
                    let m = r.model_v2()?;
                    let which = match axis.map(str::trim) {
                        None | Some("radial") => (EllipticAxis::Radial, "radial"),
                        Some("angular") => (EllipticAxis::Angular, "angular"),
                        Some(other) => {
                            return Err(CliError::Usage(format!(
                                "unknown axis `{other}` for model v2; valid values: radial, angular"
                            )))
                        }
                    };
                    let fd = elliptic_separation_oracle(&m, r.n, r.d2, grid, which.0)?;
                    let sol = solve_elliptic(&m, r.n, r.d2)?;
                    fields.push(("d2", Json::Num(r.d2)));
                    (fd, sol.states.iter().map(|s| s.lambda).collect(), which.1)
                }
            };
            fields.push(("axis", Json::Str(axis_name.to_string())));
            fields.push(("grid", Json::Int(grid as i64)));
            (
                computed,
                reference,
                1e-4,
                format!("separation constants from the discretized {axis_name} axis at n={}", r.n),
            )
        }
        _ => {
            // sextic
            if r.kind != ModelKind::V1 {
                return Err(CliError::Usage(
                    "`oracle --check sextic` reduces model v1; pass --model v1".into(),
                ));
            }
            let grid = grid.unwrap_or(1600);
            let m = r.model_v1()?;
            let p = sextic_parameters(&m, r.n);
            let computed = sextic_oracle(&p, r.n + 1, grid)?;
            let sol = solve_parabolic(&m, r.n)?;
            fields.push(("n", Json::Int(r.n as i64)));
            fields.push(("grid", Json::Int(grid as i64)));
            fields.push((
                "sextic_parameters",
                Json::Obj(vec![
                    ("omega", Json::Num(p.omega)),
                    ("beta", Json::Num(p.beta)),
                    ("delta", Json::Num(p.delta)),
                    ("lambda_bar", Json::Num(p.lambda_bar)),
                ]),
            ));
            (
                computed,
                sol.states.iter().map(|s| s.lambda).collect::<Vec<f64>>(),
                1e-3,
                format!("doubled sextic levels against the constants at n={}", r.n),
            )
        }
    };
    let max_gap = computed
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let tol = r.tol.unwrap_or(default_tol);
    let pass = max_gap <= tol;
    fields.push(("computed", num_array(&computed)));
    fields.push(("reference", num_array(&reference)));
    fields.push(("max_abs_gap", Json::Num(max_gap)));
    fields.push(("tol", Json::Num(tol)));
    fields.push(("pass", Json::Bool(pass)));
    let summary = format!(
        "finite-difference oracle for {}: {}; max |gap| {:.2e} (tol {:.1e}) -> {}",
        describe(r),
        detail,
        max_gap,
        tol,
        verdict(pass)
    );
    Ok(CmdOut {
        summary,
        data: Json::Obj(fields).render(),
    })
}

pub fn asymptotics(
    r: &Resolved,
    energy: Option<f64>,
    lambda: Option<f64>,
    s: usize,
) -> Result<CmdOut, CliError> {
    require_json(r, "asymptotics")?;
    if s < 10 {
        return Err(CliError::Usage(format!(
            "the tail row --s must be at least 10, got {s}"
        )));
    }
    let lambda = lambda.unwrap_or(-1.0);
    let tol = r.tol.unwrap_or(0.05);
    match r.kind {
        ModelKind::V1 => {
            let m = r.model_v1()?;
            let energy = energy.unwrap_or(0.123);
            let measured = tail_ratio_parabolic(&m, energy, lambda, s)?;
            let predicted = predicted_tail_ratio_parabolic(&m, s);
            let gap = (measured / predicted - 1.0).abs();
            let pass = gap <= tol;
            // The series variable z is the square of the separable
            // coordinate; off spectrum the sum outgrows cosh(w z^2 / 2),
            // which is what makes the solution non-normalizable.
            let ln_cosh = |x: f64| x.abs() + (-2.0 * x.abs()).exp().ln_1p() - 2.0f64.ln();
            let mut growth = Vec::new();
            for &z in &[3.0f64, 4.0, 6.0, 8.0, 10.0] {
                let log_series = parabolic_series_log(&m, energy, lambda, z.sqrt())?;
                let log_bound = ln_cosh(0.5 * m.omega * z * z);
                growth.push(Json::Obj(vec![
                    ("z", Json::Num(z)),
                    ("log_series", Json::Num(log_series)),
                    ("log_bound", Json::Num(log_bound)),
                ]));
            }
            let summary = format!(
                "parabolic tail of {} off spectrum (E={}, lambda={}): ratio at row {} is {:.6e}, predicted {:.6e}, relative gap {:.2e} (tol {:.1e}) -> {}",
                describe(r),
                energy,
                lambda,
                s,
                measured,
                predicted,
                gap,
                tol,
                verdict(pass)
            );
            Ok(CmdOut {
                summary,
                data: Json::Obj(vec![
                    ("model", Json::Str("v1".into())),
                    ("params", params_json(r)),
                    ("energy", Json::Num(energy)),
                    ("lambda", Json::Num(lambda)),
                    ("s", Json::Int(s as i64)),
                    ("measured_tail_ratio", Json::Num(measured)),
                    ("predicted_tail_ratio", Json::Num(predicted)),
                    ("relative_gap", Json::Num(gap)),
                    ("growth", Json::Arr(growth)),
                    ("tol", Json::Num(tol)),
                    ("pass", Json::Bool(pass)),
                ])
                .render(),
            })
        }
        ModelKind::V2 => {
            let m = r.model_v2()?;
            let energy = energy.unwrap_or(0.2);
            let measured = tail_ratio_elliptic(&m, r.d2, energy, lambda, s)?;
            let predicted = predicted_tail_ratio_elliptic(&m, r.d2, s);
            let gap = (measured / predicted - 1.0).abs();
            let pass = gap <= tol;
            let summary = format!(
                "elliptic tail of {} off spectrum (d2={}, E={}, lambda={}): ratio at row {} is {:.6e}, predicted {:.6e}, relative gap {:.2e} (tol {:.1e}) -> {}",
                describe(r),
                r.d2,
                energy,
                lambda,
                s,
                measured,
                predicted,
                gap,
                tol,
                verdict(pass)
            );
            Ok(CmdOut {
                summary,
                data: Json::Obj(vec![
                    ("model", Json::Str("v2".into())),
                    ("params", params_json(r)),
                    ("d2", Json::Num(r.d2)),
                    ("energy", Json::Num(energy)),
                    ("lambda", Json::Num(lambda)),
                    ("s", Json::Int(s as i64)),
                    ("measured_tail_ratio", Json::Num(measured)),
                    ("predicted_tail_ratio", Json::Num(predicted)),
                    ("relative_gap", Json::Num(gap)),
                    ("tol", Json::Num(tol)),
                    ("pass", Json::Bool(pass)),
                ])
                .render(),
            })
        }
    }
}
