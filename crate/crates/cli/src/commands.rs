use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use frustra_core::output::{fmt_f64, Metadata};
use frustra_core::phase_map::{self, Axis, Engine, ScanSpec};
use frustra_core::spectrum::{enumerate_spectrum, low_lying};
use frustra_core::topology::{trajectory, winding_number};
use frustra_core::verification::{channel_match, MatchReport};
use frustra_core::{Error, ModelParams};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{EngineArg, FieldArgs, Format, LengthSpec, OutputArgs, ValueSpec};

pub enum Failure {
    Usage(String),
    Capacity(String),
    Runtime(String),
    VerifyFailed(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::VerifyFailed(_) | Failure::Runtime(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Capacity(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Capacity(m) | Failure::Runtime(m) | Failure::VerifyFailed(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => Failure::Capacity(e.to_string()),
            Error::Parameter(_) | Error::Domain(_) | Error::SingularLoop(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(format!("i/o error: {e}"))
    }
}

pub type CmdResult = Result<(), Failure>;

/// Field samples with their `1/h` companions.
struct FieldAxis {
    inverse: bool,
    spec: ValueSpec,
}

impl FieldAxis {
    fn from_args(field: &FieldArgs) -> Result<Self, Failure> {
        match (&field.h, &field.inv_h) {
            (Some(h), None) => Ok(FieldAxis { inverse: false, spec: h.clone() }),
            (None, Some(inv)) => {
                if inv.points().contains(&0.0) {
                    return Err(Failure::Usage("--inv-h must not contain 0".into()));
                }
                Ok(FieldAxis { inverse: true, spec: inv.clone() })
            }
            _ => Err(Failure::Usage("give exactly one of --h or --inv-h".into())),
        }
    }

    /// `(1/h, h)` pairs in sweep order.
    fn samples(&self) -> Vec<(f64, f64)> {
        self.spec
            .points()
            .into_iter()
            .map(|x| if self.inverse { (x, 1.0 / x) } else { (1.0 / x, x) })
            .collect()
    }

    fn describe(&self) -> Value {
        json!({ "axis": if self.inverse { "inv_h" } else { "h" }, "spec": self.spec.to_string() })
    }
}

fn to_axis(spec: &ValueSpec) -> Axis {
    match spec {
        ValueSpec::Scalar(x) => Axis::Values(vec![*x]),
        ValueSpec::List(v) => Axis::Values(v.clone()),
        ValueSpec::Sweep { start, stop, count } => {
            Axis::Range { start: *start, stop: *stop, count: *count }
        }
    }
}

/// Writes the dataset and, for files, its metadata sidecar.
fn emit<F>(out: &OutputArgs, meta: Metadata, body: F) -> CmdResult
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match &out.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
            meta.write_sidecar(path)?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(w: &mut dyn Write, meta: &Metadata, data: &T) -> io::Result<()> {
    let doc = json!({ "metadata": meta, "data": data });
    serde_json::to_writer_pretty(&mut *w, &doc).map_err(io::Error::other)?;
    writeln!(w)
}

fn fmt_opt(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "nan".to_string()
    }
}

pub fn spectrum(l: usize, gamma: f64, delta: f64, field: &FieldArgs, out: &OutputArgs) -> CmdResult {
    let axis = FieldAxis::from_args(field)?;
    let base = ModelParams::new(l, gamma, delta, 0.0)?;
    let rows = axis
        .samples()
        .into_par_iter()
        .map(|(inv, h)| {
            let params = base.with_field(h)?;
            Ok((inv, h, enumerate_spectrum(&params)?.sorted_energies()))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let meta = Metadata::new(
        "spectrum",
        json!({ "L": l, "gamma": gamma, "delta": delta }),
        axis.describe(),
    )
    .with_extra(json!({ "levels_per_row": 1usize << l, "ordering": "lexicographic (Re, Im)" }));

    match out.format {
        Format::Csv => emit(out, meta, |w| {
            write!(w, "inv_h,h")?;
            for k in 0..(1usize << l) {
                write!(w, ",re_{k},im_{k}")?;
            }
            writeln!(w)?;
            for (inv, h, levels) in &rows {
                write!(w, "{},{}", fmt_f64(*inv), fmt_f64(*h))?;
                for e in levels {
                    write!(w, ",{},{}", fmt_f64(e.re), fmt_f64(e.im))?;
                }
                writeln!(w)?;
            }
            Ok(())
        }),
        Format::Json => {
            let data: Vec<Value> = rows
                .iter()
                .map(|(inv, h, levels)| {
                    json!({
                        "inv_h": inv,
                        "h": h,
                        "levels": levels.iter().map(|e| [e.re, e.im]).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let m = meta.clone();
            emit(out, meta, |w| write_json(w, &m, &data))
        }
    }
}

#[derive(Serialize)]
struct VerifyEntry {
    params: ModelParams,
    report: MatchReport,
}

pub fn verify(
    lengths: &LengthSpec,
    gamma: &ValueSpec,
    delta: &ValueSpec,
    field: &FieldArgs,
    out: &OutputArgs,
) -> CmdResult {
    let axis = FieldAxis::from_args(field)?;
    let mut points = Vec::new();
    for &l in &lengths.0 {
        for g in gamma.points() {
            for d in delta.points() {
                for &(_, h) in &axis.samples() {
                    points.push(ModelParams::new(l, g, d, h)?);
                }
            }
        }
    }
    let entries = points
        .par_iter()
        .map(|p| Ok(VerifyEntry { params: *p, report: channel_match(p)? }))
        .collect::<Result<Vec<_>, Error>>()?;

    for e in &entries {
        eprintln!(
            "[{}] L={} gamma={} delta={} h={}: max residual {:.3e} (tol {:.3e}), unmatched {}",
            if e.report.pass { "PASS" } else { "FAIL" },
            e.params.len(),
            e.params.gamma(),
            e.params.delta(),
            e.params.h(),
            e.report.max_residual,
            e.report.tolerance,
            e.report.unmatched
        );
    }
    let failed = entries.iter().filter(|e| !e.report.pass).count();

    let meta = Metadata::new(
        "verify",
        json!({ "L": lengths.0, "gamma": gamma.to_string(), "delta": delta.to_string() }),
        axis.describe(),
    )
    .with_extra(json!({ "tolerance": "1e-8 (1 + |gamma| + |delta| + |h|) L", "failed": failed }));

    match out.format {
        Format::Json => {
            let m = meta.clone();
            emit(out, meta, |w| write_json(w, &m, &entries))?
        }
        Format::Csv => emit(out, meta, |w| {
            writeln!(w, "L,gamma,delta,h,n_levels,max_residual,unmatched,tolerance,pass")?;
            for e in &entries {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    e.params.len(),
                    fmt_f64(e.params.gamma()),
                    fmt_f64(e.params.delta()),
                    fmt_f64(e.params.h()),
                    e.report.n_levels,
                    fmt_f64(e.report.max_residual),
                    e.report.unmatched,
                    fmt_f64(e.report.tolerance),
                    e.report.pass
                )?;
            }
            Ok(())
        })?,
    }

    if failed > 0 {
        Err(Failure::VerifyFailed(format!("{failed} of {} parameter points failed", entries.len())))
    } else {
        Ok(())
    }
}

fn boundaries_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".boundaries.csv");
    data.with_file_name(name)
}

pub fn phase_diagram(
    l: usize,
    gamma: f64,
    delta: &ValueSpec,
    field: &FieldArgs,
    engine: EngineArg,
    out: &OutputArgs,
) -> CmdResult {
    let axis = FieldAxis::from_args(field)?;
    let spec = ScanSpec {
        gamma,
        h_axis: to_axis(&axis.spec),
        h_axis_inverse: axis.inverse,
        delta_axis: to_axis(delta),
        l,
        engine: match engine {
            EngineArg::Analytic => Engine::Analytic,
            EngineArg::Ed => Engine::Ed,
        },
    };
    let cells = phase_map::scan(&spec)?;
    let ds = delta.points();
    let (dmin, dmax) = ds.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let curves = phase_map::boundary_curves(gamma, dmin, dmax, 201);

    let meta = Metadata::new(
        "phase-diagram",
        json!({ "L": l, "gamma": gamma, "engine": engine }),
        json!({ "field": axis.describe(), "delta": delta.to_string(), "order": "row-major, delta outer" }),
    )
    .with_extra(json!({ "im_ground_threshold": phase_map::IM_GROUND_THRESHOLD }));

    match out.format {
        Format::Json => {
            let m = meta.clone();
            emit(out, meta, |w| write_json(w, &m, &json!({ "cells": cells, "boundaries": curves })))
        }
        Format::Csv => {
            if let Some(path) = &out.output {
                let bpath = boundaries_path(path);
                let mut w = BufWriter::new(File::create(&bpath)?);
                writeln!(w, "label,delta,h")?;
                for c in &curves {
                    for &(d, h) in &c.points {
                        writeln!(w, "{},{},{}", c.label, fmt_f64(d), fmt_f64(h))?;
                    }
                }
                w.flush()?;
                meta.clone()
                    .with_extra(json!({ "data": path.file_name().map(|n| n.to_string_lossy().into_owned()) }))
                    .write_sidecar(&bpath)?;
            }
            emit(out, meta, |w| phase_map::write_scan_csv(&cells, w))
        }
    }
}

pub fn winding(gamma: f64, delta: f64, field: &FieldArgs, n_grid: usize, out: &OutputArgs) -> CmdResult {
    let axis = FieldAxis::from_args(field)?;
    let base = ModelParams::new(3, gamma, delta, 0.0)?;
    let rows = axis
        .samples()
        .into_par_iter()
        .map(|(inv, h)| {
            let params = base.with_field(h)?;
            match winding_number(&params, n_grid) {
                Ok(w) => Ok((inv, h, Some(w))),
                Err(Error::Domain(_) | Error::SingularLoop(_)) => Ok((inv, h, None)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let meta = Metadata::new("winding", json!({ "gamma": gamma, "delta": delta }), axis.describe())
        .with_extra(json!({ "n_grid": n_grid }));
    match out.format {
        Format::Csv => emit(out, meta, |w| {
            writeln!(w, "inv_h,h,value,rounded")?;
            for (inv, h, wn) in &rows {
                match wn {
                    Some(x) => writeln!(w, "{},{},{},{}", fmt_f64(*inv), fmt_f64(*h), fmt_f64(x.value), x.rounded)?,
                    None => writeln!(w, "{},{},nan,", fmt_f64(*inv), fmt_f64(*h))?,
                }
            }
            Ok(())
        }),
        Format::Json => {
            let data: Vec<Value> = rows
                .iter()
                .map(|(inv, h, wn)| json!({ "inv_h": inv, "h": h, "winding": wn }))
                .collect();
            let m = meta.clone();
            emit(out, meta, |w| write_json(w, &m, &data))
        }
    }
}

pub fn bloch(gamma: f64, delta: f64, h: f64, samples: usize, out: &OutputArgs) -> CmdResult {
    let params = ModelParams::new(3, gamma, delta, h)?;
    let traj = trajectory(&params, samples)?;
    let meta = Metadata::new(
        "bloch",
        json!({ "gamma": gamma, "delta": delta, "h": h }),
        json!({ "q": "uniform on [0, 2pi], endpoints included", "samples": samples }),
    )
    .with_extra(json!({ "closed": traj.closed }));
    match out.format {
        Format::Csv => emit(out, meta, |w| traj.write_csv(w)),
        Format::Json => {
            let data: Vec<Value> = traj
                .samples
                .iter()
                .map(|s| json!({ "q": s.q, "unit": s.unit.map(|c| [c.re, c.im]) }))
                .collect();
            let m = meta.clone();
            emit(out, meta, |w| write_json(w, &m, &data))
        }
    }
}

pub fn gap_scan(lengths: &LengthSpec, gamma: f64, delta: f64, h: f64, out: &OutputArgs) -> CmdResult {
    let rows = lengths
        .0
        .par_iter()
        .map(|&l| {
            let params = ModelParams::new(l, gamma, delta, h)?;
            let shells = low_lying(&params, 2)?;
            let gap = shells.get(1).map(|s| s.re - shells[0].re).unwrap_or(f64::NAN);
            Ok((l, shells[0].re, shells[0].multiplicity, gap))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let meta = Metadata::new(
        "gap-scan",
        json!({ "gamma": gamma, "delta": delta, "h": h }),
        json!({ "L": lengths.0 }),
    );
    match out.format {
        Format::Csv => emit(out, meta, |w| {
            writeln!(w, "L,ground_re,ground_degeneracy,gap")?;
            for (l, e0, deg, gap) in &rows {
                writeln!(w, "{l},{},{deg},{}", fmt_f64(*e0), fmt_opt(*gap))?;
            }
            Ok(())
        }),
        Format::Json => {
            let data: Vec<Value> = rows
                .iter()
                .map(|(l, e0, deg, gap)| json!({ "L": l, "ground_re": e0, "ground_degeneracy": deg.to_string(), "gap": gap }))
                .collect();
            let m = meta.clone();
            emit(out, meta, |w| write_json(w, &m, &data))
        }
    }
}
