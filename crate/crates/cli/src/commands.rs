//! One function per subcommand, each producing a [`Report`].

use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use pisot_core::algebraic::PvStatus;
use pisot_core::refinement::{bernoulli_phihat, parse_mask_file};
use pisot_core::solenoid::{enumerate_y, equidistribution_check};
use pisot_core::zero_density::{
    classify_tail, count_norm_values, default_delta, density_windows, norm_form, scan_near_zeros,
    vanishing_probe,
};
use pisot_core::{
    BuiltinMask, FieldElement, LatticeCylinder, NumberField, RefinementMask, UNeighborhood,
};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::emit::{emit_csv, Cell, PlotSpec};
use crate::{CliError, Command, MaskArgs, RunConfig, ScanTarget};

/// Tabular output of a command with a human summary and an optional chart.
#[derive(Debug, Clone)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<String>,
    pub plot: Option<PlotSpec>,
}

impl Report {
    fn new(header: &[&str]) -> Self {
        Report {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
            plot: None,
        }
    }
}

pub fn dispatch(config: &RunConfig) -> Result<Report, CliError> {
    let bits = config.precision_bits;
    match &config.command {
        Command::FieldCheck { poly } => field_check(&field(poly, bits)?),
        Command::SymbolScan { mask, range, step } => {
            symbol_scan(&load_mask(mask, bits)?, parse_range(range, "--range")?, *step)
        }
        Command::PhihatOrbit { mask, lambda, jmin, jmax, tol } => {
            let m = load_mask(mask, bits)?;
            let lam = parse_lambda(lambda, m.field().degree())?;
            phihat_orbit(&m, &lam, *jmin, *jmax, *tol)
        }
        Command::Bernoulli { poly, jmax, cutoff } => bernoulli(&field(poly, bits)?, *jmax, *cutoff),
        Command::LatticeDensity { poly, m, eps, l } => lattice_density(&field(poly, bits)?, *m, eps, l),
        Command::ZerosScan { mask, target, l, step, delta, tol, points } => {
            let m = load_mask(mask, bits)?;
            let delta = delta.unwrap_or_else(|| default_delta(&m));
            zeros_scan(&m, *target, *l, *step, delta, *tol, points.as_deref())
        }
        Command::VanishingProbe { mask, lambda, jmax, tol, delta } => {
            let m = load_mask(mask, bits)?;
            let lams = lambda
                .iter()
                .map(|s| parse_lambda(s, m.field().degree()))
                .collect::<Result<Vec<_>, _>>()?;
            let delta = delta.unwrap_or_else(|| default_delta(&m));
            probe(&m, &lams, *jmax, *tol, delta)
        }
        Command::NormsCount { poly, l, box_size } => {
            let b = box_size
                .map(|b| i64::try_from(b).map_err(|_| CliError::Usage("--box is too large".into())))
                .transpose()?;
            norms_count(&field(poly, bits)?, *l, b)
        }
        Command::Equidistribution { poly, n, samples, range } => equidistribution(
            &field(poly, bits)?,
            *n,
            *samples,
            parse_range(range, "--range")?,
            config.seed,
        ),
    }
}

fn field(poly: &str, bits: u32) -> Result<NumberField, CliError> {
    NumberField::from_poly_str(poly, bits).map_err(|e| match e {
        pisot_core::Error::Parse(m) | pisot_core::Error::InvalidInput(m) => {
            CliError::Usage(format!("--poly: {m}"))
        }
        other => other.into(),
    })
}

pub fn load_mask(args: &MaskArgs, bits: u32) -> Result<RefinementMask, CliError> {
    match (&args.mask, &args.mask_file) {
        (Some(name), None) => {
            let b = BuiltinMask::from_str(name).map_err(|e| CliError::Usage(format!("--mask: {e}")))?;
            Ok(b.build_with_precision(bits)?)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("--mask-file {}: {e}", path.display())))?;
            parse_mask_file(&text, bits).map_err(|e| match e {
                pisot_core::Error::Parse(m) => CliError::Usage(format!("--mask-file: {m}")),
                other => other.into(),
            })
        }
        _ => Err(CliError::Usage("one of --mask or --mask-file is required".into())),
    }
}

pub fn parse_range(s: &str, flag: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("{flag}: expected a:b with a < b, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok((a, b))
}

/// Power-basis coordinates, zero padded to the field degree.
pub fn parse_lambda(s: &str, degree: usize) -> Result<FieldElement, CliError> {
    let e = FieldElement::parse(s).map_err(|e| CliError::Usage(format!("--lambda: {e}")))?;
    if e.dim() > degree {
        return Err(CliError::Usage(format!(
            "--lambda: {} coordinates for a degree {degree} field",
            e.dim()
        )));
    }
    let mut coords = e.coords().to_vec();
    coords.resize(degree, Default::default());
    Ok(FieldElement::new(coords))
}

fn complex_text(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.6} {sign} {:.6}i", z.re, z.im.abs())
}

fn field_check(f: &NumberField) -> Result<Report, CliError> {
    let mut r = Report::new(&["k", "re", "im", "modulus", "radius"]);
    for (k, (z, rad)) in f.roots().iter().zip(f.radii()).enumerate() {
        r.rows.push(vec![(k + 1).into(), z.re.into(), z.im.into(), z.norm().into(), (*rad).into()]);
    }
    let mut line = format!("{}, degree {}", f.pv_status(), f.degree());
    if f.degree() > 1 {
        line.push_str(&format!(", conjugate modulus {:.4}", f.max_conjugate_modulus()));
    }
    r.summary.push(line);
    r.summary.push(format!(
        "alpha = {:.16}, discriminant {}, real conjugates {}, complex pairs {}",
        f.alpha(),
        f.discriminant(),
        f.real_conjugates(),
        f.complex_pairs()
    ));
    Ok(r)
}

fn grid(range: (f64, f64), step: f64) -> Result<Vec<f64>, CliError> {
    let n = ((range.1 - range.0) / step + 1e-9).floor();
    if n > 1e8 {
        return Err(CliError::Usage(format!("--step: {n:.0} grid points exceed 1e8")));
    }
    Ok((0..=n as usize).map(|i| range.0 + i as f64 * step).collect())
}

fn symbol_scan(m: &RefinementMask, range: (f64, f64), step: f64) -> Result<Report, CliError> {
    let ys = grid(range, step)?;
    let vals: Vec<_> = ys.par_iter().map(|&y| m.eval_symbol(y)).collect();
    let mut r;
    let mut series = Vec::with_capacity(ys.len());
    if m.is_scalar() {
        r = Report::new(&["y", "re", "im", "abs"]);
        for (&y, v) in ys.iter().zip(&vals) {
            let z = v.scalar();
            r.rows.push(vec![y.into(), z.re.into(), z.im.into(), z.norm().into()]);
            series.push((y, z.norm()));
        }
    } else {
        r = Report::new(&["y", "norm", "min_singular"]);
        for (&y, v) in ys.iter().zip(&vals) {
            let s = v.min_singular_value();
            r.rows.push(vec![y.into(), v.value.norm().into(), s.into()]);
            series.push((y, s));
        }
    }
    let (argmin, min) = series.iter().fold((f64::NAN, f64::INFINITY), |acc, &(y, v)| {
        if v < acc.1 { (y, v) } else { acc }
    });
    let what = if m.is_scalar() { "|a|" } else { "min singular value of a" };
    r.summary.push(format!("min {what} = {min:.6e} at y = {argmin} over {} points", ys.len()));
    r.plot = PlotSpec::new(
        format!("Fourier symbol of the {} mask", m.name()),
        "y",
        if m.is_scalar() { "|a(y)|" } else { "smin a(y)" },
        series,
    )
    .ok();
    Ok(r)
}

fn phihat_orbit(
    m: &RefinementMask,
    lam: &FieldElement,
    jmin: i64,
    jmax: i64,
    tol: f64,
) -> Result<Report, CliError> {
    if jmin > jmax {
        return Err(CliError::Usage("--jmin must not exceed --jmax".into()));
    }
    let orbit = m.phihat_orbit_exact(lam, jmin, jmax, tol)?;
    let mut header = vec!["J".to_string()];
    if m.is_scalar() {
        header.extend(["re", "im", "abs"].map(String::from));
    } else {
        for k in 0..m.rank() {
            header.push(format!("re{k}"));
            header.push(format!("im{k}"));
        }
        header.push("norm".into());
    }
    header.push("truncation_error".into());
    let mut r = Report { header, rows: Vec::new(), summary: Vec::new(), plot: None };
    for (j, v) in &orbit {
        let mut row: Vec<Cell> = vec![(*j).into()];
        for z in v.value.iter() {
            row.push(z.re.into());
            row.push(z.im.into());
        }
        row.push(v.norm().into());
        row.push(v.truncation_error.into());
        r.rows.push(row);
    }
    let (j, last) = orbit.last().expect("nonempty orbit");
    if m.is_scalar() {
        r.summary.push(format!(
            "tail value {} at J = {j} (|.| = {:.6e}, truncation error {:.1e})",
            complex_text(last.scalar()),
            last.norm(),
            last.truncation_error
        ));
    } else {
        let comps: Vec<String> = last.value.iter().map(|z| complex_text(*z)).collect();
        r.summary.push(format!("tail value [{}] at J = {j}", comps.join(", ")));
    }
    r.plot = PlotSpec::new(
        format!("|phi^(lambda alpha^J)| for the {} mask", m.name()),
        "J",
        "|phi^|",
        orbit.iter().map(|(j, v)| (*j as f64, v.norm())).collect(),
    )
    .ok();
    Ok(r)
}

fn bernoulli(f: &NumberField, jmax: i64, cutoff: i64) -> Result<Report, CliError> {
    if f.pv_status() != PvStatus::Pv {
        return Err(CliError::Usage(format!("--poly: dilation is {}", f.pv_status())));
    }
    if jmax < 2 {
        return Err(CliError::Usage("--jmax must be at least 2".into()));
    }
    let mut r = Report::new(&["J", "re", "im", "abs", "cutoff_error"]);
    let vals = (0..=jmax)
        .map(|j| bernoulli_phihat(f, j, cutoff).map(|v| (j, v)))
        .collect::<Result<Vec<_>, _>>()?;
    for (j, v) in &vals {
        r.rows.push(vec![(*j).into(), v.value.re.into(), v.value.im.into(), v.value.norm().into(), v.cutoff_error.into()]);
    }
    let series: Vec<(i64, f64)> = vals.iter().map(|(j, v)| (*j, v.value.norm())).collect();
    let (mean, slope, verdict) = classify_tail(&series, 1e-8);
    r.summary.push(format!("tail mean |phi^| = {mean:.6e}, tail slope {slope:.3e}, verdict {verdict}"));
    r.plot = PlotSpec::new(
        "Bernoulli convolution along alpha^J",
        "J",
        "|phi^(alpha^J)|",
        series.iter().map(|&(j, v)| (j as f64, v)).collect(),
    )
    .ok();
    Ok(r)
}

fn lattice_density(f: &NumberField, m: i64, eps: &[f64], ls: &[f64]) -> Result<Report, CliError> {
    let u = match eps {
        [e] => UNeighborhood::uniform(f, m, *e),
        _ => UNeighborhood::new(f, m, eps.to_vec()),
    }
    .map_err(|e| CliError::Usage(format!("--eps: {e}")))?;
    let mut r = Report::new(&["L", "count", "density", "gamma", "rel_error", "duplicates"]);
    let mut series = Vec::new();
    for &l in ls {
        let cyl = LatticeCylinder::new(f, l, u.clone())?;
        let y = enumerate_y(f, &cyl)?;
        let d = y.density(l);
        let rel = (d - cyl.gamma()).abs() / cyl.gamma();
        r.rows.push(vec![l.into(), y.points.len().into(), d.into(), cyl.gamma().into(), rel.into(), y.duplicates.into()]);
        r.summary.push(format!(
            "L = {l}: card Y = {}, card/(2L) = {d:.6}, gamma = {:.6}, relative error {rel:.3e}, duplicates {}",
            y.points.len(),
            cyl.gamma(),
            y.duplicates
        ));
        series.push((l.log10(), rel));
    }
    r.plot = PlotSpec::new("Relative density error", "log10 L", "relative error", series).ok();
    Ok(r)
}

fn zeros_scan(
    m: &RefinementMask,
    target: ScanTarget,
    l: f64,
    step: f64,
    delta: f64,
    tol: f64,
    points: Option<&Path>,
) -> Result<Report, CliError> {
    if l / step > 1e8 {
        return Err(CliError::Usage("--step: more than 1e8 grid points".into()));
    }
    let z = match target {
        ScanTarget::Symbol => scan_near_zeros(
            |y| {
                let s = m.eval_symbol(y);
                if m.is_scalar() { s.scalar().norm() } else { s.min_singular_value() }
            },
            l,
            step,
            delta,
        )?,
        ScanTarget::Phihat => {
            scan_near_zeros(|y| m.eval_phihat(y, tol).map(|v| v.norm()).unwrap_or(f64::NAN), l, step, delta)?
        }
    };
    if let Some(path) = points {
        let rows: Vec<Vec<Cell>> = z.points.iter().map(|&(y, v)| vec![y.into(), v.into()]).collect();
        emit_csv(&rows, &["y", "abs"], path)?;
    }
    let windows = density_windows(&z)?;
    let mut r = Report::new(&["t", "count", "density"]);
    for &(t, c, d) in &windows {
        r.rows.push(vec![t.into(), c.into(), d.into()]);
    }
    let (lo, hi) = windows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), w| (lo.min(w.2), hi.max(w.2)));
    r.summary.push(format!(
        "{} near-zeros below {delta:e} on [0, {l}]; density between {lo:.6} and {hi:.6}",
        z.len()
    ));
    r.plot = PlotSpec::new(
        "Near-zero density",
        "t",
        "count / t",
        windows.iter().map(|w| (w.0, w.2)).collect(),
    )
    .ok();
    Ok(r)
}

fn probe(m: &RefinementMask, lams: &[FieldElement], jmax: i64, tol: f64, delta: f64) -> Result<Report, CliError> {
    let reports = vanishing_probe(m, lams, jmax, tol, delta)?;
    let mut r = Report::new(&["lambda", "J", "abs_phihat", "verdict"]);
    for p in &reports {
        for &(j, v) in &p.values {
            r.rows.push(vec![p.lambda.to_string().into(), j.into(), v.into(), p.verdict.to_string().into()]);
        }
        r.summary.push(format!(
            "lambda = {}: {} (tail mean {:.6e}, tail slope {:.3e})",
            p.lambda, p.verdict, p.tail_mean, p.tail_slope
        ));
    }
    if let Some(first) = reports.first() {
        r.plot = PlotSpec::new(
            format!("Vanishing probe, {} mask", m.name()),
            "J",
            "|phi^(lambda alpha^J)|",
            first.values.iter().map(|&(j, v)| (j as f64, v)).collect(),
        )
        .ok();
    }
    Ok(r)
}

fn norms_count(f: &NumberField, l: u64, box_size: Option<i64>) -> Result<Report, CliError> {
    let form = norm_form(f)?;
    let c = count_norm_values(&form, l, box_size)?;
    let mut r = Report::new(&["L", "count", "ratio"]);
    let mut series = Vec::new();
    for &(t, n) in &c.checkpoints {
        let ratio = if t > 1 { n as f64 / (t as f64 / (t as f64).ln()) } else { f64::NAN };
        r.rows.push(vec![t.into(), n.into(), ratio.into()]);
        series.push(((t as f64).ln(), (n.max(1) as f64).ln()));
    }
    r.summary.push(format!("norm form {form}"));
    r.summary.push(format!(
        "{} distinct values in [1, {l}] over box {}; fitted exponent {:.4}",
        c.count, c.box_size, c.exponent
    ));
    r.plot = PlotSpec::new("Distinct norm values", "ln L", "ln count", series).ok();
    Ok(r)
}

fn equidistribution(
    f: &NumberField,
    n: usize,
    samples: usize,
    range: (f64, f64),
    seed: u64,
) -> Result<Report, CliError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ys: Vec<f64> = (0..samples).map(|_| rng.random_range(range.0..range.1)).collect();
    let mut r = Report::new(&["n", "samples", "discrepancy"]);
    let mut series = Vec::new();
    for k in 1..=n {
        let d = equidistribution_check(f, &ys, k).map_err(|e| match e {
            pisot_core::Error::InvalidInput(m) => CliError::Usage(format!("--n: {m}")),
            other => other.into(),
        })?;
        r.rows.push(vec![k.into(), samples.into(), d.into()]);
        r.summary.push(format!("n = {k}: discrepancy {d:.6e} over {samples} samples"));
        series.push((k as f64, d));
    }
    r.plot = PlotSpec::new("Star discrepancy", "n", "discrepancy", series).ok();
    Ok(r)
}
