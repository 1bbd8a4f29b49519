use std::path::Path;

use cqrate_core::codes::{average_fidelity, decoupling_cmi, load_code, DecouplingReport, FidelityReport};
use cqrate_core::idelta::{
    estimate_i0_tilde, idelta_curve, optimize_i0_minus, ChannelParamDoc, CurvePoint, OptimizerOptions, I0_TILDE_GRID,
};
use cqrate_core::region::{
    alpha, dw_point, generic_region, hausdorff_distance, inner_bound_region, markov_interpolation, merging_point,
    outer_bound_region, qsr_point_from_value, BoundingBox, MarkovOptions, MarkovResult, Mode, RatePoint, RegionDoc,
};
use cqrate_core::source::{
    delta_prime, entropic_profile, genericity_report, load_source, CqSource, EntropicProfile, GenericityReport,
};
use cqrate_core::suites::{run_all, run_suite, SuiteReport};
use serde::{Deserialize, Serialize};

use crate::output::{emit, to_csv, to_json, CliError, Provenance};
use crate::{AnalyzeArgs, Format, IdeltaArgs, OptimizerArgs, OutputArgs, RegionArgs, SelftestArgs, VerifyArgs};

const DEFAULT_DELTA_GRID: [f64; 7] = [0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0];

fn source(path: &Path) -> Result<CqSource, CliError> {
    if !path.exists() {
        return Err(CliError::Input(format!("source file {} not found", path.display())));
    }
    Ok(load_source(path)?)
}

fn optimizer(args: &OptimizerArgs) -> Result<OptimizerOptions, CliError> {
    let mut opts = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => OptimizerOptions::default(),
    };
    opts.seed = args.seed;
    if let Some(r) = args.restarts {
        if r == 0 {
            return Err(CliError::Input("--restarts must be positive".into()));
        }
        opts.restarts = r;
    }
    if let Some(w) = args.wdim {
        if w == 0 {
            return Err(CliError::Input("--wdim must be positive".into()));
        }
        opts.w_dim = Some(w);
    }
    Ok(opts)
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn write(out: &OutputArgs, json: &impl Serialize, csv: impl FnOnce() -> String) -> Result<(), CliError> {
    let text = match out.format() {
        Format::Json => to_json(json)?,
        Format::Csv => csv(),
    };
    emit(out.out.as_deref(), &text)
}

#[derive(Serialize)]
struct CollapseInfo {
    witness: usize,
    p_witness: f64,
    lambda0: f64,
    /// `δ′` at a few `δ`.
    delta_prime: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct AnalyzeDoc {
    provenance: Provenance,
    source: Option<String>,
    alphabet: usize,
    b_dim: usize,
    r_dim: usize,
    profile: EntropicProfile,
    genericity: GenericityReport,
    dw_point: RatePoint,
    merging_point: RatePoint,
    #[serde(skip_serializing_if = "Option::is_none")]
    collapse: Option<CollapseInfo>,
}

pub fn analyze(args: &AnalyzeArgs) -> Result<bool, CliError> {
    let src = source(&args.source)?;
    let profile = entropic_profile(&src);
    let genericity = genericity_report(&src);
    let collapse = if genericity.is_generic {
        let delta_prime = [0.001, 0.01, 0.1]
            .iter()
            .map(|&d| Ok((d, delta_prime(&src, d)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Some(CollapseInfo {
            witness: genericity.witness,
            p_witness: src.probs()[genericity.witness],
            lambda0: genericity.lambda0,
            delta_prime,
        })
    } else {
        None
    };
    let doc = AnalyzeDoc {
        provenance: Provenance::new("analyze", 0, None),
        source: src.name().map(str::to_string),
        alphabet: src.alphabet(),
        b_dim: src.b_dim(),
        r_dim: src.r_dim(),
        profile,
        dw_point: dw_point(&profile),
        merging_point: merging_point(&profile),
        genericity,
        collapse,
    };
    write(&args.output, &doc, || {
        let p = &doc.profile;
        let dw = doc.dw_point;
        let m = doc.merging_point;
        let rows = [
            ("S(B)", p.s_b),
            ("S(B|X)", p.s_b_given_x),
            ("S(XB)", p.s_xb),
            ("S(X)", p.s_x),
            ("S(X|B)", p.s_x_given_b),
            ("I(X:B)", p.i_x_b),
            ("lambda0", doc.genericity.lambda0),
            ("generic", f64::from(u8::from(doc.genericity.is_generic))),
            ("dw_rX", dw.r_x),
            ("dw_rB", dw.r_b),
            ("merging_rX", m.r_x),
            ("merging_rB", m.r_b),
            ("merging_E", m.ebit_rate.unwrap_or(0.0)),
        ];
        to_csv(&["quantity", "value"], rows.iter().map(|(k, v)| vec![k.to_string(), fmt(*v)]))
    })?;
    Ok(true)
}

/// Fields read back from an `idelta` output document.
#[derive(Deserialize)]
struct IdeltaInput {
    i0: f64,
    i0_tilde: f64,
    #[serde(default)]
    i0_minus: Option<f64>,
}

#[derive(Serialize)]
struct RegionPoints {
    dw: RatePoint,
    merging: RatePoint,
    qsr: RatePoint,
}

#[derive(Serialize)]
struct Regions {
    #[serde(skip_serializing_if = "Option::is_none")]
    generic: Option<RegionDoc>,
    inner: RegionDoc,
    outer: RegionDoc,
}

#[derive(Serialize)]
struct RegionOut {
    provenance: Provenance,
    source: Option<String>,
    mode: Mode,
    profile: EntropicProfile,
    is_generic: bool,
    i0: f64,
    i0_tilde: f64,
    /// `I₀` used for the inner bound: `I₀` when assisted, `I₀⁻` when not.
    i0_inner: f64,
    alpha: f64,
    points: RegionPoints,
    regions: Regions,
    /// Hausdorff distance between the inner and outer bounds in the plotting box.
    hausdorff_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    markov: Option<MarkovResult>,
}

pub fn region(args: &RegionArgs) -> Result<bool, CliError> {
    let src = source(&args.source)?;
    let opts = optimizer(&args.optimizer)?;
    let mode: Mode = args.mode.into();
    let profile = entropic_profile(&src);
    let is_generic = genericity_report(&src).is_generic;

    let (i0, i0_tilde, i0_minus) = match &args.idelta {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let doc: IdeltaInput =
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            (doc.i0, doc.i0_tilde, doc.i0_minus)
        }
        None => {
            let est = estimate_i0_tilde(&src, &opts)?;
            (est.i0, est.i0_tilde, None)
        }
    };
    let i0_inner = match mode {
        Mode::Assisted => i0,
        Mode::Unassisted => match i0_minus {
            Some(v) => v,
            None => optimize_i0_minus(&src, &opts)?.value,
        },
    };
    // optimizer noise can push the values a hair past I(X:B)
    let clamp = |v: f64| v.clamp(0.0, profile.i_x_b);
    let (i0_inner, i0_tilde) = (clamp(i0_inner), clamp(i0_tilde.max(i0_inner)));

    let inner = inner_bound_region(&profile, i0_inner)?;
    let outer = outer_bound_region(&profile, i0_tilde, mode)?;
    let generic = if is_generic { Some(generic_region(&profile, true)?) } else { None };
    let mut all = vec![&inner, &outer];
    all.extend(generic.as_ref());
    let bbox = BoundingBox::around(&all);
    let gap = hausdorff_distance(&inner, &outer, &bbox);

    let markov = if args.markov {
        let mopts = MarkovOptions { seed: opts.seed, optimizer: opts.clone(), ..MarkovOptions::default() };
        Some(markov_interpolation(&src, src.alphabet(), &mopts)?)
    } else {
        None
    };

    let doc = RegionOut {
        provenance: Provenance::new("region", opts.seed, Some(opts.clone())),
        source: src.name().map(str::to_string),
        mode,
        profile,
        is_generic,
        i0,
        i0_tilde,
        i0_inner,
        alpha: alpha(&profile, i0_inner),
        points: RegionPoints {
            dw: dw_point(&profile),
            merging: merging_point(&profile),
            qsr: qsr_point_from_value(&profile, i0_inner),
        },
        regions: Regions {
            generic: generic.as_ref().map(|g| RegionDoc::new(g, &bbox)),
            inner: RegionDoc::new(&inner, &bbox),
            outer: RegionDoc::new(&outer, &bbox),
        },
        hausdorff_gap: gap,
        markov,
    };
    write(&args.output, &doc, || {
        let r = &doc.regions;
        let docs = r.generic.iter().chain([&r.inner, &r.outer]);
        let rows = docs.flat_map(|d| {
            d.boundary_samples.iter().map(move |p| vec![fmt(p.r_x), fmt(p.r_b), d.kind.as_str().to_string()])
        });
        to_csv(&["rX", "rB", "region_kind"], rows)
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct ParamEntry {
    delta: f64,
    value: f64,
    constraint: f64,
    ebit_rate: f64,
    param: ChannelParamDoc,
}

#[derive(Serialize)]
struct IdeltaOut {
    provenance: Provenance,
    source: Option<String>,
    points: Vec<CurvePoint>,
    monotonized: bool,
    concavity_failures: Vec<f64>,
    i0: f64,
    i0_tilde: f64,
    i0_gap: f64,
    i0_minus: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<Vec<ParamEntry>>,
}

pub fn idelta(args: &IdeltaArgs) -> Result<bool, CliError> {
    let src = source(&args.source)?;
    let opts = optimizer(&args.optimizer)?;
    let grid: Vec<f64> = args.delta_grid.clone().unwrap_or_else(|| DEFAULT_DELTA_GRID.to_vec());
    if grid.is_empty() {
        return Err(CliError::Input("--delta-grid is empty".into()));
    }
    if grid.iter().any(|d| !d.is_finite() || *d < 0.0) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Input("--delta-grid must be nonnegative and strictly ascending".into()));
    }
    // evaluate on the union with the I₀ grid so Ĩ₀ comes from the same run
    let mut full = grid.clone();
    full.extend(I0_TILDE_GRID);
    full.sort_by(f64::total_cmp);
    full.dedup();
    let curve = idelta_curve(&src, &full, &opts)?;
    let at = |d: f64| curve.points.iter().position(|p| p.delta == d).expect("grid point");
    let i0 = curve.points[at(0.0)].raw;
    let i0_tilde = curve.points[at(I0_TILDE_GRID[1])].lower_bound;
    let i0_minus = optimize_i0_minus(&src, &opts)?.value;

    let keep: Vec<usize> = grid.iter().map(|&d| at(d)).collect();
    let params = args.params.then(|| {
        keep.iter()
            .map(|&i| {
                let r = &curve.results[i];
                ParamEntry {
                    delta: r.delta,
                    value: r.value,
                    constraint: r.constraint,
                    ebit_rate: r.ebit_rate,
                    param: ChannelParamDoc::from(&r.param),
                }
            })
            .collect()
    });
    let doc = IdeltaOut {
        provenance: Provenance::new("idelta", opts.seed, Some(opts.clone())),
        source: src.name().map(str::to_string),
        points: keep.iter().map(|&i| curve.points[i].clone()).collect(),
        monotonized: curve.monotonized,
        concavity_failures: curve.concavity_failures.iter().map(|&i| curve.points[i].delta).collect(),
        i0,
        i0_tilde,
        i0_gap: i0_tilde - i0,
        i0_minus,
        params,
    };
    write(&args.output, &doc, || {
        to_csv(
            &["delta", "raw", "lower_bound"],
            doc.points.iter().map(|p| vec![fmt(p.delta), fmt(p.raw), fmt(p.lower_bound)]),
        )
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct VerifyOut {
    provenance: Provenance,
    source: Option<String>,
    mode: Mode,
    block_length: usize,
    k: usize,
    l: usize,
    fidelity: FidelityReport,
    decoupling: DecouplingReport,
    pass: bool,
}

pub fn verify_code(args: &VerifyArgs) -> Result<bool, CliError> {
    let src = source(&args.source)?;
    if !args.code.exists() {
        return Err(CliError::Input(format!("code file {} not found", args.code.display())));
    }
    let code = load_code(&args.code)?.build(&src, args.mode.into())?;
    let fidelity = average_fidelity(&src, &code)?;
    let decoupling = decoupling_cmi(&src, &code)?;
    let pass = decoupling.pass;
    let doc = VerifyOut {
        provenance: Provenance::new("verify-code", 0, None),
        source: src.name().map(str::to_string),
        mode: code.mode(),
        block_length: code.block_length(),
        k: code.k(),
        l: code.l(),
        fidelity,
        decoupling,
        pass,
    };
    write(&args.output, &doc, || {
        let d = &doc.decoupling;
        to_csv(
            &["n", "avg_fidelity", "epsilon", "cmi", "bound", "pass"],
            [vec![
                doc.block_length.to_string(),
                fmt(doc.fidelity.avg_fidelity),
                fmt(doc.fidelity.epsilon),
                fmt(d.cmi),
                fmt(d.bound),
                d.pass.to_string(),
            ]],
        )
    })?;
    Ok(pass)
}

#[derive(Serialize)]
struct SelftestOut {
    provenance: Provenance,
    suites: Vec<SuiteReport>,
    pass: bool,
}

pub fn selftest(args: &SelftestArgs) -> Result<bool, CliError> {
    let suites = match &args.suite {
        Some(name) => vec![run_suite(name, args.seed)?],
        None => run_all(args.seed)?,
    };
    let pass = suites.iter().all(|s| s.pass);
    let text = match args.output.format {
        None => {
            let mut text = String::new();
            for s in &suites {
                text.push_str(&format!(
                    "{:<10} {} cases={} violations={} worst_slack={:e}\n",
                    s.name,
                    if s.pass { "PASS" } else { "FAIL" },
                    s.cases,
                    s.violations,
                    s.worst_slack
                ));
                for note in &s.notes {
                    text.push_str(&format!("           note: {note}\n"));
                }
            }
            let failed = suites.iter().filter(|s| !s.pass).count();
            text.push_str(&format!("seed {}: {} suites, {} failed\n", args.seed, suites.len(), failed));
            text
        }
        Some(Format::Json) => to_json(&SelftestOut { provenance: Provenance::new("selftest", args.seed, None), suites, pass })?,
        Some(Format::Csv) => to_csv(
            &["suite", "cases", "violations", "worst_slack", "pass"],
            suites.iter().map(|s| {
                vec![s.name.clone(), s.cases.to_string(), s.violations.to_string(), fmt(s.worst_slack), s.pass.to_string()]
            }),
        ),
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(pass)
}
