//! Command-line driver: configuration ingestion, experiment orchestration,
//! and report emission.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 mathematical failure
//! (singularity or failed hypothesis). Artifacts are CSV (comma-separated,
//! header row, UTF-8, LF, 17-significant-digit decimals) and JSON with a
//! stable field order, so identical config and seed produce byte-identical
//! output.

use std::path::{Path, PathBuf};

use clap::{Args as ClapArgs, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, SpaceConfig};
use crate::dyadic::DyadicFilterBank;
use crate::error::Error;
use crate::grid::{Grid, GridFunction};
use crate::solver;
use crate::spaces::{self, MaximalConfig};
use crate::symbols::{
    self, companion_symbols, invert_symbol, pencil_symbol, MihlinCertificate, MihlinFlavor,
    MihlinOptions, SymbolDomain,
};

#[derive(Parser)]
#[command(name = "maxreg", version, about = "Spectral maximal-regularity toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the integro-differential equation for the configured forcing.
    Solve(CommonOpts),
    /// Certify multiplier hypotheses (Mihlin constants, kernels, envelopes).
    Certify(CommonOpts),
    /// Sweep maximal-regularity ratios across spaces and a bank.
    Regularity(CommonOpts),
    /// Build a Muckenhoupt weight and verify its constants.
    Weights(CommonOpts),
}

#[derive(ClapArgs)]
struct CommonOpts {
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bank seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size override.
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    /// Grid half-length override.
    #[arg(long = "grid-t")]
    grid_t: Option<f64>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn math(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidArgument(_)
            | Error::NotSupported(_)
            | Error::DimensionMismatch(_)
            | Error::GridMismatch(_) => 2,
            _ => 3,
        };
        let message = match &e {
            Error::NonInvertiblePencil { nodes } => {
                format!("{e}\noffending frequency nodes: {nodes:?}")
            }
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: format!("i/o error: {e}") }
    }
}

/// Entry point of the `maxreg` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(opts) => with_config(opts, cmd_solve),
        Command::Certify(opts) => with_config(opts, cmd_certify),
        Command::Regularity(opts) => with_config(opts, cmd_regularity),
        Command::Weights(opts) => with_config(opts, cmd_weights),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    grid: Grid,
    out_dir: PathBuf,
    config_sha256: String,
    seed_override: Option<u64>,
}

fn with_config(
    opts: &CommonOpts,
    f: impl FnOnce(&Context) -> Result<(), Failure>,
) -> Result<(), Failure> {
    let raw = std::fs::read(&opts.config)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", opts.config.display())))?;
    let text = String::from_utf8(raw.clone())
        .map_err(|_| Failure::config("config file is not UTF-8".to_string()))?;
    let config = ExperimentConfig::parse_str(&text).map_err(|e| {
        Failure::config(format!(
            "config parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let grid = config.build_grid(opts.grid_n, opts.grid_t)?;
    let out_dir = opts
        .out
        .clone()
        .or_else(|| {
            config
                .output
                .as_ref()
                .and_then(|o| o.dir.as_ref())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    let digest = Sha256::digest(&raw);
    let config_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect::<String>();
    let ctx = Context {
        config: &config,
        grid,
        out_dir,
        config_sha256,
        seed_override: opts.seed,
    };
    f(&ctx)
}

#[derive(Serialize)]
struct GridMeta {
    t: f64,
    n: usize,
    h: f64,
}

#[derive(Serialize)]
struct KappaMeta {
    kappa: f64,
    kappa_dual: f64,
}

#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    config_sha256: String,
    grid: GridMeta,
    seed: Option<u64>,
    kappa: Option<KappaMeta>,
}

impl Context<'_> {
    fn meta(&self, seed: Option<u64>, kappa: Option<KappaMeta>) -> Meta {
        Meta {
            tool: "maxreg",
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: self.config_sha256.clone(),
            grid: GridMeta {
                t: self.grid.half_length(),
                n: self.grid.len(),
                h: self.grid.spacing(),
            },
            seed,
            kappa,
        }
    }

    fn effective_seed(&self) -> Option<u64> {
        self.seed_override
            .or_else(|| self.config.bank.as_ref().and_then(|b| b.seed()))
    }
}

/// 17 significant digits, the CSV number format.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(
    path: &Path,
    header: &[String],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), Failure> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::config(format!("serialization error: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn grid_function_csv(f: &GridFunction, prefix: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["t".to_string()];
    for c in 0..f.dim() {
        header.push(format!("{prefix}{c}_re"));
        header.push(format!("{prefix}{c}_im"));
    }
    let grid = f.grid();
    let rows = (0..grid.len())
        .map(|j| {
            let mut row = vec![fmt(grid.time(j))];
            for c in 0..f.dim() {
                let z = f.samples()[(j, c)];
                row.push(fmt(z.re));
                row.push(fmt(z.im));
            }
            row
        })
        .collect();
    (header, rows)
}

// ----- solve ---------------------------------------------------------------

#[derive(Serialize)]
struct ResidualSummary {
    sup: f64,
    l2: f64,
    sup_rel: f64,
}

#[derive(Serialize)]
struct ConditionSummary {
    max: f64,
    argmax_tau: f64,
    zero_node_averaged: bool,
}

#[derive(Serialize)]
struct ComponentNorms {
    second_order: f64,
    first_order: f64,
    zeroth: f64,
    convolution: f64,
}

#[derive(Serialize)]
struct StrongSummary {
    residual_sup_rel: f64,
    first_order_agreement: f64,
    second_order_agreement: f64,
}

#[derive(Serialize)]
struct SolveSummary {
    meta: Meta,
    u_l2: f64,
    residual: ResidualSummary,
    condition: ConditionSummary,
    component_l2: ComponentNorms,
    strong: StrongSummary,
}

fn cmd_solve(ctx: &Context) -> Result<(), Failure> {
    let pencil_cfg = ctx
        .config
        .pencil
        .as_ref()
        .ok_or_else(|| Failure::config("solve needs a pencil section"))?;
    let pencil = pencil_cfg.build()?;
    let forcing_cfg = ctx
        .config
        .forcing
        .as_ref()
        .ok_or_else(|| Failure::config("solve needs a forcing section"))?;
    let f = forcing_cfg.build(ctx.grid, pencil.dim())?;

    let result = solver::solve(&pencil, &f)?;
    let strong = solver::strong_solution_check(&result, &pencil)?;

    let (header, rows) = grid_function_csv(&result.u, "u");
    write_csv(&ctx.out_dir.join("u.csv"), &header, rows.into_iter())?;

    // one wide table with all four components
    let comps = result.components.named();
    let grid = ctx.grid;
    let mut header = vec!["t".to_string()];
    for (name, g) in comps.iter() {
        for c in 0..g.dim() {
            header.push(format!("{name}_{c}_re"));
            header.push(format!("{name}_{c}_im"));
        }
    }
    let rows = (0..grid.len()).map(|j| {
        let mut row = vec![fmt(grid.time(j))];
        for (_, g) in comps.iter() {
            for c in 0..g.dim() {
                let z = g.samples()[(j, c)];
                row.push(fmt(z.re));
                row.push(fmt(z.im));
            }
        }
        row
    });
    write_csv(&ctx.out_dir.join("components.csv"), &header, rows)?;

    let sup = result.residual.max_abs();
    let scale = f.max_abs();
    let summary = SolveSummary {
        meta: ctx.meta(ctx.effective_seed(), None),
        u_l2: crate::grid::l2_norm(&result.u),
        residual: ResidualSummary {
            sup,
            l2: crate::grid::l2_norm(&result.residual),
            sup_rel: if scale == 0.0 { sup } else { sup / scale },
        },
        condition: ConditionSummary {
            max: result.condition.max,
            argmax_tau: result.condition.argmax_tau,
            zero_node_averaged: result.condition.zero_node_averaged,
        },
        component_l2: ComponentNorms {
            second_order: crate::grid::l2_norm(&result.components.second_order),
            first_order: crate::grid::l2_norm(&result.components.first_order),
            zeroth: crate::grid::l2_norm(&result.components.zeroth),
            convolution: crate::grid::l2_norm(&result.components.convolution),
        },
        strong: StrongSummary {
            residual_sup_rel: strong.residual_sup_rel,
            first_order_agreement: strong.first_order_agreement,
            second_order_agreement: strong.second_order_agreement,
        },
    };
    write_json(&ctx.out_dir.join("summary.json"), &summary)
}

// ----- certify -------------------------------------------------------------

#[derive(Serialize)]
struct CertEntry {
    ok: bool,
    constant: Option<f64>,
    per_order: Option<Vec<f64>>,
    continuity_at_zero: Option<bool>,
    zero_gap: Option<f64>,
    fd_fallback: Option<bool>,
    error: Option<String>,
}

impl CertEntry {
    fn from(result: crate::error::Result<MihlinCertificate>) -> Self {
        match result {
            Ok(cert) => CertEntry {
                ok: true,
                constant: Some(cert.constant),
                per_order: Some(cert.per_order),
                continuity_at_zero: cert.continuity_at_zero,
                zero_gap: Some(cert.zero_gap),
                fd_fallback: Some(cert.fd_fallback),
                error: None,
            },
            Err(e) => CertEntry {
                ok: false,
                constant: None,
                per_order: None,
                continuity_at_zero: None,
                zero_gap: None,
                fd_fallback: None,
                error: Some(e.to_string()),
            },
        }
    }

    fn passes_with_continuity(&self) -> bool {
        self.ok && self.continuity_at_zero != Some(false)
    }
}

#[derive(Serialize)]
struct KernelSection {
    cz_constant: Option<f64>,
    near_zero_sup: Option<f64>,
    excluded_radius: Option<f64>,
    mihlin_order3: Option<f64>,
    cz_to_mihlin_ratio: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct EnvelopeSection {
    per_level: Option<Vec<f64>>,
    constant: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Hypotheses {
    whole_line_invertible: bool,
    chat_inhomogeneous_order2: bool,
    chat_homogeneous_order3: bool,
    solution_symbols_inhomogeneous_order2: bool,
    solution_symbols_homogeneous_order3: bool,
    path_smooth_convolution: bool,
    path_singular_convolution: bool,
}

#[derive(Serialize)]
struct CertifySummary {
    meta: Meta,
    zero_node_averaged: bool,
    symbols: std::collections::BTreeMap<String, CertEntry>,
    kernel: KernelSection,
    envelope: EnvelopeSection,
    hypotheses: Hypotheses,
}

fn cmd_certify(ctx: &Context) -> Result<(), Failure> {
    let pencil_cfg = ctx
        .config
        .pencil
        .as_ref()
        .ok_or_else(|| Failure::config("certify needs a pencil section"))?;
    let pencil = pencil_cfg.build()?;
    let b = pencil_symbol(&pencil);
    let a = invert_symbol(&b, SymbolDomain::PuncturedLine);
    let comps = companion_symbols(&pencil, &a);
    let chat = pencil.convolution().symbol();
    let opts = MihlinOptions::default().with_grid_nodes(ctx.grid);

    let whole_line = solver::pencil_node_data(&pencil, ctx.grid);
    let (whole_line_ok, whole_line_err, zero_node_averaged) = match &whole_line {
        Ok(data) => (true, None, data.zero_node_averaged),
        Err(e) => (false, Some(e.clone()), false),
    };

    let mut certs = std::collections::BTreeMap::new();
    let a_m2t = CertEntry::from(symbols::mihlin_constant(
        &a,
        2,
        MihlinFlavor::Inhomogeneous,
        &opts,
    ));
    let a0_m2t = CertEntry::from(symbols::mihlin_constant(
        &comps.a0,
        2,
        MihlinFlavor::Inhomogeneous,
        &opts,
    ));
    let a1_m2t = CertEntry::from(symbols::mihlin_constant(
        &comps.a1,
        2,
        MihlinFlavor::Inhomogeneous,
        &opts,
    ));
    let d_m2t = CertEntry::from(symbols::mihlin_constant(
        &comps.d,
        2,
        MihlinFlavor::Inhomogeneous,
        &opts,
    ));
    let chat_a_m2t = CertEntry::from(symbols::mihlin_constant(
        &comps.chat_a,
        2,
        MihlinFlavor::Inhomogeneous,
        &opts,
    ));
    let chat_m2t =
        CertEntry::from(symbols::mihlin_constant(&chat, 2, MihlinFlavor::Inhomogeneous, &opts));
    let chat_m3 =
        CertEntry::from(symbols::mihlin_constant(&chat, 3, MihlinFlavor::Homogeneous, &opts));
    let a_m3 =
        CertEntry::from(symbols::mihlin_constant(&a, 3, MihlinFlavor::Homogeneous, &opts));
    let a0_m3 =
        CertEntry::from(symbols::mihlin_constant(&comps.a0, 3, MihlinFlavor::Homogeneous, &opts));
    let a1_m3 =
        CertEntry::from(symbols::mihlin_constant(&comps.a1, 3, MihlinFlavor::Homogeneous, &opts));

    let hypotheses = Hypotheses {
        whole_line_invertible: whole_line_ok,
        chat_inhomogeneous_order2: chat_m2t.passes_with_continuity(),
        chat_homogeneous_order3: chat_m3.ok,
        solution_symbols_inhomogeneous_order2: a_m2t.ok && a0_m2t.ok && a1_m2t.ok,
        solution_symbols_homogeneous_order3: a_m3.ok && a0_m3.ok && a1_m3.ok,
        path_smooth_convolution: whole_line_ok
            && chat_m2t.passes_with_continuity()
            && a_m2t.ok
            && a0_m2t.ok
            && a1_m2t.ok,
        path_singular_convolution: chat_m3.ok && a_m3.ok && a0_m3.ok && a1_m3.ok,
    };

    // kernel of the solution symbol (oversampled to tame spectral truncation)
    let kernel = match symbols::kernel_from_symbol_refined(&a, ctx.grid, 8) {
        Ok((k, kp)) => match symbols::cz_constant(&k, &kp) {
            Ok(report) => {
                let m3 = a_m3.constant;
                KernelSection {
                    cz_constant: Some(report.constant),
                    near_zero_sup: Some(report.near_zero_sup),
                    excluded_radius: Some(report.excluded_radius),
                    mihlin_order3: m3,
                    cz_to_mihlin_ratio: m3
                        .filter(|m| *m > 0.0)
                        .map(|m| report.constant / m),
                    error: None,
                }
            }
            Err(e) => KernelSection {
                cz_constant: None,
                near_zero_sup: None,
                excluded_radius: None,
                mihlin_order3: None,
                cz_to_mihlin_ratio: None,
                error: Some(e.to_string()),
            },
        },
        Err(e) => KernelSection {
            cz_constant: None,
            near_zero_sup: None,
            excluded_radius: None,
            mihlin_order3: None,
            cz_to_mihlin_ratio: None,
            error: Some(e.to_string()),
        },
    };

    let envelope = match DyadicFilterBank::for_grid(ctx.grid)
        .and_then(|bank| symbols::dyadic_envelope_check(&a, &bank))
    {
        Ok(report) => EnvelopeSection {
            per_level: Some(report.per_level),
            constant: Some(report.constant),
            error: None,
        },
        Err(e) => EnvelopeSection { per_level: None, constant: None, error: Some(e.to_string()) },
    };

    certs.insert("a".to_string(), a_m2t);
    certs.insert("a0".to_string(), a0_m2t);
    certs.insert("a1".to_string(), a1_m2t);
    certs.insert("d".to_string(), d_m2t);
    certs.insert("chat_a".to_string(), chat_a_m2t);
    certs.insert("chat_inhomogeneous_order2".to_string(), chat_m2t);
    certs.insert("chat_homogeneous_order3".to_string(), chat_m3);
    certs.insert("a_homogeneous_order3".to_string(), a_m3);
    certs.insert("a0_homogeneous_order3".to_string(), a0_m3);
    certs.insert("a1_homogeneous_order3".to_string(), a1_m3);

    let pass = hypotheses.path_smooth_convolution || hypotheses.path_singular_convolution;
    let summary = CertifySummary {
        meta: ctx.meta(ctx.effective_seed(), None),
        zero_node_averaged,
        symbols: certs,
        kernel,
        envelope,
        hypotheses,
    };
    write_json(&ctx.out_dir.join("certificates.json"), &summary)?;

    if !pass {
        let mut message = "no hypothesis path passes".to_string();
        if let Some(e) = whole_line_err {
            message = format!("{message}: {}", Failure::from(e).message);
        }
        return Err(Failure::math(message));
    }
    Ok(())
}

// ----- regularity ----------------------------------------------------------

#[derive(Serialize)]
struct RegularityConstant {
    space: String,
    component: String,
    empirical_constant: f64,
    analytic_bound: Option<f64>,
    dominated: Option<bool>,
}

#[derive(Serialize)]
struct RegularitySummary {
    meta: Meta,
    constants: Vec<RegularityConstant>,
}

fn cmd_regularity(ctx: &Context) -> Result<(), Failure> {
    let pencil_cfg = ctx
        .config
        .pencil
        .as_ref()
        .ok_or_else(|| Failure::config("regularity needs a pencil section"))?;
    let pencil = pencil_cfg.build()?;
    if ctx.config.spaces.is_empty() {
        return Err(Failure::config("regularity needs at least one space"));
    }
    let spaces_list = ctx
        .config
        .spaces
        .iter()
        .map(|s| s.to_enriched(ctx.grid))
        .collect::<crate::error::Result<Vec<_>>>()?;
    let bank_cfg = ctx
        .config
        .bank
        .as_ref()
        .ok_or_else(|| Failure::config("regularity needs a bank section"))?;
    let elems = bank_cfg.build(ctx.grid, pencil.dim(), ctx.seed_override);
    if elems.is_empty() {
        return Err(Failure::config("regularity bank is empty"));
    }
    let filter_bank = DyadicFilterBank::for_grid(ctx.grid)?;
    let reports = solver::regularity_sweep(&pencil, &spaces_list, &elems, &filter_bank)?;

    let header = vec![
        "space".to_string(),
        "component".to_string(),
        "bank_index".to_string(),
        "ratio".to_string(),
    ];
    let mut rows = Vec::new();
    let mut constants = Vec::new();
    for (si, report) in reports.iter().enumerate() {
        for stat in &report.components {
            for (i, r) in stat.ratios.iter().enumerate() {
                rows.push(vec![
                    report.space.clone(),
                    stat.component.to_string(),
                    i.to_string(),
                    fmt(*r),
                ]);
            }
            constants.push(RegularityConstant {
                space: report.space.clone(),
                component: stat.component.to_string(),
                empirical_constant: stat.empirical_constant,
                analytic_bound: stat.analytic_bound,
                dominated: stat.dominated,
            });
            // plot-ready per (space, component) series
            let plot_header = vec!["bank_index".to_string(), "ratio".to_string()];
            let plot_rows = stat
                .ratios
                .iter()
                .enumerate()
                .map(|(i, r)| vec![i.to_string(), fmt(*r)]);
            write_csv(
                &ctx.out_dir
                    .join(format!("plot_space{si}_{}.csv", stat.component)),
                &plot_header,
                plot_rows,
            )?;
        }
    }
    write_csv(&ctx.out_dir.join("ratios.csv"), &header, rows.into_iter())?;
    let summary = RegularitySummary {
        meta: ctx.meta(ctx.effective_seed(), None),
        constants,
    };
    write_json(&ctx.out_dir.join("constants.json"), &summary)
}

// ----- weights ---------------------------------------------------------------

#[derive(Serialize)]
struct A1Summary {
    passes: bool,
    max_ratio: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct WeightsSummary {
    meta: Meta,
    p: f64,
    depth: usize,
    ap_constant: f64,
    /// `2^p kappa^(p-1) kappa'`.
    factorization_bound: f64,
    /// Bound with the discretization margin `1.1`.
    bound_with_margin: f64,
    within_bound: bool,
    a1_check: A1Summary,
    weight_min: f64,
    weight_max: f64,
}

fn cmd_weights(ctx: &Context) -> Result<(), Failure> {
    let wc = ctx
        .config
        .weights
        .as_ref()
        .ok_or_else(|| Failure::config("weights needs a weights section"))?;
    let space = match &wc.phi {
        SpaceConfig::Lorentz { .. } => {
            return Err(Failure::config(
                "Lorentz descriptors cannot seed the weight factory (no maximal bound)",
            ))
        }
        other => other.to_base(ctx.grid)?,
    };
    let g = wc.g.build(ctx.grid, 1)?;
    let h = wc.h.build(ctx.grid, 1)?;
    let cfg = MaximalConfig::dyadic(ctx.grid);
    let kappa = match wc.kappa_override {
        Some(k) => k,
        None => spaces::maximal_norm_bound(&space)?,
    };
    let kappa_dual = match wc.kappa_dual_override {
        Some(k) => k,
        None => spaces::maximal_norm_bound(&space.dual()?)?,
    };
    let build =
        spaces::build_weight_with_bounds(&g, &h, wc.p, kappa, kappa_dual, wc.depth, &cfg)?;
    let ap = spaces::ap_constant(&build.weight, wc.p);
    let bound = 2f64.powf(wc.p) * kappa.powf(wc.p - 1.0) * kappa_dual;

    let v = spaces::rubio_iterate(&g, kappa, wc.depth, &cfg)?;
    let a1 = spaces::pointwise_a1_check(&v, kappa, wc.depth, &cfg)?;

    let wf = build.weight.as_grid_function();
    let (header, rows) = grid_function_csv(&wf, "w");
    write_csv(&ctx.out_dir.join("w.csv"), &header, rows.into_iter())?;

    let summary = WeightsSummary {
        meta: ctx.meta(
            ctx.effective_seed(),
            Some(KappaMeta { kappa, kappa_dual }),
        ),
        p: wc.p,
        depth: wc.depth,
        ap_constant: ap,
        factorization_bound: bound,
        bound_with_margin: bound * 1.1,
        within_bound: ap <= bound * 1.1,
        a1_check: A1Summary {
            passes: a1.passes,
            max_ratio: a1.max_ratio,
            tolerance: a1.tolerance,
        },
        weight_min: build.weight.values().iter().copied().fold(f64::INFINITY, f64::min),
        weight_max: build.weight.values().iter().copied().fold(0.0, f64::max),
    };
    write_json(&ctx.out_dir.join("weights.json"), &summary)
}
