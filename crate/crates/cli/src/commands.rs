use std::fmt::Write as _;
use std::path::Path;

use robust_matching::combinatorics::all_profiles;
use robust_matching::communication::{
    admissibility_report, bound_table, communication_requirement, BoundCell, BoundConstants, DecayFunction,
    HardnessFunction,
};
use robust_matching::embedding::{bourgain_embed, maximize_euclidean_robustness, measure_distortion, EuclideanPlacement};
use robust_matching::market::{MarketProfile, ProfileSet};
use robust_matching::matching::{enumerate_stable_with_cap, phi};
use robust_matching::metric::PlacedSpace;
use robust_matching::perturbation::{
    adversarial_witness, critical_market, critical_ratio, is_c_robust, preservation_probability, robustness,
    robustness_by_search, spike_value, theorem_ub_level, AppendixSampler, CriticalRatio, Witness,
};
use robust_matching::planarity::{genus_lower_bound, is_planar, GenusBound};
use robust_matching::polarity::{
    build_generating_space, market_generating_space, planar_refutation_search, polarity_violation,
    verify_generating, RefutationReport,
};
use robust_matching::{Assignment, Error, MatchingMarket, MetricSpace, OrdinalProfile, Placement, UtilityProfile};
use serde::{Deserialize, Serialize};

use crate::io::{
    announce_seed, csv_document, emit, json_document, num, opt_num, read_json, read_numeric_csv, read_toml,
    text_table, unsupported, CliError, Format,
};
use crate::{Command, MarketSource, OutputArgs, SideArg};

/// Largest n for which `genspace --market` writes the union over all of R^n.
const UNION_CAP: usize = 3;

type CliResult<T = ()> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Solve { input, output } => solve(&input, &output),
        Command::StableSet { input, cap, output } => stable_set(&input, cap, &output),
        Command::Robustness {
            market,
            base,
            lo,
            hi,
            tol,
            output,
        } => robustness_cmd(&load_market(&market, base)?, lo, hi, tol, &output),
        Command::Witness {
            market,
            base,
            c,
            output,
        } => witness_cmd(&load_market(&market, base)?, c, &output),
        Command::AppendixA {
            n,
            c,
            eps,
            trials,
            seed,
            output,
        } => appendix_a(n, c, eps, trials, seed.seed, &output),
        Command::Polarity { input, output } => polarity_cmd(&input, &output),
        Command::Genspace {
            input,
            market,
            side,
            output,
        } => match (input, market) {
            (Some(input), _) => genspace_single(&input, &output),
            (None, Some(market)) => genspace_union(&market, side, &output),
            (None, None) => Err(CliError::Usage("genspace needs --in or --market".into())),
        },
        Command::Planarity {
            input,
            lemma_search,
            climb_steps,
            seed,
            output,
        } => planarity_cmd(input.as_deref(), lemma_search, climb_steps, seed.seed, &output),
        Command::Embed {
            input,
            quality,
            seed,
            output,
        } => embed_cmd(&input, quality, seed.seed, &output),
        Command::Distortion {
            input,
            embedding,
            quality,
            seed,
            output,
        } => distortion_cmd(&input, embedding.as_deref(), quality, seed.seed, &output),
        Command::BanachSearch {
            dim,
            restarts,
            iters,
            seed,
            output,
        } => banach_search(dim, restarts, iters, seed.seed, &output),
        Command::Commreq {
            xi,
            n,
            sequence,
            config,
            output,
        } => commreq(xi, n, sequence.as_deref(), config.as_deref(), &output),
        Command::BoundTable {
            n,
            size,
            genus,
            config,
            output,
        } => bound_table_cmd(n, size, genus, config.as_deref(), &output),
    }
}

fn finish(output: &OutputArgs, content: String) -> CliResult {
    emit(output.out.as_ref(), &content)
}

#[derive(Deserialize)]
struct Instance {
    men: OrdinalProfile,
    women: OrdinalProfile,
}

fn load_market(source: &MarketSource, base: Option<f64>) -> CliResult<MatchingMarket> {
    match (&source.input, source.geometric) {
        (Some(path), _) => {
            let m: MatchingMarket = read_json(path)?;
            Ok(MatchingMarket::new(m.men, m.women)?)
        }
        (None, Some(n)) => {
            let base = base.ok_or_else(|| CliError::Usage("--geometric needs --base".into()))?;
            Ok(MatchingMarket::geometric(n, base)?)
        }
        (None, None) => Err(CliError::Usage("give --in or --geometric".into())),
    }
}

fn load_space(path: &Path) -> CliResult<(MetricSpace, Option<Placement>)> {
    let placed: PlacedSpace = read_json(path)?;
    Ok(placed.into_parts()?)
}

fn solve(input: &Path, output: &OutputArgs) -> CliResult {
    let inst: Instance = read_json(input)?;
    let pair = phi(&inst.men, &inst.women)?;
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&pair),
        fmt => {
            let header = ["man", "male_optimal", "female_optimal"];
            let rows: Vec<Vec<String>> = (0..pair.male_optimal.n())
                .map(|m| {
                    vec![
                        m.to_string(),
                        pair.male_optimal.partner_of_man(m).to_string(),
                        pair.female_optimal.partner_of_man(m).to_string(),
                    ]
                })
                .collect();
            if fmt == Format::Csv {
                csv_document(&header, &rows)
            } else {
                text_table(&header, &rows)
            }
        }
    };
    finish(output, content)
}

fn stable_set(input: &Path, cap: usize, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Out {
        count: usize,
        assignments: Vec<Assignment>,
    }
    let inst: Instance = read_json(input)?;
    let assignments = enumerate_stable_with_cap(&inst.men, &inst.women, cap)?;
    let n = inst.men.n();
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&Out {
            count: assignments.len(),
            assignments,
        }),
        fmt => {
            let header: Vec<String> = std::iter::once("index".to_string())
                .chain((0..n).map(|m| format!("m{m}")))
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows: Vec<Vec<String>> = assignments
                .iter()
                .enumerate()
                .map(|(i, a)| std::iter::once(i.to_string()).chain(a.pairing().iter().map(usize::to_string)).collect())
                .collect();
            if fmt == Format::Csv {
                csv_document(&header, &rows)
            } else {
                text_table(&header, &rows)
            }
        }
    };
    finish(output, content)
}

fn robustness_cmd(market: &MatchingMarket, lo: f64, hi: Option<f64>, tol: f64, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Search {
        lo: f64,
        hi: f64,
        tol: f64,
        value: Option<f64>,
    }
    #[derive(Serialize)]
    struct Out {
        n: usize,
        /// `null` when no comparable pair exists.
        xi: Option<f64>,
        argmin: Option<CriticalRatio>,
        search: Option<Search>,
        difference: Option<f64>,
        agree: Option<bool>,
    }
    let report = robustness(market, &ProfileSet::Exhaustive)?;
    let search = if report.xi.is_finite() {
        let hi = hi.unwrap_or(2.0 * report.xi + 1.0);
        let value = robustness_by_search(market, lo, hi, tol)?;
        Some(Search {
            lo,
            hi,
            tol,
            value: value.is_finite().then_some(value),
        })
    } else {
        None
    };
    let difference = search
        .as_ref()
        .and_then(|s| s.value)
        .map(|v| (v - report.xi).abs());
    let out = Out {
        n: market.n(),
        xi: report.xi.is_finite().then_some(report.xi),
        argmin: report.argmin,
        agree: difference.map(|d| d <= tol),
        difference,
        search,
    };
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&out),
        fmt => {
            let header = ["n", "xi", "search_value", "difference", "agree"];
            let row = vec![
                out.n.to_string(),
                num(report.xi),
                opt_num(out.search.as_ref().and_then(|s| s.value)),
                opt_num(out.difference),
                out.agree.map(|a| a.to_string()).unwrap_or_default(),
            ];
            if fmt == Format::Csv {
                csv_document(&header, &[row])
            } else {
                text_table(&header, &[row])
            }
        }
    };
    finish(output, content)
}

fn witness_cmd(market: &MatchingMarket, c: f64, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Out {
        c: f64,
        c_robust: bool,
        witness: Option<Witness>,
    }
    let c_robust = is_c_robust(market, c, &ProfileSet::Exhaustive)?;
    let witness = adversarial_witness(market, c)?;
    let out = Out { c, c_robust, witness };
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&out),
        Format::Text => {
            let mut s = format!("C = {c}: {}\n", if c_robust { "C-robust" } else { "not C-robust" });
            match &out.witness {
                None => s.push_str("no witness\n"),
                Some(w) => {
                    let _ = writeln!(
                        s,
                        "witness on {:?} side: {:?} -> {:?} against {:?}\nstable pair {:?} -> {:?}",
                        w.side,
                        w.profile.ranks(),
                        w.perturbed_profile.ranks(),
                        w.counter_profile.ranks(),
                        (w.original.male_optimal.pairing(), w.original.female_optimal.pairing()),
                        (w.perturbed.male_optimal.pairing(), w.perturbed.female_optimal.pairing()),
                    );
                }
            }
            s
        }
        Format::Csv => return Err(unsupported("witness", Format::Csv)),
    };
    finish(output, content)
}

fn appendix_a(n: usize, c: f64, eps: f64, trials: u64, seed: u64, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Out {
        n: usize,
        c: f64,
        eps: f64,
        trials: u64,
        seed: u64,
        critical_ratio: f64,
        theorem_ub_level: f64,
        deterministic_robust_below_ub: bool,
        spike: f64,
        preserved: u64,
        preserved_fraction: f64,
    }
    announce_seed(seed);
    let market = critical_market(n, c, eps)?;
    let ub = theorem_ub_level(n, c);
    let below = is_c_robust(&market, (ub - 1e-9).max(1.0), &ProfileSet::Exhaustive)?;
    let sampler = AppendixSampler::new(&market, c, eps)?;
    let estimate = preservation_probability(&market, &sampler, trials, seed)?;
    let out = Out {
        n,
        c,
        eps,
        trials,
        seed,
        critical_ratio: critical_ratio(n, c, eps),
        theorem_ub_level: ub,
        deterministic_robust_below_ub: below,
        spike: spike_value(n, c, eps),
        preserved: estimate.preserved,
        preserved_fraction: estimate.fraction,
    };
    let content = match output.format.unwrap_or(Format::Csv) {
        Format::Json => json_document(&out),
        fmt => {
            let header = ["n", "C", "eps", "trials", "preserved_fraction", "seed"];
            let row = vec![
                n.to_string(),
                num(c),
                num(eps),
                trials.to_string(),
                num(estimate.fraction),
                seed.to_string(),
            ];
            if fmt == Format::Csv {
                csv_document(&header, &[row])
            } else {
                text_table(&header, &[row])
            }
        }
    };
    finish(output, content)
}

fn polarity_cmd(input: &Path, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Out {
        polarized: bool,
        /// `[a, a', x, x']`.
        violation: Option<[usize; 4]>,
    }
    let u: UtilityProfile = read_json(input)?;
    let violation = polarity_violation(&u);
    let out = Out {
        polarized: violation.is_none(),
        violation,
    };
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&out),
        Format::Text => match violation {
            None => "polarized\n".to_string(),
            Some([a, a2, x, x2]) => format!("not polarized: a={a} a'={a2} x={x} x'={x2}\n"),
        },
        Format::Csv => {
            let row = match violation {
                None => vec!["true".into(), String::new(), String::new(), String::new(), String::new()],
                Some(q) => std::iter::once("false".to_string()).chain(q.iter().map(usize::to_string)).collect(),
            };
            csv_document(&["polarized", "a", "a2", "x", "x2"], &[row])
        }
    };
    finish(output, content)
}

fn genspace_single(input: &Path, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        space: PlacedSpace,
        verified: bool,
    }
    let u: UtilityProfile = read_json(input)?;
    let (space, placement) = build_generating_space(&u)?;
    let scale = u.values().iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let verified = verify_generating(&space, &placement, &u, robust_matching::metric::DIST_TOL * scale);
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&Out {
            space: PlacedSpace::from_parts(&space, Some(&placement)),
            verified,
        }),
        Format::Text => space.to_dot(Some(&placement)),
        Format::Csv => edges_csv(&space),
    };
    finish(output, content)
}

fn edges_csv(space: &MetricSpace) -> String {
    let rows: Vec<Vec<String>> = space
        .edges()
        .iter()
        .map(|e| vec![e.0.to_string(), e.1.to_string(), num(e.2)])
        .collect();
    csv_document(&["u", "v", "w"], &rows)
}

fn genspace_union(path: &Path, side: SideArg, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Labelled {
        profile: OrdinalProfile,
        alpha: Vec<usize>,
        beta: Vec<usize>,
    }
    #[derive(Serialize)]
    struct Out {
        vertices: usize,
        edges: Vec<robust_matching::metric::Edge>,
        placements: Vec<Labelled>,
    }
    let m: MatchingMarket = read_json(path)?;
    let market = MatchingMarket::new(m.men, m.women)?;
    let profile: &MarketProfile = match side {
        SideArg::Men => &market.men,
        SideArg::Women => &market.women,
    };
    let n = profile.n();
    if n > UNION_CAP {
        return Err(Error::TooLarge { n, cap: UNION_CAP }.into());
    }
    let profiles: Vec<OrdinalProfile> = all_profiles(n).collect();
    let (space, placements) = market_generating_space(profile, &profiles)?;
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&Out {
            vertices: space.vertex_count(),
            edges: space.edges().to_vec(),
            placements: profiles
                .into_iter()
                .zip(placements)
                .map(|(profile, p)| Labelled {
                    profile,
                    alpha: p.alpha,
                    beta: p.beta,
                })
                .collect(),
        }),
        Format::Text => space.to_dot(None),
        Format::Csv => edges_csv(&space),
    };
    finish(output, content)
}

fn planarity_cmd(
    input: Option<&Path>,
    lemma_search: Option<usize>,
    climb_steps: usize,
    seed: u64,
    output: &OutputArgs,
) -> CliResult {
    #[derive(Serialize)]
    struct SpaceReport {
        vertices: usize,
        edges: usize,
        connected: bool,
        planar: bool,
        genus_lower_bound: GenusBound,
    }
    #[derive(Serialize)]
    struct Search {
        seed: u64,
        climb_steps: usize,
        #[serde(flatten)]
        report: RefutationReport,
    }
    #[derive(Serialize)]
    struct Out {
        #[serde(skip_serializing_if = "Option::is_none")]
        space: Option<SpaceReport>,
        #[serde(skip_serializing_if = "Option::is_none")]
        lemma_search: Option<Search>,
    }
    let space = match input {
        Some(path) => {
            let (space, _) = load_space(path)?;
            Some(SpaceReport {
                vertices: space.vertex_count(),
                edges: space.support_edges().len(),
                connected: space.is_connected(),
                planar: is_planar(&space),
                genus_lower_bound: genus_lower_bound(&space),
            })
        }
        None => None,
    };
    let lemma_search = lemma_search.map(|candidates| {
        announce_seed(seed);
        Search {
            seed,
            climb_steps,
            report: planar_refutation_search(candidates, climb_steps, seed),
        }
    });
    let out = Out { space, lemma_search };
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&out),
        Format::Text => {
            let mut s = String::new();
            if let Some(r) = &out.space {
                let _ = writeln!(
                    s,
                    "{} vertices, {} edges, {}, {}, genus >= {}",
                    r.vertices,
                    r.edges,
                    if r.connected { "connected" } else { "disconnected" },
                    if r.planar { "planar" } else { "nonplanar" },
                    r.genus_lower_bound.total
                );
            }
            if let Some(l) = &out.lemma_search {
                let _ = writeln!(
                    s,
                    "lemma search: {} candidates, {} planar representations, best {}/{} cells",
                    l.report.candidates, l.report.representations_found, l.report.best_cells_satisfied, l.report.total_cells
                );
            }
            s
        }
        Format::Csv => {
            let r = out
                .space
                .as_ref()
                .ok_or_else(|| CliError::Usage("planarity --format csv needs --in".into()))?;
            csv_document(
                &["vertices", "edges", "connected", "planar", "genus_lower_bound"],
                &[vec![
                    r.vertices.to_string(),
                    r.edges.to_string(),
                    r.connected.to_string(),
                    r.planar.to_string(),
                    r.genus_lower_bound.total.to_string(),
                ]],
            )
        }
    };
    finish(output, content)
}

fn placement_csv(p: &EuclideanPlacement) -> String {
    let header: Vec<String> = std::iter::once("vertex".to_string())
        .chain((0..p.dim).map(|k| format!("c{k}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = p
        .points
        .iter()
        .enumerate()
        .map(|(v, pt)| std::iter::once(v.to_string()).chain(pt.iter().map(|&x| num(x))).collect())
        .collect();
    csv_document(&header, &rows)
}

fn embed_cmd(input: &Path, quality: usize, seed: u64, output: &OutputArgs) -> CliResult {
    announce_seed(seed);
    let (space, _) = load_space(input)?;
    let placement = bourgain_embed(&space, quality, seed)?;
    let content = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => placement_csv(&placement),
        Format::Json => json_document(&placement),
        Format::Text => return Err(unsupported("embed", Format::Text)),
    };
    finish(output, content)
}

fn read_embedding(path: &Path, vertices: usize) -> CliResult<EuclideanPlacement> {
    let (header, rows) = read_numeric_csv(path)?;
    let malformed = |message: String| CliError::Malformed {
        path: path.display().to_string(),
        message,
    };
    if header.first().map(String::as_str) != Some("vertex") || header.len() < 2 {
        return Err(malformed("header must be vertex,c0,c1,... (line 1, column 1)".into()));
    }
    if rows.len() != vertices {
        return Err(Error::SizeMismatch {
            expected: vertices,
            found: rows.len(),
        }
        .into());
    }
    let mut points = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != header.len() || row[0] != i as f64 {
            return Err(malformed(format!(
                "row for vertex {i} must list vertex {i} then {} coordinates (line {}, column 1)",
                header.len() - 1,
                i + 2
            )));
        }
        points.push(row[1..].to_vec());
    }
    Ok(EuclideanPlacement::new(points)?)
}

fn distortion_cmd(input: &Path, embedding: Option<&Path>, quality: usize, seed: u64, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Out {
        vertices: usize,
        dim: usize,
        /// Present when the embedding was computed here.
        #[serde(skip_serializing_if = "Option::is_none")]
        quality: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(flatten)]
        report: robust_matching::embedding::DistortionReport,
        expansion_over_ln_size: f64,
    }
    let (space, _) = load_space(input)?;
    let (placement, computed) = match embedding {
        Some(path) => (read_embedding(path, space.vertex_count())?, false),
        None => {
            announce_seed(seed);
            (bourgain_embed(&space, quality, seed)?, true)
        }
    };
    let report = measure_distortion(&space, &placement)?;
    let v = space.vertex_count();
    let out = Out {
        vertices: v,
        dim: placement.dim,
        quality: computed.then_some(quality),
        seed: computed.then_some(seed),
        expansion_over_ln_size: report.max_expansion / (v as f64).ln(),
        report,
    };
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&out),
        fmt => {
            let header = ["vertices", "dim", "scale", "max_expansion", "max_contraction", "expansion_over_ln_size"];
            let row = vec![
                v.to_string(),
                out.dim.to_string(),
                num(out.report.scale),
                num(out.report.max_expansion),
                num(out.report.max_contraction),
                num(out.expansion_over_ln_size),
            ];
            if fmt == Format::Csv {
                csv_document(&header, &[row])
            } else {
                text_table(&header, &[row])
            }
        }
    };
    finish(output, content)
}

fn banach_search(dim: usize, restarts: usize, iters: usize, seed: u64, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Out {
        seed: u64,
        #[serde(flatten)]
        search: robust_matching::embedding::BanachSearch,
    }
    announce_seed(seed);
    let search = maximize_euclidean_robustness(dim, restarts, iters, seed)?;
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&Out { seed, search }),
        fmt => {
            let header = ["dim", "restarts", "iters", "feasible_restarts", "best_value", "seed"];
            let row = vec![
                dim.to_string(),
                restarts.to_string(),
                iters.to_string(),
                search.feasible_restarts.to_string(),
                opt_num(search.best_value),
                seed.to_string(),
            ];
            if fmt == Format::Csv {
                csv_document(&header, &[row])
            } else {
                text_table(&header, &[row])
            }
        }
    };
    finish(output, content)
}

/// Commreq and bound-table configuration. Missing tables take the defaults
/// `D(t) = t`, `H(n) = ln(1 + n)` and unit constants.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommConfig {
    #[serde(default)]
    #[allow(dead_code)]
    schema: Option<u32>,
    #[serde(default = "default_decay")]
    decay: DecayFunction,
    #[serde(default = "default_hardness")]
    hardness: HardnessFunction,
    #[serde(default)]
    constants: BoundConstants,
}

fn default_decay() -> DecayFunction {
    DecayFunction::Linear { slope: 1.0 }
}

fn default_hardness() -> HardnessFunction {
    HardnessFunction::Log { coef: 1.0 }
}

fn load_config(path: Option<&Path>) -> CliResult<CommConfig> {
    let config = match path {
        Some(p) => read_toml(p)?,
        None => CommConfig {
            schema: None,
            decay: default_decay(),
            hardness: default_hardness(),
            constants: BoundConstants::default(),
        },
    };
    config.decay.validate()?;
    config.hardness.validate()?;
    Ok(config)
}

fn commreq(
    xi: Option<f64>,
    n: Option<usize>,
    sequence: Option<&Path>,
    config: Option<&Path>,
    output: &OutputArgs,
) -> CliResult {
    let config = load_config(config)?;
    match (sequence, xi, n) {
        (Some(path), _, _) => admissibility(path, &config, output),
        (None, Some(xi), Some(n)) => single_requirement(xi, n, &config, output),
        _ => Err(CliError::Usage("commreq needs --xi with --n, or --sequence".into())),
    }
}

fn single_requirement(xi: f64, n: usize, config: &CommConfig, output: &OutputArgs) -> CliResult {
    #[derive(Serialize)]
    struct Out {
        n: usize,
        xi: Option<f64>,
        decay: DecayFunction,
        hardness_function: HardnessFunction,
        hardness: f64,
        t: f64,
        clamped: bool,
    }
    let req = communication_requirement(xi, &config.hardness, &config.decay, n)?;
    let out = Out {
        n,
        xi: xi.is_finite().then_some(xi),
        decay: config.decay,
        hardness_function: config.hardness,
        hardness: config.hardness.eval(n),
        t: req.t,
        clamped: req.clamped,
    };
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&out),
        fmt => {
            let header = ["n", "xi", "hardness", "t", "clamped"];
            let row = vec![n.to_string(), num(xi), num(out.hardness), num(req.t), req.clamped.to_string()];
            if fmt == Format::Csv {
                csv_document(&header, &[row])
            } else {
                text_table(&header, &[row])
            }
        }
    };
    finish(output, content)
}

fn admissibility(path: &Path, config: &CommConfig, output: &OutputArgs) -> CliResult {
    let (header, rows) = read_numeric_csv(path)?;
    if header != ["n", "xi"] {
        return Err(CliError::Malformed {
            path: path.display().to_string(),
            message: "header must be n,xi (line 1, column 1)".into(),
        });
    }
    let mut seq = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let bad = |col: usize, what: &str| CliError::Malformed {
            path: path.display().to_string(),
            message: format!("{what} (line {}, column {col})", i + 2),
        };
        if row.len() != 2 {
            return Err(bad(1, "expected two fields"));
        }
        if !(row[0] >= 1.0 && row[0].fract() == 0.0) {
            return Err(bad(1, "n must be a positive integer"));
        }
        seq.push((row[0] as usize, row[1]));
    }
    let report = admissibility_report(&seq, &config.hardness, &config.decay)?;
    let trend = format!("{:?}", report.trend).to_lowercase();
    let content = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&report),
        fmt => {
            let header = ["n", "xi", "hardness", "ratio", "t", "clamped"];
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        num(r.xi),
                        num(r.hardness),
                        num(r.ratio),
                        num(r.t),
                        r.clamped.to_string(),
                    ]
                })
                .collect();
            if fmt == Format::Csv {
                let mut header = header.to_vec();
                header.extend(["exponent", "trend"]);
                let rows: Vec<Vec<String>> = rows
                    .into_iter()
                    .map(|mut r| {
                        r.push(num(report.exponent));
                        r.push(trend.clone());
                        r
                    })
                    .collect();
                csv_document(&header, &rows)
            } else {
                let mut s = text_table(&header, &rows);
                let _ = writeln!(s, "exponent {} -> {trend} ({})", num(report.exponent), report.caveat);
                s
            }
        }
    };
    finish(output, content)
}

fn bound_table_cmd(n: usize, size: u64, genus: u64, config: Option<&Path>, output: &OutputArgs) -> CliResult {
    let config = load_config(config)?;
    let table = bound_table(n, size, genus, &config.hardness, &config.decay, config.constants)?;
    let rows_of = |regime: &str, cells: [(&str, &BoundCell); 3]| -> Vec<Vec<String>> {
        cells
            .iter()
            .map(|(col, cell)| {
                vec![
                    regime.to_string(),
                    col.to_string(),
                    num(cell.bound),
                    num(cell.t),
                    cell.clamped.to_string(),
                ]
            })
            .collect()
    };
    fn cells(r: &robust_matching::communication::BoundRow) -> [(&'static str, &BoundCell); 3] {
        [("size", &r.size), ("genus", &r.genus), ("agents", &r.agents)]
    }
    let content = match output.format.unwrap_or(Format::Text) {
        Format::Json => json_document(&table),
        Format::Csv => {
            let mut rows = rows_of("deterministic", cells(&table.deterministic));
            rows.extend(rows_of("probabilistic", cells(&table.probabilistic)));
            csv_document(&["regime", "column", "bound", "t", "clamped"], &rows)
        }
        Format::Text => {
            let cell = |c: &BoundCell| format!("{}{}", num(c.t), if c.clamped { "*" } else { "" });
            let header = ["", "|X| (c·ln|X|)", "genus", "n (c·n²·ln n)"];
            let rows = vec![
                vec![
                    "T".to_string(),
                    cell(&table.deterministic.size),
                    format!("{} (c·n²·ln(1+g))", cell(&table.deterministic.genus)),
                    cell(&table.deterministic.agents),
                ],
                vec![
                    "T^P".to_string(),
                    cell(&table.probabilistic.size),
                    format!("{} (c·ln(1+g))", cell(&table.probabilistic.genus)),
                    cell(&table.probabilistic.agents),
                ],
            ];
            let mut s = format!(
                "n = {n}, |X| = {size}, g = {genus}, H(n) = {}; entries are D⁻¹(H(n)/bound), * = clamped at 0\n",
                num(table.hardness)
            );
            s.push_str(&text_table(&header, &rows));
            s
        }
    };
    finish(output, content)
}
