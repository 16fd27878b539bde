//! Command-line surface: argument parsing, running commands, and JSON output.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::cliquecensus::{census, classify_clique, formula_counts, sample_non_linear_clique, verify_srg, CensusMode, Gamma, SpectrumEntry, SrgParams};
use crate::covering::{canonical_covering, verify_covering, AffineQuadrangle, CoveringMap};
use crate::error::{Error, Result};
use crate::figures::{self, CubeParams, FigureKind};
use crate::gf2n::{parse_binary_modulus, FieldCtx};
use crate::ovoid::{verify_semipartial, GeometryX};
use crate::projgeom::bits_of;
use crate::quadric::QuadricModel;
use crate::report::{RunReport, Source};
use crate::subf2::{self, figure_subgeometry};

pub const OUT_DIR_ENV: &str = "QUADCOVER_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "quadcover", version, about = "Generalized quadrangles over GF(2^n), the ovoid geometry X and its tangency graph")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalOpts {
    /// Field degree; q = 2^n.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: u32,
    /// Irreducible modulus as a binary literal, e.g. 1011.
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Integer bit pattern of the form parameter lambda (trace 1).
    #[arg(long, global = true)]
    pub lambda: Option<u16>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Build Q, Q0 and their lines and print a summary.
    Build {
        /// CSV dump of Q-lines, one row of point indices per line.
        #[arg(long)]
        export_lines: Option<PathBuf>,
    },
    /// Verify a structural property.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Clique census of the tangency graph.
    Census {
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        /// CSV edge list: ovoid, ovoid, point of tangency.
        #[arg(long)]
        export_edges: Option<PathBuf>,
    },
    /// Lift a non-linear clique of ovoid ids to its centric figure.
    Lift {
        /// Comma-separated ovoid ids.
        #[arg(long, value_delimiter = ',', required = true)]
        clique: Vec<u32>,
    },
    /// F2-subgeometry of the figure lifted from a clique.
    Subgeometry {
        /// Comma-separated ovoid ids.
        #[arg(long, value_delimiter = ',', conflicts_with = "random")]
        clique: Vec<u32>,
        /// Use a seeded random non-linear clique of this size instead.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Figure constructions against their brute-force counterparts.
    Figures {
        #[command(subcommand)]
        what: FiguresCmd,
    },
    /// Exact-integer counting identities for n = 1..n_max.
    Counts {
        #[arg(long, default_value_t = 9)]
        n_max: u32,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum VerifyCmd {
    /// Strongly regular parameters of the tangency graph.
    Srg,
    /// The canonical 2-fold covering of X by the affine quadrangle.
    Covering {
        /// CSV of the incidence of X: ovoid, point of Q0.
        #[arg(long)]
        export_incidence: Option<PathBuf>,
    },
    /// Semipartial geometry axioms of X.
    Semipartial {
        /// Check this many random pairs instead of all of them.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum FiguresCmd {
    /// Check fundamental cubes, frames and extensions on sampled lifted figures.
    Verify {
        /// Figures sampled per construction.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Sampled,
}

/// Lazily built objects shared by the commands.
struct World {
    model: QuadricModel,
    gx: Option<GeometryX>,
    g: Option<Gamma>,
    aq: Option<AffineQuadrangle>,
    cov: Option<CoveringMap>,
}

impl World {
    fn new(opts: &GlobalOpts, rep: &mut RunReport) -> Result<World> {
        let ctx = match &opts.modulus {
            Some(m) => FieldCtx::with_modulus(opts.n, parse_binary_modulus(m)?)?,
            None => FieldCtx::new(opts.n)?,
        };
        let lam = match opts.lambda {
            Some(b) => ctx.element(b as u32)?,
            None => ctx.default_lambda(),
        };
        let model = rep.time("model", || QuadricModel::build(ctx, lam))?;
        rep.model = Some(model.summary());
        Ok(World {
            model,
            gx: None,
            g: None,
            aq: None,
            cov: None,
        })
    }

    fn gx(&mut self, rep: &mut RunReport) -> Result<&GeometryX> {
        if self.gx.is_none() {
            self.gx = Some(rep.time("geometry_x", || GeometryX::build(&self.model))?);
        }
        Ok(self.gx.as_ref().unwrap())
    }

    fn gamma(&mut self, rep: &mut RunReport) -> Result<&Gamma> {
        if self.g.is_none() {
            self.gx(rep)?;
            let g = rep.time("gamma", || Gamma::build(&self.model, self.gx.as_ref().unwrap()));
            self.g = Some(g);
        }
        Ok(self.g.as_ref().unwrap())
    }

    fn covering(&mut self, rep: &mut RunReport) -> Result<()> {
        if self.cov.is_none() {
            self.gx(rep)?;
            let aq = rep.time("affine_quadrangle", || AffineQuadrangle::build(&self.model))?;
            let cov = rep.time("covering", || canonical_covering(&self.model, self.gx.as_ref().unwrap(), &aq))?;
            self.aq = Some(aq);
            self.cov = Some(cov);
        }
        Ok(())
    }
}

fn write_csv<R: Serialize>(path: &Path, header: &[&str], rows: impl Iterator<Item = R>) -> Result<()> {
    let io = |e: csv::Error| Error::Io(format!("writing {}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))?;
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Build { .. } => "build",
        Command::Verify { what: VerifyCmd::Srg } => "verify-srg",
        Command::Verify { what: VerifyCmd::Covering { .. } } => "verify-covering",
        Command::Verify { what: VerifyCmd::Semipartial { .. } } => "verify-semipartial",
        Command::Census { .. } => "census",
        Command::Lift { .. } => "lift",
        Command::Subgeometry { .. } => "subgeometry",
        Command::Figures { .. } => "figures-verify",
        Command::Counts { .. } => "counts",
    }
}

fn config_echo(cli: &Cli) -> serde_json::Value {
    let mut v = json!(cli.global);
    let extra = match &cli.command {
        Command::Build { .. } | Command::Verify { what: VerifyCmd::Srg | VerifyCmd::Covering { .. } } => json!({}),
        Command::Verify { what: VerifyCmd::Semipartial { samples, seed } } => json!({"samples": samples, "seed": seed}),
        Command::Census { mode, samples, seed, max_size, .. } => json!({"mode": mode, "samples": samples, "seed": seed, "max_size": max_size}),
        Command::Lift { clique } => json!({"clique": clique}),
        Command::Subgeometry { clique, random, seed } => json!({"clique": clique, "random": random, "seed": seed}),
        Command::Figures { what: FiguresCmd::Verify { samples, seed } } => json!({"samples": samples, "seed": seed}),
        Command::Counts { n_max } => json!({"n_max": n_max}),
    };
    if let (serde_json::Value::Object(a), serde_json::Value::Object(b)) = (&mut v, extra) {
        a.extend(b);
    }
    v
}

/// Runs a parsed command and returns its report.
pub fn run(cli: &Cli) -> Result<RunReport> {
    let mut rep = RunReport::new(command_name(&cli.command), config_echo(cli));
    if let Command::Counts { n_max } = cli.command {
        run_counts(&mut rep, n_max);
        return Ok(rep);
    }
    let mut w = World::new(&cli.global, &mut rep)?;
    match &cli.command {
        Command::Build { export_lines } => run_build(&mut rep, &w, export_lines.as_deref())?,
        Command::Verify { what: VerifyCmd::Srg } => run_srg(&mut rep, &mut w)?,
        Command::Verify { what: VerifyCmd::Covering { export_incidence } } => run_covering(&mut rep, &mut w, export_incidence.as_deref())?,
        Command::Verify { what: VerifyCmd::Semipartial { samples, seed } } => {
            w.gx(&mut rep)?;
            let gx = w.gx.as_ref().unwrap();
            let r = rep.time("check", || verify_semipartial(&w.model, gx, samples.map(|s| (*seed, s))));
            let q = w.model.q() as usize;
            rep.compare("line size s+1 = q", q, r.s_plus_1, Source::Formula);
            rep.compare("point degree t+1 = q^2+1", q * q + 1, r.t_plus_1, Source::Formula);
            rep.holds("all lines have s+1 points", r.line_sizes_ok, Source::Enumeration);
            rep.holds("all points have t+1 lines", r.point_degrees_ok, Source::Enumeration);
            rep.holds("alpha in {0, 2} on non-incident pairs", r.alpha_ok, Source::Enumeration);
            rep.detail("semipartial", &r);
        }
        Command::Census {
            mode,
            samples,
            seed,
            max_size,
            export_edges,
        } => run_census(&mut rep, &mut w, *mode, *samples, *seed, *max_size, export_edges.as_deref())?,
        Command::Lift { clique } => run_lift(&mut rep, &mut w, clique)?,
        Command::Subgeometry { clique, random, seed } => run_subgeometry(&mut rep, &mut w, clique, *random, *seed)?,
        Command::Figures { what: FiguresCmd::Verify { samples, seed } } => run_figures(&mut rep, &mut w, *samples, *seed)?,
        Command::Counts { .. } => unreachable!(),
    }
    Ok(rep)
}

fn run_build(rep: &mut RunReport, w: &World, export_lines: Option<&Path>) -> Result<()> {
    let m = &w.model;
    let q = m.q() as usize;
    let s = m.summary();
    rep.compare("|Q| = (q+1)(q^3+1)", (q + 1) * (q.pow(3) + 1), s.points_q, Source::Formula);
    rep.compare("|Q0| = (q+1)(q^2+1)", (q + 1) * (q * q + 1), s.points_q0, Source::Formula);
    rep.compare("lines of Q = (q^2+1)(q^3+1)", (q * q + 1) * (q.pow(3) + 1), s.lines_q, Source::Formula);
    rep.compare("lines of Q0 = (q+1)(q^2+1)", (q + 1) * (q * q + 1), s.lines_q0, Source::Formula);
    rep.compare("|Q \\ Q0| = q^2 (q^2-1)", q * q * (q * q - 1), s.points_affine, Source::Formula);
    let per_point: BTreeSet<usize> = (0..m.points().len() as u32).map(|i| m.lines_on(i).len()).collect();
    rep.compare("lines per point", vec![q * q + 1], per_point.into_iter().collect(), Source::Enumeration);
    if let Some(p) = export_lines {
        write_csv(p, &["line", "points"], m.lines().iter().enumerate().map(|(i, l)| (i, l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))))?;
        rep.detail("exported_lines", p.display().to_string());
    }
    Ok(())
}

fn run_srg(rep: &mut RunReport, w: &mut World) -> Result<()> {
    let g = w.gamma(rep)?;
    let q = g.q() as u64;
    let r = rep.time("check", || verify_srg(g));
    let e = SrgParams::expected(q);
    rep.compare("v", e.v, r.vertices as u64, Source::Enumeration);
    rep.holds("k-regular", r.regular_ok, Source::Enumeration);
    rep.holds("lambda on every edge", r.lambda_ok, Source::Enumeration);
    rep.holds("mu on every non-edge", r.mu_ok, Source::Enumeration);
    rep.holds("k(k-lambda-1) = mu(v-k-1)", r.feasibility_ok, Source::Formula);
    let diam = g.diameter();
    rep.compare("diameter", Some(if q == 2 { 1 } else { 2 }), diam, Source::Enumeration);
    rep.detail("srg", &r);
    Ok(())
}

fn run_covering(rep: &mut RunReport, w: &mut World, export_incidence: Option<&Path>) -> Result<()> {
    w.covering(rep)?;
    let (gx, aq, cov) = (w.gx.as_ref().unwrap(), w.aq.as_ref().unwrap(), w.cov.as_ref().unwrap());
    let r = rep.time("check", || verify_covering(&w.model, gx, aq, cov));
    rep.holds("point fibers have two points", r.fibers_ok, Source::Enumeration);
    rep.holds("bijective on lines", r.line_bijections_ok, Source::Enumeration);
    rep.holds("bijective on pencils", r.pencil_bijections_ok, Source::Enumeration);
    rep.holds("quotient isomorphic to X", r.quotient_iso_ok, Source::Oracle);
    rep.detail("covering", &r);
    if let Some(p) = export_incidence {
        let rows = gx.ovoids.iter().flat_map(|o| o.points.iter().map(move |&x| (o.id, x)));
        write_csv(p, &["ovoid", "point"], rows)?;
        rep.detail("exported_incidence", p.display().to_string());
    }
    Ok(())
}

fn expected_spectrum_sizes(n: u32) -> Vec<usize> {
    let q = 1usize << n;
    match n {
        1 => vec![6],
        _ if n % 2 == 0 => vec![4, q].into_iter().collect::<BTreeSet<_>>().into_iter().collect(),
        _ => vec![6, q],
    }
}

#[allow(clippy::too_many_arguments)]
fn run_census(rep: &mut RunReport, w: &mut World, mode: Mode, samples: u64, seed: u64, max_size: usize, export_edges: Option<&Path>) -> Result<()> {
    let n = w.model.ctx().n();
    w.gamma(rep)?;
    let (g, gx) = (w.g.as_ref().unwrap(), w.gx.as_ref().unwrap());
    let cm = match mode {
        Mode::Full => CensusMode::Full,
        Mode::Sampled => CensusMode::Sampled { seed, samples },
    };
    let r = rep.time("census", || census(g, gx, cm, max_size))?;
    let f = formula_counts(n);
    if let Some(c) = &r.counts {
        rep.compare("N3", f.n3, c.n3, Source::Formula);
        if max_size >= 4 {
            rep.compare("N4", f.n4, c.n4, Source::Formula);
        }
        if max_size >= 6 {
            rep.compare("N5", f.n5, c.n5, Source::Formula);
            rep.compare("N6", f.n6, c.n6, Source::Formula);
        }
    }
    rep.holds("non-linear triangles have q+1 common neighbours", r.triangle_extensions_ok, Source::Enumeration);
    rep.holds("no mixed 4-cliques", r.no_mixed_cliques, Source::Enumeration);
    rep.holds("4-clique extensions", r.four_clique_extensions_ok, Source::Enumeration);
    if let Some(b) = r.triangle_identity_ok {
        rep.holds("linear + non-linear triangles = v k lambda / 6", b, Source::Formula);
    }
    if let Some(b) = r.extension_identities_ok {
        rep.holds("N4 = N3(q+1)/4, N5 = 2N4/5, N6 = N4/15 on counts", b, Source::Formula);
    }
    if let Some(l) = &r.linear {
        rep.holds("linear triangles extend only inside their rosette", l.linear_triangle_extensions_ok, Source::Enumeration);
    }
    if let Some(sp) = &r.spectrum {
        let sizes: BTreeSet<usize> = sp.iter().map(|e: &SpectrumEntry| e.size).collect();
        let mut want = expected_spectrum_sizes(n);
        want.sort_unstable();
        rep.compare("maximal clique sizes", want, sizes.into_iter().collect::<Vec<_>>(), Source::Enumeration);
    }
    if let Some(s) = &r.samples {
        rep.compare("sampled 4-cliques with expected extensions", s.four_cliques_sampled, s.four_cliques_with_expected_extensions, Source::Enumeration);
    }
    rep.detail("census", &r);
    if let Some(p) = export_edges {
        let rows = (0..g.n_vertices() as u32).flat_map(|a| g.neighbors(a).filter(move |&b| a < b).map(move |b| (a, b, g.tangency(a, b).unwrap_or(u32::MAX))));
        write_csv(p, &["a", "b", "tangency_point"], rows)?;
        rep.detail("exported_edges", p.display().to_string());
    }
    Ok(())
}

#[derive(Serialize)]
struct FigureJson {
    kind: FigureKind,
    center: [u16; 6],
    pairs: Vec<[[u16; 6]; 2]>,
    pair_indices: Vec<[u32; 2]>,
}

fn figure_json(m: &QuadricModel, f: &figures::CentricFigure) -> FigureJson {
    FigureJson {
        kind: f.kind,
        center: bits_of(f.center.coords()),
        pairs: f.pairs.iter().map(|p| [bits_of(m.coords(p[0])), bits_of(m.coords(p[1]))]).collect(),
        pair_indices: f.pairs.clone(),
    }
}

fn lifted(rep: &mut RunReport, w: &mut World, clique: &[u32]) -> Result<figures::CentricFigure> {
    w.gamma(rep)?;
    w.covering(rep)?;
    let rec = classify_clique(w.g.as_ref().unwrap(), clique)?;
    figures::lift_clique_to_figure(&w.model, w.cov.as_ref().unwrap(), &rec)
}

fn run_lift(rep: &mut RunReport, w: &mut World, clique: &[u32]) -> Result<()> {
    let fig = lifted(rep, w, clique)?;
    let mut sorted = clique.to_vec();
    sorted.sort_unstable();
    rep.holds("figure is centric", true, Source::Enumeration);
    rep.compare("center", bits_of(w.model.n0().coords()), bits_of(fig.center.coords()), Source::Formula);
    rep.compare("projection recovers the clique", sorted, figures::project_figure(w.cov.as_ref().unwrap(), &fig), Source::Enumeration);
    rep.detail("figure", figure_json(&w.model, &fig));
    Ok(())
}

fn run_subgeometry(rep: &mut RunReport, w: &mut World, clique: &[u32], random: Option<usize>, seed: u64) -> Result<()> {
    let clique = match random {
        Some(k) => {
            if !(3..=6).contains(&k) {
                return Err(Error::CliqueSize(k));
            }
            let g = w.gamma(rep)?;
            let mut rng = SplitMix64::seed_from_u64(seed);
            sample_non_linear_clique(g, &mut rng, k).ok_or(Error::CliqueSize(k))?
        }
        None if clique.is_empty() => return Err(Error::CliqueSize(0)),
        None => clique.to_vec(),
    };
    let fig = lifted(rep, w, &clique)?;
    let s = figure_subgeometry(&w.model, &fig)?;
    rep.compare("type", s.expected, s.report.type_tag, Source::Enumeration);
    rep.holds("span contains the center", s.report.contains_center, Source::Enumeration);
    rep.holds("span contains n0", s.report.contains_n0, Source::Enumeration);
    if fig.kind == FigureKind::Decade {
        rep.holds("decade lies in the 12 points off n0^perp", s.figure_in_complement && s.complement_size == 12, Source::Enumeration);
    } else {
        rep.holds("figure = span quadric points off n0^perp", s.figure_is_complement, Source::Enumeration);
    }
    if fig.kind == FigureKind::Cube {
        rep.holds("nucleus of the span differs from n0", s.nucleus.is_some_and(|p| p != *w.model.n0()), Source::Enumeration);
    }
    rep.detail("clique", &clique);
    rep.detail("figure", figure_json(&w.model, &fig));
    rep.detail("subgeometry", &s);
    Ok(())
}

fn run_figures(rep: &mut RunReport, w: &mut World, samples: usize, seed: u64) -> Result<()> {
    let n = w.model.ctx().n();
    let q = w.model.q() as u64;
    let odd = n % 2 == 1;
    let f = formula_counts(n);
    let par = rep.time("i_of_f_parametric", || figures::i_of_f_parametric(&w.model));
    let brute = rep.time("i_of_f_bruteforce", || figures::i_of_f_bruteforce(&w.model));
    rep.compare("|I(F)| = (q-1)^2 (q+1)", (q - 1).pow(2) * (q + 1), par.len() as u64, Source::Formula);
    rep.holds("I(F) parametric = brute force", par == brute, Source::Oracle);
    let all_params = CubeParams::all(w.model.ctx(), w.model.lambda());
    let ok = all_params.iter().all(|&p| figures::fundamental_cube(&w.model, p).is_ok());
    rep.holds("every parameter choice gives a centric cube", ok, Source::Enumeration);

    if q <= 4 {
        let c = rep.time("quadrangles", || figures::count_quadrangles(&w.model))?;
        rep.compare("quadrangles", figures::quadrangles_formula(q).to_string(), c.to_string(), Source::Formula);
        rep.compare("centric hexagons with center n0", f.n3, figures::count_centric_on_fibers(&w.model, 3), Source::Formula);
        rep.compare("centric cubes with center n0", f.n4, figures::count_centric_on_fibers(&w.model, 4), Source::Formula);
    }

    w.gamma(rep)?;
    w.covering(rep)?;
    let (g, cov) = (w.g.as_ref().unwrap(), w.cov.as_ref().unwrap());
    let mut rng = SplitMix64::seed_from_u64(seed);
    let figs = |k: usize, rng: &mut SplitMix64| -> Result<Vec<figures::CentricFigure>> {
        (0..samples)
            .map(|_| {
                let c = sample_non_linear_clique(g, rng, k).ok_or(Error::CliqueSize(k))?;
                figures::lift_clique_to_figure(&w.model, cov, &classify_clique(g, &c)?)
            })
            .collect()
    };
    let hexes = figs(3, &mut rng)?;
    let (mut hex_ok, mut hex_n_ok) = (true, true);
    rep.time("hexagon_extensions", || -> Result<()> {
        for h in &hexes {
            let a = figures::extend_hexagon_to_cubes(&w.model, h)?;
            let b = figures::extend_by_search(&w.model, h);
            hex_n_ok &= a.len() as u64 == q + 1;
            hex_ok &= a.iter().map(|f| f.pair_set()).eq(b.iter().map(|f| f.pair_set()));
        }
        Ok(())
    })?;
    rep.holds("hexagons extend to q+1 cubes", hex_n_ok, Source::Formula);
    rep.holds("hexagon extension solver = search", hex_ok, Source::Oracle);

    let (mut cube_ok, mut cube_n_ok) = (true, true);
    if let Ok(cubes) = figs(4, &mut rng) {
        rep.time("cube_extensions", || -> Result<()> {
            for c in &cubes {
                let e = figures::extend_cube(&w.model, c)?;
                let b = figures::extend_by_search(&w.model, c);
                cube_n_ok &= e.decades.len() == if odd { 2 } else { 0 } && e.dodecade.is_some() == odd;
                cube_ok &= e.decades.iter().map(|f| f.pair_set()).eq(b.iter().map(|f| f.pair_set()));
            }
            Ok(())
        })?;
    } else {
        cube_n_ok = false;
    }
    rep.holds(if odd { "cubes lie in 2 decades and 1 dodecade" } else { "cubes extend to no decade" }, cube_n_ok, Source::Formula);
    rep.holds("cube extension solver = search", cube_ok, Source::Oracle);
    Ok(())
}

fn run_counts(rep: &mut RunReport, n_max: u32) {
    let rows = subf2::count_identities(1..=n_max);
    for r in &rows {
        rep.holds(&format!("n={} divisions exact", r.n), r.divisions_exact, Source::Formula);
        rep.holds(&format!("n={} N4 = N3(q+1)/4", r.n), r.n4_from_n3, Source::Formula);
        if let (Some(a), Some(b), Some(c), Some(d)) = (r.n5_from_n4, r.n6_from_n4, r.n6_bar_from_n6, r.subgeometries_times_36) {
            rep.holds(&format!("n={} N5 = 2N4/5", r.n), a, Source::Formula);
            rep.holds(&format!("n={} N6 = N4/15", r.n), b, Source::Formula);
            rep.holds(&format!("n={} N6bar = N6 |PG(5,q) \\ Q|", r.n), c, Source::Formula);
            rep.holds(&format!("n={} 36 x subgeometries = N6bar", r.n), d, Source::Formula);
        }
    }
    if let Some(r) = rows.first() {
        rep.compare("q=2 subgeometries", Some("1".to_string()), r.subgeometries.clone(), Source::Formula);
    }
    rep.detail("rows", &rows);
}

fn exit_status(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => 1,
        _ => 2,
    }
}

fn destination(opts: &GlobalOpts, command: &str) -> Option<PathBuf> {
    opts.out.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{command}.json"))))
}

/// Entry point for the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("quadcover: {e}");
            return 2;
        }
    }
    let rep = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("quadcover: {e}");
            return exit_status(&e);
        }
    };
    let text = rep.to_json();
    match destination(&cli.global, &rep.command) {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, text + "\n") {
                eprintln!("quadcover: writing {}: {e}", p.display());
                return 2;
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{text}");
        }
    }
    for c in rep.failed() {
        eprintln!("FAILED {}: expected {}, got {}", c.name, c.expected, c.actual);
    }
    if rep.pass() {
        0
    } else {
        1
    }
}
