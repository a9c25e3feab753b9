//! Subcommand bodies. Each reads resolved [`Settings`] and writes through
//! [`Outputs`]; results without an output path go to stdout.

use std::fs;
use std::path::{Path, PathBuf};

use fullersim_core::calibrate::equivalent_time;
use fullersim_core::evolve::{EvolutionParams, Integrator};
use fullersim_core::manifold::{enumerate_ground_states, GroundStateManifold};
use fullersim_core::measures::{
    empirical, fidelity_floor, manifold_binned_fidelity, manifold_fidelity, restrict_to_manifold, sample,
    sparse_dimer_expectation, BasisObservables, ObservableRecord,
};
use fullersim_core::perturbation::{
    build_tunneling_matrix, perturbative_ground_state, uniform_ground_state, PerturbativeState,
};
use fullersim_core::schedule::{AnnealingSchedule, LinearRamp};
use fullersim_core::topology::{automorphisms, orbit_partition, BuiltinGraph, FullereneGraph, OrbitPartition};
use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::Outputs;
use crate::config::Settings;
use crate::error::{AppError, Context, Result};
use crate::formats::cache::{read_manifold, write_manifold, CacheError};
use crate::formats::edges::{parse_edge_list, write_edge_list};
use crate::formats::schedule::parse_schedule;
use crate::formats::tables::{parse_curve, write_curve, write_observables};
use crate::formats::LineError;

/// Default cap on the physical step, ns.
pub const DEFAULT_MAX_DT: f64 = 0.01;
pub const DEFAULT_DS: f64 = 0.001;
pub const DEFAULT_FLOOR_SAMPLES: usize = 100_000;
pub const DEFAULT_REPETITIONS: usize = 100;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

fn at(path: &Path) -> impl Fn(LineError) -> AppError + '_ {
    move |e| AppError::Parse { path: path.to_owned(), line: e.line, message: e.message }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable");
    text.push('\n');
    text
}

/// Writes `text` to `key`'s path, or prints it when the key is unset.
fn emit(s: &Settings, key: &str, text: String, out: &mut Outputs) -> Result<()> {
    match s.path(key) {
        Some(path) => out.write(&path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Built-in name, unless a file of that name exists.
pub fn load_graph(s: &Settings) -> Result<FullereneGraph> {
    let value = s.require("graph")?;
    let path = s.path("graph").expect("present");
    if !path.exists() {
        if let Ok(b) = value.parse::<BuiltinGraph>() {
            return Ok(b.build());
        }
    }
    parse_edge_list(&read(&path)?).map_err(at(&path))
}

pub fn load_schedule(s: &Settings) -> Result<AnnealingSchedule> {
    let schedule = match s.get("schedule").unwrap_or("default") {
        "default" => {
            let d = LinearRamp::default();
            let ramp = LinearRamp {
                gamma0: s.f64("gamma0")?.unwrap_or(d.gamma0),
                j0: s.f64("j0")?.unwrap_or(d.j0),
                knots: d.knots,
            };
            ramp.build().during("schedule")?
        }
        _ => {
            let path = s.path("schedule").expect("present");
            let name = path.file_stem().map_or("schedule".into(), |n| n.to_string_lossy().into_owned());
            parse_schedule(&name, &read(&path)?).map_err(at(&path))?
        }
    };
    match s.f64("coupling_scale")? {
        Some(f) => schedule.rescale_couplings(f).during("schedule"),
        None => Ok(schedule),
    }
}

/// Manifold from the cache when it is current, otherwise enumerated and
/// (if a cache path is set) saved. A stale cache is replaced.
pub fn load_manifold(s: &Settings, g: &FullereneGraph, out: &mut Outputs) -> Result<GroundStateManifold> {
    let Some(path) = s.path("cache") else {
        return enumerate_ground_states(g).during("manifold");
    };
    if path.exists() {
        match read_manifold(&read(&path)?, g) {
            Ok(m) => return Ok(m),
            Err(CacheError::Stale { .. }) => {
                eprintln!("{}: cache is for a different graph; recomputing", path.display());
            }
            Err(CacheError::Corrupt(message)) => return Err(AppError::CorruptCache { path, message }),
        }
    }
    let m = enumerate_ground_states(g).during("manifold")?;
    out.write_persistent(&path, write_manifold(&m, &out.stamp()))?;
    Ok(m)
}

/// Reads a cache file strictly: a digest mismatch is an error.
pub fn read_cache_file(path: &Path, g: &FullereneGraph) -> Result<GroundStateManifold> {
    read_manifold(&read(path)?, g).map_err(|e| match e {
        CacheError::Stale { found, expected } => AppError::StaleCache { path: path.to_owned(), found, expected },
        CacheError::Corrupt(message) => AppError::CorruptCache { path: path.to_owned(), message },
    })
}

/// Target distribution and the orbit system it is scored with.
pub struct Reference {
    pub m: GroundStateManifold,
    pub state: PerturbativeState,
    pub orbits: OrbitPartition,
}

pub fn reference(s: &Settings, g: &FullereneGraph, out: &mut Outputs) -> Result<Reference> {
    let m = load_manifold(s, g, out)?;
    let state = perturbative_ground_state(&build_tunneling_matrix(&m, g).during("perturbation")?)
        .during("perturbation")?;
    let flip = s.bool("flip")?.unwrap_or(true);
    let orbits = orbit_partition(&automorphisms(g), m.states(), flip).during("topology")?;
    Ok(Reference { m, state, orbits })
}

fn max_dt(s: &Settings) -> Result<Option<f64>> {
    match s.get("max_dt") {
        Some("off") => Ok(None),
        Some(_) => match s.f64("max_dt")? {
            Some(v) if v > 0.0 => Ok(Some(v)),
            _ => Err(AppError::Config("`max-dt` must be positive or `off`".into())),
        },
        None => Ok(Some(DEFAULT_MAX_DT)),
    }
}

/// Step actually used for an anneal of length `t_a`.
pub fn effective_ds(ds: f64, max_dt: Option<f64>, t_a: f64) -> f64 {
    match max_dt {
        Some(dt) => ds.min(dt / t_a),
        None => ds,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitMass {
    pub representative: String,
    pub size: usize,
    pub p_mass: f64,
    pub q_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnealReport {
    pub t_a_ns: f64,
    pub ds: f64,
    pub steps: usize,
    pub schedule: String,
    pub delta_e: f64,
    pub d_mean: f64,
    pub f_binned: f64,
    pub f_plain: f64,
    pub manifold_mass: f64,
    pub sample_count: Option<usize>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_table: Option<Vec<OrbitMass>>,
}

impl AnnealReport {
    pub fn record(&self) -> ObservableRecord {
        ObservableRecord {
            t_a: self.t_a_ns,
            delta_e: self.delta_e,
            d_mean: self.d_mean,
            f_binned: self.f_binned,
            sample_count: self.sample_count,
        }
    }
}

/// Evolution plus scoring shared by `evolve`, `measure` and `pipeline`.
pub struct Annealer<'a> {
    pub integrator: Integrator,
    pub basis: BasisObservables,
    pub reference: &'a Reference,
    pub schedule: AnnealingSchedule,
    pub ds: f64,
    pub max_dt: Option<f64>,
    pub orbit_table: bool,
}

impl<'a> Annealer<'a> {
    pub fn new(s: &Settings, g: &FullereneGraph, reference: &'a Reference) -> Result<Self> {
        let ds = s.f64("ds")?.unwrap_or(DEFAULT_DS);
        if !(ds > 0.0 && ds <= 0.1) {
            return Err(AppError::Config(format!("`ds` = {ds}: expected 0 < ds <= 0.1")));
        }
        Ok(Annealer {
            integrator: Integrator::new(g).during("evolve")?,
            basis: BasisObservables::new(g).during("measures")?,
            reference,
            schedule: load_schedule(s)?,
            ds,
            max_dt: max_dt(s)?,
            orbit_table: s.bool("orbit_table")?.unwrap_or(false),
        })
    }

    /// One anneal, scored exactly and, with `samples = Some((count, seed))`,
    /// also from that many draws of the same final distribution.
    pub fn run(&self, t_a: f64, samples: Option<(usize, u64)>) -> Result<(AnnealReport, Option<AnnealReport>)> {
        let params = EvolutionParams::new(t_a, effective_ds(self.ds, self.max_dt, t_a), self.schedule.clone())
            .during("evolve")?;
        let p = self.integrator.evolve(&params).during("evolve")?.probabilities();
        let exact = self.score(&params, &p, None)?;
        let sampled = match samples {
            Some((count, seed)) => {
                let e = empirical(&sample(&p, count, seed).during("measures")?, p.len());
                Some(self.score(&params, &e, samples)?)
            }
            None => None,
        };
        Ok((exact, sampled))
    }

    fn score(&self, params: &EvolutionParams, p: &[f64], samples: Option<(usize, u64)>) -> Result<AnnealReport> {
        let r = self.reference;
        let q = &r.state.q;
        let on_manifold = restrict_to_manifold(p, &r.m).during("measures")?;
        let orbit_table = self.orbit_table.then(|| {
            let (pb, qb) = (r.orbits.bin(&on_manifold), r.orbits.bin(q));
            (0..r.orbits.n_orbits())
                .map(|b| OrbitMass {
                    representative: format!("{:x}", r.orbits.representatives()[b]),
                    size: r.orbits.sizes()[b],
                    p_mass: pb[b],
                    q_mass: qb[b],
                })
                .collect()
        });
        Ok(AnnealReport {
            t_a_ns: params.t_a,
            ds: params.ds,
            steps: params.steps(),
            schedule: self.schedule.name().to_owned(),
            delta_e: self.basis.residual_energy_density(p, r.m.e0()).during("measures")?,
            d_mean: self.basis.dimer_expectation(p).during("measures")?,
            f_binned: manifold_binned_fidelity(p, &r.m, q, &r.orbits).during("measures")?,
            f_plain: manifold_fidelity(p, &r.m, q).during("measures")?,
            manifold_mass: on_manifold.iter().sum(),
            sample_count: samples.map(|s| s.0),
            seed: samples.map(|s| s.1),
            orbit_table,
        })
    }

    /// Anneals over `times` concurrently; results keep sweep order. Point
    /// `k` samples with seed `seed + k`.
    pub fn sweep(
        &self,
        times: &[f64],
        samples: Option<(usize, u64)>,
    ) -> Result<Vec<(AnnealReport, Option<AnnealReport>)>> {
        times
            .par_iter()
            .enumerate()
            .map(|(k, &t)| self.run(t, samples.map(|(n, seed)| (n, seed.wrapping_add(k as u64)))))
            .collect()
    }
}

fn sampling(s: &Settings) -> Result<Option<(usize, u64)>> {
    match s.usize("samples")? {
        Some(n) => Ok(Some((n, s.u64("seed")?.unwrap_or(0)))),
        None => Ok(None),
    }
}

#[derive(Serialize)]
struct GraphSummary<'a> {
    config_digest: &'a str,
    name: String,
    graph_digest: String,
    n_vertices: usize,
    n_edges: usize,
    ferro_edges: usize,
    group_order: usize,
    vertex_orbits: usize,
    edge_orbits: usize,
}

fn distinct(labels: Vec<usize>) -> usize {
    labels.into_iter().collect::<std::collections::BTreeSet<_>>().len()
}

pub fn cmd_graph(s: &Settings, out: &mut Outputs) -> Result<()> {
    let name = s.get("name").or(s.get("graph")).ok_or_else(|| AppError::Config("missing `name`".into()))?;
    let g = if s.get("name").is_some() {
        name.parse::<BuiltinGraph>().during("topology")?.build()
    } else {
        load_graph(s)?
    };
    let text = write_edge_list(&g, &out.stamp());
    let Some(path) = s.path("out") else {
        print!("{text}");
        return Ok(());
    };
    out.write(&path, text)?;
    let group = automorphisms(&g);
    let summary = GraphSummary {
        config_digest: out.digest(),
        name: name.to_owned(),
        graph_digest: hex::encode(g.digest()),
        n_vertices: g.n_vertices(),
        n_edges: g.n_edges(),
        ferro_edges: g.edges().iter().filter(|e| e.coupling.value() < 0).count(),
        group_order: group.order(),
        vertex_orbits: distinct(group.vertex_orbits()),
        edge_orbits: distinct(group.edge_orbits(&g)),
    };
    print!("{}", to_json(&summary));
    Ok(())
}

#[derive(Serialize)]
struct ManifoldSummary<'a> {
    config_digest: &'a str,
    graph_digest: String,
    n_vertices: usize,
    e0: i32,
    count: usize,
    inversion_closed: bool,
}

pub fn cmd_gs(s: &Settings, out: &mut Outputs) -> Result<()> {
    let g = load_graph(s)?;
    let m = load_manifold(s, &g, out)?;
    let summary = ManifoldSummary {
        config_digest: out.digest(),
        graph_digest: hex::encode(g.digest()),
        n_vertices: g.n_vertices(),
        e0: m.e0(),
        count: m.len(),
        inversion_closed: m.is_inversion_closed(g.n_vertices()),
    };
    let text = to_json(&summary);
    emit(s, "out", text, out)
}

#[derive(Serialize)]
struct OrbitQ {
    representative: String,
    size: usize,
    q_state: f64,
    q_mass: f64,
}

#[derive(Serialize)]
struct ComponentSummary {
    count: usize,
    isolated: usize,
    selected: usize,
    selected_size: usize,
    /// `(size, lowest eigenvalue)` of every component with more than one state.
    nontrivial: Vec<(usize, f64)>,
}

#[derive(Serialize)]
struct PerturbReport<'a> {
    config_digest: &'a str,
    graph_digest: String,
    e0: i32,
    manifold_size: usize,
    eigenvalue: f64,
    residual: f64,
    include_global_flip: bool,
    d_mean_uniform: f64,
    d_mean_perturbative: f64,
    components: Option<ComponentSummary>,
    orbits: Vec<OrbitQ>,
}

fn perturb_report<'a>(g: &FullereneGraph, r: &Reference, digest: &'a str) -> Result<PerturbReport<'a>> {
    let q = &r.state.q;
    let masses = r.orbits.bin(q);
    let orbits = (0..r.orbits.n_orbits())
        .map(|b| OrbitQ {
            representative: format!("{:x}", r.orbits.representatives()[b]),
            size: r.orbits.sizes()[b],
            q_state: masses[b] / r.orbits.sizes()[b] as f64,
            q_mass: masses[b],
        })
        .collect();
    let components = r.state.report.as_ref().map(|c| ComponentSummary {
        count: c.sizes.len(),
        isolated: c.isolated(),
        selected: c.selected,
        selected_size: c.sizes[c.selected],
        nontrivial: c.sizes.iter().zip(&c.eigenvalues).filter(|(&n, _)| n > 1).map(|(&n, &e)| (n, e)).collect(),
    });
    let uniform = uniform_ground_state(&r.m);
    Ok(PerturbReport {
        config_digest: digest,
        graph_digest: hex::encode(g.digest()),
        e0: r.m.e0(),
        manifold_size: r.m.len(),
        eigenvalue: r.state.eigenvalue,
        residual: r.state.residual,
        include_global_flip: r.orbits.includes_global_flip(),
        d_mean_uniform: sparse_dimer_expectation(g, r.m.states(), &uniform.q).during("measures")?,
        d_mean_perturbative: sparse_dimer_expectation(g, r.m.states(), q).during("measures")?,
        components,
        orbits,
    })
}

pub fn cmd_perturb(s: &Settings, out: &mut Outputs) -> Result<()> {
    let g = load_graph(s)?;
    let r = reference(s, &g, out)?;
    let digest = out.digest().to_owned();
    let text = to_json(&perturb_report(&g, &r, &digest)?);
    emit(s, "out", text, out)
}

#[derive(Serialize)]
struct EvolveOutput<'a> {
    config_digest: &'a str,
    #[serde(flatten)]
    report: AnnealReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled: Option<AnnealReport>,
}

pub fn cmd_evolve(s: &Settings, out: &mut Outputs) -> Result<()> {
    let g = load_graph(s)?;
    let times = s.sweep()?;
    let [t_a] = times.as_slice() else {
        return Err(AppError::Config("`evolve` takes a single `ta`; use `measure` for sweeps".into()));
    };
    // Fail on size before enumerating anything.
    Integrator::new(&g).during("evolve")?;
    let r = reference(s, &g, out)?;
    let (exact, sampled) = Annealer::new(s, &g, &r)?.run(*t_a, sampling(s)?)?;
    let text = to_json(&EvolveOutput { config_digest: out.digest(), report: exact, sampled });
    emit(s, "out", text, out)
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    config_digest: &'a str,
    rows: &'a [AnnealReport],
}

fn json_sibling(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn cmd_measure(s: &Settings, out: &mut Outputs) -> Result<()> {
    let g = load_graph(s)?;
    let times = s.sweep()?;
    Integrator::new(&g).during("evolve")?;
    let r = reference(s, &g, out)?;
    let reports: Vec<AnnealReport> = Annealer::new(s, &g, &r)?
        .sweep(&times, sampling(s)?)?
        .into_iter()
        .map(|(exact, sampled)| sampled.unwrap_or(exact))
        .collect();
    let rows: Vec<ObservableRecord> = reports.iter().map(AnnealReport::record).collect();
    if let Some(path) = s.path("curve_out") {
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.t_a, r.f_binned)).collect();
        out.write(&path, write_curve(&points, &out.stamp()))?;
    }
    let csv = write_observables(&rows, &out.stamp());
    if let (Some(path), true) = (s.path("out"), s.bool("orbit_table")?.unwrap_or(false)) {
        let detail = to_json(&SweepOutput { config_digest: out.digest(), rows: &reports });
        out.write(&json_sibling(&path), detail)?;
    }
    emit(s, "out", csv, out)
}

#[derive(Serialize)]
struct FloorOutput<'a> {
    config_digest: &'a str,
    samples: usize,
    repetitions: usize,
    seed: u64,
    include_global_flip: bool,
    mean: f64,
    lower: f64,
    upper: f64,
    width: f64,
    values: Vec<f64>,
}

fn floor_json(s: &Settings, r: &Reference, digest: &str) -> Result<String> {
    let count = s.usize("samples")?.unwrap_or(DEFAULT_FLOOR_SAMPLES);
    let repetitions = s.usize("repetitions")?.unwrap_or(DEFAULT_REPETITIONS);
    let seed = s.u64("seed")?.unwrap_or(0);
    let f = fidelity_floor(&r.state.q, &r.orbits, count, repetitions, seed).during("measures")?;
    Ok(to_json(&FloorOutput {
        config_digest: digest,
        samples: count,
        repetitions,
        seed,
        include_global_flip: r.orbits.includes_global_flip(),
        mean: f.mean,
        lower: f.lower,
        upper: f.upper,
        width: f.width(),
        values: f.values,
    }))
}

pub fn cmd_floor(s: &Settings, out: &mut Outputs) -> Result<()> {
    let g = load_graph(s)?;
    let r = reference(s, &g, out)?;
    let text = floor_json(s, &r, out.digest())?;
    emit(s, "out", text, out)
}

#[derive(Serialize)]
struct Match {
    t_ns: f64,
    t_equivalent_ns: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct CalibrateOutput<'a> {
    config_digest: &'a str,
    curve_a: String,
    curve_b: String,
    matches: Vec<Match>,
}

pub fn cmd_calibrate(s: &Settings, out: &mut Outputs) -> Result<()> {
    let load = |key: &str| -> Result<_> {
        s.require(key)?;
        let path = s.path(key).expect("present");
        let name = path.file_stem().map_or(key.into(), |n| n.to_string_lossy().into_owned());
        parse_curve(&name, &read(&path)?).map_err(at(&path))
    };
    let (a, b) = (load("curve_a")?, load("curve_b")?);
    let matches = s
        .sweep()?
        .into_iter()
        .map(|t| {
            let t_b = equivalent_time(&a, &b, t).during("calibrate")?;
            Ok(Match { t_ns: t, t_equivalent_ns: t_b, ratio: t_b / t })
        })
        .collect::<Result<Vec<_>>>()?;
    let text = to_json(&CalibrateOutput {
        config_digest: out.digest(),
        curve_a: a.schedule_name().to_owned(),
        curve_b: b.schedule_name().to_owned(),
        matches,
    });
    emit(s, "out", text, out)
}

/// graph → manifold → perturbative state → sweep → floor, all under
/// `out_dir`.
pub fn cmd_pipeline(s: &Settings, out: &mut Outputs) -> Result<()> {
    let dir = s.path("out_dir").ok_or_else(|| AppError::Config("missing `out-dir`".into()))?;
    let g = load_graph(s)?;
    if let Some(path) = s.path("schedule").filter(|_| s.get("schedule") != Some("default")) {
        if !path.exists() {
            return Err(AppError::Config(format!("schedule file {} does not exist", path.display())));
        }
    }
    let times = s.sweep()?;
    Integrator::new(&g).during("evolve")?;

    out.write(&dir.join("graph.edges"), write_edge_list(&g, &out.stamp()))?;
    let mut s = s.clone();
    let cache = s.path("cache").unwrap_or_else(|| dir.join("manifold.gsm"));
    s = s.overlay([("cache", cache.to_string_lossy().into_owned())]);
    let r = reference(&s, &g, out)?;
    let digest = out.digest().to_owned();
    out.write(&dir.join("perturbation.json"), to_json(&perturb_report(&g, &r, &digest)?))?;

    let mut annealer = Annealer::new(&s, &g, &r)?;
    annealer.orbit_table = true;
    let (reports, sampled): (Vec<AnnealReport>, Vec<Option<AnnealReport>>) =
        annealer.sweep(&times, sampling(&s)?)?.into_iter().unzip();
    let rows: Vec<ObservableRecord> = reports.iter().map(AnnealReport::record).collect();
    out.write(&dir.join("observables.csv"), write_observables(&rows, &out.stamp()))?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.t_a, r.f_binned)).collect();
    out.write(&dir.join("curve.csv"), write_curve(&points, &out.stamp()))?;
    out.write(&dir.join("observables.json"), to_json(&SweepOutput { config_digest: &digest, rows: &reports }))?;

    let sampled: Vec<AnnealReport> = sampled.into_iter().flatten().collect();
    if !sampled.is_empty() {
        let rows: Vec<ObservableRecord> = sampled.iter().map(AnnealReport::record).collect();
        out.write(&dir.join("observables_sampled.csv"), write_observables(&rows, &out.stamp()))?;
    }
    if s.usize("repetitions")? != Some(0) {
        out.write(&dir.join("floor.json"), floor_json(&s, &r, &digest)?)?;
    }
    Ok(())
}
