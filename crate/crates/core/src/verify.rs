//! The full property suite behind `verify-all`: a fixed list of checks for
//! every requested `(q, n)`, artifacts written to a run directory, and a
//! manifest recording each outcome and the SHA-256 of each artifact.
//!
//! All randomness is derived from one seed, so equal inputs give
//! byte-identical manifests and artifacts. Wall time is not recorded.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cliques::{census, census_consistent};
use crate::constructive::{
    clique_column_graph, equal_det_walk, random_isotropic, random_isotropic_pair, transport_cliques,
    transport_isotropic, transport_pair_nonorthogonal, transport_pair_orthogonal,
    verify_absorption_identities,
};
use crate::error::{Error, Result};
use crate::gf::{solve_special_quartic, special_quartic_combinations, Fe, Field};
use crate::graphs::{
    build_h2, build_hgl, certified_spectrum, congruence_orbits, deletion_chain_check, det_class_subgraph,
    exact_nullity, haemers_check, hgl_degree, hgl_vertex_count, petersen, spectrum, BuildBudget, GraphHandle,
    EIGEN_TOL,
};
use crate::hermat::{
    congruence_diagonalize, det_rank_one_update, det_tensor_scale, dot, inverse_rank_one_update, is_zero_vec,
    update_invertible, HermMatrix,
};
use crate::homsearch::{
    chromatic_number, find_homomorphism, find_isomorphism, is_core_with_orbits, HomSearchProblem, Outcome,
    DEFAULT_NODE_BUDGET,
};
use crate::varpolar::{projective_point_count, projective_points, variety_cardinality, variety_points};

pub const DEFAULT_SEED: u64 = 1;
/// Environment variable naming the default base directory for runs.
pub const OUT_DIR_ENV: &str = "HGL_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "hgl-runs";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SKIPPED: i32 = 3;

/// Largest graph whose spectrum the suite computes.
const SPECTRAL_LIMIT: u128 = 1200;
/// Largest `H_2` for the vertex-deletion chain.
const CHAIN_LIMIT: u128 = 300;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub qs: Vec<u32>,
    pub ns: Vec<usize>,
    pub seed: u64,
    pub budget: BuildBudget,
    pub node_budget: u64,
    /// Random instances per sampled check.
    pub samples: usize,
    /// Checks not yet started when this runs out are skipped.
    pub time_budget: Option<Duration>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            qs: vec![2, 3, 4],
            ns: vec![2],
            seed: DEFAULT_SEED,
            budget: BuildBudget::default(),
            node_budget: DEFAULT_NODE_BUDGET,
            samples: 50,
            time_budget: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub q: u32,
    pub n: usize,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    /// Relative to the run directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub q: u32,
    pub modulus: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub version: String,
    pub seed: u64,
    pub qs: Vec<u32>,
    pub ns: Vec<usize>,
    pub budget_vertices: u128,
    pub node_budget: u64,
    pub samples: usize,
    pub fields: Vec<FieldRecord>,
    pub checks: Vec<CheckRecord>,
    pub artifacts: Vec<ArtifactRecord>,
}

impl RunManifest {
    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    /// 0 when everything passed, 1 on any failure, 3 when only skips remain.
    pub fn exit_code(&self) -> i32 {
        if self.count(Status::Fail) > 0 {
            EXIT_FAILURE
        } else if self.count(Status::Skipped) > 0 {
            EXIT_SKIPPED
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}

/// Base directory from `explicit`, else `HGL_OUT_DIR`, else `hgl-runs`.
pub fn base_out_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Creates `base/run-<unix seconds>-seed<seed>`, suffixed if it exists.
pub fn fresh_run_dir(base: &Path, seed: u64) -> Result<PathBuf> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let stem = format!("run-{secs}-seed{seed}");
    let mut dir = base.join(&stem);
    let mut k = 1;
    while dir.exists() {
        k += 1;
        dir = base.join(format!("{stem}-{k}"));
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

struct Verdict {
    holds: bool,
    detail: String,
    artifacts: Vec<(String, Vec<u8>)>,
}

impl Verdict {
    fn new(holds: bool, detail: impl Into<String>) -> Verdict {
        Verdict { holds, detail: detail.into(), artifacts: Vec::new() }
    }

    fn with(mut self, name: String, bytes: Vec<u8>) -> Verdict {
        self.artifacts.push((name, bytes));
        self
    }
}

struct Recorder<'a> {
    dir: &'a Path,
    start: Instant,
    time_budget: Option<Duration>,
    checks: Vec<CheckRecord>,
    artifacts: Vec<ArtifactRecord>,
}

impl Recorder<'_> {
    fn run(&mut self, name: &str, q: u32, n: usize, check: impl FnOnce() -> Result<Verdict>) -> Result<()> {
        let out_of_time = self.time_budget.is_some_and(|b| self.start.elapsed() > b);
        let (status, detail) = if out_of_time {
            (Status::Skipped, "time budget exhausted".to_string())
        } else {
            match check() {
                Ok(v) => {
                    for (file, bytes) in v.artifacts {
                        self.write(&file, &bytes)?;
                    }
                    (if v.holds { Status::Pass } else { Status::Fail }, v.detail)
                }
                Err(e @ Error::Budget { .. }) => (Status::Skipped, e.to_string()),
                Err(e) => (Status::Fail, e.to_string()),
            }
        };
        self.checks.push(CheckRecord { name: name.to_string(), q, n, status, detail });
        Ok(())
    }

    fn write(&mut self, file: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(file), bytes)?;
        self.artifacts.push(ArtifactRecord {
            path: file.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }
}

fn rng_for(seed: u64, q: u32, n: usize, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((q as u64) << 32) | ((n as u64) << 16) | salt);
    rng
}

fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn within(what: &str, required: u128, limit: u128) -> Result<()> {
    if required > limit {
        return Err(Error::Budget { what: what.to_string(), required, budget: limit });
    }
    Ok(())
}

/// Runs the suite, writing artifacts and `manifest.json` into `out_dir`.
impl VerifyConfig {
    /// Checks the parameters and builds the fields, without touching the disk.
    pub fn validate(&self) -> Result<Vec<Field>> {
        if self.qs.is_empty() {
            return Err(Error::Invalid("empty q list".into()));
        }
        if self.ns.is_empty() {
            return Err(Error::Invalid("empty n list".into()));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 2) {
            return Err(Error::Invalid(format!("n = {n}, need n >= 2")));
        }
        if self.samples == 0 || self.node_budget == 0 {
            return Err(Error::Invalid("samples and node budget must be positive".into()));
        }
        self.qs.iter().map(|&q| Field::new(q)).collect()
    }
}

pub fn verify_all(config: &VerifyConfig, command: &[String], out_dir: &Path) -> Result<RunManifest> {
    let fields = config.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut rec = Recorder {
        dir: out_dir,
        start: Instant::now(),
        time_budget: config.time_budget,
        checks: Vec::new(),
        artifacts: Vec::new(),
    };
    for f in &fields {
        for &n in &config.ns {
            suite(&mut rec, config, f, n)?;
        }
    }
    let manifest = RunManifest {
        command: command.to_vec(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        qs: config.qs.clone(),
        ns: config.ns.clone(),
        budget_vertices: config.budget.max_vertices,
        node_budget: config.node_budget,
        samples: config.samples,
        fields: fields.iter().map(|f| FieldRecord { q: f.q(), modulus: f.spec().modulus_string() }).collect(),
        checks: rec.checks,
        artifacts: rec.artifacts,
    };
    fs::write(out_dir.join("manifest.json"), manifest.to_json())?;
    Ok(manifest)
}

fn suite(rec: &mut Recorder, cfg: &VerifyConfig, f: &Field, n: usize) -> Result<()> {
    let q = f.q();
    let samples = cfg.samples;
    let seed = cfg.seed;
    rec.run("field-tables", q, n, || field_tables(f))?;
    rec.run("rank-one-calculus", q, n, || rank_one_calculus(f, n, samples, rng_for(seed, q, n, 1)))?;
    rec.run("variety-counts", q, n, || variety_counts(f, n, cfg, rng_for(seed, q, n, 2)))?;
    let mut graph: Option<GraphHandle> = None;
    rec.run("hgl-graph", q, n, || {
        let g = build_hgl(f, n, &cfg.budget)?;
        let ok = g.order() as u128 == hgl_vertex_count(q, n)
            && g.regular_degree().map(|d| d as u128) == Some(hgl_degree(q, n));
        let detail = format!("{} vertices, degree {:?}", g.order(), g.regular_degree());
        let edges = g.to_edge_list_string().into_bytes();
        graph = Some(g);
        Ok(Verdict::new(ok, detail).with(format!("hgl-q{q}-n{n}.edges"), edges))
    })?;
    rec.run("clique-census", q, n, || clique_census(f, n, samples, rng_for(seed, q, n, 3)))?;
    if let Some(g) = &graph {
        rec.run("spectral-identities", q, n, || spectral_identities(g, q, n))?;
        rec.run("det-classes", q, n, || det_classes(g, f))?;
    }
    if q >= 4 {
        rec.run("equal-det-walks", q, n, || walks(f, n, samples, rng_for(seed, q, n, 4)))?;
    }
    rec.run("transporters", q, n, || transporters(f, n, samples, rng_for(seed, q, n, 5)))?;
    if n == 2 {
        rec.run("h2-spectrum", q, n, || h2_spectrum(f, &cfg.budget))?;
        rec.run("deletion-chain", q, n, || {
            within("deletion chain on H2", (q as u128).pow(4), CHAIN_LIMIT)?;
            let r = deletion_chain_check(f, &cfg.budget)?;
            Ok(Verdict::new(r.ok, format!("{} deletions", r.deleted)))
        })?;
        if q >= 3 {
            rec.run("clique-column-graph", q, n, || clique_columns(q, cfg.node_budget))?;
        }
        if q == 4 {
            rec.run("absorption-identities", q, n, || absorption_identities(f))?;
        }
        if let Some(g) = graph.as_ref().filter(|_| q <= 3) {
            rec.run("chromatic-exceeds-q", q, n, || chromatic_exceeds_q(g, q, cfg.node_budget))?;
        }
        if let Some(g) = graph.as_ref().filter(|_| q == 2) {
            rec.run("petersen", q, n, || petersen_checks(g, f, cfg.node_budget))?;
        }
    }
    Ok(())
}

fn field_tables(f: &Field) -> Result<Verdict> {
    let q = f.q() as usize;
    let involution = f.elements().all(|x| f.conj(f.conj(x)) == x);
    let norm_fibers = f.fixed_nonzero().iter().all(|&l| f.norm_fiber(l).len() == q + 1);
    let trace_fibers =
        f.fixed_field().iter().all(|&t| f.elements().filter(|&x| f.trace(x) == t).count() == q);
    let ok = involution && norm_fibers && trace_fibers && f.fixed_field().len() == q;
    Ok(Verdict::new(ok, format!("modulus {}", f.spec().modulus_string())))
}

fn random_vector(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<Fe> {
    loop {
        let x: Vec<Fe> = (0..n).map(|_| f.random(rng)).collect();
        if !is_zero_vec(&x) {
            return x;
        }
    }
}

fn rank_one_calculus(f: &Field, n: usize, samples: usize, mut rng: ChaCha8Rng) -> Result<Verdict> {
    let mut bad = 0;
    for _ in 0..samples {
        let a = HermMatrix::random_invertible(f, n, &mut rng);
        let x = random_vector(f, n, &mut rng);
        let l = f.random_fixed(&mut rng);
        let direct = a.update(&x, l)?;
        let mut ok = det_rank_one_update(&a, &x, l)? == direct.det()?
            && update_invertible(&a, &x, l)? == direct.is_invertible();
        if direct.is_invertible() {
            ok &= inverse_rank_one_update(&a, &x, l)? == direct.inverse()?;
        }
        let xs: Vec<Vec<Fe>> = (0..n).map(|_| random_vector(f, n, &mut rng)).collect();
        let alpha: Vec<Fe> = (0..n).map(|_| f.random_fixed(&mut rng)).collect();
        let (lhs, rhs) = det_tensor_scale(&alpha, &xs, f)?;
        ok &= lhs == rhs;
        bad += !ok as usize;
    }
    Ok(Verdict::new(bad == 0, format!("{samples} instances, {bad} mismatches")))
}

fn variety_counts(f: &Field, n: usize, cfg: &VerifyConfig, mut rng: ChaCha8Rng) -> Result<Verdict> {
    let q = f.q();
    within("projective points", projective_point_count(q, n), cfg.budget.max_vertices)?;
    let mut bad = Vec::new();
    let per_rank = cfg.samples.min(10);
    for r in 0..=n {
        for _ in 0..per_rank {
            let mut d: Vec<Fe> = (0..r).map(|_| random_fixed_nonzero(f, &mut rng)).collect();
            d.resize(n, Fe::ZERO);
            let p = HermMatrix::random_invertible(f, n, &mut rng);
            let a = HermMatrix::diagonal(f, &d)?.congruence(p.matrix())?;
            let expected = variety_cardinality(n, r, q)?;
            let found = variety_points(&a).len() as u128;
            if a.matrix().rank() != r || found != expected {
                bad.push(format!("rank {r}: {found} != {expected}"));
            }
        }
    }
    let detail =
        if bad.is_empty() { format!("ranks 0..={n}, {per_rank} forms each") } else { bad.join("; ") };
    Ok(Verdict::new(bad.is_empty(), detail))
}

fn random_fixed_nonzero(f: &Field, rng: &mut ChaCha8Rng) -> Fe {
    loop {
        let v = f.random_fixed(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

fn clique_census(f: &Field, n: usize, samples: usize, mut rng: ChaCha8Rng) -> Result<Verdict> {
    let q = f.q() as u128;
    let points = projective_point_count(f.q(), n);
    let degree = hgl_degree(f.q(), n);
    let mut bad = 0;
    let identity = census(&HermMatrix::identity(f, n))?;
    for k in 0..samples.min(20) {
        let a =
            if k == 0 { HermMatrix::identity(f, n) } else { HermMatrix::random_invertible(f, n, &mut rng) };
        let c = census(&a)?;
        let counts = c.counts;
        let ok = census_consistent(f, &c)
            && counts.degree == degree
            && counts.num_q + counts.num_q_minus_1 == points
            && counts.num_q * (q - 1) + counts.num_q_minus_1 * (q - 2) == degree;
        bad += !ok as usize;
    }
    let detail = format!(
        "{} q-cliques, {} (q-1)-cliques, degree {degree}; {bad} inconsistent",
        identity.counts.num_q, identity.counts.num_q_minus_1
    );
    Ok(Verdict::new(bad == 0, detail).with(format!("census-q{}-n{n}.json", f.q()), json_bytes(&identity)))
}

fn spectral_identities(g: &GraphHandle, q: u32, n: usize) -> Result<Verdict> {
    within("spectrum", g.order() as u128, SPECTRAL_LIMIT)?;
    let report = spectrum(g);
    let degree = g.regular_degree().ok_or_else(|| Error::Invalid("graph is not regular".into()))?;
    let top = report.sorted_values().first().copied().unwrap_or(0.0);
    let components = g.components().len();
    let top_mult = exact_nullity(g, degree as i64);
    let ok = report.trace_zero && (top - degree as f64).abs() < EIGEN_TOL && top_mult == components;
    let detail = format!(
        "trace zero {}, top eigenvalue {top:.6} with multiplicity {top_mult}, {} distinct values",
        report.trace_zero,
        report.eigenvalues.len()
    );
    Ok(Verdict::new(ok, detail).with(format!("spectrum-q{q}-n{n}.json"), json_bytes(&report)))
}

fn det_classes(g: &GraphHandle, f: &Field) -> Result<Verdict> {
    let mut sizes = Vec::new();
    let mut connected = true;
    for &l in f.fixed_nonzero() {
        let c = det_class_subgraph(g, f, l)?;
        connected &= c.is_connected();
        sizes.push(c.vertices.len());
    }
    let equal = sizes.windows(2).all(|w| w[0] == w[1]);
    Ok(Verdict::new(connected && equal, format!("class sizes {sizes:?}, all connected {connected}")))
}

/// Random invertible matrix with determinant `l`, by rescaling one row and
/// column of a random one with a norm root.
fn random_with_det(f: &Field, n: usize, l: Fe, rng: &mut ChaCha8Rng) -> Result<HermMatrix> {
    let a = HermMatrix::random_invertible(f, n, rng);
    let d = f.norm_root(f.div(l, a.det()?)).expect("ratio of fixed values is fixed");
    let mut diag = vec![Fe::ONE; n];
    diag[0] = d;
    a.congruence(&crate::hermat::Matrix::diagonal(f, &diag))
}

fn walks(f: &Field, n: usize, samples: usize, mut rng: ChaCha8Rng) -> Result<Verdict> {
    let mut bad = 0;
    let mut longest = 0;
    let mut first = None;
    let count = samples.min(30);
    for _ in 0..count {
        let a1 = HermMatrix::random_invertible(f, n, &mut rng);
        let a2 = random_with_det(f, n, a1.det()?, &mut rng)?;
        let w = equal_det_walk(&a1, &a2)?;
        let ok = w.verify() && w.vertices.first() == Some(&a1) && w.vertices.last() == Some(&a2);
        bad += !ok as usize;
        longest = longest.max(w.len());
        first.get_or_insert_with(|| w.to_json(f));
    }
    let v = Verdict::new(bad == 0, format!("{count} pairs, longest walk {longest}, {bad} invalid"));
    Ok(match first {
        Some(j) => v.with(format!("walk-q{}-n{n}.json", f.q()), json_bytes(&j)),
        None => v,
    })
}

fn transporters(f: &Field, n: usize, samples: usize, mut rng: ChaCha8Rng) -> Result<Verdict> {
    let mut done = 0;
    let mut bad = 0;
    let mut tally = |ok: bool| {
        done += 1;
        bad += !ok as usize;
    };
    for _ in 0..samples {
        let x = random_isotropic(f, n, &mut rng);
        let y = random_isotropic(f, n, &mut rng);
        tally(transport_isotropic(f, &x, &y)?.holds());
        let (x1, y1) = random_isotropic_pair(f, n, false, &mut rng)?;
        let (x2, y2) = random_isotropic_pair(f, n, false, &mut rng)?;
        tally(transport_pair_nonorthogonal(f, &x1, &y1, &x2, &y2)?.holds());
        tally(clique_pair(f, n, false, &mut rng)?);
        if n >= 4 {
            let (x1, y1) = random_isotropic_pair(f, n, true, &mut rng)?;
            let (x2, y2) = random_isotropic_pair(f, n, true, &mut rng)?;
            tally(transport_pair_orthogonal(f, &x1, &y1, &x2, &y2)?.holds());
            tally(clique_pair(f, n, true, &mut rng)?);
        }
    }
    Ok(Verdict::new(bad == 0, format!("{done} certificates, {bad} failing")))
}

/// Transports a random pair of q-cliques at one random vertex onto a pair
/// at another. Directions `Q z` with `A = Q Q*` and `z` isotropic give
/// q-cliques, and `A`-orthogonality of the pair is `z* w = 0`.
fn clique_pair(f: &Field, n: usize, orthogonal: bool, rng: &mut ChaCha8Rng) -> Result<bool> {
    let mut side = || -> Result<(HermMatrix, Vec<Fe>, Vec<Fe>)> {
        let a = HermMatrix::random_invertible(f, n, rng);
        let q = congruence_diagonalize(&a).p;
        let (z, w) = random_isotropic_pair(f, n, orthogonal, rng)?;
        Ok((a, q.mul_vec(&z)?, q.mul_vec(&w)?))
    };
    let (a1, x1, y1) = side()?;
    let (a2, x2, y2) = side()?;
    Ok(transport_cliques(&a1, &x1, &y1, &a2, &x2, &y2)?.holds())
}

fn h2_spectrum(f: &Field, budget: &BuildBudget) -> Result<Verdict> {
    let q = f.q() as i64;
    within("H2 spectrum", (q as u128).pow(4), SPECTRAL_LIMIT)?;
    let g = build_h2(f, budget)?;
    let k = q * q * q - q * q + q - 1;
    let s = -q * q + q - 1;
    let expected = vec![(k, 1), (q - 1, (q.pow(4) - k - 1) as usize), (s, k as usize)];
    let report = certified_spectrum(&g, &[k, q - 1, s]);
    let got = report.exact();
    let ok = got.as_ref() == Some(&expected);
    Ok(Verdict::new(ok, format!("expected {expected:?}, got {got:?}")))
}

fn clique_columns(q: u32, node_budget: u64) -> Result<Verdict> {
    let c = clique_column_graph(q)?;
    let mut ok = c.proper;
    let mut detail = format!("{} vertices, cyclic colouring proper {}", c.graph.order(), c.proper);
    if q <= 4 {
        let chi = chromatic_number(&c.graph, node_budget)?;
        ok &= chi.exact == Some(q as usize);
        detail.push_str(&format!(", chromatic number {:?}", chi.exact));
    }
    let body = serde_json::json!({
        "q": q,
        "order": c.graph.order(),
        "edges": c.graph.edges().collect::<Vec<_>>(),
        "coloring": c.coloring,
        "proper": c.proper,
    });
    Ok(Verdict::new(ok, detail).with(format!("clique-columns-q{q}.json"), json_bytes(&body)))
}

fn absorption_identities(f: &Field) -> Result<Verdict> {
    let roots = solve_special_quartic(f)?;
    let combos = special_quartic_combinations(f, &roots);
    let pts = projective_points(f, 2);
    let (mut cases, mut bad) = (0, 0);
    for x1 in pts.iter().map(|p| p.coords()).filter(|x| dot(f, x, x).is_zero()) {
        for x2 in pts.iter().map(|p| p.coords()) {
            let (x22, x21) = (dot(f, x2, x2), dot(f, x2, x1));
            if x22.is_zero() || x21.is_zero() {
                continue;
            }
            for a2 in f.nonzero_elements() {
                for &t in &roots {
                    let a1 = f.mul(f.mul(a2, f.div(x22, x21)), t);
                    cases += 1;
                    bad += !verify_absorption_identities(f, x1, x2, a1, a2)?.holds as usize;
                }
            }
        }
    }
    let ok = roots.len() == 4 && combos.len() == 11 && bad == 0 && cases > 0;
    Ok(Verdict::new(
        ok,
        format!(
            "{} quartic roots, {} combinations, {cases} instances, {bad} failing",
            roots.len(),
            combos.len()
        ),
    ))
}

fn chromatic_exceeds_q(g: &GraphHandle, q: u32, node_budget: u64) -> Result<Verdict> {
    let p = HomSearchProblem::coloring(g.clone(), q as usize).with_budget(node_budget)?;
    let r = find_homomorphism(&p);
    match r.outcome {
        Outcome::BudgetExhausted => Err(Error::Budget {
            what: format!("{q}-colouring search"),
            required: r.nodes as u128,
            budget: node_budget as u128,
        }),
        o => {
            Ok(Verdict::new(o == Outcome::Refuted, format!("{q}-colouring {:?} after {} nodes", o, r.nodes)))
        }
    }
}

fn petersen_checks(g: &GraphHandle, f: &Field, node_budget: u64) -> Result<Verdict> {
    let iso = find_isomorphism(g, &petersen(), node_budget)?;
    let orbits = congruence_orbits(g, f)?;
    let core = is_core_with_orbits(g, &orbits, node_budget)?;
    let haemers = haemers_check(g, 3)?;
    let ok = matches!(iso.outcome, Outcome::Found(_))
        && core.is_core() == Some(true)
        && haemers.exact_sum == Some(0);
    Ok(Verdict::new(
        ok,
        format!(
            "isomorphic {}, core {:?} ({} orbit), spectral sum at 3 colours {:?}; q = 2 checked by search, outside the general q >= 4 bound",
            iso.outcome.mapping().is_some(),
            core.is_core(),
            orbits.len(),
            haemers.exact_sum
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig { qs: vec![2, 3], ns: vec![2], samples: 5, ..VerifyConfig::default() }
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cmd = vec!["verify-all".to_string()];
        let m1 = verify_all(&small(), &cmd, &dir.path().join("a")).unwrap();
        let m2 = verify_all(&small(), &cmd, &dir.path().join("b")).unwrap();
        assert_eq!(m1.exit_code(), EXIT_OK, "{:#?}", m1.checks);
        assert_eq!(m1, m2);
        let a = fs::read(dir.path().join("a/manifest.json")).unwrap();
        let b = fs::read(dir.path().join("b/manifest.json")).unwrap();
        assert_eq!(a, b);
        for art in &m1.artifacts {
            let bytes = fs::read(dir.path().join("a").join(&art.path)).unwrap();
            assert_eq!(hex::encode(Sha256::digest(&bytes)), art.sha256);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let dir = tempfile::tempdir().unwrap();
        for cfg in [
            VerifyConfig { qs: vec![], ..small() },
            VerifyConfig { ns: vec![], ..small() },
            VerifyConfig { qs: vec![6], ..small() },
            VerifyConfig { ns: vec![1], ..small() },
        ] {
            assert!(verify_all(&cfg, &[], dir.path()).is_err());
        }
    }

    #[test]
    fn budget_skips_are_not_failures() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = VerifyConfig {
            qs: vec![3],
            budget: BuildBudget { max_vertices: 20, ..BuildBudget::default() },
            ..small()
        };
        let m = verify_all(&cfg, &[], dir.path()).unwrap();
        assert!(m.count(Status::Skipped) > 0);
        assert_eq!(m.count(Status::Fail), 0, "{:#?}", m.checks);
        assert_eq!(m.exit_code(), EXIT_SKIPPED);
    }

    #[test]
    fn fresh_dirs_do_not_collide() {
        let dir = tempfile::tempdir().unwrap();
        let a = fresh_run_dir(dir.path(), 7).unwrap();
        let b = fresh_run_dir(dir.path(), 7).unwrap();
        assert_ne!(a, b);
        assert!(a.is_dir() && b.is_dir());
    }
}
