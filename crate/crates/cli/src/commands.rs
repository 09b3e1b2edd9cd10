use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use subgap_core::almostharm::{
    build_disc_family, default_radii, newtonian_potential, PlanarField,
};
use subgap_core::certify::{certify_map, example_map, CertifyOptions};
use subgap_core::gaplab::{gap_1d_general, scaling_check, sharpness_scan, DiscGrid, HermitianPoly, PhiSource};
use subgap_core::leviform::{ame_field, ame_ratio, foliation_prepare, laplacian_comparability, IDEMPOTENCE_TOL};
use subgap_core::polyalg::{default_order, MatSeries};
use subgap_core::rootgeom::{check_cover, greedy_cluster, sublevel_decomposition, verify_sublevel, FiniteMetricSpace};
use subgap_core::typeinv::{
    critical_kernel_certificate, sharp_order, t_from_discs, t_invariant_with, TOptions, TypeReport,
};
use subgap_core::{Complex64, Error, PolyMap, Result};

use crate::io::{complex_vec, pairs, parse_amp, parse_point, read_discs, read_map, Artifact, Inputs, RunOutput};
use crate::Common;

const EXAMPLE_MAP: &str = include_str!("../data/example6.json");

fn need_positive(name: &str, v: usize) -> Result<usize> {
    if v == 0 {
        Err(Error::InvalidInput(format!("{name} must be positive")))
    } else {
        Ok(v)
    }
}

#[derive(Args)]
pub struct ClusterArgs {
    /// JSON with either "points": [[x,y],…] or "distances": [[…],…]
    #[arg(long)]
    pub points: PathBuf,
    /// Base scale L
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceJson {
    points: Option<Vec<[f64; 2]>>,
    distances: Option<Vec<Vec<f64>>>,
}

pub fn cluster(a: &ClusterArgs, _c: &Common, inputs: &mut Inputs) -> Result<RunOutput> {
    let raw: SpaceJson = serde_json::from_str(&inputs.read(&a.points)?)?;
    let space = match (raw.points, raw.distances) {
        (Some(p), None) => FiniteMetricSpace::from_points(&complex_vec(&p)?)?,
        (None, Some(d)) => FiniteMetricSpace::new(d)?,
        _ => return Err(Error::InvalidInput("give exactly one of \"points\" or \"distances\"".into())),
    };
    let cover = greedy_cluster(&space, a.scale)?;
    let check = check_cover(&space, &cover);
    let body = json!({
        "cover": cover,
        "verified": check.is_ok(),
        "violation": check.err(),
    });
    let pass = body["verified"] == true;
    let mut out = RunOutput::new(vec![Artifact::json("cluster.json", &body)]).grid("points", space.len());
    out.pass = pass;
    Ok(out)
}

#[derive(Args)]
pub struct SublevelArgs {
    /// JSON with "coefficients": [[re,im],…], constant term first
    #[arg(long)]
    pub poly: PathBuf,
    /// Samples per side of the verification grid
    #[arg(long, default_value_t = 96)]
    pub grid: usize,
}

#[derive(Deserialize)]
struct PolyJson {
    coefficients: Vec<[f64; 2]>,
}

fn read_poly(inputs: &mut Inputs, path: &PathBuf) -> Result<Vec<Complex64>> {
    let p: PolyJson = serde_json::from_str(&inputs.read(path)?)?;
    complex_vec(&p.coefficients)
}

pub fn sublevel(a: &SublevelArgs, _c: &Common, inputs: &mut Inputs) -> Result<RunOutput> {
    let coeffs = read_poly(inputs, &a.poly)?;
    let cover = sublevel_decomposition(&coeffs)?;
    let constants = verify_sublevel(&cover, need_positive("--grid", a.grid)?);
    Ok(RunOutput::new(vec![
        Artifact::json("sublevel_report.json", &constants),
        Artifact::json("sublevel_cover.json", &cover),
    ])
    .grid("verification_grid", a.grid))
}

#[derive(Args)]
pub struct Gap1dArgs {
    /// Degree d of the radial model |z|^{2d+2}
    #[arg(long, default_value_t = 1)]
    pub degree: u32,
    /// Amplitudes A, log-spaced, as LO:HI:COUNT
    #[arg(long, default_value = "1e2:1e4:5")]
    pub amp: String,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Use a general polynomial (JSON "coefficients") instead of the radial
    /// model; the weight is the Newtonian potential of |A P|²
    #[arg(long)]
    pub poly: Option<PathBuf>,
    /// Comparability constant for --poly
    #[arg(long, default_value_t = 2.0)]
    pub b: f64,
    /// Lower constant asserted for gap / A^{2/(d+1)} with --poly
    #[arg(long, default_value_t = 0.01)]
    pub kappa: f64,
}

pub fn gap1d(a: &Gap1dArgs, _c: &Common, inputs: &mut Inputs) -> Result<RunOutput> {
    let amps = parse_amp(&a.amp)?;
    let n = need_positive("--grid", a.grid)?;
    let Some(path) = &a.poly else {
        let scan = sharpness_scan(a.degree, &amps, n)?;
        let summary = json!({
            "d": a.degree,
            "slope": scan.slope,
            "expected": scan.expected,
            "saturated_points": scan.saturated(),
        });
        return Ok(RunOutput::new(vec![
            Artifact::text("gap1d.csv", scan.to_csv()),
            Artifact::json("gap1d_summary.json", &summary),
        ])
        .grid("N", n)
        .grid("amplitudes", amps));
    };
    let p = read_poly(inputs, path)?;
    let grid = DiscGrid::unit(n)?;
    let mut csv = String::from("degree,A,gap,ratio,kappa,pass,comparability_min,comparability_max\n");
    let mut all = true;
    for &amp in &amps {
        let scaled: Vec<Complex64> = p.iter().map(|c| c * amp).collect();
        let density = PlanarField::from_fn(grid.clone(), |z| subgap_core::linalg::horner(&scaled, z).norm_sqr());
        let phi = newtonian_potential(&density)?;
        let r = gap_1d_general(&scaled, a.b, PhiSource::Sampled(phi.values), n, a.kappa)?;
        all &= r.pass;
        csv.push_str(&format!(
            "{},{:e},{:e},{:e},{},{},{:e},{:e}\n",
            r.degree, amp, r.gap, r.ratio, r.kappa, r.pass, r.comparability[0], r.comparability[1]
        ));
    }
    let mut out = RunOutput::new(vec![Artifact::text("gap1d.csv", csv)])
        .grid("N", n)
        .grid("amplitudes", amps)
        .tol("comparability", a.b)
        .tol("kappa", a.kappa);
    out.pass = all;
    Ok(out)
}

#[derive(Args)]
pub struct ScalingArgs {
    /// Dilation factor R
    #[arg(long = "R", default_value_t = 2.0)]
    pub r: f64,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
}

pub fn scaling(a: &ScalingArgs, c: &Common, _inputs: &mut Inputs) -> Result<RunOutput> {
    let n = need_positive("--grid", a.grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let cplx = |rng: &mut ChaCha8Rng| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mut csv = String::from("trial,R,error\n");
    for trial in 0..a.count {
        let mut terms = Vec::new();
        for k in 1..=3u32 {
            terms.push((k, k, Complex64::new(rng.random_range(0.1..2.0), 0.0)));
            terms.push((k, 0, cplx(&mut rng)));
        }
        let phi = HermitianPoly { terms };
        let coeffs: Vec<Complex64> = (0..4).map(|_| cplx(&mut rng)).collect();
        let w = move |z: Complex64| {
            coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a) * (1.0 + z.norm_sqr())
        };
        let err = scaling_check(&phi, &w, a.r, n)?;
        csv.push_str(&format!("{trial},{},{:e}\n", a.r, err));
    }
    Ok(RunOutput::new(vec![Artifact::text("scaling.csv", csv)])
        .grid("N", n)
        .grid("R", a.r))
}

#[derive(Args)]
pub struct AmeArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Base point, inline JSON [[re,im],…] or a file
    #[arg(long)]
    pub point: String,
    /// Jet order
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Samples for the comparability ratio
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.05)]
    pub radius: f64,
}

#[derive(Serialize)]
struct SeriesTerm {
    exp: Vec<u32>,
    coef: Vec<[f64; 2]>,
}

fn series_json(s: &MatSeries) -> Vec<SeriesTerm> {
    let basis = s.basis();
    s.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.iter().any(|v| v.norm() > 0.0))
        .map(|(i, m)| SeriesTerm {
            exp: basis.exponent(i).to_vec(),
            coef: pairs(m.as_slice()),
        })
        .collect()
}

pub fn ame(a: &AmeArgs, c: &Common, inputs: &mut Inputs) -> Result<RunOutput> {
    let map = read_map(inputs, &a.map)?;
    let p = parse_point(inputs, &a.point, map.n())?;
    let field = ame_field(&map, &p, a.depth)?;
    let ratio = ame_ratio(&field, &map, a.radius, a.samples, c.seed)?;
    let body = json!({
        "point": pairs(&p),
        "order": field.order,
        "epsilon": field.epsilon,
        "nodes": field.nodes,
        "trivial": field.trivial,
        "v0": pairs(field.v0.as_slice()),
        "idempotence_residual": field.idempotence_residual(),
        "holomorphic_projection_residual": field.holomorphic_projection_residual(),
        "field": series_json(&field.field),
        "alpha": series_json(&field.alpha),
        "comparability": ratio,
    });
    Ok(RunOutput::new(vec![Artifact::json("ame.json", &body)])
        .tol("idempotence", IDEMPOTENCE_TOL)
        .grid("order", a.depth)
        .grid("samples", a.samples)
        .grid("radius", a.radius))
}

#[derive(Args)]
pub struct FoliateArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub point: String,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Transverse sample points
    #[arg(long, default_value_t = 25)]
    pub samples: usize,
    /// Leaf radius for the Laplacian comparison
    #[arg(long, default_value_t = 0.05)]
    pub radius: f64,
}

pub fn foliate(a: &FoliateArgs, _c: &Common, inputs: &mut Inputs) -> Result<RunOutput> {
    let map = read_map(inputs, &a.map)?;
    let p = parse_point(inputs, &a.point, map.n())?;
    let chart = foliation_prepare(&map, &p, a.depth, a.samples)?;
    let comparability = laplacian_comparability(&chart, &map, 64, a.radius)?;
    let body = json!({
        "point": pairs(&chart.p),
        "order": chart.order,
        "ball_radius": chart.ball_radius,
        "weierstrass_order": chart.weierstrass_order,
        "flow": chart.flow.to_json(),
        "jacobian_jet": pairs(chart.jacobian_jet.coeffs()),
        "samples": chart.samples,
        "comparability": comparability,
    });
    Ok(RunOutput::new(vec![Artifact::json("foliate.json", &body)])
        .grid("order", a.depth)
        .grid("transverse_samples", a.samples)
        .grid("radius", a.radius))
}

#[derive(Args)]
pub struct TypeArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Discs certifying the type; without them the jet search runs
    #[arg(long)]
    pub witness_discs: Option<PathBuf>,
    /// Jet depth (default 2d+4)
    #[arg(long)]
    pub depth: Option<usize>,
    /// Critical-locus samples
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Sphere samples for the isolated-zero check
    #[arg(long, default_value_t = 20000)]
    pub zero_samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub zero_tol: f64,
}

pub fn type_cmd(a: &TypeArgs, c: &Common, inputs: &mut Inputs) -> Result<RunOutput> {
    let map = read_map(inputs, &a.map)?;
    let depth = a.depth.unwrap_or_else(|| default_order(map.degree()));
    let zero = map.check_isolated_zero(a.zero_samples, a.zero_tol, c.seed)?;
    if !zero.pass {
        return Err(Error::hypothesis_at(
            format!("|F| reaches {:e} on the unit sphere", zero.min_abs),
            zero.argmin.clone(),
        ));
    }
    let cert = critical_kernel_certificate(&map, a.samples, c.seed)?;
    let mut witnesses = Vec::new();
    let t = match &a.witness_discs {
        Some(path) => {
            let discs = read_discs(inputs, path, map.n(), depth)?;
            witnesses = discs.iter().map(|d| pairs(&d.coeff(0))).collect();
            t_from_discs(&map, &discs, depth)?
        }
        None => {
            let mut opts = TOptions::for_map(&map);
            opts.depth = depth;
            opts.locus_samples = a.samples;
            opts.seed = c.seed;
            t_invariant_with(&map, &opts, &cert)?
        }
    };
    let s = sharp_order(&map, t.value, &cert)?;
    let report = TypeReport {
        n: map.n(),
        d: map.degree(),
        t: t.value,
        t_mode: t.mode.label(),
        t_incomplete: t.incomplete,
        s_num: s.s_num,
        s_den: s.s_den,
        catlin_type: s.catlin_type,
        kernel_max_dim: cert.max_kernel_dim,
        witnesses: if witnesses.is_empty() {
            t.points.iter().map(|p| pairs(&p.point)).collect()
        } else {
            witnesses
        },
    };
    let mut body = serde_json::to_value(&report)?;
    body["isolated_zero"] = serde_json::to_value(&zero)?;
    Ok(RunOutput::new(vec![Artifact::json("type.json", &body)])
        .tol("isolated_zero", a.zero_tol)
        .grid("depth", depth)
        .grid("locus_samples", a.samples)
        .grid("sphere_samples", a.zero_samples))
}

#[derive(Args)]
pub struct ContactArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Disc file; the first disc (or --index) is used
    #[arg(long)]
    pub witness_discs: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Vanishing order m of the disc Laplacian (default 2·order − 2)
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
}

pub fn contact(a: &ContactArgs, _c: &Common, inputs: &mut Inputs) -> Result<RunOutput> {
    let map = read_map(inputs, &a.map)?;
    let discs = read_discs(inputs, &a.witness_discs, map.n(), 1)?;
    let psi = discs
        .get(a.index)
        .ok_or_else(|| Error::InvalidInput(format!("no disc at index {}", a.index)))?;
    let m = match a.m {
        Some(m) => m,
        None => {
            let o = subgap_core::typeinv::disc_order_verify(&map, psi, 4 * map.degree() as usize * psi.order().max(1))?;
            match o.affine {
                subgap_core::Order::Finite(k) if k >= 1 => 2 * k - 2,
                _ => return Err(Error::InvalidInput("disc image is constant; pass --m".into())),
            }
        }
    };
    let n = need_positive("--grid", a.grid)?;
    let radii = default_radii();
    let fam = build_disc_family(&map, psi, m, &radii, n)?;
    let summary = json!({
        "m": fam.m,
        "target": fam.target(),
        "exponent": fam.exponent,
        "fit_residual": fam.fit_residual,
        "saturated": fam.saturated,
        "derivative_sup": fam.derivative_sup,
        "derivative_inf_at_0": fam.derivative_inf_at_0,
    });
    Ok(RunOutput::new(vec![
        Artifact::text("contact.csv", fam.to_csv()),
        Artifact::json("contact_summary.json", &summary),
    ])
    .grid("N", n)
    .grid("radii", radii))
}

#[derive(Args)]
pub struct CertifyArgs {
    /// Certify this map instead of the bundled example
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Print JSON instead of the text report
    #[arg(long)]
    pub json: bool,
}

pub fn certify(a: &CertifyArgs, c: &Common, inputs: &mut Inputs) -> Result<RunOutput> {
    let map = match &a.map {
        Some(p) => read_map(inputs, p)?,
        None => {
            inputs.record("example6.json (bundled)", EXAMPLE_MAP);
            let m = PolyMap::from_json_str(EXAMPLE_MAP)?;
            debug_assert_eq!(m.to_json_string(), example_map().to_json_string());
            m
        }
    };
    let opts = CertifyOptions {
        depth: a.depth,
        locus_samples: a.samples,
        seed: c.seed,
    };
    let report = certify_map(&map, &opts)?;
    let text = Artifact::text("certification.txt", report.render());
    let json = Artifact::json("certification.json", &report);
    let artifacts = if a.json { vec![json, text] } else { vec![text, json] };
    let mut out = RunOutput::new(artifacts)
        .grid("depth", a.depth)
        .grid("locus_samples", a.samples);
    out.pass = report.pass;
    Ok(out)
}
