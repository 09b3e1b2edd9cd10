use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use subgap_core::{Complex64, Error, PolyMap, Result, VecJet};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads an input file and records its hash for the manifest.
pub struct Inputs {
    hashes: BTreeMap<String, String>,
}

impl Inputs {
    pub fn new() -> Self {
        Inputs { hashes: BTreeMap::new() }
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        self.hashes.insert(path.display().to_string(), sha256_hex(&bytes));
        String::from_utf8(bytes).map_err(|_| Error::InvalidInput(format!("{} is not UTF-8", path.display())))
    }

    /// Records inline or bundled input under a label.
    pub fn record(&mut self, label: &str, contents: &str) {
        self.hashes.insert(label.to_string(), sha256_hex(contents.as_bytes()));
    }
}

pub fn read_map(inputs: &mut Inputs, path: &Path) -> Result<PolyMap> {
    PolyMap::from_json_str(&inputs.read(path)?)
}

pub fn complex_vec(v: &[[f64; 2]]) -> Result<Vec<Complex64>> {
    v.iter()
        .map(|[re, im]| {
            if re.is_finite() && im.is_finite() {
                Ok(Complex64::new(*re, *im))
            } else {
                Err(Error::InvalidInput("non-finite complex entry".into()))
            }
        })
        .collect()
}

pub fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// `--point` takes inline JSON `[[re,im],…]` or a path to such a file.
pub fn parse_point(inputs: &mut Inputs, arg: &str, n: usize) -> Result<Vec<Complex64>> {
    let text = if Path::new(arg).is_file() {
        inputs.read(Path::new(arg))?
    } else {
        inputs.record("--point", arg);
        arg.to_string()
    };
    let raw: Vec<[f64; 2]> = serde_json::from_str(&text)?;
    if raw.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: raw.len() });
    }
    complex_vec(&raw)
}

/// One witness disc: `point` is the constant term, `jet[k]` the coefficient
/// vector of `ζ^{k+1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscJson {
    pub point: Vec<[f64; 2]>,
    pub jet: Vec<Vec<[f64; 2]>>,
}

impl DiscJson {
    pub fn to_disc(&self, order: usize) -> Result<VecJet> {
        let n = self.point.len();
        if n == 0 {
            return Err(Error::InvalidInput("disc with empty point".into()));
        }
        let mut cols = vec![complex_vec(&self.point)?];
        for c in &self.jet {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.len() });
            }
            cols.push(complex_vec(c)?);
        }
        Ok(VecJet::from_powers(order.max(cols.len() - 1), n, &cols))
    }
}

pub fn read_discs(inputs: &mut Inputs, path: &Path, n: usize, order: usize) -> Result<Vec<VecJet>> {
    let discs: Vec<DiscJson> = serde_json::from_str(&inputs.read(path)?)?;
    if discs.is_empty() {
        return Err(Error::InvalidInput("witness disc file is empty".into()));
    }
    discs
        .iter()
        .map(|d| {
            if d.point.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: d.point.len() });
            }
            d.to_disc(order)
        })
        .collect()
}

/// `LO:HI:COUNT`, log-spaced and inclusive.
pub fn parse_amp(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("--amp expects LO:HI:COUNT, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..count)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
        .collect())
}

/// Record of one run, written next to its outputs.
#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub grid: BTreeMap<String, Value>,
    /// Output file name to sha256.
    pub outputs: BTreeMap<String, String>,
    pub wall_clock_seconds: f64,
}

pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn json<T: Serialize>(name: &str, value: &T) -> Self {
        let mut contents = serde_json::to_string_pretty(value).expect("serializable result");
        contents.push('\n');
        Artifact { name: name.into(), contents }
    }

    pub fn text(name: &str, contents: String) -> Self {
        Artifact { name: name.into(), contents }
    }
}

/// Everything a subcommand produced. The first artifact goes to stdout.
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub tolerances: BTreeMap<String, f64>,
    pub grid: BTreeMap<String, Value>,
    pub pass: bool,
}

impl RunOutput {
    pub fn new(artifacts: Vec<Artifact>) -> Self {
        RunOutput {
            artifacts,
            tolerances: BTreeMap::new(),
            grid: BTreeMap::new(),
            pass: true,
        }
    }

    pub fn tol(mut self, name: &str, v: f64) -> Self {
        self.tolerances.insert(name.into(), v);
        self
    }

    pub fn grid(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.grid.insert(name.into(), v.into());
        self
    }
}

/// Writes the artifacts and a single manifest listing all of them.
pub fn write_outputs(
    dir: &Path,
    subcommand: &str,
    seed: u64,
    inputs: Inputs,
    out: &RunOutput,
    started: Instant,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut outputs = BTreeMap::new();
    for a in &out.artifacts {
        fs::write(dir.join(&a.name), &a.contents)?;
        outputs.insert(a.name.clone(), sha256_hex(a.contents.as_bytes()));
    }
    let manifest = RunManifest {
        subcommand: subcommand.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        inputs: inputs.hashes,
        tolerances: out.tolerances.clone(),
        grid: out.grid.clone(),
        outputs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let path = dir.join(format!("{subcommand}.manifest.json"));
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(path)
}
