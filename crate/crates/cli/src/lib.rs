//! Argument grammars and command implementations behind the `steerkit` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use ndarray::{ArrayD, Ix5};
use serde::Serialize;

use steerkit::basis::{angular_basis, full_basis, sample_basis, BandlimitPolicy, BlockWeights, RadialProfile};
use steerkit::conv::{equivariance_error, interior_probe, probe_margin};
use steerkit::field::FieldType;
use steerkit::group::{Group, GroupElement};
use steerkit::oracle::{constraint_residual, numeric_basis, sample_on_circle, subspace_distance, AngularFunctions};
use steerkit::representation::{
    induced_so2_to_o2, irreps, quotient_representation, regular_representation, IrrepId, Representation,
};
use steerkit::tensor_io::{read_tensor, write_tensor};
use steerkit::{Basis, Error};

pub const SEED_VAR: &str = "STEERKIT_SEED";

/// A malformed argument; the binary maps it to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

/// `so2 | o2 | cN | dN[:beta] | flip[:beta]`.
pub fn parse_group(spec: &str) -> anyhow::Result<Group> {
    let s = spec.trim().to_ascii_lowercase();
    let (head, beta) = match s.split_once(':') {
        Some((h, b)) => match b.parse::<f64>() {
            Ok(v) if v.is_finite() => (h, Some(v)),
            _ => return usage(format!("bad reflection axis in group `{spec}`")),
        },
        None => (s.as_str(), None),
    };
    let order = |digits: &str| match digits.parse::<u32>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => usage(format!("bad group order in `{spec}`")),
    };
    let group = match head {
        "so2" if beta.is_none() => Group::SO2,
        "o2" if beta.is_none() => Group::O2,
        "flip" => Group::flip(beta.unwrap_or(0.0)),
        _ if head.starts_with('c') && beta.is_none() => Group::cyclic(order(&head[1..])?),
        _ if head.starts_with('d') => Group::dihedral(order(&head[1..])?, beta.unwrap_or(0.0)),
        _ => return usage(format!("unknown group `{spec}`")),
    };
    Ok(group)
}

/// Resolves `irrep:k` to the only irrep of frequency `k`.
fn irrep_by_frequency(group: Group, k: u32) -> anyhow::Result<IrrepId> {
    let candidates: Vec<IrrepId> = (0..=1).filter_map(|i| IrrepId::new(group, i, k).ok()).collect();
    match candidates.as_slice() {
        [one] => Ok(*one),
        [] => usage(format!("{group} has no irrep of frequency {k}")),
        _ => usage(format!("irrep:{k} is ambiguous for {group}; use irrep:i,{k}")),
    }
}

/// Comma list of `triv | irrep:k | irrep:i,k | reg | quot:H | ind_so2:k`.
///
/// A bare integer after `irrep:i` supplies the frequency of that irrep.
pub fn parse_reps(group: Group, spec: &str) -> anyhow::Result<Vec<Representation>> {
    let tokens: Vec<&str> = spec.split(',').map(str::trim).collect();
    let mut reps = Vec::new();
    let mut t = 0;
    while t < tokens.len() {
        let tok = tokens[t];
        t += 1;
        let (name, arg) = tok.split_once(':').unwrap_or((tok, ""));
        let int = |s: &str| s.parse::<u32>().map_err(|_| UsageError(format!("bad integer in `{tok}`")));
        let rep = match name {
            "triv" if arg.is_empty() => Representation::trivial(group),
            "reg" if arg.is_empty() => regular_representation(group).map_err(|e| UsageError(e.to_string()))?,
            "irrep" => {
                let first = int(arg)?;
                let next = tokens.get(t).filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()));
                let id = match next {
                    Some(k) => {
                        t += 1;
                        let i = u8::try_from(first).map_err(|_| UsageError(format!("bad flip index in `{tok}`")))?;
                        IrrepId::new(group, i, int(k)?).map_err(|e| UsageError(e.to_string()))?
                    }
                    None => irrep_by_frequency(group, first)?,
                };
                Representation::irrep(id)
            }
            "quot" => {
                let sub = parse_group(arg)?;
                quotient_representation(group, sub).map_err(|e| UsageError(e.to_string()))?
            }
            "ind_so2" if group == Group::O2 => induced_so2_to_o2(int(arg)?),
            "ind_so2" => return usage(format!("ind_so2 needs group o2, got {group}")),
            _ => return usage(format!("unknown representation `{tok}`")),
        };
        reps.push(rep);
    }
    Ok(reps)
}

/// `default | factor:F | rings:c0,c1,...`.
pub fn parse_policy(spec: &str, size: usize) -> anyhow::Result<BandlimitPolicy> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match name {
        "default" if arg.is_empty() => Ok(BandlimitPolicy::default_for(size)),
        "factor" => match arg.parse::<f64>() {
            Ok(f) if f.is_finite() && f >= 0.0 => Ok(BandlimitPolicy::Factor(f)),
            _ => usage(format!("bad policy factor `{arg}`")),
        },
        "rings" => arg
            .split(',')
            .map(|c| c.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map(BandlimitPolicy::PerRing)
            .or_else(|_| usage(format!("bad ring cutoffs `{arg}`"))),
        _ => usage(format!("unknown policy `{spec}`")),
    }
}

/// `default | uniform:SIGMA`.
pub fn parse_profile(spec: &str, size: usize) -> anyhow::Result<RadialProfile> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match name {
        "default" if arg.is_empty() => Ok(RadialProfile::default_for(size)),
        "uniform" => match arg.parse::<f64>() {
            Ok(s) if s > 0.0 => RadialProfile::uniform(size, s).map_err(|e| UsageError(e.to_string()).into()),
            _ => usage(format!("bad profile width `{arg}`")),
        },
        _ => usage(format!("unknown profile `{spec}`")),
    }
}

/// `--seed`, else `STEERKIT_SEED`, else 0.
pub fn resolve_seed(flag: Option<u64>) -> anyhow::Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().or_else(|_| usage(format!("{SEED_VAR} is not an integer: `{v}`"))),
        Err(_) => Ok(0),
    }
}

/// CSV of angular basis sizes for every irrep pair; frequencies and `|μ|` are
/// both limited by `max_freq`.
pub fn dims_table(group: Group, max_freq: u32) -> anyhow::Result<String> {
    let list = irreps(group, max_freq);
    let mut out = String::from("psi_out,psi_in,d\n");
    for &po in &list {
        for &pi in &list {
            let d = angular_basis(group, po, pi, max_freq)?.len();
            writeln!(out, "{},{},{}", po.label(), pi.label(), d)?;
        }
    }
    Ok(out)
}

pub fn cmd_dims(group: Group, max_freq: u32, output: Option<&Path>) -> anyhow::Result<()> {
    let table = dims_table(group, max_freq)?;
    match output {
        Some(p) => fs::write(p, table).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(table.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct RingMeta {
    radius: f64,
    sigma: f64,
}

#[derive(Serialize)]
struct ElementMeta {
    index: usize,
    ring: usize,
    radius: f64,
    out_field: usize,
    in_field: usize,
    out_irrep: String,
    in_irrep: String,
    mu: i32,
    gamma: f64,
    s: i8,
    frequency: u32,
    norm: f64,
}

#[derive(Serialize)]
struct BasisMeta {
    format: &'static str,
    shape: Vec<usize>,
    axes: [&'static str; 5],
    ordering: &'static str,
    group: String,
    rho_in: String,
    rho_out: String,
    in_fields: Vec<String>,
    out_fields: Vec<String>,
    size: usize,
    max_freq: u32,
    policy: String,
    rings: Vec<RingMeta>,
    elements: Vec<ElementMeta>,
}

pub struct BasisRequest<'a> {
    pub group: Group,
    pub rho_in: &'a str,
    pub rho_out: &'a str,
    pub size: usize,
    pub profile: &'a str,
    pub policy: &'a str,
}

/// Builds the sampled basis for a request.
pub fn build_basis(req: &BasisRequest<'_>) -> anyhow::Result<Basis> {
    if req.size.is_multiple_of(2) {
        return usage(format!("kernel size must be odd, got {}", req.size));
    }
    let ti = FieldType::new(req.group, parse_reps(req.group, req.rho_in)?)?;
    let to = FieldType::new(req.group, parse_reps(req.group, req.rho_out)?)?;
    let profile = parse_profile(req.profile, req.size)?;
    let policy = parse_policy(req.policy, req.size)?;
    let sym = full_basis(to.representation(), ti.representation(), policy.max_cutoff(&profile))?;
    sample_basis(&sym, req.size, &profile, &policy).map_err(|e| match e {
        Error::InvalidArgument(m) => UsageError(m).into(),
        e => e.into(),
    })
}

/// Writes the basis tensor `(d, c_out, c_in, S, S)` and a `.json` sidecar.
pub fn cmd_basis(req: &BasisRequest<'_>, output: &Path) -> anyhow::Result<()> {
    let basis = build_basis(req)?;
    let tensor = basis.tensor().clone().into_dyn();
    let mut buf = Vec::new();
    write_tensor(&mut buf, &tensor)?;
    fs::write(output, buf).with_context(|| format!("writing {}", output.display()))?;

    let names = |r: &Representation| r.components().iter().map(|c| c.name().to_string()).collect::<Vec<_>>();
    let meta = BasisMeta {
        format: "STKT",
        shape: tensor.shape().to_vec(),
        axes: ["element", "out_channel", "in_channel", "row", "col"],
        ordering: "field pair (out-major), then ring, then angular element",
        group: req.group.label(),
        rho_in: req.rho_in.to_string(),
        rho_out: req.rho_out.to_string(),
        in_fields: names(basis.rho_in()),
        out_fields: names(basis.rho_out()),
        size: basis.size(),
        max_freq: basis.symbolic().max_freq(),
        policy: req.policy.to_string(),
        rings: basis
            .profile()
            .rings()
            .iter()
            .map(|r| RingMeta {
                radius: r.radius,
                sigma: r.sigma,
            })
            .collect(),
        elements: basis
            .elements()
            .iter()
            .enumerate()
            .map(|(index, e)| ElementMeta {
                index,
                ring: e.ring,
                radius: e.radius,
                out_field: e.out_field,
                in_field: e.in_field,
                out_irrep: e.out_irrep.label(),
                in_irrep: e.in_irrep.label(),
                mu: e.angular.mu,
                gamma: e.angular.gamma.value(),
                s: e.angular.s,
                frequency: e.frequency(),
                norm: e.norm,
            })
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&meta)?;
    json.push('\n');
    let side = sidecar_path(output);
    fs::write(&side, json).with_context(|| format!("writing {}", side.display()))
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Min-max scaled 8-bit binary PGM; a constant image maps to 0.
pub fn pgm(image: &ndarray::ArrayView2<'_, f64>) -> Vec<u8> {
    let (h, w) = image.dim();
    let lo = image.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = image.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for &v in image.iter() {
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
        out.push((255.0 * t).round() as u8);
    }
    out
}

/// Writes `{prefix}_{o}_{i}.pgm` for every `(c_out, c_in)` entry of one element.
pub fn cmd_render(basis_file: &Path, element: usize, prefix: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let bytes = fs::read(basis_file).with_context(|| format!("reading {}", basis_file.display()))?;
    let tensor: ArrayD<f64> = read_tensor(&bytes[..])?;
    let tensor = match tensor.into_dimensionality::<Ix5>() {
        Ok(t) => t,
        Err(_) => bail!("{} is not a rank-5 basis tensor", basis_file.display()),
    };
    let (d, co, ci, _, _) = tensor.dim();
    if element >= d {
        return usage(format!("element {element} out of range for a basis of dimension {d}"));
    }
    let mut written = Vec::new();
    for o in 0..co {
        for i in 0..ci {
            let img = tensor.slice(ndarray::s![element, o, i, .., ..]);
            let mut name = prefix.as_os_str().to_owned();
            name.push(format!("_{o}_{i}.pgm"));
            let path = PathBuf::from(name);
            fs::write(&path, pgm(&img)).with_context(|| format!("writing {}", path.display()))?;
            written.push(path);
        }
    }
    Ok(written)
}

pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.value < self.tolerance
    }
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} residual={:.3e} tol={:.0e}", self.name, self.value, self.tolerance)
    }
}

/// Grid-preserving elements of `g` (rotations by quarter turns and the
/// reflections they generate).
pub fn grid_elements(g: Group) -> Vec<GroupElement> {
    let mut v = Vec::new();
    for q in 0..4 {
        let t = q as f64 * std::f64::consts::FRAC_PI_2;
        v.push(GroupElement::rotation(t));
        v.push(GroupElement::reflection(t - 2.0 * g.axis()));
    }
    v.into_iter().filter(|e| g.contains(e)).collect()
}

/// Runs the constraint-residual, oracle-agreement and grid-equivariance checks
/// for one field-type pair.
pub fn run_checks(group: Group, rho_in: &str, rho_out: &str, seed: u64) -> anyhow::Result<Vec<CheckLine>> {
    const BANDLIMIT: u32 = 6;
    const SIZE: usize = 5;
    let ti = FieldType::new(group, parse_reps(group, rho_in)?)?;
    let to = FieldType::new(group, parse_reps(group, rho_out)?)?;
    let (ri, ro) = (ti.representation(), to.representation());
    let sym = full_basis(ro, ri, BANDLIMIT)?;

    let samples = group.elements().unwrap_or_else(|_| group.sample_elements(32, seed));
    let mut residual: f64 = 0.0;
    for i in 0..sym.len() {
        for g in &samples {
            for p in 0..16 {
                let phi = std::f64::consts::TAU * (p as f64 + 0.5) / 16.0;
                residual = residual.max(constraint_residual(&sym, i, ro, ri, g, phi)?);
            }
        }
    }

    let numeric = numeric_basis(ro, ri, BANDLIMIT)?;
    let pts = 2 * BANDLIMIT as usize + 5;
    let distance = if numeric.len() == sym.len() {
        subspace_distance(&sample_on_circle(&sym, pts), &sample_on_circle(&numeric, pts))
    } else {
        1.0
    };

    let basis = sample_basis::<f64>(
        &sym,
        SIZE,
        &RadialProfile::default_for(SIZE),
        &BandlimitPolicy::default_for(SIZE),
    )?;
    let probe = interior_probe(&ti, 17, probe_margin(SIZE), seed);
    let weights = BlockWeights::random(basis.dim(), seed);
    let mut equiv: f64 = 0.0;
    for g in grid_elements(group) {
        equiv = equiv.max(equivariance_error(&ti, &to, &basis, &weights, &g, &probe)?);
    }

    Ok(vec![
        CheckLine {
            name: format!("constraint_residual elements={}", sym.len()),
            value: residual,
            tolerance: 1e-12,
        },
        CheckLine {
            name: format!("oracle_agreement analytic={} numeric={}", sym.len(), numeric.len()),
            value: distance,
            tolerance: 1e-8,
        },
        CheckLine {
            name: format!("grid_equivariance dim={} size={SIZE}", basis.dim()),
            value: equiv,
            tolerance: 1e-10,
        },
    ])
}

/// Default field types for `check`: regular fields for finite groups, a few
/// irreps for continuous ones.
pub fn default_check_reps(group: Group) -> (&'static str, &'static str) {
    match group {
        Group::SO2 => ("irrep:0,irrep:1", "irrep:1,irrep:2"),
        Group::O2 => ("irrep:0,0,irrep:1", "irrep:1,0,ind_so2:1"),
        _ => ("reg", "reg"),
    }
}
