use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{b_to_nu, ResolutionSpec};
use crate::error::{Error, Result};
use crate::shells::{omega, Dim, ShellModel};

/// Relative level below which a term is dropped from a voxel sum.
const CUTOFF_LEVEL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSite {
    pub position: [f64; 3],
    pub b_factor: f64,
    pub occupancy: f64,
    pub type_label: String,
}

impl AtomSite {
    pub fn validate(&self) -> Result<()> {
        if !self.position.iter().all(|c| c.is_finite()) {
            return Err(Error::Argument(format!(
                "atom `{}`: non-finite position {:?}",
                self.type_label, self.position
            )));
        }
        if !(self.b_factor >= 0.0 && self.b_factor.is_finite()) {
            return Err(Error::Argument(format!(
                "atom `{}`: b_factor must be >= 0, got {}",
                self.type_label, self.b_factor
            )));
        }
        if !(0.0..=1.0).contains(&self.occupancy) {
            return Err(Error::Argument(format!(
                "atom `{}`: occupancy must lie in [0, 1], got {}",
                self.type_label, self.occupancy
            )));
        }
        Ok(())
    }
}

/// Placement of a regular 3-D grid; voxel (i, j, k) sits at origin + (i, j, k)·spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub dims: [usize; 3],
}

impl GridSpec {
    pub fn new(origin: [f64; 3], spacing: [f64; 3], dims: [usize; 3]) -> Result<Self> {
        let g = GridSpec {
            origin,
            spacing,
            dims,
        };
        g.validate()?;
        Ok(g)
    }

    /// Cubic grid of `n` voxels per side centred on `center`.
    pub fn centered(center: [f64; 3], spacing: f64, n: usize) -> Result<Self> {
        let half = (n.max(1) - 1) as f64 * spacing / 2.0;
        Self::new(
            [center[0] - half, center[1] - half, center[2] - half],
            [spacing; 3],
            [n; 3],
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !self.origin.iter().all(|c| c.is_finite()) {
            return Err(Error::Argument(format!(
                "grid origin {:?} is not finite",
                self.origin
            )));
        }
        if !self.spacing.iter().all(|&h| h > 0.0 && h.is_finite()) {
            return Err(Error::Argument(format!(
                "grid spacing must be positive, got {:?}",
                self.spacing
            )));
        }
        if self.dims.iter().any(|&n| n == 0 || n > i32::MAX as usize) {
            return Err(Error::Argument(format!(
                "grid dims must be positive, got {:?}",
                self.dims
            )));
        }
        self.dims[0]
            .checked_mul(self.dims[1])
            .and_then(|p| p.checked_mul(self.dims[2]))
            .ok_or_else(|| Error::Argument(format!("grid dims {:?} overflow", self.dims)))?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index of voxel (i, j, k), x fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin[0] + i as f64 * self.spacing[0],
            self.origin[1] + j as f64 * self.spacing[1],
            self.origin[2] + k as f64 * self.spacing[2],
        ]
    }

    pub fn voxel_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Length of the box diagonal spanned by the voxel centres.
    pub fn diagonal(&self) -> f64 {
        (0..3)
            .map(|a| {
                let l = (self.dims[a] - 1) as f64 * self.spacing[a];
                l * l
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Scalar values on a [`GridSpec`], stored x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeGrid {
    spec: GridSpec,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawMeta {
    origin: [f64; 3],
    spacing: [f64; 3],
    dims: [usize; 3],
    order: String,
    dtype: String,
}

impl VolumeGrid {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(Error::Argument(format!(
                "grid {:?} needs {} values, got {}",
                spec.dims,
                spec.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("volume value {i} is not finite")));
        }
        Ok(VolumeGrid { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.spec.index(i, j, k)]
    }

    /// Σ values × voxel volume.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.voxel_volume()
    }

    /// (min, max, mean, rms deviation from the mean).
    pub fn statistics(&self) -> (f64, f64, f64, f64) {
        let n = self.values.len() as f64;
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        let mean = sum / n;
        let var = self
            .values
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / n;
        (lo, hi, mean, var.sqrt())
    }

    /// MRC2014 volume, mode 2 (32-bit float), little-endian.
    pub fn write_mrc(&self, mut w: impl Write) -> Result<()> {
        let mut header = [0u8; 1024];
        let mut put_i32 = |word: usize, v: i32| {
            header[4 * (word - 1)..4 * word].copy_from_slice(&v.to_le_bytes());
        };
        let [nx, ny, nz] = self.spec.dims.map(|n| n as i32);
        put_i32(1, nx);
        put_i32(2, ny);
        put_i32(3, nz);
        put_i32(4, 2);
        put_i32(8, nx);
        put_i32(9, ny);
        put_i32(10, nz);
        put_i32(17, 1);
        put_i32(18, 2);
        put_i32(19, 3);
        put_i32(23, 1);
        put_i32(28, 20140);
        let (lo, hi, mean, rms) = self.statistics();
        let mut put_f32 = |word: usize, v: f64| {
            header[4 * (word - 1)..4 * word].copy_from_slice(&(v as f32).to_le_bytes());
        };
        for a in 0..3 {
            put_f32(11 + a, self.spec.dims[a] as f64 * self.spec.spacing[a]);
            put_f32(14 + a, 90.0);
            put_f32(50 + a, self.spec.origin[a]);
        }
        put_f32(20, lo);
        put_f32(21, hi);
        put_f32(22, mean);
        put_f32(55, rms);
        header[208..212].copy_from_slice(b"MAP ");
        header[212..216].copy_from_slice(&[0x44, 0x44, 0x00, 0x00]);
        w.write_all(&header)?;
        let mut data = Vec::with_capacity(4 * self.values.len());
        for &v in &self.values {
            data.extend_from_slice(&(v as f32).to_le_bytes());
        }
        w.write_all(&data)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_mrc_file(&self, path: &Path) -> Result<()> {
        self.write_mrc(BufWriter::new(File::create(path)?))
    }

    /// Flat little-endian f64 data at `path` plus a JSON sidecar at
    /// `<path>.json`; returns the sidecar path.
    pub fn write_raw_meta(&self, path: &Path) -> Result<PathBuf> {
        let mut w = BufWriter::new(File::create(path)?);
        for &v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        let meta = RawMeta {
            origin: self.spec.origin,
            spacing: self.spec.spacing,
            dims: self.spec.dims,
            order: "x-fastest".into(),
            dtype: "f64le".into(),
        };
        let sidecar = sidecar_path(path);
        let mut text = serde_json::to_string_pretty(&meta)?;
        text.push('\n');
        std::fs::write(&sidecar, text)?;
        Ok(sidecar)
    }

    pub fn read_raw_meta(path: &Path) -> Result<Self> {
        let meta: RawMeta = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
        if meta.order != "x-fastest" || meta.dtype != "f64le" {
            return Err(Error::Parse(format!(
                "unsupported raw layout {} / {}",
                meta.order, meta.dtype
            )));
        }
        let spec = GridSpec::new(meta.origin, meta.spacing, meta.dims)?;
        let mut bytes = Vec::new();
        File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() != 8 * spec.len() {
            return Err(Error::Parse(format!(
                "{} holds {} bytes, expected {}",
                path.display(),
                bytes.len(),
                8 * spec.len()
            )));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::new(spec, values)
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// One atom with its terms already scaled by occupancy and widened by B_n and ν₀.
struct PlacedAtom {
    center: [f64; 3],
    cutoff_sq: f64,
    terms: Vec<(f64, f64, f64)>,
}

impl PlacedAtom {
    #[inline]
    fn eval(&self, p: [f64; 3]) -> f64 {
        let d2 = (0..3).map(|a| (p[a] - self.center[a]).powi(2)).sum::<f64>();
        if d2 > self.cutoff_sq {
            return 0.0;
        }
        let r = d2.sqrt();
        self.terms
            .iter()
            .map(|&(k, mu, nu)| k * omega(Dim::Three, r, mu, nu))
            .sum()
    }
}

/// Radius beyond which every term of `model` (widened by `extra_nu`) lies
/// below 1e-8 of its envelope peak.
pub fn cutoff_radius(model: &ShellModel, extra_nu: f64) -> f64 {
    let reach = (2.0 * (1.0 / CUTOFF_LEVEL).ln()).sqrt();
    model
        .terms()
        .iter()
        .map(|t| t.mu + reach * (t.nu + extra_nu).sqrt())
        .fold(0.0, f64::max)
}

/// Map of Σ_n occ_n Σ_m K_m Ω̄₃(|p − x_n|; R_m, ν_m + B_n/8π² + ν₀) over the grid.
/// `type_models` hold each atom type's image at the target resolution with
/// B_n = 0; `res.nu0` is added to every term.
pub fn synthesize_map(
    atoms: &[AtomSite],
    type_models: &BTreeMap<String, ShellModel>,
    res: &ResolutionSpec,
    grid: &GridSpec,
) -> Result<VolumeGrid> {
    grid.validate()?;
    res.validate()?;
    let mut missing: Vec<&str> = atoms
        .iter()
        .map(|a| a.type_label.as_str())
        .filter(|l| !type_models.contains_key(*l))
        .collect();
    missing.sort_unstable();
    missing.dedup();
    if !missing.is_empty() {
        return Err(Error::Lookup(missing.join(", ")));
    }
    for m in type_models.values() {
        if m.dim() != Dim::Three {
            return Err(Error::Argument(format!(
                "type model `{}` has dimension {}, maps need 3",
                m.label(),
                m.dim()
            )));
        }
    }

    let diagonal = grid.diagonal();
    let mut placed = Vec::with_capacity(atoms.len());
    let (mut clipped, mut widest) = (0usize, 0.0f64);
    for atom in atoms {
        atom.validate()?;
        let model = &type_models[&atom.type_label];
        let extra = b_to_nu(atom.b_factor) + res.nu0;
        let cutoff = cutoff_radius(model, extra);
        if cutoff > diagonal {
            clipped += 1;
            widest = widest.max(cutoff);
        }
        placed.push(PlacedAtom {
            center: atom.position,
            cutoff_sq: cutoff * cutoff,
            terms: model
                .terms()
                .iter()
                .map(|t| (atom.occupancy * t.kappa, t.mu, t.nu + extra))
                .collect(),
        });
    }
    if clipped > 0 {
        log::info!(
            "{clipped} of {} atoms have image tails past the grid (cutoff up to {widest:.3}, grid diagonal {diagonal:.3})",
            atoms.len()
        );
    }

    let [nx, ny, _] = grid.dims;
    let mut values = vec![0.0; grid.len()];
    values
        .par_chunks_mut(nx * ny)
        .enumerate()
        .for_each(|(k, slice)| {
            for j in 0..ny {
                for i in 0..nx {
                    let p = grid.point(i, j, k);
                    slice[i + nx * j] = placed.iter().map(|a| a.eval(p)).sum();
                }
            }
        });
    VolumeGrid::new(*grid, values)
}
