use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use emubench_core::scenarios::{generate_split_with, ScenarioSpec, Split, TrajectorySet, RNG_DESCRIPTION};
use emubench_core::Trajectory;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExportFormat;
use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// JSON metadata written next to every payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub format_version: u32,
    pub canonical_name: String,
    pub split: Split,
    pub seed: u64,
    pub format: ExportFormat,
    /// Payload file name, relative to the sidecar.
    pub payload: String,
    /// `(samples, time, channels, spatial...)`
    pub shape: Vec<usize>,
    pub sha256: String,
    pub rng: String,
    pub spec: ScenarioSpec,
}

impl Sidecar {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn payload_path(&self, sidecar: &Path) -> PathBuf {
        sidecar.with_file_name(&self.payload)
    }

    pub fn num_values(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Paths and checksum of one exported split.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExportBundle {
    pub payload: PathBuf,
    pub sidecar: PathBuf,
    pub shape: Vec<usize>,
    pub sha256: String,
}

/// `<canonical>.<split>` file stem of an exported split.
pub fn file_stem(spec: &ScenarioSpec, split: Split) -> String {
    format!("{}.{}", spec.canonical_name(), split)
}

pub fn split_shape(spec: &ScenarioSpec, split: Split) -> Vec<usize> {
    let recipe = match split {
        Split::Train => spec.train,
        Split::Test => spec.test,
    };
    let mut shape = vec![recipe.samples, recipe.steps + 1, spec.channels()];
    shape.extend(std::iter::repeat_n(spec.num_points, spec.num_dims));
    shape
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writer that hashes everything passing through it.
struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn encode_trajectory(out: &mut impl Write, format: ExportFormat, sample: usize, traj: &Trajectory) -> io::Result<()> {
    match format {
        ExportFormat::Raw64 => {
            let mut bytes = Vec::with_capacity(traj.data().len() * 8);
            for v in traj.data() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            out.write_all(&bytes)
        }
        ExportFormat::Csv => {
            let n = traj.grid().num_points();
            for t in 0..traj.len() {
                for (c, row) in traj.snapshot_slice(t).chunks_exact(n).enumerate() {
                    let mut line = format!("{sample},{t},{c}");
                    for v in row {
                        line.push(',');
                        line.push_str(&v.to_string());
                    }
                    line.push('\n');
                    out.write_all(line.as_bytes())?;
                }
            }
            Ok(())
        }
    }
}

fn csv_header(n: usize) -> String {
    let mut h = String::from("sample,step,channel");
    for i in 0..n {
        h.push_str(&format!(",u{i}"));
    }
    h.push('\n');
    h
}

/// Simulates one split and streams the encoded payload into `out`.
///
/// Returns the SHA-256 of the bytes written. Only a few trajectories are
/// kept in memory at a time.
pub fn stream_split(spec: &ScenarioSpec, split: Split, seed: u64, format: ExportFormat, out: impl Write) -> Result<String, CliError> {
    if format == ExportFormat::Csv && spec.num_dims != 1 {
        return Err(CliError::usage("csv export is only available for one-dimensional scenarios"));
    }
    let mut w = HashingWriter {
        inner: out,
        hasher: Sha256::new(),
    };
    if format == ExportFormat::Csv {
        w.write_all(csv_header(spec.num_points).as_bytes())
            .map_err(|e| CliError::failure(e.to_string()))?;
    }
    let batch = 2 * rayon::current_num_threads().max(1);
    let mut io_error = None;
    generate_split_with(spec, split, seed, batch, |sample, traj| {
        if io_error.is_none() {
            if let Err(e) = encode_trajectory(&mut w, format, sample, &traj) {
                io_error = Some(e);
            }
        }
        Ok(())
    })
    .map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{} {split} split: {}", spec.canonical_name(), err.message);
        err
    })?;
    if let Some(e) = io_error {
        return Err(CliError::failure(e.to_string()));
    }
    w.flush().map_err(|e| CliError::failure(e.to_string()))?;
    Ok(hex(&w.hasher.finalize()))
}

/// Writes payload and sidecar of one split into `dir`.
pub fn export_split(spec: &ScenarioSpec, split: Split, seed: u64, format: ExportFormat, dir: &Path) -> Result<ExportBundle, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let stem = file_stem(spec, split);
    let payload_name = format!("{stem}.{}", format.extension());
    let payload = dir.join(&payload_name);
    let sidecar = dir.join(format!("{stem}.json"));
    let partial = dir.join(format!("{payload_name}.partial"));
    let file = File::create(&partial).map_err(|e| CliError::io(&partial, e))?;
    let sha256 = match stream_split(spec, split, seed, format, BufWriter::with_capacity(1 << 20, file)) {
        Ok(h) => h,
        Err(e) => {
            let _ = fs::remove_file(&partial);
            return Err(e);
        }
    };
    fs::rename(&partial, &payload).map_err(|e| CliError::io(&payload, e))?;
    let shape = split_shape(spec, split);
    let meta = Sidecar {
        format_version: FORMAT_VERSION,
        canonical_name: spec.canonical_name(),
        split,
        seed,
        format,
        payload: payload_name,
        shape: shape.clone(),
        sha256: sha256.clone(),
        rng: RNG_DESCRIPTION.to_string(),
        spec: spec.clone(),
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| CliError::failure(e.to_string()))?;
    fs::write(&sidecar, json + "\n").map_err(|e| CliError::io(&sidecar, e))?;
    Ok(ExportBundle {
        payload,
        sidecar,
        shape,
        sha256,
    })
}

/// SHA-256 of a file on disk.
pub fn file_sha256(path: &Path) -> Result<String, CliError> {
    let mut file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex(&hasher.finalize()))
}

/// Reads a raw64 payload through its sidecar, verifying size and checksum.
/// `path` may name either the payload or the sidecar.
pub fn load_raw64(path: &Path) -> Result<TrajectorySet, CliError> {
    let sidecar_path = &sidecar_for(path);
    let meta = Sidecar::load(sidecar_path)?;
    if meta.format != ExportFormat::Raw64 {
        return Err(CliError::usage(format!("{}: only raw64 payloads can be read back", sidecar_path.display())));
    }
    let path = meta.payload_path(sidecar_path);
    let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
    if bytes.len() != meta.num_values() * 8 {
        return Err(CliError::usage(format!(
            "{}: {} bytes do not match shape {:?}",
            path.display(),
            bytes.len(),
            meta.shape
        )));
    }
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    if hex(&hasher.finalize()) != meta.sha256 {
        return Err(CliError::failure(format!("{}: checksum mismatch", path.display())));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(TrajectorySet::from_vec(meta.spec, meta.split, meta.seed, meta.shape[0], meta.shape[1], data)?)
}

/// Resolves a payload or sidecar path to the sidecar path.
pub fn sidecar_for(path: &Path) -> PathBuf {
    if path.extension().is_some_and(|e| e == "json") {
        path.to_path_buf()
    } else {
        path.with_extension("json")
    }
}
