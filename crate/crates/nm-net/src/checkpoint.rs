use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Binary weight container: magic `NMWT`, format version, tensor count,
/// then per tensor a UTF-8 name, a dimension list, and little-endian f64
/// payload. Everything multi-byte is little-endian.
const MAGIC: [u8; 4] = *b"NMWT";
const FORMAT_VERSION: u32 = 1;
const MAX_NAME_BYTES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorEntry {
    pub name: String,
    pub dims: Vec<u64>,
    pub data: Vec<f64>,
}

#[derive(Debug)]
pub enum CheckpointError {
    Io(io::Error),
    BadMagic,
    UnsupportedVersion(u32),
    Truncated,
    BadName,
    DuplicateTensor(String),
    MissingTensor(String),
    UnknownTensor(String),
    LengthMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for CheckpointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckpointError::Io(e) => write!(f, "checkpoint io: {}", e),
            CheckpointError::BadMagic => write!(f, "not a weight file (bad magic)"),
            CheckpointError::UnsupportedVersion(v) => {
                write!(f, "unsupported weight format version {}", v)
            }
            CheckpointError::Truncated => write!(f, "weight file ends mid-record"),
            CheckpointError::BadName => write!(f, "tensor name is invalid"),
            CheckpointError::DuplicateTensor(n) => write!(f, "tensor {} appears twice", n),
            CheckpointError::MissingTensor(n) => write!(f, "tensor {} is missing", n),
            CheckpointError::UnknownTensor(n) => {
                write!(f, "tensor {} does not belong to this architecture", n)
            }
            CheckpointError::LengthMismatch {
                name,
                expected,
                got,
            } => write!(
                f,
                "tensor {} holds {} values, expected {}",
                name, got, expected
            ),
        }
    }
}

impl std::error::Error for CheckpointError {}

impl From<io::Error> for CheckpointError {
    fn from(e: io::Error) -> CheckpointError {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            CheckpointError::Truncated
        } else {
            CheckpointError::Io(e)
        }
    }
}

pub fn write_checkpoint(path: &Path, entries: &[TensorEntry]) -> Result<(), CheckpointError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(entries.len() as u32).to_le_bytes())?;
    for e in entries {
        if e.name.is_empty() || e.name.len() > MAX_NAME_BYTES {
            return Err(CheckpointError::BadName);
        }
        let n: u64 = e.dims.iter().product();
        if n as usize != e.data.len() {
            return Err(CheckpointError::LengthMismatch {
                name: e.name.clone(),
                expected: n as usize,
                got: e.data.len(),
            });
        }
        w.write_all(&(e.name.len() as u32).to_le_bytes())?;
        w.write_all(e.name.as_bytes())?;
        w.write_all(&(e.dims.len() as u32).to_le_bytes())?;
        for d in &e.dims {
            w.write_all(&d.to_le_bytes())?;
        }
        for v in &e.data {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Vec<TensorEntry>, CheckpointError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(CheckpointError::UnsupportedVersion(version));
    }
    let count = read_u32(&mut r)? as usize;
    let mut out = Vec::new();
    for _ in 0..count {
        let name_len = read_u32(&mut r)? as usize;
        if name_len == 0 || name_len > MAX_NAME_BYTES {
            return Err(CheckpointError::BadName);
        }
        let mut name_bytes = vec![0u8; name_len];
        r.read_exact(&mut name_bytes)?;
        let name = String::from_utf8(name_bytes).map_err(|_| CheckpointError::BadName)?;
        let ndim = read_u32(&mut r)? as usize;
        let mut dims = Vec::with_capacity(ndim.min(64));
        for _ in 0..ndim {
            dims.push(read_u64(&mut r)?);
        }
        let n = dims.iter().product::<u64>() as usize;
        // Grow with the bytes actually present so a corrupt count cannot
        // force a giant allocation; EOF mid-payload reads as Truncated.
        let mut data = Vec::new();
        let mut buf = [0u8; 8];
        for _ in 0..n {
            r.read_exact(&mut buf)?;
            data.push(f64::from_le_bytes(buf));
        }
        out.push(TensorEntry { name, dims, data });
    }
    Ok(out)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, CheckpointError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, CheckpointError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}
