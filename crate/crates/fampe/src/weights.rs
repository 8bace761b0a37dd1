//! FAMW weight files: little-endian binary, magic `FAMW` | version u32 = 1 |
//! tensor count u32 | per tensor: ndim u32, dims u32 each, payload f64 each.
//! No padding, no compression.

use std::path::Path;

use fampe_core::Tensor;

use crate::error::{CliError, CliResult};
use crate::fsutil;

const MAGIC: &[u8; 4] = b"FAMW";
const VERSION: u32 = 1;

pub fn encode_weights(tensors: &[Tensor]) -> Vec<u8> {
    let payload: usize = tensors.iter().map(|t| 4 + 4 * t.shape().len() + 8 * t.len()).sum();
    let mut out = Vec::with_capacity(12 + payload);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for t in tensors {
        out.extend_from_slice(&(t.shape().len() as u32).to_le_bytes());
        for &d in t.shape() {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for &v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_weights(bytes: &[u8]) -> CliResult<Vec<Tensor>> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4)?;
    if magic != MAGIC {
        return Err(CliError::format(format!(
            "bad weight-file magic {:?}, expected \"FAMW\"",
            String::from_utf8_lossy(magic)
        )));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CliError::format(format!(
            "unsupported weight-file version {version}, expected {VERSION}"
        )));
    }
    let count = r.u32()? as usize;
    let mut tensors = Vec::with_capacity(count);
    for _ in 0..count {
        let ndim = r.u32()? as usize;
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            shape.push(r.u32()? as usize);
        }
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f64::from_le_bytes(r.take(8)?.try_into().unwrap()));
        }
        tensors.push(Tensor::from_vec(&shape, data)?);
    }
    if r.pos != bytes.len() {
        return Err(CliError::format(format!(
            "{} trailing bytes after weight payload",
            bytes.len() - r.pos
        )));
    }
    Ok(tensors)
}

pub fn save_weights(path: &Path, tensors: &[Tensor]) -> CliResult<()> {
    fsutil::write_atomic(path, &encode_weights(tensors))
}

pub fn load_weights(path: &Path) -> CliResult<Vec<Tensor>> {
    decode_weights(&fsutil::read_file(path)?)
        .map_err(|e| CliError::format(format!("{}: {}", path.display(), e.message)))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> CliResult<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(CliError::format(format!(
                "truncated weight file: expected {} bytes, got {}",
                self.pos + n,
                self.bytes.len()
            )));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u32(&mut self) -> CliResult<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}
