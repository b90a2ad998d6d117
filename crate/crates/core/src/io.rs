//! Dataset readers and the binary formats for codes, weights and indexes.
//!
//! All integers and floats are little-endian.
//!
//! | file | layout |
//! |------|--------|
//! | codes (`WHC1`) | magic, `u32` b, `u64` n, then n records of `ceil(b/8)` bytes |
//! | weights (`WHW1`) | magic, `u32` b, then b pairs of `f64` `(w_i(0), w_i(1))` |
//! | index (`WHI1`) | magic, `u32` b, `u32` m, `u64` n, m spans (`u32` start, `u32` len), then per table a `u64` bucket count and per bucket the key (`ceil(len/8)` bytes), a `u32` posting count and `u64` ids; finally the codes as a `WHC1` block |
//!
//! `fvecs` records are an `i32` dimension followed by that many `f32`; `bvecs` records
//! use `u8` components instead.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::code::{byte_len, check_bits, CodeSet, WeightTable};
use crate::error::{Error, Result};
use crate::multi::{split_spans, MultiIndex, Span};
use crate::table::BucketTable;
use crate::CodeId;

pub const CODES_MAGIC: &[u8; 4] = b"WHC1";
pub const WEIGHTS_MAGIC: &[u8; 4] = b"WHW1";
pub const INDEX_MAGIC: &[u8; 4] = b"WHI1";

/// `n` real vectors of dimension `d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSet {
    pub n: usize,
    pub d: usize,
    pub values: Vec<f32>,
}

impl VectorSet {
    pub fn new(d: usize, values: Vec<f32>) -> Result<Self> {
        if d == 0 {
            if !values.is_empty() {
                return Err(Error::argument(
                    "zero-dimensional vectors cannot hold values",
                ));
            }
            return Ok(VectorSet { n: 0, d: 0, values });
        }
        if !values.len().is_multiple_of(d) {
            return Err(Error::argument(format!(
                "{} values do not form rows of dimension {d}",
                values.len()
            )));
        }
        Ok(VectorSet {
            n: values.len() / d,
            d,
            values,
        })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        (0..self.n).map(|i| self.row(i))
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Component type of a `.fvecs` / `.bvecs` file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VecsKind {
    F32,
    U8,
}

impl VecsKind {
    fn width(self) -> usize {
        match self {
            VecsKind::F32 => 4,
            VecsKind::U8 => 1,
        }
    }

    /// Guesses the kind from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "fvecs" => Some(VecsKind::F32),
            "bvecs" => Some(VecsKind::U8),
            _ => None,
        }
    }
}

/// Byte-counting reader that turns short reads into located format errors.
struct Located<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Located<R> {
    fn new(inner: R) -> Self {
        Located { inner, offset: 0 }
    }

    fn exact(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        match self.inner.read_exact(buf) {
            Ok(()) => {
                self.offset += buf.len() as u64;
                Ok(())
            }
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => {
                Err(Error::format(self.offset, format!("truncated {what}")))
            }
            Err(e) => Err(e.into()),
        }
    }

    /// Reads up to `buf.len()` bytes; returns how many were available before EOF.
    fn fill(&mut self, buf: &mut [u8]) -> Result<usize> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => break,
                Ok(k) => filled += k,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += filled as u64;
        Ok(filled)
    }

    fn magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let mut got = [0u8; 4];
        self.exact(&mut got, "magic")?;
        if &got != expected {
            return Err(Error::format(
                0,
                format!(
                    "bad magic {:?}, expected {:?}",
                    String::from_utf8_lossy(&got),
                    String::from_utf8_lossy(expected)
                ),
            ));
        }
        Ok(())
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let mut b = [0u8; 4];
        self.exact(&mut b, what)?;
        Ok(u32::from_le_bytes(b))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        let mut b = [0u8; 8];
        self.exact(&mut b, what)?;
        Ok(u64::from_le_bytes(b))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let mut b = [0u8; 8];
        self.exact(&mut b, what)?;
        Ok(f64::from_le_bytes(b))
    }

    fn expect_eof(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        if self.fill(&mut probe)? != 0 {
            return Err(Error::format(
                self.offset - 1,
                "trailing bytes after end of data",
            ));
        }
        Ok(())
    }
}

/// Streams `.fvecs` / `.bvecs` records, stopping after `limit` records when given.
pub fn read_vecs<R: Read>(reader: R, kind: VecsKind, limit: Option<usize>) -> Result<VectorSet> {
    let mut r = Located::new(reader);
    let mut d: Option<usize> = None;
    let mut values = Vec::new();
    let mut record = Vec::new();
    let mut n = 0usize;
    while limit.is_none_or(|l| n < l) {
        let start = r.offset;
        let mut header = [0u8; 4];
        match r.fill(&mut header)? {
            0 => break,
            4 => {}
            _ => return Err(Error::format(start, "truncated dimension header")),
        }
        let dim = i32::from_le_bytes(header);
        if dim <= 0 {
            return Err(Error::format(
                start,
                format!("non-positive dimension {dim}"),
            ));
        }
        let dim = dim as usize;
        match d {
            None => d = Some(dim),
            Some(expected) if expected != dim => {
                return Err(Error::format(
                    start,
                    format!("record {n} declares dimension {dim}, expected {expected}"),
                ))
            }
            Some(_) => {}
        }
        record.resize(dim * kind.width(), 0);
        r.exact(&mut record, &format!("record {n}"))?;
        match kind {
            VecsKind::F32 => values.extend(
                record
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap())),
            ),
            VecsKind::U8 => values.extend(record.iter().map(|&b| b as f32)),
        }
        n += 1;
    }
    VectorSet::new(d.unwrap_or(0), values)
}

pub fn read_fvecs(path: impl AsRef<Path>) -> Result<VectorSet> {
    read_vecs(BufReader::new(File::open(path)?), VecsKind::F32, None)
}

pub fn read_bvecs(path: impl AsRef<Path>) -> Result<VectorSet> {
    read_vecs(BufReader::new(File::open(path)?), VecsKind::U8, None)
}

/// Reads at most `limit` records, picking the kind from the file extension.
pub fn read_vectors(path: impl AsRef<Path>, limit: Option<usize>) -> Result<VectorSet> {
    let path = path.as_ref();
    let kind = VecsKind::from_path(path).ok_or_else(|| {
        Error::argument(format!(
            "{}: expected a .fvecs or .bvecs file",
            path.display()
        ))
    })?;
    read_vecs(BufReader::new(File::open(path)?), kind, limit)
}

/// Writes vectors in `.fvecs` / `.bvecs` layout. `U8` values are rounded and clamped.
pub fn write_vecs<W: Write>(mut w: W, vs: &VectorSet, kind: VecsKind) -> Result<()> {
    for row in vs.rows() {
        w.write_all(&(vs.d as i32).to_le_bytes())?;
        match kind {
            VecsKind::F32 => {
                for &v in row {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            VecsKind::U8 => {
                let bytes: Vec<u8> = row
                    .iter()
                    .map(|&v| v.round().clamp(0.0, 255.0) as u8)
                    .collect();
                w.write_all(&bytes)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_fvecs(path: impl AsRef<Path>, vs: &VectorSet) -> Result<()> {
    write_vecs(BufWriter::new(File::create(path)?), vs, VecsKind::F32)
}

pub fn write_bvecs(path: impl AsRef<Path>, vs: &VectorSet) -> Result<()> {
    write_vecs(BufWriter::new(File::create(path)?), vs, VecsKind::U8)
}

fn bits_header(r: &mut Located<impl Read>) -> Result<usize> {
    let at = r.offset;
    let bits = r.u32("code length")? as usize;
    check_bits(bits).map_err(|_| Error::format(at, format!("unsupported code length {bits}")))?;
    Ok(bits)
}

pub fn write_codes<W: Write>(mut w: W, codes: &CodeSet) -> Result<()> {
    w.write_all(CODES_MAGIC)?;
    w.write_all(&(codes.bits() as u32).to_le_bytes())?;
    w.write_all(&(codes.len() as u64).to_le_bytes())?;
    w.write_all(codes.as_packed())?;
    w.flush()?;
    Ok(())
}

fn read_codes_block(r: &mut Located<impl Read>) -> Result<CodeSet> {
    r.magic(CODES_MAGIC)?;
    let bits = bits_header(r)?;
    let n = r.u64("code count")?;
    let at = r.offset;
    let total = n
        .checked_mul(byte_len(bits) as u64)
        .and_then(|t| usize::try_from(t).ok())
        .ok_or_else(|| Error::format(at, format!("code count {n} is too large")))?;
    let mut data = Vec::new();
    // Grow with the stream so a lying header cannot force a huge allocation.
    let mut chunk = vec![0u8; 1 << 16];
    while data.len() < total {
        let want = (total - data.len()).min(chunk.len());
        r.exact(&mut chunk[..want], "code records")?;
        data.extend_from_slice(&chunk[..want]);
    }
    CodeSet::from_packed(bits, data).map_err(|e| Error::format(at, e.to_string()))
}

pub fn read_codes<R: Read>(reader: R) -> Result<CodeSet> {
    let mut r = Located::new(reader);
    let codes = read_codes_block(&mut r)?;
    r.expect_eof()?;
    Ok(codes)
}

pub fn save_codes(path: impl AsRef<Path>, codes: &CodeSet) -> Result<()> {
    write_codes(BufWriter::new(File::create(path)?), codes)
}

pub fn load_codes(path: impl AsRef<Path>) -> Result<CodeSet> {
    read_codes(BufReader::new(File::open(path)?))
}

pub fn write_weights<W: Write>(mut w: W, weights: &WeightTable) -> Result<()> {
    w.write_all(WEIGHTS_MAGIC)?;
    w.write_all(&(weights.len() as u32).to_le_bytes())?;
    for &[w0, w1] in weights.entries() {
        w.write_all(&w0.to_le_bytes())?;
        w.write_all(&w1.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_weights<R: Read>(reader: R) -> Result<WeightTable> {
    let mut r = Located::new(reader);
    r.magic(WEIGHTS_MAGIC)?;
    let bits = bits_header(&mut r)?;
    let at = r.offset;
    let mut entries = Vec::with_capacity(bits);
    for i in 0..bits {
        entries.push([
            r.f64(&format!("weight {i}"))?,
            r.f64(&format!("weight {i}"))?,
        ]);
    }
    r.expect_eof()?;
    WeightTable::new(entries).map_err(|e| Error::format(at, e.to_string()))
}

pub fn save_weights(path: impl AsRef<Path>, weights: &WeightTable) -> Result<()> {
    write_weights(BufWriter::new(File::create(path)?), weights)
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightTable> {
    read_weights(BufReader::new(File::open(path)?))
}

pub fn write_index<W: Write>(mut w: W, ix: &MultiIndex) -> Result<()> {
    w.write_all(INDEX_MAGIC)?;
    w.write_all(&(ix.bits() as u32).to_le_bytes())?;
    w.write_all(&(ix.m() as u32).to_le_bytes())?;
    w.write_all(&(ix.len() as u64).to_le_bytes())?;
    for span in ix.spans() {
        w.write_all(&(span.start as u32).to_le_bytes())?;
        w.write_all(&(span.len as u32).to_le_bytes())?;
    }
    for (table, span) in ix.tables().iter().zip(ix.spans()) {
        let buckets = table.sorted_buckets();
        w.write_all(&(buckets.len() as u64).to_le_bytes())?;
        let key_bytes = byte_len(span.len);
        for (key, ids) in buckets {
            w.write_all(&key.to_le_bytes()[..key_bytes])?;
            w.write_all(&(ids.len() as u32).to_le_bytes())?;
            for &id in ids {
                w.write_all(&(id as u64).to_le_bytes())?;
            }
        }
    }
    write_codes(&mut w, ix.codes())?;
    w.flush()?;
    Ok(())
}

pub fn read_index<R: Read>(reader: R) -> Result<MultiIndex> {
    let mut r = Located::new(reader);
    r.magic(INDEX_MAGIC)?;
    let bits = bits_header(&mut r)?;
    let at = r.offset;
    let m = r.u32("table count")? as usize;
    let expected = split_spans(bits, m).map_err(|e| Error::format(at, e.to_string()))?;
    let n = r.u64("code count")?;
    let mut spans = Vec::with_capacity(m);
    for (t, want) in expected.iter().enumerate() {
        let at = r.offset;
        let start = r.u32("span start")? as usize;
        let len = r.u32("span length")? as usize;
        if (Span { start, len }) != *want {
            return Err(Error::format(
                at,
                format!("span {t} is {start}+{len}, expected {want:?}"),
            ));
        }
        spans.push(Span { start, len });
    }
    let mut tables = Vec::with_capacity(m);
    for span in &spans {
        let key_bytes = byte_len(span.len);
        let count = r.u64("bucket count")?;
        let mut buckets = Vec::new();
        for _ in 0..count {
            let at = r.offset;
            let mut kb = [0u8; 8];
            r.exact(&mut kb[..key_bytes], "bucket key")?;
            let key = u64::from_le_bytes(kb);
            if span.len < 64 && key >> span.len != 0 {
                return Err(Error::format(at, "bucket key has bits beyond its span"));
            }
            let postings = r.u32("posting count")?;
            let mut ids = Vec::new();
            for _ in 0..postings {
                let at = r.offset;
                let id = r.u64("posting")?;
                if id >= n {
                    return Err(Error::format(
                        at,
                        format!("id {id} out of range for {n} codes"),
                    ));
                }
                ids.push(id as CodeId);
            }
            buckets.push((key, ids));
        }
        tables.push(BucketTable::from_buckets(span.len, buckets));
    }
    let at = r.offset;
    let codes = read_codes_block(&mut r)?;
    if codes.bits() != bits || codes.len() as u64 != n {
        return Err(Error::format(
            at,
            "embedded codes do not match the index header",
        ));
    }
    r.expect_eof()?;
    MultiIndex::from_parts(codes, spans, tables).map_err(|e| Error::format(at, e.to_string()))
}

pub fn save_index(path: impl AsRef<Path>, ix: &MultiIndex) -> Result<()> {
    write_index(BufWriter::new(File::create(path)?), ix)
}

pub fn load_index(path: impl AsRef<Path>) -> Result<MultiIndex> {
    read_index(BufReader::new(File::open(path)?))
}

/// Reads one non-negative integer label per line; blank lines are skipped.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<u32>> {
    let reader = BufReader::new(File::open(path)?);
    let mut labels = Vec::new();
    let mut offset = 0u64;
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            let label = trimmed
                .parse()
                .map_err(|_| Error::format(offset, format!("invalid label {trimmed:?}")))?;
            labels.push(label);
        }
        offset += line.len() as u64 + 1;
    }
    Ok(labels)
}
