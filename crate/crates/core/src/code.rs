//! Bit-packed binary codes, per-bit weight tables and the weighted distance kernels.
//!
//! Bits are addressed from 0. Bit `i` lives in byte `i / 8` at bit position `i % 8`
//! (little-endian within the byte), which is also the on-disk packing. When a code of
//! at most 64 bits is read as an integer ("key"), bit `i` of the code is bit `i` of
//! the integer.
//!
//! All weighted sums use one association: the bits of each 8-bit chunk are summed
//! left to right starting from `0.0`, and the chunk totals are then summed left to
//! right. A 256-entry lookup table per chunk therefore reproduces every distance
//! bit-for-bit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest supported code, in bits.
pub const MAX_BITS: usize = 256;
const MAX_BYTES: usize = MAX_BITS / 8;

/// A binary code of `1..=256` bits. Unused padding bits are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinaryCode {
    len: u16,
    bytes: [u8; MAX_BYTES],
}

pub(crate) fn check_bits(bits: usize) -> Result<()> {
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::UnsupportedLength {
            bits,
            max: MAX_BITS,
        });
    }
    Ok(())
}

/// Number of bytes used to pack `bits` bits.
pub fn byte_len(bits: usize) -> usize {
    bits.div_ceil(8)
}

/// Mask of the valid bits in the last byte of a `bits`-bit code.
fn last_byte_mask(bits: usize) -> u8 {
    match bits % 8 {
        0 => 0xff,
        r => (1u8 << r) - 1,
    }
}

impl BinaryCode {
    /// The all-zeros code of the given length.
    pub fn zeros(bits: usize) -> Result<Self> {
        check_bits(bits)?;
        Ok(BinaryCode {
            len: bits as u16,
            bytes: [0; MAX_BYTES],
        })
    }

    /// Builds a code from its packed bytes. Rejects nonzero padding bits.
    pub fn from_bytes(bits: usize, packed: &[u8]) -> Result<Self> {
        check_bits(bits)?;
        let n = byte_len(bits);
        if packed.len() != n {
            return Err(Error::argument(format!(
                "a {bits}-bit code packs into {n} bytes, got {}",
                packed.len()
            )));
        }
        if packed[n - 1] & !last_byte_mask(bits) != 0 {
            return Err(Error::argument("padding bits must be zero"));
        }
        let mut bytes = [0; MAX_BYTES];
        bytes[..n].copy_from_slice(packed);
        Ok(BinaryCode {
            len: bits as u16,
            bytes,
        })
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let mut code = BinaryCode::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            code.set(i, b);
        }
        Ok(code)
    }

    /// Builds a code of `bits <= 64` bits from its integer key.
    pub fn from_key(key: u64, bits: usize) -> Result<Self> {
        if bits > 64 {
            return Err(Error::argument("integer keys hold at most 64 bits"));
        }
        check_bits(bits)?;
        let key = if bits == 64 {
            key
        } else {
            key & ((1u64 << bits) - 1)
        };
        let mut bytes = [0; MAX_BYTES];
        bytes[..8].copy_from_slice(&key.to_le_bytes());
        Ok(BinaryCode {
            len: bits as u16,
            bytes,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// Always false: codes hold at least one bit.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes[..byte_len(self.len())]
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        assert!(
            i < self.len(),
            "bit {i} out of range for {}-bit code",
            self.len
        );
        (self.bytes[i / 8] >> (i % 8)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len(),
            "bit {i} out of range for {}-bit code",
            self.len
        );
        if value {
            self.bytes[i / 8] |= 1 << (i % 8);
        } else {
            self.bytes[i / 8] &= !(1 << (i % 8));
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len(),
            "bit {i} out of range for {}-bit code",
            self.len
        );
        self.bytes[i / 8] ^= 1 << (i % 8);
    }

    /// Integer key of the whole code. Only defined for codes of at most 64 bits.
    pub fn key(&self) -> Option<u64> {
        (self.len() <= 64).then(|| extract_bits(self.as_bytes(), 0, self.len()))
    }

    /// Bits `start..start + len` as an integer key (`len <= 64`).
    pub fn substring_key(&self, start: usize, len: usize) -> u64 {
        assert!(start + len <= self.len());
        extract_bits(self.as_bytes(), start, len)
    }

    pub fn count_ones(&self) -> u32 {
        self.as_bytes().iter().map(|b| b.count_ones()).sum()
    }
}

/// Reads bits `start..start + len` (`len <= 64`) of a packed code as an integer.
#[inline]
pub fn extract_bits(packed: &[u8], start: usize, len: usize) -> u64 {
    debug_assert!(len <= 64);
    if len == 0 {
        return 0;
    }
    let first = start / 8;
    let last = (start + len - 1) / 8;
    let mut acc: u128 = 0;
    for (k, &byte) in packed[first..=last].iter().enumerate() {
        acc |= (byte as u128) << (8 * k);
    }
    let value = (acc >> (start % 8)) as u64;
    if len == 64 {
        value
    } else {
        value & ((1u64 << len) - 1)
    }
}

impl fmt::Display for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryCode({self})")
    }
}

/// Parses a string of `0`/`1` characters; the first character is bit 0.
impl FromStr for BinaryCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut code = BinaryCode::zeros(s.len())?;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => code.set(i, true),
                _ => return Err(Error::argument(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(code)
    }
}

/// A flat, contiguous array of equal-length codes. Row `i` is the code with id `i`.
#[derive(Clone, PartialEq, Eq)]
pub struct CodeSet {
    bits: usize,
    stride: usize,
    data: Vec<u8>,
}

impl CodeSet {
    pub fn new(bits: usize) -> Result<Self> {
        check_bits(bits)?;
        Ok(CodeSet {
            bits,
            stride: byte_len(bits),
            data: Vec::new(),
        })
    }

    pub fn with_capacity(bits: usize, n: usize) -> Result<Self> {
        let mut set = CodeSet::new(bits)?;
        set.data.reserve(n * set.stride);
        Ok(set)
    }

    /// Collects codes that must all share `bits`.
    pub fn from_codes(bits: usize, codes: &[BinaryCode]) -> Result<Self> {
        let mut set = CodeSet::with_capacity(bits, codes.len())?;
        for code in codes {
            set.push(code)?;
        }
        Ok(set)
    }

    /// Wraps `n * ceil(bits/8)` packed bytes, validating the padding of every row.
    pub fn from_packed(bits: usize, data: Vec<u8>) -> Result<Self> {
        check_bits(bits)?;
        let stride = byte_len(bits);
        if !data.len().is_multiple_of(stride) {
            return Err(Error::argument(format!(
                "{} bytes is not a whole number of {stride}-byte codes",
                data.len()
            )));
        }
        let mask = !last_byte_mask(bits);
        if let Some(row) = data
            .chunks_exact(stride)
            .position(|r| r[stride - 1] & mask != 0)
        {
            return Err(Error::argument(format!(
                "code {row} has nonzero padding bits"
            )));
        }
        Ok(CodeSet { bits, stride, data })
    }

    pub fn push(&mut self, code: &BinaryCode) -> Result<()> {
        if code.len() != self.bits {
            return Err(Error::dimension(self.bits, code.len()));
        }
        self.data.extend_from_slice(code.as_bytes());
        Ok(())
    }

    #[inline]
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Bytes per code.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn get(&self, i: usize) -> BinaryCode {
        let mut bytes = [0; MAX_BYTES];
        bytes[..self.stride].copy_from_slice(self.row(i));
        BinaryCode {
            len: self.bits as u16,
            bytes,
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = BinaryCode> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    pub fn as_packed(&self) -> &[u8] {
        &self.data
    }
}

impl fmt::Debug for CodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodeSet")
            .field("bits", &self.bits)
            .field("len", &self.len())
            .finish()
    }
}

/// Per-bit weight functions: entry `i` is `(w_i(0), w_i(1))`, the cost of bit `i`
/// when the query and the code agree / disagree on it.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    entries: Vec<[f64; 2]>,
}

impl WeightTable {
    pub fn new(entries: Vec<[f64; 2]>) -> Result<Self> {
        check_bits(entries.len())?;
        for (bit, pair) in entries.iter().enumerate() {
            for &value in pair {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::InvalidWeight { bit, value });
                }
            }
        }
        Ok(WeightTable { entries })
    }

    /// `w_i(0) = 0`, `w_i(1) = 1`: the plain Hamming metric.
    pub fn unit(bits: usize) -> Result<Self> {
        WeightTable::new(vec![[0.0, 1.0]; bits])
    }

    /// Weights with zero cost on agreement and the given cost on disagreement.
    pub fn from_mismatch_costs(costs: &[f64]) -> Result<Self> {
        WeightTable::new(costs.iter().map(|&c| [0.0, c]).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[[f64; 2]] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, bit: usize, xor: bool) -> f64 {
        self.entries[bit][xor as usize]
    }
}

/// Canonical weighted sum over `len` bits: chunk partials of 8 bits, then chunk totals.
#[inline]
pub(crate) fn chunked_sum(len: usize, mut term: impl FnMut(usize) -> f64) -> f64 {
    let mut total = 0.0;
    let mut start = 0;
    while start < len {
        let end = (start + 8).min(len);
        let mut partial = 0.0;
        for i in start..end {
            partial += term(i);
        }
        total += partial;
        start = end;
    }
    total
}

/// Weighted Hamming distance `sum_i w_i(q_i xor g_i)`.
pub fn weighted_distance(q: &BinaryCode, g: &BinaryCode, w: &WeightTable) -> Result<f64> {
    if q.len() != g.len() {
        return Err(Error::dimension(q.len(), g.len()));
    }
    if w.len() != q.len() {
        return Err(Error::dimension(q.len(), w.len()));
    }
    Ok(chunked_sum(q.len(), |i| w.get(i, q.bit(i) ^ g.bit(i))))
}

pub fn hamming_distance(q: &BinaryCode, g: &BinaryCode) -> Result<u32> {
    if q.len() != g.len() {
        return Err(Error::dimension(q.len(), g.len()));
    }
    Ok(hamming_packed(q.as_bytes(), g.as_bytes()))
}

#[inline]
pub(crate) fn hamming_packed(a: &[u8], b: &[u8]) -> u32 {
    let mut chunks_a = a.chunks_exact(8);
    let mut chunks_b = b.chunks_exact(8);
    let mut total = 0;
    for (x, y) in chunks_a.by_ref().zip(chunks_b.by_ref()) {
        let x = u64::from_le_bytes(x.try_into().unwrap());
        let y = u64::from_le_bytes(y.try_into().unwrap());
        total += (x ^ y).count_ones();
    }
    for (x, y) in chunks_a.remainder().iter().zip(chunks_b.remainder()) {
        total += (x ^ y).count_ones();
    }
    total
}

/// Per-query precomputation.
///
/// The query is folded into the weights (`what[i][x] = w_i(x xor q_i)`), so the
/// distance of a code depends on its own bits only. `minimal` picks the cheaper value
/// for every bit (ties go to 0), `deltas[i]` is the extra cost of flipping bit `i` of
/// `minimal`, and `order` lists the bits by ascending delta (ties by bit index).
#[derive(Clone, Debug)]
pub struct QueryContext {
    folded: Vec<[f64; 2]>,
    minimal: BinaryCode,
    base_weight: f64,
    deltas: Vec<f64>,
    order: Vec<usize>,
}

impl QueryContext {
    pub fn new(q: &BinaryCode, w: &WeightTable) -> Result<Self> {
        if w.len() != q.len() {
            return Err(Error::dimension(q.len(), w.len()));
        }
        let folded = w
            .entries()
            .iter()
            .enumerate()
            .map(|(i, &[same, diff])| if q.bit(i) { [diff, same] } else { [same, diff] })
            .collect();
        QueryContext::from_folded(folded)
    }

    /// Builds a context directly from query-folded weights.
    pub fn from_folded(folded: Vec<[f64; 2]>) -> Result<Self> {
        check_bits(folded.len())?;
        for (bit, pair) in folded.iter().enumerate() {
            for &value in pair {
                if !value.is_finite() {
                    return Err(Error::InvalidWeight { bit, value });
                }
            }
        }
        let bits = folded.len();
        let mut minimal = BinaryCode::zeros(bits)?;
        let mut deltas = Vec::with_capacity(bits);
        for (i, &[w0, w1]) in folded.iter().enumerate() {
            if w0 <= w1 {
                deltas.push(w1 - w0);
            } else {
                minimal.set(i, true);
                deltas.push(w0 - w1);
            }
        }
        let base_weight = chunked_sum(bits, |i| folded[i][minimal.bit(i) as usize]);
        let mut order: Vec<usize> = (0..bits).collect();
        order.sort_by(|&a, &b| deltas[a].total_cmp(&deltas[b]));
        Ok(QueryContext {
            folded,
            minimal,
            base_weight,
            deltas,
            order,
        })
    }

    /// Context of the bits `start..start + len`, re-derived from the folded weights.
    pub fn span(&self, start: usize, len: usize) -> Result<QueryContext> {
        if start + len > self.bits() {
            return Err(Error::argument(format!(
                "span {start}..{} exceeds {} bits",
                start + len,
                self.bits()
            )));
        }
        QueryContext::from_folded(self.folded[start..start + len].to_vec())
    }

    pub fn bits(&self) -> usize {
        self.folded.len()
    }

    pub fn folded(&self) -> &[[f64; 2]] {
        &self.folded
    }

    /// The code with the smallest possible distance to the query.
    pub fn minimal(&self) -> &BinaryCode {
        &self.minimal
    }

    pub fn base_weight(&self) -> f64 {
        self.base_weight
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `sum_i what_i(g_i)`; equals [`weighted_distance`] of the originating query.
    pub fn distance(&self, g: &BinaryCode) -> Result<f64> {
        if g.len() != self.bits() {
            return Err(Error::dimension(self.bits(), g.len()));
        }
        Ok(chunked_sum(self.bits(), |i| {
            self.folded[i][g.bit(i) as usize]
        }))
    }

    /// Sum of folded weights of a code given by its integer key (`bits() <= 64`).
    pub fn key_weight(&self, key: u64) -> f64 {
        debug_assert!(self.bits() <= 64);
        chunked_sum(self.bits(), |i| self.folded[i][((key >> i) & 1) as usize])
    }

    /// Test hook: breaks the sorted-delta invariant by making the first ranked bit
    /// the most expensive one, without re-sorting.
    #[doc(hidden)]
    pub fn inject_fault(&mut self) {
        if self.order.len() < 2 {
            return;
        }
        let first = self.order[0];
        let last = self.order[self.order.len() - 1];
        self.deltas[first] = self.deltas[last] + 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> BinaryCode {
        s.parse().unwrap()
    }

    fn example_weights() -> WeightTable {
        WeightTable::from_mismatch_costs(&[0.4, 0.1, 0.3, 0.2]).unwrap()
    }

    #[test]
    fn packing_is_little_endian_within_bytes() {
        let c = code("1000000001");
        assert_eq!(c.as_bytes(), &[0b0000_0001, 0b0000_0010]);
        assert_eq!(c.key(), Some(0b10_0000_0001));
        assert_eq!(BinaryCode::from_key(0b10_0000_0001, 10).unwrap(), c);
        assert_eq!(c.to_string(), "1000000001");
    }

    #[test]
    fn rejects_bad_lengths_and_padding() {
        assert!(matches!(
            BinaryCode::zeros(0),
            Err(Error::UnsupportedLength { .. })
        ));
        assert!(matches!(
            BinaryCode::zeros(257),
            Err(Error::UnsupportedLength { .. })
        ));
        assert!(BinaryCode::zeros(256).is_ok());
        assert!(BinaryCode::from_bytes(7, &[0x80]).is_err());
        assert!(BinaryCode::from_bytes(7, &[0x7f]).is_ok());
        assert!(CodeSet::from_packed(7, vec![0x01, 0x81]).is_err());
        assert!("01x".parse::<BinaryCode>().is_err());
    }

    #[test]
    fn substring_keys_cross_byte_boundaries() {
        let c = code("0000001111000000");
        assert_eq!(c.substring_key(6, 4), 0b1111);
        assert_eq!(c.substring_key(4, 4), 0b1100);
        assert_eq!(c.substring_key(8, 8), 0b11);
        let all = code(&"1".repeat(200));
        assert_eq!(all.substring_key(70, 64), u64::MAX);
    }

    #[test]
    fn weighted_distance_examples() {
        let zero = WeightTable::new(vec![[0.0, 0.5]; 4]).unwrap();
        assert_eq!(
            weighted_distance(&code("0110"), &code("0110"), &zero).unwrap(),
            0.0
        );

        let d = weighted_distance(&code("0110"), &code("1001"), &example_weights()).unwrap();
        assert!((d - 1.0).abs() < 1e-12);

        let unit = WeightTable::unit(4).unwrap();
        assert_eq!(
            weighted_distance(&code("0110"), &code("0000"), &unit).unwrap(),
            2.0
        );
    }

    #[test]
    fn weighted_distance_dimension_errors() {
        let w = WeightTable::unit(4).unwrap();
        assert!(matches!(
            weighted_distance(&code("0110"), &code("01100"), &w),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            weighted_distance(&code("01101"), &code("01100"), &w),
            Err(Error::Dimension { .. })
        ));
        assert!(hamming_distance(&code("01"), &code("011")).is_err());
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(matches!(
            WeightTable::new(vec![[0.0, f64::NAN]]),
            Err(Error::InvalidWeight { bit: 0, .. })
        ));
        assert!(WeightTable::new(vec![[0.0, 1.0], [-0.5, 1.0]]).is_err());
        assert!(QueryContext::from_folded(vec![[f64::INFINITY, 0.0]]).is_err());
    }

    #[test]
    fn context_example() {
        let ctx = QueryContext::new(&code("0110"), &example_weights()).unwrap();
        assert_eq!(*ctx.minimal(), code("0110"));
        assert_eq!(ctx.base_weight(), 0.0);
        assert_eq!(ctx.deltas(), &[0.4, 0.1, 0.3, 0.2]);
        // 1-based [2, 4, 3, 1]
        assert_eq!(ctx.order(), &[1, 3, 2, 0]);

        assert_eq!(ctx.distance(&code("0110")).unwrap(), 0.0);
        assert_eq!(ctx.distance(&code("0010")).unwrap(), 0.1);
        assert!((ctx.distance(&code("1001")).unwrap() - 1.0).abs() < 1e-12);
        assert!(ctx.distance(&code("011")).is_err());
    }

    #[test]
    fn context_unit_and_degenerate_weights() {
        let q = code("1011001");
        let ctx = QueryContext::new(&q, &WeightTable::unit(7).unwrap()).unwrap();
        assert_eq!(*ctx.minimal(), q);
        assert_eq!(ctx.base_weight(), 0.0);
        assert!(ctx.deltas().iter().all(|&d| d == 1.0));
        assert_eq!(ctx.order(), &[0, 1, 2, 3, 4, 5, 6]);

        let ctx = QueryContext::from_folded(vec![[0.7, 0.7]; 5]).unwrap();
        assert_eq!(*ctx.minimal(), BinaryCode::zeros(5).unwrap());
        assert!(ctx.deltas().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn asymmetric_weights_pick_cheaper_side() {
        // w(0) > w(1) on bit 1: agreeing costs more than disagreeing.
        let w = WeightTable::new(vec![[0.0, 1.0], [2.0, 0.5]]).unwrap();
        let ctx = QueryContext::new(&code("00"), &w).unwrap();
        assert_eq!(*ctx.minimal(), code("01"));
        assert_eq!(ctx.base_weight(), 0.5);
        assert_eq!(ctx.deltas(), &[1.0, 1.5]);
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&code("0110"), &code("0110")).unwrap(), 0);
        assert_eq!(hamming_distance(&code("0110"), &code("1001")).unwrap(), 4);
        assert_eq!(hamming_distance(&code("0110"), &code("0010")).unwrap(), 1);
        let a = code(&"10".repeat(100));
        let b = code(&"01".repeat(100));
        assert_eq!(hamming_distance(&a, &b).unwrap(), 200);
    }

    #[test]
    fn span_context_slices_folded_weights() {
        let ctx = QueryContext::new(&code("0110"), &example_weights()).unwrap();
        let span = ctx.span(0, 2).unwrap();
        assert_eq!(span.key_weight(0b10), 0.0); // s = "01"
        assert_eq!(span.key_weight(0b00), 0.1); // s = "00"
        assert!(ctx.span(3, 2).is_err());
    }
}
