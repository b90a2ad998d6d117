//! Seeded data generators: LSH binarization, synthetic weights, random and planted
//! code sets, and the instance on which Hamming-first search goes wrong.
//!
//! Everything here is a pure function of its arguments and seed.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::code::{check_bits, BinaryCode, CodeSet, WeightTable};
use crate::error::{Error, Result};
use crate::io::VectorSet;

/// Random-hyperplane hash: bit `i` is 1 iff `dot(x, projections[i]) >= thresholds[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LshModel {
    pub seed: u64,
    pub d: usize,
    /// `b` rows of `d` standard-normal entries.
    pub projections: Vec<f32>,
    pub thresholds: Vec<f32>,
}

impl LshModel {
    pub fn new(d: usize, bits: usize, seed: u64) -> Result<Self> {
        check_bits(bits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let projections = (0..bits * d).map(|_| rng.sample(StandardNormal)).collect();
        Ok(LshModel {
            seed,
            d,
            projections,
            thresholds: vec![0.0; bits],
        })
    }

    pub fn bits(&self) -> usize {
        self.thresholds.len()
    }

    pub fn hash(&self, x: &[f32]) -> Result<BinaryCode> {
        if x.len() != self.d {
            return Err(Error::dimension(self.d, x.len()));
        }
        let mut code = BinaryCode::zeros(self.bits())?;
        for (i, &t) in self.thresholds.iter().enumerate() {
            let p = &self.projections[i * self.d..(i + 1) * self.d];
            let dot: f64 = p.iter().zip(x).map(|(&a, &b)| a as f64 * b as f64).sum();
            if dot >= t as f64 {
                code.set(i, true);
            }
        }
        Ok(code)
    }

    pub fn hash_all(&self, vs: &VectorSet) -> Result<CodeSet> {
        let mut out = CodeSet::with_capacity(self.bits(), vs.n)?;
        for row in vs.rows() {
            out.push(&self.hash(row)?)?;
        }
        Ok(out)
    }
}

/// Binarizes every vector with a fresh [`LshModel`] drawn from `seed`.
pub fn binarize_lsh(vs: &VectorSet, bits: usize, seed: u64) -> Result<CodeSet> {
    if bits == 0 {
        return Err(Error::UnsupportedLength {
            bits,
            max: crate::MAX_BITS,
        });
    }
    LshModel::new(vs.d, bits, seed)?.hash_all(vs)
}

/// Fraction of codes with each bit set.
pub fn bit_balance(codes: &CodeSet) -> Vec<f64> {
    let mut ones = vec![0usize; codes.bits()];
    for c in codes.iter() {
        for (i, count) in ones.iter_mut().enumerate() {
            *count += c.bit(i) as usize;
        }
    }
    let n = codes.len().max(1) as f64;
    ones.into_iter().map(|c| c as f64 / n).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightScheme {
    /// `(0, 1)` on every bit: plain Hamming distance.
    Unit,
    /// `w(0) = 0`, `w(1)` uniform in `[0.5, 1.5]`.
    UniformAsym,
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(WeightScheme::Unit),
            "uniform-asym" => Ok(WeightScheme::UniformAsym),
            other => Err(Error::argument(format!(
                "unknown weight scheme {other:?} (expected unit or uniform-asym)"
            ))),
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightScheme::Unit => "unit",
            WeightScheme::UniformAsym => "uniform-asym",
        })
    }
}

pub fn synth_weights(bits: usize, seed: u64, scheme: WeightScheme) -> Result<WeightTable> {
    check_bits(bits)?;
    match scheme {
        WeightScheme::Unit => WeightTable::unit(bits),
        WeightScheme::UniformAsym => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            WeightTable::new(
                (0..bits)
                    .map(|_| [0.0, rng.random_range(0.5..=1.5)])
                    .collect(),
            )
        }
    }
}

pub fn random_code(rng: &mut impl Rng, bits: usize) -> BinaryCode {
    let mut bytes = [0u8; 32];
    rng.fill(&mut bytes[..]);
    let len = crate::code::byte_len(bits);
    if !bits.is_multiple_of(8) {
        bytes[len - 1] &= (1u8 << (bits % 8)) - 1;
    }
    BinaryCode::from_bytes(bits, &bytes[..len]).expect("padding cleared")
}

/// `n` independent uniform codes.
pub fn random_codes(n: usize, bits: usize, seed: u64) -> Result<CodeSet> {
    check_bits(bits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = CodeSet::with_capacity(bits, n)?;
    for _ in 0..n {
        set.push(&random_code(&mut rng, bits))?;
    }
    Ok(set)
}

/// `n` vectors with independent standard-normal components.
pub fn gaussian_vectors(n: usize, d: usize, seed: u64) -> VectorSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    VectorSet::new(d, values).expect("n * d values")
}

/// Copy of `center` with each bit flipped independently with probability `p`.
pub fn perturb(rng: &mut impl Rng, center: &BinaryCode, p: f64) -> BinaryCode {
    let mut c = *center;
    for i in 0..c.len() {
        if rng.random_bool(p) {
            c.flip(i);
        }
    }
    c
}

/// A database with a tight cluster of codes around every query.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub codes: CodeSet,
    pub queries: Vec<BinaryCode>,
}

/// Draws `queries` uniform queries, then `cluster` perturbed copies of each (bit
/// flip probability `flip`), padded to `n` codes with uniform background. The
/// cluster members are scattered over the id range.
pub fn planted_instance(
    n: usize,
    bits: usize,
    queries: usize,
    cluster: usize,
    flip: f64,
    seed: u64,
) -> Result<PlantedInstance> {
    check_bits(bits)?;
    if queries * cluster > n {
        return Err(Error::argument(format!(
            "{queries} clusters of {cluster} do not fit in {n} codes"
        )));
    }
    if !(0.0..=1.0).contains(&flip) {
        return Err(Error::argument(format!(
            "flip probability {flip} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qs: Vec<BinaryCode> = (0..queries).map(|_| random_code(&mut rng, bits)).collect();
    let mut rows: Vec<BinaryCode> = Vec::with_capacity(n);
    for q in &qs {
        for _ in 0..cluster {
            rows.push(perturb(&mut rng, q, flip));
        }
    }
    while rows.len() < n {
        rows.push(random_code(&mut rng, bits));
    }
    rows.shuffle(&mut rng);
    Ok(PlantedInstance {
        codes: CodeSet::from_codes(bits, &rows)?,
        queries: qs,
    })
}

/// Instance where the weighted 1-NN sits at Hamming radius 3 on three nearly free
/// bits, while `fillers` codes at Hamming radius 1 flip expensive bits.
///
/// Returns `(codes, query, weights)`; the true nearest neighbor is id 0.
pub fn mih_adversarial(bits: usize, fillers: usize) -> Result<(CodeSet, BinaryCode, WeightTable)> {
    if bits < 4 {
        return Err(Error::argument(
            "the adversarial instance needs at least 4 bits",
        ));
    }
    check_bits(bits)?;
    let mut costs = vec![1.0; bits];
    costs[..3].fill(0.01);
    let weights = WeightTable::from_mismatch_costs(&costs)?;
    let query = BinaryCode::zeros(bits)?;
    let mut far = query;
    for i in 0..3 {
        far.flip(i);
    }
    let mut codes = vec![far];
    for j in 0..fillers {
        let mut c = query;
        c.flip(3 + j % (bits - 3));
        codes.push(c);
    }
    Ok((CodeSet::from_codes(bits, &codes)?, query, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{hamming_distance, weighted_distance};

    #[test]
    fn negated_vectors_get_complementary_codes() {
        let vs = gaussian_vectors(50, 16, 1);
        let neg = VectorSet::new(16, vs.values.iter().map(|v| -v).collect()).unwrap();
        let a = binarize_lsh(&vs, 64, 7).unwrap();
        let b = binarize_lsh(&neg, 64, 7).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(hamming_distance(&x, &y).unwrap(), 64);
        }
    }

    #[test]
    fn binarize_is_deterministic() {
        let vs = gaussian_vectors(20, 8, 3);
        assert_eq!(
            binarize_lsh(&vs, 37, 11).unwrap(),
            binarize_lsh(&vs, 37, 11).unwrap()
        );
        assert_ne!(
            binarize_lsh(&vs, 37, 11).unwrap(),
            binarize_lsh(&vs, 37, 12).unwrap()
        );
        assert!(binarize_lsh(&vs, 257, 1).is_err());
        assert!(binarize_lsh(&vs, 0, 1).is_err());
    }

    #[test]
    fn lsh_bits_are_balanced() {
        // Each bit is Binomial(1000, 1/2); leaving [0.4, 0.6] is a 6-sigma event.
        let vs = gaussian_vectors(1000, 32, 5);
        let codes = binarize_lsh(&vs, 32, 9).unwrap();
        for (i, p) in bit_balance(&codes).into_iter().enumerate() {
            assert!((0.4..=0.6).contains(&p), "bit {i}: {p}");
        }
    }

    #[test]
    fn weight_schemes() {
        let unit = synth_weights(20, 0, WeightScheme::Unit).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let a = random_code(&mut rng, 20);
            let b = random_code(&mut rng, 20);
            assert_eq!(
                weighted_distance(&a, &b, &unit).unwrap(),
                hamming_distance(&a, &b).unwrap() as f64
            );
        }

        let w = synth_weights(64, 3, WeightScheme::UniformAsym).unwrap();
        assert_eq!(w.len(), 64);
        for &[w0, w1] in w.entries() {
            assert_eq!(w0, 0.0);
            assert!((0.5..=1.5).contains(&w1));
        }
        assert_eq!(w, synth_weights(64, 3, WeightScheme::UniformAsym).unwrap());
        assert!("gaussian".parse::<WeightScheme>().is_err());
        assert_eq!(
            "uniform-asym".parse::<WeightScheme>().unwrap(),
            WeightScheme::UniformAsym
        );
    }

    #[test]
    fn random_codes_keep_padding_clear() {
        let set = random_codes(100, 13, 2).unwrap();
        assert_eq!(set.len(), 100);
        for c in set.iter() {
            assert_eq!(c.as_bytes()[1] >> 5, 0);
        }
    }

    #[test]
    fn planted_clusters_are_close() {
        let inst = planted_instance(2000, 64, 5, 100, 0.5 / 64.0, 1).unwrap();
        assert_eq!(inst.codes.len(), 2000);
        for q in &inst.queries {
            let close = inst
                .codes
                .iter()
                .filter(|c| hamming_distance(q, c).unwrap() <= 6)
                .count();
            assert!(close >= 100);
        }
        assert!(planted_instance(10, 8, 2, 6, 0.1, 0).is_err());
    }

    #[test]
    fn adversarial_layout() {
        let (codes, q, w) = mih_adversarial(16, 10).unwrap();
        assert_eq!(codes.len(), 11);
        assert_eq!(hamming_distance(&q, &codes.get(0)).unwrap(), 3);
        for i in 1..11 {
            assert_eq!(hamming_distance(&q, &codes.get(i)).unwrap(), 1);
            assert!(weighted_distance(&q, &codes.get(i), &w).unwrap() > 0.5);
        }
        assert!(weighted_distance(&q, &codes.get(0), &w).unwrap() < 0.05);
    }
}
