use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wham::fixtures::{gaussian_vectors, random_codes, synth_weights, WeightScheme};
use wham::io::{
    load_codes, load_index, load_weights, read_bvecs, read_fvecs, read_vectors, save_codes,
    save_index, save_weights, write_bvecs, write_fvecs, VectorSet,
};
use wham::{CodeSet, Error, MultiIndex, WeightTable};

#[test]
fn ten_thousand_codes_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.whc");
    let b = dir.path().join("b.whc");
    let codes = random_codes(10_000, 64, 1).unwrap();
    save_codes(&a, &codes).unwrap();
    let back = load_codes(&a).unwrap();
    assert_eq!(back, codes);
    save_codes(&b, &back).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::metadata(&a).unwrap().len(), 4 + 4 + 8 + 10_000 * 8);
}

#[test]
fn seven_bit_codes_keep_padding_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seven.whc");
    let codes = random_codes(300, 7, 2).unwrap();
    save_codes(&path, &codes).unwrap();
    let bytes = fs::read(&path).unwrap();
    assert!(bytes[16..].iter().all(|b| b & 0x80 == 0));
    assert_eq!(load_codes(&path).unwrap(), codes);
}

#[test]
fn corrupt_magic_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.whc");
    save_codes(&path, &random_codes(3, 9, 3).unwrap()).unwrap();
    let mut bytes = fs::read(&path).unwrap();
    bytes[..4].copy_from_slice(b"WHI1");
    fs::write(&path, &bytes).unwrap();
    assert!(matches!(
        load_codes(&path),
        Err(Error::Format { offset: 0, .. })
    ));
    assert!(matches!(load_index(&path), Err(Error::Format { .. })));
}

#[test]
fn weights_and_index_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for bits in [1, 7, 13, 32, 63, 100] {
        let w = WeightTable::new(
            (0..bits)
                .map(|_| [rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)])
                .collect(),
        )
        .unwrap();
        let wp = dir.path().join(format!("w{bits}.whw"));
        save_weights(&wp, &w).unwrap();
        assert_eq!(load_weights(&wp).unwrap(), w);

        let codes = random_codes(rng.random_range(0..2000), bits, bits as u64).unwrap();
        let m = rng.random_range(bits.div_ceil(64)..=bits.min(5));
        let ix = MultiIndex::build(codes, m).unwrap();
        let ip = dir.path().join(format!("i{bits}.whi"));
        save_index(&ip, &ix).unwrap();
        let back = load_index(&ip).unwrap();
        assert_eq!(back, ix);
        let again = dir.path().join("again.whi");
        save_index(&again, &back).unwrap();
        assert_eq!(fs::read(&ip).unwrap(), fs::read(&again).unwrap());
    }
}

#[test]
fn truncated_index_is_rejected_at_every_cut() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.whi");
    let ix = MultiIndex::build(random_codes(50, 12, 5).unwrap(), 2).unwrap();
    save_index(&path, &ix).unwrap();
    let bytes = fs::read(&path).unwrap();
    for cut in 0..bytes.len() {
        let res = wham::io::read_index(&bytes[..cut]);
        assert!(
            res.is_err(),
            "accepted a file cut at {cut} of {}",
            bytes.len()
        );
    }
}

#[test]
fn vector_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let vs = gaussian_vectors(25, 6, 7);
    let f = dir.path().join("g.fvecs");
    write_fvecs(&f, &vs).unwrap();
    assert_eq!(read_fvecs(&f).unwrap(), vs);
    assert_eq!(read_vectors(&f, Some(10)).unwrap().n, 10);

    let bytes = VectorSet::new(3, vec![1.0, 2.0, 250.0, 0.0, 7.0, 9.0]).unwrap();
    let b = dir.path().join("b.bvecs");
    write_bvecs(&b, &bytes).unwrap();
    assert_eq!(read_bvecs(&b).unwrap(), bytes);
    assert!(read_vectors(dir.path().join("x.txt"), None).is_err());
}

#[test]
fn empty_code_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.whc");
    let empty = CodeSet::new(40).unwrap();
    save_codes(&path, &empty).unwrap();
    assert_eq!(load_codes(&path).unwrap(), empty);
    let w = synth_weights(40, 0, WeightScheme::Unit).unwrap();
    assert_eq!(w.len(), 40);
}
