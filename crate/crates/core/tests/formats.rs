use modmi::ingestion::{
    decode_feature_matrix, decode_labels, encode_feature_matrix, encode_labels, resample_indices,
    resample_nearest, FeatureMatrix, LabelSequence,
};
use modmi::quantizer::{decode_codebook, encode_codebook, Codebook, Normalization};
use modmi::{align, load_codebook, read_feature_matrix, read_labels, save_codebook};
use proptest::collection::vec;
use proptest::prelude::*;

fn finite_f32() -> impl Strategy<Value = f32> {
    any::<f32>().prop_filter("finite", |v| v.is_finite())
}

fn matrix() -> impl Strategy<Value = FeatureMatrix> {
    (1usize..20, 1usize..9).prop_flat_map(|(r, d)| {
        vec(finite_f32(), r * d).prop_map(move |v| FeatureMatrix::new(r, d, v, 25.0, "m").unwrap())
    })
}

fn codebook() -> impl Strategy<Value = Codebook> {
    (1usize..10, 1usize..6, any::<u64>(), any::<bool>()).prop_flat_map(|(k, d, seed, norm)| {
        (
            vec(finite_f32(), k * d),
            vec(finite_f32(), d),
            vec(finite_f32().prop_filter("nonzero", |s| *s != 0.0), d),
        )
            .prop_map(move |(c, m, s)| {
                let n = norm.then_some(Normalization { mean: m, stddev: s });
                Codebook::new(k, d, c, seed, n).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn fmx1_round_trips_bit_exactly(m in matrix()) {
        let bytes = encode_feature_matrix(&m).unwrap();
        let back = decode_feature_matrix(&bytes).unwrap();
        let same = back.values().iter().zip(m.values()).all(|(a, b)| a.to_bits() == b.to_bits());
        prop_assert!(same && back.rows() == m.rows() && back.dims() == m.dims());
    }

    #[test]
    fn lbl1_round_trips_bit_exactly(symbols in vec(0u32..1000, 1..200), extra in 0u32..50) {
        let a = symbols.iter().max().unwrap() + 1 + extra;
        let seq = LabelSequence::new(symbols, a, 25.0, "t").unwrap();
        let back = decode_labels(&encode_labels(&seq).unwrap()).unwrap();
        prop_assert_eq!(back.symbols(), seq.symbols());
        prop_assert_eq!(back.alphabet_size(), a);
    }

    #[test]
    fn kmc1_round_trips_bit_exactly(cb in codebook()) {
        let bytes = encode_codebook(&cb);
        let back = decode_codebook(&bytes).unwrap();
        prop_assert_eq!(encode_codebook(&back), bytes);
    }

    #[test]
    fn resample_length_and_identity(len in 1usize..1_000_000, src in 1u32..200, dst in 1u32..200) {
        let idx = resample_indices(len, src as f64, dst as f64);
        let expected = ((len as f64 * dst as f64 / src as f64).round() as usize).max(1);
        prop_assert_eq!(idx.len(), expected);
        prop_assert!(idx.iter().all(|&j| j < len));
        prop_assert!(idx.windows(2).all(|w| w[0] <= w[1]));
        if src == dst {
            prop_assert!(idx.iter().enumerate().all(|(i, &j)| i == j));
        }
    }

    #[test]
    fn aligned_streams_share_length_and_rate(
        lens in vec(1usize..400, 2..5),
        rates in vec(prop_oneof![Just(25.0), Just(50.0), Just(100.0), Just(30.0)], 4),
        target in prop_oneof![Just(25.0), Just(12.5), Just(50.0)],
    ) {
        let streams: Vec<LabelSequence> = lens.iter().zip(&rates)
            .map(|(&l, &r)| LabelSequence::from_symbols((0..l as u32).collect(), r, "s").unwrap())
            .collect();
        let ds = align(&streams, target).unwrap();
        prop_assert!(ds.streams().iter().all(|s| s.len() == ds.len() && s.sample_rate_hz() == target));
        let min = streams.iter().map(|s| resample_nearest(s, target).unwrap().len()).min().unwrap();
        prop_assert_eq!(ds.len(), min);
    }
}

#[test]
fn file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let m = FeatureMatrix::new(2, 3, vec![0.1, 0.2, -0.3, 4.0, 5.5, f32::MIN_POSITIVE], 25.0, "m").unwrap();
    modmi::write_feature_matrix(&m, dir.path().join("m.fmx")).unwrap();
    assert_eq!(read_feature_matrix(dir.path().join("m.fmx")).unwrap(), m);

    let l = LabelSequence::new(vec![0, 4, 2], 217, 25.0, "phones").unwrap();
    modmi::write_labels(&l, dir.path().join("phones.lbl")).unwrap();
    assert_eq!(read_labels(dir.path().join("phones.lbl")).unwrap(), l);

    modmi::ingestion::write_labels_text(&l, dir.path().join("phones.txt")).unwrap();
    let text = read_labels(dir.path().join("phones.txt")).unwrap();
    assert_eq!(text.symbols(), l.symbols());
    assert_eq!(text.alphabet_size(), 5);

    let cb = Codebook::new(2, 2, vec![1.0, 2.0, 3.0, 4.0], 9, None).unwrap();
    save_codebook(&cb, dir.path().join("c.kmc")).unwrap();
    assert_eq!(load_codebook(dir.path().join("c.kmc")).unwrap(), cb);
    let bytes = std::fs::read(dir.path().join("c.kmc")).unwrap();
    std::fs::write(dir.path().join("short.kmc"), &bytes[..bytes.len() - 3]).unwrap();
    assert!(load_codebook(dir.path().join("short.kmc")).is_err());
}
