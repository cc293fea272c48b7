use proptest::prelude::*;
use runperm::generate::{runs_permutation, strict_permutation, sus_permutation, Interleave, Rng};
use runperm::perm::{CoderConfig, PermutationCoder};
use runperm::runs::{ascending_runs, head_run_profile, strict_ascending_runs, Direction};
use runperm::strict::StrictPermutationCoder;
use runperm::sus::{StrictSusCoder, SusCoder};
use runperm::BitVectorVariant;

fn inverse_of(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &v) in perm.iter().enumerate() {
        inv[v - 1] = i + 1;
    }
    inv
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn configs() -> Vec<CoderConfig> {
    let mut out = Vec::new();
    for arity in [2, 3, 5] {
        for mixed in [false, true] {
            for variant in [BitVectorVariant::Plain, BitVectorVariant::Compressed, BitVectorVariant::Sparse] {
                out.push(
                    CoderConfig::default()
                        .with_arity(arity)
                        .with_mixed(mixed)
                        .with_variant(variant),
                );
            }
        }
    }
    out
}

fn check_all<A, I>(perm: &[usize], apply: A, inverse: I)
where
    A: Fn(usize) -> runperm::Result<usize>,
    I: Fn(usize) -> runperm::Result<usize>,
{
    let inv = inverse_of(perm);
    for i in 1..=perm.len() {
        assert_eq!(apply(i).unwrap(), perm[i - 1], "apply({i}) on {perm:?}");
        assert_eq!(inverse(i).unwrap(), inv[i - 1], "inverse({i}) on {perm:?}");
    }
    assert!(apply(0).is_err());
    assert!(apply(perm.len() + 1).is_err());
    assert!(inverse(perm.len() + 1).is_err());
}

fn bytes_of(write: impl Fn(&mut Vec<u8>) -> runperm::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    write(&mut buf).unwrap();
    buf
}

#[test]
fn exhaustive_small_permutations() {
    for n in 1..=6 {
        let mut perm: Vec<usize> = (1..=n).collect();
        loop {
            let c = PermutationCoder::encode(&perm, CoderConfig::binary()).unwrap();
            check_all(&perm, |i| c.apply(i), |j| c.inverse(j));
            let c = PermutationCoder::encode(&perm, CoderConfig::default().with_arity(3).with_mixed(true)).unwrap();
            check_all(&perm, |i| c.apply(i), |j| c.inverse(j));
            let c = StrictPermutationCoder::encode(&perm, CoderConfig::binary(), BitVectorVariant::Sparse).unwrap();
            check_all(&perm, |i| c.apply(i), |j| c.inverse(j));
            let c = SusCoder::encode_sus(&perm, None, CoderConfig::binary()).unwrap();
            check_all(&perm, |i| c.apply(i), |j| c.inverse(j));
            let c = StrictSusCoder::encode(&perm, CoderConfig::binary()).unwrap();
            check_all(&perm, |i| c.apply(i), |j| c.inverse(j));
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }
}

#[test]
fn mixed_on_ascending_only_matches_plain_runs() {
    let mut rng = Rng::new(11);
    for _ in 0..50 {
        let rho = rng.range(1, 12);
        let lengths: Vec<usize> = (0..rho).map(|_| rng.range(1, 40)).collect();
        let perm = runs_permutation(&lengths, &vec![Direction::Ascending; rho], &mut rng).unwrap();
        let plain = PermutationCoder::encode(&perm, CoderConfig::default()).unwrap();
        let mixed = PermutationCoder::encode(&perm, CoderConfig::default().with_mixed(true)).unwrap();
        if mixed.run_lengths() == plain.run_lengths() {
            for i in 1..=perm.len() {
                assert_eq!(plain.apply_path_length(i).unwrap(), mixed.apply_path_length(i).unwrap());
            }
            assert_eq!(plain.measured_size_bits().sequences, mixed.measured_size_bits().sequences);
        }
        check_all(&perm, |i| mixed.apply(i), |j| mixed.inverse(j));
    }
}

#[test]
fn strict_inner_has_head_runs() {
    let mut rng = Rng::new(12);
    for tau in 1..30 {
        let perm = strict_permutation(200, tau, &mut rng).unwrap();
        let c = StrictPermutationCoder::encode(&perm, CoderConfig::binary(), BitVectorVariant::Compressed).unwrap();
        let profile = strict_ascending_runs(&perm).unwrap();
        let collapsed = c.collapsed();
        assert_eq!(ascending_runs(&collapsed).unwrap().run_count(), c.inner().run_count());
        assert!(c.inner().run_count() >= head_run_profile(&profile).run_count());
        check_all(&perm, |i| c.apply(i), |j| c.inverse(j));
    }
}

#[test]
fn corrupt_files_are_rejected() {
    let perm = vec![3, 1, 2, 6, 4, 5, 9, 7, 8, 10];
    let c = PermutationCoder::encode(&perm, CoderConfig::default().with_mixed(true)).unwrap();
    let buf = bytes_of(|w| c.write_to(w));
    for cut in [0, 4, buf.len() / 2, buf.len() - 1] {
        assert!(PermutationCoder::read_from(&mut &buf[..cut]).is_err());
    }
    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(PermutationCoder::read_from(&mut bad.as_slice()).is_err());
    assert!(SusCoder::read_from(&mut buf.as_slice()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn runs_coder_roundtrip(
        lengths in prop::collection::vec(2usize..30, 1..16),
        desc in prop::collection::vec(any::<bool>(), 16),
        seed in any::<u64>(),
        which in 0usize..18,
    ) {
        let mut rng = Rng::new(seed);
        let dirs: Vec<Direction> = desc[..lengths.len()]
            .iter()
            .map(|&d| if d { Direction::Descending } else { Direction::Ascending })
            .collect();
        let perm = runs_permutation(&lengths, &dirs, &mut rng).unwrap();
        let config = configs()[which];
        let c = PermutationCoder::encode(&perm, config).unwrap();
        check_all(&perm, |i| c.apply(i), |j| c.inverse(j));
        prop_assert_eq!(c.decode(), perm.clone());
        let n = perm.len() as f64;
        prop_assert!((c.payload_entropy_bits() - n * c.entropy()).abs() <= 1e-6 * (1.0 + n * c.entropy()));
        let buf = bytes_of(|w| c.write_to(w));
        let back = PermutationCoder::read_from(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(bytes_of(|w| back.write_to(w)), buf);
        prop_assert_eq!(back.decode(), perm);
    }

    #[test]
    fn depth_limit_and_average_depth(perm_seed in any::<u64>(), n in 2usize..400, arity in 2usize..6) {
        let mut rng = Rng::new(perm_seed);
        let perm = runperm::generate::random_permutation(n, &mut rng);
        let c = PermutationCoder::encode(&perm, CoderConfig::default().with_arity(arity)).unwrap();
        let cap = runperm::perm::depth_limit_for(c.run_count(), arity);
        prop_assert!(c.tree().max_depth() <= cap);
        prop_assert!(c.average_depth() <= 1.0 + c.entropy() / (arity as f64).log2() + 1.0);
    }

    #[test]
    fn strict_coder_roundtrip(n in 1usize..300, tau_frac in 0.0f64..1.0, seed in any::<u64>(), sparse in any::<bool>()) {
        let mut rng = Rng::new(seed);
        let tau = 1 + ((n - 1) as f64 * tau_frac) as usize;
        let perm = strict_permutation(n, tau, &mut rng).unwrap();
        let variant = if sparse { BitVectorVariant::Sparse } else { BitVectorVariant::Compressed };
        let c = StrictPermutationCoder::encode(&perm, CoderConfig::default(), variant).unwrap();
        prop_assert_eq!(c.strict_run_count(), tau);
        check_all(&perm, |i| c.apply(i), |j| c.inverse(j));
        let buf = bytes_of(|w| c.write_to(w));
        let back = StrictPermutationCoder::read_from(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(bytes_of(|w| back.write_to(w)), buf);
    }

    #[test]
    fn sus_coders_roundtrip(n in 1usize..300, k_frac in 0.0f64..1.0, seed in any::<u64>(), strict in any::<bool>(), rr in any::<bool>()) {
        let mut rng = Rng::new(seed);
        let k = 1 + ((n - 1) as f64 * k_frac * k_frac) as usize;
        let law = if rr { Interleave::RoundRobin } else { Interleave::Uniform };
        let (perm, planted) = sus_permutation(n, k, law, strict, &mut rng).unwrap();
        let c = SusCoder::encode_sus(&perm, None, CoderConfig::default()).unwrap();
        prop_assert!(c.k() <= k);
        check_all(&perm, |i| c.apply(i), |j| c.inverse(j));
        let planted_coder = SusCoder::encode_sus(&perm, Some(&planted), CoderConfig::binary()).unwrap();
        check_all(&perm, |i| planted_coder.apply(i), |j| planted_coder.inverse(j));
        prop_assert!(planted_coder.inner().run_count() <= k);
        let s = StrictSusCoder::encode(&perm, CoderConfig::default()).unwrap();
        check_all(&perm, |i| s.apply(i), |j| s.inverse(j));
        if strict {
            prop_assert!(s.inverse_coder().run_count() <= k);
        }
        let buf = bytes_of(|w| c.write_to(w));
        let back = SusCoder::read_from(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(bytes_of(|w| back.write_to(w)), buf);
        prop_assert_eq!(back.decode(), perm);
    }
}
