use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ppturbo::poly::{null_class_size, null_polynomials_up_to};
use ppturbo::search::{class_count, class_size, enumerate_candidates, enumerate_classes};
use ppturbo::spectrum::{distance_spectrum_with, SpectrumOptions};
use ppturbo::turbo::{rsc_encode_terminated, RscSpec};
use ppturbo::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn random_perm(len: usize, seed: u64) -> Permutation {
    let mut v: Vec<usize> = (0..len).collect();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Permutation::new(v).unwrap()
}

fn arb_poly(modulus: u64) -> impl Strategy<Value = ModPoly> {
    (0..modulus, 0..modulus, 0..modulus, 0..modulus)
        .prop_map(move |(a, b, c, d)| ModPoly::new(modulus, [a, b, c, d]).unwrap())
}

fn arb_modulus_poly(max: u64) -> impl Strategy<Value = ModPoly> {
    (2..=max).prop_flat_map(arb_poly)
}

// --- null polynomials -----------------------------------------------------

#[test]
fn null_polynomials_vanish_everywhere() {
    for l in 2..=64u64 {
        for n in null_polynomials(l).unwrap() {
            assert!((0..l).all(|x| n.eval(x).unwrap() == 0), "{n} mod {l}");
            assert_eq!(n.coeff(0), 0);
        }
    }
}

#[test]
fn null_set_size_closed_form() {
    for l in 2..=600u64 {
        let want = gcd(l, 6) * gcd(l, 2);
        assert_eq!(null_polynomials(l).unwrap().len() as u64, want, "L = {l}");
        assert_eq!(null_class_size(l), want);
        assert_eq!(
            null_polynomials_up_to(l, 2).unwrap().len() as u64,
            gcd(l, 2)
        );
    }
}

#[test]
fn triangular_numbers_mod_six() {
    for n in 0..=10_000u64 {
        let t = n * (n + 1) / 2;
        assert_eq!(triangular_class(n), t % 3, "n = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn equivalence_is_pointwise_equality(l in prop::sample::select(vec![8u64, 12, 36]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let p = ModPoly::new(l, [rng.gen_range(0..l), rng.gen_range(0..l), rng.gen_range(0..l), rng.gen_range(0..l)]).unwrap();
        // bias half the cases towards genuinely equivalent pairs
        let q = if rng.gen_bool(0.5) {
            let nulls = null_polynomials(l).unwrap();
            p.add(&nulls[rng.gen_range(0..nulls.len())]).unwrap()
        } else {
            ModPoly::new(l, [p.coeff(0), rng.gen_range(0..l), rng.gen_range(0..l), rng.gen_range(0..l)]).unwrap()
        };
        prop_assert_eq!(p.equivalent(&q).unwrap(), p.values() == q.values());
    }

    #[test]
    fn adding_a_null_polynomial_keeps_the_permutation(p in arb_modulus_poly(72)) {
        let l = p.modulus();
        for n in null_polynomials(l).unwrap() {
            let q = p.add(&n).unwrap();
            prop_assert_eq!(q.values(), p.values());
            prop_assert_eq!(q.effective_degree(), p.effective_degree());
            prop_assert_eq!(q.canonical(), p.canonical());
        }
    }

    #[test]
    fn printed_form_parses_back(p in arb_modulus_poly(400)) {
        let text = p.to_string();
        prop_assert_eq!(ModPoly::parse(&text, p.modulus()).unwrap(), p);
    }

    #[test]
    fn parser_never_panics(text in "[0-9x^+* ]{0,24}", l in 2u64..1000) {
        let _ = ModPoly::parse(&text, l);
    }
}

// --- spread ---------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn spread_is_at_least_two_and_inverse_invariant(len in 2usize..60, seed in any::<u64>()) {
        let p = random_perm(len, seed);
        let d = spread(&p).unwrap().d_value;
        prop_assert!(d >= 2);
        prop_assert_eq!(spread(&p.inverse()).unwrap().d_value, d);
        let (i, j) = spread(&p).unwrap().witness;
        prop_assert_eq!(lee_point_distance(i, j, &p).unwrap(), d);
    }
}

#[test]
fn circular_distance_is_a_metric() {
    let l = 16;
    for a in 0..l {
        for b in 0..l {
            assert_eq!(circular_distance(a, b, l), circular_distance(b, a, l));
            assert!(circular_distance(a, b, l) <= l / 2);
            for c in 0..l {
                assert!(
                    circular_distance(a, c, l)
                        <= circular_distance(a, b, l) + circular_distance(b, c, l)
                );
            }
        }
    }
}

// --- encoder --------------------------------------------------------------

#[test]
fn termination_returns_to_zero() {
    let spec = RscSpec::lte();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    use rand::Rng;
    for len in [8usize, 16, 40] {
        for _ in 0..1000 {
            let info: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2)).collect();
            let out = rsc_encode_terminated(&info, &spec).unwrap();
            // replay the systematic stream with its tail through the trellis
            let mut state = 0u32;
            for &b in info.iter().chain(&out.tail_sys) {
                state = u32::from(spec.branch(state, u32::from(b)).next);
            }
            assert_eq!(state, 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn codeword_length_and_linearity(len in 4usize..48, seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let perm = random_perm(len, seed);
        let bits = |s: u64| -> Vec<u8> { (0..len).map(|k| ((s.rotate_left(k as u32 * 7) >> (k % 64)) & 1) as u8).collect() };
        let (u, v) = (bits(a), bits(b));
        let sum: Vec<u8> = u.iter().zip(&v).map(|(x, y)| x ^ y).collect();
        let cu = turbo_encode(&u, &perm).unwrap().bits();
        let cv = turbo_encode(&v, &perm).unwrap().bits();
        let cs = turbo_encode(&sum, &perm).unwrap().bits();
        prop_assert_eq!(cu.len(), 3 * len + 12);
        let xor: Vec<u8> = cu.iter().zip(&cv).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(cs, xor);
    }
}

#[test]
fn rate_matches_codeword_length() {
    for l in [8u64, 40, 64, 352] {
        assert_eq!(code_rate(l).unwrap(), Ratio::new(l, 3 * l + 12));
    }
}

// --- spectrum -------------------------------------------------------------

#[test]
fn minimum_weight_matches_exhaustive_scan() {
    let perm = ModPoly::cubic(16, 3, 4, 0)
        .unwrap()
        .as_permutation()
        .unwrap();
    let oracle = brute_force_spectrum(&perm, 1).unwrap();
    let mut best = usize::MAX;
    for word in 1u32..(1 << 16) {
        let info: Vec<u8> = (0..16).map(|k| ((word >> k) & 1) as u8).collect();
        best = best.min(codeword_weight(&turbo_encode(&info, &perm).unwrap()));
    }
    assert_eq!(oracle.free_distance(), Some(best as u32));
    assert_eq!(
        distance_spectrum(&perm, 1, 16).unwrap().free_distance(),
        Some(best as u32)
    );
}

#[test]
fn trellis_search_matches_oracle() {
    for len in [8usize, 12, 16, 18] {
        for seed in 0..20 {
            let perm = random_perm(len, 1000 * len as u64 + seed);
            assert_eq!(
                distance_spectrum(&perm, 4, len).unwrap(),
                brute_force_spectrum(&perm, 4).unwrap(),
                "L = {len}, seed {seed}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn spectrum_of_inverse_is_identical(len in 4usize..=18, seed in any::<u64>()) {
        let perm = random_perm(len, seed);
        prop_assert_eq!(
            brute_force_spectrum(&perm, 6).unwrap().lines,
            brute_force_spectrum(&perm.inverse(), 6).unwrap().lines
        );
        prop_assert_eq!(distance_spectrum(&perm, 6, 6).unwrap(), distance_spectrum(&perm.inverse(), 6, 6).unwrap());
    }

    #[test]
    fn raising_wu_max_never_removes_codewords(len in 8usize..=24, seed in any::<u64>()) {
        let perm = random_perm(len, seed);
        let lo = distance_spectrum(&perm, 5, 3).unwrap();
        let hi = distance_spectrum(&perm, 5, 6).unwrap();
        // the first distance can only drop, and at equal distance counts only grow
        prop_assert!(hi.lines[0].d <= lo.lines[0].d);
        for l in &lo.lines {
            if let Some(h) = hi.lines.iter().find(|h| h.d == l.d) {
                prop_assert!(h.n >= l.n && h.w >= l.w);
            } else {
                prop_assert!(hi.lines.last().unwrap().d < l.d);
            }
        }
    }
}

#[test]
fn parallel_and_serial_agree() {
    let perm = ModPoly::cubic(64, 5, 24, 48)
        .unwrap()
        .as_permutation()
        .unwrap();
    let serial = distance_spectrum_with(&perm, 9, 10, &SpectrumOptions::default()).unwrap();
    for threads in [1, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let par = pool
            .install(|| distance_spectrum_with(&perm, 9, 10, &SpectrumOptions::parallel()))
            .unwrap();
        assert_eq!(par, serial, "{threads} threads");
    }
}

#[test]
fn merged_halves_equal_the_whole() {
    // split the 2^12 - 1 words by whether bit 0 is set, then merge
    let len = 12;
    let perm = random_perm(len, 99);
    let whole = brute_force_spectrum(&perm, 5).unwrap();
    let mut halves = [
        std::collections::BTreeMap::<u32, (u64, u64)>::new(),
        Default::default(),
    ];
    for word in 1u32..(1 << len) {
        let info: Vec<u8> = (0..len).map(|k| ((word >> k) & 1) as u8).collect();
        let d = codeword_weight(&turbo_encode(&info, &perm).unwrap()) as u32;
        let e = halves[(word & 1) as usize].entry(d).or_default();
        e.0 += 1;
        e.1 += u64::from(word.count_ones());
    }
    let to_spec = |m: &std::collections::BTreeMap<u32, (u64, u64)>| {
        let lines = m
            .iter()
            .map(|(&d, &(n, w))| SpectrumLine { d, n, w })
            .collect();
        DistanceSpectrum::from_lines(len, usize::MAX, lines).unwrap()
    };
    let merged = merge_spectra(&to_spec(&halves[0]), &to_spec(&halves[1])).unwrap();
    assert_eq!(&merged.lines[..5], &whole.lines[..]);
}

// --- union bounds ---------------------------------------------------------

fn arb_spectrum() -> impl Strategy<Value = DistanceSpectrum> {
    prop::collection::btree_map(1u32..60, (1u64..50, 1u64..10), 1..9).prop_map(|m| {
        let lines = m
            .into_iter()
            .map(|(d, (n, k))| SpectrumLine { d, n, w: n * k })
            .collect();
        DistanceSpectrum::from_lines(10, 9, lines).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bounds_fall_with_snr(spec in arb_spectrum(), snr in -2.0f64..10.0, step in 0.01f64..3.0) {
        let rate = code_rate(40).unwrap();
        for ch in [ChannelModel::Awgn, ChannelModel::Rayleigh] {
            let a = ppturbo::tub::tub(ch, &spec, 40, rate, snr).unwrap();
            let b = ppturbo::tub::tub(ch, &spec, 40, rate, snr + step).unwrap();
            prop_assert!(b.tub_ber <= a.tub_ber && b.tub_fer <= a.tub_fer);
        }
    }

    #[test]
    fn bounds_grow_with_terms(spec in arb_spectrum(), snr in 0.0f64..8.0) {
        let rate = code_rate(64).unwrap();
        let mut prev = 0.0;
        for m in 1..=spec.len() {
            let part = DistanceSpectrum::from_lines(10, m, spec.lines[..m].to_vec()).unwrap();
            let b = tub_awgn(&part, 64, rate, snr).unwrap();
            prop_assert!(b.tub_fer >= prev);
            prev = b.tub_fer;
        }
    }

    #[test]
    fn bounds_scale_with_multiplicity(spec in arb_spectrum(), k in 2u64..6, snr in 0.0f64..8.0) {
        let rate = code_rate(48).unwrap();
        let scaled_lines = spec.lines.iter().map(|l| SpectrumLine { d: l.d, n: k * l.n, w: k * l.w }).collect();
        let scaled = DistanceSpectrum::from_lines(10, 9, scaled_lines).unwrap();
        let a = tub_rayleigh(&spec, 48, rate, snr).unwrap();
        let b = tub_rayleigh(&scaled, 48, rate, snr).unwrap();
        prop_assert!((b.tub_ber - k as f64 * a.tub_ber).abs() <= 1e-12 * b.tub_ber);
        prop_assert!((b.tub_fer - k as f64 * a.tub_fer).abs() <= 1e-12 * b.tub_fer);
    }
}

// --- search enumeration ---------------------------------------------------

#[test]
fn class_enumeration_matches_closed_forms() {
    for l in [40u64, 48, 54, 120] {
        for degree in [2, 3] {
            let want = class_count(l, degree);
            assert_eq!(
                enumerate_classes(l, degree).unwrap().len() as u64,
                want,
                "L = {l}, degree {degree}"
            );
        }
        assert_eq!(class_count(l, 3) / class_count(l, 2), l / gcd(l, 6));
    }
}

#[test]
fn candidates_cover_every_permutation_exactly_once() {
    for l in 2..=16u64 {
        let candidates = enumerate_candidates(l, 3).unwrap();
        for (i, a) in candidates.iter().enumerate() {
            for b in &candidates[i + 1..] {
                assert!(!a.equivalent(b).unwrap(), "{a} ~ {b} mod {l}");
            }
        }
        for q1 in 0..l {
            for q2 in 0..l {
                for q3 in 0..l {
                    let p = ModPoly::cubic(l, q1, q2, q3).unwrap();
                    if !p.is_permutation() {
                        continue;
                    }
                    let hits = candidates
                        .iter()
                        .filter(|c| c.equivalent(&p).unwrap())
                        .count();
                    let want = usize::from(p.effective_degree() >= 2);
                    assert_eq!(hits, want, "{p} mod {l}");
                }
            }
        }
        assert_eq!(class_size(l, 3), null_class_size(l));
    }
}
