//! Key-generation behaviour: published sizes, round trips, witness validity,
//! canonical shape of the compressed variants, and wire-format rejection.

use minrank_core::canonical::is_canonical;
use minrank_core::keygen::{
    generator, params_by_name, payload_len, pk_size_bits, sk_size_bits, production_set_names,
    Params, PublicKey, SecretKey, Variant,
};
use minrank_core::prg::{PrgStream, Seed};

fn root_for(p: &Params, label: &[u8], i: u64) -> Seed {
    let mut seed = [0u8; 16];
    seed[..8].copy_from_slice(&i.to_le_bytes());
    let mut stream = PrgStream::init(&Seed::from_bytes(&seed), label);
    stream.next_seed(p.lambda)
}

#[test]
fn published_public_key_sizes() {
    let expected: &[(&str, [u64; 3])] = &[
        ("mirith-Ia", [1028, 716, 356]),
        ("mirith-Ib", [1152, 584, 328]),
        ("mirith-IIIa", [1636, 1200, 592]),
        ("mirith-IIIb", [1636, 968, 512]),
        ("mirith-Va", [2020, 1264, 676]),
        ("mirith-Vb", [2192, 1176, 648]),
    ];
    assert_eq!(
        production_set_names(),
        expected.iter().map(|e| e.0).collect::<Vec<_>>()
    );
    for (name, sizes) in expected {
        let p = params_by_name(name).unwrap();
        for (variant, want) in Variant::all().into_iter().zip(sizes.iter()) {
            assert_eq!(
                pk_size_bits(&p, variant),
                *want,
                "{name} variant {}",
                variant.number()
            );
        }
        assert_eq!(sk_size_bits(&p, Variant::V1), p.lambda as u64);
        assert_eq!(sk_size_bits(&p, Variant::V2), p.lambda as u64);
        assert_eq!(sk_size_bits(&p, Variant::V3), 2 * p.lambda as u64);
    }
}

#[test]
fn generated_keys_decompress_to_valid_witnesses() {
    for name in ["toy-2-3-3-2-1", "toy-3-4-4-3-2", "mirith-Ia"] {
        let p = params_by_name(name).unwrap();
        for variant in Variant::all() {
            let gen = generator(variant);
            let root = root_for(&p, b"valid", variant.number() as u64);
            let (pk, sk) = gen.generate(&root, &p).unwrap();
            let (inst_sk, wit) = gen.decompress_sk(&sk, &p).unwrap();
            assert!(wit.is_valid_for(&inst_sk), "{name} variant {}", variant.number());
            let inst_pk = gen.decompress_pk(&pk, &p).unwrap();
            assert_eq!(inst_pk.matrices, inst_sk.matrices, "{name} pk/sk instance mismatch");
            assert!(inst_sk.eval(&wit.alpha).unwrap().rank() <= p.r);
        }
    }
}

#[test]
fn compressed_variants_emit_canonical_instances() {
    for name in ["toy-2-3-3-2-1", "toy-3-4-4-3-2", "mirith-Ia"] {
        let p = params_by_name(name).unwrap();
        for variant in [Variant::V2, Variant::V3] {
            let gen = generator(variant);
            let root = root_for(&p, b"canon", variant.number() as u64);
            let (pk, _) = gen.generate(&root, &p).unwrap();
            let inst = gen.decompress_pk(&pk, &p).unwrap();
            assert!(is_canonical(&inst), "{name} variant {}", variant.number());
        }
    }
}

#[test]
fn keygen3_solution_satisfies_the_linear_system() {
    for name in ["toy-2-3-3-2-1", "toy-3-4-4-3-2", "mirith-Ia"] {
        let p = params_by_name(name).unwrap();
        let gen = generator(Variant::V3);
        for i in 0..5u64 {
            let root = root_for(&p, b"star", i);
            let (_, sk) = gen.generate(&root, &p).unwrap();
            let (inst, wit) = gen.decompress_sk(&sk, &p).unwrap();
            let k_mat = wit.k_mat.as_ref().expect("variant 3 carries K");
            // E = M_0 + sum alpha_j M_j, and E^L = E^R K entrywise
            let e = inst.eval(&wit.alpha).unwrap();
            assert_eq!(e, wit.e);
            let (el, er) = e.split_lr(p.r).unwrap();
            assert_eq!(er.mul(k_mat).unwrap(), el, "{name} trial {i}");
            assert!(e.rank() <= p.r);
            // the first k coordinates of <M_0> vanish
            for j in 1..=p.k {
                assert_eq!(inst.matrices[0].vec_entry(j).unwrap(), 0);
            }
        }
    }
}

#[test]
fn key_serialization_round_trips_and_has_formula_length() {
    for name in ["toy-2-3-3-2-1", "toy-3-4-4-3-2", "mirith-Ia", "mirith-Vb"] {
        let p = params_by_name(name).unwrap();
        for variant in Variant::all() {
            let gen = generator(variant);
            let root = root_for(&p, b"ser", variant.number() as u64);
            let (pk, sk) = gen.generate(&root, &p).unwrap();

            let pk_bytes = pk.to_bytes(&p);
            let pk2 = PublicKey::from_bytes(&pk_bytes, &p, variant).unwrap();
            assert_eq!(pk, pk2);
            assert_eq!(pk.payload.len(), payload_len(&p, variant));

            // blob length: the seed plus the packed payload; packing uses a
            // nibble per element for q <= 16, so for q = 16 the blob meets
            // the formula size exactly
            let payload_bytes = (pk_bytes.len() - p.seed_bytes()) as u64;
            let count = payload_len(&p, variant) as u64;
            assert_eq!(payload_bytes, (count * 4).div_ceil(8), "{name}");
            if p.q == 16 {
                let bits = pk_size_bits(&p, variant) - p.lambda as u64;
                assert_eq!(payload_bytes, bits.div_ceil(8), "{name}");
            }

            let sk_bytes = sk.to_bytes();
            let sk2 = SecretKey::from_bytes(&sk_bytes, &p, variant).unwrap();
            assert_eq!(sk, sk2);
            assert_eq!(sk_bytes.len() as u64 * 8, sk_size_bits(&p, variant));
        }
    }
}

#[test]
fn generation_is_deterministic_in_the_root_seed() {
    let p = params_by_name("toy-3-4-4-3-2").unwrap();
    for variant in Variant::all() {
        let gen = generator(variant);
        let root = root_for(&p, b"det", 0);
        let (pk_a, sk_a) = gen.generate(&root, &p).unwrap();
        let (pk_b, sk_b) = gen.generate(&root, &p).unwrap();
        assert_eq!(pk_a.to_bytes(&p), pk_b.to_bytes(&p));
        assert_eq!(sk_a.to_bytes(), sk_b.to_bytes());

        let other = root_for(&p, b"det", 1);
        let (pk_c, _) = gen.generate(&other, &p).unwrap();
        assert_ne!(pk_a.to_bytes(&p), pk_c.to_bytes(&p));
    }
}

#[test]
fn malformed_keys_are_rejected() {
    let p = params_by_name("toy-3-4-4-3-2").unwrap();
    let gen = generator(Variant::V2);
    let root = root_for(&p, b"mal", 0);
    let (pk, sk) = gen.generate(&root, &p).unwrap();

    let bytes = pk.to_bytes(&p);
    // truncated payload
    assert!(PublicKey::from_bytes(&bytes[..bytes.len() - 1], &p, Variant::V2).is_err());
    // truncated below the seed
    assert!(PublicKey::from_bytes(&bytes[..3], &p, Variant::V2).is_err());
    // out-of-range element: q = 3 packs as nibbles, so 0xFF cannot decode
    let mut bad = bytes.clone();
    let last = bad.len() - 1;
    bad[last] = 0xFF;
    assert!(PublicKey::from_bytes(&bad, &p, Variant::V2).is_err());

    let sk_bytes = sk.to_bytes();
    assert!(SecretKey::from_bytes(&sk_bytes[..sk_bytes.len() - 1], &p, Variant::V2).is_err());
    // a v3 secret key needs two seeds
    assert!(SecretKey::from_bytes(&sk_bytes, &p, Variant::V3).is_err());
}

#[test]
fn invalid_params_are_rejected() {
    // k at the overdetermined limit
    assert!(Params::new(16, 15, 15, 81, 6, 128).is_err());
    // r = 0, n <= r, m < n
    assert!(Params::new(16, 4, 4, 3, 0, 128).is_err());
    assert!(Params::new(16, 4, 2, 3, 2, 128).is_err());
    assert!(Params::new(16, 3, 4, 3, 1, 128).is_err());
    // q not a prime power
    assert!(Params::new(6, 4, 4, 3, 1, 128).is_err());
    // lambda not a byte multiple
    assert!(Params::new(16, 4, 4, 3, 1, 100).is_err());
    // the six production shapes are all accepted
    for name in production_set_names() {
        assert!(params_by_name(name).is_some());
    }
}
