mod common;

use monobn::gadgetgen::{random_network, RandomParams};
use monobn::mbn::{format_probability, parse_mbn, serialize_mbn};
use monobn::Network;
use proptest::prelude::*;

fn same_to_12_digits(a: &Network, b: &Network) -> bool {
    a.variables() == b.variables()
        && a.ids().all(|v| {
            a.role(v) == b.role(v)
                && a.parents(v) == b.parents(v)
                && a.cpt(v).iter().flatten().zip(b.cpt(v).iter().flatten()).all(|(x, y)| {
                    format_probability(*x) == format_probability(*y) || (x - y).abs() <= 1e-12
                })
        })
}

#[test]
fn roundtrip_on_corpus() {
    for (seed, net) in common::binary_corpus(200).chain(common::multi_corpus(50)) {
        let text = serialize_mbn(&net);
        let back = parse_mbn(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
        assert!(same_to_12_digits(&net, &back), "seed {seed}");
        assert_eq!(serialize_mbn(&back), text, "seed {seed}: serialization not canonical");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn roundtrip_random_parameters(seed in any::<u64>(), nodes in 2usize..8, multi in any::<bool>(), polytree in any::<bool>()) {
        let params = RandomParams {
            max_values: if multi { 4 } else { 2 },
            polytree,
            ..RandomParams::binary(nodes, 1)
        };
        let net = random_network(&params, seed).unwrap();
        let text = serialize_mbn(&net);
        let back = parse_mbn(&text).unwrap();
        prop_assert!(same_to_12_digits(&net, &back));
        prop_assert_eq!(serialize_mbn(&back), text);
    }

    #[test]
    fn probability_format_keeps_12_digits(p in 0.0f64..=1.0) {
        let s = format_probability(p);
        let q: f64 = s.parse().unwrap();
        prop_assert!((p - q).abs() <= 1e-12 * p.max(1e-300) + 1e-300 || (p - q).abs() <= 5e-12 * p);
        prop_assert_eq!(format_probability(q), s);
    }
}
