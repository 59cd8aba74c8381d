use proptest::prelude::*;

use qcldpc::base::wifi;
use qcldpc::schedule::rearrange;
use qcldpc::{expand, BaseMatrix, CompactCode};

fn base_matrix() -> impl Strategy<Value = BaseMatrix> {
    (1usize..5, 2usize..9, 1usize..8).prop_flat_map(|(rows, cols, z)| {
        proptest::collection::vec(-1i64..z as i64, rows * cols)
            .prop_map(move |entries| BaseMatrix::from_entries(rows, cols, z, &entries).unwrap())
    })
}

#[test]
fn wifi_degrees_follow_base_matrix() {
    for z in [27, 54, 81] {
        let base = wifi::rate_half(z).unwrap();
        let h = expand(&base);
        let (row_deg, col_deg) = h.degrees();
        for (i, d) in row_deg.iter().enumerate() {
            assert_eq!(*d, base.row_weight(i / z));
        }
        for (j, d) in col_deg.iter().enumerate() {
            assert_eq!(*d, base.col_weight(j / z));
        }
        assert_eq!(h.syndrome_weight(&vec![0; base.code_length()]).unwrap(), 0);
    }
}

#[test]
fn rearranged_code_has_the_same_parity_checks() {
    let code = CompactCode::from_base(&wifi::rate_half(81).unwrap());
    for size in [2, 4, 6] {
        let plan = rearrange(&code, size).unwrap();
        assert_eq!(plan.code().expand(), code.expand());
    }
}

proptest! {
    #[test]
    fn compact_expansion_matches_direct_expansion(base in base_matrix()) {
        let code = CompactCode::from_base(&base);
        prop_assert_eq!(code.expand(), expand(&base));
        prop_assert_eq!(code.num_valid_blocks(), base.num_valid_blocks());
        prop_assert!(code.compaction_ratio() <= num_rational::Ratio::from_integer(1));
    }

    #[test]
    fn text_round_trip(base in base_matrix()) {
        let parsed: BaseMatrix = base.to_string().parse().unwrap();
        prop_assert_eq!(parsed, base);
    }

    #[test]
    fn syndrome_is_linear(base in base_matrix(), seed_a in any::<u64>(), seed_b in any::<u64>()) {
        let h = expand(&base);
        let n = h.num_cols();
        let bits = |seed: u64| (0..n).map(|i| ((seed >> (i % 64)) & 1) as u8).collect::<Vec<u8>>();
        let (a, b) = (bits(seed_a), bits(seed_b.rotate_left(7)));
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let (sa, sb, ss) = (h.syndrome(&a).unwrap(), h.syndrome(&b).unwrap(), h.syndrome(&sum).unwrap());
        let combined: Vec<u8> = sa.iter().zip(&sb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(ss, combined);
    }
}
