//! Structural invariants checked over randomized inputs.

use std::collections::HashSet;

use proptest::collection::vec as pvec;
use proptest::prelude::*;

use gncoset::decoder::DecoderState;
use gncoset::{
    kronecker_transform_in_place, parallel_decode, syndrome_check, BitBlock, CodeSpec,
    DampingSchedule, DecoderConfig, Graph, LlrBlock, ParallelDecoder, ScDecoder, LLR_MAX,
};

fn bit_vec(m: usize) -> impl Strategy<Value = Vec<u8>> {
    pvec(0u8..=1, 1usize << m)
}

fn info_set(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::btree_set(0usize..(1usize << n), 1..=(1usize << n))
        .prop_map(|s| s.into_iter().collect())
}

proptest! {
    #[test]
    fn transform_is_an_involution(v in (1usize..=12).prop_flat_map(bit_vec)) {
        let mut w = v.clone();
        kronecker_transform_in_place(&mut w).unwrap();
        kronecker_transform_in_place(&mut w).unwrap();
        prop_assert_eq!(w, v);
    }

    #[test]
    fn transform_is_linear(
        (a, b) in (1usize..=10).prop_flat_map(|m| (bit_vec(m), bit_vec(m)))
    ) {
        let mut xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        kronecker_transform_in_place(&mut xor).unwrap();
        let mut ta = a;
        kronecker_transform_in_place(&mut ta).unwrap();
        let mut tb = b;
        kronecker_transform_in_place(&mut tb).unwrap();
        let combined: Vec<u8> = ta.iter().zip(&tb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(xor, combined);
    }

    /// Transforming the flat vector equals transforming every row of the
    /// sqrt(N) x sqrt(N) matrix and then every column, in either order.
    #[test]
    fn transform_factors_through_rows_and_columns(
        (n, v) in (1usize..=4)
            .prop_map(|h| 2 * h)
            .prop_flat_map(|n| (Just(n), bit_vec(n)))
    ) {
        let sqrt_n = 1usize << (n / 2);
        let mut flat = v.clone();
        kronecker_transform_in_place(&mut flat).unwrap();

        let apply_rows = |m: &mut Vec<u8>| {
            for r in 0..sqrt_n {
                kronecker_transform_in_place(&mut m[r * sqrt_n..(r + 1) * sqrt_n]).unwrap();
            }
        };
        let apply_cols = |m: &mut Vec<u8>| {
            let mut col = vec![0u8; sqrt_n];
            for c in 0..sqrt_n {
                for r in 0..sqrt_n {
                    col[r] = m[r * sqrt_n + c];
                }
                kronecker_transform_in_place(&mut col).unwrap();
                for r in 0..sqrt_n {
                    m[r * sqrt_n + c] = col[r];
                }
            }
        };

        let mut rows_then_cols = v.clone();
        apply_rows(&mut rows_then_cols);
        apply_cols(&mut rows_then_cols);
        prop_assert_eq!(&rows_then_cols, &flat);

        let mut cols_then_rows = v;
        apply_cols(&mut cols_then_rows);
        apply_rows(&mut cols_then_rows);
        prop_assert_eq!(&cols_then_rows, &flat);
    }

    #[test]
    fn encode_is_linear_and_invertible(
        (n, set, ia, ib) in (1usize..=3).prop_map(|h| 2 * h).prop_flat_map(|n| {
            info_set(n).prop_flat_map(move |set| {
                let k = set.len();
                (Just(n), Just(set), pvec(0u8..=1, k), pvec(0u8..=1, k))
            })
        })
    ) {
        let spec = CodeSpec::new(n, set).unwrap();
        let a = BitBlock::from_bits(ia).unwrap();
        let b = BitBlock::from_bits(ib).unwrap();
        let ca = spec.encode(&a).unwrap();
        let cb = spec.encode(&b).unwrap();
        let cab = spec.encode(&a.xor(&b).unwrap()).unwrap();
        prop_assert_eq!(&cab, &ca.xor(&cb).unwrap());
        prop_assert_eq!(&spec.extract_info(&ca).unwrap(), &a);
        prop_assert_eq!(&spec.extract_info(&cb).unwrap(), &b);
    }

    /// Every row and column of a codeword matrix passes its component
    /// syndrome check.
    #[test]
    fn codeword_components_pass_syndrome(
        (n, set, info) in (1usize..=3).prop_map(|h| 2 * h).prop_flat_map(|n| {
            info_set(n).prop_flat_map(move |set| {
                let k = set.len();
                (Just(n), Just(set), pvec(0u8..=1, k))
            })
        })
    ) {
        let spec = CodeSpec::new(n, set).unwrap();
        let cw = spec.encode(&BitBlock::from_bits(info).unwrap()).unwrap();
        let sqrt_n = spec.sqrt_n();
        for c in 0..sqrt_n {
            let col: Vec<u8> = (0..sqrt_n).map(|r| cw.bits()[r * sqrt_n + c]).collect();
            prop_assert!(syndrome_check(&col, spec.col_frozen()).unwrap());
        }
        for r in 0..sqrt_n {
            let row = cw.bits()[r * sqrt_n..(r + 1) * sqrt_n].to_vec();
            prop_assert!(syndrome_check(&row, spec.row_frozen()).unwrap());
        }
    }

    /// syndrome_check agrees with brute-force membership in the enumerated
    /// component code.
    #[test]
    fn syndrome_matches_enumerated_membership(
        (m, frozen_mask, probe) in (2usize..=3).prop_flat_map(|m| {
            (Just(m), pvec(any::<bool>(), 1usize << m), bit_vec(m))
        })
    ) {
        let len = 1usize << m;
        let frozen: Vec<usize> =
            (0..len).filter(|&i| frozen_mask[i]).collect();
        let free: Vec<usize> = (0..len).filter(|&i| !frozen_mask[i]).collect();
        let mut codewords = HashSet::new();
        for pattern in 0u32..(1u32 << free.len()) {
            let mut u = vec![0u8; len];
            for (bit, &pos) in free.iter().enumerate() {
                u[pos] = ((pattern >> bit) & 1) as u8;
            }
            kronecker_transform_in_place(&mut u).unwrap();
            codewords.insert(u);
        }
        let brute = codewords.contains(&probe);
        prop_assert_eq!(syndrome_check(&probe, &frozen).unwrap(), brute);
    }

    /// SC always emits a vector that passes the syndrome check for its own
    /// frozen set.
    #[test]
    fn sc_output_lies_in_component_code(
        (m, frozen_mask, llrs) in (1usize..=6).prop_flat_map(|m| {
            (
                Just(m),
                pvec(any::<bool>(), 1usize << m),
                pvec(-30.0f64..30.0, 1usize << m),
            )
        })
    ) {
        let len = 1usize << m;
        let frozen: Vec<usize> = (0..len).filter(|&i| frozen_mask[i]).collect();
        let mut dec = ScDecoder::new(m, &frozen).unwrap();
        let mut out = vec![0u8; len];
        dec.decode(&llrs, &mut out).unwrap();
        prop_assert!(syndrome_check(&out, &frozen).unwrap());
    }

    /// Strong consistent LLRs decode back to the transmitted word, with all
    /// activation accounting intact.
    #[test]
    fn noiseless_frames_decode_exactly(
        (n, set, info) in (1usize..=3).prop_map(|h| 2 * h).prop_flat_map(|n| {
            info_set(n).prop_flat_map(move |set| {
                let k = set.len();
                (Just(n), Just(set), pvec(0u8..=1, k))
            })
        })
    ) {
        let spec = CodeSpec::new(n, set).unwrap();
        let info = BitBlock::from_bits(info).unwrap();
        let cw = spec.encode(&info).unwrap();
        let llrs = LlrBlock::new(
            cw.bits().iter().map(|&b| 40.0 * (1.0 - 2.0 * f64::from(b))).collect(),
        )
        .unwrap();
        let sched = DampingSchedule::table2();
        let res = parallel_decode(&llrs, &spec, &sched, 4, 1.0).unwrap();
        prop_assert_eq!(&res.codeword, &cw);
        prop_assert_eq!(&res.info, &info);
        prop_assert_eq!(
            res.sc_activations + res.components_skipped,
            res.iterations_run * spec.sqrt_n()
        );
    }

    /// A state already holding a valid codeword is a fixed point of both
    /// graph passes.
    #[test]
    fn valid_codeword_state_is_a_fixed_point(
        (set, info, noise) in info_set(4).prop_flat_map(|set| {
            let k = set.len();
            (Just(set), pvec(0u8..=1, k), pvec(-5.0f64..5.0, 16))
        })
    ) {
        let spec = CodeSpec::new(4, set).unwrap();
        let cw = spec.encode(&BitBlock::from_bits(info).unwrap()).unwrap();
        let sched = DampingSchedule::table2();
        let mut dec = ParallelDecoder::new(&spec, &sched, DecoderConfig::default()).unwrap();
        let mut state = DecoderState::new(spec.sqrt_n());
        state.ho_prev.copy_from_slice(cw.bits());
        state.ho_prev2.copy_from_slice(cw.bits());
        state.t = 2;
        for graph in [Graph::Cols, Graph::Rows, Graph::Cols] {
            let stats = dec.run_iteration(&mut state, graph, &noise, 1.0).unwrap();
            prop_assert_eq!(stats.activations, 0);
            prop_assert_eq!(state.ho_prev.as_slice(), cw.bits());
        }
    }

    #[test]
    fn decoding_is_reproducible(
        llrs in pvec(-10.0f64..10.0, 16)
    ) {
        let spec = CodeSpec::new(4, [3, 6, 7, 9, 11, 12, 13, 14, 15]).unwrap();
        let sched = DampingSchedule::table2();
        let block = LlrBlock::new(llrs).unwrap();
        let a = parallel_decode(&block, &spec, &sched, 6, 0.8).unwrap();
        let b = parallel_decode(&block, &spec, &sched, 6, 0.8).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn llr_inputs_are_clamped(v in any::<f64>()) {
        prop_assume!(!v.is_nan());
        let block = LlrBlock::new(vec![v]).unwrap();
        prop_assert!(block.values()[0].abs() <= LLR_MAX);
    }
}

// Min-sum SC decisions are invariant to positive scaling of the LLRs.
#[cfg(not(feature = "exact-kernel"))]
proptest! {
    #[test]
    fn sc_is_scale_equivariant(
        (llrs, scale) in (pvec(-20.0f64..20.0, 16), 0.01f64..100.0)
    ) {
        prop_assume!(llrs.iter().all(|&l| l != 0.0));
        let frozen = [0usize, 1, 2, 4, 8];
        let mut dec = ScDecoder::new(4, &frozen).unwrap();
        let mut out_a = vec![0u8; 16];
        dec.decode(&llrs, &mut out_a).unwrap();
        let scaled: Vec<f64> = llrs.iter().map(|&l| l * scale).collect();
        let mut out_b = vec![0u8; 16];
        dec.decode(&scaled, &mut out_b).unwrap();
        prop_assert_eq!(out_a, out_b);
    }
}
