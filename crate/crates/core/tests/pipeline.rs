use polarlab::config::ExperimentConfig;
use polarlab::fast::ListAlgorithm;
use polarlab::polar::{construct_reliability, Construction, CrcSpec, PolarCode};
use polarlab::sim::{run_point, run_sweep, ChannelConfig, Codec, PolarDecoder, Quantizer, StopRule, CSV_HEADER};

fn code(n: usize, k: usize) -> PolarCode {
    let order = construct_reliability(n, 2.0, k as f64 / n as f64, &Construction::GaussianApproximation).unwrap();
    PolarCode::new(n, k, order, Some(CrcSpec::default_for_width(8).unwrap())).unwrap()
}

#[test]
fn config_to_csv() {
    let cfg = ExperimentConfig::from_json(
        r#"{ "code": { "N": 128, "K": 64, "crc": { "width": 8 } },
             "decoder": { "algorithm": "fast_sscl", "L": 4 },
             "channel": { "ebn0_list": [1.0, 3.0], "seed": 11 },
             "stop": { "min_errors": 30, "max_frames": 20000 } }"#,
    )
    .unwrap()
    .normalized()
    .unwrap();
    let codec = cfg.codec().unwrap();
    assert_eq!(codec.series_name(), "Fast-SSCL4-CRC8");
    let result = run_sweep(&codec, &cfg.channel.ebn0_list, cfg.channel.seed, cfg.stop, 2).unwrap();
    assert!(result.points[0].fer() > result.points[1].fer());
    let csv = result.to_csv_string().unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn larger_lists_do_not_hurt() {
    let c = code(256, 128);
    let stop = StopRule::new(4000, 4000);
    let fer = |l: usize| {
        let codec = Codec::polar(
            c.clone(),
            PolarDecoder::List { algorithm: ListAlgorithm::Sscl, list_size: l },
            Quantizer::default(),
        )
        .unwrap();
        run_point(&codec, ChannelConfig { ebn0_db: 1.5, rate: codec.rate(), seed: 5 }, stop, 2).unwrap()
    };
    let (l1, l4) = (fer(1), fer(4));
    assert!(l4.frame_errors < l1.frame_errors, "{} vs {}", l4.frame_errors, l1.frame_errors);
}

#[test]
fn fixed_mode_stays_close_to_float() {
    let c = code(128, 64);
    let stop = StopRule::new(3000, 3000);
    let run = |q: Quantizer| {
        let codec =
            Codec::polar(c.clone(), PolarDecoder::List { algorithm: ListAlgorithm::FastSscl, list_size: 4 }, q).unwrap();
        run_point(&codec, ChannelConfig { ebn0_db: 2.0, rate: codec.rate(), seed: 9 }, stop, 1)
            .unwrap()
            .frame_errors
    };
    let (float, fixed) = (run(Quantizer::default()), run(Quantizer::fixed()));
    // same frames, so only the arithmetic differs
    assert!(fixed as f64 <= 1.6 * float as f64 + 10.0, "fixed {fixed} vs float {float}");
}

#[test]
fn ldpc_config_round_trip() {
    let cfg = ExperimentConfig::from_json(
        r#"{ "code": { "family": "ldpc", "rate": "2/3" },
             "decoder": { "algorithm": "ldpc_nms", "T": 10 },
             "channel": { "ebn0_list": [6.0], "seed": 2 },
             "stop": { "min_errors": 10, "max_frames": 300 } }"#,
    )
    .unwrap()
    .normalized()
    .unwrap();
    let codec = cfg.codec().unwrap();
    assert_eq!(codec.code_name(), "LDPC(576,384)");
    let result = run_sweep(&codec, &cfg.channel.ebn0_list, 2, cfg.stop, 1).unwrap();
    assert_eq!(result.points[0].frames, 300);
    assert_eq!(result.points[0].frame_errors, 0);
}
