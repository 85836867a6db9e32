use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use polarlab::config::{CodeFamily, ExperimentConfig, SEED_ENV};
use polarlab::decoding::{Arithmetic, Fixed, Float, ListDecoder};
use polarlab::fast::{classify_tree, list_decoder, pscl_decoder, ListAlgorithm};
use polarlab::ldpc::NmsDecoder;
use polarlab::polar::{construct_reliability, Construction, PolarCode};
use polarlab::sim::{
    channel_llr, crc_sweep, ebn0_to_sigma, frame_rng, run_sweep, transmit, write_crc_csv,
    write_series_csv, Codec, CrcSweepSettings, PolarDecoder, QuantMode, Quantizer, SimResult,
    StopRule,
};

use crate::error::{CliError, CliResult};
use crate::{
    Algo, CodeArgs, Command, CompareArgs, ConstructArgs, DecodeArgs, EncodeArgs, Method, Quant,
    RunArgs, SimulateArgs, StepsArgs, SweepCrcArgs,
};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Construct(a) => construct(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Simulate(a) => simulate(a),
        Command::Compare(a) => compare(a),
        Command::Steps(a) => steps(a),
        Command::SweepCrc(a) => sweep_crc(a),
    }
}

fn usage(err: impl std::fmt::Display) -> CliError {
    CliError::Usage(err.to_string())
}

fn load_config(path: &Path, quant: Option<Quant>) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text).map_err(CliError::config)?;
    if let Some(q) = quant {
        cfg.quantizer.mode = q.into();
    }
    cfg.apply_seed_env().map_err(CliError::config)?;
    cfg.normalized().map_err(CliError::config)
}

fn codec_of(cfg: &ExperimentConfig) -> CliResult<Codec> {
    cfg.codec().map_err(CliError::config)
}

fn workers(run: &RunArgs) -> CliResult<usize> {
    match run.workers {
        Some(0) => Err(usage("--workers must be at least 1")),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Fails early when an output file could not be created later.
fn check_out(out: Option<&Path>) -> CliResult<()> {
    if let Some(path) = out {
        let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
        if parent.is_some_and(|p| !p.is_dir()) {
            return Err(usage(format!("directory of {} does not exist", path.display())));
        }
        if path.is_dir() {
            return Err(usage(format!("{} is a directory", path.display())));
        }
    }
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Runtime(format!("stdout: {e}"))),
    }
}

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| char::from(b'0' + b)).collect()
}

fn parse_bits(s: &str) -> CliResult<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(usage(format!("payload may only contain 0 and 1, found {c:?}"))),
        })
        .collect()
}

fn polar_from_args(args: &CodeArgs) -> CliResult<PolarCode> {
    let method = match args.method {
        Method::Ga => Construction::GaussianApproximation,
        Method::Bhattacharyya => Construction::Bhattacharyya,
    };
    let rate = args.k as f64 / args.n.max(1) as f64;
    let order = construct_reliability(args.n, args.design_ebn0, rate, &method).map_err(usage)?;
    PolarCode::new(args.n, args.k, order, None).map_err(usage)
}

fn construct(args: ConstructArgs) -> CliResult<()> {
    let code = polar_from_args(&args.code)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| usage(format!("{}: {e}", args.out_dir.display())))?;
    let mut reliability = String::new();
    for i in code.reliability() {
        writeln!(reliability, "{i}").unwrap();
    }
    let mut frozen = String::new();
    for &f in code.frozen() {
        writeln!(frozen, "{}", u8::from(f)).unwrap();
    }
    let rel_path = args.out_dir.join("reliability.txt");
    let frozen_path = args.out_dir.join("frozen.txt");
    emit(Some(&rel_path), reliability.as_bytes())?;
    emit(Some(&frozen_path), frozen.as_bytes())?;
    println!(
        "N={} K={} frozen={} reliability={} mask={}",
        code.len(),
        code.k(),
        code.len() - code.k(),
        rel_path.display(),
        frozen_path.display()
    );
    Ok(())
}

fn polar_parts(codec: &Codec, command: &str) -> CliResult<(PolarCode, PolarDecoder)> {
    codec
        .polar_parts()
        .map(|(c, d)| (c.clone(), d.clone()))
        .ok_or_else(|| CliError::Config(format!("{command} works on polar codes only")))
}

fn encode(args: EncodeArgs) -> CliResult<()> {
    let cfg = load_config(&args.config, None)?;
    let codec = codec_of(&cfg)?;
    let (code, decoder) = polar_parts(&codec, "encode")?;
    let payload = match &args.payload {
        Some(p) => parse_bits(p)?,
        None => codec.source(&mut frame_rng(cfg.channel.seed, args.frame)).0,
    };
    let u = match &decoder {
        PolarDecoder::Pscl { plan, .. } => plan.place_payload(&code, &payload),
        _ => code.place_payload(&payload),
    }
    .map_err(usage)?;
    let x = code.encode(&u)?;
    println!("payload {}", bits(&payload));
    println!("u {}", bits(&u));
    println!("x {}", bits(&x));
    Ok(())
}

fn read_llrs(path: &Path, len: usize) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let llrs = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| usage(format!("{t:?}: {e}"))))
        .collect::<CliResult<Vec<_>>>()?;
    if llrs.len() != len {
        return Err(usage(format!("{} holds {} LLRs, the code has N = {len}", path.display(), llrs.len())));
    }
    Ok(llrs)
}

fn decode(args: DecodeArgs) -> CliResult<()> {
    let cfg = load_config(&args.config, args.quant)?;
    let codec = codec_of(&cfg)?;
    let (mut llrs, sent) = match (&args.llrs, args.ebn0) {
        (Some(path), None) => (read_llrs(path, codec.len())?, None),
        (None, Some(ebn0)) => {
            let sigma = ebn0_to_sigma(ebn0, codec.rate()).map_err(usage)?;
            let mut rng = frame_rng(cfg.channel.seed, args.frame);
            let (payload, x) = codec.source(&mut rng);
            (channel_llr(&transmit(&x, sigma, &mut rng), sigma), Some(payload))
        }
        _ => return Err(usage("decode needs exactly one of --llrs or --ebn0")),
    };
    codec.quantizer().channel_llrs(&mut llrs);

    let payload = if let Some((code, iterations, norm)) = codec.ldpc_parts() {
        let out = NmsDecoder::new(code, iterations, norm).decode(&llrs);
        println!("iterations {}", out.iterations);
        println!("converged {}", out.converged);
        out.info_bits(code).to_vec()
    } else {
        let (code, decoder) = polar_parts(&codec, "decode")?;
        let q = codec.quantizer();
        match q.mode {
            QuantMode::Float => traced(&code, &decoder, Float::for_length(code.len()), &llrs)?,
            QuantMode::Fixed => traced(
                &code,
                &decoder,
                Fixed {
                    internal: q.internal,
                    pm: q.pm,
                },
                &llrs,
            )?,
        }
    };
    println!("payload {}", bits(&payload));
    if let Some(sent) = sent {
        println!("frame_error {}", sent != payload);
    }
    Ok(())
}

/// Decodes with tracing on and prints one line per leaf step. SC is traced
/// as SCL with one path, which it equals.
fn traced<A: Arithmetic>(code: &PolarCode, decoder: &PolarDecoder, arith: A, llrs: &[f64]) -> CliResult<Vec<u8>> {
    let mut dec: ListDecoder<A> = match decoder {
        PolarDecoder::Sc => list_decoder(code, ListAlgorithm::Scl, 1, arith)?,
        PolarDecoder::List {
            algorithm,
            list_size,
        } => list_decoder(code, *algorithm, *list_size, arith)?,
        PolarDecoder::Pscl { list_size, plan } => pscl_decoder(code, plan, *list_size, arith)?,
    };
    dec.set_trace(true);
    let out = dec.decode(llrs);
    for step in dec.trace() {
        println!("{step}");
    }
    println!("pm {}", out.pm);
    println!("crc_ok {}", out.crc_ok);
    if !dec.partition_status().is_empty() {
        let status: Vec<&str> = dec.partition_status().iter().map(|&ok| if ok { "pass" } else { "fail" }).collect();
        println!("partitions {}", status.join(","));
    }
    Ok(out.payload)
}

/// Writes `<out>.meta.json` with the fingerprint, the canonical config
/// verbatim and per-point wall times.
fn sidecar(out: &Path, cfg: &ExperimentConfig, result: &SimResult) -> CliResult<()> {
    let times: Vec<f64> = result.points.iter().map(|p| p.wall_time.as_secs_f64()).collect();
    let meta = format!(
        "{{\"fingerprint\":{},\"config\":{},\"wall_time_s\":{}}}\n",
        serde_json::to_string(&cfg.fingerprint()).expect("json"),
        cfg.canonical_json(),
        serde_json::to_string(&times).expect("json"),
    );
    let path: PathBuf = out.with_extension("meta.json");
    emit(Some(&path), meta.as_bytes())
}

fn sweep(cfg: &ExperimentConfig, workers: usize) -> CliResult<(Codec, SimResult)> {
    let codec = codec_of(cfg)?;
    eprintln!("{}: fingerprint {}", codec.series_name(), cfg.fingerprint());
    let result = run_sweep(&codec, &cfg.channel.ebn0_list, cfg.channel.seed, cfg.stop, workers)?;
    Ok((codec, result))
}

fn simulate(args: SimulateArgs) -> CliResult<()> {
    let cfg = load_config(&args.config, args.run.quant)?;
    let workers = workers(&args.run)?;
    check_out(args.out.as_deref())?;
    let (_, result) = sweep(&cfg, workers)?;
    emit(args.out.as_deref(), result.to_csv_string()?.as_bytes())?;
    if let Some(out) = &args.out {
        sidecar(out, &cfg, &result)?;
    }
    Ok(())
}

fn compare(args: CompareArgs) -> CliResult<()> {
    let polar = load_config(&args.polar, args.run.quant)?;
    let ldpc = load_config(&args.ldpc, args.run.quant)?;
    if polar.code.family != CodeFamily::Polar {
        return Err(CliError::Config(format!("{}: --polar needs a polar code", args.polar.display())));
    }
    if ldpc.code.family != CodeFamily::Ldpc {
        return Err(CliError::Config(format!("{}: --ldpc needs an LDPC code", args.ldpc.display())));
    }
    let workers = workers(&args.run)?;
    check_out(args.out.as_deref())?;
    let (pc, pr) = sweep(&polar, workers)?;
    let (lc, lr) = sweep(&ldpc, workers)?;
    let mut buf = Vec::new();
    write_series_csv(&[(pc.series_name(), &pr), (lc.series_name(), &lr)], &mut buf)?;
    emit(args.out.as_deref(), &buf)
}

fn steps(args: StepsArgs) -> CliResult<()> {
    if args.list_size == 0 {
        return Err(usage("--L must be at least 1"));
    }
    if args.pe == 0 {
        return Err(usage("--pe must be at least 1"));
    }
    check_out(args.out.as_deref())?;
    let code = polar_from_args(&args.code)?;
    let chosen: ListAlgorithm = args.algo.into();
    let mut table = String::from("algorithm,L,pe,steps,reduction_vs_scl,selected\n");
    let scl_steps = classify_tree(&code, ListAlgorithm::Scl, args.list_size).count_steps(args.pe);
    for algo in [Algo::Scl, Algo::Sscl, Algo::FastSscl] {
        let algo: ListAlgorithm = algo.into();
        let schedule = classify_tree(&code, algo, args.list_size);
        let total = schedule.count_steps(args.pe);
        let reduction = 100.0 * (1.0 - total as f64 / scl_steps as f64);
        writeln!(
            table,
            "{},{},{},{total},{reduction:.1}%,{}",
            algo.as_str(),
            args.list_size,
            args.pe,
            algo == chosen
        )
        .unwrap();
        if algo == chosen {
            if let Some(out) = &args.out {
                let mut buf = Vec::new();
                schedule.write_csv(&mut buf)?;
                emit(Some(out), &buf)?;
            }
        }
    }
    emit(None, table.as_bytes())
}

fn sweep_crc(args: SweepCrcArgs) -> CliResult<()> {
    if args.list_size == 0 {
        return Err(usage("--L must be at least 1"));
    }
    if args.min_errors == 0 || args.max_frames == 0 {
        return Err(usage("--min-errors and --max-frames must be at least 1"));
    }
    let workers = workers(&args.run)?;
    check_out(args.out.as_deref())?;
    let code = polar_from_args(&args.code)?;
    if args.partitions == 0 || !args.partitions.is_power_of_two() || args.partitions > code.len() {
        return Err(usage(format!("--P {} must be a power of two dividing N", args.partitions)));
    }
    let seed = match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|e| CliError::Config(format!("{SEED_ENV}: {v:?}: {e}")))?,
        Err(_) => args.seed,
    };
    let mut quantizer = Quantizer::default();
    if let Some(q) = args.run.quant {
        quantizer.mode = q.into();
    }
    let settings = CrcSweepSettings {
        partitions: args.partitions,
        list_size: args.list_size,
        target_ebn0_db: args.ebn0,
        seed,
        stop: StopRule::new(args.min_errors, args.max_frames),
        quantizer,
        workers,
    };
    let ranked = crc_sweep(&code, &args.crc_lengths, &settings).map_err(|e| match e {
        e @ polarlab::Error::Config { .. } => usage(e),
        e => CliError::from(e),
    })?;
    let mut buf = Vec::new();
    write_crc_csv(&ranked, &mut buf)?;
    emit(args.out.as_deref(), &buf)
}
