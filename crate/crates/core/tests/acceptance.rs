//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use etc_sns::cipher::{decrypt, encrypt, EtcKey, KeyStream};
use etc_sns::corpus::desk_corpus;
use etc_sns::eval::{
    run_experiment, run_pipeline, to_csv_string, Arm, ExperimentSpec, GroundTruth, ResultRow,
};
use etc_sns::image::{block_count, psnr, RasterImage};
use etc_sns::jpeg::{
    decode, encode, estimate_quality, insert_segment, parse, quality_to_table, standard_table,
    strip_metadata, SubsamplingMode, TableClass, CHROMA_BASE, LUMA_BASE,
};
use etc_sns::sns::{simulate_upload, FacebookPolicy, LocalProvider, ProviderKind, ProviderModel};

use SubsamplingMode::{S420, S444};

type Verdict = Result<String, String>;

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Verdict {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn corpus() -> Vec<RasterImage> {
    desk_corpus().into_iter().map(|(_, img)| img).collect()
}

fn cipher_round_trip() -> Verdict {
    let images = corpus();
    let start = Instant::now();
    let mut seeds = KeyStream::new(0xACCE97);
    for trial in 0..50 {
        let key = EtcKey::new(
            seeds.next_u64(),
            seeds.next_u64(),
            seeds.next_u64(),
            seeds.next_u64(),
        );
        for (i, img) in images.iter().enumerate() {
            let enc = encrypt(img, &key, 16, 16).map_err(|e| e.to_string())?;
            let dec = decrypt(&enc, &key, 16, 16).map_err(|e| e.to_string())?;
            if &dec != img {
                return Err(format!("key #{trial}, image #{i} did not round-trip"));
            }
        }
    }
    let t = start.elapsed();
    check(
        t < Duration::from_secs(10),
        format!(
            "50 keys x {} images bit-exact in {:.2}s",
            images.len(),
            t.as_secs_f64()
        ),
        format!("round trip took {:.2}s (limit 10s)", t.as_secs_f64()),
    )
}

fn block_counts() -> Verdict {
    let a = block_count(256, 144, 16, 16).map_err(|e| e.to_string())?;
    let b = block_count(1920, 1080, 16, 16).map_err(|e| e.to_string())?;
    check(
        a == 144 && b == 8040,
        "256x144 -> 144, 1920x1080 -> 8040",
        format!("got {a} and {b}"),
    )
}

/// Integer evaluation of the IJG rule written out independently of the
/// library: scale 5000/q below 50, 200-2q otherwise, entries
/// (base*scale+50)/100 clamped to 1..=255.
fn ijg_reference(base: &[u16; 64], q: u32) -> [u16; 64] {
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    base.map(|b| ((u32::from(b) * scale + 50) / 100).clamp(1, 255) as u16)
}

fn ijg_scaling() -> Verdict {
    for q in [1u8, 49, 50, 51, 85, 100] {
        for (class, base) in [
            (TableClass::Luma, &LUMA_BASE),
            (TableClass::Chroma, &CHROMA_BASE),
        ] {
            let got = quality_to_table(base, q, class).map_err(|e| e.to_string())?;
            if got.natural() != ijg_reference(base, u32::from(q)) {
                return Err(format!(
                    "{class:?} table at Qf={q} differs from the reference"
                ));
            }
        }
    }
    // frozen spot values
    let l85 = standard_table(TableClass::Luma, 85).unwrap();
    let c49 = standard_table(TableClass::Chroma, 49).unwrap();
    if l85.natural()[0] != 5
        || c49.natural()[0] != 17
        || standard_table(TableClass::Luma, 1).unwrap().natural()[0] != 255
    {
        return Err("frozen spot values changed".into());
    }
    for q in 50..=100u8 {
        let t = standard_table(TableClass::Luma, q).unwrap();
        if estimate_quality(&t) != q {
            return Err(format!("estimate_quality failed to round-trip Qf={q}"));
        }
    }
    Ok("tables at 1/49/50/51/85/100 match; estimate round-trips 50..=100".into())
}

fn mean_codec_psnr(images: &[RasterImage], q: u8, mode: SubsamplingMode) -> Result<f64, String> {
    let mut sum = 0.0;
    for img in images {
        let bytes = encode(img, q, mode).map_err(|e| e.to_string())?;
        sum += psnr(img, &decode(&bytes).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    }
    Ok(sum / images.len() as f64)
}

fn codec_sanity() -> Verdict {
    let images = corpus();
    let top = mean_codec_psnr(&images, 100, S444)?;
    if top < 45.0 {
        return Err(format!("Qf=100 4:4:4 mean PSNR {top:.2} dB < 45"));
    }
    for mode in SubsamplingMode::ALL {
        let mut prev = f64::NEG_INFINITY;
        for q in 80..=100 {
            let p = mean_codec_psnr(&images, q, mode)?;
            if p < prev - 0.05 {
                return Err(format!(
                    "{mode}: PSNR drops {prev:.3} -> {p:.3} dB at Qf={q}"
                ));
            }
            prev = p;
        }
    }
    Ok(format!(
        "Qf=100 4:4:4 mean {top:.2} dB; monotone over 80..=100 in both modes"
    ))
}

fn with_metadata(bytes: &[u8]) -> Vec<u8> {
    let exif = insert_segment(bytes, 0xE1, b"Exif\0\0camera=desk").unwrap();
    insert_segment(&exif, 0xFE, b"uploaded by the acceptance suite").unwrap()
}

fn twitter_model() -> Verdict {
    let model = ProviderModel::new(ProviderKind::Twitter);
    let policy = FacebookPolicy::default();
    for img in corpus() {
        let low = with_metadata(&encode(&img, 84, S420).unwrap());
        let out = simulate_upload(&model, &low, policy).map_err(|e| e.to_string())?;
        if out != strip_metadata(&low).unwrap() {
            return Err("Qf=84 4:2:0 upload was not metadata-only".into());
        }

        let high = with_metadata(&encode(&img, 90, S420).unwrap());
        let out = parse(&simulate_upload(&model, &high, policy).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        if out.mode != S420 || out.estimated_quality() != 85 {
            return Err(format!(
                "Qf=90 4:2:0 upload came back {} Qf={}",
                out.mode,
                out.estimated_quality()
            ));
        }
        let src = parse(&high).unwrap();
        for (a, b) in src.components.iter().zip(&out.components) {
            let (qa, qb) = (a.quant.zigzag(), b.quant.zigzag());
            for (ba, bb) in a.blocks.iter().zip(&b.blocks) {
                for k in 0..64 {
                    let oracle = (f64::from(ba[k]) * f64::from(qa[k]) / f64::from(qb[k])).round();
                    if f64::from(bb[k]) != oracle {
                        return Err("requantized coefficient differs from the oracle".into());
                    }
                }
            }
        }

        let full = encode(&img, 95, S444).unwrap();
        let out = parse(&simulate_upload(&model, &full, policy).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        if out.mode != S420 || out.estimated_quality() != 85 {
            return Err(format!(
                "Qf=95 4:4:4 upload came back {} Qf={}",
                out.mode,
                out.estimated_quality()
            ));
        }
    }
    Ok("Qf=84 passes through, Qf=90 requantized to 85 in the DCT domain, 4:4:4 Qf=95 -> 4:2:0 Qf=85".into())
}

fn facebook_model() -> Verdict {
    let images = corpus();
    for target in [71u8, 77, 85] {
        let policy = FacebookPolicy::new(target).unwrap();
        for kind in [ProviderKind::FacebookHq, ProviderKind::FacebookLq] {
            let model = ProviderModel::new(kind);
            for img in &images {
                for mode in SubsamplingMode::ALL {
                    for q in [60u8, 85, 100] {
                        let input = encode(img, q, mode).unwrap();
                        let out = parse(
                            &simulate_upload(&model, &input, policy).map_err(|e| e.to_string())?,
                        )
                        .map_err(|e| e.to_string())?;
                        if out.mode != S420 || out.estimated_quality() != target {
                            return Err(format!(
                                "{kind} target {target}: {mode} Qf={q} came back {} Qf={}",
                                out.mode,
                                out.estimated_quality()
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok("every upload comes back 4:2:0 at the configured Qf (71, 77, 85)".into())
}

type Means = BTreeMap<(ProviderKind, Arm, SubsamplingMode, u8), f64>;

fn means(rows: &[ResultRow]) -> Result<Means, String> {
    rows.iter()
        .map(|r| match (r.mean_psnr, &r.error) {
            (Some(p), None) => Ok(((r.provider, r.arm, r.mode, r.qf), p)),
            _ => Err(format!(
                "cell {} {} {} {} failed: {:?}",
                r.provider,
                r.arm.name(),
                r.mode,
                r.qf,
                r.error
            )),
        })
        .collect()
}

fn table2_reproduction(rows: &[ResultRow], key: &EtcKey) -> Verdict {
    let cases = [
        (ProviderKind::FacebookHq, S420),
        (ProviderKind::FacebookHq, S444),
        (ProviderKind::Twitter, S420),
        (ProviderKind::Twitter, S444),
    ];
    let providers = cases.map(|(k, _)| LocalProvider::new(k));
    let mut min_margin = f64::INFINITY;
    for (name, img) in desk_corpus() {
        let mut scores = [0.0; 4];
        for (i, (_, mode)) in cases.iter().enumerate() {
            let out = run_pipeline(
                &img,
                Some(key),
                85,
                *mode,
                &providers[i],
                GroundTruth::Original,
            )
            .map_err(|e| e.to_string())?;
            scores[i] = out.artifact_score;
        }
        let others = scores[1].max(scores[2]).max(scores[3]);
        if scores[0] <= others {
            return Err(format!(
                "{name}: Facebook 4:2:0 score {:.3} not above {others:.3}",
                scores[0]
            ));
        }
        min_margin = min_margin.min(scores[0] - others);
    }
    let m = means(rows)?;
    let mut min_gap = f64::INFINITY;
    for q in 80..=100 {
        let a = m[&(ProviderKind::FacebookHq, Arm::Encrypted, S420, q)];
        let b = m[&(ProviderKind::FacebookHq, Arm::Encrypted, S444, q)];
        if a >= b {
            return Err(format!(
                "Qf={q}: encrypted Facebook 4:2:0 {a:.2} dB not below 4:4:4 {b:.2} dB"
            ));
        }
        min_gap = min_gap.min(b - a);
    }
    Ok(format!(
        "artifact score margin >= {min_margin:.3} on every image; 4:2:0 below 4:4:4 by >= {min_gap:.2} dB"
    ))
}

fn twitter_transparency(rows: &[ResultRow]) -> Verdict {
    let m = means(rows)?;
    let mut worst: f64 = 0.0;
    for mode in SubsamplingMode::ALL {
        for q in 80..=100 {
            let e = m[&(ProviderKind::Twitter, Arm::Encrypted, mode, q)];
            let p = m[&(ProviderKind::Twitter, Arm::Plain, mode, q)];
            let d = (e - p).abs();
            if d > 0.5 {
                return Err(format!(
                    "{mode} Qf={q}: |{e:.3} - {p:.3}| = {d:.3} dB > 0.5"
                ));
            }
            worst = worst.max(d);
        }
    }
    Ok(format!(
        "max |encrypted - plain| = {worst:.3} dB over both modes, Qf 80..=100"
    ))
}

fn metadata_only_providers() -> Verdict {
    let policy = FacebookPolicy::default();
    let mut n = 0;
    for kind in [ProviderKind::GooglePlus, ProviderKind::Flickr] {
        let model = ProviderModel::new(kind);
        for img in corpus() {
            for mode in SubsamplingMode::ALL {
                for q in [50u8, 80, 95, 100] {
                    let input = with_metadata(&encode(&img, q, mode).unwrap());
                    let out = simulate_upload(&model, &input, policy).map_err(|e| e.to_string())?;
                    if decode(&out).map_err(|e| e.to_string())? != decode(&input).unwrap() {
                        return Err(format!("{kind} changed pixels of a {mode} Qf={q} upload"));
                    }
                    n += 1;
                }
            }
        }
    }
    Ok(format!("{n} uploads decode to identical pixels"))
}

fn acceptance_spec() -> ExperimentSpec {
    let text = "images = desk\nqf = 80-100\nmodes = 444,420\nproviders = twitter,facebook-hq\n\
                arms = encrypted,plain\nmaster_key = 0x5eed\nfacebook_qf = 77\n";
    ExperimentSpec::parse(text, std::path::Path::new(".")).expect("acceptance spec parses")
}

fn main() -> ExitCode {
    let start = Instant::now();
    let spec = acceptance_spec();
    let first = run_experiment(&spec);
    let second = run_experiment(&spec);
    let (csv1, csv2) = (to_csv_string(&first), to_csv_string(&second));

    let mut results: Vec<(&str, Verdict)> = vec![
        ("1 cipher round trip", cipher_round_trip()),
        ("2 block count", block_counts()),
        ("3 IJG scaling", ijg_scaling()),
        ("4 codec sanity", codec_sanity()),
        ("5 Twitter model", twitter_model()),
        ("6 Facebook model", facebook_model()),
        (
            "7 block artifact conditions",
            table2_reproduction(&first, &spec.key),
        ),
        ("8 Twitter transparency", twitter_transparency(&first)),
        ("9 metadata-only providers", metadata_only_providers()),
    ];
    let elapsed = start.elapsed();
    results.push((
        "10 determinism",
        if csv1 != csv2 {
            Err("two evaluate runs produced different CSV".into())
        } else {
            check(
                elapsed < Duration::from_secs(300),
                format!(
                    "{} rows byte-identical across runs; suite took {:.1}s",
                    first.len(),
                    elapsed.as_secs_f64()
                ),
                format!("suite took {:.1}s (target 300s)", elapsed.as_secs_f64()),
            )
        },
    ));

    let mut failed = 0;
    for (name, verdict) in &results {
        match verdict {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
