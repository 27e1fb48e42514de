use etc_sns::corpus::{desk_corpus, desk_image};
use etc_sns::image::{psnr, RasterImage};
use etc_sns::jpeg::{
    decode, decode_with, encode, insert_segment, parse, requantize, serialize, standard_table,
    strip_metadata, SubsamplingMode, TableClass, Upsampling,
};
use etc_sns::Error;
use proptest::prelude::*;

use SubsamplingMode::{S420, S444};

fn sample() -> RasterImage {
    desk_image("fruit").unwrap()
}

fn reference_decode(bytes: &[u8]) -> RasterImage {
    let mut d = jpeg_decoder::Decoder::new(bytes);
    let px = d.decode().expect("reference decoder accepts the stream");
    let info = d.info().unwrap();
    RasterImage::new(usize::from(info.width), usize::from(info.height), px).unwrap()
}

#[test]
fn stream_framing() {
    for mode in SubsamplingMode::ALL {
        let bytes = encode(&sample(), 75, mode).unwrap();
        assert_eq!(&bytes[..2], &[0xFF, 0xD8]);
        assert_eq!(&bytes[2..4], &[0xFF, 0xE0]);
        assert_eq!(&bytes[6..11], b"JFIF\0");
        assert_eq!(&bytes[bytes.len() - 2..], &[0xFF, 0xD9]);
    }
}

#[test]
fn near_lossless_at_quality_100() {
    let corpus = desk_corpus();
    let mean: f64 = corpus
        .iter()
        .map(|(_, img)| psnr(img, &decode(&encode(img, 100, S444).unwrap()).unwrap()).unwrap())
        .sum::<f64>()
        / corpus.len() as f64;
    assert!(mean >= 45.0, "mean {mean:.2} dB");
}

#[test]
fn written_tables_parse_back() {
    let img = sample();
    for q in 1..=100u8 {
        let coded = parse(&encode(&img, q, S420).unwrap()).unwrap();
        assert_eq!(
            coded.luma_table(),
            &standard_table(TableClass::Luma, q).unwrap()
        );
        assert_eq!(
            coded.chroma_table(),
            &standard_table(TableClass::Chroma, q).unwrap()
        );
        if q >= 50 {
            assert_eq!(coded.estimated_quality(), q);
        }
    }
}

#[test]
fn mid_gray_is_exact() {
    let img = RasterImage::filled(40, 24, [128, 128, 128]).unwrap();
    for mode in SubsamplingMode::ALL {
        for q in [1u8, 30, 75, 100] {
            assert_eq!(decode(&encode(&img, q, mode).unwrap()).unwrap(), img);
        }
    }
}

#[test]
fn odd_dimensions_survive() {
    let img = RasterImage::from_fn(37, 19, |x, y| [(x * 7) as u8, (y * 13) as u8, 90]).unwrap();
    for mode in SubsamplingMode::ALL {
        let out = decode(&encode(&img, 90, mode).unwrap()).unwrap();
        assert_eq!(out.dimensions(), (37, 19));
        assert!(psnr(&img, &out).unwrap() > 30.0);
    }
}

#[test]
fn reserialize_is_byte_identical() {
    for mode in SubsamplingMode::ALL {
        let bytes = encode(&sample(), 83, mode).unwrap();
        assert_eq!(serialize(&parse(&bytes).unwrap()).unwrap(), bytes);
    }
}

#[test]
fn requantize_same_quality_is_identity_and_idempotent() {
    let bytes = encode(&sample(), 92, S420).unwrap();
    assert_eq!(requantize(&parse(&bytes).unwrap(), 92).unwrap(), bytes);
    let once = requantize(&parse(&bytes).unwrap(), 85).unwrap();
    let twice = requantize(&parse(&once).unwrap(), 85).unwrap();
    assert_eq!(once, twice);
    assert_eq!(parse(&once).unwrap().estimated_quality(), 85);
}

#[test]
fn requantize_stays_close_to_a_fresh_encode() {
    let img = sample();
    let requant = requantize(&parse(&encode(&img, 95, S420).unwrap()).unwrap(), 85).unwrap();
    let fresh = encode(&img, 85, S420).unwrap();
    let a = psnr(&img, &decode(&requant).unwrap()).unwrap();
    let b = psnr(&img, &decode(&fresh).unwrap()).unwrap();
    assert!(
        (a - b).abs() < 1.0,
        "requantized {a:.2} dB vs fresh {b:.2} dB"
    );
}

#[test]
fn metadata_segments_are_skipped_and_stripped() {
    let bytes = encode(&sample(), 80, S444).unwrap();
    let tagged = insert_segment(&bytes, 0xE1, b"Exif\x00\x000123456789").unwrap();
    let tagged = insert_segment(&tagged, 0xED, b"Photoshop 3.0\0").unwrap();
    let tagged = insert_segment(&tagged, 0xFE, b"a comment").unwrap();
    assert!(tagged.len() > bytes.len());
    assert_eq!(parse(&tagged).unwrap(), parse(&bytes).unwrap());
    let stripped = strip_metadata(&tagged).unwrap();
    assert_eq!(stripped, bytes);
    assert_eq!(strip_metadata(&stripped).unwrap(), stripped);
}

#[test]
fn strip_inserts_app0_when_missing() {
    let bytes = encode(&sample(), 80, S444).unwrap();
    // drop the 18-byte APP0, add an APP1 instead
    let mut bare = vec![0xFF, 0xD8];
    bare.extend_from_slice(&bytes[20..]);
    let bare = insert_segment(&bare, 0xE1, b"XMP").unwrap();
    assert_eq!(strip_metadata(&bare).unwrap(), bytes);
}

#[test]
fn progressive_frames_are_unsupported() {
    let mut bytes = encode(&sample(), 80, S444).unwrap();
    let sof = bytes.windows(2).position(|w| w == [0xFF, 0xC0]).unwrap();
    bytes[sof + 1] = 0xC2;
    assert!(matches!(parse(&bytes), Err(Error::Unsupported(_))));
}

#[test]
fn truncated_scan_reports_the_mcu() {
    let bytes = encode(&sample(), 90, S420).unwrap();
    let cut = &bytes[..bytes.len() * 2 / 3];
    match parse(cut) {
        Err(Error::Decode { mcu, .. }) => assert!(mcu > 0),
        other => panic!("expected a decode error, got {other:?}"),
    }
    assert!(matches!(
        parse(&bytes[..1]),
        Err(Error::Format { offset: 0, .. })
    ));
    assert!(parse(b"not a jpeg").is_err());
}

#[test]
fn reference_decoder_agrees() {
    for (name, img) in desk_corpus().into_iter().take(4) {
        for (mode, floor) in [(S444, 45.0), (S420, 38.0)] {
            let bytes = encode(&img, 88, mode).unwrap();
            let ours = decode_with(&bytes, Upsampling::Bilinear).unwrap();
            let theirs = reference_decode(&bytes);
            let p = psnr(&ours, &theirs).unwrap();
            assert!(p > floor, "{name} {mode}: decoders differ ({p:.2} dB)");
        }
    }
}

#[test]
fn decodes_reference_encoder_output_with_restarts() {
    use jpeg_encoder::{ColorType, Encoder, SamplingFactor};
    let img = sample();
    for (factor, restart) in [
        (SamplingFactor::R_4_4_4, 0u16),
        (SamplingFactor::R_4_2_0, 3),
    ] {
        let mut bytes = Vec::new();
        let mut enc = Encoder::new(&mut bytes, 85);
        enc.set_sampling_factor(factor);
        if restart > 0 {
            enc.set_restart_interval(restart);
        }
        enc.encode(
            img.as_bytes(),
            img.width() as u16,
            img.height() as u16,
            ColorType::Rgb,
        )
        .unwrap();
        let coded = parse(&bytes).unwrap();
        assert_eq!(coded.restart_interval, restart);
        let ours = decode(&bytes).unwrap();
        assert!(psnr(&ours, &reference_decode(&bytes)).unwrap() > 38.0);
        assert!(psnr(&ours, &img).unwrap() > 30.0);
    }
}

#[test]
fn golden_stream() {
    // frozen output of the encoder; regenerate only for intentional changes
    let golden = include_bytes!("data/gradient_q75_420.jpg");
    let img = RasterImage::from_fn(48, 32, |x, y| {
        [(x * 5) as u8, (y * 7) as u8, ((x + y) * 3) as u8]
    })
    .unwrap();
    let bytes = encode(&img, 75, S420).unwrap();
    assert_eq!(bytes.as_slice(), golden.as_slice());
    assert!(psnr(&img, &reference_decode(golden)).unwrap() > 35.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_image_round_trips_structurally(
        w in 1usize..40,
        h in 1usize..40,
        q in 1u8..=100,
        s420 in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mode = if s420 { S420 } else { S444 };
        let mut state = seed;
        let img = RasterImage::from_fn(w, h, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = state.to_be_bytes();
            [b[0], b[1], b[2]]
        }).unwrap();
        let bytes = encode(&img, q, mode).unwrap();
        let coded = parse(&bytes).unwrap();
        prop_assert_eq!((coded.width, coded.height, coded.mode), (w, h, mode));
        prop_assert_eq!(decode(&bytes).unwrap().dimensions(), (w, h));
        prop_assert_eq!(serialize(&coded).unwrap(), bytes);
    }
}
