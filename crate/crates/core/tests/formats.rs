use glyphcrt::channel::ChannelParams;
use glyphcrt::codebook::Codebook;
use glyphcrt::crypto::{PermutationKey, ToyRsaPrivate, ToyRsaPublic};
use glyphcrt::fixtures;
use glyphcrt::perceptual::{
    fit, responses_from_text, responses_to_text, scores_from_text, scores_to_text, synth_responses,
    FitConfig,
};
use glyphcrt::pipeline::{
    embed, simulate_document, ChannelTrace, CodecOptions, EncodedDocument, PlainMessage,
    VectorDocument,
};
use glyphcrt::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn header() -> Vec<String> {
    vec!["test header".to_string()]
}

fn document() -> EncodedDocument {
    let cb = fixtures::calibrated_codebook();
    let text = fixtures::english_text(120, &mut ChaCha8Rng::seed_from_u64(3));
    let text = format!("{text}\n\"quoted\", tabs\tand symbols: \u{2014} \u{20ac}5");
    let msg = PlainMessage::from_bytes(b"glyphs");
    embed(&text, &cb, &msg, None, &CodecOptions::default()).unwrap()
}

#[test]
fn codebook_round_trips_bit_exactly() {
    let cb = fixtures::calibrated_codebook();
    let once = cb.to_text(&header());
    let parsed = Codebook::from_text(&once).unwrap();
    assert_eq!(parsed.to_text(&header()), once);
    assert_eq!(parsed.id(), cb.id());
    for e in cb.entries() {
        assert_eq!(parsed.capacity(e.character), Some(e.capacity()));
    }
}

#[test]
fn encoded_document_round_trips() {
    let doc = document();
    let text = doc.to_text(&header());
    let back = EncodedDocument::from_text(&text).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.to_text(&header()), text);
}

#[test]
fn vector_document_round_trips() {
    let cb = fixtures::calibrated_codebook();
    let v = document().render(&cb).unwrap();
    let text = v.to_text(&[]);
    let back = VectorDocument::from_text(&text).unwrap();
    assert_eq!(back.to_text(&[]), text);
    assert_eq!(back.recognize(&cb).unwrap(), v.recognize(&cb).unwrap());
}

#[test]
fn trace_round_trips_exactly() {
    let cb = fixtures::calibrated_codebook();
    let trace = simulate_document(&document(), &cb, &ChannelParams::default()).unwrap();
    let text = trace.to_text(&header());
    let back = ChannelTrace::from_text(&text).unwrap();
    assert_eq!(back, trace);
}

#[test]
fn keys_round_trip() {
    let cb = fixtures::calibrated_codebook();
    let k = PermutationKey::generate(&cb, 9);
    let text = k.to_text(&header());
    assert_eq!(PermutationKey::from_text(&text).unwrap(), k);

    let rsa = ToyRsaPrivate::generate(4);
    let back = ToyRsaPrivate::from_text(&rsa.to_text(&[])).unwrap();
    assert_eq!(back.to_text(&[]), rsa.to_text(&[]));
    let public = ToyRsaPublic::from_text(&rsa.public.to_text(&[])).unwrap();
    assert_eq!(public, rsa.public);
}

#[test]
fn perceptual_files_round_trip() {
    let s = [0.1, 0.9, 0.4, 0.6];
    let r = vec![-8.0; 30];
    let responses = synth_responses(&s, &r, 16, 2).unwrap();
    let text = responses_to_text(&responses, &header());
    assert_eq!(responses_from_text(&text).unwrap(), responses);

    let result = fit(&responses, &FitConfig::default()).unwrap();
    let scores = scores_from_text(&scores_to_text(&result, &[])).unwrap();
    for (g, v) in &result.scores {
        assert!((scores[g] - v).abs() <= 5e-7);
    }
}

#[test]
fn format_errors_carry_line_numbers() {
    let doc = document().to_text(&[]);
    let broken = doc.replace("indices", "indexes");
    match EncodedDocument::from_text(&broken) {
        Err(Error::Format { line, .. }) => assert!(line > 1),
        other => panic!("expected a format error, got {other:?}"),
    }
    assert!(matches!(
        Codebook::from_text("not a codebook\n"),
        Err(Error::Format { line: 1, .. })
    ));
    let truncated: String = doc.lines().take(3).map(|l| format!("{l}\n")).collect();
    assert!(matches!(
        EncodedDocument::from_text(&truncated),
        Err(Error::Format { .. })
    ));
}
