use cihash::preprocess::{normalize, parse_golden, write_golden, HashParams};
use cihash::{hash, hash_file, BitString, Encoding, Profile};

const GOLDEN: &str = include_str!("data/the_original_text.golden");
const DIGESTS: &str = include_str!("data/digests.txt");

fn golden(name: &str) -> BitString {
    parse_golden(GOLDEN)
        .unwrap()
        .into_iter()
        .find(|(n, _)| n == name)
        .unwrap_or_else(|| panic!("no stage {name}"))
        .1
}

fn ascii() -> HashParams {
    HashParams::default().with_encoding(Encoding::Ascii7)
}

#[test]
fn normalization_stages_match_displays() {
    let norm = normalize(b"The original text", &ascii()).unwrap();
    let log = &norm.stage_log;

    let mut with_marker = log.encoded.clone();
    with_marker.push(true);
    assert_eq!(log.encoded.len(), 119);
    assert_eq!(with_marker, golden("with_marker"));
    assert_eq!(log.marked, golden("marked"));
    assert_eq!(log.mirrored, golden("mirrored"));
    assert_eq!(log.mirrored.to_string().split(' ').nth(16), Some("00011111"));
    assert_eq!(norm.d.len(), 512);
    assert_eq!(norm.x0.bits(), &golden("x0"));
}

#[test]
fn golden_file_reproduces_from_pipeline() {
    let norm = normalize(b"The original text", &ascii()).unwrap();
    let mut with_marker = norm.stage_log.encoded.clone();
    with_marker.push(true);
    let rendered = write_golden([
        ("with_marker", &with_marker),
        ("marked", &norm.stage_log.marked),
        ("mirrored", &norm.stage_log.mirrored),
        ("x0", norm.x0.bits()),
    ]);
    let body: String = GOLDEN
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(rendered, body);
}

struct Vector {
    label: String,
    params: HashParams,
    message: Vec<u8>,
    digest: String,
}

fn vectors() -> Vec<Vector> {
    DIGESTS
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split_whitespace().collect();
            let mut params = HashParams::new(f[2].parse().unwrap()).unwrap();
            params.encoding = match f[1] {
                "ascii7" => Encoding::Ascii7,
                _ => Encoding::Raw8,
            };
            if f[3] != "-" {
                params = params.with_key(f[3].parse().unwrap());
            }
            params.profile = match f[4] {
                "literal" => Profile::Literal,
                _ => Profile::Reference,
            };
            let message = if f[5] == "-" {
                Vec::new()
            } else {
                (0..f[5].len())
                    .step_by(2)
                    .map(|i| u8::from_str_radix(&f[5][i..i + 2], 16).unwrap())
                    .collect()
            };
            Vector {
                label: f[0].to_string(),
                params,
                message,
                digest: f[6].to_string(),
            }
        })
        .collect()
}

#[test]
fn frozen_digests() {
    let vs = vectors();
    assert_eq!(vs.len(), 7);
    for v in vs {
        assert_eq!(hash(&v.message, &v.params).unwrap().hex(), v.digest, "{}", v.label);
    }
}

#[test]
fn file_hashing_matches_in_memory() {
    let dir = std::env::temp_dir().join(format!("cihash-vectors-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let text = dir.join("text");
    std::fs::write(&text, b"The original text").unwrap();
    assert_eq!(
        hash_file(&text, &ascii()).unwrap().hex(),
        "63A88CB6AF0B18E3BE828F9BDA4596A6A13DFE38440AB9557DA1C0C6B1EDBDBD"
    );

    let empty = dir.join("empty");
    std::fs::write(&empty, b"").unwrap();
    let params = HashParams::default();
    assert_eq!(hash_file(&empty, &params).unwrap(), hash(b"", &params).unwrap());

    let zero = dir.join("zero");
    std::fs::write(&zero, [0u8]).unwrap();
    assert_eq!(
        hash_file(&zero, &params).unwrap().hex(),
        "8222A0F2545536491AA7C82754F8456B9F44AD33E995AE5BA285D2F43D945FAF"
    );

    let missing = dir.join("missing");
    let err = hash_file(&missing, &params).unwrap_err();
    assert!(err.to_string().contains("missing"));

    std::fs::remove_dir_all(&dir).ok();
}
