use contract_synth_cli::artifacts::{fmt_f64, parse_segments, parse_sequences};
use contract_synth_cli::config::parse_config;
use contract_synth_cli::CliError;
use proptest::prelude::*;
use std::path::Path;

fn robot_text() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/robot.cfg")).unwrap()
}

fn sequences_text(rows: &[Vec<f64>], m: usize, n: usize) -> String {
    let mut s = String::from("k,t");
    for i in 0..m {
        s.push_str(&format!(",u_{i}"));
    }
    for i in 0..n {
        s.push_str(&format!(",x_{i}"));
    }
    s.push('\n');
    for (k, row) in rows.iter().enumerate() {
        s.push_str(&format!("{k},{}", fmt_f64(k as f64 * 0.5)));
        for v in row {
            s.push(',');
            s.push_str(&fmt_f64(*v));
        }
        s.push('\n');
    }
    s
}

proptest! {
    #[test]
    fn truncated_configs_are_rejected_cleanly(cut in 0usize..2000) {
        let text = robot_text();
        let cut = cut.min(text.len() - 1);
        match parse_config(&text[..cut], "cut.json") {
            Err(CliError::Schema(msg)) => prop_assert!(msg.starts_with("cut.json")),
            other => prop_assert!(false, "unexpected {other:?}"),
        }
    }

    #[test]
    fn arbitrary_config_text_never_panics(text in "\\PC{0,200}") {
        let _ = parse_config(&text, "fuzz.json");
    }

    #[test]
    fn sequences_round_trip_bit_exactly(
        m in 1usize..3,
        n in 1usize..4,
        rows in 2usize..6,
        seed in prop::collection::vec(-1e6f64..1e6, 30),
    ) {
        let data: Vec<Vec<f64>> = (0..rows)
            .map(|k| (0..m + n).map(|j| seed[(k * 5 + j) % seed.len()]).collect())
            .collect();
        let parsed = parse_sequences(sequences_text(&data, m, n).as_bytes(), n, m).unwrap();
        for (k, row) in data.iter().enumerate() {
            for j in 0..m {
                prop_assert_eq!(parsed.u_d[k][j].to_bits(), row[j].to_bits());
            }
            for j in 0..n {
                prop_assert_eq!(parsed.x_d[k][j].to_bits(), row[m + j].to_bits());
            }
        }
    }

    #[test]
    fn arbitrary_segment_rows_never_panic(text in "(segment,signal,component,index,node_value,control_point\n)?([0-9ux,.e-]{0,30}\n){0,8}") {
        let _ = parse_segments(text.as_bytes(), 2, 1, 2, 2);
    }
}
