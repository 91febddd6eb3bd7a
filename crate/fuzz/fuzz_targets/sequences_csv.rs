#![no_main]
use contract_synth_cli::artifacts::parse_sequences;
use libfuzzer_sys::fuzz_target;

// First byte picks the dimensions, the rest is the file.
fuzz_target!(|data: &[u8]| {
    let Some((&dims, body)) = data.split_first() else { return };
    let n = 1 + (dims & 0x07) as usize;
    let m = 1 + (dims >> 3 & 0x03) as usize;
    if let Ok(seq) = parse_sequences(body, n, m) {
        assert_eq!(seq.u_d.len(), seq.x_d.len());
        assert!(seq.u_d.iter().all(|u| u.len() == m));
        assert!(seq.x_d.iter().all(|x| x.len() == n));
    }
});
