#![no_main]
use contract_synth_cli::artifacts::parse_segments;
use libfuzzer_sys::fuzz_target;

// Two leading bytes pick n, m, degree and ell; the rest is the file.
fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let n = 1 + (data[0] & 0x07) as usize;
    let m = 1 + (data[0] >> 3 & 0x03) as usize;
    let degree = 1 + (data[1] & 0x0f) as usize;
    let ell = 1 + (data[1] >> 4) as usize;
    if let Ok(t) = parse_segments(&data[2..], n, m, degree, ell) {
        assert_eq!(t.u_nodes.len(), ell);
        assert!(t.x_points.iter().all(|p| p.shape() == (n, degree + 1)));
        assert!(t.u_points.iter().all(|p| p.shape() == (m, degree + 1)));
    }
});
