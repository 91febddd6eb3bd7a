//! Run configuration parsing. Accepted configs must also survive semantic
//! validation and model construction without panicking.

#![no_main]
use contract_synth_cli::config::parse_config;
use libfuzzer_sys::fuzz_target;

const MAX_INPUT_SIZE: usize = 64 * 1024;

fuzz_target!(|data: &[u8]| {
    if data.len() > MAX_INPUT_SIZE {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text, "fuzz.json") {
        let _ = cfg.system();
        let _ = cfg.contract();
        assert_eq!(cfg.initial_state().len(), cfg.state_dim());
        assert_eq!(cfg.state_labels().len(), cfg.state_dim());
        assert_eq!(cfg.input_labels().len(), cfg.input_dim());
    }
});
