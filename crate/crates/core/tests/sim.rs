use latic::sim::{simulate, DecoderMode, SimConfig, SimRecord, SimScheme};
use latic::Error;

fn layered(rates: Vec<f64>, sigma2: f64) -> SimConfig {
    let mut c = SimConfig::new(SimScheme::LayeredSym, 4, 200, 21, rates);
    c.a = Some(3f64.sqrt());
    c.layers = c.rates.len();
    c.sigma2 = sigma2;
    c.search_budget = 3;
    c
}

/// Gains with ratio product 2 that satisfy the first condition set at unit
/// power and noise.
fn general() -> SimConfig {
    let h = [[1.0, 3.0, 1.5], [1.5, 1.0, 2.0], [1.5, 2.0, 1.0]];
    let mut c = SimConfig::new(SimScheme::VeryStrongGeneral, 4, 200, 8, vec![0.2, 0.2, 0.2]);
    c.h = Some(h);
    c.powers = Some([1.0; 3]);
    c.search_budget = 3;
    c
}

#[test]
fn noiseless_single_stage_runs_are_error_free() {
    for genie in [false, true] {
        let mut c = layered(vec![0.25], 1e-6);
        c.genie = genie;
        let s = simulate(&c).unwrap();
        assert_eq!(s.trials, 200);
        assert_eq!(s.block_errors, 0, "genie = {genie}");
        assert_eq!(s.alignment_violations, 0);
        assert_eq!(s.stages(), 1);
    }
    let mut p2p = SimConfig::new(SimScheme::P2p, 8, 300, 21, vec![1.0]);
    p2p.power = Some(15.0);
    p2p.sigma2 = 1e-6;
    assert_eq!(simulate(&p2p).unwrap().block_errors, 0);
}

/// Without noise the top stage still sees the lower layers and its own
/// codeword, which can push it across a decision boundary.
#[test]
fn structured_interference_persists_without_noise() {
    let mut c = layered(vec![0.25, 0.25], 1e-6);
    c.n = 8;
    let s = simulate(&c).unwrap();
    assert!(s.per_stage_interference_errors[0] > 0);
    assert_eq!(s.alignment_violations, 0);
}

#[test]
fn block_errors_cover_stage_errors() {
    let mut c = layered(vec![0.25, 0.25], 1.0);
    c.trials = 300;
    let s = simulate(&c).unwrap();
    let stage_max = s
        .per_stage_interference_errors
        .iter()
        .chain(&s.per_stage_message_errors)
        .max()
        .copied()
        .unwrap();
    let stage_sum: u64 = s
        .per_stage_interference_errors
        .iter()
        .chain(&s.per_stage_message_errors)
        .sum();
    assert!(s.block_errors >= stage_max);
    assert!(s.block_errors <= stage_sum);
    let (lo, hi) = s.wilson_interval;
    let rate = s.block_error_rate();
    assert!(lo <= rate && rate <= hi);
}

#[test]
fn decoders_agree_without_noise() {
    for mode in [DecoderMode::Restricted, DecoderMode::Lattice] {
        let mut c = layered(vec![0.3], 1e-9);
        c.decoder = mode;
        assert_eq!(simulate(&c).unwrap().block_errors, 0, "{mode:?}");
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let c = layered(vec![0.3, 0.3], 1.0);
    let many = simulate(&c).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let one = pool.install(|| simulate(&c).unwrap());
    assert_eq!(many, one);
    let line = |s| SimRecord::new(&c, s).to_json_line();
    assert_eq!(line(&many), line(&one));
}

#[test]
fn general_scheme_aligns_on_nonsymmetric_matrix() {
    let s = simulate(&general()).unwrap();
    assert_eq!(s.alignment_violations, 0);
    let mut quiet = general();
    quiet.sigma2 = 1e-9;
    let q = simulate(&quiet);
    // Shrinking the noise breaks the condition set, which is checked.
    assert!(matches!(q, Err(Error::Precondition(_))), "{q:?}");
}

#[test]
fn general_scheme_rejects_non_member() {
    let mut c = general();
    c.h = Some([[1.0, 3.0, 1.5], [1.5, 1.0, 2.0], [1.5 * 2f64.sqrt(), 2.0, 1.0]]);
    assert!(simulate(&c).unwrap_err().is_validation());
}

#[test]
fn config_round_trips_and_hashes() {
    let c = general();
    let text = serde_json::to_string(&c).unwrap();
    let back = SimConfig::from_json(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.hash(), c.hash());
    let mut d = c.clone();
    d.rates[0] = 0.21;
    assert_ne!(d.hash(), c.hash());
}

#[test]
fn more_noise_means_more_errors() {
    let mut quiet = SimConfig::new(SimScheme::P2p, 6, 600, 4, vec![1.0]);
    quiet.power = Some(15.0);
    quiet.search_budget = 5;
    let mut loud = quiet.clone();
    loud.sigma2 = 3.0;
    let (q, l) = (simulate(&quiet).unwrap(), simulate(&loud).unwrap());
    assert!(l.block_errors > q.block_errors, "{} vs {}", l.block_errors, q.block_errors);
}
