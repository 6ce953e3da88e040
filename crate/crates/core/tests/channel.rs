use ssd_lab::channel::{frame_rng, sample_channel, transmit, CellPair, ChannelConfig, Fading, Observation};

const N: usize = 1_000_000;

fn observations(erasure_prob: f64) -> Vec<Observation> {
    let cfg = ChannelConfig {
        esn0_db: 10.0,
        erasure_prob,
        fading: Fading::Rayleigh,
        seed: 31,
    };
    let mut rng = frame_rng(cfg.seed, 0);
    let fades = sample_channel(&cfg, N, &mut rng);
    transmit(&vec![CellPair::default(); N], &fades, cfg.sigma2(), &mut rng).unwrap()
}

#[test]
fn component_gains_of_one_symbol_are_uncorrelated() {
    let obs = observations(0.0);
    let n = obs.len() as f64;
    let mean = |f: &dyn Fn(&Observation) -> f64| obs.iter().map(f).sum::<f64>() / n;
    let (mi, mq) = (mean(&|o| o.h_i), mean(&|o| o.h_q));
    let cov = mean(&|o| (o.h_i - mi) * (o.h_q - mq));
    let vi = mean(&|o| (o.h_i - mi).powi(2));
    let vq = mean(&|o| (o.h_q - mq).powi(2));
    let rho = cov / (vi * vq).sqrt();
    assert!(rho.abs() < 0.01, "rho = {rho}");
    let power = mean(&|o| o.h_i * o.h_i);
    assert!((power - 1.0).abs() < 0.01, "E[h^2] = {power}");
}

#[test]
fn both_components_erased_at_rate_p_squared() {
    for p in [0.15, 0.3] {
        let obs = observations(p);
        let both = obs.iter().filter(|o| o.h_i == 0.0 && o.h_q == 0.0).count() as f64 / obs.len() as f64;
        let single = obs.iter().filter(|o| o.h_i == 0.0).count() as f64 / obs.len() as f64;
        assert!((both / (p * p) - 1.0).abs() < 0.1, "p={p}: both erased {both}");
        assert!((single / p - 1.0).abs() < 0.02, "p={p}: I erased {single}");
    }
}

#[test]
fn noise_power_matches_esn0() {
    let obs = observations(0.0);
    let sigma2 = obs[0].sigma2;
    let measured = obs.iter().map(|o| o.y_i * o.y_i + o.y_q * o.y_q).sum::<f64>() / obs.len() as f64;
    assert!((measured / sigma2 - 1.0).abs() < 0.01, "{measured} vs {sigma2}");
}
