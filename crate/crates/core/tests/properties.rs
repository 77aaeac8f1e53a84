//! Large-`n` behaviour of the exact values over a range of orders.

use poisson_sums::asymptotics::limit_constant_tan;
use poisson_sums::norms::{exact_en, ExactConfig};
use poisson_sums::{ClassParams, Exponent};

const ALPHA: f64 = 1.0;
const R: f64 = 0.5;

fn ratio(p: Exponent, n: u64) -> f64 {
    let params = ClassParams::new(ALPHA, R, 0.0, p).unwrap();
    let exact = exact_en(&params, n, &ExactConfig::default()).unwrap();
    exact.scaled_value / (n as f64).powf((1.0 - R) * p.recip())
}

/// `e^{αn^r}E_n / n^{(1−r)/p}` stays in a fixed positive band.
#[test]
fn order_band() {
    for p in [1.0, 4.0 / 3.0, 2.0, 4.0] {
        let p = Exponent::new(p).unwrap();
        let ratios: Vec<f64> = (6..=12).map(|k| ratio(p, 1u64 << k)).collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        println!("p = {p}: band [{lo:.6}, {hi:.6}]");
        assert!(lo > 0.0);
        assert!(hi / lo < 1.5, "p = {p}: ratios {ratios:?}");
    }
}

#[test]
fn ratio_approaches_limit_constant() {
    for p in [2.0, 4.0] {
        let p = Exponent::new(p).unwrap();
        let params = ClassParams::new(ALPHA, R, 0.0, p).unwrap();
        let limit = limit_constant_tan(&params).unwrap();
        let early = ratio(p, 64);
        let late = ratio(p, 4096);
        println!("p = {p}: limit {limit:.6}, n=64 {early:.6}, n=4096 {late:.6}");
        assert!((late - limit).abs() < (early - limit).abs());
    }
}

#[test]
fn p2_limit_constant_matches_closed_form() {
    let params = ClassParams::new(ALPHA, R, 0.0, Exponent::TWO).unwrap();
    let limit = limit_constant_tan(&params).unwrap();
    let expected = 1.0 / (2.0 * std::f64::consts::PI * ALPHA * R).sqrt();
    assert!((limit - expected).abs() < 1e-12, "{limit} vs {expected}");
}
